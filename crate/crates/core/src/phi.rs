//! Bernoulli numbers, power sums under the CY condition, the `log Φ` series,
//! `Φ∂ᵐ(1/Φ)` and the numbers `Q(n,k)`.

use crate::algebra::{binomial, binomial_rational, Rational, SigmaPoly, ThetaPoly};
use crate::bell::{bell_complete, BellRing};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PhiError {
    #[error("Q({n},{k}) requires 1 <= k <= n+1")]
    QRange { n: usize, k: usize },
    #[error("power sums are only defined here for odd k >= 1 (got {0})")]
    EvenPowerSum(usize),
    #[error("exp needs a series with positive valuation")]
    ExpValuation,
    #[error("series truncated at z^-{have}, z^-{need} requested")]
    Truncated { have: i32, need: i32 },
}

/// Truncated series `Σ_{n=start}^{order} a_n z^{−n}` with `σ`-polynomial coefficients.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ZInvSeries {
    start: i32,
    order: i32,
    coeffs: Vec<SigmaPoly>,
}

impl ZInvSeries {
    pub fn zero(order: i32) -> Self {
        ZInvSeries { start: order + 1, order, coeffs: Vec::new() }
    }

    pub fn one(order: i32) -> Self {
        ZInvSeries::monomial(0, SigmaPoly::one(), order)
    }

    /// `c · z^{−n}`.
    pub fn monomial(n: i32, c: SigmaPoly, order: i32) -> Self {
        if n > order {
            return ZInvSeries::zero(order);
        }
        ZInvSeries { start: n, order, coeffs: vec![c] }.normalized()
    }

    /// Coefficients of `z^{−start}, z^{−start−1}, …`.
    pub fn from_coeffs(start: i32, coeffs: Vec<SigmaPoly>, order: i32) -> Self {
        let mut s = ZInvSeries { start, order, coeffs };
        s.coeffs.truncate((order - start + 1).max(0) as usize);
        s.normalized()
    }

    fn normalized(mut self) -> Self {
        while self.coeffs.last().is_some_and(SigmaPoly::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        self.coeffs.drain(..lead);
        self.start += lead as i32;
        if self.coeffs.is_empty() {
            self.start = self.order + 1;
        }
        self
    }

    /// Coefficients are known exactly up to `z^{−order}`.
    pub fn order(&self) -> i32 {
        self.order
    }

    /// Smallest `n` with a nonzero coefficient of `z^{−n}`.
    pub fn valuation(&self) -> Option<i32> {
        (!self.coeffs.is_empty()).then_some(self.start)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `z^{−n}`; errors beyond the truncation order.
    pub fn coeff(&self, n: i32) -> Result<SigmaPoly, PhiError> {
        if n > self.order {
            return Err(PhiError::Truncated { have: self.order, need: n });
        }
        if n < self.start {
            return Ok(SigmaPoly::zero());
        }
        Ok(self.coeffs.get((n - self.start) as usize).cloned().unwrap_or_default())
    }

    fn coeff_ref(&self, n: i32) -> Option<&SigmaPoly> {
        if n < self.start {
            return None;
        }
        self.coeffs.get((n - self.start) as usize)
    }

    pub fn truncate(&self, order: i32) -> ZInvSeries {
        let order = order.min(self.order);
        ZInvSeries::from_coeffs(self.start, self.coeffs.clone(), order)
    }

    fn lo(&self) -> i32 {
        self.valuation().unwrap_or(self.order + 1)
    }

    pub fn add(&self, other: &ZInvSeries) -> ZInvSeries {
        let order = self.order.min(other.order);
        let start = self.lo().min(other.lo());
        let coeffs = (start..=order)
            .map(|n| {
                let mut c = self.coeff_ref(n).cloned().unwrap_or_default();
                if let Some(b) = other.coeff_ref(n) {
                    c.add_assign(b);
                }
                c
            })
            .collect();
        ZInvSeries::from_coeffs(start, coeffs, order)
    }

    pub fn neg(&self) -> ZInvSeries {
        ZInvSeries { start: self.start, order: self.order, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn sub(&self, other: &ZInvSeries) -> ZInvSeries {
        self.add(&other.neg())
    }

    /// Product; the result is exact up to `min(N_a + v_b, N_b + v_a)`.
    pub fn mul(&self, other: &ZInvSeries) -> ZInvSeries {
        let (va, vb) = (self.lo(), other.lo());
        let order = (self.order + vb).min(other.order + va);
        if self.is_zero() || other.is_zero() {
            return ZInvSeries::zero(order);
        }
        let start = va + vb;
        let mut coeffs = vec![SigmaPoly::zero(); (order - start + 1).max(0) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            let na = self.start + i as i32;
            for (j, b) in other.coeffs.iter().enumerate() {
                let n = na + other.start + j as i32;
                if n > order {
                    break;
                }
                coeffs[(n - start) as usize].add_product(a, b);
            }
        }
        ZInvSeries::from_coeffs(start, coeffs, order)
    }

    pub fn scale(&self, c: &Rational) -> ZInvSeries {
        ZInvSeries::from_coeffs(self.start, self.coeffs.iter().map(|s| s.scale(c)).collect(), self.order)
    }

    pub fn scale_sigma(&self, c: &SigmaPoly) -> ZInvSeries {
        ZInvSeries::from_coeffs(self.start, self.coeffs.iter().map(|s| s * c).collect(), self.order)
    }

    /// `d/dz`, mapping `z^{−n}` to `−n z^{−n−1}`.
    pub fn derivative(&self) -> ZInvSeries {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.scale(&Rational::from_int(-(self.start as i64 + i as i64))))
            .collect();
        ZInvSeries::from_coeffs(self.start + 1, coeffs, self.order + 1)
    }

    /// `exp(self)` for a series with positive valuation.
    pub fn exp(&self) -> Result<ZInvSeries, PhiError> {
        let v = match self.valuation() {
            None => return Ok(ZInvSeries::one(self.order)),
            Some(v) if v >= 1 => v,
            Some(_) => return Err(PhiError::ExpValuation),
        };
        let mut acc = ZInvSeries::one(self.order);
        let mut term = ZInvSeries::one(self.order);
        for k in 1..=(self.order / v) {
            term = term.mul(self).scale(&Rational::new(1, k as i64)).truncate(self.order);
            acc = acc.add(&term);
        }
        Ok(acc.truncate(self.order))
    }

    /// Substitute numeric `σ₁, σ₃`.
    pub fn specialize(&self, s1: &Rational, s3: &Rational) -> ZInvSeries {
        ZInvSeries::from_coeffs(
            self.start,
            self.coeffs.iter().map(|c| c.specialize(s1, s3)).collect(),
            self.order,
        )
    }
}

impl BellRing for ZInvSeries {
    fn zero_like(&self) -> Self {
        ZInvSeries::zero(i32::MAX / 4)
    }
    fn one_like(&self) -> Self {
        ZInvSeries::one(i32::MAX / 4)
    }
    fn add(&self, other: &Self) -> Self {
        ZInvSeries::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        ZInvSeries::mul(self, other)
    }
    fn scale(&self, c: &Rational) -> Self {
        ZInvSeries::scale(self, c)
    }
}

/// `B_0, …, B_n` from `Σ_{k≤m} C(m+1,k) B_k = 0`, with `B₁ = −1/2`.
pub fn bernoulli_numbers(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = vec![Rational::one()];
    for m in 1..=n {
        let s: Rational = (0..m).map(|k| binomial((m + 1) as u32, k as u32) * &b[k]).sum();
        b.push(-(s / Rational::from_int(m as i64 + 1)));
    }
    b
}

pub fn bernoulli(n: usize) -> Rational {
    bernoulli_numbers(n).pop().expect("nonempty")
}

/// `e₃ = pqr` in terms of `σ₁, σ₃`.
fn e3() -> SigmaPoly {
    &SigmaPoly::s1().pow(3).scale(&Rational::new(1, 3)) - &SigmaPoly::s3().scale(&Rational::new(1, 6))
}

/// Power sums `p_0, …, p_k` of `p, q, r` with `pq + qr + rp = 0`, by Newton's
/// identities with `e₁ = −σ₁`, `e₂ = 0`, `e₃ = σ₁³/3 − σ₃/6`.
fn power_sums_upto(k: usize) -> Vec<SigmaPoly> {
    let e1 = -&SigmaPoly::s1();
    let e3 = e3();
    let mut p = vec![SigmaPoly::constant(Rational::from_int(3)), e1.clone(), e1.pow(2)];
    for n in 3..=k {
        let next = &(&e1 * &p[n - 1]) + &(&e3 * &p[n - 3]);
        p.push(next);
    }
    p.truncate(k + 1);
    p
}

/// `p^k + q^k + r^k` for odd `k`.
pub fn power_sum(k: usize) -> Result<SigmaPoly, PhiError> {
    if k % 2 == 0 {
        return Err(PhiError::EvenPowerSum(k));
    }
    Ok(power_sums_upto(k).swap_remove(k))
}

/// `(σ₁, σ₃)` induced by a triple `(p, q, r)`.
pub fn sigma_of_triple(p: &Rational, q: &Rational, r: &Rational) -> (Rational, Rational) {
    let s1 = -(p + q + r);
    let s3 = Rational::from_int(-2) * (p.pow(3) + q.pow(3) + r.pow(3));
    (s1, s3)
}

/// `log Φ = −Σ_i B_{2i}/(2i(2i−1)) (p^{2i−1}+q^{2i−1}+r^{2i−1}) z^{1−2i}` up to `z^{−order}`.
pub fn log_phi(order: i32) -> ZInvSeries {
    let top = order.max(1) as usize;
    let b = bernoulli_numbers(top + 1);
    let ps = power_sums_upto(top);
    let mut coeffs = vec![SigmaPoly::zero(); top];
    let mut i = 1;
    while 2 * i - 1 <= top {
        let w = Rational::from_int((2 * i * (2 * i - 1)) as i64);
        let c = -(&b[2 * i] / &w);
        coeffs[2 * i - 2] = ps[2 * i - 1].scale(&c);
        i += 1;
    }
    ZInvSeries::from_coeffs(1, coeffs, order)
}

/// `Φ ∂_z^m (1/Φ) = B_m(−∂ log Φ, …, −∂^m log Φ)` up to `z^{−order}`.
pub fn phi_d_inv(m: usize, order: i32) -> ZInvSeries {
    let mut slots = Vec::with_capacity(m);
    let mut d = log_phi(order).neg();
    for _ in 0..m {
        d = d.derivative();
        slots.push(d.clone());
    }
    let out = bell_complete(m, &slots, &ZInvSeries::one(order)).expect("m slots supplied");
    debug_assert!(out.order() >= order);
    out.truncate(order)
}

/// Cache of `Φ∂ᵐ(1/Φ)` for `m ≤ m_max`, all to the same order.
#[derive(Clone, Debug)]
pub struct PhiCache {
    order: i32,
    series: Vec<ZInvSeries>,
}

impl PhiCache {
    pub fn new(m_max: usize, order: i32) -> Self {
        let mut slots = Vec::with_capacity(m_max);
        let mut d = log_phi(order).neg();
        for _ in 0..m_max {
            d = d.derivative();
            slots.push(d.clone());
        }
        // Complete Bell polynomials share the recurrence, so build them all at once.
        let mut b: Vec<ZInvSeries> = vec![ZInvSeries::one(order)];
        for n in 0..m_max {
            let mut acc = ZInvSeries::zero(order);
            for i in 0..=n {
                let c = binomial(n as u32, i as u32);
                acc = acc.add(&b[n - i].mul(&slots[i]).scale(&c).truncate(order));
            }
            b.push(acc.truncate(order));
        }
        PhiCache { order, series: b }
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn m_max(&self) -> usize {
        self.series.len() - 1
    }

    pub fn get(&self, m: usize) -> &ZInvSeries {
        &self.series[m]
    }
}

/// `Q(n,k) = (1/k) Σ_{i=1}^k (−1)^{i−1} C(k,i) i^{n+1}`.
pub fn q_number(n: usize, k: usize) -> Result<Rational, PhiError> {
    if k == 0 || k > n + 1 {
        return Err(PhiError::QRange { n, k });
    }
    let s: Rational = (1..=k)
        .map(|i| {
            let sign = if i % 2 == 1 { 1 } else { -1 };
            binomial(k as u32, i as u32) * Rational::from_int(sign) * Rational::from_int(i as i64).pow(n as i32 + 1)
        })
        .sum();
    Ok(s / Rational::from_int(k as i64))
}

/// `Σ_k Q(n,k) Θ^k`.
pub fn q_polynomial(n: usize) -> ThetaPoly {
    let mut coeffs = vec![SigmaPoly::zero()];
    for k in 1..=n + 1 {
        coeffs.push(SigmaPoly::constant(q_number(n, k).expect("k in range")));
    }
    ThetaPoly::from_sigma(coeffs)
}

/// `log Φ(z − j)` re-expanded in `z^{−1}` up to `z^{−order}`.
pub fn log_phi_shifted(j: i64, order: i32) -> ZInvSeries {
    let base = log_phi(order);
    let mut out = ZInvSeries::zero(order);
    for n in 1..=order {
        let c = base.coeff(n).expect("within order");
        if c.is_zero() {
            continue;
        }
        // z^{−n}(1 − j/z)^{−n} = Σ_m C(−n, m)(−j)^m z^{−n−m}
        let mut terms = vec![SigmaPoly::zero(); (order - n + 1) as usize];
        for (m, slot) in terms.iter_mut().enumerate() {
            let b = binomial_rational(&Rational::from_int(-(n as i64)), m as u32)
                * Rational::from_int(-j).pow(m as i32);
            *slot = c.scale(&b);
        }
        out = out.add(&ZInvSeries::from_coeffs(n, terms, order));
    }
    out
}

/// `√z Φ(z) / (√(z−j) Φ(z−j))` up to `z^{−order}`.
pub fn sqrt_shift_ratio(j: i64, order: i32) -> ZInvSeries {
    // −½ log(1 − j/z) = ½ Σ_{m≥1} j^m/(m z^m)
    let half_log: Vec<SigmaPoly> = (1..=order)
        .map(|m| SigmaPoly::constant(Rational::from_int(j).pow(m) * Rational::new(1, 2 * m as i64)))
        .collect();
    let arg = log_phi(order)
        .sub(&log_phi_shifted(j, order))
        .add(&ZInvSeries::from_coeffs(1, half_log, order));
    arg.exp().expect("positive valuation")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn bernoulli_values() {
        assert_eq!(bernoulli(0), 1);
        assert_eq!(bernoulli(1), r(-1, 2));
        assert_eq!(bernoulli(2), r(1, 6));
        assert_eq!(bernoulli(4), r(-1, 30));
        assert_eq!(bernoulli(12), r(-691, 2730));
        assert_eq!(bernoulli(7), 0);
    }

    #[test]
    fn power_sums() {
        assert_eq!(power_sum(1).unwrap(), -&SigmaPoly::s1());
        assert_eq!(power_sum(3).unwrap(), SigmaPoly::s3().scale(&r(-1, 2)));
        assert!(power_sum(4).is_err());
        // p = q = 1, r = −1/2 satisfies pq + qr + rp = 0.
        let (s1, s3) = sigma_of_triple(&r(1, 1), &r(1, 1), &r(-1, 2));
        assert_eq!((s1.clone(), s3.clone()), (r(-3, 2), r(-15, 4)));
        assert_eq!(power_sum(5).unwrap().eval(&s1, &s3), r(63, 32));
        for i in 1..=6 {
            assert_eq!(power_sum(2 * i - 1).unwrap().weighted_degree(), Some(2 * i as u32 - 1));
        }
    }

    #[test]
    fn log_phi_coefficients() {
        let l = log_phi(7);
        assert_eq!(l.coeff(1).unwrap(), SigmaPoly::s1().scale(&r(1, 12)));
        assert!(l.coeff(2).unwrap().is_zero());
        assert_eq!(l.coeff(3).unwrap(), SigmaPoly::s3().scale(&r(-1, 720)));
        assert!(l.coeff(8).is_err());
    }

    #[test]
    fn phi_d_inv_leading_terms() {
        assert_eq!(phi_d_inv(0, 6), ZInvSeries::one(6));
        let p1 = phi_d_inv(1, 6);
        assert_eq!(p1.valuation(), Some(2));
        assert_eq!(p1.coeff(2).unwrap(), SigmaPoly::s1().scale(&r(1, 12)));
    }

    #[test]
    fn phi_d_inv_matches_direct_series() {
        let order = 8;
        let l = log_phi(order + 2);
        let phi = l.exp().unwrap();
        let inv = l.neg().exp().unwrap();
        let mut d = inv.clone();
        for m in 1..=4 {
            d = d.derivative();
            let direct = phi.mul(&d).truncate(order);
            assert_eq!(direct, phi_d_inv(m, order), "m = {m}");
        }
        let cache = PhiCache::new(4, order);
        for m in 0..=4 {
            assert_eq!(cache.get(m), &phi_d_inv(m, order));
        }
    }

    #[test]
    fn q_numbers() {
        assert_eq!(q_number(0, 1).unwrap(), 1);
        assert_eq!(q_number(1, 2).unwrap(), -1);
        assert_eq!(q_number(2, 3).unwrap(), 2);
        assert!(q_number(2, 4).is_err());
        assert!(q_number(2, 0).is_err());
    }

    #[test]
    fn q_geometric_oracle() {
        let order = 12;
        for n in 0..=8 {
            let s = q_polynomial(n).to_xi_series(order).unwrap();
            for (j, c) in s.iter().enumerate() {
                let expect = Rational::from_int(-(j as i64)).pow(n as i32);
                assert_eq!(*c, SigmaPoly::constant(expect), "n = {n}, ξ^{j}");
            }
        }
    }

    #[test]
    fn shift_of_log_phi_is_taylor() {
        let order = 9;
        assert_eq!(log_phi_shifted(0, order), log_phi(order));
        assert_eq!(sqrt_shift_ratio(0, order), ZInvSeries::one(order));
        // Only σ₁/(12(z−j)) reaches z^{−2}, z^{−3}: σ₁ j/12 and σ₁ j²/12 (+ the z^{−3} term).
        let l = log_phi_shifted(2, order);
        assert_eq!(l.coeff(2).unwrap(), SigmaPoly::s1().scale(&r(2, 12)));
        let expect3 = &SigmaPoly::s1().scale(&r(4, 12)) + &SigmaPoly::s3().scale(&r(-1, 720));
        assert_eq!(l.coeff(3).unwrap(), expect3);
        // log of the ratio begins with j/(2z).
        let q = sqrt_shift_ratio(3, order);
        assert_eq!(q.coeff(1).unwrap(), SigmaPoly::constant(r(3, 2)));
    }
}
