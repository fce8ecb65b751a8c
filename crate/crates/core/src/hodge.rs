//! Downstream quantities: the genus-zero series `v(t)`, `t`-expansions of
//! `H_g`, gap polynomials `R_g`, the Faber-type leading term and the
//! first-flow consistency check.

use std::collections::BTreeMap;

use rayon::prelude::*;
use smallvec::SmallVec;

use crate::algebra::{factorial, JetPoly, Rational, SigmaPoly};
use crate::loop_solver::{FreeEnergy, FreeEnergyBody};
use crate::phi::bernoulli;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HodgeError {
    #[error("R_g is defined for g >= 2 (got {0})")]
    GenusTooSmall(u32),
    #[error("series known only to degree {have}, degree {need} requested")]
    Precision { have: u32, need: u32 },
    #[error("expected H_{expected}, got H_{got}")]
    WrongGenus { expected: u32, got: u32 },
    #[error("H_1 must carry a log z1 term")]
    NotGenusOne,
    #[error("log needs a series with constant term 1")]
    LogConstant,
}

/// Exponents of `t₀, t₁, …` (trailing zeros trimmed).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct TMono(SmallVec<[u8; 8]>);

impl TMono {
    pub fn one() -> Self {
        TMono(SmallVec::new())
    }

    pub fn var(k: usize) -> Self {
        let mut v = SmallVec::from_elem(0, k + 1);
        v[k] = 1;
        TMono(v)
    }

    pub fn from_exponents(e: &[u8]) -> Self {
        let mut m = TMono(SmallVec::from_slice(e));
        m.trim();
        m
    }

    fn trim(&mut self) {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
    }

    pub fn exponents(&self) -> &[u8] {
        &self.0
    }

    pub fn exponent(&self, k: usize) -> u8 {
        self.0.get(k).copied().unwrap_or(0)
    }

    /// Number of `t`-factors.
    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    /// `Σ_k k·e_k`, the sum of the insertion indices.
    pub fn index_sum(&self) -> u32 {
        self.0.iter().enumerate().map(|(k, &e)| k as u32 * e as u32).sum()
    }

    pub fn mul(&self, other: &TMono) -> TMono {
        let n = self.0.len().max(other.0.len());
        let v = (0..n).map(|k| self.exponent(k) + other.exponent(k)).collect();
        TMono(v)
    }

    /// The insertion list `i₁ ≤ i₂ ≤ …`.
    pub fn indices(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(k, &e)| std::iter::repeat_n(k, e as usize)).collect()
    }

    /// `Π_k e_k!`: converts a raw coefficient into a correlator.
    pub fn automorphism(&self) -> Rational {
        self.0.iter().map(|&e| factorial(e as u32)).product()
    }
}

impl Ord for TMono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            (0..n).map(|k| other.exponent(k)).cmp((0..n).map(|k| self.exponent(k)))
        })
    }
}

impl PartialOrd for TMono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Debug for TMono {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(k, &e)| if e == 1 { format!("t{k}") } else { format!("t{k}^{e}") })
            .collect();
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Power series in `t₀, …, t_{n_max}` exact through total degree `d_max`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TSeries {
    n_max: usize,
    d_max: u32,
    terms: BTreeMap<TMono, SigmaPoly>,
}

impl TSeries {
    pub fn zero(n_max: usize, d_max: u32) -> Self {
        TSeries { n_max, d_max, terms: BTreeMap::new() }
    }

    pub fn constant(c: SigmaPoly, n_max: usize, d_max: u32) -> Self {
        let mut s = TSeries::zero(n_max, d_max);
        s.add_term(TMono::one(), &c);
        s
    }

    pub fn one(n_max: usize, d_max: u32) -> Self {
        TSeries::constant(SigmaPoly::one(), n_max, d_max)
    }

    /// The variable `t_k`.
    pub fn var(k: usize, n_max: usize, d_max: u32) -> Self {
        let mut s = TSeries::zero(n_max, d_max);
        s.add_term(TMono::var(k), &SigmaPoly::one());
        s
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn d_max(&self) -> u32 {
        self.d_max
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&TMono, &SigmaPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &TMono) -> Result<SigmaPoly, HodgeError> {
        if m.degree() > self.d_max {
            return Err(HodgeError::Precision { have: self.d_max, need: m.degree() });
        }
        Ok(self.terms.get(m).cloned().unwrap_or_default())
    }

    pub fn add_term(&mut self, m: TMono, c: &SigmaPoly) {
        if c.is_zero() || m.degree() > self.d_max {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_default();
        slot.add_assign(c);
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    /// Lowest degree present (`d_max + 1` for zero).
    pub fn valuation(&self) -> u32 {
        self.terms.keys().next().map_or(self.d_max + 1, TMono::degree)
    }

    pub fn truncate(&self, d: u32) -> TSeries {
        let d = d.min(self.d_max);
        TSeries {
            n_max: self.n_max,
            d_max: d,
            terms: self.terms.iter().filter(|(m, _)| m.degree() <= d).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn add(&self, other: &TSeries) -> TSeries {
        let mut out = self.truncate(other.d_max);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &TSeries) -> TSeries {
        self.add(&other.scale(&Rational::from_int(-1)))
    }

    /// Product; exact through `min(d_a + v_b, d_b + v_a)`.
    pub fn mul(&self, other: &TSeries) -> TSeries {
        let d = (self.d_max + other.valuation()).min(other.d_max + self.valuation());
        self.mul_to(other, d)
    }

    /// Product truncated to degree `d` (and to its intrinsic precision).
    pub fn mul_to(&self, other: &TSeries, d: u32) -> TSeries {
        let d = d.min((self.d_max + other.valuation()).min(other.d_max + self.valuation()));
        let mut out = TSeries::zero(self.n_max.max(other.n_max), d);
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > d {
                break;
            }
            for (mb, cb) in &other.terms {
                if da + mb.degree() > d {
                    break;
                }
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> TSeries {
        TSeries {
            n_max: self.n_max,
            d_max: self.d_max,
            terms: if c.is_zero() {
                BTreeMap::new()
            } else {
                self.terms.iter().map(|(m, s)| (m.clone(), s.scale(c))).collect()
            },
        }
    }

    pub fn scale_sigma(&self, c: &SigmaPoly) -> TSeries {
        let mut out = TSeries::zero(self.n_max, self.d_max);
        for (m, s) in &self.terms {
            out.add_term(m.clone(), &(s * c));
        }
        out
    }

    /// `∂/∂t_k`; exact through `d_max − 1`.
    pub fn partial(&self, k: usize) -> TSeries {
        let mut out = TSeries::zero(self.n_max, self.d_max.saturating_sub(1));
        for (m, c) in &self.terms {
            let e = m.exponent(k);
            if e == 0 {
                continue;
            }
            let mut v = m.0.clone();
            v[k] -= 1;
            let mut dm = TMono(v);
            dm.trim();
            out.add_term(dm, &c.scale(&Rational::from_int(e as i64)));
        }
        out
    }

    pub fn pow(&self, e: u32) -> TSeries {
        let mut acc = TSeries::one(self.n_max, self.d_max);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    fn split_unit(&self) -> Result<TSeries, HodgeError> {
        if self.coeff(&TMono::one())? != SigmaPoly::one() {
            return Err(HodgeError::LogConstant);
        }
        Ok(self.sub(&TSeries::one(self.n_max, self.d_max)))
    }

    /// `1/self` for a series with constant term 1.
    pub fn inv_unit(&self) -> Result<TSeries, HodgeError> {
        let u = self.split_unit()?;
        let mut acc = TSeries::one(self.n_max, self.d_max);
        let mut term = acc.clone();
        let k_max = if u.valuation() == 0 { 0 } else { self.d_max / u.valuation() };
        for _ in 0..k_max {
            term = term.mul(&u).scale(&Rational::from_int(-1));
            acc = acc.add(&term);
        }
        Ok(acc)
    }

    /// `log(self)` for a series with constant term 1.
    pub fn log_unit(&self) -> Result<TSeries, HodgeError> {
        let u = self.split_unit()?;
        let mut acc = TSeries::zero(self.n_max, self.d_max);
        let mut term = TSeries::one(self.n_max, self.d_max);
        let k_max = if u.is_zero() { 0 } else { self.d_max / u.valuation() };
        for k in 1..=k_max {
            term = term.mul(&u);
            let sign = if k % 2 == 1 { 1 } else { -1 };
            acc = acc.add(&term.scale(&Rational::new(sign, k as i64)));
        }
        Ok(acc)
    }
}

/// `v(t)` by iterating `v ← Σ_i t_i v^i / i!` from `v = 0`.
pub fn v_series(n_max: usize, d_max: u32) -> TSeries {
    let t: Vec<TSeries> = (0..=n_max).map(|i| TSeries::var(i, n_max, d_max)).collect();
    let mut v = TSeries::zero(n_max, d_max);
    for _ in 0..d_max {
        let mut next = TSeries::zero(n_max, d_max);
        let mut vp = TSeries::one(n_max, d_max);
        for (i, ti) in t.iter().enumerate() {
            if i > 0 {
                vp = vp.mul_to(&v, d_max);
            }
            let c = factorial(i as u32).inv().expect("nonzero");
            next = next.add(&ti.mul_to(&vp, d_max).scale(&c));
        }
        v = next;
    }
    v
}

/// `v` from `Σ_n (1/n) Σ_{i₁+⋯+i_n=n−1} Π t_{i_k}/i_k!`, through degree `d_max`.
pub fn v_series_explicit(n_max: usize, d_max: u32) -> TSeries {
    fn tuples(n: usize, sum: usize, n_max: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            if sum == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for i in 0..=sum.min(n_max) {
            prefix.push(i);
            tuples(n, sum - i, n_max, prefix, out);
            prefix.pop();
        }
    }
    let mut v = TSeries::zero(n_max, d_max);
    for n in 1..=d_max as usize {
        let mut all = Vec::new();
        tuples(n, n - 1, n_max, &mut Vec::new(), &mut all);
        for tup in all {
            let mut e = vec![0u8; n_max + 1];
            let mut c = Rational::new(1, n as i64);
            for &i in &tup {
                e[i] += 1;
                c = c * factorial(i as u32).inv().expect("nonzero");
            }
            v.add_term(TMono::from_exponents(&e), &SigmaPoly::constant(c));
        }
    }
    v
}

/// `∂v/∂t_i = (v^i/i!) ∂v/∂t₀` through degree `order`.
pub fn riemann_check(i: usize, order: u32) -> bool {
    let n_max = i.max(1);
    let v = v_series(n_max, order + 1);
    let lhs = v.partial(i).truncate(order);
    let c = factorial(i as u32).inv().expect("nonzero");
    let rhs = v.pow(i as u32).mul(&v.partial(0)).scale(&c).truncate(order);
    lhs == rhs
}

/// Jets `z_j = ∂^j v/∂t₀^j`, `j ≤ top`, each exact through degree `d`.
fn jets_of_v(n_max: usize, d: u32, top: usize) -> Vec<TSeries> {
    let v = v_series(n_max, d + top as u32);
    let mut out = vec![v];
    for _ in 0..top {
        let next = out.last().expect("nonempty").partial(0);
        out.push(next);
    }
    out.into_iter().map(|s| s.truncate(d)).collect()
}

/// Evaluate a jet polynomial at `z_j ↦ jets[j]` through degree `d`.
fn eval_jet_poly(p: &JetPoly, jets: &[TSeries], d: u32) -> Result<TSeries, HodgeError> {
    let n_max = jets[0].n_max();
    let z1_inv = jets[1].inv_unit()?;
    let pieces: Vec<TSeries> = p
        .terms()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|(m, c)| {
            let mut acc = TSeries::constant((*c).clone(), n_max, d);
            for (k, &e) in m.exponents().iter().enumerate() {
                let base = if k == 1 && e < 0 { &z1_inv } else { &jets[k] };
                for _ in 0..e.unsigned_abs() {
                    acc = acc.mul_to(base, d);
                }
            }
            acc
        })
        .collect();
    let mut out = TSeries::zero(n_max, d);
    for s in &pieces {
        out = out.add(s);
    }
    if out.d_max() < d {
        return Err(HodgeError::Precision { have: out.d_max(), need: d });
    }
    Ok(out)
}

/// `H_g(v, ∂v, …)` as a series in `t₀..t_{n_max}` through degree `d_max`.
///
/// Coefficients are raw monomial coefficients.
pub fn hodge_expand(h: &FreeEnergy, n_max: usize, d_max: u32) -> Result<TSeries, HodgeError> {
    let top = 3 * h.genus as usize - 2;
    let jets = jets_of_v(n_max.max(1), d_max, top.max(1));
    match &h.body {
        FreeEnergyBody::GenusOne { log_z1, poly } => {
            let mut out = jets[1].log_unit()?.scale(log_z1);
            out = out.add(&eval_jet_poly(poly, &jets, d_max)?);
            Ok(out)
        }
        FreeEnergyBody::Higher(p) => eval_jet_poly(p, &jets, d_max),
    }
}

/// A monomial/`σ`-term violating `Σ i_k + deg_σ = 3g−3+n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DimensionViolation {
    pub monomial: Vec<usize>,
    pub sigma: (u16, u16),
    pub coefficient: Rational,
}

/// Nonzero coefficients only where `i₁+⋯+i_n + a + 3b = 3g−3+n`.
pub fn dimension_check(g: u32, series: &TSeries) -> Result<(), DimensionViolation> {
    for (m, c) in series.terms() {
        let target = 3 * g as i64 - 3 + m.degree() as i64;
        for (sm, r) in c.terms() {
            if m.index_sum() as i64 + sm.weight() as i64 != target {
                return Err(DimensionViolation { monomial: m.indices(), sigma: (sm.s1, sm.s3), coefficient: r.clone() });
            }
        }
    }
    Ok(())
}

/// `z_j = (−1)^{j−1}(j−1)!`: the jets of `log x` with the `x`-power removed.
pub fn log_x_jets(top: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero()];
    for j in 1..=top {
        let sign = if j % 2 == 1 { 1 } else { -1 };
        out.push(factorial(j as u32 - 1) * Rational::from_int(sign));
    }
    out
}

/// `R_g = H_g|_{z_j = (−1)^{j−1}(j−1)!}`.
pub fn r_poly(h: &FreeEnergy) -> Result<SigmaPoly, HodgeError> {
    if h.genus < 2 {
        return Err(HodgeError::GenusTooSmall(h.genus));
    }
    let p = h.polynomial();
    let top = p.max_index().unwrap_or(1).max(1);
    Ok(p.eval_jets(&log_x_jets(top)))
}

/// `(−1)^g/(2(2g−2)!) · |B_{2g}||B_{2g−2}|/(2g(2g−2)) · (σ₁³/3 − σ₃/6)^{g−1}`.
pub fn faber_leading(g: u32) -> Result<SigmaPoly, HodgeError> {
    if g < 2 {
        return Err(HodgeError::GenusTooSmall(g));
    }
    let g2 = 2 * g as usize;
    let sign = if g % 2 == 0 { 1 } else { -1 };
    let c = Rational::from_int(sign) * bernoulli(g2).abs() * bernoulli(g2 - 2).abs()
        / (Rational::from_int(2) * factorial(g2 as u32 - 2) * Rational::from_int((g2 * (g2 - 2)) as i64));
    let base = &SigmaPoly::s1().pow(3).scale(&Rational::new(1, 3)) - &SigmaPoly::s3().scale(&Rational::new(1, 6));
    Ok(base.pow(g - 1).scale(&c))
}

/// Coefficient of `log x` in `H₁` at `z₀ = log x`, `z₁ = 1/x`.
pub fn h1_log_x_coefficient(h: &FreeEnergy) -> Result<SigmaPoly, HodgeError> {
    let (log_z1, poly) = match &h.body {
        FreeEnergyBody::GenusOne { log_z1, poly } => (log_z1, poly),
        FreeEnergyBody::Higher(_) => return Err(HodgeError::NotGenusOne),
    };
    // log z₁ = −log x; the polynomial part must be linear in z₀ alone.
    let z0_coeff = poly.partial(0).as_sigma().ok_or(HodgeError::NotGenusOne)?;
    Ok(&z0_coeff - &SigmaPoly::constant(log_z1.clone()))
}

/// `F₁ − ((σ₁−1)/24) log x` is regular at `x = 0`.
pub fn h1_gap_check(h: &FreeEnergy) -> Result<bool, HodgeError> {
    let expect = &SigmaPoly::s1().scale(&Rational::new(1, 24)) - &SigmaPoly::constant(Rational::new(1, 24));
    Ok(h1_log_x_coefficient(h)? == expect)
}

/// `ε²` part of `w_{t₁} = w w_{t₀} + (ε²/12)(w_{t₀t₀t₀} + σ₁ w_{t₀} w_{t₀t₀})` with
/// `w = v + ε² ∂²_{t₀} H₁(v, v_{t₀})`, through `t`-degree `order`.
pub fn first_flow_check(h1: &FreeEnergy, order: u32) -> Result<bool, HodgeError> {
    if h1.genus != 1 {
        return Err(HodgeError::WrongGenus { expected: 1, got: h1.genus });
    }
    let n_max = 2;
    let inner = order + 5;
    let h = hodge_expand(h1, n_max, inner)?;
    let v = v_series(n_max, inner);
    let w1 = h.partial(0).partial(0);
    let v0 = v.partial(0);
    let v00 = v0.partial(0);
    let v000 = v00.partial(0);
    let lhs = w1.partial(1).truncate(order);
    let tail = v000.add(&v0.mul(&v00).scale_sigma(&SigmaPoly::s1())).scale(&Rational::new(1, 12));
    let rhs = v.mul(&w1.partial(0)).add(&w1.mul(&v0)).add(&tail).truncate(order);
    if lhs.d_max() < order || rhs.d_max() < order {
        return Err(HodgeError::Precision { have: lhs.d_max().min(rhs.d_max()), need: order });
    }
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loop_solver::LoopSolver;

    fn mono(e: &[u8]) -> TMono {
        TMono::from_exponents(e)
    }

    #[test]
    fn v_series_small_coefficients() {
        let v = v_series(3, 5);
        assert_eq!(v.coeff(&mono(&[1])).unwrap(), SigmaPoly::one());
        assert_eq!(v.coeff(&mono(&[1, 1])).unwrap(), SigmaPoly::one());
        assert_eq!(v.coeff(&mono(&[2, 0, 1])).unwrap(), SigmaPoly::constant(Rational::new(1, 2)));
        assert!(v.coeff(&mono(&[2])).unwrap().is_zero());
        let only_t0 = v_series(0, 6);
        assert_eq!(only_t0, TSeries::var(0, 0, 6));
        assert_eq!(v_series(3, 4), v_series_explicit(3, 4));
        assert_eq!(v_series(2, 6), v_series_explicit(2, 6));
    }

    #[test]
    fn riemann_flows() {
        for i in 0..=3 {
            assert!(riemann_check(i, 4), "flow {i}");
        }
    }

    #[test]
    fn log_and_inverse_are_consistent() {
        let v = v_series(2, 6);
        let v0 = v.partial(0).truncate(5);
        let inv = v0.inv_unit().unwrap();
        assert_eq!(inv.mul(&v0).truncate(5), TSeries::one(2, 5));
        // d/dt₀ log v₀ = v₀₀ / v₀
        let lhs = v0.log_unit().unwrap().partial(0).truncate(4);
        let rhs = v0.partial(0).mul(&inv).truncate(4);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn genus_one_and_two_tables() {
        let s = LoopSolver::new(2);
        let all = s.solve_all().unwrap();
        let t1 = hodge_expand(&all[0], 3, 4).unwrap();
        assert_eq!(t1.coeff(&mono(&[1])).unwrap(), SigmaPoly::s1().scale(&Rational::new(1, 24)));
        assert_eq!(t1.coeff(&mono(&[0, 1])).unwrap(), SigmaPoly::constant(Rational::new(1, 24)));
        assert!(dimension_check(1, &t1).is_ok());
        let t2 = hodge_expand(&all[1], 3, 3).unwrap();
        assert_eq!(t2.coeff(&TMono::one()).unwrap(), faber_leading(2).unwrap());
        assert!(dimension_check(2, &t2).is_ok());
    }

    #[test]
    fn gap_polynomial_genus_two() {
        let s = LoopSolver::new(2);
        let all = s.solve_all().unwrap();
        let r2 = r_poly(&all[1]).unwrap();
        assert_eq!(r2.weighted_part(3), faber_leading(2).unwrap());
        assert!(r_poly(&all[0]).is_err());
        assert!(h1_gap_check(&all[0]).unwrap());
    }

    #[test]
    fn first_flow() {
        let s = LoopSolver::new(1);
        let h1 = s.solve_genus(1, &[]).unwrap();
        assert!(first_flow_check(&h1, 3).unwrap());
    }
}
