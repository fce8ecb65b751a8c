//! Polynomials in the two Calabi-Yau invariants `σ₁`, `σ₃`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::Rational;

/// Exponent pair `σ₁^s1 σ₃^s3`.
///
/// Ordered graded-lexicographically with `σ₁ < σ₃`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct SigmaMono {
    pub s1: u16,
    pub s3: u16,
}

impl SigmaMono {
    pub const ONE: SigmaMono = SigmaMono { s1: 0, s3: 0 };

    pub fn new(s1: u16, s3: u16) -> Self {
        SigmaMono { s1, s3 }
    }

    pub fn degree(&self) -> u32 {
        self.s1 as u32 + self.s3 as u32
    }

    /// Degree with `deg σ₁ = 1`, `deg σ₃ = 3`.
    pub fn weight(&self) -> u32 {
        self.s1 as u32 + 3 * self.s3 as u32
    }

    pub fn mul(&self, other: &SigmaMono) -> SigmaMono {
        SigmaMono { s1: self.s1 + other.s1, s3: self.s3 + other.s3 }
    }
}

impl Ord for SigmaMono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then(self.s3.cmp(&other.s3))
            .then(self.s1.cmp(&other.s1))
    }
}

impl PartialOrd for SigmaMono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse element of `ℚ[σ₁, σ₃]` with no stored zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SigmaPoly {
    terms: BTreeMap<SigmaMono, Rational>,
}

impl SigmaPoly {
    pub fn zero() -> Self {
        SigmaPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        SigmaPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        SigmaPoly::monomial(SigmaMono::ONE, c)
    }

    pub fn monomial(m: SigmaMono, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        SigmaPoly { terms }
    }

    pub fn s1() -> Self {
        SigmaPoly::monomial(SigmaMono::new(1, 0), Rational::one())
    }

    pub fn s3() -> Self {
        SigmaPoly::monomial(SigmaMono::new(0, 1), Rational::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (SigmaMono, Rational)>>(iter: I) -> Self {
        let mut p = SigmaPoly::zero();
        for (m, c) in iter {
            p.add_term(m, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| *m == SigmaMono::ONE)
    }

    /// The constant coefficient.
    pub fn constant_term(&self) -> Rational {
        self.terms.get(&SigmaMono::ONE).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&SigmaMono, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &SigmaMono) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: SigmaMono, c: &Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add_assign(&mut self, other: &SigmaPoly) {
        for (m, c) in &other.terms {
            self.add_term(*m, c);
        }
    }

    pub fn sub_assign(&mut self, other: &SigmaPoly) {
        for (m, c) in &other.terms {
            self.add_term(*m, &-c);
        }
    }

    /// `self += a * b` without materializing the product.
    pub fn add_product(&mut self, a: &SigmaPoly, b: &SigmaPoly) {
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                self.add_term(ma.mul(mb), &(ca * cb));
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> SigmaPoly {
        if c.is_zero() {
            return SigmaPoly::zero();
        }
        SigmaPoly { terms: self.terms.iter().map(|(m, v)| (*m, v * c)).collect() }
    }

    pub fn pow(&self, e: u32) -> SigmaPoly {
        let mut acc = SigmaPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Largest `deg σ₁ + 3 deg σ₃` among the terms; `None` for zero.
    pub fn weighted_degree(&self) -> Option<u32> {
        self.terms.keys().map(SigmaMono::weight).max()
    }

    /// Terms of weighted degree exactly `w`.
    pub fn weighted_part(&self, w: u32) -> SigmaPoly {
        SigmaPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.weight() == w)
                .map(|(m, c)| (*m, c.clone()))
                .collect(),
        }
    }

    pub fn eval(&self, s1: &Rational, s3: &Rational) -> Rational {
        self.terms
            .iter()
            .map(|(m, c)| c * s1.pow(m.s1 as i32) * s3.pow(m.s3 as i32))
            .sum()
    }

    pub fn eval_f64(&self, s1: f64, s3: f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| c.to_f64() * s1.powi(m.s1 as i32) * s3.powi(m.s3 as i32))
            .sum()
    }

    /// Evaluate at numeric `(σ₁, σ₃)` and return the result as a constant polynomial.
    pub fn specialize(&self, s1: &Rational, s3: &Rational) -> SigmaPoly {
        SigmaPoly::constant(self.eval(s1, s3))
    }

    /// Exact division in `ℚ[σ₁, σ₃]`; `None` if `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &SigmaPoly) -> Option<SigmaPoly> {
        let (lead_m, lead_c) = divisor.leading_lex()?;
        let mut rem = self.clone();
        let mut quot = SigmaPoly::zero();
        while let Some((m, c)) = rem.leading_lex() {
            if m.s1 < lead_m.s1 || m.s3 < lead_m.s3 {
                return None;
            }
            let qm = SigmaMono::new(m.s1 - lead_m.s1, m.s3 - lead_m.s3);
            let qc = &c / &lead_c;
            let step = SigmaPoly::monomial(qm, qc);
            rem = &rem - &(&step * divisor);
            quot.add_assign(&step);
        }
        Some(quot)
    }

    /// Leading term in pure lex order (`σ₃` before `σ₁`), used by division.
    fn leading_lex(&self) -> Option<(SigmaMono, Rational)> {
        self.terms
            .iter()
            .max_by(|a, b| a.0.s3.cmp(&b.0.s3).then(a.0.s1.cmp(&b.0.s1)))
            .map(|(m, c)| (*m, c.clone()))
    }
}

impl Add for &SigmaPoly {
    type Output = SigmaPoly;
    fn add(self, rhs: &SigmaPoly) -> SigmaPoly {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Sub for &SigmaPoly {
    type Output = SigmaPoly;
    fn sub(self, rhs: &SigmaPoly) -> SigmaPoly {
        let mut out = self.clone();
        out.sub_assign(rhs);
        out
    }
}

impl Mul for &SigmaPoly {
    type Output = SigmaPoly;
    fn mul(self, rhs: &SigmaPoly) -> SigmaPoly {
        let mut out = SigmaPoly::zero();
        out.add_product(self, rhs);
        out
    }
}

impl Neg for &SigmaPoly {
    type Output = SigmaPoly;
    fn neg(self) -> SigmaPoly {
        SigmaPoly { terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect() }
    }
}

impl std::fmt::Debug for SigmaPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", super::format::sigma_to_text(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn arithmetic_cancels() {
        let a = &SigmaPoly::s1() + &SigmaPoly::constant(r(1, 2));
        let b = &SigmaPoly::s1() - &SigmaPoly::constant(r(1, 2));
        let p = &a * &b;
        let expect = &SigmaPoly::s1().pow(2) - &SigmaPoly::constant(r(1, 4));
        assert_eq!(p, expect);
        assert!((&p - &expect).is_zero());
    }

    #[test]
    fn exact_division() {
        let a = &SigmaPoly::s1() + &SigmaPoly::s3();
        let b = &SigmaPoly::s1().pow(2) - &SigmaPoly::constant(r(3, 1));
        let prod = &a * &b;
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&b), Some(a));
        assert_eq!(SigmaPoly::s1().div_exact(&SigmaPoly::s3()), None);
    }

    #[test]
    fn weights() {
        let p = &SigmaPoly::s1().pow(3) + &SigmaPoly::s3();
        assert_eq!(p.weighted_degree(), Some(3));
        assert_eq!(p.eval(&r(2, 1), &r(1, 1)), 9);
    }
}
