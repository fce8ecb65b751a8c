//! Polynomials in the formal variable `Θ` with jet-polynomial coefficients.
//!
//! `Θ` stands for `1/(1 − e^{z₀}/μ)` (equivalently `1/(1 − ξ)`), so both the
//! total derivation and the Euler operator `ξ∂_ξ` act on it through
//! `Θ(Θ − 1)`.

use std::ops::{Add, Mul, Neg, Sub};

use super::{binomial, AlgebraError, JetPoly, Rational, SigmaPoly};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ThetaPoly {
    coeffs: Vec<JetPoly>,
}

impl ThetaPoly {
    pub fn zero() -> Self {
        ThetaPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: JetPoly) -> Self {
        ThetaPoly::from_coeffs(vec![c])
    }

    pub fn one() -> Self {
        ThetaPoly::constant(JetPoly::one())
    }

    /// `Θ`.
    pub fn theta() -> Self {
        ThetaPoly::theta_pow(1)
    }

    pub fn theta_pow(k: usize) -> Self {
        let mut coeffs = vec![JetPoly::zero(); k];
        coeffs.push(JetPoly::one());
        ThetaPoly { coeffs }
    }

    pub fn from_coeffs(coeffs: Vec<JetPoly>) -> Self {
        let mut p = ThetaPoly { coeffs };
        p.trim();
        p
    }

    /// Build from `σ`-coefficients (a jet-free polynomial).
    pub fn from_sigma(coeffs: Vec<SigmaPoly>) -> Self {
        ThetaPoly::from_coeffs(coeffs.into_iter().map(JetPoly::constant).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(JetPoly::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> JetPoly {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn coeff_ref(&self, k: usize) -> Option<&JetPoly> {
        self.coeffs.get(k)
    }

    pub fn coeffs(&self) -> &[JetPoly] {
        &self.coeffs
    }

    /// `σ`-coefficients of a jet-free polynomial.
    pub fn sigma_coeffs(&self) -> Option<Vec<SigmaPoly>> {
        self.coeffs.iter().map(JetPoly::as_sigma).collect()
    }

    pub fn is_jet_free(&self) -> bool {
        self.coeffs.iter().all(|c| c.as_sigma().is_some())
    }

    fn ensure_len(&mut self, n: usize) {
        if self.coeffs.len() < n {
            self.coeffs.resize(n, JetPoly::zero());
        }
    }

    pub fn add_assign(&mut self, other: &ThetaPoly) {
        self.ensure_len(other.coeffs.len());
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_assign(b);
        }
        self.trim();
    }

    pub fn sub_assign(&mut self, other: &ThetaPoly) {
        self.ensure_len(other.coeffs.len());
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.sub_assign(b);
        }
        self.trim();
    }

    /// `self += p · j` for a jet coefficient `j`.
    pub fn add_scaled_jet(&mut self, p: &ThetaPoly, j: &JetPoly) {
        self.ensure_len(p.coeffs.len());
        for (a, b) in self.coeffs.iter_mut().zip(&p.coeffs) {
            if let Some(s) = b.as_sigma() {
                a.add_scaled(j, &s);
            } else {
                a.add_product(b, j);
            }
        }
        self.trim();
    }

    pub fn scale_jet(&self, j: &JetPoly) -> ThetaPoly {
        let mut out = ThetaPoly::zero();
        out.add_scaled_jet(self, j);
        out
    }

    pub fn scale(&self, c: &Rational) -> ThetaPoly {
        ThetaPoly::from_coeffs(self.coeffs.iter().map(|j| j.scale(c)).collect())
    }

    pub fn scale_sigma(&self, c: &SigmaPoly) -> ThetaPoly {
        ThetaPoly::from_coeffs(self.coeffs.iter().map(|j| j.scale_sigma(c)).collect())
    }

    /// The total derivation, with `∂Θ = z₁Θ(Θ − 1)`.
    pub fn derive(&self, cutoff: usize) -> Result<ThetaPoly, AlgebraError> {
        let mut out = vec![JetPoly::zero(); self.coeffs.len() + 1];
        let z1 = JetPoly::var(1);
        if cutoff < 1 && self.coeffs.len() > 1 {
            return Err(AlgebraError::CutoffOverflow { index: 1, cutoff });
        }
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            out[k].add_assign(&c.derive(cutoff)?);
            if k > 0 {
                let t = (&z1 * c).scale(&Rational::from_int(k as i64));
                out[k + 1].add_assign(&t);
                out[k].sub_assign(&t);
            }
        }
        Ok(ThetaPoly::from_coeffs(out))
    }

    /// `derive` applied `n` times.
    pub fn derive_n(&self, n: usize, cutoff: usize) -> Result<ThetaPoly, AlgebraError> {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.derive(cutoff)?;
        }
        Ok(p)
    }

    /// The Euler operator `ξ∂_ξ`, acting as `Θ(Θ − 1) d/dΘ`.
    pub fn xi_euler(&self) -> ThetaPoly {
        let mut out = vec![JetPoly::zero(); self.coeffs.len() + 1];
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let t = c.scale(&Rational::from_int(k as i64));
            out[k + 1].add_assign(&t);
            out[k].sub_assign(&t);
        }
        ThetaPoly::from_coeffs(out)
    }

    /// Apply a map to every jet coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&JetPoly) -> JetPoly) -> ThetaPoly {
        ThetaPoly::from_coeffs(self.coeffs.iter().map(f).collect())
    }

    /// Expand a jet-free polynomial as a power series in `ξ`, using
    /// `Θ^k = Σ_m C(k+m−1, m) ξ^m`. Returns coefficients of `ξ^0..=ξ^order`.
    pub fn to_xi_series(&self, order: usize) -> Option<Vec<SigmaPoly>> {
        let sig = self.sigma_coeffs()?;
        let mut out = vec![SigmaPoly::zero(); order + 1];
        for (k, c) in sig.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k == 0 {
                out[0].add_assign(c);
                continue;
            }
            for (m, slot) in out.iter_mut().enumerate() {
                let b = binomial((k + m - 1) as u32, m as u32);
                slot.add_assign(&c.scale(&b));
            }
        }
        Some(out)
    }
}

impl Add for &ThetaPoly {
    type Output = ThetaPoly;
    fn add(self, rhs: &ThetaPoly) -> ThetaPoly {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Sub for &ThetaPoly {
    type Output = ThetaPoly;
    fn sub(self, rhs: &ThetaPoly) -> ThetaPoly {
        let mut out = self.clone();
        out.sub_assign(rhs);
        out
    }
}

impl Mul for &ThetaPoly {
    type Output = ThetaPoly;
    fn mul(self, rhs: &ThetaPoly) -> ThetaPoly {
        if self.is_zero() || rhs.is_zero() {
            return ThetaPoly::zero();
        }
        let mut out = vec![JetPoly::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j].add_product(a, b);
            }
        }
        ThetaPoly::from_coeffs(out)
    }
}

impl Neg for &ThetaPoly {
    type Output = ThetaPoly;
    fn neg(self) -> ThetaPoly {
        ThetaPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl std::fmt::Debug for ThetaPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "[{c:?}]*T^{k}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn theta_squared() {
        let t2 = &ThetaPoly::theta() * &ThetaPoly::theta();
        assert_eq!(t2.coeffs(), &[JetPoly::zero(), JetPoly::zero(), JetPoly::one()]);
    }

    #[test]
    fn derive_theta() {
        let d = ThetaPoly::theta().derive(3).unwrap();
        let z1 = JetPoly::var(1);
        assert_eq!(d, ThetaPoly::from_coeffs(vec![JetPoly::zero(), -&z1, z1]));
    }

    #[test]
    fn euler_operator() {
        assert!(ThetaPoly::one().xi_euler().is_zero());
        let e = ThetaPoly::theta().xi_euler();
        assert_eq!(e, &ThetaPoly::theta_pow(2) - &ThetaPoly::theta());
        let e2 = ThetaPoly::theta_pow(2).xi_euler();
        assert_eq!(e2, (&ThetaPoly::theta_pow(3) - &ThetaPoly::theta_pow(2)).scale(&r(2, 1)));
    }

    #[test]
    fn xi_expansion_of_theta() {
        let s = ThetaPoly::theta().to_xi_series(4).unwrap();
        assert!(s.iter().all(|c| *c == SigmaPoly::one()));
        // Θ² = Σ (m+1) ξ^m
        let s2 = ThetaPoly::theta_pow(2).to_xi_series(3).unwrap();
        assert_eq!(s2[3], SigmaPoly::constant(r(4, 1)));
    }
}
