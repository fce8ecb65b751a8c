//! Index data of the rational case `(p, q, r) = (1/K₁, 1/K₂, −1/h)`.

use std::ops::RangeInclusive;

use num_integer::Integer;
use statrs::function::gamma::ln_gamma;

use super::ratfunc::RationalFunction;
use super::VirasoroError;
use crate::algebra::Rational;

/// Coprime positive `K₁, K₂` and the derived `h`, `K`, `I`, `b_k`, `G^{αβ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalParams {
    k1: i64,
    k2: i64,
    h: i64,
    big_k: Rational,
}

impl RationalParams {
    pub fn new(k1: i64, k2: i64) -> Result<Self, VirasoroError> {
        if k1 < 1 || k2 < 1 {
            return Err(VirasoroError::NonPositive { k1, k2 });
        }
        if k1.gcd(&k2) != 1 {
            return Err(VirasoroError::NotCoprime { k1, k2 });
        }
        let h = k1 + k2;
        let pw = |b: i64, e: i64| Rational::from_int(b).pow(e as i32);
        let big_k = pw(h, h) / pw(k1, k1) / pw(k2, k2);
        Ok(RationalParams { k1, k2, h, big_k })
    }

    pub fn k1(&self) -> i64 {
        self.k1
    }

    pub fn k2(&self) -> i64 {
        self.k2
    }

    pub fn h(&self) -> i64 {
        self.h
    }

    /// `K = h^h K₁^{−K₁} K₂^{−K₂}`.
    pub fn big_k(&self) -> &Rational {
        &self.big_k
    }

    /// `I = {−(K₂−1), …, K₁−1}`.
    pub fn index_set(&self) -> RangeInclusive<i64> {
        -(self.k2 - 1)..=self.k1 - 1
    }

    /// `I_* = I ∖ {0}`.
    pub fn index_set_star(&self) -> impl Iterator<Item = i64> {
        self.index_set().filter(|&a| a != 0)
    }

    /// `k = α + hℓ` with `α ∈ I`, `ℓ ≥ 0`; `None` when no such pair exists.
    pub fn decompose(&self, k: i64) -> Option<(i64, i64)> {
        let alpha = (k + self.k2 - 1).rem_euclid(self.h) - (self.k2 - 1);
        if alpha > self.k1 - 1 {
            return None;
        }
        let ell = (k - alpha) / self.h;
        (ell >= 0).then_some((alpha, ell))
    }

    /// Membership in `ℕ_* = (ℕ−K₂) ∖ ({0} ∪ (hℕ−K₂))`, `ℕ = {1, 2, …}`.
    pub fn in_nstar(&self, k: i64) -> bool {
        k != 0 && self.decompose(k).is_some()
    }

    /// Elements of `ℕ_*` not exceeding `k_max`, ascending.
    pub fn nstar_up_to(&self, k_max: i64) -> Vec<i64> {
        (1 - self.k2..=k_max).filter(|&k| self.in_nstar(k)).collect()
    }

    /// `b_{α+hℓ}`: `α/K₁ + ℓ` for `α ≥ 0`, `−α/K₂ + ℓ` for `α < 0`.
    pub fn b(&self, k: i64) -> Result<Rational, VirasoroError> {
        let (alpha, ell) = self.decompose(k).ok_or(VirasoroError::NotInNStar(k))?;
        let frac = if alpha >= 0 { Rational::new(alpha, self.k1) } else { Rational::new(-alpha, self.k2) };
        Ok(frac + Rational::from_int(ell))
    }

    /// `G^{αβ}` for `α, β ∈ I`.
    pub fn g(&self, alpha: i64, beta: i64) -> Rational {
        if alpha < 0 && beta < 0 && alpha + beta == -self.k2 {
            Rational::new(self.k1, self.h)
        } else if alpha == 0 && beta == 0 {
            Rational::one()
        } else if alpha > 0 && beta > 0 && alpha + beta == self.k1 {
            Rational::new(self.k2, self.h)
        } else {
            Rational::zero()
        }
    }

    /// `(σ₁, σ₃)` at `(1/K₁, 1/K₂, −1/h)`.
    pub fn sigma(&self) -> (Rational, Rational) {
        let (p, q, r) = (Rational::new(1, self.k1), Rational::new(1, self.k2), Rational::new(-1, self.h));
        let s1 = -(&p + &q + &r);
        let s3 = Rational::from_int(-2) * (p.pow(3) + q.pow(3) + r.pow(3));
        (s1, s3)
    }

    /// `V₁(z) = Π_{i=1}^{h}(z − i/h) / (Π_{i=1}^{K₁}(z − i/K₁) Π_{i=1}^{K₂}(z − i/K₂))`.
    pub fn v1(&self) -> RationalFunction {
        let num: Vec<Rational> = (1..=self.h).map(|i| Rational::new(i, self.h)).collect();
        let den: Vec<Rational> = (1..=self.k1)
            .map(|i| Rational::new(i, self.k1))
            .chain((1..=self.k2).map(|i| Rational::new(i, self.k2)))
            .collect();
        RationalFunction::from_roots(&num, &den)
    }

    /// `c_k = binom(b_k h, b_k K₁)` in floating point via log-Γ.
    pub fn c_float(&self, k: i64) -> Result<f64, VirasoroError> {
        if k == 0 {
            return Ok(1.0);
        }
        let b = self.b(k)?.to_f64();
        let (h, k1, k2) = (self.h as f64, self.k1 as f64, self.k2 as f64);
        Ok((ln_gamma(b * h + 1.0) - ln_gamma(b * k1 + 1.0) - ln_gamma(b * k2 + 1.0)).exp())
    }
}
