//! Rational case `(p, q, r) = (1/K₁, 1/K₂, −1/h)`: index data, the functions
//! `V_m(z)`, the `c_k` product identities, Virasoro operators on a truncated
//! Fock space, and the direct `B̃_{i,j}` sums.

mod btilde;
mod fock;
mod params;
mod ratfunc;

use thiserror::Error;

use crate::algebra::Rational;

pub use btilde::{
    a_coefficient, btilde_direct, btilde_table, bridge_check, btilde11_closed_form_check, integral_identity_check,
    v_asymptotics_check, BridgeMismatch,
};
pub use fock::{
    commutator_check, commutator_grid, monomial_basis, virasoro_apply, CommutatorCell, CommutatorOutcome, FockMono,
    FockPoly, Truncation,
};
pub use params::RationalParams;
pub use ratfunc::{RationalFunction, UPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VirasoroError {
    #[error("K1 = {k1}, K2 = {k2} must be positive")]
    NonPositive { k1: i64, k2: i64 },
    #[error("K1 = {k1}, K2 = {k2} are not coprime")]
    NotCoprime { k1: i64, k2: i64 },
    #[error("index {0} is not in N_*")]
    NotInNStar(i64),
    #[error("V_m needs m >= 1, got {0}")]
    ZeroOrder(i64),
    #[error("indices ({alpha}, {m}), ({beta}, {n}) are outside the pairing identities")]
    OutOfPairingRange { alpha: i64, m: i64, beta: i64, n: i64 },
    #[error("truncation violated: {0}")]
    Truncation(String),
}

/// `V_m(z) = Π_{j=0}^{m−1} V₁(z − j)`, with common linear factors cancelled.
pub fn v_rational(params: &RationalParams, m: i64) -> Result<RationalFunction, VirasoroError> {
    if m < 1 {
        return Err(VirasoroError::ZeroOrder(m));
    }
    let (h, k1, k2) = (params.h(), params.k1(), params.k2());
    let mut num = Vec::new();
    let mut den = Vec::new();
    for j in 0..m {
        let jr = Rational::from_int(j);
        num.extend((1..=h).map(|i| Rational::new(i, h) + &jr));
        den.extend((1..=k1).map(|i| Rational::new(i, k1) + &jr));
        den.extend((1..=k2).map(|i| Rational::new(i, k2) + &jr));
    }
    Ok(RationalFunction::from_roots(&num, &den))
}

/// Cache of `V_1, …, V_{m_max}`.
#[derive(Debug, Clone)]
pub struct VTable {
    params: RationalParams,
    v: Vec<RationalFunction>,
}

impl VTable {
    pub fn new(params: &RationalParams, m_max: i64) -> Self {
        let v = (1..=m_max.max(1)).map(|m| v_rational(params, m).expect("m >= 1")).collect();
        VTable { params: params.clone(), v }
    }

    pub fn params(&self) -> &RationalParams {
        &self.params
    }

    pub fn m_max(&self) -> i64 {
        self.v.len() as i64
    }

    /// `V_m`; computed on the fly past the cached range.
    pub fn get(&self, m: i64) -> Result<std::borrow::Cow<'_, RationalFunction>, VirasoroError> {
        if (1..=self.m_max()).contains(&m) {
            Ok(std::borrow::Cow::Borrowed(&self.v[(m - 1) as usize]))
        } else {
            v_rational(&self.params, m).map(std::borrow::Cow::Owned)
        }
    }

    /// `c_{k+hℓ}/c_k = K^ℓ V_ℓ(−b_k)`, for `k ∈ ℕ_* ∪ {0}` (`c₀ = 1`).
    pub fn c_ratio(&self, k: i64, ell: i64) -> Result<Rational, VirasoroError> {
        if k != 0 && !self.params.in_nstar(k) {
            return Err(VirasoroError::NotInNStar(k));
        }
        if ell < 0 {
            return Err(VirasoroError::ZeroOrder(ell));
        }
        if ell == 0 {
            return Ok(Rational::one());
        }
        let b = self.params.b(k)?;
        let v = self.get(ell)?.eval(&-b).expect("V_ℓ is regular on the negative axis");
        Ok(self.params.big_k().pow(ell as i32) * v)
    }

    /// `c_{α+hm} c_{β+hn}` through the residue identities:
    /// `β = K₁−α` for `α ∈ {1..K₁−1}`, `β = −α−K₂` for `α ∈ {−(K₂−1)..−1}`,
    /// and `α = β = 0` with `m, n ≥ 1`.
    pub fn c_pair(&self, alpha: i64, m: i64, beta: i64, n: i64) -> Result<Rational, VirasoroError> {
        let p = &self.params;
        let out_of_range = VirasoroError::OutOfPairingRange { alpha, m, beta, n };
        if m < 0 || n < 0 {
            return Err(out_of_range);
        }
        let k = p.big_k();
        if alpha == 0 && beta == 0 {
            if m < 1 || n < 1 {
                return Err(out_of_range);
            }
            let b = Rational::from_int(m);
            let res = self.get(m + n)?.residue(&b);
            return Ok(k.pow((m + n) as i32) / b * res);
        }
        let prefactor = if (1..p.k1()).contains(&alpha) && beta == p.k1() - alpha {
            Rational::new(p.h(), p.k2())
        } else if (1 - p.k2()..0).contains(&alpha) && beta == -alpha - p.k2() {
            Rational::new(p.h(), p.k1())
        } else {
            return Err(out_of_range);
        };
        let b = p.b(alpha + p.h() * m)?;
        let res = self.get(m + n + 1)?.residue(&b);
        Ok(prefactor * k.pow((m + n + 1) as i32) / b * res)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_one_products() {
        let p = RationalParams::new(2, 1).unwrap();
        let t = VTable::new(&p, 4);
        assert_eq!(t.c_ratio(0, 1).unwrap(), Rational::from_int(3));
        assert_eq!(t.c_ratio(4, 0).unwrap(), Rational::one());
        assert_eq!(t.c_pair(1, 0, 1, 0).unwrap(), Rational::new(9, 4));
        assert!(t.c_pair(1, 0, 0, 0).is_err());
        assert!(t.c_pair(0, 0, 0, 1).is_err());
    }

    #[test]
    fn v_product_matches_shifted_v1() {
        let p = RationalParams::new(2, 3).unwrap();
        let v1 = p.v1();
        assert_eq!(v_rational(&p, 1).unwrap(), v1);
        let v3 = v1.mul(&v1.shift(&Rational::one())).mul(&v1.shift(&Rational::from_int(2)));
        assert_eq!(v_rational(&p, 3).unwrap(), v3);
    }

    #[test]
    fn aligned_pairs_agree_with_ratios() {
        for (k1, k2) in [(1, 2), (2, 3), (3, 4)] {
            let p = RationalParams::new(k1, k2).unwrap();
            let t = VTable::new(&p, 8);
            for m in 1..=3 {
                for n in 1..=3 {
                    let direct = t.c_ratio(0, m).unwrap() * t.c_ratio(0, n).unwrap();
                    assert_eq!(t.c_pair(0, m, 0, n).unwrap(), direct, "({k1},{k2}) m={m} n={n}");
                }
            }
        }
    }

    #[test]
    fn pairs_match_gamma_quotients() {
        for (k1, k2) in [(1, 2), (2, 3), (3, 4), (2, 1)] {
            let p = RationalParams::new(k1, k2).unwrap();
            let t = VTable::new(&p, 8);
            let h = p.h();
            for s in 0..=3 {
                for m in 0..=s {
                    let n = s - m;
                    for a in p.index_set() {
                        let (b, mm, nn) = match a {
                            0 => (0, m + 1, n + 1),
                            a if a > 0 => (k1 - a, m, n),
                            a => (-a - k2, m, n),
                        };
                        let exact = t.c_pair(a, mm, b, nn).unwrap().to_f64();
                        let float = p.c_float(a + h * mm).unwrap() * p.c_float(b + h * nn).unwrap();
                        assert!((exact - float).abs() <= 1e-10 * float.abs(), "({k1},{k2}) a={a} m={mm} n={nn}");
                    }
                }
            }
            for k in p.nstar_up_to(3 * h) {
                for ell in 0..=3 {
                    let exact = t.c_ratio(k, ell).unwrap().to_f64();
                    let float = p.c_float(k + h * ell).unwrap() / p.c_float(k).unwrap();
                    assert!((exact - float).abs() <= 1e-10 * float.abs());
                }
            }
        }
    }
}
