//! Bell polynomials and the jet polynomials `f_{i,j}`.
//!
//! Abstract Bell slots `X_m` are stored as jet variables `z_m`, so
//! `B_{n,k}(X₁, …)` and `f_{n,k}(z₁, …)` live in the same ring and compare
//! directly.

use crate::algebra::{binomial, AlgebraError, JetPoly, Rational, SigmaPoly, ThetaPoly};

/// The operations needed to evaluate Bell polynomials over different carriers.
pub trait BellRing: Clone {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
}

impl BellRing for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &Rational) -> Self {
        self * c
    }
}

impl BellRing for SigmaPoly {
    fn zero_like(&self) -> Self {
        SigmaPoly::zero()
    }
    fn one_like(&self) -> Self {
        SigmaPoly::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &Rational) -> Self {
        SigmaPoly::scale(self, c)
    }
}

impl BellRing for JetPoly {
    fn zero_like(&self) -> Self {
        JetPoly::zero()
    }
    fn one_like(&self) -> Self {
        JetPoly::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &Rational) -> Self {
        JetPoly::scale(self, c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BellError {
    #[error("Bell index ({n}, {k}) outside 0 <= k <= n <= {n_max}")]
    OutOfRange { n: usize, k: usize, n_max: usize },
    #[error("{needed} slot values required, {given} given")]
    MissingSlots { needed: usize, given: usize },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Partial Bell polynomials `B_{n,k}` for `n ≤ n_max`.
#[derive(Clone, Debug)]
pub struct BellTable {
    n_max: usize,
    /// `table[n][k]`, `k ≤ n`.
    table: Vec<Vec<JetPoly>>,
}

impl BellTable {
    /// Builds the table from `B_{n,k} = Σ_i C(n−1, i−1) X_i B_{n−i,k−1}`.
    pub fn new(n_max: usize) -> Self {
        let mut table: Vec<Vec<JetPoly>> = Vec::with_capacity(n_max + 1);
        table.push(vec![JetPoly::one()]);
        for n in 1..=n_max {
            let mut row = vec![JetPoly::zero(); n + 1];
            for (k, slot) in row.iter_mut().enumerate().skip(1) {
                let mut acc = JetPoly::zero();
                for i in 1..=n + 1 - k {
                    let prev = &table[n - i][k - 1];
                    if prev.is_zero() {
                        continue;
                    }
                    let c = binomial((n - 1) as u32, (i - 1) as u32);
                    acc.add_assign(&(&JetPoly::var(i) * prev).scale(&c));
                }
                *slot = acc;
            }
            table.push(row);
        }
        BellTable { n_max, table }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `B_{n,k}` in the slots `X_m = z_m`.
    pub fn partial(&self, n: usize, k: usize) -> Result<&JetPoly, BellError> {
        if k > n || n > self.n_max {
            return Err(BellError::OutOfRange { n, k, n_max: self.n_max });
        }
        Ok(&self.table[n][k])
    }

    /// `Σ_k B_{n,k}` as an abstract polynomial.
    pub fn complete_abstract(&self, n: usize) -> Result<JetPoly, BellError> {
        let mut acc = JetPoly::zero();
        for k in 0..=n {
            acc.add_assign(self.partial(n, k)?);
        }
        Ok(acc)
    }
}

/// Complete Bell polynomial `B_n(X₁, …, X_n)` at concrete slot values.
///
/// Uses `B_{n+1} = Σ_i C(n, i) B_{n−i} X_{i+1}`; `B_0 = 1` (taken from the
/// carrier of `template`).
pub fn bell_complete<T: BellRing>(n: usize, slots: &[T], template: &T) -> Result<T, BellError> {
    if slots.len() < n {
        return Err(BellError::MissingSlots { needed: n, given: slots.len() });
    }
    let mut b: Vec<T> = vec![template.one_like()];
    for m in 0..n {
        let mut acc = template.zero_like();
        for i in 0..=m {
            let c = binomial(m as u32, i as u32);
            acc = acc.add(&b[m - i].mul(&slots[i]).scale(&c));
        }
        b.push(acc);
    }
    Ok(b.pop().expect("nonempty"))
}

/// The jet polynomials `f_{i,j}` for `i ≤ i_max`, built by
/// `f_{i+1,j+1} = ∂f_{i,j+1} + z₁ f_{i,j}`, `f_{i,0} = δ_{i,0}`.
#[derive(Clone, Debug)]
pub struct FJetTable {
    i_max: usize,
    table: Vec<Vec<JetPoly>>,
}

impl FJetTable {
    pub fn new(i_max: usize) -> Self {
        let z1 = JetPoly::var(1);
        let mut table = vec![vec![JetPoly::one()]];
        for i in 0..i_max {
            let prev: &Vec<JetPoly> = &table[i];
            let mut row = vec![JetPoly::zero(); i + 2];
            for j in 0..=i {
                let mut v = &z1 * &prev[j];
                if j < i {
                    // f_{i,j+1} involves z up to z_{i−j}, so ∂ stays within z_{i_max}.
                    let d = prev[j + 1].derive(i_max).expect("index bounded by i_max");
                    v.add_assign(&d);
                }
                row[j + 1] = v;
            }
            table.push(row);
        }
        FJetTable { i_max, table }
    }

    pub fn i_max(&self) -> usize {
        self.i_max
    }

    /// `f_{i,j}`; zero for `j > i`. Panics if `i > i_max`.
    pub fn get(&self, i: usize, j: usize) -> &JetPoly {
        static ZERO: std::sync::OnceLock<JetPoly> = std::sync::OnceLock::new();
        self.table[i].get(j).unwrap_or_else(|| ZERO.get_or_init(JetPoly::zero))
    }
}

/// `∂^i h = Σ_j f_{i,j} (ξ∂_ξ)^j h` for a jet-free `h`.
pub fn chain_rule_holds(f: &FJetTable, h: &ThetaPoly, i: usize) -> Result<bool, AlgebraError> {
    let lhs = h.derive_n(i, f.i_max() + 1)?;
    let mut rhs = ThetaPoly::zero();
    let mut e = h.clone();
    for j in 0..=i {
        rhs.add_scaled_jet(&e, f.get(i, j));
        e = e.xi_euler();
    }
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::format::parse_jet;

    fn p(s: &str) -> JetPoly {
        parse_jet(s).unwrap()
    }

    #[test]
    fn small_partials() {
        let t = BellTable::new(6);
        assert_eq!(t.partial(0, 0).unwrap(), &JetPoly::one());
        assert_eq!(t.partial(3, 1).unwrap(), &p("z3"));
        assert_eq!(t.partial(3, 2).unwrap(), &p("3*z1*z2"));
        for n in 1..=6 {
            assert_eq!(t.partial(n, n).unwrap(), &JetPoly::var(1).pow(n as u32));
            assert!(t.partial(n, 0).unwrap().is_zero());
        }
        assert!(t.partial(2, 3).is_err());
        assert!(t.partial(7, 1).is_err());
    }

    #[test]
    fn complete_bell_values() {
        let x = [JetPoly::var(1), JetPoly::var(2)];
        assert_eq!(bell_complete(0, &x, &JetPoly::one()).unwrap(), JetPoly::one());
        assert_eq!(bell_complete(1, &x, &JetPoly::one()).unwrap(), p("z1"));
        assert_eq!(bell_complete(2, &x, &JetPoly::one()).unwrap(), p("z1^2 + z2"));
        let t = BellTable::new(7);
        let slots: Vec<JetPoly> = (1..=7).map(JetPoly::var).collect();
        for n in 0..=7 {
            assert_eq!(bell_complete(n, &slots, &JetPoly::one()).unwrap(), t.complete_abstract(n).unwrap());
        }
        // Counting set partitions: B_n(1, …, 1) is the Bell number.
        let ones = vec![Rational::one(); 6];
        assert_eq!(bell_complete(6, &ones, &Rational::one()).unwrap(), 203);
    }

    #[test]
    fn f_jet_small_values() {
        let f = FJetTable::new(4);
        assert_eq!(f.get(0, 0), &JetPoly::one());
        assert_eq!(f.get(2, 1), &p("z2"));
        assert_eq!(f.get(2, 2), &p("z1^2"));
        assert_eq!(f.get(3, 2), &p("3*z1*z2"));
        assert!(f.get(3, 0).is_zero());
        assert!(f.get(2, 5).is_zero());
    }

    #[test]
    fn f_jet_matches_bell_closed_form() {
        let f = FJetTable::new(8);
        let b = BellTable::new(8);
        for i in 0..=8 {
            for j in 0..=i {
                assert_eq!(f.get(i, j), b.partial(i, j).unwrap(), "f({i},{j})");
            }
        }
    }

    #[test]
    fn chain_rule_on_theta_powers() {
        let f = FJetTable::new(6);
        for h in [ThetaPoly::theta(), ThetaPoly::theta_pow(3)] {
            for i in 0..=6 {
                assert!(chain_rule_holds(&f, &h, i).unwrap(), "i = {i}");
            }
        }
    }
}
