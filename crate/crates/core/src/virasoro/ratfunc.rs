//! Univariate polynomials and rational functions over ℚ, with residues at
//! poles of any order and expansions at infinity.

use std::fmt;

use crate::algebra::Rational;

/// Dense polynomial, coefficients in ascending degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    coeffs: Vec<Rational>,
}

impl UPoly {
    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        UPoly::from_coeffs(vec![c])
    }

    /// `z − a`.
    pub fn linear_root(a: &Rational) -> Self {
        UPoly::from_coeffs(vec![-a, Rational::one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn eval(&self, z: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    }

    pub fn add(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::from_coeffs((0..n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &UPoly) -> UPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::from_coeffs((0..n).map(|k| self.coeff(k) - other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &UPoly) -> UPoly {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a * b);
            }
        }
        UPoly::from_coeffs(out)
    }

    pub fn scale(&self, c: &Rational) -> UPoly {
        UPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let Some(n) = self.degree().filter(|&n| n >= dd) else {
            return (UPoly::zero(), self.clone());
        };
        let mut q = vec![Rational::zero(); n - dd + 1];
        for k in (dd..=n).rev() {
            let c = &rem[k] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                let t = &c * dj;
                rem[k - dd + j] -= &t;
            }
            q[k - dd] = c;
        }
        rem.truncate(dd);
        (UPoly::from_coeffs(q), UPoly::from_coeffs(rem))
    }

    pub fn monic(&self) -> UPoly {
        match self.leading() {
            Some(l) => self.scale(&l.inv().expect("nonzero leading coefficient")),
            None => UPoly::zero(),
        }
    }

    pub fn gcd(&self, other: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p(z + a)`.
    pub fn taylor_shift(&self, a: &Rational) -> UPoly {
        // Horner in the shifted variable.
        let mut acc = UPoly::zero();
        let lin = UPoly::from_coeffs(vec![a.clone(), Rational::one()]);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&UPoly::constant(c.clone()));
        }
        acc
    }

    /// Multiplicity of `a` as a root.
    pub fn root_multiplicity(&self, a: &Rational) -> usize {
        if self.is_zero() {
            return usize::MAX;
        }
        let shifted = self.taylor_shift(a);
        shifted.coeffs.iter().take_while(|c| c.is_zero()).count()
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*z")?,
                _ => write!(f, "({c})*z^{k}")?,
            }
        }
        Ok(())
    }
}

/// Power series `t^0..t^{n-1}` of `a(t)/b(t)` with `b(0) ≠ 0`.
fn series_quotient(a: &UPoly, b: &UPoly, n: usize) -> Vec<Rational> {
    let b0 = b.coeff(0).inv().expect("unit constant term");
    let mut out: Vec<Rational> = Vec::with_capacity(n);
    for k in 0..n {
        let mut c = a.coeff(k);
        for j in 1..=k.min(b.coeffs.len().saturating_sub(1)) {
            c -= &(b.coeff(j) * &out[k - j]);
        }
        out.push(c * &b0);
    }
    out
}

/// `num/den` in lowest terms with a monic denominator. Functions built from
/// linear factors keep their roots, which makes residues and values cheap.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: UPoly,
    den: UPoly,
    roots: Option<Roots>,
}

/// `scale · Π(z − numᵢ) / Π(z − denⱼ)` with no shared roots.
#[derive(Clone, Debug)]
struct Roots {
    scale: Rational,
    num: Vec<Rational>,
    den: Vec<Rational>,
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        self.num == other.num && self.den == other.den
    }
}

impl Eq for RationalFunction {}

/// Cancels common entries of two root multisets.
fn cancel_roots(num: &[Rational], den: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let mut count: std::collections::BTreeMap<&Rational, i64> = std::collections::BTreeMap::new();
    for r in num {
        *count.entry(r).or_default() += 1;
    }
    for r in den {
        *count.entry(r).or_default() -= 1;
    }
    let (mut n, mut d) = (Vec::new(), Vec::new());
    for (r, e) in count {
        let target = if e > 0 { &mut n } else { &mut d };
        target.extend(std::iter::repeat_n(r.clone(), e.unsigned_abs() as usize));
    }
    (n, d)
}

fn poly_from_roots(roots: &[Rational]) -> UPoly {
    roots.iter().fold(UPoly::constant(Rational::one()), |acc, r| acc.mul(&UPoly::linear_root(r)))
}

impl RationalFunction {
    /// Normalizes; `None` for a zero denominator.
    pub fn new(num: UPoly, den: UPoly) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        if num.is_zero() {
            return Some(RationalFunction { num, den: UPoly::constant(Rational::one()), roots: None });
        }
        let g = num.gcd(&den);
        let (mut n, _) = num.div_rem(&g);
        let (mut d, _) = den.div_rem(&g);
        let l = d.leading().cloned().expect("nonzero denominator");
        let li = l.inv().expect("nonzero");
        n = n.scale(&li);
        d = d.scale(&li);
        Some(RationalFunction { num: n, den: d, roots: None })
    }

    pub fn one() -> Self {
        RationalFunction::from_roots(&[], &[])
    }

    /// `Π (z − a) / Π (z − b)` from root lists.
    pub fn from_roots(num_roots: &[Rational], den_roots: &[Rational]) -> Self {
        RationalFunction::from_scaled_roots(Rational::one(), num_roots, den_roots)
    }

    fn from_scaled_roots(scale: Rational, num_roots: &[Rational], den_roots: &[Rational]) -> Self {
        let (n, d) = cancel_roots(num_roots, den_roots);
        let num = poly_from_roots(&n).scale(&scale);
        let den = poly_from_roots(&d);
        RationalFunction { num, den, roots: Some(Roots { scale, num: n, den: d }) }
    }

    pub fn numerator(&self) -> &UPoly {
        &self.num
    }

    pub fn denominator(&self) -> &UPoly {
        &self.den
    }

    pub fn mul(&self, other: &RationalFunction) -> RationalFunction {
        if let (Some(a), Some(b)) = (&self.roots, &other.roots) {
            let num: Vec<Rational> = a.num.iter().chain(&b.num).cloned().collect();
            let den: Vec<Rational> = a.den.iter().chain(&b.den).cloned().collect();
            return RationalFunction::from_scaled_roots(&a.scale * &b.scale, &num, &den);
        }
        RationalFunction::new(self.num.mul(&other.num), self.den.mul(&other.den)).expect("nonzero product")
    }

    /// `f(z − j)`.
    pub fn shift(&self, j: &Rational) -> RationalFunction {
        if let Some(r) = &self.roots {
            let num: Vec<Rational> = r.num.iter().map(|a| a + j).collect();
            let den: Vec<Rational> = r.den.iter().map(|a| a + j).collect();
            return RationalFunction::from_scaled_roots(r.scale.clone(), &num, &den);
        }
        let mj = -j;
        RationalFunction::new(self.num.taylor_shift(&mj), self.den.taylor_shift(&mj)).expect("shift keeps den")
    }

    /// Value at `z`; `None` at a pole.
    pub fn eval(&self, z: &Rational) -> Option<Rational> {
        if let Some(r) = &self.roots {
            let mut acc = r.scale.clone();
            for a in &r.num {
                acc *= &(z - a);
            }
            for b in &r.den {
                let d = z - b;
                if d.is_zero() {
                    return None;
                }
                acc = acc / d;
            }
            return Some(acc);
        }
        let d = self.den.eval(z);
        if d.is_zero() {
            return None;
        }
        Some(self.num.eval(z) / d)
    }

    pub fn pole_order(&self, a: &Rational) -> usize {
        if let Some(r) = &self.roots {
            return r.den.iter().filter(|&b| b == a).count();
        }
        self.den.root_multiplicity(a)
    }

    /// Residue at `a` for a pole of any order (zero at a regular point).
    pub fn residue(&self, a: &Rational) -> Rational {
        let m = self.pole_order(a);
        if m == 0 {
            return Rational::zero();
        }
        if let Some(r) = &self.roots {
            // Π over the other factors of (a − r + t)^{±1}, to t^{m−1}.
            let mut series = vec![Rational::zero(); m];
            series[0] = r.scale.clone();
            for root in &r.num {
                let c = a - root;
                for k in (1..m).rev() {
                    let prev = series[k - 1].clone();
                    series[k] = &series[k] * &c + prev;
                }
                series[0] *= &c;
            }
            for root in r.den.iter().filter(|&b| b != a) {
                let ci = (a - root).inv().expect("distinct root");
                for k in 0..m {
                    let prev = if k > 0 { series[k - 1].clone() } else { Rational::zero() };
                    series[k] = (&series[k] - prev) * &ci;
                }
            }
            return series.pop().expect("m >= 1");
        }
        // den(a + t) = t^m q(t); the residue is [t^{m−1}] num(a+t)/q(t).
        let shifted = self.den.taylor_shift(a);
        let q = UPoly::from_coeffs(shifted.coeffs()[m..].to_vec());
        let n = self.num.taylor_shift(a);
        series_quotient(&n, &q, m).pop().expect("m ≥ 1")
    }

    /// Coefficients of `z^{d}, z^{d−1}, …, z^{d−order}` at infinity, with
    /// `d = deg num − deg den`; returns `(d, coefficients)`.
    pub fn expand_at_infinity(&self, order: usize) -> (i64, Vec<Rational>) {
        let dn = self.num.degree().unwrap_or(0);
        let dd = self.den.degree().unwrap_or(0);
        let rev = |p: &UPoly, deg: usize| UPoly::from_coeffs((0..=deg).map(|k| p.coeff(deg - k)).collect());
        let coeffs = series_quotient(&rev(&self.num, dn), &rev(&self.den, dd), order + 1);
        (dn as i64 - dd as i64, coeffs)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] / [{}]", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn gcd_cancels_common_roots() {
        let f = RationalFunction::from_roots(&[r(1, 1), r(1, 2)], &[r(1, 1), r(2, 1)]);
        assert_eq!(f.numerator(), &UPoly::linear_root(&r(1, 2)));
        assert_eq!(f.denominator(), &UPoly::linear_root(&r(2, 1)));
    }

    #[test]
    fn residues_of_simple_and_double_poles() {
        // 1/((z-1)^2 (z-2)) : Res_{1} = -1, Res_{2} = 1
        let f = RationalFunction::from_roots(&[], &[r(1, 1), r(1, 1), r(2, 1)]);
        assert_eq!(f.pole_order(&r(1, 1)), 2);
        assert_eq!(f.residue(&r(1, 1)), r(-1, 1));
        assert_eq!(f.residue(&r(2, 1)), r(1, 1));
        assert_eq!(f.residue(&r(3, 1)), r(0, 1));
        // z^2/(z-1)^3 has residue 1
        let g = RationalFunction::new(
            UPoly::from_coeffs(vec![r(0, 1), r(0, 1), r(1, 1)]),
            RationalFunction::from_roots(&[], &[r(1, 1), r(1, 1), r(1, 1)]).denominator().clone(),
        )
        .unwrap();
        assert_eq!(g.residue(&r(1, 1)), r(1, 1));
    }

    #[test]
    fn expansion_at_infinity() {
        // (z-1)/(z-2) = 1 + z^{-1} + 2 z^{-2} + 4 z^{-3}
        let f = RationalFunction::from_roots(&[r(1, 1)], &[r(2, 1)]);
        let (d, c) = f.expand_at_infinity(3);
        assert_eq!(d, 0);
        assert_eq!(c, vec![r(1, 1), r(1, 1), r(2, 1), r(4, 1)]);
    }

    #[test]
    fn shift_and_eval() {
        let f = RationalFunction::from_roots(&[r(1, 3)], &[r(1, 2)]);
        let g = f.shift(&r(1, 1));
        assert_eq!(g.eval(&r(2, 1)), f.eval(&r(1, 1)));
        assert_eq!(g.eval(&r(3, 2)), None);
    }
}
