//! Jet polynomials: elements of `ℚ[σ₁,σ₃][z₀][z₁^{±1}][z₂, z₃, …]`.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

use super::{AlgebraError, Rational, SigmaPoly};

/// Exponent vector of `z₀, z₁, z₂, …` with trailing zeros trimmed.
///
/// Only `z₁` may carry a negative exponent. Ordered graded-lexicographically
/// with `z₀ < z₁ < z₂ < …`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct JetMono {
    exps: SmallVec<[i16; 16]>,
}

impl JetMono {
    pub fn one() -> Self {
        JetMono::default()
    }

    /// `z_k^e`.
    pub fn var_pow(k: usize, e: i16) -> Self {
        let mut m = JetMono::one();
        m.set(k, e);
        m
    }

    pub fn from_exponents(exps: &[i16]) -> Result<Self, AlgebraError> {
        for (k, e) in exps.iter().enumerate() {
            if *e < 0 && k != 1 {
                return Err(AlgebraError::NegativeExponent(k));
            }
        }
        let mut m = JetMono { exps: exps.iter().copied().collect() };
        m.trim();
        Ok(m)
    }

    fn trim(&mut self) {
        while self.exps.last() == Some(&0) {
            self.exps.pop();
        }
    }

    pub fn exponent(&self, k: usize) -> i16 {
        self.exps.get(k).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[i16] {
        &self.exps
    }

    fn set(&mut self, k: usize, e: i16) {
        if self.exps.len() <= k {
            self.exps.resize(k + 1, 0);
        }
        self.exps[k] = e;
        self.trim();
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    /// Highest `k` with a nonzero exponent.
    pub fn max_index(&self) -> Option<usize> {
        self.exps.len().checked_sub(1)
    }

    pub fn degree(&self) -> i32 {
        self.exps.iter().map(|&e| e as i32).sum()
    }

    /// Degree with `deg z_j = j`.
    pub fn weight(&self) -> i32 {
        self.exps.iter().enumerate().map(|(j, &e)| j as i32 * e as i32).sum()
    }

    /// Degree with `deg z_j = j − 1`.
    pub fn shifted_weight(&self) -> i32 {
        self.exps.iter().enumerate().map(|(j, &e)| (j as i32 - 1) * e as i32).sum()
    }

    pub fn mul(&self, other: &JetMono) -> JetMono {
        let (long, short) =
            if self.exps.len() >= other.exps.len() { (self, other) } else { (other, self) };
        let mut exps = long.exps.clone();
        for (k, e) in short.exps.iter().enumerate() {
            exps[k] += e;
        }
        let mut m = JetMono { exps };
        m.trim();
        m
    }

    /// Divide by `other`; `None` when the quotient would need a negative
    /// exponent outside `z₁`.
    pub fn div(&self, other: &JetMono) -> Option<JetMono> {
        let n = self.exps.len().max(other.exps.len());
        let mut exps: SmallVec<[i16; 16]> = SmallVec::with_capacity(n);
        for k in 0..n {
            let e = self.exponent(k) - other.exponent(k);
            if e < 0 && k != 1 {
                return None;
            }
            exps.push(e);
        }
        let mut m = JetMono { exps };
        m.trim();
        Some(m)
    }

    /// `∂/∂z_k` of the monomial as `(multiplier, monomial)`.
    pub fn partial(&self, k: usize) -> Option<(i16, JetMono)> {
        let e = self.exponent(k);
        if e == 0 {
            return None;
        }
        let mut m = self.clone();
        m.set(k, e - 1);
        Some((e, m))
    }
}

impl Ord for JetMono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.exps.len().max(other.exps.len());
            for k in (0..n).rev() {
                match self.exponent(k).cmp(&other.exponent(k)) {
                    Ordering::Equal => continue,
                    ord => return ord,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for JetMono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Debug for JetMono {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", super::format::jet_mono_to_text(self))
    }
}

/// Sparse jet polynomial: map from jet monomial to its `σ`-coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct JetPoly {
    terms: BTreeMap<JetMono, SigmaPoly>,
}

impl JetPoly {
    pub fn zero() -> Self {
        JetPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        JetPoly::constant(SigmaPoly::one())
    }

    pub fn constant(c: SigmaPoly) -> Self {
        JetPoly::monomial(JetMono::one(), c)
    }

    pub fn rational(c: Rational) -> Self {
        JetPoly::constant(SigmaPoly::constant(c))
    }

    pub fn monomial(m: JetMono, c: SigmaPoly) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        JetPoly { terms }
    }

    /// The variable `z_k`.
    pub fn var(k: usize) -> Self {
        JetPoly::monomial(JetMono::var_pow(k, 1), SigmaPoly::one())
    }

    /// `z₁^e`, any sign of `e`.
    pub fn z1_pow(e: i16) -> Self {
        JetPoly::monomial(JetMono::var_pow(1, e), SigmaPoly::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (JetMono, SigmaPoly)>>(iter: I) -> Self {
        let mut p = JetPoly::zero();
        for (m, c) in iter {
            p.add_term(m, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of `(σ-monomial, jet monomial)` terms in the flattened form.
    pub fn flat_len(&self) -> usize {
        self.terms.values().map(SigmaPoly::len).sum()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&JetMono, &SigmaPoly)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &JetMono) -> SigmaPoly {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// The `σ`-coefficient of the monomial `1`.
    pub fn constant_term(&self) -> SigmaPoly {
        self.coeff(&JetMono::one())
    }

    /// `Some(c)` when the polynomial contains no jet variables.
    pub fn as_sigma(&self) -> Option<SigmaPoly> {
        match self.terms.len() {
            0 => Some(SigmaPoly::zero()),
            1 => self.terms.get(&JetMono::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: JetMono, c: &SigmaPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                e.get_mut().add_assign(c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c.clone());
            }
        }
    }

    fn add_term_product(&mut self, m: JetMono, a: &SigmaPoly, b: &SigmaPoly) {
        match self.terms.entry(m) {
            Entry::Occupied(mut e) => {
                e.get_mut().add_product(a, b);
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                let p = a * b;
                if !p.is_zero() {
                    e.insert(p);
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &JetPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn sub_assign(&mut self, other: &JetPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), &-c);
        }
    }

    /// `self += a * b`.
    pub fn add_product(&mut self, a: &JetPoly, b: &JetPoly) {
        for (ma, ca) in &a.terms {
            for (mb, cb) in &b.terms {
                self.add_term_product(ma.mul(mb), ca, cb);
            }
        }
    }

    /// `self += c * a` for a `σ`-coefficient `c`.
    pub fn add_scaled(&mut self, a: &JetPoly, c: &SigmaPoly) {
        for (m, ca) in &a.terms {
            self.add_term_product(m.clone(), ca, c);
        }
    }

    pub fn scale_sigma(&self, c: &SigmaPoly) -> JetPoly {
        let mut out = JetPoly::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn scale(&self, c: &Rational) -> JetPoly {
        if c.is_zero() {
            return JetPoly::zero();
        }
        JetPoly { terms: self.terms.iter().map(|(m, s)| (m.clone(), s.scale(c))).collect() }
    }

    /// Multiply by a single monomial.
    pub fn shift(&self, m: &JetMono) -> JetPoly {
        JetPoly { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }

    pub fn pow(&self, e: u32) -> JetPoly {
        let mut acc = JetPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Highest jet index appearing in any monomial.
    pub fn max_index(&self) -> Option<usize> {
        self.terms.keys().filter_map(JetMono::max_index).max()
    }

    /// `∂/∂z_k`.
    pub fn partial(&self, k: usize) -> JetPoly {
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            if let Some((e, dm)) = m.partial(k) {
                out.add_term(dm, &c.scale(&Rational::from_int(e as i64)));
            }
        }
        out
    }

    /// The total derivation `∂ = Σ z_{k+1} ∂/∂z_k`.
    ///
    /// Fails if the result would contain `z_j` with `j > cutoff`.
    pub fn derive(&self, cutoff: usize) -> Result<JetPoly, AlgebraError> {
        let mut out = JetPoly::zero();
        for (m, c) in &self.terms {
            for (k, &e) in m.exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if k + 1 > cutoff {
                    return Err(AlgebraError::CutoffOverflow { index: k + 1, cutoff });
                }
                let mut dm = m.clone();
                dm.set(k, e - 1);
                let e_next = dm.exponent(k + 1);
                dm.set(k + 1, e_next + 1);
                out.add_term(dm, &c.scale(&Rational::from_int(e as i64)));
            }
        }
        Ok(out)
    }

    /// Exact division by a single term `c · m`.
    pub fn div_term(&self, m: &JetMono, c: &SigmaPoly) -> Option<JetPoly> {
        let mut out = JetPoly::zero();
        for (k, ck) in &self.terms {
            let q = k.div(m)?;
            let qc = if c.is_constant() {
                ck.scale(&c.constant_term().inv()?)
            } else {
                ck.div_exact(c)?
            };
            out.add_term(q, &qc);
        }
        Some(out)
    }

    /// Single-term view: `Some((monomial, coefficient))` when exactly one term.
    pub fn as_single_term(&self) -> Option<(&JetMono, &SigmaPoly)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    /// Check homogeneity in `Σ j·e_j`; returns the common weight.
    pub fn jet_weight(&self) -> Option<i32> {
        let mut it = self.terms.keys().map(JetMono::weight);
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    /// Check homogeneity in `Σ (j−1)·e_j + deg σ₁ + 3 deg σ₃`.
    pub fn dimension_weight(&self) -> Option<i32> {
        let mut ws = self.terms.iter().flat_map(|(m, c)| {
            let base = m.shifted_weight();
            c.terms().map(move |(sm, _)| base + sm.weight() as i32)
        });
        let first = ws.next()?;
        ws.all(|w| w == first).then_some(first)
    }

    /// Substitute rational values for `z₀, z₁, …` (with `z₁ ≠ 0`).
    pub fn eval_jets(&self, values: &[Rational]) -> SigmaPoly {
        let mut out = SigmaPoly::zero();
        for (m, c) in &self.terms {
            let mut v = Rational::one();
            for (k, &e) in m.exps.iter().enumerate() {
                if e != 0 {
                    v = v * values[k].pow(e as i32);
                }
            }
            out.add_assign(&c.scale(&v));
        }
        out
    }

    /// Apply a map to every `σ`-coefficient.
    pub fn map_sigma(&self, f: impl Fn(&SigmaPoly) -> SigmaPoly) -> JetPoly {
        JetPoly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }
}

impl Add for &JetPoly {
    type Output = JetPoly;
    fn add(self, rhs: &JetPoly) -> JetPoly {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Sub for &JetPoly {
    type Output = JetPoly;
    fn sub(self, rhs: &JetPoly) -> JetPoly {
        let mut out = self.clone();
        out.sub_assign(rhs);
        out
    }
}

impl Mul for &JetPoly {
    type Output = JetPoly;
    fn mul(self, rhs: &JetPoly) -> JetPoly {
        let mut out = JetPoly::zero();
        out.add_product(self, rhs);
        out
    }
}

impl Neg for &JetPoly {
    type Output = JetPoly;
    fn neg(self) -> JetPoly {
        JetPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl std::fmt::Debug for JetPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", super::format::jet_to_text(self))
    }
}
