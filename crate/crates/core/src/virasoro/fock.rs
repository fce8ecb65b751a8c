//! Virasoro operators `L_m` acting on polynomials in `x`, `s_k` (`k ∈ ℕ_*`)
//! with Laurent coefficients in `ε²`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use smallvec::SmallVec;

use super::{RationalParams, VirasoroError};
use crate::algebra::Rational;

/// Highest admissible `s`-index and total degree in `x` and `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Truncation {
    pub k_cut: i64,
    pub d_cut: u32,
}

/// `ε^{2·eps2} x^{x} Π s_k^{e_k}`, `s` sorted by index with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct FockMono {
    pub eps2: i32,
    pub x: u32,
    pub s: SmallVec<[(i64, u32); 4]>,
}

impl FockMono {
    pub fn one() -> Self {
        FockMono::default()
    }

    pub fn new(eps2: i32, x: u32, s: &[(i64, u32)]) -> Self {
        let mut m = FockMono { eps2, x, s: SmallVec::new() };
        for &(k, e) in s {
            m = m.times_s(k, e as i32);
        }
        m
    }

    pub fn degree(&self) -> u32 {
        self.x + self.s.iter().map(|&(_, e)| e).sum::<u32>()
    }

    pub fn s_exponent(&self, k: i64) -> u32 {
        self.s.iter().find(|&&(j, _)| j == k).map_or(0, |&(_, e)| e)
    }

    /// Multiplies by `s_k^{e}` (`e` may be negative if the exponent allows it).
    fn times_s(&self, k: i64, e: i32) -> FockMono {
        let mut out = self.clone();
        match out.s.binary_search_by_key(&k, |&(j, _)| j) {
            Ok(pos) => {
                let ne = out.s[pos].1 as i32 + e;
                assert!(ne >= 0, "negative exponent of s_{k}");
                if ne == 0 {
                    out.s.remove(pos);
                } else {
                    out.s[pos].1 = ne as u32;
                }
            }
            Err(pos) => {
                assert!(e >= 0, "negative exponent of s_{k}");
                if e > 0 {
                    out.s.insert(pos, (k, e as u32));
                }
            }
        }
        out
    }
}

impl fmt::Display for FockMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.eps2 {
            0 => {}
            1 => parts.push("eps^2".to_string()),
            e => parts.push(format!("eps^{}", 2 * e)),
        }
        match self.x {
            0 => {}
            1 => parts.push("x".into()),
            e => parts.push(format!("x^{e}")),
        }
        for &(k, e) in &self.s {
            let name = if k < 0 { format!("s(m{})", -k) } else { format!("s{k}") };
            parts.push(if e == 1 { name } else { format!("{name}^{e}") });
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

/// Sparse polynomial over `ℚ[ε², ε⁻²]` in `x` and `s_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FockPoly {
    trunc: Truncation,
    terms: BTreeMap<FockMono, Rational>,
}

impl FockPoly {
    pub fn zero(trunc: Truncation) -> Self {
        FockPoly { trunc, terms: BTreeMap::new() }
    }

    pub fn monomial(trunc: Truncation, mono: FockMono, c: Rational) -> Self {
        let mut p = FockPoly::zero(trunc);
        p.add_term(mono, c);
        p
    }

    pub fn truncation(&self) -> Truncation {
        self.trunc
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

    pub fn terms(&self) -> impl Iterator<Item = (&FockMono, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &FockMono) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, mono: FockMono, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(mono) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += &c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &FockPoly, c: &Rational) {
        for (m, a) in &other.terms {
            self.add_term(m.clone(), a * c);
        }
    }

    pub fn sub(&self, other: &FockPoly) -> FockPoly {
        let mut out = self.clone();
        out.add_scaled(other, &Rational::from_int(-1));
        out
    }
}

impl fmt::Display for FockPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("({c})*{m}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn check_input(params: &RationalParams, f: &FockPoly) -> Result<(), VirasoroError> {
    let t = f.trunc;
    for m in f.terms.keys() {
        if m.degree() > t.d_cut {
            return Err(VirasoroError::Truncation(format!("{m} has degree above {}", t.d_cut)));
        }
        for &(k, _) in &m.s {
            if !params.in_nstar(k) {
                return Err(VirasoroError::NotInNStar(k));
            }
            if k > t.k_cut {
                return Err(VirasoroError::Truncation(format!("s{k} above k_cut = {}", t.k_cut)));
            }
        }
    }
    Ok(())
}

/// Ordered index pairs `(a, b)` and weights of the `ε²` part of `L_m`.
fn second_order_part(params: &RationalParams, m: i64) -> Vec<(i64, i64, Rational)> {
    let h = params.h();
    let half = Rational::new(1, 2);
    let mut out = Vec::new();
    for ell in 1..m {
        out.push((h * ell, h * (m - ell), half.clone()));
    }
    for a in params.index_set_star() {
        for b in params.index_set_star() {
            let g = params.g(a, b);
            if g.is_zero() {
                continue;
            }
            for ell in 0..m {
                out.push((a + h * ell, b + h * (m - 1 - ell), &half * &g));
            }
        }
    }
    out
}

/// `L_m f`, exact; inputs outside `ℕ_*` or the truncation are rejected.
pub fn virasoro_apply(params: &RationalParams, m: i64, f: &FockPoly) -> Result<FockPoly, VirasoroError> {
    if m < 0 {
        return Err(VirasoroError::ZeroOrder(m));
    }
    check_input(params, f)?;
    let t = f.trunc;
    let mut out = FockPoly::zero(t);
    if m == 0 {
        let constant = (Rational::new(1, params.h()) - Rational::new(1, params.k1()) - Rational::new(1, params.k2()))
            / Rational::from_int(24);
        for (mono, c) in &f.terms {
            let mut weight = Rational::zero();
            for &(k, e) in &mono.s {
                weight += &(params.b(k)? * Rational::from_int(e as i64));
            }
            out.add_term(mono.clone(), (weight + &constant) * c);
            if mono.degree() + 2 > t.d_cut {
                return Err(VirasoroError::Truncation(format!("x^2 * {mono} exceeds d_cut = {}", t.d_cut)));
            }
            let mut raised = mono.clone();
            raised.x += 2;
            raised.eps2 -= 1;
            out.add_term(raised, c * Rational::new(1, 2));
        }
        return Ok(out);
    }
    let shift = params.h() * m;
    let second = second_order_part(params, m);
    for (mono, c) in &f.terms {
        for &(j, e) in &mono.s {
            let ce = c * Rational::from_int(e as i64);
            let lowered = mono.times_s(j, -1);
            if j == shift {
                let mut xm = lowered;
                xm.x += 1;
                out.add_term(xm, ce);
            } else if params.in_nstar(j - shift) {
                let k = j - shift;
                out.add_term(lowered.times_s(k, 1), ce * params.b(k)?);
            }
        }
        for (a, b, w) in &second {
            let ea = mono.s_exponent(*a);
            let eb = mono.s_exponent(*b);
            let factor = if a == b { ea * ea.saturating_sub(1) } else { ea * eb };
            if factor == 0 {
                continue;
            }
            let mut d = mono.times_s(*a, -1).times_s(*b, -1);
            d.eps2 += 1;
            out.add_term(d, c * w * Rational::from_int(factor as i64));
        }
    }
    Ok(out)
}

/// Outcome of `(L_m L_n − L_n L_m − (m−n) L_{m+n}) f`.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorOutcome {
    pub residual_terms: usize,
    pub first_failing: Option<(String, Rational)>,
}

impl CommutatorOutcome {
    pub fn passed(&self) -> bool {
        self.residual_terms == 0
    }
}

pub fn commutator_check(params: &RationalParams, m: i64, n: i64, sample: &FockPoly) -> Result<CommutatorOutcome, VirasoroError> {
    let lmn = virasoro_apply(params, m, &virasoro_apply(params, n, sample)?)?;
    let lnm = virasoro_apply(params, n, &virasoro_apply(params, m, sample)?)?;
    let mut residual = lmn.sub(&lnm);
    residual.add_scaled(&virasoro_apply(params, m + n, sample)?, &Rational::from_int(n - m));
    let first_failing = residual.terms().next().map(|(mono, c)| (mono.to_string(), c.clone()));
    Ok(CommutatorOutcome { residual_terms: residual.len(), first_failing })
}

/// All monomials in `x`, `s_k` (`k ∈ ℕ_*`, `k ≤ k_cut`) of degree `≤ max_degree`.
pub fn monomial_basis(params: &RationalParams, trunc: Truncation, max_degree: u32) -> Vec<FockPoly> {
    let mut vars: Vec<Option<i64>> = vec![None];
    vars.extend(params.nstar_up_to(trunc.k_cut).into_iter().map(Some));
    let mut monos = vec![FockMono::one()];
    let mut frontier: Vec<(FockMono, usize)> = vec![(FockMono::one(), 0)];
    for _ in 0..max_degree {
        let mut next = Vec::new();
        for (mono, from) in &frontier {
            for (idx, v) in vars.iter().enumerate().skip(*from) {
                let grown = match v {
                    None => {
                        let mut g = mono.clone();
                        g.x += 1;
                        g
                    }
                    Some(k) => mono.times_s(*k, 1),
                };
                monos.push(grown.clone());
                next.push((grown, idx));
            }
        }
        frontier = next;
    }
    monos.into_iter().map(|m| FockPoly::monomial(trunc, m, Rational::one())).collect()
}

/// One cell of the commutator matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CommutatorCell {
    pub m: i64,
    pub n: i64,
    pub basis_size: usize,
    pub failures: usize,
    pub first_failing: Option<String>,
}

/// `[L_m, L_n]` on the degree-`≤ max_degree` basis with `k_cut = (m+n+1)h`,
/// for all `0 ≤ m, n ≤ m_max`.
pub fn commutator_grid(params: &RationalParams, m_max: i64, max_degree: u32) -> Result<Vec<CommutatorCell>, VirasoroError> {
    let pairs: Vec<(i64, i64)> = (0..=m_max).flat_map(|m| (0..=m_max).map(move |n| (m, n))).collect();
    pairs
        .into_par_iter()
        .map(|(m, n)| {
            let trunc = Truncation { k_cut: (m + n + 1) * params.h(), d_cut: max_degree + 4 };
            let basis = monomial_basis(params, trunc, max_degree);
            let outcomes = basis
                .par_iter()
                .map(|b| commutator_check(params, m, n, b).map(|o| (b, o)))
                .collect::<Result<Vec<_>, _>>()?;
            let failing: Vec<_> = outcomes.iter().filter(|(_, o)| !o.passed()).collect();
            let first_failing = failing.first().map(|(b, o)| {
                let (term, c) = o.first_failing.clone().expect("failed outcome has a term");
                format!("on {b}: ({c})*{term}")
            });
            Ok(CommutatorCell { m, n, basis_size: basis.len(), failures: failing.len(), first_failing })
        })
        .collect()
}
