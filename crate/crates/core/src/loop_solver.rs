//! Genus-by-genus solution of the loop equation, reconstruction of `H_g`.

use std::sync::OnceLock;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{binomial, AlgebraError, JetMono, JetPoly, Rational, SigmaPoly, ThetaPoly, TriangularSystem};
use crate::ptensor::PTensorTable;

pub const SOLVER_VERSION: &str = concat!("cubic-hodge-loop/", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("genus must be at least 1")]
    GenusZero,
    #[error("genus {g} needs H_1..H_{} (got {got} lower genera)", g - 1)]
    MissingLower { g: u32, got: usize },
    #[error("genus {g} exceeds the solver bound {max}")]
    BeyondBound { g: u32, max: u32 },
    #[error("loop residual at genus {g} is nonzero (first nonzero power Θ^{power})")]
    Residual { g: u32, power: usize },
    #[error("gradient of H_{g} is not closed: ∂{j}(a_{i}) ≠ ∂{i}(a_{j})")]
    Integrability { g: u32, i: usize, j: usize },
    #[error("reconstructed H_{g} does not reproduce gradient component {i}")]
    GradientMismatch { g: u32, i: usize },
    #[error("H_{g} fails the {which} grading")]
    Grading { g: u32, which: &'static str },
    #[error("H_1 gradient is not of the form (c0, c1/z1)")]
    GenusOneShape,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Where an `H_g` came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub solver_version: String,
    pub ptable_hash: String,
    pub wall_time_ms: u64,
    /// Set when `∂H_g/∂z₀ ≠ 0` for `g ≥ 2` and the `z₀`-integration fallback ran.
    pub z0_anomaly: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FreeEnergyBody {
    /// `log_z1 · log z₁ + poly`.
    GenusOne { log_z1: Rational, poly: JetPoly },
    Higher(JetPoly),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeEnergy {
    pub genus: u32,
    /// `∂H_g/∂z_i` for `i = 0..=3g−2`.
    pub gradient: Vec<JetPoly>,
    pub body: FreeEnergyBody,
    pub provenance: Provenance,
}

impl FreeEnergy {
    /// The polynomial part of the body (everything except a `log z₁` term).
    pub fn polynomial(&self) -> &JetPoly {
        match &self.body {
            FreeEnergyBody::GenusOne { poly, .. } => poly,
            FreeEnergyBody::Higher(p) => p,
        }
    }

    pub fn log_z1(&self) -> Option<&Rational> {
        match &self.body {
            FreeEnergyBody::GenusOne { log_z1, .. } => Some(log_z1),
            FreeEnergyBody::Higher(_) => None,
        }
    }

    /// `∂H_g/∂z_i`, zero beyond the stored range.
    pub fn grad(&self, i: usize) -> JetPoly {
        self.gradient.get(i).cloned().unwrap_or_default()
    }
}

/// Number of unknowns (and consumed `Θ`-rows) at genus `g`: `3g − 1`.
pub fn unknowns(g: u32) -> usize {
    3 * g as usize - 1
}

/// Jet cutoff for a run up to genus `g_max`.
pub fn jet_cutoff(g_max: u32) -> usize {
    3 * g_max as usize + 2
}

/// Largest `P̃`-index sum needed up to genus `g_max`.
pub fn ptable_bound(g_max: u32) -> usize {
    let g = g_max as usize;
    (3 * g - 2).max((6 * g).saturating_sub(8))
}

/// `Θ²/16 − (1/16 − σ₁/24)Θ`.
pub fn genus_one_source() -> ThetaPoly {
    ThetaPoly::from_sigma(vec![
        SigmaPoly::zero(),
        &SigmaPoly::s1().scale(&Rational::new(1, 24)) - &SigmaPoly::constant(Rational::new(1, 16)),
        SigmaPoly::constant(Rational::new(1, 16)),
    ])
}

pub struct LoopSolver {
    g_max: u32,
    cutoff: usize,
    table: PTensorTable,
    lhs: Vec<OnceLock<ThetaPoly>>,
    source_derivs: Vec<ThetaPoly>,
}

impl LoopSolver {
    pub fn new(g_max: u32) -> Self {
        LoopSolver::with_cutoff(g_max, jet_cutoff(g_max)).expect("default cutoff suffices")
    }

    /// Solver with an explicit jet cutoff; too small a cutoff surfaces as a
    /// `CutoffOverflow` here or during the solve.
    pub fn with_cutoff(g_max: u32, cutoff: usize) -> Result<Self, SolveError> {
        let g_max = g_max.max(1);
        let table = PTensorTable::new(ptable_bound(g_max));
        let n_lhs = unknowns(g_max);
        // ∂^{i+2} of the genus-one source for i ≤ 3(g_max−1)−2.
        let mut source_derivs = Vec::new();
        let mut s = genus_one_source();
        for k in 0..=(3 * g_max as usize).saturating_sub(3) {
            if k >= 2 {
                source_derivs.push(s.clone());
            }
            s = s.derive(cutoff)?;
        }
        Ok(LoopSolver { g_max, cutoff, table, lhs: (0..n_lhs).map(|_| OnceLock::new()).collect(), source_derivs })
    }

    pub fn g_max(&self) -> u32 {
        self.g_max
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn table(&self) -> &PTensorTable {
        &self.table
    }

    /// Hash of the `P̃` data consumed at genus `g`.
    pub fn ptable_hash(&self, g: u32) -> String {
        self.table.row0_hash(ptable_bound(g))
    }

    /// `∂^iΘ + Σ_{j=1}^i C(i,j) P_{j−1,i−j+1}`.
    pub fn lhs_coefficient(&self, i: usize) -> &ThetaPoly {
        self.lhs[i].get_or_init(|| {
            let mut acc = ThetaPoly::theta().derive_n(i, self.cutoff).expect("within cutoff");
            for j in 1..=i {
                let p = self.table.p_dressed(j - 1, i - j + 1);
                acc.add_assign(&p.scale(&binomial(i as u32, j as u32)));
            }
            acc
        })
    }

    fn check_lower(&self, g: u32, lower: &[FreeEnergy]) -> Result<(), SolveError> {
        if g == 0 {
            return Err(SolveError::GenusZero);
        }
        if g > self.g_max {
            return Err(SolveError::BeyondBound { g, max: self.g_max });
        }
        if lower.len() < g as usize - 1 {
            return Err(SolveError::MissingLower { g, got: lower.len() });
        }
        Ok(())
    }

    /// `W_{ij} = ∂²H_{g−1}/∂z_i∂z_j + Σ_{k=1}^{g−1} ∂_iH_k ∂_jH_{g−k}` for `i, j ≤ 3(g−1)−2`.
    fn quadratic_kernel(&self, g: u32, lower: &[FreeEnergy]) -> Vec<Vec<JetPoly>> {
        let n = unknowns(g - 1);
        let prev = &lower[g as usize - 2];
        (0..n)
            .into_par_iter()
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut w = prev.grad(i).partial(j);
                        for k in 1..g {
                            let a = lower[k as usize - 1].grad(i);
                            let b = lower[(g - k) as usize - 1].grad(j);
                            if !a.is_zero() && !b.is_zero() {
                                w.add_product(&a, &b);
                            }
                        }
                        w
                    })
                    .collect()
            })
            .collect()
    }

    fn linear_part(&self, g: u32, lower: &[FreeEnergy]) -> ThetaPoly {
        let prev = &lower[g as usize - 2];
        let mut acc = ThetaPoly::zero();
        for i in 0..unknowns(g - 1) {
            let a = prev.grad(i);
            if !a.is_zero() {
                acc.add_scaled_jet(&self.source_derivs[i], &a);
            }
        }
        acc
    }

    /// Right-hand side at genus `g`.
    ///
    /// The quadratic part `½ Σ P_{i+1,j+1} W_{ij}` is contracted through the
    /// undressed table: `½ Σ_{k,l} P̃_{k,l} Y_{kl}` with
    /// `Y_{kl} = Σ_{i,j} f_{i+1,k} f_{j+1,l} W_{ij}`.
    pub fn rhs_genus(&self, g: u32, lower: &[FreeEnergy]) -> Result<ThetaPoly, SolveError> {
        self.check_lower(g, lower)?;
        if g == 1 {
            return Ok(genus_one_source());
        }
        let n = unknowns(g - 1);
        let w = self.quadratic_kernel(g, lower);
        let f = self.table.f_jets();
        // U[k][j] = Σ_i f_{i+1,k} W_{ij}
        let u: Vec<Vec<JetPoly>> = (1..=n)
            .into_par_iter()
            .map(|k| {
                (0..n)
                    .map(|j| {
                        let mut acc = JetPoly::zero();
                        for (i, wi) in w.iter().enumerate().skip(k - 1) {
                            let fk = f.get(i + 1, k);
                            if !fk.is_zero() && !wi[j].is_zero() {
                                acc.add_product(fk, &wi[j]);
                            }
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|k| (1..=n).map(move |l| (k, l))).collect();
        let pieces: Vec<ThetaPoly> = pairs
            .par_iter()
            .map(|&(k, l)| {
                let mut y = JetPoly::zero();
                for (j, ukj) in u[k - 1].iter().enumerate().skip(l - 1) {
                    let fl = f.get(j + 1, l);
                    if !fl.is_zero() && !ukj.is_zero() {
                        y.add_product(fl, ukj);
                    }
                }
                if y.is_zero() {
                    ThetaPoly::zero()
                } else {
                    self.table.ptilde(k, l).scale_jet(&y)
                }
            })
            .collect();
        let mut quad = ThetaPoly::zero();
        for p in &pieces {
            quad.add_assign(p);
        }
        let mut rhs = self.linear_part(g, lower);
        rhs.add_assign(&quad.scale(&Rational::new(1, 2)));
        Ok(rhs)
    }

    /// The same right-hand side summed directly over dressed `P_{i+1,j+1}`.
    pub fn rhs_genus_direct(&self, g: u32, lower: &[FreeEnergy]) -> Result<ThetaPoly, SolveError> {
        self.check_lower(g, lower)?;
        if g == 1 {
            return Ok(genus_one_source());
        }
        let n = unknowns(g - 1);
        let w = self.quadratic_kernel(g, lower);
        let pieces: Vec<ThetaPoly> = (0..n * n)
            .into_par_iter()
            .map(|ij| {
                let (i, j) = (ij / n, ij % n);
                if w[i][j].is_zero() {
                    ThetaPoly::zero()
                } else {
                    self.table.p_dressed(i + 1, j + 1).scale_jet(&w[i][j])
                }
            })
            .collect();
        let mut quad = ThetaPoly::zero();
        for p in &pieces {
            quad.add_assign(p);
        }
        let mut rhs = self.linear_part(g, lower);
        rhs.add_assign(&quad.scale(&Rational::new(1, 2)));
        Ok(rhs)
    }

    /// `Σ_i lhs_i · a_i`.
    pub fn apply_lhs(&self, gradient: &[JetPoly]) -> ThetaPoly {
        let parts: Vec<ThetaPoly> = gradient
            .par_iter()
            .enumerate()
            .map(|(i, a)| if a.is_zero() { ThetaPoly::zero() } else { self.lhs_coefficient(i).scale_jet(a) })
            .collect();
        let mut acc = ThetaPoly::zero();
        for p in &parts {
            acc.add_assign(p);
        }
        acc
    }

    /// The `ε^{2g−2}` coefficient of (left side − right side), with the
    /// right side summed over dressed entries (independent of the solve path).
    pub fn residual(&self, g: u32, energies: &[FreeEnergy]) -> Result<ThetaPoly, SolveError> {
        let lower = &energies[..g as usize - 1];
        let rhs = self.rhs_genus_direct(g, lower)?;
        let lhs = self.apply_lhs(&energies[g as usize - 1].gradient);
        Ok(&lhs - &rhs)
    }

    /// Build and solve the triangular system for `∂H_g/∂z_i`, `i ≤ 3g−2`.
    pub fn solve_gradient(&self, g: u32, lower: &[FreeEnergy]) -> Result<Vec<JetPoly>, SolveError> {
        let rhs = self.rhs_genus(g, lower)?;
        let n = unknowns(g);
        let lhs: Vec<&ThetaPoly> = (0..n).into_par_iter().map(|i| self.lhs_coefficient(i)).collect();
        let entries: Vec<Vec<JetPoly>> =
            (1..=n).map(|a| lhs.iter().map(|l| l.coeff(a)).collect()).collect();
        let b: Vec<JetPoly> = (1..=n).map(|a| rhs.coeff(a)).collect();
        let sys = TriangularSystem::new(entries, b)?;
        let x = sys.solve()?;
        // Every Θ-row, including Θ⁰ and those above 3g−1, must balance.
        let res = &self.apply_lhs(&x) - &rhs;
        if let Some(power) = res.coeffs().iter().position(|c| !c.is_zero()) {
            return Err(SolveError::Residual { g, power });
        }
        Ok(x)
    }

    pub fn solve_genus(&self, g: u32, lower: &[FreeEnergy]) -> Result<FreeEnergy, SolveError> {
        let start = Instant::now();
        let gradient = self.solve_gradient(g, lower)?;
        let (body, z0_anomaly) = reconstruct(g, &gradient)?;
        Ok(FreeEnergy {
            genus: g,
            gradient,
            body,
            provenance: Provenance {
                solver_version: SOLVER_VERSION.to_string(),
                ptable_hash: self.ptable_hash(g),
                wall_time_ms: start.elapsed().as_millis() as u64,
                z0_anomaly,
            },
        })
    }

    /// `H_1, …, H_{g_max}` from scratch.
    pub fn solve_all(&self) -> Result<Vec<FreeEnergy>, SolveError> {
        let mut out = Vec::new();
        for g in 1..=self.g_max {
            let h = self.solve_genus(g, &out)?;
            out.push(h);
        }
        Ok(out)
    }
}

/// `∫ p dz₀`, term by term.
fn integrate_z0(p: &JetPoly) -> JetPoly {
    JetPoly::from_terms(p.terms().map(|(m, c)| {
        let e = m.exponent(0) + 1;
        let mut exps = m.exponents().to_vec();
        if exps.is_empty() {
            exps.push(0);
        }
        exps[0] = e;
        (JetMono::from_exponents(&exps).expect("z0 exponent positive"), c.scale(&Rational::new(1, e as i64)))
    }))
}

/// Symmetric cross-partials `∂a_i/∂z_j = ∂a_j/∂z_i`.
pub fn check_closed(g: u32, gradient: &[JetPoly]) -> Result<(), SolveError> {
    let n = gradient.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let bad = pairs.par_iter().find_first(|&&(i, j)| gradient[i].partial(j) != gradient[j].partial(i));
    match bad {
        Some(&(i, j)) => Err(SolveError::Integrability { g, i, j }),
        None => Ok(()),
    }
}

/// Recover `H_g` from its gradient.
///
/// Genus one must be `(c₀, c₁/z₁)` with `c₀` jet-free, giving
/// `c₁ log z₁ + c₀ z₀`. For `g ≥ 2` the Euler identity
/// `Σ j z_j ∂H/∂z_j = (2g−2)H` fixes `H` with no free constant. Returns the
/// body and whether the `z₀` fallback was used.
pub fn reconstruct(g: u32, gradient: &[JetPoly]) -> Result<(FreeEnergyBody, bool), SolveError> {
    check_closed(g, gradient)?;
    if g == 0 {
        return Err(SolveError::GenusZero);
    }
    if g == 1 {
        let c0 = gradient.first().and_then(JetPoly::as_sigma).ok_or(SolveError::GenusOneShape)?;
        let a1 = gradient.get(1).cloned().unwrap_or_default();
        let (m, c1) = a1.as_single_term().ok_or(SolveError::GenusOneShape)?;
        if *m != JetMono::var_pow(1, -1) || !c1.is_constant() || gradient.iter().skip(2).any(|a| !a.is_zero()) {
            return Err(SolveError::GenusOneShape);
        }
        let poly = integrate_z0(&JetPoly::constant(c0));
        return Ok((FreeEnergyBody::GenusOne { log_z1: c1.constant_term(), poly }, false));
    }
    let mut body = JetPoly::zero();
    for (j, a) in gradient.iter().enumerate().skip(1) {
        if !a.is_zero() {
            body.add_assign(&(&JetPoly::var(j) * a).scale(&Rational::from_int(j as i64)));
        }
    }
    body = body.scale(&Rational::new(1, 2 * g as i64 - 2));
    let z0_anomaly = !gradient[0].is_zero();
    if z0_anomaly {
        let missing = &gradient[0] - &body.partial(0);
        body.add_assign(&integrate_z0(&missing));
    }
    for (i, a) in gradient.iter().enumerate() {
        if body.partial(i) != *a {
            return Err(SolveError::GradientMismatch { g, i });
        }
    }
    if body.max_index().is_some_and(|k| k >= gradient.len()) {
        return Err(SolveError::GradientMismatch { g, i: gradient.len() });
    }
    check_gradings(g, &body)?;
    Ok((FreeEnergyBody::Higher(body), z0_anomaly))
}

/// `deg z_j = j` gives `2g−2`; `deg z_j = j−1`, `deg σ₁ = 1`, `deg σ₃ = 3` gives `3g−3`.
pub fn check_gradings(g: u32, body: &JetPoly) -> Result<(), SolveError> {
    if body.is_zero() {
        return Ok(());
    }
    if body.jet_weight() != Some(2 * g as i32 - 2) {
        return Err(SolveError::Grading { g, which: "jet (deg z_j = j)" });
    }
    if body.dimension_weight() != Some(3 * g as i32 - 3) {
        return Err(SolveError::Grading { g, which: "dimension (deg z_j = j-1)" });
    }
    Ok(())
}

/// `Σ_j j z_j ∂H/∂z_j − (2g−2) H`.
pub fn euler_defect(g: u32, body: &JetPoly) -> JetPoly {
    let mut acc = JetPoly::zero();
    if let Some(top) = body.max_index() {
        for j in 1..=top {
            acc.add_assign(&(&JetPoly::var(j) * &body.partial(j)).scale(&Rational::from_int(j as i64)));
        }
    }
    &acc - &body.scale(&Rational::from_int(2 * g as i64 - 2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::format::parse_jet;

    fn p(s: &str) -> JetPoly {
        parse_jet(s).unwrap()
    }

    #[test]
    fn lhs_small_columns() {
        let s = LoopSolver::new(1);
        assert_eq!(s.lhs_coefficient(0), &ThetaPoly::theta());
        let z1 = p("(3/2)*z1");
        let expect = (&ThetaPoly::theta_pow(2) - &ThetaPoly::theta()).scale_jet(&z1);
        assert_eq!(s.lhs_coefficient(1), &expect);
    }

    #[test]
    fn genus_one() {
        let s = LoopSolver::new(1);
        let h1 = s.solve_genus(1, &[]).unwrap();
        assert_eq!(h1.gradient, vec![p("(1/24)*s1"), p("(1/24)*z1^-1")]);
        assert_eq!(h1.log_z1(), Some(&Rational::new(1, 24)));
        assert_eq!(h1.polynomial(), &p("(1/24)*s1*z0"));
    }

    #[test]
    fn rejects_missing_lower() {
        let s = LoopSolver::new(2);
        assert!(matches!(s.rhs_genus(2, &[]), Err(SolveError::MissingLower { .. })));
        assert!(matches!(s.solve_genus(0, &[]), Err(SolveError::GenusZero)));
    }

    #[test]
    fn non_closed_gradient_is_rejected() {
        let err = reconstruct(2, &[p("z1"), JetPoly::zero()]).unwrap_err();
        assert!(matches!(err, SolveError::Integrability { i: 0, j: 1, .. }));
    }

    #[test]
    fn genus_two_contraction_matches_direct_sum() {
        let s = LoopSolver::new(2);
        let h1 = s.solve_genus(1, &[]).unwrap();
        let lower = vec![h1];
        assert_eq!(s.rhs_genus(2, &lower).unwrap(), s.rhs_genus_direct(2, &lower).unwrap());
        assert!(s.rhs_genus(2, &lower).unwrap().degree().unwrap() <= 7);
    }

    #[test]
    fn genus_two_body() {
        let s = LoopSolver::new(2);
        let all = s.solve_all().unwrap();
        let h2 = p("(1/1152)*z1^-2*z4 - (7/1920)*z1^-3*z2*z3 + (1/360)*z1^-4*z2^3 + (1/480)*s1*z1^-1*z3 \
                    - (11/5760)*s1*z1^-2*z2^2 + (7/5760)*s1^2*z2 + (1/17280)*s1^3*z1^2 - (1/34560)*s3*z1^2");
        assert_eq!(all[1].polynomial(), &h2);
        assert!(s.residual(2, &all).unwrap().is_zero());
        assert!(euler_defect(2, &h2).is_zero());
    }
}
