//! Triangular linear systems over the jet-polynomial ring.

use rayon::prelude::*;

use super::{AlgebraError, JetPoly};

/// A square system whose rows are indexed by `Θ`-powers `1..=n` and whose
/// columns are the unknowns `0..n`.
///
/// Row `a` only involves unknowns `i ≥ a − 1`, and the pivot `(a, a − 1)` is
/// nonzero, so the system is solved by back-substitution from row `n`.
#[derive(Clone, Debug)]
pub struct TriangularSystem {
    n: usize,
    /// `entries[a - 1][i]` is the coefficient of unknown `i` in row `a`.
    entries: Vec<Vec<JetPoly>>,
    rhs: Vec<JetPoly>,
}

impl TriangularSystem {
    pub fn new(entries: Vec<Vec<JetPoly>>, rhs: Vec<JetPoly>) -> Result<Self, AlgebraError> {
        let n = rhs.len();
        if entries.len() != n || entries.iter().any(|row| row.len() != n) {
            return Err(AlgebraError::InvalidSystem(format!("expected a {n}x{n} matrix")));
        }
        for (r, row) in entries.iter().enumerate() {
            let a = r + 1;
            for (i, e) in row.iter().enumerate() {
                if a > i + 1 && !e.is_zero() {
                    return Err(AlgebraError::InvalidSystem(format!(
                        "entry (row {a}, unknown {i}) below the triangle is nonzero"
                    )));
                }
            }
            if row[r].is_zero() {
                return Err(AlgebraError::InvalidSystem(format!("zero pivot in row {a}")));
            }
        }
        Ok(TriangularSystem { n, entries, rhs })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, row: usize, unknown: usize) -> &JetPoly {
        &self.entries[row - 1][unknown]
    }

    pub fn rhs(&self) -> &[JetPoly] {
        &self.rhs
    }

    /// Exact back-substitution from the highest row.
    ///
    /// Every pivot must be a single term (monomial times a `σ`-polynomial);
    /// each division must be exact.
    pub fn solve(&self) -> Result<Vec<JetPoly>, AlgebraError> {
        let mut x = vec![JetPoly::zero(); self.n];
        for a in (1..=self.n).rev() {
            let row = &self.entries[a - 1];
            let known: Vec<JetPoly> = (a..self.n)
                .into_par_iter()
                .map(|i| if row[i].is_zero() { JetPoly::zero() } else { &row[i] * &x[i] })
                .collect();
            let mut residual = self.rhs[a - 1].clone();
            for t in &known {
                residual.sub_assign(t);
            }
            let (m, c) = row[a - 1]
                .as_single_term()
                .ok_or(AlgebraError::NonMonomialPivot { row: a })?;
            x[a - 1] =
                residual.div_term(m, c).ok_or(AlgebraError::NonExactDivision { row: a })?;
        }
        if self.apply(&x) != self.rhs {
            return Err(AlgebraError::InvalidSystem("solution does not reproduce the right-hand side".into()));
        }
        Ok(x)
    }

    /// Matrix-vector product `M·x`, one entry per row.
    pub fn apply(&self, x: &[JetPoly]) -> Vec<JetPoly> {
        self.entries
            .par_iter()
            .map(|row| {
                let mut acc = JetPoly::zero();
                for (e, xi) in row.iter().zip(x) {
                    if !e.is_zero() {
                        acc.add_product(e, xi);
                    }
                }
                acc
            })
            .collect()
    }
}
