//! The loop-equation coefficient functions `P̃_{i,j}(Θ)` and their jet
//! dressings `P_{i,j} = Σ f_{i,k} f_{j,l} P̃_{k,l}`.

use std::sync::OnceLock;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::algebra::format::{jet_to_text, sigma_to_json};
use crate::algebra::{double_factorial, factorial, JetPoly, Rational, SigmaPoly, ThetaPoly};
use crate::bell::FJetTable;
use crate::phi::{q_polynomial, sqrt_shift_ratio, PhiCache};

/// `(−1)^{n−m} (2n−2m−1)!! / (2^{n−m} m! (n−m)!)`.
fn row0_weight(n: usize, m: usize) -> Rational {
    let d = (n - m) as i64;
    let sign = if d % 2 == 0 { 1 } else { -1 };
    let num = double_factorial(2 * d - 1) * Rational::from_int(sign);
    let den = Rational::from_int(2).pow(d as i32) * factorial(m as u32) * factorial(d as u32);
    num / den
}

/// `P̃_{0,n}` for `n ≤ n_max`, assembled from `Σ_n T_n(Θ) Σ_m c_{n,m} z^{m−n} Φ∂ᵐ(1/Φ)`
/// with `T_n = Σ_k Q(n,k) Θ^k`.
pub fn ptilde_row0(n_max: usize) -> Vec<ThetaPoly> {
    let phi = PhiCache::new(n_max, n_max as i32);
    let t: Vec<ThetaPoly> = (0..=n_max).map(q_polynomial).collect();
    (0..=n_max)
        .into_par_iter()
        .map(|big_n| {
            let mut acc = ThetaPoly::zero();
            for (n, tn) in t.iter().enumerate().take(big_n + 1) {
                let mut c = SigmaPoly::zero();
                for m in 0..=n {
                    let coeff = phi.get(m).coeff((big_n - n + m) as i32).expect("cache order covers n_max");
                    if !coeff.is_zero() {
                        c.add_assign(&coeff.scale(&row0_weight(n, m)));
                    }
                }
                if !c.is_zero() {
                    acc.add_assign(&tn.scale_sigma(&c));
                }
            }
            acc
        })
        .collect()
}

/// Cached `P̃_{i,j}` for `i + j ≤ n_max` and lazily dressed `P_{i,j}`.
#[derive(Debug)]
pub struct PTensorTable {
    n_max: usize,
    /// `rows[i][j]` for `i + j ≤ n_max`.
    rows: Vec<Vec<ThetaPoly>>,
    f: FJetTable,
    dressed: Vec<Vec<OnceLock<ThetaPoly>>>,
}

impl PTensorTable {
    pub fn new(n_max: usize) -> Self {
        let mut rows = vec![ptilde_row0(n_max)];
        for i in 0..n_max {
            let prev = &rows[i];
            let next: Vec<ThetaPoly> = (0..n_max - i)
                .into_par_iter()
                .map(|j| &prev[j].xi_euler() - &prev[j + 1])
                .collect();
            rows.push(next);
        }
        let dressed = (0..=n_max).map(|_| (0..=n_max).map(|_| OnceLock::new()).collect()).collect();
        PTensorTable { n_max, rows, f: FJetTable::new(n_max), dressed }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn f_jets(&self) -> &FJetTable {
        &self.f
    }

    /// `P̃_{i,j}`; panics if `i + j > n_max`.
    pub fn ptilde(&self, i: usize, j: usize) -> &ThetaPoly {
        assert!(i + j <= self.n_max, "P̃({i},{j}) beyond table bound {}", self.n_max);
        &self.rows[i][j]
    }

    /// `P_{i,j} = Σ_{k≤i} Σ_{l≤j} f_{i,k} f_{j,l} P̃_{k,l}`.
    pub fn p_dressed(&self, i: usize, j: usize) -> &ThetaPoly {
        self.dressed[i][j].get_or_init(|| {
            let mut acc = ThetaPoly::zero();
            for k in 0..=i {
                let fk = self.f.get(i, k);
                if fk.is_zero() {
                    continue;
                }
                for l in 0..=j {
                    let fl = self.f.get(j, l);
                    if fl.is_zero() {
                        continue;
                    }
                    acc.add_scaled_jet(self.ptilde(k, l), &(fk * fl));
                }
            }
            acc
        })
    }

    /// SHA-256 over the canonical text of `P̃_{0,0}, …, P̃_{0,n}`.
    pub fn row0_hash(&self, n: usize) -> String {
        let mut h = Sha256::new();
        h.update(b"ptilde-row0/v1\n");
        for p in &self.rows[0][..=n.min(self.n_max)] {
            for c in p.coeffs() {
                h.update(jet_to_text(c).as_bytes());
                h.update(b";");
            }
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }

    /// Diagnostic dump of `P̃` in the JSON polynomial form.
    pub fn to_json(&self) -> serde_json::Value {
        let mut out = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            for (j, p) in row.iter().enumerate() {
                let coeffs: Vec<_> = p
                    .sigma_coeffs()
                    .expect("P̃ is jet-free")
                    .iter()
                    .map(|c| serde_json::to_value(sigma_to_json(c)).expect("serializable"))
                    .collect();
                out.push(serde_json::json!({ "i": i, "j": j, "theta": coeffs }));
            }
        }
        serde_json::Value::Array(out)
    }
}

/// `ξ`-expansion of `√z Φ(z) (1 − ξe^{−∂_z})^{−1} (1/(√z Φ(z)))` at `z^{−n}`, to `ξ^{order}`.
pub fn row0_xi_oracle(n: usize, order: usize) -> Vec<SigmaPoly> {
    (0..=order)
        .into_par_iter()
        .map(|j| sqrt_shift_ratio(j as i64, n as i32).coeff(n as i32).expect("within order"))
        .collect()
}

/// Whether a `Θ`-polynomial of dressed entries has jets only up to `z_bound`.
pub fn jets_bounded(p: &ThetaPoly, bound: usize) -> bool {
    p.coeffs().iter().all(|c| c.max_index().is_none_or(|k| k <= bound))
}

/// `P̃_{1,1}` in closed form: `Θ³/4 − (3/8 − σ₁/12)Θ² + (1/8 − σ₁/12)Θ`.
pub fn ptilde11_closed_form() -> ThetaPoly {
    let s1_12 = SigmaPoly::s1().scale(&Rational::new(1, 12));
    ThetaPoly::from_sigma(vec![
        SigmaPoly::zero(),
        &SigmaPoly::constant(Rational::new(1, 8)) - &s1_12,
        &s1_12 - &SigmaPoly::constant(Rational::new(3, 8)),
        SigmaPoly::constant(Rational::new(1, 4)),
    ])
}

/// Every coefficient is homogeneous of the given weight under `deg z_j = j`.
pub fn dressed_is_jet_homogeneous(p: &ThetaPoly, weight: i32) -> bool {
    p.coeffs().iter().all(|c: &JetPoly| c.is_zero() || c.jet_weight() == Some(weight))
}
