//! Direct `B̃_{i,j}` in the rational case from the `A_{k,n}` sums, and the
//! identities tying them to `P̃_{i,j}` at specialized `σ`.

use std::fmt;

use rayon::prelude::*;

use super::{RationalParams, VTable, VirasoroError};
use crate::algebra::{Rational, ThetaPoly};
use crate::phi::sqrt_shift_ratio;
use crate::ptensor::{ptilde11_closed_form, PTensorTable};

/// First coefficient at which two exact series disagree.
#[derive(Debug, Clone, PartialEq)]
pub struct BridgeMismatch {
    pub what: String,
    pub i: usize,
    pub j: usize,
    pub order: usize,
    pub expected: Rational,
    pub got: Rational,
}

impl fmt::Display for BridgeMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ({}, {}) at xi^{}: expected {}, got {}",
            self.what, self.i, self.j, self.order, self.expected, self.got
        )
    }
}

fn first_mismatch(what: &str, i: usize, j: usize, expected: &[Rational], got: &[Rational]) -> Result<(), BridgeMismatch> {
    for (n, (e, g)) in expected.iter().zip(got).enumerate() {
        if e != g {
            return Err(BridgeMismatch { what: what.into(), i, j, order: n, expected: e.clone(), got: g.clone() });
        }
    }
    Ok(())
}

/// `A_{k,n}`, the `ζⁿ` coefficient of `B̃_{0,k}`; every product of two `c`'s
/// goes through [`VTable::c_pair`] or [`VTable::c_ratio`].
pub fn a_coefficient(vt: &VTable, k: u32, n: i64) -> Result<Rational, VirasoroError> {
    let p = vt.params();
    let h = p.h();
    let pow = |b: Rational| b.pow(k as i32);
    let mut acc = Rational::zero();
    if n == 0 {
        return Ok(if k == 0 { Rational::one() } else { Rational::zero() });
    }
    for ell in 1..n {
        acc += &(pow(Rational::from_int(ell)) * vt.c_pair(0, ell, 0, n - ell)?);
    }
    // ℓ = n pairs c_{hn} with c_0 = 1.
    let c_hn = vt.c_ratio(0, n)?;
    acc += &(pow(Rational::from_int(n)) * &c_hn);
    if k == 0 {
        acc += &c_hn;
    }
    for alpha in p.index_set_star() {
        let beta = if alpha > 0 { p.k1() - alpha } else { -alpha - p.k2() };
        let g = p.g(alpha, beta);
        for ell in 0..n {
            let b = p.b(alpha + h * ell)?;
            acc += &(&g * pow(b) * vt.c_pair(alpha, ell, beta, n - 1 - ell)?);
        }
    }
    Ok(acc)
}

/// `B̃_{0,k}` as a `ξ = Kζ` series to `ξ^{order}`: coefficients `A_{k,n}/Kⁿ`.
pub fn btilde_direct(vt: &VTable, k: u32, order: usize) -> Result<Vec<Rational>, VirasoroError> {
    let kk = vt.params().big_k().clone();
    (0..=order as i64)
        .into_par_iter()
        .map(|n| a_coefficient(vt, k, n).map(|a| a / kk.pow(n as i32)))
        .collect()
}

/// `rows[i][j]` for `i + j ≤ ij_max`, via `B̃_{i+1,j} = ξ∂_ξ B̃_{i,j} − B̃_{i,j+1}`.
pub fn btilde_table(vt: &VTable, ij_max: usize, order: usize) -> Result<Vec<Vec<Vec<Rational>>>, VirasoroError> {
    let row0 = (0..=ij_max as u32).map(|k| btilde_direct(vt, k, order)).collect::<Result<Vec<_>, _>>()?;
    let mut rows = vec![row0];
    for i in 0..ij_max {
        let prev = &rows[i];
        let next = (0..ij_max - i)
            .map(|j| {
                prev[j]
                    .iter()
                    .zip(&prev[j + 1])
                    .enumerate()
                    .map(|(n, (a, b))| Rational::from_int(n as i64) * a - b)
                    .collect()
            })
            .collect();
        rows.push(next);
    }
    Ok(rows)
}

/// A jet-free `Θ`-polynomial at the rational-case `σ`, as a `ξ`-series.
fn specialized_xi(p: &ThetaPoly, params: &RationalParams, order: usize) -> Vec<Rational> {
    let (s1, s3) = params.sigma();
    p.to_xi_series(order).expect("jet-free").iter().map(|c| c.eval(&s1, &s3)).collect()
}

/// `B̃_{i,j}` against `P̃_{i,j}` at specialized `σ`, every `i + j ≤ ij_max`.
pub fn bridge_check(vt: &VTable, table: &PTensorTable, ij_max: usize, order: usize) -> Result<(), BridgeMismatch> {
    let rows = btilde_table(vt, ij_max, order).expect("indices in range");
    for (i, row) in rows.iter().enumerate() {
        for (j, b) in row.iter().enumerate() {
            let expected = specialized_xi(table.ptilde(i, j), vt.params(), order);
            first_mismatch("bridge", i, j, &expected, b)?;
        }
    }
    Ok(())
}

/// `B̃_{1,1}` against `¼Θ³ − (3/8 − σ₁/12)Θ² + (1/8 − σ₁/12)Θ`.
pub fn btilde11_closed_form_check(vt: &VTable, order: usize) -> Result<(), BridgeMismatch> {
    let rows = btilde_table(vt, 2, order).expect("indices in range");
    let expected = specialized_xi(&ptilde11_closed_form(), vt.params(), order);
    first_mismatch("closed form", 1, 1, &expected, &rows[1][1])
}

/// `∫ B̃_{1,1} dξ/ξ` against `1/(8(1−ξ)²) − (1/8 − σ₁/12)/(1−ξ)` minus its
/// value at `ξ = 0`.
pub fn integral_identity_check(vt: &VTable, order: usize) -> Result<(), BridgeMismatch> {
    let rows = btilde_table(vt, 2, order).expect("indices in range");
    let b11 = &rows[1][1];
    let (s1, _) = vt.params().sigma();
    let c = Rational::new(1, 8) - &s1 / Rational::from_int(12);
    // a_0 must vanish for dξ/ξ to integrate; the lower limit removes F(0) = σ₁/12.
    let mut expected = vec![Rational::zero()];
    let mut got = vec![b11[0].clone()];
    for (n, a) in b11.iter().enumerate().skip(1) {
        let nn = Rational::from_int(n as i64);
        expected.push(Rational::new(1, 8) * (&nn + Rational::one()) - &c);
        got.push(a / &nn);
    }
    first_mismatch("integral", 1, 1, &expected, &got)
}

/// Expansion of `V₁` at infinity against `√z Φ(z) / (√(z−1) Φ(z−1))` at
/// specialized `σ`, through `z^{−order}`.
pub fn v_asymptotics_check(vt: &VTable, order: usize) -> Result<(), BridgeMismatch> {
    let params = vt.params();
    let (s1, s3) = params.sigma();
    let (d, got) = vt.get(1).expect("V_1").expand_at_infinity(order);
    assert_eq!(d, 0, "V_1 tends to 1 at infinity");
    let series = sqrt_shift_ratio(1, order as i32);
    let expected: Vec<Rational> =
        (0..=order as i32).map(|n| series.coeff(n).expect("within order").eval(&s1, &s3)).collect();
    first_mismatch("V_1 at infinity", 1, 0, &expected, &got)
}
