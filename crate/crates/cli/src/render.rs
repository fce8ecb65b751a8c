//! Text, JSON and LaTeX renderings of command results.

use serde_json::{json, Value};

use cubic_hodge::algebra::format::{jet_to_json, jet_to_latex, jet_to_text, rational_to_json, sigma_to_json, sigma_to_text};
use cubic_hodge::hodge::{TMono, TSeries};
use cubic_hodge::loop_solver::FreeEnergy;
use cubic_hodge::{JetPoly, Rational, SigmaPoly};

fn signed(c: &Rational, body: &str) -> String {
    if c.is_negative() {
        format!("-({})*{body}", c.abs())
    } else {
        format!("({c})*{body}")
    }
}

/// `H_g` in canonical text; genus one leads with its `log z1` term.
pub fn energy_text(e: &FreeEnergy) -> String {
    let poly = e.polynomial();
    match e.log_z1() {
        Some(c) if !c.is_zero() => {
            let head = signed(c, "log(z1)");
            if poly.is_zero() {
                head
            } else {
                let tail = jet_to_text(poly);
                match tail.strip_prefix('-') {
                    Some(rest) => format!("{head} - {rest}"),
                    None => format!("{head} + {tail}"),
                }
            }
        }
        _ => jet_to_text(poly),
    }
}

pub fn energy_json(e: &FreeEnergy) -> Value {
    json!({
        "genus": e.genus,
        "log_z1": e.log_z1().map(rational_to_json),
        "terms": jet_to_json(e.polynomial()),
        "solver_version": e.provenance.solver_version,
        "ptable_hash": e.provenance.ptable_hash,
    })
}

pub fn energy_latex(e: &FreeEnergy) -> String {
    let poly = jet_to_latex(e.polynomial());
    match e.log_z1() {
        Some(c) if !c.is_zero() => {
            let head = format!("\\frac{{{}}}{{{}}}\\log z_1", c.numer(), c.denom());
            if e.polynomial().is_zero() {
                head
            } else if let Some(rest) = poly.strip_prefix('-') {
                format!("{head} - {rest}")
            } else {
                format!("{head} + {poly}")
            }
        }
        _ => poly,
    }
}

pub fn sigma_text(p: &SigmaPoly) -> String {
    sigma_to_text(p)
}

pub fn sigma_json(p: &SigmaPoly) -> Value {
    serde_json::to_value(sigma_to_json(p)).expect("serializable")
}

pub fn sigma_latex(p: &SigmaPoly) -> String {
    jet_to_latex(&JetPoly::constant(p.clone()))
}

pub fn tmono_text(m: &TMono) -> String {
    let parts: Vec<String> = m
        .exponents()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(k, &e)| if e == 1 { format!("t{k}") } else { format!("t{k}^{e}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn tmono_latex(m: &TMono) -> String {
    let parts: Vec<String> = m
        .exponents()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(k, &e)| if e == 1 { format!("t_{{{k}}}") } else { format!("t_{{{k}}}^{{{e}}}") })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

/// One line per nonzero coefficient, in monomial order.
pub fn series_text(s: &TSeries) -> String {
    s.terms().filter(|(_, c)| !c.is_zero()).map(|(m, c)| format!("{}: {}\n", tmono_text(m), sigma_text(c))).collect()
}

pub fn series_json(s: &TSeries) -> Value {
    Value::Array(
        s.terms()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| {
                let t: serde_json::Map<String, Value> = m
                    .exponents()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(k, &e)| (format!("t{k}"), json!(e)))
                    .collect();
                json!({ "t": t, "coef": sigma_json(c) })
            })
            .collect(),
    )
}

pub fn series_latex(s: &TSeries) -> String {
    s.terms()
        .filter(|(_, c)| !c.is_zero())
        .map(|(m, c)| format!("{} & {} \\\\\n", tmono_latex(m), sigma_latex(c)))
        .collect()
}
