//! Command dispatch. Every command returns its primary output as a string so
//! that runs are byte-comparable; notes (cache activity) go to stderr.

use std::ffi::OsString;
use std::time::Instant;

use clap::Parser;
use serde_json::json;

use cubic_hodge::algebra::format::{jet_to_text, sigma_to_text};
use cubic_hodge::bell::{BellTable, FJetTable};
use cubic_hodge::hodge::{
    dimension_check, faber_leading, first_flow_check, h1_gap_check, h1_log_x_coefficient, hodge_expand, r_poly,
};
use cubic_hodge::loop_solver::{check_closed, check_gradings, euler_defect, jet_cutoff, FreeEnergy, LoopSolver};
use cubic_hodge::phi::{power_sum, q_polynomial, sigma_of_triple};
use cubic_hodge::ptensor::{ptilde_row0, row0_xi_oracle};
use cubic_hodge::virasoro::{
    a_coefficient, bridge_check, btilde11_closed_form_check, commutator_grid, integral_identity_check,
    v_asymptotics_check, RationalParams, VTable,
};
use cubic_hodge::{Rational, SigmaPoly};

use crate::cache::{GenusCache, Lookup};
use crate::config::{Cli, CommandKind, Format, RunConfig, Suite};
use crate::render;

/// Exit code and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { code: 2, kind: "usage".into(), message: message.into() }
    }

    pub fn internal(kind: &str, message: impl Into<String>) -> Self {
        CliError { code: 1, kind: kind.into(), message: message.into() }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.kind, "message": self.message }).to_string()
    }
}

fn solve_err(e: impl std::fmt::Display) -> CliError {
    CliError::internal("solve", e.to_string())
}

fn hodge_err(e: impl std::fmt::Display) -> CliError {
    CliError::internal("hodge", e.to_string())
}

fn virasoro_err(e: impl std::fmt::Display) -> CliError {
    CliError::internal("virasoro", e.to_string())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run_config(&RunConfig::from(cli)),
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            if e.use_stderr() {
                Outcome { code, stdout: String::new(), stderr: text }
            } else {
                Outcome { code, stdout: text, stderr: String::new() }
            }
        }
    }
}

pub fn run_config(cfg: &RunConfig) -> Outcome {
    let mut notes = String::new();
    let result = match cfg.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cfg, &mut notes)),
            Err(e) => Err(CliError::internal("threads", e.to_string())),
        },
        None => dispatch(cfg, &mut notes),
    };
    match result {
        Ok((stdout, code)) => Outcome { code, stdout, stderr: notes },
        Err(e) => Outcome { code: e.code, stdout: String::new(), stderr: format!("{notes}{}\n", e.to_json()) },
    }
}

fn dispatch(cfg: &RunConfig, notes: &mut String) -> Result<(String, i32), CliError> {
    if cfg.genus < 1 {
        return Err(CliError::usage("genus must be at least 1"));
    }
    match cfg.command {
        CommandKind::Compute => cmd_compute(cfg, notes).map(|s| (s, 0)),
        CommandKind::Rg => cmd_rg(cfg, notes).map(|s| (s, 0)),
        CommandKind::Hodge => cmd_hodge(cfg, notes).map(|s| (s, 0)),
        CommandKind::Verify => cmd_verify(cfg, notes),
        CommandKind::Virasoro => cmd_virasoro(cfg),
    }
}

/// `H_1..H_G`, resuming from and refreshing the cache.
pub fn solve_energies(cfg: &RunConfig, notes: &mut String) -> Result<(LoopSolver, Vec<FreeEnergy>), CliError> {
    let g_max = cfg.genus;
    let solver = LoopSolver::with_cutoff(g_max, cfg.jet_cutoff.unwrap_or_else(|| jet_cutoff(g_max))).map_err(solve_err)?;
    let cache = cfg.cache_dir.as_deref().map(GenusCache::open).transpose()?;
    let mut energies: Vec<FreeEnergy> = Vec::new();
    for g in 1..=g_max {
        let hash = solver.ptable_hash(g);
        if let Some(c) = &cache {
            match c.load(g, &hash) {
                Lookup::Hit(e) => {
                    energies.push(e);
                    continue;
                }
                Lookup::Miss => {}
                Lookup::Rejected(why) => notes.push_str(&format!("cache: recomputing genus {g}: {why}\n")),
            }
        }
        let e = solver.solve_genus(g, &energies).map_err(solve_err)?;
        if let Some(c) = &cache {
            c.store(&e)?;
        }
        energies.push(e);
    }
    Ok((solver, energies))
}

fn emit_json(v: serde_json::Value) -> String {
    serde_json::to_string_pretty(&v).expect("serializable") + "\n"
}

pub fn cmd_compute(cfg: &RunConfig, notes: &mut String) -> Result<String, CliError> {
    let (_, energies) = solve_energies(cfg, notes)?;
    let h = energies.last().expect("genus >= 1");
    Ok(match cfg.format {
        Format::Text => render::energy_text(h) + "\n",
        Format::Json => emit_json(render::energy_json(h)),
        Format::Latex => render::energy_latex(h) + "\n",
    })
}

pub fn cmd_rg(cfg: &RunConfig, notes: &mut String) -> Result<String, CliError> {
    let (_, energies) = solve_energies(cfg, notes)?;
    let h = energies.last().expect("genus >= 1");
    if cfg.genus == 1 {
        let c = h1_log_x_coefficient(h).map_err(hodge_err)?;
        return Ok(match cfg.format {
            Format::Text => format!("({})*log(x)\n", sigma_to_text(&c)),
            Format::Json => emit_json(json!({ "genus": 1, "log_x": render::sigma_json(&c) })),
            Format::Latex => format!("\\left({}\\right)\\log x\n", render::sigma_latex(&c)),
        });
    }
    let r = r_poly(h).map_err(hodge_err)?;
    Ok(match cfg.format {
        Format::Text => render::sigma_text(&r) + "\n",
        Format::Json => emit_json(json!({ "genus": cfg.genus, "terms": render::sigma_json(&r) })),
        Format::Latex => render::sigma_latex(&r) + "\n",
    })
}

pub fn cmd_hodge(cfg: &RunConfig, notes: &mut String) -> Result<String, CliError> {
    let (_, energies) = solve_energies(cfg, notes)?;
    let h = energies.last().expect("genus >= 1");
    let s = hodge_expand(h, cfg.n_max, cfg.d_max).map_err(hodge_err)?;
    Ok(match cfg.format {
        Format::Text => render::series_text(&s),
        Format::Json => emit_json(json!({ "genus": cfg.genus, "n_max": cfg.n_max, "d_max": cfg.d_max, "coefficients": render::series_json(&s) })),
        Format::Latex => render::series_latex(&s),
    })
}

/// Result of one verification suite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub detail: String,
}

fn report(suite: Suite, failure: Option<String>, ok: String) -> SuiteReport {
    match failure {
        Some(detail) => SuiteReport { suite, passed: false, detail },
        None => SuiteReport { suite, passed: true, detail: ok },
    }
}

pub fn run_suites(cfg: &RunConfig, notes: &mut String) -> Result<Vec<SuiteReport>, CliError> {
    let needs_solve = cfg.suites.iter().any(|s| {
        matches!(
            s,
            Suite::LoopResidual | Suite::Closure | Suite::Grading | Suite::HodgeDimension | Suite::FirstFlow | Suite::Gap | Suite::Faber
        )
    });
    let solved = if needs_solve { Some(solve_energies(cfg, notes)?) } else { None };
    let g_max = cfg.genus;
    let mut out = Vec::new();
    for &suite in &cfg.suites {
        let r = match suite {
            Suite::LoopResidual => {
                let (solver, all) = solved.as_ref().expect("solved");
                let mut fail = None;
                for g in 1..=g_max {
                    let res = solver.residual(g, all).map_err(solve_err)?;
                    if let Some((k, c)) = res.coeffs().iter().enumerate().find(|(_, c)| !c.is_zero()) {
                        fail = Some(format!("genus {g}: Theta^{k} coefficient {}", jet_to_text(c)));
                        break;
                    }
                }
                report(suite, fail, format!("genus 1..{g_max}"))
            }
            Suite::Closure => {
                let (_, all) = solved.as_ref().expect("solved");
                let mut fail = None;
                for h in all.iter().skip(1) {
                    let g = h.genus;
                    if let Err(e) = check_closed(g, &h.gradient) {
                        fail = Some(e.to_string());
                    } else if !euler_defect(g, h.polynomial()).is_zero() {
                        fail = Some(format!("genus {g}: Euler defect {}", jet_to_text(&euler_defect(g, h.polynomial()))));
                    } else if !h.gradient[0].is_zero() {
                        fail = Some(format!("genus {g}: dH/dz0 = {}", jet_to_text(&h.gradient[0])));
                    }
                    if fail.is_some() {
                        break;
                    }
                }
                report(suite, fail, format!("genus 2..{g_max}"))
            }
            Suite::Grading => {
                let (_, all) = solved.as_ref().expect("solved");
                let fail = all.iter().skip(1).find_map(|h| check_gradings(h.genus, h.polynomial()).err().map(|e| e.to_string()));
                report(suite, fail, format!("genus 2..{g_max}"))
            }
            Suite::XiOracle => {
                let (n_max, order) = (8, 8);
                let row = ptilde_row0(n_max);
                let fail = row.iter().enumerate().find_map(|(n, p)| {
                    let got = p.to_xi_series(order).expect("jet-free");
                    let want = row0_xi_oracle(n, order);
                    got.iter().zip(&want).position(|(a, b)| a != b).map(|j| {
                        format!("P0,{n} at xi^{j}: {} vs {}", sigma_to_text(&got[j]), sigma_to_text(&want[j]))
                    })
                });
                report(suite, fail, format!("n <= {n_max}, xi-order {order}"))
            }
            Suite::QOracle => {
                let order = 12;
                let fail = (0..=8usize).find_map(|n| {
                    let s = q_polynomial(n).to_xi_series(order).expect("jet-free");
                    s.iter().enumerate().find_map(|(j, c)| {
                        let want = SigmaPoly::constant(Rational::from_int(-(j as i64)).pow(n as i32));
                        (*c != want).then(|| format!("T_{n} at xi^{j}: {}", sigma_to_text(c)))
                    })
                });
                report(suite, fail, format!("n <= 8, xi-order {order}"))
            }
            Suite::Bell => {
                let f = FJetTable::new(8);
                let b = BellTable::new(8);
                let fail = (0..=8).flat_map(|i| (0..=i).map(move |j| (i, j))).find_map(|(i, j)| {
                    let bell = b.partial(i, j).expect("in range");
                    (f.get(i, j) != bell).then(|| format!("f({i},{j}) = {}", jet_to_text(f.get(i, j))))
                });
                report(suite, fail, "i <= 8".into())
            }
            Suite::PowerSum => report(suite, power_sum_failure(), "odd k <= 11, two CY triples".into()),
            Suite::HodgeDimension => {
                let (_, all) = solved.as_ref().expect("solved");
                let mut fail = None;
                for h in all {
                    let s = hodge_expand(h, cfg.n_max, cfg.d_max).map_err(hodge_err)?;
                    if let Err(v) = dimension_check(h.genus, &s) {
                        fail = Some(format!("genus {}: t-indices {:?}, sigma {:?}, coefficient {}", h.genus, v.monomial, v.sigma, v.coefficient));
                        break;
                    }
                }
                report(suite, fail, format!("genus 1..{g_max}, n <= {}, degree <= {}", cfg.n_max, cfg.d_max))
            }
            Suite::FirstFlow => {
                let (_, all) = solved.as_ref().expect("solved");
                let ok = first_flow_check(&all[0], 3).map_err(hodge_err)?;
                report(suite, (!ok).then(|| "order eps^2 mismatch".to_string()), "t-degree 3".into())
            }
            Suite::Gap => {
                let (_, all) = solved.as_ref().expect("solved");
                let c = h1_log_x_coefficient(&all[0]).map_err(hodge_err)?;
                let ok = h1_gap_check(&all[0]).map_err(hodge_err)?;
                report(suite, (!ok).then(|| format!("log x coefficient {}", sigma_to_text(&c))), sigma_to_text(&c))
            }
            Suite::Faber => {
                let (_, all) = solved.as_ref().expect("solved");
                let mut fail = None;
                for h in all.iter().skip(1) {
                    let g = h.genus;
                    let top = r_poly(h).map_err(hodge_err)?.weighted_part(3 * g - 3);
                    let want = faber_leading(g).map_err(hodge_err)?;
                    if top != want {
                        fail = Some(format!("genus {g}: {} vs {}", sigma_to_text(&top), sigma_to_text(&want)));
                        break;
                    }
                }
                report(suite, fail, format!("genus 2..{g_max}"))
            }
            Suite::All => unreachable!("expanded when the config is built"),
        };
        out.push(r);
    }
    Ok(out)
}

/// Symbolic power sums against direct evaluation at `(1, 1, −1/2)` and `(2, 3, −6/5)`.
fn power_sum_failure() -> Option<String> {
    let triples: [(f64, f64, f64, Rational, Rational, Rational); 2] = [(1.0, 1.0, -0.5, Rational::one(), Rational::one(), Rational::new(-1, 2)), (
        2.0,
        3.0,
        -1.2,
        Rational::from_int(2),
        Rational::from_int(3),
        Rational::new(-6, 5),
    )];
    for (pf, qf, rf, p, q, r) in triples {
        let (s1, s3) = sigma_of_triple(&p, &q, &r);
        for k in (1..=11).step_by(2) {
            let sym = power_sum(k).expect("odd").eval_f64(s1.to_f64(), s3.to_f64());
            let direct = pf.powi(k as i32) + qf.powi(k as i32) + rf.powi(k as i32);
            if (sym - direct).abs() > 1e-12 * direct.abs() {
                return Some(format!("k = {k}: {sym} vs {direct}"));
            }
        }
    }
    None
}

pub fn cmd_verify(cfg: &RunConfig, notes: &mut String) -> Result<(String, i32), CliError> {
    let reports = run_suites(cfg, notes)?;
    let failed = reports.iter().any(|r| !r.passed);
    let text = match cfg.format {
        Format::Json => emit_json(json!(reports
            .iter()
            .map(|r| json!({ "suite": r.suite.name(), "passed": r.passed, "detail": r.detail }))
            .collect::<Vec<_>>())),
        _ => reports
            .iter()
            .map(|r| format!("{}: {} ({})\n", r.suite.name(), if r.passed { "pass" } else { "FAIL" }, r.detail))
            .collect(),
    };
    Ok((text, i32::from(failed)))
}

/// One line of the rational-case report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub fn virasoro_report(cfg: &RunConfig) -> Result<Vec<IdentityLine>, CliError> {
    let mut lines = Vec::new();
    for &(k1, k2) in &cfg.pairs {
        let p = RationalParams::new(k1, k2).map_err(|e| CliError::usage(e.to_string()))?;
        for cell in commutator_grid(&p, cfg.m_max, cfg.basis_degree).map_err(virasoro_err)? {
            lines.push(IdentityLine {
                name: format!("({k1},{k2}) [L{}, L{}]", cell.m, cell.n),
                passed: cell.failures == 0,
                detail: match cell.first_failing {
                    Some(f) => format!("{} of {} basis elements fail; first {f}", cell.failures, cell.basis_size),
                    None => format!("basis of {}", cell.basis_size),
                },
            });
        }
        if cfg.integrals {
            let vt = VTable::new(&p, 14);
            let a_fail = (0..=12).find_map(|n| {
                let a = a_coefficient(&vt, 0, n).ok()?;
                (a != p.big_k().pow(n as i32)).then(|| format!("A(0,{n}) = {a}"))
            });
            lines.push(line(format!("({k1},{k2}) A(0,n) = K^n"), a_fail, "n <= 12"));
            let table = cubic_hodge::ptensor::PTensorTable::new(4);
            lines.push(line(format!("({k1},{k2}) bridge"), bridge_check(&vt, &table, 4, 8).err().map(|m| m.to_string()), "i+j <= 4, xi-order 8"));
            lines.push(line(format!("({k1},{k2}) B11 closed form"), btilde11_closed_form_check(&vt, 10).err().map(|m| m.to_string()), "xi-order 10"));
            lines.push(line(format!("({k1},{k2}) integral identity"), integral_identity_check(&vt, 10).err().map(|m| m.to_string()), "xi-order 10"));
            lines.push(line(format!("({k1},{k2}) V1 at infinity"), v_asymptotics_check(&vt, 8).err().map(|m| m.to_string()), "z-order 8"));
            lines.push(line(format!("({k1},{k2}) c products vs log-Gamma"), c_float_failure(&p, &vt), "m+n <= 3, rel 1e-10"));
        }
    }
    Ok(lines)
}

fn line(name: String, failure: Option<String>, ok: &str) -> IdentityLine {
    let passed = failure.is_none();
    IdentityLine { name, passed, detail: failure.unwrap_or_else(|| ok.to_string()) }
}

fn c_float_failure(p: &RationalParams, vt: &VTable) -> Option<String> {
    let (h, k1, k2) = (p.h(), p.k1(), p.k2());
    for s in 0..=3 {
        for m in 0..=s {
            let n = s - m;
            for a in p.index_set() {
                let (b, mm, nn) = match a {
                    0 => (0, m + 1, n + 1),
                    a if a > 0 => (k1 - a, m, n),
                    a => (-a - k2, m, n),
                };
                let exact = match vt.c_pair(a, mm, b, nn) {
                    Ok(v) => v.to_f64(),
                    Err(e) => return Some(e.to_string()),
                };
                let float = p.c_float(a + h * mm).ok()? * p.c_float(b + h * nn).ok()?;
                if (exact - float).abs() > 1e-10 * float.abs() {
                    return Some(format!("c_pair({a},{mm},{b},{nn}) = {exact} vs {float}"));
                }
            }
        }
    }
    None
}

pub fn cmd_virasoro(cfg: &RunConfig) -> Result<(String, i32), CliError> {
    let lines = virasoro_report(cfg)?;
    let failed = lines.iter().any(|l| !l.passed);
    let text = match cfg.format {
        Format::Json => emit_json(json!(lines
            .iter()
            .map(|l| json!({ "identity": l.name, "passed": l.passed, "detail": l.detail }))
            .collect::<Vec<_>>())),
        _ => lines.iter().map(|l| format!("{}: {} ({})\n", l.name, if l.passed { "pass" } else { "FAIL" }, l.detail)).collect(),
    };
    Ok((text, i32::from(failed)))
}

/// Wall time of `f` in milliseconds alongside its value.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, u128) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed().as_millis())
}
