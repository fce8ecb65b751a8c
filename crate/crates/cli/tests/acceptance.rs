//! One line per acceptance criterion, with pinned tolerances and wall-clock
//! limits. The command-level criteria go through the same entry point as the
//! binary; the oracles below are computed independently in this file.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use cubic_hodge::algebra::format::{parse_jet, parse_sigma};
use cubic_hodge::bell::FJetTable;
use cubic_hodge::loop_solver::LoopSolver;
use cubic_hodge::phi::{power_sum, q_polynomial};
use cubic_hodge::{JetMono, JetPoly, Rational, SigmaMono, SigmaPoly};

const PAIRS: [(i64, i64); 3] = [(1, 2), (2, 3), (3, 4)];

fn data(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

/// Runs the driver; returns stdout, or the exit code and stderr on failure.
fn cli(args: &[&str]) -> Result<String, String> {
    let out = cubic_hodge_cli::run(std::iter::once("cubic-hodge").chain(args.iter().copied()));
    if out.code == 0 {
        Ok(out.stdout)
    } else {
        Err(format!("`{}` exited {}: {}{}", args.join(" "), out.code, out.stderr.trim(), out.stdout.trim()))
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn jet(src: &str) -> Result<JetPoly, String> {
    parse_jet(src.trim()).map_err(|e| e.to_string())
}

fn sigma(src: &str) -> Result<SigmaPoly, String> {
    parse_sigma(src.trim()).map_err(|e| e.to_string())
}

fn factorial(n: u32) -> Rational {
    (1..=n as i64).fold(Rational::one(), |acc, k| acc * Rational::from_int(k))
}

fn binom(n: u32, k: u32) -> Rational {
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// `B_0..B_n` from `Σ_{k<m+1} C(m+1, k) B_k = 0`.
fn bernoulli_upto(n: u32) -> Vec<Rational> {
    let mut b = vec![Rational::one()];
    for m in 1..=n {
        let s = (0..m).fold(Rational::zero(), |acc, k| acc + binom(m + 1, k) * b[k as usize].clone());
        b.push(-s / Rational::from_int(m as i64 + 1));
    }
    b
}

/// `(−1)^g / (2(2g−2)!) · |B_{2g}| |B_{2g−2}| / (2g(2g−2)) · (σ₁³/3 − σ₃/6)^{g−1}`.
fn faber_oracle(g: u32) -> SigmaPoly {
    let b = bernoulli_upto(2 * g);
    let sign = if g % 2 == 0 { Rational::one() } else { -Rational::one() };
    let c = sign * b[2 * g as usize].abs() * b[2 * g as usize - 2].abs()
        / (Rational::from_int(2) * factorial(2 * g - 2) * Rational::from_int((2 * g * (2 * g - 2)) as i64));
    let base = &SigmaPoly::s1().pow(3).scale(&Rational::new(1, 3)) - &SigmaPoly::s3().scale(&Rational::new(1, 6));
    base.pow(g - 1).scale(&c)
}

/// Partial Bell polynomial by summing over the partitions of `n` into `k` parts.
fn bell_by_partitions(n: usize, k: usize) -> JetPoly {
    fn rec(n: usize, k: usize, max_part: usize, parts: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 && k == 0 {
            out.push(parts.clone());
            return;
        }
        if n == 0 || k == 0 {
            return;
        }
        for p in (1..=max_part.min(n)).rev() {
            parts.push(p);
            rec(n - p, k - 1, p, parts, out);
            parts.pop();
        }
    }
    let mut partitions = Vec::new();
    rec(n, k, n, &mut Vec::new(), &mut partitions);
    let mut total = JetPoly::zero();
    for parts in partitions {
        let mut mult: BTreeMap<usize, u32> = BTreeMap::new();
        for p in &parts {
            *mult.entry(*p).or_default() += 1;
        }
        let mut c = factorial(n as u32);
        let mut exps = vec![0i16; n + 1];
        for (&i, &j) in &mult {
            c = c / (factorial(j) * factorial(i as u32).pow(j as i32));
            exps[i] = j as i16;
        }
        total.add_term(JetMono::from_exponents(&exps).unwrap(), &SigmaPoly::constant(c));
    }
    total
}

/// `t_i` indices with multiplicity from a `t0^2*t3` style key, `"1"` for the empty monomial.
fn t_indices(key: &str) -> Result<Vec<u32>, String> {
    if key == "1" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for factor in key.split('*') {
        let (var, exp) = factor.split_once('^').unwrap_or((factor, "1"));
        let i: u32 = var.strip_prefix('t').ok_or(format!("bad factor {factor}"))?.parse().map_err(|_| format!("bad factor {factor}"))?;
        let e: usize = exp.parse().map_err(|_| format!("bad exponent {factor}"))?;
        out.extend(std::iter::repeat_n(i, e));
    }
    Ok(out)
}

fn hodge_table(genus: u32, d_max: u32) -> Result<BTreeMap<String, SigmaPoly>, String> {
    let text = cli(&["hodge", "--genus", &genus.to_string(), "--n-max", "3", "--d-max", &d_max.to_string()])?;
    text.lines()
        .map(|l| {
            let (k, v) = l.split_once(": ").ok_or(format!("bad line {l}"))?;
            Ok((k.to_string(), sigma(v)?))
        })
        .collect()
}

fn suite_passes(genus: u32, suite: &str) -> Result<String, String> {
    let out = cli(&["verify", "--genus", &genus.to_string(), "--suite", suite])?;
    let line = out.lines().next().unwrap_or_default().to_string();
    ensure(line.starts_with(&format!("{suite}: pass")), || line.clone())?;
    Ok(line)
}

fn virasoro_lines(k1: i64, k2: i64, integrals: bool) -> Result<Vec<String>, String> {
    let (k1s, k2s) = (k1.to_string(), k2.to_string());
    let mut args = vec!["virasoro", "--k1", &k1s, "--k2", &k2s, "--mmax", "3", "--degree", "3"];
    if integrals {
        args.push("--integrals");
    }
    Ok(cli(&args)?.lines().map(str::to_string).collect())
}

fn line_passes(lines: &[String], label: &str) -> Result<(), String> {
    let l = lines.iter().find(|l| l.contains(label)).ok_or(format!("no line for {label}"))?;
    ensure(l.contains(": pass"), || l.clone())
}

fn solved(g_max: u32) -> Vec<cubic_hodge::loop_solver::FreeEnergy> {
    LoopSolver::new(g_max).solve_all().unwrap()
}

fn c1() -> Result<String, String> {
    let out = cli(&["compute", "--genus", "1"])?;
    ensure(out.trim() == "(1/24)*log(z1) + (1/24)*s1*z0", || out.clone())?;
    Ok("(1/24)*log(z1) + (1/24)*s1*z0".into())
}

fn c2() -> Result<String, String> {
    let got = jet(&cli(&["compute", "--genus", "2"])?)?;
    let want = jet(&data("h2.txt"))?;
    ensure(got == want, || "H2 differs from the printed list".into())?;
    let z1_sq = JetMono::var_pow(1, 2);
    let s3_part = got.coeff(&z1_sq).coeff(&SigmaMono::new(0, 1));
    ensure(s3_part == Rational::new(-1, 34560), || format!("s3*z1^2 coefficient {s3_part}"))?;
    Ok(format!("{} terms, -s3/34560 present", got.len()))
}

fn c3() -> Result<String, String> {
    let got = jet(&cli(&["compute", "--genus", "3"])?)?;
    let printed = jet(&data("h3_printed.txt"))?;
    // The printed z2^3 z3 / z1^5 term lacks its s1 factor.
    let wrong = jet("-(9343/1451520)*z1^-5*z2^3*z3")?;
    let right = jet("-(9343/1451520)*s1*z1^-5*z2^3*z3")?;
    let want = &(&printed - &wrong) + &right;
    ensure(got == want, || "H3 differs from the printed list".into())?;
    Ok(format!("{} jet monomials ({} sigma-expanded terms) equal, one printed term carries s1", got.len(), got.flat_len()))
}

fn c4() -> Result<String, String> {
    for (g, file) in [(2, "r2_printed.txt"), (3, "r3_printed.txt")] {
        let got = sigma(&cli(&["rg", "--genus", &g.to_string()])?)?;
        ensure(got == sigma(&data(file))?, || format!("R{g} differs"))?;
    }
    Ok("R2, R3 exact".into())
}

fn c5() -> Result<String, String> {
    let printed = [sigma(&data("r2_printed.txt"))?, sigma(&data("r3_printed.txt"))?];
    let t = Instant::now();
    let mut by_g4 = None;
    for g in 2u32..=5 {
        let r = sigma(&cli(&["rg", "--genus", &g.to_string()])?)?;
        let top = r.weighted_part(3 * g - 3);
        ensure(top == faber_oracle(g), || format!("genus {g} top part differs from the closed form"))?;
        if g <= 3 {
            ensure(top == printed[g as usize - 2].weighted_part(3 * g - 3), || format!("genus {g} printed top part"))?;
        }
        if g == 4 {
            by_g4 = Some(t.elapsed());
        }
    }
    let by_g4 = by_g4.unwrap();
    ensure(by_g4 < Duration::from_secs(600), || format!("g <= 4 took {by_g4:?}"))?;
    Ok(format!("g = 2..5, g <= 4 in {:.2} s", by_g4.as_secs_f64()))
}

fn c6() -> Result<String, String> {
    suite_passes(4, "loop-residual")
}

fn c7() -> Result<String, String> {
    let all = solved(4);
    for h in &all[1..] {
        let g = h.genus;
        let p = h.polynomial();
        let n = h.gradient.len();
        for i in 0..n {
            ensure(h.gradient[i] == p.partial(i), || format!("genus {g}: gradient {i} is not dH/dz{i}"))?;
            for j in 0..i {
                ensure(h.gradient[i].partial(j) == h.gradient[j].partial(i), || format!("genus {g}: cross partial ({i},{j})"))?;
            }
        }
        let mut euler = JetPoly::zero();
        for (j, d) in h.gradient.iter().enumerate() {
            euler.add_product(&JetPoly::var(j).scale(&Rational::from_int(j as i64)), d);
        }
        ensure(euler == p.scale(&Rational::from_int(2 * g as i64 - 2)), || format!("genus {g}: Euler identity"))?;
        ensure(p.partial(0).is_zero(), || format!("genus {g}: dH/dz0 != 0"))?;
    }
    suite_passes(4, "closure")?;
    Ok("g = 2..4".into())
}

fn c8() -> Result<String, String> {
    let all = solved(4);
    for h in &all[1..] {
        let g = h.genus as i32;
        for (m, c) in h.polynomial().terms() {
            let e = m.exponents();
            let w: i32 = e.iter().enumerate().map(|(j, &x)| j as i32 * x as i32).sum();
            ensure(w == 2 * g - 2, || format!("genus {g}: weight {w}"))?;
            let shifted: i32 = e.iter().enumerate().map(|(j, &x)| (j as i32 - 1) * x as i32).sum();
            for (s, _) in c.terms() {
                let total = shifted + s.weight() as i32;
                ensure(total == 3 * g - 3, || format!("genus {g}: dimension weight {total}"))?;
            }
        }
    }
    suite_passes(4, "grading")?;
    Ok("g = 2..4".into())
}

fn c9() -> Result<String, String> {
    let t = Instant::now();
    let mut cells = 0;
    for (k1, k2) in PAIRS {
        let lines = virasoro_lines(k1, k2, false)?;
        for m in 0..=3 {
            for n in 0..=3 {
                line_passes(&lines, &format!("({k1},{k2}) [L{m}, L{n}]"))?;
                cells += 1;
            }
        }
    }
    let dt = t.elapsed();
    ensure(dt < Duration::from_secs(120), || format!("took {dt:?}"))?;
    Ok(format!("{cells} cells, degree <= 3"))
}

fn c10_11() -> Result<(String, String), String> {
    for (k1, k2) in PAIRS {
        let lines = virasoro_lines(k1, k2, true)?;
        line_passes(&lines, "A(0,n) = K^n")?;
        line_passes(&lines, "bridge")?;
        line_passes(&lines, "B11 closed form")?;
    }
    // K^n from K = h^h / (K1^K1 K2^K2) computed here, against the direct sums.
    for (k1, k2) in PAIRS {
        let h = k1 + k2;
        let big_k = Rational::from_int(h).pow(h as i32) / (Rational::from_int(k1).pow(k1 as i32) * Rational::from_int(k2).pow(k2 as i32));
        let p = cubic_hodge::virasoro::RationalParams::new(k1, k2).unwrap();
        let vt = cubic_hodge::virasoro::VTable::new(&p, 14);
        for n in 0..=12 {
            let a = cubic_hodge::virasoro::a_coefficient(&vt, 0, n).map_err(|e| e.to_string())?;
            ensure(a == big_k.pow(n as i32), || format!("({k1},{k2}) A(0,{n}) = {a}"))?;
        }
    }
    Ok(("A(0,n) for n <= 12; i+j <= 4 to xi-order 8; three pairs".into(), "xi-order 10, three pairs".into()))
}

fn c12() -> Result<String, String> {
    suite_passes(1, "xi-oracle")
}

fn c13() -> Result<String, String> {
    let order = 12;
    for n in 0..=8usize {
        let s = q_polynomial(n).to_xi_series(order).ok_or("Q has jet coefficients")?;
        // Θ^k = Σ_j C(j+k−1, k−1) ξ^j, so Σ_k Q(n,k)Θ^k matches Σ_j (−j)^n ξ^j.
        for (j, c) in s.iter().enumerate() {
            let want = Rational::from_int(-(j as i64)).pow(n as i32);
            ensure(c.is_constant() && c.constant_term() == want, || format!("T_{n} at xi^{j}"))?;
        }
    }
    let f = FJetTable::new(8);
    for i in 0..=8 {
        for j in 0..=i {
            let want = if i == 0 { JetPoly::one() } else { bell_by_partitions(i, j) };
            ensure(f.get(i, j) == &want, || format!("f({i},{j}) differs from the partition sum"))?;
        }
    }
    Ok("Q for n <= 8 to xi-order 12; f(i,j) for i <= 8".into())
}

fn c14() -> Result<String, String> {
    let g1 = hodge_table(1, 4)?;
    ensure(g1.get("t0") == Some(&SigmaPoly::s1().scale(&Rational::new(1, 24))), || "t0 coefficient".into())?;
    ensure(g1.get("t1") == Some(&SigmaPoly::constant(Rational::new(1, 24))), || "t1 coefficient".into())?;
    let g2 = hodge_table(2, 4)?;
    let want = &SigmaPoly::s1().pow(3).scale(&Rational::new(1, 17280)) - &SigmaPoly::s3().scale(&Rational::new(1, 34560));
    ensure(g2.get("1") == Some(&want), || "genus 2 constant term".into())?;
    let mut checked = 0;
    for g in 1..=3u32 {
        let table = if g == 1 { g1.clone() } else if g == 2 { g2.clone() } else { hodge_table(3, 4)? };
        for (key, c) in &table {
            let idx = t_indices(key)?;
            let total = 3 * g as i64 - 3 + idx.len() as i64;
            let psi: i64 = idx.iter().map(|&i| i as i64).sum();
            for (s, _) in c.terms() {
                ensure(psi + s.weight() as i64 == total, || format!("genus {g} {key}: dimension"))?;
            }
            checked += 1;
        }
    }
    suite_passes(3, "hodge-dimension")?;
    Ok(format!("{checked} coefficients for g <= 3, degree <= 4"))
}

fn c15() -> Result<String, String> {
    suite_passes(1, "first-flow")
}

fn c16() -> Result<String, String> {
    let out = cli(&["rg", "--genus", "1"])?;
    let inner = out.trim().strip_suffix("*log(x)").and_then(|s| s.strip_prefix('(')).and_then(|s| s.strip_suffix(')'));
    let got = sigma(inner.ok_or(format!("unexpected output {out}"))?)?;
    let want = (&SigmaPoly::s1() - &SigmaPoly::one()).scale(&Rational::new(1, 24));
    ensure(got == want, || out.clone())?;
    Ok("(s1 - 1)/24".into())
}

fn c17() -> Result<String, String> {
    const REL: f64 = 1e-12;
    for (p, q, r) in [(1.0f64, 1.0, -0.5), (2.0, 3.0, -1.2)] {
        assert!((p * q + q * r + r * p).abs() < 1e-15);
        let s1 = -(p + q + r);
        let s3 = -2.0 * (p.powi(3) + q.powi(3) + r.powi(3));
        for k in (1..=11).step_by(2) {
            let sym = power_sum(k).map_err(|e| e.to_string())?.eval_f64(s1, s3);
            let direct = p.powi(k as i32) + q.powi(k as i32) + r.powi(k as i32);
            ensure((sym - direct).abs() <= REL * direct.abs(), || format!("({p},{q},{r}) k = {k}: {sym} vs {direct}"))?;
        }
    }
    Ok("odd k <= 11, (1,1,-1/2) and (2,3,-6/5), rel 1e-12".into())
}

struct Criterion {
    id: &'static str,
    limit: Option<Duration>,
    run: Box<dyn Fn() -> Result<String, String>>,
}

#[test]
fn acceptance() {
    let secs = |s| Some(Duration::from_secs(s));
    let bridge = std::rc::Rc::new(std::cell::OnceCell::new());
    let (b10, b11) = (bridge.clone(), bridge);
    let criteria = vec![
        Criterion { id: "1", limit: secs(1), run: Box::new(c1) },
        Criterion { id: "2", limit: secs(5), run: Box::new(c2) },
        Criterion { id: "3", limit: secs(60), run: Box::new(c3) },
        Criterion { id: "4", limit: None, run: Box::new(c4) },
        Criterion { id: "5", limit: None, run: Box::new(c5) },
        Criterion { id: "6", limit: None, run: Box::new(c6) },
        Criterion { id: "7", limit: None, run: Box::new(c7) },
        Criterion { id: "8", limit: None, run: Box::new(c8) },
        Criterion { id: "9", limit: secs(120), run: Box::new(c9) },
        Criterion { id: "10", limit: None, run: Box::new(move || b10.get_or_init(c10_11).clone().map(|v| v.0)) },
        Criterion { id: "11", limit: None, run: Box::new(move || b11.get_or_init(c10_11).clone().map(|v| v.1)) },
        Criterion { id: "12", limit: None, run: Box::new(c12) },
        Criterion { id: "13", limit: None, run: Box::new(c13) },
        Criterion { id: "14", limit: None, run: Box::new(c14) },
        Criterion { id: "15", limit: None, run: Box::new(c15) },
        Criterion { id: "16", limit: None, run: Box::new(c16) },
        Criterion { id: "17", limit: None, run: Box::new(c17) },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let t = Instant::now();
        let mut result = (c.run)();
        let dt = t.elapsed();
        if let (Ok(_), Some(limit)) = (&result, c.limit) {
            if dt > limit {
                result = Err(format!("took {:.2} s, limit {} s", dt.as_secs_f64(), limit.as_secs()));
            }
        }
        match &result {
            Ok(detail) => println!("criterion {}: PASS {detail} ({:.2} s)", c.id, dt.as_secs_f64()),
            Err(why) => {
                println!("criterion {}: FAIL {why} ({:.2} s)", c.id, dt.as_secs_f64());
                failed.push(c.id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
