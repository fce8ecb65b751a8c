//! Canonical text, JSON and LaTeX forms of polynomials.
//!
//! Text grammar (whitespace around `+`/`-` separators is optional on input):
//!
//! ```text
//! poly   := "0" | ["-"] term { ("+" | "-") term }
//! term   := coef { "*" factor } | factor { "*" factor }
//! coef   := "(" rational ")" | rational
//! factor := ident [ "^" ["-"] digits ]
//! ident  := "s1" | "s3" | "z" digits
//! ```
//!
//! Output always writes the coefficient in parentheses, the `σ` factors
//! first, then jets by increasing index, e.g. `(7/5760)*s1^2*z2`. Terms are
//! listed by decreasing jet monomial, then decreasing `σ` monomial.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AlgebraError, JetMono, JetPoly, Rational, SigmaMono, SigmaPoly};

fn push_factor(out: &mut String, name: &str, e: i64) {
    out.push('*');
    out.push_str(name);
    if e != 1 {
        out.push('^');
        out.push_str(&e.to_string());
    }
}

fn sigma_factors(out: &mut String, m: &SigmaMono) {
    if m.s1 > 0 {
        push_factor(out, "s1", m.s1 as i64);
    }
    if m.s3 > 0 {
        push_factor(out, "s3", m.s3 as i64);
    }
}

fn jet_factors(out: &mut String, m: &JetMono) {
    for (k, &e) in m.exponents().iter().enumerate() {
        if e != 0 {
            push_factor(out, &format!("z{k}"), e as i64);
        }
    }
}

/// Flattened terms in canonical output order.
fn flat_terms(p: &JetPoly) -> Vec<(&JetMono, &SigmaMono, &Rational)> {
    p.terms()
        .rev()
        .flat_map(|(jm, c)| c.terms().rev().map(move |(sm, r)| (jm, sm, r)))
        .collect()
}

fn join_terms(terms: impl Iterator<Item = (Rational, String)>) -> String {
    let mut out = String::new();
    for (i, (c, factors)) in terms.enumerate() {
        let neg = c.is_negative();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        out.push('(');
        out.push_str(&c.abs().to_string());
        out.push(')');
        out.push_str(&factors);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

pub fn jet_to_text(p: &JetPoly) -> String {
    join_terms(flat_terms(p).into_iter().map(|(jm, sm, c)| {
        let mut f = String::new();
        sigma_factors(&mut f, sm);
        jet_factors(&mut f, jm);
        (c.clone(), f)
    }))
}

pub fn sigma_to_text(p: &SigmaPoly) -> String {
    join_terms(p.terms().rev().map(|(sm, c)| {
        let mut f = String::new();
        sigma_factors(&mut f, sm);
        (c.clone(), f)
    }))
}

pub fn jet_mono_to_text(m: &JetMono) -> String {
    let mut f = String::new();
    jet_factors(&mut f, m);
    if f.is_empty() {
        "1".into()
    } else {
        f[1..].to_string()
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn err(&self, what: &str) -> AlgebraError {
        AlgebraError::Parse(format!("{what} at offset {} in `{}`", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> &'a str {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn rational(&mut self) -> Result<Rational, AlgebraError> {
        self.skip_ws();
        let start = self.pos;
        if self.s.get(self.pos) == Some(&b'-') {
            self.pos += 1;
        }
        self.digits();
        if self.s.get(self.pos) == Some(&b'/') {
            self.pos += 1;
            self.digits();
        }
        self.src[start..self.pos].parse()
    }

    fn int(&mut self) -> Result<i64, AlgebraError> {
        self.skip_ws();
        let neg = self.s.get(self.pos) == Some(&b'-');
        if neg {
            self.pos += 1;
        }
        let d = self.digits();
        let v: i64 = d.parse().map_err(|_| self.err("expected integer"))?;
        Ok(if neg { -v } else { v })
    }

    /// Parses one factor into the accumulating monomials.
    fn factor(&mut self, sm: &mut SigmaMono, jets: &mut Vec<i64>) -> Result<(), AlgebraError> {
        self.skip_ws();
        let c = self.s.get(self.pos).copied().ok_or_else(|| self.err("expected factor"))?;
        self.pos += 1;
        let ident = match c {
            b's' => match self.digits() {
                "1" => 0usize,
                "3" => 1,
                _ => return Err(self.err("unknown sigma variable")),
            },
            b'z' => {
                let d = self.digits();
                let k: usize = d.parse().map_err(|_| self.err("expected jet index"))?;
                k + 2
            }
            _ => return Err(self.err("expected s1, s3 or z<k>")),
        };
        let e = if self.eat(b'^') { self.int()? } else { 1 };
        match ident {
            0 | 1 => {
                if e < 0 {
                    return Err(self.err("negative sigma exponent"));
                }
                let e = u16::try_from(e).map_err(|_| self.err("exponent too large"))?;
                if ident == 0 {
                    sm.s1 += e;
                } else {
                    sm.s3 += e;
                }
            }
            k => {
                let k = k - 2;
                if jets.len() <= k {
                    jets.resize(k + 1, 0);
                }
                jets[k] += e;
            }
        }
        Ok(())
    }

    fn term(&mut self) -> Result<(Rational, SigmaMono, JetMono), AlgebraError> {
        let mut coef = Rational::one();
        let mut sm = SigmaMono::ONE;
        let mut jets = Vec::new();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                coef = self.rational()?;
                if !self.eat(b')') {
                    return Err(self.err("expected `)`"));
                }
            }
            Some(c) if c.is_ascii_digit() => coef = self.rational()?,
            _ => self.factor(&mut sm, &mut jets)?,
        }
        while self.eat(b'*') {
            self.factor(&mut sm, &mut jets)?;
        }
        let exps: Vec<i16> = jets
            .into_iter()
            .map(|e| i16::try_from(e).map_err(|_| self.err("exponent too large")))
            .collect::<Result<_, _>>()?;
        Ok((coef, sm, JetMono::from_exponents(&exps)?))
    }
}

pub fn parse_jet(src: &str) -> Result<JetPoly, AlgebraError> {
    let mut p = Parser { s: src.as_bytes(), pos: 0, src };
    let mut out = JetPoly::zero();
    let mut sign = if p.eat(b'-') { -1 } else { 1 };
    loop {
        let (c, sm, jm) = p.term()?;
        let c = if sign < 0 { -c } else { c };
        out.add_term(jm, &SigmaPoly::monomial(sm, c));
        match p.peek() {
            None => break,
            Some(b'+') => {
                p.pos += 1;
                sign = 1;
            }
            Some(b'-') => {
                p.pos += 1;
                sign = -1;
            }
            Some(_) => return Err(p.err("expected `+` or `-`")),
        }
    }
    Ok(out)
}

pub fn parse_sigma(src: &str) -> Result<SigmaPoly, AlgebraError> {
    let j = parse_jet(src)?;
    j.as_sigma()
        .ok_or_else(|| AlgebraError::Parse(format!("`{src}` contains jet variables")))
}

/// `"num/den"`, always with an explicit denominator.
pub fn rational_to_json(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// One flattened term of the JSON form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub coef: String,
    pub sigma: [u16; 2],
    pub jets: BTreeMap<String, i16>,
}

pub fn jet_to_json(p: &JetPoly) -> Vec<JsonTerm> {
    flat_terms(p)
        .into_iter()
        .map(|(jm, sm, c)| JsonTerm {
            coef: rational_to_json(c),
            sigma: [sm.s1, sm.s3],
            jets: jm
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(k, &e)| (format!("z{k}"), e))
                .collect(),
        })
        .collect()
}

pub fn jet_from_json(terms: &[JsonTerm]) -> Result<JetPoly, AlgebraError> {
    let mut out = JetPoly::zero();
    for t in terms {
        let c: Rational = t.coef.parse()?;
        let mut exps: Vec<i16> = Vec::new();
        for (name, &e) in &t.jets {
            let k: usize = name
                .strip_prefix('z')
                .and_then(|d| d.parse().ok())
                .ok_or_else(|| AlgebraError::Parse(format!("bad jet name `{name}`")))?;
            if exps.len() <= k {
                exps.resize(k + 1, 0);
            }
            exps[k] += e;
        }
        out.add_term(
            JetMono::from_exponents(&exps)?,
            &SigmaPoly::monomial(SigmaMono::new(t.sigma[0], t.sigma[1]), c),
        );
    }
    Ok(out)
}

pub fn sigma_to_json(p: &SigmaPoly) -> Vec<JsonTerm> {
    jet_to_json(&JetPoly::constant(p.clone()))
}

fn latex_rational_times(c: &Rational, body: &str) -> String {
    // c·body with c > 0, in `\frac{n body}{d}` style.
    let n = c.numer().to_string();
    let d = c.denom().to_string();
    let num = match (n.as_str(), body.is_empty()) {
        ("1", true) => "1".to_string(),
        ("1", false) => body.to_string(),
        (_, true) => n,
        (_, false) => format!("{n}{body}"),
    };
    if d == "1" {
        num
    } else {
        format!("\\frac{{{num}}}{{{d}}}")
    }
}

fn latex_sigma_mono(m: &SigmaMono) -> String {
    let mut s = String::new();
    for (name, e) in [("\\sigma_1", m.s1), ("\\sigma_3", m.s3)] {
        match e {
            0 => {}
            1 => s.push_str(name),
            _ => s.push_str(&format!("{name}^{{{e}}}")),
        }
    }
    s
}

fn latex_sigma_poly(p: &SigmaPoly) -> String {
    let mut out = String::new();
    for (i, (m, c)) in p.terms().enumerate() {
        let t = latex_rational_times(&c.abs(), &latex_sigma_mono(m));
        if c.is_negative() {
            out.push('-');
        } else if i > 0 {
            out.push('+');
        }
        out.push_str(&t);
    }
    out
}

fn latex_jet_frac(m: &JetMono) -> String {
    let mut num = Vec::new();
    let mut den = Vec::new();
    for (k, &e) in m.exponents().iter().enumerate() {
        let v = |e: i16| if e == 1 { format!("z_{k}") } else { format!("z_{k}^{{{e}}}") };
        match e.cmp(&0) {
            std::cmp::Ordering::Greater => num.push(v(e)),
            std::cmp::Ordering::Less => den.push(v(-e)),
            std::cmp::Ordering::Equal => {}
        }
    }
    match (num.is_empty(), den.is_empty()) {
        (_, true) => num.join(" "),
        (true, false) => format!("\\frac{{1}}{{{}}}", den.join(" ")),
        (false, false) => format!("\\frac{{{}}}{{{}}}", num.join(" "), den.join(" ")),
    }
}

/// LaTeX rendering. Jet monomials are grouped with their `σ`-coefficient and
/// ordered by increasing `σ`-degree, then by decreasing highest jet index.
pub fn jet_to_latex(p: &JetPoly) -> String {
    let mut groups: Vec<(&JetMono, &SigmaPoly)> = p.terms().collect();
    groups.sort_by(|a, b| {
        let key = |(m, c): &(&JetMono, &SigmaPoly)| {
            let wmin = c.terms().map(|(s, _)| s.weight()).min().unwrap_or(0);
            (wmin, std::cmp::Reverse(m.max_index()), std::cmp::Reverse((*m).clone()))
        };
        key(a).cmp(&key(b))
    });
    let mut out = String::new();
    for (i, (m, c)) in groups.into_iter().enumerate() {
        let jets = latex_jet_frac(m);
        let piece = if c.len() == 1 {
            let (sm, r) = c.terms().next().expect("nonempty");
            let head = latex_rational_times(&r.abs(), &latex_sigma_mono(sm));
            let sign = if r.is_negative() { "-" } else if i > 0 { "+" } else { "" };
            if jets.is_empty() {
                format!("{sign}{head}")
            } else if head == "1" {
                format!("{sign}{jets}")
            } else {
                format!("{sign}{head}{jets}")
            }
        } else {
            let sign = if i > 0 { "+" } else { "" };
            format!("{sign}\\left({}\\right){jets}", latex_sigma_poly(c))
        };
        out.push_str(&piece);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}
