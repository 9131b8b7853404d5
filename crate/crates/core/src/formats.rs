//! Line-oriented text formats. Every file starts with a `#epskit-v1` header;
//! other lines starting with `#` are comments, blank lines are skipped and
//! fields are tab-separated.
//!
//! * distribution: `label<TAB>mass`
//! * joint: `u<TAB>r<TAB>x<TAB>mass`
//! * prefix code: `label<TAB>digits`
//! * cipher: `[SOURCE]` and `[KEY]` blocks in distribution form, `[ENCODER]`
//!   lines `u<TAB>r<TAB>aux mass<TAB>x`, and `[DECODER]` lines
//!   `r<TAB>x<TAB>u` for every positive-probability pair
//! * extraction plan: `[TARGET]` in distribution form, then one
//!   `[CONTEXT name]` block per context with lines
//!   `r<TAB>P(r|context)<TAB>P(a|r)<TAB>s`
//!
//! Masses are `p/q`, integers or terminating decimals.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::ciphers::{CipherSpec, Decoder, EncoderRow, PrefixCode};
use crate::error::{EpsError, Result};
use crate::prob::{parse_rational, FiniteDist, JointSystem, Prob};
use crate::recycle::ExtractionPlan;

pub const HEADER: &str = "#epskit-v1";

fn err(line: usize, msg: impl Into<String>) -> EpsError {
    EpsError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Numbered content lines, with the version header checked.
fn content_lines(text: &str) -> Result<Vec<(usize, &str)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.trim_end_matches('\r');
        if let Some(rest) = line.strip_prefix("#epskit-") {
            if line != HEADER {
                return Err(err(n, format!("unsupported format version {rest:?}")));
            }
            continue;
        }
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        out.push((n, line));
    }
    Ok(out)
}

fn fields(n: usize, line: &str, expect: usize) -> Result<Vec<&str>> {
    let f: Vec<&str> = line.split('\t').collect();
    if f.len() != expect {
        return Err(err(n, format!("expected {expect} tab-separated fields, found {}", f.len())));
    }
    Ok(f)
}

fn mass(n: usize, text: &str) -> Result<Prob> {
    parse_rational(text).map_err(|m| err(n, m))
}

fn located<T>(n: usize, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        EpsError::Parse { .. } => e,
        other => err(n, other.to_string()),
    })
}

fn dist_lines(lines: &[(usize, &str)]) -> Result<FiniteDist> {
    let mut labels = Vec::with_capacity(lines.len());
    let mut masses = Vec::with_capacity(lines.len());
    for &(n, line) in lines {
        let f = fields(n, line, 2)?;
        labels.push(f[0].to_string());
        masses.push(mass(n, f[1])?);
    }
    let last = lines.last().map_or(0, |l| l.0);
    located(last, FiniteDist::new(labels, masses))
}

pub fn parse_dist(text: &str) -> Result<FiniteDist> {
    dist_lines(&content_lines(text)?)
}

fn push_dist(out: &mut String, d: &FiniteDist) {
    for (label, p) in d.iter() {
        writeln!(out, "{label}\t{p}").unwrap();
    }
}

pub fn write_dist(d: &FiniteDist) -> String {
    let mut out = format!("{HEADER}\n");
    push_dist(&mut out, d);
    out
}

pub fn parse_joint(text: &str) -> Result<JointSystem> {
    let lines = content_lines(text)?;
    let mut cells = Vec::with_capacity(lines.len());
    for &(n, line) in &lines {
        let f = fields(n, line, 4)?;
        cells.push((f[0].to_string(), f[1].to_string(), f[2].to_string(), mass(n, f[3])?));
    }
    let last = lines.last().map_or(0, |l| l.0);
    located(last, JointSystem::from_labeled(cells))
}

pub fn write_joint(j: &JointSystem) -> String {
    use crate::prob::Variable::{R, U, X};
    let mut out = format!("{HEADER}\n# u\tr\tx\tmass\n");
    let (ul, rl, xl) = (j.labels(U), j.labels(R), j.labels(X));
    for ((u, r, x), p) in j.cells() {
        writeln!(out, "{}\t{}\t{}\t{p}", ul[u], rl[r], xl[x]).unwrap();
    }
    out
}

pub fn write_prefix_code(code: &PrefixCode) -> String {
    let mut out = format!("{HEADER}\n# arity {}\n", code.arity());
    for (i, label) in code.labels().iter().enumerate() {
        writeln!(out, "{label}\t{}", code.codeword_string(i)).unwrap();
    }
    out
}

pub fn parse_prefix_code(text: &str, arity: u32) -> Result<PrefixCode> {
    let lines = content_lines(text)?;
    let mut labels = Vec::new();
    let mut words = Vec::new();
    for &(n, line) in &lines {
        let f = fields(n, line, 2)?;
        let word: Option<Vec<u8>> = f[1]
            .chars()
            .map(|c| c.to_digit(36).filter(|&d| d < arity).map(|d| d as u8))
            .collect();
        let word = word.ok_or_else(|| err(n, format!("{:?} is not a base-{arity} digit string", f[1])))?;
        labels.push(f[0].to_string());
        words.push(word);
    }
    let last = lines.last().map_or(0, |l| l.0);
    located(last, PrefixCode::new(arity, labels, words))
}

/// Every positive-probability `(r, x)` pair with its decoded message.
fn decode_table(spec: &CipherSpec) -> Result<BTreeMap<(usize, usize), usize>> {
    let mut table = BTreeMap::new();
    for u in 0..spec.source().len() {
        for r in 0..spec.key().len() {
            for (_, x) in spec.encoder_row(u, r)? {
                table.insert((r, *x), crate::ciphers::decrypt(spec, *x, r)?);
            }
        }
    }
    Ok(table)
}

pub fn write_cipher(spec: &CipherSpec) -> Result<String> {
    let mut out = format!("{HEADER}\n# scheme: {}\n[SOURCE]\n", spec.scheme());
    push_dist(&mut out, spec.source());
    out.push_str("[KEY]\n");
    push_dist(&mut out, spec.key());
    out.push_str("[ENCODER]\n");
    let (ul, rl, xl) = (spec.source().labels(), spec.key().labels(), spec.x_labels());
    for u in 0..ul.len() {
        for r in 0..rl.len() {
            for (p, x) in spec.encoder_row(u, r)? {
                writeln!(out, "{}\t{}\t{p}\t{}", ul[u], rl[r], xl[*x]).unwrap();
            }
        }
    }
    out.push_str("[DECODER]\n");
    for ((r, x), u) in decode_table(spec)? {
        writeln!(out, "{}\t{}\t{}", rl[r], xl[x], ul[u]).unwrap();
    }
    Ok(out)
}

/// Splits `[NAME]` blocks; returns `(header line, name, body)`.
fn sections<'a>(lines: &[(usize, &'a str)]) -> Result<Vec<(usize, &'a str, Vec<(usize, &'a str)>)>> {
    let mut out: Vec<(usize, &str, Vec<(usize, &str)>)> = Vec::new();
    for &(n, line) in lines {
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            out.push((n, name, Vec::new()));
        } else if let Some(last) = out.last_mut() {
            last.2.push((n, line));
        } else {
            return Err(err(n, "content before the first [SECTION] header"));
        }
    }
    Ok(out)
}

/// Reads a cipher file back. The ciphertext alphabet follows first
/// appearance in `[ENCODER]` and the decoder becomes an explicit table.
pub fn parse_cipher(text: &str) -> Result<CipherSpec> {
    let lines = content_lines(text)?;
    let scheme = text
        .lines()
        .find_map(|l| l.strip_prefix("# scheme: "))
        .unwrap_or("imported")
        .to_string();
    let secs = sections(&lines)?;
    let find = |name: &str| {
        secs.iter()
            .find(|s| s.1 == name)
            .ok_or_else(|| err(lines.last().map_or(0, |l| l.0), format!("missing [{name}] section")))
    };
    if let Some(s) = secs
        .iter()
        .find(|s| !["SOURCE", "KEY", "ENCODER", "DECODER"].contains(&s.1))
    {
        return Err(err(s.0, format!("unknown section [{}]", s.1)));
    }
    let source = dist_lines(&find("SOURCE")?.2)?;
    let key = dist_lines(&find("KEY")?.2)?;
    let mut x_labels: Vec<String> = Vec::new();
    let mut x_index: BTreeMap<String, usize> = BTreeMap::new();
    let mut encoder: Vec<Vec<EncoderRow>> = vec![vec![Vec::new(); key.len()]; source.len()];
    let lookup = |n: usize, d: &FiniteDist, label: &str, what: &str| {
        d.index_of(label)
            .ok_or_else(|| err(n, format!("unknown {what} symbol {label:?}")))
    };
    for &(n, line) in &find("ENCODER")?.2 {
        let f = fields(n, line, 4)?;
        let u = lookup(n, &source, f[0], "message")?;
        let r = lookup(n, &key, f[1], "key")?;
        let next = x_labels.len();
        let x = *x_index.entry(f[3].to_string()).or_insert(next);
        if x == next {
            x_labels.push(f[3].to_string());
        }
        encoder[u][r].push((mass(n, f[2])?, x));
    }
    let mut table = BTreeMap::new();
    for &(n, line) in &find("DECODER")?.2 {
        let f = fields(n, line, 3)?;
        let r = lookup(n, &key, f[0], "key")?;
        let x = *x_index
            .get(f[1])
            .ok_or_else(|| err(n, format!("ciphertext {:?} never produced by the encoder", f[1])))?;
        let u = lookup(n, &source, f[2], "message")?;
        if table.insert((r, x), u).is_some() {
            return Err(err(n, "duplicate (r, x) pair in decoder"));
        }
    }
    let at = find("ENCODER")?.0;
    let spec = located(
        at,
        CipherSpec::from_parts(scheme, source, key, x_labels, encoder, Decoder::Table(table)),
    )?;
    located(at, spec.check_round_trip())?;
    Ok(spec)
}

pub fn write_extraction_plan(plan: &ExtractionPlan) -> String {
    let mut out = format!("{HEADER}\n[TARGET]\n");
    push_dist(&mut out, &plan.target);
    let tl = plan.target.labels();
    for c in &plan.contexts {
        writeln!(out, "[CONTEXT {}]", c.context).unwrap();
        for (r, (label, pr)) in c.residual.iter().enumerate() {
            for (pa, &s) in c.a_kernel[r].iter().zip(&c.s_map[r]) {
                writeln!(out, "{label}\t{pr}\t{pa}\t{}", tl[s]).unwrap();
            }
        }
    }
    out
}
