use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use serde::Serialize;

use super::search::SearchSpec;
use crate::error::{Error, Result};
use crate::extremal::binomial;
use crate::quantile::{bundle_weight, total_weight};

/// Cap on rows plus variables in an exported model.
pub const LP_ROW_BUDGET: u64 = 5_000_000;

/// Terms per line before wrapping.
const TERMS_PER_LINE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LpCounts {
    pub variables: u64,
    pub monotonicity: u64,
    pub threshold: u64,
    pub allocation: u64,
}

/// `n 2^m` variables, `n Σ_k k C(m,k)` monotonicity rows, `n` threshold
/// rows and `n^m` allocation rows.
pub fn expected_lp_counts(n: usize, m: usize) -> LpCounts {
    let per_agent: u64 = (0..=m).map(|k| k as u64 * binomial(m, k).to_u64().expect("m ≤ 63")).sum();
    LpCounts {
        variables: (n as u64) << m,
        monotonicity: n as u64 * per_agent,
        threshold: n as u64,
        allocation: (n as u64).pow(m as u32),
    }
}

fn var(agent: usize, mask: u64, width: usize) -> String {
    format!("x_{}_{:0width$x}", agent + 1, mask)
}

fn push_terms(out: &mut String, name: &str, terms: &[String]) {
    let _ = write!(out, " {name}:");
    for (i, t) in terms.iter().enumerate() {
        if i > 0 && i % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        if i == 0 {
            let _ = write!(out, " {t}");
        } else if let Some(neg) = t.strip_prefix('-') {
            let _ = write!(out, " - {neg}");
        } else {
            let _ = write!(out, " + {t}");
        }
    }
}

/// The integer program in CPLEX LP format. `x_i_S = 1` means agent `i`
/// values bundle `S` at 1; any feasible point is a counterexample profile.
pub fn render_lp(spec: &SearchSpec) -> Result<String> {
    let (n, m) = (spec.n, spec.m);
    if n < 2 || m == 0 || m > 63 {
        return Err(Error::Precondition(format!("need n ≥ 2 and 1 ≤ m ≤ 63, got n = {n}, m = {m}")));
    }
    let size = BigUint::from(n).pow(m as u32) + (BigUint::from(n) << m) * BigUint::from(m + 1);
    if size > BigUint::from(LP_ROW_BUDGET) {
        return Err(Error::budget("LP rows and variables", size, LP_ROW_BUDGET));
    }
    let width = m.div_ceil(4).max(1);
    let subsets = 1u64 << m;
    let mut out = String::new();
    let _ = writeln!(out, "\\ quantile-share threshold search: n = {n}, m = {m}, budget = {}", spec.budget);
    out.push_str("Minimize\n obj: 0 ");
    out.push_str(&var(0, 0, width));
    out.push_str("\nSubject To\n");
    for i in 0..n {
        for s in 0..subsets {
            for j in 0..m {
                if s >> j & 1 == 1 {
                    let name = format!("mono_{}_{:0width$x}_{}", i + 1, s, j + 1);
                    push_terms(&mut out, &name, &[var(i, s, width), format!("-{}", var(i, s ^ 1 << j, width))]);
                    out.push_str(" >= 0\n");
                }
            }
        }
    }
    // Σ_S c_S (1 - x_S) ≤ B  ⟺  Σ_S c_S x_S ≥ n^m - B
    let rhs = BigInt::from(total_weight(n, m)) - BigInt::from(spec.budget.clone());
    for i in 0..n {
        let terms: Vec<String> = (0..subsets)
            .map(|s| format!("{} {}", bundle_weight(n, m, s.count_ones() as usize), var(i, s, width)))
            .collect();
        push_terms(&mut out, &format!("thr_{}", i + 1), &terms);
        let _ = writeln!(out, " >= {rhs}");
    }
    // Σ_i (1 - x_{i,S_i}) ≥ 1  ⟺  Σ_i x_{i,S_i} ≤ n - 1
    let count = n.pow(m as u32);
    let mut masks = vec![0u64; n];
    for a in 0..count {
        masks.iter_mut().for_each(|b| *b = 0);
        let mut rest = a;
        for good in (0..m).rev() {
            masks[rest % n] |= 1 << good;
            rest /= n;
        }
        let terms: Vec<String> = masks.iter().enumerate().map(|(i, &s)| var(i, s, width)).collect();
        push_terms(&mut out, &format!("alloc_{a}"), &terms);
        let _ = writeln!(out, " <= {}", n - 1);
    }
    out.push_str("Binaries\n");
    for i in 0..n {
        let vars: Vec<String> = (0..subsets).map(|s| var(i, s, width)).collect();
        for chunk in vars.chunks(TERMS_PER_LINE) {
            let _ = writeln!(out, " {}", chunk.join(" "));
        }
    }
    out.push_str("End\n");
    Ok(out)
}

/// Writes [`render_lp`] to `path` and returns the constraint counts.
pub fn export_ip(spec: &SearchSpec, path: &Path) -> Result<LpCounts> {
    let text = render_lp(spec)?;
    std::fs::write(path, &text)?;
    lp_counts(&text)
}

#[derive(PartialEq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Binaries,
    Done,
}

/// Re-reads an LP file and classifies each row by shape: `<=` rows are
/// allocation rows, `>=` rows with a negative term are monotonicity rows,
/// the remaining `>=` rows are threshold rows.
pub fn lp_counts(text: &str) -> Result<LpCounts> {
    let mut section = Section::Preamble;
    let mut declared = BTreeSet::new();
    let mut used = BTreeSet::new();
    let mut counts = LpCounts { variables: 0, monotonicity: 0, threshold: 0, allocation: 0 };
    let mut row: Vec<&str> = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.starts_with('\\') || trimmed.is_empty() {
            continue;
        }
        match trimmed.to_ascii_lowercase().as_str() {
            "minimize" | "maximize" => {
                section = Section::Objective;
                continue;
            }
            "subject to" => {
                section = Section::Constraints;
                continue;
            }
            "binaries" | "binary" => {
                section = Section::Binaries;
                continue;
            }
            "end" => {
                section = Section::Done;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Constraints => {
                row.extend(trimmed.split_whitespace());
                let Some(op) = row.iter().position(|t| matches!(*t, "<=" | ">=" | "=")) else {
                    continue;
                };
                if op + 2 != row.len() {
                    return Err(Error::Parse(format!("malformed row near `{trimmed}`")));
                }
                let body = &row[..op];
                let body = match body.first() {
                    Some(t) if t.ends_with(':') => &body[1..],
                    _ => body,
                };
                let mut negative = false;
                for t in body {
                    if *t == "-" {
                        negative = true;
                    } else if t.starts_with("x_") {
                        used.insert(t.to_string());
                    }
                }
                match row[op] {
                    "<=" => counts.allocation += 1,
                    ">=" if negative => counts.monotonicity += 1,
                    ">=" => counts.threshold += 1,
                    other => return Err(Error::Parse(format!("unexpected sense `{other}`"))),
                }
                row.clear();
            }
            Section::Binaries => {
                for t in trimmed.split_whitespace() {
                    if !declared.insert(t.to_string()) {
                        return Err(Error::Parse(format!("variable {t} declared twice")));
                    }
                }
            }
            Section::Objective => {}
            Section::Preamble | Section::Done => {
                return Err(Error::Parse(format!("unexpected line `{trimmed}`")));
            }
        }
    }
    if section != Section::Done || !row.is_empty() {
        return Err(Error::Parse("file ends before `End`".into()));
    }
    if let Some(v) = used.difference(&declared).next() {
        return Err(Error::Parse(format!("variable {v} is not declared binary")));
    }
    counts.variables = declared.len() as u64;
    Ok(counts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_counts() {
        let c = expected_lp_counts(3, 6);
        assert_eq!((c.variables, c.monotonicity, c.threshold, c.allocation), (192, 576, 3, 729));
        let c = expected_lp_counts(2, 1);
        assert_eq!((c.variables, c.monotonicity, c.threshold, c.allocation), (4, 2, 2, 2));
    }

    #[test]
    fn round_trip() {
        for (n, m) in [(2, 1), (3, 6), (2, 5), (4, 3)] {
            let spec = SearchSpec::new(n, m.max(n - 1)).unwrap();
            let text = render_lp(&spec).unwrap();
            assert_eq!(lp_counts(&text).unwrap(), expected_lp_counts(n, m.max(n - 1)));
            assert_eq!(text, render_lp(&spec).unwrap());
        }
    }

    #[test]
    fn tiny_model_text() {
        let spec = SearchSpec::new(2, 1).unwrap();
        let text = render_lp(&spec).unwrap();
        assert!(text.contains(" mono_1_1_1: x_1_1 - x_1_0 >= 0\n"));
        assert!(text.contains(" thr_2: 1 x_2_0 + 1 x_2_1 >= 2\n"));
        assert!(text.contains(" alloc_1: x_1_0 + x_2_1 <= 1\n"));
    }
}
