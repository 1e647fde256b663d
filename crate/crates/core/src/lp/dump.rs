//! Plain-text dump of an [`LpProblem`], one constraint per line, for
//! cross-checking with external solvers.
//!
//! ```text
//! sdr-svm-lp 1
//! vars <n> cons <m>
//! obj <c_1> ... <c_n>
//! <GE|LE|EQ> <rhs> <a_1> ... <a_n>
//! ```
//!
//! Numbers use `{:.17e}` so every value round-trips exactly.

use std::io::{BufRead, Write};

use ndarray::Array2;

use super::{LpProblem, Sense};
use crate::error::{Error, Result};

const MAGIC: &str = "sdr-svm-lp 1";

fn sense_token(s: Sense) -> &'static str {
    match s {
        Sense::Ge => "GE",
        Sense::Le => "LE",
        Sense::Eq => "EQ",
    }
}

pub fn write_dump<W: Write>(p: &LpProblem, mut out: W) -> Result<()> {
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "vars {} cons {}", p.n_vars(), p.n_constraints())?;
    write!(out, "obj")?;
    for c in &p.cost {
        write!(out, " {c:.17e}")?;
    }
    writeln!(out)?;
    for (i, row) in p.rows.outer_iter().enumerate() {
        write!(out, "{} {:.17e}", sense_token(p.senses[i]), p.rhs[i])?;
        for a in row {
            write!(out, " {a:.17e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad number {tok:?}")))
}

pub fn read_dump<R: BufRead>(input: R) -> Result<LpProblem> {
    let lines: Vec<String> = input.lines().collect::<std::io::Result<_>>()?;
    if lines.first().map(|s| s.trim()) != Some(MAGIC) {
        return Err(parse_err(1, "missing header"));
    }
    let dims: Vec<&str> = lines
        .get(1)
        .ok_or_else(|| parse_err(2, "missing dimensions"))?
        .split_whitespace()
        .collect();
    if dims.len() != 4 || dims[0] != "vars" || dims[2] != "cons" {
        return Err(parse_err(2, "expected `vars <n> cons <m>`"));
    }
    let n: usize = dims[1].parse().map_err(|_| parse_err(2, "bad var count"))?;
    let m: usize = dims[3].parse().map_err(|_| parse_err(2, "bad constraint count"))?;

    let obj_line = lines.get(2).ok_or_else(|| parse_err(3, "missing objective"))?;
    let mut toks = obj_line.split_whitespace();
    if toks.next() != Some("obj") {
        return Err(parse_err(3, "expected `obj`"));
    }
    let cost: Vec<f64> = toks.map(|t| parse_f64(t, 3)).collect::<Result<_>>()?;
    if cost.len() != n {
        return Err(parse_err(3, format!("expected {n} costs, got {}", cost.len())));
    }

    let mut rows = Array2::zeros((m, n));
    let mut senses = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let ln = i + 4;
        let line = lines.get(i + 3).ok_or_else(|| parse_err(ln, "missing constraint"))?;
        let mut toks = line.split_whitespace();
        senses.push(match toks.next() {
            Some("GE") => Sense::Ge,
            Some("LE") => Sense::Le,
            Some("EQ") => Sense::Eq,
            other => return Err(parse_err(ln, format!("bad sense {other:?}"))),
        });
        rhs.push(parse_f64(toks.next().ok_or_else(|| parse_err(ln, "missing rhs"))?, ln)?);
        let coeffs: Vec<f64> = toks.map(|t| parse_f64(t, ln)).collect::<Result<_>>()?;
        if coeffs.len() != n {
            return Err(parse_err(ln, format!("expected {n} coefficients, got {}", coeffs.len())));
        }
        for (j, a) in coeffs.into_iter().enumerate() {
            rows[[i, j]] = a;
        }
    }
    LpProblem::new(cost, rows, senses, rhs)
}
