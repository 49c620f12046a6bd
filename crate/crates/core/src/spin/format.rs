//! Line-oriented Hamiltonian text format.
//!
//! ```text
//! # comment
//! n 4
//! c -1.5
//! t 0.25 0 1
//! t 1 0 1 2 3
//! ```
//!
//! Indices are 0-based. `n` must precede any term. The writer emits the
//! canonical form: `n`, then `c`, then terms ordered by length and indices.

use std::fmt::Write as _;

use super::IsingHamiltonian;
use crate::{Error, Result};

pub fn write_hamiltonian(h: &IsingHamiltonian) -> String {
    let mut out = String::new();
    writeln!(out, "n {}", h.n()).unwrap();
    writeln!(out, "c {}", h.constant()).unwrap();
    for t in h.terms() {
        write!(out, "t {}", t.weight).unwrap();
        for i in &t.support {
            write!(out, " {i}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_hamiltonian(text: &str) -> Result<IsingHamiltonian> {
    let mut h: Option<IsingHamiltonian> = None;
    let mut constant = 0.0;
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let err = |msg: String| Error::Parse { line: line_no, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let tag = parts.next().unwrap();
        let num = |s: Option<&str>, what: &str| -> Result<f64> {
            let s = s.ok_or_else(|| err(format!("missing {what}")))?;
            s.parse::<f64>()
                .map_err(|_| err(format!("bad {what} {s:?}")))
                .and_then(|v| {
                    if v.is_finite() {
                        Ok(v)
                    } else {
                        Err(err(format!("non-finite {what}")))
                    }
                })
        };
        match tag {
            "n" => {
                if h.is_some() {
                    return Err(err("duplicate n line".into()));
                }
                let s = parts.next().ok_or_else(|| err("missing spin count".into()))?;
                let n: usize = s.parse().map_err(|_| err(format!("bad spin count {s:?}")))?;
                if n == 0 {
                    return Err(err("spin count must be ≥ 1".into()));
                }
                h = Some(IsingHamiltonian::new(n));
            }
            "c" => constant += num(parts.next(), "constant")?,
            "t" => {
                let w = num(parts.next(), "weight")?;
                let support = parts
                    .map(|s| s.parse::<usize>().map_err(|_| err(format!("bad index {s:?}"))))
                    .collect::<Result<Vec<_>>>()?;
                let ham = h.as_mut().ok_or_else(|| err("term before n line".into()))?;
                ham.add_term(&support, w).map_err(|e| err(e.to_string()))?;
            }
            other => return Err(err(format!("unknown record {other:?}"))),
        }
    }
    let mut h = h.ok_or(Error::Parse {
        line: 0,
        msg: "missing n line".into(),
    })?;
    h.add_constant(constant);
    Ok(h)
}
