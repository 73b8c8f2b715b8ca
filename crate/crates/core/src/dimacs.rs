//! DIMACS CNF and change-set text formats.
//!
//! CNF: `p cnf <nvars> <nclauses>` header, then 0-terminated clauses.
//! Comment lines start with `c`. The declared alphabet is `1..=nvars`.
//!
//! Change sets: one change per line, `+ <lits> 0` adds a clause and
//! `- <lits> 0` deletes one.

use std::fmt::Write as _;

use crate::cnf::{ChangeSet, Clause, CnfFormula};
use crate::error::{Error, Result};

pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(u32, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if let Some(rest) = line.strip_prefix('p') {
            if header.is_some() {
                return Err(Error::parse(lineno, "duplicate header"));
            }
            let fields: Vec<&str> = rest.split_whitespace().collect();
            match fields.as_slice() {
                ["cnf", vars, count] => {
                    let vars = vars
                        .parse()
                        .map_err(|_| Error::parse(lineno, "bad variable count"))?;
                    let count = count
                        .parse()
                        .map_err(|_| Error::parse(lineno, "bad clause count"))?;
                    header = Some((vars, count));
                }
                _ => return Err(Error::parse(lineno, "expected `p cnf <vars> <clauses>`")),
            }
            continue;
        }
        let Some((nvars, _)) = header else {
            return Err(Error::parse(lineno, "clause before header"));
        };
        for tok in line.split_whitespace() {
            let value: i64 = tok
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad literal `{tok}`")))?;
            if value == 0 {
                clauses.push(Clause::from_dimacs(&current)?);
                current.clear();
            } else {
                if value.unsigned_abs() > u64::from(nvars) {
                    return Err(Error::parse(
                        lineno,
                        format!("literal {value} exceeds declared variable count {nvars}"),
                    ));
                }
                current.push(value);
            }
        }
    }

    let (nvars, count) = header.ok_or_else(|| Error::parse(0, "missing header"))?;
    if !current.is_empty() {
        return Err(Error::parse(0, "last clause is not terminated by 0"));
    }
    if clauses.len() != count {
        return Err(Error::parse(
            0,
            format!("header announces {count} clauses, found {}", clauses.len()),
        ));
    }
    CnfFormula::over(nvars, clauses)
}

fn write_clause(out: &mut String, clause: &Clause) {
    for l in clause.literals() {
        let _ = write!(out, "{} ", l.to_dimacs());
    }
    out.push_str("0\n");
}

/// Canonical DIMACS text. The variable count is the largest declared id.
pub fn write_dimacs(formula: &CnfFormula) -> String {
    let nvars = formula.max_variable().map_or(0, |v| v.id());
    let mut out = format!("p cnf {nvars} {}\n", formula.len());
    for c in formula.clauses() {
        write_clause(&mut out, c);
    }
    out
}

pub fn parse_changes(text: &str) -> Result<ChangeSet> {
    let (mut adds, mut dels) = (Vec::new(), Vec::new());
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let (target, rest) = match line.split_at(1) {
            ("+", rest) => (&mut adds, rest),
            ("-", rest) if rest.starts_with(char::is_whitespace) => (&mut dels, rest),
            _ => return Err(Error::parse(lineno, "change lines start with `+ ` or `- `")),
        };
        let values = rest
            .split_whitespace()
            .map(|t| {
                t.parse::<i64>()
                    .map_err(|_| Error::parse(lineno, format!("bad literal `{t}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        match values.split_last() {
            Some((0, lits)) if !lits.contains(&0) => target.push(Clause::from_dimacs(lits)?),
            _ => return Err(Error::parse(lineno, "clause must end with a single 0")),
        }
    }
    ChangeSet::new(adds, dels)
}

pub fn write_changes(changes: &ChangeSet) -> String {
    let mut out = String::new();
    for c in changes.additions() {
        out.push_str("+ ");
        write_clause(&mut out, c);
    }
    for c in changes.deletions() {
        out.push_str("- ");
        write_clause(&mut out, c);
    }
    out
}
