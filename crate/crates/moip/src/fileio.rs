//! Text serialization: instance files and front files.
//!
//! Instance format (whitespace-separated tokens, `#` starts a comment line):
//!
//! ```text
//! MOIP <n> <c>
//! OBJ <c integers>          # n of these
//! VARS <c tokens>           # each `B` or `I:<lb>:<ub>`
//! ROW <c integers> <LE|EQ|GE> <rhs>   # zero or more
//! END
//! ```
//!
//! Front format: one vector per line, `n` integers space-separated, sorted
//! lexicographically ascending so files diff bit-exactly.

use std::path::Path;

use crate::model::{
    ConstraintRow, MoipInstance, ObjectiveVector, Relation, Value, VarKind,
};
use crate::{Error, Result};

pub fn write_instance(inst: &MoipInstance) -> String {
    let mut out = String::new();
    out.push_str(&format!("MOIP {} {}\n", inst.num_objectives(), inst.num_vars()));
    for obj in inst.objectives() {
        out.push_str("OBJ");
        for c in obj {
            out.push_str(&format!(" {c}"));
        }
        out.push('\n');
    }
    out.push_str("VARS");
    for kind in inst.var_kinds() {
        match kind {
            VarKind::Binary => out.push_str(" B"),
            VarKind::Integer { lb, ub } => out.push_str(&format!(" I:{lb}:{ub}")),
        }
    }
    out.push('\n');
    for row in inst.constraint_rows() {
        out.push_str("ROW");
        for c in &row.coeffs {
            out.push_str(&format!(" {c}"));
        }
        out.push_str(&format!(" {} {}\n", row.relation, row.rhs));
    }
    out.push_str("END\n");
    out
}

pub fn write_instance_file(path: &Path, inst: &MoipInstance, header: Option<&str>) -> Result<()> {
    let mut text = String::new();
    if let Some(h) = header {
        text.push_str(&format!("# {h}\n"));
    }
    text.push_str(&write_instance(inst));
    std::fs::write(path, text)?;
    Ok(())
}

struct Tokens<'a> {
    line: usize,
    items: std::str::SplitWhitespace<'a>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

impl<'a> Tokens<'a> {
    fn next(&mut self) -> Result<&'a str> {
        self.items
            .next()
            .ok_or_else(|| parse_err(self.line, "unexpected end of line"))
    }

    fn next_int(&mut self) -> Result<Value> {
        let tok = self.next()?;
        tok.parse()
            .map_err(|_| parse_err(self.line, format!("expected integer, found '{tok}'")))
    }

    fn finish(mut self) -> Result<()> {
        match self.items.next() {
            Some(extra) => Err(parse_err(self.line, format!("trailing token '{extra}'"))),
            None => Ok(()),
        }
    }
}

pub fn read_instance(text: &str) -> Result<MoipInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('#')
        });
    let mut last_line = 0;
    let mut take = |expect: &str| -> Result<(usize, Tokens<'_>)> {
        match lines.next() {
            Some((no, l)) => {
                last_line = no;
                Ok((no, Tokens { line: no, items: l.split_whitespace() }))
            }
            None => Err(parse_err(last_line + 1, format!("missing {expect}"))),
        }
    };

    let (line, mut toks) = take("MOIP header")?;
    if toks.next()? != "MOIP" {
        return Err(parse_err(line, "expected 'MOIP <n> <c>'"));
    }
    let n = toks.next_int()?;
    let c = toks.next_int()?;
    toks.finish()?;
    if n < 1 || c < 1 {
        return Err(parse_err(line, "objective and variable counts must be positive"));
    }
    let (n, c) = (n as usize, c as usize);

    let mut objectives = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, mut toks) = take("OBJ line")?;
        if toks.next()? != "OBJ" {
            return Err(parse_err(line, "expected 'OBJ <coefficients>'"));
        }
        let coeffs: Vec<Value> = (0..c)
            .map(|_| toks.next_int())
            .collect::<Result<_>>()?;
        toks.finish()?;
        objectives.push(coeffs);
    }

    let (line, mut toks) = take("VARS line")?;
    if toks.next()? != "VARS" {
        return Err(parse_err(line, "expected 'VARS <kinds>'"));
    }
    let mut kinds = Vec::with_capacity(c);
    for _ in 0..c {
        let tok = toks.next()?;
        if tok == "B" {
            kinds.push(VarKind::Binary);
        } else if let Some(rest) = tok.strip_prefix("I:") {
            let (lb, ub) = rest
                .split_once(':')
                .ok_or_else(|| parse_err(line, format!("malformed kind '{tok}'")))?;
            let lb = lb
                .parse()
                .map_err(|_| parse_err(line, format!("bad lower bound in '{tok}'")))?;
            let ub = ub
                .parse()
                .map_err(|_| parse_err(line, format!("bad upper bound in '{tok}'")))?;
            kinds.push(VarKind::Integer { lb, ub });
        } else {
            return Err(parse_err(line, format!("unknown variable kind '{tok}'")));
        }
    }
    toks.finish()?;

    let mut rows = Vec::new();
    loop {
        let (line, mut toks) = take("ROW or END")?;
        match toks.next()? {
            "END" => {
                toks.finish()?;
                break;
            }
            "ROW" => {
                let coeffs: Vec<Value> = (0..c)
                    .map(|_| toks.next_int())
                    .collect::<Result<_>>()?;
                let relation = match toks.next()? {
                    "LE" => Relation::Le,
                    "EQ" => Relation::Eq,
                    "GE" => Relation::Ge,
                    other => {
                        return Err(parse_err(line, format!("unknown relation '{other}'")))
                    }
                };
                let rhs = toks.next_int()?;
                toks.finish()?;
                rows.push(ConstraintRow::new(coeffs, relation, rhs));
            }
            other => return Err(parse_err(line, format!("expected ROW or END, found '{other}'"))),
        }
    }

    MoipInstance::new(objectives, rows, kinds)
        .map_err(|e| parse_err(last_line, e.to_string()))
}

pub fn read_instance_file(path: &Path) -> Result<MoipInstance> {
    read_instance(&std::fs::read_to_string(path)?)
}

/// Canonical order for front files: lexicographic ascending, deduplicated.
pub fn canonical_front(vs: &[ObjectiveVector]) -> Vec<ObjectiveVector> {
    let mut out = vs.to_vec();
    out.sort();
    out.dedup();
    out
}

/// Serialize a front in canonical order.
pub fn write_front(vs: &[ObjectiveVector]) -> String {
    let mut out = String::new();
    for v in canonical_front(vs) {
        let line: Vec<String> = v.values().iter().map(|x| x.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_front(text: &str) -> Result<Vec<ObjectiveVector>> {
    let mut vectors: Vec<ObjectiveVector> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let values: Vec<Value> = trimmed
            .split_whitespace()
            .map(|tok| {
                tok.parse()
                    .map_err(|_| parse_err(i + 1, format!("expected integer, found '{tok}'")))
            })
            .collect::<Result<_>>()?;
        if let Some(first) = vectors.first() {
            if first.len() != values.len() {
                return Err(parse_err(i + 1, "inconsistent vector length"));
            }
        }
        vectors.push(ObjectiveVector(values));
    }
    Ok(vectors)
}
