//! Text format for problems.
//!
//! ```text
//! # restaurant with two tables
//! inputs: req1 req2
//! outputs: table1 table2
//! options: scheme=user
//! hard: G (!table1 | !table2)
//! soft[weight=1,4,16]: G (req1 -> X table1)
//! soft[relax=chain weight=1,2]: G (req2 -> X table2); G F (req2 -> X table2)
//! ```
//!
//! `hard:` lines are conjoined in order. A plain `soft:` line holding
//! `G psi` with `psi` syntactically safe gets the chain `(G psi, F G psi,
//! G F psi)`; any other formula becomes a one-level chain. Bracket options
//! on `soft` lines: `relax=gfg` demands the default chain, `relax=chain`
//! reads a `;`-separated chain, `weight=` gives per-level weights.

use std::fmt::Write as _;

use crate::ltl::{parse, Formula, LtlError, ProblemError, Scheme, SoftSpec, SpecProblem};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SpecFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Formula { line: usize, source: LtlError },
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

fn syntax(line: usize, message: impl Into<String>) -> SpecFileError {
    SpecFileError::Syntax {
        line,
        message: message.into(),
    }
}

pub fn parse_spec(text: &str) -> Result<SpecProblem, SpecFileError> {
    let mut p = SpecProblem::default();
    let mut seen_io = (false, false, false);
    for (k, raw) in text.lines().enumerate() {
        let ln = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (head, body) = line
            .split_once(':')
            .ok_or_else(|| syntax(ln, "expected `key: value`"))?;
        let head = head.trim();
        let body = body.trim();
        let formula =
            |s: &str| parse(s).map_err(|source| SpecFileError::Formula { line: ln, source });
        let names = |s: &str| -> Vec<String> {
            s.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|x| !x.is_empty())
                .map(String::from)
                .collect()
        };
        match head {
            "inputs" | "outputs" | "options" => {
                let flag = match head {
                    "inputs" => &mut seen_io.0,
                    "outputs" => &mut seen_io.1,
                    _ => &mut seen_io.2,
                };
                if std::mem::replace(flag, true) {
                    return Err(syntax(ln, format!("duplicate `{head}` line")));
                }
                match head {
                    "inputs" => p.inputs = names(body),
                    "outputs" => p.outputs = names(body),
                    _ => {
                        for opt in body.split_whitespace() {
                            match opt.split_once('=') {
                                Some(("scheme", v)) => {
                                    p.scheme = Scheme::from_name(v).ok_or_else(|| {
                                        syntax(ln, format!("unknown scheme `{v}`"))
                                    })?
                                }
                                _ => return Err(syntax(ln, format!("unknown option `{opt}`"))),
                            }
                        }
                    }
                }
            }
            "hard" => p.hard_parts.push(formula(body)?),
            _ if head == "soft" || head.starts_with("soft[") => {
                let opts = match head.strip_prefix("soft") {
                    Some("") => "",
                    Some(rest) => rest
                        .strip_prefix('[')
                        .and_then(|r| r.strip_suffix(']'))
                        .ok_or_else(|| syntax(ln, "malformed soft options"))?,
                    None => unreachable!(),
                };
                let mut relax = None;
                let mut weights = None;
                for opt in opts.split_whitespace() {
                    match opt.split_once('=') {
                        Some(("relax", v @ ("gfg" | "chain"))) => relax = Some(v),
                        Some(("weight", v)) => {
                            let w: Result<Vec<u64>, _> = v.split(',').map(str::parse).collect();
                            weights =
                                Some(w.map_err(|_| syntax(ln, format!("bad weights `{v}`")))?);
                        }
                        _ => return Err(syntax(ln, format!("unknown soft option `{opt}`"))),
                    }
                }
                let mut spec = match relax {
                    Some("chain") => {
                        let chain = body
                            .split(';')
                            .map(|s| formula(s.trim()))
                            .collect::<Result<Vec<_>, _>>()?;
                        SoftSpec::with_chain(chain)
                    }
                    Some(_) => SoftSpec::safety(formula(body)?)
                        .map_err(|source| SpecFileError::Formula { line: ln, source })?,
                    None => {
                        let f = formula(body)?;
                        SoftSpec::safety(f.clone())
                            .unwrap_or_else(|_| SoftSpec::with_chain(vec![f]))
                    }
                };
                spec.weights = weights;
                p.soft.push(spec);
            }
            _ => return Err(syntax(ln, format!("unknown key `{head}`"))),
        }
    }
    p.validate()?;
    Ok(p)
}

pub fn emit_spec(p: &SpecProblem) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "inputs: {}", p.inputs.join(" "));
    let _ = writeln!(s, "outputs: {}", p.outputs.join(" "));
    let _ = writeln!(s, "options: scheme={}", p.scheme.name());
    for h in &p.hard_parts {
        let _ = writeln!(s, "hard: {h}");
    }
    for sp in &p.soft {
        let mut opts = Vec::new();
        let default = sp.has_default_chain();
        if !default {
            opts.push("relax=chain".to_string());
        }
        if let Some(w) = &sp.weights {
            let w: Vec<String> = w.iter().map(u64::to_string).collect();
            opts.push(format!("weight={}", w.join(",")));
        }
        let head = if opts.is_empty() {
            "soft".to_string()
        } else {
            format!("soft[{}]", opts.join(" "))
        };
        let body = if default {
            sp.formula.to_string()
        } else {
            sp.chain
                .iter()
                .map(Formula::to_string)
                .collect::<Vec<_>>()
                .join("; ")
        };
        let _ = writeln!(s, "{head}: {body}");
    }
    s
}
