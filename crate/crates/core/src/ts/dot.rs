//! Graphviz output for transition systems and a reader for the same shape.
//!
//! Edge labels are `inputs / outputs`, each a space-separated literal list
//! over all propositions (`!p` for false), or `true` when there are none.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::TransitionSystem;

fn literals(names: &[String], valuation: u64) -> String {
    if names.is_empty() {
        return "true".into();
    }
    names
        .iter()
        .enumerate()
        .map(|(i, p)| {
            if valuation >> i & 1 == 1 {
                p.clone()
            } else {
                format!("!{p}")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub(super) fn to_dot(t: &TransitionSystem) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "digraph implementation {{");
    let _ = writeln!(s, "  // inputs: {}", t.inputs.join(" "));
    let _ = writeln!(s, "  // outputs: {}", t.outputs.join(" "));
    let _ = writeln!(s, "  init [shape=point];");
    for q in 0..t.num_states() {
        let _ = writeln!(s, "  s{q} [label=\"s{q}\"];");
    }
    let _ = writeln!(s, "  init -> s{};", t.initial);
    for (q, row) in t.trans.iter().enumerate() {
        for (i, &(succ, out)) in row.iter().enumerate() {
            let _ = writeln!(
                s,
                "  s{q} -> s{succ} [label=\"{} / {}\"];",
                literals(&t.inputs, i as u64),
                literals(&t.outputs, out)
            );
        }
    }
    let _ = writeln!(s, "}}");
    s
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum DotError {
    #[error("line {0}: {1}")]
    Syntax(usize, String),
    #[error("missing initial edge `init -> sN`")]
    NoInitial,
    #[error("state s{0} has no transition for input valuation `{1}`")]
    Missing(usize, String),
    #[error("state s{0} has two transitions for input valuation `{1}`")]
    Duplicate(usize, String),
}

fn state_id(tok: &str, line: usize) -> Result<usize, DotError> {
    tok.strip_prefix('s')
        .and_then(|n| n.parse().ok())
        .ok_or_else(|| DotError::Syntax(line, format!("expected a state name sN, found `{tok}`")))
}

fn valuation(text: &str, names: &[String], line: usize, full: bool) -> Result<u64, DotError> {
    let mut val = 0u64;
    let mut set = 0u64;
    for lit in text.split_whitespace().filter(|l| *l != "true") {
        let (name, pos) = match lit.strip_prefix('!') {
            Some(n) => (n, false),
            None => (lit, true),
        };
        let i = names
            .iter()
            .position(|p| p == name)
            .ok_or_else(|| DotError::Syntax(line, format!("unknown proposition `{name}`")))?;
        set |= 1 << i;
        if pos {
            val |= 1 << i;
        }
    }
    if full && set.count_ones() as usize != names.len() {
        return Err(DotError::Syntax(line, "incomplete input valuation".into()));
    }
    Ok(val)
}

/// Reads a transition system from DOT text in the shape produced by
/// [`TransitionSystem::to_dot`]. Propositions are taken from the caller;
/// outputs missing from a label are false.
pub fn parse_dot(
    text: &str,
    inputs: &[String],
    outputs: &[String],
) -> Result<TransitionSystem, DotError> {
    let mut initial = None;
    let mut edges: BTreeMap<(usize, u64), (usize, u64)> = BTreeMap::new();
    let mut max_state = 0;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let l = raw.trim();
        let Some((lhs, rhs)) = l.split_once("->") else {
            if let Some(rest) = l.strip_prefix('s') {
                if let Some(n) = rest
                    .split(|c: char| !c.is_ascii_digit())
                    .next()
                    .and_then(|n| n.parse::<usize>().ok())
                {
                    max_state = max_state.max(n);
                }
            }
            continue;
        };
        let src = lhs.trim();
        let (dst, attrs) = match rhs.split_once('[') {
            Some((d, a)) => (d.trim(), Some(a)),
            None => (rhs.trim().trim_end_matches(';').trim(), None),
        };
        let dst = state_id(dst, line)?;
        max_state = max_state.max(dst);
        if src == "init" {
            initial = Some(dst);
            continue;
        }
        let src = state_id(src, line)?;
        max_state = max_state.max(src);
        let label = attrs
            .and_then(|a| a.split_once("label=\""))
            .and_then(|(_, rest)| rest.split_once('"'))
            .map(|(lab, _)| lab)
            .ok_or_else(|| DotError::Syntax(line, "edge without label".into()))?;
        let (inp, out) = label
            .split_once('/')
            .ok_or_else(|| DotError::Syntax(line, "label must be `inputs / outputs`".into()))?;
        let i = valuation(inp, inputs, line, true)?;
        let o = valuation(out, outputs, line, false)?;
        if edges.insert((src, i), (dst, o)).is_some() {
            return Err(DotError::Duplicate(src, inp.trim().into()));
        }
    }
    let initial = initial.ok_or(DotError::NoInitial)?;
    let n = max_state + 1;
    let names = inputs.to_vec();
    let mut trans = vec![Vec::with_capacity(1 << inputs.len()); n];
    for (s, row) in trans.iter_mut().enumerate() {
        for i in 0..(1u64 << inputs.len()) {
            match edges.get(&(s, i)) {
                Some(&e) => row.push(e),
                None => return Err(DotError::Missing(s, literals(&names, i))),
            }
        }
    }
    Ok(TransitionSystem {
        inputs: inputs.to_vec(),
        outputs: outputs.to_vec(),
        initial,
        trans,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn round_trip_and_shape() {
        let t = TransitionSystem {
            inputs: names(&["r"]),
            outputs: names(&["a", "b"]),
            initial: 0,
            trans: vec![vec![(0, 0), (1, 1)], vec![(0, 2), (1, 3)]],
        };
        let d = t.to_dot();
        assert_eq!(d, t.to_dot());
        assert!(d.contains("s0 -> s1 [label=\"r / a !b\"];"));
        assert_eq!(parse_dot(&d, &t.inputs, &t.outputs).unwrap(), t);
    }

    #[test]
    fn one_state_without_inputs() {
        let t = TransitionSystem {
            inputs: vec![],
            outputs: names(&["p"]),
            initial: 0,
            trans: vec![vec![(0, 1)]],
        };
        let d = t.to_dot();
        assert_eq!(d.matches(" -> s").count(), 2);
        assert!(d.contains("[label=\"true / p\"]"));
        assert_eq!(parse_dot(&d, &t.inputs, &t.outputs).unwrap(), t);
    }

    #[test]
    fn rejects_incomplete_machines() {
        let d = "digraph {\n init -> s0;\n s0 -> s0 [label=\"r / p\"];\n}\n";
        assert!(matches!(
            parse_dot(d, &names(&["r"]), &names(&["p"])),
            Err(DotError::Missing(0, _))
        ));
        assert_eq!(parse_dot("digraph {}", &[], &[]), Err(DotError::NoInitial));
    }
}
