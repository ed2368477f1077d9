//! Exact partial weighted MaxSAT: relax soft clauses, bound the falsified
//! weight with a generalized totalizer, and tighten the bound under
//! assumptions on one incremental SAT solver until it becomes unsatisfiable.

use std::collections::BTreeMap;
use std::time::Instant;

use crate::sat::{Lit, SolveResult, Solver};
use crate::{MaxSatOutcome, Status, WcnfInstance};

/// Totalizer node: sorted `(sum, literal)` pairs where the literal is
/// implied whenever the relaxed weight below the node equals `sum` (sums
/// at or above the cap share one literal).
type Node = Vec<(u64, Lit)>;

fn merge(s: &mut Solver, a: &Node, b: &Node, cap: u64) -> Node {
    let mut out: BTreeMap<u64, Lit> = BTreeMap::new();
    let mut lit = |s: &mut Solver, v: u64| *out.entry(v).or_insert_with(|| Lit::new(s.new_var(), false));
    for &(x, lx) in a.iter().chain(b) {
        let o = lit(s, x.min(cap));
        s.add_clause(&[!lx, o]);
    }
    for &(x, lx) in a {
        for &(y, ly) in b {
            let o = lit(s, (x + y).min(cap));
            s.add_clause(&[!lx, !ly, o]);
        }
    }
    out.into_iter().collect()
}

fn totalizer(s: &mut Solver, leaves: &[(u64, Lit)], cap: u64) -> Node {
    match leaves {
        [] => vec![],
        [(w, l)] => vec![((*w).min(cap), *l)],
        _ => {
            let (x, y) = leaves.split_at(leaves.len() / 2);
            let a = totalizer(s, x, cap);
            let b = totalizer(s, y, cap);
            merge(s, &a, &b, cap)
        }
    }
}

pub fn solve_builtin(inst: &WcnfInstance, deadline: Option<Instant>) -> MaxSatOutcome {
    let total = inst.total_soft_weight();
    let mut s = Solver::new();
    s.reserve_vars(inst.num_vars);
    for c in &inst.hard {
        s.add_dimacs_clause(c);
    }
    let mut leaves = Vec::new();
    for (w, c) in &inst.soft {
        match c.as_slice() {
            [] => {}
            [l] => leaves.push((*w, !Lit::from_dimacs(*l))),
            _ => {
                let r = Lit::new(s.new_var(), false);
                let mut lits: Vec<Lit> = c.iter().map(|&l| Lit::from_dimacs(l)).collect();
                lits.push(r);
                s.add_clause(&lits);
                leaves.push((*w, r));
            }
        }
    }
    let unknown = |best: Option<(Vec<bool>, u64)>| MaxSatOutcome {
        status: Status::Unknown,
        cost: best.as_ref().map(|b| b.1),
        model: best.map(|b| b.0),
        total_soft: total,
    };
    let model_of = |s: &Solver| s.model()[..inst.num_vars as usize].to_vec();
    match s.solve(&[], deadline) {
        SolveResult::Unsat => {
            return MaxSatOutcome {
                status: Status::HardUnsat,
                model: None,
                cost: None,
                total_soft: total,
            }
        }
        SolveResult::Interrupted => return unknown(None),
        SolveResult::Sat => {}
    }
    let mut best = model_of(&s);
    let mut ub = inst.cost(&best).expect("model satisfies hard clauses");
    // the weight of empty soft clauses is unavoidable
    let empty: u64 = inst.soft.iter().filter(|c| c.1.is_empty()).map(|c| c.0).sum();
    if ub > empty {
        leaves.sort_by_key(|l| std::cmp::Reverse(l.0));
        let root = totalizer(&mut s, &leaves, ub);
        // linear search from above: each model tightens the budget, and
        // only the final query is unsatisfiable
        while ub > empty {
            let budget = ub - 1 - empty;
            // outputs fire for the exact sums reached, so every output
            // above the budget has to be blocked
            let assume: Vec<Lit> = root
                .iter()
                .filter(|(v, _)| *v > budget)
                .map(|&(_, l)| !l)
                .collect();
            match s.solve(&assume, deadline) {
                SolveResult::Sat => {
                    let m = model_of(&s);
                    let c = inst.cost(&m).expect("model satisfies hard clauses");
                    debug_assert!(c < ub);
                    best = m;
                    ub = c;
                }
                SolveResult::Unsat => break,
                SolveResult::Interrupted => return unknown(Some((best, ub))),
            }
        }
    }
    MaxSatOutcome {
        status: Status::Optimum,
        model: Some(best),
        cost: Some(ub),
        total_soft: total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_outcomes() {
        let mut w = WcnfInstance::new();
        w.add_hard(vec![1]);
        w.add_soft(1, vec![-1]);
        let o = solve_builtin(&w, None);
        assert_eq!((o.status, o.cost), (Status::Optimum, Some(1)));
        assert_eq!(o.satisfied_weight(), Some(0));

        let mut w = WcnfInstance::new();
        w.add_hard(vec![1]);
        w.add_hard(vec![-1]);
        assert_eq!(solve_builtin(&w, None).status, Status::HardUnsat);

        let mut w = WcnfInstance::new();
        w.add_soft(2, vec![1, 2]);
        w.add_soft(3, vec![-1]);
        let o = solve_builtin(&w, None);
        assert_eq!(o.cost, Some(0));
    }

    #[test]
    fn weights_trade_off() {
        // at most one of x1..x3; prefer x3 (weight 5) over x1 + x2 (2 + 2)
        let mut w = WcnfInstance::new();
        for (a, b) in [(1, 2), (1, 3), (2, 3)] {
            w.add_hard(vec![-a, -b]);
        }
        w.add_soft(2, vec![1]);
        w.add_soft(2, vec![2]);
        w.add_soft(5, vec![3]);
        w.add_soft(1, vec![]);
        let o = solve_builtin(&w, None);
        assert_eq!(o.cost, Some(5));
        assert!(o.model.unwrap()[2]);
    }
}
