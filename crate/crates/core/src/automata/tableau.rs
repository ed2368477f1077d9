//! Expansion-set tableau: states are sets of obligations, each state is
//! expanded into covers (a cube of literals now, obligations for the next
//! step, and the eventualities postponed).

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::{Acceptance, Automaton, AutomatonError, Builder, Cube, Edge, Guard};
use crate::ltl::Formula;
use Formula::*;

type Obligations = BTreeSet<Formula>;

#[derive(Clone)]
struct Cover {
    cube: Cube,
    next: Obligations,
    postponed: Obligations,
    seen: Obligations,
}

impl Cover {
    fn dominates(&self, other: &Cover) -> bool {
        self.cube.subsumes(&other.cube)
            && self.next.is_subset(&other.next)
            && self.postponed.is_subset(&other.postponed)
    }
}

fn literal(b: &Builder, f: &Formula) -> Result<Cube, AutomatonError> {
    let (name, pos) = match f {
        Atom(p) => (p, true),
        Not(a) => match &**a {
            Atom(p) => (p, false),
            _ => unreachable!("formula not in NNF"),
        },
        _ => unreachable!(),
    };
    let i = b
        .alphabet
        .index(name)
        .ok_or_else(|| AutomatonError::UnknownProposition(name.clone()))?;
    Ok(Cube::lit(i, pos))
}

fn expand(
    b: &Builder,
    mut todo: Vec<Formula>,
    mut c: Cover,
    out: &mut Vec<Cover>,
) -> Result<(), AutomatonError> {
    while let Some(f) = todo.pop() {
        if !c.seen.insert(f.clone()) {
            continue;
        }
        match f {
            True => {}
            False => return Ok(()),
            Atom(_) | Not(_) => match c.cube.and(&literal(b, &f)?) {
                Some(cube) => c.cube = cube,
                None => return Ok(()),
            },
            And(x, y) => {
                todo.push(*y);
                todo.push(*x);
            }
            Or(x, y) => {
                let mut alt = todo.clone();
                alt.push(*y);
                expand(b, alt, c.clone(), out)?;
                todo.push(*x);
            }
            Next(x) => {
                c.next.insert(*x);
            }
            Globally(ref x) => {
                c.next.insert(f.clone());
                todo.push((**x).clone());
            }
            Finally(ref x) => {
                let mut alt = c.clone();
                alt.next.insert(f.clone());
                alt.postponed.insert(f.clone());
                expand(b, todo.clone(), alt, out)?;
                todo.push((**x).clone());
            }
            Until(ref x, ref y) => {
                let mut alt = c.clone();
                alt.next.insert(f.clone());
                alt.postponed.insert(f.clone());
                let mut alt_todo = todo.clone();
                alt_todo.push((**x).clone());
                expand(b, alt_todo, alt, out)?;
                todo.push((**y).clone());
            }
            Release(ref x, ref y) => {
                let mut alt = c.clone();
                alt.next.insert(f.clone());
                let mut alt_todo = todo.clone();
                alt_todo.push((**y).clone());
                expand(b, alt_todo, alt, out)?;
                todo.push((**y).clone());
                todo.push((**x).clone());
            }
            Implies(..) => unreachable!("formula not in NNF"),
        }
    }
    out.push(c);
    Ok(())
}

fn covers(b: &Builder, state: &Obligations) -> Result<Vec<Cover>, AutomatonError> {
    let mut all = Vec::new();
    let start = Cover {
        cube: Cube::TRUE,
        next: BTreeSet::new(),
        postponed: BTreeSet::new(),
        seen: BTreeSet::new(),
    };
    expand(b, state.iter().cloned().collect(), start, &mut all)?;
    let mut keep: Vec<Cover> = Vec::new();
    for (i, c) in all.iter().enumerate() {
        let dominated = all
            .iter()
            .enumerate()
            .any(|(k, d)| k != i && d.dominates(c) && (!c.dominates(d) || k < i));
        if !dominated {
            keep.push(c.clone());
        }
    }
    Ok(keep)
}

/// Raw transition-based generalized Büchi automaton.
struct Tgba {
    states: Vec<Obligations>,
    /// (src, cube, dst, postponed eventualities)
    edges: Vec<(usize, Cube, usize, Obligations)>,
}

fn explore(b: &Builder, f: &Formula) -> Result<Tgba, AutomatonError> {
    let init: Obligations = [f.clone()].into_iter().collect();
    let mut states = vec![init.clone()];
    let mut index: HashMap<Obligations, usize> = HashMap::from([(init, 0)]);
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(q) = queue.pop_front() {
        for c in covers(b, &states[q].clone())? {
            let dst = match index.get(&c.next) {
                Some(&d) => d,
                None => {
                    if states.len() >= b.state_cap {
                        return Err(AutomatonError::TooLarge(b.state_cap));
                    }
                    let d = states.len();
                    states.push(c.next.clone());
                    index.insert(c.next.clone(), d);
                    queue.push_back(d);
                    d
                }
            };
            edges.push((q, c.cube, dst, c.postponed));
        }
    }
    Ok(Tgba { states, edges })
}

fn label(s: &Obligations) -> String {
    if s.is_empty() {
        return "true".into();
    }
    s.iter()
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Degeneralizes with a counter over the eventualities that are ever
/// postponed. A state `(q, i)` is accepting iff `i = k`.
fn degeneralize(b: &Builder, t: &Tgba) -> Result<Automaton, AutomatonError> {
    let evs: Vec<Formula> = t
        .edges
        .iter()
        .flat_map(|e| e.3.iter().cloned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let k = evs.len();
    let mut out: Vec<Vec<usize>> = vec![vec![]; t.states.len()];
    for (i, e) in t.edges.iter().enumerate() {
        out[e.0].push(i);
    }
    let mut index: HashMap<(usize, usize), usize> = HashMap::from([((0, 0), 0)]);
    let mut states = vec![(0usize, 0usize)];
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let (q, i) = states[id];
        for &ei in &out[q] {
            let (_, cube, dst, ref postponed) = t.edges[ei];
            let mut j = if i == k { 0 } else { i };
            while j < k && !postponed.contains(&evs[j]) {
                j += 1;
            }
            let target = match index.get(&(dst, j)) {
                Some(&d) => d,
                None => {
                    if states.len() >= b.state_cap {
                        return Err(AutomatonError::TooLarge(b.state_cap));
                    }
                    let d = states.len();
                    states.push((dst, j));
                    index.insert((dst, j), d);
                    queue.push_back(d);
                    d
                }
            };
            edges.push(Edge {
                src: id,
                guard: Guard::from_cubes([cube]),
                dst: target,
                rej: false,
            });
        }
    }
    let marked = states.iter().map(|&(_, i)| i == k).collect();
    let labels = states
        .iter()
        .map(|&(q, i)| {
            if k == 0 {
                label(&t.states[q])
            } else {
                format!("{} #{i}", label(&t.states[q]))
            }
        })
        .collect();
    Ok(Automaton::new(
        b.alphabet.clone(),
        states.len(),
        0,
        edges,
        marked,
        Acceptance::Buchi,
        labels,
    ))
}

fn component(b: &Builder, f: &Formula) -> Result<Automaton, AutomatonError> {
    let mut a = degeneralize(b, &explore(b, f)?)?;
    a.prune_useless();
    a.merge_bisimilar();
    Ok(a)
}

fn disjuncts(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Or(x, y) => {
            disjuncts(x, out);
            disjuncts(y, out);
        }
        _ => out.push(f.clone()),
    }
}

/// Nondeterministic Büchi automaton for an NNF formula. Top-level disjuncts
/// are translated separately and joined under a fresh initial state; all
/// `F` disjuncts share one component, as do all propositional ones.
pub(super) fn nba(b: &Builder, f: &Formula) -> Result<Automaton, AutomatonError> {
    let mut parts = Vec::new();
    disjuncts(f, &mut parts);
    let mut eventually = Vec::new();
    let mut propositional = Vec::new();
    let mut rest = Vec::new();
    for p in parts {
        match p {
            Finally(x) => eventually.push(*x),
            _ if p.is_propositional() => propositional.push(p),
            _ => rest.push(p),
        }
    }
    let mut groups = Vec::new();
    if !eventually.is_empty() {
        groups.push(Formula::finally(Formula::disj(eventually)));
    }
    if !propositional.is_empty() {
        groups.push(Formula::disj(propositional));
    }
    groups.extend(rest);
    if groups.len() == 1 {
        return component(b, &groups[0]);
    }
    let comps = groups
        .iter()
        .map(|g| component(b, g))
        .collect::<Result<Vec<_>, _>>()?;
    let total: usize = 1 + comps.iter().map(|c| c.num_states).sum::<usize>();
    if total > b.state_cap {
        return Err(AutomatonError::TooLarge(b.state_cap));
    }
    let mut edges = Vec::new();
    let mut marked = vec![false];
    let mut labels = vec!["init".to_string()];
    let mut offset = 1;
    for c in &comps {
        for e in &c.edges {
            edges.push(Edge {
                src: e.src + offset,
                guard: e.guard.clone(),
                dst: e.dst + offset,
                rej: false,
            });
            if e.src == c.initial {
                edges.push(Edge {
                    src: 0,
                    guard: e.guard.clone(),
                    dst: e.dst + offset,
                    rej: false,
                });
            }
        }
        marked.extend(&c.marked);
        labels.extend(c.labels.iter().cloned());
        offset += c.num_states;
    }
    let mut a = Automaton::new(
        b.alphabet.clone(),
        total,
        0,
        edges,
        marked,
        Acceptance::Buchi,
        labels,
    );
    a.prune_unreachable();
    a.merge_bisimilar();
    Ok(a)
}

/// Finite-word automaton for a co-safe NNF formula: final states are those
/// whose obligation set is empty.
pub(super) fn nfa(b: &Builder, f: &Formula) -> Result<Automaton, AutomatonError> {
    let t = explore(b, f)?;
    let marked = t.states.iter().map(|s| s.is_empty()).collect();
    let labels = t.states.iter().map(label).collect();
    let edges = t
        .edges
        .iter()
        .map(|&(src, cube, dst, _)| Edge {
            src,
            guard: Guard::from_cubes([cube]),
            dst,
            rej: false,
        })
        .collect();
    let mut a = Automaton::new(
        b.alphabet.clone(),
        t.states.len(),
        0,
        edges,
        marked,
        Acceptance::Finite,
        labels,
    );
    a.prune_useless();
    Ok(a)
}
