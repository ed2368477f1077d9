//! Mealy-style transition systems, their run graphs with automata, model
//! checking, annotations, and satisfaction values.

mod dot;

use std::collections::{BTreeSet, VecDeque};

pub use dot::{parse_dot, DotError};

use crate::automata::{
    low_mask, scc, Alphabet, Automaton, AutomatonError, Builder, RelaxedAutomaton,
};
use crate::ltl::{Formula, Lasso, SoftSpec};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum TsError {
    #[error("alphabet of the automaton does not match the transition system")]
    AlphabetMismatch,
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

/// `trans[s][i] = (successor, output valuation)` for every state `s` and
/// input valuation `i` (bit `k` of `i` is input `k`, bit `k` of the output
/// valuation is output `k`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TransitionSystem {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub initial: usize,
    pub trans: Vec<Vec<(usize, u64)>>,
}

impl TransitionSystem {
    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn num_input_valuations(&self) -> usize {
        1 << self.inputs.len()
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
        }
    }

    pub fn step(&self, s: usize, input: u64) -> (usize, u64) {
        self.trans[s][input as usize]
    }

    /// Letter (inputs and outputs) emitted when reading `input` in `s`.
    pub fn letter(&self, s: usize, input: u64) -> u64 {
        input | (self.trans[s][input as usize].1 << self.inputs.len())
    }

    pub fn is_well_formed(&self) -> bool {
        let n = self.num_states();
        let omask = low_mask(self.outputs.len());
        self.initial < n
            && self.trans.iter().all(|row| {
                row.len() == self.num_input_valuations()
                    && row.iter().all(|&(t, o)| t < n && o & !omask == 0)
            })
    }

    /// The set of propositions true in `letter`.
    pub fn letter_set(&self, letter: u64) -> BTreeSet<String> {
        self.inputs
            .iter()
            .chain(&self.outputs)
            .enumerate()
            .filter(|(i, _)| letter >> i & 1 == 1)
            .map(|(_, p)| p.clone())
            .collect()
    }

    pub fn to_dot(&self) -> String {
        dot::to_dot(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunEdge {
    pub from: usize,
    pub to: usize,
    pub letter: u64,
    /// The target automaton state is marked.
    pub marked_target: bool,
    /// Instance of a redirected (Rej) automaton edge.
    pub rej: bool,
}

/// Product of a transition system and an automaton, restricted to the nodes
/// reachable from `(s0, q0)`. Node 0 is the initial node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunGraph {
    pub nodes: Vec<(usize, usize)>,
    pub edges: Vec<RunEdge>,
}

impl RunGraph {
    pub fn build(a: &Automaton, t: &TransitionSystem) -> Result<RunGraph, TsError> {
        if a.alphabet != t.alphabet() {
            return Err(TsError::AlphabetMismatch);
        }
        let nq = a.num_states;
        let mut id = vec![usize::MAX; t.num_states() * nq];
        let mut nodes = vec![(t.initial, a.initial)];
        id[t.initial * nq + a.initial] = 0;
        let mut edges = Vec::new();
        let mut k = 0;
        while k < nodes.len() {
            let (s, q) = nodes[k];
            for i in 0..t.num_input_valuations() as u64 {
                let (s2, _) = t.step(s, i);
                let letter = t.letter(s, i);
                for e in a.out_edges(q).filter(|e| e.guard.holds(letter)) {
                    let key = s2 * nq + e.dst;
                    if id[key] == usize::MAX {
                        id[key] = nodes.len();
                        nodes.push((s2, e.dst));
                    }
                    edges.push(RunEdge {
                        from: k,
                        to: id[key],
                        letter,
                        marked_target: a.marked[e.dst],
                        rej: e.rej,
                    });
                }
            }
            k += 1;
        }
        Ok(RunGraph { nodes, edges })
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![vec![]; self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            adj[e.from].push(i);
        }
        adj
    }

    /// Least function `v` with `v(init) = start` and
    /// `v(to) >= v(from) + weight(edge)` on every edge, or `None` when a cycle
    /// has positive weight.
    fn longest_paths(&self, start: u64, weight: impl Fn(&RunEdge) -> u64) -> Option<Vec<u64>> {
        let adj = self.successors();
        let comp = scc(self.nodes.len(), |v| {
            adj[v].iter().map(|&i| self.edges[i].to).collect()
        });
        if self
            .edges
            .iter()
            .any(|e| comp[e.from] == comp[e.to] && weight(e) > 0)
        {
            return None;
        }
        let ncomp = comp.iter().max().map_or(0, |m| m + 1);
        let mut members = vec![vec![]; ncomp];
        for (v, &c) in comp.iter().enumerate() {
            members[c].push(v);
        }
        let mut val: Vec<Option<u64>> = vec![None; ncomp];
        val[comp[0]] = Some(start);
        // Tarjan numbers components in reverse topological order
        for c in (0..ncomp).rev() {
            let Some(vc) = val[c] else { continue };
            for &v in &members[c] {
                for &i in &adj[v] {
                    let e = &self.edges[i];
                    let d = comp[e.to];
                    if d != c {
                        let cand = vc + weight(e);
                        val[d] = Some(val[d].map_or(cand, |x| x.max(cand)));
                    }
                }
            }
        }
        Some(
            comp.iter()
                .map(|&c| val[c].expect("all nodes reachable"))
                .collect(),
        )
    }
}

/// Partial map from run-graph nodes `(s, q)` to natural numbers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Annotation {
    pub num_automaton_states: usize,
    pub values: Vec<Option<u64>>,
}

impl Annotation {
    fn from_graph(g: &RunGraph, nq: usize, ns: usize, vals: &[u64]) -> Annotation {
        let mut values = vec![None; ns * nq];
        for (k, &(s, q)) in g.nodes.iter().enumerate() {
            values[s * nq + q] = Some(vals[k]);
        }
        Annotation {
            num_automaton_states: nq,
            values,
        }
    }

    pub fn get(&self, s: usize, q: usize) -> Option<u64> {
        self.values[s * self.num_automaton_states + q]
    }

    pub fn max_value(&self) -> u64 {
        self.values.iter().flatten().copied().max().unwrap_or(0)
    }
}

/// Which edges require a strict increase.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnnotationKind {
    /// Edges into marked (rejecting) states.
    CoBuchi,
    /// Redirected (Rej) edges.
    Fg,
}

/// Checks the validity conditions edge by edge: the initial node is
/// annotated, annotated nodes have annotated successors, values never
/// decrease and strictly increase on the edges selected by `kind`, and no
/// value exceeds `bound`.
pub fn check_annotation(
    a: &Automaton,
    t: &TransitionSystem,
    ann: &Annotation,
    kind: AnnotationKind,
    bound: u64,
) -> Result<bool, TsError> {
    if a.alphabet != t.alphabet() {
        return Err(TsError::AlphabetMismatch);
    }
    let Some(v0) = ann.get(t.initial, a.initial) else {
        return Ok(false);
    };
    if v0 > bound {
        return Ok(false);
    }
    for s in 0..t.num_states() {
        for q in 0..a.num_states {
            let Some(v) = ann.get(s, q) else { continue };
            for i in 0..t.num_input_valuations() as u64 {
                let (s2, _) = t.step(s, i);
                let letter = t.letter(s, i);
                for e in a.out_edges(q).filter(|e| e.guard.holds(letter)) {
                    let Some(w) = ann.get(s2, e.dst) else {
                        return Ok(false);
                    };
                    let strict = match kind {
                        AnnotationKind::CoBuchi => a.marked[e.dst],
                        AnnotationKind::Fg => e.rej,
                    };
                    if w > bound || w < v || (strict && w == v) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Least valid annotation of the run graph of a universal co-Büchi automaton,
/// or `None` if a reachable cycle visits a rejecting state. Its values are
/// bounded by `|T| * |F|` whenever it exists.
pub fn co_buchi_annotation(
    a: &Automaton,
    t: &TransitionSystem,
) -> Result<Option<Annotation>, TsError> {
    let g = RunGraph::build(a, t)?;
    Ok(g.longest_paths(0, |e| e.marked_target as u64)
        .map(|v| Annotation::from_graph(&g, a.num_states, t.num_states(), &v)))
}

/// Least fg-valid annotation with the given initial value: each node gets
/// `initial` plus the largest number of Rej edges on a path reaching it.
/// `None` if a reachable cycle contains a Rej edge.
pub fn fg_annotation(
    r: &RelaxedAutomaton,
    t: &TransitionSystem,
    initial: u64,
) -> Result<Option<Annotation>, TsError> {
    let g = RunGraph::build(&r.base, t)?;
    Ok(g.longest_paths(initial, |e| e.rej as u64)
        .map(|v| Annotation::from_graph(&g, r.base.num_states, t.num_states(), &v)))
}

pub fn compute_fg_annotation(
    r: &RelaxedAutomaton,
    t: &TransitionSystem,
) -> Result<Option<Annotation>, TsError> {
    fg_annotation(r, t, 0)
}

/// Whether some reachable node of the run graph has an outgoing Rej edge.
pub fn rej_edge_reachable(r: &RelaxedAutomaton, t: &TransitionSystem) -> Result<bool, TsError> {
    Ok(RunGraph::build(&r.base, t)?.edges.iter().any(|e| e.rej))
}

/// Whether every path of the run graph of the universal Büchi automaton `a`
/// visits accepting states infinitely often.
pub fn universal_buchi_accepts(a: &Automaton, t: &TransitionSystem) -> Result<bool, TsError> {
    let g = RunGraph::build(a, t)?;
    // rejected iff a reachable cycle avoids accepting nodes
    let n = g.nodes.len();
    let bad: Vec<bool> = g.nodes.iter().map(|&(_, q)| !a.marked[q]).collect();
    let mut adj = vec![vec![]; n];
    for e in &g.edges {
        if bad[e.from] && bad[e.to] {
            adj[e.from].push(e.to);
        }
    }
    let comp = scc(n, |v| adj[v].clone());
    let mut size = vec![0; n];
    for &c in &comp {
        size[c] += 1;
    }
    let cyclic = (0..n).any(|v| bad[v] && (size[comp[v]] > 1 || adj[v].contains(&v)));
    Ok(!cyclic)
}

/// A violating trace of `t` for `f` as a lasso, or `None` if `t` satisfies
/// `f`. Works on the product with the Büchi automaton of `!f`.
pub fn find_violation(t: &TransitionSystem, f: &Formula) -> Result<Option<Lasso>, TsError> {
    let nba = Builder::new(Alphabet::new(t.inputs.clone(), t.outputs.clone())?)
        .nba(&Formula::not(f.clone()))?;
    let g = RunGraph::build(&nba, t)?;
    let n = g.nodes.len();
    let adj = g.successors();
    let comp = scc(n, |v| adj[v].iter().map(|&i| g.edges[i].to).collect());
    let mut size = vec![0; n];
    for &c in &comp {
        size[c] += 1;
    }
    let self_loop = |v: usize| adj[v].iter().any(|&i| g.edges[i].to == v);
    let Some(acc) =
        (0..n).find(|&v| nba.marked[g.nodes[v].1] && (size[comp[v]] > 1 || self_loop(v)))
    else {
        return Ok(None);
    };
    let prefix = bfs_path(&g, &adj, 0, acc, |_| true);
    let cycle = bfs_cycle(&g, &adj, acc, |v| comp[v] == comp[acc]);
    let to_sets = |edges: Vec<usize>| {
        edges
            .into_iter()
            .map(|i| t.letter_set(g.edges[i].letter))
            .collect()
    };
    Ok(Some(Lasso::new(to_sets(prefix), to_sets(cycle))))
}

fn bfs_path(
    g: &RunGraph,
    adj: &[Vec<usize>],
    from: usize,
    to: usize,
    allowed: impl Fn(usize) -> bool,
) -> Vec<usize> {
    if from == to {
        return vec![];
    }
    let mut pred: Vec<Option<usize>> = vec![None; g.nodes.len()];
    let mut seen = vec![false; g.nodes.len()];
    seen[from] = true;
    let mut q = VecDeque::from([from]);
    while let Some(v) = q.pop_front() {
        for &i in &adj[v] {
            let w = g.edges[i].to;
            if !seen[w] && allowed(w) {
                seen[w] = true;
                pred[w] = Some(i);
                if w == to {
                    let mut path = vec![];
                    let mut cur = to;
                    while cur != from {
                        let e = pred[cur].unwrap();
                        path.push(e);
                        cur = g.edges[e].from;
                    }
                    path.reverse();
                    return path;
                }
                q.push_back(w);
            }
        }
    }
    unreachable!("target not reachable")
}

fn bfs_cycle(
    g: &RunGraph,
    adj: &[Vec<usize>],
    v: usize,
    allowed: impl Fn(usize) -> bool,
) -> Vec<usize> {
    if let Some(&i) = adj[v].iter().find(|&&i| g.edges[i].to == v) {
        return vec![i];
    }
    let &first = adj[v]
        .iter()
        .find(|&&i| allowed(g.edges[i].to))
        .expect("node lies on a cycle");
    let mut path = vec![first];
    path.extend(bfs_path(g, adj, g.edges[first].to, v, allowed));
    path
}

pub fn model_check(t: &TransitionSystem, f: &Formula) -> Result<bool, TsError> {
    Ok(find_violation(t, f)?.is_none())
}

/// `levels[j][k]`: whether `t` satisfies the `k`-th chain element of soft
/// specification `j`.
pub fn satisfied_levels(
    t: &TransitionSystem,
    soft: &[SoftSpec],
) -> Result<Vec<Vec<bool>>, TsError> {
    soft.iter()
        .map(|s| s.chain.iter().map(|f| model_check(t, f)).collect())
        .collect()
}

/// Value vector from satisfied levels: entry `i` counts the specifications
/// satisfying their `(m - i)`-th chain element (weakest first), so that
/// vectors compare lexicographically.
pub fn value_from_levels(levels: &[Vec<bool>]) -> Vec<u32> {
    let m = levels.iter().map(Vec::len).max().unwrap_or(0);
    (0..m)
        .map(|i| {
            levels
                .iter()
                .filter(|l| m - 1 - i < l.len() && l[m - 1 - i])
                .count() as u32
        })
        .collect()
}

pub fn compute_value(t: &TransitionSystem, soft: &[SoftSpec]) -> Result<Vec<u32>, TsError> {
    Ok(value_from_levels(&satisfied_levels(t, soft)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn one_state(output: u64) -> TransitionSystem {
        TransitionSystem {
            inputs: vec!["r".into()],
            outputs: vec!["p".into()],
            initial: 0,
            trans: vec![vec![(0, output), (0, output)]],
        }
    }

    #[test]
    fn trivial_checks() {
        let t = one_state(1);
        assert!(model_check(&t, &parse("true").unwrap()).unwrap());
        assert!(model_check(&t, &parse("G p").unwrap()).unwrap());
        assert!(!model_check(&t, &parse("G !p").unwrap()).unwrap());
        assert!(!model_check(&t, &parse("F r").unwrap()).unwrap());
        let w = find_violation(&t, &parse("G (r -> X !p)").unwrap())
            .unwrap()
            .unwrap();
        assert!(!w.satisfies(&parse("G (r -> X !p)").unwrap()));
    }

    #[test]
    fn run_graph_of_trivial_automaton() {
        let t = one_state(0);
        let a = Builder::new(t.alphabet())
            .ucw(&parse("true").unwrap())
            .unwrap();
        let g = RunGraph::build(&a, &t).unwrap();
        assert!(g.nodes.len() <= t.num_states() * a.num_states);
        assert!(co_buchi_annotation(&a, &t).unwrap().is_some());
    }

    #[test]
    fn value_vector_columns() {
        let levels = vec![vec![false, false, true], vec![true, true, true]];
        assert_eq!(value_from_levels(&levels), vec![2, 1, 1]);
        assert_eq!(value_from_levels(&[]), Vec::<u32>::new());
    }
}
