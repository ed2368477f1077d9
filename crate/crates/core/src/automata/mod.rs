//! ω-automata over symbolic guards: tableau translation from LTL, universal
//! co-Büchi automata for specifications, and the safety automata used for
//! soft specifications.

mod guard;
mod safety;
mod tableau;

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

pub use guard::{Cube, Guard};
pub use safety::{relax_fg, RelaxedAutomaton, SafetyAutomaton};

use crate::ltl::Formula;

pub const DEFAULT_STATE_CAP: usize = 5000;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum AutomatonError {
    #[error("automaton exceeds the state limit of {0}")]
    TooLarge(usize),
    #[error("at most 64 propositions are supported, got {0}")]
    TooManyPropositions(usize),
    #[error("proposition `{0}` is not in the alphabet")]
    UnknownProposition(String),
    #[error("`{0}` is not syntactically safe")]
    NotSyntacticallySafe(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Acceptance {
    /// Marked states must be visited infinitely often.
    Buchi,
    /// Marked states may be visited only finitely often.
    CoBuchi,
    /// Finite words; marked states are final.
    Finite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branching {
    Nondeterministic,
    Universal,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub src: usize,
    pub guard: Guard,
    pub dst: usize,
    /// Set on the redirected transitions of a relaxed automaton.
    pub rej: bool,
}

/// Proposition order shared by automata and transition systems: inputs
/// first, then outputs. Bit `i` of a letter is proposition `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Alphabet {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

impl Alphabet {
    pub fn new(inputs: Vec<String>, outputs: Vec<String>) -> Result<Alphabet, AutomatonError> {
        let n = inputs.len() + outputs.len();
        if n > 64 {
            return Err(AutomatonError::TooManyPropositions(n));
        }
        Ok(Alphabet { inputs, outputs })
    }

    pub fn props(&self) -> Vec<String> {
        self.inputs.iter().chain(&self.outputs).cloned().collect()
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.inputs
            .iter()
            .chain(&self.outputs)
            .position(|p| p == name)
    }

    pub fn input_mask(&self) -> u64 {
        low_mask(self.inputs.len())
    }

    pub fn letter(&self, input: u64, output: u64) -> u64 {
        input | (output << self.inputs.len())
    }
}

pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    pub alphabet: Alphabet,
    pub num_states: usize,
    pub initial: usize,
    pub edges: Vec<Edge>,
    /// Accepting states (Büchi, finite) or rejecting states (co-Büchi).
    pub marked: Vec<bool>,
    pub acceptance: Acceptance,
    pub branching: Branching,
    /// Human-readable state descriptions, for dumps.
    pub labels: Vec<String>,
    out: Vec<Vec<usize>>,
}

impl Automaton {
    pub(crate) fn new(
        alphabet: Alphabet,
        num_states: usize,
        initial: usize,
        edges: Vec<Edge>,
        marked: Vec<bool>,
        acceptance: Acceptance,
        labels: Vec<String>,
    ) -> Automaton {
        let mut a = Automaton {
            alphabet,
            num_states,
            initial,
            edges,
            marked,
            acceptance,
            branching: Branching::Nondeterministic,
            labels,
            out: vec![],
        };
        a.reindex();
        a
    }

    fn reindex(&mut self) {
        self.edges.retain(|e| !e.guard.is_false());
        self.edges
            .sort_by(|a, b| (a.src, a.dst, a.rej).cmp(&(b.src, b.dst, b.rej)));
        // merge parallel edges with the same flag into one guard
        let mut merged: Vec<Edge> = Vec::with_capacity(self.edges.len());
        for e in self.edges.drain(..) {
            match merged.last_mut() {
                Some(m) if (m.src, m.dst, m.rej) == (e.src, e.dst, e.rej) => {
                    m.guard = m.guard.or(&e.guard)
                }
                _ => merged.push(e),
            }
        }
        self.edges = merged;
        self.out = vec![vec![]; self.num_states];
        for (i, e) in self.edges.iter().enumerate() {
            self.out[e.src].push(i);
        }
    }

    pub fn out_edges(&self, q: usize) -> impl Iterator<Item = &Edge> {
        self.out[q].iter().map(move |&i| &self.edges[i])
    }

    pub fn num_marked(&self) -> usize {
        self.marked.iter().filter(|&&m| m).count()
    }

    /// States with a `true` self-loop and no other outgoing edge.
    pub fn is_universal_sink(&self, q: usize) -> bool {
        let mut it = self.out_edges(q);
        matches!((it.next(), it.next()), (Some(e), None) if e.dst == q && e.guard.is_true())
    }

    /// Keeps states selected by `keep` (the initial state is always kept) and
    /// renumbers them in breadth-first order from the initial state.
    pub(crate) fn restrict(&mut self, keep: &[bool]) {
        let mut order = vec![self.initial];
        let mut id = vec![usize::MAX; self.num_states];
        id[self.initial] = 0;
        let mut i = 0;
        while i < order.len() {
            let q = order[i];
            i += 1;
            for e in self.out[q].iter().map(|&k| &self.edges[k]) {
                if keep[e.dst] && id[e.dst] == usize::MAX {
                    id[e.dst] = order.len();
                    order.push(e.dst);
                }
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| id[e.src] != usize::MAX && id[e.dst] != usize::MAX)
            .map(|e| Edge {
                src: id[e.src],
                dst: id[e.dst],
                guard: e.guard.clone(),
                rej: e.rej,
            })
            .collect();
        self.marked = order.iter().map(|&q| self.marked[q]).collect();
        self.labels = order.iter().map(|&q| self.labels[q].clone()).collect();
        self.num_states = order.len();
        self.initial = 0;
        self.edges = edges;
        self.reindex();
    }

    pub(crate) fn prune_unreachable(&mut self) {
        self.restrict(&vec![true; self.num_states]);
    }

    /// Drops states from which no marked state is reachable (finite words) or
    /// no marked cycle is reachable (Büchi and co-Büchi). Neither changes the
    /// language of the nondeterministic reading nor the set of systems
    /// accepted by the universal co-Büchi reading.
    pub(crate) fn prune_useless(&mut self) {
        let n = self.num_states;
        let mut good = vec![false; n];
        match self.acceptance {
            Acceptance::Finite => good.clone_from(&self.marked),
            _ => {
                let comp = scc(n, |q| self.out_edges(q).map(|e| e.dst).collect());
                let mut size = vec![0usize; n];
                for &c in &comp {
                    size[c] += 1;
                }
                for q in 0..n {
                    let cyclic = size[comp[q]] > 1 || self.out_edges(q).any(|e| e.dst == q);
                    if self.marked[q] && cyclic {
                        for r in 0..n {
                            if comp[r] == comp[q] {
                                good[r] = true;
                            }
                        }
                    }
                }
            }
        }
        // backward closure
        let mut changed = true;
        while changed {
            changed = false;
            for e in &self.edges {
                if good[e.dst] && !good[e.src] {
                    good[e.src] = true;
                    changed = true;
                }
            }
        }
        if !good[self.initial] {
            // empty language: a single non-marked state without edges
            self.num_states = 1;
            self.initial = 0;
            self.marked = vec![false];
            self.labels = vec!["empty".into()];
            self.edges.clear();
            self.reindex();
            return;
        }
        self.restrict(&good);
    }

    /// Quotient by bisimulation over (marking, guarded successors).
    pub(crate) fn merge_bisimilar(&mut self) {
        let n = self.num_states;
        let mut block: Vec<usize> = self.marked.iter().map(|&m| m as usize).collect();
        loop {
            let mut sig_id: HashMap<(usize, Vec<(Guard, usize, bool)>), usize> = HashMap::new();
            let mut next = vec![0; n];
            for q in 0..n {
                let mut succ: BTreeMap<(usize, bool), Guard> = BTreeMap::new();
                for e in self.out_edges(q) {
                    let g = succ.entry((block[e.dst], e.rej)).or_insert_with(Guard::ff);
                    *g = g.or(&e.guard);
                }
                let sig: Vec<(Guard, usize, bool)> =
                    succ.into_iter().map(|((b, r), g)| (g, b, r)).collect();
                let fresh = sig_id.len();
                next[q] = *sig_id.entry((block[q], sig)).or_insert(fresh);
            }
            let stable =
                sig_id.len() == block.iter().collect::<std::collections::HashSet<_>>().len();
            block = next;
            if stable {
                break;
            }
        }
        let nb = block.iter().max().map_or(0, |m| m + 1);
        if nb == n {
            return;
        }
        let mut rep = vec![usize::MAX; nb];
        for q in 0..n {
            if rep[block[q]] == usize::MAX {
                rep[block[q]] = q;
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| rep[block[e.src]] == e.src)
            .map(|e| Edge {
                src: block[e.src],
                dst: block[e.dst],
                guard: e.guard.clone(),
                rej: e.rej,
            })
            .collect();
        self.marked = rep.iter().map(|&q| self.marked[q]).collect();
        self.labels = rep.iter().map(|&q| self.labels[q].clone()).collect();
        self.initial = block[self.initial];
        self.num_states = nb;
        self.edges = edges;
        self.reindex();
        self.prune_unreachable();
    }

    /// Plain-text listing in the spirit of the HOA format.
    pub fn dump(&self) -> String {
        let props = self.alphabet.props();
        let mut s = String::new();
        let acc = match self.acceptance {
            Acceptance::Buchi => "Buchi",
            Acceptance::CoBuchi => "co-Buchi",
            Acceptance::Finite => "finite",
        };
        let br = match self.branching {
            Branching::Nondeterministic => "nondeterministic",
            Branching::Universal => "universal",
        };
        let _ = writeln!(s, "States: {}", self.num_states);
        let _ = writeln!(s, "Start: {}", self.initial);
        let quoted: Vec<String> = props.iter().map(|p| format!("\"{p}\"")).collect();
        let _ = writeln!(s, "AP: {} {}", props.len(), quoted.join(" "));
        let _ = writeln!(s, "Acceptance: {acc} {br}");
        let _ = writeln!(s, "--BODY--");
        for q in 0..self.num_states {
            let mark = if self.marked[q] { " {marked}" } else { "" };
            let _ = writeln!(s, "State: {q} \"{}\"{mark}", self.labels[q]);
            for e in self.out_edges(q) {
                let rej = if e.rej { " {rej}" } else { "" };
                let _ = writeln!(s, "  [{}] {}{rej}", e.guard.display(&props), e.dst);
            }
        }
        let _ = writeln!(s, "--END--");
        s
    }
}

/// Tarjan's algorithm, iterative. Returns the component index of each node;
/// components are numbered in reverse topological order.
pub(crate) fn scc(n: usize, succ: impl Fn(usize) -> Vec<usize>) -> Vec<usize> {
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, Vec<usize>, usize)> = vec![(root, succ(root), 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some((v, ws, i)) = call.last_mut() {
            let v = *v;
            if *i < ws.len() {
                let w = ws[*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    let sw = succ(w);
                    call.push((w, sw, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some((u, _, _)) = call.last() {
                    low[*u] = low[*u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

/// Builds automata over a fixed alphabet.
#[derive(Debug, Clone)]
pub struct Builder {
    pub alphabet: Alphabet,
    pub state_cap: usize,
}

impl Builder {
    pub fn new(alphabet: Alphabet) -> Builder {
        Builder {
            alphabet,
            state_cap: DEFAULT_STATE_CAP,
        }
    }

    pub fn with_cap(mut self, cap: usize) -> Builder {
        self.state_cap = cap;
        self
    }

    /// Nondeterministic Büchi automaton for `f` (any formula; normalized to
    /// NNF first).
    pub fn nba(&self, f: &Formula) -> Result<Automaton, AutomatonError> {
        tableau::nba(self, &f.to_nnf())
    }

    /// Universal co-Büchi automaton accepting exactly the systems satisfying
    /// `f`: the Büchi automaton of `!f`, read universally.
    pub fn ucw(&self, f: &Formula) -> Result<Automaton, AutomatonError> {
        let mut a = self.nba(&Formula::not(f.clone()))?;
        a.acceptance = Acceptance::CoBuchi;
        a.branching = Branching::Universal;
        Ok(a)
    }

    /// Finite-word automaton accepting bad prefixes of the safe formula `psi`,
    /// with at least one accepted prefix for every violating word.
    pub fn bad_prefix_nfa(&self, psi: &Formula) -> Result<Automaton, AutomatonError> {
        if !psi.is_syntactically_safe() {
            return Err(AutomatonError::NotSyntacticallySafe(psi.to_string()));
        }
        tableau::nfa(self, &Formula::not(psi.clone()).to_nnf())
    }

    pub fn b_gpsi(&self, psi: &Formula) -> Result<SafetyAutomaton, AutomatonError> {
        safety::build_b_gpsi(self, psi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scc_of_small_graph() {
        // 0 -> 1 -> 2 -> 1, 2 -> 3
        let adj = [vec![1], vec![2], vec![1, 3], vec![]];
        let c = scc(4, |v| adj[v].clone());
        assert_eq!(c[1], c[2]);
        assert_ne!(c[0], c[1]);
        assert_ne!(c[3], c[1]);
        // reverse topological numbering: sinks first
        assert!(c[3] < c[1] && c[1] < c[0]);
    }
}
