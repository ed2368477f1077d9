//! Safety automata for soft specifications `G psi`: the universal Büchi
//! automaton with a rejecting sink, and its relaxation where the sink's
//! incoming transitions are redirected to the initial state.

use super::{Acceptance, Automaton, AutomatonError, Branching, Builder, Edge, Guard};
use crate::ltl::Formula;

/// Universal Büchi automaton for `G psi`. Every state except `sink` is
/// accepting; `sink` (when present) only loops on `true`. The sink is
/// omitted when `psi` has no bad prefixes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SafetyAutomaton {
    pub base: Automaton,
    pub sink: Option<usize>,
}

/// Universal Büchi automaton with all states accepting and a set of
/// distinguished edges (all into the initial state).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxedAutomaton {
    pub base: Automaton,
    pub rej_edges: Vec<usize>,
}

pub(super) fn build_b_gpsi(b: &Builder, psi: &Formula) -> Result<SafetyAutomaton, AutomatonError> {
    let nfa = b.bad_prefix_nfa(psi)?;
    let finals: Vec<usize> = (0..nfa.num_states).filter(|&q| nfa.marked[q]).collect();
    let q0 = nfa.initial;
    if finals.is_empty() {
        let base = Automaton::new(
            b.alphabet.clone(),
            1,
            0,
            vec![Edge {
                src: 0,
                guard: Guard::tt(),
                dst: 0,
                rej: false,
            }],
            vec![true],
            Acceptance::Buchi,
            vec![nfa.labels[q0].clone()],
        );
        return Ok(SafetyAutomaton {
            base: universal(base),
            sink: None,
        });
    }
    // keep the non-final states, append the sink
    let mut id = vec![usize::MAX; nfa.num_states];
    let mut labels = Vec::new();
    for q in 0..nfa.num_states {
        if !nfa.marked[q] {
            id[q] = labels.len();
            labels.push(nfa.labels[q].clone());
        }
    }
    let sink = labels.len();
    labels.push("rej".into());
    let mut edges: Vec<Edge> = nfa
        .edges
        .iter()
        .filter(|e| !nfa.marked[e.src])
        .map(|e| Edge {
            src: id[e.src],
            guard: e.guard.clone(),
            dst: if nfa.marked[e.dst] { sink } else { id[e.dst] },
            rej: false,
        })
        .collect();
    edges.push(Edge {
        src: sink,
        guard: Guard::tt(),
        dst: sink,
        rej: false,
    });
    // The monitor restarts at q0 on every letter except those on which q0
    // can only move to the sink. Letters without any q0-transition keep the
    // loop, so the copy watching later positions is never lost.
    let init = id[q0];
    let (to_sink, elsewhere) =
        edges
            .iter()
            .filter(|e| e.src == init)
            .fold((Guard::ff(), Guard::ff()), |(r, n), e| {
                if e.dst == sink {
                    (r.or(&e.guard), n)
                } else {
                    (r, n.or(&e.guard))
                }
            });
    edges.push(Edge {
        src: init,
        guard: to_sink.negate().or(&elsewhere),
        dst: init,
        rej: false,
    });
    let n = labels.len();
    let mut marked = vec![true; n];
    marked[sink] = false;
    let mut base = Automaton::new(
        b.alphabet.clone(),
        n,
        init,
        edges,
        marked,
        Acceptance::Buchi,
        labels,
    );
    base.prune_unreachable();
    let sink = (0..base.num_states).find(|&q| !base.marked[q]);
    Ok(SafetyAutomaton {
        base: universal(base),
        sink,
    })
}

fn universal(mut a: Automaton) -> Automaton {
    a.branching = Branching::Universal;
    a
}

/// Removes the sink of `b`, redirecting its incoming edges to the initial
/// state and flagging them.
pub fn relax_fg(b: &SafetyAutomaton) -> RelaxedAutomaton {
    let a = &b.base;
    let Some(sink) = b.sink else {
        return RelaxedAutomaton {
            base: a.clone(),
            rej_edges: vec![],
        };
    };
    let id = |q: usize| if q < sink { q } else { q - 1 };
    let edges = a
        .edges
        .iter()
        .filter(|e| e.src != sink)
        .map(|e| {
            if e.dst == sink {
                Edge {
                    src: id(e.src),
                    guard: e.guard.clone(),
                    dst: id(a.initial),
                    rej: true,
                }
            } else {
                Edge {
                    src: id(e.src),
                    guard: e.guard.clone(),
                    dst: id(e.dst),
                    rej: false,
                }
            }
        })
        .collect();
    let labels = (0..a.num_states)
        .filter(|&q| q != sink)
        .map(|q| a.labels[q].clone())
        .collect();
    let base = universal(Automaton::new(
        a.alphabet.clone(),
        a.num_states - 1,
        id(a.initial),
        edges,
        vec![true; a.num_states - 1],
        Acceptance::Buchi,
        labels,
    ));
    let rej_edges = (0..base.edges.len())
        .filter(|&i| base.edges[i].rej)
        .collect();
    RelaxedAutomaton { base, rej_edges }
}
