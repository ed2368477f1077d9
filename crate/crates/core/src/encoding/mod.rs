//! Partial weighted MaxSAT encoding of bounded maximum realizability.
//!
//! Hard clauses describe an input-enabled transition system with `b` states
//! and a valid annotation of its run graph with the universal co-Büchi
//! automaton of the hard specification. Soft clauses reward annotations
//! that certify the levels of each relaxation chain.

mod vars;
mod weights;

use std::collections::{BTreeMap, HashMap};

use maxreal_maxsat::WcnfInstance;

pub use vars::{Ann, SemVar, VarTable};
pub use weights::level_weights;

use crate::automata::{
    low_mask, relax_fg, Alphabet, Automaton, AutomatonError, Builder, Edge, Guard,
    RelaxedAutomaton, DEFAULT_STATE_CAP,
};
use crate::ltl::{ProblemError, Scheme, SpecProblem};
use crate::ts::TransitionSystem;

/// Inputs are enumerated explicitly, so their number is kept small.
pub const MAX_INPUTS: usize = 16;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum EncodingError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("{0} inputs are too many to enumerate (at most {MAX_INPUTS})")]
    TooManyInputs(usize),
}

#[derive(Debug, Clone)]
pub enum SoftAutomata {
    /// Default scheme: `Relax_FG(G psi)` and the co-Büchi automaton of
    /// `G F psi`.
    Default {
        relaxed: RelaxedAutomaton,
        gf: Automaton,
    },
    /// One co-Büchi automaton per chain level.
    Levels(Vec<Automaton>),
}

/// The automata of a problem. They do not depend on the bound, so one set
/// serves every iteration of the synthesis loop.
#[derive(Debug, Clone)]
pub struct Automata {
    pub hard: Automaton,
    pub soft: Vec<SoftAutomata>,
    pub weights: Vec<Vec<u64>>,
}

impl Automata {
    pub fn build(p: &SpecProblem) -> Result<Automata, EncodingError> {
        Automata::build_with_cap(p, DEFAULT_STATE_CAP)
    }

    pub fn build_with_cap(p: &SpecProblem, cap: usize) -> Result<Automata, EncodingError> {
        p.validate()?;
        if p.inputs.len() > MAX_INPUTS {
            return Err(EncodingError::TooManyInputs(p.inputs.len()));
        }
        let builder =
            Builder::new(Alphabet::new(p.inputs.clone(), p.outputs.clone())?).with_cap(cap);
        let hard = builder.ucw(&p.hard())?;
        let soft = p
            .soft
            .iter()
            .map(|s| {
                Ok(match (p.scheme, s.safety_body()) {
                    (Scheme::Default, Some(psi)) => SoftAutomata::Default {
                        relaxed: relax_fg(&builder.b_gpsi(psi)?),
                        gf: builder.ucw(&s.chain[2])?,
                    },
                    _ => SoftAutomata::Levels(
                        s.chain
                            .iter()
                            .map(|f| builder.ucw(f))
                            .collect::<Result<_, _>>()?,
                    ),
                })
            })
            .collect::<Result<_, AutomatonError>>()?;
        Ok(Automata {
            hard,
            soft,
            weights: level_weights(p),
        })
    }

    /// Total number of automaton states, for reports.
    pub fn num_states(&self) -> usize {
        self.hard.num_states
            + self
                .soft
                .iter()
                .map(|s| match s {
                    SoftAutomata::Default { relaxed, gf } => {
                        relaxed.base.num_states + gf.num_states
                    }
                    SoftAutomata::Levels(l) => l.iter().map(|a| a.num_states).sum(),
                })
                .sum::<usize>()
    }
}

/// Number of bits needed to represent `x`.
fn bits(x: usize) -> usize {
    (usize::BITS - x.leading_zeros()) as usize
}

/// Counter width of a co-Büchi annotation: values up to `b * |F|`.
pub fn co_buchi_width(bound: usize, marked: usize) -> usize {
    bits(bound * marked)
}

/// Counter width of an fg-annotation: values up to `b`.
pub fn fg_width(bound: usize) -> usize {
    bits(bound)
}

/// A built instance together with what is needed to decode its models.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub bound: usize,
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub wcnf: WcnfInstance,
    pub vars: VarTable,
    /// `soft_index[j][k]`: position in `wcnf.soft` of the clause for level
    /// `k` of soft spec `j`.
    pub soft_index: Vec<Vec<usize>>,
}

impl Encoding {
    fn value(&self, model: &[bool], v: SemVar) -> bool {
        let id = self
            .vars
            .get(&v)
            .expect("variable allocated by the encoder");
        model[id as usize - 1]
    }

    /// Transition system of a model: the least successor with its
    /// transition variable set, outputs read directly.
    pub fn extract(&self, model: &[bool]) -> TransitionSystem {
        let b = self.bound;
        let trans = (0..b)
            .map(|s| {
                (0..1u64 << self.inputs.len())
                    .map(|i| {
                        let t = (0..b)
                            .find(|&t| self.value(model, SemVar::Trans { s, i, t }))
                            .expect("model satisfies the input-enabledness clauses");
                        let out = (0..self.outputs.len())
                            .filter(|&o| self.value(model, SemVar::Out { o, s, i }))
                            .fold(0u64, |acc, o| acc | 1 << o);
                        (t, out)
                    })
                    .collect()
            })
            .collect();
        TransitionSystem {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            initial: 0,
            trans,
        }
    }

    /// Which soft clauses the model satisfies, per spec and level.
    pub fn satisfied_soft(&self, model: &[bool]) -> Vec<Vec<bool>> {
        let holds = |c: &[i32]| {
            c.iter().any(|&l| {
                model
                    .get(l.unsigned_abs() as usize - 1)
                    .copied()
                    .unwrap_or(false)
                    == (l > 0)
            })
        };
        self.soft_index
            .iter()
            .map(|row| row.iter().map(|&k| holds(&self.wcnf.soft[k].1)).collect())
            .collect()
    }

    pub fn to_wdimacs(&self) -> String {
        self.wcnf.to_wdimacs()
    }

    pub fn var_map(&self) -> String {
        self.vars.to_map(&self.outputs)
    }

    /// `(variables, clauses, total soft weight)`.
    pub fn stats(&self) -> (u32, usize, u64) {
        self.wcnf.stats()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cmp {
    True,
    False,
    Lit(i32),
}

struct Encoder {
    b: usize,
    num_inputs: usize,
    vt: VarTable,
    w: WcnfInstance,
    cmp_cache: HashMap<(Ann, usize, usize, usize, usize, bool), Cmp>,
}

impl Encoder {
    fn var(&mut self, v: SemVar) -> i32 {
        self.vt.var(v)
    }

    fn hard(&mut self, c: Vec<i32>) {
        debug_assert!(!c.is_empty());
        self.w.add_hard(c);
    }

    /// Transition and output variables, and the clauses making every
    /// `(state, input)` pair have a successor.
    fn input_enabled(&mut self, num_outputs: usize) {
        for s in 0..self.b {
            for i in 0..1u64 << self.num_inputs {
                let c = (0..self.b)
                    .map(|t| self.var(SemVar::Trans { s, i, t }))
                    .collect();
                self.hard(c);
                for o in 0..num_outputs {
                    self.var(SemVar::Out { o, s, i });
                }
            }
        }
    }

    /// Auxiliary literal implying `count(hi) > count(lo)` (or `>=`).
    fn compare(
        &mut self,
        ann: Ann,
        hi: (usize, usize),
        lo: (usize, usize),
        strict: bool,
        width: usize,
    ) -> Cmp {
        let key = (ann, hi.0, hi.1, lo.0, lo.1, strict);
        if let Some(&c) = self.cmp_cache.get(&key) {
            return c;
        }
        // r_k -> majority(a_k, !b_k, r_{k-1}) compares the low k+1 bits
        let mut prev = if strict { Cmp::False } else { Cmp::True };
        for bit in 0..width {
            let a = self.var(SemVar::Count {
                ann,
                s: hi.0,
                q: hi.1,
                bit,
            });
            let b = self.var(SemVar::Count {
                ann,
                s: lo.0,
                q: lo.1,
                bit,
            });
            let r = self.vt.fresh();
            match prev {
                Cmp::True => self.hard(vec![-r, a, -b]),
                Cmp::False => {
                    self.hard(vec![-r, a]);
                    self.hard(vec![-r, -b]);
                }
                Cmp::Lit(p) => {
                    self.hard(vec![-r, a, -b]);
                    self.hard(vec![-r, a, p]);
                    self.hard(vec![-r, -b, p]);
                }
            }
            prev = Cmp::Lit(r);
        }
        self.cmp_cache.insert(key, prev);
        prev
    }

    /// Validity constraints of an annotation of the run graph of `a`: each
    /// edge out of an annotated node whose guard the chosen outputs satisfy
    /// leads to an annotated node with a value at least as large, strictly
    /// larger on edges selected by `strict`. Whether the initial node is
    /// annotated is left to the caller.
    fn annotation(
        &mut self,
        ann: Ann,
        a: &Automaton,
        width: usize,
        strict: impl Fn(&Edge) -> bool,
        co_buchi: bool,
    ) {
        let imask = low_mask(self.num_inputs);
        for s in 0..self.b {
            for q in 0..a.num_states {
                let lam = self.var(SemVar::Reach { ann, s, q });
                for i in 0..1u64 << self.num_inputs {
                    let mut groups: BTreeMap<(usize, bool), Guard> = BTreeMap::new();
                    for e in a.out_edges(q) {
                        let g = e.guard.specialize(imask, i);
                        if g.is_false() {
                            continue;
                        }
                        let slot = groups.entry((e.dst, strict(e))).or_insert_with(Guard::ff);
                        *slot = slot.or(&g);
                    }
                    for ((q2, st), g) in groups {
                        // negated cubes over the output variables of (s, i)
                        let cubes: Vec<Vec<i32>> = g
                            .cubes()
                            .iter()
                            .map(|c| {
                                c.literals()
                                    .into_iter()
                                    .map(|(p, pos)| {
                                        let v = self.var(SemVar::Out {
                                            o: p - self.num_inputs,
                                            s,
                                            i,
                                        });
                                        if pos {
                                            -v
                                        } else {
                                            v
                                        }
                                    })
                                    .collect()
                            })
                            .collect();
                        // a rejecting state that is never left cannot be entered
                        if co_buchi && a.marked[q2] && a.is_universal_sink(q2) {
                            for c in cubes {
                                let mut cl = vec![-lam];
                                cl.extend(c);
                                self.hard(cl);
                            }
                            continue;
                        }
                        let premise = if cubes.len() == 1 {
                            cubes.into_iter().next().unwrap()
                        } else {
                            let d = self.vt.fresh();
                            for c in cubes {
                                let mut cl = c;
                                cl.push(d);
                                self.hard(cl);
                            }
                            vec![-d]
                        };
                        for s2 in 0..self.b {
                            let tau = self.var(SemVar::Trans { s, i, t: s2 });
                            let mut base = vec![-lam, -tau];
                            base.extend(&premise);
                            if (s2, q2) == (s, q) {
                                if st {
                                    self.hard(base);
                                }
                                continue;
                            }
                            let lam2 = self.var(SemVar::Reach { ann, s: s2, q: q2 });
                            let mut cl = base.clone();
                            cl.push(lam2);
                            self.hard(cl);
                            match self.compare(ann, (s2, q2), (s, q), st, width) {
                                Cmp::True => {}
                                Cmp::False => self.hard(base),
                                Cmp::Lit(r) => {
                                    base.push(r);
                                    self.hard(base);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    fn co_buchi(&mut self, ann: Ann, a: &Automaton) {
        let width = co_buchi_width(self.b, a.num_marked());
        self.annotation(ann, a, width, |e| a.marked[e.dst], true);
    }
}

/// Builds the instance for implementations with at most `bound` states.
pub fn encode(p: &SpecProblem, automata: &Automata, bound: usize) -> Encoding {
    assert!(bound >= 1, "the bound must be positive");
    let mut enc = Encoder {
        b: bound,
        num_inputs: p.inputs.len(),
        vt: VarTable::new(),
        w: WcnfInstance::new(),
        cmp_cache: HashMap::new(),
    };
    enc.input_enabled(p.outputs.len());
    enc.co_buchi(Ann::Hard, &automata.hard);
    let init = enc.var(SemVar::Reach {
        ann: Ann::Hard,
        s: 0,
        q: automata.hard.initial,
    });
    enc.hard(vec![init]);
    let mut soft_index = Vec::new();
    for (j, sa) in automata.soft.iter().enumerate() {
        let w = &automata.weights[j];
        let mut row = Vec::new();
        let mut soft = |enc: &mut Encoder, weight: u64, c: Vec<i32>| {
            row.push(enc.w.soft.len());
            enc.w.add_soft(weight, c);
        };
        match sa {
            SoftAutomata::Default { relaxed, gf } => {
                let ann = Ann::Fg(j);
                let q0 = relaxed.base.initial;
                let width = fg_width(bound);
                enc.annotation(ann, &relaxed.base, width, |e| e.rej, false);
                enc.co_buchi(Ann::Gf(j), gf);
                let fg0 = enc.var(SemVar::Reach { ann, s: 0, q: q0 });
                let gf0 = enc.var(SemVar::Reach {
                    ann: Ann::Gf(j),
                    s: 0,
                    q: gf.initial,
                });
                // G psi: the initial value is the largest representable one,
                // so no Rej edge can ever be taken
                let ind = enc.var(SemVar::SoftInd { j, k: 0 });
                enc.hard(vec![-ind, fg0]);
                for bit in 0..width {
                    let v = enc.var(SemVar::Count {
                        ann,
                        s: 0,
                        q: q0,
                        bit,
                    });
                    enc.hard(vec![-ind, v]);
                }
                soft(&mut enc, w[0], vec![ind]);
                soft(&mut enc, w[1], vec![fg0]);
                soft(&mut enc, w[2], vec![fg0, gf0]);
            }
            SoftAutomata::Levels(levels) => {
                let mut reach = Vec::new();
                for (k, a) in levels.iter().enumerate() {
                    let ann = Ann::Level(j, k);
                    enc.co_buchi(ann, a);
                    reach.push(enc.var(SemVar::Reach {
                        ann,
                        s: 0,
                        q: a.initial,
                    }));
                    soft(&mut enc, w[k], reach.clone());
                }
            }
        }
        soft_index.push(row);
    }
    let mut wcnf = enc.w;
    wcnf.num_vars = enc.vt.len() as u32;
    Encoding {
        bound,
        inputs: p.inputs.clone(),
        outputs: p.outputs.clone(),
        wcnf,
        vars: enc.vt,
        soft_index,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths() {
        assert_eq!(fg_width(1), 1);
        assert_eq!(fg_width(3), 2);
        assert_eq!(fg_width(4), 3);
        assert_eq!(co_buchi_width(3, 0), 0);
        assert_eq!(co_buchi_width(2, 4), 4);
    }

    fn comparator_holds(width: usize, strict: bool, x: u64, y: u64) -> bool {
        use maxreal_maxsat::sat::{SolveResult, Solver};
        let mut enc = Encoder {
            b: 2,
            num_inputs: 0,
            vt: VarTable::new(),
            w: WcnfInstance::new(),
            cmp_cache: HashMap::new(),
        };
        let c = enc.compare(Ann::Hard, (0, 0), (1, 0), strict, width);
        let r = match c {
            Cmp::True => return true,
            Cmp::False => return false,
            Cmp::Lit(r) => r,
        };
        for bit in 0..width {
            let a = enc.var(SemVar::Count {
                ann: Ann::Hard,
                s: 0,
                q: 0,
                bit,
            });
            let b = enc.var(SemVar::Count {
                ann: Ann::Hard,
                s: 1,
                q: 0,
                bit,
            });
            enc.hard(vec![if x >> bit & 1 == 1 { a } else { -a }]);
            enc.hard(vec![if y >> bit & 1 == 1 { b } else { -b }]);
        }
        enc.hard(vec![r]);
        let mut s = Solver::new();
        for c in &enc.w.hard {
            s.add_dimacs_clause(c);
        }
        s.solve(&[], None) == SolveResult::Sat
    }

    #[test]
    fn comparators_match_integers() {
        for width in 0..=4 {
            for x in 0..1u64 << width {
                for y in 0..1u64 << width {
                    assert_eq!(
                        comparator_holds(width, true, x, y),
                        x > y,
                        "{x} > {y} at {width}"
                    );
                    assert_eq!(
                        comparator_holds(width, false, x, y),
                        x >= y,
                        "{x} >= {y} at {width}"
                    );
                }
            }
        }
    }
}
