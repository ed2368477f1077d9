use std::collections::HashMap;
use std::fmt;

/// Which annotation a reach/counter variable belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ann {
    /// Co-Büchi annotation for the hard specification.
    Hard,
    /// fg-annotation for soft spec `j` (default scheme).
    Fg(usize),
    /// Co-Büchi annotation for `G F psi_j` (default scheme).
    Gf(usize),
    /// Co-Büchi annotation for level `k` of soft spec `j` (other schemes).
    Level(usize, usize),
}

impl fmt::Display for Ann {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ann::Hard => write!(f, "hard"),
            Ann::Fg(j) => write!(f, "fg{j}"),
            Ann::Gf(j) => write!(f, "gf{j}"),
            Ann::Level(j, k) => write!(f, "lvl{j}.{k}"),
        }
    }
}

/// Semantic meaning of a solver variable. States, automaton states and spec
/// indices are 0-based; `i` is an input valuation index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SemVar {
    /// Transition from `s` on input `i` may go to `t`.
    Trans {
        s: usize,
        i: u64,
        t: usize,
    },
    /// Output proposition `o` is emitted in `s` on input `i`.
    Out {
        o: usize,
        s: usize,
        i: u64,
    },
    /// Node `(s, q)` is annotated.
    Reach {
        ann: Ann,
        s: usize,
        q: usize,
    },
    /// Bit `bit` (least significant first) of the annotation value.
    Count {
        ann: Ann,
        s: usize,
        q: usize,
        bit: usize,
    },
    /// Indicator of a conjunctive soft constraint.
    SoftInd {
        j: usize,
        k: usize,
    },
    Aux(u32),
}

/// Bijection between semantic variables and DIMACS variables `1..=len`.
#[derive(Debug, Clone, Default)]
pub struct VarTable {
    names: Vec<SemVar>,
    ids: HashMap<SemVar, i32>,
    aux: u32,
}

impl VarTable {
    pub fn new() -> VarTable {
        VarTable::default()
    }

    /// Id of `v`, allocating it on first use.
    pub fn var(&mut self, v: SemVar) -> i32 {
        if let Some(&id) = self.ids.get(&v) {
            return id;
        }
        self.names.push(v);
        let id = self.names.len() as i32;
        self.ids.insert(v, id);
        id
    }

    pub fn fresh(&mut self) -> i32 {
        self.aux += 1;
        self.var(SemVar::Aux(self.aux))
    }

    pub fn get(&self, v: &SemVar) -> Option<i32> {
        self.ids.get(v).copied()
    }

    pub fn name(&self, id: i32) -> Option<SemVar> {
        self.names.get(id as usize - 1).copied()
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Sidecar map, one `name id` line per variable in id order.
    pub fn to_map(&self, outputs: &[String]) -> String {
        let mut out = String::new();
        for (k, v) in self.names.iter().enumerate() {
            let name = match *v {
                SemVar::Trans { s, i, t } => format!("tau_{s}_{i}_{t}"),
                SemVar::Out { o, s, i } => format!("out_{}_{s}_{i}", outputs[o]),
                SemVar::Reach { ann, s, q } => format!("lam_{ann}_{s}_{q}"),
                SemVar::Count { ann, s, q, bit } => format!("cnt_{ann}_{s}_{q}_{bit}"),
                SemVar::SoftInd { j, k } => format!("soft_{j}_{k}"),
                SemVar::Aux(n) => format!("aux_{n}"),
            };
            out.push_str(&name);
            out.push(' ');
            out.push_str(&(k + 1).to_string());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn allocation_is_injective_and_stable() {
        let mut vt = VarTable::new();
        let a = vt.var(SemVar::Trans { s: 0, i: 1, t: 0 });
        let b = vt.fresh();
        let c = vt.var(SemVar::Out { o: 0, s: 0, i: 1 });
        assert_eq!((a, b, c), (1, 2, 3));
        assert_eq!(vt.var(SemVar::Trans { s: 0, i: 1, t: 0 }), 1);
        assert_eq!(vt.name(3), Some(SemVar::Out { o: 0, s: 0, i: 1 }));
        assert_eq!(
            vt.to_map(&["p".into()]),
            "tau_0_1_0 1\naux_1 2\nout_p_0_1 3\n"
        );
    }
}
