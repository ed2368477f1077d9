use std::fmt;

use crate::ltl::Formula;

/// A conjunction of literals over proposition indices, as bit masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    pub pos: u64,
    pub neg: u64,
}

impl Cube {
    pub const TRUE: Cube = Cube { pos: 0, neg: 0 };

    pub fn lit(index: usize, positive: bool) -> Cube {
        let bit = 1u64 << index;
        if positive {
            Cube { pos: bit, neg: 0 }
        } else {
            Cube { pos: 0, neg: bit }
        }
    }

    pub fn holds(&self, letter: u64) -> bool {
        letter & self.pos == self.pos && letter & self.neg == 0
    }

    pub fn and(&self, other: &Cube) -> Option<Cube> {
        let c = Cube {
            pos: self.pos | other.pos,
            neg: self.neg | other.neg,
        };
        (c.pos & c.neg == 0).then_some(c)
    }

    /// True if every letter satisfying `other` satisfies `self`.
    pub fn subsumes(&self, other: &Cube) -> bool {
        self.pos & other.pos == self.pos && self.neg & other.neg == self.neg
    }

    /// Literals as `(index, polarity)` in ascending index order.
    pub fn literals(&self) -> Vec<(usize, bool)> {
        (0..64)
            .filter_map(|i| {
                let bit = 1u64 << i;
                if self.pos & bit != 0 {
                    Some((i, true))
                } else if self.neg & bit != 0 {
                    Some((i, false))
                } else {
                    None
                }
            })
            .collect()
    }
}

/// A propositional guard in disjunctive normal form. The cube list is kept
/// sorted and free of subsumed cubes; the empty list is `false`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Guard(Vec<Cube>);

impl Guard {
    pub fn tt() -> Guard {
        Guard(vec![Cube::TRUE])
    }

    pub fn ff() -> Guard {
        Guard(vec![])
    }

    pub fn from_cubes(cubes: impl IntoIterator<Item = Cube>) -> Guard {
        let mut cs: Vec<Cube> = cubes.into_iter().collect();
        cs.sort();
        cs.dedup();
        let keep: Vec<Cube> = cs
            .iter()
            .enumerate()
            .filter(|&(i, c)| {
                !cs.iter()
                    .enumerate()
                    .any(|(k, d)| k != i && d.subsumes(c) && (d != c || k < i))
            })
            .map(|(_, c)| *c)
            .collect();
        Guard(keep)
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.0
    }

    pub fn is_false(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_true(&self) -> bool {
        self.0.contains(&Cube::TRUE)
    }

    pub fn holds(&self, letter: u64) -> bool {
        self.0.iter().any(|c| c.holds(letter))
    }

    pub fn or(&self, other: &Guard) -> Guard {
        Guard::from_cubes(self.0.iter().chain(&other.0).copied())
    }

    pub fn and(&self, other: &Guard) -> Guard {
        Guard::from_cubes(
            self.0
                .iter()
                .flat_map(|a| other.0.iter().filter_map(move |b| a.and(b))),
        )
    }

    pub fn negate(&self) -> Guard {
        let mut acc = Guard::tt();
        for c in &self.0 {
            let lits = c.literals().into_iter().map(|(i, pos)| Cube::lit(i, !pos));
            acc = acc.and(&Guard::from_cubes(lits));
            if acc.is_false() {
                break;
            }
        }
        acc
    }

    /// Partially evaluates the guard at a valuation of the propositions in
    /// `mask`; the result no longer mentions them.
    pub fn specialize(&self, mask: u64, valuation: u64) -> Guard {
        let fixed = |c: &Cube| Cube {
            pos: c.pos & mask,
            neg: c.neg & mask,
        };
        Guard::from_cubes(
            self.0
                .iter()
                .filter(|c| fixed(c).holds(valuation & mask))
                .map(|c| Cube {
                    pos: c.pos & !mask,
                    neg: c.neg & !mask,
                }),
        )
    }

    pub fn to_formula(&self, props: &[String]) -> Formula {
        Formula::disj(self.0.iter().map(|c| {
            let lits = c.literals().into_iter().map(|(i, pos)| {
                let a = Formula::atom(props[i].clone());
                if pos {
                    a
                } else {
                    Formula::not(a)
                }
            });
            Formula::conj(lits)
        }))
    }

    pub fn display<'a>(&'a self, props: &'a [String]) -> impl fmt::Display + 'a {
        struct D<'a>(&'a Guard, &'a [String]);
        impl fmt::Display for D<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{}", self.0.to_formula(self.1))
            }
        }
        D(self, props)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_letters(n: usize) -> impl Iterator<Item = u64> {
        0..(1u64 << n)
    }

    #[test]
    fn subsumption_is_removed() {
        let g = Guard::from_cubes([
            Cube::lit(0, true),
            Cube::lit(0, true).and(&Cube::lit(1, false)).unwrap(),
        ]);
        assert_eq!(g.cubes(), &[Cube::lit(0, true)]);
        assert!(Guard::from_cubes([Cube::lit(2, false), Cube::TRUE]).is_true());
    }

    #[test]
    fn negation_is_complement() {
        let g = Guard::from_cubes([
            Cube::lit(0, true).and(&Cube::lit(1, false)).unwrap(),
            Cube::lit(2, true),
        ]);
        let n = g.negate();
        for l in all_letters(3) {
            assert_eq!(g.holds(l), !n.holds(l), "letter {l}");
        }
        assert!(Guard::ff().negate().is_true());
        assert!(Guard::tt().negate().is_false());
    }

    #[test]
    fn specialization_agrees_with_evaluation() {
        let g = Guard::from_cubes([
            Cube::lit(0, true).and(&Cube::lit(2, true)).unwrap(),
            Cube::lit(1, false).and(&Cube::lit(3, false)).unwrap(),
        ]);
        let mask = 0b11;
        for inp in 0..4u64 {
            let s = g.specialize(mask, inp);
            for out in 0..4u64 {
                let letter = inp | (out << 2);
                assert_eq!(s.holds(letter), g.holds(letter));
                assert!(s.cubes().iter().all(|c| (c.pos | c.neg) & mask == 0));
            }
        }
    }
}
