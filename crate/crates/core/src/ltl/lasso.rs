use std::collections::BTreeSet;

use super::Formula;
use Formula::*;

/// An ultimately periodic word `prefix · cycle^ω`; each letter is the set of
/// propositions that hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lasso {
    pub prefix: Vec<BTreeSet<String>>,
    pub cycle: Vec<BTreeSet<String>>,
}

impl Lasso {
    pub fn new(prefix: Vec<BTreeSet<String>>, cycle: Vec<BTreeSet<String>>) -> Lasso {
        assert!(!cycle.is_empty(), "lasso cycle must be nonempty");
        Lasso { prefix, cycle }
    }

    fn len(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    fn succ(&self, i: usize) -> usize {
        if i + 1 == self.len() {
            self.prefix.len()
        } else {
            i + 1
        }
    }

    fn letter(&self, i: usize) -> &BTreeSet<String> {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.cycle[i - self.prefix.len()]
        }
    }

    /// Does the word satisfy `f` at position 0?
    pub fn satisfies(&self, f: &Formula) -> bool {
        self.eval(f)[0]
    }

    /// Truth value of `f` at every distinct position of the lasso.
    pub fn eval(&self, f: &Formula) -> Vec<bool> {
        let n = self.len();
        match f {
            True => vec![true; n],
            False => vec![false; n],
            Atom(p) => (0..n).map(|i| self.letter(i).contains(p)).collect(),
            Not(a) => self.eval(a).into_iter().map(|v| !v).collect(),
            And(a, b) => zip(self.eval(a), self.eval(b), |x, y| x && y),
            Or(a, b) => zip(self.eval(a), self.eval(b), |x, y| x || y),
            Implies(a, b) => zip(self.eval(a), self.eval(b), |x, y| !x || y),
            Next(a) => {
                let v = self.eval(a);
                (0..n).map(|i| v[self.succ(i)]).collect()
            }
            Finally(a) => self.until(&vec![true; n], &self.eval(a)),
            Globally(a) => self.release(&vec![false; n], &self.eval(a)),
            Until(a, b) => self.until(&self.eval(a), &self.eval(b)),
            Release(a, b) => self.release(&self.eval(a), &self.eval(b)),
        }
    }

    // least fixpoint of v = b | (a & X v)
    fn until(&self, a: &[bool], b: &[bool]) -> Vec<bool> {
        let mut v = vec![false; self.len()];
        loop {
            let next: Vec<bool> = (0..v.len())
                .map(|i| b[i] || (a[i] && v[self.succ(i)]))
                .collect();
            if next == v {
                return v;
            }
            v = next;
        }
    }

    // greatest fixpoint of v = b & (a | X v)
    fn release(&self, a: &[bool], b: &[bool]) -> Vec<bool> {
        let mut v = vec![true; self.len()];
        loop {
            let next: Vec<bool> = (0..v.len())
                .map(|i| b[i] && (a[i] || v[self.succ(i)]))
                .collect();
            if next == v {
                return v;
            }
            v = next;
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}
