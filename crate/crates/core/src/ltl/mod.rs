//! LTL formulas: syntax tree, parser, printer, normalization and evaluation
//! on lasso-shaped words.

mod lasso;
mod parse;
mod print;
mod problem;

use std::collections::BTreeSet;

pub use lasso::Lasso;
pub use parse::parse;
pub use problem::{ProblemError, Scheme, SoftSpec, SpecProblem};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LtlError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown token `{token}` at {line}:{column}")]
    UnknownToken {
        line: usize,
        column: usize,
        token: String,
    },
    #[error("`{0}` is not of the form G psi with psi syntactically safe")]
    NotSafetyShape(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Finally(Box<Formula>),
    Globally(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
}

use Formula::*;

impl Formula {
    pub fn atom(name: impl Into<String>) -> Formula {
        Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Implies(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Formula {
        Next(Box::new(f))
    }

    pub fn finally(f: Formula) -> Formula {
        Finally(Box::new(f))
    }

    pub fn globally(f: Formula) -> Formula {
        Globally(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Formula {
        Release(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `true` for an empty iterator.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts.into_iter().reduce(Formula::and).unwrap_or(True)
    }

    /// Left-nested disjunction; `false` for an empty iterator.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts.into_iter().reduce(Formula::or).unwrap_or(False)
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            True | False | Atom(_) => vec![],
            Not(a) | Next(a) | Finally(a) | Globally(a) => vec![a],
            And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b) | Release(a, b) => vec![a, b],
        }
    }

    /// Number of operators (atoms and constants count zero).
    pub fn size(&self) -> usize {
        match self {
            True | False | Atom(_) => 0,
            _ => {
                1 + self
                    .children()
                    .into_iter()
                    .map(Formula::size)
                    .sum::<usize>()
            }
        }
    }

    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if out.insert(f.clone()) {
                stack.extend(f.children());
            }
        }
        out
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if let Atom(p) = f {
                out.insert(p.clone());
            }
            stack.extend(f.children());
        }
        out
    }

    pub fn is_nnf(&self) -> bool {
        match self {
            Not(a) => matches!(**a, Atom(_)),
            Implies(..) => false,
            _ => self.children().into_iter().all(Formula::is_nnf),
        }
    }

    pub fn is_propositional(&self) -> bool {
        match self {
            Next(_) | Finally(_) | Globally(_) | Until(..) | Release(..) => false,
            _ => self.children().into_iter().all(Formula::is_propositional),
        }
    }

    pub fn to_nnf(&self) -> Formula {
        nnf(self, false)
    }

    /// True iff the NNF contains neither `U` nor `F`.
    pub fn is_syntactically_safe(&self) -> bool {
        fn no_until(f: &Formula) -> bool {
            match f {
                Until(..) | Finally(_) => false,
                _ => f.children().into_iter().all(no_until),
            }
        }
        no_until(&self.to_nnf())
    }

    /// The default relaxation chain `(G psi, F G psi, G F psi)` of a soft
    /// specification `G psi` with `psi` syntactically safe.
    pub fn relax_vector(&self) -> Result<Vec<Formula>, LtlError> {
        match self {
            Globally(psi) if psi.is_syntactically_safe() => Ok(vec![
                self.clone(),
                Formula::finally(self.clone()),
                Formula::globally(Formula::finally((**psi).clone())),
            ]),
            _ => Err(LtlError::NotSafetyShape(self.to_string())),
        }
    }
}

fn nnf(f: &Formula, neg: bool) -> Formula {
    let b = |x: &Formula, n: bool| Box::new(nnf(x, n));
    match (f, neg) {
        (True, false) | (False, true) => True,
        (True, true) | (False, false) => False,
        (Atom(_), false) => f.clone(),
        (Atom(_), true) => Formula::not(f.clone()),
        (Not(a), n) => nnf(a, !n),
        (And(x, y), false) | (Or(x, y), true) => And(b(x, neg), b(y, neg)),
        (Or(x, y), false) | (And(x, y), true) => Or(b(x, neg), b(y, neg)),
        (Implies(x, y), false) => Or(b(x, true), b(y, false)),
        (Implies(x, y), true) => And(b(x, false), b(y, true)),
        (Next(a), n) => Next(b(a, n)),
        (Finally(a), false) | (Globally(a), true) => Finally(b(a, neg)),
        (Globally(a), false) | (Finally(a), true) => Globally(b(a, neg)),
        (Until(x, y), false) | (Release(x, y), true) => Until(b(x, neg), b(y, neg)),
        (Release(x, y), false) | (Until(x, y), true) => Release(b(x, neg), b(y, neg)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn nnf_dualities() {
        assert_eq!(p("!G p").to_nnf(), p("F !p"));
        assert_eq!(p("!(a U b)").to_nnf(), p("!a R !b"));
        assert_eq!(p("a -> b").to_nnf(), p("!a | b"));
        assert_eq!(p("!X !(a & true)").to_nnf(), p("X (a & true)"));
        assert!(p("!(a -> F b)").to_nnf().is_nnf());
    }

    #[test]
    fn safety_classification() {
        assert!(p("G (corr1 -> X !office)").is_syntactically_safe());
        assert!(!p("F p").is_syntactically_safe());
        assert!(!p("G F p").is_syntactically_safe());
        assert!(!p("!G p").is_syntactically_safe());
        assert!(p("!F p").is_syntactically_safe());
        assert!(p("a R b").is_syntactically_safe());
    }

    #[test]
    fn relax_vectors() {
        assert_eq!(
            p("G !office").relax_vector().unwrap(),
            vec![p("G !office"), p("F G !office"), p("G F !office")]
        );
        assert_eq!(
            p("G true").relax_vector().unwrap(),
            vec![p("G true"), p("F G true"), p("G F true")]
        );
        assert_eq!(
            p("G (a & X b)").relax_vector().unwrap(),
            vec![p("G (a & X b)"), p("F G (a & X b)"), p("G F (a & X b)")]
        );
        assert!(matches!(
            p("G F a").relax_vector(),
            Err(LtlError::NotSafetyShape(_))
        ));
        assert!(p("a").relax_vector().is_err());
    }

    #[test]
    fn sizes_and_closure() {
        assert_eq!(p("p").size(), 0);
        assert_eq!(p("G p").size(), 1);
        let subs = p("G (a & b)").subformulas();
        assert_eq!(subs.len(), 4);
        assert!(subs.contains(&p("a & b")));
        assert_eq!(p("G (a -> X (b U a))").atoms().len(), 2);
    }
}
