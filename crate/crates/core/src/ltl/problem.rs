use std::collections::BTreeSet;

use super::{Formula, LtlError};

/// How soft-clause weights are derived from the relaxation chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Scheme {
    /// `(G psi, F G psi, G F psi)` chains with the fg-annotation encoding and
    /// weights `(1, n, n^2)`.
    #[default]
    Default,
    /// One co-Büchi annotation per chain level, weight `n^(k-1)` for level `k`.
    General,
    /// Priority-ordered specifications, weights from the priority recurrence.
    Priority,
    /// Priority-ordered specifications where every level of a spec outweighs
    /// all levels of all lower-priority specs together.
    PriorityStrict,
    /// User-supplied per-level weights.
    User,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Default => "default",
            Scheme::General => "general",
            Scheme::Priority => "priority",
            Scheme::PriorityStrict => "priority-strict",
            Scheme::User => "user",
        }
    }

    pub fn from_name(s: &str) -> Option<Scheme> {
        Some(match s {
            "default" => Scheme::Default,
            "general" => Scheme::General,
            "priority" => Scheme::Priority,
            "priority-strict" => Scheme::PriorityStrict,
            "user" => Scheme::User,
            _ => return None,
        })
    }
}

/// A soft specification with its relaxation chain, strongest first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoftSpec {
    pub formula: Formula,
    pub chain: Vec<Formula>,
    /// Per-level weights, used by [`Scheme::User`].
    pub weights: Option<Vec<u64>>,
}

impl SoftSpec {
    /// A soft specification `G psi` with the default chain.
    pub fn safety(formula: Formula) -> Result<SoftSpec, LtlError> {
        let chain = formula.relax_vector()?;
        Ok(SoftSpec {
            formula,
            chain,
            weights: None,
        })
    }

    pub fn with_chain(chain: Vec<Formula>) -> SoftSpec {
        SoftSpec {
            formula: chain[0].clone(),
            chain,
            weights: None,
        }
    }

    /// Whether the chain is the default `(G psi, F G psi, G F psi)` one.
    pub fn has_default_chain(&self) -> bool {
        self.formula
            .relax_vector()
            .map(|c| c == self.chain)
            .unwrap_or(false)
    }

    /// `psi` of a default-shaped soft spec `G psi`.
    pub fn safety_body(&self) -> Option<&Formula> {
        match &self.formula {
            Formula::Globally(psi) if self.has_default_chain() => Some(psi),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum ProblemError {
    #[error("invalid proposition name `{0}`")]
    BadName(String),
    #[error("proposition `{0}` declared more than once")]
    Duplicate(String),
    #[error("proposition `{0}` is used but not declared as input or output")]
    Undeclared(String),
    #[error("soft specification {0} has an empty relaxation chain")]
    EmptyChain(usize),
    #[error("soft specification {0}: first chain element must equal the formula")]
    ChainHead(usize),
    #[error("soft specification {index}: {source}")]
    Shape { index: usize, source: LtlError },
    #[error("soft specification {0}: the {1} scheme needs one positive weight per chain level")]
    Weights(usize, &'static str),
    #[error("the {0} scheme needs all relaxation chains to have the same length")]
    ChainLengths(&'static str),
}

/// A maximum realizability problem: hard specification over inputs and
/// outputs plus soft specifications.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpecProblem {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// Hard specification lines; the hard specification is their conjunction.
    pub hard_parts: Vec<Formula>,
    pub soft: Vec<SoftSpec>,
    pub scheme: Scheme,
}

fn valid_name(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !matches!(s, "true" | "false" | "X" | "F" | "G" | "U" | "R")
}

impl SpecProblem {
    pub fn hard(&self) -> Formula {
        Formula::conj(self.hard_parts.iter().cloned())
    }

    /// Number of chain levels (`m`); the maximum over all soft specs.
    pub fn levels(&self) -> usize {
        self.soft.iter().map(|s| s.chain.len()).max().unwrap_or(0)
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        let mut seen = BTreeSet::new();
        for p in self.inputs.iter().chain(&self.outputs) {
            if !valid_name(p) {
                return Err(ProblemError::BadName(p.clone()));
            }
            if !seen.insert(p.clone()) {
                return Err(ProblemError::Duplicate(p.clone()));
            }
        }
        let formulas = self
            .hard_parts
            .iter()
            .chain(self.soft.iter().flat_map(|s| s.chain.iter()));
        for f in formulas {
            if let Some(p) = f.atoms().into_iter().find(|p| !seen.contains(p)) {
                return Err(ProblemError::Undeclared(p));
            }
        }
        for (j, s) in self.soft.iter().enumerate() {
            if s.chain.is_empty() {
                return Err(ProblemError::EmptyChain(j));
            }
            if s.chain[0] != s.formula {
                return Err(ProblemError::ChainHead(j));
            }
            if self.scheme == Scheme::Default && !s.has_default_chain() {
                let source = s
                    .formula
                    .relax_vector()
                    .err()
                    .unwrap_or_else(|| LtlError::NotSafetyShape(s.formula.to_string()));
                return Err(ProblemError::Shape { index: j, source });
            }
            if self.scheme == Scheme::User {
                match &s.weights {
                    Some(w) if w.len() == s.chain.len() && w.iter().all(|&x| x > 0) => {}
                    _ => return Err(ProblemError::Weights(j, self.scheme.name())),
                }
            }
        }
        if matches!(self.scheme, Scheme::Priority | Scheme::PriorityStrict)
            && self.soft.iter().any(|s| s.chain.len() != self.levels())
        {
            return Err(ProblemError::ChainLengths(self.scheme.name()));
        }
        Ok(())
    }
}
