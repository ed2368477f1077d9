//! The outer synthesis loop: increase the implementation bound, encode,
//! solve, extract, certify.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use maxreal_maxsat::{Backend, MaxSatError, Status};
use num_bigint::BigUint;

use crate::encoding::{encode, Automata, EncodingError};
use crate::ltl::{Formula, SoftSpec, SpecProblem};
use crate::ts::{model_check, satisfied_levels, value_from_levels, TransitionSystem, TsError};

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error(transparent)]
    Encoding(#[from] EncodingError),
    #[error("bound {bound}: {source}")]
    Backend { bound: usize, source: MaxSatError },
    #[error("bound {bound}: certification failed: {reason}")]
    Certification { bound: usize, reason: String },
    #[error(transparent)]
    ModelCheck(#[from] TsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    /// `b, b + k, b + 2k, ...`
    Step(usize),
    Doubling,
}

impl Schedule {
    pub fn next(self, b: usize) -> usize {
        match self {
            Schedule::Step(k) => b + k.max(1),
            Schedule::Doubling => 2 * b,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SynthesisOptions {
    pub min_bound: usize,
    pub max_bound: usize,
    /// Stop at the first bound whose optimum reaches this satisfied weight.
    pub threshold: Option<u64>,
    /// Wall-clock budget for the whole loop.
    pub timeout: Option<Duration>,
    pub backend: Backend,
    pub schedule: Schedule,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        SynthesisOptions {
            min_bound: 2,
            max_bound: 8,
            threshold: None,
            timeout: None,
            backend: Backend::Builtin,
            schedule: Schedule::Step(2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundStatus {
    /// The hard clauses are unsatisfiable: no implementation of this size.
    Unsat,
    Optimum,
    /// Timed out or the solver gave up.
    Unknown,
}

impl BoundStatus {
    pub fn name(self) -> &'static str {
        match self {
            BoundStatus::Unsat => "unsat",
            BoundStatus::Optimum => "optimum",
            BoundStatus::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundRecord {
    pub bound: usize,
    pub status: BoundStatus,
    /// Optimal satisfied soft weight.
    pub weight: Option<u64>,
    /// Total soft weight.
    pub weight_bound: u64,
    pub vars: u32,
    pub clauses: usize,
    pub encode_ms: u128,
    pub solve_ms: u128,
}

/// An implementation whose hard verdict and relaxation levels were checked
/// by the model checker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certified {
    pub bound: usize,
    pub implementation: TransitionSystem,
    pub weight: u64,
    pub weight_bound: u64,
    /// Model-checked satisfaction of every chain level.
    pub levels: Vec<Vec<bool>>,
    pub value: Vec<u32>,
    /// Strongest satisfied chain element per soft spec (`true` if none).
    pub relaxations: Vec<Formula>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SynthesisResult {
    pub records: Vec<BoundRecord>,
    pub best: Option<Certified>,
    /// The wall-clock budget ran out before the loop finished.
    pub timed_out: bool,
}

impl SynthesisResult {
    /// Run report: `key: value` lines, one block per bound, then a summary.
    pub fn report(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            let _ = writeln!(s, "bound: {}", r.bound);
            let _ = writeln!(s, "status: {}", r.status.name());
            match r.weight {
                Some(w) => {
                    let _ = writeln!(s, "weight: {w}");
                }
                None => {
                    let _ = writeln!(s, "weight: -");
                }
            }
            let _ = writeln!(s, "weight_bound: {}", r.weight_bound);
            let _ = writeln!(s, "vars: {}", r.vars);
            let _ = writeln!(s, "clauses: {}", r.clauses);
            let _ = writeln!(s, "encode_ms: {}", r.encode_ms);
            let _ = writeln!(s, "solve_ms: {}", r.solve_ms);
            s.push('\n');
        }
        match &self.best {
            Some(c) => {
                let _ = writeln!(s, "result: certified");
                let _ = writeln!(s, "implementation_bound: {}", c.bound);
                let _ = writeln!(s, "states: {}", c.implementation.num_states());
                let _ = writeln!(s, "weight: {}", c.weight);
                let _ = writeln!(s, "weight_bound: {}", c.weight_bound);
                let _ = writeln!(s, "value: {}", format_value(&c.value));
                for (j, f) in c.relaxations.iter().enumerate() {
                    let _ = writeln!(s, "relaxation_{}: {f}", j + 1);
                }
            }
            None if self.timed_out => {
                let _ = writeln!(s, "result: timeout");
            }
            None => {
                let _ = writeln!(s, "result: unrealizable");
            }
        }
        s
    }
}

pub fn format_value(v: &[u32]) -> String {
    let parts: Vec<String> = v.iter().map(u32::to_string).collect();
    format!("({})", parts.join(","))
}

/// Strongest chain element each soft spec satisfies, `true` when none.
pub fn achieved_relaxations(
    t: &TransitionSystem,
    soft: &[SoftSpec],
) -> Result<Vec<Formula>, TsError> {
    Ok(relaxations_from_levels(soft, &satisfied_levels(t, soft)?))
}

fn relaxations_from_levels(soft: &[SoftSpec], levels: &[Vec<bool>]) -> Vec<Formula> {
    soft.iter()
        .zip(levels)
        .map(|(s, l)| match l.iter().position(|&x| x) {
            Some(k) => s.chain[k].clone(),
            None => Formula::True,
        })
        .collect()
}

/// Solves the bounded problem for each bound of the schedule.
pub fn synthesize_max(
    p: &SpecProblem,
    opts: &SynthesisOptions,
) -> Result<SynthesisResult, SynthError> {
    assert!(
        opts.min_bound >= 1 && opts.min_bound <= opts.max_bound,
        "bounds must satisfy 1 <= min <= max"
    );
    let start = Instant::now();
    let deadline = opts.timeout.map(|t| start + t);
    let automata = Automata::build(p)?;
    let mut result = SynthesisResult::default();
    let mut b = opts.min_bound;
    while b <= opts.max_bound {
        let remaining = match deadline {
            Some(d) => match d.checked_duration_since(Instant::now()) {
                Some(r) if !r.is_zero() => Some(r),
                _ => {
                    result.timed_out = true;
                    break;
                }
            },
            None => None,
        };
        let t0 = Instant::now();
        let enc = encode(p, &automata, b);
        let encode_ms = t0.elapsed().as_millis();
        let t1 = Instant::now();
        let out = opts
            .backend
            .solve(&enc.wcnf, remaining)
            .map_err(|source| SynthError::Backend { bound: b, source })?;
        let solve_ms = t1.elapsed().as_millis();
        let (vars, clauses, weight_bound) = enc.stats();
        let status = match out.status {
            Status::Optimum => BoundStatus::Optimum,
            Status::HardUnsat => BoundStatus::Unsat,
            Status::Unknown => BoundStatus::Unknown,
        };
        let weight = match status {
            BoundStatus::Optimum => out.satisfied_weight(),
            _ => None,
        };
        result.records.push(BoundRecord {
            bound: b,
            status,
            weight,
            weight_bound,
            vars,
            clauses,
            encode_ms,
            solve_ms,
        });
        match status {
            BoundStatus::Unsat => {}
            BoundStatus::Unknown => {
                result.timed_out = true;
                break;
            }
            BoundStatus::Optimum => {
                let model = out.model.as_ref().expect("optimum carries a model");
                let soft_sat = enc.satisfied_soft(model);
                let t = enc.extract(model);
                let cert = certify(p, b, t, &soft_sat, weight.unwrap(), weight_bound)?;
                let w = cert.weight;
                if result.best.as_ref().map_or(true, |c| w > c.weight) {
                    result.best = Some(cert);
                }
                if opts.threshold.is_some_and(|th| w >= th) || w == weight_bound {
                    break;
                }
            }
        }
        b = opts.schedule.next(b);
    }
    Ok(result)
}

/// Checks an extracted implementation: it must satisfy the hard spec, and
/// each soft clause must be satisfied exactly when the implementation
/// satisfies its level or a stronger one. At an optimum both directions
/// hold, since every soft clause can be satisfied on its own once the
/// implementation is fixed.
pub fn certify(
    p: &SpecProblem,
    bound: usize,
    t: TransitionSystem,
    soft_sat: &[Vec<bool>],
    weight: u64,
    weight_bound: u64,
) -> Result<Certified, SynthError> {
    let fail = |reason: String| SynthError::Certification { bound, reason };
    if !t.is_well_formed() {
        return Err(fail("extracted transition system is malformed".into()));
    }
    if !model_check(&t, &p.hard())? {
        return Err(fail(
            "implementation violates the hard specification".into(),
        ));
    }
    let levels = satisfied_levels(&t, &p.soft)?;
    for (j, (row, sat)) in levels.iter().zip(soft_sat).enumerate() {
        for k in 0..row.len() {
            let holds = row[..=k].iter().any(|&x| x);
            if holds != sat[k] {
                return Err(fail(format!(
                    "soft spec {} level {}: model checker says {holds}, encoding says {}",
                    j + 1,
                    k + 1,
                    sat[k]
                )));
            }
        }
    }
    Ok(Certified {
        bound,
        relaxations: relaxations_from_levels(&p.soft, &levels),
        value: value_from_levels(&levels),
        levels,
        implementation: t,
        weight,
        weight_bound,
    })
}

/// Size bound on optimal implementations, `((2^(b + log b))!)^2` where `b`
/// is the largest subformula count of the hard spec conjoined with one
/// chain element per soft spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoreticalBound {
    pub b: usize,
    /// `b` is an upper estimate: too many chain selections to enumerate.
    pub b_estimated: bool,
    /// `2^(b + log b) = b * 2^b`.
    pub base: BigUint,
    /// `(base!)^2` when small enough to expand.
    pub value: Option<BigUint>,
}

/// Chain selections enumerated exactly up to this count.
const MAX_SELECTIONS: usize = 1 << 18;
/// Factorials expanded up to this argument.
const MAX_FACTORIAL: u64 = 5000;

pub fn theoretical_bound(p: &SpecProblem) -> TheoreticalBound {
    let hard = p.hard();
    let count: usize = p
        .soft
        .iter()
        .try_fold(1usize, |acc, s| acc.checked_mul(s.chain.len()))
        .unwrap_or(usize::MAX);
    // subformula sets as bitsets over one shared index; the conjunction
    // spine adds one node per extra conjunct
    let mut index = BTreeMap::new();
    let mut bits = |f: &Formula| {
        let mut set = Vec::new();
        for g in f.subformulas() {
            let n = index.len();
            let i = *index.entry(g).or_insert(n);
            if set.len() <= i / 64 {
                set.resize(i / 64 + 1, 0u64);
            }
            set[i / 64] |= 1 << (i % 64);
        }
        set
    };
    let hard_bits = bits(&hard);
    let chains: Vec<Vec<Vec<u64>>> = p
        .soft
        .iter()
        .map(|s| s.chain.iter().map(&mut bits).collect())
        .collect();
    let union_size = |sets: &mut dyn Iterator<Item = &Vec<u64>>| {
        let mut acc = hard_bits.clone();
        for set in sets {
            if acc.len() < set.len() {
                acc.resize(set.len(), 0);
            }
            for (a, x) in acc.iter_mut().zip(set) {
                *a |= x;
            }
        }
        acc.iter().map(|w| w.count_ones() as usize).sum::<usize>() + p.soft.len()
    };
    let (b, b_estimated) = if count <= MAX_SELECTIONS {
        let mut best = 0;
        let mut pick = vec![0usize; p.soft.len()];
        loop {
            best = best.max(union_size(
                &mut chains.iter().zip(&pick).map(|(c, &k)| &c[k]),
            ));
            // odometer over chain indices
            let mut j = 0;
            while j < pick.len() {
                pick[j] += 1;
                if pick[j] < chains[j].len() {
                    break;
                }
                pick[j] = 0;
                j += 1;
            }
            if j == pick.len() {
                break;
            }
        }
        (best, false)
    } else {
        // every chain element at once covers any selection
        (union_size(&mut chains.iter().flatten()), true)
    };
    let base = BigUint::from(b) << b;
    let value = u64::try_from(&base)
        .ok()
        .filter(|&n| n <= MAX_FACTORIAL)
        .map(|n| {
            let f: BigUint = (1..=n).map(BigUint::from).product();
            &f * &f
        });
    TheoreticalBound {
        b,
        b_estimated,
        base,
        value,
    }
}

impl std::fmt::Display for TheoreticalBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.value {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "({}!)^2", self.base),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn problem(hard: &str, soft: &[&str]) -> SpecProblem {
        SpecProblem {
            inputs: vec!["r".into()],
            outputs: vec!["p".into()],
            hard_parts: vec![parse(hard).unwrap()],
            soft: soft
                .iter()
                .map(|s| SoftSpec::safety(parse(s).unwrap()).unwrap())
                .collect(),
            ..Default::default()
        }
    }

    #[test]
    fn schedule_steps() {
        assert_eq!(Schedule::Step(2).next(2), 4);
        assert_eq!(Schedule::Doubling.next(3), 6);
    }

    #[test]
    fn bound_formula() {
        // subf(true) = {true}: b = 1, base = 2, (2!)^2 = 4
        let tb = theoretical_bound(&problem("true", &[]));
        assert_eq!((tb.b, tb.value.clone()), (1, Some(BigUint::from(4u32))));
        // the largest selection is G p & G F p: p, G p, F p, G F p, and
        // the conjunction
        let tb = theoretical_bound(&problem("G p", &["G p"]));
        assert_eq!(tb.b, 5);
        assert_eq!(tb.base, BigUint::from(160u32));
        assert!(tb.value.is_some());
        let big = theoretical_bound(&problem("G (r -> X p) & G F p", &["G (r -> p)"]));
        assert!(big.value.is_none());
        assert!(big.to_string().ends_with("!)^2"));
    }

    #[test]
    fn trivial_and_contradictory_specs() {
        let opts = SynthesisOptions {
            min_bound: 1,
            max_bound: 3,
            schedule: Schedule::Step(1),
            ..Default::default()
        };
        let r = synthesize_max(&problem("true", &[]), &opts).unwrap();
        assert_eq!(r.records.len(), 1);
        let c = r.best.unwrap();
        assert_eq!((c.bound, c.weight, c.value.len()), (1, 0, 0));

        let r = synthesize_max(&problem("G p & G !p", &["G p"]), &opts).unwrap();
        assert!(r.best.is_none());
        assert_eq!(r.records.len(), 3);
        assert!(r.records.iter().all(|x| x.status == BoundStatus::Unsat));
        assert!(r.report().ends_with("result: unrealizable\n"));
    }
}
