//! Generators and independent oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use maxreal::encoding::level_weights;
use maxreal::ltl::{Formula, Lasso, SoftSpec, SpecProblem};
use maxreal::ts::{
    find_violation, model_check, satisfied_levels, value_from_levels, TransitionSystem,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

fn atom(rng: &mut ChaCha8Rng, atoms: &[&str]) -> Formula {
    let a = Formula::atom(atoms[rng.gen_range(0..atoms.len())]);
    if rng.gen_bool(0.3) {
        Formula::not(a)
    } else {
        a
    }
}

/// Random syntactically safe formula in NNF: no U, no F.
pub fn safe_formula(rng: &mut ChaCha8Rng, atoms: &[&str], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.3) {
        return atom(rng, atoms);
    }
    let sub = |rng: &mut ChaCha8Rng| safe_formula(rng, atoms, depth - 1);
    match rng.gen_range(0..5) {
        0 => Formula::and(sub(rng), sub(rng)),
        1 => Formula::or(sub(rng), sub(rng)),
        2 => Formula::next(sub(rng)),
        3 => Formula::release(sub(rng), sub(rng)),
        _ => Formula::globally(sub(rng)),
    }
}

/// Random formula over the full operator set.
pub fn formula(rng: &mut ChaCha8Rng, atoms: &[&str], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..12) {
            0 => Formula::True,
            1 => Formula::False,
            _ => atom(rng, atoms),
        };
    }
    let sub = |rng: &mut ChaCha8Rng| formula(rng, atoms, depth - 1);
    match rng.gen_range(0..10) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::or(sub(rng), sub(rng)),
        3 => Formula::implies(sub(rng), sub(rng)),
        4 => Formula::next(sub(rng)),
        5 => Formula::finally(sub(rng)),
        6 => Formula::globally(sub(rng)),
        7 => Formula::until(sub(rng), sub(rng)),
        8 => Formula::release(sub(rng), sub(rng)),
        _ => Formula::globally(Formula::finally(sub(rng))),
    }
}

pub fn random_ts(
    rng: &mut ChaCha8Rng,
    inputs: &[&str],
    outputs: &[&str],
    states: usize,
) -> TransitionSystem {
    let trans = (0..states)
        .map(|_| {
            (0..1u64 << inputs.len())
                .map(|_| {
                    (
                        rng.gen_range(0..states),
                        rng.gen_range(0..1u64 << outputs.len()),
                    )
                })
                .collect()
        })
        .collect();
    TransitionSystem {
        inputs: inputs.iter().map(|s| s.to_string()).collect(),
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
        initial: 0,
        trans,
    }
}

/// Every transition system with exactly `states` states and initial state 0.
pub fn all_ts(inputs: &[&str], outputs: &[&str], states: usize) -> Vec<TransitionSystem> {
    let ni = 1usize << inputs.len();
    let choices = states << outputs.len();
    let slots = states * ni;
    let total = choices.pow(slots as u32);
    (0..total)
        .map(|mut code| {
            let mut trans = vec![Vec::with_capacity(ni); states];
            for row in trans.iter_mut() {
                for _ in 0..ni {
                    let c = code % choices;
                    code /= choices;
                    row.push((c % states, (c / states) as u64));
                }
            }
            TransitionSystem {
                inputs: inputs.iter().map(|s| s.to_string()).collect(),
                outputs: outputs.iter().map(|s| s.to_string()).collect(),
                initial: 0,
                trans,
            }
        })
        .collect()
}

/// All lasso-shaped traces of `t` whose unrolled length is at most
/// `max_len`: an input word `w` of length `L` read from the initial state,
/// closed into a loop at a position `k` where the state after `L` steps
/// equals the state after `k` steps.
pub fn lassos(t: &TransitionSystem, max_len: usize) -> Vec<Lasso> {
    let ni = t.num_input_valuations() as u64;
    let mut out = Vec::new();
    for len in 1..=max_len {
        let total = ni.pow(len as u32);
        for mut code in 0..total {
            let mut states = vec![t.initial];
            let mut letters = Vec::with_capacity(len);
            for _ in 0..len {
                let i = code % ni;
                code /= ni;
                let s = *states.last().unwrap();
                letters.push(t.letter_set(t.letter(s, i)));
                states.push(t.step(s, i).0);
            }
            for k in 0..len {
                if states[k] == states[len] {
                    out.push(Lasso::new(letters[..k].to_vec(), letters[k..].to_vec()));
                }
            }
        }
    }
    out
}

/// Whether `lasso` is a trace of `t`: replaying it from the initial state
/// reproduces the outputs, and the loop closes after some unrolling.
pub fn is_trace(t: &TransitionSystem, lasso: &Lasso) -> bool {
    let input_of = |letter: &BTreeSet<String>| {
        t.inputs
            .iter()
            .enumerate()
            .filter(|(_, p)| letter.contains(*p))
            .fold(0u64, |v, (i, _)| v | 1 << i)
    };
    let mut s = t.initial;
    let replay = |s: &mut usize, letter: &BTreeSet<String>| {
        let i = input_of(letter);
        let ok = t.letter_set(t.letter(*s, i)) == *letter;
        *s = t.step(*s, i).0;
        ok
    };
    if !lasso.prefix.iter().all(|l| replay(&mut s, l)) {
        return false;
    }
    // the cycle is a trace once the state at its start repeats
    let mut seen = vec![s];
    for _ in 0..=t.num_states() {
        if !lasso.cycle.iter().all(|l| replay(&mut s, l)) {
            return false;
        }
        if seen.contains(&s) {
            return true;
        }
        seen.push(s);
    }
    false
}

/// Model checking cross-checked against lasso semantics: a claimed
/// violation must come with a lasso that is a trace of `t` and falsifies
/// `f`; a claimed success must survive every lasso up to `max_len`.
pub fn checked_model_check(t: &TransitionSystem, f: &Formula, max_len: usize) -> bool {
    let holds = model_check(t, f).unwrap();
    match find_violation(t, f).unwrap() {
        Some(l) => {
            assert!(!holds);
            assert!(
                is_trace(t, &l),
                "counterexample is not a trace of\n{}",
                t.to_dot()
            );
            assert!(!l.satisfies(f), "counterexample satisfies {f}");
        }
        None => {
            assert!(holds);
            for l in lassos(t, max_len) {
                assert!(
                    l.satisfies(f),
                    "model checker missed a violation of {f}: {l:?}"
                );
            }
        }
    }
    holds
}

/// Satisfied soft weight of `t` under `weights`, from the model checker:
/// clause `(j, k)` counts when spec `j` holds at level `k` or stronger.
pub fn satisfied_weight(t: &TransitionSystem, p: &SpecProblem, weights: &[Vec<u64>]) -> u64 {
    let levels = satisfied_levels(t, &p.soft).unwrap();
    levels
        .iter()
        .zip(weights)
        .map(|(row, w)| {
            (0..row.len())
                .filter(|&k| row[..=k].iter().any(|&x| x))
                .map(|k| w[k])
                .sum::<u64>()
        })
        .sum()
}

/// Small random problem: one input `r`, one output `o`, a random hard spec
/// and one or two soft specs `G psi` with default chains.
pub fn small_problem(rng: &mut ChaCha8Rng) -> SpecProblem {
    let atoms = ["r", "o"];
    let hard = if rng.gen_bool(0.3) {
        Formula::True
    } else {
        formula(rng, &atoms, 2)
    };
    let n = rng.gen_range(1..=2);
    let soft = (0..n)
        .map(|_| SoftSpec::safety(Formula::globally(safe_formula(rng, &atoms, 2))).unwrap())
        .collect();
    SpecProblem {
        inputs: vec!["r".into()],
        outputs: vec!["o".into()],
        hard_parts: vec![hard],
        soft,
        ..Default::default()
    }
}

/// Per system of size `b` satisfying the hard spec: its value vector and
/// satisfied weight, by exhaustive enumeration and model checking.
pub fn enumerate_values(p: &SpecProblem, b: usize) -> Vec<(Vec<u32>, u64)> {
    let weights = level_weights(p);
    let ins: Vec<&str> = p.inputs.iter().map(String::as_str).collect();
    let outs: Vec<&str> = p.outputs.iter().map(String::as_str).collect();
    let hard = p.hard();
    all_ts(&ins, &outs, b)
        .into_iter()
        .filter(|t| model_check(t, &hard).unwrap())
        .map(|t| {
            let levels = satisfied_levels(&t, &p.soft).unwrap();
            (
                value_from_levels(&levels),
                satisfied_weight(&t, p, &weights),
            )
        })
        .collect()
}

pub const PROP_INPUTS: [&str; 1] = ["p"];
pub const PROP_OUTPUTS: [&str; 2] = ["a", "b"];
pub const PROP_ATOMS: [&str; 3] = ["p", "a", "b"];
/// Lasso oracle unrolling depth; proposition systems have at most 4 states.
pub const PROP_LASSO_LEN: usize = 7;

/// Random safe `psi` and system, with the oracle verdicts for `G psi` and
/// `F G psi`.
pub struct PropCase {
    pub psi: Formula,
    pub t: TransitionSystem,
    pub g: bool,
    pub fg: bool,
}

pub fn prop_cases(seed: u64, count: usize) -> impl Iterator<Item = PropCase> {
    let mut r = rng(seed);
    (0..count).map(move |_| {
        let psi = safe_formula(&mut r, &PROP_ATOMS, 3);
        let n = r.gen_range(1..=4);
        let t = random_ts(&mut r, &PROP_INPUTS, &PROP_OUTPUTS, n);
        let g = checked_model_check(&t, &Formula::globally(psi.clone()), PROP_LASSO_LEN);
        let fg = checked_model_check(
            &t,
            &Formula::finally(Formula::globally(psi.clone())),
            PROP_LASSO_LEN,
        );
        assert!(!g || fg);
        PropCase { psi, t, g, fg }
    })
}

/// Longest lasso unrolling whose enumeration stays near `budget` traces.
pub fn lasso_len_within(t: &TransitionSystem, budget: usize) -> usize {
    let ni = t.num_input_valuations();
    let mut len = 1;
    while len < 12 && ni.saturating_pow(len as u32 + 1).saturating_mul(len + 1) <= budget {
        len += 1;
    }
    len
}
