use std::path::PathBuf;
use std::time::Duration;

use maxreal_maxsat::sat::{Lit, SolveResult, Solver};
use maxreal_maxsat::{solve_builtin, solve_external, Status, WcnfInstance};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_clause(r: &mut ChaCha8Rng, vars: u32, max_len: usize) -> Vec<i32> {
    let len = r.gen_range(1..=max_len);
    (0..len)
        .map(|_| {
            let v = r.gen_range(1..=vars) as i32;
            if r.gen_bool(0.5) {
                v
            } else {
                -v
            }
        })
        .collect()
}

fn random_instance(r: &mut ChaCha8Rng) -> WcnfInstance {
    let vars = r.gen_range(2..=10);
    let mut w = WcnfInstance::new();
    while w.num_vars < vars {
        w.new_var();
    }
    for _ in 0..r.gen_range(0..=vars as usize * 2) {
        w.add_hard(random_clause(r, vars, 3));
    }
    for _ in 0..r.gen_range(1..=12) {
        let weight = if r.gen_bool(0.5) { 1 } else { r.gen_range(1..=20) };
        w.add_soft(weight, random_clause(r, vars, 2));
    }
    w
}

/// Minimum falsified soft weight over all assignments.
fn brute_force(w: &WcnfInstance) -> Option<u64> {
    (0..1u32 << w.num_vars)
        .filter_map(|bits| {
            let model: Vec<bool> = (0..w.num_vars).map(|i| bits >> i & 1 == 1).collect();
            w.cost(&model)
        })
        .min()
}

fn fixture_solver() -> Vec<String> {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", "brute_maxsat.py"]
        .iter()
        .collect();
    vec!["python3".into(), path.display().to_string()]
}

#[test]
fn builtin_matches_brute_force() {
    let mut r = ChaCha8Rng::seed_from_u64(7);
    let mut unsat = 0;
    for case in 0..400 {
        let w = random_instance(&mut r);
        let out = solve_builtin(&w, None);
        match brute_force(&w) {
            None => {
                assert_eq!(out.status, Status::HardUnsat, "case {case}");
                unsat += 1;
            }
            Some(c) => {
                assert_eq!(out.status, Status::Optimum, "case {case}");
                assert_eq!(out.cost, Some(c), "case {case}\n{}", w.to_wdimacs());
                assert_eq!(w.cost(out.model.as_ref().unwrap()), Some(c));
            }
        }
    }
    assert!(unsat > 0 && unsat < 200, "{unsat}");
}

#[test]
fn external_fixture_agrees() {
    let cmd = fixture_solver();
    let mut r = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..40 {
        let w = random_instance(&mut r);
        let ext = solve_external(&w, &cmd, Some(Duration::from_secs(60))).unwrap();
        let own = solve_builtin(&w, None);
        assert_eq!(ext.status, own.status);
        assert_eq!(ext.cost, own.cost);
        if let Some(m) = &ext.model {
            assert_eq!(w.cost(m), ext.cost);
        }
    }
}

#[test]
fn rc2_agrees_when_installed() {
    let Ok(path) = which("rc2.py") else {
        eprintln!("rc2.py not on PATH; skipping");
        return;
    };
    let mut r = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let w = random_instance(&mut r);
        let ext = solve_external(&w, &[path.clone(), "-vvv".into()], Some(Duration::from_secs(60))).unwrap();
        let own = solve_builtin(&w, None);
        assert_eq!((ext.status, ext.cost), (own.status, own.cost), "{}", w.to_wdimacs());
    }
}

fn which(name: &str) -> Result<String, ()> {
    let paths = std::env::var_os("PATH").ok_or(())?;
    std::env::split_paths(&paths)
        .map(|d| d.join(name))
        .find(|p| p.is_file())
        .map(|p| p.display().to_string())
        .ok_or(())
}

#[test]
fn external_timeout_gives_unknown() {
    let mut w = WcnfInstance::new();
    w.new_var();
    w.add_soft(1, vec![1]);
    let out = solve_external(&w, &["sh".into(), "-c".into(), "sleep 5".into()], Some(Duration::from_millis(100))).unwrap();
    assert_eq!(out.status, Status::Unknown);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn sat_answers_are_correct(
        clauses in prop::collection::vec(prop::collection::vec((1i32..=8, any::<bool>()), 1..4), 0..40)
    ) {
        let clauses: Vec<Vec<i32>> = clauses
            .into_iter()
            .map(|c| c.into_iter().map(|(v, pos)| if pos { v } else { -v }).collect())
            .collect();
        let mut s = Solver::new();
        s.reserve_vars(8);
        for c in &clauses {
            let lits: Vec<Lit> = c.iter().map(|&l| Lit::from_dimacs(l)).collect();
            s.add_clause(&lits);
        }
        let holds = |m: &[bool]| clauses.iter().all(|c| c.iter().any(|&l| m[l.unsigned_abs() as usize - 1] == (l > 0)));
        let brute = (0..256u32).any(|bits| holds(&(0..8).map(|i| bits >> i & 1 == 1).collect::<Vec<_>>()));
        match s.solve(&[], None) {
            SolveResult::Sat => prop_assert!(holds(&s.model()[..8])),
            SolveResult::Unsat => prop_assert!(!brute),
            SolveResult::Interrupted => prop_assert!(false),
        }
    }

    #[test]
    fn wdimacs_round_trip(seed in any::<u64>()) {
        let w = random_instance(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(WcnfInstance::parse_wdimacs(&w.to_wdimacs()).unwrap(), w);
    }
}
