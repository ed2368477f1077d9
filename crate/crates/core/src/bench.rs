//! Generators for the two benchmark families: a museum guide robot and
//! power distribution networks.

use crate::ltl::{parse, Formula, SoftSpec, SpecProblem};

/// Locations of the museum map, in output order.
pub const ROBOT_LOCATIONS: [&str; 8] = [
    "ent", "corr1", "corr2", "exh1", "exh2", "passage", "office", "library",
];

/// Moves allowed from each location besides staying put. Corridors are
/// one-way: the tour enters through `corr1` and returns through `corr2`.
const ROBOT_MAP: [(&str, &[&str]); 8] = [
    ("ent", &["corr1", "corr2"]),
    ("corr1", &["office", "exh1"]),
    ("corr2", &["ent", "exh2"]),
    ("exh1", &["corr1", "passage", "library"]),
    ("exh2", &["corr2", "passage", "library"]),
    ("passage", &["exh1", "exh2"]),
    ("office", &["corr1"]),
    ("library", &["exh1", "exh2"]),
];

fn f(s: &str) -> Formula {
    parse(s).expect("generated formula parses")
}

pub fn gen_robot() -> SpecProblem {
    let locs: Vec<String> = ROBOT_LOCATIONS.iter().map(|s| s.to_string()).collect();
    let mut hard = vec![f("ent")];
    let exclusive = Formula::conj(locs.iter().map(|o1| {
        Formula::implies(
            Formula::atom(o1.clone()),
            Formula::conj(
                locs.iter()
                    .filter(|o2| *o2 != o1)
                    .map(|o2| Formula::not(Formula::atom(o2.clone()))),
            ),
        )
    }));
    hard.push(Formula::globally(exclusive));
    for (from, to) in ROBOT_MAP {
        let next = Formula::disj(
            std::iter::once(from)
                .chain(to.iter().copied())
                .map(Formula::atom),
        );
        hard.push(Formula::globally(Formula::implies(
            Formula::atom(from),
            Formula::next(next),
        )));
    }
    hard.extend(
        [
            "G F exh1",
            "G F exh2",
            "G (exh1 -> X ((!ent & !exh1) U exh2))",
            "G (exh2 -> X ((!exh1 & !exh2) U ent))",
            "G (ent -> X ((!exh2 & !ent) U exh1))",
            "!exh2 U office",
        ]
        .map(f),
    );
    let soft = [
        "G (corr1 -> X !office)",
        "G (exh1 | exh2 -> X !library)",
        "G ((exh1 | exh2) & X occupied -> X !passage)",
    ]
    .iter()
    .map(|s| SoftSpec::safety(f(s)).expect("soft robot specs are safety"))
    .collect();
    SpecProblem {
        inputs: vec!["occupied".into()],
        outputs: locs,
        hard_parts: hard,
        soft,
        ..Default::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectivity {
    /// Every load is connected to every supply.
    Full,
    /// Load `l` is connected to supplies `l mod |P|` and `(l + 1) mod |P|`.
    Sparse,
}

/// A power network. Loads are numbered critical first, then
/// non-critical, then initializing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerParams {
    pub supplies: usize,
    pub loads: usize,
    pub capacity: usize,
    pub critical: usize,
    pub non_critical: usize,
    pub initializing: usize,
    /// Maximal number of simultaneously faulty supplies.
    pub faults: usize,
    pub connectivity: Connectivity,
    pub switching_restricted: bool,
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum BenchError {
    #[error("load kinds add up to {0} but there are {1} loads")]
    LoadCount(usize, usize),
    #[error("a network needs at least one supply and one load")]
    Empty,
    #[error("supply capacity must be positive")]
    Capacity,
    #[error("unknown {0} instance `{1}`")]
    UnknownInstance(&'static str, String),
}

impl PowerParams {
    fn check(&self) -> Result<(), BenchError> {
        if self.supplies == 0 || self.loads == 0 {
            return Err(BenchError::Empty);
        }
        if self.capacity == 0 {
            return Err(BenchError::Capacity);
        }
        let kinds = self.critical + self.non_critical + self.initializing;
        if kinds != self.loads {
            return Err(BenchError::LoadCount(kinds, self.loads));
        }
        Ok(())
    }

    /// Supplies connected to load `l`.
    pub fn suppliers(&self, l: usize) -> Vec<usize> {
        match self.connectivity {
            Connectivity::Full => (0..self.supplies).collect(),
            Connectivity::Sparse => {
                let mut v = vec![l % self.supplies, (l + 1) % self.supplies];
                v.sort();
                v.dedup();
                v
            }
        }
    }

    /// Loads connected to supply `p`.
    pub fn consumers(&self, p: usize) -> Vec<usize> {
        (0..self.loads)
            .filter(|&l| self.suppliers(l).contains(&p))
            .collect()
    }

    /// Bits per fault variable; value 0 means no fault, `p + 1` supply `p`.
    pub fn fault_bits(&self) -> usize {
        (usize::BITS - self.supplies.leading_zeros()) as usize
    }
}

/// Rows of the power instance table.
pub fn power_instance(id: usize) -> Option<PowerParams> {
    use Connectivity::*;
    let (
        supplies,
        loads,
        capacity,
        critical,
        non_critical,
        initializing,
        connectivity,
        switching_restricted,
    ) = match id {
        1 => (3, 3, 1, 1, 2, 0, Full, false),
        2 => (3, 6, 2, 2, 4, 0, Full, false),
        3 => (3, 3, 1, 0, 2, 1, Full, false),
        4 => (3, 6, 2, 1, 4, 1, Full, false),
        5 => (4, 2, 1, 1, 1, 0, Sparse, false),
        6 => (4, 4, 1, 1, 3, 0, Sparse, false),
        7 => (4, 6, 1, 1, 5, 0, Sparse, false),
        8 => (4, 8, 1, 1, 7, 0, Sparse, false),
        9 => (4, 2, 1, 1, 1, 0, Sparse, true),
        10 => (4, 4, 1, 1, 3, 0, Sparse, true),
        11 => (4, 6, 1, 1, 5, 0, Sparse, true),
        12 => (4, 8, 1, 1, 7, 0, Sparse, true),
        _ => return None,
    };
    Some(PowerParams {
        supplies,
        loads,
        capacity,
        critical,
        non_critical,
        initializing,
        faults: 1,
        connectivity,
        switching_restricted,
    })
}

fn switch(l: usize, p: usize) -> Formula {
    Formula::atom(format!("s{}_{}", l + 1, p + 1))
}

fn k_subsets(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if items.len() < k {
        return vec![];
    }
    let mut with: Vec<Vec<usize>> = k_subsets(&items[1..], k - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, items[0]);
            s
        })
        .collect();
    with.extend(k_subsets(&items[1..], k));
    with
}

pub fn gen_power(params: &PowerParams) -> Result<SpecProblem, BenchError> {
    params.check()?;
    let bits = params.fault_bits();
    let inputs: Vec<String> = (0..params.faults)
        .flat_map(|i| (0..bits).map(move |b| format!("e{}_{}", i + 1, b)))
        .collect();
    let outputs: Vec<String> = (0..params.loads)
        .flat_map(|l| {
            params
                .suppliers(l)
                .into_iter()
                .map(move |p| format!("s{}_{}", l + 1, p + 1))
        })
        .collect();
    // e_i = p, with value p + 1 encoding a fault of supply p
    let fault_is = |i: usize, p: usize| {
        Formula::conj((0..bits).map(|b| {
            let a = Formula::atom(format!("e{}_{}", i + 1, b));
            if (p + 1) >> b & 1 == 1 {
                a
            } else {
                Formula::not(a)
            }
        }))
    };
    let powered = |l: usize| Formula::disj(params.suppliers(l).into_iter().map(|p| switch(l, p)));
    let critical = 0..params.critical;
    let non_critical = params.critical..params.critical + params.non_critical;
    let initializing = params.critical + params.non_critical..params.loads;

    let mut hard = Vec::new();
    for l in critical {
        hard.push(Formula::globally(powered(l)));
    }
    for l in initializing {
        hard.push(Formula::and(powered(l), Formula::next(powered(l))));
    }
    for l in 0..params.loads {
        let sup = params.suppliers(l);
        for &p1 in &sup {
            if sup.len() > 1 {
                let others = sup
                    .iter()
                    .filter(|&&p2| p2 != p1)
                    .map(|&p2| Formula::not(switch(l, p2)));
                hard.push(Formula::globally(Formula::implies(
                    switch(l, p1),
                    Formula::conj(others),
                )));
            }
        }
    }
    for p in 0..params.supplies {
        let cons = params.consumers(p);
        for subset in k_subsets(&cons, params.capacity) {
            let rest: Vec<usize> = cons
                .iter()
                .copied()
                .filter(|l| !subset.contains(l))
                .collect();
            if rest.is_empty() {
                continue;
            }
            let all = Formula::conj(subset.iter().map(|&l| switch(l, p)));
            let none = Formula::conj(rest.iter().map(|&l| Formula::not(switch(l, p))));
            hard.push(Formula::globally(Formula::implies(all, none)));
        }
    }
    for i in 0..params.faults {
        for p in 0..params.supplies {
            let cons = params.consumers(p);
            if cons.is_empty() {
                continue;
            }
            let off = Formula::conj(cons.iter().map(|&l| Formula::not(switch(l, p))));
            hard.push(Formula::globally(Formula::implies(fault_is(i, p), off)));
        }
    }

    let mut soft = Vec::new();
    for l in non_critical {
        soft.push(Formula::globally(powered(l)));
    }
    if params.switching_restricted {
        for l in 0..params.loads {
            for p in params.suppliers(l) {
                let faulty = Formula::disj((0..params.faults).map(|i| fault_is(i, p)));
                let stays = Formula::and(switch(l, p), Formula::next(Formula::not(faulty)));
                soft.push(Formula::globally(Formula::implies(
                    stays,
                    Formula::next(switch(l, p)),
                )));
            }
        }
    }
    let soft = soft
        .into_iter()
        .map(|s| SoftSpec::safety(s).expect("power soft specs are safety"))
        .collect();
    Ok(SpecProblem {
        inputs,
        outputs,
        hard_parts: hard,
        soft,
        ..Default::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets() {
        assert_eq!(
            k_subsets(&[1, 2, 3], 2),
            vec![vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(k_subsets(&[1], 2), Vec::<Vec<usize>>::new());
    }

    #[test]
    fn sparse_topology() {
        let p = power_instance(6).unwrap();
        assert_eq!(p.suppliers(3), vec![0, 3]);
        assert_eq!(p.consumers(0), vec![0, 3]);
        assert_eq!(p.fault_bits(), 3);
    }

    #[test]
    fn no_faults() {
        let mut p = power_instance(1).unwrap();
        p.faults = 0;
        let sp = gen_power(&p).unwrap();
        assert!(sp.inputs.is_empty());
        assert!(sp
            .hard_parts
            .iter()
            .all(|h| h.atoms().iter().all(|a| !a.starts_with('e'))));
    }

    #[test]
    fn bad_params() {
        let mut p = power_instance(1).unwrap();
        p.critical = 2;
        assert_eq!(gen_power(&p), Err(BenchError::LoadCount(4, 3)));
    }
}
