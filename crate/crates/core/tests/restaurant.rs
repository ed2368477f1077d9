use maxreal::ltl::{parse, SoftSpec, SpecProblem};
use maxreal::synth::{synthesize_max, Schedule, SynthesisOptions};

fn restaurant() -> SpecProblem {
    SpecProblem {
        inputs: vec!["req1".into(), "req2".into()],
        outputs: vec!["table1".into(), "table2".into()],
        hard_parts: vec![parse("G (!table1 | !table2)").unwrap()],
        soft: ["G (req1 -> X table1)", "G (req2 -> X table2)"]
            .iter()
            .map(|s| SoftSpec::safety(parse(s).unwrap()).unwrap())
            .collect(),
        ..Default::default()
    }
}

#[test]
fn two_tables_optimum() {
    let opts = SynthesisOptions {
        min_bound: 1,
        max_bound: 3,
        schedule: Schedule::Step(1),
        ..Default::default()
    };
    let r = synthesize_max(&restaurant(), &opts).unwrap();
    let weights: Vec<_> = r.records.iter().map(|x| x.weight).collect();
    // one state can only serve a fixed table: value (1,1,1)
    assert_eq!(weights, vec![Some(7), Some(8), Some(8)]);
    let best = r.best.unwrap();
    assert_eq!(best.value, vec![2, 0, 0]);
}
