use maxreal::bench::{gen_power, gen_robot, power_instance};
use maxreal::encoding::level_weights;
use maxreal::ltl::{parse, SpecProblem};
use maxreal::specfile::{emit_spec, parse_spec};

/// (instance, |I|, |O|, #soft, weight bound)
const SHAPES: [(usize, usize, usize, usize, u64); 12] = [
    (1, 2, 9, 2, 14),
    (2, 2, 18, 4, 84),
    (3, 2, 9, 2, 14),
    (4, 2, 18, 4, 84),
    (5, 3, 4, 1, 3),
    (6, 3, 8, 3, 39),
    (7, 3, 12, 5, 155),
    (8, 3, 16, 7, 399),
    (9, 3, 4, 5, 155),
    (10, 3, 8, 11, 1463),
    (11, 3, 12, 17, 5219),
    (12, 3, 16, 23, 12719),
];

fn total_weight(p: &SpecProblem) -> u64 {
    level_weights(p).iter().flatten().sum()
}

fn check_well_formed(p: &SpecProblem) {
    p.validate().unwrap();
    for f in p
        .hard_parts
        .iter()
        .chain(p.soft.iter().flat_map(|s| s.chain.iter()))
    {
        assert_eq!(&parse(&f.to_string()).unwrap(), f);
    }
    assert_eq!(&parse_spec(&emit_spec(p)).unwrap(), p);
}

#[test]
fn power_shapes() {
    for (id, i, o, n, bound) in SHAPES {
        let p = gen_power(&power_instance(id).unwrap()).unwrap();
        assert_eq!(
            (p.inputs.len(), p.outputs.len(), p.soft.len()),
            (i, o, n),
            "instance {id}"
        );
        let n = n as u64;
        assert_eq!(total_weight(&p), n + n * n + n * n * n);
        assert_eq!(total_weight(&p), bound, "instance {id}");
        check_well_formed(&p);
    }
    assert!(power_instance(0).is_none());
    assert!(power_instance(13).is_none());
}

#[test]
fn robot_shape() {
    let p = gen_robot();
    assert_eq!(p.inputs, vec!["occupied"]);
    assert_eq!(p.outputs.len(), 8);
    // initial location, exclusion, 8 moves, 2 visits, 3 ordering rules, office first
    assert_eq!(p.hard_parts.len(), 16);
    assert_eq!(p.soft.len(), 3);
    assert_eq!(total_weight(&p), 39);
    check_well_formed(&p);
}

#[test]
fn capacity_two_blocks_triples() {
    // instance 2: six loads on full connectivity, capacity 2
    let p = gen_power(&power_instance(2).unwrap()).unwrap();
    let blocking = p
        .hard_parts
        .iter()
        .filter(|f| f.to_string().starts_with("G (s") && f.to_string().matches('&').count() >= 4)
        .count();
    // per supply, one clause for each of the C(6,2) pairs
    assert_eq!(blocking, 3 * 15);
}
