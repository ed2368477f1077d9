use crate::ltl::{Scheme, SpecProblem};

/// Soft-clause weight for each soft spec and chain level.
///
/// Panics if the problem does not validate for its scheme (user weights
/// missing, unequal chain lengths for the priority schemes).
pub fn level_weights(p: &SpecProblem) -> Vec<Vec<u64>> {
    let n = p.soft.len() as u64;
    match p.scheme {
        Scheme::Default => p.soft.iter().map(|_| vec![1, n, n * n]).collect(),
        Scheme::General => p
            .soft
            .iter()
            .map(|s| (0..s.chain.len() as u32).map(|k| n.pow(k)).collect())
            .collect(),
        Scheme::User => p
            .soft
            .iter()
            .map(|s| s.weights.clone().expect("user scheme needs weights"))
            .collect(),
        Scheme::Priority => priority(p.soft.len(), p.levels(), false),
        Scheme::PriorityStrict => priority(p.soft.len(), p.levels(), true),
    }
}

/// Priority weights, last (lowest-priority) spec first. In the plain
/// recurrence only the weakest level of a spec carries the weight of all
/// lower-priority specs; in the strict variant every level does.
fn priority(n: usize, m: usize, strict: bool) -> Vec<Vec<u64>> {
    let mut w = vec![vec![1u64; m]; n];
    let mut below = 0u64;
    for j in (0..n).rev() {
        if j + 1 < n {
            for k in 0..m {
                if strict || k + 1 == m {
                    w[j][k] = below + 1;
                }
            }
        }
        below += w[j].iter().sum::<u64>();
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn priority_recurrence() {
        assert_eq!(priority(2, 3, false), vec![vec![1, 1, 4], vec![1, 1, 1]]);
        assert_eq!(priority(3, 1, false), vec![vec![4], vec![2], vec![1]]);
        assert_eq!(priority(2, 3, true), vec![vec![4, 4, 4], vec![1, 1, 1]]);
        assert!(priority(0, 3, false).is_empty());
    }
}
