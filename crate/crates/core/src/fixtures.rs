//! Small hand-written instances used across tests and docs.

use crate::model::{Instance, Matching, Mode};

/// The classic size-8 strict-complete example; each row lists partners in
/// decreasing preference.
pub fn table1() -> Instance {
    let men = vec![
        vec![5, 7, 1, 2, 6, 8, 4, 3],
        vec![2, 3, 7, 5, 4, 1, 8, 6],
        vec![8, 5, 1, 4, 6, 2, 3, 7],
        vec![3, 2, 7, 4, 1, 6, 8, 5],
        vec![7, 2, 5, 1, 3, 6, 8, 4],
        vec![1, 6, 7, 5, 8, 4, 2, 3],
        vec![2, 5, 7, 6, 3, 4, 8, 1],
        vec![3, 8, 4, 5, 7, 2, 6, 1],
    ];
    let women = vec![
        vec![5, 3, 7, 6, 1, 2, 8, 4],
        vec![8, 6, 3, 5, 7, 2, 1, 4],
        vec![1, 5, 6, 2, 4, 8, 7, 3],
        vec![8, 7, 3, 2, 4, 1, 5, 6],
        vec![6, 4, 7, 3, 8, 1, 2, 5],
        vec![2, 8, 5, 4, 6, 3, 7, 1],
        vec![7, 5, 2, 1, 8, 6, 4, 3],
        vec![7, 4, 1, 5, 2, 3, 6, 8],
    ];
    Instance::from_strict_lists(8, &men, &women, Mode::SmStrictComplete).unwrap()
}

/// The marriage `2 7 4 8 6 3 5 1` (man i married to the i-th listed woman)
/// used alongside [`table1`] in the dominance discussion.
pub fn table1_walkthrough_matching() -> Matching {
    Matching::from_wives(
        8,
        &[
            Some(2),
            Some(7),
            Some(4),
            Some(8),
            Some(6),
            Some(3),
            Some(5),
            Some(1),
        ],
    )
    .unwrap()
}

/// Size-3 instance realizing the two-stage dominance scenario: with the
/// matching m1-w3, m2-w2, m3-w1 the blocking pairs are exactly
/// `{(1,1), (1,2), (2,1)}`, where (1,1) dominates (1,2) from the men's side
/// and (2,1) dominates (1,1) from the women's side.
pub fn dominance_scenario() -> (Instance, Matching) {
    let men = vec![vec![1, 2, 3], vec![1, 2, 3], vec![1, 2, 3]];
    let women = vec![vec![2, 1, 3], vec![1, 2, 3], vec![1, 2, 3]];
    let inst = Instance::from_strict_lists(3, &men, &women, Mode::SmStrictComplete).unwrap();
    let matching = Matching::from_wives(3, &[Some(3), Some(2), Some(1)]).unwrap();
    (inst, matching)
}

/// Size-2 strict instance whose both perfect matchings are stable; its
/// lattice has exactly two elements (identity on top).
pub fn two_stable_instance() -> Instance {
    let men = vec![vec![1, 2], vec![2, 1]];
    let women = vec![vec![2, 1], vec![1, 2]];
    Instance::from_strict_lists(2, &men, &women, Mode::SmStrictComplete).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Gender;

    #[test]
    fn scenario_blocking_set_is_as_documented() {
        let (inst, matching) = dominance_scenario();
        let full = crate::stability::blocking_pairs(&inst, &matching);
        let pairs: Vec<(usize, usize)> = full.pairs.iter().map(|p| (p.man, p.woman)).collect();
        assert_eq!(pairs, vec![(1, 1), (1, 2), (2, 1)]);
        // Dominance directions claimed in the docs.
        assert!(inst.rank_raw(Gender::Men, 1, 1) < inst.rank_raw(Gender::Men, 1, 2));
        assert!(inst.rank_raw(Gender::Women, 1, 2) < inst.rank_raw(Gender::Women, 1, 1));
    }
}
