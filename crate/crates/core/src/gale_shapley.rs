//! Deferred-acceptance baseline for strict-complete instances.
//!
//! With the chosen side proposing, the outcome is that side's optimal stable
//! marriage: the top (men proposing) or bottom (women proposing) of the
//! dominance lattice. Free proposers are served from a FIFO queue; the result
//! does not depend on that order.

use std::collections::VecDeque;

use thiserror::Error;

use crate::model::{Gender, Instance, Matching, Mode, PersonId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GsError {
    #[error("deferred acceptance requires a strict-complete instance")]
    UnsupportedMode,
}

/// Proposing-side-optimal stable marriage of a strict-complete instance.
pub fn gale_shapley(instance: &Instance, proposing: Gender) -> Result<Matching, GsError> {
    if instance.mode() != Mode::SmStrictComplete {
        return Err(GsError::UnsupportedMode);
    }
    let n = instance.n();
    let receiving = proposing.opposite();

    let mut matching = Matching::empty(n);
    // Next list position each proposer will try.
    let mut next_choice: Vec<usize> = vec![0; n + 1];
    let mut free: VecDeque<PersonId> = (1..=n).collect();

    while let Some(proposer) = free.pop_front() {
        let target = instance.list(proposing, proposer)[next_choice[proposer]];
        next_choice[proposer] += 1;
        match matching.partner(receiving, target) {
            None => set_oriented(&mut matching, proposing, proposer, target),
            Some(held) => {
                if instance.rank_raw(receiving, target, proposer)
                    < instance.rank_raw(receiving, target, held)
                {
                    clear_oriented(&mut matching, proposing, held);
                    set_oriented(&mut matching, proposing, proposer, target);
                    free.push_back(held);
                } else {
                    free.push_back(proposer);
                }
            }
        }
    }
    Ok(matching)
}

fn set_oriented(matching: &mut Matching, proposing: Gender, proposer: PersonId, target: PersonId) {
    match proposing {
        Gender::Men => matching.set_pair(proposer, target),
        Gender::Women => matching.set_pair(target, proposer),
    }
}

fn clear_oriented(matching: &mut Matching, proposing: Gender, proposer: PersonId) {
    match proposing {
        Gender::Men => {
            matching.clear_man(proposer);
        }
        Gender::Women => {
            matching.clear_woman(proposer);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::generate::{gen_smti, gen_sm_ic, GenParams};
    use crate::naive;

    #[test]
    fn trivial_cases() {
        let inst = Instance::from_strict_lists(1, &[vec![1]], &[vec![1]], Mode::SmStrictComplete)
            .unwrap();
        let m = gale_shapley(&inst, Gender::Men).unwrap();
        assert_eq!(m.wife_of(1), Some(1));

        // Mutually-first choices marry each other.
        let inst = Instance::from_strict_lists(
            2,
            &[vec![1, 2], vec![2, 1]],
            &[vec![1, 2], vec![2, 1]],
            Mode::SmStrictComplete,
        )
        .unwrap();
        let m = gale_shapley(&inst, Gender::Men).unwrap();
        assert_eq!(m.wife_of(1), Some(1));
        assert_eq!(m.wife_of(2), Some(2));
    }

    #[test]
    fn output_is_stable_and_perfect() {
        for seed in 0..40 {
            let inst = gen_sm_ic(20, seed);
            for side in [Gender::Men, Gender::Women] {
                let m = gale_shapley(&inst, side).unwrap();
                assert!(m.is_perfect());
                assert!(naive::naive_is_stable(&inst, &m), "seed {seed}");
            }
        }
    }

    #[test]
    fn role_swap_symmetry() {
        for seed in 100..120 {
            let inst = gen_sm_ic(12, seed);
            let swapped = inst.swapped();
            let women_opt = gale_shapley(&inst, Gender::Women).unwrap();
            let via_swap = gale_shapley(&swapped, Gender::Men).unwrap();
            assert_eq!(via_swap, women_opt.transposed());
        }
    }

    #[test]
    fn table1_top_dominates_everything() {
        let inst = fixtures::table1();
        let top = gale_shapley(&inst, Gender::Men).unwrap();
        let bottom = gale_shapley(&inst, Gender::Women).unwrap();
        for other in naive::brute_force_stable_sm(&inst, 8) {
            assert!(crate::lattice::dominates(&inst, &top, &other));
            assert!(crate::lattice::dominates(&inst, &other, &bottom));
        }
    }

    #[test]
    fn rejects_smti() {
        let inst = gen_smti(&GenParams::new(4, 0.3, 0.3, 1).unwrap()).unwrap();
        assert_eq!(gale_shapley(&inst, Gender::Men), Err(GsError::UnsupportedMode));
    }
}
