//! Property tests for the library invariants, driven by the seeded
//! generators so every failure is reproducible from the printed inputs.

use proptest::prelude::*;

use stablematch::generate::{gen_smti, gen_sm_ic, GenParams};
use stablematch::lattice::{dominates, enumerate_stable, EnumLimits};
use stablematch::model::{Gender, Instance, Matching, Mode, Preference};
use stablematch::naive;
use stablematch::rng::Rng;
use stablematch::search::random_matching;
use stablematch::stability::{
    blocking_pairs, evaluate, extended_undominated, remove_pair, undominated,
};
use stablematch::{gale_shapley, parse_instance, serialize_instance};

fn sm_instance() -> impl Strategy<Value = Instance> {
    (2usize..=8, any::<u64>()).prop_map(|(n, seed)| gen_sm_ic(n, seed))
}

fn smti_instance() -> impl Strategy<Value = Instance> {
    (2usize..=8, 0.0..0.7f64, 0.0..=1.0f64, any::<u64>())
        .prop_map(|(n, p1, p2, seed)| {
            let params = GenParams::new(n, p1, p2, seed).unwrap();
            gen_smti(&params).unwrap_or_else(|_| gen_sm_ic_as_smti(n, seed))
        })
}

fn gen_sm_ic_as_smti(n: usize, seed: u64) -> Instance {
    let params = GenParams::new(n, 0.0, 0.0, seed).unwrap();
    gen_smti(&params).unwrap()
}

fn any_matching(instance: &Instance, seed: u64) -> Matching {
    let mut rng = Rng::seed_from_u64(seed);
    random_matching(instance, &mut rng, Gender::Men)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn instance_round_trips_through_raw_lists(inst in smti_instance()) {
        let rebuilt = Instance::build(
            inst.n(),
            &inst.raw_lists(Gender::Men),
            &inst.raw_lists(Gender::Women),
            inst.mode(),
        ).unwrap();
        prop_assert_eq!(&inst, &rebuilt);

        let text = serialize_instance(&inst);
        prop_assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn prefers_is_asymmetric_and_total(inst in smti_instance(), p in 1usize..=8) {
        let p = (p - 1) % inst.n() + 1;
        for a in 1..=inst.n() {
            for b in 1..=inst.n() {
                let ab = inst.prefers(Gender::Men, p, a, b);
                let ba = inst.prefers(Gender::Men, p, b, a);
                match ab {
                    Preference::StrictlyPrefersA =>
                        prop_assert_eq!(ba, Preference::StrictlyPrefersB),
                    Preference::StrictlyPrefersB =>
                        prop_assert_eq!(ba, Preference::StrictlyPrefersA),
                    Preference::Indifferent => prop_assert_eq!(ba, Preference::Indifferent),
                    Preference::Incomparable => prop_assert_eq!(ba, Preference::Incomparable),
                }
            }
        }
    }

    #[test]
    fn strict_instances_never_tie(inst in sm_instance()) {
        for p in 1..=inst.n() {
            for a in 1..=inst.n() {
                for b in 1..=inst.n() {
                    if a == b { continue; }
                    let out = inst.prefers(Gender::Men, p, a, b);
                    prop_assert!(matches!(
                        out,
                        Preference::StrictlyPrefersA | Preference::StrictlyPrefersB
                    ));
                }
            }
        }
    }

    #[test]
    fn indifference_is_an_equivalence(inst in smti_instance(), p in 1usize..=8) {
        let p = (p - 1) % inst.n() + 1;
        let accepted = inst.list(Gender::Men, p);
        for &a in accepted {
            prop_assert_eq!(inst.prefers(Gender::Men, p, a, a), Preference::Indifferent);
            for &b in accepted {
                for &c in accepted {
                    if inst.prefers(Gender::Men, p, a, b) == Preference::Indifferent
                        && inst.prefers(Gender::Men, p, b, c) == Preference::Indifferent
                    {
                        prop_assert_eq!(
                            inst.prefers(Gender::Men, p, a, c),
                            Preference::Indifferent
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn generated_smti_satisfies_instance_invariants(inst in smti_instance()) {
        for m in 1..=inst.n() {
            prop_assert!(!inst.list(Gender::Men, m).is_empty());
            for w in 1..=inst.n() {
                prop_assert_eq!(
                    inst.accepts(Gender::Men, m, w),
                    inst.accepts(Gender::Women, w, m)
                );
            }
        }
    }

    #[test]
    fn blocking_pairs_match_oracle(inst in smti_instance(), seed in any::<u64>()) {
        let matching = any_matching(&inst, seed);
        let mut fast = blocking_pairs(&inst, &matching).pairs;
        fast.sort_unstable();
        prop_assert_eq!(fast, naive::naive_blocking_pairs(&inst, &matching));
    }

    #[test]
    fn undominated_chain_of_inclusions(inst in smti_instance(), seed in any::<u64>()) {
        let matching = any_matching(&inst, seed);
        let full = blocking_pairs(&inst, &matching);
        for primary in [Gender::Men, Gender::Women] {
            let und = undominated(&inst, &matching, &full, primary);
            let ext = extended_undominated(&inst, &matching, &full, primary);
            for pair in &und.pairs {
                prop_assert!(ext.pairs.contains(pair));
            }
            for pair in &ext.pairs {
                prop_assert!(full.pairs.contains(pair));
            }
            // Each person in at most one undominated pair, so at most n.
            prop_assert!(und.pairs.len() <= inst.n());
            for g in [Gender::Men, Gender::Women] {
                let mut seen = vec![false; inst.n() + 1];
                for pair in &und.pairs {
                    prop_assert!(!seen[pair.person(g)]);
                    seen[pair.person(g)] = true;
                }
            }
        }
    }

    #[test]
    fn removing_undominated_pair_clears_the_person(
        inst in sm_instance(),
        seed in any::<u64>(),
    ) {
        let matching = any_matching(&inst, seed);
        let full = blocking_pairs(&inst, &matching);
        for primary in [Gender::Men, Gender::Women] {
            let und = undominated(&inst, &matching, &full, primary);
            for &pair in &und.pairs {
                let next = remove_pair(&inst, &matching, pair).unwrap();
                let after = blocking_pairs(&inst, &next);
                // Stage-one undominated persons end up in no blocking pair.
                let person = pair.person(primary);
                prop_assert!(
                    after.pairs.iter().all(|p| p.person(primary) != person),
                    "{:?} {} still blocked", primary, person
                );
            }
        }
    }

    #[test]
    fn remove_pair_preserves_matching_invariants(
        inst in smti_instance(),
        seed in any::<u64>(),
    ) {
        let matching = any_matching(&inst, seed);
        let full = blocking_pairs(&inst, &matching);
        for &pair in full.pairs.iter().take(10) {
            let next = remove_pair(&inst, &matching, pair).unwrap();
            prop_assert!(next.validate_for(&inst).is_ok());
            prop_assert_eq!(next.wife_of(pair.man), Some(pair.woman));
        }
    }

    #[test]
    fn stability_iff_no_blocking_pairs(inst in smti_instance(), seed in any::<u64>()) {
        let matching = any_matching(&inst, seed);
        let eval = evaluate(&inst, &matching);
        prop_assert_eq!(eval.is_stable(), naive::naive_is_stable(&inst, &matching));
        prop_assert_eq!(eval.f(), eval.nbp + eval.ns);
    }

    #[test]
    fn enumeration_brackets_deferred_acceptance(seed in any::<u64>()) {
        let inst = gen_sm_ic(6, seed);
        let all = enumerate_stable(&inst, &EnumLimits::default()).unwrap();
        prop_assert!(!all.is_empty());
        let top = gale_shapley(&inst, Gender::Men).unwrap();
        let bottom = gale_shapley(&inst, Gender::Women).unwrap();
        prop_assert!(all.contains(&top));
        prop_assert!(all.contains(&bottom));
        for m in &all {
            prop_assert!(dominates(&inst, &top, m));
            prop_assert!(dominates(&inst, m, &bottom));
        }
    }
}
