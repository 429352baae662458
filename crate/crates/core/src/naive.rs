//! Deliberately naive reference implementations used to cross-check the
//! optimized code paths.
//!
//! Everything here is written straight from the definitions, with no early
//! exits or pruning, and stays independent of the modules it verifies. Sizes
//! are expected to be tiny.

use crate::model::{BlockingPair, Gender, Instance, Matching, Mode, PersonId};

/// Double loop over all (man, woman) pairs, checking the blocking condition
/// directly. Output sorted `(man, woman)`.
pub fn naive_blocking_pairs(instance: &Instance, matching: &Matching) -> Vec<BlockingPair> {
    let n = instance.n();
    let mut out = Vec::new();
    for m in 1..=n {
        for w in 1..=n {
            if matching.wife_of(m) == Some(w) {
                continue;
            }
            if !instance.accepts(Gender::Men, m, w) || !instance.accepts(Gender::Women, w, m) {
                continue;
            }
            let m_ok = match matching.wife_of(m) {
                None => true,
                Some(cur) => {
                    instance.rank(Gender::Men, m, w).unwrap()
                        < instance.rank(Gender::Men, m, cur).unwrap()
                }
            };
            let w_ok = match matching.husband_of(w) {
                None => true,
                Some(cur) => {
                    instance.rank(Gender::Women, w, m).unwrap()
                        < instance.rank(Gender::Women, w, cur).unwrap()
                }
            };
            if m_ok && w_ok {
                out.push(BlockingPair::new(m, w));
            }
        }
    }
    out
}

pub fn naive_is_stable(instance: &Instance, matching: &Matching) -> bool {
    naive_blocking_pairs(instance, matching).is_empty()
}

/// All `n!` perfect matchings of a strict-complete instance, filtered by the
/// naive stability check. Sorted lexicographically by wife vector.
///
/// Panics if `n > cap` to keep accidental blowups loud.
pub fn brute_force_stable_sm(instance: &Instance, cap: usize) -> Vec<Matching> {
    assert_eq!(instance.mode(), Mode::SmStrictComplete);
    let n = instance.n();
    assert!(n <= cap, "brute force over {n}! matchings refused (cap {cap})");
    let mut wives: Vec<PersonId> = (1..=n).collect();
    let mut out = Vec::new();
    permute(&mut wives, 0, &mut |perm| {
        let wives: Vec<Option<PersonId>> = perm.iter().map(|&w| Some(w)).collect();
        let matching = Matching::from_wives(n, &wives).unwrap();
        if naive_is_stable(instance, &matching) {
            out.push(matching);
        }
    });
    out.sort_by_key(matching_key);
    out
}

/// All injective partial matchings over mutually acceptable pairs, filtered
/// by the naive stability check. Sorted lexicographically by wife vector.
pub fn brute_force_stable_smti(instance: &Instance, cap: usize) -> Vec<Matching> {
    let n = instance.n();
    assert!(n <= cap, "brute force over partial matchings refused (cap {cap})");
    let mut wives: Vec<Option<PersonId>> = vec![None; n];
    let mut used = vec![false; n + 1];
    let mut out = Vec::new();
    fn rec(
        instance: &Instance,
        man: PersonId,
        wives: &mut Vec<Option<PersonId>>,
        used: &mut Vec<bool>,
        out: &mut Vec<Matching>,
    ) {
        let n = instance.n();
        if man > n {
            let matching = Matching::from_wives(n, wives).unwrap();
            if naive_is_stable(instance, &matching) {
                out.push(matching);
            }
            return;
        }
        wives[man - 1] = None;
        rec(instance, man + 1, wives, used, out);
        for &w in instance.list(Gender::Men, man) {
            if used[w] || !instance.accepts(Gender::Women, w, man) {
                continue;
            }
            used[w] = true;
            wives[man - 1] = Some(w);
            rec(instance, man + 1, wives, used, out);
            wives[man - 1] = None;
            used[w] = false;
        }
    }
    rec(instance, 1, &mut wives, &mut used, &mut out);
    out.sort_by_key(matching_key);
    out
}

/// Cubic transitive reduction of a DAG given as a reachability-free edge
/// relation: keeps `(a, b)` iff no `c` satisfies `relation[a][c] &&
/// relation[c][b]`.
pub fn naive_transitive_reduction(relation: &[Vec<bool>]) -> Vec<(usize, usize)> {
    let k = relation.len();
    let mut edges = Vec::new();
    for a in 0..k {
        for b in 0..k {
            if a == b || !relation[a][b] {
                continue;
            }
            let shortcut = (0..k)
                .any(|c| c != a && c != b && relation[a][c] && relation[c][b]);
            if !shortcut {
                edges.push((a, b));
            }
        }
    }
    edges
}

pub(crate) fn matching_key(matching: &Matching) -> Vec<Option<PersonId>> {
    (1..=matching.n()).map(|m| matching.wife_of(m)).collect()
}

fn permute<F: FnMut(&[PersonId])>(items: &mut Vec<PersonId>, k: usize, visit: &mut F) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, visit);
        items.swap(k, i);
    }
}
