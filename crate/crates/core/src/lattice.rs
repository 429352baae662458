//! Exhaustive enumeration of stable marriages, the dominance lattice with
//! its Hasse diagram, rank distances, and sampling-fairness metrics.
//!
//! Enumeration is exact but exponential in the worst case, so it is guarded
//! by explicit size caps. For strict-complete instances the search is pruned
//! hard by the optimal/pessimal partner ranks from deferred acceptance
//! (every stable partner lies between them), which keeps moderate sizes
//! cheap in practice; the ties-and-incomplete search walks injective partial
//! matchings with incremental blocking checks.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use crate::gale_shapley::gale_shapley;
use crate::model::{Gender, Instance, Matching, Mode, PersonId};
use crate::naive::matching_key;

/// Enumeration size caps; exceeding one yields [`LatticeError::SizeCapExceeded`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumLimits {
    pub sm_cap: usize,
    pub smti_cap: usize,
}

impl Default for EnumLimits {
    fn default() -> Self {
        EnumLimits {
            sm_cap: 9,
            smti_cap: 7,
        }
    }
}

impl EnumLimits {
    /// Limits raised to admit instances of size `n` in either mode.
    pub fn up_to(n: usize) -> EnumLimits {
        let d = EnumLimits::default();
        EnumLimits {
            sm_cap: d.sm_cap.max(n),
            smti_cap: d.smti_cap.max(n),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("instance size {n} exceeds the enumeration cap {cap}")]
    SizeCapExceeded { n: usize, cap: usize },
    #[error("Hasse diagram is not graded: longest and shortest chains disagree")]
    GradednessViolation,
    #[error("matching does not belong to this lattice")]
    NotInLattice,
    #[error("the dominance lattice is defined for strict-complete instances only")]
    UnsupportedMode,
}

/// The full set of stable marriages of an instance with its dominance
/// structure.
#[derive(Clone, Debug)]
pub struct Lattice {
    /// All stable marriages, sorted lexicographically by wife vector.
    pub marriages: Vec<Matching>,
    /// Hasse cover edges, directed from dominating to dominated.
    pub edges: Vec<(usize, usize)>,
    /// Index of the men-optimal marriage (dominates everything).
    pub top: usize,
    /// Index of the women-optimal marriage (dominated by everything).
    pub bottom: usize,
    /// Arc distance from the top along the graded diagram.
    pub rank_of: Vec<usize>,
}

impl Lattice {
    pub fn len(&self) -> usize {
        self.marriages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.marriages.is_empty()
    }

    pub fn index_of(&self, matching: &Matching) -> Option<usize> {
        self.marriages.iter().position(|m| m == matching)
    }

    /// Height of the diagram: rank of the bottom element.
    pub fn height(&self) -> usize {
        self.rank_of[self.bottom]
    }

    /// DOT digraph for visual inspection; nodes are wife vectors.
    pub fn to_dot(&self) -> String {
        let label = |i: usize| -> String {
            let words: Vec<String> = self.marriages[i]
                .pairs()
                .map(|(_, w)| w.to_string())
                .collect();
            words.join(" ")
        };
        let mut out = String::from("digraph stable_marriages {\n");
        for i in 0..self.len() {
            out.push_str(&format!("  n{} [label=\"{}\"];\n", i, label(i)));
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("  n{a} -> n{b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Sampling-fairness statistics of solver outputs against a lattice.
#[derive(Clone, Debug, Serialize)]
pub struct SampleStats {
    /// Hit frequency of each lattice marriage; sums to 1.
    pub frequencies: Vec<f64>,
    pub entropy_bits: f64,
    /// Entropy over `log2 |S|`; a single-marriage lattice counts as 1.0
    /// (the sampler is trivially uniform there).
    pub normalized_entropy: f64,
    /// Mean over runs of `d_m / (d_m + d_w)`; 0.5 when the lattice has a
    /// single marriage.
    pub mean_normalized_distance: f64,
    /// Number of distinct marriages hit.
    pub distinct: usize,
}

/// All stable matchings of the instance, sorted lexicographically by wife
/// vector. Exact; bounded by the caps in `limits`.
pub fn enumerate_stable(
    instance: &Instance,
    limits: &EnumLimits,
) -> Result<Vec<Matching>, LatticeError> {
    let n = instance.n();
    match instance.mode() {
        Mode::SmStrictComplete => {
            if n > limits.sm_cap {
                return Err(LatticeError::SizeCapExceeded {
                    n,
                    cap: limits.sm_cap,
                });
            }
            Ok(enumerate_sm(instance))
        }
        Mode::Smti => {
            if n > limits.smti_cap {
                return Err(LatticeError::SizeCapExceeded {
                    n,
                    cap: limits.smti_cap,
                });
            }
            Ok(enumerate_smti(instance))
        }
    }
}

fn enumerate_sm(instance: &Instance) -> Vec<Matching> {
    let n = instance.n();
    let top = gale_shapley(instance, Gender::Men).expect("strict-complete");
    let bottom = gale_shapley(instance, Gender::Women).expect("strict-complete");

    // Every stable partner of a person lies, in their own ranking, between
    // their optimal and pessimal stable partners.
    let man_low: Vec<u32> = rank_vector(instance, Gender::Men, &top);
    let man_high: Vec<u32> = rank_vector(instance, Gender::Men, &bottom);
    let woman_low: Vec<u32> = rank_vector(instance, Gender::Women, &bottom);
    let woman_high: Vec<u32> = rank_vector(instance, Gender::Women, &top);

    let allowed: Vec<Vec<PersonId>> = (0..=n)
        .map(|m| {
            if m == 0 {
                return Vec::new();
            }
            instance
                .list(Gender::Men, m)
                .iter()
                .copied()
                .filter(|&w| {
                    let rm = instance.rank_raw(Gender::Men, m, w);
                    let rw = instance.rank_raw(Gender::Women, w, m);
                    rm >= man_low[m]
                        && rm <= man_high[m]
                        && rw >= woman_low[w]
                        && rw <= woman_high[w]
                })
                .collect()
        })
        .collect();

    let mut wives: Vec<PersonId> = vec![0; n + 1];
    let mut used = vec![false; n + 1];
    let mut out = Vec::new();
    sm_rec(instance, &allowed, 1, &mut wives, &mut used, &mut out);
    out.sort_by_key(matching_key);
    out
}

fn sm_rec(
    instance: &Instance,
    allowed: &[Vec<PersonId>],
    man: PersonId,
    wives: &mut Vec<PersonId>,
    used: &mut Vec<bool>,
    out: &mut Vec<Matching>,
) {
    let n = instance.n();
    if man > n {
        let vec: Vec<Option<PersonId>> = wives[1..].iter().map(|&w| Some(w)).collect();
        out.push(Matching::from_wives(n, &vec).unwrap());
        return;
    }
    'cand: for &w in &allowed[man] {
        if used[w] {
            continue;
        }
        // No blocking pair may exist inside the assigned prefix.
        for prev in 1..man {
            let pw = wives[prev];
            // (prev, w): prev strictly prefers w to his wife and w prefers prev.
            if instance.rank_raw(Gender::Men, prev, w) < instance.rank_raw(Gender::Men, prev, pw)
                && instance.rank_raw(Gender::Women, w, prev)
                    < instance.rank_raw(Gender::Women, w, man)
            {
                continue 'cand;
            }
            // (man, pw): man strictly prefers pw to w and pw prefers man.
            if instance.rank_raw(Gender::Men, man, pw) < instance.rank_raw(Gender::Men, man, w)
                && instance.rank_raw(Gender::Women, pw, man)
                    < instance.rank_raw(Gender::Women, pw, prev)
            {
                continue 'cand;
            }
        }
        wives[man] = w;
        used[w] = true;
        sm_rec(instance, allowed, man + 1, wives, used, out);
        used[w] = false;
    }
}

fn rank_vector(instance: &Instance, gender: Gender, matching: &Matching) -> Vec<u32> {
    (0..=instance.n())
        .map(|p| {
            if p == 0 {
                0
            } else {
                instance.rank_raw(gender, p, matching.partner(gender, p).unwrap())
            }
        })
        .collect()
}

fn enumerate_smti(instance: &Instance) -> Vec<Matching> {
    let n = instance.n();
    let mut wives: Vec<Option<PersonId>> = vec![None; n + 1];
    let mut used = vec![false; n + 1];
    let mut out = Vec::new();
    smti_rec(instance, 1, &mut wives, &mut used, &mut out);
    out.sort_by_key(matching_key);
    out
}

fn smti_rec(
    instance: &Instance,
    man: PersonId,
    wives: &mut Vec<Option<PersonId>>,
    used: &mut Vec<bool>,
    out: &mut Vec<Matching>,
) {
    let n = instance.n();
    if man > n {
        // Deferred checks against women nobody took: such a woman blocks with
        // any man who accepts her and is single or strictly prefers her.
        for w in 1..=n {
            if used[w] {
                continue;
            }
            for &m in instance.list(Gender::Women, w) {
                let ok = match wives[m] {
                    None => true,
                    Some(cur) => {
                        instance.rank_raw(Gender::Men, m, w)
                            < instance.rank_raw(Gender::Men, m, cur)
                    }
                };
                if ok {
                    return;
                }
            }
        }
        out.push(Matching::from_wives(n, &wives[1..].to_vec()).unwrap());
        return;
    }

    // Option: man stays single. Blocks with any already-married woman who
    // accepts and strictly prefers him.
    let single_ok = (1..man).all(|prev| match wives[prev] {
        Some(pw) => {
            !(instance.accepts(Gender::Men, man, pw)
                && instance.rank_raw(Gender::Women, pw, man)
                    < instance.rank_raw(Gender::Women, pw, prev))
        }
        None => true,
    });
    if single_ok {
        wives[man] = None;
        smti_rec(instance, man + 1, wives, used, out);
    }

    'cand: for &w in instance.list(Gender::Men, man) {
        if used[w] {
            continue;
        }
        for prev in 1..man {
            match wives[prev] {
                Some(pw) => {
                    // (prev, w) and (man, pw) must not block.
                    if instance.accepts(Gender::Men, prev, w)
                        && instance.rank_raw(Gender::Men, prev, w)
                            < instance.rank_raw(Gender::Men, prev, pw)
                        && instance.rank_raw(Gender::Women, w, prev)
                            < instance.rank_raw(Gender::Women, w, man)
                    {
                        continue 'cand;
                    }
                    if instance.accepts(Gender::Men, man, pw)
                        && instance.rank_raw(Gender::Men, man, pw)
                            < instance.rank_raw(Gender::Men, man, w)
                        && instance.accepts(Gender::Women, pw, man)
                        && instance.rank_raw(Gender::Women, pw, man)
                            < instance.rank_raw(Gender::Women, pw, prev)
                    {
                        continue 'cand;
                    }
                }
                None => {
                    // (prev, w): prev is single, so acceptance plus w's strict
                    // preference blocks.
                    if instance.accepts(Gender::Men, prev, w)
                        && instance.accepts(Gender::Women, w, prev)
                        && instance.rank_raw(Gender::Women, w, prev)
                            < instance.rank_raw(Gender::Women, w, man)
                    {
                        continue 'cand;
                    }
                }
            }
        }
        wives[man] = Some(w);
        used[w] = true;
        smti_rec(instance, man + 1, wives, used, out);
        used[w] = false;
        wives[man] = None;
    }
}

/// Dominance per the men's side: true iff every man does at least as well in
/// `a` as in `b`. Reflexive. Callers guarantee both matchings are stable.
pub fn dominates(instance: &Instance, a: &Matching, b: &Matching) -> bool {
    (1..=instance.n()).all(|m| {
        let ra = instance.rank_raw(Gender::Men, m, a.wife_of(m).expect("stable SM matching"));
        let rb = instance.rank_raw(Gender::Men, m, b.wife_of(m).expect("stable SM matching"));
        ra <= rb
    })
}

/// Builds the full lattice: enumeration, Hasse cover edges via transitive
/// reduction of dominance, and graded ranks from the top.
pub fn build_lattice(instance: &Instance, limits: &EnumLimits) -> Result<Lattice, LatticeError> {
    if instance.mode() != Mode::SmStrictComplete {
        return Err(LatticeError::UnsupportedMode);
    }
    let marriages = enumerate_stable(instance, limits)?;
    let k = marriages.len();
    assert!(k > 0, "a strict-complete instance always has a stable marriage");

    let mut dom = vec![vec![false; k]; k];
    for a in 0..k {
        for b in 0..k {
            if a != b && dominates(instance, &marriages[a], &marriages[b]) {
                dom[a][b] = true;
            }
        }
    }

    let top = (0..k)
        .find(|&a| (0..k).all(|b| a == b || dom[a][b]))
        .expect("dominance has a maximum element");
    let bottom = (0..k)
        .find(|&b| (0..k).all(|a| a == b || dom[a][b]))
        .expect("dominance has a minimum element");

    // Cover edges via longest-chain lengths in the (transitive) dominance
    // relation: (a, b) is a cover iff the longest chain from a to b has one
    // arc. Computed by DP over a topological order.
    let order = topo_order(&dom);
    let mut edges = Vec::new();
    let mut longest_from_top: Vec<Option<usize>> = vec![None; k];
    for a in 0..k {
        let chain = longest_chains_from(a, &dom, &order);
        for b in 0..k {
            if dom[a][b] && chain[b] == Some(1) {
                edges.push((a, b));
            }
        }
        if a == top {
            longest_from_top = chain;
        }
    }
    edges.sort_unstable();

    // Graded ranks: shortest arc distance from the top must agree with the
    // longest chain from the top at every marriage.
    let mut adj = vec![Vec::new(); k];
    for &(a, b) in &edges {
        adj[a].push(b);
    }
    let mut shortest: Vec<Option<usize>> = vec![None; k];
    shortest[top] = Some(0);
    let mut queue = VecDeque::from([top]);
    while let Some(a) = queue.pop_front() {
        for &b in &adj[a] {
            if shortest[b].is_none() {
                shortest[b] = Some(shortest[a].unwrap() + 1);
                queue.push_back(b);
            }
        }
    }
    let mut rank_of = vec![0; k];
    for i in 0..k {
        let long = longest_from_top[i];
        let short = shortest[i];
        if i == top {
            rank_of[i] = 0;
            continue;
        }
        match (long, short) {
            (Some(l), Some(s)) if l == s => rank_of[i] = l,
            _ => return Err(LatticeError::GradednessViolation),
        }
    }

    let lattice = Lattice {
        marriages,
        edges,
        top,
        bottom,
        rank_of,
    };

    debug_assert_eq!(
        lattice.marriages[lattice.top],
        gale_shapley(instance, Gender::Men).unwrap()
    );
    debug_assert_eq!(
        lattice.marriages[lattice.bottom],
        gale_shapley(instance, Gender::Women).unwrap()
    );
    Ok(lattice)
}

/// Topological order of the dominance DAG (more dominators first... fewer).
fn topo_order(dom: &[Vec<bool>]) -> Vec<usize> {
    let k = dom.len();
    let mut order: Vec<usize> = (0..k).collect();
    // Number of dominators is a valid topological key: a strict dominator of
    // b dominates everything b dominates.
    let dominators: Vec<usize> = (0..k)
        .map(|b| (0..k).filter(|&a| dom[a][b]).count())
        .collect();
    order.sort_by_key(|&i| dominators[i]);
    order
}

fn longest_chains_from(a: usize, dom: &[Vec<bool>], order: &[usize]) -> Vec<Option<usize>> {
    let k = dom.len();
    let mut dist: Vec<Option<usize>> = vec![None; k];
    dist[a] = Some(0);
    for &c in order {
        let Some(dc) = dist[c] else { continue };
        for b in 0..k {
            if dom[c][b] {
                let cand = dc + 1;
                if dist[b].map_or(true, |d| cand > d) {
                    dist[b] = Some(cand);
                }
            }
        }
    }
    dist
}

/// Arc distances `(d_m, d_w)` of a lattice marriage from the top and bottom.
pub fn distance_metrics(
    lattice: &Lattice,
    matching: &Matching,
) -> Result<(usize, usize), LatticeError> {
    let idx = lattice
        .index_of(matching)
        .ok_or(LatticeError::NotInLattice)?;
    let d_m = lattice.rank_of[idx];
    let d_w = lattice.height() - d_m;
    Ok((d_m, d_w))
}

/// Frequencies, entropy, and mean normalized distance of solver outputs.
pub fn sampling_metrics(
    lattice: &Lattice,
    results: &[Matching],
) -> Result<SampleStats, LatticeError> {
    assert!(!results.is_empty(), "sampling metrics need at least one run");
    let index: HashMap<Vec<Option<PersonId>>, usize> = lattice
        .marriages
        .iter()
        .enumerate()
        .map(|(i, m)| (matching_key(m), i))
        .collect();

    let mut counts = vec![0usize; lattice.len()];
    let mut distance_sum = 0.0;
    for result in results {
        let idx = *index
            .get(&matching_key(result))
            .ok_or(LatticeError::NotInLattice)?;
        counts[idx] += 1;
        let d_m = lattice.rank_of[idx] as f64;
        let d_w = (lattice.height() - lattice.rank_of[idx]) as f64;
        distance_sum += if d_m + d_w == 0.0 {
            0.5
        } else {
            d_m / (d_m + d_w)
        };
    }

    let r = results.len() as f64;
    let frequencies: Vec<f64> = counts.iter().map(|&c| c as f64 / r).collect();
    let entropy_bits: f64 = frequencies
        .iter()
        .filter(|&&f| f > 0.0)
        .map(|&f| -f * f.log2())
        .sum::<f64>()
        .max(0.0);
    let normalized_entropy = if lattice.len() == 1 {
        1.0
    } else {
        entropy_bits / (lattice.len() as f64).log2()
    };

    Ok(SampleStats {
        frequencies,
        entropy_bits,
        normalized_entropy,
        mean_normalized_distance: distance_sum / r,
        distinct: counts.iter().filter(|&&c| c > 0).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::generate::{gen_smti, gen_sm_ic, GenParams};
    use crate::naive;

    #[test]
    fn single_marriage_lattice() {
        let inst = Instance::from_strict_lists(1, &[vec![1]], &[vec![1]], Mode::SmStrictComplete)
            .unwrap();
        let lat = build_lattice(&inst, &EnumLimits::default()).unwrap();
        assert_eq!(lat.len(), 1);
        assert!(lat.edges.is_empty());
        assert_eq!(lat.rank_of, vec![0]);
        assert_eq!(lat.top, lat.bottom);
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for seed in 0..30 {
            let inst = gen_sm_ic(7, 5000 + seed);
            let smart = enumerate_stable(&inst, &EnumLimits::default()).unwrap();
            let brute = naive::brute_force_stable_sm(&inst, 7);
            assert_eq!(smart, brute, "seed {seed}");
        }
    }

    #[test]
    fn smti_enumeration_matches_brute_force() {
        for seed in 0..30 {
            let params = GenParams::new(5, 0.4, 0.5, 7000 + seed).unwrap();
            let inst = gen_smti(&params).unwrap();
            let smart = enumerate_stable(&inst, &EnumLimits::default()).unwrap();
            let brute = naive::brute_force_stable_smti(&inst, 5);
            assert_eq!(smart, brute, "seed {seed}");
        }
    }

    #[test]
    fn table1_top_and_bottom_are_deferred_acceptance() {
        let inst = fixtures::table1();
        let lat = build_lattice(&inst, &EnumLimits::default()).unwrap();
        assert_eq!(
            lat.marriages[lat.top],
            gale_shapley(&inst, Gender::Men).unwrap()
        );
        assert_eq!(
            lat.marriages[lat.bottom],
            gale_shapley(&inst, Gender::Women).unwrap()
        );
        // Graded: every marriage splits the height.
        for m in &lat.marriages {
            let (d_m, d_w) = distance_metrics(&lat, m).unwrap();
            assert_eq!(d_m + d_w, lat.height());
        }
    }

    #[test]
    fn dominates_is_reflexive_and_anchored() {
        let inst = fixtures::table1();
        let all = naive::brute_force_stable_sm(&inst, 8);
        let top = gale_shapley(&inst, Gender::Men).unwrap();
        for m in &all {
            assert!(dominates(&inst, m, m));
            assert!(dominates(&inst, &top, m));
        }
    }

    #[test]
    fn incomparable_pair_exists_in_wide_lattice() {
        // Scan seeds for a lattice with two incomparable marriages.
        for seed in 0..200 {
            let inst = gen_sm_ic(8, 41_000 + seed);
            let all = enumerate_stable(&inst, &EnumLimits::default()).unwrap();
            if all.len() < 4 {
                continue;
            }
            for a in 0..all.len() {
                for b in (a + 1)..all.len() {
                    if !dominates(&inst, &all[a], &all[b]) && !dominates(&inst, &all[b], &all[a]) {
                        return;
                    }
                }
            }
        }
        panic!("no incomparable pair found across 200 seeds");
    }

    #[test]
    fn hasse_edges_match_naive_reduction() {
        for seed in 0..20 {
            let inst = gen_sm_ic(8, 60_000 + seed);
            let lat = build_lattice(&inst, &EnumLimits::default()).unwrap();
            let k = lat.len();
            let mut dom = vec![vec![false; k]; k];
            for a in 0..k {
                for b in 0..k {
                    if a != b && dominates(&inst, &lat.marriages[a], &lat.marriages[b]) {
                        dom[a][b] = true;
                    }
                }
            }
            let mut expect = naive::naive_transitive_reduction(&dom);
            expect.sort_unstable();
            assert_eq!(lat.edges, expect, "seed {seed}");
        }
    }

    #[test]
    fn smi_stable_matchings_share_size() {
        let params = GenParams::new(6, 0.5, 0.0, 99).unwrap();
        let inst = gen_smti(&params).unwrap();
        let all = enumerate_stable(&inst, &EnumLimits::default()).unwrap();
        assert!(!all.is_empty());
        let size = all[0].size();
        assert!(all.iter().all(|m| m.size() == size));
    }

    #[test]
    fn cap_is_enforced() {
        let inst = gen_sm_ic(10, 0);
        let err = enumerate_stable(&inst, &EnumLimits::default()).unwrap_err();
        assert_eq!(err, LatticeError::SizeCapExceeded { n: 10, cap: 9 });
        assert!(enumerate_stable(&inst, &EnumLimits::up_to(10)).is_ok());
    }

    #[test]
    fn two_element_lattice_metrics() {
        let inst = fixtures::two_stable_instance();
        let lat = build_lattice(&inst, &EnumLimits::default()).unwrap();
        assert_eq!(lat.len(), 2);
        assert_eq!(lat.height(), 1);

        let top = lat.marriages[lat.top].clone();
        let bottom = lat.marriages[lat.bottom].clone();
        assert_eq!(distance_metrics(&lat, &top).unwrap(), (0, 1));
        assert_eq!(distance_metrics(&lat, &bottom).unwrap(), (1, 0));

        // Half the runs on each element: one bit, centered distance.
        let results = vec![top.clone(), bottom.clone(), top, bottom];
        let stats = sampling_metrics(&lat, &results).unwrap();
        assert!((stats.entropy_bits - 1.0).abs() < 1e-12);
        assert!((stats.normalized_entropy - 1.0).abs() < 1e-12);
        assert!((stats.mean_normalized_distance - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sampling_degenerate_cases() {
        let inst = fixtures::two_stable_instance();
        let lat = build_lattice(&inst, &EnumLimits::default()).unwrap();
        let top = lat.marriages[lat.top].clone();
        let stats = sampling_metrics(&lat, &[top]).unwrap();
        assert_eq!(stats.entropy_bits, 0.0);
        assert_eq!(stats.distinct, 1);

        let foreign = Matching::from_wives(2, &[None, None]).unwrap();
        assert_eq!(
            sampling_metrics(&lat, &[foreign]).unwrap_err(),
            LatticeError::NotInLattice
        );

        // Single-marriage lattice: normalized entropy pinned to 1.0.
        let tiny = Instance::from_strict_lists(1, &[vec![1]], &[vec![1]], Mode::SmStrictComplete)
            .unwrap();
        let lat = build_lattice(&tiny, &EnumLimits::default()).unwrap();
        let only = lat.marriages[0].clone();
        let stats = sampling_metrics(&lat, &[only]).unwrap();
        assert_eq!(stats.normalized_entropy, 1.0);
        assert_eq!(stats.mean_normalized_distance, 0.5);
    }

    #[test]
    fn dot_export_smoke() {
        let inst = fixtures::table1();
        let lat = build_lattice(&inst, &EnumLimits::default()).unwrap();
        let dot = lat.to_dot();
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("->"));
    }
}
