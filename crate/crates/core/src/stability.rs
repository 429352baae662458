//! Blocking-pair detection, dominance filtering of blocking-pair sets, the
//! evaluation function, and the pair-removal move operators.
//!
//! A pair `(m, w)` blocks a matching when both accept each other, they are
//! not matched together, and each is single or strictly prefers the other to
//! their current partner (in strict-complete mode nobody is single, which
//! recovers the classical definition).

use serde::Serialize;
use thiserror::Error;

use crate::model::{BlockingPair, Gender, Instance, Matching, Mode, PersonId};

/// Which filtering produced a [`BlockingSet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SetKind {
    /// Every blocking pair.
    Full,
    /// Two-stage undominated filter: best per primary person, then best per
    /// person of the other side among the survivors.
    Undominated,
    /// The undominated set plus, for each stage-one survivor knocked out in
    /// stage two, that person's next-best blocking partner.
    Extended,
}

/// A set of blocking pairs with its provenance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockingSet {
    pub pairs: Vec<BlockingPair>,
    pub kind: SetKind,
    /// Gender whose point of view drove stage one; `None` for `Full`.
    pub primary: Option<Gender>,
}

/// Value of the search evaluation function.
///
/// `nbp` counts blocking pairs; `ns` counts singles (both sides) that appear
/// in no blocking pair, which is zero in strict-complete mode.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Evaluation {
    pub nbp: usize,
    pub ns: usize,
}

impl Evaluation {
    #[inline]
    pub fn f(&self) -> usize {
        self.nbp + self.ns
    }

    pub fn is_stable(&self) -> bool {
        self.nbp == 0
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StabilityError {
    #[error("pair ({man}, {woman}) is not blocking in this matching")]
    NotABlockingPair { man: PersonId, woman: PersonId },
}

/// True iff `(man, woman)` blocks `matching`.
#[inline]
pub fn is_blocking(
    instance: &Instance,
    matching: &Matching,
    man: PersonId,
    woman: PersonId,
) -> bool {
    matching.wife_of(man) != Some(woman)
        && instance.strictly_prefers_over(Gender::Men, man, woman, matching.wife_of(man))
        && instance.strictly_prefers_over(Gender::Women, woman, man, matching.husband_of(woman))
}

/// All blocking pairs, listed men-ascending and, per man, in his rank order.
pub fn blocking_pairs(instance: &Instance, matching: &Matching) -> BlockingSet {
    BlockingSet {
        pairs: oriented_full(instance, matching, Gender::Men),
        kind: SetKind::Full,
        primary: None,
    }
}

/// Full blocking-pair list ordered from `primary`'s side: primary persons
/// ascending, partners in each person's rank order. Same set as
/// [`blocking_pairs`], different canonical order.
pub(crate) fn oriented_full(
    instance: &Instance,
    matching: &Matching,
    primary: Gender,
) -> Vec<BlockingPair> {
    let other = primary.opposite();
    let mut pairs = Vec::new();
    for person in 1..=instance.n() {
        let current = matching.partner(primary, person);
        let cutoff = current.map_or(u32::MAX, |c| instance.rank_raw(primary, person, c));
        for &q in instance.list(primary, person) {
            // List is rank-sorted: beyond the current partner nothing is
            // strictly preferred.
            if instance.rank_raw(primary, person, q) >= cutoff {
                break;
            }
            if instance.strictly_prefers_over(other, q, person, matching.partner(other, q)) {
                pairs.push(BlockingPair::oriented(primary, person, q));
            }
        }
    }
    pairs
}

/// Key ordering a person's view of a pair: rank first, then partner id.
#[inline]
fn view_key(instance: &Instance, viewer: Gender, pair: &BlockingPair) -> (u32, PersonId) {
    let person = pair.person(viewer);
    let partner = pair.person(viewer.opposite());
    (instance.rank_raw(viewer, person, partner), partner)
}

/// Stage one of the undominated filter: for each person of `primary`, their
/// best blocking partner (ties broken by smaller id).
fn stage_one(instance: &Instance, primary: Gender, full: &[BlockingPair]) -> Vec<BlockingPair> {
    let mut best: Vec<Option<BlockingPair>> = vec![None; instance.n() + 1];
    for pair in full {
        let p = pair.person(primary);
        match &mut best[p] {
            slot @ None => *slot = Some(*pair),
            Some(cur) => {
                if view_key(instance, primary, pair) < view_key(instance, primary, cur) {
                    *cur = *pair;
                }
            }
        }
    }
    best.into_iter().flatten().collect()
}

/// Stage two: among stage-one survivors keep, per person of the other side,
/// only their best pair. Returns `(kept, eliminated)` in primary-id order.
fn stage_two(
    instance: &Instance,
    primary: Gender,
    survivors: Vec<BlockingPair>,
) -> (Vec<BlockingPair>, Vec<BlockingPair>) {
    let other = primary.opposite();
    let mut best: Vec<Option<BlockingPair>> = vec![None; instance.n() + 1];
    for pair in &survivors {
        let q = pair.person(other);
        match &mut best[q] {
            slot @ None => *slot = Some(*pair),
            Some(cur) => {
                if view_key(instance, other, pair) < view_key(instance, other, cur) {
                    *cur = *pair;
                }
            }
        }
    }
    let mut kept = Vec::new();
    let mut eliminated = Vec::new();
    for pair in survivors {
        if best[pair.person(other)] == Some(pair) {
            kept.push(pair);
        } else {
            eliminated.push(pair);
        }
    }
    (kept, eliminated)
}

/// Undominated blocking pairs from `primary`'s point of view.
///
/// `full` must be the complete blocking set of `(instance, matching)`.
/// Each person ends up in at most one returned pair.
pub fn undominated(
    instance: &Instance,
    _matching: &Matching,
    full: &BlockingSet,
    primary: Gender,
) -> BlockingSet {
    debug_assert_eq!(full.kind, SetKind::Full);
    let survivors = stage_one(instance, primary, &full.pairs);
    let (kept, _) = stage_two(instance, primary, survivors);
    BlockingSet {
        pairs: kept,
        kind: SetKind::Undominated,
        primary: Some(primary),
    }
}

/// The undominated set plus, for each stage-one survivor eliminated in stage
/// two, the eliminated person's next-best blocking partner (when one exists).
pub fn extended_undominated(
    instance: &Instance,
    _matching: &Matching,
    full: &BlockingSet,
    primary: Gender,
) -> BlockingSet {
    debug_assert_eq!(full.kind, SetKind::Full);
    let survivors = stage_one(instance, primary, &full.pairs);
    let (mut kept, eliminated) = stage_two(instance, primary, survivors);
    for lost in eliminated {
        let person = lost.person(primary);
        let lost_key = view_key(instance, primary, &lost);
        let next = full
            .pairs
            .iter()
            .filter(|p| p.person(primary) == person)
            .filter(|p| view_key(instance, primary, p) > lost_key)
            .min_by_key(|p| view_key(instance, primary, p));
        if let Some(next) = next {
            kept.push(*next);
        }
    }
    kept.sort_unstable_by_key(|p| p.person(primary));
    BlockingSet {
        pairs: kept,
        kind: SetKind::Extended,
        primary: Some(primary),
    }
}

/// Direct (unfiltered-set-free) computation of the undominated candidates,
/// used by the search loop; equals `undominated(...).pairs`.
pub(crate) fn candidates_undominated(
    instance: &Instance,
    matching: &Matching,
    primary: Gender,
) -> Vec<BlockingPair> {
    let survivors = scan_stage_one(instance, matching, primary);
    let (kept, _) = stage_two(instance, primary, survivors);
    kept
}

/// Direct computation of the extended candidates; equals
/// `extended_undominated(...).pairs`.
pub(crate) fn candidates_extended(
    instance: &Instance,
    matching: &Matching,
    primary: Gender,
) -> Vec<BlockingPair> {
    let survivors = scan_stage_one(instance, matching, primary);
    let (mut kept, eliminated) = stage_two(instance, primary, survivors);
    let other = primary.opposite();
    for lost in eliminated {
        let person = lost.person(primary);
        let lost_partner = lost.person(other);
        let lost_rank = instance.rank_raw(primary, person, lost_partner);
        // Resume this person's scan just past the eliminated partner.
        let current = matching.partner(primary, person);
        let cutoff = current.map_or(u32::MAX, |c| instance.rank_raw(primary, person, c));
        for &q in instance.list(primary, person) {
            let r = instance.rank_raw(primary, person, q);
            if r >= cutoff {
                break;
            }
            if (r, q) <= (lost_rank, lost_partner) {
                continue;
            }
            if instance.strictly_prefers_over(other, q, person, matching.partner(other, q)) {
                kept.push(BlockingPair::oriented(primary, person, q));
                break;
            }
        }
    }
    kept.sort_unstable_by_key(|p| p.person(primary));
    kept
}

/// Stage one without materializing the full set: scan each primary person's
/// list in rank order and stop at their first blocking partner.
fn scan_stage_one(
    instance: &Instance,
    matching: &Matching,
    primary: Gender,
) -> Vec<BlockingPair> {
    let other = primary.opposite();
    let mut survivors = Vec::new();
    for person in 1..=instance.n() {
        let current = matching.partner(primary, person);
        let cutoff = current.map_or(u32::MAX, |c| instance.rank_raw(primary, person, c));
        for &q in instance.list(primary, person) {
            if instance.rank_raw(primary, person, q) >= cutoff {
                break;
            }
            if instance.strictly_prefers_over(other, q, person, matching.partner(other, q)) {
                survivors.push(BlockingPair::oriented(primary, person, q));
                break;
            }
        }
    }
    survivors
}

/// Evaluation of a matching: blocking-pair count plus uncovered singles.
pub fn evaluate(instance: &Instance, matching: &Matching) -> Evaluation {
    let full = blocking_pairs(instance, matching);
    let nbp = full.pairs.len();
    let ns = match instance.mode() {
        Mode::SmStrictComplete => 0,
        Mode::Smti => count_uncovered_singles(instance, matching),
    };
    Evaluation { nbp, ns }
}

fn count_uncovered_singles(instance: &Instance, matching: &Matching) -> usize {
    let mut ns = 0;
    for gender in [Gender::Men, Gender::Women] {
        let other = gender.opposite();
        for person in 1..=instance.n() {
            if matching.partner(gender, person).is_some() {
                continue;
            }
            // A single is covered iff they have any blocking partner.
            let covered = instance.list(gender, person).iter().any(|&q| {
                instance.strictly_prefers_over(other, q, person, matching.partner(other, q))
            });
            if !covered {
                ns += 1;
            }
        }
    }
    ns
}

/// Removes a blocking pair from the matching, producing the neighbor
/// marriage.
///
/// Strict-complete mode: `m` and `w` marry, and their ex-partners marry each
/// other. Ties-and-incomplete mode: `m` and `w` marry, and any ex-partners
/// become single. The input is not mutated.
pub fn remove_pair(
    instance: &Instance,
    matching: &Matching,
    pair: BlockingPair,
) -> Result<Matching, StabilityError> {
    if !is_blocking(instance, matching, pair.man, pair.woman) {
        return Err(StabilityError::NotABlockingPair {
            man: pair.man,
            woman: pair.woman,
        });
    }
    let mut next = matching.clone();
    apply_removal(instance, &mut next, pair);
    Ok(next)
}

/// In-place version of [`remove_pair`] used by the search loop; the caller
/// guarantees `pair` is blocking.
pub(crate) fn apply_removal(instance: &Instance, matching: &mut Matching, pair: BlockingPair) {
    let ex_wife = matching.clear_man(pair.man);
    let ex_husband = matching.clear_woman(pair.woman);
    matching.set_pair(pair.man, pair.woman);
    if instance.mode() == Mode::SmStrictComplete {
        let (m2, w2) = (
            ex_husband.expect("strict-complete matchings are perfect"),
            ex_wife.expect("strict-complete matchings are perfect"),
        );
        matching.set_pair(m2, w2);
    }
}
