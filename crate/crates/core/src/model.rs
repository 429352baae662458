//! Core domain types: problem instances, matchings, blocking pairs, and
//! preference queries.
//!
//! People are identified by 1-based ids matching the usual tabular
//! presentation of these problems. Internally every per-person array has an
//! unused slot 0 so ids index directly.
//!
//! Ranks are positive integers; rank 1 is the most preferred. Equal ranks
//! within one person's list encode a tie, a missing entry encodes
//! unacceptability. Lists are stored normalized: ranks are compressed to
//! `1, 2, 3, ...` preserving tie groups, and entries are ordered by
//! `(rank, id)`, so two instances that differ only by rank relabeling or
//! within-tie entry order compare equal.

use serde::Serialize;
use thiserror::Error;

/// 1-based person id. Valid ids for an instance of size `n` are `1..=n`.
pub type PersonId = usize;

/// Which side of the market a person belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Gender {
    Men,
    Women,
}

impl Gender {
    pub fn opposite(self) -> Gender {
        match self {
            Gender::Men => Gender::Women,
            Gender::Women => Gender::Men,
        }
    }

    fn index(self) -> usize {
        match self {
            Gender::Men => 0,
            Gender::Women => 1,
        }
    }
}

/// Instance flavor. Strict-complete instances are the classical problem;
/// `Smti` allows ties and incomplete lists (and therefore singles).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Mode {
    SmStrictComplete,
    Smti,
}

/// Outcome of comparing two candidates from one person's point of view.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Preference {
    StrictlyPrefersA,
    Indifferent,
    StrictlyPrefersB,
    /// Both candidates are unacceptable to the person.
    Incomparable,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("person id {id} out of range 1..={n}")]
    InvalidId { id: PersonId, n: usize },
    #[error("{gender:?} {person}: duplicate entry {entry}")]
    DuplicateEntry {
        gender: Gender,
        person: PersonId,
        entry: PersonId,
    },
    #[error("{gender:?} {person} has an empty preference list")]
    EmptyList { gender: Gender, person: PersonId },
    #[error("acceptance not symmetric: man {man} and woman {woman} disagree")]
    AsymmetricAcceptance { man: PersonId, woman: PersonId },
    #[error("{gender:?} {person} has ties in strict-complete mode")]
    TiesInStrictMode { gender: Gender, person: PersonId },
    #[error("{gender:?} {person} has an incomplete list in strict-complete mode")]
    IncompleteInStrictMode { gender: Gender, person: PersonId },
}

/// A preference profile for `n` men and `n` women.
///
/// Immutable after construction; cheap to share across threads.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    n: usize,
    mode: Mode,
    /// `lists[side][person]`: acceptable partners ordered by `(rank, id)`.
    lists: [Vec<Vec<PersonId>>; 2],
    /// `ranks[side][person][partner]`: normalized rank, 0 = unacceptable.
    ranks: [Vec<Vec<u32>>; 2],
}

impl Instance {
    /// Validates and normalizes raw preference lists.
    ///
    /// Each person's raw list is given as ordered tie groups: the first group
    /// holds the most preferred partners, entries within a group are tied.
    pub fn build(
        n: usize,
        raw_men: &[Vec<Vec<PersonId>>],
        raw_women: &[Vec<Vec<PersonId>>],
        mode: Mode,
    ) -> Result<Instance, BuildError> {
        assert!(n >= 1, "instance size must be positive");
        assert_eq!(raw_men.len(), n, "expected {n} men's lists");
        assert_eq!(raw_women.len(), n, "expected {n} women's lists");

        let mut lists = [vec![Vec::new(); n + 1], vec![Vec::new(); n + 1]];
        let mut ranks = [vec![vec![0u32; n + 1]; n + 1], vec![vec![0u32; n + 1]; n + 1]];

        for (side, raw) in [(Gender::Men, raw_men), (Gender::Women, raw_women)] {
            let si = side.index();
            for (person, groups) in (1..=n).zip(raw.iter()) {
                let mut entries: Vec<(u32, PersonId)> = Vec::new();
                for (gi, group) in groups.iter().enumerate() {
                    for &id in group {
                        if id < 1 || id > n {
                            return Err(BuildError::InvalidId { id, n });
                        }
                        if ranks[si][person][id] != 0 {
                            return Err(BuildError::DuplicateEntry {
                                gender: side,
                                person,
                                entry: id,
                            });
                        }
                        ranks[si][person][id] = gi as u32 + 1;
                        entries.push((gi as u32 + 1, id));
                    }
                    if group.len() > 1 && mode == Mode::SmStrictComplete {
                        return Err(BuildError::TiesInStrictMode {
                            gender: side,
                            person,
                        });
                    }
                }
                if entries.is_empty() {
                    return Err(BuildError::EmptyList {
                        gender: side,
                        person,
                    });
                }
                if mode == Mode::SmStrictComplete && entries.len() != n {
                    return Err(BuildError::IncompleteInStrictMode {
                        gender: side,
                        person,
                    });
                }
                entries.sort_unstable();
                lists[si][person] = entries.into_iter().map(|(_, id)| id).collect();
            }
        }

        // Acceptance must be symmetric.
        for m in 1..=n {
            for w in 1..=n {
                let mw = ranks[0][m][w] != 0;
                let wm = ranks[1][w][m] != 0;
                if mw != wm {
                    return Err(BuildError::AsymmetricAcceptance { man: m, woman: w });
                }
            }
        }

        Ok(Instance {
            n,
            mode,
            lists,
            ranks,
        })
    }

    /// Convenience constructor for strict lists (one entry per group).
    pub fn from_strict_lists(
        n: usize,
        men: &[Vec<PersonId>],
        women: &[Vec<PersonId>],
        mode: Mode,
    ) -> Result<Instance, BuildError> {
        let wrap = |lists: &[Vec<PersonId>]| -> Vec<Vec<Vec<PersonId>>> {
            lists
                .iter()
                .map(|l| l.iter().map(|&id| vec![id]).collect())
                .collect()
        };
        Instance::build(n, &wrap(men), &wrap(women), mode)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Acceptable partners of `person`, ordered by `(rank, id)`.
    pub fn list(&self, gender: Gender, person: PersonId) -> &[PersonId] {
        &self.lists[gender.index()][person]
    }

    /// Normalized rank of `partner` in `person`'s list, if acceptable.
    pub fn rank(&self, gender: Gender, person: PersonId, partner: PersonId) -> Option<u32> {
        match self.ranks[gender.index()][person][partner] {
            0 => None,
            r => Some(r),
        }
    }

    /// Raw rank with 0 meaning unacceptable; hot-path accessor.
    #[inline]
    pub(crate) fn rank_raw(&self, gender: Gender, person: PersonId, partner: PersonId) -> u32 {
        self.ranks[gender.index()][person][partner]
    }

    pub fn accepts(&self, gender: Gender, person: PersonId, partner: PersonId) -> bool {
        self.rank_raw(gender, person, partner) != 0
    }

    /// The person's list as tie groups (consecutive equal ranks).
    pub fn tie_groups(&self, gender: Gender, person: PersonId) -> Vec<Vec<PersonId>> {
        let list = self.list(gender, person);
        let mut groups: Vec<Vec<PersonId>> = Vec::new();
        let mut last_rank = 0;
        for &id in list {
            let r = self.rank_raw(gender, person, id);
            if r == last_rank {
                groups.last_mut().unwrap().push(id);
            } else {
                groups.push(vec![id]);
                last_rank = r;
            }
        }
        groups
    }

    /// Compares candidates `a` and `b` from `person`'s point of view.
    ///
    /// Acceptable beats unacceptable; two unacceptable candidates are
    /// incomparable. Total over valid ids.
    pub fn prefers(
        &self,
        gender: Gender,
        person: PersonId,
        a: PersonId,
        b: PersonId,
    ) -> Preference {
        let ra = self.rank_raw(gender, person, a);
        let rb = self.rank_raw(gender, person, b);
        match (ra, rb) {
            (0, 0) => Preference::Incomparable,
            (_, 0) => Preference::StrictlyPrefersA,
            (0, _) => Preference::StrictlyPrefersB,
            (ra, rb) if ra < rb => Preference::StrictlyPrefersA,
            (ra, rb) if ra > rb => Preference::StrictlyPrefersB,
            _ => Preference::Indifferent,
        }
    }

    /// True iff `person` strictly prefers `candidate` to their current
    /// situation: any acceptable partner beats being single (rank +inf).
    #[inline]
    pub fn strictly_prefers_over(
        &self,
        gender: Gender,
        person: PersonId,
        candidate: PersonId,
        current: Option<PersonId>,
    ) -> bool {
        let rc = self.rank_raw(gender, person, candidate);
        if rc == 0 {
            return false;
        }
        match current {
            None => true,
            Some(cur) => {
                let rcur = self.rank_raw(gender, person, cur);
                debug_assert!(rcur != 0, "current partner must be acceptable");
                rc < rcur
            }
        }
    }

    /// The same market with the roles of men and women exchanged.
    pub fn swapped(&self) -> Instance {
        Instance {
            n: self.n,
            mode: self.mode,
            lists: [self.lists[1].clone(), self.lists[0].clone()],
            ranks: [self.ranks[1].clone(), self.ranks[0].clone()],
        }
    }

    /// Raw tie-group lists for all persons of one side (round-trip support).
    pub fn raw_lists(&self, gender: Gender) -> Vec<Vec<Vec<PersonId>>> {
        (1..=self.n).map(|p| self.tie_groups(gender, p)).collect()
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatchingError {
    #[error("person id {id} out of range 1..={n}")]
    InvalidId { id: PersonId, n: usize },
    #[error("{gender:?} {person} appears in more than one pair")]
    DuplicatePerson { gender: Gender, person: PersonId },
    #[error("man {man} and woman {woman} are matched but do not accept each other")]
    NotMutuallyAcceptable { man: PersonId, woman: PersonId },
    #[error("person left single in strict-complete mode")]
    SingleInStrictMode,
}

/// A partial one-to-one assignment between men and women.
///
/// The two directions are kept consistent at all times; in strict-complete
/// mode a validated matching has no singles.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Matching {
    wife_of: Vec<Option<PersonId>>,
    husband_of: Vec<Option<PersonId>>,
}

impl Matching {
    /// The empty matching (everyone single).
    pub fn empty(n: usize) -> Matching {
        Matching {
            wife_of: vec![None; n + 1],
            husband_of: vec![None; n + 1],
        }
    }

    /// Builds from a wife assignment `wives[m - 1]`, checking injectivity.
    pub fn from_wives(n: usize, wives: &[Option<PersonId>]) -> Result<Matching, MatchingError> {
        assert_eq!(wives.len(), n);
        let mut matching = Matching::empty(n);
        for (m, &w) in (1..=n).zip(wives.iter()) {
            if let Some(w) = w {
                if w < 1 || w > n {
                    return Err(MatchingError::InvalidId { id: w, n });
                }
                if matching.husband_of[w].is_some() {
                    return Err(MatchingError::DuplicatePerson {
                        gender: Gender::Women,
                        person: w,
                    });
                }
                matching.wife_of[m] = Some(w);
                matching.husband_of[w] = Some(m);
            }
        }
        Ok(matching)
    }

    /// Builds from explicit `(man, woman)` pairs.
    pub fn from_pairs(n: usize, pairs: &[(PersonId, PersonId)]) -> Result<Matching, MatchingError> {
        let mut matching = Matching::empty(n);
        for &(m, w) in pairs {
            for id in [m, w] {
                if id < 1 || id > n {
                    return Err(MatchingError::InvalidId { id, n });
                }
            }
            if matching.wife_of[m].is_some() {
                return Err(MatchingError::DuplicatePerson {
                    gender: Gender::Men,
                    person: m,
                });
            }
            if matching.husband_of[w].is_some() {
                return Err(MatchingError::DuplicatePerson {
                    gender: Gender::Women,
                    person: w,
                });
            }
            matching.wife_of[m] = Some(w);
            matching.husband_of[w] = Some(m);
        }
        Ok(matching)
    }

    pub fn n(&self) -> usize {
        self.wife_of.len() - 1
    }

    #[inline]
    pub fn wife_of(&self, man: PersonId) -> Option<PersonId> {
        self.wife_of[man]
    }

    #[inline]
    pub fn husband_of(&self, woman: PersonId) -> Option<PersonId> {
        self.husband_of[woman]
    }

    /// Partner of `person`, where `gender` is the side `person` belongs to.
    #[inline]
    pub fn partner(&self, gender: Gender, person: PersonId) -> Option<PersonId> {
        match gender {
            Gender::Men => self.wife_of[person],
            Gender::Women => self.husband_of[person],
        }
    }

    /// Number of matched men (equivalently, matched women).
    pub fn size(&self) -> usize {
        self.wife_of.iter().flatten().count()
    }

    /// Total number of single people, both sides.
    pub fn singles(&self) -> usize {
        2 * (self.n() - self.size())
    }

    pub fn is_perfect(&self) -> bool {
        self.size() == self.n()
    }

    /// Matched pairs in man-ascending order.
    pub fn pairs(&self) -> impl Iterator<Item = (PersonId, PersonId)> + '_ {
        self.wife_of
            .iter()
            .enumerate()
            .skip(1)
            .filter_map(|(m, w)| w.map(|w| (m, w)))
    }

    /// The same assignment with the roles of men and women exchanged.
    pub fn transposed(&self) -> Matching {
        Matching {
            wife_of: self.husband_of.clone(),
            husband_of: self.wife_of.clone(),
        }
    }

    /// Checks matching invariants against an instance: valid ids, mutual
    /// acceptance, and no singles in strict-complete mode.
    pub fn validate_for(&self, instance: &Instance) -> Result<(), MatchingError> {
        if self.n() != instance.n() {
            return Err(MatchingError::InvalidId {
                id: self.n(),
                n: instance.n(),
            });
        }
        for (m, w) in self.pairs() {
            if !instance.accepts(Gender::Men, m, w) || !instance.accepts(Gender::Women, w, m) {
                return Err(MatchingError::NotMutuallyAcceptable { man: m, woman: w });
            }
        }
        if instance.mode() == Mode::SmStrictComplete && !self.is_perfect() {
            return Err(MatchingError::SingleInStrictMode);
        }
        Ok(())
    }

    pub(crate) fn set_pair(&mut self, man: PersonId, woman: PersonId) {
        debug_assert!(self.wife_of[man].is_none() && self.husband_of[woman].is_none());
        self.wife_of[man] = Some(woman);
        self.husband_of[woman] = Some(man);
    }

    pub(crate) fn clear_man(&mut self, man: PersonId) -> Option<PersonId> {
        if let Some(w) = self.wife_of[man].take() {
            self.husband_of[w] = None;
            Some(w)
        } else {
            None
        }
    }

    pub(crate) fn clear_woman(&mut self, woman: PersonId) -> Option<PersonId> {
        if let Some(m) = self.husband_of[woman].take() {
            self.wife_of[m] = None;
            Some(m)
        } else {
            None
        }
    }
}

/// A man-woman pair violating stability with respect to some matching.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct BlockingPair {
    pub man: PersonId,
    pub woman: PersonId,
}

impl BlockingPair {
    pub fn new(man: PersonId, woman: PersonId) -> BlockingPair {
        BlockingPair { man, woman }
    }

    /// The person of side `gender` in this pair.
    #[inline]
    pub fn person(&self, gender: Gender) -> PersonId {
        match gender {
            Gender::Men => self.man,
            Gender::Women => self.woman,
        }
    }

    /// Builds a pair from (primary person, other person) relative to a side.
    #[inline]
    pub fn oriented(primary: Gender, person: PersonId, other: PersonId) -> BlockingPair {
        match primary {
            Gender::Men => BlockingPair {
                man: person,
                woman: other,
            },
            Gender::Women => BlockingPair {
                man: other,
                woman: person,
            },
        }
    }
}
