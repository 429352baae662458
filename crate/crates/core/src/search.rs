//! Local-search solvers: three neighborhood flavors for strict-complete
//! instances and the restart-based solver for ties-and-incomplete instances,
//! all driven by one parameterized loop.
//!
//! A step computes the variant's candidate blocking pairs under the current
//! primary gender, then either removes a uniformly random candidate (random
//! walk, probability `p_walk`) or removes one whose resulting marriage
//! minimizes the evaluation function, breaking ties uniformly at random. The
//! primary gender alternates every step so neither side is systematically
//! favored. A step that finds no candidates is the stability-detection step:
//! strict-complete variants stop there, the ties-and-incomplete variant
//! records the stable marriage and restarts from a fresh random matching
//! (the restart itself costs no step).
//!
//! Every random draw is made through the pinned [`Rng`] in a fixed order, so
//! a run is a pure function of `(instance, params)`. Candidate lists are
//! ordered from the primary side and initial matchings are generated from
//! the primary side, which makes a run on the gender-swapped instance with
//! the complemented initial gender consume the stream identically and
//! produce the label-swapped trajectory.

use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::model::{BlockingPair, Gender, Instance, Matching, Mode, PersonId};
use crate::rng::Rng;
use crate::stability::{self, Evaluation};

/// Which neighborhood the solver explores.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Variant {
    /// All blocking pairs (strict-complete).
    Sml,
    /// Undominated blocking pairs (strict-complete).
    Sml1,
    /// Undominated plus next-best pairs for stage-two casualties
    /// (strict-complete).
    Sml2,
    /// Undominated blocking pairs with random restarts at stability
    /// (ties-and-incomplete).
    Ltiu,
}

impl Variant {
    pub fn expected_mode(self) -> Mode {
        match self {
            Variant::Ltiu => Mode::Smti,
            _ => Mode::SmStrictComplete,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchParams {
    pub variant: Variant,
    /// Random-walk probability per step.
    pub p_walk: f64,
    pub max_steps: usize,
    pub seed: u64,
    pub wall_timeout: Option<Duration>,
    /// Fixed starting primary gender; drawn from the seed when `None`.
    pub initial_gender: Option<Gender>,
    /// Walk over the full blocking set rather than the variant's own
    /// candidate set (no effect on the full-neighborhood variant).
    pub walk_over_full: bool,
    /// Use the extended candidate set for the ties-and-incomplete variant.
    pub ltiu_extended: bool,
}

impl SearchParams {
    pub fn new(variant: Variant, seed: u64) -> SearchParams {
        SearchParams {
            variant,
            p_walk: 0.20,
            max_steps: 50_000,
            seed,
            wall_timeout: None,
            initial_gender: None,
            walk_over_full: false,
            ltiu_extended: false,
        }
    }

    pub fn validate_for(&self, instance: &Instance) -> Result<(), SearchError> {
        if !(0.0..=1.0).contains(&self.p_walk) {
            return Err(SearchError::BadParams("p_walk must lie in [0, 1]".into()));
        }
        if self.max_steps == 0 {
            return Err(SearchError::BadParams("max_steps must be positive".into()));
        }
        if self.variant.expected_mode() != instance.mode() {
            return Err(SearchError::VariantModeMismatch {
                variant: self.variant,
                mode: instance.mode(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SearchError {
    #[error("variant {variant:?} cannot run on a {mode:?} instance")]
    VariantModeMismatch { variant: Variant, mode: Mode },
    #[error("invalid search parameters: {0}")]
    BadParams(String),
}

/// State of the current matching after one step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TraceRecord {
    /// 1-based step index.
    pub step: usize,
    pub nbp: usize,
    pub ns: usize,
    pub f: usize,
    /// Step was a random walk.
    pub walked: bool,
    /// A restart happened at the end of this step.
    pub restarted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult {
    pub best: Matching,
    pub best_eval: Evaluation,
    pub steps_taken: usize,
    pub restarts: usize,
    pub found_stable: bool,
    pub found_perfect: bool,
    pub initial_gender: Gender,
    pub initial_eval: Evaluation,
    pub trace: Vec<TraceRecord>,
}

/// Outcome of a single step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Moved { walked: bool },
    /// No candidate blocking pairs: the current matching is stable.
    EmptyNeighborhood,
}

/// Random starting matching.
///
/// Strict-complete: a uniform random perfect matching, built by assigning
/// each person of `primary` (ascending) a partner from one Fisher-Yates
/// shuffle of the other side. Ties-and-incomplete: persons of `primary` in
/// shuffled order each marry a uniformly chosen free, mutually accepting
/// partner, or stay single when none remains.
pub fn random_matching(instance: &Instance, rng: &mut Rng, primary: Gender) -> Matching {
    let n = instance.n();
    let other = primary.opposite();
    let mut matching = Matching::empty(n);
    match instance.mode() {
        Mode::SmStrictComplete => {
            let mut partners: Vec<PersonId> = (1..=n).collect();
            rng.shuffle(&mut partners);
            for person in 1..=n {
                set_oriented(&mut matching, primary, person, partners[person - 1]);
            }
        }
        Mode::Smti => {
            let mut order: Vec<PersonId> = (1..=n).collect();
            rng.shuffle(&mut order);
            let mut pool = Vec::new();
            for &person in &order {
                pool.clear();
                pool.extend(
                    instance
                        .list(primary, person)
                        .iter()
                        .copied()
                        .filter(|&q| {
                            matching.partner(other, q).is_none()
                                && instance.accepts(other, q, person)
                        }),
                );
                if !pool.is_empty() {
                    let q = pool[rng.uniform(pool.len())];
                    set_oriented(&mut matching, primary, person, q);
                }
            }
        }
    }
    matching
}

fn set_oriented(matching: &mut Matching, primary: Gender, person: PersonId, partner: PersonId) {
    match primary {
        Gender::Men => matching.set_pair(person, partner),
        Gender::Women => matching.set_pair(partner, person),
    }
}

/// Accumulates per-person cover-count deltas during a candidate evaluation;
/// generation stamps avoid clearing between candidates.
struct TouchState {
    stamp: [Vec<u32>; 2],
    delta: [Vec<i32>; 2],
    touched: Vec<(Gender, PersonId)>,
    generation: u32,
}

impl TouchState {
    fn new(n: usize) -> TouchState {
        TouchState {
            stamp: [vec![0; n + 1], vec![0; n + 1]],
            delta: [vec![0; n + 1], vec![0; n + 1]],
            touched: Vec::new(),
            generation: 0,
        }
    }

    fn begin(&mut self) {
        self.generation += 1;
        self.touched.clear();
    }

    fn side(g: Gender) -> usize {
        match g {
            Gender::Men => 0,
            Gender::Women => 1,
        }
    }

    fn add(&mut self, g: Gender, p: PersonId, d: i32) {
        let s = Self::side(g);
        if self.stamp[s][p] != self.generation {
            self.stamp[s][p] = self.generation;
            self.delta[s][p] = 0;
            self.touched.push((g, p));
        }
        self.delta[s][p] += d;
    }

    fn get(&self, g: Gender, p: PersonId) -> i32 {
        let s = Self::side(g);
        if self.stamp[s][p] == self.generation {
            self.delta[s][p]
        } else {
            0
        }
    }
}

/// Enumerates blocking pairs involving any of `men` or `women`, counting
/// pairs with both endpoints listed exactly once.
fn for_each_blocking_involving(
    instance: &Instance,
    matching: &Matching,
    men: &[PersonId],
    women: &[PersonId],
    visit: &mut impl FnMut(PersonId, PersonId),
) {
    for &m in men {
        let cutoff = matching
            .wife_of(m)
            .map_or(u32::MAX, |w| instance.rank_raw(Gender::Men, m, w));
        for &w in instance.list(Gender::Men, m) {
            if instance.rank_raw(Gender::Men, m, w) >= cutoff {
                break;
            }
            if instance.strictly_prefers_over(Gender::Women, w, m, matching.husband_of(w)) {
                visit(m, w);
            }
        }
    }
    for &w in women {
        let cutoff = matching
            .husband_of(w)
            .map_or(u32::MAX, |m| instance.rank_raw(Gender::Women, w, m));
        for &m in instance.list(Gender::Women, w) {
            if instance.rank_raw(Gender::Women, w, m) >= cutoff {
                break;
            }
            if men.contains(&m) {
                continue;
            }
            if instance.strictly_prefers_over(Gender::Men, m, w, matching.wife_of(m)) {
                visit(m, w);
            }
        }
    }
}

/// A search run in progress. [`run_search`] drives it; it is public so the
/// loop can also be stepped manually.
pub struct SearchState<'a> {
    instance: &'a Instance,
    params: &'a SearchParams,
    rng: Rng,
    current: Matching,
    primary: Gender,
    initial_gender: Gender,
    nbp: usize,
    ns: usize,
    /// Number of blocking pairs each person is in (ties-and-incomplete only).
    cover: [Vec<u32>; 2],
    touch: TouchState,
    candidates: Vec<BlockingPair>,
    tie_breaks: Vec<usize>,
}

impl<'a> SearchState<'a> {
    pub fn new(
        instance: &'a Instance,
        params: &'a SearchParams,
    ) -> Result<SearchState<'a>, SearchError> {
        params.validate_for(instance)?;
        let mut rng = Rng::seed_from_u64(params.seed);
        let initial_gender = params.initial_gender.unwrap_or_else(|| {
            if rng.next_u64() & 1 == 0 {
                Gender::Men
            } else {
                Gender::Women
            }
        });
        let current = random_matching(instance, &mut rng, initial_gender);
        Ok(Self::assemble(instance, params, rng, current, initial_gender))
    }

    /// Starts from a given matching instead of a random one.
    pub fn with_start(
        instance: &'a Instance,
        params: &'a SearchParams,
        start: Matching,
    ) -> Result<SearchState<'a>, SearchError> {
        params.validate_for(instance)?;
        start
            .validate_for(instance)
            .map_err(|e| SearchError::BadParams(format!("bad starting matching: {e}")))?;
        let mut rng = Rng::seed_from_u64(params.seed);
        let initial_gender = params.initial_gender.unwrap_or_else(|| {
            if rng.next_u64() & 1 == 0 {
                Gender::Men
            } else {
                Gender::Women
            }
        });
        Ok(Self::assemble(instance, params, rng, start, initial_gender))
    }

    fn assemble(
        instance: &'a Instance,
        params: &'a SearchParams,
        rng: Rng,
        current: Matching,
        initial_gender: Gender,
    ) -> SearchState<'a> {
        let n = instance.n();
        let mut state = SearchState {
            instance,
            params,
            rng,
            current,
            primary: initial_gender,
            initial_gender,
            nbp: 0,
            ns: 0,
            cover: [vec![0; n + 1], vec![0; n + 1]],
            touch: TouchState::new(n),
            candidates: Vec::new(),
            tie_breaks: Vec::new(),
        };
        state.rebuild_eval();
        state
    }

    pub fn current(&self) -> &Matching {
        &self.current
    }

    pub fn evaluation(&self) -> Evaluation {
        Evaluation {
            nbp: self.nbp,
            ns: self.ns,
        }
    }

    pub fn primary_gender(&self) -> Gender {
        self.primary
    }

    pub fn initial_gender(&self) -> Gender {
        self.initial_gender
    }

    fn smti(&self) -> bool {
        self.instance.mode() == Mode::Smti
    }

    /// Full recomputation of blocking count, covers, and uncovered singles.
    fn rebuild_eval(&mut self) {
        let inst = self.instance;
        let n = inst.n();
        self.nbp = 0;
        let smti = self.smti();
        if smti {
            self.cover[0].iter_mut().for_each(|c| *c = 0);
            self.cover[1].iter_mut().for_each(|c| *c = 0);
        }
        for m in 1..=n {
            let cutoff = self
                .current
                .wife_of(m)
                .map_or(u32::MAX, |w| inst.rank_raw(Gender::Men, m, w));
            for &w in inst.list(Gender::Men, m) {
                if inst.rank_raw(Gender::Men, m, w) >= cutoff {
                    break;
                }
                if inst.strictly_prefers_over(Gender::Women, w, m, self.current.husband_of(w)) {
                    self.nbp += 1;
                    if smti {
                        self.cover[0][m] += 1;
                        self.cover[1][w] += 1;
                    }
                }
            }
        }
        self.ns = 0;
        if smti {
            for (side, gender) in [(0, Gender::Men), (1, Gender::Women)] {
                for p in 1..=n {
                    if self.current.partner(gender, p).is_none() && self.cover[side][p] == 0 {
                        self.ns += 1;
                    }
                }
            }
        }
    }

    /// Effect of removing `pair` on `(nbp, ns)`. With `commit` the move and
    /// the bookkeeping stick; otherwise the matching is restored.
    fn removal_effect(&mut self, pair: BlockingPair, commit: bool) -> (i64, i64) {
        let inst = self.instance;
        let smti = self.smti();
        let ex_wife = self.current.wife_of(pair.man);
        let ex_husband = self.current.husband_of(pair.woman);

        let mut men = [pair.man, 0];
        let mut men_len = 1;
        if let Some(mp) = ex_husband {
            men[1] = mp;
            men_len = 2;
        }
        let mut women = [pair.woman, 0];
        let mut women_len = 1;
        if let Some(wp) = ex_wife {
            women[1] = wp;
            women_len = 2;
        }
        let men = &men[..men_len];
        let women = &women[..women_len];

        self.touch.begin();
        let mut d_nbp: i64 = 0;
        {
            let touch = &mut self.touch;
            for_each_blocking_involving(inst, &self.current, men, women, &mut |m, w| {
                d_nbp -= 1;
                if smti {
                    touch.add(Gender::Men, m, -1);
                    touch.add(Gender::Women, w, -1);
                }
            });
        }

        stability::apply_removal(inst, &mut self.current, pair);

        {
            let touch = &mut self.touch;
            for_each_blocking_involving(inst, &self.current, men, women, &mut |m, w| {
                d_nbp += 1;
                if smti {
                    touch.add(Gender::Men, m, 1);
                    touch.add(Gender::Women, w, 1);
                }
            });
        }

        let mut d_ns: i64 = 0;
        if smti {
            // Persons whose single status changes must be accounted even if
            // no blocking pair of theirs did.
            self.touch.add(Gender::Men, pair.man, 0);
            self.touch.add(Gender::Women, pair.woman, 0);
            if let Some(mp) = ex_husband {
                self.touch.add(Gender::Men, mp, 0);
            }
            if let Some(wp) = ex_wife {
                self.touch.add(Gender::Women, wp, 0);
            }
            for i in 0..self.touch.touched.len() {
                let (g, p) = self.touch.touched[i];
                let single_after = self.current.partner(g, p).is_none();
                let single_before = match (g, p) {
                    (Gender::Men, p) if p == pair.man => ex_wife.is_none(),
                    (Gender::Women, p) if p == pair.woman => ex_husband.is_none(),
                    (Gender::Men, p) if Some(p) == ex_husband => false,
                    (Gender::Women, p) if Some(p) == ex_wife => false,
                    _ => single_after,
                };
                let side = TouchState::side(g);
                let cover_before = self.cover[side][p] as i64;
                let cover_after = cover_before + self.touch.get(g, p) as i64;
                debug_assert!(cover_after >= 0);
                d_ns += i64::from(single_after && cover_after == 0)
                    - i64::from(single_before && cover_before == 0);
            }
        }

        if commit {
            self.nbp = (self.nbp as i64 + d_nbp) as usize;
            self.ns = (self.ns as i64 + d_ns) as usize;
            if smti {
                for i in 0..self.touch.touched.len() {
                    let (g, p) = self.touch.touched[i];
                    let side = TouchState::side(g);
                    let d = self.touch.get(g, p);
                    self.cover[side][p] = (self.cover[side][p] as i64 + d as i64) as u32;
                }
            }
        } else {
            // Undo: break the new pair (and the strict-mode ex-swap), then
            // restore the previous couples.
            self.current.clear_man(pair.man);
            if inst.mode() == Mode::SmStrictComplete {
                self.current.clear_man(ex_husband.unwrap());
            }
            if let Some(wp) = ex_wife {
                self.current.set_pair(pair.man, wp);
            }
            if let Some(mp) = ex_husband {
                self.current.set_pair(mp, pair.woman);
            }
        }
        (d_nbp, d_ns)
    }

    fn compute_candidates(&mut self) {
        let inst = self.instance;
        self.candidates = match self.params.variant {
            Variant::Sml => stability::oriented_full(inst, &self.current, self.primary),
            Variant::Sml1 => stability::candidates_undominated(inst, &self.current, self.primary),
            Variant::Sml2 => stability::candidates_extended(inst, &self.current, self.primary),
            Variant::Ltiu => {
                if self.params.ltiu_extended {
                    stability::candidates_extended(inst, &self.current, self.primary)
                } else {
                    stability::candidates_undominated(inst, &self.current, self.primary)
                }
            }
        };
    }

    /// One search step; flips the primary gender before returning.
    pub fn step(&mut self) -> StepOutcome {
        self.compute_candidates();
        if self.candidates.is_empty() {
            debug_assert_eq!(self.nbp, 0, "empty candidate set implies stability");
            self.primary = self.primary.opposite();
            return StepOutcome::EmptyNeighborhood;
        }

        let walked = self.rng.coin(self.params.p_walk);
        let chosen = if walked {
            if self.params.walk_over_full && self.params.variant != Variant::Sml {
                self.candidates =
                    stability::oriented_full(self.instance, &self.current, self.primary);
            }
            self.candidates[self.rng.uniform(self.candidates.len())]
        } else {
            // Greedy: evaluate every candidate's resulting marriage, move to
            // one minimizing f, ties broken uniformly.
            let mut best_f = i64::MAX;
            self.tie_breaks.clear();
            for i in 0..self.candidates.len() {
                let pair = self.candidates[i];
                let (d_nbp, d_ns) = self.removal_effect(pair, false);
                let f = self.nbp as i64 + d_nbp + self.ns as i64 + d_ns;
                if f < best_f {
                    best_f = f;
                    self.tie_breaks.clear();
                    self.tie_breaks.push(i);
                } else if f == best_f {
                    self.tie_breaks.push(i);
                }
            }
            let pick = if self.tie_breaks.len() > 1 {
                self.tie_breaks[self.rng.uniform(self.tie_breaks.len())]
            } else {
                self.tie_breaks[0]
            };
            self.candidates[pick]
        };

        self.removal_effect(chosen, true);
        self.primary = self.primary.opposite();
        StepOutcome::Moved { walked }
    }

    /// Replaces the current matching with a fresh random one (restart at
    /// stability); generated from the side whose turn is next.
    pub fn restart(&mut self) {
        self.current = random_matching(self.instance, &mut self.rng, self.primary);
        self.rebuild_eval();
    }
}

/// Tracks the best marriage found: any stable marriage beats every unstable
/// one; stable marriages compare by fewer singles, unstable ones by smaller
/// f. Ties keep the earlier find.
struct BestTracker {
    matching: Matching,
    eval: Evaluation,
    stable: bool,
}

impl BestTracker {
    fn new(matching: &Matching, eval: Evaluation) -> BestTracker {
        BestTracker {
            matching: matching.clone(),
            eval,
            stable: eval.is_stable(),
        }
    }

    fn offer(&mut self, matching: &Matching, eval: Evaluation) {
        let stable = eval.is_stable();
        let better = match (self.stable, stable) {
            (false, true) => true,
            (true, false) => false,
            (true, true) => eval.ns < self.eval.ns,
            (false, false) => eval.f() < self.eval.f(),
        };
        if better {
            self.matching = matching.clone();
            self.eval = eval;
            self.stable = stable;
        }
    }
}

/// Runs the configured solver to completion: stability (strict-complete),
/// a perfect stable marriage (ties-and-incomplete), the step limit, or the
/// wall timeout, whichever comes first. Limits produce a result, never an
/// error.
pub fn run_search(instance: &Instance, params: &SearchParams) -> Result<SearchResult, SearchError> {
    let state = SearchState::new(instance, params)?;
    run_from(state)
}

/// [`run_search`] from a caller-chosen starting matching.
pub fn run_search_from(
    instance: &Instance,
    params: &SearchParams,
    start: Matching,
) -> Result<SearchResult, SearchError> {
    let state = SearchState::with_start(instance, params, start)?;
    run_from(state)
}

fn run_from(mut state: SearchState<'_>) -> Result<SearchResult, SearchError> {
    let params = state.params;
    let smti = state.smti();
    let deadline = params.wall_timeout.map(|d| Instant::now() + d);

    let initial_eval = state.evaluation();
    let initial_gender = state.initial_gender();
    let mut best = BestTracker::new(state.current(), initial_eval);
    let mut trace: Vec<TraceRecord> = Vec::new();
    let mut restarts = 0;
    let mut found_stable = false;
    let mut found_perfect = false;

    while trace.len() < params.max_steps {
        if let Some(deadline) = deadline {
            if Instant::now() >= deadline {
                break;
            }
        }
        let outcome = state.step();
        let eval = state.evaluation();
        let step = trace.len() + 1;
        let walked = matches!(outcome, StepOutcome::Moved { walked: true });
        best.offer(state.current(), eval);

        let mut record = TraceRecord {
            step,
            nbp: eval.nbp,
            ns: eval.ns,
            f: eval.f(),
            walked,
            restarted: false,
        };

        if eval.is_stable() {
            found_stable = true;
            if !smti {
                trace.push(record);
                break;
            }
            if state.current().is_perfect() {
                found_perfect = true;
                trace.push(record);
                break;
            }
            record.restarted = true;
            trace.push(record);
            restarts += 1;
            state.restart();
        } else {
            trace.push(record);
        }
    }

    if !smti {
        found_perfect = found_stable;
    }
    Ok(SearchResult {
        best: best.matching,
        best_eval: best.eval,
        steps_taken: trace.len(),
        restarts,
        found_stable,
        found_perfect,
        initial_gender,
        initial_eval,
        trace,
    })
}
