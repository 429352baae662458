//! Random instance generators and the instance text format.
//!
//! Both generators consume the pinned [`Rng`](crate::rng::Rng) stream in a
//! fixed, documented order so instances are reproducible from `(params)`
//! alone, including by reimplementations in other languages:
//!
//! 1. Full lists: a Fisher-Yates shuffle of `[1..n]` per person, men `1..n`
//!    first, then women `1..n`.
//! 2. (ties-and-incomplete only) Deletion coins: men `1..n`, for each man one
//!    coin per list position left to right over his full list; a hit deletes
//!    the woman from his list and him from hers.
//! 3. If anyone's list is now empty the attempt is discarded; the stream
//!    continues (no reseed) with the next attempt's step 1.
//! 4. Tie coins: men `1..n` then women `1..n`, one coin per surviving list
//!    position from the second onward, left to right; a hit copies the
//!    current rank of the previous entry onto this one.
#![allow(clippy::needless_range_loop)]

use thiserror::Error;

use crate::model::{BuildError, Gender, Instance, Mode, PersonId};
use crate::rng::Rng;

/// Parameters for the ties-and-incomplete generator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenParams {
    pub n: usize,
    /// Probability of deleting each list entry.
    pub p1: f64,
    /// Probability of tying each entry to its predecessor.
    pub p2: f64,
    pub seed: u64,
    /// Attempts allowed before giving up when lists keep coming out empty.
    pub max_retries: usize,
}

impl GenParams {
    pub fn new(n: usize, p1: f64, p2: f64, seed: u64) -> Result<GenParams, GenError> {
        let params = GenParams {
            n,
            p1,
            p2,
            seed,
            max_retries: 1000,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.n == 0 {
            return Err(GenError::BadParams("n must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.p1) {
            // p1 = 1 would guarantee empty lists and retry forever.
            return Err(GenError::BadParams("p1 must lie in [0, 1)".into()));
        }
        if !(0.0..=1.0).contains(&self.p2) {
            return Err(GenError::BadParams("p2 must lie in [0, 1]".into()));
        }
        if self.max_retries == 0 {
            return Err(GenError::BadParams("max_retries must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("invalid generator parameters: {0}")]
    BadParams(String),
    #[error("gave up after {attempts} attempts: empty preference list every time (p1 too high for n)")]
    RetriesExhausted { attempts: usize },
}

/// Strict-complete instance under the impartial culture model: every list is
/// an independent uniform permutation.
pub fn gen_sm_ic(n: usize, seed: u64) -> Instance {
    assert!(n >= 1);
    let mut rng = Rng::seed_from_u64(seed);
    let men = random_full_lists(n, &mut rng);
    let women = random_full_lists(n, &mut rng);
    Instance::from_strict_lists(n, &men, &women, Mode::SmStrictComplete)
        .expect("uniform permutations form a valid strict instance")
}

/// Ties-and-incomplete instance; see the module docs for the exact draw
/// order.
pub fn gen_smti(params: &GenParams) -> Result<Instance, GenError> {
    params.validate()?;
    let n = params.n;
    let mut rng = Rng::seed_from_u64(params.seed);

    for _ in 0..params.max_retries {
        let men_full = random_full_lists(n, &mut rng);
        let women_full = random_full_lists(n, &mut rng);

        // Step 2: symmetric deletions driven by the men's lists.
        let mut deleted = vec![vec![false; n + 1]; n + 1]; // deleted[m][w]
        for m in 1..=n {
            for &w in &men_full[m - 1] {
                if rng.coin(params.p1) {
                    deleted[m][w] = true;
                }
            }
        }

        let surviving = |gender: Gender, full: &[Vec<PersonId>]| -> Vec<Vec<PersonId>> {
            (1..=n)
                .map(|p| {
                    full[p - 1]
                        .iter()
                        .copied()
                        .filter(|&q| match gender {
                            Gender::Men => !deleted[p][q],
                            Gender::Women => !deleted[q][p],
                        })
                        .collect()
                })
                .collect()
        };
        let men_lists = surviving(Gender::Men, &men_full);
        let women_lists = surviving(Gender::Women, &women_full);

        // Step 3: discard the attempt if anyone ended up with nothing.
        if men_lists.iter().chain(women_lists.iter()).any(Vec::is_empty) {
            continue;
        }

        // Step 4: tie pass over every person's surviving list.
        let tie_pass = |lists: Vec<Vec<PersonId>>, rng: &mut Rng| -> Vec<Vec<Vec<PersonId>>> {
            lists
                .into_iter()
                .map(|list| {
                    let mut ranks: Vec<u32> = (1..=list.len() as u32).collect();
                    for j in 1..list.len() {
                        if rng.coin(params.p2) {
                            ranks[j] = ranks[j - 1];
                        }
                    }
                    group_by_rank(&list, &ranks)
                })
                .collect()
        };
        let men_groups = tie_pass(men_lists, &mut rng);
        let women_groups = tie_pass(women_lists, &mut rng);

        let instance = Instance::build(n, &men_groups, &women_groups, Mode::Smti)
            .expect("generator output satisfies instance invariants");
        return Ok(instance);
    }
    Err(GenError::RetriesExhausted {
        attempts: params.max_retries,
    })
}

fn random_full_lists(n: usize, rng: &mut Rng) -> Vec<Vec<PersonId>> {
    (0..n)
        .map(|_| {
            let mut list: Vec<PersonId> = (1..=n).collect();
            rng.shuffle(&mut list);
            list
        })
        .collect()
}

fn group_by_rank(list: &[PersonId], ranks: &[u32]) -> Vec<Vec<PersonId>> {
    let mut groups: Vec<Vec<PersonId>> = Vec::new();
    let mut last = 0;
    for (&id, &r) in list.iter().zip(ranks) {
        if !groups.is_empty() && r == last {
            groups.last_mut().unwrap().push(id);
        } else {
            groups.push(vec![id]);
        }
        last = r;
    }
    groups
}

#[derive(Debug, Error, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error(transparent)]
    Build(#[from] BuildError),
}

fn syntax(line: usize, reason: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        reason: reason.into(),
    }
}

/// Parses the instance text format:
///
/// ```text
/// SMTI 3
/// 1: 3 (1 2)
/// 2: 2
/// 3: 1 2 3
/// 1: 3
/// 2: (1 2) 3
/// 3: 1 3
/// ```
///
/// Header `SM n` or `SMTI n`; then the `n` men's lists and the `n` women's
/// lists, `i: e1 e2 ...` with parenthesized tie groups. Missing entries are
/// unacceptable. Lines starting with `#` and blank lines are ignored.
pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_no, header) = lines
        .next()
        .ok_or_else(|| syntax(0, "empty input"))?;
    let mut parts = header.split_whitespace();
    let mode = match parts.next() {
        Some("SM") => Mode::SmStrictComplete,
        Some("SMTI") => Mode::Smti,
        other => {
            return Err(syntax(
                header_no,
                format!("expected header 'SM n' or 'SMTI n', got {other:?}"),
            ))
        }
    };
    let n: usize = parts
        .next()
        .and_then(|t| t.parse().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| syntax(header_no, "header needs a positive size"))?;
    if parts.next().is_some() {
        return Err(syntax(header_no, "trailing tokens after header"));
    }

    let mut read_side = |side: &str| -> Result<Vec<Vec<Vec<PersonId>>>, ParseError> {
        (1..=n)
            .map(|expect| {
                let (no, line) = lines
                    .next()
                    .ok_or_else(|| syntax(0, format!("missing list for {side} {expect}")))?;
                parse_list_line(no, line, expect)
            })
            .collect()
    };
    let men = read_side("man")?;
    let women = read_side("woman")?;
    if let Some((no, _)) = lines.next() {
        return Err(syntax(no, "unexpected content after the women's lists"));
    }

    Ok(Instance::build(n, &men, &women, mode)?)
}

fn parse_list_line(
    line_no: usize,
    line: &str,
    expect: PersonId,
) -> Result<Vec<Vec<PersonId>>, ParseError> {
    let (label, rest) = line
        .split_once(':')
        .ok_or_else(|| syntax(line_no, "expected 'i: entries'"))?;
    let label: PersonId = label
        .trim()
        .parse()
        .map_err(|_| syntax(line_no, "list label is not a number"))?;
    if label != expect {
        return Err(syntax(line_no, format!("expected list {expect}, got {label}")));
    }

    let mut groups: Vec<Vec<PersonId>> = Vec::new();
    let mut open: Option<Vec<PersonId>> = None;
    for token in rest.split_whitespace() {
        let mut token = token;
        if let Some(stripped) = token.strip_prefix('(') {
            if open.is_some() {
                return Err(syntax(line_no, "nested tie group"));
            }
            open = Some(Vec::new());
            token = stripped;
        }
        let closes = token.ends_with(')');
        let token = token.trim_end_matches(')');
        if token.contains('(') || token.contains(')') {
            return Err(syntax(line_no, "malformed tie group"));
        }
        if !token.is_empty() {
            let id: PersonId = token
                .parse()
                .map_err(|_| syntax(line_no, format!("bad entry '{token}'")))?;
            match &mut open {
                Some(group) => group.push(id),
                None => groups.push(vec![id]),
            }
        }
        if closes {
            match open.take() {
                Some(group) if !group.is_empty() => groups.push(group),
                _ => return Err(syntax(line_no, "empty or stray ')'")),
            }
        }
    }
    if open.is_some() {
        return Err(syntax(line_no, "unclosed tie group"));
    }
    Ok(groups)
}

/// Canonical text form; `parse_instance` of the output reproduces the
/// instance exactly.
pub fn serialize_instance(instance: &Instance) -> String {
    let n = instance.n();
    let mut out = String::new();
    out.push_str(match instance.mode() {
        Mode::SmStrictComplete => "SM",
        Mode::Smti => "SMTI",
    });
    out.push_str(&format!(" {n}\n"));
    for gender in [Gender::Men, Gender::Women] {
        for person in 1..=n {
            out.push_str(&format!("{person}:"));
            for group in instance.tie_groups(gender, person) {
                if group.len() == 1 {
                    out.push_str(&format!(" {}", group[0]));
                } else {
                    out.push_str(" (");
                    let inner: Vec<String> = group.iter().map(|id| id.to_string()).collect();
                    out.push_str(&inner.join(" "));
                    out.push(')');
                }
            }
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::Gender;

    #[test]
    fn unique_smallest_instance() {
        for seed in [0, 1, 42] {
            let inst = gen_sm_ic(1, seed);
            assert_eq!(inst.list(Gender::Men, 1), &[1]);
            assert_eq!(inst.list(Gender::Women, 1), &[1]);
        }
    }

    // Independent transcript of the documented stream: xoshiro256** written
    // from its published equations, consumed in the documented order.
    mod reference_rng {
        pub struct Ref {
            s: [u64; 4],
        }
        impl Ref {
            pub fn new(seed: u64) -> Ref {
                let mut x = seed;
                let mut next = || {
                    x = x.wrapping_add(0x9E3779B97F4A7C15);
                    let mut z = x;
                    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
                    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
                    z ^ (z >> 31)
                };
                Ref {
                    s: [next(), next(), next(), next()],
                }
            }
            pub fn next_u64(&mut self) -> u64 {
                let rotl = |x: u64, k: u32| (x << k) | (x >> (64 - k));
                let out = rotl(self.s[1].wrapping_mul(5), 7).wrapping_mul(9);
                let t = self.s[1] << 17;
                self.s[2] ^= self.s[0];
                self.s[3] ^= self.s[1];
                self.s[1] ^= self.s[2];
                self.s[0] ^= self.s[3];
                self.s[2] ^= t;
                self.s[3] = rotl(self.s[3], 45);
                out
            }
            pub fn uniform(&mut self, bound: u64) -> u64 {
                let zone = (u64::MAX / bound) * bound;
                loop {
                    let x = self.next_u64();
                    if x < zone {
                        return x % bound;
                    }
                }
            }
            pub fn shuffled(&mut self, n: usize) -> Vec<usize> {
                let mut v: Vec<usize> = (1..=n).collect();
                for i in (1..n).rev() {
                    let j = self.uniform(i as u64 + 1) as usize;
                    v.swap(i, j);
                }
                v
            }
        }
    }

    #[test]
    fn matches_reference_transcript() {
        let seed = 0xD1CE_u64;
        let n = 3;
        let mut reference = reference_rng::Ref::new(seed);
        let expect_men: Vec<Vec<usize>> = (0..n).map(|_| reference.shuffled(n)).collect();
        let expect_women: Vec<Vec<usize>> = (0..n).map(|_| reference.shuffled(n)).collect();

        // Strict lists keep their generated order through normalization:
        // each rank holds exactly one entry.
        let inst = gen_sm_ic(n, seed);
        for m in 1..=n {
            assert_eq!(inst.list(Gender::Men, m), &expect_men[m - 1], "man {m}");
        }
        for w in 1..=n {
            assert_eq!(inst.list(Gender::Women, w), &expect_women[w - 1], "woman {w}");
        }
    }

    #[test]
    fn triple_order_marginal_is_uniform() {
        // In a uniform permutation of 8 entries, the relative order of women
        // {1,2,3} in man 1's list is uniform over the 6 orders. Chi-squared
        // against that with 10_000 samples; threshold is the 99.9% quantile
        // of chi2(5) plus slack, far beyond 3 sigma per cell.
        let samples = 10_000usize;
        let mut counts = std::collections::HashMap::new();
        for seed in 0..samples as u64 {
            let inst = gen_sm_ic(8, 777_000 + seed);
            let list = inst.list(Gender::Men, 1);
            let order: Vec<PersonId> = list.iter().copied().filter(|&w| w <= 3).collect();
            *counts.entry(order).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = samples as f64 / 6.0;
        let chi2: f64 = counts
            .values()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 25.0, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn smti_degenerates_without_deletions_or_ties() {
        let params = GenParams::new(6, 0.0, 0.0, 9).unwrap();
        let inst = gen_smti(&params).unwrap();
        assert_eq!(inst.mode(), Mode::Smti);
        for g in [Gender::Men, Gender::Women] {
            for p in 1..=6 {
                assert_eq!(inst.list(g, p).len(), 6);
                assert!(inst.tie_groups(g, p).iter().all(|grp| grp.len() == 1));
            }
        }
    }

    #[test]
    fn smti_full_indifference() {
        let params = GenParams::new(5, 0.0, 1.0, 11).unwrap();
        let inst = gen_smti(&params).unwrap();
        for g in [Gender::Men, Gender::Women] {
            for p in 1..=5 {
                let groups = inst.tie_groups(g, p);
                assert_eq!(groups.len(), 1, "one big tie");
                assert_eq!(groups[0].len(), 5);
            }
        }
    }

    #[test]
    fn smti_mean_list_length_tracks_p1() {
        let mut total = 0usize;
        let mut lists = 0usize;
        for seed in 0..100 {
            let params = GenParams::new(100, 0.5, 0.5, 31_000 + seed).unwrap();
            let inst = gen_smti(&params).unwrap();
            for p in 1..=100 {
                total += inst.list(Gender::Men, p).len();
                lists += 1;
            }
        }
        let mean = total as f64 / lists as f64;
        assert!((mean - 50.0).abs() < 3.0, "mean list length {mean}");
    }

    #[test]
    fn retries_exhausted_when_p1_near_one() {
        let mut params = GenParams::new(3, 0.99, 0.0, 5).unwrap();
        params.max_retries = 20;
        let err = gen_smti(&params).unwrap_err();
        assert_eq!(err, GenError::RetriesExhausted { attempts: 20 });
    }

    #[test]
    fn generation_is_deterministic() {
        let params = GenParams::new(40, 0.4, 0.3, 123).unwrap();
        assert_eq!(gen_smti(&params).unwrap(), gen_smti(&params).unwrap());
        assert_eq!(gen_sm_ic(40, 9), gen_sm_ic(40, 9));
    }

    #[test]
    fn no_ties_when_p2_zero_full_lists_when_p1_zero() {
        for seed in 0..20 {
            let params = GenParams::new(12, 0.6, 0.0, seed).unwrap();
            let inst = gen_smti(&params).unwrap();
            for g in [Gender::Men, Gender::Women] {
                for p in 1..=12 {
                    assert!(inst.tie_groups(g, p).iter().all(|grp| grp.len() == 1));
                }
            }
            let params = GenParams::new(12, 0.0, 0.7, seed).unwrap();
            let inst = gen_smti(&params).unwrap();
            for g in [Gender::Men, Gender::Women] {
                for p in 1..=12 {
                    assert_eq!(inst.list(g, p).len(), 12);
                }
            }
        }
    }

    #[test]
    fn table1_serialization() {
        let inst = fixtures::table1();
        let text = serialize_instance(&inst);
        assert!(text.starts_with("SM 8\n1: 5 7 1 2 6 8 4 3\n"));
        let parsed = parse_instance(&text).unwrap();
        assert_eq!(parsed, inst);
    }

    #[test]
    fn tie_groups_render_in_parens() {
        let inst = Instance::build(
            2,
            &[vec![vec![2], vec![1]], vec![vec![1, 2]]],
            &[vec![vec![1], vec![2]], vec![vec![1], vec![2]]],
            Mode::Smti,
        )
        .unwrap();
        let text = serialize_instance(&inst);
        assert!(text.contains("2: (1 2)\n"));
        assert_eq!(parse_instance(&text).unwrap(), inst);
    }

    #[test]
    fn parse_rejects_malformed_input() {
        let bad = "SMTI 2\n1: 2 (1\n2: 1 2\n1: 1 2\n2: 1 2\n";
        match parse_instance(bad) {
            Err(ParseError::Syntax { line, reason }) => {
                assert_eq!(line, 2);
                assert!(reason.contains("unclosed"));
            }
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(parse_instance("").is_err());
        assert!(parse_instance("SM x\n").is_err());
        assert!(parse_instance("SM 1\n2: 1\n1: 1\n").is_err());
    }

    #[test]
    fn round_trip_random_instances() {
        for seed in 0..1000 {
            let inst = if seed % 2 == 0 {
                gen_sm_ic(6, seed)
            } else {
                gen_smti(&GenParams::new(6, 0.4, 0.4, seed).unwrap()).unwrap()
            };
            let text = serialize_instance(&inst);
            assert_eq!(parse_instance(&text).unwrap(), inst, "seed {seed}");
        }
    }

    #[test]
    fn comments_and_blanks_ignored() {
        let text = "# a comment\n\nSM 1\n# men\n1: 1\n\n1: 1\n";
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.n(), 1);
    }
}
