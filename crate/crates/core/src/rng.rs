//! Pinned pseudo-random generator used by every randomized component.
//!
//! Instances, matchings and search runs must be reproducible bit-for-bit
//! across runs, platforms and reimplementations in other languages, so the
//! generator is fixed here by its update equations rather than delegated to
//! a library whose stream may change between versions.
//!
//! The generator is xoshiro256** (Blackman/Vigna). State is four 64-bit
//! words `s[0..4]`; one step produces
//!
//! ```text
//! result = rotl(s[1] * 5, 7) * 9
//! t      = s[1] << 17
//! s[2] ^= s[0];  s[3] ^= s[1];  s[1] ^= s[2];  s[0] ^= s[3]
//! s[2] ^= t
//! s[3]  = rotl(s[3], 45)
//! ```
//!
//! with all arithmetic modulo 2^64. Seeding expands a single `u64` through
//! four steps of SplitMix64:
//!
//! ```text
//! z  = (x += 0x9E3779B97F4A7C15)
//! z  = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z  = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! return z ^ (z >> 31)
//! ```
//!
//! Derived draws are likewise fixed:
//! * `next_f64` takes the top 53 bits: `(next_u64() >> 11) * 2^-53`.
//! * `coin(p)` is `next_f64() < p`.
//! * `uniform(bound)` rejects values above the largest multiple of `bound`
//!   (`zone = (u64::MAX / bound) * bound`), then reduces modulo `bound`.
//! * `shuffle` is a Fisher-Yates pass from the last index down:
//!   `for i in (1..len).rev() { swap(a[i], a[uniform(i + 1)]) }`.

/// SplitMix64 step; used for seeding and for deriving per-item seeds.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// xoshiro256** generator; see the module docs for the exact equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = seed;
        let s = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        Rng { s }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Bernoulli draw: true with probability `p`.
    pub fn coin(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Unbiased uniform integer in `[0, bound)`. `bound` must be nonzero.
    pub fn uniform(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        let b = bound as u64;
        let zone = (u64::MAX / b) * b;
        loop {
            let x = self.next_u64();
            if x < zone {
                return (x % b) as usize;
            }
        }
    }

    /// In-place Fisher-Yates shuffle with the pinned draw order.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.uniform(i + 1);
            items.swap(i, j);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_stream() {
        let mut a = Rng::seed_from_u64(42);
        let mut b = Rng::seed_from_u64(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let mut c = Rng::seed_from_u64(43);
        assert_ne!(a.next_u64(), c.next_u64());
    }

    #[test]
    fn uniform_stays_in_bounds() {
        let mut rng = Rng::seed_from_u64(7);
        for bound in [1usize, 2, 3, 10, 1000] {
            for _ in 0..200 {
                assert!(rng.uniform(bound) < bound);
            }
        }
    }

    #[test]
    fn f64_in_unit_interval() {
        let mut rng = Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let x = rng.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }

    #[test]
    fn shuffle_is_a_permutation() {
        let mut rng = Rng::seed_from_u64(3);
        let mut v: Vec<usize> = (0..20).collect();
        rng.shuffle(&mut v);
        let mut sorted = v.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..20).collect::<Vec<_>>());
    }
}
