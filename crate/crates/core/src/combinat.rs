//! Binomial coefficients and enumeration of fixed-weight index patterns.
//!
//! Patterns of popcount `h` over `b` positions are ordered colexicographically
//! (compare the largest differing member), which gives a simple rank/unrank
//! pair. Rank ranges are how the solver slices a weight class into memory
//! chunks and per-worker shares.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Exact binomial coefficient C(n, k).
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut res = BigUint::one();
    for i in 0..k {
        res = res * (n - i) / (i + 1);
    }
    res
}

/// C(n, k) as a u64, or `None` when it does not fit.
pub fn binomial_u64(n: u64, k: u64) -> Option<u64> {
    binomial(n, k).to_u64()
}

/// Colexicographic rank of a strictly increasing combination.
///
/// rank(c) = sum over i of C(c[i], i + 1). Assumes the rank fits in u64,
/// which the solver guarantees by checking C(b, h) first.
pub fn colex_rank(combo: &[usize]) -> u64 {
    combo
        .iter()
        .enumerate()
        .map(|(i, &c)| binomial_u64(c as u64, i as u64 + 1).expect("rank fits in u64"))
        .sum()
}

/// The combination of weight `h` over `0..b` with the given colex rank.
pub fn colex_unrank(b: usize, h: usize, mut rank: u64) -> Vec<usize> {
    debug_assert!(h <= b);
    let mut combo = vec![0usize; h];
    let mut top = b;
    for i in (0..h).rev() {
        // largest v < top with C(v, i+1) <= rank
        let mut v = top - 1;
        loop {
            let c = binomial_u64(v as u64, i as u64 + 1).expect("searched range fits u64");
            if c <= rank {
                rank -= c;
                combo[i] = v;
                top = v;
                break;
            }
            v -= 1;
        }
    }
    combo
}

/// Advances `combo` to its colex successor over `0..b`.
///
/// Returns the highest position that changed (positions below it reset to
/// `0..i`), or `None` when `combo` was the last pattern.
pub fn next_colex(combo: &mut [usize], b: usize) -> Option<usize> {
    let h = combo.len();
    for i in 0..h {
        let cap = if i + 1 < h { combo[i + 1] } else { b };
        if combo[i] + 1 < cap {
            combo[i] += 1;
            for (j, slot) in combo.iter_mut().enumerate().take(i) {
                *slot = j;
            }
            return Some(i);
        }
    }
    None
}

/// Iterator over all C(b, h) fixed-weight patterns in colex rank order,
/// yielding each as a sorted index set.
pub struct FixedWeightCombos {
    b: usize,
    combo: Vec<usize>,
    started: bool,
    done: bool,
}

/// All weight-`h` patterns over `0..b` in colexicographic order.
pub fn fixed_weight_combos(b: usize, h: usize) -> FixedWeightCombos {
    assert!(h <= b, "weight {h} exceeds window size {b}");
    FixedWeightCombos {
        b,
        combo: (0..h).collect(),
        started: false,
        done: false,
    }
}

impl Iterator for FixedWeightCombos {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(self.combo.clone());
        }
        match next_colex(&mut self.combo, self.b) {
            Some(_) => Some(self.combo.clone()),
            None => {
                self.done = true;
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(0, 0), BigUint::one());
        assert_eq!(binomial(5, 2), 10u32.into());
        assert_eq!(binomial(50, 4), 230_300u32.into());
        assert_eq!(binomial(3, 5), BigUint::zero());
        assert_eq!(binomial_u64(50, 4), Some(230_300));
        assert_eq!(binomial_u64(200, 100), None);
    }

    #[test]
    fn combos_3_choose_2() {
        let all: Vec<_> = fixed_weight_combos(3, 2).collect();
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn combos_weight_zero() {
        let all: Vec<_> = fixed_weight_combos(9, 0).collect();
        assert_eq!(all, vec![Vec::<usize>::new()]);
    }

    #[test]
    fn combos_stream_length() {
        assert_eq!(fixed_weight_combos(50, 4).count(), 230_300);
    }

    #[test]
    fn counts_match_binomial_up_to_20() {
        for b in 0..=20usize {
            for h in 0..=b {
                let count = fixed_weight_combos(b, h).count() as u64;
                assert_eq!(Some(count), binomial_u64(b as u64, h as u64));
            }
        }
    }

    #[test]
    fn distinct_and_ranked() {
        let b = 10;
        let h = 4;
        let mut seen = std::collections::HashSet::new();
        for (rank, combo) in fixed_weight_combos(b, h).enumerate() {
            assert_eq!(combo.len(), h);
            assert!(combo.windows(2).all(|w| w[0] < w[1]));
            assert!(seen.insert(combo.clone()));
            assert_eq!(colex_rank(&combo), rank as u64);
            assert_eq!(colex_unrank(b, h, rank as u64), combo);
        }
        assert_eq!(seen.len(), 210);
    }

    proptest! {
        #[test]
        fn rank_unrank_roundtrip(b in 1usize..40, seed in any::<u64>()) {
            let h = (seed % b as u64) as usize;
            let total = binomial_u64(b as u64, h as u64).unwrap();
            let rank = seed % total;
            let combo = colex_unrank(b, h, rank);
            prop_assert_eq!(colex_rank(&combo), rank);
        }
    }
}
