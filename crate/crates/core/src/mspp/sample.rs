//! Uniform sampling of the two disjoint index windows drawn each round.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Two disjoint sorted windows over `{0..n}` with |I1| = b1 and |I2| = b2.
///
/// Small draws use rejection sampling; once the windows cover a constant
/// fraction of the index set a partial shuffle of the materialized indices
/// is cheaper. When b1 + b2 = n + 1 the result is a uniform partition.
pub(crate) fn sample_windows(
    n: usize,
    b1: usize,
    b2: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<usize>, Vec<usize>) {
    let total = b1 + b2;
    assert!(total <= n + 1, "windows exceed the index set");
    let mut picked: Vec<usize> = Vec::with_capacity(total);
    if (total * total) < n + 1 {
        // rejection sampling: repeats are rare in this regime
        while picked.len() < total {
            let x = rng.gen_range(0..=n);
            if !picked.contains(&x) {
                picked.push(x);
            }
        }
    } else {
        let mut all: Vec<usize> = (0..=n).collect();
        for i in 0..total {
            let j = rng.gen_range(i..=n);
            all.swap(i, j);
        }
        picked.extend_from_slice(&all[..total]);
    }
    let mut i1 = picked[..b1].to_vec();
    let mut i2 = picked[b1..].to_vec();
    i1.sort_unstable();
    i2.sort_unstable();
    (i1, i2)
}

/// Disjoint windows of equal size b, as the iterated attack samples them.
pub fn sample_disjoint_windows(
    n: usize,
    b: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<usize>, Vec<usize>) {
    sample_windows(n, b, b, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modmath::seeded_rng;

    #[test]
    fn two_element_partition() {
        let mut rng = seeded_rng(1);
        let mut seen = std::collections::HashSet::new();
        for _ in 0..40 {
            let (i1, i2) = sample_disjoint_windows(1, 1, &mut rng);
            assert_eq!(i1.len(), 1);
            assert_eq!(i2.len(), 1);
            assert_ne!(i1[0], i2[0]);
            seen.insert((i1[0], i2[0]));
        }
        // both orderings of {0, 1} occur
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn disjoint_in_large_pool() {
        let mut rng = seeded_rng(2);
        let (i1, i2) = sample_disjoint_windows(9_999_998, 12, &mut rng);
        let mut all: Vec<usize> = i1.iter().chain(i2.iter()).copied().collect();
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 24);
        assert!(all.iter().all(|&x| x <= 9_999_998));
    }

    #[test]
    fn full_partition_when_2b_equals_n_plus_1() {
        let mut rng = seeded_rng(3);
        let (i1, i2) = sample_disjoint_windows(231, 116, &mut rng);
        let mut union: Vec<usize> = i1.iter().chain(i2.iter()).copied().collect();
        union.sort_unstable();
        assert_eq!(union, (0..=231).collect::<Vec<_>>());
    }

    #[test]
    fn odd_partition_uses_uneven_windows() {
        let mut rng = seeded_rng(4);
        let (i1, i2) = sample_windows(84, 43, 42, &mut rng);
        assert_eq!(i1.len(), 43);
        assert_eq!(i2.len(), 42);
        let mut union: Vec<usize> = i1.iter().chain(i2.iter()).copied().collect();
        union.sort_unstable();
        assert_eq!(union, (0..=84).collect::<Vec<_>>());
    }

    #[test]
    fn windows_are_roughly_uniform() {
        // each index lands in I1 with probability b/(n+1)
        let n = 19usize;
        let b = 5usize;
        let trials = 20_000;
        let mut counts = vec![0u32; n + 1];
        let mut rng = seeded_rng(5);
        for _ in 0..trials {
            let (i1, _) = sample_disjoint_windows(n, b, &mut rng);
            for i in i1 {
                counts[i] += 1;
            }
        }
        let expect = trials as f64 * b as f64 / (n + 1) as f64;
        let sigma = (expect * (1.0 - b as f64 / (n + 1) as f64)).sqrt();
        for &c in &counts {
            assert!((c as f64 - expect).abs() < 5.0 * sigma, "count {c} vs {expect}");
        }
    }
}
