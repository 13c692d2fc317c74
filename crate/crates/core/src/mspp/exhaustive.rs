//! The exhaustive meet-in-the-middle solver.
//!
//! Splits the index set in half, materializes every product over the first
//! half and streams every target-times-inverse over the second half looking
//! for a collision. Complete: if any subset (of any weight) works, it is
//! found; the empty subset counts when the target is 1.

use super::{MsppError, MsppInstance, SubsetSolution};
use num_bigint::BigUint;
use num_traits::One;
use std::collections::HashMap;

/// Solves by full enumeration of `2^ceil((n+1)/2)` half-products.
///
/// `memory_cap_bytes` bounds the stored half; the budget estimate is
/// entries * (modulus bytes + mask overhead). Exceeding it is an error
/// rather than a trigger for chunking, which only the iterated solver does.
pub fn solve_exhaustive(
    instance: &MsppInstance,
    memory_cap_bytes: u64,
) -> Result<Option<SubsetSolution>, MsppError> {
    let n_plus_1 = instance.len();
    if n_plus_1 == 0 {
        return if instance.target().is_one() {
            Ok(Some(SubsetSolution::new(instance, vec![])?))
        } else {
            Ok(None)
        };
    }
    let half = n_plus_1.div_ceil(2);
    let rest = n_plus_1 - half;

    let entry_bytes = (instance.modulus().bits() as u128).div_ceil(8) + 24;
    let needed = (1u128 << half) * entry_bytes;
    if needed > memory_cap_bytes as u128 {
        return Err(MsppError::BudgetExceeded {
            needed_bits: needed * 8,
            cap_bits: memory_cap_bytes as u128 * 8,
        });
    }

    let ring = instance.ring();
    let left: Vec<BigUint> = (0..half).map(|i| ring.reduce(&instance.element(i))).collect();
    let right: Vec<BigUint> = (half..n_plus_1)
        .map(|i| ring.reduce(&instance.element(i)))
        .collect();
    let right_inv: Vec<BigUint> = right
        .iter()
        .map(|x| ring.inv(x))
        .collect::<Result<_, _>>()?;

    // products[mask] = prod of left elements selected by mask
    let mut products = vec![BigUint::one(); 1 << half];
    for mask in 1usize..(1 << half) {
        let low = mask.trailing_zeros() as usize;
        products[mask] = ring.mul(&products[mask & (mask - 1)], &left[low]);
    }
    let mut table: HashMap<&BigUint, usize> = HashMap::with_capacity(1 << half);
    for (mask, value) in products.iter().enumerate() {
        // keep the lowest mask per value for a deterministic witness
        table.entry(value).or_insert(mask);
    }

    // walk right-side masks in Gray-code order so each step is one multiply
    let mut value = instance.target().clone();
    let mut gray_prev = 0usize;
    for step in 0..(1usize << rest) {
        if step > 0 {
            let gray = step ^ (step >> 1);
            let flipped = (gray ^ gray_prev).trailing_zeros() as usize;
            let went_up = gray & (1 << flipped) != 0;
            value = if went_up {
                ring.mul(&value, &right_inv[flipped])
            } else {
                ring.mul(&value, &right[flipped])
            };
            gray_prev = gray;
        }
        if let Some(&mask1) = table.get(&value) {
            let mut indices: Vec<usize> = (0..half).filter(|i| mask1 >> i & 1 == 1).collect();
            indices.extend((0..rest).filter(|i| gray_prev >> i & 1 == 1).map(|i| half + i));
            return Ok(Some(SubsetSolution::new(instance, indices)?));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mspp::Pool;

    fn instance(modulus: u64, target: u64, elems: &[u64]) -> MsppInstance {
        MsppInstance::new(
            modulus.into(),
            target.into(),
            Pool::Explicit(elems.iter().map(|&x| x.into()).collect()),
        )
        .unwrap()
    }

    const CAP: u64 = 1 << 30;

    #[test]
    fn finds_simple_solution() {
        let inst = instance(7, 6, &[2, 3, 5]);
        let sol = solve_exhaustive(&inst, CAP).unwrap().unwrap();
        assert_eq!(sol.indices(), &[0, 1]);
    }

    #[test]
    fn reports_no_solution() {
        // subsets of (2, 4) reach 1, 2, 4, 1 mod 7; target 3 is unreachable
        let inst = instance(7, 3, &[2, 4]);
        assert!(solve_exhaustive(&inst, CAP).unwrap().is_none());
    }

    #[test]
    fn full_subset_solution() {
        let inst = instance(7, 2, &[2, 3, 5]);
        let sol = solve_exhaustive(&inst, CAP).unwrap().unwrap();
        assert_eq!(sol.indices(), &[0, 1, 2]);
    }

    #[test]
    fn empty_subset_iff_target_is_one() {
        let inst = instance(7, 1, &[2, 3]);
        let sol = solve_exhaustive(&inst, CAP).unwrap().unwrap();
        assert_eq!(sol.weight(), 0);
    }

    #[test]
    fn budget_errors_out() {
        let inst = instance(101, 5, &[2, 3, 4, 6, 7, 8, 9, 10]);
        let err = solve_exhaustive(&inst, 16).unwrap_err();
        assert!(matches!(err, MsppError::BudgetExceeded { .. }));
    }

    #[test]
    fn agrees_with_bruteforce_oracle() {
        use crate::modmath::seeded_rng;
        use num_traits::One;
        use rand::Rng;

        let mut rng = seeded_rng(99);
        for trial in 0..60 {
            let modulus = [23u64, 101, 1009][trial % 3];
            let n_plus_1 = 1 + (trial % 9);
            let mut elems = Vec::new();
            while elems.len() < n_plus_1 {
                let x = rng.gen_range(2..modulus);
                if num_integer::gcd(x, modulus) == 1 {
                    elems.push(x);
                }
            }
            let target = rng.gen_range(1..modulus);
            if num_integer::gcd(target, modulus) != 1 {
                continue;
            }
            let inst = instance(modulus, target, &elems);

            // oracle: all 2^(n+1) subsets
            let mut reachable = false;
            for mask in 0usize..(1 << n_plus_1) {
                let prod = (0..n_plus_1)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| elems[i] % modulus)
                    .fold(1u64, |a, x| a * x % modulus);
                if prod == target {
                    reachable = true;
                    break;
                }
            }

            let got = solve_exhaustive(&inst, CAP).unwrap();
            assert_eq!(got.is_some(), reachable, "modulus {modulus} elems {elems:?} target {target}");
            if let Some(sol) = got {
                let _ = SubsetSolution::new(&inst, sol.indices().to_vec()).unwrap();
                assert!(sol.certificate().is_one() || !sol.indices().is_empty());
            }
        }
    }
}
