//! Modular-arithmetic substrate: ring operations over arbitrary-precision
//! integers, Miller-Rabin primality, segmented prime enumeration and
//! safe-prime generation.
//!
//! Everything here is a pure function of its inputs. Randomized routines
//! take an explicit 64-bit seed and run a counter-based generator, so
//! results are reproducible across runs and thread counts.

use num_bigint::{BigInt, BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;
use thiserror::Error;

/// Default number of Miller-Rabin rounds for probabilistic inputs.
pub const MR_DEFAULT_ROUNDS: u32 = 40;

/// Below this bound the base set {2,3,5,7,11,13,17} is a deterministic
/// primality test (known threshold 3.4e14; we stay under it).
const MR_DETERMINISTIC_BOUND: u64 = 330_000_000_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModMathError {
    #[error("{element} is not invertible modulo {modulus} (gcd = {gcd})")]
    NotInvertible {
        element: BigUint,
        modulus: BigUint,
        gcd: BigUint,
    },
}

/// The ring Z/mZ with m >= 2. Elements are kept reduced to `[0, m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModRing {
    modulus: BigUint,
}

impl ModRing {
    pub fn new(modulus: BigUint) -> Self {
        assert!(modulus >= BigUint::from(2u32), "modulus must be at least 2");
        ModRing { modulus }
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn reduce(&self, x: &BigUint) -> BigUint {
        x % &self.modulus
    }

    pub fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        a * b % &self.modulus
    }

    /// `base^exp mod m` by square-and-multiply; an exponent of zero gives 1.
    pub fn pow(&self, base: &BigUint, exp: &BigUint) -> BigUint {
        base.modpow(exp, &self.modulus)
    }

    /// Modular inverse by the extended Euclidean algorithm.
    pub fn inv(&self, a: &BigUint) -> Result<BigUint, ModMathError> {
        let a = self.reduce(a);
        let e = BigInt::from(a.clone());
        let m = BigInt::from(self.modulus.clone());
        let ext = e.extended_gcd(&m);
        if !ext.gcd.is_one() {
            return Err(ModMathError::NotInvertible {
                element: a,
                modulus: self.modulus.clone(),
                gcd: ext.gcd.to_biguint().expect("gcd of non-negative inputs"),
            });
        }
        let x = ext.x.mod_floor(&m);
        Ok(x.to_biguint().expect("mod_floor is non-negative"))
    }

    /// Product of a sequence of (not necessarily reduced) factors.
    pub fn product<'a, I: IntoIterator<Item = &'a BigUint>>(&self, factors: I) -> BigUint {
        factors
            .into_iter()
            .fold(BigUint::one(), |acc, x| acc * x % &self.modulus)
    }
}

/// A seeded ChaCha generator; the basis for all randomness in this crate.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An independent stream of `seeded_rng(seed)`, used to give each solver
/// round (or any other sub-task) its own replayable generator.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n mod m` for a word-sized modulus without allocating.
pub fn biguint_mod_u64(n: &BigUint, m: u64) -> u64 {
    debug_assert!(m > 0);
    let mut acc: u64 = 0;
    for digit in n.iter_u64_digits().rev() {
        acc = (((acc as u128) << 64 | digit as u128) % m as u128) as u64;
    }
    acc
}

fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(1000))
}

fn low_u64(n: &BigUint) -> u64 {
    n.iter_u64_digits().next().unwrap_or(0)
}

/// Miller-Rabin primality test with trial division by primes below 1000.
///
/// Inputs under 3.3e14 are decided exactly with a fixed base set; larger
/// inputs use `rounds` bases drawn from a generator seeded by the input
/// itself, so the verdict is deterministic per input. The false positive
/// rate is bounded by 4^-rounds.
pub fn is_prime(n: &BigUint, rounds: u32) -> bool {
    if n < &BigUint::from(2u32) {
        return false;
    }
    for &p in small_primes() {
        if biguint_mod_u64(n, p) == 0 {
            return *n == BigUint::from(p);
        }
    }
    if n < &BigUint::from(1_000_000u64) {
        // survived trial division past sqrt(n)
        return true;
    }

    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().expect("n - 1 > 0");
    let d = &n_minus_1 >> s;

    let mut check = |base: &BigUint| -> bool {
        let mut x = base.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            return true;
        }
        for _ in 1..s {
            x = &x * &x % n;
            if x == n_minus_1 {
                return true;
            }
        }
        false
    };

    if n.bits() <= 64 && low_u64(n) < MR_DETERMINISTIC_BOUND {
        return [2u32, 3, 5, 7, 11, 13, 17]
            .iter()
            .all(|&b| check(&BigUint::from(b)));
    }

    let mut rng = seeded_rng(0x6d72_7365_6564u64 ^ low_u64(n) ^ n.bits());
    let hi = n - 1u32;
    let lo = BigUint::from(2u32);
    for _ in 0..rounds.max(1) {
        let base = rng.gen_biguint_range(&lo, &hi);
        if !check(&base) {
            return false;
        }
    }
    true
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r > 0 && r.checked_mul(r).map_or(true, |sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// All primes up to `limit` (inclusive), via a segmented sieve so memory
/// stays bounded by the segment size rather than the limit.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    const SEGMENT: u64 = 1 << 20;
    if limit < 2 {
        return Vec::new();
    }
    let root = isqrt(limit);
    let base = simple_sieve(root.max(2));
    let mut primes = base.clone();
    let mut lo = root + 1;
    let mut mark = vec![false; SEGMENT as usize];
    while lo <= limit {
        let hi = (lo + SEGMENT - 1).min(limit);
        let len = (hi - lo + 1) as usize;
        mark[..len].fill(false);
        for &p in &base {
            let mut m = lo.div_ceil(p) * p;
            while m <= hi {
                mark[(m - lo) as usize] = true;
                m += p;
            }
        }
        primes.extend((0..len).filter(|&i| !mark[i]).map(|i| lo + i as u64));
        lo = hi + 1;
    }
    primes
}

/// The first `k` primes in increasing order, starting from 2.
pub fn first_primes(k: usize) -> Vec<u64> {
    if k == 0 {
        return Vec::new();
    }
    let mut bound = if k < 6 {
        16
    } else {
        let kf = k as f64;
        (kf * (kf.ln() + kf.ln().ln()) * 1.2) as u64
    };
    loop {
        let primes = primes_up_to(bound);
        if primes.len() >= k {
            return primes[..k].to_vec();
        }
        bound *= 2;
    }
}

/// Euler's totient from a prime factorization.
pub fn euler_phi(factorization: &[(BigUint, u32)]) -> BigUint {
    factorization.iter().fold(BigUint::one(), |acc, (p, a)| {
        acc * p.pow(a - 1) * (p - 1u32)
    })
}

fn screen_by_small_primes(q: &BigUint) -> bool {
    // Checks q and p = 2q + 1 simultaneously; one bigint reduction per prime.
    for &r in small_primes() {
        let qm = biguint_mod_u64(q, r);
        if qm == 0 && *q != BigUint::from(r) {
            return false;
        }
        if (2 * qm + 1) % r == 0 && (q * 2u32 + 1u32) != BigUint::from(r) {
            return false;
        }
    }
    true
}

/// A safe prime p = 2q + 1 with exactly `bits` bits (bits >= 3), q an odd
/// prime. Deterministic for a fixed seed.
pub fn gen_safe_prime(bits: u64, seed: u64) -> BigUint {
    assert!(bits >= 3, "safe primes need at least 3 bits");
    let mut rng = seeded_rng(seed);
    loop {
        let mut q = rng.gen_biguint(bits - 1);
        q.set_bit(bits - 2, true);
        q.set_bit(0, true);
        if !screen_by_small_primes(&q) {
            continue;
        }
        if !is_prime(&q, MR_DEFAULT_ROUNDS) {
            continue;
        }
        let p = q * 2u32 + 1u32;
        if is_prime(&p, MR_DEFAULT_ROUNDS) {
            return p;
        }
    }
}

/// A random odd prime with exactly `bits` bits (bits >= 2), deterministic
/// for a fixed seed. Used for toy keys where safe primes are too sparse.
pub fn gen_prime(bits: u64, seed: u64) -> BigUint {
    assert!(bits >= 2);
    if bits == 2 {
        return BigUint::from(3u32);
    }
    let mut rng = seeded_rng(seed);
    loop {
        let mut p = rng.gen_biguint(bits);
        p.set_bit(bits - 1, true);
        p.set_bit(0, true);
        if is_prime(&p, MR_DEFAULT_ROUNDS) {
            return p;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(m: u64) -> ModRing {
        ModRing::new(BigUint::from(m))
    }

    #[test]
    fn mod_mul_examples() {
        let z11 = ring(11);
        assert_eq!(z11.mul(&7u32.into(), &8u32.into()), 1u32.into());
        let z97 = ring(97);
        let x = BigUint::from(55u32);
        assert_eq!(z97.mul(&BigUint::one(), &x), x);
        // schoolbook multiply-then-divide oracle
        let z = ring(10_000_019);
        let (a, b) = (9_851_537u64, 303_860u64);
        let oracle = ((a as u128 * b as u128) % 10_000_019u128) as u64;
        assert_eq!(z.mul(&a.into(), &b.into()), oracle.into());
    }

    #[test]
    fn mod_pow_examples() {
        let z1000 = ring(1000);
        assert_eq!(z1000.pow(&2u32.into(), &10u32.into()), 24u32.into());
        assert_eq!(z1000.pow(&77u32.into(), &BigUint::zero()), BigUint::one());
        // repeated multiplication oracle
        let z23 = ring(23);
        let mut acc = BigUint::one();
        for _ in 0..15 {
            acc = z23.mul(&acc, &3u32.into());
        }
        assert_eq!(acc, 12u32.into());
        assert_eq!(z23.pow(&3u32.into(), &15u32.into()), acc);
    }

    #[test]
    fn mod_inv_examples() {
        let z10 = ring(10);
        assert_eq!(z10.inv(&3u32.into()).unwrap(), 7u32.into());
        assert_eq!(z10.inv(&BigUint::one()).unwrap(), BigUint::one());
        match z10.inv(&2u32.into()) {
            Err(ModMathError::NotInvertible { gcd, .. }) => assert_eq!(gcd, 2u32.into()),
            other => panic!("expected NotInvertible, got {other:?}"),
        }
    }

    #[test]
    fn inverse_property() {
        let m = BigUint::from(1_000_003u64); // prime
        let ring = ModRing::new(m.clone());
        let mut rng = seeded_rng(7);
        for _ in 0..200 {
            let a = rng.gen_biguint_range(&BigUint::one(), &m);
            let inv = ring.inv(&a).unwrap();
            assert!(ring.mul(&a, &inv).is_one());
        }
    }

    #[test]
    fn pow_additivity() {
        let ring = ring(100_003);
        let mut rng = seeded_rng(11);
        for _ in 0..50 {
            let a = rng.gen_biguint_below(ring.modulus());
            let e1 = rng.gen_biguint(12);
            let e2 = rng.gen_biguint(12);
            let lhs = ring.pow(&a, &(&e1 + &e2));
            let rhs = ring.mul(&ring.pow(&a, &e1), &ring.pow(&a, &e2));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn is_prime_examples() {
        assert!(!is_prime(&561u32.into(), 40));
        assert!(is_prime(&2u32.into(), 40));
        // trial division oracle for 10000019
        let n = 10_000_019u64;
        let mut composite = false;
        let mut d = 2u64;
        while d * d <= n {
            if n % d == 0 {
                composite = true;
                break;
            }
            d += 1;
        }
        assert!(!composite);
        assert!(is_prime(&n.into(), 40));
    }

    #[test]
    fn is_prime_large_composites() {
        // product of two 40-bit primes
        let p = gen_prime(40, 1);
        let q = gen_prime(40, 2);
        assert!(!is_prime(&(&p * &q), 40));
        assert!(is_prime(&p, 40));
    }

    #[test]
    fn first_primes_examples() {
        assert!(first_primes(0).is_empty());
        assert_eq!(first_primes(5), vec![2, 3, 5, 7, 11]);
    }

    #[test]
    fn first_primes_against_sieve_oracle() {
        // Independent simple sieve up to 1e6.
        let limit = 1_000_000u64;
        let mut composite = vec![false; (limit + 1) as usize];
        let mut oracle = Vec::new();
        for i in 2..=limit {
            if !composite[i as usize] {
                oracle.push(i);
                let mut j = i * i;
                while j <= limit {
                    composite[j as usize] = true;
                    j += i;
                }
            }
        }
        assert_eq!(primes_up_to(limit), oracle);
        let k = 1000;
        assert_eq!(first_primes(k), oracle[..k].to_vec());
        assert!(first_primes(k).iter().all(|&p| is_prime(&p.into(), 10)));
    }

    #[test]
    fn primorial_bit_lengths() {
        // 233 primes multiply to under 2048 bits; one more crosses it.
        let primes = first_primes(234);
        let prod233: BigUint = primes[..233].iter().map(|&p| BigUint::from(p)).product();
        let prod234: BigUint = &prod233 * primes[233];
        assert!(prod233.bits() < 2048);
        assert!(prod234.bits() >= 2048);
    }

    #[test]
    fn safe_prime_small_sizes() {
        assert_eq!(gen_safe_prime(5, 0), 23u32.into());
        assert_eq!(gen_safe_prime(5, 12345), 23u32.into());
        assert_eq!(gen_safe_prime(3, 7), 7u32.into());
    }

    #[test]
    fn safe_prime_64_bits() {
        let p = gen_safe_prime(64, 1);
        assert_eq!(p.bits(), 64);
        assert!(is_prime(&p, 40));
        let q = (&p - 1u32) / 2u32;
        assert!(is_prime(&q, 40));
        // p = 2q+1 with q odd forces p = 3 mod 4
        assert_eq!(biguint_mod_u64(&p, 4), 3);
        // deterministic per seed
        assert_eq!(p, gen_safe_prime(64, 1));
        assert_ne!(p, gen_safe_prime(64, 2));
    }

    #[test]
    fn mod_u64_matches_bigint() {
        let mut rng = seeded_rng(3);
        for _ in 0..100 {
            let n = rng.gen_biguint(200);
            let m = 1 + low_u64(&rng.gen_biguint(63));
            assert_eq!(
                biguint_mod_u64(&n, m),
                (&n % BigUint::from(m)).to_u64().unwrap()
            );
        }
    }

    #[test]
    fn euler_phi_small() {
        // phi(120) = 32 with 120 = 2^3 * 3 * 5
        let fac = vec![
            (BigUint::from(2u32), 3u32),
            (BigUint::from(3u32), 1),
            (BigUint::from(5u32), 1),
        ];
        assert_eq!(euler_phi(&fac), 32u32.into());
    }
}
