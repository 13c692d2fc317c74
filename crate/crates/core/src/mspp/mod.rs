//! The modular subset product problem: given a modulus L, a pool of units
//! u_0..u_n and a target c, find a subset of the pool whose product is
//! congruent to c. Pools are either stored explicitly, described as an
//! integer range, or described as exponent tuples over a few base primes
//! (the compact forms never materialize the whole set).

use crate::modmath::{biguint_mod_u64, euler_phi, ModMathError, ModRing};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

mod digest;
mod exhaustive;
mod sample;
mod solver;

pub use digest::{digest128, truncated_digest, DigestKind};
pub use exhaustive::solve_exhaustive;
pub use sample::sample_disjoint_windows;
pub use solver::{ba_mspp, HalfSet, RoundStats, SolveReport};

pub const DEFAULT_MEMORY_CAP_BYTES: u64 = 2 << 30;

#[derive(Debug, Error)]
pub enum MsppError {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error(transparent)]
    NotInvertible(#[from] ModMathError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("memory budget exceeded: needs {needed_bits} bits, cap is {cap_bits} bits")]
    BudgetExceeded { needed_bits: u128, cap_bits: u128 },
}

/// A pool of exponent tuples: element i is `prod_j primes[j]^e_j + 1` for the
/// i-th stored tuple. This is how Carmichael prime pools stay compact; the
/// tuple is a few bytes while the prime it denotes can be as large as the
/// modulus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuplePool {
    primes: Vec<u64>,
    arity: usize,
    tuples: Vec<u8>,
}

impl TuplePool {
    pub fn new(primes: Vec<u64>) -> Self {
        let arity = primes.len();
        assert!(arity > 0);
        TuplePool {
            primes,
            arity,
            tuples: Vec::new(),
        }
    }

    pub fn base_primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn push(&mut self, exponents: &[u8]) {
        assert_eq!(exponents.len(), self.arity);
        self.tuples.extend_from_slice(exponents);
    }

    pub fn len(&self) -> usize {
        self.tuples.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn exponents(&self, i: usize) -> &[u8] {
        &self.tuples[i * self.arity..(i + 1) * self.arity]
    }

    /// The divisor encoded by tuple i (without the +1 offset).
    pub fn divisor(&self, i: usize) -> BigUint {
        let mut d = BigUint::one();
        for (j, &e) in self.exponents(i).iter().enumerate() {
            d *= BigUint::from(self.primes[j]).pow(e as u32);
        }
        d
    }

    pub fn element(&self, i: usize) -> BigUint {
        self.divisor(i) + 1u32
    }

    /// Recovers the exponent tuple of a divisor; the storage round-trip.
    pub fn exponents_of(&self, divisor: &BigUint) -> Option<Vec<u8>> {
        let mut d = divisor.clone();
        let mut out = vec![0u8; self.arity];
        for (j, &p) in self.primes.iter().enumerate() {
            let p = BigUint::from(p);
            while (&d % &p).is_zero() {
                d /= &p;
                out[j] = out[j].checked_add(1)?;
            }
        }
        d.is_one().then_some(out)
    }
}

/// The element pool of an instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pool {
    Explicit(Vec<BigUint>),
    /// The integers lo..=hi.
    Range { lo: u64, hi: u64 },
    Tuples(TuplePool),
}

impl Pool {
    pub fn len(&self) -> usize {
        match self {
            Pool::Explicit(v) => v.len(),
            Pool::Range { lo, hi } => (hi - lo + 1) as usize,
            Pool::Tuples(t) => t.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn element(&self, i: usize) -> BigUint {
        match self {
            Pool::Explicit(v) => v[i].clone(),
            Pool::Range { lo, .. } => BigUint::from(lo + i as u64),
            Pool::Tuples(t) => t.element(i),
        }
    }

    /// Largest bit length over the pool, the B of the memory estimate.
    pub fn max_element_bits(&self) -> u64 {
        match self {
            Pool::Explicit(v) => v.iter().map(|x| x.bits()).max().unwrap_or(0),
            Pool::Range { hi, .. } => 64 - hi.leading_zeros() as u64,
            Pool::Tuples(t) => (0..t.len()).map(|i| t.element(i).bits()).max().unwrap_or(0),
        }
    }
}

/// One MSPP instance: modulus, target and pool, validated so that every
/// pool element and the target are units of the ring.
#[derive(Debug, Clone)]
pub struct MsppInstance {
    modulus: BigUint,
    target: BigUint,
    pool: Pool,
}

impl MsppInstance {
    pub fn new(modulus: BigUint, target: BigUint, pool: Pool) -> Result<Self, MsppError> {
        if modulus < BigUint::from(2u32) {
            return Err(MsppError::InvalidInstance(
                "modulus must be at least 2".into(),
            ));
        }
        let target = &target % &modulus;
        let inst = MsppInstance {
            modulus,
            target,
            pool,
        };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<(), MsppError> {
        let gcd_t = self.target.gcd(&self.modulus);
        if !gcd_t.is_one() {
            return Err(MsppError::NotInvertible(ModMathError::NotInvertible {
                element: self.target.clone(),
                modulus: self.modulus.clone(),
                gcd: gcd_t,
            }));
        }
        match &self.pool {
            Pool::Explicit(v) => {
                for x in v {
                    let g = x.gcd(&self.modulus);
                    if !g.is_one() {
                        return Err(MsppError::NotInvertible(ModMathError::NotInvertible {
                            element: x.clone(),
                            modulus: self.modulus.clone(),
                            gcd: g,
                        }));
                    }
                }
            }
            Pool::Range { lo, hi } => {
                if *lo < 1 {
                    return Err(MsppError::InvalidInstance(
                        "range pools start at 1 or above".into(),
                    ));
                }
                if *hi < *lo {
                    return Err(MsppError::InvalidInstance("empty range pool".into()));
                }
                let small_modulus = self.modulus.to_u64();
                for x in *lo..=*hi {
                    let g = match small_modulus {
                        Some(m) => x.gcd(&m),
                        // gcd(x, L) = gcd(L mod x, x)
                        None => biguint_mod_u64(&self.modulus, x).gcd(&x),
                    };
                    if g != 1 {
                        return Err(MsppError::NotInvertible(ModMathError::NotInvertible {
                            element: x.into(),
                            modulus: self.modulus.clone(),
                            gcd: g.into(),
                        }));
                    }
                }
            }
            Pool::Tuples(t) => {
                for i in 0..t.len() {
                    let x = t.element(i);
                    let g = x.gcd(&self.modulus);
                    if !g.is_one() {
                        return Err(MsppError::NotInvertible(ModMathError::NotInvertible {
                            element: x,
                            modulus: self.modulus.clone(),
                            gcd: g,
                        }));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn target(&self) -> &BigUint {
        &self.target
    }

    pub fn pool(&self) -> &Pool {
        &self.pool
    }

    pub fn ring(&self) -> ModRing {
        ModRing::new(self.modulus.clone())
    }

    /// Pool size, the n+1 of the analysis.
    pub fn len(&self) -> usize {
        self.pool.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pool.is_empty()
    }

    pub fn element(&self, i: usize) -> BigUint {
        self.pool.element(i)
    }

    /// Density |P| / log2(phi(L)) given the factorization of the modulus.
    pub fn density(&self, modulus_factorization: &[(BigUint, u32)]) -> f64 {
        let phi = euler_phi(modulus_factorization);
        let log2_phi = crate::planner::log2_biguint(&phi);
        self.len() as f64 / log2_phi
    }
}

/// Everything the iterated birthday solver consumes beyond the instance.
///
/// `h1 + h2` must equal `ell`; the balanced split maximizes the per-round
/// success probability. `2b` may be at most n+2: windows of `b` and `b-1`
/// cover the whole index set when n+1 is odd.
#[derive(Debug, Clone)]
pub struct AttackParams {
    pub b: usize,
    pub ell: usize,
    pub h1: usize,
    pub h2: usize,
    /// Stored hex digits of the truncated digest, 1..=32.
    pub q_hex: u32,
    pub iter: u64,
    pub seed: u64,
    pub workers: usize,
    /// Try every (h1, h2) split of ell each round instead of the fixed one.
    pub sweep_splits: bool,
    /// Finish the matching round and return every verified solution in it.
    pub collect_all: bool,
    pub memory_cap_bytes: u64,
    pub digest: DigestKind,
    /// Report progress to stderr every 2^22 probes.
    pub progress: bool,
}

impl AttackParams {
    /// Parameters with the balanced weight split and library defaults.
    pub fn balanced(b: usize, ell: usize) -> Self {
        AttackParams {
            b,
            ell,
            h1: ell / 2,
            h2: ell - ell / 2,
            q_hex: 12,
            iter: 500,
            seed: 0,
            workers: 1,
            sweep_splits: false,
            collect_all: false,
            memory_cap_bytes: DEFAULT_MEMORY_CAP_BYTES,
            digest: DigestKind::default(),
            progress: false,
        }
    }

    /// Window sizes for a pool of `n_plus_1` elements: |I1| = b and |I2| is
    /// one smaller when 2b = n+2 (the odd full partition).
    pub fn window_sizes(&self, n_plus_1: usize) -> (usize, usize) {
        (self.b, self.b.min(n_plus_1 - self.b))
    }

    pub fn validate(&self, n_plus_1: usize) -> Result<(), MsppError> {
        let fail = |msg: String| Err(MsppError::InvalidParams(msg));
        if n_plus_1 == 0 {
            return fail("empty pool".into());
        }
        if self.b == 0 {
            return fail("window size b must be positive".into());
        }
        if 2 * self.b > n_plus_1 + 1 {
            return fail(format!(
                "two windows of {} do not fit a pool of {} (allowing the odd partition)",
                self.b, n_plus_1
            ));
        }
        let (b1, b2) = self.window_sizes(n_plus_1);
        if self.h1 + self.h2 != self.ell {
            return fail(format!(
                "h1 + h2 = {} does not match ell = {}",
                self.h1 + self.h2,
                self.ell
            ));
        }
        if self.h1 > b1 || self.h2 > b2 {
            return fail(format!(
                "split ({}, {}) exceeds window sizes ({}, {})",
                self.h1, self.h2, b1, b2
            ));
        }
        if self.q_hex == 0 || self.q_hex > 32 {
            return fail(format!("Q = {} out of range 1..=32", self.q_hex));
        }
        if self.iter == 0 {
            return fail("iteration count must be positive".into());
        }
        if self.workers == 0 {
            return fail("worker count must be positive".into());
        }
        Ok(())
    }
}

/// A verified solution: indices into the pool whose elements multiply to the
/// target. Construction recomputes the product, so a `SubsetSolution` never
/// leaves this module unverified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSolution {
    indices: Vec<usize>,
    elements: Vec<BigUint>,
    certificate: BigUint,
}

impl SubsetSolution {
    pub fn new(instance: &MsppInstance, mut indices: Vec<usize>) -> Result<Self, MsppError> {
        indices.sort_unstable();
        indices.dedup();
        let ring = instance.ring();
        let elements: Vec<BigUint> = indices.iter().map(|&i| instance.element(i)).collect();
        let certificate = ring.product(elements.iter());
        if certificate != *instance.target() {
            return Err(MsppError::InvalidInstance(format!(
                "candidate product {} does not match target {}",
                certificate,
                instance.target()
            )));
        }
        Ok(SubsetSolution {
            indices,
            elements,
            certificate,
        })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn elements(&self) -> &[BigUint] {
        &self.elements
    }

    pub fn certificate(&self) -> &BigUint {
        &self.certificate
    }

    /// The local Hamming weight of this solution.
    pub fn weight(&self) -> usize {
        self.indices.len()
    }
}
