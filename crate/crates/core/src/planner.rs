//! Closed-form planning for the iterated birthday attack: per-round success
//! probability, expected iterations, memory and time budgets, digest-width
//! selection and the grow-b-or-grow-h comparison.
//!
//! Probabilities are exact rationals; binomials at pool scale (think
//! C(10^7, 21)) overflow any float, so floats appear only at the
//! presentation layer.

use crate::combinat::binomial;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlannerError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// (mantissa in [1, 2), binary exponent) of a positive big integer.
fn frexp_biguint(x: &BigUint) -> (f64, i64) {
    let bits = x.bits();
    if bits <= 53 {
        let v = x.to_f64().expect("small value");
        return (v, 0);
    }
    let shift = bits - 53;
    let top = (x >> shift).to_f64().expect("53-bit value");
    (top, shift as i64)
}

/// log2 of a positive big integer, good to ~1e-15 relative error.
pub fn log2_biguint(x: &BigUint) -> f64 {
    assert!(!x.is_zero());
    let (m, e) = frexp_biguint(x);
    m.log2() + e as f64
}

/// A big rational as f64, robust when numerator and denominator are far
/// beyond f64 range themselves.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let numer = r.numer().abs().to_biguint().expect("abs");
    let denom = r.denom().abs().to_biguint().expect("abs");
    let (mn, en) = frexp_biguint(&numer);
    let (md, ed) = frexp_biguint(&denom);
    let exp = en - ed;
    if exp > 1060 {
        return sign * f64::INFINITY;
    }
    if exp < -1060 {
        return 0.0;
    }
    sign * (mn / md) * (exp as f64).exp2()
}

fn big_ratio(numer: BigUint, denom: BigUint) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Per-round probability that the stored and streamed weight classes share
/// an element, for one fixed weight-(h1+h2) solution over a pool of n+1
/// elements and two disjoint b-windows:
///
/// P = C(b, h1) * C(b, h2) / C(n+1, h1+h2)
pub fn success_probability(
    n: usize,
    b: usize,
    h1: usize,
    h2: usize,
) -> Result<BigRational, PlannerError> {
    let ell = h1 + h2;
    if ell > b {
        return Err(PlannerError::InvalidParams(format!(
            "ell = {ell} exceeds b = {b}"
        )));
    }
    if 2 * b > n + 1 {
        return Err(PlannerError::InvalidParams(format!(
            "b = {b} exceeds (n+1)/2 = {}",
            (n + 1) as f64 / 2.0
        )));
    }
    let numer = binomial(b as u64, h1 as u64) * binomial(b as u64, h2 as u64);
    let denom = binomial(n as u64 + 1, ell as u64);
    Ok(big_ratio(numer, denom))
}

/// Expected rounds to the first success, 1/P.
pub fn expected_iterations(p: &BigRational) -> Result<f64, PlannerError> {
    if p.is_zero() {
        return Err(PlannerError::InvalidParams(
            "success probability is zero".into(),
        ));
    }
    Ok(rational_to_f64(&p.recip()))
}

/// The split of ell that maximizes the per-round probability.
pub fn optimal_split(ell: usize) -> (usize, usize) {
    (ell / 2, ell - ell / 2)
}

/// Memory footprint in bits: `(4Q + b) * C(b, h1)` for the digest table plus
/// pattern masks, plus pool storage. Explicit pools store n+1 elements of
/// `element_bits` each; nice pools (ranges, exponent tuples) need only
/// n * ceil(log2 n) bits of description.
pub fn memory_estimate(
    n: usize,
    b: usize,
    h1: usize,
    q_hex: u32,
    element_bits: f64,
    nice: bool,
) -> BigUint {
    let table = binomial(b as u64, h1 as u64) * (4 * q_hex as u64 + b as u64);
    let pool_bits = if nice {
        let nn = n.max(2) as u64;
        n as u64 * (64 - (nn - 1).leading_zeros() as u64)
    } else {
        ((n as f64 + 1.0) * element_bits).ceil() as u64
    };
    table + pool_bits
}

/// Bits to GiB (2^30 bytes).
pub fn memory_gib(bits: &BigUint) -> f64 {
    let (m, e) = frexp_biguint(bits);
    m * ((e - 33) as f64).exp2()
}

/// Work estimate for one round.
#[derive(Debug, Clone)]
pub struct TimeEstimate {
    /// Modular multiplications to build both weight classes: S_b * (h1 + h2).
    pub mults: BigUint,
    /// Average-case hashtable probes, one per streamed candidate.
    pub probes: BigUint,
    /// Bit operations, with one multiplication costed at
    /// `lambda_bits * log2(lambda_bits)`.
    pub bit_ops: f64,
    pub per_worker_bit_ops: f64,
}

pub fn time_estimate(
    b: usize,
    h1: usize,
    h2: usize,
    lambda_bits: u64,
    workers: usize,
) -> TimeEstimate {
    let s_b = binomial(b as u64, h1 as u64);
    let mults = &s_b * ((h1 + h2) as u64);
    let m_lambda = lambda_bits as f64 * (lambda_bits.max(2) as f64).log2();
    let bit_ops = rational_to_f64(&big_ratio(mults.clone(), BigUint::one())) * m_lambda;
    TimeEstimate {
        mults,
        probes: s_b,
        bit_ops,
        per_worker_bit_ops: bit_ops / workers.max(1) as f64,
    }
}

/// Expected number of r-fold multicollisions when n draws land uniformly in
/// a set of m values: n^r / (r! * m^(r-1)).
pub fn multicollision_expectation(n: f64, m: f64, r: u32) -> f64 {
    assert!(m >= 1.0 && r >= 2);
    let ln_r_fact: f64 = (2..=r).map(|i| (i as f64).ln()).sum();
    (r as f64 * n.ln() - ln_r_fact - (r as f64 - 1.0) * m.ln()).exp()
}

/// Digest width (hex digits) that keeps 3-fold multicollisions below one
/// expected occurrence among `s` stored-plus-streamed values: solve
/// s^3 / (6 m^2) = 1 for m = 2^(4Q), giving kappa ~ 1.5 log2(s) bits.
pub fn choose_q(s: &BigUint) -> u32 {
    assert!(!s.is_zero());
    let kappa = 1.5 * log2_biguint(s);
    let q = (kappa / 4.0).ceil() as i64;
    q.clamp(1, 32) as u32
}

/// choose_q with s = C(b, h1) + C(b, h2) for the balanced split of ell.
pub fn choose_q_for(b: usize, ell: usize) -> u32 {
    let (h1, h2) = optimal_split(ell);
    let s = binomial(b as u64, h1 as u64) + binomial(b as u64, h2 as u64);
    choose_q(&s)
}

/// log of P(b+1, balanced split of h) / P(b, balanced split of h+1):
/// positive where growing the window beats growing the weight.
pub fn increase_ratio(n: usize, b: usize, h: usize) -> Result<f64, PlannerError> {
    if h + 1 > b {
        return Err(PlannerError::InvalidParams(format!(
            "h + 1 = {} exceeds b = {b}",
            h + 1
        )));
    }
    let (x1, y1) = optimal_split(h);
    let (x2, y2) = optimal_split(h + 1);
    let p_grow_b = success_probability(n, b + 1, x1, y1)?;
    let p_grow_h = success_probability(n, b, x2, y2)?;
    let ratio = p_grow_b / p_grow_h;
    let numer = ratio.numer().to_biguint().expect("positive");
    let denom = ratio.denom().to_biguint().expect("positive");
    Ok((log2_biguint(&numer) - log2_biguint(&denom)) * std::f64::consts::LN_2)
}

/// The planner's full answer for one parameter choice.
#[derive(Debug, Clone)]
pub struct PlanReport {
    pub n: usize,
    pub b: usize,
    pub ell: usize,
    pub h1: usize,
    pub h2: usize,
    pub q_hex: u32,
    pub probability: BigRational,
    pub probability_f64: f64,
    pub expected_iterations: f64,
    pub memory_bits: BigUint,
    pub memory_gib: f64,
    pub time: TimeEstimate,
}

/// Plans one attack: balanced split, suggested Q unless pinned, memory and
/// time estimates for the given pool shape.
#[allow(clippy::too_many_arguments)]
pub fn plan(
    n: usize,
    b: usize,
    ell: usize,
    q_hex: Option<u32>,
    element_bits: f64,
    nice: bool,
    lambda_bits: u64,
    workers: usize,
) -> Result<PlanReport, PlannerError> {
    let (h1, h2) = optimal_split(ell);
    let q = q_hex.unwrap_or_else(|| choose_q_for(b, ell));
    let probability = success_probability(n, b, h1, h2)?;
    let expected = expected_iterations(&probability)?;
    let memory_bits = memory_estimate(n, b, h1, q, element_bits, nice);
    Ok(PlanReport {
        n,
        b,
        ell,
        h1,
        h2,
        q_hex: q,
        probability_f64: rational_to_f64(&probability),
        expected_iterations: expected,
        memory_gib: memory_gib(&memory_bits),
        memory_bits,
        time: time_estimate(b, h1, h2, lambda_bits, workers),
        probability,
    })
}

/// Largest window size whose stored weight class fits the memory cap, never
/// exceeding the full partition bound.
pub fn suggest_b(n: usize, ell: usize, q_hex: u32, memory_cap_bytes: u64) -> usize {
    let cap_bits = BigUint::from(memory_cap_bytes) * 8u32;
    let max_b = (n + 1).div_ceil(2);
    let mut best = ell.min(max_b).max(1);
    for b in 1..=max_b {
        let (h1, _) = optimal_split(ell);
        let table = binomial(b as u64, h1 as u64) * (4 * q_hex as u64 + b as u64);
        if table <= cap_bits {
            best = b;
        } else {
            break;
        }
    }
    best
}
