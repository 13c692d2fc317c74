//! The iterated, hashed birthday solver.
//!
//! Each round samples two disjoint index windows, stores truncated digests
//! of all weight-h1 products over the first window, then streams the
//! weight-h2 candidates `c * prod(inverses)` over the second window and
//! probes the table. A digest hit is only a candidate: both exact products
//! are recomputed before anything is returned, so digest truncation affects
//! speed, never correctness.
//!
//! When the stored weight class exceeds the memory cap (by the accounting
//! `(4Q + b) * C(b, h1)` bits) it is split into rank-contiguous chunks;
//! each chunk is built and fully probed before the next.

use super::digest::{truncated_digest, DigestKind};
use super::sample::sample_windows;
use super::{AttackParams, MsppError, MsppInstance, SubsetSolution};
use crate::combinat::{binomial, colex_unrank, next_colex};
use crate::modmath::{stream_rng, ModRing};
use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::Serialize;
use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

/// The stored side of one round: truncated digests of every weight-h1
/// half-product, each mapping to the colex ranks of the patterns that
/// produced it (several on digest collision).
pub struct HalfSet {
    pub q_hex: u32,
    pub digest: DigestKind,
    map: HashMap<u128, Vec<u64>>,
}

impl HalfSet {
    pub fn entries(&self) -> usize {
        self.map.values().map(Vec::len).sum()
    }

    pub fn lookup(&self, digest: u128) -> Option<&[u64]> {
        self.map.get(&digest).map(Vec::as_slice)
    }
}

/// Per-round transcript record; the unit of the run log.
#[derive(Debug, Clone, Serialize)]
pub struct RoundStats {
    pub round: u64,
    /// RNG stream id for the round; replaying `stream_rng(seed, stream)`
    /// regenerates the same windows.
    pub stream: u64,
    pub i1_len: usize,
    pub i2_len: usize,
    pub h1: usize,
    pub h2: usize,
    pub halfset_entries: u64,
    pub chunks: u32,
    pub probes: u64,
    pub digest_matches: u64,
    pub verified: u64,
    /// Paper-accounting bits for the largest chunk held at once.
    pub est_memory_bits: u128,
    pub wall_ms: f64,
}

/// Outcome of a solver run. An empty `solutions` list is the honest Fail:
/// the iteration budget ran out, which certifies nothing about solvability.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solutions: Vec<SubsetSolution>,
    pub rounds_used: u64,
    pub found_round: Option<u64>,
    pub rounds: Vec<RoundStats>,
}

impl SolveReport {
    pub fn solution(&self) -> Option<&SubsetSolution> {
        self.solutions.first()
    }

    pub fn is_solved(&self) -> bool {
        !self.solutions.is_empty()
    }
}

/// Walks a weight class in colex rank order while maintaining the running
/// product `base * prod(elems[combo])`. Suffix products are cached, so one
/// step costs a single modular multiplication amortized.
struct ProductWalker<'a> {
    elems: &'a [BigUint],
    ring: &'a ModRing,
    combo: Vec<usize>,
    /// prods[j] = base * prod over combo[j..]; prods[h] = base.
    prods: Vec<BigUint>,
    rank: u64,
    end: u64,
}

impl<'a> ProductWalker<'a> {
    fn new(
        elems: &'a [BigUint],
        ring: &'a ModRing,
        h: usize,
        base: BigUint,
        lo: u64,
        hi: u64,
    ) -> Self {
        debug_assert!(lo < hi);
        let combo = colex_unrank(elems.len(), h, lo);
        let mut prods = vec![base; h + 1];
        for j in (0..h).rev() {
            prods[j] = ring.mul(&prods[j + 1], &elems[combo[j]]);
        }
        ProductWalker {
            elems,
            ring,
            combo,
            prods,
            rank: lo,
            end: hi,
        }
    }

    fn value(&self) -> &BigUint {
        &self.prods[0]
    }

    fn rank(&self) -> u64 {
        self.rank
    }

    fn combo(&self) -> &[usize] {
        &self.combo
    }

    fn advance(&mut self) -> bool {
        self.rank += 1;
        if self.rank >= self.end {
            return false;
        }
        let changed = next_colex(&mut self.combo, self.elems.len())
            .expect("rank range is within the weight class");
        for j in (0..=changed).rev() {
            self.prods[j] = self.ring.mul(&self.prods[j + 1], &self.elems[self.combo[j]]);
        }
        true
    }
}

fn bump_progress(counter: &AtomicU64, add: u64, enabled: bool) {
    if add == 0 {
        return;
    }
    let prev = counter.fetch_add(add, Ordering::Relaxed);
    if enabled && (prev + add) >> 22 > prev >> 22 {
        eprintln!("progress: {} probes", ((prev + add) >> 22) << 22);
    }
}

/// Splits `[lo, hi)` into up to `workers` contiguous shares.
fn partition_range(lo: u64, hi: u64, workers: usize) -> Vec<(u64, u64)> {
    let len = hi - lo;
    let workers = (workers as u64).min(len).max(1);
    let chunk = len.div_ceil(workers);
    (0..workers)
        .map(|w| {
            let s = lo + w * chunk;
            (s, (s + chunk).min(hi))
        })
        .filter(|(s, e)| s < e)
        .collect()
}

fn build_halfset(
    elems: &[BigUint],
    ring: &ModRing,
    h1: usize,
    params: &AttackParams,
    lo: u64,
    hi: u64,
) -> HalfSet {
    let ranges = partition_range(lo, hi, params.workers);
    let collect = |(wlo, whi): (u64, u64)| -> Vec<(u128, u64)> {
        let mut out = Vec::with_capacity((whi - wlo) as usize);
        let mut walker = ProductWalker::new(elems, ring, h1, BigUint::one(), wlo, whi);
        loop {
            out.push((
                truncated_digest(params.digest, walker.value(), params.q_hex),
                walker.rank(),
            ));
            if !walker.advance() {
                break;
            }
        }
        out
    };

    let shards: Vec<Vec<(u128, u64)>> = if ranges.len() == 1 {
        vec![collect(ranges[0])]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = ranges.iter().map(|&r| scope.spawn(move || collect(r))).collect();
            handles.into_iter().map(|h| h.join().expect("builder panicked")).collect()
        })
    };

    let mut map: HashMap<u128, Vec<u64>> = HashMap::with_capacity((hi - lo) as usize);
    for shard in shards {
        for (digest, rank) in shard {
            map.entry(digest).or_default().push(rank);
        }
    }
    HalfSet {
        q_hex: params.q_hex,
        digest: params.digest,
        map,
    }
}

struct ProbeOutcome {
    /// (probe rank, verified solution), per worker in ascending rank order.
    found: Vec<(u64, SubsetSolution)>,
    probes: u64,
    digest_matches: u64,
}

#[allow(clippy::too_many_arguments)]
fn probe_halfset(
    instance: &MsppInstance,
    ring: &ModRing,
    half: &HalfSet,
    i1: &[usize],
    i2: &[usize],
    u1: &[BigUint],
    u2_inv: &[BigUint],
    h1: usize,
    h2: usize,
    params: &AttackParams,
    s2: u64,
    progress: &AtomicU64,
) -> ProbeOutcome {
    let best = AtomicU64::new(u64::MAX);
    let ranges = partition_range(0, s2, params.workers);

    let scan = |(wlo, whi): (u64, u64)| -> ProbeOutcome {
        let mut out = ProbeOutcome {
            found: Vec::new(),
            probes: 0,
            digest_matches: 0,
        };
        let mut walker =
            ProductWalker::new(u2_inv, ring, h2, instance.target().clone(), wlo, whi);
        'outer: loop {
            let rank2 = walker.rank();
            if out.probes % 1024 == 0 {
                bump_progress(progress, 1024.min(out.probes), params.progress);
                // nothing past an already-verified lower rank can win
                if !params.collect_all && best.load(Ordering::Relaxed) < rank2 {
                    break;
                }
            }
            out.probes += 1;
            let value = walker.value();
            if let Some(ranks) = half.lookup(truncated_digest(params.digest, value, params.q_hex))
            {
                for &rank1 in ranks {
                    out.digest_matches += 1;
                    let combo1 = colex_unrank(u1.len(), h1, rank1);
                    let prod1 = ring.product(combo1.iter().map(|&j| &u1[j]));
                    if prod1 == *value {
                        let mut indices: Vec<usize> =
                            combo1.iter().map(|&j| i1[j]).collect();
                        indices.extend(walker.combo().iter().map(|&j| i2[j]));
                        let sol = SubsetSolution::new(instance, indices)
                            .expect("exact product match re-verifies");
                        best.fetch_min(rank2, Ordering::Relaxed);
                        out.found.push((rank2, sol));
                        if !params.collect_all {
                            break 'outer;
                        }
                    }
                }
            }
            if !walker.advance() {
                break;
            }
        }
        out
    };

    let outcomes: Vec<ProbeOutcome> = if ranges.len() == 1 {
        vec![scan(ranges[0])]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = ranges.iter().map(|&r| scope.spawn(move || scan(r))).collect();
            handles.into_iter().map(|h| h.join().expect("prober panicked")).collect()
        })
    };

    let mut merged = ProbeOutcome {
        found: Vec::new(),
        probes: 0,
        digest_matches: 0,
    };
    for o in outcomes {
        merged.found.extend(o.found);
        merged.probes += o.probes;
        merged.digest_matches += o.digest_matches;
    }
    // lowest probe rank wins; ranks are unique across workers and each
    // worker reports in ascending order, so a stable sort settles ties
    // between multiple stored patterns at the same probe rank
    merged.found.sort_by_key(|(rank2, _)| *rank2);
    merged
}

/// C(b, h) as the enumerable size of a weight class, or a budget error when
/// it cannot fit any memory cap worth talking about.
fn weight_class_size(b: usize, h: usize, per_entry_bits: u128, cap_bits: u128) -> Result<u64, MsppError> {
    let size = binomial(b as u64, h as u64);
    size.to_u64().ok_or_else(|| MsppError::BudgetExceeded {
        needed_bits: (size * per_entry_bits).to_u128().unwrap_or(u128::MAX),
        cap_bits,
    })
}

/// Runs the iterated birthday attack.
///
/// Returns the first verified solution (or, with `collect_all`, every
/// verified match from the successful round). An empty report after `iter`
/// rounds is a Fail: the search was exhausted, not the instance refuted.
pub fn ba_mspp(instance: &MsppInstance, params: &AttackParams) -> Result<SolveReport, MsppError> {
    let n_plus_1 = instance.len();
    params.validate(n_plus_1)?;
    if params.ell == 0 && !instance.target().is_one() {
        return Err(MsppError::InvalidParams(
            "weight 0 is only solvable when the target is 1".into(),
        ));
    }

    let (b1, b2) = params.window_sizes(n_plus_1);
    let ring = instance.ring();
    let cap_bits = params.memory_cap_bytes as u128 * 8;
    let per_entry_bits = (4 * params.q_hex as u128) + b1 as u128;

    let splits: Vec<(usize, usize)> = if params.sweep_splits {
        (0..=params.ell)
            .map(|h1| (h1, params.ell - h1))
            .filter(|&(h1, h2)| h1 <= b1 && h2 <= b2)
            .collect()
    } else {
        vec![(params.h1, params.h2)]
    };
    if splits.is_empty() {
        return Err(MsppError::InvalidParams(format!(
            "no feasible (h1, h2) split of {} over windows ({}, {})",
            params.ell, b1, b2
        )));
    }

    let progress = AtomicU64::new(0);
    let mut report = SolveReport {
        solutions: Vec::new(),
        rounds_used: 0,
        found_round: None,
        rounds: Vec::new(),
    };

    for round in 1..=params.iter {
        let mut rng = stream_rng(params.seed, round);
        let (i1, i2) = sample_windows(n_plus_1 - 1, b1, b2, &mut rng);
        let u1: Vec<BigUint> = i1.iter().map(|&i| ring.reduce(&instance.element(i))).collect();
        let u2: Vec<BigUint> = i2.iter().map(|&i| ring.reduce(&instance.element(i))).collect();
        let u2_inv: Vec<BigUint> = u2.iter().map(|x| ring.inv(x)).collect::<Result<_, _>>()?;
        report.rounds_used = round;

        let mut round_winners: Vec<(u64, SubsetSolution)> = Vec::new();
        for &(h1, h2) in &splits {
            let started = Instant::now();
            let s1 = weight_class_size(b1, h1, per_entry_bits, cap_bits)?;
            let s2 = weight_class_size(b2, h2, per_entry_bits, cap_bits)?;
            let full_bits = s1 as u128 * per_entry_bits;
            let chunk_len = if full_bits > cap_bits {
                ((cap_bits / per_entry_bits) as u64).max(1)
            } else {
                s1
            };

            let mut stats = RoundStats {
                round,
                stream: round,
                i1_len: b1,
                i2_len: b2,
                h1,
                h2,
                halfset_entries: 0,
                chunks: s1.div_ceil(chunk_len) as u32,
                probes: 0,
                digest_matches: 0,
                verified: 0,
                est_memory_bits: (chunk_len.min(s1) as u128) * per_entry_bits,
                wall_ms: 0.0,
            };

            let mut lo = 0u64;
            while lo < s1 {
                let hi = (lo + chunk_len).min(s1);
                let half = build_halfset(&u1, &ring, h1, params, lo, hi);
                stats.halfset_entries += hi - lo;
                let outcome = probe_halfset(
                    instance, &ring, &half, &i1, &i2, &u1, &u2_inv, h1, h2, params, s2,
                    &progress,
                );
                stats.probes += outcome.probes;
                stats.digest_matches += outcome.digest_matches;
                if !outcome.found.is_empty() {
                    round_winners.extend(outcome.found);
                    if !params.collect_all {
                        break;
                    }
                }
                lo = hi;
            }

            stats.verified = round_winners.len() as u64;
            stats.wall_ms = started.elapsed().as_secs_f64() * 1e3;
            report.rounds.push(stats);
            if !round_winners.is_empty() && !params.collect_all {
                break;
            }
        }

        if !round_winners.is_empty() {
            report.found_round = Some(round);
            if params.collect_all {
                report.solutions = round_winners.into_iter().map(|(_, s)| s).collect();
            } else {
                report.solutions = vec![round_winners.swap_remove(0).1];
            }
            return Ok(report);
        }
    }
    Ok(report)
}
