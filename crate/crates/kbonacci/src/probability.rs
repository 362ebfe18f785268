//! Exact return-probability laws and the oracles that check them.
//!
//! Where a closed form exists it is a dyadic rational, so the laws here are
//! returned as exact [`DyadicProb`] values. Two independent oracles keep
//! the formulas honest:
//!
//! * brute force — every sign word of a bounded prefix length is
//!   enumerated, so the resulting distribution is exact and the closed
//!   forms must match it term by term;
//! * Monte Carlo — seeded, trial-parallel simulation whose output is
//!   byte-identical across runs and thread counts, for horizons where
//!   enumeration is out of reach.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::sequence::KBonacciSpec;
use crate::walk::{mask_visit_count_big, mask_visit_count_i64, stream_rng};

/// Default bound on brute-force prefix length (2^26 sign words).
pub const DEFAULT_ENUM_CAP: usize = 26;

/// Environment variable overriding [`DEFAULT_ENUM_CAP`], e.g. on machines
/// where a longer exhaustive sweep is acceptable.
pub const ENUM_CAP_ENV: &str = "KBONACCI_ENUM_CAP";

/// Masks are 64-bit and mask counts must fit `u64`, so no cap can exceed
/// this regardless of the environment override.
const HARD_PREFIX_LIMIT: usize = 62;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProbabilityError {
    #[error("value {value} exceeds 1 and cannot be a probability")]
    NotAProbability { value: String },
    #[error("prefix length {len} exceeds the enumeration cap {cap} (set {ENUM_CAP_ENV} to raise it, up to {HARD_PREFIX_LIMIT})")]
    PrefixTooLong { len: usize, cap: usize },
    #[error("a Monte Carlo run needs at least one trial")]
    ZeroTrials,
    #[error("a Monte Carlo run needs a horizon of at least one step")]
    ZeroHorizon,
}

/// A probability with an exactly-representable dyadic value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct DyadicProb(Dyadic);

impl DyadicProb {
    pub fn new(value: Dyadic) -> Result<Self, ProbabilityError> {
        if value > Dyadic::one() {
            return Err(ProbabilityError::NotAProbability {
                value: value.to_string(),
            });
        }
        Ok(Self(value))
    }

    /// `count / 2^exp` outcomes of an enumeration.
    pub fn from_count(count: u64, exp: u32) -> Result<Self, ProbabilityError> {
        Self::new(Dyadic::new(count, exp))
    }

    pub fn zero() -> Self {
        Self(Dyadic::zero())
    }

    pub fn one() -> Self {
        Self(Dyadic::one())
    }

    pub fn as_dyadic(&self) -> &Dyadic {
        &self.0
    }

    /// `1 - p`, always well defined.
    pub fn complement(&self) -> Self {
        Self(
            Dyadic::one()
                .checked_sub(&self.0)
                .expect("probabilities never exceed 1"),
        )
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
}

impl std::fmt::Display for DyadicProb {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

fn exp_u32(e: u64) -> u32 {
    u32::try_from(e).expect("dyadic exponent exceeds u32::MAX")
}

/// `P(F_{(k+1)i} = 0) = 1 / 2^(k i)`: the chance that the walk sits at the
/// origin at the end of the `i`-th window.
///
/// Each window independently forms a pattern block with probability
/// `2 / 2^(k+1)`, and by prefix-closure being at 0 after `i` windows means
/// all `i` of them were blocks — so this also equals the probability of
/// *at least* `i` returns overall.
pub fn exact_zero_hit_prob(k: usize, i: usize) -> DyadicProb {
    assert!(k >= 2, "the recurrence needs k >= 2");
    DyadicProb(Dyadic::half_pow(exp_u32(k as u64 * i as u64)))
}

/// `P(exactly i returns to 0) = (2^k - 1) / 2^(k (i+1))`.
///
/// Differencing the at-least-`i` law gives
/// `1/2^(k i) - 1/2^(k (i+1)) = (2^k - 1)/2^(k (i+1))`; the counts form a
/// geometric law with ratio `1/2^k` and therefore sum to exactly 1.
/// For `k = 2` this is `3 / 4^(i+1)`.
pub fn exact_return_count_prob(k: usize, i: usize) -> DyadicProb {
    assert!(k >= 2, "the recurrence needs k >= 2");
    let num = (BigUint::one() << k) - BigUint::one();
    DyadicProb(Dyadic::new(num, exp_u32(k as u64 * (i as u64 + 1))))
}

/// The competing closed form `1 / 2^((k+1) i)` for the exactly-`i` law.
///
/// It arises from counting one sign word per window instead of two. The
/// brute-force oracle refutes it for every `i >= 1`, and its total mass
/// `sum_i 2^(-(k+1) i) = 2^(k+1) / (2^(k+1) - 1)` exceeds 1, so it cannot
/// be a probability law. It is exported only so that the refutation stays
/// executable; nothing else in this crate consumes it.
pub fn unnormalized_return_count_prob(k: usize, i: usize) -> DyadicProb {
    assert!(k >= 2, "the recurrence needs k >= 2");
    DyadicProb(Dyadic::half_pow(exp_u32((k as u64 + 1) * i as u64)))
}

/// For the `[1, 3, 6]` order-3 walk: `P(visit f_1 at time 4i+1 but not at
/// time 4(i+1)+1) = 7 / 2^(3i+4)`.
///
/// By the visit characterization this event is exactly "the walk visits
/// `f_1` precisely `i + 1` times": `w_1 = +1`, the first `i` windows at
/// `2, 6, ...` are blocks, and the next one is not.
pub fn tribonacci_f1_event_prob(i: usize) -> DyadicProb {
    DyadicProb(Dyadic::new(7u32, exp_u32(3 * i as u64 + 4)))
}

/// For the `[1, 3, 6]` order-3 walk: `P(exactly v visits to f_1)`.
///
/// `v = 0` has probability `1/2` (exactly when `w_1 = -1`); for `v >= 1`
/// the probability is `7 / 2^(3v+1)`. Together these sum to 1:
/// `1/2 + (7/2) * sum_{v>=1} 8^(-v) = 1/2 + 1/2`.
pub fn tribonacci_f1_visit_count_prob(v: usize) -> DyadicProb {
    if v == 0 {
        DyadicProb(Dyadic::half_pow(1))
    } else {
        DyadicProb(Dyadic::new(7u32, exp_u32(3 * v as u64 + 1)))
    }
}

/// Exact distribution of the number of visits to a target within a prefix,
/// computed by exhausting all `2^prefix_len` sign words.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnDistribution {
    pub prefix_len: usize,
    pub i_max: usize,
    /// `probs[i]` is the exact probability of exactly `i` visits within the
    /// prefix, for `i = 0..=i_max`.
    pub probs: Vec<DyadicProb>,
    /// Probability of more than `i_max` visits within the prefix.
    pub tail: DyadicProb,
}

impl ReturnDistribution {
    /// Sum of all reported mass; always exactly 1.
    pub fn total(&self) -> Dyadic {
        let body: Dyadic = self.probs.iter().map(|p| p.as_dyadic().clone()).sum();
        &body + self.tail.as_dyadic()
    }
}

/// The active enumeration cap: [`ENUM_CAP_ENV`] if set to a valid integer
/// (clamped to [`HARD_PREFIX_LIMIT`]), otherwise [`DEFAULT_ENUM_CAP`].
pub fn enum_cap() -> usize {
    std::env::var(ENUM_CAP_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .map(|c| c.min(HARD_PREFIX_LIMIT))
        .unwrap_or(DEFAULT_ENUM_CAP)
}

/// Brute-force visit-count distribution under the active [`enum_cap`].
pub fn brute_force_distribution(
    spec: &KBonacciSpec,
    target: &BigInt,
    prefix_len: usize,
    i_max: usize,
) -> Result<ReturnDistribution, ProbabilityError> {
    brute_force_distribution_with_cap(spec, target, prefix_len, i_max, enum_cap())
}

/// Brute-force visit-count distribution with an explicit cap.
///
/// Enumeration cost is `O(2^prefix_len * prefix_len)`; the cap exists so a
/// mistyped length fails fast instead of running for hours. The mask space
/// is swept in parallel, and the merge is pure `u64` addition, so results
/// are identical whatever the thread count.
pub fn brute_force_distribution_with_cap(
    spec: &KBonacciSpec,
    target: &BigInt,
    prefix_len: usize,
    i_max: usize,
    cap: usize,
) -> Result<ReturnDistribution, ProbabilityError> {
    let cap = cap.min(HARD_PREFIX_LIMIT);
    if prefix_len > cap {
        return Err(ProbabilityError::PrefixTooLong {
            len: prefix_len,
            cap,
        });
    }
    let counts = enumerate_visit_counts(spec, target, prefix_len);
    let exp = prefix_len as u32;
    let probs = (0..=i_max)
        .map(|i| DyadicProb::from_count(counts.get(i).copied().unwrap_or(0), exp))
        .collect::<Result<Vec<_>, _>>()?;
    let tail_count: u64 = counts.iter().skip(i_max + 1).sum();
    Ok(ReturnDistribution {
        prefix_len,
        i_max,
        probs,
        tail: DyadicProb::from_count(tail_count, exp)?,
    })
}

/// `counts[c]` = number of sign words of length `len` whose walk visits
/// `target` exactly `c` times. Sums to `2^len`.
fn enumerate_visit_counts(spec: &KBonacciSpec, target: &BigInt, len: usize) -> Vec<u64> {
    let table = spec.generate(len);
    let total: u64 = 1u64 << len;
    let identity = || vec![0u64; len + 1];
    let merge = |mut a: Vec<u64>, b: Vec<u64>| {
        for (x, y) in a.iter_mut().zip(b) {
            *x += y;
        }
        a
    };

    // Magnitude bound on every partial sum (and the target), to decide
    // whether the fixed-width kernel is safe.
    let bound: BigUint = table.terms()[1..]
        .iter()
        .map(|t| t.magnitude().clone())
        .sum::<BigUint>()
        + target.magnitude();

    if bound <= BigUint::from(i64::MAX as u64) {
        let terms: Vec<i64> = table
            .terms()
            .iter()
            .map(|t| i64::try_from(t).expect("bounded above by i64::MAX"))
            .collect();
        let target = i64::try_from(target).expect("bounded above by i64::MAX");
        (0..total)
            .into_par_iter()
            .fold(identity, |mut acc, mask| {
                let c = mask_visit_count_i64(&terms, len, mask, target);
                acc[c as usize] += 1;
                acc
            })
            .reduce(identity, merge)
    } else {
        (0..total)
            .into_par_iter()
            .fold(identity, |mut acc, mask| {
                let c = mask_visit_count_big(table.terms(), len, mask, target);
                acc[c as usize] += 1;
                acc
            })
            .reduce(identity, merge)
    }
}

/// One estimated frequency: `hits / trials` with its binomial standard
/// error. `index` is a visit count in `count_freqs` and a 1-based step in
/// `step_freqs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FreqEntry {
    pub index: usize,
    pub hits: u64,
    pub freq: f64,
    pub std_err: f64,
}

/// Distance between an estimate and an exact value in standard errors.
/// A zero standard error yields 0 when the values agree exactly and
/// infinity otherwise.
pub fn z_score(entry: &FreqEntry, exact: f64) -> f64 {
    if entry.std_err == 0.0 {
        if entry.freq == exact {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (entry.freq - exact) / entry.std_err
    }
}

/// Seeded Monte Carlo estimate of the visit-count distribution and the
/// per-step visit frequencies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub horizon: usize,
    pub trials: u64,
    pub seed: u64,
    /// Frequency of exactly `index` visits within the horizon, for
    /// `index = 0..=` the largest observed count.
    pub count_freqs: Vec<FreqEntry>,
    /// Frequency of `F_n == target` for each step `n = 1..=horizon`.
    pub step_freqs: Vec<FreqEntry>,
}

/// Runs `trials` independent walks of length `horizon` and tallies visits
/// to `target`.
///
/// Trial `t` draws its signs from stream `t` of `seed` — the same word the
/// single-walk [`crate::walk::simulate_stream`] would produce — so the
/// report is a pure function of `(spec, target, horizon, trials, seed)`:
/// trials may be executed on any number of threads in any order and the
/// merged tallies are identical.
pub fn monte_carlo_distribution(
    spec: &KBonacciSpec,
    target: &BigInt,
    horizon: usize,
    trials: u64,
    seed: u64,
) -> Result<MonteCarloReport, ProbabilityError> {
    if trials == 0 {
        return Err(ProbabilityError::ZeroTrials);
    }
    if horizon == 0 {
        return Err(ProbabilityError::ZeroHorizon);
    }
    let table = spec.generate(horizon);
    let bound: BigUint = table.terms()[1..]
        .iter()
        .map(|t| t.magnitude().clone())
        .sum::<BigUint>()
        + target.magnitude();

    // fold state: (visit-count tally, per-step hit tally)
    let identity = || (vec![0u64; horizon + 1], vec![0u64; horizon + 1]);
    let merge = |(mut a_counts, mut a_steps): (Vec<u64>, Vec<u64>),
                 (b_counts, b_steps): (Vec<u64>, Vec<u64>)| {
        for (x, y) in a_counts.iter_mut().zip(b_counts) {
            *x += y;
        }
        for (x, y) in a_steps.iter_mut().zip(b_steps) {
            *x += y;
        }
        (a_counts, a_steps)
    };

    let (counts, steps) = if bound <= BigUint::from(i64::MAX as u64) {
        let terms: Vec<i64> = table
            .terms()
            .iter()
            .map(|t| i64::try_from(t).expect("bounded above by i64::MAX"))
            .collect();
        let target = i64::try_from(target).expect("bounded above by i64::MAX");
        (0..trials)
            .into_par_iter()
            .fold(identity, |(mut counts, mut steps), trial| {
                let mut rng = stream_rng(seed, trial);
                let mut word = 0u64;
                let mut acc: i64 = 0;
                let mut visits = 0usize;
                for i in 0..horizon {
                    if i % 64 == 0 {
                        word = rng.next_u64();
                    }
                    if (word >> (i % 64)) & 1 == 1 {
                        acc += terms[i + 1];
                    } else {
                        acc -= terms[i + 1];
                    }
                    if acc == target {
                        visits += 1;
                        steps[i + 1] += 1;
                    }
                }
                counts[visits] += 1;
                (counts, steps)
            })
            .reduce(identity, merge)
    } else {
        (0..trials)
            .into_par_iter()
            .fold(identity, |(mut counts, mut steps), trial| {
                let mut rng = stream_rng(seed, trial);
                let mut word = 0u64;
                let mut acc = BigInt::zero();
                let mut visits = 0usize;
                for i in 0..horizon {
                    if i % 64 == 0 {
                        word = rng.next_u64();
                    }
                    if (word >> (i % 64)) & 1 == 1 {
                        acc += table.term(i + 1);
                    } else {
                        acc -= table.term(i + 1);
                    }
                    if acc == *target {
                        visits += 1;
                        steps[i + 1] += 1;
                    }
                }
                counts[visits] += 1;
                (counts, steps)
            })
            .reduce(identity, merge)
    };

    let max_count = counts
        .iter()
        .rposition(|&c| c > 0)
        .expect("at least one trial ran");
    let t = trials as f64;
    let entry = |index: usize, hits: u64| {
        let freq = hits as f64 / t;
        FreqEntry {
            index,
            hits,
            freq,
            std_err: (freq * (1.0 - freq) / t).sqrt(),
        }
    };
    Ok(MonteCarloReport {
        horizon,
        trials,
        seed,
        count_freqs: (0..=max_count).map(|c| entry(c, counts[c])).collect(),
        step_freqs: (1..=horizon).map(|n| entry(n, steps[n])).collect(),
    })
}
