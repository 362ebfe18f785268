//! Fractal geometry of the set of sign sequences that return forever.
//!
//! Sign words live in the metric space `d(u, v) = sum_i |u_i - v_i| / 2^i`
//! (distances are exact dyadics; `|u_i - v_i|` is 0 or 2). The sequences
//! whose walk returns to 0 infinitely often are exactly the infinite
//! concatenations of the two pattern blocks, so counting the distinct
//! length-`m` prefixes of that language gives the minimal number of
//! m-cylinders needed to cover the set — a box-counting profile whose
//! log-log slope recovers the dimension `1/(k+1)`. The same value arrives
//! independently via the Moran equation of the two-map similarity system
//! (prepend a plus block / prepend a minus block, each contracting by
//! `1/2^(k+1)`).

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::characterize::{minus_block, plus_block};
use crate::dyadic::Dyadic;
use crate::walk::{simulate_stream, Sign, SignSequence};

/// Largest prefix length counted by explicit enumeration; beyond it the
/// (cross-validated) closed form takes over.
pub const PREFIX_ENUM_CAP: usize = 40;

/// Largest `m` admitted in covering profiles: `delta_m = 2^(1-m)` must stay
/// a normal `f64`, and profiles gain nothing past a few hundred points.
pub const MAX_PROFILE_M: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FractalError {
    #[error("distance depth {depth} exceeds a word length ({len})")]
    DepthExceedsLength { depth: usize, len: usize },
    #[error("need m_max >= {needed} for a meaningful fit, got {found}")]
    MmaxTooSmall { needed: usize, found: usize },
    #[error("m_max {found} exceeds the profile limit {MAX_PROFILE_M}")]
    MmaxTooLarge { found: usize },
    #[error("self-similarity depth must be at least one block, got {found}")]
    BadDepth { found: usize },
    #[error("self-similarity at depth {m} exceeds the enumeration cap {PREFIX_ENUM_CAP}")]
    DepthTooDeep { m: usize },
    #[error("similarity ratios must lie strictly between 0 and 1, got {value}")]
    BadRatio { value: f64 },
    #[error("a similarity system needs at least two maps, got {found}")]
    TooFewRatios { found: usize },
    #[error("tolerance must be a positive finite number, got {value}")]
    BadTolerance { value: f64 },
    #[error("need at least one sample pair")]
    NoSamplePairs,
    #[error("root isolation did not reach the requested tolerance")]
    NoConvergence,
    #[error("bisection ({solver}) and the equal-ratio closed form ({closed_form}) disagree")]
    EqualRatioMismatch { solver: f64, closed_form: f64 },
}

/// `d(u, v) = sum_{i=1..depth} |u_i - v_i| / 2^i`, exactly.
///
/// Truncating at `depth` is the finite-word stand-in for the full metric:
/// two infinite extensions of `u` and `v` differ from the truncated value
/// by less than `2^(1-depth)`.
pub fn seq_distance(
    u: &SignSequence,
    v: &SignSequence,
    depth: usize,
) -> Result<Dyadic, FractalError> {
    let len = u.len().min(v.len());
    if depth > len {
        return Err(FractalError::DepthExceedsLength { depth, len });
    }
    if depth == 0 {
        return Ok(Dyadic::zero());
    }
    // Position i contributes 2^(1-i) when the signs differ; collecting the
    // bits over a common denominator 2^(depth-1) needs one normalization.
    let mut num = BigUint::zero();
    for i in 1..=depth {
        if u.sign(i) != v.sign(i) {
            num |= BigUint::one() << (depth - i);
        }
    }
    Ok(Dyadic::new(num, (depth - 1) as u32))
}

/// The set of all infinite words sharing a fixed prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cylinder {
    prefix: SignSequence,
}

impl Cylinder {
    pub fn new(prefix: SignSequence) -> Self {
        Self { prefix }
    }

    pub fn prefix(&self) -> &SignSequence {
        &self.prefix
    }

    /// Exact diameter `2^(1-m)` for a length-`m` prefix: two members agree
    /// up to `m`, so their distance is at most `sum_{i>m} 2^(1-i)`, and the
    /// bound is attained in the limit by words differing everywhere after
    /// `m`. The empty prefix gives the whole space, diameter 2.
    pub fn diameter(&self) -> Dyadic {
        match self.prefix.len() {
            0 => Dyadic::new(2u32, 0),
            m => Dyadic::half_pow((m - 1) as u32),
        }
    }

    /// Whether `word` begins with this cylinder's prefix.
    pub fn contains(&self, word: &SignSequence) -> bool {
        word.len() >= self.prefix.len()
            && word.signs()[..self.prefix.len()] == *self.prefix.signs()
    }
}

/// All length-`m` prefixes of infinite pattern-block concatenations, by
/// explicit enumeration of the block words that could generate them.
pub fn pattern_prefixes(k: usize, m: usize) -> BTreeSet<SignSequence> {
    assert!(k >= 2, "the recurrence needs k >= 2");
    assert!(
        m <= PREFIX_ENUM_CAP,
        "prefix enumeration is limited to m <= {PREFIX_ENUM_CAP}"
    );
    let width = k + 1;
    let nblocks = m.div_ceil(width);
    let blocks = [plus_block(k), minus_block(k)];
    let mut prefixes = BTreeSet::new();
    for word in 0u64..1 << nblocks {
        let mut signs: Vec<Sign> = Vec::with_capacity(m);
        for b in 0..nblocks {
            let block = &blocks[((word >> b) & 1) as usize];
            let take = (m - signs.len()).min(width);
            signs.extend_from_slice(&block.signs()[..take]);
        }
        prefixes.insert(SignSequence::new(signs));
    }
    prefixes
}

/// Number of length-`m` pattern prefixes: enumerated up to
/// [`PREFIX_ENUM_CAP`], closed form beyond.
///
/// Writing `m = q (k+1) + r`, a prefix fixes `q` whole blocks (two choices
/// each) plus, when `r >= 1`, the stub of the next block — and the two
/// stubs (`+^r` vs `-^r`, since `r <= k`) differ already at their first
/// symbol. Hence `2^q` prefixes for `r = 0` and `2^(q+1)` otherwise. The
/// two computations are compared against each other in tests over the
/// whole enumerable range.
pub fn count_pattern_prefixes(k: usize, m: usize) -> BigUint {
    if m <= PREFIX_ENUM_CAP {
        BigUint::from(pattern_prefixes(k, m).len())
    } else {
        closed_pattern_count(k, m)
    }
}

/// The `2^q` / `2^(q+1)` closed form by itself.
pub fn closed_pattern_count(k: usize, m: usize) -> BigUint {
    assert!(k >= 2, "the recurrence needs k >= 2");
    let q = m / (k + 1);
    let r = m % (k + 1);
    BigUint::one() << (q + usize::from(r > 0))
}

/// One row of a box-counting profile.
#[derive(Debug, Clone, PartialEq)]
pub struct CoveringEntry {
    pub m: usize,
    /// Number of m-cylinders meeting the set.
    pub count: BigUint,
    /// `log2(count)`, exact for power-of-two counts.
    pub log2_count: f64,
    /// Cylinder diameter `2^(1-m)`.
    pub delta: f64,
}

impl Serialize for CoveringEntry {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("CoveringEntry", 4)?;
        s.serialize_field("m", &self.m)?;
        s.serialize_field("count", &self.count.to_string())?;
        s.serialize_field("log2_count", &self.log2_count)?;
        s.serialize_field("delta", &self.delta)?;
        s.end()
    }
}

/// A box-counting profile with its least-squares dimension estimate:
/// `log2 N_m` regressed on `log2(1/delta_m) = m - 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringProfile {
    pub entries: Vec<CoveringEntry>,
    /// Fitted slope — the box-dimension estimate.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl CoveringProfile {
    pub fn dimension(&self) -> f64 {
        self.slope
    }

    /// RFC 4180 CSV with header `m,count,delta,log2_count`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,count,delta,log2_count\r\n");
        for e in &self.entries {
            out.push_str(&format!(
                "{},{},{},{}\r\n",
                e.m, e.count, e.delta, e.log2_count
            ));
        }
        out
    }
}

fn log2_biguint(n: &BigUint) -> f64 {
    assert!(!n.is_zero(), "covering counts are positive");
    if (n & (n - BigUint::one())).is_zero() {
        (n.bits() - 1) as f64
    } else {
        n.to_f64().map(f64::log2).unwrap_or(f64::INFINITY)
    }
}

fn profile_from_counts(counts: impl IntoIterator<Item = (usize, BigUint)>) -> CoveringProfile {
    let entries: Vec<CoveringEntry> = counts
        .into_iter()
        .map(|(m, count)| {
            let log2_count = log2_biguint(&count);
            CoveringEntry {
                m,
                count,
                log2_count,
                delta: 2f64.powi(1 - m as i32),
            }
        })
        .collect();
    let xs: Vec<f64> = entries.iter().map(|e| (e.m - 1) as f64).collect();
    let ys: Vec<f64> = entries.iter().map(|e| e.log2_count).collect();
    let (slope, intercept, r_squared) = linear_fit(&xs, &ys);
    CoveringProfile {
        entries,
        slope,
        intercept,
        r_squared,
    }
}

/// Ordinary least squares; returns (slope, intercept, r^2).
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, intercept, r_squared)
}

fn check_profile_range(m_max: usize, needed: usize) -> Result<(), FractalError> {
    if m_max < needed {
        return Err(FractalError::MmaxTooSmall {
            needed,
            found: m_max,
        });
    }
    if m_max > MAX_PROFILE_M {
        return Err(FractalError::MmaxTooLarge { found: m_max });
    }
    Ok(())
}

/// Box-counting profile of the always-returning set for order `k`, over
/// `m = 1 ..= m_max`. The slope estimates the dimension `1/(k+1)`; the
/// estimate tightens as `m_max` grows because the `2^q`/`2^(q+1)`
/// staircase averages out.
pub fn box_dimension_estimate(k: usize, m_max: usize) -> Result<CoveringProfile, FractalError> {
    assert!(k >= 2, "the recurrence needs k >= 2");
    check_profile_range(m_max, 2 * (k + 1))?;
    Ok(profile_from_counts(
        (1..=m_max).map(|m| (m, count_pattern_prefixes(k, m))),
    ))
}

/// Calibration profile for the full sequence space: `N_m = 2^m` exactly,
/// so the fitted slope is exactly 1 and `r^2 = 1`.
pub fn full_space_profile(m_max: usize) -> Result<CoveringProfile, FractalError> {
    check_profile_range(m_max, 2)?;
    Ok(profile_from_counts(
        (1..=m_max).map(|m| (m, BigUint::one() << m)),
    ))
}

/// Box-counting profile of the order-3 `[1, 3, 6]` walks that visit `f_1`
/// infinitely often: one forced leading `+`, then the order-3 block
/// language. `N(1) = 1` and `N(m) = ` the order-3 pattern count at `m - 1`;
/// the slope estimates the same dimension `1/4` as the order-3 zero set.
pub fn tribonacci_f1_dimension(m_max: usize) -> Result<CoveringProfile, FractalError> {
    check_profile_range(m_max, 9)?;
    Ok(profile_from_counts((1..=m_max).map(|m| {
        if m == 1 {
            (m, BigUint::one())
        } else {
            (m, count_pattern_prefixes(3, m - 1))
        }
    })))
}

/// A finite system of contracting similarity ratios.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilaritySystem {
    ratios: Vec<f64>,
}

impl SimilaritySystem {
    pub fn new(ratios: Vec<f64>) -> Result<Self, FractalError> {
        if ratios.len() < 2 {
            return Err(FractalError::TooFewRatios {
                found: ratios.len(),
            });
        }
        for &r in &ratios {
            if !r.is_finite() || r <= 0.0 || r >= 1.0 {
                return Err(FractalError::BadRatio { value: r });
            }
        }
        Ok(Self { ratios })
    }

    /// `count` copies of the same ratio.
    pub fn equal(count: usize, ratio: f64) -> Result<Self, FractalError> {
        Self::new(vec![ratio; count])
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }
}

/// Closed-form similarity dimension for `count` equal ratios:
/// `log(count) / log(1/ratio)`.
pub fn equal_ratio_dimension(count: usize, ratio: f64) -> f64 {
    assert!(count >= 1 && ratio > 0.0 && ratio < 1.0);
    (count as f64).ln() / (1.0 / ratio).ln()
}

/// Solves the Moran equation `sum_i ratio_i^s = 1` by bisection.
///
/// The left side is strictly decreasing in `s`, equals `len >= 2` at
/// `s = 0`, and tends to 0, so the root is unique; the bracket `[0, hi]`
/// is grown until it straddles the root and then halved until both the
/// bracket width and the residual drop below `tolerance`. When all ratios
/// are equal the result is cross-checked against the closed form.
pub fn moran_dimension(system: &SimilaritySystem, tolerance: f64) -> Result<f64, FractalError> {
    if !tolerance.is_finite() || tolerance <= 0.0 {
        return Err(FractalError::BadTolerance { value: tolerance });
    }
    let g = |s: f64| -> f64 { system.ratios.iter().map(|r| r.powf(s)).sum::<f64>() - 1.0 };

    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while g(hi) > 0.0 {
        hi *= 2.0;
        if hi > 1e9 {
            return Err(FractalError::NoConvergence);
        }
    }
    let mut mid = 0.5 * (lo + hi);
    let mut converged = false;
    for _ in 0..400 {
        mid = 0.5 * (lo + hi);
        if hi - lo <= tolerance && g(mid).abs() <= tolerance {
            converged = true;
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if !converged {
        return Err(FractalError::NoConvergence);
    }

    let first = system.ratios[0];
    if system.ratios.iter().all(|&r| r == first) {
        let closed = equal_ratio_dimension(system.ratios.len(), first);
        if (mid - closed).abs() > (100.0 * tolerance).max(1e-10) {
            return Err(FractalError::EqualRatioMismatch {
                solver: mid,
                closed_form: closed,
            });
        }
    }
    Ok(mid)
}

/// Outcome of checking, at a finite depth, that the always-returning set
/// is the disjoint self-similar union of its two block-prepend images.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelfSimilarityReport {
    pub k: usize,
    /// Prefix depth used: `(k+1) * depth_blocks` symbols.
    pub m: usize,
    /// Number of depth-`m` cylinders meeting the set.
    pub cylinder_count: usize,
    /// The two images together reproduce every cylinder.
    pub union_matches: bool,
    /// No cylinder lies in both images.
    pub images_disjoint: bool,
    pub contraction_pairs: usize,
    /// Every sampled pair contracted by exactly `1/2^(k+1)` under both maps.
    pub contraction_exact: bool,
}

impl SelfSimilarityReport {
    pub fn pass(&self) -> bool {
        self.union_matches && self.images_disjoint && self.contraction_exact
    }
}

const CONTRACTION_SEED_A: u64 = 0x5EED_0001;
const CONTRACTION_SEED_B: u64 = 0x5EED_0002;
const CONTRACTION_PAIRS: usize = 8;

/// Verifies the two-map self-similar structure at depth
/// `m = (k+1) * depth_blocks`:
///
/// * the depth-`m` pattern prefixes are exactly the union of (plus block +
///   shorter prefix) and (minus block + shorter prefix), disjointly;
/// * prepending either block scales sampled distances by exactly
///   `1/2^(k+1)` (sampling is seeded and deterministic).
pub fn verify_self_similarity(
    k: usize,
    depth_blocks: usize,
) -> Result<SelfSimilarityReport, FractalError> {
    assert!(k >= 2, "the recurrence needs k >= 2");
    if depth_blocks == 0 {
        return Err(FractalError::BadDepth { found: 0 });
    }
    let width = k + 1;
    let m = width * depth_blocks;
    if m > PREFIX_ENUM_CAP {
        return Err(FractalError::DepthTooDeep { m });
    }

    let full = pattern_prefixes(k, m);
    let shorter = pattern_prefixes(k, m - width);
    let image_plus: BTreeSet<SignSequence> = shorter
        .iter()
        .map(|p| p.prepend(plus_block(k).signs()))
        .collect();
    let image_minus: BTreeSet<SignSequence> = shorter
        .iter()
        .map(|p| p.prepend(minus_block(k).signs()))
        .collect();
    let union: BTreeSet<SignSequence> = image_plus.union(&image_minus).cloned().collect();
    let union_matches = union == full;
    let images_disjoint = image_plus.intersection(&image_minus).next().is_none();

    let mut contraction_exact = true;
    for pair in 0..CONTRACTION_PAIRS {
        let u = simulate_stream(m, CONTRACTION_SEED_A, pair as u64)
            .expect("m >= 3 is a valid horizon");
        let v = if pair == 0 {
            u.clone() // include the degenerate distance-0 pair
        } else {
            simulate_stream(m, CONTRACTION_SEED_B, pair as u64).expect("valid horizon")
        };
        let base = seq_distance(&u, &v, m)?;
        let expected = base.div_pow2(width as u32);
        for block in [plus_block(k), minus_block(k)] {
            let du = u.prepend(block.signs());
            let dv = v.prepend(block.signs());
            if seq_distance(&du, &dv, m + width)? != expected {
                contraction_exact = false;
            }
        }
    }

    Ok(SelfSimilarityReport {
        k,
        m,
        cylinder_count: full.len(),
        union_matches,
        images_disjoint,
        contraction_pairs: CONTRACTION_PAIRS,
        contraction_exact,
    })
}

/// Outcome of sampling the prepend map `T(w) = (+1, w)` on the order-3
/// visit set: `d(T u, T v) = d(u, v) / 2`, exactly, at finite depth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrependHalvingReport {
    pub pairs: usize,
    pub depth: usize,
    pub failures: usize,
}

impl PrependHalvingReport {
    pub fn pass(&self) -> bool {
        self.failures == 0
    }
}

/// Samples `pairs` seeded word pairs of length `depth` and checks the
/// exact distance-halving identity for the prepend map.
pub fn verify_prepend_halving(
    pairs: usize,
    depth: usize,
    seed: u64,
) -> Result<PrependHalvingReport, FractalError> {
    if pairs == 0 {
        return Err(FractalError::NoSamplePairs);
    }
    if depth == 0 {
        return Err(FractalError::DepthExceedsLength { depth: 1, len: 0 });
    }
    let mut failures = 0;
    for i in 0..pairs {
        let u = simulate_stream(depth, seed, 2 * i as u64).expect("depth >= 1");
        let v = simulate_stream(depth, seed, 2 * i as u64 + 1).expect("depth >= 1");
        let base = seq_distance(&u, &v, depth)?;
        let tu = u.prepend(&[Sign::Plus]);
        let tv = v.prepend(&[Sign::Plus]);
        if seq_distance(&tu, &tv, depth + 1)? != base.div_pow2(1) {
            failures += 1;
        }
    }
    Ok(PrependHalvingReport {
        pairs,
        depth,
        failures,
    })
}
