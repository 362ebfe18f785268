//! Walks `F_n = w_1 f_1 + w_2 f_2 + ... + w_n f_n` with signs `w_j = ±1`.
//!
//! Three ways to produce the signs — parsing a `+`/`-` string, decoding a
//! bit mask (for exhaustive enumeration), and a seeded deterministic
//! generator (for Monte Carlo) — all feed the same exact partial-sum core.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::sequence::{KBonacciSpec, SequenceTable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WalkError {
    #[error("sign strings use only '+' and '-'; found {found:?} at position {position}")]
    InvalidSignChar { position: usize, found: char },
    #[error("bit masks address at most 64 steps, got length {len}")]
    MaskTooLong { len: usize },
    #[error("a walk needs a horizon of at least one step")]
    ZeroHorizon,
}

/// One step direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// A finite sign word `w_1 w_2 ... w_n`. Positions are 1-based throughout
/// the public API, matching the index of the sequence term each sign
/// multiplies.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignSequence(Vec<Sign>);

impl SignSequence {
    pub fn new(signs: Vec<Sign>) -> Self {
        Self(signs)
    }

    /// Decodes `len <= 64` signs from a mask: bit `n-1` set means
    /// `w_n = +1`. Masks `0..2^len` thus enumerate all sign words.
    pub fn from_mask(mask: u64, len: usize) -> Result<Self, WalkError> {
        if len > 64 {
            return Err(WalkError::MaskTooLong { len });
        }
        let signs = (0..len)
            .map(|i| {
                if (mask >> i) & 1 == 1 {
                    Sign::Plus
                } else {
                    Sign::Minus
                }
            })
            .collect();
        Ok(Self(signs))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `w_n` (1-based). Panics if `n` is out of range.
    pub fn sign(&self, n: usize) -> Sign {
        self.0[n - 1]
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    /// The word with every sign negated.
    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|s| s.flipped()).collect())
    }

    /// `prefix` followed by `self`.
    pub fn prepend(&self, prefix: &[Sign]) -> Self {
        let mut signs = Vec::with_capacity(prefix.len() + self.0.len());
        signs.extend_from_slice(prefix);
        signs.extend_from_slice(&self.0);
        Self(signs)
    }
}

impl FromStr for SignSequence {
    type Err = WalkError;

    fn from_str(s: &str) -> Result<Self, WalkError> {
        s.chars()
            .enumerate()
            .map(|(i, c)| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                found => Err(WalkError::InvalidSignChar {
                    position: i + 1,
                    found,
                }),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self)
    }
}

impl fmt::Display for SignSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.as_char())?;
        }
        Ok(())
    }
}

/// A walk evaluated against a spec: the signs plus every exact partial sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkTrace {
    spec: KBonacciSpec,
    signs: SignSequence,
    sums: Vec<BigInt>,
}

impl WalkTrace {
    pub fn spec(&self) -> &KBonacciSpec {
        &self.spec
    }

    pub fn signs(&self) -> &SignSequence {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    /// `F_n = sum_{j<=n} w_j f_j` (1-based). Panics if `n` is out of range.
    pub fn sum_at(&self, n: usize) -> &BigInt {
        &self.sums[n - 1]
    }

    /// All partial sums; `sums()[i]` is `F_{i+1}`.
    pub fn sums(&self) -> &[BigInt] {
        &self.sums
    }

    /// The 1-based times `n` with `F_n == target`, in increasing order.
    pub fn visit_times(&self, target: &BigInt) -> Vec<usize> {
        self.sums
            .iter()
            .enumerate()
            .filter(|(_, s)| *s == target)
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn visit_count(&self, target: &BigInt) -> usize {
        self.sums.iter().filter(|s| *s == target).count()
    }

    /// RFC 4180 CSV with header `n,w_n,F_n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,w_n,F_n\r\n");
        for n in 1..=self.len() {
            out.push_str(&format!(
                "{n},{},{}\r\n",
                self.signs.sign(n).as_char(),
                self.sum_at(n)
            ));
        }
        out
    }
}

impl Serialize for WalkTrace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("WalkTrace", 4)?;
        s.serialize_field("k", &self.spec.order())?;
        s.serialize_field("init", self.spec.init())?;
        s.serialize_field("signs", &self.signs.to_string())?;
        let sums: Vec<String> = self.sums.iter().map(|x| x.to_string()).collect();
        s.serialize_field("sums", &sums)?;
        s.end()
    }
}

/// Evaluates all partial sums of `signs` against `spec`, exactly.
pub fn partial_sums(spec: &KBonacciSpec, signs: &SignSequence) -> WalkTrace {
    let table = spec.generate(signs.len());
    let mut sums = Vec::with_capacity(signs.len());
    let mut acc = BigInt::zero();
    for n in 1..=signs.len() {
        match signs.sign(n) {
            Sign::Plus => acc += table.term(n),
            Sign::Minus => acc -= table.term(n),
        }
        sums.push(acc.clone());
    }
    WalkTrace {
        spec: spec.clone(),
        signs: signs.clone(),
        sums,
    }
}

/// How many of the first `len` partial sums of the mask-encoded walk equal
/// `target`. Exact (arbitrary precision); the mask convention matches
/// [`SignSequence::from_mask`].
pub fn mask_visit_count(
    table: &SequenceTable,
    len: usize,
    mask: u64,
    target: &BigInt,
) -> Result<usize, WalkError> {
    if len > 64 {
        return Err(WalkError::MaskTooLong { len });
    }
    assert!(
        table.n_max() >= len,
        "sequence table too short: need f_0..f_{len}"
    );
    Ok(mask_visit_count_big(table.terms(), len, mask, target) as usize)
}

/// Hot-loop kernel over an `i64` term table (1-based: `terms[n] = f_n`).
/// Callers must have checked that no partial sum can overflow.
pub(crate) fn mask_visit_count_i64(terms: &[i64], len: usize, mask: u64, target: i64) -> u32 {
    let mut acc: i64 = 0;
    let mut count = 0u32;
    for (n, &term) in terms.iter().enumerate().take(len + 1).skip(1) {
        if (mask >> (n - 1)) & 1 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
        if acc == target {
            count += 1;
        }
    }
    count
}

/// Arbitrary-precision twin of [`mask_visit_count_i64`].
pub(crate) fn mask_visit_count_big(
    terms: &[BigInt],
    len: usize,
    mask: u64,
    target: &BigInt,
) -> u32 {
    let mut acc = BigInt::zero();
    let mut count = 0u32;
    for (n, term) in terms.iter().enumerate().take(len + 1).skip(1) {
        if (mask >> (n - 1)) & 1 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
        if acc == *target {
            count += 1;
        }
    }
    count
}

/// The seeded generator behind [`simulate_stream`]: ChaCha8 keyed by
/// `seed`, positioned on stream `stream`. Distinct streams of one seed are
/// independent, which gives Monte Carlo runs a per-trial substream that is
/// reproducible regardless of thread scheduling.
pub(crate) fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws `horizon` fair signs from stream `stream` of `seed`.
///
/// Bit mapping (fixed so outputs are reproducible across versions and
/// platforms): step `n` uses bit `(n-1) mod 64` of the `floor((n-1)/64)`-th
/// `next_u64()` word; a set bit means `+1`.
pub fn simulate_stream(horizon: usize, seed: u64, stream: u64) -> Result<SignSequence, WalkError> {
    if horizon == 0 {
        return Err(WalkError::ZeroHorizon);
    }
    let mut rng = stream_rng(seed, stream);
    let mut signs = Vec::with_capacity(horizon);
    let mut word = 0u64;
    for i in 0..horizon {
        if i % 64 == 0 {
            word = rng.next_u64();
        }
        signs.push(if (word >> (i % 64)) & 1 == 1 {
            Sign::Plus
        } else {
            Sign::Minus
        });
    }
    Ok(SignSequence(signs))
}

/// Draws `horizon` fair signs from `seed` (stream 0).
pub fn simulate(horizon: usize, seed: u64) -> Result<SignSequence, WalkError> {
    simulate_stream(horizon, seed, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_roundtrip() {
        let s: SignSequence = "++-+-".parse().unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s.sign(1), Sign::Plus);
        assert_eq!(s.sign(3), Sign::Minus);
        assert_eq!(s.to_string(), "++-+-");
    }

    #[test]
    fn parse_rejects_stray_characters() {
        let err = "++x-".parse::<SignSequence>().unwrap_err();
        assert_eq!(
            err,
            WalkError::InvalidSignChar {
                position: 3,
                found: 'x'
            }
        );
    }

    #[test]
    fn mask_decoding_is_lsb_first() {
        let s = SignSequence::from_mask(0b01, 2).unwrap();
        assert_eq!(s.to_string(), "+-");
        let t = SignSequence::from_mask(0b110, 3).unwrap();
        assert_eq!(t.to_string(), "-++");
        assert!(SignSequence::from_mask(0, 65).is_err());
    }

    #[test]
    fn partial_sums_match_hand_computation() {
        // k=2 powers: f = 1, 2, 3, 5; signs ++-+ give 1, 3, 0, 5.
        let spec = KBonacciSpec::powers(2).unwrap();
        let trace = partial_sums(&spec, &"++-+".parse().unwrap());
        let sums: Vec<i64> = trace.sums().iter().map(|s| i64::try_from(s).unwrap()).collect();
        assert_eq!(sums, vec![1, 3, 0, 5]);
        assert_eq!(trace.visit_times(&BigInt::zero()), vec![3]);
        assert_eq!(trace.visit_count(&BigInt::zero()), 1);
    }

    #[test]
    fn flipping_signs_negates_every_partial_sum() {
        let spec = KBonacciSpec::tribonacci();
        let signs: SignSequence = "+-++--".parse().unwrap();
        let trace = partial_sums(&spec, &signs);
        let flipped = partial_sums(&spec, &signs.flipped());
        for n in 1..=signs.len() {
            assert_eq!(trace.sum_at(n).clone(), -flipped.sum_at(n).clone());
        }
    }

    #[test]
    fn mask_kernels_agree_with_the_direct_path() {
        let spec = KBonacciSpec::powers(3).unwrap();
        let len = 10;
        let table = spec.generate(len);
        let target = BigInt::zero();
        for mask in [0u64, 1, 0b1011001, 0x3ff, 0x2aa] {
            let signs = SignSequence::from_mask(mask, len).unwrap();
            let direct = partial_sums(&spec, &signs).visit_count(&target);
            let via_mask = mask_visit_count(&table, len, mask, &target).unwrap();
            assert_eq!(direct, via_mask, "mismatch at mask {mask:#b}");
        }
    }

    #[test]
    fn simulation_is_deterministic_per_seed_and_stream() {
        let a = simulate(100, 42).unwrap();
        let b = simulate(100, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 100);
        let c = simulate(100, 43).unwrap();
        let d = simulate_stream(100, 42, 1).unwrap();
        assert_ne!(a, c);
        assert_ne!(a, d);
        assert_eq!(simulate(0, 42), Err(WalkError::ZeroHorizon));
    }

    #[test]
    fn longer_simulation_extends_shorter_one() {
        // The word-by-word bit mapping makes prefixes stable in the horizon.
        let short = simulate(70, 7).unwrap();
        let long = simulate(200, 7).unwrap();
        assert_eq!(&long.signs()[..70], short.signs());
    }

    #[test]
    fn prepend_builds_composite_words() {
        let tail: SignSequence = "-+".parse().unwrap();
        let composite = tail.prepend(&[Sign::Plus, Sign::Plus]);
        assert_eq!(composite.to_string(), "++-+");
    }

    #[test]
    fn trace_csv_has_expected_shape() {
        let spec = KBonacciSpec::powers(2).unwrap();
        let trace = partial_sums(&spec, &"+-".parse().unwrap());
        assert_eq!(trace.to_csv(), "n,w_n,F_n\r\n1,+,1\r\n2,-,-1\r\n");
    }
}
