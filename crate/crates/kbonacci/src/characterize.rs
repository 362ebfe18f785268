//! Combinatorial characterization of when a walk revisits its targets.
//!
//! The recurrence makes two sign windows of length `k+1` special:
//!
//! * the *plus block* `+ + ... + -` (k plus signs, then a minus), and
//! * the *minus block* `- - ... - +` (its negation).
//!
//! Over any window `p ..= p+k` the recurrence gives
//! `f_p + f_{p+1} + ... + f_{p+k-1} - f_{p+k} = 0`, so a walk whose signs
//! form a plus or minus block there gains exactly nothing across the
//! window. Conversely (for starts satisfying the start condition and the
//! growth bounds) a non-block window moves the walk too far to come back:
//! returns to 0 can happen only at multiples of `k+1`, and only while
//! every length-`k+1` window so far is a block. This module turns those
//! statements into executable predictions that the `probability` oracles
//! check exhaustively.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::sequence::KBonacciSpec;
use crate::walk::{partial_sums, Sign, SignSequence};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharacterizeError {
    #[error("a sign window must have length k+1 >= 3, got {found}")]
    WindowTooShort { found: usize },
    #[error("window start p must be at least 1, got {found}")]
    BadStartIndex { found: usize },
    #[error("need at least {needed} signs to cover the window at p={p}, got {found}")]
    NotEnoughSigns { p: usize, needed: usize, found: usize },
    #[error("the window at p={p} is a pattern block; the bound applies to non-block windows")]
    PatternWindow { p: usize },
}

/// Classification of a length-`k+1` sign window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlockPattern {
    /// `+^k -`
    Plus,
    /// `-^k +`
    Minus,
    /// Anything else.
    None,
}

impl BlockPattern {
    pub fn is_block(self) -> bool {
        self != BlockPattern::None
    }
}

/// The plus block of order `k`: `k` plus signs followed by one minus.
pub fn plus_block(k: usize) -> SignSequence {
    assert!(k >= 2, "blocks are defined for k >= 2");
    let mut signs = vec![Sign::Plus; k];
    signs.push(Sign::Minus);
    SignSequence::new(signs)
}

/// The minus block of order `k`: `k` minus signs followed by one plus.
pub fn minus_block(k: usize) -> SignSequence {
    assert!(k >= 2, "blocks are defined for k >= 2");
    let mut signs = vec![Sign::Minus; k];
    signs.push(Sign::Plus);
    SignSequence::new(signs)
}

/// Classifies a window of length `k+1` (so `k` is implied by the slice).
pub fn classify_block(window: &[Sign]) -> Result<BlockPattern, CharacterizeError> {
    if window.len() < 3 {
        return Err(CharacterizeError::WindowTooShort {
            found: window.len(),
        });
    }
    let (body, last) = window.split_at(window.len() - 1);
    let pattern = if body.iter().all(|&s| s == Sign::Plus) && last[0] == Sign::Minus {
        BlockPattern::Plus
    } else if body.iter().all(|&s| s == Sign::Minus) && last[0] == Sign::Plus {
        BlockPattern::Minus
    } else {
        BlockPattern::None
    };
    Ok(pattern)
}

fn is_block(window: &[Sign]) -> bool {
    matches!(
        classify_block(window),
        Ok(BlockPattern::Plus) | Ok(BlockPattern::Minus)
    )
}

/// Decomposition `n = (k+1) m + t` with `0 <= t <= k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Residue {
    pub n: usize,
    pub k: usize,
    /// Number of complete length-`k+1` windows before step `n`.
    pub m: usize,
    /// Offset of `n` inside its window.
    pub t: usize,
}

/// Splits a step index by window length `k+1`. Returns to the origin can
/// only occur at `t = 0`.
pub fn residue(n: usize, k: usize) -> Residue {
    assert!(n >= 1, "step indices are 1-based");
    assert!(k >= 2, "the recurrence needs k >= 2");
    Residue {
        n,
        k,
        m: n / (k + 1),
        t: n % (k + 1),
    }
}

/// The times `n <= signs.len()` at which a walk with these signs returns to
/// 0, as predicted by block structure alone: `n = (k+1) m` where the first
/// `m` windows (starting at `1, k+2, 2k+3, ...`) are all pattern blocks.
///
/// The run is prefix-closed — the first non-block window ends the
/// predicted visit set for good.
pub fn predicted_zero_times(signs: &SignSequence, k: usize) -> Vec<usize> {
    assert!(k >= 2, "the recurrence needs k >= 2");
    let width = k + 1;
    let mut times = Vec::new();
    let mut start = 1usize; // 1-based start of the next window
    while start + k <= signs.len() {
        if !is_block(&signs.signs()[start - 1..start + k]) {
            break;
        }
        times.push(start + k);
        start += width;
    }
    times
}

/// The times at which the order-3 walk with the `[1, 3, 6]` start visits
/// `f_1`, predicted from block structure alone.
///
/// The candidate times are `1, 5, 9, ...` (that is, `n ≡ 1 (mod 4)`): a
/// visit at `n = 1` requires `w_1 = +1`, and each later candidate `4m + 1`
/// additionally requires the `m` windows starting at `2, 6, ..., 4m - 2`
/// to be pattern blocks. With `w_1 = -1` there are no visits to `f_1` at
/// all (the mirror walk visits `-f_1`; see
/// [`predicted_neg_f1_times_tribonacci`]). Scaling the start by a constant
/// scales the target identically, so the prediction holds for any
/// `[c, 3c, 6c]` start with target `c`.
pub fn predicted_f1_times_tribonacci(signs: &SignSequence) -> Vec<usize> {
    if signs.is_empty() || signs.sign(1) == Sign::Minus {
        return Vec::new();
    }
    let mut times = vec![1];
    let mut start = 2usize; // windows sit at 2, 6, 10, ... each of length 4
    while start + 3 <= signs.len() {
        if !is_block(&signs.signs()[start - 1..start + 3]) {
            break;
        }
        times.push(start + 3);
        start += 4;
    }
    times
}

/// Mirror of [`predicted_f1_times_tribonacci`]: visits to `-f_1`, which
/// require `w_1 = -1`. Negating every sign negates every partial sum, so
/// this is exactly the plus-target prediction applied to the flipped word.
pub fn predicted_neg_f1_times_tribonacci(signs: &SignSequence) -> Vec<usize> {
    predicted_f1_times_tribonacci(&signs.flipped())
}

/// Quantitative form of "non-block windows escape": the window sum and the
/// walk value it forces, with the bounds they are expected to satisfy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindowBoundReport {
    pub p: usize,
    pub k: usize,
    /// `|w_p f_p + ... + w_{p+k} f_{p+k}|`, as a decimal string.
    pub window_sum_abs: String,
    /// `2 f_p`, the claimed lower bound on the window sum.
    pub threshold: String,
    pub window_bound_holds: bool,
    /// `|F_{p+k}|` for the walk that is at 0 just before the window
    /// (i.e. the window preceded by `p-1` signs summing to zero is modeled
    /// by evaluating the partial sum of the given word at `p+k`).
    pub walk_value_abs: String,
    pub walk_bound_holds: bool,
}

impl WindowBoundReport {
    pub fn pass(&self) -> bool {
        self.window_bound_holds && self.walk_bound_holds
    }
}

/// Checks the escape bounds for the non-block window at `p`:
/// `|sum_{j=p..p+k} w_j f_j| >= 2 f_p` and `|F_{p+k}| > 1`.
///
/// Errors if the signs do not cover the window or if the window is a
/// pattern block (the bounds are claims about non-block windows only).
pub fn nonpattern_window_bounds(
    spec: &KBonacciSpec,
    signs: &SignSequence,
    p: usize,
) -> Result<WindowBoundReport, CharacterizeError> {
    let k = spec.order();
    if p < 1 {
        return Err(CharacterizeError::BadStartIndex { found: p });
    }
    if signs.len() < p + k {
        return Err(CharacterizeError::NotEnoughSigns {
            p,
            needed: p + k,
            found: signs.len(),
        });
    }
    let window = &signs.signs()[p - 1..p + k];
    if classify_block(window)?.is_block() {
        return Err(CharacterizeError::PatternWindow { p });
    }

    let table = spec.generate(p + k);
    let mut window_sum = BigInt::zero();
    for (offset, sign) in window.iter().enumerate() {
        match sign {
            Sign::Plus => window_sum += table.term(p + offset),
            Sign::Minus => window_sum -= table.term(p + offset),
        }
    }
    let threshold: BigInt = table.term(p) * 2;
    let walk_value = partial_sums(spec, signs).sum_at(p + k).clone();

    let window_sum_abs = window_sum.abs();
    let walk_value_abs = walk_value.abs();
    Ok(WindowBoundReport {
        p,
        k,
        window_bound_holds: window_sum_abs >= threshold,
        walk_bound_holds: walk_value_abs > BigInt::one(),
        window_sum_abs: window_sum_abs.to_string(),
        threshold: threshold.to_string(),
        walk_value_abs: walk_value_abs.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::partial_sums;
    use num_bigint::BigInt;

    #[test]
    fn blocks_have_the_advertised_shape() {
        assert_eq!(plus_block(2).to_string(), "++-");
        assert_eq!(minus_block(2).to_string(), "--+");
        assert_eq!(plus_block(4).to_string(), "++++-");
        assert_eq!(minus_block(4).to_string(), "----+");
    }

    #[test]
    fn classification_matches_shape() {
        let class = |s: &str| classify_block(s.parse::<SignSequence>().unwrap().signs()).unwrap();
        assert_eq!(class("++-"), BlockPattern::Plus);
        assert_eq!(class("--+"), BlockPattern::Minus);
        assert_eq!(class("+-+"), BlockPattern::None);
        assert_eq!(class("+++"), BlockPattern::None);
        assert_eq!(class("---+"), BlockPattern::Minus);
        assert!(classify_block(&[Sign::Plus, Sign::Minus]).is_err());
    }

    #[test]
    fn blocks_sum_to_zero_against_every_spec() {
        // The defining identity: over a block window the signed terms cancel.
        for spec in [
            KBonacciSpec::powers(2).unwrap(),
            KBonacciSpec::powers(4).unwrap(),
            KBonacciSpec::tribonacci(),
        ] {
            let k = spec.order();
            for p in 1..=8 {
                let table = spec.generate(p + k);
                for block in [plus_block(k), minus_block(k)] {
                    let mut sum = BigInt::from(0);
                    for (offset, sign) in block.signs().iter().enumerate() {
                        sum += table.term(p + offset) * sign.value();
                    }
                    assert_eq!(sum, BigInt::from(0), "k={k}, p={p}, block={block}");
                }
            }
        }
    }

    #[test]
    fn residue_decomposition() {
        let r = residue(7, 2);
        assert_eq!((r.m, r.t), (2, 1));
        let r = residue(6, 2);
        assert_eq!((r.m, r.t), (2, 0));
        let r = residue(9, 3);
        assert_eq!((r.m, r.t), (2, 1));
    }

    #[test]
    fn zero_time_prediction_is_prefix_closed() {
        let k = 2;
        let pred = |s: &str| predicted_zero_times(&s.parse().unwrap(), k);
        assert_eq!(pred("++-++-"), vec![3, 6]);
        assert_eq!(pred("++-+--"), vec![3]);
        assert_eq!(pred("--+++-"), vec![3, 6]);
        // A broken first window hides a later pattern window for good.
        assert_eq!(pred("+-+++-"), Vec::<usize>::new());
        assert_eq!(pred("++"), Vec::<usize>::new());
    }

    #[test]
    fn zero_time_prediction_matches_walks_exhaustively_small() {
        // Every sign word of length 8 for the k=2 powers start.
        let spec = KBonacciSpec::powers(2).unwrap();
        let zero = BigInt::from(0);
        for mask in 0u64..1 << 8 {
            let signs = SignSequence::from_mask(mask, 8).unwrap();
            let actual = partial_sums(&spec, &signs).visit_times(&zero);
            let predicted = predicted_zero_times(&signs, 2);
            assert_eq!(actual, predicted, "mask {mask:#010b}");
        }
    }

    #[test]
    fn f1_prediction_matches_walks_exhaustively_small() {
        // Every sign word of length 9 for the [1, 3, 6] start, both targets.
        let spec = KBonacciSpec::tribonacci();
        let plus_one = BigInt::from(1);
        let minus_one = BigInt::from(-1);
        for mask in 0u64..1 << 9 {
            let signs = SignSequence::from_mask(mask, 9).unwrap();
            let trace = partial_sums(&spec, &signs);
            assert_eq!(
                trace.visit_times(&plus_one),
                predicted_f1_times_tribonacci(&signs),
                "target +1, mask {mask:#011b}"
            );
            assert_eq!(
                trace.visit_times(&minus_one),
                predicted_neg_f1_times_tribonacci(&signs),
                "target -1, mask {mask:#011b}"
            );
        }
    }

    #[test]
    fn f1_prediction_requires_a_leading_plus() {
        assert_eq!(
            predicted_f1_times_tribonacci(&"+".parse().unwrap()),
            vec![1]
        );
        assert_eq!(
            predicted_f1_times_tribonacci(&"-+++-".parse().unwrap()),
            Vec::<usize>::new()
        );
        assert_eq!(
            predicted_f1_times_tribonacci(&"++++----+".parse().unwrap()),
            vec![1, 5, 9]
        );
    }

    #[test]
    fn window_bounds_hold_on_a_nonblock_window() {
        // k=2 powers, window "+-+" at p=1: |f_1 - f_2 + f_3| = 2 = 2 f_1,
        // and F_3 = 2 > 1.
        let spec = KBonacciSpec::powers(2).unwrap();
        let report = nonpattern_window_bounds(&spec, &"+-+".parse().unwrap(), 1).unwrap();
        assert!(report.pass());
        assert_eq!(report.window_sum_abs, "2");
        assert_eq!(report.threshold, "2");
        assert_eq!(report.walk_value_abs, "2");
    }

    #[test]
    fn window_bounds_reject_blocks_and_short_words() {
        let spec = KBonacciSpec::powers(2).unwrap();
        assert_eq!(
            nonpattern_window_bounds(&spec, &"++-".parse().unwrap(), 1),
            Err(CharacterizeError::PatternWindow { p: 1 })
        );
        assert_eq!(
            nonpattern_window_bounds(&spec, &"++".parse().unwrap(), 1),
            Err(CharacterizeError::NotEnoughSigns {
                p: 1,
                needed: 3,
                found: 2
            })
        );
        assert_eq!(
            nonpattern_window_bounds(&spec, &"+-+".parse().unwrap(), 0),
            Err(CharacterizeError::BadStartIndex { found: 0 })
        );
    }
}
