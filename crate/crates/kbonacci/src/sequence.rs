//! Generalized Fibonacci ("k-bonacci") step sequences.
//!
//! A spec fixes an order `k >= 2` and initial terms `f_1, ..., f_k`; the
//! sequence continues with `f_n = f_{n-1} + ... + f_{n-k}` and `f_0 = 0`.
//! Walks built on such a sequence only admit the return analysis implemented
//! by the sibling modules when the initial terms satisfy the *start
//! condition*: no signed partial sum `±f_1 ± f_2 ± ... ± f_n` vanishes for
//! `n <= k`. The classical Fibonacci start `[1, 1]` fails it (`f_1 - f_2 =
//! 0`), which is exactly why walks here use `[1, 2]` instead.

use std::fmt;

use num_bigint::BigInt;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Largest order accepted by the validating constructors. Start-condition
/// validation enumerates up to `2^(k+1)` sign vectors, so unbounded `k`
/// would make construction arbitrarily slow.
pub const MAX_VALIDATED_ORDER: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("order k={k} is too small; the recurrence needs k >= 2")]
    OrderTooSmall { k: usize },
    #[error("order k={k} exceeds the validation limit {MAX_VALIDATED_ORDER}")]
    OrderTooLarge { k: usize },
    #[error("expected {expected} initial terms for order k={expected}, got {found}")]
    InitLengthMismatch { expected: usize, found: usize },
    #[error("initial term f_{index} is zero; every initial term must be nonzero")]
    ZeroInitTerm { index: usize },
    #[error(
        "start condition fails: signed partial sum vanishes at n={n} with signs \"{signs}\""
    )]
    SignedSumVanishes { n: usize, signs: String },
    #[error("need n_max >= {needed} to check the growth bounds, got {found}")]
    RangeTooShort { needed: usize, found: usize },
}

/// Order plus initial terms of a k-bonacci sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KBonacciSpec {
    k: usize,
    init: Vec<i64>,
}

impl KBonacciSpec {
    /// Validates and builds a spec.
    ///
    /// Rejects `k < 2`, `k > MAX_VALIDATED_ORDER`, a wrong number of initial
    /// terms, zero initial terms, and any violation of the start condition.
    /// The start-condition search reports the smallest failing `n` and, for
    /// that `n`, the lexicographically first sign vector (`+` before `-`).
    pub fn new(k: usize, init: Vec<i64>) -> Result<Self, SpecError> {
        check_order(k)?;
        if init.len() != k {
            return Err(SpecError::InitLengthMismatch {
                expected: k,
                found: init.len(),
            });
        }
        if let Some(j) = init.iter().position(|&f| f == 0) {
            // A zero term never contributes to a signed sum, so the
            // cancellation search below could not distinguish its signs;
            // reject it outright.
            return Err(SpecError::ZeroInitTerm { index: j + 1 });
        }
        if let Some((n, signs)) = first_sign_cancellation(&init) {
            return Err(SpecError::SignedSumVanishes { n, signs });
        }
        Ok(Self { k, init })
    }

    /// Builds a spec without the start-condition check.
    ///
    /// Intended for counterexample studies: it lets a caller construct a
    /// start like `[1, 1]` and watch the return characterizations break.
    pub fn new_unchecked(k: usize, init: Vec<i64>) -> Self {
        assert!(k >= 1, "order must be at least 1");
        assert_eq!(init.len(), k, "need exactly k initial terms");
        Self { k, init }
    }

    /// The canonical start `f_n = 2^(n-1)` for `n = 1..k`.
    ///
    /// It always satisfies the start condition: in any signed sum the
    /// largest term dominates the rest (`2^(n-1) > 2^(n-2) + ... + 1`),
    /// so the sum cannot vanish. Validation is therefore skipped.
    pub fn powers(k: usize) -> Result<Self, SpecError> {
        check_order(k)?;
        let init = (0..k).map(|j| 1i64 << j).collect();
        Ok(Self { k, init })
    }

    /// The order-3 walk with start `[1, 3, 6]`, whose visits to `f_1 = 1`
    /// have a closed-form law. See the `characterize` and `probability`
    /// modules.
    pub fn tribonacci() -> Self {
        Self::new(3, vec![1, 3, 6]).expect("start [1, 3, 6] satisfies the start condition")
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn init(&self) -> &[i64] {
        &self.init
    }

    /// First term `f_1`, the target with a closed-form visit law for the
    /// `[1, 3, 6]` walk.
    pub fn f1(&self) -> i64 {
        self.init[0]
    }

    /// Generates `f_0, f_1, ..., f_{n_max}` (inclusive).
    pub fn generate(&self, n_max: usize) -> SequenceTable {
        let mut terms: Vec<BigInt> = Vec::with_capacity(n_max + 1);
        terms.push(BigInt::from(0));
        for n in 1..=n_max.min(self.k) {
            terms.push(BigInt::from(self.init[n - 1]));
        }
        if n_max > self.k {
            // Rolling window sum of the previous k terms.
            let mut window: BigInt = terms[1..].iter().sum();
            for n in self.k + 1..=n_max {
                let next = window.clone();
                window += &next;
                window -= &terms[n - self.k];
                terms.push(next);
            }
        }
        SequenceTable {
            spec: self.clone(),
            terms,
        }
    }
}

fn check_order(k: usize) -> Result<(), SpecError> {
    if k < 2 {
        return Err(SpecError::OrderTooSmall { k });
    }
    if k > MAX_VALIDATED_ORDER {
        return Err(SpecError::OrderTooLarge { k });
    }
    Ok(())
}

/// Searches all sign vectors of length `n <= k` for a vanishing signed sum
/// `sum_j eps_j * f_j`. Returns the smallest offending `n` with its
/// lexicographically first sign vector, encoded as a `+`/`-` string.
///
/// Depth-first search with `+` explored before `-`; a running sum makes the
/// whole search O(2^(k+1)) additions. Subtrees below a recorded violation
/// are pruned (extensions have larger `n`), as are depths that can no
/// longer beat the best `n` found.
fn first_sign_cancellation(init: &[i64]) -> Option<(usize, String)> {
    fn recurse(
        init: &[i64],
        depth: usize,
        sum: i128,
        path: &mut Vec<bool>,
        best: &mut Option<(usize, Vec<bool>)>,
    ) {
        if depth > 0 && sum == 0 {
            if best.as_ref().is_none_or(|(n, _)| depth < *n) {
                *best = Some((depth, path.clone()));
            }
            return;
        }
        if depth == init.len() {
            return;
        }
        if let Some((n, _)) = best {
            if depth + 1 >= *n {
                return;
            }
        }
        let term = i128::from(init[depth]);
        for &plus in &[true, false] {
            path.push(plus);
            let signed = if plus { term } else { -term };
            recurse(init, depth + 1, sum + signed, path, best);
            path.pop();
        }
    }

    let mut best = None;
    recurse(init, 0, 0, &mut Vec::with_capacity(init.len()), &mut best);
    best.map(|(n, path)| {
        let signs: String = path.iter().map(|&p| if p { '+' } else { '-' }).collect();
        (n, signs)
    })
}

/// Terms `f_0..f_{n_max}` of a spec, with exact integer arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceTable {
    spec: KBonacciSpec,
    terms: Vec<BigInt>,
}

impl SequenceTable {
    pub fn spec(&self) -> &KBonacciSpec {
        &self.spec
    }

    /// Largest index generated.
    pub fn n_max(&self) -> usize {
        self.terms.len() - 1
    }

    /// `f_n`. Panics if `n` is beyond the generated range.
    pub fn term(&self, n: usize) -> &BigInt {
        &self.terms[n]
    }

    /// All generated terms, indexed so that `terms()[n] == f_n`.
    pub fn terms(&self) -> &[BigInt] {
        &self.terms
    }

    /// RFC 4180 CSV (`CRLF` line endings) with header `n,f_n`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,f_n\r\n");
        for (n, f) in self.terms.iter().enumerate() {
            out.push_str(&format!("{n},{f}\r\n"));
        }
        out
    }
}

impl Serialize for SequenceTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("SequenceTable", 3)?;
        s.serialize_field("k", &self.spec.order())?;
        s.serialize_field("init", self.spec.init())?;
        let terms: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        s.serialize_field("terms", &terms)?;
        s.end()
    }
}

/// Which of the two growth bounds a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GrowthInequality {
    /// `f_1 + f_2 + ... + f_n < f_{n+2}`
    PartialSumBound,
    /// `2 f_n >= 1 + f_{n+1}`
    SuccessorBound,
}

impl fmt::Display for GrowthInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthInequality::PartialSumBound => write!(f, "f_1 + ... + f_n < f_(n+2)"),
            GrowthInequality::SuccessorBound => write!(f, "2 f_n >= 1 + f_(n+1)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthViolation {
    pub n: usize,
    pub inequality: GrowthInequality,
}

/// Result of checking the two growth bounds over `n = k+1 ..= n_max`.
///
/// Both bounds drive the window estimates used by the return
/// characterizations, and both genuinely need `n >= k+1`: with the
/// `powers` start, `2 f_n = f_{n+1}` exactly for `n <= k-1`, so starting
/// the range any earlier would report spurious violations.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthReport {
    pub k: usize,
    pub n_start: usize,
    pub n_end: usize,
    pub first_violation: Option<GrowthViolation>,
}

impl GrowthReport {
    pub fn pass(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Checks `f_1 + ... + f_n < f_{n+2}` and `2 f_n >= 1 + f_{n+1}` for every
/// `n` in `k+1 ..= n_max`, stopping at the first violation.
///
/// The validating constructors accept negative initial terms as long as no
/// signed sum cancels; these bounds are stated for positive starts and will
/// usually fail on negative ones — that is a property of the start, not an
/// error, hence a report rather than a `Result` failure.
pub fn check_growth_inequalities(
    spec: &KBonacciSpec,
    n_max: usize,
) -> Result<GrowthReport, SpecError> {
    let k = spec.order();
    if n_max < k + 1 {
        return Err(SpecError::RangeTooShort {
            needed: k + 1,
            found: n_max,
        });
    }
    let table = spec.generate(n_max + 2);
    let one = BigInt::from(1);
    let mut prefix: BigInt = table.terms[1..=k].iter().sum();
    let mut first_violation = None;
    for n in k + 1..=n_max {
        prefix += table.term(n);
        let inequality = if &prefix >= table.term(n + 2) {
            Some(GrowthInequality::PartialSumBound)
        } else if table.term(n) * 2 < &one + table.term(n + 1) {
            Some(GrowthInequality::SuccessorBound)
        } else {
            None
        };
        if let Some(inequality) = inequality {
            first_violation = Some(GrowthViolation { n, inequality });
            break;
        }
    }
    Ok(GrowthReport {
        k,
        n_start: k + 1,
        n_end: n_max,
        first_violation,
    })
}
