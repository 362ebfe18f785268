//! Random walks driven by k-bonacci step sizes, analyzed exactly.
//!
//! Fix an order `k >= 2` and initial terms `f_1, ..., f_k`, extend by
//! `f_n = f_{n-1} + ... + f_{n-k}`, and walk on the integers by adding
//! `±f_n` at step `n` with independent fair signs. Unlike the simple
//! random walk, the step sizes explode — yet for well-chosen starts the
//! walk returns to 0 with positive probability at arbitrarily late times,
//! and everything about those returns is exactly computable:
//!
//! * [`sequence`] — specs, validation of the start condition (no signed
//!   partial sum of the initial terms may vanish), exact term tables, and
//!   the growth bounds the analysis relies on;
//! * [`walk`] — sign words, exact partial sums, visit extraction, and a
//!   seeded deterministic simulator;
//! * [`characterize`] — the two pattern blocks whose concatenations are
//!   precisely the returning sign words, predicted visit times, and the
//!   escape bounds for non-block windows;
//! * [`probability`] — closed-form return laws as exact dyadic rationals,
//!   an exhaustive brute-force oracle, and reproducible Monte Carlo;
//! * [`fractal`] — the sequence-space metric, box-counting profiles whose
//!   slopes recover the dimension `1/(k+1)` of the always-returning set,
//!   and a Moran-equation solver for the matching similarity system;
//! * [`dyadic`] — the exact arithmetic underneath all of the above.
//!
//! Every closed form shipped here is cross-checked in the test suite
//! against exhaustive enumeration at small sizes; the enumeration, in
//! turn, is checked against direct walk evaluation. Randomized components
//! (Monte Carlo, sampled geometry checks) are seeded and reproduce
//! byte-identical results for a given seed, regardless of thread count.

pub mod characterize;
pub mod dyadic;
pub mod fractal;
pub mod probability;
pub mod sequence;
pub mod walk;

pub use characterize::{
    classify_block, minus_block, nonpattern_window_bounds, plus_block,
    predicted_f1_times_tribonacci, predicted_neg_f1_times_tribonacci, predicted_zero_times,
    residue, BlockPattern, CharacterizeError, Residue, WindowBoundReport,
};
pub use dyadic::Dyadic;
pub use fractal::{
    box_dimension_estimate, count_pattern_prefixes, equal_ratio_dimension, full_space_profile,
    moran_dimension, pattern_prefixes, seq_distance, tribonacci_f1_dimension,
    verify_prepend_halving, verify_self_similarity, CoveringEntry, CoveringProfile, Cylinder,
    FractalError, PrependHalvingReport, SelfSimilarityReport, SimilaritySystem,
};
pub use probability::{
    brute_force_distribution, brute_force_distribution_with_cap, exact_return_count_prob,
    exact_zero_hit_prob, monte_carlo_distribution, tribonacci_f1_event_prob,
    tribonacci_f1_visit_count_prob, unnormalized_return_count_prob, DyadicProb, FreqEntry,
    MonteCarloReport, ProbabilityError, ReturnDistribution, DEFAULT_ENUM_CAP,
};
pub use sequence::{
    check_growth_inequalities, GrowthInequality, GrowthReport, GrowthViolation, KBonacciSpec,
    SequenceTable, SpecError,
};
pub use walk::{
    mask_visit_count, partial_sums, simulate, simulate_stream, Sign, SignSequence, WalkError,
    WalkTrace,
};
