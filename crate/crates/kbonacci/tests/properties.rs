//! Property-based tests: randomized structural laws that must hold for
//! every input, with shrinking on failure.

use num_bigint::BigInt;
use proptest::prelude::*;

use kbonacci::dyadic::Dyadic;
use kbonacci::fractal::seq_distance;
use kbonacci::probability::brute_force_distribution;
use kbonacci::sequence::KBonacciSpec;
use kbonacci::walk::{mask_visit_count, partial_sums, Sign, SignSequence};
use kbonacci::{moran_dimension, predicted_zero_times, residue, SimilaritySystem};

fn arb_spec() -> impl Strategy<Value = KBonacciSpec> {
    prop_oneof![
        (2usize..=6).prop_map(|k| KBonacciSpec::powers(k).unwrap()),
        Just(KBonacciSpec::tribonacci()),
        Just(KBonacciSpec::new(3, vec![2, 3, 4]).unwrap()),
        Just(KBonacciSpec::new(2, vec![-1, 3]).unwrap()),
    ]
}

fn arb_signs(max_len: usize) -> impl Strategy<Value = SignSequence> {
    prop::collection::vec(prop::bool::ANY, 1..=max_len).prop_map(|bits| {
        SignSequence::new(
            bits.into_iter()
                .map(|b| if b { Sign::Plus } else { Sign::Minus })
                .collect(),
        )
    })
}

proptest! {
    /// The constructor's verdict on a random start agrees with a literal
    /// enumeration of every signed combination.
    #[test]
    fn start_condition_verdict_is_sound(init in prop::collection::vec(-9i64..=9, 2..=5)) {
        let k = init.len();
        let accepted = KBonacciSpec::new(k, init.clone()).is_ok();
        let mut brute = init.iter().all(|&t| t != 0);
        'outer: for n in 1..=k {
            for mask in 0u32..1 << n {
                let sum: i64 = (0..n)
                    .map(|j| if mask >> j & 1 == 0 { init[j] } else { -init[j] })
                    .sum();
                if sum == 0 {
                    brute = false;
                    break 'outer;
                }
            }
        }
        prop_assert_eq!(accepted, brute);
    }

    /// The defining recurrence holds at every generated index.
    #[test]
    fn recurrence_closure(spec in arb_spec(), n_max in 10usize..=120) {
        let k = spec.order();
        let table = spec.generate(n_max);
        for n in (k + 1)..=n_max {
            let window: BigInt = (n - k..n).map(|j| table.term(j)).sum();
            prop_assert_eq!(table.term(n), &window);
        }
    }

    /// Flipping every sign negates the walk pointwise, so visit times to
    /// `t` equal the flipped walk's visit times to `-t`.
    #[test]
    fn sign_flip_symmetry(spec in arb_spec(), signs in arb_signs(22), t in -30i64..=30) {
        let target = BigInt::from(t);
        let trace = partial_sums(&spec, &signs);
        let flipped = partial_sums(&spec, &signs.flipped());
        prop_assert_eq!(trace.visit_times(&target), flipped.visit_times(&(-target)));
    }

    /// The packed counting kernel agrees with the explicit trace for any
    /// word and target.
    #[test]
    fn mask_kernel_agrees(spec in arb_spec(), mask in any::<u64>(), len in 1usize..=20, t in -20i64..=20) {
        let mask = mask & ((1 << len) - 1);
        let table = spec.generate(len);
        let target = BigInt::from(t);
        let signs = SignSequence::from_mask(mask, len).unwrap();
        let trace = partial_sums(&spec, &signs);
        prop_assert_eq!(
            mask_visit_count(&table, len, mask, &target).unwrap(),
            trace.visit_count(&target)
        );
    }

    /// Predicted zero-visit times are always an initial run of multiples
    /// of k+1 — the visit set is prefix-closed by construction.
    #[test]
    fn predicted_visits_are_initial_multiples(signs in arb_signs(24), k in 2usize..=5) {
        let predicted = predicted_zero_times(&signs, k);
        for (idx, time) in predicted.iter().enumerate() {
            prop_assert_eq!(*time, (k + 1) * (idx + 1));
        }
    }

    /// Brute-force distributions always carry total mass exactly 1.
    #[test]
    fn distribution_mass_is_one(k in 2usize..=3, extra in 0usize..=6, i_max in 0usize..=4, t in -3i64..=3) {
        let spec = KBonacciSpec::powers(k).unwrap();
        let prefix_len = (k + 1) * (i_max + 1) + extra;
        prop_assume!(prefix_len <= 18);
        let dist = brute_force_distribution(&spec, &BigInt::from(t), prefix_len, i_max).unwrap();
        prop_assert_eq!(dist.total(), kbonacci::Dyadic::one());
    }

    /// Dyadic addition commutes, associates, and round-trips through
    /// subtraction; the representation stays normalized throughout.
    #[test]
    fn dyadic_arithmetic(
        a in (0u64..1 << 50, 0u32..=40),
        b in (0u64..1 << 50, 0u32..=40),
        c in (0u64..1 << 50, 0u32..=40),
    ) {
        let d = |(num, exp): (u64, u32)| Dyadic::new(num, exp);
        let (a, b, c) = (d(a), d(b), d(c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!((&a + &b).checked_sub(&b).unwrap(), a.clone());
        prop_assert!(b.checked_sub(&(&a + &b)).is_none() || a.is_zero());
        let sum = &a + &b;
        prop_assert!(
            sum.exp() == 0 || sum.num().bit(0),
            "normalized: odd numerator whenever exp > 0"
        );
        // Ordering must match the exact real values (f64 is exact here:
        // numerators fit in 53 bits).
        prop_assert_eq!(a.cmp(&b), a.to_f64().partial_cmp(&b.to_f64()).unwrap());
    }

    /// Truncated-metric distance never exceeds the diameter of the
    /// cylinder given by a shared prefix.
    #[test]
    fn distance_bounded_by_cylinder_diameter(
        shared in arb_signs(16),
        tail_a in arb_signs(16),
        tail_b in arb_signs(16),
    ) {
        let m = shared.len();
        let mut u = shared.signs().to_vec();
        let mut v = shared.signs().to_vec();
        u.extend_from_slice(tail_a.signs());
        v.extend_from_slice(tail_b.signs());
        let depth = u.len().min(v.len());
        let u = SignSequence::new(u);
        let v = SignSequence::new(v);
        let distance = seq_distance(&u, &v, depth).unwrap();
        prop_assert!(distance <= Dyadic::half_pow(m as u32 - 1));
    }

    /// The Moran root is monotone: shrinking any contraction ratio can
    /// only shrink the dimension, and adding a piece can only grow it.
    #[test]
    fn moran_root_is_monotone(
        ratios in prop::collection::vec(0.05f64..0.85, 2..=4),
        shrink_idx in 0usize..4,
        factor in 0.5f64..0.99,
    ) {
        let tol = 1e-11;
        let base = SimilaritySystem::new(ratios.clone()).unwrap();
        let s_base = moran_dimension(&base, tol).unwrap();

        let idx = shrink_idx % ratios.len();
        let mut smaller = ratios.clone();
        smaller[idx] *= factor;
        let s_smaller = moran_dimension(&SimilaritySystem::new(smaller).unwrap(), tol).unwrap();
        prop_assert!(s_smaller <= s_base + 10.0 * tol, "{s_smaller} vs {s_base}");

        let mut extended = ratios.clone();
        extended.push(0.05);
        let s_extended = moran_dimension(&SimilaritySystem::new(extended).unwrap(), tol).unwrap();
        prop_assert!(s_extended >= s_base - 10.0 * tol, "{s_extended} vs {s_base}");
    }

    /// Time decomposition: every step index splits uniquely as a number
    /// of completed windows plus an offset within the current one.
    #[test]
    fn residue_reconstructs_index(n in 1usize..=10_000, k in 2usize..=8) {
        let r = residue(n, k);
        prop_assert_eq!(r.m * (k + 1) + r.t, n);
        prop_assert!(r.t <= k);
    }

    /// Sign words survive the round trip through text and through masks.
    #[test]
    fn sign_word_round_trips(signs in arb_signs(24)) {
        let text = signs.to_string();
        prop_assert_eq!(text.parse::<SignSequence>().unwrap(), signs.clone());
        if signs.len() <= 64 {
            let mask: u64 = signs
                .signs()
                .iter()
                .enumerate()
                .filter(|(_, s)| **s == Sign::Plus)
                .map(|(i, _)| 1u64 << i)
                .sum();
            prop_assert_eq!(SignSequence::from_mask(mask, signs.len()).unwrap(), signs);
        }
    }
}
