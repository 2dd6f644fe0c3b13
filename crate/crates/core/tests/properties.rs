//! Randomized law checking: value-level adjunction, word- and series-level
//! quotient identities, residual laws and Galois stability, reversal
//! dualities, past/future decomposition bounds, and morphic dominance.
//! Every suite runs at least 200 generated cases with exact assertions.

use std::collections::BTreeMap;

use proptest::prelude::*;

use fps_core::automata::{check_morphism, Morphism, Wa};
use fps_core::quotient::{series_quotient, word_quotient, Side};
use fps_core::residual::residual;
use fps_core::semiring::{Semiring, Value};
use fps_core::series::{RationalOp, Series};
use fps_core::{Alphabet, Word};

const CASES: u32 = 220;

fn config() -> ProptestConfig {
    ProptestConfig { cases: CASES, ..ProptestConfig::default() }
}

fn alphabet() -> Alphabet {
    Alphabet::of(&["a", "b"])
}

fn arb_semiring() -> impl Strategy<Value = Semiring> {
    prop_oneof![
        Just(Semiring::Boolean),
        Just(Semiring::Chain(2)),
        Just(Semiring::Chain(3)),
        Just(Semiring::MaxMinNat),
        Just(Semiring::TropicalNat),
    ]
}

fn carrier(s: &Semiring) -> Vec<Value> {
    s.sample(4)
}

fn arb_value(s: Semiring) -> impl Strategy<Value = Value> {
    let vs = carrier(&s);
    (0..vs.len()).prop_map(move |i| vs[i].clone())
}

/// A polynomial with support in words of length ≤ 2.
fn arb_poly(s: Semiring) -> impl Strategy<Value = Series> {
    let al = alphabet();
    let words = al.words_up_to(2);
    let vs = carrier(&s);
    proptest::collection::vec((0..words.len(), 0..vs.len()), 0..4).prop_map(move |picks| {
        let mut terms = BTreeMap::new();
        for (wi, vi) in picks {
            terms.insert(words[wi].clone(), vs[vi].clone());
        }
        Series::poly(s.clone(), al.clone(), terms)
    })
}

fn arb_word(max_len: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec(0usize..2, 0..=max_len)
}

fn assert_eq_on_window(lhs: &Series, rhs: &Series, window: usize, what: &str) {
    for w in alphabet().words_up_to(window) {
        assert_eq!(lhs.eval(&w), rhs.eval(&w), "{what} differs at {w:?}");
    }
}

fn sum(a: &Series, b: &Series) -> Series {
    Series::combine(RationalOp::Sum, &[a, b]).unwrap()
}

fn cauchy(a: &Series, b: &Series) -> Series {
    Series::combine(RationalOp::Cauchy, &[a, b]).unwrap()
}

proptest! {
    #![proptest_config(config())]

    /// Value-level adjunction: a⊗x ≤ b iff x ≤ a→b.
    #[test]
    fn adjunction_law(s in arb_semiring(), picks in proptest::collection::vec(0usize..5, 3)) {
        let vs = carrier(&s);
        let a = &vs[picks[0] % vs.len()];
        let b = &vs[picks[1] % vs.len()];
        let x = &vs[picks[2] % vs.len()];
        let r = s.residual(a, b);
        prop_assert_eq!(s.leq(&s.times(a, x), b), s.leq(x, &r), "a={} b={} x={}", a, b, x);
        // The residual itself satisfies a ⊗ (a→b) ≤ b.
        prop_assert!(s.leq(&s.times(a, &r), b));
    }

    /// Word-quotient identities: composition, unit, additivity, scalars.
    #[test]
    fn word_quotient_identities(
        (s, u, v) in arb_semiring().prop_flat_map(|s| (Just(s), arb_word(2), arb_word(2))),
        seed in 0usize..1000,
    ) {
        let _ = seed;
        let a = {
            let al = alphabet();
            let vs = carrier(&s);
            let mut terms = BTreeMap::new();
            for (i, w) in al.words_up_to(3).into_iter().enumerate() {
                terms.insert(w, vs[(i + seed) % vs.len()].clone());
            }
            Series::poly(s.clone(), al, terms)
        };
        let mut uv = u.clone();
        uv.extend_from_slice(&v);
        // (uv)⁻¹A = v⁻¹(u⁻¹A) and A(uv)⁻¹ = (Av⁻¹)u⁻¹.
        let lhs = word_quotient(&a, &uv, Side::Left);
        let rhs = word_quotient(&word_quotient(&a, &u, Side::Left), &v, Side::Left);
        assert_eq_on_window(&lhs, &rhs, 3, "left word-quotient composition");
        let lhs = word_quotient(&a, &uv, Side::Right);
        let rhs = word_quotient(&word_quotient(&a, &v, Side::Right), &u, Side::Right);
        assert_eq_on_window(&lhs, &rhs, 3, "right word-quotient composition");
        // ε⁻¹A = A = Aε⁻¹.
        assert_eq_on_window(&word_quotient(&a, &[], Side::Left), &a, 3, "left unit");
        assert_eq_on_window(&word_quotient(&a, &[], Side::Right), &a, 3, "right unit");
    }

    /// u⁻¹(A⊕B) = u⁻¹A ⊕ u⁻¹B and the right-sided analogue.
    #[test]
    fn word_quotient_additivity(
        (s, a, b, u) in arb_semiring()
            .prop_flat_map(|s| (Just(s.clone()), arb_poly(s.clone()), arb_poly(s), arb_word(2))),
    ) {
        let _ = s;
        for side in [Side::Left, Side::Right] {
            let lhs = word_quotient(&sum(&a, &b), &u, side);
            let rhs = sum(&word_quotient(&a, &u, side), &word_quotient(&b, &u, side));
            assert_eq_on_window(&lhs, &rhs, 3, "word-quotient additivity");
        }
    }

    /// u⁻¹(kA) = k(u⁻¹A) and the mirrored scalar laws.
    #[test]
    fn word_quotient_scalars(
        (s, a, u, k) in arb_semiring().prop_flat_map(|s| {
            (Just(s.clone()), arb_poly(s.clone()), arb_word(2), arb_value(s))
        }),
    ) {
        let _ = s;
        for side in [Side::Left, Side::Right] {
            for scalar_op in
                [RationalOp::ScalarLeft(k.clone()), RationalOp::ScalarRight(k.clone())]
            {
                let ka = Series::combine(scalar_op.clone(), &[&a]).unwrap();
                let lhs = word_quotient(&ka, &u, side);
                let rhs = Series::combine(
                    scalar_op.clone(),
                    &[&word_quotient(&a, &u, side)],
                )
                .unwrap();
                assert_eq_on_window(&lhs, &rhs, 3, "word-quotient scalar law");
            }
        }
    }

    /// Series-quotient additivity in the divisor:
    /// (X₁⊕X₂)⁻¹A = X₁⁻¹A ⊕ X₂⁻¹A, and dually on the right.
    #[test]
    fn series_quotient_divisor_additivity(
        (s, a, x1, x2) in arb_semiring().prop_flat_map(|s| {
            (Just(s.clone()), arb_poly(s.clone()), arb_poly(s.clone()), arb_poly(s))
        }),
    ) {
        let _ = s;
        for side in [Side::Left, Side::Right] {
            let lhs = series_quotient(&a, &sum(&x1, &x2), side, 1000).unwrap();
            let rhs = sum(
                &series_quotient(&a, &x1, side, 1000).unwrap(),
                &series_quotient(&a, &x2, side, 1000).unwrap(),
            );
            assert_eq_on_window(&lhs, &rhs, 3, "series-quotient divisor additivity");
        }
    }

    /// Series-quotient additivity in the base:
    /// X⁻¹(A₁⊕A₂) = X⁻¹A₁ ⊕ X⁻¹A₂, and dually on the right.
    #[test]
    fn series_quotient_base_additivity(
        (s, a1, a2, x) in arb_semiring().prop_flat_map(|s| {
            (Just(s.clone()), arb_poly(s.clone()), arb_poly(s.clone()), arb_poly(s))
        }),
    ) {
        let _ = s;
        for side in [Side::Left, Side::Right] {
            let lhs = series_quotient(&sum(&a1, &a2), &x, side, 1000).unwrap();
            let rhs = sum(
                &series_quotient(&a1, &x, side, 1000).unwrap(),
                &series_quotient(&a2, &x, side, 1000).unwrap(),
            );
            assert_eq_on_window(&lhs, &rhs, 3, "series-quotient base additivity");
        }
    }

    /// Scalar laws: (rX)⁻¹A = r(X⁻¹A) and A(Yr)⁻¹ = (AY⁻¹)r (⊗ commutes).
    #[test]
    fn series_quotient_scalars(
        (s, a, x, r) in arb_semiring().prop_flat_map(|s| {
            (Just(s.clone()), arb_poly(s.clone()), arb_poly(s.clone()), arb_value(s))
        }),
    ) {
        let _ = s;
        let rx = Series::combine(RationalOp::ScalarLeft(r.clone()), &[&x]).unwrap();
        let lhs = series_quotient(&a, &rx, Side::Left, 1000).unwrap();
        let rhs = Series::combine(
            RationalOp::ScalarLeft(r.clone()),
            &[&series_quotient(&a, &x, Side::Left, 1000).unwrap()],
        )
        .unwrap();
        assert_eq_on_window(&lhs, &rhs, 3, "left series-quotient scalar law");
        let yr = Series::combine(RationalOp::ScalarRight(r.clone()), &[&x]).unwrap();
        let lhs = series_quotient(&a, &yr, Side::Right, 1000).unwrap();
        let rhs = Series::combine(
            RationalOp::ScalarRight(r.clone()),
            &[&series_quotient(&a, &x, Side::Right, 1000).unwrap()],
        )
        .unwrap();
        assert_eq_on_window(&lhs, &rhs, 3, "right series-quotient scalar law");
    }

    /// Residual product bounds: X(X\A) ≤ A and (A/Y)Y ≤ A.
    #[test]
    fn residual_product_bound(
        (s, a, x) in arb_semiring()
            .prop_flat_map(|s| (Just(s.clone()), arb_poly(s.clone()), arb_poly(s))),
    ) {
        let xa = residual(&a, &x, Side::Left, 10_000).unwrap();
        let ay = residual(&a, &x, Side::Right, 10_000).unwrap();
        for w in alphabet().words_up_to(4) {
            prop_assert!(s.leq(&cauchy(&x, &xa).eval(&w), &a.eval(&w)), "X(X\\A) at {w:?}");
            prop_assert!(s.leq(&cauchy(&ay, &x).eval(&w), &a.eval(&w)), "(A/Y)Y at {w:?}");
        }
    }

    /// Currying: (XY)\A = Y\(X\A) and A/(YX) = (A/X)/Y.
    #[test]
    fn residual_currying(
        (s, a, x, y) in arb_semiring().prop_flat_map(|s| {
            (Just(s.clone()), arb_poly(s.clone()), arb_poly(s.clone()), arb_poly(s))
        }),
    ) {
        let _ = s;
        let lhs = residual(&a, &cauchy(&x, &y), Side::Left, 10_000).unwrap();
        let rhs = residual(&residual(&a, &x, Side::Left, 10_000).unwrap(), &y, Side::Left, 10_000)
            .unwrap();
        assert_eq_on_window(&lhs, &rhs, 3, "left residual currying");
        let lhs = residual(&a, &cauchy(&y, &x), Side::Right, 10_000).unwrap();
        let rhs =
            residual(&residual(&a, &x, Side::Right, 10_000).unwrap(), &y, Side::Right, 10_000)
                .unwrap();
        assert_eq_on_window(&lhs, &rhs, 3, "right residual currying");
    }

    /// Divisor sums become meets: (X₁⊕X₂)\A = X₁\A ∧ X₂\A (pointwise).
    #[test]
    fn residual_divisor_sum_is_meet(
        (s, a, x1, x2) in arb_semiring().prop_flat_map(|s| {
            (Just(s.clone()), arb_poly(s.clone()), arb_poly(s.clone()), arb_poly(s))
        }),
    ) {
        for side in [Side::Left, Side::Right] {
            let lhs = residual(&a, &sum(&x1, &x2), side, 10_000).unwrap();
            let r1 = residual(&a, &x1, side, 10_000).unwrap();
            let r2 = residual(&a, &x2, side, 10_000).unwrap();
            for w in alphabet().words_up_to(3) {
                prop_assert_eq!(
                    lhs.eval(&w),
                    s.meet(&r1.eval(&w), &r2.eval(&w)),
                    "divisor-sum meet at {:?}", w
                );
            }
        }
    }

    /// Galois stability: (A/(X\A))\A = X\A and A/((A/Y)\A) = A/Y.
    #[test]
    fn residual_galois_stability(
        (s, a, x) in arb_semiring()
            .prop_flat_map(|s| (Just(s.clone()), arb_poly(s.clone()), arb_poly(s))),
    ) {
        let _ = s;
        let xa = residual(&a, &x, Side::Left, 10_000).unwrap();
        let closed = residual(&a, &xa, Side::Right, 10_000).unwrap();
        let lhs = residual(&a, &closed, Side::Left, 10_000).unwrap();
        assert_eq_on_window(&lhs, &xa, 3, "left Galois stability");
        let ay = residual(&a, &x, Side::Right, 10_000).unwrap();
        let closed = residual(&a, &ay, Side::Left, 10_000).unwrap();
        let lhs = residual(&a, &closed, Side::Right, 10_000).unwrap();
        assert_eq_on_window(&lhs, &ay, 3, "right Galois stability");
    }

    /// Reversal dualities: (X\A)^R = A^R/X^R and AY⁻¹ = ((Y^R)⁻¹A^R)^R.
    #[test]
    fn reversal_dualities(
        (s, a, x) in arb_semiring()
            .prop_flat_map(|s| (Just(s.clone()), arb_poly(s.clone()), arb_poly(s))),
    ) {
        let _ = s;
        let rev = |z: &Series| Series::combine(RationalOp::Reversal, &[z]).unwrap();
        // Residual duality.
        let lhs = rev(&residual(&a, &x, Side::Left, 10_000).unwrap());
        let rhs = residual(&rev(&a), &rev(&x), Side::Right, 10_000).unwrap();
        assert_eq_on_window(&lhs, &rhs, 4, "residual reversal duality");
        // Quotient duality.
        let lhs = series_quotient(&a, &x, Side::Right, 1000).unwrap();
        let rhs = rev(&series_quotient(&rev(&a), &rev(&x), Side::Left, 1000).unwrap());
        assert_eq_on_window(&lhs, &rhs, 4, "quotient reversal duality");
    }
}

/// A small random weighted automaton (2-3 states).
fn arb_wa(s: Semiring) -> impl Strategy<Value = Wa> {
    let vs = carrier(&s);
    let n = vs.len();
    (2usize..=3, proptest::collection::vec(0..n, 20)).prop_map(move |(states, picks)| {
        let mut k = 0;
        let mut next = || {
            let v = vs[picks[k % picks.len()]].clone();
            k += 1;
            v
        };
        let zero = s.zero();
        let mut trans = Vec::new();
        for p in 0..states {
            for sym in 0..2 {
                for q in 0..states {
                    let w = next();
                    if w != zero {
                        trans.push((p, sym, q, w));
                    }
                }
            }
        }
        let initial: Vec<Value> = (0..states).map(|_| next()).collect();
        let finals: Vec<Value> = (0..states).map(|_| next()).collect();
        Wa { semiring: s.clone(), alphabet: alphabet(), states, trans, initial, finals }
    })
}

proptest! {
    #![proptest_config(config())]

    /// Past(q)·Fut(q) ≤ |A| for every state, on words of length ≤ 6.
    #[test]
    fn past_future_bounded_by_series(
        (s, wa) in arb_semiring().prop_flat_map(|s| (Just(s.clone()), arb_wa(s))),
    ) {
        for q in 0..wa.states {
            let past = Series::from_wa(wa.past(q));
            let fut = Series::from_wa(wa.fut(q));
            let product = cauchy(&past, &fut);
            for w in alphabet().words_up_to(6) {
                prop_assert!(
                    s.leq(&product.eval(&w), &wa.eval(&w)),
                    "state {} at {:?}", q, w
                );
            }
        }
    }

    /// A plain morphism forces pointwise dominance: |B| ≤ |morphic image|.
    #[test]
    fn morphism_implies_dominance(
        (s, wa, fold) in arb_semiring()
            .prop_flat_map(|s| (Just(s.clone()), arb_wa(s), any::<bool>())),
    ) {
        // Collapse the two highest states (or keep all) — the morphic image
        // along any partition receives a plain (indeed strong-image)
        // morphism from the source.
        let partition: Vec<usize> = (0..wa.states)
            .map(|q| if fold && q == wa.states - 1 { wa.states - 2 } else { q })
            .collect();
        // Renumber densely.
        let mut dense = partition.clone();
        let mut ids: Vec<usize> = dense.clone();
        ids.sort();
        ids.dedup();
        for d in dense.iter_mut() {
            *d = ids.iter().position(|x| x == d).unwrap();
        }
        let image = wa.merge_states(&dense);
        let verdict = check_morphism(&wa, &image, &Morphism { map: dense });
        prop_assert!(verdict.plain, "merge morphism should be plain: {:?}", verdict.violations);
        for w in alphabet().words_up_to(4) {
            prop_assert!(
                s.leq(&wa.eval(&w), &image.eval(&w)),
                "dominance fails at {:?}", w
            );
        }
    }
}
