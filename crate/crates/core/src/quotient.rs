//! Quotients of series by words and by series, and the quotient automata.
//!
//! The left quotient of `A` by a word `u` is `u⁻¹A(v) = A(uv)`; by a series
//! `X` it is `X⁻¹A(v) = Σ_u X(u) ⊗ A(uv)`, and symmetrically on the right.
//! On automaton representations the quotients are realized structurally: a
//! word shifts the initial state (left) or the final map (right); a series
//! divisor re-weights the initial or final map through a product-automaton
//! fixpoint.
//!
//! [`nerode_automaton`] builds the minimal deterministic automaton whose
//! states are the distinct left word quotients of `A`.
//! [`quotient_automaton_ba`] returns the same accessible automaton but first
//! probes the full series-quotient state space for finiteness: the series
//! quotients are joins of scalar multiples of word quotients, so the space
//! is finite exactly when the generator set `{r ⊗ (u⁻¹A)}` is finite.

use crate::automata::{Dwa, Wa};
use crate::semiring::Value;
use crate::series::{Repr, Series};
use crate::{Error, Result};

/// Which side a quotient divides on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// The quotient of `A` by a single word: `u⁻¹A(v) = A(uv)` on the left,
/// `Au⁻¹(v) = A(vu)` on the right.
pub fn word_quotient(a: &Series, u: &[usize], side: Side) -> Series {
    match (&a.repr, side) {
        (Repr::Poly(terms), Side::Left) => {
            let shifted = terms
                .iter()
                .filter(|(w, _)| w.len() >= u.len() && w[..u.len()] == *u)
                .map(|(w, v)| (w[u.len()..].to_vec(), v.clone()))
                .collect();
            Series::poly(a.semiring.clone(), a.alphabet.clone(), shifted)
        }
        (Repr::Poly(terms), Side::Right) => {
            let shifted = terms
                .iter()
                .filter(|(w, _)| w.len() >= u.len() && w[w.len() - u.len()..] == *u)
                .map(|(w, v)| (w[..w.len() - u.len()].to_vec(), v.clone()))
                .collect();
            Series::poly(a.semiring.clone(), a.alphabet.clone(), shifted)
        }
        (Repr::Dwa(d), Side::Left) => {
            Series::from_dwa(Dwa { initial: d.run(d.initial, u), ..d.clone() })
        }
        (Repr::Dwa(d), Side::Right) => {
            let finals = (0..d.states()).map(|q| d.finals[d.run(q, u)].clone()).collect();
            Series::from_dwa(Dwa { finals, ..d.clone() })
        }
        (Repr::Wa(w), Side::Left) => {
            Series::from_wa(Wa { initial: w.forward(u), ..w.clone() })
        }
        (Repr::Wa(w), Side::Right) => {
            Series::from_wa(Wa { finals: backward_finals(w, u), ..w.clone() })
        }
        _ => {
            // Step functions and lazy composites go through their automaton
            // form; none of these conversions determinize, so no bound is
            // actually consumed.
            let wa = a.to_wa(usize::MAX).expect("conversion without determinization");
            word_quotient(&Series::from_wa(wa), u, side)
        }
    }
}

/// `F'(q) = Σ_p δ*(q, u, p) ⊗ F(p)`: the final map pulled back along `u`.
fn backward_finals(w: &Wa, u: &[usize]) -> Vec<Value> {
    let s = &w.semiring;
    let mut f = w.finals.clone();
    for &sym in u.iter().rev() {
        let mut next = vec![s.zero(); w.states];
        for (p, ts, q, weight) in &w.trans {
            if *ts == sym {
                let add = s.times(weight, &f[*q]);
                next[*p] = s.plus(&next[*p], &add);
            }
        }
        f = next;
    }
    f
}

/// The quotient of `A` by a series divisor:
/// `X⁻¹A(v) = Σ_u X(u) ⊗ A(uv)` (left) or `AY⁻¹(v) = Σ_u A(vu) ⊗ Y(u)`
/// (right). The result reuses `A`'s automaton with a re-weighted initial
/// (left) or final (right) map. Polynomial divisors are summed directly;
/// automaton divisors require a join-fixpoint over the product automaton,
/// which fails with `BoundExceeded` after `iteration_bound` non-stabilizing
/// sweeps.
pub fn series_quotient(
    a: &Series,
    x: &Series,
    side: Side,
    iteration_bound: usize,
) -> Result<Series> {
    if a.semiring != x.semiring || a.alphabet != x.alphabet {
        return Err(Error::Invalid("divisor uses a different semiring or alphabet".into()));
    }
    if iteration_bound == 0 {
        return Err(Error::Invalid("iteration bound must be at least 1".into()));
    }
    let s = a.semiring.clone();
    let wa = a.to_wa(usize::MAX).expect("conversion without determinization");

    // Finite-support divisors: a plain finite sum.
    if let Repr::Poly(terms) = &x.repr {
        return Ok(match side {
            Side::Left => {
                let mut initial = vec![s.zero(); wa.states];
                for (u, xv) in terms {
                    let fwd = wa.forward(u);
                    for q in 0..wa.states {
                        let add = s.times(xv, &fwd[q]);
                        initial[q] = s.plus(&initial[q], &add);
                    }
                }
                Series::from_wa(Wa { initial, ..wa })
            }
            Side::Right => {
                let mut finals = vec![s.zero(); wa.states];
                for (u, yv) in terms {
                    let back = backward_finals(&wa, u);
                    for q in 0..wa.states {
                        let add = s.times(&back[q], yv);
                        finals[q] = s.plus(&finals[q], &add);
                    }
                }
                Series::from_wa(Wa { finals, ..wa })
            }
        });
    }

    let xa = x.to_wa(usize::MAX).expect("conversion without determinization").trim();
    match side {
        Side::Left => {
            // R(p, q) = Σ_u Σ-paths I_X ⊗ I_A joint-reachability weight in
            // the product automaton; then I'(q) = Σ_p R(p, q) ⊗ F_X(p).
            let base: Vec<Vec<Value>> = (0..xa.states)
                .map(|p| {
                    (0..wa.states).map(|q| s.times(&xa.initial[p], &wa.initial[q])).collect()
                })
                .collect();
            let mut r = base.clone();
            let mut stabilized = false;
            for _ in 0..iteration_bound {
                let mut next = base.clone();
                for (xp, xs, xq, xw) in &xa.trans {
                    for (ap, as_, aq, aw) in &wa.trans {
                        if xs != as_ {
                            continue;
                        }
                        let step = s.times(&s.times(&r[*xp][*ap], xw), aw);
                        next[*xq][*aq] = s.plus(&next[*xq][*aq], &step);
                    }
                }
                if next == r {
                    stabilized = true;
                    break;
                }
                r = next;
            }
            if !stabilized {
                return Err(Error::bound("iterating series-quotient fixpoint", iteration_bound));
            }
            let initial = (0..wa.states)
                .map(|q| {
                    let mut acc = s.zero();
                    for p in 0..xa.states {
                        acc = s.plus(&acc, &s.times(&r[p][q], &xa.finals[p]));
                    }
                    acc
                })
                .collect();
            Ok(Series::from_wa(Wa { initial, ..wa }))
        }
        Side::Right => {
            // C(q, p) = Σ_v (forward-to-final weight of v from q in A)
            //         ⊗ (forward-to-final weight of v from p in Y);
            // then F'(q) = Σ_p C(q, p) ⊗ I_Y(p).
            let base: Vec<Vec<Value>> = (0..wa.states)
                .map(|q| (0..xa.states).map(|p| s.times(&wa.finals[q], &xa.finals[p])).collect())
                .collect();
            let mut c = base.clone();
            let mut stabilized = false;
            for _ in 0..iteration_bound {
                let mut next = base.clone();
                for (ap, as_, aq, aw) in &wa.trans {
                    for (yp, ys, yq, yw) in &xa.trans {
                        if as_ != ys {
                            continue;
                        }
                        let step = s.times(&s.times(&c[*aq][*yq], aw), yw);
                        next[*ap][*yp] = s.plus(&next[*ap][*yp], &step);
                    }
                }
                if next == c {
                    stabilized = true;
                    break;
                }
                c = next;
            }
            if !stabilized {
                return Err(Error::bound("iterating series-quotient fixpoint", iteration_bound));
            }
            let finals = (0..wa.states)
                .map(|q| {
                    let mut acc = s.zero();
                    for p in 0..xa.states {
                        acc = s.plus(&acc, &s.times(&c[q][p], &xa.initial[p]));
                    }
                    acc
                })
                .collect();
            Ok(Series::from_wa(Wa { finals, ..wa }))
        }
    }
}

/// The minimal deterministic automaton of `A`: one state per distinct left
/// word quotient `u⁻¹A`, with `δ'(u⁻¹A, σ) = (uσ)⁻¹A` and `F'(u⁻¹A) = A(u)`.
/// Realized by accessible-part partition refinement; states come out in BFS
/// discovery order of their shortest quotient witness.
pub fn nerode_automaton(a: &Dwa) -> Dwa {
    a.minimize()
}

/// The accessible part of the series-quotient automaton, whose states are
/// the distinct series `X⁻¹A`. Over an idempotent semiring every `X⁻¹A` is
/// a join of scalar multiples `r ⊗ (u⁻¹A)` of word quotients, so the
/// automaton is finite exactly when that generator set is finite; the probe
/// enumerates the generators (carrier samples × word-quotient states,
/// compared as minimized automata) and fails with `BoundExceeded` when more
/// than `state_bound` distinct generators appear. On success the accessible
/// sub-automaton — which coincides with [`nerode_automaton`] — is returned.
pub fn quotient_automaton_ba(a: &Dwa, state_bound: usize) -> Result<Dwa> {
    let m = a.minimize();
    let s = &m.semiring;
    let carrier = match s.enumerate() {
        Some(vs) => vs,
        // Infinite carrier: sample enough distinct scalars to overrun the
        // bound if the generators do not collapse.
        None => s.sample(state_bound as u64 + 2),
    };
    let mut generators: Vec<Dwa> = Vec::new();
    for q in 0..m.states() {
        let shifted = Dwa { initial: q, ..m.clone() };
        for r in &carrier {
            let scaled = Dwa {
                finals: shifted.finals.iter().map(|f| s.times(r, f)).collect(),
                ..shifted.clone()
            }
            .minimize();
            if !generators.contains(&scaled) {
                if generators.len() >= state_bound {
                    return Err(Error::bound("enumerating series-quotient generators", state_bound));
                }
                generators.push(scaled);
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::semiring::Semiring;
    use crate::series::RationalOp;
    use crate::{Alphabet, Value};

    /// The max-min automaton weighing Σ*abΣ* with 2, everything else 1.
    fn contains_ab() -> Dwa {
        Dwa {
            semiring: Semiring::MaxMinNat,
            alphabet: Alphabet::of(&["a", "b"]),
            delta: vec![vec![1, 0], vec![1, 2], vec![2, 2]],
            initial: 0,
            finals: vec![Value::fin(1), Value::fin(1), Value::fin(2)],
        }
    }

    /// Tropical polynomial: ba ↦ 0, bb ↦ 0, aa ↦ 10, ab ↦ 3, else ∞.
    fn tropical_poly() -> Series {
        let al = Alphabet::of(&["a", "b"]);
        let terms = [("ba", 0), ("bb", 0), ("aa", 10), ("ab", 3)]
            .iter()
            .map(|(w, v)| (al.parse_word(w).unwrap(), Value::fin(*v)))
            .collect();
        Series::poly(Semiring::TropicalNat, al, terms)
    }

    #[test]
    fn empty_word_quotient_is_identity() {
        let a = Series::from_dwa(contains_ab());
        for side in [Side::Left, Side::Right] {
            let q = word_quotient(&a, &[], side);
            assert!(a.difference_up_to(&q, 4).is_none());
        }
    }

    #[test]
    fn tropical_word_quotient_example() {
        // b⁻¹A(b) = A(bb) = 0.
        let a = tropical_poly();
        let al = a.alphabet.clone();
        let q = word_quotient(&a, &al.parse_word("b").unwrap(), Side::Left);
        assert_eq!(q.eval(&al.parse_word("b").unwrap()), Value::fin(0));
        assert_eq!(q.eval(&al.parse_word("a").unwrap()), Value::fin(0)); // A(ba)
    }

    #[test]
    fn left_quotient_by_ab_is_constant_two() {
        let a = Series::from_dwa(contains_ab());
        let u = a.alphabet.parse_word("ab").unwrap();
        let q = word_quotient(&a, &u, Side::Left);
        for w in a.alphabet.words_up_to(4) {
            assert_eq!(q.eval(&w), Value::fin(2));
        }
    }

    #[test]
    fn word_quotient_action_composes() {
        // (uv)⁻¹A = v⁻¹(u⁻¹A) and A(uv)⁻¹ = (Av⁻¹)u⁻¹.
        let a = Series::from_dwa(contains_ab());
        let al = a.alphabet.clone();
        let u = al.parse_word("ab").unwrap();
        let v = al.parse_word("ba").unwrap();
        let uv = al.parse_word("abba").unwrap();
        let left1 = word_quotient(&a, &uv, Side::Left);
        let left2 = word_quotient(&word_quotient(&a, &u, Side::Left), &v, Side::Left);
        assert!(left1.difference_up_to(&left2, 4).is_none());
        let right1 = word_quotient(&a, &uv, Side::Right);
        let right2 = word_quotient(&word_quotient(&a, &v, Side::Right), &u, Side::Right);
        assert!(right1.difference_up_to(&right2, 4).is_none());
    }

    #[test]
    fn tropical_series_quotient_example() {
        // X = (4 at a) ⊕ (2 at b); X⁻¹A(a) = min(4+10, 2+0) = 2 and
        // X⁻¹A(b) = min(4+3, 2+0) = 2.
        let a = tropical_poly();
        let al = a.alphabet.clone();
        let x = Series::poly(
            Semiring::TropicalNat,
            al.clone(),
            BTreeMap::from([
                (al.parse_word("a").unwrap(), Value::fin(4)),
                (al.parse_word("b").unwrap(), Value::fin(2)),
            ]),
        );
        let q = series_quotient(&a, &x, Side::Left, 100).unwrap();
        assert_eq!(q.eval(&al.parse_word("a").unwrap()), Value::fin(2));
        assert_eq!(q.eval(&al.parse_word("b").unwrap()), Value::fin(2));
    }

    #[test]
    fn unit_series_quotient_is_identity() {
        let a = Series::from_dwa(contains_ab());
        let unit = Series::scalar_monomial(
            a.semiring.clone(),
            a.alphabet.clone(),
            a.semiring.one(),
        );
        for side in [Side::Left, Side::Right] {
            let q = series_quotient(&a, &unit, side, 100).unwrap();
            assert!(a.difference_up_to(&q, 4).is_none());
        }
    }

    #[test]
    fn maxmin_singleton_divisor_matches_definition() {
        // X = (2 at a): X⁻¹A(v) = 2 ∧ A(av).
        let a = Series::from_dwa(contains_ab());
        let al = a.alphabet.clone();
        let x = Series::poly(
            Semiring::MaxMinNat,
            al.clone(),
            BTreeMap::from([(al.parse_word("a").unwrap(), Value::fin(2))]),
        );
        let q = series_quotient(&a, &x, Side::Left, 100).unwrap();
        assert_eq!(q.eval(&al.parse_word("b").unwrap()), Value::fin(2)); // 2 ∧ A(ab)
        assert_eq!(q.eval(&al.parse_word("a").unwrap()), Value::fin(1)); // 2 ∧ A(aa)
    }

    #[test]
    fn automaton_divisor_agrees_with_polynomial_divisor() {
        // The same finite divisor given as a trie automaton must produce the
        // same quotient through the fixpoint path.
        let a = Series::from_dwa(contains_ab());
        let al = a.alphabet.clone();
        let terms = BTreeMap::from([
            (al.parse_word("a").unwrap(), Value::fin(2)),
            (al.parse_word("bb").unwrap(), Value::inf()),
        ]);
        let x_poly = Series::poly(Semiring::MaxMinNat, al.clone(), terms);
        let x_wa = Series::from_wa(x_poly.to_wa(1000).unwrap());
        for side in [Side::Left, Side::Right] {
            let q1 = series_quotient(&a, &x_poly, side, 100).unwrap();
            let q2 = series_quotient(&a, &x_wa, side, 100).unwrap();
            assert!(q1.difference_up_to(&q2, 4).is_none());
        }
    }

    #[test]
    fn star_divisor_fixpoint_stabilizes() {
        // X = ({a,b} at one)* has infinite support but finitely many
        // generated values; the fixpoint must stabilize.
        let a = Series::from_dwa(contains_ab());
        let al = a.alphabet.clone();
        let sym = Series::poly(
            Semiring::MaxMinNat,
            al.clone(),
            BTreeMap::from([
                (al.parse_word("a").unwrap(), Value::inf()),
                (al.parse_word("b").unwrap(), Value::inf()),
            ]),
        );
        let star = Series::combine(RationalOp::Star, &[&sym]).unwrap();
        let q = series_quotient(&a, &star, Side::Left, 100).unwrap();
        // Σ*-quotient of A: (X⁻¹A)(v) = max over u of A(uv) = 2 for all v
        // (some prefix completes "ab").
        for w in al.words_up_to(3) {
            assert_eq!(q.eval(&w), Value::fin(2));
        }
    }

    #[test]
    fn nerode_matches_minimize_and_example_size() {
        let a = contains_ab();
        let n = nerode_automaton(&a);
        assert_eq!(n.states(), 3);
        assert!(n.isomorphic(&a.minimize()));
        let c = Series::constant(Semiring::MaxMinNat, a.alphabet.clone(), Value::fin(7));
        let n1 = nerode_automaton(&c.to_dwa(10).unwrap());
        assert_eq!(n1.states(), 1);
    }

    #[test]
    fn ba_finite_cases() {
        // Boolean Σ*ab: three left quotients.
        let al = Alphabet::of(&["a", "b"]);
        let t = Value::B(true);
        let f = Value::B(false);
        let suffix_ab = Dwa {
            semiring: Semiring::Boolean,
            alphabet: al.clone(),
            delta: vec![vec![1, 0], vec![1, 2], vec![1, 0]],
            initial: 0,
            finals: vec![f.clone(), f.clone(), t.clone()],
        };
        let b = quotient_automaton_ba(&suffix_ab, 64).unwrap();
        assert_eq!(b.states(), 3);

        // The same shape over a finite chain is finite as well.
        let chain_a = Dwa {
            semiring: Semiring::Chain(2),
            alphabet: al,
            delta: vec![vec![1, 0], vec![1, 2], vec![2, 2]],
            initial: 0,
            finals: vec![Value::L(1), Value::L(1), Value::L(2)],
        };
        let b2 = quotient_automaton_ba(&chain_a, 64).unwrap();
        assert_eq!(b2.states(), 3);
    }

    #[test]
    fn ba_infinite_scalar_family_exceeds_bound() {
        // Constant-one over the full extended naturals: the scalar divisors
        // r·a generate the pairwise distinct constants r̄.
        let al = Alphabet::of(&["a", "b"]);
        let one = Dwa {
            semiring: Semiring::MaxMinNat,
            alphabet: al,
            delta: vec![vec![0, 0]],
            initial: 0,
            finals: vec![Value::inf()],
        };
        match quotient_automaton_ba(&one, 50) {
            Err(Error::BoundExceeded { .. }) => {}
            other => panic!("expected BoundExceeded, got {other:?}"),
        }
    }
}
