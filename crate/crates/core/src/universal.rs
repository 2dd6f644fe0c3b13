//! The universal weighted automaton of a deterministic automaton.
//!
//! States of the universal automaton are the maximal pairs `(X, Y)` with
//! `X·Y ≤ A`. They are computed effectively: close the value set needed by
//! residuals into a finite lattice `l_A`, enumerate every *weighted state*
//! `f: Q → l_A`, attach to each the series
//! `Y_f(v) = ⋀_q f(q) → Fut(q)(v)`, and merge weighted states with equal
//! `Y_f`. Each merged class carries a largest representative `h` (the
//! pointwise join of its members), the materialized pair
//! `Y = Y_h`, `X = A/Y`, and the class values `J = X(ε)`, `G = Y(ε)`.
//! The transition weights between classes are inherited from the weighted
//! automaton `A₁` on all of `l_A^Q` and cross-checked against the
//! inclusion-degree formula `η(c, σ, c′) = (X_c·σ) →_incl X_{c′}`.

use std::collections::{BTreeSet, HashMap};

use crate::automata::{equivalent, AutomatonRef, Dwa, EquivMode, Morphism, Wa};
use crate::residual::{inclusion_degree, residual, state_weight_series, Factorization};
use crate::quotient::Side;
use crate::semiring::{Semiring, Value};
use crate::series::{RationalOp, Series};
use crate::{Error, Result};

/// The finite value lattice a residual-based construction works inside.
#[derive(Debug, Clone)]
pub struct ValueLattice {
    /// `S_A = {c → a | c ∈ S, a ∈ Im(A)}`.
    pub s_a: BTreeSet<Value>,
    /// Meet-closure of `S_A`.
    pub s_a_meet: BTreeSet<Value>,
    /// Join-closure of the meet-closure, sorted ascending in the semiring
    /// order.
    pub l_a: Vec<Value>,
}

/// One ~-class of weighted states: a state of the universal automaton.
#[derive(Debug, Clone)]
pub struct UniversalClass {
    /// Largest member of the class (pointwise join; the class is
    /// join-closed, so the join is itself a member).
    pub h: Vec<Value>,
    /// Indices into the `A₁` enumeration of every member.
    pub members: Vec<usize>,
    /// The maximal pair `(X, Y)` with `X·Y ≤ A` this class denotes.
    pub factorization: Factorization,
    /// `J = X(ε)`.
    pub j: Value,
    /// `G = Y(ε)`.
    pub g: Value,
}

/// The universal weighted automaton, as the ~-quotient `A′` of `A₁`
/// together with the materialized class data.
#[derive(Debug, Clone)]
pub struct UniversalAutomaton {
    pub classes: Vec<UniversalClass>,
    /// The quotient automaton: state `c` is `classes[c]`; its initial,
    /// final, and transition weights are the class-wise joins from `A₁`.
    pub a_prime: Wa,
    /// Internal consistency findings (empty when every cross-check holds):
    /// `J/G` against `X(ε)/Y(ε)`, `η` against the inclusion-degree formula,
    /// and the bounded audit `|A₁| = |A′| = A`.
    pub audit: Vec<String>,
}

/// The intermediate automaton `A₁` over all weighted states `l_A^Q`:
/// `J(f) = f(q₀)`, `G(f) = ⋀_q f(q) → F(q)`,
/// `η(f, σ, g) = ⋀_q fσ(q) → g(q)` with `fσ(q) = ⋁{f(p) | δ(p,σ) = q}`.
#[derive(Debug, Clone)]
pub struct A1 {
    pub wa: Wa,
    /// `weighted_states[i]` is the map `Q → l_A` of `A₁`'s state `i`,
    /// enumerated lexicographically over the sorted `l_A`.
    pub weighted_states: Vec<Vec<Value>>,
}

fn sorted_by_order(s: &Semiring, set: &BTreeSet<Value>) -> Vec<Value> {
    let mut v: Vec<Value> = set.iter().cloned().collect();
    // Key = number of elements below; ties (incomparable values) fall back
    // to the structural order, keeping the result deterministic.
    v.sort_by_key(|x| set.iter().filter(|y| s.leq(y, x)).count());
    v
}

fn close_under(
    start: &BTreeSet<Value>,
    op: impl Fn(&Value, &Value) -> Value,
    bound: usize,
    what: &str,
) -> Result<BTreeSet<Value>> {
    let mut set = start.clone();
    loop {
        let mut fresh = Vec::new();
        for x in &set {
            for y in &set {
                let z = op(x, y);
                if !set.contains(&z) {
                    fresh.push(z);
                }
            }
        }
        if fresh.is_empty() {
            return Ok(set);
        }
        set.extend(fresh);
        if set.len() > bound {
            return Err(Error::bound(what, bound));
        }
    }
}

/// Builds `S_A`, its meet-closure, and the join-closure `l_A`, refusing
/// (with `BoundExceeded`) closures larger than `bound`.
pub fn value_lattice(a: &Dwa, bound: usize) -> Result<ValueLattice> {
    let s = &a.semiring;
    let mut s_a: BTreeSet<Value> = BTreeSet::new();
    for v in a.image() {
        s_a.extend(s.residual_image(&v)?);
    }
    let s_a_meet = close_under(&s_a, |x, y| s.meet(x, y), bound, "meet-closing S_A")?;
    let joined = close_under(&s_a_meet, |x, y| s.join(x, y), bound, "join-closing S_A")?;
    Ok(ValueLattice { s_a, s_a_meet, l_a: sorted_by_order(s, &joined) })
}

/// The series `Y_f(v) = ⋀_q f(q) → Fut(q)(v)` of a weighted state,
/// realized on the vector automaton of `A`.
pub fn weighted_state_series(a: &Dwa, f: &[Value], state_bound: usize) -> Result<Series> {
    Ok(Series::from_dwa(state_weight_series(a, f, state_bound)?.minimize()))
}

/// Enumerates all weighted states `l_A^Q` and assembles `A₁`. Errors with
/// `BoundExceeded` when `|l_A|^|Q|` exceeds `state_bound`.
pub fn build_a1(a: &Dwa, lat: &ValueLattice, state_bound: usize) -> Result<A1> {
    let s = &a.semiring;
    let n = a.states();
    let k = lat.l_a.len();
    let count = k.checked_pow(n as u32).filter(|&c| c <= state_bound);
    let count = count.ok_or_else(|| Error::bound("enumerating weighted states", state_bound))?;
    let mut weighted_states = Vec::with_capacity(count);
    let mut idx = vec![0usize; n];
    loop {
        weighted_states.push(idx.iter().map(|&i| lat.l_a[i].clone()).collect::<Vec<_>>());
        let mut pos = n;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < k {
                break;
            }
            idx[pos] = 0;
        }
        if idx.iter().all(|&i| i == 0) {
            break;
        }
    }
    debug_assert_eq!(weighted_states.len(), count);

    let zero = s.zero();
    let g_of = |f: &[Value]| {
        let mut acc = s.one();
        for q in 0..n {
            acc = s.meet(&acc, &s.residual(&f[q], &a.finals[q]));
        }
        acc
    };
    // fσ(q) = ⋁{f(p) | δ(p, σ) = q}.
    let push = |f: &[Value], sym: usize| {
        let mut out = vec![zero.clone(); n];
        for p in 0..n {
            let q = a.delta[p][sym];
            out[q] = s.join(&out[q], &f[p]);
        }
        out
    };
    let mut trans = Vec::new();
    for (i, f) in weighted_states.iter().enumerate() {
        for sym in 0..a.alphabet.len() {
            let fs = push(f, sym);
            for (j, g) in weighted_states.iter().enumerate() {
                let mut w = s.one();
                for q in 0..n {
                    w = s.meet(&w, &s.residual(&fs[q], &g[q]));
                }
                if w != zero {
                    trans.push((i, sym, j, w));
                }
            }
        }
    }
    let initial = weighted_states.iter().map(|f| f[a.initial].clone()).collect();
    let finals = weighted_states.iter().map(|f| g_of(f)).collect();
    let wa = Wa {
        semiring: s.clone(),
        alphabet: a.alphabet.clone(),
        states: count,
        trans,
        initial,
        finals,
    };
    Ok(A1 { wa, weighted_states })
}

/// Builds the universal automaton of `A` by quotienting `A₁` under equal
/// `Y_f` (decided exactly on the shared vector automaton) and materializing
/// per class the largest representative, `(X, Y)`, `J`, and `G`.
pub fn universal_automaton(a: &Dwa, state_bound: usize) -> Result<UniversalAutomaton> {
    let a = a.trim();
    let s = a.semiring.clone();
    let lat = value_lattice(&a, state_bound)?;
    let a1 = build_a1(&a, &lat, state_bound)?;

    // All Y_f share the vector automaton's transition structure (it depends
    // only on A), so Y_f = Y_g iff their output vectors coincide.
    let mut class_of_sig: HashMap<Vec<Value>, usize> = HashMap::new();
    let mut partition = vec![0usize; a1.weighted_states.len()];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for (i, f) in a1.weighted_states.iter().enumerate() {
        let sig = state_weight_series(&a, f, state_bound)?.finals;
        let c = *class_of_sig.entry(sig).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        partition[i] = c;
        members[c].push(i);
    }

    let a_prime = a1.wa.merge_states(&partition);
    let a_series = Series::from_dwa(a.clone());
    let mut audit = Vec::new();
    let mut classes = Vec::with_capacity(members.len());
    for (c, mem) in members.iter().enumerate() {
        let mut h = vec![s.zero(); a.states()];
        for &i in mem {
            for q in 0..a.states() {
                h[q] = s.join(&h[q], &a1.weighted_states[i][q]);
            }
        }
        let y = weighted_state_series(&a, &h, state_bound)?;
        let x = residual(&a_series, &y, Side::Right, state_bound)?;
        let j = x.eval(&[]);
        let g = y.eval(&[]);
        if a_prime.initial[c] != j {
            audit.push(format!("J({c}) = {} but X(eps) = {j}", a_prime.initial[c]));
        }
        if a_prime.finals[c] != g {
            audit.push(format!("G({c}) = {} but Y(eps) = {g}", a_prime.finals[c]));
        }
        classes.push(UniversalClass {
            h,
            members: mem.clone(),
            factorization: Factorization { x, y },
            j,
            g,
        });
    }

    // η(c, σ, c′) must match the inclusion-degree formula (X_c·σ) →_incl X_c′.
    for c in 0..classes.len() {
        for sym in 0..a.alphabet.len() {
            let monomial = Series::poly(
                s.clone(),
                a.alphabet.clone(),
                [(vec![sym], s.one())].into_iter().collect(),
            );
            let x_sigma =
                Series::combine(RationalOp::Cauchy, &[&classes[c].factorization.x, &monomial])?;
            for c2 in 0..classes.len() {
                let want = inclusion_degree(&x_sigma, &classes[c2].factorization.x, state_bound)?;
                let got = a_prime.weight(c, sym, c2);
                if got != want {
                    audit.push(format!(
                        "eta({c},{sym},{c2}) = {got} but inclusion degree gives {want}"
                    ));
                }
            }
        }
    }

    // Bounded audit |A₁| = |A′| = A on words up to 2·|Q|.
    for w in a.alphabet.words_up_to(2 * a.states()) {
        let expect = a.eval(&w);
        if a1.wa.eval(&w) != expect {
            audit.push(format!("|A1| differs from A at a word of length {}", w.len()));
            break;
        }
        if a_prime.eval(&w) != expect {
            audit.push(format!("|A'| differs from A at a word of length {}", w.len()));
            break;
        }
    }

    Ok(UniversalAutomaton { classes, a_prime, audit })
}

/// The canonical state map from an automaton `B` with `|B| ≤ A` into the
/// universal automaton: `p ↦` the class whose `Y` equals
/// `Past_B(p) \ A`. Errors with `NotDominated` (plus a witness word) when
/// the bounded domination audit fails, and `ClassNotFound` when some
/// `Y_p` matches no class.
pub fn canonical_morphism(
    b: &Wa,
    u: &UniversalAutomaton,
    a: &Dwa,
    state_bound: usize,
) -> Result<Morphism> {
    let s = &a.semiring;
    for w in a.alphabet.words_up_to(2 * (a.states() + b.states)) {
        if !s.leq(&b.eval(&w), &a.eval(&w)) {
            return Err(Error::NotDominated { witness: w });
        }
    }
    let a_series = Series::from_dwa(a.clone());
    let class_dwas: Vec<Dwa> = u
        .classes
        .iter()
        .map(|c| Ok(c.factorization.y.to_dwa(state_bound)?.minimize()))
        .collect::<Result<_>>()?;
    let mut map = Vec::with_capacity(b.states);
    for p in 0..b.states {
        let past = Series::from_wa(b.past(p));
        let y_p = residual(&a_series, &past, Side::Left, state_bound)?
            .to_dwa(state_bound)?
            .minimize();
        let c = class_dwas.iter().position(|d| d.isomorphic(&y_p)).ok_or(Error::ClassNotFound)?;
        map.push(c);
    }
    Ok(Morphism { map })
}

/// Whether states `p` and `q` of `wa` can be merged (weights joined) while
/// still recognizing the series of `base`.
pub fn mergible(wa: &Wa, p: usize, q: usize, base: &Dwa, mode: EquivMode) -> Result<bool> {
    assert!(p < wa.states && q < wa.states && p != q);
    let (lo, hi) = (p.min(q), p.max(q));
    let mut partition = Vec::with_capacity(wa.states);
    let mut next = 0usize;
    for r in 0..wa.states {
        if r == hi {
            partition.push(partition[lo]);
        } else {
            partition.push(next);
            next += 1;
        }
    }
    let merged = wa.merge_states(&partition);
    equivalent(AutomatonRef::Wa(&merged), AutomatonRef::Dwa(base), mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::tests::contains_ab_dwa;
    use crate::Alphabet;

    #[test]
    fn value_lattice_maxmin_example() {
        let a = contains_ab_dwa();
        let lat = value_lattice(&a, 1000).unwrap();
        let expect: Vec<Value> = vec![Value::fin(1), Value::fin(2), Value::inf()];
        assert_eq!(lat.l_a, expect);
        assert_eq!(lat.s_a, expect.iter().cloned().collect());
    }

    #[test]
    fn value_lattice_boolean() {
        let a = Dwa {
            semiring: Semiring::Boolean,
            alphabet: Alphabet::of(&["a"]),
            delta: vec![vec![1], vec![1]],
            initial: 0,
            finals: vec![Value::B(true), Value::B(false)],
        };
        let lat = value_lattice(&a, 1000).unwrap();
        assert_eq!(lat.l_a, vec![Value::B(false), Value::B(true)]);
    }

    #[test]
    fn weighted_state_series_extremes() {
        let a = contains_ab_dwa();
        let s = &a.semiring;
        // f ≡ zero: 0 → x is the top element everywhere.
        let y0 = weighted_state_series(&a, &vec![s.zero(); 3], 1000).unwrap();
        // f ≡ top: Y is the meet of all futures, which here is A itself.
        let ytop = weighted_state_series(&a, &vec![Value::inf(); 3], 1000).unwrap();
        let al = a.alphabet.clone();
        for w in al.words_up_to(5) {
            assert_eq!(y0.eval(&w), Value::inf());
            assert_eq!(ytop.eval(&w), a.eval(&w), "at {w:?}");
        }
    }

    #[test]
    fn a1_sizes_and_values() {
        let a = contains_ab_dwa();
        let lat = value_lattice(&a, 1000).unwrap();
        let a1 = build_a1(&a, &lat, 1_000_000).unwrap();
        assert_eq!(a1.wa.states, 27);
        // G(f ≡ 1) = ⋀(1→1, 1→1, 1→2) = top; G(f ≡ 2) = ⋀(2→1, 2→1, 2→2) = 1.
        let pos1 = a1.weighted_states.iter().position(|f| f == &vec![Value::fin(1); 3]).unwrap();
        let pos2 = a1.weighted_states.iter().position(|f| f == &vec![Value::fin(2); 3]).unwrap();
        assert_eq!(a1.wa.finals[pos1], Value::inf());
        assert_eq!(a1.wa.finals[pos2], Value::fin(1));
        // J(f) = f(q0).
        assert_eq!(a1.wa.initial[pos2], Value::fin(2));
    }

    #[test]
    fn universal_automaton_maxmin_example() {
        let a = contains_ab_dwa();
        let u = universal_automaton(&a, 1_000_000).unwrap();
        assert!(u.audit.is_empty(), "audit: {:?}", u.audit);
        assert_eq!(u.classes.len(), 6);
        let mut reps: Vec<Vec<Value>> = u.classes.iter().map(|c| c.h.clone()).collect();
        reps.sort();
        let f = Value::fin;
        let i = Value::inf;
        let mut expect = vec![
            vec![f(1), f(1), f(2)],
            vec![f(1), f(1), i()],
            vec![f(1), f(2), f(2)],
            vec![f(1), i(), i()],
            vec![f(2), f(2), f(2)],
            vec![i(), i(), i()],
        ];
        expect.sort();
        assert_eq!(reps, expect);
        // (J, G) pairs, including the initial factorization (J=∞) and the
        // final factorization (G=∞).
        let mut jg: Vec<(Value, Value)> =
            u.classes.iter().map(|c| (c.j.clone(), c.g.clone())).collect();
        jg.sort();
        let mut expect_jg = vec![
            (f(1), i()),
            (f(1), f(2)),
            (f(1), f(1)),
            (f(1), f(1)),
            (f(2), f(1)),
            (i(), f(1)),
        ];
        expect_jg.sort();
        assert_eq!(jg, expect_jg);
        // Every class is a genuine factorization of A.
        let a_series = Series::from_dwa(a.clone());
        for c in &u.classes {
            assert!(crate::residual::is_factorization(
                &a_series,
                &c.factorization.x,
                &c.factorization.y,
                100_000
            )
            .unwrap());
        }
    }

    #[test]
    fn universal_automaton_boolean_constant_one() {
        let a = Dwa {
            semiring: Semiring::Boolean,
            alphabet: Alphabet::of(&["a"]),
            delta: vec![vec![0]],
            initial: 0,
            finals: vec![Value::B(true)],
        };
        let u = universal_automaton(&a, 1000).unwrap();
        assert!(u.audit.is_empty(), "audit: {:?}", u.audit);
        assert_eq!(u.classes.len(), 1);
        assert_eq!(u.classes[0].j, Value::B(true));
        assert_eq!(u.classes[0].g, Value::B(true));
    }

    #[test]
    fn canonical_morphism_embeds_minimal_automaton() {
        let a = contains_ab_dwa();
        let u = universal_automaton(&a, 1_000_000).unwrap();
        let m = a.minimize().to_wa();
        let phi = canonical_morphism(&m, &u, &a, 100_000).unwrap();
        // Injective: M_A is a sub-automaton of the universal automaton.
        let mut seen = std::collections::BTreeSet::new();
        for &c in &phi.map {
            assert!(seen.insert(c), "two minimal states map to class {c}");
        }
        let verdict = crate::automata::check_morphism(&m, &u.a_prime, &phi);
        assert!(verdict.plain, "violations: {:?}", verdict.violations);
    }

    #[test]
    fn canonical_morphism_rejects_dominating_series() {
        let a = contains_ab_dwa();
        let u = universal_automaton(&a, 1_000_000).unwrap();
        // The constant-∞ series is not dominated by A.
        let big = Series::constant(a.semiring.clone(), a.alphabet.clone(), Value::inf());
        let b = big.to_wa(100).unwrap();
        match canonical_morphism(&b, &u, &a, 100_000) {
            Err(Error::NotDominated { witness }) => assert!(witness.len() <= 1),
            other => panic!("expected NotDominated, got {other:?}"),
        }
    }

    #[test]
    fn universal_classes_are_not_mergible() {
        let a = contains_ab_dwa();
        let u = universal_automaton(&a, 1_000_000).unwrap();
        for p in 0..u.a_prime.states {
            for q in (p + 1)..u.a_prime.states {
                assert!(
                    !mergible(&u.a_prime, p, q, &a, EquivMode::Bounded(8)).unwrap(),
                    "classes {p} and {q} merged without changing the series"
                );
            }
        }
    }

    #[test]
    fn duplicated_states_are_mergible() {
        let a = contains_ab_dwa();
        let wa = a.to_wa();
        // Duplicate state 1: split its incoming weight across both copies is
        // not needed — an identical row merges back without harm.
        let mut padded = wa.clone();
        padded.states += 1;
        let dup = padded.states - 1;
        padded.initial.push(wa.initial[1].clone());
        padded.finals.push(wa.finals[1].clone());
        let mut extra = Vec::new();
        for (p, s, q, w) in &wa.trans {
            if *q == 1 {
                extra.push((*p, *s, dup, w.clone()));
            }
            if *p == 1 {
                extra.push((dup, *s, *q, w.clone()));
            }
        }
        padded.trans.extend(extra);
        assert!(mergible(&padded, 1, dup, &a, EquivMode::Bounded(8)).unwrap());
    }
}
