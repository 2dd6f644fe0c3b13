//! Residuals, inclusion degrees, and factorizations.
//!
//! The left residual `D\A` is the largest series `Z` with `D·Z ≤ A`; the
//! right residual `A/D` is the largest `Z` with `Z·D ≤ A`. Both are computed
//! exactly on deterministic automata: the right residual keeps `A`'s
//! transition structure and re-weights the final map by a meet over
//! product-reachable state pairs; the left residual goes through the
//! weighted-state reduction — collapse the divisor to a state-indexed join
//! `g(q) = ⋁{D(u) | δ*(q0,u) = q}` and realize
//! `(D\A)(v) = ⋀_q g(q) → F(δ*(q,v))` on the vector automaton of `A`.
//!
//! A *factorization* of `A` is a maximal pair `(X, Y)` with `X·Y ≤ A`;
//! equivalently `X = A/Y` and `Y = X\A`. [`extend_to_factorization`]
//! completes any sub-factorization to a dominating factorization.
//!
//! [`residual_oracle`] is a brute-force sup-enumeration over candidate
//! series, kept only to anchor the exact implementations in tests.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::automata::Dwa;
use crate::quotient::Side;
use crate::semiring::Value;
use crate::series::{RationalOp, Repr, Series};
use crate::{Error, Result, Word};

/// A maximal pair `(X, Y)` with `X·Y ≤ A`, both sides materialized as
/// deterministic automata.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub x: Series,
    pub y: Series,
}

/// The inclusion degree `f →_incl g = ⋀_w f(w) → g(w)`. For a polynomial
/// `f` the meet runs over `supp(f)` (outside the support `f(w) = 0` and
/// `0 → x` is the top element). Otherwise both series are determinized and
/// the meet runs over the product-reachable state pairs, which is exact.
pub fn inclusion_degree(f: &Series, g: &Series, state_bound: usize) -> Result<Value> {
    if f.semiring != g.semiring || f.alphabet != g.alphabet {
        return Err(Error::Invalid("operands use different semirings or alphabets".into()));
    }
    let s = &f.semiring;
    if let Repr::Poly(terms) = &f.repr {
        let mut acc = s.one();
        for (w, fv) in terms {
            acc = s.meet(&acc, &s.residual(fv, &g.eval(w)));
        }
        return Ok(acc);
    }
    let fd = f.to_dwa(state_bound)?.trim();
    let gd = g.to_dwa(state_bound)?.trim();
    let mut acc = s.one();
    let mut seen = vec![vec![false; gd.states()]; fd.states()];
    let mut queue = VecDeque::from([(fd.initial, gd.initial)]);
    seen[fd.initial][gd.initial] = true;
    while let Some((p, q)) = queue.pop_front() {
        acc = s.meet(&acc, &s.residual(&fd.finals[p], &gd.finals[q]));
        for sym in 0..fd.alphabet.len() {
            let (p2, q2) = (fd.delta[p][sym], gd.delta[q][sym]);
            if !seen[p2][q2] {
                seen[p2][q2] = true;
                queue.push_back((p2, q2));
            }
        }
    }
    Ok(acc)
}

/// The divisor collapsed onto `A`'s states:
/// `g(q) = ⋁{D(u) | δ*(q0, u) = q}`.
pub fn state_weights_of_divisor(a: &Dwa, d: &Series, state_bound: usize) -> Result<Vec<Value>> {
    let s = &a.semiring;
    let mut g = vec![s.zero(); a.states()];
    match &d.repr {
        Repr::Poly(terms) => {
            for (u, dv) in terms {
                let q = a.run(a.initial, u);
                g[q] = s.join(&g[q], dv);
            }
        }
        _ => {
            // Determinize the divisor; then D(u) = F_D(δ*_D(u)) and the join
            // runs over the finitely many product-reachable pairs.
            let dd = d.to_dwa(state_bound)?.trim();
            let mut seen = vec![vec![false; a.states()]; dd.states()];
            let mut queue = VecDeque::from([(dd.initial, a.initial)]);
            seen[dd.initial][a.initial] = true;
            while let Some((p, q)) = queue.pop_front() {
                g[q] = s.join(&g[q], &dd.finals[p]);
                for sym in 0..a.alphabet.len() {
                    let (p2, q2) = (dd.delta[p][sym], a.delta[q][sym]);
                    if !seen[p2][q2] {
                        seen[p2][q2] = true;
                        queue.push_back((p2, q2));
                    }
                }
            }
        }
    }
    Ok(g)
}

/// The series `(v ↦ ⋀_q g(q) → F(δ*(q, v)))` realized as a deterministic
/// automaton: states are the reachable vectors `Q → Q` of the pointwise
/// transition action (starting from the identity), the output of a vector
/// `t` is `⋀_q g(q) → F(t(q))`.
pub fn state_weight_series(a: &Dwa, g: &[Value], state_bound: usize) -> Result<Dwa> {
    assert_eq!(g.len(), a.states());
    let s = &a.semiring;
    let identity: Vec<usize> = (0..a.states()).collect();
    let mut ids: HashMap<Vec<usize>, usize> = HashMap::from([(identity.clone(), 0)]);
    let mut vectors = vec![identity];
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut next = 0;
    while next < vectors.len() {
        let t = vectors[next].clone();
        let mut row = Vec::with_capacity(a.alphabet.len());
        for sym in 0..a.alphabet.len() {
            let succ: Vec<usize> = t.iter().map(|&q| a.delta[q][sym]).collect();
            let id = match ids.get(&succ) {
                Some(&id) => id,
                None => {
                    if vectors.len() >= state_bound {
                        return Err(Error::bound("building the vector automaton", state_bound));
                    }
                    let id = vectors.len();
                    ids.insert(succ.clone(), id);
                    vectors.push(succ);
                    id
                }
            };
            row.push(id);
        }
        delta.push(row);
        next += 1;
    }
    let finals = vectors
        .iter()
        .map(|t| {
            let mut acc = s.one();
            for q in 0..a.states() {
                acc = s.meet(&acc, &s.residual(&g[q], &a.finals[t[q]]));
            }
            acc
        })
        .collect();
    Ok(Dwa {
        semiring: s.clone(),
        alphabet: a.alphabet.clone(),
        delta,
        initial: 0,
        finals,
    })
}

/// The residual of `A` by `D`: `D\A` for `Side::Left` (largest `Z` with
/// `D·Z ≤ A`), `A/D` for `Side::Right` (largest `Z` with `Z·D ≤ A`). The
/// result is a deterministic automaton; `A` (and a non-polynomial `D`) must
/// determinize within `state_bound`.
pub fn residual(a: &Series, d: &Series, side: Side, state_bound: usize) -> Result<Series> {
    if a.semiring != d.semiring || a.alphabet != d.alphabet {
        return Err(Error::Invalid("divisor uses a different semiring or alphabet".into()));
    }
    let s = a.semiring.clone();
    let ad = a.to_dwa(state_bound)?.trim();
    match side {
        Side::Left => {
            let g = state_weights_of_divisor(&ad, d, state_bound)?;
            Ok(Series::from_dwa(state_weight_series(&ad, &g, state_bound)?.minimize()))
        }
        Side::Right => {
            // F'(q) = ⋀_u D(u) → F(δ*(q, u)), as a meet over the pairs
            // reachable in the product of D with A started at q.
            let finals: Result<Vec<Value>> = match &d.repr {
                Repr::Poly(terms) => Ok((0..ad.states())
                    .map(|q| {
                        let mut acc = s.one();
                        for (u, dv) in terms {
                            acc = s.meet(&acc, &s.residual(dv, &ad.finals[ad.run(q, u)]));
                        }
                        acc
                    })
                    .collect()),
                _ => {
                    let dd = d.to_dwa(state_bound)?.trim();
                    Ok((0..ad.states())
                        .map(|q| {
                            let mut acc = s.one();
                            let mut seen = vec![vec![false; ad.states()]; dd.states()];
                            let mut queue = VecDeque::from([(dd.initial, q)]);
                            seen[dd.initial][q] = true;
                            while let Some((p, r)) = queue.pop_front() {
                                acc = s.meet(&acc, &s.residual(&dd.finals[p], &ad.finals[r]));
                                for sym in 0..ad.alphabet.len() {
                                    let (p2, r2) = (dd.delta[p][sym], ad.delta[r][sym]);
                                    if !seen[p2][r2] {
                                        seen[p2][r2] = true;
                                        queue.push_back((p2, r2));
                                    }
                                }
                            }
                            acc
                        })
                        .collect())
                }
            };
            Ok(Series::from_dwa(Dwa { finals: finals?, ..ad }.minimize()))
        }
    }
}

/// Brute-force residual by sup-enumeration, used as a test oracle only.
/// Enumerates every candidate `Z` with support in words of length
/// `≤ support_len` and values in `value_set` (zero is always admitted), and
/// returns the pointwise join of all candidates whose product with the
/// divisor stays below `A` on the comparison window. The window covers the
/// candidate support plus the divisor's polynomial support (or a fixed
/// slack for automaton divisors).
pub fn residual_oracle(
    a: &Series,
    d: &Series,
    side: Side,
    support_len: usize,
    value_set: &[Value],
) -> Series {
    let s = &a.semiring;
    let words = a.alphabet.words_up_to(support_len);
    let d_span = match &d.repr {
        Repr::Poly(terms) => terms.keys().map(|w| w.len()).max().unwrap_or(0),
        _ => 3,
    };
    let window = support_len + d_span + 1;
    let mut values: Vec<Value> = value_set.to_vec();
    if !values.contains(&s.zero()) {
        values.push(s.zero());
    }
    let mut best: BTreeMap<Word, Value> = BTreeMap::new();
    let mut assignment = vec![0usize; words.len()];
    loop {
        let terms: BTreeMap<Word, Value> = words
            .iter()
            .zip(&assignment)
            .map(|(w, &i)| (w.clone(), values[i].clone()))
            .collect();
        let z = Series::poly(s.clone(), a.alphabet.clone(), terms);
        let product = match side {
            Side::Left => Series::combine(RationalOp::Cauchy, &[d, &z]).unwrap(),
            Side::Right => Series::combine(RationalOp::Cauchy, &[&z, d]).unwrap(),
        };
        let dominated =
            a.alphabet.words_up_to(window).iter().all(|w| s.leq(&product.eval(w), &a.eval(w)));
        if dominated {
            for w in &words {
                let v = z.eval(w);
                let acc = best.entry(w.clone()).or_insert_with(|| s.zero());
                *acc = s.join(acc, &v);
            }
        }
        // Advance the mixed-radix counter over candidate assignments.
        let mut k = 0;
        loop {
            if k == assignment.len() {
                return Series::poly(s.clone(), a.alphabet.clone(), best);
            }
            assignment[k] += 1;
            if assignment[k] < values.len() {
                break;
            }
            assignment[k] = 0;
            k += 1;
        }
    }
}

/// Whether `(X, Y)` is a factorization of `A`: recomputes `A/Y` and `X\A`
/// and compares by exact deterministic-automaton equivalence.
pub fn is_factorization(
    a: &Series,
    x: &Series,
    y: &Series,
    state_bound: usize,
) -> Result<bool> {
    let ay = residual(a, y, Side::Right, state_bound)?.to_dwa(state_bound)?;
    let xa = residual(a, x, Side::Left, state_bound)?.to_dwa(state_bound)?;
    let xd = x.to_dwa(state_bound)?.minimize();
    let yd = y.to_dwa(state_bound)?.minimize();
    Ok(ay.minimize().isomorphic(&xd) && xa.minimize().isomorphic(&yd))
}

/// Completes a sub-factorization `(W, Z)` (checked on the audit window
/// `2·(|Q_A| + |Q_Z|)`) to the dominating factorization
/// `X = A/Z`, `Y = X\A`.
pub fn extend_to_factorization(
    a: &Series,
    w: &Series,
    z: &Series,
    state_bound: usize,
) -> Result<Factorization> {
    let s = &a.semiring;
    let product = Series::combine(RationalOp::Cauchy, &[w, z])?;
    let horizon = 2 * (a.to_dwa(state_bound)?.trim().states()
        + z.to_dwa(state_bound)?.trim().states());
    for word in a.alphabet.words_up_to(horizon) {
        if !s.leq(&product.eval(&word), &a.eval(&word)) {
            return Err(Error::NotSubFactorization { witness: word });
        }
    }
    let x = residual(a, z, Side::Right, state_bound)?;
    let y = residual(a, &x, Side::Left, state_bound)?;
    Ok(Factorization { x, y })
}
