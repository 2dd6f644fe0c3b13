//! Formal power series values.
//!
//! A [`Series`] assigns a semiring weight to every word over its alphabet. It
//! is stored in one of four interchangeable base representations — finite-
//! support polynomial, weighted step function (values attached to disjoint
//! regular languages), deterministic weighted automaton, or nondeterministic
//! weighted automaton — or as a lazy rational composite (sum, Cauchy product,
//! scalar products, reversal, star) over other series.
//!
//! Evaluation is pure and exact. Because every shipped semiring is idempotent
//! with the multiplicative unit on top, the Kleene star is evaluated exactly
//! by a quadratic prefix dynamic program (decompositions with empty factors
//! are absorbed by the order), and `c* = 1` for every scalar `c`.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::automata::{Dwa, Wa};
use crate::semiring::{Semiring, Value};
use crate::{Alphabet, Error, Result, Word};

/// An unweighted deterministic finite automaton, used by the step-function
/// representation to carve the word set into disjoint regions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dfa {
    pub alphabet: Alphabet,
    /// `delta[q][s]` is the successor of state `q` on symbol id `s`.
    pub delta: Vec<Vec<usize>>,
    pub initial: usize,
    pub accepting: Vec<bool>,
}

impl Dfa {
    pub fn states(&self) -> usize {
        self.delta.len()
    }

    pub fn run(&self, q: usize, w: &[usize]) -> usize {
        w.iter().fold(q, |q, &s| self.delta[q][s])
    }

    pub fn accepts(&self, w: &[usize]) -> bool {
        self.accepting[self.run(self.initial, w)]
    }

    pub fn complement(&self) -> Dfa {
        Dfa { accepting: self.accepting.iter().map(|b| !b).collect(), ..self.clone() }
    }
}

/// The stored shape of a series.
#[derive(Debug, Clone)]
pub enum Repr {
    /// Finite support: absent words have weight zero; stored weights are
    /// nonzero.
    Poly(BTreeMap<Word, Value>),
    /// Weighted step function: `Σ r_i · L_i` with pairwise disjoint `L_i`
    /// and nonzero `r_i`.
    Step(Vec<(Value, Dfa)>),
    Dwa(Dwa),
    Wa(Wa),
    // Lazy rational composites.
    Sum(Box<Series>, Box<Series>),
    Cauchy(Box<Series>, Box<Series>),
    ScalarLeft(Value, Box<Series>),
    ScalarRight(Box<Series>, Value),
    Reversal(Box<Series>),
    Star(Box<Series>),
    /// The proper part: agrees with the inner series on nonempty words and
    /// is zero at the empty word.
    ProperPart(Box<Series>),
}

/// A formal power series over a fixed semiring and alphabet.
#[derive(Debug, Clone)]
pub struct Series {
    pub semiring: Semiring,
    pub alphabet: Alphabet,
    pub repr: Repr,
}

/// Names the binary/unary rational operations for [`Series::combine`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RationalOp {
    Sum,
    Cauchy,
    ScalarLeft(Value),
    ScalarRight(Value),
    Reversal,
    Star,
}

impl Series {
    /// A polynomial series; zero-valued terms are dropped.
    pub fn poly(semiring: Semiring, alphabet: Alphabet, terms: BTreeMap<Word, Value>) -> Series {
        let zero = semiring.zero();
        let terms = terms.into_iter().filter(|(_, v)| *v != zero).collect();
        Series { semiring, alphabet, repr: Repr::Poly(terms) }
    }

    /// The constant-zero series.
    pub fn zero(semiring: Semiring, alphabet: Alphabet) -> Series {
        Series { semiring, alphabet, repr: Repr::Poly(BTreeMap::new()) }
    }

    /// The series that is `v` at the empty word and zero elsewhere.
    pub fn scalar_monomial(semiring: Semiring, alphabet: Alphabet, v: Value) -> Series {
        Series::poly(semiring, alphabet, BTreeMap::from([(vec![], v)]))
    }

    /// The constant series `w ↦ v`.
    pub fn constant(semiring: Semiring, alphabet: Alphabet, v: Value) -> Series {
        let n = alphabet.len();
        let dwa = Dwa {
            semiring: semiring.clone(),
            alphabet: alphabet.clone(),
            delta: vec![vec![0; n]],
            initial: 0,
            finals: vec![v],
        };
        Series { semiring, alphabet, repr: Repr::Dwa(dwa) }
    }

    pub fn from_dwa(dwa: Dwa) -> Series {
        Series { semiring: dwa.semiring.clone(), alphabet: dwa.alphabet.clone(), repr: Repr::Dwa(dwa) }
    }

    pub fn from_wa(wa: Wa) -> Series {
        Series { semiring: wa.semiring.clone(), alphabet: wa.alphabet.clone(), repr: Repr::Wa(wa) }
    }

    /// The coefficient `(A, w)`.
    pub fn eval(&self, w: &[usize]) -> Value {
        let s = &self.semiring;
        match &self.repr {
            Repr::Poly(terms) => terms.get(w).cloned().unwrap_or_else(|| s.zero()),
            Repr::Step(parts) => parts
                .iter()
                .find(|(_, l)| l.accepts(w))
                .map(|(r, _)| r.clone())
                .unwrap_or_else(|| s.zero()),
            Repr::Dwa(a) => a.eval(w),
            Repr::Wa(a) => a.eval(w),
            Repr::Sum(a, b) => s.plus(&a.eval(w), &b.eval(w)),
            Repr::Cauchy(a, b) => {
                let mut acc = s.zero();
                for i in 0..=w.len() {
                    acc = s.plus(&acc, &s.times(&a.eval(&w[..i]), &b.eval(&w[i..])));
                }
                acc
            }
            Repr::ScalarLeft(r, a) => s.times(r, &a.eval(w)),
            Repr::ScalarRight(a, r) => s.times(&a.eval(w), r),
            Repr::Reversal(a) => {
                let rev: Word = w.iter().rev().cloned().collect();
                a.eval(&rev)
            }
            Repr::Star(a) => {
                // Exact for idempotent ⊕ with 1 on top: decompositions with
                // empty factors are dominated by the same decomposition
                // without them, so only nonempty-factor splits matter.
                let n = w.len();
                let mut d = vec![s.zero(); n + 1];
                d[0] = s.one();
                for i in 1..=n {
                    for j in 0..i {
                        let term = s.times(&d[j], &a.eval(&w[j..i]));
                        d[i] = s.plus(&d[i], &term);
                    }
                }
                d[n].clone()
            }
            Repr::ProperPart(a) => {
                if w.is_empty() {
                    s.zero()
                } else {
                    a.eval(w)
                }
            }
        }
    }

    /// Applies a rational operation. When every operand is a polynomial the
    /// result is materialized as a polynomial (except `star`, whose support
    /// is infinite; it stays lazy — use [`Series::to_poly_up_to`] to
    /// truncate). Operands must share semiring and alphabet.
    pub fn combine(op: RationalOp, args: &[&Series]) -> Result<Series> {
        let arity = match op {
            RationalOp::Sum | RationalOp::Cauchy => 2,
            _ => 1,
        };
        if args.len() != arity {
            return Err(Error::Invalid(format!("{op:?} expects {arity} operand(s)")));
        }
        let first = args[0];
        for a in args {
            if a.semiring != first.semiring || a.alphabet != first.alphabet {
                return Err(Error::Invalid(
                    "operands use different semirings or alphabets".into(),
                ));
            }
        }
        if let RationalOp::ScalarLeft(r) | RationalOp::ScalarRight(r) = &op {
            if !first.semiring.contains(r) {
                return Err(Error::Invalid(format!("scalar {r} outside the semiring")));
            }
        }
        let s = first.semiring.clone();
        let alphabet = first.alphabet.clone();
        let all_poly = args.iter().all(|a| matches!(a.repr, Repr::Poly(_)));

        if all_poly && op != RationalOp::Star {
            let get = |i: usize| match &args[i].repr {
                Repr::Poly(t) => t,
                _ => unreachable!(),
            };
            let mut out: BTreeMap<Word, Value> = BTreeMap::new();
            let mut add = |w: Word, v: Value| {
                let acc = out.entry(w).or_insert_with(|| s.zero());
                *acc = s.plus(acc, &v);
            };
            match &op {
                RationalOp::Sum => {
                    for (w, v) in get(0).iter().chain(get(1)) {
                        add(w.clone(), v.clone());
                    }
                }
                RationalOp::Cauchy => {
                    for (u, x) in get(0) {
                        for (v, y) in get(1) {
                            let mut w = u.clone();
                            w.extend(v);
                            add(w, s.times(x, y));
                        }
                    }
                }
                RationalOp::ScalarLeft(r) => {
                    for (w, v) in get(0) {
                        add(w.clone(), s.times(r, v));
                    }
                }
                RationalOp::ScalarRight(r) => {
                    for (w, v) in get(0) {
                        add(w.clone(), s.times(v, r));
                    }
                }
                RationalOp::Reversal => {
                    for (w, v) in get(0) {
                        add(w.iter().rev().cloned().collect(), v.clone());
                    }
                }
                RationalOp::Star => unreachable!(),
            }
            return Ok(Series::poly(s, alphabet, out));
        }

        let boxed = |i: usize| Box::new(args[i].clone());
        let repr = match op {
            RationalOp::Sum => Repr::Sum(boxed(0), boxed(1)),
            RationalOp::Cauchy => Repr::Cauchy(boxed(0), boxed(1)),
            RationalOp::ScalarLeft(r) => Repr::ScalarLeft(r, boxed(0)),
            RationalOp::ScalarRight(r) => Repr::ScalarRight(boxed(0), r),
            RationalOp::Reversal => Repr::Reversal(boxed(0)),
            RationalOp::Star => Repr::Star(boxed(0)),
        };
        Ok(Series { semiring: s, alphabet, repr })
    }

    /// Splits off the empty-word coefficient: returns `(A(ε), A')` where
    /// `A'` is the proper part of `A` (zero at ε, equal to `A` elsewhere).
    pub fn proper_split(&self) -> (Value, Series) {
        let eps = self.eval(&[]);
        let proper = match &self.repr {
            Repr::Poly(terms) => {
                let mut t = terms.clone();
                t.remove(&vec![]);
                Series { semiring: self.semiring.clone(), alphabet: self.alphabet.clone(), repr: Repr::Poly(t) }
            }
            _ => Series {
                semiring: self.semiring.clone(),
                alphabet: self.alphabet.clone(),
                repr: Repr::ProperPart(Box::new(self.clone())),
            },
        };
        (eps, proper)
    }

    /// The polynomial of all coefficients on words of length `≤ max_len`.
    pub fn to_poly_up_to(&self, max_len: usize) -> Series {
        let mut terms = BTreeMap::new();
        let zero = self.semiring.zero();
        for w in self.alphabet.words_up_to(max_len) {
            let v = self.eval(&w);
            if v != zero {
                terms.insert(w, v);
            }
        }
        Series { semiring: self.semiring.clone(), alphabet: self.alphabet.clone(), repr: Repr::Poly(terms) }
    }

    /// The distinct coefficients observed on words of length `≤ max_len`.
    /// A lower bound for `Im(A)`; useful as a probe when the exact image is
    /// unavailable.
    pub fn image_probe(&self, max_len: usize) -> BTreeSet<Value> {
        self.alphabet.words_up_to(max_len).iter().map(|w| self.eval(w)).collect()
    }

    /// The exact image `Im(A) = {A(w) | w ∈ Σ*}`. Polynomial, step, and
    /// deterministic representations are exact and cheap; everything else is
    /// determinized first and may exceed `state_bound`.
    pub fn image(&self, state_bound: usize) -> Result<BTreeSet<Value>> {
        match &self.repr {
            Repr::Dwa(a) => Ok(a.image()),
            Repr::Poly(terms) => {
                let mut out: BTreeSet<Value> = terms.values().cloned().collect();
                // Some word lies outside a finite support unless the support
                // is {ε} over the empty alphabet.
                if !self.alphabet.is_empty() || !terms.contains_key(&vec![]) {
                    out.insert(self.semiring.zero());
                }
                Ok(out)
            }
            _ => Ok(self.to_dwa(state_bound)?.image()),
        }
    }

    /// Converts to a deterministic weighted automaton recognizing the same
    /// series. Polynomials build an exact trie; step functions build the
    /// product of their region DFAs; everything else goes through the
    /// weighted subset construction, which may exceed `state_bound`.
    pub fn to_dwa(&self, state_bound: usize) -> Result<Dwa> {
        match &self.repr {
            Repr::Dwa(a) => Ok(a.clone()),
            Repr::Poly(terms) => Ok(poly_to_dwa(&self.semiring, &self.alphabet, terms)),
            Repr::Step(parts) => step_to_dwa(&self.semiring, &self.alphabet, parts, state_bound),
            _ => self.to_wa(state_bound)?.determinize(state_bound),
        }
    }

    /// Converts to a (generally nondeterministic) weighted automaton by
    /// structural induction: sums become disjoint unions, Cauchy products
    /// become bridged concatenations, stars add a fresh unit state with
    /// loop-back bridges (`c* = 1` for every scalar in these semirings),
    /// reversal transposes, and scalars rescale the initial or final map.
    pub fn to_wa(&self, state_bound: usize) -> Result<Wa> {
        match &self.repr {
            Repr::Dwa(a) => Ok(a.to_wa()),
            Repr::Wa(a) => Ok(a.clone()),
            Repr::Poly(terms) => Ok(poly_to_dwa(&self.semiring, &self.alphabet, terms).to_wa()),
            Repr::Step(parts) => {
                Ok(step_to_dwa(&self.semiring, &self.alphabet, parts, state_bound)?.to_wa())
            }
            Repr::Sum(a, b) => {
                Ok(wa_union(&a.to_wa(state_bound)?, &b.to_wa(state_bound)?))
            }
            Repr::Cauchy(a, b) => {
                Ok(wa_cauchy(&a.to_wa(state_bound)?, &b.to_wa(state_bound)?))
            }
            Repr::ScalarLeft(r, a) => {
                let mut wa = a.to_wa(state_bound)?;
                for v in wa.initial.iter_mut() {
                    *v = wa.semiring.times(r, v);
                }
                Ok(wa)
            }
            Repr::ScalarRight(a, r) => {
                let mut wa = a.to_wa(state_bound)?;
                for v in wa.finals.iter_mut() {
                    *v = wa.semiring.times(v, r);
                }
                Ok(wa)
            }
            Repr::Reversal(a) => Ok(a.to_wa(state_bound)?.reverse()),
            Repr::Star(a) => Ok(wa_star(&a.to_wa(state_bound)?)),
            Repr::ProperPart(a) => Ok(wa_proper_part(&a.to_wa(state_bound)?)),
        }
    }

    /// Partitions a deterministic representation into a weighted step
    /// function: one region DFA per distinct nonzero final weight.
    pub fn to_step_function(&self, state_bound: usize) -> Result<Series> {
        let a = self.to_dwa(state_bound)?.trim();
        let zero = a.semiring.zero();
        let weights: BTreeSet<Value> =
            a.finals.iter().filter(|v| **v != zero).cloned().collect();
        let parts = weights
            .into_iter()
            .map(|r| {
                let dfa = Dfa {
                    alphabet: a.alphabet.clone(),
                    delta: a.delta.clone(),
                    initial: a.initial,
                    accepting: a.finals.iter().map(|v| *v == r).collect(),
                };
                (r, dfa)
            })
            .collect();
        Ok(Series {
            semiring: self.semiring.clone(),
            alphabet: self.alphabet.clone(),
            repr: Repr::Step(parts),
        })
    }

    /// Pointwise equality on all words of length `≤ max_len`; returns the
    /// first differing word, if any.
    pub fn difference_up_to(&self, other: &Series, max_len: usize) -> Option<Word> {
        self.alphabet
            .words_up_to(max_len)
            .into_iter()
            .find(|w| self.eval(w) != other.eval(w))
    }
}

/// Exact trie automaton for a finite-support series: one state per support
/// prefix plus a zero sink.
fn poly_to_dwa(s: &Semiring, alphabet: &Alphabet, terms: &BTreeMap<Word, Value>) -> Dwa {
    let mut prefixes: BTreeSet<Word> = BTreeSet::from([vec![]]);
    for w in terms.keys() {
        for i in 0..=w.len() {
            prefixes.insert(w[..i].to_vec());
        }
    }
    let prefixes: Vec<Word> = prefixes.into_iter().collect();
    let index: BTreeMap<&Word, usize> = prefixes.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let sink = prefixes.len();
    let mut delta = Vec::with_capacity(sink + 1);
    for w in &prefixes {
        let row = (0..alphabet.len())
            .map(|sym| {
                let mut w2 = w.clone();
                w2.push(sym);
                index.get(&w2).copied().unwrap_or(sink)
            })
            .collect();
        delta.push(row);
    }
    delta.push(vec![sink; alphabet.len()]);
    let mut finals: Vec<Value> =
        prefixes.iter().map(|w| terms.get(w).cloned().unwrap_or_else(|| s.zero())).collect();
    finals.push(s.zero());
    Dwa {
        semiring: s.clone(),
        alphabet: alphabet.clone(),
        delta,
        initial: index[&vec![]],
        finals,
    }
}

/// Product construction over the region DFAs of a step function. Weights of
/// overlapping regions (which a valid step function does not have) are
/// joined.
fn step_to_dwa(
    s: &Semiring,
    alphabet: &Alphabet,
    parts: &[(Value, Dfa)],
    state_bound: usize,
) -> Result<Dwa> {
    if parts.is_empty() {
        return Ok(Dwa {
            semiring: s.clone(),
            alphabet: alphabet.clone(),
            delta: vec![vec![0; alphabet.len()]],
            initial: 0,
            finals: vec![s.zero()],
        });
    }
    let start: Vec<usize> = parts.iter().map(|(_, d)| d.initial).collect();
    let mut ids: BTreeMap<Vec<usize>, usize> = BTreeMap::from([(start.clone(), 0)]);
    let mut tuples = vec![start];
    let mut delta: Vec<Vec<usize>> = Vec::new();
    let mut next = 0;
    while next < tuples.len() {
        let t = tuples[next].clone();
        let mut row = Vec::with_capacity(alphabet.len());
        for sym in 0..alphabet.len() {
            let succ: Vec<usize> =
                parts.iter().zip(&t).map(|((_, d), &q)| d.delta[q][sym]).collect();
            let id = match ids.get(&succ) {
                Some(&id) => id,
                None => {
                    if tuples.len() >= state_bound {
                        return Err(Error::bound("building step-function product", state_bound));
                    }
                    let id = tuples.len();
                    ids.insert(succ.clone(), id);
                    tuples.push(succ);
                    id
                }
            };
            row.push(id);
        }
        delta.push(row);
        next += 1;
    }
    let finals = tuples
        .iter()
        .map(|t| {
            let mut acc = s.zero();
            for ((r, d), &q) in parts.iter().zip(t) {
                if d.accepting[q] {
                    acc = s.join(&acc, r);
                }
            }
            acc
        })
        .collect();
    Ok(Dwa { semiring: s.clone(), alphabet: alphabet.clone(), delta, initial: 0, finals })
}

/// Disjoint union: recognizes the pointwise sum.
fn wa_union(a: &Wa, b: &Wa) -> Wa {
    let shift = a.states;
    Wa {
        semiring: a.semiring.clone(),
        alphabet: a.alphabet.clone(),
        states: a.states + b.states,
        trans: a
            .trans
            .iter()
            .cloned()
            .chain(b.trans.iter().map(|(p, s, q, w)| (p + shift, *s, q + shift, w.clone())))
            .collect(),
        initial: a.initial.iter().chain(&b.initial).cloned().collect(),
        finals: a.finals.iter().chain(&b.finals).cloned().collect(),
    }
}

/// Bridged concatenation: `A` states keep their transitions; each `B`
/// transition `(p, σ, q, w)` also enters from every `A` state `r` with
/// weight `F_A(r) ⊗ I_B(p) ⊗ w`; `A` states gain final weight
/// `F_A(r) ⊗ B(ε)`.
fn wa_cauchy(a: &Wa, b: &Wa) -> Wa {
    let s = &a.semiring;
    let zero = s.zero();
    let shift = a.states;
    let mut trans = a.trans.clone();
    for (p, sym, q, w) in &b.trans {
        trans.push((p + shift, *sym, q + shift, w.clone()));
        let enter = s.times(&b.initial[*p], w);
        if enter == zero {
            continue;
        }
        for r in 0..a.states {
            let weight = s.times(&a.finals[r], &enter);
            if weight != zero {
                trans.push((r, *sym, q + shift, weight));
            }
        }
    }
    let b_eps = b.eval(&[]);
    let finals = a
        .finals
        .iter()
        .map(|f| s.times(f, &b_eps))
        .chain(b.finals.iter().cloned())
        .collect();
    let initial = a.initial.iter().cloned().chain(vec![zero; b.states]).collect();
    Wa {
        semiring: s.clone(),
        alphabet: a.alphabet.clone(),
        states: a.states + b.states,
        trans: dedupe_trans(s, trans),
        initial,
        finals,
    }
}

/// Star construction: a fresh unit initial/final state for the empty word,
/// plus loop-back bridges `(r, σ, q, F(r) ⊗ I(p) ⊗ w)` for every transition
/// `(p, σ, q, w)`. Scalar stars are all 1 here, so no ε-cycle correction is
/// needed.
fn wa_star(a: &Wa) -> Wa {
    let s = &a.semiring;
    let zero = s.zero();
    let mut trans = a.trans.clone();
    for (p, sym, q, w) in &a.trans {
        let enter = s.times(&a.initial[*p], w);
        if enter == zero {
            continue;
        }
        for r in 0..a.states {
            let weight = s.times(&a.finals[r], &enter);
            if weight != zero {
                trans.push((r, *sym, *q, weight));
            }
        }
    }
    // The fresh state is isolated apart from its unit initial and final
    // weights; it contributes exactly the ε coefficient 1.
    let mut initial = a.initial.clone();
    initial.push(s.one());
    let mut finals = a.finals.clone();
    finals.push(s.one());
    Wa {
        semiring: s.clone(),
        alphabet: a.alphabet.clone(),
        states: a.states + 1,
        trans: dedupe_trans(s, trans),
        initial,
        finals,
    }
}

/// Removes the empty-word coefficient: a fresh copy of the initial vector is
/// split so that final weights are only reachable after at least one symbol.
fn wa_proper_part(a: &Wa) -> Wa {
    let s = &a.semiring;
    let zero = s.zero();
    // New start state `n` duplicating the initial vector's outgoing arcs,
    // with zero final weight; original initial weights dropped.
    let n = a.states;
    let mut trans = a.trans.clone();
    for (p, sym, q, w) in &a.trans {
        let weight = s.times(&a.initial[*p], w);
        if weight != zero {
            trans.push((n, *sym, *q, weight));
        }
    }
    let mut initial = vec![zero.clone(); n + 1];
    initial[n] = s.one();
    let mut finals = a.finals.clone();
    finals.push(zero);
    Wa {
        semiring: s.clone(),
        alphabet: a.alphabet.clone(),
        states: n + 1,
        trans: dedupe_trans(s, trans),
        initial,
        finals,
    }
}

/// Sums parallel transition weights and drops zeros, keeping a sorted,
/// deterministic transition list.
fn dedupe_trans(s: &Semiring, trans: Vec<(usize, usize, usize, Value)>) -> Vec<(usize, usize, usize, Value)> {
    let zero = s.zero();
    let mut acc: BTreeMap<(usize, usize, usize), Value> = BTreeMap::new();
    for (p, sym, q, w) in trans {
        let slot = acc.entry((p, sym, q)).or_insert_with(|| zero.clone());
        *slot = s.plus(slot, &w);
    }
    acc.into_iter().filter(|(_, w)| *w != zero).map(|((p, sym, q), w)| (p, sym, q, w)).collect()
}
