//! Weighted context-free grammars: bounded evaluation, normalization of
//! weighted automata into the two-port shape the quotient construction
//! needs, and the right-quotient grammar `G′` with
//! `|G′| = |G|·Y⁻¹` for `Y` given by a proper weighted automaton.

use std::collections::HashMap;

use crate::automata::Wa;
use crate::semiring::{Semiring, Value};
use crate::series::Series;
use crate::{Alphabet, Error, Result, Word};

/// A grammar symbol: terminal (index into the alphabet) or nonterminal
/// (index into [`Wcfg::nonterminals`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    T(usize),
    N(usize),
}

/// One weighted production `lhs → rhs` (weight stored only when nonzero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Production {
    pub lhs: usize,
    pub rhs: Vec<Sym>,
    pub weight: Value,
}

/// A weighted context-free grammar.
#[derive(Debug, Clone)]
pub struct Wcfg {
    pub semiring: Semiring,
    pub alphabet: Alphabet,
    pub nonterminals: Vec<String>,
    pub start: usize,
    pub productions: Vec<Production>,
}

impl Wcfg {
    pub fn validate(&self) -> Result<()> {
        if self.start >= self.nonterminals.len() {
            return Err(Error::Invalid("start symbol is not a declared nonterminal".into()));
        }
        for n in &self.nonterminals {
            if self.alphabet.symbols().contains(n) {
                return Err(Error::Invalid(format!("nonterminal {n} collides with a terminal")));
            }
        }
        for p in &self.productions {
            if p.lhs >= self.nonterminals.len() {
                return Err(Error::Invalid("production head out of range".into()));
            }
            for sym in &p.rhs {
                match sym {
                    Sym::T(t) if *t >= self.alphabet.len() => {
                        return Err(Error::Invalid("terminal out of range".into()))
                    }
                    Sym::N(n) if *n >= self.nonterminals.len() => {
                        return Err(Error::Invalid("nonterminal out of range".into()))
                    }
                    _ => {}
                }
            }
            if !self.semiring.contains(&p.weight) {
                return Err(Error::Invalid(format!(
                    "production weight {} outside the semiring",
                    p.weight
                )));
            }
            if p.weight == self.semiring.zero() {
                return Err(Error::Invalid("stored production weight is zero".into()));
            }
        }
        Ok(())
    }

    /// Least terminal yield of every nonterminal (`usize::MAX` when the
    /// nonterminal derives no terminal word at all).
    fn min_yield(&self) -> Vec<usize> {
        let mut y = vec![usize::MAX; self.nonterminals.len()];
        loop {
            let mut changed = false;
            for p in &self.productions {
                let mut total = 0usize;
                let mut ok = true;
                for sym in &p.rhs {
                    match sym {
                        Sym::T(_) => total += 1,
                        Sym::N(n) => {
                            if y[*n] == usize::MAX {
                                ok = false;
                                break;
                            }
                            total += y[*n];
                        }
                    }
                }
                if ok && total < y[p.lhs] {
                    y[p.lhs] = total;
                    changed = true;
                }
            }
            if !changed {
                return y;
            }
        }
    }
}

/// Hard cap on distinct search states before the evaluation refuses.
const STATE_BUDGET: usize = 500_000;

/// `|G|(w)` restricted to leftmost derivations whose sentential forms never
/// exceed `form_bound` symbols: the sum (join) of the weights of all such
/// derivations. Joins over derivations are computed to a fixpoint on the
/// deduplicated space of (consumed prefix, remaining form) pairs; forms
/// longer than the bound are cut, which for the shipped semirings never
/// loses a join-maximal derivation once the bound reaches
/// `|w|·(|N| + 2)·max-rhs-length` (longer derivations repeat a nonterminal
/// over the same span and are dominated after unpumping, `⊗` being
/// decreasing). Errors with `BoundExceeded` when the deduplicated search
/// space itself explodes.
pub fn wcfg_eval(g: &Wcfg, w: &[usize], form_bound: usize) -> Result<Value> {
    if form_bound == 0 {
        return Err(Error::Invalid("derivation bound must be at least 1".into()));
    }
    let s = &g.semiring;
    let zero = s.zero();
    let yields = g.min_yield();
    // Normalize a configuration: consume leading terminals against w,
    // returning None for dead ends (mismatch or guaranteed overshoot).
    let normalize = |mut pos: usize, form: &[Sym]| -> Option<(usize, Vec<Sym>)> {
        let mut rest = form;
        while let Some(Sym::T(t)) = rest.first() {
            if pos >= w.len() || w[pos] != *t {
                return None;
            }
            pos += 1;
            rest = &rest[1..];
        }
        let mut floor = pos;
        for sym in rest {
            let add = match sym {
                Sym::T(_) => 1,
                Sym::N(n) => yields[*n],
            };
            floor = floor.checked_add(add)?;
        }
        if floor > w.len() {
            return None;
        }
        Some((pos, rest.to_vec()))
    };

    let mut weights: HashMap<(usize, Vec<Sym>), Value> = HashMap::new();
    let mut queue: Vec<(usize, Vec<Sym>)> = Vec::new();
    if let Some(start) = normalize(0, &[Sym::N(g.start)]) {
        weights.insert(start.clone(), s.one());
        queue.push(start);
    }
    while let Some(state) = queue.pop() {
        let weight = weights[&state].clone();
        let (pos, form) = state;
        let Some(Sym::N(head)) = form.first().copied() else { continue };
        for p in &g.productions {
            if p.lhs != head {
                continue;
            }
            let mut next_form: Vec<Sym> = p.rhs.clone();
            next_form.extend_from_slice(&form[1..]);
            if next_form.len() > form_bound {
                continue;
            }
            let Some(next) = normalize(pos, &next_form) else { continue };
            let gained = s.times(&weight, &p.weight);
            if gained == zero {
                continue;
            }
            let entry = weights.entry(next.clone()).or_insert_with(|| zero.clone());
            let joined = s.join(entry, &gained);
            if joined != *entry {
                *entry = joined;
                if weights.len() > STATE_BUDGET {
                    return Err(Error::bound("derivation search states", STATE_BUDGET));
                }
                queue.push(next);
            }
        }
    }
    Ok(weights.get(&(w.len(), Vec::new())).cloned().unwrap_or(zero))
}

/// Rewrites a proper weighted automaton (`|B|(ε) = 0`) into an equivalent
/// one with a crisp initial state that has no incoming transitions and a
/// single crisp final state distinct from it: initial and final weights are
/// folded into fresh entry/exit transitions. Errors with `NotProper` when
/// `|B|(ε) ≠ 0`.
pub fn normalize_proper(b: &Wa) -> Result<Wa> {
    let s = &b.semiring;
    let zero = s.zero();
    if b.eval(&[]) != zero {
        return Err(Error::NotProper);
    }
    let n = b.states;
    let (src, dst) = (n, n + 1);
    let mut arcs: HashMap<(usize, usize, usize), Value> = HashMap::new();
    let mut add = |p: usize, sym: usize, q: usize, w: Value| {
        if w != zero {
            let acc = arcs.entry((p, sym, q)).or_insert_with(|| zero.clone());
            *acc = s.plus(acc, &w);
        }
    };
    for (p, sym, q, w) in &b.trans {
        add(*p, *sym, *q, w.clone());
        add(src, *sym, *q, s.times(&b.initial[*p], w));
        add(*p, *sym, dst, s.times(w, &b.finals[*q]));
        add(src, *sym, dst, s.times(&s.times(&b.initial[*p], w), &b.finals[*q]));
    }
    let mut trans: Vec<(usize, usize, usize, Value)> =
        arcs.into_iter().map(|((p, sym, q), w)| (p, sym, q, w)).collect();
    trans.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
    let mut initial = vec![zero.clone(); n + 2];
    initial[src] = s.one();
    let mut finals = vec![zero.clone(); n + 2];
    finals[dst] = s.one();
    Ok(Wa {
        semiring: s.clone(),
        alphabet: b.alphabet.clone(),
        states: n + 2,
        trans,
        initial,
        finals,
    })
}

fn crisp_state(v: &[Value], zero: &Value) -> usize {
    v.iter().position(|x| x != zero).expect("normalized automaton has a crisp port")
}

/// The right-quotient grammar `G′` with `|G′|(w) = Σ_u |G|(wu) ⊗ Y(u)` for
/// `Y = |B|` proper. Nonterminals of `G′` are the triples
/// `(q, v, q′)` over `B`'s normalized states and `v` a symbol of `G`; the
/// start is `(q₀, S, q_f)`; productions are the terminal emitters
/// `(q₀, x, q₀) → x` at weight one, the transition absorbers
/// `(q, x, q′) → ε` at weight `δ(q, x, q′)`, and every `G`-production
/// threaded through all interior state sequences.
pub fn wcfg_right_quotient(g: &Wcfg, b: &Wa) -> Result<Wcfg> {
    if g.semiring != b.semiring || g.alphabet != b.alphabet {
        return Err(Error::Invalid("grammar and divisor use different semirings or alphabets".into()));
    }
    let nb = normalize_proper(b)?;
    let s = &g.semiring;
    let zero = s.zero();
    let q0 = crisp_state(&nb.initial, &zero);
    let qf = crisp_state(&nb.finals, &zero);
    let nt = g.alphabet.len() + g.nonterminals.len();
    let states = nb.states;
    let triple = |q: usize, mid: usize, q2: usize| (q * nt + mid) * states + q2;
    let mid_of = |sym: &Sym| match sym {
        Sym::T(t) => *t,
        Sym::N(n) => g.alphabet.len() + *n,
    };
    let mut names = Vec::with_capacity(states * nt * states);
    for q in 0..states {
        for mid in 0..nt {
            let label = if mid < g.alphabet.len() {
                g.alphabet.symbols()[mid].clone()
            } else {
                g.nonterminals[mid - g.alphabet.len()].clone()
            };
            for q2 in 0..states {
                names.push(format!("[{q},{label},{q2}]"));
            }
        }
    }
    let mut productions = Vec::new();
    for x in 0..g.alphabet.len() {
        productions.push(Production {
            lhs: triple(q0, x, q0),
            rhs: vec![Sym::T(x)],
            weight: s.one(),
        });
    }
    for (p, sym, q, w) in &nb.trans {
        productions.push(Production { lhs: triple(*p, *sym, *q), rhs: Vec::new(), weight: w.clone() });
    }
    for prod in &g.productions {
        let n = prod.rhs.len();
        let mid = g.alphabet.len() + prod.lhs;
        if n == 0 {
            for q in 0..states {
                productions.push(Production {
                    lhs: triple(q, mid, q),
                    rhs: Vec::new(),
                    weight: prod.weight.clone(),
                });
            }
            continue;
        }
        // Interior state sequence q = s_0, s_1, …, s_n = q2.
        let mut seq = vec![0usize; n + 1];
        loop {
            let rhs: Vec<Sym> = (0..n)
                .map(|i| Sym::N(triple(seq[i], mid_of(&prod.rhs[i]), seq[i + 1])))
                .collect();
            productions.push(Production {
                lhs: triple(seq[0], mid, seq[n]),
                rhs,
                weight: prod.weight.clone(),
            });
            let mut k = 0;
            loop {
                if k > n {
                    break;
                }
                seq[k] += 1;
                if seq[k] < states {
                    break;
                }
                seq[k] = 0;
                k += 1;
            }
            if k > n {
                break;
            }
        }
    }
    Ok(Wcfg {
        semiring: s.clone(),
        alphabet: g.alphabet.clone(),
        nonterminals: names,
        start: triple(q0, g.alphabet.len() + g.start, qf),
        productions,
    })
}

/// The grammar generating the reversal `|G|^R` (every right-hand side
/// reversed; the shipped semirings are commutative).
pub fn wcfg_reverse(g: &Wcfg) -> Wcfg {
    let productions = g
        .productions
        .iter()
        .map(|p| Production {
            lhs: p.lhs,
            rhs: p.rhs.iter().rev().copied().collect(),
            weight: p.weight.clone(),
        })
        .collect();
    Wcfg { productions, ..g.clone() }
}

/// The left-quotient grammar: `X⁻¹A = (A^R (X^R)⁻¹)^R`, via the reversal of
/// the right-quotient of the reversed grammar by the reversed divisor.
pub fn wcfg_left_quotient(x: &Wa, g: &Wcfg) -> Result<Wcfg> {
    Ok(wcfg_reverse(&wcfg_right_quotient(&wcfg_reverse(g), &x.reverse())?))
}

/// `Σ_u |G|(wu) ⊗ Y(u)` over `u` of length at most `window`: the reference
/// value the right-quotient grammar is audited against.
pub fn quotient_reference(
    g: &Wcfg,
    y: &Series,
    w: &Word,
    window: usize,
    form_bound: usize,
) -> Result<Value> {
    let s = &g.semiring;
    let mut acc = s.zero();
    for u in g.alphabet.words_up_to(window) {
        let mut wu = w.clone();
        wu.extend_from_slice(&u);
        let term = s.times(&wcfg_eval(g, &wu, form_bound)?, &y.eval(&u));
        acc = s.plus(&acc, &term);
    }
    Ok(acc)
}
