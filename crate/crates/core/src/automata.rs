//! Deterministic and nondeterministic weighted automata.
//!
//! A [`Dwa`] has crisp, total, deterministic transitions and weights only on
//! its final map: it evaluates a word `w` to `F(δ*(q0, w))`. A [`Wa`] has a
//! weighted transition relation and weighted initial and final maps: it
//! evaluates `w` to the sum over all paths of
//! `I(p) ⊗ δ*(p, w, q) ⊗ F(q)`, computed here by forward weighted-vector
//! iteration.
//!
//! The module also provides trimming to the accessible part, Moore-style
//! minimization, weighted subset determinization, the past/future/transition
//! series of a state, morphism checking (plain, surjective, strong), state
//! merging along a partition, and equivalence tests.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::semiring::{Semiring, Value};
use crate::{Alphabet, Error, Result, Word};

/// A deterministic weighted automaton: total crisp transitions, one initial
/// state, and a final-weight map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dwa {
    pub semiring: Semiring,
    pub alphabet: Alphabet,
    /// `delta[q][s]` is the successor of state `q` on symbol id `s`.
    pub delta: Vec<Vec<usize>>,
    pub initial: usize,
    /// `finals[q]` is the output weight of state `q`.
    pub finals: Vec<Value>,
}

impl Dwa {
    pub fn states(&self) -> usize {
        self.delta.len()
    }

    /// Structural validation: totality of `delta`, index ranges, and value
    /// encodings.
    pub fn validate(&self) -> Result<()> {
        let n = self.states();
        if n == 0 {
            return Err(Error::Invalid("automaton has no states".into()));
        }
        if self.finals.len() != n {
            return Err(Error::Invalid("final map length differs from state count".into()));
        }
        if self.initial >= n {
            return Err(Error::Invalid("initial state out of range".into()));
        }
        for (q, row) in self.delta.iter().enumerate() {
            if row.len() != self.alphabet.len() {
                return Err(Error::Invalid(format!("delta not total at state {q}")));
            }
            if let Some(&t) = row.iter().find(|&&t| t >= n) {
                return Err(Error::Invalid(format!("delta target {t} out of range")));
            }
        }
        for v in &self.finals {
            if !self.semiring.contains(v) {
                return Err(Error::Invalid(format!("final weight {v} outside the semiring")));
            }
        }
        Ok(())
    }

    pub fn step(&self, q: usize, sym: usize) -> usize {
        self.delta[q][sym]
    }

    /// `δ*(q, w)`.
    pub fn run(&self, q: usize, w: &[usize]) -> usize {
        w.iter().fold(q, |q, &s| self.delta[q][s])
    }

    /// `F(δ*(q0, w))`.
    pub fn eval(&self, w: &[usize]) -> Value {
        self.finals[self.run(self.initial, w)].clone()
    }

    /// States reachable from the initial state, in BFS discovery order
    /// (symbols explored in id order).
    pub fn accessible(&self) -> Vec<usize> {
        let mut seen = vec![false; self.states()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([self.initial]);
        seen[self.initial] = true;
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for s in 0..self.alphabet.len() {
                let t = self.delta[q][s];
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        order
    }

    /// Restriction to the accessible part, with states renumbered in BFS
    /// order (so the result is canonical for its reachable structure).
    pub fn trim(&self) -> Dwa {
        let order = self.accessible();
        let mut index = vec![usize::MAX; self.states()];
        for (i, &q) in order.iter().enumerate() {
            index[q] = i;
        }
        Dwa {
            semiring: self.semiring.clone(),
            alphabet: self.alphabet.clone(),
            delta: order
                .iter()
                .map(|&q| (0..self.alphabet.len()).map(|s| index[self.delta[q][s]]).collect())
                .collect(),
            initial: 0,
            finals: order.iter().map(|&q| self.finals[q].clone()).collect(),
        }
    }

    /// The exact image `Im(A) = {F(q) | q accessible}`.
    pub fn image(&self) -> BTreeSet<Value> {
        self.accessible().into_iter().map(|q| self.finals[q].clone()).collect()
    }

    /// Moore-style minimization: partition refinement starting from the
    /// final-weight partition, restricted to the accessible part. The result
    /// has one state per left quotient of the recognized series and is
    /// renumbered canonically.
    pub fn minimize(&self) -> Dwa {
        let a = self.trim();
        let n = a.states();
        // Initial partition: by final weight.
        let mut block = vec![0usize; n];
        {
            let mut ids: HashMap<Value, usize> = HashMap::new();
            for q in 0..n {
                let next = ids.len();
                block[q] = *ids.entry(a.finals[q].clone()).or_insert(next);
            }
        }
        loop {
            // Refine: signature = (block, successor blocks per symbol).
            let mut ids: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
            let mut next_block = vec![0usize; n];
            for q in 0..n {
                let sig =
                    (block[q], (0..a.alphabet.len()).map(|s| block[a.delta[q][s]]).collect());
                let fresh = ids.len();
                next_block[q] = *ids.entry(sig).or_insert(fresh);
            }
            let stable = ids.len() == block.iter().collect::<BTreeSet<_>>().len()
                && (0..n).all(|q| {
                    (0..n).all(|p| (block[q] == block[p]) == (next_block[q] == next_block[p]))
                });
            block = next_block;
            if stable {
                break;
            }
        }
        // Build the quotient automaton over blocks.
        let k = block.iter().max().unwrap() + 1;
        let mut delta = vec![vec![usize::MAX; a.alphabet.len()]; k];
        let mut finals = vec![a.semiring.zero(); k];
        for q in 0..n {
            let b = block[q];
            finals[b] = a.finals[q].clone();
            for s in 0..a.alphabet.len() {
                delta[b][s] = block[a.delta[q][s]];
            }
        }
        Dwa {
            semiring: a.semiring.clone(),
            alphabet: a.alphabet.clone(),
            delta,
            initial: block[a.initial],
            finals,
        }
        .trim()
    }

    /// Structural isomorphism with final-weight preservation, decided by
    /// comparing canonical (trimmed, BFS-renumbered) forms. Intended for
    /// minimized automata, where the canonical form is unique.
    pub fn isomorphic(&self, other: &Dwa) -> bool {
        let a = self.trim();
        let b = other.trim();
        a.delta == b.delta && a.finals == b.finals && a.initial == b.initial
    }

    /// The same series as a weighted automaton.
    pub fn to_wa(&self) -> Wa {
        let one = self.semiring.one();
        let mut initial = vec![self.semiring.zero(); self.states()];
        initial[self.initial] = one.clone();
        Wa {
            semiring: self.semiring.clone(),
            alphabet: self.alphabet.clone(),
            states: self.states(),
            trans: (0..self.states())
                .flat_map(|q| {
                    let one = one.clone();
                    (0..self.alphabet.len()).map(move |s| (q, s, self.delta[q][s], one.clone()))
                })
                .collect(),
            initial,
            finals: self.finals.clone(),
        }
    }
}

/// A weighted automaton: weighted transition relation (absent triples carry
/// weight zero) and weighted initial and final maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wa {
    pub semiring: Semiring,
    pub alphabet: Alphabet,
    pub states: usize,
    /// Nonzero transitions `(p, symbol, q, weight)`.
    pub trans: Vec<(usize, usize, usize, Value)>,
    pub initial: Vec<Value>,
    pub finals: Vec<Value>,
}

impl Wa {
    /// Structural validation: index ranges, map lengths, value encodings,
    /// and nonzero stored weights.
    pub fn validate(&self) -> Result<()> {
        if self.states == 0 {
            return Err(Error::Invalid("automaton has no states".into()));
        }
        if self.initial.len() != self.states || self.finals.len() != self.states {
            return Err(Error::Invalid("initial/final map length differs from state count".into()));
        }
        for (p, s, q, w) in &self.trans {
            if *p >= self.states || *q >= self.states {
                return Err(Error::Invalid("transition endpoint out of range".into()));
            }
            if *s >= self.alphabet.len() {
                return Err(Error::Invalid("transition symbol out of range".into()));
            }
            if !self.semiring.contains(w) {
                return Err(Error::Invalid(format!("transition weight {w} outside the semiring")));
            }
            if *w == self.semiring.zero() {
                return Err(Error::Invalid("stored transition weight is zero".into()));
            }
        }
        for v in self.initial.iter().chain(&self.finals) {
            if !self.semiring.contains(v) {
                return Err(Error::Invalid(format!("state weight {v} outside the semiring")));
            }
        }
        Ok(())
    }

    /// Transition weight `δ(p, s, q)` (zero if absent).
    pub fn weight(&self, p: usize, s: usize, q: usize) -> Value {
        let mut acc = self.semiring.zero();
        for (tp, ts, tq, w) in &self.trans {
            if *tp == p && *ts == s && *tq == q {
                acc = self.semiring.plus(&acc, w);
            }
        }
        acc
    }

    /// One forward sweep: `out[q] = Σ_p v[p] ⊗ δ(p, s, q)`.
    pub fn step_vec(&self, v: &[Value], s: usize) -> Vec<Value> {
        let mut out = vec![self.semiring.zero(); self.states];
        for (p, ts, q, w) in &self.trans {
            if *ts == s {
                let add = self.semiring.times(&v[*p], w);
                out[*q] = self.semiring.plus(&out[*q], &add);
            }
        }
        out
    }

    /// The forward weight vector after reading `w` from the initial map:
    /// `v[q] = Σ_p I(p) ⊗ δ*(p, w, q)`.
    pub fn forward(&self, w: &[usize]) -> Vec<Value> {
        let mut v = self.initial.clone();
        for &s in w {
            v = self.step_vec(&v, s);
        }
        v
    }

    /// `Σ_{p,q} I(p) ⊗ δ*(p, w, q) ⊗ F(q)`.
    pub fn eval(&self, w: &[usize]) -> Value {
        let v = self.forward(w);
        let mut acc = self.semiring.zero();
        for q in 0..self.states {
            acc = self.semiring.plus(&acc, &self.semiring.times(&v[q], &self.finals[q]));
        }
        acc
    }

    /// States reachable from a nonzero initial weight through nonzero
    /// transitions, in BFS order.
    pub fn accessible(&self) -> Vec<usize> {
        let zero = self.semiring.zero();
        let mut seen = vec![false; self.states];
        let mut queue = VecDeque::new();
        let mut order = Vec::new();
        for q in 0..self.states {
            if self.initial[q] != zero {
                seen[q] = true;
                queue.push_back(q);
            }
        }
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for (p, _, t, _) in &self.trans {
                if *p == q && !seen[*t] {
                    seen[*t] = true;
                    queue.push_back(*t);
                }
            }
        }
        order
    }

    /// Restriction to the accessible part (states renumbered in BFS order).
    pub fn trim(&self) -> Wa {
        let order = self.accessible();
        if order.is_empty() {
            // Keep a single dead state so the automaton stays well-formed.
            return Wa {
                semiring: self.semiring.clone(),
                alphabet: self.alphabet.clone(),
                states: 1,
                trans: vec![],
                initial: vec![self.semiring.zero()],
                finals: vec![self.semiring.zero()],
            };
        }
        let mut index = vec![usize::MAX; self.states];
        for (i, &q) in order.iter().enumerate() {
            index[q] = i;
        }
        Wa {
            semiring: self.semiring.clone(),
            alphabet: self.alphabet.clone(),
            states: order.len(),
            trans: self
                .trans
                .iter()
                .filter(|(p, _, q, _)| index[*p] != usize::MAX && index[*q] != usize::MAX)
                .map(|(p, s, q, w)| (index[*p], *s, index[*q], w.clone()))
                .collect(),
            initial: order.iter().map(|&q| self.initial[q].clone()).collect(),
            finals: order.iter().map(|&q| self.finals[q].clone()).collect(),
        }
    }

    /// Weighted subset construction with exact weight vectors. States of the
    /// result are the distinct forward vectors reachable from the initial
    /// vector; the final weight of a vector `v` is `Σ_q v(q) ⊗ F(q)`.
    /// Fails with `BoundExceeded` once more than `state_bound` distinct
    /// vectors appear — the series may then not be recognizable by any
    /// finite deterministic automaton.
    pub fn determinize(&self, state_bound: usize) -> Result<Dwa> {
        let mut ids: HashMap<Vec<Value>, usize> = HashMap::new();
        let mut vectors: Vec<Vec<Value>> = Vec::new();
        let mut delta: Vec<Vec<usize>> = Vec::new();
        let start = self.initial.clone();
        ids.insert(start.clone(), 0);
        vectors.push(start);
        let mut next = 0usize;
        while next < vectors.len() {
            let v = vectors[next].clone();
            let mut row = Vec::with_capacity(self.alphabet.len());
            for s in 0..self.alphabet.len() {
                let t = self.step_vec(&v, s);
                let id = match ids.get(&t) {
                    Some(&id) => id,
                    None => {
                        if vectors.len() >= state_bound {
                            return Err(Error::bound("determinizing", state_bound));
                        }
                        let id = vectors.len();
                        ids.insert(t.clone(), id);
                        vectors.push(t);
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
            .map(|v| {
                let mut acc = self.semiring.zero();
                for q in 0..self.states {
                    acc = self.semiring.plus(&acc, &self.semiring.times(&v[q], &self.finals[q]));
                }
                acc
            })
            .collect();
        Ok(Dwa {
            semiring: self.semiring.clone(),
            alphabet: self.alphabet.clone(),
            delta,
            initial: 0,
            finals,
        })
    }

    /// The past series of `q`: same automaton with the final map replaced by
    /// the crisp indicator of `q`.
    pub fn past(&self, q: usize) -> Wa {
        let mut finals = vec![self.semiring.zero(); self.states];
        finals[q] = self.semiring.one();
        Wa { finals, ..self.clone() }
    }

    /// The future series of `q`: same automaton with the initial map
    /// replaced by the crisp indicator of `q`.
    pub fn fut(&self, q: usize) -> Wa {
        let mut initial = vec![self.semiring.zero(); self.states];
        initial[q] = self.semiring.one();
        Wa { initial, ..self.clone() }
    }

    /// The transition series `Trans(p, q)(w) = δ*(p, w, q)`.
    pub fn trans_series(&self, p: usize, q: usize) -> Wa {
        let mut initial = vec![self.semiring.zero(); self.states];
        initial[p] = self.semiring.one();
        let mut finals = vec![self.semiring.zero(); self.states];
        finals[q] = self.semiring.one();
        Wa { initial, finals, ..self.clone() }
    }

    /// The reversal automaton: transposed transitions with initial and final
    /// maps swapped. Recognizes the reversal of this series (the shipped
    /// semirings are commutative).
    pub fn reverse(&self) -> Wa {
        Wa {
            semiring: self.semiring.clone(),
            alphabet: self.alphabet.clone(),
            states: self.states,
            trans: self.trans.iter().map(|(p, s, q, w)| (*q, *s, *p, w.clone())).collect(),
            initial: self.finals.clone(),
            finals: self.initial.clone(),
        }
    }

    /// The morphic image along a partition: `partition[q]` is the block id of
    /// state `q` (block ids must be dense in `0..k`). Weights of merged
    /// states and transitions are summed.
    pub fn merge_states(&self, partition: &[usize]) -> Wa {
        assert_eq!(partition.len(), self.states);
        let k = partition.iter().max().map_or(0, |m| m + 1);
        let zero = self.semiring.zero();
        let mut initial = vec![zero.clone(); k];
        let mut finals = vec![zero.clone(); k];
        for q in 0..self.states {
            let b = partition[q];
            initial[b] = self.semiring.plus(&initial[b], &self.initial[q]);
            finals[b] = self.semiring.plus(&finals[b], &self.finals[q]);
        }
        let mut arcs: HashMap<(usize, usize, usize), Value> = HashMap::new();
        for (p, s, q, w) in &self.trans {
            let key = (partition[*p], *s, partition[*q]);
            let acc = arcs.entry(key).or_insert_with(|| zero.clone());
            *acc = self.semiring.plus(acc, w);
        }
        let mut trans: Vec<(usize, usize, usize, Value)> = arcs
            .into_iter()
            .filter(|(_, w)| *w != zero)
            .map(|((p, s, q), w)| (p, s, q, w))
            .collect();
        trans.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
        Wa {
            semiring: self.semiring.clone(),
            alphabet: self.alphabet.clone(),
            states: k,
            trans,
            initial,
            finals,
        }
    }
}

/// A state map between two automata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    /// `map[q]` is the image of state `q` of the source automaton.
    pub map: Vec<usize>,
}

/// Outcome of [`check_morphism`]: which morphism classes the map satisfies,
/// with human-readable witnesses of violated conditions.
#[derive(Debug, Clone)]
pub struct MorphismVerdict {
    pub plain: bool,
    pub surjective: bool,
    pub strong: bool,
    pub violations: Vec<String>,
}

/// Verifies the morphism conditions of a state map `φ: A → B`:
///
/// - *plain*: `I(p) ≤ J(φp)`, `F(p) ≤ G(φp)`, and
///   `δ(p,σ,q) ≤ η(φp,σ,φq)` pointwise;
/// - *surjective*: `φ` is onto and `B` equals the morphic image of `A`
///   (preimage-summed weights);
/// - *strong*: `J(p') = Σ{I(q) | φq = p'}`, `G(φq) = F(q)`, and
///   `η(φq,σ,p') = Σ{δ(q,σ,r) | φr = p'}`.
pub fn check_morphism(a: &Wa, b: &Wa, phi: &Morphism) -> MorphismVerdict {
    assert_eq!(phi.map.len(), a.states);
    assert!(phi.map.iter().all(|&p| p < b.states), "morphism target out of range");
    let s = &a.semiring;
    let mut violations = Vec::new();

    let mut plain = true;
    for p in 0..a.states {
        if !s.leq(&a.initial[p], &b.initial[phi.map[p]]) {
            plain = false;
            violations.push(format!("I({p}) > J(phi({p}))"));
        }
        if !s.leq(&a.finals[p], &b.finals[phi.map[p]]) {
            plain = false;
            violations.push(format!("F({p}) > G(phi({p}))"));
        }
    }
    for (p, sym, q, w) in &a.trans {
        if !s.leq(w, &b.weight(phi.map[*p], *sym, phi.map[*q])) {
            plain = false;
            violations.push(format!("delta({p},{sym},{q}) > eta(phi({p}),{sym},phi({q}))"));
        }
    }

    let onto = (0..b.states).all(|p| phi.map.contains(&p));
    let mut surjective = plain && onto;
    let mut strong = plain;

    // Preimage sums.
    let sum_i = |p: usize| {
        let mut acc = s.zero();
        for q in 0..a.states {
            if phi.map[q] == p {
                acc = s.plus(&acc, &a.initial[q]);
            }
        }
        acc
    };
    let sum_f = |p: usize| {
        let mut acc = s.zero();
        for q in 0..a.states {
            if phi.map[q] == p {
                acc = s.plus(&acc, &a.finals[q]);
            }
        }
        acc
    };
    let sum_d = |p1: usize, sym: usize, p2: usize| {
        let mut acc = s.zero();
        for (tp, ts, tq, w) in &a.trans {
            if phi.map[*tp] == p1 && *ts == sym && phi.map[*tq] == p2 {
                acc = s.plus(&acc, w);
            }
        }
        acc
    };

    if surjective {
        for p in 0..b.states {
            if b.initial[p] != sum_i(p) || b.finals[p] != sum_f(p) {
                surjective = false;
                violations.push(format!("image weights differ at block {p}"));
            }
            for sym in 0..b.alphabet.len() {
                for p2 in 0..b.states {
                    if b.weight(p, sym, p2) != sum_d(p, sym, p2) {
                        surjective = false;
                        violations.push(format!("image transition differs at ({p},{sym},{p2})"));
                    }
                }
            }
        }
    }

    if strong {
        for p in 0..b.states {
            if phi.map.contains(&p) && b.initial[p] != sum_i(p) {
                strong = false;
                violations.push(format!("J({p}) != sum of initial preimages"));
            }
        }
        for q in 0..a.states {
            if b.finals[phi.map[q]] != a.finals[q] {
                strong = false;
                violations.push(format!("G(phi({q})) != F({q})"));
            }
            for sym in 0..a.alphabet.len() {
                for p2 in 0..b.states {
                    let mut acc = s.zero();
                    for (tp, ts, tq, w) in &a.trans {
                        if *tp == q && *ts == sym && phi.map[*tq] == p2 {
                            acc = s.plus(&acc, w);
                        }
                    }
                    if b.weight(phi.map[q], sym, p2) != acc {
                        strong = false;
                        violations
                            .push(format!("eta(phi({q}),{sym},{p2}) != sum of delta preimages"));
                    }
                }
            }
        }
    }

    MorphismVerdict { plain, surjective, strong, violations }
}

/// Equivalence mode for [`equivalent`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EquivMode {
    /// Minimize both deterministic automata and compare canonical forms.
    ExactDwa,
    /// Compare evaluations on every word of length at most the given bound.
    Bounded(usize),
}

/// One side of an equivalence query: either kind of automaton.
#[derive(Debug, Clone)]
pub enum AutomatonRef<'a> {
    Dwa(&'a Dwa),
    Wa(&'a Wa),
}

impl AutomatonRef<'_> {
    pub fn eval(&self, w: &[usize]) -> Value {
        match self {
            AutomatonRef::Dwa(a) => a.eval(w),
            AutomatonRef::Wa(a) => a.eval(w),
        }
    }

    fn alphabet(&self) -> &Alphabet {
        match self {
            AutomatonRef::Dwa(a) => &a.alphabet,
            AutomatonRef::Wa(a) => &a.alphabet,
        }
    }
}

/// Tests whether two automata recognize the same series. `ExactDwa` requires
/// both sides to be deterministic (determinize first otherwise); `Bounded(k)`
/// compares evaluations on all words of length `≤ k` and returns the first
/// distinguishing word on failure.
pub fn equivalent(a: AutomatonRef<'_>, b: AutomatonRef<'_>, mode: EquivMode) -> Result<bool> {
    match mode {
        EquivMode::ExactDwa => match (&a, &b) {
            (AutomatonRef::Dwa(x), AutomatonRef::Dwa(y)) => Ok(x.minimize().isomorphic(&y.minimize())),
            _ => Err(Error::Unsupported(
                "exact equivalence requires deterministic automata; determinize first".into(),
            )),
        },
        EquivMode::Bounded(k) => Ok(distinguishing_word(&a, &b, k).is_none()),
    }
}

/// The first (in length-lexicographic order) word of length `≤ k` on which
/// the two automata differ, if any.
pub fn distinguishing_word(a: &AutomatonRef<'_>, b: &AutomatonRef<'_>, k: usize) -> Option<Word> {
    a.alphabet().words_up_to(k).into_iter().find(|w| a.eval(w) != b.eval(w))
}
