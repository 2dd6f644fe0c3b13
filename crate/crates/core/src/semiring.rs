//! Value-level algebra: complete c-semiring instances with residuation,
//! lattice structure, and axiom validation.
//!
//! A *c-semiring* is a semiring whose addition is idempotent, whose
//! multiplication is commutative, and whose multiplicative unit absorbs
//! addition (`a ⊕ 1 = 1`). Addition then induces a partial order
//! `a ≤ b iff a ⊕ b = b` with bottom `0` and top `1`; a *complete* c-semiring
//! additionally has all joins, making it a commutative quantale. In a
//! quantale multiplication has a right adjoint, the *residual*
//! `a → b = ⋁{x | a ⊗ x ≤ b}`, characterized by the adjunction
//! `x ≤ a → b iff a ⊗ x ≤ b`.
//!
//! Shipped instances: the Boolean semiring, the max-min semiring on
//! `ℕ ∪ {∞}`, the tropical (min-plus) semiring on `ℕ ∪ {∞}`, finite chains,
//! and arbitrary finite operation tables (validated by
//! [`Semiring::validate_axioms`]).

use std::collections::BTreeSet;
use std::fmt;

use crate::{Error, Result};

/// An extended natural number: a finite value or the distinguished `∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ext {
    Fin(u64),
    Inf,
}

impl Ext {
    fn min(self, other: Ext) -> Ext {
        std::cmp::min(self, other)
    }

    fn max(self, other: Ext) -> Ext {
        std::cmp::max(self, other)
    }

    /// Extended addition: `∞ + k = ∞`.
    fn add(self, other: Ext) -> Ext {
        match (self, other) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a + b),
            _ => Ext::Inf,
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Fin(n) => write!(f, "{n}"),
            Ext::Inf => write!(f, "inf"),
        }
    }
}

/// A semiring element. The encoding must match the owning [`Semiring`];
/// operations panic on foreign encodings (inputs are validated at the
/// document boundary).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Value {
    /// Boolean semiring element.
    B(bool),
    /// Extended natural (max-min and tropical semirings).
    N(Ext),
    /// Chain level index in `[0, n]`.
    L(u32),
    /// Finite-table element id.
    E(usize),
}

impl Value {
    pub fn fin(n: u64) -> Value {
        Value::N(Ext::Fin(n))
    }

    pub fn inf() -> Value {
        Value::N(Ext::Inf)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::B(false) => write!(f, "0"),
            Value::B(true) => write!(f, "1"),
            Value::N(e) => write!(f, "{e}"),
            Value::L(i) => write!(f, "{i}"),
            Value::E(i) => write!(f, "#{i}"),
        }
    }
}

/// A finite semiring presented by explicit operation tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    /// Element names, indexed by id.
    pub carrier: Vec<String>,
    /// `plus[a][b]` is the id of `a ⊕ b`.
    pub plus: Vec<Vec<usize>>,
    /// `times[a][b]` is the id of `a ⊗ b`.
    pub times: Vec<Vec<usize>>,
    pub zero: usize,
    pub one: usize,
}

impl Table {
    /// Checks that the tables are square, well-indexed, and that the
    /// distinguished elements exist. Algebraic laws are checked separately by
    /// [`Semiring::validate_axioms`].
    pub fn validate_shape(&self) -> Result<()> {
        let n = self.carrier.len();
        if n == 0 {
            return Err(Error::Invalid("empty table carrier".into()));
        }
        for (name, t) in [("plus", &self.plus), ("times", &self.times)] {
            if t.len() != n || t.iter().any(|row| row.len() != n) {
                return Err(Error::Invalid(format!("{name} table is not {n}x{n}")));
            }
            if t.iter().flatten().any(|&id| id >= n) {
                return Err(Error::Invalid(format!("{name} table entry out of range")));
            }
        }
        if self.zero >= n || self.one >= n {
            return Err(Error::Invalid("zero/one id out of range".into()));
        }
        Ok(())
    }
}

/// A concrete semiring instance. All operations are total over values of the
/// matching encoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Semiring {
    /// `({0,1}, ∨, ∧, 0, 1)`.
    Boolean,
    /// `(ℕ ∪ {∞}, max, min, 0, ∞)`; the order is the numeric order.
    MaxMinNat,
    /// `(ℕ ∪ {∞}, min, +, ∞, 0)`; the induced order is the *reversed*
    /// numeric order (smaller numbers are larger in the semiring).
    TropicalNat,
    /// The chain `0 < 1 < … < n` with `max`/`min`; `Chain(n)` has `n + 1`
    /// elements.
    Chain(u32),
    /// A finite semiring given by explicit tables.
    Table(Table),
}

impl Semiring {
    pub fn zero(&self) -> Value {
        match self {
            Semiring::Boolean => Value::B(false),
            Semiring::MaxMinNat => Value::fin(0),
            Semiring::TropicalNat => Value::inf(),
            Semiring::Chain(_) => Value::L(0),
            Semiring::Table(t) => Value::E(t.zero),
        }
    }

    pub fn one(&self) -> Value {
        match self {
            Semiring::Boolean => Value::B(true),
            Semiring::MaxMinNat => Value::inf(),
            Semiring::TropicalNat => Value::fin(0),
            Semiring::Chain(n) => Value::L(*n),
            Semiring::Table(t) => Value::E(t.one),
        }
    }

    /// Whether `v` belongs to this semiring's carrier encoding.
    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (Semiring::Boolean, Value::B(_)) => true,
            (Semiring::MaxMinNat | Semiring::TropicalNat, Value::N(_)) => true,
            (Semiring::Chain(n), Value::L(i)) => i <= n,
            (Semiring::Table(t), Value::E(i)) => *i < t.carrier.len(),
            _ => false,
        }
    }

    fn expect(&self, v: &Value) {
        assert!(self.contains(v), "value {v:?} does not belong to semiring {self:?}");
    }

    /// Semiring addition `a ⊕ b` (the join of the induced order).
    pub fn plus(&self, a: &Value, b: &Value) -> Value {
        self.expect(a);
        self.expect(b);
        match (self, a, b) {
            (Semiring::Boolean, Value::B(x), Value::B(y)) => Value::B(*x || *y),
            (Semiring::MaxMinNat, Value::N(x), Value::N(y)) => Value::N((*x).max(*y)),
            (Semiring::TropicalNat, Value::N(x), Value::N(y)) => Value::N((*x).min(*y)),
            (Semiring::Chain(_), Value::L(x), Value::L(y)) => Value::L(*x.max(y)),
            (Semiring::Table(t), Value::E(x), Value::E(y)) => Value::E(t.plus[*x][*y]),
            _ => unreachable!(),
        }
    }

    /// Semiring multiplication `a ⊗ b`.
    pub fn times(&self, a: &Value, b: &Value) -> Value {
        self.expect(a);
        self.expect(b);
        match (self, a, b) {
            (Semiring::Boolean, Value::B(x), Value::B(y)) => Value::B(*x && *y),
            (Semiring::MaxMinNat, Value::N(x), Value::N(y)) => Value::N((*x).min(*y)),
            (Semiring::TropicalNat, Value::N(x), Value::N(y)) => Value::N(x.add(*y)),
            (Semiring::Chain(_), Value::L(x), Value::L(y)) => Value::L(*x.min(y)),
            (Semiring::Table(t), Value::E(x), Value::E(y)) => Value::E(t.times[*x][*y]),
            _ => unreachable!(),
        }
    }

    /// The induced order: `a ≤ b iff a ⊕ b = b`.
    pub fn leq(&self, a: &Value, b: &Value) -> bool {
        self.plus(a, b) == *b
    }

    /// The join of the induced order (identical to `⊕` for c-semirings).
    pub fn join(&self, a: &Value, b: &Value) -> Value {
        self.plus(a, b)
    }

    /// The meet (greatest lower bound) of the induced order.
    pub fn meet(&self, a: &Value, b: &Value) -> Value {
        self.expect(a);
        self.expect(b);
        match (self, a, b) {
            (Semiring::Boolean, Value::B(x), Value::B(y)) => Value::B(*x && *y),
            (Semiring::MaxMinNat, Value::N(x), Value::N(y)) => Value::N((*x).min(*y)),
            // Reversed numeric order: the glb is the numeric maximum.
            (Semiring::TropicalNat, Value::N(x), Value::N(y)) => Value::N((*x).max(*y)),
            (Semiring::Chain(_), Value::L(x), Value::L(y)) => Value::L(*x.min(y)),
            // In a finite join-semilattice the glb is the join of all common
            // lower bounds (each common lower bound is below that join, and
            // the join of lower bounds is itself a lower bound).
            (Semiring::Table(_), _, _) => {
                let mut m = self.zero();
                for x in self.enumerate().unwrap() {
                    if self.leq(&x, a) && self.leq(&x, b) {
                        m = self.plus(&m, &x);
                    }
                }
                m
            }
            _ => unreachable!(),
        }
    }

    /// The residual `a → b = ⋁{x | a ⊗ x ≤ b}`, the right adjoint of
    /// multiplication: `x ≤ a → b iff a ⊗ x ≤ b`.
    pub fn residual(&self, a: &Value, b: &Value) -> Value {
        self.expect(a);
        self.expect(b);
        match (self, a, b) {
            // 1 → b = b; 0 → b = 1.
            (Semiring::Boolean, Value::B(x), Value::B(y)) => Value::B(!*x || *y),
            // Gödel implication: a ≤ b gives the top ∞, otherwise b.
            (Semiring::MaxMinNat, Value::N(x), Value::N(y)) => {
                if x <= y {
                    Value::inf()
                } else {
                    Value::N(*y)
                }
            }
            // Applying the sup formula literally in the reversed order:
            // the set {x | a + x ≥ b} has numeric minimum max(b − a, 0);
            // with a = ∞ every x qualifies (sup = 0, the top), and with
            // b = ∞, a finite, only x = ∞ does.
            (Semiring::TropicalNat, Value::N(x), Value::N(y)) => match (x, y) {
                (Ext::Inf, _) => Value::fin(0),
                (Ext::Fin(_), Ext::Inf) => Value::inf(),
                (Ext::Fin(a), Ext::Fin(b)) => Value::fin(b.saturating_sub(*a)),
            },
            // Gödel implication on the chain.
            (Semiring::Chain(n), Value::L(x), Value::L(y)) => {
                if x <= y {
                    Value::L(*n)
                } else {
                    Value::L(*y)
                }
            }
            // Direct application of the sup formula over the finite carrier.
            (Semiring::Table(_), _, _) => {
                let mut r = self.zero();
                for x in self.enumerate().unwrap() {
                    if self.leq(&self.times(a, &x), b) {
                        r = self.plus(&r, &x);
                    }
                }
                r
            }
            _ => unreachable!(),
        }
    }

    /// The set `{c → a | c ∈ S}` for the fixed second argument `a`; the
    /// per-element slice of the value lattice generator set.
    pub fn residual_image(&self, a: &Value) -> Result<BTreeSet<Value>> {
        self.expect(a);
        let mut out = BTreeSet::new();
        match self {
            Semiring::MaxMinNat => match a {
                // c ≤ a gives ∞ (the unit); c > a gives a itself.
                Value::N(Ext::Inf) => {
                    out.insert(Value::inf());
                }
                _ => {
                    out.insert(*a);
                    out.insert(Value::inf());
                }
            },
            Semiring::TropicalNat => match a {
                // Finite c gives ∞; c = ∞ gives 0 (the unit of the reversed
                // order). Both arise, so the slice is {0, ∞}.
                Value::N(Ext::Inf) => {
                    out.insert(Value::fin(0));
                    out.insert(Value::inf());
                }
                // Finite a: truncated subtraction a − c sweeps 0..a, and
                // c = ∞ gives 0 again.
                Value::N(Ext::Fin(k)) => {
                    for v in 0..=*k {
                        out.insert(Value::fin(v));
                    }
                }
                _ => unreachable!(),
            },
            _ => {
                for c in self.enumerate().expect("finite carrier") {
                    out.insert(self.residual(&c, a));
                }
            }
        }
        Ok(out)
    }

    /// The full carrier, for finite instances; `None` for the extended
    /// naturals.
    pub fn enumerate(&self) -> Option<Vec<Value>> {
        match self {
            Semiring::Boolean => Some(vec![Value::B(false), Value::B(true)]),
            Semiring::MaxMinNat | Semiring::TropicalNat => None,
            Semiring::Chain(n) => Some((0..=*n).map(Value::L).collect()),
            Semiring::Table(t) => Some((0..t.carrier.len()).map(Value::E).collect()),
        }
    }

    /// A finite sample of the carrier for law checking: the full carrier when
    /// finite, `{0..bound, ∞}` otherwise.
    pub fn sample(&self, bound: u64) -> Vec<Value> {
        match self.enumerate() {
            Some(vs) => vs,
            None => {
                let mut vs: Vec<Value> = (0..=bound).map(Value::fin).collect();
                vs.push(Value::inf());
                vs
            }
        }
    }

    /// Join of an iterator of values; the empty join is `zero`.
    pub fn join_all<'a>(&self, vs: impl IntoIterator<Item = &'a Value>) -> Value {
        vs.into_iter().fold(self.zero(), |acc, v| self.plus(&acc, v))
    }

    /// Meet of an iterator of values; the empty meet is `one` (the top).
    pub fn meet_all<'a>(&self, vs: impl IntoIterator<Item = &'a Value>) -> Value {
        vs.into_iter().fold(self.one(), |acc, v| self.meet(&acc, v))
    }

    /// Checks every semiring and c-semiring law, exhaustively for finite
    /// carriers and over the sample `{0..32, ∞}` for the extended naturals.
    /// Failures are reported with a witness tuple, not raised as errors.
    pub fn validate_axioms(&self) -> AxiomReport {
        self.validate_axioms_sampled(32)
    }

    /// As [`Semiring::validate_axioms`] with a configurable sampling bound
    /// for infinite carriers.
    pub fn validate_axioms_sampled(&self, bound: u64) -> AxiomReport {
        let vs = self.sample(bound);
        let zero = self.zero();
        let one = self.one();
        let mut report = AxiomReport { checks: Vec::new() };

        let mut check1 = |name: &str, f: &dyn Fn(&Value) -> bool| {
            let witness = vs.iter().find(|a| !f(a)).map(|a| vec![*a]);
            report.checks.push(LawCheck { law: name.into(), witness });
        };
        check1("plus-identity", &|a| self.plus(&zero, a) == *a && self.plus(a, &zero) == *a);
        check1("plus-idempotent", &|a| self.plus(a, a) == *a);
        check1("times-identity", &|a| self.times(&one, a) == *a && self.times(a, &one) == *a);
        check1("times-annihilator", &|a| {
            self.times(&zero, a) == zero && self.times(a, &zero) == zero
        });
        check1("one-absorbs-plus", &|a| self.plus(a, &one) == one);
        check1("order-bounds", &|a| self.leq(&zero, a) && self.leq(a, &one));
        check1("residual-self", &|a| self.residual(a, a) == one);
        check1("residual-unit", &|b| {
            self.residual(&one, b) == *b && self.residual(&zero, b) == one
        });

        let mut check2 = |name: &str, f: &dyn Fn(&Value, &Value) -> bool| {
            let mut witness = None;
            'outer: for a in &vs {
                for b in &vs {
                    if !f(a, b) {
                        witness = Some(vec![*a, *b]);
                        break 'outer;
                    }
                }
            }
            report.checks.push(LawCheck { law: name.into(), witness });
        };
        check2("plus-commutative", &|a, b| self.plus(a, b) == self.plus(b, a));
        check2("times-commutative", &|a, b| self.times(a, b) == self.times(b, a));
        check2("order-antisymmetric", &|a, b| !(self.leq(a, b) && self.leq(b, a)) || a == b);
        check2("meet-is-glb", &|a, b| {
            let m = self.meet(a, b);
            self.leq(&m, a) && self.leq(&m, b)
        });
        check2("residual-deflation", &|a, b| {
            self.leq(&self.times(a, &self.residual(a, b)), b)
        });

        let mut check3 = |name: &str, f: &dyn Fn(&Value, &Value, &Value) -> bool| {
            let mut witness = None;
            'outer: for a in &vs {
                for b in &vs {
                    for c in &vs {
                        if !f(a, b, c) {
                            witness = Some(vec![*a, *b, *c]);
                            break 'outer;
                        }
                    }
                }
            }
            report.checks.push(LawCheck { law: name.into(), witness });
        };
        check3("plus-associative", &|a, b, c| {
            self.plus(a, &self.plus(b, c)) == self.plus(&self.plus(a, b), c)
        });
        check3("times-associative", &|a, b, c| {
            self.times(a, &self.times(b, c)) == self.times(&self.times(a, b), c)
        });
        check3("distributive", &|a, b, c| {
            self.times(a, &self.plus(b, c)) == self.plus(&self.times(a, b), &self.times(a, c))
                && self.times(&self.plus(a, b), c)
                    == self.plus(&self.times(a, c), &self.times(b, c))
        });
        check3("residual-adjunction", &|a, b, x| {
            self.leq(x, &self.residual(a, b)) == self.leq(&self.times(a, x), b)
        });
        check3("meet-greatest", &|a, b, x| {
            !(self.leq(x, a) && self.leq(x, b)) || self.leq(x, &self.meet(a, b))
        });

        report
    }
}

/// Result of a single law check; `witness` holds a counterexample tuple when
/// the law failed.
#[derive(Debug, Clone)]
pub struct LawCheck {
    pub law: String,
    pub witness: Option<Vec<Value>>,
}

impl LawCheck {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// The outcome of [`Semiring::validate_axioms`]: one entry per law.
#[derive(Debug, Clone)]
pub struct AxiomReport {
    pub checks: Vec<LawCheck>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    pub fn failures(&self) -> Vec<&LawCheck> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn broken_table() -> Semiring {
        // Three elements {0, m, 1} with max-style plus but a times table
        // tweaked so that (m ⊗ 1) ⊗ m = m while m ⊗ (1 ⊗ m) = 0.
        Semiring::Table(Table {
            carrier: vec!["0".into(), "m".into(), "1".into()],
            plus: vec![vec![0, 1, 2], vec![1, 1, 2], vec![2, 2, 2]],
            times: vec![vec![0, 0, 0], vec![0, 1, 1], vec![0, 0, 2]],
            zero: 0,
            one: 2,
        })
    }

    #[test]
    fn plus_examples() {
        assert_eq!(Semiring::MaxMinNat.plus(&Value::fin(1), &Value::fin(2)), Value::fin(2));
        assert_eq!(Semiring::TropicalNat.plus(&Value::fin(3), &Value::inf()), Value::fin(3));
        assert_eq!(
            Semiring::Boolean.plus(&Value::B(false), &Value::B(false)),
            Value::B(false)
        );
    }

    #[test]
    fn times_examples() {
        assert_eq!(Semiring::TropicalNat.times(&Value::fin(4), &Value::fin(10)), Value::fin(14));
        assert_eq!(Semiring::MaxMinNat.times(&Value::fin(2), &Value::inf()), Value::fin(2));
        for s in [Semiring::Boolean, Semiring::MaxMinNat, Semiring::TropicalNat, Semiring::Chain(3)]
        {
            for a in s.sample(5) {
                assert_eq!(s.times(&a, &s.zero()), s.zero());
            }
        }
    }

    #[test]
    fn residual_examples() {
        let t = Semiring::TropicalNat;
        assert_eq!(t.residual(&Value::fin(4), &Value::fin(10)), Value::fin(6));
        assert_eq!(t.residual(&Value::fin(2), &Value::fin(0)), Value::fin(0));
        for s in [Semiring::Boolean, Semiring::MaxMinNat, Semiring::TropicalNat, Semiring::Chain(4)]
        {
            for a in s.sample(6) {
                assert_eq!(s.residual(&a, &a), s.one());
            }
        }
    }

    #[test]
    fn residual_image_examples() {
        let mm = Semiring::MaxMinNat;
        let img = mm.residual_image(&Value::fin(2)).unwrap();
        assert_eq!(img, BTreeSet::from([Value::fin(2), Value::inf()]));
        // Cross-check against a direct sweep of representative arguments.
        for c in [Value::fin(0), Value::fin(1), Value::fin(2), Value::fin(3), Value::inf()] {
            assert!(img.contains(&mm.residual(&c, &Value::fin(2))));
        }

        let b = Semiring::Boolean;
        assert_eq!(
            b.residual_image(&Value::B(false)).unwrap(),
            BTreeSet::from([Value::B(false), Value::B(true)])
        );

        let t = Semiring::TropicalNat;
        for k in [0u64, 1, 3, 7] {
            let img = t.residual_image(&Value::fin(k)).unwrap();
            let expect: BTreeSet<Value> = (0..=k).map(Value::fin).collect();
            assert_eq!(img, expect);
            // Brute-check: every c in {0..k+2, ∞} lands in the slice.
            for c in (0..=k + 2).map(Value::fin).chain([Value::inf()]) {
                assert!(img.contains(&t.residual(&c, &Value::fin(k))));
            }
        }
        assert_eq!(
            t.residual_image(&Value::inf()).unwrap(),
            BTreeSet::from([Value::fin(0), Value::inf()])
        );
    }

    #[test]
    fn order_examples() {
        let t = Semiring::TropicalNat;
        assert!(t.leq(&Value::fin(5), &Value::fin(3)));
        assert!(!t.leq(&Value::fin(3), &Value::fin(5)));
        assert_eq!(Semiring::Chain(4).meet(&Value::L(1), &Value::L(3)), Value::L(1));
        for s in [Semiring::Boolean, Semiring::MaxMinNat, Semiring::TropicalNat, Semiring::Chain(2)]
        {
            for a in s.sample(4) {
                assert_eq!(s.join(&s.zero(), &a), a);
            }
        }
    }

    #[test]
    fn validate_shipped_instances() {
        for s in [
            Semiring::Boolean,
            Semiring::MaxMinNat,
            Semiring::TropicalNat,
            Semiring::Chain(3),
        ] {
            let report = s.validate_axioms();
            assert!(report.all_pass(), "{s:?} failed: {:?}", report.failures());
        }
    }

    #[test]
    fn validate_boolean_as_table() {
        let s = Semiring::Table(Table {
            carrier: vec!["0".into(), "1".into()],
            plus: vec![vec![0, 1], vec![1, 1]],
            times: vec![vec![0, 0], vec![0, 1]],
            zero: 0,
            one: 1,
        });
        assert!(s.validate_axioms().all_pass());
    }

    #[test]
    fn validate_rejects_non_associative_times() {
        let report = broken_table().validate_axioms();
        let assoc = report.checks.iter().find(|c| c.law == "times-associative").unwrap();
        assert!(!assoc.passed());
        assert_eq!(assoc.witness.as_ref().unwrap().len(), 3);
    }

    #[test]
    fn meet_and_join_lattice_laws() {
        for s in [Semiring::Boolean, Semiring::MaxMinNat, Semiring::TropicalNat, Semiring::Chain(3)]
        {
            let vs = s.sample(8);
            for a in &vs {
                for b in &vs {
                    let m = s.meet(a, b);
                    assert!(s.leq(&m, a) && s.leq(&m, b));
                    let j = s.join(a, b);
                    assert!(s.leq(a, &j) && s.leq(b, &j));
                }
            }
        }
    }
}
