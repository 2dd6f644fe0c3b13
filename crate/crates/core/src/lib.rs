//! Quotients, residuals, and factorizations of formal power series over
//! complete c-semirings.
//!
//! A *formal power series* assigns a weight from a semiring `S` to every word
//! over a finite alphabet. When `S` is a complete c-semiring (a commutative
//! quantale whose multiplicative unit is the top element), the series algebra
//! supports not only the rational operations (sum, Cauchy product, scalars,
//! star, reversal) but also *residuals*: for series `X` and `A`, the left
//! residual `X\A` is the largest `Y` with `X·Y ≤ A`, and symmetrically for the
//! right residual `A/Y`. Maximal pairs `(X, Y)` with `X·Y ≤ A` are the
//! *factorizations* of `A`; they form the state set of the universal weighted
//! automaton of `A`, which receives a morphism from every weighted automaton
//! accepting a sub-series of `A`.
//!
//! The crate provides:
//!
//! - [`semiring`] — value-level algebra: shipped c-semiring instances
//!   (Boolean, max-min and tropical extended naturals, finite chains, explicit
//!   finite tables), residuation, lattice structure, and exhaustive axiom
//!   validation for user-supplied tables.
//! - [`series`] — series values in four interchangeable representations
//!   (finite-support polynomial, weighted step function, deterministic and
//!   nondeterministic automata) plus the rational operations.
//! - [`automata`] — deterministic (crisp-transition) and general weighted
//!   automata: evaluation, trimming, minimization, weighted subset
//!   determinization, past/future/transition series, morphism checking,
//!   state merging, and equivalence tests.
//! - [`quotient`] — word and series quotients, the left-quotient (Nerode)
//!   automaton, and the quotient-indexed automaton together with its
//!   finiteness probe.
//! - [`residual`] — residual computation on automata, inclusion degrees, the
//!   brute-force residual oracle used by the test suite, and factorization
//!   predicates and completion.
//! - [`universal`] — the effective construction of the universal weighted
//!   automaton from a deterministic automaton via value-lattice closures and
//!   weighted states, canonical morphisms, and mergibility analysis.
//! - [`wcfg`] — weighted context-free grammars, bounded-depth evaluation,
//!   proper-automaton normalization, and the right-quotient grammar
//!   construction.
//! - [`json`] — the JSON document schema shared by the CLI and the fixtures.
//!
//! All values are exact (no floating point); all operations are pure
//! functions over immutable data.

pub mod automata;
pub mod json;
pub mod quotient;
pub mod residual;
pub mod semiring;
pub mod series;
pub mod universal;
pub mod wcfg;

pub use semiring::{Semiring, Value};

/// A word over an indexed alphabet: a sequence of symbol ids.
pub type Word = Vec<usize>;

/// A finite alphabet of named symbols. Symbols are referenced by dense ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    /// Builds an alphabet from symbol names. Names must be distinct.
    pub fn new(symbols: Vec<String>) -> Result<Self, Error> {
        for (i, s) in symbols.iter().enumerate() {
            if symbols[..i].contains(s) {
                return Err(Error::Invalid(format!("duplicate alphabet symbol {s:?}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    /// Convenience constructor from string slices; panics on duplicates.
    pub fn of(symbols: &[&str]) -> Self {
        Alphabet::new(symbols.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, id: usize) -> &str {
        &self.symbols[id]
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn id_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == name)
    }

    /// Parses a word given as a string of single-character symbols.
    pub fn parse_word(&self, text: &str) -> Result<Word, Error> {
        text.chars()
            .map(|c| {
                self.id_of(&c.to_string())
                    .ok_or_else(|| Error::Invalid(format!("symbol {c:?} not in alphabet")))
            })
            .collect()
    }

    /// Renders a word as a string (symbols joined without separator).
    pub fn format_word(&self, w: &[usize]) -> String {
        w.iter().map(|&i| self.symbol(i)).collect()
    }

    /// All words of length at most `max_len`, in length-lexicographic order.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        let mut out: Vec<Word> = vec![vec![]];
        let mut frontier: Vec<Word> = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for w in &frontier {
                for s in 0..self.len() {
                    let mut w2 = w.clone();
                    w2.push(s);
                    next.push(w2);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }
}

/// Crate-wide error type.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A construction could not be completed within its configured bound.
    /// Depending on context this signals (or merely suggests) an infinite
    /// object: a non-deterministically-recognizable series, an infinite value
    /// lattice, or a diverging fixpoint.
    #[error("bound exceeded while {what} (bound {bound})")]
    BoundExceeded { what: String, bound: usize },

    /// The requested operation is not available for this semiring instance.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Malformed or inconsistent input data.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// The automaton does not satisfy the properness precondition
    /// (its series has a nonzero coefficient at the empty word).
    #[error("automaton is not proper: nonzero weight at the empty word")]
    NotProper,

    /// The supplied pair is not a sub-factorization: the product exceeds the
    /// base series at the witness word.
    #[error("not a sub-factorization: violated at word {witness:?}")]
    NotSubFactorization { witness: Word },

    /// The automaton's series is not dominated by the base series.
    #[error("series not dominated by the base at word {witness:?}")]
    NotDominated { witness: Word },

    /// Internal consistency failure: a computed residual matched no class of
    /// the universal automaton.
    #[error("no universal-automaton class matches the computed residual")]
    ClassNotFound,
}

impl Error {
    pub fn bound(what: impl Into<String>, bound: usize) -> Self {
        Error::BoundExceeded { what: what.into(), bound }
    }
}

/// Crate-wide result type.
pub type Result<T, E = Error> = std::result::Result<T, E>;
