//! Command-line front end: parses one self-contained JSON document per
//! invocation, dispatches to the library, and prints JSON (or DOT) results.
//! Exit codes: 0 success, 2 invalid input, 3 refused computation
//! (unsupported instance or exceeded bound).

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value as Json};

use fps_core::automata::{check_morphism, Dwa, EquivMode, Wa};
use fps_core::json::{parse_document, print_document, value_to_json, Document, Payload};
use fps_core::quotient::{series_quotient, word_quotient, Side};
use fps_core::residual::{inclusion_degree, is_factorization, residual};
use fps_core::semiring::Semiring;
use fps_core::series::Series;
use fps_core::universal::{canonical_morphism, mergible, universal_automaton, UniversalAutomaton};
use fps_core::wcfg::{wcfg_eval, wcfg_right_quotient, Wcfg};
use fps_core::{Error, Word};

#[derive(Parser)]
#[command(name = "fps", about = "Formal power series over complete c-semirings", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Document file (JSON).
    file: String,
    /// Payload name (defaults to the document's only payload).
    #[arg(long)]
    payload: Option<String>,
    /// State/iteration bound for constructions that may not terminate early.
    #[arg(long, default_value_t = 100_000)]
    bound: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a payload at a word.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        word: String,
        /// Derivation bound for grammar payloads.
        #[arg(long, default_value_t = 40)]
        depth: usize,
    },
    /// Minimal deterministic automaton of a series payload.
    Minimize {
        #[command(flatten)]
        common: Common,
    },
    /// Weighted subset construction to a deterministic automaton.
    Determinize {
        #[command(flatten)]
        common: Common,
    },
    /// Quotient by a word (--word) or by a series divisor (--by).
    Quotient {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        side: SideArg,
        #[arg(long)]
        word: Option<String>,
        /// Divisor: a payload name or a document file.
        #[arg(long)]
        by: Option<String>,
        #[arg(long, default_value_t = 3)]
        window: usize,
    },
    /// Residual by a series divisor: the largest Z with D·Z ≤ A (left) or
    /// Z·D ≤ A (right).
    Residual {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        side: SideArg,
        /// Divisor: a payload name or a document file.
        #[arg(long)]
        by: String,
        #[arg(long, default_value_t = 3)]
        window: usize,
    },
    /// Inclusion degree f →ᵢ g between two payloads.
    Include {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Universal weighted automaton of a deterministic payload.
    Universal {
        #[command(flatten)]
        common: Common,
    },
    /// Factorizations of a deterministic payload, with X/Y value tables.
    Factorize {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 3)]
        window: usize,
    },
    /// Canonical morphism from an automaton payload into the universal
    /// automaton of --base.
    Morphism {
        #[command(flatten)]
        common: Common,
        /// Deterministic payload whose universal automaton is the target.
        #[arg(long)]
        base: String,
    },
    /// Whether two states of an automaton payload can be merged without
    /// changing the series of --base (defaults to the payload itself).
    Mergible {
        #[command(flatten)]
        common: Common,
        p: usize,
        q: usize,
        #[arg(long)]
        base: Option<String>,
    },
    /// Right-quotient grammar G′ with |G′| = |G|·|B|⁻¹.
    WcfgQuotient {
        /// Document holding the grammar payload.
        grammar: String,
        /// Document holding the divisor automaton payload.
        divisor: String,
        #[arg(long)]
        payload: Option<String>,
        #[arg(long)]
        divisor_payload: Option<String>,
    },
    /// Evaluate a grammar payload at a word.
    WcfgEval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        word: String,
        #[arg(long, default_value_t = 40)]
        depth: usize,
    },
    /// DOT rendering of an automaton payload (or of its universal
    /// automaton with --universal).
    Dot {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        universal: bool,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Invalid(_) | Error::NotProper => 2,
        _ => 3,
    }
}

fn load(path: &str) -> Result<Document, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {path}: {e}")))?;
    parse_document(&text)
}

fn pick<'a>(doc: &'a Document, name: &Option<String>) -> Result<(&'a String, &'a Payload), Error> {
    match name {
        Some(n) => doc
            .payloads
            .get_key_value(n.as_str())
            .ok_or_else(|| Error::Invalid(format!("document has no payload named {n:?}"))),
        None => doc.sole_payload(),
    }
}

fn as_series(p: &Payload, bound: usize) -> Result<Series, Error> {
    match p {
        Payload::Series(s) => Ok(s.clone()),
        Payload::Wa(wa) => {
            let _ = bound;
            Ok(Series::from_wa(wa.clone()))
        }
        Payload::Grammar(_) => {
            Err(Error::Invalid("expected a series or automaton payload, found a grammar".into()))
        }
    }
}

fn as_dwa(p: &Payload, bound: usize) -> Result<Dwa, Error> {
    Ok(as_series(p, bound)?.to_dwa(bound)?.trim())
}

fn as_wa(p: &Payload, bound: usize) -> Result<Wa, Error> {
    match p {
        Payload::Wa(wa) => Ok(wa.clone()),
        _ => Ok(as_series(p, bound)?.to_wa(bound)?),
    }
}

fn as_grammar(p: &Payload) -> Result<Wcfg, Error> {
    match p {
        Payload::Grammar(g) => Ok(g.clone()),
        _ => Err(Error::Invalid("expected a grammar payload".into())),
    }
}

/// Resolve a divisor reference: payload name in `doc`, or a document file
/// whose (sole or named) payload is taken. Separate files must agree on
/// semiring and alphabet.
fn divisor(doc: &Document, reference: &str, bound: usize) -> Result<Series, Error> {
    if doc.payloads.contains_key(reference) {
        return as_series(doc.payload(reference)?, bound);
    }
    if Path::new(reference).exists() {
        let other = load(reference)?;
        if other.semiring != doc.semiring || other.alphabet != doc.alphabet {
            return Err(Error::Invalid(
                "divisor document uses a different semiring or alphabet".into(),
            ));
        }
        return as_series(other.sole_payload()?.1, bound);
    }
    Err(Error::Invalid(format!("{reference:?} is neither a payload name nor a file")))
}

fn result_document(doc: &Document, payload: Payload) -> String {
    let mut payloads = BTreeMap::new();
    payloads.insert("result".to_owned(), payload);
    print_document(&Document {
        semiring: doc.semiring.clone(),
        alphabet: doc.alphabet.clone(),
        payloads,
    })
}

fn value_table(doc: &Document, series: &Series, window: usize) -> Json {
    let mut o = Map::new();
    for w in doc.alphabet.words_up_to(window) {
        o.insert(doc.alphabet.format_word(&w), value_to_json(&doc.semiring, &series.eval(&w)));
    }
    Json::Object(o)
}

fn parse_word(doc: &Document, text: &str) -> Result<Word, Error> {
    doc.alphabet.parse_word(text)
}

fn universal_classes_json(doc: &Document, u: &UniversalAutomaton, window: Option<usize>) -> Json {
    let s = &doc.semiring;
    let classes: Vec<Json> = u
        .classes
        .iter()
        .map(|c| {
            let mut o = Map::new();
            o.insert(
                "h".into(),
                Json::Array(c.h.iter().map(|v| value_to_json(s, v)).collect()),
            );
            o.insert("J".into(), value_to_json(s, &c.j));
            o.insert("G".into(), value_to_json(s, &c.g));
            o.insert("X_eps".into(), value_to_json(s, &c.factorization.x.eval(&[])));
            o.insert("Y_eps".into(), value_to_json(s, &c.factorization.y.eval(&[])));
            o.insert("members".into(), json!(c.members.len()));
            if let Some(win) = window {
                o.insert("X".into(), value_table(doc, &c.factorization.x, win));
                o.insert("Y".into(), value_table(doc, &c.factorization.y, win));
            }
            Json::Object(o)
        })
        .collect();
    let mut eta = Vec::new();
    for (p, sym, q, w) in &u.a_prime.trans {
        eta.push(json!([p, doc.alphabet.symbol(*sym), q, value_to_json(s, w)]));
    }
    json!({"classes": classes, "eta": eta, "audit": u.audit})
}

fn dot_of_wa(doc: &Document, wa: &Wa) -> String {
    let s = &doc.semiring;
    let zero = s.zero();
    let mut out = String::from("digraph fps {\n  rankdir=LR;\n  __start [shape=none, label=\"\"];\n");
    for q in 0..wa.states {
        let shape = if wa.finals[q] != zero { "doublecircle" } else { "circle" };
        let label = if wa.finals[q] != zero {
            format!("q{q}/{}", wa.finals[q])
        } else {
            format!("q{q}")
        };
        out.push_str(&format!("  q{q} [shape={shape}, label=\"{label}\"];\n"));
    }
    for q in 0..wa.states {
        if wa.initial[q] != zero {
            out.push_str(&format!("  __start -> q{q} [label=\"{}\"];\n", wa.initial[q]));
        }
    }
    let mut arcs = wa.trans.clone();
    arcs.sort_by(|a, b| (a.0, a.1, a.2).cmp(&(b.0, b.1, b.2)));
    for (p, sym, q, w) in arcs {
        out.push_str(&format!(
            "  q{p} -> q{q} [label=\"{}/{}\"];\n",
            doc.alphabet.symbol(sym),
            w
        ));
    }
    out.push_str("}\n");
    out
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Eval { common, word, depth } => {
            let doc = load(&common.file)?;
            let (_, p) = pick(&doc, &common.payload)?;
            let w = parse_word(&doc, &word)?;
            let v = match p {
                Payload::Grammar(g) => wcfg_eval(g, &w, depth)?,
                _ => as_series(p, common.bound)?.eval(&w),
            };
            println!(
                "{}",
                json!({"word": word, "value": value_to_json(&doc.semiring, &v)})
            );
        }
        Command::Minimize { common } => {
            let doc = load(&common.file)?;
            let (_, p) = pick(&doc, &common.payload)?;
            let m = as_dwa(p, common.bound)?.minimize();
            println!("{}", result_document(&doc, Payload::Series(Series::from_dwa(m))));
        }
        Command::Determinize { common } => {
            let doc = load(&common.file)?;
            let (_, p) = pick(&doc, &common.payload)?;
            let d = as_series(p, common.bound)?.to_dwa(common.bound)?;
            println!("{}", result_document(&doc, Payload::Series(Series::from_dwa(d))));
        }
        Command::Quotient { common, side, word, by, window } => {
            let doc = load(&common.file)?;
            let (_, p) = pick(&doc, &common.payload)?;
            let a = as_series(p, common.bound)?;
            let q = match (&word, &by) {
                (Some(w), None) => word_quotient(&a, &parse_word(&doc, w)?, side.into()),
                (None, Some(d)) => {
                    series_quotient(&a, &divisor(&doc, d, common.bound)?, side.into(), common.bound)?
                }
                _ => {
                    return Err(Error::Invalid(
                        "pass exactly one of --word or --by as the divisor".into(),
                    ))
                }
            };
            println!("{}", json!({"table": value_table(&doc, &q, window)}));
            println!("{}", result_document(&doc, Payload::Series(q)));
        }
        Command::Residual { common, side, by, window } => {
            let doc = load(&common.file)?;
            let (_, p) = pick(&doc, &common.payload)?;
            let a = as_series(p, common.bound)?;
            let d = divisor(&doc, &by, common.bound)?;
            let r = residual(&a, &d, side.into(), common.bound)?;
            println!("{}", json!({"table": value_table(&doc, &r, window)}));
            println!("{}", result_document(&doc, Payload::Series(r)));
        }
        Command::Include { common, f, g } => {
            let doc = load(&common.file)?;
            let fs = as_series(doc.payload(&f)?, common.bound)?;
            let gs = as_series(doc.payload(&g)?, common.bound)?;
            let d = inclusion_degree(&fs, &gs, common.bound)?;
            println!("{}", json!({"degree": value_to_json(&doc.semiring, &d)}));
        }
        Command::Universal { common } => {
            let doc = load(&common.file)?;
            let (_, p) = pick(&doc, &common.payload)?;
            let a = as_dwa(p, common.bound)?;
            let u = universal_automaton(&a, common.bound)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&universal_classes_json(&doc, &u, None))
                    .expect("serialization")
            );
        }
        Command::Factorize { common, window } => {
            let doc = load(&common.file)?;
            let (_, p) = pick(&doc, &common.payload)?;
            let a = as_dwa(p, common.bound)?;
            let u = universal_automaton(&a, common.bound)?;
            let a_series = Series::from_dwa(a);
            for c in &u.classes {
                debug_assert!(is_factorization(
                    &a_series,
                    &c.factorization.x,
                    &c.factorization.y,
                    common.bound
                )?);
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&universal_classes_json(&doc, &u, Some(window)))
                    .expect("serialization")
            );
        }
        Command::Morphism { common, base } => {
            let doc = load(&common.file)?;
            let (_, p) = pick(&doc, &common.payload)?;
            let b = as_wa(p, common.bound)?;
            let a = as_dwa(doc.payload(&base)?, common.bound)?;
            let u = universal_automaton(&a, common.bound)?;
            let phi = canonical_morphism(&b, &u, &a, common.bound)?;
            let verdict = check_morphism(&b, &u.a_prime, &phi);
            println!(
                "{}",
                json!({
                    "map": phi.map,
                    "plain": verdict.plain,
                    "surjective": verdict.surjective,
                    "strong": verdict.strong,
                    "violations": verdict.violations,
                })
            );
        }
        Command::Mergible { common, p, q, base } => {
            let doc = load(&common.file)?;
            let (name, payload) = pick(&doc, &common.payload)?;
            let wa = as_wa(payload, common.bound)?;
            let base_name = base.unwrap_or_else(|| name.clone());
            let a = as_dwa(doc.payload(&base_name)?, common.bound)?;
            let ok = mergible(&wa, p, q, &a, EquivMode::Bounded(2 * (wa.states + a.states())))?;
            println!("{}", json!({"mergible": ok}));
        }
        Command::WcfgQuotient { grammar, divisor: divisor_file, payload, divisor_payload } => {
            let gdoc = load(&grammar)?;
            let g = as_grammar(pick(&gdoc, &payload)?.1)?;
            let bdoc = load(&divisor_file)?;
            if bdoc.semiring != gdoc.semiring || bdoc.alphabet != gdoc.alphabet {
                return Err(Error::Invalid(
                    "divisor document uses a different semiring or alphabet".into(),
                ));
            }
            let b = as_wa(pick(&bdoc, &divisor_payload)?.1, 100_000)?;
            let gq = wcfg_right_quotient(&g, &b)?;
            println!("{}", result_document(&gdoc, Payload::Grammar(gq)));
        }
        Command::WcfgEval { common, word, depth } => {
            let doc = load(&common.file)?;
            let g = as_grammar(pick(&doc, &common.payload)?.1)?;
            let w = parse_word(&doc, &word)?;
            let v = wcfg_eval(&g, &w, depth)?;
            println!(
                "{}",
                json!({"word": word, "value": value_to_json(&doc.semiring, &v)})
            );
        }
        Command::Dot { common, universal } => {
            let doc = load(&common.file)?;
            let (_, p) = pick(&doc, &common.payload)?;
            if universal {
                let a = as_dwa(p, common.bound)?;
                let u = universal_automaton(&a, common.bound)?;
                print!("{}", dot_of_wa(&doc, &u.a_prime));
            } else {
                let wa = as_wa(p, common.bound)?;
                print!("{}", dot_of_wa(&doc, &wa));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

// Compile-time guard that the semiring type stays exported for documents.
#[allow(dead_code)]
fn _uses(_: &Semiring) {}
