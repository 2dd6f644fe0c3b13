//! JSON document schema: one self-contained document carries a semiring, an
//! alphabet, and named payloads (polynomial series, step functions,
//! deterministic and nondeterministic weighted automata, grammars).
//!
//! Value encoding is per semiring: booleans as JSON booleans, extended
//! naturals as numbers with `"inf"` for infinity, chain levels as numbers,
//! table elements by carrier name. Words are strings of single-character
//! symbols. Parsing reports the JSON path of the first violation; printing
//! is deterministic, so `parse(print(doc))` round-trips byte-stably.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value as Json};

use crate::automata::{Dwa, Wa};
use crate::semiring::{Semiring, Table, Value};
use crate::series::{Dfa, Repr, Series};
use crate::wcfg::{Production, Sym, Wcfg};
use crate::{Alphabet, Error, Result};

/// A named payload of a document.
#[derive(Debug, Clone)]
pub enum Payload {
    Series(Series),
    Wa(Wa),
    Grammar(Wcfg),
}

/// A parsed and validated document.
#[derive(Debug, Clone)]
pub struct Document {
    pub semiring: Semiring,
    pub alphabet: Alphabet,
    pub payloads: BTreeMap<String, Payload>,
}

impl Document {
    /// The payload registered under `name`.
    pub fn payload(&self, name: &str) -> Result<&Payload> {
        self.payloads
            .get(name)
            .ok_or_else(|| Error::Invalid(format!("document has no payload named {name:?}")))
    }

    /// The unique payload, for commands taking a single-payload document.
    pub fn sole_payload(&self) -> Result<(&String, &Payload)> {
        let mut it = self.payloads.iter();
        match (it.next(), it.next()) {
            (Some(p), None) => Ok(p),
            _ => Err(Error::Invalid(
                "expected exactly one payload; name one explicitly instead".into(),
            )),
        }
    }
}

fn bad(path: &str, what: &str) -> Error {
    Error::Invalid(format!("{path}: {what}"))
}

fn as_obj<'a>(j: &'a Json, path: &str) -> Result<&'a Map<String, Json>> {
    j.as_object().ok_or_else(|| bad(path, "expected an object"))
}

fn as_arr<'a>(j: &'a Json, path: &str) -> Result<&'a Vec<Json>> {
    j.as_array().ok_or_else(|| bad(path, "expected an array"))
}

fn as_str<'a>(j: &'a Json, path: &str) -> Result<&'a str> {
    j.as_str().ok_or_else(|| bad(path, "expected a string"))
}

fn as_usize(j: &Json, path: &str) -> Result<usize> {
    j.as_u64().map(|n| n as usize).ok_or_else(|| bad(path, "expected a non-negative integer"))
}

fn field<'a>(o: &'a Map<String, Json>, key: &str, path: &str) -> Result<&'a Json> {
    o.get(key).ok_or_else(|| bad(path, &format!("missing field {key:?}")))
}

/// Decodes a semiring value in the document encoding.
pub fn value_from_json(s: &Semiring, j: &Json, path: &str) -> Result<Value> {
    let v = match (s, j) {
        (Semiring::Boolean, Json::Bool(b)) => Value::B(*b),
        (Semiring::MaxMinNat | Semiring::TropicalNat, Json::String(t)) if t == "inf" => {
            Value::inf()
        }
        (Semiring::MaxMinNat | Semiring::TropicalNat, Json::Number(_)) => {
            Value::fin(j.as_u64().ok_or_else(|| bad(path, "expected a natural number"))?)
        }
        (Semiring::Chain(_), Json::Number(_)) => {
            Value::L(as_usize(j, path)? as u32)
        }
        (Semiring::Table(t), Json::String(name)) => Value::E(
            t.carrier
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| bad(path, &format!("unknown table element {name:?}")))?,
        ),
        _ => return Err(bad(path, "value does not match the document's semiring encoding")),
    };
    if !s.contains(&v) {
        return Err(bad(path, "value outside the semiring carrier"));
    }
    Ok(v)
}

/// Encodes a semiring value in the document encoding.
pub fn value_to_json(s: &Semiring, v: &Value) -> Json {
    match (s, v) {
        (_, Value::B(b)) => json!(b),
        (_, Value::N(crate::semiring::Ext::Inf)) => json!("inf"),
        (_, Value::N(crate::semiring::Ext::Fin(n))) => json!(n),
        (_, Value::L(i)) => json!(i),
        (Semiring::Table(t), Value::E(i)) => json!(t.carrier[*i]),
        _ => unreachable!("value encoding matches the semiring"),
    }
}

fn semiring_from_json(j: &Json) -> Result<Semiring> {
    let path = "semiring";
    let o = as_obj(j, path)?;
    let kind = as_str(field(o, "kind", path)?, "semiring.kind")?;
    let s = match kind {
        "boolean" => Semiring::Boolean,
        "maxmin_nat" => Semiring::MaxMinNat,
        "tropical_nat" => Semiring::TropicalNat,
        "chain" => {
            let levels = as_usize(field(o, "levels", path)?, "semiring.levels")?;
            Semiring::Chain(levels as u32)
        }
        "table" => {
            let carrier: Vec<String> =
                as_arr(field(o, "carrier", path)?, "semiring.carrier")?
                    .iter()
                    .map(|x| as_str(x, "semiring.carrier[]").map(str::to_owned))
                    .collect::<Result<_>>()?;
            let grid = |key: &str| -> Result<Vec<Vec<usize>>> {
                let p = format!("semiring.{key}");
                as_arr(field(o, key, "semiring")?, &p)?
                    .iter()
                    .map(|row| {
                        as_arr(row, &p)?.iter().map(|x| as_usize(x, &p)).collect::<Result<_>>()
                    })
                    .collect()
            };
            let elem = |key: &str| -> Result<usize> {
                let p = format!("semiring.{key}");
                let name = as_str(field(o, key, "semiring")?, &p)?;
                carrier
                    .iter()
                    .position(|c| c == name)
                    .ok_or_else(|| bad(&p, &format!("unknown table element {name:?}")))
            };
            let table = Table {
                plus: grid("plus")?,
                times: grid("times")?,
                zero: elem("zero")?,
                one: elem("one")?,
                carrier,
            };
            table.validate_shape().map_err(|e| bad(path, &e.to_string()))?;
            Semiring::Table(table)
        }
        other => return Err(bad("semiring.kind", &format!("unknown semiring kind {other:?}"))),
    };
    let report = s.validate_axioms();
    if !report.all_pass() {
        let laws: Vec<&str> = report.failures().iter().map(|c| c.law.as_str()).collect();
        return Err(bad(path, &format!("semiring laws violated: {}", laws.join(", "))));
    }
    Ok(s)
}

fn semiring_to_json(s: &Semiring) -> Json {
    match s {
        Semiring::Boolean => json!({"kind": "boolean"}),
        Semiring::MaxMinNat => json!({"kind": "maxmin_nat"}),
        Semiring::TropicalNat => json!({"kind": "tropical_nat"}),
        Semiring::Chain(n) => json!({"kind": "chain", "levels": n}),
        Semiring::Table(t) => json!({
            "kind": "table",
            "carrier": t.carrier,
            "plus": t.plus,
            "times": t.times,
            "zero": t.carrier[t.zero],
            "one": t.carrier[t.one],
        }),
    }
}

fn delta_from_json(j: &Json, alphabet: &Alphabet, states: usize, path: &str) -> Result<Vec<Vec<usize>>> {
    let rows = as_arr(j, path)?;
    let mut delta = Vec::with_capacity(rows.len());
    for (q, row) in rows.iter().enumerate() {
        let p = format!("{path}[{q}]");
        let row = as_arr(row, &p)?;
        if row.len() != alphabet.len() {
            return Err(bad(&p, "delta row is not total over the alphabet"));
        }
        let mut out = Vec::with_capacity(row.len());
        for (i, x) in row.iter().enumerate() {
            let target = as_usize(x, &format!("{p}[{i}]"))?;
            if target >= states {
                return Err(bad(&format!("{p}[{i}]"), "target state out of range"));
            }
            out.push(target);
        }
        delta.push(out);
    }
    Ok(delta)
}

fn dwa_from_json(
    o: &Map<String, Json>,
    s: &Semiring,
    alphabet: &Alphabet,
    path: &str,
) -> Result<Dwa> {
    let finals_j = as_arr(field(o, "finals", path)?, &format!("{path}.finals"))?;
    let states = finals_j.len();
    let finals = finals_j
        .iter()
        .enumerate()
        .map(|(i, x)| value_from_json(s, x, &format!("{path}.finals[{i}]")))
        .collect::<Result<_>>()?;
    let dwa = Dwa {
        semiring: s.clone(),
        alphabet: alphabet.clone(),
        delta: delta_from_json(field(o, "delta", path)?, alphabet, states, &format!("{path}.delta"))?,
        initial: as_usize(field(o, "initial", path)?, &format!("{path}.initial"))?,
        finals,
    };
    dwa.validate().map_err(|e| bad(path, &e.to_string()))?;
    Ok(dwa)
}

fn dfa_from_json(j: &Json, alphabet: &Alphabet, path: &str) -> Result<Dfa> {
    let o = as_obj(j, path)?;
    let acc_j = as_arr(field(o, "accepting", path)?, &format!("{path}.accepting"))?;
    let accepting = acc_j
        .iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_bool().ok_or_else(|| bad(&format!("{path}.accepting[{i}]"), "expected a boolean"))
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(Dfa {
        alphabet: alphabet.clone(),
        delta: delta_from_json(
            field(o, "delta", path)?,
            alphabet,
            accepting.len(),
            &format!("{path}.delta"),
        )?,
        initial: as_usize(field(o, "initial", path)?, &format!("{path}.initial"))?,
        accepting,
    })
}

fn payload_from_json(
    j: &Json,
    s: &Semiring,
    alphabet: &Alphabet,
    path: &str,
) -> Result<Payload> {
    let o = as_obj(j, path)?;
    let kind = as_str(field(o, "type", path)?, &format!("{path}.type"))?;
    let payload = match kind {
        "poly" => {
            let terms_j = as_obj(field(o, "terms", path)?, &format!("{path}.terms"))?;
            let mut terms = BTreeMap::new();
            for (word, wj) in terms_j {
                let p = format!("{path}.terms[{word:?}]");
                let w = alphabet.parse_word(word).map_err(|e| bad(&p, &e.to_string()))?;
                terms.insert(w, value_from_json(s, wj, &p)?);
            }
            Payload::Series(Series::poly(s.clone(), alphabet.clone(), terms))
        }
        "step" => {
            let parts_j = as_arr(field(o, "parts", path)?, &format!("{path}.parts"))?;
            let mut parts = Vec::new();
            for (i, part) in parts_j.iter().enumerate() {
                let p = format!("{path}.parts[{i}]");
                let pair = as_arr(part, &p)?;
                if pair.len() != 2 {
                    return Err(bad(&p, "expected [weight, dfa]"));
                }
                let weight = value_from_json(s, &pair[0], &format!("{p}[0]"))?;
                let dfa = dfa_from_json(&pair[1], alphabet, &format!("{p}[1]"))?;
                parts.push((weight, dfa));
            }
            Payload::Series(Series {
                semiring: s.clone(),
                alphabet: alphabet.clone(),
                repr: Repr::Step(parts),
            })
        }
        "dwa" => Payload::Series(Series::from_dwa(dwa_from_json(o, s, alphabet, path)?)),
        "wa" => {
            let initial_j = as_arr(field(o, "initial", path)?, &format!("{path}.initial"))?;
            let states = initial_j.len();
            let decode_vec = |arr: &Vec<Json>, key: &str| -> Result<Vec<Value>> {
                arr.iter()
                    .enumerate()
                    .map(|(i, x)| value_from_json(s, x, &format!("{path}.{key}[{i}]")))
                    .collect()
            };
            let initial = decode_vec(initial_j, "initial")?;
            let finals =
                decode_vec(as_arr(field(o, "finals", path)?, &format!("{path}.finals"))?, "finals")?;
            let trans_j = as_arr(field(o, "trans", path)?, &format!("{path}.trans"))?;
            let mut trans = Vec::new();
            for (i, t) in trans_j.iter().enumerate() {
                let p = format!("{path}.trans[{i}]");
                let quad = as_arr(t, &p)?;
                if quad.len() != 4 {
                    return Err(bad(&p, "expected [from, symbol, to, weight]"));
                }
                let sym_name = as_str(&quad[1], &format!("{p}[1]"))?;
                let sym = alphabet
                    .id_of(sym_name)
                    .ok_or_else(|| bad(&format!("{p}[1]"), "unknown symbol"))?;
                trans.push((
                    as_usize(&quad[0], &format!("{p}[0]"))?,
                    sym,
                    as_usize(&quad[2], &format!("{p}[2]"))?,
                    value_from_json(s, &quad[3], &format!("{p}[3]"))?,
                ));
            }
            let wa = Wa {
                semiring: s.clone(),
                alphabet: alphabet.clone(),
                states,
                trans,
                initial,
                finals,
            };
            wa.validate().map_err(|e| bad(path, &e.to_string()))?;
            Payload::Wa(wa)
        }
        "wcfg" => {
            let nonterminals: Vec<String> =
                as_arr(field(o, "nonterminals", path)?, &format!("{path}.nonterminals"))?
                    .iter()
                    .map(|x| as_str(x, &format!("{path}.nonterminals[]")).map(str::to_owned))
                    .collect::<Result<_>>()?;
            let start_name = as_str(field(o, "start", path)?, &format!("{path}.start"))?;
            let start = nonterminals
                .iter()
                .position(|n| n == start_name)
                .ok_or_else(|| bad(&format!("{path}.start"), "start is not a nonterminal"))?;
            let prods_j = as_arr(field(o, "productions", path)?, &format!("{path}.productions"))?;
            let mut productions = Vec::new();
            for (i, pj) in prods_j.iter().enumerate() {
                let p = format!("{path}.productions[{i}]");
                let triple = as_arr(pj, &p)?;
                if triple.len() != 3 {
                    return Err(bad(&p, "expected [head, body, weight]"));
                }
                let head = as_str(&triple[0], &format!("{p}[0]"))?;
                let lhs = nonterminals
                    .iter()
                    .position(|n| n == head)
                    .ok_or_else(|| bad(&format!("{p}[0]"), "head is not a nonterminal"))?;
                let mut rhs = Vec::new();
                for (k, symj) in as_arr(&triple[1], &format!("{p}[1]"))?.iter().enumerate() {
                    let name = as_str(symj, &format!("{p}[1][{k}]"))?;
                    let sym = if let Some(t) = alphabet.id_of(name) {
                        Sym::T(t)
                    } else if let Some(n) = nonterminals.iter().position(|x| x == name) {
                        Sym::N(n)
                    } else {
                        return Err(bad(&format!("{p}[1][{k}]"), "unknown symbol"));
                    };
                    rhs.push(sym);
                }
                productions.push(Production {
                    lhs,
                    rhs,
                    weight: value_from_json(s, &triple[2], &format!("{p}[2]"))?,
                });
            }
            let g = Wcfg {
                semiring: s.clone(),
                alphabet: alphabet.clone(),
                nonterminals,
                start,
                productions,
            };
            g.validate().map_err(|e| bad(path, &e.to_string()))?;
            Payload::Grammar(g)
        }
        other => return Err(bad(&format!("{path}.type"), &format!("unknown payload type {other:?}"))),
    };
    Ok(payload)
}

fn payload_to_json(p: &Payload, s: &Semiring, alphabet: &Alphabet) -> Json {
    match p {
        Payload::Series(series) => match &series.repr {
            Repr::Poly(terms) => {
                let mut o = Map::new();
                for (w, v) in terms {
                    o.insert(alphabet.format_word(w), value_to_json(s, v));
                }
                json!({"type": "poly", "terms": o})
            }
            Repr::Step(parts) => {
                let parts: Vec<Json> = parts
                    .iter()
                    .map(|(v, dfa)| {
                        json!([
                            value_to_json(s, v),
                            {
                                "delta": dfa.delta,
                                "initial": dfa.initial,
                                "accepting": dfa.accepting,
                            }
                        ])
                    })
                    .collect();
                json!({"type": "step", "parts": parts})
            }
            Repr::Dwa(d) => json!({
                "type": "dwa",
                "delta": d.delta,
                "initial": d.initial,
                "finals": d.finals.iter().map(|v| value_to_json(s, v)).collect::<Vec<_>>(),
            }),
            other => {
                // Rational combinations are materialized as an automaton for
                // printing; unprintable only on bound blowup, reported as a
                // plain string.
                match series.to_wa(usize::MAX) {
                    Ok(wa) => payload_to_json(&Payload::Wa(wa), s, alphabet),
                    Err(_) => json!({"type": "opaque", "repr": format!("{other:?}")}),
                }
            }
        },
        Payload::Wa(wa) => json!({
            "type": "wa",
            "initial": wa.initial.iter().map(|v| value_to_json(s, v)).collect::<Vec<_>>(),
            "finals": wa.finals.iter().map(|v| value_to_json(s, v)).collect::<Vec<_>>(),
            "trans": wa
                .trans
                .iter()
                .map(|(p, sym, q, w)| {
                    json!([p, alphabet.symbol(*sym), q, value_to_json(s, w)])
                })
                .collect::<Vec<_>>(),
        }),
        Payload::Grammar(g) => json!({
            "type": "wcfg",
            "nonterminals": g.nonterminals,
            "start": g.nonterminals[g.start],
            "productions": g
                .productions
                .iter()
                .map(|p| {
                    let body: Vec<&str> = p
                        .rhs
                        .iter()
                        .map(|sym| match sym {
                            Sym::T(t) => alphabet.symbol(*t),
                            Sym::N(n) => g.nonterminals[*n].as_str(),
                        })
                        .collect();
                    json!([g.nonterminals[p.lhs], body, value_to_json(s, &p.weight)])
                })
                .collect::<Vec<_>>(),
        }),
    }
}

/// Parses and validates a document from JSON text.
pub fn parse_document(text: &str) -> Result<Document> {
    let j: Json =
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("malformed JSON: {e}")))?;
    let o = as_obj(&j, "$")?;
    let semiring = semiring_from_json(field(o, "semiring", "$")?)?;
    let alphabet_names: Vec<String> = as_arr(field(o, "alphabet", "$")?, "alphabet")?
        .iter()
        .map(|x| as_str(x, "alphabet[]").map(str::to_owned))
        .collect::<Result<_>>()?;
    let alphabet = Alphabet::new(alphabet_names).map_err(|e| bad("alphabet", &e.to_string()))?;
    let payloads_j = as_obj(field(o, "payloads", "$")?, "payloads")?;
    let mut payloads = BTreeMap::new();
    for (name, pj) in payloads_j {
        let path = format!("payloads.{name}");
        payloads.insert(name.clone(), payload_from_json(pj, &semiring, &alphabet, &path)?);
    }
    Ok(Document { semiring, alphabet, payloads })
}

/// Prints a document deterministically (payloads in name order).
pub fn print_document(doc: &Document) -> String {
    let mut payloads = Map::new();
    for (name, p) in &doc.payloads {
        payloads.insert(name.clone(), payload_to_json(p, &doc.semiring, &doc.alphabet));
    }
    let j = json!({
        "semiring": semiring_to_json(&doc.semiring),
        "alphabet": doc.alphabet.symbols(),
        "payloads": payloads,
    });
    serde_json::to_string_pretty(&j).expect("document serialization")
}
