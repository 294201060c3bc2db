//! Model files: a JSON document with fields `worlds`, `int_leq`,
//! `modal`, `domains`, `equal`, `constants`, and `predicates`. The
//! loader closes `int_leq` reflexively and transitively (rejecting the
//! input if closure breaks antisymmetry) and takes `modal` literally.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::Signature;

use super::{Frame, Model, ModelError, Relation};

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("malformed model document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("unknown world {0} referenced in {1}")]
    UnknownWorld(String, &'static str),
    #[error("unknown element {0} referenced in {1}")]
    UnknownElement(String, &'static str),
    #[error("predicate {pred} used with tuple lengths {a} and {b}")]
    InconsistentArity { pred: String, a: usize, b: usize },
    #[error("predicate {0} has no tuples anywhere; declare its arity via an explicit signature")]
    UnknownArity(String),
}

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    worlds: Vec<String>,
    #[serde(default)]
    int_leq: Vec<(String, String)>,
    #[serde(default)]
    modal: Vec<(String, String)>,
    #[serde(default)]
    domains: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    equal: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    constants: BTreeMap<String, String>,
    #[serde(default)]
    predicates: BTreeMap<String, BTreeMap<String, Vec<Vec<String>>>>,
}

/// Loads a model. With `signature` absent, constants come from the
/// `constants` field and predicate arities are inferred from tuples.
pub fn model_from_json(
    text: &str,
    signature: Option<&Signature>,
) -> Result<Model, ModelFileError> {
    let doc: ModelDoc = serde_json::from_str(text)?;
    let world_index: BTreeMap<String, usize> = doc
        .worlds
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i))
        .collect();
    let widx = |name: &str, place: &'static str| -> Result<usize, ModelFileError> {
        world_index
            .get(name)
            .copied()
            .ok_or_else(|| ModelFileError::UnknownWorld(name.to_string(), place))
    };
    for w in doc.domains.keys().chain(doc.equal.keys()).chain(doc.predicates.keys()) {
        widx(w, "a keyed field")?;
    }

    // element table, in order of first appearance per world order
    let mut elems: Vec<String> = Vec::new();
    let mut elem_index: BTreeMap<String, usize> = BTreeMap::new();
    for w in &doc.worlds {
        if let Some(list) = doc.domains.get(w) {
            for e in list {
                if !elem_index.contains_key(e) {
                    elem_index.insert(e.clone(), elems.len());
                    elems.push(e.clone());
                }
            }
        }
    }
    let eidx = |name: &str, place: &'static str| -> Result<usize, ModelFileError> {
        elem_index
            .get(name)
            .copied()
            .ok_or_else(|| ModelFileError::UnknownElement(name.to_string(), place))
    };

    let signature = match signature {
        Some(s) => s.clone(),
        None => {
            let constants: Vec<String> = doc.constants.keys().cloned().collect();
            let mut preds: BTreeMap<String, usize> = BTreeMap::new();
            for table in doc.predicates.values() {
                for (p, tuples) in table {
                    for t in tuples {
                        match preds.get(p) {
                            Some(&a) if a != t.len() => {
                                return Err(ModelFileError::InconsistentArity {
                                    pred: p.clone(),
                                    a,
                                    b: t.len(),
                                })
                            }
                            Some(_) => {}
                            None => {
                                preds.insert(p.clone(), t.len());
                            }
                        }
                    }
                }
            }
            Signature::with_generated(constants, preds).map_err(ModelError::Signature)?
        }
    };

    let n = doc.worlds.len();
    let mut leq = Relation::new(n);
    for (a, b) in &doc.int_leq {
        leq.set(widx(a, "int_leq")?, widx(b, "int_leq")?);
    }
    leq.reflexive_close();
    leq.transitive_close();
    if !leq.is_antisymmetric() {
        let bad = leq
            .pairs()
            .find(|&(a, b)| a != b && leq.contains(b, a))
            .map(|(a, b)| format!("{} and {}", doc.worlds[a], doc.worlds[b]))
            .unwrap_or_default();
        return Err(ModelError::ClosureAntisymmetry(bad).into());
    }
    let mut modal = Relation::new(n);
    for (a, b) in &doc.modal {
        modal.set(widx(a, "modal")?, widx(b, "modal")?);
    }

    let mut domains: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for (w, list) in &doc.domains {
        let wi = widx(w, "domains")?;
        for e in list {
            domains[wi].insert(eidx(e, "domains")?);
        }
    }
    let mut eq_blocks: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n];
    for (w, blocks) in &doc.equal {
        let wi = widx(w, "equal")?;
        for block in blocks {
            let mut ids = Vec::new();
            for e in block {
                ids.push(eidx(e, "equal")?);
            }
            eq_blocks[wi].push(ids);
        }
    }
    let mut constants = BTreeMap::new();
    for (c, e) in &doc.constants {
        constants.insert(c.clone(), eidx(e, "constants")?);
    }
    let mut extensions: Vec<BTreeMap<String, BTreeSet<Vec<usize>>>> = vec![BTreeMap::new(); n];
    for (w, table) in &doc.predicates {
        let wi = widx(w, "predicates")?;
        for (p, tuples) in table {
            if signature.arity(p).is_none() {
                return Err(ModelFileError::UnknownArity(p.clone()));
            }
            let mut set = BTreeSet::new();
            for t in tuples {
                let mut tuple = Vec::new();
                for e in t {
                    tuple.push(eidx(e, "predicates")?);
                }
                set.insert(tuple);
            }
            extensions[wi].insert(p.clone(), set);
        }
    }

    let frame = Frame {
        worlds: doc.worlds,
        leq,
        modal,
    };
    Ok(Model::new(
        signature, frame, elems, domains, eq_blocks, constants, extensions,
    )?)
}

/// Serializes a model; output is stable (sorted keys, full closure of
/// the intuitionistic order).
pub fn model_to_json(m: &Model) -> String {
    let wname = |w: usize| m.frame.worlds[w].clone();
    let ename = |e: usize| m.elems[e].clone();
    let mut equal = BTreeMap::new();
    for w in 0..m.frame.len() {
        let mut blocks: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for (&e, &r) in &m.eq_rep[w] {
            blocks.entry(r).or_default().push(ename(e));
        }
        let nontrivial: Vec<Vec<String>> =
            blocks.into_values().filter(|b| b.len() > 1).collect();
        if !nontrivial.is_empty() {
            equal.insert(wname(w), nontrivial);
        }
    }
    let doc = ModelDoc {
        worlds: m.frame.worlds.clone(),
        int_leq: m
            .frame
            .leq
            .pairs()
            .map(|(a, b)| (wname(a), wname(b)))
            .collect(),
        modal: m
            .frame
            .modal
            .pairs()
            .map(|(a, b)| (wname(a), wname(b)))
            .collect(),
        domains: (0..m.frame.len())
            .map(|w| (wname(w), m.domains[w].iter().map(|&e| ename(e)).collect()))
            .collect(),
        equal,
        constants: m
            .constants
            .iter()
            .map(|(c, &e)| (c.clone(), ename(e)))
            .collect(),
        predicates: (0..m.frame.len())
            .filter(|&w| !m.extensions[w].is_empty())
            .map(|w| {
                (
                    wname(w),
                    m.extensions[w]
                        .iter()
                        .map(|(p, ts)| {
                            (
                                p.clone(),
                                ts.iter()
                                    .map(|t| t.iter().map(|&e| ename(e)).collect())
                                    .collect(),
                            )
                        })
                        .collect(),
                )
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("model documents serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::eval_sentence;
    use crate::syntax::{parse_formula, Formula};

    const DOC: &str = r#"{
        "worlds": ["w0", "w1"],
        "int_leq": [["w0", "w1"]],
        "modal": [["w1", "w1"]],
        "domains": {"w0": ["a"], "w1": ["a", "b"]},
        "equal": {"w1": [["a", "b"]]},
        "constants": {"c": "a"},
        "predicates": {"w1": {"P": [["a"], ["b"]]}}
    }"#;

    #[test]
    fn loads_and_validates() {
        let m = model_from_json(DOC, None).unwrap();
        assert!(m.validate().is_empty(), "{}", m.validate());
        assert_eq!(m.frame.len(), 2);
        assert!(m.frame.leq.contains(0, 0), "reflexive closure applied");
        let f: Formula = parse_formula("P(c)", &m.signature).unwrap();
        assert!(!eval_sentence(&m, 0, &f).unwrap());
        assert!(eval_sentence(&m, 1, &f).unwrap());
    }

    #[test]
    fn round_trips() {
        let m = model_from_json(DOC, None).unwrap();
        let text = model_to_json(&m);
        let back = model_from_json(&text, None).unwrap();
        assert_eq!(m, back);
        assert_eq!(text, model_to_json(&back));
    }

    #[test]
    fn closure_antisymmetry_rejected() {
        let doc = r#"{
            "worlds": ["a", "b"],
            "int_leq": [["a", "b"], ["b", "a"]],
            "domains": {"a": ["e"], "b": ["e"]}
        }"#;
        assert!(matches!(
            model_from_json(doc, None),
            Err(ModelFileError::Model(ModelError::ClosureAntisymmetry(_)))
        ));
    }

    #[test]
    fn unknown_world_rejected() {
        let doc = r#"{
            "worlds": ["a"],
            "modal": [["a", "zz"]]
        }"#;
        assert!(matches!(
            model_from_json(doc, None),
            Err(ModelFileError::UnknownWorld(..))
        ));
    }
}
