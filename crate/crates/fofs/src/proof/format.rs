//! Proof file serialization: a JSON document with fields `logic`,
//! `assumptions`, `lines` (each `{id, formula, rule, premises,
//! bindings}`), and `conclusion`. Formulas are stored in the canonical
//! text form; the signature is inferred from use and must be consistent
//! across the document.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{parse_formula_inferred, Formula};

use super::{Justification, LogicId, Proof, ProofLine, Rule};

#[derive(Debug, Error)]
pub enum ProofFormatError {
    #[error("malformed proof document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown logic token {0:?}")]
    Logic(String),
    #[error("in {place}: {err}")]
    Formula { place: String, err: String },
    #[error("line {id}: unknown rule {rule:?}")]
    UnknownRule { id: usize, rule: String },
    #[error("line {id}: rule {rule} expects {want} premises, got {got}")]
    PremiseCount {
        id: usize,
        rule: String,
        want: usize,
        got: usize,
    },
    #[error("line {id}: GEN requires bindings for \"c\" and \"x\"")]
    MissingBindings { id: usize },
    #[error("predicate {pred} used with arities {a} and {b}")]
    InconsistentArity { pred: String, a: usize, b: usize },
}

#[derive(Serialize, Deserialize)]
struct ProofDoc {
    logic: String,
    assumptions: Vec<String>,
    lines: Vec<LineDoc>,
    conclusion: String,
}

#[derive(Serialize, Deserialize)]
struct LineDoc {
    id: usize,
    formula: String,
    rule: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    premises: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    bindings: Option<BTreeMap<String, String>>,
}

pub fn proof_to_json(p: &Proof) -> String {
    let lines = p
        .lines
        .iter()
        .map(|l| {
            let (rule, premises, bindings) = match &l.justification {
                Justification::Axiom(r) => (r.name().to_string(), vec![], None),
                Justification::Mp(i, j) => ("MP".to_string(), vec![*i, *j], None),
                Justification::Gen {
                    premise,
                    constant,
                    variable,
                } => (
                    "GEN".to_string(),
                    vec![*premise],
                    Some(
                        [
                            ("c".to_string(), constant.clone()),
                            ("x".to_string(), variable.clone()),
                        ]
                        .into_iter()
                        .collect(),
                    ),
                ),
                Justification::RegBox(i) => ("REG-BOX".to_string(), vec![*i], None),
                Justification::RegDia(i) => ("REG-DIA".to_string(), vec![*i], None),
                Justification::Ipc(ids) => ("IPC".to_string(), ids.clone(), None),
            };
            LineDoc {
                id: l.id,
                formula: l.formula.to_string(),
                rule,
                premises,
                bindings,
            }
        })
        .collect();
    let doc = ProofDoc {
        logic: p.logic.token(),
        assumptions: p.assumptions.iter().map(|a| a.to_string()).collect(),
        lines,
        conclusion: p.conclusion.to_string(),
    };
    serde_json::to_string_pretty(&doc).expect("proof documents serialize")
}

fn parse_in(
    text: &str,
    place: &str,
    arities: &mut BTreeMap<String, usize>,
) -> Result<Formula, ProofFormatError> {
    let parsed = parse_formula_inferred(text).map_err(|e| ProofFormatError::Formula {
        place: place.to_string(),
        err: e.to_string(),
    })?;
    for (p, a) in parsed.predicates {
        if let Some(&prev) = arities.get(&p) {
            if prev != a {
                return Err(ProofFormatError::InconsistentArity {
                    pred: p,
                    a: prev,
                    b: a,
                });
            }
        } else {
            arities.insert(p, a);
        }
    }
    Ok(parsed.formula)
}

pub fn proof_from_json(text: &str) -> Result<Proof, ProofFormatError> {
    let doc: ProofDoc = serde_json::from_str(text)?;
    let logic =
        LogicId::parse_token(&doc.logic).map_err(|_| ProofFormatError::Logic(doc.logic.clone()))?;
    let mut arities = BTreeMap::new();
    let mut assumptions = Vec::new();
    for (i, a) in doc.assumptions.iter().enumerate() {
        assumptions.push(parse_in(a, &format!("assumption {i}"), &mut arities)?);
    }
    let conclusion = parse_in(&doc.conclusion, "conclusion", &mut arities)?;
    let mut lines = Vec::new();
    for l in &doc.lines {
        let formula = parse_in(&l.formula, &format!("line {}", l.id), &mut arities)?;
        let need = |want: usize| -> Result<(), ProofFormatError> {
            if l.premises.len() != want {
                Err(ProofFormatError::PremiseCount {
                    id: l.id,
                    rule: l.rule.clone(),
                    want,
                    got: l.premises.len(),
                })
            } else {
                Ok(())
            }
        };
        let justification = match l.rule.as_str() {
            "MP" => {
                need(2)?;
                Justification::Mp(l.premises[0], l.premises[1])
            }
            "GEN" => {
                need(1)?;
                let b = l
                    .bindings
                    .as_ref()
                    .ok_or(ProofFormatError::MissingBindings { id: l.id })?;
                let (c, x) = match (b.get("c"), b.get("x")) {
                    (Some(c), Some(x)) => (c.clone(), x.clone()),
                    _ => return Err(ProofFormatError::MissingBindings { id: l.id }),
                };
                Justification::Gen {
                    premise: l.premises[0],
                    constant: c,
                    variable: x,
                }
            }
            "REG-BOX" => {
                need(1)?;
                Justification::RegBox(l.premises[0])
            }
            "REG-DIA" => {
                need(1)?;
                Justification::RegDia(l.premises[0])
            }
            "IPC" => Justification::Ipc(l.premises.clone()),
            name => match Rule::from_name(name) {
                Some(r) => {
                    need(0)?;
                    Justification::Axiom(r)
                }
                None => {
                    return Err(ProofFormatError::UnknownRule {
                        id: l.id,
                        rule: l.rule.clone(),
                    })
                }
            },
        };
        lines.push(ProofLine {
            id: l.id,
            formula,
            justification,
        });
    }
    Ok(Proof {
        logic,
        assumptions,
        lines,
        conclusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::{check_proof, BaseLogic};
    use crate::syntax::Term;

    #[test]
    fn round_trip_preserves_verdict() {
        let pc = Formula::pred("P", vec![Term::con("c")]);
        let p = Proof {
            logic: LogicId::new(BaseLogic::Fs),
            assumptions: vec![pc.clone()],
            lines: vec![ProofLine {
                id: 1,
                formula: Formula::imp(pc.clone(), Formula::or(pc.clone(), pc.clone())),
                justification: Justification::Axiom(Rule::Int),
            }],
            conclusion: Formula::or(pc.clone(), pc),
        };
        assert!(check_proof(&p).is_accepted());
        let text = proof_to_json(&p);
        let back = proof_from_json(&text).unwrap();
        assert_eq!(p, back);
        assert!(check_proof(&back).is_accepted());
    }

    #[test]
    fn bad_rule_name_rejected() {
        let text = r#"{"logic":"fs","assumptions":[],"lines":[{"id":1,"formula":"P(c)","rule":"AX"}],"conclusion":"P(c)"}"#;
        assert!(matches!(
            proof_from_json(text),
            Err(ProofFormatError::UnknownRule { .. })
        ));
    }
}
