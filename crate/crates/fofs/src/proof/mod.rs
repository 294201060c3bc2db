//! Hilbert-style proofs and their checker, derived-proof builders,
//! bounded derivability, and pair-consistency testing.

mod checker;
mod derived;
mod format;
mod ipc;
mod search;

pub use checker::{check_proof, Verdict};
pub use derived::{derive_schema, DeriveError, DerivedSchema};
pub use format::{proof_from_json, proof_to_json};
pub use ipc::ipc_decide;
pub use search::{bounded_derive, pair_consistent_bounded, DeriveOutcome, PairVerdict};

pub(crate) use ipc::{ipc_entails, ipc_valid_skeleton};

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Formula, Signature};

/// One of the six base logics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BaseLogic {
    Fs,
    FsD,
    Fs4,
    FsD4,
    FsT,
    FsS4,
}

impl BaseLogic {
    pub const ALL: [BaseLogic; 6] = [
        BaseLogic::Fs,
        BaseLogic::FsD,
        BaseLogic::Fs4,
        BaseLogic::FsD4,
        BaseLogic::FsT,
        BaseLogic::FsS4,
    ];

    pub fn token(self) -> &'static str {
        match self {
            BaseLogic::Fs => "fs",
            BaseLogic::FsD => "fs-d",
            BaseLogic::Fs4 => "fs-4",
            BaseLogic::FsD4 => "fs-d4",
            BaseLogic::FsT => "fs-t",
            BaseLogic::FsS4 => "fs-s4",
        }
    }

    pub fn serial(self) -> bool {
        matches!(self, BaseLogic::FsD | BaseLogic::FsD4)
    }

    pub fn transitive(self) -> bool {
        matches!(self, BaseLogic::Fs4 | BaseLogic::FsD4 | BaseLogic::FsS4)
    }

    pub fn reflexive(self) -> bool {
        matches!(self, BaseLogic::FsT | BaseLogic::FsS4)
    }
}

/// A logic: a base plus the independent NI/ND identity flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LogicId {
    pub base: BaseLogic,
    pub ni: bool,
    pub nd: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown logic token {0:?}")]
pub struct BadLogicToken(pub String);

impl LogicId {
    pub fn new(base: BaseLogic) -> LogicId {
        LogicId {
            base,
            ni: false,
            nd: false,
        }
    }

    pub fn with_ni(mut self) -> LogicId {
        self.ni = true;
        self
    }

    pub fn with_nd(mut self) -> LogicId {
        self.nd = true;
        self
    }

    /// CLI token: base token optionally suffixed `+ni`, `+nd`, `+ni+nd`.
    pub fn token(&self) -> String {
        let mut s = self.base.token().to_string();
        if self.ni {
            s.push_str("+ni");
        }
        if self.nd {
            s.push_str("+nd");
        }
        s
    }

    pub fn parse_token(tok: &str) -> Result<LogicId, BadLogicToken> {
        let (rest, ni, nd) = if let Some(r) = tok.strip_suffix("+ni+nd") {
            (r, true, true)
        } else if let Some(r) = tok.strip_suffix("+ni") {
            (r, true, false)
        } else if let Some(r) = tok.strip_suffix("+nd") {
            (r, false, true)
        } else {
            (tok, false, false)
        };
        let base = BaseLogic::ALL
            .into_iter()
            .find(|b| b.token() == rest)
            .ok_or_else(|| BadLogicToken(tok.into()))?;
        Ok(LogicId { base, ni, nd })
    }

    /// Axiom schemata available in this logic, in citation order.
    pub fn axioms(&self) -> Vec<Rule> {
        let mut out = vec![
            Rule::Int,
            Rule::KBa,
            Rule::KBb,
            Rule::KDa,
            Rule::KDb,
            Rule::Fs1,
            Rule::Fs2,
            Rule::Univ,
            Rule::Exist,
            Rule::ForallAnt,
            Rule::ForallCon,
            Rule::IdRef,
            Rule::IdSub,
        ];
        if self.base.serial() {
            out.push(Rule::D);
        }
        if self.base.reflexive() {
            out.push(Rule::TBox);
            out.push(Rule::TDia);
        }
        if self.base.transitive() {
            out.push(Rule::FourBox);
            out.push(Rule::FourDia);
        }
        if self.ni {
            out.push(Rule::Ni);
        }
        if self.nd {
            out.push(Rule::Nd);
        }
        out
    }
}

impl fmt::Display for LogicId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.token())
    }
}

/// Axiom-schema citations; names are the proof-file rule tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Int,
    KBa,
    KBb,
    KDa,
    KDb,
    Fs1,
    Fs2,
    Univ,
    Exist,
    ForallAnt,
    ForallCon,
    IdRef,
    IdSub,
    D,
    TBox,
    TDia,
    FourBox,
    FourDia,
    Ni,
    Nd,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Int => "INT",
            Rule::KBa => "KB-a",
            Rule::KBb => "KB-b",
            Rule::KDa => "KD-a",
            Rule::KDb => "KD-b",
            Rule::Fs1 => "FS1",
            Rule::Fs2 => "FS2",
            Rule::Univ => "UNIV",
            Rule::Exist => "EXIST",
            Rule::ForallAnt => "FORALL-ANT",
            Rule::ForallCon => "FORALL-CON",
            Rule::IdRef => "ID-REF",
            Rule::IdSub => "ID-SUB",
            Rule::D => "D",
            Rule::TBox => "T-BOX",
            Rule::TDia => "T-DIA",
            Rule::FourBox => "4-BOX",
            Rule::FourDia => "4-DIA",
            Rule::Ni => "NI",
            Rule::Nd => "ND",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        use Rule::*;
        Some(match name {
            "INT" => Int,
            "KB-a" => KBa,
            "KB-b" => KBb,
            "KD-a" => KDa,
            "KD-b" => KDb,
            "FS1" => Fs1,
            "FS2" => Fs2,
            "UNIV" => Univ,
            "EXIST" => Exist,
            "FORALL-ANT" => ForallAnt,
            "FORALL-CON" => ForallCon,
            "ID-REF" => IdRef,
            "ID-SUB" => IdSub,
            "D" => D,
            "T-BOX" => TBox,
            "T-DIA" => TDia,
            "4-BOX" => FourBox,
            "4-DIA" => FourDia,
            "NI" => Ni,
            "ND" => Nd,
            _ => return None,
        })
    }
}

/// How a proof line is justified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Axiom(Rule),
    /// Modus ponens from an implication line and its antecedent line.
    Mp(usize, usize),
    /// Generalization: abstract `constant` to `variable` in the premise.
    Gen {
        premise: usize,
        constant: String,
        variable: String,
    },
    RegBox(usize),
    RegDia(usize),
    /// Certificate-free intuitionistic step: the skeleton of
    /// `conj(premises) -> formula` must be an IPC theorem.
    Ipc(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub id: usize,
    pub formula: Formula,
    pub justification: Justification,
}

/// A checkable derivation. A proof under assumptions `gamma` is a
/// theorem-proof of `conj(gamma) -> conclusion`; with no assumptions the
/// final line is the conclusion itself (a `true -> conclusion` form is
/// also accepted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub logic: LogicId,
    pub assumptions: Vec<Formula>,
    pub lines: Vec<ProofLine>,
    pub conclusion: Formula,
}

impl Proof {
    /// The formula the final line must carry.
    pub fn required_final(&self) -> Formula {
        gamma_imp(&self.assumptions, &self.conclusion)
    }
}

/// `conj(gamma) -> phi`, or `phi` itself when `gamma` is empty.
pub fn gamma_imp(gamma: &[Formula], phi: &Formula) -> Formula {
    if gamma.is_empty() {
        phi.clone()
    } else {
        Formula::imp(Formula::conj(gamma.to_vec()), phi.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error("sentence expected, got open formula {0}")]
    OpenFormula(String),
    #[error("asserted and denied overlap on {0}")]
    Overlap(String),
    #[error("formula not well-formed over the signature: {0}")]
    NotWellFormed(String),
}

/// A finitely presented approximation of a theory: finitely many known
/// members and finitely many known non-members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoryApprox {
    signature: Signature,
    asserted: BTreeSet<Formula>,
    denied: BTreeSet<Formula>,
}

impl TheoryApprox {
    pub fn new(
        signature: Signature,
        asserted: impl IntoIterator<Item = Formula>,
        denied: impl IntoIterator<Item = Formula>,
    ) -> Result<TheoryApprox, TheoryError> {
        let asserted: BTreeSet<Formula> = asserted.into_iter().collect();
        let denied: BTreeSet<Formula> = denied.into_iter().collect();
        for f in asserted.iter().chain(denied.iter()) {
            if !f.is_sentence() {
                return Err(TheoryError::OpenFormula(f.to_string()));
            }
            signature
                .well_formed(f)
                .map_err(|e| TheoryError::NotWellFormed(e.to_string()))?;
        }
        if let Some(f) = asserted.intersection(&denied).next() {
            return Err(TheoryError::Overlap(f.to_string()));
        }
        Ok(TheoryApprox {
            signature,
            asserted,
            denied,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn asserted(&self) -> &BTreeSet<Formula> {
        &self.asserted
    }

    pub fn denied(&self) -> &BTreeSet<Formula> {
        &self.denied
    }

    /// `{ phi : box phi asserted }`.
    pub fn box_projection(&self) -> BTreeSet<Formula> {
        self.asserted
            .iter()
            .filter_map(|f| match f {
                Formula::Box(inner) => Some((**inner).clone()),
                _ => None,
            })
            .collect()
    }

    /// `{ delta : dia delta denied }`.
    pub fn diamond_complement(&self) -> BTreeSet<Formula> {
        self.denied
            .iter()
            .filter_map(|f| match f {
                Formula::Dia(inner) => Some((**inner).clone()),
                _ => None,
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::Term;
    use std::collections::BTreeMap;

    fn sig() -> Signature {
        Signature::new(
            vec!["c".into()],
            [("P".to_string(), 1), ("Q".to_string(), 1)]
                .into_iter()
                .collect::<BTreeMap<_, _>>(),
        )
        .unwrap()
    }

    #[test]
    fn logic_tokens_round_trip() {
        for base in BaseLogic::ALL {
            for (ni, nd) in [(false, false), (true, false), (false, true), (true, true)] {
                let l = LogicId { base, ni, nd };
                assert_eq!(LogicId::parse_token(&l.token()).unwrap(), l);
            }
        }
        assert!(LogicId::parse_token("fs+nd+ni").is_err());
        assert!(LogicId::parse_token("k4").is_err());
    }

    #[test]
    fn axiom_sets_grow_with_extensions() {
        let fs = LogicId::new(BaseLogic::Fs).axioms();
        assert!(!fs.contains(&Rule::D));
        let d4 = LogicId::new(BaseLogic::FsD4).axioms();
        assert!(d4.contains(&Rule::D) && d4.contains(&Rule::FourBox));
        let s4 = LogicId::new(BaseLogic::FsS4).axioms();
        assert!(s4.contains(&Rule::TBox) && s4.contains(&Rule::FourDia) && !s4.contains(&Rule::D));
    }

    #[test]
    fn projections() {
        let p = Formula::pred("P", vec![Term::con("c")]);
        let q = Formula::pred("Q", vec![Term::con("c")]);
        let t = TheoryApprox::new(
            sig(),
            [Formula::boxed(p.clone()), q.clone()],
            [Formula::dia(q.clone())],
        )
        .unwrap();
        assert_eq!(t.box_projection(), [p].into_iter().collect());
        assert_eq!(t.diamond_complement(), [q].into_iter().collect());
    }

    #[test]
    fn overlap_rejected() {
        let p = Formula::pred("P", vec![Term::con("c")]);
        assert!(TheoryApprox::new(sig(), [p.clone()], [p]).is_err());
    }
}
