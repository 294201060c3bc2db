//! Terms, formulas, signatures, and binding-aware substitution.
//!
//! The formula AST has exactly ten constructors; `~`, `<->`, and `true`
//! are surface sugar that the parser expands (`~p` is `p -> false`,
//! `true` is `false -> false`). Structural equality is syntactic
//! identity after that expansion.

mod parse;
mod print;

pub use parse::{parse_formula, parse_formula_inferred, ParsedWithSig};
pub use print::print_formula;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("lexical error at {pos}: {msg}")]
    Lex { pos: usize, msg: String },
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("arity mismatch for {pred}: declared {expected}, applied to {got}")]
    ArityMismatch {
        pred: String,
        expected: usize,
        got: usize,
    },
    #[error("unbound name {name} at {pos}")]
    Unbound { name: String, pos: usize },
    #[error("invalid name {name}: {msg}")]
    InvalidName { name: String, msg: String },
    #[error("duplicate name {name}")]
    DuplicateName { name: String },
    #[error("arity of {pred} must be at least 1")]
    ZeroArity { pred: String },
    #[error("variable {var} would capture an occurrence of {name}")]
    Capture { var: String, name: String },
    #[error("formula is not one-place: free variables {vars:?}")]
    NotOnePlace { vars: Vec<String> },
    #[error("reserved name {name}: '@'-prefixed constants are generated")]
    ReservedName { name: String },
}

/// A term is a variable or a constant; which one is fixed at parse time
/// by the binder context.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Con(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn con(name: impl Into<String>) -> Term {
        Term::Con(name.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Pred(String, Vec<Term>),
    Eq(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
    Dia(Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
    False,
}

impl Formula {
    pub fn pred(name: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Pred(name.into(), args)
    }

    pub fn eq(s: Term, t: Term) -> Formula {
        Formula::Eq(s, t)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn neg(a: Formula) -> Formula {
        Formula::imp(a, Formula::False)
    }

    pub fn top() -> Formula {
        Formula::imp(Formula::False, Formula::False)
    }

    pub fn boxed(a: Formula) -> Formula {
        Formula::Box(Box::new(a))
    }

    pub fn dia(a: Formula) -> Formula {
        Formula::Dia(Box::new(a))
    }

    pub fn forall(x: impl Into<String>, a: Formula) -> Formula {
        Formula::Forall(x.into(), Box::new(a))
    }

    pub fn exists(x: impl Into<String>, a: Formula) -> Formula {
        Formula::Exists(x.into(), Box::new(a))
    }

    /// Left-associated conjunction of a nonempty list.
    pub fn conj(mut parts: Vec<Formula>) -> Formula {
        assert!(!parts.is_empty(), "conj of empty list");
        let first = parts.remove(0);
        parts.into_iter().fold(first, Formula::and)
    }

    /// Left-associated disjunction of a nonempty list.
    pub fn disj(mut parts: Vec<Formula>) -> Formula {
        assert!(!parts.is_empty(), "disj of empty list");
        let first = parts.remove(0);
        parts.into_iter().fold(first, Formula::or)
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut acc = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut acc);
        acc
    }

    fn collect_free(&self, bound: &mut Vec<String>, acc: &mut BTreeSet<String>) {
        match self {
            Formula::Pred(_, args) => {
                for t in args {
                    if let Term::Var(v) = t {
                        if !bound.iter().any(|b| b == v) {
                            acc.insert(v.clone());
                        }
                    }
                }
            }
            Formula::Eq(s, t) => {
                for t in [s, t] {
                    if let Term::Var(v) = t {
                        if !bound.iter().any(|b| b == v) {
                            acc.insert(v.clone());
                        }
                    }
                }
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_free(bound, acc);
                b.collect_free(bound, acc);
            }
            Formula::Box(a) | Formula::Dia(a) => a.collect_free(bound, acc),
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                bound.push(x.clone());
                a.collect_free(bound, acc);
                bound.pop();
            }
            Formula::False => {}
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Constants occurring anywhere in the formula.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut acc = BTreeSet::new();
        self.walk_terms(&mut |t| {
            if let Term::Con(c) = t {
                acc.insert(c.clone());
            }
        });
        acc
    }

    /// Predicate names with the arity they are applied at.
    pub fn predicates(&self) -> BTreeMap<String, usize> {
        let mut acc = BTreeMap::new();
        self.walk(&mut |f| {
            if let Formula::Pred(p, args) = f {
                acc.entry(p.clone()).or_insert(args.len());
            }
        });
        acc
    }

    pub fn is_modal_free(&self) -> bool {
        let mut free = true;
        self.walk(&mut |f| {
            if matches!(f, Formula::Box(_) | Formula::Dia(_)) {
                free = false;
            }
        });
        free
    }

    pub fn is_quantifier_free(&self) -> bool {
        let mut free = true;
        self.walk(&mut |f| {
            if matches!(f, Formula::Forall(_, _) | Formula::Exists(_, _)) {
                free = false;
            }
        });
        free
    }

    fn walk(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Formula::Box(a) | Formula::Dia(a) | Formula::Forall(_, a) | Formula::Exists(_, a) => {
                a.walk(f)
            }
            _ => {}
        }
    }

    fn walk_terms(&self, f: &mut impl FnMut(&Term)) {
        self.walk(&mut |fm| match fm {
            Formula::Pred(_, args) => args.iter().for_each(&mut *f),
            Formula::Eq(s, t) => {
                f(s);
                f(t);
            }
            _ => {}
        });
    }

    /// All distinct subformulas, including the formula itself.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut acc = BTreeSet::new();
        self.walk(&mut |f| {
            acc.insert(f.clone());
        });
        acc
    }

    /// Connective count, used for length-then-lexicographic ordering.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }
}

/// Replaces every free occurrence of `var` by `t`. Capture of a variable
/// `t` under a binder of the same name is an error, never a silent rename.
pub fn subst_var(f: &Formula, var: &str, t: &Term) -> Result<Formula, SyntaxError> {
    let sub_term = |u: &Term| -> Term {
        match u {
            Term::Var(v) if v == var => t.clone(),
            other => other.clone(),
        }
    };
    Ok(match f {
        Formula::Pred(p, args) => Formula::Pred(p.clone(), args.iter().map(sub_term).collect()),
        Formula::Eq(s, u) => Formula::Eq(sub_term(s), sub_term(u)),
        Formula::And(a, b) => Formula::and(subst_var(a, var, t)?, subst_var(b, var, t)?),
        Formula::Or(a, b) => Formula::or(subst_var(a, var, t)?, subst_var(b, var, t)?),
        Formula::Imp(a, b) => Formula::imp(subst_var(a, var, t)?, subst_var(b, var, t)?),
        Formula::Box(a) => Formula::boxed(subst_var(a, var, t)?),
        Formula::Dia(a) => Formula::dia(subst_var(a, var, t)?),
        Formula::Forall(y, a) => {
            if y == var {
                f.clone()
            } else {
                if let Term::Var(tv) = t {
                    if tv == y && a.free_vars().contains(var) {
                        return Err(SyntaxError::Capture {
                            var: tv.clone(),
                            name: var.to_string(),
                        });
                    }
                }
                Formula::forall(y.clone(), subst_var(a, var, t)?)
            }
        }
        Formula::Exists(y, a) => {
            if y == var {
                f.clone()
            } else {
                if let Term::Var(tv) = t {
                    if tv == y && a.free_vars().contains(var) {
                        return Err(SyntaxError::Capture {
                            var: tv.clone(),
                            name: var.to_string(),
                        });
                    }
                }
                Formula::exists(y.clone(), subst_var(a, var, t)?)
            }
        }
        Formula::False => Formula::False,
    })
}

/// Replaces each occurrence of the constant `c` by the variable `x`.
/// Errors when an occurrence of `c` lies under a binder of `x`.
pub fn abstract_constant(f: &Formula, c: &str, x: &str) -> Result<Formula, SyntaxError> {
    fn go(f: &Formula, c: &str, x: &str, under_x: bool) -> Result<Formula, SyntaxError> {
        let sub_term = |u: &Term| -> Result<Term, SyntaxError> {
            match u {
                Term::Con(k) if k == c => {
                    if under_x {
                        Err(SyntaxError::Capture {
                            var: x.to_string(),
                            name: c.to_string(),
                        })
                    } else {
                        Ok(Term::Var(x.to_string()))
                    }
                }
                other => Ok(other.clone()),
            }
        };
        Ok(match f {
            Formula::Pred(p, args) => Formula::Pred(
                p.clone(),
                args.iter().map(sub_term).collect::<Result<_, _>>()?,
            ),
            Formula::Eq(s, u) => Formula::Eq(sub_term(s)?, sub_term(u)?),
            Formula::And(a, b) => Formula::and(go(a, c, x, under_x)?, go(b, c, x, under_x)?),
            Formula::Or(a, b) => Formula::or(go(a, c, x, under_x)?, go(b, c, x, under_x)?),
            Formula::Imp(a, b) => Formula::imp(go(a, c, x, under_x)?, go(b, c, x, under_x)?),
            Formula::Box(a) => Formula::boxed(go(a, c, x, under_x)?),
            Formula::Dia(a) => Formula::dia(go(a, c, x, under_x)?),
            Formula::Forall(y, a) => {
                Formula::forall(y.clone(), go(a, c, x, under_x || y == x)?)
            }
            Formula::Exists(y, a) => {
                Formula::exists(y.clone(), go(a, c, x, under_x || y == x)?)
            }
            Formula::False => Formula::False,
        })
    }
    go(f, c, x, false)
}

/// Sequential abstraction of distinct constants by distinct variables,
/// leftmost pair applied first.
pub fn abstract_constants(f: &Formula, pairs: &[(String, String)]) -> Result<Formula, SyntaxError> {
    let mut cur = f.clone();
    for (c, x) in pairs {
        cur = abstract_constant(&cur, c, x)?;
    }
    Ok(cur)
}

/// Instantiates a one-place formula at a term: all free occurrences of
/// the unique free variable are replaced by `t`.
pub fn instantiate(f: &Formula, t: &Term) -> Result<Formula, SyntaxError> {
    let fv = f.free_vars();
    if fv.len() != 1 {
        return Err(SyntaxError::NotOnePlace {
            vars: fv.into_iter().collect(),
        });
    }
    let x = fv.into_iter().next().unwrap();
    subst_var(f, &x, t)
}

const KEYWORDS: [&str; 6] = ["forall", "exists", "box", "dia", "true", "false"];

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

pub(crate) fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !is_keyword(s)
}

fn valid_constant_name(s: &str) -> bool {
    if let Some(rest) = s.strip_prefix('@') {
        // generated constants: '@' followed by ident characters
        !rest.is_empty() && rest.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
    } else {
        valid_ident(s)
    }
}

/// A finite signature: ordered constants plus predicate arities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    constants: Vec<String>,
    predicates: BTreeMap<String, usize>,
}

impl Signature {
    /// User-facing constructor; rejects '@'-prefixed constants.
    pub fn new(
        constants: Vec<String>,
        predicates: BTreeMap<String, usize>,
    ) -> Result<Signature, SyntaxError> {
        for c in &constants {
            if c.starts_with('@') {
                return Err(SyntaxError::ReservedName { name: c.clone() });
            }
        }
        Signature::with_generated(constants, predicates)
    }

    /// Constructor that admits generated ('@'-prefixed) constants; used
    /// by the grid machinery and by file loaders that echo them.
    pub fn with_generated(
        constants: Vec<String>,
        predicates: BTreeMap<String, usize>,
    ) -> Result<Signature, SyntaxError> {
        let mut seen = BTreeSet::new();
        for c in &constants {
            if !valid_constant_name(c) {
                return Err(SyntaxError::InvalidName {
                    name: c.clone(),
                    msg: "not a valid constant name".into(),
                });
            }
            if !seen.insert(c.clone()) {
                return Err(SyntaxError::DuplicateName { name: c.clone() });
            }
        }
        for (p, a) in &predicates {
            if !valid_ident(p) {
                return Err(SyntaxError::InvalidName {
                    name: p.clone(),
                    msg: "not a valid predicate name".into(),
                });
            }
            if *a == 0 {
                return Err(SyntaxError::ZeroArity { pred: p.clone() });
            }
            if seen.contains(p) {
                return Err(SyntaxError::DuplicateName { name: p.clone() });
            }
        }
        Ok(Signature {
            constants,
            predicates,
        })
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn predicates(&self) -> &BTreeMap<String, usize> {
        &self.predicates
    }

    pub fn has_constant(&self, name: &str) -> bool {
        self.constants.iter().any(|c| c == name)
    }

    pub fn arity(&self, pred: &str) -> Option<usize> {
        self.predicates.get(pred).copied()
    }

    /// Checks arity and name resolution of a formula against this
    /// signature (free variables are permitted).
    pub fn well_formed(&self, f: &Formula) -> Result<(), SyntaxError> {
        let mut err = None;
        let mut bound: Vec<String> = Vec::new();
        fn go(
            sig: &Signature,
            f: &Formula,
            bound: &mut Vec<String>,
            err: &mut Option<SyntaxError>,
        ) {
            if err.is_some() {
                return;
            }
            let check_term = |t: &Term, bound: &Vec<String>, err: &mut Option<SyntaxError>| {
                if let Term::Con(c) = t {
                    if !sig.has_constant(c) {
                        *err = Some(SyntaxError::Unbound {
                            name: c.clone(),
                            pos: 0,
                        });
                    }
                }
                if let Term::Var(v) = t {
                    if !bound.iter().any(|b| b == v) {
                        // free variable: allowed, caller decides
                    }
                }
            };
            match f {
                Formula::Pred(p, args) => match sig.arity(p) {
                    None => {
                        *err = Some(SyntaxError::Unbound {
                            name: p.clone(),
                            pos: 0,
                        })
                    }
                    Some(a) if a != args.len() => {
                        *err = Some(SyntaxError::ArityMismatch {
                            pred: p.clone(),
                            expected: a,
                            got: args.len(),
                        })
                    }
                    _ => args.iter().for_each(|t| check_term(t, bound, err)),
                },
                Formula::Eq(s, t) => {
                    check_term(s, bound, err);
                    check_term(t, bound, err);
                }
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                    go(sig, a, bound, err);
                    go(sig, b, bound, err);
                }
                Formula::Box(a) | Formula::Dia(a) => go(sig, a, bound, err),
                Formula::Forall(x, a) | Formula::Exists(x, a) => {
                    bound.push(x.clone());
                    go(sig, a, bound, err);
                    bound.pop();
                }
                Formula::False => {}
            }
        }
        go(self, f, &mut bound, &mut err);
        match err {
            Some(e) => Err(e),
            None => Ok(()),
        }
    }

    /// Extends with additional constants, rejecting collisions.
    pub fn extend_constants(&self, extra: &[String]) -> Result<Signature, SyntaxError> {
        let mut constants = self.constants.clone();
        for c in extra {
            if self.has_constant(c) {
                return Err(SyntaxError::DuplicateName { name: c.clone() });
            }
            constants.push(c.clone());
        }
        Signature::with_generated(constants, self.predicates.clone())
    }
}

/// The grid of expanded signatures: fresh constant pools indexed by grid
/// position, materialized to a fixed per-pool depth. Pool members are
/// named `@{i}_{j}_{k}` and the distinguished extra constant of cell
/// (i, j) is `@{i}_{j}_plus`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSignature {
    base: Signature,
    depth: usize,
}

impl GridSignature {
    pub fn new(base: Signature, depth: usize) -> Result<GridSignature, SyntaxError> {
        if depth == 0 {
            return Err(SyntaxError::InvalidName {
                name: "depth".into(),
                msg: "pool materialization depth must be at least 1".into(),
            });
        }
        for c in base.constants() {
            if c.starts_with('@') {
                return Err(SyntaxError::ReservedName { name: c.clone() });
            }
        }
        Ok(GridSignature { base, depth })
    }

    pub fn base(&self) -> &Signature {
        &self.base
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn pool_constant(i: usize, j: usize, k: usize) -> String {
        format!("@{i}_{j}_{k}")
    }

    pub fn plus_constant(i: usize, j: usize) -> String {
        format!("@{i}_{j}_plus")
    }

    /// The materialized prefix of the pool at cell (i, j).
    pub fn pool(&self, i: usize, j: usize) -> Vec<String> {
        (0..self.depth)
            .map(|k| Self::pool_constant(i, j, k))
            .collect()
    }

    /// The signature whose constants are the base constants together
    /// with all pools at cells (i, j) for i < l and j < m.
    pub fn signature_at(&self, l: usize, m: usize) -> Signature {
        let mut constants = self.base.constants().to_vec();
        for i in 0..l {
            for j in 0..m {
                constants.extend(self.pool(i, j));
            }
        }
        Signature::with_generated(constants, self.base.predicates().clone())
            .expect("generated names are collision-free by construction")
    }

    /// `signature_at(l, m)` extended with the distinguished constant of
    /// cell (l, m).
    pub fn signature_at_plus(&self, l: usize, m: usize) -> Signature {
        let sig = self.signature_at(l, m);
        sig.extend_constants(&[Self::plus_constant(l, m)])
            .expect("plus constant is fresh by construction")
    }
}

/// Materializes the (l, m) expanded signature over `base` with the given
/// per-pool depth. `grid_signature(base, 0, 0, d)` equals `base`.
pub fn grid_signature(
    base: &Signature,
    l: usize,
    m: usize,
    depth: usize,
) -> Result<Signature, SyntaxError> {
    Ok(GridSignature::new(base.clone(), depth)?.signature_at(l, m))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new(
            vec!["c".into(), "d".into()],
            [("P".to_string(), 1), ("Q".to_string(), 1), ("R".to_string(), 2)]
                .into_iter()
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn free_vars_examples() {
        let f = Formula::forall("x", Formula::pred("P", vec![Term::var("x")]));
        assert!(f.free_vars().is_empty());
        let g = Formula::imp(
            Formula::pred("P", vec![Term::var("x")]),
            Formula::exists("x", Formula::pred("Q", vec![Term::var("x")])),
        );
        assert_eq!(
            g.free_vars().into_iter().collect::<Vec<_>>(),
            vec!["x".to_string()]
        );
        let h = Formula::eq(Term::con("c"), Term::con("c"));
        assert!(h.free_vars().is_empty());
    }

    #[test]
    fn abstract_constant_examples() {
        let f = Formula::pred("P", vec![Term::con("c")]);
        assert_eq!(
            abstract_constant(&f, "c", "x").unwrap(),
            Formula::pred("P", vec![Term::var("x")])
        );

        let g = Formula::and(
            Formula::forall("x", Formula::pred("P", vec![Term::var("x")])),
            Formula::pred("Q", vec![Term::con("c")]),
        );
        assert!(abstract_constant(&g, "c", "x").is_ok());
        // an occurrence of c under a binder of x is a capture error
        let h = Formula::forall("x", Formula::pred("R", vec![Term::var("x"), Term::con("c")]));
        assert!(matches!(
            abstract_constant(&h, "c", "x"),
            Err(SyntaxError::Capture { .. })
        ));

        let e = Formula::eq(Term::con("c"), Term::con("c"));
        assert_eq!(
            abstract_constant(&e, "c", "x").unwrap(),
            Formula::eq(Term::var("x"), Term::var("x"))
        );
    }

    #[test]
    fn spec_capture_example_rejected() {
        // (forall x P(x)) & Q(c) with c -> x: the Q(c) occurrence is not
        // under the binder, so this succeeds; put c under the binder and
        // it must fail.
        let ok = Formula::and(
            Formula::forall("x", Formula::pred("P", vec![Term::var("x")])),
            Formula::pred("Q", vec![Term::con("c")]),
        );
        assert!(abstract_constant(&ok, "c", "x").is_ok());
        let bad = Formula::and(
            Formula::forall("x", Formula::pred("P", vec![Term::con("c")])),
            Formula::pred("Q", vec![Term::con("c")]),
        );
        assert!(abstract_constant(&bad, "c", "x").is_err());
    }

    #[test]
    fn instantiate_examples() {
        let f = Formula::and(
            Formula::pred("P", vec![Term::var("x")]),
            Formula::pred("Q", vec![Term::var("x")]),
        );
        assert_eq!(
            instantiate(&f, &Term::con("c")).unwrap(),
            Formula::and(
                Formula::pred("P", vec![Term::con("c")]),
                Formula::pred("Q", vec![Term::con("c")]),
            )
        );

        let g = Formula::eq(Term::var("x"), Term::var("x"));
        assert_eq!(
            instantiate(&g, &Term::con("c")).unwrap(),
            Formula::eq(Term::con("c"), Term::con("c"))
        );

        let two = Formula::and(
            Formula::pred("P", vec![Term::var("x")]),
            Formula::pred("Q", vec![Term::var("y")]),
        );
        assert!(matches!(
            instantiate(&two, &Term::con("c")),
            Err(SyntaxError::NotOnePlace { .. })
        ));
    }

    #[test]
    fn substitution_composes_order_independent() {
        let f = Formula::and(
            Formula::pred("P", vec![Term::con("c")]),
            Formula::pred("Q", vec![Term::con("d")]),
        );
        let a = abstract_constant(&abstract_constant(&f, "c", "x").unwrap(), "d", "y").unwrap();
        let b = abstract_constant(&abstract_constant(&f, "d", "y").unwrap(), "c", "x").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn signature_validation() {
        assert!(Signature::new(vec!["c".into()], [("P".into(), 0)].into_iter().collect()).is_err());
        assert!(Signature::new(vec!["@0_0_0".into()], BTreeMap::new()).is_err());
        assert!(Signature::new(
            vec!["c".into()],
            [("c".to_string(), 1)].into_iter().collect()
        )
        .is_err());
        assert!(Signature::new(vec!["c".into(), "c".into()], BTreeMap::new()).is_err());
    }

    #[test]
    fn grid_signature_identity_at_origin() {
        let base = sig();
        assert_eq!(grid_signature(&base, 0, 0, 2).unwrap(), base);
    }

    #[test]
    fn grid_signature_disjoint_pools() {
        let base = sig();
        let s11 = grid_signature(&base, 1, 1, 3).unwrap();
        let fresh: Vec<_> = s11
            .constants()
            .iter()
            .filter(|c| !base.has_constant(c))
            .collect();
        assert_eq!(fresh.len(), 3);
        assert!(fresh.iter().all(|c| c.starts_with('@')));
    }

    // Grid facts, checked by direct set arithmetic on materialized pools.
    #[test]
    fn grid_intersection_and_difference_facts() {
        let base = sig();
        let g = GridSignature::new(base, 2).unwrap();
        let consts =
            |l: usize, m: usize| -> BTreeSet<String> {
                g.signature_at(l, m).constants().iter().cloned().collect()
            };
        for l in 0..=4usize {
            for m in 0..=4usize {
                let inter: BTreeSet<_> = consts(l + 1, m)
                    .intersection(&consts(l, m + 1))
                    .cloned()
                    .collect();
                assert_eq!(inter, consts(l, m), "intersection fact at ({l},{m})");
                let union: BTreeSet<_> = consts(l, m + 1)
                    .union(&consts(l + 1, m))
                    .cloned()
                    .collect();
                let diff: BTreeSet<_> =
                    consts(l + 1, m + 1).difference(&union).cloned().collect();
                assert!(!diff.is_empty(), "difference fact at ({l},{m})");
            }
        }
    }
}
