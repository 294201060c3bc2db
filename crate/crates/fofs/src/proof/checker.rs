//! The proof checker: schema matching for every axiom of the active
//! logic plus the MP/GEN/REG rules and the certificate-free IPC step.

use std::collections::BTreeMap;

use crate::syntax::{abstract_constant, subst_var, Formula, Term};

use super::{ipc_entails, ipc_valid_skeleton, Justification, Proof, Rule};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected { line: usize, reason: String },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

pub fn check_proof(p: &Proof) -> Verdict {
    let reject = |line: usize, reason: String| Verdict::Rejected { line, reason };

    for a in &p.assumptions {
        if !a.is_sentence() {
            return reject(0, format!("assumption {a} is not a sentence"));
        }
    }
    if !p.conclusion.is_sentence() {
        return reject(0, "conclusion is not a sentence".into());
    }
    if p.lines.is_empty() {
        return reject(0, "proof has no lines".into());
    }

    let mut by_id: BTreeMap<usize, &Formula> = BTreeMap::new();
    let assumption_constants: std::collections::BTreeSet<String> = p
        .assumptions
        .iter()
        .flat_map(|a| a.constants())
        .collect();

    for line in &p.lines {
        if by_id.contains_key(&line.id) {
            return reject(line.id, "duplicate line id".into());
        }
        if !line.formula.is_sentence() {
            return reject(line.id, format!("{} is not a sentence", line.formula));
        }
        let premise = |id: usize| -> Result<&Formula, String> {
            if id >= line.id {
                return Err(format!("premise {id} does not precede line {}", line.id));
            }
            by_id
                .get(&id)
                .copied()
                .ok_or_else(|| format!("premise {id} not found"))
        };

        let ok: Result<(), String> = match &line.justification {
            Justification::Axiom(rule) => {
                if !p.logic.axioms().contains(rule) {
                    Err(format!("axiom {} not available in {}", rule.name(), p.logic))
                } else {
                    match_axiom(*rule, &line.formula, p.logic.ni)
                }
            }
            Justification::Mp(i, j) => (|| {
                let a = premise(*i)?;
                let b = premise(*j)?;
                let fits = |imp: &Formula, ant: &Formula| match imp {
                    Formula::Imp(x, y) => **x == *ant && **y == line.formula,
                    _ => false,
                };
                if fits(a, b) || fits(b, a) {
                    Ok(())
                } else {
                    Err("MP premises do not yield this line".into())
                }
            })(),
            Justification::Gen {
                premise: pid,
                constant,
                variable,
            } => (|| {
                let pf = premise(*pid)?;
                if assumption_constants.contains(constant) {
                    return Err(format!(
                        "GEN constant {constant} occurs in the assumptions"
                    ));
                }
                if !pf.constants().contains(constant) {
                    return Err(format!("GEN constant {constant} does not occur in premise"));
                }
                let body = abstract_constant(pf, constant, variable)
                    .map_err(|e| format!("{variable} is not substitutable: {e}"))?;
                let want = Formula::forall(variable.clone(), body);
                if want == line.formula {
                    Ok(())
                } else {
                    Err(format!("GEN yields {want}, not {}", line.formula))
                }
            })(),
            Justification::RegBox(pid) => (|| {
                let pf = premise(*pid)?;
                match pf {
                    Formula::Imp(a, b) => {
                        let want =
                            Formula::imp(Formula::boxed((**a).clone()), Formula::boxed((**b).clone()));
                        if want == line.formula {
                            Ok(())
                        } else {
                            Err(format!("REG-BOX yields {want}, not {}", line.formula))
                        }
                    }
                    _ => Err("REG-BOX premise must be an implication".into()),
                }
            })(),
            Justification::RegDia(pid) => (|| {
                let pf = premise(*pid)?;
                match pf {
                    Formula::Imp(a, b) => {
                        let want =
                            Formula::imp(Formula::dia((**a).clone()), Formula::dia((**b).clone()));
                        if want == line.formula {
                            Ok(())
                        } else {
                            Err(format!("REG-DIA yields {want}, not {}", line.formula))
                        }
                    }
                    _ => Err("REG-DIA premise must be an implication".into()),
                }
            })(),
            Justification::Ipc(ids) => (|| {
                let mut prems = Vec::with_capacity(ids.len());
                for id in ids {
                    prems.push(premise(*id)?.clone());
                }
                if ipc_entails(&prems, &line.formula) {
                    Ok(())
                } else {
                    Err("IPC step is not an intuitionistic consequence of its premises".into())
                }
            })(),
        };
        if let Err(reason) = ok {
            return reject(line.id, reason);
        }
        by_id.insert(line.id, &line.formula);
    }

    let last = p.lines.last().unwrap();
    let required = p.required_final();
    let also_ok = p.assumptions.is_empty()
        && last.formula == Formula::imp(Formula::top(), p.conclusion.clone());
    if last.formula != required && !also_ok {
        return reject(
            last.id,
            format!("final line is {}, expected {required}", last.formula),
        );
    }
    Verdict::Accepted
}

fn match_axiom(rule: Rule, f: &Formula, ni: bool) -> Result<(), String> {
    let fail = || Err(format!("not an instance of {}", rule.name()));
    match rule {
        Rule::Int => {
            if ipc_valid_skeleton(f) {
                Ok(())
            } else {
                Err("skeleton is not an IPC theorem".into())
            }
        }
        Rule::KBb => {
            if *f == Formula::boxed(Formula::top()) {
                Ok(())
            } else {
                fail()
            }
        }
        Rule::KDb => {
            if *f == Formula::neg(Formula::dia(Formula::False)) {
                Ok(())
            } else {
                fail()
            }
        }
        Rule::KBa => {
            // box (a & b) <-> (box a & box b), expanded biconditional
            if let Formula::And(fwd, bwd) = f {
                if let (Formula::Imp(l1, r1), Formula::Imp(l2, r2)) = (&**fwd, &**bwd) {
                    if l1 == r2 && r1 == l2 {
                        if let Formula::Box(inner) = &**l1 {
                            if let Formula::And(a, b) = &**inner {
                                let want = Formula::and(
                                    Formula::boxed((**a).clone()),
                                    Formula::boxed((**b).clone()),
                                );
                                if **r1 == want {
                                    return Ok(());
                                }
                            }
                        }
                    }
                }
            }
            fail()
        }
        Rule::KDa => {
            // dia (a | b) <-> (dia a | dia b)
            if let Formula::And(fwd, bwd) = f {
                if let (Formula::Imp(l1, r1), Formula::Imp(l2, r2)) = (&**fwd, &**bwd) {
                    if l1 == r2 && r1 == l2 {
                        if let Formula::Dia(inner) = &**l1 {
                            if let Formula::Or(a, b) = &**inner {
                                let want = Formula::or(
                                    Formula::dia((**a).clone()),
                                    Formula::dia((**b).clone()),
                                );
                                if **r1 == want {
                                    return Ok(());
                                }
                            }
                        }
                    }
                }
            }
            fail()
        }
        Rule::Fs1 => {
            // (dia a -> box b) -> box (a -> b)
            if let Formula::Imp(lhs, rhs) = f {
                if let (Formula::Imp(da, bb), Formula::Box(inner)) = (&**lhs, &**rhs) {
                    if let (Formula::Dia(a), Formula::Box(b), Formula::Imp(a2, b2)) =
                        (&**da, &**bb, &**inner)
                    {
                        if a == a2 && b == b2 {
                            return Ok(());
                        }
                    }
                }
            }
            fail()
        }
        Rule::Fs2 => {
            // dia (a -> b) -> (box a -> dia b)
            if let Formula::Imp(lhs, rhs) = f {
                if let (Formula::Dia(inner), Formula::Imp(ba, db)) = (&**lhs, &**rhs) {
                    if let (Formula::Imp(a, b), Formula::Box(a2), Formula::Dia(b2)) =
                        (&**inner, &**ba, &**db)
                    {
                        if a == a2 && b == b2 {
                            return Ok(());
                        }
                    }
                }
            }
            fail()
        }
        Rule::D => {
            if let Formula::Imp(lhs, rhs) = f {
                if let (Formula::Box(a), Formula::Dia(b)) = (&**lhs, &**rhs) {
                    if a == b {
                        return Ok(());
                    }
                }
            }
            fail()
        }
        Rule::TBox => {
            if let Formula::Imp(lhs, rhs) = f {
                if let Formula::Box(a) = &**lhs {
                    if **a == **rhs {
                        return Ok(());
                    }
                }
            }
            fail()
        }
        Rule::TDia => {
            if let Formula::Imp(lhs, rhs) = f {
                if let Formula::Dia(a) = &**rhs {
                    if **a == **lhs {
                        return Ok(());
                    }
                }
            }
            fail()
        }
        Rule::FourBox => {
            if let Formula::Imp(lhs, rhs) = f {
                if let (Formula::Box(a), Formula::Box(bb)) = (&**lhs, &**rhs) {
                    if let Formula::Box(b) = &**bb {
                        if a == b {
                            return Ok(());
                        }
                    }
                }
            }
            fail()
        }
        Rule::FourDia => {
            if let Formula::Imp(lhs, rhs) = f {
                if let (Formula::Dia(dd), Formula::Dia(b)) = (&**lhs, &**rhs) {
                    if let Formula::Dia(a) = &**dd {
                        if a == b {
                            return Ok(());
                        }
                    }
                }
            }
            fail()
        }
        Rule::Univ => {
            // forall x body -> body[x := c]
            if let Formula::Imp(lhs, rhs) = f {
                if let Formula::Forall(x, body) = &**lhs {
                    if one_place_in(body, x) && instantiates_to(body, x, rhs) {
                        return Ok(());
                    }
                }
            }
            fail()
        }
        Rule::Exist => {
            // body[x := c] -> exists x body
            if let Formula::Imp(lhs, rhs) = f {
                if let Formula::Exists(x, body) = &**rhs {
                    if one_place_in(body, x) && instantiates_to(body, x, lhs) {
                        return Ok(());
                    }
                }
            }
            fail()
        }
        Rule::ForallAnt => {
            // forall x (a -> b) -> (exists x a -> b), a one-place, b a sentence
            if let Formula::Imp(lhs, rhs) = f {
                if let (Formula::Forall(x, inner), Formula::Imp(ex, b2)) = (&**lhs, &**rhs) {
                    if let (Formula::Imp(a, b), Formula::Exists(x2, a2)) = (&**inner, &**ex) {
                        if x == x2
                            && a == a2
                            && b == b2
                            && one_place_in(a, x)
                            && b.is_sentence()
                        {
                            return Ok(());
                        }
                    }
                }
            }
            fail()
        }
        Rule::ForallCon => {
            // forall x (a -> b) -> (a -> forall x b), a a sentence, b one-place
            if let Formula::Imp(lhs, rhs) = f {
                if let (Formula::Forall(x, inner), Formula::Imp(a2, fa)) = (&**lhs, &**rhs) {
                    if let (Formula::Imp(a, b), Formula::Forall(x2, b2)) = (&**inner, &**fa) {
                        if x == x2
                            && a == a2
                            && b == b2
                            && a.is_sentence()
                            && one_place_in(b, x)
                        {
                            return Ok(());
                        }
                    }
                }
            }
            fail()
        }
        Rule::IdRef => {
            if let Formula::Eq(Term::Con(c1), Term::Con(c2)) = f {
                if c1 == c2 {
                    return Ok(());
                }
            }
            fail()
        }
        Rule::IdSub => {
            // c1 = c2 -> (phi(c1) -> phi(c2)); phi modal-free unless NI
            if let Formula::Imp(lhs, rhs) = f {
                if let (Formula::Eq(Term::Con(c1), Term::Con(c2)), Formula::Imp(a, b)) =
                    (&**lhs, &**rhs)
                {
                    if !match_one_place_pair(a, b, c1, c2) {
                        return fail();
                    }
                    if !ni && !a.is_modal_free() {
                        return Err("ID-SUB requires a modal-free formula".into());
                    }
                    return Ok(());
                }
            }
            fail()
        }
        Rule::Ni => {
            // c1 = c2 -> box (c1 = c2)
            if let Formula::Imp(lhs, rhs) = f {
                if let Formula::Box(inner) = &**rhs {
                    if matches!(**lhs, Formula::Eq(Term::Con(_), Term::Con(_)))
                        && **inner == **lhs
                    {
                        return Ok(());
                    }
                }
            }
            fail()
        }
        Rule::Nd => {
            // dia (c1 = c2) -> c1 = c2
            if let Formula::Imp(lhs, rhs) = f {
                if let Formula::Dia(inner) = &**lhs {
                    if matches!(**rhs, Formula::Eq(Term::Con(_), Term::Con(_)))
                        && **inner == **rhs
                    {
                        return Ok(());
                    }
                }
            }
            fail()
        }
    }
}

fn one_place_in(body: &Formula, x: &str) -> bool {
    let fv = body.free_vars();
    fv.len() == 1 && fv.contains(x)
}

/// Does `rhs == body[x := c]` hold for some constant `c`?
fn instantiates_to(body: &Formula, x: &str, rhs: &Formula) -> bool {
    rhs.constants().iter().any(|c| {
        subst_var(body, x, &Term::con(c.clone()))
            .map(|inst| inst == *rhs)
            .unwrap_or(false)
    })
}

/// Is there a one-place formula `phi` with `a == phi(c1)` and
/// `b == phi(c2)`? For distinct constants the positions of the variable
/// are exactly the positions where `a` and `b` differ, and they must
/// differ by `c1` versus `c2`; for equal constants `a` and `b` must
/// coincide and contain the constant.
fn match_one_place_pair(a: &Formula, b: &Formula, c1: &str, c2: &str) -> bool {
    if c1 == c2 {
        return a == b && a.constants().contains(c1);
    }
    let mut any = false;
    fn terms_match(s: &Term, t: &Term, c1: &str, c2: &str, any: &mut bool) -> bool {
        if s == t {
            return true;
        }
        match (s, t) {
            (Term::Con(x), Term::Con(y)) if x == c1 && y == c2 => {
                *any = true;
                true
            }
            _ => false,
        }
    }
    fn go(a: &Formula, b: &Formula, c1: &str, c2: &str, any: &mut bool) -> bool {
        match (a, b) {
            (Formula::Pred(p, xs), Formula::Pred(q, ys)) => {
                p == q
                    && xs.len() == ys.len()
                    && xs
                        .iter()
                        .zip(ys)
                        .all(|(s, t)| terms_match(s, t, c1, c2, any))
            }
            (Formula::Eq(s1, t1), Formula::Eq(s2, t2)) => {
                terms_match(s1, s2, c1, c2, any) && terms_match(t1, t2, c1, c2, any)
            }
            (Formula::And(x1, y1), Formula::And(x2, y2))
            | (Formula::Or(x1, y1), Formula::Or(x2, y2))
            | (Formula::Imp(x1, y1), Formula::Imp(x2, y2)) => {
                go(x1, x2, c1, c2, any) && go(y1, y2, c1, c2, any)
            }
            (Formula::Box(x), Formula::Box(y)) | (Formula::Dia(x), Formula::Dia(y)) => {
                go(x, y, c1, c2, any)
            }
            (Formula::Forall(v1, x), Formula::Forall(v2, y))
            | (Formula::Exists(v1, x), Formula::Exists(v2, y)) => {
                v1 == v2 && go(x, y, c1, c2, any)
            }
            (Formula::False, Formula::False) => true,
            _ => false,
        }
    }
    go(a, b, c1, c2, &mut any) && any
}
