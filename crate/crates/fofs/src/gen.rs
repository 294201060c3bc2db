//! Seeded random formula generation, used by the fuzz harnesses and the
//! persistence checker. Deterministic for a fixed RNG stream.

use rand::Rng;

use crate::syntax::{Formula, Signature, Term};

const VAR_POOL: [&str; 6] = ["x", "y", "z", "u", "v", "w"];

/// A random formula whose free variables are drawn from `free`; bound
/// variables come from a fixed pool. With `free` empty the result is a
/// sentence.
pub fn random_formula(
    sig: &Signature,
    free: &[String],
    depth: usize,
    rng: &mut impl Rng,
) -> Formula {
    let mut scope: Vec<String> = free.to_vec();
    go(sig, &mut scope, depth, rng)
}

pub fn random_sentence(sig: &Signature, depth: usize, rng: &mut impl Rng) -> Formula {
    random_formula(sig, &[], depth, rng)
}

/// A formula with exactly one free variable `var`.
pub fn random_one_place(
    sig: &Signature,
    var: &str,
    depth: usize,
    rng: &mut impl Rng,
) -> Formula {
    for _ in 0..32 {
        let f = random_formula(sig, &[var.to_string()], depth, rng);
        let fv = f.free_vars();
        if fv.len() == 1 && fv.contains(var) {
            return f;
        }
    }
    // fall back to a guaranteed one-place atom
    let (p, arity) = sig
        .predicates()
        .iter()
        .next()
        .map(|(p, a)| (p.clone(), *a))
        .expect("signature has a predicate");
    let mut args = vec![Term::var(var)];
    while args.len() < arity {
        args.push(random_term(sig, &[var.to_string()], rng));
    }
    Formula::Pred(p, args)
}

/// A random modal-free formula (for substitution-axiom instances).
pub fn random_modal_free(
    sig: &Signature,
    free: &[String],
    depth: usize,
    rng: &mut impl Rng,
) -> Formula {
    loop {
        let f = random_formula(sig, free, depth, rng);
        if f.is_modal_free() {
            return f;
        }
    }
}

fn random_term(sig: &Signature, scope: &[String], rng: &mut impl Rng) -> Term {
    let n_consts = sig.constants().len();
    let n_vars = scope.len();
    let total = n_consts + n_vars;
    assert!(total > 0, "no terms available");
    let k = rng.gen_range(0..total);
    if k < n_consts {
        Term::con(sig.constants()[k].clone())
    } else {
        Term::var(scope[k - n_consts].clone())
    }
}

fn atom(sig: &Signature, scope: &[String], rng: &mut impl Rng) -> Formula {
    let preds: Vec<(&String, &usize)> = sig.predicates().iter().collect();
    let with_eq = !sig.constants().is_empty() || !scope.is_empty();
    let choice = rng.gen_range(0..if with_eq { 10 } else { 8 });
    if choice == 9 {
        return Formula::eq(random_term(sig, scope, rng), random_term(sig, scope, rng));
    }
    if choice == 8 || preds.is_empty() {
        if preds.is_empty() {
            return Formula::eq(random_term(sig, scope, rng), random_term(sig, scope, rng));
        }
        return Formula::False;
    }
    let (p, arity) = preds[rng.gen_range(0..preds.len())];
    let args = (0..*arity).map(|_| random_term(sig, scope, rng)).collect();
    Formula::Pred(p.clone(), args)
}

fn go(sig: &Signature, scope: &mut Vec<String>, depth: usize, rng: &mut impl Rng) -> Formula {
    if depth == 0 {
        return atom(sig, scope, rng);
    }
    match rng.gen_range(0..10) {
        0 => atom(sig, scope, rng),
        1 | 2 => Formula::and(
            go(sig, scope, depth - 1, rng),
            go(sig, scope, depth - 1, rng),
        ),
        3 => Formula::or(
            go(sig, scope, depth - 1, rng),
            go(sig, scope, depth - 1, rng),
        ),
        4 | 5 => Formula::imp(
            go(sig, scope, depth - 1, rng),
            go(sig, scope, depth - 1, rng),
        ),
        6 => Formula::boxed(go(sig, scope, depth - 1, rng)),
        7 => Formula::dia(go(sig, scope, depth - 1, rng)),
        q => {
            let candidates: Vec<&str> = VAR_POOL
                .iter()
                .copied()
                .filter(|v| !scope.iter().any(|s| s == v) && !sig.has_constant(v))
                .collect();
            if candidates.is_empty() {
                return atom(sig, scope, rng);
            }
            let x = candidates[rng.gen_range(0..candidates.len())].to_string();
            scope.push(x.clone());
            let body = go(sig, scope, depth - 1, rng);
            scope.pop();
            if q == 8 {
                Formula::forall(x, body)
            } else {
                Formula::exists(x, body)
            }
        }
    }
}
