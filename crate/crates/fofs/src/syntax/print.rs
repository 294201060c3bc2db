//! Canonical printer: minimal parentheses per the grammar, with `~` and
//! `true` resugared so that `parse(print(f)) == f`.

use std::fmt;

use super::{Formula, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Con(c) => write!(f, "{c}"),
        }
    }
}

// Grammar levels: 0 formula (quantifiers), 1 imp, 2 disj, 3 conj,
// 4 unary, 5 atom.
fn level(f: &Formula) -> u8 {
    match f {
        Formula::Forall(_, _) | Formula::Exists(_, _) => 0,
        Formula::Imp(a, b) => {
            if **b == Formula::False {
                if **a == Formula::False {
                    5 // "true"
                } else {
                    4 // "~ ..."
                }
            } else {
                1
            }
        }
        Formula::Or(_, _) => 2,
        Formula::And(_, _) => 3,
        Formula::Box(_) | Formula::Dia(_) => 4,
        Formula::Pred(_, _) | Formula::Eq(_, _) | Formula::False => 5,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if level(f) < min {
        write!(out, "(")?;
        write_at(f, 0, out)?;
        return write!(out, ")");
    }
    match f {
        Formula::Forall(x, a) => {
            write!(out, "forall {x}. ")?;
            write_at(a, 0, out)
        }
        Formula::Exists(x, a) => {
            write!(out, "exists {x}. ")?;
            write_at(a, 0, out)
        }
        Formula::Imp(a, b) => {
            if **b == Formula::False {
                if **a == Formula::False {
                    write!(out, "true")
                } else {
                    write!(out, "~")?;
                    write_at(a, 4, out)
                }
            } else {
                write_at(a, 2, out)?;
                write!(out, " -> ")?;
                write_at(b, 1, out)
            }
        }
        Formula::Or(a, b) => {
            write_at(a, 2, out)?;
            write!(out, " | ")?;
            write_at(b, 3, out)
        }
        Formula::And(a, b) => {
            write_at(a, 3, out)?;
            write!(out, " & ")?;
            write_at(b, 4, out)
        }
        Formula::Box(a) => {
            write!(out, "box ")?;
            write_at(a, 4, out)
        }
        Formula::Dia(a) => {
            write!(out, "dia ")?;
            write_at(a, 4, out)
        }
        Formula::Pred(p, args) => {
            write!(out, "{p}(")?;
            for (i, t) in args.iter().enumerate() {
                if i > 0 {
                    write!(out, ",")?;
                }
                write!(out, "{t}")?;
            }
            write!(out, ")")
        }
        Formula::Eq(s, t) => write!(out, "{s} = {t}"),
        Formula::False => write!(out, "false"),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, 0, out)
    }
}

/// The canonical text form; `parse_formula(print_formula(f), sig) == f`.
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}
