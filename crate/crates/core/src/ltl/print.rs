use std::fmt;

use super::Formula;
use Formula::*;

fn prec(f: &Formula) -> u8 {
    match f {
        Implies(..) => 1,
        Or(..) => 2,
        And(..) => 3,
        Until(..) | Release(..) => 4,
        Not(_) | Next(_) | Finally(_) | Globally(_) => 5,
        True | False | Atom(_) => 6,
    }
}

fn write_at(f: &Formula, min: u8, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    if prec(f) < min {
        write!(out, "(")?;
        write_at(f, 0, out)?;
        return write!(out, ")");
    }
    let bin = |out: &mut fmt::Formatter<'_>, a, op, b, l, r| {
        write_at(a, l, out)?;
        write!(out, " {op} ")?;
        write_at(b, r, out)
    };
    match f {
        True => write!(out, "true"),
        False => write!(out, "false"),
        Atom(p) => write!(out, "{p}"),
        Not(a) => {
            write!(out, "!")?;
            write_at(a, 5, out)
        }
        Next(a) | Finally(a) | Globally(a) => {
            let op = match f {
                Next(_) => "X",
                Finally(_) => "F",
                _ => "G",
            };
            write!(out, "{op} ")?;
            write_at(a, 5, out)
        }
        Implies(a, b) => bin(out, a, "->", b, 2, 1),
        Or(a, b) => bin(out, a, "|", b, 2, 3),
        And(a, b) => bin(out, a, "&", b, 3, 4),
        Until(a, b) => bin(out, a, "U", b, 5, 4),
        Release(a, b) => bin(out, a, "R", b, 5, 4),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(self, 0, f)
    }
}
