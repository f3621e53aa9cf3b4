use std::fmt::Write;

use crate::rational;

use super::{Formula, IndexTerm, NumberTerm};

/// Canonical text of a formula. Binary connectives and atoms are fully
/// parenthesized; quantifiers are parenthesized only when they appear as an
/// operand, since their scope otherwise extends to the right.
pub fn print_formula(phi: &Formula) -> String {
    let mut out = String::new();
    formula(phi, &mut out, false);
    out
}

pub fn print_number_term(t: &NumberTerm) -> String {
    let mut out = String::new();
    number(t, &mut out);
    out
}

pub fn print_index_term(h: &IndexTerm) -> String {
    let mut out = String::new();
    index(h, &mut out);
    out
}

fn index(h: &IndexTerm, out: &mut String) {
    match h {
        IndexTerm::Var(x) => out.push_str(x),
        IndexTerm::SkeletonApp(name, args) | IndexTerm::AuxIndexApp(name, args) => app(name, args, out),
    }
}

fn app(name: &str, args: &[IndexTerm], out: &mut String) {
    out.push_str(name);
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        index(a, out);
    }
    out.push(')');
}

fn number(t: &NumberTerm, out: &mut String) {
    match t {
        NumberTerm::Const(c) => out.push_str(&rational::format(c)),
        NumberTerm::NumApp(name, args) | NumberTerm::AuxNumApp(name, args) => app(name, args, out),
        NumberTerm::Add(a, b) => binary_term(a, " + ", b, out),
        NumberTerm::Mul(a, b) => binary_term(a, " * ", b, out),
        NumberTerm::Sign(a) => {
            out.push_str("sign(");
            number(a, out);
            out.push(')');
        }
        NumberTerm::Sum(v, body) => aggregate("sum", v, body, out),
        NumberTerm::Prod(v, body) => aggregate("prod", v, body, out),
        NumberTerm::Max(v, body) => aggregate("max", v, body, out),
        NumberTerm::Char(phi) => {
            out.push_str("chi[");
            formula(phi, out, false);
            out.push(']');
        }
    }
}

fn binary_term(a: &NumberTerm, op: &str, b: &NumberTerm, out: &mut String) {
    out.push('(');
    number(a, out);
    out.push_str(op);
    number(b, out);
    out.push(')');
}

fn aggregate(kw: &str, v: &str, body: &NumberTerm, out: &mut String) {
    let _ = write!(out, "{kw} {v} (");
    number(body, out);
    out.push(')');
}

fn formula(phi: &Formula, out: &mut String, operand: bool) {
    match phi {
        Formula::IndexEq(a, b) => {
            out.push('(');
            index(a, out);
            out.push_str(" == ");
            index(b, out);
            out.push(')');
        }
        Formula::NumEq(a, b) => {
            out.push('(');
            number(a, out);
            out.push_str(" = ");
            number(b, out);
            out.push(')');
        }
        Formula::NumLt(a, b) => {
            out.push('(');
            number(a, out);
            out.push_str(" < ");
            number(b, out);
            out.push(')');
        }
        Formula::Not(a) => {
            out.push('!');
            formula(a, out, true);
        }
        Formula::And(a, b) => connective(a, " & ", b, out),
        Formula::Or(a, b) => connective(a, " | ", b, out),
        Formula::Implies(a, b) => connective(a, " -> ", b, out),
        Formula::Iff(a, b) => connective(a, " <-> ", b, out),
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let kw = if matches!(phi, Formula::Exists(..)) {
                "exists"
            } else {
                "forall"
            };
            if operand {
                out.push('(');
            }
            let _ = write!(out, "{kw} {v}. ");
            formula(body, out, false);
            if operand {
                out.push(')');
            }
        }
    }
}

fn connective(a: &Formula, op: &str, b: &Formula, out: &mut String) {
    out.push('(');
    formula(a, out, true);
    out.push_str(op);
    formula(b, out, true);
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        let phi = Formula::exists(
            "x",
            Formula::NumEq(NumberTerm::app("f", vec![IndexTerm::var("x")]), NumberTerm::int(1)),
        );
        assert_eq!(print_formula(&phi), "exists x. (f(x) = 1)");
        let c = NumberTerm::Const(rational::parse("3/2").unwrap());
        assert_eq!(print_number_term(&c), "3/2");
        let neg = Formula::not(Formula::NumLt(NumberTerm::int(0), NumberTerm::int(1)));
        assert_eq!(print_formula(&neg), "!(0 < 1)");
    }

    #[test]
    fn quantifier_operands_are_wrapped() {
        let q = Formula::forall("y", Formula::IndexEq(IndexTerm::var("y"), IndexTerm::var("y")));
        let phi = Formula::and(q.clone(), Formula::not(q));
        assert_eq!(
            print_formula(&phi),
            "((forall y. (y == y)) & !(forall y. (y == y)))"
        );
    }
}
