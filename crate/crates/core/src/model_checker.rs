//! Direct semantics of FO_R over an [`RStructure`] with exact arithmetic.
//!
//! Multiplication stops early when its left factor is zero and the Boolean
//! connectives short-circuit. Values are unaffected, but terms of the shape
//! `chi[...] * T` only pay for the branch that is selected.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::logic::{Formula, IndexTerm, NumberTerm};
use crate::rational::{self, Rational};
use crate::structure::{ArbInterpretation, RStructure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is unbound")]
    UnboundVariable(String),
    #[error("no table for `{0}`")]
    MissingTable(String),
    #[error("`{symbol}` applied to {found} argument(s), table has arity {expected}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("`{symbol}` returned {value}, which is not a universe element")]
    IndexOutOfRange { symbol: String, value: String },
}

/// Values of variables, later bindings shadowing earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    bindings: Vec<(String, usize)>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(mut self, var: &str, value: usize) -> Self {
        self.bindings.push((var.to_string(), value));
        self
    }

    pub fn get(&self, var: &str) -> Option<usize> {
        self.bindings.iter().rev().find(|(v, _)| v == var).map(|&(_, x)| x)
    }
}

impl<S: AsRef<str>> FromIterator<(S, usize)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (S, usize)>>(iter: I) -> Self {
        Assignment {
            bindings: iter.into_iter().map(|(s, v)| (s.as_ref().to_string(), v)).collect(),
        }
    }
}

struct Eval<'a> {
    d: &'a RStructure,
    arb: &'a ArbInterpretation,
    env: Vec<(&'a str, usize)>,
}

type EResult<T> = Result<T, EvalError>;

impl<'a> Eval<'a> {
    fn var(&self, x: &str) -> EResult<usize> {
        self.env
            .iter()
            .rev()
            .find(|(v, _)| *v == x)
            .map(|&(_, val)| val)
            .ok_or_else(|| EvalError::UnboundVariable(x.to_string()))
    }

    fn args(&mut self, args: &'a [IndexTerm]) -> EResult<Vec<usize>> {
        args.iter().map(|a| self.index(a)).collect()
    }

    fn index(&mut self, h: &'a IndexTerm) -> EResult<usize> {
        match h {
            IndexTerm::Var(x) => self.var(x),
            IndexTerm::SkeletonApp(name, args) => {
                let vals = self.args(args)?;
                self.d
                    .skeleton_value(name, &vals)
                    .ok_or_else(|| EvalError::MissingTable(name.clone()))
            }
            IndexTerm::AuxIndexApp(name, args) => {
                let v = self.aux(name, args)?;
                rational::to_index(v)
                    .filter(|&i| i < self.d.universe_size())
                    .ok_or_else(|| EvalError::IndexOutOfRange {
                        symbol: name.clone(),
                        value: rational::format(v),
                    })
            }
        }
    }

    fn aux(&mut self, name: &str, args: &'a [IndexTerm]) -> EResult<&'a Rational> {
        let arb = self.arb;
        let table = arb.get(name).ok_or_else(|| EvalError::MissingTable(name.to_string()))?;
        if table.arity != args.len() {
            return Err(EvalError::ArityMismatch {
                symbol: name.to_string(),
                expected: table.arity,
                found: args.len(),
            });
        }
        let u = self.d.universe_size();
        let mut pos = 0usize;
        for a in args {
            pos = pos.saturating_mul(u).saturating_add(self.index(a)?);
        }
        table.get(pos).ok_or_else(|| EvalError::MissingTable(name.to_string()))
    }

    fn bound<T>(&mut self, var: &'a str, value: usize, f: impl FnOnce(&mut Self) -> EResult<T>) -> EResult<T> {
        self.env.push((var, value));
        let r = f(self);
        self.env.pop();
        r
    }

    fn number(&mut self, t: &'a NumberTerm) -> EResult<Rational> {
        let u = self.d.universe_size();
        match t {
            NumberTerm::Const(c) => Ok(c.clone()),
            NumberTerm::NumApp(name, args) => {
                let vals = self.args(args)?;
                self.d
                    .number_value(name, &vals)
                    .cloned()
                    .ok_or_else(|| EvalError::MissingTable(name.clone()))
            }
            NumberTerm::AuxNumApp(name, args) => self.aux(name, args).cloned(),
            NumberTerm::Add(a, b) => Ok(self.number(a)? + self.number(b)?),
            NumberTerm::Mul(a, b) => {
                let left = self.number(a)?;
                if left.is_zero() {
                    return Ok(left);
                }
                Ok(left * self.number(b)?)
            }
            NumberTerm::Sign(a) => Ok(rational::sign(&self.number(a)?)),
            NumberTerm::Sum(v, body) => {
                let mut acc = Rational::zero();
                for x in 0..u {
                    let term = self.bound(v, x, |e| e.number(body))?;
                    if !term.is_zero() {
                        acc += term;
                    }
                }
                Ok(acc)
            }
            NumberTerm::Prod(v, body) => {
                let mut acc = Rational::one();
                for x in 0..u {
                    acc *= self.bound(v, x, |e| e.number(body))?;
                    if acc.is_zero() {
                        break;
                    }
                }
                Ok(acc)
            }
            NumberTerm::Max(v, body) => {
                let mut best = self.bound(v, 0, |e| e.number(body))?;
                for x in 1..u {
                    let val = self.bound(v, x, |e| e.number(body))?;
                    if val > best {
                        best = val;
                    }
                }
                Ok(best)
            }
            NumberTerm::Char(phi) => Ok(rational::bool01(self.formula(phi)?)),
        }
    }

    fn formula(&mut self, phi: &'a Formula) -> EResult<bool> {
        match phi {
            Formula::IndexEq(a, b) => Ok(self.index(a)? == self.index(b)?),
            Formula::NumEq(a, b) => Ok(self.number(a)? == self.number(b)?),
            Formula::NumLt(a, b) => Ok(self.number(a)? < self.number(b)?),
            Formula::Not(a) => Ok(!self.formula(a)?),
            Formula::And(a, b) => Ok(self.formula(a)? && self.formula(b)?),
            Formula::Or(a, b) => Ok(self.formula(a)? || self.formula(b)?),
            Formula::Implies(a, b) => Ok(!self.formula(a)? || self.formula(b)?),
            Formula::Iff(a, b) => Ok(self.formula(a)? == self.formula(b)?),
            Formula::Exists(v, body) => {
                for x in 0..self.d.universe_size() {
                    if self.bound(v, x, |e| e.formula(body))? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Formula::Forall(v, body) => {
                for x in 0..self.d.universe_size() {
                    if !self.bound(v, x, |e| e.formula(body))? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

fn evaluator<'a>(d: &'a RStructure, arb: &'a ArbInterpretation, a: &'a Assignment) -> Eval<'a> {
    Eval {
        d,
        arb,
        env: a.bindings.iter().map(|(v, x)| (v.as_str(), *x)).collect(),
    }
}

pub fn eval_index_term<'a>(h: &'a IndexTerm, d: &'a RStructure, arb: &'a ArbInterpretation, a: &'a Assignment) -> Result<usize, EvalError> {
    evaluator(d, arb, a).index(h)
}

pub fn eval_number_term<'a>(
    t: &'a NumberTerm,
    d: &'a RStructure,
    arb: &'a ArbInterpretation,
    a: &'a Assignment,
) -> Result<Rational, EvalError> {
    evaluator(d, arb, a).number(t)
}

pub fn satisfies<'a>(phi: &'a Formula, d: &'a RStructure, arb: &'a ArbInterpretation, a: &'a Assignment) -> Result<bool, EvalError> {
    evaluator(d, arb, a).formula(phi)
}

/// [`satisfies`] for a sentence with no auxiliary symbols.
pub fn holds(phi: &Formula, d: &RStructure) -> Result<bool, EvalError> {
    satisfies(phi, d, &ArbInterpretation::new(), &Assignment::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Signature, Symbol};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rational::int(x)).collect()
    }

    fn unary(values: &[i64]) -> RStructure {
        let sig = Signature::numbers(&[("f", 1)]).unwrap();
        RStructure::new(sig, values.len(), vec![], vec![ints(values)]).unwrap()
    }

    fn f(x: &str) -> NumberTerm {
        NumberTerm::app("f", vec![IndexTerm::var(x)])
    }

    fn none() -> ArbInterpretation {
        ArbInterpretation::new()
    }

    #[test]
    fn index_terms() {
        let sig = Signature::new(vec![Symbol::new("s", 1)], vec![], vec![]).unwrap();
        let succ = RStructure::new(sig.clone(), 3, vec![vec![1, 2, 0]], vec![]).unwrap();
        let a = Assignment::new().bind("x", 2);
        assert_eq!(eval_index_term(&IndexTerm::var("x"), &succ, &none(), &a), Ok(2));
        let s = |h: IndexTerm| IndexTerm::SkeletonApp("s".into(), vec![h]);
        assert_eq!(eval_index_term(&s(IndexTerm::var("x")), &succ, &none(), &a), Ok(0));
        let a1 = Assignment::new().bind("x", 1);
        // s(s(1)) = s(2) = 0 under successor mod 3.
        assert_eq!(eval_index_term(&s(s(IndexTerm::var("x"))), &succ, &none(), &a1), Ok(0));
        assert_eq!(
            eval_index_term(&IndexTerm::var("y"), &succ, &none(), &a),
            Err(EvalError::UnboundVariable("y".into()))
        );
    }

    #[test]
    fn number_terms() {
        let d = unary(&[2, 2, 2]);
        let a = Assignment::new();
        assert_eq!(eval_number_term(&NumberTerm::sign(NumberTerm::int(-3)), &d, &none(), &a), Ok(rational::int(-1)));
        assert_eq!(eval_number_term(&NumberTerm::sum("i", f("i")), &d, &none(), &a), Ok(rational::int(6)));
        let d = unary(&[1, 2]);
        let p = NumberTerm::prod("i", NumberTerm::add(f("i"), NumberTerm::int(1)));
        assert_eq!(eval_number_term(&p, &d, &none(), &a), Ok(rational::int(6)));
        let m = NumberTerm::max("i", f("i"));
        assert_eq!(eval_number_term(&m, &unary(&[-4, 7, 3]), &none(), &a), Ok(rational::int(7)));
    }

    #[test]
    fn formulas() {
        let ex = Formula::exists("x", Formula::NumEq(f("x"), NumberTerm::int(5)));
        assert_eq!(holds(&ex, &unary(&[3, 5])), Ok(true));
        let all = Formula::forall("x", Formula::NumLt(NumberTerm::int(0), f("x")));
        assert_eq!(holds(&all, &unary(&[3, 5])), Ok(true));
        assert_eq!(holds(&all, &unary(&[0, 5])), Ok(false));
        let phi = Formula::NumLt(f("x"), NumberTerm::int(4));
        let taut = Formula::NumEq(NumberTerm::chi(Formula::or(phi.clone(), Formula::not(phi))), NumberTerm::int(1));
        let a = Assignment::new().bind("x", 1);
        assert_eq!(satisfies(&taut, &unary(&[3, 5]), &none(), &a), Ok(true));
    }

    #[test]
    fn char_false_is_zero() {
        let t = NumberTerm::chi(Formula::NumLt(NumberTerm::int(1), NumberTerm::int(0)));
        assert_eq!(eval_number_term(&t, &unary(&[0]), &none(), &Assignment::new()), Ok(rational::int(0)));
    }

    #[test]
    fn aux_tables() {
        let mut arb = ArbInterpretation::new();
        arb.insert("k", crate::structure::Table::dense(1, ints(&[1, 5])));
        let d = unary(&[0, 0]);
        let a = Assignment::new().bind("x", 0);
        let h = IndexTerm::AuxIndexApp("k".into(), vec![IndexTerm::var("x")]);
        assert_eq!(eval_index_term(&h, &d, &arb, &a), Ok(1));
        let a = Assignment::new().bind("x", 1);
        assert!(matches!(eval_index_term(&h, &d, &arb, &a), Err(EvalError::IndexOutOfRange { .. })));
        let missing = NumberTerm::aux("z", vec![]);
        assert_eq!(eval_number_term(&missing, &d, &arb, &a), Err(EvalError::MissingTable("z".into())));
    }
}
