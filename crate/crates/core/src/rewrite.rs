//! Formula rewrites: eliminating `max` with quantifiers, and absorbing `sum`
//! / `prod` terms into fresh auxiliary symbols.

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::logic::{visit_formula_terms, AuxKind, AuxSymbol, Formula, IndexTerm, NumberTerm};
use crate::model_checker::{eval_number_term, Assignment, EvalError};
use crate::structure::{tuples, ArbInterpretation, RStructure, Table};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    /// The body of a `max` depends on a variable bound by an enclosing `sum` or
    /// `prod` of the same atom, so it cannot be moved out to formula level.
    #[error("`max {max_var}` depends on `{bound}`, which is bound by an enclosing sum or product")]
    MaxUnderAggregate { max_var: String, bound: String },
}

/// Every variable and symbol name occurring in `phi`.
fn names(phi: &Formula) -> HashSet<String> {
    fn index(h: &IndexTerm, out: &mut HashSet<String>) {
        match h {
            IndexTerm::Var(x) => {
                out.insert(x.clone());
            }
            IndexTerm::SkeletonApp(n, args) | IndexTerm::AuxIndexApp(n, args) => {
                out.insert(n.clone());
                args.iter().for_each(|a| index(a, out));
            }
        }
    }
    fn formula(phi: &Formula, out: &mut HashSet<String>) {
        match phi {
            Formula::IndexEq(a, b) => {
                index(a, out);
                index(b, out);
            }
            Formula::NumEq(..) | Formula::NumLt(..) => {}
            Formula::Not(a) => formula(a, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                formula(a, out);
                formula(b, out);
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                out.insert(v.clone());
                formula(a, out);
            }
        }
    }
    let mut out = HashSet::new();
    formula(phi, &mut out);
    visit_formula_terms(phi, &mut |t| match t {
        NumberTerm::NumApp(n, args) | NumberTerm::AuxNumApp(n, args) => {
            out.insert(n.clone());
            args.iter().for_each(|a| index(a, &mut out));
        }
        NumberTerm::Sum(v, _) | NumberTerm::Prod(v, _) | NumberTerm::Max(v, _) => {
            out.insert(v.clone());
        }
        NumberTerm::Char(psi) => formula(psi, &mut out),
        _ => {}
    });
    out
}

struct Fresh {
    taken: HashSet<String>,
    counter: usize,
}

impl Fresh {
    fn new(phi: &Formula) -> Self {
        Fresh {
            taken: names(phi),
            counter: 0,
        }
    }

    fn next(&mut self, prefixes: &[&str]) -> Vec<String> {
        loop {
            self.counter += 1;
            let candidates: Vec<String> = prefixes.iter().map(|p| format!("{p}${}", self.counter)).collect();
            if candidates.iter().all(|c| !self.taken.contains(c)) {
                self.taken.extend(candidates.iter().cloned());
                return candidates;
            }
        }
    }
}

fn subst_index(h: &IndexTerm, from: &str, to: &str) -> IndexTerm {
    match h {
        IndexTerm::Var(x) if x == from => IndexTerm::Var(to.to_string()),
        IndexTerm::Var(_) => h.clone(),
        IndexTerm::SkeletonApp(n, args) => {
            IndexTerm::SkeletonApp(n.clone(), args.iter().map(|a| subst_index(a, from, to)).collect())
        }
        IndexTerm::AuxIndexApp(n, args) => {
            IndexTerm::AuxIndexApp(n.clone(), args.iter().map(|a| subst_index(a, from, to)).collect())
        }
    }
}

/// Renames the free occurrences of `from` to `to`; `to` must be fresh.
fn subst_number(t: &NumberTerm, from: &str, to: &str) -> NumberTerm {
    let rec = |a: &Arc<NumberTerm>| Arc::new(subst_number(a, from, to));
    match t {
        NumberTerm::Const(_) => t.clone(),
        NumberTerm::NumApp(n, args) => NumberTerm::NumApp(n.clone(), args.iter().map(|a| subst_index(a, from, to)).collect()),
        NumberTerm::AuxNumApp(n, args) => {
            NumberTerm::AuxNumApp(n.clone(), args.iter().map(|a| subst_index(a, from, to)).collect())
        }
        NumberTerm::Add(a, b) => NumberTerm::Add(rec(a), rec(b)),
        NumberTerm::Mul(a, b) => NumberTerm::Mul(rec(a), rec(b)),
        NumberTerm::Sign(a) => NumberTerm::Sign(rec(a)),
        NumberTerm::Sum(v, _) | NumberTerm::Prod(v, _) | NumberTerm::Max(v, _) if v == from => t.clone(),
        NumberTerm::Sum(v, a) => NumberTerm::Sum(v.clone(), rec(a)),
        NumberTerm::Prod(v, a) => NumberTerm::Prod(v.clone(), rec(a)),
        NumberTerm::Max(v, a) => NumberTerm::Max(v.clone(), rec(a)),
        NumberTerm::Char(phi) => NumberTerm::Char(Arc::new(subst_formula(phi, from, to))),
    }
}

fn subst_formula(phi: &Formula, from: &str, to: &str) -> Formula {
    let rec = |a: &Arc<Formula>| Arc::new(subst_formula(a, from, to));
    match phi {
        Formula::IndexEq(a, b) => Formula::IndexEq(subst_index(a, from, to), subst_index(b, from, to)),
        Formula::NumEq(a, b) => Formula::NumEq(subst_number(a, from, to), subst_number(b, from, to)),
        Formula::NumLt(a, b) => Formula::NumLt(subst_number(a, from, to), subst_number(b, from, to)),
        Formula::Not(a) => Formula::Not(rec(a)),
        Formula::And(a, b) => Formula::And(rec(a), rec(b)),
        Formula::Or(a, b) => Formula::Or(rec(a), rec(b)),
        Formula::Implies(a, b) => Formula::Implies(rec(a), rec(b)),
        Formula::Iff(a, b) => Formula::Iff(rec(a), rec(b)),
        Formula::Exists(v, _) | Formula::Forall(v, _) if v == from => phi.clone(),
        Formula::Exists(v, a) => Formula::Exists(v.clone(), rec(a)),
        Formula::Forall(v, a) => Formula::Forall(v.clone(), rec(a)),
    }
}

/// A `max` found at the outermost level of a term.
struct Hoisted {
    var: String,
    body: NumberTerm,
}

struct MaxEliminator {
    fresh: Fresh,
}

impl MaxEliminator {
    /// Rewrites `chi` subformulas; leaves `max` nodes of the term itself alone.
    fn chi_inside(&mut self, t: &NumberTerm) -> Result<NumberTerm, RewriteError> {
        Ok(match t {
            NumberTerm::Const(_) | NumberTerm::NumApp(..) | NumberTerm::AuxNumApp(..) => t.clone(),
            NumberTerm::Add(a, b) => NumberTerm::add(self.chi_inside(a)?, self.chi_inside(b)?),
            NumberTerm::Mul(a, b) => NumberTerm::mul(self.chi_inside(a)?, self.chi_inside(b)?),
            NumberTerm::Sign(a) => NumberTerm::sign(self.chi_inside(a)?),
            NumberTerm::Sum(v, a) => NumberTerm::sum(v, self.chi_inside(a)?),
            NumberTerm::Prod(v, a) => NumberTerm::prod(v, self.chi_inside(a)?),
            NumberTerm::Max(v, a) => NumberTerm::max(v, self.chi_inside(a)?),
            NumberTerm::Char(phi) => NumberTerm::chi(self.formula(phi)?),
        })
    }

    /// Replaces the first outermost `max` by `body[var := x]`.
    fn take_max(
        t: &NumberTerm,
        x: &str,
        binders: &mut Vec<String>,
        found: &mut Option<Hoisted>,
    ) -> Result<NumberTerm, RewriteError> {
        if found.is_some() {
            return Ok(t.clone());
        }
        Ok(match t {
            NumberTerm::Max(v, body) => {
                let fv = body.free_vars();
                if let Some(b) = binders.iter().find(|b| fv.contains(*b) && *b != v) {
                    return Err(RewriteError::MaxUnderAggregate {
                        max_var: v.clone(),
                        bound: b.clone(),
                    });
                }
                *found = Some(Hoisted {
                    var: v.clone(),
                    body: (**body).clone(),
                });
                subst_number(body, v, x)
            }
            NumberTerm::Const(_) | NumberTerm::NumApp(..) | NumberTerm::AuxNumApp(..) | NumberTerm::Char(_) => t.clone(),
            NumberTerm::Add(a, b) => {
                let a = Self::take_max(a, x, binders, found)?;
                NumberTerm::add(a, Self::take_max(b, x, binders, found)?)
            }
            NumberTerm::Mul(a, b) => {
                let a = Self::take_max(a, x, binders, found)?;
                NumberTerm::mul(a, Self::take_max(b, x, binders, found)?)
            }
            NumberTerm::Sign(a) => NumberTerm::sign(Self::take_max(a, x, binders, found)?),
            NumberTerm::Sum(v, a) | NumberTerm::Prod(v, a) => {
                binders.push(v.clone());
                let inner = Self::take_max(a, x, binders, found);
                binders.pop();
                let inner = inner?;
                if matches!(t, NumberTerm::Sum(..)) {
                    NumberTerm::sum(v, inner)
                } else {
                    NumberTerm::prod(v, inner)
                }
            }
        })
    }

    /// Eliminates the `max` nodes of one comparison atom.
    fn atom(&mut self, lhs: &NumberTerm, rhs: &NumberTerm, lt: bool) -> Result<Formula, RewriteError> {
        let lhs = self.chi_inside(lhs)?;
        let rhs = self.chi_inside(rhs)?;
        let names = self.fresh.next(&["x", "y"]);
        let (x, y) = (&names[0], &names[1]);
        let mut found = None;
        let new_lhs = Self::take_max(&lhs, x, &mut Vec::new(), &mut found)?;
        let new_rhs = Self::take_max(&rhs, x, &mut Vec::new(), &mut found)?;
        let Some(Hoisted { var, body }) = found else {
            return Ok(if lt {
                Formula::NumLt(lhs, rhs)
            } else {
                Formula::NumEq(lhs, rhs)
            });
        };
        let at_x = subst_number(&body, &var, x);
        let at_y = subst_number(&body, &var, y);
        let psi = self.formula(&Formula::geq(at_x, at_y))?;
        let rest = self.atom(&new_lhs, &new_rhs, lt)?;
        Ok(Formula::exists(x, Formula::forall(y, Formula::and(psi, rest))))
    }

    fn formula(&mut self, phi: &Formula) -> Result<Formula, RewriteError> {
        Ok(match phi {
            Formula::IndexEq(..) => phi.clone(),
            Formula::NumEq(a, b) => self.atom(a, b, false)?,
            Formula::NumLt(a, b) => self.atom(a, b, true)?,
            Formula::Not(a) => Formula::not(self.formula(a)?),
            Formula::And(a, b) => Formula::and(self.formula(a)?, self.formula(b)?),
            Formula::Or(a, b) => Formula::or(self.formula(a)?, self.formula(b)?),
            Formula::Implies(a, b) => Formula::implies(self.formula(a)?, self.formula(b)?),
            Formula::Iff(a, b) => Formula::iff(self.formula(a)?, self.formula(b)?),
            Formula::Exists(v, a) => Formula::exists(v, self.formula(a)?),
            Formula::Forall(v, a) => Formula::forall(v, self.formula(a)?),
        })
    }
}

/// Removes every `max` node. Each comparison atom containing `max i (F)` at
/// its outermost level becomes `exists x. forall y. (F[x] >= F[y] & atom')`,
/// where `atom'` has the `max` replaced by `F[x]`; nested `max` nodes are
/// handled by the same rule applied to the new atoms.
///
/// Fails when a `max` body uses a variable bound by a `sum` or `prod` around
/// it within the same atom, since no formula-level witness can depend on it.
pub fn eliminate_max(phi: &Formula) -> Result<Formula, RewriteError> {
    if phi.count_max() == 0 {
        return Ok(phi.clone());
    }
    let mut e = MaxEliminator { fresh: Fresh::new(phi) };
    e.formula(phi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AggregateKind {
    Sum,
    Prod,
}

/// Definition of a fresh symbol introduced by [`absorb_sums`]:
/// `name(params) = sum var (body)` (or `prod`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxDef {
    pub name: String,
    pub params: Vec<String>,
    pub var: String,
    pub body: NumberTerm,
    pub kind: AggregateKind,
}

impl AuxDef {
    pub fn arity(&self) -> usize {
        self.params.len()
    }

    pub fn symbol(&self) -> AuxSymbol {
        AuxSymbol::new(self.name.clone(), self.arity(), AuxKind::Number)
    }

    /// The aggregate term this symbol stands for.
    pub fn term(&self) -> NumberTerm {
        match self.kind {
            AggregateKind::Sum => NumberTerm::sum(&self.var, self.body.clone()),
            AggregateKind::Prod => NumberTerm::prod(&self.var, self.body.clone()),
        }
    }
}

struct Absorber {
    fresh: Fresh,
    defs: Vec<AuxDef>,
}

impl Absorber {
    fn term(&mut self, t: &NumberTerm) -> NumberTerm {
        match t {
            NumberTerm::Const(_) | NumberTerm::NumApp(..) | NumberTerm::AuxNumApp(..) => t.clone(),
            NumberTerm::Add(a, b) => NumberTerm::add(self.term(a), self.term(b)),
            NumberTerm::Mul(a, b) => NumberTerm::mul(self.term(a), self.term(b)),
            NumberTerm::Sign(a) => NumberTerm::sign(self.term(a)),
            NumberTerm::Max(v, a) => NumberTerm::max(v, self.term(a)),
            NumberTerm::Char(phi) => NumberTerm::chi(self.formula(phi)),
            NumberTerm::Sum(v, a) | NumberTerm::Prod(v, a) => {
                let body = self.term(a);
                let kind = if matches!(t, NumberTerm::Sum(..)) {
                    AggregateKind::Sum
                } else {
                    AggregateKind::Prod
                };
                let prefix = match kind {
                    AggregateKind::Sum => "sum",
                    AggregateKind::Prod => "prod",
                };
                let name = self.fresh.next(&[prefix]).remove(0);
                let mut params: Vec<String> = body.free_vars().into_iter().collect();
                params.retain(|p| p != v);
                let args = params.iter().map(|p| IndexTerm::var(p)).collect();
                self.defs.push(AuxDef {
                    name: name.clone(),
                    params,
                    var: v.clone(),
                    body,
                    kind,
                });
                NumberTerm::AuxNumApp(name, args)
            }
        }
    }

    fn formula(&mut self, phi: &Formula) -> Formula {
        match phi {
            Formula::IndexEq(..) => phi.clone(),
            Formula::NumEq(a, b) => Formula::NumEq(self.term(a), self.term(b)),
            Formula::NumLt(a, b) => Formula::NumLt(self.term(a), self.term(b)),
            Formula::Not(a) => Formula::not(self.formula(a)),
            Formula::And(a, b) => Formula::and(self.formula(a), self.formula(b)),
            Formula::Or(a, b) => Formula::or(self.formula(a), self.formula(b)),
            Formula::Implies(a, b) => Formula::implies(self.formula(a), self.formula(b)),
            Formula::Iff(a, b) => Formula::iff(self.formula(a), self.formula(b)),
            Formula::Exists(v, a) => Formula::exists(v, self.formula(a)),
            Formula::Forall(v, a) => Formula::forall(v, self.formula(a)),
        }
    }
}

/// Replaces every `sum`/`prod` node, innermost first, by an application of a
/// fresh auxiliary symbol (`sum$k`, `prod$k`) over the node's free variables.
/// Definitions are returned in creation order, so each body only mentions
/// symbols defined before it.
pub fn absorb_sums(phi: &Formula) -> (Formula, Vec<AuxDef>) {
    let mut a = Absorber {
        fresh: Fresh::new(phi),
        defs: Vec::new(),
    };
    let out = a.formula(phi);
    (out, a.defs)
}

/// Extends `arb` with a table for every definition, evaluating the aggregate
/// on each argument tuple.
pub fn build_aux_interpretation(
    defs: &[AuxDef],
    d: &RStructure,
    arb: &ArbInterpretation,
) -> Result<ArbInterpretation, EvalError> {
    let mut out = arb.clone();
    let u = d.universe_size();
    for def in defs {
        let term = def.term();
        let mut values = Vec::new();
        for tuple in tuples(u, def.arity()) {
            let a: Assignment = def.params.iter().zip(tuple).map(|(p, v)| (p.as_str(), v)).collect();
            values.push(eval_number_term(&term, d, &out, &a)?);
        }
        out.insert(def.name.clone(), Table::dense(def.arity(), values));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_checker::satisfies;
    use crate::rational::{self, Rational};
    use crate::structure::tuples;
    use crate::logic::Signature;

    fn f(x: &str) -> NumberTerm {
        NumberTerm::app("f", vec![IndexTerm::var(x)])
    }

    fn f2(x: &str, y: &str) -> NumberTerm {
        NumberTerm::app("f", vec![IndexTerm::var(x), IndexTerm::var(y)])
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rational::int(x)).collect()
    }

    /// All structures over `sig` (single number symbol) with values in `vals`.
    fn all_structures(sig: &Signature, u: usize, vals: &[i64]) -> Vec<RStructure> {
        let arity = sig.number_functions()[0].arity;
        let len = crate::structure::pow(u, arity);
        tuples(vals.len(), len)
            .map(|choice| {
                let table = choice.iter().map(|&c| rational::int(vals[c])).collect();
                RStructure::new(sig.clone(), u, vec![], vec![table]).unwrap()
            })
            .collect()
    }

    #[test]
    fn single_max_matches_schema() {
        let phi = Formula::NumEq(NumberTerm::max("i", f("i")), NumberTerm::int(5));
        let out = eliminate_max(&phi).unwrap();
        let expected = Formula::exists(
            "x$1",
            Formula::forall(
                "y$1",
                Formula::and(
                    Formula::geq(f("x$1"), f("y$1")),
                    Formula::NumEq(f("x$1"), NumberTerm::int(5)),
                ),
            ),
        );
        assert_eq!(out, expected);
    }

    #[test]
    fn max_free_formula_is_unchanged() {
        let phi = Formula::forall("x", Formula::NumLt(f("x"), NumberTerm::int(2)));
        assert_eq!(eliminate_max(&phi).unwrap(), phi);
        let (out, defs) = absorb_sums(&phi);
        assert_eq!(out, phi);
        assert!(defs.is_empty());
    }

    #[test]
    fn nested_max_is_equivalent() {
        let sig = Signature::numbers(&[("f", 2)]).unwrap();
        let phi = Formula::NumLt(NumberTerm::int(0), NumberTerm::max("i", NumberTerm::max("j", f2("i", "j"))));
        let out = eliminate_max(&phi).unwrap();
        assert_eq!(out.count_max(), 0);
        for u in 1..=2 {
            for d in all_structures(&sig, u, &[-1, 0, 1]) {
                let none = ArbInterpretation::new();
                let a = Assignment::new();
                assert_eq!(satisfies(&out, &d, &none, &a), satisfies(&phi, &d, &none, &a));
            }
        }
    }

    #[test]
    fn max_under_dependent_sum_is_rejected() {
        let phi = Formula::NumEq(NumberTerm::sum("j", NumberTerm::max("i", f2("i", "j"))), NumberTerm::int(0));
        assert!(matches!(eliminate_max(&phi), Err(RewriteError::MaxUnderAggregate { .. })));
        let ok = Formula::NumEq(NumberTerm::sum("j", NumberTerm::max("i", f("i"))), NumberTerm::int(0));
        assert_eq!(eliminate_max(&ok).unwrap().count_max(), 0);
    }

    #[test]
    fn nullary_sum_absorbed() {
        let phi = Formula::NumEq(NumberTerm::sum("i", f("i")), NumberTerm::int(6));
        let (out, defs) = absorb_sums(&phi);
        assert_eq!(out, Formula::NumEq(NumberTerm::aux("sum$1", vec![]), NumberTerm::int(6)));
        assert_eq!(defs.len(), 1);
        assert_eq!(defs[0].arity(), 0);
        let sig = Signature::numbers(&[("f", 1)]).unwrap();
        let d = RStructure::new(sig, 3, vec![], vec![ints(&[2, 2, 2])]).unwrap();
        let arb = build_aux_interpretation(&defs, &d, &ArbInterpretation::new()).unwrap();
        assert_eq!(arb.get("sum$1").unwrap().get(0), Some(&rational::int(6)));
    }

    #[test]
    fn product_table() {
        let phi = Formula::NumEq(NumberTerm::prod("i", f("i")), NumberTerm::int(0));
        let (_, defs) = absorb_sums(&phi);
        assert_eq!(defs[0].name, "prod$1");
        let sig = Signature::numbers(&[("f", 1)]).unwrap();
        let d = RStructure::new(sig, 3, vec![], vec![ints(&[1, 2, 3])]).unwrap();
        let arb = build_aux_interpretation(&defs, &d, &ArbInterpretation::new()).unwrap();
        assert_eq!(arb.get("prod$1").unwrap().get(0), Some(&rational::int(6)));
    }

    #[test]
    fn unary_definition_table() {
        // g(i, w) = i * w over u = 2.
        let sig = Signature::numbers(&[("g", 2)]).unwrap();
        let d = RStructure::new(sig, 2, vec![], vec![ints(&[0, 0, 0, 1])]).unwrap();
        let g = NumberTerm::app("g", vec![IndexTerm::var("i"), IndexTerm::var("w")]);
        let phi = Formula::forall("w", Formula::NumLt(NumberTerm::sum("i", g), NumberTerm::int(2)));
        let (_, defs) = absorb_sums(&phi);
        assert_eq!(defs[0].params, vec!["w".to_string()]);
        let arb = build_aux_interpretation(&defs, &d, &ArbInterpretation::new()).unwrap();
        let t = arb.get("sum$1").unwrap();
        assert_eq!(t.values().cloned().collect::<Vec<_>>(), ints(&[0, 1]));
    }

    #[test]
    fn nested_sums_innermost_first() {
        let sig = Signature::numbers(&[("f", 1), ("g", 2)]).unwrap();
        let g = NumberTerm::app("g", vec![IndexTerm::var("i"), IndexTerm::var("j")]);
        let t = NumberTerm::sum("i", NumberTerm::mul(f("i"), NumberTerm::sum("j", g)));
        let phi = Formula::NumLt(t, NumberTerm::int(1));
        let (out, defs) = absorb_sums(&phi);
        assert_eq!(out.count_sum_prod(), 0);
        assert_eq!(defs.len(), 2);
        assert_eq!((defs[0].arity(), defs[1].arity()), (1, 0));
        let vals = [-1i64, 0, 1];
        for u in 1..=2 {
            let (lf, lg) = (u, u * u);
            for choice in tuples(vals.len(), lf + lg) {
                let vs: Vec<Rational> = choice.iter().map(|&c| rational::int(vals[c])).collect();
                let d = RStructure::new(sig.clone(), u, vec![], vec![vs[..lf].to_vec(), vs[lf..].to_vec()]).unwrap();
                let none = ArbInterpretation::new();
                let arb = build_aux_interpretation(&defs, &d, &none).unwrap();
                let a = Assignment::new();
                assert_eq!(satisfies(&out, &d, &arb, &a), satisfies(&phi, &d, &none, &a));
            }
        }
    }
}
