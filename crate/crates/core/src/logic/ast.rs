use std::collections::BTreeSet;
use std::sync::Arc;

use crate::rational::{self, Rational};

use super::signature::{Signature, SymbolKind};
use super::LogicError;

/// Universe-valued terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IndexTerm {
    Var(String),
    SkeletonApp(String, Vec<IndexTerm>),
    AuxIndexApp(String, Vec<IndexTerm>),
}

/// Real-valued terms, including the aggregation rules and `chi[φ]`.
///
/// Children are reference counted so that large generated terms can share
/// subterms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum NumberTerm {
    Const(Rational),
    NumApp(String, Vec<IndexTerm>),
    AuxNumApp(String, Vec<IndexTerm>),
    Add(Arc<NumberTerm>, Arc<NumberTerm>),
    Mul(Arc<NumberTerm>, Arc<NumberTerm>),
    Sign(Arc<NumberTerm>),
    Sum(String, Arc<NumberTerm>),
    Prod(String, Arc<NumberTerm>),
    Max(String, Arc<NumberTerm>),
    Char(Arc<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    IndexEq(IndexTerm, IndexTerm),
    NumEq(NumberTerm, NumberTerm),
    NumLt(NumberTerm, NumberTerm),
    Not(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    Or(Arc<Formula>, Arc<Formula>),
    Implies(Arc<Formula>, Arc<Formula>),
    Iff(Arc<Formula>, Arc<Formula>),
    Exists(String, Arc<Formula>),
    Forall(String, Arc<Formula>),
}

/// Any AST node, for operations that accept all three syntactic categories.
#[derive(Debug, Clone, Copy)]
pub enum Node<'a> {
    Formula(&'a Formula),
    Index(&'a IndexTerm),
    Number(&'a NumberTerm),
}

impl IndexTerm {
    pub fn var(name: &str) -> Self {
        IndexTerm::Var(name.to_string())
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_index(self, &mut Vec::new(), &mut out);
        out
    }
}

impl NumberTerm {
    pub fn int(v: i64) -> Self {
        NumberTerm::Const(rational::int(v))
    }

    pub fn app(name: &str, args: Vec<IndexTerm>) -> Self {
        NumberTerm::NumApp(name.to_string(), args)
    }

    pub fn aux(name: &str, args: Vec<IndexTerm>) -> Self {
        NumberTerm::AuxNumApp(name.to_string(), args)
    }

    pub fn add(a: NumberTerm, b: NumberTerm) -> Self {
        NumberTerm::Add(Arc::new(a), Arc::new(b))
    }

    pub fn mul(a: NumberTerm, b: NumberTerm) -> Self {
        NumberTerm::Mul(Arc::new(a), Arc::new(b))
    }

    pub fn sign(a: NumberTerm) -> Self {
        NumberTerm::Sign(Arc::new(a))
    }

    pub fn sum(var: &str, body: NumberTerm) -> Self {
        NumberTerm::Sum(var.to_string(), Arc::new(body))
    }

    pub fn prod(var: &str, body: NumberTerm) -> Self {
        NumberTerm::Prod(var.to_string(), Arc::new(body))
    }

    pub fn max(var: &str, body: NumberTerm) -> Self {
        NumberTerm::Max(var.to_string(), Arc::new(body))
    }

    pub fn chi(phi: Formula) -> Self {
        NumberTerm::Char(Arc::new(phi))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_number(self, &mut Vec::new(), &mut out);
        out
    }
}

impl Formula {
    pub fn not(a: Formula) -> Self {
        Formula::Not(Arc::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Arc::new(a), Arc::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Arc::new(a), Arc::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Arc::new(a), Arc::new(b))
    }

    pub fn exists(var: &str, body: Formula) -> Self {
        Formula::Exists(var.to_string(), Arc::new(body))
    }

    pub fn forall(var: &str, body: Formula) -> Self {
        Formula::Forall(var.to_string(), Arc::new(body))
    }

    /// `a ≥ b`, which is not an atom: `b < a ∨ a = b`.
    pub fn geq(a: NumberTerm, b: NumberTerm) -> Self {
        Formula::or(Formula::NumLt(b.clone(), a.clone()), Formula::NumEq(a, b))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        collect_formula(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Number of `Max` nodes, including those under `chi`.
    pub fn count_max(&self) -> usize {
        let mut n = 0;
        visit_formula_terms(self, &mut |t| {
            if matches!(t, NumberTerm::Max(..)) {
                n += 1;
            }
        });
        n
    }

    /// Number of `Sum` and `Prod` nodes, including those under `chi`.
    pub fn count_sum_prod(&self) -> usize {
        let mut n = 0;
        visit_formula_terms(self, &mut |t| {
            if matches!(t, NumberTerm::Sum(..) | NumberTerm::Prod(..)) {
                n += 1;
            }
        });
        n
    }

    /// Checks every application against the signature: the symbol must be
    /// declared with the matching kind and arity.
    pub fn check(&self, sig: &Signature) -> Result<(), LogicError> {
        check_formula(self, sig)
    }

    /// First variable bound while already in scope, if any.
    pub fn find_shadowing(&self) -> Option<String> {
        shadow_formula(self, &mut Vec::new())
    }
}

impl Node<'_> {
    pub fn free_vars(&self) -> BTreeSet<String> {
        match self {
            Node::Formula(f) => f.free_vars(),
            Node::Index(h) => h.free_vars(),
            Node::Number(t) => t.free_vars(),
        }
    }
}

fn collect_index(h: &IndexTerm, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match h {
        IndexTerm::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        IndexTerm::SkeletonApp(_, args) | IndexTerm::AuxIndexApp(_, args) => {
            for a in args {
                collect_index(a, bound, out);
            }
        }
    }
}

fn collect_number(t: &NumberTerm, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match t {
        NumberTerm::Const(_) => {}
        NumberTerm::NumApp(_, args) | NumberTerm::AuxNumApp(_, args) => {
            for a in args {
                collect_index(a, bound, out);
            }
        }
        NumberTerm::Add(a, b) | NumberTerm::Mul(a, b) => {
            collect_number(a, bound, out);
            collect_number(b, bound, out);
        }
        NumberTerm::Sign(a) => collect_number(a, bound, out),
        NumberTerm::Sum(v, body) | NumberTerm::Prod(v, body) | NumberTerm::Max(v, body) => {
            bound.push(v.clone());
            collect_number(body, bound, out);
            bound.pop();
        }
        NumberTerm::Char(phi) => collect_formula(phi, bound, out),
    }
}

fn collect_formula(phi: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    match phi {
        Formula::IndexEq(a, b) => {
            collect_index(a, bound, out);
            collect_index(b, bound, out);
        }
        Formula::NumEq(a, b) | Formula::NumLt(a, b) => {
            collect_number(a, bound, out);
            collect_number(b, bound, out);
        }
        Formula::Not(a) => collect_formula(a, bound, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_formula(a, bound, out);
            collect_formula(b, bound, out);
        }
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            bound.push(v.clone());
            collect_formula(body, bound, out);
            bound.pop();
        }
    }
}

/// Calls `f` on every number term reachable from `phi`, including terms
/// nested inside `chi`.
pub(crate) fn visit_formula_terms(phi: &Formula, f: &mut impl FnMut(&NumberTerm)) {
    match phi {
        Formula::IndexEq(..) => {}
        Formula::NumEq(a, b) | Formula::NumLt(a, b) => {
            visit_terms(a, f);
            visit_terms(b, f);
        }
        Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => visit_formula_terms(a, f),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            visit_formula_terms(a, f);
            visit_formula_terms(b, f);
        }
    }
}

pub(crate) fn visit_terms(t: &NumberTerm, f: &mut impl FnMut(&NumberTerm)) {
    f(t);
    match t {
        NumberTerm::Const(_) | NumberTerm::NumApp(..) | NumberTerm::AuxNumApp(..) => {}
        NumberTerm::Add(a, b) | NumberTerm::Mul(a, b) => {
            visit_terms(a, f);
            visit_terms(b, f);
        }
        NumberTerm::Sign(a) | NumberTerm::Sum(_, a) | NumberTerm::Prod(_, a) | NumberTerm::Max(_, a) => {
            visit_terms(a, f)
        }
        NumberTerm::Char(phi) => visit_formula_terms(phi, f),
    }
}

fn check_app(sig: &Signature, name: &str, argc: usize, allowed: &[SymbolKind]) -> Result<(), LogicError> {
    match sig.lookup(name) {
        None => Err(LogicError::Undeclared(name.to_string())),
        Some((kind, _)) if !allowed.contains(&kind) => Err(LogicError::WrongKind(name.to_string())),
        Some((_, arity)) if arity != argc => Err(LogicError::Arity {
            symbol: name.to_string(),
            expected: arity,
            found: argc,
        }),
        Some(_) => Ok(()),
    }
}

fn check_index(h: &IndexTerm, sig: &Signature) -> Result<(), LogicError> {
    match h {
        IndexTerm::Var(_) => Ok(()),
        IndexTerm::SkeletonApp(name, args) => {
            check_app(sig, name, args.len(), &[SymbolKind::Skeleton])?;
            args.iter().try_for_each(|a| check_index(a, sig))
        }
        IndexTerm::AuxIndexApp(name, args) => {
            check_app(sig, name, args.len(), &[SymbolKind::AuxIndex])?;
            args.iter().try_for_each(|a| check_index(a, sig))
        }
    }
}

fn check_number(t: &NumberTerm, sig: &Signature) -> Result<(), LogicError> {
    match t {
        NumberTerm::Const(_) => Ok(()),
        NumberTerm::NumApp(name, args) => {
            check_app(sig, name, args.len(), &[SymbolKind::Number])?;
            args.iter().try_for_each(|a| check_index(a, sig))
        }
        NumberTerm::AuxNumApp(name, args) => {
            check_app(sig, name, args.len(), &[SymbolKind::AuxNumber])?;
            args.iter().try_for_each(|a| check_index(a, sig))
        }
        NumberTerm::Add(a, b) | NumberTerm::Mul(a, b) => {
            check_number(a, sig)?;
            check_number(b, sig)
        }
        NumberTerm::Sign(a) | NumberTerm::Sum(_, a) | NumberTerm::Prod(_, a) | NumberTerm::Max(_, a) => {
            check_number(a, sig)
        }
        NumberTerm::Char(phi) => check_formula(phi, sig),
    }
}

fn check_formula(phi: &Formula, sig: &Signature) -> Result<(), LogicError> {
    match phi {
        Formula::IndexEq(a, b) => {
            check_index(a, sig)?;
            check_index(b, sig)
        }
        Formula::NumEq(a, b) | Formula::NumLt(a, b) => {
            check_number(a, sig)?;
            check_number(b, sig)
        }
        Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => check_formula(a, sig),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            check_formula(a, sig)?;
            check_formula(b, sig)
        }
    }
}

fn shadow_number(t: &NumberTerm, scope: &mut Vec<String>) -> Option<String> {
    match t {
        NumberTerm::Const(_) | NumberTerm::NumApp(..) | NumberTerm::AuxNumApp(..) => None,
        NumberTerm::Add(a, b) | NumberTerm::Mul(a, b) => shadow_number(a, scope).or_else(|| shadow_number(b, scope)),
        NumberTerm::Sign(a) => shadow_number(a, scope),
        NumberTerm::Sum(v, a) | NumberTerm::Prod(v, a) | NumberTerm::Max(v, a) => {
            if scope.contains(v) {
                return Some(v.clone());
            }
            scope.push(v.clone());
            let r = shadow_number(a, scope);
            scope.pop();
            r
        }
        NumberTerm::Char(phi) => shadow_formula(phi, scope),
    }
}

fn shadow_formula(phi: &Formula, scope: &mut Vec<String>) -> Option<String> {
    match phi {
        Formula::IndexEq(..) => None,
        Formula::NumEq(a, b) | Formula::NumLt(a, b) => shadow_number(a, scope).or_else(|| shadow_number(b, scope)),
        Formula::Not(a) => shadow_formula(a, scope),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            shadow_formula(a, scope).or_else(|| shadow_formula(b, scope))
        }
        Formula::Exists(v, a) | Formula::Forall(v, a) => {
            if scope.contains(v) {
                return Some(v.clone());
            }
            scope.push(v.clone());
            let r = shadow_formula(a, scope);
            scope.pop();
            r
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: &str) -> NumberTerm {
        NumberTerm::app("f", vec![IndexTerm::var(x)])
    }

    #[test]
    fn sum_binds_its_variable() {
        let t = NumberTerm::sum(
            "i",
            NumberTerm::mul(f("i"), NumberTerm::app("g", vec![IndexTerm::var("w")])),
        );
        assert_eq!(t.free_vars(), BTreeSet::from(["w".to_string()]));
    }

    #[test]
    fn variable_is_free() {
        assert_eq!(IndexTerm::var("x").free_vars(), BTreeSet::from(["x".to_string()]));
    }

    #[test]
    fn quantifier_binds() {
        let phi = Formula::forall("x", Formula::IndexEq(IndexTerm::var("x"), IndexTerm::var("y")));
        assert_eq!(phi.free_vars(), BTreeSet::from(["y".to_string()]));
        assert_eq!(Node::Formula(&phi).free_vars().len(), 1);
    }

    #[test]
    fn char_exposes_free_vars_of_its_formula() {
        let t = NumberTerm::chi(Formula::NumEq(f("x"), NumberTerm::int(1)));
        assert_eq!(t.free_vars(), BTreeSet::from(["x".to_string()]));
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        let sig = Signature::numbers(&[("f", 1)]).unwrap();
        let bad = Formula::NumEq(
            NumberTerm::app("f", vec![IndexTerm::var("x"), IndexTerm::var("y")]),
            NumberTerm::int(0),
        );
        assert_eq!(
            bad.check(&sig),
            Err(LogicError::Arity {
                symbol: "f".into(),
                expected: 1,
                found: 2
            })
        );
        let undeclared = Formula::NumEq(NumberTerm::app("g", vec![]), NumberTerm::int(0));
        assert_eq!(undeclared.check(&sig), Err(LogicError::Undeclared("g".into())));
    }

    #[test]
    fn shadowing_is_detected() {
        let phi = Formula::exists("x", Formula::forall("x", Formula::NumEq(f("x"), NumberTerm::int(0))));
        assert_eq!(phi.find_shadowing(), Some("x".into()));
        let ok = Formula::and(
            Formula::exists("x", Formula::NumEq(f("x"), NumberTerm::int(0))),
            Formula::exists("x", Formula::NumEq(f("x"), NumberTerm::int(1))),
        );
        assert_eq!(ok.find_shadowing(), None);
    }
}
