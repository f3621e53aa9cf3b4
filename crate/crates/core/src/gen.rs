//! Seeded random instances for differential testing.
//!
//! All generators draw from [`rng`], a ChaCha8 stream seeded with a `u64`, so
//! a seed fixes every generated object. Structures are drawn table by table
//! in signature order (skeleton tables first), each entry in lexicographic
//! argument order: skeleton entries uniformly from `0..u`, number entries
//! uniformly from the given integer range.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{Circuit, GateId, GateKind};
use crate::logic::{Formula, IndexTerm, NumberTerm, Signature, Symbol};
use crate::rational::{self, Rational};
use crate::structure::{pow, RStructure};

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Up to `max_symbols` symbols of arity at most `max_arity`, named `s1, s2, ...`
/// for skeleton functions and `f1, f2, ...` for number functions. At least one
/// symbol is always present.
pub fn random_signature(rng: &mut GenRng, max_symbols: usize, max_arity: usize) -> Signature {
    let count = rng.gen_range(1..=max_symbols.max(1));
    let mut skeleton = Vec::new();
    let mut number = Vec::new();
    for _ in 0..count {
        let arity = rng.gen_range(0..=max_arity);
        if rng.gen_bool(0.3) {
            skeleton.push(Symbol::new(format!("s{}", skeleton.len() + 1), arity));
        } else {
            number.push(Symbol::new(format!("f{}", number.len() + 1), arity));
        }
    }
    Signature::new(skeleton, number, vec![]).expect("generated names are distinct")
}

pub fn random_structure(rng: &mut GenRng, sig: &Signature, u: usize, values: RangeInclusive<i64>) -> RStructure {
    let skeleton = sig
        .skeleton_functions()
        .iter()
        .map(|s| (0..pow(u, s.arity)).map(|_| rng.gen_range(0..u)).collect())
        .collect();
    let number = sig
        .number_functions()
        .iter()
        .map(|s| {
            let range = if sig.is_predicate(&s.name) { 0..=1 } else { values.clone() };
            (0..pow(u, s.arity)).map(|_| rational::int(rng.gen_range(range.clone()))).collect()
        })
        .collect();
    RStructure::new(sig.clone(), u, skeleton, number).expect("tables have the right shape")
}

/// Number of structures with every number entry in `{0, 1}`.
pub fn zero_one_count(sig: &Signature, u: usize) -> Option<u128> {
    let mut count: u128 = 1;
    for s in sig.skeleton_functions() {
        count = count.checked_mul((u as u128).checked_pow(pow(u, s.arity) as u32)?)?;
    }
    for s in sig.number_functions() {
        count = count.checked_mul(2u128.checked_pow(pow(u, s.arity) as u32)?)?;
    }
    Some(count)
}

/// The `k`-th structure with number entries in `{0, 1}`, for
/// `k < zero_one_count(sig, u)`: `k` is read as a mixed-radix numeral whose
/// last digit is the last entry of the last table.
pub fn zero_one_structure(sig: &Signature, u: usize, mut k: u128) -> RStructure {
    let mut number: Vec<Vec<Rational>> = Vec::new();
    for s in sig.number_functions().iter().rev() {
        let mut t = vec![Rational::default(); pow(u, s.arity)];
        for slot in t.iter_mut().rev() {
            *slot = rational::int((k % 2) as i64);
            k /= 2;
        }
        number.push(t);
    }
    number.reverse();
    let mut skeleton: Vec<Vec<usize>> = Vec::new();
    for s in sig.skeleton_functions().iter().rev() {
        let mut t = vec![0; pow(u, s.arity)];
        for slot in t.iter_mut().rev() {
            *slot = (k % u as u128) as usize;
            k /= u as u128;
        }
        skeleton.push(t);
    }
    skeleton.reverse();
    RStructure::new(sig.clone(), u, skeleton, number).expect("tables have the right shape")
}

/// Every `{0, 1}` structure when there are at most `limit`, else `samples`
/// random ones.
pub fn zero_one_sweep(rng: &mut GenRng, sig: &Signature, u: usize, limit: u128, samples: usize) -> Vec<RStructure> {
    match zero_one_count(sig, u) {
        Some(n) if n <= limit => (0..n).map(|k| zero_one_structure(sig, u, k)).collect(),
        _ => (0..samples).map(|_| random_structure(rng, sig, u, 0..=1)).collect(),
    }
}

/// Which aggregation rules a generated formula may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregates {
    None,
    Max,
    SumProd,
}

#[derive(Debug, Clone)]
pub struct FormulaConfig {
    pub quantifier_depth: usize,
    /// Nesting of connectives above the atoms.
    pub connective_depth: usize,
    /// Nesting of arithmetic inside number terms.
    pub term_depth: usize,
    pub constants: RangeInclusive<i64>,
    pub aggregates: Aggregates,
}

impl Default for FormulaConfig {
    fn default() -> Self {
        FormulaConfig {
            quantifier_depth: 3,
            connective_depth: 2,
            term_depth: 2,
            constants: -2..=2,
            aggregates: Aggregates::None,
        }
    }
}

struct FormulaGen<'a> {
    rng: &'a mut GenRng,
    sig: &'a Signature,
    cfg: &'a FormulaConfig,
    fresh: usize,
    scope: Vec<String>,
}

impl FormulaGen<'_> {
    fn fresh(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    fn formula(&mut self, conn: usize, quant: usize) -> Formula {
        let roll: f64 = self.rng.gen();
        if quant > 0 && (self.scope.is_empty() || roll < 0.35) {
            let x = self.fresh("x");
            self.scope.push(x.clone());
            let body = self.formula(conn, quant - 1);
            self.scope.pop();
            return if self.rng.gen_bool(0.5) {
                Formula::exists(&x, body)
            } else {
                Formula::forall(&x, body)
            };
        }
        if conn > 0 && roll < 0.7 {
            let a = self.formula(conn - 1, quant);
            if self.rng.gen_bool(0.2) {
                return Formula::not(a);
            }
            let b = self.formula(conn - 1, quant);
            return match self.rng.gen_range(0..4) {
                0 => Formula::and(a, b),
                1 => Formula::or(a, b),
                2 => Formula::implies(a, b),
                _ => Formula::iff(a, b),
            };
        }
        self.atom()
    }

    fn atom(&mut self) -> Formula {
        let skeleton_ok = !self.scope.is_empty() || self.sig.skeleton_functions().iter().any(|s| s.arity == 0);
        if skeleton_ok && !self.sig.skeleton_functions().is_empty() && self.rng.gen_bool(0.2) {
            let a = self.index(1);
            let b = self.index(1);
            return Formula::IndexEq(a, b);
        }
        let depth = self.cfg.term_depth;
        let a = self.number(depth);
        let b = self.number(depth);
        if self.rng.gen_bool(0.5) {
            Formula::NumEq(a, b)
        } else {
            Formula::NumLt(a, b)
        }
    }

    fn usable<'s>(&self, syms: &'s [Symbol]) -> Vec<&'s Symbol> {
        syms.iter().filter(|s| s.arity == 0 || !self.scope.is_empty()).collect()
    }

    fn index(&mut self, depth: usize) -> IndexTerm {
        let sig = self.sig;
        let skel = self.usable(sig.skeleton_functions());
        if self.scope.is_empty() || (depth > 0 && !skel.is_empty() && self.rng.gen_bool(0.4)) {
            let s = skel.choose(self.rng).expect("caller checked a usable symbol exists");
            let args = (0..s.arity).map(|_| self.index(depth.saturating_sub(1))).collect();
            return IndexTerm::SkeletonApp(s.name.clone(), args);
        }
        IndexTerm::Var(self.scope.choose(self.rng).expect("scope is non-empty").clone())
    }

    fn number(&mut self, depth: usize) -> NumberTerm {
        let sig = self.sig;
        let funcs = self.usable(sig.number_functions());
        let has_index = !self.scope.is_empty() || self.usable(sig.skeleton_functions()).iter().any(|s| s.arity == 0);
        let choice = if depth == 0 { self.rng.gen_range(0..2) } else { self.rng.gen_range(0..7) };
        match choice {
            1 | 2 if !funcs.is_empty() && has_index => {
                let f = *funcs.choose(self.rng).expect("non-empty");
                let args = (0..f.arity).map(|_| self.index(1)).collect();
                NumberTerm::NumApp(f.name.clone(), args)
            }
            3 => NumberTerm::add(self.number(depth - 1), self.number(depth - 1)),
            4 => NumberTerm::mul(self.number(depth - 1), self.number(depth - 1)),
            5 => {
                if self.rng.gen_bool(0.5) {
                    NumberTerm::sign(self.number(depth - 1))
                } else {
                    NumberTerm::chi(self.atom_at(depth - 1))
                }
            }
            6 if self.cfg.aggregates != Aggregates::None => {
                let v = self.fresh("i");
                self.scope.push(v.clone());
                let body = self.number(depth - 1);
                self.scope.pop();
                match self.cfg.aggregates {
                    Aggregates::Max => NumberTerm::max(&v, body),
                    _ if self.rng.gen_bool(0.5) => NumberTerm::sum(&v, body),
                    _ => NumberTerm::prod(&v, body),
                }
            }
            _ => {
                // Constants, and applications when no symbol is usable.
                if !funcs.is_empty() && has_index && self.rng.gen_bool(0.5) {
                    let f = *funcs.choose(self.rng).expect("non-empty");
                    let args = (0..f.arity).map(|_| self.index(1)).collect();
                    return NumberTerm::NumApp(f.name.clone(), args);
                }
                NumberTerm::int(self.rng.gen_range(self.cfg.constants.clone()))
            }
        }
    }

    fn atom_at(&mut self, depth: usize) -> Formula {
        let a = self.number(depth);
        let b = self.number(depth);
        if self.rng.gen_bool(0.5) {
            Formula::NumEq(a, b)
        } else {
            Formula::NumLt(a, b)
        }
    }
}

/// A random sentence over `sig`. Bound variables are named `x1, x2, ...` for
/// quantifiers and `i1, i2, ...` for aggregations, and are never reused, so
/// the result has no shadowing.
pub fn random_sentence(rng: &mut GenRng, sig: &Signature, cfg: &FormulaConfig) -> Formula {
    let mut g = FormulaGen {
        rng,
        sig,
        cfg,
        fresh: 0,
        scope: Vec::new(),
    };
    g.formula(cfg.connective_depth, cfg.quantifier_depth)
}

/// A random circuit over `inputs` input gates with `gates` further gates,
/// topped by an output gate. Every gate has a path to the output: gates left
/// without a successor are summed by one extra `+` gate. Auxiliary gate
/// types are only drawn when `aux` is set. Constants come from `-2..=2`.
pub fn random_circuit(rng: &mut GenRng, inputs: usize, gates: usize, aux: bool) -> Circuit {
    let mut c = Circuit::new(inputs);
    let mut pool: Vec<GateId> = (1..=inputs).map(|i| c.add(GateKind::Input(i), vec![])).collect();
    let mut used = vec![false; pool.len()];
    for _ in 0..gates {
        let kinds: &[GateKind] = if aux {
            &[
                GateKind::Add,
                GateKind::Mul,
                GateKind::Sign,
                GateKind::Sub,
                GateKind::Eq,
                GateKind::Lt,
                GateKind::Gt,
                GateKind::Le,
                GateKind::Ge,
            ]
        } else {
            &[GateKind::Add, GateKind::Mul, GateKind::Sign]
        };
        let (kind, arity) = if pool.len() < 2 || rng.gen_bool(0.15) {
            (GateKind::Const(rational::int(rng.gen_range(-2..=2))), 0)
        } else {
            let k = kinds.choose(rng).expect("non-empty").clone();
            let arity = match k {
                GateKind::Add | GateKind::Mul => rng.gen_range(1..=3.min(pool.len())),
                GateKind::Sign => 1,
                _ => 2,
            };
            (k, arity)
        };
        let mut picked: Vec<usize> = Vec::with_capacity(arity);
        while picked.len() < arity {
            // Favour recent gates so that circuits get some depth.
            let lo = pool.len().saturating_sub(6);
            let k = if rng.gen_bool(0.6) { rng.gen_range(lo..pool.len()) } else { rng.gen_range(0..pool.len()) };
            if !picked.contains(&k) {
                picked.push(k);
            }
        }
        let preds: Vec<GateId> = picked
            .into_iter()
            .map(|k| {
                used[k] = true;
                pool[k]
            })
            .collect();
        pool.push(c.add(kind, preds));
        used.push(false);
    }
    let sinks: Vec<GateId> = pool.iter().zip(&used).filter(|(_, &u)| !u).map(|(&g, _)| g).collect();
    let top = match sinks.as_slice() {
        [one] => *one,
        _ => c.add(GateKind::Add, sinks),
    };
    c.add(GateKind::Output, vec![top]);
    c
}

/// Rationals with numerator in `-5..=5` and denominator in `1..=3`.
pub fn random_rationals(rng: &mut GenRng, n: usize) -> Vec<Rational> {
    (0..n)
        .map(|_| Rational::new(rng.gen_range(-5..=5).into(), rng.gen_range(1..=3).into()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        let sig = Signature::numbers(&[("f", 1), ("g", 2)]).unwrap();
        let cfg = FormulaConfig::default();
        let a = random_sentence(&mut rng(7), &sig, &cfg);
        let b = random_sentence(&mut rng(7), &sig, &cfg);
        assert_eq!(a, b);
        assert_eq!(random_structure(&mut rng(3), &sig, 3, -2..=2), random_structure(&mut rng(3), &sig, 3, -2..=2));
    }

    #[test]
    fn sentences_are_closed_and_unshadowed() {
        let sig = Signature::parse("skeleton s/1\nnumber f/2\nnumber g/0\n").unwrap();
        let mut r = rng(1);
        for aggregates in [Aggregates::None, Aggregates::Max, Aggregates::SumProd] {
            let cfg = FormulaConfig {
                aggregates,
                ..FormulaConfig::default()
            };
            for _ in 0..200 {
                let phi = random_sentence(&mut r, &sig, &cfg);
                assert!(phi.is_sentence(), "{phi:?}");
                assert_eq!(phi.find_shadowing(), None);
                phi.check(&sig).unwrap();
            }
        }
    }

    #[test]
    fn zero_one_enumeration_is_exhaustive() {
        let sig = Signature::parse("skeleton s/1\nnumber f/1\n").unwrap();
        let n = zero_one_count(&sig, 2).unwrap();
        assert_eq!(n, 16);
        let all: std::collections::HashSet<String> = (0..n).map(|k| zero_one_structure(&sig, 2, k).to_text()).collect();
        assert_eq!(all.len(), 16);
    }

    #[test]
    fn circuits_are_valid_and_connected() {
        let mut r = rng(5);
        for _ in 0..100 {
            let c = random_circuit(&mut r, 3, 20, true);
            assert_eq!(c.validate(), Ok(()));
            let reach = c.induced_subcircuit(c.outputs()[0]).unwrap();
            assert_eq!(reach.size(), c.size());
        }
    }
}
