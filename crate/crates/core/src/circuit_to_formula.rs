//! From a normalized circuit back to an FO_R[Arb] sentence.
//!
//! Gates are identified with `q`-tuples over the universe. The circuit is
//! described by four auxiliary tables: `t(v)` (gate type), `c(v)` (constant
//! value), `in(v, i)` (1 iff `v` is the input gate reading `f(i)`) and
//! `pred(v, w)` (1 iff `w` is a predecessor of `v`). The number term `val_x`
//! yields the value of any gate at level `x`, where the level of a gate is
//! its distance from the input gates.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, GateId, GateKind};
use crate::logic::{AuxKind, AuxSymbol, Formula, IndexTerm, NumberTerm, Signature};
use crate::rational::{self, Rational};
use crate::structure::{lex_index, lex_tuple, ArbInterpretation, Table};

/// Name of the unary number function holding the circuit inputs.
pub const INPUT_SYMBOL: &str = "f";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReverseError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("expected at most one output gate, found {0}")]
    OutputCount(usize),
    #[error("gate {0} has a type outside 1..6")]
    AuxGate(GateId),
    #[error("circuit is not tree-like")]
    NotTreeLike,
    #[error("input gates are not all at distance {depth} from the output")]
    NotLeveled { depth: usize },
    #[error("gate {0} lists the same predecessor twice")]
    RepeatedPredecessor(GateId),
    #[error("{inputs} input gates do not fit a universe of size {u}")]
    TooManyInputs { inputs: usize, u: usize },
    #[error("{size} gates do not fit into tuples over a universe of size {u}")]
    TooManyGates { size: usize, u: usize },
}

/// Descriptor tables of one circuit for one universe size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyDescriptor {
    pub u: usize,
    pub q: usize,
    pub d: usize,
    pub t: Table,
    pub c: Table,
    pub input: Table,
    pub pred: Table,
    /// Tuple assigned to each gate.
    pub tuples: BTreeMap<GateId, Vec<usize>>,
}

impl FamilyDescriptor {
    /// The tables as an interpretation of the symbols `t`, `c`, `in`, `pred`.
    pub fn arb(&self) -> ArbInterpretation {
        let mut arb = ArbInterpretation::new();
        arb.insert("t", self.t.clone());
        arb.insert("c", self.c.clone());
        arb.insert("in", self.input.clone());
        arb.insert("pred", self.pred.clone());
        arb
    }

    /// `{f/1}` extended with the descriptor symbols.
    pub fn signature(&self) -> Signature {
        let q = self.q;
        Signature::numbers(&[(INPUT_SYMBOL, 1)])
            .and_then(|s| {
                s.with_aux([
                    AuxSymbol::new("t", q, AuxKind::Number),
                    AuxSymbol::new("c", q, AuxKind::Number),
                    AuxSymbol::new("in", q + 1, AuxKind::Number),
                    AuxSymbol::new("pred", 2 * q, AuxKind::Number),
                ])
            })
            .expect("fixed names are distinct")
    }
}

/// Smallest `q >= 1` with `u^q >= size`.
fn tuple_arity(size: usize, u: usize) -> Option<usize> {
    let mut q = 1;
    let mut cap = u;
    while cap < size {
        if u <= 1 {
            return None;
        }
        cap = cap.checked_mul(u)?;
        q += 1;
    }
    Some(q)
}

pub fn descriptor_from_circuit(circuit: &Circuit, u: usize) -> Result<FamilyDescriptor, ReverseError> {
    circuit.validate().map_err(|v| CircuitError::Invalid(v))?;
    let outputs = circuit.outputs();
    if outputs.len() > 1 {
        return Err(ReverseError::OutputCount(outputs.len()));
    }
    for g in circuit.gates() {
        if g.kind.is_auxiliary() {
            return Err(ReverseError::AuxGate(g.id));
        }
        let mut preds = g.preds.clone();
        preds.sort_unstable();
        if preds.windows(2).any(|w| w[0] == w[1]) {
            return Err(ReverseError::RepeatedPredecessor(g.id));
        }
    }
    if !circuit.is_tree_like()? {
        return Err(ReverseError::NotTreeLike);
    }
    let d = circuit.depth()?;
    if let Some(out) = outputs.first() {
        match circuit.input_path_lengths()[out] {
            Some((lo, hi)) if lo != d || hi != d => return Err(ReverseError::NotLeveled { depth: d }),
            _ => {}
        }
    }
    if circuit.input_count > u {
        return Err(ReverseError::TooManyInputs {
            inputs: circuit.input_count,
            u,
        });
    }
    let size = circuit.size();
    let too_many = ReverseError::TooManyGates { size, u };
    let q = tuple_arity(size, u).ok_or(too_many.clone())?;
    let cells = u.checked_pow(q as u32).ok_or(too_many.clone())?;
    let pairs = cells.checked_mul(cells).ok_or(too_many)?;

    let tuples: BTreeMap<GateId, Vec<usize>> = circuit
        .ids()
        .enumerate()
        .map(|(k, id)| (id, lex_tuple(k, u, q)))
        .collect();
    let zero = Rational::zero();
    let mut t = Table::sparse(q, cells, zero.clone());
    let mut c = Table::sparse(q, cells, zero.clone());
    let mut input = Table::sparse(q + 1, cells * u, zero.clone());
    let mut pred = Table::sparse(2 * q, pairs, zero);
    for g in circuit.gates() {
        let v = &tuples[&g.id];
        let iv = lex_index(v, u);
        t.set(iv, rational::int(g.kind.code() as i64));
        match &g.kind {
            GateKind::Const(value) => c.set(iv, value.clone()),
            GateKind::Input(i) => input.set(iv * u + (i - 1), Rational::one()),
            _ => {}
        }
        for p in &g.preds {
            pred.set(iv * cells + lex_index(&tuples[p], u), Rational::one());
        }
    }
    Ok(FamilyDescriptor {
        u,
        q,
        d,
        t,
        c,
        input,
        pred,
        tuples,
    })
}

/// Coordinate variables of `val_x`.
pub fn level_vars(x: usize, q: usize) -> Vec<String> {
    (1..=q).map(|k| format!("v{x}_{k}")).collect()
}

fn vars(names: &[String]) -> Vec<IndexTerm> {
    names.iter().map(|n| IndexTerm::var(n)).collect()
}

fn table(name: &str, args: Vec<IndexTerm>) -> NumberTerm {
    NumberTerm::aux(name, args)
}

fn is_type(v: &[String], k: i64) -> NumberTerm {
    NumberTerm::chi(Formula::NumEq(table("t", vars(v)), NumberTerm::int(k)))
}

/// `sum w1 ... sum wq (body)` or the product form.
fn nest(w: &[String], body: NumberTerm, product: bool) -> NumberTerm {
    w.iter().rev().fold(body, |acc, x| {
        if product {
            NumberTerm::prod(x, acc)
        } else {
            NumberTerm::sum(x, acc)
        }
    })
}

/// `val_0, ..., val_d`; `val_x` has free variables `level_vars(x, q)`.
pub fn build_val_terms(desc: &FamilyDescriptor) -> Vec<NumberTerm> {
    let q = desc.q;
    let v0 = level_vars(0, q);
    let mut in_args = vars(&v0);
    in_args.push(IndexTerm::var("i"));
    let mut val = NumberTerm::add(
        NumberTerm::sum(
            "i",
            NumberTerm::mul(table("in", in_args), NumberTerm::app(INPUT_SYMBOL, vec![IndexTerm::var("i")])),
        ),
        NumberTerm::mul(is_type(&v0, 2), table("c", vars(&v0))),
    );
    let mut out = vec![val.clone()];
    for x in 1..=desc.d {
        let v = level_vars(x, q);
        let w = level_vars(x - 1, q);
        let mut pw = vars(&v);
        pw.extend(vars(&w));
        let edge = table("pred", pw);
        let gated = NumberTerm::mul(edge.clone(), val.clone());
        let t3 = nest(&w, gated.clone(), false);
        let t4 = nest(
            &w,
            NumberTerm::add(gated, NumberTerm::add(NumberTerm::int(1), NumberTerm::mul(NumberTerm::int(-1), edge.clone()))),
            true,
        );
        let t5 = nest(&w, NumberTerm::mul(edge, NumberTerm::sign(val.clone())), false);
        let branches = [
            (2, table("c", vars(&v))),
            (3, t3.clone()),
            (4, t4),
            (5, t5),
            (6, t3),
        ];
        val = branches
            .into_iter()
            .map(|(k, term)| NumberTerm::mul(is_type(&v, k), term))
            .reduce(NumberTerm::add)
            .expect("five branches");
        out.push(val.clone());
    }
    out
}

/// `forall v (t(v) = 6 -> val_d(v) = 1)`.
pub fn build_sentence(desc: &FamilyDescriptor) -> Formula {
    let v = level_vars(desc.d, desc.q);
    let val = build_val_terms(desc).pop().expect("val_0 always exists");
    let body = Formula::implies(
        Formula::NumEq(table("t", vars(&v)), NumberTerm::int(6)),
        Formula::NumEq(val, NumberTerm::int(1)),
    );
    v.iter().rev().fold(body, |acc, x| Formula::forall(x, acc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::three_input_example;
    use crate::compiler::compile;
    use crate::logic::parse_formula;
    use crate::model_checker::{eval_number_term, holds, satisfies, Assignment};
    use crate::normalize::{eliminate_aux_gates, level_paths, make_tree_like};
    use crate::structure::{pow, tuples, RStructure};

    fn normalized(c: &Circuit) -> Circuit {
        level_paths(&make_tree_like(&eliminate_aux_gates(c).unwrap()).unwrap()).unwrap()
    }

    fn structure(sig: &Signature, u: usize, f: &[usize]) -> RStructure {
        let sig = Signature::numbers(&[(INPUT_SYMBOL, 1)]).unwrap().with_aux(sig.aux_symbols().to_vec()).unwrap();
        RStructure::new(sig, u, vec![], vec![f.iter().map(|&x| rational::from_usize(x)).collect()]).unwrap()
    }

    #[test]
    fn three_input_tables() {
        let c = normalized(&three_input_example());
        let desc = descriptor_from_circuit(&c, 4).unwrap();
        assert!(pow(4, desc.q) >= c.size() && pow(4, desc.q - 1) < c.size());
        let edges: usize = c.gates().map(|g| g.preds.len()).sum();
        let ones = desc.pred.values().filter(|x| x.is_one()).count();
        assert_eq!(ones, edges);
        assert_eq!(desc.d, c.depth().unwrap());
    }

    #[test]
    fn base_u_identification() {
        let desc = descriptor_from_circuit(&three_input_example(), 3).unwrap();
        assert_eq!(desc.q, 2);
        let got: Vec<Vec<usize>> = desc.tuples.values().cloned().collect();
        let expected: Vec<Vec<usize>> = (0..7).map(|k| vec![k / 3, k % 3]).collect();
        assert_eq!(got, expected);
        assert_eq!(desc.t.len(), 9);
        assert!(desc.t.get(7).unwrap().is_zero() && desc.t.get(8).unwrap().is_zero());
    }

    #[test]
    fn rejects_bad_shapes() {
        let mut c = three_input_example();
        c.add(GateKind::Output, vec![5]);
        assert_eq!(descriptor_from_circuit(&c, 3).unwrap_err(), ReverseError::OutputCount(2));
        assert!(matches!(descriptor_from_circuit(&three_input_example(), 2), Err(ReverseError::TooManyInputs { .. })));
        assert!(matches!(
            descriptor_from_circuit(&normalized(&three_input_example()), 1),
            Err(ReverseError::TooManyInputs { .. })
        ));
        let mut sub = Circuit::new(1);
        let x = sub.add(GateKind::Input(1), vec![]);
        let k = sub.add(GateKind::Const(rational::int(2)), vec![]);
        let s = sub.add(GateKind::Sub, vec![x, k]);
        sub.add(GateKind::Output, vec![s]);
        assert_eq!(descriptor_from_circuit(&sub, 2).unwrap_err(), ReverseError::AuxGate(s));
        let mut one = Circuit::new(1);
        let x = one.add(GateKind::Input(1), vec![]);
        one.add(GateKind::Output, vec![x]);
        assert!(matches!(descriptor_from_circuit(&one, 1), Err(ReverseError::TooManyGates { size: 2, u: 1 })));
    }

    #[test]
    fn three_input_is_already_normal() {
        let desc = descriptor_from_circuit(&three_input_example(), 3).unwrap();
        assert_eq!(desc.d, 3);
    }

    #[test]
    fn level_values_match_gate_values() {
        let c = normalized(&three_input_example());
        let u = 3;
        let desc = descriptor_from_circuit(&c, u).unwrap();
        let vals = build_val_terms(&desc);
        let arb = desc.arb();
        let sig = desc.signature();
        let levels = c.input_path_lengths();
        let ev = c.evaluator().unwrap();
        for f in tuples(u, 3) {
            let d = structure(&sig, u, &f);
            let gate_values = ev.eval_all(&d.encode()).unwrap();
            for g in c.gates() {
                let Some((x, _)) = levels[&g.id] else { continue };
                let a: Assignment = level_vars(x, desc.q).iter().map(|s| s.as_str()).zip(desc.tuples[&g.id].iter().copied()).collect();
                let got = eval_number_term(&vals[x], &d, &arb, &a).unwrap();
                assert_eq!(got, gate_values[&g.id], "gate {} at level {x}", g.id);
            }
        }
    }

    #[test]
    fn round_trip_small_sentences() {
        let sig = Signature::numbers(&[(INPUT_SYMBOL, 1)]).unwrap();
        for (src, top) in [("exists x. f(x) = 1", 3), ("exists x. forall y. !(f(x) < f(y))", 2)] {
            let phi = parse_formula(src, &sig).unwrap();
            for u in 2..=top {
                let c = normalized(&compile(&phi, &sig, u, &ArbInterpretation::new()).unwrap());
                let desc = descriptor_from_circuit(&c, u).unwrap();
                let psi = build_sentence(&desc);
                let arb = desc.arb();
                let rsig = desc.signature();
                for f in tuples(2, u) {
                    let d = structure(&rsig, u, &f);
                    let plain = structure(&sig, u, &f);
                    assert_eq!(
                        satisfies(&psi, &d, &arb, &Assignment::new()).unwrap(),
                        holds(&phi, &plain).unwrap(),
                        "{src} u={u} f={f:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn constant_circuits() {
        let mut yes = Circuit::new(0);
        let k = yes.add(GateKind::Const(rational::int(1)), vec![]);
        yes.add(GateKind::Output, vec![k]);
        let desc = descriptor_from_circuit(&yes, 2).unwrap();
        let sig = desc.signature();
        for f in tuples(2, 2) {
            let d = structure(&sig, 2, &f);
            assert!(satisfies(&build_sentence(&desc), &d, &desc.arb(), &Assignment::new()).unwrap());
        }
        let mut desc = desc;
        let out = lex_index(&desc.tuples[&yes.outputs()[0]], 2);
        desc.t.set(out, Rational::zero());
        let d = structure(&desc.signature(), 2, &[0, 0]);
        assert!(satisfies(&build_sentence(&desc), &d, &desc.arb(), &Assignment::new()).unwrap());
    }
}
