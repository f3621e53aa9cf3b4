//! Circuit-to-circuit passes: lowering the auxiliary gates to types 1..=6,
//! unsharing non-input gates, and padding input edges so every gate sits at a
//! single level.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, GateId, GateKind};
use crate::rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("circuit is not tree-like")]
    NotTreeLike,
    #[error("expected exactly one output gate, found {0}")]
    OutputCount(usize),
    #[error("gate {0} has no path to the output")]
    Disconnected(GateId),
}

/// One lowered gate: its id, original kind, and how many gates the rewrite
/// added (the gate itself keeps its id as the top of the replacement).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxRewrite {
    pub gate: GateId,
    pub kind: GateKind,
    pub added: usize,
}

fn lower(c: &mut Circuit, id: GateId, kind: &GateKind, p1: GateId, p2: GateId) -> usize {
    let before = c.size();
    let int = |v: i64| GateKind::Const(rational::int(v));
    match kind {
        GateKind::Le | GateKind::Ge => {
            let strict = if *kind == GateKind::Le { GateKind::Lt } else { GateKind::Gt };
            let s = c.add(strict, vec![p1, p2]);
            let e = c.add(GateKind::Eq, vec![p1, p2]);
            let sum = c.add(GateKind::Add, vec![s, e]);
            c.replace(id, GateKind::Sign, vec![sum]);
        }
        GateKind::Eq => {
            // sign(sign(-(p1 - p2)^2) + 1); the two unary + gates pass the
            // difference through to the squaring product.
            let diff = c.add(GateKind::Sub, vec![p1, p2]);
            let a = c.add(GateKind::Add, vec![diff]);
            let b = c.add(GateKind::Add, vec![diff]);
            let square = c.add(GateKind::Mul, vec![a, b]);
            let zero = c.add(int(0), vec![]);
            let neg = c.add(GateKind::Sub, vec![zero, square]);
            let s = c.add(GateKind::Sign, vec![neg]);
            let one = c.add(int(1), vec![]);
            let shifted = c.add(GateKind::Add, vec![one, s]);
            c.replace(id, GateKind::Sign, vec![shifted]);
        }
        GateKind::Lt | GateKind::Gt => {
            let (a, b) = if *kind == GateKind::Lt { (p1, p2) } else { (p2, p1) };
            let diff = c.add(GateKind::Sub, vec![a, b]);
            let s = c.add(GateKind::Sign, vec![diff]);
            let one = c.add(int(1), vec![]);
            let shifted = c.add(GateKind::Add, vec![one, s]);
            let nonneg = c.add(GateKind::Sign, vec![shifted]);
            let one_again = c.add(int(1), vec![]);
            c.replace(id, GateKind::Sub, vec![one_again, nonneg]);
        }
        GateKind::Sub => {
            let minus_one = c.add(int(-1), vec![]);
            let m = c.add(GateKind::Mul, vec![minus_one, p2]);
            c.replace(id, GateKind::Add, vec![p1, m]);
        }
        _ => unreachable!("only auxiliary gates are lowered"),
    }
    c.size() - before
}

/// [`eliminate_aux_gates`], also reporting every individual rewrite in the
/// order applied.
pub fn eliminate_aux_gates_traced(c: &Circuit) -> Result<(Circuit, Vec<AuxRewrite>), NormalizeError> {
    c.validate().map_err(CircuitError::Invalid)?;
    let mut out = c.clone();
    let mut log = Vec::new();
    let rounds: [&[GateKind]; 4] = [
        &[GateKind::Le, GateKind::Ge],
        &[GateKind::Eq],
        &[GateKind::Lt, GateKind::Gt],
        &[GateKind::Sub],
    ];
    for kinds in rounds {
        let targets: Vec<(GateId, GateKind, GateId, GateId)> = out
            .gates()
            .filter(|g| kinds.contains(&g.kind))
            .map(|g| (g.id, g.kind.clone(), g.preds[0], g.preds[1]))
            .collect();
        for (id, kind, p1, p2) in targets {
            let added = lower(&mut out, id, &kind, p1, p2);
            log.push(AuxRewrite { gate: id, kind, added });
        }
    }
    Ok((out, log))
}

/// Rewrites `<=, >=`, then `=`, then `<, >`, then `-` into gates of types
/// 1..=6 only, computing the same function.
pub fn eliminate_aux_gates(c: &Circuit) -> Result<Circuit, NormalizeError> {
    Ok(eliminate_aux_gates_traced(c)?.0)
}

fn successor_lists(c: &Circuit) -> BTreeMap<GateId, Vec<GateId>> {
    let mut succ: BTreeMap<GateId, Vec<GateId>> = c.ids().map(|id| (id, Vec::new())).collect();
    for g in c.gates() {
        for &p in &g.preds {
            succ.get_mut(&p).expect("validated").push(g.id);
        }
    }
    for list in succ.values_mut() {
        list.sort_unstable();
    }
    succ
}

/// Copies the gates above `root`, except input gates, which stay shared.
/// Returns the id of the copy of `root`.
fn copy_subtree(c: &mut Circuit, root: GateId, memo: &mut HashMap<GateId, GateId>) -> GateId {
    if let Some(&id) = memo.get(&root) {
        return id;
    }
    let g = c.gate(root).expect("exists").clone();
    if matches!(g.kind, GateKind::Input(_)) {
        return root;
    }
    let preds = g.preds.iter().map(|&p| copy_subtree(c, p, memo)).collect();
    let id = c.add(g.kind, preds);
    memo.insert(root, id);
    id
}

/// Duplicates shared non-input gates until each has at most one successor.
/// Shared gates are handled in increasing id order, each once its own
/// subcircuit has no other shared gate: every successor connection beyond
/// the first (by successor id) gets a fresh copy of that subcircuit.
pub fn make_tree_like(c: &Circuit) -> Result<Circuit, NormalizeError> {
    c.validate().map_err(CircuitError::Invalid)?;
    let mut out = c.clone();
    loop {
        let succ = successor_lists(&out);
        let is_shared = |id: GateId| {
            let g = out.gate(id).expect("exists");
            !matches!(g.kind, GateKind::Input(_)) && succ[&id].len() > 1
        };
        // Whether some gate strictly above (closer to the inputs) is shared.
        let mut shared_above: HashMap<GateId, bool> = HashMap::new();
        for id in out.topo_order().expect("validated") {
            let above = out
                .gate(id)
                .expect("exists")
                .preds
                .iter()
                .any(|&p| is_shared(p) || shared_above[&p]);
            shared_above.insert(id, above);
        }
        let picks: Vec<GateId> = out.ids().filter(|&g| is_shared(g) && !shared_above[&g]).collect();
        if picks.is_empty() {
            return Ok(out);
        }
        // The picked subcircuits are disjoint apart from input gates, so
        // handling them in one sweep equals handling them one per round.
        for g in picks {
            for &s in &succ[&g][1..] {
                let copy = copy_subtree(&mut out, g, &mut HashMap::new());
                let gate = out.gate(s).expect("exists").clone();
                let preds = gate.preds.iter().map(|&p| if p == g { copy } else { p }).collect();
                out.replace(s, gate.kind, preds);
            }
        }
    }
}

/// Pads every edge leaving an input gate with unary `+` gates so that each
/// input-to-output path has length `depth(C)`. The circuit must be tree-like
/// with one output that every non-input gate reaches.
pub fn level_paths(c: &Circuit) -> Result<Circuit, NormalizeError> {
    if !c.is_tree_like()? {
        return Err(NormalizeError::NotTreeLike);
    }
    let outputs = c.outputs();
    if outputs.len() != 1 {
        return Err(NormalizeError::OutputCount(outputs.len()));
    }
    let depth = c.depth()?;
    let succ = successor_lists(c);
    // Distance to the output along the unique downward path.
    let mut to_out: HashMap<GateId, usize> = HashMap::new();
    let order = c.topo_order().expect("validated");
    for &id in order.iter().rev() {
        let g = c.gate(id).expect("exists");
        if matches!(g.kind, GateKind::Input(_)) {
            continue;
        }
        let d = match (g.kind == GateKind::Output, succ[&id].first()) {
            (true, _) => 0,
            (false, Some(s)) => to_out[s] + 1,
            (false, None) => return Err(NormalizeError::Disconnected(id)),
        };
        to_out.insert(id, d);
    }
    let mut out = c.clone();
    for g in c.gates() {
        if !matches!(g.kind, GateKind::Input(_)) {
            continue;
        }
        for &s in &succ[&g.id] {
            let pads = depth - 1 - to_out[&s];
            if pads == 0 {
                continue;
            }
            let mut last = g.id;
            for _ in 0..pads {
                last = out.add(GateKind::Add, vec![last]);
            }
            let gate = out.gate(s).expect("exists").clone();
            let preds = gate.preds.iter().map(|&p| if p == g.id { last } else { p }).collect();
            out.replace(s, gate.kind, preds);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::three_input_example;
    use crate::rational::{self, Rational};

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rational::int(x)).collect()
    }

    fn binary(kind: GateKind) -> Circuit {
        let mut c = Circuit::new(2);
        let a = c.add(GateKind::Input(1), vec![]);
        let b = c.add(GateKind::Input(2), vec![]);
        let g = c.add(kind, vec![a, b]);
        c.add(GateKind::Output, vec![g]);
        c
    }

    #[test]
    fn equality_gate() {
        let c = binary(GateKind::Eq);
        let (out, log) = eliminate_aux_gates_traced(&c).unwrap();
        assert_eq!(log[0], AuxRewrite { gate: 3, kind: GateKind::Eq, added: 9 });
        assert!(out.gates().all(|g| g.kind.code() <= 6));
        assert_eq!(out.evaluate(&ints(&[3, 3])), Ok(ints(&[1])));
        assert_eq!(out.evaluate(&ints(&[3, -3])), Ok(ints(&[0])));
    }

    #[test]
    fn less_than_gate() {
        let (out, log) = eliminate_aux_gates_traced(&binary(GateKind::Lt)).unwrap();
        assert_eq!(log[0].added, 6);
        assert_eq!(out.evaluate(&ints(&[2, 5])), Ok(ints(&[1])));
        assert_eq!(out.evaluate(&ints(&[5, 2])), Ok(ints(&[0])));
        assert_eq!(out.evaluate(&ints(&[5, 5])), Ok(ints(&[0])));
    }

    #[test]
    fn per_kind_deltas() {
        for (kind, first) in [
            (GateKind::Sub, 2),
            (GateKind::Eq, 9),
            (GateKind::Lt, 6),
            (GateKind::Gt, 6),
            (GateKind::Le, 3),
            (GateKind::Ge, 3),
        ] {
            let c = binary(kind.clone());
            let (out, log) = eliminate_aux_gates_traced(&c).unwrap();
            assert_eq!(log[0].kind, kind);
            assert_eq!(log[0].added, first);
            let total: usize = log.iter().map(|r| r.added).sum();
            assert_eq!(out.size(), c.size() + total);
            for (x, y) in [(1, 2), (2, 1), (2, 2), (-3, 0)] {
                assert_eq!(out.evaluate(&ints(&[x, y])), c.evaluate(&ints(&[x, y])), "{kind:?}");
            }
        }
    }

    #[test]
    fn lowered_circuit_is_unchanged() {
        let c = three_input_example();
        assert_eq!(eliminate_aux_gates(&c).unwrap(), c);
        assert_eq!(make_tree_like(&c).unwrap(), c);
        assert_eq!(level_paths(&c).unwrap(), c);
    }

    #[test]
    fn diamond_is_unshared() {
        let mut c = Circuit::new(2);
        let x = c.add(GateKind::Input(1), vec![]);
        let y = c.add(GateKind::Input(2), vec![]);
        let g = c.add(GateKind::Mul, vec![x, y]);
        let a = c.add(GateKind::Add, vec![g, x]);
        let b = c.add(GateKind::Sign, vec![g]);
        let top = c.add(GateKind::Mul, vec![a, b]);
        c.add(GateKind::Output, vec![top]);
        let t = make_tree_like(&c).unwrap();
        assert_eq!(t.is_tree_like(), Ok(true));
        assert_eq!(t.size(), c.size() + 1);
        assert_eq!(t.depth(), c.depth());
        for (p, q) in [(1, 2), (-2, 3), (0, 5), (4, -1)] {
            assert_eq!(t.evaluate(&ints(&[p, q])), c.evaluate(&ints(&[p, q])));
        }
    }

    #[test]
    fn shortcut_gets_padding() {
        // x1 -> sign -> sign -> sign -> + -> out, with x2 also feeding +.
        let mut c = Circuit::new(2);
        let x = c.add(GateKind::Input(1), vec![]);
        let y = c.add(GateKind::Input(2), vec![]);
        let s1 = c.add(GateKind::Sign, vec![x]);
        let s2 = c.add(GateKind::Sign, vec![s1]);
        let s3 = c.add(GateKind::Sign, vec![s2]);
        let top = c.add(GateKind::Add, vec![s3, y]);
        c.add(GateKind::Output, vec![top]);
        assert_eq!(c.depth(), Ok(5));
        let l = level_paths(&c).unwrap();
        assert_eq!(l.size(), c.size() + 3);
        assert_eq!(l.is_leveled(), Ok(true));
        assert_eq!(l.depth(), Ok(5));
        assert_eq!(l.evaluate(&ints(&[-4, 7])), c.evaluate(&ints(&[-4, 7])));
    }

    #[test]
    fn level_requires_tree_like() {
        let mut c = Circuit::new(1);
        let x = c.add(GateKind::Input(1), vec![]);
        let s = c.add(GateKind::Sign, vec![x]);
        let top = c.add(GateKind::Add, vec![s]);
        let m = c.add(GateKind::Mul, vec![s, top]);
        c.add(GateKind::Output, vec![m]);
        assert_eq!(level_paths(&c), Err(NormalizeError::NotTreeLike));
    }
}
