//! Arithmetic circuits over Q: gates numbered by `u64` ids, unbounded fan-in
//! `+` and `*`, sign, and the auxiliary comparison/subtraction gates.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write};

use num_traits::{One, Zero};
use thiserror::Error;

use crate::rational::{self, Rational};

pub type GateId = u64;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GateKind {
    /// Reads input `k` (1-based).
    Input(usize),
    Const(Rational),
    Add,
    Mul,
    Sign,
    Output,
    Sub,
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
}

pub const TYPE_NAMES: [&str; 12] = [
    "input", "const", "add", "mul", "sign", "output", "sub", "eq", "lt", "gt", "le", "ge",
];

impl GateKind {
    /// Type code 1..=12.
    pub fn code(&self) -> u8 {
        match self {
            GateKind::Input(_) => 1,
            GateKind::Const(_) => 2,
            GateKind::Add => 3,
            GateKind::Mul => 4,
            GateKind::Sign => 5,
            GateKind::Output => 6,
            GateKind::Sub => 7,
            GateKind::Eq => 8,
            GateKind::Lt => 9,
            GateKind::Gt => 10,
            GateKind::Le => 11,
            GateKind::Ge => 12,
        }
    }

    pub fn name(&self) -> &'static str {
        TYPE_NAMES[self.code() as usize - 1]
    }

    /// Kinds without payload, by name.
    pub fn from_plain_name(name: &str) -> Option<GateKind> {
        Some(match name {
            "add" => GateKind::Add,
            "mul" => GateKind::Mul,
            "sign" => GateKind::Sign,
            "output" => GateKind::Output,
            "sub" => GateKind::Sub,
            "eq" => GateKind::Eq,
            "lt" => GateKind::Lt,
            "gt" => GateKind::Gt,
            "le" => GateKind::Le,
            "ge" => GateKind::Ge,
            _ => return None,
        })
    }

    pub fn is_source(&self) -> bool {
        matches!(self, GateKind::Input(_) | GateKind::Const(_))
    }

    /// Codes 7..=12.
    pub fn is_auxiliary(&self) -> bool {
        self.code() >= 7
    }

    /// Allowed number of predecessors: `(min, max)`.
    pub fn indegree(&self) -> (usize, Option<usize>) {
        match self {
            GateKind::Input(_) | GateKind::Const(_) => (0, Some(0)),
            GateKind::Sign | GateKind::Output => (1, Some(1)),
            GateKind::Add | GateKind::Mul => (1, None),
            _ => (2, Some(2)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub id: GateId,
    pub kind: GateKind,
    pub preds: Vec<GateId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Indegree { gate: GateId, found: usize },
    DuplicatePredecessor { gate: GateId, pred: GateId },
    MissingPredecessor { gate: GateId, pred: GateId },
    Cycle { gate: GateId },
    InputIndex { gate: GateId, index: usize },
    DuplicateInput { gate: GateId, index: usize },
    MissingInput { index: usize },
    NoOutput,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Indegree { gate, found } => write!(f, "gate {gate}: wrong indegree {found}"),
            Violation::DuplicatePredecessor { gate, pred } => write!(f, "gate {gate}: predecessor {pred} listed twice"),
            Violation::MissingPredecessor { gate, pred } => write!(f, "gate {gate}: predecessor {pred} does not exist"),
            Violation::Cycle { gate } => write!(f, "gate {gate}: lies on a cycle"),
            Violation::InputIndex { gate, index } => write!(f, "gate {gate}: input index {index} out of range"),
            Violation::DuplicateInput { gate, index } => write!(f, "gate {gate}: input index {index} used twice"),
            Violation::MissingInput { index } => write!(f, "no gate reads input {index}"),
            Violation::NoOutput => write!(f, "circuit has no output gate"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("invalid circuit: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("expected {expected} inputs, got {found}")]
    InputLength { expected: usize, found: usize },
    #[error("no gate with id {0}")]
    UnknownGate(GateId),
    #[error("gate id {0} is already used")]
    DuplicateId(GateId),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Circuit {
    pub input_count: usize,
    gates: BTreeMap<GateId, Gate>,
}

impl Circuit {
    pub fn new(input_count: usize) -> Self {
        Circuit {
            input_count,
            gates: BTreeMap::new(),
        }
    }

    /// Adds a gate with the next free id (one above the current maximum).
    pub fn add(&mut self, kind: GateKind, preds: Vec<GateId>) -> GateId {
        let id = self.next_id();
        self.gates.insert(id, Gate { id, kind, preds });
        id
    }

    pub fn insert(&mut self, id: GateId, kind: GateKind, preds: Vec<GateId>) -> Result<(), CircuitError> {
        if self.gates.contains_key(&id) {
            return Err(CircuitError::DuplicateId(id));
        }
        self.gates.insert(id, Gate { id, kind, preds });
        Ok(())
    }

    /// Overwrites (or creates) gate `id`.
    pub fn replace(&mut self, id: GateId, kind: GateKind, preds: Vec<GateId>) {
        self.gates.insert(id, Gate { id, kind, preds });
    }

    pub fn remove(&mut self, id: GateId) -> Option<Gate> {
        self.gates.remove(&id)
    }

    pub fn next_id(&self) -> GateId {
        self.gates.keys().next_back().map_or(1, |&m| m + 1)
    }

    pub fn gate(&self, id: GateId) -> Option<&Gate> {
        self.gates.get(&id)
    }

    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.gates.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = GateId> + '_ {
        self.gates.keys().copied()
    }

    pub fn contains(&self, id: GateId) -> bool {
        self.gates.contains_key(&id)
    }

    /// Output gates in id order.
    pub fn outputs(&self) -> Vec<GateId> {
        self.gates
            .values()
            .filter(|g| g.kind == GateKind::Output)
            .map(|g| g.id)
            .collect()
    }

    pub fn input_gate(&self, index: usize) -> Option<GateId> {
        self.gates
            .values()
            .find(|g| g.kind == GateKind::Input(index))
            .map(|g| g.id)
    }

    pub fn successors(&self) -> HashMap<GateId, Vec<GateId>> {
        let mut succ: HashMap<GateId, Vec<GateId>> = self.gates.keys().map(|&id| (id, Vec::new())).collect();
        for g in self.gates.values() {
            for p in &g.preds {
                if let Some(list) = succ.get_mut(p) {
                    list.push(g.id);
                }
            }
        }
        succ
    }

    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        let mut seen_inputs: HashMap<usize, GateId> = HashMap::new();
        for g in self.gates.values() {
            let (lo, hi) = g.kind.indegree();
            let n = g.preds.len();
            if n < lo || hi.is_some_and(|h| n > h) {
                out.push(Violation::Indegree { gate: g.id, found: n });
            }
            let mut set = BTreeSet::new();
            for &p in &g.preds {
                if !set.insert(p) {
                    out.push(Violation::DuplicatePredecessor { gate: g.id, pred: p });
                }
                if !self.gates.contains_key(&p) {
                    out.push(Violation::MissingPredecessor { gate: g.id, pred: p });
                }
            }
            if let GateKind::Input(k) = g.kind {
                if k == 0 || k > self.input_count {
                    out.push(Violation::InputIndex { gate: g.id, index: k });
                } else if seen_inputs.insert(k, g.id).is_some() {
                    out.push(Violation::DuplicateInput { gate: g.id, index: k });
                }
            }
        }
        for k in 1..=self.input_count {
            if !seen_inputs.contains_key(&k) {
                out.push(Violation::MissingInput { index: k });
            }
        }
        if let Err(cyclic) = self.topo_order() {
            out.extend(cyclic.into_iter().map(|gate| Violation::Cycle { gate }));
        }
        if self.outputs().is_empty() {
            out.push(Violation::NoOutput);
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }

    fn check(&self) -> Result<(), CircuitError> {
        self.validate().map_err(CircuitError::Invalid)
    }

    /// Gates in an order where every gate follows its (existing)
    /// predecessors; on failure returns the gates left on or behind cycles.
    pub fn topo_order(&self) -> Result<Vec<GateId>, Vec<GateId>> {
        let mut indeg: HashMap<GateId, usize> = HashMap::new();
        for g in self.gates.values() {
            indeg.insert(g.id, g.preds.iter().filter(|p| self.gates.contains_key(p)).count());
        }
        let succ = self.successors();
        let mut ready: Vec<GateId> = self.gates.keys().rev().filter(|id| indeg[id] == 0).copied().collect();
        let mut order = Vec::with_capacity(self.gates.len());
        while let Some(id) = ready.pop() {
            order.push(id);
            for s in &succ[&id] {
                let e = indeg.get_mut(s).expect("successor exists");
                *e -= 1;
                if *e == 0 {
                    ready.push(*s);
                }
            }
        }
        if order.len() == self.gates.len() {
            Ok(order)
        } else {
            let done: BTreeSet<GateId> = order.into_iter().collect();
            Err(self.gates.keys().filter(|id| !done.contains(id)).copied().collect())
        }
    }

    /// A reusable evaluation plan; fails if the circuit is invalid.
    pub fn evaluator(&self) -> Result<Evaluator, CircuitError> {
        self.check()?;
        let order = self.topo_order().expect("validated");
        let pos: HashMap<GateId, usize> = order.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let steps = order
            .iter()
            .map(|id| {
                let g = &self.gates[id];
                (g.kind.clone(), g.preds.iter().map(|p| pos[p]).collect())
            })
            .collect();
        Ok(Evaluator {
            input_count: self.input_count,
            steps,
            outputs: self.outputs().iter().map(|id| pos[id]).collect(),
            ids: order,
        })
    }

    /// Values of the output gates, in id order.
    pub fn evaluate(&self, x: &[Rational]) -> Result<Vec<Rational>, CircuitError> {
        self.evaluator()?.eval(x)
    }

    pub fn size(&self) -> usize {
        self.gates.len()
    }

    /// Longest path, in edges, from any input or constant gate to an output
    /// gate.
    pub fn depth(&self) -> Result<usize, CircuitError> {
        self.check()?;
        let dist = self.longest_from_sources();
        Ok(self.outputs().iter().map(|o| dist[o]).max().unwrap_or(0))
    }

    fn longest_from_sources(&self) -> HashMap<GateId, usize> {
        let order = self.topo_order().expect("acyclic");
        let mut dist: HashMap<GateId, usize> = HashMap::new();
        for id in order {
            let g = &self.gates[&id];
            let d = g.preds.iter().map(|p| dist[p] + 1).max().unwrap_or(0);
            dist.insert(id, d);
        }
        dist
    }

    /// Number of non-input gates plus the number of connections leaving
    /// input gates: each input gate is counted once per successor.
    pub fn tree_shape_size(&self) -> Result<usize, CircuitError> {
        self.check()?;
        Ok(self.tree_shape_size_unchecked())
    }

    pub(crate) fn tree_shape_size_unchecked(&self) -> usize {
        let succ = self.successors();
        self.gates
            .values()
            .map(|g| match g.kind {
                GateKind::Input(_) => succ[&g.id].len(),
                _ => 1,
            })
            .sum()
    }

    /// The gates with a path to `root`, together with `root`.
    pub fn induced_subcircuit(&self, root: GateId) -> Result<Circuit, CircuitError> {
        if !self.gates.contains_key(&root) {
            return Err(CircuitError::UnknownGate(root));
        }
        let mut keep = BTreeSet::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if keep.insert(id) {
                if let Some(g) = self.gates.get(&id) {
                    stack.extend(g.preds.iter().copied());
                }
            }
        }
        let mut out = Circuit::new(self.input_count);
        for id in keep {
            if let Some(g) = self.gates.get(&id) {
                out.gates.insert(id, g.clone());
            }
        }
        Ok(out)
    }

    /// Every non-input gate has at most one successor.
    pub fn is_tree_like(&self) -> Result<bool, CircuitError> {
        self.check()?;
        let succ = self.successors();
        Ok(self
            .gates
            .values()
            .all(|g| matches!(g.kind, GateKind::Input(_)) || succ[&g.id].len() <= 1))
    }

    /// For every gate, all paths from input gates to it have the same length.
    pub fn is_leveled(&self) -> Result<bool, CircuitError> {
        self.check()?;
        Ok(self.input_path_lengths().values().all(|r| r.map_or(true, |(lo, hi)| lo == hi)))
    }

    /// Shortest and longest path length from an input gate, per gate; `None`
    /// for gates no input reaches.
    pub fn input_path_lengths(&self) -> HashMap<GateId, Option<(usize, usize)>> {
        let order = self.topo_order().expect("acyclic");
        let mut out: HashMap<GateId, Option<(usize, usize)>> = HashMap::new();
        for id in order {
            let g = &self.gates[&id];
            let r = if matches!(g.kind, GateKind::Input(_)) {
                Some((0, 0))
            } else {
                g.preds
                    .iter()
                    .filter_map(|p| out[p])
                    .map(|(lo, hi)| (lo + 1, hi + 1))
                    .reduce(|(a, b), (c, d)| (a.min(c), b.max(d)))
            };
            out.insert(id, r);
        }
        out
    }

    /// Largest number of predecessors of any gate.
    pub fn max_indegree(&self) -> usize {
        self.gates.values().map(|g| g.preds.len()).max().unwrap_or(0)
    }

    /// Applies `f` to every id, keeping the structure.
    pub fn relabel(&self, f: impl Fn(GateId) -> GateId) -> Result<Circuit, CircuitError> {
        let mut out = Circuit::new(self.input_count);
        for g in self.gates.values() {
            out.insert(f(g.id), g.kind.clone(), g.preds.iter().map(|&p| f(p)).collect())?;
        }
        Ok(out)
    }

    /// Circuit text format: `inputs <n>`, then one gate per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("inputs {}\n", self.input_count);
        for g in self.gates.values() {
            let _ = write!(out, "{} {}", g.id, g.kind.name());
            match &g.kind {
                GateKind::Input(k) => {
                    let _ = write!(out, " in={k}");
                }
                GateKind::Const(c) => {
                    let _ = write!(out, " const={}", rational::format(c));
                }
                _ => {}
            }
            out.push_str(" preds=");
            let preds: Vec<String> = g.preds.iter().map(|p| p.to_string()).collect();
            out.push_str(&preds.join(","));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Circuit, CircuitError> {
        let mut circuit: Option<Circuit> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: String| CircuitError::Syntax { line: i + 1, message };
            let mut words = line.split_whitespace();
            let first = words.next().unwrap_or("");
            if first == "inputs" {
                let n = words
                    .next()
                    .and_then(|w| w.parse().ok())
                    .ok_or_else(|| syntax("expected `inputs <n>`".into()))?;
                circuit = Some(Circuit::new(n));
                continue;
            }
            let c = circuit.as_mut().ok_or_else(|| syntax("missing `inputs <n>` header".into()))?;
            let id: GateId = first.parse().map_err(|_| syntax(format!("bad gate id `{first}`")))?;
            let type_name = words.next().ok_or_else(|| syntax("missing gate type".into()))?;
            let mut payload_const = None;
            let mut payload_in = None;
            let mut preds = Vec::new();
            for w in words {
                if let Some(v) = w.strip_prefix("const=") {
                    payload_const = Some(rational::parse(v).ok_or_else(|| syntax(format!("bad constant `{v}`")))?);
                } else if let Some(v) = w.strip_prefix("in=") {
                    payload_in = Some(v.parse::<usize>().map_err(|_| syntax(format!("bad input index `{v}`")))?);
                } else if let Some(v) = w.strip_prefix("preds=") {
                    for p in v.split(',').filter(|p| !p.is_empty()) {
                        preds.push(p.parse().map_err(|_| syntax(format!("bad predecessor `{p}`")))?);
                    }
                } else {
                    return Err(syntax(format!("unexpected field `{w}`")));
                }
            }
            let kind = match type_name {
                "input" => GateKind::Input(payload_in.ok_or_else(|| syntax("input gate needs `in=<k>`".into()))?),
                "const" => GateKind::Const(payload_const.ok_or_else(|| syntax("const gate needs `const=<r>`".into()))?),
                other => GateKind::from_plain_name(other).ok_or_else(|| syntax(format!("unknown gate type `{other}`")))?,
            };
            c.insert(id, kind, preds).map_err(|e| syntax(e.to_string()))?;
        }
        circuit.ok_or(CircuitError::Syntax {
            line: 1,
            message: "missing `inputs <n>` header".into(),
        })
    }

    /// Graphviz digraph, edges pointing from predecessor to successor.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph circuit {\n");
        for g in self.gates.values() {
            let label = match &g.kind {
                GateKind::Input(k) => format!("x{k}"),
                GateKind::Const(c) => rational::format(c),
                GateKind::Add => "+".into(),
                GateKind::Mul => "*".into(),
                GateKind::Sign => "sign".into(),
                GateKind::Output => "out".into(),
                GateKind::Sub => "-".into(),
                GateKind::Eq => "=".into(),
                GateKind::Lt => "<".into(),
                GateKind::Gt => ">".into(),
                GateKind::Le => "<=".into(),
                GateKind::Ge => ">=".into(),
            };
            let _ = writeln!(out, "  g{} [label=\"{}: {}\"];", g.id, g.id, label);
        }
        for g in self.gates.values() {
            for (k, p) in g.preds.iter().enumerate() {
                let _ = writeln!(out, "  g{p} -> g{} [label=\"{}\"];", g.id, k + 1);
            }
        }
        out.push_str("}\n");
        out
    }
}

/// A validated circuit laid out in topological order.
#[derive(Debug, Clone)]
pub struct Evaluator {
    input_count: usize,
    steps: Vec<(GateKind, Vec<usize>)>,
    outputs: Vec<usize>,
    ids: Vec<GateId>,
}

impl Evaluator {
    /// Values of every gate, keyed by id.
    pub fn eval_all(&self, x: &[Rational]) -> Result<HashMap<GateId, Rational>, CircuitError> {
        let vals = self.values(x)?;
        Ok(self.ids.iter().copied().zip(vals).collect())
    }

    pub fn eval(&self, x: &[Rational]) -> Result<Vec<Rational>, CircuitError> {
        let vals = self.values(x)?;
        Ok(self.outputs.iter().map(|&i| vals[i].clone()).collect())
    }

    fn values(&self, x: &[Rational]) -> Result<Vec<Rational>, CircuitError> {
        if x.len() != self.input_count {
            return Err(CircuitError::InputLength {
                expected: self.input_count,
                found: x.len(),
            });
        }
        let mut vals: Vec<Rational> = Vec::with_capacity(self.steps.len());
        for (kind, preds) in &self.steps {
            let arg = |k: usize| &vals[preds[k]];
            let v = match kind {
                GateKind::Input(k) => x[k - 1].clone(),
                GateKind::Const(c) => c.clone(),
                GateKind::Add => preds.iter().fold(Rational::zero(), |acc, &p| acc + &vals[p]),
                GateKind::Mul => {
                    let mut acc = Rational::one();
                    for &p in preds {
                        if vals[p].is_zero() {
                            acc = Rational::zero();
                            break;
                        }
                        acc *= &vals[p];
                    }
                    acc
                }
                GateKind::Sign => rational::sign(arg(0)),
                GateKind::Output => arg(0).clone(),
                GateKind::Sub => arg(0) - arg(1),
                GateKind::Eq => rational::bool01(arg(0) == arg(1)),
                GateKind::Lt => rational::bool01(arg(0) < arg(1)),
                GateKind::Gt => rational::bool01(arg(0) > arg(1)),
                GateKind::Le => rational::bool01(arg(0) <= arg(1)),
                GateKind::Ge => rational::bool01(arg(0) >= arg(1)),
            };
            vals.push(v);
        }
        Ok(vals)
    }
}

/// `out(+(*(x1, x2), +(x2, x3)))`: size 7, tree-shape-size 8, since input 2
/// feeds both inner gates.
pub fn three_input_example() -> Circuit {
    let mut c = Circuit::new(3);
    let x1 = c.add(GateKind::Input(1), vec![]);
    let x2 = c.add(GateKind::Input(2), vec![]);
    let x3 = c.add(GateKind::Input(3), vec![]);
    let m = c.add(GateKind::Mul, vec![x1, x2]);
    let a = c.add(GateKind::Add, vec![x2, x3]);
    let top = c.add(GateKind::Add, vec![m, a]);
    c.add(GateKind::Output, vec![top]);
    c
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rational::int(x)).collect()
    }

    fn unary(kind: GateKind, n: usize) -> Circuit {
        let mut c = Circuit::new(n);
        let ins: Vec<_> = (1..=n).map(|k| c.add(GateKind::Input(k), vec![])).collect();
        let g = c.add(kind, ins);
        c.add(GateKind::Output, vec![g]);
        c
    }

    #[test]
    fn validation() {
        let mut ok = Circuit::new(1);
        let x = ok.add(GateKind::Input(1), vec![]);
        let s = ok.add(GateKind::Sign, vec![x]);
        ok.add(GateKind::Output, vec![s]);
        assert_eq!(ok.validate(), Ok(()));

        let mut bad = Circuit::new(2);
        let a = bad.add(GateKind::Input(1), vec![]);
        let b = bad.add(GateKind::Input(2), vec![]);
        let s = bad.add(GateKind::Sign, vec![a, b]);
        bad.add(GateKind::Output, vec![s]);
        assert_eq!(bad.validate(), Err(vec![Violation::Indegree { gate: s, found: 2 }]));

        let mut cyc = Circuit::new(0);
        cyc.insert(1, GateKind::Add, vec![2]).unwrap();
        cyc.insert(2, GateKind::Add, vec![1]).unwrap();
        cyc.insert(3, GateKind::Output, vec![2]).unwrap();
        let v = cyc.validate().unwrap_err();
        assert!(v.contains(&Violation::Cycle { gate: 1 }));
        assert!(v.contains(&Violation::Cycle { gate: 2 }));

        let mut dup = Circuit::new(1);
        let x = dup.add(GateKind::Input(1), vec![]);
        let m = dup.add(GateKind::Mul, vec![x, x]);
        dup.add(GateKind::Output, vec![m]);
        assert_eq!(
            dup.validate(),
            Err(vec![Violation::DuplicatePredecessor { gate: m, pred: x }])
        );
    }

    #[test]
    fn evaluation() {
        assert_eq!(unary(GateKind::Sign, 1).evaluate(&ints(&[-7])), Ok(ints(&[-1])));
        assert_eq!(unary(GateKind::Mul, 3).evaluate(&ints(&[2, 3, 4])), Ok(ints(&[24])));
        assert_eq!(unary(GateKind::Le, 2).evaluate(&ints(&[5, 5])), Ok(ints(&[1])));
        assert_eq!(unary(GateKind::Sub, 2).evaluate(&ints(&[2, 5])), Ok(ints(&[-3])));
        assert_eq!(unary(GateKind::Gt, 2).evaluate(&ints(&[2, 5])), Ok(ints(&[0])));
        assert!(matches!(
            unary(GateKind::Add, 2).evaluate(&ints(&[1])),
            Err(CircuitError::InputLength { .. })
        ));
    }

    #[test]
    fn three_input_measures() {
        let c = three_input_example();
        assert_eq!(c.size(), 7);
        assert_eq!(c.tree_shape_size(), Ok(8));
        assert_eq!(c.depth(), Ok(3));
        assert_eq!(c.evaluate(&ints(&[2, 3, 4])), Ok(ints(&[13])));
        assert_eq!(c.is_tree_like(), Ok(true));
        // Every input-to-output path has three edges.
        assert_eq!(c.is_leveled(), Ok(true));
        let sub = c.induced_subcircuit(4).unwrap();
        assert_eq!(sub.ids().collect::<Vec<_>>(), vec![1, 2, 4]);
        assert_eq!(c.induced_subcircuit(7).unwrap(), c);
        assert_eq!(c.induced_subcircuit(2).unwrap().size(), 1);
        assert!(matches!(c.induced_subcircuit(99), Err(CircuitError::UnknownGate(99))));
    }

    #[test]
    fn small_measures() {
        let mut c = Circuit::new(1);
        let x = c.add(GateKind::Input(1), vec![]);
        c.add(GateKind::Output, vec![x]);
        assert_eq!((c.size(), c.depth(), c.tree_shape_size()), (2, Ok(1), Ok(2)));

        let mut fan = Circuit::new(1);
        let x = fan.add(GateKind::Input(1), vec![]);
        let a: Vec<_> = (0..3).map(|_| fan.add(GateKind::Add, vec![x])).collect();
        let top = fan.add(GateKind::Mul, a);
        fan.add(GateKind::Output, vec![top]);
        assert_eq!(fan.tree_shape_size(), Ok(fan.size() + 2));
    }

    #[test]
    fn shape_predicates() {
        let mut diamond = Circuit::new(1);
        let x = diamond.add(GateKind::Input(1), vec![]);
        let s = diamond.add(GateKind::Sign, vec![x]);
        let a = diamond.add(GateKind::Add, vec![s]);
        let b = diamond.add(GateKind::Mul, vec![s]);
        let top = diamond.add(GateKind::Add, vec![a, b]);
        diamond.add(GateKind::Output, vec![top]);
        assert_eq!(diamond.is_tree_like(), Ok(false));

        let mut chain = Circuit::new(1);
        let x = chain.add(GateKind::Input(1), vec![]);
        let s = chain.add(GateKind::Sign, vec![x]);
        chain.add(GateKind::Output, vec![s]);
        assert_eq!((chain.is_tree_like(), chain.is_leveled()), (Ok(true), Ok(true)));

        let mut skew = Circuit::new(2);
        let x = skew.add(GateKind::Input(1), vec![]);
        let y = skew.add(GateKind::Input(2), vec![]);
        let s = skew.add(GateKind::Sign, vec![x]);
        let top = skew.add(GateKind::Add, vec![s, y]);
        skew.add(GateKind::Output, vec![top]);
        assert_eq!(skew.is_leveled(), Ok(false));
    }

    #[test]
    fn text_round_trip() {
        let mut c = three_input_example();
        let k = c.add(GateKind::Const(rational::parse("-3/4").unwrap()), vec![]);
        let top = c.add(GateKind::Lt, vec![k, 6]);
        c.add(GateKind::Output, vec![top]);
        let text = c.to_text();
        assert!(text.contains("8 const const=-3/4 preds=\n"));
        assert_eq!(Circuit::parse(&text), Ok(c.clone()));
        assert!(c.to_dot().contains("g1 -> g4"));
        assert!(matches!(Circuit::parse("1 add preds=\n"), Err(CircuitError::Syntax { .. })));
    }

    #[test]
    fn relabel_preserves_values() {
        let c = three_input_example();
        let r = c.relabel(|id| 100 - 3 * id).unwrap();
        assert_eq!(r.evaluate(&ints(&[2, 3, 4])), c.evaluate(&ints(&[2, 3, 4])));
    }
}
