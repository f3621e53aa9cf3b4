//! Compilation of FO_R sentences into tree-like arithmetic circuits for a
//! fixed universe size, with post-order gate numbers and a gate oracle that
//! answers queries about a numbered circuit without building it.
//!
//! Layout of the generated circuit (children in predecessor order):
//!
//! | node            | gates                                               |
//! |-----------------|-----------------------------------------------------|
//! | `exists x. p`   | `sign(+(p[x:=0], ..., p[x:=u-1]))`                  |
//! | `forall x. p`   | `sign(*(p[x:=0], ..., p[x:=u-1]))`                  |
//! | `!p`            | `sub(1, sign(p))`                                   |
//! | `a & b`         | `sign(*(a, b))`                                     |
//! | `a \| b`        | `sign(+(a, b))`                                     |
//! | `a -> b`        | as `!a \| b`                                        |
//! | `a <-> b`       | as `(a -> b) & (b -> a)`                            |
//! | `s = t`, `s < t`, `h == k` | `eq(s, t)`, `lt(s, t)`, `eq(h, k)`       |
//! | variable `x`    | constant holding the value of `x`                   |
//! | `f(h1..hl)`     | `+` over all tuples `a` of `*(eq(a1, h1), ..., eq(al, hl), f(a))` |
//! | `sum x (t)`     | `+(t[x:=0], ..., t[x:=u-1])`, `prod` with `*`       |
//! | `chi[p]`        | the circuit of `p`                                  |
//!
//! `f(a)` is the input gate holding that table entry for skeleton and number
//! functions, and a constant gate for auxiliary symbols. The output gate sits
//! on top.
//!
//! Numbering is post-order over the circuit viewed as a tree in which every
//! connection to an input gate is a separate leaf. Leaves for input gates
//! take up a number without a gate (a hole); the `i`-th input gate itself is
//! numbered `T + i`, where `T = tss(C)` is also the number of the output gate.

use num_traits::Zero;
use thiserror::Error;

use crate::circuit::{Circuit, GateId, GateKind};
use crate::logic::{Formula, IndexTerm, Node, NumberTerm, Signature};
use crate::rational::{self, Rational};
use crate::structure::{encoded_length, lex_tuple, pow, recover_universe_size, ArbInterpretation, StructureError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompileError {
    #[error("variable `{0}` is free")]
    FreeVariable(String),
    #[error("variable `{0}` is bound twice along one path")]
    Shadowing(String),
    #[error("`max` terms must be eliminated before compiling")]
    MaxNotEliminated,
    #[error("no auxiliary table for `{0}`")]
    MissingArbTable(String),
    #[error("auxiliary table `{symbol}` has {found} entries, expected {expected}")]
    ArbTableSize {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("symbol `{0}` is not declared")]
    Undeclared(String),
    #[error("universe size must be at least 1")]
    ZeroUniverse,
    #[error("circuit too large to number")]
    TooLarge,
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// Oracle answer: gate type (0 for "no gate"), number of the requested
/// predecessor (0 if absent), and the payload (constant value or input index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateRecord {
    pub t: u8,
    pub p_nr: u64,
    pub c: Rational,
}

impl GateRecord {
    pub fn none() -> Self {
        GateRecord {
            t: 0,
            p_nr: 0,
            c: Rational::zero(),
        }
    }
}

impl std::fmt::Display for GateRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {} {}", self.t, self.p_nr, rational::format(&self.c))
    }
}

#[derive(Debug, Clone)]
enum ValueSource {
    /// Table starting after `offset` positions of `enc(D)`.
    Input { offset: usize },
    Arb { name: String },
}

#[derive(Debug, Clone)]
enum PNode {
    Quant { exists: bool, var: String, body: Box<Plan> },
    Not(Box<Plan>),
    Bin { and: bool, a: Box<Plan>, b: Box<Plan> },
    Rel { kind: GateKind, a: Box<Plan>, b: Box<Plan> },
    Var(String),
    Const(Rational),
    App { value: ValueSource, args: Vec<Plan> },
    Arith { kind: GateKind, a: Box<Plan>, b: Box<Plan> },
    Sign(Box<Plan>),
    Agg { kind: GateKind, var: String, body: Box<Plan> },
}

/// Desugared syntax tree annotated with tree-shape-sizes.
#[derive(Debug, Clone)]
struct Plan {
    tss: u64,
    node: PNode,
}

struct Planner {
    u: u64,
    offsets: std::collections::HashMap<String, usize>,
}

fn add(a: u64, b: u64) -> Result<u64, CompileError> {
    a.checked_add(b).ok_or(CompileError::TooLarge)
}

fn mul(a: u64, b: u64) -> Result<u64, CompileError> {
    a.checked_mul(b).ok_or(CompileError::TooLarge)
}

impl Planner {
    fn new(sig: &Signature, u: usize) -> Result<Self, CompileError> {
        if u == 0 {
            return Err(CompileError::ZeroUniverse);
        }
        let mut offsets = std::collections::HashMap::new();
        let mut pos = 0usize;
        for (_, s) in sig.encoded_symbols() {
            offsets.insert(s.name.clone(), pos);
            pos = pos.saturating_add(pow(u, s.arity.max(1)));
        }
        Ok(Planner {
            u: u as u64,
            offsets,
        })
    }

    fn boxed(&self, p: Plan) -> Box<Plan> {
        Box::new(p)
    }

    fn formula(&self, phi: &Formula) -> Result<Plan, CompileError> {
        Ok(match phi {
            Formula::IndexEq(a, b) => self.rel(GateKind::Eq, self.index(a)?, self.index(b)?)?,
            Formula::NumEq(a, b) => self.rel(GateKind::Eq, self.number(a)?, self.number(b)?)?,
            Formula::NumLt(a, b) => self.rel(GateKind::Lt, self.number(a)?, self.number(b)?)?,
            Formula::Not(a) => self.not(self.formula(a)?)?,
            Formula::And(a, b) => self.bin(true, self.formula(a)?, self.formula(b)?)?,
            Formula::Or(a, b) => self.bin(false, self.formula(a)?, self.formula(b)?)?,
            Formula::Implies(a, b) => self.implies(self.formula(a)?, self.formula(b)?)?,
            Formula::Iff(a, b) => {
                let (pa, pb) = (self.formula(a)?, self.formula(b)?);
                let ab = self.implies(pa.clone(), pb.clone())?;
                let ba = self.implies(pb, pa)?;
                self.bin(true, ab, ba)?
            }
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let body = self.formula(body)?;
                Plan {
                    tss: add(mul(self.u, body.tss)?, 2)?,
                    node: PNode::Quant {
                        exists: matches!(phi, Formula::Exists(..)),
                        var: v.clone(),
                        body: self.boxed(body),
                    },
                }
            }
        })
    }

    fn implies(&self, a: Plan, b: Plan) -> Result<Plan, CompileError> {
        let na = self.not(a)?;
        self.bin(false, na, b)
    }

    fn not(&self, a: Plan) -> Result<Plan, CompileError> {
        Ok(Plan {
            tss: add(a.tss, 3)?,
            node: PNode::Not(self.boxed(a)),
        })
    }

    fn bin(&self, and: bool, a: Plan, b: Plan) -> Result<Plan, CompileError> {
        Ok(Plan {
            tss: add(add(a.tss, b.tss)?, 2)?,
            node: PNode::Bin {
                and,
                a: self.boxed(a),
                b: self.boxed(b),
            },
        })
    }

    fn rel(&self, kind: GateKind, a: Plan, b: Plan) -> Result<Plan, CompileError> {
        Ok(Plan {
            tss: add(add(a.tss, b.tss)?, 1)?,
            node: PNode::Rel {
                kind,
                a: self.boxed(a),
                b: self.boxed(b),
            },
        })
    }

    fn app(&self, name: &str, args: &[IndexTerm], aux: bool) -> Result<Plan, CompileError> {
        let args = args.iter().map(|a| self.index(a)).collect::<Result<Vec<_>, _>>()?;
        let value = if aux {
            ValueSource::Arb { name: name.to_string() }
        } else {
            let offset = *self
                .offsets
                .get(name)
                .ok_or_else(|| CompileError::Undeclared(name.to_string()))?;
            ValueSource::Input { offset }
        };
        let mut branch = 2u64;
        for a in &args {
            branch = add(branch, add(a.tss, 2)?)?;
        }
        let count = self.u.checked_pow(args.len() as u32).ok_or(CompileError::TooLarge)?;
        Ok(Plan {
            tss: add(mul(count, branch)?, 1)?,
            node: PNode::App { value, args },
        })
    }

    fn index(&self, h: &IndexTerm) -> Result<Plan, CompileError> {
        match h {
            IndexTerm::Var(x) => Ok(Plan {
                tss: 1,
                node: PNode::Var(x.clone()),
            }),
            IndexTerm::SkeletonApp(n, args) => self.app(n, args, false),
            IndexTerm::AuxIndexApp(n, args) => self.app(n, args, true),
        }
    }

    fn number(&self, t: &NumberTerm) -> Result<Plan, CompileError> {
        Ok(match t {
            NumberTerm::Const(c) => Plan {
                tss: 1,
                node: PNode::Const(c.clone()),
            },
            NumberTerm::NumApp(n, args) => self.app(n, args, false)?,
            NumberTerm::AuxNumApp(n, args) => self.app(n, args, true)?,
            NumberTerm::Add(a, b) | NumberTerm::Mul(a, b) => {
                let (a, b) = (self.number(a)?, self.number(b)?);
                Plan {
                    tss: add(add(a.tss, b.tss)?, 1)?,
                    node: PNode::Arith {
                        kind: if matches!(t, NumberTerm::Add(..)) {
                            GateKind::Add
                        } else {
                            GateKind::Mul
                        },
                        a: self.boxed(a),
                        b: self.boxed(b),
                    },
                }
            }
            NumberTerm::Sign(a) => {
                let a = self.number(a)?;
                Plan {
                    tss: add(a.tss, 1)?,
                    node: PNode::Sign(self.boxed(a)),
                }
            }
            NumberTerm::Sum(v, body) | NumberTerm::Prod(v, body) => {
                let body = self.number(body)?;
                Plan {
                    tss: add(mul(self.u, body.tss)?, 1)?,
                    node: PNode::Agg {
                        kind: if matches!(t, NumberTerm::Sum(..)) {
                            GateKind::Add
                        } else {
                            GateKind::Mul
                        },
                        var: v.clone(),
                        body: self.boxed(body),
                    },
                }
            }
            NumberTerm::Max(..) => return Err(CompileError::MaxNotEliminated),
            NumberTerm::Char(phi) => self.formula(phi)?,
        })
    }
}

/// Tree-shape-size of the circuit fragment built for `node` at universe
/// size `u`, computed from the syntax alone.
pub fn tss_of(node: Node<'_>, sig: &Signature, u: usize) -> Result<u64, CompileError> {
    let p = Planner::new(sig, u)?;
    Ok(match node {
        Node::Formula(f) => p.formula(f)?.tss,
        Node::Index(h) => p.index(h)?.tss,
        Node::Number(t) => p.number(t)?.tss,
    })
}

/// A position in the circuit viewed as a tree: a compiled node, or one of the
/// intermediate gates of a multi-gate construction.
#[derive(Clone, Copy)]
enum Frag<'p> {
    Plan(&'p Plan),
    /// The `+`/`*` under the sign gate of a quantifier or connective.
    Inner(&'p Plan),
    /// The sign gate of a negation.
    NotSign(&'p Plan),
    /// Branch `j` of a function application.
    Branch(&'p Plan, usize),
    /// Test `r` of branch `j`: `eq(a_r, h_r)`.
    Test(&'p Plan, usize, usize),
    /// The table entry of branch `j`.
    Value(&'p Plan, usize),
    /// Constant `a_r` of test `r` in branch `j`.
    Digit(&'p Plan, usize, usize),
}

type Env = Vec<(String, usize)>;

enum Root {
    Gate(GateKind),
    /// A leaf standing for input gate `i`.
    Input(usize),
}

struct Layout<'a> {
    u: usize,
    arb: &'a ArbInterpretation,
}

fn app_parts(p: &Plan) -> (&ValueSource, &[Plan]) {
    match &p.node {
        PNode::App { value, args } => (value, args),
        _ => unreachable!("branch of a non-application"),
    }
}

impl Layout<'_> {
    fn tss(&self, f: Frag<'_>) -> u64 {
        match f {
            Frag::Plan(p) => p.tss,
            Frag::Inner(p) => p.tss - 1,
            Frag::NotSign(p) => p.tss - 2,
            Frag::Branch(p, _) => {
                let (_, args) = app_parts(p);
                (p.tss - 1) / (self.u as u64).pow(args.len() as u32)
            }
            Frag::Test(p, _, r) => app_parts(p).1[r].tss + 2,
            Frag::Value(..) | Frag::Digit(..) => 1,
        }
    }

    fn lookup(env: &Env, var: &str) -> usize {
        env.iter()
            .rev()
            .find(|(v, _)| v == var)
            .map(|&(_, x)| x)
            .expect("sentences have no free variables")
    }

    fn root(&self, f: Frag<'_>, env: &Env) -> Root {
        let gate = match f {
            Frag::Plan(p) => match &p.node {
                PNode::Quant { .. } | PNode::Bin { .. } | PNode::Sign(_) => GateKind::Sign,
                PNode::Not(_) => GateKind::Sub,
                PNode::Rel { kind, .. } | PNode::Arith { kind, .. } | PNode::Agg { kind, .. } => kind.clone(),
                PNode::Var(x) => GateKind::Const(rational::from_usize(Self::lookup(env, x))),
                PNode::Const(c) => GateKind::Const(c.clone()),
                PNode::App { .. } => GateKind::Add,
            },
            Frag::Inner(p) => match &p.node {
                PNode::Quant { exists: true, .. } | PNode::Bin { and: false, .. } => GateKind::Add,
                _ => GateKind::Mul,
            },
            Frag::NotSign(_) => GateKind::Sign,
            Frag::Branch(..) => GateKind::Mul,
            Frag::Test(..) => GateKind::Eq,
            Frag::Digit(p, j, r) => {
                let arity = app_parts(p).1.len();
                GateKind::Const(rational::from_usize(lex_tuple(j, self.u, arity)[r]))
            }
            Frag::Value(p, j) => match app_parts(p).0 {
                ValueSource::Input { offset } => return Root::Input(offset + j + 1),
                ValueSource::Arb { name } => {
                    let v = self.arb.get(name).and_then(|t| t.get(j)).cloned().unwrap_or_default();
                    GateKind::Const(v)
                }
            },
        };
        Root::Gate(gate)
    }

    fn child_count(&self, f: Frag<'_>) -> usize {
        match f {
            Frag::Plan(p) => match &p.node {
                PNode::Quant { .. } | PNode::Bin { .. } | PNode::Sign(_) => 1,
                PNode::Not(_) | PNode::Rel { .. } | PNode::Arith { .. } => 2,
                PNode::Agg { .. } => self.u,
                PNode::Var(_) | PNode::Const(_) => 0,
                PNode::App { args, .. } => pow(self.u, args.len()),
            },
            Frag::Inner(p) => match &p.node {
                PNode::Quant { .. } => self.u,
                _ => 2,
            },
            Frag::NotSign(_) => 1,
            Frag::Branch(p, _) => app_parts(p).1.len() + 1,
            Frag::Test(..) => 2,
            Frag::Value(..) | Frag::Digit(..) => 0,
        }
    }

    /// Child `k` and the variable binding it adds, if any.
    fn child<'p>(&self, f: Frag<'p>, k: usize) -> (Frag<'p>, Option<(&'p str, usize)>) {
        match f {
            Frag::Plan(p) => match &p.node {
                PNode::Quant { .. } | PNode::Bin { .. } => (Frag::Inner(p), None),
                PNode::Sign(a) => (Frag::Plan(a), None),
                PNode::Not(_) => {
                    if k == 0 {
                        (Frag::Digit(p, usize::MAX, 0), None)
                    } else {
                        (Frag::NotSign(p), None)
                    }
                }
                PNode::Rel { a, b, .. } | PNode::Arith { a, b, .. } => (Frag::Plan(if k == 0 { a } else { b }), None),
                PNode::Agg { var, body, .. } => (Frag::Plan(body), Some((var.as_str(), k))),
                PNode::App { .. } => (Frag::Branch(p, k), None),
                PNode::Var(_) | PNode::Const(_) => unreachable!("leaves have no children"),
            },
            Frag::Inner(p) => match &p.node {
                PNode::Quant { var, body, .. } => (Frag::Plan(body), Some((var.as_str(), k))),
                PNode::Bin { a, b, .. } => (Frag::Plan(if k == 0 { a } else { b }), None),
                _ => unreachable!("inner gate of a non-apex node"),
            },
            Frag::NotSign(p) => match &p.node {
                PNode::Not(a) => (Frag::Plan(a), None),
                _ => unreachable!(),
            },
            Frag::Branch(p, j) => {
                let arity = app_parts(p).1.len();
                if k < arity {
                    (Frag::Test(p, j, k), None)
                } else {
                    (Frag::Value(p, j), None)
                }
            }
            Frag::Test(p, j, r) => {
                if k == 0 {
                    (Frag::Digit(p, j, r), None)
                } else {
                    (Frag::Plan(&app_parts(p).1[r]), None)
                }
            }
            Frag::Value(..) | Frag::Digit(..) => unreachable!("leaves have no children"),
        }
    }

    /// Children with identical tree-shape-size, so offsets are `k * size`.
    fn uniform_children(f: Frag<'_>) -> bool {
        match f {
            Frag::Plan(p) => matches!(p.node, PNode::Agg { .. } | PNode::App { .. }),
            Frag::Inner(p) => matches!(p.node, PNode::Quant { .. }),
            _ => false,
        }
    }
}

/// The `1` of a negation is represented as `Digit(p, usize::MAX, _)`.
fn digit_root(layout: &Layout<'_>, f: Frag<'_>, env: &Env) -> Root {
    match f {
        Frag::Digit(_, usize::MAX, _) => Root::Gate(GateKind::Const(rational::int(1))),
        _ => layout.root(f, env),
    }
}

struct Prepared<'a> {
    plan: Plan,
    layout: Layout<'a>,
    n: usize,
}

impl<'a> Prepared<'a> {
    fn new(phi: &Formula, sig: &Signature, u: usize, arb: &'a ArbInterpretation) -> Result<Self, CompileError> {
        if let Some(x) = phi.free_vars().into_iter().next() {
            return Err(CompileError::FreeVariable(x));
        }
        if let Some(x) = phi.find_shadowing() {
            return Err(CompileError::Shadowing(x));
        }
        let plan = Planner::new(sig, u)?.formula(phi)?;
        check_arb(&plan, u, arb)?;
        // Output gate plus the input gates must be numberable.
        let n = encoded_length(sig, u);
        add(add(plan.tss, 1)?, n as u64)?;
        Ok(Prepared {
            plan,
            layout: Layout { u, arb },
            n,
        })
    }

    fn output_number(&self) -> u64 {
        self.plan.tss + 1
    }

    fn emit(&self, f: Frag<'_>, env: &mut Env, next: &mut u64, c: &mut Circuit) -> GateId {
        let count = self.layout.child_count(f);
        let mut preds = Vec::with_capacity(count);
        for k in 0..count {
            let (child, bind) = self.layout.child(f, k);
            if let Some((v, x)) = bind {
                env.push((v.to_string(), x));
            }
            preds.push(self.emit(child, env, next, c));
            if bind.is_some() {
                env.pop();
            }
        }
        match digit_root(&self.layout, f, env) {
            Root::Input(i) => {
                *next += 1;
                self.output_number() + i as u64
            }
            Root::Gate(kind) => {
                let id = *next;
                *next += 1;
                c.insert(id, kind, preds).expect("post-order numbers are unique");
                id
            }
        }
    }

    fn circuit(&self) -> Circuit {
        let mut c = Circuit::new(self.n);
        let mut next = 1;
        let root = self.emit(Frag::Plan(&self.plan), &mut Vec::new(), &mut next, &mut c);
        let t = self.output_number();
        debug_assert_eq!(next, t);
        c.insert(t, GateKind::Output, vec![root]).expect("fresh id");
        for i in 1..=self.n {
            c.insert(t + i as u64, GateKind::Input(i), vec![]).expect("fresh id");
        }
        c
    }

    /// Number of the gate a tree position `f` starting at `start` connects
    /// to its parent with.
    fn root_number(&self, f: Frag<'_>, env: &Env, start: u64) -> u64 {
        match digit_root(&self.layout, f, env) {
            Root::Input(i) => self.output_number() + i as u64,
            Root::Gate(_) => start + self.layout.tss(f) - 1,
        }
    }

    fn offset(&self, f: Frag<'_>, k: usize) -> u64 {
        if Layout::uniform_children(f) {
            return k as u64 * self.layout.tss(self.layout.child(f, 0).0);
        }
        (0..k).map(|i| self.layout.tss(self.layout.child(f, i).0)).sum()
    }

    fn query(&self, v: u64, p: usize) -> GateRecord {
        let t = self.output_number();
        if v == 0 || v > t + self.n as u64 {
            return GateRecord::none();
        }
        if v > t {
            return GateRecord {
                t: 1,
                p_nr: 0,
                c: rational::from_usize((v - t) as usize),
            };
        }
        if v == t {
            return GateRecord {
                t: 6,
                p_nr: if p == 1 { t - 1 } else { 0 },
                c: Rational::zero(),
            };
        }
        let mut f = Frag::Plan(&self.plan);
        let mut start = 1u64;
        let mut env: Env = Vec::new();
        loop {
            let end = start + self.layout.tss(f) - 1;
            if v == end {
                return self.record(f, &env, start, p);
            }
            let count = self.layout.child_count(f);
            let rel = v - start;
            let k = if Layout::uniform_children(f) {
                (rel / self.layout.tss(self.layout.child(f, 0).0)) as usize
            } else {
                let mut k = 0;
                while k + 1 < count && self.offset(f, k + 1) <= rel {
                    k += 1;
                }
                k
            };
            let (child, bind) = self.layout.child(f, k);
            start += self.offset(f, k);
            if let Some((var, x)) = bind {
                env.push((var.to_string(), x));
            }
            f = child;
        }
    }

    fn record(&self, f: Frag<'_>, env: &Env, start: u64, p: usize) -> GateRecord {
        let kind = match digit_root(&self.layout, f, env) {
            // A leaf for an input gate occupies a number without a gate.
            Root::Input(_) => return GateRecord::none(),
            Root::Gate(kind) => kind,
        };
        let c = match &kind {
            GateKind::Const(c) => c.clone(),
            _ => Rational::zero(),
        };
        let count = self.layout.child_count(f);
        let p_nr = if p >= 1 && p <= count {
            let (child, bind) = self.layout.child(f, p - 1);
            let mut env = env.clone();
            if let Some((var, x)) = bind {
                env.push((var.to_string(), x));
            }
            self.root_number(child, &env, start + self.offset(f, p - 1))
        } else {
            0
        };
        GateRecord { t: kind.code(), p_nr, c }
    }
}

fn check_arb(plan: &Plan, u: usize, arb: &ArbInterpretation) -> Result<(), CompileError> {
    let mut stack = vec![plan];
    while let Some(p) = stack.pop() {
        match &p.node {
            PNode::Quant { body, .. } | PNode::Agg { body, .. } | PNode::Not(body) | PNode::Sign(body) => stack.push(body),
            PNode::Bin { a, b, .. } | PNode::Rel { a, b, .. } | PNode::Arith { a, b, .. } => {
                stack.push(a);
                stack.push(b);
            }
            PNode::Var(_) | PNode::Const(_) => {}
            PNode::App { value, args } => {
                if let ValueSource::Arb { name } = value {
                    let table = arb.get(name).ok_or_else(|| CompileError::MissingArbTable(name.clone()))?;
                    let expected = pow(u, args.len());
                    if table.arity != args.len() || table.len() != expected {
                        return Err(CompileError::ArbTableSize {
                            symbol: name.clone(),
                            expected,
                            found: table.len(),
                        });
                    }
                }
                stack.extend(args.iter());
            }
        }
    }
    Ok(())
}

/// Builds the circuit deciding `phi` on structures with universe size `u`,
/// with the post-order numbering described in the module docs.
pub fn compile_numbered(
    phi: &Formula,
    sig: &Signature,
    u: usize,
    arb: &ArbInterpretation,
) -> Result<Circuit, CompileError> {
    Ok(Prepared::new(phi, sig, u, arb)?.circuit())
}

/// Same as [`compile_numbered`]; the construction has a single numbering.
pub fn compile(phi: &Formula, sig: &Signature, u: usize, arb: &ArbInterpretation) -> Result<Circuit, CompileError> {
    compile_numbered(phi, sig, u, arb)
}

/// Answers gate queries for the circuit of one sentence at one input length.
pub struct GateOracle<'a> {
    prepared: Prepared<'a>,
}

impl<'a> GateOracle<'a> {
    /// `n` is the input length; the universe size is recovered from it.
    pub fn new(phi: &Formula, sig: &Signature, n: usize, arb: &'a ArbInterpretation) -> Result<Self, CompileError> {
        let u = recover_universe_size(sig, n)?;
        Ok(GateOracle {
            prepared: Prepared::new(phi, sig, u, arb)?,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.prepared.layout.u
    }

    /// `tss(C)`, the number of the output gate.
    pub fn output_number(&self) -> u64 {
        self.prepared.output_number()
    }

    /// `(t, p_nr, c)` for gate `v` and predecessor index `p` (1-based).
    pub fn query(&self, v: u64, p: usize) -> GateRecord {
        self.prepared.query(v, p)
    }
}

/// One-shot form of [`GateOracle::query`].
pub fn gate_oracle(
    phi: &Formula,
    sig: &Signature,
    n: usize,
    arb: &ArbInterpretation,
    v: u64,
    p: usize,
) -> Result<GateRecord, CompileError> {
    Ok(GateOracle::new(phi, sig, n, arb)?.query(v, p))
}
