//! R-structures over the universe `{0..u-1}`, their encoding as a vector of
//! rationals, and the auxiliary (Arb) tables a formula may consult.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write;

use num_traits::Zero;
use thiserror::Error;

use crate::logic::{Signature, SymbolKind};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("universe size must be at least 1")]
    ZeroUniverse,
    #[error("no universe size gives an encoding of length {0}")]
    NoSolution(usize),
    #[error("table `{symbol}` has {found} entries, expected {expected}")]
    LengthMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("value out of range for `{symbol}`: {message}")]
    RangeViolation { symbol: String, message: String },
    #[error("no table for `{0}`")]
    MissingTable(String),
    #[error("`{0}` is not declared in the signature")]
    UnknownSymbol(String),
    #[error("`{symbol}` declared with arity {expected}, table says {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// `u^k`, saturating at `usize::MAX`.
pub fn pow(u: usize, k: usize) -> usize {
    let mut acc: usize = 1;
    for _ in 0..k {
        acc = acc.saturating_mul(u);
    }
    acc
}

/// Position of `args` in the lexicographic order of `{0..u-1}^len`.
pub fn lex_index(args: &[usize], u: usize) -> usize {
    args.iter().fold(0, |acc, &a| acc * u + a)
}

/// Inverse of [`lex_index`].
pub fn lex_tuple(mut index: usize, u: usize, arity: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % u;
        index /= u;
    }
    out
}

/// All tuples of `{0..u-1}^arity` in lexicographic order.
pub fn tuples(u: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..pow(u, arity)).map(move |i| lex_tuple(i, u, arity))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableData {
    Dense(Vec<Rational>),
    /// Mostly-constant tables, such as the predecessor relation of a large
    /// circuit.
    Sparse {
        len: usize,
        default: Rational,
        entries: HashMap<usize, Rational>,
    },
}

/// A total function `{0..u-1}^arity -> Q`, stored in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub arity: usize,
    pub data: TableData,
}

impl Table {
    pub fn dense(arity: usize, values: Vec<Rational>) -> Self {
        Table {
            arity,
            data: TableData::Dense(values),
        }
    }

    pub fn sparse(arity: usize, len: usize, default: Rational) -> Self {
        Table {
            arity,
            data: TableData::Sparse {
                len,
                default,
                entries: HashMap::new(),
            },
        }
    }

    pub fn len(&self) -> usize {
        match &self.data {
            TableData::Dense(v) => v.len(),
            TableData::Sparse { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, index: usize) -> Option<&Rational> {
        match &self.data {
            TableData::Dense(v) => v.get(index),
            TableData::Sparse { len, default, entries } => {
                if index >= *len {
                    None
                } else {
                    Some(entries.get(&index).unwrap_or(default))
                }
            }
        }
    }

    pub fn set(&mut self, index: usize, value: Rational) {
        match &mut self.data {
            TableData::Dense(v) => v[index] = value,
            TableData::Sparse { default, entries, .. } => {
                if value == *default {
                    entries.remove(&index);
                } else {
                    entries.insert(index, value);
                }
            }
        }
    }

    pub fn values(&self) -> impl Iterator<Item = &Rational> + '_ {
        (0..self.len()).map(move |i| self.get(i).expect("index below len"))
    }
}

/// Interpretation of the auxiliary symbols `L_a` for one universe size.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArbInterpretation {
    tables: BTreeMap<String, Table>,
}

impl ArbInterpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, name: impl Into<String>, table: Table) {
        self.tables.insert(name.into(), table);
    }

    pub fn get(&self, name: &str) -> Option<&Table> {
        self.tables.get(name)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.tables.contains_key(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Table)> {
        self.tables.iter()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    /// Renders the tables as `[arb]`-section lines.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, table) in &self.tables {
            let _ = write!(out, "{name}/{} :", table.arity);
            for v in table.values() {
                out.push(' ');
                out.push_str(&rational::format(v));
            }
            out.push('\n');
        }
        out
    }
}

/// A functional R-structure with universe `{0..u-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RStructure {
    sig: Signature,
    u: usize,
    skeleton: Vec<Vec<usize>>,
    number: Vec<Vec<Rational>>,
}

impl RStructure {
    /// Builds a structure from one table per skeleton function and per number
    /// function, in signature order.
    pub fn new(
        sig: Signature,
        u: usize,
        skeleton: Vec<Vec<usize>>,
        number: Vec<Vec<Rational>>,
    ) -> Result<Self, StructureError> {
        if u == 0 {
            return Err(StructureError::ZeroUniverse);
        }
        let check_len = |name: &str, arity: usize, found: usize| {
            let expected = pow(u, arity);
            if expected != found {
                return Err(StructureError::LengthMismatch {
                    symbol: name.to_string(),
                    expected,
                    found,
                });
            }
            Ok(())
        };
        if skeleton.len() != sig.skeleton_functions().len() {
            let missing = &sig.skeleton_functions()[skeleton.len().min(sig.skeleton_functions().len())..];
            let name = missing.first().map_or("<extra>", |s| s.name.as_str());
            return Err(StructureError::MissingTable(name.to_string()));
        }
        if number.len() != sig.number_functions().len() {
            let missing = &sig.number_functions()[number.len().min(sig.number_functions().len())..];
            let name = missing.first().map_or("<extra>", |s| s.name.as_str());
            return Err(StructureError::MissingTable(name.to_string()));
        }
        for (sym, table) in sig.skeleton_functions().iter().zip(&skeleton) {
            check_len(&sym.name, sym.arity, table.len())?;
            if let Some(bad) = table.iter().find(|&&v| v >= u) {
                return Err(StructureError::RangeViolation {
                    symbol: sym.name.clone(),
                    message: format!("{bad} is not below the universe size {u}"),
                });
            }
        }
        for (sym, table) in sig.number_functions().iter().zip(&number) {
            check_len(&sym.name, sym.arity, table.len())?;
            if sig.is_predicate(&sym.name) && table.iter().any(|v| !(v.is_zero() || *v == rational::int(1))) {
                return Err(StructureError::RangeViolation {
                    symbol: sym.name.clone(),
                    message: "predicate tables must be 0/1".into(),
                });
            }
        }
        Ok(RStructure {
            sig,
            u,
            skeleton,
            number,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn universe_size(&self) -> usize {
        self.u
    }

    pub fn skeleton_table(&self, position: usize) -> &[usize] {
        &self.skeleton[position]
    }

    pub fn number_table(&self, position: usize) -> &[Rational] {
        &self.number[position]
    }

    /// Value of a skeleton function; `None` if it is not declared.
    pub fn skeleton_value(&self, name: &str, args: &[usize]) -> Option<usize> {
        let pos = self.sig.skeleton_position(name)?;
        self.skeleton[pos].get(lex_index(args, self.u)).copied()
    }

    pub fn number_value(&self, name: &str, args: &[usize]) -> Option<&Rational> {
        let pos = self.sig.number_position(name)?;
        self.number[pos].get(lex_index(args, self.u))
    }

    /// `enc(D)`: every encoded table in signature order, 0-ary values repeated
    /// `u` times.
    pub fn encode(&self) -> Vec<Rational> {
        let mut out = Vec::with_capacity(encoded_length(&self.sig, self.u));
        for (sym, table) in self.sig.skeleton_functions().iter().zip(&self.skeleton) {
            let reps = if sym.arity == 0 { self.u } else { 1 };
            for _ in 0..reps {
                out.extend(table.iter().map(|&v| rational::from_usize(v)));
            }
        }
        for (sym, table) in self.sig.number_functions().iter().zip(&self.number) {
            let reps = if sym.arity == 0 { self.u } else { 1 };
            for _ in 0..reps {
                out.extend(table.iter().cloned());
            }
        }
        out
    }

    /// Structure text format: a `universe` header, then one line per table.
    pub fn to_text(&self) -> String {
        let mut out = format!("universe {}\n", self.u);
        for (sym, table) in self.sig.skeleton_functions().iter().zip(&self.skeleton) {
            let _ = write!(out, "{}/{} :", sym.name, sym.arity);
            for v in table {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        for (sym, table) in self.sig.number_functions().iter().zip(&self.number) {
            let _ = write!(out, "{}/{} :", sym.name, sym.arity);
            for v in table {
                out.push(' ');
                out.push_str(&rational::format(v));
            }
            out.push('\n');
        }
        out
    }
}

/// `|enc(D)|` for any structure over `sig` with universe size `u`.
pub fn encoded_length(sig: &Signature, u: usize) -> usize {
    sig.encoded_symbols()
        .map(|(_, s)| pow(u, s.arity.max(1)))
        .fold(0usize, usize::saturating_add)
}

/// Finds the universe size whose encoding has length `n`, by binary search
/// for the least `u` with `encoded_length(sig, u) >= n`.
pub fn recover_universe_size(sig: &Signature, n: usize) -> Result<usize, StructureError> {
    if sig.encoded_symbols().next().is_none() {
        return Err(StructureError::NoSolution(n));
    }
    let (mut lo, mut hi) = (1usize, n.max(1));
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if encoded_length(sig, mid) >= n {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    if encoded_length(sig, lo) == n {
        Ok(lo)
    } else {
        Err(StructureError::NoSolution(n))
    }
}

/// Inverse of [`RStructure::encode`].
pub fn decode(sig: &Signature, v: &[Rational]) -> Result<RStructure, StructureError> {
    let u = recover_universe_size(sig, v.len()).map_err(|_| StructureError::LengthMismatch {
        symbol: "<encoding>".into(),
        expected: 0,
        found: v.len(),
    })?;
    let mut pos = 0;
    let mut take = |name: &str, arity: usize| -> Result<Vec<Rational>, StructureError> {
        let len = pow(u, arity);
        if arity == 0 {
            let block = &v[pos..pos + u];
            pos += u;
            if block.iter().any(|x| *x != block[0]) {
                return Err(StructureError::RangeViolation {
                    symbol: name.to_string(),
                    message: "the copies of a 0-ary value disagree".into(),
                });
            }
            Ok(vec![block[0].clone()])
        } else {
            let block = v[pos..pos + len].to_vec();
            pos += len;
            Ok(block)
        }
    };
    let mut skeleton = Vec::new();
    for sym in sig.skeleton_functions() {
        let raw = take(&sym.name, sym.arity)?;
        let table = raw
            .iter()
            .map(|x| {
                rational::to_index(x).filter(|&i| i < u).ok_or_else(|| StructureError::RangeViolation {
                    symbol: sym.name.clone(),
                    message: format!("{} is not an element of the universe", rational::format(x)),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        skeleton.push(table);
    }
    let mut number = Vec::new();
    for sym in sig.number_functions() {
        number.push(take(&sym.name, sym.arity)?);
    }
    RStructure::new(sig.clone(), u, skeleton, number)
}

/// Parses the structure text format. Tables after an `[arb]` line go into the
/// returned [`ArbInterpretation`].
pub fn parse_structure(text: &str, sig: &Signature) -> Result<(RStructure, ArbInterpretation), StructureError> {
    let mut u: Option<usize> = None;
    let mut in_arb = false;
    let mut main: HashMap<String, (usize, Vec<Rational>)> = HashMap::new();
    let mut arb = ArbInterpretation::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let syntax = |message: String| StructureError::Syntax { line: i + 1, message };
        if let Some(rest) = line.strip_prefix("universe") {
            let n: usize = rest.trim().parse().map_err(|_| syntax(format!("bad universe size `{}`", rest.trim())))?;
            if n == 0 {
                return Err(StructureError::ZeroUniverse);
            }
            u = Some(n);
            continue;
        }
        if line == "[arb]" {
            in_arb = true;
            continue;
        }
        let u = u.ok_or_else(|| syntax("missing `universe <u>` header".into()))?;
        let (decl, values) = line
            .split_once(':')
            .ok_or_else(|| syntax(format!("expected `<name>/<arity> : values`, got `{line}`")))?;
        let (name, arity) = decl
            .trim()
            .split_once('/')
            .and_then(|(n, a)| Some((n.trim().to_string(), a.trim().parse::<usize>().ok()?)))
            .ok_or_else(|| syntax(format!("bad declaration `{}`", decl.trim())))?;
        let values = values
            .split_whitespace()
            .map(|t| rational::parse(t).ok_or_else(|| syntax(format!("bad rational `{t}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        let expected = pow(u, arity);
        if values.len() != expected {
            return Err(StructureError::LengthMismatch {
                symbol: name,
                expected,
                found: values.len(),
            });
        }
        if in_arb {
            arb.insert(name, Table::dense(arity, values));
        } else {
            main.insert(name, (arity, values));
        }
    }
    let u = u.ok_or(StructureError::Syntax {
        line: 1,
        message: "missing `universe <u>` header".into(),
    })?;
    for name in main.keys() {
        match sig.lookup(name) {
            Some((SymbolKind::Skeleton | SymbolKind::Number, _)) => {}
            _ => return Err(StructureError::UnknownSymbol(name.clone())),
        }
    }
    let mut fetch = |name: &str, arity: usize| {
        let (found, values) = main.remove(name).ok_or_else(|| StructureError::MissingTable(name.to_string()))?;
        if found != arity {
            return Err(StructureError::ArityMismatch {
                symbol: name.to_string(),
                expected: arity,
                found,
            });
        }
        Ok(values)
    };
    let mut skeleton = Vec::new();
    for sym in sig.skeleton_functions() {
        let values = fetch(&sym.name, sym.arity)?;
        let table = values
            .iter()
            .map(|x| {
                rational::to_index(x).filter(|&i| i < u).ok_or_else(|| StructureError::RangeViolation {
                    symbol: sym.name.clone(),
                    message: format!("{} is not an element of the universe", rational::format(x)),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        skeleton.push(table);
    }
    let mut number = Vec::new();
    for sym in sig.number_functions() {
        number.push(fetch(&sym.name, sym.arity)?);
    }
    Ok((RStructure::new(sig.clone(), u, skeleton, number)?, arb))
}
