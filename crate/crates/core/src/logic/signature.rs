use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
        }
    }
}

/// Value kind of an auxiliary (L_a) symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AuxKind {
    Index,
    Number,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AuxSymbol {
    pub name: String,
    pub arity: usize,
    pub kind: AuxKind,
}

impl AuxSymbol {
    pub fn new(name: impl Into<String>, arity: usize, kind: AuxKind) -> Self {
        AuxSymbol {
            name: name.into(),
            arity,
            kind,
        }
    }
}

/// Which of the three vocabularies a symbol belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SymbolKind {
    /// L_s: universe-valued functions of the skeleton.
    Skeleton,
    /// L_f: number-valued functions given by the structure.
    Number,
    /// L_a, universe-valued.
    AuxIndex,
    /// L_a, number-valued.
    AuxNumber,
}

impl SymbolKind {
    pub fn is_index_valued(self) -> bool {
        matches!(self, SymbolKind::Skeleton | SymbolKind::AuxIndex)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("symbol `{0}` declared more than once")]
    Duplicate(String),
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
}

/// The three ordered symbol lists `(L_s, L_f, L_a)`.
///
/// Skeleton predicates are not a separate list: a declared predicate is stored
/// as a number function whose table must be 0/1-valued (its characteristic
/// function), and its name is remembered in [`Signature::predicates`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Signature {
    skeleton: Vec<Symbol>,
    number: Vec<Symbol>,
    aux: Vec<AuxSymbol>,
    predicates: BTreeSet<String>,
    lookup: HashMap<String, (SymbolKind, usize)>,
}

impl Signature {
    pub fn new(
        skeleton: Vec<Symbol>,
        number: Vec<Symbol>,
        aux: Vec<AuxSymbol>,
    ) -> Result<Self, SignatureError> {
        let mut sig = Signature::default();
        for s in skeleton {
            sig.insert(SymbolKind::Skeleton, &s.name, s.arity)?;
            sig.skeleton.push(s);
        }
        for s in number {
            sig.insert(SymbolKind::Number, &s.name, s.arity)?;
            sig.number.push(s);
        }
        for a in aux {
            sig.push_aux(a)?;
        }
        Ok(sig)
    }

    /// Shorthand for a signature with only number functions.
    pub fn numbers(symbols: &[(&str, usize)]) -> Result<Self, SignatureError> {
        Self::new(
            vec![],
            symbols.iter().map(|&(n, a)| Symbol::new(n, a)).collect(),
            vec![],
        )
    }

    fn insert(&mut self, kind: SymbolKind, name: &str, arity: usize) -> Result<(), SignatureError> {
        if self.lookup.contains_key(name) {
            return Err(SignatureError::Duplicate(name.to_string()));
        }
        self.lookup.insert(name.to_string(), (kind, arity));
        Ok(())
    }

    fn push_aux(&mut self, a: AuxSymbol) -> Result<(), SignatureError> {
        let kind = match a.kind {
            AuxKind::Index => SymbolKind::AuxIndex,
            AuxKind::Number => SymbolKind::AuxNumber,
        };
        self.insert(kind, &a.name, a.arity)?;
        self.aux.push(a);
        Ok(())
    }

    /// Declares a 0/1-valued number function standing for a skeleton predicate.
    pub fn add_predicate(&mut self, name: &str, arity: usize) -> Result<(), SignatureError> {
        self.insert(SymbolKind::Number, name, arity)?;
        self.number.push(Symbol::new(name, arity));
        self.predicates.insert(name.to_string());
        Ok(())
    }

    /// Returns a copy extended with further auxiliary symbols.
    pub fn with_aux(&self, extra: impl IntoIterator<Item = AuxSymbol>) -> Result<Self, SignatureError> {
        let mut sig = self.clone();
        for a in extra {
            sig.push_aux(a)?;
        }
        Ok(sig)
    }

    pub fn skeleton_functions(&self) -> &[Symbol] {
        &self.skeleton
    }

    pub fn number_functions(&self) -> &[Symbol] {
        &self.number
    }

    pub fn aux_symbols(&self) -> &[AuxSymbol] {
        &self.aux
    }

    pub fn is_predicate(&self, name: &str) -> bool {
        self.predicates.contains(name)
    }

    pub fn lookup(&self, name: &str) -> Option<(SymbolKind, usize)> {
        self.lookup.get(name).copied()
    }

    /// Position of a skeleton function in `L_s`.
    pub fn skeleton_position(&self, name: &str) -> Option<usize> {
        self.skeleton.iter().position(|s| s.name == name)
    }

    pub fn number_position(&self, name: &str) -> Option<usize> {
        self.number.iter().position(|s| s.name == name)
    }

    /// Symbols that appear in `enc(D)`, in encoding order: the skeleton
    /// functions (as rank-valued functions) followed by `L_f`.
    pub fn encoded_symbols(&self) -> impl Iterator<Item = (SymbolKind, &Symbol)> {
        self.skeleton
            .iter()
            .map(|s| (SymbolKind::Skeleton, s))
            .chain(self.number.iter().map(|s| (SymbolKind::Number, s)))
    }

    /// Parses the signature file format: one declaration per line,
    /// `skeleton|number|predicate|aux-index|aux-number <name>/<arity>`.
    /// Blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, SignatureError> {
        let mut sig = Signature::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |message: String| SignatureError::Syntax {
                line: i + 1,
                message,
            };
            let (kind, decl) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| syntax(format!("expected `<kind> <name>/<arity>`, got `{line}`")))?;
            let (name, arity) = parse_decl(decl.trim()).ok_or_else(|| syntax(format!("bad declaration `{}`", decl.trim())))?;
            match kind {
                "skeleton" => {
                    sig.insert(SymbolKind::Skeleton, &name, arity)?;
                    sig.skeleton.push(Symbol::new(name, arity));
                }
                "number" => {
                    sig.insert(SymbolKind::Number, &name, arity)?;
                    sig.number.push(Symbol::new(name, arity));
                }
                "predicate" => sig.add_predicate(&name, arity)?,
                "aux-index" => sig.push_aux(AuxSymbol::new(name, arity, AuxKind::Index))?,
                "aux-number" => sig.push_aux(AuxSymbol::new(name, arity, AuxKind::Number))?,
                other => return Err(syntax(format!("unknown symbol kind `{other}`"))),
            }
        }
        Ok(sig)
    }
}

fn parse_decl(decl: &str) -> Option<(String, usize)> {
    let (name, arity) = decl.split_once('/')?;
    let name = name.trim();
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$') {
        return None;
    }
    Some((name.to_string(), arity.trim().parse().ok()?))
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.skeleton {
            writeln!(f, "skeleton {}/{}", s.name, s.arity)?;
        }
        for s in &self.number {
            let kind = if self.predicates.contains(&s.name) {
                "predicate"
            } else {
                "number"
            };
            writeln!(f, "{kind} {}/{}", s.name, s.arity)?;
        }
        for a in &self.aux {
            let kind = match a.kind {
                AuxKind::Index => "aux-index",
                AuxKind::Number => "aux-number",
            };
            writeln!(f, "{kind} {}/{}", a.name, a.arity)?;
        }
        Ok(())
    }
}
