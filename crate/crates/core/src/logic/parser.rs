use std::sync::Arc;

use crate::rational::{self, Rational};

use super::signature::{Signature, SymbolKind};
use super::{Formula, IndexTerm, LogicError, NumberTerm};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(Rational),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Bang,
    Amp,
    Pipe,
    Arrow,
    DArrow,
    EqEq,
    Eq,
    Lt,
    Plus,
    Star,
    End,
}

const KEYWORDS: [&str; 7] = ["exists", "forall", "sign", "sum", "prod", "max", "chi"];

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(r) => format!("`{}`", rational::format(r)),
        Tok::End => "end of input".into(),
        other => {
            let s = match other {
                Tok::LParen => "(",
                Tok::RParen => ")",
                Tok::LBracket => "[",
                Tok::RBracket => "]",
                Tok::Comma => ",",
                Tok::Dot => ".",
                Tok::Bang => "!",
                Tok::Amp => "&",
                Tok::Pipe => "|",
                Tok::Arrow => "->",
                Tok::DArrow => "<->",
                Tok::EqEq => "==",
                Tok::Eq => "=",
                Tok::Lt => "<",
                Tok::Plus => "+",
                _ => "*",
            };
            format!("`{s}`")
        }
    }
}

struct Lexed {
    toks: Vec<(Tok, usize)>,
}

fn syntax_error(text: &str, offset: usize, message: String) -> LogicError {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    LogicError::Syntax {
        offset,
        line,
        column,
        message,
    }
}

fn lex(text: &str) -> Result<Lexed, LogicError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = |s: &[u8]| bytes[i..].starts_with(s);
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'$') {
                i += 1;
            }
            toks.push((Tok::Ident(text[start..i].to_string()), start));
            continue;
        } else if c.is_ascii_digit() || (c == b'-' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            i += 1;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < bytes.len() && bytes[i] == b'/' && bytes[i + 1].is_ascii_digit() {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let r = rational::parse(&text[start..i])
                .ok_or_else(|| syntax_error(text, start, format!("bad rational `{}`", &text[start..i])))?;
            toks.push((Tok::Num(r), start));
            continue;
        } else if two(b"<->") {
            i += 3;
            Tok::DArrow
        } else if two(b"->") {
            i += 2;
            Tok::Arrow
        } else if two(b"==") {
            i += 2;
            Tok::EqEq
        } else {
            i += 1;
            match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'[' => Tok::LBracket,
                b']' => Tok::RBracket,
                b',' => Tok::Comma,
                b'.' => Tok::Dot,
                b'!' => Tok::Bang,
                b'&' => Tok::Amp,
                b'|' => Tok::Pipe,
                b'=' => Tok::Eq,
                b'<' => Tok::Lt,
                b'+' => Tok::Plus,
                b'*' => Tok::Star,
                _ => {
                    let ch = text[start..].chars().next().unwrap_or('?');
                    return Err(syntax_error(text, start, format!("unexpected character `{ch}`")));
                }
            }
        };
        toks.push((tok, start));
    }
    toks.push((Tok::End, text.len()));
    Ok(Lexed { toks })
}

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    sig: &'a Signature,
}

type PResult<T> = Result<T, LogicError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[idx].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: String) -> PResult<T> {
        Err(syntax_error(self.text, self.offset(), message))
    }

    fn unexpected<T>(&self, wanted: &str) -> PResult<T> {
        self.error(format!("expected {wanted}, found {}", describe(self.peek())))
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&describe(&tok))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        if self.is_keyword("exists") || self.is_keyword("forall") {
            return self.quant();
        }
        self.iff()
    }

    fn quant(&mut self) -> PResult<Formula> {
        let exists = self.is_keyword("exists");
        self.bump();
        let v = self.ident()?;
        self.expect(Tok::Dot)?;
        let body = self.formula()?;
        Ok(if exists {
            Formula::exists(&v, body)
        } else {
            Formula::forall(&v, body)
        })
    }

    fn iff(&mut self) -> PResult<Formula> {
        let mut lhs = self.implication()?;
        while *self.peek() == Tok::DArrow {
            self.bump();
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let mut lhs = self.disj()?;
        while *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.disj()?;
            lhs = Formula::implies(lhs, rhs);
        }
        Ok(lhs)
    }

    fn disj(&mut self) -> PResult<Formula> {
        let mut lhs = self.conj()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            let rhs = self.conj()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conj(&mut self) -> PResult<Formula> {
        let mut lhs = self.neg()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.neg()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn neg(&mut self) -> PResult<Formula> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(Formula::not(self.neg()?));
        }
        if self.is_keyword("exists") || self.is_keyword("forall") {
            return self.quant();
        }
        self.atom()
    }

    fn atom(&mut self) -> PResult<Formula> {
        if *self.peek() == Tok::LParen {
            let save = self.pos;
            self.bump();
            let attempt = self.formula().and_then(|f| self.expect(Tok::RParen).map(|_| f));
            match attempt {
                Ok(f) => return Ok(f),
                Err(LogicError::Syntax { .. }) => self.pos = save,
                Err(e) => return Err(e),
            }
        }
        if self.starts_index_term() {
            let a = self.iterm()?;
            self.expect(Tok::EqEq)?;
            let b = self.iterm()?;
            return Ok(Formula::IndexEq(a, b));
        }
        let a = self.nterm()?;
        match self.peek() {
            Tok::Eq => {
                self.bump();
                Ok(Formula::NumEq(a, self.nterm()?))
            }
            Tok::Lt => {
                self.bump();
                Ok(Formula::NumLt(a, self.nterm()?))
            }
            _ => self.unexpected("`=` or `<`"),
        }
    }

    fn starts_index_term(&self) -> bool {
        let Tok::Ident(name) = self.peek() else {
            return false;
        };
        if KEYWORDS.contains(&name.as_str()) {
            return false;
        }
        if *self.peek_at(1) != Tok::LParen {
            return true;
        }
        self.sig.lookup(name).is_some_and(|(k, _)| k.is_index_valued())
    }

    fn args(&mut self) -> PResult<Vec<IndexTerm>> {
        self.expect(Tok::LParen)?;
        let mut args = Vec::new();
        if *self.peek() == Tok::RParen {
            self.bump();
            return Ok(args);
        }
        loop {
            args.push(self.iterm()?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => {
                    self.bump();
                    return Ok(args);
                }
                _ => return self.unexpected("`,` or `)`"),
            }
        }
    }

    fn iterm(&mut self) -> PResult<IndexTerm> {
        let name = self.ident()?;
        if *self.peek() != Tok::LParen {
            return Ok(IndexTerm::Var(name));
        }
        let kind = self.symbol_kind(&name)?;
        let args = self.args()?;
        match kind {
            SymbolKind::Skeleton => Ok(IndexTerm::SkeletonApp(name, args)),
            SymbolKind::AuxIndex => Ok(IndexTerm::AuxIndexApp(name, args)),
            _ => Err(LogicError::WrongKind(name)),
        }
    }

    fn symbol_kind(&self, name: &str) -> PResult<SymbolKind> {
        self.sig
            .lookup(name)
            .map(|(k, _)| k)
            .ok_or_else(|| LogicError::Undeclared(name.to_string()))
    }

    fn nterm(&mut self) -> PResult<NumberTerm> {
        let mut lhs = self.product()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            let rhs = self.product()?;
            lhs = NumberTerm::add(lhs, rhs);
        }
        Ok(lhs)
    }

    fn product(&mut self) -> PResult<NumberTerm> {
        let mut lhs = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            let rhs = self.factor()?;
            lhs = NumberTerm::mul(lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> PResult<NumberTerm> {
        match self.peek().clone() {
            Tok::Num(r) => {
                self.bump();
                Ok(NumberTerm::Const(r))
            }
            Tok::LParen => {
                self.bump();
                let t = self.nterm()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(kw) if kw == "sign" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let t = self.nterm()?;
                self.expect(Tok::RParen)?;
                Ok(NumberTerm::sign(t))
            }
            Tok::Ident(kw) if kw == "sum" || kw == "prod" || kw == "max" => {
                self.bump();
                let v = self.ident()?;
                self.expect(Tok::LParen)?;
                let body = Arc::new(self.nterm()?);
                self.expect(Tok::RParen)?;
                Ok(match kw.as_str() {
                    "sum" => NumberTerm::Sum(v, body),
                    "prod" => NumberTerm::Prod(v, body),
                    _ => NumberTerm::Max(v, body),
                })
            }
            Tok::Ident(kw) if kw == "chi" => {
                self.bump();
                self.expect(Tok::LBracket)?;
                let phi = self.formula()?;
                self.expect(Tok::RBracket)?;
                Ok(NumberTerm::chi(phi))
            }
            Tok::Ident(name) if !KEYWORDS.contains(&name.as_str()) => {
                if *self.peek_at(1) != Tok::LParen {
                    return self.error(format!("variable `{name}` used as a number term"));
                }
                let kind = self.symbol_kind(&name)?;
                self.bump();
                let args = self.args()?;
                match kind {
                    SymbolKind::Number => Ok(NumberTerm::NumApp(name, args)),
                    SymbolKind::AuxNumber => Ok(NumberTerm::AuxNumApp(name, args)),
                    _ => Err(LogicError::WrongKind(name)),
                }
            }
            _ => self.unexpected("a number term"),
        }
    }
}

fn parser<'a>(text: &'a str, sig: &'a Signature) -> PResult<Parser<'a>> {
    Ok(Parser {
        text,
        toks: lex(text)?.toks,
        pos: 0,
        sig,
    })
}

/// Parses a formula and checks it against `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, LogicError> {
    let mut p = parser(text, sig)?;
    let phi = p.formula()?;
    if *p.peek() != Tok::End {
        return p.unexpected("end of input");
    }
    phi.check(sig)?;
    Ok(phi)
}

pub fn parse_number_term(text: &str, sig: &Signature) -> Result<NumberTerm, LogicError> {
    let mut p = parser(text, sig)?;
    let t = p.nterm()?;
    if *p.peek() != Tok::End {
        return p.unexpected("end of input");
    }
    Formula::NumEq(t.clone(), NumberTerm::int(0)).check(sig)?;
    Ok(t)
}
