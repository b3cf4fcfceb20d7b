//! Tokenizer and recursive-descent parsing for terms, atoms, signed formulas
//! and first-order formulas. Theory files and exercise files build on this.

use std::fmt;

use thiserror::Error;

use super::{Atom, FoFormula, Sign, SignedFormula, Signature, Symbol, SymbolKind, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("undeclared symbol `{0}`")]
    UndeclaredSymbol(String),
    #[error("symbol `{name}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("`{name}` is a {found:?} symbol where a {expected:?} was expected")]
    WrongKind {
        name: String,
        expected: SymbolKind,
        found: SymbolKind,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Nat(usize),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Lt,
    Plus,
    Minus,
    Arrow,
    Iff,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{}`", s),
            Tok::Nat(n) => write!(f, "`{}`", n),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Lt => f.write_str("`<`"),
            Tok::Plus => f.write_str("`+`"),
            Tok::Minus => f.write_str("`-`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::Iff => f.write_str("`<->`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

const KEYWORDS: &[&str] = &["forall", "exists", "not", "and", "or", "true", "false"];

pub(crate) fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

pub(crate) fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let push = |out: &mut Vec<Token>, tok| out.push(Token { tok, line: tl, col: tc });
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            push(&mut out, Tok::Ident(s));
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            col += i - start;
            let n = s.parse().map_err(|_| ParseError {
                line: tl,
                col: tc,
                kind: ParseErrorKind::Syntax(format!("number `{}` out of range", s)),
            })?;
            push(&mut out, Tok::Nat(n));
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let (tok, len) = if rest.starts_with("<->") {
            (Tok::Iff, 3)
        } else if rest.starts_with("->") {
            (Tok::Arrow, 2)
        } else {
            let t = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ',' => Tok::Comma,
                '.' => Tok::Dot,
                ':' => Tok::Colon,
                '<' => Tok::Lt,
                '+' => Tok::Plus,
                '-' | '−' => Tok::Minus,
                _ => {
                    return Err(ParseError {
                        line: tl,
                        col: tc,
                        kind: ParseErrorKind::Syntax(format!("unexpected character `{}`", c)),
                    })
                }
            };
            (t, 1)
        };
        i += len;
        col += len;
        push(&mut out, tok);
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

/// How identifiers that are not declared symbols are read.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VarScope {
    /// Exercise text: free identifiers are object variables.
    Object,
    /// Rule schemas: free identifiers are pattern variables.
    Pattern,
    /// Axioms: only the listed (quantifier-bound) identifiers are variables.
    Bound(Vec<String>),
}

pub(crate) struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    sig: &'a Signature,
}

impl<'a> Parser<'a> {
    pub fn new(src: &str, sig: &'a Signature) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            sig,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn error_at(&self, k: usize, kind: ParseErrorKind) -> ParseError {
        let t = &self.toks[k.min(self.toks.len() - 1)];
        ParseError {
            line: t.line,
            col: t.col,
            kind,
        }
    }

    pub fn error(&self, kind: ParseErrorKind) -> ParseError {
        self.error_at(self.pos, kind)
    }

    pub fn unexpected(&self, what: &str) -> ParseError {
        self.error(ParseErrorKind::Syntax(format!("expected {}, found {}", what, self.peek())))
    }

    pub fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    pub fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("identifier")),
        }
    }

    pub fn nat(&mut self) -> Result<usize, ParseError> {
        match self.peek().clone() {
            Tok::Nat(n) => {
                self.bump();
                Ok(n)
            }
            _ => Err(self.unexpected("number")),
        }
    }

    pub fn at_eof(&self) -> bool {
        *self.peek() == Tok::Eof
    }

    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn line(&self) -> usize {
        self.toks[self.pos].line
    }

    fn arguments(&mut self, scope: &VarScope) -> Result<Vec<Term>, ParseError> {
        self.expect(Tok::LParen)?;
        let mut args = vec![self.term(scope)?];
        while *self.peek() == Tok::Comma {
            self.bump();
            args.push(self.term(scope)?);
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }

    fn application(&mut self, expected: &[SymbolKind], scope: &VarScope) -> Result<Term, ParseError> {
        let at = self.pos;
        let name = self.ident()?;
        let symbol = self
            .sig
            .get(&name)
            .cloned()
            .ok_or_else(|| self.error_at(at, ParseErrorKind::UndeclaredSymbol(name.clone())))?;
        if !expected.contains(&symbol.kind()) {
            return Err(self.error_at(
                at,
                ParseErrorKind::WrongKind {
                    name,
                    expected: expected[0],
                    found: symbol.kind(),
                },
            ));
        }
        let args = self.arguments(scope)?;
        if args.len() != symbol.arity() {
            return Err(self.error_at(
                at,
                ParseErrorKind::ArityMismatch {
                    name,
                    expected: symbol.arity(),
                    found: args.len(),
                },
            ));
        }
        Ok(Term::app(symbol, args))
    }

    pub fn term(&mut self, scope: &VarScope) -> Result<Term, ParseError> {
        if *self.peek_at(1) == Tok::LParen {
            return self.application(&[SymbolKind::Function, SymbolKind::Skolem], scope);
        }
        let at = self.pos;
        let name = self.ident()?;
        if is_keyword(&name) {
            return Err(self.error_at(at, ParseErrorKind::Syntax(format!("unexpected keyword `{}`", name))));
        }
        if let VarScope::Bound(bound) = scope {
            if bound.contains(&name) {
                return Ok(Term::var(Symbol::object_var(&name)));
            }
        }
        if let Some(sym) = self.sig.get(&name) {
            return match sym.kind() {
                SymbolKind::Function | SymbolKind::Skolem if sym.arity() == 0 => Ok(Term::constant(sym.clone())),
                SymbolKind::Function | SymbolKind::Skolem => Err(self.error_at(
                    at,
                    ParseErrorKind::ArityMismatch {
                        name,
                        expected: sym.arity(),
                        found: 0,
                    },
                )),
                kind => Err(self.error_at(
                    at,
                    ParseErrorKind::WrongKind {
                        name,
                        expected: SymbolKind::Function,
                        found: kind,
                    },
                )),
            };
        }
        match scope {
            VarScope::Object => Ok(Term::var(Symbol::object_var(&name))),
            VarScope::Pattern => Ok(Term::var(Symbol::pattern_var(&name))),
            VarScope::Bound(_) => Err(self.error_at(at, ParseErrorKind::UnboundVariable(name))),
        }
    }

    pub fn atom(&mut self, scope: &VarScope) -> Result<Atom, ParseError> {
        Ok(Atom::from_term(self.application(&[SymbolKind::Predicate], scope)?))
    }

    pub fn sign(&mut self) -> Result<Sign, ParseError> {
        match self.peek() {
            Tok::Plus => {
                self.bump();
                Ok(Sign::Assert)
            }
            Tok::Minus => {
                self.bump();
                Ok(Sign::Deny)
            }
            _ => Err(self.unexpected("sign `+` or `-`")),
        }
    }

    pub fn signed_formula(&mut self, scope: &VarScope) -> Result<SignedFormula, ParseError> {
        let sign = self.sign()?;
        Ok(SignedFormula::new(sign, self.atom(scope)?))
    }

    pub fn signed_formula_eof(&mut self, scope: &VarScope) -> Result<SignedFormula, ParseError> {
        let sf = self.signed_formula(scope)?;
        if !self.at_eof() {
            return Err(self.unexpected("end of input"));
        }
        Ok(sf)
    }

    pub fn atom_eof(&mut self, scope: &VarScope) -> Result<Atom, ParseError> {
        let a = self.atom(scope)?;
        if !self.at_eof() {
            return Err(self.unexpected("end of input"));
        }
        Ok(a)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    /// Full first-order formula; precedence not > and > or > -> > <->.
    pub fn formula(&mut self, bound: &mut Vec<String>) -> Result<FoFormula, ParseError> {
        let mut lhs = self.implication(bound)?;
        while *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.implication(bound)?;
            lhs = FoFormula::Iff(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn implication(&mut self, bound: &mut Vec<String>) -> Result<FoFormula, ParseError> {
        let lhs = self.disjunction(bound)?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication(bound)?;
            return Ok(FoFormula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self, bound: &mut Vec<String>) -> Result<FoFormula, ParseError> {
        let mut lhs = self.conjunction(bound)?;
        while self.is_kw("or") {
            self.bump();
            let rhs = self.conjunction(bound)?;
            lhs = FoFormula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self, bound: &mut Vec<String>) -> Result<FoFormula, ParseError> {
        let mut lhs = self.unary(bound)?;
        while self.is_kw("and") {
            self.bump();
            let rhs = self.unary(bound)?;
            lhs = FoFormula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self, bound: &mut Vec<String>) -> Result<FoFormula, ParseError> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let f = self.formula(bound)?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(kw) if kw == "not" => {
                self.bump();
                Ok(FoFormula::Not(Box::new(self.unary(bound)?)))
            }
            Tok::Ident(kw) if kw == "true" => {
                self.bump();
                Ok(FoFormula::Top)
            }
            Tok::Ident(kw) if kw == "false" => {
                self.bump();
                Ok(FoFormula::Bottom)
            }
            Tok::Ident(kw) if kw == "forall" || kw == "exists" => {
                self.bump();
                let mut vars = Vec::new();
                while let Tok::Ident(v) = self.peek().clone() {
                    if is_keyword(&v) {
                        break;
                    }
                    if self.sig.get(&v).is_some() {
                        return Err(self.error(ParseErrorKind::Syntax(format!(
                            "`{}` is a declared symbol and cannot be bound",
                            v
                        ))));
                    }
                    self.bump();
                    vars.push(v);
                }
                if vars.is_empty() {
                    return Err(self.unexpected("bound variable"));
                }
                self.expect(Tok::Dot)?;
                let depth = bound.len();
                bound.extend(vars.iter().cloned());
                let body = self.formula(bound);
                bound.truncate(depth);
                let mut f = body?;
                for v in vars.iter().rev() {
                    let var = Symbol::object_var(v);
                    f = if kw == "forall" {
                        FoFormula::ForAll(var, Box::new(f))
                    } else {
                        FoFormula::Exists(var, Box::new(f))
                    };
                }
                Ok(f)
            }
            Tok::Ident(_) => Ok(FoFormula::Atom(self.atom(&VarScope::Bound(bound.clone()))?)),
            _ => Err(self.unexpected("formula")),
        }
    }
}
