//! Terms, theory-specific (atomic) formulas, signed formulas and the
//! positional machinery shared by every other module.
//!
//! A theory-specific formula is stored as a [`Term`] whose head is a
//! predicate symbol, so its abstract representation is just the term tree.
//! Positions address nodes of that tree.

mod fo;
pub(crate) mod parse;
mod pretty;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use fo::FoFormula;
pub use parse::{ParseError, ParseErrorKind, VarScope};
pub use pretty::{glyph, Pretty};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("symbol `{symbol}` has {found} occurrence(s), occurrence {requested} requested")]
    OccurrenceOutOfRange {
        symbol: String,
        requested: usize,
        found: usize,
    },
    #[error("pattern variable `{0}` is not bound by the substitution")]
    UnboundPatternVariable(String),
    #[error("invalid position `{0}`")]
    InvalidPosition(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymbolKind {
    Function,
    Predicate,
    ObjectVariable,
    PatternVariable,
    Skolem,
}

impl SymbolKind {
    pub fn is_variable(self) -> bool {
        matches!(self, SymbolKind::ObjectVariable | SymbolKind::PatternVariable)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    name: Arc<str>,
    kind: SymbolKind,
    arity: usize,
}

impl Symbol {
    fn new(name: &str, kind: SymbolKind, arity: usize) -> Self {
        Symbol {
            name: Arc::from(name),
            kind,
            arity,
        }
    }

    pub fn function(name: &str, arity: usize) -> Self {
        Self::new(name, SymbolKind::Function, arity)
    }

    pub fn predicate(name: &str, arity: usize) -> Self {
        Self::new(name, SymbolKind::Predicate, arity)
    }

    pub fn skolem(name: &str, arity: usize) -> Self {
        Self::new(name, SymbolKind::Skolem, arity)
    }

    pub fn object_var(name: &str) -> Self {
        Self::new(name, SymbolKind::ObjectVariable, 0)
    }

    pub fn pattern_var(name: &str) -> Self {
        Self::new(name, SymbolKind::PatternVariable, 0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_variable(&self) -> bool {
        self.kind.is_variable()
    }

    /// Same kind and arity: the node-matching criterion of syntactic isomorphism.
    pub fn same_shape(&self, other: &Symbol) -> bool {
        self.kind == other.kind && self.arity == other.arity
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A first-order term. Also used as the abstract representation of an atom,
/// in which case the head is a predicate symbol.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term {
    head: Symbol,
    args: Arc<[Term]>,
}

impl Term {
    pub fn var(symbol: Symbol) -> Self {
        debug_assert!(symbol.is_variable());
        Term {
            head: symbol,
            args: Arc::from(Vec::new()),
        }
    }

    pub fn app(head: Symbol, args: Vec<Term>) -> Self {
        debug_assert_eq!(head.arity(), args.len(), "arity mismatch for {}", head);
        Term {
            head,
            args: Arc::from(args),
        }
    }

    pub fn constant(head: Symbol) -> Self {
        Term::app(head, Vec::new())
    }

    pub fn head(&self) -> &Symbol {
        &self.head
    }

    pub fn args(&self) -> &[Term] {
        &self.args
    }

    pub fn is_variable(&self) -> bool {
        self.head.is_variable()
    }

    /// Edges on the longest root-to-leaf path.
    pub fn height(&self) -> usize {
        self.args.iter().map(|a| a.height() + 1).max().unwrap_or(0)
    }

    /// Number of nodes of the tree.
    pub fn size(&self) -> usize {
        1 + self.args.iter().map(Term::size).sum::<usize>()
    }

    pub fn subterm(&self, path: &[usize]) -> Option<&Term> {
        let mut t = self;
        for &i in path {
            t = t.args.get(i.checked_sub(1)?)?;
        }
        Some(t)
    }

    /// Replaces the head symbol at `path` by `symbol`, keeping the arguments.
    /// The caller guarantees that both symbols have the same arity.
    pub fn with_symbol_at(&self, path: &[usize], symbol: &Symbol) -> Term {
        match path.split_first() {
            None => {
                debug_assert_eq!(symbol.arity(), self.head.arity());
                Term {
                    head: symbol.clone(),
                    args: self.args.clone(),
                }
            }
            Some((&i, rest)) => {
                let mut args = self.args.to_vec();
                args[i - 1] = args[i - 1].with_symbol_at(rest, symbol);
                Term {
                    head: self.head.clone(),
                    args: Arc::from(args),
                }
            }
        }
    }

    /// All nodes in pre-order (leftmost-outermost), with their root-to-node paths.
    pub fn preorder(&self) -> Vec<(Vec<usize>, &Symbol)> {
        fn walk<'a>(t: &'a Term, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, &'a Symbol)>) {
            out.push((path.clone(), &t.head));
            for (i, a) in t.args.iter().enumerate() {
                path.push(i + 1);
                walk(a, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn variables(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_variables(&mut out);
        out
    }

    fn collect_variables(&self, out: &mut BTreeSet<Symbol>) {
        if self.head.is_variable() {
            out.insert(self.head.clone());
        }
        for a in self.args.iter() {
            a.collect_variables(out);
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.preorder().into_iter().map(|(_, s)| s.clone()).collect()
    }

    pub fn contains_kind(&self, kind: SymbolKind) -> bool {
        self.head.kind == kind || self.args.iter().any(|a| a.contains_kind(kind))
    }

    /// Ordered-tree isomorphism where nodes match on kind and arity.
    pub fn shape_iso(&self, other: &Term) -> bool {
        self.head.same_shape(&other.head)
            && self
                .args
                .iter()
                .zip(other.args.iter())
                .all(|(a, b)| a.shape_iso(b))
    }

    pub fn rename_variables(&self, map: &BTreeMap<Symbol, Symbol>) -> Term {
        if let Some(s) = map.get(&self.head) {
            return Term::var(s.clone());
        }
        if self.args.is_empty() {
            return self.clone();
        }
        Term::app(
            self.head.clone(),
            self.args.iter().map(|a| a.rename_variables(map)).collect(),
        )
    }

    pub fn replace_variables(&self, map: &BTreeMap<Symbol, Term>) -> Term {
        if let Some(t) = map.get(&self.head) {
            return t.clone();
        }
        if self.args.is_empty() {
            return self.clone();
        }
        Term::app(
            self.head.clone(),
            self.args.iter().map(|a| a.replace_variables(map)).collect(),
        )
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if self.head.arity() > 0 {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{}", a)?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A theory-specific formula: a predicate applied to terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom(Term);

impl Atom {
    pub fn new(predicate: Symbol, args: Vec<Term>) -> Self {
        debug_assert_eq!(predicate.kind(), SymbolKind::Predicate);
        Atom(Term::app(predicate, args))
    }

    pub(crate) fn from_term(term: Term) -> Self {
        debug_assert_eq!(term.head().kind(), SymbolKind::Predicate);
        Atom(term)
    }

    pub fn predicate(&self) -> &Symbol {
        self.0.head()
    }

    pub fn args(&self) -> &[Term] {
        self.0.args()
    }

    /// The abstract representation.
    pub fn tree(&self) -> &Term {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.height()
    }

    pub fn size(&self) -> usize {
        self.0.size()
    }

    pub fn variables(&self) -> BTreeSet<Symbol> {
        self.0.variables()
    }

    pub fn symbol_at(&self, position: &Position) -> Option<&Symbol> {
        self.0.subterm(&position.0).map(Term::head)
    }

    pub fn with_symbol_at(&self, position: &Position, symbol: &Symbol) -> Atom {
        Atom(self.0.with_symbol_at(&position.0, symbol))
    }

    /// Non-variable symbol occurrences in pre-order, each tagged with its
    /// 1-based per-symbol occurrence index.
    pub fn occurrences(&self) -> Vec<Occurrence> {
        let mut counts: BTreeMap<&Symbol, usize> = BTreeMap::new();
        let mut out = Vec::new();
        for (path, sym) in self.0.preorder() {
            if sym.is_variable() {
                continue;
            }
            let n = counts.entry(sym).or_insert(0);
            *n += 1;
            out.push(Occurrence {
                symbol: sym.clone(),
                index: *n,
                position: Position(path),
            });
        }
        out
    }

    /// Position of the `n`-th (1-based, pre-order) occurrence of `symbol`.
    pub fn position_of_occurrence(&self, n: usize, symbol: &Symbol) -> Result<Position, SyntaxError> {
        let hits: Vec<Vec<usize>> = self
            .0
            .preorder()
            .into_iter()
            .filter(|(_, s)| *s == symbol)
            .map(|(p, _)| p)
            .collect();
        match n.checked_sub(1).and_then(|i| hits.get(i)) {
            Some(p) => Ok(Position(p.clone())),
            None => Err(SyntaxError::OccurrenceOutOfRange {
                symbol: symbol.name().to_string(),
                requested: n,
                found: hits.len(),
            }),
        }
    }

    pub fn syntactically_isomorphic(&self, other: &Atom) -> bool {
        self.0.shape_iso(&other.0) && self.variables() == other.variables()
    }

    pub fn rename_variables(&self, map: &BTreeMap<Symbol, Symbol>) -> Atom {
        Atom(self.0.rename_variables(map))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Occurrence {
    pub symbol: Symbol,
    pub index: usize,
    pub position: Position,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Assert,
    Deny,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Assert => Sign::Deny,
            Sign::Deny => Sign::Assert,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Assert => "+",
            Sign::Deny => "-",
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Sign {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" => Ok(Sign::Assert),
            "-" | "−" => Ok(Sign::Deny),
            _ => Err(format!("invalid sign `{}`", s)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedFormula {
    pub sign: Sign,
    pub atom: Atom,
}

impl SignedFormula {
    pub fn new(sign: Sign, atom: Atom) -> Self {
        SignedFormula { sign, atom }
    }

    pub fn assert(atom: Atom) -> Self {
        Self::new(Sign::Assert, atom)
    }

    pub fn deny(atom: Atom) -> Self {
        Self::new(Sign::Deny, atom)
    }

    pub fn conjugate(&self) -> SignedFormula {
        SignedFormula::new(self.sign.flip(), self.atom.clone())
    }

    pub fn is_conjugate_of(&self, other: &SignedFormula) -> bool {
        self.sign != other.sign && self.atom == other.atom
    }

    /// Sign-insensitive: compares the underlying formulas only.
    pub fn syntactically_isomorphic(&self, other: &SignedFormula) -> bool {
        self.atom.syntactically_isomorphic(&other.atom)
    }

    pub fn variables(&self) -> BTreeSet<Symbol> {
        self.atom.variables()
    }
}

impl fmt::Display for SignedFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.sign, self.atom)
    }
}

/// Address of a node in an abstract representation.
///
/// Stored root-to-node; rendered with the child index prepended at each
/// step, so the second child of the root's second child prints as `2·2`
/// and the first child of the root's second child prints as `1·2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn from_path(path: Vec<usize>) -> Self {
        Position(path)
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (k, i) in self.0.iter().rev().enumerate() {
            if k > 0 {
                f.write_str("·")?;
            }
            write!(f, "{}", i)?;
        }
        Ok(())
    }
}

impl FromStr for Position {
    type Err = SyntaxError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "ε" || s.is_empty() {
            return Ok(Position::root());
        }
        let mut path = s
            .split(['·', '.'])
            .map(|p| match p.trim().parse::<usize>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(SyntaxError::InvalidPosition(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        path.reverse();
        Ok(Position(path))
    }
}

/// Mapping from pattern variables to object-level terms.
pub type Substitution = BTreeMap<Symbol, Term>;

/// One-way matching of `pattern` against `target`, extending `subst`.
/// Only pattern variables bind; every other symbol is rigid.
pub fn match_term(pattern: &Term, target: &Term, subst: &mut Substitution) -> bool {
    if pattern.head.kind == SymbolKind::PatternVariable {
        return match subst.get(&pattern.head) {
            Some(bound) => bound == target,
            None => {
                subst.insert(pattern.head.clone(), target.clone());
                true
            }
        };
    }
    pattern.head == target.head
        && pattern
            .args
            .iter()
            .zip(target.args.iter())
            .all(|(p, t)| match_term(p, t, subst))
}

pub fn match_signed(pattern: &SignedFormula, target: &SignedFormula, subst: &mut Substitution) -> bool {
    if pattern.sign != target.sign {
        return false;
    }
    let snapshot = subst.clone();
    if match_term(pattern.atom.tree(), target.atom.tree(), subst) {
        true
    } else {
        *subst = snapshot;
        false
    }
}

pub fn match_pattern(pattern: &SignedFormula, target: &SignedFormula) -> Option<Substitution> {
    let mut subst = Substitution::new();
    match_signed(pattern, target, &mut subst).then_some(subst)
}

pub fn apply_to_term(pattern: &Term, subst: &Substitution) -> Result<Term, SyntaxError> {
    if pattern.head.kind == SymbolKind::PatternVariable {
        return subst
            .get(&pattern.head)
            .cloned()
            .ok_or_else(|| SyntaxError::UnboundPatternVariable(pattern.head.name().to_string()));
    }
    if pattern.args.is_empty() {
        return Ok(pattern.clone());
    }
    let args = pattern
        .args
        .iter()
        .map(|a| apply_to_term(a, subst))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Term::app(pattern.head.clone(), args))
}

pub fn apply_substitution(pattern: &SignedFormula, subst: &Substitution) -> Result<SignedFormula, SyntaxError> {
    Ok(SignedFormula::new(
        pattern.sign,
        Atom(apply_to_term(pattern.atom.tree(), subst)?),
    ))
}

/// The declared non-variable symbols a formula text may refer to.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeMap<String, Symbol>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns false if the name is already taken.
    pub fn declare(&mut self, symbol: Symbol) -> bool {
        debug_assert!(!symbol.is_variable());
        if self.symbols.contains_key(symbol.name()) {
            return false;
        }
        self.symbols.insert(symbol.name().to_string(), symbol);
        true
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.symbols.get(name)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.symbols.values()
    }

    pub fn of_kind(&self, kind: SymbolKind) -> impl Iterator<Item = &Symbol> {
        self.symbols.values().filter(move |s| s.kind() == kind)
    }

    /// Parses a single signed formula such as `+ in(x, inter(y, z))`.
    pub fn parse_signed(&self, text: &str, scope: VarScope) -> Result<SignedFormula, ParseError> {
        parse::Parser::new(text, self)?.signed_formula_eof(&scope)
    }

    pub fn parse_atom(&self, text: &str, scope: VarScope) -> Result<Atom, ParseError> {
        parse::Parser::new(text, self)?.atom_eof(&scope)
    }
}
