//! Definitional theories: a signature, closed definitional axioms and a
//! well-founded precedence on predicate symbols.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::parse::{is_keyword, Parser, Tok};
use crate::syntax::{FoFormula, ParseError, ParseErrorKind, Signature, Symbol, SymbolKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    pub name: String,
    pub formula: FoFormula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Theory {
    pub name: String,
    functions: Vec<Symbol>,
    predicates: Vec<Symbol>,
    pub axioms: Vec<Axiom>,
    precedence: Vec<(Symbol, Symbol)>,
    signature: Signature,
    closure: BTreeSet<(Symbol, Symbol)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("precedence cycle {}", .0.join(" < "))]
    PrecedenceCycle(Vec<String>),
    #[error("precedence pair mentions `{0}`, which is not a declared predicate")]
    PrecedenceNotPredicate(String),
    #[error("axiom `{axiom}` is not closed: free variable(s) {}", .vars.join(", "))]
    NotClosed { axiom: String, vars: Vec<String> },
    #[error("axiom `{axiom}`: axioms must not contain ⊥ or ⊤")]
    TruthConstant { axiom: String },
    #[error("axiom `{axiom}` uses undeclared symbol `{symbol}`")]
    UndeclaredSymbol { axiom: String, symbol: String },
    #[error("axiom `{axiom}` uses `{symbol}` with the wrong arity or kind")]
    BadSymbolUse { axiom: String, symbol: String },
    #[error("duplicate axiom name `{0}`")]
    DuplicateAxiom(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoryError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: symbol `{name}` declared twice")]
    DuplicateSymbol { name: String, line: usize },
    #[error("{}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

impl Theory {
    /// Builds a theory without checking it; see [`Theory::validate`].
    pub fn new(
        name: &str,
        symbols: Vec<Symbol>,
        axioms: Vec<Axiom>,
        precedence: Vec<(Symbol, Symbol)>,
    ) -> Self {
        let mut signature = Signature::new();
        let mut functions = Vec::new();
        let mut predicates = Vec::new();
        for s in symbols {
            if signature.declare(s.clone()) {
                match s.kind() {
                    SymbolKind::Predicate => predicates.push(s),
                    _ => functions.push(s),
                }
            }
        }
        let closure = transitive_closure(&precedence);
        Theory {
            name: name.to_string(),
            functions,
            predicates,
            axioms,
            precedence,
            signature,
            closure,
        }
    }

    pub fn functions(&self) -> &[Symbol] {
        &self.functions
    }

    pub fn predicates(&self) -> &[Symbol] {
        &self.predicates
    }

    pub fn precedence(&self) -> &[(Symbol, Symbol)] {
        &self.precedence
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// `p < q` in the transitive closure of the declared pairs.
    pub fn less(&self, p: &Symbol, q: &Symbol) -> bool {
        self.closure.contains(&(p.clone(), q.clone()))
    }

    pub fn axiom(&self, name: &str) -> Option<&Axiom> {
        self.axioms.iter().find(|a| a.name == name)
    }

    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut out = Vec::new();
        for (p, q) in &self.precedence {
            for s in [p, q] {
                if self.signature.get(s.name()) != Some(s) || s.kind() != SymbolKind::Predicate {
                    out.push(Violation::PrecedenceNotPredicate(s.name().to_string()));
                }
            }
        }
        if let Some(cycle) = find_cycle(&self.precedence) {
            out.push(Violation::PrecedenceCycle(cycle));
        }
        let mut seen = BTreeSet::new();
        for ax in &self.axioms {
            if !seen.insert(ax.name.as_str()) {
                out.push(Violation::DuplicateAxiom(ax.name.clone()));
            }
            let free = ax.formula.free_variables();
            if !free.is_empty() {
                out.push(Violation::NotClosed {
                    axiom: ax.name.clone(),
                    vars: free.iter().map(|v| v.name().to_string()).collect(),
                });
            }
            if ax.formula.contains_truth_constants() {
                out.push(Violation::TruthConstant { axiom: ax.name.clone() });
            }
            let mut bad = BTreeMap::new();
            ax.formula.for_each_atom(&mut |a| {
                for (_, s) in a.tree().preorder() {
                    if s.is_variable() {
                        continue;
                    }
                    match self.signature.get(s.name()) {
                        None => {
                            bad.insert(s.name().to_string(), true);
                        }
                        Some(d) if d != s || d.kind() == SymbolKind::Skolem => {
                            bad.insert(s.name().to_string(), false);
                        }
                        _ => {}
                    }
                }
            });
            for (symbol, undeclared) in bad {
                out.push(if undeclared {
                    Violation::UndeclaredSymbol {
                        axiom: ax.name.clone(),
                        symbol,
                    }
                } else {
                    Violation::BadSymbolUse {
                        axiom: ax.name.clone(),
                        symbol,
                    }
                });
            }
        }
        if out.is_empty() {
            Ok(())
        } else {
            Err(out)
        }
    }
}

fn transitive_closure(pairs: &[(Symbol, Symbol)]) -> BTreeSet<(Symbol, Symbol)> {
    let mut closure: BTreeSet<(Symbol, Symbol)> = pairs.iter().cloned().collect();
    loop {
        let mut added = Vec::new();
        for (a, b) in &closure {
            for (c, d) in &closure {
                if b == c && !closure.contains(&(a.clone(), d.clone())) {
                    added.push((a.clone(), d.clone()));
                }
            }
        }
        if added.is_empty() {
            return closure;
        }
        closure.extend(added);
    }
}

/// A cycle `[a, b, ..., a]` in the precedence graph, if any.
fn find_cycle(pairs: &[(Symbol, Symbol)]) -> Option<Vec<String>> {
    let mut succ: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (p, q) in pairs {
        succ.entry(p.name()).or_default().push(q.name());
    }
    fn dfs<'a>(
        n: &'a str,
        succ: &BTreeMap<&'a str, Vec<&'a str>>,
        stack: &mut Vec<&'a str>,
        done: &mut BTreeSet<&'a str>,
    ) -> Option<Vec<String>> {
        if let Some(i) = stack.iter().position(|s| *s == n) {
            let mut cycle: Vec<String> = stack[i..].iter().map(|s| s.to_string()).collect();
            cycle.push(n.to_string());
            return Some(cycle);
        }
        if done.contains(n) {
            return None;
        }
        stack.push(n);
        for m in succ.get(n).into_iter().flatten() {
            if let Some(c) = dfs(m, succ, stack, done) {
                return Some(c);
            }
        }
        stack.pop();
        done.insert(n);
        None
    }
    let mut done = BTreeSet::new();
    for n in succ.keys() {
        if let Some(c) = dfs(n, &succ, &mut Vec::new(), &mut done) {
            return Some(c);
        }
    }
    None
}

/// Source of the bundled theory of sets.
pub const SETS_SOURCE: &str = include_str!("../data/sets.thy");

/// The bundled theory of sets.
pub fn sets_theory() -> Theory {
    parse_theory(SETS_SOURCE).expect("the bundled theory is valid")
}

/// Parses a theory document and validates it.
pub fn parse_theory(text: &str) -> Result<Theory, TheoryError> {
    // First pass: collect declarations so axioms may mention symbols declared later.
    let mut symbols = Vec::new();
    let mut names: BTreeSet<String> = BTreeSet::new();
    {
        let empty = Signature::new();
        let mut p = Parser::new(text, &empty)?;
        while !p.at_eof() {
            let kind = match p.peek() {
                Tok::Ident(s) if s == "function" => Some(SymbolKind::Function),
                Tok::Ident(s) if s == "predicate" => Some(SymbolKind::Predicate),
                _ => None,
            };
            let Some(kind) = kind else {
                p.bump();
                continue;
            };
            p.bump();
            let line = p.line();
            let at = p.pos();
            let name = p.ident()?;
            if is_keyword(&name) || is_decl_keyword(&name) {
                let msg = format!("`{}` is a reserved word", name);
                return Err(p.error_at(at, ParseErrorKind::Syntax(msg)).into());
            }
            let arity = p.nat()?;
            if !names.insert(name.clone()) {
                return Err(TheoryError::DuplicateSymbol { name, line });
            }
            symbols.push(match kind {
                SymbolKind::Predicate => Symbol::predicate(&name, arity),
                _ => Symbol::function(&name, arity),
            });
        }
    }
    let mut signature = Signature::new();
    for s in &symbols {
        signature.declare(s.clone());
    }

    let mut p = Parser::new(text, &signature)?;
    match p.peek() {
        Tok::Ident(s) if s == "theory" => {
            p.bump();
        }
        _ => return Err(p.unexpected("`theory`").into()),
    }
    let name = p.ident()?;
    let mut axioms = Vec::new();
    let mut precedence = Vec::new();
    while !p.at_eof() {
        let kw = match p.peek() {
            Tok::Ident(s) if is_decl_keyword(s) && s != "theory" => s.clone(),
            _ => return Err(p.unexpected("declaration").into()),
        };
        p.bump();
        match kw.as_str() {
            "function" | "predicate" => {
                p.ident()?;
                p.nat()?;
            }
            "order" => {
                let lhs = predicate_ref(&mut p, &signature)?;
                p.expect(Tok::Lt)?;
                let rhs = predicate_ref(&mut p, &signature)?;
                precedence.push((lhs, rhs));
            }
            "axiom" => {
                let name = p.ident()?;
                p.expect(Tok::Colon)?;
                let formula = p.formula(&mut Vec::new())?;
                axioms.push(Axiom { name, formula });
            }
            _ => unreachable!(),
        }
    }
    let theory = Theory::new(&name, symbols, axioms, precedence);
    theory.validate().map_err(TheoryError::Invalid)?;
    Ok(theory)
}

fn is_decl_keyword(s: &str) -> bool {
    matches!(s, "theory" | "function" | "predicate" | "order" | "axiom")
}

fn predicate_ref(p: &mut Parser<'_>, sig: &Signature) -> Result<Symbol, ParseError> {
    let at = p.pos();
    let name = p.ident()?;
    match sig.get(&name) {
        Some(s) if s.kind() == SymbolKind::Predicate => Ok(s.clone()),
        Some(s) => Err(p.error_at(
            at,
            ParseErrorKind::WrongKind {
                name,
                expected: SymbolKind::Predicate,
                found: s.kind(),
            },
        )),
        None => Err(p.error_at(at, ParseErrorKind::UndeclaredSymbol(name))),
    }
}

/// Renders in the theory-file grammar; the output parses back to an equal theory.
impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theory {}", self.name)?;
        for s in &self.functions {
            writeln!(f, "function {} {}", s, s.arity())?;
        }
        for s in &self.predicates {
            writeln!(f, "predicate {} {}", s, s.arity())?;
        }
        for (p, q) in &self.precedence {
            writeln!(f, "order {} < {}", p, q)?;
        }
        for ax in &self.axioms {
            writeln!(f, "axiom {}: {}", ax.name, ax.formula)?;
        }
        Ok(())
    }
}
