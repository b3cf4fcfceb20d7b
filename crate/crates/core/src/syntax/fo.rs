use std::collections::BTreeSet;
use std::fmt;

use super::{Symbol, Term};

type AtomF = super::Atom;

/// Full first-order formulas, as they appear in axioms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FoFormula {
    Bottom,
    Top,
    Atom(AtomF),
    Not(Box<FoFormula>),
    And(Box<FoFormula>, Box<FoFormula>),
    Or(Box<FoFormula>, Box<FoFormula>),
    Implies(Box<FoFormula>, Box<FoFormula>),
    Iff(Box<FoFormula>, Box<FoFormula>),
    ForAll(Symbol, Box<FoFormula>),
    Exists(Symbol, Box<FoFormula>),
}

use FoFormula::*;

impl FoFormula {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: FoFormula) -> Self {
        Not(Box::new(f))
    }

    pub fn and(a: FoFormula, b: FoFormula) -> Self {
        And(Box::new(a), Box::new(b))
    }

    pub fn or(a: FoFormula, b: FoFormula) -> Self {
        Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: FoFormula, b: FoFormula) -> Self {
        Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: FoFormula, b: FoFormula) -> Self {
        Iff(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `Top` for the empty list.
    pub fn conjunction(items: Vec<FoFormula>) -> Self {
        items.into_iter().reduce(FoFormula::and).unwrap_or(Top)
    }

    pub fn disjunction(items: Vec<FoFormula>) -> Self {
        items.into_iter().reduce(FoFormula::or).unwrap_or(Bottom)
    }

    pub fn free_variables(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Symbol>, out: &mut BTreeSet<Symbol>) {
        match self {
            Bottom | Top => {}
            Atom(a) => {
                for v in a.variables() {
                    if !bound.contains(&v) {
                        out.insert(v);
                    }
                }
            }
            Not(f) => f.collect_free(bound, out),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            ForAll(v, f) | Exists(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    pub fn contains_truth_constants(&self) -> bool {
        match self {
            Bottom | Top => true,
            Atom(_) => false,
            Not(f) | ForAll(_, f) | Exists(_, f) => f.contains_truth_constants(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.contains_truth_constants() || b.contains_truth_constants()
            }
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Bottom | Top | Atom(_) => true,
            Not(f) => f.is_quantifier_free(),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            ForAll(..) | Exists(..) => false,
        }
    }

    /// True when all quantifiers form a prefix over a quantifier-free matrix.
    pub fn is_prenex(&self) -> bool {
        match self {
            ForAll(_, f) | Exists(_, f) => f.is_prenex(),
            f => f.is_quantifier_free(),
        }
    }

    /// Atoms in order of first appearance.
    pub fn atoms(&self) -> Vec<AtomF> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<AtomF>) {
        match self {
            Bottom | Top => {}
            Atom(a) => {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
            Not(f) | ForAll(_, f) | Exists(_, f) => f.collect_atoms(out),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Visits every atom, in order, with repetitions.
    pub fn for_each_atom(&self, f: &mut dyn FnMut(&AtomF)) {
        match self {
            Bottom | Top => {}
            Atom(a) => f(a),
            Not(g) | ForAll(_, g) | Exists(_, g) => g.for_each_atom(f),
            And(a, b) | Or(a, b) | Implies(a, b) | Iff(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
        }
    }

    /// Evaluates a quantifier-free formula under a valuation of its atoms.
    pub fn eval(&self, valuation: &dyn Fn(&AtomF) -> bool) -> bool {
        match self {
            Bottom => false,
            Top => true,
            Atom(a) => valuation(a),
            Not(f) => !f.eval(valuation),
            And(a, b) => a.eval(valuation) && b.eval(valuation),
            Or(a, b) => a.eval(valuation) || b.eval(valuation),
            Implies(a, b) => !a.eval(valuation) || b.eval(valuation),
            Iff(a, b) => a.eval(valuation) == b.eval(valuation),
            ForAll(..) | Exists(..) => panic!("eval on a quantified formula"),
        }
    }

    /// Replaces free occurrences of variables according to `map`.
    pub fn substitute(&self, map: &std::collections::BTreeMap<Symbol, Term>) -> FoFormula {
        match self {
            Bottom => Bottom,
            Top => Top,
            Atom(a) => Atom(AtomF::from_term(a.tree().replace_variables(map))),
            Not(f) => FoFormula::not(f.substitute(map)),
            And(a, b) => FoFormula::and(a.substitute(map), b.substitute(map)),
            Or(a, b) => FoFormula::or(a.substitute(map), b.substitute(map)),
            Implies(a, b) => FoFormula::implies(a.substitute(map), b.substitute(map)),
            Iff(a, b) => FoFormula::iff(a.substitute(map), b.substitute(map)),
            ForAll(v, f) | Exists(v, f) => {
                let mut inner = map.clone();
                inner.remove(v);
                let body = Box::new(f.substitute(&inner));
                if matches!(self, ForAll(..)) {
                    ForAll(v.clone(), body)
                } else {
                    Exists(v.clone(), body)
                }
            }
        }
    }
}

/// Renders in the theory-file grammar, fully parenthesized, so the output
/// parses back to the same tree.
impl fmt::Display for FoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bottom => f.write_str("false"),
            Top => f.write_str("true"),
            Atom(a) => write!(f, "{}", a),
            Not(g) => write!(f, "not {}", Paren(g)),
            And(a, b) => write!(f, "{} and {}", Paren(a), Paren(b)),
            Or(a, b) => write!(f, "{} or {}", Paren(a), Paren(b)),
            Implies(a, b) => write!(f, "{} -> {}", Paren(a), Paren(b)),
            Iff(a, b) => write!(f, "{} <-> {}", Paren(a), Paren(b)),
            ForAll(v, g) => write!(f, "forall {} . {}", v, g),
            Exists(v, g) => write!(f, "exists {} . {}", v, g),
        }
    }
}

struct Paren<'a>(&'a FoFormula);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Bottom | Top | Atom(_) => write!(f, "{}", self.0),
            g => write!(f, "({})", g),
        }
    }
}
