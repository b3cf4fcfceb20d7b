//! PNF, Skolemization, CNF and RINF for single axioms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::syntax::{Atom, FoFormula, Pretty, Signature, Symbol, Term};

/// Converts a closed formula to prenex form.
///
/// `↔` becomes a conjunction of two implications, negations are pushed to
/// the atoms and bound variables are renamed apart before hoisting.
/// When both sides of a binary connective carry quantifiers, existentials
/// are hoisted first so Skolem functions depend on as few universals as
/// possible.
pub fn to_pnf(f: &FoFormula) -> FoFormula {
    let nnf = rename_apart(&nnf(f, false), &mut f.free_variables().into_iter().map(|s| s.name().to_string()).collect());
    let (prefix, matrix) = prenex(&nnf);
    prefix.into_iter().rev().fold(matrix, |body, (universal, v)| {
        if universal {
            FoFormula::ForAll(v, Box::new(body))
        } else {
            FoFormula::Exists(v, Box::new(body))
        }
    })
}

fn nnf(f: &FoFormula, negate: bool) -> FoFormula {
    use FoFormula::*;
    match f {
        Bottom if negate => Top,
        Top if negate => Bottom,
        Bottom | Top => f.clone(),
        Atom(_) if negate => FoFormula::not(f.clone()),
        Atom(_) => f.clone(),
        Not(g) => nnf(g, !negate),
        And(a, b) if negate => FoFormula::or(nnf(a, true), nnf(b, true)),
        And(a, b) => FoFormula::and(nnf(a, false), nnf(b, false)),
        Or(a, b) if negate => FoFormula::and(nnf(a, true), nnf(b, true)),
        Or(a, b) => FoFormula::or(nnf(a, false), nnf(b, false)),
        Implies(a, b) if negate => FoFormula::and(nnf(a, false), nnf(b, true)),
        Implies(a, b) => FoFormula::or(nnf(a, true), nnf(b, false)),
        Iff(a, b) => nnf(
            &FoFormula::and(
                FoFormula::implies((**a).clone(), (**b).clone()),
                FoFormula::implies((**b).clone(), (**a).clone()),
            ),
            negate,
        ),
        ForAll(v, g) if negate => Exists(v.clone(), Box::new(nnf(g, true))),
        ForAll(v, g) => ForAll(v.clone(), Box::new(nnf(g, false))),
        Exists(v, g) if negate => ForAll(v.clone(), Box::new(nnf(g, true))),
        Exists(v, g) => Exists(v.clone(), Box::new(nnf(g, false))),
    }
}

/// Gives every quantifier a variable name not used anywhere before it.
fn rename_apart(f: &FoFormula, used: &mut BTreeSet<String>) -> FoFormula {
    use FoFormula::*;
    match f {
        Bottom | Top | Atom(_) => f.clone(),
        Not(g) => FoFormula::not(rename_apart(g, used)),
        And(a, b) => {
            let a = rename_apart(a, used);
            FoFormula::and(a, rename_apart(b, used))
        }
        Or(a, b) => {
            let a = rename_apart(a, used);
            FoFormula::or(a, rename_apart(b, used))
        }
        Implies(a, b) => {
            let a = rename_apart(a, used);
            FoFormula::implies(a, rename_apart(b, used))
        }
        Iff(a, b) => {
            let a = rename_apart(a, used);
            FoFormula::iff(a, rename_apart(b, used))
        }
        ForAll(v, g) | Exists(v, g) => {
            let (v2, body) = if used.contains(v.name()) {
                let mut n = 1;
                while used.contains(&format!("{}{}", v.name(), n)) {
                    n += 1;
                }
                let fresh = Symbol::object_var(&format!("{}{}", v.name(), n));
                let map = BTreeMap::from([(v.clone(), Term::var(fresh.clone()))]);
                (fresh, g.substitute(&map))
            } else {
                (v.clone(), (**g).clone())
            };
            used.insert(v2.name().to_string());
            let body = Box::new(rename_apart(&body, used));
            if matches!(f, ForAll(..)) {
                ForAll(v2, body)
            } else {
                Exists(v2, body)
            }
        }
    }
}

type Prefix = Vec<(bool, Symbol)>;

/// Splits an NNF formula with distinct bound names into prefix and matrix.
fn prenex(f: &FoFormula) -> (Prefix, FoFormula) {
    use FoFormula::*;
    match f {
        ForAll(v, g) | Exists(v, g) => {
            let (mut p, m) = prenex(g);
            p.insert(0, (matches!(f, ForAll(..)), v.clone()));
            (p, m)
        }
        And(a, b) | Or(a, b) => {
            let (pa, ma) = prenex(a);
            let (pb, mb) = prenex(b);
            let m = if matches!(f, And(..)) {
                FoFormula::and(ma, mb)
            } else {
                FoFormula::or(ma, mb)
            };
            (merge_prefixes(pa, pb), m)
        }
        _ => (Vec::new(), f.clone()),
    }
}

fn merge_prefixes(a: Prefix, b: Prefix) -> Prefix {
    let (mut a, mut b) = (a.into_iter().peekable(), b.into_iter().peekable());
    let mut out = Vec::new();
    loop {
        let next = match (a.peek(), b.peek()) {
            (None, None) => return out,
            (Some((false, _)), _) | (Some(_), None) => a.next(),
            (_, Some((false, _))) | (None, Some(_)) => b.next(),
            (Some(_), Some(_)) => a.next(),
        };
        out.extend(next);
    }
}

/// Replaces each existential of a closed prenex formula by a Skolem term
/// `sk_<axiom>_<k>(universals in scope)`; returns the quantifier-free matrix.
pub fn skolemize(f: &FoFormula, axiom: &str, taken: &Signature) -> (FoFormula, Vec<Symbol>) {
    let mut universals: Vec<Symbol> = Vec::new();
    let mut skolems = Vec::new();
    let mut cur = f.clone();
    loop {
        match cur {
            FoFormula::ForAll(v, g) => {
                universals.push(v);
                cur = *g;
            }
            FoFormula::Exists(v, g) => {
                let mut name = format!("sk_{}_{}", axiom, skolems.len() + 1);
                while taken.get(&name).is_some() {
                    name.push('_');
                }
                let sk = Symbol::skolem(&name, universals.len());
                let term = Term::app(sk.clone(), universals.iter().cloned().map(Term::var).collect());
                skolems.push(sk);
                cur = g.substitute(&BTreeMap::from([(v, term)]));
            }
            matrix => return (matrix, skolems),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    pub atom: Atom,
}

impl Literal {
    pub fn opposite(&self) -> Literal {
        Literal {
            positive: !self.positive,
            atom: self.atom.clone(),
        }
    }

    pub fn to_formula(&self) -> FoFormula {
        let a = FoFormula::Atom(self.atom.clone());
        if self.positive {
            a
        } else {
            FoFormula::not(a)
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("¬")?;
        }
        write!(f, "{}", Pretty(&self.atom))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub literals: Vec<Literal>,
}

impl Clause {
    pub fn to_formula(&self) -> FoFormula {
        FoFormula::disjunction(self.literals.iter().map(Literal::to_formula).collect())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∨ ")?;
            }
            write!(f, "{}", l)?;
        }
        Ok(())
    }
}

/// Distributive CNF of a quantifier-free matrix. Literals keep their order
/// of first appearance; tautologies and repeated clauses are dropped.
pub fn to_cnf(matrix: &FoFormula) -> Vec<Clause> {
    let mut out: Vec<Clause> = Vec::new();
    let mut seen: Vec<BTreeSet<Literal>> = Vec::new();
    for raw in cnf(&nnf(matrix, false)) {
        let mut lits: Vec<Literal> = Vec::new();
        for l in raw {
            if !lits.contains(&l) {
                lits.push(l);
            }
        }
        if lits.iter().any(|l| lits.contains(&l.opposite())) {
            continue;
        }
        let set: BTreeSet<Literal> = lits.iter().cloned().collect();
        if !seen.contains(&set) {
            seen.push(set);
            out.push(Clause { literals: lits });
        }
    }
    out
}

fn cnf(f: &FoFormula) -> Vec<Vec<Literal>> {
    use FoFormula::*;
    match f {
        Atom(a) => vec![vec![Literal {
            positive: true,
            atom: a.clone(),
        }]],
        Not(g) => match g.as_ref() {
            Atom(a) => vec![vec![Literal {
                positive: false,
                atom: a.clone(),
            }]],
            _ => unreachable!("cnf expects negation normal form"),
        },
        And(a, b) => {
            let mut out = cnf(a);
            out.extend(cnf(b));
            out
        }
        Or(a, b) => {
            let (ca, cb) = (cnf(a), cnf(b));
            let mut out = Vec::with_capacity(ca.len() * cb.len());
            for x in &ca {
                for y in &cb {
                    out.push(x.iter().chain(y).cloned().collect());
                }
            }
            out
        }
        Top => Vec::new(),
        Bottom => vec![Vec::new()],
        _ => unreachable!("cnf expects a quantifier-free matrix"),
    }
}

/// An implication `l1 ∧ … ∧ lk → l`, or `l → ⊥` when `consequent` is `None`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rinf {
    pub antecedent: Vec<Literal>,
    pub consequent: Option<Literal>,
}

impl Rinf {
    pub fn to_formula(&self) -> FoFormula {
        let lhs = FoFormula::conjunction(self.antecedent.iter().map(Literal::to_formula).collect());
        let rhs = self.consequent.as_ref().map_or(FoFormula::Bottom, Literal::to_formula);
        FoFormula::implies(lhs, rhs)
    }
}

/// The RINF forms of a clause, the i-th concluding the i-th literal.
/// A unit clause `l` yields only `l^op → ⊥`.
pub fn rinf_forms(c: &Clause) -> Vec<Rinf> {
    if let [l] = c.literals.as_slice() {
        return vec![Rinf {
            antecedent: vec![l.opposite()],
            consequent: None,
        }];
    }
    (0..c.literals.len())
        .map(|i| Rinf {
            antecedent: c
                .literals
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, l)| l.opposite())
                .collect(),
            consequent: Some(c.literals[i].clone()),
        })
        .collect()
}
