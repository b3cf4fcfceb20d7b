//! Proof isomorphism and generation of exercises whose minimal proofs have
//! the same justification structure as a given one.

mod generate;

use std::collections::{BTreeMap, BTreeSet};

use crate::extraction::{Conclusion, Rule, RuleSet};
use crate::syntax::{match_signed, Position, Substitution, Symbol, Term};
use crate::tableau::{Closure, Justification, NodeId, Proof, Tableau};

pub use generate::{
    enumerate_candidates, generate, guided_replay, symbol_choice_table, Candidate, ChoiceEntry, GeneratedSet,
    Generation, Mode, OccurrenceRef, Replacement, SymbolChoiceTable,
};

/// Deductive isomorphism: a bijection between branches pairing branches
/// with the same number of nodes whose minimal justification DAGs are
/// isomorphic. DAG nodes must agree on kind and have syntactically
/// isomorphic formulas (signs are ignored); children are unordered.
pub fn deductively_isomorphic(p1: &Proof, p2: &Proof) -> bool {
    let (b1, b2) = (p1.branches(), p2.branches());
    if b1.len() != b2.len() {
        return false;
    }
    let mut used = vec![false; b2.len()];
    match_branches(p1, p2, &b1, &b2, 0, &mut used)
}

fn match_branches(p1: &Proof, p2: &Proof, b1: &[Vec<NodeId>], b2: &[Vec<NodeId>], i: usize, used: &mut [bool]) -> bool {
    if i == b1.len() {
        return true;
    }
    for j in 0..b2.len() {
        if used[j] || b1[i].len() != b2[j].len() {
            continue;
        }
        if dag_isomorphic(p1, i, p2, j) {
            used[j] = true;
            if match_branches(p1, p2, b1, b2, i + 1, used) {
                return true;
            }
            used[j] = false;
        }
    }
    false
}

/// Isomorphism of the minimal DAGs of branch `i` of `p1` and branch `j` of `p2`.
pub fn dag_isomorphic(p1: &Proof, i: usize, p2: &Proof, j: usize) -> bool {
    let (d1, d2) = (&p1.dags()[i], &p2.dags()[j]);
    if d1.nodes.len() != d2.nodes.len() {
        return false;
    }
    let roots1 = d1.closure.nodes();
    let roots2 = d2.closure.nodes();
    let mut m = NodeMap::default();
    match_lists(p1.tableau(), p2.tableau(), &roots1, &roots2, &mut m)
}

#[derive(Default, Clone)]
struct NodeMap {
    fwd: BTreeMap<NodeId, NodeId>,
    back: BTreeMap<NodeId, NodeId>,
}

fn kind(t: &Tableau, id: NodeId) -> u8 {
    match t.node(id).just {
        Justification::Hypothesis => 0,
        Justification::Rule { .. } => 1,
        Justification::Cut { .. } => 2,
    }
}

/// Matches two child lists as multisets, extending the node map.
fn match_lists(t1: &Tableau, t2: &Tableau, a: &[NodeId], b: &[NodeId], m: &mut NodeMap) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let Some((&x, rest)) = a.split_first() else {
        return true;
    };
    for k in 0..b.len() {
        let y = b[k];
        let saved = m.clone();
        if match_node(t1, t2, x, y, m) {
            let others: Vec<NodeId> = b.iter().enumerate().filter(|(i, _)| *i != k).map(|(_, v)| *v).collect();
            if match_lists(t1, t2, rest, &others, m) {
                return true;
            }
        }
        *m = saved;
    }
    false
}

fn match_node(t1: &Tableau, t2: &Tableau, x: NodeId, y: NodeId, m: &mut NodeMap) -> bool {
    match (m.fwd.get(&x), m.back.get(&y)) {
        (Some(&y2), _) => return y2 == y,
        (None, Some(_)) => return false,
        (None, None) => {}
    }
    let (n1, n2) = (t1.node(x), t2.node(y));
    if kind(t1, x) != kind(t2, y) || !n1.sf.syntactically_isomorphic(&n2.sf) {
        return false;
    }
    m.fwd.insert(x, y);
    m.back.insert(y, x);
    match_lists(t1, t2, n1.justifiers(), n2.justifiers(), m)
}

/// Shape match of two rule patterns under one consistent variable bijection.
fn pattern_iso(a: &Term, b: &Term, fwd: &mut BTreeMap<Symbol, Symbol>, back: &mut BTreeMap<Symbol, Symbol>) -> bool {
    if a.is_variable() || b.is_variable() {
        if !(a.is_variable() && b.is_variable()) {
            return false;
        }
        let (x, y) = (a.head(), b.head());
        return match (fwd.get(x), back.get(y)) {
            (Some(y2), Some(x2)) => y2 == y && x2 == x,
            (None, None) => {
                fwd.insert(x.clone(), y.clone());
                back.insert(y.clone(), x.clone());
                true
            }
            _ => false,
        };
    }
    a.head().same_shape(b.head())
        && a.args().len() == b.args().len()
        && a.args().iter().zip(b.args()).all(|(s, t)| pattern_iso(s, t, fwd, back))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

/// For every way `r2` matches the shape of `r1` (premises in some order,
/// one variable bijection for the whole rule, signs ignored), the index of
/// the premise of `r2` paired with premise `premise` of `r1`.
fn premise_correspondences(r1: &Rule, r2: &Rule, premise: usize) -> Vec<usize> {
    if r1.premises.len() != r2.premises.len() || r1.is_close() != r2.is_close() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for perm in permutations(r1.premises.len()) {
        let (mut fwd, mut back) = (BTreeMap::new(), BTreeMap::new());
        let premises_ok = r1
            .premises
            .iter()
            .zip(&perm)
            .all(|(p, &k)| pattern_iso(p.atom.tree(), r2.premises[k].atom.tree(), &mut fwd, &mut back));
        let conclusion_ok = premises_ok
            && match (&r1.conclusion, &r2.conclusion) {
                (Conclusion::Close, Conclusion::Close) => true,
                (Conclusion::Formula(a), Conclusion::Formula(b)) => {
                    pattern_iso(a.atom.tree(), b.atom.tree(), &mut fwd, &mut back)
                }
                _ => false,
            };
        if conclusion_ok && !out.contains(&perm[premise]) {
            out.push(perm[premise]);
        }
    }
    out
}

/// Symbols at `position` of the premises corresponding to premise
/// `premise` of rule `rule` in every rule of the same shape.
pub fn deductive_matching_symbols(rs: &RuleSet, rule: usize, premise: usize, position: &Position) -> BTreeSet<Symbol> {
    let r1 = &rs.rules[rule];
    let mut out = BTreeSet::new();
    for r2 in &rs.rules {
        for k in premise_correspondences(r1, r2, premise) {
            if let Some(s) = r2.premises[k].atom.symbol_at(position) {
                if !s.is_variable() {
                    out.insert(s.clone());
                }
            }
        }
    }
    out
}

/// One use of a node as a rule premise whose pattern has a concrete
/// symbol at the occurrence's position.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum MatchingUse {
    Rule { node: NodeId, rule: usize, premise: usize },
    /// The node licenses a cut; any seed producing the cut formula counts.
    Cut { child: NodeId, seeds: Vec<(usize, usize)> },
    Close { rule: usize },
}

/// Justification-matching occurrences of the symbol at `position` of node
/// `node`: one entry per application that uses the node as a premise and
/// whose premise pattern has a non-variable symbol there.
pub fn justification_matching_uses(p: &Proof, rs: &RuleSet, node: NodeId, position: &Position) -> Vec<MatchingUse> {
    let t = p.tableau();
    let concrete = |pattern: &crate::syntax::SignedFormula| pattern.atom.symbol_at(position).is_some_and(|s| !s.is_variable());
    let mut out = Vec::new();
    for n in t.nodes() {
        match &n.just {
            Justification::Rule { rule, premises } => {
                for (i, &q) in premises.iter().enumerate() {
                    if q == node && concrete(&rs.rules[*rule].premises[i]) {
                        out.push(MatchingUse::Rule {
                            node: n.id,
                            rule: *rule,
                            premise: i,
                        });
                    }
                }
            }
            Justification::Cut { license } if *license == node && n.sf.sign == crate::syntax::Sign::Assert => {
                let seeds: Vec<(usize, usize)> = cut_seeds_for(t, rs, node, n.id)
                    .into_iter()
                    .filter(|&(r, m, _)| concrete(&rs.rules[r].premises[m]))
                    .map(|(r, m, _)| (r, m))
                    .collect();
                if !seeds.is_empty() {
                    out.push(MatchingUse::Cut { child: n.id, seeds });
                }
            }
            _ => {}
        }
    }
    for d in p.dags() {
        if let Closure::Rule { rule, premise } = d.closure {
            if premise == node && concrete(&rs.rules[rule].premises[0]) {
                out.push(MatchingUse::Close { rule });
            }
        }
    }
    out
}

/// Deductive matching symbols of one use.
pub fn use_symbols(rs: &RuleSet, u: &MatchingUse, position: &Position) -> BTreeSet<Symbol> {
    match u {
        MatchingUse::Rule { rule, premise, .. } => deductive_matching_symbols(rs, *rule, *premise, position),
        MatchingUse::Close { rule } => deductive_matching_symbols(rs, *rule, 0, position),
        MatchingUse::Cut { seeds, .. } => seeds
            .iter()
            .flat_map(|&(r, m)| deductive_matching_symbols(rs, r, m, position))
            .collect(),
    }
}

/// Seeds `(rule, main, minor)` whose main premise matches the license and
/// whose minor instantiates to the cut formula of `child`.
fn cut_seeds_for(t: &Tableau, rs: &RuleSet, license: NodeId, child: NodeId) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for seed in &rs.cut_seeds {
        let rule = &rs.rules[seed.rule];
        let mut sigma = Substitution::new();
        if !match_signed(&rule.premises[seed.main], &t.node(license).sf, &mut sigma) {
            continue;
        }
        for &k in &seed.minors {
            let minor = crate::syntax::apply_substitution(&rule.premises[k], &sigma).expect("main premises bind all");
            if minor.atom == t.node(child).sf.atom {
                out.push((seed.rule, seed.main, k));
            }
        }
    }
    out
}

/// Where a symbol at `path` of a premise instance sits relative to the
/// pattern: under variable `v` at relative path `rest`, or on a concrete
/// pattern symbol (`None`).
fn carried_by(pattern: &Term, path: &[usize]) -> Option<(Symbol, Vec<usize>)> {
    let mut cur = pattern;
    for (k, &i) in path.iter().enumerate() {
        if cur.is_variable() {
            return Some((cur.head().clone(), path[k..].to_vec()));
        }
        cur = &cur.args()[i - 1];
    }
    cur.is_variable().then(|| (cur.head().clone(), Vec::new()))
}

fn variable_paths(pattern: &Term, v: &Symbol) -> Vec<Vec<usize>> {
    pattern
        .preorder()
        .into_iter()
        .filter(|(_, s)| *s == v)
        .map(|(p, _)| p)
        .collect()
}

/// Occurrences one application step below `(node, position)`: wherever the
/// conclusion copies the subterm holding the occurrence.
fn direct_descendants(p: &Proof, rs: &RuleSet, node: NodeId, position: &Position) -> Vec<(NodeId, Position)> {
    let t = p.tableau();
    let mut out = Vec::new();
    let mut carry = |m: NodeId, premise: &Term, conclusion: &Term| {
        if let Some((v, rest)) = carried_by(premise, position.path()) {
            for mut path in variable_paths(conclusion, &v) {
                path.extend_from_slice(&rest);
                out.push((m, Position::from_path(path)));
            }
        }
    };
    for n in t.nodes() {
        match &n.just {
            Justification::Rule { rule, premises } => {
                let r = &rs.rules[*rule];
                let Conclusion::Formula(c) = &r.conclusion else { continue };
                for (i, &q) in premises.iter().enumerate() {
                    if q == node {
                        carry(n.id, r.premises[i].atom.tree(), c.atom.tree());
                    }
                }
            }
            Justification::Cut { license } if *license == node => {
                for (r, main, minor) in cut_seeds_for(t, rs, node, n.id) {
                    let rule = &rs.rules[r];
                    carry(n.id, rule.premises[main].atom.tree(), rule.premises[minor].atom.tree());
                }
            }
            _ => {}
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Reflexive-transitive closure of the direct-descendant relation.
pub fn descendant_occurrences(p: &Proof, rs: &RuleSet, node: NodeId, position: &Position) -> BTreeSet<(NodeId, Position)> {
    let mut out = BTreeSet::new();
    let mut stack = vec![(node, position.clone())];
    while let Some(o) = stack.pop() {
        if out.insert(o.clone()) {
            stack.extend(direct_descendants(p, rs, o.0, &o.1));
        }
    }
    out
}
