//! Tableaux over signed atomic formulas: linear theory-specific rules,
//! analytic cut, closure, justification DAGs and deductive size.

mod exercise;
mod json;
mod render;
#[cfg(test)]
pub(crate) mod tests;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

use crate::extraction::{Conclusion, RuleSet};
use crate::syntax::{apply_substitution, match_signed, Atom, ParseError, Sign, SignedFormula, Substitution};

pub use exercise::{parse_exercise, render_exercise};
pub use json::ProofJson;

pub type NodeId = usize;

#[derive(Debug, Error)]
pub enum TableauError {
    #[error("empty exercise: at least one signed formula is required")]
    EmptyExercise,
    #[error("line {line}: `{text}` is not a signed atomic formula; exercises with connectives or quantifiers are outside the supported scope")]
    NotAtomic { line: usize, text: String },
    #[error("exercise {0}")]
    Parse(#[from] ParseError),
    #[error("stale application: {0}")]
    Stale(String),
    #[error("tableau is not closed")]
    NotClosed,
    #[error("node {node}: {reason}")]
    Replay { node: NodeId, reason: String },
    #[error("proof file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Justification {
    Hypothesis,
    Rule { rule: usize, premises: Vec<NodeId> },
    /// One child of a cut; the polarity is the node's sign.
    Cut { license: NodeId },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub sf: SignedFormula,
    pub just: Justification,
    pub parent: Option<NodeId>,
}

impl Node {
    /// Nodes this one is justified by.
    pub fn justifiers(&self) -> &[NodeId] {
        match &self.just {
            Justification::Hypothesis => &[],
            Justification::Rule { premises, .. } => premises,
            Justification::Cut { license } => std::slice::from_ref(license),
        }
    }
}

/// Why a branch is closed: a conjugate pair, or a closing rule fired on one node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Closure {
    Pair(NodeId, NodeId),
    Rule { rule: usize, premise: NodeId },
}

impl Closure {
    pub fn nodes(&self) -> Vec<NodeId> {
        match self {
            Closure::Pair(a, b) => vec![*a, *b],
            Closure::Rule { premise, .. } => vec![*premise],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Leaf {
    tip: NodeId,
    closed: bool,
    fired: Option<(usize, NodeId)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Application {
    Linear {
        leaf: NodeId,
        rule: usize,
        premises: Vec<NodeId>,
        conclusion: SignedFormula,
    },
    Close {
        leaf: NodeId,
        rule: usize,
        premise: NodeId,
    },
    Cut {
        leaf: NodeId,
        formula: Atom,
        license: NodeId,
    },
}

impl Application {
    pub fn leaf(&self) -> NodeId {
        match self {
            Application::Linear { leaf, .. } | Application::Close { leaf, .. } | Application::Cut { leaf, .. } => *leaf,
        }
    }
}

/// An immutable tableau value; applying a rule returns a new tableau that
/// shares node storage with the old one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tableau {
    nodes: Vec<Arc<Node>>,
    leaves: Vec<Leaf>,
    applications: usize,
}

impl Tableau {
    /// A single branch holding the hypotheses in order; repeated formulas are dropped.
    pub fn new(hypotheses: &[SignedFormula]) -> Result<Tableau, TableauError> {
        if hypotheses.is_empty() {
            return Err(TableauError::EmptyExercise);
        }
        let mut nodes: Vec<Arc<Node>> = Vec::new();
        for sf in hypotheses {
            if nodes.iter().any(|n| &n.sf == sf) {
                continue;
            }
            let id = nodes.len() + 1;
            nodes.push(Arc::new(Node {
                id,
                sf: sf.clone(),
                just: Justification::Hypothesis,
                parent: if id == 1 { None } else { Some(id - 1) },
            }));
        }
        let tip = nodes.len();
        let closed = nodes.iter().any(|a| nodes.iter().any(|b| a.sf.is_conjugate_of(&b.sf)));
        Ok(Tableau {
            nodes,
            leaves: vec![Leaf {
                tip,
                closed,
                fired: None,
            }],
            applications: 0,
        })
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id - 1]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().map(|n| n.as_ref())
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn applications(&self) -> usize {
        self.applications
    }

    pub fn hypotheses(&self) -> Vec<&SignedFormula> {
        self.nodes()
            .filter(|n| n.just == Justification::Hypothesis)
            .map(|n| &n.sf)
            .collect()
    }

    /// Leaf tips, left to right.
    pub fn leaves(&self) -> Vec<NodeId> {
        self.leaves.iter().map(|l| l.tip).collect()
    }

    pub fn open_leaves(&self) -> Vec<NodeId> {
        self.leaves.iter().filter(|l| !l.closed).map(|l| l.tip).collect()
    }

    fn leaf(&self, tip: NodeId) -> Option<&Leaf> {
        self.leaves.iter().find(|l| l.tip == tip)
    }

    pub fn branch_closed(&self, tip: NodeId) -> bool {
        self.leaf(tip).is_some_and(|l| l.closed)
    }

    pub fn is_closed(&self) -> bool {
        self.leaves.iter().all(|l| l.closed)
    }

    /// Node ids from the root down to `tip`.
    pub fn branch(&self, tip: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut cur = Some(tip);
        while let Some(id) = cur {
            out.push(id);
            cur = self.node(id).parent;
        }
        out.reverse();
        out
    }

    /// Whether `id` lies on the path from the root to `tip`.
    pub fn on_branch(&self, id: NodeId, tip: NodeId) -> bool {
        let mut cur = Some(tip);
        while let Some(c) = cur {
            if c == id {
                return true;
            }
            if c < id {
                return false;
            }
            cur = self.node(c).parent;
        }
        false
    }

    pub fn find_on_branch(&self, tip: NodeId, sf: &SignedFormula) -> Option<NodeId> {
        self.branch(tip).into_iter().find(|&id| &self.node(id).sf == sf)
    }

    pub fn children(&self, id: NodeId) -> Vec<NodeId> {
        self.nodes().filter(|n| n.parent == Some(id)).map(|n| n.id).collect()
    }

    /// Linear and closing rule instances on the branch ending at `tip`.
    /// Instances whose conclusion is already on the branch are omitted.
    pub fn applicable_linear_instances(&self, tip: NodeId, rs: &RuleSet) -> Vec<Application> {
        if self.branch_closed(tip) {
            return Vec::new();
        }
        let branch: Vec<&Node> = self.branch(tip).into_iter().map(|id| self.node(id)).collect();
        let present: BTreeSet<&SignedFormula> = branch.iter().map(|n| &n.sf).collect();
        let mut close = Vec::new();
        let mut linear = Vec::new();
        for (ri, rule) in rs.rules.iter().enumerate() {
            let mut found = Vec::new();
            match_premises(&rule.premises, &branch, &mut Substitution::new(), &mut Vec::new(), &mut found);
            for (premises, sigma) in found {
                match &rule.conclusion {
                    Conclusion::Close => close.push(Application::Close {
                        leaf: tip,
                        rule: ri,
                        premise: premises[0],
                    }),
                    Conclusion::Formula(c) => {
                        let conclusion = apply_substitution(c, &sigma).expect("analytic rules bind every conclusion variable");
                        if !present.contains(&conclusion) {
                            linear.push(Application::Linear {
                                leaf: tip,
                                rule: ri,
                                premises,
                                conclusion,
                            });
                        }
                    }
                }
            }
        }
        close.extend(linear);
        close
    }

    /// Cut instances on the branch ending at `tip`: minor co-premises of
    /// branch nodes that instantiate a main premise. One instance per
    /// formula (smallest license); formulas with either polarity already on
    /// the branch are omitted.
    pub fn applicable_cut_instances(&self, tip: NodeId, rs: &RuleSet) -> Vec<Application> {
        if self.branch_closed(tip) {
            return Vec::new();
        }
        let branch: Vec<&Node> = self.branch(tip).into_iter().map(|id| self.node(id)).collect();
        let present: BTreeSet<&Atom> = branch.iter().map(|n| &n.sf.atom).collect();
        let mut seen: BTreeSet<Atom> = BTreeSet::new();
        let mut out = Vec::new();
        for n in &branch {
            for formula in cut_formulas(&n.sf, rs) {
                if !present.contains(&formula) && seen.insert(formula.clone()) {
                    out.push(Application::Cut {
                        leaf: tip,
                        formula,
                        license: n.id,
                    });
                }
            }
        }
        out
    }

    /// Every application on every open branch: closing rules, then linear
    /// rules, then cuts, branch by branch.
    pub fn all_applications(&self, rs: &RuleSet, with_cut: bool) -> Vec<Application> {
        let mut out = Vec::new();
        for tip in self.open_leaves() {
            out.extend(self.applicable_linear_instances(tip, rs));
            if with_cut {
                out.extend(self.applicable_cut_instances(tip, rs));
            }
        }
        out
    }

    /// Applies an application, re-checking it against the current tableau.
    pub fn apply(&self, app: &Application, rs: &RuleSet) -> Result<Tableau, TableauError> {
        let stale = |m: &str| Err(TableauError::Stale(m.to_string()));
        let tip = app.leaf();
        let Some(li) = self.leaves.iter().position(|l| l.tip == tip) else {
            return stale("not a leaf");
        };
        if self.leaves[li].closed {
            return stale("branch already closed");
        }
        let mut next = self.clone();
        next.applications += 1;
        match app {
            Application::Linear {
                rule,
                premises,
                conclusion,
                ..
            } => {
                let Some(r) = rs.rules.get(*rule) else {
                    return stale("unknown rule");
                };
                let Conclusion::Formula(pattern) = &r.conclusion else {
                    return stale("closing rule used as a linear rule");
                };
                let Some(sigma) = self.match_on_branch(&r.premises, premises, tip) else {
                    return stale("premises do not match the rule");
                };
                match apply_substitution(pattern, &sigma) {
                    Ok(c) if &c == conclusion => {}
                    _ => return stale("conclusion does not follow from the premises"),
                }
                if self.find_on_branch(tip, conclusion).is_some() {
                    return stale("conclusion already on the branch");
                }
                let id = next.push(conclusion.clone(), Justification::Rule { rule: *rule, premises: premises.clone() }, tip);
                next.leaves[li].tip = id;
                next.leaves[li].closed = self.find_on_branch(tip, &conclusion.conjugate()).is_some();
            }
            Application::Close { rule, premise, .. } => {
                let Some(r) = rs.rules.get(*rule) else {
                    return stale("unknown rule");
                };
                if !r.is_close() || self.match_on_branch(&r.premises, &[*premise], tip).is_none() {
                    return stale("closing rule does not match");
                }
                next.leaves[li].closed = true;
                next.leaves[li].fired = Some((*rule, *premise));
            }
            Application::Cut { formula, license, .. } => {
                if !self.on_branch(*license, tip) {
                    return stale("license is not on the branch");
                }
                if !cut_formulas(&self.node(*license).sf, rs).contains(formula) {
                    return stale("cut formula is not a minor co-premise of the license");
                }
                let pos = SignedFormula::assert(formula.clone());
                if self.find_on_branch(tip, &pos).is_some() || self.find_on_branch(tip, &pos.conjugate()).is_some() {
                    return stale("cut formula already on the branch");
                }
                let left = next.push(pos.clone(), Justification::Cut { license: *license }, tip);
                let right = next.push(pos.conjugate(), Justification::Cut { license: *license }, tip);
                next.leaves[li] = Leaf {
                    tip: left,
                    closed: false,
                    fired: None,
                };
                next.leaves.insert(
                    li + 1,
                    Leaf {
                        tip: right,
                        closed: false,
                        fired: None,
                    },
                );
            }
        }
        Ok(next)
    }

    fn push(&mut self, sf: SignedFormula, just: Justification, parent: NodeId) -> NodeId {
        let id = self.nodes.len() + 1;
        self.nodes.push(Arc::new(Node {
            id,
            sf,
            just,
            parent: Some(parent),
        }));
        id
    }

    /// Matches rule premises against the given nodes, in order.
    fn match_on_branch(&self, patterns: &[SignedFormula], nodes: &[NodeId], tip: NodeId) -> Option<Substitution> {
        if patterns.len() != nodes.len() || nodes.iter().any(|&n| n == 0 || n > self.len() || !self.on_branch(n, tip)) {
            return None;
        }
        let mut sigma = Substitution::new();
        for (p, &n) in patterns.iter().zip(nodes) {
            if !match_signed(p, &self.node(n).sf, &mut sigma) {
                return None;
            }
        }
        Some(sigma)
    }

    /// Every way the branch ending at `tip` is closed.
    pub fn closure_options(&self, tip: NodeId) -> Vec<Closure> {
        let Some(leaf) = self.leaf(tip) else {
            return Vec::new();
        };
        if !leaf.closed {
            return Vec::new();
        }
        let branch = self.branch(tip);
        let mut index: HashMap<&SignedFormula, NodeId> = HashMap::new();
        let mut out = Vec::new();
        for &id in &branch {
            let sf = &self.node(id).sf;
            if let Some(&other) = index.get(&sf.conjugate()) {
                out.push(Closure::Pair(other, id));
            }
            index.insert(sf, id);
        }
        if let Some((rule, premise)) = leaf.fired {
            out.push(Closure::Rule { rule, premise });
        }
        out
    }

    /// Nodes of the justification DAG for a closure, without the root ⊗.
    pub fn dag_nodes(&self, closure: &Closure) -> BTreeSet<NodeId> {
        let mut out = BTreeSet::new();
        let mut stack = closure.nodes();
        while let Some(id) = stack.pop() {
            if out.insert(id) {
                stack.extend_from_slice(self.node(id).justifiers());
            }
        }
        out
    }

    /// The smallest justification DAG of a closed branch; ties go to the
    /// closure with the smallest node ids.
    pub fn minimal_dag(&self, tip: NodeId) -> Option<JustificationDag> {
        self.closure_options(tip)
            .into_iter()
            .map(|c| {
                let nodes = self.dag_nodes(&c);
                JustificationDag { closure: c, nodes }
            })
            .min_by_key(|d| {
                let mut ids = d.closure.nodes();
                ids.sort_unstable();
                (d.size(), ids)
            })
    }

    /// Renumbers nodes depth first, left child before right, as in printed proofs.
    pub fn renumbered(&self) -> Tableau {
        let mut children: Vec<Vec<NodeId>> = vec![Vec::new(); self.len() + 1];
        for n in self.nodes() {
            if let Some(p) = n.parent {
                children[p].push(n.id);
            }
        }
        let mut order = Vec::with_capacity(self.len());
        let mut stack = vec![1];
        while let Some(id) = stack.pop() {
            order.push(id);
            for &c in children[id].iter().rev() {
                stack.push(c);
            }
        }
        let mut map = vec![0; self.len() + 1];
        for (i, &old) in order.iter().enumerate() {
            map[old] = i + 1;
        }
        let nodes = order
            .iter()
            .map(|&old| {
                let n = self.node(old);
                Arc::new(Node {
                    id: map[old],
                    sf: n.sf.clone(),
                    just: match &n.just {
                        Justification::Hypothesis => Justification::Hypothesis,
                        Justification::Rule { rule, premises } => Justification::Rule {
                            rule: *rule,
                            premises: premises.iter().map(|&p| map[p]).collect(),
                        },
                        Justification::Cut { license } => Justification::Cut { license: map[*license] },
                    },
                    parent: n.parent.map(|p| map[p]),
                })
            })
            .collect();
        let leaves = self
            .leaves
            .iter()
            .map(|l| Leaf {
                tip: map[l.tip],
                closed: l.closed,
                fired: l.fired.map(|(r, p)| (r, map[p])),
            })
            .collect();
        Tableau {
            nodes,
            leaves,
            applications: self.applications,
        }
    }
}

/// Backtracking match of `patterns[k..]` against branch nodes; collects
/// (premise node ids, substitution) for every complete match.
fn match_premises(
    patterns: &[SignedFormula],
    branch: &[&Node],
    sigma: &mut Substitution,
    chosen: &mut Vec<NodeId>,
    out: &mut Vec<(Vec<NodeId>, Substitution)>,
) {
    let Some(p) = patterns.get(chosen.len()) else {
        out.push((chosen.clone(), sigma.clone()));
        return;
    };
    for n in branch {
        if n.sf.sign != p.sign || n.sf.atom.predicate() != p.atom.predicate() {
            continue;
        }
        let saved = sigma.clone();
        if match_signed(p, &n.sf, sigma) {
            chosen.push(n.id);
            match_premises(patterns, branch, sigma, chosen, out);
            chosen.pop();
        }
        *sigma = saved;
    }
}

/// Atoms of the minor co-premises licensed by `sf`.
pub fn cut_formulas(sf: &SignedFormula, rs: &RuleSet) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::new();
    for seed in &rs.cut_seeds {
        let rule = &rs.rules[seed.rule];
        let mut sigma = Substitution::new();
        if !match_signed(&rule.premises[seed.main], sf, &mut sigma) {
            continue;
        }
        for &m in &seed.minors {
            let atom = apply_substitution(&rule.premises[m], &sigma)
                .expect("main premises bind every premise variable")
                .atom;
            if !out.contains(&atom) {
                out.push(atom);
            }
        }
    }
    out
}

/// The chosen justification structure of one closed branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JustificationDag {
    pub closure: Closure,
    /// Branch nodes in the DAG; the root ⊗ is implicit.
    pub nodes: BTreeSet<NodeId>,
}

impl JustificationDag {
    /// Distinct nodes, counting the root ⊗.
    pub fn size(&self) -> usize {
        self.nodes.len() + 1
    }
}

/// A closed tableau together with its minimal justification DAGs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    tableau: Tableau,
    dags: Vec<JustificationDag>,
}

impl Proof {
    pub fn new(tableau: Tableau) -> Result<Proof, TableauError> {
        if !tableau.is_closed() {
            return Err(TableauError::NotClosed);
        }
        let dags = tableau
            .leaves()
            .into_iter()
            .map(|tip| tableau.minimal_dag(tip).expect("closed branches have a closure"))
            .collect();
        Ok(Proof { tableau, dags })
    }

    pub fn tableau(&self) -> &Tableau {
        &self.tableau
    }

    /// One DAG per branch, in leaf order.
    pub fn dags(&self) -> &[JustificationDag] {
        &self.dags
    }

    /// Branches as root-to-leaf node ids, in leaf order.
    pub fn branches(&self) -> Vec<Vec<NodeId>> {
        self.tableau.leaves().into_iter().map(|t| self.tableau.branch(t)).collect()
    }

    pub fn deductive_size(&self) -> usize {
        self.dags.iter().map(JustificationDag::size).sum()
    }

    /// Every rule-derived and cut node lies in some branch's minimal DAG.
    pub fn is_clean(&self) -> bool {
        let used: BTreeSet<NodeId> = self.dags.iter().flat_map(|d| d.nodes.iter().copied()).collect();
        self.tableau
            .nodes()
            .all(|n| n.just == Justification::Hypothesis || used.contains(&n.id))
    }

    pub fn renumbered(&self) -> Proof {
        Proof::new(self.tableau.renumbered()).expect("renumbering preserves closure")
    }

    pub fn sign_of(&self, id: NodeId) -> Sign {
        self.tableau.node(id).sf.sign
    }
}
