//! Proof files and replay through the tableau kernel.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{Application, Closure, Justification, NodeId, Proof, Tableau, TableauError};
use crate::extraction::json::{sign_text, SignedJson};
use crate::extraction::RuleSet;
use crate::syntax::{Sign, SignedFormula, VarScope};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProofJson {
    pub nodes: Vec<NodeJson>,
    /// Root-to-leaf node ids, left to right.
    pub branches: Vec<Vec<NodeId>>,
    /// One closure per branch, in branch order.
    pub closures: Vec<ClosureJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub size: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NodeJson {
    pub id: NodeId,
    pub sign: String,
    pub formula: String,
    pub just: JustJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum JustJson {
    Hyp,
    Rule { rule: String, premises: Vec<NodeId> },
    Cut { license: NodeId, polarity: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosureJson {
    pub nodes: Vec<NodeId>,
    /// Set when a closing rule fired on the single node in `nodes`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<String>,
}

impl Proof {
    pub fn to_json_value(&self, rs: &RuleSet) -> ProofJson {
        let t = self.tableau();
        ProofJson {
            nodes: t
                .nodes()
                .map(|n| NodeJson {
                    id: n.id,
                    sign: sign_text(n.sf.sign).to_string(),
                    formula: n.sf.atom.to_string(),
                    just: match &n.just {
                        Justification::Hypothesis => JustJson::Hyp,
                        Justification::Rule { rule, premises } => JustJson::Rule {
                            rule: rs.rules[*rule].name.clone(),
                            premises: premises.clone(),
                        },
                        Justification::Cut { license } => JustJson::Cut {
                            license: *license,
                            polarity: sign_text(n.sf.sign).to_string(),
                        },
                    },
                })
                .collect(),
            branches: self.branches(),
            closures: self
                .dags()
                .iter()
                .map(|d| match &d.closure {
                    Closure::Pair(a, b) => ClosureJson {
                        nodes: vec![*a, *b],
                        rule: None,
                    },
                    Closure::Rule { rule, premise } => ClosureJson {
                        nodes: vec![*premise],
                        rule: Some(rs.rules[*rule].name.clone()),
                    },
                })
                .collect(),
            size: Some(self.deductive_size()),
        }
    }

    pub fn to_json(&self, rs: &RuleSet) -> String {
        serde_json::to_string_pretty(&self.to_json_value(rs)).expect("proofs always serialize")
    }

    /// Re-checks a proof file step by step against the rule set. When
    /// `exercise` is given the hypotheses must be exactly its formulas.
    /// The returned proof is numbered depth first.
    pub fn replay(text: &str, rs: &RuleSet, exercise: Option<&[SignedFormula]>) -> Result<Proof, TableauError> {
        let doc: ProofJson = serde_json::from_str(text)?;
        Replay::new(&doc, rs)?.run(exercise)
    }
}

fn err(node: NodeId, reason: impl Into<String>) -> TableauError {
    TableauError::Replay {
        node,
        reason: reason.into(),
    }
}

struct Replay<'a> {
    doc: &'a ProofJson,
    rs: &'a RuleSet,
    formulas: BTreeMap<NodeId, SignedFormula>,
    just: BTreeMap<NodeId, &'a JustJson>,
    children: BTreeMap<NodeId, Vec<NodeId>>,
    root: NodeId,
    /// File id to kernel id.
    map: BTreeMap<NodeId, NodeId>,
}

impl<'a> Replay<'a> {
    fn new(doc: &'a ProofJson, rs: &'a RuleSet) -> Result<Self, TableauError> {
        let mut formulas = BTreeMap::new();
        let mut just = BTreeMap::new();
        for n in &doc.nodes {
            let sf = SignedJson {
                sign: n.sign.clone(),
                formula: n.formula.clone(),
            }
            .to_signed(rs.signature(), VarScope::Object)
            .map_err(|e| err(n.id, e))?;
            if formulas.insert(n.id, sf).is_some() {
                return Err(err(n.id, "duplicate node id"));
            }
            just.insert(n.id, &n.just);
        }
        if doc.branches.is_empty() || doc.branches.iter().any(|b| b.is_empty()) {
            return Err(err(0, "proof has an empty branch list"));
        }
        if doc.closures.len() != doc.branches.len() {
            return Err(err(0, "one closure per branch is required"));
        }
        let root = doc.branches[0][0];
        let mut parent: BTreeMap<NodeId, Option<NodeId>> = BTreeMap::new();
        let mut children: BTreeMap<NodeId, Vec<NodeId>> = BTreeMap::new();
        for b in &doc.branches {
            if b[0] != root {
                return Err(err(b[0], "branches must share the root"));
            }
            for (i, &id) in b.iter().enumerate() {
                if !formulas.contains_key(&id) {
                    return Err(err(id, "branch mentions an unknown node"));
                }
                let p = if i == 0 { None } else { Some(b[i - 1]) };
                match parent.get(&id) {
                    Some(q) if *q != p => return Err(err(id, "node has two different parents")),
                    Some(_) => {}
                    None => {
                        parent.insert(id, p);
                        if let Some(p) = p {
                            children.entry(p).or_default().push(id);
                        }
                    }
                }
            }
        }
        if let Some(n) = formulas.keys().find(|id| !parent.contains_key(id)) {
            return Err(err(*n, "node lies on no branch"));
        }
        for b in &doc.branches {
            let last = *b.last().expect("branches are non-empty");
            if children.contains_key(&last) {
                return Err(err(last, "branch does not end at a leaf"));
            }
        }
        Ok(Replay {
            doc,
            rs,
            formulas,
            just,
            children,
            root,
            map: BTreeMap::new(),
        })
    }

    fn run(mut self, exercise: Option<&[SignedFormula]>) -> Result<Proof, TableauError> {
        let mut hyps = Vec::new();
        let mut cur = self.root;
        loop {
            if !matches!(self.just[&cur], JustJson::Hyp) {
                break;
            }
            if hyps.contains(&self.formulas[&cur]) {
                return Err(err(cur, "repeated hypothesis"));
            }
            hyps.push(self.formulas[&cur].clone());
            self.map.insert(cur, hyps.len());
            match self.children.get(&cur).map(Vec::as_slice) {
                Some([next]) if matches!(self.just[next], JustJson::Hyp) => cur = *next,
                _ => break,
            }
        }
        if hyps.is_empty() {
            return Err(err(self.root, "the root must be a hypothesis"));
        }
        if let Some(ex) = exercise {
            let want: BTreeSet<&SignedFormula> = ex.iter().collect();
            let got: BTreeSet<&SignedFormula> = hyps.iter().collect();
            if want != got {
                return Err(err(self.root, "hypotheses differ from the exercise"));
            }
        }
        let t = Tableau::new(&hyps)?;
        let t = self.descend(t, cur)?;
        let proof = Proof::new(t).map_err(|_| err(0, "tableau is not closed"))?;
        if let Some(size) = self.doc.size {
            if size != proof.deductive_size() {
                return Err(err(
                    0,
                    format!("recorded size {} but the proof has size {}", size, proof.deductive_size()),
                ));
            }
        }
        Ok(proof.renumbered())
    }

    /// Replays everything below file node `at`, whose kernel node is a leaf tip.
    fn descend(&mut self, t: Tableau, at: NodeId) -> Result<Tableau, TableauError> {
        let kids = self.children.get(&at).cloned().unwrap_or_default();
        match kids.as_slice() {
            [] => self.close(t, at),
            [c] => {
                let t = self.linear(t, at, *c)?;
                self.descend(t, *c)
            }
            [l, r] => {
                let t = self.cut(t, at, *l, *r)?;
                let t = self.descend(t, *l)?;
                self.descend(t, *r)
            }
            _ => Err(err(at, "a node has at most two children")),
        }
    }

    fn kernel(&self, id: NodeId, at: NodeId) -> Result<NodeId, TableauError> {
        self.map.get(&id).copied().ok_or_else(|| err(at, format!("node {} is not above this node", id)))
    }

    fn linear(&mut self, t: Tableau, at: NodeId, c: NodeId) -> Result<Tableau, TableauError> {
        let JustJson::Rule { rule, premises } = self.just[&c] else {
            return Err(err(c, "only a rule conclusion can be the single child of a node"));
        };
        let Some((ri, r)) = self.rs.rule(rule) else {
            return Err(err(c, format!("unknown rule `{}`", rule)));
        };
        if r.is_close() {
            return Err(err(c, format!("closing rule `{}` has no conclusion", rule)));
        }
        if premises.len() != r.premises.len() {
            return Err(err(c, format!("rule `{}` takes {} premises", rule, r.premises.len())));
        }
        let leaf = self.map[&at];
        let ids = premises.iter().map(|&p| self.kernel(p, c)).collect::<Result<Vec<_>, _>>()?;
        for perm in permutations(&ids) {
            let app = Application::Linear {
                leaf,
                rule: ri,
                premises: perm,
                conclusion: self.formulas[&c].clone(),
            };
            if let Ok(next) = t.apply(&app, self.rs) {
                self.map.insert(c, next.len());
                return Ok(next);
            }
        }
        let ids: Vec<String> = premises.iter().map(|p| p.to_string()).collect();
        Err(err(
            c,
            format!("rule `{}` does not derive this formula from nodes [{}] on its branch", rule, ids.join(",")),
        ))
    }

    fn cut(&mut self, t: Tableau, at: NodeId, l: NodeId, r: NodeId) -> Result<Tableau, TableauError> {
        let (JustJson::Cut { license: a, .. }, JustJson::Cut { license: b, .. }) = (self.just[&l], self.just[&r]) else {
            return Err(err(l, "a node with two children must be followed by a cut"));
        };
        let (fl, fr) = (&self.formulas[&l], &self.formulas[&r]);
        if a != b || !fl.is_conjugate_of(fr) {
            return Err(err(r, "cut children must be conjugates with the same license"));
        }
        let app = Application::Cut {
            leaf: self.map[&at],
            formula: fl.atom.clone(),
            license: self.kernel(*a, l)?,
        };
        let next = t
            .apply(&app, self.rs)
            .map_err(|e| err(l, format!("illegal cut licensed by node {}: {}", a, e)))?;
        let (pos, neg) = (next.len() - 1, next.len());
        let (lk, rk) = if fl.sign == Sign::Assert { (pos, neg) } else { (neg, pos) };
        self.map.insert(l, lk);
        self.map.insert(r, rk);
        Ok(next)
    }

    fn close(&mut self, t: Tableau, at: NodeId) -> Result<Tableau, TableauError> {
        let bi = self
            .doc
            .branches
            .iter()
            .position(|b| b.last() == Some(&at))
            .expect("leaves end branches");
        let closure = &self.doc.closures[bi];
        let tip = self.map[&at];
        match &closure.rule {
            Some(name) => {
                let Some((ri, _)) = self.rs.rule(name) else {
                    return Err(err(at, format!("unknown rule `{}`", name)));
                };
                let [p] = closure.nodes.as_slice() else {
                    return Err(err(at, "a closing rule fires on exactly one node"));
                };
                let app = Application::Close {
                    leaf: tip,
                    rule: ri,
                    premise: self.kernel(*p, at)?,
                };
                t.apply(&app, self.rs).map_err(|e| err(at, format!("closing rule `{}`: {}", name, e)))
            }
            None => {
                let [a, b] = closure.nodes.as_slice() else {
                    return Err(err(at, "a closure names a conjugate pair"));
                };
                let (ka, kb) = (self.kernel(*a, at)?, self.kernel(*b, at)?);
                let ok = t.branch_closed(tip)
                    && t.on_branch(ka, tip)
                    && t.on_branch(kb, tip)
                    && t.node(ka).sf.is_conjugate_of(&t.node(kb).sf);
                if !ok {
                    return Err(err(at, format!("branch is not closed by nodes {} and {}", a, b)));
                }
                Ok(t)
            }
        }
    }
}

fn permutations(ids: &[NodeId]) -> Vec<Vec<NodeId>> {
    if ids.len() <= 1 {
        return vec![ids.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..ids.len() {
        let mut rest = ids.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}
