//! Human-readable proof trees.

use std::fmt::Write;

use super::{Closure, Justification, NodeId, Proof, Tableau};
use crate::extraction::RuleSet;
use crate::syntax::Pretty;

impl Proof {
    /// One line per node, `(i) φ  via RULE [j,k]`, branches indented
    /// under a cut, and `⊗ (a) (b)` where a branch closes.
    pub fn render_text(&self, rs: &RuleSet) -> String {
        let t = self.tableau();
        let mut out = String::new();
        render_from(self, rs, t, 1, "", &mut out);
        let _ = writeln!(out, "deductive size: {}", self.deductive_size());
        out
    }
}

fn render_from(p: &Proof, rs: &RuleSet, t: &Tableau, start: NodeId, indent: &str, out: &mut String) {
    let mut id = start;
    loop {
        let n = t.node(id);
        let _ = write!(out, "{}({}) {}", indent, id, Pretty(&n.sf));
        match &n.just {
            Justification::Hypothesis => {}
            Justification::Rule { rule, premises } => {
                let mut ids = premises.clone();
                ids.sort_unstable();
                let _ = write!(out, "  via {} {}", rs.rules[*rule].name, id_list(&ids));
            }
            Justification::Cut { license } => {
                let _ = write!(out, "  via cut [{}]", license);
            }
        }
        out.push('\n');
        let children = t.children(id);
        match children.as_slice() {
            [] => {
                let leaf = t.leaves().iter().position(|&l| l == id).expect("childless nodes are leaves");
                let dag = &p.dags()[leaf];
                let _ = match &dag.closure {
                    Closure::Pair(a, b) => writeln!(out, "{}⊗ ({}) ({})", indent, a, b),
                    Closure::Rule { rule, premise } => {
                        writeln!(out, "{}⊗ via {} [{}]", indent, rs.rules[*rule].name, premise)
                    }
                };
                return;
            }
            [next] => id = *next,
            [left, right] => {
                let _ = writeln!(out, "{}├─", indent);
                render_from(p, rs, t, *left, &format!("{}│ ", indent), out);
                let _ = writeln!(out, "{}└─", indent);
                render_from(p, rs, t, *right, &format!("{}  ", indent), out);
                return;
            }
            _ => unreachable!("tableau nodes have at most two children"),
        }
    }
}

fn id_list(ids: &[NodeId]) -> String {
    let parts: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
    format!("[{}]", parts.join(","))
}
