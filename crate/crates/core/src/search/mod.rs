//! Breadth-first search for clean proofs of minimal deductive size.
//!
//! Level `n` holds every tableau reachable with `n` applications, modulo
//! structural identity. A closed clean tableau bounds the size from above;
//! states whose lower bound exceeds it are dropped.


use std::collections::{BTreeSet, HashSet};
use std::fmt::Write;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::extraction::RuleSet;
use crate::syntax::SignedFormula;
use crate::tableau::{Justification, NodeId, Proof, Tableau, TableauError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Limits {
    /// Largest number of applications explored.
    pub max_apps: usize,
    /// Largest number of states kept on one level.
    pub max_states: usize,
    pub use_cut: bool,
    /// Wall-clock budget for the whole search.
    pub time_budget: Option<Duration>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_apps: 64,
            max_states: 1_000_000,
            use_cut: true,
            time_budget: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error("not refuted within limits: {0}")]
    NotRefuted(Exhaustion),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Exhaustion {
    /// Every reachable tableau was explored and none is a clean proof.
    SearchSpace,
    Applications(usize),
    States(usize),
    Time(Duration),
}

impl std::fmt::Display for Exhaustion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exhaustion::SearchSpace => f.write_str("no rule or cut applies to an open branch"),
            Exhaustion::Applications(n) => write!(f, "no proof with at most {} applications", n),
            Exhaustion::States(n) => write!(f, "more than {} states on one level", n),
            Exhaustion::Time(d) => write!(f, "time budget of {:.1}s used up", d.as_secs_f64()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LevelStats {
    pub level: usize,
    pub states: usize,
    pub closed: usize,
    pub pruned: usize,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    /// Minimal clean proofs, one per structural class, numbered depth first.
    pub proofs: Vec<Proof>,
    pub minimal_size: usize,
    pub levels: Vec<LevelStats>,
}

/// All clean proofs of minimal deductive size.
pub fn minimal_proofs(exercise: &[SignedFormula], rs: &RuleSet, limits: &Limits) -> Result<SearchResult, SearchError> {
    run(exercise, rs, limits, false, usize::MAX)
}

/// Minimal clean proofs of size at most `bound`; larger proofs are never
/// explored.
pub fn minimal_proofs_within(
    exercise: &[SignedFormula],
    rs: &RuleSet,
    limits: &Limits,
    bound: usize,
) -> Result<SearchResult, SearchError> {
    run(exercise, rs, limits, false, bound)
}

/// The first clean proof met in breadth-first order; usually but not
/// necessarily minimal.
pub fn prove_once(exercise: &[SignedFormula], rs: &RuleSet, limits: &Limits) -> Result<Proof, SearchError> {
    let mut r = run(exercise, rs, limits, true, usize::MAX)?;
    Ok(r.proofs.swap_remove(0))
}

fn run(
    exercise: &[SignedFormula],
    rs: &RuleSet,
    limits: &Limits,
    first: bool,
    bound: usize,
) -> Result<SearchResult, SearchError> {
    let mut frontier = vec![Tableau::new(exercise)?];
    let mut up = bound;
    let mut found: Vec<Proof> = Vec::new();
    let mut found_keys: HashSet<String> = HashSet::new();
    let mut levels = Vec::new();
    let deadline = limits.time_budget.map(|d| Instant::now() + d);
    let late = || deadline.is_some_and(|d| Instant::now() > d);
    for level in 0.. {
        let mut stats = LevelStats {
            level,
            states: frontier.len(),
            ..LevelStats::default()
        };
        for t in frontier.iter().filter(|t| t.is_closed()) {
            stats.closed += 1;
            let p = Proof::new(t.clone()).expect("closed");
            if !p.is_clean() {
                continue;
            }
            let size = p.deductive_size();
            if size < up {
                up = size;
                found.clear();
                found_keys.clear();
            }
            if size == up && found_keys.insert(canonical_key(t, rs)) {
                found.push(p.renumbered());
            }
        }
        if first && !found.is_empty() {
            levels.push(stats);
            break;
        }
        let open: Vec<Tableau> = frontier
            .into_par_iter()
            .filter(|t| !t.is_closed() && lower_bound(t).is_some_and(|lb| lb <= up))
            .collect();
        stats.pruned = stats.states - stats.closed - open.len();
        levels.push(stats);
        // Clean proofs with n applications have size at least n + 1.
        if open.is_empty() || level + 1 >= up {
            break;
        }
        if level >= limits.max_apps {
            if found.is_empty() {
                return Err(SearchError::NotRefuted(Exhaustion::Applications(limits.max_apps)));
            }
            break;
        }
        let children: Vec<Vec<(String, Tableau)>> = open
            .par_iter()
            .map(|t| {
                if late() {
                    return Vec::new();
                }
                leftmost_applications(t, rs, limits.use_cut)
                    .iter()
                    .map(|a| {
                        let c = t.apply(a, rs).expect("instances are current");
                        (canonical_key(&c, rs), c)
                    })
                    .collect()
            })
            .collect();
        if late() {
            return Err(SearchError::NotRefuted(Exhaustion::Time(limits.time_budget.unwrap_or_default())));
        }
        let mut seen: HashSet<String> = HashSet::new();
        frontier = Vec::new();
        for (key, c) in children.into_iter().flatten() {
            if seen.insert(key) {
                frontier.push(c);
                if frontier.len() > limits.max_states {
                    return Err(SearchError::NotRefuted(Exhaustion::States(limits.max_states)));
                }
            }
        }
    }
    if found.is_empty() {
        return Err(SearchError::NotRefuted(Exhaustion::SearchSpace));
    }
    Ok(SearchResult {
        minimal_size: up,
        proofs: found,
        levels,
    })
}

/// Applications on the leftmost open branch only. Steps on different
/// branches commute, so every closed tableau is still reachable with the
/// same number of applications.
pub fn leftmost_applications(t: &Tableau, rs: &RuleSet, use_cut: bool) -> Vec<crate::tableau::Application> {
    let Some(&tip) = t.open_leaves().first() else {
        return Vec::new();
    };
    let mut out = t.applicable_linear_instances(tip, rs);
    if use_cut {
        out.extend(t.applicable_cut_instances(tip, rs));
    }
    out
}

/// A lower bound on the size of any clean proof extending `t`, or `None`
/// when no extension can be clean: some derived node sits only on closed
/// branches and outside their minimal DAGs.
pub fn lower_bound(t: &Tableau) -> Option<usize> {
    let mut covered: BTreeSet<NodeId> = BTreeSet::new();
    let mut closed_sum = 0;
    let mut live: BTreeSet<NodeId> = BTreeSet::new();
    let mut open = 0;
    for tip in t.leaves() {
        if t.branch_closed(tip) {
            let dag = t.minimal_dag(tip).expect("closed branches have a closure");
            closed_sum += dag.size();
            covered.extend(dag.nodes);
        } else {
            open += 1;
            live.extend(t.branch(tip));
        }
    }
    let mut uncovered = 0;
    for n in t.nodes() {
        if n.just == Justification::Hypothesis || covered.contains(&n.id) {
            continue;
        }
        if !live.contains(&n.id) {
            return None;
        }
        uncovered += 1;
    }
    Some(closed_sum + open + open.max(uncovered))
}

/// Identifies tableaux up to the order of steps within a branch segment
/// and the numbering of nodes.
pub fn canonical_key(t: &Tableau, rs: &RuleSet) -> String {
    let mut out = String::new();
    segment_key(t, rs, 1, &mut out);
    out
}

fn segment_key(t: &Tableau, rs: &RuleSet, start: NodeId, out: &mut String) {
    let text = |id: NodeId| t.node(id).sf.to_string();
    let mut items = Vec::new();
    let mut id = start;
    let children = loop {
        let n = t.node(id);
        let mut item = text(id);
        match &n.just {
            Justification::Hypothesis => item.push_str("|h"),
            Justification::Rule { rule, premises } => {
                let _ = write!(item, "|{}", rs.rules[*rule].name);
                for &p in premises {
                    let _ = write!(item, ",{}", text(p));
                }
            }
            Justification::Cut { license } => {
                let _ = write!(item, "|cut,{}", text(*license));
            }
        }
        items.push(item);
        let kids = t.children(id);
        if kids.len() == 1 {
            id = kids[0];
        } else {
            break kids;
        }
    };
    items.sort_unstable();
    out.push('{');
    out.push_str(&items.join(";"));
    out.push('}');
    match children.as_slice() {
        [] => {
            let closure = if !t.branch_closed(id) {
                "open".to_string()
            } else {
                match t.closure_options(id).into_iter().find_map(|c| match c {
                    crate::tableau::Closure::Rule { rule, premise } => Some((rule, premise)),
                    _ => None,
                }) {
                    Some((rule, premise)) => format!("{},{}", rs.rules[rule].name, text(premise)),
                    None => "closed".to_string(),
                }
            };
            let _ = write!(out, "<{}>", closure);
        }
        [l, r] => {
            out.push('[');
            segment_key(t, rs, *l, out);
            out.push('|');
            segment_key(t, rs, *r, out);
            out.push(']');
        }
        _ => unreachable!("tableau nodes have at most two children"),
    }
}
