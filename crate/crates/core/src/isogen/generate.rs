//! Symbol choice tables, candidate enumeration, guided replay and the
//! generation driver.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::{deductively_isomorphic, descendant_occurrences, justification_matching_uses, use_symbols};
use crate::extraction::RuleSet;
use crate::search::{minimal_proofs, minimal_proofs_within, Limits, SearchError};
use crate::syntax::{Position, Pretty, Sign, SignedFormula, Symbol, SymbolKind};
use crate::tableau::{cut_formulas, Application, Closure, Justification, NodeId, Proof, Tableau};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Keep every candidate with a deductively isomorphic proof.
    Fast,
    /// Also require that proof to be minimal for the candidate.
    Strict,
}

/// The `index`-th occurrence (pre-order) of `symbol` in exercise formula `formula`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OccurrenceRef {
    pub formula: usize,
    pub symbol: Symbol,
    pub index: usize,
    pub position: Position,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceEntry {
    pub occurrence: OccurrenceRef,
    /// Admissible replacements, the original symbol first.
    pub symbols: Vec<Symbol>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolChoiceTable {
    pub entries: Vec<ChoiceEntry>,
}

impl SymbolChoiceTable {
    /// Number of candidates: the product of the admissible-set sizes.
    pub fn size(&self) -> usize {
        self.entries.iter().map(|e| e.symbols.len()).fold(1, usize::saturating_mul)
    }

    pub fn get(&self, formula: usize, position: &Position) -> Option<&ChoiceEntry> {
        self.entries
            .iter()
            .find(|e| e.occurrence.formula == formula && &e.occurrence.position == position)
    }
}

/// Admissible replacements for every predicate and function occurrence of
/// the exercise, constrained by how `p` uses each occurrence. The exercise
/// formulas must be the hypotheses of `p`.
pub fn symbol_choice_table(exercise: &[SignedFormula], p: &Proof, rs: &RuleSet) -> SymbolChoiceTable {
    let t = p.tableau();
    let mut entries = Vec::new();
    for (i, sf) in exercise.iter().enumerate() {
        let h = t
            .nodes()
            .find(|n| n.just == Justification::Hypothesis && &n.sf == sf)
            .map(|n| n.id)
            .expect("exercise formulas are hypotheses of the proof");
        for occ in sf.atom.occurrences() {
            let sites = if occ.symbol.kind() == SymbolKind::Predicate {
                BTreeSet::from([(h, occ.position.clone())])
            } else {
                descendant_occurrences(p, rs, h, &occ.position)
            };
            let mut admissible: Option<BTreeSet<Symbol>> = None;
            for (node, pos) in &sites {
                for u in justification_matching_uses(p, rs, *node, pos) {
                    let s = use_symbols(rs, &u, pos);
                    admissible = Some(match admissible {
                        None => s,
                        Some(a) => a.intersection(&s).cloned().collect(),
                    });
                }
            }
            let admissible = admissible.unwrap_or_else(|| {
                rs.signature()
                    .of_kind(occ.symbol.kind())
                    .filter(|s| s.arity() == occ.symbol.arity())
                    .cloned()
                    .collect()
            });
            let mut symbols = vec![occ.symbol.clone()];
            let mut rest: Vec<Symbol> = admissible.into_iter().filter(|s| s != &occ.symbol).collect();
            rest.sort_by(|a, b| a.name().cmp(b.name()));
            symbols.extend(rest);
            entries.push(ChoiceEntry {
                occurrence: OccurrenceRef {
                    formula: i,
                    symbol: occ.symbol,
                    index: occ.index,
                    position: occ.position,
                },
                symbols,
            });
        }
    }
    SymbolChoiceTable { entries }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Replacement {
    pub occurrence: OccurrenceRef,
    pub to: Symbol,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub formulas: Vec<SignedFormula>,
    /// Only the occurrences whose symbol changed.
    pub replacements: Vec<Replacement>,
}

/// Every combination of admissible symbols, the identity first; the last
/// table entry varies fastest.
pub fn enumerate_candidates<'a>(
    table: &'a SymbolChoiceTable,
    exercise: &'a [SignedFormula],
) -> impl Iterator<Item = Candidate> + 'a {
    let mut counter: Option<Vec<usize>> = Some(vec![0; table.entries.len()]);
    std::iter::from_fn(move || {
        let current = counter.clone()?;
        let mut next = current.clone();
        counter = None;
        for k in (0..next.len()).rev() {
            next[k] += 1;
            if next[k] < table.entries[k].symbols.len() {
                counter = Some(next);
                break;
            }
            next[k] = 0;
        }
        let mut formulas = exercise.to_vec();
        let mut replacements = Vec::new();
        for (e, &c) in table.entries.iter().zip(&current) {
            if c == 0 {
                continue;
            }
            let to = e.symbols[c].clone();
            let f = &mut formulas[e.occurrence.formula];
            f.atom = f.atom.with_symbol_at(&e.occurrence.position, &to);
            replacements.push(Replacement {
                occurrence: e.occurrence.clone(),
                to,
            });
        }
        Some(Candidate { formulas, replacements })
    })
}

/// Rebuilds `p` step by step on new hypotheses, choosing at each step a
/// rule instance with the same justifying nodes and a syntactically
/// isomorphic result. `hypotheses[i]` stands for hypothesis node `i + 1`.
/// Returns a clean proof deductively isomorphic to `p`, if one is found.
pub fn guided_replay(p: &Proof, hypotheses: &[SignedFormula], rs: &RuleSet) -> Option<Proof> {
    let src = p.tableau();
    let nh = src.nodes().filter(|n| n.just == Justification::Hypothesis).count();
    if hypotheses.len() != nh {
        return None;
    }
    let t = Tableau::new(hypotheses).ok()?;
    if t.len() != nh {
        return None;
    }
    let mut map: Vec<NodeId> = (0..=src.len()).map(|i| if i <= nh { i } else { 0 }).collect();
    replay_step(p, rs, t, nh + 1, &mut map)
}

fn replay_step(p: &Proof, rs: &RuleSet, t: Tableau, k: NodeId, map: &mut Vec<NodeId>) -> Option<Proof> {
    let src = p.tableau();
    if k > src.len() {
        return finish(p, rs, t, map);
    }
    if map[k] != 0 {
        return replay_step(p, rs, t, k + 1, map);
    }
    let n = src.node(k);
    let leaf = map[n.parent.expect("derived nodes have parents")];
    match &n.just {
        Justification::Hypothesis => None,
        Justification::Rule { premises, .. } => {
            let mut want: Vec<NodeId> = premises.iter().map(|&q| map[q]).collect();
            want.sort_unstable();
            for app in t.applicable_linear_instances(leaf, rs) {
                let Application::Linear {
                    premises: got,
                    conclusion,
                    ..
                } = &app
                else {
                    continue;
                };
                let mut got = got.clone();
                got.sort_unstable();
                if got != want || !conclusion.syntactically_isomorphic(&n.sf) {
                    continue;
                }
                let Ok(next) = t.apply(&app, rs) else { continue };
                map[k] = next.len();
                if let Some(w) = replay_step(p, rs, next, k + 1, map) {
                    return Some(w);
                }
                map[k] = 0;
            }
            None
        }
        Justification::Cut { license } => {
            let sibling = src
                .children(n.parent.expect("cut nodes have parents"))
                .into_iter()
                .find(|&c| c != k)
                .expect("cuts have two children");
            let lic = map[*license];
            for formula in cut_formulas(&t.node(lic).sf, rs) {
                if !formula.syntactically_isomorphic(&n.sf.atom) {
                    continue;
                }
                let app = Application::Cut {
                    leaf,
                    formula,
                    license: lic,
                };
                let Ok(next) = t.apply(&app, rs) else { continue };
                let (pos, neg) = (next.len() - 1, next.len());
                let (mine, theirs) = if n.sf.sign == Sign::Assert { (pos, neg) } else { (neg, pos) };
                map[k] = mine;
                map[sibling] = theirs;
                if let Some(w) = replay_step(p, rs, next, k + 1, map) {
                    return Some(w);
                }
                map[k] = 0;
                map[sibling] = 0;
            }
            None
        }
    }
}

fn finish(p: &Proof, rs: &RuleSet, mut t: Tableau, map: &[NodeId]) -> Option<Proof> {
    let src = p.tableau();
    for (tip, dag) in src.leaves().into_iter().zip(p.dags()) {
        let leaf = map[tip];
        if let Closure::Rule { premise, .. } = dag.closure {
            let app = t
                .applicable_linear_instances(leaf, rs)
                .into_iter()
                .find(|a| matches!(a, Application::Close { premise: q, .. } if *q == map[premise]))?;
            t = t.apply(&app, rs).ok()?;
        }
        if !t.branch_closed(leaf) {
            return None;
        }
    }
    let w = Proof::new(t).ok()?.renumbered();
    (w.is_clean() && deductively_isomorphic(p, &w)).then_some(w)
}

#[derive(Debug, Clone)]
pub struct GeneratedSet {
    pub formulas: Vec<SignedFormula>,
    pub replacements: Vec<Replacement>,
    pub witness: Proof,
    pub strict_verified: bool,
}

#[derive(Debug, Clone)]
pub struct Generation {
    pub input: Vec<SignedFormula>,
    pub mode: Mode,
    pub minimal_size: usize,
    /// Distinct candidate sets over the choice tables of all minimal proofs.
    pub candidates_considered: usize,
    /// The input first, then the others in text order.
    pub outputs: Vec<GeneratedSet>,
}

/// Finds the minimal proofs of `exercise`, then keeps every candidate
/// obtained by admissible symbol replacements that has a deductively
/// isomorphic proof. Strict mode also demands that the candidate's minimal
/// size equals the witness size with an isomorphic minimal proof.
pub fn generate(exercise: &[SignedFormula], rs: &RuleSet, mode: Mode, limits: &Limits) -> Result<Generation, SearchError> {
    let result = minimal_proofs(exercise, rs, limits)?;
    let mut considered: HashSet<Vec<SignedFormula>> = HashSet::new();
    let mut outputs: Vec<(GeneratedSet, usize)> = Vec::new();
    let mut kept: HashSet<Vec<SignedFormula>> = HashSet::new();
    for (pi, p) in result.proofs.iter().enumerate() {
        let table = symbol_choice_table(exercise, p, rs);
        let fresh: Vec<Candidate> = enumerate_candidates(&table, exercise)
            .filter(|c| {
                considered.insert(c.formulas.clone());
                !kept.contains(&c.formulas)
            })
            .collect();
        let witnesses: Vec<Option<Proof>> = fresh.par_iter().map(|c| guided_replay(p, &c.formulas, rs)).collect();
        for (c, w) in fresh.into_iter().zip(witnesses) {
            if let Some(witness) = w {
                kept.insert(c.formulas.clone());
                outputs.push((
                    GeneratedSet {
                        formulas: c.formulas,
                        replacements: c.replacements,
                        witness,
                        strict_verified: false,
                    },
                    pi,
                ));
            }
        }
    }
    if mode == Mode::Strict {
        let verdicts: Vec<bool> = outputs
            .par_iter()
            .map(|(g, pi)| {
                let size = g.witness.deductive_size();
                match minimal_proofs_within(&g.formulas, rs, limits, size) {
                    Ok(r) => {
                        r.minimal_size == size && r.proofs.iter().any(|q| deductively_isomorphic(q, &result.proofs[*pi]))
                    }
                    Err(_) => false,
                }
            })
            .collect();
        outputs = outputs
            .into_iter()
            .zip(verdicts)
            .filter(|(_, ok)| *ok)
            .map(|((mut g, pi), _)| {
                g.strict_verified = true;
                (g, pi)
            })
            .collect();
    }
    let mut outputs: Vec<GeneratedSet> = outputs.into_iter().map(|(g, _)| g).collect();
    outputs.sort_by_cached_key(|g| (g.formulas != exercise, exercise_text(&g.formulas)));
    Ok(Generation {
        input: exercise.to_vec(),
        mode,
        minimal_size: result.minimal_size,
        candidates_considered: considered.len(),
        outputs,
    })
}

fn exercise_text(formulas: &[SignedFormula]) -> String {
    formulas.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(" ; ")
}

/// "Prove that Γ implies Δ", with the asserted formulas as givens and the
/// denied ones as goals.
pub fn exercise_sentence(formulas: &[SignedFormula]) -> String {
    let side = |s: Sign| -> Vec<String> {
        formulas
            .iter()
            .filter(|f| f.sign == s)
            .map(|f| format!("{}", Pretty(&f.atom)))
            .collect()
    };
    let (givens, goals) = (side(Sign::Assert), side(Sign::Deny));
    match (givens.is_empty(), goals.is_empty()) {
        (true, _) => format!("Prove that {}", goals.join(" or ")),
        (false, true) => format!("Prove that {} cannot all hold", givens.join(", ")),
        (false, false) => format!("Prove that {} implies {}", givens.join(" and "), goals.join(" or ")),
    }
}

#[derive(Serialize)]
struct GenerationJson {
    input: Vec<String>,
    mode: Mode,
    minimal_size: usize,
    candidates_considered: usize,
    outputs: Vec<OutputJson>,
}

#[derive(Serialize)]
struct OutputJson {
    signed_formulas: Vec<String>,
    replacements: Vec<ReplacementJson>,
    witness_size: usize,
    strict_verified: bool,
}

#[derive(Serialize)]
struct ReplacementJson {
    formula: usize,
    symbol: String,
    occurrence: usize,
    position: String,
    to: String,
}

impl Generation {
    pub fn to_json(&self) -> String {
        let doc = GenerationJson {
            input: self.input.iter().map(|f| f.to_string()).collect(),
            mode: self.mode,
            minimal_size: self.minimal_size,
            candidates_considered: self.candidates_considered,
            outputs: self
                .outputs
                .iter()
                .map(|g| OutputJson {
                    signed_formulas: g.formulas.iter().map(|f| f.to_string()).collect(),
                    replacements: g
                        .replacements
                        .iter()
                        .map(|r| ReplacementJson {
                            formula: r.occurrence.formula,
                            symbol: r.occurrence.symbol.name().to_string(),
                            occurrence: r.occurrence.index,
                            position: r.occurrence.position.to_string(),
                            to: r.to.name().to_string(),
                        })
                        .collect(),
                    witness_size: g.witness.deductive_size(),
                    strict_verified: g.strict_verified,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("generation results always serialize")
    }

    pub fn render_text(&self, rs: &RuleSet, show_proofs: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "minimal size {}; {} candidates considered; {} generated ({} mode)",
            self.minimal_size,
            self.candidates_considered,
            self.outputs.len(),
            match self.mode {
                Mode::Fast => "fast",
                Mode::Strict => "strict",
            }
        );
        for (i, g) in self.outputs.iter().enumerate() {
            let _ = writeln!(out, "{}. {}", i + 1, exercise_sentence(&g.formulas));
            if show_proofs {
                for line in g.witness.render_text(rs).lines() {
                    let _ = writeln!(out, "   {}", line);
                }
            }
        }
        out
    }
}
