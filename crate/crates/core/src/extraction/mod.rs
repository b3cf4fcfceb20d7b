//! Extraction of theory-specific tableau rules from definitional axioms.

pub(crate) mod json;
mod normal;
#[cfg(test)]
mod tests;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::{Atom, FoFormula, Pretty, Sign, SignedFormula, Signature, Symbol};
use crate::theory::{Theory, Violation};

pub use normal::{rinf_forms, skolemize, to_cnf, to_pnf, Clause, Literal, Rinf};

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("theory is not valid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidTheory(Vec<Violation>),
    #[error("rule file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("rule `{rule}`: {message}")]
    BadRule { rule: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Conclusion {
    Formula(SignedFormula),
    /// The rule closes the branch.
    Close,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub premises: Vec<SignedFormula>,
    pub conclusion: Conclusion,
    pub source_axiom: String,
    /// Indices into `premises`.
    pub main_premises: Vec<usize>,
}

/// The analytic restrictions a rule may violate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Restriction {
    /// Conclusion variables must occur in the premises.
    VariablesInPremises = 1,
    /// The conclusion predicate is below some premise predicate.
    SmallerPredicate = 2,
    /// With a single predicate throughout, the conclusion is shallower than some premise.
    SmallerDepth = 3,
}

impl fmt::Display for Restriction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            Restriction::VariablesInPremises => "conclusion variables must occur in the premises",
            Restriction::SmallerPredicate => "conclusion predicate must be smaller than a premise predicate",
            Restriction::SmallerDepth => "conclusion must be shallower than a premise",
        };
        write!(f, "restriction {} ({})", *self as u8, text)
    }
}

impl Rule {
    pub fn is_close(&self) -> bool {
        self.conclusion == Conclusion::Close
    }

    pub fn conclusion_formula(&self) -> Option<&SignedFormula> {
        match &self.conclusion {
            Conclusion::Formula(sf) => Some(sf),
            Conclusion::Close => None,
        }
    }

    pub fn premise_variables(&self) -> BTreeSet<Symbol> {
        self.premises.iter().flat_map(|p| p.variables()).collect()
    }

    /// The implication `⋀ premises → conclusion` (`→ ⊥` for closing rules).
    pub fn correspondent_formula(&self) -> FoFormula {
        let lhs = FoFormula::conjunction(self.premises.iter().map(eq_fmla).collect());
        let rhs = self.conclusion_formula().map_or(FoFormula::Bottom, eq_fmla);
        FoFormula::implies(lhs, rhs)
    }

    /// Two-dimensional layout: premises above a bar, conclusion below.
    pub fn render_text(&self) -> String {
        let above: Vec<String> = self.premises.iter().map(|p| Pretty(p).to_string()).collect();
        let below = match &self.conclusion {
            Conclusion::Formula(sf) => Pretty(sf).to_string(),
            Conclusion::Close => "⊗".to_string(),
        };
        let width = above.iter().chain([&below]).map(|s| s.chars().count()).max().unwrap_or(1);
        let mut out = String::new();
        for a in &above {
            out.push_str(&format!("  {}\n", a));
        }
        out.push_str(&format!("  {}  {}\n", "─".repeat(width), self.name));
        out.push_str(&format!("  {}\n", below));
        out
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {{", self.name)?;
        for (i, p) in self.premises.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", Pretty(p))?;
        }
        match &self.conclusion {
            Conclusion::Formula(sf) => write!(f, "}} ⟹ {}", Pretty(sf)),
            Conclusion::Close => f.write_str("} ⟹ ⊗"),
        }
    }
}

fn eq_fmla(sf: &SignedFormula) -> FoFormula {
    let a = FoFormula::Atom(sf.atom.clone());
    match sf.sign {
        Sign::Assert => a,
        Sign::Deny => FoFormula::not(a),
    }
}

/// Lexicographic (depth, node count): depth alone cannot separate
/// `fst(x) ∈ y` from `x ∈ y × z`.
fn complexity(a: &Atom) -> (usize, usize) {
    (a.depth(), a.size())
}

/// Checks the analytic restrictions. When every premise and the conclusion
/// share one predicate, the depth restriction applies; otherwise the
/// predicate-order one does. Closing rules have nothing to check.
pub fn check_analytic(r: &Rule, th: &Theory) -> Result<(), Vec<Restriction>> {
    let Some(concl) = r.conclusion_formula() else {
        return Ok(());
    };
    let mut out = Vec::new();
    if !concl.variables().is_subset(&r.premise_variables()) {
        out.push(Restriction::VariablesInPremises);
    }
    let pred = concl.atom.predicate();
    if r.premises.iter().all(|p| p.atom.predicate() == pred) {
        let c = complexity(&concl.atom);
        if !r.premises.iter().any(|p| c < complexity(&p.atom)) {
            out.push(Restriction::SmallerDepth);
        }
    } else if !r.premises.iter().any(|p| th.less(pred, p.atom.predicate())) {
        out.push(Restriction::SmallerPredicate);
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// A rule with a main premise, for generating cut instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutSeed {
    pub rule: usize,
    pub main: usize,
    pub minors: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    pub skolems: Vec<(Symbol, String)>,
    pub cut_seeds: Vec<CutSeed>,
    signature: Signature,
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>, skolems: Vec<(Symbol, String)>, base: &Signature) -> Self {
        let mut signature = base.clone();
        for (s, _) in &skolems {
            signature.declare(s.clone());
        }
        let cut_seeds = cut_seed_pairs(&rules);
        RuleSet {
            rules,
            skolems,
            cut_seeds,
            signature,
        }
    }

    /// The theory signature extended with the Skolem functions.
    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn rule(&self, name: &str) -> Option<(usize, &Rule)> {
        self.rules.iter().enumerate().find(|(_, r)| r.name == name)
    }

    pub fn skolem_symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.skolems.iter().map(|(s, _)| s)
    }
}

/// Premises holding every premise variable, for rules with two or more premises.
pub fn main_premises(premises: &[SignedFormula]) -> Vec<usize> {
    if premises.len() < 2 {
        return Vec::new();
    }
    let all: BTreeSet<Symbol> = premises.iter().flat_map(|p| p.variables()).collect();
    (0..premises.len())
        .filter(|&i| premises[i].variables() == all)
        .collect()
}

pub fn cut_seed_pairs(rules: &[Rule]) -> Vec<CutSeed> {
    let mut out = Vec::new();
    for (i, r) in rules.iter().enumerate() {
        for &m in &r.main_premises {
            out.push(CutSeed {
                rule: i,
                main: m,
                minors: (0..r.premises.len()).filter(|&j| j != m).collect(),
            });
        }
    }
    out
}

fn canonical_name(n: usize) -> String {
    const NAMES: [&str; 6] = ["x", "y", "z", "w", "v", "u"];
    NAMES.get(n).map_or_else(|| format!("x{}", n - NAMES.len() + 1), |s| s.to_string())
}

fn to_signed(l: &Literal) -> SignedFormula {
    let sign = if l.positive { Sign::Assert } else { Sign::Deny };
    SignedFormula::new(sign, l.atom.clone())
}

/// Builds the unnamed rule for a RINF form: main premises first, then
/// pattern variables renamed x, y, z, … in order of appearance.
fn rule_from_rinf(form: &Rinf, axiom: &str) -> Rule {
    let mut premises: Vec<SignedFormula> = form.antecedent.iter().map(to_signed).collect();
    let mains = main_premises(&premises);
    let mut order: Vec<usize> = mains.clone();
    order.extend((0..premises.len()).filter(|i| !mains.contains(i)));
    premises = order.iter().map(|&i| premises[i].clone()).collect();
    let conclusion = form.consequent.as_ref().map(to_signed);

    let mut map: BTreeMap<Symbol, Symbol> = BTreeMap::new();
    for sf in premises.iter().chain(conclusion.iter()) {
        for (_, s) in sf.atom.tree().preorder() {
            if s.is_variable() && !map.contains_key(s) {
                map.insert(s.clone(), Symbol::pattern_var(&canonical_name(map.len())));
            }
        }
    }
    let rename = |sf: &SignedFormula| SignedFormula::new(sf.sign, sf.atom.rename_variables(&map));
    let premises: Vec<SignedFormula> = premises.iter().map(rename).collect();
    Rule {
        name: String::new(),
        main_premises: (0..mains.len()).collect(),
        premises,
        conclusion: conclusion.map_or(Conclusion::Close, |c| Conclusion::Formula(rename(&c))),
        source_axiom: axiom.to_string(),
    }
}

/// Key identifying a rule up to premise order.
fn rule_key(r: &Rule) -> (BTreeSet<SignedFormula>, Conclusion) {
    (r.premises.iter().cloned().collect(), r.conclusion.clone())
}

/// Intermediate results for one axiom, kept for inspection and tests.
#[derive(Debug, Clone)]
pub struct AxiomExtraction {
    pub axiom: String,
    pub prenex: FoFormula,
    pub matrix: FoFormula,
    pub skolems: Vec<Symbol>,
    pub clauses: Vec<Clause>,
    pub rules: Vec<Rule>,
    pub rejected: Vec<(Rule, Vec<Restriction>)>,
}

/// Runs the pipeline on one axiom. `taken` lists names Skolem functions must avoid.
pub fn extract_axiom(th: &Theory, axiom: &str, formula: &FoFormula, taken: &Signature) -> AxiomExtraction {
    let prenex = to_pnf(formula);
    let (matrix, skolems) = skolemize(&prenex, axiom, taken);
    let clauses = to_cnf(&matrix);
    let mut rules: Vec<Rule> = Vec::new();
    let mut rejected = Vec::new();
    let mut seen = BTreeSet::new();
    for clause in &clauses {
        // Later literals first: gives the conventional numbering, e.g. the
        // rule concluding `x ∈ z` from `x ∈ y ∪ z` is the first.
        for form in rinf_forms(clause).iter().rev() {
            let rule = rule_from_rinf(form, axiom);
            match check_analytic(&rule, th) {
                Ok(()) => {
                    if seen.insert(rule_key(&rule)) {
                        rules.push(rule);
                    }
                }
                Err(v) => rejected.push((rule, v)),
            }
        }
    }
    name_rules(&mut rules, axiom);
    AxiomExtraction {
        axiom: axiom.to_string(),
        prenex,
        matrix,
        skolems,
        clauses,
        rules,
        rejected,
    }
}

/// `+unionE1`, `-unionE2`, …; closing rules are `+emptyset`. The index is
/// dropped when a (sign, kind) group has a single rule.
fn name_rules(rules: &mut [Rule], axiom: &str) {
    let group = |r: &Rule| (r.premises[0].sign, r.is_close());
    let mut totals: BTreeMap<(Sign, bool), usize> = BTreeMap::new();
    for r in rules.iter() {
        *totals.entry(group(r)).or_default() += 1;
    }
    let mut counters: BTreeMap<(Sign, bool), usize> = BTreeMap::new();
    for r in rules.iter_mut() {
        let g = group(r);
        let k = counters.entry(g).or_default();
        *k += 1;
        let sign = match g.0 {
            Sign::Assert => "+",
            Sign::Deny => "-",
        };
        let suffix = if g.1 { "" } else { "E" };
        r.name = if totals[&g] == 1 {
            format!("{}{}{}", sign, axiom, suffix)
        } else {
            format!("{}{}{}{}", sign, axiom, suffix, k)
        };
    }
}

/// Extracts the rules of every axiom, in axiom order.
pub fn extract_rules(th: &Theory) -> Result<RuleSet, ExtractError> {
    th.validate().map_err(ExtractError::InvalidTheory)?;
    let mut rules = Vec::new();
    let mut skolems = Vec::new();
    let mut taken = th.signature().clone();
    for ax in &th.axioms {
        let ex = extract_axiom(th, &ax.name, &ax.formula, &taken);
        for s in &ex.skolems {
            taken.declare(s.clone());
        }
        skolems.extend(ex.skolems.into_iter().map(|s| (s, ax.name.clone())));
        rules.extend(ex.rules);
    }
    Ok(RuleSet::new(rules, skolems, th.signature()))
}
