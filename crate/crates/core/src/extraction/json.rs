//! Rule-set serialization.

use serde::{Deserialize, Serialize};

use super::{check_analytic, main_premises, Conclusion, ExtractError, Rule, RuleSet};
use crate::syntax::{Sign, SignedFormula, Signature, Symbol, VarScope};
use crate::theory::Theory;

#[derive(Serialize, Deserialize)]
pub(crate) struct SignedJson {
    pub sign: String,
    pub formula: String,
}

impl SignedJson {
    pub fn from_signed(sf: &SignedFormula) -> Self {
        SignedJson {
            sign: sign_text(sf.sign).to_string(),
            formula: sf.atom.to_string(),
        }
    }

    pub fn to_signed(&self, sig: &Signature, scope: VarScope) -> Result<SignedFormula, String> {
        let sign: Sign = self.sign.parse().map_err(|_| format!("bad sign `{}`", self.sign))?;
        let atom = sig.parse_atom(&self.formula, scope).map_err(|e| e.to_string())?;
        Ok(SignedFormula::new(sign, atom))
    }
}

pub(crate) fn sign_text(s: Sign) -> &'static str {
    match s {
        Sign::Assert => "+",
        Sign::Deny => "-",
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ConclusionJson {
    Close(String),
    Formula(SignedJson),
}

#[derive(Serialize, Deserialize)]
struct RuleJson {
    name: String,
    premises: Vec<SignedJson>,
    conclusion: ConclusionJson,
    source_axiom: String,
    main_premises: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SkolemJson {
    name: String,
    arity: usize,
    axiom: String,
}

#[derive(Serialize, Deserialize)]
struct RuleSetJson {
    skolems: Vec<SkolemJson>,
    rules: Vec<RuleJson>,
}

impl RuleSet {
    pub fn to_json(&self) -> String {
        let doc = RuleSetJson {
            skolems: self
                .skolems
                .iter()
                .map(|(s, ax)| SkolemJson {
                    name: s.name().to_string(),
                    arity: s.arity(),
                    axiom: ax.clone(),
                })
                .collect(),
            rules: self
                .rules
                .iter()
                .map(|r| RuleJson {
                    name: r.name.clone(),
                    premises: r.premises.iter().map(SignedJson::from_signed).collect(),
                    conclusion: match &r.conclusion {
                        Conclusion::Close => ConclusionJson::Close("close".into()),
                        Conclusion::Formula(sf) => ConclusionJson::Formula(SignedJson::from_signed(sf)),
                    },
                    source_axiom: r.source_axiom.clone(),
                    main_premises: r.main_premises.clone(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("rule sets always serialize")
    }

    /// Loads a rule file written by [`RuleSet::to_json`]. Every rule must be
    /// analytic for `th` and its main premises must be the computed ones.
    pub fn from_json(text: &str, th: &Theory) -> Result<RuleSet, ExtractError> {
        let doc: RuleSetJson = serde_json::from_str(text)?;
        let mut sig = th.signature().clone();
        let mut skolems = Vec::new();
        for s in &doc.skolems {
            let sym = Symbol::skolem(&s.name, s.arity);
            if !sig.declare(sym.clone()) {
                return Err(ExtractError::BadRule {
                    rule: s.name.clone(),
                    message: "skolem name clashes with a declared symbol".into(),
                });
            }
            skolems.push((sym, s.axiom.clone()));
        }
        let mut rules = Vec::new();
        for r in doc.rules {
            let bad = |message: String| ExtractError::BadRule {
                rule: r.name.clone(),
                message,
            };
            let premises = r
                .premises
                .iter()
                .map(|p| p.to_signed(&sig, VarScope::Pattern))
                .collect::<Result<Vec<_>, _>>()
                .map_err(bad)?;
            if premises.is_empty() {
                return Err(bad("a rule needs at least one premise".into()));
            }
            let conclusion = match &r.conclusion {
                ConclusionJson::Close(s) if s == "close" => Conclusion::Close,
                ConclusionJson::Close(s) => return Err(bad(format!("unknown conclusion `{}`", s))),
                ConclusionJson::Formula(f) => Conclusion::Formula(f.to_signed(&sig, VarScope::Pattern).map_err(bad)?),
            };
            let rule = Rule {
                main_premises: r.main_premises.clone(),
                name: r.name.clone(),
                premises,
                conclusion,
                source_axiom: r.source_axiom.clone(),
            };
            if main_premises(&rule.premises) != rule.main_premises {
                return Err(bad("main_premises do not match the premises".into()));
            }
            if let Err(v) = check_analytic(&rule, th) {
                let list: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                return Err(bad(format!("violates {}", list.join(", "))));
            }
            rules.push(rule);
        }
        Ok(RuleSet::new(rules, skolems, th.signature()))
    }
}
