use std::collections::BTreeMap;

use super::*;
use crate::syntax::{Atom, SymbolKind, Term, VarScope};
use crate::theory::parse_theory;

const SETS: &str = include_str!("../../data/sets.thy");

fn sets() -> Theory {
    parse_theory(SETS).unwrap()
}

/// Truth-table oracle: both formulas agree under every valuation of their atoms.
fn equivalent(a: &FoFormula, b: &FoFormula) -> bool {
    let mut atoms = a.atoms();
    for x in b.atoms() {
        if !atoms.contains(&x) {
            atoms.push(x);
        }
    }
    assert!(atoms.len() <= 16);
    (0u32..1 << atoms.len()).all(|bits| {
        let val = |x: &Atom| bits >> atoms.iter().position(|y| y == x).unwrap() & 1 == 1;
        a.eval(&val) == b.eval(&val)
    })
}

fn rule_text(r: &Rule) -> String {
    let mut prem: Vec<String> = r.premises.iter().map(|p| p.to_string()).collect();
    prem.sort();
    let concl = r.conclusion_formula().map_or("close".to_string(), |c| c.to_string());
    format!("{} => {}", prem.join(" ; "), concl)
}

#[test]
fn sets_theory_yields_the_expected_rule_families() {
    let rs = extract_rules(&sets()).unwrap();
    assert_eq!(rs.rules.len(), 35);
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &rs.rules {
        *counts.entry(r.source_axiom.as_str()).or_default() += 1;
    }
    let expected = [
        ("emptyset", 1),
        ("compl", 2),
        ("union", 4),
        ("inter", 4),
        ("diff", 4),
        ("prod", 4),
        ("symdiff", 8),
        ("subseteq", 4),
        ("disj", 4),
    ];
    assert_eq!(counts, expected.into_iter().collect());
    let arities: Vec<(String, usize)> = rs.skolem_symbols().map(|s| (s.name().to_string(), s.arity())).collect();
    assert_eq!(arities, vec![("sk_subseteq_1".to_string(), 2), ("sk_disj_1".to_string(), 2)]);
    let th = sets();
    for r in &rs.rules {
        assert_eq!(check_analytic(r, &th), Ok(()), "{}", r);
    }
}

#[test]
fn sets_rules_match_the_reference_table() {
    // The prod projections apply fst and snd to the element, not the set.
    let table = [
        ("+emptyset", "+ in(x,emptyset) => close"),
        ("+complE", "+ in(x,compl(y)) => - in(x,y)"),
        ("-complE", "- in(x,compl(y)) => + in(x,y)"),
        ("+unionE1", "+ in(x,union(y,z)) ; - in(x,y) => + in(x,z)"),
        ("+unionE2", "+ in(x,union(y,z)) ; - in(x,z) => + in(x,y)"),
        ("-unionE1", "- in(x,union(y,z)) => - in(x,y)"),
        ("-unionE2", "- in(x,union(y,z)) => - in(x,z)"),
        ("+interE1", "+ in(x,inter(y,z)) => + in(x,y)"),
        ("+interE2", "+ in(x,inter(y,z)) => + in(x,z)"),
        ("-interE1", "+ in(x,y) ; - in(x,inter(y,z)) => - in(x,z)"),
        ("-interE2", "+ in(x,z) ; - in(x,inter(y,z)) => - in(x,y)"),
        ("+diffE1", "+ in(x,diff(y,z)) => + in(x,y)"),
        ("+diffE2", "+ in(x,diff(y,z)) => - in(x,z)"),
        ("-diffE1", "+ in(x,y) ; - in(x,diff(y,z)) => + in(x,z)"),
        ("-diffE2", "- in(x,diff(y,z)) ; - in(x,z) => - in(x,y)"),
        ("+prodE1", "+ in(x,prod(y,z)) => + in(fst(x),y)"),
        ("+prodE2", "+ in(x,prod(y,z)) => + in(snd(x),z)"),
        ("-prodE1", "+ in(fst(x),y) ; - in(x,prod(y,z)) => - in(snd(x),z)"),
        ("-prodE2", "+ in(snd(x),z) ; - in(x,prod(y,z)) => - in(fst(x),y)"),
        ("+subseteqE1", "+ in(z,x) ; + subseteq(x,y) => + in(z,y)"),
        ("+subseteqE2", "+ subseteq(x,y) ; - in(z,y) => - in(z,x)"),
        ("-subseteqE1", "- subseteq(x,y) => + in(sk_subseteq_1(x,y),x)"),
        ("-subseteqE2", "- subseteq(x,y) => - in(sk_subseteq_1(x,y),y)"),
        ("+disjE1", "+ disj(x,y) ; + in(z,x) => - in(z,y)"),
        ("+disjE2", "+ disj(x,y) ; + in(z,y) => - in(z,x)"),
        ("-disjE1", "- disj(x,y) => + in(sk_disj_1(x,y),x)"),
        ("-disjE2", "- disj(x,y) => + in(sk_disj_1(x,y),y)"),
    ];
    let rs = extract_rules(&sets()).unwrap();
    for (name, text) in table {
        let (_, r) = rs.rule(name).unwrap_or_else(|| panic!("missing {}", name));
        assert_eq!(rule_text(r), text, "{}", name);
    }
    // The eight symdiff rules, as a multiset up to naming.
    let mut symdiff: Vec<String> = rs
        .rules
        .iter()
        .filter(|r| r.source_axiom == "symdiff")
        .map(rule_text)
        .collect();
    symdiff.sort();
    let mut expected = [
        "+ in(x,symdiff(y,z)) ; - in(x,y) => + in(x,z)",
        "+ in(x,symdiff(y,z)) ; - in(x,z) => + in(x,y)",
        "+ in(x,symdiff(y,z)) ; + in(x,y) => - in(x,z)",
        "+ in(x,symdiff(y,z)) ; + in(x,z) => - in(x,y)",
        "- in(x,symdiff(y,z)) ; - in(x,y) => - in(x,z)",
        "- in(x,symdiff(y,z)) ; - in(x,z) => - in(x,y)",
        "+ in(x,y) ; - in(x,symdiff(y,z)) => + in(x,z)",
        "+ in(x,z) ; - in(x,symdiff(y,z)) => + in(x,y)",
    ];
    expected.sort();
    // premises inside each line are sorted; normalize expected the same way
    let norm = |s: &str| {
        let (lhs, rhs) = s.split_once(" => ").unwrap();
        let mut p: Vec<&str> = lhs.split(" ; ").collect();
        p.sort();
        format!("{} => {}", p.join(" ; "), rhs)
    };
    let mut expected: Vec<String> = expected.iter().map(|s| norm(s)).collect();
    expected.sort();
    assert_eq!(symdiff, expected);
}

#[test]
fn main_premise_comes_first() {
    let rs = extract_rules(&sets()).unwrap();
    let (_, r) = rs.rule("-interE1").unwrap();
    assert_eq!(r.premises[0].to_string(), "- in(x,inter(y,z))");
    assert_eq!(r.main_premises, vec![0]);
    let (_, r) = rs.rule("+subseteqE1").unwrap();
    assert!(r.main_premises.is_empty());
}

#[test]
fn cut_seeds() {
    let rs = extract_rules(&sets()).unwrap();
    let (i, _) = rs.rule("-interE1").unwrap();
    let seeds: Vec<&CutSeed> = rs.cut_seeds.iter().filter(|s| s.rule == i).collect();
    assert_eq!(seeds, vec![&CutSeed { rule: i, main: 0, minors: vec![1] }]);
    for name in ["+subseteqE1", "+subseteqE2", "+disjE1", "+interE1", "+emptyset"] {
        let (i, _) = rs.rule(name).unwrap();
        assert!(rs.cut_seeds.iter().all(|s| s.rule != i), "{}", name);
    }
    // every seed's main premise holds all premise variables
    for s in &rs.cut_seeds {
        let r = &rs.rules[s.rule];
        assert_eq!(r.premises[s.main].variables(), r.premise_variables());
    }
}

fn pattern_rule(th: &Theory, premises: &[&str], conclusion: &str) -> Rule {
    let sig = th.signature();
    let premises: Vec<SignedFormula> = premises
        .iter()
        .map(|p| sig.parse_signed(p, VarScope::Pattern).unwrap())
        .collect();
    Rule {
        name: "r".into(),
        main_premises: main_premises(&premises),
        premises,
        conclusion: Conclusion::Formula(sig.parse_signed(conclusion, VarScope::Pattern).unwrap()),
        source_axiom: "a".into(),
    }
}

#[test]
fn analytic_restriction_verdicts() {
    let th = sets();
    let a = pattern_rule(&th, &["+ in(x,y)"], "+ in(x,union(y,z))");
    assert_eq!(
        check_analytic(&a, &th),
        Err(vec![Restriction::VariablesInPremises, Restriction::SmallerDepth])
    );
    let b = pattern_rule(&th, &["+ in(z,x)", "- in(z,y)"], "- subseteq(x,y)");
    assert_eq!(check_analytic(&b, &th), Err(vec![Restriction::SmallerPredicate]));
    let c = pattern_rule(&th, &["+ subseteq(x,y)", "- in(z,y)"], "- in(z,x)");
    assert_eq!(check_analytic(&c, &th), Ok(()));
}

#[test]
fn commutation_axiom_yields_no_rules() {
    let doc = format!("{}\naxiom comm: forall x y z . in(x, union(y, z)) -> in(x, union(z, y))\n", SETS);
    let th = parse_theory(&doc).unwrap();
    let ax = th.axiom("comm").unwrap();
    let ex = extract_axiom(&th, "comm", &ax.formula, th.signature());
    assert!(ex.rules.is_empty());
    assert_eq!(ex.rejected.len(), 2);
    for (_, v) in &ex.rejected {
        assert_eq!(v, &vec![Restriction::SmallerDepth]);
    }
}

#[test]
fn emptyset_gives_a_closing_rule() {
    let th = sets();
    let ax = th.axiom("emptyset").unwrap();
    let ex = extract_axiom(&th, "emptyset", &ax.formula, th.signature());
    assert_eq!(ex.clauses.len(), 1);
    assert_eq!(ex.clauses[0].to_string(), "¬x ∈ ∅");
    assert_eq!(ex.rules.len(), 1);
    assert!(ex.rules[0].is_close());
    assert_eq!(ex.rules[0].premises[0].to_string(), "+ in(x,emptyset)");
    assert!(ex.skolems.is_empty());
    assert_eq!(ex.rules[0].correspondent_formula().to_string(), "in(x,emptyset) -> false");
}

#[test]
fn subseteq_pipeline_matches_the_worked_example() {
    let th = sets();
    let ax = th.axiom("subseteq").unwrap();
    let ex = extract_axiom(&th, "subseteq", &ax.formula, th.signature());
    assert!(ex.prenex.is_prenex());
    assert_eq!(ex.skolems, vec![Symbol::skolem("sk_subseteq_1", 2)]);

    // ((f(x,y) ∈ x → f(x,y) ∈ y) → x ⊆ y) ∧ (x ⊆ y → (z ∈ x → z ∈ y))
    let mut sig = th.signature().clone();
    sig.declare(Symbol::skolem("sk_subseteq_1", 2));
    let a = |t: &str| FoFormula::Atom(sig.parse_atom(t, VarScope::Object).unwrap());
    let reference = FoFormula::and(
        FoFormula::implies(
            FoFormula::implies(a("in(sk_subseteq_1(x,y),x)"), a("in(sk_subseteq_1(x,y),y)")),
            a("subseteq(x,y)"),
        ),
        FoFormula::implies(a("subseteq(x,y)"), FoFormula::implies(a("in(z,x)"), a("in(z,y)"))),
    );
    let free: Vec<String> = ex.matrix.free_variables().iter().map(|v| v.name().to_string()).collect();
    assert_eq!(free, ["x", "y", "z"]);
    assert!(equivalent(&ex.matrix, &reference));

    let clauses: Vec<String> = ex.clauses.iter().map(|c| c.to_string()).collect();
    assert_eq!(clauses.len(), 3);
    for expected in [
        "¬x ⊆ y ∨ ¬z ∈ x ∨ z ∈ y",
        "sk_subseteq_1(x, y) ∈ x ∨ x ⊆ y",
        "¬sk_subseteq_1(x, y) ∈ y ∨ x ⊆ y",
    ] {
        assert!(clauses.iter().any(|c| c == expected), "{} not in {:?}", expected, clauses);
    }
}

#[test]
fn hoisting_and_skolem_free_axioms() {
    let th = parse_theory("theory t\npredicate p 1\npredicate q 1\naxiom a: forall x . p(x) and forall y . q(y)\n").unwrap();
    let pnf = to_pnf(&th.axioms[0].formula);
    assert_eq!(pnf.to_string(), "forall x . forall y . p(x) and q(y)");
    let (matrix, sk) = skolemize(&pnf, "a", th.signature());
    assert!(sk.is_empty());
    assert!(matrix.is_quantifier_free());
}

#[test]
fn union_clauses() {
    let th = sets();
    let ex = extract_axiom(&th, "union", &th.axiom("union").unwrap().formula, th.signature());
    let clauses: Vec<String> = ex.clauses.iter().map(|c| c.to_string()).collect();
    assert_eq!(
        clauses,
        vec!["¬x ∈ y ∪ z ∨ x ∈ y ∨ x ∈ z", "¬x ∈ y ∨ x ∈ y ∪ z", "¬x ∈ z ∨ x ∈ y ∪ z"]
    );
}

#[test]
fn rinf_forms_of_a_three_literal_clause() {
    let th = sets();
    let ex = extract_axiom(&th, "subseteq", &th.axiom("subseteq").unwrap().formula, th.signature());
    let c = ex.clauses.iter().find(|c| c.literals.len() == 3).unwrap();
    let forms = rinf_forms(c);
    assert_eq!(forms.len(), 3);
    for f in &forms {
        assert!(equivalent(&f.to_formula(), &c.to_formula()));
    }
    let unit = Clause {
        literals: vec![Literal {
            positive: false,
            atom: th.signature().parse_atom("in(x,emptyset)", VarScope::Object).unwrap(),
        }],
    };
    let forms = rinf_forms(&unit);
    assert_eq!(forms.len(), 1);
    assert_eq!(forms[0].consequent, None);
    assert!(forms[0].antecedent[0].positive);
}

#[test]
fn oracle_matrix_and_clauses_agree_for_every_axiom() {
    let th = sets();
    for ax in &th.axioms {
        let ex = extract_axiom(&th, &ax.name, &ax.formula, th.signature());
        let cnf = FoFormula::conjunction(ex.clauses.iter().map(Clause::to_formula).collect());
        assert!(equivalent(&ex.matrix, &cnf), "{}", ax.name);
        for c in &ex.clauses {
            for f in rinf_forms(c) {
                assert!(equivalent(&f.to_formula(), &c.to_formula()), "{}: {}", ax.name, c);
            }
        }
        // every kept rule is the correspondent of a RINF form of some clause
        for r in &ex.rules {
            let cf = r.correspondent_formula();
            assert!(
                ex.clauses.iter().any(|c| equivalent_modulo_names(&cf, &c.to_formula())),
                "{}",
                r
            );
        }
    }
}

/// Equivalence under some bijection of rule variables onto clause variables.
fn equivalent_modulo_names(rule_formula: &FoFormula, clause: &FoFormula) -> bool {
    let rv: Vec<Symbol> = {
        let mut v = Vec::new();
        rule_formula.for_each_atom(&mut |a| {
            for s in a.tree().preorder().into_iter().map(|(_, s)| s.clone()) {
                if s.kind() == SymbolKind::PatternVariable && !v.contains(&s) {
                    v.push(s);
                }
            }
        });
        v
    };
    let cv: Vec<Symbol> = clause.free_variables().into_iter().collect();
    if rv.len() > cv.len() {
        return false;
    }
    let mut perm: Vec<usize> = (0..cv.len()).collect();
    loop {
        let map: BTreeMap<Symbol, Term> = rv
            .iter()
            .zip(&perm)
            .map(|(r, &i)| (r.clone(), Term::var(cv[i].clone())))
            .collect();
        let renamed = rule_formula.substitute(&map);
        if equivalent(&renamed, clause) {
            return true;
        }
        if !next_permutation(&mut perm) {
            return false;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[test]
fn correspondent_formula_reading() {
    let th = sets();
    let r = pattern_rule(&th, &["+ subseteq(x,y)", "- in(z,y)"], "- in(z,x)");
    assert_eq!(
        r.correspondent_formula().to_string(),
        "(subseteq(x,y) and (not in(z,y))) -> (not in(z,x))"
    );
}

#[test]
fn extraction_is_deterministic_and_round_trips_through_json() {
    let th = sets();
    let a = extract_rules(&th).unwrap();
    let b = extract_rules(&th).unwrap();
    assert_eq!(a, b);
    let json = a.to_json();
    let back = RuleSet::from_json(&json, &th).unwrap();
    assert_eq!(a, back);
    assert!(json.contains("\"close\""));
}

#[test]
fn loading_rejects_non_analytic_rules() {
    let th = sets();
    let json = r#"{"skolems": [], "rules": [{"name": "bad", "premises": [{"sign": "+", "formula": "in(x,y)"}],
        "conclusion": {"sign": "+", "formula": "in(x,union(y,z))"}, "source_axiom": "union", "main_premises": []}]}"#;
    let err = RuleSet::from_json(json, &th).unwrap_err();
    assert!(err.to_string().contains("restriction 1"), "{}", err);
}
