use super::*;
use crate::extraction::extract_rules;
use crate::theory::sets_theory;

pub(crate) fn rules() -> RuleSet {
    extract_rules(&sets_theory()).unwrap()
}

pub(crate) fn exercise(rs: &RuleSet, lines: &[&str]) -> Tableau {
    let hyps = parse_exercise(&lines.join("\n"), sets_theory().signature()).unwrap();
    let _ = rs;
    Tableau::new(&hyps).unwrap()
}

/// Applies the unique linear instance of `rule` on premises `prem` (any order).
pub(crate) fn lin(t: &Tableau, rs: &RuleSet, rule: &str, prem: &[NodeId]) -> Tableau {
    let mut want = prem.to_vec();
    want.sort_unstable();
    let hits: Vec<Application> = t
        .all_applications(rs, false)
        .into_iter()
        .filter(|a| match a {
            Application::Linear { rule: r, premises, .. } => {
                let mut p = premises.clone();
                p.sort_unstable();
                rs.rules[*r].name == rule && p == want
            }
            _ => false,
        })
        .collect();
    assert_eq!(hits.len(), 1, "{} on {:?}: {:?}", rule, prem, hits);
    t.apply(&hits[0], rs).unwrap()
}

pub(crate) fn cut(t: &Tableau, rs: &RuleSet, atom: &str, license: NodeId) -> Tableau {
    let formula = rs.signature().parse_atom(atom, crate::syntax::VarScope::Object).unwrap();
    let app = t
        .all_applications(rs, true)
        .into_iter()
        .find(|a| matches!(a, Application::Cut { formula: f, license: l, .. } if *f == formula && *l == license))
        .unwrap_or_else(|| panic!("no cut on {} licensed by {}", atom, license));
    t.apply(&app, rs).unwrap()
}

pub(crate) fn cut_proof(rs: &RuleSet) -> Proof {
    let t = exercise(rs, &["+ in(v, inter(x, y))", "- in(v, inter(union(x, w), union(y, z)))"]);
    let t = lin(&t, rs, "+interE1", &[1]);
    let t = lin(&t, rs, "+interE2", &[1]);
    let t = cut(&t, rs, "in(v, union(x, w))", 2);
    let t = lin(&t, rs, "-interE1", &[2, 5]);
    let t = lin(&t, rs, "-unionE1", &[7]);
    let t = lin(&t, rs, "-unionE1", &[6]);
    Proof::new(t).unwrap().renumbered()
}

pub(crate) fn model_proof(rs: &RuleSet) -> Proof {
    let t = exercise(rs, &["+ in(x, inter(y, union(w, z)))", "- in(x, union(inter(y, w), z))"]);
    let t = lin(&t, rs, "+interE1", &[1]);
    let t = lin(&t, rs, "+interE2", &[1]);
    let t = lin(&t, rs, "-unionE1", &[2]);
    let t = lin(&t, rs, "-unionE2", &[2]);
    let t = lin(&t, rs, "-interE1", &[3, 5]);
    let t = lin(&t, rs, "+unionE2", &[4, 6]);
    Proof::new(t).unwrap()
}

pub(crate) fn clean_mixed(rs: &RuleSet) -> Proof {
    let t = exercise(rs, &["+ in(p1, diff(compl(p3), p2))", "+ in(p1, union(p2, p3))"]);
    let t = lin(&t, rs, "+diffE1", &[1]);
    let t = lin(&t, rs, "+diffE2", &[1]);
    let t = lin(&t, rs, "+complE", &[3]);
    let t = lin(&t, rs, "+unionE1", &[2, 4]);
    Proof::new(t).unwrap()
}

pub(crate) fn unclean_chain(rs: &RuleSet) -> Proof {
    let t = exercise(rs, &["+ in(p1, inter(p2, inter(p3, inter(p4, p5))))", "- in(p1, p5)"]);
    let t = lin(&t, rs, "+interE1", &[1]);
    let t = lin(&t, rs, "+interE2", &[1]);
    let t = lin(&t, rs, "+interE2", &[4]);
    let t = lin(&t, rs, "+interE2", &[5]);
    Proof::new(t).unwrap()
}

#[test]
fn cut_proof_has_two_branches_of_sizes_seven_and_six() {
    let rs = rules();
    let p = cut_proof(&rs);
    assert_eq!(p.branches(), vec![vec![1, 2, 3, 4, 5, 6, 7], vec![1, 2, 3, 4, 8, 9]]);
    assert_eq!(p.dags()[0].closure, Closure::Pair(4, 7));
    assert_eq!(p.dags()[1].closure, Closure::Pair(3, 9));
    assert_eq!(p.dags()[0].size(), 7);
    assert_eq!(p.dags()[1].size(), 6);
    assert_eq!(p.deductive_size(), 13);
    assert!(p.is_clean());
    assert_eq!(p.tableau().node(8).just, Justification::Cut { license: 2 });
    assert_eq!(p.tableau().applications(), 6);
}

#[test]
fn one_step_proofs_have_size_four() {
    let rs = rules();
    for (a, rule) in [("inter", "+interE1"), ("diff", "+diffE1")] {
        let t = exercise(&rs, &[&format!("+ in(x, {}(y, z))", a), "- in(x, y)"]);
        let p = Proof::new(lin(&t, &rs, rule, &[1])).unwrap();
        assert_eq!(p.deductive_size(), 4);
        assert!(p.is_clean());
    }
}

#[test]
fn model_proof_has_size_nine() {
    let rs = rules();
    let p = model_proof(&rs);
    assert_eq!(p.deductive_size(), 9);
    assert_eq!(p.dags()[0].closure, Closure::Pair(7, 8));
    assert!(p.is_clean());
}

#[test]
fn cleanness_distinguishes_used_and_unused_steps() {
    let rs = rules();
    let (a, b) = (clean_mixed(&rs), unclean_chain(&rs));
    assert_eq!(a.deductive_size(), 7);
    assert!(a.is_clean());
    assert_eq!(b.deductive_size(), 6);
    assert!(!b.is_clean());
}

#[test]
fn closing_rule_gives_a_two_node_proof() {
    let rs = rules();
    let t = exercise(&rs, &["+ in(x, emptyset)"]);
    let apps = t.all_applications(&rs, true);
    assert_eq!(apps.len(), 1);
    assert!(matches!(apps[0], Application::Close { premise: 1, .. }));
    let p = Proof::new(t.apply(&apps[0], &rs).unwrap()).unwrap();
    assert_eq!(p.deductive_size(), 2);
    assert_eq!(p.tableau().applications(), 1);
}

#[test]
fn conjugate_hypotheses_close_immediately() {
    let rs = rules();
    let t = exercise(&rs, &["+ in(x, y)", "- in(x, y)"]);
    assert!(t.is_closed());
    assert!(t.all_applications(&rs, true).is_empty());
    assert_eq!(Proof::new(t).unwrap().deductive_size(), 3);
}

#[test]
fn regularity_and_staleness_are_enforced() {
    let rs = rules();
    let t = exercise(&rs, &["+ in(x, inter(y, z))", "+ in(x, y)"]);
    let apps = t.all_applications(&rs, false);
    // +interE1 would repeat node 2.
    assert!(apps.iter().all(|a| !matches!(a, Application::Linear { rule, .. } if rs.rules[*rule].name == "+interE1")));
    let app = apps[0].clone();
    let t2 = t.apply(&app, &rs).unwrap();
    assert!(matches!(t2.apply(&app, &rs), Err(TableauError::Stale(_))));
}

#[test]
fn cut_instances_come_from_minor_co_premises() {
    let rs = rules();
    let t = exercise(&rs, &["- in(v, inter(a, b))"]);
    let cuts: Vec<String> = t
        .applicable_cut_instances(1, &rs)
        .iter()
        .map(|a| match a {
            Application::Cut { formula, .. } => formula.to_string(),
            _ => unreachable!(),
        })
        .collect();
    assert_eq!(cuts, vec!["in(v,a)", "in(v,b)"]);
    // A polarity already on the branch suppresses the cut.
    let t = exercise(&rs, &["- in(v, inter(a, b))", "- in(v, a)"]);
    let n = t.applicable_cut_instances(2, &rs).len();
    assert_eq!(n, 1);
}

#[test]
fn json_round_trip_and_replay() {
    let rs = rules();
    for p in [cut_proof(&rs), model_proof(&rs), clean_mixed(&rs), unclean_chain(&rs)] {
        let text = p.to_json(&rs);
        let back = Proof::replay(&text, &rs, None).unwrap();
        assert_eq!(back, p);
    }
}

#[test]
fn replay_reports_the_offending_node() {
    let rs = rules();
    let mut doc = cut_proof(&rs).to_json_value(&rs);
    if let json::JustJson::Rule { premises, .. } = &mut doc.nodes[5].just {
        *premises = vec![1, 5];
    }
    let text = serde_json::to_string(&doc).unwrap();
    match Proof::replay(&text, &rs, None) {
        Err(TableauError::Replay { node, .. }) => assert_eq!(node, 6),
        other => panic!("{:?}", other),
    }

    let mut doc = model_proof(&rs).to_json_value(&rs);
    doc.branches[0].pop();
    doc.nodes.pop();
    doc.size = None;
    let text = serde_json::to_string(&doc).unwrap();
    assert!(Proof::replay(&text, &rs, None).is_err());

    let mut doc = model_proof(&rs).to_json_value(&rs);
    if let json::JustJson::Rule { rule, .. } = &mut doc.nodes[2].just {
        *rule = "+nosuchE".into();
    }
    let e = Proof::replay(&serde_json::to_string(&doc).unwrap(), &rs, None).unwrap_err();
    assert!(e.to_string().contains("unknown rule"), "{}", e);
}

#[test]
fn text_rendering_marks_cuts_and_closures() {
    let rs = rules();
    let text = cut_proof(&rs).render_text(&rs);
    assert!(text.contains("(6) −v ∈ y ∪ z  via -interE1 [2,5]"), "{}", text);
    assert!(text.contains("⊗ (4) (7)"));
    assert!(text.contains("via cut [2]"));
    assert!(text.ends_with("deductive size: 13\n"));
}

#[test]
fn exercise_parsing() {
    let sig = sets_theory().signature().clone();
    let ex = parse_exercise("# c\n+ in(x, y)\n\n- subseteq(x, y)\n", &sig).unwrap();
    assert_eq!(render_exercise(&ex), "+ in(x,y)\n- subseteq(x,y)\n");
    assert!(matches!(parse_exercise("", &sig), Err(TableauError::EmptyExercise)));
    assert!(matches!(
        parse_exercise("+ in(x,y)\n+ in(x,y) and in(y,x)", &sig),
        Err(TableauError::NotAtomic { line: 2, .. })
    ));
    match parse_exercise("+ in(x,y)\n+ in(x, sk_subseteq_1(x, y))", &sig) {
        Err(TableauError::Parse(e)) => assert_eq!(e.line, 2),
        other => panic!("{:?}", other),
    }
}
