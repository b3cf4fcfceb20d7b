mod common;

use std::collections::BTreeSet;
use std::time::Duration;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use proofgen::search::{canonical_key, minimal_proofs, Limits, SearchError};
use proofgen::syntax::SignedFormula;
use proofgen::tableau::{Application, Justification, Proof, ProofJson, Tableau};

fn limits() -> Limits {
    Limits {
        max_apps: 6,
        time_budget: Some(Duration::from_secs(5)),
        ..Limits::default()
    }
}

/// A closed tableau reached by random applications, if one is found.
fn random_closed(seed: u64, rs: &proofgen::extraction::RuleSet) -> Option<Proof> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e = random_exercise(&mut rng, 3);
    let mut t = Tableau::new(&e).ok()?;
    for _ in 0..12 {
        if t.is_closed() {
            return Proof::new(t).ok();
        }
        let apps = t.all_applications(rs, true);
        let a = apps.choose(&mut rng)?;
        t = t.apply(a, rs).unwrap();
    }
    t.is_closed().then(|| Proof::new(t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Refuted exercises have no model over a three-element universe.
    #[test]
    fn refutations_are_sound_in_small_models(seed in any::<u64>()) {
        let rs = rules();
        let e = random_exercise(&mut ChaCha8Rng::seed_from_u64(seed), 3);
        match minimal_proofs(&e, &rs, &limits()) {
            Ok(r) => {
                prop_assert!(!FiniteModel::satisfiable(&e), "{}", set_text(&e));
                for p in &r.proofs {
                    prop_assert!(p.is_clean());
                    let back = Proof::replay(&p.to_json(&rs), &rs, Some(&e)).unwrap();
                    prop_assert_eq!(back.deductive_size(), r.minimal_size);
                }
            }
            Err(SearchError::NotRefuted(_)) => {}
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn applications_never_repeat_a_formula_on_a_branch(seed in any::<u64>()) {
        let rs = rules();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = Tableau::new(&random_exercise(&mut rng, 3)).unwrap();
        for _ in 0..8 {
            let apps = t.all_applications(&rs, true);
            let Some(a) = apps.choose(&mut rng) else { break };
            t = t.apply(a, &rs).unwrap();
            for tip in t.leaves() {
                let branch = t.branch(tip);
                let distinct: BTreeSet<&SignedFormula> = branch.iter().map(|&n| &t.node(n).sf).collect();
                prop_assert_eq!(distinct.len(), branch.len());
            }
        }
    }

    #[test]
    fn closed_branches_contribute_at_least_two_nodes(seed in any::<u64>()) {
        let rs = rules();
        if let Some(p) = random_closed(seed, &rs) {
            prop_assert!(p.dags().iter().all(|d| d.size() >= 2));
            prop_assert_eq!(p.deductive_size(), p.dags().iter().map(|d| d.size()).sum::<usize>());
        }
    }

    /// Dropping a derived node that no minimal DAG and no other node uses
    /// leaves a valid closed proof of the same size.
    #[test]
    fn unused_nodes_can_be_removed(seed in any::<u64>()) {
        let rs = rules();
        let Some(p) = random_closed(seed, &rs) else { return Ok(()) };
        let t = p.tableau();
        let in_dag: BTreeSet<usize> = p.dags().iter().flat_map(|d| d.nodes.iter().copied()).collect();
        let used: BTreeSet<usize> = t.nodes().flat_map(|n| n.justifiers().to_vec()).collect();
        let removable: Vec<usize> = t
            .nodes()
            .filter(|n| matches!(n.just, Justification::Rule { .. }))
            .map(|n| n.id)
            .filter(|id| !in_dag.contains(id) && !used.contains(id))
            .collect();
        prop_assert_eq!(
            p.is_clean(),
            t.nodes().all(|n| n.just == Justification::Hypothesis || in_dag.contains(&n.id))
        );
        for k in removable {
            let mut doc: ProofJson = p.to_json_value(&rs);
            doc.nodes.retain(|n| n.id != k);
            for b in &mut doc.branches {
                b.retain(|&n| n != k);
            }
            doc.size = None;
            let back = Proof::replay(&serde_json::to_string(&doc).unwrap(), &rs, None).unwrap();
            prop_assert!(back.tableau().is_closed());
            prop_assert_eq!(back.deductive_size(), p.deductive_size());
        }
    }
}

#[test]
fn redundant_hypotheses_cost_at_most_one() {
    let rs = rules();
    for text in [
        "+ in(x, inter(y, z))\n- in(x, y)",
        "+ in(x, inter(y, union(w, z)))\n- in(x, union(inter(y, w), z))",
        "+ in(x, diff(y, symdiff(w, z)))\n- in(x, union(diff(y, w), z))",
        "+ in(x, union(y, z))\n- in(x, y)\n- in(x, z)",
        "+ in(x, compl(union(y, z)))\n+ in(x, y)",
    ] {
        let e = ex(text);
        let base = minimal_proofs(&e, &rs, &Limits::default()).unwrap().minimal_size;
        let t = Tableau::new(&e).unwrap();
        for a in t.all_applications(&rs, false) {
            let Application::Linear { conclusion, .. } = a else { continue };
            let mut more = e.clone();
            more.push(conclusion);
            let size = minimal_proofs(&more, &rs, &Limits::default()).unwrap().minimal_size;
            assert!(size <= base + 1, "{}: {} -> {}", text, base, size);
        }
    }
}

#[test]
fn search_results_do_not_depend_on_scheduling() {
    let rs = rules();
    let e = ex(&fixture("cut.exc"));
    let keys = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let r = pool.install(|| minimal_proofs(&e, &rs, &Limits::default())).unwrap();
        r.proofs
            .iter()
            .map(|p| (canonical_key(p.tableau(), &rs), p.render_text(&rs)))
            .collect::<Vec<_>>()
    };
    let one = keys(1);
    assert_eq!(one.len(), 8);
    assert_eq!(one, keys(4));
}

#[test]
fn random_walks_reach_unclean_closed_tableaux() {
    let rs = rules();
    let closed: Vec<Proof> = (0..200).filter_map(|seed| random_closed(seed, &rs)).collect();
    assert!(closed.len() >= 50, "{}", closed.len());
    assert!(closed.iter().any(|p| !p.is_clean()));
}

#[test]
fn finite_model_agrees_with_hand_checked_cases() {
    assert!(FiniteModel::satisfiable(&ex("+ in(x, y)")));
    assert!(!FiniteModel::satisfiable(&ex("+ in(x, inter(y, z))\n- in(x, y)")));
    assert!(FiniteModel::satisfiable(&ex("+ in(x, union(y, z))\n- in(x, y)")));
    assert!(!FiniteModel::satisfiable(&ex("+ in(x, emptyset)")));
}
