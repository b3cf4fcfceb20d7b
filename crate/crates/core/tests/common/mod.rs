#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::Rng;

use proofgen::extraction::{extract_rules, RuleSet};
use proofgen::search::canonical_key;
use proofgen::syntax::{Atom, Sign, SignedFormula, Term, VarScope};
use proofgen::tableau::{parse_exercise, Proof, Tableau};
use proofgen::theory::sets_theory;

pub fn rules() -> RuleSet {
    extract_rules(&sets_theory()).unwrap()
}

pub fn ex(text: &str) -> Vec<SignedFormula> {
    parse_exercise(text, sets_theory().signature()).unwrap()
}

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap()
}

/// Replays `<name>.proof.json` against `<name>.exc`.
pub fn fixture_proof(name: &str, rs: &RuleSet) -> Proof {
    let e = parse_exercise(&fixture(&format!("{}.exc", name)), rs.signature()).unwrap();
    Proof::replay(&fixture(&format!("{}.proof.json", name)), rs, Some(&e)).unwrap()
}

pub fn set_text(formulas: &[SignedFormula]) -> String {
    let mut v: Vec<String> = formulas.iter().map(|f| f.to_string()).collect();
    v.sort();
    v.join(" ; ")
}

/// Unpruned oracle: iterative deepening over every application on every
/// open branch, no state merging. Returns the minimal clean size and the
/// structural keys of the clean proofs of that size.
pub fn brute_force(exercise: &[SignedFormula], rs: &RuleSet, use_cut: bool, max_depth: usize) -> Option<(usize, BTreeSet<String>)> {
    fn walk(t: &Tableau, rs: &RuleSet, use_cut: bool, depth: usize, best: &mut Option<(usize, BTreeSet<String>)>) {
        if t.is_closed() {
            let p = Proof::new(t.clone()).unwrap();
            if p.is_clean() {
                let s = p.deductive_size();
                match best {
                    Some((b, keys)) if *b == s => {
                        keys.insert(canonical_key(t, rs));
                    }
                    Some((b, _)) if *b < s => {}
                    _ => *best = Some((s, BTreeSet::from([canonical_key(t, rs)]))),
                }
            }
            return;
        }
        if depth == 0 {
            return;
        }
        for a in t.all_applications(rs, use_cut) {
            walk(&t.apply(&a, rs).unwrap(), rs, use_cut, depth - 1, best);
        }
    }
    let t = Tableau::new(exercise).unwrap();
    let mut best = None;
    for depth in 0..=max_depth {
        best = None;
        walk(&t, rs, use_cut, depth, &mut best);
        if let Some((s, _)) = &best {
            // Clean proofs with n applications have size at least n + 1.
            if depth + 1 >= *s {
                return best;
            }
        }
    }
    best
}

const SETS: [&str; 3] = ["y", "z", "w"];

fn random_set_term(rng: &mut impl Rng, depth: usize) -> Term {
    let sig = sets_theory().signature().clone();
    let leaf = |rng: &mut dyn rand::RngCore| {
        if rng.gen_ratio(1, 8) {
            Term::constant(sig.get("emptyset").unwrap().clone())
        } else {
            let name = SETS.choose(rng).unwrap();
            Term::var(proofgen::syntax::Symbol::object_var(name))
        }
    };
    if depth == 0 || rng.gen_ratio(1, 3) {
        return leaf(rng);
    }
    let f = ["inter", "union", "diff", "symdiff", "compl"].choose(rng).unwrap();
    let head = sig.get(f).unwrap().clone();
    let args = (0..head.arity()).map(|_| random_set_term(rng, depth - 1)).collect();
    Term::app(head, args)
}

fn subterms(t: &Term, out: &mut Vec<Term>) {
    out.push(t.clone());
    for a in t.args() {
        subterms(a, out);
    }
}

/// A random membership exercise over `x` and sets `y, z, w` whose atoms
/// have depth at most `max_depth`: one or two compound memberships plus
/// literals about their subterms.
pub fn random_exercise(rng: &mut impl Rng, max_depth: usize) -> Vec<SignedFormula> {
    let sig = sets_theory().signature().clone();
    let member = |t: Term| {
        Atom::new(
            sig.get("in").unwrap().clone(),
            vec![Term::var(proofgen::syntax::Symbol::object_var("x")), t],
        )
    };
    let sign = |rng: &mut dyn rand::RngCore| if rng.gen_bool(0.5) { Sign::Assert } else { Sign::Deny };
    let mut out: Vec<SignedFormula> = Vec::new();
    let mut pool = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let t = random_set_term(rng, max_depth.saturating_sub(1));
        subterms(&t, &mut pool);
        out.push(SignedFormula::new(sign(rng), member(t)));
    }
    for _ in 0..rng.gen_range(1..=2) {
        let t = pool.choose(rng).unwrap().clone();
        out.push(SignedFormula::new(sign(rng), member(t)));
    }
    let mut seen = BTreeSet::new();
    out.retain(|f| seen.insert(f.clone()));
    out
}

/// Finite interpretation of the set-theoretic vocabulary: elements are
/// `0..3`, sets are bit masks over them.
pub struct FiniteModel;

impl FiniteModel {
    const UNIVERSE: u32 = 3;
    const FULL: u32 = (1 << Self::UNIVERSE) - 1;

    fn set(t: &Term, env: &dyn Fn(&str) -> u32) -> u32 {
        let a = |i: usize| Self::set(&t.args()[i], env);
        match t.head().name() {
            "emptyset" => 0,
            "compl" => !a(0) & Self::FULL,
            "union" => a(0) | a(1),
            "inter" => a(0) & a(1),
            "diff" => a(0) & !a(1),
            "symdiff" => a(0) ^ a(1),
            v if t.is_variable() => env(v),
            other => panic!("no interpretation for {}", other),
        }
    }

    fn holds(sf: &SignedFormula, x: u32, env: &dyn Fn(&str) -> u32) -> bool {
        let args = sf.atom.args();
        let truth = match sf.atom.predicate().name() {
            "in" => {
                assert_eq!(args[0].head().name(), "x");
                Self::set(&args[1], env) >> x & 1 == 1
            }
            "subseteq" => Self::set(&args[0], env) & !Self::set(&args[1], env) == 0,
            "disj" => Self::set(&args[0], env) & Self::set(&args[1], env) == 0,
            other => panic!("no interpretation for {}", other),
        };
        truth == (sf.sign == Sign::Assert)
    }

    /// Whether some element `x` and sets `y, z, w` satisfy every formula.
    pub fn satisfiable(formulas: &[SignedFormula]) -> bool {
        let n = 1u32 << Self::UNIVERSE;
        (0..Self::UNIVERSE).any(|x| {
            (0..n * n * n).any(|code| {
                let env = |v: &str| match v {
                    "y" => code % n,
                    "z" => code / n % n,
                    "w" => code / (n * n),
                    other => panic!("unexpected variable {}", other),
                };
                formulas.iter().all(|f| Self::holds(f, x, &env))
            })
        })
    }
}

pub fn parse_atom(text: &str) -> Atom {
    sets_theory().signature().parse_atom(text, VarScope::Object).unwrap()
}
