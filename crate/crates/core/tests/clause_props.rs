mod common;

use common::{all_words, random_km, random_prime_clause};
use funcert::clause::{
    canonicalize, classify, path_relation, translate_km, Clause, Constraint, FoVar, PathTerm,
    PathVar, Relation, SimpleTerm,
};
use funcert::lang::{Alphabet, Feature, LangStore};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

fn is_proper_prefix(u: &[Feature], v: &[Feature]) -> bool {
    v.len() > u.len() && v.starts_with(u)
}

fn diverge(u: &[Feature], v: &[Feature]) -> bool {
    (0..u.len().min(v.len())).any(|i| u[..i] == v[..i] && u[i] != v[i])
}

#[test]
fn exactly_one_relation_per_pair() {
    let f = vec![Feature(0), Feature(1)];
    let words = all_words(&f, 1, 4);
    for u in &words {
        for v in &words {
            let holds = [
                (Relation::Equal, u == v),
                (Relation::ProperPrefix, is_proper_prefix(u, v)),
                (Relation::ProperSuffixOf, is_proper_prefix(v, u)),
                (Relation::Diverge, diverge(u, v)),
            ];
            let true_ones: Vec<Relation> =
                holds.iter().filter(|(_, b)| *b).map(|(r, _)| *r).collect();
            assert_eq!(true_ones, vec![path_relation(u, v)], "{u:?} {v:?}");
        }
    }
}

#[test]
fn divergence_is_symmetric_and_prefix_is_not() {
    let words = all_words(&[Feature(0), Feature(1)], 1, 4);
    for u in &words {
        assert_eq!(path_relation(u, u), Relation::Equal);
        for v in &words {
            let (a, b) = (path_relation(u, v), path_relation(v, u));
            assert_eq!(a == Relation::Diverge, b == Relation::Diverge);
            assert_eq!(a == Relation::ProperPrefix, b == Relation::ProperSuffixOf);
        }
    }
}

#[test]
fn km_translation_is_prime_and_admissible() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..300 {
        let names = ["f", "g"];
        let store = LangStore::new(Alphabet::new(names));
        let km = random_km(&mut rng, &store, &names);
        let c = translate_km(&km);
        let k = classify(&c, &store);
        assert!(k.prime, "{km:?}");
        assert!(k.admissible, "{km:?}");
    }
}

#[test]
fn prime_clauses_are_admissible_and_flags_nest() {
    let mut rng = StdRng::seed_from_u64(12);
    for _ in 0..300 {
        let (store, c) = random_prime_clause(&mut rng);
        let k = classify(&c, &store);
        assert!(k.prime);
        assert!(k.admissible);
        assert!(!k.solved || k.simplified);
        assert!(!k.presolved || k.simplified);
    }
}

fn rename_term(s: SimpleTerm, p: &[u32]) -> SimpleTerm {
    match s {
        SimpleTerm::Var(v) => SimpleTerm::Var(PathVar(p[v.0 as usize])),
        f => f,
    }
}

fn rename_path(t: PathTerm, p: &[u32]) -> PathTerm {
    match t {
        PathTerm::Simple(s) => PathTerm::Simple(rename_term(s, p)),
        PathTerm::Complex(a, b) => PathTerm::Complex(rename_term(a, p), rename_term(b, p)),
    }
}

fn rename(c: &Constraint, fo: &[u32], path: &[u32]) -> Constraint {
    let x = |v: FoVar| FoVar(fo[v.0 as usize]);
    match *c {
        Constraint::Sort(a, v) => Constraint::Sort(a, x(v)),
        Constraint::Sub(v, s, w) => Constraint::Sub(x(v), rename_term(s, path), x(w)),
        Constraint::Div(a, b) => Constraint::div(rename_path(a, path), rename_path(b, path)),
        Constraint::Prefix(a, b) => Constraint::prefix(rename_path(a, path), rename_path(b, path)),
        Constraint::PathEq(a, b) => Constraint::path_eq(rename_path(a, path), rename_path(b, path)),
        Constraint::Restrict(a, l) => Constraint::restrict(rename_path(a, path), l),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn canonical_form_ignores_renaming_and_order(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (_, c) = random_prime_clause(&mut rng);
        let mut fo: Vec<u32> = (0..8).collect();
        let mut path: Vec<u32> = (0..8).collect();
        fo.shuffle(&mut rng);
        path.shuffle(&mut rng);
        let mut cs: Vec<Constraint> = c.iter().map(|k| rename(k, &fo, &path)).collect();
        cs.shuffle(&mut rng);
        let d = Clause::from_constraints(cs);
        prop_assert_eq!(canonicalize(&c), canonicalize(&d));
    }
}
