mod common;

use std::collections::BTreeMap;

use common::{all_words, random_prime_clause};
use funcert::clause::{path_relation, Clause, Constraint, PathTerm, PathVar, Relation};
use funcert::lang::{Alphabet, Feature, LangStore};
use funcert::oracle::{bounded_sat, evaluate, FeatureGraph, Valuation};
use funcert::rewrite::Control;
use funcert::solver::{model_valuation, solve_clause, SolveOptions, Status};
use rand::rngs::StdRng;
use rand::SeedableRng;

#[test]
fn path_constraints_evaluate_to_the_path_relation() {
    let store = LangStore::new(Alphabet::new(["f", "g"]));
    let (mu, nu) = (PathVar(0), PathVar(1));
    let (m, n) = (PathTerm::var(mu), PathTerm::var(nu));
    let graph = FeatureGraph::default();
    let words = all_words(&[Feature(0), Feature(1)], 1, 3);
    for u in &words {
        for v in &words {
            let val = Valuation {
                fo: BTreeMap::new(),
                path: BTreeMap::from([(mu, u.clone()), (nu, v.clone())]),
            };
            let rel = path_relation(u, v);
            let holds =
                |c: Constraint| evaluate(&Clause::from_constraints([c]), &store, &graph, &val);
            assert_eq!(holds(Constraint::div(m, n)), rel == Relation::Diverge);
            assert_eq!(
                holds(Constraint::prefix(m, n)),
                rel == Relation::ProperPrefix
            );
            assert_eq!(holds(Constraint::path_eq(m, n)), rel == Relation::Equal);
        }
    }
}

#[test]
fn bounded_search_is_monotone() {
    let mut rng = StdRng::seed_from_u64(31);
    for i in 0..150 {
        let (store, c) = random_prime_clause(&mut rng);
        if bounded_sat(&c, &store, 2, 4).is_some() {
            assert!(bounded_sat(&c, &store, 3, 6).is_some(), "{i}");
        }
    }
}

#[test]
fn short_witnesses_are_found_by_the_oracle() {
    let mut rng = StdRng::seed_from_u64(32);
    let mut checked = 0;
    for i in 0..150 {
        let (store, c) = random_prime_clause(&mut rng);
        let r = solve_clause(&c, &store, &SolveOptions::with_control(Control::Quasi)).unwrap();
        if r.status != Status::Sat {
            continue;
        }
        let w = &r.witnesses[0];
        let val = model_valuation(w, &c, &store).expect("witness is a model");
        let k = val.path.values().map(Vec::len).max().unwrap_or(0);
        if k <= 3 {
            let n = c.fo_vars().len() + val.path.values().map(Vec::len).sum::<usize>();
            assert!(bounded_sat(&c, &store, k.max(1), n).is_some(), "{i}");
            checked += 1;
        }
    }
    assert!(checked > 50);
}
