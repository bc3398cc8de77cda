mod common;

use common::random_prime_clause;
use funcert::clause::{classify, Clause, Constraint};
use funcert::rewrite::{
    all_instances, derive, derive_with, BranchStatus, Control, DeriveConfig, Limits, RuleId,
    RuleSet, Step,
};
use funcert::solver::{check_model, extract_witness};
use rand::rngs::StdRng;
use rand::SeedableRng;

const CONTROLS: [Control; 4] = [
    Control::Basic,
    Control::Quasi,
    Control::Km,
    Control::Heuristic { delay_threshold: 2 },
];

fn limits() -> Limits {
    Limits {
        max_steps: 20_000,
        ..Limits::default()
    }
}

/// Every clause met while deriving a sample of random prime clauses.
fn visited_clauses(seed: u64, n: usize) -> Vec<(funcert::lang::LangStore, Vec<Clause>)> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let (store, c) = random_prime_clause(&mut rng);
            let mut seen = Vec::new();
            let mut obs = |s: &Step| seen.push(s.before.clone());
            derive_with(
                &c,
                &store,
                &DeriveConfig::new(Control::Quasi),
                &limits(),
                &mut obs,
            )
            .unwrap();
            (store, seen)
        })
        .collect()
}

#[test]
fn simplification_stops_exactly_at_simplified_clauses() {
    for (store, clauses) in visited_clauses(21, 120) {
        for c in clauses.iter().filter(|c| !c.is_bottom()) {
            let sets: Vec<RuleSet> = all_instances(c, &store, false)
                .unwrap()
                .iter()
                .map(|i| i.rule.set())
                .collect();
            let k = classify(c, &store);
            let simpl = sets.contains(&RuleSet::Simpl);
            let trivial_div = c.iter().any(|k| {
                matches!(k, Constraint::Div(a, b) if a.as_simple().is_some_and(|s| !s.is_var())
                    && b.as_simple().is_some_and(|s| !s.is_var()))
            });
            assert_eq!(simpl, !k.simplified || trivial_div, "{c:?}");
            if !simpl && !sets.contains(&RuleSet::Pre) {
                assert!(k.presolved, "{c:?}");
            }
            if sets.is_empty() {
                assert!(k.solved, "{c:?}");
            }
        }
    }
}

#[test]
fn terminals_are_solved_or_closed() {
    let mut rng = StdRng::seed_from_u64(22);
    for _ in 0..150 {
        let (store, c) = random_prime_clause(&mut rng);
        for control in CONTROLS {
            let r = derive(&c, &store, &DeriveConfig::new(control), &limits()).unwrap();
            for t in &r.terminals {
                match t.status {
                    BranchStatus::Bottom => assert!(t.clause.is_bottom()),
                    BranchStatus::Irreducible => {
                        assert!(t.solved);
                        assert!(classify(&t.clause, &store).solved);
                        let w = extract_witness(&t.clause, &store).unwrap();
                        assert!(check_model(&w, &t.clause, &store));
                        assert!(check_model(&w, &c, &store));
                    }
                    _ => {}
                }
            }
        }
    }
}

#[test]
fn km_control_relates_only_divergence_free_simplified_clauses() {
    let mut rng = StdRng::seed_from_u64(23);
    let div_rules = [RuleId::Div1, RuleId::Div2, RuleId::DivInst, RuleId::Triv2];
    for _ in 0..150 {
        let (store, c) = random_prime_clause(&mut rng);
        let mut failures = Vec::new();
        let mut obs = |s: &Step| {
            let rule = s.instance.rule;
            if matches!(rule, RuleId::Relate1 | RuleId::Relate2) {
                let has_div = s.before.iter().any(|k| matches!(k, Constraint::Div(..)));
                if has_div || !classify(s.before, &store).simplified {
                    failures.push(rule);
                }
            }
            if div_rules.contains(&rule) {
                failures.push(rule);
            }
        };
        derive_with(
            &c,
            &store,
            &DeriveConfig::new(Control::Km),
            &limits(),
            &mut obs,
        )
        .unwrap();
        assert!(failures.is_empty(), "{failures:?}");
    }
}

#[test]
fn controlled_derivatives_stay_admissible() {
    let mut rng = StdRng::seed_from_u64(24);
    for _ in 0..100 {
        let (store, c) = random_prime_clause(&mut rng);
        for control in CONTROLS {
            let bad = funcert::rewrite::check_admissibility_chain(
                &c,
                &store,
                &DeriveConfig::new(control),
                &limits(),
            )
            .unwrap();
            assert!(bad.is_empty(), "{control:?}: {bad:?}");
        }
    }
}

#[test]
fn quasi_control_remembers_each_clause_once() {
    let mut rng = StdRng::seed_from_u64(25);
    for _ in 0..100 {
        let (store, c) = random_prime_clause(&mut rng);
        let mut seen = std::collections::HashSet::new();
        let mut obs = |s: &Step| {
            assert!(
                seen.insert(funcert::clause::canonicalize(s.before)),
                "expanded twice"
            );
        };
        derive_with(
            &c,
            &store,
            &DeriveConfig::new(Control::Quasi),
            &limits(),
            &mut obs,
        )
        .unwrap();
    }
}
