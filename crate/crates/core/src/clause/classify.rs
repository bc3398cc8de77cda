use std::collections::{BTreeMap, BTreeSet};

use super::{Clause, Constraint, PathTerm, SimpleTerm};
use crate::lang::LangStore;

/// Membership of a clause in the normal forms of the rewrite process.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub struct Classification {
    pub prime: bool,
    pub admissible: bool,
    pub simplified: bool,
    pub presolved: bool,
    pub solved: bool,
}

pub fn classify(clause: &Clause, store: &LangStore) -> Classification {
    if clause.is_bottom() {
        return Classification {
            prime: false,
            admissible: true,
            simplified: true,
            presolved: true,
            solved: true,
        };
    }
    let simplified = is_simplified(clause, store);
    Classification {
        prime: is_prime(clause),
        admissible: admissibility_violations(clause).is_empty(),
        simplified,
        presolved: simplified && presolved_condition(clause),
        solved: simplified && solved_conditions(clause),
    }
}

fn edge_counts(clause: &Clause) -> BTreeMap<SimpleTerm, usize> {
    let mut counts = BTreeMap::new();
    for (_, s, _) in clause.edges() {
        if s.is_var() {
            *counts.entry(s).or_insert(0) += 1;
        }
    }
    counts
}

fn is_prime(clause: &Clause) -> bool {
    !clause.has_complex_terms()
        && edge_counts(clause).values().all(|&n| n <= 1)
        && !clause.iter().any(Constraint::is_relation)
}

/// Names of the violated admissibility conditions (empty when admissible).
pub fn admissibility_violations(clause: &Clause) -> Vec<&'static str> {
    let mut out = Vec::new();
    if clause.is_bottom() {
        return out;
    }
    let complex_relation = clause.iter().any(|c| match *c {
        Constraint::Prefix(a, b) | Constraint::PathEq(a, b) => a.is_complex() || b.is_complex(),
        _ => false,
    });
    if complex_relation {
        out.push("complex term in prefix or path equality");
    }

    let counts = edge_counts(clause);
    if clause
        .path_vars()
        .iter()
        .any(|v| counts.get(&SimpleTerm::Var(*v)).copied().unwrap_or(0) != 1)
    {
        out.push("Ad1");
    }

    let local = clause.iter().all(|c| match *c {
        Constraint::Div(PathTerm::Simple(s), PathTerm::Simple(t))
        | Constraint::Prefix(PathTerm::Simple(s), PathTerm::Simple(t))
        | Constraint::PathEq(PathTerm::Simple(s), PathTerm::Simple(t)) => {
            clause.co_outgoing(s, t).is_some()
        }
        _ => true,
    });
    if !local {
        out.push("Ad2");
    }

    let prefixes: Vec<(PathTerm, PathTerm)> = clause
        .iter()
        .filter_map(|c| match *c {
            Constraint::Prefix(a, b) => Some((a, b)),
            _ => None,
        })
        .collect();
    if !prefixes.is_empty() && clause.iter().any(|c| matches!(c, Constraint::PathEq(..))) {
        out.push("Ad3");
    }

    if clause.tagged_variables().len() > 1 {
        out.push("Ad4");
    }

    let distinct_features = |a: PathTerm, b: PathTerm| match (a, b) {
        (PathTerm::Simple(SimpleTerm::Feat(f)), PathTerm::Simple(SimpleTerm::Feat(g))) => f != g,
        _ => false,
    };
    let ad5 = prefixes.iter().enumerate().all(|(i, (s, _))| {
        prefixes[i + 1..]
            .iter()
            .all(|(t, _)| s == t || distinct_features(*s, *t))
    });
    if !ad5 {
        out.push("Ad5");
    }

    let trivial = clause.iter().any(|c| match *c {
        Constraint::Prefix(a, b) => a == b || matches!(b, PathTerm::Simple(SimpleTerm::Feat(_))),
        Constraint::PathEq(
            PathTerm::Simple(SimpleTerm::Feat(_)),
            PathTerm::Simple(SimpleTerm::Feat(_)),
        ) => true,
        _ => false,
    });
    if trivial {
        out.push("Ad6");
    }
    out
}

fn is_simplified(clause: &Clause, store: &LangStore) -> bool {
    let mut sorts = BTreeMap::new();
    let mut restricted = BTreeSet::new();
    let mut feature_edges = BTreeMap::new();
    for c in clause.iter() {
        match *c {
            Constraint::Sort(a, x) => {
                if *sorts.entry(x).or_insert(a) != a {
                    return false; // Si1
                }
            }
            Constraint::Restrict(p, l) => {
                if !restricted.insert(p) {
                    return false; // Si2
                }
                let props = store.props(l);
                if props.is_empty {
                    return false; // Si3
                }
                if let PathTerm::Simple(SimpleTerm::Feat(f)) = p {
                    if !props.contains(f) {
                        return false; // Si4
                    }
                }
            }
            Constraint::Sub(x, SimpleTerm::Feat(f), y) => {
                if *feature_edges.entry((x, f)).or_insert(y) != y {
                    return false; // Si5
                }
            }
            Constraint::PathEq(..) | Constraint::Prefix(..) => return false, // Si6
            _ => {}
        }
    }
    !clause.has_complex_terms() // Si7
}

/// Ps1, in both directions.
fn presolved_condition(clause: &Clause) -> bool {
    let divs_ok = clause.iter().all(|c| match *c {
        Constraint::Div(PathTerm::Simple(s), PathTerm::Simple(t)) => {
            s != t && (s.is_var() || t.is_var()) && clause.co_outgoing(s, t).is_some()
        }
        Constraint::Div(..) => false,
        _ => true,
    });
    if !divs_ok {
        return false;
    }
    for x in clause.fo_vars() {
        let out: Vec<SimpleTerm> = clause.outgoing(x).into_iter().collect();
        for (i, &s) in out.iter().enumerate() {
            for &t in &out[i + 1..] {
                if (s.is_var() || t.is_var())
                    && !clause.contains(&Constraint::div(PathTerm::Simple(s), PathTerm::Simple(t)))
                {
                    return false;
                }
            }
        }
    }
    true
}

/// So1 and So2.
fn solved_conditions(clause: &Clause) -> bool {
    if clause.iter().any(|c| matches!(c, Constraint::Div(..))) {
        return false;
    }
    clause
        .edges()
        .all(|(x, s, _)| !s.is_var() || clause.outgoing(x).len() == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clause::{FoVar, PathVar, SortName};
    use crate::lang::Alphabet;

    #[test]
    fn inconsistent_presolved_clause_is_presolved_not_solved() {
        let s = LangStore::new(Alphabet::new(["f"]));
        let (x, y, z) = (FoVar(0), FoVar(1), FoVar(2));
        let (mu, nu) = (PathVar(0), PathVar(1));
        let c = Clause::from_constraints([
            Constraint::sub(x, mu, y),
            Constraint::sub(x, nu, z),
            Constraint::div(PathTerm::var(mu), PathTerm::var(nu)),
            Constraint::restrict(PathTerm::var(mu), s.compile_str("f+").unwrap()),
            Constraint::restrict(PathTerm::var(nu), s.compile_str("(f f)+").unwrap()),
        ]);
        let k = classify(&c, &s);
        assert!(k.simplified && k.presolved && !k.solved && !k.prime && k.admissible);
    }

    #[test]
    fn feature_edge_with_sort_is_solved() {
        let s = LangStore::new(Alphabet::new(["f"]));
        let f = s.alphabet().feature("f").unwrap();
        let c = Clause::from_constraints([
            Constraint::sub(FoVar(0), f, FoVar(1)),
            Constraint::Sort(SortName(0), FoVar(0)),
        ]);
        let k = classify(&c, &s);
        assert!(k.solved && k.simplified && k.prime && k.admissible);
    }

    #[test]
    fn bottom_is_solved() {
        let s = LangStore::new(Alphabet::new(["f"]));
        assert!(classify(&Clause::bottom(), &s).solved);
    }

    #[test]
    fn uncontrolled_relate_counterexample_violates_ad5() {
        let (x, y, z, z2) = (FoVar(0), FoVar(1), FoVar(2), FoVar(3));
        let (mu, nu, nu2) = (PathVar(0), PathVar(1), PathVar(2));
        let c = Clause::from_constraints([
            Constraint::prefix(PathTerm::var(mu), PathTerm::var(nu)),
            Constraint::prefix(PathTerm::var(nu), PathTerm::var(nu2)),
            Constraint::sub(x, mu, y),
            Constraint::sub(x, nu, z),
            Constraint::sub(x, nu2, z2),
        ]);
        assert!(admissibility_violations(&c).contains(&"Ad5"));
    }

    #[test]
    fn trivial_constraints_violate_ad6() {
        let s = LangStore::new(Alphabet::new(["f", "g"]));
        let f = s.alphabet().feature("f").unwrap();
        let g = s.alphabet().feature("g").unwrap();
        let x = FoVar(0);
        let c = Clause::from_constraints([
            Constraint::path_eq(PathTerm::feat(f), PathTerm::feat(g)),
            Constraint::sub(x, f, FoVar(1)),
            Constraint::sub(x, g, FoVar(2)),
        ]);
        assert_eq!(admissibility_violations(&c), vec!["Ad6"]);
    }
}
