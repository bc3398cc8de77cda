use super::{Clause, Constraint, FoVar, PathTerm, PathVar, SimpleTerm, SortName};
use crate::lang::{Feature, LangId};

/// One step of a path in an input constraint `x p₁ … pₙ y`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum PathItem {
    Feature(Feature),
    /// Functional uncertainty: some word of the language.
    Lang(LangId),
    /// A named path variable (extended syntax).
    Var(PathVar),
}

/// Constraints in Kaplan/Maxwell-style input syntax.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KmConstraint {
    Sort(SortName, FoVar),
    Agree(FoVar, FoVar),
    Path(FoVar, Vec<PathItem>, FoVar),
}

/// Translates input constraints into a clause. Each regular item becomes a
/// fresh path variable with one subterm agreement and one restriction;
/// multi-step paths are chained through fresh first-order variables;
/// agreements become bindings.
pub fn translate_km(km: &[KmConstraint]) -> Clause {
    extend_km(Clause::new(), km)
}

/// Like [`translate_km`], adding to an existing clause whose variables are
/// kept clear of the fresh ones.
pub fn extend_km(mut clause: Clause, km: &[KmConstraint]) -> Clause {
    let (mut max_fo, mut max_path) = (0, 0);
    for c in km {
        match c {
            KmConstraint::Sort(_, x) => max_fo = max_fo.max(x.0 + 1),
            KmConstraint::Agree(x, y) => max_fo = max_fo.max(x.0.max(y.0) + 1),
            KmConstraint::Path(x, items, y) => {
                max_fo = max_fo.max(x.0.max(y.0) + 1);
                for item in items {
                    if let PathItem::Var(v) = item {
                        max_path = max_path.max(v.0 + 1);
                    }
                }
            }
        }
    }
    clause.reserve(max_fo, max_path);

    let mut agreements = Vec::new();
    for c in km {
        match c {
            KmConstraint::Sort(a, x) => {
                clause.insert(Constraint::Sort(*a, *x));
            }
            KmConstraint::Agree(x, y) => agreements.push((*x, *y)),
            KmConstraint::Path(x, items, y) => {
                if items.is_empty() {
                    agreements.push((*x, *y));
                    continue;
                }
                let mut from = *x;
                for (i, item) in items.iter().enumerate() {
                    let to = if i + 1 == items.len() {
                        *y
                    } else {
                        clause.fresh_fo()
                    };
                    let term = match *item {
                        PathItem::Feature(f) => SimpleTerm::Feat(f),
                        PathItem::Var(v) => SimpleTerm::Var(v),
                        PathItem::Lang(l) => {
                            let v = clause.fresh_path();
                            clause.insert(Constraint::restrict(PathTerm::var(v), l));
                            SimpleTerm::Var(v)
                        }
                    };
                    clause.insert(Constraint::Sub(from, term, to));
                    from = to;
                }
            }
        }
    }
    for (x, y) in agreements {
        let (x, y) = (clause.resolve(x), clause.resolve(y));
        if x != y {
            clause = clause.subst_fo_var(x, y);
        }
    }
    clause
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clause::classify;
    use crate::lang::{Alphabet, LangStore};

    #[test]
    fn topicalization_translation() {
        let s = LangStore::new(Alphabet::new(["comp", "obj", "topic"]));
        let topic = s.alphabet().feature("topic").unwrap();
        let l = s.compile_str("comp* . obj").unwrap();
        let (sv, x) = (FoVar(0), FoVar(1));
        let c = translate_km(&[
            KmConstraint::Path(sv, vec![PathItem::Feature(topic)], x),
            KmConstraint::Path(sv, vec![PathItem::Lang(l)], x),
        ]);
        let mu = PathVar(0);
        assert_eq!(
            c,
            Clause::from_constraints([
                Constraint::sub(sv, topic, x),
                Constraint::sub(sv, mu, x),
                Constraint::restrict(PathTerm::var(mu), l),
            ])
        );
        let k = classify(&c, &s);
        assert!(k.prime && k.admissible && k.simplified && !k.presolved && !k.solved);
    }

    #[test]
    fn sort_and_chain_translation() {
        let s = LangStore::new(Alphabet::new(["f", "g"]));
        let f = s.alphabet().feature("f").unwrap();
        let g = s.alphabet().feature("g").unwrap();
        let (x, y) = (FoVar(0), FoVar(1));
        let c = translate_km(&[KmConstraint::Sort(SortName(0), x)]);
        assert_eq!(
            c,
            Clause::from_constraints([Constraint::Sort(SortName(0), x)])
        );

        let c = translate_km(&[KmConstraint::Path(
            x,
            vec![PathItem::Feature(f), PathItem::Feature(g)],
            y,
        )]);
        let z = FoVar(2);
        assert_eq!(
            c.constraints(),
            Clause::from_constraints([Constraint::sub(x, f, z), Constraint::sub(z, g, y)])
                .constraints()
        );
    }

    #[test]
    fn agreement_becomes_binding() {
        let s = LangStore::new(Alphabet::new(["f"]));
        let f = s.alphabet().feature("f").unwrap();
        let (x, y, z) = (FoVar(0), FoVar(1), FoVar(2));
        let c = translate_km(&[
            KmConstraint::Path(x, vec![PathItem::Feature(f)], y),
            KmConstraint::Agree(y, z),
        ]);
        assert!(c.contains(&Constraint::sub(x, f, z)));
        assert_eq!(c.resolve(y), z);
    }
}
