use serde::Serialize;

use crate::clause::{Clause, Constraint, FoVar, PathTerm};

/// The termination measure for simplification steps, compared
/// lexicographically.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ThetaQuadruple {
    /// Unrelated pairs of outgoing terms of the focus variable.
    pub unrelated: usize,
    /// Constraints other than path restrictions.
    pub constraints: usize,
    pub complex_terms: usize,
    /// Variables plus path restrictions.
    pub variables: usize,
}

/// The variable whose outgoing terms `RelD` relates: the tagged variable,
/// or else the source of the terms in a complex divergence.
fn focus(clause: &Clause) -> Option<FoVar> {
    if let Some(x) = clause.tagged_variables().into_iter().next() {
        return Some(x);
    }
    clause.iter().find_map(|c| match *c {
        Constraint::Div(PathTerm::Complex(s, _), PathTerm::Simple(t))
        | Constraint::Div(PathTerm::Simple(t), PathTerm::Complex(s, _)) => clause.co_outgoing(s, t),
        _ => None,
    })
}

pub fn theta(clause: &Clause) -> ThetaQuadruple {
    let unrelated = focus(clause).map_or(0, |x| {
        let out: Vec<_> = clause.outgoing(x).into_iter().collect();
        let mut n = 0;
        for (i, &s) in out.iter().enumerate() {
            for &t in &out[i + 1..] {
                if (s.is_var() || t.is_var()) && !clause.related(s, t) {
                    n += 1;
                }
            }
        }
        n
    });
    let restrictions = clause
        .iter()
        .filter(|c| matches!(c, Constraint::Restrict(..)))
        .count();
    ThetaQuadruple {
        unrelated,
        constraints: clause.len() - restrictions,
        complex_terms: clause
            .iter()
            .flat_map(|c| c.path_terms())
            .filter(|t| t.is_complex())
            .count(),
        variables: clause.fo_vars().len() + clause.path_vars().len() + restrictions,
    }
}
