//! Canonical rendering of a clause up to renaming of variables.
//!
//! Variables are coloured by iterated refinement over the constraints they
//! occur in; remaining ties are broken by trying every member of the first
//! non-trivial colour class and keeping the least rendering. The result is
//! exact, and cheap for the small clauses the rewrite engine produces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write;

use super::{Clause, Constraint, PathTerm, SimpleTerm};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Var {
    Fo(u32),
    Path(u32),
}

fn term_str(t: PathTerm, name: &dyn Fn(Var) -> String) -> String {
    let simple = |s: SimpleTerm| match s {
        SimpleTerm::Feat(f) => format!("f{}", f.0),
        SimpleTerm::Var(v) => name(Var::Path(v.0)),
    };
    match t {
        PathTerm::Simple(s) => simple(s),
        PathTerm::Complex(a, b) => format!("{}.{}", simple(a), simple(b)),
    }
}

fn constraint_str(c: &Constraint, name: &dyn Fn(Var) -> String) -> String {
    let fo = |x: super::FoVar| name(Var::Fo(x.0));
    match *c {
        Constraint::Sort(a, x) => format!("S{}({})", a.0, fo(x)),
        Constraint::Sub(x, s, y) => {
            format!(
                "{}<{}>{}",
                fo(x),
                term_str(PathTerm::Simple(s), name),
                fo(y)
            )
        }
        Constraint::Div(a, b) | Constraint::PathEq(a, b) => {
            let mut ops = [term_str(a, name), term_str(b, name)];
            ops.sort();
            let tag = if matches!(c, Constraint::Div(..)) {
                "div"
            } else {
                "eq"
            };
            format!("{tag}({},{})", ops[0], ops[1])
        }
        Constraint::Prefix(a, b) => format!("pre({},{})", term_str(a, name), term_str(b, name)),
        Constraint::Restrict(p, l) => format!("in({},{})", term_str(p, name), l.0),
    }
}

fn vars_of(c: &Constraint) -> Vec<Var> {
    let mut vs: Vec<Var> = c.fo_vars().into_iter().map(|x| Var::Fo(x.0)).collect();
    vs.extend(c.path_vars().into_iter().map(|v| Var::Path(v.0)));
    vs
}

struct Canon<'a> {
    constraints: Vec<&'a Constraint>,
    occurrences: BTreeMap<Var, Vec<usize>>,
}

impl Canon<'_> {
    fn kind(v: Var) -> &'static str {
        match v {
            Var::Fo(_) => "x",
            Var::Path(_) => "p",
        }
    }

    /// Refines a colouring to a stable partition. Colours are dense ranks of
    /// renaming-invariant signatures.
    fn refine(&self, mut colors: BTreeMap<Var, usize>) -> BTreeMap<Var, usize> {
        let mut classes = colors.values().collect::<BTreeSet<_>>().len();
        loop {
            let sigs: BTreeMap<Var, (usize, Vec<String>)> = colors
                .keys()
                .map(|&v| {
                    let mut ctx: Vec<String> = self.occurrences[&v]
                        .iter()
                        .map(|&i| {
                            let name = |u: Var| {
                                if u == v {
                                    "@".to_string()
                                } else {
                                    format!("{}{}", Self::kind(u), colors[&u])
                                }
                            };
                            constraint_str(self.constraints[i], &name)
                        })
                        .collect();
                    ctx.sort();
                    (v, (colors[&v], ctx))
                })
                .collect();
            let ranks: BTreeMap<&(usize, Vec<String>), usize> = sigs
                .values()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .enumerate()
                .map(|(i, s)| (s, i))
                .collect();
            let next: BTreeMap<Var, usize> = sigs.iter().map(|(v, s)| (*v, ranks[s])).collect();
            let n = ranks.len();
            colors = next;
            if n == classes {
                return colors;
            }
            classes = n;
        }
    }

    fn render(&self, colors: &BTreeMap<Var, usize>) -> String {
        let name = |u: Var| format!("{}{}", Self::kind(u), colors[&u]);
        let mut lines: Vec<String> = self
            .constraints
            .iter()
            .map(|c| constraint_str(c, &name))
            .collect();
        lines.sort();
        let mut out = String::new();
        for l in lines {
            let _ = writeln!(out, "{l}");
        }
        out
    }

    fn search(&self, colors: BTreeMap<Var, usize>) -> String {
        let colors = self.refine(colors);
        let mut by_color: BTreeMap<usize, Vec<Var>> = BTreeMap::new();
        for (v, c) in &colors {
            by_color.entry(*c).or_default().push(*v);
        }
        let Some((&cell_color, cell)) = by_color.iter().find(|(_, vs)| vs.len() > 1) else {
            return self.render(&colors);
        };
        let mut best: Option<String> = None;
        for &v in cell {
            // Individualize v: everything at or above its colour moves up one,
            // v keeps the cell's colour.
            let trial: BTreeMap<Var, usize> = colors
                .iter()
                .map(|(u, c)| {
                    let c = if *u != v && *c >= cell_color {
                        c + 1
                    } else {
                        *c
                    };
                    (*u, c)
                })
                .collect();
            let s = self.search(trial);
            if best.as_ref().is_none_or(|b| s < *b) {
                best = Some(s);
            }
        }
        best.expect("non-empty cell")
    }
}

/// Canonical string of a clause: equal for clauses that are identical up to
/// a consistent renaming of first-order and path variables. Bindings and
/// fresh-variable counters do not take part.
pub fn canonicalize(clause: &Clause) -> String {
    if clause.is_bottom() {
        return "⊥\n".to_string();
    }
    let constraints: Vec<&Constraint> = clause.iter().collect();
    let mut occurrences: BTreeMap<Var, Vec<usize>> = BTreeMap::new();
    for (i, c) in constraints.iter().enumerate() {
        for v in vars_of(c) {
            let occ = occurrences.entry(v).or_default();
            if occ.last() != Some(&i) {
                occ.push(i);
            }
        }
    }
    let canon = Canon {
        constraints,
        occurrences,
    };
    let initial = canon
        .occurrences
        .keys()
        .map(|v| (*v, matches!(v, Var::Path(_)) as usize))
        .collect();
    canon.search(initial)
}
