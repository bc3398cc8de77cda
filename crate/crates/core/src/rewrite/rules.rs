//! Instance enumeration and application for every rule.

use std::collections::{BTreeMap, BTreeSet};

use super::{
    Choice, Continuation, Control, Redex, RelChoice, RewriteError, RuleId, RuleInstance, RuleSet,
};
use crate::clause::{Clause, Constraint, FoVar, PathTerm, PathVar, SimpleTerm};
use crate::lang::{Feature, LangId, LangStore};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct DeriveConfig {
    pub control: Control,
    /// Leaves out the single-feature continuations of `Inst` and `Solve`.
    pub strict_paper: bool,
}

impl DeriveConfig {
    pub fn new(control: Control) -> Self {
        DeriveConfig {
            control,
            strict_paper: false,
        }
    }
}

/// One branch produced by [`apply`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Successor {
    pub clause: Clause,
    pub rule: RuleId,
    pub choice: Choice,
    /// `Pre` split an edge at a node that lies on a cycle through its source.
    pub cycle: bool,
}

fn one(rule: RuleId, c: Constraint) -> RuleInstance {
    RuleInstance {
        rule,
        redex: Redex::One(c),
        choices: vec![Choice::Deterministic],
    }
}

fn two(rule: RuleId, a: Constraint, b: Constraint) -> RuleInstance {
    RuleInstance {
        rule,
        redex: Redex::Two(a, b),
        choices: vec![Choice::Deterministic],
    }
}

fn edge_of(c: &Clause, v: PathVar) -> Option<(FoVar, FoVar)> {
    c.edges_with(SimpleTerm::Var(v)).into_iter().next()
}

fn in_complex_term(c: &Clause, v: PathVar) -> bool {
    c.iter().any(|k| {
        k.path_terms()
            .into_iter()
            .any(|t| t.is_complex() && t.mentions(v))
    })
}

fn simpl_instances(
    c: &Clause,
    store: &LangStore,
    out: &mut Vec<RuleInstance>,
) -> Result<(), RewriteError> {
    let mut langs: BTreeMap<PathTerm, Vec<LangId>> = BTreeMap::new();
    let mut sorts: BTreeMap<FoVar, Vec<Constraint>> = BTreeMap::new();
    let mut feature_edges: BTreeMap<(FoVar, Feature), Vec<Constraint>> = BTreeMap::new();
    for &k in c.iter() {
        match k {
            Constraint::Sort(_, x) => sorts.entry(x).or_default().push(k),
            Constraint::Sub(x, SimpleTerm::Feat(f), _) => {
                feature_edges.entry((x, f)).or_default().push(k)
            }
            Constraint::Sub(..) => {}
            Constraint::Restrict(p, l) => {
                langs.entry(p).or_default().push(l);
                let props = store.props(l);
                if props.is_empty {
                    out.push(one(RuleId::Empty, k));
                    continue;
                }
                match p {
                    PathTerm::Simple(SimpleTerm::Feat(f)) if !props.contains(f) => {
                        out.push(one(RuleId::FClash, k))
                    }
                    PathTerm::Complex(SimpleTerm::Feat(_), _) => out.push(one(RuleId::DecFeat, k)),
                    PathTerm::Complex(SimpleTerm::Var(_), _) if props.all_words_len1 => {
                        out.push(one(RuleId::DecClash, k))
                    }
                    PathTerm::Complex(SimpleTerm::Var(_), _) => out.push(RuleInstance {
                        rule: RuleId::DecDFun,
                        redex: Redex::One(k),
                        choices: store.dfun(l)?.iter().map(|d| Choice::Decomp(*d)).collect(),
                    }),
                    _ => {}
                }
            }
            Constraint::Div(a, b) => div_instances(c, k, a, b, out),
            Constraint::Prefix(PathTerm::Simple(s), PathTerm::Simple(SimpleTerm::Var(mu)))
                if s != SimpleTerm::Var(mu) && !in_complex_term(c, mu) =>
            {
                for (x, y) in c.edges_with(s) {
                    for (x2, z) in c.edges_with(SimpleTerm::Var(mu)) {
                        if x == x2 {
                            out.push(RuleInstance {
                                rule: RuleId::Pre,
                                redex: Redex::Pre {
                                    prefix: k,
                                    s,
                                    mu,
                                    x,
                                    y,
                                    z,
                                },
                                choices: vec![Choice::Deterministic],
                            });
                        }
                    }
                }
            }
            Constraint::PathEq(PathTerm::Simple(a), PathTerm::Simple(b)) => {
                // the larger variable is eliminated
                let (mu, s) = match (a, b) {
                    (_, SimpleTerm::Var(v)) => (v, a),
                    (SimpleTerm::Var(v), _) => (v, b),
                    _ => continue,
                };
                for (x, y) in c.edges_with(s) {
                    for (x2, z) in c.edges_with(SimpleTerm::Var(mu)) {
                        if x == x2 {
                            out.push(RuleInstance {
                                rule: RuleId::Eq2,
                                redex: Redex::Eq2 {
                                    eq: k,
                                    mu,
                                    s,
                                    x,
                                    y,
                                    z,
                                },
                                choices: vec![Choice::Deterministic],
                            });
                        }
                    }
                }
            }
            _ => {}
        }
    }
    for (p, ls) in &langs {
        for (i, &l) in ls.iter().enumerate() {
            for &l2 in &ls[i + 1..] {
                out.push(two(
                    RuleId::Join,
                    Constraint::Restrict(*p, l),
                    Constraint::Restrict(*p, l2),
                ));
            }
        }
    }
    for group in sorts.values().chain(feature_edges.values()) {
        for (i, &a) in group.iter().enumerate() {
            for &b in &group[i + 1..] {
                let rule = if matches!(a, Constraint::Sort(..)) {
                    RuleId::SClash
                } else {
                    RuleId::Eq1
                };
                out.push(two(rule, a, b));
            }
        }
    }
    Ok(())
}

fn div_instances(c: &Clause, k: Constraint, a: PathTerm, b: PathTerm, out: &mut Vec<RuleInstance>) {
    use PathTerm::{Complex, Simple};
    if a == b {
        out.push(one(RuleId::DClash1, k));
        return;
    }
    match (a, b) {
        (Complex(s, _), Simple(t)) | (Simple(t), Complex(s, _)) => {
            if s == t {
                out.push(one(RuleId::DClash2, k));
            } else if let SimpleTerm::Feat(_) = t {
                out.push(one(RuleId::DivInst, k));
            } else {
                let plain = Constraint::div(s, t);
                if c.contains(&plain) {
                    out.push(two(RuleId::Div2, k, plain));
                } else if !c.related(s, t) {
                    out.push(RuleInstance {
                        rule: RuleId::RelD,
                        redex: Redex::One(k),
                        choices: vec![
                            Choice::Relation(RelChoice::Diverge),
                            Choice::Relation(RelChoice::Below),
                        ],
                    });
                }
            }
        }
        (Complex(s, _), Complex(t, _)) => {
            if s == t {
                out.push(one(RuleId::Div1, k));
            } else if let (SimpleTerm::Feat(_), SimpleTerm::Feat(_)) = (s, t) {
                out.push(one(RuleId::Triv2, k));
            }
        }
        (Simple(SimpleTerm::Feat(_)), Simple(SimpleTerm::Feat(_))) => {
            out.push(one(RuleId::Triv1, k))
        }
        _ => {}
    }
}

fn pre_instances(c: &Clause, out: &mut Vec<RuleInstance>) {
    for x in c.fo_vars() {
        let terms: Vec<SimpleTerm> = c.outgoing(x).into_iter().collect();
        for (i, &s) in terms.iter().enumerate() {
            for &t in &terms[i + 1..] {
                if !t.is_var() || c.related(s, t) {
                    continue;
                }
                let (rule, choices) = if s.is_var() {
                    (
                        RuleId::Relate1,
                        vec![
                            RelChoice::Equal,
                            RelChoice::Above,
                            RelChoice::Below,
                            RelChoice::Diverge,
                        ],
                    )
                } else {
                    (
                        RuleId::Relate2,
                        vec![RelChoice::Equal, RelChoice::Below, RelChoice::Diverge],
                    )
                };
                out.push(RuleInstance {
                    rule,
                    redex: Redex::Relate { x, s, t },
                    choices: choices.into_iter().map(Choice::Relation).collect(),
                });
            }
        }
    }
}

fn continuations(
    store: &LangStore,
    l: LangId,
    f: Feature,
    strict: bool,
    prune: bool,
) -> Result<Vec<Continuation>, RewriteError> {
    let mut out = Vec::new();
    if !prune || !store.is_empty_lang(store.quotient(f, l)?) {
        out.push(Continuation::Longer);
    }
    if !strict && (!prune || store.props(l).contains(f)) {
        out.push(Continuation::Exact);
    }
    Ok(out)
}

fn solve_instances(
    c: &Clause,
    store: &LangStore,
    strict: bool,
    out: &mut Vec<RuleInstance>,
) -> Result<(), RewriteError> {
    for &k in c.iter() {
        match k {
            Constraint::Div(
                PathTerm::Simple(SimpleTerm::Feat(f)),
                PathTerm::Simple(SimpleTerm::Var(mu)),
            ) => {
                let l = c.restriction_of(store, mu)?;
                let mut choices = Vec::new();
                for g in store.first_features(l) {
                    if g == f {
                        continue;
                    }
                    for how in continuations(store, l, g, strict, true)? {
                        choices.push(Choice::First { g, how });
                    }
                }
                out.push(RuleInstance {
                    rule: RuleId::Inst,
                    redex: Redex::One(k),
                    choices,
                });
            }
            Constraint::Div(
                PathTerm::Simple(SimpleTerm::Var(mu)),
                PathTerm::Simple(SimpleTerm::Var(nu)),
            ) => {
                let (lmu, lnu) = (c.restriction_of(store, mu)?, c.restriction_of(store, nu)?);
                let mut choices = Vec::new();
                for f in store.first_features(lmu) {
                    for g in store.first_features(lnu) {
                        if f == g {
                            continue;
                        }
                        for m in continuations(store, lmu, f, strict, true)? {
                            for n in continuations(store, lnu, g, strict, true)? {
                                choices.push(Choice::Pair {
                                    common_prefix: false,
                                    f,
                                    g,
                                    mu: m,
                                    nu: n,
                                });
                            }
                        }
                    }
                }
                if c.co_outgoing(SimpleTerm::Var(mu), SimpleTerm::Var(nu))
                    .is_some()
                {
                    for f in store.inner_features(lmu) {
                        for g in store.inner_features(lnu) {
                            if f == g {
                                continue;
                            }
                            for m in continuations(store, lmu, f, strict, false)? {
                                for n in continuations(store, lnu, g, strict, false)? {
                                    choices.push(Choice::Pair {
                                        common_prefix: true,
                                        f,
                                        g,
                                        mu: m,
                                        nu: n,
                                    });
                                }
                            }
                        }
                    }
                }
                out.push(RuleInstance {
                    rule: RuleId::Solv1,
                    redex: Redex::Solve {
                        div: k,
                        mu,
                        nu,
                        lmu,
                        lnu,
                    },
                    choices,
                });
            }
            Constraint::Prefix(
                PathTerm::Simple(SimpleTerm::Feat(f)),
                PathTerm::Simple(SimpleTerm::Var(mu)),
            ) => {
                if let Some((x, _)) = edge_of(c, mu) {
                    if c.edges_with(SimpleTerm::Feat(f))
                        .iter()
                        .all(|(x2, _)| *x2 != x)
                    {
                        out.push(RuleInstance {
                            rule: RuleId::Intro,
                            redex: Redex::Intro {
                                prefix: k,
                                f,
                                mu,
                                x,
                            },
                            choices: vec![Choice::Deterministic],
                        });
                    }
                }
            }
            _ => {}
        }
    }
    Ok(())
}

/// Every instance of every rule, sorted, without regard to a control.
pub fn all_instances(
    c: &Clause,
    store: &LangStore,
    strict_paper: bool,
) -> Result<Vec<RuleInstance>, RewriteError> {
    let mut out = Vec::new();
    if c.is_bottom() {
        return Ok(out);
    }
    simpl_instances(c, store, &mut out)?;
    if !out.iter().any(|i| i.rule == RuleId::RelD) {
        pre_instances(c, &mut out);
    }
    solve_instances(c, store, strict_paper, &mut out)?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// Position of an instance in the order imposed by a control; lower fires
/// first.
pub(super) fn rank(inst: &RuleInstance, control: Control) -> u8 {
    let set = inst.rule.set();
    if set == RuleSet::Simpl {
        return inst.rule.simpl_level();
    }
    let later = match (control, set) {
        (Control::Basic, _) => 0,
        (Control::Quasi, RuleSet::Pre) | (Control::Km, RuleSet::Solve) => 0,
        (Control::Quasi, _) | (Control::Km, _) => 1,
        (Control::Heuristic { .. }, RuleSet::Pre) => 1,
        (Control::Heuristic { .. }, _) if inst.rule == RuleId::Intro => 0,
        (Control::Heuristic { delay_threshold }, _) => {
            if inst.parameterizations() <= delay_threshold {
                0
            } else {
                2
            }
        }
    };
    10 + later
}

/// The instances of the least-ranked applicable rules under the control.
pub fn applicable(
    c: &Clause,
    store: &LangStore,
    config: &DeriveConfig,
) -> Result<Vec<RuleInstance>, RewriteError> {
    let all = all_instances(c, store, config.strict_paper)?;
    let Some(best) = all.iter().map(|i| rank(i, config.control)).min() else {
        return Ok(all);
    };
    Ok(all
        .into_iter()
        .filter(|i| rank(i, config.control) == best)
        .collect())
}

fn reaches(c: &Clause, from: FoVar, to: FoVar) -> bool {
    let mut seen = BTreeSet::from([from]);
    let mut stack = vec![from];
    while let Some(x) = stack.pop() {
        if x == to {
            return true;
        }
        for (a, _, b) in c.edges() {
            if a == x && seen.insert(b) {
                stack.push(b);
            }
        }
    }
    false
}

/// Adds `x⟨f⟩y'` for a fresh `y'` unless `x` already has an `f`-edge.
fn intro_edge(c: &mut Clause, x: FoVar, f: Feature) {
    if c.edges_with(SimpleTerm::Feat(f))
        .iter()
        .all(|(x2, _)| *x2 != x)
    {
        let y = c.fresh_fo();
        c.insert(Constraint::sub(x, f, y));
    }
}

fn relation(rel: RelChoice, s: SimpleTerm, t: SimpleTerm) -> Constraint {
    match rel {
        RelChoice::Equal => Constraint::path_eq(s, t),
        RelChoice::Above => Constraint::prefix(t, s),
        RelChoice::Below => Constraint::prefix(s, t),
        RelChoice::Diverge => Constraint::div(s, t),
    }
}

fn without(c: &Clause, ks: &[Constraint]) -> Clause {
    let mut out = c.clone();
    for k in ks {
        out.remove(k);
    }
    out
}

fn invariant(msg: &str) -> RewriteError {
    crate::clause::ClauseError::InvariantViolation(msg.to_string()).into()
}

/// The branches of an instance, one per choice.
pub fn apply(
    c: &Clause,
    store: &LangStore,
    inst: &RuleInstance,
) -> Result<Vec<Successor>, RewriteError> {
    let mut out = Vec::with_capacity(inst.choices.len());
    for &choice in &inst.choices {
        let mut cycle = false;
        let clause = apply_choice(c, store, inst, choice, &mut cycle)?;
        out.push(Successor {
            clause,
            rule: choice.branch_rule(inst.rule),
            choice,
            cycle,
        });
    }
    Ok(out)
}

fn apply_choice(
    c: &Clause,
    store: &LangStore,
    inst: &RuleInstance,
    choice: Choice,
    cycle: &mut bool,
) -> Result<Clause, RewriteError> {
    use RuleId::*;
    let bad = || invariant(&format!("malformed {} instance", inst.rule));
    Ok(match (inst.rule, inst.redex) {
        (Empty | FClash | SClash | DClash1 | DClash2 | DecClash, _) => c.to_bottom(),
        (Join, Redex::Two(a @ Constraint::Restrict(p, l), b @ Constraint::Restrict(_, l2))) => {
            let mut n = without(c, &[a, b]);
            n.insert(Constraint::Restrict(p, store.intersect(l, l2)?));
            n
        }
        (
            Div1,
            Redex::One(k @ Constraint::Div(PathTerm::Complex(_, m), PathTerm::Complex(_, n))),
        ) => {
            let mut out = without(c, &[k]);
            out.insert(Constraint::div(m, n));
            out
        }
        (Div2, Redex::Two(k, _)) | (Triv1 | Triv2, Redex::One(k)) => without(c, &[k]),
        (DivInst | RelD, Redex::One(k @ Constraint::Div(a, b))) => {
            let (s, t) = match (a, b) {
                (PathTerm::Complex(s, _), PathTerm::Simple(t))
                | (PathTerm::Simple(t), PathTerm::Complex(s, _)) => (s, t),
                _ => return Err(bad()),
            };
            match choice {
                Choice::Relation(rel) => {
                    let mut out = c.clone();
                    out.insert(relation(rel, s, t));
                    out
                }
                _ => {
                    let mut out = without(c, &[k]);
                    out.insert(Constraint::div(s, t));
                    out
                }
            }
        }
        (Eq1, Redex::Two(Constraint::Sub(_, _, y), Constraint::Sub(_, _, z))) => {
            c.subst_fo_var(y.max(z), y.min(z))
        }
        (Eq2, Redex::Eq2 { eq, mu, s, x, y, z }) => {
            let out = without(c, &[eq, Constraint::Sub(x, SimpleTerm::Var(mu), z)]);
            let out = out.subst_path_var(mu, PathTerm::Simple(s))?;
            if z == y {
                out
            } else {
                out.subst_fo_var(z, y)
            }
        }
        (
            Pre,
            Redex::Pre {
                prefix,
                s,
                mu,
                x,
                y,
                z,
            },
        ) => {
            *cycle = reaches(c, y, x) || reaches(c, z, x);
            let out = without(c, &[prefix, Constraint::Sub(x, SimpleTerm::Var(mu), z)]);
            let mut out = out.subst_path_var(mu, PathTerm::Complex(s, SimpleTerm::Var(mu)))?;
            out.insert(Constraint::Sub(y, SimpleTerm::Var(mu), z));
            out
        }
        (
            DecFeat,
            Redex::One(k @ Constraint::Restrict(PathTerm::Complex(SimpleTerm::Feat(f), t), l)),
        ) => {
            let mut out = without(c, &[k]);
            out.insert(Constraint::Restrict(
                PathTerm::Simple(t),
                store.quotient(f, l)?,
            ));
            out
        }
        (DecDFun, Redex::One(k @ Constraint::Restrict(PathTerm::Complex(m, t), _))) => {
            let Choice::Decomp(d) = choice else {
                return Err(bad());
            };
            let mut out = without(c, &[k]);
            out.insert(Constraint::Restrict(PathTerm::Simple(m), d.prefix));
            out.insert(Constraint::Restrict(PathTerm::Simple(t), d.suffix));
            out
        }
        (Relate1 | Relate2, Redex::Relate { s, t, .. }) => {
            let Choice::Relation(rel) = choice else {
                return Err(bad());
            };
            let mut out = c.clone();
            out.insert(relation(rel, s, t));
            out
        }
        (Intro, Redex::Intro { f, x, .. }) => {
            let mut out = c.clone();
            intro_edge(&mut out, x, f);
            out
        }
        (
            Inst,
            Redex::One(
                k @ Constraint::Div(
                    PathTerm::Simple(SimpleTerm::Feat(f)),
                    PathTerm::Simple(SimpleTerm::Var(mu)),
                ),
            ),
        ) => {
            let Choice::First { g, how } = choice else {
                return Err(bad());
            };
            let (x, _) = edge_of(c, mu).ok_or_else(bad)?;
            let mut out = without(c, &[k]);
            continue_with(&mut out, x, mu, g, how)?;
            out.insert(Constraint::div(SimpleTerm::Feat(g), SimpleTerm::Feat(f)));
            out
        }
        (Solv1, Redex::Solve { div, mu, nu, .. }) => {
            let Choice::Pair {
                common_prefix,
                f,
                g,
                mu: m,
                nu: n,
            } = choice
            else {
                return Err(bad());
            };
            let (x, y) = edge_of(c, mu).ok_or_else(bad)?;
            let (x2, z) = edge_of(c, nu).ok_or_else(bad)?;
            let mut out = without(c, &[div]);
            let at = if common_prefix {
                if x != x2 {
                    return Err(bad());
                }
                out.remove(&Constraint::Sub(x, SimpleTerm::Var(mu), y));
                out.remove(&Constraint::Sub(x, SimpleTerm::Var(nu), z));
                let delta = out.fresh_path();
                let u = out.fresh_fo();
                out = out.subst_path_var(
                    mu,
                    PathTerm::Complex(SimpleTerm::Var(delta), SimpleTerm::Var(mu)),
                )?;
                out = out.subst_path_var(
                    nu,
                    PathTerm::Complex(SimpleTerm::Var(delta), SimpleTerm::Var(nu)),
                )?;
                out.insert(Constraint::sub(x, delta, u));
                out.insert(Constraint::sub(u, mu, y));
                out.insert(Constraint::sub(u, nu, z));
                (u, u)
            } else {
                (x, x2)
            };
            continue_with(&mut out, at.0, mu, f, m)?;
            continue_with(&mut out, at.1, nu, g, n)?;
            out.insert(Constraint::div(SimpleTerm::Feat(f), SimpleTerm::Feat(g)));
            out
        }
        _ => return Err(bad()),
    })
}

/// Records that `mu`, leaving `x`, starts with `f`: either `f ≺̇ mu` together
/// with an `f`-edge at `x`, or `mu = f`.
fn continue_with(
    c: &mut Clause,
    x: FoVar,
    mu: PathVar,
    f: Feature,
    how: Continuation,
) -> Result<(), RewriteError> {
    match how {
        Continuation::Longer => {
            c.insert(Constraint::prefix(SimpleTerm::Feat(f), SimpleTerm::Var(mu)));
            intro_edge(c, x, f);
        }
        Continuation::Exact => *c = c.subst_path_var(mu, PathTerm::feat(f))?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clause::{classify, SortName};
    use crate::lang::Alphabet;

    fn store() -> (LangStore, Feature, Feature) {
        let s = LangStore::new(Alphabet::new(["f", "g"]));
        let f = s.alphabet().feature("f").unwrap();
        let g = s.alphabet().feature("g").unwrap();
        (s, f, g)
    }

    fn only(c: &Clause, s: &LangStore, rule: RuleId) -> RuleInstance {
        let all = all_instances(c, s, false).unwrap();
        let mut hits: Vec<_> = all.into_iter().filter(|i| i.rule == rule).collect();
        assert_eq!(hits.len(), 1, "{rule} instances");
        hits.pop().unwrap()
    }

    #[test]
    fn join_intersects() {
        let (s, _, _) = store();
        let mu = PathVar(0);
        let a = s.compile_str("f+").unwrap();
        let b = s.compile_str("(f f)+").unwrap();
        let c = Clause::from_constraints([
            Constraint::restrict(PathTerm::var(mu), a),
            Constraint::restrict(PathTerm::var(mu), b),
        ]);
        let out = apply(&c, &s, &only(&c, &s, RuleId::Join)).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(
            out[0].clause.constraints(),
            Clause::from_constraints([Constraint::restrict(PathTerm::var(mu), b)]).constraints()
        );
    }

    #[test]
    fn eq1_merges_targets() {
        let (s, f, _) = store();
        let (x, y, z) = (FoVar(0), FoVar(1), FoVar(2));
        let b = SortName(1);
        let c = Clause::from_constraints([
            Constraint::sub(x, f, y),
            Constraint::sub(x, f, z),
            Constraint::Sort(b, z),
        ]);
        let out = apply(&c, &s, &only(&c, &s, RuleId::Eq1)).unwrap();
        let n = &out[0].clause;
        assert_eq!(
            n.constraints(),
            Clause::from_constraints([Constraint::sub(x, f, y), Constraint::Sort(b, y)])
                .constraints()
        );
        assert_eq!(n.resolve(z), y);
    }

    #[test]
    fn reld_yields_two_branches() {
        let (s, _, _) = store();
        let (x, y, z, w) = (FoVar(0), FoVar(1), FoVar(2), FoVar(3));
        let (mu, mu2, nu) = (PathVar(0), PathVar(1), PathVar(2));
        let complex = Constraint::div(
            PathTerm::Complex(SimpleTerm::Var(mu), SimpleTerm::Var(mu2)),
            PathTerm::var(nu),
        );
        let c = Clause::from_constraints([
            complex,
            Constraint::sub(x, mu, y),
            Constraint::sub(y, mu2, w),
            Constraint::sub(x, nu, z),
        ]);
        let out = apply(&c, &s, &only(&c, &s, RuleId::RelD)).unwrap();
        assert_eq!(out.len(), 2);
        assert!(out[0]
            .clause
            .contains(&Constraint::div(PathTerm::var(mu), PathTerm::var(nu))));
        assert!(out[1]
            .clause
            .contains(&Constraint::prefix(PathTerm::var(mu), PathTerm::var(nu))));
        assert!(out.iter().all(|o| o.clause.contains(&complex)));
    }

    #[test]
    fn pre_splits_the_edge() {
        let (s, f, _) = store();
        let (x, y, z) = (FoVar(0), FoVar(1), FoVar(2));
        let mu = PathVar(0);
        let l = s.compile_str("f+").unwrap();
        let c = Clause::from_constraints([
            Constraint::prefix(PathTerm::feat(f), PathTerm::var(mu)),
            Constraint::sub(x, f, y),
            Constraint::sub(x, mu, z),
            Constraint::restrict(PathTerm::var(mu), l),
        ]);
        let out = apply(&c, &s, &only(&c, &s, RuleId::Pre)).unwrap();
        let n = &out[0].clause;
        assert!(!out[0].cycle);
        assert!(n.contains(&Constraint::sub(y, mu, z)));
        assert!(n.contains(&Constraint::restrict(
            PathTerm::Complex(SimpleTerm::Feat(f), SimpleTerm::Var(mu)),
            l
        )));
        let d = apply(n, &s, &only(n, &s, RuleId::DecFeat)).unwrap();
        assert!(d[0]
            .clause
            .contains(&Constraint::restrict(PathTerm::var(mu), l)));
    }

    #[test]
    fn pre_on_self_loop_is_a_cycle() {
        let (s, f, _) = store();
        let (x, y) = (FoVar(0), FoVar(1));
        let mu = PathVar(0);
        let c = Clause::from_constraints([
            Constraint::prefix(PathTerm::feat(f), PathTerm::var(mu)),
            Constraint::sub(x, f, y),
            Constraint::sub(x, mu, x),
        ]);
        let out = apply(&c, &s, &only(&c, &s, RuleId::Pre)).unwrap();
        assert!(out[0].cycle);
    }

    #[test]
    fn relate_choices() {
        let (s, f, _) = store();
        let (x, y, z, w) = (FoVar(0), FoVar(1), FoVar(2), FoVar(3));
        let (mu, nu) = (PathVar(0), PathVar(1));
        let c = Clause::from_constraints([
            Constraint::sub(x, f, y),
            Constraint::sub(x, mu, z),
            Constraint::sub(x, nu, w),
        ]);
        let all = all_instances(&c, &s, false).unwrap();
        let counts: Vec<(RuleId, usize)> = all.iter().map(|i| (i.rule, i.choices.len())).collect();
        assert_eq!(
            counts,
            vec![
                (RuleId::Relate1, 4),
                (RuleId::Relate2, 3),
                (RuleId::Relate2, 3)
            ]
        );
    }

    #[test]
    fn solve_on_parity_divergence() {
        let (s, f, _) = store();
        let (x, y, z) = (FoVar(0), FoVar(1), FoVar(2));
        let (mu, nu) = (PathVar(0), PathVar(1));
        let c = Clause::from_constraints([
            Constraint::sub(x, mu, y),
            Constraint::sub(x, nu, z),
            Constraint::div(PathTerm::var(mu), PathTerm::var(nu)),
            Constraint::restrict(PathTerm::var(mu), s.compile_str("f+").unwrap()),
            Constraint::restrict(PathTerm::var(nu), s.compile_str("(f f)+").unwrap()),
        ]);
        let inst = only(&c, &s, RuleId::Solv1);
        // f is the only feature: no pair of distinct first features
        assert_eq!(inst.parameterizations(), 0);
        assert!(apply(&c, &s, &inst).unwrap().is_empty());
        let _ = f;
    }

    #[test]
    fn inst_replaces_the_divergence() {
        let (s, f, g) = store();
        let (x, y, z) = (FoVar(0), FoVar(1), FoVar(2));
        let mu = PathVar(0);
        let c = Clause::from_constraints([
            Constraint::sub(x, f, y),
            Constraint::sub(x, mu, z),
            Constraint::div(PathTerm::feat(f), PathTerm::var(mu)),
        ]);
        let inst = only(&c, &s, RuleId::Inst);
        assert_eq!(
            inst.choices,
            vec![
                Choice::First {
                    g,
                    how: Continuation::Longer
                },
                Choice::First {
                    g,
                    how: Continuation::Exact
                },
            ]
        );
        let out = apply(&c, &s, &inst).unwrap();
        let longer = &out[0].clause;
        assert!(longer.contains(&Constraint::prefix(PathTerm::feat(g), PathTerm::var(mu))));
        assert!(longer.contains(&Constraint::div(PathTerm::feat(f), PathTerm::feat(g))));
        assert!(classify(longer, &s).admissible);
        assert_eq!(out[1].rule, RuleId::InstEq);
        assert!(out[1].clause.contains(&Constraint::sub(x, g, z)));
    }
}
