//! The constraint language: variables, path terms, the constraint forms and
//! clauses, together with substitution and the structural queries the
//! rewrite rules are phrased in.

mod canon;
mod classify;
mod translate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::lang::{Feature, LangId, LangStore};

pub use canon::canonicalize;
pub use classify::{admissibility_violations, classify, Classification};
pub use translate::{extend_km, translate_km, KmConstraint, PathItem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClauseError {
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FoVar(pub u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathVar(pub u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SortName(pub u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SimpleTerm {
    Feat(Feature),
    Var(PathVar),
}

impl SimpleTerm {
    pub fn as_var(self) -> Option<PathVar> {
        match self {
            SimpleTerm::Var(v) => Some(v),
            SimpleTerm::Feat(_) => None,
        }
    }

    pub fn as_feature(self) -> Option<Feature> {
        match self {
            SimpleTerm::Feat(f) => Some(f),
            SimpleTerm::Var(_) => None,
        }
    }

    pub fn is_var(self) -> bool {
        matches!(self, SimpleTerm::Var(_))
    }
}

impl From<Feature> for SimpleTerm {
    fn from(f: Feature) -> Self {
        SimpleTerm::Feat(f)
    }
}

impl From<PathVar> for SimpleTerm {
    fn from(v: PathVar) -> Self {
        SimpleTerm::Var(v)
    }
}

/// A path term. Concatenations have exactly two simple components; longer
/// terms are not representable.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathTerm {
    Simple(SimpleTerm),
    Complex(SimpleTerm, SimpleTerm),
}

impl PathTerm {
    pub fn var(v: PathVar) -> Self {
        PathTerm::Simple(SimpleTerm::Var(v))
    }

    pub fn feat(f: Feature) -> Self {
        PathTerm::Simple(SimpleTerm::Feat(f))
    }

    pub fn as_simple(self) -> Option<SimpleTerm> {
        match self {
            PathTerm::Simple(s) => Some(s),
            PathTerm::Complex(..) => None,
        }
    }

    pub fn is_complex(self) -> bool {
        matches!(self, PathTerm::Complex(..))
    }

    pub fn mentions(self, v: PathVar) -> bool {
        let v = SimpleTerm::Var(v);
        match self {
            PathTerm::Simple(s) => s == v,
            PathTerm::Complex(a, b) => a == v || b == v,
        }
    }

    fn components(self) -> impl Iterator<Item = SimpleTerm> {
        let (a, b) = match self {
            PathTerm::Simple(s) => (s, None),
            PathTerm::Complex(a, b) => (a, Some(b)),
        };
        std::iter::once(a).chain(b)
    }

    fn subst(self, v: PathVar, by: PathTerm) -> Result<PathTerm, ClauseError> {
        let target = SimpleTerm::Var(v);
        match self {
            PathTerm::Simple(s) if s == target => Ok(by),
            PathTerm::Simple(_) => Ok(self),
            PathTerm::Complex(a, b) if a != target && b != target => Ok(self),
            PathTerm::Complex(a, b) => match by {
                PathTerm::Simple(s) => Ok(PathTerm::Complex(
                    if a == target { s } else { a },
                    if b == target { s } else { b },
                )),
                PathTerm::Complex(..) => Err(ClauseError::InvariantViolation(
                    "substitution would create a path term of length 3".into(),
                )),
            },
        }
    }
}

impl From<SimpleTerm> for PathTerm {
    fn from(s: SimpleTerm) -> Self {
        PathTerm::Simple(s)
    }
}

/// The stored constraint forms. Agreement is not stored: it is applied as a
/// variable binding (see [`Clause::subst_fo_var`]). Divergence and path
/// equality keep their operands in ascending order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constraint {
    Sort(SortName, FoVar),
    Sub(FoVar, SimpleTerm, FoVar),
    Div(PathTerm, PathTerm),
    Prefix(PathTerm, PathTerm),
    PathEq(PathTerm, PathTerm),
    Restrict(PathTerm, LangId),
}

impl Constraint {
    pub fn div(a: impl Into<PathTerm>, b: impl Into<PathTerm>) -> Self {
        let (a, b) = (a.into(), b.into());
        Constraint::Div(a.min(b), a.max(b))
    }

    pub fn path_eq(a: impl Into<PathTerm>, b: impl Into<PathTerm>) -> Self {
        let (a, b) = (a.into(), b.into());
        Constraint::PathEq(a.min(b), a.max(b))
    }

    /// `p ≺̇ q`
    pub fn prefix(p: impl Into<PathTerm>, q: impl Into<PathTerm>) -> Self {
        Constraint::Prefix(p.into(), q.into())
    }

    pub fn restrict(p: impl Into<PathTerm>, l: LangId) -> Self {
        Constraint::Restrict(p.into(), l)
    }

    pub fn sub(x: FoVar, s: impl Into<SimpleTerm>, y: FoVar) -> Self {
        Constraint::Sub(x, s.into(), y)
    }

    pub fn path_terms(&self) -> Vec<PathTerm> {
        match *self {
            Constraint::Sort(..) => vec![],
            Constraint::Sub(_, s, _) => vec![PathTerm::Simple(s)],
            Constraint::Div(a, b) | Constraint::Prefix(a, b) | Constraint::PathEq(a, b) => {
                vec![a, b]
            }
            Constraint::Restrict(p, _) => vec![p],
        }
    }

    pub fn fo_vars(&self) -> Vec<FoVar> {
        match *self {
            Constraint::Sort(_, x) => vec![x],
            Constraint::Sub(x, _, y) => vec![x, y],
            _ => vec![],
        }
    }

    pub fn path_vars(&self) -> Vec<PathVar> {
        self.path_terms()
            .into_iter()
            .flat_map(PathTerm::components)
            .filter_map(SimpleTerm::as_var)
            .collect()
    }

    pub fn mentions_path_var(&self, v: PathVar) -> bool {
        self.path_terms().into_iter().any(|t| t.mentions(v))
    }

    /// True for divergence, prefix and path equality constraints.
    pub fn is_relation(&self) -> bool {
        matches!(
            self,
            Constraint::Div(..) | Constraint::Prefix(..) | Constraint::PathEq(..)
        )
    }

    fn subst_path(self, v: PathVar, by: PathTerm) -> Result<Constraint, ClauseError> {
        Ok(match self {
            Constraint::Sort(..) => self,
            Constraint::Sub(x, s, y) => match PathTerm::Simple(s).subst(v, by)? {
                PathTerm::Simple(s) => Constraint::Sub(x, s, y),
                PathTerm::Complex(..) => {
                    return Err(ClauseError::InvariantViolation(
                        "subterm agreement with a complex path term".into(),
                    ))
                }
            },
            Constraint::Div(a, b) => Constraint::div(a.subst(v, by)?, b.subst(v, by)?),
            Constraint::PathEq(a, b) => Constraint::path_eq(a.subst(v, by)?, b.subst(v, by)?),
            Constraint::Prefix(a, b) => Constraint::Prefix(a.subst(v, by)?, b.subst(v, by)?),
            Constraint::Restrict(p, l) => Constraint::Restrict(p.subst(v, by)?, l),
        })
    }

    fn subst_fo(self, z: FoVar, y: FoVar) -> Constraint {
        let r = |x: FoVar| if x == z { y } else { x };
        match self {
            Constraint::Sort(a, x) => Constraint::Sort(a, r(x)),
            Constraint::Sub(x, s, w) => Constraint::Sub(r(x), s, r(w)),
            c => c,
        }
    }
}

/// The four mutually exclusive relations between two paths.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Relation {
    Equal,
    /// The first path is a proper prefix of the second.
    ProperPrefix,
    /// The second path is a proper prefix of the first.
    ProperSuffixOf,
    Diverge,
}

pub fn path_relation(u: &[Feature], v: &[Feature]) -> Relation {
    let common = u.iter().zip(v).take_while(|(a, b)| a == b).count();
    match (common == u.len(), common == v.len()) {
        (true, true) => Relation::Equal,
        (true, false) => Relation::ProperPrefix,
        (false, true) => Relation::ProperSuffixOf,
        (false, false) => Relation::Diverge,
    }
}

/// A finite set of constraints, read conjunctively, or `⊥`.
///
/// `bindings` records eliminated first-order variables; `next_fo` and
/// `next_path` are the fresh-variable counters of the derivation.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Clause {
    constraints: BTreeSet<Constraint>,
    bindings: BTreeMap<FoVar, FoVar>,
    bottom: bool,
    next_fo: u32,
    next_path: u32,
}

impl Default for Clause {
    fn default() -> Self {
        Self::new()
    }
}

impl Clause {
    pub fn new() -> Self {
        Clause {
            constraints: BTreeSet::new(),
            bindings: BTreeMap::new(),
            bottom: false,
            next_fo: 0,
            next_path: 0,
        }
    }

    pub fn from_constraints<I: IntoIterator<Item = Constraint>>(cs: I) -> Self {
        let mut c = Clause::new();
        for k in cs {
            c.insert(k);
        }
        c
    }

    /// `⊥`, keeping the counters and bindings.
    pub fn to_bottom(&self) -> Clause {
        Clause {
            constraints: BTreeSet::new(),
            bindings: self.bindings.clone(),
            bottom: true,
            next_fo: self.next_fo,
            next_path: self.next_path,
        }
    }

    pub fn bottom() -> Clause {
        Clause::new().to_bottom()
    }

    pub fn is_bottom(&self) -> bool {
        self.bottom
    }

    pub fn len(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    pub fn constraints(&self) -> &BTreeSet<Constraint> {
        &self.constraints
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter()
    }

    pub fn contains(&self, c: &Constraint) -> bool {
        self.constraints.contains(c)
    }

    pub fn insert(&mut self, c: Constraint) -> bool {
        for x in c.fo_vars() {
            self.next_fo = self.next_fo.max(x.0 + 1);
        }
        for v in c.path_vars() {
            self.next_path = self.next_path.max(v.0 + 1);
        }
        self.constraints.insert(c)
    }

    pub fn remove(&mut self, c: &Constraint) -> bool {
        self.constraints.remove(c)
    }

    pub fn bindings(&self) -> &BTreeMap<FoVar, FoVar> {
        &self.bindings
    }

    /// Follows bindings to the representative of `x`.
    pub fn resolve(&self, mut x: FoVar) -> FoVar {
        while let Some(&y) = self.bindings.get(&x) {
            x = y;
        }
        x
    }

    pub fn fresh_fo(&mut self) -> FoVar {
        let x = FoVar(self.next_fo);
        self.next_fo += 1;
        x
    }

    pub fn fresh_path(&mut self) -> PathVar {
        let v = PathVar(self.next_path);
        self.next_path += 1;
        v
    }

    /// Makes sure fresh variables are numbered from at least the given values.
    pub fn reserve(&mut self, fo: u32, path: u32) {
        self.next_fo = self.next_fo.max(fo);
        self.next_path = self.next_path.max(path);
    }

    pub fn fo_vars(&self) -> BTreeSet<FoVar> {
        self.constraints.iter().flat_map(|c| c.fo_vars()).collect()
    }

    pub fn path_vars(&self) -> BTreeSet<PathVar> {
        self.constraints
            .iter()
            .flat_map(|c| c.path_vars())
            .collect()
    }

    /// `out(φ, x)`: simple terms labelling subterm agreements leaving `x`.
    pub fn outgoing(&self, x: FoVar) -> BTreeSet<SimpleTerm> {
        self.constraints
            .iter()
            .filter_map(|c| match *c {
                Constraint::Sub(a, s, _) if a == x => Some(s),
                _ => None,
            })
            .collect()
    }

    /// All subterm agreements `x⟨s⟩y` as triples.
    pub fn edges(&self) -> impl Iterator<Item = (FoVar, SimpleTerm, FoVar)> + '_ {
        self.constraints.iter().filter_map(|c| match *c {
            Constraint::Sub(x, s, y) => Some((x, s, y)),
            _ => None,
        })
    }

    /// Edges labelled with the given simple term.
    pub fn edges_with(&self, s: SimpleTerm) -> Vec<(FoVar, FoVar)> {
        self.edges()
            .filter(|(_, t, _)| *t == s)
            .map(|(x, _, y)| (x, y))
            .collect()
    }

    /// Source variables having both terms among their outgoing edges.
    pub fn co_outgoing(&self, s: SimpleTerm, t: SimpleTerm) -> Option<FoVar> {
        let xs: BTreeSet<FoVar> = self.edges_with(s).into_iter().map(|(x, _)| x).collect();
        self.edges_with(t)
            .into_iter()
            .map(|(x, _)| x)
            .find(|x| xs.contains(x))
    }

    /// Languages restricting the given term.
    pub fn restrictions(&self, p: PathTerm) -> Vec<LangId> {
        self.constraints
            .iter()
            .filter_map(|c| match *c {
                Constraint::Restrict(q, l) if q == p => Some(l),
                _ => None,
            })
            .collect()
    }

    /// The accumulated restriction of a path variable (`F⁺` when none).
    pub fn restriction_of(
        &self,
        store: &LangStore,
        v: PathVar,
    ) -> Result<LangId, crate::lang::LangError> {
        let mut acc = store.universal()?;
        for l in self.restrictions(PathTerm::var(v)) {
            acc = store.intersect(acc, l)?;
        }
        Ok(acc)
    }

    /// Two simple terms are related when a divergence, prefix or path
    /// equality constraint connects them.
    pub fn related(&self, s: SimpleTerm, t: SimpleTerm) -> bool {
        let (s, t) = (PathTerm::Simple(s), PathTerm::Simple(t));
        self.contains(&Constraint::div(s, t))
            || self.contains(&Constraint::path_eq(s, t))
            || self.contains(&Constraint::Prefix(s, t))
            || self.contains(&Constraint::Prefix(t, s))
    }

    pub fn has_complex_terms(&self) -> bool {
        self.constraints
            .iter()
            .any(|c| c.path_terms().iter().any(|t| t.is_complex()))
    }

    /// Tagged variables: `x` with some `s ≺̇ μ` where `s, μ ∈ out(φ, x)`.
    pub fn tagged_variables(&self) -> BTreeSet<FoVar> {
        let mut out = BTreeSet::new();
        for c in &self.constraints {
            if let Constraint::Prefix(
                PathTerm::Simple(s),
                PathTerm::Simple(t @ SimpleTerm::Var(_)),
            ) = *c
            {
                for (x, _) in self.edges_with(s) {
                    if self.outgoing(x).contains(&t) {
                        out.insert(x);
                    }
                }
            }
        }
        out
    }

    /// The unique tagged variable; more than one is an invariant violation.
    pub fn tagged_variable(&self) -> Result<Option<FoVar>, ClauseError> {
        let tagged = self.tagged_variables();
        if tagged.len() > 1 {
            return Err(ClauseError::InvariantViolation(format!(
                "{} tagged variables",
                tagged.len()
            )));
        }
        Ok(tagged.into_iter().next())
    }

    /// Replaces every occurrence of `v` by `by`.
    pub fn subst_path_var(&self, v: PathVar, by: PathTerm) -> Result<Clause, ClauseError> {
        let mut out = Clause {
            constraints: BTreeSet::new(),
            ..self.clone()
        };
        for c in &self.constraints {
            out.insert(c.subst_path(v, by)?);
        }
        Ok(out)
    }

    /// Eliminates `z` in favour of `y`, recording the binding `z ↦ y`.
    pub fn subst_fo_var(&self, z: FoVar, y: FoVar) -> Clause {
        debug_assert_ne!(z, y);
        let mut out = Clause {
            constraints: BTreeSet::new(),
            ..self.clone()
        };
        for c in &self.constraints {
            out.constraints.insert(c.subst_fo(z, y));
        }
        out.bindings.insert(z, y);
        out
    }

    /// Renders the clause one constraint per line, in constraint order,
    /// followed by the bindings.
    pub fn render(&self, store: &LangStore, names: &Symbols) -> String {
        if self.bottom {
            return "⊥".to_string();
        }
        let mut lines: Vec<String> = self
            .constraints
            .iter()
            .map(|c| names.constraint(store, c))
            .collect();
        for z in self.bindings.keys() {
            lines.push(format!("{} = {}", names.fo(*z), names.fo(self.resolve(*z))));
        }
        lines.join("\n")
    }
}

/// Display names for sorts and variables. Variables without a recorded name
/// print as `_v<N>` / `_p<N>`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Symbols {
    pub sorts: Vec<String>,
    pub fo_names: BTreeMap<FoVar, String>,
    pub path_names: BTreeMap<PathVar, String>,
}

impl Symbols {
    pub fn sort(&self, s: SortName) -> String {
        self.sorts
            .get(s.0 as usize)
            .cloned()
            .unwrap_or_else(|| format!("S{}", s.0))
    }

    pub fn fo(&self, x: FoVar) -> String {
        self.fo_names
            .get(&x)
            .cloned()
            .unwrap_or_else(|| format!("_v{}", x.0))
    }

    pub fn path(&self, v: PathVar) -> String {
        self.path_names
            .get(&v)
            .map(|n| format!("${n}"))
            .unwrap_or_else(|| format!("$_p{}", v.0))
    }

    pub fn simple(&self, store: &LangStore, s: SimpleTerm) -> String {
        match s {
            SimpleTerm::Feat(f) => store.alphabet().name(f).to_string(),
            SimpleTerm::Var(v) => self.path(v),
        }
    }

    pub fn term(&self, store: &LangStore, p: PathTerm) -> String {
        match p {
            PathTerm::Simple(s) => self.simple(store, s),
            PathTerm::Complex(a, b) => {
                format!("{}.{}", self.simple(store, a), self.simple(store, b))
            }
        }
    }

    pub fn constraint(&self, store: &LangStore, c: &Constraint) -> String {
        match *c {
            Constraint::Sort(a, x) => format!("{}({})", self.sort(a), self.fo(x)),
            Constraint::Sub(x, s, y) => {
                format!("{} {} {}", self.fo(x), self.simple(store, s), self.fo(y))
            }
            Constraint::Div(a, b) => {
                format!("div({}, {})", self.term(store, a), self.term(store, b))
            }
            Constraint::Prefix(a, b) => {
                format!("prefix({}, {})", self.term(store, a), self.term(store, b))
            }
            Constraint::PathEq(a, b) => {
                format!("patheq({}, {})", self.term(store, a), self.term(store, b))
            }
            Constraint::Restrict(p, l) => {
                format!("in({}, {})", self.term(store, p), store.to_regex(l))
            }
        }
    }
}

impl fmt::Display for FoVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "_v{}", self.0)
    }
}

impl fmt::Display for PathVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "$_p{}", self.0)
    }
}
