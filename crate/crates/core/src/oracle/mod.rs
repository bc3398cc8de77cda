//! Direct semantics of clauses over finite feature graphs, and a bounded
//! brute-force model search used to cross-check the rewrite engine.

use std::collections::{BTreeMap, BTreeSet};

use crate::clause::{Clause, Constraint, FoVar, PathTerm, PathVar, SimpleTerm, SortName};
use crate::lang::{Feature, LangStore};

/// A finite feature graph: nodes `0..nodes`, functional feature edges and
/// at most one sort per node.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FeatureGraph {
    pub nodes: usize,
    pub edges: BTreeMap<(usize, Feature), usize>,
    pub sorts: BTreeMap<usize, SortName>,
}

impl FeatureGraph {
    pub fn add_node(&mut self) -> usize {
        self.nodes += 1;
        self.nodes - 1
    }

    pub fn walk(&self, from: usize, path: &[Feature]) -> Option<usize> {
        path.iter()
            .try_fold(from, |n, f| self.edges.get(&(n, *f)).copied())
    }

    /// Words labelling walks from `from` to `to` with length between 1 and
    /// `max_len`, in length-lexicographic order.
    pub fn words_between(&self, from: usize, to: usize, max_len: usize) -> Vec<Vec<Feature>> {
        let mut out = Vec::new();
        let mut layer = vec![(from, Vec::new())];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (n, w) in &layer {
                for (&(m, f), &t) in self.edges.range((*n, Feature(0))..=(*n, Feature(u16::MAX))) {
                    debug_assert_eq!(m, *n);
                    let mut w2: Vec<Feature> = w.clone();
                    w2.push(f);
                    if t == to {
                        out.push(w2.clone());
                    }
                    next.push((t, w2));
                }
            }
            layer = next;
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    pub fo: BTreeMap<FoVar, usize>,
    pub path: BTreeMap<PathVar, Vec<Feature>>,
}

impl Valuation {
    fn simple(&self, s: SimpleTerm) -> Option<Vec<Feature>> {
        match s {
            SimpleTerm::Feat(f) => Some(vec![f]),
            SimpleTerm::Var(v) => self.path.get(&v).filter(|w| !w.is_empty()).cloned(),
        }
    }

    fn term(&self, p: PathTerm) -> Option<Vec<Feature>> {
        match p {
            PathTerm::Simple(s) => self.simple(s),
            PathTerm::Complex(a, b) => {
                let mut w = self.simple(a)?;
                w.extend(self.simple(b)?);
                Some(w)
            }
        }
    }

    fn node(&self, clause: &Clause, x: FoVar) -> Option<usize> {
        self.fo
            .get(&x)
            .or_else(|| self.fo.get(&clause.resolve(x)))
            .copied()
    }
}

fn proper_prefix(u: &[Feature], v: &[Feature]) -> bool {
    u.len() < v.len() && v.starts_with(u)
}

fn diverge(u: &[Feature], v: &[Feature]) -> bool {
    !u.starts_with(v) && !v.starts_with(u)
}

/// Validity of a clause in a graph under a valuation. Unassigned variables
/// make the clause false; `⊥` is false.
pub fn evaluate(clause: &Clause, store: &LangStore, g: &FeatureGraph, v: &Valuation) -> bool {
    if clause.is_bottom() {
        return false;
    }
    let bindings_ok =
        clause
            .bindings()
            .keys()
            .all(|&z| match (v.fo.get(&z), v.fo.get(&clause.resolve(z))) {
                (Some(a), Some(b)) => a == b,
                _ => true,
            });
    bindings_ok
        && clause.iter().all(|c| match *c {
            Constraint::Sort(a, x) => v
                .node(clause, x)
                .is_some_and(|n| g.sorts.get(&n) == Some(&a)),
            Constraint::Sub(x, s, y) => match (v.node(clause, x), v.node(clause, y), v.simple(s)) {
                (Some(nx), Some(ny), Some(w)) => g.walk(nx, &w) == Some(ny),
                _ => false,
            },
            Constraint::Div(p, q) => match (v.term(p), v.term(q)) {
                (Some(u), Some(w)) => diverge(&u, &w),
                _ => false,
            },
            Constraint::Prefix(p, q) => match (v.term(p), v.term(q)) {
                (Some(u), Some(w)) => proper_prefix(&u, &w),
                _ => false,
            },
            Constraint::PathEq(p, q) => match (v.term(p), v.term(q)) {
                (Some(u), Some(w)) => u == w,
                _ => false,
            },
            Constraint::Restrict(p, l) => v.term(p).is_some_and(|w| store.member(l, &w)),
        })
}

fn all_words(features: &[Feature], max_len: usize) -> Vec<Vec<Feature>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Feature>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &f in features {
                let mut w2 = w.clone();
                w2.push(f);
                next.push(w2);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        self.0[a.max(b)] = a.min(b);
        true
    }
}

/// The most general graph in which every subterm agreement holds for the
/// given path values: one chain per agreement, then identifications forced
/// by functionality, to a fixpoint. `None` when sorts clash or the graph
/// needs more than `max_nodes` nodes.
fn induced_graph(
    clause: &Clause,
    paths: &BTreeMap<PathVar, Vec<Feature>>,
    max_nodes: usize,
) -> Option<(FeatureGraph, Valuation)> {
    let fo: Vec<FoVar> = clause.fo_vars().into_iter().collect();
    let index: BTreeMap<FoVar, usize> = fo.iter().enumerate().map(|(i, x)| (*x, i)).collect();
    let mut n = fo.len();
    let mut raw_edges: Vec<(usize, Feature, usize)> = Vec::new();
    for (x, s, y) in clause.edges() {
        let w = match s {
            SimpleTerm::Feat(f) => vec![f],
            SimpleTerm::Var(v) => paths.get(&v)?.clone(),
        };
        let mut from = index[&x];
        for (i, &f) in w.iter().enumerate() {
            let to = if i + 1 == w.len() {
                index[&y]
            } else {
                n += 1;
                n - 1
            };
            raw_edges.push((from, f, to));
            from = to;
        }
    }
    let mut uf = UnionFind((0..n).collect());
    loop {
        let mut targets: BTreeMap<(usize, Feature), usize> = BTreeMap::new();
        let mut changed = false;
        for &(a, f, b) in &raw_edges {
            let (a, b) = (uf.find(a), uf.find(b));
            match targets.get(&(a, f)) {
                Some(&t) => changed |= uf.union(t, b),
                None => {
                    targets.insert((a, f), b);
                }
            }
        }
        if !changed {
            break;
        }
    }
    let roots: BTreeSet<usize> = (0..n).map(|i| uf.find(i)).collect();
    if roots.len() > max_nodes {
        return None;
    }
    let dense: BTreeMap<usize, usize> = roots.iter().enumerate().map(|(i, r)| (*r, i)).collect();
    let mut g = FeatureGraph {
        nodes: roots.len(),
        ..FeatureGraph::default()
    };
    for &(a, f, b) in &raw_edges {
        let (a, b) = (dense[&uf.find(a)], dense[&uf.find(b)]);
        g.edges.insert((a, f), b);
    }
    let mut val = Valuation {
        fo: BTreeMap::new(),
        path: paths.clone(),
    };
    for (x, i) in &index {
        val.fo.insert(*x, dense[&uf.find(*i)]);
    }
    for c in clause.iter() {
        if let Constraint::Sort(a, x) = *c {
            let node = val.fo[&x];
            if *g.sorts.entry(node).or_insert(a) != a {
                return None;
            }
        }
    }
    Some((g, val))
}

/// Searches for a model whose path variables denote words of length at most
/// `k` and whose graph has at most `n` nodes. Finding none proves nothing.
pub fn bounded_sat(
    clause: &Clause,
    store: &LangStore,
    k: usize,
    n: usize,
) -> Option<(FeatureGraph, Valuation)> {
    if clause.is_bottom() {
        return None;
    }
    let features: Vec<Feature> = store.alphabet().features().collect();
    let words = all_words(&features, k);
    let vars: Vec<PathVar> = clause.path_vars().into_iter().collect();
    let candidates: Vec<Vec<&Vec<Feature>>> = vars
        .iter()
        .map(|&v| {
            let ls = clause.restrictions(PathTerm::var(v));
            words
                .iter()
                .filter(|w| ls.iter().all(|&l| store.member(l, w)))
                .collect()
        })
        .collect();
    if candidates.iter().any(Vec::is_empty) {
        return None;
    }
    let mut pick = vec![0usize; vars.len()];
    loop {
        let paths: BTreeMap<PathVar, Vec<Feature>> = vars
            .iter()
            .zip(&pick)
            .enumerate()
            .map(|(i, (v, &j))| (*v, candidates[i][j].clone()))
            .collect();
        if let Some((g, val)) = induced_graph(clause, &paths, n) {
            if evaluate(clause, store, &g, &val) {
                return Some((g, val));
            }
        }
        let mut i = 0;
        loop {
            if i == pick.len() {
                return None;
            }
            pick[i] += 1;
            if pick[i] < candidates[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
    }
}
