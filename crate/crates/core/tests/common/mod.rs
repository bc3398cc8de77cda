#![allow(dead_code)]

use funcert::clause::{
    Clause, Constraint, FoVar, KmConstraint, PathItem, PathTerm, PathVar, SortName,
};
use funcert::lang::{Alphabet, Feature, LangId, LangStore, RegexAst};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::Rng;

pub fn random_ast<R: Rng>(rng: &mut R, features: &[&str], depth: u32) -> RegexAst {
    if depth == 0 || rng.gen_bool(0.3) {
        return RegexAst::feature(features[rng.gen_range(0..features.len())]);
    }
    match rng.gen_range(0..4) {
        0 => RegexAst::concat(
            random_ast(rng, features, depth - 1),
            random_ast(rng, features, depth - 1),
        ),
        1 => RegexAst::union(
            random_ast(rng, features, depth - 1),
            random_ast(rng, features, depth - 1),
        ),
        2 => RegexAst::star(random_ast(rng, features, depth - 1)),
        _ => RegexAst::plus(random_ast(rng, features, depth - 1)),
    }
}

pub fn ast_strategy(features: &'static [&'static str]) -> impl Strategy<Value = RegexAst> {
    let leaf = prop::sample::select(features).prop_map(RegexAst::feature);
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| RegexAst::concat(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| RegexAst::union(a, b)),
            inner.clone().prop_map(RegexAst::star),
            inner.prop_map(RegexAst::plus),
        ]
    })
}

/// Positions reachable after matching `ast` from `start`, by direct
/// backtracking over the syntax tree.
fn ends(ast: &RegexAst, al: &Alphabet, word: &[Feature], start: usize) -> Vec<usize> {
    let mut out = match ast {
        RegexAst::Empty => vec![],
        RegexAst::Epsilon => vec![start],
        RegexAst::Feature(name) => match (word.get(start), al.feature(name)) {
            (Some(&f), Some(g)) if f == g => vec![start + 1],
            _ => vec![],
        },
        RegexAst::Concat(a, b) => ends(a, al, word, start)
            .into_iter()
            .flat_map(|i| ends(b, al, word, i))
            .collect(),
        RegexAst::Union(a, b) => {
            let mut v = ends(a, al, word, start);
            v.extend(ends(b, al, word, start));
            v
        }
        RegexAst::Star(a) | RegexAst::Plus(a) => {
            let mut seen = vec![false; word.len() + 1];
            let mut frontier = vec![start];
            let mut v = Vec::new();
            if matches!(ast, RegexAst::Star(_)) {
                v.push(start);
            }
            while let Some(i) = frontier.pop() {
                for j in ends(a, al, word, i) {
                    if !seen[j] {
                        seen[j] = true;
                        v.push(j);
                        frontier.push(j);
                    }
                }
            }
            v
        }
    };
    out.sort_unstable();
    out.dedup();
    out
}

/// Membership in the language of `ast` restricted to non-empty words.
pub fn ast_member(ast: &RegexAst, al: &Alphabet, word: &[Feature]) -> bool {
    !word.is_empty() && ends(ast, al, word, 0).contains(&word.len())
}

pub fn all_words(features: &[Feature], min: usize, max: usize) -> Vec<Vec<Feature>> {
    let mut out = Vec::new();
    let mut layer = vec![Vec::new()];
    for len in 1..=max {
        let mut next = Vec::new();
        for w in &layer {
            for &f in features {
                let mut v = w.clone();
                v.push(f);
                next.push(v);
            }
        }
        if len >= min {
            out.extend(next.iter().cloned());
        }
        layer = next;
    }
    out
}

/// A random restriction language whose minimal automaton has at most four
/// states.
pub fn small_lang(rng: &mut StdRng, store: &LangStore, names: &[&str]) -> LangId {
    loop {
        let ast = random_ast(rng, names, 2);
        let id = store.compile(&ast).unwrap();
        if store.dfa(id).num_states() <= 4 {
            return id;
        }
    }
}

/// A random prime clause over at most two features, three first-order
/// variables and two path variables.
pub fn random_prime_clause(rng: &mut StdRng) -> (LangStore, Clause) {
    let names: &[&str] = if rng.gen_bool(0.3) {
        &["f"]
    } else {
        &["f", "g"]
    };
    let store = LangStore::new(Alphabet::new(names.iter().copied()));
    let features: Vec<Feature> = store.alphabet().features().collect();
    let nfo = rng.gen_range(1..=3u32);
    let npath = rng.gen_range(1..=2u32);
    let var = |rng: &mut StdRng| FoVar(rng.gen_range(0..nfo));
    let mut c = Clause::new();
    for v in 0..npath {
        let mu = PathVar(v);
        let (x, y) = (var(rng), var(rng));
        c.insert(Constraint::sub(x, mu, y));
        for _ in 0..rng.gen_range(1..=2) {
            c.insert(Constraint::restrict(
                PathTerm::var(mu),
                small_lang(rng, &store, names),
            ));
        }
    }
    for _ in 0..rng.gen_range(0..=2) {
        let f = features[rng.gen_range(0..features.len())];
        let (x, y) = (var(rng), var(rng));
        if !c.outgoing(x).contains(&f.into()) {
            c.insert(Constraint::sub(x, f, y));
        }
    }
    for _ in 0..rng.gen_range(0..=2) {
        c.insert(Constraint::Sort(SortName(rng.gen_range(0..2)), var(rng)));
    }
    (store, c)
}

/// Random Kaplan/Maxwell input statements.
pub fn random_km(rng: &mut StdRng, store: &LangStore, names: &[&str]) -> Vec<KmConstraint> {
    let features: Vec<Feature> = store.alphabet().features().collect();
    let var = |rng: &mut StdRng| FoVar(rng.gen_range(0..4));
    (0..rng.gen_range(1..=5))
        .map(|_| match rng.gen_range(0..5) {
            0 => KmConstraint::Sort(SortName(rng.gen_range(0..2)), var(rng)),
            1 => KmConstraint::Agree(var(rng), var(rng)),
            _ => {
                let items = (0..rng.gen_range(1..=3))
                    .map(|_| {
                        if rng.gen_bool(0.5) {
                            PathItem::Feature(features[rng.gen_range(0..features.len())])
                        } else {
                            PathItem::Lang(small_lang(rng, store, names))
                        }
                    })
                    .collect();
                KmConstraint::Path(var(rng), items, var(rng))
            }
        })
        .collect()
}
