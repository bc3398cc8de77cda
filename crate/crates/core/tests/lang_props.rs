mod common;

use std::collections::BTreeSet;

use common::{all_words, ast_member, ast_strategy};
use funcert::lang::{Alphabet, Feature, LangStore, RegexAst};
use proptest::prelude::*;

const FEATURES: &[&str] = &["f", "g", "h"];

fn store() -> LangStore {
    LangStore::new(Alphabet::new(FEATURES.iter().copied()))
}

fn features(s: &LangStore) -> Vec<Feature> {
    s.alphabet().features().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn compiled_membership_matches_the_syntax_tree(ast in ast_strategy(FEATURES)) {
        let s = store();
        let l = s.compile(&ast).unwrap();
        for w in all_words(&features(&s), 1, 5) {
            prop_assert_eq!(s.member(l, &w), ast_member(&ast, s.alphabet(), &w), "{:?}", w);
        }
        prop_assert!(!s.member(l, &[]));
    }

    #[test]
    fn equal_languages_get_equal_ids(a in ast_strategy(FEATURES), b in ast_strategy(FEATURES)) {
        let s = store();
        let (la, lb) = (s.compile(&a).unwrap(), s.compile(&b).unwrap());
        let words = all_words(&features(&s), 1, 6);
        let same = words.iter().all(|w| s.member(la, w) == s.member(lb, w));
        if la == lb {
            prop_assert!(same);
        } else {
            prop_assert!(!same || *s.dfa(la) != *s.dfa(lb));
        }
        let aa = s.compile(&RegexAst::union(a.clone(), a.clone())).unwrap();
        prop_assert_eq!(aa, la);
        let ab = s.compile(&RegexAst::union(a.clone(), b.clone())).unwrap();
        let ba = s.compile(&RegexAst::union(b, a)).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn quotient_is_sound_and_complete(ast in ast_strategy(FEATURES)) {
        let s = store();
        let l = s.compile(&ast).unwrap();
        for f in features(&s) {
            let q = s.quotient(f, l).unwrap();
            for w in all_words(&features(&s), 1, 5) {
                let mut fw = vec![f];
                fw.extend(&w);
                prop_assert_eq!(s.member(q, &w), s.member(l, &fw));
            }
            prop_assert!(!s.member(q, &[]));
        }
    }

    #[test]
    fn dfun_covers_every_split(ast in ast_strategy(FEATURES)) {
        let s = store();
        let l = s.compile(&ast).unwrap();
        let parts = s.dfun(l).unwrap();
        for w in all_words(&features(&s), 2, 5).into_iter().filter(|w| s.member(l, w)) {
            for i in 1..w.len() {
                let (p, q) = w.split_at(i);
                prop_assert!(
                    parts.iter().any(|d| s.member(d.prefix, p) && s.member(d.suffix, q)),
                    "{:?} split at {}", w, i
                );
            }
        }
        for d in parts.iter() {
            for p in s.words_up_to(d.prefix, 3) {
                for q in s.words_up_to(d.suffix, 3) {
                    let pq: Vec<Feature> = p.iter().chain(&q).copied().collect();
                    prop_assert!(s.member(l, &pq));
                }
            }
        }
    }

    #[test]
    fn quotient_and_dfun_closure_is_bounded(ast in ast_strategy(FEATURES)) {
        let s = store();
        let l = s.compile(&ast).unwrap();
        let n = s.dfa(l).num_states();
        let mut seen = BTreeSet::from([l]);
        let mut todo = vec![l];
        while let Some(k) = todo.pop() {
            let mut next: Vec<_> = features(&s).into_iter().map(|f| s.quotient(f, k).unwrap()).collect();
            next.retain(|&m| !s.is_empty_lang(m));
            if s.is_empty_lang(k) {
                continue;
            }
            for d in s.dfun(k).unwrap().iter() {
                next.push(d.prefix);
                next.push(d.suffix);
            }
            for m in next {
                if seen.insert(m) {
                    todo.push(m);
                }
            }
            prop_assert!(seen.len() <= (n + 1) * (n + 1) + 1, "{} languages from {} states", seen.len(), n);
        }
    }
}

#[test]
fn empty_word_is_stripped() {
    let s = store();
    let star = s.compile_str("f*").unwrap();
    let plus = s.compile_str("f+").unwrap();
    assert_eq!(star, plus);
    let f = s.alphabet().feature("f").unwrap();
    assert!(s.is_empty_lang(s.quotient(f, s.compile_str("f").unwrap()).unwrap()));
}
