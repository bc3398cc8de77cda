//! Partial deterministic automata over a dense feature alphabet, plus the
//! normalization pipeline that turns any such automaton into the canonical
//! form stored in the language store.

use std::collections::{BTreeMap, VecDeque};

use super::Feature;

/// A partial DFA as produced by the language operations. Missing transitions
/// go to an implicit sink.
#[derive(Clone, Debug)]
pub(crate) struct RawDfa {
    pub trans: Vec<Vec<Option<u32>>>,
    pub finals: Vec<bool>,
    pub init: u32,
}

/// Minimal, trimmed, BFS-numbered DFA. State 0 is initial.
///
/// The empty language is the single non-final state without transitions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CanonDfa {
    trans: Vec<Vec<Option<u32>>>,
    finals: Vec<bool>,
}

impl CanonDfa {
    pub(crate) fn empty(alphabet_len: usize) -> Self {
        CanonDfa {
            trans: vec![vec![None; alphabet_len]],
            finals: vec![false],
        }
    }

    pub fn num_states(&self) -> usize {
        self.trans.len()
    }

    pub fn is_final(&self, q: u32) -> bool {
        self.finals[q as usize]
    }

    pub fn step(&self, q: u32, f: Feature) -> Option<u32> {
        self.trans[q as usize][f.index()]
    }

    /// Outgoing transitions of `q` in feature order.
    pub fn edges(&self, q: u32) -> impl Iterator<Item = (Feature, u32)> + '_ {
        self.trans[q as usize]
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.map(|t| (Feature(i as u16), t)))
    }

    pub fn is_empty(&self) -> bool {
        !self.finals.iter().any(|&f| f)
    }

    pub fn accepts(&self, word: &[Feature]) -> bool {
        let mut q = 0;
        for &f in word {
            match self.step(q, f) {
                Some(n) => q = n,
                None => return false,
            }
        }
        self.is_final(q)
    }

    pub(crate) fn to_raw(&self) -> RawDfa {
        RawDfa {
            trans: self.trans.clone(),
            finals: self.finals.clone(),
            init: 0,
        }
    }

    /// Same transition structure, rooted at `q`.
    pub(crate) fn rerooted(&self, q: u32) -> RawDfa {
        RawDfa {
            init: q,
            ..self.to_raw()
        }
    }

    /// Same transition structure with `{q}` as the only final state.
    pub(crate) fn refinaled(&self, q: u32) -> RawDfa {
        let mut finals = vec![false; self.finals.len()];
        finals[q as usize] = true;
        RawDfa {
            trans: self.trans.clone(),
            finals,
            init: 0,
        }
    }

    /// Length-lexicographically least accepted word.
    pub fn shortest_word(&self) -> Option<Vec<Feature>> {
        let n = self.num_states();
        let mut pred: Vec<Option<(u32, Feature)>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0u32]);
        seen[0] = true;
        while let Some(q) = queue.pop_front() {
            if self.is_final(q) {
                let mut word = Vec::new();
                let mut cur = q;
                while let Some((p, f)) = pred[cur as usize] {
                    word.push(f);
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            for (f, t) in self.edges(q) {
                if !seen[t as usize] {
                    seen[t as usize] = true;
                    pred[t as usize] = Some((q, f));
                    queue.push_back(t);
                }
            }
        }
        None
    }

    /// All accepted words of length at most `max_len`, in length-lexicographic order.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Vec<Feature>> {
        let mut out = Vec::new();
        let mut layer: Vec<(u32, Vec<Feature>)> = vec![(0, Vec::new())];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for (q, w) in &layer {
                for (f, t) in self.edges(*q) {
                    let mut w2 = w.clone();
                    w2.push(f);
                    if self.is_final(t) {
                        out.push(w2.clone());
                    }
                    next.push((t, w2));
                }
            }
            layer = next;
        }
        out
    }
}

impl RawDfa {
    fn num_states(&self) -> usize {
        self.trans.len()
    }

    /// Removes the empty word from the language by splitting off a
    /// non-final copy of the initial state.
    fn strip_epsilon(mut self) -> RawDfa {
        if self.finals[self.init as usize] {
            let copy = self.trans[self.init as usize].clone();
            self.trans.push(copy);
            self.finals.push(false);
            self.init = (self.trans.len() - 1) as u32;
        }
        self
    }

    /// Normalizes to the canonical minimal DFA of `L ∩ F⁺`.
    pub(crate) fn canonicalize(self, alphabet_len: usize) -> CanonDfa {
        let raw = self.strip_epsilon();
        let n = raw.num_states();

        let mut reach = vec![false; n];
        let mut stack = vec![raw.init];
        reach[raw.init as usize] = true;
        while let Some(q) = stack.pop() {
            for t in raw.trans[q as usize].iter().flatten() {
                if !reach[*t as usize] {
                    reach[*t as usize] = true;
                    stack.push(*t);
                }
            }
        }

        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (q, row) in raw.trans.iter().enumerate() {
            for t in row.iter().flatten() {
                rev[*t as usize].push(q as u32);
            }
        }
        let mut coreach = vec![false; n];
        let mut stack: Vec<u32> = (0..n as u32).filter(|&q| raw.finals[q as usize]).collect();
        for &q in &stack {
            coreach[q as usize] = true;
        }
        while let Some(q) = stack.pop() {
            for &p in &rev[q as usize] {
                if !coreach[p as usize] {
                    coreach[p as usize] = true;
                    stack.push(p);
                }
            }
        }

        let useful: Vec<bool> = (0..n).map(|q| reach[q] && coreach[q]).collect();
        if !useful[raw.init as usize] {
            return CanonDfa::empty(alphabet_len);
        }
        let live = |t: &Option<u32>| t.filter(|t| useful[*t as usize]);

        // Moore refinement over useful states; a missing transition is its own class.
        let mut class: Vec<u32> = (0..n).map(|q| raw.finals[q] as u32).collect();
        let mut num_classes = 0;
        loop {
            let mut sigs: BTreeMap<(u32, Vec<Option<u32>>), u32> = BTreeMap::new();
            let mut keys = Vec::with_capacity(n);
            for q in 0..n {
                if !useful[q] {
                    keys.push(None);
                    continue;
                }
                let row = raw.trans[q]
                    .iter()
                    .map(|t| live(t).map(|t| class[t as usize]))
                    .collect::<Vec<_>>();
                keys.push(Some((class[q], row)));
            }
            for key in keys.iter().flatten() {
                let next = sigs.len() as u32;
                sigs.entry(key.clone()).or_insert(next);
            }
            let new_class: Vec<u32> = keys
                .iter()
                .map(|k| k.as_ref().map_or(u32::MAX, |k| sigs[k]))
                .collect();
            let stable = sigs.len() == num_classes;
            num_classes = sigs.len();
            class = new_class;
            if stable {
                break;
            }
        }

        // Breadth-first renumbering of the quotient machine.
        let mut number: BTreeMap<u32, u32> = BTreeMap::new();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        let start = class[raw.init as usize];
        number.insert(start, 0);
        order.push(raw.init);
        queue.push_back(raw.init);
        while let Some(q) = queue.pop_front() {
            for t in raw.trans[q as usize].iter() {
                if let Some(t) = live(t) {
                    let c = class[t as usize];
                    if let std::collections::btree_map::Entry::Vacant(e) = number.entry(c) {
                        e.insert(order.len() as u32);
                        order.push(t);
                        queue.push_back(t);
                    }
                }
            }
        }

        let trans = order
            .iter()
            .map(|&q| {
                raw.trans[q as usize]
                    .iter()
                    .map(|t| live(t).map(|t| number[&class[t as usize]]))
                    .collect()
            })
            .collect();
        let finals = order.iter().map(|&q| raw.finals[q as usize]).collect();
        CanonDfa { trans, finals }
    }
}

/// Product automaton for intersection.
pub(crate) fn product(a: &CanonDfa, b: &CanonDfa, alphabet_len: usize) -> RawDfa {
    let mut index: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    let mut pairs = vec![(0u32, 0u32)];
    index.insert((0, 0), 0);
    let mut trans = Vec::new();
    let mut finals = Vec::new();
    let mut i = 0;
    while i < pairs.len() {
        let (p, q) = pairs[i];
        let mut row = vec![None; alphabet_len];
        for (f, slot) in row.iter_mut().enumerate() {
            let f = Feature(f as u16);
            if let (Some(p2), Some(q2)) = (a.step(p, f), b.step(q, f)) {
                let next = pairs.len() as u32;
                let id = *index.entry((p2, q2)).or_insert_with(|| {
                    pairs.push((p2, q2));
                    next
                });
                *slot = Some(id);
            }
        }
        trans.push(row);
        finals.push(a.is_final(p) && b.is_final(q));
        i += 1;
    }
    RawDfa {
        trans,
        finals,
        init: 0,
    }
}
