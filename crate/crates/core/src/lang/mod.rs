//! Regular path languages.
//!
//! Every language is admitted into a [`LangStore`] as a canonical minimal DFA
//! with the empty word removed, so two [`LangId`]s are equal exactly when
//! their languages are. The store also provides the operations the
//! simplification rules need: intersection, left quotient by a feature and
//! the state-based prefix/suffix decomposition.

mod dfa;
mod regex;
mod render;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use thiserror::Error;

pub use dfa::CanonDfa;
pub use regex::RegexAst;

/// Default bound on the number of distinct languages in a store.
pub const DEFAULT_LANG_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("decomposition of the empty language")]
    EmptyLanguage,
    #[error("language store limit of {0} distinct languages exceeded")]
    CapExceeded(usize),
    #[error("regex syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
}

/// A feature, as an index into the (sorted) alphabet of its store.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Feature(pub u16);

impl Feature {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The finite feature alphabet, sorted by name so that feature order is
/// lexicographic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = names.into_iter().map(Into::into).collect();
        Alphabet {
            names: set.into_iter().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn feature(&self, name: &str) -> Option<Feature> {
        self.names
            .binary_search_by(|n| n.as_str().cmp(name))
            .ok()
            .map(|i| Feature(i as u16))
    }

    pub fn name(&self, f: Feature) -> &str {
        &self.names[f.index()]
    }

    pub fn features(&self) -> impl Iterator<Item = Feature> {
        (0..self.names.len() as u16).map(Feature)
    }
}

/// Handle to a canonical language in a [`LangStore`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LangId(pub u32);

impl fmt::Display for LangId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.0)
    }
}

/// A prefix/suffix split of a language.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Decomposition {
    pub prefix: LangId,
    pub suffix: LangId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LangProps {
    pub is_empty: bool,
    /// Every word has length one (vacuously true for the empty language).
    pub all_words_len1: bool,
    /// Features `f` with the one-symbol word `f` in the language.
    pub singletons: BTreeSet<Feature>,
}

impl LangProps {
    pub fn contains(&self, f: Feature) -> bool {
        self.singletons.contains(&f)
    }
}

#[derive(Default)]
struct StoreInner {
    dfas: Vec<Arc<CanonDfa>>,
    index: HashMap<Arc<CanonDfa>, LangId>,
    intersections: HashMap<(LangId, LangId), LangId>,
    quotients: HashMap<(Feature, LangId), LangId>,
    decompositions: HashMap<LangId, Arc<Vec<Decomposition>>>,
}

/// Append-only registry of canonical languages. Admission is an atomic
/// check-or-insert, so the store can be shared between threads.
pub struct LangStore {
    alphabet: Alphabet,
    cap: usize,
    inner: Mutex<StoreInner>,
}

impl fmt::Debug for LangStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LangStore")
            .field("alphabet", &self.alphabet)
            .field("len", &self.len())
            .finish()
    }
}

impl LangStore {
    pub fn new(alphabet: Alphabet) -> Self {
        Self::with_cap(alphabet, DEFAULT_LANG_CAP)
    }

    pub fn with_cap(alphabet: Alphabet, cap: usize) -> Self {
        LangStore {
            alphabet,
            cap,
            inner: Mutex::new(StoreInner::default()),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().dfas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dfa(&self, id: LangId) -> Arc<CanonDfa> {
        self.inner.lock().unwrap().dfas[id.0 as usize].clone()
    }

    fn admit_canon(&self, dfa: CanonDfa) -> Result<LangId, LangError> {
        let mut inner = self.inner.lock().unwrap();
        if let Some(id) = inner.index.get(&dfa) {
            return Ok(*id);
        }
        if inner.dfas.len() >= self.cap {
            return Err(LangError::CapExceeded(self.cap));
        }
        let id = LangId(inner.dfas.len() as u32);
        let dfa = Arc::new(dfa);
        inner.dfas.push(dfa.clone());
        inner.index.insert(dfa, id);
        Ok(id)
    }

    fn admit(&self, raw: dfa::RawDfa) -> Result<LangId, LangError> {
        self.admit_canon(raw.canonicalize(self.alphabet.len()))
    }

    /// Compiles a regular expression; the stored language is `⟦ast⟧ ∩ F⁺`.
    pub fn compile(&self, ast: &RegexAst) -> Result<LangId, LangError> {
        let raw = regex::to_raw_dfa(ast, &self.alphabet)?;
        self.admit(raw)
    }

    /// Parses and compiles regex text.
    pub fn compile_str(&self, text: &str) -> Result<LangId, LangError> {
        self.compile(&RegexAst::parse(text)?)
    }

    pub fn empty(&self) -> LangId {
        self.admit_canon(CanonDfa::empty(self.alphabet.len()))
            .expect("the empty language fits any store")
    }

    /// `F⁺`, the language of an unrestricted path variable.
    pub fn universal(&self) -> Result<LangId, LangError> {
        let ast = self
            .alphabet
            .names
            .iter()
            .map(|n| RegexAst::feature(n))
            .reduce(RegexAst::union)
            .map(RegexAst::plus)
            .unwrap_or(RegexAst::Empty);
        self.compile(&ast)
    }

    /// The language `{f}`.
    pub fn singleton(&self, f: Feature) -> Result<LangId, LangError> {
        self.compile(&RegexAst::feature(self.alphabet.name(f)))
    }

    pub fn member(&self, lang: LangId, word: &[Feature]) -> bool {
        self.dfa(lang).accepts(word)
    }

    pub fn intersect(&self, a: LangId, b: LangId) -> Result<LangId, LangError> {
        if a == b {
            return Ok(a);
        }
        let key = (a.min(b), a.max(b));
        if let Some(id) = self.inner.lock().unwrap().intersections.get(&key) {
            return Ok(*id);
        }
        let raw = dfa::product(&self.dfa(a), &self.dfa(b), self.alphabet.len());
        let id = self.admit(raw)?;
        self.inner.lock().unwrap().intersections.insert(key, id);
        Ok(id)
    }

    /// `{w ≠ ε | f·w ∈ L}`.
    pub fn quotient(&self, f: Feature, lang: LangId) -> Result<LangId, LangError> {
        if let Some(id) = self.inner.lock().unwrap().quotients.get(&(f, lang)) {
            return Ok(*id);
        }
        let dfa = self.dfa(lang);
        let id = match dfa.step(0, f) {
            Some(q) => self.admit(dfa.rerooted(q))?,
            None => self.empty(),
        };
        self.inner.lock().unwrap().quotients.insert((f, lang), id);
        Ok(id)
    }

    /// Features that start some word of the language.
    pub fn first_features(&self, lang: LangId) -> BTreeSet<Feature> {
        self.dfa(lang).edges(0).map(|(f, _)| f).collect()
    }

    /// Features `f` such that some word `u·f·w` with `u ≠ ε` is in the
    /// language, i.e. the features that can follow a non-empty prefix.
    pub fn inner_features(&self, lang: LangId) -> BTreeSet<Feature> {
        let dfa = self.dfa(lang);
        let targets: BTreeSet<u32> = (0..dfa.num_states() as u32)
            .flat_map(|q| dfa.edges(q).map(|(_, t)| t).collect::<Vec<_>>())
            .collect();
        targets
            .into_iter()
            .flat_map(|q| dfa.edges(q).map(|(f, _)| f).collect::<Vec<_>>())
            .collect()
    }

    pub fn props(&self, lang: LangId) -> LangProps {
        let dfa = self.dfa(lang);
        let is_empty = dfa.is_empty();
        let mut all_words_len1 = true;
        let mut singletons = BTreeSet::new();
        for (f, q) in dfa.edges(0) {
            if dfa.is_final(q) {
                singletons.insert(f);
            }
            // trimmed: any outgoing edge leads to a longer accepted word
            if dfa.edges(q).next().is_some() {
                all_words_len1 = false;
            }
        }
        LangProps {
            is_empty,
            all_words_len1,
            singletons,
        }
    }

    pub fn is_empty_lang(&self, lang: LangId) -> bool {
        self.dfa(lang).is_empty()
    }

    /// State-based decomposition: for every state `q` of the minimal DFA,
    /// the pair (words reaching `q`, words leading from `q` to acceptance),
    /// both without the empty word. Pairs with an empty side are dropped.
    pub fn dfun(&self, lang: LangId) -> Result<Arc<Vec<Decomposition>>, LangError> {
        if let Some(d) = self.inner.lock().unwrap().decompositions.get(&lang) {
            return Ok(d.clone());
        }
        let dfa = self.dfa(lang);
        if dfa.is_empty() {
            return Err(LangError::EmptyLanguage);
        }
        let mut out = BTreeSet::new();
        for q in 0..dfa.num_states() as u32 {
            let prefix = self.admit(dfa.refinaled(q))?;
            let suffix = self.admit(dfa.rerooted(q))?;
            if !self.is_empty_lang(prefix) && !self.is_empty_lang(suffix) {
                out.insert(Decomposition { prefix, suffix });
            }
        }
        let out = Arc::new(out.into_iter().collect::<Vec<_>>());
        self.inner
            .lock()
            .unwrap()
            .decompositions
            .insert(lang, out.clone());
        Ok(out)
    }

    pub fn shortest_word(&self, lang: LangId) -> Option<Vec<Feature>> {
        self.dfa(lang).shortest_word()
    }

    pub fn words_up_to(&self, lang: LangId, max_len: usize) -> Vec<Vec<Feature>> {
        self.dfa(lang).words_up_to(max_len)
    }

    /// Readable regular expression for the language.
    pub fn to_regex(&self, lang: LangId) -> String {
        render::to_regex(&self.dfa(lang), &self.alphabet)
    }

    pub fn word_to_string(&self, word: &[Feature]) -> String {
        word.iter()
            .map(|f| self.alphabet.name(*f))
            .collect::<Vec<_>>()
            .join(".")
    }
}
