//! Satisfiability: derivation to solved clauses, witness graphs and model
//! checking.

mod report;

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::clause::{canonicalize, classify, Clause, Constraint, FoVar, PathVar, SimpleTerm};
use crate::lang::{Feature, LangStore};
use crate::oracle::{evaluate, FeatureGraph, Valuation};
use crate::problem::{ParseError, Problem};
use crate::rewrite::{derive_with, Control, DeriveConfig, Limits, RewriteError, Stats, Step};

pub use report::{render_records, render_text, trace_record};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error("clause is not solved")]
    NotSolved,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Sat => "sat",
            Status::Unsat => "unsat",
            Status::Unknown => "unknown",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Emit {
    Solved,
    Presolved,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    pub control: Control,
    pub emit: Emit,
    pub limits: Limits,
    pub strict_paper: bool,
    pub witness: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            control: Control::Quasi,
            emit: Emit::Solved,
            limits: Limits::default(),
            strict_paper: false,
            witness: true,
        }
    }
}

impl SolveOptions {
    pub fn with_control(control: Control) -> Self {
        SolveOptions {
            control,
            ..SolveOptions::default()
        }
    }
}

/// A model of a solved clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub graph: FeatureGraph,
    /// Node of every first-order variable, eliminated ones included.
    pub anchors: BTreeMap<FoVar, usize>,
    /// The word chosen for each path variable.
    pub words: BTreeMap<PathVar, Vec<Feature>>,
}

impl Witness {
    pub fn longest_word(&self) -> usize {
        self.words.values().map(Vec::len).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub status: Status,
    pub control: Control,
    /// Solved clauses, or pre-solved ones when those were asked for;
    /// distinct up to renaming.
    pub clauses: Vec<Clause>,
    pub witnesses: Vec<Witness>,
    pub stats: Stats,
    pub diagnostics: Vec<String>,
}

pub const LOOP_DIAGNOSTIC: &str = "loop detected; retry with --control quasi";

/// Parses and solves a problem text.
pub fn solve(text: &str, opts: &SolveOptions) -> Result<(Problem, SolveReport), SolveError> {
    let problem = Problem::parse(text)?;
    let report = solve_clause(&problem.clause(), &problem.store, opts)?;
    Ok((problem, report))
}

pub fn solve_clause(
    clause: &Clause,
    store: &LangStore,
    opts: &SolveOptions,
) -> Result<SolveReport, SolveError> {
    solve_clause_with(clause, store, opts, &mut |_| {})
}

pub fn solve_clause_with(
    clause: &Clause,
    store: &LangStore,
    opts: &SolveOptions,
    observer: &mut dyn FnMut(&Step),
) -> Result<SolveReport, SolveError> {
    let config = DeriveConfig {
        control: opts.control,
        strict_paper: opts.strict_paper,
    };
    let mut limits = opts.limits;
    limits.collect_presolved |= opts.emit == Emit::Presolved;
    let result = derive_with(clause, store, &config, &limits, observer)?;

    let mut seen = HashSet::new();
    let solved: Vec<Clause> = result
        .solutions()
        .filter(|t| seen.insert(canonicalize(&t.clause)))
        .map(|t| t.clause.clone())
        .collect();
    let mut diagnostics = Vec::new();
    let status = if !solved.is_empty() {
        Status::Sat
    } else if result.all_closed() {
        Status::Unsat
    } else {
        if result.loop_detected() {
            diagnostics.push(LOOP_DIAGNOSTIC.to_string());
        }
        if result.limit_exceeded {
            diagnostics.push(format!(
                "limit exceeded after {} steps and {} remembered clauses",
                result.stats.steps, result.stats.visited
            ));
        }
        if result
            .terminals
            .iter()
            .any(|t| t.status == crate::rewrite::BranchStatus::Irreducible && !t.solved)
        {
            diagnostics.push("derivation stopped at a clause that is not solved".to_string());
        }
        Status::Unknown
    };

    let mut witnesses = Vec::new();
    if opts.witness {
        for s in &solved {
            let w = extract_witness(s, store)?;
            if !check_model(&w, clause, store) {
                diagnostics.push("witness failed the model check".to_string());
            }
            witnesses.push(w);
        }
    }
    let clauses = match opts.emit {
        Emit::Solved => solved,
        Emit::Presolved => result.presolved,
    };
    Ok(SolveReport {
        status,
        control: opts.control,
        clauses,
        witnesses,
        stats: result.stats,
        diagnostics,
    })
}

/// Builds a feature graph from a solved clause: feature edges directly,
/// each path-variable edge as a chain labelled with the least word of its
/// restriction.
pub fn extract_witness(clause: &Clause, store: &LangStore) -> Result<Witness, SolveError> {
    if clause.is_bottom() || !classify(clause, store).solved {
        return Err(SolveError::NotSolved);
    }
    let mut graph = FeatureGraph::default();
    let mut anchors = BTreeMap::new();
    for x in clause.fo_vars() {
        anchors.insert(x, graph.add_node());
    }
    let mut words = BTreeMap::new();
    for v in clause.path_vars() {
        let l = clause
            .restriction_of(store, v)
            .map_err(RewriteError::from)?;
        words.insert(v, store.shortest_word(l).ok_or(SolveError::NotSolved)?);
    }
    for c in clause.iter() {
        match *c {
            Constraint::Sort(a, x) => {
                graph.sorts.insert(anchors[&x], a);
            }
            Constraint::Sub(x, s, y) => {
                let w = match s {
                    SimpleTerm::Feat(f) => vec![f],
                    SimpleTerm::Var(v) => words[&v].clone(),
                };
                let mut from = anchors[&x];
                for (i, &f) in w.iter().enumerate() {
                    let to = if i + 1 == w.len() {
                        anchors[&y]
                    } else {
                        graph.add_node()
                    };
                    graph.edges.insert((from, f), to);
                    from = to;
                }
            }
            _ => {}
        }
    }
    for &z in clause.bindings().keys() {
        let r = clause.resolve(z);
        let node = match anchors.get(&r) {
            Some(&n) => n,
            None => {
                let n = graph.add_node();
                anchors.insert(r, n);
                n
            }
        };
        anchors.insert(z, node);
    }
    Ok(Witness {
        graph,
        anchors,
        words,
    })
}

const WORDS_PER_VAR: usize = 64;
const WORDS_PER_STATE: usize = 4;

/// Words accepted by every automaton in `langs`, read along walks of the
/// graph from `from` to `to` (or freely when there is no edge to follow),
/// shortest first. Dead automaton states are pruned and at most a few
/// words are kept per product state.
fn accepted_walks(
    graph: &FeatureGraph,
    store: &LangStore,
    ends: Option<(usize, usize)>,
    langs: &[crate::lang::LangId],
    max_len: usize,
) -> Vec<Vec<Feature>> {
    let dfas: Vec<_> = langs.iter().map(|&l| store.dfa(l)).collect();
    let features: Vec<Feature> = store.alphabet().features().collect();
    let mut out = Vec::new();
    let mut layer: Vec<(Option<usize>, Vec<u32>, Vec<Feature>)> =
        vec![(ends.map(|e| e.0), vec![0; dfas.len()], Vec::new())];
    for _ in 0..max_len {
        let mut next = Vec::new();
        let mut width: BTreeMap<(Option<usize>, Vec<u32>), usize> = BTreeMap::new();
        for (node, qs, word) in &layer {
            for &f in &features {
                let target = match node {
                    Some(n) => match graph.edges.get(&(*n, f)) {
                        Some(&t) => Some(t),
                        None => continue,
                    },
                    None => None,
                };
                let Some(qs2) = dfas
                    .iter()
                    .zip(qs)
                    .map(|(d, &q)| d.step(q, f))
                    .collect::<Option<Vec<u32>>>()
                else {
                    continue;
                };
                let count = width.entry((target, qs2.clone())).or_insert(0);
                if *count == WORDS_PER_STATE {
                    continue;
                }
                *count += 1;
                let mut w2 = word.clone();
                w2.push(f);
                let at_end = ends.is_none_or(|(_, to)| target == Some(to));
                if at_end && dfas.iter().zip(&qs2).all(|(d, &q)| d.is_final(q)) {
                    out.push(w2.clone());
                    if out.len() == WORDS_PER_VAR {
                        return out;
                    }
                }
                next.push((target, qs2, w2));
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    out
}

/// Whether the witness graph satisfies a clause: some valuation of its path
/// variables makes every constraint valid. Candidate words follow walks
/// accepted by the restrictions, up to the length of the product of graph
/// and automata, and a bounded number per variable; a `false` answer is
/// therefore conclusive only for small instances.
pub fn check_model(w: &Witness, clause: &Clause, store: &LangStore) -> bool {
    model_valuation(w, clause, store).is_some()
}

/// The valuation that [`check_model`] found, if any.
pub fn model_valuation(w: &Witness, clause: &Clause, store: &LangStore) -> Option<Valuation> {
    if clause.is_bottom() {
        return None;
    }
    let node = |x: FoVar| {
        w.anchors
            .get(&x)
            .or_else(|| w.anchors.get(&clause.resolve(x)))
            .copied()
    };
    let mut fo = BTreeMap::new();
    for x in clause.fo_vars() {
        fo.insert(x, node(x)?);
    }
    let vars: Vec<PathVar> = clause.path_vars().into_iter().collect();
    let mut candidates: Vec<Vec<Vec<Feature>>> = Vec::new();
    for &v in &vars {
        let langs = clause.restrictions(crate::clause::PathTerm::var(v));
        let states: usize = langs.iter().map(|&l| store.dfa(l).num_states()).product();
        let ends = clause
            .edges_with(SimpleTerm::Var(v))
            .first()
            .map(|&(x, y)| (fo[&x], fo[&y]));
        let bound = w.longest_word().max(w.graph.nodes.max(1) * states) + 1;
        let words = accepted_walks(&w.graph, store, ends, &langs, bound);
        if words.is_empty() {
            return None;
        }
        candidates.push(words);
    }
    let mut pick = vec![0usize; vars.len()];
    loop {
        let val = Valuation {
            fo: fo.clone(),
            path: vars
                .iter()
                .zip(&pick)
                .enumerate()
                .map(|(i, (v, &j))| (*v, candidates[i][j].clone()))
                .collect(),
        };
        if evaluate(clause, store, &w.graph, &val) {
            return Some(val);
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
