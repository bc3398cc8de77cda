//! Depth-first exploration of all licensed derivations from a clause.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use super::rules::{applicable, apply, DeriveConfig, Successor};
use super::theta::{theta, ThetaQuadruple};
use super::{RewriteError, RuleInstance, RuleSet};
use crate::clause::{admissibility_violations, canonicalize, classify, Clause};
use crate::lang::LangStore;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_steps: usize,
    /// Bound on remembered clauses under the memoizing controls.
    pub max_visited: usize,
    /// Stop at the first solved clause other than `⊥`.
    pub first_solution: bool,
    /// Check the termination measure and admissibility on every step.
    pub debug_checks: bool,
    /// Collect the pre-solved clauses met along the way.
    pub collect_presolved: bool,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_steps: 100_000,
            max_visited: 10_000,
            first_solution: false,
            debug_checks: false,
            collect_presolved: false,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchStatus {
    /// No rule applies.
    Irreducible,
    Bottom,
    /// The occurs check fired.
    LoopDetected,
    LimitExceeded,
}

#[derive(Clone, Debug)]
pub struct Terminal {
    pub node: usize,
    pub clause: Clause,
    pub status: BranchStatus,
    /// Irreducible and solved.
    pub solved: bool,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Stats {
    pub steps: usize,
    pub simpl_steps: usize,
    pub nodes: usize,
    pub visited: usize,
    pub pruned_revisits: usize,
    pub max_theta: Option<ThetaQuadruple>,
    pub theta_violations: usize,
    /// Simplification steps that moved an edge onto a cycle; the measure
    /// is not required to decrease on them.
    pub theta_unchecked: usize,
    pub admissibility_violations: usize,
    pub rule_counts: BTreeMap<String, usize>,
}

/// One rule application, as seen by an observer.
pub struct Step<'a> {
    pub node: usize,
    pub parent: Option<usize>,
    pub before: &'a Clause,
    pub instance: &'a RuleInstance,
    /// Each branch with the node id it was given, or `None` when it was
    /// pruned as a revisit or closed by the occurs check.
    pub successors: &'a [(Option<usize>, Successor)],
}

#[derive(Clone, Debug, Default)]
pub struct DerivationResult {
    pub terminals: Vec<Terminal>,
    pub presolved: Vec<Clause>,
    pub stats: Stats,
    pub limit_exceeded: bool,
}

impl DerivationResult {
    pub fn solutions(&self) -> impl Iterator<Item = &Terminal> {
        self.terminals
            .iter()
            .filter(|t| t.solved && !t.clause.is_bottom())
    }

    pub fn loop_detected(&self) -> bool {
        self.terminals
            .iter()
            .any(|t| t.status == BranchStatus::LoopDetected)
    }

    /// Every branch ended in `⊥` or was pruned as a revisit.
    pub fn all_closed(&self) -> bool {
        !self.limit_exceeded
            && self
                .terminals
                .iter()
                .all(|t| t.status == BranchStatus::Bottom)
    }
}

pub fn derive(
    clause: &Clause,
    store: &LangStore,
    config: &DeriveConfig,
    limits: &Limits,
) -> Result<DerivationResult, RewriteError> {
    derive_with(clause, store, config, limits, &mut |_| {})
}

pub fn derive_with(
    clause: &Clause,
    store: &LangStore,
    config: &DeriveConfig,
    limits: &Limits,
    observer: &mut dyn FnMut(&Step),
) -> Result<DerivationResult, RewriteError> {
    let memoize = !config.control.uses_occurs_check();
    let mut result = DerivationResult::default();
    let mut visited: HashSet<String> = HashSet::new();
    let mut presolved_seen: HashSet<String> = HashSet::new();
    if memoize {
        visited.insert(canonicalize(clause));
    }
    let mut stack: Vec<(usize, Option<usize>, Clause)> = vec![(0, None, clause.clone())];
    let mut next_node = 1;

    while let Some((node, parent, current)) = stack.pop() {
        if current.is_bottom() {
            result.terminals.push(Terminal {
                node,
                clause: current,
                status: BranchStatus::Bottom,
                solved: true,
            });
            continue;
        }
        if result.stats.steps >= limits.max_steps || (memoize && visited.len() > limits.max_visited)
        {
            result.limit_exceeded = true;
            result.terminals.push(Terminal {
                node,
                clause: current,
                status: BranchStatus::LimitExceeded,
                solved: false,
            });
            for (node, _, clause) in stack.drain(..) {
                result.terminals.push(Terminal {
                    node,
                    clause,
                    status: BranchStatus::LimitExceeded,
                    solved: false,
                });
            }
            break;
        }
        let instances = applicable(&current, store, config)?;
        let Some(instance) = instances.into_iter().next() else {
            let solved = classify(&current, store).solved;
            result.terminals.push(Terminal {
                node,
                clause: current,
                status: BranchStatus::Irreducible,
                solved,
            });
            if solved && limits.first_solution {
                break;
            }
            continue;
        };

        if limits.collect_presolved
            && instance.rule.set() == RuleSet::Solve
            && classify(&current, store).presolved
            && presolved_seen.insert(canonicalize(&current))
        {
            result.presolved.push(current.clone());
        }

        let successors = apply(&current, store, &instance)?;
        result.stats.steps += 1;
        *result
            .stats
            .rule_counts
            .entry(instance.rule.name().to_string())
            .or_insert(0) += 1;
        let is_simpl = instance.rule.set() == RuleSet::Simpl;
        let before_theta = if limits.debug_checks || is_simpl {
            Some(theta(&current))
        } else {
            None
        };
        if is_simpl {
            result.stats.simpl_steps += 1;
        }
        if let Some(t) = before_theta {
            if result.stats.max_theta.is_none_or(|m| t > m) {
                result.stats.max_theta = Some(t);
            }
        }

        let mut placed: Vec<(Option<usize>, Successor)> = Vec::with_capacity(successors.len());
        let mut loops = Vec::new();
        for succ in successors {
            if limits.debug_checks && !succ.clause.is_bottom() {
                if is_simpl && succ.cycle {
                    result.stats.theta_unchecked += 1;
                } else if is_simpl && before_theta.is_some_and(|b| theta(&succ.clause) >= b) {
                    result.stats.theta_violations += 1;
                }
                if !admissibility_violations(&succ.clause).is_empty() {
                    result.stats.admissibility_violations += 1;
                }
            }
            if succ.cycle && config.control.uses_occurs_check() {
                loops.push(succ.clause.clone());
                placed.push((None, succ));
                continue;
            }
            if memoize && !succ.clause.is_bottom() && !visited.insert(canonicalize(&succ.clause)) {
                result.stats.pruned_revisits += 1;
                placed.push((None, succ));
                continue;
            }
            placed.push((Some(next_node), succ));
            next_node += 1;
        }
        observer(&Step {
            node,
            parent,
            before: &current,
            instance: &instance,
            successors: &placed,
        });
        for clause in loops {
            result.terminals.push(Terminal {
                node,
                clause,
                status: BranchStatus::LoopDetected,
                solved: false,
            });
        }
        for (id, succ) in placed.into_iter().rev() {
            if let Some(id) = id {
                stack.push((id, Some(node), succ.clause));
            }
        }
    }
    result.stats.nodes = next_node;
    result.stats.visited = visited.len();
    Ok(result)
}

/// Runs a derivation and reports every derivative (the input included)
/// that violates admissibility, with the names of the violated conditions.
pub fn check_admissibility_chain(
    clause: &Clause,
    store: &LangStore,
    config: &DeriveConfig,
    limits: &Limits,
) -> Result<Vec<(Clause, Vec<&'static str>)>, RewriteError> {
    let mut bad = Vec::new();
    let v = admissibility_violations(clause);
    if !v.is_empty() {
        bad.push((clause.clone(), v));
    }
    derive_with(clause, store, config, limits, &mut |step| {
        for (_, succ) in step.successors {
            let v = admissibility_violations(&succ.clause);
            if !v.is_empty() {
                bad.push((succ.clause.clone(), v));
            }
        }
    })?;
    Ok(bad)
}
