//! The rule engine: rule schemata, controls, licensed derivations and the
//! termination measure.
//!
//! Rules come in three sets. The simplification rules normalize a clause
//! without guessing anything except for the two splitting rules (`RelD`,
//! `DecDFun`). The pre-solving rules guess the relation between two terms
//! leaving the same variable. The solving rules expand divergence constraints
//! into concrete first features. A [`Control`] fixes which rules may fire
//! while others are still applicable.

mod derive;
mod rules;
mod theta;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::clause::{ClauseError, Constraint, FoVar, PathVar, SimpleTerm};
use crate::lang::{Decomposition, Feature, LangError, LangId};

pub use derive::{
    check_admissibility_chain, derive, derive_with, BranchStatus, DerivationResult, Limits, Stats,
    Step, Terminal,
};
pub use rules::{all_instances, applicable, apply, DeriveConfig, Successor};
pub use theta::{theta, ThetaQuadruple};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error(transparent)]
    Clause(#[from] ClauseError),
    #[error(transparent)]
    Lang(#[from] LangError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RuleId {
    Join,
    Empty,
    FClash,
    SClash,
    DClash1,
    DClash2,
    Div1,
    Div2,
    DivInst,
    Triv1,
    RelD,
    Triv2,
    Eq1,
    Eq2,
    Pre,
    DecFeat,
    DecClash,
    DecDFun,
    Relate1,
    Relate2,
    Inst,
    Intro,
    Solv1,
    Solv2,
    InstEq,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum RuleSet {
    Simpl,
    Pre,
    Solve,
}

impl RuleId {
    pub fn set(self) -> RuleSet {
        use RuleId::*;
        match self {
            Relate1 | Relate2 => RuleSet::Pre,
            Inst | Intro | Solv1 | Solv2 | InstEq => RuleSet::Solve,
            _ => RuleSet::Simpl,
        }
    }

    /// Priority inside the simplification rules: clashes, then
    /// decomposition and divergence handling, then `Pre`, then `RelD`.
    fn simpl_level(self) -> u8 {
        use RuleId::*;
        match self {
            Empty | FClash | SClash | DClash1 | DClash2 | DecClash => 0,
            Pre => 2,
            RelD => 3,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        use RuleId::*;
        match self {
            Join => "Join",
            Empty => "Empty",
            FClash => "FClash",
            SClash => "SClash",
            DClash1 => "DClash1",
            DClash2 => "DClash2",
            Div1 => "Div1",
            Div2 => "Div2",
            DivInst => "DivInst",
            Triv1 => "Triv1",
            RelD => "RelD",
            Triv2 => "Triv2",
            Eq1 => "Eq1",
            Eq2 => "Eq2",
            Pre => "Pre",
            DecFeat => "DecFeat",
            DecClash => "DecClash",
            DecDFun => "DecDFun",
            Relate1 => "Relate1",
            Relate2 => "Relate2",
            Inst => "Inst",
            Intro => "Intro",
            Solv1 => "Solv1",
            Solv2 => "Solv2",
            InstEq => "InstEq",
        }
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Order in which rule sets are tried. All controls run the simplification
/// rules first.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Control {
    /// Simplification before everything else; pre-solving and solving
    /// unordered. Cycles are caught by an occurs check.
    Basic,
    /// Basic, plus pre-solving before solving. Revisited clauses are pruned.
    Quasi,
    /// Basic, plus solving before pre-solving. Revisited clauses are pruned.
    Km,
    /// Basic, plus: a divergence whose solving has at most `delay_threshold`
    /// feature-pair choices is solved at once; larger ones wait until
    /// pre-solving is done.
    Heuristic { delay_threshold: usize },
}

impl Control {
    /// Whether derivations under this control use the occurs check (as
    /// opposed to memoizing visited clauses).
    pub fn uses_occurs_check(self) -> bool {
        matches!(self, Control::Basic | Control::Heuristic { .. })
    }

    pub fn name(self) -> &'static str {
        match self {
            Control::Basic => "basic",
            Control::Quasi => "quasi",
            Control::Km => "km",
            Control::Heuristic { .. } => "heuristic",
        }
    }
}

/// Relation guessed by `RelD`, `Relate1` and `Relate2`, read as
/// `left R right` for the ordered pair stored in the redex.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum RelChoice {
    Equal,
    /// left ≻̇ right
    Above,
    /// left ≺̇ right
    Below,
    Diverge,
}

/// How a diverging path variable continues after its first feature `f`:
/// either `f ≺̇ μ` (strictly longer) or `μ = f`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Continuation {
    Longer,
    Exact,
}

/// One branch parameter of a rule instance.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Choice {
    Deterministic,
    Relation(RelChoice),
    Decomp(Decomposition),
    /// `Inst`/`InstEq`: the first feature of the path variable.
    First {
        g: Feature,
        how: Continuation,
    },
    /// `Solv1`/`Solv2`: first features after the common prefix.
    Pair {
        common_prefix: bool,
        f: Feature,
        g: Feature,
        mu: Continuation,
        nu: Continuation,
    },
}

impl Choice {
    /// The rule a branch is reported under (splits `Solve` and `Inst`).
    pub fn branch_rule(&self, rule: RuleId) -> RuleId {
        match *self {
            Choice::First {
                how: Continuation::Exact,
                ..
            } => RuleId::InstEq,
            Choice::Pair {
                common_prefix: true,
                ..
            } => RuleId::Solv2,
            Choice::Pair { mu, nu, .. }
                if mu == Continuation::Exact || nu == Continuation::Exact =>
            {
                RuleId::InstEq
            }
            Choice::Pair { .. } => RuleId::Solv1,
            _ => rule,
        }
    }
}

/// The matched part of a clause for one rule instance.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Redex {
    /// A single constraint that is rewritten, removed, or signals `⊥`.
    One(Constraint),
    /// Two constraints (Join, SClash, Div2, Eq1).
    Two(Constraint, Constraint),
    Eq2 {
        eq: Constraint,
        mu: PathVar,
        s: SimpleTerm,
        x: FoVar,
        y: FoVar,
        z: FoVar,
    },
    Pre {
        prefix: Constraint,
        s: SimpleTerm,
        mu: PathVar,
        x: FoVar,
        y: FoVar,
        z: FoVar,
    },
    /// Two unrelated terms leaving `x`.
    Relate {
        x: FoVar,
        s: SimpleTerm,
        t: SimpleTerm,
    },
    Intro {
        prefix: Constraint,
        f: Feature,
        mu: PathVar,
        x: FoVar,
    },
    Solve {
        div: Constraint,
        mu: PathVar,
        nu: PathVar,
        lmu: LangId,
        lnu: LangId,
    },
}

/// A rule together with its match and all of its branch parameters.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RuleInstance {
    pub rule: RuleId,
    pub redex: Redex,
    pub choices: Vec<Choice>,
}

impl RuleInstance {
    /// Number of distinct feature pairs among `Solve` choices, or the number
    /// of first-feature choices for `Inst`.
    pub fn parameterizations(&self) -> usize {
        let mut seen = std::collections::BTreeSet::new();
        for c in &self.choices {
            match *c {
                Choice::Pair {
                    common_prefix,
                    f,
                    g,
                    ..
                } => {
                    seen.insert((common_prefix, f.0, g.0));
                }
                Choice::First { g, .. } => {
                    seen.insert((false, g.0, g.0));
                }
                _ => {}
            }
        }
        seen.len()
    }
}
