//! Instances, action profiles, contracts, validation and process classes.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::num::{dot, sum, zeros, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InitialAction {
    pub name: String,
    pub cost: Rational,
    /// Probability of reaching each intermediate state.
    pub transition: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalAction {
    pub name: String,
    pub cost: Rational,
    /// Probability of each outcome.
    pub outcome_dist: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub name: String,
    pub final_actions: Vec<FinalAction>,
}

/// A two-stage delegation process.
///
/// States may offer different numbers of final actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub rewards: Vec<Rational>,
    pub initial_actions: Vec<InitialAction>,
    pub states: Vec<State>,
}

impl Instance {
    pub fn num_outcomes(&self) -> usize {
        self.rewards.len()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_initial(&self) -> usize {
        self.initial_actions.len()
    }

    /// Largest final-action count over all states.
    pub fn max_final_count(&self) -> usize {
        self.states
            .iter()
            .map(|s| s.final_actions.len())
            .max()
            .unwrap_or(0)
    }

    pub fn final_counts(&self) -> Vec<usize> {
        self.states.iter().map(|s| s.final_actions.len()).collect()
    }

    pub fn final_action(&self, state: usize, action: usize) -> Result<&FinalAction, Error> {
        let st = self.states.get(state).ok_or(Error::IndexOutOfRange {
            what: "state",
            index: state,
            len: self.states.len(),
        })?;
        st.final_actions.get(action).ok_or(Error::IndexOutOfRange {
            what: "final action",
            index: action,
            len: st.final_actions.len(),
        })
    }

    pub fn initial_action(&self, action: usize) -> Result<&InitialAction, Error> {
        self.initial_actions
            .get(action)
            .ok_or(Error::IndexOutOfRange {
                what: "initial action",
                index: action,
                len: self.initial_actions.len(),
            })
    }

    /// Expected reward of final action `action` at `state`.
    pub fn expected_state_reward(&self, state: usize, action: usize) -> Result<Rational, Error> {
        let fa = self.final_action(state, action)?;
        Ok(dot(&fa.outcome_dist, &self.rewards))
    }

    /// Expected reward of every final action, indexed `[state][action]`.
    pub fn state_reward_table(&self) -> Vec<Vec<Rational>> {
        self.states
            .iter()
            .map(|st| {
                st.final_actions
                    .iter()
                    .map(|fa| dot(&fa.outcome_dist, &self.rewards))
                    .collect()
            })
            .collect()
    }

    pub fn has_negative_reward(&self) -> Option<usize> {
        self.rewards.iter().position(|r| r.is_negative())
    }
}

/// One initial action plus a final action per state. `finals[s]` is `None`
/// only for states a terminate-halfway contract stops at.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionProfile {
    pub initial: usize,
    pub finals: Vec<Option<usize>>,
}

impl ActionProfile {
    pub fn total(initial: usize, finals: &[usize]) -> Self {
        ActionProfile {
            initial,
            finals: finals.iter().copied().map(Some).collect(),
        }
    }

    pub fn is_total(&self) -> bool {
        self.finals.iter().all(Option::is_some)
    }

    pub fn check(&self, instance: &Instance) -> Result<(), Error> {
        instance.initial_action(self.initial)?;
        if self.finals.len() != instance.num_states() {
            return Err(Error::DimensionMismatch {
                what: "profile finals",
                expected: instance.num_states(),
                found: self.finals.len(),
            });
        }
        for (s, j) in self.finals.iter().enumerate() {
            if let Some(j) = j {
                instance.final_action(s, *j)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for ActionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{};", self.initial)?;
        for (k, j) in self.finals.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            match j {
                Some(j) => write!(f, "{j}")?,
                None => f.write_str("-")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Contract {
    /// Transfer `t[m]` on outcome `m`.
    Standard { t: Vec<Rational> },
    /// Transfer `alpha * r[m]` on outcome `m`.
    Linear { alpha: Rational },
    /// Transfer `s[state]` on reaching a state, plus `t[m]` on outcome `m`.
    PayHalfway { s: Vec<Rational>, t: Vec<Rational> },
    /// Outcome transfers; the process ends with zero payoffs at `terminate_set`.
    TerminateHalfway {
        t: Vec<Rational>,
        terminate_set: BTreeSet<usize>,
    },
}

impl Contract {
    pub fn kind(&self) -> &'static str {
        match self {
            Contract::Standard { .. } => "standard",
            Contract::Linear { .. } => "linear",
            Contract::PayHalfway { .. } => "pay_halfway",
            Contract::TerminateHalfway { .. } => "terminate_halfway",
        }
    }

    pub fn zero_standard(instance: &Instance) -> Self {
        Contract::Standard {
            t: zeros(instance.num_outcomes()),
        }
    }

    /// Checks dimensions and signs against `instance` and flattens the
    /// contract into outcome transfers, state transfers and a stop mask.
    pub fn resolve(&self, instance: &Instance) -> Result<ResolvedContract, Error> {
        let m = instance.num_outcomes();
        let n_states = instance.num_states();
        let check_vec = |what: &'static str, v: &[Rational], len: usize| -> Result<(), Error> {
            if v.len() != len {
                return Err(Error::DimensionMismatch {
                    what,
                    expected: len,
                    found: v.len(),
                });
            }
            if let Some(k) = v.iter().position(|x| x.is_negative()) {
                return Err(Error::InvalidContract(alloc::format!(
                    "{what}[{k}] is negative"
                )));
            }
            Ok(())
        };
        let mut resolved = ResolvedContract {
            outcome_transfer: Vec::new(),
            state_transfer: zeros(n_states),
            terminated: alloc::vec![false; n_states],
        };
        match self {
            Contract::Standard { t } => {
                check_vec("t", t, m)?;
                resolved.outcome_transfer = t.clone();
            }
            Contract::Linear { alpha } => {
                if alpha.is_negative() || *alpha > Rational::one() {
                    return Err(Error::InvalidContract("alpha must lie in [0, 1]".into()));
                }
                if let Some(outcome) = instance.has_negative_reward() {
                    return Err(Error::NegativeReward { outcome });
                }
                resolved.outcome_transfer = instance.rewards.iter().map(|r| alpha * r).collect();
            }
            Contract::PayHalfway { s, t } => {
                check_vec("s", s, n_states)?;
                check_vec("t", t, m)?;
                resolved.outcome_transfer = t.clone();
                resolved.state_transfer = s.clone();
            }
            Contract::TerminateHalfway { t, terminate_set } => {
                check_vec("t", t, m)?;
                for &s in terminate_set {
                    if s >= n_states {
                        return Err(Error::IndexOutOfRange {
                            what: "terminate state",
                            index: s,
                            len: n_states,
                        });
                    }
                    resolved.terminated[s] = true;
                }
                resolved.outcome_transfer = t.clone();
            }
        }
        Ok(resolved)
    }
}

/// A contract reduced to its three ingredients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedContract {
    pub outcome_transfer: Vec<Rational>,
    pub state_transfer: Vec<Rational>,
    pub terminated: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ViolationRule {
    NoOutcomes,
    NoStates,
    NoInitialActions,
    StateWithoutActions,
    LengthMismatch,
    ProbabilityOutOfRange,
    DistributionSum,
    NegativeCost,
    MissingNullInitial,
    MissingNullFinal,
}

impl ViolationRule {
    pub fn message(self) -> &'static str {
        match self {
            ViolationRule::NoOutcomes => "instance has no outcomes",
            ViolationRule::NoStates => "instance has no intermediate states",
            ViolationRule::NoInitialActions => "instance has no initial actions",
            ViolationRule::StateWithoutActions => "state has no final actions",
            ViolationRule::LengthMismatch => "distribution has the wrong length",
            ViolationRule::ProbabilityOutOfRange => "probability outside [0, 1]",
            ViolationRule::DistributionSum => "distribution does not sum to 1",
            ViolationRule::NegativeCost => "negative cost",
            ViolationRule::MissingNullInitial => "missing null initial action",
            ViolationRule::MissingNullFinal => "missing null final action",
        }
    }
}

/// A broken instance rule. `initial` or `state`/`action` locate it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: ViolationRule,
    pub initial: Option<usize>,
    pub state: Option<usize>,
    pub action: Option<usize>,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.rule.message())?;
        if let Some(i) = self.initial {
            write!(f, " (initial action {i})")?;
        }
        match (self.state, self.action) {
            (Some(s), Some(j)) => write!(f, " (state {s}, final action {j})"),
            (Some(s), None) => write!(f, " (state {s})"),
            _ => Ok(()),
        }
    }
}

fn check_distribution(dist: &[Rational], len: usize, out: &mut Vec<ViolationRule>) {
    if dist.len() != len {
        out.push(ViolationRule::LengthMismatch);
        return;
    }
    if dist.iter().any(|p| p.is_negative() || *p > Rational::one()) {
        out.push(ViolationRule::ProbabilityOutOfRange);
    }
    if !sum(dist).is_one() {
        out.push(ViolationRule::DistributionSum);
    }
}

/// Every broken rule of `instance`; empty means valid.
pub fn validate(instance: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();
    let global = |rule| Violation {
        rule,
        initial: None,
        state: None,
        action: None,
    };
    let m = instance.num_outcomes();
    let n_states = instance.num_states();
    if m == 0 {
        out.push(global(ViolationRule::NoOutcomes));
    }
    if n_states == 0 {
        out.push(global(ViolationRule::NoStates));
    }
    if instance.initial_actions.is_empty() {
        out.push(global(ViolationRule::NoInitialActions));
    }

    let mut rules = Vec::new();
    for (i, ia) in instance.initial_actions.iter().enumerate() {
        rules.clear();
        if ia.cost.is_negative() {
            rules.push(ViolationRule::NegativeCost);
        }
        check_distribution(&ia.transition, n_states, &mut rules);
        out.extend(rules.iter().map(|&rule| Violation {
            rule,
            initial: Some(i),
            state: None,
            action: None,
        }));
    }
    if !instance.initial_actions.is_empty()
        && !instance.initial_actions.iter().any(|a| a.cost.is_zero())
    {
        out.push(global(ViolationRule::MissingNullInitial));
    }

    for (s, st) in instance.states.iter().enumerate() {
        if st.final_actions.is_empty() {
            out.push(Violation {
                rule: ViolationRule::StateWithoutActions,
                initial: None,
                state: Some(s),
                action: None,
            });
            continue;
        }
        for (j, fa) in st.final_actions.iter().enumerate() {
            rules.clear();
            if fa.cost.is_negative() {
                rules.push(ViolationRule::NegativeCost);
            }
            check_distribution(&fa.outcome_dist, m, &mut rules);
            out.extend(rules.iter().map(|&rule| Violation {
                rule,
                initial: None,
                state: Some(s),
                action: Some(j),
            }));
        }
        if !st.final_actions.iter().any(|a| a.cost.is_zero()) {
            out.push(Violation {
                rule: ViolationRule::MissingNullFinal,
                initial: None,
                state: Some(s),
                action: None,
            });
        }
    }
    out
}

/// Structural flags of a process. Several can hold at once.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProcessClass {
    /// Every outcome is reachable from at most one state.
    pub is_tree: bool,
    /// Exactly one initial action.
    pub is_stochastic_first_stage: bool,
    /// Every initial action reaches a single state with certainty.
    pub is_deterministic_first_stage: bool,
}

impl ProcessClass {
    pub fn is_general(&self) -> bool {
        !(self.is_tree || self.is_stochastic_first_stage || self.is_deterministic_first_stage)
    }

    /// `"general"` or the holding flags joined by `+`.
    pub fn label(&self) -> String {
        if self.is_general() {
            return "general".into();
        }
        let mut parts = Vec::new();
        if self.is_tree {
            parts.push("tree");
        }
        if self.is_stochastic_first_stage {
            parts.push("stochastic_first_stage");
        }
        if self.is_deterministic_first_stage {
            parts.push("deterministic_first_stage");
        }
        parts.join("+")
    }
}

pub fn classify(instance: &Instance) -> ProcessClass {
    let is_tree = (0..instance.num_outcomes()).all(|m| {
        instance
            .states
            .iter()
            .filter(|st| {
                st.final_actions
                    .iter()
                    .any(|fa| !fa.outcome_dist[m].is_zero())
            })
            .count()
            <= 1
    });
    let is_deterministic_first_stage = instance.initial_actions.iter().all(|ia| {
        ia.transition.iter().filter(|p| p.is_one()).count() == 1
            && ia.transition.iter().filter(|p| !p.is_zero()).count() == 1
    });
    ProcessClass {
        is_tree,
        is_stochastic_first_stage: instance.num_initial() == 1,
        is_deterministic_first_stage,
    }
}

/// The state reached with certainty by each initial action, for
/// deterministic first-stage processes.
pub fn deterministic_targets(instance: &Instance) -> Option<Vec<usize>> {
    instance
        .initial_actions
        .iter()
        .map(|ia| {
            let pos = ia.transition.iter().position(|p| p.is_one())?;
            ia.transition
                .iter()
                .enumerate()
                .all(|(s, p)| s == pos || p.is_zero())
                .then_some(pos)
        })
        .collect()
}
