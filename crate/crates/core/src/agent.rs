//! Agent behaviour under a fixed contract.
//!
//! The agent solves the process backwards: at every surviving state it
//! takes a utility-maximising final action, then it takes a
//! utility-maximising initial action given those continuation values. Ties
//! go to the principal, and remaining ties go to the lowest action index.
//!
//! Choosing finals greedily per state and then the initial action is
//! globally principal-optimal among agent-optimal profiles: tied final
//! actions give the same continuation utility, so the agent's set of optimal
//! initial actions does not depend on which of them is picked.

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::Zero;

use crate::error::Error;
use crate::model::{ActionProfile, Contract, Instance, ResolvedContract};
use crate::num::{dot, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponse {
    /// `finals[s]` is `None` exactly at terminated states.
    pub profile: ActionProfile,
    pub agent_utility: Rational,
    pub expected_payment: Rational,
    pub principal_profit: Rational,
    /// Continuation utility at each state, zero at terminated states. Does
    /// not include state transfers.
    pub per_state_utility: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProfileValue {
    pub agent_utility: Rational,
    pub expected_payment: Rational,
    pub principal_profit: Rational,
}

/// Per-state quantities of one final action under a contract.
struct FinalTerms {
    utility: Rational,
    payment: Rational,
    profit: Rational,
}

fn final_terms(
    instance: &Instance,
    terms: &ResolvedContract,
    state: usize,
    action: usize,
) -> FinalTerms {
    let fa = &instance.states[state].final_actions[action];
    let payment = dot(&fa.outcome_dist, &terms.outcome_transfer);
    let reward = dot(&fa.outcome_dist, &instance.rewards);
    FinalTerms {
        utility: &payment - &fa.cost,
        profit: reward - &payment,
        payment,
    }
}

/// `true` when `(u, p)` beats the incumbent: higher utility, then higher
/// principal profit. Equal keys keep the earlier (lower-index) incumbent.
fn beats(u: &Rational, p: &Rational, best_u: &Rational, best_p: &Rational) -> bool {
    match u.cmp(best_u) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => p > best_p,
    }
}

/// Initial-stage aggregate of state-level terms for action `i`.
fn initial_terms(
    instance: &Instance,
    terms: &ResolvedContract,
    i: usize,
    chosen: &[Option<FinalTerms>],
) -> FinalTerms {
    let ia = &instance.initial_actions[i];
    let mut value = Rational::zero();
    let mut payment = Rational::zero();
    let mut profit = Rational::zero();
    for (s, p) in ia.transition.iter().enumerate() {
        if p.is_zero() {
            continue;
        }
        let Some(ft) = &chosen[s] else { continue };
        let bonus = &terms.state_transfer[s];
        value += p * (&ft.utility + bonus);
        payment += p * (&ft.payment + bonus);
        profit += p * (&ft.profit - bonus);
    }
    FinalTerms {
        utility: value - &ia.cost,
        payment,
        profit,
    }
}

pub fn best_response(instance: &Instance, contract: &Contract) -> Result<BestResponse, Error> {
    let terms = contract.resolve(instance)?;
    Ok(best_response_resolved(instance, &terms))
}

pub(crate) fn best_response_resolved(
    instance: &Instance,
    terms: &ResolvedContract,
) -> BestResponse {
    let n_states = instance.num_states();
    let mut finals = Vec::with_capacity(n_states);
    let mut chosen: Vec<Option<FinalTerms>> = Vec::with_capacity(n_states);
    for s in 0..n_states {
        if terms.terminated[s] {
            finals.push(None);
            chosen.push(None);
            continue;
        }
        let mut best: Option<(usize, FinalTerms)> = None;
        for j in 0..instance.states[s].final_actions.len() {
            let ft = final_terms(instance, terms, s, j);
            let better = match &best {
                None => true,
                Some((_, b)) => beats(&ft.utility, &ft.profit, &b.utility, &b.profit),
            };
            if better {
                best = Some((j, ft));
            }
        }
        let (j, ft) = best.expect("validated states have a final action");
        finals.push(Some(j));
        chosen.push(Some(ft));
    }

    let mut best: Option<(usize, FinalTerms)> = None;
    for i in 0..instance.num_initial() {
        let it = initial_terms(instance, terms, i, &chosen);
        let better = match &best {
            None => true,
            Some((_, b)) => beats(&it.utility, &it.profit, &b.utility, &b.profit),
        };
        if better {
            best = Some((i, it));
        }
    }
    let (initial, it) = best.expect("validated instances have an initial action");

    BestResponse {
        profile: ActionProfile { initial, finals },
        agent_utility: it.utility,
        expected_payment: it.payment,
        principal_profit: it.profit,
        per_state_utility: chosen
            .into_iter()
            .map(|c| c.map(|ft| ft.utility).unwrap_or_else(Rational::zero))
            .collect(),
    }
}

/// Agent utility, payment and principal profit of an arbitrary profile.
pub fn evaluate_profile(
    instance: &Instance,
    contract: &Contract,
    profile: &ActionProfile,
) -> Result<ProfileValue, Error> {
    let terms = contract.resolve(instance)?;
    profile.check(instance)?;
    let mut chosen = Vec::with_capacity(instance.num_states());
    for (s, j) in profile.finals.iter().enumerate() {
        match (terms.terminated[s], j) {
            (true, Some(_)) => return Err(Error::TerminatedState(s)),
            (true, None) => chosen.push(None),
            (false, None) => return Err(Error::MissingFinal(s)),
            (false, Some(j)) => chosen.push(Some(final_terms(instance, &terms, s, *j))),
        }
    }
    let it = initial_terms(instance, &terms, profile.initial, &chosen);
    Ok(ProfileValue {
        agent_utility: it.utility,
        expected_payment: it.payment,
        principal_profit: it.profit,
    })
}
