//! Expected reward, cost and maximal welfare of action profiles.

use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::Error;
use crate::model::{ActionProfile, Instance};
use crate::num::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateBest {
    pub action: usize,
    /// `R^s_j - c^s_j` of `action`.
    pub surplus: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WelfareReport {
    pub max_welfare: Rational,
    pub argmax_profile: ActionProfile,
    pub per_state_best: Vec<StateBest>,
}

fn total_finals(instance: &Instance, profile: &ActionProfile) -> Result<Vec<usize>, Error> {
    profile.check(instance)?;
    profile
        .finals
        .iter()
        .enumerate()
        .map(|(s, j)| j.ok_or(Error::MissingFinal(s)))
        .collect()
}

/// `Σ_s F[i][s] · R^s_{j_s}`.
pub fn profile_reward(instance: &Instance, profile: &ActionProfile) -> Result<Rational, Error> {
    let finals = total_finals(instance, profile)?;
    let ia = &instance.initial_actions[profile.initial];
    let mut total = Rational::zero();
    for (s, p) in ia.transition.iter().enumerate() {
        if !p.is_zero() {
            total += p * instance.expected_state_reward(s, finals[s])?;
        }
    }
    Ok(total)
}

/// `c_i + Σ_s F[i][s] · c^s_{j_s}`.
pub fn profile_cost(instance: &Instance, profile: &ActionProfile) -> Result<Rational, Error> {
    let finals = total_finals(instance, profile)?;
    let ia = &instance.initial_actions[profile.initial];
    let mut total = ia.cost.clone();
    for (s, p) in ia.transition.iter().enumerate() {
        if !p.is_zero() {
            total += p * &instance.states[s].final_actions[finals[s]].cost;
        }
    }
    Ok(total)
}

/// Maximal welfare by per-state decomposition.
///
/// The reported profile is the lexicographically smallest maximiser, so
/// states the chosen initial action never reaches get final action 0.
pub fn max_welfare(instance: &Instance) -> WelfareReport {
    let rewards = instance.state_reward_table();
    let per_state_best: Vec<StateBest> = instance
        .states
        .iter()
        .enumerate()
        .map(|(s, st)| {
            let mut best: Option<StateBest> = None;
            for (j, fa) in st.final_actions.iter().enumerate() {
                let surplus = &rewards[s][j] - &fa.cost;
                if best.as_ref().is_none_or(|b| surplus > b.surplus) {
                    best = Some(StateBest { action: j, surplus });
                }
            }
            best.expect("validated states have a final action")
        })
        .collect();

    let mut best: Option<(usize, Rational)> = None;
    for (i, ia) in instance.initial_actions.iter().enumerate() {
        let mut value = -ia.cost.clone();
        for (s, p) in ia.transition.iter().enumerate() {
            if !p.is_zero() {
                value += p * &per_state_best[s].surplus;
            }
        }
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((i, value));
        }
    }
    let (initial, max_welfare) = best.expect("validated instances have an initial action");
    let transition = &instance.initial_actions[initial].transition;
    let finals = per_state_best
        .iter()
        .enumerate()
        .map(|(s, b)| Some(if transition[s].is_zero() { 0 } else { b.action }))
        .collect();
    WelfareReport {
        max_welfare,
        argmax_profile: ActionProfile { initial, finals },
        per_state_best,
    }
}
