//! Linear contracts as a one-parameter family.
//!
//! Under `t = α·r` the agent's utility from final action `j` at state `s` is
//! the line `α·R^s_j - c^s_j`, and from a whole profile it is
//! `α·R_a - c_a`. The best response is therefore piecewise constant in `α`:
//! per-state upper envelopes fix the final actions between consecutive
//! state breakpoints, and an envelope over initial actions splits each such
//! stretch further. On every piece the principal's profit `(1-α)·R_a`
//! decreases, so the optimum sits at the left end of some piece.
//!
//! At a breakpoint the agent is indifferent between the adjacent profiles
//! and takes the one with the larger expected reward, which is the
//! principal-preferred one whenever `α < 1`.

use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::error::Error;
use crate::model::{ActionProfile, Instance};
use crate::num::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Breakpoint {
    pub alpha: Rational,
    pub profile_left: ActionProfile,
    pub profile_right: ActionProfile,
}

/// A maximal interval `[alpha_lo, alpha_hi)` with a constant best response.
/// The last segment ends at 1; at `α = 1` itself the principal earns
/// nothing from any profile and ties may resolve differently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub alpha_lo: Rational,
    pub alpha_hi: Rational,
    pub profile: ActionProfile,
    pub reward: Rational,
    pub cost: Rational,
}

impl Segment {
    /// Principal profit at `alpha_lo`, the best point of the segment.
    pub fn profit_at_lo(&self) -> Rational {
        (Rational::one() - &self.alpha_lo) * &self.reward
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearOptimum {
    pub alpha: Rational,
    pub profit: Rational,
    pub profile: ActionProfile,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BreakpointAnalysis {
    pub breakpoints: Vec<Breakpoint>,
    pub segments: Vec<Segment>,
    pub optimal: LinearOptimum,
}

impl BreakpointAnalysis {
    /// `Σ_segments (1 - α_lo)·R`, an upper bound on the maximal welfare
    /// with one term per segment, each at most the linear optimum.
    pub fn telescoping_bound(&self) -> Rational {
        self.segments
            .iter()
            .fold(Rational::zero(), |acc, seg| acc + seg.profit_at_lo())
    }
}

/// Pieces of the upper envelope of `α·slope - cost` on `[lo, hi)`, as
/// `(start, line)` pairs with the first start equal to `lo`. Ties prefer
/// the larger slope, then the lower index.
fn upper_envelope(
    lines: &[(Rational, Rational)],
    lo: &Rational,
    hi: &Rational,
) -> Vec<(Rational, usize)> {
    let value = |k: usize, a: &Rational| a * &lines[k].0 - &lines[k].1;
    let mut current = 0;
    for k in 1..lines.len() {
        let (vk, vc) = (value(k, lo), value(current, lo));
        if vk > vc || (vk == vc && lines[k].0 > lines[current].0) {
            current = k;
        }
    }
    let mut pieces = alloc::vec![(lo.clone(), current)];
    loop {
        let (slope, cost) = &lines[current];
        let mut next: Option<(Rational, usize)> = None;
        for (k, (s, c)) in lines.iter().enumerate() {
            if s <= slope {
                continue;
            }
            let cross = (c - cost) / (s - slope);
            let better = match &next {
                None => true,
                Some((a, n)) => cross < *a || (cross == *a && *s > lines[*n].0),
            };
            if better {
                next = Some((cross, k));
            }
        }
        match next {
            Some((cross, k)) if cross < *hi => {
                debug_assert!(cross > pieces.last().unwrap().0);
                pieces.push((cross, k));
                current = k;
            }
            _ => return pieces,
        }
    }
}

fn state_lines(instance: &Instance, rewards: &[Rational], s: usize) -> Vec<(Rational, Rational)> {
    instance.states[s]
        .final_actions
        .iter()
        .zip(rewards)
        .map(|(fa, r)| (r.clone(), fa.cost.clone()))
        .collect()
}

fn check_rewards(instance: &Instance) -> Result<(), Error> {
    match instance.rewards.iter().position(|r| r < &Rational::zero()) {
        Some(outcome) => Err(Error::NegativeReward { outcome }),
        None => Ok(()),
    }
}

/// Values of `α ∈ (0, 1)` where the agent's best final action at `state`
/// changes. Dominated actions never appear, and neither do switches at
/// `α = 1`, where every action leaves the principal nothing and ties fall
/// back to the lowest index.
pub fn state_breakpoints(instance: &Instance, state: usize) -> Result<Vec<Rational>, Error> {
    if state >= instance.num_states() {
        return Err(Error::IndexOutOfRange {
            what: "state",
            index: state,
            len: instance.num_states(),
        });
    }
    let table = instance.state_reward_table();
    let lines = state_lines(instance, &table[state], state);
    Ok(upper_envelope(&lines, &Rational::zero(), &Rational::one())
        .into_iter()
        .skip(1)
        .map(|(a, _)| a)
        .collect())
}

pub fn analyze(instance: &Instance) -> Result<BreakpointAnalysis, Error> {
    check_rewards(instance)?;
    let zero = Rational::zero();
    let one = Rational::one();
    let table = instance.state_reward_table();
    let state_pieces: Vec<Vec<(Rational, usize)>> = (0..instance.num_states())
        .map(|s| upper_envelope(&state_lines(instance, &table[s], s), &zero, &one))
        .collect();

    let mut cuts: Vec<Rational> = state_pieces
        .iter()
        .flat_map(|p| p.iter().skip(1).map(|(a, _)| a.clone()))
        .collect();
    cuts.push(zero.clone());
    cuts.sort();
    cuts.dedup();

    let mut segments: Vec<Segment> = Vec::new();
    for (k, lo) in cuts.iter().enumerate() {
        let last = k + 1 == cuts.len();
        let hi = if last {
            one.clone()
        } else {
            cuts[k + 1].clone()
        };
        let finals: Vec<usize> = state_pieces
            .iter()
            .map(|p| p.iter().take_while(|(a, _)| a <= lo).last().unwrap().1)
            .collect();
        let lines: Vec<(Rational, Rational)> = instance
            .initial_actions
            .iter()
            .map(|ia| {
                let mut reward = Rational::zero();
                let mut cost = ia.cost.clone();
                for (s, p) in ia.transition.iter().enumerate() {
                    if !p.is_zero() {
                        reward += p * &table[s][finals[s]];
                        cost += p * &instance.states[s].final_actions[finals[s]].cost;
                    }
                }
                (reward, cost)
            })
            .collect();
        let pieces = upper_envelope(&lines, lo, &hi);
        for (n, (start, i)) in pieces.iter().enumerate() {
            let end = pieces
                .get(n + 1)
                .map_or_else(|| hi.clone(), |p| p.0.clone());
            segments.push(Segment {
                alpha_lo: start.clone(),
                alpha_hi: end,
                profile: ActionProfile::total(*i, &finals),
                reward: lines[*i].0.clone(),
                cost: lines[*i].1.clone(),
            });
        }
    }

    let breakpoints: Vec<Breakpoint> = segments
        .windows(2)
        .map(|w| Breakpoint {
            alpha: w[1].alpha_lo.clone(),
            profile_left: w[0].profile.clone(),
            profile_right: w[1].profile.clone(),
        })
        .collect();
    let bound = instance.num_states() * instance.num_initial() * instance.max_final_count();
    assert!(
        breakpoints.len() <= bound,
        "{} breakpoints exceed the bound {bound}",
        breakpoints.len()
    );

    let mut optimal: Option<LinearOptimum> = None;
    for seg in &segments {
        let profit = seg.profit_at_lo();
        if optimal.as_ref().is_none_or(|o| profit > o.profit) {
            optimal = Some(LinearOptimum {
                alpha: seg.alpha_lo.clone(),
                profit,
                profile: seg.profile.clone(),
            });
        }
    }
    Ok(BreakpointAnalysis {
        breakpoints,
        segments,
        optimal: optimal.expect("at least one segment"),
    })
}

/// The optimal linear contract; among equal profits the smallest `α`.
pub fn optimal_linear(instance: &Instance) -> Result<LinearOptimum, Error> {
    Ok(analyze(instance)?.optimal)
}
