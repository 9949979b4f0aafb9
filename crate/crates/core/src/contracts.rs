//! Optimal standard, pay-halfway and terminate-halfway contracts.
//!
//! Every candidate action profile gets a minimum-payment incentive LP: the
//! profile's final actions must be optimal at every surviving state and its
//! initial action optimal given the resulting continuation values. Weak
//! inequalities suffice because the agent breaks ties in the principal's
//! favour. The best profile over the enumeration is the optimal contract.
//!
//! Candidates are visited in decreasing order of welfare `R_a - c_a`, which
//! bounds their profit: the agent's utility is nonnegative under any
//! contract, so payment covers cost. The search stops once the bound falls
//! below the incumbent profit.

use alloc::collections::{BTreeSet, BinaryHeap};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use num_traits::{Signed, Zero};

use crate::agent::{best_response, BestResponse};
use crate::error::Error;
use crate::lp::{solve_lp, LinearProgram, LpResult, Relation};
use crate::model::{classify, deterministic_targets, ActionProfile, Contract, Instance};
use crate::num::{dot, zeros, Rational};
use crate::welfare::max_welfare;

/// Limits on the exponential profile and termination-set enumerations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCaps {
    /// Bound on the product of per-state final-action counts.
    pub max_profiles: u128,
    /// Bound on the number of states when enumerating termination sets.
    pub max_subset_states: usize,
}

impl Default for EnumerationCaps {
    fn default() -> Self {
        EnumerationCaps {
            max_profiles: 200_000,
            max_subset_states: 14,
        }
    }
}

/// Cheapest contract of one family incentivising a given profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinPayment {
    pub contract: Contract,
    pub payment: Rational,
    /// Expected reward of the profile minus `payment`.
    pub profit: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub best_contract: Contract,
    /// The agent's actual response to `best_contract`.
    pub best_response: BestResponse,
    /// The profile whose LP produced `best_contract`.
    pub incentivized_profile: ActionProfile,
    pub profit: Rational,
    pub welfare: Rational,
    pub profiles_enumerated: u64,
    pub termination_sets_enumerated: u64,
    pub infeasible_profiles: u64,
    /// Profiles skipped because their welfare could not beat the incumbent.
    pub pruned_profiles: u64,
}

/// Per-instance tables shared by every LP of a search.
struct Tables {
    rewards: Vec<Vec<Rational>>,
}

impl Tables {
    fn new(instance: &Instance) -> Self {
        Tables {
            rewards: instance.state_reward_table(),
        }
    }

    /// `(R_a - c_a, R_a)` over surviving states.
    fn welfare_and_reward(
        &self,
        instance: &Instance,
        initial: usize,
        finals: &[Option<usize>],
    ) -> (Rational, Rational) {
        let ia = &instance.initial_actions[initial];
        let mut reward = Rational::zero();
        let mut cost = ia.cost.clone();
        for (s, p) in ia.transition.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if let Some(j) = finals[s] {
                reward += p * &self.rewards[s][j];
                cost += p * &instance.states[s].final_actions[j].cost;
            }
        }
        (&reward - cost, reward)
    }
}

/// Incentive LP for `(initial, finals)`; `None` finals are terminated
/// states. Variables are `t[0..M]`, then `s[0..S]` when `state_transfers`.
/// Returns `None` if some constraint is infeasible on its face.
fn incentive_program(
    instance: &Instance,
    initial: usize,
    finals: &[Option<usize>],
    state_transfers: bool,
) -> Option<LinearProgram> {
    let m = instance.num_outcomes();
    let n_states = instance.num_states();
    let width = m + if state_transfers { n_states } else { 0 };
    let ia = &instance.initial_actions[initial];

    let mut objective = zeros(width);
    for (s, p) in ia.transition.iter().enumerate() {
        let Some(j) = finals[s] else { continue };
        if p.is_zero() {
            continue;
        }
        for (o, f) in objective
            .iter_mut()
            .zip(&instance.states[s].final_actions[j].outcome_dist)
        {
            if !f.is_zero() {
                *o += p * f;
            }
        }
        if state_transfers {
            objective[m + s] += p;
        }
    }
    let mut lp = LinearProgram::new(objective);

    let push = |lp: &mut LinearProgram, coeffs: Vec<Rational>, rhs: Rational| -> bool {
        if coeffs.iter().all(Zero::is_zero) {
            return !rhs.is_positive();
        }
        lp.push(coeffs, Relation::Ge, rhs);
        true
    };

    for (s, j) in finals.iter().enumerate() {
        let Some(js) = *j else { continue };
        let actions = &instance.states[s].final_actions;
        let target = &actions[js];
        for (k, other) in actions.iter().enumerate() {
            if k == js {
                continue;
            }
            let mut coeffs = zeros(width);
            for (c, (a, b)) in coeffs
                .iter_mut()
                .zip(target.outcome_dist.iter().zip(&other.outcome_dist))
            {
                *c = a - b;
            }
            if !push(&mut lp, coeffs, &target.cost - &other.cost) {
                return None;
            }
        }
    }

    for (k, other) in instance.initial_actions.iter().enumerate() {
        if k == initial {
            continue;
        }
        let mut coeffs = zeros(width);
        let mut rhs = &ia.cost - &other.cost;
        for (s, j) in finals.iter().enumerate() {
            let Some(js) = *j else { continue };
            let delta = &ia.transition[s] - &other.transition[s];
            if delta.is_zero() {
                continue;
            }
            let fa = &instance.states[s].final_actions[js];
            for (c, f) in coeffs.iter_mut().zip(&fa.outcome_dist) {
                if !f.is_zero() {
                    *c += &delta * f;
                }
            }
            if state_transfers {
                coeffs[m + s] = delta.clone();
            }
            rhs += &delta * &fa.cost;
        }
        if !push(&mut lp, coeffs, rhs) {
            return None;
        }
    }
    Some(lp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Family {
    Standard,
    Pay,
    Terminate,
}

fn solve_profile(
    instance: &Instance,
    tables: &Tables,
    initial: usize,
    finals: &[Option<usize>],
    family: Family,
) -> Result<Option<MinPayment>, Error> {
    let state_transfers = family == Family::Pay;
    let Some(lp) = incentive_program(instance, initial, finals, state_transfers) else {
        return Ok(None);
    };
    let sol = match solve_lp(&lp)? {
        LpResult::Optimal(sol) => sol,
        LpResult::Infeasible => return Ok(None),
        LpResult::Unbounded => unreachable!("payments are bounded below by zero"),
    };
    let m = instance.num_outcomes();
    let t = sol.x[..m].to_vec();
    let contract = match family {
        Family::Standard => Contract::Standard { t },
        Family::Pay => Contract::PayHalfway {
            s: sol.x[m..].to_vec(),
            t,
        },
        Family::Terminate => Contract::TerminateHalfway {
            t,
            terminate_set: finals
                .iter()
                .enumerate()
                .filter_map(|(s, j)| j.is_none().then_some(s))
                .collect(),
        },
    };
    let (_, reward) = tables.welfare_and_reward(instance, initial, finals);
    Ok(Some(MinPayment {
        contract,
        profit: reward - &sol.objective_value,
        payment: sol.objective_value,
    }))
}

fn total_finals(instance: &Instance, profile: &ActionProfile) -> Result<(), Error> {
    profile.check(instance)?;
    match profile.finals.iter().position(Option::is_none) {
        Some(s) => Err(Error::MissingFinal(s)),
        None => Ok(()),
    }
}

/// Cheapest standard contract under which the agent takes `profile`.
/// `Ok(None)` when no standard contract does.
pub fn min_payment_standard(
    instance: &Instance,
    profile: &ActionProfile,
) -> Result<Option<MinPayment>, Error> {
    total_finals(instance, profile)?;
    solve_profile(
        instance,
        &Tables::new(instance),
        profile.initial,
        &profile.finals,
        Family::Standard,
    )
}

/// Cheapest pay-halfway contract under which the agent takes `profile`.
pub fn min_payment_pay(
    instance: &Instance,
    profile: &ActionProfile,
) -> Result<Option<MinPayment>, Error> {
    total_finals(instance, profile)?;
    solve_profile(
        instance,
        &Tables::new(instance),
        profile.initial,
        &profile.finals,
        Family::Pay,
    )
}

/// Cheapest outcome transfers that, with the process stopped at
/// `terminate_set`, make the agent take `profile`. The profile must give a
/// final action to exactly the surviving states.
pub fn min_payment_terminate(
    instance: &Instance,
    terminate_set: &BTreeSet<usize>,
    profile: &ActionProfile,
) -> Result<Option<MinPayment>, Error> {
    profile.check(instance)?;
    if let Some(&s) = terminate_set.iter().find(|&&s| s >= instance.num_states()) {
        return Err(Error::IndexOutOfRange {
            what: "terminate state",
            index: s,
            len: instance.num_states(),
        });
    }
    for (s, j) in profile.finals.iter().enumerate() {
        match (terminate_set.contains(&s), j) {
            (true, Some(_)) => return Err(Error::TerminatedState(s)),
            (false, None) => return Err(Error::MissingFinal(s)),
            _ => {}
        }
    }
    solve_profile(
        instance,
        &Tables::new(instance),
        profile.initial,
        &profile.finals,
        Family::Terminate,
    )
}

fn profile_count(counts: impl Iterator<Item = usize>) -> u128 {
    counts.fold(1u128, |acc, c| acc.saturating_mul(c as u128))
}

fn check_profile_cap(instance: &Instance, caps: &EnumerationCaps) -> Result<(), Error> {
    let count = profile_count(instance.final_counts().into_iter());
    if count > caps.max_profiles {
        return Err(Error::CapExceeded {
            what: "final-action profiles",
            count,
            cap: caps.max_profiles,
        });
    }
    Ok(())
}

/// Tie order between candidates: fewer terminated states, then the
/// lexicographically smaller terminated set, then the smaller profile.
fn canonical_cmp(a: (usize, &[Option<usize>]), b: (usize, &[Option<usize>])) -> Ordering {
    let stopped = |f: &[Option<usize>]| -> Vec<usize> {
        f.iter()
            .enumerate()
            .filter_map(|(s, j)| j.is_none().then_some(s))
            .collect()
    };
    let (sa, sb) = (stopped(a.1), stopped(b.1));
    (sa.len(), sa, a.0, a.1).cmp(&(sb.len(), sb, b.0, b.1))
}

/// A search node: an initial action and a rank into every state's option
/// list. `last` is the highest position that may still be advanced, which
/// makes every rank vector reachable from exactly one parent.
struct Node {
    bound: Rational,
    initial: usize,
    ranks: Vec<usize>,
    last: usize,
}

impl Node {
    fn key(&self) -> (usize, &[usize]) {
        (self.initial, &self.ranks)
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .cmp(&other.bound)
            .then_with(|| other.key().cmp(&self.key()))
    }
}

struct Best {
    payment: MinPayment,
    initial: usize,
    finals: Vec<Option<usize>>,
}

/// A per-state option ranked by weighted surplus; `None` stops the state.
type Choice = (Rational, Option<usize>);

/// Best-first search over `(initial, finals)` candidates by the welfare
/// bound `R_a - c_a`. Every candidate whose bound reaches the final optimum
/// gets its LP solved, so the winner under [`canonical_cmp`] is the same as
/// in a full enumeration.
fn search(instance: &Instance, family: Family) -> Result<SolveReport, Error> {
    let tables = Tables::new(instance);
    let allow_stop = family == Family::Terminate;
    // options[i][s]: (weighted surplus, choice), best first
    let options: Vec<Vec<Vec<Choice>>> = instance
        .initial_actions
        .iter()
        .map(|ia| {
            instance
                .states
                .iter()
                .enumerate()
                .map(|(s, st)| {
                    let p = &ia.transition[s];
                    let mut opts: Vec<Choice> = st
                        .final_actions
                        .iter()
                        .enumerate()
                        .map(|(j, fa)| (p * (&tables.rewards[s][j] - &fa.cost), Some(j)))
                        .collect();
                    if allow_stop {
                        opts.push((Rational::zero(), None));
                    }
                    opts.sort_by(|a, b| b.0.cmp(&a.0));
                    opts
                })
                .collect()
        })
        .collect();

    let total: u128 = options
        .iter()
        .map(|per_state| profile_count(per_state.iter().map(Vec::len)))
        .fold(0u128, u128::saturating_add);
    let n_states = instance.num_states();
    let mut heap = BinaryHeap::new();
    for (i, per_state) in options.iter().enumerate() {
        let bound = per_state
            .iter()
            .fold(-instance.initial_actions[i].cost.clone(), |acc, o| {
                acc + &o[0].0
            });
        heap.push(Node {
            bound,
            initial: i,
            ranks: alloc::vec![0; n_states],
            last: 0,
        });
    }

    let mut best: Option<Best> = None;
    let (mut solved, mut infeasible) = (0u64, 0u64);
    while let Some(node) = heap.pop() {
        if best.as_ref().is_some_and(|b| node.bound < b.payment.profit) {
            break;
        }
        let opts = &options[node.initial];
        let finals: Vec<Option<usize>> = node
            .ranks
            .iter()
            .enumerate()
            .map(|(s, &r)| opts[s][r].1)
            .collect();
        solved += 1;
        match solve_profile(instance, &tables, node.initial, &finals, family)? {
            None => infeasible += 1,
            Some(mp) => {
                let better = match &best {
                    None => true,
                    Some(b) => match mp.profit.cmp(&b.payment.profit) {
                        Ordering::Greater => true,
                        Ordering::Less => false,
                        Ordering::Equal => {
                            canonical_cmp((node.initial, &finals), (b.initial, &b.finals))
                                == Ordering::Less
                        }
                    },
                };
                if better {
                    best = Some(Best {
                        payment: mp,
                        initial: node.initial,
                        finals,
                    });
                }
            }
        }
        for p in node.last..n_states {
            let r = node.ranks[p];
            if r + 1 < opts[p].len() {
                let mut ranks = node.ranks.clone();
                ranks[p] = r + 1;
                heap.push(Node {
                    bound: &node.bound - &opts[p][r].0 + &opts[p][r + 1].0,
                    initial: node.initial,
                    ranks,
                    last: p,
                });
            }
        }
    }

    let best = best.expect("the zero contract always incentivises its own best response");
    let response = best_response(instance, &best.payment.contract)?;
    debug_assert_eq!(response.principal_profit, best.payment.profit);
    let total = u64::try_from(total).unwrap_or(u64::MAX);
    Ok(SolveReport {
        best_contract: best.payment.contract,
        best_response: response,
        incentivized_profile: ActionProfile {
            initial: best.initial,
            finals: best.finals,
        },
        profit: best.payment.profit,
        welfare: max_welfare(instance).max_welfare,
        profiles_enumerated: total,
        termination_sets_enumerated: if allow_stop { 1 << n_states } else { 0 },
        infeasible_profiles: infeasible,
        pruned_profiles: total - solved,
    })
}

/// Optimal standard contract over all action profiles. Equal profits keep
/// the lexicographically smallest profile.
pub fn optimal_standard(instance: &Instance, caps: &EnumerationCaps) -> Result<SolveReport, Error> {
    check_profile_cap(instance, caps)?;
    search(instance, Family::Standard)
}

/// Optimal pay-halfway contract; same search as [`optimal_standard`].
pub fn optimal_pay(instance: &Instance, caps: &EnumerationCaps) -> Result<SolveReport, Error> {
    check_profile_cap(instance, caps)?;
    search(instance, Family::Pay)
}

/// Optimal terminate-halfway contract over every termination set and every
/// profile on the surviving states. Equal profits prefer smaller sets, then
/// lexicographically smaller sets, then smaller profiles.
pub fn optimal_terminate(
    instance: &Instance,
    caps: &EnumerationCaps,
) -> Result<SolveReport, Error> {
    let n_states = instance.num_states();
    if n_states > caps.max_subset_states {
        return Err(Error::CapExceeded {
            what: "states for termination sets",
            count: n_states as u128,
            cap: caps.max_subset_states as u128,
        });
    }
    check_profile_cap(instance, caps)?;
    search(instance, Family::Terminate)
}

/// Folds state transfers into outcome transfers on a tree process:
/// `t'[m] = t[m] + s[pred(m)]`, where `pred(m)` is the only state that can
/// produce `m`. Outcomes no state produces keep `t[m]`.
pub fn pay_to_standard_tree(instance: &Instance, pay: &Contract) -> Result<Contract, Error> {
    let Contract::PayHalfway { s, t } = pay else {
        return Err(Error::InvalidContract(format!(
            "expected a pay_halfway contract, got {}",
            pay.kind()
        )));
    };
    pay.resolve(instance)?;
    if !classify(instance).is_tree {
        return Err(Error::NotTree);
    }
    let t = (0..instance.num_outcomes())
        .map(|m| {
            let pred = instance.states.iter().position(|st| {
                st.final_actions
                    .iter()
                    .any(|fa| !fa.outcome_dist[m].is_zero())
            });
            match pred {
                Some(state) => &t[m] + &s[state],
                None => t[m].clone(),
            }
        })
        .collect();
    Ok(Contract::Standard { t })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingleStageAction {
    pub name: String,
    pub cost: Rational,
    pub outcome_dist: Vec<Rational>,
}

/// A classic one-shot contract instance: actions map straight to outcome
/// distributions. Rows must sum to 1 and some action must be free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingleStageInstance {
    pub rewards: Vec<Rational>,
    pub actions: Vec<SingleStageAction>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingleStageSolution {
    pub action: usize,
    pub t: Vec<Rational>,
    pub payment: Rational,
    pub profit: Rational,
}

/// Collapses a deterministic first-stage process: each pair of an initial
/// action and a final action at the state it leads to becomes one action.
pub fn reduce_deterministic(instance: &Instance) -> Result<SingleStageInstance, Error> {
    let targets = deterministic_targets(instance).ok_or(Error::NotDeterministic)?;
    let mut actions = Vec::new();
    for (ia, &s) in instance.initial_actions.iter().zip(&targets) {
        for fa in &instance.states[s].final_actions {
            actions.push(SingleStageAction {
                name: format!("{}/{}", ia.name, fa.name),
                cost: &ia.cost + &fa.cost,
                outcome_dist: fa.outcome_dist.clone(),
            });
        }
    }
    Ok(SingleStageInstance {
        rewards: instance.rewards.clone(),
        actions,
    })
}

/// Optimal contract of a single-stage instance: one minimum-payment LP per
/// action, best profit wins, ties to the lowest action index.
pub fn optimal_single_stage(ssi: &SingleStageInstance) -> Result<SingleStageSolution, Error> {
    let mut best: Option<SingleStageSolution> = None;
    for (a, target) in ssi.actions.iter().enumerate() {
        let mut lp = LinearProgram::new(target.outcome_dist.clone());
        let mut trivially_infeasible = false;
        for (k, other) in ssi.actions.iter().enumerate() {
            if k == a {
                continue;
            }
            let coeffs: Vec<Rational> = target
                .outcome_dist
                .iter()
                .zip(&other.outcome_dist)
                .map(|(x, y)| x - y)
                .collect();
            let rhs = &target.cost - &other.cost;
            if coeffs.iter().all(Zero::is_zero) {
                trivially_infeasible |= rhs.is_positive();
                continue;
            }
            lp.push(coeffs, Relation::Ge, rhs);
        }
        if trivially_infeasible {
            continue;
        }
        let Some(sol) = solve_lp(&lp)?.optimal() else {
            continue;
        };
        let profit = dot(&target.outcome_dist, &ssi.rewards) - &sol.objective_value;
        if best.as_ref().is_none_or(|b| profit > b.profit) {
            best = Some(SingleStageSolution {
                action: a,
                t: sol.x,
                payment: sol.objective_value,
                profit,
            });
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("single-stage instance has no actions".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{example1, example2};
    use crate::num::{int, ratio};
    use alloc::vec;

    #[test]
    fn example1_standard_profile() {
        let inst = example1();
        let mp = min_payment_standard(&inst, &ActionProfile::total(0, &[1, 1]))
            .unwrap()
            .unwrap();
        assert_eq!(
            mp.contract,
            Contract::Standard {
                t: vec![int(0), ratio(20, 9)]
            }
        );
        assert_eq!(mp.payment, ratio(91, 45));
        assert_eq!(mp.profit, ratio(91, 36));
    }

    #[test]
    fn example1_pay_profile() {
        let inst = example1();
        let mp = min_payment_pay(&inst, &ActionProfile::total(0, &[1, 1]))
            .unwrap()
            .unwrap();
        assert_eq!(
            mp.contract,
            Contract::PayHalfway {
                s: vec![int(0), int(2)],
                t: vec![int(0), int(0)]
            }
        );
        assert_eq!(mp.payment, ratio(9, 5));
        assert_eq!(mp.profit, ratio(11, 4));
    }

    #[test]
    fn all_null_profile_costs_nothing() {
        let inst = example1();
        let p = ActionProfile::total(1, &[1, 1]);
        for mp in [
            min_payment_standard(&inst, &p).unwrap().unwrap(),
            min_payment_pay(&inst, &p).unwrap().unwrap(),
        ] {
            assert!(mp.payment.is_zero());
        }
    }

    #[test]
    fn example2_profiles() {
        let inst = example2();
        let mp = min_payment_standard(&inst, &ActionProfile::total(1, &[0, 1]))
            .unwrap()
            .unwrap();
        assert_eq!(
            mp.contract,
            Contract::Standard {
                t: vec![int(0), int(8)]
            }
        );
        assert_eq!(mp.profit, ratio(6, 5));

        let set: BTreeSet<usize> = [0].into_iter().collect();
        let p = ActionProfile {
            initial: 0,
            finals: vec![None, Some(1)],
        };
        let mp = min_payment_terminate(&inst, &set, &p).unwrap().unwrap();
        assert_eq!(
            mp.contract,
            Contract::TerminateHalfway {
                t: vec![int(0), ratio(800, 99)],
                terminate_set: set.clone()
            }
        );
        assert_eq!(mp.profit, ratio(19, 10));

        let all: BTreeSet<usize> = [0, 1].into_iter().collect();
        let p = ActionProfile {
            initial: 0,
            finals: vec![None, None],
        };
        // costly effort buys nothing once every state stops the process
        assert_eq!(min_payment_terminate(&inst, &all, &p).unwrap(), None);
        let p = ActionProfile { initial: 1, ..p };
        let mp = min_payment_terminate(&inst, &all, &p).unwrap().unwrap();
        assert!(mp.payment.is_zero());
        assert!(mp.profit.is_zero());

        let wrong = ActionProfile::total(0, &[0, 1]);
        assert_eq!(
            min_payment_terminate(&inst, &set, &wrong),
            Err(Error::TerminatedState(0))
        );
    }

    #[test]
    fn unincentivisable_profile_is_infeasible() {
        // In the first example's pass state, effort has the same distribution as null
        // but costs more.
        let inst = example1();
        let p = ActionProfile::total(0, &[1, 0]);
        assert_eq!(min_payment_standard(&inst, &p).unwrap(), None);
    }

    #[test]
    fn example_optima() {
        let caps = EnumerationCaps::default();
        let inst = example1();
        let std_report = optimal_standard(&inst, &caps).unwrap();
        assert_eq!(std_report.profit, ratio(91, 36));
        assert_eq!(std_report.best_response.principal_profit, ratio(91, 36));
        assert_eq!(std_report.profiles_enumerated, 8);
        let pay = optimal_pay(&inst, &caps).unwrap();
        assert_eq!(pay.profit, ratio(11, 4));

        let inst = example2();
        assert_eq!(optimal_standard(&inst, &caps).unwrap().profit, ratio(6, 5));
        let term = optimal_terminate(&inst, &caps).unwrap();
        assert_eq!(term.profit, ratio(19, 10));
        assert_eq!(term.termination_sets_enumerated, 4);
        match &term.best_contract {
            Contract::TerminateHalfway { terminate_set, .. } => {
                assert_eq!(terminate_set.iter().copied().collect::<Vec<_>>(), [0]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn caps_are_enforced() {
        let inst = example1();
        let tight = EnumerationCaps {
            max_profiles: 3,
            max_subset_states: 1,
        };
        assert!(matches!(
            optimal_standard(&inst, &tight),
            Err(Error::CapExceeded { count: 4, .. })
        ));
        assert!(matches!(
            optimal_terminate(&inst, &tight),
            Err(Error::CapExceeded { count: 2, .. })
        ));
    }

    #[test]
    fn tree_fold_adds_state_transfers() {
        // two states, each owning its own outcomes: {0,1} and {2,3}
        let d = |v: [i64; 4]| v.iter().map(|&x| ratio(x, 2)).collect::<Vec<_>>();
        let inst = Instance {
            rewards: vec![int(0), int(1), int(2), int(3)],
            initial_actions: vec![crate::model::InitialAction {
                name: "null".into(),
                cost: int(0),
                transition: vec![ratio(1, 2), ratio(1, 2)],
            }],
            states: vec![
                crate::model::State {
                    name: "a".into(),
                    final_actions: vec![crate::model::FinalAction {
                        name: "null".into(),
                        cost: int(0),
                        outcome_dist: d([1, 1, 0, 0]),
                    }],
                },
                crate::model::State {
                    name: "b".into(),
                    final_actions: vec![crate::model::FinalAction {
                        name: "null".into(),
                        cost: int(0),
                        outcome_dist: d([0, 0, 1, 1]),
                    }],
                },
            ],
        };
        let pay = Contract::PayHalfway {
            s: vec![int(0), int(1)],
            t: vec![int(1), int(2), int(3), int(4)],
        };
        assert_eq!(
            pay_to_standard_tree(&inst, &pay).unwrap(),
            Contract::Standard {
                t: vec![int(1), int(2), int(4), int(5)]
            }
        );
        let zero_s = Contract::PayHalfway {
            s: vec![int(0), int(0)],
            t: vec![int(1), int(2), int(3), int(4)],
        };
        assert_eq!(
            pay_to_standard_tree(&inst, &zero_s).unwrap(),
            Contract::Standard {
                t: vec![int(1), int(2), int(3), int(4)]
            }
        );
        assert_eq!(
            pay_to_standard_tree(
                &example1(),
                &Contract::PayHalfway {
                    s: zeros(2),
                    t: zeros(2)
                }
            ),
            Err(Error::NotTree)
        );
    }

    #[test]
    fn single_stage_two_actions() {
        let ssi = SingleStageInstance {
            rewards: vec![int(0), int(5)],
            actions: vec![
                SingleStageAction {
                    name: "null".into(),
                    cost: int(0),
                    outcome_dist: vec![ratio(9, 10), ratio(1, 10)],
                },
                SingleStageAction {
                    name: "work".into(),
                    cost: int(1),
                    outcome_dist: vec![ratio(2, 10), ratio(8, 10)],
                },
            ],
        };
        let sol = optimal_single_stage(&ssi).unwrap();
        assert_eq!(sol.action, 1);
        assert_eq!(sol.t, vec![int(0), ratio(10, 7)]);
        assert_eq!(sol.profit, ratio(20, 7));

        let only_null = SingleStageInstance {
            rewards: vec![int(0), int(5)],
            actions: vec![ssi.actions[0].clone()],
        };
        let sol = optimal_single_stage(&only_null).unwrap();
        assert!(sol.payment.is_zero());
        assert_eq!(sol.profit, ratio(1, 2));
    }

    #[test]
    fn reduction_requires_deterministic_first_stage() {
        assert_eq!(
            reduce_deterministic(&example1()),
            Err(Error::NotDeterministic)
        );
    }
}
