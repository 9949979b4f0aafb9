//! Independent reference implementations used as test oracles. Everything
//! here works from the definitions by brute force and shares no code with
//! the solvers beyond the data types.
#![allow(dead_code)]

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use twostage_core::num::{dot, int, ratio};
use twostage_core::{
    generators::RandomClass, min_payment_pay, min_payment_standard, min_payment_terminate,
    random_instance, ActionProfile, Contract, Instance, RandomSizes, Rational,
};

/// Outcome transfers, state transfers and terminated flags of a contract.
pub fn terms(inst: &Instance, contract: &Contract) -> (Vec<Rational>, Vec<Rational>, Vec<bool>) {
    let n = inst.num_states();
    let none = vec![false; n];
    match contract {
        Contract::Standard { t } => (t.clone(), vec![Rational::zero(); n], none),
        Contract::Linear { alpha } => (
            inst.rewards.iter().map(|r| alpha * r).collect(),
            vec![Rational::zero(); n],
            none,
        ),
        Contract::PayHalfway { s, t } => (t.clone(), s.clone(), none),
        Contract::TerminateHalfway { t, terminate_set } => (
            t.clone(),
            vec![Rational::zero(); n],
            (0..n).map(|s| terminate_set.contains(&s)).collect(),
        ),
    }
}

/// `(agent utility, principal profit)` of a profile, summed outcome by
/// outcome.
pub fn value(
    inst: &Instance,
    contract: &Contract,
    initial: usize,
    finals: &[Option<usize>],
) -> (Rational, Rational) {
    let (t, s_pay, _) = terms(inst, contract);
    let ia = &inst.initial_actions[initial];
    let mut utility = -ia.cost.clone();
    let mut profit = Rational::zero();
    for (s, p) in ia.transition.iter().enumerate() {
        let Some(j) = finals[s] else { continue };
        let fa = &inst.states[s].final_actions[j];
        utility += p * (&s_pay[s] - &fa.cost);
        profit -= p * &s_pay[s];
        for (m, q) in fa.outcome_dist.iter().enumerate() {
            utility += p * q * &t[m];
            profit += p * q * (&inst.rewards[m] - &t[m]);
        }
    }
    (utility, profit)
}

/// Every `(initial, finals)` pair, with `None` exactly at `stopped` states.
pub fn all_profiles(inst: &Instance, stopped: &[bool]) -> Vec<ActionProfile> {
    let mut out = Vec::new();
    let mut finals: Vec<Vec<Option<usize>>> = vec![vec![]];
    for (s, st) in inst.states.iter().enumerate() {
        let choices: Vec<Option<usize>> = if stopped[s] {
            vec![None]
        } else {
            (0..st.final_actions.len()).map(Some).collect()
        };
        finals = finals
            .into_iter()
            .flat_map(|f| {
                choices.iter().map(move |c| {
                    let mut g = f.clone();
                    g.push(*c);
                    g
                })
            })
            .collect();
    }
    for i in 0..inst.num_initial() {
        for f in &finals {
            out.push(ActionProfile {
                initial: i,
                finals: f.clone(),
            });
        }
    }
    out
}

/// Best `(utility, profit)` over all profiles: utility first, then profit.
pub fn brute_best(inst: &Instance, contract: &Contract) -> (Rational, Rational) {
    let (_, _, stopped) = terms(inst, contract);
    all_profiles(inst, &stopped)
        .iter()
        .map(|p| value(inst, contract, p.initial, &p.finals))
        .max()
        .unwrap()
}

/// Maximal `R_a - c_a` over all total profiles.
pub fn brute_welfare(inst: &Instance) -> Rational {
    let zero = Contract::Standard {
        t: vec![Rational::zero(); inst.num_outcomes()],
    };
    let stopped = vec![false; inst.num_states()];
    all_profiles(inst, &stopped)
        .iter()
        .map(|p| {
            let (u, profit) = value(inst, &zero, p.initial, &p.finals);
            // with zero transfers: utility = -cost, profit = reward
            profit + u
        })
        .max()
        .unwrap()
}

pub fn small_sizes() -> RandomSizes {
    RandomSizes {
        states: 2,
        initial_actions: 2,
        max_final_actions: 3,
        outcomes: 3,
    }
}

pub fn random_small(seed: u64) -> Instance {
    let class = match seed % 4 {
        0 => RandomClass::Tree,
        1 => RandomClass::StochasticFirstStage,
        2 => RandomClass::DeterministicFirstStage,
        _ => RandomClass::General,
    };
    random_instance(class, &small_sizes(), seed).unwrap()
}

/// A random contract of any family for `inst`, with quarter-step values.
pub fn random_contract(inst: &Instance, rng: &mut ChaCha8Rng) -> Contract {
    let m = inst.num_outcomes();
    let n = inst.num_states();
    fn quarters(rng: &mut ChaCha8Rng, k: usize, top: i64) -> Vec<Rational> {
        (0..k).map(|_| ratio(rng.gen_range(0..=top), 4)).collect()
    }
    let t = quarters(rng, m, 16);
    match rng.gen_range(0..4) {
        0 => Contract::Standard { t },
        1 => Contract::Linear {
            alpha: ratio(rng.gen_range(0..=8), 8),
        },
        2 => Contract::PayHalfway {
            s: quarters(rng, n, 8),
            t,
        },
        _ => Contract::TerminateHalfway {
            t,
            terminate_set: (0..n)
                .filter(|_| rng.gen_bool(0.4))
                .collect::<BTreeSet<_>>(),
        },
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn num(n: i64) -> Rational {
    int(n)
}

pub fn tiny(seed: u64) -> Instance {
    let sizes = RandomSizes {
        states: 2,
        initial_actions: 2,
        max_final_actions: 2,
        outcomes: 2,
    };
    random_instance(RandomClass::General, &sizes, seed).unwrap()
}

/// Contracts of `family` on a lattice: outcome transfers in steps of 1/4
/// up to 4, state transfers in steps of 1/2 up to 2.
pub fn lattice(inst: &Instance, family: &str) -> Vec<Contract> {
    let grid = |step: i64, top: i64| (0..=top * step).map(move |k| ratio(k, step));
    let mut ts = Vec::new();
    for a in grid(4, 4) {
        for b in grid(4, 4) {
            ts.push(vec![a.clone(), b]);
        }
    }
    let n = inst.num_states();
    match family {
        "standard" => ts.into_iter().map(|t| Contract::Standard { t }).collect(),
        "pay" => {
            let mut out = Vec::new();
            for t in &ts {
                for a in grid(2, 2) {
                    for b in grid(2, 2) {
                        out.push(Contract::PayHalfway {
                            s: vec![a.clone(), b],
                            t: t.clone(),
                        });
                    }
                }
            }
            out
        }
        _ => {
            let mut out = Vec::new();
            for mask in 0..(1usize << n) {
                let set: BTreeSet<usize> = (0..n).filter(|s| mask & (1 << s) != 0).collect();
                for t in &ts {
                    out.push(Contract::TerminateHalfway {
                        t: t.clone(),
                        terminate_set: set.clone(),
                    });
                }
            }
            out
        }
    }
}

/// Every chosen final action is utility-maximising at its own state,
/// reachable or not, as backward induction requires.
pub fn finals_optimal(inst: &Instance, contract: &Contract, p: &ActionProfile) -> bool {
    let (t, _, _) = terms(inst, contract);
    let u = |s: usize, j: usize| {
        let fa = &inst.states[s].final_actions[j];
        dot(&fa.outcome_dist, &t) - &fa.cost
    };
    p.finals.iter().enumerate().all(|(s, j)| match j {
        None => true,
        Some(j) => (0..inst.states[s].final_actions.len()).all(|k| u(s, *j) >= u(s, k)),
    })
}

pub fn lp_minimum(inst: &Instance, family: &str, p: &ActionProfile) -> Option<Rational> {
    let stopped: BTreeSet<usize> = (0..inst.num_states())
        .filter(|&s| p.finals[s].is_none())
        .collect();
    let mp = match family {
        "standard" => min_payment_standard(inst, p),
        "pay" => min_payment_pay(inst, p),
        _ => min_payment_terminate(inst, &stopped, p),
    };
    mp.unwrap().map(|m| m.payment)
}

/// Checks that no lattice contract incentivises any profile more cheaply
/// than that profile's LP minimum, on `tiny(seed)`. Families rotate with
/// the seed.
pub fn lattice_check(seed: u64) -> Result<(), String> {
    let inst = tiny(seed);
    let family = ["standard", "pay", "terminate"][seed as usize % 3];
    let mut minimum: Vec<(ActionProfile, Option<Rational>)> = Vec::new();
    for contract in lattice(&inst, family) {
        let (_, _, stopped) = terms(&inst, &contract);
        let profiles = all_profiles(&inst, &stopped);
        let values: Vec<(Rational, Rational)> = profiles
            .iter()
            .map(|p| value(&inst, &contract, p.initial, &p.finals))
            .collect();
        let best_u = values.iter().map(|v| v.0.clone()).max().unwrap();
        for (p, (u, profit)) in profiles.iter().zip(&values) {
            if *u != best_u || !finals_optimal(&inst, &contract, p) {
                continue;
            }
            // p is incentive compatible here; its payment is reward - profit
            let zero = Contract::Standard {
                t: vec![Rational::zero(); inst.num_outcomes()],
            };
            let (_, reward) = value(&inst, &zero, p.initial, &p.finals);
            let payment = reward - profit;
            let lp = match minimum.iter().find(|(q, _)| q == p) {
                Some((_, v)) => v.clone(),
                None => {
                    let v = lp_minimum(&inst, family, p);
                    minimum.push((p.clone(), v.clone()));
                    v
                }
            };
            let Some(lp) = lp else {
                return Err(format!(
                    "seed {seed}: LP infeasible but {contract:?} incentivises {p}"
                ));
            };
            if lp > payment {
                return Err(format!("seed {seed}: {contract:?} pays {payment} < {lp}"));
            }
        }
    }
    Ok(())
}
