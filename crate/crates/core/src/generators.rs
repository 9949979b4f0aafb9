//! Instance constructors: the two worked examples, the separating families,
//! and seeded random instances of each process class.
//!
//! Final actions are listed with productive actions first and the free null
//! action last, matching the tables the examples come from.
//!
//! The second example follows its prose rather than its table: the state
//! reached after a successful first stage ("well") is the one where both
//! final actions succeed. With the table's assignment the stated profits
//! cannot be reproduced.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::model::{FinalAction, InitialAction, Instance, State};
use crate::num::{int, pow, ratio, Rational};

fn initial(name: &str, cost: Rational, transition: Vec<Rational>) -> InitialAction {
    InitialAction {
        name: name.into(),
        cost,
        transition,
    }
}

fn final_action(name: &str, cost: Rational, outcome_dist: Vec<Rational>) -> FinalAction {
    FinalAction {
        name: name.into(),
        cost,
        outcome_dist,
    }
}

fn two_point(p_high: Rational) -> Vec<Rational> {
    vec![Rational::one() - &p_high, p_high]
}

fn unit(len: usize, at: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); len];
    v[at] = Rational::one();
    v
}

/// Two outcomes worth 0 and 5; effort in the first stage mostly leads to
/// "pass", where the outcome is high regardless of the final action.
pub fn example1() -> Instance {
    Instance {
        rewards: vec![int(0), int(5)],
        initial_actions: vec![
            initial("effort", ratio(9, 5), vec![ratio(1, 10), ratio(9, 10)]),
            initial("null", int(0), vec![int(1), int(0)]),
        ],
        states: vec![
            State {
                name: "fail".into(),
                final_actions: vec![
                    final_action("effort", int(2), two_point(ratio(4, 5))),
                    final_action("null", int(0), two_point(ratio(1, 10))),
                ],
            },
            State {
                name: "pass".into(),
                final_actions: vec![
                    final_action("effort", int(1), two_point(int(1))),
                    final_action("null", int(0), two_point(int(1))),
                ],
            },
        ],
    }
}

/// Two outcomes worth 0 and 10; costly first-stage effort almost surely
/// reaches "well", but working in "bad" is where the welfare is.
pub fn example2() -> Instance {
    Instance {
        rewards: vec![int(0), int(10)],
        initial_actions: vec![
            initial("effort", int(8), vec![ratio(1, 100), ratio(99, 100)]),
            initial("null", int(0), vec![int(1), int(0)]),
        ],
        states: vec![
            State {
                name: "bad".into(),
                final_actions: vec![
                    final_action("effort", int(4), two_point(ratio(3, 5))),
                    final_action("null", int(0), two_point(ratio(1, 10))),
                ],
            },
            State {
                name: "well".into(),
                final_actions: vec![
                    final_action("effort", int(1), two_point(int(1))),
                    final_action("null", int(0), two_point(int(1))),
                ],
            },
        ],
    }
}

/// `Λ_n = λ + λ² + … + λⁿ`.
fn geometric(lambda: &Rational, n: u32) -> Rational {
    (1..=n).fold(Rational::zero(), |acc, k| acc + pow(lambda, k))
}

/// Smallest power of ten strictly above `bound`.
fn power_of_ten_above(bound: &Rational) -> Rational {
    let mut r = Rational::one();
    while r <= *bound {
        r *= int(10);
    }
    r
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

/// Three states, two free initial actions. The principal wants the
/// initial action that risks the costly state `s2`; state transfers make
/// that cheap, outcome transfers do not.
pub fn thm2(p: &Rational, q: &Rational, c: &Rational, x: &Rational) -> Result<Instance, Error> {
    let zero = Rational::zero();
    let one = Rational::one();
    if !(zero < *q && q < p && *p < one) {
        return Err(invalid("need 0 < q < p < 1"));
    }
    if !(zero < *c && c < x) {
        return Err(invalid("need 0 < c < x"));
    }
    let threshold = (&one + p - q) * c / (&one - p);
    if *x <= threshold {
        return Err(invalid(format!("need x > (1+p-q)c/(1-p) = {threshold}")));
    }
    let low = unit(2, 0);
    let high = unit(2, 1);
    Ok(Instance {
        rewards: vec![zero.clone(), x.clone()],
        initial_actions: vec![
            initial("a1", zero.clone(), vec![p.clone(), zero.clone(), &one - p]),
            initial("a2", zero.clone(), vec![q.clone(), &one - q, zero.clone()]),
        ],
        states: vec![
            State {
                name: "s1".into(),
                final_actions: vec![
                    final_action("a1", zero.clone(), high.clone()),
                    final_action("null", zero.clone(), low.clone()),
                ],
            },
            State {
                name: "s2".into(),
                final_actions: vec![
                    final_action("a1", c.clone(), high),
                    final_action("null", zero.clone(), low.clone()),
                ],
            },
            State {
                name: "s3".into(),
                final_actions: vec![
                    final_action("a1", zero.clone(), low.clone()),
                    final_action("null", zero, low),
                ],
            },
        ],
    })
}

/// Deterministic first stage: free initial actions `1..=N1` each lead to
/// their own state, whose final actions have geometrically growing costs
/// and slightly larger rewards; initial action `N1+1` costs `c` and leads
/// to a state where every final action is free and worth `c + (N1+1)N2 + 1`.
/// `r` defaults to the smallest power of ten that keeps probabilities in
/// range.
pub fn thm3(n1: u32, n2: u32, lambda: &Rational, r: Option<&Rational>) -> Result<Instance, Error> {
    if n1 == 0 || n2 == 0 {
        return Err(invalid("need N1 >= 1 and N2 >= 1"));
    }
    if *lambda <= Rational::zero() {
        return Err(invalid("need lambda > 0"));
    }
    let top = (n1 + 1) * n2 + 1;
    let c = geometric(lambda, top);
    let big_r = &c + int(top as i64);
    let r = match r {
        Some(r) if *r < big_r => {
            return Err(invalid(format!(
                "need r >= {big_r} so probabilities stay in [0, 1]"
            )))
        }
        Some(r) => r.clone(),
        None => power_of_ten_above(&(&big_r - Rational::one())),
    };
    let n_states = (n1 + 1) as usize;
    let mut initial_actions: Vec<InitialAction> = (0..n1 as usize)
        .map(|i| initial(&format!("a{}", i + 1), Rational::zero(), unit(n_states, i)))
        .collect();
    initial_actions.push(initial(
        &format!("a{}", n1 + 1),
        c.clone(),
        unit(n_states, n1 as usize),
    ));

    let mut states = Vec::with_capacity(n_states);
    for s in 1..=n1 {
        let mut finals: Vec<FinalAction> = (1..=n2)
            .map(|j| {
                let index = s * n2 + j;
                let cost = geometric(lambda, index);
                let reward = &cost + int(index as i64);
                final_action(&format!("a{j}"), cost, two_point(reward / &r))
            })
            .collect();
        finals.push(final_action("null", Rational::zero(), unit(2, 0)));
        states.push(State {
            name: format!("s{s}"),
            final_actions: finals,
        });
    }
    let p = &big_r / &r;
    states.push(State {
        name: format!("s{}", n1 + 1),
        final_actions: (1..=n2 + 1)
            .map(|j| final_action(&format!("a{j}"), Rational::zero(), two_point(p.clone())))
            .collect(),
    });
    Ok(Instance {
        rewards: vec![Rational::zero(), r],
        initial_actions,
        states,
    })
}

/// Stochastic first stage: one free initial action spreads uniformly over
/// `2S+1` states. In states `1..=S` each productive final action also puts
/// mass `ε` on a reward-free outcome, a state-specific one for action `N2`
/// and a shared one otherwise; the remaining states produce reward-free
/// outcomes only.
pub fn thm5(
    s_count: u32,
    n2: u32,
    lambda: &Rational,
    epsilon: &Rational,
    r: Option<&Rational>,
) -> Result<Instance, Error> {
    if s_count == 0 || n2 == 0 {
        return Err(invalid("need S >= 1 and N2 >= 1"));
    }
    if *lambda <= Rational::zero() {
        return Err(invalid("need lambda > 0"));
    }
    if !(epsilon.is_positive() && *epsilon < Rational::one()) {
        return Err(invalid("need 0 < epsilon < 1"));
    }
    let one_minus_eps = Rational::one() - epsilon;
    let top = s_count * n2 + n2;
    let max_reward = geometric(lambda, top) + int(top as i64);
    let r = match r {
        Some(r) if r * &one_minus_eps <= max_reward => {
            return Err(invalid(format!(
                "need r(1-epsilon) > {max_reward} so probabilities stay in [0, 1]"
            )))
        }
        Some(r) => r.clone(),
        None => power_of_ten_above(&(&max_reward / &one_minus_eps)),
    };
    let m = (s_count + 3) as usize;
    let n_states = (2 * s_count + 1) as usize;
    let mut rewards = vec![Rational::zero(); m];
    rewards[1] = r.clone();

    let mut states = Vec::with_capacity(n_states);
    for s in 1..=s_count {
        let mut finals: Vec<FinalAction> = (1..=n2)
            .map(|j| {
                let index = s * n2 + j;
                let cost = geometric(lambda, index);
                let p = (&cost + int(index as i64)) / &r;
                let mut dist = vec![Rational::zero(); m];
                dist[0] = &one_minus_eps - &p;
                dist[1] = p;
                let side = if j == n2 { s as usize + 1 } else { m - 1 };
                dist[side] = epsilon.clone();
                final_action(&format!("a{j}"), cost, dist)
            })
            .collect();
        finals.push(final_action("null", Rational::zero(), unit(m, 0)));
        states.push(State {
            name: format!("s{s}"),
            final_actions: finals,
        });
    }
    for s in s_count + 1..=2 * s_count + 1 {
        let target = (s - s_count + 1) as usize;
        let mut finals: Vec<FinalAction> = (1..=n2)
            .map(|j| final_action(&format!("a{j}"), Rational::zero(), unit(m, target)))
            .collect();
        finals.push(final_action("null", Rational::zero(), unit(m, 0)));
        states.push(State {
            name: format!("s{s}"),
            final_actions: finals,
        });
    }
    let share = ratio(1, n_states as i64);
    Ok(Instance {
        rewards,
        initial_actions: vec![initial("a1", Rational::zero(), vec![share; n_states])],
        states,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyId {
    Example1,
    Example2,
    Thm2,
    Thm3,
    Thm5,
    RandomTree,
    RandomStochastic,
    RandomDeterministic,
    RandomGeneral,
}

impl FamilyId {
    pub const ALL: [FamilyId; 9] = [
        FamilyId::Example1,
        FamilyId::Example2,
        FamilyId::Thm2,
        FamilyId::Thm3,
        FamilyId::Thm5,
        FamilyId::RandomTree,
        FamilyId::RandomStochastic,
        FamilyId::RandomDeterministic,
        FamilyId::RandomGeneral,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FamilyId::Example1 => "example1",
            FamilyId::Example2 => "example2",
            FamilyId::Thm2 => "thm2",
            FamilyId::Thm3 => "thm3",
            FamilyId::Thm5 => "thm5",
            FamilyId::RandomTree => "random_tree",
            FamilyId::RandomStochastic => "random_stochastic",
            FamilyId::RandomDeterministic => "random_deterministic",
            FamilyId::RandomGeneral => "random_general",
        }
    }

    /// Accepted parameter names.
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            FamilyId::Example1 | FamilyId::Example2 => &[],
            FamilyId::Thm2 => &["p", "q", "c", "x"],
            FamilyId::Thm3 => &["N1", "N2", "lambda", "r"],
            FamilyId::Thm5 => &["S", "N2", "lambda", "epsilon", "r"],
            _ => &["seed", "states", "initial", "finals", "outcomes"],
        }
    }

    fn random_class(self) -> Option<RandomClass> {
        match self {
            FamilyId::RandomTree => Some(RandomClass::Tree),
            FamilyId::RandomStochastic => Some(RandomClass::StochasticFirstStage),
            FamilyId::RandomDeterministic => Some(RandomClass::DeterministicFirstStage),
            FamilyId::RandomGeneral => Some(RandomClass::General),
            _ => None,
        }
    }
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        FamilyId::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown family {s:?}")))
    }
}

/// A family plus named parameters. Missing parameters take defaults:
/// `p=9/10, q=1/2, c=1, x=20`; `N1=N2=2`; `S=N2=2`; `lambda=10`;
/// `epsilon=1/1000`; `r` the smallest admissible power of ten; random
/// families use [`RandomSizes::default`] and seed 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyParams {
    pub family: FamilyId,
    pub values: BTreeMap<String, Rational>,
}

impl FamilyParams {
    pub fn new(family: FamilyId) -> Self {
        FamilyParams {
            family,
            values: BTreeMap::new(),
        }
    }

    pub fn with(mut self, name: &str, value: Rational) -> Self {
        self.values.insert(name.to_string(), value);
        self
    }

    fn get(&self, name: &str, default: Rational) -> Rational {
        self.values.get(name).cloned().unwrap_or(default)
    }

    fn count(&self, name: &str, default: u32) -> Result<u32, Error> {
        match self.values.get(name) {
            None => Ok(default),
            Some(v) if v.is_integer() && !v.is_negative() => v
                .to_integer()
                .to_u32()
                .ok_or_else(|| invalid(format!("{name} is too large"))),
            Some(v) => Err(invalid(format!(
                "{name} must be a nonnegative integer, got {v}"
            ))),
        }
    }
}

pub fn generate(params: &FamilyParams) -> Result<Instance, Error> {
    let allowed = params.family.parameters();
    if let Some(name) = params
        .values
        .keys()
        .find(|k| !allowed.contains(&k.as_str()))
    {
        return Err(invalid(format!(
            "unknown parameter {name:?} for family {}",
            params.family
        )));
    }
    let lambda = || params.get("lambda", int(10));
    match params.family {
        FamilyId::Example1 => Ok(example1()),
        FamilyId::Example2 => Ok(example2()),
        FamilyId::Thm2 => thm2(
            &params.get("p", ratio(9, 10)),
            &params.get("q", ratio(1, 2)),
            &params.get("c", int(1)),
            &params.get("x", int(20)),
        ),
        FamilyId::Thm3 => thm3(
            params.count("N1", 2)?,
            params.count("N2", 2)?,
            &lambda(),
            params.values.get("r"),
        ),
        FamilyId::Thm5 => thm5(
            params.count("S", 2)?,
            params.count("N2", 2)?,
            &lambda(),
            &params.get("epsilon", ratio(1, 1000)),
            params.values.get("r"),
        ),
        family => {
            let class = family
                .random_class()
                .expect("remaining families are random");
            let d = RandomSizes::default();
            let sizes = RandomSizes {
                states: params.count("states", d.states as u32)? as usize,
                initial_actions: params.count("initial", d.initial_actions as u32)? as usize,
                max_final_actions: params.count("finals", d.max_final_actions as u32)? as usize,
                outcomes: params.count("outcomes", d.outcomes as u32)? as usize,
            };
            let seed = match params.values.get("seed") {
                None => 0,
                Some(v) if v.is_integer() && !v.is_negative() => v
                    .to_integer()
                    .to_u64()
                    .ok_or_else(|| invalid("seed is too large"))?,
                Some(v) => {
                    return Err(invalid(format!(
                        "seed must be a nonnegative integer, got {v}"
                    )))
                }
            };
            random_instance(class, &sizes, seed)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomClass {
    /// Each state owns a disjoint block of outcomes.
    Tree,
    /// A single (free) initial action.
    StochasticFirstStage,
    /// Every initial action reaches one state with certainty.
    DeterministicFirstStage,
    General,
}

/// Upper bounds for random instances; final-action counts per state are
/// drawn from `1..=max_final_actions`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSizes {
    pub states: usize,
    pub initial_actions: usize,
    pub max_final_actions: usize,
    pub outcomes: usize,
}

impl Default for RandomSizes {
    fn default() -> Self {
        RandomSizes {
            states: 3,
            initial_actions: 3,
            max_final_actions: 3,
            outcomes: 3,
        }
    }
}

/// Probability vector on `support` with denominator 4.
fn quarters(rng: &mut ChaCha8Rng, len: usize, support: &[usize]) -> Vec<Rational> {
    let mut counts = vec![0i64; len];
    for _ in 0..4 {
        counts[support[rng.gen_range(0..support.len())]] += 1;
    }
    counts.into_iter().map(|k| ratio(k, 4)).collect()
}

fn half_cost(rng: &mut ChaCha8Rng) -> Rational {
    ratio(rng.gen_range(1..=4), 2)
}

/// A validate-clean random instance of `class`, deterministic in `seed`.
/// Probabilities are multiples of 1/4, costs multiples of 1/2, rewards
/// integers in `0..=6`. Action 0 is always free (initial and final).
pub fn random_instance(
    class: RandomClass,
    sizes: &RandomSizes,
    seed: u64,
) -> Result<Instance, Error> {
    if sizes.states == 0
        || sizes.initial_actions == 0
        || sizes.max_final_actions == 0
        || sizes.outcomes == 0
    {
        return Err(invalid("random sizes must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_states = sizes.states;
    let m = if class == RandomClass::Tree {
        sizes.outcomes.max(n_states)
    } else {
        sizes.outcomes
    };
    let n_initial = if class == RandomClass::StochasticFirstStage {
        1
    } else {
        sizes.initial_actions
    };
    let rewards = (0..m).map(|_| int(rng.gen_range(0..=6))).collect();
    let all_states: Vec<usize> = (0..n_states).collect();

    let initial_actions = (0..n_initial)
        .map(|i| {
            let cost = if i == 0 {
                Rational::zero()
            } else {
                half_cost(&mut rng)
            };
            let transition = if class == RandomClass::DeterministicFirstStage {
                unit(n_states, rng.gen_range(0..n_states))
            } else {
                quarters(&mut rng, n_states, &all_states)
            };
            initial(&format!("i{i}"), cost, transition)
        })
        .collect();

    let states = (0..n_states)
        .map(|s| {
            let support: Vec<usize> = if class == RandomClass::Tree {
                (0..m).filter(|o| o % n_states == s).collect()
            } else {
                (0..m).collect()
            };
            let count = rng.gen_range(1..=sizes.max_final_actions);
            let final_actions = (0..count)
                .map(|j| {
                    let cost = if j == 0 {
                        Rational::zero()
                    } else {
                        half_cost(&mut rng)
                    };
                    final_action(&format!("f{j}"), cost, quarters(&mut rng, m, &support))
                })
                .collect();
            State {
                name: format!("s{s}"),
                final_actions,
            }
        })
        .collect();
    Ok(Instance {
        rewards,
        initial_actions,
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{classify, validate, ActionProfile};
    use crate::welfare::{max_welfare, profile_reward};

    #[test]
    fn fixed_instances_are_valid() {
        for family in [
            FamilyId::Example1,
            FamilyId::Example2,
            FamilyId::Thm2,
            FamilyId::Thm3,
            FamilyId::Thm5,
        ] {
            let inst = generate(&FamilyParams::new(family)).unwrap();
            assert!(
                validate(&inst).is_empty(),
                "{family}: {:?}",
                validate(&inst)
            );
        }
    }

    #[test]
    fn example_welfare() {
        assert_eq!(max_welfare(&example1()).max_welfare, ratio(29, 10));
        assert_eq!(max_welfare(&example2()).max_welfare, int(2));
    }

    #[test]
    fn thm2_checks_parameters() {
        let (p, q, c) = (ratio(9, 10), ratio(1, 2), int(1));
        assert!(thm2(&p, &q, &c, &int(20)).is_ok());
        // threshold (1.4)/(0.1) = 14
        assert!(thm2(&p, &q, &c, &int(14)).is_err());
        assert!(thm2(&q, &p, &c, &int(20)).is_err());
        assert!(thm2(&p, &q, &int(30), &int(20)).is_err());
    }

    #[test]
    fn thm3_shape() {
        let inst = generate(&FamilyParams::new(FamilyId::Thm3)).unwrap();
        assert!(classify(&inst).is_deterministic_first_stage);
        assert_eq!(inst.num_initial(), 3);
        assert_eq!(inst.final_counts(), vec![3, 3, 3]);
        assert_eq!(inst.rewards[1], int(100_000_000));
        assert_eq!(max_welfare(&inst).max_welfare, int(7));
        // the costly initial action's state is worth c + 7
        let p = ActionProfile::total(2, &[0, 0, 0]);
        assert_eq!(profile_reward(&inst, &p).unwrap(), int(11_111_117));

        let explicit = FamilyParams::new(FamilyId::Thm3).with("r", int(111_111_170));
        assert!(generate(&explicit).is_ok());
        let small = FamilyParams::new(FamilyId::Thm3).with("r", int(1000));
        assert!(generate(&small).is_err());
    }

    #[test]
    fn thm5_shape() {
        let inst = generate(&FamilyParams::new(FamilyId::Thm5)).unwrap();
        let class = classify(&inst);
        assert!(class.is_stochastic_first_stage);
        assert_eq!(inst.num_outcomes(), 5);
        assert_eq!(inst.num_states(), 5);
        assert_eq!(max_welfare(&inst).max_welfare, int(2));
        // state s3 (first reward-free state) lands on outcome 3
        assert_eq!(inst.states[2].final_actions[0].outcome_dist[2], int(1));
        assert_eq!(inst.states[4].final_actions[1].outcome_dist[4], int(1));
        let bad = FamilyParams::new(FamilyId::Thm5).with("epsilon", int(1));
        assert!(generate(&bad).is_err());
    }

    #[test]
    fn parameter_names_are_checked() {
        let p = FamilyParams::new(FamilyId::Thm2).with("lambda", int(3));
        assert!(generate(&p).is_err());
        let p = FamilyParams::new(FamilyId::Thm3).with("N1", ratio(1, 2));
        assert!(generate(&p).is_err());
        assert_eq!("thm5".parse::<FamilyId>().unwrap(), FamilyId::Thm5);
        assert!("thm4".parse::<FamilyId>().is_err());
    }

    #[test]
    fn random_instances_are_valid_and_reproducible() {
        let sizes = RandomSizes::default();
        for class in [
            RandomClass::Tree,
            RandomClass::StochasticFirstStage,
            RandomClass::DeterministicFirstStage,
            RandomClass::General,
        ] {
            for seed in 0..20 {
                let a = random_instance(class, &sizes, seed).unwrap();
                assert!(validate(&a).is_empty());
                assert_eq!(a, random_instance(class, &sizes, seed).unwrap());
                let c = classify(&a);
                match class {
                    RandomClass::Tree => assert!(c.is_tree),
                    RandomClass::StochasticFirstStage => assert_eq!(a.num_initial(), 1),
                    RandomClass::DeterministicFirstStage => {
                        assert!(c.is_deterministic_first_stage)
                    }
                    RandomClass::General => {}
                }
            }
        }
        let via_params = generate(
            &FamilyParams::new(FamilyId::RandomTree)
                .with("seed", int(7))
                .with("states", int(3)),
        )
        .unwrap();
        assert_eq!(
            via_params,
            random_instance(RandomClass::Tree, &sizes, 7).unwrap()
        );
    }
}
