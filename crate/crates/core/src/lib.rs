//! Solvers for two-stage delegation processes.
//!
//! An agent picks an initial action, lands in an observable intermediate
//! state, then picks a final action that produces an outcome. The principal
//! pays according to a contract: outcome transfers only ([`Contract::Standard`]
//! and [`Contract::Linear`]), additional state transfers
//! ([`Contract::PayHalfway`]), or outcome transfers plus a set of states at
//! which the process stops ([`Contract::TerminateHalfway`]).
//!
//! All quantities are exact rationals. The crate is `no_std` and only needs
//! `alloc`; file formats, simulation and the command line live in the
//! `twostage` crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod agent;
pub mod contracts;
pub mod error;
pub mod generators;
pub mod linear;
pub mod lp;
pub mod model;
pub mod num;
pub mod welfare;

pub use agent::{best_response, evaluate_profile, BestResponse, ProfileValue};
pub use contracts::{
    min_payment_pay, min_payment_standard, min_payment_terminate, optimal_pay,
    optimal_single_stage, optimal_standard, optimal_terminate, pay_to_standard_tree,
    reduce_deterministic, EnumerationCaps, MinPayment, SingleStageInstance, SingleStageSolution,
    SolveReport,
};
pub use error::Error;
pub use generators::{generate, random_instance, FamilyId, FamilyParams, RandomClass, RandomSizes};
pub use linear::{analyze, optimal_linear, state_breakpoints, BreakpointAnalysis, LinearOptimum};
pub use lp::{solve_lp, Constraint, LinearProgram, LpResult, LpSolution, Relation};
pub use model::{
    classify, validate, ActionProfile, Contract, FinalAction, InitialAction, Instance,
    ProcessClass, State, Violation, ViolationRule,
};
pub use num::Rational;
pub use welfare::{max_welfare, profile_cost, profile_reward, WelfareReport};
