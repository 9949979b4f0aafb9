//! Instance and contract files.
//!
//! Both are JSON documents whose numbers are strings, either decimal
//! (`"0.9"`) or ratios (`"9/10"`), so every value parses exactly. Plain JSON
//! integers are accepted as a convenience.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use twostage_core::num::{format_exact, parse_rational};
use twostage_core::{Contract, FinalAction, InitialAction, Instance, Rational, State};

use crate::error::AppError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumberDoc {
    Text(String),
    Integer(i64),
}

impl NumberDoc {
    fn exact(value: &Rational) -> Self {
        NumberDoc::Text(format_exact(value))
    }

    fn parse(&self) -> Result<Rational, AppError> {
        match self {
            NumberDoc::Text(s) => parse_rational(s).map_err(AppError::from),
            NumberDoc::Integer(n) => Ok(Rational::from_integer((*n).into())),
        }
    }
}

fn parse_all(values: &[NumberDoc]) -> Result<Vec<Rational>, AppError> {
    values.iter().map(NumberDoc::parse).collect()
}

fn exact_all(values: &[Rational]) -> Vec<NumberDoc> {
    values.iter().map(NumberDoc::exact).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub rewards: Vec<NumberDoc>,
    pub initial_actions: Vec<InitialDoc>,
    pub states: Vec<StateDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDoc {
    pub name: String,
    pub cost: NumberDoc,
    pub transition: Vec<NumberDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub name: String,
    pub final_actions: Vec<FinalDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinalDoc {
    pub name: String,
    pub cost: NumberDoc,
    pub outcome_dist: Vec<NumberDoc>,
}

/// Contract file; `terminate_set` lists state indices.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ContractDoc {
    Standard {
        t: Vec<NumberDoc>,
    },
    Linear {
        alpha: NumberDoc,
    },
    PayHalfway {
        s: Vec<NumberDoc>,
        t: Vec<NumberDoc>,
    },
    TerminateHalfway {
        t: Vec<NumberDoc>,
        terminate_set: Vec<usize>,
    },
}

impl InstanceDoc {
    pub fn from_instance(instance: &Instance) -> Self {
        InstanceDoc {
            rewards: exact_all(&instance.rewards),
            initial_actions: instance
                .initial_actions
                .iter()
                .map(|ia| InitialDoc {
                    name: ia.name.clone(),
                    cost: NumberDoc::exact(&ia.cost),
                    transition: exact_all(&ia.transition),
                })
                .collect(),
            states: instance
                .states
                .iter()
                .map(|st| StateDoc {
                    name: st.name.clone(),
                    final_actions: st
                        .final_actions
                        .iter()
                        .map(|fa| FinalDoc {
                            name: fa.name.clone(),
                            cost: NumberDoc::exact(&fa.cost),
                            outcome_dist: exact_all(&fa.outcome_dist),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance, AppError> {
        Ok(Instance {
            rewards: parse_all(&self.rewards)?,
            initial_actions: self
                .initial_actions
                .iter()
                .map(|ia| {
                    Ok(InitialAction {
                        name: ia.name.clone(),
                        cost: ia.cost.parse()?,
                        transition: parse_all(&ia.transition)?,
                    })
                })
                .collect::<Result<_, AppError>>()?,
            states: self
                .states
                .iter()
                .map(|st| {
                    Ok(State {
                        name: st.name.clone(),
                        final_actions: st
                            .final_actions
                            .iter()
                            .map(|fa| {
                                Ok(FinalAction {
                                    name: fa.name.clone(),
                                    cost: fa.cost.parse()?,
                                    outcome_dist: parse_all(&fa.outcome_dist)?,
                                })
                            })
                            .collect::<Result<_, AppError>>()?,
                    })
                })
                .collect::<Result<_, AppError>>()?,
        })
    }
}

impl ContractDoc {
    pub fn from_contract(contract: &Contract) -> Self {
        match contract {
            Contract::Standard { t } => ContractDoc::Standard { t: exact_all(t) },
            Contract::Linear { alpha } => ContractDoc::Linear {
                alpha: NumberDoc::exact(alpha),
            },
            Contract::PayHalfway { s, t } => ContractDoc::PayHalfway {
                s: exact_all(s),
                t: exact_all(t),
            },
            Contract::TerminateHalfway { t, terminate_set } => ContractDoc::TerminateHalfway {
                t: exact_all(t),
                terminate_set: terminate_set.iter().copied().collect(),
            },
        }
    }

    pub fn to_contract(&self) -> Result<Contract, AppError> {
        Ok(match self {
            ContractDoc::Standard { t } => Contract::Standard { t: parse_all(t)? },
            ContractDoc::Linear { alpha } => Contract::Linear {
                alpha: alpha.parse()?,
            },
            ContractDoc::PayHalfway { s, t } => Contract::PayHalfway {
                s: parse_all(s)?,
                t: parse_all(t)?,
            },
            ContractDoc::TerminateHalfway { t, terminate_set } => Contract::TerminateHalfway {
                t: parse_all(t)?,
                terminate_set: terminate_set.iter().copied().collect::<BTreeSet<_>>(),
            },
        })
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, AppError> {
    let doc: InstanceDoc =
        serde_json::from_str(text).map_err(|e| AppError::Parse(format!("instance: {e}")))?;
    doc.to_instance()
}

pub fn parse_contract(text: &str) -> Result<Contract, AppError> {
    let doc: ContractDoc =
        serde_json::from_str(text).map_err(|e| AppError::Parse(format!("contract: {e}")))?;
    doc.to_contract()
}

/// Canonical text of an instance: exact numbers, fixed field order.
pub fn instance_to_json(instance: &Instance) -> String {
    let mut text = serde_json::to_string_pretty(&InstanceDoc::from_instance(instance))
        .expect("instance documents serialize");
    text.push('\n');
    text
}

pub fn contract_to_json(contract: &Contract) -> String {
    let mut text = serde_json::to_string_pretty(&ContractDoc::from_contract(contract))
        .expect("contract documents serialize");
    text.push('\n');
    text
}

fn read(path: &Path) -> Result<String, AppError> {
    fs::read_to_string(path).map_err(|e| AppError::Io(format!("{}: {e}", path.display())))
}

pub fn read_instance(path: &Path) -> Result<Instance, AppError> {
    parse_instance(&read(path)?)
}

pub fn read_contract(path: &Path) -> Result<Contract, AppError> {
    parse_contract(&read(path)?)
}

pub fn write_file(path: &Path, text: &str) -> Result<(), AppError> {
    fs::write(path, text).map_err(|e| AppError::Io(format!("{}: {e}", path.display())))
}
