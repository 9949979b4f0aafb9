//! JSON renderings of solver results.
//!
//! Every rational appears twice, as an exact `"p/q"` string and as a
//! decimal rounded to 12 significant digits. Objects are `serde_json` maps,
//! which keep their keys sorted, so output is byte-stable for fixed input.

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use twostage_core::linear::BreakpointAnalysis;
use twostage_core::num::{format_decimal, format_exact};
use twostage_core::welfare::WelfareReport;
use twostage_core::{
    ActionProfile, BestResponse, Contract, Instance, ProcessClass, Rational, SolveReport, Violation,
};

use crate::io::instance_to_json;

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn rational(value: &Rational) -> Value {
    json!({
        "exact": format_exact(value),
        "decimal": format_decimal(value, SIGNIFICANT_DIGITS),
    })
}

fn rationals(values: &[Rational]) -> Value {
    Value::Array(values.iter().map(rational).collect())
}

/// `a / b`, or null when `b` is zero.
pub fn ratio(a: &Rational, b: &Rational) -> Value {
    if *b == Rational::from_integer(0.into()) {
        Value::Null
    } else {
        rational(&(a / b))
    }
}

/// SHA-256 of the canonical instance text.
pub fn digest(instance: &Instance) -> String {
    let hash = Sha256::digest(instance_to_json(instance).as_bytes());
    hash.iter().map(|b| format!("{b:02x}")).collect()
}

pub fn profile(instance: &Instance, p: &ActionProfile) -> Value {
    let names: Vec<Value> = p
        .finals
        .iter()
        .enumerate()
        .map(|(s, j)| match j {
            Some(j) => Value::String(instance.states[s].final_actions[*j].name.clone()),
            None => Value::Null,
        })
        .collect();
    json!({
        "initial": p.initial,
        "initial_name": instance.initial_actions[p.initial].name,
        "finals": p.finals,
        "final_names": names,
        "text": p.to_string(),
    })
}

pub fn contract(c: &Contract) -> Value {
    let mut map = Map::new();
    map.insert("kind".into(), c.kind().into());
    match c {
        Contract::Standard { t } => {
            map.insert("t".into(), rationals(t));
        }
        Contract::Linear { alpha } => {
            map.insert("alpha".into(), rational(alpha));
        }
        Contract::PayHalfway { s, t } => {
            map.insert("s".into(), rationals(s));
            map.insert("t".into(), rationals(t));
        }
        Contract::TerminateHalfway { t, terminate_set } => {
            map.insert("t".into(), rationals(t));
            map.insert("terminate_set".into(), json!(terminate_set));
        }
    }
    Value::Object(map)
}

pub fn best_response(instance: &Instance, br: &BestResponse) -> Value {
    json!({
        "profile": profile(instance, &br.profile),
        "agent_utility": rational(&br.agent_utility),
        "expected_payment": rational(&br.expected_payment),
        "principal_profit": rational(&br.principal_profit),
        "per_state_utility": rationals(&br.per_state_utility),
    })
}

pub fn process_class(class: &ProcessClass) -> Value {
    json!({
        "label": class.label(),
        "is_tree": class.is_tree,
        "is_stochastic_first_stage": class.is_stochastic_first_stage,
        "is_deterministic_first_stage": class.is_deterministic_first_stage,
        "is_general": class.is_general(),
    })
}

pub fn violations(list: &[Violation]) -> Value {
    Value::Array(
        list.iter()
            .map(|v| {
                json!({
                    "rule": format!("{:?}", v.rule),
                    "message": v.to_string(),
                    "initial": v.initial,
                    "state": v.state,
                    "action": v.action,
                })
            })
            .collect(),
    )
}

pub fn welfare(instance: &Instance, w: &WelfareReport) -> Value {
    json!({
        "max_welfare": rational(&w.max_welfare),
        "argmax_profile": profile(instance, &w.argmax_profile),
        "per_state_best": w.per_state_best.iter().enumerate().map(|(s, b)| json!({
            "state": s,
            "state_name": instance.states[s].name,
            "action": b.action,
            "surplus": rational(&b.surplus),
        })).collect::<Vec<_>>(),
    })
}

pub fn solve_report(instance: &Instance, r: &SolveReport) -> Value {
    json!({
        "contract": contract(&r.best_contract),
        "best_response": best_response(instance, &r.best_response),
        "incentivized_profile": profile(instance, &r.incentivized_profile),
        "payment": rational(&r.best_response.expected_payment),
        "profit": rational(&r.profit),
        "welfare": rational(&r.welfare),
        "profit_over_welfare": ratio(&r.profit, &r.welfare),
        "profiles_enumerated": r.profiles_enumerated,
        "termination_sets_enumerated": r.termination_sets_enumerated,
        "infeasible_profiles": r.infeasible_profiles,
        "pruned_profiles": r.pruned_profiles,
    })
}

pub fn breakpoints(instance: &Instance, a: &BreakpointAnalysis) -> Value {
    json!({
        "breakpoints": a.breakpoints.iter().map(|b| json!({
            "alpha": rational(&b.alpha),
            "profile_left": profile(instance, &b.profile_left),
            "profile_right": profile(instance, &b.profile_right),
        })).collect::<Vec<_>>(),
        "segments": a.segments.iter().map(|s| json!({
            "alpha_lo": rational(&s.alpha_lo),
            "alpha_hi": rational(&s.alpha_hi),
            "profile": profile(instance, &s.profile),
            "reward": rational(&s.reward),
            "cost": rational(&s.cost),
            "profit_at_lo": rational(&s.profit_at_lo()),
        })).collect::<Vec<_>>(),
        "optimal": {
            "alpha": rational(&a.optimal.alpha),
            "profit": rational(&a.optimal.profit),
            "profile": profile(instance, &a.optimal.profile),
        },
        "telescoping_bound": rational(&a.telescoping_bound()),
    })
}

/// Plot data: one row per segment, at its left end.
pub fn breakpoints_csv(instance: &Instance, a: &BreakpointAnalysis) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "alpha_exact",
        "alpha_decimal",
        "profit_exact",
        "profit_decimal",
        "profile",
    ])?;
    for s in &a.segments {
        let profit = s.profit_at_lo();
        w.write_record([
            format_exact(&s.alpha_lo),
            format_decimal(&s.alpha_lo, SIGNIFICANT_DIGITS),
            format_exact(&profit),
            format_decimal(&profit, SIGNIFICANT_DIGITS),
            profile_label(instance, &s.profile),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// `initial;final,final,...` with action names and `-` for stopped states.
pub fn profile_label(instance: &Instance, p: &ActionProfile) -> String {
    let finals: Vec<&str> = p
        .finals
        .iter()
        .enumerate()
        .map(|(s, j)| match j {
            Some(j) => instance.states[s].final_actions[*j].name.as_str(),
            None => "-",
        })
        .collect();
    format!(
        "{};{}",
        instance.initial_actions[p.initial].name,
        finals.join(",")
    )
}
