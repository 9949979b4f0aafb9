//! Subcommand dispatch. `run` never prints; it returns the exit code and
//! the documents for stdout and stderr so tests can drive it in-process.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};
use twostage_core::num::parse_rational;
use twostage_core::{
    analyze, best_response, classify, generate, max_welfare, optimal_pay, optimal_standard,
    optimal_terminate, validate, Contract, EnumerationCaps, FamilyId, FamilyParams, Instance,
    Rational, SolveReport,
};

use crate::error::AppError;
use crate::io::{instance_to_json, read_contract, read_instance, write_file};
use crate::report;
use crate::simulate::simulate;

#[derive(Debug, Parser)]
#[command(
    name = "twostage",
    version,
    about = "Optimal contracts for two-stage delegation processes"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ContractKind {
    Standard,
    Linear,
    Pay,
    Terminate,
}

#[derive(Debug, Clone, clap::Args)]
pub struct CapArgs {
    /// Largest number of final-action profiles to enumerate.
    #[arg(long, default_value_t = EnumerationCaps::default().max_profiles)]
    pub profiles_cap: u128,
    /// Largest state count for which termination sets are enumerated.
    #[arg(long, default_value_t = EnumerationCaps::default().max_subset_states)]
    pub subsets_cap: usize,
}

impl CapArgs {
    fn caps(&self) -> EnumerationCaps {
        EnumerationCaps {
            max_profiles: self.profiles_cap,
            max_subset_states: self.subsets_cap,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an instance file against the model's well-formedness rules.
    Validate { file: PathBuf },
    /// Report the structural class of an instance.
    Classify { file: PathBuf },
    /// Maximal welfare and a maximising profile.
    Welfare { file: PathBuf },
    /// Optimal contract of one family.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum)]
        contract: ContractKind,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// The agent's best response to a contract file.
    BestResponse {
        file: PathBuf,
        #[arg(long)]
        contract_file: PathBuf,
    },
    /// Breakpoints and segments of the linear-contract envelope.
    Breakpoints {
        file: PathBuf,
        /// Also write plot data as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Build an instance of a named family.
    Generate {
        #[arg(long)]
        family: String,
        /// `name=value`, repeatable; values are exact decimals or fractions.
        #[arg(long = "param")]
        params: Vec<String>,
        /// Write the instance here instead of to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// All four optima side by side, with ratios.
    Compare {
        file: PathBuf,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Monte Carlo estimate of the principal's profit under a contract.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        contract_file: PathBuf,
        #[arg(long)]
        episodes: u64,
        #[arg(long)]
        seed: u64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate { .. } => "validate",
            Command::Classify { .. } => "classify",
            Command::Welfare { .. } => "welfare",
            Command::Solve { .. } => "solve",
            Command::BestResponse { .. } => "best-response",
            Command::Breakpoints { .. } => "breakpoints",
            Command::Generate { .. } => "generate",
            Command::Compare { .. } => "compare",
            Command::Simulate { .. } => "simulate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// A failed command: the error plus any document explaining it.
struct Failure {
    error: AppError,
    detail: Value,
}

impl From<AppError> for Failure {
    fn from(error: AppError) -> Self {
        Failure {
            error,
            detail: Value::Null,
        }
    }
}

impl From<twostage_core::Error> for Failure {
    fn from(e: twostage_core::Error) -> Self {
        AppError::from(e).into()
    }
}

/// Either a JSON report or raw text (the generated instance).
enum Body {
    Report(Map<String, Value>),
    Text(String),
}

pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Output {
                        code: 0,
                        stdout: text,
                        stderr: String::new(),
                    }
                }
                // usage errors share the parse-error code
                _ => Output {
                    code: 3,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let echo = json!({
        "subcommand": cli.command.name(),
        "args": argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>(),
    });
    let start = Instant::now();
    let result = dispatch(&cli.command);
    let seconds = start.elapsed().as_secs_f64();
    match result {
        Ok(Body::Text(text)) => Output {
            code: 0,
            stdout: text,
            stderr: String::new(),
        },
        Ok(Body::Report(mut doc)) => {
            doc.insert("command".into(), echo);
            doc.insert("wall_clock_seconds".into(), json!(seconds));
            Output {
                code: 0,
                stdout: render(doc),
                stderr: String::new(),
            }
        }
        Err(Failure { error, detail }) => {
            let mut doc = Map::new();
            doc.insert("command".into(), echo);
            doc.insert(
                "error".into(),
                json!({
                    "exit_code": error.exit_code(),
                    "message": error.to_string(),
                }),
            );
            if !detail.is_null() {
                doc.insert("detail".into(), detail);
            }
            doc.insert("wall_clock_seconds".into(), json!(seconds));
            Output {
                code: error.exit_code(),
                stdout: render(doc),
                stderr: format!("twostage: {error}\n"),
            }
        }
    }
}

fn render(doc: Map<String, Value>) -> String {
    let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("reports serialize");
    text.push('\n');
    text
}

/// Reads and validates an instance; invalid instances fail with their
/// violation list.
fn load(path: &Path) -> Result<Instance, Failure> {
    let instance = read_instance(path)?;
    let violations = validate(&instance);
    if violations.is_empty() {
        Ok(instance)
    } else {
        Err(Failure {
            error: AppError::Invalid(format!(
                "{}: {} violation(s)",
                path.display(),
                violations.len()
            )),
            detail: json!({ "violations": report::violations(&violations) }),
        })
    }
}

/// Report skeleton shared by every instance-reading command.
fn header(instance: &Instance) -> Map<String, Value> {
    let mut doc = Map::new();
    doc.insert("instance_digest".into(), report::digest(instance).into());
    doc.insert(
        "process_class".into(),
        report::process_class(&classify(instance)),
    );
    doc
}

fn dispatch(command: &Command) -> Result<Body, Failure> {
    match command {
        Command::Validate { file } => {
            let instance = load(file)?;
            let mut doc = header(&instance);
            doc.insert("ok".into(), true.into());
            doc.insert("violations".into(), json!([]));
            Ok(Body::Report(doc))
        }
        Command::Classify { file } => {
            let instance = load(file)?;
            Ok(Body::Report(header(&instance)))
        }
        Command::Welfare { file } => {
            let instance = load(file)?;
            let mut doc = header(&instance);
            doc.insert(
                "welfare".into(),
                report::welfare(&instance, &max_welfare(&instance)),
            );
            Ok(Body::Report(doc))
        }
        Command::Solve {
            file,
            contract,
            caps,
        } => {
            let instance = load(file)?;
            let result = solve(&instance, *contract, &caps.caps())?;
            let mut doc = header(&instance);
            doc.insert("contract_family".into(), family_name(*contract).into());
            doc.insert("result".into(), result.to_json(&instance));
            Ok(Body::Report(doc))
        }
        Command::BestResponse {
            file,
            contract_file,
        } => {
            let instance = load(file)?;
            let contract = read_contract(contract_file)?;
            let br = best_response(&instance, &contract)?;
            let mut doc = header(&instance);
            doc.insert("contract".into(), report::contract(&contract));
            doc.insert(
                "best_response".into(),
                report::best_response(&instance, &br),
            );
            Ok(Body::Report(doc))
        }
        Command::Breakpoints { file, csv } => {
            let instance = load(file)?;
            let analysis = analyze(&instance)?;
            if let Some(path) = csv {
                let text = report::breakpoints_csv(&instance, &analysis)
                    .map_err(|e| AppError::Io(e.to_string()))?;
                write_file(path, &text)?;
            }
            let mut doc = header(&instance);
            doc.insert("analysis".into(), report::breakpoints(&instance, &analysis));
            Ok(Body::Report(doc))
        }
        Command::Generate {
            family,
            params,
            out,
        } => {
            let params = family_params(family, params)?;
            let instance = generate(&params)?;
            let text = instance_to_json(&instance);
            match out {
                None => Ok(Body::Text(text)),
                Some(path) => {
                    write_file(path, &text)?;
                    let mut doc = header(&instance);
                    doc.insert("family".into(), params.family.as_str().into());
                    doc.insert(
                        "parameters".into(),
                        params
                            .values
                            .iter()
                            .map(|(k, v)| (k.clone(), report::rational(v)))
                            .collect::<Map<_, _>>()
                            .into(),
                    );
                    doc.insert("out".into(), path.display().to_string().into());
                    Ok(Body::Report(doc))
                }
            }
        }
        Command::Compare { file, caps } => {
            let instance = load(file)?;
            let mut doc = header(&instance);
            doc.insert("comparison".into(), compare(&instance, &caps.caps())?);
            Ok(Body::Report(doc))
        }
        Command::Simulate {
            file,
            contract_file,
            episodes,
            seed,
        } => {
            let instance = load(file)?;
            let contract = read_contract(contract_file)?;
            let sim = simulate(&instance, &contract, *episodes, *seed)?;
            let mut doc = header(&instance);
            doc.insert("contract".into(), report::contract(&contract));
            doc.insert(
                "simulation".into(),
                json!({
                    "episodes": sim.episodes,
                    "seed": sim.seed,
                    "mean_profit": sim.mean_profit,
                    "std_error": sim.std_error,
                    "mean_payment": sim.mean_payment,
                    "mean_agent_utility": sim.mean_agent_utility,
                    "analytic_profit": report::rational(&sim.analytic_profit),
                    "z_score": sim.z_score(),
                }),
            );
            Ok(Body::Report(doc))
        }
    }
}

fn family_name(kind: ContractKind) -> &'static str {
    match kind {
        ContractKind::Standard => "standard",
        ContractKind::Linear => "linear",
        ContractKind::Pay => "pay",
        ContractKind::Terminate => "terminate",
    }
}

fn family_params(family: &str, params: &[String]) -> Result<FamilyParams, AppError> {
    let id: FamilyId = family
        .parse()
        .map_err(|e: twostage_core::Error| AppError::Parse(e.to_string()))?;
    let mut fp = FamilyParams::new(id);
    for p in params {
        let (name, value) = p
            .split_once('=')
            .ok_or_else(|| AppError::Parse(format!("parameter {p:?} is not name=value")))?;
        let value = parse_rational(value.trim())?;
        fp = fp.with(name.trim(), value);
    }
    Ok(fp)
}

/// Outcome of one family's solver, uniform across families.
enum Solved {
    Enumerated(SolveReport),
    Linear {
        contract: Contract,
        br: twostage_core::BestResponse,
        welfare: Rational,
        breakpoints: usize,
    },
}

impl Solved {
    fn profit(&self) -> &Rational {
        match self {
            Solved::Enumerated(r) => &r.profit,
            Solved::Linear { br, .. } => &br.principal_profit,
        }
    }

    fn to_json(&self, instance: &Instance) -> Value {
        match self {
            Solved::Enumerated(r) => report::solve_report(instance, r),
            Solved::Linear {
                contract,
                br,
                welfare,
                breakpoints,
            } => json!({
                "contract": report::contract(contract),
                "best_response": report::best_response(instance, br),
                "incentivized_profile": report::profile(instance, &br.profile),
                "payment": report::rational(&br.expected_payment),
                "profit": report::rational(&br.principal_profit),
                "welfare": report::rational(welfare),
                "profit_over_welfare": report::ratio(&br.principal_profit, welfare),
                "breakpoints": breakpoints,
            }),
        }
    }
}

fn solve(
    instance: &Instance,
    kind: ContractKind,
    caps: &EnumerationCaps,
) -> Result<Solved, Failure> {
    Ok(match kind {
        ContractKind::Standard => Solved::Enumerated(optimal_standard(instance, caps)?),
        ContractKind::Pay => Solved::Enumerated(optimal_pay(instance, caps)?),
        ContractKind::Terminate => Solved::Enumerated(optimal_terminate(instance, caps)?),
        ContractKind::Linear => {
            let analysis = analyze(instance)?;
            let contract = Contract::Linear {
                alpha: analysis.optimal.alpha.clone(),
            };
            let br = best_response(instance, &contract)?;
            debug_assert_eq!(br.principal_profit, analysis.optimal.profit);
            Solved::Linear {
                contract,
                br,
                welfare: max_welfare(instance).max_welfare,
                breakpoints: analysis.breakpoints.len(),
            }
        }
    })
}

fn compare(instance: &Instance, caps: &EnumerationCaps) -> Result<Value, Failure> {
    let kinds = [
        ContractKind::Standard,
        ContractKind::Linear,
        ContractKind::Pay,
        ContractKind::Terminate,
    ];
    // independent solves; results are collected in the fixed order above
    let results: Vec<Result<Solved, Failure>> = {
        use rayon::prelude::*;
        kinds
            .par_iter()
            .map(|k| solve(instance, *k, caps))
            .collect()
    };
    let mut solved = Vec::with_capacity(kinds.len());
    for r in results {
        solved.push(r?);
    }
    let welfare = max_welfare(instance).max_welfare;
    let [standard, linear, pay, terminate] = [0, 1, 2, 3].map(|i| solved[i].profit());

    let mut results = Map::new();
    let mut ratios = Map::new();
    for (kind, s) in kinds.iter().zip(&solved) {
        let name = family_name(*kind);
        results.insert(name.into(), s.to_json(instance));
        ratios.insert(
            format!("{name}_over_welfare"),
            report::ratio(s.profit(), &welfare),
        );
    }
    ratios.insert("pay_over_standard".into(), report::ratio(pay, standard));
    ratios.insert(
        "terminate_over_standard".into(),
        report::ratio(terminate, standard),
    );
    ratios.insert(
        "linear_over_standard".into(),
        report::ratio(linear, standard),
    );
    Ok(json!({
        "welfare": report::rational(&welfare),
        "results": results,
        "ratios": ratios,
    }))
}
