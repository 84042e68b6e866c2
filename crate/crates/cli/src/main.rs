//! Batch front-end: load v1 instance files, run equilibrium and
//! information-order computations, and emit deterministic JSON or CSV.
//!
//! Exit codes: 0 on success, 2 when a relation is refuted with a
//! certificate (so shell pipelines can branch on the mathematical outcome
//! without parsing), 1 on any error, reported as one line
//! `CODE: message` on stderr.

mod render;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use socval_core::equilibrium::{
    compute_equilibrium, enumerate_equilibria, evaluate_profile, observable_signal_value,
    Limits, StrategyProfile, TieBreakPolicy,
};
use socval_core::json as schema;
use socval_core::model::{DecisionProblem, InformationStructure, Prior};
use socval_core::orders::{self, Relation, Status};
use socval_core::rational::Rational;
use socval_core::scenarios::{example1, example2, ScenarioBundle, ScenarioKind};
use socval_core::{Error, Result};

#[derive(Parser)]
#[command(name = "socval", version, about = "Exact social-learning equilibria and information orders")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelationArg {
    S,
    Es,
    W,
    #[value(name = "self")]
    SelfComparison,
}

impl From<RelationArg> for Relation {
    fn from(value: RelationArg) -> Relation {
        match value {
            RelationArg::S => Relation::S,
            RelationArg::Es => Relation::ES,
            RelationArg::W => Relation::W,
            RelationArg::SelfComparison => Relation::SelfComparison,
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Prior probability of state H, as a rational like 1/2.
    #[arg(long, default_value = "1/2")]
    prior: String,
    /// Number of agents.
    #[arg(long, default_value_t = 10)]
    horizon: usize,
    /// Tie-break policy: `first` or `pref:a1,a0`.
    #[arg(long = "tie-break", default_value = "first")]
    tie_break: String,
    /// Cap on surviving history nodes.
    #[arg(long = "cap-nodes", default_value_t = socval_core::equilibrium::DEFAULT_NODE_CAP)]
    cap_nodes: usize,
    /// Cap on posterior atoms in repeated-draw laws.
    #[arg(long = "cap-atoms", default_value_t = socval_core::model::DEFAULT_ATOM_CAP)]
    cap_atoms: usize,
    /// Cap on enumerated tie resolutions.
    #[arg(long = "enumerate-cap", default_value_t = socval_core::equilibrium::DEFAULT_ENUMERATION_CAP)]
    enumerate_cap: usize,
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,
    /// Write output to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn prior(&self) -> Result<Prior> {
        Prior::new(self.prior.parse()?)
    }

    fn limits(&self) -> Limits {
        Limits {
            max_nodes: self.cap_nodes,
            max_atoms: self.cap_atoms,
            max_equilibria: self.enumerate_cap,
            ..Limits::default()
        }
    }

    fn tiebreak(&self, d: &DecisionProblem) -> Result<TieBreakPolicy> {
        let spec = self.tie_break.trim();
        if spec == "first" {
            return Ok(TieBreakPolicy::FirstInActionOrder);
        }
        if let Some(list) = spec.strip_prefix("pref:") {
            let order = list
                .split(',')
                .map(|label| {
                    d.action_index(label.trim()).ok_or_else(|| {
                        Error::Parse(format!("unknown action {label:?} in tie-break list"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(TieBreakPolicy::PreferenceList(order));
        }
        Err(Error::Parse(format!(
            "tie-break must be `first` or `pref:<actions>`, got {spec:?}"
        )))
    }

    fn emit(&self, text: &str) -> Result<()> {
        match &self.out {
            Some(path) => fs::write(path, text)
                .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify an experiment and print its private-belief distribution.
    Inspect {
        #[arg(long)]
        pi: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Decide Blackwell dominance both ways, with kernel certificates.
    Blackwell {
        #[arg(long)]
        pi: PathBuf,
        #[arg(long)]
        piprime: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Compute (or enumerate, or evaluate) equilibria of an instance.
    Equilibrium {
        #[arg(long)]
        pi: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        /// Enumerate all pure tie resolutions instead of computing one.
        #[arg(long)]
        enumerate: bool,
        /// Evaluate this profile file instead of computing an equilibrium.
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Also write the resulting profile to this path.
        #[arg(long = "emit-profile")]
        emit_profile: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Observable-signal benchmark values of an instance.
    Vbar {
        #[arg(long)]
        pi: PathBuf,
        #[arg(long)]
        problem: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Decide an information order; exits 2 when refuted.
    Order {
        #[arg(long, value_enum)]
        relation: RelationArg,
        #[arg(long)]
        pi: PathBuf,
        #[arg(long)]
        piprime: Option<PathBuf>,
        /// Check this decision problem first, ahead of the generated family.
        #[arg(long)]
        problem: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Search for a strong-order refutation and dump the full gap table.
    Refute {
        #[arg(long)]
        pi: PathBuf,
        #[arg(long)]
        piprime: PathBuf,
        #[arg(long)]
        problem: Option<PathBuf>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Rebuild a worked example and compare the engine to its closed forms.
    Reproduce {
        /// `example1` or `example2`.
        scenario: String,
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        delta: Option<String>,
        #[arg(long = "eps-prime")]
        eps_prime: Option<String>,
        #[arg(long = "delta-prime")]
        delta_prime: Option<String>,
        #[arg(long)]
        r: Option<String>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Sweep threshold problems over a uniform grid and tabulate gaps.
    Sweep {
        #[arg(long)]
        pi: PathBuf,
        #[arg(long)]
        piprime: PathBuf,
        /// Number of grid cells; thresholds are j/grid for 0 < j < grid.
        #[arg(long, default_value_t = 20)]
        grid: u32,
        #[command(flatten)]
        common: CommonArgs,
    },
}

fn read_json(path: &PathBuf) -> Result<serde_json::Value> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    schema::parse(&text)
}

fn load_experiment(path: &PathBuf) -> Result<InformationStructure> {
    schema::experiment_from_json(&read_json(path)?)
}

fn load_problem(path: &PathBuf) -> Result<DecisionProblem> {
    schema::problem_from_json(&read_json(path)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Inspect { pi, common } => {
            let pi = load_experiment(&pi)?;
            let prior = common.prior()?;
            let text = render::inspect(&pi, &prior, common.output);
            common.emit(&text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Blackwell { pi, piprime, common } => {
            let pi = load_experiment(&pi)?;
            let piprime = load_experiment(&piprime)?;
            let text = render::blackwell(&pi, &piprime, common.output)?;
            common.emit(&text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Equilibrium {
            pi,
            problem,
            enumerate,
            profile,
            emit_profile,
            common,
        } => {
            let pi = load_experiment(&pi)?;
            let d = load_problem(&problem)?;
            let prior = common.prior()?;
            let limits = common.limits();
            let vbar = observable_signal_value(&d, &pi, &prior, common.horizon, &limits)?;
            let text = if enumerate {
                let outcome = enumerate_equilibria(&d, &pi, &prior, common.horizon, &limits)?;
                render::enumeration(&d, &pi, &outcome, &vbar, common.output)
            } else {
                let result = match &profile {
                    Some(path) => {
                        let value = read_json(path)?;
                        let profile = StrategyProfile::from_json(&value, &d, &pi)?;
                        evaluate_profile(&d, &pi, &prior, &profile)?
                    }
                    None => {
                        let tiebreak = common.tiebreak(&d)?;
                        compute_equilibrium(&d, &pi, &prior, common.horizon, &tiebreak, &limits)?
                    }
                };
                if let Some(path) = &emit_profile {
                    let text =
                        schema::to_canonical_string(&result.profile.to_json(&d, &pi));
                    fs::write(path, text).map_err(|e| {
                        Error::Parse(format!("cannot write {}: {e}", path.display()))
                    })?;
                }
                render::equilibrium(&d, &pi, &result, &vbar, common.output)
            };
            common.emit(&text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Vbar { pi, problem, common } => {
            let pi = load_experiment(&pi)?;
            let d = load_problem(&problem)?;
            let prior = common.prior()?;
            let vbar = observable_signal_value(&d, &pi, &prior, common.horizon, &common.limits())?;
            let text = render::vbar(&vbar, common.output);
            common.emit(&text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Order {
            relation,
            pi,
            piprime,
            problem,
            common,
        } => {
            let pi = load_experiment(&pi)?;
            let piprime = piprime.as_ref().map(load_experiment).transpose()?;
            let problems: Vec<DecisionProblem> = problem
                .as_ref()
                .map(load_problem)
                .transpose()?
                .into_iter()
                .collect();
            let prior = common.prior()?;
            let verdict = orders::decide(
                relation.into(),
                &pi,
                piprime.as_ref(),
                &prior,
                common.horizon,
                &problems,
                &common.limits(),
            )?;
            let text = render::verdict(&verdict, &pi, common.output);
            common.emit(&text)?;
            Ok(if verdict.status == Status::Refuted {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Refute { pi, piprime, problem, common } => {
            let pi = load_experiment(&pi)?;
            let piprime = load_experiment(&piprime)?;
            let problems: Vec<DecisionProblem> = problem
                .as_ref()
                .map(load_problem)
                .transpose()?
                .into_iter()
                .collect();
            let prior = common.prior()?;
            let limits = common.limits();
            let (text, refuted) = render::refutation_table(
                &pi,
                &piprime,
                &prior,
                common.horizon,
                &problems,
                &limits,
                common.output,
            )?;
            common.emit(&text)?;
            Ok(if refuted { ExitCode::from(2) } else { ExitCode::SUCCESS })
        }
        Command::Reproduce {
            scenario,
            eps,
            delta,
            eps_prime,
            delta_prime,
            r,
            common,
        } => {
            let parse = |s: &Option<String>, default: &str| -> Result<Rational> {
                s.as_deref().unwrap_or(default).parse()
            };
            let bundle: ScenarioBundle = match scenario.as_str() {
                "example1" => example1(
                    parse(&eps, "2/5")?,
                    parse(&delta, "1/5")?,
                    parse(&eps_prime, "3/5")?,
                    parse(&r, "7/10")?,
                    common.prior()?,
                )?,
                "example2" => example2(
                    parse(&eps, "1/2")?,
                    parse(&delta, "1/10")?,
                    parse(&eps_prime, "3/5")?,
                    parse(&delta_prime, "1/5")?,
                )?,
                other => {
                    return Err(Error::Parse(format!(
                        "unknown scenario {other:?}; use example1 or example2"
                    )))
                }
            };
            let text = match bundle.kind {
                ScenarioKind::Example1 => {
                    render::reproduce_example1(&bundle, common.horizon, &common.limits(), common.output)?
                }
                ScenarioKind::Example2 => {
                    render::reproduce_example2(&bundle, &common.limits(), common.output)?
                }
            };
            common.emit(&text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep { pi, piprime, grid, common } => {
            if grid < 2 {
                return Err(Error::ParameterViolation("grid must be at least 2".into()));
            }
            let pi = load_experiment(&pi)?;
            let piprime = load_experiment(&piprime)?;
            let prior = common.prior()?;
            let text = render::sweep_table(
                &pi,
                &piprime,
                &prior,
                common.horizon,
                grid,
                &common.limits(),
                common.output,
            )?;
            common.emit(&text)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("USAGE_ERROR: {e}");
            return ExitCode::FAILURE;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}: {e}", e.code());
            ExitCode::FAILURE
        }
    }
}
