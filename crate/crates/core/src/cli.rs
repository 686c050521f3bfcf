//! `socio-grid-sim` command line.
//!
//! Exit codes: 0 on success, 2 when the input is invalid (bad flags,
//! malformed or inconsistent scenario, infeasible plan request), 1 on I/O
//! or internal failures.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dynamics::simulate;
use crate::error::{Error, Result};
use crate::planner::{self, PlanReport, PlannerConfig, Strategy};
use crate::scenario_io::{
    builtin_case_study, write_comparison, write_json, write_results, CaseStudyVariant,
    ScenarioFile, ScheduleSpec,
};
use crate::types::{Scenario, SimulationResult};

pub const OUT_DIR_ENV: &str = "SOCIO_GRID_SIM_OUT";
pub const COMPARISON_CSV: &str = "comparison.csv";
pub const PLAN_JSON: &str = "plan.json";
pub const OBJECTIVE_JSON: &str = "objective.json";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "socio-grid-sim",
    version,
    about = "End-user dissatisfaction under load shedding and media contagion"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario file and write CSVs plus a manifest.
    Simulate(SimulateArgs),
    /// Run the built-in 48-hour case study.
    Casestudy(CaseStudyArgs),
    /// Search for a fair shedding plan over a base scenario.
    Plan(PlanArgs),
    /// Check a scenario file without writing anything.
    Validate(ValidateArgs),
}

/// Parameter overrides applied on top of the scenario before validation.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    #[arg(long)]
    pub omega1: Option<f64>,
    #[arg(long)]
    pub omega2: Option<f64>,
    /// Euler step in hours.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub rate_floor: Option<f64>,
    /// Horizon in hours; schedule breakpoints at or past it are dropped.
    #[arg(long)]
    pub horizon: Option<f64>,
}

impl Overrides {
    pub fn as_map(&self) -> BTreeMap<String, f64> {
        [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("dt_hours", self.dt),
            ("rate_floor", self.rate_floor),
            ("horizon_hours", self.horizon),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k.to_string(), v)))
        .collect()
    }

    pub fn apply(&self, mut doc: ScenarioFile) -> ScenarioFile {
        if let Some(v) = self.omega1 {
            doc.params.omega1 = v;
        }
        if let Some(v) = self.omega2 {
            doc.params.omega2 = v;
        }
        if let Some(v) = self.dt {
            doc.params.dt_hours = v;
        }
        if let Some(v) = self.rate_floor {
            doc.params.rate_floor = v;
        }
        if let Some(h) = self.horizon {
            doc.horizon_hours = h;
            for spec in [
                &mut doc.schedules.electricity,
                &mut doc.schedules.media_access,
            ] {
                match spec {
                    ScheduleSpec::Broadcast(pairs) => truncate(pairs, h),
                    ScheduleSpec::PerAgent(lists) => lists.iter_mut().for_each(|p| truncate(p, h)),
                }
            }
        }
        doc
    }
}

fn truncate(pairs: &mut Vec<[f64; 2]>, horizon: f64) {
    // keep the hour-0 breakpoint so an invalid horizon is reported as such
    let mut first = true;
    pairs.retain(|&[start, _]| std::mem::replace(&mut first, false) || start < horizon);
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, env = OUT_DIR_ENV, default_value = "results")]
    pub out: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Full,
    Limited,
    Both,
}

impl VariantArg {
    fn variants(self) -> Vec<CaseStudyVariant> {
        match self {
            VariantArg::Full => vec![CaseStudyVariant::FullAccess],
            VariantArg::Limited => vec![CaseStudyVariant::LimitedAccess],
            VariantArg::Both => vec![
                CaseStudyVariant::FullAccess,
                CaseStudyVariant::LimitedAccess,
            ],
        }
    }
}

#[derive(Debug, Args)]
pub struct CaseStudyArgs {
    #[arg(long, value_enum, default_value_t = VariantArg::Both)]
    pub variant: VariantArg,
    #[arg(long, env = OUT_DIR_ENV, default_value = "results")]
    pub out: PathBuf,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Exhaustive,
    GreedyRestarts,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, env = OUT_DIR_ENV, default_value = "results")]
    pub out: PathBuf,
    /// Minimum shed energy, in level x hours x agents.
    #[arg(long)]
    pub required_energy: f64,
    /// Slot length in hours; must divide the horizon.
    #[arg(long, default_value_t = 1.0)]
    pub granularity: f64,
    /// Allowed shed levels (0 is always allowed).
    #[arg(long, value_delimiter = ',', default_value = "0,0.5")]
    pub levels: Vec<f64>,
    #[arg(long, value_enum, default_value_t = StrategyArg::GreedyRestarts)]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Weight of the unfairness term.
    #[arg(long, default_value_t = planner::DEFAULT_LAMBDA)]
    pub lambda: f64,
    #[arg(long, default_value_t = planner::DEFAULT_RESTARTS)]
    pub restarts: usize,
    #[command(flatten)]
    pub overrides: Overrides,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub scenario: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let _ = e.print();
            code
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Simulate(args) => run_simulate(&args),
        Command::Casestudy(args) => run_casestudy(&args),
        Command::Plan(args) => run_plan(&args),
        Command::Validate(args) => run_validate(&args),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_input_error() {
                EXIT_INVALID
            } else {
                EXIT_FAILURE
            }
        }
    }
}

fn read_document(path: &Path) -> Result<ScenarioFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn load_with_overrides(path: &Path, overrides: &Overrides) -> Result<Scenario> {
    Ok(overrides.apply(read_document(path)?).into_scenario()?)
}

fn record(result: &mut SimulationResult, command: &str, overrides: &Overrides) {
    result.manifest.overrides = overrides.as_map();
    result
        .manifest
        .extra
        .insert("command".to_string(), command.to_string());
}

pub fn run_simulate(args: &SimulateArgs) -> Result<()> {
    let scenario = load_with_overrides(&args.scenario, &args.overrides)?;
    let mut result = simulate(&scenario)?;
    record(&mut result, "simulate", &args.overrides);
    result.manifest.extra.insert(
        "scenario_path".to_string(),
        args.scenario.display().to_string(),
    );
    let files = write_results(&result, &args.out)?;
    for path in [&files.agents_csv, &files.aggregates_csv, &files.manifest] {
        println!("wrote {}", path.display());
    }
    Ok(())
}

pub fn run_casestudy(args: &CaseStudyArgs) -> Result<()> {
    let scenarios = args
        .variant
        .variants()
        .into_iter()
        .map(|v| {
            let doc = args
                .overrides
                .apply(ScenarioFile::from_scenario(&builtin_case_study(v)));
            Ok((v, doc.into_scenario()?))
        })
        .collect::<Result<Vec<_>>>()?;

    let results: Vec<(CaseStudyVariant, SimulationResult)> = std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|(v, s)| scope.spawn(move || simulate(s).map(|r| (*v, r))))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect::<Result<Vec<_>>>()
    })?;

    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let mut labelled = Vec::new();
    for (variant, mut result) in results {
        record(&mut result, "casestudy", &args.overrides);
        result
            .manifest
            .extra
            .insert("variant".to_string(), variant.slug().to_string());
        let dir = args.out.join(variant.slug());
        write_results(&result, &dir)?;
        println!("wrote {}", dir.display());
        labelled.push((variant.slug(), result));
    }
    let runs: Vec<(&str, &SimulationResult)> = labelled.iter().map(|(l, r)| (*l, r)).collect();
    let comparison = args.out.join(COMPARISON_CSV);
    write_comparison(&comparison, &runs)?;
    println!("wrote {}", comparison.display());
    Ok(())
}

pub fn run_plan(args: &PlanArgs) -> Result<()> {
    let base = load_with_overrides(&args.scenario, &args.overrides)?;
    let config = PlannerConfig {
        required_energy: args.required_energy,
        granularity_hours: args.granularity,
        shed_levels: args.levels.clone(),
        strategy: match args.strategy {
            StrategyArg::Exhaustive => Strategy::Exhaustive,
            StrategyArg::GreedyRestarts => Strategy::GreedyRestarts,
        },
        seed: args.seed,
        lambda: args.lambda,
        restarts: args.restarts,
    };
    let outcome = planner::plan_shedding(&base, &config)?;
    let report = PlanReport::new(&base, &config, &outcome)?;

    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    let plan_path = args.out.join(PLAN_JSON);
    let report_path = args.out.join(OBJECTIVE_JSON);
    planner::write_plan(&outcome.plan, &plan_path)?;
    write_json(&report_path, &report)?;
    println!(
        "objective {:.6} (peak {:.6}, unfairness {:.6}) with {} slot(s)",
        outcome.objective.combined,
        outcome.objective.peak_mean_dissatisfaction,
        outcome.objective.unfairness,
        outcome.plan.slots.len()
    );
    println!("wrote {}", plan_path.display());
    println!("wrote {}", report_path.display());
    Ok(())
}

pub fn run_validate(args: &ValidateArgs) -> Result<()> {
    let scenario = load_with_overrides(&args.scenario, &Overrides::default())?;
    println!(
        "ok: {} ({} agents, {} groups, {} h)",
        scenario.label(),
        scenario.n_agents(),
        scenario.network().n_groups(),
        scenario.params().horizon_hours()
    );
    Ok(())
}
