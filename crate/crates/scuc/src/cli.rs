//! Subcommands behind the `scuc` binary.
//!
//! Exit codes: 0 success, 1 configuration or input error, 2 infeasible (or
//! otherwise no solution), 3 solver adapter failure, 4 verification failed.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use scuc_core::oracle::{OracleLimits, StartupMode};
use scuc_core::{PowerCase, Solver, Variant};

use crate::case_file::load_case;
use crate::config::{parse_variant, seconds, ConfigError, RunConfig};
use crate::report::{summary, write_report_file, write_solution_file, write_study};
use crate::solver::{make_solver, SolverKind};
use crate::sweep::{solve_one, sweep, SolveOutcome};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_INFEASIBLE: u8 = 2;
pub const EXIT_ADAPTER: u8 = 3;
pub const EXIT_VERIFY: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "scuc", version, about = "Security-constrained unit commitment with flexible data-center load")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build and solve one (variant, beta) instance.
    Run {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "fixed-dc")]
        variant: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        beta: f64,
    },
    /// Solve every variant over the beta grid and write the study artifacts.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated variants (default: all five).
        #[arg(long, value_delimiter = ',')]
        variants: Option<Vec<String>>,
        /// Comma-separated flexibility ratios.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        betas: Option<Vec<f64>>,
    },
    /// Write the model of one instance as fixed-format MPS plus a name map.
    ExportMps {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "fixed-dc")]
        variant: String,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        beta: f64,
        /// Output file (default: `<out>/model.mps`).
        #[arg(long)]
        path: Option<PathBuf>,
    },
    /// Check a case file and print what was found.
    Validate {
        /// Case file or bundled case name.
        case: PathBuf,
    },
    /// Certify solve() against brute-force enumeration on a small case.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_delimiter = ',')]
        variants: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.5", allow_negative_numbers = true)]
        betas: Vec<f64>,
        /// Also try every superset of the minimal start-up pattern.
        #[arg(long)]
        exhaustive: bool,
    },
}

/// Flags shared by the solving subcommands; each overrides the config file.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML run configuration (default: the bundled study defaults).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Case file or bundled case name.
    #[arg(long)]
    pub case: Option<PathBuf>,
    /// highs or cbc (also taken from SCUC_SOLVER).
    #[arg(long)]
    pub solver: Option<String>,
    /// External solver binary (also taken from SCUC_SOLVER_BIN).
    #[arg(long)]
    pub solver_bin: Option<PathBuf>,
    /// Violation penalty M, $ per p.u.h.
    #[arg(long)]
    pub penalty: Option<f64>,
    /// Curtailment tie-breaker, $ per p.u.h.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub mip_gap: Option<f64>,
    /// Seconds.
    #[arg(long)]
    pub time_limit: Option<f64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Do not wrap the ramp limits from the last hour to the first.
    #[arg(long)]
    pub no_cyclic_ramp: bool,
    /// Hand the whole model to the solver instead of screening contingencies.
    #[arg(long)]
    pub full_model: bool,
    #[arg(long)]
    pub overload_threshold: Option<f64>,
    /// line-hours or distinct-lines.
    #[arg(long)]
    pub aggregation: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

impl CommonArgs {
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::study_defaults(),
        };
        if let Ok(kind) = std::env::var(crate::solver::SOLVER_ENV) {
            cfg.solver = kind.parse().map_err(ConfigError::Invalid)?;
        }
        if let Some(v) = &self.case {
            cfg.case = v.clone();
        }
        if let Some(v) = &self.solver {
            cfg.solver = v.parse().map_err(ConfigError::Invalid)?;
        }
        if let Some(v) = &self.solver_bin {
            cfg.solver_binary = Some(v.clone());
        }
        if let Some(v) = self.penalty {
            cfg.penalty = v;
        }
        if let Some(v) = self.epsilon {
            cfg.curtailment_epsilon = v;
        }
        if let Some(v) = self.mip_gap {
            cfg.mip_gap = v;
        }
        if let Some(v) = self.time_limit {
            cfg.time_limit = Some(seconds(v)?);
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        if self.no_cyclic_ramp {
            cfg.cyclic_ramp = false;
        }
        if self.full_model {
            cfg.screening = false;
        }
        if let Some(v) = self.overload_threshold {
            cfg.overload_threshold = v;
        }
        if let Some(v) = &self.aggregation {
            cfg.overload_aggregation = v.parse().map_err(ConfigError::Invalid)?;
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        Ok(cfg)
    }
}

/// A failure that ends the command with a specific exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn config(e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: e.to_string(),
        }
    }
    fn adapter(e: impl std::fmt::Display) -> Self {
        Self {
            code: EXIT_ADAPTER,
            message: e.to_string(),
        }
    }
}

pub fn main_with(cli: Cli) -> ExitCode {
    let result = match cli.command {
        Command::Run { common, variant, beta } => cmd_run(&common, &variant, beta),
        Command::Sweep {
            common,
            variants,
            betas,
        } => cmd_sweep(&common, variants, betas),
        Command::ExportMps {
            common,
            variant,
            beta,
            path,
        } => cmd_export_mps(&common, &variant, beta, path),
        Command::Validate { case } => cmd_validate(&case),
        Command::Verify {
            common,
            variants,
            betas,
            exhaustive,
        } => cmd_verify(&common, variants, betas, exhaustive),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn load(cfg: &RunConfig) -> Result<PowerCase, Failure> {
    let loaded = load_case(&cfg.case).map_err(Failure::config)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(loaded.case)
}

fn solver_for(cfg: &RunConfig) -> Result<Box<dyn Solver>, Failure> {
    let bin = cfg
        .solver_binary
        .clone()
        .or_else(|| std::env::var_os(crate::solver::SOLVER_BIN_ENV).map(PathBuf::from));
    let bin = if cfg.solver == SolverKind::Cbc { bin } else { None };
    make_solver(cfg.solver, bin.as_deref()).map_err(Failure::adapter)
}

fn prepared(common: &CommonArgs) -> Result<(RunConfig, PowerCase), Failure> {
    let cfg = common.resolve().map_err(Failure::config)?;
    cfg.validate().map_err(Failure::config)?;
    let case = load(&cfg)?;
    Ok((cfg, case))
}

pub fn cmd_run(common: &CommonArgs, variant: &str, beta: f64) -> Result<u8, Failure> {
    let (mut cfg, case) = prepared(common)?;
    let variant = parse_variant(variant).map_err(Failure::config)?;
    cfg.variants = vec![variant];
    cfg.betas = vec![beta];
    cfg.validate().map_err(Failure::config)?;
    cfg.prepare_out().map_err(Failure::config)?;
    let solver = solver_for(&cfg)?;
    let outcome = solve_one(&case, &cfg, solver.as_ref(), variant, beta, |t| {
        eprintln!(
            "screening round {}: {} contingency blocks active, master {} ({:.1} s), {} blocks violated",
            t.round,
            t.active_blocks,
            t.master_status,
            t.master_time.as_secs_f64(),
            t.violated
        );
    });
    let (cell, written) = match outcome {
        SolveOutcome::Build(e) => return Err(Failure::config(e)),
        SolveOutcome::Adapter(e) => return Err(Failure::adapter(e)),
        SolveOutcome::NoSolution { cell } => (cell, None),
        SolveOutcome::Solved { sm, solution, cell } => (cell, Some((sm, solution))),
    };
    let report = scuc_core::metrics::StudyReport::new(vec![cell.row.clone()], cfg.overload_aggregation);
    write_report_file(&report, &cfg.out.join("report.csv")).map_err(Failure::config)?;
    let text = summary(&cell.row);
    std::fs::write(cfg.out.join("summary.txt"), &text).map_err(Failure::config)?;
    print!("{text}");
    let Some((sm, solution)) = written else {
        return Ok(EXIT_INFEASIBLE);
    };
    write_solution_file(&sm.model, &solution, case.mva_base, &cfg.out.join("solution.csv")).map_err(Failure::config)?;
    for f in cell.check_failures() {
        eprintln!("check failed: {f}");
    }
    Ok(EXIT_OK)
}

pub fn cmd_sweep(common: &CommonArgs, variants: Option<Vec<String>>, betas: Option<Vec<f64>>) -> Result<u8, Failure> {
    let mut cfg = common.resolve().map_err(Failure::config)?;
    if let Some(v) = variants {
        cfg.variants = v.iter().map(|s| parse_variant(s)).collect::<Result<_, _>>().map_err(Failure::config)?;
    }
    if let Some(b) = betas {
        cfg.betas = b;
    }
    cfg.validate().map_err(Failure::config)?;
    cfg.prepare_out().map_err(Failure::config)?;
    let case = load(&cfg)?;
    let solver = solver_for(&cfg)?;
    let console = std::sync::Mutex::new(std::io::stderr());
    let result = sweep(&case, &cfg, solver.as_ref(), |cell| {
        let mut err = console.lock().unwrap_or_else(|e| e.into_inner());
        let _ = writeln!(
            err,
            "{} beta={}: {} objective {:.2} ({:.1} s)",
            cell.variant, cell.beta, cell.row.status, cell.row.objective, cell.row.wall_seconds
        );
        if let Some(e) = &cell.error {
            let _ = writeln!(err, "  error: {e}");
        }
        for f in cell.check_failures() {
            let _ = writeln!(err, "  check failed: {f}");
        }
    });
    write_study(&result.report, &cfg.out).map_err(Failure::config)?;
    for row in &result.report.rows {
        print!("{}", summary(row));
    }
    let code = if result.cells.iter().any(|c| c.error.is_some()) {
        EXIT_ADAPTER
    } else if result.cells.iter().any(|c| !c.row.solved()) {
        EXIT_INFEASIBLE
    } else {
        EXIT_OK
    };
    Ok(code)
}

pub fn cmd_export_mps(common: &CommonArgs, variant: &str, beta: f64, path: Option<PathBuf>) -> Result<u8, Failure> {
    let (cfg, case) = prepared(common)?;
    let variant = parse_variant(variant).map_err(Failure::config)?;
    let sm = scuc_core::build_model(&case, &cfg.model_spec(variant, beta)).map_err(Failure::config)?;
    let path = match path {
        Some(p) => p,
        None => {
            cfg.prepare_out().map_err(Failure::config)?;
            cfg.out.join("model.mps")
        }
    };
    let names = crate::mps::write_mps_file(&sm.model, &path).map_err(Failure::config)?;
    println!(
        "wrote {} ({} columns, {} rows) and {}",
        path.display(),
        sm.model.num_vars(),
        sm.model.num_constraints(),
        names.display()
    );
    Ok(EXIT_OK)
}

pub fn cmd_validate(case: &Path) -> Result<u8, Failure> {
    let loaded = load_case(case).map_err(Failure::config)?;
    let c = &loaded.case;
    println!("{}: valid", c.name);
    println!(
        "  {} buses, {} branches, {} units, {} data-center sites, {} renewable sites, horizon {} h",
        c.buses.len(),
        c.branches.len(),
        c.generators.len(),
        c.dc_sites.len(),
        c.renewable_sites.len(),
        c.horizon
    );
    println!("  {} contingencies", c.contingencies().len());
    let excluded: Vec<String> = c
        .branches
        .iter()
        .filter(|b| !b.contingency_eligible)
        .map(|b| b.id.to_string())
        .collect();
    if !excluded.is_empty() {
        println!("  contingency-ineligible branches: {}", excluded.join(", "));
    }
    for w in &loaded.warnings {
        println!("  warning: {w}");
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(
    common: &CommonArgs,
    variants: Option<Vec<String>>,
    betas: Vec<f64>,
    exhaustive: bool,
) -> Result<u8, Failure> {
    let (mut cfg, case) = prepared(common)?;
    cfg.betas = betas;
    if let Some(v) = variants {
        cfg.variants = v.iter().map(|s| parse_variant(s)).collect::<Result<_, _>>().map_err(Failure::config)?;
    }
    cfg.validate().map_err(Failure::config)?;
    let solver = solver_for(&cfg)?;
    let mode = if exhaustive {
        StartupMode::Exhaustive
    } else {
        StartupMode::Minimal
    };
    let mut all_pass = true;
    let mut cells = Vec::new();
    for v in Variant::ALL.into_iter().filter(|v| cfg.variants.contains(v)) {
        if v == Variant::Base || v == Variant::FixedDc {
            cells.push((v, 0.0));
        } else {
            cells.extend(cfg.betas.iter().map(|&b| (v, b)));
        }
    }
    for (variant, beta) in cells {
        let spec = cfg.model_spec(variant, beta);
        let oracle = crate::oracle::enumerate_parallel(&case, &spec, OracleLimits::default(), mode, solver.as_ref())
            .map_err(|e| match e {
                scuc_core::oracle::OracleError::Solver(e) => Failure::adapter(e),
                other => Failure::config(other),
            })?;
        let solution = match solve_one(&case, &cfg, solver.as_ref(), variant, beta, |_| {}) {
            SolveOutcome::Solved { solution, .. } => solution,
            SolveOutcome::NoSolution { .. } => scuc_core::Solution::infeasible(scuc_core::SolveStatus::Infeasible, Default::default()),
            SolveOutcome::Build(e) => return Err(Failure::config(e)),
            SolveOutcome::Adapter(e) => return Err(Failure::adapter(e)),
        };
        let cert = crate::oracle::certify(&oracle, &solution, cfg.mip_gap);
        all_pass &= cert.pass;
        println!(
            "{} {} beta={} oracle={} solver={} patterns={} feasible={}",
            if cert.pass { "PASS" } else { "FAIL" },
            variant,
            beta,
            cert.oracle.map_or("none".into(), |o| format!("{o:.4}")),
            cert.solver.map_or("none".into(), |o| format!("{o:.4}")),
            oracle.patterns_enumerated,
            oracle.feasible_patterns()
        );
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_VERIFY })
}
