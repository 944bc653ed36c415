//! Solver back ends: linked HiGHS and an external CBC-compatible binary.

use std::env;
use std::fmt;
use std::fs;
use std::num::NonZeroU32;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::str::FromStr;
use std::time::Instant;

use highs::{HighsModelStatus, HighsSolutionStatus, RowProblem};
use scuc_core::milp::{MilpModel, Sense, Solution, SolveError, SolveOptions, SolveStatus, Solver, VarKind};

use crate::mps;

/// Selects the adapter; read from `SCUC_SOLVER` by default.
pub const SOLVER_ENV: &str = "SCUC_SOLVER";
/// Path of the external solver binary.
pub const SOLVER_BIN_ENV: &str = "SCUC_SOLVER_BIN";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    #[default]
    Highs,
    Cbc,
}

impl FromStr for SolverKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "highs" => Ok(Self::Highs),
            "cbc" | "external" => Ok(Self::Cbc),
            _ => Err(format!("unknown solver `{s}` (expected highs or cbc)")),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Highs => "highs",
            Self::Cbc => "cbc",
        })
    }
}

impl SolverKind {
    pub fn from_env() -> Result<Self, String> {
        match env::var(SOLVER_ENV) {
            Ok(s) if !s.is_empty() => s.parse(),
            _ => Ok(Self::default()),
        }
    }
}

/// Builds the adapter for `kind`. `binary` overrides discovery for CBC.
pub fn make_solver(kind: SolverKind, binary: Option<&Path>) -> Result<Box<dyn Solver>, SolveError> {
    Ok(match kind {
        SolverKind::Highs => Box::new(HighsSolver),
        SolverKind::Cbc => Box::new(match binary {
            Some(path) => CbcSolver::new(path),
            None => CbcSolver::discover()?,
        }),
    })
}

/// Extra HiGHS options as `key=value` pairs separated by commas, for tuning
/// (e.g. `mip_lp_solver=ipm,presolve=off`). `true`/`false` are booleans,
/// numbers are int or double, anything else is passed as a string.
pub const HIGHS_OPTIONS_ENV: &str = "SCUC_HIGHS_OPTIONS";

#[derive(Debug, Clone, PartialEq)]
enum OptionValue<'a> {
    Bool(bool),
    Int(i32),
    Float(f64),
    Str(&'a str),
}

fn parse_highs_options(text: &str) -> Result<Vec<(&str, OptionValue<'_>)>, SolveError> {
    text.split(',')
        .map(str::trim)
        .filter(|kv| !kv.is_empty())
        .map(|kv| {
            let (key, value) = kv
                .split_once('=')
                .ok_or_else(|| SolveError::Failed(format!("{HIGHS_OPTIONS_ENV}: expected key=value, got {kv:?}")))?;
            let value = value.trim();
            let parsed = match value {
                "true" => OptionValue::Bool(true),
                "false" => OptionValue::Bool(false),
                _ => {
                    if let Ok(i) = value.parse() {
                        OptionValue::Int(i)
                    } else if let Ok(x) = value.parse() {
                        OptionValue::Float(x)
                    } else {
                        OptionValue::Str(value)
                    }
                }
            };
            Ok((key.trim(), parsed))
        })
        .collect()
}

/// In-process HiGHS.
#[derive(Debug, Clone, Copy, Default)]
pub struct HighsSolver;

impl Solver for HighsSolver {
    fn name(&self) -> &str {
        "highs"
    }

    fn solve(&self, model: &MilpModel, options: &SolveOptions) -> Result<Solution, SolveError> {
        self.solve_from(model, options, None)
    }

    fn solve_from(&self, model: &MilpModel, options: &SolveOptions, initial: Option<&[f64]>) -> Result<Solution, SolveError> {
        let start = Instant::now();
        let mut pb = RowProblem::new();
        let obj = dense_objective(model);
        let cols: Vec<_> = model
            .vars()
            .iter()
            .zip(&obj)
            .map(|(v, &c)| match v.kind {
                VarKind::Binary => pb.add_integer_column(c, v.lower..=v.upper),
                VarKind::Continuous => pb.add_column(c, v.lower..=v.upper),
            })
            .collect();
        for row in model.constraints() {
            let factors = row.expr.terms.iter().map(|&(v, a)| (cols[v.index()], a));
            match row.sense {
                Sense::Le => pb.add_row(..=row.rhs, factors),
                Sense::Ge => pb.add_row(row.rhs.., factors),
                Sense::Eq => pb.add_row(row.rhs..=row.rhs, factors),
            }
        }
        let mut m = pb.try_optimise(highs::Sense::Minimise).map_err(|s| SolveError::Failed(format!("{s:?}")))?;
        if !options.verbose {
            m.make_quiet();
        }
        m.set_option("mip_rel_gap", options.mip_gap);
        if let Some(limit) = options.time_limit {
            m.set_option("time_limit", limit.as_secs_f64());
        }
        if let Some(n) = options.threads.and_then(|n| NonZeroU32::new(n as u32)) {
            m.set_threads(n);
        }
        if let Some(seed) = options.seed {
            m.set_option("random_seed", (seed % i32::MAX as u64) as i32);
        }
        if let Ok(extra) = std::env::var(HIGHS_OPTIONS_ENV) {
            for (key, value) in parse_highs_options(&extra)? {
                match value {
                    OptionValue::Bool(b) => m.try_set_option(key, b),
                    OptionValue::Int(i) => m.try_set_option(key, i),
                    OptionValue::Float(x) => m.try_set_option(key, x),
                    OptionValue::Str(v) => m.try_set_option(key, v),
                }
                .map_err(|e| SolveError::Failed(format!("{HIGHS_OPTIONS_ENV}: {key}: {e:?}")))?;
            }
        }
        if let Some(x) = initial.filter(|x| x.len() == model.num_vars()) {
            // a rejected start only costs the warm start
            let _ = m.try_set_solution(Some(x), None, None, None);
        }
        let solved = m.try_solve().map_err(|s| SolveError::Failed(format!("{s:?}")))?;
        let elapsed = start.elapsed();
        let is_mip = model.num_binaries() > 0;
        let has_primal = solved.primal_solution_status() == HighsSolutionStatus::Feasible;
        let gap = if is_mip { solved.mip_gap() } else { 0.0 };
        let status = match solved.status() {
            HighsModelStatus::Optimal if gap > 1e-9 => SolveStatus::GapFeasible,
            HighsModelStatus::Optimal => SolveStatus::Optimal,
            HighsModelStatus::Infeasible | HighsModelStatus::UnboundedOrInfeasible => SolveStatus::Infeasible,
            HighsModelStatus::Unbounded => SolveStatus::Unbounded,
            HighsModelStatus::ReachedTimeLimit
            | HighsModelStatus::ReachedIterationLimit
            | HighsModelStatus::ReachedSolutionLimit
            | HighsModelStatus::ObjectiveBound
            | HighsModelStatus::ObjectiveTarget
                if has_primal =>
            {
                SolveStatus::GapFeasible
            }
            HighsModelStatus::ModelEmpty => SolveStatus::Optimal,
            HighsModelStatus::ReachedTimeLimit => return Err(SolveError::NoIncumbent),
            _ => return Ok(Solution::infeasible(SolveStatus::Error, elapsed)),
        };
        if !status.has_solution() {
            return Ok(Solution::infeasible(status, elapsed));
        }
        let objective = solved.objective_value();
        let mut values = solved.get_solution().columns().to_vec();
        values.resize(model.num_vars(), 0.0);
        for (x, v) in values.iter_mut().zip(model.vars()) {
            if v.kind == VarKind::Binary {
                *x = x.round();
            }
        }
        Ok(Solution {
            status,
            objective,
            mip_gap: gap.max(0.0),
            values,
            wall_time: elapsed,
        })
    }
}

fn dense_objective(model: &MilpModel) -> Vec<f64> {
    let mut c = vec![0.0; model.num_vars()];
    for &(v, a) in &model.objective().terms {
        c[v.index()] += a;
    }
    c
}

/// Any solver binary speaking CBC's command line, run on an exported MPS.
#[derive(Debug, Clone)]
pub struct CbcSolver {
    pub binary: PathBuf,
}

impl CbcSolver {
    pub fn new(binary: impl Into<PathBuf>) -> Self {
        Self { binary: binary.into() }
    }

    /// `SCUC_SOLVER_BIN`, then `cbc` on `PATH`, then the copy bundled with
    /// the Python `pulp` package.
    pub fn discover() -> Result<Self, SolveError> {
        if let Ok(p) = env::var(SOLVER_BIN_ENV) {
            if !p.is_empty() {
                return Ok(Self::new(p));
            }
        }
        if let Some(paths) = env::var_os("PATH") {
            for dir in env::split_paths(&paths) {
                let candidate = dir.join("cbc");
                if candidate.is_file() {
                    return Ok(Self::new(candidate));
                }
            }
        }
        let probe = Command::new("python3")
            .args(["-c", "import os, pulp; print(os.path.join(os.path.dirname(pulp.__file__), 'solverdir', 'cbc', 'linux', 'i64', 'cbc'))"])
            .output();
        if let Ok(out) = probe {
            let path = PathBuf::from(String::from_utf8_lossy(&out.stdout).trim());
            if out.status.success() && path.is_file() {
                return Ok(Self::new(path));
            }
        }
        Err(SolveError::Unavailable(format!(
            "no CBC binary found; set {SOLVER_BIN_ENV} or put `cbc` on PATH"
        )))
    }
}

impl Solver for CbcSolver {
    fn name(&self) -> &str {
        "cbc"
    }

    fn solve(&self, model: &MilpModel, options: &SolveOptions) -> Result<Solution, SolveError> {
        let start = Instant::now();
        let dir = tempfile::tempdir().map_err(|e| SolveError::Failed(e.to_string()))?;
        let mps_path = dir.path().join("model.mps");
        let sol_path = dir.path().join("model.sol");
        mps::write_mps_file(model, &mps_path).map_err(|e| SolveError::Failed(e.to_string()))?;
        let mut cmd = Command::new(&self.binary);
        cmd.arg(&mps_path).arg("ratio").arg(options.mip_gap.to_string());
        if let Some(limit) = options.time_limit {
            cmd.arg("sec").arg(limit.as_secs_f64().to_string());
        }
        if let Some(n) = options.threads {
            cmd.arg("threads").arg(n.to_string());
        }
        // CBC reads 0 as "seed from the clock", so 0 keeps its fixed default
        if let Some(seed) = options.seed.filter(|&s| s != 0) {
            cmd.arg("randomCbcSeed").arg((seed % i32::MAX as u64).to_string());
        }
        cmd.args(["solve", "solution"]).arg(&sol_path);
        let out = cmd
            .output()
            .map_err(|e| SolveError::Unavailable(format!("{}: {e}", self.binary.display())))?;
        if options.verbose {
            eprint!("{}", String::from_utf8_lossy(&out.stdout));
        }
        let elapsed = start.elapsed();
        let text = fs::read_to_string(&sol_path).map_err(|e| {
            SolveError::Failed(format!(
                "{} exited with {} and wrote no solution: {e}",
                self.binary.display(),
                out.status
            ))
        })?;
        let parsed = parse_solution(&text).map_err(SolveError::Failed)?;
        let stdout_gap = parse_cbc_gap(&String::from_utf8_lossy(&out.stdout));
        let mut status = parsed.status;
        if !status.has_solution() {
            return Ok(Solution::infeasible(status, elapsed));
        }
        let mut values = vec![0.0; model.num_vars()];
        for (name, value) in parsed.values {
            let j = mps::column_index(&name).ok_or_else(|| SolveError::Failed(format!("unknown column `{name}` in solution")))?;
            if j >= values.len() {
                return Err(SolveError::Failed(format!("column `{name}` out of range")));
            }
            values[j] = value;
        }
        for (x, v) in values.iter_mut().zip(model.vars()) {
            if v.kind == VarKind::Binary {
                *x = x.round();
            }
        }
        let gap = if model.num_binaries() == 0 { 0.0 } else { stdout_gap.unwrap_or(0.0) };
        if status == SolveStatus::Optimal && gap > 1e-9 {
            status = SolveStatus::GapFeasible;
        }
        Ok(Solution {
            status,
            objective: parsed.objective.unwrap_or_else(|| model.objective().eval(&values)),
            mip_gap: gap,
            values,
            wall_time: elapsed,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSolution {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub values: Vec<(String, f64)>,
}

/// Reads either CBC's `index name value reduced-cost` listing or a plain
/// `name value` file. A leading status line is optional for the plain form.
pub fn parse_solution(text: &str) -> Result<ParsedSolution, String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty()).peekable();
    let mut status = SolveStatus::Optimal;
    let mut objective = None;
    if let Some(first) = lines.peek() {
        let lower = first.to_ascii_lowercase();
        let is_header = lower.contains("objective value") || lower.starts_with("infeasible") || lower.starts_with("unbounded");
        if is_header {
            status = if lower.starts_with("optimal") {
                SolveStatus::Optimal
            } else if lower.contains("infeasible") {
                SolveStatus::Infeasible
            } else if lower.starts_with("unbounded") {
                SolveStatus::Unbounded
            } else if lower.starts_with("stopped") {
                SolveStatus::GapFeasible
            } else {
                SolveStatus::Error
            };
            objective = lower
                .rsplit("objective value")
                .next()
                .and_then(|s| s.split_whitespace().next())
                .and_then(|s| s.parse().ok());
            lines.next();
        }
    }
    let mut values = Vec::new();
    for line in lines {
        let tok: Vec<&str> = line.split_whitespace().collect();
        // CBC marks infeasible rows/columns with a leading `**`
        let tok: Vec<&str> = tok.into_iter().filter(|t| *t != "**").collect();
        let (name, value) = match tok.as_slice() {
            [name, value] => (*name, *value),
            [_, name, value, _] => (*name, *value),
            _ => return Err(format!("unrecognised solution line `{line}`")),
        };
        let value: f64 = value.parse().map_err(|_| format!("bad value in `{line}`"))?;
        values.push((name.to_string(), value));
    }
    if status == SolveStatus::GapFeasible && values.is_empty() {
        status = SolveStatus::Error;
    }
    Ok(ParsedSolution { status, objective, values })
}

fn parse_cbc_gap(stdout: &str) -> Option<f64> {
    // result block: "Objective value: X" and "Lower bound: Y"; "Gap: Z" is a fraction
    let grab = |key: &str| {
        stdout
            .lines()
            .filter_map(|l| l.trim().strip_prefix(key))
            .next_back()
            .and_then(|s| s.trim().parse::<f64>().ok())
    };
    grab("Gap:").or_else(|| {
        let (obj, bound) = (grab("Objective value:")?, grab("Lower bound:")?);
        Some(((obj - bound) / obj.abs().max(1e-10)).max(0.0))
    })
}
