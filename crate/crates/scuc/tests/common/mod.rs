#![allow(dead_code)]

use std::path::{Path, PathBuf};

use scuc::case_file::load_case;
use scuc::config::RunConfig;
use scuc::solver::{CbcSolver, HighsSolver};
use scuc::sweep::{solve_one, Cell, SolveOutcome};
use scuc_core::{PowerCase, Solution, Solver, Variant};

pub const BETAS: [f64; 4] = [0.10, 0.20, 0.30, 0.40];

pub fn case(name: &str) -> PowerCase {
    load_case(Path::new(name)).expect("bundled case").case
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Study defaults with single-threaded solves.
pub fn config(case: &str) -> RunConfig {
    let mut cfg = RunConfig::study_defaults();
    cfg.case = case.into();
    cfg.threads = Some(1);
    cfg
}

pub fn cbc() -> Option<CbcSolver> {
    CbcSolver::discover().ok()
}

pub fn highs() -> HighsSolver {
    HighsSolver
}

/// Solves one cell and insists on a solution.
pub fn solve(case: &PowerCase, cfg: &RunConfig, solver: &dyn Solver, variant: Variant, beta: f64) -> (Cell, Solution) {
    match solve_one(case, cfg, solver, variant, beta, |_| {}) {
        SolveOutcome::Solved { solution, cell, .. } => (cell, solution),
        SolveOutcome::NoSolution { cell } => panic!("{variant} beta={beta}: {}", cell.row.status),
        SolveOutcome::Build(e) => panic!("{variant} beta={beta}: {e}"),
        SolveOutcome::Adapter(e) => panic!("{variant} beta={beta}: {e}"),
    }
}

/// `a <= b` allowing both objectives their reported relative gaps.
pub fn le_within_gaps(a: f64, gap_a: f64, b: f64, gap_b: f64) -> bool {
    let slack = gap_a * a.abs() + gap_b * b.abs() + 1e-6 * a.abs().max(b.abs()).max(1.0);
    a <= b + slack
}
