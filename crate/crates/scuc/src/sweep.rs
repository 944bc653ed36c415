//! Single solves and (variant, beta) sweeps with per-cell audits.

use rayon::prelude::*;

use scuc_core::audit::{audit_solution, AuditReport};
use scuc_core::metrics::{decompose_objective, ObjectiveBreakdown, StudyReport, StudyRow};
use scuc_core::scuc::{solve_screened_observed, BuildError, RoundTrace, ScreeningOptions, ScreeningReport};
use scuc_core::{build_model, PowerCase, ScucModel, Solution, SolveStatus, Solver, Variant, FEAS_TOL};

use crate::config::RunConfig;

/// Relative tolerance between the recomputed objective and the solver's.
pub const DECOMPOSITION_TOL: f64 = 1e-4;

/// Everything known about one solved (variant, beta) cell.
#[derive(Debug, Clone)]
pub struct Cell {
    pub variant: Variant,
    pub beta: f64,
    pub row: StudyRow,
    pub audit: Option<AuditReport>,
    pub breakdown: Option<ObjectiveBreakdown>,
    pub screening: Option<ScreeningReport>,
    /// Build or adapter failure, if any.
    pub error: Option<String>,
}

impl Cell {
    /// Audit and objective decomposition both within tolerance.
    pub fn checks_pass(&self) -> bool {
        self.audit.as_ref().is_some_and(|a| a.passes(FEAS_TOL))
            && self.breakdown.as_ref().is_some_and(|b| b.is_consistent(DECOMPOSITION_TOL))
    }

    /// Human-readable list of failed checks.
    pub fn check_failures(&self) -> Vec<String> {
        let mut out = self.audit.as_ref().map(|a| a.failures(FEAS_TOL)).unwrap_or_default();
        if let Some(b) = &self.breakdown {
            if !b.is_consistent(DECOMPOSITION_TOL) {
                out.push(format!(
                    "objective decomposition off by {:.3e} relative (recomputed {}, solver {})",
                    b.relative_mismatch(),
                    b.recomputed_total(),
                    b.solver_objective
                ));
            }
        }
        out
    }
}

/// How a single solve ended.
#[derive(Debug)]
pub enum SolveOutcome {
    Solved { sm: Box<ScucModel>, solution: Solution, cell: Cell },
    /// The solver ran but produced no solution (infeasible, unbounded, error).
    NoSolution { cell: Cell },
    Build(BuildError),
    Adapter(String),
}

/// Builds and solves one cell, audits it and derives its report row.
pub fn solve_one(
    case: &PowerCase,
    cfg: &RunConfig,
    solver: &dyn Solver,
    variant: Variant,
    beta: f64,
    mut observe: impl FnMut(&RoundTrace),
) -> SolveOutcome {
    let spec = cfg.model_spec(variant, beta);
    let sm = match build_model(case, &spec) {
        Ok(sm) => sm,
        Err(e) => return SolveOutcome::Build(e),
    };
    let result = if cfg.screening && !sm.vars.contingencies.is_empty() {
        solve_screened_observed(&sm, solver, &spec.solver, &ScreeningOptions::default(), &mut observe)
            .map(|(sol, rep)| (sol, Some(rep)))
    } else {
        solver.solve(&sm.model, &spec.solver).map(|sol| (sol, None))
    };
    let (solution, screening) = match result {
        Ok(r) => r,
        Err(e) => return SolveOutcome::Adapter(e.to_string()),
    };
    if !solution.status.has_solution() {
        return SolveOutcome::NoSolution {
            cell: Cell {
                variant,
                beta,
                row: StudyRow::failed(variant, beta, solution.status),
                audit: None,
                breakdown: None,
                screening,
                error: None,
            },
        };
    }
    let cell = Cell {
        variant,
        beta,
        row: StudyRow::from_solution(case, &sm, &solution, cfg.overload_threshold),
        audit: Some(audit_solution(case, &sm, &solution, FEAS_TOL)),
        breakdown: Some(decompose_objective(case, &sm, &solution)),
        screening,
        error: None,
    };
    SolveOutcome::Solved {
        sm: Box::new(sm),
        solution,
        cell,
    }
}

/// Cells of a sweep in their deterministic order: Base and Fixed-DC once
/// (beta 0), then each flexible variant at every beta.
pub fn sweep_cells(variants: &[Variant], betas: &[f64]) -> Vec<(Variant, f64)> {
    let mut out = Vec::new();
    for v in Variant::ALL.into_iter().filter(|v| variants.contains(v)) {
        if v.is_flexible() {
            out.extend(betas.iter().map(|&b| (v, b)));
        } else {
            out.push((v, 0.0));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub report: StudyReport,
    /// In `sweep_cells` order.
    pub cells: Vec<Cell>,
}

/// Runs every cell (in parallel on rayon's pool) and assembles the report.
/// A failed cell is kept with its status; the sweep always completes.
pub fn sweep(
    case: &PowerCase,
    cfg: &RunConfig,
    solver: &dyn Solver,
    on_cell: impl Fn(&Cell) + Sync,
) -> SweepResult {
    let cells: Vec<Cell> = sweep_cells(&cfg.variants, &cfg.betas)
        .into_par_iter()
        .map(|(variant, beta)| {
            let cell = match solve_one(case, cfg, solver, variant, beta, |_| {}) {
                SolveOutcome::Solved { cell, .. } | SolveOutcome::NoSolution { cell } => cell,
                SolveOutcome::Build(e) => failed_cell(variant, beta, e.to_string()),
                SolveOutcome::Adapter(e) => failed_cell(variant, beta, e),
            };
            on_cell(&cell);
            cell
        })
        .collect();
    let report = StudyReport::new(cells.iter().map(|c| c.row.clone()).collect(), cfg.overload_aggregation);
    SweepResult { report, cells }
}

fn failed_cell(variant: Variant, beta: f64, error: String) -> Cell {
    Cell {
        variant,
        beta,
        row: StudyRow::failed(variant, beta, SolveStatus::Error),
        audit: None,
        breakdown: None,
        screening: None,
        error: Some(error),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_fourteen_cells() {
        let cells = sweep_cells(&Variant::ALL, &[0.1, 0.2, 0.3, 0.4]);
        assert_eq!(cells.len(), 14);
        assert_eq!(cells[0], (Variant::Base, 0.0));
        assert_eq!(cells[1], (Variant::FixedDc, 0.0));
        assert_eq!(cells[13], (Variant::SpatioTemporal, 0.4));
        assert_eq!(sweep_cells(&[Variant::Spatial], &[]).len(), 0);
    }
}
