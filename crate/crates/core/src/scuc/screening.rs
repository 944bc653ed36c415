//! Exact contingency screening.
//!
//! Each contingency block only adds soft constraints and non-negative
//! penalty, so the model without some blocks is a relaxation of the full
//! model. The master problem carries the active blocks; every inactive block
//! is then priced as a small LP with the base-case variables fixed at the
//! master solution. If all of those price to zero violation the master
//! solution, padded with the block LP solutions, is feasible for the full
//! model at the master objective, so the master's optimality certificate
//! carries over. Otherwise the violated blocks join the master and it is
//! solved again.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use super::ScucModel;
use crate::milp::{MilpModel, Solution, SolveError, SolveOptions, SolveStatus, Solver, Var};
use crate::FEAS_TOL;

#[derive(Debug, Clone, PartialEq)]
pub struct ScreeningOptions {
    /// Rounds with a partial master before falling back to the full model.
    pub max_rounds: usize,
    /// Violation energy (p.u.·h) above which a priced block is added.
    pub tolerance: f64,
}

impl Default for ScreeningOptions {
    fn default() -> Self {
        Self {
            max_rounds: 8,
            tolerance: FEAS_TOL,
        }
    }
}

/// One master solve and the pricing that followed it.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrace {
    pub round: usize,
    pub active_blocks: usize,
    pub master_vars: usize,
    pub master_rows: usize,
    pub master_status: SolveStatus,
    pub master_objective: f64,
    pub master_time: Duration,
    /// Inactive blocks priced above tolerance after this round.
    pub violated: usize,
}

/// What the screening loop did.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ScreeningReport {
    /// Master solves performed.
    pub rounds: usize,
    pub trace: Vec<RoundTrace>,
    /// Positions in `ScucVariables::contingencies` that ended up in the master.
    pub active: Vec<usize>,
}

/// Block membership of every variable and row.
struct Blocks {
    var_block: Vec<Option<usize>>,
    row_block: Vec<Option<usize>>,
    count: usize,
}

impl Blocks {
    fn new(sm: &ScucModel) -> Self {
        let mut var_block = vec![None; sm.model.num_vars()];
        for (k, cv) in sm.vars.contingencies.iter().enumerate() {
            let all = cv.p.iter().chain(cv.theta.iter()).chain(cv.flow.iter()).chain(cv.shed.iter());
            for v in all.chain(cv.alpha.iter().flatten()) {
                var_block[v.index()] = Some(k);
            }
        }
        let row_block = sm
            .model
            .constraints()
            .iter()
            .map(|row| row.expr.terms.iter().find_map(|&(v, _)| var_block[v.index()]))
            .collect();
        Self {
            var_block,
            row_block,
            count: sm.vars.contingencies.len(),
        }
    }

    fn master(&self, model: &MilpModel, active: &[bool]) -> (MilpModel, Vec<Var>) {
        let keep: Vec<bool> = self.var_block.iter().map(|b| b.is_none_or(|k| active[k])).collect();
        model.submodel(
            format!("{}-master", model.name),
            &keep,
            |i, _| self.row_block[i].is_none_or(|k| active[k]),
            None,
        )
    }

    fn block(&self, model: &MilpModel, k: usize, fixed: &[f64]) -> (MilpModel, Vec<Var>) {
        let keep: Vec<bool> = self.var_block.iter().map(|&b| b == Some(k)).collect();
        model.submodel(
            format!("{}-block{k}", model.name),
            &keep,
            |i, _| self.row_block[i] == Some(k),
            Some(fixed),
        )
    }
}

/// Solves `sm.model` by contingency screening and returns a solution over
/// all of its variables.
pub fn solve_screened<S: Solver + ?Sized>(
    sm: &ScucModel,
    solver: &S,
    options: &SolveOptions,
    screening: &ScreeningOptions,
) -> Result<(Solution, ScreeningReport), SolveError> {
    solve_screened_observed(sm, solver, options, screening, |_| {})
}

/// [`solve_screened`] with a callback after every round.
pub fn solve_screened_observed<S: Solver + ?Sized>(
    sm: &ScucModel,
    solver: &S,
    options: &SolveOptions,
    screening: &ScreeningOptions,
    mut observe: impl FnMut(&RoundTrace),
) -> Result<(Solution, ScreeningReport), SolveError> {
    let blocks = Blocks::new(sm);
    let model = &sm.model;
    let mut active = vec![false; blocks.count];
    let mut report = ScreeningReport::default();
    let mut wall = Duration::ZERO;
    let mut start: Option<Vec<f64>> = None;
    let lp_options = SolveOptions {
        mip_gap: 0.0,
        ..options.clone()
    };

    loop {
        if report.rounds >= screening.max_rounds {
            active.iter_mut().for_each(|a| *a = true);
        }
        let (master, origin) = blocks.master(model, &active);
        report.rounds += 1;
        let master_start: Option<Vec<f64>> = start.as_ref().map(|full| origin.iter().map(|v| full[v.index()]).collect());
        let ms = solver.solve_from(&master, options, master_start.as_deref())?;
        wall += ms.wall_time;
        let mut trace = RoundTrace {
            round: report.rounds,
            active_blocks: active.iter().filter(|&&a| a).count(),
            master_vars: master.num_vars(),
            master_rows: master.num_constraints(),
            master_status: ms.status,
            master_objective: ms.objective,
            master_time: ms.wall_time,
            violated: 0,
        };
        if !ms.status.has_solution() {
            observe(&trace);
            report.trace.push(trace);
            return Ok((Solution::infeasible(ms.status, wall), report));
        }

        let mut values = vec![0.0; model.num_vars()];
        for (j, v) in origin.iter().enumerate() {
            values[v.index()] = ms.values[j];
        }
        let mut extra = 0.0;
        let mut violated = Vec::new();
        for k in (0..blocks.count).filter(|&k| !active[k]) {
            let (lp, lp_origin) = blocks.block(model, k, &values);
            let bs = solver.solve(&lp, &lp_options)?;
            wall += bs.wall_time;
            if !bs.status.has_solution() {
                // soft rows cannot be infeasible unless the base values are
                // themselves broken; let the master carry the block instead
                violated.push(k);
                continue;
            }
            for (j, v) in lp_origin.iter().enumerate() {
                values[v.index()] = bs.values[j];
            }
            let penalty = bs.objective - lp.objective().constant;
            if penalty > screening.tolerance * sm.spec.penalty {
                violated.push(k);
            } else {
                extra += penalty;
            }
        }

        trace.violated = violated.len();
        observe(&trace);
        report.trace.push(trace);
        if violated.is_empty() {
            let objective = ms.objective + extra;
            let bound = ms.objective - ms.mip_gap * libm::fabs(ms.objective);
            let mip_gap = if objective == 0.0 { 0.0 } else { (objective - bound) / libm::fabs(objective) };
            let status = match ms.status {
                SolveStatus::Optimal if mip_gap <= 1e-9 => SolveStatus::Optimal,
                SolveStatus::Optimal => SolveStatus::GapFeasible,
                other => other,
            };
            report.active = (0..blocks.count).filter(|&k| active[k]).collect();
            return Ok((
                Solution {
                    status,
                    objective,
                    mip_gap,
                    values,
                    wall_time: wall,
                },
                report,
            ));
        }
        for k in violated {
            active[k] = true;
        }
        start = Some(values);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case::fixtures;
    use crate::milp::{LinExpr, Sense, VarKind};
    use crate::scuc::{build_model, ModelSpec, Variant};

    #[test]
    fn blocks_partition_contingency_rows() {
        let case = fixtures::ring_with_spur();
        let sm = build_model(&case, &ModelSpec::new(Variant::Base, 0.0)).unwrap();
        let blocks = Blocks::new(&sm);
        assert_eq!(blocks.count, sm.vars.contingencies.len());
        let (master, origin) = blocks.master(&sm.model, &vec![false; blocks.count]);
        assert!(master.num_vars() < sm.model.num_vars());
        assert!(master.constraints().iter().all(|r| !r.name.contains("c[")));
        assert!(origin.windows(2).all(|w| w[0] < w[1]));
        let all = blocks.master(&sm.model, &vec![true; blocks.count]).0;
        assert_eq!(all.num_vars(), sm.model.num_vars());
        assert_eq!(all.num_constraints(), sm.model.num_constraints());
    }

    #[test]
    fn submodel_substitutes_fixed_values() {
        let mut m = MilpModel::new("t");
        let x = m.add_var("x", VarKind::Continuous, 0.0, 10.0).unwrap();
        let y = m.add_var("y", VarKind::Continuous, 0.0, 10.0).unwrap();
        m.add_constraint("r", LinExpr::new().term(x, 2.0).term(y, 1.0), Sense::Le, 8.0).unwrap();
        m.set_objective(LinExpr::new().term(x, 1.0).term(y, 3.0)).unwrap();
        let (sub, origin) = m.submodel("s", &[false, true], |_, _| true, Some(&[3.0, 0.0]));
        assert_eq!(origin, vec![y]);
        assert_eq!(sub.constraints()[0].rhs, 2.0);
        assert_eq!(sub.objective().terms.len(), 1);
        assert_eq!(sub.objective().terms[0].1, 3.0);
    }
}
