//! Parallel driver for the brute-force commitment oracle.

use rayon::prelude::*;

use scuc_core::oracle::{OracleError, OracleLimits, OraclePlan, OracleResult, StartupMode};
use scuc_core::{ModelSpec, PowerCase, Solution, Solver};

/// Same result as [`scuc_core::oracle::enumerate_optimum`], with the
/// per-pattern LPs spread over rayon's pool.
pub fn enumerate_parallel(
    case: &PowerCase,
    spec: &ModelSpec,
    limits: OracleLimits,
    mode: StartupMode,
    solver: &dyn Solver,
) -> Result<OracleResult, OracleError> {
    let plan = OraclePlan::new(case, spec, limits, mode)?;
    let solved = plan
        .candidates
        .par_iter()
        .map(|c| plan.solve_candidate(solver, c, &spec.solver))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(plan.reduce(solved))
}

/// Outcome of checking one solver objective against the oracle optimum.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub oracle: Option<f64>,
    pub solver: Option<f64>,
    pub gap: f64,
    pub pass: bool,
}

/// Passes when `oracle <= solver <= oracle * (1 + gap)` up to a small
/// absolute slack, or when both sides agree the instance has no solution.
pub fn certify(result: &OracleResult, solution: &Solution, gap: f64) -> Certificate {
    let oracle = result.best_objective;
    let solver = solution.status.has_solution().then_some(solution.objective);
    let pass = match (oracle, solver) {
        (Some(o), Some(s)) => {
            let slack = 1e-6 * o.abs().max(1.0);
            s >= o - slack && s <= o + gap * o.abs() + slack
        }
        (None, None) => true,
        _ => false,
    };
    Certificate {
        oracle,
        solver,
        gap,
        pass,
    }
}
