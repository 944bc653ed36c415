use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::time::Duration;

use super::{MilpModel, Var, VarKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    /// Incumbent within the requested gap, or the best one found at a limit.
    GapFeasible,
    Infeasible,
    Unbounded,
    Error,
}

impl SolveStatus {
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::GapFeasible)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::GapFeasible => "gap-feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Unbounded => "unbounded",
            SolveStatus::Error => "error",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "optimal" => SolveStatus::Optimal,
            "gap-feasible" => SolveStatus::GapFeasible,
            "infeasible" => SolveStatus::Infeasible,
            "unbounded" => SolveStatus::Unbounded,
            "error" => SolveStatus::Error,
            _ => return None,
        })
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub status: SolveStatus,
    /// Objective in model units ($ for SCUC models).
    pub objective: f64,
    /// Relative gap reported by the solver; 0 for pure LPs.
    pub mip_gap: f64,
    /// One value per registered variable, in handle order.
    pub values: Vec<f64>,
    pub wall_time: Duration,
}

/// First bound or integrality violation found in a solution.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundViolation {
    pub var: String,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub integrality: bool,
}

impl fmt::Display for BoundViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.integrality {
            write!(f, "binary `{}` = {} is not integral", self.var, self.value)
        } else {
            write!(f, "`{}` = {} outside [{}, {}]", self.var, self.value, self.lower, self.upper)
        }
    }
}

impl Solution {
    pub fn infeasible(status: SolveStatus, wall_time: Duration) -> Self {
        Self {
            status,
            objective: f64::NAN,
            mip_gap: f64::NAN,
            values: Vec::new(),
            wall_time,
        }
    }

    pub fn value(&self, v: Var) -> f64 {
        self.values[v.index()]
    }

    /// Checks bounds and integrality within `tol` for every registered variable.
    pub fn check_bounds(&self, model: &MilpModel, tol: f64) -> Result<(), BoundViolation> {
        for (info, &x) in model.vars().iter().zip(&self.values) {
            let out = BoundViolation {
                var: info.name.clone(),
                value: x,
                lower: info.lower,
                upper: info.upper,
                integrality: false,
            };
            if !(x >= info.lower - tol && x <= info.upper + tol) {
                return Err(out);
            }
            if info.kind == VarKind::Binary && (x - libm::round(x)).abs() > tol {
                return Err(BoundViolation { integrality: true, ..out });
            }
        }
        if self.values.len() != model.num_vars() {
            return Err(BoundViolation {
                var: String::from("<missing values>"),
                value: self.values.len() as f64,
                lower: model.num_vars() as f64,
                upper: model.num_vars() as f64,
                integrality: false,
            });
        }
        Ok(())
    }

    /// Largest row violation over all constraints.
    pub fn max_row_violation(&self, model: &MilpModel) -> f64 {
        model
            .constraints()
            .iter()
            .map(|c| c.violation(&self.values))
            .fold(0.0, f64::max)
    }

    /// Snaps binaries to exact 0/1 and clamps continuous values into bounds.
    pub fn polish(&mut self, model: &MilpModel) {
        for (info, x) in model.vars().iter().zip(self.values.iter_mut()) {
            if info.kind == VarKind::Binary {
                *x = libm::round(*x);
            }
            *x = x.clamp(info.lower, info.upper);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// Relative MIP gap at which the solver may stop.
    pub mip_gap: f64,
    pub time_limit: Option<Duration>,
    /// Solver threads; `None` lets the back end decide.
    pub threads: Option<usize>,
    /// Random seed handed to the back end, for reproducible branching.
    pub seed: Option<u64>,
    pub verbose: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            mip_gap: 0.01,
            time_limit: None,
            threads: None,
            seed: None,
            verbose: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("solver adapter unavailable: {0}")]
    Unavailable(String),
    #[error("solver failed: {0}")]
    Failed(String),
    #[error("time limit reached without an incumbent")]
    NoIncumbent,
}

/// A MILP back end.
pub trait Solver: Sync {
    fn name(&self) -> &str;
    fn solve(&self, model: &MilpModel, options: &SolveOptions) -> Result<Solution, SolveError>;

    /// Like [`Solver::solve`], with a full-length candidate point the back end may
    /// use as its first incumbent. The default ignores it.
    fn solve_from(&self, model: &MilpModel, options: &SolveOptions, start: Option<&[f64]>) -> Result<Solution, SolveError> {
        let _ = start;
        self.solve(model, options)
    }
}

impl<S: Solver + ?Sized> Solver for &S {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn solve(&self, model: &MilpModel, options: &SolveOptions) -> Result<Solution, SolveError> {
        (**self).solve(model, options)
    }
    fn solve_from(&self, model: &MilpModel, options: &SolveOptions, start: Option<&[f64]>) -> Result<Solution, SolveError> {
        (**self).solve_from(model, options, start)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::VarKind;

    #[test]
    fn bound_checks() {
        let mut m = MilpModel::new("t");
        m.add_var("x", VarKind::Continuous, 0.0, 1.0).unwrap();
        m.add_var("u", VarKind::Binary, 0.0, 1.0).unwrap();
        let mut sol = Solution {
            status: SolveStatus::Optimal,
            objective: 0.0,
            mip_gap: 0.0,
            values: alloc::vec![1.0 + 5e-7, 1.0 - 5e-7],
            wall_time: Duration::ZERO,
        };
        assert!(sol.check_bounds(&m, 1e-6).is_ok());
        sol.values[1] = 0.4;
        assert!(sol.check_bounds(&m, 1e-6).unwrap_err().integrality);
        sol.values[0] = 1.1;
        assert!(!sol.check_bounds(&m, 1e-6).unwrap_err().integrality);
        sol.polish(&m);
        assert_eq!(sol.values, alloc::vec![1.0, 0.0]);
    }

    #[test]
    fn status_round_trip() {
        for s in [
            SolveStatus::Optimal,
            SolveStatus::GapFeasible,
            SolveStatus::Infeasible,
            SolveStatus::Unbounded,
            SolveStatus::Error,
        ] {
            assert_eq!(SolveStatus::parse(s.as_str()), Some(s));
        }
    }
}
