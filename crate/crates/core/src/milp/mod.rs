//! Solver-agnostic MILP representation and the solve-adapter interface.

mod model;
mod solution;

pub use model::{Constraint, ConstraintId, LinExpr, MilpError, MilpModel, Sense, Var, VarInfo, VarKind};
pub use solution::{BoundViolation, Solution, SolveError, SolveOptions, SolveStatus, Solver};
