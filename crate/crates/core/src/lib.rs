//! Security-constrained unit commitment with data-center load flexibility.
//!
//! This crate holds everything that is pure computation: the case model and
//! its validation, profile synthesis, a solver-agnostic MILP representation,
//! the SCUC and data-center flexibility constraint builders, independent
//! solution audits, study metrics and the pattern logic of the brute-force
//! commitment oracle. It is `no_std` and only needs `alloc`; file formats,
//! solver back ends and the CLI live in the `scuc` crate.
#![no_std]

extern crate alloc;
#[cfg(any(feature = "std", test))]
extern crate std;

pub mod audit;
pub mod case;
pub mod dcflex;
pub mod metrics;
pub mod milp;
pub mod oracle;
pub mod profile;
pub mod scuc;
mod topology;

pub use case::{Branch, Bus, CaseError, CaseIndex, DataCenterSite, Generator, PowerCase, RenewableSite};
pub use milp::{
    Constraint, LinExpr, MilpError, MilpModel, Sense, Solution, SolveError, SolveOptions,
    SolveStatus, Solver, Var, VarKind,
};
pub use scuc::{build_model, ModelSpec, ScucModel, ScucVariables, SpecError, Variant};

/// Absolute tolerance used by every bound, integrality and residual check.
pub const FEAS_TOL: f64 = 1e-6;
