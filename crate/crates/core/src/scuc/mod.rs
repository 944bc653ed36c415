//! Base SCUC model assembly.
//!
//! Variable and row names follow a stable `family[index,...,hour]` scheme:
//! `P`, `uc`, `vs`, `Rv`, `theta`, `flow`, `alpha`, `shed`, `Ruse`, `Rcurt`,
//! `D`, `Dflex` in the base case and `Pc`, `thetac`, `flowc`, `alphac`,
//! `shedc` (first index = outaged branch id) per contingency. Hours are
//! zero-based.

mod generator;
mod network;
mod objective;
pub mod screening;
mod vars;

use alloc::format;
use alloc::string::String;
use core::fmt;
use core::str::FromStr;

pub use generator::{build_commitment_logic, build_generator_block};
pub use network::{build_contingency_block, build_network_block};
pub use objective::build_objective;
pub use screening::{solve_screened, solve_screened_observed, RoundTrace, ScreeningOptions, ScreeningReport};
pub use vars::{ContingencyVars, DcVars, Grid, ScucVariables};

use crate::case::{CaseIndex, PowerCase};
use crate::dcflex::{self, FlexQuota};
use crate::milp::{MilpError, MilpModel, SolveOptions};

/// Data-center treatment of a model instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variant {
    /// No data-center load at all.
    Base,
    /// Data-center load served exactly as scheduled.
    FixedDc,
    /// Flexible load preserved system-wide in every hour.
    Spatial,
    /// Flexible load preserved per site over the horizon.
    Temporal,
    /// Only the global flexible energy budget is preserved.
    SpatioTemporal,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::Base,
        Variant::FixedDc,
        Variant::Spatial,
        Variant::Temporal,
        Variant::SpatioTemporal,
    ];
    pub const FLEXIBLE: [Variant; 3] = [Variant::Spatial, Variant::Temporal, Variant::SpatioTemporal];

    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Base => "base",
            Variant::FixedDc => "fixed-dc",
            Variant::Spatial => "dc-s",
            Variant::Temporal => "dc-t",
            Variant::SpatioTemporal => "dc-st",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Variant::Base => "Base (no DC)",
            Variant::FixedDc => "Fixed-DC",
            Variant::Spatial => "DC-S: Spatial",
            Variant::Temporal => "DC-T: Temporal",
            Variant::SpatioTemporal => "DC-ST: Spatio-temporal",
        }
    }

    pub fn is_flexible(self) -> bool {
        matches!(self, Variant::Spatial | Variant::Temporal | Variant::SpatioTemporal)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = SpecError;
    fn from_str(s: &str) -> Result<Self, SpecError> {
        match s.to_ascii_lowercase().as_str() {
            "base" => Ok(Variant::Base),
            "fixed-dc" | "fixed" | "fixeddc" => Ok(Variant::FixedDc),
            "dc-s" | "spatial" => Ok(Variant::Spatial),
            "dc-t" | "temporal" => Ok(Variant::Temporal),
            "dc-st" | "spatio-temporal" | "spatiotemporal" => Ok(Variant::SpatioTemporal),
            _ => Err(SpecError::UnknownVariant(String::from(s))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("unknown variant `{0}` (expected base, fixed-dc, dc-s, dc-t or dc-st)")]
    UnknownVariant(String),
    #[error("flexibility ratio {0} outside [0, 1]")]
    BetaOutOfRange(f64),
    #[error("penalty {penalty} $/p.u.h must exceed {threshold} (100 x max energy cost x MVA base)")]
    PenaltyTooLow { penalty: f64, threshold: f64 },
    #[error("curtailment epsilon {epsilon} must be >= 0 and below {limit} (1% of the cheapest positive energy cost)")]
    EpsilonOutOfRange { epsilon: f64, limit: f64 },
    #[error("variant {0} needs at least one data-center site")]
    NoDataCenters(Variant),
}

/// Options that select one model instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub variant: Variant,
    /// Flexibility ratio in [0, 1].
    pub beta: f64,
    /// Violation penalty M, $ per p.u.·h.
    pub penalty: f64,
    /// Curtailment tie-breaker, $ per p.u.·h; 0 gives the unpriced objective.
    pub curtailment_epsilon: f64,
    /// Also wrap the ramp constraints from the first to the last hour.
    pub cyclic_ramp: bool,
    pub solver: SolveOptions,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            variant: Variant::FixedDc,
            beta: 0.0,
            penalty: 1.0e6,
            curtailment_epsilon: 0.01,
            cyclic_ramp: true,
            solver: SolveOptions::default(),
        }
    }
}

impl ModelSpec {
    pub fn new(variant: Variant, beta: f64) -> Self {
        Self {
            variant,
            beta,
            ..Self::default()
        }
    }

    pub fn validate(&self, case: &PowerCase) -> Result<(), SpecError> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(SpecError::BetaOutOfRange(self.beta));
        }
        let threshold = 100.0 * case.max_energy_cost() * case.mva_base;
        if !(self.penalty > threshold) {
            return Err(SpecError::PenaltyTooLow {
                penalty: self.penalty,
                threshold,
            });
        }
        let limit = case.min_positive_energy_cost().map_or(f64::INFINITY, |c| 0.01 * c * case.mva_base);
        if !(self.curtailment_epsilon >= 0.0 && self.curtailment_epsilon < limit) {
            return Err(SpecError::EpsilonOutOfRange {
                epsilon: self.curtailment_epsilon,
                limit,
            });
        }
        if self.variant != Variant::Base && case.dc_sites.is_empty() {
            return Err(SpecError::NoDataCenters(self.variant));
        }
        Ok(())
    }

    /// Stable text identifying everything that shapes the built model.
    pub fn fingerprint(&self) -> String {
        format!(
            "variant={};beta={};penalty={};curtailment_epsilon={};cyclic_ramp={}",
            self.variant, self.beta, self.penalty, self.curtailment_epsilon, self.cyclic_ramp
        )
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Milp(#[from] MilpError),
}

/// A built model together with the handle tables needed to read solutions.
#[derive(Debug, Clone)]
pub struct ScucModel {
    pub model: MilpModel,
    pub vars: ScucVariables,
    pub spec: ModelSpec,
    pub index: CaseIndex,
    /// Present for every variant with data-center load.
    pub quota: Option<FlexQuota>,
}

/// Assembles objective, generator, commitment, network, contingency and
/// data-center blocks in that order.
pub fn build_model(case: &PowerCase, spec: &ModelSpec) -> Result<ScucModel, BuildError> {
    spec.validate(case)?;
    let index = case.index();
    let mut model = MilpModel::new(case.name.clone());
    model.fingerprint = spec.fingerprint();
    let vars = ScucVariables::register(&mut model, case, &index, spec)?;
    model.set_objective(build_objective(case, spec, &vars))?;
    build_generator_block(&mut model, case, &vars)?;
    build_commitment_logic(&mut model, case, spec, &vars)?;
    build_network_block(&mut model, case, &index, &vars)?;
    for cv in &vars.contingencies {
        build_contingency_block(&mut model, case, &index, &vars, cv)?;
    }
    let quota = if spec.variant == Variant::Base {
        None
    } else {
        let quota = FlexQuota::new(case, if spec.variant.is_flexible() { spec.beta } else { 0.0 });
        dcflex::build_decomposition(&mut model, case, &vars, &quota)?;
        if spec.variant.is_flexible() {
            dcflex::build_coupling(&mut model, case, spec, &vars, &quota)?;
        }
        Some(quota)
    };
    Ok(ScucModel {
        model,
        vars,
        spec: spec.clone(),
        index,
        quota,
    })
}

#[cfg(test)]
mod tests;
