//! Brute-force commitment enumeration for desk-size instances.
//!
//! Every on/off pattern is screened against the minimum up/down windows,
//! its binaries are fixed in a copy of the model, and the remaining linear
//! program goes to an ordinary [`Solver`]. The minimum over all patterns is
//! the exact MILP optimum.

use alloc::vec::Vec;

use crate::case::PowerCase;
use crate::milp::{MilpModel, Solution, SolveError, SolveOptions, SolveStatus, Solver};
use crate::scuc::{build_model, BuildError, ModelSpec, ScucModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_units: usize,
    pub max_hours: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            max_units: 3,
            max_hours: 6,
        }
    }
}

/// How start-up indicators are chosen for a commitment pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StartupMode {
    /// `v = max(0, u[t] - u[t-1])`. Exact whenever an extra start-up flag can
    /// never relax a ramp limit, e.g. ramps at or above `p_max`.
    #[default]
    Minimal,
    /// Also every superset of the minimal start-up set.
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("instance has {units} units x {hours} hours; oracle limit is {max_units} x {max_hours}")]
    TooLarge {
        units: usize,
        hours: usize,
        max_units: usize,
        max_hours: usize,
    },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("subproblem solve failed: {0}")]
    Solver(#[from] SolveError),
}

/// On/off and start-up flags as bit masks, bit `g * horizon + t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Commitment {
    pub u: u64,
    pub v: u64,
}

impl Commitment {
    pub fn on(&self, horizon: usize, g: usize, t: usize) -> bool {
        self.u >> (g * horizon + t) & 1 == 1
    }

    pub fn starts(&self, horizon: usize, g: usize, t: usize) -> bool {
        self.v >> (g * horizon + t) & 1 == 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternOutcome {
    pub commitment: Commitment,
    pub status: SolveStatus,
    pub objective: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    pub best_objective: Option<f64>,
    pub best_commitment: Option<Commitment>,
    /// Full solution of the best pattern's subproblem.
    pub best_solution: Option<Solution>,
    /// `2^(units * hours)` on/off patterns considered.
    pub patterns_enumerated: u64,
    /// Candidates removed by the minimum up/down screen.
    pub screened_out: u64,
    pub outcomes: Vec<PatternOutcome>,
}

impl OracleResult {
    pub fn feasible_patterns(&self) -> usize {
        self.outcomes.iter().filter(|o| o.objective.is_some()).count()
    }
}

/// A built model plus the candidate list; subproblems can be solved in any
/// order and merged with [`OraclePlan::reduce`].
#[derive(Debug, Clone)]
pub struct OraclePlan {
    pub sm: ScucModel,
    pub candidates: Vec<Commitment>,
    pub patterns_enumerated: u64,
    pub screened_out: u64,
}

fn minimal_startups(u: u64, units: usize, horizon: usize) -> u64 {
    let mut v = 0;
    for g in 0..units {
        for t in 0..horizon {
            let prev = (t + horizon - 1) % horizon;
            let on = u >> (g * horizon + t) & 1;
            let was_on = u >> (g * horizon + prev) & 1;
            if on == 1 && was_on == 0 {
                v |= 1 << (g * horizon + t);
            }
        }
    }
    v
}

/// Minimum up/down windows evaluated on concrete flags.
fn respects_min_times(case: &PowerCase, c: &Commitment) -> bool {
    let h = case.horizon;
    for (g, unit) in case.generators.iter().enumerate() {
        let (t_up, t_dn) = (unit.min_up as usize, unit.min_dn as usize);
        for t in t_up.saturating_sub(1)..h {
            let starts = (t + 1 - t_up..=t).filter(|&s| c.starts(h, g, s)).count();
            if starts > usize::from(c.on(h, g, t)) {
                return false;
            }
        }
        for t in 0..h.saturating_sub(t_dn) {
            let starts = (t + 1..=t + t_dn).filter(|&s| c.starts(h, g, s)).count();
            if starts + usize::from(c.on(h, g, t)) > 1 {
                return false;
            }
        }
    }
    true
}

impl OraclePlan {
    pub fn new(case: &PowerCase, spec: &ModelSpec, limits: OracleLimits, mode: StartupMode) -> Result<Self, OracleError> {
        let units = case.generators.len();
        let hours = case.horizon;
        if units > limits.max_units || hours > limits.max_hours || units * hours > 32 {
            return Err(OracleError::TooLarge {
                units,
                hours,
                max_units: limits.max_units,
                max_hours: limits.max_hours,
            });
        }
        let sm = build_model(case, spec)?;
        let bits = units * hours;
        let all: u64 = if bits == 0 { 0 } else { (1u64 << bits) - 1 };
        let patterns_enumerated = 1u64 << bits;
        let mut candidates = Vec::new();
        let mut screened_out = 0;
        for u in 0..patterns_enumerated {
            let v_min = minimal_startups(u, units, hours);
            let free = all & !v_min;
            // walk every subset of `free` (only the empty one in minimal mode)
            let mut extra = 0u64;
            loop {
                let c = Commitment { u, v: v_min | extra };
                if respects_min_times(case, &c) {
                    candidates.push(c);
                } else {
                    screened_out += 1;
                }
                if mode == StartupMode::Minimal || extra == free {
                    break;
                }
                extra = (extra.wrapping_sub(free)) & free;
            }
        }
        Ok(Self {
            sm,
            candidates,
            patterns_enumerated,
            screened_out,
        })
    }

    /// Copy of the model with every binary fixed to the pattern.
    pub fn fixed_model(&self, c: &Commitment) -> MilpModel {
        let mut model = self.sm.model.clone();
        let h = self.sm.vars.u.cols();
        for g in 0..self.sm.vars.u.rows() {
            for t in 0..h {
                model.fix_var(self.sm.vars.u.get(g, t), if c.on(h, g, t) { 1.0 } else { 0.0 });
                model.fix_var(self.sm.vars.v.get(g, t), if c.starts(h, g, t) { 1.0 } else { 0.0 });
            }
        }
        model
    }

    pub fn solve_candidate<S: Solver + ?Sized>(
        &self,
        solver: &S,
        c: &Commitment,
        options: &SolveOptions,
    ) -> Result<(PatternOutcome, Option<Solution>), SolveError> {
        let model = self.fixed_model(c);
        let opts = SolveOptions {
            mip_gap: 0.0,
            ..options.clone()
        };
        let sol = solver.solve(&model, &opts)?;
        let objective = (sol.status == SolveStatus::Optimal).then_some(sol.objective);
        let outcome = PatternOutcome {
            commitment: *c,
            status: sol.status,
            objective,
        };
        Ok((outcome, objective.map(|_| sol)))
    }

    /// Order-free minimum over solved candidates; ties go to the smallest
    /// commitment so the result does not depend on completion order.
    pub fn reduce(&self, mut solved: Vec<(PatternOutcome, Option<Solution>)>) -> OracleResult {
        solved.sort_by_key(|s| s.0.commitment);
        let mut best: Option<(f64, Commitment, Solution)> = None;
        let mut outcomes = Vec::with_capacity(solved.len());
        for (outcome, sol) in solved {
            if let (Some(obj), Some(sol)) = (outcome.objective, sol) {
                if best.as_ref().is_none_or(|(b, _, _)| obj < *b) {
                    best = Some((obj, outcome.commitment, sol));
                }
            }
            outcomes.push(outcome);
        }
        let (best_objective, best_commitment, best_solution) = match best {
            Some((o, c, s)) => (Some(o), Some(c), Some(s)),
            None => (None, None, None),
        };
        OracleResult {
            best_objective,
            best_commitment,
            best_solution,
            patterns_enumerated: self.patterns_enumerated,
            screened_out: self.screened_out,
            outcomes,
        }
    }
}

/// Sequential enumeration.
pub fn enumerate_optimum<S: Solver + ?Sized>(
    case: &PowerCase,
    spec: &ModelSpec,
    limits: OracleLimits,
    mode: StartupMode,
    solver: &S,
) -> Result<OracleResult, OracleError> {
    let plan = OraclePlan::new(case, spec, limits, mode)?;
    let solved = plan
        .candidates
        .iter()
        .map(|c| plan.solve_candidate(solver, c, &spec.solver))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(plan.reduce(solved))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case::fixtures;
    use crate::scuc::Variant;

    #[test]
    fn minimal_startups_wrap_cyclically() {
        // one unit, 4 hours, on in hours 0 and 3 only: the wrap means no start at 0
        let u = 0b1001;
        assert_eq!(minimal_startups(u, 1, 4), 0b1000);
        assert_eq!(minimal_startups(0b0110, 1, 4), 0b0010);
        assert_eq!(minimal_startups(0b1111, 1, 4), 0);
    }

    #[test]
    fn min_up_screen() {
        let mut case = fixtures::two_bus(0.5, 1.0);
        case.horizon = 4;
        case.buses.iter_mut().for_each(|b| b.demand = alloc::vec![0.0, 0.5, 0.5, 0.0]);
        case.generators[0].min_up = 3;
        let ok = |u: u64| respects_min_times(&case, &Commitment { u, v: minimal_startups(u, 1, 4) });
        assert!(ok(0b1110));
        assert!(!ok(0b0110));
        assert!(ok(0b0000));
        assert!(ok(0b1111));
    }

    #[test]
    fn exhaustive_mode_enumerates_supersets() {
        let mut case = fixtures::two_bus(0.5, 1.0);
        case.horizon = 2;
        case.buses.iter_mut().for_each(|b| b.demand = alloc::vec![0.5, 0.5]);
        let spec = ModelSpec::new(Variant::Base, 0.0);
        let minimal = OraclePlan::new(&case, &spec, OracleLimits::default(), StartupMode::Minimal).unwrap();
        assert_eq!(minimal.patterns_enumerated, 4);
        assert_eq!(minimal.candidates.len(), 4);
        let full = OraclePlan::new(&case, &spec, OracleLimits::default(), StartupMode::Exhaustive).unwrap();
        // u=00:4 v's, u=01:2, u=10:2, u=11:4
        assert_eq!(full.candidates.len() as u64 + full.screened_out, 12);
    }

    #[test]
    fn refuses_large_instances() {
        let case = crate::case::fixtures::ring_with_spur();
        let limits = OracleLimits {
            max_units: 1,
            max_hours: 1,
        };
        let err = OraclePlan::new(&case, &ModelSpec::new(Variant::Base, 0.0), limits, StartupMode::Minimal).unwrap_err();
        assert!(matches!(err, OracleError::TooLarge { hours: 2, .. }));
    }

    #[test]
    fn fixed_model_pins_binaries() {
        let mut case = fixtures::two_bus(0.5, 1.0);
        case.horizon = 2;
        case.buses.iter_mut().for_each(|b| b.demand = alloc::vec![0.5, 0.5]);
        let plan = OraclePlan::new(&case, &ModelSpec::new(Variant::Base, 0.0), OracleLimits::default(), StartupMode::Minimal).unwrap();
        let m = plan.fixed_model(&Commitment { u: 0b10, v: 0b10 });
        let u0 = plan.sm.vars.u.get(0, 0);
        let u1 = plan.sm.vars.u.get(0, 1);
        assert_eq!((m.var(u0).lower, m.var(u0).upper), (0.0, 0.0));
        assert_eq!((m.var(u1).lower, m.var(u1).upper), (1.0, 1.0));
    }
}
