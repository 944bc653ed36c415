//! Study metrics recomputed from raw solution values.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::case::PowerCase;
use crate::milp::{Solution, SolveStatus};
use crate::scuc::{ScucModel, Variant};

/// Objective split recomputed from cost coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveBreakdown {
    pub generation_cost: f64,
    pub penalty_total: f64,
    pub curtailment_term: f64,
    /// Objective as reported by the solver.
    pub solver_objective: f64,
}

impl ObjectiveBreakdown {
    pub fn recomputed_total(&self) -> f64 {
        self.generation_cost + self.penalty_total + self.curtailment_term
    }

    /// `|recomputed - solver| / max(1, |solver|)`.
    pub fn relative_mismatch(&self) -> f64 {
        (self.recomputed_total() - self.solver_objective).abs() / self.solver_objective.abs().max(1.0)
    }

    pub fn is_consistent(&self, rel_tol: f64) -> bool {
        self.relative_mismatch() <= rel_tol
    }
}

/// Slack energy in p.u.·h, split by where it occurs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ViolationEnergy {
    pub base_thermal: f64,
    pub base_shedding: f64,
    pub contingency_thermal: f64,
    pub contingency_shedding: f64,
}

impl ViolationEnergy {
    pub fn base(&self) -> f64 {
        self.base_thermal + self.base_shedding
    }

    pub fn contingency(&self) -> f64 {
        self.contingency_thermal + self.contingency_shedding
    }

    pub fn thermal(&self) -> f64 {
        self.base_thermal + self.contingency_thermal
    }

    pub fn shedding(&self) -> f64 {
        self.base_shedding + self.contingency_shedding
    }

    pub fn total(&self) -> f64 {
        self.base() + self.contingency()
    }
}

pub fn violation_energy(sm: &ScucModel, sol: &Solution) -> ViolationEnergy {
    let x = |v| sol.value(v);
    let vars = &sm.vars;
    let mut e = ViolationEnergy {
        base_thermal: vars.alpha.iter().map(x).sum(),
        base_shedding: vars.shed.iter().map(x).sum(),
        ..ViolationEnergy::default()
    };
    for cv in &vars.contingencies {
        e.contingency_thermal += cv.alpha.iter().flatten().map(x).sum::<f64>();
        e.contingency_shedding += cv.shed.iter().map(x).sum::<f64>();
    }
    e
}

pub fn decompose_objective(case: &PowerCase, sm: &ScucModel, sol: &Solution) -> ObjectiveBreakdown {
    let x = |v| sol.value(v);
    let vars = &sm.vars;
    let mut generation_cost = 0.0;
    for (g, unit) in case.generators.iter().enumerate() {
        for t in 0..case.horizon {
            generation_cost += unit.cost_energy * case.mva_base * x(vars.p.get(g, t))
                + unit.cost_noload * x(vars.u.get(g, t))
                + unit.cost_startup * x(vars.v.get(g, t));
        }
    }
    let penalty_total = sm.spec.penalty * violation_energy(sm, sol).total();
    let curtailment_term = sm.spec.curtailment_epsilon * vars.r_curt.iter().map(x).sum::<f64>();
    ObjectiveBreakdown {
        generation_cost,
        penalty_total,
        curtailment_term,
        solver_objective: sol.objective,
    }
}

/// `100 (1 - variant / fixed)`; `None` when the reference has no violations.
pub fn violation_reduction(variant: &ViolationEnergy, fixed: &ViolationEnergy) -> Option<f64> {
    let reference = fixed.total();
    if reference <= 0.0 {
        return None;
    }
    Some(100.0 * (1.0 - variant.total() / reference))
}

/// How post-contingency overloads are aggregated into one count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverloadAggregation {
    /// Distinct `(line, hour)` pairs overloaded under at least one outage.
    #[default]
    LineHours,
    /// Distinct lines overloaded in at least one hour under at least one outage.
    DistinctLines,
}

impl FromStr for OverloadAggregation {
    type Err = alloc::string::String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "line-hours" => Ok(Self::LineHours),
            "distinct-lines" => Ok(Self::DistinctLines),
            _ => Err(alloc::format!("unknown overload aggregation `{s}`")),
        }
    }
}

impl fmt::Display for OverloadAggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::LineHours => "line-hours",
            Self::DistinctLines => "distinct-lines",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OverloadCount {
    /// `(outage, line, hour)` triples above the threshold.
    pub triples: usize,
    pub line_hours: usize,
    pub distinct_lines: usize,
}

impl OverloadCount {
    pub fn get(&self, aggregation: OverloadAggregation) -> usize {
        match aggregation {
            OverloadAggregation::LineHours => self.line_hours,
            OverloadAggregation::DistinctLines => self.distinct_lines,
        }
    }
}

pub const DEFAULT_OVERLOAD_THRESHOLD: f64 = 1e-4;

pub fn overloaded_line_count(sm: &ScucModel, sol: &Solution, threshold: f64) -> OverloadCount {
    let mut triples = 0;
    let mut line_hours = BTreeSet::new();
    for cv in &sm.vars.contingencies {
        for l in 0..cv.alpha.rows() {
            for t in 0..cv.alpha.cols() {
                if let Some(a) = cv.alpha.get(l, t) {
                    if sol.value(a) > threshold {
                        triples += 1;
                        line_hours.insert((l, t));
                    }
                }
            }
        }
    }
    let distinct_lines = line_hours.iter().map(|&(l, _)| l).collect::<BTreeSet<_>>().len();
    OverloadCount {
        triples,
        line_hours: line_hours.len(),
        distinct_lines,
    }
}

/// Count as a percentage of the reference count; `None` if the reference is zero.
pub fn normalized_percent(count: usize, reference: usize) -> Option<f64> {
    (reference > 0).then(|| 100.0 * count as f64 / reference as f64)
}

pub fn curtailment_mwh(case: &PowerCase, sm: &ScucModel, sol: &Solution) -> f64 {
    sm.vars.r_curt.iter().map(|v| sol.value(v)).sum::<f64>() * case.mva_base
}

/// One `(variant, beta)` cell of a study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub variant: Variant,
    pub beta: f64,
    pub status: SolveStatus,
    pub objective: f64,
    pub generation_cost: f64,
    pub penalty: f64,
    pub violation: ViolationEnergy,
    pub overloads: OverloadCount,
    pub curtailment_mwh: f64,
    pub mip_gap: f64,
    pub wall_seconds: f64,
    pub reduction_pct: Option<f64>,
    pub savings_usd: Option<f64>,
    pub overload_pct: Option<f64>,
}

impl StudyRow {
    pub fn from_solution(case: &PowerCase, sm: &ScucModel, sol: &Solution, threshold: f64) -> Self {
        let b = decompose_objective(case, sm, sol);
        Self {
            variant: sm.spec.variant,
            beta: sm.spec.beta,
            status: sol.status,
            objective: sol.objective,
            generation_cost: b.generation_cost,
            penalty: b.penalty_total,
            violation: violation_energy(sm, sol),
            overloads: overloaded_line_count(sm, sol, threshold),
            curtailment_mwh: curtailment_mwh(case, sm, sol),
            mip_gap: sol.mip_gap,
            wall_seconds: sol.wall_time.as_secs_f64(),
            reduction_pct: None,
            savings_usd: None,
            overload_pct: None,
        }
    }

    /// A cell whose solve produced no usable solution.
    pub fn failed(variant: Variant, beta: f64, status: SolveStatus) -> Self {
        Self {
            variant,
            beta,
            status,
            objective: f64::NAN,
            generation_cost: f64::NAN,
            penalty: f64::NAN,
            violation: ViolationEnergy::default(),
            overloads: OverloadCount::default(),
            curtailment_mwh: f64::NAN,
            mip_gap: f64::NAN,
            wall_seconds: 0.0,
            reduction_pct: None,
            savings_usd: None,
            overload_pct: None,
        }
    }

    pub fn solved(&self) -> bool {
        self.status.has_solution()
    }
}

/// Study table ordered by variant, then beta.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StudyReport {
    pub rows: Vec<StudyRow>,
    pub aggregation: OverloadAggregation,
}

impl StudyReport {
    /// Sorts rows and fills the comparisons against the Fixed-DC row.
    pub fn new(mut rows: Vec<StudyRow>, aggregation: OverloadAggregation) -> Self {
        rows.sort_by(|a, b| a.variant.cmp(&b.variant).then(a.beta.total_cmp(&b.beta)));
        let fixed = rows.iter().find(|r| r.variant == Variant::FixedDc && r.solved()).cloned();
        for row in &mut rows {
            row.reduction_pct = None;
            row.savings_usd = None;
            row.overload_pct = None;
            let Some(f) = &fixed else { continue };
            if !row.solved() || row.variant == Variant::Base {
                continue;
            }
            row.reduction_pct = violation_reduction(&row.violation, &f.violation);
            row.savings_usd = Some(f.objective - row.objective);
            row.overload_pct = normalized_percent(row.overloads.get(aggregation), f.overloads.get(aggregation));
        }
        Self { rows, aggregation }
    }

    pub fn get(&self, variant: Variant, beta: f64) -> Option<&StudyRow> {
        self.rows
            .iter()
            .find(|r| r.variant == variant && (variant == Variant::Base || variant == Variant::FixedDc || r.beta == beta))
    }

    pub fn fixed(&self) -> Option<&StudyRow> {
        self.rows.iter().find(|r| r.variant == Variant::FixedDc)
    }

    pub fn series(&self, variant: Variant) -> impl Iterator<Item = &StudyRow> + '_ {
        self.rows.iter().filter(move |r| r.variant == variant)
    }
}
