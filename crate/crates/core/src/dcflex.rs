//! Data-center load decomposition and the three flexibility couplings.
//!
//! Each site's load is `D = D_fix + D_flex` with `D_fix = (1 - beta) D_orig`
//! and the nominal flexible quota `beta D_orig`. The variants differ only in
//! what they preserve of the quota: the hourly system total (spatial), each
//! site's daily total (temporal) or the global daily total (spatio-temporal).
//! Under the spatial and spatio-temporal couplings one site may take more
//! than its own quota; only the site capacity bounds it.

use alloc::format;
use alloc::vec::Vec;

use crate::case::PowerCase;
use crate::milp::{LinExpr, MilpError, MilpModel, Sense, Solution};
use crate::profile::exact_split;
use crate::scuc::{Grid, ModelSpec, ScucModel, ScucVariables, Variant};

/// Fixed load and nominal flexible quota per (site, hour), materialized at
/// build time so every coupling right-hand side is a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct FlexQuota {
    pub beta: f64,
    pub fixed: Grid<f64>,
    pub quota: Grid<f64>,
}

impl FlexQuota {
    /// `fixed + quota` reproduces the original workload exactly.
    pub fn new(case: &PowerCase, beta: f64) -> Self {
        let d_n = case.dc_sites.len();
        let split = |d: usize, t: usize| exact_split(case.dc_sites[d].workload[t], beta);
        Self {
            beta,
            quota: Grid::from_fn(d_n, case.horizon, |d, t| split(d, t).0),
            fixed: Grid::from_fn(d_n, case.horizon, |d, t| split(d, t).1),
        }
    }

    pub fn site_quota(&self, d: usize) -> f64 {
        self.quota.row(d).iter().sum()
    }

    pub fn hour_quota(&self, t: usize) -> f64 {
        (0..self.quota.rows()).map(|d| self.quota.get(d, t)).sum()
    }

    pub fn total_quota(&self) -> f64 {
        self.quota.iter().sum()
    }
}

/// `D = D_fix + D_flex` with `D_flex >= 0` and `D <= capacity` as variable
/// bounds. Without flexibility the load is pinned to the original profile.
pub fn build_decomposition(
    model: &mut MilpModel,
    case: &PowerCase,
    vars: &ScucVariables,
    quota: &FlexQuota,
) -> Result<usize, MilpError> {
    let before = model.num_constraints();
    let Some(dc) = vars.dc.as_ref() else {
        return Ok(0);
    };
    for (d, site) in case.dc_sites.iter().enumerate() {
        for t in 0..case.horizon {
            let load = dc.load.get(d, t);
            if let Some(flex) = &dc.flex {
                let row = format!("dcdec[{},{t}]", site.bus);
                model.add_constraint(row, load - flex.get(d, t), Sense::Eq, quota.fixed.get(d, t))?;
            } else {
                model.add_constraint(format!("dcfix[{},{t}]", site.bus), load, Sense::Eq, site.workload[t])?;
            }
        }
    }
    Ok(model.num_constraints() - before)
}

/// Exactly one family of energy-preservation rows for the chosen variant.
pub fn build_coupling(
    model: &mut MilpModel,
    case: &PowerCase,
    spec: &ModelSpec,
    vars: &ScucVariables,
    quota: &FlexQuota,
) -> Result<usize, MilpError> {
    let before = model.num_constraints();
    let Some(flex) = vars.dc.as_ref().and_then(|dc| dc.flex.as_ref()) else {
        return Ok(0);
    };
    let d_n = case.dc_sites.len();
    match spec.variant {
        Variant::Spatial => {
            for t in 0..case.horizon {
                let e = LinExpr::sum((0..d_n).map(|d| flex.get(d, t)));
                model.add_constraint(format!("cpl_s[{t}]"), e, Sense::Eq, quota.hour_quota(t))?;
            }
        }
        Variant::Temporal => {
            for (d, site) in case.dc_sites.iter().enumerate() {
                let e = LinExpr::sum(flex.row(d).iter().copied());
                model.add_constraint(format!("cpl_t[{}]", site.bus), e, Sense::Eq, quota.site_quota(d))?;
            }
        }
        Variant::SpatioTemporal => {
            model.add_constraint("cpl_st", LinExpr::sum(flex.iter()), Sense::Eq, quota.total_quota())?;
        }
        Variant::Base | Variant::FixedDc => {}
    }
    Ok(model.num_constraints() - before)
}

/// Energy bookkeeping recomputed from solution values.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyAccounting {
    /// Largest |lhs - rhs| over the active coupling rows (p.u. or p.u.·h).
    pub coupling_residual: f64,
    /// Largest |D - D_fix - D_flex| (or |D - D_orig| without flexibility).
    pub decomposition_residual: f64,
    /// Served data-center energy, p.u.·h.
    pub served_energy: f64,
    /// Original data-center energy, p.u.·h.
    pub original_energy: f64,
    /// Per-site served energy, p.u.·h.
    pub site_energy: Vec<f64>,
}

impl EnergyAccounting {
    pub fn energy_residual(&self) -> f64 {
        (self.served_energy - self.original_energy).abs()
    }
}

pub fn verify_energy_accounting(case: &PowerCase, sm: &ScucModel, solution: &Solution) -> EnergyAccounting {
    let horizon = case.horizon;
    let d_n = case.dc_sites.len();
    let original_energy: f64 = case.dc_sites.iter().flat_map(|s| s.workload.iter()).sum();
    let Some(dc) = sm.vars.dc.as_ref() else {
        return EnergyAccounting {
            coupling_residual: 0.0,
            decomposition_residual: 0.0,
            served_energy: 0.0,
            original_energy,
            site_energy: alloc::vec![0.0; d_n],
        };
    };
    let load = |d: usize, t: usize| solution.value(dc.load.get(d, t));
    let site_energy: Vec<f64> = (0..d_n).map(|d| (0..horizon).map(|t| load(d, t)).sum()).collect();
    let served_energy = site_energy.iter().sum();

    let quota = sm.quota.as_ref();
    let mut decomposition_residual: f64 = 0.0;
    let mut coupling_residual: f64 = 0.0;
    match (&dc.flex, quota) {
        (Some(flex), Some(q)) => {
            let fx = |d: usize, t: usize| solution.value(flex.get(d, t));
            for d in 0..d_n {
                for t in 0..horizon {
                    decomposition_residual = decomposition_residual.max((load(d, t) - q.fixed.get(d, t) - fx(d, t)).abs());
                }
            }
            match sm.spec.variant {
                Variant::Spatial => {
                    for t in 0..horizon {
                        let lhs: f64 = (0..d_n).map(|d| fx(d, t)).sum();
                        coupling_residual = coupling_residual.max((lhs - q.hour_quota(t)).abs());
                    }
                }
                Variant::Temporal => {
                    for d in 0..d_n {
                        let lhs: f64 = (0..horizon).map(|t| fx(d, t)).sum();
                        coupling_residual = coupling_residual.max((lhs - q.site_quota(d)).abs());
                    }
                }
                Variant::SpatioTemporal => {
                    let lhs: f64 = (0..d_n).flat_map(|d| (0..horizon).map(move |t| (d, t))).map(|(d, t)| fx(d, t)).sum();
                    coupling_residual = (lhs - q.total_quota()).abs();
                }
                Variant::Base | Variant::FixedDc => {}
            }
        }
        _ => {
            for (d, site) in case.dc_sites.iter().enumerate() {
                for t in 0..horizon {
                    decomposition_residual = decomposition_residual.max((load(d, t) - site.workload[t]).abs());
                }
            }
        }
    }
    EnergyAccounting {
        coupling_residual,
        decomposition_residual,
        served_energy,
        original_energy,
        site_energy,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::case::{fixtures, DataCenterSite};
    use alloc::vec;

    fn two_site_case(horizon: usize) -> PowerCase {
        let mut case = fixtures::ring_with_spur();
        case.horizon = horizon;
        for b in &mut case.buses {
            b.demand = vec![0.5; horizon];
        }
        let workload: Vec<f64> = (0..horizon).map(|t| 5.0 + 0.1 * t as f64).collect();
        case.dc_sites = vec![
            DataCenterSite {
                bus: 2,
                capacity: 8.5,
                workload: workload.clone(),
            },
            DataCenterSite {
                bus: 3,
                capacity: 8.5,
                workload,
            },
        ];
        case
    }

    #[test]
    fn quota_arithmetic() {
        let mut case = two_site_case(1);
        case.dc_sites[0].workload = vec![7.0];
        let q = FlexQuota::new(&case, 0.4);
        assert!((q.fixed.get(0, 0) - 4.2).abs() < 1e-12);
        assert!((q.quota.get(0, 0) - 2.8).abs() < 1e-12);
        assert_eq!(q.fixed.get(0, 0) + q.quota.get(0, 0), 7.0);

        let q0 = FlexQuota::new(&case, 0.0);
        assert_eq!(q0.quota.get(0, 0), 0.0);
        assert_eq!(q0.fixed.get(0, 0), 7.0);
    }

    #[test]
    fn coupling_counts_per_variant() {
        let case = two_site_case(24);
        for (variant, expected) in [(Variant::Spatial, 24), (Variant::Temporal, 2), (Variant::SpatioTemporal, 1)] {
            let sm = crate::scuc::build_model(&case, &ModelSpec::new(variant, 0.3)).unwrap();
            let rows = ["cpl_s", "cpl_t", "cpl_st"].iter().map(|p| sm.model.count_rows(p)).sum::<usize>();
            assert_eq!(rows, expected, "{variant}");
            assert_eq!(sm.model.count_rows("dcdec"), 48);
        }
        let fixed = crate::scuc::build_model(&case, &ModelSpec::new(Variant::FixedDc, 0.3)).unwrap();
        assert_eq!(fixed.model.count_rows("dcfix"), 48);
        assert_eq!(fixed.model.count_vars("Dflex"), 0);
        let base = crate::scuc::build_model(&case, &ModelSpec::new(Variant::Base, 0.3)).unwrap();
        assert_eq!(base.model.count_vars("D"), 0);
        assert!(base.quota.is_none());
    }

    #[test]
    fn capacity_is_a_variable_bound() {
        let case = two_site_case(2);
        let sm = crate::scuc::build_model(&case, &ModelSpec::new(Variant::SpatioTemporal, 0.4)).unwrap();
        let d = sm.vars.dc.as_ref().unwrap().load.get(1, 0);
        assert_eq!(sm.model.var(d).upper, 8.5);
        let f = sm.vars.dc.as_ref().unwrap().flex.as_ref().unwrap().get(1, 0);
        assert_eq!(sm.model.var(f).lower, 0.0);
    }
}
