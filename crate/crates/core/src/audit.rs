//! Independent feasibility audit of a solution.
//!
//! Residuals are recomputed from case data and raw variable values; nothing
//! here reads the model's rows, so a wrong row in the builder shows up as a
//! residual instead of being reproduced.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::case::PowerCase;
use crate::dcflex::verify_energy_accounting;
use crate::milp::{BoundViolation, Solution};
use crate::scuc::ScucModel;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuditReport {
    /// Nodal balance, base case and every contingency (p.u.).
    pub balance_residual: f64,
    /// `flow - (theta_from - theta_to) / x`, base and surviving branches, plus
    /// the outaged branch's flow (p.u.).
    pub flow_residual: f64,
    /// `use + curtailed - available` (p.u.).
    pub renewable_residual: f64,
    /// Active data-center coupling rows.
    pub coupling_residual: f64,
    pub decomposition_residual: f64,
    /// `|Pc - P| - reserve_ramp * u`, positive part.
    pub redispatch_excess: f64,
    /// `|flow| - rating - slack`, positive part.
    pub thermal_excess: f64,
    /// `shed - demand - dc_load`, positive part.
    pub shed_excess: f64,
    pub bound_violation: Option<BoundViolation>,
}

impl AuditReport {
    /// Human-readable list of every check above `tol`.
    pub fn failures(&self, tol: f64) -> Vec<String> {
        let mut out = Vec::new();
        for (name, value) in [
            ("nodal balance", self.balance_residual),
            ("flow consistency", self.flow_residual),
            ("renewable split", self.renewable_residual),
            ("coupling", self.coupling_residual),
            ("load decomposition", self.decomposition_residual),
            ("redispatch bound", self.redispatch_excess),
            ("thermal slack", self.thermal_excess),
            ("shedding bound", self.shed_excess),
        ] {
            if !(value <= tol) {
                out.push(format!("{name} residual {value:e} > {tol:e}"));
            }
        }
        if let Some(b) = &self.bound_violation {
            out.push(format!("{b}"));
        }
        out
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.failures(tol).is_empty()
    }
}

fn bump(slot: &mut f64, value: f64) {
    let v = if value.is_nan() { f64::INFINITY } else { value };
    if v > *slot {
        *slot = v;
    }
}

pub fn audit_solution(case: &PowerCase, sm: &ScucModel, sol: &Solution, bound_tol: f64) -> AuditReport {
    let vars = &sm.vars;
    let idx = &sm.index;
    let x = |v| sol.value(v);
    let mut r = AuditReport {
        bound_violation: sol.check_bounds(&sm.model, bound_tol).err(),
        ..AuditReport::default()
    };
    if sol.values.len() != sm.model.num_vars() {
        r.balance_residual = f64::INFINITY;
        return r;
    }

    let dc_load = |n: usize, t: usize| vars.dc_load(idx, n, t).map_or(0.0, x);
    let ren_use = |n: usize, t: usize| vars.renewable_use(idx, n, t).map_or(0.0, x);

    for t in 0..case.horizon {
        // base case
        for (l, br) in case.branches.iter().enumerate() {
            let f = x(vars.flow.get(l, t));
            let dtheta = x(vars.theta.get(idx.branch_from[l], t)) - x(vars.theta.get(idx.branch_to[l], t));
            bump(&mut r.flow_residual, (f - dtheta / br.reactance).abs());
            bump(&mut r.thermal_excess, f.abs() - br.rating_normal - x(vars.alpha.get(l, t)));
        }
        for (n, bus) in case.buses.iter().enumerate() {
            let gen: f64 = idx.gens_at_bus[n].iter().map(|&g| x(vars.p.get(g, t))).sum();
            let inflow: f64 = idx.branches_into[n].iter().map(|&l| x(vars.flow.get(l, t))).sum();
            let outflow: f64 = idx.branches_out_of[n].iter().map(|&l| x(vars.flow.get(l, t))).sum();
            let shed = x(vars.shed.get(n, t));
            let load = bus.demand[t] + dc_load(n, t);
            bump(&mut r.balance_residual, (gen + ren_use(n, t) + inflow - outflow - load + shed).abs());
            bump(&mut r.shed_excess, shed - load);
        }
        for (s, site) in case.renewable_sites.iter().enumerate() {
            let total = x(vars.r_use.get(s, t)) + x(vars.r_curt.get(s, t));
            bump(&mut r.renewable_residual, (total - site.available[t]).abs());
        }

        // post-contingency states
        for cv in &vars.contingencies {
            for (l, br) in case.branches.iter().enumerate() {
                let f = x(cv.flow.get(l, t));
                if l == cv.branch {
                    bump(&mut r.flow_residual, f.abs());
                    continue;
                }
                let dtheta = x(cv.theta.get(idx.branch_from[l], t)) - x(cv.theta.get(idx.branch_to[l], t));
                bump(&mut r.flow_residual, (f - dtheta / br.reactance).abs());
                let slack = cv.alpha.get(l, t).map_or(0.0, x);
                bump(&mut r.thermal_excess, f.abs() - br.rating_emergency - slack);
            }
            for (g, unit) in case.generators.iter().enumerate() {
                let band = unit.reserve_ramp * x(vars.u.get(g, t));
                bump(&mut r.redispatch_excess, (x(cv.p.get(g, t)) - x(vars.p.get(g, t))).abs() - band);
            }
            for (n, bus) in case.buses.iter().enumerate() {
                let gen: f64 = idx.gens_at_bus[n].iter().map(|&g| x(cv.p.get(g, t))).sum();
                let inflow: f64 = idx.branches_into[n].iter().map(|&l| x(cv.flow.get(l, t))).sum();
                let outflow: f64 = idx.branches_out_of[n].iter().map(|&l| x(cv.flow.get(l, t))).sum();
                let shed = x(cv.shed.get(n, t));
                let load = bus.demand[t] + dc_load(n, t);
                bump(&mut r.balance_residual, (gen + ren_use(n, t) + inflow - outflow - load + shed).abs());
                bump(&mut r.shed_excess, shed - load);
            }
        }
    }

    let energy = verify_energy_accounting(case, sm, sol);
    r.coupling_residual = energy.coupling_residual;
    r.decomposition_residual = energy.decomposition_residual;
    r
}
