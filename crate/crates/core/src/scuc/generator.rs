//! Dispatch limits, reserve, start-up detection, ramping and minimum up/down.

use alloc::format;

use crate::case::PowerCase;
use crate::milp::{LinExpr, MilpError, MilpModel, Sense};

use super::{ModelSpec, ScucVariables};

/// Committed-capacity bounds, per-unit reserve cap and the system reserve
/// requirement (a constant equal to the largest rated unit).
pub fn build_generator_block(model: &mut MilpModel, case: &PowerCase, vars: &ScucVariables) -> Result<usize, MilpError> {
    let before = model.num_constraints();
    let requirement = case.largest_unit();
    for t in 0..case.horizon {
        for (g, unit) in case.generators.iter().enumerate() {
            let (p, u, r) = (vars.p.get(g, t), vars.u.get(g, t), vars.reserve.get(g, t));
            model.add_constraint(format!("pmin[{},{t}]", unit.id), p - u * unit.p_min, Sense::Ge, 0.0)?;
            model.add_constraint(format!("pmax[{},{t}]", unit.id), p + r - u * unit.p_max, Sense::Le, 0.0)?;
            model.add_constraint(format!("rsp[{},{t}]", unit.id), r - u * unit.reserve_ramp, Sense::Le, 0.0)?;
        }
        let total = LinExpr::sum((0..case.generators.len()).map(|g| vars.reserve.get(g, t)));
        model.add_constraint(format!("rsys[{t}]"), total, Sense::Ge, requirement)?;
    }
    Ok(model.num_constraints() - before)
}

/// Start-up detection with the cyclic boundary `u[0-1] := u[T-1]`, ramp-up
/// and ramp-down with start/stop allowances, and the non-cyclic minimum
/// up/down windows.
pub fn build_commitment_logic(
    model: &mut MilpModel,
    case: &PowerCase,
    spec: &ModelSpec,
    vars: &ScucVariables,
) -> Result<usize, MilpError> {
    let before = model.num_constraints();
    let horizon = case.horizon;
    let prev = |t: usize| (t + horizon - 1) % horizon;
    for (g, unit) in case.generators.iter().enumerate() {
        let id = unit.id;
        let u = |t: usize| vars.u.get(g, t);
        let v = |t: usize| vars.v.get(g, t);
        let p = |t: usize| vars.p.get(g, t);
        for t in 0..horizon {
            model.add_constraint(format!("su[{id},{t}]"), v(t) - u(t) + u(prev(t)), Sense::Ge, 0.0)?;
        }
        for t in 0..horizon {
            if t == 0 && !spec.cyclic_ramp {
                continue;
            }
            let s = prev(t);
            let up = p(t) - p(s) - u(s) * unit.ramp_hourly - v(t) * unit.ramp_startup;
            model.add_constraint(format!("rup[{id},{t}]"), up, Sense::Le, 0.0)?;
            let shutdown = (v(t) - u(t) + u(s)) * unit.ramp_shutdown;
            let dn = p(s) - p(t) - u(t) * unit.ramp_hourly - shutdown;
            model.add_constraint(format!("rdn[{id},{t}]"), dn, Sense::Le, 0.0)?;
        }
        let t_up = unit.min_up as usize;
        for t in t_up.saturating_sub(1)..horizon {
            let window = LinExpr::sum((t + 1 - t_up..=t).map(v));
            model.add_constraint(format!("mup[{id},{t}]"), window - u(t), Sense::Le, 0.0)?;
        }
        let t_dn = unit.min_dn as usize;
        for t in 0..horizon.saturating_sub(t_dn) {
            let window = LinExpr::sum((t + 1..=t + t_dn).map(v));
            model.add_constraint(format!("mdn[{id},{t}]"), window + u(t), Sense::Le, 1.0)?;
        }
    }
    Ok(model.num_constraints() - before)
}
