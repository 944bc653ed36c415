//! DC power flow, soft thermal limits, nodal balance, renewable split and
//! shedding bounds, for the base case and for each post-contingency state.

use alloc::format;

use crate::case::{CaseIndex, PowerCase};
use crate::milp::{LinExpr, MilpError, MilpModel, Sense, Var};

use super::{ContingencyVars, ScucVariables};

/// Injection side of a nodal balance:
/// `sum(gen) + renewable + inflow - outflow - dc_load + shed`.
fn balance_expr(
    idx: &CaseIndex,
    n: usize,
    gen: impl Fn(usize) -> Var,
    flow: impl Fn(usize) -> Var,
    renewable: Option<Var>,
    dc_load: Option<Var>,
    shed: Var,
) -> LinExpr {
    let mut e = LinExpr::sum(idx.gens_at_bus[n].iter().map(|&g| gen(g)));
    if let Some(r) = renewable {
        e.push(r, 1.0);
    }
    for &l in &idx.branches_into[n] {
        e.push(flow(l), 1.0);
    }
    for &l in &idx.branches_out_of[n] {
        e.push(flow(l), -1.0);
    }
    if let Some(d) = dc_load {
        e.push(d, -1.0);
    }
    e.push(shed, 1.0);
    e
}

fn flow_definition(flow: Var, from: Var, to: Var, reactance: f64) -> LinExpr {
    let b = 1.0 / reactance;
    flow - from * b + to * b
}

pub fn build_network_block(model: &mut MilpModel, case: &PowerCase, idx: &CaseIndex, vars: &ScucVariables) -> Result<usize, MilpError> {
    let before = model.num_constraints();
    for t in 0..case.horizon {
        for (l, br) in case.branches.iter().enumerate() {
            let (f, a) = (vars.flow.get(l, t), vars.alpha.get(l, t));
            let th = |n: usize| vars.theta.get(n, t);
            model.add_constraint(
                format!("dcpf[{},{t}]", br.id),
                flow_definition(f, th(idx.branch_from[l]), th(idx.branch_to[l]), br.reactance),
                Sense::Eq,
                0.0,
            )?;
            model.add_constraint(format!("thup[{},{t}]", br.id), f - a, Sense::Le, br.rating_normal)?;
            model.add_constraint(format!("thdn[{},{t}]", br.id), f + a, Sense::Ge, -br.rating_normal)?;
        }
        for (n, bus) in case.buses.iter().enumerate() {
            let dc = vars.dc_load(idx, n, t);
            let e = balance_expr(
                idx,
                n,
                |g| vars.p.get(g, t),
                |l| vars.flow.get(l, t),
                vars.renewable_use(idx, n, t),
                dc,
                vars.shed.get(n, t),
            );
            model.add_constraint(format!("bal[{},{t}]", bus.id), e, Sense::Eq, bus.demand[t])?;
            if let Some(d) = dc {
                model.add_constraint(format!("shub[{},{t}]", bus.id), vars.shed.get(n, t) - d, Sense::Le, bus.demand[t])?;
            }
        }
        for (s, site) in case.renewable_sites.iter().enumerate() {
            model.add_constraint(
                format!("ren[{},{t}]", site.bus),
                vars.r_use.get(s, t) + vars.r_curt.get(s, t),
                Sense::Eq,
                site.available[t],
            )?;
        }
    }
    Ok(model.num_constraints() - before)
}

/// Post-contingency block for one outage. Renewable use and data-center load
/// are the base-case handles; generators redispatch within their reserve ramp.
pub fn build_contingency_block(
    model: &mut MilpModel,
    case: &PowerCase,
    idx: &CaseIndex,
    vars: &ScucVariables,
    cv: &ContingencyVars,
) -> Result<usize, MilpError> {
    let before = model.num_constraints();
    let k = cv.branch;
    let c = case.branches[k].id;
    for t in 0..case.horizon {
        model.add_constraint(format!("outc[{c},{t}]"), cv.flow.get(k, t), Sense::Eq, 0.0)?;
        for (l, br) in case.branches.iter().enumerate() {
            if l == k {
                continue;
            }
            let f = cv.flow.get(l, t);
            let a = cv.alpha.get(l, t).expect("slack exists on surviving branches");
            let th = |n: usize| cv.theta.get(n, t);
            model.add_constraint(
                format!("dcpfc[{c},{},{t}]", br.id),
                flow_definition(f, th(idx.branch_from[l]), th(idx.branch_to[l]), br.reactance),
                Sense::Eq,
                0.0,
            )?;
            model.add_constraint(format!("thupc[{c},{},{t}]", br.id), f - a, Sense::Le, br.rating_emergency)?;
            model.add_constraint(format!("thdnc[{c},{},{t}]", br.id), f + a, Sense::Ge, -br.rating_emergency)?;
        }
        for (g, unit) in case.generators.iter().enumerate() {
            let (pc, p, u) = (cv.p.get(g, t), vars.p.get(g, t), vars.u.get(g, t));
            let band = u * unit.reserve_ramp;
            model.add_constraint(format!("rdupc[{c},{},{t}]", unit.id), pc - p - band.clone(), Sense::Le, 0.0)?;
            model.add_constraint(format!("rddnc[{c},{},{t}]", unit.id), pc - p + band, Sense::Ge, 0.0)?;
            model.add_constraint(format!("pminc[{c},{},{t}]", unit.id), pc - u * unit.p_min, Sense::Ge, 0.0)?;
            model.add_constraint(format!("pmaxc[{c},{},{t}]", unit.id), pc - u * unit.p_max, Sense::Le, 0.0)?;
        }
        for (n, bus) in case.buses.iter().enumerate() {
            let dc = vars.dc_load(idx, n, t);
            let e = balance_expr(
                idx,
                n,
                |g| cv.p.get(g, t),
                |l| cv.flow.get(l, t),
                vars.renewable_use(idx, n, t),
                dc,
                cv.shed.get(n, t),
            );
            model.add_constraint(format!("balc[{c},{},{t}]", bus.id), e, Sense::Eq, bus.demand[t])?;
            if let Some(d) = dc {
                model.add_constraint(format!("shubc[{c},{},{t}]", bus.id), cv.shed.get(n, t) - d, Sense::Le, bus.demand[t])?;
            }
        }
    }
    Ok(model.num_constraints() - before)
}
