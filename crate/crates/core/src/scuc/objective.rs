use crate::case::PowerCase;
use crate::milp::LinExpr;

use super::{ModelSpec, ScucVariables};

/// Generation cost plus the uniform violation penalty, plus the optional
/// curtailment tie-breaker.
pub fn build_objective(case: &PowerCase, spec: &ModelSpec, vars: &ScucVariables) -> LinExpr {
    let mut obj = LinExpr::new();
    for t in 0..case.horizon {
        for (g, unit) in case.generators.iter().enumerate() {
            obj.push(vars.p.get(g, t), unit.cost_energy * case.mva_base);
            obj.push(vars.u.get(g, t), unit.cost_noload);
            obj.push(vars.v.get(g, t), unit.cost_startup);
        }
    }
    let m = spec.penalty;
    vars.alpha.iter().chain(vars.shed.iter()).for_each(|a| obj.push(a, m));
    for cv in &vars.contingencies {
        cv.alpha.iter().flatten().chain(cv.shed.iter()).for_each(|a| obj.push(a, m));
    }
    if spec.curtailment_epsilon > 0.0 {
        vars.r_curt.iter().for_each(|r| obj.push(r, spec.curtailment_epsilon));
    }
    obj.canonicalize();
    obj
}
