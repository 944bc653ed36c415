use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::case::fixtures;
use crate::milp::{Constraint, Sense, Var};

fn row<'a>(sm: &'a ScucModel, name: &str) -> &'a Constraint {
    sm.model
        .constraints()
        .iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no row {name}"))
}

fn assign(sm: &ScucModel, pairs: &[(Var, f64)]) -> Vec<f64> {
    let mut x = vec![0.0; sm.model.num_vars()];
    for &(v, value) in pairs {
        x[v.index()] = value;
    }
    x
}

fn base(case: &PowerCase) -> ScucModel {
    build_model(case, &ModelSpec::new(Variant::Base, 0.0)).unwrap()
}

#[test]
fn decommitted_unit_cannot_produce_or_hold_reserve() {
    let case = fixtures::two_bus(1.0, 2.0);
    let sm = base(&case);
    let (p, r) = (sm.vars.p.get(0, 0), sm.vars.reserve.get(0, 0));
    let x = assign(&sm, &[(p, 0.1)]);
    assert!(row(&sm, "pmax[1,0]").violation(&x) > 0.0);
    let x = assign(&sm, &[(r, 0.1)]);
    assert!(row(&sm, "pmax[1,0]").violation(&x) > 0.0);
    assert!(row(&sm, "rsp[1,0]").violation(&x) > 0.0);
    let x = assign(&sm, &[]);
    assert_eq!(row(&sm, "pmax[1,0]").violation(&x), 0.0);
    assert_eq!(row(&sm, "pmin[1,0]").violation(&x), 0.0);
}

#[test]
fn reserve_requirement_is_largest_rating() {
    let mut case = fixtures::two_bus(1.0, 2.0);
    case.generators[0].p_max = 4.0;
    case.generators[0].reserve_ramp = 4.0;
    let sm = base(&case);
    let r = row(&sm, "rsys[0]");
    assert_eq!((r.sense, r.rhs), (Sense::Ge, 4.0));
}

#[test]
fn startup_detection_and_cyclic_wrap() {
    let mut case = fixtures::two_bus(0.0, 2.0);
    case.horizon = 3;
    case.buses.iter_mut().for_each(|b| b.demand = vec![0.0; 3]);
    case.generators[0].min_dn = 2;
    let sm = base(&case);
    let u = |t| sm.vars.u.get(0, t);
    // u = (0, 1, 1): start-up at hour 1 must be flagged
    let x = assign(&sm, &[(u(1), 1.0), (u(2), 1.0)]);
    assert_eq!(row(&sm, "su[1,1]").violation(&x), 1.0);
    // u = (0, 0, 1) wraps into hour 0 as a shutdown, not a start-up
    let x = assign(&sm, &[(u(2), 1.0)]);
    assert_eq!(row(&sm, "su[1,0]").violation(&x), 0.0);
    let lhs = row(&sm, "su[1,0]").expr.eval(&x);
    assert_eq!(lhs, 1.0, "v - u0 + u2 with v = 0");
}

#[test]
fn min_up_window_rows() {
    let mut case = fixtures::two_bus(0.0, 2.0);
    case.horizon = 8;
    case.buses.iter_mut().for_each(|b| b.demand = vec![0.0; 8]);
    case.generators[0].min_up = 3;
    case.generators[0].min_dn = 2;
    let sm = base(&case);
    assert_eq!(sm.model.count_rows("mup"), 6);
    assert_eq!(sm.model.count_rows("mdn"), 6);
    let (u, v) = (|t| sm.vars.u.get(0, t), |t| sm.vars.v.get(0, t));
    // started at hour 5 and off again at hour 7 breaks the window ending at 7
    let x = assign(&sm, &[(v(5), 1.0), (u(5), 1.0), (u(6), 1.0)]);
    assert!(row(&sm, "mup[1,7]").violation(&x) > 0.0);
    let x = assign(&sm, &[(v(5), 1.0), (u(5), 1.0), (u(6), 1.0), (u(7), 1.0)]);
    assert_eq!(row(&sm, "mup[1,7]").violation(&x), 0.0);
}

#[test]
fn ramp_rows_respect_cyclic_flag() {
    let mut case = fixtures::two_bus(0.0, 2.0);
    case.horizon = 3;
    case.buses.iter_mut().for_each(|b| b.demand = vec![0.0; 3]);
    let cyclic = base(&case);
    assert_eq!(cyclic.model.count_rows("rup"), 3);
    let mut spec = ModelSpec::new(Variant::Base, 0.0);
    spec.cyclic_ramp = false;
    let open = build_model(&case, &spec).unwrap();
    assert_eq!(open.model.count_rows("rup"), 2);
    assert_eq!(open.model.count_rows("rdn"), 2);
}

#[test]
fn flow_definition_arithmetic() {
    let case = fixtures::two_bus(1.0, 2.0);
    let sm = base(&case);
    let (f, th2) = (sm.vars.flow.get(0, 0), sm.vars.theta.get(1, 0));
    let r = row(&sm, "dcpf[1,0]");
    // theta_1 pinned at 0, theta_2 = -0.05: x = 0.1 gives 0.5 p.u. from bus 1 to 2
    assert_eq!(r.violation(&assign(&sm, &[(f, 0.5), (th2, -0.05)])), 0.0);
    assert_eq!(r.violation(&assign(&sm, &[])), 0.0);
    assert!(r.violation(&assign(&sm, &[(f, 0.4), (th2, -0.05)])) > 1e-9);
    let th1 = sm.vars.theta.get(0, 0);
    assert_eq!((sm.model.var(th1).lower, sm.model.var(th1).upper), (0.0, 0.0));
}

#[test]
fn overloaded_line_needs_slack() {
    let case = fixtures::two_bus(1.5, 1.0);
    let sm = base(&case);
    let (p, u, f, th2, a) = (
        sm.vars.p.get(0, 0),
        sm.vars.u.get(0, 0),
        sm.vars.flow.get(0, 0),
        sm.vars.theta.get(1, 0),
        sm.vars.alpha.get(0, 0),
    );
    let x = assign(&sm, &[(u, 1.0), (p, 1.5), (f, 1.5), (th2, -0.15), (a, 0.5)]);
    for name in ["dcpf[1,0]", "thup[1,0]", "thdn[1,0]", "bal[1,0]", "bal[2,0]", "pmax[1,0]"] {
        assert_eq!(row(&sm, name).violation(&x), 0.0, "{name}");
    }
    let x = assign(&sm, &[(u, 1.0), (p, 1.5), (f, 1.5), (th2, -0.15), (a, 0.4)]);
    assert!((row(&sm, "thup[1,0]").violation(&x) - 0.1).abs() < 1e-12);
}

#[test]
fn contingency_variable_count_matches_closed_form() {
    let case = fixtures::ring_with_spur();
    let sm = base(&case);
    let (g, n, l, t) = (case.generators.len(), case.buses.len(), case.branches.len(), case.horizon);
    let k = sm.vars.contingencies.len();
    assert_eq!(k, 4);
    let per_outage_hour = g + n + l + (l - 1) + n;
    let base_vars = t * (4 * g + 2 * n + 2 * l);
    assert_eq!(sm.model.num_vars(), base_vars + k * t * per_outage_hour);
    assert_eq!(sm.model.count_vars("alphac"), k * t * (l - 1));
    assert_eq!(sm.model.count_rows("outc"), k * t);
    for cv in &sm.vars.contingencies {
        let th = cv.theta.get(0, 0);
        assert_eq!(sm.model.var(th).upper, 0.0);
    }
}

#[test]
fn objective_coefficients() {
    let case = fixtures::two_bus(1.0, 2.0);
    let sm = base(&case);
    let p = sm.vars.p.get(0, 0);
    let obj = sm.model.objective();
    assert_eq!(obj.eval(&assign(&sm, &[(p, 1.0)])), 2000.0);
    assert_eq!(obj.eval(&assign(&sm, &[])), 0.0);
    let a = sm.vars.alpha.get(0, 0);
    assert_eq!(obj.eval(&assign(&sm, &[(a, 1.0)])), 1.0e6);
}

#[test]
fn spec_checks() {
    let case = fixtures::two_bus(1.0, 2.0);
    let err = build_model(&case, &ModelSpec::new(Variant::Spatial, 1.5)).unwrap_err();
    assert_eq!(err, BuildError::Spec(SpecError::BetaOutOfRange(1.5)));
    let mut spec = ModelSpec::new(Variant::Base, 0.0);
    spec.penalty = 1000.0;
    assert!(matches!(build_model(&case, &spec), Err(BuildError::Spec(SpecError::PenaltyTooLow { .. }))));
    let mut spec = ModelSpec::new(Variant::Base, 0.0);
    spec.curtailment_epsilon = 100.0;
    assert!(matches!(build_model(&case, &spec), Err(BuildError::Spec(SpecError::EpsilonOutOfRange { .. }))));
    assert_eq!(
        build_model(&case, &ModelSpec::new(Variant::FixedDc, 0.0)).unwrap_err(),
        BuildError::Spec(SpecError::NoDataCenters(Variant::FixedDc))
    );
    for v in Variant::ALL {
        assert_eq!(v.as_str().parse::<Variant>().unwrap(), v);
    }
}

#[test]
fn builds_are_deterministic() {
    let case = fixtures::ring_with_spur();
    let a = base(&case);
    let b = base(&case);
    assert_eq!(a.model, b.model);
}
