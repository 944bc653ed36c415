mod common;

use proptest::prelude::*;
use scuc_core::dcflex::{verify_energy_accounting, FlexQuota};
use scuc_core::{build_model, Variant};

fn solve_obj(case: &str, variant: Variant, beta: f64) -> (f64, f64) {
    let c = common::case(case);
    let cfg = common::config(case);
    let (cell, sol) = common::solve(&c, &cfg, &common::highs(), variant, beta);
    assert!(cell.checks_pass(), "{case} {variant} beta={beta}: {:?}", cell.check_failures());
    (cell.row.objective, sol.mip_gap)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn joint_flexibility_is_never_worse(beta in 0.0f64..0.8, toy in prop::sample::select(vec!["toy3", "toy6"])) {
        let (st, g_st) = solve_obj(toy, Variant::SpatioTemporal, beta);
        let (s, g_s) = solve_obj(toy, Variant::Spatial, beta);
        let (t, g_t) = solve_obj(toy, Variant::Temporal, beta);
        let (fixed, g_f) = solve_obj(toy, Variant::FixedDc, 0.0);
        prop_assert!(common::le_within_gaps(st, g_st, s, g_s), "DC-ST {st} > DC-S {s}");
        prop_assert!(common::le_within_gaps(st, g_st, t, g_t), "DC-ST {st} > DC-T {t}");
        prop_assert!(common::le_within_gaps(s, g_s, fixed, g_f), "DC-S {s} > FixedDC {fixed}");
        prop_assert!(common::le_within_gaps(t, g_t, fixed, g_f), "DC-T {t} > FixedDC {fixed}");
    }

    #[test]
    fn more_flexibility_never_costs_more(a in 0.0f64..0.8, b in 0.0f64..0.8, v in prop::sample::select(Variant::FLEXIBLE.to_vec())) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let (o_lo, g_lo) = solve_obj("toy3", v, lo);
        let (o_hi, g_hi) = solve_obj("toy3", v, hi);
        prop_assert!(common::le_within_gaps(o_hi, g_hi, o_lo, g_lo), "{v}: beta {hi} gives {o_hi} > {o_lo} at {lo}");
    }

    #[test]
    fn shifted_load_keeps_its_energy(beta in 0.0f64..1.0, v in prop::sample::select(Variant::FLEXIBLE.to_vec())) {
        let case = common::case("toy6");
        let cfg = common::config("toy6");
        let (_, sol) = common::solve(&case, &cfg, &common::highs(), v, beta);
        let sm = build_model(&case, &cfg.model_spec(v, beta)).unwrap();
        let acc = verify_energy_accounting(&case, &sm, &sol);
        prop_assert!(acc.energy_residual() <= 1e-6, "{v} beta={beta}: {acc:?}");
    }

    #[test]
    fn quota_split_is_exact(beta in 0.0f64..=1.0) {
        let case = common::case("rts24_dc");
        let q = FlexQuota::new(&case, beta);
        for (d, site) in case.dc_sites.iter().enumerate() {
            for t in 0..case.horizon {
                prop_assert_eq!(q.fixed.get(d, t) + q.quota.get(d, t), site.workload[t]);
                prop_assert!(q.quota.get(d, t) >= 0.0 && q.fixed.get(d, t) >= 0.0);
            }
        }
    }
}
