mod common;

use scuc::oracle::{certify, enumerate_parallel};
use scuc_core::oracle::{enumerate_optimum, OracleLimits, StartupMode};
use scuc_core::Variant;

#[test]
fn toy3_matches_enumeration_for_every_variant() {
    let case = common::case("toy3");
    let cfg = common::config("toy3");
    for variant in Variant::ALL {
        for beta in [0.0, 0.5] {
            let spec = cfg.model_spec(variant, beta);
            let oracle = enumerate_parallel(&case, &spec, OracleLimits::default(), StartupMode::Exhaustive, &common::highs()).unwrap();
            let (cell, solution) = common::solve(&case, &cfg, &common::highs(), variant, beta);
            let cert = certify(&oracle, &solution, 0.01);
            assert!(cert.pass, "{variant} beta={beta}: {cert:?}");
            assert!(cell.checks_pass(), "{variant} beta={beta}: {:?}", cell.check_failures());
        }
    }
}

#[test]
fn parallel_and_serial_enumeration_agree() {
    let case = common::case("toy3");
    let cfg = common::config("toy3");
    let spec = cfg.model_spec(Variant::Temporal, 0.5);
    let serial = enumerate_optimum(&case, &spec, OracleLimits::default(), StartupMode::Minimal, &common::highs()).unwrap();
    let parallel = enumerate_parallel(&case, &spec, OracleLimits::default(), StartupMode::Minimal, &common::highs()).unwrap();
    assert_eq!(serial.patterns_enumerated, parallel.patterns_enumerated);
    assert_eq!(serial.feasible_patterns(), parallel.feasible_patterns());
    let (a, b) = (serial.best_objective.unwrap(), parallel.best_objective.unwrap());
    assert!((a - b).abs() <= 1e-7 * a.abs().max(1.0));
}

#[test]
fn oracle_refuses_large_instances() {
    let case = common::case("rts24_dc");
    let spec = common::config("rts24_dc").model_spec(Variant::FixedDc, 0.0);
    assert!(enumerate_parallel(&case, &spec, OracleLimits::default(), StartupMode::Minimal, &common::highs()).is_err());
}
