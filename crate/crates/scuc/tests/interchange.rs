mod common;

use scuc::mps::{read_mps_file, write_mps, write_mps_file};
use scuc_core::{build_model, ModelSpec, SolveOptions, Solver, Variant};

fn mps_bytes(case: &str, variant: Variant, beta: f64) -> Vec<u8> {
    let sm = build_model(&common::case(case), &ModelSpec::new(variant, beta)).unwrap();
    let mut out = Vec::new();
    write_mps(&sm.model, &mut out).unwrap();
    out
}

#[test]
fn repeated_builds_write_identical_mps() {
    for case in ["toy3", "toy6", "rts24_dc"] {
        for variant in Variant::ALL {
            let a = mps_bytes(case, variant, 0.3);
            let b = mps_bytes(case, variant, 0.3);
            assert!(a == b, "{case} {variant}: MPS differs between builds");
            assert!(!a.is_empty());
        }
    }
}

#[test]
fn written_model_reads_back_equal() {
    let dir = tempfile::tempdir().unwrap();
    for variant in Variant::ALL {
        let sm = build_model(&common::case("toy6"), &ModelSpec::new(variant, 0.2)).unwrap();
        let path = dir.path().join(format!("{variant}.mps"));
        write_mps_file(&sm.model, &path).unwrap();
        let back = read_mps_file(&path).unwrap();
        assert_eq!(back.num_vars(), sm.model.num_vars());
        assert_eq!(back.num_constraints(), sm.model.num_constraints());
        assert_eq!(back.num_binaries(), sm.model.num_binaries());
        for (a, b) in back.vars().iter().zip(sm.model.vars()) {
            assert_eq!(a.name, b.name);
            assert_eq!((a.lower, a.upper, a.kind), (b.lower, b.upper, b.kind));
        }
        for (a, b) in back.constraints().iter().zip(sm.model.constraints()) {
            assert_eq!(a.name, b.name);
            assert_eq!(a.sense, b.sense);
            assert!((a.rhs - b.rhs).abs() <= 1e-12 * b.rhs.abs().max(1.0));
        }
    }
}

#[test]
fn exported_model_solves_to_the_same_objective() {
    let dir = tempfile::tempdir().unwrap();
    let options = SolveOptions {
        mip_gap: 1e-6,
        threads: Some(1),
        ..SolveOptions::default()
    };
    let sm = build_model(&common::case("toy6"), &ModelSpec::new(Variant::SpatioTemporal, 0.3)).unwrap();
    let path = dir.path().join("m.mps");
    write_mps_file(&sm.model, &path).unwrap();
    let back = read_mps_file(&path).unwrap();
    let direct = common::highs().solve(&sm.model, &options).unwrap();
    let via_file = common::highs().solve(&back, &options).unwrap();
    let rel = (direct.objective - via_file.objective).abs() / direct.objective.abs().max(1.0);
    assert!(rel < 1e-6, "direct {} vs re-read {}", direct.objective, via_file.objective);
}

#[test]
fn highs_and_cbc_agree_on_toy6() {
    let Some(cbc) = common::cbc() else {
        eprintln!("cbc not found; skipping");
        return;
    };
    let case = common::case("toy6");
    let mut cfg = common::config("toy6");
    cfg.screening = false;
    for variant in Variant::ALL {
        let (h, hs) = common::solve(&case, &cfg, &common::highs(), variant, 0.3);
        let (c, cs) = common::solve(&case, &cfg, &cbc, variant, 0.3);
        assert!(
            common::le_within_gaps(h.row.objective, hs.mip_gap, c.row.objective, cs.mip_gap)
                && common::le_within_gaps(c.row.objective, cs.mip_gap, h.row.objective, hs.mip_gap),
            "{variant}: highs {} cbc {}",
            h.row.objective,
            c.row.objective
        );
        assert!(c.checks_pass(), "{variant} cbc: {:?}", c.check_failures());
    }
}
