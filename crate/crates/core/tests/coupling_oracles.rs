use repwalk_core::coupling::{
    clt_diagnostic, domination_check, drift_limit, drift_ratio, normalized_endpoints,
    record_walk_trace, sigma, ConstantSchedule, CouplingSpec, IncrementSchedule,
};
use repwalk_core::{InitialHistory, RepulsionParams, RngStreamSpec};

#[test]
fn drift_ratio_approaches_minus_four_b_monotonically() {
    for b in [0.1, 0.25, 0.5] {
        let m = 10;
        let spec = CouplingSpec::lower(b, m).unwrap();
        let d = drift_limit(&spec);
        assert_eq!(d.limit, -4.0 * b);
        assert!(d.deviation() < 0.02, "b {b}: {}", d.ratio_at_horizon);
        assert!(d.confirmed());

        // independent running sums of the same closed form
        let (mut sp, mut spq, mut prev) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
        for n in 1..=1_000_000u64 {
            let p = if n <= m { 0.0 } else { 0.5 - (b / (n as f64).sqrt()).min(0.5) };
            sp += p;
            spq += p * (1.0 - p);
            if n > m {
                let r = (sp - n as f64 / 2.0) / spq.sqrt();
                assert!(r >= prev, "b {b}: not monotone at n = {n}");
                prev = r;
            }
        }
        assert!((prev - d.ratio_at_horizon).abs() < 1e-9);
    }
}

#[test]
fn sigma_doubles_over_quadrupled_horizon() {
    let spec = CouplingSpec::lower(0.25, 10).unwrap();
    for n in [20u64, 100, 1000, 10_000] {
        assert!(sigma(&spec, 2 * n) > sigma(&spec, n));
    }
    let _ = drift_ratio(&spec, 100);
}

#[test]
fn symmetric_walk_satisfies_the_clt() {
    let half = ConstantSchedule { p: 0.5, z0: 0 };
    let d = clt_diagnostic(&half, 10_000, 10_000, &RngStreamSpec::new(31, 0)).unwrap();
    assert!(d < 0.02, "{d}");
}

#[test]
fn mean_normalized_endpoint_near_minus_one() {
    let spec = CouplingSpec::lower(0.25, 10).unwrap();
    let z = normalized_endpoints(&spec, 20_000, 4000, &RngStreamSpec::new(32, 0));
    let mean = z.iter().sum::<f64>() / z.len() as f64;
    let exact = drift_ratio(&spec, 20_000);
    // standard error 1/sqrt(4000)
    assert!((mean - exact).abs() < 4.0 / (4000f64).sqrt(), "{mean} vs {exact}");
}

#[test]
fn domination_holds_with_fair_partner() {
    let spec = CouplingSpec::lower(0.25, 10).unwrap();
    let fair = RepulsionParams::new(0.0).unwrap();
    for r in 0..200 {
        let trace = record_walk_trace(&InitialHistory::default(), &fair, r as usize % 2, 2000, &RngStreamSpec::new(33, r));
        let out = domination_check(&trace, &spec).unwrap();
        assert!(out.event_b);
        assert!(out.dominated);
        // the comparison walk is pushed down during the first m + 1 steps
        assert!(trace.positions[11] >= spec.start() - 11);
    }
}

#[test]
fn domination_claim_under_repulsion() {
    let spec = CouplingSpec::lower(0.25, 10).unwrap();
    let p = RepulsionParams::new(1.0).unwrap();
    for r in 0..100 {
        let trace = record_walk_trace(&InitialHistory::default(), &p, 0, 5000, &RngStreamSpec::new(34, r));
        assert!(domination_check(&trace, &spec).unwrap().holds());
    }
}
