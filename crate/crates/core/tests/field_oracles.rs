//! Analytic field quantities against independent numerical oracles.

use repwalk_core::field::{
    divergence, excitation_bound_check, field, h, jacobian, numeric_spectrum, spectrum,
    spectrum_at_asymmetric, spectrum_at_center, Jacobian, Stability,
};
use repwalk_core::rng::UniformStream;
use repwalk_core::walk::{pi_map, X1L, X2L};
use repwalk_core::{equilibria, OccupationState, RepulsionParams, RngStreamSpec, TangentVector};

const BETAS: [f64; 6] = [0.0, 0.5, 1.0, 2.0, 3.0, 8.0];

fn beta(b: f64) -> RepulsionParams {
    RepulsionParams::new(b).unwrap()
}

fn interior_point(u: &mut UniformStream) -> OccupationState {
    let a = 0.01 + 0.98 * u.next_open01();
    let b = 0.01 + 0.98 * u.next_open01();
    OccupationState::from_planar(a, b)
}

/// Central differences of F, perturbing each of the four coordinates freely.
fn fd_jacobian(x: &OccupationState, p: &RepulsionParams) -> Jacobian {
    // F evaluated straight from the exponential-ratio formula, independent of `field`
    let f = |y: [f64; 4]| -> [f64; 4] {
        let b = p.beta();
        let ratio = |v: f64, o: f64| (-b * v).exp() / ((-b * v).exp() + (-b * o).exp());
        [
            -y[0] + ratio(y[2], y[3]),
            -y[1] + ratio(y[3], y[2]),
            -y[2] + ratio(y[0], y[1]),
            -y[3] + ratio(y[1], y[0]),
        ]
    };
    let step = 1e-6;
    let mut j = [[0.0; 4]; 4];
    for s in 0..4 {
        let mut plus = x.0;
        let mut minus = x.0;
        plus[s] += step;
        minus[s] -= step;
        let (fp, fm) = (f(plus), f(minus));
        for k in 0..4 {
            j[k][s] = (fp[k] - fm[k]) / (2.0 * step);
        }
    }
    j
}

#[test]
fn jacobian_matches_finite_differences() {
    let mut u = RngStreamSpec::new(11, 0).open();
    for b in BETAS {
        let p = beta(b);
        for _ in 0..1000 {
            let x = interior_point(&mut u);
            let (a, n) = (jacobian(&x, &p), fd_jacobian(&x, &p));
            for k in 0..4 {
                for s in 0..4 {
                    assert!((a[k][s] - n[k][s]).abs() <= 1e-6, "beta {b} x {x:?} ({k},{s})");
                }
            }
        }
    }
}

#[test]
fn field_stays_tangent() {
    let mut u = RngStreamSpec::new(12, 0).open();
    for b in BETAS {
        for _ in 0..1000 {
            let f = field(&interior_point(&mut u), &beta(b));
            assert!((f.0[0] + f.0[1]).abs() <= 1e-14);
            assert!((f.0[2] + f.0[3]).abs() <= 1e-14);
        }
    }
}

#[test]
fn spectra_match_dense_solver() {
    for b in BETAS {
        let p = beta(b);
        let center = numeric_spectrum(&jacobian(&OccupationState::CENTER, &p)).unwrap();
        assert!(center.max_deviation(&spectrum_at_center(&p)) <= 1e-9, "center beta {b}");
    }
    for b in [2.5, 3.0, 4.0, 8.0] {
        let p = beta(b);
        let report = equilibria::solve_equilibria(&p);
        let w = report.equilibria[1].w;
        let closed = spectrum_at_asymmetric(w, &p).unwrap();
        for eq in &report.equilibria[1..] {
            let num = numeric_spectrum(&jacobian(&eq.point, &p)).unwrap();
            assert!(num.max_deviation(&closed) <= 1e-9, "beta {b}");
            assert_eq!(num.stability, Stability::LinearlyStable);
        }
        assert!(-1.0 + 2.0 * h(w, &p) < 0.0);
    }
    // the general closed form at arbitrary points
    let mut u = RngStreamSpec::new(13, 0).open();
    for b in BETAS {
        for _ in 0..200 {
            let x = interior_point(&mut u);
            let num = numeric_spectrum(&jacobian(&x, &beta(b))).expect("Schur converges");
            assert!(num.max_deviation(&spectrum(&x, &beta(b))) <= 1e-9);
        }
    }
}

#[test]
fn divergence_by_finite_differences() {
    let mut u = RngStreamSpec::new(14, 0).open();
    for b in BETAS {
        let p = beta(b);
        for _ in 0..1000 {
            let x = interior_point(&mut u);
            assert_eq!(divergence(&x, &p), -2.0);
            let [a, c] = x.planar();
            let e = 1e-6;
            let f = |a: f64, c: f64| field(&OccupationState::from_planar(a, c), &p).0;
            let d1 = (f(a + e, c)[X1L] - f(a - e, c)[X1L]) / (2.0 * e);
            let d2 = (f(a, c + e)[X2L] - f(a, c - e)[X2L]) / (2.0 * e);
            assert!((d1 + d2 + 2.0).abs() <= 1e-6);
        }
    }
}

fn random_unit_tangent(u: &mut UniformStream) -> TangentVector {
    let a = u.next_open01() - 0.5;
    let rest = 0.5 - a.abs();
    let b = if u.next_open01() < 0.5 { rest } else { -rest };
    TangentVector([a, -a, b, -b])
}

/// Brute-force `E[<theta, U>^+]` from the four outcome vectors, written out.
fn enumerated_q(x: &OccupationState, theta: &TangentVector, p: &RepulsionParams) -> f64 {
    let pi = pi_map(x, p);
    let outcomes = [
        ([1.0, 0.0, 1.0, 0.0], pi.0[0] * pi.0[2]),
        ([1.0, 0.0, 0.0, 1.0], pi.0[0] * pi.0[3]),
        ([0.0, 1.0, 1.0, 0.0], pi.0[1] * pi.0[2]),
        ([0.0, 1.0, 0.0, 1.0], pi.0[1] * pi.0[3]),
    ];
    outcomes
        .iter()
        .map(|(xi, prob)| {
            let dot: f64 = (0..4).map(|k| theta.0[k] * (xi[k] - pi.0[k])).sum();
            prob * dot.max(0.0)
        })
        .sum()
}

#[test]
fn excitation_bound_on_grid() {
    let mut u = RngStreamSpec::new(15, 0).open();
    let thetas: Vec<TangentVector> = (0..1000).map(|_| random_unit_tangent(&mut u)).collect();
    for b in [2.5, 3.0, 4.0, 8.0] {
        let p = beta(b);
        for i in 0..20 {
            for j in 0..20 {
                let x = OccupationState::from_planar((i as f64 + 0.5) / 20.0, (j as f64 + 0.5) / 20.0);
                for theta in &thetas {
                    let c = excitation_bound_check(&x, theta, &p).unwrap();
                    assert!(c.ok, "beta {b} x {x:?} theta {theta:?}: q {} < s {}", c.q, c.s);
                    assert!((c.q - enumerated_q(&x, theta, &p)).abs() < 1e-15);
                }
            }
        }
    }
}
