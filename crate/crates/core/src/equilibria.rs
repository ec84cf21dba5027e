//! Equilibria of the mean field and their classification.
//!
//! Every zero of `F` has the form `(w, 1-w, 1-w, w)` with `w = g(1 - w)`.
//! The center `w = 1/2` always qualifies; above `beta = 2` a second root
//! appears in `(0, 1/2)` and, by symmetry, a third at its mirror image.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{field, spectrum_at_asymmetric, spectrum_at_center, SpectrumReport};
use crate::params::RepulsionParams;
use crate::walk::{logistic, OccupationState};

/// Gap kept below `1/2` so the center root is never bracketed twice.
pub const ENDPOINT_GUARD: f64 = 1e-9;
pub const BISECTION_ITERATIONS: usize = 64;

/// `g(w) = 1 / (1 + exp(2 beta w - beta))`.
pub fn g(w: f64, params: &RepulsionParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&w) {
        return Err(Error::Domain { what: "w", value: w });
    }
    Ok(logistic(params.beta(), 2.0 * w - 1.0))
}

/// `g(1 - w) - w`; its zeros in `[0, 1/2]` are the equilibria.
pub fn fixed_point_residual(w: f64, params: &RepulsionParams) -> f64 {
    logistic(params.beta(), 1.0 - 2.0 * w) - w
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Equilibrium {
    pub point: OccupationState,
    pub w: f64,
    pub spectrum: SpectrumReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    pub beta: f64,
    /// Center first, then `(w, 1-w, 1-w, w)`, then its swap.
    pub equilibria: Vec<Equilibrium>,
    /// Set at `beta = 2`, where the center has a zero eigenvalue.
    pub non_hyperbolic: bool,
}

impl EquilibriumReport {
    pub fn count(&self) -> usize {
        self.equilibria.len()
    }

    pub fn center(&self) -> &Equilibrium {
        &self.equilibria[0]
    }

    /// Index and L1 distance of the equilibrium closest to `x`.
    pub fn nearest(&self, x: &OccupationState) -> (usize, f64) {
        self.equilibria
            .iter()
            .enumerate()
            .map(|(i, e)| (i, e.point.l1_distance(x)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("report always holds the center")
    }
}

/// Root of `g(1 - w) = w` in `(0, 1/2)` by fixed-length bisection, if bracketed.
pub fn asymmetric_root(params: &RepulsionParams) -> Option<f64> {
    let mut lo = 0.0;
    let mut hi = 0.5 - ENDPOINT_GUARD;
    let h_lo = fixed_point_residual(lo, params);
    let h_hi = fixed_point_residual(hi, params);
    if !(h_lo > 0.0 && h_hi < 0.0) {
        return None;
    }
    for _ in 0..BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if fixed_point_residual(mid, params) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (r_lo, r_hi) = (
        fixed_point_residual(lo, params).abs(),
        fixed_point_residual(hi, params).abs(),
    );
    Some(if r_lo <= r_hi { lo } else { hi })
}

pub fn solve_equilibria(params: &RepulsionParams) -> EquilibriumReport {
    let center = Equilibrium {
        point: OccupationState::CENTER,
        w: 0.5,
        spectrum: spectrum_at_center(params),
    };
    let mut equilibria = alloc::vec![center];
    if params.is_supercritical() {
        if let Some(w) = asymmetric_root(params) {
            let spectrum = spectrum_at_asymmetric(w, params)
                .expect("supercritical beta and w in (0, 1/2)");
            let point = OccupationState::symmetric_pair(w);
            equilibria.push(Equilibrium { point, w, spectrum });
            equilibria.push(Equilibrium {
                point: point.swap_walks(),
                w: 1.0 - w,
                spectrum,
            });
        }
    }
    EquilibriumReport {
        beta: params.beta(),
        equilibria,
        non_hyperbolic: params.is_critical(),
    }
}

/// `w* = (beta - arcosh(beta - 1)) / (2 beta)`: where `-1 + 2 h(w, beta)` changes sign.
pub fn critical_w(params: &RepulsionParams) -> Result<f64> {
    let b = params.beta();
    if !params.is_supercritical() {
        return Err(Error::Subcritical { beta: b });
    }
    Ok((b - libm::acosh(b - 1.0)) / (2.0 * b))
}

/// `||F(p)||_1` at a candidate equilibrium.
pub fn residual(point: &OccupationState, params: &RepulsionParams) -> f64 {
    field(point, params).l1_norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Stability;

    fn beta(b: f64) -> RepulsionParams {
        RepulsionParams::new(b).unwrap()
    }

    // Reference roots of w = 1/(1+exp(beta(1-2w))) from 30-digit arithmetic.
    const W_BETA_3: f64 = 0.0707201816799448189267547408349;
    const W_BETA_4: f64 = 0.0212479879613656296617492347488;

    #[test]
    fn g_values() {
        for b in [0.0, 1.0, 3.0, 10.0] {
            assert_eq!(g(0.5, &beta(b)).unwrap(), 0.5);
        }
        for w in [0.0, 0.3, 1.0] {
            assert_eq!(g(w, &beta(0.0)).unwrap(), 0.5);
        }
        assert!((g(0.3, &beta(3.0)).unwrap() - 0.768524783499017642930912652463).abs() < 1e-15);
        assert!(g(1.2, &beta(1.0)).is_err());
    }

    #[test]
    fn g_mirror_and_monotone() {
        let p = beta(2.5);
        let mut prev = f64::INFINITY;
        for k in 0..=100 {
            let w = k as f64 / 100.0;
            let gw = g(w, &p).unwrap();
            assert!((g(1.0 - w, &p).unwrap() - (1.0 - gw)).abs() < 1e-15);
            assert!(gw < prev);
            prev = gw;
        }
    }

    #[test]
    fn single_equilibrium_below_two() {
        let r = solve_equilibria(&beta(1.0));
        assert_eq!(r.count(), 1);
        assert_eq!(r.center().point, OccupationState::CENTER);
        assert_eq!(r.center().spectrum.stability, Stability::LinearlyStable);
        assert!(!r.non_hyperbolic);
    }

    #[test]
    fn three_equilibria_above_two() {
        let p = beta(3.0);
        let r = solve_equilibria(&p);
        assert_eq!(r.count(), 3);
        assert!((r.equilibria[1].w - W_BETA_3).abs() < 1e-12);
        assert_eq!(r.equilibria[2].point, r.equilibria[1].point.swap_walks());
        for e in &r.equilibria {
            assert!(residual(&e.point, &p) < 1e-10);
        }
        assert_eq!(r.center().spectrum.stability, Stability::LinearlyUnstable);
        assert_eq!(r.equilibria[1].spectrum.stability, Stability::LinearlyStable);
        let w4 = solve_equilibria(&beta(4.0)).equilibria[1].w;
        assert!((w4 - W_BETA_4).abs() < 1e-12);
    }

    #[test]
    fn beta_two_is_flagged() {
        let r = solve_equilibria(&beta(2.0));
        assert_eq!(r.count(), 1);
        assert!(r.non_hyperbolic);
        assert_eq!(r.center().spectrum.stability, Stability::NonHyperbolic);
    }

    #[test]
    fn critical_w_values() {
        // (3 - ln(2 + sqrt 3)) / 6
        let ws = critical_w(&beta(3.0)).unwrap();
        assert!((ws - 0.280507017179197215229158942115).abs() < 1e-15);
        assert!(W_BETA_3 < ws);
        assert!((critical_w(&beta(2.0 + 1e-10)).unwrap() - 0.5).abs() < 1e-4);
        assert!(critical_w(&beta(2.0)).is_err());
        assert!(critical_w(&beta(1.0)).is_err());
    }

    #[test]
    fn nearest_classification() {
        let r = solve_equilibria(&beta(4.0));
        let x = OccupationState([0.03, 0.97, 0.96, 0.04]);
        assert_eq!(r.nearest(&x).0, 1);
        assert_eq!(r.nearest(&x.swap_walks()).0, 2);
        assert_eq!(r.nearest(&OccupationState([0.5, 0.5, 0.48, 0.52])).0, 0);
    }
}
