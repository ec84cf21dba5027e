//! Integration of the mean-field ODE `dx/dt = -x + pi(x)`.
//!
//! Integration runs on the planar reduction `(x1_l, x2_l)`; each point is
//! lifted back to four coordinates with `x^i_r = 1 - x^i_l`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::field;
use crate::params::RepulsionParams;
use crate::stats::least_squares_slope;
use crate::walk::{psi, OccupationState, X1L, X2L};

pub const MAX_STEP: f64 = 0.01;
/// Final points of the `dt` and `dt / 2` runs must agree to this (L1).
pub const HALVING_TOLERANCE: f64 = 1e-8;
/// Distances at or below this are treated as rounding noise by the rate fit.
pub const DISTANCE_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory {
    pub times: Vec<f64>,
    pub points: Vec<OccupationState>,
    pub params: RepulsionParams,
    pub dt: f64,
    /// L1 gap at `t_max` between the `dt` and `dt / 2` runs.
    pub halving_discrepancy: f64,
}

impl FlowTrajectory {
    pub fn final_point(&self) -> OccupationState {
        *self.points.last().expect("trajectory holds the initial point")
    }
}

#[inline]
fn planar_field(y: [f64; 2], params: &RepulsionParams) -> [f64; 2] {
    let f = field(&OccupationState::from_planar(y[0], y[1]), params);
    [f.0[X1L], f.0[X2L]]
}

fn rk4_step(y: [f64; 2], h: f64, params: &RepulsionParams) -> [f64; 2] {
    let add = |a: [f64; 2], k: [f64; 2], s: f64| [a[0] + s * k[0], a[1] + s * k[1]];
    let k1 = planar_field(y, params);
    let k2 = planar_field(add(y, k1, 0.5 * h), params);
    let k3 = planar_field(add(y, k2, 0.5 * h), params);
    let k4 = planar_field(add(y, k3, h), params);
    core::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

fn run(y0: [f64; 2], steps: usize, h: f64, params: &RepulsionParams, mut visit: impl FnMut([f64; 2])) -> [f64; 2] {
    let mut y = y0;
    for _ in 0..steps {
        y = rk4_step(y, h, params);
        visit(y);
    }
    y
}

/// Classical RK4 from `x0` to `t_max`, certified by rerunning at half the step.
///
/// The step actually used is `t_max / ceil(t_max / dt)`, never larger than `dt`.
pub fn integrate(
    x0: &OccupationState,
    params: &RepulsionParams,
    t_max: f64,
    dt: f64,
) -> Result<FlowTrajectory> {
    if !(dt > 0.0 && dt <= MAX_STEP) {
        return Err(Error::Domain { what: "dt", value: dt });
    }
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::Domain { what: "t_max", value: t_max });
    }
    if !x0.is_in_domain(1e-9) {
        return Err(Error::Domain { what: "x0", value: x0.0[X1L] });
    }
    let steps = libm::ceil(t_max / dt - 1e-9) as usize;
    let h = t_max / steps as f64;
    let y0 = x0.planar();

    let mut times = Vec::with_capacity(steps + 1);
    let mut points = Vec::with_capacity(steps + 1);
    times.push(0.0);
    points.push(OccupationState::from_planar(y0[0], y0[1]));
    let mut k = 0usize;
    let coarse = run(y0, steps, h, params, |y| {
        k += 1;
        times.push(k as f64 * h);
        points.push(OccupationState::from_planar(y[0], y[1]));
    });
    let fine = run(y0, 2 * steps, 0.5 * h, params, |_| {});
    let discrepancy = 2.0 * ((coarse[0] - fine[0]).abs() + (coarse[1] - fine[1]).abs());
    if !(discrepancy <= HALVING_TOLERANCE) {
        return Err(Error::StepHalving {
            discrepancy,
            tolerance: HALVING_TOLERANCE,
        });
    }
    Ok(FlowTrajectory {
        times,
        points,
        params: *params,
        dt: h,
        halving_discrepancy: discrepancy,
    })
}

/// Faces of the domain visited by [`boundary_inward_check`]: one coordinate
/// pinned at 0 or 1, the partner walk's left proportion swept over `[0, 1]`.
pub fn boundary_points(samples: usize) -> impl Iterator<Item = OccupationState> {
    (0..samples).flat_map(move |k| {
        let y = if samples == 1 {
            0.5
        } else {
            k as f64 / (samples - 1) as f64
        };
        [
            OccupationState::from_planar(0.0, y),
            OccupationState::from_planar(1.0, y),
            OccupationState::from_planar(y, 0.0),
            OccupationState::from_planar(y, 1.0),
        ]
    })
}

/// True iff at every sampled face point the field points into the domain
/// with normal speed at least `1 / (1 + e^beta)`.
///
/// On the face `x^i_v = 0` the outward normal component of `F` is
/// `pi^i_v(z) = psi(2 z^j_v - 1)`, which is bounded below by `psi(1)`.
pub fn boundary_inward_check(params: &RepulsionParams, samples: usize) -> bool {
    let bound = psi(1.0, params).expect("1 is in the domain of psi");
    boundary_points(samples.max(1)).all(|z| {
        let f = field(&z, params);
        (0..4).all(|k| {
            if z.0[k] != 0.0 {
                return true;
            }
            let partner = k ^ 2;
            let expected = psi(2.0 * z.0[partner] - 1.0, params).expect("partner in [0, 1]");
            let speed = f.0[k];
            (speed - expected).abs() <= 8.0 * f64::EPSILON && expected >= bound && speed >= bound * (1.0 - 1e-12)
        })
    })
}

/// Empirical exponential rate `zeta` of attraction to the center: minus the
/// least-squares slope of `ln ||phi_t(x0) - x*||_1` over `t in [t_max/2, t_max]`.
pub fn attraction_rate(params: &RepulsionParams, x0: &OccupationState, t_max: f64) -> Result<f64> {
    if params.beta() >= 2.0 {
        return Err(Error::Supercritical {
            beta: params.beta(),
        });
    }
    let center = OccupationState::CENTER;
    let d0 = x0.l1_distance(&center);
    if d0 == 0.0 {
        return Err(Error::Domain { what: "distance of x0 to the center", value: d0 });
    }
    let traj = integrate(x0, params, t_max, MAX_STEP)?;
    let d_final = traj.final_point().l1_distance(&center);
    if !(d_final < d0) {
        return Err(Error::LeftNeighborhood { distance: d_final });
    }
    let mut ts = Vec::new();
    let mut logs = Vec::new();
    for (t, p) in traj.times.iter().zip(&traj.points) {
        if *t < 0.5 * t_max {
            continue;
        }
        let d = p.l1_distance(&center);
        if d <= DISTANCE_FLOOR {
            return Err(Error::PrecisionFloor { time: *t });
        }
        ts.push(*t);
        logs.push(libm::log(d));
    }
    Ok(-least_squares_slope(&ts, &logs)?)
}
