//! The independent-increment comparison walk `Z_n` and its coupling with a
//! repelling walk through a shared uniform stream.
//!
//! `Z_{n+1} = Z_n + 1` iff `u_n < p_n`, the same strict convention the
//! repelling walks use, so one uniform sequence drives both and
//! `S_n >= Z_n` can be checked path by path.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::params::RepulsionParams;
use crate::replicate;
use crate::rng::{RngStreamSpec, UniformStream};
use crate::stats::{ks_distance, normal_cdf};
use crate::walk::{InitialHistory, WalkPairState};

/// Probability `p_n` that the step from `n` to `n + 1` goes up.
pub trait IncrementSchedule: Sync {
    fn p(&self, n: u64) -> f64;
    /// `Z_0`.
    fn start(&self) -> i64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    /// `p_n = 0` up to `m`, then `1/2 - min(1/2, b / sqrt n)`.
    Lower,
    /// `p_n = 1` up to `m`, then `1/2 + min(1/2, b / sqrt n)`.
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSpec {
    b: f64,
    m: u64,
    z0: i64,
    direction: Direction,
}

impl CouplingSpec {
    pub fn new(b: f64, m: u64, z0: i64, direction: Direction) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::Domain { what: "b", value: b });
        }
        Ok(Self { b, m, z0, direction })
    }

    pub fn lower(b: f64, m: u64) -> Result<Self> {
        Self::new(b, m, 0, Direction::Lower)
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn with_start(self, z0: i64) -> Self {
        Self { z0, ..self }
    }
}

impl IncrementSchedule for CouplingSpec {
    fn p(&self, n: u64) -> f64 {
        let offset = if n <= self.m {
            0.5
        } else {
            (self.b / libm::sqrt(n as f64)).min(0.5)
        };
        match self.direction {
            Direction::Lower => 0.5 - offset,
            Direction::Upper => 0.5 + offset,
        }
    }

    fn start(&self) -> i64 {
        self.z0
    }
}

/// Homogeneous schedule, e.g. `p = 1/2` for the simple symmetric walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantSchedule {
    pub p: f64,
    pub z0: i64,
}

impl IncrementSchedule for ConstantSchedule {
    fn p(&self, _n: u64) -> f64 {
        self.p
    }

    fn start(&self) -> i64 {
        self.z0
    }
}

pub fn p_schedule(schedule: &impl IncrementSchedule, n: u64) -> f64 {
    schedule.p(n)
}

/// `sigma_n = 2 (sum_{k=1}^n p_k (1 - p_k))^{1/2}`.
pub fn sigma(schedule: &impl IncrementSchedule, n: u64) -> f64 {
    let s: f64 = (1..=n).map(|k| {
        let p = schedule.p(k);
        p * (1.0 - p)
    }).sum();
    2.0 * libm::sqrt(s)
}

/// `E[Z_n] / sigma_n` in the closed form `(Z_0/2 + sum p_k - n/2) / (sum p_k (1 - p_k))^{1/2}`.
pub fn drift_ratio(schedule: &impl IncrementSchedule, n: u64) -> f64 {
    let (mut sp, mut spq) = (0.0, 0.0);
    for k in 1..=n {
        let p = schedule.p(k);
        sp += p;
        spq += p * (1.0 - p);
    }
    (schedule.start() as f64 / 2.0 + sp - n as f64 / 2.0) / libm::sqrt(spq)
}

/// Tabulated `p_n`, `sigma_n` and `E[Z_n]` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleMoments {
    pub p: Vec<f64>,
    pub sigma: Vec<f64>,
    /// Exact mean under the sampling convention: `Z_0 + sum_{k<n} (2 p_k - 1)`.
    pub mean: Vec<f64>,
}

impl ScheduleMoments {
    pub fn new(schedule: &impl IncrementSchedule, n_max: u64) -> Self {
        let len = n_max as usize + 1;
        let p: Vec<f64> = (0..=n_max).map(|n| schedule.p(n)).collect();
        let mut sigma = Vec::with_capacity(len);
        let mut mean = Vec::with_capacity(len);
        let (mut var, mut m) = (0.0, schedule.start() as f64);
        sigma.push(0.0);
        mean.push(m);
        for n in 1..len {
            var += p[n] * (1.0 - p[n]);
            m += 2.0 * p[n - 1] - 1.0;
            sigma.push(2.0 * libm::sqrt(var));
            mean.push(m);
        }
        Self { p, sigma, mean }
    }

    pub fn horizon(&self) -> u64 {
        (self.p.len() - 1) as u64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingPath {
    /// `Z_0, ..., Z_{n_max}`.
    pub steps: Vec<i64>,
    /// `sigma_0, ..., sigma_{n_max}`.
    pub sigmas: Vec<f64>,
    /// `p_0, ..., p_{n_max - 1}`.
    pub p_schedule: Vec<f64>,
}

/// `Z` driven by the given uniforms: `u_n < p_n` moves up.
pub fn path_from_uniforms(schedule: &impl IncrementSchedule, uniforms: &[f64]) -> Vec<i64> {
    let mut z = schedule.start();
    let mut out = Vec::with_capacity(uniforms.len() + 1);
    out.push(z);
    for (n, &u) in uniforms.iter().enumerate() {
        z += if u < schedule.p(n as u64) { 1 } else { -1 };
        out.push(z);
    }
    out
}

pub fn sample_path(schedule: &impl IncrementSchedule, n_max: u64, rng: &RngStreamSpec) -> CouplingPath {
    let moments = ScheduleMoments::new(schedule, n_max);
    let mut stream = rng.open();
    let uniforms: Vec<f64> = (0..n_max).map(|_| stream.next_open01()).collect();
    let steps = path_from_uniforms(schedule, &uniforms);
    let mut p_schedule = moments.p;
    p_schedule.pop();
    CouplingPath {
        steps,
        sigmas: moments.sigma,
        p_schedule,
    }
}

fn endpoint(moments: &ScheduleMoments, z0: i64, n: u64, stream: &mut UniformStream) -> i64 {
    let mut z = z0;
    for &p in &moments.p[..n as usize] {
        z += if stream.next_open01() < p { 1 } else { -1 };
    }
    z
}

/// `Z_n / sigma_n` for `replicas` independent paths on streams
/// `rng.stream_id, rng.stream_id + 1, ...`.
pub fn normalized_endpoints(
    schedule: &impl IncrementSchedule,
    n: u64,
    replicas: u64,
    rng: &RngStreamSpec,
) -> Vec<f64> {
    let moments = ScheduleMoments::new(schedule, n);
    let sigma = moments.sigma[n as usize];
    let z0 = schedule.start();
    replicate(replicas, |r| {
        let mut stream = rng.offset(r).open();
        endpoint(&moments, z0, n, &mut stream) as f64 / sigma
    })
}

/// Kolmogorov-Smirnov distance between `(Z_n - E[Z_n]) / sigma_n` over
/// `replicas` paths and the standard normal law.
pub fn clt_diagnostic(
    schedule: &impl IncrementSchedule,
    n: u64,
    replicas: u64,
    rng: &RngStreamSpec,
) -> Result<f64> {
    const MIN_REPLICAS: u64 = 1000;
    if replicas < MIN_REPLICAS {
        return Err(Error::TooFewSamples {
            got: replicas as usize,
            need: MIN_REPLICAS as usize,
        });
    }
    let moments = ScheduleMoments::new(schedule, n);
    let (mean, sigma) = (moments.mean[n as usize], moments.sigma[n as usize]);
    if sigma <= 0.0 {
        return Err(Error::Domain { what: "sigma_n", value: sigma });
    }
    let z0 = schedule.start();
    let normalized = replicate(replicas, |r| {
        let mut stream = rng.offset(r).open();
        (endpoint(&moments, z0, n, &mut stream) as f64 - mean) / sigma
    });
    Ok(ks_distance(&normalized, normal_cdf))
}

/// `sup_{n <= n_max, sigma_n > 0} Z_n / sigma_n` along one path.
pub fn running_max_ratio(moments: &ScheduleMoments, z0: i64, rng: &RngStreamSpec) -> f64 {
    let mut stream = rng.open();
    let mut z = z0;
    let mut best = f64::NEG_INFINITY;
    for (n, &p) in moments.p[..moments.horizon() as usize].iter().enumerate() {
        z += if stream.next_open01() < p { 1 } else { -1 };
        let s = moments.sigma[n + 1];
        if s > 0.0 {
            best = best.max(z as f64 / s);
        }
    }
    best
}

/// Fraction of paths whose running max of `Z_n / sigma_n` reaches `c` by `n_max`.
pub fn excursion_fraction(
    schedule: &impl IncrementSchedule,
    n_max: u64,
    c: f64,
    replicas: u64,
    rng: &RngStreamSpec,
) -> f64 {
    let moments = ScheduleMoments::new(schedule, n_max);
    let z0 = schedule.start();
    let hits = replicate(replicas, |r| running_max_ratio(&moments, z0, &rng.offset(r)) >= c);
    hits.iter().filter(|&&h| h).count() as f64 / replicas as f64
}

/// The `n -> infinity` limit `-+4b` of `E[Z_n] / sigma_n` next to its value at a finite horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftLimit {
    pub limit: f64,
    pub horizon: u64,
    pub ratio_at_horizon: f64,
}

impl DriftLimit {
    pub const DEFAULT_HORIZON: u64 = 1_000_000;
    pub const DEFAULT_TOLERANCE: f64 = 0.02;

    pub fn deviation(&self) -> f64 {
        (self.ratio_at_horizon - self.limit).abs()
    }

    pub fn confirmed(&self) -> bool {
        self.deviation() <= Self::DEFAULT_TOLERANCE
    }
}

pub fn drift_limit(spec: &CouplingSpec) -> DriftLimit {
    drift_limit_at(spec, DriftLimit::DEFAULT_HORIZON)
}

pub fn drift_limit_at(spec: &CouplingSpec, horizon: u64) -> DriftLimit {
    let limit = match spec.direction() {
        Direction::Lower => -4.0 * spec.b(),
        Direction::Upper => 4.0 * spec.b(),
    };
    DriftLimit {
        limit,
        horizon,
        ratio_at_horizon: drift_ratio(spec, horizon),
    }
}

/// One walk of a repelling pair recorded with the uniforms that drove it.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkTrace {
    /// Length of the prescribed prefix.
    pub n0: u64,
    /// `S_0, ..., S_N`.
    pub positions: Vec<i64>,
    /// `u_0, ..., u_{N-1}`; entries before `n0` drive nothing on the walk side.
    pub uniforms: Vec<f64>,
    /// `P_n = pi^i_r(X(n))` for `n >= n0`, `NaN` inside the prefix.
    pub probabilities: Vec<f64>,
}

/// Runs a repelling pair for `steps` steps after the prefix and records walk `walk`.
///
/// Inside the prefix the recorded path takes its left steps first.
pub fn record_walk_trace(
    history: &InitialHistory,
    params: &RepulsionParams,
    walk: usize,
    steps: u64,
    rng: &RngStreamSpec,
) -> WalkTrace {
    let n0 = history.len();
    let counts = history.counts();
    let total = (n0 + steps) as usize;
    let mut stream = rng.open();
    let mut positions = Vec::with_capacity(total + 1);
    let mut uniforms = Vec::with_capacity(total);
    let mut probabilities = Vec::with_capacity(total);

    let mut s = history.start()[walk];
    positions.push(s);
    for k in 0..n0 {
        s += if k < counts.left[walk] { -1 } else { 1 };
        positions.push(s);
        uniforms.push(stream.next_pair()[walk]);
        probabilities.push(f64::NAN);
    }
    let mut state = WalkPairState::new(history);
    for _ in 0..steps {
        let draws = stream.next_pair();
        let p = state.advance(params, draws);
        positions.push(state.positions()[walk]);
        uniforms.push(draws[walk]);
        probabilities.push(p[walk]);
    }
    WalkTrace {
        n0,
        positions,
        uniforms,
        probabilities,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DominationOutcome {
    /// Event B: `p_n <= P_n` for every recorded `n > m`.
    pub event_b: bool,
    /// `S_n >= Z_n` for every recorded `n`.
    pub dominated: bool,
}

impl DominationOutcome {
    /// The coupling claim: B implies domination.
    pub fn holds(&self) -> bool {
        !self.event_b || self.dominated
    }
}

/// Checks `S_n >= Z_n` along a recorded walk, with `Z` driven by the same uniforms.
pub fn domination_check(trace: &WalkTrace, spec: &CouplingSpec) -> Result<DominationOutcome> {
    if spec.m() < trace.n0 {
        return Err(Error::Domain { what: "m (must be >= n0)", value: spec.m() as f64 });
    }
    let n = trace.uniforms.len();
    if trace.positions.len() != n + 1 || trace.probabilities.len() != n {
        return Err(Error::TooFewSamples { got: trace.positions.len(), need: n + 1 });
    }
    let spec = spec.with_start(trace.positions[0]);
    let event_b = (spec.m() as usize + 1..n).all(|k| spec.p(k as u64) <= trace.probabilities[k]);
    let z = path_from_uniforms(&spec, &trace.uniforms);
    let dominated = trace.positions.iter().zip(&z).all(|(s, z)| s >= z);
    Ok(DominationOutcome { event_b, dominated })
}
