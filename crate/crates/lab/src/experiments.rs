//! Experiment orchestration. Replicas run in parallel on their own RNG streams and
//! are aggregated in replica order, so every artifact is a pure function of the config.

use std::path::{Path, PathBuf};

use repwalk_core::coupling::{drift_limit, drift_ratio, CouplingSpec, ScheduleMoments};
use repwalk_core::equilibria::{critical_w, residual, solve_equilibria, EquilibriumReport};
use repwalk_core::experiment::{log_checkpoints, run_replica, Probe, ReplicaOutcome};
use repwalk_core::flow::{attraction_rate, boundary_inward_check, integrate, MAX_STEP};
use repwalk_core::stats::{ks_distance, least_squares_slope, mean, median, normal_cdf};
use repwalk_core::{coupling, replicate, OccupationState, RepulsionParams, RngStreamSpec};
use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig};
use crate::error::{LabError, LabResult};
use crate::output::{
    equilibrium_entries, prepare_dir, write_csv, write_json, ReplicaSummary, Summary,
    TrajectoryWriter, SCHEMA_VERSION,
};

/// Flow time used to push a terminal occupation state into an equilibrium's neighbourhood.
pub const BASIN_FLOW_TIME: f64 = 40.0;
/// Band around the asymmetric occupation levels used by `simulate` for beta > 2.
pub const ASYMMETRIC_BAND: f64 = 0.05;
const CRITICAL_WARNING: &str = "beta = 2 is the critical value; its long-run behaviour is not characterised";

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Aggregates {
    Equilibria(EquilibriaAggregates),
    Simulate(SimulateAggregates),
    Flow(FlowAggregates),
    Coupling(CouplingAggregates),
    Transience(TransienceAggregates),
    Recurrence(RecurrenceAggregates),
    Rate(RateAggregates),
    Nonconvergence(NonconvergenceAggregates),
    Sweep(SweepAggregates),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriaAggregates {
    pub count: usize,
    pub center_stability: &'static str,
    pub non_hyperbolic: bool,
    pub critical_w: Option<f64>,
    pub max_residual: f64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulateAggregates {
    pub warnings: Vec<String>,
    /// Mean over replicas of the fraction of free steps taken to the right, per walk.
    pub up_fraction_mean: [f64; 2],
    pub classified_counts: Vec<u64>,
    pub mean_dist_to_center: f64,
    /// For beta > 2: fraction with `X1r(N)` within [`ASYMMETRIC_BAND`] of `w` or `1 - w`.
    pub near_asymmetric_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlowAggregates {
    pub final_point: [f64; 4],
    pub dist_to_center: f64,
    pub nearest_equilibrium: usize,
    pub dist_to_nearest_equilibrium: f64,
    pub halving_discrepancy: f64,
    pub boundary_inward: bool,
    pub attraction_rate: Option<f64>,
    pub attraction_rate_target: Option<f64>,
    pub attraction_rate_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingAggregates {
    pub b: f64,
    pub m: u64,
    pub drift_limit: f64,
    pub drift_ratio_at_steps: f64,
    pub drift_ratio_at_reference: f64,
    pub drift_reference_horizon: u64,
    pub drift_confirmed: bool,
    /// Sample mean of `Z_N / sigma_N`.
    pub mean_normalized: f64,
    /// KS distance of `(Z_N - E Z_N) / sigma_N` to the standard normal.
    pub ks_distance: f64,
    pub excursion_c: f64,
    pub excursion_steps: u64,
    pub excursion_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransienceAggregates {
    pub opposite_sign_fraction: f64,
    pub mean_abs_speed: f64,
    pub target_speed: f64,
    pub speed_gap: f64,
    /// Fraction of replicas in which walk 1 is the faster-rising one.
    pub direction_split: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnsAtCheckpoint {
    pub n: u64,
    pub median_returns: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecurrenceAggregates {
    pub excursion_c: f64,
    pub burn_in: u64,
    pub max_fraction: [f64; 2],
    pub min_fraction: [f64; 2],
    pub both_fraction: [f64; 2],
    pub checkpoints: Vec<ReturnsAtCheckpoint>,
    pub reference_n: Option<u64>,
    /// Fraction of replicas with more returns at N than at `reference_n`.
    pub paired_growth_fraction: Option<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceAtCheckpoint {
    pub n: u64,
    pub mean_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateAggregates {
    pub checkpoints: Vec<DistanceAtCheckpoint>,
    pub fit_from: u64,
    pub slope: f64,
    pub target: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonconvergenceAggregates {
    pub epsilon_center: f64,
    pub near_center_fraction: f64,
    pub classified_counts: Vec<u64>,
    /// Among replicas outside the center ball, the fraction nearest an asymmetric equilibrium.
    pub off_center_asymmetric_fraction: Option<f64>,
    /// Same population, classified by where the mean flow started at `X(N)` ends up
    /// after [`BASIN_FLOW_TIME`]; `None` if some integration fails its certificate.
    pub off_center_flow_asymmetric_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub beta: f64,
    pub status: String,
    pub equilibrium_count: Option<usize>,
    pub center_stability: Option<&'static str>,
    pub mean_dist_to_center: Option<f64>,
    pub near_center_fraction: Option<f64>,
    pub opposite_sign_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepAggregates {
    pub entries: Vec<SweepEntry>,
}

/// Wide sweep CSV row; error rows leave the per-replica fields empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub beta: f64,
    pub replica_id: Option<u64>,
    pub status: String,
    pub equilibrium_count: Option<usize>,
    pub center_stability: Option<&'static str>,
    pub final_n: Option<u64>,
    #[serde(rename = "S1")]
    pub s1: Option<i64>,
    #[serde(rename = "S2")]
    pub s2: Option<i64>,
    #[serde(rename = "X1l")]
    pub x1l: Option<f64>,
    #[serde(rename = "X1r")]
    pub x1r: Option<f64>,
    #[serde(rename = "X2l")]
    pub x2l: Option<f64>,
    #[serde(rename = "X2r")]
    pub x2r: Option<f64>,
    pub dist_to_center: Option<f64>,
    pub classified_equilibrium: Option<usize>,
    pub dist_to_nearest_equilibrium: Option<f64>,
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub summary: Summary<Aggregates>,
    pub files: Vec<PathBuf>,
}

impl Outcome {
    pub fn summary_path(&self) -> &Path {
        &self.files[0]
    }
}

/// Runs `cfg` with replica `r` on stream `r`.
pub fn execute(cfg: &ExperimentConfig) -> LabResult<Outcome> {
    let ids: Vec<u64> = (0..cfg.replicas).collect();
    execute_with_streams(cfg, &ids)
}

/// Runs `cfg` with replica `r` on stream `stream_ids[r]`.
pub fn execute_with_streams(cfg: &ExperimentConfig, stream_ids: &[u64]) -> LabResult<Outcome> {
    if stream_ids.len() as u64 != cfg.replicas {
        return Err(LabError::Config(format!(
            "{} stream ids for {} replicas",
            stream_ids.len(),
            cfg.replicas
        )));
    }
    prepare_dir(&cfg.out)?;
    let summary_path = cfg.out.join("summary.json");
    let mut files = vec![summary_path.clone()];
    let (equilibria, replicas, aggregates) = match cfg.experiment {
        Experiment::Equilibria => run_equilibria(cfg)?,
        Experiment::Simulate => run_simulate(cfg, stream_ids, &mut files)?,
        Experiment::Flow => run_flow(cfg, &mut files)?,
        Experiment::Coupling => run_coupling(cfg)?,
        Experiment::Transience => run_transience(cfg, stream_ids)?,
        Experiment::Recurrence => run_recurrence(cfg, stream_ids)?,
        Experiment::Rate => run_rate(cfg, stream_ids)?,
        Experiment::Nonconvergence => run_nonconvergence(cfg, stream_ids)?,
        Experiment::Sweep => run_sweep(cfg, stream_ids, &mut files)?,
    };
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        equilibria,
        replicas,
        aggregates,
    };
    write_json(&summary_path, &summary)?;
    Ok(Outcome { summary, files })
}

type Parts = (Vec<crate::output::EquilibriumEntry>, Vec<ReplicaSummary>, Aggregates);

struct WalkRun {
    summary: ReplicaSummary,
    outcome: ReplicaOutcome,
}

fn run_walks(
    cfg: &ExperimentConfig,
    params: &RepulsionParams,
    report: &EquilibriumReport,
    probe: &Probe,
    stream_ids: &[u64],
    trajectories: Option<&Path>,
) -> LabResult<Vec<WalkRun>> {
    let history = cfg.history()?;
    let runs = replicate(stream_ids.len() as u64, |r| -> LabResult<WalkRun> {
        let stream = RngStreamSpec::new(cfg.seed, stream_ids[r as usize]);
        let mut writer = trajectories
            .map(|dir| TrajectoryWriter::create(TrajectoryWriter::path_for(dir, r), cfg.record_every))
            .transpose()?;
        let mut failure = None;
        let outcome = run_replica(&history, params, cfg.steps, &stream, probe, |state| {
            if let (Some(w), None) = (writer.as_mut(), failure.as_ref()) {
                failure = w.observe(state).err();
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        if let Some(w) = writer {
            w.finish(&outcome.final_state)?;
        }
        Ok(WalkRun { summary: replica_summary(r, params.beta(), &outcome, report), outcome })
    });
    runs.into_iter().collect()
}

fn replica_summary(
    replica_id: u64,
    beta: f64,
    outcome: &ReplicaOutcome,
    report: &EquilibriumReport,
) -> ReplicaSummary {
    let state = &outcome.final_state;
    let x = state.occupation();
    let (nearest, dist) = report.nearest(&x);
    let [s1, s2] = state.positions();
    ReplicaSummary {
        replica_id,
        beta,
        final_n: state.n(),
        final_s1: s1,
        final_s2: s2,
        final_x: x.0,
        returns_to_start: outcome.returns,
        dist_to_center: x.l1_distance(&OccupationState::CENTER),
        dist_to_nearest_equilibrium: dist,
        classified_equilibrium: nearest,
    }
}

fn fraction(hits: impl Iterator<Item = bool>, total: usize) -> f64 {
    hits.filter(|&h| h).count() as f64 / total as f64
}

fn classified_counts(runs: &[WalkRun], report: &EquilibriumReport) -> Vec<u64> {
    let mut counts = vec![0u64; report.count()];
    for r in runs {
        counts[r.summary.classified_equilibrium] += 1;
    }
    counts
}

fn summaries(runs: Vec<WalkRun>) -> Vec<ReplicaSummary> {
    runs.into_iter().map(|r| r.summary).collect()
}

fn run_equilibria(cfg: &ExperimentConfig) -> LabResult<Parts> {
    let params = cfg.params()?;
    let report = solve_equilibria(&params);
    let max_residual = report
        .equilibria
        .iter()
        .map(|e| residual(&e.point, &params))
        .fold(0.0, f64::max);
    let warnings = if params.is_critical() { vec![CRITICAL_WARNING.to_string()] } else { vec![] };
    let aggregates = EquilibriaAggregates {
        count: report.count(),
        center_stability: report.center().spectrum.stability.label(),
        non_hyperbolic: report.non_hyperbolic,
        critical_w: critical_w(&params).ok(),
        max_residual,
        warnings,
    };
    Ok((equilibrium_entries(&report), vec![], Aggregates::Equilibria(aggregates)))
}

fn run_simulate(cfg: &ExperimentConfig, ids: &[u64], files: &mut Vec<PathBuf>) -> LabResult<Parts> {
    let params = cfg.params()?;
    let report = solve_equilibria(&params);
    let dir = cfg.out.join("trajectories");
    prepare_dir(&dir)?;
    let runs = run_walks(cfg, &params, &report, &Probe::default(), ids, Some(&dir))?;
    files.extend((0..runs.len() as u64).map(|r| TrajectoryWriter::path_for(&dir, r)));

    let n = runs.len();
    let up = |walk: usize| {
        let f: Vec<f64> = runs
            .iter()
            .map(|r| r.outcome.up_steps[walk] as f64 / r.outcome.free_steps() as f64)
            .collect();
        mean(&f)
    };
    let near_asymmetric_fraction = report.equilibria.get(1).map(|e| {
        fraction(
            runs.iter().map(|r| {
                let x1r = r.summary.final_x[1];
                (x1r - e.w).abs() < ASYMMETRIC_BAND || (x1r - (1.0 - e.w)).abs() < ASYMMETRIC_BAND
            }),
            n,
        )
    });
    let dists: Vec<f64> = runs.iter().map(|r| r.summary.dist_to_center).collect();
    let warnings = if params.is_critical() { vec![CRITICAL_WARNING.to_string()] } else { vec![] };
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let aggregates = SimulateAggregates {
        warnings,
        up_fraction_mean: [up(0), up(1)],
        classified_counts: classified_counts(&runs, &report),
        mean_dist_to_center: mean(&dists),
        near_asymmetric_fraction,
    };
    Ok((equilibrium_entries(&report), summaries(runs), Aggregates::Simulate(aggregates)))
}

fn run_flow(cfg: &ExperimentConfig, files: &mut Vec<PathBuf>) -> LabResult<Parts> {
    #[derive(Serialize)]
    struct FlowRow {
        t: f64,
        #[serde(rename = "X1l")]
        x1l: f64,
        #[serde(rename = "X1r")]
        x1r: f64,
        #[serde(rename = "X2l")]
        x2l: f64,
        #[serde(rename = "X2r")]
        x2r: f64,
    }

    let params = cfg.params()?;
    let report = solve_equilibria(&params);
    let x0 = OccupationState::from_planar(cfg.x0[0], cfg.x0[1]);
    let traj = integrate(&x0, &params, cfg.t_max, cfg.dt)?;
    let rows: Vec<FlowRow> = traj
        .times
        .iter()
        .zip(&traj.points)
        .map(|(&t, p)| FlowRow { t, x1l: p.0[0], x1r: p.0[1], x2l: p.0[2], x2r: p.0[3] })
        .collect();
    let path = cfg.out.join("flow.csv");
    write_csv(&path, &rows)?;
    files.push(path);

    let last = traj.final_point();
    let (nearest, dist) = report.nearest(&last);
    let (rate, target, rate_error) = if params.beta() < 2.0 {
        match attraction_rate(&params, &x0, cfg.t_max) {
            Ok(z) => (Some(z), Some(1.0 - params.beta() / 2.0), None),
            Err(e) => (None, Some(1.0 - params.beta() / 2.0), Some(e.to_string())),
        }
    } else {
        (None, None, None)
    };
    let aggregates = FlowAggregates {
        final_point: last.0,
        dist_to_center: last.l1_distance(&OccupationState::CENTER),
        nearest_equilibrium: nearest,
        dist_to_nearest_equilibrium: dist,
        halving_discrepancy: traj.halving_discrepancy,
        boundary_inward: boundary_inward_check(&params, 1000),
        attraction_rate: rate,
        attraction_rate_target: target,
        attraction_rate_error: rate_error,
    };
    Ok((equilibrium_entries(&report), vec![], Aggregates::Flow(aggregates)))
}

fn run_coupling(cfg: &ExperimentConfig) -> LabResult<Parts> {
    let spec = CouplingSpec::lower(cfg.coupling_b, cfg.coupling_m)?;
    let n = cfg.steps;
    let z = coupling::normalized_endpoints(&spec, n, cfg.replicas, &RngStreamSpec::new(cfg.seed, 0));
    let moments = ScheduleMoments::new(&spec, n);
    let centered_shift = moments.mean[n as usize] / moments.sigma[n as usize];
    let centered: Vec<f64> = z.iter().map(|v| v - centered_shift).collect();
    let excursion = coupling::excursion_fraction(
        &spec,
        cfg.excursion_steps,
        cfg.excursion_c,
        cfg.replicas,
        &RngStreamSpec::new(cfg.seed, cfg.replicas),
    );
    let limit = drift_limit(&spec);
    let aggregates = CouplingAggregates {
        b: spec.b(),
        m: spec.m(),
        drift_limit: limit.limit,
        drift_ratio_at_steps: drift_ratio(&spec, n),
        drift_ratio_at_reference: limit.ratio_at_horizon,
        drift_reference_horizon: limit.horizon,
        drift_confirmed: limit.confirmed(),
        mean_normalized: mean(&z),
        ks_distance: ks_distance(&centered, normal_cdf),
        excursion_c: cfg.excursion_c,
        excursion_steps: cfg.excursion_steps,
        excursion_fraction: excursion,
    };
    Ok((vec![], vec![], Aggregates::Coupling(aggregates)))
}

fn run_transience(cfg: &ExperimentConfig, ids: &[u64]) -> LabResult<Parts> {
    let params = cfg.params()?;
    let report = solve_equilibria(&params);
    let runs = run_walks(cfg, &params, &report, &Probe::default(), ids, None)?;
    let n = runs.len();
    let v: Vec<[f64; 2]> = runs.iter().map(|r| r.outcome.velocity()).collect();
    let speeds: Vec<f64> = v.iter().flat_map(|v| [v[0].abs(), v[1].abs()]).collect();
    let w = report.equilibria[1].w;
    let mean_abs_speed = mean(&speeds);
    let aggregates = TransienceAggregates {
        opposite_sign_fraction: fraction(v.iter().map(|v| v[0] * v[1] < 0.0), n),
        mean_abs_speed,
        target_speed: 1.0 - 2.0 * w,
        speed_gap: (mean_abs_speed - (1.0 - 2.0 * w)).abs(),
        direction_split: fraction(v.iter().map(|v| v[0] > v[1]), n),
    };
    Ok((equilibrium_entries(&report), summaries(runs), Aggregates::Transience(aggregates)))
}

fn run_recurrence(cfg: &ExperimentConfig, ids: &[u64]) -> LabResult<Parts> {
    let params = cfg.params()?;
    let report = solve_equilibria(&params);
    let n0 = cfg.history()?.len();
    let probe = Probe { checkpoints: log_checkpoints(n0, cfg.steps), burn_in: cfg.burn_in };
    let runs = run_walks(cfg, &params, &report, &probe, ids, None)?;
    let n = runs.len();
    let c = cfg.excursion_c;
    let per_walk = |f: &dyn Fn(&ReplicaOutcome, usize) -> bool| {
        [0, 1].map(|walk| fraction(runs.iter().map(|r| f(&r.outcome, walk)), n))
    };
    let max_fraction = per_walk(&|o, w| o.max_scaled[w] >= c);
    let min_fraction = per_walk(&|o, w| o.min_scaled[w] <= -c);
    let both_fraction = per_walk(&|o, w| o.max_scaled[w] >= c && o.min_scaled[w] <= -c);

    let checkpoints: Vec<ReturnsAtCheckpoint> = probe
        .checkpoints
        .iter()
        .enumerate()
        .map(|(k, &cp)| ReturnsAtCheckpoint {
            n: cp,
            median_returns: [0, 1].map(|walk| {
                let v: Vec<f64> =
                    runs.iter().map(|r| r.outcome.checkpoints[k].returns[walk] as f64).collect();
                median(&v)
            }),
        })
        .collect();
    let reference = probe.checkpoints.iter().rposition(|&cp| cp * 100 <= cfg.steps);
    let paired_growth_fraction = reference.map(|k| {
        per_walk(&|o, w| o.returns[w] > o.checkpoints[k].returns[w])
    });
    let aggregates = RecurrenceAggregates {
        excursion_c: c,
        burn_in: cfg.burn_in,
        max_fraction,
        min_fraction,
        both_fraction,
        checkpoints,
        reference_n: reference.map(|k| probe.checkpoints[k]),
        paired_growth_fraction,
    };
    Ok((equilibrium_entries(&report), summaries(runs), Aggregates::Recurrence(aggregates)))
}

fn run_rate(cfg: &ExperimentConfig, ids: &[u64]) -> LabResult<Parts> {
    let params = cfg.params()?;
    let report = solve_equilibria(&params);
    let n0 = cfg.history()?.len();
    let probe = Probe { checkpoints: log_checkpoints(n0, cfg.steps), burn_in: cfg.burn_in };
    let runs = run_walks(cfg, &params, &report, &probe, ids, None)?;
    let checkpoints: Vec<DistanceAtCheckpoint> = probe
        .checkpoints
        .iter()
        .enumerate()
        .map(|(k, &cp)| {
            let d: Vec<f64> = runs
                .iter()
                .map(|r| r.outcome.checkpoints[k].occupation.l1_distance(&OccupationState::CENTER))
                .collect();
            DistanceAtCheckpoint { n: cp, mean_distance: mean(&d) }
        })
        .collect();
    let fit_from = (cfg.steps / 100).max(n0).max(1);
    let (xs, ys): (Vec<f64>, Vec<f64>) = checkpoints
        .iter()
        .filter(|c| c.n >= fit_from)
        .map(|c| ((c.n as f64).ln(), c.mean_distance.ln()))
        .unzip();
    let slope = least_squares_slope(&xs, &ys)?;
    let aggregates = RateAggregates {
        checkpoints,
        fit_from,
        slope,
        target: -(0.5f64).min(1.0 - params.beta() / 2.0),
    };
    Ok((equilibrium_entries(&report), summaries(runs), Aggregates::Rate(aggregates)))
}

fn run_nonconvergence(cfg: &ExperimentConfig, ids: &[u64]) -> LabResult<Parts> {
    let params = cfg.params()?;
    let report = solve_equilibria(&params);
    let runs = run_walks(cfg, &params, &report, &Probe::default(), ids, None)?;
    let eps = cfg.epsilon_center;
    let off: Vec<&WalkRun> = runs.iter().filter(|r| r.summary.dist_to_center >= eps).collect();
    let aggregates = NonconvergenceAggregates {
        epsilon_center: eps,
        near_center_fraction: fraction(runs.iter().map(|r| r.summary.dist_to_center < eps), runs.len()),
        classified_counts: classified_counts(&runs, &report),
        off_center_asymmetric_fraction: (!off.is_empty()).then(|| {
            fraction(off.iter().map(|r| r.summary.classified_equilibrium != 0), off.len())
        }),
        off_center_flow_asymmetric_fraction: flow_classified_fraction(&off, &params, &report),
    };
    Ok((equilibrium_entries(&report), summaries(runs), Aggregates::Nonconvergence(aggregates)))
}

fn flow_classified_fraction(
    runs: &[&WalkRun],
    params: &RepulsionParams,
    report: &EquilibriumReport,
) -> Option<f64> {
    if runs.is_empty() {
        return None;
    }
    let mut asymmetric = 0usize;
    for r in runs {
        let x = OccupationState(r.summary.final_x);
        let end = integrate(&x, params, BASIN_FLOW_TIME, MAX_STEP).ok()?.final_point();
        if report.nearest(&end).0 != 0 {
            asymmetric += 1;
        }
    }
    Some(asymmetric as f64 / runs.len() as f64)
}

fn run_sweep(cfg: &ExperimentConfig, ids: &[u64], files: &mut Vec<PathBuf>) -> LabResult<Parts> {
    let mut grid = cfg.beta_grid.clone().unwrap_or_default();
    grid.sort_by(f64::total_cmp);
    let mut equilibria = Vec::new();
    let mut replicas = Vec::new();
    let mut entries = Vec::new();
    let mut rows = Vec::new();
    for beta in grid {
        let params = match RepulsionParams::new(beta) {
            Ok(p) => p,
            Err(e) => {
                let status = format!("error: {e}");
                rows.push(SweepRow {
                    beta,
                    replica_id: None,
                    status: status.clone(),
                    equilibrium_count: None,
                    center_stability: None,
                    final_n: None,
                    s1: None,
                    s2: None,
                    x1l: None,
                    x1r: None,
                    x2l: None,
                    x2r: None,
                    dist_to_center: None,
                    classified_equilibrium: None,
                    dist_to_nearest_equilibrium: None,
                });
                entries.push(SweepEntry {
                    beta,
                    status,
                    equilibrium_count: None,
                    center_stability: None,
                    mean_dist_to_center: None,
                    near_center_fraction: None,
                    opposite_sign_fraction: None,
                });
                continue;
            }
        };
        let report = solve_equilibria(&params);
        let runs = run_walks(cfg, &params, &report, &Probe::default(), ids, None)?;
        let status = if params.is_critical() { format!("warning: {CRITICAL_WARNING}") } else { "ok".into() };
        let stability = report.center().spectrum.stability.label();
        let n = runs.len();
        let dists: Vec<f64> = runs.iter().map(|r| r.summary.dist_to_center).collect();
        entries.push(SweepEntry {
            beta,
            status: status.clone(),
            equilibrium_count: Some(report.count()),
            center_stability: Some(stability),
            mean_dist_to_center: Some(mean(&dists)),
            near_center_fraction: Some(fraction(dists.iter().map(|&d| d < cfg.epsilon_center), n)),
            opposite_sign_fraction: Some(fraction(
                runs.iter().map(|r| {
                    let v = r.outcome.velocity();
                    v[0] * v[1] < 0.0
                }),
                n,
            )),
        });
        for r in &runs {
            let s = &r.summary;
            rows.push(SweepRow {
                beta,
                replica_id: Some(s.replica_id),
                status: status.clone(),
                equilibrium_count: Some(report.count()),
                center_stability: Some(stability),
                final_n: Some(s.final_n),
                s1: Some(s.final_s1),
                s2: Some(s.final_s2),
                x1l: Some(s.final_x[0]),
                x1r: Some(s.final_x[1]),
                x2l: Some(s.final_x[2]),
                x2r: Some(s.final_x[3]),
                dist_to_center: Some(s.dist_to_center),
                classified_equilibrium: Some(s.classified_equilibrium),
                dist_to_nearest_equilibrium: Some(s.dist_to_nearest_equilibrium),
            });
        }
        equilibria.extend(equilibrium_entries(&report));
        replicas.extend(summaries(runs));
    }
    let path = cfg.out.join("sweep.csv");
    write_csv(&path, &rows)?;
    files.push(path);
    Ok((equilibria, replicas, Aggregates::Sweep(SweepAggregates { entries })))
}
