//! Serialized artifacts: trajectory CSV, flow CSV, sweep CSV and the summary JSON.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use repwalk_core::equilibria::EquilibriumReport;
use repwalk_core::{OccupationState, WalkPairState};
use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{LabError, LabResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumEntry {
    pub beta: f64,
    pub index: usize,
    pub kind: &'static str,
    pub point: [f64; 4],
    pub w: f64,
    /// `[re, im]` pairs sorted by real part.
    pub eigenvalues: Vec<[f64; 2]>,
    pub stability: &'static str,
}

pub fn equilibrium_entries(report: &EquilibriumReport) -> Vec<EquilibriumEntry> {
    const KINDS: [&str; 3] = ["center", "asymmetric", "asymmetric-swapped"];
    report
        .equilibria
        .iter()
        .enumerate()
        .map(|(index, e)| EquilibriumEntry {
            beta: report.beta,
            index,
            kind: KINDS[index],
            point: e.point.0,
            w: e.w,
            eigenvalues: e.spectrum.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
            stability: e.spectrum.stability.label(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicaSummary {
    pub replica_id: u64,
    pub beta: f64,
    pub final_n: u64,
    #[serde(rename = "final_S1")]
    pub final_s1: i64,
    #[serde(rename = "final_S2")]
    pub final_s2: i64,
    #[serde(rename = "final_X")]
    pub final_x: [f64; 4],
    pub returns_to_start: [u64; 2],
    pub dist_to_center: f64,
    pub dist_to_nearest_equilibrium: f64,
    pub classified_equilibrium: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary<A> {
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub equilibria: Vec<EquilibriumEntry>,
    pub replicas: Vec<ReplicaSummary>,
    pub aggregates: A,
}

pub fn prepare_dir(dir: &Path) -> LabResult<()> {
    fs::create_dir_all(dir).map_err(LabError::io(dir))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> LabResult<()> {
    let file = File::create(path).map_err(LabError::io(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value)
        .map_err(|e| LabError::Io { path: path.into(), source: e.into() })?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(LabError::io(path))
}

fn csv_error(path: &Path) -> impl FnOnce(csv::Error) -> LabError + '_ {
    move |e| LabError::Io { path: path.into(), source: e.into() }
}

/// Streams `n,S1,S2,X1l,X1r,X2l,X2r` rows for one replica.
pub struct TrajectoryWriter {
    path: PathBuf,
    inner: csv::Writer<BufWriter<File>>,
    every: u64,
    last: Option<u64>,
}

#[derive(Serialize)]
struct TrajectoryRow {
    n: u64,
    #[serde(rename = "S1")]
    s1: i64,
    #[serde(rename = "S2")]
    s2: i64,
    #[serde(rename = "X1l")]
    x1l: f64,
    #[serde(rename = "X1r")]
    x1r: f64,
    #[serde(rename = "X2l")]
    x2l: f64,
    #[serde(rename = "X2r")]
    x2r: f64,
}

impl TrajectoryWriter {
    pub fn path_for(dir: &Path, replica: u64) -> PathBuf {
        dir.join(format!("replica_{replica:05}.csv"))
    }

    pub fn create(path: PathBuf, every: u64) -> LabResult<Self> {
        let file = File::create(&path).map_err(LabError::io(&path))?;
        Ok(Self { inner: csv::Writer::from_writer(BufWriter::new(file)), path, every, last: None })
    }

    /// Writes the initial state and every multiple of `every`; [`finish`](Self::finish) adds the last.
    pub fn observe(&mut self, state: &WalkPairState) -> LabResult<()> {
        if self.last.is_none() || state.n() % self.every == 0 {
            self.write(state)?;
        }
        Ok(())
    }

    pub fn finish(mut self, state: &WalkPairState) -> LabResult<()> {
        if self.last != Some(state.n()) {
            self.write(state)?;
        }
        self.inner.flush().map_err(LabError::io(&self.path))
    }

    fn write(&mut self, state: &WalkPairState) -> LabResult<()> {
        let [s1, s2] = state.positions();
        let OccupationState([x1l, x1r, x2l, x2r]) = state.occupation();
        self.inner
            .serialize(TrajectoryRow { n: state.n(), s1, s2, x1l, x1r, x2l, x2r })
            .map_err(csv_error(&self.path))?;
        self.last = Some(state.n());
        Ok(())
    }
}

/// Writes serializable rows with a header taken from the first row.
pub fn write_csv<R: Serialize>(path: &Path, rows: &[R]) -> LabResult<()> {
    let file = File::create(path).map_err(LabError::io(path))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for row in rows {
        w.serialize(row).map_err(csv_error(path))?;
    }
    w.flush().map_err(LabError::io(path))
}
