//! Experiment configuration: a flat JSON file overlaid by command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use repwalk_core::flow::MAX_STEP;
use repwalk_core::{InitialHistory, RepulsionParams};
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Equilibria,
    Simulate,
    Flow,
    Coupling,
    Transience,
    Recurrence,
    Rate,
    Nonconvergence,
    Sweep,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Equilibria => "equilibria",
            Experiment::Simulate => "simulate",
            Experiment::Flow => "flow",
            Experiment::Coupling => "coupling",
            Experiment::Transience => "transience",
            Experiment::Recurrence => "recurrence",
            Experiment::Rate => "rate",
            Experiment::Nonconvergence => "nonconvergence",
            Experiment::Sweep => "sweep",
        }
    }

    /// Experiments that evolve the walk pair from an initial history.
    fn uses_walks(self) -> bool {
        matches!(
            self,
            Experiment::Simulate
                | Experiment::Transience
                | Experiment::Recurrence
                | Experiment::Rate
                | Experiment::Nonconvergence
                | Experiment::Sweep
        )
    }
}

/// Every setting optional; used for both the config file and the flags.
///
/// Keys are the flag names with dashes turned into underscores.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize, clap::Args)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    #[arg(skip)]
    pub experiment: Option<Experiment>,
    /// Repulsion strength.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Comma-separated repulsion strengths (sweep only).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub beta_grid: Option<Vec<f64>>,
    /// Horizon N: total number of steps including the initial history.
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long)]
    pub replicas: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Initial transition counts L1,R1,L2,R2.
    #[arg(long, value_delimiter = ',', value_name = "L1,R1,L2,R2")]
    pub n0_counts: Option<Vec<u64>>,
    /// Starting positions S1,S2.
    #[arg(long, value_delimiter = ',', value_name = "S1,S2", allow_hyphen_values = true)]
    pub start: Option<Vec<i64>>,
    /// Trajectory rows are written at multiples of this step count.
    #[arg(long)]
    pub record_every: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(skip)]
    pub exploratory: Option<bool>,
    /// L1 radius around the center counted as "near the center".
    #[arg(long)]
    pub epsilon_center: Option<f64>,
    /// Threshold c for the running-extreme recurrence and excursion proxies.
    #[arg(long)]
    pub excursion_c: Option<f64>,
    /// Horizon for the coupling excursion proxy (defaults to --steps).
    #[arg(long)]
    pub excursion_steps: Option<u64>,
    /// Running extremes of S/sqrt(n) only count from this step on.
    #[arg(long)]
    pub burn_in: Option<u64>,
    #[arg(long)]
    pub coupling_b: Option<f64>,
    #[arg(long)]
    pub coupling_m: Option<u64>,
    /// Flow start as planar coordinates X1l,X2l.
    #[arg(long, value_delimiter = ',', value_name = "X1L,X2L")]
    pub x0: Option<Vec<f64>>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),*) => {
        PartialConfig { $($field: $top.$field.or($base.$field)),* }
    };
}

impl PartialConfig {
    pub fn from_file(path: &Path) -> LabResult<Self> {
        let text = fs::read_to_string(path).map_err(LabError::io(path))?;
        serde_json::from_str(&text)
            .map_err(|e| LabError::Config(format!("{}: {e}", path.display())))
    }

    /// Fields set in `top` win over fields set in `self`.
    pub fn overlay(self, top: PartialConfig) -> PartialConfig {
        let base = self;
        overlay!(base, top; experiment, beta, beta_grid, steps, replicas, seed, n0_counts, start,
            record_every, out, exploratory, epsilon_center, excursion_c, excursion_steps, burn_in,
            coupling_b, coupling_m, x0, t_max, dt)
    }
}

/// Fully resolved settings. Serializes to a flat object that reads back as a config file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub beta: Option<f64>,
    pub beta_grid: Option<Vec<f64>>,
    pub steps: u64,
    pub replicas: u64,
    pub seed: u64,
    pub n0_counts: [u64; 4],
    pub start: [i64; 2],
    pub record_every: u64,
    pub out: PathBuf,
    pub exploratory: bool,
    pub epsilon_center: f64,
    pub excursion_c: f64,
    pub excursion_steps: u64,
    pub burn_in: u64,
    pub coupling_b: f64,
    pub coupling_m: u64,
    pub x0: [f64; 2],
    pub t_max: f64,
    pub dt: f64,
}

fn invalid(msg: impl Into<String>) -> LabError {
    LabError::Config(msg.into())
}

fn fixed<const N: usize, T: Copy>(name: &str, v: Option<Vec<T>>, default: [T; N]) -> LabResult<[T; N]> {
    match v {
        None => Ok(default),
        Some(v) => v
            .try_into()
            .map_err(|v: Vec<T>| invalid(format!("{name} needs {N} values, got {}", v.len()))),
    }
}

impl ExperimentConfig {
    pub const DEFAULT_STEPS: u64 = 100_000;
    pub const DEFAULT_REPLICAS: u64 = 200;
    pub const DEFAULT_RECORD_EVERY: u64 = 1000;

    /// Fills defaults and checks every invariant; nothing touches the disk.
    pub fn resolve(p: PartialConfig) -> LabResult<Self> {
        let experiment = p.experiment.ok_or_else(|| invalid("no experiment selected"))?;
        let steps = p.steps.unwrap_or(Self::DEFAULT_STEPS);
        let cfg = ExperimentConfig {
            experiment,
            beta: p.beta,
            beta_grid: p.beta_grid,
            steps,
            replicas: p.replicas.unwrap_or(Self::DEFAULT_REPLICAS),
            seed: p.seed.unwrap_or(0),
            n0_counts: fixed("n0_counts", p.n0_counts, [0, 1, 0, 1])?,
            start: fixed("start", p.start, [0, 0])?,
            record_every: p.record_every.unwrap_or(Self::DEFAULT_RECORD_EVERY),
            out: p.out.unwrap_or_else(|| PathBuf::from("out")),
            exploratory: p.exploratory.unwrap_or(false),
            epsilon_center: p.epsilon_center.unwrap_or(0.05),
            excursion_c: p.excursion_c.unwrap_or(1.0),
            excursion_steps: p.excursion_steps.unwrap_or(steps),
            burn_in: p.burn_in.unwrap_or(100),
            coupling_b: p.coupling_b.unwrap_or(0.25),
            coupling_m: p.coupling_m.unwrap_or(10),
            x0: fixed("x0", p.x0, [0.52, 0.49])?,
            t_max: p.t_max.unwrap_or(40.0),
            dt: p.dt.unwrap_or(0.01),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn history(&self) -> LabResult<InitialHistory> {
        InitialHistory::new(self.n0_counts, self.start).map_err(|e| invalid(format!("n0_counts: {e}")))
    }

    /// The single repulsion strength of a non-sweep run.
    pub fn params(&self) -> LabResult<RepulsionParams> {
        let beta = self.beta.ok_or_else(|| invalid("beta is required"))?;
        RepulsionParams::new(beta).map_err(|e| invalid(format!("beta: {e}")))
    }

    fn validate(&self) -> LabResult<()> {
        if self.steps < 1 || self.replicas < 1 || self.record_every < 1 {
            return Err(invalid("steps, replicas and record_every must all be at least 1"));
        }
        if !(self.epsilon_center > 0.0) {
            return Err(invalid("epsilon_center must be positive"));
        }
        if !self.excursion_c.is_finite() {
            return Err(invalid("excursion_c must be finite"));
        }
        if self.experiment == Experiment::Sweep {
            if self.beta.is_some() {
                return Err(invalid("sweep takes beta_grid, not beta"));
            }
            match &self.beta_grid {
                Some(g) if !g.is_empty() => {}
                _ => return Err(invalid("sweep needs a nonempty beta_grid")),
            }
        } else if self.beta_grid.is_some() {
            return Err(invalid("beta_grid is only used by sweep; set beta instead"));
        }
        if self.experiment.uses_walks() {
            let history = self.history()?;
            if self.steps <= history.len() {
                return Err(invalid(format!(
                    "steps ({}) must exceed the initial history length ({})",
                    self.steps,
                    history.len()
                )));
            }
        }
        match self.experiment {
            Experiment::Coupling => self.validate_coupling(),
            Experiment::Sweep => Ok(()),
            Experiment::Flow => {
                self.params()?;
                let [a, b] = self.x0;
                if !(0.0..=1.0).contains(&a) || !(0.0..=1.0).contains(&b) {
                    return Err(invalid("x0 coordinates must lie in [0, 1]"));
                }
                if !(self.t_max > 0.0 && self.t_max.is_finite()) {
                    return Err(invalid("t_max must be positive"));
                }
                if !(self.dt > 0.0 && self.dt <= MAX_STEP) {
                    return Err(invalid(format!("dt must lie in (0, {MAX_STEP}]")));
                }
                Ok(())
            }
            _ => self.validate_beta_policy(),
        }
    }

    fn validate_beta_policy(&self) -> LabResult<()> {
        let p = self.params()?;
        let beta = p.beta();
        let limit_law = !matches!(self.experiment, Experiment::Simulate | Experiment::Equilibria);
        if limit_law && p.is_critical() {
            return Err(invalid(format!(
                "{} is undefined at the critical value beta = 2",
                self.experiment.name()
            )));
        }
        match self.experiment {
            Experiment::Transience | Experiment::Nonconvergence if beta <= 2.0 => {
                Err(invalid(format!("{} needs beta > 2, got {beta}", self.experiment.name())))
            }
            Experiment::Rate if beta >= 2.0 => Err(invalid(format!("rate needs beta < 2, got {beta}"))),
            Experiment::Recurrence if beta > 1.0 && !(self.exploratory && beta < 2.0) => {
                Err(invalid(format!(
                    "recurrence needs beta in [0, 1] (or (1, 2) with --exploratory), got {beta}"
                )))
            }
            _ => Ok(()),
        }
    }

    fn validate_coupling(&self) -> LabResult<()> {
        if !(self.coupling_b > 0.0 && self.coupling_b.is_finite()) {
            return Err(invalid("coupling_b must be positive"));
        }
        if self.replicas < 1000 {
            return Err(invalid("coupling needs at least 1000 replicas for its KS diagnostic"));
        }
        if self.excursion_steps < 1 {
            return Err(invalid("excursion_steps must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn partial(experiment: Experiment) -> PartialConfig {
        PartialConfig {
            experiment: Some(experiment),
            beta: Some(1.0),
            ..Default::default()
        }
    }

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::resolve(partial(Experiment::Simulate)).unwrap();
        assert_eq!(c.n0_counts, [0, 1, 0, 1]);
        assert_eq!(c.steps, 100_000);
        assert_eq!(c.excursion_steps, c.steps);
    }

    #[test]
    fn overlay_prefers_top() {
        let file = PartialConfig { beta: Some(3.0), seed: Some(9), ..Default::default() };
        let flags = PartialConfig { beta: Some(4.0), ..Default::default() };
        let merged = file.overlay(flags);
        assert_eq!(merged.beta, Some(4.0));
        assert_eq!(merged.seed, Some(9));
    }

    #[test]
    fn beta_policies() {
        let with = |e, b: f64, exploratory| {
            ExperimentConfig::resolve(PartialConfig {
                beta: Some(b),
                exploratory: Some(exploratory),
                ..partial(e)
            })
        };
        assert!(with(Experiment::Simulate, 2.0, false).is_ok());
        assert!(with(Experiment::Transience, 2.0, false).is_err());
        assert!(with(Experiment::Transience, 1.0, false).is_err());
        assert!(with(Experiment::Transience, 4.0, false).is_ok());
        assert!(with(Experiment::Nonconvergence, 2.5, false).is_ok());
        assert!(with(Experiment::Rate, 2.0, false).is_err());
        assert!(with(Experiment::Rate, 1.5, false).is_ok());
        assert!(with(Experiment::Recurrence, 1.5, false).is_err());
        assert!(with(Experiment::Recurrence, 1.5, true).is_ok());
        assert!(with(Experiment::Recurrence, 2.0, true).is_err());
        assert!(with(Experiment::Recurrence, 0.0, false).is_ok());
        assert!(with(Experiment::Simulate, -1.0, false).is_err());
    }

    #[test]
    fn structural_checks() {
        let bad = |p: PartialConfig| ExperimentConfig::resolve(p).is_err();
        assert!(bad(PartialConfig { steps: Some(0), ..partial(Experiment::Simulate) }));
        assert!(bad(PartialConfig { record_every: Some(0), ..partial(Experiment::Simulate) }));
        assert!(bad(PartialConfig { n0_counts: Some(vec![1, 2, 3]), ..partial(Experiment::Simulate) }));
        assert!(bad(PartialConfig { n0_counts: Some(vec![1, 2, 0, 1]), ..partial(Experiment::Simulate) }));
        assert!(bad(PartialConfig { steps: Some(1), ..partial(Experiment::Simulate) }));
        assert!(!bad(PartialConfig { steps: Some(2), ..partial(Experiment::Simulate) }));
        let sweep = PartialConfig { experiment: Some(Experiment::Sweep), ..Default::default() };
        assert!(bad(sweep.clone()));
        assert!(bad(PartialConfig { beta_grid: Some(vec![]), ..sweep.clone() }));
        assert!(!bad(PartialConfig { beta_grid: Some(vec![0.0, 3.0]), ..sweep }));
        assert!(bad(PartialConfig { replicas: Some(10), ..partial(Experiment::Coupling) }));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = serde_json::from_str::<PartialConfig>(r#"{"beta": 1, "betta": 2}"#);
        assert!(err.is_err());
        let ok: PartialConfig =
            serde_json::from_str(r#"{"beta": 1, "n0_counts": [1,1,1,1], "record_every": 5}"#).unwrap();
        assert_eq!(ok.n0_counts, Some(vec![1, 1, 1, 1]));
    }

    #[test]
    fn resolved_config_reads_back() {
        let c = ExperimentConfig::resolve(partial(Experiment::Rate)).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        let back: PartialConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(ExperimentConfig::resolve(back).unwrap(), c);
    }
}
