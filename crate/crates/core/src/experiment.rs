//! Single-replica kernels shared by every Monte Carlo experiment.

use alloc::vec::Vec;

use crate::params::RepulsionParams;
use crate::rng::RngStreamSpec;
use crate::walk::{InitialHistory, OccupationState, WalkPairState};

/// Checkpoints `round(10^{k/2})` inside `[from, to]`, plus `to` itself.
pub fn log_checkpoints(from: u64, to: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut k = 0i32;
    loop {
        let n = libm::round(libm::pow(10.0, k as f64 / 2.0)) as u64;
        if n > to {
            break;
        }
        if n >= from && out.last() != Some(&n) {
            out.push(n);
        }
        k += 1;
    }
    if out.last() != Some(&to) && to >= from {
        out.push(to);
    }
    out
}

/// What to record along a replica besides its final state.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Probe {
    /// Sorted step indices at which to take a [`Checkpoint`].
    pub checkpoints: Vec<u64>,
    /// Running extremes of `(S_n - S_0) / sqrt(n)` only count for `n >= burn_in`.
    pub burn_in: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checkpoint {
    pub n: u64,
    pub positions: [i64; 2],
    pub occupation: OccupationState,
    /// Returns to the starting level so far, per walk.
    pub returns: [u64; 2],
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicaOutcome {
    pub history: InitialHistory,
    pub final_state: WalkPairState,
    /// Number of `n > n0` with `S^i_n = S^i_0`.
    pub returns: [u64; 2],
    /// Right steps taken under the repelling law (prefix excluded).
    pub up_steps: [u64; 2],
    pub max_scaled: [f64; 2],
    pub min_scaled: [f64; 2],
    pub checkpoints: Vec<Checkpoint>,
}

impl ReplicaOutcome {
    /// `(S^i_N - S^i_{n0}) / N`.
    pub fn velocity(&self) -> [f64; 2] {
        let n = self.final_state.n() as f64;
        let after = self.history.positions();
        let pos = self.final_state.positions();
        [(pos[0] - after[0]) as f64 / n, (pos[1] - after[1]) as f64 / n]
    }

    pub fn free_steps(&self) -> u64 {
        self.final_state.n() - self.history.len()
    }
}

/// Evolves one pair from `history` until `n = horizon`, calling `on_state`
/// on the initial state and after every step.
pub fn run_replica(
    history: &InitialHistory,
    params: &RepulsionParams,
    horizon: u64,
    stream: &RngStreamSpec,
    probe: &Probe,
    mut on_state: impl FnMut(&WalkPairState),
) -> ReplicaOutcome {
    let mut rng = stream.open();
    let mut state = WalkPairState::new(history);
    let mut returns = [0u64; 2];
    let mut max_scaled = [f64::NEG_INFINITY; 2];
    let mut min_scaled = [f64::INFINITY; 2];
    let mut checkpoints = Vec::with_capacity(probe.checkpoints.len());
    let mut next_cp = probe.checkpoints.partition_point(|&c| c < state.n());

    on_state(&state);
    take_checkpoints(&probe.checkpoints, &mut next_cp, &state, &returns, &mut checkpoints);
    while state.n() < horizon {
        state.advance(params, rng.next_pair());
        let n = state.n();
        for walk in 0..2 {
            let d = state.displacement(walk);
            if d == 0 {
                returns[walk] += 1;
            }
            if n >= probe.burn_in {
                let scaled = d as f64 / libm::sqrt(n as f64);
                max_scaled[walk] = max_scaled[walk].max(scaled);
                min_scaled[walk] = min_scaled[walk].min(scaled);
            }
        }
        on_state(&state);
        take_checkpoints(&probe.checkpoints, &mut next_cp, &state, &returns, &mut checkpoints);
    }

    let prefix = history.counts();
    let counts = state.counts();
    ReplicaOutcome {
        history: *history,
        final_state: state,
        returns,
        up_steps: [
            counts.right[0] - prefix.right[0],
            counts.right[1] - prefix.right[1],
        ],
        max_scaled,
        min_scaled,
        checkpoints,
    }
}

fn take_checkpoints(
    wanted: &[u64],
    next: &mut usize,
    state: &WalkPairState,
    returns: &[u64; 2],
    out: &mut Vec<Checkpoint>,
) {
    while *next < wanted.len() && wanted[*next] == state.n() {
        out.push(Checkpoint {
            n: state.n(),
            positions: state.positions(),
            occupation: state.occupation(),
            returns: *returns,
        });
        *next += 1;
    }
}
