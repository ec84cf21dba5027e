//! The joint process of two repelling walks and its occupation proportions.
//!
//! Walk `i` steps right at time `n` with probability `psi(y_j)`, where `y_j`
//! is the net displacement per step of the *other* walk. A walk that has
//! mostly gone right pushes its partner left, and vice versa.
//!
//! States store exact integer transition counts. Proportions are derived by
//! a single division, so `X^i_l(n) + X^i_r(n) = 1` holds exactly.

use crate::error::{Error, Result};
use crate::params::RepulsionParams;

/// Coordinate order used by every four-vector: `(x1_l, x1_r, x2_l, x2_r)`.
pub const X1L: usize = 0;
pub const X1R: usize = 1;
pub const X2L: usize = 2;
pub const X2R: usize = 3;

/// A point of the product of two 1-simplices: left/right proportions per walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OccupationState(pub [f64; 4]);

/// A vector in the tangent space: each walk's pair sums to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector(pub [f64; 4]);

impl OccupationState {
    /// The symmetric point `(1/2, 1/2, 1/2, 1/2)`.
    pub const CENTER: Self = Self([0.5; 4]);

    /// Lift planar coordinates `(x1_l, x2_l)` to the four proportions.
    pub fn from_planar(x1_left: f64, x2_left: f64) -> Self {
        Self([x1_left, 1.0 - x1_left, x2_left, 1.0 - x2_left])
    }

    /// `(w, 1-w, 1-w, w)`, the shape every equilibrium takes.
    pub fn symmetric_pair(w: f64) -> Self {
        Self([w, 1.0 - w, 1.0 - w, w])
    }

    pub fn planar(&self) -> [f64; 2] {
        [self.0[X1L], self.0[X2L]]
    }

    #[inline]
    pub fn left(&self, walk: usize) -> f64 {
        self.0[2 * walk]
    }

    #[inline]
    pub fn right(&self, walk: usize) -> f64 {
        self.0[2 * walk + 1]
    }

    /// Coordinates in `[-tol, 1 + tol]` and row sums within `tol` of one.
    pub fn is_in_domain(&self, tol: f64) -> bool {
        self.0.iter().all(|&v| v >= -tol && v <= 1.0 + tol)
            && (self.0[X1L] + self.0[X1R] - 1.0).abs() <= tol
            && (self.0[X2L] + self.0[X2R] - 1.0).abs() <= tol
    }

    pub fn l1_distance(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).abs()).sum()
    }

    /// The coordinates of walk `i` swapped with those of walk `j`.
    pub fn swap_walks(&self) -> Self {
        let x = self.0;
        Self([x[X2L], x[X2R], x[X1L], x[X1R]])
    }
}

impl TangentVector {
    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).sum()
    }

    pub fn dot(&self, other: &[f64; 4]) -> f64 {
        self.0.iter().zip(other).map(|(a, b)| a * b).sum()
    }

    pub fn is_tangent(&self, tol: f64) -> bool {
        (self.0[X1L] + self.0[X1R]).abs() <= tol && (self.0[X2L] + self.0[X2R]).abs() <= tol
    }
}

/// Transition law `psi(y) = 1 / (1 + exp(beta * y))` on `[-1, 1]`.
pub fn psi(y: f64, params: &RepulsionParams) -> Result<f64> {
    if !(-1.0..=1.0).contains(&y) {
        return Err(Error::Domain { what: "psi argument", value: y });
    }
    Ok(logistic(params.beta(), y))
}

/// `1 / (1 + exp(beta * y))`, evaluated on the side where the exponent is
/// nonnegative and mirrored, so `logistic(b, -y) == 1 - logistic(b, y)` bit for bit.
#[inline]
pub(crate) fn logistic(beta: f64, y: f64) -> f64 {
    if y >= 0.0 {
        1.0 / (1.0 + libm::exp(beta * y))
    } else {
        1.0 - 1.0 / (1.0 + libm::exp(-beta * y))
    }
}

/// Left/right step probabilities driven by the partner's proportions
/// `(left, right)`: `exp(-b x_v) / (exp(-b x_l) + exp(-b x_r))`.
///
/// The exponentials are shifted by their maximum, so only the smaller
/// probability is formed as a ratio; the larger is its complement.
#[inline]
fn repelled_split(beta: f64, left: f64, right: f64) -> (f64, f64) {
    let shift = -beta * left.min(right);
    let e_left = libm::exp(-beta * left - shift);
    let e_right = libm::exp(-beta * right - shift);
    if left >= right {
        let p_left = e_left / (e_left + e_right);
        (p_left, 1.0 - p_left)
    } else {
        let p_right = e_right / (e_left + e_right);
        (1.0 - p_right, p_right)
    }
}

/// Conditional step law `pi(x)`: entry `(i, v)` is the probability that walk
/// `i` steps towards `v` given proportions `x`.
pub fn pi_map(x: &OccupationState, params: &RepulsionParams) -> OccupationState {
    let beta = params.beta();
    let (p1l, p1r) = repelled_split(beta, x.0[X2L], x.0[X2R]);
    let (p2l, p2r) = repelled_split(beta, x.0[X1L], x.0[X1R]);
    OccupationState([p1l, p1r, p2l, p2r])
}

/// `pi(x)` written directly as `pi^i_v = psi(2 x^j_v - 1)`; kept for cross-checks.
pub fn pi_map_direct(x: &OccupationState, params: &RepulsionParams) -> OccupationState {
    let beta = params.beta();
    let p = |v: f64| logistic(beta, 2.0 * v - 1.0);
    OccupationState([p(x.0[X2L]), p(x.0[X2R]), p(x.0[X1L]), p(x.0[X1R])])
}

/// Left/right transition counts per walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct TransitionCounts {
    pub left: [u64; 2],
    pub right: [u64; 2],
}

impl TransitionCounts {
    /// From `(l1, r1, l2, r2)`.
    pub const fn from_array(c: [u64; 4]) -> Self {
        Self {
            left: [c[0], c[2]],
            right: [c[1], c[3]],
        }
    }

    pub const fn to_array(&self) -> [u64; 4] {
        [self.left[0], self.right[0], self.left[1], self.right[1]]
    }

    pub fn steps(&self, walk: usize) -> u64 {
        self.left[walk] + self.right[walk]
    }

    pub fn net(&self, walk: usize) -> i64 {
        self.right[walk] as i64 - self.left[walk] as i64
    }
}

/// Prescribed prefix before the repelling law takes over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct InitialHistory {
    counts: TransitionCounts,
    start: [i64; 2],
}

impl InitialHistory {
    pub fn new(counts: [u64; 4], start: [i64; 2]) -> Result<Self> {
        let counts = TransitionCounts::from_array(counts);
        if counts.steps(0) == 0 || counts.steps(0) != counts.steps(1) {
            return Err(Error::InvalidHistory);
        }
        Ok(Self { counts, start })
    }

    pub fn counts(&self) -> TransitionCounts {
        self.counts
    }

    pub fn start(&self) -> [i64; 2] {
        self.start
    }

    /// Length `n0` of the prefix.
    pub fn len(&self) -> u64 {
        self.counts.steps(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Positions after the prefix, `S_{n0}`.
    pub fn positions(&self) -> [i64; 2] {
        [
            self.start[0] + self.counts.net(0),
            self.start[1] + self.counts.net(1),
        ]
    }
}

impl Default for InitialHistory {
    /// One right step per walk from the origin.
    fn default() -> Self {
        Self {
            counts: TransitionCounts::from_array([0, 1, 0, 1]),
            start: [0, 0],
        }
    }
}

/// Positions and exact transition counts of both walks at step `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WalkPairState {
    n: u64,
    start: [i64; 2],
    positions: [i64; 2],
    counts: TransitionCounts,
}

impl WalkPairState {
    pub fn new(history: &InitialHistory) -> Self {
        Self {
            n: history.len(),
            start: history.start(),
            positions: history.positions(),
            counts: history.counts(),
        }
    }

    #[inline]
    pub fn n(&self) -> u64 {
        self.n
    }

    #[inline]
    pub fn positions(&self) -> [i64; 2] {
        self.positions
    }

    pub fn start(&self) -> [i64; 2] {
        self.start
    }

    pub fn counts(&self) -> TransitionCounts {
        self.counts
    }

    /// `S^i_n - S^i_0`.
    #[inline]
    pub fn displacement(&self, walk: usize) -> i64 {
        self.positions[walk] - self.start[walk]
    }

    /// Proportions `X(n)`: counts divided by `n`.
    pub fn occupation(&self) -> OccupationState {
        let n = self.n as f64;
        let c = self.counts.to_array();
        OccupationState([
            c[0] as f64 / n,
            c[1] as f64 / n,
            c[2] as f64 / n,
            c[3] as f64 / n,
        ])
    }

    /// Probabilities `(pi^1_r, pi^2_r)` of a right step from this state.
    #[inline]
    pub fn right_probabilities(&self, params: &RepulsionParams) -> [f64; 2] {
        let pi = pi_map(&self.occupation(), params);
        [pi.right(0), pi.right(1)]
    }

    /// Moves both walks one step: walk `i` goes right iff `draws[i] < pi^i_r(X(n))`.
    /// Returns the right-step probabilities that were used.
    #[inline]
    pub fn advance(&mut self, params: &RepulsionParams, draws: [f64; 2]) -> [f64; 2] {
        let p_right = self.right_probabilities(params);
        for walk in 0..2 {
            if draws[walk] < p_right[walk] {
                self.counts.right[walk] += 1;
                self.positions[walk] += 1;
            } else {
                self.counts.left[walk] += 1;
                self.positions[walk] -= 1;
            }
        }
        self.n += 1;
        p_right
    }

    pub fn step(&self, params: &RepulsionParams, draws: [f64; 2]) -> Self {
        let mut next = *self;
        next.advance(params, draws);
        next
    }

    /// Transition indicators `xi(n)` leading from `self` to `next`.
    fn transition_to(&self, next: &Self) -> Result<[f64; 4]> {
        if next.n != self.n + 1 || next.start != self.start {
            return Err(Error::NotSuccessor);
        }
        let mut xi = [0.0; 4];
        for walk in 0..2 {
            let dl = next.counts.left[walk].checked_sub(self.counts.left[walk]);
            let dr = next.counts.right[walk].checked_sub(self.counts.right[walk]);
            let dpos = next.positions[walk] - self.positions[walk];
            match (dl, dr, dpos) {
                (Some(1), Some(0), -1) => xi[2 * walk] = 1.0,
                (Some(0), Some(1), 1) => xi[2 * walk + 1] = 1.0,
                _ => return Err(Error::NotSuccessor),
            }
        }
        Ok(xi)
    }
}

/// Martingale increment `U_n = xi(n) - pi(X(n))` realized between two states.
pub fn noise_realization(
    before: &WalkPairState,
    after: &WalkPairState,
    params: &RepulsionParams,
) -> Result<TangentVector> {
    let xi = before.transition_to(after)?;
    let pi = pi_map(&before.occupation(), params);
    Ok(TangentVector(core::array::from_fn(|k| xi[k] - pi.0[k])))
}
