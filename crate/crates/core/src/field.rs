//! The mean-field vector field `F(x) = -x + pi(x)` and its linearization.

use nalgebra::{Complex, Matrix4, Schur, Vector4};

use crate::error::{Error, Result};
use crate::params::RepulsionParams;
use crate::walk::{pi_map, OccupationState, TangentVector, X1L, X1R, X2L, X2R};

/// Real parts within this distance of zero count as non-hyperbolic.
pub const HYPERBOLICITY_TOL: f64 = 1e-9;

/// Value of `F`, a tangent vector at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldValue(pub [f64; 4]);

impl FieldValue {
    pub fn l1_norm(&self) -> f64 {
        self.0.iter().map(|v| v.abs()).sum()
    }

    pub fn as_tangent(&self) -> TangentVector {
        TangentVector(self.0)
    }
}

pub type Jacobian = [[f64; 4]; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stability {
    LinearlyStable,
    LinearlyUnstable,
    NonHyperbolic,
}

impl Stability {
    pub fn classify(eigenvalues: &[Complex<f64>]) -> Self {
        if eigenvalues.iter().any(|z| z.re.abs() <= HYPERBOLICITY_TOL) {
            Stability::NonHyperbolic
        } else if eigenvalues.iter().all(|z| z.re < 0.0) {
            Stability::LinearlyStable
        } else {
            Stability::LinearlyUnstable
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Stability::LinearlyStable => "linearly-stable",
            Stability::LinearlyUnstable => "linearly-unstable",
            Stability::NonHyperbolic => "non-hyperbolic",
        }
    }
}

/// Eigenvalues of a Jacobian, sorted by real then imaginary part, and their verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: [Complex<f64>; 4],
    pub stability: Stability,
}

impl SpectrumReport {
    pub fn from_eigenvalues(mut eigenvalues: [Complex<f64>; 4]) -> Self {
        eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let stability = Stability::classify(&eigenvalues);
        Self {
            eigenvalues,
            stability,
        }
    }

    fn from_real(values: [f64; 4]) -> Self {
        Self::from_eigenvalues(values.map(|re| Complex::new(re, 0.0)))
    }

    pub fn max_real_part(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest eigenvalue distance after sorting both spectra.
    pub fn max_deviation(&self, other: &Self) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&other.eigenvalues)
            .map(|(a, b)| libm::hypot(a.re - b.re, a.im - b.im))
            .fold(0.0, f64::max)
    }
}

/// `F(x) = -x + pi(x)`.
pub fn field(x: &OccupationState, params: &RepulsionParams) -> FieldValue {
    let pi = pi_map(x, params);
    FieldValue(core::array::from_fn(|k| pi.0[k] - x.0[k]))
}

/// Coupling strengths `beta * pi^i_l * pi^i_r`, one per walk.
fn couplings(x: &OccupationState, params: &RepulsionParams) -> [f64; 2] {
    let pi = pi_map(x, params);
    let b = params.beta();
    [b * pi.0[X1L] * pi.0[X1R], b * pi.0[X2L] * pi.0[X2R]]
}

/// Analytic Jacobian `dF^i_k / dx^j_s`, treating the four coordinates as free.
pub fn jacobian(x: &OccupationState, params: &RepulsionParams) -> Jacobian {
    let [c1, c2] = couplings(x, params);
    let mut j = [[0.0; 4]; 4];
    for (k, row) in j.iter_mut().enumerate() {
        row[k] = -1.0;
    }
    j[X1L][X2L] = -c1;
    j[X1L][X2R] = c1;
    j[X1R][X2L] = c1;
    j[X1R][X2R] = -c1;
    j[X2L][X1L] = -c2;
    j[X2L][X1R] = c2;
    j[X2R][X1L] = c2;
    j[X2R][X1R] = -c2;
    j
}

/// Jacobian of the planar reduction `(x1_l, x2_l) -> (F1_l, F2_l)`.
pub fn planar_jacobian(x: &OccupationState, params: &RepulsionParams) -> [[f64; 2]; 2] {
    let [c1, c2] = couplings(x, params);
    [[-1.0, -2.0 * c1], [-2.0 * c2, -1.0]]
}

/// Divergence of the planar field; identically `-2`.
pub fn divergence(x: &OccupationState, params: &RepulsionParams) -> f64 {
    let j = planar_jacobian(x, params);
    j[0][0] + j[1][1]
}

/// Eigenvalues of an arbitrary 4x4 matrix from a dense real Schur decomposition,
/// or `None` if no attempt converges.
///
/// The real Schur iteration can stall on matrices with repeated eigenvalues,
/// so a stalled attempt is retried on orthogonally similar matrices
/// `Q M Q^T` built from fixed Householder reflections.
pub fn numeric_spectrum(matrix: &Jacobian) -> Option<SpectrumReport> {
    const SCHUR_ITERATIONS: usize = 2_000;
    const REFLECTIONS: [[f64; 4]; 4] = [
        [0.0; 4],
        [0.6, -0.3, 0.5, 0.2],
        [0.1, 0.7, -0.2, 0.4],
        [-0.5, 0.2, 0.3, 0.8],
    ];
    let m = Matrix4::from_fn(|i, k| matrix[i][k]);
    for v in REFLECTIONS {
        let v = Vector4::from(v);
        let q = if v.norm_squared() == 0.0 {
            Matrix4::identity()
        } else {
            Matrix4::identity() - v * v.transpose() * (2.0 / v.norm_squared())
        };
        if let Some(schur) = Schur::try_new(q * m * q.transpose(), f64::EPSILON, SCHUR_ITERATIONS) {
            let ev = schur.complex_eigenvalues();
            return Some(SpectrumReport::from_eigenvalues([ev[0], ev[1], ev[2], ev[3]]));
        }
    }
    None
}

/// Closed-form spectrum at any point: `-1, -1, -1 +- 2 sqrt(c1 c2)`.
///
/// The off-diagonal blocks are rank one, so the nontrivial pair solves
/// `(lambda + 1)^2 = 4 c1 c2`.
pub fn spectrum(x: &OccupationState, params: &RepulsionParams) -> SpectrumReport {
    let [c1, c2] = couplings(x, params);
    let r = 2.0 * libm::sqrt(c1 * c2);
    SpectrumReport::from_real([-1.0, -1.0, -1.0 - r, -1.0 + r])
}

/// Spectrum at the center `(1/2, 1/2, 1/2, 1/2)`: `-1, -1, -1 - beta/2, -1 + beta/2`.
pub fn spectrum_at_center(params: &RepulsionParams) -> SpectrumReport {
    let half = params.beta() / 2.0;
    SpectrumReport::from_real([-1.0, -1.0, -1.0 - half, -1.0 + half])
}

/// Off-diagonal Jacobian magnitude at `(w, 1-w, 1-w, w)`.
pub fn h(w: f64, params: &RepulsionParams) -> f64 {
    let b = params.beta();
    b / (2.0 + 2.0 * libm::cosh(b - 2.0 * w * b))
}

/// Spectrum at the asymmetric equilibrium `(w, 1-w, 1-w, w)` (and its swap).
pub fn spectrum_at_asymmetric(w: f64, params: &RepulsionParams) -> Result<SpectrumReport> {
    if !params.is_supercritical() {
        return Err(Error::Subcritical {
            beta: params.beta(),
        });
    }
    if !(0.0..0.5).contains(&w) {
        return Err(Error::Domain { what: "w", value: w });
    }
    let two_h = 2.0 * h(w, params);
    Ok(SpectrumReport::from_real([-1.0, -1.0, -1.0 - two_h, -1.0 + two_h]))
}

/// Outcome of the positive-part excitation test at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExcitationCheck {
    /// `E[<theta, U_n>^+ | X(n) = x]`, exact.
    pub q: f64,
    /// `(min pi)^3 / 2`.
    pub s: f64,
    pub ok: bool,
}

/// Exact `E[<theta, U>^+]` at `x` over the four joint step outcomes, compared
/// with the lower bound `s(x) = (min_{i,v} pi^i_v(x))^3 / 2`.
pub fn excitation_bound_check(
    x: &OccupationState,
    theta: &TangentVector,
    params: &RepulsionParams,
) -> Result<ExcitationCheck> {
    if !theta.is_tangent(1e-12) || (theta.l1_norm() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidTangent);
    }
    let pi = pi_map(x, params);
    let mean_part = theta.dot(&pi.0);
    let mut q = 0.0;
    for v1 in [X1L, X1R] {
        for v2 in [X2L, X2R] {
            let prob = pi.0[v1] * pi.0[v2];
            let projection = theta.0[v1] + theta.0[v2] - mean_part;
            q += prob * projection.max(0.0);
        }
    }
    let min_pi = pi.0.iter().copied().fold(f64::INFINITY, f64::min);
    let s = 0.5 * min_pi * min_pi * min_pi;
    Ok(ExcitationCheck { q, s, ok: q >= s })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beta(b: f64) -> RepulsionParams {
        RepulsionParams::new(b).unwrap()
    }

    #[test]
    fn field_examples() {
        assert_eq!(field(&OccupationState::CENTER, &beta(3.0)), FieldValue([0.0; 4]));
        let x = OccupationState([0.3, 0.7, 0.6, 0.4]);
        let f0 = field(&x, &beta(0.0));
        for (got, want) in f0.0.iter().zip([0.2, -0.2, -0.1, 0.1]) {
            assert!((got - want).abs() < 1e-15);
        }
        let f1 = field(&x, &beta(1.0));
        assert!((f1.0[X1L] - 0.150166002687522102543077704412).abs() < 1e-15);
    }

    #[test]
    fn jacobian_at_center_matches_displayed_matrix() {
        let b = 3.0;
        let j = jacobian(&OccupationState::CENTER, &beta(b));
        let q = b / 4.0;
        let expected = [
            [-1.0, 0.0, -q, q],
            [0.0, -1.0, q, -q],
            [-q, q, -1.0, 0.0],
            [q, -q, 0.0, -1.0],
        ];
        assert_eq!(j, expected);
    }

    #[test]
    fn jacobian_at_symmetric_pair_uses_h() {
        let p = beta(3.0);
        for w in [0.07, 0.2, 0.5] {
            let j = jacobian(&OccupationState::symmetric_pair(w), &p);
            let hw = h(w, &p);
            assert!((j[X1L][X2R] - hw).abs() < 1e-15);
            assert!((j[X2L][X1L] + hw).abs() < 1e-15);
        }
        assert!((h(0.5, &p) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn center_spectrum_labels() {
        let s1 = spectrum_at_center(&beta(1.0));
        assert_eq!(s1.eigenvalues.map(|z| z.re), [-1.5, -1.0, -1.0, -0.5]);
        assert_eq!(s1.stability, Stability::LinearlyStable);
        let s4 = spectrum_at_center(&beta(4.0));
        assert_eq!(s4.eigenvalues.map(|z| z.re), [-3.0, -1.0, -1.0, 1.0]);
        assert_eq!(s4.stability, Stability::LinearlyUnstable);
        let s2 = spectrum_at_center(&beta(2.0));
        assert_eq!(s2.max_real_part(), 0.0);
        assert_eq!(s2.stability, Stability::NonHyperbolic);
    }

    #[test]
    fn asymmetric_spectrum_requires_supercritical() {
        assert!(matches!(
            spectrum_at_asymmetric(0.1, &beta(2.0)),
            Err(Error::Subcritical { .. })
        ));
        assert!(spectrum_at_asymmetric(0.1, &beta(1.0)).is_err());
    }

    #[test]
    fn numeric_spectrum_at_center() {
        for b in [0.0, 0.5, 1.0, 3.0, 8.0] {
            let num = numeric_spectrum(&jacobian(&OccupationState::CENTER, &beta(b))).unwrap();
            assert!(num.max_deviation(&spectrum_at_center(&beta(b))) < 1e-9);
        }
    }

    #[test]
    fn divergence_is_minus_two() {
        for (x, b) in [
            (OccupationState::CENTER, 1.0),
            (OccupationState([0.2, 0.8, 0.9, 0.1]), 0.0),
            (OccupationState([0.1, 0.9, 0.8, 0.2]), 5.0),
        ] {
            assert_eq!(divergence(&x, &beta(b)), -2.0);
        }
    }

    #[test]
    fn excitation_at_center() {
        let theta = TangentVector([0.5, -0.5, 0.0, 0.0]);
        let c = excitation_bound_check(&OccupationState::CENTER, &theta, &beta(4.0)).unwrap();
        assert_eq!(c.q, 0.25);
        assert_eq!(c.s, 0.0625);
        assert!(c.ok);
    }

    #[test]
    fn excitation_rejects_bad_direction() {
        let x = OccupationState::CENTER;
        let p = beta(3.0);
        assert_eq!(
            excitation_bound_check(&x, &TangentVector([0.5, 0.5, 0.0, 0.0]), &p),
            Err(Error::InvalidTangent)
        );
        assert_eq!(
            excitation_bound_check(&x, &TangentVector([1.0, -1.0, 0.0, 0.0]), &p),
            Err(Error::InvalidTangent)
        );
    }
}
