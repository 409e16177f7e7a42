//! Two-dimensional states described by a complete set of three mutually
//! complementary binary measurements.
//!
//! A state is the probability 6-vector `(p_x, 1-p_x, p_y, 1-p_y, p_z, 1-p_z)`;
//! equivalently its mean-value vector `m = (2p_x-1, 2p_y-1, 2p_z-1)`.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{self, EntropyMeasure, PROB_TOL};

/// Tolerance on `|m| ≤ 1` for physical states.
pub const PHYSICAL_TOL: f64 = 1e-9;
pub const DEFAULT_PURITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanValueVector(pub Vector3<f64>);

impl MeanValueVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vector3::new(x, y, z))
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_physical(&self) -> bool {
        self.norm() <= 1.0 + PHYSICAL_TOL
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitState {
    p: [f64; 6],
}

impl QubitState {
    /// Checked constructor: sector sums, entry ranges and physicality.
    pub fn new(p: [f64; 6]) -> Result<Self> {
        let s = Self::from_sectors(p)?;
        if let Some(bad) = p.iter().find(|&&x| !(-PROB_TOL..=1.0 + PROB_TOL).contains(&x)) {
            return Err(Error::InvalidState(format!("probability {bad} outside [0, 1]")));
        }
        let norm = s.mean().norm();
        if norm > 1.0 + PHYSICAL_TOL {
            return Err(Error::NonPhysical(norm));
        }
        Ok(s)
    }

    /// Only requires each sector pair to sum to one. Entries may leave [0, 1]
    /// and `|m|` may exceed one; post-selected pseudo-states of non-positive
    /// operators are represented this way.
    pub fn from_sectors(p: [f64; 6]) -> Result<Self> {
        if let Some(bad) = p.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidState(format!("non-finite entry {bad}")));
        }
        for (u, pair) in p.chunks_exact(2).enumerate() {
            let sum = pair[0] + pair[1];
            if (sum - 1.0).abs() > PROB_TOL {
                return Err(Error::InvalidState(format!("sector {u} sums to {sum}")));
            }
        }
        Ok(Self { p })
    }

    pub fn maximally_mixed() -> Self {
        Self { p: [0.5; 6] }
    }

    pub fn as_array(&self) -> &[f64; 6] {
        &self.p
    }

    /// Probability of the first outcome along axis `u` (0 = x, 1 = y, 2 = z).
    pub fn probability(&self, u: usize) -> f64 {
        self.p[2 * u]
    }

    pub fn mean(&self) -> MeanValueVector {
        mean_from_probabilities(self)
    }

    pub fn in_unit_range(&self) -> bool {
        self.p.iter().all(|&x| (-PROB_TOL..=1.0 + PROB_TOL).contains(&x))
    }

    pub fn is_physical(&self) -> bool {
        self.in_unit_range() && self.mean().is_physical()
    }
}

/// Three mutually complementary measurement axes in mean-value space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplementaryFrame {
    /// Rows are the axes `u_x`, `u_y`, `u_z`.
    axes: Matrix3<f64>,
}

impl ComplementaryFrame {
    pub fn new(ux: Vector3<f64>, uy: Vector3<f64>, uz: Vector3<f64>) -> Result<Self> {
        Self::from_rows(Matrix3::from_rows(&[ux.transpose(), uy.transpose(), uz.transpose()]))
    }

    pub fn from_rows(axes: Matrix3<f64>) -> Result<Self> {
        let dev = (axes * axes.transpose() - Matrix3::identity()).amax();
        if !(dev <= 1e-9) {
            return Err(Error::NotOrthonormal(dev));
        }
        Ok(Self { axes })
    }

    pub fn canonical() -> Self {
        Self { axes: Matrix3::identity() }
    }

    pub fn axis(&self, u: usize) -> Vector3<f64> {
        self.axes.row(u).transpose()
    }

    pub fn axes(&self) -> &Matrix3<f64> {
        &self.axes
    }

    /// +1 for proper frames, -1 for reflected ones.
    pub fn determinant(&self) -> f64 {
        self.axes.determinant()
    }
}

/// `p_u = (1 + m·u)/2` for each axis of the frame.
pub fn probabilities_from_mean(m: &MeanValueVector, frame: &ComplementaryFrame) -> Result<QubitState> {
    let norm = m.norm();
    if !(norm <= 1.0 + PHYSICAL_TOL) {
        return Err(Error::NonPhysical(norm));
    }
    let mut p = [0.0; 6];
    for u in 0..3 {
        let pu = 0.5 * (1.0 + m.0.dot(&frame.axis(u)));
        p[2 * u] = pu;
        p[2 * u + 1] = 1.0 - pu;
    }
    Ok(QubitState { p })
}

pub fn mean_from_probabilities(s: &QubitState) -> MeanValueVector {
    MeanValueVector::new(2.0 * s.p[0] - 1.0, 2.0 * s.p[2] - 1.0, 2.0 * s.p[4] - 1.0)
}

/// Total uncertainty over the three sectors of `s`.
///
/// States outside [0, 1] are evaluated with the literal formula, which is a
/// polynomial for integer α; for other α such states are rejected.
pub fn total_uncertainty_state(s: &QubitState, m: &EntropyMeasure) -> Result<f64> {
    if s.in_unit_range() {
        return measures::total_uncertainty(&[s.p[0], s.p[2], s.p[4]], m);
    }
    let total: f64 = s.p.chunks_exact(2).map(|pair| measures::entropy_of_slice(pair, m)).sum();
    if total.is_finite() {
        Ok(total)
    } else {
        Err(Error::InvalidState(format!(
            "entropy of degree {} undefined for out-of-range probabilities",
            m.alpha()
        )))
    }
}

pub fn is_pure(s: &QubitState, tol: f64) -> bool {
    (s.mean().norm() - 1.0).abs() <= tol
}

/// Probability of the `+` outcome along an axis at angle `theta` to the
/// mean-value vector of a pure state.
pub fn malus_probability(theta: f64) -> f64 {
    let c = (0.5 * theta).cos();
    c * c
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        let n = v.norm();
        if n > 1e-12 {
            return v / n;
        }
    }
}

/// Pure states are uniform on the unit sphere, mixed states uniform in the ball.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, kind: StateKind) -> QubitState {
    let dir = random_unit_vector(rng);
    let m = match kind {
        StateKind::Pure => dir,
        StateKind::Mixed => dir * rng.random::<f64>().cbrt(),
    };
    probabilities_from_mean(&MeanValueVector(m), &ComplementaryFrame::canonical())
        .expect("sampled mean vector lies in the unit ball")
}
