//! Collective first and second moments, and the Wineland squeezing parameter.

use crate::error::{Error, Result};
use crate::params::SpinAxis;

/// States that can report `<S>` and `<S_n^2>`.
pub trait CollectiveMoments {
    fn particle_count(&self) -> usize;
    fn mean_spin(&self) -> [f64; 3];
    fn second_moment(&self, axis: &SpinAxis) -> f64;

    fn variance(&self, axis: &SpinAxis) -> f64 {
        let mean = axis.dot(self.mean_spin());
        self.second_moment(axis) - mean * mean
    }
}

/// Orthonormal pair spanning the plane perpendicular to `v` (assumed unit).
fn perpendicular_basis(v: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    // pick the coordinate axis least aligned with v
    let abs = v.map(f64::abs);
    let seed = if abs[0] <= abs[1] && abs[0] <= abs[2] {
        [1.0, 0.0, 0.0]
    } else if abs[1] <= abs[2] {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let d: f64 = seed.iter().zip(&v).map(|(a, b)| a * b).sum();
    let mut e1 = [seed[0] - d * v[0], seed[1] - d * v[1], seed[2] - d * v[2]];
    let norm = e1.iter().map(|x| x * x).sum::<f64>().sqrt();
    e1.iter_mut().for_each(|x| *x /= norm);
    let e2 = [
        v[1] * e1[2] - v[2] * e1[1],
        v[2] * e1[0] - v[0] * e1[2],
        v[0] * e1[1] - v[1] * e1[0],
    ];
    (e1, e2)
}

fn axis_of(v: [f64; 3]) -> SpinAxis {
    SpinAxis::normalized(v[0], v[1], v[2]).expect("perpendicular basis vectors are nonzero")
}

/// `xi^2 = N min_perp Var(S_perp) / |<S>|^2`, minimized over directions
/// perpendicular to the mean spin.
pub fn squeezing_parameter<S: CollectiveMoments + ?Sized>(state: &S) -> Result<f64> {
    let mean = state.mean_spin();
    let len = mean.iter().map(|x| x * x).sum::<f64>().sqrt();
    if len < 1e-9 {
        return Err(Error::VanishingMeanSpin);
    }
    let unit = mean.map(|x| x / len);
    let (e1, e2) = perpendicular_basis(unit);
    let diag: [f64; 3] = std::array::from_fn(|i| (e1[i] + e2[i]) / 2f64.sqrt());
    // <S_perp> = 0 on this plane, so second moments are variances
    let c11 = state.second_moment(&axis_of(e1));
    let c22 = state.second_moment(&axis_of(e2));
    let c12 = state.second_moment(&axis_of(diag)) - 0.5 * (c11 + c22);
    let half_trace = 0.5 * (c11 + c22);
    let radius = (0.25 * (c11 - c22).powi(2) + c12 * c12).sqrt();
    let min_var = (half_trace - radius).max(0.0);
    Ok(state.particle_count() as f64 * min_var / (len * len))
}
