//! Collective spin matrices on a spin-J multiplet, basis ordered by
//! `M = J, J-1, ..., -J` (index `k = J - M`).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::params::SpinAxis;

/// `<J, M+1| J_+ |J, M>` for the multiplet of dimension `dim = 2J + 1`,
/// indexed by the row `k` of the raised state (`k = 0 .. dim-2`).
fn raising_element(dim: usize, k: usize) -> f64 {
    let j = (dim as f64 - 1.0) / 2.0;
    let m = j - k as f64 - 1.0;
    (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

pub fn sz_diagonal(dim: usize) -> Vec<f64> {
    let j = (dim as f64 - 1.0) / 2.0;
    (0..dim).map(|k| j - k as f64).collect()
}

/// Real symmetric `J_x`.
pub fn sx(dim: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    for k in 0..dim.saturating_sub(1) {
        let v = 0.5 * raising_element(dim, k);
        m[(k, k + 1)] = v;
        m[(k + 1, k)] = v;
    }
    m
}

pub fn sz(dim: usize) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_vec(sz_diagonal(dim)))
}

/// Hermitian `n . J`.
pub fn sn(dim: usize, axis: &SpinAxis) -> DMatrix<C64> {
    let [nx, ny, nz] = axis.components();
    let mut m = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    let diag = sz_diagonal(dim);
    for k in 0..dim {
        m[(k, k)] = C64::new(nz * diag[k], 0.0);
    }
    for k in 0..dim.saturating_sub(1) {
        // <k| J_+ |k+1> = r, J_x = (J_+ + J_-)/2, J_y = (J_+ - J_-)/(2i)
        let r = raising_element(dim, k);
        let upper = C64::new(0.5 * nx * r, -0.5 * ny * r);
        m[(k, k + 1)] = upper;
        m[(k + 1, k)] = upper.conj();
    }
    m
}

/// `S_n |v>` without forming the matrix.
pub fn apply_sn(axis: &SpinAxis, v: &[C64]) -> Vec<C64> {
    let dim = v.len();
    let [nx, ny, nz] = axis.components();
    let diag = sz_diagonal(dim);
    let mut out: Vec<C64> = v.iter().zip(&diag).map(|(a, d)| a * (nz * d)).collect();
    for k in 0..dim.saturating_sub(1) {
        let r = raising_element(dim, k);
        let upper = C64::new(0.5 * nx * r, -0.5 * ny * r);
        out[k] += upper * v[k + 1];
        out[k + 1] += upper.conj() * v[k];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_half_matrices() {
        let x = sx(2);
        assert!((x[(0, 1)] - 0.5).abs() < 1e-15);
        let y = sn(2, &SpinAxis::Y);
        assert!((y[(0, 1)] - C64::new(0.0, -0.5)).norm() < 1e-15);
    }

    #[test]
    fn casimir_is_j_j_plus_one() {
        for dim in 1..8 {
            let j = (dim as f64 - 1.0) / 2.0;
            let x = sn(dim, &SpinAxis::X);
            let y = sn(dim, &SpinAxis::Y);
            let z = sn(dim, &SpinAxis::Z);
            let c = &x * &x + &y * &y + &z * &z;
            for k in 0..dim {
                assert!((c[(k, k)].re - j * (j + 1.0)).abs() < 1e-12);
            }
        }
    }
}
