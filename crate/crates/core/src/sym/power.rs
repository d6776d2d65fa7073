//! Induced action of a 2x2 linear substitution on degree-`d` polynomials.
//!
//! Coefficients are taken in scaled form `v_a = w_a / sqrt(binom(d, a))`
//! where `w_a` multiplies `y1^a y2^(d-a)`. In these coordinates a unitary
//! substitution acts unitarily, so the map is built from the Hermitian
//! generator instead of alternating binomial sums.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

pub type Mat2 = [[C64; 2]; 2];

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Tridiagonal representative of `x` on degree-`d` polynomials.
fn generator(x: &Mat2, d: usize) -> DMatrix<C64> {
    let mut g = DMatrix::zeros(d + 1, d + 1);
    for a in 0..=d {
        g[(a, a)] = x[0][0] * a as f64 + x[1][1] * (d - a) as f64;
        if a < d {
            let r = (((a + 1) * (d - a)) as f64).sqrt();
            g[(a, a + 1)] = x[1][0] * r;
            g[(a + 1, a)] = x[0][1] * r;
        }
    }
    g
}

/// Eigendecomposition of the Hermitian generator `i G(x)` for anti-Hermitian `x`.
#[derive(Debug, Clone)]
pub struct UnitaryFlow {
    vectors: DMatrix<C64>,
    values: Vec<f64>,
}

impl UnitaryFlow {
    pub fn new(x: &Mat2, d: usize) -> Self {
        let h = generator(x, d) * c(0.0, 1.0);
        let eig = SymmetricEigen::new(h);
        Self { vectors: eig.eigenvectors, values: eig.eigenvalues.iter().copied().collect() }
    }

    /// `exp(beta G(x))`.
    pub fn matrix(&self, beta: f64) -> DMatrix<C64> {
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= C64::from_polar(1.0, -beta * self.values[j]);
        }
        scaled * self.vectors.adjoint()
    }

    /// `exp(beta G(x)) v`, without forming the matrix.
    pub fn apply(&self, beta: f64, v: &[C64]) -> Vec<C64> {
        let mut coeffs: Vec<C64> = self
            .vectors
            .column_iter()
            .map(|col| col.iter().zip(v).map(|(a, b)| a.conj() * b).sum())
            .collect();
        for (ci, &l) in coeffs.iter_mut().zip(&self.values) {
            *ci *= C64::from_polar(1.0, -beta * l);
        }
        (0..v.len())
            .map(|i| coeffs.iter().enumerate().map(|(j, cj)| self.vectors[(i, j)] * cj).sum())
            .collect()
    }
}

/// Scaled-coordinate matrix of the substitution `m`, which must be a nonzero
/// multiple of a unitary.
pub fn symmetric_power(m: &Mat2, d: usize) -> DMatrix<C64> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let s = det.norm().sqrt();
    let gamma = det.arg() / 2.0;
    let phase = C64::from_polar(1.0 / s, -gamma);
    // v = m / (s e^{i gamma}) lies in SU(2): [[a, -b*], [b, a*]]
    let a = m[0][0] * phase;
    let b = m[1][0] * phase;
    let mut sv = [-b.im, b.re, -a.im];
    let sn = (sv[0] * sv[0] + sv[1] * sv[1] + sv[2] * sv[2]).sqrt();
    let half = sn.atan2(a.re);
    let k = if sn > 0.0 {
        half / sn
    } else {
        // v = +-1: any rotation axis works
        sv = [0.0, 0.0, 1.0];
        half
    };
    // log v = -i k (sv . sigma), plus i gamma for the phase
    let mi = c(0.0, -k);
    let x: Mat2 = [
        [mi * sv[2] + c(0.0, gamma), mi * c(sv[0], -sv[1])],
        [mi * c(sv[0], sv[1]), -mi * sv[2] + c(0.0, gamma)],
    ];
    UnitaryFlow::new(&x, d).matrix(1.0) * C64::new(s.powi(d as i32), 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::binomial;

    /// Expands (m11 y1 + m21 y2)^a (m12 y1 + m22 y2)^(d-a) directly.
    fn brute(m: &Mat2, d: usize) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(d + 1, d + 1);
        for a in 0..=d {
            // polynomial coefficients indexed by power of y1
            let mut poly = vec![C64::new(1.0, 0.0)];
            for step in 0..d {
                let (p1, p2) = if step < a { (m[0][0], m[1][0]) } else { (m[0][1], m[1][1]) };
                let mut next = vec![C64::new(0.0, 0.0); poly.len() + 1];
                for (i, &v) in poly.iter().enumerate() {
                    next[i + 1] += v * p1;
                    next[i] += v * p2;
                }
                poly = next;
            }
            let sa = binomial(d as i64, a as i64).sqrt();
            for (ap, &v) in poly.iter().enumerate() {
                out[(ap, a)] = v * sa / binomial(d as i64, ap as i64).sqrt();
            }
        }
        out
    }

    fn check(m: Mat2) {
        for d in 0..7 {
            let diff = (symmetric_power(&m, d) - brute(&m, d)).norm();
            assert!(diff < 1e-12, "d = {d}, diff = {diff}");
        }
    }

    #[test]
    fn matches_direct_expansion() {
        let h = 0.5f64.sqrt();
        check([[c(0.5, 0.0), c(0.5, 0.0)], [c(0.0, 0.5), c(0.0, -0.5)]]);
        check([[c(1.0, 0.0), c(0.0, -1.0)], [c(1.0, 0.0), c(0.0, 1.0)]]);
        check([[c(1.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(-1.0, 0.0)]]);
        check([[c(0.3f64.cos(), 0.0), c(0.3f64.sin(), 0.0)], [c(-0.3f64.sin(), 0.0), c(0.3f64.cos(), 0.0)]]);
        check([[c(h, 0.0), c(0.0, h)], [c(0.0, h), c(h, 0.0)]]);
        check([[c(-1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]]);
    }
}
