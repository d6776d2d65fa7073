//! Pure states on the symmetric Dicke manifold.
//!
//! Amplitudes are indexed by `k = N/2 - M` (number of flipped spins), so
//! `amps[0]` is the all-up state. This ordering is used by every module.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::math::{binomial, ln_fact};
use crate::moments::CollectiveMoments;
use crate::params::{ModelParams, SpinAxis};
use crate::spectrum::{MqcSpectrum, Source};
use crate::spin;

#[derive(Debug, Clone, PartialEq)]
pub struct DickeState {
    n: usize,
    amps: Vec<C64>,
}

impl DickeState {
    /// Normalizes `amps` (length `N + 1`).
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidParticleCount(amps.len().saturating_sub(1)));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter("state vector has zero norm".into()));
        }
        let n = amps.len() - 1;
        Ok(Self { n, amps: amps.into_iter().map(|a| a / norm).collect() })
    }

    /// `|up>^N`.
    pub fn all_up(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParticleCount(n));
        }
        let mut amps = vec![C64::new(0.0, 0.0); n + 1];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Coherent spin state `(sin(theta/2)|up> + e^{i varphi} cos(theta/2)|down>)^N`.
    pub fn coherent(n: usize, theta: f64, varphi: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParticleCount(n));
        }
        let (s, c) = ((theta / 2.0).sin(), (theta / 2.0).cos());
        let amps = (0..=n)
            .map(|k| {
                let mag = binomial(n as i64, k as i64).sqrt() * s.powi((n - k) as i32) * c.powi(k as i32);
                C64::from_polar(mag, k as f64 * varphi)
            })
            .collect();
        Self::from_amplitudes(amps)
    }

    /// `(|up>^N + |down>^N) / sqrt(2)`.
    pub fn ghz(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParticleCount(n));
        }
        let mut amps = vec![C64::new(0.0, 0.0); n + 1];
        amps[0] = C64::new(1.0, 0.0);
        amps[n] = C64::new(1.0, 0.0);
        Self::from_amplitudes(amps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &DickeState) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &DickeState) -> f64 {
        self.inner(other).norm_sqr()
    }

    fn check_n(&self, n: usize) -> Result<()> {
        if self.n != n {
            return Err(Error::DimensionMismatch { expected: n, got: self.n });
        }
        Ok(())
    }

    fn vector(&self) -> DVector<C64> {
        DVector::from_column_slice(&self.amps)
    }

    fn with_vector(&self, v: DVector<C64>) -> Self {
        Self { n: self.n, amps: v.iter().copied().collect() }
    }

    /// Applies `exp(-i phi S_n)`.
    pub fn rotate(&self, axis: &SpinAxis, phi: f64) -> DickeState {
        if phi == 0.0 {
            return self.clone();
        }
        Rotation::new(self.n, axis).apply(self, phi)
    }

    /// Amplitudes in the eigenbasis of `S_n`, ordered by eigenvalue
    /// `N/2, N/2 - 1, ...`.
    pub fn amplitudes_along(&self, axis: &SpinAxis) -> Vec<C64> {
        // U = exp(-i alpha S_z) exp(-i theta S_y) carries S_z onto S_n; apply U^dagger.
        let (theta, alpha) = axis.angles();
        let aligned = self
            .rotate(&SpinAxis::Z, -alpha)
            .rotate(&SpinAxis::Y, -theta);
        aligned.amps
    }

    /// Multiple-quantum intensities with respect to `S_n`.
    pub fn mqc_spectrum(&self, axis: &SpinAxis) -> MqcSpectrum {
        let probs: Vec<f64> = self.amplitudes_along(axis).iter().map(|a| a.norm_sqr()).collect();
        let n = self.n;
        // rho_m collects |M><M'| with M - M' = m, i.e. k' - k = m
        MqcSpectrum::from_fn(n, Source::Direct, |m| {
            let shift = m.unsigned_abs() as usize;
            (0..=n - shift).map(|k| probs[k] * probs[k + shift]).sum()
        })
    }

    /// Quantum Fisher information of a pure state, `4 Var(S_n)`.
    pub fn qfi(&self, axis: &SpinAxis) -> f64 {
        let sv = spin::apply_sn(axis, &self.amps);
        let second: f64 = sv.iter().map(|a| a.norm_sqr()).sum();
        let first: f64 = self.amps.iter().zip(&sv).map(|(a, b)| (a.conj() * b).re).sum();
        (4.0 * (second - first * first)).max(0.0)
    }

    /// Symmetrized spin covariance matrix `(<{S_a, S_b}>/2 - <S_a><S_b>)`.
    pub fn covariance(&self) -> [[f64; 3]; 3] {
        let axes = [SpinAxis::X, SpinAxis::Y, SpinAxis::Z];
        let sv: Vec<Vec<C64>> = axes.iter().map(|a| spin::apply_sn(a, &self.amps)).collect();
        let mean: Vec<f64> = sv
            .iter()
            .map(|v| self.amps.iter().zip(v).map(|(a, b)| (a.conj() * b).re).sum())
            .collect();
        let mut cov = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in 0..3 {
                let sym: f64 = sv[a].iter().zip(&sv[b]).map(|(u, v)| (u.conj() * v).re).sum();
                cov[a][b] = sym - mean[a] * mean[b];
            }
        }
        cov
    }
}

impl CollectiveMoments for DickeState {
    fn particle_count(&self) -> usize {
        self.n
    }

    fn mean_spin(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (slot, axis) in out.iter_mut().zip([SpinAxis::X, SpinAxis::Y, SpinAxis::Z]) {
            let sv = spin::apply_sn(&axis, &self.amps);
            *slot = self.amps.iter().zip(&sv).map(|(a, b)| (a.conj() * b).re).sum();
        }
        out
    }

    fn second_moment(&self, axis: &SpinAxis) -> f64 {
        spin::apply_sn(axis, &self.amps).iter().map(|a| a.norm_sqr()).sum()
    }
}

/// `exp(-i phi S_n)` on the Dicke manifold via the eigendecomposition of `S_n`.
#[derive(Debug, Clone)]
pub struct Rotation {
    vectors: DMatrix<C64>,
    values: DVector<f64>,
}

impl Rotation {
    pub fn new(n: usize, axis: &SpinAxis) -> Self {
        let eig = SymmetricEigen::new(spin::sn(n + 1, axis));
        Self { vectors: eig.eigenvectors, values: eig.eigenvalues }
    }

    pub fn apply(&self, state: &DickeState, phi: f64) -> DickeState {
        let mut c = self.vectors.ad_mul(&state.vector());
        for (ci, &l) in c.iter_mut().zip(self.values.iter()) {
            *ci *= C64::from_polar(1.0, -phi * l);
        }
        state.with_vector(&self.vectors * c)
    }
}

/// Cached eigendecomposition of the transverse-field Ising Hamiltonian
/// `H = -(J/N) S_x^2 - Omega S_z`; reused across evolution times.
#[derive(Debug, Clone)]
pub struct Propagator {
    params: ModelParams,
    vectors: DMatrix<f64>,
    energies: DVector<f64>,
}

impl Propagator {
    pub fn new(params: ModelParams) -> Self {
        let h = hamiltonian(&params);
        let eig = SymmetricEigen::new(h);
        Self { params, vectors: eig.eigenvectors, energies: eig.eigenvalues }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// `exp(-i H t)|psi>`; negative `t` runs the dynamics backward.
    pub fn evolve(&self, state: &DickeState, t: f64) -> Result<DickeState> {
        state.check_n(self.params.n)?;
        if t == 0.0 || (self.params.j == 0.0 && self.params.omega == 0.0) {
            return Ok(state.clone());
        }
        let v = state.vector();
        let mut c: DVector<C64> = DVector::from_iterator(
            v.len(),
            self.vectors.column_iter().map(|col| col.iter().zip(v.iter()).map(|(a, b)| b * *a).sum()),
        );
        for (ci, &e) in c.iter_mut().zip(self.energies.iter()) {
            *ci *= C64::from_polar(1.0, -e * t);
        }
        let out = DVector::from_iterator(
            v.len(),
            self.vectors.row_iter().map(|row| row.iter().zip(c.iter()).map(|(a, b)| b * *a).sum()),
        );
        Ok(state.with_vector(out))
    }
}

pub fn hamiltonian(params: &ModelParams) -> DMatrix<f64> {
    let dim = params.n + 1;
    let x = spin::sx(dim);
    let z = spin::sz(dim);
    &x * &x * (-params.j / params.n as f64) - z * params.omega
}

pub fn prepare_all_up(n: usize) -> Result<DickeState> {
    DickeState::all_up(n)
}

pub fn prepare_css(n: usize, theta: f64, varphi: f64) -> Result<DickeState> {
    DickeState::coherent(n, theta, varphi)
}

pub fn evolve_pure(state: &DickeState, params: &ModelParams, t: f64) -> Result<DickeState> {
    Propagator::new(*params).evolve(state, t)
}

pub fn rotate_pure(state: &DickeState, axis: &SpinAxis, phi: f64) -> DickeState {
    state.rotate(axis, phi)
}

pub fn mqc_direct_pure(state: &DickeState, axis: &SpinAxis) -> MqcSpectrum {
    state.mqc_spectrum(axis)
}

pub fn qfi_pure(state: &DickeState, axis: &SpinAxis) -> f64 {
    state.qfi(axis)
}

/// `I_m` of the equatorial coherent state, `(2N)! / (4^N (N-m)! (N+m)!)`.
pub fn css_spectrum_closed_form(n: usize, m: i64) -> Result<f64> {
    let abs = m.unsigned_abs() as usize;
    if abs > n {
        return Err(Error::OrderOutOfRange { n, m });
    }
    let n64 = n as u64;
    let ln = ln_fact(2 * n64)
        - n as f64 * 4f64.ln()
        - ln_fact(n64 - abs as u64)
        - ln_fact(n64 + abs as u64);
    Ok(ln.exp())
}
