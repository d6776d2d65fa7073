//! Permutation-symmetric density matrices in the operator basis
//! `(n_z, n_+, n_-)`.
//!
//! A basis element is the sum, with unit weight, of all distinct tensor
//! strings containing `n_z` copies of `sigma_z`, `n_+` of
//! `sigma_+ = |up><down|`, `n_-` of `sigma_- = |down><up|` and identities on
//! the remaining `n_1` sites. Storage is block-contiguous in `(n_+, n_-)`
//! with `n_z` running fastest.

mod liouvillian;
pub(crate) mod power;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dicke::DickeState;
use crate::error::{Error, Result};
use crate::math::{binomial, dot_compensated, down_count_kernel, multinomial4};
use crate::moments::CollectiveMoments;
use crate::parallel;
use crate::params::SpinAxis;
use crate::spectrum::{MqcSpectrum, Source};

pub use liouvillian::{
    build_dissipator, build_interaction_blocks, evolve_sym, BlockLiouvillian, SymPropagator, Tridiagonal,
};
use power::{symmetric_power, Mat2, UnitaryFlow};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymBasisIndex {
    pub n_z: usize,
    pub n_plus: usize,
    pub n_minus: usize,
}

impl SymBasisIndex {
    pub fn new(n_z: usize, n_plus: usize, n_minus: usize) -> Self {
        Self { n_z, n_plus, n_minus }
    }

    pub fn n_one(&self, n: usize) -> usize {
        n - self.n_z - self.n_plus - self.n_minus
    }

    pub fn order(&self) -> i64 {
        self.n_plus as i64 - self.n_minus as i64
    }

    pub fn adjoint(&self) -> Self {
        Self { n_z: self.n_z, n_plus: self.n_minus, n_minus: self.n_plus }
    }
}

/// Offset table for triples `(p, q, r)` with `p + q + r <= N`, `r` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SymLayout {
    n: usize,
    offsets: Vec<usize>,
    len: usize,
    sqrt_binom: Vec<f64>,
}

impl SymLayout {
    pub fn new(n: usize) -> Self {
        let mut offsets = vec![usize::MAX; (n + 1) * (n + 1)];
        let mut len = 0;
        for p in 0..=n {
            for q in 0..=n - p {
                offsets[p * (n + 1) + q] = len;
                len += n - p - q + 1;
            }
        }
        let sqrt_binom = (0..=n)
            .flat_map(|d| (0..=n).map(move |a| binomial(d as i64, a as i64).sqrt()))
            .collect();
        Self { n, offsets, len, sqrt_binom }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn index(&self, p: usize, q: usize, r: usize) -> usize {
        debug_assert!(p + q + r <= self.n);
        self.offsets[p * (self.n + 1) + q] + r
    }

    pub fn position(&self, idx: SymBasisIndex) -> usize {
        self.index(idx.n_plus, idx.n_minus, idx.n_z)
    }

    /// `(p, q)` pairs in storage order.
    pub fn blocks(&self) -> Vec<(usize, usize)> {
        let n = self.n;
        (0..=n).flat_map(|p| (0..=n - p).map(move |q| (p, q))).collect()
    }

    /// All basis indices in storage order.
    pub fn indices(&self) -> impl Iterator<Item = SymBasisIndex> + '_ {
        let n = self.n;
        self.blocks()
            .into_iter()
            .flat_map(move |(p, q)| (0..=n - p - q).map(move |r| SymBasisIndex::new(r, p, q)))
    }

    fn sqrt_binom(&self, d: usize, a: usize) -> f64 {
        self.sqrt_binom[d * (self.n + 1) + a]
    }
}

/// Which pair of slots a two-variable substitution mixes.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Sectors {
    /// slots `p, q` at fixed `r`
    PQ,
    /// slots `p, r` at fixed `q`
    PR,
    /// the implicit slot and `r` at fixed `p, q`
    OneR,
}

/// Storage positions of each sector, ordered by the power of the first variable.
fn sectors(layout: &SymLayout, kind: Sectors) -> Vec<(usize, Vec<usize>)> {
    let n = layout.n;
    let mut out = Vec::new();
    match kind {
        Sectors::PQ => {
            for r in 0..=n {
                for d in 0..=n - r {
                    out.push((d, (0..=d).map(|a| layout.index(a, d - a, r)).collect()));
                }
            }
        }
        Sectors::PR => {
            for q in 0..=n {
                for d in 0..=n - q {
                    out.push((d, (0..=d).map(|a| layout.index(a, q, d - a)).collect()));
                }
            }
        }
        Sectors::OneR => {
            for (p, q) in layout.blocks() {
                let d = n - p - q;
                out.push((d, (0..=d).map(|a| layout.index(p, q, d - a)).collect()));
            }
        }
    }
    out
}

/// Applies `f` to the scaled coefficients of every sector.
pub(crate) fn transform_sectors<F>(layout: &SymLayout, coeffs: &[C64], kind: Sectors, f: F) -> Vec<C64>
where
    F: Fn(usize, &[C64]) -> Vec<C64> + Sync + Send,
{
    let secs = sectors(layout, kind);
    let results = parallel::map(&secs, |(d, idx)| {
        let v: Vec<C64> = idx.iter().enumerate().map(|(a, &i)| coeffs[i] * layout.sqrt_binom(*d, a)).collect();
        f(*d, &v)
    });
    let mut out = vec![ZERO; coeffs.len()];
    for ((d, idx), res) in secs.iter().zip(results) {
        for (a, (&i, x)) in idx.iter().zip(res).enumerate() {
            out[i] = x / layout.sqrt_binom(*d, a);
        }
    }
    out
}

fn matvec(m: &DMatrix<C64>, v: &[C64]) -> Vec<C64> {
    (m * DVector::from_column_slice(v)).iter().copied().collect()
}

// substitution matrices, rows = new variables, columns = old variables
const TO_XYZ: Mat2 = [[c_const(0.5, 0.0), c_const(0.5, 0.0)], [c_const(0.0, 0.5), c_const(0.0, -0.5)]];
const TO_ZPM: Mat2 = [[c_const(1.0, 0.0), c_const(0.0, -1.0)], [c_const(1.0, 0.0), c_const(0.0, 1.0)]];
const TO_UPDOWN: Mat2 = [[c_const(1.0, 0.0), c_const(1.0, 0.0)], [c_const(1.0, 0.0), c_const(-1.0, 0.0)]];
const FROM_UPDOWN: Mat2 = [[c_const(0.5, 0.0), c_const(0.5, 0.0)], [c_const(0.5, 0.0), c_const(-0.5, 0.0)]];
// d/dbeta of the y rotation acting on (x, z)
const Y_GENERATOR: Mat2 = [[c_const(0.0, 0.0), c_const(1.0, 0.0)], [c_const(-1.0, 0.0), c_const(0.0, 0.0)]];

const fn c_const(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Which basis [`basis_zpm_xyz`] maps into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisDirection {
    ToXyz,
    ToZpm,
}

/// Cached transforms for collective rotations at fixed `N`.
#[derive(Debug, Clone)]
pub struct SymRotator {
    layout: Arc<SymLayout>,
    to_xyz: Vec<DMatrix<C64>>,
    to_zpm: Vec<DMatrix<C64>>,
    y_flow: Vec<UnitaryFlow>,
}

impl SymRotator {
    pub fn new(n: usize) -> Self {
        Self::with_layout(Arc::new(SymLayout::new(n)))
    }

    fn with_layout(layout: Arc<SymLayout>) -> Self {
        let ds: Vec<usize> = (0..=layout.n).collect();
        let to_xyz = parallel::map(&ds, |&d| symmetric_power(&TO_XYZ, d));
        let to_zpm = parallel::map(&ds, |&d| symmetric_power(&TO_ZPM, d));
        let y_flow = parallel::map(&ds, |&d| UnitaryFlow::new(&Y_GENERATOR, d));
        Self { layout, to_xyz, to_zpm, y_flow }
    }

    pub fn n(&self) -> usize {
        self.layout.n
    }

    pub fn to_xyz(&self, coeffs: &[C64]) -> Vec<C64> {
        transform_sectors(&self.layout, coeffs, Sectors::PQ, |d, v| matvec(&self.to_xyz[d], v))
    }

    pub fn to_zpm(&self, coeffs: &[C64]) -> Vec<C64> {
        transform_sectors(&self.layout, coeffs, Sectors::PQ, |d, v| matvec(&self.to_zpm[d], v))
    }

    /// `exp(-i phi S_z)` in the `(z+-)` basis: a phase `e^{-i m phi}` per element.
    fn phase_z(&self, coeffs: &mut [C64], phi: f64) {
        if phi == 0.0 {
            return;
        }
        for (p, q) in self.layout.blocks() {
            let ph = C64::from_polar(1.0, -(p as f64 - q as f64) * phi);
            let start = self.layout.index(p, q, 0);
            for x in &mut coeffs[start..=start + self.layout.n - p - q] {
                *x *= ph;
            }
        }
    }

    /// `exp(-i beta S_y)` applied to `(z+-)` coefficients.
    fn rotate_y(&self, coeffs: &[C64], beta: f64) -> Vec<C64> {
        if beta == 0.0 {
            return coeffs.to_vec();
        }
        let xyz = self.to_xyz(coeffs);
        let rotated = transform_sectors(&self.layout, &xyz, Sectors::PR, |d, v| self.y_flow[d].apply(beta, v));
        self.to_zpm(&rotated)
    }

    fn check(&self, state: &SymmetricState) -> Result<()> {
        if state.n != self.layout.n {
            return Err(Error::DimensionMismatch { expected: self.layout.n, got: state.n });
        }
        Ok(())
    }

    /// `W rho W^dagger` with `W = exp(-i phi S_n)`.
    pub fn rotate(&self, state: &SymmetricState, axis: &SpinAxis, phi: f64) -> Result<SymmetricState> {
        self.check(state)?;
        if phi == 0.0 {
            return Ok(state.clone());
        }
        let (theta, alpha) = axis.angles();
        let mut c = state.coeffs.clone();
        if theta == 0.0 {
            self.phase_z(&mut c, phi);
        } else {
            // R_n(phi) = R_z(alpha) R_y(theta) R_z(phi) R_y(-theta) R_z(-alpha)
            self.phase_z(&mut c, -alpha);
            c = self.rotate_y(&c, -theta);
            self.phase_z(&mut c, phi);
            c = self.rotate_y(&c, theta);
            self.phase_z(&mut c, alpha);
        }
        Ok(state.with_coeffs(c))
    }

    /// Rotates the state so that `axis` becomes the z axis.
    pub fn align(&self, state: &SymmetricState, axis: &SpinAxis) -> Result<SymmetricState> {
        self.check(state)?;
        let (theta, alpha) = axis.angles();
        if theta == 0.0 {
            return Ok(state.clone());
        }
        let mut c = state.coeffs.clone();
        self.phase_z(&mut c, -alpha);
        Ok(state.with_coeffs(self.rotate_y(&c, -theta)))
    }

    pub fn mqc(&self, state: &SymmetricState, axis: &SpinAxis) -> Result<MqcSpectrum> {
        Ok(self.align(state, axis)?.mqc_z())
    }

    pub fn second_moment(&self, state: &SymmetricState, axis: &SpinAxis) -> Result<f64> {
        Ok(self.align(state, axis)?.observables().sz2)
    }
}

/// Every observable available in closed form in the symmetric basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymObservables {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
    /// probability of all spins up
    pub p0: f64,
    /// `pn[k]`: probability of exactly `k` spins down
    pub pn: Vec<f64>,
    pub sz2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricState {
    n: usize,
    layout: Arc<SymLayout>,
    coeffs: Vec<C64>,
}

impl SymmetricState {
    fn zeros(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParticleCount(n));
        }
        let layout = Arc::new(SymLayout::new(n));
        let coeffs = vec![ZERO; layout.len()];
        Ok(Self { n, layout, coeffs })
    }

    /// `|up><up|^N = 2^-N sum_{n_z} (n_z, 0, 0)`.
    pub fn all_up(n: usize) -> Result<Self> {
        let mut s = Self::zeros(n)?;
        let w = 0.5f64.powi(n as i32);
        for r in 0..=n {
            s.coeffs[r] = C64::new(w, 0.0);
        }
        Ok(s)
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        let mut s = Self::zeros(n)?;
        s.coeffs[0] = C64::new(0.5f64.powi(n as i32), 0.0);
        Ok(s)
    }

    pub fn from_coefficients(n: usize, coeffs: Vec<C64>) -> Result<Self> {
        let mut s = Self::zeros(n)?;
        if coeffs.len() != s.coeffs.len() {
            return Err(Error::DimensionMismatch { expected: s.coeffs.len(), got: coeffs.len() });
        }
        s.coeffs = coeffs;
        Ok(s)
    }

    /// `|psi><psi|` for a symmetric pure state.
    pub fn from_dicke(state: &DickeState) -> Result<Self> {
        let n = state.n();
        let s = Self::zeros(n)?;
        let amps = state.amplitudes();
        let norm: Vec<f64> = (0..=n).map(|k| binomial(n as i64, k as i64).sqrt()).collect();
        let mut unit = vec![ZERO; s.coeffs.len()];
        for idx in s.layout.indices() {
            // in the up/down basis r counts sites that are down on both sides
            let (p, q, down) = (idx.n_plus, idx.n_minus, idx.n_z);
            let (kx, ky) = (down + q, down + p);
            unit[s.layout.index(p, q, down)] = amps[kx] * amps[ky].conj() / (norm[kx] * norm[ky]);
        }
        Ok(s.with_coeffs(updown_to_zpm_raw(&s.layout, &unit)))
    }

    pub(crate) fn with_coeffs(&self, coeffs: Vec<C64>) -> Self {
        Self { n: self.n, layout: Arc::clone(&self.layout), coeffs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn layout(&self) -> &SymLayout {
        &self.layout
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, idx: SymBasisIndex) -> C64 {
        self.coeffs[self.layout.position(idx)]
    }

    fn c(&self, n_z: usize, p: usize, q: usize) -> C64 {
        if n_z + p + q > self.n {
            ZERO
        } else {
            self.coeffs[self.layout.index(p, q, n_z)]
        }
    }

    pub fn trace(&self) -> C64 {
        self.coeffs[0] * 2f64.powi(self.n as i32)
    }

    /// Largest `|c_a - conj(c_{a^dagger})|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.layout
            .indices()
            .map(|i| (self.coeff(i) - self.coeff(i.adjoint()).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Hilbert–Schmidt norm squared of one basis element.
    fn element_norm(n: usize, idx: SymBasisIndex) -> f64 {
        let n1 = idx.n_one(n);
        multinomial4(n1, idx.n_z, idx.n_plus, idx.n_minus) * 2f64.powi((n1 + idx.n_z) as i32)
    }

    /// `tr[self other]`.
    pub fn overlap(&self, other: &SymmetricState) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let acc: C64 = self
            .layout
            .indices()
            .map(|i| self.coeff(i) * other.coeff(i.adjoint()) * Self::element_norm(self.n, i))
            .sum();
        Ok(acc.re)
    }

    pub fn purity(&self) -> f64 {
        self.overlap(self).unwrap_or(0.0)
    }

    pub fn rotate(&self, axis: &SpinAxis, phi: f64) -> SymmetricState {
        if phi == 0.0 {
            return self.clone();
        }
        SymRotator::with_layout(Arc::clone(&self.layout))
            .rotate(self, axis, phi)
            .expect("rotator built for this state")
    }

    /// `I_m` with respect to `S_z`.
    pub fn mqc_z(&self) -> MqcSpectrum {
        let n = self.n;
        let mut values = vec![0.0; 2 * n + 1];
        for i in self.layout.indices() {
            let w = self.coeff(i).norm_sqr();
            if w != 0.0 {
                values[(i.order() + n as i64) as usize] += w * Self::element_norm(n, i);
            }
        }
        MqcSpectrum::new(n, values, Source::Direct).expect("length 2N + 1")
    }

    pub fn observables(&self) -> SymObservables {
        let n = self.n;
        let nf = n as f64;
        let full = 2f64.powi(n as i32);
        let half = full / 2.0;
        let plus = self.c(0, 1, 0);
        let minus = self.c(0, 0, 1);
        let p0 = (0..=n).map(|r| self.c(r, 0, 0).re * binomial(n as i64, r as i64)).sum();
        let pn = self.down_count_distribution();
        SymObservables {
            sx: nf / 2.0 * half * (plus + minus).re,
            sy: (C64::new(0.0, nf / 2.0 * half) * (plus - minus)).re,
            sz: nf / 2.0 * full * self.c(1, 0, 0).re,
            p0,
            pn,
            sz2: nf / 4.0 + half * binomial(n as i64, 2) * self.c(2, 0, 0).re,
        }
    }

    /// `P_k`, the probability of exactly `k` spins down, from the `(n_z, 0, 0)`
    /// coefficients and exact integer kernels.
    pub fn down_count_distribution(&self) -> Vec<f64> {
        let n = self.n;
        let cz: Vec<f64> = (0..=n).map(|nz| self.c(nz, 0, 0).re).collect();
        (0..=n)
            .map(|k| {
                let kernel: Vec<f64> = (0..=n).map(|nz| down_count_kernel(n, k, nz)).collect();
                binomial(n as i64, k as i64) * dot_compensated(&cz, &kernel)
            })
            .collect()
    }

    /// Reduced state of `N - n_traced` particles: `c -> 2^{n_traced} c`.
    pub fn partial_trace(&self, n_traced: usize) -> Result<SymmetricState> {
        if n_traced >= self.n {
            return Err(Error::InvalidParameter(format!(
                "cannot trace {n_traced} of {} particles",
                self.n
            )));
        }
        if n_traced == 0 {
            return Ok(self.clone());
        }
        let mut out = Self::zeros(self.n - n_traced)?;
        let scale = 2f64.powi(n_traced as i32);
        for i in out.layout.clone().indices() {
            let pos = out.layout.position(i);
            out.coeffs[pos] = self.coeff(i) * scale;
        }
        Ok(out)
    }
}

fn zpm_to_updown_raw(layout: &SymLayout, coeffs: &[C64]) -> Vec<C64> {
    let mats: Vec<DMatrix<C64>> = (0..=layout.n).map(|d| symmetric_power(&TO_UPDOWN, d)).collect();
    transform_sectors(layout, coeffs, Sectors::OneR, |d, v| matvec(&mats[d], v))
}

fn updown_to_zpm_raw(layout: &SymLayout, coeffs: &[C64]) -> Vec<C64> {
    let mats: Vec<DMatrix<C64>> = (0..=layout.n).map(|d| symmetric_power(&FROM_UPDOWN, d)).collect();
    transform_sectors(layout, coeffs, Sectors::OneR, |d, v| matvec(&mats[d], v))
}

/// Unit-weight coefficients in the basis of strings over
/// `(|up><up|, |down><down|, sigma_+, sigma_-)`.
///
/// Storage reuses [`SymLayout`] with `r = n_down`. A unit coefficient equals
/// the matrix element `<x|rho|y>` of any pair of configurations with that
/// pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct UpDownCoefficients {
    n: usize,
    layout: Arc<SymLayout>,
    unit: Vec<C64>,
}

impl UpDownCoefficients {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Unit coefficient of `(n_up, n_down, n_+, n_-)`.
    pub fn unit(&self, n_up: usize, n_down: usize, n_plus: usize, n_minus: usize) -> C64 {
        if n_up + n_down + n_plus + n_minus != self.n {
            return ZERO;
        }
        self.unit[self.layout.index(n_plus, n_minus, n_down)]
    }

    /// Unit coefficient times the number of strings, `N!/(n_up! n_down! n_+! n_-!)`.
    pub fn weighted(&self, n_up: usize, n_down: usize, n_plus: usize, n_minus: usize) -> C64 {
        self.unit(n_up, n_down, n_plus, n_minus) * multinomial4(n_up, n_down, n_plus, n_minus)
    }

    pub fn unit_coefficients(&self) -> &[C64] {
        &self.unit
    }

    /// Projects the first two particles onto the singlet, leaving `N - 2`.
    ///
    /// Only `(up, down)` and `(+, -)` pairs survive the contraction, so
    /// `u'(a, b, p, q) = u(a + 1, b + 1, p, q) - u(a, b, p + 1, q + 1)`.
    pub fn contract_singlet(&self) -> Result<UpDownCoefficients> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("cannot contract a pair out of {} particles", self.n)));
        }
        let n = self.n - 2;
        let layout = Arc::new(SymLayout::new(n));
        let unit = layout
            .indices()
            .map(|idx| {
                let (p, q, b) = (idx.n_plus, idx.n_minus, idx.n_z);
                self.unit[self.layout.index(p, q, b + 1)] - self.unit[self.layout.index(p + 1, q + 1, b)]
            })
            .collect();
        Ok(UpDownCoefficients { n, layout, unit })
    }
}

pub fn zpm_to_updown(state: &SymmetricState) -> UpDownCoefficients {
    UpDownCoefficients {
        n: state.n,
        layout: Arc::clone(&state.layout),
        unit: zpm_to_updown_raw(&state.layout, &state.coeffs),
    }
}

pub fn updown_to_zpm(coeffs: &UpDownCoefficients) -> SymmetricState {
    SymmetricState {
        n: coeffs.n,
        layout: Arc::clone(&coeffs.layout),
        coeffs: updown_to_zpm_raw(&coeffs.layout, &coeffs.unit),
    }
}

/// Coefficients in the `(x, y, z)` string basis use the same layout with
/// `(p, q, r) = (n_x, n_y, n_z)`.
pub fn basis_zpm_xyz(n: usize, coeffs: &[C64], direction: BasisDirection) -> Result<Vec<C64>> {
    let layout = SymLayout::new(n);
    if coeffs.len() != layout.len() {
        return Err(Error::DimensionMismatch { expected: layout.len(), got: coeffs.len() });
    }
    let m = match direction {
        BasisDirection::ToXyz => TO_XYZ,
        BasisDirection::ToZpm => TO_ZPM,
    };
    let mats: Vec<DMatrix<C64>> = (0..=n).map(|d| symmetric_power(&m, d)).collect();
    Ok(transform_sectors(&layout, coeffs, Sectors::PQ, |d, v| matvec(&mats[d], v)))
}

pub fn initial_all_up_sym(n: usize) -> Result<SymmetricState> {
    SymmetricState::all_up(n)
}

pub fn rotate_sym(state: &SymmetricState, axis: &SpinAxis, phi: f64) -> SymmetricState {
    state.rotate(axis, phi)
}

pub fn observables_sym(state: &SymmetricState) -> SymObservables {
    state.observables()
}

pub fn mqc_from_sym(state: &SymmetricState, axis: &SpinAxis) -> MqcSpectrum {
    let (theta, _) = axis.angles();
    if theta == 0.0 {
        return state.mqc_z();
    }
    SymRotator::with_layout(Arc::clone(&state.layout))
        .mqc(state, axis)
        .expect("rotator built for this state")
}

impl CollectiveMoments for SymmetricState {
    fn particle_count(&self) -> usize {
        self.n
    }

    fn mean_spin(&self) -> [f64; 3] {
        let o = self.observables();
        [o.sx, o.sy, o.sz]
    }

    fn second_moment(&self, axis: &SpinAxis) -> f64 {
        SymRotator::with_layout(Arc::clone(&self.layout))
            .second_moment(self, axis)
            .expect("rotator built for this state")
    }
}
