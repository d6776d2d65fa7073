//! Brute-force reference on the full `2^N` Hilbert space.
//!
//! Basis index bit `i` is site `i`; a set bit means spin down. Collective
//! operators act as sums of single-site Pauli matrices, jump operators act
//! site by site.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::dicke::DickeState;
use crate::error::{Error, Result};
use crate::integrate::{dopri5, Tolerances};
use crate::math::binomial;
use crate::params::{DecoherenceRates, Direction, ModelParams, SpinAxis};
use crate::spectrum::{MqcSpectrum, Source};
use crate::sym::{SymBasisIndex, SymmetricState};

/// Largest `N` accepted for density matrices and state vectors.
pub const MAX_PARTICLES: usize = 12;
/// Largest N the dense master-equation integration is run at by the protocol layer.
pub const MAX_LINDBLAD_PARTICLES: usize = 6;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Which axis the Ising term twists about.
///
/// `Lab` uses `H = -(J/N) S_x^2 - Omega S_z`. `Twist` is the same model after
/// the rotation `exp(i pi/2 S_y)`, `H = -(J/N) S_z^2 + Omega S_x`, with jump
/// operators defined in its own z basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    #[default]
    Lab,
    Twist,
}

impl Frame {
    /// Image of a lab-frame axis in this frame.
    pub fn map_axis(self, axis: &SpinAxis) -> SpinAxis {
        match self {
            Frame::Lab => *axis,
            Frame::Twist => {
                let [x, y, z] = axis.components();
                SpinAxis::normalized(-z, y, x).expect("rotation preserves norm")
            }
        }
    }

    /// Inverse of [`Frame::map_axis`].
    pub fn unmap_axis(self, axis: &SpinAxis) -> SpinAxis {
        match self {
            Frame::Lab => *axis,
            Frame::Twist => {
                let [x, y, z] = axis.components();
                SpinAxis::normalized(z, y, -x).expect("rotation preserves norm")
            }
        }
    }
}

fn check_n(n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidParticleCount(n));
    }
    if n > MAX_PARTICLES {
        return Err(Error::TooLarge { n, limit: MAX_PARTICLES });
    }
    Ok(1 << n)
}

fn popcount(x: usize) -> usize {
    x.count_ones() as usize
}

/// Real sparse symmetric matrix stored by rows.
#[derive(Debug, Clone)]
struct SparseReal {
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseReal {
    fn mul_into(&self, v: &[C64], out: &mut [C64], scale: f64) {
        for (o, row) in out.iter_mut().zip(&self.rows) {
            let mut acc = ZERO;
            for &(c, h) in row {
                acc += v[c] * h;
            }
            *o = acc * scale;
        }
    }
}

fn hamiltonian(params: &ModelParams, frame: Frame) -> SparseReal {
    let n = params.n;
    let dim = 1usize << n;
    let twist = -params.j / n as f64;
    let rows = (0..dim)
        .map(|x| {
            let sz = n as f64 / 2.0 - popcount(x) as f64;
            let mut row: Vec<(usize, f64)> = Vec::new();
            match frame {
                Frame::Lab => {
                    // S_x^2 = N/4 + (1/4) sum_{i != j} flip_i flip_j
                    row.push((x, twist * n as f64 / 4.0 - params.omega * sz));
                    for i in 0..n {
                        for j in 0..n {
                            if i != j {
                                row.push((x ^ (1 << i) ^ (1 << j), twist / 4.0));
                            }
                        }
                    }
                }
                Frame::Twist => {
                    row.push((x, twist * sz * sz));
                    if params.omega != 0.0 {
                        for i in 0..n {
                            row.push((x ^ (1 << i), params.omega / 2.0));
                        }
                    }
                }
            }
            row.sort_by_key(|e| e.0);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for (c, h) in row {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += h,
                    _ => merged.push((c, h)),
                }
            }
            merged.retain(|e| e.1 != 0.0);
            merged
        })
        .collect();
    SparseReal { rows }
}

/// `exp(-i phi n.sigma / 2)` in the (up, down) basis.
fn site_rotation(axis: &SpinAxis, phi: f64) -> [[C64; 2]; 2] {
    let [x, y, z] = axis.components();
    let (c, s) = ((phi / 2.0).cos(), (phi / 2.0).sin());
    let mi = C64::new(0.0, -s);
    [
        [C64::new(c, 0.0) + mi * z, mi * C64::new(x, -y)],
        [mi * C64::new(x, y), C64::new(c, 0.0) - mi * z],
    ]
}

/// Applies `u` to every site of a state vector.
fn apply_product(v: &mut [C64], n: usize, u: &[[C64; 2]; 2]) {
    for i in 0..n {
        let bit = 1 << i;
        for x in 0..v.len() {
            if x & bit == 0 {
                let (a, b) = (v[x], v[x | bit]);
                v[x] = u[0][0] * a + u[0][1] * b;
                v[x | bit] = u[1][0] * a + u[1][1] * b;
            }
        }
    }
}

fn collective_apply(axis: &SpinAxis, n: usize, v: &[C64]) -> Vec<C64> {
    let [ax, ay, az] = axis.components();
    (0..v.len())
        .map(|x| {
            let mut acc = v[x] * (az * (n as f64 / 2.0 - popcount(x) as f64));
            for i in 0..n {
                let y = x ^ (1 << i);
                // <x|sigma_x|y> = 1, <x|sigma_y|y> = -i if x is up at i, +i otherwise
                let sy = if x & (1 << i) == 0 { C64::new(0.0, -1.0) } else { C64::new(0.0, 1.0) };
                acc += v[y] * (C64::new(ax, 0.0) + sy * ay) * 0.5;
            }
            acc
        })
        .collect()
}

/// Pure state vector on `2^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FullState {
    n: usize,
    amps: Vec<C64>,
}

impl FullState {
    pub fn new(n: usize, amps: Vec<C64>) -> Result<Self> {
        let dim = check_n(n)?;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: amps.len() });
        }
        Ok(Self { n, amps })
    }

    pub fn all_up(n: usize) -> Result<Self> {
        let dim = check_n(n)?;
        let mut amps = vec![ZERO; dim];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    /// Embeds a symmetric state: `|N/2, M>` spreads evenly over all strings
    /// with `N/2 - M` down spins.
    pub fn from_dicke(state: &DickeState) -> Result<Self> {
        let n = state.n();
        let dim = check_n(n)?;
        let amps = (0..dim)
            .map(|x| {
                let k = popcount(x);
                state.amplitudes()[k] / binomial(n as i64, k as i64).sqrt()
            })
            .collect();
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn inner(&self, other: &FullState) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn rotate(&self, axis: &SpinAxis, phi: f64) -> FullState {
        let mut amps = self.amps.clone();
        apply_product(&mut amps, self.n, &site_rotation(axis, phi));
        Self { n: self.n, amps }
    }

    /// `exp(-i H t)|psi>` by adaptive integration; `t` may be negative.
    pub fn evolve(&self, params: &ModelParams, t: f64, frame: Frame) -> Result<FullState> {
        if params.n != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: params.n });
        }
        let h = hamiltonian(params, frame);
        let sign = t.signum();
        let mut amps = self.amps.clone();
        dopri5(&mut amps, t.abs(), Tolerances::default(), |_, y, dy| {
            h.mul_into(y, dy, 1.0);
            for d in dy.iter_mut() {
                *d = C64::new(d.im, -d.re) * sign;
            }
        })?;
        Ok(Self { n: self.n, amps })
    }

    pub fn density(&self) -> FullDensityMatrix {
        let d = self.amps.len();
        let rho = DMatrix::from_fn(d, d, |a, b| self.amps[a] * self.amps[b].conj());
        FullDensityMatrix { n: self.n, rho }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullDensityMatrix {
    n: usize,
    rho: DMatrix<C64>,
}

impl FullDensityMatrix {
    pub fn new(n: usize, rho: DMatrix<C64>) -> Result<Self> {
        let dim = check_n(n)?;
        if rho.nrows() != dim || rho.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: rho.nrows() });
        }
        Ok(Self { n, rho })
    }

    pub fn all_up(n: usize) -> Result<Self> {
        Ok(FullState::all_up(n)?.density())
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        let dim = check_n(n)?;
        let rho = DMatrix::from_diagonal_element(dim, dim, C64::new(1.0 / dim as f64, 0.0));
        Ok(Self { n, rho })
    }

    pub fn from_dicke(state: &DickeState) -> Result<Self> {
        Ok(FullState::from_dicke(state)?.density())
    }

    /// Expands a symmetric-basis state string by string. Each site with equal
    /// bra and ket holds either the identity or `sigma_z`, so
    /// `<x|rho|y> = sum_{a + b = n_z} binom(n_uu, a) binom(n_dd, b) (-1)^b c(n_z, n_ud, n_du)`.
    pub fn from_sym(state: &SymmetricState) -> Result<Self> {
        let n = state.n();
        let dim = check_n(n)?;
        let rho = DMatrix::from_fn(dim, dim, |x, y| {
            let (mut uu, mut dd, mut ud, mut du) = (0usize, 0usize, 0usize, 0usize);
            for i in 0..n {
                match ((x >> i) & 1, (y >> i) & 1) {
                    (0, 0) => uu += 1,
                    (1, 1) => dd += 1,
                    (0, 1) => ud += 1,
                    _ => du += 1,
                }
            }
            let mut acc = ZERO;
            for a in 0..=uu {
                for b in 0..=dd {
                    let sign = if b % 2 == 0 { 1.0 } else { -1.0 };
                    let idx = SymBasisIndex::new(a + b, ud, du);
                    acc += state.coeff(idx) * (binomial(uu as i64, a as i64) * binomial(dd as i64, b as i64) * sign);
                }
            }
            acc
        });
        Ok(Self { n, rho })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn purity(&self) -> f64 {
        overlap(self, self).unwrap_or(0.0)
    }

    /// Convex combination `p self + (1 - p) other`.
    pub fn mix(&self, other: &FullDensityMatrix, p: f64) -> Result<FullDensityMatrix> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        Ok(Self { n: self.n, rho: &self.rho * C64::new(p, 0.0) + &other.rho * C64::new(1.0 - p, 0.0) })
    }

    pub fn tensor(&self, other: &FullDensityMatrix) -> Result<FullDensityMatrix> {
        let n = self.n + other.n;
        check_n(n)?;
        // sites of `self` occupy the low bits
        let (da, db) = (self.dim(), other.dim());
        let rho = DMatrix::from_fn(da * db, da * db, |x, y| {
            self.rho[(x % da, y % da)] * other.rho[(x / da, y / da)]
        });
        Ok(Self { n, rho })
    }

    /// `U rho U^dagger` with `U = exp(-i phi S_n)`.
    pub fn rotate(&self, axis: &SpinAxis, phi: f64) -> FullDensityMatrix {
        if phi == 0.0 {
            return self.clone();
        }
        let u = site_rotation(axis, phi);
        let mut rho = self.rho.clone();
        for mut col in rho.column_iter_mut() {
            apply_product(col.as_mut_slice(), self.n, &u);
        }
        // rho U^dagger = (U rho^dagger)^dagger
        let mut rho = rho.adjoint();
        for mut col in rho.column_iter_mut() {
            apply_product(col.as_mut_slice(), self.n, &u);
        }
        Self { n: self.n, rho: rho.adjoint() }
    }

    /// Rotates so that `axis` becomes the z axis.
    fn aligned(&self, axis: &SpinAxis) -> FullDensityMatrix {
        let (theta, alpha) = axis.angles();
        self.rotate(&SpinAxis::Z, -alpha).rotate(&SpinAxis::Y, -theta)
    }

    pub fn expectation(&self, axis: &SpinAxis) -> f64 {
        let mut acc = ZERO;
        for (b, col) in self.rho.column_iter().enumerate() {
            let sv = collective_apply(axis, self.n, col.as_slice());
            acc += sv[b];
        }
        acc.re
    }

    pub fn second_moment(&self, axis: &SpinAxis) -> f64 {
        let mut acc = ZERO;
        for (b, col) in self.rho.column_iter().enumerate() {
            let sv = collective_apply(axis, self.n, &collective_apply(axis, self.n, col.as_slice()));
            acc += sv[b];
        }
        acc.re
    }

    /// Probability of finding exactly `k` spins down, `k = 0..=N`.
    pub fn down_count_distribution(&self) -> Vec<f64> {
        let mut p = vec![0.0; self.n + 1];
        for x in 0..self.dim() {
            p[popcount(x)] += self.rho[(x, x)].re;
        }
        p
    }

    /// Eigenvalues of rho in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(self.rho.clone()).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    /// Traces out the `n_traced` highest-index sites.
    pub fn partial_trace(&self, n_traced: usize) -> Result<FullDensityMatrix> {
        if n_traced >= self.n {
            return Err(Error::InvalidParameter(format!(
                "cannot trace {n_traced} of {} particles",
                self.n
            )));
        }
        let keep = 1usize << (self.n - n_traced);
        let rest = 1usize << n_traced;
        let rho = DMatrix::from_fn(keep, keep, |a, b| {
            (0..rest).map(|e| self.rho[(a + keep * e, b + keep * e)]).sum()
        });
        Ok(Self { n: self.n - n_traced, rho })
    }

    /// `(von Neumann, Renyi-2)` entropies in nats.
    pub fn entropies(&self) -> (f64, f64) {
        let vals = self.eigenvalues();
        let vn = -vals.iter().filter(|&&l| l > 1e-14).map(|l| l * l.ln()).sum::<f64>();
        (vn, -self.purity().ln())
    }
}

/// Integrates the Lindblad equation with per-site jumps
/// `sqrt(g_ud)|down><up|`, `sqrt(g_du)|up><down|`, `sqrt(g_el)|up><up|`.
/// `Backward` flips the sign of `H` only.
pub fn evolve_lindblad_full(
    rho: &FullDensityMatrix,
    params: &ModelParams,
    rates: &DecoherenceRates,
    t: f64,
    direction: Direction,
    frame: Frame,
) -> Result<FullDensityMatrix> {
    if params.n != rho.n {
        return Err(Error::DimensionMismatch { expected: rho.n, got: params.n });
    }
    rates.validate()?;
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("evolution time must be nonnegative, got {t}")));
    }
    let n = rho.n;
    let d = rho.dim();
    let h = hamiltonian(params, frame);
    let sign = direction.sign();
    let (g_ud, g_du, g_el) = (rates.gamma_ud, rates.gamma_du, rates.gamma_el);
    // decay of rho_xy from the anticommutator terms
    let ups: Vec<f64> = (0..d).map(|x| (n - popcount(x)) as f64).collect();
    let downs: Vec<f64> = (0..d).map(|x| popcount(x) as f64).collect();
    let mut hx = vec![ZERO; d * d];

    let mut y: Vec<C64> = rho.rho.as_slice().to_vec();
    dopri5(&mut y, t, Tolerances::default(), |_, y, dy| {
        for b in 0..d {
            h.mul_into(&y[b * d..(b + 1) * d], &mut hx[b * d..(b + 1) * d], 1.0);
        }
        for b in 0..d {
            for a in 0..d {
                let comm = hx[a + b * d] - hx[b + a * d].conj();
                let mut v = C64::new(comm.im, -comm.re) * sign;
                let loss = 0.5 * ((g_ud + g_el) * (ups[a] + ups[b]) + g_du * (downs[a] + downs[b]));
                v -= y[a + b * d] * loss;
                for i in 0..n {
                    let bit = 1 << i;
                    let (ua, ub) = (a & bit == 0, b & bit == 0);
                    if ua == ub {
                        let src = a ^ bit;
                        let srb = b ^ bit;
                        if !ua {
                            v += y[src + srb * d] * g_ud;
                        } else {
                            v += y[src + srb * d] * g_du;
                            v += y[a + b * d] * g_el;
                        }
                    }
                }
                dy[a + b * d] = v;
            }
        }
    })?;
    Ok(FullDensityMatrix { n, rho: DMatrix::from_vec(d, d, y) })
}

/// `I_m` with respect to `S_n`. After aligning the axis with z the eigenvalue of
/// every basis string is exact, so blocks are read off from spin counts.
pub fn mqc_direct_full(rho: &FullDensityMatrix, axis: &SpinAxis) -> MqcSpectrum {
    let aligned = rho.aligned(axis);
    let n = rho.n;
    let mut values = vec![0.0; 2 * n + 1];
    for b in 0..rho.dim() {
        for a in 0..rho.dim() {
            // m = M(a) - M(b)
            let m = popcount(b) as i64 - popcount(a) as i64;
            values[(m + n as i64) as usize] += aligned.rho[(a, b)].norm_sqr();
        }
    }
    MqcSpectrum::new(n, values, Source::Direct).expect("length 2N + 1")
}

/// Mixed-state QFI for the generator `S_n`.
pub fn qfi_mixed_full(rho: &FullDensityMatrix, axis: &SpinAxis) -> f64 {
    let eig = SymmetricEigen::new(rho.rho.clone());
    let mut lambda: Vec<f64> = eig.eigenvalues.iter().map(|&l| if l < -1e-9 { 0.0 } else { l.max(0.0) }).collect();
    let total: f64 = lambda.iter().sum();
    lambda.iter_mut().for_each(|l| *l /= total);
    let d = rho.dim();
    let applied: Vec<Vec<C64>> = (0..d)
        .map(|l| collective_apply(axis, rho.n, eig.eigenvectors.column(l).as_slice()))
        .collect();
    let mut f = 0.0;
    for k in 0..d {
        let vk = eig.eigenvectors.column(k);
        for l in 0..d {
            let s = lambda[k] + lambda[l];
            if s <= 1e-12 || k == l {
                continue;
            }
            let elem: C64 = vk.iter().zip(&applied[l]).map(|(a, b)| a.conj() * b).sum();
            f += (lambda[k] - lambda[l]).powi(2) / s * elem.norm_sqr();
        }
    }
    2.0 * f
}

/// `tr[rho1 rho2]`.
pub fn overlap(a: &FullDensityMatrix, b: &FullDensityMatrix) -> Result<f64> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch { expected: a.n, got: b.n });
    }
    let d = a.dim();
    let mut acc = ZERO;
    for x in 0..d {
        for y in 0..d {
            acc += a.rho[(x, y)] * b.rho[(y, x)];
        }
    }
    Ok(acc.re)
}

/// Echo signal `tr[rho0 U_b R(phi) U_f rho0 ...]` on the full space.
#[allow(clippy::too_many_arguments)]
pub fn echo_full(
    rho0: &FullDensityMatrix,
    params: &ModelParams,
    rates: &DecoherenceRates,
    t: f64,
    axis: &SpinAxis,
    phis: &[f64],
    frame: Frame,
) -> Result<Vec<f64>> {
    let forward = evolve_lindblad_full(rho0, params, rates, t, Direction::Forward, frame)?;
    phis.iter()
        .map(|&phi| {
            let rotated = forward.rotate(axis, phi);
            let back = evolve_lindblad_full(&rotated, params, rates, t, Direction::Backward, frame)?;
            overlap(rho0, &back)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dicke::{prepare_css, Propagator};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn plus() -> FullDensityMatrix {
        FullDensityMatrix::all_up(1).unwrap().rotate(&SpinAxis::Y, FRAC_PI_2)
    }

    #[test]
    fn guards() {
        assert!(FullDensityMatrix::all_up(13).is_err());
        assert!(FullDensityMatrix::all_up(0).is_err());
    }

    #[test]
    fn idle_evolution_is_identity() {
        let p = ModelParams::new(1, 0.0, 0.0).unwrap();
        let r = plus();
        let out = evolve_lindblad_full(&r, &p, &DecoherenceRates::ZERO, 2.0, Direction::Forward, Frame::Lab).unwrap();
        assert!((out.matrix() - r.matrix()).norm() < 1e-14);
    }

    #[test]
    fn single_spin_dephasing() {
        let p = ModelParams::new(1, 0.0, 0.0).unwrap();
        let rates = DecoherenceRates::new(0.0, 0.0, 0.8).unwrap();
        let t = 1.3;
        let out = evolve_lindblad_full(&plus(), &p, &rates, t, Direction::Forward, Frame::Lab).unwrap();
        assert_abs_diff_eq!(out.matrix()[(0, 1)].norm(), 0.5 * (-0.8 * t / 2.0f64).exp(), epsilon = 1e-10);
        let spec = mqc_direct_full(&out, &SpinAxis::Z);
        assert_abs_diff_eq!(spec.get(1), 0.25 * (-0.8 * t).exp(), epsilon = 1e-10);
    }

    #[test]
    fn single_spin_decay() {
        let p = ModelParams::new(1, 0.0, 0.0).unwrap();
        let rates = DecoherenceRates::new(0.5, 0.0, 0.0).unwrap();
        let out = evolve_lindblad_full(&FullDensityMatrix::all_up(1).unwrap(), &p, &rates, 2.0, Direction::Forward, Frame::Lab)
            .unwrap();
        assert_abs_diff_eq!(out.matrix()[(0, 0)].re, (-1.0f64).exp(), epsilon = 1e-10);
        assert_abs_diff_eq!(out.trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mqc_examples() {
        let mixed = FullDensityMatrix::maximally_mixed(3).unwrap();
        let spec = mqc_direct_full(&mixed, &SpinAxis::normalized(1.0, 2.0, 0.5).unwrap());
        assert_abs_diff_eq!(spec.get(0), 0.125, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.total(), 0.125, epsilon = 1e-12);

        let css = FullDensityMatrix::from_dicke(&prepare_css(2, FRAC_PI_2, 0.0).unwrap()).unwrap();
        let spec = mqc_direct_full(&css, &SpinAxis::Z);
        for m in -2..=2 {
            let e = crate::dicke::css_spectrum_closed_form(2, m).unwrap();
            assert_abs_diff_eq!(spec.get(m), e, epsilon = 1e-12);
        }

        let prod = plus().tensor(&FullDensityMatrix::all_up(1).unwrap()).unwrap();
        let spec = mqc_direct_full(&prod, &SpinAxis::Z);
        assert_abs_diff_eq!(spec.get(0), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.get(1), 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(spec.get(2), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn qfi_examples() {
        let ghz = FullDensityMatrix::from_dicke(&DickeState::ghz(3).unwrap()).unwrap();
        assert_abs_diff_eq!(qfi_mixed_full(&ghz, &SpinAxis::Z), 9.0, epsilon = 1e-9);
        assert_abs_diff_eq!(qfi_mixed_full(&FullDensityMatrix::maximally_mixed(3).unwrap(), &SpinAxis::X), 0.0, epsilon = 1e-12);
        let css = prepare_css(4, 1.1, 0.3).unwrap();
        let full = FullDensityMatrix::from_dicke(&css).unwrap();
        let axis = SpinAxis::normalized(0.2, -0.4, 0.9).unwrap();
        assert_abs_diff_eq!(qfi_mixed_full(&full, &axis), css.qfi(&axis), epsilon = 1e-9);
    }

    #[test]
    fn overlap_examples() {
        let up = FullDensityMatrix::all_up(2).unwrap();
        let down = up.rotate(&SpinAxis::X, PI);
        assert_abs_diff_eq!(overlap(&up, &up).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(overlap(&up, &down).unwrap(), 0.0, epsilon = 1e-12);
        let mixed = up.mix(&down, 0.3).unwrap();
        assert_abs_diff_eq!(mixed.purity(), 0.09 + 0.49, epsilon = 1e-12);
        assert!(overlap(&up, &FullDensityMatrix::all_up(3).unwrap()).is_err());
    }

    #[test]
    fn pure_evolution_matches_dicke_engine() {
        for n in [2, 5, 8] {
            let params = ModelParams::new(n, 1.4, 0.6).unwrap();
            let css = prepare_css(n, 0.7, 0.4).unwrap();
            let dicke = Propagator::new(params).evolve(&css, 1.7).unwrap();
            let full = FullState::from_dicke(&css).unwrap().evolve(&params, 1.7, Frame::Lab).unwrap();
            let embedded = FullState::from_dicke(&dicke).unwrap();
            assert_abs_diff_eq!(embedded.inner(&full).norm_sqr(), 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn twist_frame_is_unitarily_equivalent() {
        let params = ModelParams::new(3, 1.2, 0.5).unwrap();
        let v = |r: &FullDensityMatrix| r.rotate(&SpinAxis::Y, -FRAC_PI_2);
        let lab0 = FullDensityMatrix::all_up(3).unwrap();
        let lab = evolve_lindblad_full(&lab0, &params, &DecoherenceRates::ZERO, 0.9, Direction::Forward, Frame::Lab).unwrap();
        let tw = evolve_lindblad_full(&v(&lab0), &params, &DecoherenceRates::ZERO, 0.9, Direction::Forward, Frame::Twist)
            .unwrap();
        assert!((v(&lab).matrix() - tw.matrix()).norm() < 1e-8);
        let axis = SpinAxis::normalized(0.3, 0.5, 0.4).unwrap();
        assert_abs_diff_eq!(
            lab.expectation(&axis),
            tw.expectation(&Frame::Twist.map_axis(&axis)),
            epsilon = 1e-8
        );
        let back = Frame::Twist.unmap_axis(&Frame::Twist.map_axis(&axis));
        assert_abs_diff_eq!(back.dot(axis.components()), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn sym_embedding_of_simple_states() {
        let up = FullDensityMatrix::from_sym(&SymmetricState::all_up(3).unwrap()).unwrap();
        assert!((up.matrix() - FullDensityMatrix::all_up(3).unwrap().matrix()).norm() < 1e-15);
        let mixed = FullDensityMatrix::from_sym(&SymmetricState::maximally_mixed(3).unwrap()).unwrap();
        assert!((mixed.matrix() - FullDensityMatrix::maximally_mixed(3).unwrap().matrix()).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_of_ghz() {
        let ghz = FullDensityMatrix::from_dicke(&DickeState::ghz(4).unwrap()).unwrap();
        let half = ghz.partial_trace(2).unwrap();
        assert_abs_diff_eq!(half.trace().re, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(half.entropies().0, 2f64.ln(), epsilon = 1e-10);
        assert_abs_diff_eq!(ghz.entropies().0, 0.0, epsilon = 1e-9);
        assert!(ghz.partial_trace(4).is_err());
    }
}
