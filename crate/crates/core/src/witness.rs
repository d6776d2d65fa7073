//! Entanglement witnesses built on coherence spectra: the separable bound
//! on each `I_m`, Fisher thresholds `b_k`, and axis optimization.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::dicke::{DickeState, Propagator};
use crate::error::{Error, Result};
use crate::exact::{evolve_lindblad_full, mqc_direct_full, Frame, FullDensityMatrix};
use crate::math::ln_fact;
use crate::parallel;
use crate::params::{DecoherenceRates, Direction, ModelParams, SpinAxis};
use crate::protocol::{to_twist_frame, Backend};
use crate::spectrum::MqcSpectrum;
use crate::sym::{BlockLiouvillian, SymRotator, SymmetricState};

const DEPTH_MARGIN: f64 = 1e-12;

/// `F_I = 2 sum_m m^2 I_m`.
pub fn f_i(spectrum: &MqcSpectrum) -> f64 {
    spectrum.fisher_lower_bound()
}

/// Largest `I_m` of any fully separable state of `N` spins: the best CSS on
/// the equator for `N_+` spins with the rest polarized.
pub fn separable_bound(n: usize, m: i64) -> Result<f64> {
    let a = m.unsigned_abs() as usize;
    if a > n {
        return Err(Error::OrderOutOfRange { n, m });
    }
    if a == 0 {
        return Ok(1.0);
    }
    let best = (a..=n)
        .map(|np| {
            ln_fact(2 * np as u64) - np as f64 * 4f64.ln() - ln_fact((np - a) as u64) - ln_fact((np + a) as u64)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(best.exp())
}

/// Bounds for `m = -N ..= N`.
pub fn separable_bounds(n: usize) -> Vec<f64> {
    (-(n as i64)..=n as i64).map(|m| separable_bound(n, m).expect("order within range")).collect()
}

/// `b_k = s k^2 + (N - s k)^2` with `s = floor(N / k)`; exceeding it
/// witnesses `(k + 1)`-particle entanglement.
pub fn qfi_threshold(n: usize, k: usize) -> Result<f64> {
    if k == 0 || k > n {
        return Err(Error::InvalidClusterSize { n, k });
    }
    let s = (n / k) as u64;
    let r = n as u64 - s * k as u64;
    Ok((s * (k * k) as u64 + r * r) as f64)
}

/// Largest `k` with `F > b_{k-1}`, or 0 when `F` does not exceed `b_1 = N`.
pub fn entanglement_depth(n: usize, fisher: f64) -> usize {
    (2..=n)
        .rev()
        .find(|&k| fisher > qfi_threshold(n, k - 1).expect("k - 1 in range") + DEPTH_MARGIN)
        .unwrap_or(0)
}

pub fn mqc_product(a: &MqcSpectrum, b: &MqcSpectrum) -> MqcSpectrum {
    a.tensor(b)
}

pub fn single_particle_mqc(p: f64) -> Result<MqcSpectrum> {
    MqcSpectrum::single_particle(p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub spectrum: MqcSpectrum,
    pub f_i: f64,
    /// indexed like the spectrum, `m = -N ..= N`
    pub separable_bounds: Vec<f64>,
    pub violations: Vec<bool>,
    pub qfi: Option<f64>,
    pub entanglement_depth: usize,
    pub qfi_depth: Option<usize>,
    pub squeezing_xi2: Option<f64>,
}

impl WitnessReport {
    pub fn n(&self) -> usize {
        self.spectrum.n()
    }

    pub fn violated_orders(&self) -> Vec<i64> {
        let n = self.n() as i64;
        self.violations.iter().enumerate().filter(|(_, &v)| v).map(|(i, _)| i as i64 - n).collect()
    }

    /// `I_m / bound` for every order.
    pub fn violation_ratios(&self) -> Vec<f64> {
        self.spectrum.values().iter().zip(&self.separable_bounds).map(|(i, b)| i / b).collect()
    }

    pub fn with_squeezing(mut self, xi2: f64) -> Self {
        self.squeezing_xi2 = Some(xi2);
        self
    }
}

pub fn witness_report(spectrum: &MqcSpectrum, n: usize, qfi: Option<f64>) -> Result<WitnessReport> {
    if spectrum.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: spectrum.n() });
    }
    let bounds = separable_bounds(n);
    let violations = spectrum.values().iter().zip(&bounds).map(|(i, b)| *i > b + 1e-12).collect();
    let fi = f_i(spectrum);
    Ok(WitnessReport {
        spectrum: spectrum.clone(),
        f_i: fi,
        separable_bounds: bounds,
        violations,
        qfi,
        entanglement_depth: entanglement_depth(n, fi),
        qfi_depth: qfi.map(|f| entanglement_depth(n, f)),
        squeezing_xi2: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisGrid {
    pub theta: usize,
    pub phi: usize,
    pub refine: bool,
}

impl Default for AxisGrid {
    fn default() -> Self {
        Self { theta: 24, phi: 48, refine: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisOptimum {
    pub axis: SpinAxis,
    pub value: f64,
}

/// Maximizes `objective` over the upper hemisphere: a `theta x phi` grid
/// (`theta` from the pole to the equator inclusive) scanned in lexicographic
/// order, earliest point winning ties, then alternating golden-section
/// searches in `theta` and `phi` around the winner.
pub fn maximize_over_axes<F>(grid: AxisGrid, objective: F) -> Result<AxisOptimum>
where
    F: Fn(&SpinAxis) -> f64 + Sync + Send,
{
    if grid.theta < 2 || grid.phi < 1 {
        return Err(Error::InvalidParameter(format!("axis grid {}x{} is too coarse", grid.theta, grid.phi)));
    }
    let dt = FRAC_PI_2 / (grid.theta - 1) as f64;
    let dp = TAU / grid.phi as f64;
    let points: Vec<(f64, f64)> = (0..grid.theta)
        .flat_map(|i| (0..grid.phi).map(move |j| (i as f64 * dt, j as f64 * dp)))
        .collect();
    let values = parallel::map(&points, |&(t, p)| objective(&SpinAxis::from_angles(t, p)));
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] + 1e-12 * values[best].abs().max(1.0) {
            best = i;
        }
    }
    let (mut theta, mut phi) = points[best];
    let mut value = values[best];
    if grid.refine {
        let eval = |t: f64, p: f64| objective(&SpinAxis::from_angles(t, p));
        let (mut ht, mut hp) = (dt, dp);
        for _ in 0..3 {
            let (t, v) = golden_max(|t| eval(t, phi), theta - ht, theta + ht);
            if v > value {
                theta = t;
                value = v;
            }
            let (p, v) = golden_max(|p| eval(theta, p), phi - hp, phi + hp);
            if v > value {
                phi = p;
                value = v;
            }
            ht *= 0.5;
            hp *= 0.5;
        }
    }
    let axis = SpinAxis::from_angles(theta, phi).upper_hemisphere();
    Ok(AxisOptimum { axis, value })
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > 1e-9 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd { (c, fc) } else { (d, fd) }
}

/// Axis maximizing `F_I` of the state reached from `initial` after time `t`
/// (the QFI for the pure backend, where the two coincide).
pub fn optimize_axis(
    backend: Backend,
    params: &ModelParams,
    rates: &DecoherenceRates,
    t: f64,
    initial: &DickeState,
    grid: AxisGrid,
) -> Result<AxisOptimum> {
    backend.check(params, rates)?;
    match backend {
        Backend::DickePure => {
            let state = Propagator::new(*params).evolve(initial, t)?;
            maximize_over_axes(grid, |a| state.qfi(a))
        }
        Backend::SymLiouville => {
            let rho0 = SymmetricState::from_dicke(&to_twist_frame(initial))?;
            let gen = BlockLiouvillian::new(params.n, params.j, *rates)?;
            let state = gen.propagator(t, Direction::Forward)?.apply(&rho0)?;
            let rot = SymRotator::new(params.n);
            maximize_over_axes(grid, |a| {
                rot.mqc(&state, &Frame::Twist.map_axis(a)).map(|s| s.fisher_lower_bound()).unwrap_or(f64::NAN)
            })
        }
        Backend::ExactOracle => {
            let rho0 = FullDensityMatrix::from_dicke(&to_twist_frame(initial))?;
            let state = evolve_lindblad_full(&rho0, params, rates, t, Direction::Forward, Frame::Twist)?;
            maximize_over_axes(grid, |a| mqc_direct_full(&state, &Frame::Twist.map_axis(a)).fisher_lower_bound())
        }
    }
}

/// Time at which pure one-axis twisting from all-up forms a cat state.
pub fn cat_time(params: &ModelParams) -> f64 {
    PI * params.n as f64 / (2.0 * params.j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bound_examples() {
        for n in [1, 5, 48] {
            assert_eq!(separable_bound(n, 0).unwrap(), 1.0);
        }
        assert_abs_diff_eq!(separable_bound(2, 1).unwrap(), 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(separable_bound(2, 2).unwrap(), 0.0625, epsilon = 1e-15);
        assert_abs_diff_eq!(separable_bound(4, 4).unwrap(), 1.0 / 256.0, epsilon = 1e-15);
        assert!(separable_bound(2, 3).is_err());
        assert_eq!(separable_bound(3, -2).unwrap(), separable_bound(3, 2).unwrap());
    }

    #[test]
    fn threshold_examples() {
        assert_eq!(qfi_threshold(48, 1).unwrap(), 48.0);
        assert_eq!(qfi_threshold(48, 48).unwrap(), 2304.0);
        assert_eq!(qfi_threshold(5, 2).unwrap(), 9.0);
        assert!(qfi_threshold(5, 0).is_err());
        assert!(qfi_threshold(5, 6).is_err());
        for n in 1..=30 {
            for k in 1..=n {
                // remainder r < k gives r^2 <= r k, so b_k <= N k with equality iff k | N
                let b = qfi_threshold(n, k).unwrap();
                assert!(b <= (n * k) as f64);
                assert_eq!(b == (n * k) as f64, n % k == 0);
            }
        }
    }

    #[test]
    fn depth_uses_strict_margin() {
        assert_eq!(entanglement_depth(4, 4.0), 0);
        assert_eq!(entanglement_depth(4, 4.5), 2);
        assert_eq!(entanglement_depth(4, 6.0), 2);
        assert_eq!(entanglement_depth(4, 16.0), 4);
        assert_eq!(entanglement_depth(48, 48.0 + 1e-13), 0);
    }

    #[test]
    fn report_examples() {
        let up = DickeState::all_up(4).unwrap().mqc_spectrum(&SpinAxis::Z);
        let r = witness_report(&up, 4, None).unwrap();
        assert!(r.violated_orders().is_empty());
        assert_eq!(r.entanglement_depth, 0);

        let ghz = DickeState::ghz(4).unwrap().mqc_spectrum(&SpinAxis::Z);
        let r = witness_report(&ghz, 4, Some(16.0)).unwrap();
        assert_abs_diff_eq!(r.f_i, 16.0, epsilon = 1e-12);
        assert_eq!(r.violated_orders(), vec![-4, 4]);
        assert_eq!(r.entanglement_depth, 4);
        assert_eq!(r.qfi_depth, Some(4));
        assert!(witness_report(&ghz, 5, None).is_err());
    }

    #[test]
    fn f_i_examples() {
        assert_eq!(f_i(&DickeState::all_up(6).unwrap().mqc_spectrum(&SpinAxis::Z)), 0.0);
        for n in [1, 7, 30] {
            let css = DickeState::coherent(n, FRAC_PI_2, 0.0).unwrap().mqc_spectrum(&SpinAxis::Z);
            assert_abs_diff_eq!(f_i(&css), n as f64, epsilon = 1e-9);
        }
    }

    #[test]
    fn all_up_optimum_is_equatorial_and_deterministic() {
        let n = 6;
        let p = ModelParams::new(n, 1.0, 0.0).unwrap();
        let up = DickeState::all_up(n).unwrap();
        let a = optimize_axis(Backend::DickePure, &p, &DecoherenceRates::ZERO, 0.0, &up, AxisGrid::default()).unwrap();
        let b = optimize_axis(Backend::DickePure, &p, &DecoherenceRates::ZERO, 0.0, &up, AxisGrid::default()).unwrap();
        assert_eq!(a, b);
        assert_abs_diff_eq!(a.value, n as f64, epsilon = 1e-9);
        assert_abs_diff_eq!(a.axis.z(), 0.0, epsilon = 1e-6);
    }
}
