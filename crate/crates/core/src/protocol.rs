//! Time-reversal echo `F_t(phi) = tr[rho_0 U_b R(phi) U_f rho_0 U_f^+ R^+ U_b^+]`
//! and Fourier extraction of the coherence spectrum.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::dicke::{DickeState, Propagator, Rotation};
use crate::error::{Error, Result};
use crate::exact::{evolve_lindblad_full, overlap, Frame, FullDensityMatrix, MAX_LINDBLAD_PARTICLES, MAX_PARTICLES};
use crate::parallel;
use crate::params::{DecoherenceRates, Direction, ModelParams, SpinAxis};
use crate::spectrum::{MqcSpectrum, Source};
use crate::sym::{BlockLiouvillian, SymRotator, SymmetricState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    DickePure,
    SymLiouville,
    ExactOracle,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::DickePure => "dicke_pure",
            Backend::SymLiouville => "sym_liouville",
            Backend::ExactOracle => "exact_oracle",
        }
    }

    /// Cheapest backend that can run the configuration.
    pub fn auto(params: &ModelParams, rates: &DecoherenceRates) -> Result<Backend> {
        let b = if rates.is_zero() {
            Backend::DickePure
        } else if params.omega == 0.0 {
            Backend::SymLiouville
        } else {
            Backend::ExactOracle
        };
        b.check(params, rates)?;
        Ok(b)
    }

    pub fn check(self, params: &ModelParams, rates: &DecoherenceRates) -> Result<()> {
        let fail = |reason: String| Err(Error::IncompatibleBackend { backend: self.name(), reason });
        match self {
            Backend::DickePure if !rates.is_zero() => {
                fail("pure-state evolution needs all decoherence rates to be zero".into())
            }
            Backend::SymLiouville if params.omega != 0.0 => fail(format!(
                "the symmetric engine supports Omega = 0 only (got {}); use dicke for pure dynamics \
                 or exact for N <= {MAX_PARTICLES}",
                params.omega
            )),
            Backend::ExactOracle if params.n > MAX_PARTICLES => {
                fail(format!("N = {} exceeds the brute-force limit {MAX_PARTICLES}", params.n))
            }
            Backend::ExactOracle if !rates.is_zero() && params.n > MAX_LINDBLAD_PARTICLES => fail(format!(
                "decoherent runs on the full Hilbert space are limited to N <= {MAX_LINDBLAD_PARTICLES} (got {}); \
                 set Omega = 0 to use the symmetric engine, or drop the rates for pure dynamics",
                params.n
            )),
            _ => Ok(()),
        }
    }
}

pub fn default_phi_samples(n: usize) -> usize {
    4 * (n + 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub params: ModelParams,
    pub rates: DecoherenceRates,
    pub t: f64,
    pub axis: SpinAxis,
    pub phi_samples: usize,
    pub backend: Backend,
}

impl ProtocolConfig {
    pub fn new(
        params: ModelParams,
        rates: DecoherenceRates,
        t: f64,
        axis: SpinAxis,
        backend: Backend,
    ) -> Result<Self> {
        let cfg = Self { params, rates, t, axis, phi_samples: default_phi_samples(params.n), backend };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_phi_samples(mut self, samples: usize) -> Result<Self> {
        self.phi_samples = samples;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let needed = 2 * self.params.n + 1;
        if self.phi_samples < needed {
            return Err(Error::TooFewSamples { got: self.phi_samples, needed });
        }
        if !self.t.is_finite() || self.t < 0.0 {
            return Err(Error::InvalidParameter(format!("evolution time must be finite and >= 0, got {}", self.t)));
        }
        self.rates.validate()?;
        self.backend.check(&self.params, &self.rates)
    }

    pub fn phi_grid(&self) -> Vec<f64> {
        phi_grid(self.phi_samples)
    }
}

pub fn phi_grid(samples: usize) -> Vec<f64> {
    (0..samples).map(|j| TAU * j as f64 / samples as f64).collect()
}

/// Lab-frame state expressed in the frame where the interaction is `S_z^2`.
///
/// Jump operators act in the `z` basis of this frame, i.e. transverse to
/// the initial polarization, for every backend.
pub fn to_twist_frame(state: &DickeState) -> DickeState {
    state.rotate(&SpinAxis::Y, -FRAC_PI_2)
}

/// Echo signal on the configured phase grid, as `(phi, F)` pairs.
pub fn run_echo_protocol(cfg: &ProtocolConfig, initial: &DickeState) -> Result<Vec<(f64, f64)>> {
    cfg.validate()?;
    if initial.n() != cfg.params.n {
        return Err(Error::DimensionMismatch { expected: cfg.params.n, got: initial.n() });
    }
    let phis = cfg.phi_grid();
    let values = match cfg.backend {
        Backend::DickePure => echo_dicke(cfg, initial, &phis)?,
        Backend::SymLiouville => echo_sym(cfg, initial, &phis)?,
        Backend::ExactOracle => echo_exact(cfg, initial, &phis)?,
    };
    for (&phi, &f) in phis.iter().zip(&values) {
        if !(-1e-9..=1.0 + 1e-9).contains(&f) {
            return Err(Error::InvalidParameter(format!("echo signal {f} at phi = {phi} is not a probability")));
        }
    }
    Ok(phis.into_iter().zip(values).collect())
}

fn echo_dicke(cfg: &ProtocolConfig, initial: &DickeState, phis: &[f64]) -> Result<Vec<f64>> {
    let prop = Propagator::new(cfg.params);
    let forward = prop.evolve(initial, cfg.t)?;
    let rot = Rotation::new(cfg.params.n, &cfg.axis);
    let out = parallel::map(phis, |&phi| -> Result<f64> {
        let back = prop.evolve(&rot.apply(&forward, phi), -cfg.t)?;
        Ok(initial.inner(&back).norm_sqr())
    });
    out.into_iter().collect()
}

fn echo_sym(cfg: &ProtocolConfig, initial: &DickeState, phis: &[f64]) -> Result<Vec<f64>> {
    let n = cfg.params.n;
    let rho0 = SymmetricState::from_dicke(&to_twist_frame(initial))?;
    let gen = BlockLiouvillian::new(n, cfg.params.j, cfg.rates)?;
    let forward = gen.propagator(cfg.t, Direction::Forward)?.apply(&rho0)?;
    let backward = gen.propagator(cfg.t, Direction::Backward)?;
    let rot = SymRotator::new(n);
    let axis = Frame::Twist.map_axis(&cfg.axis);
    let out = parallel::map(phis, |&phi| -> Result<f64> {
        let rotated = rot.rotate(&forward, &axis, phi)?;
        rho0.overlap(&backward.apply(&rotated)?)
    });
    out.into_iter().collect()
}

fn echo_exact(cfg: &ProtocolConfig, initial: &DickeState, phis: &[f64]) -> Result<Vec<f64>> {
    let rho0 = FullDensityMatrix::from_dicke(&to_twist_frame(initial))?;
    let forward = evolve_exact(&rho0, cfg, Direction::Forward)?;
    let axis = Frame::Twist.map_axis(&cfg.axis);
    let out = parallel::map(phis, |&phi| -> Result<f64> {
        let back = evolve_exact(&forward.rotate(&axis, phi), cfg, Direction::Backward)?;
        overlap(&rho0, &back)
    });
    out.into_iter().collect()
}

fn evolve_exact(rho: &FullDensityMatrix, cfg: &ProtocolConfig, dir: Direction) -> Result<FullDensityMatrix> {
    evolve_lindblad_full(rho, &cfg.params, &cfg.rates, cfg.t, dir, Frame::Twist)
}

/// Fourier-extracted spectrum plus the residues that diagnose a bad signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub spectrum: MqcSpectrum,
    /// largest `|Im I_m|` before symmetrization
    pub max_imaginary: f64,
    /// largest `|I_k|` at orders beyond `N` (zero without oversampling)
    pub max_alias: f64,
    /// largest `|I_m - I_{-m}|` before symmetrization
    pub max_asymmetry: f64,
}

/// Inverts `F(phi) = sum_m I_m exp(-i m phi)` on a uniform grid.
pub fn extract_mqc(samples: &[(f64, f64)], n: usize) -> Result<Extraction> {
    let mut out = extract_raw(samples, n)?;
    let mut values = out.spectrum.values().to_vec();
    for (i, v) in values.iter_mut().enumerate() {
        if *v < 0.0 {
            if *v > -1e-8 {
                *v = 0.0;
            } else {
                return Err(Error::NegativeIntensity { m: i as i64 - n as i64, value: *v });
            }
        }
    }
    out.spectrum = MqcSpectrum::new(n, values, Source::Protocol)?;
    Ok(out)
}

/// Like [`extract_mqc`] but keeps negative values; for signals whose echo
/// identity is broken, where the Fourier weights are not intensities.
pub fn extract_mqc_uncalibrated(samples: &[(f64, f64)], n: usize) -> Result<Extraction> {
    let mut out = extract_raw(samples, n)?;
    out.spectrum = out.spectrum.with_source(Source::Uncalibrated);
    Ok(out)
}

fn extract_raw(samples: &[(f64, f64)], n: usize) -> Result<Extraction> {
    let k = samples.len();
    let needed = 2 * n + 1;
    if k < needed {
        return Err(Error::TooFewSamples { got: k, needed });
    }
    for (j, &(phi, _)) in samples.iter().enumerate() {
        if (phi - TAU * j as f64 / k as f64).abs() > 1e-9 {
            return Err(Error::NonUniformGrid);
        }
    }
    let mut buf: Vec<C64> = samples.iter().map(|&(_, f)| C64::new(f, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(k).process(&mut buf);
    let scale = 1.0 / k as f64;
    // the FFT bin of order m is -m mod k
    let order = |m: i64| buf[(-m).rem_euclid(k as i64) as usize] * scale;
    let raw: Vec<C64> = (-(n as i64)..=n as i64).map(order).collect();
    let max_imaginary = raw.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    let max_asymmetry = (0..raw.len()).map(|i| (raw[i].re - raw[raw.len() - 1 - i].re).abs()).fold(0.0, f64::max);
    let max_alias = (n + 1..k - n).map(|i| buf[i].norm() * scale).fold(0.0, f64::max);
    let values = (0..raw.len()).map(|i| 0.5 * (raw[i].re + raw[raw.len() - 1 - i].re)).collect();
    Ok(Extraction { spectrum: MqcSpectrum::new(n, values, Source::Protocol)?, max_imaginary, max_alias, max_asymmetry })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Validity {
    pub valid: bool,
    pub diagnostic: String,
}

/// The echo returns the forward-state intensities only when up/down flips
/// are balanced; dephasing alone is fine.
pub fn protocol_validity_check(rates: &DecoherenceRates) -> Validity {
    let diff = (rates.gamma_ud - rates.gamma_du).abs();
    if diff <= 1e-12 {
        Validity { valid: true, diagnostic: "balanced spin flips; extracted spectra are forward-state intensities".into() }
    } else {
        Validity {
            valid: false,
            diagnostic: format!(
                "gamma_ud = {} and gamma_du = {} differ by {diff:e}; extracted spectra are uncalibrated",
                rates.gamma_ud, rates.gamma_du
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EchoMeasurement {
    pub samples: Vec<(f64, f64)>,
    pub extraction: Extraction,
    pub validity: Validity,
}

/// Runs the echo and extracts the spectrum, tagging it uncalibrated when the
/// rates break the echo identity.
pub fn measure_mqc(cfg: &ProtocolConfig, initial: &DickeState) -> Result<EchoMeasurement> {
    let samples = run_echo_protocol(cfg, initial)?;
    let validity = protocol_validity_check(&cfg.rates);
    let extraction = if validity.valid {
        extract_mqc(&samples, cfg.params.n)?
    } else {
        extract_mqc_uncalibrated(&samples, cfg.params.n)?
    };
    Ok(EchoMeasurement { samples, extraction, validity })
}
