//! Evaluation of a single resolved point: echo, spectrum, witnesses, QFI.

use anyhow::Context;
use mqc_core::blocks::{build_dicke_blocks, partial_trace_sym};
use mqc_core::dicke::{DickeState, Propagator};
use mqc_core::exact::{evolve_lindblad_full, mqc_direct_full, qfi_mixed_full, Frame, FullDensityMatrix};
use mqc_core::moments::squeezing_parameter;
use mqc_core::protocol::{measure_mqc, to_twist_frame, Backend, EchoMeasurement, ProtocolConfig};
use mqc_core::sym::{BlockLiouvillian, SymRotator, SymmetricState};
use mqc_core::witness::{optimize_axis, witness_report, AxisGrid, WitnessReport};
use mqc_core::{DecoherenceRates, Direction, MqcSpectrum, SpinAxis};
use serde::Serialize;

use crate::config::{AxisRequest, Point};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyPair {
    pub von_neumann: f64,
    pub renyi2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Entropies {
    pub state: EntropyPair,
    pub traced_particles: usize,
    pub reduced: EntropyPair,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostics {
    pub max_imaginary: f64,
    pub max_alias: f64,
    pub max_asymmetry: f64,
    pub valid: bool,
    pub validity: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointRecord {
    pub n: usize,
    pub j: f64,
    pub omega: f64,
    pub t: f64,
    pub rates: DecoherenceRates,
    pub backend: Backend,
    pub axis: [f64; 3],
    pub phi: Vec<f64>,
    pub signal: Vec<f64>,
    pub witness: WitnessReport,
    pub diagnostics: Diagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropies: Option<Entropies>,
}

impl PointRecord {
    pub fn spectrum(&self) -> &MqcSpectrum {
        &self.witness.spectrum
    }

    pub fn f_q(&self) -> f64 {
        self.witness.qfi.unwrap_or(f64::NAN)
    }
}

/// Forward state `rho_t`; the symmetric and full-space engines work in the twisting frame.
enum Forward {
    Pure(DickeState),
    Sym(SymmetricState),
    Full(FullDensityMatrix),
}

impl Forward {
    fn compute(point: &Point, initial: &DickeState) -> mqc_core::Result<Self> {
        let p = &point.params;
        Ok(match point.backend {
            Backend::DickePure => Forward::Pure(Propagator::new(*p).evolve(initial, point.t)?),
            Backend::SymLiouville => {
                let rho0 = SymmetricState::from_dicke(&to_twist_frame(initial))?;
                let gen = BlockLiouvillian::new(p.n, p.j, point.rates)?;
                Forward::Sym(gen.propagator(point.t, Direction::Forward)?.apply(&rho0)?)
            }
            Backend::ExactOracle => {
                let rho0 = FullDensityMatrix::from_dicke(&to_twist_frame(initial))?;
                Forward::Full(evolve_lindblad_full(&rho0, p, &point.rates, point.t, Direction::Forward, Frame::Twist)?)
            }
        })
    }

    fn qfi(&self, axis: &SpinAxis) -> mqc_core::Result<f64> {
        let twisted = Frame::Twist.map_axis(axis);
        Ok(match self {
            Forward::Pure(s) => s.qfi(axis),
            Forward::Sym(s) => build_dicke_blocks(s)?.qfi(&twisted),
            Forward::Full(rho) => qfi_mixed_full(rho, &twisted),
        })
    }

    fn direct_spectrum(&self, axis: &SpinAxis) -> mqc_core::Result<MqcSpectrum> {
        let twisted = Frame::Twist.map_axis(axis);
        Ok(match self {
            Forward::Pure(s) => s.mqc_spectrum(axis),
            Forward::Sym(s) => SymRotator::new(s.n()).mqc(s, &twisted)?,
            Forward::Full(rho) => mqc_direct_full(rho, &twisted),
        })
    }

    fn squeezing(&self) -> Option<f64> {
        match self {
            Forward::Pure(s) => squeezing_parameter(s).ok(),
            Forward::Sym(s) => squeezing_parameter(s).ok(),
            Forward::Full(_) => None,
        }
    }

    fn entropies(&self) -> mqc_core::Result<Entropies> {
        let pair = |e: mqc_core::blocks::Entropies| EntropyPair { von_neumann: e.von_neumann, renyi2: e.renyi2 };
        let (state, traced, reduced) = match self {
            Forward::Pure(s) => {
                let sym = SymmetricState::from_dicke(s)?;
                let traced = s.n() / 2;
                let reduced = build_dicke_blocks(&partial_trace_sym(&sym, traced)?)?.entropies();
                (EntropyPair { von_neumann: 0.0, renyi2: 0.0 }, traced, pair(reduced))
            }
            Forward::Sym(s) => {
                let traced = s.n() / 2;
                let reduced = build_dicke_blocks(&partial_trace_sym(s, traced)?)?.entropies();
                (pair(build_dicke_blocks(s)?.entropies()), traced, pair(reduced))
            }
            Forward::Full(rho) => {
                let traced = rho.n() / 2;
                let (vn, r2) = rho.entropies();
                let (rvn, rr2) = rho.partial_trace(traced)?.entropies();
                (EntropyPair { von_neumann: vn, renyi2: r2 }, traced, EntropyPair { von_neumann: rvn, renyi2: rr2 })
            }
        };
        Ok(Entropies { state, traced_particles: traced, reduced })
    }
}

pub fn resolve_axis(point: &Point, initial: &DickeState) -> mqc_core::Result<SpinAxis> {
    Ok(match point.axis {
        AxisRequest::Fixed(a) => a,
        AxisRequest::Optimal => {
            optimize_axis(point.backend, &point.params, &point.rates, point.t, initial, AxisGrid::default())?.axis
        }
        AxisRequest::OptimalCoherent => {
            let zero = DecoherenceRates::ZERO;
            optimize_axis(Backend::DickePure, &point.params, &zero, point.t, initial, AxisGrid::default())?.axis
        }
    })
}

fn protocol_config(point: &Point, axis: SpinAxis) -> mqc_core::Result<ProtocolConfig> {
    let cfg = ProtocolConfig::new(point.params, point.rates, point.t, axis, point.backend)?;
    match point.phi_samples {
        Some(k) => cfg.with_phi_samples(k),
        None => Ok(cfg),
    }
}

/// Full record for one point: echo signal, extracted spectrum, witness report and QFI.
pub fn evaluate(point: &Point, entropies: bool) -> anyhow::Result<PointRecord> {
    let initial = DickeState::all_up(point.params.n)?;
    let axis = resolve_axis(point, &initial).context("axis optimization failed")?;
    let cfg = protocol_config(point, axis)?;
    let EchoMeasurement { samples, extraction, validity } =
        measure_mqc(&cfg, &initial).context("echo protocol failed")?;
    let forward = Forward::compute(point, &initial)?;
    let qfi = forward.qfi(&axis)?;
    let mut witness = witness_report(&extraction.spectrum, point.params.n, Some(qfi))?;
    if let Some(xi2) = forward.squeezing() {
        witness = witness.with_squeezing(xi2);
    }
    let entropies = if entropies { Some(forward.entropies()?) } else { None };
    Ok(PointRecord {
        n: point.params.n,
        j: point.params.j,
        omega: point.params.omega,
        t: point.t,
        rates: point.rates,
        backend: point.backend,
        axis: axis.components(),
        phi: samples.iter().map(|s| s.0).collect(),
        signal: samples.iter().map(|s| s.1).collect(),
        witness,
        diagnostics: Diagnostics {
            max_imaginary: extraction.max_imaginary,
            max_alias: extraction.max_alias,
            max_asymmetry: extraction.max_asymmetry,
            valid: validity.valid,
            validity: validity.diagnostic,
        },
        entropies,
    })
}

/// Spectrum only: either extracted through the echo or evaluated directly on `rho_t`.
pub fn spectrum_only(point: &Point, direct: bool) -> anyhow::Result<(SpinAxis, MqcSpectrum)> {
    let initial = DickeState::all_up(point.params.n)?;
    let axis = resolve_axis(point, &initial)?;
    let spec = if direct {
        Forward::compute(point, &initial)?.direct_spectrum(&axis)?
    } else {
        measure_mqc(&protocol_config(point, axis)?, &initial)?.extraction.spectrum
    };
    Ok((axis, spec))
}
