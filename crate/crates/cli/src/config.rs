//! Run configuration: strict JSON parsing, defaults and validation.

use std::path::PathBuf;

use mqc_core::protocol::Backend;
use mqc_core::{DecoherenceRates, ModelParams, SpinAxis};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {field}: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { field: field.into(), message: message.into() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub rates: RatesSpec,
    pub protocol: ProtocolSection,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepAxis>,
    #[serde(default)]
    pub outputs: Outputs,
    #[serde(default)]
    pub seed: u64,
    /// also report von Neumann and Renyi-2 entropies of the state and of half the ensemble
    #[serde(default)]
    pub entropies: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(alias = "N")]
    pub n: usize,
    #[serde(alias = "J")]
    pub j: f64,
    #[serde(default, alias = "Omega")]
    pub omega: f64,
}

/// Either explicit rates or a total `Gamma = (G_ud + G_du + G_el)/2` split by a ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatesSpec {
    Split(SplitRates),
    Explicit(ExplicitRates),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitRates {
    pub total: f64,
    /// `gamma_ud : gamma_du : gamma_el`
    #[serde(default = "default_ratio")]
    pub ratio: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitRates {
    pub gamma_ud: f64,
    pub gamma_du: f64,
    pub gamma_el: f64,
}

fn default_ratio() -> [f64; 3] {
    [1.0, 1.0, 10.0]
}

impl Default for RatesSpec {
    fn default() -> Self {
        RatesSpec::Split(SplitRates { total: 0.0, ratio: default_ratio() })
    }
}

impl RatesSpec {
    fn ratio(&self) -> [f64; 3] {
        match self {
            RatesSpec::Split(s) => s.ratio,
            RatesSpec::Explicit(e) => [e.gamma_ud, e.gamma_du, e.gamma_el],
        }
    }

    fn rates(&self) -> Result<DecoherenceRates, ConfigError> {
        match self {
            RatesSpec::Split(s) => {
                if !s.total.is_finite() || s.total < 0.0 {
                    return Err(invalid("rates.total", format!("must be finite and >= 0, got {}", s.total)));
                }
                DecoherenceRates::from_total(s.total, s.ratio).map_err(|e| invalid("rates.ratio", e.to_string()))
            }
            RatesSpec::Explicit(e) => {
                DecoherenceRates::new(e.gamma_ud, e.gamma_du, e.gamma_el).map_err(|err| invalid("rates", err.to_string()))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolSection {
    /// evolution time
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// dimensionless alternative to `t`: the product `J t`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jt: Option<f64>,
    #[serde(default)]
    pub axis: AxisSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_samples: Option<usize>,
    #[serde(default)]
    pub backend: BackendChoice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AxisSpec {
    Mode(AxisMode),
    Vector([f64; 3]),
    Angles(AxisAngles),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisMode {
    /// maximize `F_I` with the run's own backend and rates
    Optimal,
    /// maximize the QFI of the rate-free evolution, then use that axis with the actual rates
    OptimalCoherent,
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisAngles {
    pub theta: f64,
    pub phi: f64,
}

impl Default for AxisSpec {
    fn default() -> Self {
        AxisSpec::Mode(AxisMode::OptimalCoherent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum BackendChoice {
    #[default]
    Auto,
    #[serde(alias = "dicke_pure")]
    Dicke,
    #[serde(alias = "sym_liouville")]
    Sym,
    #[serde(alias = "exact_oracle")]
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    T,
    Jt,
    /// total rate `Gamma`, split by the configured ratio
    Gamma,
    /// `Gamma N / J`
    GammaScaled,
    N,
    J,
    Omega,
    AxisTheta,
    AxisPhi,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::T => "t",
            SweepParam::Jt => "jt",
            SweepParam::Gamma => "gamma",
            SweepParam::GammaScaled => "gamma_scaled",
            SweepParam::N => "n",
            SweepParam::J => "j",
            SweepParam::Omega => "omega",
            SweepParam::AxisTheta => "axis_theta",
            SweepParam::AxisPhi => "axis_phi",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub parameter: SweepParam,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linspace: Option<Linspace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Linspace {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SweepAxis {
    pub fn resolved_values(&self) -> Vec<f64> {
        match (&self.values, &self.linspace) {
            (Some(v), _) => v.clone(),
            (None, Some(l)) if l.points == 1 => vec![l.start],
            (None, Some(l)) => {
                (0..l.points).map(|i| l.start + (l.stop - l.start) * i as f64 / (l.points - 1) as f64).collect()
            }
            (None, None) => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_dir() -> PathBuf {
    PathBuf::from("mqc-out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

impl Default for Outputs {
    fn default() -> Self {
        Self { dir: default_dir(), formats: default_formats() }
    }
}

/// Fully resolved inputs of one computation.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    /// swept `(parameter, value)` pairs, in sweep order
    pub coords: Vec<(SweepParam, f64)>,
    pub params: ModelParams,
    pub rates: DecoherenceRates,
    pub t: f64,
    pub axis: AxisRequest,
    pub phi_samples: Option<usize>,
    pub backend: Backend,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisRequest {
    Optimal,
    OptimalCoherent,
    Fixed(SpinAxis),
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let cfg: RunConfig = serde_json::from_str(text)?;
    cfg.points()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the canonical serialization, excluding output settings.
    pub fn hash(&self) -> String {
        let mut stripped = self.clone();
        stripped.outputs = Outputs::default();
        let digest = Sha256::digest(serde_json::to_vec(&stripped).expect("config serializes"));
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn is_sweep(&self) -> bool {
        !self.sweep.is_empty()
    }

    /// Expands the sweep (cartesian product, first axis slowest) into validated points.
    pub fn points(&self) -> Result<Vec<Point>, ConfigError> {
        if self.outputs.formats.is_empty() {
            return Err(invalid("outputs.formats", "at least one of csv, json is required"));
        }
        if self.outputs.dir.as_os_str().is_empty() {
            return Err(invalid("outputs.dir", "must not be empty"));
        }
        let mut grids = Vec::new();
        for (i, axis) in self.sweep.iter().enumerate() {
            let field = format!("sweep[{i}]");
            match (&axis.values, &axis.linspace) {
                (Some(_), Some(_)) => return Err(invalid(field, "give either values or linspace, not both")),
                (None, None) => return Err(invalid(field, "needs values or linspace")),
                (None, Some(l)) if l.points == 0 => return Err(invalid(format!("{field}.linspace.points"), "must be >= 1")),
                _ => {}
            }
            if self.sweep[..i].iter().any(|a| a.parameter == axis.parameter) {
                return Err(invalid(format!("{field}.parameter"), "swept more than once"));
            }
            let values = axis.resolved_values();
            if values.is_empty() {
                return Err(invalid(format!("{field}.values"), "must not be empty"));
            }
            if let Some(v) = values.iter().find(|v| !v.is_finite()) {
                return Err(invalid(format!("{field}.values"), format!("non-finite value {v}")));
            }
            grids.push((axis.parameter, values));
        }
        let time_axes = grids.iter().filter(|(p, _)| matches!(p, SweepParam::T | SweepParam::Jt)).count();
        if time_axes > 1 {
            return Err(invalid("sweep", "t and jt cannot both be swept"));
        }
        let time_swept = time_axes == 1;
        match (self.protocol.t, self.protocol.jt) {
            (Some(_), Some(_)) => return Err(invalid("protocol", "give either t or jt, not both")),
            (None, None) if !time_swept => return Err(invalid("protocol.t", "an evolution time (t or jt) is required")),
            _ => {}
        }
        let rate_swept = grids.iter().filter(|(p, _)| matches!(p, SweepParam::Gamma | SweepParam::GammaScaled)).count();
        if rate_swept > 1 {
            return Err(invalid("sweep", "gamma and gamma_scaled cannot both be swept"));
        }
        if rate_swept == 1 && self.rates.ratio().iter().sum::<f64>() <= 0.0 {
            return Err(invalid("rates", "a rate sweep needs a ratio with positive sum"));
        }

        let mut coords: Vec<Vec<(SweepParam, f64)>> = vec![Vec::new()];
        for (param, values) in &grids {
            coords = coords
                .into_iter()
                .flat_map(|c| {
                    values.iter().map(move |&v| {
                        let mut next = c.clone();
                        next.push((*param, v));
                        next
                    })
                })
                .collect();
        }
        coords
            .into_iter()
            .enumerate()
            .map(|(i, c)| {
                self.point(c.clone()).map_err(|e| match e {
                    ConfigError::Invalid { field, message } if !c.is_empty() => {
                        invalid(field, format!("{message} (sweep point {i}: {})", describe(&c)))
                    }
                    other => other,
                })
            })
            .collect()
    }

    fn point(&self, coords: Vec<(SweepParam, f64)>) -> Result<Point, ConfigError> {
        let get = |p: SweepParam| coords.iter().find(|(q, _)| *q == p).map(|&(_, v)| v);
        let n = match get(SweepParam::N) {
            Some(v) if v >= 1.0 && v.fract() == 0.0 => v as usize,
            Some(v) => return Err(invalid("sweep.n", format!("particle counts must be positive integers, got {v}"))),
            None => self.model.n,
        };
        let j = get(SweepParam::J).unwrap_or(self.model.j);
        let omega = get(SweepParam::Omega).unwrap_or(self.model.omega);
        let params = ModelParams::new(n, j, omega).map_err(|e| invalid("model", e.to_string()))?;

        let t = if let Some(t) = get(SweepParam::T) {
            t
        } else if let Some(jt) = get(SweepParam::Jt) {
            jt / j
        } else if let Some(t) = self.protocol.t {
            t
        } else {
            self.protocol.jt.unwrap_or(0.0) / j
        };
        if !t.is_finite() || t < 0.0 {
            return Err(invalid("protocol.t", format!("must be finite and >= 0, got {t}")));
        }

        let rates = if let Some(g) = get(SweepParam::Gamma) {
            RatesSpec::Split(SplitRates { total: g, ratio: self.rates.ratio() }).rates()?
        } else if let Some(g) = get(SweepParam::GammaScaled) {
            RatesSpec::Split(SplitRates { total: g * j / n as f64, ratio: self.rates.ratio() }).rates()?
        } else {
            self.rates.rates()?
        };

        let axis = match &self.protocol.axis {
            AxisSpec::Mode(AxisMode::Optimal) => AxisRequest::Optimal,
            AxisSpec::Mode(AxisMode::OptimalCoherent) => AxisRequest::OptimalCoherent,
            AxisSpec::Mode(AxisMode::X) => AxisRequest::Fixed(SpinAxis::X),
            AxisSpec::Mode(AxisMode::Y) => AxisRequest::Fixed(SpinAxis::Y),
            AxisSpec::Mode(AxisMode::Z) => AxisRequest::Fixed(SpinAxis::Z),
            AxisSpec::Vector(v) => AxisRequest::Fixed(
                SpinAxis::normalized(v[0], v[1], v[2]).map_err(|e| invalid("protocol.axis", e.to_string()))?,
            ),
            AxisSpec::Angles(a) => AxisRequest::Fixed(SpinAxis::from_angles(a.theta, a.phi)),
        };
        let axis = match (get(SweepParam::AxisTheta), get(SweepParam::AxisPhi), axis) {
            (None, None, a) => a,
            (theta, phi, AxisRequest::Fixed(a)) => {
                let (t0, p0) = a.angles();
                AxisRequest::Fixed(SpinAxis::from_angles(theta.unwrap_or(t0), phi.unwrap_or(p0)))
            }
            _ => return Err(invalid("protocol.axis", "axis angle sweeps need a fixed axis, not an optimized one")),
        };

        if let Some(k) = self.protocol.phi_samples {
            if k < 2 * n + 1 {
                return Err(invalid("protocol.phi_samples", format!("need at least 2N + 1 = {} samples, got {k}", 2 * n + 1)));
            }
        }
        let backend = match self.protocol.backend {
            BackendChoice::Auto => Backend::auto(&params, &rates),
            BackendChoice::Dicke => Backend::DickePure.check(&params, &rates).map(|_| Backend::DickePure),
            BackendChoice::Sym => Backend::SymLiouville.check(&params, &rates).map(|_| Backend::SymLiouville),
            BackendChoice::Exact => Backend::ExactOracle.check(&params, &rates).map(|_| Backend::ExactOracle),
        }
        .map_err(|e| invalid("protocol.backend", e.to_string()))?;
        Ok(Point { coords, params, rates, t, axis, phi_samples: self.protocol.phi_samples, backend })
    }
}

fn describe(coords: &[(SweepParam, f64)]) -> String {
    coords.iter().map(|(p, v)| format!("{} = {v}", p.name())).collect::<Vec<_>>().join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(r#"{"model": {"N": 4, "J": 1}, "protocol": {"t": 1}}"#).unwrap();
        let p = &cfg.points().unwrap()[0];
        assert_eq!(p.params.omega, 0.0);
        assert!(p.rates.is_zero());
        assert_eq!(cfg.protocol.backend, BackendChoice::Auto);
        assert_eq!(p.backend, Backend::DickePure);
        assert_eq!(p.axis, AxisRequest::OptimalCoherent);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse_config(r#"{"model": {"n": 4, "j": 1, "gamma": 2}, "protocol": {"t": 1}}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field `gamma`"), "{err}");
        assert!(err.to_string().contains("line 1"), "{err}");
    }

    #[test]
    fn invariant_errors_name_the_field() {
        let err = parse_config(r#"{"model": {"n": 4, "j": 1}, "protocol": {}}"#).unwrap_err();
        assert!(err.to_string().contains("protocol.t"), "{err}");
        let err = parse_config(
            r#"{"model": {"n": 4, "j": 1}, "protocol": {"t": 1}, "sweep": [{"parameter": "t", "values": []}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("sweep[0].values"), "{err}");
    }

    #[test]
    fn linspace_endpoints() {
        let axis = SweepAxis { parameter: SweepParam::Jt, values: None, linspace: Some(Linspace { start: 0.0, stop: 3.0, points: 4 }) };
        assert_eq!(axis.resolved_values(), vec![0.0, 1.0, 2.0, 3.0]);
    }
}
