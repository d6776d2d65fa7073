//! Model parameters shared by every engine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Transverse-field Ising model `H = -(J/N) S_x^2 - Omega S_z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub j: f64,
    pub omega: f64,
}

impl ModelParams {
    pub fn new(n: usize, j: f64, omega: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParticleCount(n));
        }
        if !j.is_finite() || !omega.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "couplings must be finite (J = {j}, Omega = {omega})"
            )));
        }
        Ok(Self { n, j, omega })
    }

    pub fn ising(n: usize, j: f64) -> Result<Self> {
        Self::new(n, j, 0.0)
    }
}

/// Single-particle decoherence rates (1/time).
///
/// `gamma_ud` drives |up> -> |down>, `gamma_du` the reverse, `gamma_el` is
/// elastic dephasing with jump operator |up><up|.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DecoherenceRates {
    pub gamma_ud: f64,
    pub gamma_du: f64,
    pub gamma_el: f64,
}

impl DecoherenceRates {
    pub const ZERO: Self = Self { gamma_ud: 0.0, gamma_du: 0.0, gamma_el: 0.0 };

    pub fn new(gamma_ud: f64, gamma_du: f64, gamma_el: f64) -> Result<Self> {
        let rates = Self { gamma_ud, gamma_du, gamma_el };
        rates.validate()?;
        Ok(rates)
    }

    /// Split a total rate `Gamma = (G_ud + G_du + G_el) / 2` according to the
    /// ratio `ud : du : el`.
    pub fn from_total(total: f64, ratio: [f64; 3]) -> Result<Self> {
        let sum: f64 = ratio.iter().sum();
        if sum <= 0.0 {
            return Err(Error::InvalidParameter("rate ratio must have a positive sum".into()));
        }
        let unit = 2.0 * total / sum;
        Self::new(unit * ratio[0], unit * ratio[1], unit * ratio[2])
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma_ud", self.gamma_ud),
            ("gamma_du", self.gamma_du),
            ("gamma_el", self.gamma_el),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.gamma_ud == 0.0 && self.gamma_du == 0.0 && self.gamma_el == 0.0
    }

    /// Total rate `(G_ud + G_du + G_el) / 2`.
    pub fn total(&self) -> f64 {
        0.5 * (self.gamma_ud + self.gamma_du + self.gamma_el)
    }
}

/// Unit rotation axis `n`; the generator is `A = S_n = n . S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinAxis {
    n: [f64; 3],
}

impl SpinAxis {
    pub const X: Self = Self { n: [1.0, 0.0, 0.0] };
    pub const Y: Self = Self { n: [0.0, 1.0, 0.0] };
    pub const Z: Self = Self { n: [0.0, 0.0, 1.0] };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::NonUnitAxis(norm));
        }
        Ok(Self { n: [x, y, z] })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if norm <= 0.0 || !norm.is_finite() {
            return Err(Error::NonUnitAxis(norm));
        }
        Ok(Self { n: [x / norm, y / norm, z / norm] })
    }

    /// `n = (sin(theta) cos(phi), sin(theta) sin(phi), cos(theta))`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self { n: [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()] }
    }

    pub fn components(&self) -> [f64; 3] {
        self.n
    }

    pub fn x(&self) -> f64 {
        self.n[0]
    }

    pub fn y(&self) -> f64 {
        self.n[1]
    }

    pub fn z(&self) -> f64 {
        self.n[2]
    }

    /// Polar and azimuthal angles `(theta, phi)` with `theta` in `[0, pi]`.
    pub fn angles(&self) -> (f64, f64) {
        let rho = self.n[0].hypot(self.n[1]);
        let theta = rho.atan2(self.n[2]);
        let phi = if rho < 1e-15 { 0.0 } else { self.n[1].atan2(self.n[0]) };
        (theta, phi)
    }

    /// Representative with `n_z >= 0`; coherence spectra are invariant under `n -> -n`.
    pub fn upper_hemisphere(&self) -> Self {
        if self.n[2] < 0.0 {
            Self { n: [-self.n[0], -self.n[1], -self.n[2]] }
        } else {
            *self
        }
    }

    pub fn dot(&self, v: [f64; 3]) -> f64 {
        self.n[0] * v[0] + self.n[1] * v[1] + self.n[2] * v[2]
    }
}

/// Direction of the coherent part of a propagation step.
///
/// `Backward` flips the sign of the Hamiltonian only; dissipators are unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Backward => -1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_validation() {
        assert!(SpinAxis::new(1.0, 0.0, 0.0).is_ok());
        assert!(matches!(SpinAxis::new(1.0, 1.0, 0.0), Err(Error::NonUnitAxis(_))));
        let a = SpinAxis::normalized(1.0, 1.0, 0.0).unwrap();
        assert!((a.x() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn angles_round_trip() {
        let a = SpinAxis::from_angles(0.7, -1.2);
        let (t, p) = a.angles();
        assert!((t - 0.7).abs() < 1e-14 && (p + 1.2).abs() < 1e-14);
    }

    #[test]
    fn rates_from_total() {
        let r = DecoherenceRates::from_total(60.0, [1.0, 1.0, 10.0]).unwrap();
        assert!((r.gamma_ud - 10.0).abs() < 1e-12);
        assert!((r.gamma_el - 100.0).abs() < 1e-12);
        assert!((r.total() - 60.0).abs() < 1e-12);
        assert!(DecoherenceRates::new(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0, 1.0, 0.0).is_err());
        assert!(ModelParams::new(2, f64::NAN, 0.0).is_err());
    }
}
