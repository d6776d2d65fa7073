//! Multiple-quantum intensity spectra `I_m`, `m = -N ..= N`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a spectrum came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Evaluated from the state itself.
    Direct,
    /// Fourier-extracted from an echo signal.
    Protocol,
    /// Fourier-extracted from an echo signal whose dissipators break the
    /// echo identity; the values are not intensities of the forward state.
    Uncalibrated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MqcSpectrum {
    n: usize,
    values: Vec<f64>,
    source: Source,
}

impl MqcSpectrum {
    /// `values[i]` holds `I_{i - N}`.
    pub fn new(n: usize, values: Vec<f64>, source: Source) -> Result<Self> {
        if values.len() != 2 * n + 1 {
            return Err(Error::DimensionMismatch { expected: 2 * n + 1, got: values.len() });
        }
        Ok(Self { n, values, source })
    }

    pub fn from_fn(n: usize, source: Source, mut f: impl FnMut(i64) -> f64) -> Self {
        let values = (-(n as i64)..=n as i64).map(&mut f).collect();
        Self { n, values, source }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn with_source(mut self, source: Source) -> Self {
        self.source = source;
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `I_m`, zero outside `|m| <= N`.
    pub fn get(&self, m: i64) -> f64 {
        if m.unsigned_abs() as usize > self.n {
            0.0
        } else {
            self.values[(m + self.n as i64) as usize]
        }
    }

    pub fn orders(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let n = self.n as i64;
        self.values.iter().enumerate().map(move |(i, &v)| (i as i64 - n, v))
    }

    /// `sum_m I_m`, equal to the purity `tr rho^2` for intensities of a state.
    pub fn total(&self) -> f64 {
        crate::math::neumaier_sum(self.values.iter().copied())
    }

    /// `F_I = 2 sum_m m^2 I_m`.
    pub fn fisher_lower_bound(&self) -> f64 {
        2.0 * crate::math::neumaier_sum(self.orders().map(|(m, v)| (m * m) as f64 * v))
    }

    /// Largest violation of `I_m >= -tol`, `I_m = I_{-m}` (in that order).
    pub fn invariant_defects(&self) -> (f64, f64) {
        let neg = self.values.iter().fold(0.0_f64, |acc, &v| acc.max(-v));
        let asym = (1..=self.n as i64)
            .map(|m| (self.get(m) - self.get(-m)).abs())
            .fold(0.0_f64, f64::max);
        (neg, asym)
    }

    /// Spectrum of `rho_A (x) rho_B`: `I_m = sum_k I_{m-k}(A) I_k(B)`.
    pub fn tensor(&self, other: &MqcSpectrum) -> MqcSpectrum {
        let n = self.n + other.n;
        let nb = other.n as i64;
        MqcSpectrum::from_fn(n, Source::Direct, |m| {
            crate::math::neumaier_sum((-nb..=nb).map(|k| self.get(m - k) * other.get(k)))
        })
    }

    /// Single spin in `sqrt(p)|up> + e^{i phi} sqrt(1-p)|down>`.
    pub fn single_particle(p: f64) -> Result<MqcSpectrum> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("probability must lie in [0, 1], got {p}")));
        }
        let off = p * (1.0 - p);
        MqcSpectrum::new(1, vec![off, p * p + (1.0 - p) * (1.0 - p), off], Source::Direct)
    }

    /// Spectrum of the zero-particle state (`I_0 = 1`), the unit of `tensor`.
    pub fn vacuum() -> MqcSpectrum {
        MqcSpectrum { n: 0, values: vec![1.0], source: Source::Direct }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_particle_edges() {
        let s = MqcSpectrum::single_particle(0.0).unwrap();
        assert_eq!(s.values(), &[0.0, 1.0, 0.0]);
        let h = MqcSpectrum::single_particle(0.5).unwrap();
        assert_eq!(h.values(), &[0.25, 0.5, 0.25]);
        assert!(MqcSpectrum::single_particle(1.5).is_err());
    }

    #[test]
    fn tensor_with_polarized_spin_is_neutral() {
        let plus = MqcSpectrum::single_particle(0.5).unwrap();
        let up = MqcSpectrum::single_particle(1.0).unwrap();
        let prod = plus.tensor(&up);
        assert_eq!(prod.n(), 2);
        assert_eq!(prod.get(0), 0.5);
        assert_eq!(prod.get(1), 0.25);
        assert_eq!(prod.get(2), 0.0);
    }

    #[test]
    fn fisher_bound_of_two_spin_css() {
        let plus = MqcSpectrum::single_particle(0.5).unwrap();
        let two = plus.tensor(&plus);
        assert_eq!(two.values(), &[0.0625, 0.25, 0.375, 0.25, 0.0625]);
        assert!((two.fisher_lower_bound() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn length_is_checked() {
        assert!(MqcSpectrum::new(2, vec![0.0; 4], Source::Direct).is_err());
    }
}
