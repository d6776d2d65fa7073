//! One-axis twisting plus single-site decoherence in the `(n_z, n_+, n_-)` basis.
//!
//! In the twisting frame `H = -(J/N) S_z^2`, and every generator conserves
//! `(n_+, n_-)`, so each block is tridiagonal in `n_z`. Block exponentials are
//! taken after the similarity `v_k = c_k sqrt(binom(D, k))`, `D = N - n_+ - n_-`,
//! which turns the coherent part into `i (J m / N) K` with `K` real symmetric.

use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use super::{SymLayout, SymmetricState};
use crate::error::{Error, Result};
use crate::parallel;
use crate::params::{DecoherenceRates, Direction};

const ZERO: C64 = C64::new(0.0, 0.0);

/// `sub[k]` is entry `(k + 1, k)`, `sup[k]` is entry `(k, k + 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<C64>,
    pub diag: Vec<C64>,
    pub sup: Vec<C64>,
}

impl Tridiagonal {
    fn zeros(dim: usize) -> Self {
        Self { sub: vec![ZERO; dim - 1], diag: vec![ZERO; dim], sup: vec![ZERO; dim - 1] }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn dense(&self) -> DMatrix<C64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for k in 0..d {
            m[(k, k)] = self.diag[k];
            if k + 1 < d {
                m[(k + 1, k)] = self.sub[k];
                m[(k, k + 1)] = self.sup[k];
            }
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.sub.iter().chain(&self.diag).chain(&self.sup).all(|x| *x == ZERO)
    }
}

/// Generator of `d c / dt`, stored through its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockLiouvillian {
    n: usize,
    j: f64,
    rates: DecoherenceRates,
}

pub fn build_interaction_blocks(n: usize, j: f64) -> Result<BlockLiouvillian> {
    BlockLiouvillian::new(n, j, DecoherenceRates::ZERO)
}

pub fn build_dissipator(n: usize, rates: DecoherenceRates) -> Result<BlockLiouvillian> {
    BlockLiouvillian::new(n, 0.0, rates)
}

/// Propagates `state` by `exp(L t)`; `Backward` negates the Hamiltonian part.
pub fn evolve_sym(
    state: &SymmetricState,
    gen: &BlockLiouvillian,
    t: f64,
    direction: Direction,
) -> Result<SymmetricState> {
    if t == 0.0 {
        if state.n() != gen.n {
            return Err(Error::DimensionMismatch { expected: gen.n, got: state.n() });
        }
        return Ok(state.clone());
    }
    gen.propagator(t, direction)?.apply(state)
}

fn coupling(k: usize, d: usize) -> f64 {
    // sqrt(k (D - k + 1)) for the (k, k - 1) pair
    ((k * (d - k + 1)) as f64).sqrt()
}

impl BlockLiouvillian {
    pub fn new(n: usize, j: f64, rates: DecoherenceRates) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParticleCount(n));
        }
        if !j.is_finite() {
            return Err(Error::InvalidParameter(format!("coupling must be finite, got {j}")));
        }
        rates.validate()?;
        Ok(Self { n, j, rates })
    }

    /// Sum of two generators on the same `N`.
    pub fn combine(&self, other: &BlockLiouvillian) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch { expected: self.n, got: other.n });
        }
        let r = DecoherenceRates::new(
            self.rates.gamma_ud + other.rates.gamma_ud,
            self.rates.gamma_du + other.rates.gamma_du,
            self.rates.gamma_el + other.rates.gamma_el,
        )?;
        Self::new(self.n, self.j + other.j, r)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> f64 {
        self.j
    }

    pub fn rates(&self) -> &DecoherenceRates {
        &self.rates
    }

    fn check_block(&self, n_plus: usize, n_minus: usize) -> Result<usize> {
        if n_plus + n_minus > self.n {
            return Err(Error::InvalidParameter(format!(
                "block ({n_plus}, {n_minus}) exceeds N = {}",
                self.n
            )));
        }
        Ok(self.n - n_plus - n_minus)
    }

    /// `-i[H, .]` on block `(n_+, n_-)`, acting on unit-weight coefficients.
    pub fn coherent_block(&self, n_plus: usize, n_minus: usize) -> Result<Tridiagonal> {
        let d = self.check_block(n_plus, n_minus)?;
        let mut b = Tridiagonal::zeros(d + 1);
        let scale = C64::new(0.0, self.j * (n_plus as f64 - n_minus as f64) / self.n as f64);
        for k in 0..d {
            b.sub[k] = scale * (k + 1) as f64;
            b.sup[k] = scale * (d - k) as f64;
        }
        Ok(b)
    }

    /// Lindblad part on block `(n_+, n_-)`; diagonal when `gamma_ud = gamma_du`.
    pub fn dissipative_block(&self, n_plus: usize, n_minus: usize) -> Result<Tridiagonal> {
        let d = self.check_block(n_plus, n_minus)?;
        let DecoherenceRates { gamma_ud, gamma_du, gamma_el } = self.rates;
        let s = (n_plus + n_minus) as f64;
        let mut b = Tridiagonal::zeros(d + 1);
        for k in 0..=d {
            b.diag[k] = C64::new(-((gamma_ud + gamma_du) * (k as f64 + s / 2.0) + gamma_el * s / 2.0), 0.0);
            if k < d {
                b.sub[k] = C64::new(-(gamma_ud - gamma_du) * (k + 1) as f64, 0.0);
            }
        }
        Ok(b)
    }

    /// Full block for the given direction.
    pub fn block(&self, n_plus: usize, n_minus: usize, direction: Direction) -> Result<Tridiagonal> {
        let mut b = self.coherent_block(n_plus, n_minus)?;
        let diss = self.dissipative_block(n_plus, n_minus)?;
        let sign = direction.sign();
        for (x, y) in b.sub.iter_mut().zip(&diss.sub) {
            *x = *x * sign + y;
        }
        for (x, y) in b.diag.iter_mut().zip(&diss.diag) {
            *x = *x * sign + y;
        }
        for (x, y) in b.sup.iter_mut().zip(&diss.sup) {
            *x = *x * sign + y;
        }
        Ok(b)
    }

    /// Block exponentials `exp(L t)` in scaled coordinates.
    pub fn propagator(&self, t: f64, direction: Direction) -> Result<SymPropagator> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::InvalidParameter(format!("evolution time must be nonnegative, got {t}")));
        }
        let layout = Arc::new(SymLayout::new(self.n));
        let blocks = layout.blocks();
        let n = self.n;
        let theta = direction.sign() * self.j * t / n as f64;
        let exact = self.rates.is_zero();

        // K_D eigendecompositions are shared by all blocks of the same size
        let ds: Vec<usize> = (0..=n).collect();
        let eigs: Vec<Option<SymmetricEigen<f64, nalgebra::Dyn>>> = if exact {
            parallel::map(&ds, |&d| {
                let mut k = DMatrix::zeros(d + 1, d + 1);
                for i in 1..=d {
                    let c = coupling(i, d);
                    k[(i, i - 1)] = c;
                    k[(i - 1, i)] = c;
                }
                Some(SymmetricEigen::new(k))
            })
        } else {
            ds.iter().map(|_| None).collect()
        };

        let upper: Vec<(usize, usize)> = blocks.iter().copied().filter(|&(p, q)| p >= q).collect();
        let rates = self.rates;
        let computed = parallel::map(&upper, |&(p, q)| {
            let d = n - p - q;
            let m = p as f64 - q as f64;
            if t == 0.0 {
                return DMatrix::identity(d + 1, d + 1);
            }
            if let Some(eig) = &eigs[d] {
                let mut scaled: DMatrix<C64> = eig.eigenvectors.map(|x| C64::new(x, 0.0));
                for (col, &l) in eig.eigenvalues.iter().enumerate() {
                    let ph = C64::from_polar(1.0, theta * m * l);
                    scaled.column_mut(col).iter_mut().for_each(|x| *x *= ph);
                }
                scaled * eig.eigenvectors.transpose().map(|x| C64::new(x, 0.0))
            } else {
                let s = (p + q) as f64;
                let mut g = DMatrix::<C64>::zeros(d + 1, d + 1);
                for k in 0..=d {
                    g[(k, k)] = C64::new(
                        -((rates.gamma_ud + rates.gamma_du) * (k as f64 + s / 2.0) + rates.gamma_el * s / 2.0) * t,
                        0.0,
                    );
                    if k >= 1 {
                        let c = coupling(k, d);
                        g[(k, k - 1)] = C64::new(-(rates.gamma_ud - rates.gamma_du) * c * t, theta * m * c);
                        g[(k - 1, k)] = C64::new(0.0, theta * m * c);
                    }
                }
                g.exp()
            }
        });

        let mut by_block: Vec<Option<DMatrix<C64>>> = vec![None; blocks.len()];
        let pos = |p: usize, q: usize| blocks.iter().position(|&b| b == (p, q)).expect("block exists");
        for (&(p, q), mat) in upper.iter().zip(computed) {
            if p != q {
                // the conjugate block evolves with the complex-conjugate generator
                by_block[pos(q, p)] = Some(mat.map(|x| x.conj()));
            }
            by_block[pos(p, q)] = Some(mat);
        }
        Ok(SymPropagator {
            layout,
            blocks: by_block.into_iter().map(|m| m.expect("all blocks filled")).collect(),
        })
    }
}

/// Precomputed `exp(L t)` for every `(n_+, n_-)` block.
#[derive(Debug, Clone)]
pub struct SymPropagator {
    layout: Arc<SymLayout>,
    blocks: Vec<DMatrix<C64>>,
}

impl SymPropagator {
    pub fn n(&self) -> usize {
        self.layout.n()
    }

    pub fn apply(&self, state: &SymmetricState) -> Result<SymmetricState> {
        let n = self.layout.n();
        if state.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: state.n() });
        }
        let coeffs = state.coefficients();
        let blocks = self.layout.blocks();
        let work: Vec<(usize, &(usize, usize))> = blocks.iter().enumerate().collect();
        let results = parallel::map(&work, |&(b, &(p, q))| {
            let d = n - p - q;
            let start = self.layout.index(p, q, 0);
            let v: Vec<C64> = (0..=d).map(|k| coeffs[start + k] * self.layout.sqrt_binom(d, k)).collect();
            let m = &self.blocks[b];
            (0..=d)
                .map(|k| {
                    let acc: C64 = (0..=d).map(|l| m[(k, l)] * v[l]).sum();
                    acc / self.layout.sqrt_binom(d, k)
                })
                .collect::<Vec<C64>>()
        });
        let out: Vec<C64> = results.into_iter().flatten().collect();
        Ok(state.with_coeffs(out))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sym::initial_all_up_sym;
    use crate::params::SpinAxis;
    use approx::assert_abs_diff_eq;

    #[test]
    fn balanced_blocks_are_stationary() {
        let g = build_interaction_blocks(6, 2.0).unwrap();
        for p in 0..=3 {
            assert!(g.coherent_block(p, p).unwrap().is_zero());
        }
        assert!(!g.coherent_block(1, 0).unwrap().is_zero());
    }

    #[test]
    fn two_spin_block_entries() {
        // N = 2, block (1, 0): n_z in {0, 1}
        let g = build_interaction_blocks(2, 1.0).unwrap();
        let b = g.coherent_block(1, 0).unwrap();
        assert_eq!(b.dim(), 2);
        assert_abs_diff_eq!(b.sub[0].im, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(b.sup[0].im, 0.5, epsilon = 1e-15);
        assert_eq!(b.diag[0], ZERO);
    }

    #[test]
    fn dissipator_examples() {
        let el = build_dissipator(4, DecoherenceRates::new(0.0, 0.0, 2.0).unwrap()).unwrap();
        let b = el.dissipative_block(2, 1).unwrap();
        for x in &b.diag {
            assert_abs_diff_eq!(x.re, -3.0, epsilon = 1e-15);
        }
        let g = 0.7;
        let bal = build_dissipator(4, DecoherenceRates::new(g, g, 0.0).unwrap()).unwrap();
        let b = bal.dissipative_block(1, 0).unwrap();
        assert!(b.sub.iter().all(|x| *x == ZERO));
        for (k, x) in b.diag.iter().enumerate() {
            assert_abs_diff_eq!(x.re, -g * (2.0 * k as f64 + 1.0), epsilon = 1e-15);
        }
        let lopsided = build_dissipator(4, DecoherenceRates::new(g, 0.0, 0.0).unwrap()).unwrap();
        assert!(lopsided.dissipative_block(0, 0).unwrap().sub.iter().any(|x| *x != ZERO));
    }

    #[test]
    fn dense_matches_blocks() {
        let g = BlockLiouvillian::new(3, 1.3, DecoherenceRates::new(0.1, 0.2, 0.3).unwrap()).unwrap();
        let b = g.block(2, 0, Direction::Backward).unwrap();
        let dense = b.dense();
        assert_eq!(dense[(1, 0)], b.sub[0]);
        assert_eq!(dense[(0, 1)], b.sup[0]);
    }

    #[test]
    fn forward_backward_identity() {
        let s = initial_all_up_sym(8).unwrap().rotate(&SpinAxis::Y, 1.0);
        let g = build_interaction_blocks(8, 1.7).unwrap();
        let f = evolve_sym(&s, &g, 0.9, Direction::Forward).unwrap();
        let b = evolve_sym(&f, &g, 0.9, Direction::Backward).unwrap();
        let dev = s.coefficients().iter().zip(b.coefficients()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(dev < 1e-12);
        let zero = evolve_sym(&s, &g, 0.0, Direction::Forward).unwrap();
        assert_eq!(zero, s);
    }

    #[test]
    fn dephasing_scales_each_coefficient() {
        let s = initial_all_up_sym(3).unwrap().rotate(&SpinAxis::Y, 0.8);
        let gamma = 0.6;
        let g = build_dissipator(3, DecoherenceRates::new(0.0, 0.0, gamma).unwrap()).unwrap();
        let out = evolve_sym(&s, &g, 1.5, Direction::Forward).unwrap();
        for i in s.layout().indices() {
            let decay = (-gamma * (i.n_plus + i.n_minus) as f64 / 2.0 * 1.5).exp();
            assert_abs_diff_eq!((out.coeff(i) - s.coeff(i) * decay).norm(), 0.0, epsilon = 1e-13);
        }
    }
}
