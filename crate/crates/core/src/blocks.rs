//! Block-diagonal Dicke form `d_{J,M,M'}` of a permutation-symmetric state.
//!
//! A symmetric operator acts as `A_J (x) 1` on every total-spin sector, so
//! the state is fixed by one `(2J+1)`-dimensional block per `J` plus the
//! multiplicity `n_{N,J}`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{binomial_exact, ln_binomial, ln_fact};
use crate::parallel;
use crate::params::SpinAxis;
use crate::spin;
use crate::sym::{zpm_to_updown, SymmetricState, UpDownCoefficients};

/// `n_{N,J} = binom(N, N/2 - J) - binom(N, N/2 - J - 1)`, with `J = twice_j / 2`.
pub fn degeneracy(n: usize, twice_j: usize) -> Result<u128> {
    if twice_j > n || !(n - twice_j).is_multiple_of(2) {
        return Err(Error::InvalidSpin { n, twice_j });
    }
    let low = ((n - twice_j) / 2) as u64;
    let a = binomial_exact(n as u64, low);
    let b = if low == 0 { 0 } else { binomial_exact(n as u64, low - 1) };
    Ok(a - b)
}

/// Allowed `2J` values for `N`, largest first.
pub fn spin_ladder(n: usize) -> Vec<usize> {
    (0..=n / 2).map(|k| n - 2 * k).collect()
}

/// Symmetric-subspace block `<N/2, M| rho |N/2, M'>` of an up/down expansion.
fn top_block(ud: &UpDownCoefficients) -> DMatrix<C64> {
    let n = ud.n();
    let ln_b: Vec<f64> = (0..=n).map(|k| ln_binomial(n as u64, k as u64)).collect();
    DMatrix::from_fn(n + 1, n + 1, |k, kp| {
        // x has k down spins (down or sigma_-), y has kp (down or sigma_+)
        let mut acc = C64::new(0.0, 0.0);
        for b in 0..=k.min(kp) {
            let (q, p) = (k - b, kp - b);
            if b + p + q > n {
                continue;
            }
            let a = n - b - p - q;
            let ln_mult = ln_fact(n as u64) - ln_fact(a as u64) - ln_fact(b as u64) - ln_fact(p as u64) - ln_fact(q as u64);
            acc += ud.unit(a, b, p, q) * (ln_mult - 0.5 * (ln_b[k] + ln_b[kp])).exp();
        }
        acc
    })
}

/// Splits a symmetric state into its total-spin blocks.
///
/// The block for `J = N/2 - s` is read off after projecting `s` particle
/// pairs onto singlets: singlets times a symmetric state of the remaining
/// `2J` particles form a highest-weight family of that sector. Every
/// intermediate up/down coefficient is a matrix element of a positive
/// operator of trace at most one, so nothing is amplified by the
/// multiplicities.
pub fn build_dicke_blocks(state: &SymmetricState) -> Result<DickeBlockMatrix> {
    let n = state.n();
    let mut stages = Vec::with_capacity(n / 2 + 1);
    let mut ud = zpm_to_updown(state);
    loop {
        let next = if ud.n() >= 2 { Some(ud.contract_singlet()?) } else { None };
        stages.push(ud);
        match next {
            Some(u) => ud = u,
            None => break,
        }
    }
    let mats = parallel::map(&stages, top_block);
    let blocks = mats
        .into_iter()
        .zip(spin_ladder(n))
        .map(|(matrix, twice_j)| Ok(DickeBlock { twice_j, degeneracy: degeneracy(n, twice_j)?, matrix }))
        .collect::<Result<Vec<_>>>()?;
    let out = DickeBlockMatrix { n, blocks };
    let expected = state.trace();
    let defect = (out.trace() - expected.re).abs().max(expected.im.abs());
    if defect > 1e-7 {
        return Err(Error::RecursionInconsistent(defect));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DickeBlock {
    pub twice_j: usize,
    pub degeneracy: u128,
    /// rows and columns indexed by `M = J, J - 1, ..., -J`
    pub matrix: DMatrix<C64>,
}

impl DickeBlock {
    pub fn j(&self) -> f64 {
        self.twice_j as f64 / 2.0
    }

    /// Eigenvalues (ascending) and eigenvectors of the Hermitian part.
    pub fn eigen(&self) -> SymmetricEigen<C64, nalgebra::Dyn> {
        let h = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DickeBlockMatrix {
    n: usize,
    blocks: Vec<DickeBlock>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entropies {
    pub von_neumann: f64,
    pub renyi2: f64,
}

impl DickeBlockMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Blocks ordered by decreasing `J`.
    pub fn blocks(&self) -> &[DickeBlock] {
        &self.blocks
    }

    pub fn trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.degeneracy as f64 * b.matrix.trace().re).sum()
    }

    pub fn purity(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.degeneracy as f64 * b.matrix.iter().map(|x| x.norm_sqr()).sum::<f64>())
            .sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| (&b.matrix - b.matrix.adjoint()).iter().map(|x| x.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    /// Every eigenvalue with its multiplicity `n_{N,J}`.
    pub fn spectrum(&self) -> Vec<(f64, u128)> {
        let mut out: Vec<(f64, u128)> = self
            .blocks
            .iter()
            .flat_map(|b| b.eigen().eigenvalues.iter().map(|&l| (l, b.degeneracy)).collect::<Vec<_>>())
            .collect();
        out.sort_by(|x, y| x.0.total_cmp(&y.0));
        out
    }

    /// Eigenvalues expanded by multiplicity, ascending. Only sensible for small `N`.
    pub fn expanded_spectrum(&self) -> Vec<f64> {
        self.spectrum()
            .into_iter()
            .flat_map(|(l, d)| std::iter::repeat_n(l, d as usize))
            .collect()
    }

    pub fn entropies(&self) -> Entropies {
        let mut vn = 0.0;
        let mut r2 = 0.0;
        for b in &self.blocks {
            let deg = b.degeneracy as f64;
            for &l in b.eigen().eigenvalues.iter() {
                if l > 1e-14 {
                    vn -= deg * l * l.ln();
                }
                r2 += deg * l * l;
            }
        }
        Entropies { von_neumann: vn, renyi2: -r2.ln() }
    }

    /// Mixed-state quantum Fisher information for the generator `S_n`.
    ///
    /// The cutoff applies to single-copy eigenvalues: below it the blocks of
    /// large-multiplicity sectors carry rounding noise only.
    pub fn qfi(&self, axis: &SpinAxis) -> f64 {
        let terms = parallel::map(&self.blocks, |b| {
            let eig = b.eigen();
            let dim = b.twice_j + 1;
            let deg = b.degeneracy as f64;
            let lambda: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
            let a = spin::sn(dim, axis);
            let elems = eig.eigenvectors.adjoint() * a * &eig.eigenvectors;
            let mut f = 0.0;
            for k in 0..dim {
                for l in 0..dim {
                    let s = lambda[k] + lambda[l];
                    if k == l || s <= 1e-12 {
                        continue;
                    }
                    f += (lambda[k] - lambda[l]).powi(2) / s * elems[(k, l)].norm_sqr();
                }
            }
            2.0 * deg * f
        });
        terms.iter().sum()
    }
}

pub fn qfi_mixed(blocks: &DickeBlockMatrix, axis: &SpinAxis) -> f64 {
    blocks.qfi(axis)
}

pub fn partial_trace_sym(state: &SymmetricState, n_traced: usize) -> Result<SymmetricState> {
    state.partial_trace(n_traced)
}

pub fn entropies(blocks: &DickeBlockMatrix) -> Entropies {
    blocks.entropies()
}
