//! Block entanglement entropy of Gaussian states and the effective central
//! charge fit.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gaussian::{ground_state, GaussianState};
use crate::model::{ModelParams, C64};
use crate::numerics::{entropy_bits, linear_fit, FitResult, FitWindow};

/// `⟨Φ_a Φ_b†⟩` for `Φ = (c_1, …, c_l, c_1†, …, c_l†)`:
///
/// ```text
/// [[𝟙 - Cᵀ, F†],
///  [F,      C ]]
/// ```
///
/// with `C_mn = ⟨c_m† c_n⟩`, `F_mn = ⟨c_m† c_n†⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCorrelationMatrix {
    l: usize,
    matrix: DMatrix<C64>,
}

impl BlockCorrelationMatrix {
    pub fn block_size(&self) -> usize {
        self.l
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn hermiticity_residual(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// `-Σ_p λ_p log₂ λ_p` over all `2l` eigenvalues.
    pub fn entropy(&self) -> Result<f64> {
        entropy_bits(self.eigenvalues())
    }
}

fn check_block(state: &GaussianState, l: usize) -> Result<()> {
    let hi = state.n() / 2;
    if l < 1 || l > hi {
        return Err(Error::OutOfRange {
            what: "l",
            value: l,
            lo: 1,
            hi,
        });
    }
    Ok(())
}

pub fn block_correlation_matrix(state: &GaussianState, l: usize) -> Result<BlockCorrelationMatrix> {
    check_block(state, l)?;
    let c = state.contractions(l);
    let one = C64::new(1.0, 0.0);
    let matrix = DMatrix::from_fn(2 * l, 2 * l, |a, b| {
        let (m, n) = ((a % l) as i64, (b % l) as i64);
        match (a < l, b < l) {
            (true, true) => {
                let delta = if m == n { one } else { C64::new(0.0, 0.0) };
                delta - c.hopping(m - n)
            }
            (true, false) => c.pairing(m - n).conj(),
            (false, true) => c.pairing(n - m),
            (false, false) => c.hopping(n - m),
        }
    });
    Ok(BlockCorrelationMatrix { l, matrix })
}

/// Entropy in bits of the block of sites `1..=l`.
pub fn block_entropy(state: &GaussianState, l: usize) -> Result<f64> {
    block_correlation_matrix(state, l)?.entropy()
}

/// `S_l` for every `l` in `ls`, in the same order.
pub fn entropy_profile(state: &GaussianState, ls: &[usize]) -> Result<Vec<f64>> {
    ls.par_iter().map(|&l| block_entropy(state, l)).collect()
}

/// Conformal chord coordinate `(1/3) log₂[(N/π) sin(π l / N)]`.
pub fn chord_coordinate(n: usize, l: usize) -> f64 {
    let n = n as f64;
    let pi = std::f64::consts::PI;
    ((n / pi) * (pi * l as f64 / n).sin()).log2() / 3.0
}

/// Default fit window `l ∈ [8, N/4]`.
pub fn default_l_range(n: usize) -> (usize, usize) {
    (8, n / 4)
}

/// Least squares of `S_l` against [`chord_coordinate`]: the slope is
/// `c_eff`, the intercept the non-universal constant.
pub fn central_charge_from_series(n: usize, series: &[(usize, f64)]) -> Result<FitResult> {
    if series.len() < 5 {
        return Err(Error::Domain(format!(
            "central charge fit needs at least 5 block sizes, got {}",
            series.len()
        )));
    }
    let pts: Vec<(f64, f64)> = series
        .iter()
        .map(|&(l, s)| (chord_coordinate(n, l), s))
        .collect();
    linear_fit(&pts, FitWindow::all())
}

/// Ground-state `c_eff` over block sizes `l_range.0..=l_range.1`.
pub fn central_charge_fit(params: &ModelParams, l_range: (usize, usize)) -> Result<FitResult> {
    let (lo, hi) = l_range;
    if lo < 2 || hi > params.n / 2 || hi < lo + 4 {
        return Err(Error::Domain(format!(
            "block range [{lo}, {hi}] must lie in [2, {}] with at least 5 points",
            params.n / 2
        )));
    }
    let state = ground_state(params)?;
    let ls: Vec<usize> = (lo..=hi).collect();
    let s = entropy_profile(&state, &ls)?;
    let series: Vec<(usize, f64)> = ls.into_iter().zip(s).collect();
    central_charge_from_series(params.n, &series)
}
