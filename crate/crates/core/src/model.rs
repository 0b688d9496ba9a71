//! Momentum-space description of the chain: couplings, Bogoliubov data,
//! dispersion, gap and Fermi points.
//!
//! Conventions. Sites are `1..=n` with periodic boundary. Spin down is an
//! occupied fermion (`σ^z = 1 - 2 c†c`), `c_j = (Π_{m<j} σ^z_m) σ^+_j` and
//! `c_j = N^{-1/2} Σ_q e^{iqj} c_q`. The even-parity sector maps onto
//! antiperiodic fermions, `q = π(2k-1)/n`. Each positive momentum carries
//! the Nambu spinor `(c_q, c_{-q}†)` with block
//!
//! ```text
//! h_q = -D Im J(q) 𝟙 + [[h - Re J(q), -iγ Im J(q)], [iγ Im J(q), -(h - Re J(q))]]
//! ```
//!
//! where `J(q) = Σ_{r=1}^{n/2} J_r e^{iqr}`.

use std::f64::consts::PI;

use nalgebra::Matrix2;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest chain the library accepts. Dynamics at `n = 30_000` is the
/// heaviest intended workload.
pub const MAX_SITES: usize = 1 << 20;

/// Occupation threshold for quasiparticle modes.
pub const OCCUPATION_TOL: f64 = 1e-12;

/// Relative threshold below which the minimum quasiparticle energy counts
/// as a closed gap.
pub const GAP_REL_TOL: f64 = 1e-9;

/// One instance of the Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Anisotropy γ.
    pub gamma: f64,
    /// DM strength D = D'/J.
    pub d: f64,
    /// Transverse field h = h'/J.
    pub h: f64,
    /// Power-law fall-off exponent of the couplings.
    pub alpha: f64,
    /// Number of sites (even, periodic).
    pub n: usize,
    /// Divide the couplings by the Kac factor `Σ_{r=1}^{n/2} r^{-α}`.
    pub kac_normalize: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            gamma: 1.0,
            d: 0.0,
            h: 1.0,
            alpha: 3.0,
            n: 512,
            kac_normalize: true,
        }
    }
}

impl ModelParams {
    pub fn new(gamma: f64, d: f64, h: f64, alpha: f64, n: usize) -> Result<Self> {
        let p = ModelParams {
            gamma,
            d,
            h,
            alpha,
            n,
            kac_normalize: true,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_kac(mut self, on: bool) -> Self {
        self.kac_normalize = on;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_d(mut self, d: f64) -> Self {
        self.d = d;
        self
    }

    pub fn with_h(mut self, h: f64) -> Self {
        self.h = h;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("gamma", self.gamma),
            ("d", self.d),
            ("h", self.h),
            ("alpha", self.alpha),
        ] {
            if !v.is_finite() {
                return Err(Error::param(name, format!("must be finite, got {v}")));
            }
        }
        if self.alpha < 0.0 {
            return Err(Error::param("alpha", format!("must be >= 0, got {}", self.alpha)));
        }
        if self.n < 4 || self.n % 2 != 0 {
            return Err(Error::param("n", format!("must be even and >= 4, got {}", self.n)));
        }
        if self.n > MAX_SITES {
            return Err(Error::param("n", format!("must be <= {MAX_SITES}, got {}", self.n)));
        }
        Ok(())
    }

    /// Couplings `J_r` for `r = 1..=n/2` (index `r - 1`).
    pub fn couplings(&self) -> Vec<f64> {
        coupling_weights(self.alpha, self.n, self.kac_normalize)
    }
}

fn coupling_weights(alpha: f64, n: usize, kac: bool) -> Vec<f64> {
    let mut w: Vec<f64> = (1..=n / 2).map(|r| (r as f64).powf(-alpha)).collect();
    if kac {
        let norm = kac_norm(alpha, n);
        w.iter_mut().for_each(|x| *x /= norm);
    }
    w
}

/// Kac factor `Σ_{r=1}^{n/2} r^{-α}`.
pub fn kac_norm(alpha: f64, n: usize) -> f64 {
    // Summed from the small terms up.
    (1..=n / 2).rev().map(|r| (r as f64).powf(-alpha)).sum()
}

/// `J(φ) = Σ_{r=1}^{n/2} J_r e^{iφr}` at an arbitrary momentum.
pub fn jk_alpha(alpha: f64, n: usize, phi: f64, kac: bool) -> C64 {
    let w = coupling_weights(alpha, n, kac);
    fourier_sum(&w, phi)
}

fn fourier_sum(w: &[f64], phi: f64) -> C64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (i, &wr) in w.iter().enumerate().rev() {
        let (s, c) = (phi * (i + 1) as f64).sin_cos();
        re += wr * c;
        im += wr * s;
    }
    C64::new(re, im)
}

/// Positive antiperiodic momenta `φ_k = π(2k-1)/n`, `k = 1..=n/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    pub phis: Vec<f64>,
}

impl MomentumGrid {
    pub fn new(n: usize) -> Self {
        let phis = (1..=n / 2)
            .map(|k| PI * (2 * k - 1) as f64 / n as f64)
            .collect();
        MomentumGrid { phis }
    }

    pub fn len(&self) -> usize {
        self.phis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phis.is_empty()
    }
}

/// `J(φ_k)` on the whole positive grid. Phases are reduced exactly through
/// the integer `(2k-1) r mod 2n`, so large chains keep full precision.
pub fn jk_on_grid(params: &ModelParams) -> Vec<C64> {
    let n = params.n;
    let w = params.couplings();
    let two_n = 2 * n;
    let table: Vec<(f64, f64)> = (0..two_n)
        .map(|m| (PI * m as f64 / n as f64).sin_cos())
        .collect();
    (1..=n / 2)
        .into_par_iter()
        .map(|k| {
            let step = 2 * k - 1;
            let (mut re, mut im) = (0.0, 0.0);
            for r in (1..=n / 2).rev() {
                let m = (step * r) % two_n;
                let (s, c) = table[m];
                re += w[r - 1] * c;
                im += w[r - 1] * s;
            }
            C64::new(re, im)
        })
        .collect()
}

/// Spectral data of one positive momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub phi: f64,
    pub jk: C64,
    /// `λ = sqrt((h - Re J)² + (γ Im J)²)`.
    pub lam: f64,
    /// Bogoliubov angle: `u = cos θ`, `v = i sin θ`.
    pub theta: f64,
    /// Upper eigenvalue of the Nambu block, `-D Im J + λ`.
    pub eps_plus: f64,
    /// Lower eigenvalue of the Nambu block, `-D Im J - λ`.
    pub eps_minus: f64,
    pub u: C64,
    pub v: C64,
}

impl ModeCoefficients {
    /// Excitation energies of the two quasiparticles `(τ_q, τ_{-q})`,
    /// i.e. `(λ - D Im J, λ + D Im J)`.
    pub fn quasiparticle_energies(&self) -> (f64, f64) {
        (self.eps_plus, -self.eps_minus)
    }

    /// Eigenvector of the Nambu block for `eps_plus`.
    pub fn upper_vector(&self) -> [C64; 2] {
        [self.u, self.v]
    }

    /// Eigenvector of the Nambu block for `eps_minus`.
    pub fn lower_vector(&self) -> [C64; 2] {
        [-self.v.conj(), self.u.conj()]
    }
}

/// Builds the mode data from `J(φ)` directly.
pub fn mode_from_jk(params: &ModelParams, phi: f64, jk: C64) -> ModeCoefficients {
    let mass = params.h - jk.re;
    let pairing = params.gamma * jk.im;
    let lam = mass.hypot(pairing);
    let shift = -params.d * jk.im;

    // Stable half-angle formulas; the γ Im J = 0 limit picks (1, 0) for a
    // non-negative mass and (0, i) otherwise.
    let (cos_t, sin_t) = if lam == 0.0 {
        (1.0, 0.0)
    } else if mass >= 0.0 {
        let c = ((lam + mass) / (2.0 * lam)).sqrt();
        let s = pairing / (2.0 * lam * (lam + mass)).sqrt();
        (c, s)
    } else {
        let s_abs = ((lam - mass) / (2.0 * lam)).sqrt();
        let c = pairing.abs() / (2.0 * lam * (lam - mass)).sqrt();
        let s = if pairing < 0.0 { -s_abs } else { s_abs };
        (c, s)
    };
    let theta = sin_t.atan2(cos_t);

    ModeCoefficients {
        phi,
        jk,
        lam,
        theta,
        eps_plus: shift + lam,
        eps_minus: shift - lam,
        u: C64::new(cos_t, 0.0),
        v: C64::new(0.0, sin_t),
    }
}

/// Mode data at an arbitrary momentum `φ ∈ (-π, π)`.
pub fn mode_coefficients(params: &ModelParams, phi: f64) -> ModeCoefficients {
    let jk = jk_alpha(params.alpha, params.n, phi, params.kac_normalize);
    mode_from_jk(params, phi, jk)
}

/// Mode data for every positive grid momentum.
pub fn grid_modes(params: &ModelParams) -> Vec<ModeCoefficients> {
    let grid = MomentumGrid::new(params.n);
    let jks = jk_on_grid(params);
    grid.phis
        .iter()
        .zip(jks)
        .map(|(&phi, jk)| mode_from_jk(params, phi, jk))
        .collect()
}

/// Single-momentum Hamiltonian in the `(c_q, c_{-q}†)` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NambuBlock(pub Matrix2<C64>);

impl NambuBlock {
    pub fn from_jk(params: &ModelParams, jk: C64) -> Self {
        let mass = C64::new(params.h - jk.re, 0.0);
        let pair = C64::new(0.0, -params.gamma * jk.im);
        let shift = C64::new(-params.d * jk.im, 0.0);
        NambuBlock(Matrix2::new(
            shift + mass,
            pair,
            pair.conj(),
            shift - mass,
        ))
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.0
    }

    /// Eigenvalues in ascending order.
    pub fn spectrum(&self) -> [f64; 2] {
        let m = &self.0;
        let mean = 0.5 * (m[(0, 0)].re + m[(1, 1)].re);
        let half = 0.5 * (m[(0, 0)].re - m[(1, 1)].re);
        let r = half.hypot(m[(0, 1)].norm());
        [mean - r, mean + r]
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let m = &self.0;
        (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

pub fn bdg_block(params: &ModelParams, phi: f64) -> NambuBlock {
    let jk = jk_alpha(params.alpha, params.n, phi, params.kac_normalize);
    NambuBlock::from_jk(params, jk)
}

/// Quasiparticle energies over the full zone, ordered by momentum from
/// `-φ_{n/2}` to `φ_{n/2}`.
fn full_zone(modes: &[ModeCoefficients]) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(2 * modes.len());
    for m in modes.iter().rev() {
        out.push((-m.phi, -m.eps_minus));
    }
    for m in modes {
        out.push((m.phi, m.eps_plus));
    }
    out
}

/// `Δ = max{min ε, 0}` over both quasiparticle branches on the grid.
pub fn gap(params: &ModelParams) -> f64 {
    gap_from_modes(&grid_modes(params))
}

pub fn gap_from_modes(modes: &[ModeCoefficients]) -> f64 {
    let zone = full_zone(modes);
    let min = zone.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
    let scale = zone.iter().map(|e| e.1.abs()).fold(0.0, f64::max);
    if min < GAP_REL_TOL * scale {
        0.0
    } else {
        min
    }
}

/// Grid-resolution interval `[lo, hi]` enclosing a zero of the dispersion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermiPoint {
    pub lo: f64,
    pub hi: f64,
}

impl FermiPoint {
    pub fn contains(&self, phi: f64) -> bool {
        if self.lo <= self.hi {
            phi >= self.lo && phi <= self.hi
        } else {
            // interval wrapping through ±π
            phi >= self.lo || phi <= self.hi
        }
    }
}

/// Zero crossings of the quasiparticle dispersion between neighbouring grid
/// momenta. An interval is reported when the endpoint energies change sign.
/// The two intervals straddling `φ = 0` and `φ = π` are also reported when
/// the dispersion vanishes at that (off-grid) high-symmetry point, which is
/// where a closing gap hides on the antiperiodic grid.
pub fn fermi_points(params: &ModelParams) -> Vec<FermiPoint> {
    let modes = grid_modes(params);
    let zone = full_zone(&modes);
    let scale = zone.iter().map(|e| e.1.abs()).fold(0.0, f64::max);
    let tol = GAP_REL_TOL * scale;
    let touches = |phi: f64| mode_coefficients(params, phi).eps_plus.abs() <= tol;
    let len = zone.len();
    let mut out = Vec::new();
    for i in 0..len {
        let (a, ea) = zone[i];
        let (b, eb) = zone[(i + 1) % len];
        let mut hit = (ea < 0.0) != (eb < 0.0) || ea.abs() <= tol || eb.abs() <= tol;
        if !hit && i + 1 == len / 2 {
            hit = touches(0.0);
        }
        if !hit && i + 1 == len {
            hit = touches(PI);
        }
        if hit {
            out.push(FermiPoint { lo: a, hi: b });
        }
    }
    out
}
