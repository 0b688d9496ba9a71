//! Fermionic Gaussian states stored as one 2×2 Nambu correlation block per
//! positive momentum.
//!
//! For the spinor `Ψ = (c_q, c_{-q}†)` the block is `Γ_ab = ⟨Ψ_b† Ψ_a⟩`:
//!
//! ```text
//! Γ = [[⟨c_q† c_q⟩,      ⟨c_{-q} c_q⟩    ],
//!      [⟨c_q† c_{-q}†⟩,  ⟨c_{-q} c_{-q}†⟩]]
//! ```
//!
//! With this orientation a Hamiltonian block `h_q` evolves the state as
//! `Γ(t) = U Γ U†`, `U = exp(-i h_q t)`, and stationary states commute with
//! `h_q`.

use nalgebra::Matrix2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{grid_modes, ModeCoefficients, ModelParams, NambuBlock, C64, OCCUPATION_TOL};

pub type Block = Matrix2<C64>;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateKind {
    Ground,
    Evolved(f64),
    Steady,
}

/// Translation-invariant Gaussian state.
#[derive(Debug, Clone)]
pub struct GaussianState {
    /// Hamiltonian defining the state (the post-quench one for evolved and
    /// steady states).
    pub params: ModelParams,
    pub modes: Vec<ModeCoefficients>,
    pub blocks: Vec<Block>,
    pub kind: StateKind,
}

fn outer(a: [C64; 2], b: [C64; 2]) -> Block {
    Matrix2::new(
        a[0] * b[0].conj(),
        a[0] * b[1].conj(),
        a[1] * b[0].conj(),
        a[1] * b[1].conj(),
    )
}

/// Quasiparticle occupations `(n(τ_q), n(τ_{-q}))` of the lowest-energy
/// filling of one mode.
pub fn ground_occupations(m: &ModeCoefficients) -> (bool, bool) {
    let (e_q, e_mq) = m.quasiparticle_energies();
    (e_q < -OCCUPATION_TOL, e_mq < -OCCUPATION_TOL)
}

fn ground_block(m: &ModeCoefficients) -> Block {
    let (n_q, n_mq) = ground_occupations(m);
    let mut g = Block::zeros();
    if n_q {
        g += outer(m.upper_vector(), m.upper_vector());
    }
    if !n_mq {
        g += outer(m.lower_vector(), m.lower_vector());
    }
    g
}

/// Lowest-energy filling of every quasiparticle mode.
pub fn ground_state(params: &ModelParams) -> Result<GaussianState> {
    params.validate()?;
    let modes = grid_modes(params);
    let blocks = modes.iter().map(ground_block).collect();
    Ok(GaussianState {
        params: *params,
        modes,
        blocks,
        kind: StateKind::Ground,
    })
}

/// Pre/post-quench pair with the Bogoliubov angles of both Hamiltonians.
#[derive(Debug, Clone)]
pub struct QuenchSetup {
    pub pre: ModelParams,
    pub post: ModelParams,
    pub pre_modes: Vec<ModeCoefficients>,
    pub post_modes: Vec<ModeCoefficients>,
    /// `θ_pre - θ_post` per mode.
    pub dtheta: Vec<f64>,
    initial: GaussianState,
}

impl QuenchSetup {
    pub fn new(pre: ModelParams, post: ModelParams) -> Result<Self> {
        pre.validate()?;
        post.validate()?;
        if pre.n != post.n {
            return Err(Error::param(
                "n",
                format!("pre ({}) and post ({}) sizes differ", pre.n, post.n),
            ));
        }
        let initial = ground_state(&pre)?;
        let pre_modes = initial.modes.clone();
        let post_modes = grid_modes(&post);
        let dtheta = pre_modes
            .iter()
            .zip(&post_modes)
            .map(|(a, b)| a.theta - b.theta)
            .collect();
        Ok(QuenchSetup {
            pre,
            post,
            pre_modes,
            post_modes,
            dtheta,
            initial,
        })
    }

    pub fn initial_state(&self) -> &GaussianState {
        &self.initial
    }

    pub fn n(&self) -> usize {
        self.pre.n
    }
}

/// `exp(-i h t)` from the spectral decomposition of the block.
pub fn propagator(m: &ModeCoefficients, t: f64) -> Block {
    let up = outer(m.upper_vector(), m.upper_vector());
    let lo = outer(m.lower_vector(), m.lower_vector());
    up * C64::from_polar(1.0, -m.eps_plus * t) + lo * C64::from_polar(1.0, -m.eps_minus * t)
}

/// State at time `t` after the sudden quench.
pub fn evolve(setup: &QuenchSetup, t: f64) -> Result<GaussianState> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::param("t", format!("must be finite and >= 0, got {t}")));
    }
    let blocks = setup
        .initial
        .blocks
        .par_iter()
        .zip(setup.post_modes.par_iter())
        .map(|(g, m)| {
            let u = propagator(m, t);
            u * g * u.adjoint()
        })
        .collect();
    Ok(GaussianState {
        params: setup.post,
        modes: setup.post_modes.clone(),
        blocks,
        kind: StateKind::Evolved(t),
    })
}

/// Dephased (diagonal-ensemble) state: each initial block projected onto
/// the commutant of the post-quench block.
pub fn steady_state(setup: &QuenchSetup) -> Result<GaussianState> {
    let blocks = setup
        .initial
        .blocks
        .iter()
        .zip(&setup.post_modes)
        .map(|(g, m)| {
            if m.lam == 0.0 {
                return *g;
            }
            let up = outer(m.upper_vector(), m.upper_vector());
            let lo = outer(m.lower_vector(), m.lower_vector());
            up * g * up + lo * g * lo
        })
        .collect();
    Ok(GaussianState {
        params: setup.post,
        modes: setup.post_modes.clone(),
        blocks,
        kind: StateKind::Steady,
    })
}

impl GaussianState {
    pub fn n(&self) -> usize {
        self.params.n
    }

    /// `⟨c_q† c_q⟩`, `⟨c_{-q}† c_{-q}⟩` and `⟨c_q† c_{-q}†⟩` for every mode.
    fn mode_moments(&self) -> impl Iterator<Item = (f64, C64, C64, C64)> + '_ {
        self.modes.iter().zip(&self.blocks).map(|(m, g)| {
            let n_q = g[(0, 0)];
            let n_mq = ONE - g[(1, 1)];
            (m.phi, n_q, n_mq, g[(1, 0)])
        })
    }

    /// `⟨c_m† c_{m+d}⟩`.
    pub fn hopping(&self, d: i64) -> C64 {
        let n = self.n() as f64;
        self.mode_moments()
            .map(|(phi, n_q, n_mq, _)| {
                let e = C64::from_polar(1.0, phi * d as f64);
                e * n_q + e.conj() * n_mq
            })
            .sum::<C64>()
            / n
    }

    /// `⟨c_m† c_{m+d}†⟩`.
    pub fn pairing(&self, d: i64) -> C64 {
        let n = self.n() as f64;
        let s: C64 = self
            .mode_moments()
            .map(|(phi, _, _, p)| p * (phi * d as f64).sin())
            .sum();
        C64::new(0.0, 2.0) * s / n
    }

    /// Total energy with respect to `self.params`.
    pub fn energy(&self) -> f64 {
        let p = &self.params;
        let mut e = -(p.n as f64) * p.h / 2.0;
        for (m, g) in self.modes.iter().zip(&self.blocks) {
            let h = NambuBlock::from_jk(p, m.jk).0;
            e += (h * g).trace().re;
            // ξ(-q) = h - Re J + D Im J from normal ordering of c_{-q}
            e += p.h - m.jk.re + p.d * m.jk.im;
        }
        e
    }

    /// Fermion-number parity of a ground state: each singly occupied
    /// `(q, -q)` pair flips it. Only meaningful for [`StateKind::Ground`].
    pub fn parity_even(&self) -> bool {
        let odd = self
            .modes
            .iter()
            .filter(|m| {
                let (a, b) = ground_occupations(m);
                a != b
            })
            .count();
        odd % 2 == 0
    }

    pub fn max_purity_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|g| (g * g - g).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        self.blocks
            .iter()
            .map(|g| (g - g.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }

    /// Real-space two-point tables for separations `|d| <= dmax`.
    pub fn contractions(&self, dmax: usize) -> Contractions {
        let n = self.n();
        let dmax = dmax.min(n);
        let ds: Vec<i64> = (-(dmax as i64)..=dmax as i64).collect();
        let (hop, pair): (Vec<C64>, Vec<C64>) = ds
            .par_iter()
            .map(|&d| (self.hopping(d), self.pairing(d)))
            .unzip();
        Contractions { dmax, hop, pair }
    }
}

/// Cached `⟨c_m† c_n⟩` and `⟨c_m† c_n†⟩` as functions of `d = n - m`, with
/// the derived `A_i = c_i† + c_i`, `B_i = c_i† - c_i` contractions.
#[derive(Debug, Clone)]
pub struct Contractions {
    dmax: usize,
    hop: Vec<C64>,
    pair: Vec<C64>,
}

impl Contractions {
    pub fn dmax(&self) -> usize {
        self.dmax
    }

    fn at(&self, v: &[C64], d: i64) -> C64 {
        assert!(
            d.unsigned_abs() as usize <= self.dmax,
            "separation {d} beyond cached range {}",
            self.dmax
        );
        v[(d + self.dmax as i64) as usize]
    }

    pub fn hopping(&self, d: i64) -> C64 {
        self.at(&self.hop, d)
    }

    pub fn pairing(&self, d: i64) -> C64 {
        self.at(&self.pair, d)
    }

    fn parts(&self, d: i64) -> (C64, C64, C64, C64) {
        let delta = if d == 0 { ONE } else { ZERO };
        let f = self.pairing(d);
        // ⟨c_m c_n⟩ = -conj(F(d)), ⟨c_m c_n†⟩ = δ - C(-d)
        (f, self.hopping(d), delta - self.hopping(-d), -f.conj())
    }

    /// `⟨A_m A_{m+d}⟩`.
    pub fn aa(&self, d: i64) -> C64 {
        let (cdcd, cdc, ccd, cc) = self.parts(d);
        cdcd + cdc + ccd + cc
    }

    /// `⟨B_m B_{m+d}⟩`.
    pub fn bb(&self, d: i64) -> C64 {
        let (cdcd, cdc, ccd, cc) = self.parts(d);
        cdcd - cdc - ccd + cc
    }

    /// `⟨A_m B_{m+d}⟩`.
    pub fn ab(&self, d: i64) -> C64 {
        let (cdcd, cdc, ccd, cc) = self.parts(d);
        cdcd - cdc + ccd - cc
    }

    /// `⟨B_m A_{m+d}⟩`.
    pub fn ba(&self, d: i64) -> C64 {
        let (cdcd, cdc, ccd, cc) = self.parts(d);
        cdcd + cdc - ccd - cc
    }
}

/// `(⟨A_m A_n⟩, ⟨B_m B_n⟩, ⟨A_m B_n⟩)` for sites `1 <= m, n <= N`.
pub fn ab_expectations(state: &GaussianState, m: usize, n: usize) -> Result<(C64, C64, C64)> {
    let size = state.n();
    for (what, v) in [("m", m), ("n", n)] {
        if v < 1 || v > size {
            return Err(Error::OutOfRange {
                what,
                value: v,
                lo: 1,
                hi: size,
            });
        }
    }
    let d = n as i64 - m as i64;
    let single = Contractions {
        dmax: d.unsigned_abs() as usize,
        hop: (-d.abs()..=d.abs()).map(|k| state.hopping(k)).collect(),
        pair: (-d.abs()..=d.abs()).map(|k| state.pairing(k)).collect(),
    };
    Ok((single.aa(d), single.bb(d), single.ab(d)))
}

/// Uniform transverse magnetization `⟨σ^z⟩ = ⟨A_i B_i⟩ = 1 - 2⟨c†c⟩`.
pub fn magnetization_z(state: &GaussianState) -> f64 {
    1.0 - 2.0 * state.hopping(0).re
}
