//! Spin-spin correlators as Pfaffians of Majorana contractions, two-site
//! reduced density matrices, order parameters and mutual information.
//!
//! With `A_j = c_j† + c_j`, `B_j = c_j† - c_j` and the Jordan-Wigner string
//! `S_j = Π_{m<j} A_m B_m`, the spin operators are `σ^x_j = S_j A_j`,
//! `σ^y_j = i S_j B_j` and `σ^z_j = A_j B_j`. A two-point spin correlator
//! becomes the expectation of a Majorana string, which Wick's theorem turns
//! into a Pfaffian. Strings are reordered to "all A, then all B" before the
//! Pfaffian is taken; the permutation sign joins the prefactor.

use nalgebra::{Matrix2, Matrix4, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{magnetization_z, Contractions, GaussianState};
use crate::model::C64;
use crate::numerics::{entropy_bits, pfaffian, AntisymmetricMatrix};

/// Imaginary part above which a correlator is rejected.
pub const IMAG_TOL: f64 = 1e-6;

/// Most negative density-matrix eigenvalue tolerated.
pub const NEGATIVITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Majorana {
    A(i64),
    B(i64),
}

impl Majorana {
    fn key(self) -> (u8, i64) {
        match self {
            Majorana::A(s) => (0, s),
            Majorana::B(s) => (1, s),
        }
    }
}

fn contraction(c: &Contractions, x: Majorana, y: Majorana) -> C64 {
    use Majorana::*;
    match (x, y) {
        (A(m), A(n)) => c.aa(n - m),
        (B(m), B(n)) => c.bb(n - m),
        (A(m), B(n)) => c.ab(n - m),
        (B(m), A(n)) => c.ba(n - m),
    }
}

/// Sign of the permutation sorting `ops` into the A-then-B layout.
fn layout_sign(ops: &[Majorana]) -> f64 {
    let mut inversions = 0usize;
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            if ops[i].key() > ops[j].key() {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `phase · ⟨ops[0] ops[1] …⟩` for distinct Majorana operators.
fn string_expectation(c: &Contractions, phase: C64, ops: &[Majorana]) -> Result<C64> {
    let mut sorted = ops.to_vec();
    sorted.sort_by_key(|m| m.key());
    let prefactor = phase * layout_sign(ops);
    let m = AntisymmetricMatrix::from_upper(sorted.len(), |a, b| {
        contraction(c, sorted[a], sorted[b])
    })?;
    Ok(prefactor * pfaffian(&m))
}

/// Majorana string and phase for `σ^l_0 σ^m_R`.
fn spin_string(l: Axis, m: Axis, r: i64) -> (C64, Vec<Majorana>) {
    use Majorana::*;
    let mut ops = Vec::with_capacity(2 * r as usize);
    let phase = match (l, m) {
        (Axis::X, Axis::X) | (Axis::X, Axis::Y) => {
            ops.push(B(0));
            if l == m { C64::new(1.0, 0.0) } else { C64::new(0.0, 1.0) }
        }
        (Axis::Y, Axis::Y) | (Axis::Y, Axis::X) => {
            ops.push(A(0));
            if l == m { C64::new(-1.0, 0.0) } else { C64::new(0.0, 1.0) }
        }
    };
    for s in 1..r {
        ops.push(A(s));
        ops.push(B(s));
    }
    ops.push(match m {
        Axis::X => A(r),
        Axis::Y => B(r),
    });
    (phase, ops)
}

fn real_part(z: C64, what: &str) -> Result<f64> {
    if z.im.abs() > IMAG_TOL {
        return Err(Error::Consistency(format!(
            "{what} has imaginary residue {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

fn check_distance(state: &GaussianState, r: usize) -> Result<()> {
    let hi = state.n() / 2;
    if r < 1 || r > hi {
        return Err(Error::OutOfRange {
            what: "R",
            value: r,
            lo: 1,
            hi,
        });
    }
    Ok(())
}

/// Correlator evaluator with cached real-space contractions.
#[derive(Debug, Clone)]
pub struct Correlations {
    contractions: Contractions,
    mz: f64,
    n: usize,
}

impl Correlations {
    /// Caches contractions for distances up to `rmax` (clamped to N/2).
    pub fn new(state: &GaussianState, rmax: usize) -> Self {
        let rmax = rmax.clamp(1, state.n() / 2);
        Correlations {
            contractions: state.contractions(rmax),
            mz: magnetization_z(state),
            n: state.n(),
        }
    }

    pub fn mz(&self) -> f64 {
        self.mz
    }

    pub fn rmax(&self) -> usize {
        self.contractions.dmax()
    }

    fn check(&self, r: usize) -> Result<()> {
        if r < 1 || r > self.rmax() {
            return Err(Error::OutOfRange {
                what: "R",
                value: r,
                lo: 1,
                hi: self.rmax().min(self.n / 2),
            });
        }
        Ok(())
    }

    /// `⟨σ^l_i σ^m_{i+R}⟩` for `l, m ∈ {x, y}`.
    pub fn spin(&self, l: Axis, m: Axis, r: usize) -> Result<f64> {
        self.check(r)?;
        let (phase, ops) = spin_string(l, m, r as i64);
        let z = string_expectation(&self.contractions, phase, &ops)?;
        real_part(z, "spin correlator")
    }

    /// `⟨σ^z_i σ^z_{i+R}⟩`.
    pub fn zz(&self, r: usize) -> Result<f64> {
        self.check(r)?;
        use Majorana::*;
        let r = r as i64;
        let z = string_expectation(
            &self.contractions,
            C64::new(1.0, 0.0),
            &[A(0), B(0), A(r), B(r)],
        )?;
        real_part(z, "zz correlator")
    }

    /// Wick expansion of `⟨A_0 B_0 A_R B_R⟩` written out by hand.
    pub fn zz_closed_form(&self, r: usize) -> Result<f64> {
        self.check(r)?;
        let c = &self.contractions;
        let r = r as i64;
        let z = c.ab(0) * c.ab(0) - c.aa(r) * c.bb(r) + c.ab(r) * c.ba(r);
        real_part(z, "zz correlator")
    }

    pub fn two_site_density(&self, r: usize) -> Result<TwoSiteDensity> {
        let corr = [
            [self.spin(Axis::X, Axis::X, r)?, self.spin(Axis::X, Axis::Y, r)?],
            [self.spin(Axis::Y, Axis::X, r)?, self.spin(Axis::Y, Axis::Y, r)?],
        ];
        TwoSiteDensity::assemble(self.mz, corr, self.zz(r)?)
    }

    pub fn mutual_information(&self, r: usize) -> Result<f64> {
        let rho = self.two_site_density(r)?;
        let single = single_site_entropy(self.mz)?;
        Ok((2.0 * single - rho.entropy()?).max(0.0))
    }
}

fn single_site_entropy(mz: f64) -> Result<f64> {
    entropy_bits([(1.0 + mz) / 2.0, (1.0 - mz) / 2.0])
}

/// `⟨σ^l_i σ^m_{i+R}⟩` for `l, m ∈ {x, y}` and `1 <= R <= N/2`.
pub fn spin_correlator(state: &GaussianState, l: Axis, m: Axis, r: usize) -> Result<f64> {
    check_distance(state, r)?;
    Correlations::new(state, r).spin(l, m, r)
}

/// `⟨σ^z_i σ^z_{i+R}⟩`.
pub fn czz_correlator(state: &GaussianState, r: usize) -> Result<f64> {
    check_distance(state, r)?;
    Correlations::new(state, r).zz(r)
}

/// `(C^{xy}_1 - C^{yx}_1) / 4`.
pub fn chiral_order(state: &GaussianState) -> Result<f64> {
    let c = Correlations::new(state, 1);
    Ok((c.spin(Axis::X, Axis::Y, 1)? - c.spin(Axis::Y, Axis::X, 1)?) / 4.0)
}

/// `C^{xx}` at the largest distance `N/2`.
pub fn fm_order(state: &GaussianState) -> Result<f64> {
    spin_correlator(state, Axis::X, Axis::X, state.n() / 2)
}

pub fn two_site_density(state: &GaussianState, r: usize) -> Result<TwoSiteDensity> {
    check_distance(state, r)?;
    Correlations::new(state, r).two_site_density(r)
}

/// `I_R = S(ρ_i) + S(ρ_{i+R}) - S(ρ_{i,i+R})` in bits.
pub fn mutual_information(state: &GaussianState, r: usize) -> Result<f64> {
    check_distance(state, r)?;
    Correlations::new(state, r).mutual_information(r)
}

/// Two-site reduced density matrix in the basis `|s_i s_j⟩`, `s = ↑, ↓`,
/// with site `i` the more significant factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSiteDensity(Matrix4<C64>);

fn pauli(k: usize) -> Matrix2<C64> {
    let (o, z, i) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 1.0));
    match k {
        0 => Matrix2::new(o, z, z, o),
        1 => Matrix2::new(z, o, o, z),
        2 => Matrix2::new(z, -i, i, z),
        _ => Matrix2::new(o, z, z, -o),
    }
}

fn kron(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|r, c| a[(r / 2, c / 2)] * b[(r % 2, c % 2)])
}

impl TwoSiteDensity {
    /// `ρ = (1/4)(𝟙 + m^z(σ^z⊗𝟙 + 𝟙⊗σ^z) + Σ_{k,l∈{x,y}} C^{kl} σ^k⊗σ^l
    /// + C^{zz} σ^z⊗σ^z)`; `corr[k][l]` is indexed x = 0, y = 1.
    pub fn assemble(mz: f64, corr: [[f64; 2]; 2], czz: f64) -> Result<Self> {
        let mut rho = kron(&pauli(0), &pauli(0));
        rho += (kron(&pauli(3), &pauli(0)) + kron(&pauli(0), &pauli(3))) * C64::new(mz, 0.0);
        for (k, row) in corr.iter().enumerate() {
            for (l, &c) in row.iter().enumerate() {
                rho += kron(&pauli(k + 1), &pauli(l + 1)) * C64::new(c, 0.0);
            }
        }
        rho += kron(&pauli(3), &pauli(3)) * C64::new(czz, 0.0);
        let rho = TwoSiteDensity(rho / C64::new(4.0, 0.0));
        let lowest = rho.eigenvalues()[0];
        if lowest < -NEGATIVITY_TOL {
            return Err(Error::Consistency(format!(
                "two-site density matrix has eigenvalue {lowest:e}"
            )));
        }
        Ok(rho)
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        (self.0 - self.0.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let eig = SymmetricEigen::new(self.0);
        let mut out = [0.0; 4];
        for (o, e) in out.iter_mut().zip(eig.eigenvalues.iter()) {
            *o = *e;
        }
        out.sort_by(f64::total_cmp);
        out
    }

    pub fn entropy(&self) -> Result<f64> {
        entropy_bits(self.eigenvalues())
    }
}

/// Magnetization and correlators for `R = 1..=rmax`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinObservables {
    pub mz: f64,
    pub cxx: Vec<f64>,
    pub cyy: Vec<f64>,
    pub czz: Vec<f64>,
    pub cxy: Vec<f64>,
    pub cyx: Vec<f64>,
}

impl SpinObservables {
    /// Evaluates every correlator up to `rmax` (clamped to N/2) in parallel.
    pub fn compute(state: &GaussianState, rmax: usize) -> Result<Self> {
        let c = Correlations::new(state, rmax);
        let rows: Vec<[f64; 5]> = (1..=c.rmax())
            .into_par_iter()
            .map(|r| {
                Ok([
                    c.spin(Axis::X, Axis::X, r)?,
                    c.spin(Axis::Y, Axis::Y, r)?,
                    c.zz(r)?,
                    c.spin(Axis::X, Axis::Y, r)?,
                    c.spin(Axis::Y, Axis::X, r)?,
                ])
            })
            .collect::<Result<_>>()?;
        let col = |k: usize| rows.iter().map(|row| row[k]).collect();
        Ok(SpinObservables {
            mz: c.mz(),
            cxx: col(0),
            cyy: col(1),
            czz: col(2),
            cxy: col(3),
            cyx: col(4),
        })
    }

    /// Two-site density at distance `r` from the stored correlators.
    pub fn two_site_density(&self, r: usize) -> Result<TwoSiteDensity> {
        if r < 1 || r > self.cxx.len() {
            return Err(Error::OutOfRange {
                what: "R",
                value: r,
                lo: 1,
                hi: self.cxx.len(),
            });
        }
        let i = r - 1;
        TwoSiteDensity::assemble(
            self.mz,
            [[self.cxx[i], self.cxy[i]], [self.cyx[i], self.cyy[i]]],
            self.czz[i],
        )
    }

    pub fn mutual_information(&self, r: usize) -> Result<f64> {
        let rho = self.two_site_density(r)?;
        Ok((2.0 * single_site_entropy(self.mz)? - rho.entropy()?).max(0.0))
    }
}
