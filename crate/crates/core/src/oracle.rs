//! Brute-force exact diagonalization of the spin Hamiltonian for small
//! chains. Every free-fermion observable is checked against this module.
//!
//! Basis states are bit strings; bit `j - 1` set means site `j` is spin
//! down (an occupied Jordan-Wigner fermion). Pauli matrices are the
//! standard ones in the (up, down) basis.

use nalgebra::{DMatrix, DVector, Matrix4, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::numerics::entropy_bits;

pub const MAX_ED_SITES: usize = 12;

/// Eigenvalue spacing below which the ground state counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    /// Action on a single spin: returns (flipped bit, phase).
    fn act(self, bit: bool) -> (bool, C64) {
        match (self, bit) {
            (Pauli::X, b) => (!b, ONE),
            (Pauli::Y, false) => (true, I),
            (Pauli::Y, true) => (false, -I),
            (Pauli::Z, false) => (false, ONE),
            (Pauli::Z, true) => (true, -ONE),
        }
    }

    pub fn matrix(self) -> [[C64; 2]; 2] {
        match self {
            Pauli::X => [[ZERO, ONE], [ONE, ZERO]],
            Pauli::Y => [[ZERO, -I], [I, ZERO]],
            Pauli::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }
}

/// Product of Pauli operators on distinct sites (0-based).
fn apply_string(ops: &[(usize, Pauli)], idx: usize) -> (usize, C64) {
    let mut out = idx;
    let mut phase = ONE;
    for &(site, p) in ops {
        let (nb, ph) = p.act(out >> site & 1 == 1);
        out = if nb { out | 1 << site } else { out & !(1 << site) };
        phase *= ph;
    }
    (out, phase)
}

/// Which parity sector the ground state is taken from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// Whole Hilbert space.
    Full,
    /// `Π σ^z = +1`, the sector described by antiperiodic fermions.
    EvenParity,
}

/// Dense Hamiltonian with its ground state.
#[derive(Debug, Clone)]
pub struct DenseSpinSystem {
    pub params: ModelParams,
    pub n: usize,
    pub sector: Sector,
    pub hamiltonian: DMatrix<C64>,
    /// Ground vector in the full `2^n` basis.
    pub ground: DVector<C64>,
    pub ground_energy: f64,
    /// Spacing to the next level in the chosen sector.
    pub level_spacing: f64,
    basis: Vec<usize>,
    eigen: SymmetricEigen<C64, nalgebra::Dyn>,
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::param("n", format!("ED needs an even n >= 2, got {n}")));
    }
    if n > MAX_ED_SITES {
        return Err(Error::param(
            "n",
            format!("ED is limited to n <= {MAX_ED_SITES}, got {n}"),
        ));
    }
    Ok(())
}

/// Full `2^n × 2^n` spin Hamiltonian with periodic boundary; couplings
/// follow `params.kac_normalize`. Accepts `n = 2` for hand checks.
pub fn hamiltonian(params: &ModelParams) -> Result<DMatrix<C64>> {
    let n = params.n;
    check_size(n)?;
    let dim = 1usize << n;
    let norm = if params.kac_normalize {
        crate::model::kac_norm(params.alpha, n)
    } else {
        1.0
    };
    let mut h = DMatrix::<C64>::zeros(dim, dim);
    let (g, d) = (params.gamma, params.d);
    for j in 0..n {
        for r in 1..=n / 2 {
            let jr = (r as f64).powf(-params.alpha) / norm;
            let k = (j + r) % n;
            let string: Vec<(usize, Pauli)> =
                (1..r).map(|s| ((j + s) % n, Pauli::Z)).collect();
            let terms = [
                (Pauli::X, Pauli::X, -jr * (1.0 + g) / 4.0),
                (Pauli::Y, Pauli::Y, -jr * (1.0 - g) / 4.0),
                (Pauli::X, Pauli::Y, -jr * d / 4.0),
                (Pauli::Y, Pauli::X, jr * d / 4.0),
            ];
            for (a, b, coeff) in terms {
                if coeff == 0.0 {
                    continue;
                }
                let mut ops = string.clone();
                ops.push((j, a));
                ops.push((k, b));
                for idx in 0..dim {
                    let (out, ph) = apply_string(&ops, idx);
                    h[(out, idx)] += ph * coeff;
                }
            }
        }
        for idx in 0..dim {
            let z = if idx >> j & 1 == 1 { -1.0 } else { 1.0 };
            h[(idx, idx)] += C64::new(-params.h / 2.0 * z, 0.0);
        }
    }
    Ok(h)
}

/// Diagonalizes the Hamiltonian in the requested sector.
pub fn ed_build(params: &ModelParams, sector: Sector) -> Result<DenseSpinSystem> {
    let full = hamiltonian(params)?;
    let dim = full.nrows();
    let basis: Vec<usize> = (0..dim)
        .filter(|i| sector == Sector::Full || i.count_ones() % 2 == 0)
        .collect();
    let sub = DMatrix::from_fn(basis.len(), basis.len(), |a, b| full[(basis[a], basis[b])]);
    let eigen = SymmetricEigen::new(sub);
    let mut order: Vec<usize> = (0..eigen.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));
    let e0 = eigen.eigenvalues[order[0]];
    let e1 = order
        .get(1)
        .map(|&i| eigen.eigenvalues[i])
        .unwrap_or(f64::INFINITY);
    let col = eigen.eigenvectors.column(order[0]);
    let mut ground = DVector::<C64>::zeros(dim);
    for (a, &idx) in basis.iter().enumerate() {
        ground[idx] = col[a];
    }
    Ok(DenseSpinSystem {
        params: *params,
        n: params.n,
        sector,
        hamiltonian: full,
        ground,
        ground_energy: e0,
        level_spacing: e1 - e0,
        basis,
        eigen,
    })
}

impl DenseSpinSystem {
    pub fn is_degenerate(&self) -> bool {
        self.level_spacing < DEGENERACY_TOL
    }

    pub fn hermiticity_residual(&self) -> f64 {
        (&self.hamiltonian - self.hamiltonian.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `⟨ψ| P |ψ⟩` for a Pauli string on 1-based sites.
    pub fn expect(&self, psi: &DVector<C64>, ops: &[(usize, Pauli)]) -> C64 {
        let ops0: Vec<(usize, Pauli)> = ops.iter().map(|&(s, p)| (s - 1, p)).collect();
        let mut acc = ZERO;
        for idx in 0..psi.len() {
            if psi[idx] == ZERO {
                continue;
            }
            let (out, ph) = apply_string(&ops0, idx);
            acc += psi[out].conj() * ph * psi[idx];
        }
        acc
    }

    /// Ground state evolved under `post` (same size) for time `t`.
    pub fn evolve_ground(&self, post: &DenseSpinSystem, t: f64) -> DVector<C64> {
        let eig = &post.eigen;
        let local = DVector::from_fn(post.basis.len(), |a, _| self.ground[post.basis[a]]);
        let coeffs = eig.eigenvectors.adjoint() * local;
        let phased = DVector::from_fn(coeffs.len(), |i, _| {
            coeffs[i] * C64::from_polar(1.0, -eig.eigenvalues[i] * t)
        });
        let back = &eig.eigenvectors * phased;
        let mut out = DVector::<C64>::zeros(self.ground.len());
        for (a, &idx) in post.basis.iter().enumerate() {
            out[idx] = back[a];
        }
        out
    }

    /// Reduced density matrix of the given 1-based sites, in the basis
    /// ordered with the first listed site as the most significant factor.
    pub fn reduced_density(&self, psi: &DVector<C64>, sites: &[usize]) -> DMatrix<C64> {
        let k = sites.len();
        let sub_dim = 1usize << k;
        let mask: usize = sites.iter().map(|s| 1usize << (s - 1)).sum();
        let local = |idx: usize| -> usize {
            sites
                .iter()
                .fold(0, |acc, &s| (acc << 1) | (idx >> (s - 1) & 1))
        };
        let mut rho = DMatrix::<C64>::zeros(sub_dim, sub_dim);
        for i in 0..psi.len() {
            if psi[i] == ZERO {
                continue;
            }
            let env = i & !mask;
            let a = local(i);
            for b in 0..sub_dim {
                // rebuild the full index with the same environment bits
                let mut j = env;
                for (pos, &s) in sites.iter().enumerate() {
                    if b >> (k - 1 - pos) & 1 == 1 {
                        j |= 1 << (s - 1);
                    }
                }
                rho[(a, b)] += psi[i] * psi[j].conj();
            }
        }
        rho
    }

    /// `⟨c_m† c_n⟩` with Jordan-Wigner fermions, 1-based sites.
    pub fn hopping(&self, psi: &DVector<C64>, m: usize, n: usize) -> C64 {
        let mut acc = ZERO;
        for idx in 0..psi.len() {
            if psi[idx] == ZERO {
                continue;
            }
            let Some((i1, s1)) = annihilate(idx, n - 1) else {
                continue;
            };
            let Some((i2, s2)) = create(i1, m - 1) else {
                continue;
            };
            acc += psi[i2].conj() * psi[idx] * (s1 * s2) as f64;
        }
        acc
    }

    /// `⟨c_m† c_n†⟩`, 1-based sites.
    pub fn pairing(&self, psi: &DVector<C64>, m: usize, n: usize) -> C64 {
        let mut acc = ZERO;
        for idx in 0..psi.len() {
            if psi[idx] == ZERO {
                continue;
            }
            let Some((i1, s1)) = create(idx, n - 1) else {
                continue;
            };
            let Some((i2, s2)) = create(i1, m - 1) else {
                continue;
            };
            acc += psi[i2].conj() * psi[idx] * (s1 * s2) as f64;
        }
        acc
    }
}

fn jw_sign(idx: usize, site: usize) -> i32 {
    if (idx & ((1usize << site) - 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

fn annihilate(idx: usize, site: usize) -> Option<(usize, i32)> {
    (idx >> site & 1 == 1).then(|| (idx & !(1 << site), jw_sign(idx, site)))
}

fn create(idx: usize, site: usize) -> Option<(usize, i32)> {
    (idx >> site & 1 == 0).then(|| (idx | 1 << site, jw_sign(idx, site)))
}

fn hermitian_entropy(m: DMatrix<C64>) -> Result<f64> {
    let eig = SymmetricEigen::new(m);
    entropy_bits(eig.eigenvalues.iter().copied())
}

/// Reference values of every static observable.
#[derive(Debug, Clone)]
pub struct EdObservables {
    pub mz: f64,
    /// `C^{ab}_R = ⟨σ^a_1 σ^b_{1+R}⟩` for `a, b ∈ {x, y, z}`.
    pub corr: [[f64; 3]; 3],
    pub rho: Matrix4<C64>,
    pub block_entropy: f64,
    pub mutual_information: f64,
    pub chiral_order: f64,
}

/// Dense partial-trace reference values for distance `r` and block `l`.
pub fn ed_observables(system: &DenseSpinSystem, r: usize, l: usize) -> Result<EdObservables> {
    ed_observables_for(system, &system.ground, r, l)
}

pub fn ed_observables_for(
    system: &DenseSpinSystem,
    psi: &DVector<C64>,
    r: usize,
    l: usize,
) -> Result<EdObservables> {
    let n = system.n;
    if r < 1 || r > n / 2 {
        return Err(Error::OutOfRange {
            what: "R",
            value: r,
            lo: 1,
            hi: n / 2,
        });
    }
    if l < 1 || l > n / 2 {
        return Err(Error::OutOfRange {
            what: "l",
            value: l,
            lo: 1,
            hi: n / 2,
        });
    }
    let paulis = [Pauli::X, Pauli::Y, Pauli::Z];
    let mz = system.expect(psi, &[(1, Pauli::Z)]).re;
    let mut corr = [[0.0; 3]; 3];
    for (a, &pa) in paulis.iter().enumerate() {
        for (b, &pb) in paulis.iter().enumerate() {
            corr[a][b] = system.expect(psi, &[(1, pa), (1 + r, pb)]).re;
        }
    }
    let rho_dyn = system.reduced_density(psi, &[1, 1 + r]);
    let rho = Matrix4::from_fn(|i, j| rho_dyn[(i, j)]);
    let block: Vec<usize> = (1..=l).collect();
    let block_entropy = hermitian_entropy(system.reduced_density(psi, &block))?;
    let s1 = hermitian_entropy(system.reduced_density(psi, &[1]))?;
    let s2 = hermitian_entropy(system.reduced_density(psi, &[1 + r]))?;
    let s12 = hermitian_entropy(rho_dyn)?;
    let mut ch = 0.0;
    for i in 1..=n {
        let j = i % n + 1;
        ch += system.expect(psi, &[(i, Pauli::X), (j, Pauli::Y)]).re
            - system.expect(psi, &[(i, Pauli::Y), (j, Pauli::X)]).re;
    }
    Ok(EdObservables {
        mz,
        corr,
        rho,
        block_entropy,
        mutual_information: s1 + s2 - s12,
        chiral_order: ch / (4.0 * n as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw(gamma: f64, d: f64, h: f64, alpha: f64, n: usize) -> ModelParams {
        ModelParams {
            gamma,
            d,
            h,
            alpha,
            n,
            kac_normalize: true,
        }
    }

    #[test]
    fn two_site_ground_energy_by_hand() {
        // n = 2: both bonds couple the same pair, with an empty string.
        // H = -(1+γ)/2 XX - (1-γ)/2 YY - (h/2)(Z1 + Z2); the DM terms
        // cancel because XY - YX from bond (1,2) and (2,1) are opposite.
        let (g, h) = (0.4, 0.7);
        let sys = ed_build(&raw(g, 0.9, h, 1.0, 2), Sector::Full).unwrap();
        // Even sector {|↑↑⟩, |↓↓⟩}: [[-h, -γ], [-γ, h]] → -sqrt(h² + γ²)
        // Odd sector {|↑↓⟩, |↓↑⟩}: [[0, -1], [-1, 0]] → -1
        let expect = (-(h * h + g * g).sqrt()).min(-1.0);
        assert!((sys.ground_energy - expect).abs() < 1e-12);
    }

    #[test]
    fn hermitian_for_random_params() {
        let sys = ed_build(&raw(0.3, 1.7, -0.4, 0.8, 6), Sector::EvenParity).unwrap();
        assert!(sys.hermiticity_residual() < 1e-12);
        assert!((sys.ground.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polarized_product_state() {
        let sys = ed_build(&raw(0.5, 0.5, 100.0, 1.5, 6), Sector::EvenParity).unwrap();
        let obs = ed_observables(&sys, 2, 3).unwrap();
        assert!((obs.mz - 1.0).abs() < 1e-3);
        assert!(obs.mutual_information.abs() < 1e-4);
        assert!(obs.block_entropy.abs() < 1e-4);
    }

    #[test]
    fn size_limits() {
        assert!(ed_build(&raw(0.5, 0.5, 0.5, 1.0, 14), Sector::Full).is_err());
        assert!(ed_build(&raw(0.5, 0.5, 0.5, 1.0, 5), Sector::Full).is_err());
    }
}
