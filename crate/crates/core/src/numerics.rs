//! Numerical kernels: Pfaffians of complex antisymmetric matrices,
//! least-squares fits and kink detection.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Residual allowed when validating antisymmetry of a full matrix.
pub const ANTISYMMETRY_TOL: f64 = 1e-12;

/// Complex antisymmetric matrix of even dimension, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct AntisymmetricMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl AntisymmetricMatrix {
    /// Zero matrix of dimension `dim` (must be even).
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim % 2 != 0 {
            return Err(Error::Dimension(format!(
                "antisymmetric matrix needs even dimension, got {dim}"
            )));
        }
        Ok(AntisymmetricMatrix {
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        })
    }

    /// Builds the matrix from a closure evaluated on the strict upper
    /// triangle `i < j`; the lower triangle is mirrored with a sign.
    pub fn from_upper<F>(dim: usize, mut upper: F) -> Result<Self>
    where
        F: FnMut(usize, usize) -> C64,
    {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            for j in i + 1..dim {
                m.set(i, j, upper(i, j));
            }
        }
        Ok(m)
    }

    /// Validates a full row-major matrix.
    pub fn from_full(dim: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if dim % 2 != 0 {
            return Err(Error::Dimension(format!(
                "antisymmetric matrix needs even dimension, got {dim}"
            )));
        }
        let scale = data.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let mut worst = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                let r = (data[i * dim + j] + data[j * dim + i]).norm();
                worst = worst.max(r);
            }
        }
        if worst > ANTISYMMETRY_TOL * scale {
            return Err(Error::NotAntisymmetric(worst));
        }
        Ok(AntisymmetricMatrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    /// Sets `A[i][j] = z` and `A[j][i] = -z`. Diagonal writes are ignored.
    pub fn set(&mut self, i: usize, j: usize, z: C64) {
        if i == j {
            return;
        }
        self.data[i * self.dim + j] = z;
        self.data[j * self.dim + i] = -z;
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }
}

/// Pfaffian by Parlett-Reid elimination (`A = L T Lᵀ`, `T` tridiagonal)
/// with partial pivoting. O(n³) on a private copy.
pub fn pfaffian(a: &AntisymmetricMatrix) -> C64 {
    let n = a.dim;
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    let mut m = a.data.clone();
    let idx = |i: usize, j: usize| i * n + j;
    let mut pf = C64::new(1.0, 0.0);

    let mut k = 0;
    while k + 1 < n {
        // pivot: largest entry in column k below the diagonal
        let mut kp = k + 1;
        let mut best = m[idx(k + 1, k)].norm();
        for i in k + 2..n {
            let v = m[idx(i, k)].norm();
            if v > best {
                best = v;
                kp = i;
            }
        }
        if kp != k + 1 {
            for j in 0..n {
                m.swap(idx(k + 1, j), idx(kp, j));
            }
            for i in 0..n {
                m.swap(idx(i, k + 1), idx(i, kp));
            }
            pf = -pf;
        }
        let pivot = m[idx(k, k + 1)];
        if best == 0.0 {
            return C64::new(0.0, 0.0);
        }
        pf *= pivot;
        if k + 2 < n {
            let tau: Vec<C64> = (k + 2..n).map(|j| m[idx(k, j)] / pivot).collect();
            let col: Vec<C64> = (k + 2..n).map(|i| m[idx(i, k + 1)]).collect();
            for (a_i, i) in (k + 2..n).enumerate() {
                let (ti, ci) = (tau[a_i], col[a_i]);
                let row = &mut m[idx(i, k + 2)..idx(i, n)];
                for (b_j, entry) in row.iter_mut().enumerate() {
                    *entry += ti * col[b_j] - ci * tau[b_j];
                }
            }
        }
        k += 2;
    }
    pf
}

/// Closed interval of abscissae used by a fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitWindow {
    pub lo: f64,
    pub hi: f64,
}

impl FitWindow {
    pub fn new(lo: f64, hi: f64) -> Self {
        FitWindow { lo, hi }
    }

    pub fn all() -> Self {
        FitWindow {
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

/// Least-squares line `y = slope·x + intercept` (in log-log coordinates for
/// power laws).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    /// First and last index of the input points that fell in the window.
    pub window: (usize, usize),
}

impl FitResult {
    /// Decay exponent of a power-law fit: `y ∝ x^{-exponent}`.
    pub fn exponent(&self) -> f64 {
        -self.slope
    }

    /// Prefactor of a power-law fit.
    pub fn prefactor(&self) -> f64 {
        self.intercept.exp()
    }
}

fn ols(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx <= f64::EPSILON * n * mx.abs().max(1.0).powi(2) {
        return Err(Error::Domain("degenerate abscissae in fit".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    let r2 = if syy <= f64::MIN_POSITIVE {
        1.0
    } else {
        (1.0 - ss_res / syy).clamp(0.0, 1.0)
    };
    Ok((slope, intercept, r2))
}

fn select(points: &[(f64, f64)], window: FitWindow) -> (Vec<f64>, Vec<f64>, (usize, usize)) {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut first = usize::MAX;
    let mut last = 0;
    for (i, &(x, y)) in points.iter().enumerate() {
        if window.contains(x) {
            xs.push(x);
            ys.push(y);
            first = first.min(i);
            last = i;
        }
    }
    (xs, ys, (first, last))
}

/// Ordinary least squares on the points inside `window`.
pub fn linear_fit(points: &[(f64, f64)], window: FitWindow) -> Result<FitResult> {
    let (xs, ys, range) = select(points, window);
    if xs.len() < 2 {
        return Err(Error::Domain(format!(
            "linear fit needs at least 2 points in window, got {}",
            xs.len()
        )));
    }
    let (slope, intercept, r2) = ols(&xs, &ys)?;
    Ok(FitResult {
        slope,
        intercept,
        r2,
        window: range,
    })
}

/// Least squares of `log y` against `log x` inside `window`.
pub fn power_law_fit(points: &[(f64, f64)], window: FitWindow) -> Result<FitResult> {
    let (xs, ys, range) = select(points, window);
    if xs.len() < 3 {
        return Err(Error::Domain(format!(
            "power-law fit needs at least 3 points in window, got {}",
            xs.len()
        )));
    }
    if let Some((x, y)) = xs.iter().zip(&ys).find(|(x, y)| **x <= 0.0 || **y <= 0.0) {
        return Err(Error::Domain(format!(
            "power-law fit needs positive data, got ({x}, {y})"
        )));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let (slope, intercept, r2) = ols(&lx, &ly)?;
    Ok(FitResult {
        slope,
        intercept,
        r2,
        window: range,
    })
}

/// Relative level below which [`decay_fit`] ignores data.
pub const DECAY_FLOOR: f64 = 1e-12;

/// Power-law fit of a decaying signal that may oscillate in sign. When `y`
/// changes sign inside `window` and `|y|` has at least five local maxima
/// there, only those maxima (the envelope) are fitted; otherwise `|y|` is.
/// Points below `DECAY_FLOOR` times the largest `|y|` in the window are at
/// roundoff level and are dropped.
pub fn decay_fit(points: &[(f64, f64)], window: FitWindow) -> Result<FitResult> {
    let top = points
        .iter()
        .filter(|p| window.contains(p.0))
        .map(|p| p.1.abs())
        .fold(0.0, f64::max);
    let inside: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(x, y)| window.contains(x) && y.abs() > DECAY_FLOOR * top)
        .collect();
    let sign_change = inside.windows(2).any(|w| w[0].1 * w[1].1 < 0.0);
    let abs: Vec<(f64, f64)> = inside.iter().map(|&(x, y)| (x, y.abs())).collect();
    let peaks: Vec<(f64, f64)> = (1..abs.len().saturating_sub(1))
        .filter(|&i| abs[i].1 > abs[i - 1].1 && abs[i].1 >= abs[i + 1].1)
        .map(|i| abs[i])
        .collect();
    if sign_change && peaks.len() >= 5 {
        power_law_fit(&peaks, FitWindow::all())
    } else {
        power_law_fit(&abs, FitWindow::all())
    }
}

/// Abscissa of the largest three-point second difference of `ys`.
pub fn kink_detect(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::Domain("xs and ys differ in length".into()));
    }
    if xs.len() < 5 {
        return Err(Error::Domain(format!(
            "kink detection needs at least 5 points, got {}",
            xs.len()
        )));
    }
    let increasing = xs.windows(2).all(|w| w[1] > w[0]);
    let decreasing = xs.windows(2).all(|w| w[1] < w[0]);
    if !increasing && !decreasing {
        return Err(Error::Domain("xs must be strictly monotone".into()));
    }
    let mut best = (1, f64::NEG_INFINITY);
    for i in 1..xs.len() - 1 {
        let h1 = xs[i] - xs[i - 1];
        let h2 = xs[i + 1] - xs[i];
        // non-uniform three-point stencil
        let d2 = 2.0 * (h1 * ys[i + 1] - (h1 + h2) * ys[i] + h2 * ys[i - 1])
            / (h1 * h2 * (h1 + h2));
        if d2.abs() > best.1 {
            best = (i, d2.abs());
        }
    }
    Ok(xs[best.0])
}

/// Von Neumann entropy in bits of a spectrum. Eigenvalues in
/// `[-1e-8, 0)` are treated as zero.
pub fn entropy_bits(eigs: impl IntoIterator<Item = f64>) -> Result<f64> {
    let mut s = 0.0;
    for p in eigs {
        if p < -1e-8 {
            return Err(Error::Consistency(format!("negative eigenvalue {p:e}")));
        }
        if p > 0.0 {
            s -= p * p.log2();
        }
    }
    Ok(s)
}
