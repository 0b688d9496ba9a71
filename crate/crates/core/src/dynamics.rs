//! Sudden-quench protocols: relaxation of the hopping correlator, steady
//! state profiles and entanglement growth.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entanglement::block_entropy;
use crate::error::{Error, Result};
use crate::gaussian::{evolve, ground_occupations, steady_state, QuenchSetup};
use crate::model::{gap_from_modes, C64};
use crate::numerics::{linear_fit, power_law_fit, FitResult, FitWindow};
use crate::spincorr::SpinObservables;

/// Chirality pattern of a quench: which of the two Hamiltonians is gapless.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuenchCase {
    /// Both gapless (case i).
    BothChiral,
    /// Only the initial Hamiltonian is gapless (case ii).
    PreChiral,
    /// Only the quenching Hamiltonian is gapless (case iii).
    PostChiral,
    NeitherChiral,
}

impl QuenchCase {
    pub fn classify(setup: &QuenchSetup) -> Self {
        let pre = gap_from_modes(&setup.pre_modes) == 0.0;
        let post = gap_from_modes(&setup.post_modes) == 0.0;
        match (pre, post) {
            (true, true) => QuenchCase::BothChiral,
            (true, false) => QuenchCase::PreChiral,
            (false, true) => QuenchCase::PostChiral,
            (false, false) => QuenchCase::NeitherChiral,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            QuenchCase::BothChiral => "i",
            QuenchCase::PreChiral => "ii",
            QuenchCase::PostChiral => "iii",
            QuenchCase::NeitherChiral => "gapped",
        }
    }
}

/// `δC_mn(t) = C_mn(t) - C_mn(∞)` on a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationSeries {
    pub m: usize,
    pub n: usize,
    pub times: Vec<f64>,
    pub values: Vec<C64>,
    pub steady: C64,
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::param("times", "empty time grid"));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::param("times", "times must be finite and non-negative"));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("times", "times must be strictly increasing"));
    }
    Ok(())
}

fn check_sites(setup: &QuenchSetup, m: usize, n: usize) -> Result<i64> {
    let size = setup.n();
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
    if m == n {
        return Err(Error::param("n", "need |m - n| >= 1"));
    }
    Ok(n as i64 - m as i64)
}

/// `n` points spaced evenly in `log t` over `[t0, t1]`.
pub fn log_time_grid(t0: f64, t1: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![t0];
    }
    let (a, b) = (t0.ln(), t1.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// `count` evenly spaced points over `[t0, t1]`.
pub fn linear_time_grid(t0: f64, t1: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![t0];
    }
    (0..count)
        .map(|i| t0 + (t1 - t0) * i as f64 / (count - 1) as f64)
        .collect()
}

pub fn delta_correlation(
    setup: &QuenchSetup,
    m: usize,
    n: usize,
    times: &[f64],
) -> Result<RelaxationSeries> {
    let d = check_sites(setup, m, n)?;
    check_times(times)?;
    let steady = steady_state(setup)?.hopping(d);
    let values = times
        .par_iter()
        .map(|&t| Ok(evolve(setup, t)?.hopping(d) - steady))
        .collect::<Result<Vec<_>>>()?;
    Ok(RelaxationSeries {
        m,
        n,
        times: times.to_vec(),
        values,
        steady,
    })
}

/// Closed-form dephasing sum
/// `(1/N) Σ_q sin 2α_q sin 2θ̃_q cos(2λ̃_q t) cos(q (n - m))` with
/// `α_q = θ_q - θ̃_q`, over modes whose initial quasiparticles are empty.
pub fn delta_correlation_analytic(setup: &QuenchSetup, m: usize, n: usize, t: f64) -> Result<f64> {
    let d = check_sites(setup, m, n)? as f64;
    let sum: f64 = setup
        .pre_modes
        .iter()
        .zip(&setup.post_modes)
        .zip(&setup.dtheta)
        .filter(|((pre, _), _)| ground_occupations(pre) == (false, false))
        .map(|((_, post), &a)| {
            (2.0 * a).sin() * (2.0 * post.theta).sin() * (2.0 * post.lam * t).cos()
                * (post.phi * d).cos()
        })
        .sum();
    Ok(sum / setup.n() as f64)
}

/// Indices of strict local maxima of `|values|`.
fn peak_indices(values: &[C64]) -> Vec<usize> {
    let a: Vec<f64> = values.iter().map(|z| z.norm()).collect();
    (1..a.len().saturating_sub(1))
        .filter(|&i| a[i] > a[i - 1] && a[i] >= a[i + 1])
        .collect()
}

/// Envelope points `(t, |δC|)` at the local maxima of `|δC|`.
pub fn envelope(series: &RelaxationSeries) -> Vec<(f64, f64)> {
    peak_indices(&series.values)
        .into_iter()
        .map(|i| (series.times[i], series.values[i].norm()))
        .collect()
}

/// Power-law fit of the peak envelope; `exponent()` is χ.
pub fn relaxation_exponent(series: &RelaxationSeries, window: FitWindow) -> Result<FitResult> {
    let peaks: Vec<(f64, f64)> = envelope(series)
        .into_iter()
        .filter(|&(t, v)| window.contains(t) && v > 0.0)
        .collect();
    if peaks.len() < 5 {
        return Err(Error::Domain(format!(
            "relaxation fit needs at least 5 envelope peaks in window, got {}",
            peaks.len()
        )));
    }
    power_law_fit(&peaks, FitWindow::all())
}

/// Steady-state mutual information and `C^xx` for `R = 1..=rmax`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SteadyProfile {
    pub mutual_information: Vec<f64>,
    pub cxx: Vec<f64>,
}

impl SteadyProfile {
    pub fn distances(&self) -> impl Iterator<Item = usize> {
        1..=self.cxx.len()
    }
}

/// Steady profile over every distance up to `N/2`.
pub fn steady_profile(setup: &QuenchSetup) -> Result<SteadyProfile> {
    steady_profile_upto(setup, setup.n() / 2)
}

pub fn steady_profile_upto(setup: &QuenchSetup, rmax: usize) -> Result<SteadyProfile> {
    let obs = SpinObservables::compute(&steady_state(setup)?, rmax)?;
    let mutual_information = (1..=obs.cxx.len())
        .into_par_iter()
        .map(|r| obs.mutual_information(r))
        .collect::<Result<_>>()?;
    Ok(SteadyProfile {
        mutual_information,
        cxx: obs.cxx,
    })
}

/// Branch of `|α_i ± α_q|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn denominator(self, alpha_pre: f64, alpha_post: f64) -> f64 {
        match self {
            Branch::Plus => (alpha_pre + alpha_post).abs(),
            Branch::Minus => (alpha_pre - alpha_post).abs(),
        }
    }
}

/// Block entropy after a quench, `S_t` for fixed `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropySeries {
    pub l: usize,
    pub alpha_pre: f64,
    pub alpha_post: f64,
    pub times: Vec<f64>,
    pub entropies: Vec<f64>,
    /// First time with `S_t >= 0.98 · median(S over the last 10% of samples)`.
    pub saturation_time: Option<f64>,
    /// Linear fit of `S_t` over `[0.2, 0.8] · saturation_time`.
    pub growth: Option<FitResult>,
}

/// Fraction of the late-time median that marks saturation.
pub const SATURATION_FRACTION: f64 = 0.98;

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        (v[k / 2 - 1] + v[k / 2]) / 2.0
    }
}

fn saturation_time(times: &[f64], s: &[f64]) -> Option<f64> {
    let tail = (s.len() / 10).max(1);
    let mut late = s[s.len() - tail..].to_vec();
    let level = SATURATION_FRACTION * median(&mut late);
    if level <= 0.0 {
        return None;
    }
    times.iter().zip(s).find(|(_, &v)| v >= level).map(|(&t, _)| t)
}

impl EntropySeries {
    /// `a₁ = slope · |α_i ± α_q|`.
    pub fn a1(&self, branch: Branch) -> Option<f64> {
        self.growth
            .map(|g| g.slope * branch.denominator(self.alpha_pre, self.alpha_post))
    }

    pub fn a2(&self) -> Option<f64> {
        self.growth.map(|g| g.intercept)
    }
}

pub fn entropy_growth(setup: &QuenchSetup, l: usize, times: &[f64]) -> Result<EntropySeries> {
    check_times(times)?;
    if l < 1 || l > setup.n() / 2 {
        return Err(Error::OutOfRange {
            what: "l",
            value: l,
            lo: 1,
            hi: setup.n() / 2,
        });
    }
    let entropies = times
        .par_iter()
        .map(|&t| block_entropy(&evolve(setup, t)?, l))
        .collect::<Result<Vec<_>>>()?;
    let saturation = saturation_time(times, &entropies);
    let growth = saturation.and_then(|ts| {
        let pts: Vec<(f64, f64)> = times.iter().copied().zip(entropies.iter().copied()).collect();
        linear_fit(&pts, FitWindow::new(0.2 * ts, 0.8 * ts)).ok()
    });
    Ok(EntropySeries {
        l,
        alpha_pre: setup.pre.alpha,
        alpha_post: setup.post.alpha,
        times: times.to_vec(),
        entropies,
        saturation_time: saturation,
        growth,
    })
}

/// Growth-rate proportionality across a family of quenches.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthLawFit {
    pub branch: Branch,
    /// Linear fit of slope against `1 / |α_i ± α_q|` for the chosen branch.
    pub fit: FitResult,
    pub r2_plus: Option<f64>,
    pub r2_minus: Option<f64>,
    /// `a₁` per series for the chosen branch.
    pub a1: Vec<f64>,
}

impl GrowthLawFit {
    /// `max a₁ / min a₁`; 1 for exact proportionality.
    pub fn spread(&self) -> f64 {
        let lo = self.a1.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self.a1.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi / lo
    }
}

/// Fits both branches and keeps the one with the larger `r2`. Series
/// without a growth fit, or with a vanishing denominator, are rejected.
pub fn growth_law_fit(series: &[EntropySeries]) -> Result<GrowthLawFit> {
    let branch_fit = |b: Branch| -> Result<(FitResult, Vec<f64>)> {
        let mut pts = Vec::new();
        let mut a1 = Vec::new();
        for s in series {
            let g = s
                .growth
                .ok_or_else(|| Error::Domain("series without a growth window".into()))?;
            let den = b.denominator(s.alpha_pre, s.alpha_post);
            if den < 1e-12 {
                return Err(Error::Domain("α_i ± α_q vanishes".into()));
            }
            pts.push((1.0 / den, g.slope));
            a1.push(g.slope * den);
        }
        Ok((linear_fit(&pts, FitWindow::all())?, a1))
    };
    let plus = branch_fit(Branch::Plus);
    let minus = branch_fit(Branch::Minus);
    let r2_plus = plus.as_ref().ok().map(|f| f.0.r2);
    let r2_minus = minus.as_ref().ok().map(|f| f.0.r2);
    let (branch, (fit, a1)) = match (plus, minus) {
        (Ok(p), Ok(m)) if m.0.r2 > p.0.r2 => (Branch::Minus, m),
        (Ok(p), _) => (Branch::Plus, p),
        (Err(_), Ok(m)) => (Branch::Minus, m),
        (Err(e), Err(_)) => return Err(e),
    };
    Ok(GrowthLawFit {
        branch,
        fit,
        r2_plus,
        r2_minus,
        a1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    fn setup(a: f64, b: f64, n: usize) -> QuenchSetup {
        let pre = ModelParams::new(1.0, 1.3, -0.5, a, n).unwrap();
        QuenchSetup::new(pre, pre.with_alpha(b)).unwrap()
    }

    #[test]
    fn no_quench_is_static() {
        let s = setup(1.7, 1.7, 64);
        let series = delta_correlation(&s, 3, 4, &[0.0, 1.0, 10.0, 100.0]).unwrap();
        assert!(series.values.iter().all(|z| z.norm() < 1e-12));
        for t in [0.0, 3.0] {
            assert!(delta_correlation_analytic(&s, 3, 4, t).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn analytic_sum_matches_direct_evolution() {
        let pre = ModelParams::new(0.7, 0.3, 0.4, 1.6, 128).unwrap();
        let s = QuenchSetup::new(pre, pre.with_alpha(2.8).with_h(0.9)).unwrap();
        let ts = [0.0, 0.3, 2.0, 17.0];
        let direct = delta_correlation(&s, 5, 7, &ts).unwrap();
        for (t, v) in ts.iter().zip(&direct.values) {
            let a = delta_correlation_analytic(&s, 5, 7, *t).unwrap();
            assert!((v.re - a).abs() <= 1e-10 + 1e-8 * a.abs(), "t={t}: {v} vs {a}");
            assert!(v.im.abs() < 1e-10);
        }
    }

    #[test]
    fn synthetic_envelope_exponent() {
        let times = linear_time_grid(1.0, 200.0, 40_000);
        let values = times
            .iter()
            .map(|t: &f64| C64::new(t.powf(-2.0) * (1.3 * t).cos(), 0.0))
            .collect();
        let series = RelaxationSeries {
            m: 1,
            n: 2,
            times,
            values,
            steady: C64::new(0.0, 0.0),
        };
        let fit = relaxation_exponent(&series, FitWindow::new(5.0, 200.0)).unwrap();
        assert!((fit.exponent() - 2.0).abs() < 0.05, "{}", fit.exponent());
    }

    #[test]
    fn too_few_peaks_rejected() {
        let times = vec![1.0, 2.0, 3.0, 4.0];
        let values = vec![C64::new(1.0, 0.0); 4];
        let series = RelaxationSeries {
            m: 1,
            n: 2,
            times,
            values,
            steady: C64::new(0.0, 0.0),
        };
        assert!(relaxation_exponent(&series, FitWindow::all()).is_err());
    }

    #[test]
    fn grids_and_argument_checks() {
        let g = log_time_grid(1.0, 1000.0, 4);
        assert!((g[1] - 10.0).abs() < 1e-9 && (g[3] - 1000.0).abs() < 1e-9);
        let s = setup(1.1, 2.1, 32);
        assert!(delta_correlation(&s, 2, 2, &[1.0]).is_err());
        assert!(delta_correlation(&s, 0, 2, &[1.0]).is_err());
        assert!(delta_correlation(&s, 1, 2, &[2.0, 1.0]).is_err());
        assert!(entropy_growth(&s, 17, &[1.0]).is_err());
    }

    #[test]
    fn translation_invariance() {
        let s = setup(2.1, 1.1, 64);
        let ts = [0.5, 4.0];
        let base = delta_correlation(&s, 1, 3, &ts).unwrap();
        for off in [1, 5, 17, 30, 60] {
            let other = delta_correlation(&s, 1 + off, 3 + off, &ts).unwrap();
            for (a, b) in base.values.iter().zip(&other.values) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn saturation_of_a_ramp() {
        let times = linear_time_grid(0.0, 100.0, 101);
        let s: Vec<f64> = times.iter().map(|t| t.min(40.0) / 10.0).collect();
        assert_eq!(saturation_time(&times, &s), Some(40.0));
    }
}
