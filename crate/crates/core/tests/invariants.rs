use chiralchain::dynamics::{
    delta_correlation, entropy_growth, linear_time_grid, log_time_grid, relaxation_exponent,
    steady_profile, QuenchCase,
};
use chiralchain::entanglement::entropy_profile;
use chiralchain::gaussian::{ground_state, QuenchSetup};
use chiralchain::numerics::FitWindow;
use chiralchain::spincorr::SpinObservables;
use chiralchain::ModelParams;

#[test]
fn entropy_growth_starts_non_decreasing() {
    let l = 80;
    let times = linear_time_grid(0.0, l as f64 / 4.0, 81);
    // the block-entropy quench family
    let quenches = [
        (1.0, 1.3, 1.1, 2.1),
        (1.0, 1.3, 2.1, 1.1),
        (1.0, 1.3, 1.1, 1.2),
        (0.5, 2.5, 0.5, 2.5),
        (0.5, 2.5, 2.5, 0.5),
    ];
    let mut violations = Vec::new();
    for (gamma, d, a, b) in quenches {
        let pre = ModelParams::new(gamma, d, -0.5, a, 512).unwrap();
        let s = entropy_growth(&QuenchSetup::new(pre, pre.with_alpha(b)).unwrap(), l, &times)
            .unwrap()
            .entropies;
        let (k, drop) = s
            .windows(2)
            .map(|w| w[0] - w[1])
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (k, v)| if v > best.1 { (k, v) } else { best });
        if drop > 1e-6 {
            violations.push(format!("{a} -> {b}: drop {drop:.2e} at t = {}", times[k + 1]));
        }
    }
    assert!(violations.is_empty(), "S_t decreases on [0, l/4]: {violations:?}");
}

#[test]
fn pre_quench_gapless_state_is_more_robust() {
    let times = log_time_grid(1.0, 1000.0, 400);
    let window = FitWindow::new(10.0, 1000.0);
    let mut robustness = Vec::new();
    for (a, b) in [(2.1, 1.1), (1.1, 2.1)] {
        let pre = ModelParams::new(1.0, 1.3, -0.5, a, 30_000).unwrap();
        let setup = QuenchSetup::new(pre, pre.with_alpha(b)).unwrap();
        let chi = relaxation_exponent(&delta_correlation(&setup, 1, 2, &times).unwrap(), window)
            .unwrap()
            .exponent();
        robustness.push((QuenchCase::classify(&setup), 1.0 / chi));
    }
    assert_eq!(robustness[0].0, QuenchCase::PreChiral);
    assert_eq!(robustness[1].0, QuenchCase::PostChiral);
    assert!(robustness[0].1 > robustness[1].1, "{robustness:?}");
}

#[test]
fn critical_ising_block_entropy_is_monotone() {
    let n = 512;
    let p = ModelParams::new(1.0, 0.0, 1.0, 500.0, n).unwrap();
    let ls: Vec<usize> = (2..=n / 4).collect();
    let s = entropy_profile(&ground_state(&p).unwrap(), &ls).unwrap();
    for w in s.windows(2) {
        assert!(w[1] >= w[0] - 1e-6);
    }
}

#[test]
fn trivial_quench_steady_profile_is_the_ground_profile() {
    let p = ModelParams::new(0.5, 1.5, 0.5, 1.3, 128).unwrap();
    let prof = steady_profile(&QuenchSetup::new(p, p).unwrap()).unwrap();
    let obs = SpinObservables::compute(&ground_state(&p).unwrap(), 64).unwrap();
    for r in 1..=64 {
        assert!((prof.cxx[r - 1] - obs.cxx[r - 1]).abs() < 1e-10);
        let mi = obs.mutual_information(r).unwrap();
        assert!((prof.mutual_information[r - 1] - mi).abs() < 1e-8);
    }
}
