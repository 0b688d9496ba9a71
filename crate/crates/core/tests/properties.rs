//! Property tests over random parameter draws.

use chiralchain::entanglement::block_correlation_matrix;
use chiralchain::gaussian::{evolve, ground_occupations, ground_state, QuenchSetup};
use chiralchain::model::{bdg_block, mode_coefficients, ModelParams, C64};
use chiralchain::numerics::{
    kink_detect, linear_fit, pfaffian, power_law_fit, AntisymmetricMatrix, FitWindow,
};
use chiralchain::spincorr::{Axis, Correlations, SpinObservables};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = ModelParams> {
    (0.0..=1.0f64, 0.0..=2.5f64, -1.5..=1.5f64, 0.3..=3.0f64, 4usize..=40).prop_map(
        |(gamma, d, h, alpha, half)| ModelParams::new(gamma, d, h, alpha, 2 * half).unwrap(),
    )
}

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..=1.0f64, -1.0..=1.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn antisymmetric(dim: usize) -> impl Strategy<Value = AntisymmetricMatrix> {
    proptest::collection::vec(complex(), dim * (dim - 1) / 2).prop_map(move |upper| {
        let mut it = upper.into_iter();
        AntisymmetricMatrix::from_upper(dim, |_, _| it.next().unwrap()).unwrap()
    })
}

/// Signed permutation matrix: orthogonal, integer, determinant ±1.
fn signed_permutation(dim: usize) -> impl Strategy<Value = (Vec<usize>, Vec<f64>)> {
    (
        Just((0..dim).collect::<Vec<_>>()).prop_shuffle(),
        proptest::collection::vec(prop_oneof![Just(1.0), Just(-1.0)], dim),
    )
}

fn to_dense(a: &AntisymmetricMatrix) -> DMatrix<C64> {
    let d = a.dim();
    DMatrix::from_fn(d, d, |i, j| a.get(i, j))
}

fn permutation_sign(perm: &[usize]) -> f64 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1.0;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut k = start;
        while !seen[k] {
            seen[k] = true;
            k = perm[k];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn mode_energies_split_by_lambda_and_shift(p in params(), phi in -3.1..3.1f64) {
        let m = mode_coefficients(&p, phi);
        prop_assert!((m.eps_plus - m.eps_minus - 2.0 * m.lam).abs() < 1e-12);
        prop_assert!((m.eps_plus + m.eps_minus + 2.0 * p.d * m.jk.im).abs() < 1e-12);
        let spec = bdg_block(&p, phi).spectrum();
        prop_assert!((spec[0] - m.eps_minus).abs() < 1e-10);
        prop_assert!((spec[1] - m.eps_plus).abs() < 1e-10);
    }

    #[test]
    fn dm_is_a_uniform_shift_of_each_block(p in params(), phi in -3.1..3.1f64) {
        let with = mode_coefficients(&p, phi);
        let without = mode_coefficients(&p.with_d(0.0), phi);
        prop_assert!((with.lam - without.lam).abs() < 1e-12);
        prop_assert!((with.eps_plus - without.eps_plus + p.d * with.jk.im).abs() < 1e-12);
        prop_assert!((with.eps_minus - without.eps_minus + p.d * with.jk.im).abs() < 1e-12);
    }

    #[test]
    fn opposite_momentum_conjugates_couplings(p in params(), phi in 0.01..3.1f64) {
        let a = mode_coefficients(&p, phi);
        let b = mode_coefficients(&p, -phi);
        prop_assert!((a.jk.conj() - b.jk).norm() < 1e-12);
        prop_assert!((a.lam - b.lam).abs() < 1e-12);
    }

    #[test]
    fn kink_detect_is_translation_equivariant(
        ys in proptest::collection::vec(-5.0..5.0f64, 5..40),
        step in 0.01..1.0f64,
        c in -100.0..100.0f64,
    ) {
        let xs: Vec<f64> = (0..ys.len()).map(|i| i as f64 * step).collect();
        let shifted: Vec<f64> = xs.iter().map(|x| x + c).collect();
        let k0 = kink_detect(&xs, &ys).unwrap();
        let k1 = kink_detect(&shifted, &ys).unwrap();
        prop_assert!((k1 - (k0 + c)).abs() < 1e-9 * (1.0 + c.abs()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn pfaffian_congruence(
        a in antisymmetric(8),
        (perm, signs) in signed_permutation(8),
    ) {
        let dense = to_dense(&a);
        let p = DMatrix::from_fn(8, 8, |i, j| {
            if perm[i] == j { C64::new(signs[i], 0.0) } else { C64::new(0.0, 0.0) }
        });
        let det: f64 = permutation_sign(&perm) * signs.iter().product::<f64>();
        let b = &p * dense * p.transpose();
        let rows: Vec<C64> = (0..8).flat_map(|i| (0..8).map(move |j| (i, j))).map(|(i, j)| b[(i, j)]).collect();
        let pf_b = pfaffian(&AntisymmetricMatrix::from_full(8, rows).unwrap());
        let expected = pfaffian(&a) * det;
        prop_assert!((pf_b - expected).norm() < 1e-10 * (1.0 + expected.norm()));
    }

    #[test]
    fn pfaffian_of_block_diagonal_is_product(blocks in proptest::collection::vec(complex(), 1..6)) {
        let dim = 2 * blocks.len();
        let a = AntisymmetricMatrix::from_upper(dim, |i, j| {
            if i % 2 == 0 && j == i + 1 { blocks[i / 2] } else { C64::new(0.0, 0.0) }
        })
        .unwrap();
        let product: C64 = blocks.iter().product();
        prop_assert!((pfaffian(&a) - product).norm() < 1e-12);
    }

    #[test]
    fn fits_are_exact_on_noiseless_data(
        slope in -3.0..3.0f64,
        intercept in -2.0..2.0f64,
        count in 3usize..50,
    ) {
        let lin: Vec<(f64, f64)> = (0..count).map(|i| (i as f64, slope * i as f64 + intercept)).collect();
        let f = linear_fit(&lin, FitWindow::all()).unwrap();
        prop_assert!((f.slope - slope).abs() < 1e-9);
        prop_assert!((f.intercept - intercept).abs() < 1e-9);
        if slope.abs() > 1e-3 {
            prop_assert!((f.r2 - 1.0).abs() < 1e-9);
        }
        let pow: Vec<(f64, f64)> = (1..=count)
            .map(|i| (i as f64, intercept.exp() * (i as f64).powf(slope)))
            .collect();
        let g = power_law_fit(&pow, FitWindow::all()).unwrap();
        prop_assert!((g.slope - slope).abs() < 1e-9);
        if slope.abs() > 1e-3 {
            prop_assert!((g.r2 - 1.0).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evolved_states_stay_pure_and_conserve_momentum_imbalance(
        pre in params(),
        h in -1.5..=1.5f64,
        alpha in 0.3..=3.0f64,
        t in 0.0..200.0f64,
    ) {
        let setup = QuenchSetup::new(pre, pre.with_h(h).with_alpha(alpha)).unwrap();
        let state = evolve(&setup, t).unwrap();
        prop_assert!(state.max_purity_defect() < 1e-10);
        prop_assert!(state.max_hermiticity_defect() < 1e-12);
        // tr Γ_q - 1 = n_q - n_{-q} is fixed by the initial quasiparticle filling
        for (m, g) in setup.pre_modes.iter().zip(&state.blocks) {
            let (a, b) = ground_occupations(m);
            let imbalance = a as i32 as f64 - b as i32 as f64;
            prop_assert!((g.trace().re - 1.0 - imbalance).abs() < 1e-10);
        }
    }

    #[test]
    fn dm_coupling_only_adds_phases_under_evolution(
        pre in params(),
        alpha in 0.3..=3.0f64,
        t in 0.0..100.0f64,
    ) {
        let post = pre.with_alpha(alpha);
        // both start from the ground state of `pre`
        let with = evolve(&QuenchSetup::new(pre, post).unwrap(), t).unwrap();
        let without = evolve(&QuenchSetup::new(pre, post.with_d(0.0)).unwrap(), t).unwrap();
        for (a, b) in with.blocks.iter().zip(&without.blocks) {
            prop_assert!((a - b).iter().map(|z| z.norm()).fold(0.0, f64::max) < 1e-10);
        }
    }

    #[test]
    fn two_site_density_is_a_state(p in params(), r_frac in 0.0..1.0f64) {
        let state = ground_state(&p).unwrap();
        let r = 1 + ((p.n / 2 - 1) as f64 * r_frac) as usize;
        let c = Correlations::new(&state, r);
        let rho = c.two_site_density(r).unwrap();
        prop_assert!((rho.trace() - C64::new(1.0, 0.0)).norm() < 1e-10);
        prop_assert!(rho.hermiticity_residual() < 1e-10);
        prop_assert!(rho.eigenvalues()[0] > -1e-8);
        prop_assert!(c.mutual_information(r).unwrap() >= 0.0);
    }

    #[test]
    fn no_dm_means_no_cross_correlations(p in params()) {
        let state = ground_state(&p.with_d(0.0)).unwrap();
        let obs = SpinObservables::compute(&state, p.n / 2).unwrap();
        for r in 0..obs.cxy.len() {
            prop_assert!(obs.cxy[r].abs() < 1e-10);
            prop_assert!(obs.cyx[r].abs() < 1e-10);
        }
        let c = Correlations::new(&state, 1);
        prop_assert!(c.spin(Axis::X, Axis::Y, 1).unwrap().abs() < 1e-10);
    }

    #[test]
    fn block_spectrum_pairs_to_one(p in params(), l_frac in 0.0..1.0f64) {
        let state = ground_state(&p).unwrap();
        let l = 1 + ((p.n / 2 - 1) as f64 * l_frac) as usize;
        let ev = block_correlation_matrix(&state, l).unwrap().eigenvalues();
        let k = ev.len();
        for i in 0..k {
            prop_assert!((ev[i] + ev[k - 1 - i] - 1.0).abs() < 1e-8);
        }
    }
}
