use normprod_core::vb::iterate;
use normprod_core::{
    generate_instance, hadamard, relative_error, run_np, DenseMatrix, DenseVector, NpVariant, PosteriorState,
    ProblemInstance, SolverConfig, StreamKey, UpdateOrder,
};

fn instance(n: usize, m: usize, k: usize, seed: u64) -> ProblemInstance {
    generate_instance(n, m, k, StreamKey::new(seed)).unwrap()
}

fn fixed_steps(t: usize) -> SolverConfig {
    SolverConfig { epsilon: f64::MIN_POSITIVE, t_max: t, ..SolverConfig::default() }
}

fn residual(a: &DenseMatrix, x: &DenseVector, y: &DenseVector) -> f64 {
    a.matvec(x).unwrap().sub(y).unwrap().norm2() / y.norm2()
}

#[test]
fn estimate_is_product_of_factor_means_every_iteration() {
    let p = instance(50, 20, 3, 11);
    for variant in [NpVariant::Np0, NpVariant::Np1] {
        let config = SolverConfig::default();
        let mut state = PosteriorState::initial(p.a.cols());
        for _ in 0..30 {
            let x = iterate(variant, &p.a, &p.y, &mut state, &config).unwrap();
            assert_eq!(x, hadamard(&state.a_mean, &state.b_mean).unwrap());
        }
    }
}

#[test]
fn runs_are_bit_reproducible() {
    let p = instance(80, 30, 4, 12);
    for variant in [NpVariant::Np0, NpVariant::Np1] {
        let (r1, s1) = run_np(variant, &p.a, &p.y, &SolverConfig::default(), Some(&p.x0)).unwrap();
        let (r2, s2) = run_np(variant, &p.a, &p.y, &SolverConfig::default(), Some(&p.x0)).unwrap();
        assert_eq!(r1.x_hat, r2.x_hat);
        assert_eq!(s1, s2);
        let changes = |r: &normprod_core::RecoveryResult| {
            r.trace
                .iter()
                .map(|t| (t.relative_change.to_bits(), t.relative_error.map(f64::to_bits)))
                .collect::<Vec<_>>()
        };
        assert_eq!(changes(&r1), changes(&r2));
    }
}

#[test]
fn factor_order_does_not_change_the_estimate() {
    for seed in 0..5 {
        let p = instance(60, 25, 3, 100 + seed);
        for variant in [NpVariant::Np0, NpVariant::Np1] {
            let a_first = SolverConfig::default();
            let b_first = SolverConfig { update_order: UpdateOrder::BFirst, ..SolverConfig::default() };
            let (mut sa, mut sb) = (PosteriorState::initial(60), PosteriorState::initial(60));
            for _ in 0..40 {
                let xa = iterate(variant, &p.a, &p.y, &mut sa, &a_first).unwrap();
                let xb = iterate(variant, &p.a, &p.y, &mut sb, &b_first).unwrap();
                assert_eq!(xa, xb);
                assert_eq!(sa.a_mean, sb.b_mean);
                assert_eq!(sa.kappa_inv2_mean, sb.gamma_inv2_mean);
            }
        }
    }
}

#[test]
fn finite_noise_approaches_noiseless_as_noise_vanishes() {
    for seed in 0..5 {
        let p = instance(60, 25, 3, 200 + seed);
        for variant in [NpVariant::Np0, NpVariant::Np1] {
            let reference = run_np(variant, &p.a, &p.y, &fixed_steps(10), None).unwrap().0.x_hat;
            let gaps: Vec<f64> = [1e-6, 1e-9, 1e-12]
                .into_iter()
                .map(|noise_var| {
                    let config = SolverConfig { noise_var, ..fixed_steps(10) };
                    let x = run_np(variant, &p.a, &p.y, &config, None).unwrap().0.x_hat;
                    relative_error(&x, &reference).unwrap()
                })
                .collect();
            assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{variant:?} seed {seed}: {gaps:?}");
            assert!(gaps[2] < 1e-4, "{gaps:?}");
        }
    }
}

#[test]
fn converged_estimates_fit_the_measurements() {
    let mut checked = 0;
    for seed in 0..20 {
        let p = instance(100, 30, 3, 300 + seed);
        for variant in [NpVariant::Np0, NpVariant::Np1] {
            let config = SolverConfig { epsilon: 1e-6, t_max: 3000, ..SolverConfig::default() };
            let (r, _) = run_np(variant, &p.a, &p.y, &config, None).unwrap();
            if r.converged() {
                checked += 1;
                let res = residual(&p.a, &r.x_hat, &p.y);
                assert!(res <= 1e-6, "{variant:?} seed {seed}: {res:e}");
            }
        }
    }
    assert!(checked >= 30, "only {checked} runs converged");
}

#[test]
fn flat_hyperprior_fixed_point_sets_scale_to_magnitude() {
    let p = instance(80, 40, 3, 400);
    let config = SolverConfig { epsilon: 1e-10, t_max: 3000, ..SolverConfig::default() };
    let (r, state) = run_np(NpVariant::Np1, &p.a, &p.y, &config, None).unwrap();
    assert!(r.converged());
    let mut checked = 0;
    for i in 0..state.len() {
        let a = state.a_mean[i];
        if state.a_var[i] < 1e-8 && a.abs() > 1e-3 {
            checked += 1;
            let kappa = state.kappa_inv2_mean[i].powf(-0.5);
            assert!((kappa - a.abs()).abs() <= 1e-6 * a.abs(), "entry {i}: kappa {kappa}, |a| {}", a.abs());
        }
    }
    assert!(checked >= 1);
}
