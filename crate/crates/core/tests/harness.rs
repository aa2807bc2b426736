use normprod_core::harness::instance_key;
use normprod_core::{
    generate_instance, run_convergence_trace, run_phase_sweep, Axis, ExperimentGrid, GridSpec, Method, SolverSuite,
    StreamKey,
};

/// `chi2.ppf(0.99, 99)`.
const CHI2_99_DOF_1PCT: f64 = 134.641_616_855_789_15;

#[test]
fn instance_statistics() {
    let (n, m, k, count) = (100, 30, 3, 10_000);
    let mut hits = vec![0u64; n];
    let (mut sum, mut sum_sq, mut entries) = (0.0f64, 0.0f64, 0usize);
    let master = StreamKey::new(2718);
    for i in 0..count {
        let p = generate_instance(n, m, k, master.split(&[i as u64])).unwrap();
        let support: Vec<usize> = (0..n).filter(|&j| p.x0[j] != 0.0).collect();
        assert_eq!(support.len(), k);
        for j in support {
            hits[j] += 1;
        }
        for &v in p.a.as_slice() {
            sum += v;
            sum_sq += v * v;
        }
        entries += p.a.as_slice().len();
    }
    let expected = (count * k) as f64 / n as f64;
    let chi2: f64 = hits.iter().map(|&h| (h as f64 - expected).powi(2) / expected).sum();
    assert!(chi2 < CHI2_99_DOF_1PCT, "chi-square {chi2}");

    let count = entries as f64;
    let mean = sum / count;
    let var = sum_sq / count - mean * mean;
    assert!(mean.abs() <= 3.0 / count.sqrt(), "mean {mean}");
    assert!((var - 1.0).abs() <= 3.0 * (2.0 / count).sqrt(), "variance {var}");
}

fn grid_spec(seed: u64) -> GridSpec {
    GridSpec {
        n: 40,
        fixed: Axis::K,
        fixed_value: 2,
        sweep: vec![8, 14, 20],
        methods: Method::ALL.to_vec(),
        trials: 6,
        master_seed: seed,
        suite: SolverSuite::default(),
    }
}

fn without_timing(mut g: ExperimentGrid) -> ExperimentGrid {
    g.records.iter_mut().for_each(|r| r.seconds = 0.0);
    g.points.iter_mut().for_each(|p| p.mean_seconds = 0.0);
    g
}

#[test]
fn grid_is_independent_of_worker_count() {
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        without_timing(pool.install(|| run_phase_sweep(&grid_spec(31)).unwrap()))
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(1));
}

#[test]
fn aggregates_are_exact() {
    let g = run_phase_sweep(&grid_spec(32)).unwrap();
    for point in &g.points {
        let recs: Vec<_> = g.records.iter().filter(|r| r.m == point.m && r.method == point.method).collect();
        assert_eq!(recs.len(), point.trials);
        for r in &recs {
            assert_eq!(r.success, r.relative_error < 1e-3);
        }
        let successes = recs.iter().filter(|r| r.success).count();
        assert_eq!(point.successes, successes);
        assert_eq!(point.success_rate, successes as f64 / point.trials as f64);
    }
}

#[test]
fn trials_are_paired_across_methods() {
    let g = run_phase_sweep(&grid_spec(33)).unwrap();
    for r in &g.records {
        let expected = instance_key(33, r.trial, 40, r.m, r.k);
        assert_eq!(r.instance_stream, expected.stream);
    }
}

#[test]
fn traces_end_below_where_they_start() {
    let rows = run_convergence_trace(100, 30, 3, &Method::ALL, 7, &SolverSuite::default()).unwrap();
    for method in Method::ALL {
        let mse: Vec<f64> = rows.iter().filter(|r| r.method == method).map(|r| r.mse_db).collect();
        assert!(!mse.is_empty());
        assert!(mse[mse.len() - 1] <= mse[0], "{method}: {} -> {}", mse[0], mse[mse.len() - 1]);
    }
}
