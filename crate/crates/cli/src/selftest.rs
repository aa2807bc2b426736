//! Fast built-in consistency checks.

use normprod_core::prior::np_cdf;
use normprod_core::{
    bessel_k0, bessel_k0_scaled_quadrature, generate_instance, pinv, update_a_finite_noise, update_a_noiseless,
    update_b_finite_noise, update_b_noiseless, update_kappa_inv2, DenseMatrix, DenseVector, Result, StreamKey,
};

pub type K0 = fn(f64) -> Result<f64>;

#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, outcome: Result<(bool, String)>) -> Check {
    match outcome {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: format!("error: {e}") },
    }
}

/// Runs every check with the production `K0`.
pub fn run() -> Vec<Check> {
    run_with(bessel_k0)
}

/// Runs every check, evaluating `K0` through `k0`.
pub fn run_with(k0: K0) -> Vec<Check> {
    vec![
        check("pinv Moore-Penrose identities", penrose()),
        check("K0 reference values", k0_reference(k0)),
        check("K0 integral representation", k0_integral(k0)),
        check("precision update hand example", precision_hand_example()),
        check("precision update alpha=beta=0", precision_simplification()),
        check("noiseless vs small-noise updates", noiseless_agreement()),
        check("NP distribution function limits", np_cdf_limits()),
    ]
}

pub fn render(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for c in checks {
        let tag = if c.passed { "PASS" } else { "FAIL" };
        s.push_str(&format!("{tag}  {:width$}  {}\n", c.name, c.detail));
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    s.push_str(&format!("{} checks, {failed} failed\n", checks.len()));
    s
}

fn gaussian(rows: usize, cols: usize, seed: u64) -> Result<DenseMatrix> {
    // Instance matrices are i.i.d. N(0,1) and need rows <= cols.
    if rows <= cols {
        Ok(generate_instance(cols, rows, 1, StreamKey::new(seed))?.a)
    } else {
        Ok(generate_instance(rows, cols, 1, StreamKey::new(seed))?.a.transpose())
    }
}

fn rel_frob(x: &DenseMatrix, y: &DenseMatrix) -> Result<f64> {
    Ok(x.sub(y)?.frobenius_norm() / y.frobenius_norm().max(f64::MIN_POSITIVE))
}

/// Largest relative Frobenius residual over the four identities.
pub fn penrose_residual(a: &DenseMatrix) -> Result<f64> {
    let x = pinv(a, None)?;
    let ax = a.matmul(&x)?;
    let xa = x.matmul(a)?;
    Ok([
        rel_frob(&ax.matmul(a)?, a)?,
        rel_frob(&xa.matmul(&x)?, &x)?,
        rel_frob(&ax.transpose(), &ax)?,
        rel_frob(&xa.transpose(), &xa)?,
    ]
    .into_iter()
    .fold(0.0, f64::max))
}

fn penrose() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for s in 0..40u64 {
        let (m, n) = (2 + (s % 9) as usize, 2 + ((s * 5) % 11) as usize);
        let a = if s % 3 == 0 {
            let r = 1 + (s as usize % m.min(n));
            gaussian(m, r, 2 * s)?.matmul(&gaussian(r, n, 2 * s + 1)?)?
        } else {
            gaussian(m, n, 2 * s)?
        };
        worst = worst.max(penrose_residual(&a)?);
    }
    Ok((worst <= 1e-10, format!("worst residual {worst:.2e}")))
}

/// `(x, K0(x))` to 20 significant digits.
#[allow(clippy::excessive_precision)]
const K0_TABLE: [(f64, f64); 7] = [
    (1e-3, 7.023_688_800_562_381_343_6),
    (0.1, 2.427_069_024_702_016_612_5),
    (1.0, 0.421_024_438_240_708_333_34),
    (2.0, 0.113_893_872_749_533_435_65),
    (5.0, 3.691_098_334_042_594_274_7e-3),
    (10.0, 1.778_006_231_616_765_181_1e-5),
    (50.0, 3.410_167_749_789_495_513_9e-23),
];

fn k0_reference(k0: K0) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for (x, want) in K0_TABLE {
        worst = worst.max((k0(x)? - want).abs() / want);
    }
    Ok((worst <= 1e-13, format!("worst relative error {worst:.2e}")))
}

fn k0_integral(k0: K0) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for i in 0..12 {
        let x = 1e-3 * 10f64.powf(5.0 * i as f64 / 11.0);
        let oracle = bessel_k0_scaled_quadrature(x)? * (-x).exp();
        worst = worst.max((k0(x)? - oracle).abs() / oracle);
    }
    Ok((worst <= 1e-10, format!("worst relative error {worst:.2e}")))
}

fn v(x: &[f64]) -> DenseVector {
    DenseVector::new(x.to_vec()).expect("finite literal")
}

fn precision_hand_example() -> Result<(bool, String)> {
    // <a> = 2, var = 1, <γ⁻²> = 3, α = β = 1.
    let got = update_kappa_inv2(&v(&[2.0]), &v(&[1.0]), &v(&[3.0]), 1.0, 1.0, 1e-12)?[0];
    let err = (got - 3.0 / 11.0).abs();
    Ok((err <= 1e-15, format!("got {got:.17}")))
}

fn precision_simplification() -> Result<(bool, String)> {
    let a = [0.3, -1.7, 2.5, -0.01];
    let prec = update_kappa_inv2(&v(&a), &DenseVector::zeros(4), &DenseVector::ones(4), 0.0, 0.0, 1e-12)?;
    let worst = a.iter().zip(prec.iter()).map(|(ai, p)| (p.powf(-0.5) - ai.abs()).abs() / ai.abs()).fold(0.0, f64::max);
    Ok((worst <= 1e-15, format!("worst relative error {worst:.2e}")))
}

fn rel(x: &DenseVector, y: &DenseVector) -> f64 {
    let d = x.iter().zip(y.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    d / y.norm2().max(f64::MIN_POSITIVE)
}

fn noiseless_agreement() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for s in 0..10u64 {
        let a = gaussian(5, 8, 1000 + s)?;
        let extra = gaussian(3, 8, 2000 + s)?;
        let y = gaussian(5, 1, 3000 + s)?.column(0);
        let partner = DenseVector::new(extra.row(0).to_vec())?;
        let scale = DenseVector::new(extra.row(1).iter().map(|t| (0.5 * t).exp()).collect())?;
        let prec = scale.map(|s| s.powi(-2));
        let pairs = [
            (update_b_noiseless(&a, &y, &partner, &scale)?, update_b_finite_noise(&a, &y, &partner, &prec, 1e-12)?),
            (update_a_noiseless(&a, &y, &partner, &scale)?, update_a_finite_noise(&a, &y, &partner, &prec, 1e-12)?),
        ];
        for (exact, noisy) in pairs {
            worst = worst.max(rel(&noisy.mean, &exact.mean)).max(rel(&noisy.var, &exact.var));
        }
    }
    Ok((worst <= 1e-4, format!("worst relative difference {worst:.2e}")))
}

fn np_cdf_limits() -> Result<(bool, String)> {
    let mid = np_cdf(0.0, 1.0)?;
    let hi = np_cdf(200.0, 1.0)?;
    let lo = np_cdf(-200.0, 1.0)?;
    let err = (mid - 0.5).abs().max((hi - 1.0).abs()).max(lo.abs());
    Ok((err <= 1e-10, format!("worst deviation {err:.2e}")))
}
