//! The normal product distribution.
//!
//! `x ~ NP(0, σ²)` has density `K0(|x|/σ) / (πσ)` and is the law of `a·b` for
//! independent `a ~ N(0, κ²)`, `b ~ N(0, γ²)` with `σ = κγ`. The solvers never
//! evaluate the density; it exists here for validation.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::bessel::bessel_k0;
use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::quad;

/// Per-component scales `σᵢ` of an NP marginal.
#[derive(Debug, Clone, PartialEq)]
pub struct NpParams {
    sigma: Vec<f64>,
}

impl NpParams {
    pub fn new(sigma: Vec<f64>) -> Result<Self> {
        if let Some(s) = sigma.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
            return Err(Error::domain(format!("NP scale must be positive, got {s}")));
        }
        Ok(Self { sigma })
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Joint log density `Σᵢ ln(K0(|xᵢ|/σᵢ) / (πσᵢ))`.
    pub fn log_density(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.sigma.len() {
            return Err(Error::dimension("NpParams::log_density", self.sigma.len(), x.len()));
        }
        let mut total = 0.0;
        for (&xi, &s) in x.iter().zip(&self.sigma) {
            total += np_pdf(xi, s)?.ln();
        }
        Ok(total)
    }
}

/// Standard deviations `κ` of `a` and `γ` of `b` in the generating rule.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorScales {
    kappa: Vec<f64>,
    gamma: Vec<f64>,
}

impl FactorScales {
    pub fn new(kappa: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if kappa.len() != gamma.len() {
            return Err(Error::dimension("FactorScales::new", kappa.len(), gamma.len()));
        }
        if let Some(v) = kappa.iter().chain(&gamma).find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::domain(format!("factor scales must be positive, got {v}")));
        }
        Ok(Self { kappa, gamma })
    }

    pub fn uniform(n: usize, kappa: f64, gamma: f64) -> Result<Self> {
        Self::new(vec![kappa; n], vec![gamma; n])
    }

    pub fn len(&self) -> usize {
        self.kappa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kappa.is_empty()
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// The induced NP scales `σ = κ ∘ γ`.
    pub fn np_params(&self) -> NpParams {
        NpParams { sigma: self.kappa.iter().zip(&self.gamma).map(|(k, g)| k * g).collect() }
    }
}

/// Density of `NP(0, σ²)` at `x`.
///
/// The density diverges logarithmically at the origin, so `x = 0` is an error.
pub fn np_pdf(x: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!("NP scale must be positive, got {sigma}")));
    }
    if x == 0.0 {
        return Err(Error::Singular("NP density is unbounded at x = 0".into()));
    }
    let z = x.abs() / sigma;
    if z > 700.0 {
        return Ok(0.0);
    }
    Ok(bessel_k0(z)? / (PI * sigma))
}

/// `(2/π)·∫_0^z K0(t) dt`, the CDF of `|X|/σ`; tends to 1 as `z → ∞`.
fn abs_cdf_unit(z: f64) -> Result<f64> {
    if z <= 0.0 {
        return Ok(0.0);
    }
    let upper = z.min(60.0);
    let k0 = |t: f64| bessel_k0(t).unwrap_or(0.0);
    let near = upper.min(1.0);
    let mut acc = quad::integrate_singular_left(k0, 0.0, near, 1e-16, 1e-14)?;
    if upper > near {
        acc += quad::integrate(k0, near, upper, 1e-16, 1e-14)?;
    }
    Ok((2.0 / PI * acc).min(1.0))
}

/// Cumulative distribution function of `NP(0, σ²)`.
pub fn np_cdf(x: f64, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!("NP scale must be positive, got {sigma}")));
    }
    let g = abs_cdf_unit(x.abs() / sigma)?;
    Ok(if x < 0.0 { 0.5 - 0.5 * g } else { 0.5 + 0.5 * g })
}

/// CDF values at every point of an ascending slice.
///
/// Integrates the density between consecutive `|x|` values instead of from
/// the origin each time, which makes large goodness-of-fit checks cheap.
pub fn np_cdf_sorted(sorted: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::domain(format!("NP scale must be positive, got {sigma}")));
    }
    if sorted.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::domain("np_cdf_sorted expects ascending input"));
    }
    let mut order: Vec<usize> = (0..sorted.len()).collect();
    order.sort_by(|&i, &j| sorted[i].abs().total_cmp(&sorted[j].abs()));

    let k0 = |t: f64| bessel_k0(t).unwrap_or(0.0);
    let mut out = vec![0.0; sorted.len()];
    let mut prev_z = 0.0f64;
    let mut integral = 0.0;
    for idx in order {
        let z = (sorted[idx].abs() / sigma).min(60.0);
        if z > prev_z {
            integral += if prev_z == 0.0 {
                quad::integrate_singular_left(k0, 0.0, z, 1e-17, 1e-13)?
            } else {
                quad::integrate(k0, prev_z, z, 1e-17, 1e-13)?
            };
            prev_z = z;
        }
        let g = (2.0 / PI * integral).min(1.0);
        out[idx] = if sorted[idx] < 0.0 { 0.5 - 0.5 * g } else { 0.5 + 0.5 * g };
    }
    Ok(out)
}

/// Draws `n` NP variates as `aᵢ·bᵢ` with `aᵢ ~ N(0, κᵢ²)`, `bᵢ ~ N(0, γᵢ²)`.
pub fn sample_np<R: Rng + ?Sized>(n: usize, scales: &FactorScales, rng: &mut R) -> Result<DenseVector> {
    if n == 0 {
        return Err(Error::domain("sample size must be at least 1"));
    }
    if scales.len() != n {
        return Err(Error::dimension("sample_np", n, scales.len()));
    }
    let mut out = Vec::with_capacity(n);
    for (k, g) in scales.kappa.iter().zip(&scales.gamma) {
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        out.push((k * a) * (g * b));
    }
    DenseVector::new(out)
}

/// Density of `N(0, variance)`.
pub fn normal_pdf(x: f64, variance: f64) -> f64 {
    (-0.5 * x * x / variance).exp() / (2.0 * PI * variance).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::StreamKey;

    #[test]
    fn density_is_even() {
        for &x in &[1e-6, 0.3, 1.0, 7.5, 123.0] {
            assert_eq!(np_pdf(x, 1.3).unwrap(), np_pdf(-x, 1.3).unwrap());
        }
    }

    #[test]
    fn density_scale_family() {
        for &(x, s, c) in &[(0.7, 1.0, 3.0), (2.0, 0.5, 0.1), (5.0, 2.0, 17.0)] {
            let lhs = np_pdf(c * x, c * s).unwrap();
            let rhs = np_pdf(x, s).unwrap() / c;
            assert!((lhs / rhs - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn density_errors() {
        assert!(matches!(np_pdf(0.0, 1.0), Err(Error::Singular(_))));
        assert!(matches!(np_pdf(1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(np_pdf(1.0, -2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn density_integrates_to_one() {
        let f = |x: f64| np_pdf(x, 1.0).unwrap_or(0.0);
        let near = quad::integrate_singular_left(f, 0.0, 1.0, 1e-14, 1e-13).unwrap();
        let far = quad::integrate(f, 1.0, 60.0, 1e-16, 1e-13).unwrap();
        assert!((2.0 * (near + far) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn peak_exceeds_equal_variance_normal() {
        // Var(ab) = κ²γ² = σ², so compare against N(0, σ²).
        let sigma = 2.0;
        for i in 1..=100 {
            let x = 0.1 * sigma * i as f64 / 101.0;
            assert!(np_pdf(x, sigma).unwrap() > normal_pdf(x, sigma * sigma));
        }
    }

    #[test]
    fn cdf_limits_and_symmetry() {
        assert_eq!(np_cdf(0.0, 1.0).unwrap(), 0.5);
        assert!((np_cdf(200.0, 1.0).unwrap() - 1.0).abs() < 1e-12);
        let a = np_cdf(1.7, 2.0).unwrap();
        let b = np_cdf(-1.7, 2.0).unwrap();
        assert!((a + b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sorted_cdf_matches_pointwise() {
        let xs = [-30.0, -2.0, -0.01, 0.5, 0.5, 3.0, 45.0];
        let table = np_cdf_sorted(&xs, 1.5).unwrap();
        for (x, t) in xs.iter().zip(&table) {
            assert!((np_cdf(*x, 1.5).unwrap() - t).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn sampler_is_deterministic_and_validates() {
        let scales = FactorScales::uniform(16, 1.0, 2.0).unwrap();
        let key = StreamKey::new(7);
        let a = sample_np(16, &scales, &mut key.rng()).unwrap();
        let b = sample_np(16, &scales, &mut key.rng()).unwrap();
        assert_eq!(a, b);
        assert!(sample_np(0, &FactorScales::uniform(0, 1.0, 1.0).unwrap(), &mut key.rng()).is_err());
        assert!(sample_np(3, &scales, &mut key.rng()).is_err());
        assert!(FactorScales::uniform(3, 0.0, 1.0).is_err());
    }

    #[test]
    fn degenerate_scales_give_negligible_samples() {
        let scales = FactorScales::uniform(1000, 1e-300, 1e-300).unwrap();
        let x = sample_np(1000, &scales, &mut StreamKey::new(1).rng()).unwrap();
        assert!(x.iter().all(|v| v.abs() < 1e-300));
    }

    #[test]
    fn product_variance_matches_moment_identity() {
        let n = 1_000_000;
        let scales = FactorScales::uniform(n, 1.0, 1.0).unwrap();
        let x = sample_np(n, &scales, &mut StreamKey::new(2024).rng()).unwrap();
        let mean = x.iter().sum::<f64>() / n as f64;
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        // E[(ab)^4] = 9, so the sample variance has standard error sqrt(8/n).
        let se = (8.0 / n as f64).sqrt();
        assert!((var - 1.0).abs() < 3.0 * se, "variance {var}");
    }
}
