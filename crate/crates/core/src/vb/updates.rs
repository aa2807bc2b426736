//! Mean-field updates for the latent factors and their precision hyperparameters.
//!
//! The observation model is `y = A(a ∘ b) + n`. With the partner factor held
//! at its mean, each factor has a Gaussian posterior. For `b` (and symmetrically
//! for `a`), writing `B = A·diag(⟨a⟩)·diag(⟨γ⟩)`:
//!
//! - noisy:      `Γ = ξ⁻²·diag(⟨a⟩)AᵀA·diag(⟨a⟩) + diag(⟨γ⁻²⟩)`, mean `Γ⁻¹c`,
//!   `c = ξ⁻²·diag(⟨a⟩)Aᵀy`
//! - noiseless:  mean `⟨γ⟩ ∘ B⁺y`, covariance `diag(⟨γ⟩)(I − B⁺B)diag(⟨γ⟩)`
//!
//! The noiseless covariance is the `ξ → 0` limit of `Γ⁻¹` written as
//! `diag(γ)(I + BᵀB/ξ²)⁻¹diag(γ)`.

use crate::error::{Error, Result};
use crate::linalg::{pinv, scale_cols, solve_spd_or_pinv, Cholesky, DenseMatrix, DenseVector};

/// Posterior mean and marginal variances of one factor.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPosterior {
    pub mean: DenseVector,
    pub var: DenseVector,
}

fn check_inputs(a: &DenseMatrix, y: &DenseVector, partner: &DenseVector, own: &DenseVector) -> Result<()> {
    let (m, n) = a.shape();
    if y.len() != m {
        return Err(Error::dimension("factor update", format!("y of length {m}"), y.len()));
    }
    if partner.len() != n || own.len() != n {
        return Err(Error::dimension(
            "factor update",
            format!("factor vectors of length {n}"),
            format!("{} and {}", partner.len(), own.len()),
        ));
    }
    Ok(())
}

// B = A · diag(partner ∘ scales)
fn weighted_design(a: &DenseMatrix, partner: &DenseVector, scales: &DenseVector) -> Result<DenseMatrix> {
    let w = DenseVector::from_vec_unchecked(partner.iter().zip(scales.iter()).map(|(p, s)| p * s).collect());
    scale_cols(a, &w)
}

fn noiseless_factor(
    a: &DenseMatrix,
    y: &DenseVector,
    partner: &DenseVector,
    scales: &DenseVector,
) -> Result<FactorPosterior> {
    check_inputs(a, y, partner, scales)?;
    if let Some(s) = scales.iter().find(|s| !(**s > 0.0)) {
        return Err(Error::domain(format!("factor scales must be positive, got {s}")));
    }
    let b = weighted_design(a, partner, scales)?;
    let b_pinv = pinv(&b, None)?;
    let z = b_pinv.matvec(y)?;
    let n = a.cols();
    let m = a.rows();
    let mut mean = Vec::with_capacity(n);
    let mut var = Vec::with_capacity(n);
    for i in 0..n {
        let s = scales[i];
        mean.push(s * z[i]);
        // (B⁺B)ᵢᵢ = Σⱼ B⁺ᵢⱼ Bⱼᵢ
        let mut projected = 0.0;
        for j in 0..m {
            projected += b_pinv.get(i, j) * b.get(j, i);
        }
        var.push((s * s * (1.0 - projected)).max(0.0));
    }
    let out =
        FactorPosterior { mean: DenseVector::from_vec_unchecked(mean), var: DenseVector::from_vec_unchecked(var) };
    ensure_finite(out, a)
}

/// Noiseless update of `b`: mean `γ ∘ (A·diag(⟨a⟩)·diag(γ))⁺ y`,
/// variance `γ² ∘ diag(I − B⁺B)`.
pub fn update_b_noiseless(
    a: &DenseMatrix,
    y: &DenseVector,
    a_mean: &DenseVector,
    gamma: &DenseVector,
) -> Result<FactorPosterior> {
    noiseless_factor(a, y, a_mean, gamma)
}

/// Noiseless update of `a`; the mirror image of [`update_b_noiseless`].
pub fn update_a_noiseless(
    a: &DenseMatrix,
    y: &DenseVector,
    b_mean: &DenseVector,
    kappa: &DenseVector,
) -> Result<FactorPosterior> {
    noiseless_factor(a, y, b_mean, kappa)
}

fn finite_noise_factor(
    a: &DenseMatrix,
    y: &DenseVector,
    partner: &DenseVector,
    prior_precision: &DenseVector,
    noise_var: f64,
) -> Result<FactorPosterior> {
    check_inputs(a, y, partner, prior_precision)?;
    if !(noise_var > 0.0) || !noise_var.is_finite() {
        return Err(Error::domain(format!("noise variance must be positive, got {noise_var}")));
    }
    if let Some(p) = prior_precision.iter().find(|p| !(**p > 0.0) || !p.is_finite()) {
        return Err(Error::domain(format!("prior precision must be positive, got {p}")));
    }
    let (m, n) = a.shape();
    let out = if m <= n {
        observation_space(a, y, partner, prior_precision, noise_var)?
    } else {
        parameter_space(a, y, partner, prior_precision, noise_var)?
    };
    ensure_finite(out, a)
}

// Woodbury form in the M-dimensional observation space:
// Γ⁻¹ = D(I − Bᵀ(ξ²I + BBᵀ)⁻¹B)D and Γ⁻¹c = D·Bᵀ(ξ²I + BBᵀ)⁻¹y with D = diag(γ).
// For small ξ² this stays well conditioned where Γ itself does not.
fn observation_space(
    a: &DenseMatrix,
    y: &DenseVector,
    partner: &DenseVector,
    prior_precision: &DenseVector,
    noise_var: f64,
) -> Result<FactorPosterior> {
    let scales = prior_precision.map(|p| p.powf(-0.5));
    let b = weighted_design(a, partner, &scales)?;
    let s = b.outer_gram().add_diagonal(&DenseVector::filled(b.rows(), noise_var))?;
    let (w, sb) = match Cholesky::new(&s) {
        Ok(chol) => (chol.solve(y)?, chol.solve_matrix(&b)?),
        Err(e) if e.is_numerical() => {
            let s_pinv = pinv(&s, None)?;
            (s_pinv.matvec(y)?, s_pinv.matmul(&b)?)
        }
        Err(e) => return Err(e),
    };
    let btw = b.tmatvec(&w)?;
    let (m, n) = b.shape();
    let mut mean = Vec::with_capacity(n);
    let mut var = Vec::with_capacity(n);
    for i in 0..n {
        let d = scales[i];
        mean.push(d * btw[i]);
        let mut q = 0.0;
        for j in 0..m {
            q += b.get(j, i) * sb.get(j, i);
        }
        var.push((d * d * (1.0 - q)).max(0.0));
    }
    Ok(FactorPosterior { mean: DenseVector::from_vec_unchecked(mean), var: DenseVector::from_vec_unchecked(var) })
}

// Direct N-dimensional form, used when A has more rows than columns.
fn parameter_space(
    a: &DenseMatrix,
    y: &DenseVector,
    partner: &DenseVector,
    prior_precision: &DenseVector,
    noise_var: f64,
) -> Result<FactorPosterior> {
    let (gamma, c) = precision_system(a, y, partner, prior_precision, noise_var)?;
    let n = gamma.rows();
    let mean = solve_spd_or_pinv(&gamma, &c)?;
    let inverse = match Cholesky::new(&gamma) {
        Ok(chol) => chol.solve_matrix(&DenseMatrix::identity(n))?,
        Err(e) if e.is_numerical() => pinv(&gamma, None)?,
        Err(e) => return Err(e),
    };
    Ok(FactorPosterior { mean, var: inverse.diagonal().map(|v| v.max(0.0)) })
}

/// The posterior precision `Γ = ξ⁻²·diag(p)AᵀA·diag(p) + diag(prior_precision)`
/// and right-hand side `c = ξ⁻²·diag(p)Aᵀy` for a factor whose partner mean is `p`.
pub fn precision_system(
    a: &DenseMatrix,
    y: &DenseVector,
    partner: &DenseVector,
    prior_precision: &DenseVector,
    noise_var: f64,
) -> Result<(DenseMatrix, DenseVector)> {
    check_inputs(a, y, partner, prior_precision)?;
    let ap = scale_cols(a, partner)?;
    let gram = ap.transpose().matmul(&ap)?.scale(1.0 / noise_var);
    let gamma = gram.add_diagonal(prior_precision)?;
    let c = ap.tmatvec(y)?.scale(1.0 / noise_var);
    Ok((gamma, c))
}

/// Finite-noise update of `b` given `⟨a⟩`, `⟨γ⁻²⟩` and noise variance `ξ² > 0`.
///
/// Variances of `a` do not enter: the second moment `⟨aaᵀ⟩` is relaxed to
/// `⟨a⟩⟨a⟩ᵀ`.
pub fn update_b_finite_noise(
    a: &DenseMatrix,
    y: &DenseVector,
    a_mean: &DenseVector,
    gamma_inv2_mean: &DenseVector,
    noise_var: f64,
) -> Result<FactorPosterior> {
    finite_noise_factor(a, y, a_mean, gamma_inv2_mean, noise_var)
}

/// Finite-noise update of `a`; the mirror image of [`update_b_finite_noise`].
pub fn update_a_finite_noise(
    a: &DenseMatrix,
    y: &DenseVector,
    b_mean: &DenseVector,
    kappa_inv2_mean: &DenseVector,
    noise_var: f64,
) -> Result<FactorPosterior> {
    finite_noise_factor(a, y, b_mean, kappa_inv2_mean, noise_var)
}

fn precision_mean(
    mean: &DenseVector,
    var: &DenseVector,
    partner_inv2: &DenseVector,
    alpha: f64,
    beta: f64,
    floor: f64,
) -> Result<DenseVector> {
    if mean.len() != var.len() || mean.len() != partner_inv2.len() {
        return Err(Error::dimension(
            "precision update",
            format!("length {}", mean.len()),
            format!("{} and {}", var.len(), partner_inv2.len()),
        ));
    }
    if !(alpha >= 0.0 && beta >= 0.0 && floor > 0.0) {
        return Err(Error::domain(format!("need alpha >= 0, beta >= 0, floor > 0; got {alpha}, {beta}, {floor}")));
    }
    let shape = 0.5 + alpha;
    Ok(DenseVector::from_vec_unchecked(
        mean.iter()
            .zip(var.iter())
            .zip(partner_inv2.iter())
            .map(|((m, v), p)| {
                let second_moment = m * m + v;
                shape / (0.5 * (second_moment + 2.0 * beta * p).max(floor))
            })
            .collect(),
    ))
}

/// `⟨κᵢ⁻²⟩ = (½ + α) / (½(⟨aᵢ²⟩ + 2β⟨γᵢ⁻²⟩))` with `⟨aᵢ²⟩ = ⟨aᵢ⟩² + Var(aᵢ)`;
/// the bracket is floored at `floor`.
pub fn update_kappa_inv2(
    a_mean: &DenseVector,
    a_var: &DenseVector,
    gamma_inv2_mean: &DenseVector,
    alpha: f64,
    beta: f64,
    floor: f64,
) -> Result<DenseVector> {
    precision_mean(a_mean, a_var, gamma_inv2_mean, alpha, beta, floor)
}

/// `⟨γᵢ⁻²⟩ = (½ + α) / (½(⟨bᵢ²⟩ + 2β⟨κᵢ⁻²⟩))`.
pub fn update_gamma_inv2(
    b_mean: &DenseVector,
    b_var: &DenseVector,
    kappa_inv2_mean: &DenseVector,
    alpha: f64,
    beta: f64,
    floor: f64,
) -> Result<DenseVector> {
    precision_mean(b_mean, b_var, kappa_inv2_mean, alpha, beta, floor)
}

fn ensure_finite(out: FactorPosterior, a: &DenseMatrix) -> Result<FactorPosterior> {
    if out.mean.is_finite() && out.var.is_finite() {
        Ok(out)
    } else {
        Err(Error::numerical("factor update", a.rows(), a.cols(), "non-finite posterior moments"))
    }
}
