//! Adaptive Gauss–Legendre quadrature.
//!
//! Used for the density-based checks (normalisation, CDF tabulation) and as
//! an independent oracle for special functions. Nodes are computed once by
//! Newton iteration on the Legendre polynomial.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const ORDER: usize = 15;
const MAX_DEPTH: u32 = 48;

struct Rule {
    nodes: [f64; ORDER],
    weights: [f64; ORDER],
}

fn rule() -> &'static Rule {
    static RULE: OnceLock<Rule> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = ORDER;
        let mut nodes = [0.0; ORDER];
        let mut weights = [0.0; ORDER];
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        Rule { nodes, weights }
    })
}

// (P_n(x), P_n'(x)) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn fixed<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
    let r = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = 0.0;
    for (x, w) in r.nodes.iter().zip(&r.weights) {
        s += w * f(mid + half * x);
    }
    s * half
}

/// `∫_a^b f` to within `abs_tol + rel_tol·|∫|` (estimated).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::domain("integration limits must be finite"));
    }
    if a == b {
        return Ok(0.0);
    }
    let whole = fixed(&f, a, b);
    let mut budget = 1usize << 20;
    let v = refine(&f, a, b, whole, abs_tol, rel_tol, MAX_DEPTH, &mut budget)?;
    if !v.is_finite() {
        return Err(Error::domain("integrand produced a non-finite value"));
    }
    Ok(v)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: f64,
    abs_tol: f64,
    rel_tol: f64,
    depth: u32,
    budget: &mut usize,
) -> Result<f64> {
    let mid = 0.5 * (a + b);
    let left = fixed(f, a, mid);
    let right = fixed(f, mid, b);
    let both = left + right;
    if (both - whole).abs() <= abs_tol.max(rel_tol * both.abs()) {
        return Ok(both);
    }
    if depth == 0 || *budget == 0 {
        return Err(Error::domain(format!("adaptive quadrature did not converge on [{a}, {b}]")));
    }
    *budget -= 1;
    Ok(refine(f, a, mid, left, 0.5 * abs_tol, rel_tol, depth - 1, budget)?
        + refine(f, mid, b, right, 0.5 * abs_tol, rel_tol, depth - 1, budget)?)
}

/// `∫_a^b f` for integrands with an integrable (e.g. logarithmic) singularity
/// at `a`, via the substitution `t = a + (b − a)·w²`.
pub fn integrate_singular_left<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    let width = b - a;
    integrate(
        |w| {
            if w == 0.0 {
                0.0
            } else {
                2.0 * width * w * f(a + width * w * w)
            }
        },
        0.0,
        1.0,
        abs_tol,
        rel_tol,
    )
}
