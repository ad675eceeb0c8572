//! Closed-form parametric functions behind the bivariate asymptotics.
//!
//! The central objects are the implicit parameter λ(θ) ∈ (0, 1/4) defined by
//!
//!   θ = 1/2 − (λ/√(1−4λ)) · log((1+√(1−4λ))² / (4λ)),
//!
//! the exponential rate f(θ), the polynomial-correction factor J(θ), their
//! derivatives in closed form, the high-genus reparametrisation h(γ) with
//! γ = 1/2 − θ, and the analogous parametric pair for triangulations.
//!
//! All evaluation is in f64. Root finding happens in log λ (resp. log h),
//! where the defining equations are monotone and well conditioned across the
//! entire open interval, with dedicated endpoint series where the implicit
//! function itself degenerates.

use crate::gamma::ln_gamma;
use crate::{Error, Result};

/// Default forward-residual tolerance for the implicit-parameter solvers.
pub const DEFAULT_TOL: f64 = 1e-14;

/// Crossover below which θ is considered an endpoint case (θ → 0).
pub const SMALL_THETA_CROSSOVER: f64 = 1e-4;
/// Crossover below which γ = 1/2 − θ is considered an endpoint case (θ → 1/2).
pub const LARGE_THETA_CROSSOVER: f64 = 1e-4;
/// Largest θ (resp. γ) accepted by the endpoint series evaluators.
pub const SERIES_WINDOW: f64 = 0.01;

/// Which branch produced a [`ParametricPoint`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    EndpointSmall,
    Interior,
    EndpointLarge,
}

/// Bundle (θ, λ, f, f′, f″, J, J′/J) at one parameter value.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ParametricPoint {
    pub theta: f64,
    pub lambda: f64,
    pub f: f64,
    pub f_prime: f64,
    pub f_second: f64,
    pub j: f64,
    pub j_log_prime: f64,
    pub regime: Regime,
}

/// Forward map θ(λ) for λ ∈ (0, 1/4], in the cancellation-free form
/// θ = 1/2 − λ·log((1+s)²/(4λ))/s with s = √(1−4λ).
pub fn theta_of_lambda(lambda: f64) -> f64 {
    assert!(lambda > 0.0 && lambda <= 0.25);
    let u = (1.0 - 4.0 * lambda).max(0.0);
    if u < 0.25 {
        // Cancellation-free endpoint branch: with u = 1 − 4λ,
        // θ = Σ_{k≥1} u^k / ((2k−1)(2k+1)), convergent for u < 1.
        let mut theta = 0.0;
        let mut pow = 1.0;
        for k in 1..200i32 {
            pow *= u;
            let term = pow / ((4 * k * k - 1) as f64);
            theta += term;
            if term < 1e-18 * theta {
                break;
            }
        }
        return theta;
    }
    let s = u.sqrt();
    0.5 - lambda * ((1.0 + s) * (1.0 + s) / (4.0 * lambda)).ln() / s
}

/// dθ/dλ from the first-order linear ODE 2θ′(λ) = −1/λ + (4/(1−4λ) + 2/λ)·θ.
pub fn theta_prime_of_lambda(lambda: f64, theta: f64) -> f64 {
    0.5 * (-1.0 / lambda + (4.0 / (1.0 - 4.0 * lambda) + 2.0 / lambda) * theta)
}

/// Invert θ(λ): monotone bisection in log λ followed by a Newton polish.
pub fn lambda_of_theta(theta: f64, tol: f64) -> Result<f64> {
    assert!(tol > 0.0);
    if theta <= 0.0 {
        return Ok(0.25);
    }
    if theta >= 0.5 {
        return Ok(0.0);
    }
    // θ(λ) decreases from 1/2 (λ→0) to 0 (λ=1/4).
    let mut lo = -745.0f64; // log λ with θ ≈ 1/2
    let mut hi = 0.25f64.ln();
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if theta_of_lambda(mid.exp()) > theta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut lambda = (0.5 * (lo + hi)).exp();
    // Newton polish on the forward residual.
    for _ in 0..4 {
        let res = theta_of_lambda(lambda) - theta;
        if res == 0.0 {
            break;
        }
        let deriv = theta_prime_of_lambda(lambda, theta_of_lambda(lambda));
        let next = lambda - res / deriv;
        if next > 0.0 && next < 0.25 {
            lambda = next;
        }
    }
    let res = (theta_of_lambda(lambda) - theta).abs();
    if res > tol {
        return Err(Error::RootFind(format!(
            "lambda_of_theta(theta={theta}): residual {res} > tol {tol}, \
             bracket log-lambda [{lo}, {hi}]"
        )));
    }
    Ok(lambda)
}

fn f_from(theta: f64, lambda: f64) -> f64 {
    -theta * (1.0 - 4.0 * lambda).ln() - (1.0 - 2.0 * theta) * lambda.ln()
        + 2.0 * (2.0f64.ln() - 1.0) * theta
}

fn f_prime_from(lambda: f64) -> f64 {
    (4.0 * lambda * lambda / (1.0 - 4.0 * lambda)).ln()
}

fn f_second_from(theta: f64, lambda: f64) -> f64 {
    (2.0 / lambda + 4.0 / (1.0 - 4.0 * lambda)) / theta_prime_of_lambda(lambda, theta)
}

fn j_from(theta: f64, lambda: f64) -> f64 {
    let d = 1.0 - 2.0 * theta - 4.0 * lambda + 4.0 * theta * lambda;
    (2.0 / (lambda * d)).sqrt()
}

fn j_log_prime_from(theta: f64, lambda: f64) -> f64 {
    // J = √(2/(λD)) ⇒ J′/J = −(λ′/λ + D′/D)/2 with D′ = dD/dθ.
    let d = 1.0 - 2.0 * theta - 4.0 * lambda + 4.0 * theta * lambda;
    let lambda_prime = 1.0 / theta_prime_of_lambda(lambda, theta);
    let d_prime = -2.0 + 4.0 * lambda + 4.0 * lambda_prime * (theta - 1.0);
    -0.5 * (lambda_prime / lambda + d_prime / d)
}

/// f(θ) for θ ∈ (0, 1/2); the endpoints return their finite limits.
pub fn f_of_theta(theta: f64) -> Result<f64> {
    if theta <= 0.0 {
        return Ok(2.0 * 2.0f64.ln());
    }
    if theta >= 0.5 {
        return Ok(2.0f64.ln() - 1.0);
    }
    let lambda = lambda_of_theta(theta, DEFAULT_TOL)?;
    Ok(f_from(theta, lambda))
}

/// J(θ) for θ ∈ (0, 1/2); diverges at the endpoints (signed-infinity marker).
pub fn j_of_theta(theta: f64) -> Result<f64> {
    if theta <= 0.0 || theta >= 0.5 {
        return Ok(f64::INFINITY);
    }
    let lambda = lambda_of_theta(theta, DEFAULT_TOL)?;
    Ok(j_from(theta, lambda))
}

/// f′(θ) = log(4λ²/(1−4λ)), the rearranged defining identity of f′.
pub fn f_prime(theta: f64) -> Result<f64> {
    let lambda = lambda_of_theta(theta, DEFAULT_TOL)?;
    Ok(f_prime_from(lambda))
}

/// f″(θ) = (2/λ + 4/(1−4λ)) · λ′(θ), closed form via the linear ODE for θ(λ).
pub fn f_second(theta: f64) -> Result<f64> {
    let lambda = lambda_of_theta(theta, DEFAULT_TOL)?;
    Ok(f_second_from(theta, lambda))
}

/// J′(θ)/J(θ) by analytic differentiation of the closed form.
pub fn j_log_prime(theta: f64) -> Result<f64> {
    let lambda = lambda_of_theta(theta, DEFAULT_TOL)?;
    Ok(j_log_prime_from(theta, lambda))
}

impl ParametricPoint {
    /// Evaluate the full bundle, dispatching to endpoint series where the
    /// root finder is ill conditioned.
    pub fn at(theta: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&theta) || theta == 0.0 || theta == 0.5 {
            return Err(Error::Domain(format!(
                "ParametricPoint requires theta in the open interval (0, 1/2), got {theta}"
            )));
        }
        if theta < SMALL_THETA_CROSSOVER {
            return series_small_theta(theta);
        }
        if 0.5 - theta < LARGE_THETA_CROSSOVER {
            return series_large_theta(theta);
        }
        let lambda = lambda_of_theta(theta, DEFAULT_TOL)?;
        Ok(ParametricPoint {
            theta,
            lambda,
            f: f_from(theta, lambda),
            f_prime: f_prime_from(lambda),
            f_second: f_second_from(theta, lambda),
            j: j_from(theta, lambda),
            j_log_prime: j_log_prime_from(theta, lambda),
            regime: Regime::Interior,
        })
    }
}

/// Endpoint series near θ = 0:
/// λ = 1/4 − 3θ/4 + 9θ²/20, f = log4 − θlogθ + θ − θlog12 − (27/10)θ²,
/// J = 2/√θ + (27/5)√θ. Refuses outside its validity window.
pub fn series_small_theta(theta: f64) -> Result<ParametricPoint> {
    if theta <= 0.0 || theta > SERIES_WINDOW {
        return Err(Error::Domain(format!(
            "series_small_theta valid only for 0 < theta <= {SERIES_WINDOW}, got {theta}"
        )));
    }
    let lambda = 0.25 - 0.75 * theta + 0.45 * theta * theta;
    let f = 4.0f64.ln() - theta * theta.ln() + theta - theta * 12.0f64.ln()
        - 2.7 * theta * theta;
    let j = 2.0 / theta.sqrt() + 5.4 * theta.sqrt();
    Ok(ParametricPoint {
        theta,
        lambda,
        f,
        f_prime: f_prime_from(lambda),
        f_second: f_second_from(theta, lambda),
        j,
        j_log_prime: j_log_prime_from(theta, lambda),
        regime: Regime::EndpointSmall,
    })
}

/// Endpoint series near θ = 1/2, parametrised by small λ:
/// 1/2 − θ = −λlogλ − 2λ²(1+logλ), f = log2 − 1 + (2 + 2log²λ + (2log2−2)logλ)λ,
/// J = √(−1/(1+logλ))·(1/λ − 1/(1+logλ)). Refuses outside its validity window.
pub fn series_large_theta(theta: f64) -> Result<ParametricPoint> {
    let gamma = 0.5 - theta;
    if gamma <= 0.0 || gamma > SERIES_WINDOW {
        return Err(Error::Domain(format!(
            "series_large_theta valid only for 0 < 1/2 - theta <= {SERIES_WINDOW}, got theta={theta}"
        )));
    }
    // Invert the truncated relation by bisection in log λ (monotone for small λ).
    let rel = |lambda: f64| -lambda * lambda.ln() - 2.0 * lambda * lambda * (1.0 + lambda.ln());
    let (mut lo, mut hi) = (-745.0f64, 0.05f64.ln());
    for _ in 0..120 {
        let mid = 0.5 * (lo + hi);
        if rel(mid.exp()) < gamma {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = (0.5 * (lo + hi)).exp();
    let ll = lambda.ln();
    let f = 2.0f64.ln() - 1.0
        + (2.0 + 2.0 * ll * ll + (2.0 * 2.0f64.ln() - 2.0) * ll) * lambda;
    let root = (-1.0 / (ll + 1.0)).sqrt();
    let j = root / lambda - root / (ll + 1.0);
    Ok(ParametricPoint {
        theta,
        lambda,
        f,
        f_prime: 2.0 * ll + 2.0 * 2.0f64.ln(),
        f_second: 2.0 / (lambda * (1.0 + ll)),
        j,
        j_log_prime: -1.0 / (lambda * (1.0 + ll))
            - 1.0 / (2.0 * lambda * (1.0 + ll) * (1.0 + ll)),
        regime: Regime::EndpointLarge,
    })
}

/// High-genus bundle in the variable γ = 1/2 − θ.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct HighGenusPoint {
    pub gamma: f64,
    pub lambda: f64,
    pub h: f64,
    pub h_prime: f64,
    pub jtilde: f64,
}

/// h(γ) = f(1/2−γ) + 1 − 2γ − log2 + 2γ·log(2γ), its derivative
/// h′(γ) = 2log(2γ) − f′(1/2−γ) (computed from the independent closed forms,
/// so that the exact identity γh′ − h = ½log(1−4λ) is a genuine check), and
/// J̃(γ) = γ/√(λ(γ − λ − 2λγ)).
pub fn high_genus_functions(gamma: f64) -> Result<HighGenusPoint> {
    if gamma <= 0.0 || gamma >= 0.5 {
        return Err(Error::Domain(format!(
            "high_genus_functions requires gamma in (0, 1/2), got {gamma}"
        )));
    }
    let theta = 0.5 - gamma;
    let lambda = lambda_of_theta(theta, DEFAULT_TOL)?;
    let h = f_from(theta, lambda) + 1.0 - 2.0 * gamma - 2.0f64.ln()
        + 2.0 * gamma * (2.0 * gamma).ln();
    let h_prime = 2.0 * (2.0 * gamma).ln() - f_prime_from(lambda);
    let jtilde = gamma / (lambda * (gamma - lambda - 2.0 * lambda * gamma)).sqrt();
    Ok(HighGenusPoint {
        gamma,
        lambda,
        h,
        h_prime,
        jtilde,
    })
}

/// Stirling correction factor K(x) = √(2π)·x^{x+1}/(e^x·Γ(x+3/2)), K(x) → 1.
pub fn k_factor(x: f64) -> f64 {
    assert!(x > 0.0);
    (0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 1.0) * x.ln() - x - ln_gamma(x + 1.5)).exp()
}

/// Parametric pair for the triangulation asymptotics.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct TriangulationPoint {
    pub theta: f64,
    pub h_tri: f64,
    pub f_tri: f64,
    pub j_tri: f64,
}

/// Forward map θ(h) for the triangulation parametrisation, h ∈ (0, 1/4]:
/// θ = 1/2 − 3h·log((1+s)²/(4h)) / ((1+8h)·s) with s = √(1−4h).
pub fn theta_of_h(h: f64) -> f64 {
    assert!(h > 0.0 && h <= 0.25);
    let s = (1.0 - 4.0 * h).max(0.0).sqrt();
    if s == 0.0 {
        return 0.0;
    }
    0.5 - 3.0 * h * ((1.0 + s) * (1.0 + s) / (4.0 * h)).ln() / ((1.0 + 8.0 * h) * s)
}

/// Solve θ(h) = θ and evaluate the conjectured f and J closed forms.
pub fn triangulation_functions(theta: f64, tol: f64) -> Result<TriangulationPoint> {
    if theta <= 0.0 || theta >= 0.5 {
        return Err(Error::Domain(format!(
            "triangulation_functions requires theta in (0, 1/2), got {theta}"
        )));
    }
    // θ(h) decreases from 1/2 (h→0) to 0 (h=1/4); bisection in log h.
    let (mut lo, mut hi) = (-745.0f64, 0.25f64.ln() - 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if theta_of_h(mid.exp()) > theta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let h = (0.5 * (lo + hi)).exp();
    let res = (theta_of_h(h) - theta).abs();
    if res > tol {
        return Err(Error::RootFind(format!(
            "triangulation_functions(theta={theta}): residual {res} > tol {tol}"
        )));
    }
    let s = (1.0 - 4.0 * h).sqrt();
    let f_tri = 2.0 * theta * (6.0 * h / ((1.0 + 8.0 * h) * s)).ln() - 2.0 * theta
        - (h / (1.0 + 8.0 * h).powf(1.5)).ln();
    let radicand = (1.0 - 2.0 * theta) * (1.0 - 4.0 * h) * (1.0 - 4.0 * h)
        - 12.0 * theta * h;
    if radicand <= 0.0 {
        return Err(Error::Domain(format!(
            "triangulation J radicand non-positive at theta={theta} (h={h})"
        )));
    }
    let j_tri = (1.0 - 4.0 * h) * (1.0 + 8.0 * h).powf(2.5) / (h.powf(1.5) * radicand.sqrt());
    Ok(TriangulationPoint {
        theta,
        h_tri: h,
        f_tri,
        j_tri,
    })
}

/// Residual of the identity 1 − 4λ − 4λ²·e^{−f′(θ)} = 0.
pub fn rate_identity_residual(theta: f64) -> Result<f64> {
    let lambda = lambda_of_theta(theta, DEFAULT_TOL)?;
    let fp = f_prime_from(lambda);
    Ok((1.0 - 4.0 * lambda - 4.0 * lambda * lambda * (-fp).exp()).abs())
}

/// Residual of the exact identity γ·h′(γ) − h(γ) − ½·log(1−4λ) = 0.
pub fn high_genus_identity_residual(gamma: f64) -> Result<f64> {
    let p = high_genus_functions(gamma)?;
    Ok((p.gamma * p.h_prime - p.h - 0.5 * (1.0 - 4.0 * p.lambda).ln()).abs())
}
