//! Empirical guessing pipeline: ray asymptotic fits from exact data and
//! functional-equation residual validation of the guessed f.
//!
//! A ray is g = (p/q)·n. Along it the unicellular counts behave like
//! E ~ c·g^{2g−2}·μ^g; the fit strips the super-exponential g^{2g−2} part
//! exactly in log space, then extracts log μ by successive log-ratio
//! differencing accelerated with Neville extrapolation in 1/t, and finally
//! the constant c from the extrapolated intercept.
//!
//! The closed-form cross-check: along g = (p/q)n with θ = p/q,
//! μ = (q/p)²·e^{(q/p)·f(θ)} and c = J(θ)/((q/p)²·2√2·π), obtained by
//! substituting n = (q/p)g into the large-v asymptotic formula and cancelling
//! the Stirling part of g! against g^g.

use crate::exact::ExactTriangle;
use crate::parametric::ParametricPoint;
use crate::{Error, Result};

/// Neville polynomial extrapolation of (x_i, y_i) to x = 0.
///
/// Returns the extrapolated value and the trace of |column-to-column|
/// corrections at the final entry (one per level), which should decrease
/// when the extrapolation converges.
pub fn neville_to_zero(points: &[(f64, f64)]) -> (f64, Vec<f64>) {
    assert!(!points.is_empty());
    let n = points.len();
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let mut col: Vec<f64> = points.iter().map(|p| p.1).collect();
    let mut trace = Vec::with_capacity(n - 1);
    for level in 1..n {
        let mut next = vec![0.0; n - level];
        for i in 0..n - level {
            let (x0, x1) = (xs[i], xs[i + level]);
            next[i] = (x0 * col[i + 1] - x1 * col[i]) / (x0 - x1);
        }
        trace.push((next[next.len() - 1] - col[col.len() - 1]).abs());
        col = next;
    }
    (col[0], trace)
}

/// Result of a ray fit E ~ c·g^{a·g+b}·μ^g with a, b taken from the guessed
/// form (a = 2, b = −2) and c, μ extracted numerically.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FitResult {
    pub p: i64,
    pub q: i64,
    pub exponent_a: f64,
    pub exponent_b: f64,
    pub growth_mu: f64,
    pub constant_c: f64,
    pub residual_trace: Vec<f64>,
}

const NEVILLE_LEVELS: usize = 4;

/// Geometrically thinned nodes for extrapolation in 1/t: picks the entries
/// nearest t_max/2^j for j = levels..0 from a t-sorted series. Consecutive
/// nodes amplify f64 noise catastrophically under Neville (the columns divide
/// by x-gaps of order 1/t²); doubling gaps keep the amplification O(1).
fn geometric_nodes(points: &[(i64, f64)], levels: usize) -> Vec<(f64, f64)> {
    assert!(!points.is_empty());
    let t_last = points.last().unwrap().0;
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(levels + 1);
    for j in (0..=levels).rev() {
        let target = (t_last >> j).max(points[0].0);
        let idx = points
            .partition_point(|&(t, _)| t < target)
            .min(points.len() - 1);
        let node = (1.0 / points[idx].0 as f64, points[idx].1);
        if out.last().map(|l: &(f64, f64)| l.0) != Some(node.0) {
            out.push(node);
        }
    }
    out
}

/// Collect ray points (t, ln E(n_t, g_t) exactly in f64) for g = (p/q)n.
fn ray_log_values(table: &ExactTriangle, p: i64, q: i64) -> Result<Vec<(i64, f64)>> {
    if p <= 0 || q <= 0 || 2 * p > q {
        return Err(Error::Domain(format!(
            "ray p/q = {p}/{q} must satisfy 0 < p/q <= 1/2"
        )));
    }
    let d = num_integer::gcd(p, q);
    let (p, q) = (p / d, q / d);
    let t_max = table.n_max as i64 / q;
    let vals: Vec<(i64, f64)> = (1..=t_max)
        .filter_map(|t| {
            let (n, g) = (q * t, p * t);
            let l = table.ln_value(n, g);
            l.is_finite().then_some((t, l))
        })
        .collect();
    if vals.len() < 8 {
        return Err(Error::InsufficientData(format!(
            "ray {p}/{q} has only {} points below n_max = {}; need >= 8",
            vals.len(),
            table.n_max
        )));
    }
    Ok(vals)
}

/// Fit E ~ c·g^{2g−2}·μ^g along the ray g = (p/q)n.
pub fn fit_ray(table: &ExactTriangle, p: i64, q: i64) -> Result<FitResult> {
    if table.n_max < 900 {
        return Err(Error::InsufficientData(format!(
            "ray fit needs n_max >= 900, table has {}",
            table.n_max
        )));
    }
    let d = num_integer::gcd(p, q);
    let (p, q) = (p / d, q / d);
    let vals = ray_log_values(table, p, q)?;
    // Strip the super-exponential part: L_t = ln E − (2g−2) ln g.
    let stripped: Vec<(i64, f64)> = vals
        .iter()
        .filter(|&&(t, _)| p * t >= 1)
        .map(|&(t, l)| {
            let g = (p * t) as f64;
            (t, l - (2.0 * g - 2.0) * g.ln())
        })
        .collect();
    // D_t = L_{t+1} − L_t → p·ln μ; extrapolate geometric nodes in 1/t.
    let diffs: Vec<(i64, f64)> = stripped
        .windows(2)
        .map(|w| (w[0].0, w[1].1 - w[0].1))
        .collect();
    let tail = geometric_nodes(&diffs, NEVILLE_LEVELS);
    let (p_log_mu, mu_trace) = neville_to_zero(&tail);
    let log_mu = p_log_mu / p as f64;
    // Intercept: L_t − g·ln μ → ln c.
    let intercepts: Vec<(i64, f64)> = stripped
        .iter()
        .map(|&(t, l)| (t, l - (p * t) as f64 * log_mu))
        .collect();
    let itail = geometric_nodes(&intercepts, NEVILLE_LEVELS);
    let (log_c, c_trace) = neville_to_zero(&itail);
    let mut residual_trace = mu_trace;
    residual_trace.extend(c_trace);
    Ok(FitResult {
        p,
        q,
        exponent_a: 2.0,
        exponent_b: -2.0,
        growth_mu: log_mu.exp(),
        constant_c: log_c.exp(),
        residual_trace,
    })
}

/// Closed-form (μ, c) predicted on the ray g = (p/q)n:
/// μ = (q/p)²·e^{(q/p) f(p/q)}, c = J(p/q)/((q/p)²·2√2·π).
pub fn theory_ray_constants(p: i64, q: i64) -> Result<(f64, f64)> {
    let theta = p as f64 / q as f64;
    let pt = ParametricPoint::at(theta)?;
    let r = q as f64 / p as f64;
    let mu = (r * pt.f + 2.0 * r.ln()).exp();
    let c = pt.j / (r * r * 2.0 * std::f64::consts::SQRT_2 * std::f64::consts::PI);
    Ok((mu, c))
}

/// Max residual of the limiting functional equation
/// 1 = 4e^{−2θ−f+θf′} + 4e^{−4θ−2f+2θf′−f′}
/// over a grid of interior θ values, with optional additive perturbation of f
/// (for sensitivity checks).
pub fn ode_residual_f_perturbed(theta_grid: &[f64], f_shift: f64) -> Result<f64> {
    let mut max_res = 0.0f64;
    for &theta in theta_grid {
        if !(0.0 < theta && theta < 0.5) {
            return Err(Error::Domain(format!(
                "ODE residual grid point {theta} outside (0, 1/2)"
            )));
        }
        let pt = ParametricPoint::at(theta)?;
        let f = pt.f + f_shift;
        let fp = pt.f_prime;
        let lhs = 4.0 * (-2.0 * theta - f + theta * fp).exp()
            + 4.0 * (-4.0 * theta - 2.0 * f + 2.0 * theta * fp - fp).exp();
        max_res = max_res.max((lhs - 1.0).abs());
    }
    Ok(max_res)
}

/// Max residual of the limiting functional equation with the closed-form f.
pub fn ode_residual_f(theta_grid: &[f64]) -> Result<f64> {
    ode_residual_f_perturbed(theta_grid, 0.0)
}

/// Structure-agnostic exponent recovery along a ray: least-squares fit of
/// ln E against the basis {g ln g, ln g, g, 1, 1/g}, reporting the g^{a·g+b}
/// exponents without assuming them.
#[derive(Debug, Clone, serde::Serialize)]
pub struct GuessReport {
    pub p: i64,
    pub q: i64,
    pub exponent_a: f64,
    pub exponent_b: f64,
    pub log_mu: f64,
    pub log_c: f64,
    pub inv_g_coeff: f64,
}

pub fn guess_form(table: &ExactTriangle, p: i64, q: i64) -> Result<GuessReport> {
    let d = num_integer::gcd(p, q);
    let (p, q) = (p / d, q / d);
    let vals = ray_log_values(table, p, q)?;
    // Use the tail half of the ray where the asymptotic form dominates.
    let tail = &vals[vals.len() / 2..];
    let rows: Vec<([f64; 5], f64)> = tail
        .iter()
        .map(|&(t, l)| {
            let g = (p * t) as f64;
            ([g * g.ln(), g.ln(), g, 1.0, 1.0 / g], l)
        })
        .collect();
    let coef = least_squares_5(&rows)?;
    Ok(GuessReport {
        p,
        q,
        exponent_a: coef[0],
        exponent_b: coef[1],
        log_mu: coef[2],
        log_c: coef[3],
        inv_g_coeff: coef[4],
    })
}

/// Column fit at fixed genus: E(n, g) ~ const·ρ^n·n^e; returns (ρ, e).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct ColumnFit {
    pub growth: f64,
    pub poly_exponent: f64,
}

pub fn fit_column(table: &ExactTriangle, g: i64) -> Result<ColumnFit> {
    let vals: Vec<(i64, f64)> = (2 * g.max(1)..=table.n_max as i64)
        .filter_map(|n| {
            let l = table.ln_value(n, g);
            l.is_finite().then_some((n, l))
        })
        .collect();
    if vals.len() < 12 {
        return Err(Error::InsufficientData(format!(
            "column g={g} has only {} usable points",
            vals.len()
        )));
    }
    let diffs: Vec<(i64, f64)> = vals
        .windows(2)
        .map(|w| (w[0].0, w[1].1 - w[0].1))
        .collect();
    // Exponent from exact second-difference quotients:
    // D_{n+1} − D_n = e·ln(n(n+2)/(n+1)²) for the pure form.
    let expo_pts: Vec<(i64, f64)> = diffs
        .windows(2)
        .map(|w| {
            let n = w[0].0 as f64;
            let denom = (n * (n + 2.0) / ((n + 1.0) * (n + 1.0))).ln();
            (w[0].0, (w[1].1 - w[0].1) / denom)
        })
        .collect();
    let etail = geometric_nodes(&expo_pts, NEVILLE_LEVELS);
    let (poly_exponent, _) = neville_to_zero(&etail);
    // Growth from D_n with the polynomial part removed.
    let rho_pts: Vec<(i64, f64)> = diffs
        .iter()
        .map(|&(n, d)| {
            let nf = n as f64;
            (n, d - poly_exponent * (1.0 + 1.0 / nf).ln())
        })
        .collect();
    let rtail = geometric_nodes(&rho_pts, NEVILLE_LEVELS);
    let (log_rho, _) = neville_to_zero(&rtail);
    Ok(ColumnFit {
        growth: log_rho.exp(),
        poly_exponent,
    })
}

/// Solve a 5-basis least-squares problem via scaled normal equations with
/// Gaussian elimination (the system is tiny and well-conditioned after
/// column scaling).
fn least_squares_5(rows: &[([f64; 5], f64)]) -> Result<[f64; 5]> {
    const K: usize = 5;
    let mut scale = [0.0f64; K];
    for (r, _) in rows {
        for j in 0..K {
            scale[j] = scale[j].max(r[j].abs());
        }
    }
    for s in &mut scale {
        if *s == 0.0 {
            *s = 1.0;
        }
    }
    let mut a = [[0.0f64; K + 1]; K];
    for (r, y) in rows {
        let rs: Vec<f64> = (0..K).map(|j| r[j] / scale[j]).collect();
        for i in 0..K {
            for j in 0..K {
                a[i][j] += rs[i] * rs[j];
            }
            a[i][K] += rs[i] * y;
        }
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..K {
        let piv = (col..K)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        if a[col][col].abs() < 1e-300 {
            return Err(Error::Domain("singular normal equations".into()));
        }
        for row in 0..K {
            if row != col {
                let fac = a[row][col] / a[col][col];
                for j in col..=K {
                    a[row][j] -= fac * a[col][j];
                }
            }
        }
    }
    let mut out = [0.0f64; K];
    for j in 0..K {
        out[j] = a[j][K] / a[j][j] / scale[j];
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::build_unicellular_table;
    use once_cell::sync::Lazy;

    static TABLE_960: Lazy<ExactTriangle> =
        Lazy::new(|| build_unicellular_table(960).unwrap());

    #[test]
    fn neville_exact_on_polynomial() {
        // y = 3 − 2x + x² extrapolates exactly to 3 at x = 0.
        let pts: Vec<(f64, f64)> = [0.5, 0.25, 0.125, 0.1, 0.05]
            .iter()
            .map(|&x| (x, 3.0 - 2.0 * x + x * x))
            .collect();
        let (v, trace) = neville_to_zero(&pts);
        assert!((v - 3.0).abs() < 1e-12);
        assert!(trace.last().unwrap() < &1e-12);
    }

    #[test]
    fn ray_n_eq_3g_growth_constant() {
        let fit = fit_ray(&TABLE_960, 1, 3).unwrap();
        let (mu_th, c_th) = theory_ray_constants(1, 3).unwrap();
        assert!(
            (fit.growth_mu - 117.92347242580899).abs() / 117.92 < 3e-3,
            "mu1 = {}",
            fit.growth_mu
        );
        assert!((fit.growth_mu / mu_th - 1.0).abs() < 1e-2);
        assert!(
            (fit.constant_c / c_th - 1.0).abs() < 1e-2,
            "c1 = {} vs theory {c_th}",
            fit.constant_c
        );
    }

    #[test]
    fn ray_n_eq_4g_growth_constant() {
        let fit = fit_ray(&TABLE_960, 1, 4).unwrap();
        let (mu_th, c_th) = theory_ray_constants(1, 4).unwrap();
        assert!(
            (fit.growth_mu - 1633.2606756507565).abs() / 1633.26 < 3e-3,
            "mu2 = {}",
            fit.growth_mu
        );
        assert!((fit.growth_mu / mu_th - 1.0).abs() < 1e-2);
        assert!((fit.constant_c / c_th - 1.0).abs() < 1e-2);
    }

    #[test]
    fn residual_trace_tail_decreasing() {
        let fit = fit_ray(&TABLE_960, 1, 3).unwrap();
        let t = &fit.residual_trace[..NEVILLE_LEVELS];
        let k = t.len();
        assert!(
            t[k - 3] > t[k - 2] && t[k - 2] > t[k - 1],
            "trace {t:?} not decreasing over last 3 levels"
        );
    }

    #[test]
    fn refuses_short_table_and_bad_rays() {
        let small = build_unicellular_table(100).unwrap();
        assert!(fit_ray(&small, 1, 3).is_err());
        assert!(fit_ray(&TABLE_960, 2, 3).is_err()); // θ > 1/2
        assert!(guess_form(&TABLE_960, 1, 130).is_err()); // < 8 points
    }

    #[test]
    fn ode_residual_small_on_grid() {
        let grid: Vec<f64> = (1..=50).map(|i| i as f64 / 102.0).collect();
        let res = ode_residual_f(&grid).unwrap();
        assert!(res < 1e-12, "max residual {res}");
        let at_quarter = ode_residual_f(&[0.25]).unwrap();
        assert!(at_quarter < 1e-12);
    }

    #[test]
    fn ode_residual_sensitivity() {
        // A +1e−6 shift of f perturbs the residual at first order.
        let res = ode_residual_f_perturbed(&[0.25], 1e-6).unwrap();
        assert!(res > 1e-7 && res < 1e-5, "perturbed residual {res}");
    }

    #[test]
    fn ode_residual_rejects_boundary() {
        assert!(ode_residual_f(&[0.0]).is_err());
        assert!(ode_residual_f(&[0.5]).is_err());
    }

    #[test]
    fn guess_form_recovers_exponents() {
        let rep = guess_form(&TABLE_960, 1, 3).unwrap();
        assert!((rep.exponent_a - 2.0).abs() < 0.02, "a = {}", rep.exponent_a);
        assert!((rep.exponent_b + 2.0).abs() < 0.2, "b = {}", rep.exponent_b);
    }

    #[test]
    fn genus_zero_column_is_catalan_like() {
        let fit = fit_column(&TABLE_960, 0).unwrap();
        assert!((fit.growth - 4.0).abs() < 1e-6, "growth {}", fit.growth);
        assert!(
            (fit.poly_exponent + 1.5).abs() < 1e-4,
            "exponent {}",
            fit.poly_exponent
        );
    }

    #[test]
    fn genus_one_column_exponents() {
        let fit = fit_column(&TABLE_960, 1).unwrap();
        assert!((fit.growth - 4.0).abs() < 1e-6);
        assert!((fit.poly_exponent - 1.5).abs() < 1e-4);
    }
}
