//! Numerical support for the conjectured triangulation asymptotics:
//! evaluate the conjectured Ω_τ(n, g) and compare against exact τ(n, g)
//! along rays. Support is trend-based only and quarantined from the
//! established unicellular checks.

use crate::exact::{ExactTriangle, TriangleKind};
use crate::omega::{log_omega, OmegaModel};
use crate::{Error, Result};

/// Log of the conjectured Ω_τ(n, g) = n^{2g−5/2}·e^{n f_τ(g/n)}·J_τ(g/n)
/// / (4(3π)^{3/2}); refuses endpoint θ.
pub fn log_omega_triangulation(n: i64, g: i64) -> Result<f64> {
    log_omega(OmegaModel::Triangulation, n, g)
}

/// The recurrence seeds are provisional (Open Questions); before trusting a
/// table we require it to reproduce the published small counts.
fn validate_seeds(table: &ExactTriangle) -> Result<()> {
    if table.kind != TriangleKind::Triangulation {
        return Err(Error::Domain(
            "conjecture_ratio_trend needs a triangulation table".into(),
        ));
    }
    let expected: [((i64, i64), i64); 4] = [((1, 0), 4), ((2, 0), 32), ((3, 0), 336), ((1, 1), 1)];
    for ((n, g), want) in expected {
        let got = table.value(n, g);
        if got != want.into() {
            return Err(Error::Domain(format!(
                "triangulation seeds unvalidated: tau({n}, {g}) = {got}, expected {want}; \
                 see the seed-normalisation open question before using this table"
            )));
        }
    }
    Ok(())
}

/// Ratio sequence τ(n, g)/Ω_τ(n, g) along the ray g = (p/q)n.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TrendReport {
    pub p: i64,
    pub q: i64,
    /// (n, g, ratio) along the ray.
    pub points: Vec<(i64, i64, f64)>,
    /// |ratio − 1| non-increasing over the second half of the sequence.
    pub tail_monotone: bool,
    /// |ratio − 1| at the largest computed n.
    pub final_gap: f64,
}

pub fn conjecture_ratio_trend(
    table: &ExactTriangle,
    p: i64,
    q: i64,
    n_points: usize,
) -> Result<TrendReport> {
    validate_seeds(table)?;
    if p <= 0 || q <= 0 || 2 * p >= q {
        return Err(Error::Domain(format!(
            "ray p/q = {p}/{q} must satisfy 0 < p/q < 1/2"
        )));
    }
    let d = num_integer::gcd(p, q);
    let (p, q) = (p / d, q / d);
    let t_max = (table.n_max as i64 / q).min(n_points as i64);
    let mut points = Vec::new();
    for t in 1..=t_max {
        let (n, g) = (q * t, p * t);
        let log_om = match log_omega_triangulation(n, g) {
            Ok(v) => v,
            Err(_) => continue, // endpoint θ on tiny t
        };
        let ln_tau = table.ln_value(n, g);
        if ln_tau.is_finite() {
            points.push((n, g, (ln_tau - log_om).exp()));
        }
    }
    if points.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "ray {p}/{q} has only {} point(s) in the table; trend needs >= 2",
            points.len()
        )));
    }
    let half = points.len() / 2;
    let tail_monotone = points[half..]
        .windows(2)
        .all(|w| (w[1].2 - 1.0).abs() <= (w[0].2 - 1.0).abs() * 1.0001);
    let final_gap = (points.last().unwrap().2 - 1.0).abs();
    Ok(TrendReport {
        p,
        q,
        points,
        tail_monotone,
        final_gap,
    })
}

/// Side-by-side audit of the structural parallel between the conjectured
/// triangulation form and the proven unicellular infinite-genus form: both
/// are n^{2g+e}·e^{n·f}·J with only (e, constant) differing.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct StructuralParallel {
    pub unicellular_exponent_offset: f64,
    pub unicellular_log_constant: f64,
    pub triangulation_exponent_offset: f64,
    pub triangulation_log_constant: f64,
}

pub fn structural_parallel() -> StructuralParallel {
    use std::f64::consts::PI;
    StructuralParallel {
        unicellular_exponent_offset: -2.0,
        unicellular_log_constant: -(2.0 * 2.0f64.sqrt() * PI).ln(),
        triangulation_exponent_offset: -2.5,
        triangulation_log_constant: -(4.0 * (3.0 * PI).powf(1.5)).ln(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{build_triangulation_table, default_triangulation_seeds};
    use crate::parametric::triangulation_functions;
    use once_cell::sync::Lazy;
    use std::collections::BTreeMap;

    static TAU_160: Lazy<ExactTriangle> =
        Lazy::new(|| build_triangulation_table(160, &default_triangulation_seeds()).unwrap());

    #[test]
    fn prefactor_constant_fixed() {
        use std::f64::consts::PI;
        let (n, g) = (100i64, 25i64);
        let pt = triangulation_functions(0.25, 1e-11).unwrap();
        let want = -(4.0 * (3.0 * PI).powf(1.5)).ln()
            + (2.0 * 25.0 - 2.5) * 100.0f64.ln()
            + 100.0 * pt.f_tri
            + pt.j_tri.ln();
        let got = log_omega_triangulation(n, g).unwrap();
        assert!((got - want).abs() < 1e-10);
    }

    #[test]
    fn j_tri_finite_positive_at_quarter() {
        let pt = triangulation_functions(0.25, 1e-11).unwrap();
        assert!(pt.j_tri.is_finite() && pt.j_tri > 0.0);
    }

    #[test]
    fn ratio_trend_ray_quarter() {
        let rep = conjecture_ratio_trend(&TAU_160, 1, 4, 1000).unwrap();
        assert!(rep.tail_monotone, "{:?}", rep.points.last());
        assert!(rep.final_gap < 0.10, "final gap {}", rep.final_gap);
        let last = rep.points.last().unwrap();
        assert_eq!((last.0, last.1), (160, 40));
        assert!((last.2 - 0.9667).abs() < 5e-3, "frozen ratio moved: {}", last.2);
    }

    #[test]
    fn ratio_trend_ray_third() {
        let rep = conjecture_ratio_trend(&TAU_160, 1, 3, 1000).unwrap();
        assert!(rep.tail_monotone);
        assert!(rep.final_gap < 0.10, "final gap {}", rep.final_gap);
        let last = rep.points.last().unwrap();
        assert!((last.2 - 0.9510).abs() < 5e-3, "frozen ratio moved: {}", last.2);
    }

    #[test]
    fn degenerate_ray_refused() {
        assert!(conjecture_ratio_trend(&TAU_160, 1, 90, 1000).is_err());
        assert!(conjecture_ratio_trend(&TAU_160, 1, 2, 1000).is_err());
    }

    #[test]
    fn unvalidated_seeds_refused() {
        let mut seeds = BTreeMap::new();
        seeds.insert((0usize, 0usize), num_bigint::BigInt::from(0));
        let zero_seed = build_triangulation_table(1, &seeds).unwrap();
        let err = conjecture_ratio_trend(&zero_seed, 1, 4, 10).unwrap_err();
        assert!(err.to_string().contains("unvalidated"));
    }

    #[test]
    fn structural_parallel_shape() {
        let s = structural_parallel();
        assert!((s.unicellular_exponent_offset - s.triangulation_exponent_offset - 0.5).abs() < 1e-15);
        assert!(s.unicellular_log_constant < 0.0 && s.triangulation_log_constant < 0.0);
    }
}
