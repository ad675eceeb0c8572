//! Gamma-function machinery: real `ln Γ`, real `Γ` (negative arguments via
//! reflection), complex `Γ` and the digamma function.
//!
//! Everything is based on a Lanczos approximation with g = 7 and 9
//! coefficients (the classical GSL/Wikipedia parameter set), which is
//! accurate to roughly machine precision for moderate arguments and keeps
//! full relative accuracy in log form for large ones.

use num_complex::Complex64;
use std::f64::consts::PI;

const LANCZOS_P: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Natural log of Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires a positive argument, got {x}");
    if x < 0.5 {
        // Reflection: Γ(x)Γ(1-x) = π / sin(πx); both factors positive here.
        (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)
    } else {
        let z = x - 1.0;
        let mut t = LANCZOS_P[0];
        for (i, p) in LANCZOS_P.iter().enumerate().skip(1) {
            t += p / (z + i as f64);
        }
        let w = z + 7.5;
        0.5 * (2.0 * PI).ln() + (z + 0.5) * w.ln() - w + t.ln()
    }
}

/// Γ(x) for real x, any sign (poles at non-positive integers return ±∞/NaN).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        PI / ((PI * x).sin() * gamma(1.0 - x))
    } else {
        let z = x - 1.0;
        let mut t = LANCZOS_P[0];
        for (i, p) in LANCZOS_P.iter().enumerate().skip(1) {
            t += p / (z + i as f64);
        }
        let w = z + 7.5;
        (2.0 * PI).sqrt() * w.powf(z + 0.5) * (-w).exp() * t
    }
}

/// Γ(z) for complex z (poles at non-positive integers).
pub fn complex_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let pi = Complex64::new(PI, 0.0);
        pi / ((pi * z).sin() * complex_gamma(Complex64::new(1.0, 0.0) - z))
    } else {
        let z = z - Complex64::new(1.0, 0.0);
        let mut t = Complex64::new(LANCZOS_P[0], 0.0);
        for (i, p) in LANCZOS_P.iter().enumerate().skip(1) {
            t += Complex64::new(*p, 0.0) / (z + Complex64::new(i as f64, 0.0));
        }
        let w = z + Complex64::new(7.5, 0.0);
        Complex64::new((2.0 * PI).sqrt(), 0.0)
            * w.powc(z + Complex64::new(0.5, 0.0))
            * (-w).exp()
            * t
    }
}

/// Digamma ψ(x) for x > 0 (recurrence up to x ≥ 12, then the asymptotic
/// series with Bernoulli terms through x⁻¹²).
pub fn digamma(x: f64) -> f64 {
    assert!(x > 0.0, "digamma requires a positive argument, got {x}");
    let mut x = x;
    let mut acc = 0.0;
    while x < 12.0 {
        acc -= 1.0 / x;
        x += 1.0;
    }
    let inv2 = 1.0 / (x * x);
    // ψ(x) ~ ln x − 1/(2x) − Σ B_{2k}/(2k x^{2k})
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    acc + x.ln() - 0.5 / x - tail
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_small_integers_and_halves() {
        assert!((gamma(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        // Γ(5/2) = 3√π/4
        let exact = 3.0 * PI.sqrt() / 4.0;
        assert!((gamma(2.5) - exact).abs() / exact < 1e-14);
    }

    #[test]
    fn ln_gamma_matches_factorials() {
        // ln Γ(10) = ln 9!
        let exact = (362880.0f64).ln();
        assert!((ln_gamma(10.0) - exact).abs() < 1e-12);
        // large argument: ln Γ(1001) = Σ ln k
        let exact: f64 = (1..=1000u32).map(|k| (k as f64).ln()).sum();
        assert!((ln_gamma(1001.0) - exact).abs() < 1e-9 * exact.abs());
    }

    #[test]
    fn gamma_reflection_negative_argument() {
        // Γ(-1/2) = -2√π
        let exact = -2.0 * PI.sqrt();
        assert!((gamma(-0.5) - exact).abs() / exact.abs() < 1e-13);
    }

    #[test]
    fn complex_gamma_reflection_identity() {
        // |Γ(1+i)|² = π / sinh(π)
        let g = complex_gamma(Complex64::new(1.0, 1.0));
        let exact = PI / PI.sinh();
        assert!((g.norm_sqr() - exact).abs() / exact < 1e-12);
        // real axis agreement
        let gr = complex_gamma(Complex64::new(4.5, 0.0));
        assert!((gr.re - gamma(4.5)).abs() / gamma(4.5) < 1e-13);
        assert!(gr.im.abs() < 1e-12);
    }

    #[test]
    fn digamma_known_values() {
        // ψ(1) = -γ
        assert!((digamma(1.0) + 0.5772156649015329).abs() < 1e-12);
        // ψ(2) = 1 - γ
        assert!((digamma(2.0) - (1.0 - 0.5772156649015329)).abs() < 1e-12);
        // ψ(1/2) = -γ - 2 ln 2
        let exact = -0.5772156649015329 - 2.0 * (2.0f64).ln();
        assert!((digamma(0.5) - exact).abs() < 1e-12);
    }
}
