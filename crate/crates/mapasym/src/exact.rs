//! Exact arbitrary-precision tables for the two map-enumeration recurrences,
//! plus the closed-form integer ground truths (double factorials, Catalan
//! numbers) and the exact-rational series oracle used to cross-validate the
//! unicellular table.

use crate::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;

/// Which recurrence a table holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleKind {
    /// E(n,g): unicellular maps with n edges and genus g.
    Unicellular,
    /// τ(n,g): triangulations of genus g with 2n faces.
    Triangulation,
}

/// Triangular table of exact non-negative integers indexed by (n, g).
///
/// Out-of-range reads return exact zero, mirroring the boundary convention
/// of the recurrences (values vanish for g < 0 and, for unicellular maps,
/// for n < 2g).
#[derive(Debug, Clone)]
pub struct ExactTriangle {
    pub kind: TriangleKind,
    pub n_max: usize,
    rows: Vec<Vec<BigInt>>,
}

impl ExactTriangle {
    /// Borrow the stored value if (n, g) is in range and non-zero-by-convention.
    pub fn get(&self, n: i64, g: i64) -> Option<&BigInt> {
        if n < 0 || g < 0 || n as usize > self.n_max {
            return None;
        }
        self.rows.get(n as usize).and_then(|r| r.get(g as usize))
    }

    /// Value with the zero-extension convention.
    pub fn value(&self, n: i64, g: i64) -> BigInt {
        self.get(n, g).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Natural log of the entry; −∞ for zero entries.
    pub fn ln_value(&self, n: i64, g: i64) -> f64 {
        match self.get(n, g) {
            Some(v) => big_ln(v),
            None => f64::NEG_INFINITY,
        }
    }

    /// Entries of row n (g = 0, 1, …).
    pub fn row(&self, n: usize) -> &[BigInt] {
        &self.rows[n]
    }

    /// Genus range stored for row n.
    pub fn genus_bound(&self, n: usize) -> usize {
        self.rows[n].len().saturating_sub(1)
    }
}

/// ln of a positive big integer, accurate to ~1 ulp of f64 in absolute terms.
pub fn big_ln(x: &BigInt) -> f64 {
    assert!(x.is_positive(), "big_ln requires a positive integer");
    let bits = x.bits();
    if bits <= 53 {
        x.to_f64().expect("fits in f64").ln()
    } else {
        let shift = bits - 53;
        let top = (x >> shift).to_f64().expect("53-bit mantissa fits");
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// n!! (product n(n−2)(n−4)…); 0!! = (−1)!! = 1.
pub fn double_factorial(n: i64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

/// (2n−1)!!, the number of perfect matchings of a 2n-gon.
pub fn odd_double_factorial(n: i64) -> BigInt {
    double_factorial(2 * n - 1)
}

/// n! as a big integer.
pub fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// Binomial coefficient via the multiplicative loop (exact at every step).
pub fn binom(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut res = BigInt::one();
    for i in 0..k {
        res = res * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    res
}

/// Catalan number C(2n, n)/(n+1).
pub fn catalan(n: u64) -> BigInt {
    binom(2 * n, n) / BigInt::from(n + 1)
}

fn unicellular_row(n: usize, prev: &[BigInt], prev2: &[BigInt]) -> Result<Vec<BigInt>> {
    let nn = n as i64;
    let w1 = BigInt::from(2 * (2 * nn - 1));
    let w2 = BigInt::from((nn - 1) * (2 * nn - 1) * (2 * nn - 3));
    let div = BigInt::from(nn + 1);
    let gmax = n / 2;
    let mut row = Vec::with_capacity(gmax + 1);
    for g in 0..=gmax {
        let mut num = BigInt::zero();
        if let Some(v) = prev.get(g) {
            num += &w1 * v;
        }
        if g >= 1 {
            if let Some(v) = prev2.get(g - 1) {
                num += &w2 * v;
            }
        }
        let (q, r) = num.div_rem(&div);
        if !r.is_zero() {
            return Err(Error::NonExactDivision {
                kind: "unicellular",
                n: nn,
                g: g as i64,
            });
        }
        row.push(q);
    }
    Ok(row)
}

/// Build the full unicellular table E(n,g) for 0 ≤ n ≤ n_max, 0 ≤ g ≤ ⌊n/2⌋.
pub fn build_unicellular_table(n_max: usize) -> Result<ExactTriangle> {
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max + 1);
    rows.push(vec![BigInt::one()]); // E(0,0) = 1
    for n in 1..=n_max {
        let empty: Vec<BigInt> = Vec::new();
        let prev2 = if n >= 2 { &rows[n - 2] } else { &empty };
        let row = unicellular_row(n, &rows[n - 1], prev2)?;
        rows.push(row);
    }
    Ok(ExactTriangle {
        kind: TriangleKind::Unicellular,
        n_max,
        rows,
    })
}

/// Streaming scan of the unicellular rows: `visit(n, row_n)` is called for
/// every n ≤ n_max while only two previous rows are kept in memory. Used for
/// desk-scale n beyond what a full table should occupy.
pub fn unicellular_scan(n_max: usize, mut visit: impl FnMut(usize, &[BigInt])) -> Result<()> {
    let mut prev2: Vec<BigInt> = Vec::new();
    let mut prev: Vec<BigInt> = vec![BigInt::one()];
    visit(0, &prev);
    for n in 1..=n_max {
        let row = unicellular_row(n, &prev, &prev2)?;
        visit(n, &row);
        prev2 = std::mem::replace(&mut prev, row);
    }
    Ok(())
}

/// Default boundary seeds for the triangulation recurrence.
///
/// The recurrence does not determine τ(0,0); the shipped default τ(0,0)=1 is
/// the unique small seed that keeps every division by (n+1) exact up to
/// n = 50 *and* reproduces the published counts of rooted cubic maps
/// (τ(1,0)=4, τ(2,0)=32, τ(3,0)=336). It remains a configurable parameter.
pub fn default_triangulation_seeds() -> BTreeMap<(usize, usize), BigInt> {
    let mut seeds = BTreeMap::new();
    seeds.insert((0usize, 0usize), BigInt::one());
    seeds
}

/// Build the triangulation table τ(n,g) for 0 ≤ n ≤ n_max.
///
///// For each (n, g) not overridden by `seeds`:
///   (n+1) τ(n,g) = 4n(3n−2)(3n−4) τ(n−2,g−1) + 4(3n−1) τ(n−1,g)
///                + 4 Σ_{i+j=n−2} Σ_{g₁+g₂=g} (3i+2)(3j+2) τ(i,g₁) τ(j,g₂)
///                + 2·1_{n=g=1},
/// with τ(n,g)=0 for n<0 or g<0. Non-exact division reports the offending
/// (n,g) as evidence of incorrect seeds.
pub fn build_triangulation_table(
    n_max: usize,
    seeds: &BTreeMap<(usize, usize), BigInt>,
) -> Result<ExactTriangle> {
    // Genus support: Euler's relation for triangulations with 2n faces gives
    // v = n + 2 − 2g ≥ 1, plus the exceptional τ(1,1); store g ≤ ⌈(n+1)/2⌉.
    let gcap = |n: usize| (n + 1).div_ceil(2);
    let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max {
        let nn = n as i64;
        let w_bi = BigInt::from(4 * nn * (3 * nn - 2) * (3 * nn - 4));
        let w_lin = BigInt::from(4 * (3 * nn - 1));
        let div = BigInt::from(nn + 1);
        let mut row = Vec::with_capacity(gcap(n) + 1);
        for g in 0..=gcap(n) {
            if let Some(seed) = seeds.get(&(n, g)) {
                row.push(seed.clone());
                continue;
            }
            let mut num = BigInt::zero();
            if n >= 2 && g >= 1 {
                if let Some(v) = rows[n - 2].get(g - 1) {
                    num += &w_bi * v;
                }
            }
            if n >= 1 {
                if let Some(v) = rows[n - 1].get(g) {
                    num += &w_lin * v;
                }
            }
            if n >= 2 {
                let mut conv = BigInt::zero();
                for i in 0..=(n - 2) {
                    let j = n - 2 - i;
                    let c = BigInt::from((3 * i as i64 + 2) * (3 * j as i64 + 2));
                    let mut pair = BigInt::zero();
                    for g1 in 0..=g {
                        let g2 = g - g1;
                        if let (Some(a), Some(b)) = (rows[i].get(g1), rows[j].get(g2)) {
                            if !a.is_zero() && !b.is_zero() {
                                pair += a * b;
                            }
                        }
                    }
                    conv += c * pair;
                }
                num += 4 * conv;
            }
            if n == 1 && g == 1 {
                num += 2;
            }
            let (q, r) = num.div_rem(&div);
            if !r.is_zero() {
                return Err(Error::NonExactDivision {
                    kind: "triangulation",
                    n: nn,
                    g: g as i64,
                });
            }
            row.push(q);
        }
        rows.push(row);
    }
    Ok(ExactTriangle {
        kind: TriangleKind::Triangulation,
        n_max,
        rows,
    })
}

/// Exact-rational expansion of ((1+y)/(1−y))^x = exp(2x·atanh y).
///
/// `coeffs[k][m]` is the coefficient of x^m in the polynomial multiplying
/// y^k. Built from the exponential series (independently of the recurrence),
/// so agreement with `build_unicellular_table` is a genuine cross-check.
#[derive(Debug, Clone)]
pub struct SeriesOracle {
    pub y_order: usize,
    coeffs: Vec<Vec<BigRational>>,
}

fn poly_mul_trunc(a: &[BigRational], b: &[BigRational], order: usize) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); order + 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() || i > order {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j > order {
                break;
            }
            if !bj.is_zero() {
                out[i + j] += ai * bj;
            }
        }
    }
    out
}

impl SeriesOracle {
    /// Expand up to (and including) y^y_order.
    pub fn build(y_order: usize) -> Self {
        assert!(y_order >= 1);
        // A(y) = atanh(y) = Σ_{j odd} y^j / j, truncated.
        let mut a = vec![BigRational::zero(); y_order + 1];
        let mut j = 1usize;
        while j <= y_order {
            a[j] = BigRational::new(BigInt::one(), BigInt::from(j as i64));
            j += 2;
        }
        // E(x,y) = Σ_m (2x)^m A(y)^m / m!; A^m starts at y^m so m ≤ y_order.
        let mut coeffs: Vec<Vec<BigRational>> = vec![Vec::new(); y_order + 1];
        coeffs[0].push(BigRational::one()); // m = 0 term
        let mut pow_a = a.clone(); // A^m for current m
        let mut fact = BigInt::one();
        let mut two_m = BigInt::from(2);
        for m in 1..=y_order {
            // scale = 2^m / m!
            let scale = BigRational::new(two_m.clone(), fact.clone() * BigInt::from(m as i64));
            // keep factorial in sync: fact currently (m-1)!, updated below
            for (k, c) in pow_a.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let col = &mut coeffs[k];
                if col.len() < m + 1 {
                    col.resize(m + 1, BigRational::zero());
                }
                col[m] += c * &scale;
            }
            if m < y_order {
                pow_a = poly_mul_trunc(&pow_a, &a, y_order);
                fact *= BigInt::from(m as i64);
                two_m *= 2;
            }
        }
        SeriesOracle { y_order, coeffs }
    }

    /// Coefficient polynomial (in x) of y^k.
    pub fn coeff_poly(&self, k: usize) -> &[BigRational] {
        &self.coeffs[k]
    }

    /// Extract E(n, g) via E(n,g) = (2n−1)!!/2 · [x^{n−2g+1} y^{n+1}].
    pub fn extract(&self, n: usize, g: usize) -> Result<BigInt> {
        if n + 1 > self.y_order {
            return Err(Error::Domain(format!(
                "series oracle of order {} cannot reach n = {n}",
                self.y_order
            )));
        }
        let m = n as i64 - 2 * g as i64 + 1;
        if m < 1 {
            return Ok(BigInt::zero());
        }
        let poly = &self.coeffs[n + 1];
        let coeff = poly
            .get(m as usize)
            .cloned()
            .unwrap_or_else(BigRational::zero);
        let val = coeff * BigRational::from_integer(odd_double_factorial(n as i64))
            / BigRational::from_integer(BigInt::from(2));
        if !val.is_integer() {
            return Err(Error::Domain(format!(
                "series extraction of E({n},{g}) is not an integer"
            )));
        }
        Ok(val.to_integer())
    }

    /// Check the differential relation (1−y²) ∂E/∂y = 2x E coefficient-wise:
    /// (k+1)c_{k+1} − (k−1)c_{k−1} = 2x·c_k for all k+1 ≤ y_order.
    /// Returns true when every residual polynomial is exactly zero.
    pub fn ode_holds(&self) -> bool {
        for k in 0..self.y_order {
            // lhs = (k+1) c_{k+1} - (k-1) c_{k-1}
            let mut lhs = vec![BigRational::zero(); self.y_order + 2];
            for (m, c) in self.coeffs[k + 1].iter().enumerate() {
                lhs[m] += c * BigRational::from_integer(BigInt::from(k as i64 + 1));
            }
            if k >= 1 {
                for (m, c) in self.coeffs[k - 1].iter().enumerate() {
                    lhs[m] -= c * BigRational::from_integer(BigInt::from(k as i64 - 1));
                }
            }
            // rhs = 2x c_k: coefficient of x^m is 2 c_k[m-1]
            for (m, c) in self.coeffs[k].iter().enumerate() {
                lhs[m + 1] -= c * BigRational::from_integer(BigInt::from(2));
            }
            if lhs.iter().any(|c| !c.is_zero()) {
                return false;
            }
        }
        true
    }

    /// Numeric evaluation of [y^k]((1+y)/(1−y))^x for a real exponent x,
    /// via the stable forward recurrence c_{k+1} = ((k−1)c_{k−1} + 2x c_k)/(k+1).
    pub fn eval_coeff_f64(k: usize, x: f64) -> f64 {
        let mut c_prev = 1.0f64; // c_0
        let mut c_cur = 2.0 * x; // c_1
        if k == 0 {
            return c_prev;
        }
        for kk in 1..k {
            let next = ((kk as f64 - 1.0) * c_prev + 2.0 * x * c_cur) / (kk as f64 + 1.0);
            c_prev = c_cur;
            c_cur = next;
        }
        c_cur
    }
}

/// Convenience wrapper matching the module-level operation name.
pub fn series_oracle(y_order: usize) -> SeriesOracle {
    SeriesOracle::build(y_order)
}
