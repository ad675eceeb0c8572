//! Recurrence-as-random-walk verification framework.
//!
//! A linear bivariate recurrence with non-negative step set 𝒮 and positive
//! weights P_{i,j}(n) is modelled as a walk on (n, g) that moves from (n, g)
//! to (n−i, g−j) with probability proportional to
//! α_{i,j}(n, g) = P_{i,j}(n)·Ω(n−i, g−j)/Ω(n, g). If the guessed Ω is right,
//! Σ α_{i,j} ≈ 1 on the inner region (Condition 1), Q = E/Ω tends to 1 on the
//! good boundary and stays bounded on the bad one (Condition 2), the
//! Ω-quotient s(n, g) is positive near the boundaries (Condition 3) and
//! vanishes along the start sequence (Condition 4). The conserved-quantity
//! sandwich then pins Q at the start between boundary expectations up to the
//! cumulative error products r±.
//!
//! Instantiated here for the unicellular (Harer–Zagier-type) recurrence in
//! both the large-v and small-v regimes.

use crate::exact::ExactTriangle;
use crate::omega::{log_omega, q_ratio, OmegaModel};
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Which side of the genus axis the good boundary sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Orientation {
    /// Good boundary below (g decreasing is good), as in the large-v regime.
    CMinus,
    /// Good boundary above (g increasing is good), as in the small-v regime.
    CPlus,
}

/// Classification of a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Region {
    Inner,
    Good,
    Bad,
}

/// A recurrence-as-walk description: step set, weights, Ω model, boundaries.
pub struct WalkSpec {
    pub name: &'static str,
    /// Displacements (i, j): a step moves (n, g) → (n−i, g−j).
    pub steps: Vec<(i64, i64)>,
    pub omega: OmegaModel,
    pub orientation: Orientation,
    weight: Box<dyn Fn((i64, i64), i64) -> f64 + Send + Sync>,
    good_g: Box<dyn Fn(i64) -> f64 + Send + Sync>,
    bad_g: Box<dyn Fn(i64) -> f64 + Send + Sync>,
}

impl WalkSpec {
    /// Recurrence weight P_{i,j}(n) for one step.
    pub fn step_weight(&self, step: (i64, i64), n: i64) -> f64 {
        (self.weight)(step, n)
    }

    /// Good/inner/bad classification (good takes precedence, the sets are
    /// disjoint for every n where the inner region is non-empty).
    pub fn classify(&self, n: i64, g: i64) -> Region {
        let gf = g as f64;
        match self.orientation {
            Orientation::CMinus => {
                if gf <= (self.good_g)(n) {
                    Region::Good
                } else if gf >= (self.bad_g)(n) {
                    Region::Bad
                } else {
                    Region::Inner
                }
            }
            Orientation::CPlus => {
                if gf >= (self.good_g)(n) {
                    Region::Good
                } else if gf <= (self.bad_g)(n) {
                    Region::Bad
                } else {
                    Region::Inner
                }
            }
        }
    }

    /// The genus of the bad boundary line at this n.
    pub fn bad_genus(&self, n: i64) -> i64 {
        match self.orientation {
            Orientation::CMinus => (self.bad_g)(n).ceil() as i64,
            Orientation::CPlus => (self.bad_g)(n).floor() as i64,
        }
    }

    /// The genus of the good boundary line at this n (when integral).
    pub fn good_genus(&self, n: i64) -> Option<i64> {
        let t = (self.good_g)(n);
        match self.orientation {
            Orientation::CMinus => Some(t.floor() as i64),
            Orientation::CPlus => {
                let g = t.ceil() as i64;
                (2 * g >= n).then_some(g)
            }
        }
    }
}

/// Harer–Zagier walk in the large-v regime: steps {(1,0), (2,1)} with weights
/// 2(2n−1)/(n+1) and (n−1)(2n−1)(2n−3)/(n+1), good(n) = 0,
/// bad(n) = ⌈(n−1)/2⌉, orientation C−.
pub fn hz_large_v_spec() -> WalkSpec {
    WalkSpec {
        name: "hz_large_v",
        steps: vec![(1, 0), (2, 1)],
        omega: OmegaModel::LargeV,
        orientation: Orientation::CMinus,
        weight: Box::new(hz_weight),
        good_g: Box::new(|_n| 0.0),
        bad_g: Box::new(|n| ((n - 1) as f64 / 2.0).ceil()),
    }
}

/// Harer–Zagier walk in the small-v regime: same steps and weights,
/// good(n) = n/2, bad(n) = ⌈(n − log^{4/3} n)/2⌉, orientation C+.
pub fn hz_small_v_spec() -> WalkSpec {
    WalkSpec {
        name: "hz_small_v",
        steps: vec![(1, 0), (2, 1)],
        omega: OmegaModel::SmallV,
        orientation: Orientation::CPlus,
        weight: Box::new(hz_weight),
        good_g: Box::new(|n| n as f64 / 2.0),
        bad_g: Box::new(|n| {
            let nf = n as f64;
            ((nf - nf.ln().powf(4.0 / 3.0)) / 2.0).ceil()
        }),
    }
}

fn hz_weight(step: (i64, i64), n: i64) -> f64 {
    let nf = n as f64;
    match step {
        (1, 0) => 2.0 * (2.0 * nf - 1.0) / (nf + 1.0),
        (2, 1) => (nf - 1.0) * (2.0 * nf - 1.0) * (2.0 * nf - 3.0) / (nf + 1.0),
        _ => panic!("unknown Harer–Zagier step {step:?}"),
    }
}

/// α_{i,j}(n, g) for every step, computed in log space then exponentiated.
pub fn alpha_weights(spec: &WalkSpec, n: i64, g: i64) -> Result<Vec<((i64, i64), f64)>> {
    if spec.classify(n, g) != Region::Inner {
        return Err(Error::Domain(format!(
            "alpha_weights requires an inner state, ({n}, {g}) is {:?}",
            spec.classify(n, g)
        )));
    }
    let log_here = log_omega(spec.omega, n, g)?;
    spec.steps
        .iter()
        .map(|&(i, j)| {
            let lo = log_omega(spec.omega, n - i, g - j)?;
            Ok(((i, j), spec.step_weight((i, j), n) * (lo - log_here).exp()))
        })
        .collect()
}

/// Ω-quotient s(n, g): the genus-adjacent Ω ratio in the good direction
/// (Ω(n, g−1)/Ω(n, g) for C−, Ω(n, g+1)/Ω(n, g) for C+).
pub fn s_ratio(spec: &WalkSpec, n: i64, g: i64) -> Result<f64> {
    let towards = match spec.orientation {
        Orientation::CMinus => g - 1,
        Orientation::CPlus => g + 1,
    };
    let here = log_omega(spec.omega, n, g)?;
    // Past the support of the model (e.g. v = n − 2g going negative) Ω
    // vanishes through a reciprocal-gamma pole, so s = 0 there.
    match log_omega(spec.omega, n, towards) {
        Ok(t) => Ok((t - here).exp()),
        Err(_) => Ok(0.0),
    }
}

/// Per-level Condition-1 residual: D(m) = max |Σα − 1| · m·log²m over states
/// on the level line {n − g = m}.
#[derive(Debug, Clone, serde::Serialize)]
pub struct LevelResidual {
    pub m: i64,
    pub max_abs: f64,
    pub weighted: f64,
}

/// Condition-1 report over a grid.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ConditionReport {
    pub per_level: Vec<LevelResidual>,
    /// (window start, sup of weighted residual) over dyadic windows of m.
    pub dyadic_sup: Vec<(i64, f64)>,
    /// Whether the dyadic sups are non-increasing beyond the burn-in window.
    pub nonincreasing_after_burnin: bool,
    pub burn_in_windows: usize,
}

/// Check Σ α_{i,j}(n,g) = 1 + O(1/(m log²m)) with m = n − g over a grid of
/// inner states; diagnostic only (the implied constant is not asserted).
pub fn check_condition_probabilities(
    spec: &WalkSpec,
    grid: &[(i64, i64)],
) -> Result<ConditionReport> {
    let mut by_level: HashMap<i64, f64> = HashMap::new();
    for &(n, g) in grid {
        if spec.classify(n, g) != Region::Inner {
            continue;
        }
        let total: f64 = alpha_weights(spec, n, g)?.iter().map(|(_, a)| a).sum();
        let m = n - g;
        let e = by_level.entry(m).or_insert(0.0);
        *e = e.max((total - 1.0).abs());
    }
    let mut per_level: Vec<LevelResidual> = by_level
        .into_iter()
        .map(|(m, max_abs)| {
            let mf = m as f64;
            LevelResidual {
                m,
                max_abs,
                weighted: max_abs * mf * mf.ln().powi(2),
            }
        })
        .collect();
    per_level.sort_by_key(|r| r.m);
    // dyadic windows [2^k, 2^{k+1})
    let mut dyadic: HashMap<i64, f64> = HashMap::new();
    for r in &per_level {
        let w = 1i64 << (63 - r.m.leading_zeros() as i64).max(0);
        let e = dyadic.entry(w).or_insert(0.0);
        *e = e.max(r.weighted);
    }
    let mut dyadic_sup: Vec<(i64, f64)> = dyadic.into_iter().collect();
    dyadic_sup.sort_by_key(|&(w, _)| w);
    let burn_in_windows = 2usize.min(dyadic_sup.len());
    let nonincreasing_after_burnin = dyadic_sup
        .iter()
        .skip(burn_in_windows)
        .zip(dyadic_sup.iter().skip(burn_in_windows + 1))
        .all(|(a, b)| b.1 <= a.1 * 1.0001);
    Ok(ConditionReport {
        per_level,
        dyadic_sup,
        nonincreasing_after_burnin,
        burn_in_windows,
    })
}

/// Condition-2 report: Q on both boundaries with trend diagnostics.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BoundaryReport {
    pub good: Vec<(i64, f64)>,
    pub bad: Vec<(i64, f64)>,
    /// |Q − 1| non-increasing over the second half of the good sequence.
    pub good_tail_monotone: bool,
    pub bad_max: f64,
    /// Q non-increasing over the second half of the bad sequence.
    pub bad_tail_decreasing: bool,
}

/// Evaluate Q on the good and bad boundary lines for the given n values
/// (entries whose boundary genus is not realisable are skipped).
pub fn check_boundary_values(
    spec: &WalkSpec,
    table: &ExactTriangle,
    ns: &[i64],
) -> Result<BoundaryReport> {
    let mut good = Vec::new();
    let mut bad = Vec::new();
    for &n in ns {
        if n as usize > table.n_max {
            return Err(Error::Domain(format!(
                "boundary check at n={n} exceeds table n_max={}",
                table.n_max
            )));
        }
        if let Some(g) = spec.good_genus(n) {
            // Genus-0 large-v and diagonal small-v have Ω in-domain.
            if let Ok(q) = q_ratio(table, spec.omega, n, g) {
                good.push((n, q));
            }
        }
        let gb = spec.bad_genus(n);
        if let Ok(q) = q_ratio(table, spec.omega, n, gb) {
            bad.push((n, q));
        }
    }
    let tail = |v: &[(i64, f64)]| v.len() / 2;
    let good_tail_monotone = good
        .iter()
        .skip(tail(&good))
        .zip(good.iter().skip(tail(&good) + 1))
        .all(|(a, b)| (b.1 - 1.0).abs() <= (a.1 - 1.0).abs() * 1.0001);
    let bad_max = bad.iter().map(|&(_, q)| q).fold(0.0f64, f64::max);
    let bad_tail_decreasing = bad
        .iter()
        .skip(tail(&bad))
        .zip(bad.iter().skip(tail(&bad) + 1))
        .all(|(a, b)| b.1 <= a.1 * 1.0001);
    Ok(BoundaryReport {
        good,
        bad,
        good_tail_monotone,
        bad_max,
        bad_tail_decreasing,
    })
}

/// Condition-3 report: s on the states one step away from each boundary.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ShiftedBoundaryReport {
    pub min_s_good_shift: f64,
    pub min_s_bad_shift: f64,
    pub states_checked: usize,
}

/// Scan inner states adjacent (via the step set) to each boundary and report
/// the minima of s there: positivity near good, a uniform lower bound c > 0
/// near bad.
pub fn check_s_bounds(spec: &WalkSpec, ns: &[i64]) -> Result<ShiftedBoundaryReport> {
    let mut min_good = f64::INFINITY;
    let mut min_bad = f64::INFINITY;
    let mut count = 0usize;
    for &n in ns {
        for g in 0..=n / 2 {
            if spec.classify(n, g) != Region::Inner {
                continue;
            }
            let mut near_good = false;
            let mut near_bad = false;
            for &(i, j) in &spec.steps {
                match spec.classify(n - i, g - j) {
                    Region::Good => near_good = true,
                    Region::Bad => near_bad = true,
                    Region::Inner => {}
                }
            }
            if near_good || near_bad {
                let s = s_ratio(spec, n, g)?;
                count += 1;
                if near_good {
                    min_good = min_good.min(s);
                }
                if near_bad {
                    min_bad = min_bad.min(s);
                }
            }
        }
    }
    Ok(ShiftedBoundaryReport {
        min_s_good_shift: min_good,
        min_s_bad_shift: min_bad,
        states_checked: count,
    })
}

/// Cumulative multiplicative error products r±(k) = ∏_{j>k} extremes of Σα,
/// truncated at the grid maximum, with a tail estimate from the Condition-1
/// residual bound reported separately.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ErrorProducts {
    pub k_min: i64,
    pub k_max: i64,
    r_minus: Vec<f64>,
    r_plus: Vec<f64>,
    /// Empirical constant C in |Σα − 1| ≤ C/(m log²m) over the grid.
    pub residual_constant: f64,
    /// Estimated multiplicative tail beyond k_max: exp(±C/log k_max).
    pub tail_factor: f64,
}

impl ErrorProducts {
    pub fn r_minus_at(&self, k: i64) -> f64 {
        if k >= self.k_max {
            return 1.0;
        }
        self.r_minus[(k.max(self.k_min) - self.k_min) as usize]
    }
    pub fn r_plus_at(&self, k: i64) -> f64 {
        if k >= self.k_max {
            return 1.0;
        }
        self.r_plus[(k.max(self.k_min) - self.k_min) as usize]
    }
}

/// Build the error products over levels m = n − g in [k_min, k_max], taking
/// extremes of Σα over all inner states on each level with n ≤ n_cap.
pub fn error_products(spec: &WalkSpec, k_max: i64, n_cap: i64) -> Result<ErrorProducts> {
    let k_min = 2i64;
    assert!(k_max >= k_min);
    let mut sup = vec![1.0f64; (k_max - k_min + 1) as usize];
    let mut inf = vec![1.0f64; (k_max - k_min + 1) as usize];
    let mut residual_constant = 0.0f64;
    for m in (k_min + 1)..=k_max {
        let mut hi = f64::NEG_INFINITY;
        let mut lo = f64::INFINITY;
        let mut any = false;
        for g in 1..=n_cap {
            let n = m + g;
            if n > n_cap || 2 * g > n {
                break;
            }
            if spec.classify(n, g) != Region::Inner {
                continue;
            }
            let total: f64 = alpha_weights(spec, n, g)?.iter().map(|(_, a)| a).sum();
            hi = hi.max(total);
            lo = lo.min(total);
            any = true;
        }
        if any {
            let idx = (m - k_min) as usize;
            sup[idx] = hi;
            inf[idx] = lo;
            let mf = m as f64;
            residual_constant = residual_constant
                .max((hi - 1.0).abs() * mf * mf.ln().powi(2))
                .max((lo - 1.0).abs() * mf * mf.ln().powi(2));
        }
    }
    // r(k) = ∏_{j=k+1}^{k_max} clamp(extreme_j); r(k_max) = 1.
    let len = (k_max - k_min + 1) as usize;
    let mut r_minus = vec![1.0f64; len];
    let mut r_plus = vec![1.0f64; len];
    for k in (k_min..k_max).rev() {
        let idx = (k - k_min) as usize;
        let jdx = (k + 1 - k_min) as usize;
        r_minus[idx] = r_minus[idx + 1] * inf[jdx].min(1.0);
        r_plus[idx] = r_plus[idx + 1] * sup[jdx].max(1.0);
    }
    let tail_factor = (residual_constant / (k_max as f64).ln()).exp();
    Ok(ErrorProducts {
        k_min,
        k_max,
        r_minus,
        r_plus,
        residual_constant,
        tail_factor,
    })
}

/// Mean ± standard error.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

fn estimate(samples_sum: f64, samples_sq: f64, n: usize) -> Estimate {
    let nf = n as f64;
    let mean = samples_sum / nf;
    let var = (samples_sq / nf - mean * mean).max(0.0);
    Estimate {
        mean,
        stderr: (var / nf).sqrt(),
    }
}

/// Monte Carlo estimates from the stopped walk.
#[derive(Debug, Clone, serde::Serialize)]
pub struct WalkRunStats {
    pub runs: usize,
    pub start: (i64, i64),
    pub seed: u64,
    pub l_deep: i64,
    pub q0: f64,
    pub p_good: Estimate,
    pub p_good_and_deep: Estimate,
    pub mean_q_tau: Estimate,
    /// E[r⁻(M_τ)/r⁻(M₀)·Q_τ] — sandwich lower side.
    pub mean_rq_minus: Estimate,
    /// E[r⁺(M_τ)/r⁺(M₀)·Q_τ] — sandwich upper side.
    pub mean_rq_plus: Estimate,
    pub mean_s_tau_minus_1: Estimate,
    pub max_tau: usize,
    /// Absorption histogram over (N_τ, G_τ), sorted by count (descending).
    pub histogram: Vec<((i64, i64), u32)>,
}

/// Simulate `runs` independent stopped walks from `start`.
///
/// Each trajectory asserts the level-line conservation law (n + g strictly
/// decreases, τ ≤ n₀ + g₀) and, when every step satisfies i − j = 1, the
/// exact identity M_k = M₀ − k. Q_τ is always read from the exact table.
/// Deterministic given `seed`: run r uses an independent substream r of a
/// counter-based generator (ChaCha8), so parallel scheduling cannot change
/// the result.
pub fn simulate_walk(
    spec: &WalkSpec,
    start: (i64, i64),
    runs: usize,
    seed: u64,
    l_deep: i64,
    table: &ExactTriangle,
) -> Result<WalkRunStats> {
    let (n0, g0) = start;
    if spec.classify(n0, g0) != Region::Inner {
        return Err(Error::Domain(format!(
            "walk start ({n0}, {g0}) is not inner"
        )));
    }
    if n0 as usize > table.n_max {
        return Err(Error::Domain(format!(
            "walk start n={n0} exceeds table n_max={}",
            table.n_max
        )));
    }
    let m0 = n0 - g0;
    let unit_level_steps = spec.steps.iter().all(|&(i, j)| i - j == 1);
    let products = error_products(spec, m0, n0)?;
    let q0 = q_ratio(table, spec.omega, n0, g0)?;

    // Transition cache: the α-weights at a state never change across runs.
    let mut cache: HashMap<(i64, i64), Vec<f64>> = HashMap::new();

    let mut sum = [0.0f64; 6];
    let mut sq = [0.0f64; 6];
    let mut histogram: HashMap<(i64, i64), u32> = HashMap::new();
    let mut max_tau = 0usize;

    for run in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run as u64);
        let (mut n, mut g) = (n0, g0);
        let mut prev = (n0, g0);
        let mut k = 0usize;
        let region = loop {
            let region = spec.classify(n, g);
            if region != Region::Inner {
                break region;
            }
            if k > (n0 + g0) as usize {
                return Err(Error::Domain(format!(
                    "walk exceeded the level-line bound tau <= n0+g0 at ({n}, {g})"
                )));
            }
            let weights = match cache.get(&(n, g)) {
                Some(w) => w.clone(),
                None => {
                    let w: Vec<f64> = alpha_weights(spec, n, g)?
                        .into_iter()
                        .map(|(_, a)| a)
                        .collect();
                    cache.insert((n, g), w.clone());
                    w
                }
            };
            let total: f64 = weights.iter().sum();
            let mut u = rng.gen::<f64>() * total;
            let mut chosen = spec.steps.len() - 1;
            for (idx, w) in weights.iter().enumerate() {
                if u < *w {
                    chosen = idx;
                    break;
                }
                u -= w;
            }
            let (i, j) = spec.steps[chosen];
            prev = (n, g);
            let (nn, gg) = (n - i, g - j);
            // closure: every reachable state must classify
            if nn < 0 || gg < 0 {
                return Err(Error::Domain(format!(
                    "closure violated: step ({i},{j}) from ({n},{g}) left the lattice"
                )));
            }
            assert!(nn + gg < n + g, "level line n+g must strictly decrease");
            n = nn;
            g = gg;
            k += 1;
            if unit_level_steps {
                assert_eq!(n - g, m0 - k as i64, "M_k = M_0 - k violated");
            }
        };
        max_tau = max_tau.max(k);
        *histogram.entry((n, g)).or_insert(0) += 1;

        let q_tau = q_ratio(table, spec.omega, n, g)?;
        let s_prev = if k > 0 {
            s_ratio(spec, prev.0, prev.1)?
        } else {
            0.0
        };
        let is_good = region == Region::Good;
        let deep = is_good && n > l_deep;
        let m_tau = n - g;
        let rq_minus = products.r_minus_at(m_tau) / products.r_minus_at(m0) * q_tau;
        let rq_plus = products.r_plus_at(m_tau) / products.r_plus_at(m0) * q_tau;
        let samples = [
            is_good as u8 as f64,
            deep as u8 as f64,
            q_tau,
            rq_minus,
            rq_plus,
            s_prev,
        ];
        for (i, s) in samples.iter().enumerate() {
            sum[i] += s;
            sq[i] += s * s;
        }
    }

    let mut histogram: Vec<((i64, i64), u32)> = histogram.into_iter().collect();
    histogram.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    Ok(WalkRunStats {
        runs,
        start,
        seed,
        l_deep,
        q0,
        p_good: estimate(sum[0], sq[0], runs),
        p_good_and_deep: estimate(sum[1], sq[1], runs),
        mean_q_tau: estimate(sum[2], sq[2], runs),
        mean_rq_minus: estimate(sum[3], sq[3], runs),
        mean_rq_plus: estimate(sum[4], sq[4], runs),
        mean_s_tau_minus_1: estimate(sum[5], sq[5], runs),
        max_tau,
        histogram,
    })
}

/// Conserved-quantity sandwich check:
/// E[r⁻ ratio·Q_τ] ≤ Q₀ ≤ E[r⁺ ratio·Q_τ] within 3 standard errors.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SandwichReport {
    pub q0: f64,
    pub lower: Estimate,
    pub upper: Estimate,
    pub holds: bool,
}

pub fn verify_sandwich(stats: &WalkRunStats) -> SandwichReport {
    let lower = stats.mean_rq_minus;
    let upper = stats.mean_rq_plus;
    let holds = lower.mean - 3.0 * lower.stderr <= stats.q0
        && stats.q0 <= upper.mean + 3.0 * upper.stderr;
    SandwichReport {
        q0: stats.q0,
        lower,
        upper,
        holds,
    }
}

/// Condition-4 diagnostic: s(n, g_n) along a start sequence.
pub fn s_along_starts(spec: &WalkSpec, starts: &[(i64, i64)]) -> Result<Vec<f64>> {
    starts.iter().map(|&(n, g)| s_ratio(spec, n, g)).collect()
}
