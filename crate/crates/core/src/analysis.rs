//! Classical mathematical companions: harmonic numbers, geometric tail
//! thresholds, coupon-collector round budgets, run-length probabilities, and
//! the theoretical query budgets used by the harness as scaling oracles.
//!
//! All evaluators here are pure and total on their preconditions.

use crate::scalar::Scalar;

/// Euler–Mascheroni constant, 20 significant digits.
pub const EULER_MASCHERONI: f64 = 0.57721566490153286061;

/// `H_k = sum_{j=1}^k 1/j`, with `H_0 = 0`. Kahan-compensated.
pub fn harmonic<T: Scalar>(k: u64) -> T {
    let mut sum = T::zero();
    let mut comp = T::zero();
    // summing small-to-large keeps the compensation effective
    for j in (1..=k).rev() {
        let term = T::one() / T::from_u64(j).unwrap();
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

/// The three harmonic-number brackets: returns
/// `(gamma_bracket, difference_bound, half_range_bound)`.
///
/// * `H_k - gamma - ln k` lies in `[1/(2(k+1)), 1/(2k)]`;
/// * for `t < k`: `H_k - H_{k-t} <= ln(k/(k-t)) + (2k-t+1)/(2k(k-t+1))`;
/// * for `t <= k/2`: `H_k - H_{k-t} <= 2(t+1)/k`.
///
/// Bounds that do not apply for the given `(k, t)` report `true`.
pub fn harmonic_bounds_check(k: u64, t: u64) -> (bool, bool, bool) {
    assert!(k >= 1 && t <= k);
    let hk: f64 = harmonic(k);
    let resid = hk - EULER_MASCHERONI - (k as f64).ln();
    let gamma_ok = resid >= 1.0 / (2.0 * (k as f64 + 1.0)) - 1e-12
        && resid <= 1.0 / (2.0 * k as f64) + 1e-12;

    let diff = hk - harmonic::<f64>(k - t);
    let diff_ok = if t < k {
        let kf = k as f64;
        let tf = t as f64;
        diff <= (kf / (kf - tf)).ln() + (2.0 * kf - tf + 1.0) / (2.0 * kf * (kf - tf + 1.0)) + 1e-12
    } else {
        true
    };
    let half_ok = if 2 * t <= k {
        diff <= 2.0 * (t as f64 + 1.0) / k as f64 + 1e-12
    } else {
        true
    };
    (gamma_ok, diff_ok, half_ok)
}

/// Tail threshold for a sum of independent geometrics with mean `mu` and
/// minimum success probability `p_star`: `Pr[X >= T] <= rho` for
/// `T = 2 ln(2) mu + 2 ln(1/rho) / ln(1/(1-p_star))`.
pub fn geo_tail_threshold<T: Scalar>(mu: T, p_star: T, rho: T) -> T {
    assert!(mu > T::zero());
    assert!(p_star > T::zero() && p_star <= T::one());
    assert!(rho > T::zero() && rho <= T::one());
    let two = T::from_u64(2).unwrap();
    let base = two * T::LN_2() * mu;
    if p_star == T::one() || rho == T::one() {
        return base;
    }
    base + two * rho.recip().ln() / (T::one() - p_star).recip().ln()
}

/// Round budget `R_{t,k,rho}` guaranteeing `t` distinct coupons from a
/// `k`-element set under a sampler that succeeds with probability >= 2/3:
/// `3 ln(2) k (H_k - H_{k-t}) + 2 ln(1/rho) / ln(3k/(k+2(t-1)))`.
pub fn coupon_budget<T: Scalar>(t: u64, k: u64, rho: T) -> T {
    assert!(t >= 1 && t <= k, "need 1 <= t <= k");
    assert!(rho > T::zero() && rho < T::one());
    let three = T::from_u64(3).unwrap();
    let two = T::from_u64(2).unwrap();
    let kf = T::from_u64(k).unwrap();
    let hdiff = harmonic::<T>(k) - harmonic::<T>(k - t);
    let denom = (three * kf / (kf + two * T::from_u64(t - 1).unwrap())).ln();
    three * T::LN_2() * kf * hdiff + two * rho.recip().ln() / denom
}

/// Union bound `(k - ell + 1)(1 - t/k)^ell` on the probability that the
/// complement of a uniform `t`-subset of `[k]` contains a run of length
/// `>= ell`. Requires `1 <= ell <= k - t`.
pub fn run_length_bound<T: Scalar>(k: u64, t: u64, ell: u64) -> T {
    assert!(t >= 1 && ell >= 1 && t + ell <= k, "need 1 <= ell <= k - t");
    let kf = T::from_u64(k).unwrap();
    let frac = T::one() - T::from_u64(t).unwrap() / kf;
    T::from_u64(k - ell + 1).unwrap() * frac.powi(ell as i32)
}

/// A theoretical bound value, evaluated with unit constants.
#[derive(Debug, Clone, PartialEq)]
pub struct Budget {
    pub queries: f64,
    pub gates: f64,
    pub label: &'static str,
}

/// Identifies which complexity expression to evaluate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BudgetLabel {
    /// `sqrt(N/k_lb)` truncated search.
    Grover23 { n: f64, k_lb: f64 },
    /// `sqrt(N k_ub)` with `sqrt(N k_ub) (k+1) log N` gates.
    CertaintyMultiple { n: f64, k_ub: f64, k: f64 },
    /// `sqrt(N/k_lb) r` for `r` coupon rounds.
    Coupon { n: f64, k_lb: f64, rounds: f64 },
    /// `sqrt(Nk) (1 + log2(k/(rho lambda))/sqrt(lambda))`.
    MultipleFast { n: f64, k: f64, rho: f64, lambda: f64 },
    /// `sqrt(N/(floor(eps k)+1)) + sqrt(k(N-k))/(floor(eps k)+1)`.
    ApproxCount { n: f64, k: f64, eps: f64 },
    /// `2M` oracle applications, `q M` gates.
    AmpEst { m: f64, q: f64 },
    /// Four-term bound of the summing algorithm.
    ApproxSum { n: f64, delta: f64, p: f64, lambda: f64, rho: f64 },
}

/// Evaluate the theoretical query/gate budget for `label`. Used for scaling
/// fits and ratio tests only, never as a hard per-trial assertion.
pub fn query_budget(label: BudgetLabel) -> Budget {
    use BudgetLabel::*;
    match label {
        Grover23 { n, k_lb } => Budget {
            queries: (n / k_lb).sqrt(),
            gates: (n / k_lb).sqrt() * n.log2(),
            label: "grover23",
        },
        CertaintyMultiple { n, k_ub, k } => Budget {
            queries: (n * k_ub).sqrt(),
            gates: (n * k_ub).sqrt() * (k + 1.0) * n.log2(),
            label: "certainty_multiple",
        },
        Coupon { n, k_lb, rounds } => Budget {
            queries: (n / k_lb).sqrt() * rounds,
            gates: (n / k_lb).sqrt() * rounds * n.log2(),
            label: "coupon",
        },
        MultipleFast { n, k, rho, lambda } => {
            let q = (n * k).sqrt() * (1.0 + (k / (rho * lambda)).log2() / lambda.sqrt());
            Budget {
                queries: q,
                gates: (n * k).sqrt() * lambda * (k / rho).log2() * n.log2(),
                label: "multiple_fast",
            }
        }
        ApproxCount { n, k, eps } => {
            let denom = (eps * k).floor() + 1.0;
            Budget {
                queries: (n / denom).sqrt() + (k * (n - k)).sqrt() / denom,
                gates: ((n / denom).sqrt() + (k * (n - k)).sqrt() / denom) * n.log2(),
                label: "approx_count",
            }
        }
        AmpEst { m, q } => Budget {
            queries: 2.0 * m,
            gates: q * m,
            label: "amp_est",
        },
        ApproxSum { n, delta, p, lambda, rho } => {
            let lr = (1.0 / rho).ln().max(1.0);
            let quantile = lr / p.sqrt();
            let count = (n / (n * p + 1.0)).sqrt() * lr;
            let find = n * p.sqrt() * (1.0 + (n * p / lambda / rho).log2().max(0.0) / lambda.sqrt());
            let est = lr / (delta * p.sqrt());
            Budget {
                queries: quantile + count + find + est,
                gates: (quantile + count + find + est) * n.log2(),
                label: "approx_sum",
            }
        }
    }
}
