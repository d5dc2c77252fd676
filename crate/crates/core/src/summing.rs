//! Multiplicative approximation of the sum of a fixed-point vector: quantile
//! estimation picks a threshold, the entries above it are found exactly and
//! summed classically, and the mass below it is recovered by amplitude
//! estimation of the rescaled vector.

use crate::counting::{amp_est_median, approx_count, approx_count_reps, estimate_k_32, median_reps, AmpSource};
use crate::error::Error;
use crate::grover::{grover_23, max_find_bounded, GroverConfig};
use crate::multifind::find_all_marked;
use crate::oracle::{band_oracle, rescaled_amplitude, threshold_oracle, Cmp, FixedKey, FixedVector};
use crate::rng::Rng;

/// Lower quantile fraction certified by the threshold selection: the
/// accepted rank lies in `[C_QUANTILE * p * N, p * N]`.
pub const C_QUANTILE: f64 = 0.5;

/// Step cap of the quantile descent; the expected step count is
/// `O(log(1/p))`, so the cap is effectively never binding.
const QUANTILE_MAX_STEPS: u64 = 200;

/// Key of an entry whose rank `r = |{i : key_i >= key}|` satisfies
/// `C_QUANTILE * p * N <= r <= p * N`, with probability at least `1 - rho`.
/// Uses `O(sqrt(1/p) log(1/rho))` expected queries.
pub fn quantile_estimate(
    v: &FixedVector,
    p: f64,
    rho: f64,
    rng: &mut Rng,
    config: &GroverConfig,
) -> Result<FixedKey, Error> {
    let n = v.len();
    let target = p * n as f64;
    if !(p > 0.0 && p <= 1.0) || target < 1.0 {
        return Err(Error::Precondition("need 0 < p <= 1 with p * N >= 1".into()));
    }
    if !(0.0 < rho && rho < 1.0) {
        return Err(Error::Precondition("rho must be in (0, 1)".into()));
    }
    if target < 8.0 {
        return quantile_exact(v, target.floor() as u64, rho, rng, config);
    }

    // descent: thread down through sampled entries until the counted rank
    // certifies the window. With relative error 1/4, an accepted estimate in
    // [0.625 pN, 0.75 pN] pins the true rank inside [0.5 pN, pN]. Cheap
    // counts steer the walk; only an acceptance is re-counted at high
    // confidence, so the failure budget is spent where it matters.
    let lo_acc = (0.625 * target).ceil() as u64;
    let hi_acc = (0.75 * target).floor() as u64;
    let k_lb = ((0.4 * target).ceil() as u64).max(1);
    let max_certs = 16u64;
    let mut certs = 0;
    let mut stack: Vec<FixedKey> = Vec::new();
    v.charge_queries(1);
    let mut z = v.key(1 + rng.below(n));
    for _ in 0..QUANTILE_MAX_STEPS {
        let geq = threshold_oracle(v, z);
        let mut r = approx_count_reps(&geq, 0.25, 5, rng)?;
        if (lo_acc..=hi_acc).contains(&r) {
            let certified = approx_count(&geq, 0.25, rho / max_certs as f64, rng)?;
            certs += 1;
            if (lo_acc..=hi_acc).contains(&certified) || certs >= max_certs {
                return Ok(z);
            }
            r = certified;
        }
        if r < lo_acc {
            // overshot the window: back up one threshold, or restart
            z = stack.pop().unwrap_or_else(|| {
                v.charge_queries(1);
                v.key(1 + rng.below(n))
            });
            continue;
        }
        // too many entries above: sample one of them as the next threshold
        let above = band_oracle(v, Some((z, Cmp::Gt)), None);
        let out = grover_23(&above, k_lb, rng, config)?;
        if out.marked {
            stack.push(z);
            z = v.key(out.index);
        }
    }
    Ok(z)
}

/// Exact selection of the `r`-th largest key by descending bounded maximum
/// finding; used when `p * N` is too small for counting to certify a window.
fn quantile_exact(
    v: &FixedVector,
    r: u64,
    rho: f64,
    rng: &mut Rng,
    config: &GroverConfig,
) -> Result<FixedKey, Error> {
    debug_assert!(r >= 1 && r <= v.len());
    let per_step = rho / r as f64;
    let mut z: Option<FixedKey> = None;
    for _ in 0..r {
        match max_find_bounded(v, z, per_step, rng, config)? {
            Some(i) => z = Some(v.key(i)),
            None => break,
        }
    }
    Ok(z.unwrap_or(FixedKey::plain(0)))
}

/// Which path produced the final value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SumBranch {
    /// The threshold was zero, so the entries found above it carry the whole
    /// sum and are added classically.
    Classical,
    /// Classical head plus amplitude-estimated tail.
    Hybrid,
}

/// Result of one sum approximation, with its decomposition.
#[derive(Debug, Clone)]
pub struct SumEstimate {
    /// The estimate of `sum_i v_i`.
    pub value: f64,
    /// Classical sum over the found above-threshold entries.
    pub head: f64,
    /// Estimated mass below the threshold (`0` on the classical branch).
    pub tail: f64,
    /// Threshold value used for the split.
    pub threshold: f64,
    /// Found above-threshold indices, sorted, 1-based.
    pub found: Vec<u64>,
    pub branch: SumBranch,
}

/// Approximate `sum_i v_i` within relative error `delta` with probability at
/// least `1 - rho`. `p` is the head fraction (see [`choose_params`]);
/// `lambda` tunes the find-all stage, defaulting to its optimum.
pub fn approx_sum(
    v: &FixedVector,
    delta: f64,
    p: f64,
    lambda: Option<f64>,
    rho: f64,
    rng: &mut Rng,
    config: &GroverConfig,
) -> Result<SumEstimate, Error> {
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::Precondition("delta must be in (0, 1)".into()));
    }
    let n = v.len();
    let z = quantile_estimate(v, p, rho / 4.0, rng, config)?;

    let geq = threshold_oracle(v, z);
    let k_est = estimate_k_32(&geq, rho / 4.0, rng)?.max(1);
    let head_set = find_all_marked(&geq, k_est, lambda, rho / 4.0, rng, config)?;
    let mut head = 0.0;
    for &i in &head_set.indices {
        head += v.query_raw(i)? as f64 / (1u64 << v.bits()) as f64;
    }
    let threshold = z.raw as f64 / (1u64 << v.bits()) as f64;

    if z.raw == 0 {
        // everything below the threshold is exactly zero
        return Ok(SumEstimate {
            value: head,
            head,
            tail: 0.0,
            threshold,
            found: head_set.indices,
            branch: SumBranch::Classical,
        });
    }

    let a = rescaled_amplitude(v, z, delta)?;
    let m_raw = (12.0 * std::f64::consts::PI / (delta * (p * C_QUANTILE).sqrt())).ceil() as u64;
    let m = m_raw.next_power_of_two().max(2);
    let source = AmpSource::from_vector(v, a, 2);
    let a_est = amp_est_median(&source, m, median_reps(rho / 4.0), rng)?;
    let tail = n as f64 * threshold * a_est;
    Ok(SumEstimate {
        value: head + tail,
        head,
        tail,
        threshold,
        found: head_set.indices,
        branch: SumBranch::Hybrid,
    })
}

/// Regime of the head-fraction choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamMode {
    /// `p ~ log2(1/rho) / (delta N)`, minimizing total queries.
    QueryOptimal,
    /// `p ~ 1 / (delta N)` with a fixed small `lambda`, minimizing gates at
    /// a logarithmic query overhead.
    Simple,
}

/// Chosen head fraction and find-all parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    pub p: f64,
    pub lambda: Option<f64>,
    pub mode: ParamMode,
}

/// Pick the head fraction `p` (and `lambda`) for a sum approximation on `n`
/// entries at accuracy `delta` and failure budget `rho`. `alpha` scales the
/// leading constant; `p` is kept inside `[1/n, 1/2]`.
pub fn choose_params(n: u64, delta: f64, rho: f64, alpha: f64, mode: ParamMode) -> Params {
    let nf = n as f64;
    let (p, lambda) = match mode {
        ParamMode::QueryOptimal => ((alpha * (1.0 / rho).log2() / (delta * nf)).min(0.5), None),
        ParamMode::Simple => ((alpha / (delta * nf)).min(0.5), Some(6.0)),
    };
    Params { p: p.max(1.0 / nf), lambda, mode }
}
