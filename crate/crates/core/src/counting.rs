//! Amplitude estimation, approximate counting, and the mean-estimation
//! baseline built on them.
//!
//! Amplitude estimation is simulated by sampling the exact phase-estimation
//! outcome distribution; the ledger is charged as if the `M`-application
//! phase-estimation circuit had run. Counting wraps estimation in a doubling
//! stage that localizes the magnitude of the count before spending the main
//! precision budget.

use crate::error::Error;
use crate::ledger::LedgerHandle;
use crate::oracle::{FixedVector, Oracle};
use crate::qsim::QpeSampler;
use crate::rng::Rng;

/// Odd repetition count making a median of independent runs (each correct
/// with probability >= 2/3) fail with probability at most `rho`.
pub fn median_reps(rho: f64) -> u64 {
    assert!(rho > 0.0 && rho < 1.0);
    2 * (4.5 * (1.0 / rho).ln()).ceil() as u64 + 1
}

/// An amplitude to estimate, with the ledger cost of one controlled
/// application of its walk operator.
pub struct AmpSource<'a> {
    /// Ground-truth amplitude `a` in `[0, 1]`; simulation-internal.
    a: f64,
    /// Charge `n` applications of the walk operator.
    charge_apps: Box<dyn Fn(u64) + 'a>,
    ledger: &'a LedgerHandle,
    /// Analytic gates per application beyond the oracle calls.
    gate_q: f64,
}

impl<'a> AmpSource<'a> {
    /// The fraction of marked elements of `oracle`; one application costs
    /// one oracle query and `log2(N) + 1` gates.
    pub fn from_oracle(oracle: &'a dyn Oracle) -> Self {
        let n = oracle.domain_size();
        AmpSource {
            a: oracle.marked_count() as f64 / n as f64,
            charge_apps: Box::new(move |apps| oracle.charge_queries(apps)),
            ledger: oracle.ledger(),
            gate_q: (n as f64).log2() + 1.0,
        }
    }

    /// An explicit amplitude whose walk operator costs `queries_per_app`
    /// vector queries per application.
    pub fn from_vector(v: &'a FixedVector, a: f64, queries_per_app: u64) -> Self {
        AmpSource {
            a,
            charge_apps: Box::new(move |apps| v.charge_queries(queries_per_app * apps)),
            ledger: v.ledger(),
            gate_q: (v.len() as f64).log2() + 1.0,
        }
    }

    pub fn amplitude(&self) -> f64 {
        self.a
    }
}

/// One amplitude-estimation run on an `M`-point grid: returns the estimate
/// `sin^2(pi y / M)` for the sampled outcome `y`. Charges `2M` applications
/// and `q M` gates. With probability at least `8/pi^2` the estimate is
/// within `2 pi sqrt(a(1-a))/M + pi^2/M^2` of the true amplitude.
pub fn amp_est(source: &AmpSource, m: u64, rng: &mut Rng) -> Result<f64, Error> {
    let sampler = QpeSampler::new(source.a, m)?;
    Ok(amp_est_sample(source, &sampler, rng))
}

/// Draw one estimate from a prebuilt sampler, charging the ledger.
fn amp_est_sample(source: &AmpSource, sampler: &QpeSampler, rng: &mut Rng) -> f64 {
    (source.charge_apps)(2 * sampler.m);
    source.ledger.charge_gates(source.gate_q * sampler.m as f64);
    QpeSampler::estimate(sampler.sample(rng), sampler.m)
}

/// Median of `reps` independent estimation runs on the same grid. Builds the
/// outcome distribution once and reuses it across runs.
pub fn amp_est_median(source: &AmpSource, m: u64, reps: u64, rng: &mut Rng) -> Result<f64, Error> {
    assert!(reps >= 1);
    let sampler = QpeSampler::new(source.a, m)?;
    let mut estimates: Vec<f64> = (0..reps)
        .map(|_| amp_est_sample(source, &sampler, rng))
        .collect();
    estimates.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(estimates[estimates.len() / 2])
}

fn median3(mut v: [f64; 3]) -> f64 {
    v.sort_by(|x, y| x.partial_cmp(y).unwrap());
    v[1]
}

/// Per-call cache of outcome distributions. Within one counting call the
/// amplitude is fixed, so the distribution for each grid size is built once
/// and reused across the boosting runs.
struct SamplerCache {
    a: f64,
    samplers: std::collections::HashMap<u64, QpeSampler>,
}

impl SamplerCache {
    fn new(a: f64) -> Self {
        SamplerCache { a, samplers: std::collections::HashMap::new() }
    }

    fn get(&mut self, m: u64) -> Result<&QpeSampler, Error> {
        if !self.samplers.contains_key(&m) {
            self.samplers.insert(m, QpeSampler::new(self.a, m)?);
        }
        Ok(&self.samplers[&m])
    }
}

/// One counting run: a doubling stage to localize the magnitude of the
/// marked count, then a precision stage sized for relative error `eps`.
/// Returns the rounded count estimate.
fn approx_count_once(
    source: &AmpSource,
    cache: &mut SamplerCache,
    n: u64,
    eps: f64,
    rng: &mut Rng,
) -> Result<u64, Error> {
    let m_max = ((10.0 * (n as f64).sqrt()).ceil() as u64).next_power_of_two();

    // doubling stage: the smallest grid that resolves the amplitude away
    // from zero gives a constant-factor rough count
    let mut k_rough = 0u64;
    let mut m = 2u64;
    while m <= m_max {
        let sampler = cache.get(m)?;
        let mut ests = [0.0; 3];
        let mut nonzero = 0;
        for e in ests.iter_mut() {
            *e = amp_est_sample(source, sampler, rng);
            if *e > 0.0 {
                nonzero += 1;
            }
        }
        if nonzero >= 2 {
            k_rough = ((n as f64 * median3(ests)).round() as u64).max(1);
            break;
        }
        m *= 2;
    }
    if k_rough == 0 {
        // the amplitude never resolved: report an empty marked set
        return Ok(0);
    }

    // precision stage: the quarter of the rough count guards against an
    // overestimate pushing the grid below the required resolution
    let denom = (k_rough / 4).max(1);
    let m2_raw = (3.0 * std::f64::consts::PI / eps * (n as f64 / denom as f64).sqrt()).ceil();
    let m2 = (m2_raw as u64).next_power_of_two().max(2);
    let est = amp_est_sample(source, cache.get(m2)?, rng);
    Ok(((n as f64 * est).round() as u64).min(n))
}

/// Approximate the marked count of `oracle` within relative error `eps`, as
/// the median of `reps` independent runs.
pub fn approx_count_reps(
    oracle: &dyn Oracle,
    eps: f64,
    reps: u64,
    rng: &mut Rng,
) -> Result<u64, Error> {
    if !(0.0 < eps && eps <= 1.0) {
        return Err(Error::Precondition("eps must be in (0, 1]".into()));
    }
    assert!(reps >= 1);
    let source = AmpSource::from_oracle(oracle);
    let mut cache = SamplerCache::new(source.a);
    let n = oracle.domain_size();
    let mut runs: Vec<u64> = (0..reps)
        .map(|_| approx_count_once(&source, &mut cache, n, eps, rng))
        .collect::<Result<_, _>>()?;
    runs.sort_unstable();
    Ok(runs[runs.len() / 2])
}

/// Approximate the marked count of `oracle` within relative error `eps`,
/// with failure probability at most `rho`. A marked count of zero is
/// reported exactly. Uses `O(sqrt(N k)/eps * log(1/rho))` queries.
pub fn approx_count(oracle: &dyn Oracle, eps: f64, rho: f64, rng: &mut Rng) -> Result<u64, Error> {
    if !(0.0 < rho && rho < 1.0) {
        return Err(Error::Precondition("rho must be in (0, 1)".into()));
    }
    approx_count_reps(oracle, eps, median_reps(rho), rng)
}

/// Count estimate within a factor `[1/2, 3/2]` of the truth with probability
/// at least `1 - rho`: counting at relative error one half.
pub fn estimate_k_32(oracle: &dyn Oracle, rho: f64, rng: &mut Rng) -> Result<u64, Error> {
    approx_count(oracle, 0.5, rho, rng)
}

/// Mean of `v` within relative error `delta` with probability at least
/// `1 - rho`, by maximum finding followed by amplitude estimation of the
/// rescaled vector. The query-heavy path; the sum approximation algorithms
/// improve on it.
pub fn mean_estimate_baseline(
    v: &FixedVector,
    delta: f64,
    rho: f64,
    rng: &mut Rng,
    config: &crate::grover::GroverConfig,
) -> Result<f64, Error> {
    if !(0.0 < delta && delta < 1.0) {
        return Err(Error::Precondition("delta must be in (0, 1)".into()));
    }
    let n = v.len();
    let i_max = crate::grover::max_find(v, rho / 2.0, rng, config)?;
    let v_max = v.query_raw(i_max)?;
    if v_max == 0 {
        return Ok(0.0);
    }
    // amplitude of the rescaled vector w_i = v_i / v_max, with the arcsin
    // rotation angles rounded to ceil(log2(4N/delta)) fractional bits
    let frac_bits = (4.0 * n as f64 / delta).log2().ceil() as i32;
    let scale = 2f64.powi(frac_bits);
    let mut acc = 0.0;
    for i in 1..=n {
        let w = v.raw(i) as f64 / v_max as f64;
        let alpha = (w.min(1.0).sqrt().asin() * scale).round() / scale;
        acc += alpha.sin().powi(2);
    }
    let a = acc / n as f64;
    let source = AmpSource::from_vector(v, a, 2);
    let m = ((8.0 * (n as f64).sqrt() / delta).ceil() as u64).next_power_of_two();
    let a_est = amp_est_median(&source, m, median_reps(rho / 2.0), rng)?;
    let v_max_value = v_max as f64 / (1u64 << v.bits()) as f64;
    Ok(v_max_value * a_est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grover::GroverConfig;
    use crate::ledger::LedgerHandle;
    use crate::oracle::BitStringOracle;
    use crate::stats;

    fn oracle(n: u64, k: u64) -> BitStringOracle {
        let marked: Vec<u64> = (1..=k).map(|i| i * (n / k.max(1))).collect();
        BitStringOracle::from_marked(n, &marked, LedgerHandle::default()).unwrap()
    }

    #[test]
    fn median_reps_is_odd_and_grows_with_confidence() {
        assert_eq!(median_reps(0.5) % 2, 1);
        assert!(median_reps(0.01) > median_reps(0.1));
        // frozen: rho = 0.05 gives 2*ceil(13.48) + 1 = 29
        assert_eq!(median_reps(0.05), 29);
    }

    #[test]
    fn amp_est_charges_two_m_applications() {
        let o = oracle(64, 4);
        let source = AmpSource::from_oracle(&o);
        let mut rng = Rng::new(1);
        amp_est(&source, 32, &mut rng).unwrap();
        assert_eq!(o.ledger().queries(), 64);
    }

    #[test]
    fn amp_est_error_bound_at_claimed_rate() {
        let o = oracle(256, 16);
        let source = AmpSource::from_oracle(&o);
        let a = source.amplitude();
        let m = 64u64;
        let bound = 2.0 * std::f64::consts::PI * (a * (1.0 - a)).sqrt() / m as f64
            + std::f64::consts::PI.powi(2) / (m * m) as f64;
        let mut rng = Rng::new(2);
        let trials = 20_000u64;
        let mut hits = 0;
        for _ in 0..trials {
            if (amp_est(&source, m, &mut rng).unwrap() - a).abs() <= bound {
                hits += 1;
            }
        }
        let check = stats::rate_at_least(hits, trials, 8.0 / std::f64::consts::PI.powi(2));
        assert!(check.pass, "rate {} < {}", check.observed, check.threshold);
    }

    #[test]
    fn amp_est_median_tightens_the_tail() {
        let o = oracle(256, 16);
        let source = AmpSource::from_oracle(&o);
        let a = source.amplitude();
        let m = 64u64;
        let bound = 2.0 * std::f64::consts::PI * (a * (1.0 - a)).sqrt() / m as f64
            + std::f64::consts::PI.powi(2) / (m * m) as f64;
        let mut rng = Rng::new(3);
        let trials = 2000u64;
        let mut hits = 0;
        for _ in 0..trials {
            if (amp_est_median(&source, m, 15, &mut rng).unwrap() - a).abs() <= bound {
                hits += 1;
            }
        }
        let check = stats::rate_at_least(hits, trials, 0.99);
        assert!(check.pass, "rate {} < {}", check.observed, check.threshold);
    }

    #[test]
    fn count_of_empty_set_is_exactly_zero() {
        let o = oracle(1024, 0);
        let mut rng = Rng::new(4);
        for _ in 0..5 {
            assert_eq!(approx_count(&o, 0.25, 0.1, &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn count_of_full_set_is_exact() {
        let o = oracle(64, 64);
        let mut rng = Rng::new(5);
        assert_eq!(approx_count(&o, 0.25, 0.1, &mut rng).unwrap(), 64);
    }

    #[test]
    fn count_meets_relative_error_at_claimed_rate() {
        let mut rng = Rng::new(6);
        let rho = 0.1;
        for &(n, k, eps) in &[(1024u64, 1u64, 0.5f64), (1024, 16, 0.25), (4096, 100, 0.25)] {
            let o = oracle(n, k);
            let trials = 60u64;
            let mut hits = 0;
            for _ in 0..trials {
                let est = approx_count(&o, eps, rho, &mut rng).unwrap();
                if (est as f64 - k as f64).abs() <= eps * k as f64 {
                    hits += 1;
                }
            }
            let check = stats::rate_at_least(hits, trials, 1.0 - rho);
            assert!(check.pass, "n={n} k={k}: rate {} < {}", check.observed, check.threshold);
        }
    }

    #[test]
    fn factor_three_half_estimate_brackets_truth() {
        let mut rng = Rng::new(7);
        for &(n, k) in &[(1024u64, 3u64), (1024, 40), (256, 200)] {
            let o = oracle(n, k);
            let trials = 50u64;
            let mut hits = 0;
            for _ in 0..trials {
                let est = estimate_k_32(&o, 0.1, &mut rng).unwrap();
                if 2 * est >= k && 2 * est <= 3 * k {
                    hits += 1;
                }
            }
            let check = stats::rate_at_least(hits, trials, 0.9);
            assert!(check.pass, "n={n} k={k}: rate {} < {}", check.observed, check.threshold);
        }
    }

    #[test]
    fn counting_is_deterministic_under_fixed_seed() {
        let o = oracle(512, 9);
        let run = |seed| {
            o.ledger().reset();
            let mut rng = Rng::new(seed);
            (
                approx_count(&o, 0.25, 0.1, &mut rng).unwrap(),
                o.ledger().snapshot(),
            )
        };
        assert_eq!(run(42), run(42));
    }

    #[test]
    fn mean_baseline_zero_vector() {
        let v = FixedVector::new(vec![0; 16], 8, LedgerHandle::default()).unwrap();
        let mut rng = Rng::new(8);
        let est = mean_estimate_baseline(&v, 0.1, 0.1, &mut rng, &GroverConfig::default()).unwrap();
        assert_eq!(est, 0.0);
    }

    #[test]
    fn mean_baseline_hits_relative_error() {
        let mut rng = Rng::new(9);
        let n = 256;
        let values: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
        let v = FixedVector::from_values(&values, 32, LedgerHandle::default()).unwrap();
        let truth = v.sum() / n as f64;
        let delta = 0.1;
        let trials = 30u64;
        let mut hits = 0;
        for _ in 0..trials {
            let est =
                mean_estimate_baseline(&v, delta, 0.1, &mut rng, &GroverConfig::default()).unwrap();
            if (est - truth).abs() <= delta * truth {
                hits += 1;
            }
        }
        let check = stats::rate_at_least(hits, trials, 0.9);
        assert!(check.pass, "rate {} < {}", check.observed, check.threshold);
    }
}
