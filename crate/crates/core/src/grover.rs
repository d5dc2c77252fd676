//! Grover search variants: exact search with a known marked count, search
//! with optimal expected time, bounded-error search under a promised lower
//! bound, and maximum finding over a fixed-point vector.
//!
//! Each routine drives the rotation backend, charges the ledger exactly as
//! the quantum algorithm would (one oracle query per iterate plus one per
//! verification, `log2(N)` analytic gates per diffusion), and verifies its
//! candidate classically through a charged query.

use crate::error::Error;
use crate::oracle::{band_oracle, Cmp, FixedVector, Oracle};
use crate::qsim::{apply_grover_iterate, measure_dense, measure_rotation, DenseState, RotationState};
use crate::rng::Rng;

/// Which state representation drives a Grover run. The two backends agree
/// exactly; the dense one exists as an independent cross-check and is
/// limited to moderate dimensions and unscaled starts.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Backend {
    /// Closed-form two-dimensional rotation algebra; exact, O(1) per run.
    #[default]
    Rotation,
    /// Full statevector simulation, for domains up to 2^14.
    Dense,
}

/// Tunable constants of the search engines.
#[derive(Debug, Clone)]
pub struct GroverConfig {
    /// Truncation constant of bounded-error search: cap `C sqrt(N/k_lb)`.
    pub c_truncation: f64,
    /// Growth factor of the expected-time budget schedule.
    pub growth: f64,
    /// Give-up cap of expected-time search, in units of `sqrt(N)` queries.
    pub hard_cap_factor: f64,
    /// Query cap of one maximum-finding run, in units of `sqrt(N)`.
    pub max_find_cap_factor: f64,
    pub backend: Backend,
}

impl Default for GroverConfig {
    fn default() -> Self {
        GroverConfig {
            c_truncation: 9.0,
            growth: 1.2,
            hard_cap_factor: 1000.0,
            max_find_cap_factor: 100.0,
            backend: Backend::Rotation,
        }
    }
}

/// Result of one search call.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    /// Measured index, 1-based over the oracle domain.
    pub index: u64,
    /// Whether the verification query confirmed the index as marked.
    pub marked: bool,
    /// Oracle queries charged by this call (at this oracle's level).
    pub queries_used: u64,
}

/// Run `iterations` Grover iterates from the (scaled) uniform state and
/// measure. Charges `iterations` queries and `iterations * log2(N)` gates.
fn run_iterates(
    oracle: &dyn Oracle,
    iterations: u64,
    amp_scale: f64,
    backend: Backend,
    rng: &mut Rng,
) -> Result<u64, Error> {
    let n = oracle.domain_size();
    oracle.charge_queries(iterations);
    oracle
        .ledger()
        .charge_gates(iterations as f64 * (n as f64).log2());
    let marked = oracle.marked_indices();
    if backend == Backend::Dense {
        if n > 1 << 14 {
            return Err(Error::Precondition("dense backend limited to N <= 2^14".into()));
        }
        if amp_scale != 1.0 {
            return Err(Error::Precondition("dense backend needs an unscaled start".into()));
        }
        let marked0: Vec<usize> = marked.iter().map(|&i| i as usize - 1).collect();
        let mut state = DenseState::uniform(n as usize)?;
        for _ in 0..iterations {
            apply_grover_iterate(&mut state, &marked0);
        }
        return Ok(measure_dense(&state, rng) as u64 + 1);
    }
    let state = RotationState::after_iterates(n, marked.len() as u64, iterations, amp_scale)?;
    Ok(measure_rotation(&state, &marked, rng))
}

/// Iteration count of exact search for a claimed marked count `k0`:
/// `ceil(pi / (4 asin(sqrt(k0/N))) - 1/2)`.
pub fn certainty_iterations(n: u64, k0: u64) -> u64 {
    let theta = ((k0 as f64 / n as f64).sqrt()).asin();
    ((std::f64::consts::PI / (4.0 * theta) - 0.5).ceil()).max(0.0) as u64
}

/// Exact Grover search: finds a marked element with certainty when exactly
/// `k0` elements are marked, using `m + 1` queries for
/// `m = ceil(pi/(4 asin sqrt(k0/N)) - 1/2)`. The initial good amplitude is
/// scaled down so `2m + 1` iterate angles land exactly on `pi/2`.
pub fn grover_certainty(oracle: &dyn Oracle, k0: u64, rng: &mut Rng) -> Result<SearchOutcome, Error> {
    let n = oracle.domain_size();
    if k0 < 1 || k0 > n {
        return Err(Error::Precondition(format!("k0 = {k0} outside [1, {n}]")));
    }
    let m = certainty_iterations(n, k0);
    let target = (std::f64::consts::PI / (2.0 * (2 * m + 1) as f64)).sin().powi(2);
    let amp_scale = target / (k0 as f64 / n as f64);
    debug_assert!(amp_scale <= 1.0 + 1e-12);
    // the scaled start is only representable in closed form
    let index = run_iterates(oracle, m, amp_scale.min(1.0), Backend::Rotation, rng)?;
    let marked = oracle.query(index)?;
    Ok(SearchOutcome { index, marked, queries_used: m + 1 })
}

/// Search with optimal expected time and no prior knowledge of the marked
/// count: randomized iteration counts under a growing budget. Expected
/// queries `O(sqrt(N/k))` when `k >= 1`; gives up after
/// `hard_cap_factor * sqrt(N)` queries (which covers `k = 0`).
pub fn grover_expectation(
    oracle: &dyn Oracle,
    rng: &mut Rng,
    config: &GroverConfig,
) -> Result<SearchOutcome, Error> {
    let n = oracle.domain_size();
    let cap = (config.hard_cap_factor * (n as f64).sqrt()).ceil() as u64;
    search_with_cap(oracle, cap, rng, config)
}

/// Bounded-error search under the promise of at least `k_lb` marked
/// elements: expected-time search truncated at
/// `c_truncation * sqrt(N/k_lb)` queries. Succeeds with probability at
/// least 2/3 when the promise holds.
pub fn grover_23(
    oracle: &dyn Oracle,
    k_lb: u64,
    rng: &mut Rng,
    config: &GroverConfig,
) -> Result<SearchOutcome, Error> {
    let n = oracle.domain_size();
    if k_lb < 1 || k_lb > n {
        return Err(Error::Precondition(format!("k_lb = {k_lb} outside [1, {n}]")));
    }
    let cap = (config.c_truncation * (n as f64 / k_lb as f64).sqrt()).ceil() as u64;
    search_with_cap(oracle, cap, rng, config)
}

/// Core randomized-budget loop, truncated at `cap` total queries.
fn search_with_cap(
    oracle: &dyn Oracle,
    cap: u64,
    rng: &mut Rng,
    config: &GroverConfig,
) -> Result<SearchOutcome, Error> {
    let n = oracle.domain_size();
    let budget_max = (n as f64).sqrt();
    let mut budget = 1.0f64;
    let mut used = 0u64;
    let mut last = 1u64;
    while used < cap {
        let mut j = rng.below(budget.ceil() as u64);
        // never exceed the cap: shorten the final round if needed
        let remaining = cap - used;
        if j + 1 > remaining {
            j = remaining - 1;
        }
        let index = run_iterates(oracle, j, 1.0, config.backend, rng)?;
        let marked = oracle.query(index)?;
        used += j + 1;
        if marked {
            return Ok(SearchOutcome { index, marked: true, queries_used: used });
        }
        last = index;
        budget = (budget * config.growth).min(budget_max);
    }
    Ok(SearchOutcome { index: last, marked: false, queries_used: used })
}

/// Index (1-based) of the maximum entry of `v` under the tie-broken order,
/// correct with probability at least `1 - rho`. Threshold-descent search
/// with `max(1, ceil(log2(1/rho)))` independent repetitions, each capped at
/// `max_find_cap_factor * sqrt(N)` vector queries.
pub fn max_find(
    v: &FixedVector,
    rho: f64,
    rng: &mut Rng,
    config: &GroverConfig,
) -> Result<u64, Error> {
    Ok(max_find_bounded(v, None, rho, rng, config)?.expect("unbounded maximum always exists"))
}

/// Like [`max_find`], restricted to entries with key strictly below `upper`.
/// Returns `None` when no run finds any entry below the bound.
pub fn max_find_bounded(
    v: &FixedVector,
    upper: Option<crate::oracle::FixedKey>,
    rho: f64,
    rng: &mut Rng,
    config: &GroverConfig,
) -> Result<Option<u64>, Error> {
    if !(0.0 < rho && rho < 1.0) {
        return Err(Error::Precondition("rho must be in (0,1)".into()));
    }
    let reps = ((1.0 / rho).log2().ceil() as u64).max(1);
    let mut best: Option<u64> = None;
    for _ in 0..reps {
        if let Some(cand) = max_find_once(v, upper, rng, config)? {
            if best.map_or(true, |b| v.key(cand) > v.key(b)) {
                best = Some(cand);
            }
        }
    }
    Ok(best)
}

fn max_find_once(
    v: &FixedVector,
    upper: Option<crate::oracle::FixedKey>,
    rng: &mut Rng,
    config: &GroverConfig,
) -> Result<Option<u64>, Error> {
    let n = v.len();
    let domain = n.next_power_of_two().max(2);
    let start = v.ledger().queries();
    let cap = (config.max_find_cap_factor * (domain as f64).sqrt()).ceil() as u64;
    let mut best: Option<u64> = if upper.is_none() {
        v.charge_queries(1);
        Some(1 + rng.below(n))
    } else {
        None
    };
    while v.ledger().queries() - start < cap {
        let lower = best.map(|b| (v.key(b), Cmp::Gt));
        let above = band_oracle(v, lower, upper);
        let out = grover_23(&above, 1, rng, config)?;
        if out.marked {
            best = Some(out.index);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ledger::LedgerHandle;
    use crate::oracle::BitStringOracle;
    use crate::stats;

    fn oracle(n: u64, marked: &[u64]) -> BitStringOracle {
        BitStringOracle::from_marked(n, marked, LedgerHandle::default()).unwrap()
    }

    #[test]
    fn certainty_iteration_counts() {
        // N=4, k=1: theta = pi/6, m = ceil(3/2 - 1/2) = 1
        assert_eq!(certainty_iterations(4, 1), 1);
        // k = N: zero iterations
        assert_eq!(certainty_iterations(16, 16), 0);
        // N=1024, k=1: pi/4 * 32 - 1/2 ~ 24.6
        assert_eq!(certainty_iterations(1024, 1), 25);
    }

    #[test]
    fn certainty_always_succeeds_when_count_is_exact() {
        let mut rng = Rng::new(41);
        for &n in &[2u64, 4, 16, 64, 256] {
            for k in 1..=n.min(20) {
                let marked: Vec<u64> = (1..=k).map(|i| i * (n / k)).collect();
                let o = oracle(n, &marked);
                for _ in 0..20 {
                    let out = grover_certainty(&o, k, &mut rng).unwrap();
                    assert!(out.marked, "n={n} k={k}");
                    assert!(marked.contains(&out.index));
                    assert_eq!(out.queries_used, certainty_iterations(n, k) + 1);
                }
            }
        }
    }

    #[test]
    fn certainty_charges_m_plus_one_queries() {
        let o = oracle(64, &[7]);
        let mut rng = Rng::new(3);
        let out = grover_certainty(&o, 1, &mut rng).unwrap();
        assert_eq!(o.ledger().queries(), out.queries_used);
        assert_eq!(out.queries_used, certainty_iterations(64, 1) + 1);
    }

    #[test]
    fn certainty_with_wrong_count_can_fail_but_reports_it() {
        let o = oracle(256, &[1, 2, 3, 4, 5, 6, 7, 8]);
        let mut rng = Rng::new(9);
        let mut failures = 0;
        for _ in 0..200 {
            // claims k0 = 1 while k = 8
            let out = grover_certainty(&o, 1, &mut rng).unwrap();
            if !out.marked {
                failures += 1;
            }
        }
        assert!(failures > 0, "wrong count should not be silently certain");
    }

    #[test]
    fn certainty_output_uniform_over_marked() {
        let marked = [3u64, 17, 40, 41, 42, 55, 60, 64];
        let o = oracle(64, &marked);
        let mut rng = Rng::new(12);
        let mut counts = vec![0u64; marked.len()];
        for _ in 0..20_000 {
            let out = grover_certainty(&o, marked.len() as u64, &mut rng).unwrap();
            let pos = marked.iter().position(|&m| m == out.index).unwrap();
            counts[pos] += 1;
        }
        assert!(stats::chi2_uniform_pvalue(&counts) > 0.001);
    }

    #[test]
    fn expectation_search_finds_marked_with_expected_scaling() {
        let mut rng = Rng::new(77);
        let config = GroverConfig::default();
        for &(n, k) in &[(256u64, 1u64), (1024, 4), (4096, 16)] {
            let marked: Vec<u64> = (1..=k).map(|i| i * (n / k)).collect();
            let o = oracle(n, &marked);
            let trials = 300;
            let mut total = 0u64;
            for _ in 0..trials {
                let out = grover_expectation(&o, &mut rng, &config).unwrap();
                assert!(out.marked);
                assert!(marked.contains(&out.index));
                total += out.queries_used;
            }
            let mean = total as f64 / trials as f64;
            // E[queries] <= 9/2 sqrt(N/k) plus slack for the verification
            let bound = 4.5 * (n as f64 / k as f64).sqrt() + 10.0;
            assert!(mean <= bound, "n={n} k={k}: mean {mean} > {bound}");
        }
    }

    #[test]
    fn expectation_search_gives_up_on_empty_input() {
        let o = oracle(64, &[]);
        let mut rng = Rng::new(5);
        let config = GroverConfig::default();
        let out = grover_expectation(&o, &mut rng, &config).unwrap();
        assert!(!out.marked);
        let cap = (config.hard_cap_factor * 8.0).ceil() as u64;
        assert_eq!(out.queries_used, cap);
        assert_eq!(o.ledger().queries(), cap);
    }

    #[test]
    fn bounded_error_search_respects_hard_cap() {
        let config = GroverConfig::default();
        let mut rng = Rng::new(31);
        for &(n, k_lb) in &[(1024u64, 1u64), (1024, 16), (4096, 64)] {
            let cap = (config.c_truncation * (n as f64 / k_lb as f64).sqrt()).ceil() as u64;
            // adversarial: nothing marked, so the loop always runs to the cap
            let o = oracle(n, &[]);
            let out = grover_23(&o, k_lb, &mut rng, &config).unwrap();
            assert!(!out.marked);
            assert!(out.queries_used <= cap, "{} > {cap}", out.queries_used);
        }
    }

    #[test]
    fn bounded_error_search_succeeds_at_two_thirds_rate() {
        let config = GroverConfig::default();
        let mut rng = Rng::new(13);
        let (n, k) = (1024u64, 4u64);
        let marked: Vec<u64> = (1..=k).map(|i| i * 200).collect();
        let o = oracle(n, &marked);
        let trials = 2000u64;
        let mut hits = 0;
        for _ in 0..trials {
            let out = grover_23(&o, k, &mut rng, &config).unwrap();
            if out.marked {
                hits += 1;
            }
        }
        let check = stats::rate_at_least(hits, trials, 2.0 / 3.0);
        assert!(check.pass, "rate {} < {}", check.observed, check.threshold);
    }

    #[test]
    fn returned_index_independent_of_query_count() {
        // joint distribution of (found index, query-count quartile) on a
        // fixed instance should carry no mutual information
        let config = GroverConfig::default();
        let mut rng = Rng::new(101);
        let n = 64u64;
        let marked: Vec<u64> = (1..=8).map(|i| i * 8).collect();
        let o = oracle(n, &marked);
        let trials = 40_000;
        let mut samples = Vec::with_capacity(trials);
        for _ in 0..trials {
            let out = grover_expectation(&o, &mut rng, &config).unwrap();
            assert!(out.marked);
            samples.push((out.index, out.queries_used));
        }
        let mut queries: Vec<u64> = samples.iter().map(|s| s.1).collect();
        queries.sort_unstable();
        let quartile = |q: u64| {
            let pos = queries.partition_point(|&x| x < q);
            (4 * pos / queries.len()).min(3)
        };
        let mut joint = vec![vec![0u64; 4]; marked.len()];
        for (idx, q) in &samples {
            let row = marked.iter().position(|m| m == idx).unwrap();
            joint[row][quartile(*q)] += 1;
        }
        let mi = stats::mutual_information_bits(&joint);
        assert!(mi < 0.01, "mutual information {mi} bits");
    }

    #[test]
    fn max_find_locates_the_maximum() {
        let mut rng = Rng::new(55);
        let config = GroverConfig::default();
        let n = 256;
        let values: Vec<f64> = (0..n).map(|_| rng.uniform()).collect();
        let v = FixedVector::from_values(&values, 32, LedgerHandle::default()).unwrap();
        let truth = v.max_index();
        let trials = 60u64;
        let mut hits = 0;
        for _ in 0..trials {
            if max_find(&v, 0.1, &mut rng, &config).unwrap() == truth {
                hits += 1;
            }
        }
        let check = stats::rate_at_least(hits, trials, 0.9);
        assert!(check.pass, "rate {} < {}", check.observed, check.threshold);
    }

    #[test]
    fn max_find_handles_constant_vector() {
        let mut rng = Rng::new(7);
        let config = GroverConfig::default();
        let v = FixedVector::from_values(&[0.5; 16], 16, LedgerHandle::default()).unwrap();
        // max under tie-break is the last index
        let got = max_find(&v, 0.2, &mut rng, &config).unwrap();
        assert_eq!(got, 16);
    }

    #[test]
    fn max_find_query_cost_is_bounded() {
        let mut rng = Rng::new(21);
        let config = GroverConfig::default();
        let values: Vec<f64> = (0..1024).map(|i| (i as f64) / 1024.0).collect();
        let v = FixedVector::from_values(&values, 32, LedgerHandle::default()).unwrap();
        max_find(&v, 0.05, &mut rng, &config).unwrap();
        let reps = (1.0f64 / 0.05).log2().ceil() as u64;
        let per_run = (config.max_find_cap_factor * 32.0).ceil() as u64;
        // each run is capped; one in-flight search may overshoot by its own
        // cap, at two vector queries per threshold-oracle query
        let slack = 2 * (config.c_truncation * 32.0).ceil() as u64 + 2;
        assert!(v.ledger().queries() <= reps * (per_run + slack));
    }

    #[test]
    fn dense_backend_agrees_with_rotation_on_success_rate() {
        let config = GroverConfig { backend: Backend::Dense, ..GroverConfig::default() };
        let trials = 400;
        let mut hits = 0;
        for t in 0..trials {
            let mut rng = Rng::new(900 + t);
            let oracle =
                BitStringOracle::from_marked(256, &[3, 77, 200], LedgerHandle::default()).unwrap();
            let out = grover_23(&oracle, 3, &mut rng, &config).unwrap();
            if out.marked {
                hits += 1;
            }
            // charged like the rotation path
            assert_eq!(oracle.ledger().queries(), out.queries_used);
        }
        let check = stats::rate_at_least(hits, trials, 2.0 / 3.0);
        assert!(check.pass, "rate {} < {}", check.observed, check.threshold);
    }

    #[test]
    fn dense_backend_rejects_large_domains() {
        let mut rng = Rng::new(1);
        let config = GroverConfig { backend: Backend::Dense, ..GroverConfig::default() };
        let oracle =
            BitStringOracle::from_marked(1 << 15, &[5], LedgerHandle::default()).unwrap();
        assert!(grover_expectation(&oracle, &mut rng, &config).is_err());
    }
}
