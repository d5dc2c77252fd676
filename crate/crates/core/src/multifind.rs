//! Finding all marked elements: the exact masked sweep, the coupon-collector
//! stage, and the interval-decomposition algorithm that combines them, plus
//! a wrapper that picks the regime from the parameters.

use crate::counting::estimate_k_32;
use crate::error::Error;
use crate::grover::{grover_23, grover_certainty, GroverConfig};
use crate::oracle::{mask_found, restrict_interval, Oracle, SortedIndexList};
use crate::rng::Rng;

/// Result of a find-all run.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiFindResult {
    /// Found indices, sorted, 1-based; every entry verified marked.
    pub indices: Vec<u64>,
    /// Sampling rounds used by the coupon stage (0 on the exact path).
    pub rounds: u64,
    /// Whether the wrapper took the exact masked sweep instead of the
    /// interval decomposition.
    pub fallback: bool,
}

/// Find all marked elements with certainty, given an upper bound `k_ub` on
/// the marked count: a descending sweep of exact searches on progressively
/// masked oracles. Uses `O(sqrt(N k_ub))` queries.
pub fn grover_certainty_multiple(
    oracle: &dyn Oracle,
    k_ub: u64,
    rng: &mut Rng,
) -> Result<SortedIndexList, Error> {
    let n = oracle.domain_size();
    if k_ub < 1 {
        return Err(Error::Precondition("k_ub must be >= 1".into()));
    }
    let masked = mask_found(oracle, &SortedIndexList::new())?;
    let mut found = SortedIndexList::new();
    for m in (1..=k_ub.min(n)).rev() {
        let out = grover_certainty(&masked, m, rng)?;
        if out.marked {
            found.insert(out.index);
            masked.add_mask(out.index)?;
        }
    }
    Ok(found)
}

/// Collect up to `target` distinct marked elements by repeated bounded-error
/// search, stopping after at most `max_rounds` sampling rounds. `k_lb` is
/// the promised lower bound handed to each search. Returns the found set and
/// the number of rounds used.
pub fn grover_coupon(
    oracle: &dyn Oracle,
    k_lb: u64,
    target: u64,
    max_rounds: u64,
    rng: &mut Rng,
    config: &GroverConfig,
) -> Result<(SortedIndexList, u64), Error> {
    let mut found = SortedIndexList::new();
    let mut rounds = 0;
    while rounds < max_rounds && (found.len() as u64) < target {
        rounds += 1;
        let out = grover_23(oracle, k_lb, rng, config)?;
        if out.marked {
            found.insert(out.index);
        }
    }
    Ok((found, rounds))
}

/// Round budget of the interval algorithm's coupon stage for `t` targets:
/// `ceil(6 ln2 (t+1) + 2 ln(1/rho) / ln(3/2))`.
pub fn fast_round_budget(t: u64, rho: f64) -> u64 {
    (6.0 * std::f64::consts::LN_2 * (t as f64 + 1.0) + 2.0 * (1.0 / rho).ln() / 1.5f64.ln()).ceil()
        as u64
}

/// The work-balance parameter maximizing the query saving for a given count
/// estimate and failure budget:
/// `min(k_est / log2(6 k_est / rho), log2^2(k_est / rho))`.
pub fn lambda_star(k_est: u64, rho: f64) -> f64 {
    let k = k_est as f64;
    (k / (6.0 * k / rho).log2()).min((k / rho).log2().powi(2))
}

/// Find all marked elements via coupon sampling plus interval decomposition,
/// given a count estimate `k_est` within a factor `[2/3, 2]` of the truth.
/// Succeeds with probability at least `1 - rho` in
/// `O(sqrt(N k)(1 + log(k/(rho lambda))/sqrt(lambda)))` queries; requires
/// enough targets per interval, `ceil(k_est/lambda) >= log2(6 k_est / rho)`,
/// checked before any query is made.
pub fn grover_multiple_fast(
    oracle: &dyn Oracle,
    k_est: u64,
    lambda: f64,
    rho: f64,
    rng: &mut Rng,
    config: &GroverConfig,
) -> Result<MultiFindResult, Error> {
    let n = oracle.domain_size();
    if k_est < 1 || k_est > n {
        return Err(Error::Precondition(format!("k_est = {k_est} outside [1, {n}]")));
    }
    if !(0.0 < rho && rho < 1.0) {
        return Err(Error::Precondition("rho must be in (0, 1)".into()));
    }
    if lambda < 1.0 {
        return Err(Error::Precondition("lambda must be >= 1".into()));
    }
    let t = (k_est as f64 / lambda).ceil() as u64;
    if (t as f64) < (6.0 * k_est as f64 / rho).log2() {
        return Err(Error::Precondition(format!(
            "interval count t = {t} below log2(6 k_est / rho); use the exact sweep"
        )));
    }

    // coupon stage: a well-spread seed set of marked elements
    let k_lb = ((2.0 * k_est as f64 / 3.0).ceil() as u64).max(1);
    let budget = fast_round_budget(t, rho);
    let (seeds, rounds) = grover_coupon(oracle, k_lb, t, budget, rng, config)?;

    // interval stage: between consecutive seeds the residual counts are
    // small, so counting plus the exact sweep is cheap per interval
    let mut all = seeds.clone();
    let mut cuts: Vec<u64> = vec![0];
    cuts.extend_from_slice(seeds.as_slice());
    cuts.push(n + 1);
    let slices = cuts.len() as u64 - 1;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo < 2 {
            continue;
        }
        let interval = restrict_interval(oracle, lo, hi)?;
        let k_j = estimate_k_32(&interval, rho / (3.0 * slices as f64), rng)?;
        if k_j == 0 {
            continue;
        }
        let inner = grover_certainty_multiple(&interval, 2 * k_j, rng)?;
        for &i in inner.as_slice() {
            all.insert(lo + i);
        }
    }
    Ok(MultiFindResult { indices: all.as_slice().to_vec(), rounds, fallback: false })
}

/// Whether the interval algorithm is both admissible (enough targets per
/// interval at this `lambda`) and cheaper in query budget than the exact
/// masked sweep with `k_ub = 2 k_est`.
pub fn interval_path_preferred(k_est: u64, lambda: f64, rho: f64) -> bool {
    let t = (k_est as f64 / lambda).ceil() as u64;
    let admissible = lambda >= 6.0 && (t as f64) >= (6.0 * k_est as f64 / rho).log2();
    // budgets per sqrt(N k_est): sweep sqrt(2) vs 1 + log2(k/(rho lambda))/sqrt(lambda)
    let interval_factor = 1.0 + (k_est as f64 / (rho * lambda)).log2() / lambda.sqrt();
    admissible && interval_factor <= std::f64::consts::SQRT_2
}

/// Find all marked elements, choosing the regime from the parameters: the
/// interval algorithm when it is admissible and its query budget beats the
/// exact masked sweep at the requested `lambda` (or at the optimum when none
/// is given), otherwise the exact sweep with `k_ub = 2 k_est`.
pub fn find_all_marked(
    oracle: &dyn Oracle,
    k_est: u64,
    lambda: Option<f64>,
    rho: f64,
    rng: &mut Rng,
    config: &GroverConfig,
) -> Result<MultiFindResult, Error> {
    if k_est < 1 {
        return Err(Error::Precondition("k_est must be >= 1".into()));
    }
    let lam = lambda.unwrap_or_else(|| lambda_star(k_est, rho));
    if interval_path_preferred(k_est, lam, rho) {
        grover_multiple_fast(oracle, k_est, lam, rho, rng, config)
    } else {
        let found = grover_certainty_multiple(oracle, 2 * k_est, rng)?;
        Ok(MultiFindResult { indices: found.as_slice().to_vec(), rounds: 0, fallback: true })
    }
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

    fn spread(n: u64, k: u64) -> Vec<u64> {
        (1..=k).map(|i| i * (n / k)).collect()
    }

    #[test]
    fn exact_sweep_finds_everything_exhaustively() {
        // every pattern on 16 elements, with the tight upper bound
        let mut rng = Rng::new(1);
        for pattern in 1u32..65536 {
            let bits: Vec<bool> = (0..16).map(|i| pattern >> i & 1 == 1).collect();
            let o = BitStringOracle::new(bits, LedgerHandle::default()).unwrap();
            let k = o.marked_count();
            let found = grover_certainty_multiple(&o, k, &mut rng).unwrap();
            assert_eq!(found.as_slice(), o.marked_indices(), "pattern {pattern:#06x}");
        }
    }

    #[test]
    fn exact_sweep_tolerates_loose_upper_bound() {
        let mut rng = Rng::new(2);
        let marked = spread(256, 5);
        let o = oracle(256, &marked);
        for k_ub in [5u64, 7, 10, 20] {
            let found = grover_certainty_multiple(&o, k_ub, &mut rng).unwrap();
            assert_eq!(found.as_slice(), &marked[..]);
        }
    }

    #[test]
    fn exact_sweep_on_empty_input_finds_nothing() {
        let mut rng = Rng::new(3);
        let o = oracle(64, &[]);
        let found = grover_certainty_multiple(&o, 4, &mut rng).unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn exact_sweep_query_cost_scales_with_bound() {
        let mut rng = Rng::new(4);
        let n = 4096u64;
        for k in [1u64, 4, 16, 64] {
            let o = oracle(n, &spread(n, k));
            grover_certainty_multiple(&o, k, &mut rng).unwrap();
            // sum over m of (pi/4 sqrt(N/m) + 1) <= pi/2 sqrt(N k) + k
            let bound = 1.6 * ((n * k) as f64).sqrt() + k as f64 + 16.0;
            assert!((o.ledger().queries() as f64) <= bound, "k={k}: {}", o.ledger().queries());
        }
    }

    #[test]
    fn coupon_stage_collects_target_within_budget() {
        let mut rng = Rng::new(5);
        let (n, k, t) = (1024u64, 16u64, 8u64);
        let o = oracle(n, &spread(n, k));
        let rho = 0.1;
        let budget = crate::analysis::coupon_budget::<f64>(t, k, rho).ceil() as u64;
        let trials = 200u64;
        let mut hits = 0;
        for _ in 0..trials {
            let (found, rounds) =
                grover_coupon(&o, k, t, budget, &mut rng, &GroverConfig::default()).unwrap();
            assert!(rounds <= budget);
            for &i in found.as_slice() {
                assert!(o.peek(i));
            }
            if found.len() as u64 >= t {
                hits += 1;
            }
        }
        let check = stats::rate_at_least(hits, trials, 1.0 - rho);
        assert!(check.pass, "rate {} < {}", check.observed, check.threshold);
    }

    #[test]
    fn round_budget_dominates_coupon_budget_for_small_t() {
        for k in [8u64, 64, 512] {
            for rho in [0.2, 0.05] {
                for t in 1..=k / 2 {
                    let simple = fast_round_budget(t, rho) as f64;
                    let full = crate::analysis::coupon_budget::<f64>(t, k, rho);
                    assert!(simple + 1.0 >= full, "k={k} t={t} rho={rho}");
                }
            }
        }
    }

    #[test]
    fn interval_algorithm_rejects_too_few_targets_before_querying() {
        let o = oracle(1024, &spread(1024, 16));
        let mut rng = Rng::new(6);
        // t = ceil(16/6) = 3 < log2(6*16/0.05)
        let err = grover_multiple_fast(&o, 16, 6.0, 0.05, &mut rng, &GroverConfig::default());
        assert!(matches!(err, Err(Error::Precondition(_))));
        assert_eq!(o.ledger().queries(), 0);
    }

    #[test]
    fn interval_algorithm_is_sound_and_usually_complete() {
        let mut rng = Rng::new(7);
        let config = GroverConfig::default();
        let (n, k) = (4096u64, 64u64);
        let rho = 0.2; // t = ceil(64/6) = 11 >= log2(6*64/0.2) ~ 10.9
        let marked = spread(n, k);
        let o = oracle(n, &marked);
        let trials = 25u64;
        let mut complete = 0;
        for _ in 0..trials {
            let res = grover_multiple_fast(&o, k, 6.0, rho, &mut rng, &config).unwrap();
            for &i in &res.indices {
                assert!(o.peek(i), "unsound index {i}");
            }
            if res.indices == marked {
                complete += 1;
            }
        }
        let check = stats::rate_at_least(complete, trials, 1.0 - rho);
        assert!(check.pass, "rate {} < {}", check.observed, check.threshold);
    }

    #[test]
    fn interval_algorithm_handles_rough_count_estimate() {
        let mut rng = Rng::new(8);
        let config = GroverConfig::default();
        let (n, k) = (2048u64, 48u64);
        let marked = spread(n, k);
        let o = oracle(n, &marked);
        // k_est off by a factor 4/3, still inside the promised bracket
        let res = grover_multiple_fast(&o, 64, 6.0, 0.2, &mut rng, &config).unwrap();
        for &i in &res.indices {
            assert!(o.peek(i));
        }
    }

    #[test]
    fn wrapper_falls_back_when_lambda_star_is_small() {
        let mut rng = Rng::new(9);
        let config = GroverConfig::default();
        let marked = spread(256, 4);
        let o = oracle(256, &marked);
        // lambda*(4, 0.05) < 6, so the exact sweep must run
        let res = find_all_marked(&o, 4, None, 0.05, &mut rng, &config).unwrap();
        assert!(res.fallback);
        assert_eq!(res.indices, marked);
    }

    #[test]
    fn wrapper_uses_interval_path_at_large_counts() {
        let mut rng = Rng::new(10);
        let config = GroverConfig::default();
        let (n, k) = (32768u64, 16384u64);
        let lambda = 800.0;
        assert!(interval_path_preferred(k, lambda, 0.3));
        let marked = spread(n, k);
        let o = oracle(n, &marked);
        let res = find_all_marked(&o, k, Some(lambda), 0.3, &mut rng, &config).unwrap();
        assert!(!res.fallback);
        for &i in &res.indices {
            assert!(o.peek(i));
        }
    }

    #[test]
    fn budget_rule_picks_sweep_at_small_counts() {
        // at desk scale the log factor outweighs sqrt(2) for every lambda
        for k in [4u64, 16, 64, 256] {
            for lambda in [6.0, 16.0, lambda_star(k, 0.05)] {
                assert!(!interval_path_preferred(k, lambda, 0.05), "k={k} lambda={lambda}");
            }
        }
    }

    #[test]
    fn lambda_star_examples() {
        // small k: the first branch is tiny
        assert!(lambda_star(4, 0.05) < 6.0);
        // large k: well above the floor
        assert!(lambda_star(1 << 20, 0.05) > 6.0);
        // k = 64, rho = 0.05: k/log2(6k/rho) = 64/12.9 ~ 4.96
        assert!((lambda_star(64, 0.05) - 4.96).abs() < 0.01);
    }
}
