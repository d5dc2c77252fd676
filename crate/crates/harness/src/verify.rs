//! Verification suites: invariant checks and Monte Carlo acceptance tests
//! for every probabilistic or complexity claim the algorithms make.
//!
//! Every statistical verdict reports its sample size and confidence band;
//! exact claims are checked exhaustively and hard-fail on any counterexample.

use rayon::prelude::*;

use qsearch_core::analysis::{
    coupon_budget, geo_tail_threshold, harmonic_bounds_check, query_budget, run_length_bound,
    BudgetLabel,
};
use qsearch_core::counting::estimate_k_32;
use qsearch_core::grover::{certainty_iterations, grover_certainty, GroverConfig};
use qsearch_core::multifind::{find_all_marked, grover_coupon, lambda_star};
use qsearch_core::oracle::{
    band_oracle, mask_found, restrict_interval, threshold_oracle, Cmp, SortedIndexList,
};
use qsearch_core::qsim::QpeSampler;
use qsearch_core::stats::{self, RateCheck};
use qsearch_core::summing::ParamMode;
use qsearch_core::{BitStringOracle, Error, LedgerHandle, Oracle, Rng};

use crate::instances::random_oracle;
use crate::sweep::{run_sweep, Algorithm, SweepSpec};

/// One named verdict with the evidence behind it.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check { name: name.into(), pass, detail: detail.into() }
    }

    fn from_rate(name: impl Into<String>, rc: &RateCheck, direction: &str) -> Self {
        Check::new(
            name,
            rc.pass,
            format!(
                "{}/{} = {:.4} {direction} {:.4} (3-sigma band)",
                rc.successes, rc.trials, rc.observed, rc.threshold
            ),
        )
    }
}

/// Suites addressable from the command line.
pub const SUITES: [&str; 8] = [
    "harmonic",
    "tails",
    "run_length",
    "ampest",
    "grover_exact",
    "coupon",
    "multifind",
    "summing",
];

/// Run one named suite at full acceptance-scale sample sizes.
pub fn run_suite(suite: &str, seed: u64) -> Result<Vec<Check>, Error> {
    match suite {
        "harmonic" => Ok(check_harmonic()),
        "tails" => Ok(check_tails()),
        "run_length" => Ok(check_run_length()),
        "ampest" => Ok(check_ampest(seed, 100_000)),
        "grover_exact" => Ok(check_grover_exact(seed)),
        "coupon" => Ok(check_coupon(seed, 10_000)),
        "multifind" => Ok(check_multifind(seed, 2000)),
        "summing" => Ok(check_summing(seed, 2000)),
        other => Err(Error::Parse(format!("unknown suite {other:?}"))),
    }
}

fn binomial_u128(n: u64, r: u64) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Harmonic-number brackets, exhaustively on small `k` and strided beyond.
pub fn check_harmonic() -> Vec<Check> {
    let mut failures = 0u64;
    let mut total = 0u64;
    let mut check_pair = |k: u64, t: u64| {
        let (a, b, c) = harmonic_bounds_check(k, t);
        total += 1;
        if !(a && b && c) {
            failures += 1;
        }
    };
    for k in 1..=10_000u64 {
        for t in [0, k / 3, k / 2, k.saturating_sub(1)] {
            check_pair(k, t);
        }
    }
    for k in (10_000..=1_000_000u64).step_by(997) {
        check_pair(k, k / 3);
    }
    vec![Check::new(
        "harmonic brackets (gamma band, difference bound, half-set bound)",
        failures == 0,
        format!("{failures} failures over {total} (k, t) pairs, exact evaluation"),
    )]
}

/// Exact geometric-sum tails never exceed the analytic threshold: for `X` a
/// sum of `k` i.i.d. geometrics with success probability `p`,
/// `Pr[X >= T(mu, p, rho)] <= rho` on a grid, by exact negative-binomial
/// tail evaluation.
pub fn check_tails() -> Vec<Check> {
    let mut failures = 0u64;
    let mut total = 0u64;
    let mut worst: f64 = 0.0;
    for k in [1u64, 2, 5, 10, 20, 50] {
        for p in [0.05f64, 0.1, 0.3, 0.5, 0.9] {
            for rho in [0.1f64, 0.01] {
                total += 1;
                let mu = k as f64 / p;
                let threshold = geo_tail_threshold(mu, p, rho);
                let m = threshold.ceil() as u64;
                // cdf of the sum up to m - 1 via the pmf recurrence
                let mut pmf = p.powi(k as i32);
                let mut cdf = 0.0;
                for j in k..m {
                    cdf += pmf;
                    pmf *= (1.0 - p) * j as f64 / (j + 1 - k) as f64;
                }
                let tail = (1.0 - cdf).max(0.0);
                worst = worst.max(tail / rho);
                if tail > rho + 1e-12 {
                    failures += 1;
                }
            }
        }
    }
    vec![Check::new(
        "geometric-sum tail threshold dominates the exact tail",
        failures == 0,
        format!("{failures} failures over {total} (k, p, rho) cells; worst tail/rho = {worst:.3}"),
    )]
}

/// Count of ways to place `zeros` items into `gaps` slots, each at most
/// `cap`, by dynamic programming.
fn bounded_compositions(zeros: u64, gaps: u64, cap: u64) -> u128 {
    let mut ways = vec![0u128; zeros as usize + 1];
    ways[0] = 1;
    for _ in 0..gaps {
        let mut next = vec![0u128; zeros as usize + 1];
        for z in 0..=zeros as usize {
            if ways[z] == 0 {
                continue;
            }
            for add in 0..=cap.min(zeros - z as u64) as usize {
                next[z + add] += ways[z];
            }
        }
        ways = next;
    }
    ways[zeros as usize]
}

/// Exact probability that the complement of a uniform `t`-subset of `[k]`
/// contains a run of `ell` consecutive elements, checked against its union
/// bound for every valid triple with `k <= 32`.
pub fn check_run_length() -> Vec<Check> {
    let mut failures = 0u64;
    let mut total = 0u64;
    for k in 2..=32u64 {
        for t in 1..k {
            for ell in 1..=(k - t) {
                total += 1;
                let all = binomial_u128(k, t);
                // arrangements whose zero runs are all shorter than ell
                let ok = bounded_compositions(k - t, t + 1, ell - 1);
                let exact = 1.0 - ok as f64 / all as f64;
                let bound: f64 = run_length_bound(k, t, ell);
                if exact > bound + 1e-12 {
                    failures += 1;
                }
            }
        }
    }
    vec![Check::new(
        "long-run probability is below its union bound",
        failures == 0,
        format!("{failures} failures over {total} exact (k, t, ell) triples, k <= 32"),
    )]
}

/// Certainty-variant search: success probability exactly 1 when the marked
/// count is known, plus a dense statevector cross-check of the scaled-start
/// amplification at small sizes.
pub fn check_grover_exact(seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();

    let mut failures = 0u64;
    let mut miscounts = 0u64;
    let mut total = 0u64;
    for (ci, e) in (3..=12u32).enumerate() {
        let n = 1u64 << e;
        for trial in 0..20u64 {
            let mut rng = Rng::for_trial(seed, ci as u64, trial);
            let k = 1 + rng.below(n);
            let oracle = random_oracle(n, k, &mut rng).unwrap();
            let out = grover_certainty(&oracle, k, &mut rng).unwrap();
            total += 1;
            if !out.marked {
                failures += 1;
            }
            if out.queries_used != certainty_iterations(n, k) + 1
                || oracle.ledger().queries() != out.queries_used
            {
                miscounts += 1;
            }
        }
    }
    checks.push(Check::new(
        "known-count search succeeds on every trial",
        failures == 0,
        format!("{failures} failures over {total} (N, k) pairs, N in 2^3..2^12"),
    ));
    checks.push(Check::new(
        "known-count search charges exactly m + 1 queries",
        miscounts == 0,
        format!("{miscounts} ledger mismatches over {total} runs"),
    ));

    // dense cross-check: simulate the scaled-start amplification literally
    let mut worst_gap: f64 = 0.0;
    let mut cells = 0u64;
    for e in 3..=8u32 {
        let n = 1u64 << e;
        for k in [1, 2, n / 4, n / 2, n - 1, n] {
            if k < 1 || k > n {
                continue;
            }
            cells += 1;
            let m = certainty_iterations(n, k);
            let target = (std::f64::consts::PI / (2.0 * (2 * m + 1) as f64)).sin().powi(2);
            let scale = (target / (k as f64 / n as f64)).min(1.0);
            let good = (scale / n as f64).sqrt();
            let bad = if k == n {
                0.0
            } else {
                ((1.0 - scale * k as f64 / n as f64) / (n - k) as f64).sqrt()
            };
            let psi: Vec<f64> =
                (0..n).map(|i| if i < k { good } else { bad }).collect();
            let mut state = psi.clone();
            for _ in 0..m {
                for a in state[..k as usize].iter_mut() {
                    *a = -*a;
                }
                let overlap: f64 = psi.iter().zip(&state).map(|(a, b)| a * b).sum();
                for (s, p) in state.iter_mut().zip(&psi) {
                    *s = 2.0 * overlap * p - *s;
                }
            }
            let p_marked: f64 = state[..k as usize].iter().map(|a| a * a).sum();
            worst_gap = worst_gap.max((1.0 - p_marked).abs());
        }
    }
    checks.push(Check::new(
        "dense statevector cross-check lands on the marked subspace",
        worst_gap <= 1e-9,
        format!("worst |1 - P[marked]| = {worst_gap:.2e} over {cells} (N, k) cells, N <= 256"),
    ));
    checks
}

/// Phase-estimation error bound `|a~ - a| <= 2 pi sqrt(a(1-a))/M + pi^2/M^2`
/// holds with probability at least `8/pi^2` on a grid of amplitudes.
pub fn check_ampest(seed: u64, samples: u64) -> Vec<Check> {
    let amplitudes = [0.01f64, 0.1, 0.3, 0.5, 0.9];
    let ms = [16u64, 64, 256];
    let cells: Vec<(f64, u64)> = amplitudes
        .iter()
        .flat_map(|&a| ms.iter().map(move |&m| (a, m)))
        .collect();
    let p_min = 8.0 / (std::f64::consts::PI * std::f64::consts::PI);
    cells
        .par_iter()
        .enumerate()
        .map(|(ci, &(a, m))| {
            let sampler = QpeSampler::new(a, m).unwrap();
            let bound = 2.0 * std::f64::consts::PI * (a * (1.0 - a)).sqrt() / m as f64
                + std::f64::consts::PI.powi(2) / (m * m) as f64;
            let mut rng = Rng::for_trial(seed, ci as u64, 0);
            let mut hits = 0u64;
            for _ in 0..samples {
                let y = sampler.sample(&mut rng);
                let est = QpeSampler::estimate(y, m);
                if (est - a).abs() <= bound {
                    hits += 1;
                }
            }
            let rc = stats::rate_at_least(hits, samples, p_min);
            Check::from_rate(format!("amplitude estimate within bound, a={a}, M={m}"), &rc, ">=")
        })
        .collect()
}

/// Factor-3/2 counting: containment `k_est in [k/2, 3k/2]` at the claimed
/// rate, and exact zero on empty instances.
pub fn check_count(seed: u64, trials: u64) -> Vec<Check> {
    let n = 4096u64;
    let rho = 0.05f64;
    let mut checks = Vec::new();
    for (ci, &k) in [0u64, 1, 64, 2048].iter().enumerate() {
        let hits: u64 = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = Rng::for_trial(seed, ci as u64, t);
                let oracle = random_oracle(n, k, &mut rng).unwrap();
                let est = estimate_k_32(&oracle, rho, &mut rng).unwrap();
                let ok = if k == 0 { est == 0 } else { 2 * est >= k && 2 * est <= 3 * k };
                u64::from(ok)
            })
            .sum();
        if k == 0 {
            checks.push(Check::new(
                "count of an empty set is exactly zero",
                hits == trials,
                format!("{hits}/{trials} exact zeros (hard)"),
            ));
        } else {
            let rc = stats::rate_at_least(hits, trials, 1.0 - rho);
            checks.push(Check::from_rate(
                format!("count within [k/2, 3k/2], N={n}, k={k}"),
                &rc,
                ">=",
            ));
        }
    }
    checks
}

fn combinadic_rank(positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .map(|(i, &p)| binomial_u128(p as u64, i as u64 + 1) as usize)
        .sum()
}

/// Coupon collection: the analytic round budget suffices at rate `1 - rho`,
/// and the collected subsets are uniform.
pub fn check_coupon(seed: u64, trials: u64) -> Vec<Check> {
    let n = 1024u64;
    let config = GroverConfig::default();
    let mut checks = Vec::new();
    let cells: Vec<(u64, u64, f64)> = [8u64, 32]
        .iter()
        .flat_map(|&k| {
            [k / 4, k / 2]
                .into_iter()
                .flat_map(move |t| [0.1f64, 0.01].into_iter().map(move |rho| (k, t, rho)))
        })
        .collect();
    for (ci, &(k, t, rho)) in cells.iter().enumerate() {
        let budget = coupon_budget::<f64>(t, k, rho).ceil() as u64;
        let results: Vec<(bool, Vec<usize>)> = (0..trials)
            .into_par_iter()
            .map(|trial| {
                let mut rng = Rng::for_trial(seed, ci as u64, trial);
                let oracle = random_oracle(n, k, &mut rng).unwrap();
                let marked = oracle.marked_indices();
                let (found, _rounds) =
                    grover_coupon(&oracle, k, t, budget, &mut rng, &config).unwrap();
                let positions: Vec<usize> = found
                    .as_slice()
                    .iter()
                    .map(|i| marked.binary_search(i).unwrap())
                    .collect();
                (found.len() as u64 >= t, positions)
            })
            .collect();
        let failures = results.iter().filter(|(ok, _)| !ok).count() as u64;
        let rc = stats::rate_at_most(failures, trials, rho);
        checks.push(Check::from_rate(
            format!("round budget R={budget} collects t={t} of k={k} coupons, rho={rho}"),
            &rc,
            "<=",
        ));
        if rho == 0.1 {
            // uniformity of the collected subsets among size-t subsets of
            // the marked set: full subset categories when small, otherwise
            // the distribution of the smallest collected position
            let pvalue = if binomial_u128(k, t) <= 128 {
                let cats = binomial_u128(k, t) as usize;
                let mut counts = vec![0u64; cats];
                for (ok, pos) in &results {
                    if *ok {
                        counts[combinadic_rank(pos)] += 1;
                    }
                }
                stats::chi2_uniform_pvalue(&counts)
            } else {
                let total = binomial_u128(k, t) as f64;
                let cats = (k - t + 1) as usize;
                let probs: Vec<f64> = (0..cats)
                    .map(|i| binomial_u128(k - 1 - i as u64, t - 1) as f64 / total)
                    .collect();
                let mut counts = vec![0u64; cats];
                for (ok, pos) in &results {
                    if *ok {
                        counts[pos[0]] += 1;
                    }
                }
                stats::chi2_pvalue(&counts, &probs)
            };
            checks.push(Check::new(
                format!("collected subsets uniform, k={k}, t={t}"),
                pvalue > 0.001,
                format!(
                    "chi-square p = {pvalue:.4} over {} successful trials, significance 0.001",
                    results.iter().filter(|(ok, _)| *ok).count()
                ),
            ));
        }
    }
    checks
}

/// Find-all-marked at acceptance scale: failure rate, hard soundness, query
/// scaling in `k`, and a fitted-constant comparison to the analytic budget.
pub fn check_multifind(seed: u64, trials: u64) -> Vec<Check> {
    let n = 1u64 << 16;
    let rho = 0.05f64;
    let ks = [4u64, 16, 64, 256];
    let config = GroverConfig::default();
    let mut checks = Vec::new();
    // the two parameter regimes: the query-optimal lambda and the fixed
    // small lambda of the gate-lean variant
    for (ri, regime) in ["optimal", "fixed"].iter().enumerate() {
        let mut mean_queries = Vec::new();
        let mut all_ratios: Vec<f64> = Vec::new();
        let mut unsound_total = 0u64;
        for (ki, &k) in ks.iter().enumerate() {
            let lambda = match *regime {
                "optimal" => lambda_star(k, rho),
                _ => 6.0,
            };
            let cell = (ri * ks.len() + ki) as u64;
            let results: Vec<(bool, bool, u64)> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = Rng::for_trial(seed, cell, t);
                    let oracle = random_oracle(n, k, &mut rng).unwrap();
                    let truth = oracle.marked_indices();
                    let res =
                        find_all_marked(&oracle, k, Some(lambda), rho, &mut rng, &config).unwrap();
                    let mut found = res.indices.clone();
                    found.sort_unstable();
                    let sound = found.iter().all(|i| truth.binary_search(i).is_ok());
                    let complete = sound && found.len() == truth.len();
                    (sound, complete, oracle.ledger().queries())
                })
                .collect();
            let unsound = results.iter().filter(|r| !r.0).count() as u64;
            let failures = results.iter().filter(|r| !r.1).count() as u64;
            unsound_total += unsound;
            let rc = stats::rate_at_most(failures, trials, rho);
            checks.push(Check::from_rate(
                format!("find-all failure rate, k={k}, lambda regime {regime}"),
                &rc,
                "<=",
            ));
            let mean =
                results.iter().map(|r| r.2 as f64).sum::<f64>() / trials as f64;
            mean_queries.push(mean);
            let budget = query_budget(BudgetLabel::MultipleFast {
                n: n as f64,
                k: k as f64,
                rho,
                lambda,
            })
            .queries;
            all_ratios.extend(results.iter().map(|r| r.2 as f64 / budget));
        }
        checks.push(Check::new(
            format!("find-all soundness hard, lambda regime {regime}"),
            unsound_total == 0,
            format!("{unsound_total} unsound trials over {}", trials * ks.len() as u64),
        ));
        let xs: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
        let slope = stats::log_log_slope(&xs, &mean_queries);
        checks.push(Check::new(
            format!("find-all query slope in k, lambda regime {regime}"),
            (slope - 0.5).abs() <= 0.1,
            format!(
                "slope {slope:.3} over k = {ks:?} at N = {n}, target 0.5 +/- 0.1, {} trials/cell",
                trials
            ),
        ));
        let fitted = (all_ratios.iter().map(|r| r.ln()).sum::<f64>()
            / all_ratios.len() as f64)
            .exp();
        let spread = all_ratios
            .iter()
            .map(|r| (r / fitted).max(fitted / r))
            .fold(0.0f64, f64::max);
        checks.push(Check::new(
            format!("per-trial queries track the analytic budget, lambda regime {regime}"),
            spread <= 10.0,
            format!(
                "fitted constant {fitted:.3}, worst deviation {spread:.2}x over {} trials (<= 10x)",
                all_ratios.len()
            ),
        ));
    }
    checks
}

/// Sum approximation at acceptance scale: error rate, square-root scaling in
/// `1/delta`, and the linear scaling of the maximum-based baseline.
pub fn check_summing(seed: u64, trials: u64) -> Vec<Check> {
    let deltas = [0.2f64, 0.1, 0.05, 0.02];
    let inv: Vec<f64> = deltas.iter().map(|d| 1.0 / d).collect();
    let mut checks = Vec::new();
    for mode in [ParamMode::QueryOptimal, ParamMode::Simple] {
        let name = match mode {
            ParamMode::QueryOptimal => "query-optimal",
            ParamMode::Simple => "simple",
        };
        let spec = SweepSpec {
            algorithm: Algorithm::ApproxSum,
            n: vec![4096],
            delta: deltas.to_vec(),
            rho: vec![0.05],
            mode,
            trials,
            seed,
            ..SweepSpec::default()
        };
        let out = run_sweep(&spec);
        if !out.cell_errors.is_empty() {
            checks.push(Check::new(
                format!("sum sweep runs, mode {name}"),
                false,
                out.cell_errors.join("; "),
            ));
            continue;
        }
        let mut means = Vec::new();
        for &delta in &deltas {
            let cell: Vec<_> =
                out.records.iter().filter(|r| r.delta == Some(delta)).collect();
            let hits = cell.iter().filter(|r| r.success).count() as u64;
            if delta == 0.1 || delta == 0.02 {
                let rc = stats::rate_at_least(hits, cell.len() as u64, 0.95);
                checks.push(Check::from_rate(
                    format!("sum within delta={delta}, mode {name}"),
                    &rc,
                    ">=",
                ));
            }
            means.push(cell.iter().map(|r| r.queries as f64).sum::<f64>() / cell.len() as f64);
        }
        let slope = stats::log_log_slope(&inv, &means);
        checks.push(Check::new(
            format!("sum query slope in 1/delta, mode {name}"),
            (slope - 0.5).abs() <= 0.1,
            format!(
                "slope {slope:.3} over delta = {deltas:?}, target 0.5 +/- 0.1, {trials} trials/cell"
            ),
        ));
    }

    // baseline on the same instances: maximum finding plus one amplitude
    // estimation scales linearly in 1/delta
    let spec = SweepSpec {
        algorithm: Algorithm::SumBaseline,
        n: vec![4096],
        delta: deltas.to_vec(),
        rho: vec![0.05],
        trials,
        seed,
        ..SweepSpec::default()
    };
    let out = run_sweep(&spec);
    if !out.cell_errors.is_empty() {
        checks.push(Check::new("baseline sweep runs", false, out.cell_errors.join("; ")));
        return checks;
    }
    let means: Vec<f64> = deltas
        .iter()
        .map(|&d| {
            let cell: Vec<_> = out.records.iter().filter(|r| r.delta == Some(d)).collect();
            cell.iter().map(|r| r.queries as f64).sum::<f64>() / cell.len() as f64
        })
        .collect();
    let slope = stats::log_log_slope(&inv, &means);
    checks.push(Check::new(
        "baseline query slope in 1/delta",
        (slope - 1.0).abs() <= 0.1,
        format!(
            "slope {slope:.3} over delta = {deltas:?}, target 1.0 +/- 0.1, {trials} trials/cell"
        ),
    ));
    checks
}

/// Derived-oracle semantics reproduce their defining bit strings exactly:
/// masking zeroes the masked set, interval restriction keeps the interior
/// and pads with zeros, threshold and band views mark exactly the in-band
/// keys.
pub fn check_oracle_semantics(seed: u64) -> Vec<Check> {
    let mut failures = 0u64;
    let mut total = 0u64;

    // masking, exhaustively over all patterns at N = 8 and sampled at 64
    let mut patterns: Vec<Vec<bool>> =
        (0..256u32).map(|p| (0..8).map(|i| p >> i & 1 == 1).collect()).collect();
    let mut rng = Rng::new(seed ^ 0x5eed);
    for _ in 0..64 {
        patterns.push((0..64).map(|_| rng.chance(0.3)).collect());
    }
    for bits in &patterns {
        let oracle = BitStringOracle::new(bits.clone(), LedgerHandle::default()).unwrap();
        let marked = oracle.marked_indices();
        for prefix in 0..=marked.len() {
            let mut masked_set = SortedIndexList::new();
            for &j in &marked[..prefix] {
                masked_set.insert(j);
            }
            let masked = mask_found(&oracle, &masked_set).unwrap();
            for i in 1..=bits.len() as u64 {
                total += 1;
                let expect = bits[i as usize - 1] && !marked[..prefix].contains(&i);
                if masked.query(i).unwrap() != expect {
                    failures += 1;
                }
            }
        }
    }

    // interval restriction, all (lo, hi) over all patterns at N = 8
    for p in 0..256u32 {
        let bits: Vec<bool> = (0..8).map(|i| p >> i & 1 == 1).collect();
        let oracle = BitStringOracle::new(bits.clone(), LedgerHandle::default()).unwrap();
        for lo in 0..=8u64 {
            for hi in (lo + 2)..=9u64 {
                let interval = restrict_interval(&oracle, lo, hi).unwrap();
                for j in 1..=interval.domain_size() {
                    total += 1;
                    let i = lo + j;
                    let expect = i < hi && i <= 8 && bits[i as usize - 1];
                    if interval.query(j).unwrap() != expect {
                        failures += 1;
                    }
                }
            }
        }
    }

    // threshold and band views over a vector with ties, N = 64
    let mut rng = Rng::new(seed ^ 0xbead);
    let raw: Vec<u64> = (0..64).map(|_| rng.below(8)).collect();
    let v = qsearch_core::FixedVector::new(raw, 3, LedgerHandle::default()).unwrap();
    let mut keys: Vec<_> = (1..=64u64).map(|i| v.key(i)).collect();
    keys.push(qsearch_core::FixedKey::plain(0));
    for &z in &keys {
        let geq = threshold_oracle(&v, z);
        for i in 1..=geq.domain_size() {
            total += 1;
            let expect = i <= 64 && v.key(i) >= z;
            if geq.query(i).unwrap() != expect {
                failures += 1;
            }
        }
        for &u in &keys {
            let band = band_oracle(&v, Some((z, Cmp::Gt)), Some(u));
            for i in 1..=band.domain_size() {
                total += 1;
                let expect = i <= 64 && v.key(i) > z && v.key(i) < u;
                if band.query(i).unwrap() != expect {
                    failures += 1;
                }
            }
        }
    }

    vec![Check::new(
        "derived oracles reproduce their defining bit strings",
        failures == 0,
        format!("{failures} mismatches over {total} exhaustive queries, N <= 64"),
    )]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_all_pass(checks: &[Check]) {
        for c in checks {
            assert!(c.pass, "{}: {}", c.name, c.detail);
        }
    }

    #[test]
    fn harmonic_suite_passes() {
        assert_all_pass(&check_harmonic());
    }

    #[test]
    fn tails_suite_passes() {
        assert_all_pass(&check_tails());
    }

    #[test]
    fn run_length_suite_passes() {
        assert_all_pass(&check_run_length());
    }

    #[test]
    fn grover_exact_suite_passes() {
        assert_all_pass(&check_grover_exact(7));
    }

    #[test]
    fn oracle_semantics_suite_passes() {
        assert_all_pass(&check_oracle_semantics(7));
    }

    #[test]
    fn ampest_suite_passes_at_reduced_samples() {
        assert_all_pass(&check_ampest(7, 4000));
    }

    #[test]
    fn count_suite_passes_at_reduced_trials() {
        assert_all_pass(&check_count(7, 300));
    }

    #[test]
    fn coupon_suite_passes_at_reduced_trials() {
        assert_all_pass(&check_coupon(0, 1500));
    }

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite("bogus", 0).is_err());
    }
}
