//! Statistical test helpers shared by the verification harness and the tests.
//!
//! Guarantees in this artifact are probabilistic; the falsifiable desk-scale
//! form is a binomial confidence band, a chi-square test, or a log-log
//! regression slope. Every helper reports its sample size alongside the
//! verdict so no check is a bare pass.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Result of a binomial rate check against a required minimum.
#[derive(Debug, Clone)]
pub struct RateCheck {
    pub successes: u64,
    pub trials: u64,
    pub observed: f64,
    /// Required rate after the 3-sigma slack.
    pub threshold: f64,
    pub pass: bool,
}

/// Check `successes/trials >= p_min - 3 sigma` with the binomial sigma at `p_min`.
pub fn rate_at_least(successes: u64, trials: u64, p_min: f64) -> RateCheck {
    let sigma = (p_min * (1.0 - p_min) / trials as f64).sqrt();
    let threshold = p_min - 3.0 * sigma;
    let observed = successes as f64 / trials as f64;
    RateCheck {
        successes,
        trials,
        observed,
        threshold,
        pass: observed >= threshold,
    }
}

/// Check `failures/trials <= p_max + 3 sigma`.
pub fn rate_at_most(failures: u64, trials: u64, p_max: f64) -> RateCheck {
    let sigma = (p_max * (1.0 - p_max) / trials as f64).sqrt();
    let threshold = p_max + 3.0 * sigma;
    let observed = failures as f64 / trials as f64;
    RateCheck {
        successes: failures,
        trials,
        observed,
        threshold,
        pass: observed <= threshold,
    }
}

/// Chi-square goodness-of-fit p-value for observed counts vs uniform cells.
pub fn chi2_uniform_pvalue(counts: &[u64]) -> f64 {
    let n: u64 = counts.iter().sum();
    let cells = counts.len();
    assert!(cells >= 2, "need at least two cells");
    let expected = n as f64 / cells as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let dist = ChiSquared::new((cells - 1) as f64).expect("dof >= 1");
    1.0 - dist.cdf(stat)
}

/// Chi-square test against arbitrary expected probabilities.
pub fn chi2_pvalue(counts: &[u64], probs: &[f64]) -> f64 {
    assert_eq!(counts.len(), probs.len());
    let n: u64 = counts.iter().sum();
    let stat: f64 = counts
        .iter()
        .zip(probs)
        .map(|(&c, &p)| {
            let e = n as f64 * p;
            let d = c as f64 - e;
            d * d / e
        })
        .sum();
    let dist = ChiSquared::new((counts.len() - 1) as f64).expect("dof >= 1");
    1.0 - dist.cdf(stat)
}

/// Least-squares slope of `y` on `x`.
pub fn regression_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Slope of `log(y)` against `log(x)`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    regression_slope(&lx, &ly)
}

/// Empirical mutual information (bits) between two discretized variables,
/// given a joint contingency table indexed `[x][y]`.
pub fn mutual_information_bits(joint: &[Vec<u64>]) -> f64 {
    let n: u64 = joint.iter().flatten().sum();
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let rows: Vec<f64> = joint.iter().map(|r| r.iter().sum::<u64>() as f64).collect();
    let cols_len = joint[0].len();
    let mut cols = vec![0f64; cols_len];
    for r in joint {
        for (j, &c) in r.iter().enumerate() {
            cols[j] += c as f64;
        }
    }
    let mut mi = 0.0;
    for (i, r) in joint.iter().enumerate() {
        for (j, &c) in r.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let pxy = c as f64 / nf;
            mi += pxy * (pxy * nf * nf / (rows[i] * cols[j])).log2();
        }
    }
    mi
}
