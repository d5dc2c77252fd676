//! Parameter sweeps: a key=value grid file expands to a cartesian product of
//! cells, each run for a number of independent trials in parallel.
//!
//! Grid keys take comma-separated lists; `lambda` and `p` accept `auto`.
//! Seeds are derived per (cell, trial) so any single record can be replayed.

use std::path::PathBuf;

use rayon::prelude::*;

use qsearch_core::grover::{Backend, GroverConfig};
use qsearch_core::counting::estimate_k_32;
use qsearch_core::multifind::find_all_marked;
use qsearch_core::summing::{approx_sum, choose_params, ParamMode};
use qsearch_core::counting::mean_estimate_baseline;
use qsearch_core::{Error, FixedVector, Oracle, Rng};

use crate::instances::{load_oracle, load_vector, random_fixed_vector, random_oracle};
use crate::record::TrialRecord;

/// Algorithms the sweep engine can drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    /// Find all marked elements of a random `k`-subset instance.
    MultiFind,
    /// Estimate the marked count within a factor `[1/2, 3/2]`.
    Count,
    /// Approximate the sum of a random vector within relative error `delta`.
    ApproxSum,
    /// Maximum finding plus one amplitude estimation; the comparison point
    /// for the sum approximation's query scaling.
    SumBaseline,
}

impl Algorithm {
    pub fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "multifind" => Ok(Algorithm::MultiFind),
            "count" => Ok(Algorithm::Count),
            "approx-sum" => Ok(Algorithm::ApproxSum),
            "sum-baseline" => Ok(Algorithm::SumBaseline),
            other => Err(Error::Parse(format!("unknown algorithm {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::MultiFind => "multifind",
            Algorithm::Count => "count",
            Algorithm::ApproxSum => "approx-sum",
            Algorithm::SumBaseline => "sum-baseline",
        }
    }
}

/// A fully expanded sweep description.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub algorithm: Algorithm,
    pub n: Vec<u64>,
    pub k: Vec<u64>,
    pub rho: Vec<f64>,
    pub delta: Vec<f64>,
    /// `None` entries mean "pick the optimum".
    pub lambda: Vec<Option<f64>>,
    /// `None` entries mean "derive from (n, delta, rho, mode)".
    pub p: Vec<Option<f64>>,
    pub mode: ParamMode,
    pub trials: u64,
    pub seed: u64,
    pub backend: Backend,
    pub out: Option<PathBuf>,
    /// Fixed instance file replacing the random generator.
    pub input: Option<PathBuf>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            algorithm: Algorithm::MultiFind,
            n: vec![1024],
            k: vec![4],
            rho: vec![0.05],
            delta: vec![0.1],
            lambda: vec![None],
            p: vec![None],
            mode: ParamMode::QueryOptimal,
            trials: 100,
            seed: 0,
            backend: Backend::Rotation,
            out: None,
            input: None,
        }
    }
}

fn parse_list<T, F: Fn(&str) -> Result<T, Error>>(s: &str, f: F) -> Result<Vec<T>, Error> {
    s.split(',').map(|x| f(x.trim())).collect()
}

fn parse_u64(s: &str) -> Result<u64, Error> {
    s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}")))
}

fn parse_f64(s: &str) -> Result<f64, Error> {
    s.parse().map_err(|_| Error::Parse(format!("bad real {s:?}")))
}

fn parse_opt_f64(s: &str) -> Result<Option<f64>, Error> {
    if s == "auto" { Ok(None) } else { parse_f64(s).map(Some) }
}

pub fn parse_mode(s: &str) -> Result<ParamMode, Error> {
    match s {
        "query-optimal" => Ok(ParamMode::QueryOptimal),
        "simple" => Ok(ParamMode::Simple),
        other => Err(Error::Parse(format!("unknown mode {other:?}"))),
    }
}

pub fn parse_backend(s: &str) -> Result<Backend, Error> {
    match s {
        "rotation" => Ok(Backend::Rotation),
        "dense" => Ok(Backend::Dense),
        other => Err(Error::Parse(format!("unknown backend {other:?}"))),
    }
}

impl SweepSpec {
    /// Parse `key=value` lines; `#` starts a comment, blank lines are
    /// skipped, grid keys accept comma-separated lists.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut spec = SweepSpec::default();
        let mut saw_algorithm = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "algorithm" => {
                    spec.algorithm = Algorithm::parse(value)?;
                    saw_algorithm = true;
                }
                "n" => spec.n = parse_list(value, parse_u64)?,
                "k" => spec.k = parse_list(value, parse_u64)?,
                "rho" => spec.rho = parse_list(value, parse_f64)?,
                "delta" => spec.delta = parse_list(value, parse_f64)?,
                "lambda" => spec.lambda = parse_list(value, parse_opt_f64)?,
                "p" => spec.p = parse_list(value, parse_opt_f64)?,
                "mode" => spec.mode = parse_mode(value)?,
                "trials" => spec.trials = parse_u64(value)?,
                "seed" => spec.seed = parse_u64(value)?,
                "backend" => spec.backend = parse_backend(value)?,
                "out" => spec.out = Some(PathBuf::from(value)),
                "input" => spec.input = Some(PathBuf::from(value)),
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            }
        }
        if !saw_algorithm {
            return Err(Error::Parse("sweep file must set algorithm".into()));
        }
        Ok(spec)
    }
}

/// One grid point; fields not used by the algorithm stay `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub n: u64,
    pub k: Option<u64>,
    pub rho: f64,
    pub delta: Option<f64>,
    pub lambda: Option<f64>,
    pub p: Option<f64>,
}

/// Expand the grids into the cells the algorithm actually varies over.
pub fn expand_cells(spec: &SweepSpec) -> Vec<Cell> {
    let mut cells = Vec::new();
    for &n in &spec.n {
        for &rho in &spec.rho {
            match spec.algorithm {
                Algorithm::MultiFind => {
                    for &k in &spec.k {
                        for &lambda in &spec.lambda {
                            cells.push(Cell { n, k: Some(k), rho, delta: None, lambda, p: None });
                        }
                    }
                }
                Algorithm::Count => {
                    for &k in &spec.k {
                        cells.push(Cell { n, k: Some(k), rho, delta: None, lambda: None, p: None });
                    }
                }
                Algorithm::ApproxSum => {
                    for &delta in &spec.delta {
                        for &lambda in &spec.lambda {
                            for &p in &spec.p {
                                let chosen = choose_params(n, delta, rho, 1.0, spec.mode);
                                cells.push(Cell {
                                    n,
                                    k: None,
                                    rho,
                                    delta: Some(delta),
                                    lambda: lambda.or(chosen.lambda),
                                    p: Some(p.unwrap_or(chosen.p)),
                                });
                            }
                        }
                    }
                }
                Algorithm::SumBaseline => {
                    for &delta in &spec.delta {
                        cells.push(Cell { n, k: None, rho, delta: Some(delta), lambda: None, p: None });
                    }
                }
            }
        }
    }
    cells
}

fn multifind_trial(
    spec: &SweepSpec,
    cell: &Cell,
    rng: &mut Rng,
    config: &GroverConfig,
) -> Result<(u64, u64, bool, Option<f64>, Option<f64>), Error> {
    let k = cell.k.unwrap();
    let oracle = match &spec.input {
        Some(path) => load_oracle(path)?,
        None => random_oracle(cell.n, k, rng)?,
    };
    let truth = oracle.marked_indices();
    let k_est = truth.len().max(1) as u64;
    let res = find_all_marked(&oracle, k_est, cell.lambda, cell.rho, rng, config)?;
    let mut found = res.indices.clone();
    found.sort_unstable();
    let missed = truth.iter().filter(|i| !found.contains(i)).count();
    let spurious = found.iter().filter(|i| !truth.contains(i)).count();
    let snap = oracle.ledger().snapshot();
    Ok((
        snap.oracle_queries,
        snap.analytic_gates,
        missed == 0 && spurious == 0,
        Some(found.len() as f64),
        Some((missed + spurious) as f64),
    ))
}

fn count_trial(
    spec: &SweepSpec,
    cell: &Cell,
    rng: &mut Rng,
) -> Result<(u64, u64, bool, Option<f64>, Option<f64>), Error> {
    let k = cell.k.unwrap();
    let oracle = match &spec.input {
        Some(path) => load_oracle(path)?,
        None => random_oracle(cell.n, k, rng)?,
    };
    let truth = oracle.marked_count();
    let est = estimate_k_32(&oracle, cell.rho, rng)?;
    // within [k/2, 3k/2], checked without rounding
    let success = if truth == 0 { est == 0 } else { 2 * est >= truth && 2 * est <= 3 * truth };
    let snap = oracle.ledger().snapshot();
    Ok((snap.oracle_queries, snap.analytic_gates, success, Some(est as f64), Some(est as f64 - truth as f64)))
}

const VECTOR_BITS: u32 = 32;

fn sum_instance(spec: &SweepSpec, n: u64, rng: &mut Rng) -> Result<FixedVector, Error> {
    match &spec.input {
        Some(path) => load_vector(path, VECTOR_BITS),
        None => random_fixed_vector(n, VECTOR_BITS, rng),
    }
}

fn approx_sum_trial(
    spec: &SweepSpec,
    cell: &Cell,
    rng: &mut Rng,
    config: &GroverConfig,
) -> Result<(u64, u64, bool, Option<f64>, Option<f64>), Error> {
    let delta = cell.delta.unwrap();
    let v = sum_instance(spec, cell.n, rng)?;
    let truth = v.sum();
    let est = approx_sum(&v, delta, cell.p.unwrap(), cell.lambda, cell.rho, rng, config)?;
    let err = if truth > 0.0 { (est.value - truth) / truth } else { est.value };
    let snap = v.ledger().snapshot();
    Ok((snap.oracle_queries, snap.analytic_gates, err.abs() <= delta, Some(est.value), Some(err)))
}

fn sum_baseline_trial(
    spec: &SweepSpec,
    cell: &Cell,
    rng: &mut Rng,
    config: &GroverConfig,
) -> Result<(u64, u64, bool, Option<f64>, Option<f64>), Error> {
    let delta = cell.delta.unwrap();
    let v = sum_instance(spec, cell.n, rng)?;
    let truth = v.sum();
    let mean = mean_estimate_baseline(&v, delta, cell.rho, rng, config)?;
    let value = mean * cell.n as f64;
    let err = if truth > 0.0 { (value - truth) / truth } else { value };
    let snap = v.ledger().snapshot();
    Ok((snap.oracle_queries, snap.analytic_gates, err.abs() <= delta, Some(value), Some(err)))
}

/// Run one trial of `cell`; the seed fully determines the instance and the
/// algorithm's randomness.
pub fn run_trial(
    spec: &SweepSpec,
    cell: &Cell,
    cell_index: u64,
    trial: u64,
) -> Result<TrialRecord, Error> {
    let mut rng = Rng::for_trial(spec.seed, cell_index, trial);
    let seed = rng.seed();
    let config = GroverConfig { backend: spec.backend, ..GroverConfig::default() };
    let (queries, gates, success, value, error) = match spec.algorithm {
        Algorithm::MultiFind => multifind_trial(spec, cell, &mut rng, &config)?,
        Algorithm::Count => count_trial(spec, cell, &mut rng)?,
        Algorithm::ApproxSum => approx_sum_trial(spec, cell, &mut rng, &config)?,
        Algorithm::SumBaseline => sum_baseline_trial(spec, cell, &mut rng, &config)?,
    };
    Ok(TrialRecord {
        algorithm: spec.algorithm.name().into(),
        n: Some(cell.n),
        k: cell.k,
        rho: Some(cell.rho),
        delta: cell.delta,
        lambda: cell.lambda,
        p: cell.p,
        trial,
        seed,
        queries,
        analytic_gates: gates,
        success,
        value,
        error,
    })
}

/// Outcome of a full sweep: the records produced, plus a message per cell
/// whose parameters the algorithm rejected.
pub struct SweepOutcome {
    pub records: Vec<TrialRecord>,
    pub cell_errors: Vec<String>,
}

/// Run every cell for `spec.trials` trials, trials in parallel. A cell whose
/// first trial reports a precondition error is skipped and reported rather
/// than aborting the sweep.
pub fn run_sweep(spec: &SweepSpec) -> SweepOutcome {
    let cells = expand_cells(spec);
    let mut records = Vec::new();
    let mut cell_errors = Vec::new();
    for (ci, cell) in cells.iter().enumerate() {
        let results: Vec<Result<TrialRecord, Error>> = (0..spec.trials)
            .into_par_iter()
            .map(|t| run_trial(spec, cell, ci as u64, t))
            .collect();
        for (t, res) in results.into_iter().enumerate() {
            match res {
                Ok(rec) => records.push(rec),
                Err(e) => {
                    cell_errors.push(format!("cell {cell:?} trial {t}: {e}"));
                    break;
                }
            }
        }
    }
    SweepOutcome { records, cell_errors }
}
