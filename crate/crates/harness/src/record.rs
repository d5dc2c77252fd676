//! Trial records and their CSV form.

use std::io::{Read, Write};

use qsearch_core::Error;

/// CSV column order; fields that do not apply to an algorithm stay empty.
pub const HEADER: [&str; 14] = [
    "algorithm",
    "N",
    "k",
    "rho",
    "delta",
    "lambda",
    "p",
    "trial",
    "seed",
    "queries",
    "analytic_gates",
    "success",
    "value",
    "error",
];

/// One Monte Carlo run's outcome. Reproducible: re-running with the same
/// seed yields an identical record.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub algorithm: String,
    pub n: Option<u64>,
    pub k: Option<u64>,
    pub rho: Option<f64>,
    pub delta: Option<f64>,
    pub lambda: Option<f64>,
    pub p: Option<f64>,
    pub trial: u64,
    pub seed: u64,
    pub queries: u64,
    pub analytic_gates: u64,
    pub success: bool,
    /// Estimate produced by the trial, when the algorithm yields one.
    pub value: Option<f64>,
    /// Deviation from the classically computed ground truth.
    pub error: Option<f64>,
}

fn opt_u64(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl TrialRecord {
    fn to_fields(&self) -> [String; 14] {
        [
            self.algorithm.clone(),
            opt_u64(self.n),
            opt_u64(self.k),
            opt_f64(self.rho),
            opt_f64(self.delta),
            opt_f64(self.lambda),
            opt_f64(self.p),
            self.trial.to_string(),
            self.seed.to_string(),
            self.queries.to_string(),
            self.analytic_gates.to_string(),
            self.success.to_string(),
            opt_f64(self.value),
            opt_f64(self.error),
        ]
    }

    fn from_fields(fields: &csv::StringRecord) -> Result<Self, Error> {
        if fields.len() != HEADER.len() {
            return Err(Error::Parse(format!("expected {} fields", HEADER.len())));
        }
        let u = |i: usize| -> Result<Option<u64>, Error> {
            let s = &fields[i];
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| Error::Parse(format!("bad integer {s:?}")))
            }
        };
        let f = |i: usize| -> Result<Option<f64>, Error> {
            let s = &fields[i];
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| Error::Parse(format!("bad real {s:?}")))
            }
        };
        let req = |v: Option<u64>, name: &str| {
            v.ok_or_else(|| Error::Parse(format!("missing {name}")))
        };
        Ok(TrialRecord {
            algorithm: fields[0].to_string(),
            n: u(1)?,
            k: u(2)?,
            rho: f(3)?,
            delta: f(4)?,
            lambda: f(5)?,
            p: f(6)?,
            trial: req(u(7)?, "trial")?,
            seed: req(u(8)?, "seed")?,
            queries: req(u(9)?, "queries")?,
            analytic_gates: req(u(10)?, "analytic_gates")?,
            success: fields[11]
                .parse()
                .map_err(|_| Error::Parse("bad success flag".into()))?,
            value: f(12)?,
            error: f(13)?,
        })
    }
}

/// Write records as RFC-4180 CSV with the fixed header.
pub fn emit_csv<W: Write>(out: W, records: &[TrialRecord]) -> Result<(), Error> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record(&r.to_fields()).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

/// Parse a CSV file produced by [`emit_csv`].
pub fn parse_csv<R: Read>(input: R) -> Result<Vec<TrialRecord>, Error> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers().map_err(csv_err)?.clone();
    if header.iter().ne(HEADER) {
        return Err(Error::Parse("unexpected CSV header".into()));
    }
    reader
        .records()
        .map(|row| TrialRecord::from_fields(&row.map_err(csv_err)?))
        .collect()
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}
