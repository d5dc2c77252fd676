//! Reference implementation of quantum search, counting, and summing
//! algorithms with exact oracle-query accounting.
//!
//! Quantum subroutines are simulated semantically: a Grover run is resolved
//! through the closed-form two-dimensional rotation picture and the trial
//! ledger is charged exactly as if the quantum algorithm had executed. A
//! dense statevector backend exists as an independent cross-check for small
//! domains. On top of the simulation sit the search and estimation
//! algorithms: exact Grover search, expected-time search, bounded-error
//! search, amplitude estimation, approximate counting, finding all marked
//! elements, quantile estimation, and multiplicative sum approximation.
//!
//! The closed-form math layer is generic over the scalar type through
//! [`scalar::Scalar`]; the Monte Carlo engine and the algorithms are pinned
//! to `f64`.

pub mod analysis;
pub mod counting;
pub mod error;
pub mod grover;
pub mod ledger;
pub mod multifind;
pub mod oracle;
pub mod qsim;
pub mod rng;
pub mod scalar;
pub mod stats;
pub mod summing;

pub use error::Error;
pub use ledger::{LedgerHandle, QueryLedger};
pub use oracle::{BitStringOracle, FixedKey, FixedVector, Oracle};
pub use rng::Rng;
pub use scalar::Real;
