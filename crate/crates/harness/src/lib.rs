//! Sweep, verification, and CSV plumbing for the search and summing demos.

pub mod instances;
pub mod record;
pub mod sweep;
pub mod verify;
