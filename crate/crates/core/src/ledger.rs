//! Exact query accounting.
//!
//! Oracle queries are the complexity currency: every (controlled) application
//! of an oracle unitary or its inverse counts one. Gate costs are not obtained
//! from circuit synthesis; they are charged analytically from the known
//! per-operation asymptotics, with an explicit constant `c_gate`.

use std::cell::RefCell;
use std::rc::Rc;

/// Counters for one trial. Monotone within a trial; reset between trials.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueryLedger {
    pub oracle_queries: u64,
    pub analytic_gates: u64,
}

/// Shared handle to a trial's root ledger. Derived oracles keep a clone so all
/// charges aggregate at the root. Confined to one trial's thread.
#[derive(Debug, Clone)]
pub struct LedgerHandle {
    inner: Rc<RefCell<QueryLedger>>,
    /// Multiplier for analytic gate charges.
    pub c_gate: f64,
}

impl Default for LedgerHandle {
    fn default() -> Self {
        Self::new(1.0)
    }
}

impl LedgerHandle {
    pub fn new(c_gate: f64) -> Self {
        LedgerHandle {
            inner: Rc::new(RefCell::new(QueryLedger::default())),
            c_gate,
        }
    }

    pub fn charge_queries(&self, n: u64) {
        self.inner.borrow_mut().oracle_queries += n;
    }

    /// Charge `amount` gates, scaled by `c_gate` and rounded.
    pub fn charge_gates(&self, amount: f64) {
        debug_assert!(amount >= 0.0);
        self.inner.borrow_mut().analytic_gates += (self.c_gate * amount).round() as u64;
    }

    pub fn queries(&self) -> u64 {
        self.inner.borrow().oracle_queries
    }

    pub fn gates(&self) -> u64 {
        self.inner.borrow().analytic_gates
    }

    pub fn snapshot(&self) -> QueryLedger {
        self.inner.borrow().clone()
    }

    pub fn reset(&self) {
        *self.inner.borrow_mut() = QueryLedger::default();
    }
}
