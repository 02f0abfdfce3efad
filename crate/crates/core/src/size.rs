//! Global size guard.
//!
//! Every operation that could blow up combinatorially checks its projected
//! work against a single configurable bound. The default of 10,000 morphisms
//! keeps the cubic associativity scan comfortably fast; `REEDY_LIMIT` (or the
//! CLI `--limit` flag, which calls [`set_limit`]) overrides it.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};

pub const DEFAULT_LIMIT: usize = 10_000;

static LIMIT: AtomicUsize = AtomicUsize::new(0);

/// Current limit; reads REEDY_LIMIT on first use.
pub fn limit() -> usize {
    let v = LIMIT.load(Ordering::Relaxed);
    if v != 0 {
        return v;
    }
    let v = std::env::var("REEDY_LIMIT")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or(DEFAULT_LIMIT);
    LIMIT.store(v, Ordering::Relaxed);
    v
}

pub fn set_limit(n: usize) {
    LIMIT.store(n.max(1), Ordering::Relaxed);
}

pub fn check(what: &str, requested: usize) -> Result<()> {
    let limit = limit();
    if requested > limit {
        Err(Error::SizeLimit {
            what: what.to_string(),
            requested,
            limit,
        })
    } else {
        Ok(())
    }
}
