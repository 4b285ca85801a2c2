//! Process-wide numerical tolerances.
//!
//! `herm` bounds validity checks (hermiticity, trace, positivity, completeness)
//! and `eig` bounds spectral residuals. Both can be overridden at start-up.

use std::sync::atomic::{AtomicU64, Ordering};

pub const DEFAULT_HERM: f64 = 1e-9;
pub const DEFAULT_EIG: f64 = 1e-10;

static HERM: AtomicU64 = AtomicU64::new(DEFAULT_HERM.to_bits());
static EIG: AtomicU64 = AtomicU64::new(DEFAULT_EIG.to_bits());

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub herm: f64,
    pub eig: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            herm: DEFAULT_HERM,
            eig: DEFAULT_EIG,
        }
    }
}

pub fn tolerances() -> Tolerances {
    Tolerances {
        herm: herm(),
        eig: eig(),
    }
}

/// Replaces the global tolerances. Non-positive or non-finite values are ignored.
pub fn set_tolerances(t: Tolerances) {
    if t.herm.is_finite() && t.herm > 0.0 {
        HERM.store(t.herm.to_bits(), Ordering::Relaxed);
    }
    if t.eig.is_finite() && t.eig > 0.0 {
        EIG.store(t.eig.to_bits(), Ordering::Relaxed);
    }
}

#[inline]
pub fn herm() -> f64 {
    f64::from_bits(HERM.load(Ordering::Relaxed))
}

#[inline]
pub fn eig() -> f64 {
    f64::from_bits(EIG.load(Ordering::Relaxed))
}
