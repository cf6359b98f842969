//! The three non-private constraint solvers: two-level quantization,
//! almost-sure boundedness via clipping, and convex integral constraints with
//! the second-moment closed form.
//!
//! Every solver returns a value that is a non-decreasing function of the
//! likelihood ratio on the grid; that shared structure is what lets the
//! composite module lift any of these solutions past the simple-vs-simple
//! setting.

mod bounded;
mod convex;
mod quantize;

pub use bounded::{solve_bounded, ClippedEVariable};
pub use convex::{
    solve_convex, solve_moment, ConvexConstrainedEVariable, ConvexPenalty, DualTolerances,
};
pub use quantize::{solve_quantized, TwoLevelEVariable};

use std::collections::BTreeMap;

use crate::dist::{GrowthReport, HypothesisPair};
use crate::error::Result;

/// A constrained e-variable that evaluates pointwise as a function of the
/// likelihood ratio.
pub trait ConstrainedEValue {
    /// E at a point with likelihood ratio `l`.
    fn value_of_lr(&self, l: f64) -> f64;

    /// Likelihood-ratio values where the map has a kink or jump; continuous
    /// integration splits at their x-preimages.
    fn lr_breaks(&self) -> Vec<f64> {
        Vec::new()
    }

    /// Solver-specific diagnostics merged into growth reports.
    fn extra_metrics(&self, _pair: &HypothesisPair) -> Result<Vec<(&'static str, f64)>> {
        Ok(Vec::new())
    }
}

/// Growth diagnostics: E_{P1}[log E], E_{P0}[E], and extras (always the
/// second moment, plus solver-specific entries).
///
/// E = 0 on a positive-alternative-mass point makes the growth -inf; that is
/// reported as a flagged value, not an error.
pub fn growth_rate<E: ConstrainedEValue + ?Sized>(
    ev: &E,
    pair: &HypothesisPair,
) -> Result<GrowthReport> {
    let breaks = ev.lr_breaks();
    let grid = pair.grid();
    let hits_zero = grid
        .lr
        .iter()
        .zip(&grid.alt_w)
        .any(|(&l, &w)| w > 0.0 && ev.value_of_lr(l) <= 0.0);
    let growth_rate = if hits_zero {
        f64::NEG_INFINITY
    } else {
        pair.expect_alt_of_lr(|l| ev.value_of_lr(l).ln(), &breaks)?
    };
    let null_expectation = pair.expect_null_of_lr(|l| ev.value_of_lr(l), &breaks)?;
    let second = pair.expect_null_of_lr(
        |l| {
            let v = ev.value_of_lr(l);
            v * v
        },
        &breaks,
    )?;
    let mut extras = BTreeMap::new();
    extras.insert("second_moment".to_string(), second);
    for (name, value) in ev.extra_metrics(pair)? {
        extras.insert(name.to_string(), value);
    }
    Ok(GrowthReport { growth_rate, null_expectation, extras })
}
