//! Boundedness constraint: over e-variables confined to [c1, c2] with
//! 0 <= c1 <= 1 <= c2, the log-optimal choice is the clipped, rescaled
//! likelihood ratio
//!
//! ```text
//! E* = min(c2, max(c1, L(X) / lambda*)),
//! ```
//!
//! with lambda* > 0 the constant making E_{P0}[E*] = 1. The map
//! lambda -> E_{P0}[clip(L/lambda)] is continuous and non-increasing, runs
//! from c2 >= 1 down to c1 <= 1, so a bracketing bisection from lambda = 1
//! always pins the root.

use super::ConstrainedEValue;
use crate::dist::HypothesisPair;
use crate::error::{Error, Result};
use crate::numeric;

const NULL_EXPECTATION_TOL: f64 = 1e-10;
const BISECT_XTOL: f64 = 1e-15;
const BISECT_MAX_ITER: usize = 200;
const BRACKET_DOUBLINGS: usize = 60;

/// A clipped e-variable min(c2, max(c1, L / lambda_star)).
#[derive(Debug, Clone, Copy)]
pub struct ClippedEVariable {
    pub c1: f64,
    pub c2: f64,
    pub lambda_star: f64,
}

impl ClippedEVariable {
    pub fn evaluate(&self, l: f64) -> f64 {
        (l / self.lambda_star).max(self.c1).min(self.c2)
    }
}

impl ConstrainedEValue for ClippedEVariable {
    fn value_of_lr(&self, l: f64) -> f64 {
        self.evaluate(l)
    }

    fn lr_breaks(&self) -> Vec<f64> {
        // Kinks where the clip activates.
        vec![self.c1 * self.lambda_star, self.c2 * self.lambda_star]
    }
}

/// Solve for the clipped log-optimal e-variable on [c1, c2].
///
/// c1 = 0 is allowed: if the pair has null mass where L = 0, the result
/// clips to 0 there and the growth report flags -inf when that region also
/// carries alternative mass (it cannot, under absolute continuity, but the
/// clipped value can still vanish when c1 = 0 and lambda* is large).
pub fn solve_bounded(pair: &HypothesisPair, c1: f64, c2: f64) -> Result<ClippedEVariable> {
    if !c1.is_finite() || !c2.is_finite() || c1 < 0.0 || c1 > 1.0 || c2 < 1.0 {
        return Err(Error::InfeasibleBounds { c1, c2 });
    }
    if c1 == 1.0 && c2 == 1.0 {
        // Only E = 1 is admissible.
        return Ok(ClippedEVariable { c1, c2, lambda_star: 1.0 });
    }
    if pair.is_degenerate() {
        return Ok(ClippedEVariable { c1, c2, lambda_star: 1.0 });
    }

    let h = |lambda: f64| -> f64 {
        let ev = ClippedEVariable { c1, c2, lambda_star: lambda };
        pair.expect_null_of_lr(|l| ev.evaluate(l), &ev.lr_breaks())
            .map(|m| m - 1.0)
            .unwrap_or(f64::NAN)
    };

    let (lo, hi) = numeric::bracket_decreasing_mul(&h, 1.0, BRACKET_DOUBLINGS).ok_or_else(|| {
        Error::SolverFailure {
            context: format!(
                "clip normalizer not bracketed from lambda = 1 within {BRACKET_DOUBLINGS} doublings \
                 (c1 = {c1}, c2 = {c2})"
            ),
            best: 1.0,
            residual: h(1.0),
        }
    })?;
    let root = numeric::bisect(&h, lo, hi, BISECT_XTOL, BISECT_MAX_ITER);
    let residual = h(root.x);
    if !(residual.abs() <= NULL_EXPECTATION_TOL) {
        return Err(Error::SolverFailure {
            context: format!("clip normalizer residual exceeds {NULL_EXPECTATION_TOL:e}"),
            best: root.x,
            residual,
        });
    }
    Ok(ClippedEVariable { c1, c2, lambda_star: root.x })
}
