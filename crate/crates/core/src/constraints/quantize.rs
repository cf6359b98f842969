//! Two-level quantization: the log-optimal e-variable restricted to two
//! values is a threshold function of the likelihood ratio,
//!
//! ```text
//! E* = u1 on {L > t*},  u0 on {L <= t*},
//! u1 = P1(L > t*) / P0(L > t*),  u0 = P1(L <= t*) / P0(L <= t*),
//! ```
//!
//! with the optimal interior threshold solving the fixed point
//! t* = (u1 - u0) / (log u1 - log u0) (the logarithmic mean of the two
//! values). For discrete laws the threshold need not be unique and the fixed
//! point need not be attainable; the solver enumerates all candidate
//! thresholds exactly and reports every argmax-achieving candidate plus the
//! fixed-point residual.

use super::ConstrainedEValue;
use crate::dist::{bernoulli_kl, HypothesisPair};
use crate::error::{Error, Result};
use crate::numeric;

/// A two-valued e-variable: u1 above the threshold, u0 at or below it.
#[derive(Debug, Clone)]
pub struct TwoLevelEVariable {
    pub t_star: f64,
    pub u0: f64,
    pub u1: f64,
    /// alpha = P0(L > t*).
    pub alpha: f64,
    /// beta = P1(L > t*).
    pub beta: f64,
    /// |t* - (u1 - u0)/(log u1 - log u0)|; None when the fixed-point map is
    /// undefined (trivial or boundary solutions).
    pub residual: Option<f64>,
    /// Every enumerated threshold achieving the maximal growth (discrete
    /// laws may have ties); contains just t_star for continuous laws.
    pub argmax_candidates: Vec<f64>,
}

impl TwoLevelEVariable {
    /// Growth at the Step-2 optimal values: beta log u1 + (1-beta) log u0,
    /// which equals d(Ber(beta) || Ber(alpha)).
    pub fn growth(&self) -> f64 {
        bernoulli_kl(self.beta, self.alpha)
    }
}

impl ConstrainedEValue for TwoLevelEVariable {
    fn value_of_lr(&self, l: f64) -> f64 {
        if l > self.t_star {
            self.u1
        } else {
            self.u0
        }
    }

    fn lr_breaks(&self) -> Vec<f64> {
        vec![self.t_star]
    }
}

/// Logarithmic mean of (u0, u1); None when degenerate.
fn log_mean(u0: f64, u1: f64) -> Option<f64> {
    if u0 <= 0.0 || u1 <= 0.0 || u0 == u1 {
        return None;
    }
    Some((u1 - u0) / (u1.ln() - u0.ln()))
}

fn levels(alpha: f64, beta: f64) -> (f64, f64) {
    let u1 = if alpha > 0.0 { beta / alpha } else { 1.0 };
    let u0 = if alpha < 1.0 { (1.0 - beta) / (1.0 - alpha) } else { 1.0 };
    (u0, u1)
}

/// Maximize E_{P1}[log E] over two-valued e-variables.
pub fn solve_quantized(pair: &HypothesisPair) -> Result<TwoLevelEVariable> {
    if pair.is_degenerate() {
        return Ok(TwoLevelEVariable {
            t_star: 1.0,
            u0: 1.0,
            u1: 1.0,
            alpha: 0.0,
            beta: 0.0,
            residual: None,
            argmax_candidates: vec![1.0],
        });
    }
    if pair.is_continuous() {
        solve_continuous(pair)
    } else {
        solve_discrete(pair)
    }
}

fn solve_discrete(pair: &HypothesisPair) -> Result<TwoLevelEVariable> {
    let grid = pair.grid();
    let mut lrs: Vec<f64> = grid
        .lr
        .iter()
        .zip(&grid.null_w)
        .filter(|&(_, &w)| w > 0.0)
        .map(|(&l, _)| l)
        .collect();
    lrs.sort_by(f64::total_cmp);
    lrs.dedup();
    let mut candidates = vec![lrs[0] - 1.0]; // sentinel: S = whole space
    candidates.extend_from_slice(&lrs);

    let tail_masses = |t: f64| -> (f64, f64) {
        let mut alpha = 0.0;
        let mut beta = 0.0;
        for ((&l, &w0), &w1) in grid.lr.iter().zip(&grid.null_w).zip(&grid.alt_w) {
            if l > t {
                alpha += w0;
                beta += w1;
            }
        }
        (alpha, beta)
    };

    let mut best_t = candidates[0];
    let mut best = f64::NEG_INFINITY;
    let mut argmax = Vec::new();
    for &t in &candidates {
        let (alpha, beta) = tail_masses(t);
        let growth = bernoulli_kl(beta, alpha);
        if growth > best + 1e-15 {
            best = growth;
            best_t = t;
            argmax.clear();
            argmax.push(t);
        } else if (growth - best).abs() <= 1e-15 {
            argmax.push(t);
        }
    }

    let (alpha, beta) = tail_masses(best_t);
    let (u0, u1) = levels(alpha, beta);
    let mut t_star = best_t;
    let mut residual = None;
    if alpha > 0.0 && alpha < 1.0 {
        if let Some(lm) = log_mean(u0, u1) {
            // Snap to the fixed point when it induces the same upper set.
            let same = lrs.iter().filter(|&&l| l > lm).count()
                == lrs.iter().filter(|&&l| l > best_t).count();
            if same {
                t_star = lm;
                residual = Some(0.0);
            } else {
                residual = Some((best_t - lm).abs());
            }
        }
    }
    Ok(TwoLevelEVariable { t_star, u0, u1, alpha, beta, residual, argmax_candidates: argmax })
}

const FP_DAMPING: f64 = 0.5;
const FP_TOL: f64 = 1e-10;
const FP_MAX_ITER: usize = 10_000;
const SCAN_POINTS: usize = 512;

fn solve_continuous(pair: &HypothesisPair) -> Result<TwoLevelEVariable> {
    let (lr_lo, lr_hi) = pair.lr_range();
    let span = (lr_hi - lr_lo).max(f64::MIN_POSITIVE);
    let clamp = |t: f64| t.clamp(lr_lo + 1e-10 * span, lr_hi - 1e-10 * span);
    let tail_masses = |t: f64| -> Result<(f64, f64)> {
        let breaks = [t];
        let alpha = pair.expect_null_of_lr(|l| if l > t { 1.0 } else { 0.0 }, &breaks)?;
        let beta = pair.expect_alt_of_lr(|l| if l > t { 1.0 } else { 0.0 }, &breaks)?;
        Ok((alpha, beta))
    };
    let growth_at = |t: f64| -> Result<f64> {
        let (alpha, beta) = tail_masses(t)?;
        Ok(bernoulli_kl(beta, alpha))
    };

    // Damped fixed-point iteration on the logarithmic-mean map.
    let mut t = clamp(1.0);
    let mut fp_converged = false;
    for _ in 0..FP_MAX_ITER {
        let (alpha, beta) = tail_masses(t)?;
        if !(1e-12..=1.0 - 1e-12).contains(&alpha) {
            break;
        }
        let (u0, u1) = levels(alpha, beta);
        let Some(lm) = log_mean(u0, u1) else { break };
        let next = clamp(t + FP_DAMPING * (lm - t));
        if (next - t).abs() <= FP_TOL * t.abs().max(1.0) {
            t = next;
            fp_converged = true;
            break;
        }
        t = next;
    }
    let fp_growth = if fp_converged { growth_at(t)? } else { f64::NEG_INFINITY };

    // Cross-check: scan a fixed t-grid and refine the best cell.
    let scan = if lr_lo > 0.0 {
        numeric::log_spaced(lr_lo, lr_hi, SCAN_POINTS)
    } else {
        numeric::lin_spaced(lr_lo, lr_hi, SCAN_POINTS)
    };
    let mut best_i = 0;
    let mut best_scan = f64::NEG_INFINITY;
    for (i, &tc) in scan.iter().enumerate() {
        let g = growth_at(clamp(tc))?;
        if g > best_scan {
            best_scan = g;
            best_i = i;
        }
    }
    let g_lo = scan[best_i.saturating_sub(1)];
    let g_hi = scan[(best_i + 1).min(scan.len() - 1)];
    let (t_gold, gold_growth) = numeric::golden_max(
        |tc| growth_at(clamp(tc)).unwrap_or(f64::NEG_INFINITY),
        g_lo,
        g_hi,
        200,
    );

    let t_star = if fp_growth >= gold_growth { t } else { clamp(t_gold) };
    let (alpha, beta) = tail_masses(t_star)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::SolverFailure {
            context: "quantized threshold landed on a boundary partition".into(),
            best: t_star,
            residual: f64::NAN,
        });
    }
    let (u0, u1) = levels(alpha, beta);
    let residual = log_mean(u0, u1).map(|lm| (t_star - lm).abs());
    Ok(TwoLevelEVariable {
        t_star,
        u0,
        u1,
        alpha,
        beta,
        residual,
        argmax_candidates: vec![t_star],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Distribution;
    use crate::testgen;

    #[test]
    fn trivial_for_identical_laws() {
        let pair = HypothesisPair::new(
            Distribution::bernoulli(0.4).unwrap(),
            Distribution::bernoulli(0.4).unwrap(),
        )
        .unwrap();
        let ev = solve_quantized(&pair).unwrap();
        assert_eq!(ev.u0, 1.0);
        assert_eq!(ev.u1, 1.0);
        assert_eq!(ev.growth(), 0.0);
    }

    #[test]
    fn step2_values_satisfy_identities() {
        for seed in 0..20 {
            let pair = testgen::random_discrete_pair(seed, 8);
            let ev = solve_quantized(&pair).unwrap();
            // u1 = beta/alpha, u0 = (1-beta)/(1-alpha), alpha u1 + (1-alpha) u0 = 1.
            assert!((ev.u1 - ev.beta / ev.alpha).abs() <= 1e-12 * ev.u1.abs().max(1.0));
            assert!((ev.u0 - (1.0 - ev.beta) / (1.0 - ev.alpha)).abs() <= 1e-12);
            assert!((ev.alpha * ev.u1 + (1.0 - ev.alpha) * ev.u0 - 1.0).abs() <= 1e-12);
            assert!(ev.u1 >= ev.u0);
        }
    }

    #[test]
    fn tail_masses_recomputable_from_pair() {
        let pair = testgen::random_discrete_pair(77, 9);
        let ev = solve_quantized(&pair).unwrap();
        let grid = pair.grid();
        let alpha: f64 = grid
            .lr
            .iter()
            .zip(&grid.null_w)
            .filter(|&(&l, _)| l > ev.t_star)
            .map(|(_, &w)| w)
            .sum();
        let beta: f64 = grid
            .lr
            .iter()
            .zip(&grid.alt_w)
            .filter(|&(&l, _)| l > ev.t_star)
            .map(|(_, &w)| w)
            .sum();
        assert_eq!(alpha, ev.alpha);
        assert_eq!(beta, ev.beta);
        assert!((ev.u1 - beta / alpha).abs() < 1e-14);
    }

    #[test]
    fn continuous_gaussian_pair_fixed_point() {
        let pair = HypothesisPair::new(
            Distribution::gaussian(0.0, 1.0).unwrap(),
            Distribution::gaussian(0.5, 1.0).unwrap(),
        )
        .unwrap();
        let ev = solve_quantized(&pair).unwrap();
        assert!(ev.residual.unwrap() <= 1e-8, "residual {:?}", ev.residual);
        assert!(ev.u1 > 1.0 && ev.u0 < 1.0);
        // Null expectation pinned at 1 by construction of (u0, u1).
        let m = ev.alpha * ev.u1 + (1.0 - ev.alpha) * ev.u0;
        assert!((m - 1.0).abs() < 1e-10);
    }
}
