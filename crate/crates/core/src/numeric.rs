//! Shared numerical kernels: Gauss-Legendre rules, bracketing bisection, and
//! golden-section maximization.
//!
//! Everything here is deterministic; the same inputs always produce the same
//! bits. Solvers elsewhere in the crate lean on these three primitives instead
//! of rolling their own loops.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Gauss-Legendre nodes and weights on [-1, 1].
///
/// Newton iteration on the Legendre recurrence with the Chebyshev-like initial
/// guess cos(pi (i - 1/4) / (n + 1/2)); accurate to machine precision for the
/// node counts used here (16..=4096).
fn legendre_rule(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2, "quadrature rule needs at least 2 nodes");
    let mut rule = Vec::with_capacity(n);
    let m = n.div_ceil(2);
    for i in 1..=m {
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n(x) and P_n'(x) by the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((-x, w));
    }
    // Mirror to the full rule; odd n keeps the middle node once.
    let mut full: Vec<(f64, f64)> = rule.clone();
    for &(x, w) in rule.iter().rev() {
        if x != 0.0 {
            full.push((-x, w));
        }
    }
    full.sort_by(|a, b| a.0.total_cmp(&b.0));
    full
}

fn rule_cache() -> &'static Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Cached Gauss-Legendre rule on [-1, 1] with `n` nodes.
pub fn gauss_legendre(n: usize) -> Arc<Vec<(f64, f64)>> {
    let mut cache = rule_cache().lock().expect("quadrature cache poisoned");
    cache
        .entry(n)
        .or_insert_with(|| Arc::new(legendre_rule(n)))
        .clone()
}

/// Gauss-Legendre nodes and weights mapped onto [lo, hi].
pub fn gauss_legendre_on(n: usize, lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    gauss_legendre(n)
        .iter()
        .map(|&(x, w)| (mid + half * x, half * w))
        .collect()
}

/// Outcome of a bracketing bisection run.
#[derive(Debug, Clone, Copy)]
pub struct Root {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Bisection on a function with f(lo) and f(hi) of opposite (or zero) sign.
///
/// Runs until the bracket collapses to relative width `xtol` or `max_iter`
/// halvings, then returns the midpoint with its residual. The caller checks
/// the residual against its own tolerance; bisection itself cannot fail once
/// a sign change is bracketed.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, xtol: f64, max_iter: usize) -> Root {
    let mut flo = f(lo);
    let mut iterations = 0;
    if flo == 0.0 {
        return Root { x: lo, residual: 0.0, iterations };
    }
    let mut x = 0.5 * (lo + hi);
    let mut fx = f(x);
    for _ in 0..max_iter {
        iterations += 1;
        if fx == 0.0 {
            break;
        }
        if (fx > 0.0) == (flo > 0.0) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        if (hi - lo).abs() <= xtol * x.abs().max(1.0) {
            break;
        }
        x = 0.5 * (lo + hi);
        fx = f(x);
    }
    Root { x, residual: fx, iterations }
}

/// Grow a sign-change bracket for a monotone non-increasing map, doubling away
/// from `seed` in both directions. Returns None when `max_doublings` is hit.
pub fn bracket_decreasing(
    f: impl Fn(f64) -> f64,
    seed: f64,
    max_doublings: usize,
) -> Option<(f64, f64)> {
    let fs = f(seed);
    if fs == 0.0 {
        return Some((seed, seed));
    }
    if fs > 0.0 {
        // Root is to the right.
        let mut lo = seed;
        let mut step = seed.abs().max(1.0);
        for _ in 0..max_doublings {
            let hi = lo + step;
            if f(hi) <= 0.0 {
                return Some((lo, hi));
            }
            lo = hi;
            step *= 2.0;
        }
        None
    } else {
        let mut hi = seed;
        let mut step = seed.abs().max(1.0);
        for _ in 0..max_doublings {
            let lo = hi - step;
            if f(lo) >= 0.0 {
                return Some((lo, hi));
            }
            hi = lo;
            step *= 2.0;
        }
        None
    }
}

/// Multiplicative bracket for a monotone non-increasing map on (0, inf):
/// doubles upward (or halves downward) from `seed` until the sign flips.
pub fn bracket_decreasing_mul(
    f: impl Fn(f64) -> f64,
    seed: f64,
    max_doublings: usize,
) -> Option<(f64, f64)> {
    debug_assert!(seed > 0.0);
    let fs = f(seed);
    if fs == 0.0 {
        return Some((seed, seed));
    }
    if fs > 0.0 {
        let mut lo = seed;
        for _ in 0..max_doublings {
            let hi = lo * 2.0;
            if f(hi) <= 0.0 {
                return Some((lo, hi));
            }
            lo = hi;
        }
        None
    } else {
        let mut hi = seed;
        for _ in 0..max_doublings {
            let lo = hi * 0.5;
            if f(lo) >= 0.0 {
                return Some((lo, hi));
            }
            hi = lo;
        }
        None
    }
}

/// Golden-section maximization of a unimodal function on [lo, hi].
///
/// Returns (argmax, max). Deterministic; `iters` of ~90 pins the abscissa to
/// machine precision on O(1) intervals.
pub fn golden_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = lo;
    let mut b = hi;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
        if (b - a).abs() < 1e-15 * (a.abs().max(b.abs()).max(1.0)) {
            break;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// `count` points spaced logarithmically over [lo, hi] (both positive).
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// `count` points spaced linearly over [lo, hi].
pub fn lin_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        // A 16-node rule is exact for polynomials up to degree 31.
        let rule = gauss_legendre_on(16, 0.0, 1.0);
        let int_x2: f64 = rule.iter().map(|&(x, w)| w * x * x).sum();
        assert!((int_x2 - 1.0 / 3.0).abs() < 1e-14);
        let int_x9: f64 = rule.iter().map(|&(x, w)| w * x.powi(9)).sum();
        assert!((int_x9 - 0.1).abs() < 1e-14);
    }

    #[test]
    fn legendre_weights_sum_to_interval_length() {
        for n in [16, 33, 256] {
            let rule = gauss_legendre_on(n, -2.0, 5.0);
            let total: f64 = rule.iter().map(|&(_, w)| w).sum();
            assert!((total - 7.0).abs() < 1e-12, "n = {n}: {total}");
        }
    }

    #[test]
    fn legendre_handles_smooth_gaussians() {
        let rule = gauss_legendre_on(256, -8.0, 8.0);
        let z: f64 = rule
            .iter()
            .map(|&(x, w)| w * (-0.5 * x * x).exp())
            .sum::<f64>()
            / (2.0 * std::f64::consts::PI).sqrt();
        assert!((z - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bisect_finds_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15, 200);
        assert!((r.x - std::f64::consts::SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn golden_finds_max_of_concave() {
        let (x, fx) = golden_max(|x| -(x - 1.25) * (x - 1.25) + 3.0, -4.0, 6.0, 120);
        assert!((x - 1.25).abs() < 1e-9);
        assert!((fx - 3.0).abs() < 1e-14);
    }

    #[test]
    fn bracket_decreasing_spans_root() {
        let f = |x: f64| 1.0 - x; // decreasing, root at 1
        let (lo, hi) = bracket_decreasing(f, 8.0, 60).unwrap();
        assert!(f(lo) >= 0.0 && f(hi) <= 0.0);
        let (lo, hi) = bracket_decreasing(f, 0.125, 60).unwrap();
        assert!(f(lo) >= 0.0 && f(hi) <= 0.0);
    }
}
