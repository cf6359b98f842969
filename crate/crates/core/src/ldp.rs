//! Epsilon-LDP binary mechanisms and their e-variables.
//!
//! An epsilon-LDP channel with binary output can only take two firing
//! probabilities, y_min = 1/(1+e^eps) and y_max = e^eps/(1+e^eps), and the
//! optimal channel fires high exactly on a likelihood-ratio upper set
//! {L(x) > t}. This module provides:
//!
//! * the Kairouz staircase mechanism (threshold fixed at 1);
//! * the optimal binary mechanism, whose threshold solves the fixed point
//!   t = (m1 - m0) / (m0 (1 - m0) log(m1 (1 - m0) / (m0 (1 - m1))))
//!   in the induced output marginals m_i = E_{P_i}[Q(1|X)];
//! * the induced two-value e-variable E = dM1/dM0 with values v0, v1;
//! * the private Kelly bet: fraction f* = (2q-1)(e^eps - 1)/(e^eps + 1) and a
//!   seeded wealth-trajectory simulator;
//! * the representation of the private e-variable as a randomized
//!   post-processing of the raw likelihood ratio;
//! * the composite (LFD-pair) version with stochastic-dominance validation.
//!
//! Flip probabilities are rounded toward more privacy: y_min is nudged up by
//! at most a couple of ulps so that the exact rational ratio
//! (1 - y_min)/y_min never exceeds the stored e^eps. The privacy invariant
//! therefore holds with no tolerance.
//!
//! Note on the closed-form displays: the published v0/v1 displays for the
//! two-value e-variable mix P(T) and 1 - P(T) between numerator and
//! denominator in a way that is inconsistent with the stated mechanism, so
//! v0 and v1 here are always computed as ratios of the induced marginals,
//! v1 = m1/m0 and v0 = (1-m1)/(1-m0), which is unambiguous.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::composite::CompositeProblem;
use crate::dist::{bernoulli_kl, Distribution, HypothesisPair};
use crate::error::{Error, Result};
use crate::numeric;

/// Privacy budget epsilon (nats of privacy loss) with the derived binary
/// channel firing probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyBudget {
    epsilon: f64,
    exp_eps: f64,
    y_min: f64,
    y_max: f64,
}

/// Exact rational of a finite f64.
fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

impl PrivacyBudget {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "privacy budget must be a finite positive epsilon, got {epsilon}"
            )));
        }
        let exp_eps = epsilon.exp();
        if !exp_eps.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "epsilon = {epsilon} overflows e^epsilon"
            )));
        }
        // Nudge y_min up until (1 - y_min)/y_min <= e^eps holds as exact
        // rationals; rounding of 1/(1+e^eps) can land half an ulp short.
        let mut y_min = 1.0 / (1.0 + exp_eps);
        let bound = rational(exp_eps);
        for _ in 0..8 {
            let y = rational(y_min);
            if (BigRational::one() - &y) / &y <= bound {
                break;
            }
            y_min = f64::from_bits(y_min.to_bits() + 1);
        }
        Ok(Self { epsilon, exp_eps, y_min, y_max: 1.0 - y_min })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn exp_eps(&self) -> f64 {
        self.exp_eps
    }

    /// Firing probability of the low branch, 1/(1+e^eps).
    pub fn low_fire_prob(&self) -> f64 {
        self.y_min
    }

    /// Firing probability of the high branch, e^eps/(1+e^eps) = 1 - y_min.
    pub fn high_fire_prob(&self) -> f64 {
        self.y_max
    }
}

/// An epsilon-LDP channel with binary output: fires Y = 1 with probability
/// y_max when L(x) > t and with probability y_min when L(x) <= t (ties route
/// to the low branch).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryMechanism {
    threshold: f64,
    budget: PrivacyBudget,
}

impl BinaryMechanism {
    pub fn new(threshold: f64, budget: PrivacyBudget) -> Self {
        Self { threshold, budget }
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn budget(&self) -> &PrivacyBudget {
        &self.budget
    }

    /// Q(1|x) as a function of the likelihood ratio at x.
    pub fn q1_of_lr(&self, l: f64) -> f64 {
        if l > self.threshold {
            self.budget.y_max
        } else {
            self.budget.y_min
        }
    }

    /// Q(0|x) = 1 - Q(1|x), exact by construction.
    pub fn q0_of_lr(&self, l: f64) -> f64 {
        1.0 - self.q1_of_lr(l)
    }
}

/// Probability that the channel outputs 1 when the input follows `member`,
/// with the likelihood ratio taken from `pair`.
pub fn induced_marginal(
    mech: &BinaryMechanism,
    member: &Distribution,
    pair: &HypothesisPair,
) -> Result<f64> {
    pair.expect_member_of_lr(member, |l| mech.q1_of_lr(l), &[mech.threshold()])
}

/// Induced output-1 marginals under the pair's null and alternative.
pub fn pair_marginals(mech: &BinaryMechanism, pair: &HypothesisPair) -> Result<(f64, f64)> {
    let breaks = [mech.threshold()];
    let m0 = pair.expect_null_of_lr(|l| mech.q1_of_lr(l), &breaks)?;
    let m1 = pair.expect_alt_of_lr(|l| mech.q1_of_lr(l), &breaks)?;
    Ok((m0, m1))
}

/// J(Q) = d(Ber(m1) || Ber(m0)), the KL divergence between the induced
/// output marginals. This is the objective the optimal mechanism maximizes.
pub fn objective_kl(mech: &BinaryMechanism, pair: &HypothesisPair) -> Result<f64> {
    let (m0, m1) = pair_marginals(mech, pair)?;
    Ok(bernoulli_kl(m1, m0))
}

/// The Kairouz two-output staircase mechanism: high output on
/// {p1(x) > p0(x)}, i.e. threshold exactly 1.
pub fn kairouz_mechanism(_pair: &HypothesisPair, eps: &PrivacyBudget) -> BinaryMechanism {
    BinaryMechanism::new(1.0, *eps)
}

/// Solution of the optimal binary-mechanism problem.
#[derive(Debug, Clone, Copy)]
pub struct LdpSolution {
    pub threshold: f64,
    pub mechanism: BinaryMechanism,
    /// J at the optimum, d(Ber(m1) || Ber(m0)).
    pub objective: f64,
    pub m0: f64,
    pub m1: f64,
    /// |t - RHS(t)| of the Theorem fixed point; None when the optimum is a
    /// boundary partition (everything low or everything high) where the
    /// fixed-point map is undefined.
    pub residual: Option<f64>,
    /// True when the optimal partition is a proper subset of the support.
    pub interior: bool,
}

/// Right-hand side of the threshold fixed point, as a function of the
/// induced marginals. None when m1 == m0 (map undefined).
fn fixed_point_rhs(m0: f64, m1: f64) -> Option<f64> {
    if m0 <= 0.0 || m0 >= 1.0 || m1 <= 0.0 || m1 >= 1.0 {
        return None;
    }
    let num = m1 - m0;
    if num == 0.0 {
        return None;
    }
    let log_odds = ((m1 * (1.0 - m0)) / (m0 * (1.0 - m1))).ln();
    if log_odds == 0.0 {
        return None;
    }
    Some(num / (m0 * (1.0 - m0) * log_odds))
}

/// Maximize J over all epsilon-LDP binary mechanisms.
///
/// Discrete pairs: exact maximization over candidate thresholds (the distinct
/// likelihood-ratio values plus one sentinel below the minimum); the returned
/// threshold is snapped to the Theorem fixed point whenever that fixed point
/// induces the same partition. Continuous pairs: damped fixed-point iteration
/// (damping 0.5, tolerance 1e-10, cap 10^4) seeded at t = 1, cross-checked by
/// a scan-seeded golden-section maximization of J; the larger J wins.
pub fn solve_binary_threshold(pair: &HypothesisPair, eps: &PrivacyBudget) -> Result<LdpSolution> {
    if pair.is_degenerate() {
        let mechanism = BinaryMechanism::new(1.0, *eps);
        let (m0, m1) = pair_marginals(&mechanism, pair)?;
        return Ok(LdpSolution {
            threshold: 1.0,
            mechanism,
            objective: 0.0,
            m0,
            m1,
            residual: None,
            interior: false,
        });
    }
    if pair.is_continuous() {
        solve_threshold_continuous(pair, eps)
    } else {
        solve_threshold_discrete(pair, eps)
    }
}

fn solve_threshold_discrete(pair: &HypothesisPair, eps: &PrivacyBudget) -> Result<LdpSolution> {
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
    let mut candidates = vec![lrs[0] - 1.0]; // sentinel: everything fires high
    candidates.extend_from_slice(&lrs);

    let marginals = |t: f64| -> (f64, f64) {
        let mut m0 = 0.0;
        let mut m1 = 0.0;
        for ((&l, &w0), &w1) in grid.lr.iter().zip(&grid.null_w).zip(&grid.alt_w) {
            let q = if l > t { eps.high_fire_prob() } else { eps.low_fire_prob() };
            m0 += w0 * q;
            m1 += w1 * q;
        }
        (m0, m1)
    };

    let mut best_t = candidates[0];
    let mut best = f64::NEG_INFINITY;
    for &t in &candidates {
        let (m0, m1) = marginals(t);
        let j = bernoulli_kl(m1, m0);
        if j > best {
            best = j;
            best_t = t;
        }
    }
    let (m0, m1) = marginals(best_t);
    let low_count = lrs.iter().filter(|&&l| l <= best_t).count();
    let interior = low_count > 0 && low_count < lrs.len();

    let mut threshold = best_t;
    let mut residual = None;
    if interior {
        if let Some(rhs) = fixed_point_rhs(m0, m1) {
            // Snap to the fixed point when it induces the same partition.
            let same = lrs.iter().filter(|&&l| l <= rhs).count() == low_count;
            if same {
                threshold = rhs;
                residual = Some(0.0);
            } else {
                residual = Some((best_t - rhs).abs());
            }
        }
    }
    Ok(LdpSolution {
        threshold,
        mechanism: BinaryMechanism::new(threshold, *eps),
        objective: best,
        m0,
        m1,
        residual,
        interior,
    })
}

const FP_DAMPING: f64 = 0.5;
const FP_TOL: f64 = 1e-10;
const FP_MAX_ITER: usize = 10_000;

fn solve_threshold_continuous(pair: &HypothesisPair, eps: &PrivacyBudget) -> Result<LdpSolution> {
    let (lr_lo, lr_hi) = pair.lr_range();
    let span = (lr_hi - lr_lo).max(f64::MIN_POSITIVE);
    let clamp = |t: f64| t.clamp(lr_lo + 1e-12 * span, lr_hi - 1e-12 * span);
    let j_at = |t: f64| -> Result<(f64, f64, f64)> {
        let mech = BinaryMechanism::new(t, *eps);
        let (m0, m1) = pair_marginals(&mech, pair)?;
        Ok((bernoulli_kl(m1, m0), m0, m1))
    };

    // Damped fixed-point iteration seeded at t = 1.
    let mut t = clamp(1.0);
    let mut fp_converged = false;
    for _ in 0..FP_MAX_ITER {
        let (_, m0, m1) = j_at(t)?;
        let Some(rhs) = fixed_point_rhs(m0, m1) else { break };
        let next = clamp(t + FP_DAMPING * (rhs - t));
        if (next - t).abs() <= FP_TOL * t.abs().max(1.0) {
            t = next;
            fp_converged = true;
            break;
        }
        t = next;
    }
    let fp_obj = if fp_converged { j_at(t)?.0 } else { f64::NEG_INFINITY };

    // Scan-seeded golden-section cross-check over the likelihood-ratio range.
    let scan = numeric::lin_spaced(lr_lo, lr_hi, 65);
    let mut best_i = 0;
    let mut best_scan = f64::NEG_INFINITY;
    for (i, &tc) in scan.iter().enumerate() {
        let j = j_at(clamp(tc))?.0;
        if j > best_scan {
            best_scan = j;
            best_i = i;
        }
    }
    let g_lo = scan[best_i.saturating_sub(1)];
    let g_hi = scan[(best_i + 1).min(scan.len() - 1)];
    let (t_gold, gold_obj) = numeric::golden_max(
        |tc| j_at(clamp(tc)).map(|(j, _, _)| j).unwrap_or(f64::NEG_INFINITY),
        g_lo,
        g_hi,
        200,
    );

    let (threshold, objective) = if fp_obj >= gold_obj { (t, fp_obj) } else { (clamp(t_gold), gold_obj) };
    if !objective.is_finite() {
        return Err(Error::SolverFailure {
            context: "binary threshold: both fixed-point and scan paths failed".into(),
            best: t,
            residual: f64::NAN,
        });
    }
    let (obj, m0, m1) = j_at(threshold)?;
    let residual = fixed_point_rhs(m0, m1).map(|rhs| (threshold - rhs).abs());
    Ok(LdpSolution {
        threshold,
        mechanism: BinaryMechanism::new(threshold, *eps),
        objective: obj,
        m0,
        m1,
        residual,
        interior: threshold > lr_lo && threshold < lr_hi,
    })
}

/// The two-value private e-variable E = dM1/dM0 on the channel output.
#[derive(Debug, Clone, Copy)]
pub struct PrivateEVariable {
    /// Value at Y = 0: (1 - m1)/(1 - m0).
    pub v0: f64,
    /// Value at Y = 1: m1/m0.
    pub v1: f64,
    pub mechanism: BinaryMechanism,
    /// Output-1 probability under the null.
    pub m0: f64,
    /// Output-1 probability under the alternative.
    pub m1: f64,
}

impl PrivateEVariable {
    pub fn value(&self, y: bool) -> f64 {
        if y {
            self.v1
        } else {
            self.v0
        }
    }

    /// Expected log e-value under the alternative marginal, J(Q).
    pub fn growth_rate(&self) -> f64 {
        bernoulli_kl(self.m1, self.m0)
    }

    /// Conditional mean E[E | X = x] as a function of the likelihood ratio;
    /// a non-decreasing two-level map used by the composite lift.
    pub fn conditional_mean_of_lr(&self, l: f64) -> f64 {
        let q = self.mechanism.q1_of_lr(l);
        self.v0 + (self.v1 - self.v0) * q
    }

    /// Conditional expected log e-value given X = x.
    pub fn conditional_log_of_lr(&self, l: f64) -> f64 {
        let q = self.mechanism.q1_of_lr(l);
        (1.0 - q) * self.v0.ln() + q * self.v1.ln()
    }
}

/// Build the log-optimal e-variable for a given mechanism from the ratios of
/// its induced marginals (not from the closed-form displays; see module doc).
pub fn private_evariable(mech: &BinaryMechanism, pair: &HypothesisPair) -> Result<PrivateEVariable> {
    let (m0, m1) = pair_marginals(mech, pair)?;
    Ok(PrivateEVariable {
        v0: (1.0 - m1) / (1.0 - m0),
        v1: m1 / m0,
        mechanism: *mech,
        m0,
        m1,
    })
}

/// The privacy-adjusted Kelly fraction f* = (2q - 1)(e^eps - 1)/(e^eps + 1).
pub fn kelly_fraction(q: f64, eps: &PrivacyBudget) -> Result<f64> {
    if !(q > 0.5 && q < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "Kelly bet requires q in (1/2, 1), got {q}"
        )));
    }
    let e = eps.exp_eps();
    Ok((2.0 * q - 1.0) * (e - 1.0) / (e + 1.0))
}

/// Parameters of a simulated LDP Kelly run.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct KellyConfig {
    /// Bernoulli parameter the bet is sized for (the alternative).
    pub q_alt: f64,
    /// Data-generating Bernoulli parameter.
    pub q_true: f64,
    pub epsilon: f64,
    pub rounds: usize,
}

/// A simulated wealth path: wealths[0] = 1 and every successive ratio is
/// exactly 1 + f* or 1 - f*.
#[derive(Debug, Clone)]
pub struct WealthTrajectory {
    pub wealths: Vec<f64>,
    /// Privatized bits, one per round.
    pub ys: Vec<bool>,
    /// The Kelly fraction f* used for every bet.
    pub fraction: f64,
    pub seed: u64,
    pub config: KellyConfig,
}

impl WealthTrajectory {
    /// Per-round wealth multiplier e(y) = 1 + f*(2y - 1).
    pub fn e_value(&self, y: bool) -> f64 {
        if y {
            1.0 + self.fraction
        } else {
            1.0 - self.fraction
        }
    }

    /// Mean of log e(Y_t), computed from the branch counts so it stays exact
    /// even when the raw wealth product overflows.
    pub fn mean_log_growth(&self) -> f64 {
        let ones = self.ys.iter().filter(|&&y| y).count() as f64;
        let n = self.ys.len() as f64;
        let up = (1.0 + self.fraction).ln();
        let down = (1.0 - self.fraction).ln();
        (ones * up + (n - ones) * down) / n
    }
}

/// Run the LDP Kelly bet: X_t ~ Ber(q_true), Y_t flips X_t with probability
/// 1/(1+e^eps), wealth multiplies by e(Y_t) = 1 + f*(2 Y_t - 1).
/// Deterministic given the seed.
pub fn simulate_ldp_kelly(
    q_true: f64,
    q_alt: f64,
    eps: &PrivacyBudget,
    rounds: usize,
    seed: u64,
) -> Result<WealthTrajectory> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("rounds must be >= 1".into()));
    }
    if !(q_true > 0.0 && q_true < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "q_true must lie in (0, 1), got {q_true}"
        )));
    }
    let fraction = kelly_fraction(q_alt, eps)?;
    let flip_prob = eps.low_fire_prob();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut wealths = Vec::with_capacity(rounds + 1);
    let mut ys = Vec::with_capacity(rounds);
    let mut w = 1.0;
    wealths.push(w);
    for _ in 0..rounds {
        let x = rng.gen_bool(q_true);
        let flip = rng.gen_bool(flip_prob);
        let y = x != flip;
        ys.push(y);
        w *= if y { 1.0 + fraction } else { 1.0 - fraction };
        wealths.push(w);
    }
    Ok(WealthTrajectory {
        wealths,
        ys,
        fraction,
        seed,
        config: KellyConfig { q_alt, q_true, epsilon: eps.epsilon(), rounds },
    })
}

/// Evaluate the private e-variable as a randomized post-processing of the
/// raw observation: with U uniform on [0, 1) independent of X, the output is
/// v1 exactly when U falls below the channel's firing probability at x, so
/// P_u(output = v1) = Q(1|x).
pub fn randomized_postprocess(
    pair: &HypothesisPair,
    ev: &PrivateEVariable,
    x: f64,
    u: f64,
) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return Err(Error::InvalidArgument(format!("u must lie in [0, 1), got {u}")));
    }
    let l = pair.lr_at(x)?;
    Ok(if u < ev.mechanism.q1_of_lr(l) { ev.v1 } else { ev.v0 })
}

/// One marginal-dominance check of the composite validation sweep.
#[derive(Debug, Clone, Serialize)]
pub struct MarginalCheck {
    pub member: String,
    /// Induced output-1 marginal under this member.
    pub marginal: f64,
    /// The LFD marginal it must not cross.
    pub reference: f64,
    /// Signed slack; negative beyond tolerance means a violation.
    pub margin: f64,
    pub ok: bool,
}

/// Validation report for the composite LDP construction.
#[derive(Debug, Clone, Serialize)]
pub struct CompositeLdpReport {
    pub threshold: f64,
    pub m0_star: f64,
    pub m1_star: f64,
    /// Worst-case growth d(Ber(m1*) || Ber(m0*)).
    pub worst_case_growth: f64,
    pub fixed_point_residual: Option<f64>,
    pub null_checks: Vec<MarginalCheck>,
    pub alt_checks: Vec<MarginalCheck>,
    pub tolerance: f64,
    pub passed: bool,
}

/// Composite LDP construction with the validation sweep kept in the report;
/// dominance violations are entries, not errors.
pub fn composite_ldp_report(
    problem: &CompositeProblem,
    eps: &PrivacyBudget,
) -> Result<(PrivateEVariable, CompositeLdpReport)> {
    let pair = problem.lfd().pair();
    let solution = solve_binary_threshold(pair, eps)?;
    let ev = private_evariable(&solution.mechanism, pair)?;
    let tol = problem.default_tolerance();

    let mut null_checks = Vec::new();
    for member in problem.null_members() {
        let m = induced_marginal(&solution.mechanism, member, pair)?;
        let margin = solution.m0 + tol - m;
        null_checks.push(MarginalCheck {
            member: member.to_string(),
            marginal: m,
            reference: solution.m0,
            margin,
            ok: margin >= 0.0,
        });
    }
    let mut alt_checks = Vec::new();
    for member in problem.alt_members() {
        let m = induced_marginal(&solution.mechanism, member, pair)?;
        let margin = m - (solution.m1 - tol);
        alt_checks.push(MarginalCheck {
            member: member.to_string(),
            marginal: m,
            reference: solution.m1,
            margin,
            ok: margin >= 0.0,
        });
    }
    let passed = null_checks.iter().chain(&alt_checks).all(|c| c.ok);
    let report = CompositeLdpReport {
        threshold: solution.threshold,
        m0_star: solution.m0,
        m1_star: solution.m1,
        worst_case_growth: bernoulli_kl(solution.m1, solution.m0),
        fixed_point_residual: solution.residual,
        null_checks,
        alt_checks,
        tolerance: tol,
        passed,
    };
    Ok((ev, report))
}

/// Composite LDP construction: solve on the LFD pair, build the e-variable
/// from the LFD marginals, and sweep the sampled members for stochastic
/// dominance. A violation beyond tolerance is an error naming the offending
/// member — it signals a bad LFD pair input.
pub fn composite_ldp(
    problem: &CompositeProblem,
    eps: &PrivacyBudget,
) -> Result<(PrivateEVariable, CompositeLdpReport)> {
    let (ev, report) = composite_ldp_report(problem, eps)?;
    if let Some(bad) = report.null_checks.iter().chain(&report.alt_checks).find(|c| !c.ok) {
        return Err(Error::DominanceViolation {
            member: bad.member.clone(),
            detail: format!(
                "marginal {} vs reference {} (margin {})",
                bad.marginal, bad.reference, bad.margin
            ),
        });
    }
    Ok((ev, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::kl_of_pair;
    use crate::testgen;

    fn ber_pair(p0: f64, p1: f64) -> HypothesisPair {
        HypothesisPair::new(
            Distribution::bernoulli(p0).unwrap(),
            Distribution::bernoulli(p1).unwrap(),
        )
        .unwrap()
    }

    fn eps(e: f64) -> PrivacyBudget {
        PrivacyBudget::new(e).unwrap()
    }

    #[test]
    fn budget_rejects_bad_epsilon() {
        assert!(PrivacyBudget::new(0.0).is_err());
        assert!(PrivacyBudget::new(-1.0).is_err());
        assert!(PrivacyBudget::new(f64::INFINITY).is_err());
    }

    #[test]
    fn flip_probs_satisfy_exact_rational_bound() {
        for e in [0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0] {
            let b = eps(e);
            assert_eq!(b.low_fire_prob() + b.high_fire_prob(), 1.0);
            let ratio = (BigRational::one() - rational(b.low_fire_prob()))
                / rational(b.low_fire_prob());
            assert!(ratio <= rational(b.exp_eps()), "eps = {e}");
            // And the nudge stays within a hair of the ideal value.
            assert!((b.low_fire_prob() - 1.0 / (1.0 + e.exp())).abs() < 1e-15);
        }
    }

    #[test]
    fn marginal_saturates_at_extreme_thresholds() {
        let pair = ber_pair(0.5, 0.75);
        let b = eps(1.0);
        let below = BinaryMechanism::new(0.0, b); // below min L: always fires high
        let m = induced_marginal(&below, pair.null_dist(), &pair).unwrap();
        assert!((m - b.high_fire_prob()).abs() < 1e-15);
        let above = BinaryMechanism::new(10.0, b);
        let m = induced_marginal(&above, pair.null_dist(), &pair).unwrap();
        assert!((m - b.low_fire_prob()).abs() < 1e-15);
    }

    #[test]
    fn marginal_bernoulli_two_point_sum() {
        // Separating threshold: m = q e^eps/(1+e^eps) + (1-q)/(1+e^eps).
        let q = 0.75;
        let pair = ber_pair(0.5, q);
        let b = eps(1.0);
        let mech = BinaryMechanism::new(1.0, b); // L(0)=0.5 <= 1 < 1.5 = L(1)
        let m = induced_marginal(&mech, pair.alt_dist(), &pair).unwrap();
        let want = q * b.high_fire_prob() + (1.0 - q) * b.low_fire_prob();
        assert!((m - want).abs() < 1e-15);
    }

    #[test]
    fn objective_zero_for_identical_laws() {
        let pair = ber_pair(0.6, 0.6);
        for t in [0.1, 1.0, 7.0] {
            let j = objective_kl(&BinaryMechanism::new(t, eps(1.0)), &pair).unwrap();
            assert!(j.abs() < 1e-15);
        }
    }

    #[test]
    fn objective_invariant_between_support_points() {
        let pair = ber_pair(0.5, 0.75); // L values {0.5, 1.5}
        let b = eps(0.7);
        let j1 = objective_kl(&BinaryMechanism::new(0.6, b), &pair).unwrap();
        let j2 = objective_kl(&BinaryMechanism::new(1.4, b), &pair).unwrap();
        assert_eq!(j1, j2);
    }

    #[test]
    fn kairouz_is_randomized_response_on_bernoulli() {
        let pair = ber_pair(0.5, 0.75);
        let b = eps(1.0);
        let mech = kairouz_mechanism(&pair, &b);
        assert_eq!(mech.threshold(), 1.0);
        // Q(1|x=1) = e^eps/(1+e^eps), Q(1|x=0) = 1/(1+e^eps): the channel
        // reports the true bit with probability e^eps/(1+e^eps).
        assert_eq!(mech.q1_of_lr(pair.lr_at(1.0).unwrap()), b.high_fire_prob());
        assert_eq!(mech.q1_of_lr(pair.lr_at(0.0).unwrap()), b.low_fire_prob());
    }

    #[test]
    fn solver_matches_randomized_response_closed_form() {
        // J must equal d(Ber((1+f*)/2) || Ber(1/2)) for the fair-coin test.
        for &e in &[0.1, 1.0, 5.0] {
            for &q in &[0.6, 0.75, 0.9] {
                let b = eps(e);
                let pair = ber_pair(0.5, q);
                let sol = solve_binary_threshold(&pair, &b).unwrap();
                let f = kelly_fraction(q, &b).unwrap();
                let want = bernoulli_kl((1.0 + f) / 2.0, 0.5);
                assert!(
                    (sol.objective - want).abs() < 1e-12,
                    "eps={e}, q={q}: {} vs {want}",
                    sol.objective
                );
                // Any threshold in [L(0), L(1)) is optimal; ours must be one.
                let (l0, l1) = (pair.lr_at(0.0).unwrap(), pair.lr_at(1.0).unwrap());
                assert!(sol.threshold >= l0 && sol.threshold < l1);
                assert_eq!(sol.residual, Some(0.0));
            }
        }
    }

    #[test]
    fn solver_degenerate_pair() {
        let pair = ber_pair(0.4, 0.4);
        let sol = solve_binary_threshold(&pair, &eps(1.0)).unwrap();
        assert_eq!(sol.threshold, 1.0);
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn solver_continuous_gaussian_pair() {
        let pair = HypothesisPair::new(
            Distribution::gaussian(0.0, 1.0).unwrap(),
            Distribution::gaussian(0.5, 1.0).unwrap(),
        )
        .unwrap();
        let sol = solve_binary_threshold(&pair, &eps(1.0)).unwrap();
        assert!(sol.interior);
        let res = sol.residual.unwrap();
        assert!(res <= 1e-8, "fixed-point residual {res}");
        // The optimum beats the Kairouz threshold t = 1 (weakly).
        let j_kairouz = objective_kl(&kairouz_mechanism(&pair, &eps(1.0)), &pair).unwrap();
        assert!(sol.objective >= j_kairouz - 1e-12);
        // Data processing: J cannot exceed the raw KL.
        assert!(sol.objective <= kl_of_pair(&pair).unwrap());
    }

    #[test]
    fn private_evariable_identical_laws() {
        let pair = ber_pair(0.3, 0.3);
        let ev = private_evariable(&BinaryMechanism::new(1.0, eps(1.0)), &pair).unwrap();
        assert!((ev.v0 - 1.0).abs() < 1e-15);
        assert!((ev.v1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn private_evariable_is_exactly_fair_rationally() {
        // m0 v1 + (1 - m0) v0 = 1 holds in exact rational arithmetic because
        // v1, v0 are marginal ratios.
        let pair = testgen::random_discrete_pair(7, 6);
        let sol = solve_binary_threshold(&pair, &eps(1.0)).unwrap();
        let ev = private_evariable(&sol.mechanism, &pair).unwrap();
        let m0 = rational(ev.m0);
        let m1 = rational(ev.m1);
        let v1 = &m1 / &m0;
        let v0 = (BigRational::one() - &m1) / (BigRational::one() - &m0);
        let total = &m0 * &v1 + (BigRational::one() - &m0) * &v0;
        assert_eq!(total, BigRational::one());
        // The f64 computation matches to within an ulp or two.
        assert!((ev.m0 * ev.v1 + (1.0 - ev.m0) * ev.v0 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn private_evariable_reproduces_kelly_values() {
        for &e in &[0.1, 1.0, 5.0] {
            let b = eps(e);
            let q = 0.8;
            let pair = ber_pair(0.5, q);
            let sol = solve_binary_threshold(&pair, &b).unwrap();
            let ev = private_evariable(&sol.mechanism, &pair).unwrap();
            let f = kelly_fraction(q, &b).unwrap();
            assert!((ev.v1 - (1.0 + f)).abs() < 1e-12, "eps={e}");
            assert!((ev.v0 - (1.0 - f)).abs() < 1e-12, "eps={e}");
        }
    }

    #[test]
    fn kelly_fraction_examples() {
        // q = 0.75, eps = ln 3: f* = 0.5 * (3-1)/(3+1) = 0.25.
        let f = kelly_fraction(0.75, &eps(3.0_f64.ln())).unwrap();
        assert!((f - 0.25).abs() < 1e-14);
        // eps large: approaches the classical 2q - 1.
        let f = kelly_fraction(0.75, &eps(30.0)).unwrap();
        assert!((f - 0.5).abs() < 1e-10);
        // eps small: no information survives.
        let f = kelly_fraction(0.75, &eps(1e-9)).unwrap();
        assert!(f < 1e-9);
        assert!(kelly_fraction(0.5, &eps(1.0)).is_err());
        assert!(kelly_fraction(1.0, &eps(1.0)).is_err());
    }

    #[test]
    fn simulation_is_deterministic_and_positive() {
        let b = eps(1.0);
        let a = simulate_ldp_kelly(0.75, 0.75, &b, 500, 42).unwrap();
        let c = simulate_ldp_kelly(0.75, 0.75, &b, 500, 42).unwrap();
        assert_eq!(a.ys, c.ys);
        assert_eq!(a.wealths, c.wealths);
        assert!(a.wealths.iter().all(|&w| w > 0.0));
        assert_eq!(a.wealths[0], 1.0);
        // Every step multiplies by exactly 1 + f* or 1 - f*.
        for (k, &y) in a.ys.iter().enumerate() {
            assert_eq!(a.wealths[k + 1], a.wealths[k] * a.e_value(y));
        }
    }

    #[test]
    fn simulation_mean_log_growth_near_kl() {
        // q_true = q_alt = 0.75, eps = 1: Y ~ Ber(m1) with m1 = (1+f*)/2.
        let b = eps(1.0);
        let traj = simulate_ldp_kelly(0.75, 0.75, &b, 200_000, 0).unwrap();
        let f = kelly_fraction(0.75, &b).unwrap();
        let m1 = (1.0 + f) / 2.0;
        let want = bernoulli_kl(m1, 0.5);
        let up = (1.0 + f).ln();
        let down = (1.0 - f).ln();
        let sd = (m1 * (1.0 - m1)).sqrt() * (up - down);
        let se = sd / (traj.ys.len() as f64).sqrt();
        assert!((traj.mean_log_growth() - want).abs() < 3.0 * se);
    }

    #[test]
    fn postprocess_partitions_u_and_matches_channel() {
        let pair = ber_pair(0.5, 0.75);
        let b = eps(1.0);
        let sol = solve_binary_threshold(&pair, &b).unwrap();
        let ev = private_evariable(&sol.mechanism, &pair).unwrap();
        // High branch fires when L > t and u is below the high probability.
        let x_hi = 1.0;
        assert!(pair.lr_at(x_hi).unwrap() > sol.threshold);
        assert_eq!(
            randomized_postprocess(&pair, &ev, x_hi, b.high_fire_prob() - 1e-12).unwrap(),
            ev.v1
        );
        assert_eq!(randomized_postprocess(&pair, &ev, x_hi, b.high_fire_prob()).unwrap(), ev.v0);
        // Averaging over a fine u-grid reproduces Q(1|x) at every atom.
        for &x in &[0.0, 1.0] {
            let n = 1_000_000u32;
            let hits = (0..n)
                .filter(|&i| {
                    let u = i as f64 / n as f64;
                    randomized_postprocess(&pair, &ev, x, u).unwrap() == ev.v1
                })
                .count();
            let q = sol.mechanism.q1_of_lr(pair.lr_at(x).unwrap());
            // The u-grid measures the firing interval to within 1/n.
            assert!((hits as f64 / n as f64 - q).abs() <= 1.5 / n as f64);
        }
    }

    #[test]
    fn composite_degenerate_matches_simple() {
        use crate::composite::{CompositeProblem, LfdPair};
        let lfd = LfdPair::new(
            Distribution::bernoulli(0.5).unwrap(),
            Distribution::bernoulli(0.75).unwrap(),
        )
        .unwrap();
        let problem = CompositeProblem::new(lfd, vec![], vec![]).unwrap();
        let b = eps(1.0);
        let (ev, report) = composite_ldp(&problem, &b).unwrap();
        assert!(report.passed);
        let pair = ber_pair(0.5, 0.75);
        let sol = solve_binary_threshold(&pair, &b).unwrap();
        let simple = private_evariable(&sol.mechanism, &pair).unwrap();
        assert!((ev.v0 - simple.v0).abs() < 1e-15);
        assert!((ev.v1 - simple.v1).abs() < 1e-15);
        assert!((report.worst_case_growth - sol.objective).abs() < 1e-15);
    }
}
