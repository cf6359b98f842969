//! Probability distributions, likelihood ratios, expectations, and KL
//! divergences — the numerical substrate every solver integrates against.
//!
//! Two families are supported and never mixed inside one hypothesis pair:
//!
//! * **discrete** laws (explicit atoms, plus Bernoulli as a two-atom special
//!   case) where every expectation is an exact weighted sum;
//! * **continuous** laws (Gaussian, Uniform) handled by fixed Gauss-Legendre
//!   quadrature on a declared bounded window, segmented at density
//!   discontinuities and at caller-supplied breakpoints so that kinked or
//!   stepped integrands (clipped likelihood ratios, threshold channels) keep
//!   spectral accuracy.
//!
//! All values are immutable after construction and every operation is a pure
//! function of its inputs.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::numeric;

/// Default node count for continuous-law quadrature.
pub const DEFAULT_QUAD_NODES: usize = 256;
/// Default Gaussian window half-width, in standard deviations.
pub const GAUSSIAN_WINDOW_SDS: f64 = 8.0;
/// Tolerance on sum(probs) = 1 at discrete construction.
pub const PROB_SUM_TOL: f64 = 1e-12;

/// Quadrature descriptor for continuous laws: a bounded window and a node
/// count applied per smooth segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub lo: f64,
    pub hi: f64,
    pub nodes: usize,
}

impl Quadrature {
    fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo >= self.hi {
            return Err(Error::InvalidDistribution(format!(
                "quadrature window must satisfy lo < hi, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.nodes < 16 {
            return Err(Error::InvalidDistribution(format!(
                "quadrature needs at least 16 nodes, got {}",
                self.nodes
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
enum Repr {
    Discrete {
        support: Vec<f64>,
        probs: Vec<f64>,
    },
    Bernoulli {
        p: f64,
        support: Vec<f64>,
        probs: Vec<f64>,
    },
    Gaussian {
        mean: f64,
        sd: f64,
        quad: Quadrature,
    },
    Uniform {
        lo: f64,
        hi: f64,
        quad: Quadrature,
    },
}

/// A finite-support mass function or a quadrature-backed continuous density;
/// the unit of all expectations in this crate.
#[derive(Debug, Clone)]
pub struct Distribution {
    repr: Repr,
}

impl Distribution {
    /// Discrete law from atoms. Zero-mass atoms are pruned, values must be
    /// distinct, and probabilities must be nonnegative and sum to 1 within
    /// [`PROB_SUM_TOL`].
    pub fn discrete(support: Vec<f64>, probs: Vec<f64>) -> Result<Self> {
        if support.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "support has {} values but probs has {}",
                support.len(),
                probs.len()
            )));
        }
        if support.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        for (&x, &p) in support.iter().zip(&probs) {
            if !x.is_finite() || !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidDistribution(format!(
                    "atom ({x}, {p}) is not a finite nonnegative mass point"
                )));
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probs sum to {total}, expected 1 within {PROB_SUM_TOL:e}"
            )));
        }
        let mut atoms: Vec<(f64, f64)> = support
            .into_iter()
            .zip(probs)
            .filter(|&(_, p)| p > 0.0)
            .collect();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in atoms.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidDistribution(format!(
                    "duplicate support value {}",
                    w[0].0
                )));
            }
        }
        let (support, probs) = atoms.into_iter().unzip();
        Ok(Self {
            repr: Repr::Discrete { support, probs },
        })
    }

    /// Bernoulli(p) on {0, 1}.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(Error::InvalidDistribution(format!(
                "Bernoulli parameter must lie in [0, 1], got {p}"
            )));
        }
        // Zero-mass atoms pruned, same as the general discrete path.
        let (support, probs) = if p == 0.0 {
            (vec![0.0], vec![1.0])
        } else if p == 1.0 {
            (vec![1.0], vec![1.0])
        } else {
            (vec![0.0, 1.0], vec![1.0 - p, p])
        };
        Ok(Self {
            repr: Repr::Bernoulli { p, support, probs },
        })
    }

    /// Gaussian with the default window mean ± 8 sd and 256 nodes.
    pub fn gaussian(mean: f64, sd: f64) -> Result<Self> {
        let quad = Quadrature {
            lo: mean - GAUSSIAN_WINDOW_SDS * sd,
            hi: mean + GAUSSIAN_WINDOW_SDS * sd,
            nodes: DEFAULT_QUAD_NODES,
        };
        Self::gaussian_with_quad(mean, sd, quad)
    }

    pub fn gaussian_with_quad(mean: f64, sd: f64, quad: Quadrature) -> Result<Self> {
        if !mean.is_finite() || !sd.is_finite() || sd <= 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "Gaussian requires finite mean and sd > 0, got ({mean}, {sd})"
            )));
        }
        quad.validate()?;
        Ok(Self {
            repr: Repr::Gaussian { mean, sd, quad },
        })
    }

    /// Uniform on (lo, hi) with natural window bounds and 256 nodes.
    pub fn uniform(lo: f64, hi: f64) -> Result<Self> {
        let quad = Quadrature {
            lo,
            hi,
            nodes: DEFAULT_QUAD_NODES,
        };
        Self::uniform_with_quad(lo, hi, quad)
    }

    pub fn uniform_with_quad(lo: f64, hi: f64, quad: Quadrature) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::InvalidDistribution(format!(
                "Uniform requires lo < hi, got ({lo}, {hi})"
            )));
        }
        quad.validate()?;
        Ok(Self {
            repr: Repr::Uniform { lo, hi, quad },
        })
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self.repr, Repr::Discrete { .. } | Repr::Bernoulli { .. })
    }

    /// Atoms of a discrete law: (support, probs), both pruned of zero mass.
    pub fn atoms(&self) -> Option<(&[f64], &[f64])> {
        match &self.repr {
            Repr::Discrete { support, probs } | Repr::Bernoulli { support, probs, .. } => {
                Some((support, probs))
            }
            _ => None,
        }
    }

    /// Density of a continuous law at `x`; 0 outside the support.
    pub fn density(&self, x: f64) -> Option<f64> {
        match &self.repr {
            Repr::Gaussian { mean, sd, .. } => {
                let z = (x - mean) / sd;
                Some((-0.5 * z * z).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt()))
            }
            Repr::Uniform { lo, hi, .. } => {
                if x >= *lo && x <= *hi {
                    Some(1.0 / (hi - lo))
                } else {
                    Some(0.0)
                }
            }
            _ => None,
        }
    }

    /// Quadrature descriptor of a continuous law.
    pub fn quad(&self) -> Option<Quadrature> {
        match &self.repr {
            Repr::Gaussian { quad, .. } | Repr::Uniform { quad, .. } => Some(*quad),
            _ => None,
        }
    }

    /// Points where the density is discontinuous (uniform endpoints).
    fn density_jumps(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Uniform { lo, hi, .. } => vec![*lo, *hi],
            _ => Vec::new(),
        }
    }

    /// Expected value of `f`: exact weighted sum for discrete laws,
    /// fixed-node Gauss-Legendre quadrature for continuous ones.
    pub fn expectation(&self, f: impl Fn(f64) -> f64) -> Result<f64> {
        self.expectation_with_breaks(f, &[])
    }

    /// Like [`expectation`](Self::expectation), but for continuous laws the
    /// quadrature window is additionally split at `breaks` so integrands with
    /// kinks or jumps at known abscissae keep spectral accuracy.
    pub fn expectation_with_breaks(&self, f: impl Fn(f64) -> f64, breaks: &[f64]) -> Result<f64> {
        match &self.repr {
            Repr::Discrete { support, probs } | Repr::Bernoulli { support, probs, .. } => {
                let mut total = 0.0;
                for (&x, &p) in support.iter().zip(probs) {
                    let v = f(x);
                    if !v.is_finite() {
                        return Err(Error::Integration { x, value: v, mass: p });
                    }
                    total += p * v;
                }
                Ok(total)
            }
            Repr::Gaussian { quad, .. } | Repr::Uniform { quad, .. } => {
                let mut cuts = self.density_jumps();
                cuts.extend_from_slice(breaks);
                let segments = segment(quad.lo, quad.hi, &cuts);
                let mut total = 0.0;
                for (a, b) in segments {
                    for (x, w) in numeric::gauss_legendre_on(quad.nodes, a, b) {
                        let mass = w * self.density(x).expect("continuous law");
                        if mass == 0.0 {
                            continue;
                        }
                        let v = f(x);
                        if !v.is_finite() {
                            return Err(Error::Integration { x, value: v, mass });
                        }
                        total += mass * v;
                    }
                }
                Ok(total)
            }
        }
    }

    /// Mass at an exact support point of a discrete law (0 if absent).
    pub fn mass_at(&self, x: f64) -> Option<f64> {
        let (support, probs) = self.atoms()?;
        Some(match support.binary_search_by(|s| s.total_cmp(&x)) {
            Ok(i) => probs[i],
            Err(_) => 0.0,
        })
    }
}

/// Split [lo, hi] at the interior cut points, dropping degenerate slivers.
fn segment(lo: f64, hi: f64, cuts: &[f64]) -> Vec<(f64, f64)> {
    let span = hi - lo;
    let mut edges: Vec<f64> = cuts
        .iter()
        .copied()
        .filter(|&c| c > lo && c < hi)
        .collect();
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    let mut out = Vec::with_capacity(edges.len() + 1);
    let mut prev = lo;
    for c in edges {
        if c - prev > 1e-14 * span {
            out.push((prev, c));
            prev = c;
        }
    }
    out.push((prev, hi));
    out
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Discrete { support, .. } => write!(f, "discrete(n={})", support.len()),
            Repr::Bernoulli { p, .. } => write!(f, "Ber({p})"),
            Repr::Gaussian { mean, sd, .. } => write!(f, "N({mean}, {sd})"),
            Repr::Uniform { lo, hi, .. } => write!(f, "U({lo}, {hi})"),
        }
    }
}

// ---------------------------------------------------------------------------
// JSON schema
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum DistributionSchema {
    Discrete {
        support: Vec<f64>,
        probs: Vec<f64>,
    },
    Bernoulli {
        p: f64,
    },
    Gaussian {
        mean: f64,
        sd: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        quad: Option<Quadrature>,
    },
    Uniform {
        lo: f64,
        hi: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        quad: Option<Quadrature>,
    },
}

impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let schema = match &self.repr {
            Repr::Discrete { support, probs } => DistributionSchema::Discrete {
                support: support.clone(),
                probs: probs.clone(),
            },
            Repr::Bernoulli { p, .. } => DistributionSchema::Bernoulli { p: *p },
            Repr::Gaussian { mean, sd, quad } => DistributionSchema::Gaussian {
                mean: *mean,
                sd: *sd,
                quad: Some(*quad),
            },
            Repr::Uniform { lo, hi, quad } => DistributionSchema::Uniform {
                lo: *lo,
                hi: *hi,
                quad: Some(*quad),
            },
        };
        schema.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let schema = DistributionSchema::deserialize(deserializer)?;
        let built = match schema {
            DistributionSchema::Discrete { support, probs } => {
                Distribution::discrete(support, probs)
            }
            DistributionSchema::Bernoulli { p } => Distribution::bernoulli(p),
            DistributionSchema::Gaussian { mean, sd, quad } => match quad {
                Some(q) => Distribution::gaussian_with_quad(mean, sd, q),
                None => Distribution::gaussian(mean, sd),
            },
            DistributionSchema::Uniform { lo, hi, quad } => match quad {
                Some(q) => Distribution::uniform_with_quad(lo, hi, q),
                None => Distribution::uniform(lo, hi),
            },
        };
        built.map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Hypothesis pairs
// ---------------------------------------------------------------------------

/// The shared evaluation grid of a hypothesis pair: points, the null and
/// alternative mass (or quadrature weight times density) at each point, and
/// the likelihood ratio there.
#[derive(Debug, Clone)]
pub struct PairGrid {
    pub points: Vec<f64>,
    pub null_w: Vec<f64>,
    pub alt_w: Vec<f64>,
    pub lr: Vec<f64>,
}

/// A null/alternative pair (P0, P1) sharing one support or quadrature grid,
/// with the likelihood-ratio evaluator L(x) = dP1/dP0.
#[derive(Debug, Clone)]
pub struct HypothesisPair {
    null: Distribution,
    alt: Distribution,
    grid: PairGrid,
    /// Interior x-points where either density jumps (continuous pairs).
    base_breaks: Vec<f64>,
}

impl HypothesisPair {
    /// Build a pair, merging supports (discrete) or windows (continuous) and
    /// checking absolute continuity on the resulting grid. Mixing a discrete
    /// with a continuous law is rejected: no dominating measure is fixed for
    /// that case.
    pub fn new(null: Distribution, alt: Distribution) -> Result<Self> {
        match (null.is_discrete(), alt.is_discrete()) {
            (true, true) => Self::new_discrete(null, alt),
            (false, false) => Self::new_continuous(null, alt),
            _ => Err(Error::InvalidDistribution(
                "hypothesis pair must be discrete/discrete or continuous/continuous".into(),
            )),
        }
    }

    fn new_discrete(null: Distribution, alt: Distribution) -> Result<Self> {
        let (s0, _) = null.atoms().expect("discrete");
        let (s1, _) = alt.atoms().expect("discrete");
        let mut points: Vec<f64> = s0.iter().chain(s1.iter()).copied().collect();
        points.sort_by(f64::total_cmp);
        points.dedup();
        let mut null_w = Vec::with_capacity(points.len());
        let mut alt_w = Vec::with_capacity(points.len());
        let mut lr = Vec::with_capacity(points.len());
        for &x in &points {
            let p0 = null.mass_at(x).expect("discrete");
            let p1 = alt.mass_at(x).expect("discrete");
            if p1 > 0.0 && p0 == 0.0 {
                return Err(Error::AbsoluteContinuity { x, null_mass: p0, alt_mass: p1 });
            }
            null_w.push(p0);
            alt_w.push(p1);
            lr.push(if p0 > 0.0 { p1 / p0 } else { 0.0 });
        }
        Ok(Self {
            null,
            alt,
            grid: PairGrid { points, null_w, alt_w, lr },
            base_breaks: Vec::new(),
        })
    }

    fn new_continuous(null: Distribution, alt: Distribution) -> Result<Self> {
        let q0 = null.quad().expect("continuous");
        let q1 = alt.quad().expect("continuous");
        let lo = q0.lo.min(q1.lo);
        let hi = q0.hi.max(q1.hi);
        let nodes = q0.nodes.max(q1.nodes);
        let mut base_breaks: Vec<f64> = null
            .density_jumps()
            .into_iter()
            .chain(alt.density_jumps())
            .filter(|&c| c > lo && c < hi)
            .collect();
        base_breaks.sort_by(f64::total_cmp);
        base_breaks.dedup();

        let mut points = Vec::new();
        let mut null_w = Vec::new();
        let mut alt_w = Vec::new();
        let mut lr = Vec::new();
        for (a, b) in segment(lo, hi, &base_breaks) {
            for (x, w) in numeric::gauss_legendre_on(nodes, a, b) {
                let p0 = null.density(x).expect("continuous");
                let p1 = alt.density(x).expect("continuous");
                if p1 > 0.0 && p0 == 0.0 {
                    return Err(Error::AbsoluteContinuity { x, null_mass: p0, alt_mass: p1 });
                }
                points.push(x);
                null_w.push(w * p0);
                alt_w.push(w * p1);
                lr.push(if p0 > 0.0 { p1 / p0 } else { 0.0 });
            }
        }
        Ok(Self {
            null,
            alt,
            grid: PairGrid { points, null_w, alt_w, lr },
            base_breaks,
        })
    }

    pub fn null_dist(&self) -> &Distribution {
        &self.null
    }

    pub fn alt_dist(&self) -> &Distribution {
        &self.alt
    }

    pub fn grid(&self) -> &PairGrid {
        &self.grid
    }

    pub fn is_continuous(&self) -> bool {
        !self.null.is_discrete()
    }

    /// True when the two laws coincide on the working grid.
    pub fn is_degenerate(&self) -> bool {
        self.grid
            .lr
            .iter()
            .zip(&self.grid.null_w)
            .all(|(&l, &w)| w == 0.0 || (l - 1.0).abs() <= 1e-15)
    }

    /// Likelihood ratio dP1/dP0 at `x`.
    ///
    /// Discrete pairs require `x` to be a grid point; continuous pairs
    /// evaluate the density ratio anywhere (composite sweeps probe members
    /// whose windows extend past the pair's own).
    pub fn lr_at(&self, x: f64) -> Result<f64> {
        if self.is_continuous() {
            let p0 = self.null.density(x).expect("continuous");
            let p1 = self.alt.density(x).expect("continuous");
            if p1 > 0.0 && p0 == 0.0 {
                return Err(Error::AbsoluteContinuity { x, null_mass: p0, alt_mass: p1 });
            }
            Ok(if p0 > 0.0 { p1 / p0 } else { 0.0 })
        } else {
            match self.grid.points.binary_search_by(|p| p.total_cmp(&x)) {
                Ok(i) => Ok(self.grid.lr[i]),
                Err(_) => Err(Error::NotOnGrid(x)),
            }
        }
    }

    /// (min, max) of the likelihood ratio over the grid.
    pub fn lr_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (&l, &w) in self.grid.lr.iter().zip(&self.grid.null_w) {
            if w > 0.0 {
                lo = lo.min(l);
                hi = hi.max(l);
            }
        }
        (lo, hi)
    }

    /// x-points where L(x) crosses `v` (continuous pairs; empty for discrete).
    /// Found by scanning grid intervals for sign changes and bisecting.
    pub fn lr_preimages(&self, v: f64) -> Vec<f64> {
        if !self.is_continuous() {
            return Vec::new();
        }
        let pts = &self.grid.points;
        let lr = &self.grid.lr;
        let mut roots = Vec::new();
        for i in 0..pts.len().saturating_sub(1) {
            let (a, b) = (lr[i] - v, lr[i + 1] - v);
            if a == 0.0 {
                roots.push(pts[i]);
            } else if (a > 0.0) != (b > 0.0) {
                let g = |x: f64| self.lr_at(x).unwrap_or(0.0) - v;
                let r = numeric::bisect(g, pts[i], pts[i + 1], 1e-15, 120);
                roots.push(r.x);
            }
        }
        if let Some(&last) = lr.last() {
            if last == v {
                roots.push(*pts.last().unwrap());
            }
        }
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * a.abs().max(1.0));
        roots
    }

    /// Merge the pair's density-jump breaks with the x-preimages of the given
    /// likelihood-ratio breakpoints.
    fn x_breaks_for(&self, lr_breaks: &[f64]) -> Vec<f64> {
        let mut cuts = self.base_breaks.clone();
        for &v in lr_breaks {
            cuts.extend(self.lr_preimages(v));
        }
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        cuts
    }

    /// E_{P0}[g(L(X))], splitting continuous integration at the x-preimages
    /// of `lr_breaks` (L-values where g has a kink or jump).
    pub fn expect_null_of_lr(&self, g: impl Fn(f64) -> f64, lr_breaks: &[f64]) -> Result<f64> {
        self.expect_side_of_lr(true, g, lr_breaks)
    }

    /// E_{P1}[g(L(X))].
    pub fn expect_alt_of_lr(&self, g: impl Fn(f64) -> f64, lr_breaks: &[f64]) -> Result<f64> {
        self.expect_side_of_lr(false, g, lr_breaks)
    }

    fn expect_side_of_lr(
        &self,
        null_side: bool,
        g: impl Fn(f64) -> f64,
        lr_breaks: &[f64],
    ) -> Result<f64> {
        if self.is_continuous() {
            let cuts = self.x_breaks_for(lr_breaks);
            let d = if null_side { &self.null } else { &self.alt };
            d.expectation_with_breaks(|x| g(self.lr_at(x).unwrap_or(0.0)), &cuts)
        } else {
            let w = if null_side { &self.grid.null_w } else { &self.grid.alt_w };
            let mut total = 0.0;
            for ((&x, &wi), &l) in self.grid.points.iter().zip(w).zip(&self.grid.lr) {
                if wi == 0.0 {
                    continue;
                }
                let v = g(l);
                if !v.is_finite() {
                    return Err(Error::Integration { x, value: v, mass: wi });
                }
                total += wi * v;
            }
            Ok(total)
        }
    }

    /// E_{member}[g(L(X))] for an arbitrary distribution evaluated against
    /// this pair's likelihood ratio (composite-family sweeps). Discrete
    /// members must live on the pair's support.
    pub fn expect_member_of_lr(
        &self,
        member: &Distribution,
        g: impl Fn(f64) -> f64,
        lr_breaks: &[f64],
    ) -> Result<f64> {
        if self.is_continuous() {
            if member.is_discrete() {
                return Err(Error::InvalidDistribution(
                    "discrete member probed against a continuous pair".into(),
                ));
            }
            let mut cuts = self.x_breaks_for(lr_breaks);
            cuts.extend(member.density_jumps());
            member.expectation_with_breaks(|x| g(self.lr_at(x).unwrap_or(0.0)), &cuts)
        } else {
            let (support, probs) = member.atoms().ok_or_else(|| {
                Error::InvalidDistribution("continuous member probed against a discrete pair".into())
            })?;
            let mut total = 0.0;
            for (&x, &p) in support.iter().zip(probs) {
                let l = self.lr_at(x)?;
                let v = g(l);
                if !v.is_finite() {
                    return Err(Error::Integration { x, value: v, mass: p });
                }
                total += p * v;
            }
            Ok(total)
        }
    }
}

impl Serialize for HypothesisPair {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct PairSchema<'a> {
            null: &'a Distribution,
            alt: &'a Distribution,
        }
        PairSchema { null: &self.null, alt: &self.alt }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for HypothesisPair {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct PairSchema {
            null: Distribution,
            alt: Distribution,
        }
        let s = PairSchema::deserialize(deserializer)?;
        HypothesisPair::new(s.null, s.alt).map_err(D::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Expected value of a pointwise function under `dist`.
pub fn expectation(dist: &Distribution, f: impl Fn(f64) -> f64) -> Result<f64> {
    dist.expectation(f)
}

/// Likelihood ratio dP1/dP0 of the pair at `x`.
pub fn likelihood_ratio(pair: &HypothesisPair, x: f64) -> Result<f64> {
    pair.lr_at(x)
}

/// KL divergence D(P1 || P0) = E_{P1}[log L] in nats.
pub fn kl_divergence(p1: &Distribution, p0: &Distribution) -> Result<f64> {
    let pair = HypothesisPair::new(p0.clone(), p1.clone())?;
    kl_of_pair(&pair)
}

/// KL divergence of an already-constructed pair, E_{P1}[log L].
pub fn kl_of_pair(pair: &HypothesisPair) -> Result<f64> {
    // Points with zero alternative mass contribute 0 (0 log 0 convention);
    // the expectation engine skips zero-weight points before evaluating ln.
    pair.expect_alt_of_lr(|l| l.ln(), &[])
}

/// d(Ber(p1) || Ber(p0)) in nats, with the 0 log 0 = 0 convention and
/// negative floating-point noise near p1 = p0 clamped to 0.
pub fn bernoulli_kl(p1: f64, p0: f64) -> f64 {
    let term = |a: f64, b: f64| if a == 0.0 { 0.0 } else { a * (a / b).ln() };
    let kl = term(p1, p0) + term(1.0 - p1, 1.0 - p0);
    if kl < 0.0 && kl > -1e-12 {
        0.0
    } else {
        kl
    }
}

/// Growth diagnostics for an object claiming to be an e-variable: expected
/// log e-value under the alternative (nats), the null expectation, and named
/// extras such as the second moment.
#[derive(Debug, Clone)]
pub struct GrowthReport {
    pub growth_rate: f64,
    pub null_expectation: f64,
    pub extras: BTreeMap<String, f64>,
}
