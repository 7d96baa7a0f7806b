//! Single-valued neutrosophic sets and the symmetric cross-entropy that
//! drives classification: per-feature (truth, indeterminacy, falsity)
//! triples, an entropy measure, the symmetric cross-entropy divergence, the
//! standard complement, the weighted form and minimum-argument labeling.
//!
//! All logarithms are base 2. The cross-entropy keeps the 1/2 factors
//! inside the log denominators in both the plain and the weighted form:
//! without them the measure of two identical sets is nonzero, which would
//! break the minimum-argument principle's fixed point.

use crate::error::{CoreError, Result};

/// Default floor applied to the indeterminacy component when an interval is
/// converted to a neutrosophic set.
pub const DEFAULT_IND_FLOOR: f64 = 0.01;

/// One feature of a single-valued neutrosophic set.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SvnsFeature {
    /// Truth membership.
    pub mu: f64,
    /// Indeterminacy.
    pub ind: f64,
    /// Falsity membership.
    pub fal: f64,
}

impl SvnsFeature {
    pub fn new(mu: f64, ind: f64, fal: f64) -> Result<Self> {
        for (name, v) in [("mu", mu), ("ind", ind), ("fal", fal)] {
            if !(0.0..=1.0).contains(&v) || !v.is_finite() {
                return Err(CoreError::InvalidArgument(format!(
                    "{name} component {v} outside [0, 1]"
                )));
            }
        }
        let sum = mu + ind + fal;
        if !(0.0..=3.0).contains(&sum) {
            return Err(CoreError::InvalidArgument(format!(
                "component sum {sum} outside [0, 3]"
            )));
        }
        Ok(Self { mu, ind, fal })
    }
}

/// A single-valued neutrosophic set over n features.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Svns {
    features: Vec<SvnsFeature>,
}

impl Svns {
    pub fn new(features: Vec<SvnsFeature>) -> Self {
        Self { features }
    }

    /// Build from raw (mu, ind, fal) triples, validating each.
    pub fn from_triples(triples: &[(f64, f64, f64)]) -> Result<Self> {
        let features = triples
            .iter()
            .map(|&(mu, ind, fal)| SvnsFeature::new(mu, ind, fal))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { features })
    }

    pub fn features(&self) -> &[SvnsFeature] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }
}

/// Per-feature energy interval bounds, each inside [0, 1].
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EnergyInterval {
    bounds: Vec<(f64, f64)>,
}

impl EnergyInterval {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        for (i, &(lb, ub)) in bounds.iter().enumerate() {
            if !(0.0 <= lb && lb <= ub && ub <= 1.0) {
                return Err(CoreError::InvalidArgument(format!(
                    "feature {i}: bounds [{lb}, {ub}] must satisfy 0 <= LB <= UB <= 1"
                )));
            }
        }
        Ok(Self { bounds })
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }
}

/// Convert an energy interval to a neutrosophic set: truth takes the lower
/// bound, falsity the complement of the upper bound, and indeterminacy the
/// remainder, floored at `ind_floor`.
pub fn svns_from_interval(iv: &EnergyInterval, ind_floor: f64) -> Svns {
    let features = iv
        .bounds()
        .iter()
        .map(|&(lb, ub)| {
            let fal = 1.0 - ub;
            let ind = (1.0 - fal - lb).max(ind_floor);
            SvnsFeature { mu: lb, ind, fal }
        })
        .collect();
    Svns::new(features)
}

/// The neutrosophic entropy measure, evaluated exactly as its source
/// formula prints (the per-feature log terms are typographically
/// inconsistent there; this follows the letter of the formula, and the
/// claimed bound is available from [`tn_claimed_max`] for comparison
/// rather than being asserted).
pub fn tn_measure(a: &Svns) -> f64 {
    let n = a.len() as f64;
    let mut total = 2.0 * n * (3.0f64 / 5.0).log2();
    for f in a.features() {
        let (mu, ind, fal) = (f.mu, f.ind, f.fal);
        total += (1.0 + 0.4 * (ind * (1.0 - ind)).sqrt()).log2();
        total += (2.0 + mu + fal) / 3.0
            * (1.0 + (2.0 + 2.0 * (mu * fal).sqrt()) / (2.0 + mu + fal)).log2();
        total += (4.0 - mu - fal) / 3.0
            * ((2.0 + 2.0 * ((1.0 - mu) * (1.0 - fal)).sqrt()) / (4.0 - mu - fal)).log2();
    }
    total
}

/// Claimed maximum of the entropy measure for `n` features:
/// `3 (log2 2 - log2 (5/3)) n`.
pub fn tn_claimed_max(n: usize) -> f64 {
    3.0 * (1.0 - (5.0f64 / 3.0).log2()) * n as f64
}

/// One channel's contribution to the symmetric cross-entropy.
///
/// Every intermediate is symmetric in (a, b), so swapping the arguments
/// reproduces the value bit for bit; equal arguments short-circuit to an
/// exact zero.
fn cross_term(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let s = a + b;
    let g = (a * b).sqrt();
    let h = ((1.0 - a) * (1.0 - b)).sqrt();
    let t1 = (2.0 + s) * ((2.0 + s) / (0.5 * (4.0 + s + 2.0 * g))).log2();
    let t2 = (4.0 - s) * ((4.0 - s) / (0.5 * (6.0 - s + 2.0 * h))).log2();
    t1 + t2
}

/// Symmetric single-valued neutrosophic cross-entropy: nonnegative,
/// symmetric, zero exactly when the sets coincide.
pub fn svnce(a: &Svns, b: &Svns) -> Result<f64> {
    if a.len() != b.len() {
        return Err(CoreError::InvalidArgument(format!(
            "feature count mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut total = 0.0;
    for (fa, fb) in a.features().iter().zip(b.features()) {
        total += cross_term(fa.mu, fb.mu);
        total += cross_term(fa.ind, fb.ind);
        total += cross_term(fa.fal, fb.fal);
    }
    Ok(total)
}

/// Standard neutrosophic complement: swap truth and falsity, reflect
/// indeterminacy. An involution that leaves the cross-entropy invariant.
pub fn complement(a: &Svns) -> Svns {
    Svns::new(
        a.features()
            .iter()
            .map(|f| SvnsFeature {
                mu: f.fal,
                ind: 1.0 - f.ind,
                fal: f.mu,
            })
            .collect(),
    )
}

/// Weighted symmetric cross-entropy: per-feature contributions scaled by
/// non-negative weights before summation.
pub fn weighted_svnce(test: &Svns, train: &Svns, weights: &[f64]) -> Result<f64> {
    if test.len() != train.len() || weights.len() != test.len() {
        return Err(CoreError::InvalidArgument(format!(
            "feature/weight count mismatch: {} vs {} vs {} weights",
            test.len(),
            train.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return Err(CoreError::InvalidArgument(
            "weights must be finite and non-negative".into(),
        ));
    }
    let mut total = 0.0;
    for ((ft, fr), &w) in test.features().iter().zip(train.features()).zip(weights) {
        total += w
            * (cross_term(ft.mu, fr.mu) + cross_term(ft.ind, fr.ind) + cross_term(ft.fal, fr.fal));
    }
    Ok(total)
}

/// Outcome of minimum-cross-entropy labeling.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Classification {
    /// Label of the template with minimal weighted cross-entropy.
    pub label: String,
    /// Every template's score, in declaration order.
    pub scores: Vec<(String, f64)>,
    /// Set when another template ties the minimum exactly; the first
    /// declared label wins.
    pub tie: bool,
}

/// Label `test` with the template of minimal weighted cross-entropy.
pub fn classify_min_svnce(
    test: &Svns,
    templates: &[(String, Svns)],
    weights: &[f64],
) -> Result<Classification> {
    if templates.is_empty() {
        return Err(CoreError::InvalidArgument(
            "need at least one labeled template".into(),
        ));
    }
    let mut scores = Vec::with_capacity(templates.len());
    for (label, svns) in templates {
        scores.push((label.clone(), weighted_svnce(test, svns, weights)?));
    }
    let mut best = 0;
    let mut tie = false;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if s.1 < scores[best].1 {
            best = i;
            tie = false;
        } else if s.1 == scores[best].1 {
            tie = true;
        }
    }
    Ok(Classification {
        label: scores[best].0.clone(),
        scores,
        tie,
    })
}
