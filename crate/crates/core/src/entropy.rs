//! Distributions and the entropies built from effective logarithms.

use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::efflog::{eff_log, LogKind};
use crate::error::{Error, Result};

/// Allowed deviation of `Σ p` from 1.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// A finite probability vector over labeled outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    outcomes: Vec<String>,
    probs: Vec<f64>,
}

/// How the second column of a distribution file is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightMode {
    #[default]
    Probabilities,
    /// Nonnegative counts, always normalized.
    Counts,
}

impl Distribution {
    pub fn new(outcomes: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("no outcomes".into()));
        }
        if outcomes.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} labels for {} probabilities",
                outcomes.len(),
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidDistribution(format!(
                "probability {p} outside [0, 1]"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}"
            )));
        }
        let mut seen = HashMap::new();
        for (i, label) in outcomes.iter().enumerate() {
            if let Some(j) = seen.insert(label.as_str(), i) {
                return Err(Error::InvalidDistribution(format!(
                    "label {label:?} appears at positions {j} and {i}"
                )));
            }
        }
        Ok(Distribution { outcomes, probs })
    }

    /// Outcomes labeled `x0, x1, ...`.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        Distribution::new(default_labels(probs.len()), probs)
    }

    /// Normalize nonnegative weights.
    pub fn from_weights(outcomes: Vec<String>, weights: &[f64]) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidDistribution(format!(
                "weight {w} is not a nonnegative number"
            )));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Distribution::new(outcomes, weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Distribution::from_weights(default_labels(n), &vec![1.0; n])
    }

    /// Point mass on outcome `index` of `n`.
    pub fn deterministic(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::InvalidParameter(format!(
                "index {index} out of {n} outcomes"
            )));
        }
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        Distribution::from_probs(probs)
    }

    /// Random strictly positive distribution on `n` outcomes. Weights are
    /// uniform draws raised to a random power in `[1, 8]` so that both flat
    /// and strongly skewed vectors show up.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<Self> {
        let power: f64 = rng.gen_range(1.0..=8.0);
        let weights: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(f64::EPSILON..=1.0f64).powf(power).max(1e-300))
            .collect();
        Distribution::from_weights(default_labels(n), &weights)
    }

    /// Parse `label weight` lines. Blank lines and `#` comments are skipped.
    /// With `renormalize` probabilities that do not sum to one are rescaled;
    /// otherwise they are rejected.
    pub fn parse(text: &str, mode: WeightMode, renormalize: bool) -> Result<Self> {
        let mut labels = Vec::new();
        let mut weights = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse {
                line: idx + 1,
                message,
            };
            let mut cols = line.split_whitespace();
            let (Some(label), Some(weight), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(err(format!("expected `label weight`, got {line:?}")));
            };
            let w: f64 = weight
                .parse()
                .map_err(|_| err(format!("bad weight {weight:?}")))?;
            if !(w.is_finite() && w >= 0.0) {
                return Err(err(format!("weight {w} is not a nonnegative number")));
            }
            labels.push(label.to_string());
            weights.push(w);
        }
        match (mode, renormalize) {
            (WeightMode::Counts, _) | (WeightMode::Probabilities, true) => {
                Distribution::from_weights(labels, &weights)
            }
            (WeightMode::Probabilities, false) => Distribution::new(labels, weights),
        }
    }

    pub fn outcomes(&self) -> &[String] {
        &self.outcomes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn is_deterministic(&self) -> bool {
        self.probs.contains(&1.0)
    }

    /// `q` reordered to follow this distribution's labels.
    pub fn align(&self, q: &Distribution) -> Result<Distribution> {
        if self.outcomes == q.outcomes {
            return Ok(q.clone());
        }
        if self.len() != q.len() {
            return Err(Error::InvalidDistribution(format!(
                "outcome sets differ in size: {} vs {}",
                self.len(),
                q.len()
            )));
        }
        let index: HashMap<&str, f64> = q
            .outcomes
            .iter()
            .map(String::as_str)
            .zip(q.probs.iter().copied())
            .collect();
        let probs = self
            .outcomes
            .iter()
            .map(|label| {
                index.get(label.as_str()).copied().ok_or_else(|| {
                    Error::InvalidDistribution(format!("label {label:?} missing from q"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Distribution {
            outcomes: self.outcomes.clone(),
            probs,
        })
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

/// Sum in ascending order of value, so that the result does not depend on
/// the order of the outcomes.
pub(crate) fn ordered_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

fn plogp_term(kind: LogKind, p: f64, q: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * eff_log(kind, q).expect("probabilities validated")
    }
}

/// `Σ_{k=1..k_max} s_k u^k / k!`
fn exp_series(kind: LogKind, u: f64, k_max: usize) -> f64 {
    let mut term = u;
    let mut sum = 0.0;
    for k in 1..=k_max {
        sum += kind.series_sign(k) * term;
        term *= u / (k + 1) as f64;
    }
    sum
}

/// `-Σ p(x) ln_kind(p(x))`; zero-probability outcomes contribute nothing.
pub fn entropy(kind: LogKind, p: &Distribution) -> f64 {
    // `0 - s` rather than `-s` so a deterministic distribution gives +0
    0.0 - ordered_sum(p.probs.iter().map(|&px| plogp_term(kind, px, px)).collect())
}

/// Series form `-Σ_x Σ_k s_k [p ln p]^k / k!`.
pub fn entropy_series(kind: LogKind, p: &Distribution, k_max: usize) -> Result<f64> {
    check_k_max(k_max)?;
    Ok(0.0
        - ordered_sum(
            p.probs
                .iter()
                .map(|&px| {
                    if px == 0.0 {
                        0.0
                    } else {
                        exp_series(kind, px * px.ln(), k_max)
                    }
                })
                .collect(),
        ))
}

/// `-Σ p ln_kind(p) + Σ p ln_kind(q)`.
///
/// For the natural logarithm this is minus the Kullback-Leibler divergence,
/// so it is never positive.
pub fn rel_entropy(kind: LogKind, p: &Distribution, q: &Distribution) -> Result<f64> {
    let q = checked_pair(p, q)?;
    let first = ordered_sum(p.probs.iter().map(|&px| plogp_term(kind, px, px)).collect());
    let second = ordered_sum(
        p.probs
            .iter()
            .zip(&q.probs)
            .map(|(&px, &qx)| plogp_term(kind, px, qx))
            .collect(),
    );
    Ok(-first + second)
}

/// Term-by-term series of [`rel_entropy`]:
/// `-Σ_x Σ_k s_k [p ln p]^k/k! + Σ_x Σ_k s_k [p ln q]^k/k!`.
pub fn rel_entropy_series(
    kind: LogKind,
    p: &Distribution,
    q: &Distribution,
    k_max: usize,
) -> Result<f64> {
    check_k_max(k_max)?;
    let q = checked_pair(p, q)?;
    let series = |px: f64, qx: f64| {
        if px == 0.0 {
            0.0
        } else {
            exp_series(kind, px * qx.ln(), k_max)
        }
    };
    let first = ordered_sum(p.probs.iter().map(|&px| series(px, px)).collect());
    let second = ordered_sum(
        p.probs
            .iter()
            .zip(&q.probs)
            .map(|(&px, &qx)| series(px, qx))
            .collect(),
    );
    Ok(-first + second)
}

/// `(|H(p) - H(p')|, Σ|p - p'|)`.
pub fn perturbation_gap(
    kind: LogKind,
    p: &Distribution,
    p_prime: &Distribution,
) -> Result<(f64, f64)> {
    let p_prime = p.align(p_prime)?;
    let gap = (entropy(kind, p) - entropy(kind, &p_prime)).abs();
    let l1 = p
        .probs
        .iter()
        .zip(&p_prime.probs)
        .map(|(a, b)| (a - b).abs())
        .sum();
    Ok((gap, l1))
}

fn check_k_max(k_max: usize) -> Result<()> {
    if k_max == 0 {
        Err(Error::InvalidParameter("k_max must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn checked_pair(p: &Distribution, q: &Distribution) -> Result<Distribution> {
    let q = p.align(q)?;
    for ((label, &px), &qx) in p.outcomes.iter().zip(&p.probs).zip(&q.probs) {
        if px > 0.0 && qx == 0.0 {
            return Err(Error::Support {
                label: label.clone(),
                p: px,
            });
        }
    }
    Ok(q)
}
