//! Code lengths and the generalized noiseless coding theorems.
//!
//! Lengths are real numbers in nats. Integer bit lengths (e.g. from a
//! Huffman code) are converted on construction.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::LN_2;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::efflog::{eff_log, LogKind};
use crate::entropy::{entropy, Distribution};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LengthSource {
    Ideal(LogKind),
    IntegerBits,
    UserSupplied,
}

/// Per-outcome code lengths in nats.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CodeLengths {
    lengths: Vec<f64>,
    source: LengthSource,
}

impl CodeLengths {
    pub fn user(lengths: Vec<f64>) -> Result<Self> {
        if let Some(l) = lengths.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
            return Err(Error::InvalidParameter(format!(
                "code length {l} is not a finite nonnegative number"
            )));
        }
        Ok(CodeLengths {
            lengths,
            source: LengthSource::UserSupplied,
        })
    }

    pub fn from_bits(bits: &[u32]) -> Self {
        CodeLengths {
            lengths: bits.iter().map(|&b| b as f64 * LN_2).collect(),
            source: LengthSource::IntegerBits,
        }
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn source(&self) -> LengthSource {
        self.source
    }

    /// Lengths rounded back to whole bits. Only meaningful for
    /// [`LengthSource::IntegerBits`].
    pub fn bits(&self) -> Vec<u32> {
        self.lengths
            .iter()
            .map(|l| (l / LN_2).round() as u32)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }
}

fn check_arity(p: &Distribution, lengths: &CodeLengths) -> Result<()> {
    if p.len() == lengths.len() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{} code lengths for {} outcomes",
            lengths.len(),
            p.len()
        )))
    }
}

/// Optimal lengths `-ln_kind p(x)`.
pub fn ideal_lengths(kind: LogKind, p: &Distribution) -> Result<CodeLengths> {
    let lengths = p
        .probs()
        .iter()
        .map(|&px| {
            if px == 0.0 {
                Err(Error::Domain {
                    value: px,
                    domain: "(0, 1]",
                })
            } else {
                eff_log(kind, px).map(|v| -v)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CodeLengths {
        lengths,
        source: LengthSource::Ideal(kind),
    })
}

/// `Σ e^(-l(x))`.
pub fn kraft_sum(lengths: &CodeLengths) -> f64 {
    lengths.lengths.iter().map(|l| (-l).exp()).sum()
}

/// `Σ p(x) l(x)`.
pub fn expected_length(p: &Distribution, lengths: &CodeLengths) -> Result<f64> {
    check_arity(p, lengths)?;
    Ok(p.probs()
        .iter()
        .zip(&lengths.lengths)
        .map(|(px, l)| px * l)
        .sum())
}

/// `L - H_kind(p)`. Nonnegative whenever every length dominates the ideal
/// length of its outcome.
pub fn theorem1_gap(kind: LogKind, p: &Distribution, lengths: &CodeLengths) -> Result<f64> {
    Ok(expected_length(p, lengths)? - entropy(kind, p))
}

/// Nagumo-Kolmogorov cost function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CostFunction {
    Identity,
    /// `t ↦ (e^(rate t) - 1) / rate`
    Exponential {
        rate: f64,
    },
}

impl CostFunction {
    pub fn exponential(rate: f64) -> Result<Self> {
        if rate == 0.0 || !rate.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "exponential cost needs a finite nonzero rate, got {rate}"
            )));
        }
        Ok(CostFunction::Exponential { rate })
    }

    pub fn apply(&self, t: f64) -> f64 {
        match *self {
            CostFunction::Identity => t,
            CostFunction::Exponential { rate } => (rate * t).exp_m1() / rate,
        }
    }

    pub fn inverse(&self, v: f64) -> Result<f64> {
        match *self {
            CostFunction::Identity => Ok(v),
            CostFunction::Exponential { rate } => {
                let arg = rate * v;
                if arg > -1.0 && arg.is_finite() {
                    Ok(arg.ln_1p() / rate)
                } else {
                    Err(Error::Inversion { value: v })
                }
            }
        }
    }
}

/// Quasi-arithmetic mean `φ⁻¹(Σ p φ(K))`.
pub fn weighted_complexity(p: &Distribution, ks: &CodeLengths, phi: CostFunction) -> Result<f64> {
    if phi == CostFunction::Identity {
        return expected_length(p, ks);
    }
    check_arity(p, ks)?;
    let mean = p
        .probs()
        .iter()
        .zip(&ks.lengths)
        .map(|(px, k)| px * phi.apply(*k))
        .sum();
    phi.inverse(mean)
}

/// The three quantities of the second coding theorem, `0 ≤ mid ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Check {
    pub lhs: f64,
    pub mid: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// With complexities `K(x) = c' · (-ln_kind p(x))`:
/// `mid = c' Σ p K/c' - H = (c' - 1) H_kind(p)` and
/// `rhs = c' Σ_x (-ln_kind p(x))`.
pub fn theorem2_check(kind: LogKind, p: &Distribution, cprime: f64) -> Result<Theorem2Check> {
    if !(cprime >= 1.0 && cprime.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "c' must be at least 1, got {cprime}"
        )));
    }
    let ideal = ideal_lengths(kind, p)?;
    let h = entropy(kind, p);
    let mid = (cprime - 1.0) * h;
    let rhs = cprime * ideal.lengths.iter().sum::<f64>();
    let lhs = 0.0;
    Ok(Theorem2Check {
        lhs,
        mid,
        rhs,
        holds: lhs <= mid && mid <= rhs,
    })
}

/// Huffman code lengths, converted to nats.
///
/// Nodes are merged in order of (weight, smallest outcome index in the
/// subtree), which fixes every tie. A single outcome gets length 0.
pub fn huffman_bit_lengths(p: &Distribution) -> CodeLengths {
    #[derive(PartialEq, Eq, PartialOrd, Ord)]
    struct Key(OrdF64, usize);
    #[derive(PartialEq)]
    struct OrdF64(f64);
    impl Eq for OrdF64 {}
    impl PartialOrd for OrdF64 {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for OrdF64 {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0)
        }
    }

    let n = p.len();
    let mut depth = vec![0u32; n];
    if n <= 1 {
        return CodeLengths::from_bits(&depth);
    }
    // members[i]: leaves under node i
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut heap: BinaryHeap<Reverse<(Key, usize)>> = p
        .probs()
        .iter()
        .enumerate()
        .map(|(i, &w)| Reverse((Key(OrdF64(w), i), i)))
        .collect();
    while heap.len() > 1 {
        let Reverse((Key(OrdF64(w1), f1), a)) = heap.pop().unwrap();
        let Reverse((Key(OrdF64(w2), f2), b)) = heap.pop().unwrap();
        let mut merged = std::mem::take(&mut members[a]);
        merged.append(&mut members[b]);
        for &leaf in &merged {
            depth[leaf] += 1;
        }
        members.push(merged);
        heap.push(Reverse((
            Key(OrdF64(w1 + w2), f1.min(f2)),
            members.len() - 1,
        )));
    }
    CodeLengths::from_bits(&depth)
}

/// One row of the coding-theorem checker output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    /// `theorem1` or `theorem2`
    pub check: &'static str,
    pub kind: LogKind,
    pub n: usize,
    pub seed: u64,
    /// theorem1: `L - H` with ideal lengths; theorem2: `rhs - mid`.
    pub gap: f64,
    /// Kraft sum of the ideal lengths.
    pub kraft_sum: f64,
    pub holds: bool,
}

/// Tolerance for the equality and sign checks of [`check_distribution`].
pub const CHECK_TOL: f64 = 1e-12;

/// First- and second-theorem rows for one distribution and kind.
///
/// The theorem1 row holds when the ideal gap is zero, a gap built from
/// `dominating` lengths is nonnegative, and the Kraft law of the kind
/// (`≤ 1` for minus, `≥ 1` for plus, `= 1` for natural) is satisfied.
pub fn check_distribution(
    kind: LogKind,
    p: &Distribution,
    dominating: &CodeLengths,
    cprime: f64,
    seed: u64,
) -> Result<[CheckRow; 2]> {
    let ideal = ideal_lengths(kind, p)?;
    let gap = theorem1_gap(kind, p, &ideal)?;
    let kraft = kraft_sum(&ideal);
    let kraft_ok = match kind {
        LogKind::Minus => kraft <= 1.0 + CHECK_TOL,
        LogKind::Plus => kraft >= 1.0 - CHECK_TOL,
        LogKind::Natural => (kraft - 1.0).abs() <= 1e-9,
    };
    let dominated_gap = theorem1_gap(kind, p, dominating)?;
    let t2 = theorem2_check(kind, p, cprime)?;
    Ok([
        CheckRow {
            check: "theorem1",
            kind,
            n: p.len(),
            seed,
            gap,
            kraft_sum: kraft,
            holds: gap.abs() <= CHECK_TOL && dominated_gap >= -CHECK_TOL && kraft_ok,
        },
        CheckRow {
            check: "theorem2",
            kind,
            n: p.len(),
            seed,
            gap: t2.rhs - t2.mid,
            kraft_sum: kraft,
            holds: t2.holds,
        },
    ])
}

/// Ideal lengths plus independent uniform slack in `[0, max_slack)`.
pub fn dominating_lengths<R: Rng + ?Sized>(
    kind: LogKind,
    p: &Distribution,
    rng: &mut R,
    max_slack: f64,
) -> Result<CodeLengths> {
    let ideal = ideal_lengths(kind, p)?;
    CodeLengths::user(
        ideal
            .lengths
            .iter()
            .map(|l| l + rng.gen_range(0.0..max_slack))
            .collect(),
    )
}

/// Per-trial seeds drawn from one master seed.
pub fn trial_seeds(seed: u64, trials: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).map(|_| rng.gen()).collect()
}

/// One randomized trial: a random distribution with `1..=n_max` outcomes,
/// random `c' ∈ [1, 10]`, checked for every kind. Trial `seed` fully
/// determines the rows, so trials can run in any order or in parallel.
pub fn fuzz_trial(seed: u64, n_max: usize) -> Result<Vec<CheckRow>> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=n_max);
    let p = Distribution::random(&mut rng, n)?;
    let cprime = rng.gen_range(1.0..=10.0);
    let mut rows = Vec::with_capacity(6);
    for kind in LogKind::ALL {
        let dominating = dominating_lengths(kind, &p, &mut rng, 2.0)?;
        rows.extend(check_distribution(kind, &p, &dominating, cprime, seed)?);
    }
    Ok(rows)
}
