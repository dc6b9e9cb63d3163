//! A total, prefix-free toy machine and exhaustive enumeration of its
//! programs.
//!
//! Grammar (γ is the Elias-gamma code of a positive integer):
//!
//! ```text
//! 00 γ(n) b1..bn   LIT  output the n literal bits
//! 01 γ(k) P        REP  output of P repeated k times
//! 10 P Q           CAT  output of P followed by output of Q
//! 11               reserved, always rejected
//! ```
//!
//! Every program halts, no program is a proper prefix of another, and the
//! shortest program for a string `y` is at most `2 + |γ(|y|)| + |y|` bits
//! long (the LIT program). That makes algorithmic probability
//! `m(y) = Σ 2^-|x|` and shortest lengths exactly computable up to a length
//! cap.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::LN_2;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::efflog::{eff_log, LogKind};
use crate::error::{Error, Result};

/// A finite bit string, ordered by (length, lexicographic).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend_from(&mut self, other: &Bits) {
        self.0.extend_from_slice(&other.0);
    }

    pub fn concat(&self, other: &Bits) -> Bits {
        let mut out = Vec::with_capacity(self.len() + other.len());
        out.extend_from_slice(&self.0);
        out.extend_from_slice(&other.0);
        Bits(out)
    }

    pub fn repeat(&self, k: usize) -> Bits {
        Bits(self.0.repeat(k))
    }

    /// All strings of exactly `n` bits in lexicographic order.
    pub fn all_of_len(n: usize) -> impl Iterator<Item = Bits> {
        assert!(n < 64, "bit strings longer than 63 cannot be enumerated");
        (0u64..1 << n).map(move |v| Bits((0..n).rev().map(|i| v >> i & 1 == 1).collect()))
    }
}

impl Ord for Bits {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Bits {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Bits {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::InvalidParameter(format!("{other:?} is not a bit"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bits)
    }
}

impl Serialize for Bits {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bits {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Elias-gamma code: `⌊log2 n⌋` zeros, then `n` in binary.
pub fn gamma_encode(n: u64) -> Bits {
    assert!(n >= 1, "gamma code is defined for positive integers");
    let width = 64 - n.leading_zeros() as usize;
    let mut bits = vec![false; width - 1];
    bits.extend((0..width).rev().map(|i| n >> i & 1 == 1));
    Bits(bits)
}

pub fn gamma_len(n: u64) -> usize {
    2 * (63 - n.leading_zeros() as usize) + 1
}

fn gamma_decode(bits: &[bool], pos: usize) -> std::result::Result<(u64, usize), Reject> {
    let zeros = bits[pos.min(bits.len())..]
        .iter()
        .take_while(|b| !**b)
        .count();
    if pos + zeros >= bits.len() {
        return Err(Reject::Truncated);
    }
    if zeros > 62 {
        return Err(Reject::MalformedGamma);
    }
    let end = pos + 2 * zeros + 1;
    if end > bits.len() {
        return Err(Reject::Truncated);
    }
    let n = bits[pos + zeros..end]
        .iter()
        .fold(0u64, |acc, &b| acc << 1 | b as u64);
    Ok((n, end))
}

/// Why a bit string is not a program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reject {
    ReservedOpcode,
    MalformedGamma,
    Truncated,
    TrailingBits,
    OutputLimit,
}

/// Largest output [`decode`] will materialize.
pub const MAX_OUTPUT_BITS: usize = 1 << 26;

fn parse(bits: &[bool], pos: usize, out: &mut Vec<bool>) -> std::result::Result<usize, Reject> {
    if pos + 2 > bits.len() {
        return Err(Reject::Truncated);
    }
    match (bits[pos], bits[pos + 1]) {
        (false, false) => {
            let (n, start) = gamma_decode(bits, pos + 2)?;
            let end = start.checked_add(n as usize).ok_or(Reject::Truncated)?;
            if end > bits.len() {
                return Err(Reject::Truncated);
            }
            if out.len() + n as usize > MAX_OUTPUT_BITS {
                return Err(Reject::OutputLimit);
            }
            out.extend_from_slice(&bits[start..end]);
            Ok(end)
        }
        (false, true) => {
            let (k, start) = gamma_decode(bits, pos + 2)?;
            let mut inner = Vec::new();
            let end = parse(bits, start, &mut inner)?;
            let total = inner
                .len()
                .checked_mul(k as usize)
                .ok_or(Reject::OutputLimit)?;
            if out.len() + total > MAX_OUTPUT_BITS {
                return Err(Reject::OutputLimit);
            }
            for _ in 0..k {
                out.extend_from_slice(&inner);
            }
            Ok(end)
        }
        (true, false) => {
            let mid = parse(bits, pos + 2, out)?;
            parse(bits, mid, out)
        }
        (true, true) => Err(Reject::ReservedOpcode),
    }
}

/// Run a program. The whole input must be consumed.
pub fn decode(program: &Bits) -> std::result::Result<Bits, Reject> {
    let mut out = Vec::new();
    let end = parse(&program.0, 0, &mut out)?;
    if end != program.len() {
        return Err(Reject::TrailingBits);
    }
    Ok(Bits(out))
}

pub fn lit(payload: &Bits) -> Bits {
    let mut p = Bits(vec![false, false]);
    p.extend_from(&gamma_encode(payload.len() as u64));
    p.extend_from(payload);
    p
}

pub fn rep(k: u64, inner: &Bits) -> Bits {
    let mut p = Bits(vec![false, true]);
    p.extend_from(&gamma_encode(k));
    p.extend_from(inner);
    p
}

pub fn cat(first: &Bits, second: &Bits) -> Bits {
    let mut p = Bits(vec![true, false]);
    p.extend_from(first);
    p.extend_from(second);
    p
}

/// Length of the LIT program for `y`; an upper bound on its complexity.
pub fn lit_bound(y: &Bits) -> Option<usize> {
    (!y.is_empty()).then(|| 2 + gamma_len(y.len() as u64) + y.len())
}

/// Shortest program length; every valid program is at least a LIT of one bit.
pub const MIN_PROGRAM_LEN: usize = 4;

/// Largest supported `max_len`.
pub const MAX_LEN_CAP: u32 = 32;

pub const DEFAULT_MAX_LEN: u32 = 24;

pub const DEFAULT_STEP_BUDGET: u64 = 100_000_000;

/// Every valid program of length at most `max_len`, paired with its output,
/// generated from the grammar. Exponential in `max_len`; intended for small
/// cross-checks.
pub fn programs(max_len: u32) -> Result<Vec<(Bits, Bits)>> {
    check_max_len(max_len)?;
    let max_len = max_len as usize;
    let mut by_len: Vec<Vec<(Bits, Bits)>> = vec![Vec::new(); max_len + 1];
    for len in MIN_PROGRAM_LEN..=max_len {
        let mut level = Vec::new();
        for n in 1..=len {
            if 2 + gamma_len(n as u64) + n == len {
                level.extend(Bits::all_of_len(n).map(|payload| (lit(&payload), payload)));
            }
        }
        for k in 1u64.. {
            let overhead = 2 + gamma_len(k);
            if overhead + MIN_PROGRAM_LEN > len {
                break;
            }
            for (prog, out) in &by_len[len - overhead] {
                level.push((rep(k, prog), out.repeat(k as usize)));
            }
        }
        for a in MIN_PROGRAM_LEN..=len.saturating_sub(2 + MIN_PROGRAM_LEN) {
            let b = len - 2 - a;
            for (p, u) in &by_len[a] {
                for (q, v) in &by_len[b] {
                    level.push((cat(p, q), u.concat(v)));
                }
            }
        }
        by_len[len] = level;
    }
    Ok(by_len.into_iter().flatten().collect())
}

fn check_max_len(max_len: u32) -> Result<()> {
    if (1..=MAX_LEN_CAP).contains(&max_len) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "max_len must lie in 1..={MAX_LEN_CAP}, got {max_len}"
        )))
    }
}

/// Aggregated statistics for one output string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputStats {
    /// `Σ 2^-|x|` over enumerated programs with this output.
    pub omega: f64,
    /// Length in bits of the shortest enumerated program.
    pub shortest: u32,
    /// `(program length, number of programs)`, ascending by length.
    pub length_counts: Vec<(u32, u64)>,
}

/// Result of enumerating every program up to `max_len` bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub max_len: u32,
    pub per_output: BTreeMap<Bits, OutputStats>,
    /// `Σ 2^-|x|` over all enumerated programs.
    pub z_partial: f64,
    pub program_count: u64,
    /// Number of programs of each length, indexed by length.
    pub length_counts: Vec<u64>,
}

/// Enumerate all programs of length `≤ max_len`, grouping programs with
/// the same output at each length and carrying their multiplicity.
///
/// One step is one (output, multiplicity) entry produced by a grammar rule.
pub fn enumerate(max_len: u32, step_budget: u64) -> Result<EnumerationReport> {
    check_max_len(max_len)?;
    let max = max_len as usize;
    let mut steps = 0u64;
    let mut tick = |n: u64| -> Result<()> {
        steps += n;
        if steps > step_budget {
            Err(Error::Budget {
                budget: step_budget,
            })
        } else {
            Ok(())
        }
    };

    let mut levels: Vec<HashMap<Bits, u64>> = vec![HashMap::new(); max + 1];
    for len in MIN_PROGRAM_LEN..=max {
        let mut level: HashMap<Bits, u64> = HashMap::new();
        for n in 1..=len {
            if 2 + gamma_len(n as u64) + n == len {
                tick(1 << n)?;
                level.extend(Bits::all_of_len(n).map(|payload| (payload, 1)));
            }
        }
        for k in 1u64.. {
            let overhead = 2 + gamma_len(k);
            if overhead + MIN_PROGRAM_LEN > len {
                break;
            }
            let inner = &levels[len - overhead];
            tick(inner.len() as u64)?;
            for (out, &count) in inner {
                *level.entry(out.repeat(k as usize)).or_insert(0) += count;
            }
        }
        for a in MIN_PROGRAM_LEN..=len.saturating_sub(2 + MIN_PROGRAM_LEN) {
            let b = len - 2 - a;
            tick(levels[a].len() as u64 * levels[b].len() as u64)?;
            for (u, &cu) in &levels[a] {
                for (v, &cv) in &levels[b] {
                    *level.entry(u.concat(v)).or_insert(0) += cu * cv;
                }
            }
        }
        levels[len] = level;
    }

    let mut per_output: BTreeMap<Bits, OutputStats> = BTreeMap::new();
    let mut length_counts = vec![0u64; max + 1];
    for (len, level) in levels.into_iter().enumerate() {
        let weight = (-(len as f64)).exp2();
        for (out, count) in level {
            length_counts[len] += count;
            let stats = per_output.entry(out).or_insert(OutputStats {
                omega: 0.0,
                shortest: len as u32,
                length_counts: Vec::new(),
            });
            stats.omega += count as f64 * weight;
            stats.length_counts.push((len as u32, count));
        }
    }
    let z_partial = length_counts
        .iter()
        .enumerate()
        .map(|(len, &c)| c as f64 * (-(len as f64)).exp2())
        .sum();
    Ok(EnumerationReport {
        max_len,
        per_output,
        z_partial,
        program_count: length_counts.iter().sum(),
        length_counts,
    })
}

/// `e^(-β len)`; exact powers of two when `β = ln 2`.
fn damping(beta: f64, len: u32) -> f64 {
    (-(beta / LN_2) * len as f64).exp2()
}

impl EnumerationReport {
    pub fn get(&self, y: &Bits) -> Option<&OutputStats> {
        self.per_output.get(y)
    }

    /// `Σ e^(-β|x|)` over enumerated programs with output `y` (0 if none).
    pub fn omega_beta(&self, y: &Bits, beta: f64) -> f64 {
        self.get(y)
            .map(|s| {
                s.length_counts
                    .iter()
                    .map(|&(len, c)| c as f64 * damping(beta, len))
                    .sum()
            })
            .unwrap_or(0.0)
    }

    /// `ω(y) / Z`, the prior normalized by the partial partition function.
    pub fn omega_normalized(&self, y: &Bits, beta: f64) -> f64 {
        let z = partition_partial(self, beta);
        if z > 0.0 {
            self.omega_beta(y, beta) / z
        } else {
            0.0
        }
    }
}

/// Shortest enumerated program producing `y`. Exact once
/// `max_len ≥ lit_bound(y)`.
pub fn k_complexity(report: &EnumerationReport, y: &Bits) -> Option<u32> {
    report.get(y).map(|s| s.shortest)
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "beta must be positive, got {beta}"
        )))
    }
}

fn omega_checked(report: &EnumerationReport, y: &Bits, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    let omega = report.omega_beta(y, beta);
    if omega > 0.0 && omega <= 1.0 {
        Ok(omega)
    } else {
        Err(Error::Domain {
            value: omega,
            domain: "(0, 1]",
        })
    }
}

/// `-ln_kind(ω_β(y))`.
pub fn algorithmic_entropy(
    kind: LogKind,
    report: &EnumerationReport,
    y: &Bits,
    beta: f64,
) -> Result<f64> {
    let omega = omega_checked(report, y, beta)?;
    Ok(-eff_log(kind, omega)?)
}

/// `-Σ_{k=1..k_max} s_k ln^k(ω(y)) / k!`, the term-by-term series of the
/// relative entropy of a point mass. Bounded in `ω`: it tends to `1 - ω`
/// (plus) and `1/ω - 1` (minus).
pub fn algorithmic_entropy_series_literal(
    kind: LogKind,
    report: &EnumerationReport,
    y: &Bits,
    beta: f64,
    k_max: usize,
) -> Result<f64> {
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    let omega = omega_checked(report, y, beta)?;
    Ok(-series_of_log(kind, omega.ln(), k_max))
}

/// `Σ_{k=1..k_max} s_k u^k / k!`
pub fn series_of_log(kind: LogKind, u: f64, k_max: usize) -> f64 {
    let mut term = u;
    let mut sum = 0.0;
    for k in 1..=k_max {
        sum += kind.series_sign(k) * term;
        term *= u / (k + 1) as f64;
    }
    sum
}

/// `Σ e^(-β|x|)` over all enumerated programs.
pub fn partition_partial(report: &EnumerationReport, beta: f64) -> f64 {
    report
        .length_counts
        .iter()
        .enumerate()
        .map(|(len, &c)| c as f64 * damping(beta, len as u32))
        .sum()
}

/// One row of the report table. Complexities are in nats.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRow {
    pub y: Bits,
    pub omega: f64,
    pub shortest_bits: u32,
    pub k_nat: f64,
    pub k_plus: f64,
    pub k_minus: f64,
}

/// Rows for every output, in (length, lexicographic) order of `y`.
///
/// Outputs whose `ω_β` exceeds 1 (possible for small `β`) are skipped.
pub fn report_rows(report: &EnumerationReport, beta: f64) -> Result<Vec<ReportRow>> {
    check_beta(beta)?;
    let mut rows = Vec::with_capacity(report.per_output.len());
    for (y, stats) in &report.per_output {
        let omega = report.omega_beta(y, beta);
        if !(omega > 0.0 && omega <= 1.0) {
            continue;
        }
        rows.push(ReportRow {
            y: y.clone(),
            omega,
            shortest_bits: stats.shortest,
            k_nat: -eff_log(LogKind::Natural, omega)?,
            k_plus: -eff_log(LogKind::Plus, omega)?,
            k_minus: -eff_log(LogKind::Minus, omega)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> Bits {
        s.parse().unwrap()
    }

    #[test]
    fn gamma_codes() {
        assert_eq!(gamma_encode(1).to_string(), "1");
        assert_eq!(gamma_encode(2).to_string(), "010");
        assert_eq!(gamma_encode(10).to_string(), "0001010");
        for n in 1..300 {
            assert_eq!(gamma_encode(n).len(), gamma_len(n));
            assert_eq!(
                gamma_decode(gamma_encode(n).as_slice(), 0),
                Ok((n, gamma_len(n)))
            );
        }
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode(&b("0001010")).unwrap(), b("10"));
        assert_eq!(decode(&b("11")), Err(Reject::ReservedOpcode));
        assert_eq!(decode(&b("110101")), Err(Reject::ReservedOpcode));
        let program = b("0100010100001010");
        assert_eq!(program.len(), 16);
        assert_eq!(decode(&program).unwrap(), b("10101010101010101010"));
    }

    #[test]
    fn decode_rejections() {
        assert_eq!(decode(&b("")), Err(Reject::Truncated));
        assert_eq!(decode(&b("000")), Err(Reject::Truncated));
        assert_eq!(decode(&b("00010")), Err(Reject::Truncated));
        assert_eq!(decode(&b("00010100")), Err(Reject::TrailingBits));
        assert_eq!(decode(&b("10001100")), Err(Reject::Truncated));
    }

    #[test]
    fn constructors_round_trip() {
        let p = cat(&lit(&b("1")), &rep(3, &lit(&b("01"))));
        assert_eq!(decode(&p).unwrap(), b("1010101"));
    }

    #[test]
    fn bit_order() {
        let mut v = vec![b("10"), b("0"), b("01"), b("111")];
        v.sort();
        assert_eq!(v, vec![b("0"), b("01"), b("10"), b("111")]);
        assert!("012".parse::<Bits>().is_err());
    }

    #[test]
    fn enumerate_small() {
        let r = enumerate(7, DEFAULT_STEP_BUDGET).unwrap();
        assert_eq!(k_complexity(&r, &b("10")), Some(7));
        assert!(r.get(&b("10")).unwrap().omega >= (-7f64).exp2());
        assert_eq!(k_complexity(&r, &Bits::default()), None);
        let total: f64 = r.per_output.values().map(|s| s.omega).sum();
        assert_eq!(total, r.z_partial);
        assert!(r.z_partial <= 1.0);
    }

    #[test]
    fn enumerate_matches_explicit_programs() {
        let r = enumerate(12, DEFAULT_STEP_BUDGET).unwrap();
        let progs = programs(12).unwrap();
        assert_eq!(r.program_count, progs.len() as u64);
        let mut omega: BTreeMap<Bits, f64> = BTreeMap::new();
        for (p, out) in &progs {
            assert_eq!(decode(p).as_ref(), Ok(out));
            *omega.entry(out.clone()).or_default() += (-(p.len() as f64)).exp2();
        }
        assert_eq!(omega.len(), r.per_output.len());
        for (y, w) in omega {
            assert_eq!(r.per_output[&y].omega, w);
        }
    }

    #[test]
    fn budget_and_parameter_errors() {
        assert!(matches!(
            enumerate(16, 10),
            Err(Error::Budget { budget: 10 })
        ));
        assert!(enumerate(0, 10).is_err());
        assert!(enumerate(33, 10).is_err());
    }

    #[test]
    fn algorithmic_entropy_single_program() {
        // "10" has exactly one program of length ≤ 7
        let r = enumerate(7, DEFAULT_STEP_BUDGET).unwrap();
        let y = b("10");
        assert_eq!(r.get(&y).unwrap().length_counts, vec![(7, 1)]);
        let nat = algorithmic_entropy(LogKind::Natural, &r, &y, LN_2).unwrap();
        assert!((nat - 7.0 * LN_2).abs() < 1e-14);
        let plus = algorithmic_entropy(LogKind::Plus, &r, &y, LN_2).unwrap();
        assert!((plus - 4.761_219_607_288).abs() < 1e-11);
        let minus = algorithmic_entropy(LogKind::Minus, &r, &y, LN_2).unwrap();
        assert!((minus - 4.945_165_051_056).abs() < 1e-11);
        assert!(algorithmic_entropy(LogKind::Natural, &r, &b("1111111111"), LN_2).is_err());
    }

    #[test]
    fn series_literal_examples() {
        let r = enumerate(7, DEFAULT_STEP_BUDGET).unwrap();
        let y = b("10");
        let plus = algorithmic_entropy_series_literal(LogKind::Plus, &r, &y, LN_2, 30).unwrap();
        assert!((plus - (1.0 - (-7f64).exp2())).abs() < 1e-10);
        let nat = algorithmic_entropy_series_literal(LogKind::Natural, &r, &y, LN_2, 1).unwrap();
        assert!((nat - 7.0 * LN_2).abs() < 1e-12);
        assert_eq!(series_of_log(LogKind::Minus, 0.0, 30), 0.0);
        assert_eq!(series_of_log(LogKind::Plus, 0.0, 30), 0.0);
    }

    #[test]
    fn partition_examples() {
        let r = enumerate(10, DEFAULT_STEP_BUDGET).unwrap();
        assert_eq!(partition_partial(&r, LN_2), r.z_partial);
        assert!(partition_partial(&r, 2.0 * LN_2) < r.z_partial);
    }
}
