//! Effective logarithms `ln±` and their inverses.
//!
//! ```text
//! ln+(x) = -(1 - x^x) / x = ln x + x ln²x / 2! + x² ln³x / 3! + ...
//! ln-(x) = -(x^-x - 1) / x = ln x - x ln²x / 2! + x² ln³x / 3! - ...
//! ```
//!
//! Both are defined on `(0, 1]`, vanish at 1 with unit slope, and satisfy
//! `ln-(x) < ln(x) < ln+(x) < 0` on `(0, 1)`. Neither has a closed-form
//! inverse: [`eff_exp`] inverts numerically and [`eff_exp_poly`] evaluates
//! the fitted polynomial representation shipped in
//! `data/table1_coefficients.txt`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{bisect_secant, exp_tail};

/// Selects the logarithm family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LogKind {
    Natural,
    Plus,
    Minus,
}

impl LogKind {
    pub const ALL: [LogKind; 3] = [LogKind::Natural, LogKind::Plus, LogKind::Minus];

    pub fn name(self) -> &'static str {
        match self {
            LogKind::Natural => "natural",
            LogKind::Plus => "plus",
            LogKind::Minus => "minus",
        }
    }

    /// Sign `s_k` of the k-th series term (k ≥ 1). Zero for the natural
    /// logarithm beyond the first term.
    pub fn series_sign(self, k: usize) -> f64 {
        match self {
            LogKind::Natural => {
                if k == 1 {
                    1.0
                } else {
                    0.0
                }
            }
            LogKind::Plus => 1.0,
            LogKind::Minus => {
                if k % 2 == 1 {
                    1.0
                } else {
                    -1.0
                }
            }
        }
    }
}

impl std::fmt::Display for LogKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for LogKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "natural" | "ln" => Ok(LogKind::Natural),
            "plus" | "+" => Ok(LogKind::Plus),
            "minus" | "-" => Ok(LogKind::Minus),
            other => Err(Error::InvalidParameter(format!(
                "unknown logarithm kind {other:?}"
            ))),
        }
    }
}

/// Smallest argument [`eff_exp`] will return.
pub const X_MIN: f64 = 1e-12;

const MAX_ITER: usize = 200;

fn check_unit_interval(x: f64) -> Result<()> {
    if x > 0.0 && x <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            value: x,
            domain: "(0, 1]",
        })
    }
}

/// Effective logarithm of `x ∈ (0, 1]`.
pub fn eff_log(kind: LogKind, x: f64) -> Result<f64> {
    check_unit_interval(x)?;
    let ln = x.ln();
    Ok(match kind {
        LogKind::Natural => ln,
        // x^x - 1 = expm1(x ln x)
        LogKind::Plus => (x * ln).exp_m1() / x,
        LogKind::Minus => -(-x * ln).exp_m1() / x,
    })
}

/// `eff_log(kind, x) - ln(x)`, computed without cancellation.
///
/// Useful when `x` is tiny and the correction is far below one ulp of
/// `ln x`.
pub fn eff_log_excess(kind: LogKind, x: f64) -> Result<f64> {
    check_unit_interval(x)?;
    let u = x * x.ln();
    Ok(match kind {
        LogKind::Natural => 0.0,
        LogKind::Plus => exp_tail(u) / x,
        LogKind::Minus => -exp_tail(-u) / x,
    })
}

/// Truncated series `Σ_{k=1..k_max} s_k x^(k-1) ln^k(x) / k!`.
pub fn eff_log_series(kind: LogKind, x: f64, k_max: usize) -> Result<f64> {
    check_unit_interval(x)?;
    if k_max == 0 {
        return Err(Error::InvalidParameter("k_max must be at least 1".into()));
    }
    if x == 1.0 {
        return Ok(0.0);
    }
    let ln = x.ln();
    let ratio = x * ln;
    let mut term = ln;
    let mut sum = 0.0;
    for k in 1..=k_max {
        sum += kind.series_sign(k) * term;
        term *= ratio / (k + 1) as f64;
    }
    Ok(sum)
}

/// Inverse of [`eff_log`]: the `x ∈ [X_MIN, 1]` with `eff_log(kind, x) = t`.
///
/// Bisection to a bracket of `1e-13`, then one secant step.
pub fn eff_exp(kind: LogKind, t: f64) -> Result<f64> {
    let lo = eff_log(kind, X_MIN)?;
    if !(t <= 0.0 && t >= lo) {
        return Err(Error::Range {
            value: t,
            lo,
            hi: 0.0,
        });
    }
    if t == 0.0 {
        return Ok(1.0);
    }
    if kind == LogKind::Natural {
        return Ok(t.exp());
    }
    bisect_secant(
        |x| eff_log(kind, x).unwrap_or(f64::NEG_INFINITY) - t,
        X_MIN,
        1.0,
        1e-13,
        MAX_ITER,
    )
}

/// Polynomial-times-exponential representation of a stretched exponential:
/// `exp(-t) Σ_j a(j) t^j` with nine fitted coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyApprox {
    kind: LogKind,
    coefficients: [f64; 9],
}

const TABLE: &str = include_str!("../data/poly_coefficients.txt");

impl PolyApprox {
    pub fn new(kind: LogKind, coefficients: [f64; 9]) -> Result<Self> {
        if kind == LogKind::Natural {
            return Err(Error::InvalidParameter(
                "polynomial exponentials exist only for plus and minus".into(),
            ));
        }
        if coefficients[0] != 1.0 {
            return Err(Error::InvalidParameter(format!(
                "a(0) must be 1, got {}",
                coefficients[0]
            )));
        }
        Ok(PolyApprox { kind, coefficients })
    }

    /// Coefficients from the bundled table.
    pub fn table(kind: LogKind) -> Result<Self> {
        let (plus, minus) = parse_table(TABLE)?;
        match kind {
            LogKind::Plus => Ok(plus),
            LogKind::Minus => Ok(minus),
            LogKind::Natural => PolyApprox::new(kind, [1.0; 9]),
        }
    }

    pub fn kind(&self) -> LogKind {
        self.kind
    }

    pub fn coefficients(&self) -> &[f64; 9] {
        &self.coefficients
    }
}

/// Parse a coefficient table: `j a_plus(j) a_minus(j)` per line, `#` comments.
pub fn parse_table(text: &str) -> Result<(PolyApprox, PolyApprox)> {
    let mut plus = [f64::NAN; 9];
    let mut minus = [f64::NAN; 9];
    let mut seen = [false; 9];
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 3 {
            return Err(err(format!("expected 3 columns, found {}", cols.len())));
        }
        let j: usize = cols[0]
            .parse()
            .map_err(|_| err(format!("bad index {:?}", cols[0])))?;
        if j > 8 {
            return Err(err(format!("index {j} out of range 0..=8")));
        }
        if seen[j] {
            return Err(err(format!("duplicate index {j}")));
        }
        seen[j] = true;
        plus[j] = cols[1]
            .parse()
            .map_err(|_| err(format!("bad coefficient {:?}", cols[1])))?;
        minus[j] = cols[2]
            .parse()
            .map_err(|_| err(format!("bad coefficient {:?}", cols[2])))?;
    }
    if let Some(j) = seen.iter().position(|s| !s) {
        return Err(Error::Parse {
            line: 0,
            message: format!("missing index {j}"),
        });
    }
    Ok((
        PolyApprox::new(LogKind::Plus, plus)?,
        PolyApprox::new(LogKind::Minus, minus)?,
    ))
}

/// `exp(-t) Σ_{j=0..8} a(j) t^j`.
pub fn eff_exp_poly(approx: &PolyApprox, t: f64) -> f64 {
    let poly = approx
        .coefficients
        .iter()
        .rev()
        .fold(0.0, |acc, a| acc * t + a);
    (-t).exp() * poly
}

/// Largest `|eff_exp_poly(approx, -t) - eff_exp(kind, t)|` over `samples`
/// evenly spaced `t ∈ [eff_log(kind, x_lo), 0]`, and where it occurs.
///
/// The fitted polynomial decays in its argument, so it is compared at `-t`.
pub fn poly_max_deviation(approx: &PolyApprox, x_lo: f64, samples: usize) -> Result<(f64, f64)> {
    let kind = approx.kind;
    let t_lo = eff_log(kind, x_lo)?;
    let mut worst = (0.0, 0.0);
    for i in 0..=samples {
        let t = t_lo * (1.0 - i as f64 / samples as f64);
        let dev = (eff_exp_poly(approx, -t) - eff_exp(kind, t)?).abs();
        if dev > worst.0 {
            worst = (dev, t);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN_PLUS_HALF: f64 = -0.585_786_437_626_905;
    const LN_MINUS_HALF: f64 = -0.828_427_124_746_190;

    #[test]
    fn closed_forms_at_one_half() {
        assert_eq!(eff_log(LogKind::Plus, 1.0).unwrap(), 0.0);
        assert!((eff_log(LogKind::Plus, 0.5).unwrap() - LN_PLUS_HALF).abs() < 1e-14);
        assert!((eff_log(LogKind::Minus, 0.5).unwrap() - LN_MINUS_HALF).abs() < 1e-14);
        assert!((eff_log(LogKind::Natural, 0.5).unwrap() + std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        for kind in LogKind::ALL {
            for x in [0.0, -0.1, 1.0 + 1e-12, f64::NAN] {
                assert!(
                    matches!(eff_log(kind, x), Err(Error::Domain { .. })),
                    "{kind} {x}"
                );
                assert!(eff_log_series(kind, x, 5).is_err());
            }
        }
        assert!(eff_log_series(LogKind::Plus, 0.5, 0).is_err());
    }

    #[test]
    fn series_examples() {
        let first = eff_log_series(LogKind::Plus, 0.5, 1).unwrap();
        assert!((first + std::f64::consts::LN_2).abs() < 1e-15);
        assert!((eff_log_series(LogKind::Plus, 0.5, 30).unwrap() - LN_PLUS_HALF).abs() < 1e-10);
        assert!((eff_log_series(LogKind::Minus, 0.5, 30).unwrap() - LN_MINUS_HALF).abs() < 1e-10);
        assert_eq!(eff_log_series(LogKind::Minus, 1.0, 30).unwrap(), 0.0);
    }

    #[test]
    fn excess_matches_difference() {
        for kind in LogKind::ALL {
            for x in [0.9, 0.5, 0.1, 1e-3] {
                let direct = eff_log(kind, x).unwrap() - x.ln();
                assert!((eff_log_excess(kind, x).unwrap() - direct).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(eff_exp(LogKind::Plus, 0.0).unwrap(), 1.0);
        assert!((eff_exp(LogKind::Plus, LN_PLUS_HALF).unwrap() - 0.5).abs() < 1e-12);
        assert!((eff_exp(LogKind::Minus, LN_MINUS_HALF).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn inverse_range_errors() {
        assert!(matches!(
            eff_exp(LogKind::Plus, 1e-9),
            Err(Error::Range { .. })
        ));
        assert!(matches!(
            eff_exp(LogKind::Minus, -1e6),
            Err(Error::Range { .. })
        ));
        assert!(eff_exp(LogKind::Natural, f64::NAN).is_err());
    }

    #[test]
    fn table_loads() {
        let plus = PolyApprox::table(LogKind::Plus).unwrap();
        let minus = PolyApprox::table(LogKind::Minus).unwrap();
        assert_eq!(plus.coefficients()[0], 1.0);
        assert_eq!(minus.coefficients()[0], 1.0);
        assert_eq!(plus.coefficients()[8], -0.000157095);
        assert_eq!(minus.coefficients()[4], 0.16867);
        assert_eq!(eff_exp_poly(&plus, 0.0), 1.0);
        assert_eq!(eff_exp_poly(&minus, 0.0), 1.0);
    }

    #[test]
    fn poly_at_one() {
        let a = [
            1.0,
            0.0228963,
            -0.709322,
            0.905157,
            -0.546751,
            0.186358,
            -0.0362676,
            0.00373467,
            -0.000157095,
        ];
        let expected = (-1.0f64).exp() * a.iter().sum::<f64>();
        let plus = PolyApprox::table(LogKind::Plus).unwrap();
        assert!((eff_exp_poly(&plus, 1.0) - expected).abs() < 1e-15);
    }

    #[test]
    fn malformed_tables() {
        assert!(parse_table("0 1 1\n").is_err());
        assert!(parse_table("0 1 1 1\n").is_err());
        let dup = (0..9)
            .map(|j| format!("{} 1 1\n", j.min(7)))
            .collect::<String>();
        assert!(parse_table(&dup).is_err());
        let bad_a0 = (0..9).map(|j| format!("{j} 2 1\n")).collect::<String>();
        assert!(parse_table(&bad_a0).is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("plus".parse::<LogKind>().unwrap(), LogKind::Plus);
        assert!("tsallis".parse::<LogKind>().is_err());
    }
}
