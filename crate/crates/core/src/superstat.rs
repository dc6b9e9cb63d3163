//! Superstatistical Boltzmann factors.
//!
//! A fluctuating inverse temperature `β` with density `f(β)` turns the
//! ordinary factor `e^(-βl)` into the effective factor
//! `B(l) = ∫ f(β) e^(-βl) dβ`. Two Gamma-like densities `f±` give
//!
//! ```text
//! B+(l) = (1 + p β0 l)^(-1/p)        (Gamma mixture, exact)
//! B-(l) = (1 - p β0 l)^(+1/p)        (compact support l < 1/(p β0))
//! ```
//!
//! The inverse `l(y)` of a Boltzmann factor serves as a code length and
//! feeds the entropic-form integral [`entropic_form`]. With `β0 = 1` and the
//! shape set equal to the probability itself, `l+(y) = -ln-(y)` and
//! `l-(y) = -ln+(y)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{illinois, integrate, integrate_semi_infinite, Integral, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Standard,
    Plus,
    Minus,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Family::Standard),
            "plus" => Ok(Family::Plus),
            "minus" => Ok(Family::Minus),
            other => Err(Error::InvalidParameter(format!("unknown family {other:?}"))),
        }
    }
}

/// A Boltzmann factor `B(l)` together with its inverse length function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoltzmannSpec {
    family: Family,
    shape: f64,
    beta0: f64,
    beta: f64,
}

impl BoltzmannSpec {
    /// `e^(-β l)`.
    pub fn standard(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "beta must be positive, got {beta}"
            )));
        }
        Ok(BoltzmannSpec {
            family: Family::Standard,
            shape: 1.0,
            beta0: beta,
            beta,
        })
    }

    pub fn plus(shape: f64, beta0: f64) -> Result<Self> {
        Self::shaped(Family::Plus, shape, beta0)
    }

    pub fn minus(shape: f64, beta0: f64) -> Result<Self> {
        Self::shaped(Family::Minus, shape, beta0)
    }

    fn shaped(family: Family, shape: f64, beta0: f64) -> Result<Self> {
        check_shape(shape)?;
        check_beta0(beta0)?;
        Ok(BoltzmannSpec {
            family,
            shape,
            beta0,
            beta: beta0,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn beta0(&self) -> f64 {
        self.beta0
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn with_shape(&self, shape: f64) -> Self {
        BoltzmannSpec { shape, ..*self }
    }

    /// Upper end of the support in `l` (infinite except for the minus family).
    pub fn support_bound(&self) -> f64 {
        match self.family {
            Family::Minus => 1.0 / (self.shape * self.beta0),
            _ => f64::INFINITY,
        }
    }
}

fn check_shape(shape: f64) -> Result<()> {
    if shape > 0.0 && shape <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "shape must lie in (0, 1], got {shape}"
        )))
    }
}

fn check_beta0(beta0: f64) -> Result<()> {
    if beta0 > 0.0 && beta0.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "beta0 must be positive, got {beta0}"
        )))
    }
}

/// Evaluate `B(l)`.
pub fn boltzmann(spec: &BoltzmannSpec, l: f64) -> Result<f64> {
    if l.is_nan() || l < 0.0 {
        return Err(Error::Domain {
            value: l,
            domain: "[0, ∞)",
        });
    }
    let p = spec.shape;
    match spec.family {
        Family::Standard => Ok((-spec.beta * l).exp()),
        Family::Plus => Ok((-(p * spec.beta0 * l).ln_1p() / p).exp()),
        Family::Minus => {
            let bound = spec.support_bound();
            if l >= bound {
                return Err(Error::OutsideSupport { length: l, bound });
            }
            Ok(((-p * spec.beta0 * l).ln_1p() / p).exp())
        }
    }
}

/// The `l ≥ 0` with `boltzmann(spec, l) = y`.
pub fn inverse_length(spec: &BoltzmannSpec, y: f64) -> Result<f64> {
    if !(y > 0.0 && y <= 1.0) {
        return Err(Error::Domain {
            value: y,
            domain: "(0, 1]",
        });
    }
    let p = spec.shape;
    let ln_y = y.ln();
    Ok(match spec.family {
        Family::Standard => -ln_y / spec.beta,
        // y^(-p) - 1
        Family::Plus => (-p * ln_y).exp_m1() / (p * spec.beta0),
        // 1 - y^p
        Family::Minus => -(p * ln_y).exp_m1() / (p * spec.beta0),
    })
}

/// Gamma-like mixing density `f±(β)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixingDensity {
    family: Family,
    shape: f64,
    beta0: f64,
}

impl MixingDensity {
    pub fn new(family: Family, shape: f64, beta0: f64) -> Result<Self> {
        if family == Family::Standard {
            return Err(Error::InvalidParameter(
                "the standard factor corresponds to a point mass, not a density".into(),
            ));
        }
        check_shape(shape)?;
        check_beta0(beta0)?;
        Ok(MixingDensity {
            family,
            shape,
            beta0,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// The Boltzmann factor this density is paired with.
    pub fn boltzmann_spec(&self) -> BoltzmannSpec {
        BoltzmannSpec {
            family: self.family,
            shape: self.shape,
            beta0: self.beta0,
            beta: self.beta0,
        }
    }
}

/// `f±(β) = (β/(β0 p))^((±1-p)/p) exp(-β/(β0 p)) / (β0 p Γ(1/p))`.
///
/// The plus density is a Gamma density with shape `1/p` and scale `β0 p`.
/// The minus density has a non-integrable pole at `β = 0`.
pub fn mixing_density(d: &MixingDensity, beta: f64) -> Result<f64> {
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::Domain {
            value: beta,
            domain: "(0, ∞)",
        });
    }
    let p = d.shape;
    let scale = d.beta0 * p;
    let sign = if d.family == Family::Plus { 1.0 } else { -1.0 };
    let exponent = (sign - p) / p;
    let ln_f = -scale.ln() - libm::lgamma(1.0 / p) + exponent * (beta / scale).ln() - beta / scale;
    Ok(ln_f.exp())
}

/// `∫_0^∞ f(β) e^(-β l) dβ` by adaptive quadrature.
///
/// For the minus density the integral diverges at `β → 0` and the result
/// is [`Error::Convergence`] carrying the last estimate.
pub fn laplace_forward(d: &MixingDensity, l: f64, rel_tol: f64) -> Result<Integral> {
    if l.is_nan() || l < 0.0 {
        return Err(Error::Domain {
            value: l,
            domain: "[0, ∞)",
        });
    }
    if !(1e-12..=1e-3).contains(&rel_tol) {
        return Err(Error::InvalidParameter(format!(
            "rel_tol must lie in [1e-12, 1e-3], got {rel_tol}"
        )));
    }
    integrate_semi_infinite(
        |beta| {
            mixing_density(d, beta)
                .map(|f| f * (-beta * l).exp())
                .unwrap_or(f64::NAN)
        },
        Tolerance::relative(rel_tol),
    )
}

/// How the shape parameter enters the length function of [`entropic_form`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeMode {
    /// Use the shape of the given factor.
    Fixed,
    /// Use the integration variable `y` as the shape at each point.
    SelfIdentified,
}

/// Largest length `|y*|` in the denominator `1 - l(y)/|y*|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Cutoff {
    Finite(f64),
    Infinite,
}

impl std::str::FromStr for Cutoff {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinite" | "infinity" => Ok(Cutoff::Infinite),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|v| *v > 0.0)
                .map(|v| {
                    if v.is_infinite() {
                        Cutoff::Infinite
                    } else {
                        Cutoff::Finite(v)
                    }
                })
                .ok_or_else(|| {
                    Error::InvalidParameter(format!(
                        "cutoff must be positive or \"inf\", got {other:?}"
                    ))
                }),
        }
    }
}

/// Entropic form value and the normalization constant that makes `h(1) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropicForm {
    pub h: f64,
    pub alpha: f64,
}

/// `h(x) = ∫_0^x (α + l(y)) / (1 - l(y)/|y*|) dy` with `α` solved from
/// `h(1) = 0`.
pub fn entropic_form(
    spec: &BoltzmannSpec,
    mode: ShapeMode,
    cutoff: Cutoff,
    x: f64,
    abs_tol: f64,
) -> Result<EntropicForm> {
    if !(x > 0.0 && x <= 1.0) {
        return Err(Error::Domain {
            value: x,
            domain: "(0, 1]",
        });
    }
    if abs_tol.is_nan() || abs_tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "abs_tol must be positive, got {abs_tol}"
        )));
    }
    if mode == ShapeMode::SelfIdentified && spec.family == Family::Standard {
        return Err(Error::InvalidParameter(
            "the standard factor has no shape to identify".into(),
        ));
    }

    let length = |y: f64| -> f64 {
        let s = match mode {
            ShapeMode::Fixed => *spec,
            ShapeMode::SelfIdentified => spec.with_shape(y),
        };
        inverse_length(&s, y).unwrap_or(f64::NAN)
    };
    let inv_cutoff = match cutoff {
        Cutoff::Infinite => 0.0,
        Cutoff::Finite(c) => {
            // l decreases from l(0+) to 0, so the denominator vanishes
            // somewhere in (0, 1) iff l(0+) exceeds the cutoff.
            let sup = match (spec.family, mode) {
                (Family::Minus, ShapeMode::Fixed) => spec.support_bound(),
                _ => f64::INFINITY,
            };
            if sup > c {
                return Err(Error::Singularity);
            }
            1.0 / c
        }
    };
    let integrand = |alpha: f64| move |y: f64| (alpha + length(y)) / (1.0 - length(y) * inv_cutoff);
    let tol = Tolerance::absolute(abs_tol / 4.0);

    let h_at_one = |alpha: f64| {
        integrate(integrand(alpha), 0.0, 1.0, tol)
            .map(|r| r.value)
            .unwrap_or(f64::NAN)
    };

    // h(1) increases in α; widen the bracket until it changes sign.
    let (mut lo, mut hi) = (-1.0, 1.0);
    while h_at_one(lo) > 0.0 || h_at_one(hi) < 0.0 {
        if hi > 1e12 {
            return Err(Error::Convergence {
                estimate: f64::NAN,
                error_estimate: f64::INFINITY,
            });
        }
        lo *= 4.0;
        hi *= 4.0;
    }
    // surface quadrature failures before root-finding
    integrate(integrand(lo), 0.0, 1.0, tol)?;
    let alpha = illinois(h_at_one, lo, hi, abs_tol / 4.0, 100)?;
    let h = integrate(integrand(alpha), 0.0, x, tol)?.value;
    Ok(EntropicForm { h, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::efflog::{eff_log, LogKind};

    #[test]
    fn boltzmann_examples() {
        let plus = BoltzmannSpec::plus(0.5, 1.0).unwrap();
        let minus = BoltzmannSpec::minus(0.5, 1.0).unwrap();
        assert_eq!(boltzmann(&plus, 0.0).unwrap(), 1.0);
        assert!((boltzmann(&plus, 2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((boltzmann(&minus, 1.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(
            boltzmann(&minus, 2.0),
            Err(Error::OutsideSupport { .. })
        ));
        assert!(boltzmann(&plus, -1.0).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(BoltzmannSpec::plus(0.0, 1.0).is_err());
        assert!(BoltzmannSpec::plus(1.5, 1.0).is_err());
        assert!(BoltzmannSpec::minus(0.5, 0.0).is_err());
        assert!(BoltzmannSpec::standard(-1.0).is_err());
        assert!(MixingDensity::new(Family::Standard, 0.5, 1.0).is_err());
    }

    #[test]
    fn mixing_density_examples() {
        let d = MixingDensity::new(Family::Plus, 0.5, 1.0).unwrap();
        assert!((mixing_density(&d, 1.0).unwrap() - 4.0 * (-2.0f64).exp()).abs() < 1e-14);
        let e = MixingDensity::new(Family::Plus, 1.0, 1.0).unwrap();
        assert!((mixing_density(&e, 1.0).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn laplace_examples() {
        let d = MixingDensity::new(Family::Plus, 0.5, 1.0).unwrap();
        assert!((laplace_forward(&d, 2.0, 1e-10).unwrap().value - 0.25).abs() < 1e-6);
        assert!((laplace_forward(&d, 0.0, 1e-10).unwrap().value - 1.0).abs() < 1e-6);
        assert!(laplace_forward(&d, 0.0, 1e-15).is_err());
        assert!(laplace_forward(&d, -1.0, 1e-8).is_err());
    }

    #[test]
    fn inverse_length_examples() {
        assert_eq!(
            inverse_length(&BoltzmannSpec::standard(1.0).unwrap(), 1.0).unwrap(),
            0.0
        );
        let plus = BoltzmannSpec::plus(0.5, 1.0).unwrap();
        assert!((inverse_length(&plus, 0.25).unwrap() - 2.0).abs() < 1e-15);
        let minus_log = -eff_log(LogKind::Minus, 0.5).unwrap();
        assert!((inverse_length(&plus, 0.5).unwrap() - minus_log).abs() < 1e-15);
        assert!(inverse_length(&plus, 0.0).is_err());
        assert!(inverse_length(&plus, 1.1).is_err());
    }

    #[test]
    fn entropic_form_standard() {
        let spec = BoltzmannSpec::standard(1.0).unwrap();
        let r = entropic_form(&spec, ShapeMode::Fixed, Cutoff::Infinite, 0.5, 1e-10).unwrap();
        assert!((r.h - 0.346_573_590_280).abs() < 1e-9);
        assert!((r.alpha + 1.0).abs() < 1e-9);
        let one = entropic_form(&spec, ShapeMode::Fixed, Cutoff::Infinite, 1.0, 1e-10).unwrap();
        assert!(one.h.abs() < 1e-9);
    }

    #[test]
    fn entropic_form_singularities() {
        let spec = BoltzmannSpec::standard(1.0).unwrap();
        assert_eq!(
            entropic_form(&spec, ShapeMode::Fixed, Cutoff::Finite(5.0), 0.5, 1e-8),
            Err(Error::Singularity)
        );
        assert!(entropic_form(
            &spec,
            ShapeMode::SelfIdentified,
            Cutoff::Infinite,
            0.5,
            1e-8
        )
        .is_err());
        // the bounded minus length stays below a large enough cutoff
        let minus = BoltzmannSpec::minus(0.5, 1.0).unwrap();
        assert!(entropic_form(&minus, ShapeMode::Fixed, Cutoff::Finite(4.0), 0.5, 1e-8).is_ok());
        assert_eq!(
            entropic_form(&minus, ShapeMode::Fixed, Cutoff::Finite(1.5), 0.5, 1e-8),
            Err(Error::Singularity)
        );
    }

    #[test]
    fn cutoff_parsing() {
        assert_eq!("inf".parse::<Cutoff>().unwrap(), Cutoff::Infinite);
        assert_eq!("2.5".parse::<Cutoff>().unwrap(), Cutoff::Finite(2.5));
        assert!("-1".parse::<Cutoff>().is_err());
    }
}
