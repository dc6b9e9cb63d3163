//! Quadrature and root-finding used by the efflog and superstat modules.
//!
//! Everything here is deterministic: adaptive subdivision always splits the
//! interval with the largest error estimate (lowest left endpoint on ties)
//! and the final sum is taken in left-to-right order.

use crate::error::{Error, Result};

// Gauss-Kronrod 7/15 abscissae and weights.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Result of a quadrature: value and estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Requested accuracy. The integral is accepted once the summed error
/// estimate is below `max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub fn absolute(abs: f64) -> Self {
        Tolerance { abs, rel: 0.0 }
    }

    pub fn relative(rel: f64) -> Self {
        Tolerance { abs: 0.0, rel }
    }

    fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

/// Maximum number of panels an adaptive integration may create.
pub const MAX_PANELS: usize = 2000;

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 {
            res_asc * scale
        } else {
            res_asc
        };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_gauss = f_center * WG[3];
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for (j, &wg) in WG[..3].iter().enumerate() {
        let k = 2 * j + 1;
        let dx = half * XGK[k];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[k] = f1;
        fv2[k] = f2;
        res_gauss += wg * (f1 + f2);
        res_kronrod += WGK[k] * (f1 + f2);
        res_abs += WGK[k] * (f1.abs() + f2.abs());
    }
    for j in 0..4 {
        let k = 2 * j;
        let dx = half * XGK[k];
        let (f1, f2) = (f(center - dx), f(center + dx));
        fv1[k] = f1;
        fv2[k] = f2;
        res_kronrod += WGK[k] * (f1 + f2);
        res_abs += WGK[k] * (f1.abs() + f2.abs());
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for k in 0..7 {
        res_asc += WGK[k] * ((fv1[k] - mean).abs() + (fv2[k] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half;
    let value = res_kronrod * half;
    let error = rescale_error(err, res_abs * half.abs(), res_asc * half.abs());
    Panel { a, b, value, error }
}

/// Adaptive Gauss-Kronrod integration of `f` over the finite interval `[a, b]`.
///
/// Never evaluates `f` at the endpoints, so integrable endpoint
/// singularities are fine. Returns [`Error::Convergence`] (carrying the best
/// estimate) when the panel budget runs out or the estimate stops being
/// finite.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Integral> {
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
        });
    }
    let mut panels = vec![gk15(&f, a, b)];
    loop {
        let (value, error) = panel_sum(&mut panels);
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::Convergence {
                estimate: value,
                error_estimate: error,
            });
        }
        if error <= tol.target(value) {
            return Ok(Integral { value, error });
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::Convergence {
                estimate: value,
                error_estimate: error,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| p.error.total_cmp(&q.error).then(q.a.total_cmp(&p.a)))
            .map(|(i, _)| i)
            .unwrap();
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            return Err(Error::Convergence {
                estimate: value,
                error_estimate: error,
            });
        }
        panels.push(gk15(&f, p.a, mid));
        panels.push(gk15(&f, mid, p.b));
    }
}

fn panel_sum(panels: &mut [Panel]) -> (f64, f64) {
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    panels
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

/// Integral of `f` over `[0, ∞)`.
///
/// The integrand is sampled on a geometric grid to locate its peak; the
/// range is truncated at the first grid point past the peak where `|f|`
/// drops below `1e-16` of the peak value and the remainder is treated as
/// zero. Only meant for integrands with (at least) exponential decay.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, tol: Tolerance) -> Result<Integral> {
    const FIRST: f64 = 1e-6;
    const LAST: f64 = 1e12;
    const RATIO: f64 = 1.189_207_115_002_721; // 2^(1/4)

    let mut grid = Vec::new();
    let mut t = FIRST;
    while t <= LAST {
        grid.push((t, f(t).abs()));
        t *= RATIO;
    }
    let (peak_at, peak) =
        grid.iter()
            .copied()
            .filter(|(_, v)| v.is_finite())
            .fold(
                (FIRST, 0.0),
                |best, cur| if cur.1 > best.1 { cur } else { best },
            );
    if peak == 0.0 {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
        });
    }
    let cutoff = grid
        .iter()
        .find(|(t, v)| *t > peak_at && *v < 1e-16 * peak)
        .map(|(t, _)| *t)
        .ok_or(Error::Convergence {
            estimate: f64::NAN,
            error_estimate: f64::INFINITY,
        })?;
    integrate(f, 0.0, cutoff, tol)
}

/// Root of `f` in `[lo, hi]` by bisection down to a bracket of width
/// `x_tol`, refined by one secant step on the final bracket.
///
/// `f(lo)` and `f(hi)` must not have the same strict sign.
pub fn bisect_secant<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    x_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::InvalidParameter(format!(
            "root not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}"
        )));
    }
    for _ in 0..max_iter {
        if hi - lo <= x_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }
    let secant = hi - f_hi * (hi - lo) / (f_hi - f_lo);
    Ok(if secant.is_finite() {
        secant.clamp(lo, hi)
    } else {
        0.5 * (lo + hi)
    })
}

/// Illinois-modified regula falsi. Converges in one step for affine `f`.
pub fn illinois<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    f_tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo.signum() == f_hi.signum() && f_lo != 0.0 && f_hi != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "root not bracketed: f({lo}) = {f_lo}, f({hi}) = {f_hi}"
        )));
    }
    let mut side = 0i8;
    for _ in 0..max_iter {
        let x = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let fx = f(x);
        if fx.abs() <= f_tol {
            return Ok(x);
        }
        if fx.signum() == f_hi.signum() {
            hi = x;
            f_hi = fx;
            if side == -1 {
                f_lo *= 0.5;
            }
            side = -1;
        } else {
            lo = x;
            f_lo = fx;
            if side == 1 {
                f_hi *= 0.5;
            }
            side = 1;
        }
    }
    Err(Error::Convergence {
        estimate: 0.5 * (lo + hi),
        error_estimate: (hi - lo).abs(),
    })
}

/// `e^u - 1 - u`, accurate for small `|u|`.
pub fn exp_tail(u: f64) -> f64 {
    if u.abs() < 0.5 {
        let mut term = u * u / 2.0;
        let mut sum = 0.0f64;
        let mut k = 2.0;
        while term.abs() > f64::EPSILON * 1e-3 * sum.abs() && k < 60.0 {
            sum += term;
            k += 1.0;
            term *= u / k;
        }
        sum
    } else {
        u.exp_m1() - u
    }
}
