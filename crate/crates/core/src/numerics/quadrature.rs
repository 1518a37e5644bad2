//! Adaptive Gauss-Kronrod quadrature.
//!
//! Globally adaptive bisection driven by the 7-point Gauss / 15-point
//! Kronrod pair. A semi-infinite range `[a, inf)` is split at `a + 1`; the
//! tail is mapped with `x = a + 1/y` onto `y in (0, 1]`, so the improper
//! endpoint becomes `y = 0`, where floating point keeps full resolution and
//! Gauss-Kronrod nodes never land.

#![allow(clippy::excessive_precision)]

use crate::error::NumericsError;

/// Kronrod abscissae, descending; the last entry is the center node.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];

/// Gauss weights for the odd Kronrod nodes (1, 3, 5) and the center.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

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

/// Floor for [`QuadratureSpec::tightened`]; the Kronrod error estimate
/// itself never drops below about `50 eps |value|`.
pub const MIN_REL_TOL: f64 = 1e-13;

/// Stopping rule for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-9,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self, NumericsError> {
        if !(rel_tol > 0.0) || !(abs_tol >= 0.0) || max_subdivisions < 1 {
            return Err(NumericsError::Domain(format!(
                "invalid quadrature tolerances rel={rel_tol} abs={abs_tol} max={max_subdivisions}"
            )));
        }
        Ok(QuadratureSpec {
            rel_tol,
            abs_tol,
            max_subdivisions,
        })
    }

    /// Same budget, tighter tolerances.
    pub fn tightened(&self, factor: f64) -> Self {
        QuadratureSpec {
            rel_tol: (self.rel_tol * factor).max(MIN_REL_TOL),
            abs_tol: self.abs_tol * factor,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

/// Integral value with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub subdivisions: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut err = err.abs();
    if res_asc != 0.0 && err != 0.0 {
        let scale = (200.0 * err / res_asc).powf(1.5);
        err = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    err
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let scale = half.abs();
    Segment {
        a,
        b,
        value: res_k * half,
        error: rescale_error((res_k - res_g) * half, res_abs * scale, res_asc * scale),
    }
}

fn adapt<F: Fn(f64) -> f64>(f: &F, breaks: &[f64], spec: &QuadratureSpec) -> Result<Integral, NumericsError> {
    let (a, b) = (breaks[0], breaks[breaks.len() - 1]);
    let mut segments: Vec<Segment> = breaks.windows(2).map(|w| gauss_kronrod(f, w[0], w[1])).collect();
    loop {
        // Fixed summation order keeps repeated calls bit-identical.
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() || !error.is_finite() {
            return Err(NumericsError::Domain(format!(
                "integrand produced a non-finite value on [{a}, {b}]"
            )));
        }
        if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
            return Ok(Integral {
                value,
                error,
                subdivisions: segments.len(),
            });
        }

        let (worst, seg) = segments
            .iter()
            .enumerate()
            .fold((0, segments[0]), |best, (i, s)| if s.error > best.1.error { (i, *s) } else { best });
        let mid = 0.5 * (seg.a + seg.b);
        let too_narrow = (seg.b - seg.a).abs() <= 1e3 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE);
        if segments.len() >= spec.max_subdivisions || too_narrow {
            return Err(NumericsError::NonConvergence {
                subdivisions: segments.len(),
                value,
                error,
            });
        }
        segments[worst] = gauss_kronrod(f, seg.a, mid);
        segments.push(gauss_kronrod(f, mid, seg.b));
    }
}

/// Integrate `f` over `[a, b]`; `b` may be `f64::INFINITY`.
///
/// Returns [`NumericsError::NonConvergence`] when the subdivision budget
/// runs out before `error <= max(abs_tol, rel_tol * |value|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Integral, NumericsError> {
    if a.is_nan() || b.is_nan() || !a.is_finite() {
        return Err(NumericsError::Domain(format!("invalid integration range [{a}, {b}]")));
    }
    if b < a {
        return Err(NumericsError::Domain(format!("lower bound {a} exceeds upper bound {b}")));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            subdivisions: 0,
        });
    }
    if b.is_infinite() {
        // t in [-1, 0] covers [a, a + 1] directly; t in (0, 1] is the tail.
        let mapped = |t: f64| {
            if t <= 0.0 {
                f(a + 1.0 + t)
            } else {
                let x = a + 1.0 / t;
                let jac = t * t;
                if !x.is_finite() || jac == 0.0 {
                    return 0.0;
                }
                f(x) / jac
            }
        };
        adapt(&mapped, &[-1.0, 0.0, 1.0], spec)
    } else {
        adapt(&f, &[a, b], spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn arctangent_half_line() {
        let r = integrate(|z| 1.0 / (1.0 + z * z), 0.0, f64::INFINITY, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(r.value, PI / 2.0, max_relative = 1e-10);
        assert!(r.error <= 1e-9 * r.value);
    }

    #[test]
    fn linear_unit_interval() {
        let r = integrate(|x| x, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(r.value, 0.5, max_relative = 1e-14);
    }

    #[test]
    fn exponential_half_line() {
        let r = integrate(|x| (-x).exp(), 0.0, f64::INFINITY, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn shifted_semi_infinite() {
        // ∫_2^∞ e^{-x} dx = e^{-2}
        let r = integrate(|x| (-x).exp(), 2.0, f64::INFINITY, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(r.value, (-2.0f64).exp(), max_relative = 1e-10);
    }

    #[test]
    fn heavy_tail() {
        // ∫_0^∞ dz/(1+z^{5/4}) = (4π/5)/sin(4π/5)
        let r = integrate(|z: f64| 1.0 / (1.0 + z.powf(1.25)), 0.0, f64::INFINITY, &QuadratureSpec::default()).unwrap();
        let x = 4.0 * PI / 5.0;
        assert_relative_eq!(r.value, x / x.sin(), max_relative = 1e-9);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-8);
    }

    #[test]
    fn deterministic_bits() {
        let f = |x: f64| (-x).exp() * (3.0 * x).cos() / (1.0 + x);
        let spec = QuadratureSpec::default();
        let a = integrate(f, 0.0, f64::INFINITY, &spec).unwrap();
        let b = integrate(f, 0.0, f64::INFINITY, &spec).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn budget_exhaustion_reports_nonconvergence() {
        let spec = QuadratureSpec::new(1e-14, 0.0, 3).unwrap();
        let err = integrate(|x| (50.0 * x).sin().abs(), 0.0, 10.0, &spec).unwrap_err();
        assert!(matches!(err, NumericsError::NonConvergence { .. }));
    }

    #[test]
    fn bad_ranges() {
        let spec = QuadratureSpec::default();
        assert!(integrate(|x| x, 1.0, 0.0, &spec).is_err());
        assert_eq!(integrate(|x| x, 1.0, 1.0, &spec).unwrap().value, 0.0);
        assert!(QuadratureSpec::new(0.0, 0.0, 10).is_err());
        assert!(QuadratureSpec::new(1e-6, 0.0, 0).is_err());
    }
}
