use crate::error::NumericsError;

/// Real roots of a quadratic, ascending.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QuadraticRoots {
    One(f64),
    Two(f64, f64),
}

impl QuadraticRoots {
    pub fn to_vec(self) -> Vec<f64> {
        match self {
            QuadraticRoots::One(x) => vec![x],
            QuadraticRoots::Two(a, b) => vec![a, b],
        }
    }

    pub fn smallest(self) -> f64 {
        match self {
            QuadraticRoots::One(x) | QuadraticRoots::Two(x, _) => x,
        }
    }
}

/// Roots of `a x² + b x + c`.
///
/// Uses the cancellation-free form `q = -(b + sign(b) √disc) / 2`, roots
/// `q / a` and `c / q`. A zero leading coefficient falls back to the linear
/// equation; a repeated root is returned once.
pub fn find_root_quadratic(a: f64, b: f64, c: f64) -> Result<QuadraticRoots, NumericsError> {
    if a == 0.0 && b == 0.0 && c == 0.0 {
        return Err(NumericsError::DegenerateQuadratic);
    }
    if a == 0.0 {
        if b == 0.0 {
            return Err(NumericsError::NoRealRoot);
        }
        return Ok(QuadraticRoots::One(-c / b));
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return Err(NumericsError::NoRealRoot);
    }
    if disc == 0.0 {
        return Ok(QuadraticRoots::One(-b / (2.0 * a)));
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let (x1, x2) = if q == 0.0 {
        // b == 0: symmetric pair
        let r = (-c / a).sqrt();
        (-r, r)
    } else {
        (q / a, c / q)
    };
    Ok(if x1 <= x2 {
        QuadraticRoots::Two(x1, x2)
    } else {
        QuadraticRoots::Two(x2, x1)
    })
}

/// Bisection for a root of a continuous `f` with a sign change on `[lo, hi]`.
pub fn bisect_root<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> Result<f64, NumericsError> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(NumericsError::Domain(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= x_tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
