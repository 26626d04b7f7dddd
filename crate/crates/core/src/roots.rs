//! Bracketed root finding for monotone scalar equations.

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]` where `f(lo)` and `f(hi)` have opposite signs
/// (zero counts as either sign).
///
/// Stops when the bracket is narrower than `abs_tol + rel_tol * |x|` or when
/// the midpoint can no longer be separated from the endpoints.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || f_lo.signum() == f_hi.signum() {
        return Err(Error::domain(format!(
            "no sign change on [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}"
        )));
    }
    for _ in 0..2200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= abs_tol + rel_tol * mid.abs() {
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

/// Newton iteration kept inside a shrinking bracket, for an increasing `f`
/// with `f(lo) <= 0 <= f(hi)`. `f_df` returns the value and the derivative.
/// Steps that leave the bracket fall back to bisection.
pub fn newton_bracketed<F: FnMut(f64) -> (f64, f64)>(
    mut f_df: F,
    mut lo: f64,
    mut hi: f64,
    start: f64,
    rel_tol: f64,
) -> Result<f64> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::domain(format!("empty bracket [{lo}, {hi}]")));
    }
    let mut x = if start > lo && start < hi {
        start
    } else {
        0.5 * (lo + hi)
    };
    for _ in 0..400 {
        let (fx, dfx) = f_df(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - fx / dfx;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= rel_tol * next.abs() || hi - lo <= rel_tol * hi.abs() {
            return Ok(next);
        }
        if next <= lo || next >= hi {
            return Ok(x);
        }
        x = next;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15, 0.0).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn tiny_roots_resolved_relatively() {
        let r = bisect(|x| x - 1e-20, 0.0, 1.0, 0.0, 1e-14).unwrap();
        assert!((r / 1e-20 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn newton_matches_closed_form_log() {
        // e^y - 5 = 0
        let r = newton_bracketed(|y| (y.exp() - 5.0, y.exp()), 0.0, 4.0, 3.9, 1e-15).unwrap();
        assert!((r - 5f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn newton_survives_flat_start() {
        // derivative vanishes at the start; bisection fallback must take over
        let r = newton_bracketed(|y| (y * y * y - 1e-6, 3.0 * y * y), 0.0, 1.0, 0.0, 1e-14).unwrap();
        assert!((r - 1e-2).abs() < 1e-14);
    }

    #[test]
    fn missing_bracket_is_domain_error() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 0.0),
            Err(Error::Domain(_))
        ));
    }
}
