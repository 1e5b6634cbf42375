//! Scalar root solvers and log-log least squares shared by the rate and
//! distance routines.
//!
//! Every solver works on the logarithmic axis because the quantities
//! involved (regularization parameters, multipliers, radii) span many
//! orders of magnitude.

use crate::error::{Error, Result};

const MAX_BISECT_ITERS: u32 = 300;

/// Solves `f(x) = target` for a non-decreasing `f` on `[lo, hi]` by
/// bisection in log space.
///
/// Requires `0 < lo <= hi`, `f(lo) <= target`, and `f(hi) >= target`;
/// returns a point whose bracket has shrunk to relative width `rtol`.
pub fn bisect_log_increasing<F>(f: F, target: f64, lo: f64, hi: f64, rtol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    bisect_log(f, target, lo, hi, rtol, true)
}

/// Solves `f(x) = target` for a non-increasing `f`; see
/// [`bisect_log_increasing`] for the contract, with the bracket condition
/// mirrored (`f(lo) >= target >= f(hi)`).
pub fn bisect_log_decreasing<F>(f: F, target: f64, lo: f64, hi: f64, rtol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    bisect_log(f, target, lo, hi, rtol, false)
}

fn bisect_log<F>(
    f: F,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    rtol: f64,
    increasing: bool,
) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi < lo {
        return Err(Error::InvalidArgument(format!(
            "bisection interval must satisfy 0 < lo <= hi, got [{lo:e}, {hi:e}]"
        )));
    }
    if !(rtol > 0.0) {
        return Err(Error::InvalidArgument("rtol must be positive".into()));
    }
    let side = |x: f64| {
        let v = f(x);
        if increasing {
            v < target
        } else {
            v > target
        }
    };
    if !side(lo) && f(lo) != target {
        // Allow an exact hit at the endpoint; anything else is a bad bracket.
        return Err(Error::Bracket(format!(
            "f(lo) already past the target at lo = {lo:e}"
        )));
    }
    if side(hi) {
        return Err(Error::Bracket(format!(
            "f(hi) has not reached the target at hi = {hi:e}"
        )));
    }
    for _ in 0..MAX_BISECT_ITERS {
        if hi / lo - 1.0 <= rtol {
            break;
        }
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if side(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// Least-squares fit of `ln y` against `ln x`.
///
/// Returns `(slope, intercept, r_squared)` where `intercept` is the value
/// at `ln x = 0`. Requires at least two points and strictly positive data.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::InvalidArgument(
            "log-log fit needs at least two points".into(),
        ));
    }
    for (&x, &y) in xs.iter().zip(ys) {
        if x <= 0.0 || y <= 0.0 || !x.is_finite() || !y.is_finite() {
            return Err(Error::CannotFitLog(format!(
                "non-positive sample (x, y) = ({x:e}, {y:e})"
            )));
        }
    }
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (a, b) in lx.iter().zip(&ly) {
        let dx = a - mx;
        let dy = b - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InvalidArgument(
            "log-log fit needs at least two distinct abscissae".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    Ok((slope, intercept, r_squared))
}
