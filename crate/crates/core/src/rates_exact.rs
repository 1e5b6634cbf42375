//! Exact-data error curves and convergence-rate fits.
//!
//! For exact data the squared reconstruction error has the closed spectral
//! form `err^2(alpha) = sum_i rtilde(alpha, lambda_i) x_i^2`, which is
//! non-decreasing in `alpha`, bounded by the squared solution norm, and
//! bounded below by `rtilde_alpha(alpha) e(alpha)` with `e` the spectral
//! tail function of the solution.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::filters::FilterFamily;
use crate::operators::{SpectralOperator, SpectralVector};
use crate::solve::fit_loglog;
use crate::sums::kahan_sum;

/// Squared exact-data error at one parameter value.
pub fn error_exact(
    op: &SpectralOperator,
    x: &SpectralVector,
    family: &FilterFamily,
    alpha: f64,
) -> Result<f64> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "regularization parameter must be positive, got {alpha:e}"
        )));
    }
    if op.len() != x.len() {
        return Err(Error::LengthMismatch {
            left: op.len(),
            right: x.len(),
        });
    }
    if let Some(dm) = family.domain_max() {
        if op.norm_sq() > dm * (1.0 + 1e-12) {
            return Err(Error::OutOfRange(format!(
                "spectrum reaches {:e}, beyond the {} domain limit {dm:e}",
                op.norm_sq(),
                family.name()
            )));
        }
    }
    // Sum from the tail: small eigenvalues carry the small residual terms.
    Ok(kahan_sum(
        op.lambda()
            .iter()
            .zip(x.coeffs())
            .rev()
            .map(|(&l, &c)| family.rtilde(alpha, l) * c * c),
    ))
}

/// Identifies where a curve came from, for embedding in exports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveProvenance {
    pub operator: String,
    pub filter: String,
    pub profile: String,
}

/// One sample of the exact-data error curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub alpha: f64,
    pub err_sq: f64,
}

/// Exact-data error sampled over a parameter grid, in ascending `alpha`
/// order.
#[derive(Clone, Debug, Serialize)]
pub struct ErrorCurve {
    pub rows: Vec<CurveRow>,
    pub provenance: CurveProvenance,
}

impl ErrorCurve {
    /// Rows whose parameter lies in `[min, max]`, with a one-ulp-scale
    /// slack so grid endpoints are kept.
    pub fn rows_in_window(&self, window: FitWindow) -> Vec<CurveRow> {
        self.rows
            .iter()
            .copied()
            .filter(|r| {
                r.alpha >= window.min * (1.0 - 1e-9) && r.alpha <= window.max * (1.0 + 1e-9)
            })
            .collect()
    }

    /// Writes `alpha,err_sq` rows as CSV, preceded by any comment lines
    /// the caller wants embedded (each already starting with `#`).
    pub fn write_csv<W: Write>(&self, w: &mut W, comments: &[String]) -> io::Result<()> {
        for line in comments {
            writeln!(w, "{line}")?;
        }
        writeln!(w, "alpha,err_sq")?;
        for row in &self.rows {
            writeln!(w, "{:e},{:e}", row.alpha, row.err_sq)?;
        }
        Ok(())
    }
}

/// Samples the exact-data error over a parameter grid.
///
/// The grid may come in any order; the curve is stored ascending. The
/// sampled curve must be non-decreasing in `alpha` up to accumulation
/// slack, otherwise the residual factor of the family is defective and a
/// `NonMonotone` error points at the first offending parameter.
pub fn error_curve(
    op: &SpectralOperator,
    x: &SpectralVector,
    family: &FilterFamily,
    alphas: &[f64],
    provenance: CurveProvenance,
) -> Result<ErrorCurve> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("parameter grid is empty".into()));
    }
    let mut sorted = alphas.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut rows = Vec::with_capacity(sorted.len());
    for &alpha in &sorted {
        rows.push(CurveRow {
            alpha,
            err_sq: error_exact(op, x, family, alpha)?,
        });
    }
    let scale = x.norm_sq().max(f64::MIN_POSITIVE);
    for w in rows.windows(2) {
        if w[1].err_sq < w[0].err_sq - 1e-12 * scale {
            return Err(Error::NonMonotone { alpha: w[1].alpha });
        }
    }
    Ok(ErrorCurve { rows, provenance })
}

/// Parameter window used to select fit samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitWindow {
    pub min: f64,
    pub max: f64,
}

impl FitWindow {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min <= 0.0 || max < min {
            return Err(Error::InvalidArgument(format!(
                "fit window must satisfy 0 < min <= max, got [{min:e}, {max:e}]"
            )));
        }
        Ok(Self { min, max })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.min, self.max).map(|_| ())
    }
}

/// Result of fitting a rate model to an error curve.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum RateFit {
    /// Least-squares slope of `ln err^2` against `ln alpha`.
    Power {
        slope: f64,
        intercept: f64,
        r_squared: f64,
        window: FitWindow,
        points: usize,
    },
    /// Spread of `err^2 * |ln alpha|^nu`; a spread near one certifies the
    /// logarithmic decay law with exponent `nu`.
    Logarithmic {
        nu: f64,
        ratio_min: f64,
        ratio_max: f64,
        spread: f64,
        window: FitWindow,
        points: usize,
    },
}

/// Minimum samples demanded of a power-law fit.
pub const MIN_FIT_POINTS: usize = 10;

/// Fits `err^2 ~ C alpha^s` on the window and reports `s`.
pub fn fit_power_rate(curve: &ErrorCurve, window: FitWindow) -> Result<RateFit> {
    window.validate()?;
    let rows = curve.rows_in_window(window);
    if rows.len() < MIN_FIT_POINTS {
        return Err(Error::InvalidArgument(format!(
            "window [{:e}, {:e}] selects {} samples, need at least {MIN_FIT_POINTS}",
            window.min,
            window.max,
            rows.len()
        )));
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.alpha).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.err_sq).collect();
    let (slope, intercept, r_squared) = fit_loglog(&xs, &ys)?;
    Ok(RateFit::Power {
        slope,
        intercept,
        r_squared,
        window,
        points: rows.len(),
    })
}

/// Checks the logarithmic decay law `err^2 ~ C |ln alpha|^(-nu)` on the
/// window by measuring the spread of the compensated curve.
///
/// The window must stay below one so the logarithm has a sign, and below
/// `exp(-(1 + nu))` so the benchmark is in its concave regime.
pub fn fit_log_rate(curve: &ErrorCurve, nu: f64, window: FitWindow) -> Result<RateFit> {
    window.validate()?;
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "logarithmic exponent must be positive, got {nu}"
        )));
    }
    let cap = (-(1.0 + nu)).exp();
    if window.max > cap {
        return Err(Error::OutOfRange(format!(
            "window reaches {:e}, beyond the concave regime bound {cap:e}",
            window.max
        )));
    }
    let rows = curve.rows_in_window(window);
    if rows.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "window [{:e}, {:e}] selects {} samples, need at least 2",
            window.min,
            window.max,
            rows.len()
        )));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for row in &rows {
        if row.err_sq <= 0.0 {
            return Err(Error::CannotFitLog(format!(
                "error vanishes at alpha = {:e}",
                row.alpha
            )));
        }
        let ratio = row.err_sq * (-row.alpha.ln()).powf(nu);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    Ok(RateFit::Logarithmic {
        nu,
        ratio_min: lo,
        ratio_max: hi,
        spread: hi / lo,
        window,
        points: rows.len(),
    })
}
