//! Regularization filter families and the generator validator.
//!
//! A family assigns to each parameter `alpha > 0` a generator `r_alpha`
//! acting on the spectrum, with residual factor `rtilde_alpha(lambda) =
//! (1 - lambda r_alpha(lambda))^2`. The validator samples the defining
//! conditions of an admissible family on explicit grids: the pointwise
//! bounds `r <= 1/lambda` and `sqrt(alpha lambda) r <= rho < 1`, monotone
//! decay of the residual in `lambda`, regular growth in `alpha`, and a
//! uniform diagonal bound `rtilde_alpha(alpha) <= rho_tilde < 1`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::{SpectralOperator, SpectralVector};
use crate::spectral_analysis::SamplePoint;

/// Relative slack for pointwise inequality checks.
const INEQ_SLACK: f64 = 1e-12;
/// Margin below one demanded of the estimated constants.
const UNIT_MARGIN: f64 = 1e-9;
/// A residual step larger than this fraction of its base value counts as a
/// discontinuity in the `alpha` direction.
const JUMP_FRACTION: f64 = 0.5;
/// Steps from an exactly zero residual are flagged once they exceed this.
const JUMP_FLOOR: f64 = 1e-12;

type FilterFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum FilterKind {
    Tikhonov,
    IteratedTikhonov {
        m: u32,
    },
    Landweber,
    Cutoff {
        c: f64,
    },
    Custom {
        r: FilterFn,
        rtilde: Option<FilterFn>,
    },
}

/// A named filter family with optional declared constants.
#[derive(Clone)]
pub struct FilterFamily {
    kind: FilterKind,
    name: String,
    rho: Option<f64>,
    rho_tilde: Option<f64>,
    domain_max: Option<f64>,
}

impl fmt::Debug for FilterFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FilterFamily")
            .field("name", &self.name)
            .field("rho", &self.rho)
            .field("rho_tilde", &self.rho_tilde)
            .field("domain_max", &self.domain_max)
            .finish()
    }
}

impl FilterFamily {
    /// Classical Tikhonov filter `r = 1 / (alpha + lambda)`.
    pub fn tikhonov() -> Self {
        Self {
            kind: FilterKind::Tikhonov,
            name: "tikhonov".into(),
            rho: Some(0.5),
            rho_tilde: Some(0.25 * (1.0 + 1e-9)),
            domain_max: None,
        }
    }

    /// `m`-times iterated Tikhonov filter, `m >= 2`.
    pub fn iterated_tikhonov(m: u32) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!(
                "iterated Tikhonov needs m >= 2, got {m}; use tikhonov() for m = 1"
            )));
        }
        Ok(Self {
            kind: FilterKind::IteratedTikhonov { m },
            name: format!("itik:{m}"),
            rho: None,
            rho_tilde: Some(0.25f64.powi(m as i32) * (1.0 + 1e-9)),
            domain_max: None,
        })
    }

    /// Landweber iteration with `k = ceil(1 / alpha)` steps and unit step
    /// size; requires the spectrum inside `[0, 1]`.
    pub fn landweber() -> Self {
        Self {
            kind: FilterKind::Landweber,
            name: "landweber".into(),
            rho: None,
            rho_tilde: Some((-2.0f64).exp()),
            domain_max: Some(1.0),
        }
    }

    /// Spectral cutoff keeping modes with `lambda >= c * alpha`.
    pub fn cutoff(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "cutoff threshold must be positive, got {c}"
            )));
        }
        Ok(Self {
            kind: FilterKind::Cutoff { c },
            name: format!("cutoff:{c}"),
            rho: if c > 1.0 { Some(1.0 / c.sqrt()) } else { None },
            rho_tilde: None,
            domain_max: None,
        })
    }

    /// A user-supplied generator `r(alpha, lambda)`.
    ///
    /// When `rtilde` is omitted it defaults to `(1 - lambda r)^2`. The
    /// declared constants are optional; estimates replace them where needed.
    pub fn custom(
        name: impl Into<String>,
        r: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        rtilde: Option<FilterFn>,
        rho: Option<f64>,
        rho_tilde: Option<f64>,
        domain_max: Option<f64>,
    ) -> Self {
        Self {
            kind: FilterKind::Custom {
                r: Arc::new(r),
                rtilde,
            },
            name: name.into(),
            rho,
            rho_tilde,
            domain_max,
        }
    }

    /// Parses `"tikhonov"`, `"itik:m"`, `"landweber"`, or `"cutoff:c"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut parts = spec.split(':');
        let head = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        match (head, args.as_slice()) {
            ("tikhonov", []) => Ok(Self::tikhonov()),
            ("itik", [m]) => {
                let m: u32 = m.parse().map_err(|_| {
                    Error::InvalidArgument(format!("cannot parse '{m}' as an iteration count"))
                })?;
                Self::iterated_tikhonov(m)
            }
            ("landweber", []) => Ok(Self::landweber()),
            ("cutoff", [c]) => {
                let c: f64 = c.parse().map_err(|_| {
                    Error::InvalidArgument(format!("cannot parse '{c}' as a cutoff threshold"))
                })?;
                Self::cutoff(c)
            }
            _ => Err(Error::InvalidArgument(format!(
                "unknown filter '{spec}'; expected tikhonov, itik:m, landweber, or cutoff:c"
            ))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Declared bound on `sqrt(alpha lambda) r`, if the family ships one.
    pub fn rho(&self) -> Option<f64> {
        self.rho
    }

    /// Declared bound on the diagonal residual, if the family ships one.
    pub fn rho_tilde(&self) -> Option<f64> {
        self.rho_tilde
    }

    /// Largest admissible eigenvalue, if the family restricts the spectrum.
    pub fn domain_max(&self) -> Option<f64> {
        self.domain_max
    }

    /// Generator value `r_alpha(lambda)` for `alpha > 0`, `lambda >= 0`.
    pub fn r(&self, alpha: f64, lambda: f64) -> f64 {
        debug_assert!(alpha > 0.0);
        debug_assert!(lambda >= 0.0);
        match &self.kind {
            FilterKind::Tikhonov => 1.0 / (alpha + lambda),
            FilterKind::IteratedTikhonov { m } => {
                if lambda == 0.0 {
                    f64::from(*m) / alpha
                } else {
                    -f64::exp_m1(-f64::from(*m) * f64::ln_1p(lambda / alpha)) / lambda
                }
            }
            FilterKind::Landweber => {
                let k = landweber_steps(alpha);
                if lambda == 0.0 {
                    k
                } else if lambda >= 1.0 {
                    // Out of domain above 1; exactly 1 is the fixed point.
                    if lambda == 1.0 {
                        1.0
                    } else {
                        f64::NAN
                    }
                } else {
                    -f64::exp_m1(k * f64::ln_1p(-lambda)) / lambda
                }
            }
            FilterKind::Cutoff { c } => {
                if lambda >= c * alpha {
                    1.0 / lambda
                } else {
                    0.0
                }
            }
            FilterKind::Custom { r, .. } => r(alpha, lambda),
        }
    }

    /// Residual factor `rtilde_alpha(lambda) = (1 - lambda r)^2`.
    pub fn rtilde(&self, alpha: f64, lambda: f64) -> f64 {
        debug_assert!(alpha > 0.0);
        debug_assert!(lambda >= 0.0);
        match &self.kind {
            FilterKind::Tikhonov => {
                let s = alpha / (alpha + lambda);
                s * s
            }
            FilterKind::IteratedTikhonov { m } => {
                (-2.0 * f64::from(*m) * f64::ln_1p(lambda / alpha)).exp()
            }
            FilterKind::Landweber => {
                if lambda >= 1.0 {
                    if lambda == 1.0 {
                        0.0
                    } else {
                        f64::NAN
                    }
                } else {
                    (2.0 * landweber_steps(alpha) * f64::ln_1p(-lambda)).exp()
                }
            }
            FilterKind::Cutoff { c } => {
                if lambda >= c * alpha {
                    0.0
                } else {
                    1.0
                }
            }
            FilterKind::Custom { r, rtilde } => match rtilde {
                Some(rt) => rt(alpha, lambda),
                None => {
                    let d = 1.0 - lambda * r(alpha, lambda);
                    d * d
                }
            },
        }
    }

    /// Largest sampled value of `sqrt(alpha lambda) r` over the grids,
    /// with eigenvalues clipped to the family domain.
    pub fn rho_hat_estimate(&self, alphas: &[f64], lambdas: &[f64]) -> f64 {
        let mut sup = 0.0f64;
        for &alpha in alphas {
            for &lambda in lambdas {
                if self.domain_max.is_some_and(|dm| lambda > dm) {
                    continue;
                }
                let v = (alpha * lambda).sqrt() * self.r(alpha, lambda);
                sup = sup.max(v);
            }
        }
        sup
    }

    /// Largest sampled diagonal residual `rtilde_alpha(alpha)`, with the
    /// diagonal clipped to the family domain.
    pub fn rho_tilde_hat_estimate(&self, alphas: &[f64]) -> f64 {
        let mut sup = 0.0f64;
        for &alpha in alphas {
            let lambda = match self.domain_max {
                Some(dm) => alpha.min(dm),
                None => alpha,
            };
            sup = sup.max(self.rtilde(alpha, lambda));
        }
        sup
    }

    /// Declared `rho` when available, otherwise the sampled estimate.
    pub fn rho_or_estimate(&self, alphas: &[f64], lambdas: &[f64]) -> f64 {
        self.rho
            .unwrap_or_else(|| self.rho_hat_estimate(alphas, lambdas))
    }
}

fn landweber_steps(alpha: f64) -> f64 {
    (1.0 / alpha).ceil().max(1.0)
}

/// Outcome of one sampled condition.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub passed: bool,
    pub detail: String,
    pub witness: Option<SamplePoint>,
}

impl ConditionReport {
    fn pass(detail: String) -> Self {
        Self {
            passed: true,
            detail,
            witness: None,
        }
    }

    fn fail(detail: String, witness: SamplePoint) -> Self {
        Self {
            passed: false,
            detail,
            witness: Some(witness),
        }
    }
}

/// Full validator output for one family on one pair of grids.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratorReport {
    pub filter: String,
    /// Pointwise bounds `lambda r <= 1` and `sqrt(alpha lambda) r <= rho < 1`.
    pub pointwise_bounds: ConditionReport,
    /// The residual is non-increasing along the spectrum.
    pub residual_monotone_in_lambda: ConditionReport,
    /// The residual grows in `alpha` without discontinuities.
    pub residual_regular_in_alpha: ConditionReport,
    /// The diagonal residual stays uniformly below one.
    pub diagonal_bounded: ConditionReport,
    pub rho_hat: f64,
    pub rho_tilde_hat: f64,
    pub all_passed: bool,
    pub alpha_range: (f64, f64),
    pub lambda_range: (f64, f64),
    /// Eigenvalue samples discarded because they exceed the family domain.
    pub clipped_lambdas: usize,
}

/// Samples the admissibility conditions of `family` on the given grids.
///
/// Grids must be positive; they are sorted and deduplicated internally.
/// Eigenvalues beyond the family domain are discarded and counted. Note
/// that a discretized iteration count (as in Landweber) produces genuine
/// steps of the residual in `alpha`, which the regularity check reports as
/// discontinuities on fine grids.
pub fn validate_generator(
    family: &FilterFamily,
    alphas: &[f64],
    lambdas: &[f64],
) -> Result<GeneratorReport> {
    let alphas = sorted_grid("alpha", alphas)?;
    let before = lambdas.len();
    let lambdas: Vec<f64> = {
        let mut l = sorted_grid("lambda", lambdas)?;
        if let Some(dm) = family.domain_max() {
            l.retain(|&x| x <= dm);
        }
        l
    };
    let clipped = before - lambdas.len();
    if lambdas.is_empty() {
        return Err(Error::OutOfRange(
            "every eigenvalue sample exceeds the family domain".into(),
        ));
    }

    // Pointwise bounds.
    let mut worst_lr = f64::NEG_INFINITY;
    let mut worst_lr_pt = SamplePoint {
        alpha: 0.0,
        lambda: 0.0,
        value: 0.0,
    };
    let mut rho_hat = f64::NEG_INFINITY;
    let mut rho_pt = worst_lr_pt;
    for &alpha in &alphas {
        for &lambda in &lambdas {
            let r = family.r(alpha, lambda);
            let lr = lambda * r;
            if lr > worst_lr {
                worst_lr = lr;
                worst_lr_pt = SamplePoint {
                    alpha,
                    lambda,
                    value: lr,
                };
            }
            let s = (alpha * lambda).sqrt() * r;
            if s > rho_hat {
                rho_hat = s;
                rho_pt = SamplePoint {
                    alpha,
                    lambda,
                    value: s,
                };
            }
        }
    }
    let pointwise_bounds = if worst_lr > 1.0 + INEQ_SLACK {
        ConditionReport::fail(
            format!("lambda * r exceeds 1 (worst {worst_lr:.6e})"),
            worst_lr_pt,
        )
    } else if rho_hat >= 1.0 - UNIT_MARGIN {
        ConditionReport::fail(
            format!("sqrt(alpha lambda) r reaches {rho_hat:.6e}, no bound below one"),
            rho_pt,
        )
    } else {
        ConditionReport::pass(format!(
            "lambda * r <= 1 and sqrt(alpha lambda) r <= {rho_hat:.6e}"
        ))
    };

    // Residual decay along the spectrum, for each alpha.
    let mut lambda_monotone: Option<SamplePoint> = None;
    'outer_ii: for &alpha in &alphas {
        let mut prev = family.rtilde(alpha, lambdas[0]);
        for &lambda in &lambdas[1..] {
            let cur = family.rtilde(alpha, lambda);
            if cur > prev * (1.0 + INEQ_SLACK) + f64::MIN_POSITIVE {
                lambda_monotone = Some(SamplePoint {
                    alpha,
                    lambda,
                    value: cur - prev,
                });
                break 'outer_ii;
            }
            prev = cur;
        }
    }
    let residual_monotone_in_lambda = match lambda_monotone {
        None => ConditionReport::pass("residual is non-increasing along the spectrum".into()),
        Some(w) => ConditionReport::fail(
            format!("residual increases by {:.3e} along the spectrum", w.value),
            w,
        ),
    };

    // Residual growth and continuity in alpha, for each eigenvalue.
    let mut alpha_monotone: Option<SamplePoint> = None;
    let mut alpha_jump: Option<SamplePoint> = None;
    for &lambda in &lambdas {
        let mut prev = family.rtilde(alphas[0], lambda);
        for &alpha in &alphas[1..] {
            let cur = family.rtilde(alpha, lambda);
            if cur < prev * (1.0 - INEQ_SLACK) - f64::MIN_POSITIVE && alpha_monotone.is_none() {
                alpha_monotone = Some(SamplePoint {
                    alpha,
                    lambda,
                    value: prev - cur,
                });
            }
            let jumped = if prev <= 0.0 {
                cur > JUMP_FLOOR
            } else {
                (cur - prev) / prev > JUMP_FRACTION
            };
            if jumped {
                let size = cur - prev;
                if alpha_jump.is_none_or(|j| size > j.value) {
                    alpha_jump = Some(SamplePoint {
                        alpha,
                        lambda,
                        value: size,
                    });
                }
            }
            prev = cur;
        }
    }
    let residual_regular_in_alpha = match (alpha_monotone, alpha_jump) {
        (None, None) => ConditionReport::pass("residual grows continuously with alpha".into()),
        (Some(w), _) => ConditionReport::fail(
            format!("residual decreases by {:.3e} as alpha grows", w.value),
            w,
        ),
        (None, Some(w)) => ConditionReport::fail(
            format!(
                "residual jumps by {:.3e} between adjacent alpha samples",
                w.value
            ),
            w,
        ),
    };

    // Diagonal residual bound.
    let rho_tilde_hat = family.rho_tilde_hat_estimate(&alphas);
    let mut diag_pt = SamplePoint {
        alpha: alphas[0],
        lambda: alphas[0],
        value: 0.0,
    };
    for &alpha in &alphas {
        let lambda = match family.domain_max() {
            Some(dm) => alpha.min(dm),
            None => alpha,
        };
        let v = family.rtilde(alpha, lambda);
        if v >= diag_pt.value {
            diag_pt = SamplePoint {
                alpha,
                lambda,
                value: v,
            };
        }
    }
    let diagonal_bounded = if rho_tilde_hat >= 1.0 - UNIT_MARGIN {
        ConditionReport::fail(
            format!("diagonal residual reaches {rho_tilde_hat:.6e}, no bound below one"),
            diag_pt,
        )
    } else {
        ConditionReport::pass(format!("diagonal residual <= {rho_tilde_hat:.6e}"))
    };

    let all_passed = pointwise_bounds.passed
        && residual_monotone_in_lambda.passed
        && residual_regular_in_alpha.passed
        && diagonal_bounded.passed;
    Ok(GeneratorReport {
        filter: family.name().to_string(),
        pointwise_bounds,
        residual_monotone_in_lambda,
        residual_regular_in_alpha,
        diagonal_bounded,
        rho_hat,
        rho_tilde_hat,
        all_passed,
        alpha_range: (alphas[0], alphas[alphas.len() - 1]),
        lambda_range: (lambdas[0], lambdas[lambdas.len() - 1]),
        clipped_lambdas: clipped,
    })
}

fn sorted_grid(name: &str, grid: &[f64]) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} grid is empty")));
    }
    if grid.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "{name} grid must contain only positive finite values"
        )));
    }
    let mut g = grid.to_vec();
    g.sort_by(f64::total_cmp);
    g.dedup();
    Ok(g)
}

/// Applies the regularized inverse to data: `x_i = r(alpha, lambda_i)
/// sigma_i y_i`.
pub fn regularize(
    op: &SpectralOperator,
    family: &FilterFamily,
    alpha: f64,
    y: &SpectralVector,
) -> Result<SpectralVector> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "regularization parameter must be positive, got {alpha:e}"
        )));
    }
    if op.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: op.len(),
            right: y.len(),
        });
    }
    if let Some(dm) = family.domain_max() {
        if op.norm_sq() > dm * (1.0 + INEQ_SLACK) {
            return Err(Error::OutOfRange(format!(
                "spectrum reaches {:e}, beyond the {} domain limit {dm:e}",
                op.norm_sq(),
                family.name()
            )));
        }
    }
    let coeffs = op
        .lambda()
        .iter()
        .zip(op.sigma().iter().zip(y.coeffs()))
        .map(|(&l, (&s, &c))| family.r(alpha, l) * s * c)
        .collect();
    SpectralVector::from_coeffs(coeffs)
}
