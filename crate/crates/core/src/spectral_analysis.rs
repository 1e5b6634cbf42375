//! Index functions and sampled spectral diagnostics.
//!
//! An index function measures solution smoothness relative to the spectrum
//! of the forward map: it is non-decreasing on `(0, norm_sq]` and vanishes
//! at the origin. The checks in this module sample qualification,
//! subhomogeneity, and filter ratio bounds over explicit grids, reporting
//! the extremal value together with the grid point that attains it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filters::FilterFamily;

/// Default cap offset for [`IndexFunction::logarithmic`]: the cap sits at
/// `exp(-(1 + nu))`, below which `|ln t|^(-nu)` is concave.
pub fn default_log_cap(nu: f64) -> f64 {
    (-(1.0 + nu)).exp()
}

/// A non-decreasing function of the spectral variable, used both as a
/// smoothness profile and as a rate benchmark.
#[derive(Clone, Debug, PartialEq)]
pub enum IndexFunction {
    /// `phi(t) = t^q` with `q > 0`.
    Holder { q: f64 },
    /// `phi(t) = |ln t|^(-nu)` for `t < cap`, frozen at its cap value
    /// above, with `nu > 0` and `cap` in `(0, 1)`.
    Logarithmic { nu: f64, cap: f64 },
    /// Piecewise-linear interpolation through `(t, phi)` knots, clamped to
    /// the end values outside the knot range.
    Tabulated { knots: Vec<(f64, f64)> },
}

impl IndexFunction {
    pub fn holder(q: f64) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "holder exponent must be positive and finite, got {q}"
            )));
        }
        Ok(Self::Holder { q })
    }

    /// Logarithmic function with the default concavity cap.
    pub fn logarithmic(nu: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "logarithmic exponent must be positive and finite, got {nu}"
            )));
        }
        Self::logarithmic_with_cap(nu, default_log_cap(nu))
    }

    pub fn logarithmic_with_cap(nu: f64, cap: f64) -> Result<Self> {
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "logarithmic exponent must be positive and finite, got {nu}"
            )));
        }
        if !(cap > 0.0 && cap < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "logarithmic cap must lie in (0, 1), got {cap:e}"
            )));
        }
        Ok(Self::Logarithmic { nu, cap })
    }

    pub fn tabulated(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidArgument(
                "tabulated index function needs at least two knots".into(),
            ));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(Error::InvalidArgument(format!(
                    "tabulated abscissae must be strictly increasing near t = {:e}",
                    w[1].0
                )));
            }
            if w[1].1 < w[0].1 {
                return Err(Error::InvalidArgument(format!(
                    "tabulated values must be non-decreasing near t = {:e}",
                    w[1].0
                )));
            }
        }
        for &(t, v) in &knots {
            if !(t > 0.0) || !t.is_finite() || !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "tabulated knot ({t:e}, {v:e}) is not a finite non-negative pair"
                )));
            }
        }
        Ok(Self::Tabulated { knots })
    }

    /// Parses `"holder:q"`, `"log:nu"`, or `"log:nu:cap"`.
    pub fn parse(spec: &str) -> Result<Self> {
        let mut parts = spec.split(':');
        let head = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| {
                Error::InvalidArgument(format!("cannot parse '{s}' as a number in '{spec}'"))
            })
        };
        match (head, args.as_slice()) {
            ("holder", [q]) => Self::holder(num(q)?),
            ("log", [nu]) => Self::logarithmic(num(nu)?),
            ("log", [nu, cap]) => Self::logarithmic_with_cap(num(nu)?, num(cap)?),
            _ => Err(Error::InvalidArgument(format!(
                "unknown index function '{spec}'; expected holder:q, log:nu, or log:nu:cap"
            ))),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            Self::Holder { q } => t.powf(*q),
            Self::Logarithmic { nu, cap } => {
                let s = t.min(*cap);
                (-s.ln()).powf(-nu)
            }
            Self::Tabulated { knots } => {
                let first = knots[0];
                let last = knots[knots.len() - 1];
                if t <= first.0 {
                    return first.1;
                }
                if t >= last.0 {
                    return last.1;
                }
                let hi = knots.partition_point(|&(k, _)| k < t);
                let (t0, v0) = knots[hi - 1];
                let (t1, v1) = knots[hi];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }

    /// Pointwise power `phi^p` with `p > 0`; stays an index function.
    pub fn power(&self, p: f64) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "power must be positive and finite, got {p}"
            )));
        }
        Ok(match self {
            Self::Holder { q } => Self::Holder { q: q * p },
            Self::Logarithmic { nu, cap } => Self::Logarithmic {
                nu: nu * p,
                cap: *cap,
            },
            Self::Tabulated { knots } => Self::Tabulated {
                knots: knots.iter().map(|&(t, v)| (t, v.powf(p))).collect(),
            },
        })
    }

    /// Short human-readable form used in reports.
    pub fn describe(&self) -> String {
        match self {
            Self::Holder { q } => format!("holder:{q}"),
            Self::Logarithmic { nu, cap } => format!("log:{nu}:{cap:e}"),
            Self::Tabulated { knots } => format!("table[{} knots]", knots.len()),
        }
    }
}

/// A grid point together with the value a scan attained there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SamplePoint {
    pub alpha: f64,
    pub lambda: f64,
    pub value: f64,
}

/// Result of a sampled qualification scan.
///
/// `a_hat` is the largest value of `phi(lambda) * rtilde(alpha, lambda)^mu
/// / phi(alpha)` over the grids; a finite, modest `a_hat` certifies the
/// qualification of the filter family relative to `phi^(1/mu)` on the
/// sampled region.
#[derive(Clone, Debug, Serialize)]
pub struct QualificationReport {
    pub mu: f64,
    pub a_hat: f64,
    pub witness: SamplePoint,
    pub pairs_scanned: usize,
}

pub fn check_qualification(
    phi: &IndexFunction,
    family: &FilterFamily,
    mu: f64,
    alphas: &[f64],
    lambdas: &[f64],
) -> Result<QualificationReport> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "qualification power must lie in (0, 1], got {mu}"
        )));
    }
    check_grid("alpha", alphas)?;
    check_grid("lambda", lambdas)?;
    let mut best: Option<SamplePoint> = None;
    let mut pairs = 0usize;
    for &alpha in alphas {
        let denom = phi.eval(alpha);
        if denom <= 0.0 {
            return Err(Error::Division(format!(
                "phi vanishes at alpha = {alpha:e}"
            )));
        }
        for &lambda in lambdas {
            let ratio = phi.eval(lambda) * family.rtilde(alpha, lambda).powf(mu) / denom;
            pairs += 1;
            if best.is_none_or(|b| ratio > b.value) {
                best = Some(SamplePoint {
                    alpha,
                    lambda,
                    value: ratio,
                });
            }
        }
    }
    let witness = best.expect("grids are non-empty");
    Ok(QualificationReport {
        mu,
        a_hat: witness.value,
        witness,
        pairs_scanned: pairs,
    })
}

/// Sampled subhomogeneity table: for each ratio `gamma`, the largest value
/// of `phi(gamma * alpha) / phi(alpha)` over the `alpha` grid.
#[derive(Clone, Debug, Serialize)]
pub struct SubhomogeneityReport {
    /// Rows `(gamma, g(gamma))`.
    pub table: Vec<(f64, f64)>,
    /// `max_gamma 4 g(gamma) / (1 + gamma^2)`, the constant appearing in
    /// quadratically perturbed benchmark bounds.
    pub quad_bound_c: f64,
}

pub fn check_subhomogeneity(
    phi: &IndexFunction,
    gammas: &[f64],
    alphas: &[f64],
) -> Result<SubhomogeneityReport> {
    check_grid("gamma", gammas)?;
    check_grid("alpha", alphas)?;
    let mut table = Vec::with_capacity(gammas.len());
    let mut quad = f64::NEG_INFINITY;
    for &gamma in gammas {
        let mut g = f64::NEG_INFINITY;
        for &alpha in alphas {
            let denom = phi.eval(alpha);
            if denom <= 0.0 {
                return Err(Error::Division(format!(
                    "phi vanishes at alpha = {alpha:e}"
                )));
            }
            g = g.max(phi.eval(gamma * alpha) / denom);
        }
        quad = quad.max(4.0 * g / (1.0 + gamma * gamma));
        table.push((gamma, g));
    }
    Ok(SubhomogeneityReport {
        table,
        quad_bound_c: quad,
    })
}

/// Extremal value of a ratio scan together with the triple attaining it.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RatioBound {
    pub value: f64,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: f64,
}

/// Sampled bounds for the two-sided filter ratio conditions.
///
/// With `q(alpha, beta, lambda)` the product of `rtilde_alpha(lambda) /
/// rtilde_beta(lambda)` and `phi(beta) / phi(alpha)`, the scan records the
/// supremum of `q` over `alpha <= beta <= lambda` and the infimum over
/// `lambda <= alpha <= beta`. Triples where the denominator
/// `rtilde_beta(lambda)` vanishes are skipped and counted.
#[derive(Clone, Debug, Serialize)]
pub struct RatioConditionReport {
    pub c_upper: Option<RatioBound>,
    pub c_lower: Option<RatioBound>,
    pub skipped: usize,
}

pub fn check_ratio_conditions(
    family: &FilterFamily,
    phi: &IndexFunction,
    alphas: &[f64],
    lambdas: &[f64],
) -> Result<RatioConditionReport> {
    check_grid("alpha", alphas)?;
    check_grid("lambda", lambdas)?;
    let phis: Vec<f64> = alphas.iter().map(|&a| phi.eval(a)).collect();
    if phis.iter().any(|&p| p <= 0.0) {
        return Err(Error::Division("phi vanishes on the alpha grid".into()));
    }
    // rtilde is evaluated once per (alpha, lambda) pair.
    let rt: Vec<Vec<f64>> = alphas
        .iter()
        .map(|&a| lambdas.iter().map(|&l| family.rtilde(a, l)).collect())
        .collect();
    let mut upper: Option<RatioBound> = None;
    let mut lower: Option<RatioBound> = None;
    let mut skipped = 0usize;
    for (i, &alpha) in alphas.iter().enumerate() {
        for (j, &beta) in alphas.iter().enumerate().skip(i) {
            let phi_ratio = phis[j] / phis[i];
            for (k, &lambda) in lambdas.iter().enumerate() {
                let in_upper = lambda >= beta;
                let in_lower = lambda <= alpha;
                if !in_upper && !in_lower {
                    continue;
                }
                let denom = rt[j][k];
                if denom == 0.0 {
                    skipped += 1;
                    continue;
                }
                let q = rt[i][k] / denom * phi_ratio;
                if in_upper && upper.is_none_or(|b| q > b.value) {
                    upper = Some(RatioBound {
                        value: q,
                        alpha,
                        beta,
                        lambda,
                    });
                }
                if in_lower && lower.is_none_or(|b| q < b.value) {
                    lower = Some(RatioBound {
                        value: q,
                        alpha,
                        beta,
                        lambda,
                    });
                }
            }
        }
    }
    Ok(RatioConditionReport {
        c_upper: upper,
        c_lower: lower,
        skipped,
    })
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} grid is empty")));
    }
    if grid.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "{name} grid must contain only positive finite values"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn holder_evaluates_as_power() {
        let phi = IndexFunction::holder(0.5).unwrap();
        assert_eq!(phi.eval(4.0), 2.0);
        assert_eq!(phi.eval(0.0), 0.0);
        assert_eq!(phi.eval(-1.0), 0.0);
    }

    #[test]
    fn logarithmic_caps_at_the_cap() {
        let nu = 0.5;
        let phi = IndexFunction::logarithmic(nu).unwrap();
        let cap = default_log_cap(nu);
        let at_cap = (1.0 + nu).powf(-nu);
        assert!((phi.eval(cap) - at_cap).abs() < 1e-15);
        assert_eq!(phi.eval(cap * 2.0), phi.eval(cap));
        assert_eq!(phi.eval(10.0), phi.eval(cap));
        let below = phi.eval(1e-8);
        assert!((below - (1e-8f64.ln().abs()).powf(-nu)).abs() < 1e-15);
        assert!(below < phi.eval(cap));
    }

    #[test]
    fn tabulated_interpolates_and_clamps() {
        let phi = IndexFunction::tabulated(vec![(1.0, 1.0), (2.0, 3.0)]).unwrap();
        assert_eq!(phi.eval(1.5), 2.0);
        assert_eq!(phi.eval(0.5), 1.0);
        assert_eq!(phi.eval(5.0), 3.0);
    }

    #[test]
    fn tabulated_rejects_decreasing_values() {
        assert!(IndexFunction::tabulated(vec![(1.0, 2.0), (2.0, 1.0)]).is_err());
        assert!(IndexFunction::tabulated(vec![(1.0, 1.0)]).is_err());
        assert!(IndexFunction::tabulated(vec![(2.0, 1.0), (1.0, 2.0)]).is_err());
    }

    #[test]
    fn power_composes_pointwise() {
        let phi = IndexFunction::holder(0.5).unwrap();
        let sq = phi.power(2.0).unwrap();
        assert!((sq.eval(3.0) - phi.eval(3.0) * phi.eval(3.0)).abs() <= 1e-15);
        let lg = IndexFunction::logarithmic(0.5).unwrap();
        let lg2 = lg.power(2.0).unwrap();
        let t = 1e-6;
        assert!((lg2.eval(t) - lg.eval(t) * lg.eval(t)).abs() < 1e-15);
    }

    #[test]
    fn parse_round_trips_the_builtin_forms() {
        assert_eq!(
            IndexFunction::parse("holder:1.5").unwrap(),
            IndexFunction::holder(1.5).unwrap()
        );
        assert_eq!(
            IndexFunction::parse("log:0.5").unwrap(),
            IndexFunction::logarithmic(0.5).unwrap()
        );
        assert_eq!(
            IndexFunction::parse("log:0.5:0.1").unwrap(),
            IndexFunction::logarithmic_with_cap(0.5, 0.1).unwrap()
        );
        assert!(IndexFunction::parse("spline:3").is_err());
        assert!(IndexFunction::parse("holder:x").is_err());
    }
}
