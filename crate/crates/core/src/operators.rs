//! Diagonal spectral models of compact forward operators.
//!
//! An operator is stored through its singular values `sigma_1 > sigma_2 >
//! ... > 0`; the spectrum of the normal operator is `lambda_i = sigma_i^2`.
//! Solutions and data live in the corresponding singular bases and are
//! represented by their coefficient sequences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral_analysis::IndexFunction;
use crate::sums::{kahan_sum, KahanAccumulator};

/// Largest supported number of modes.
pub const MAX_MODES: usize = 1_000_000;

/// A compact operator in diagonal form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorRepr", into = "OperatorRepr")]
pub struct SpectralOperator {
    sigma: Vec<f64>,
    lambda: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OperatorRepr {
    sigma: Vec<f64>,
}

impl TryFrom<OperatorRepr> for SpectralOperator {
    type Error = Error;
    fn try_from(repr: OperatorRepr) -> Result<Self> {
        Self::from_singular_values(repr.sigma)
    }
}

impl From<SpectralOperator> for OperatorRepr {
    fn from(op: SpectralOperator) -> Self {
        Self { sigma: op.sigma }
    }
}

impl SpectralOperator {
    /// Builds an operator from strictly decreasing positive singular values.
    pub fn from_singular_values(sigma: Vec<f64>) -> Result<Self> {
        if sigma.is_empty() || sigma.len() > MAX_MODES {
            return Err(Error::InvalidArgument(format!(
                "mode count must lie in 1..={MAX_MODES}, got {}",
                sigma.len()
            )));
        }
        for w in sigma.windows(2) {
            if !(w[1] < w[0]) {
                return Err(Error::InvalidArgument(format!(
                    "singular values must be strictly decreasing near {:e}",
                    w[1]
                )));
            }
        }
        if sigma.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidArgument(
                "singular values must be positive and finite".into(),
            ));
        }
        let lambda = sigma.iter().map(|&s| s * s).collect();
        Ok(Self { sigma, lambda })
    }

    /// Polynomial decay `sigma_i = i^(-p)` for `i = 1..=n`.
    pub fn polynomial(p: f64, n: usize) -> Result<Self> {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "polynomial decay rate must be positive, got {p}"
            )));
        }
        check_mode_count(n)?;
        let sigma = (1..=n).map(|i| (i as f64).powf(-p)).collect();
        Self::from_singular_values(sigma)
    }

    /// Exponential decay `sigma_i = exp(-gamma * i)` for `i = 1..=n`.
    pub fn exponential(gamma: f64, n: usize) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "exponential decay rate must be positive, got {gamma}"
            )));
        }
        check_mode_count(n)?;
        let sigma = (1..=n).map(|i| (-gamma * i as f64).exp()).collect();
        Self::from_singular_values(sigma)
    }

    pub fn len(&self) -> usize {
        self.sigma.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// Eigenvalues of the normal operator, strictly decreasing.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Squared operator norm, equal to the largest eigenvalue.
    pub fn norm_sq(&self) -> f64 {
        self.lambda[0]
    }
}

fn check_mode_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_MODES {
        return Err(Error::InvalidArgument(format!(
            "mode count must lie in 1..={MAX_MODES}, got {n}"
        )));
    }
    Ok(())
}

/// Decay law for [`make_operator`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OperatorKind {
    Polynomial { p: f64 },
    Exponential { gamma: f64 },
}

pub fn make_operator(kind: OperatorKind, n: usize) -> Result<SpectralOperator> {
    match kind {
        OperatorKind::Polynomial { p } => SpectralOperator::polynomial(p, n),
        OperatorKind::Exponential { gamma } => SpectralOperator::exponential(gamma, n),
    }
}

/// Coefficients of an element in the singular basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "VectorRepr", into = "VectorRepr")]
pub struct SpectralVector {
    coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VectorRepr {
    coeffs: Vec<f64>,
}

impl TryFrom<VectorRepr> for SpectralVector {
    type Error = Error;
    fn try_from(repr: VectorRepr) -> Result<Self> {
        Self::from_coeffs(repr.coeffs)
    }
}

impl From<SpectralVector> for VectorRepr {
    fn from(v: SpectralVector) -> Self {
        Self { coeffs: v.coeffs }
    }
}

impl SpectralVector {
    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            coeffs: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn norm_sq(&self) -> f64 {
        kahan_sum(self.coeffs.iter().map(|&c| c * c))
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Squared distance to another vector of the same length.
    pub fn dist_sq(&self, other: &Self) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(kahan_sum(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| (a - b) * (a - b)),
        ))
    }
}

/// A target decay profile for synthesizing solutions: the realized
/// spectral tail function will equal `scale * target(lambda)` at every
/// eigenvalue.
#[derive(Clone, Debug)]
pub struct SourceProfile {
    pub target: IndexFunction,
    pub scale: f64,
}

impl SourceProfile {
    pub fn new(target: IndexFunction, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "profile scale must be positive and finite, got {scale}"
            )));
        }
        Ok(Self { target, scale })
    }
}

/// Synthesizes a solution whose spectral tail function matches the profile.
///
/// With eigenvalues `lambda_1 > ... > lambda_n` and `e_i = scale *
/// target(lambda_i)` (and `e_{n+1} = 0`), the coefficients are `x_i =
/// sqrt(e_i - e_{i+1})`, so that `sum_{lambda_i <= t} x_i^2` telescopes to
/// `e_j` at every eigenvalue `t = lambda_j`.
pub fn make_solution_from_profile(
    op: &SpectralOperator,
    profile: &SourceProfile,
) -> Result<SpectralVector> {
    let lam = op.lambda();
    let e: Vec<f64> = lam
        .iter()
        .map(|&l| profile.scale * profile.target.eval(l))
        .collect();
    let head = e[0];
    let slack = 1e-12 * head.max(f64::MIN_POSITIVE);
    let mut coeffs = Vec::with_capacity(lam.len());
    for i in 0..lam.len() {
        let next = if i + 1 < lam.len() { e[i + 1] } else { 0.0 };
        let diff = e[i] - next;
        if diff < -slack {
            return Err(Error::ProfileNotIncreasing { lambda: lam[i] });
        }
        coeffs.push(diff.max(0.0).sqrt());
    }
    SpectralVector::from_coeffs(coeffs)
}

/// Spectral tail function `e(t) = sum over lambda_i <= t of x_i^2`.
///
/// Right-continuous and non-decreasing in `t`; at `t >= lambda_1` it equals
/// the squared norm.
pub fn spectral_function(op: &SpectralOperator, x: &SpectralVector, t: f64) -> Result<f64> {
    if op.len() != x.len() {
        return Err(Error::LengthMismatch {
            left: op.len(),
            right: x.len(),
        });
    }
    let lam = op.lambda();
    // Eigenvalues are descending, so the modes with lambda_i <= t form a
    // suffix; summing it from the small end keeps the accumulation tight.
    let start = lam.partition_point(|&l| l > t);
    Ok(kahan_sum(x.coeffs()[start..].iter().rev().map(|&c| c * c)))
}

/// Tail function evaluated at every eigenvalue, as `(lambda_i, e(lambda_i))`
/// rows in spectrum order.
pub fn spectral_function_rows(
    op: &SpectralOperator,
    x: &SpectralVector,
) -> Result<Vec<(f64, f64)>> {
    if op.len() != x.len() {
        return Err(Error::LengthMismatch {
            left: op.len(),
            right: x.len(),
        });
    }
    let n = op.len();
    let mut e = vec![0.0; n];
    let mut acc = KahanAccumulator::default();
    for i in (0..n).rev() {
        let c = x.coeffs()[i];
        acc.add(c * c);
        e[i] = acc.value();
    }
    Ok(op.lambda().iter().copied().zip(e).collect())
}

/// Applies the forward map: `y_i = sigma_i * x_i`.
pub fn apply_forward(op: &SpectralOperator, x: &SpectralVector) -> Result<SpectralVector> {
    if op.len() != x.len() {
        return Err(Error::LengthMismatch {
            left: op.len(),
            right: x.len(),
        });
    }
    let coeffs = op
        .sigma()
        .iter()
        .zip(x.coeffs())
        .map(|(&s, &c)| s * c)
        .collect();
    SpectralVector::from_coeffs(coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_spectrum_decays_as_power() {
        let op = SpectralOperator::polynomial(1.0, 4).unwrap();
        assert_eq!(op.sigma(), &[1.0, 0.5, 1.0 / 3.0, 0.25]);
        assert_eq!(op.lambda()[1], 0.25);
        assert_eq!(op.norm_sq(), 1.0);
    }

    #[test]
    fn exponential_spectrum_matches_closed_form() {
        let op = SpectralOperator::exponential(1.0, 2).unwrap();
        assert!((op.sigma()[0] - (-1.0f64).exp()).abs() < 1e-16);
        assert!((op.sigma()[1] - (-2.0f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn rejects_degenerate_parameters() {
        assert!(SpectralOperator::polynomial(0.0, 4).is_err());
        assert!(SpectralOperator::polynomial(-1.0, 4).is_err());
        assert!(SpectralOperator::exponential(0.0, 4).is_err());
        assert!(SpectralOperator::polynomial(1.0, 0).is_err());
        assert!(SpectralOperator::polynomial(1.0, MAX_MODES + 1).is_err());
        assert!(SpectralOperator::from_singular_values(vec![1.0, 1.0]).is_err());
        assert!(SpectralOperator::from_singular_values(vec![1.0, -0.5]).is_err());
        assert!(SpectralOperator::from_singular_values(vec![]).is_err());
    }

    #[test]
    fn vector_rejects_non_finite_coefficients() {
        assert!(SpectralVector::from_coeffs(vec![1.0, f64::NAN]).is_err());
        assert!(SpectralVector::from_coeffs(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn profile_synthesis_realizes_the_target_exactly() {
        let op = SpectralOperator::polynomial(1.0, 2).unwrap();
        // e(lambda) = lambda: e = [1, 0.25], so x = [sqrt(0.75), 0.5].
        let profile = SourceProfile::new(IndexFunction::holder(1.0).unwrap(), 1.0).unwrap();
        let x = make_solution_from_profile(&op, &profile).unwrap();
        assert!((x.coeffs()[0] - 0.75f64.sqrt()).abs() < 1e-16);
        assert_eq!(x.coeffs()[1], 0.5);
        assert_eq!(spectral_function(&op, &x, 0.25).unwrap(), 0.25);
        assert!((spectral_function(&op, &x, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn realized_tail_matches_scaled_target_on_large_spectra() {
        let op = SpectralOperator::polynomial(1.0, 10_000).unwrap();
        let scale = 2.5;
        let profile = SourceProfile::new(IndexFunction::holder(0.5).unwrap(), scale).unwrap();
        let x = make_solution_from_profile(&op, &profile).unwrap();
        for idx in [0usize, 1, 9, 99, 4999, 9999] {
            let lam = op.lambda()[idx];
            let e = spectral_function(&op, &x, lam).unwrap();
            let want = scale * lam.sqrt();
            assert!(
                (e - want).abs() <= 1e-15 * want,
                "tail mismatch at mode {idx}: {e:e} vs {want:e}"
            );
        }
    }

    #[test]
    fn tail_function_is_right_continuous() {
        let op = SpectralOperator::polynomial(1.0, 50).unwrap();
        let profile = SourceProfile::new(IndexFunction::holder(1.0).unwrap(), 1.0).unwrap();
        let x = make_solution_from_profile(&op, &profile).unwrap();
        for j in [0usize, 10, 30, 49] {
            let lam = op.lambda()[j];
            let at = spectral_function(&op, &x, lam).unwrap();
            let just_below = spectral_function(&op, &x, lam * (1.0 - 1e-12)).unwrap();
            let jump = at - just_below;
            let c = x.coeffs()[j];
            assert!((jump - c * c).abs() <= 1e-12 * at.max(1e-300));
        }
    }

    #[test]
    fn flat_profile_concentrates_on_the_last_mode() {
        let op = SpectralOperator::polynomial(1.0, 4).unwrap();
        let flat = IndexFunction::tabulated(vec![(1e-12, 9.0), (10.0, 9.0)]).unwrap();
        let profile = SourceProfile::new(flat, 1.0).unwrap();
        let x = make_solution_from_profile(&op, &profile).unwrap();
        assert_eq!(x.coeffs()[..3], [0.0, 0.0, 0.0]);
        assert_eq!(x.coeffs()[3], 3.0);
    }

    #[test]
    fn profile_scale_must_be_positive() {
        let phi = IndexFunction::holder(1.0).unwrap();
        assert!(SourceProfile::new(phi.clone(), 0.0).is_err());
        assert!(SourceProfile::new(phi, -1.0).is_err());
    }

    #[test]
    fn forward_map_scales_by_singular_values() {
        let op = SpectralOperator::polynomial(1.0, 3).unwrap();
        let x = SpectralVector::from_coeffs(vec![1.0, 2.0, 3.0]).unwrap();
        let y = apply_forward(&op, &x).unwrap();
        assert_eq!(y.coeffs(), &[1.0, 1.0, 1.0]);
        let short = SpectralVector::zeros(2);
        assert!(apply_forward(&op, &short).is_err());
    }

    #[test]
    fn serde_round_trip_validates() {
        let op = SpectralOperator::polynomial(1.0, 3).unwrap();
        let json = serde_json::to_string(&op).unwrap();
        assert!(json.contains("sigma"));
        let back: SpectralOperator = serde_json::from_str(&json).unwrap();
        assert_eq!(back, op);
        let bad: std::result::Result<SpectralOperator, _> =
            serde_json::from_str(r#"{"sigma":[1.0, 2.0]}"#);
        assert!(bad.is_err());
        let v = SpectralVector::from_coeffs(vec![0.5, 0.25]).unwrap();
        let json = serde_json::to_string(&v).unwrap();
        let back: SpectralVector = serde_json::from_str(&json).unwrap();
        assert_eq!(back, v);
    }
}
