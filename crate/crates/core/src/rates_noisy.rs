//! Noisy-data theory: the optimal parameter choice, adversarial noise
//! brackets around it, and the transfer from parameter rates to noise
//! rates.
//!
//! The central object is `A(alpha) = alpha * err^2(alpha)`, strictly
//! increasing wherever the exact error is positive. Its inverse at
//! `delta^2` defines the optimal parameter `alpha_delta`; the worst-case
//! noisy error at noise level `delta` is then bracketed by explicit
//! constant multiples of `delta^2 / alpha_delta`, and the adversarial
//! construction below realizes a value inside that bracket.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::filters::FilterFamily;
use crate::operators::{apply_forward, SpectralOperator, SpectralVector};
use crate::rates_exact::error_exact;
use crate::solve::bisect_log_increasing;
use crate::spectral_analysis::IndexFunction;
use crate::sums::kahan_sum;

/// Relative tolerance used for the parameter-choice bisection.
const ALPHA_RTOL: f64 = 1e-10;
/// Fraction of the way from the diagonal residual toward one used to
/// select the inner band edge.
const SELECTION_MARGIN: f64 = 0.05;
/// Fallback positions for the inner band edge, as fractions of
/// `alpha_delta`, when no eigenvalue qualifies.
const EDGE_LADDER: [f64; 8] = [0.999, 0.99, 0.95, 0.9, 0.75, 0.5, 0.25, 0.1];

/// Solves `alpha * err^2(alpha) = delta^2` for the optimal parameter.
///
/// If the exact error vanishes on an initial interval `(0, epsilon]` (as
/// it does for projection filters once `alpha` drops below the smallest
/// eigenvalue over the threshold), the equation has no root there and the
/// `TrivialCase` error carries the estimated `epsilon` instead.
pub fn solve_alpha_delta(
    op: &SpectralOperator,
    x: &SpectralVector,
    family: &FilterFamily,
    delta: f64,
) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "noise level must be positive and finite, got {delta:e}"
        )));
    }
    let norm_sq = x.norm_sq();
    if norm_sq == 0.0 {
        return Err(Error::InvalidArgument(
            "solution is zero; the parameter choice is undefined".into(),
        ));
    }
    let target = delta * delta;
    let a_of = |alpha: f64| -> Result<f64> { Ok(alpha * error_exact(op, x, family, alpha)?) };
    // err^2 <= norm_sq makes this a guaranteed left bracket.
    let mut lo = 0.25 * target / norm_sq;
    if error_exact(op, x, family, lo)? == 0.0 {
        let epsilon = zero_error_edge(op, x, family, lo)?;
        return Err(Error::TrivialCase { epsilon });
    }
    let mut hi = lo;
    let mut reached = false;
    for _ in 0..600 {
        if a_of(hi)? >= target {
            reached = true;
            break;
        }
        lo = hi;
        hi *= 10.0;
    }
    if !reached {
        return Err(Error::Bracket(format!(
            "alpha * err^2 never reaches delta^2 = {target:e}"
        )));
    }
    bisect_log_increasing(
        |alpha| alpha * error_exact(op, x, family, alpha).unwrap_or(f64::INFINITY),
        target,
        lo,
        hi,
        ALPHA_RTOL,
    )
}

/// Largest parameter at which the exact error still vanishes, given a
/// point `zero_at` where it does.
fn zero_error_edge(
    op: &SpectralOperator,
    x: &SpectralVector,
    family: &FilterFamily,
    zero_at: f64,
) -> Result<f64> {
    let mut lo = zero_at;
    let mut hi = zero_at;
    let mut found = false;
    for _ in 0..600 {
        hi *= 10.0;
        if error_exact(op, x, family, hi)? > 0.0 {
            found = true;
            break;
        }
        lo = hi;
    }
    if !found {
        return Err(Error::InvalidArgument(
            "exact error vanishes everywhere despite a nonzero solution".into(),
        ));
    }
    // The zero set of a non-decreasing non-negative curve is an initial
    // interval; bisect its edge.
    for _ in 0..200 {
        if hi / lo - 1.0 <= ALPHA_RTOL {
            break;
        }
        let mid = (lo * hi).sqrt();
        if error_exact(op, x, family, mid)? == 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// An adversarial noisy instance at level `delta`.
///
/// The perturbation concentrates on the spectral band `[a_delta, 2
/// alpha_delta]`, pointing along the residual of the exact reconstruction
/// there; its norm is exactly `delta`.
#[derive(Clone, Debug)]
pub struct AdversarialInstance {
    pub delta: f64,
    pub alpha_delta: f64,
    /// Inner band edge: the largest eigenvalue below `alpha_delta` whose
    /// residual clears the selection threshold, or a ladder point just
    /// under `alpha_delta` when no eigenvalue qualifies.
    pub a_delta: f64,
    pub a_delta_is_eigenvalue: bool,
    /// Band as an index range into the spectrum (descending eigenvalues);
    /// empty when the balanced parameter sits below every eigenvalue.
    pub band: (usize, usize),
    /// True when the residual vanishes on the band and a unit direction
    /// at the eigenvalue nearest `alpha_delta` was used instead.
    pub fallback_used: bool,
    pub y_tilde: SpectralVector,
    pub noise: SpectralVector,
}

/// Builds the adversarial perturbation for the given noise level.
pub fn build_adversarial(
    op: &SpectralOperator,
    x: &SpectralVector,
    family: &FilterFamily,
    delta: f64,
) -> Result<AdversarialInstance> {
    let alpha_delta = solve_alpha_delta(op, x, family, delta)?;
    let lam = op.lambda();
    let diag = match family.domain_max() {
        Some(dm) => alpha_delta.min(dm),
        None => alpha_delta,
    };
    let base = family.rtilde(alpha_delta, diag);
    let threshold = base + SELECTION_MARGIN * (1.0 - base);

    let mut a_delta = None;
    for &l in lam {
        if l < alpha_delta && family.rtilde(alpha_delta, l) < threshold {
            a_delta = Some((l, true));
            break;
        }
    }
    if a_delta.is_none() {
        for s in EDGE_LADDER {
            let cand = s * alpha_delta;
            if family.rtilde(alpha_delta, cand) < threshold {
                a_delta = Some((cand, false));
                break;
            }
        }
    }
    let hi_edge = 2.0 * alpha_delta * (1.0 + 1e-12);
    let (a_delta, a_delta_is_eigenvalue) = a_delta.ok_or(Error::EmptyBand {
        alpha: alpha_delta,
        lo: alpha_delta,
        hi: hi_edge,
    })?;
    let lo_edge = a_delta * (1.0 - 1e-12);

    // Eigenvalues are descending, so the band is a contiguous index range.
    // It may be empty when the balanced parameter sits below the spectrum;
    // the fallback below covers that.
    let start = lam.partition_point(|&l| l > hi_edge);
    let end = lam.partition_point(|&l| l >= lo_edge);

    let mut noise = vec![0.0; op.len()];
    for i in start..end {
        let l = lam[i];
        noise[i] = (family.r(alpha_delta, l) * l - 1.0) * op.sigma()[i] * x.coeffs()[i];
    }
    let nrm = kahan_sum(noise.iter().map(|&z| z * z)).sqrt();
    let fallback_used = nrm == 0.0;
    if fallback_used {
        // Nothing on the band carries signal (empty band or a solution
        // that vanishes there): spend the whole budget on the eigenvalue
        // nearest the balanced parameter on the log scale.
        let mut best = 0;
        let mut best_dist = f64::INFINITY;
        for (i, &l) in lam.iter().enumerate() {
            let d = (l / alpha_delta).ln().abs();
            if d < best_dist {
                best_dist = d;
                best = i;
            }
        }
        noise[best] = delta;
    } else {
        let s = delta / nrm;
        for z in &mut noise {
            *z *= s;
        }
    }
    let noise = SpectralVector::from_coeffs(noise)?;
    let y = apply_forward(op, x)?;
    let y_tilde = SpectralVector::from_coeffs(
        y.coeffs()
            .iter()
            .zip(noise.coeffs())
            .map(|(&a, &b)| a + b)
            .collect(),
    )?;
    Ok(AdversarialInstance {
        delta,
        alpha_delta,
        a_delta,
        a_delta_is_eigenvalue,
        band: (start, end),
        fallback_used,
        y_tilde,
        noise,
    })
}

/// Squared reconstruction error from data `y` at parameter `alpha`,
/// computed without materializing the reconstruction.
fn reconstruction_error_sq(
    op: &SpectralOperator,
    x: &SpectralVector,
    family: &FilterFamily,
    alpha: f64,
    y: &SpectralVector,
) -> f64 {
    kahan_sum(
        op.lambda()
            .iter()
            .zip(op.sigma())
            .zip(x.coeffs().iter().zip(y.coeffs()))
            .rev()
            .map(|((&l, &s), (&xc, &yc))| {
                let d = family.r(alpha, l) * s * yc - xc;
                d * d
            }),
    )
}

/// How a noise-level probe resolved.
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BracketOutcome {
    /// The parameter choice resolved and the adversarial value was scanned.
    Standard {
        alpha_delta: f64,
        a_delta: f64,
        a_delta_is_eigenvalue: bool,
        band_size: usize,
        fallback_used: bool,
        /// `C0 delta^2 / alpha_delta` with `C0 = (1 - sqrt(rho_tilde))^2 / 2`.
        lower: f64,
        /// `C1 delta^2 / alpha_delta` with `C1 = (1 + rho)^2`.
        upper: f64,
        /// Smallest squared error over the parameter scan for the
        /// adversarial data.
        adversarial: f64,
        alpha_at_min: f64,
        within_bracket: bool,
    },
    /// The exact error vanishes below `epsilon`; only the flat bound
    /// `rho^2 delta^2 / epsilon` applies.
    Trivial { epsilon: f64, upper: f64 },
}

/// Worst-case bracket probe at one noise level.
#[derive(Clone, Debug, Serialize)]
pub struct NoisyRateReport {
    pub delta: f64,
    pub rho_hat: f64,
    pub rho_tilde_hat: f64,
    /// Bracket constants derived from the filter constants.
    pub c_lower: f64,
    pub c_upper: f64,
    pub outcome: BracketOutcome,
}

/// Builds the adversarial instance at `delta` and scans the reconstruction
/// error over `alpha_grid`, reporting the value against the theoretical
/// bracket `[C0, C1] * delta^2 / alpha_delta`.
///
/// `rho_tilde` is always estimated from the diagonal residual on the scan
/// grid; `rho` uses the declared family constant when present.
pub fn worst_case_bracket(
    op: &SpectralOperator,
    x: &SpectralVector,
    family: &FilterFamily,
    delta: f64,
    alpha_grid: &[f64],
) -> Result<NoisyRateReport> {
    if alpha_grid.is_empty() {
        return Err(Error::InvalidArgument(
            "parameter scan grid is empty".into(),
        ));
    }
    let rho_hat = family.rho_or_estimate(alpha_grid, op.lambda());
    let rho_tilde_hat = family.rho_tilde_hat_estimate(alpha_grid);
    let c_lower = 0.5 * (1.0 - rho_tilde_hat.sqrt()).powi(2);
    let c_upper = (1.0 + rho_hat).powi(2);

    let outcome = match build_adversarial(op, x, family, delta) {
        Ok(inst) => {
            let mut best = f64::INFINITY;
            let mut best_alpha = alpha_grid[0];
            for &alpha in alpha_grid {
                let v = reconstruction_error_sq(op, x, family, alpha, &inst.y_tilde);
                if v < best {
                    best = v;
                    best_alpha = alpha;
                }
            }
            let scale = delta * delta / inst.alpha_delta;
            let lower = c_lower * scale;
            let upper = c_upper * scale;
            BracketOutcome::Standard {
                alpha_delta: inst.alpha_delta,
                a_delta: inst.a_delta,
                a_delta_is_eigenvalue: inst.a_delta_is_eigenvalue,
                band_size: inst.band.1 - inst.band.0,
                fallback_used: inst.fallback_used,
                lower,
                upper,
                adversarial: best,
                alpha_at_min: best_alpha,
                within_bracket: best >= lower && best <= upper,
            }
        }
        Err(Error::TrivialCase { epsilon }) => BracketOutcome::Trivial {
            epsilon,
            upper: rho_hat * rho_hat * delta * delta / epsilon,
        },
        Err(e) => return Err(e),
    };
    Ok(NoisyRateReport {
        delta,
        rho_hat,
        rho_tilde_hat,
        c_lower,
        c_upper,
        outcome,
    })
}

/// The rate-transfer auxiliary `phi_tilde(alpha) = sqrt(alpha phi(alpha))`.
pub fn phi_tilde(phi: &IndexFunction, alpha: f64) -> f64 {
    if alpha <= 0.0 {
        return 0.0;
    }
    (alpha * phi.eval(alpha)).sqrt()
}

/// Inverse of `phi_tilde` at `delta`, by expanding log bisection.
pub fn phi_tilde_inv(phi: &IndexFunction, delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "argument must be positive and finite, got {delta:e}"
        )));
    }
    let mut lo = 1e-30;
    let mut hi = 1e2;
    let mut guard = 0;
    while phi_tilde(phi, hi) < delta {
        hi *= 10.0;
        guard += 1;
        if guard > 400 || !hi.is_finite() {
            return Err(Error::Bracket(format!("phi_tilde never reaches {delta:e}")));
        }
    }
    while phi_tilde(phi, lo) > delta {
        lo /= 10.0;
        guard += 1;
        if guard > 800 || lo == 0.0 {
            return Err(Error::Bracket(format!(
                "phi_tilde stays above {delta:e} near zero"
            )));
        }
    }
    bisect_log_increasing(|a| phi_tilde(phi, a), delta, lo, hi, ALPHA_RTOL)
}

/// Transfers a parameter rate `phi` into the noise rate `psi(delta) =
/// delta^2 / phi_tilde^{-1}(delta)`.
///
/// For `phi(t) = t^q` the closed form `psi(delta) = delta^(2q / (1 + q))`
/// is used directly.
pub fn psi_of_delta(phi: &IndexFunction, delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "noise level must be positive and finite, got {delta:e}"
        )));
    }
    if let IndexFunction::Holder { q } = phi {
        return Ok(delta.powf(2.0 * q / (1.0 + q)));
    }
    Ok(delta * delta / phi_tilde_inv(phi, delta)?)
}

/// Fixed point of the implicit logarithmic rate equation.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ImplicitRate {
    /// Solution of `psi = |ln(delta^2 / psi)|^(-nu)`.
    pub psi: f64,
    /// Fixed-point residual at the reported solution.
    pub residual: f64,
    /// A-priori enclosure `[|2 ln delta|^(-nu), |ln delta|^(-nu)]`.
    pub bracket: (f64, f64),
}

/// Solves `psi = |ln(delta^2 / psi)|^(-nu)` for the logarithmic noise
/// rate; requires `delta` small enough that `2 |ln delta| > 1`.
pub fn solve_log_psi(nu: f64, delta: f64) -> Result<ImplicitRate> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "exponent must be positive and finite, got {nu}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "noise level must lie in (0, 1), got {delta:e}"
        )));
    }
    let l = -delta.ln();
    if 2.0 * l <= 1.0 + 1e-6 {
        return Err(Error::DeltaTooLarge(format!(
            "need 2 |ln delta| > 1, got {:e}",
            2.0 * l
        )));
    }
    // On (delta^2, 1) the map psi -> psi - |ln(delta^2/psi)|^(-nu) is
    // strictly increasing from -inf to a positive value.
    let g = |psi: f64| (psi.ln() + 2.0 * l).powf(-nu);
    let f = |psi: f64| psi - g(psi);
    let lo = delta * delta * (1.0 + 1e-12);
    let hi = 1.0 - 1e-15;
    if f(hi) < 0.0 {
        return Err(Error::DeltaTooLarge(format!(
            "no fixed point below one at delta = {delta:e}"
        )));
    }
    let psi = bisect_log_increasing(f, 0.0, lo, hi, 1e-13)?;
    Ok(ImplicitRate {
        psi,
        residual: (psi - g(psi)).abs(),
        bracket: ((2.0 * l).powf(-nu), l.powf(-nu)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::log_grid;
    use crate::operators::{make_solution_from_profile, SourceProfile};

    #[test]
    fn single_mode_parameter_choice_is_exact() {
        // One mode with lambda = 1: alpha (alpha/(alpha+1))^2 = 1/4 at
        // alpha = 1.
        let op = SpectralOperator::from_singular_values(vec![1.0]).unwrap();
        let x = SpectralVector::from_coeffs(vec![1.0]).unwrap();
        let f = FilterFamily::tikhonov();
        let alpha = solve_alpha_delta(&op, &x, &f, 0.5).unwrap();
        assert!((alpha - 1.0).abs() < 1e-9);
    }

    #[test]
    fn single_mode_adversarial_matches_hand_construction() {
        let op = SpectralOperator::from_singular_values(vec![1.0]).unwrap();
        let x = SpectralVector::from_coeffs(vec![1.0]).unwrap();
        let f = FilterFamily::tikhonov();
        let inst = build_adversarial(&op, &x, &f, 0.5).unwrap();
        assert!((inst.alpha_delta - 1.0).abs() < 1e-9);
        assert!(!inst.a_delta_is_eigenvalue);
        assert!(inst.a_delta < inst.alpha_delta);
        assert_eq!(inst.band, (0, 1));
        assert!(!inst.fallback_used);
        // Residual direction: (r(1,1) * 1 - 1) = -1/2, normalized and
        // scaled to delta = 1/2 gives noise -1/2 on the single mode.
        assert!((inst.noise.coeffs()[0] + 0.5).abs() < 1e-12);
        assert!((inst.y_tilde.coeffs()[0] - 0.5).abs() < 1e-12);
        assert!((inst.noise.norm() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cutoff_below_the_spectrum_is_trivial() {
        let op = SpectralOperator::polynomial(1.0, 4).unwrap();
        let x = SpectralVector::from_coeffs(vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let f = FilterFamily::cutoff(2.0).unwrap();
        // lambda_min = 1/16; err^2 vanishes for alpha <= lambda_min / 2.
        let err = solve_alpha_delta(&op, &x, &f, 0.1);
        match err {
            Err(Error::TrivialCase { epsilon }) => {
                assert!(
                    (epsilon / 0.03125 - 1.0).abs() < 1e-8,
                    "epsilon {epsilon:e}"
                );
            }
            other => panic!("expected the trivial case, got {other:?}"),
        }
        let report = worst_case_bracket(&op, &x, &f, 0.1, &log_grid(1e-6, 1.0, 10)).unwrap();
        match report.outcome {
            BracketOutcome::Trivial { epsilon, upper } => {
                let want = 0.5 * 0.01 / epsilon;
                assert!((upper - want).abs() < 1e-12 * want);
            }
            other => panic!("expected the trivial outcome, got {other:?}"),
        }
    }

    #[test]
    fn bracket_contains_the_adversarial_value() {
        let op = SpectralOperator::polynomial(1.0, 500).unwrap();
        let profile = SourceProfile::new(IndexFunction::holder(1.0).unwrap(), 1.0).unwrap();
        let x = make_solution_from_profile(&op, &profile).unwrap();
        let f = FilterFamily::tikhonov();
        let grid = log_grid(1e-8, 10.0, 40);
        for delta in [1e-3, 1e-2] {
            let report = worst_case_bracket(&op, &x, &f, delta, &grid).unwrap();
            assert!((report.c_upper - 2.25).abs() < 1e-12);
            assert!((report.c_lower - 0.125).abs() < 1e-9);
            match report.outcome {
                BracketOutcome::Standard {
                    within_bracket,
                    lower,
                    adversarial,
                    upper,
                    fallback_used,
                    ..
                } => {
                    assert!(
                        within_bracket,
                        "adversarial {adversarial:e} outside [{lower:e}, {upper:e}]"
                    );
                    assert!(!fallback_used);
                }
                other => panic!("expected the standard outcome, got {other:?}"),
            }
        }
    }

    #[test]
    fn noise_has_exactly_the_requested_norm() {
        let op = SpectralOperator::polynomial(1.0, 200).unwrap();
        let profile = SourceProfile::new(IndexFunction::holder(0.5).unwrap(), 2.0).unwrap();
        let x = make_solution_from_profile(&op, &profile).unwrap();
        let f = FilterFamily::tikhonov();
        let y = apply_forward(&op, &x).unwrap();
        for delta in [1e-4, 1e-2, 0.3] {
            let inst = build_adversarial(&op, &x, &f, delta).unwrap();
            assert!((inst.noise.norm() / delta - 1.0).abs() < 1e-12);
            let diff_sq = inst.y_tilde.dist_sq(&y).unwrap();
            assert!((diff_sq.sqrt() / delta - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_zero_solutions_and_bad_levels() {
        let op = SpectralOperator::polynomial(1.0, 5).unwrap();
        let zero = SpectralVector::zeros(5);
        let f = FilterFamily::tikhonov();
        assert!(solve_alpha_delta(&op, &zero, &f, 0.1).is_err());
        let x = SpectralVector::from_coeffs(vec![1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(solve_alpha_delta(&op, &x, &f, 0.0).is_err());
        assert!(solve_alpha_delta(&op, &x, &f, -1.0).is_err());
        assert!(solve_alpha_delta(&op, &x, &f, f64::NAN).is_err());
    }

    #[test]
    fn holder_transfer_has_the_closed_form() {
        // nu = 0.25 corresponds to phi(t) = t^(1/2); the noise rate is
        // delta^(2/3).
        let phi = IndexFunction::holder(0.5).unwrap();
        let psi = psi_of_delta(&phi, 0.01).unwrap();
        assert!((psi - 0.046415888336127795).abs() < 1e-15);
        // Identity benchmark: phi_tilde = alpha, so psi(delta) = delta.
        let id = IndexFunction::holder(1.0).unwrap();
        for d in [1e-6, 1e-3, 0.5] {
            assert!((psi_of_delta(&id, d).unwrap() - d).abs() < 1e-12 * d);
        }
    }

    #[test]
    fn transfer_inverse_agrees_with_the_closed_form() {
        let phi = IndexFunction::holder(0.5).unwrap();
        for d in [1e-8, 1e-4, 1e-2] {
            let alpha = phi_tilde_inv(&phi, d).unwrap();
            // phi_tilde(alpha) = alpha^(3/4) = d, so alpha = d^(4/3).
            assert!((alpha / d.powf(4.0 / 3.0) - 1.0).abs() < 1e-9);
            let psi = d * d / alpha;
            assert!((psi / psi_of_delta(&phi, d).unwrap() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn logarithmic_transfer_stays_in_its_bracket() {
        let rate = solve_log_psi(0.5, 1e-6).unwrap();
        assert!((rate.bracket.0 - 0.1902398665508126).abs() < 1e-15);
        assert!((rate.bracket.1 - 0.2690397993802069).abs() < 1e-15);
        assert!(rate.psi >= rate.bracket.0 && rate.psi <= rate.bracket.1);
        assert!((rate.psi - 0.1961088354).abs() < 1e-8);
        assert!(rate.residual <= 1e-10);
    }

    #[test]
    fn logarithmic_transfer_needs_small_noise() {
        assert!(matches!(
            solve_log_psi(0.5, 0.9),
            Err(Error::DeltaTooLarge(_))
        ));
        assert!(solve_log_psi(0.0, 1e-3).is_err());
        assert!(solve_log_psi(0.5, 0.0).is_err());
    }
}
