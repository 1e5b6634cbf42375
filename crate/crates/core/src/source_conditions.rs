//! Source-condition diagnostics: variational inequality constants,
//! spectral witnesses against classical source conditions, and distance
//! functions to smoothness balls.
//!
//! All routines work relative to a benchmark index function `phi` that is
//! strictly positive on the spectrum. Throughout, `e` denotes the spectral
//! tail function of the solution and `phi_i = phi(lambda_i)`.

use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::filters::FilterFamily;
use crate::operators::{SpectralOperator, SpectralVector};
use crate::rates_exact::error_exact;
use crate::solve::{bisect_log_decreasing, fit_loglog};
use crate::sums::{kahan_sum, KahanAccumulator};

/// Sampled variational inequality constant and its spectral counterpart.
#[derive(Clone, Debug, Serialize)]
pub struct VariationalReport {
    pub nu: f64,
    /// Largest sampled value of `|<x, v>| / (|phi(L) v|^nu |v|^(1 - nu))`.
    pub c_vi: f64,
    /// Which test vector attained it.
    pub c_vi_witness: String,
    /// `sup_i e(lambda_i) / phi(lambda_i)^(2 nu)`.
    pub c_spec: f64,
    pub c_spec_lambda: f64,
    pub vectors_tested: usize,
    pub seed: u64,
}

/// Estimates the variational inequality constant of the solution against
/// the benchmark `phi^nu` by scanning a structured family of test vectors:
/// every basis vector, every head and tail projection of the solution, and
/// `random_samples` seeded Gaussian directions.
///
/// The tail projections guarantee `c_spec <= c_vi^2` up to rounding; the
/// converse bound `c_vi <= 2 c_spec^((1 - nu)/2) c^nu` with `c^2 = c_spec
/// (1 + 1/(1 - nu))` holds whenever the spectral constant is finite.
pub fn vi_constant(
    op: &SpectralOperator,
    x: &SpectralVector,
    phi: &crate::spectral_analysis::IndexFunction,
    nu: f64,
    random_samples: usize,
    seed: u64,
) -> Result<VariationalReport> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "variational exponent must lie in (0, 1), got {nu}"
        )));
    }
    if op.len() != x.len() {
        return Err(Error::LengthMismatch {
            left: op.len(),
            right: x.len(),
        });
    }
    let n = op.len();
    let phis = eval_phi_on_spectrum(op, phi)?;
    let xc = x.coeffs();

    // ratio(v) = |<x, v>| / (den_a^(nu/2) den_b^((1-nu)/2)) where
    // den_a = |phi(L) v|^2 and den_b = |v|^2.
    let ratio = |num: f64, den_a: f64, den_b: f64| -> Option<f64> {
        if den_b <= 0.0 {
            return None;
        }
        Some(num.abs() / (den_a.powf(nu / 2.0) * den_b.powf((1.0 - nu) / 2.0)))
    };

    let mut best = 0.0f64;
    let mut witness = String::from("none");
    let mut tested = 0usize;
    let mut consider = |r: Option<f64>, who: &dyn Fn() -> String| {
        tested += 1;
        if let Some(r) = r {
            if r > best {
                best = r;
                witness = who();
            }
        }
    };

    for i in 0..n {
        let r = ratio(xc[i], phis[i] * phis[i], 1.0);
        consider(r, &|| format!("basis[{i}]"));
    }

    // Prefix (head) and suffix (tail) projections of the solution at every
    // split index.
    let mut pre_x2 = KahanAccumulator::default();
    let mut pre_p2 = KahanAccumulator::default();
    for j in 0..n {
        pre_x2.add(xc[j] * xc[j]);
        pre_p2.add(phis[j] * phis[j] * xc[j] * xc[j]);
        let r = ratio(pre_x2.value(), pre_p2.value(), pre_x2.value());
        consider(r, &|| format!("head[{j}]"));
    }
    let mut suf_x2 = KahanAccumulator::default();
    let mut suf_p2 = KahanAccumulator::default();
    for j in (0..n).rev() {
        suf_x2.add(xc[j] * xc[j]);
        suf_p2.add(phis[j] * phis[j] * xc[j] * xc[j]);
        let r = ratio(suf_x2.value(), suf_p2.value(), suf_x2.value());
        consider(r, &|| format!("tail[{j}]"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..random_samples {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let num = kahan_sum(v.iter().zip(xc).map(|(&a, &b)| a * b));
        let den_a = kahan_sum(v.iter().zip(&phis).map(|(&a, &p)| p * p * a * a));
        let den_b = kahan_sum(v.iter().map(|&a| a * a));
        consider(ratio(num, den_a, den_b), &|| format!("random[{k}]"));
    }

    // Spectral constant at every eigenvalue.
    let mut c_spec = 0.0f64;
    let mut c_spec_lambda = op.lambda()[0];
    let mut tail = KahanAccumulator::default();
    for j in (0..n).rev() {
        tail.add(xc[j] * xc[j]);
        let denom = phis[j].powf(2.0 * nu);
        if denom <= 0.0 {
            return Err(Error::Division(format!(
                "phi vanishes at lambda = {:e}",
                op.lambda()[j]
            )));
        }
        let v = tail.value() / denom;
        if v > c_spec {
            c_spec = v;
            c_spec_lambda = op.lambda()[j];
        }
    }

    Ok(VariationalReport {
        nu,
        c_vi: best,
        c_vi_witness: witness,
        c_spec,
        c_spec_lambda,
        vectors_tested: tested,
        seed,
    })
}

/// Partial sums of the candidate source element against classical
/// smoothness, evaluated at increasing truncation dimensions.
#[derive(Clone, Debug, Serialize)]
pub struct SscWitness {
    pub nu: f64,
    pub dims: Vec<usize>,
    /// `W(m) = sum_{i <= m} x_i^2 / phi(lambda_i)^(2 nu)`: bounded exactly
    /// when the solution has a classical source representation.
    pub partial_norms: Vec<f64>,
    /// `log10(phi(lambda_1) / phi(lambda_m))` for each dimension, the
    /// benchmark drop over the truncated spectrum.
    pub phi_drop_log10: Vec<f64>,
}

pub fn ssc_witness(
    op: &SpectralOperator,
    x: &SpectralVector,
    phi: &crate::spectral_analysis::IndexFunction,
    nu: f64,
    dims: &[usize],
) -> Result<SscWitness> {
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "smoothness exponent must lie in (0, 1), got {nu}"
        )));
    }
    if op.len() != x.len() {
        return Err(Error::LengthMismatch {
            left: op.len(),
            right: x.len(),
        });
    }
    if dims.is_empty() {
        return Err(Error::InvalidArgument("dimension list is empty".into()));
    }
    for w in dims.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidArgument(
                "dimensions must be strictly increasing".into(),
            ));
        }
    }
    if dims[0] == 0 || dims[dims.len() - 1] > op.len() {
        return Err(Error::OutOfRange(format!(
            "dimensions must lie in 1..={}",
            op.len()
        )));
    }
    let phis = eval_phi_on_spectrum(op, phi)?;
    let phi_first = phis[0];
    let mut acc = KahanAccumulator::default();
    let mut partial_norms = Vec::with_capacity(dims.len());
    let mut phi_drop = Vec::with_capacity(dims.len());
    let mut next = 0usize;
    for (i, (&c, &p)) in x.coeffs().iter().zip(&phis).enumerate() {
        acc.add(c * c / p.powf(2.0 * nu));
        if next < dims.len() && i + 1 == dims[next] {
            partial_norms.push(acc.value());
            phi_drop.push((phi_first / p).log10());
            next += 1;
        }
    }
    Ok(SscWitness {
        nu,
        dims: dims.to_vec(),
        partial_norms,
        phi_drop_log10: phi_drop,
    })
}

/// One point of the distance-to-smoothness-ball profile.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DistancePoint {
    pub radius: f64,
    /// Distance from the solution to `{phi(L) xi : |xi| <= radius}`.
    pub d: f64,
    /// Multiplier of the active constraint; zero when the ball already
    /// contains the preimage, infinite at radius zero.
    pub mu: f64,
}

/// Distance from the solution to the image of the radius-`R` ball under
/// `phi(L)`, via the multiplier equation of the projection.
///
/// For `R >= |x / phi|` the projection is interior and the distance is
/// zero. Otherwise the multiplier solves `sum_i (phi_i x_i / (phi_i^2 +
/// mu))^2 = R^2`, strictly decreasing in `mu`, and the distance is
/// `sqrt(sum_i x_i^2 mu^2 / (phi_i^2 + mu)^2)`.
pub fn distance_function(
    op: &SpectralOperator,
    x: &SpectralVector,
    phi: &crate::spectral_analysis::IndexFunction,
    radius: f64,
) -> Result<DistancePoint> {
    if !(radius >= 0.0) || !radius.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "radius must be non-negative and finite, got {radius}"
        )));
    }
    if op.len() != x.len() {
        return Err(Error::LengthMismatch {
            left: op.len(),
            right: x.len(),
        });
    }
    let phis = eval_phi_on_spectrum(op, phi)?;
    let xc = x.coeffs();
    if radius == 0.0 {
        return Ok(DistancePoint {
            radius,
            d: x.norm(),
            mu: f64::INFINITY,
        });
    }
    let preimage_sq = kahan_sum(xc.iter().zip(&phis).rev().map(|(&c, &p)| (c / p) * (c / p)));
    if preimage_sq <= radius * radius {
        return Ok(DistancePoint {
            radius,
            d: 0.0,
            mu: 0.0,
        });
    }
    let constraint = |mu: f64| {
        kahan_sum(xc.iter().zip(&phis).rev().map(|(&c, &p)| {
            let t = p * c / (p * p + mu);
            t * t
        }))
    };
    let lo = 1e-300;
    let phi_max = phis.iter().copied().fold(0.0f64, f64::max);
    let mut hi = (phi_max * x.norm() / radius).powi(2).max(1e-280);
    let mut guard = 0;
    while constraint(hi) > radius * radius {
        hi *= 2.0;
        guard += 1;
        if guard > 200 || !hi.is_finite() {
            return Err(Error::Bracket(
                "multiplier bracket failed to enclose the constraint".into(),
            ));
        }
    }
    let mu = bisect_log_decreasing(constraint, radius * radius, lo, hi, 1e-12)?;
    let d_sq = kahan_sum(xc.iter().zip(&phis).rev().map(|(&c, &p)| {
        let t = c * mu / (p * p + mu);
        t * t
    }));
    Ok(DistancePoint {
        radius,
        d: d_sq.sqrt(),
        mu,
    })
}

/// Distance profile over a radius grid, with the log-log decay slope of
/// the positive-distance part.
#[derive(Clone, Debug, Serialize)]
pub struct DistanceProfile {
    pub rows: Vec<DistancePoint>,
    pub slope: Option<f64>,
    pub r_squared: Option<f64>,
}

impl DistanceProfile {
    /// Writes `R,d,mu` rows as CSV after the given `#` comment lines.
    pub fn write_csv<W: Write>(&self, w: &mut W, comments: &[String]) -> io::Result<()> {
        for line in comments {
            writeln!(w, "{line}")?;
        }
        writeln!(w, "R,d,mu")?;
        for row in &self.rows {
            writeln!(w, "{:e},{:e},{:e}", row.radius, row.d, row.mu)?;
        }
        Ok(())
    }
}

pub fn distance_profile(
    op: &SpectralOperator,
    x: &SpectralVector,
    phi: &crate::spectral_analysis::IndexFunction,
    radii: &[f64],
) -> Result<DistanceProfile> {
    if radii.is_empty() {
        return Err(Error::InvalidArgument("radius grid is empty".into()));
    }
    if radii.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return Err(Error::InvalidArgument(
            "radius grid must contain only positive finite values".into(),
        ));
    }
    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut rows = Vec::with_capacity(sorted.len());
    for &r in &sorted {
        rows.push(distance_function(op, x, phi, r)?);
    }
    let pos: Vec<&DistancePoint> = rows.iter().filter(|p| p.d > 0.0).collect();
    let (slope, r_squared) = if pos.len() >= 2 {
        let rs: Vec<f64> = pos.iter().map(|p| p.radius).collect();
        let ds: Vec<f64> = pos.iter().map(|p| p.d).collect();
        let (s, _, r2) = fit_loglog(&rs, &ds)?;
        (Some(s), Some(r2))
    } else {
        (None, None)
    };
    Ok(DistanceProfile {
        rows,
        slope,
        r_squared,
    })
}

/// Certificate that the approximate-smoothness error bound holds on a
/// sampled set of surrogates.
#[derive(Clone, Debug, Serialize)]
pub struct DistanceBoundReport {
    /// Sampled qualification constant `sup sqrt(rtilde) phi(lambda) /
    /// phi(alpha)` over the scan grid and the spectrum.
    pub a_hat: f64,
    pub alphas_tested: usize,
    pub xi_tested: usize,
    /// Largest value of `err(alpha) - (|x - phi(L) xi| + a_hat phi(alpha)
    /// |xi|)` over all pairs; non-positive up to rounding when the bound
    /// holds.
    pub max_slack: f64,
    pub holds: bool,
}

/// Verifies the exact-data error bound `err(alpha) <= |x - phi(L) xi| +
/// a_hat phi(alpha) |xi|` for every sampled surrogate `xi`: the zero
/// element, truncated preimages of the solution at a spread of split
/// indices, and seeded Gaussian directions.
pub fn distance_error_bound_check(
    op: &SpectralOperator,
    x: &SpectralVector,
    family: &FilterFamily,
    phi: &crate::spectral_analysis::IndexFunction,
    alphas: &[f64],
    random_xi: usize,
    seed: u64,
) -> Result<DistanceBoundReport> {
    if alphas.is_empty() {
        return Err(Error::InvalidArgument("parameter grid is empty".into()));
    }
    if alphas.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
        return Err(Error::InvalidArgument(
            "parameter grid must contain only positive finite values".into(),
        ));
    }
    let n = op.len();
    let phis = eval_phi_on_spectrum(op, phi)?;
    let xc = x.coeffs();

    let mut a_hat = 0.0f64;
    for &alpha in alphas {
        let denom = phi.eval(alpha);
        if denom <= 0.0 {
            return Err(Error::Division(format!(
                "phi vanishes at alpha = {alpha:e}"
            )));
        }
        for (&l, &p) in op.lambda().iter().zip(&phis) {
            let v = family.rtilde(alpha, l).sqrt() * p / denom;
            a_hat = a_hat.max(v);
        }
    }

    // Surrogates: zero, truncated preimages, random directions.
    let mut xis: Vec<Vec<f64>> = vec![vec![0.0; n]];
    let splits = n.clamp(1, 16);
    for k in 1..=splits {
        let j = k * n / splits;
        let mut xi = vec![0.0; n];
        for i in 0..j {
            xi[i] = xc[i] / phis[i];
        }
        xis.push(xi);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spread = 1.0 / (n as f64).sqrt();
    for _ in 0..random_xi {
        xis.push(
            (0..n)
                .map(|_| {
                    let g: f64 = StandardNormal.sample(&mut rng);
                    g * spread
                })
                .collect(),
        );
    }

    let errs: Vec<(f64, f64)> = alphas
        .iter()
        .map(|&a| Ok((a, error_exact(op, x, family, a)?.sqrt())))
        .collect::<Result<_>>()?;

    let mut max_slack = f64::NEG_INFINITY;
    for xi in &xis {
        let resid = kahan_sum(
            xc.iter()
                .zip(&phis)
                .zip(xi)
                .map(|((&c, &p), &z)| (c - p * z) * (c - p * z)),
        )
        .sqrt();
        let xi_norm = kahan_sum(xi.iter().map(|&z| z * z)).sqrt();
        for &(alpha, err) in &errs {
            let rhs = resid + a_hat * phi.eval(alpha) * xi_norm;
            max_slack = max_slack.max(err - rhs);
        }
    }
    let tol = 1e-9 * (1.0 + x.norm());
    Ok(DistanceBoundReport {
        a_hat,
        alphas_tested: alphas.len(),
        xi_tested: xis.len(),
        max_slack,
        holds: max_slack <= tol,
    })
}

fn eval_phi_on_spectrum(
    op: &SpectralOperator,
    phi: &crate::spectral_analysis::IndexFunction,
) -> Result<Vec<f64>> {
    let phis: Vec<f64> = op.lambda().iter().map(|&l| phi.eval(l)).collect();
    if let Some(i) = phis.iter().position(|&p| !(p > 0.0)) {
        return Err(Error::Division(format!(
            "phi vanishes at lambda = {:e}",
            op.lambda()[i]
        )));
    }
    Ok(phis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::log_grid;
    use crate::operators::{make_solution_from_profile, SourceProfile};
    use crate::spectral_analysis::IndexFunction;

    #[test]
    fn single_mode_vi_constant_is_one() {
        let op = SpectralOperator::from_singular_values(vec![1.0]).unwrap();
        let x = SpectralVector::from_coeffs(vec![1.0]).unwrap();
        let phi = IndexFunction::holder(1.0).unwrap();
        let report = vi_constant(&op, &x, &phi, 0.5, 50, 7).unwrap();
        assert!((report.c_vi - 1.0).abs() <= 1e-12, "c_vi = {}", report.c_vi);
        assert!((report.c_spec - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn zero_solution_has_zero_constants() {
        let op = SpectralOperator::polynomial(1.0, 10).unwrap();
        let x = SpectralVector::zeros(10);
        let phi = IndexFunction::holder(1.0).unwrap();
        let report = vi_constant(&op, &x, &phi, 0.5, 20, 1).unwrap();
        assert_eq!(report.c_vi, 0.0);
        assert_eq!(report.c_spec, 0.0);
    }

    #[test]
    fn vi_invariants_hold_for_an_aligned_profile() {
        let op = SpectralOperator::polynomial(1.0, 2000).unwrap();
        let phi = IndexFunction::holder(1.0).unwrap();
        for nu in [0.25, 0.5] {
            let target = phi.power(2.0 * nu).unwrap();
            let profile = SourceProfile::new(target, 1.0).unwrap();
            let x = make_solution_from_profile(&op, &profile).unwrap();
            let report = vi_constant(&op, &x, &phi, nu, 100, 11).unwrap();
            // The tail projections push c_vi^2 up to c_spec.
            assert!(
                report.c_spec <= report.c_vi * report.c_vi + 1e-9,
                "nu={nu}: c_spec={} c_vi={}",
                report.c_spec,
                report.c_vi
            );
            let c_sq = report.c_spec * (1.0 + 1.0 / (1.0 - nu));
            let converse = 2.0 * report.c_spec.powf((1.0 - nu) / 2.0) * c_sq.sqrt().powf(nu);
            assert!(
                report.c_vi <= converse + 1e-9,
                "nu={nu}: c_vi={} converse={converse}",
                report.c_vi
            );
            // The aligned profile realizes c_spec = 1 exactly.
            assert!((report.c_spec - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn witness_grows_for_a_supersmooth_mismatch() {
        // e = lambda against the phi = lambda benchmark at nu = 1/2: the
        // candidate head norms grow like the harmonic series.
        let op = SpectralOperator::polynomial(1.0, 10_000).unwrap();
        let phi = IndexFunction::holder(1.0).unwrap();
        let profile = SourceProfile::new(phi.clone(), 1.0).unwrap();
        let x = make_solution_from_profile(&op, &profile).unwrap();
        let w = ssc_witness(&op, &x, &phi, 0.5, &[100, 1000, 10_000]).unwrap();
        assert!(w.partial_norms[0] < w.partial_norms[1]);
        assert!(w.partial_norms[1] < w.partial_norms[2]);
        // Two decades of spectrum add about 4 log10(10) * nu * ... ~ 4.6
        // per dimension decade; demand at least half the theoretical rate
        // per unit of benchmark drop.
        let dw = w.partial_norms[2] - w.partial_norms[0];
        let dphi = w.phi_drop_log10[2] - w.phi_drop_log10[0];
        assert!(dphi > 0.0);
        assert!(dw / dphi >= 0.5 * 2.0 * 0.5, "growth {dw} over drop {dphi}");
    }

    #[test]
    fn witness_stays_bounded_for_a_true_member() {
        // Solution built as phi^nu times a unit element: the candidate is
        // that element, so the head norms are bounded by one.
        let op = SpectralOperator::polynomial(1.0, 5000).unwrap();
        let phi = IndexFunction::holder(1.0).unwrap();
        let nu = 0.5;
        let n = op.len();
        let mut coeffs = vec![0.0; n];
        let mut norm = 0.0;
        for (i, c) in coeffs.iter_mut().enumerate() {
            let w = 1.0 / (i + 1) as f64;
            *c = w;
            norm += w * w;
        }
        let norm = norm.sqrt();
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c = phi.eval(op.lambda()[i]).powf(nu) * (*c / norm);
        }
        let x = SpectralVector::from_coeffs(coeffs).unwrap();
        let w = ssc_witness(&op, &x, &phi, nu, &[10, 100, 1000, 5000]).unwrap();
        for (&m, &v) in w.dims.iter().zip(&w.partial_norms) {
            assert!(v <= 1.0 + 1e-9, "W({m}) = {v}");
        }
        assert!(w.partial_norms.windows(2).all(|p| p[1] >= p[0]));
    }

    #[test]
    fn ssc_witness_validates_dimensions() {
        let op = SpectralOperator::polynomial(1.0, 10).unwrap();
        let x = SpectralVector::zeros(10);
        let phi = IndexFunction::holder(1.0).unwrap();
        assert!(ssc_witness(&op, &x, &phi, 0.5, &[]).is_err());
        assert!(ssc_witness(&op, &x, &phi, 0.5, &[3, 3]).is_err());
        assert!(ssc_witness(&op, &x, &phi, 0.5, &[0, 5]).is_err());
        assert!(ssc_witness(&op, &x, &phi, 0.5, &[5, 11]).is_err());
        assert!(ssc_witness(&op, &x, &phi, 1.0, &[5]).is_err());
    }

    #[test]
    fn single_mode_distance_matches_hand_kkt() {
        // One mode, phi(1) = 1, |x| = 1, R = 1/2: xi = 1/2, mu = 1,
        // d = 1/2.
        let op = SpectralOperator::from_singular_values(vec![1.0]).unwrap();
        let x = SpectralVector::from_coeffs(vec![1.0]).unwrap();
        let phi = IndexFunction::holder(1.0).unwrap();
        let p = distance_function(&op, &x, &phi, 0.5).unwrap();
        assert!((p.d - 0.5).abs() < 1e-9);
        assert!((p.mu - 1.0).abs() < 1e-9);
    }

    #[test]
    fn distance_endpoints_are_exact() {
        let op = SpectralOperator::from_singular_values(vec![1.0]).unwrap();
        let x = SpectralVector::from_coeffs(vec![2.0]).unwrap();
        let phi = IndexFunction::holder(1.0).unwrap();
        let at_zero = distance_function(&op, &x, &phi, 0.0).unwrap();
        assert_eq!(at_zero.d, 2.0);
        assert!(at_zero.mu.is_infinite());
        // R >= |x / phi| = 2 puts the preimage inside the ball.
        let inside = distance_function(&op, &x, &phi, 2.0).unwrap();
        assert_eq!(inside.d, 0.0);
        assert_eq!(inside.mu, 0.0);
        let beyond = distance_function(&op, &x, &phi, 5.0).unwrap();
        assert_eq!(beyond.d, 0.0);
    }

    #[test]
    fn distance_profile_is_monotone() {
        let op = SpectralOperator::polynomial(1.0, 300).unwrap();
        let profile = SourceProfile::new(IndexFunction::holder(1.0).unwrap(), 1.0).unwrap();
        let x = make_solution_from_profile(&op, &profile).unwrap();
        let phi = IndexFunction::holder(1.0).unwrap();
        let radii = log_grid(0.1, 100.0, 5);
        let prof = distance_profile(&op, &x, &phi, &radii).unwrap();
        for w in prof.rows.windows(2) {
            assert!(w[1].d <= w[0].d + 1e-12);
            if w[0].mu > 0.0 && w[1].mu > 0.0 && w[0].mu.is_finite() {
                assert!(w[1].mu <= w[0].mu * (1.0 + 1e-9));
            }
        }
        assert!(prof.slope.is_some());
    }

    #[test]
    fn exact_error_obeys_the_surrogate_bound() {
        let op = SpectralOperator::polynomial(1.0, 200).unwrap();
        let profile = SourceProfile::new(IndexFunction::holder(1.0).unwrap(), 1.0).unwrap();
        let x = make_solution_from_profile(&op, &profile).unwrap();
        let phi = IndexFunction::holder(1.0).unwrap();
        let f = FilterFamily::tikhonov();
        let alphas = log_grid(1e-6, 1.0, 8);
        let report = distance_error_bound_check(&op, &x, &f, &phi, &alphas, 20, 3).unwrap();
        assert!(report.holds, "slack {:e}", report.max_slack);
        // For this filter the constant approaches 1 from below as the
        // parameter drops under the spectrum.
        assert!(
            report.a_hat > 0.99 && report.a_hat <= 1.0,
            "a_hat = {}",
            report.a_hat
        );
        assert!(report.xi_tested > 20);
    }
}
