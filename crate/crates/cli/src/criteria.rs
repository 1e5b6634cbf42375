//! The acceptance suite: nine numbered checks over frozen instances, each
//! reproducing one guaranteed behavior of the library at a fixed tolerance.
//! `run_all` executes every check, writes its artifacts, and verifies that
//! a second run produces byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use specreg::{
    distance_error_bound_check, distance_function, distance_profile, error_curve, fit_log_rate,
    fit_loglog, fit_power_rate, log_grid, make_solution_from_profile, solve_log_psi,
    spectral_function, ssc_witness, validate_generator, vi_constant, worst_case_bracket,
    BracketOutcome, CurveProvenance, ErrorCurve, FilterFamily, FitWindow, IndexFunction, RateFit,
    SourceProfile, SpectralOperator, SpectralVector,
};

use crate::output::{config_hash, write_json, write_text, RunStamp};

pub const DEFAULT_SEED: u64 = 1789;

/// Outcome of one acceptance check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!(
            "acceptance check {} ({}): {} [{:.2}s] {}",
            self.id,
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.seconds,
            self.detail
        )
    }
}

/// Artifact writer that remembers what it wrote, for the determinism pass.
struct Sink {
    dir: PathBuf,
    written: Vec<String>,
}

impl Sink {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    fn json<T: Serialize>(&mut self, name: &str, stamp: &RunStamp, report: &T) -> Result<()> {
        write_json(&self.dir.join(name), &stamp.wrap(report)?)?;
        self.written.push(name.to_string());
        Ok(())
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        write_text(&self.dir.join(name), body)?;
        self.written.push(name.to_string());
        Ok(())
    }
}

fn stamp(desc: &str, seed: Option<u64>) -> RunStamp {
    RunStamp::new(config_hash(desc), seed)
}

fn tik_solution(
    p: f64,
    n: usize,
    target: IndexFunction,
) -> Result<(SpectralOperator, SpectralVector)> {
    let op = SpectralOperator::polynomial(p, n)?;
    let profile = SourceProfile::new(target, 1.0)?;
    let x = make_solution_from_profile(&op, &profile)?;
    Ok((op, x))
}

fn curve_csv(curve: &ErrorCurve, stamp: &RunStamp) -> Result<String> {
    let mut buf = Vec::new();
    curve.write_csv(&mut buf, &[stamp.csv_comment()])?;
    Ok(String::from_utf8(buf)?)
}

/// Check 1: the Tikhonov family clears every admissibility condition on
/// wide grids with its exact constants, while the aggressive spectral
/// cutoff is flagged on parameter regularity and the diagonal bound, and
/// only on those.
fn check_generator(sink: &mut Sink) -> Result<CheckResult> {
    let t = Instant::now();
    let grid = log_grid(1e-8, 1e2, 20);
    let tik = FilterFamily::tikhonov();
    let rep_tik = validate_generator(&tik, &grid, &grid)?;
    let diagonal_exact = grid.iter().all(|&a| tik.rtilde(a, a) == 0.25);

    let cut = FilterFamily::cutoff(2.0)?;
    let rep_cut = validate_generator(&cut, &grid, &grid)?;
    let cut_flags_expected = rep_cut.pointwise_bounds.passed
        && rep_cut.residual_monotone_in_lambda.passed
        && !rep_cut.residual_regular_in_alpha.passed
        && !rep_cut.diagonal_bounded.passed
        && rep_cut.residual_regular_in_alpha.witness.is_some()
        && rep_cut.diagonal_bounded.witness.is_some();

    let st = stamp(
        "c1: validate tikhonov and cutoff:2 on [1e-8,1e2]^2 at 20/decade",
        None,
    );
    sink.json("c1_generator_tikhonov.json", &st, &rep_tik)?;
    sink.json("c1_generator_cutoff.json", &st, &rep_cut)?;

    let pass =
        rep_tik.all_passed && rep_tik.rho_hat <= 0.5 + 1e-9 && diagonal_exact && cut_flags_expected;
    Ok(CheckResult {
        id: 1,
        name: "generator validation",
        pass,
        detail: format!(
            "tikhonov all_passed={} rho_hat={:.6} diagonal residual == 1/4 at every alpha: {}; \
             cutoff:2 flagged on regularity+diagonal only with witnesses: {}",
            rep_tik.all_passed, rep_tik.rho_hat, diagonal_exact, cut_flags_expected
        ),
        seconds: t.elapsed().as_secs_f64(),
    })
}

/// Check 2: power-law tails reproduce their slope on the exact-data error
/// curve, and the diagonal-residual lower bound holds at every grid point.
fn check_power_rates(sink: &mut Sink) -> Result<CheckResult> {
    let t = Instant::now();
    let f = FilterFamily::tikhonov();
    let grid = log_grid(1e-7, 1e-2, 50);
    let window = FitWindow::new(1e-7, 1e-2)?;
    let st = stamp(
        "c2: polynomial p=1 n=4000, holder tails 2nu, tikhonov, window [1e-7,1e-2] at 50/decade",
        None,
    );

    let mut fits: Vec<(f64, RateFit)> = Vec::new();
    let mut pass = true;
    let mut details = Vec::new();
    for nu in [0.25, 0.5, 0.75] {
        let (op, x) = tik_solution(1.0, 4000, IndexFunction::holder(2.0 * nu)?)?;
        let provenance = CurveProvenance {
            operator: "polynomial:1:4000".into(),
            filter: f.name().to_string(),
            profile: format!("holder:{}", 2.0 * nu),
        };
        let curve = error_curve(&op, &x, &f, &grid, provenance)?;

        let mut floor_ok = true;
        for row in &curve.rows {
            let floor = f.rtilde(row.alpha, row.alpha) * spectral_function(&op, &x, row.alpha)?;
            if row.err_sq < floor {
                floor_ok = false;
                break;
            }
        }

        let fit = fit_power_rate(&curve, window)?;
        let slope = match &fit {
            RateFit::Power { slope, .. } => *slope,
            RateFit::Logarithmic { .. } => unreachable!("power fit requested"),
        };
        let want = 2.0 * nu;
        let slope_ok = (slope - want).abs() <= 0.05;
        pass &= slope_ok && floor_ok;
        details.push(format!(
            "nu={nu}: slope={slope:.4} (want {want}+-0.05: {slope_ok}), lower bound everywhere: {floor_ok}"
        ));

        sink.text(
            &format!("c2_curve_nu{}.csv", (nu * 100.0) as u32),
            &curve_csv(&curve, &st)?,
        )?;
        fits.push((nu, fit));
    }
    sink.json("c2_fits.json", &st, &fits)?;

    Ok(CheckResult {
        id: 2,
        name: "power-rate equivalence",
        pass,
        detail: details.join("; "),
        seconds: t.elapsed().as_secs_f64(),
    })
}

/// Check 3: a logarithmic tail keeps the compensated error ratio flat
/// (spread at most 5) over six decades when the fit exponent matches. The
/// stated negative control demands spread above 5 for a mismatched
/// exponent; the drift a mismatch of 0.2 can produce over this window is
/// bounded near (ln 1e-3 / ln 1e-9)^0.2, about 1.25, so that control is
/// quantitatively unattainable and this check reports its failure rather
/// than loosening the threshold.
fn check_log_rates(sink: &mut Sink) -> Result<CheckResult> {
    let t = Instant::now();
    let f = FilterFamily::tikhonov();
    let grid = log_grid(1e-9, 1e-3, 50);
    let window = FitWindow::new(1e-9, 1e-3)?;
    let (op, x) = tik_solution(1.0, 100_000, IndexFunction::logarithmic(0.5)?)?;
    let provenance = CurveProvenance {
        operator: "polynomial:1:100000".into(),
        filter: f.name().to_string(),
        profile: "log:0.5".into(),
    };
    let curve = error_curve(&op, &x, &f, &grid, provenance)?;

    let matched = fit_log_rate(&curve, 0.5, window)?;
    let control = fit_log_rate(&curve, 0.7, window)?;
    let spread_of = |fit: &RateFit| match fit {
        RateFit::Logarithmic { spread, .. } => *spread,
        RateFit::Power { .. } => unreachable!("log fit requested"),
    };
    let matched_spread = spread_of(&matched);
    let control_spread = spread_of(&control);

    let st = stamp(
        "c3: polynomial p=1 n=100000, log:0.5 tail, tikhonov, window [1e-9,1e-3] at 50/decade",
        None,
    );
    sink.text("c3_curve.csv", &curve_csv(&curve, &st)?)?;
    sink.json(
        "c3_fits.json",
        &st,
        &vec![("matched", &matched), ("control", &control)],
    )?;

    let matched_ok = matched_spread <= 5.0;
    let control_ok = control_spread > 5.0;
    Ok(CheckResult {
        id: 3,
        name: "log-rate equivalence",
        pass: matched_ok && control_ok,
        detail: format!(
            "matched spread={matched_spread:.4} (<= 5: {matched_ok}); \
             control spread={control_spread:.4} (> 5 required: {control_ok}, \
             unattainable on this window)"
        ),
        seconds: t.elapsed().as_secs_f64(),
    })
}

/// Check 4: at twenty noise levels the adversarial worst case lands inside
/// the two-sided bracket `[C0, C1] * delta^2 / alpha_delta` with a factor
/// 1.01 of slack on each side. Also hands the (delta, adversarial) pairs to
/// check 5.
fn check_noisy_bracket(sink: &mut Sink) -> Result<(CheckResult, Vec<(f64, f64)>)> {
    let t = Instant::now();
    let f = FilterFamily::tikhonov();
    let (op, x) = tik_solution(1.0, 31623, IndexFunction::holder(1.0)?)?;
    let scan = log_grid(1e-9, 10.0, 50);
    let deltas: Vec<f64> = (0..20)
        .map(|i| 10f64.powf(-5.0 + 2.5 * i as f64 / 19.0))
        .collect();

    let st = stamp(
        "c4: polynomial p=1 n=31623, holder:1 tail, tikhonov, 20 deltas in [1e-5,10^-2.5], scan [1e-9,10] at 50/decade",
        None,
    );
    let mut reports = Vec::with_capacity(deltas.len());
    let mut rows = Vec::with_capacity(deltas.len());
    let mut csv = String::from(&st.csv_comment());
    csv.push('\n');
    csv.push_str("delta,alpha_delta,lower,adversarial,upper,contained\n");
    let mut pass = true;
    let mut worst_ratio: (f64, f64) = (f64::INFINITY, 0.0);
    for &delta in &deltas {
        let report = worst_case_bracket(&op, &x, &f, delta, &scan)?;
        match &report.outcome {
            BracketOutcome::Standard {
                alpha_delta,
                lower,
                upper,
                adversarial,
                ..
            } => {
                let contained = *lower <= adversarial * 1.01 && *adversarial <= upper * 1.01;
                pass &= contained;
                let ratio = adversarial / (delta * delta / alpha_delta);
                worst_ratio.0 = worst_ratio.0.min(ratio);
                worst_ratio.1 = worst_ratio.1.max(ratio);
                csv.push_str(&format!(
                    "{delta:e},{alpha_delta:e},{lower:e},{adversarial:e},{upper:e},{contained}\n"
                ));
                rows.push((delta, *adversarial));
            }
            BracketOutcome::Trivial { .. } => {
                pass = false;
                csv.push_str(&format!("{delta:e},,,,,false\n"));
            }
        }
        reports.push(report);
    }
    sink.text("c4_brackets.csv", &csv)?;
    sink.json("c4_reports.json", &st, &reports)?;

    let result = CheckResult {
        id: 4,
        name: "noisy-error bracket",
        pass,
        detail: format!(
            "20 deltas contained={pass}; adversarial/(delta^2/alpha) in [{:.4},{:.4}] vs [C0,C1]=[0.125,2.25]",
            worst_ratio.0, worst_ratio.1
        ),
        seconds: t.elapsed().as_secs_f64(),
    };
    Ok((result, rows))
}

/// Check 5: the adversarial error follows the transferred rate in the
/// noise level (slope 4nu/(2nu+1) = 1 for this instance), and the implicit
/// logarithmic rate solver stays inside its proven bracket with tiny
/// residuals.
fn check_rate_transfer(sink: &mut Sink, noisy_rows: &[(f64, f64)]) -> Result<CheckResult> {
    let t = Instant::now();
    let deltas: Vec<f64> = noisy_rows.iter().map(|r| r.0).collect();
    let advs: Vec<f64> = noisy_rows.iter().map(|r| r.1).collect();
    let (slope, _, r_squared) = fit_loglog(&deltas, &advs)?;
    let slope_ok = (slope - 1.0).abs() <= 0.05;

    #[derive(Serialize)]
    struct PsiRow {
        delta: f64,
        psi: f64,
        residual: f64,
        bracket: (f64, f64),
        inside: bool,
    }
    let mut psi_rows = Vec::new();
    let mut psi_ok = true;
    for k in 4..=10 {
        let delta = 10f64.powi(-k);
        let sol = solve_log_psi(0.5, delta)?;
        let inside = sol.bracket.0 <= sol.psi && sol.psi <= sol.bracket.1;
        psi_ok &= inside && sol.residual.abs() <= 1e-10;
        psi_rows.push(PsiRow {
            delta,
            psi: sol.psi,
            residual: sol.residual,
            bracket: sol.bracket,
            inside,
        });
    }

    let st = stamp(
        "c5: slope of adversarial value vs delta from c4; log psi nu=0.5 deltas 1e-4..1e-10",
        None,
    );
    sink.json(
        "c5_summary.json",
        &st,
        &serde_json::json!({
            "slope": slope,
            "r_squared": r_squared,
            "psi": serde_json::to_value(&psi_rows)?,
        }),
    )?;

    Ok(CheckResult {
        id: 5,
        name: "noisy-rate transfer",
        pass: slope_ok && psi_ok,
        detail: format!(
            "adversarial slope={slope:.4} (want 1.00+-0.05: {slope_ok}); \
             psi bracket and residual <= 1e-10 for 7 deltas: {psi_ok}"
        ),
        seconds: t.elapsed().as_secs_f64(),
    })
}

/// Check 6: variational constants satisfy both directions of the
/// equivalence on aligned instances, and the single-mode instance is
/// exactly neutral.
fn check_variational(sink: &mut Sink, seed: u64) -> Result<CheckResult> {
    let t = Instant::now();
    let phi = IndexFunction::holder(1.0)?;
    let mut reports = Vec::new();
    let mut pass = true;
    let mut details = Vec::new();

    let op1 = SpectralOperator::from_singular_values(vec![1.0])?;
    let x1 = SpectralVector::from_coeffs(vec![1.0])?;
    for nu in [0.25, 0.5] {
        let rep = vi_constant(&op1, &x1, &phi, nu, 50, seed)?;
        let neutral = (rep.c_vi - 1.0).abs() <= 1e-12;
        pass &= neutral;
        details.push(format!(
            "single-mode nu={nu}: c_vi={:.12} ({neutral})",
            rep.c_vi
        ));
        reports.push(("single-mode", nu, rep));
    }

    let op = SpectralOperator::polynomial(1.0, 2000)?;
    for nu in [0.25, 0.5] {
        let profile = SourceProfile::new(phi.power(2.0 * nu)?, 1.0)?;
        let x = make_solution_from_profile(&op, &profile)?;
        let rep = vi_constant(&op, &x, &phi, nu, 200, seed)?;
        let forward = rep.c_spec <= rep.c_vi * rep.c_vi + 1e-9;
        let c_sq = rep.c_spec * (1.0 + 1.0 / (1.0 - nu));
        let converse_bound = 2.0 * rep.c_spec.powf((1.0 - nu) / 2.0) * c_sq.sqrt().powf(nu);
        let converse = rep.c_vi <= converse_bound + 1e-9;
        pass &= forward && converse;
        details.push(format!(
            "aligned nu={nu}: c_spec={:.4} c_vi={:.4} forward={forward} converse={converse}",
            rep.c_spec, rep.c_vi
        ));
        reports.push(("aligned", nu, rep));
    }

    let st = stamp(
        "c6: variational constants, polynomial p=1 n=2000 aligned tails + single mode",
        Some(seed),
    );
    sink.json("c6_variational.json", &st, &reports)?;

    Ok(CheckResult {
        id: 6,
        name: "variational constants",
        pass,
        detail: details.join("; "),
        seconds: t.elapsed().as_secs_f64(),
    })
}

/// Check 7: the aligned-tail instance drives the candidate source-element
/// norm up along the spectrum (no classical representation), while an
/// instance built from an explicit element stays bounded by its norm.
fn check_witness(sink: &mut Sink) -> Result<CheckResult> {
    let t = Instant::now();
    let phi = IndexFunction::holder(1.0)?;
    let nu = 0.5;

    let (op, x) = tik_solution(1.0, 10_000, phi.power(2.0 * nu)?)?;
    let grow = ssc_witness(&op, &x, &phi, nu, &[100, 1000, 10_000])?;
    let mut growth_ok = true;
    let mut rates = Vec::new();
    for k in 1..grow.dims.len() {
        let dw = grow.partial_norms[k] - grow.partial_norms[k - 1];
        let dd = grow.phi_drop_log10[k] - grow.phi_drop_log10[k - 1];
        let rate = dw / dd;
        growth_ok &= dd > 0.0 && rate >= 0.5 * 2.0 * nu;
        rates.push(rate);
    }

    let member_op = SpectralOperator::polynomial(1.0, 5000)?;
    let n = member_op.len();
    let mut omega: Vec<f64> = (0..n).map(|i| 1.0 / (i + 1) as f64).collect();
    let norm = omega.iter().map(|w| w * w).sum::<f64>().sqrt();
    let coeffs: Vec<f64> = omega
        .iter_mut()
        .enumerate()
        .map(|(i, w)| phi.eval(member_op.lambda()[i]).powf(nu) * (*w / norm))
        .collect();
    let xm = SpectralVector::from_coeffs(coeffs)?;
    let member = ssc_witness(&member_op, &xm, &phi, nu, &[10, 100, 1000, 5000])?;
    let bounded_ok = member.partial_norms.iter().all(|&w| w <= 1.0 + 1e-9);

    let st = stamp(
        "c7: witness growth p=1 n=10000 aligned nu=0.5; membership p=1 n=5000",
        None,
    );
    sink.json(
        "c7_witness.json",
        &st,
        &serde_json::json!({
            "growth": serde_json::to_value(&grow)?,
            "growth_rates_per_log10": rates,
            "membership": serde_json::to_value(&member)?,
        }),
    )?;

    Ok(CheckResult {
        id: 7,
        name: "source-condition witness",
        pass: growth_ok && bounded_ok,
        detail: format!(
            "growth per log10 drop {:?} (>= {}): {growth_ok}; membership bounded by 1+1e-9: {bounded_ok}",
            rates.iter().map(|r| (r * 1e4).round() / 1e4).collect::<Vec<_>>(),
            0.5 * 2.0 * nu
        ),
        seconds: t.elapsed().as_secs_f64(),
    })
}

/// Exhaustive reference for the ball-constrained projection: zoomed
/// multiplier grids with feasibility projection plus random interior
/// samples. Always an upper bound of the true distance.
fn brute_force_distance(phis: &[f64], xc: &[f64], radius: f64, rng: &mut ChaCha8Rng) -> f64 {
    let n = xc.len();
    let value = |xi: &[f64]| -> f64 {
        xc.iter()
            .zip(phis)
            .zip(xi)
            .map(|((&c, &p), &z)| (c - p * z) * (c - p * z))
            .sum::<f64>()
            .sqrt()
    };
    let zeros = vec![0.0; n];
    let mut best = value(&zeros);

    let unconstrained: Vec<f64> = xc.iter().zip(phis).map(|(&c, &p)| c / p).collect();
    let un_norm = unconstrained.iter().map(|z| z * z).sum::<f64>().sqrt();
    if un_norm > 0.0 {
        let s = (radius / un_norm).min(1.0);
        let xi: Vec<f64> = unconstrained.iter().map(|z| z * s).collect();
        best = best.min(value(&xi));
    }

    let candidate = |mu: f64| -> f64 {
        let mut xi: Vec<f64> = xc
            .iter()
            .zip(phis)
            .map(|(&c, &p)| p * c / (p * p + mu))
            .collect();
        let norm = xi.iter().map(|z| z * z).sum::<f64>().sqrt();
        if norm > radius {
            let s = radius / norm;
            for z in &mut xi {
                *z *= s;
            }
        }
        value(&xi)
    };
    let (mut lo, mut hi) = (1e-12f64, 1e8f64);
    for _ in 0..4 {
        let m = 400;
        let step = (hi / lo).powf(1.0 / (m - 1) as f64);
        let mut best_k = 0;
        let mut best_val = f64::INFINITY;
        let mut mu = lo;
        for k in 0..m {
            let v = candidate(mu);
            if v < best_val {
                best_val = v;
                best_k = k;
            }
            mu *= step;
        }
        best = best.min(best_val);
        let center = lo * step.powi(best_k);
        lo = center / step;
        hi = center * step;
    }

    for _ in 0..2000 {
        let g: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        let gn = g.iter().map(|z| z * z).sum::<f64>().sqrt();
        if gn == 0.0 {
            continue;
        }
        let u: f64 = rng.gen::<f64>();
        let scale = radius * u.powf(1.0 / n as f64) / gn;
        let xi: Vec<f64> = g.iter().map(|z| z * scale).collect();
        best = best.min(value(&xi));
    }
    best
}

/// Check 8: the multiplier solution of the distance problem agrees with a
/// brute-force reference on a hundred small random instances, the distance
/// profile reproduces the power decay for two exponents, and the surrogate
/// error bound holds for every sampled pair.
fn check_distance(sink: &mut Sink, seed: u64) -> Result<CheckResult> {
    let t = Instant::now();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = 1 + (rng.next_u32() as usize) % 6;
        let mut sig: Vec<f64> = (0..n).map(|_| rng.gen_range(0.3..1.5)).collect();
        sig.sort_by(|a, b| b.total_cmp(a));
        for i in 1..n {
            if sig[i] >= sig[i - 1] {
                sig[i] = sig[i - 1] * 0.999;
            }
        }
        let op = SpectralOperator::from_singular_values(sig)?;
        let mut phis: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..2.0)).collect();
        phis.sort_by(f64::total_cmp);
        // Knots ascend in lambda, so pair the smallest phi with the
        // smallest eigenvalue.
        let phi = if n == 1 {
            IndexFunction::tabulated(vec![
                (op.lambda()[0] * 0.5, phis[0]),
                (op.lambda()[0], phis[0]),
            ])?
        } else {
            let mut knots: Vec<(f64, f64)> = op
                .lambda()
                .iter()
                .rev()
                .copied()
                .zip(phis.iter().copied())
                .collect();
            knots.sort_by(|a, b| a.0.total_cmp(&b.0));
            IndexFunction::tabulated(knots)?
        };
        let xc: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        let x = SpectralVector::from_coeffs(xc.clone())?;
        let radius = rng.gen_range(0.1..3.0);

        let kkt = distance_function(&op, &x, &phi, radius)?;
        let phi_values: Vec<f64> = op.lambda().iter().map(|&l| phi.eval(l)).collect();
        let reference = brute_force_distance(&phi_values, &xc, radius, &mut rng);
        worst = worst.max((kkt.d - reference).abs());
    }
    let kkt_ok = worst <= 1e-6;

    let phi = IndexFunction::holder(1.0)?;
    let mut slope_ok = true;
    let mut slopes = Vec::new();
    let mut profiles = Vec::new();
    for (nu, rlo, rhi, file) in [
        (0.25, 10.0, 1000.0, "c8_profile_nu25.csv"),
        (0.5, 30.0, 3000.0, "c8_profile_nu50.csv"),
    ] {
        let (op, x) = tik_solution(1.0, 100_000, phi.power(2.0 * nu)?)?;
        let radii = log_grid(rlo, rhi, 10);
        let prof = distance_profile(&op, &x, &phi, &radii)?;
        let slope = prof.slope.unwrap_or(f64::NAN);
        let want = -nu / (1.0 - nu);
        slope_ok &= (slope - want).abs() <= 0.05;
        slopes.push((nu, slope, want));

        let st = stamp(
            &format!("c8 profile: polynomial p=1 n=100000, tail holder:{}, radii [{rlo},{rhi}] at 10/decade", 2.0 * nu),
            None,
        );
        let mut buf = Vec::new();
        prof.write_csv(&mut buf, &[st.csv_comment()])?;
        sink.text(file, &String::from_utf8(buf)?)?;
        profiles.push((nu, prof.slope, prof.r_squared));
    }

    let f = FilterFamily::tikhonov();
    let (op_b, x_b) = tik_solution(1.0, 200, IndexFunction::holder(1.0)?)?;
    let alphas = log_grid(1e-6, 1.0, 8);
    let bound = distance_error_bound_check(&op_b, &x_b, &f, &phi, &alphas, 20, seed)?;

    let st = stamp(
        "c8: kkt vs brute force 100 seeds n<=6; profiles; surrogate bound",
        Some(seed),
    );
    sink.json(
        "c8_kkt.json",
        &st,
        &serde_json::json!({
            "worst_abs_difference": worst,
            "instances": 100,
            "max_modes": 6,
        }),
    )?;
    sink.json("c8_bound.json", &st, &bound)?;
    sink.json("c8_profiles.json", &st, &profiles)?;

    let pass = kkt_ok && slope_ok && bound.holds;
    Ok(CheckResult {
        id: 8,
        name: "distance function",
        pass,
        detail: format!(
            "kkt vs reference worst={worst:.2e} (<=1e-6: {kkt_ok}); slopes {:?} (+-0.05: {slope_ok}); surrogate bound holds: {}",
            slopes
                .iter()
                .map(|(nu, s, w)| format!("nu={nu}: {s:.4} want {w:.4}"))
                .collect::<Vec<_>>(),
            bound.holds
        ),
        seconds: t.elapsed().as_secs_f64(),
    })
}

/// Runs checks 1 through 8, writing artifacts into `dir`.
fn run_checks(dir: &Path, seed: u64) -> Result<(Vec<CheckResult>, Vec<String>)> {
    let mut sink = Sink::new(dir)?;
    let mut results = Vec::with_capacity(9);
    results.push(check_generator(&mut sink)?);
    results.push(check_power_rates(&mut sink)?);
    results.push(check_log_rates(&mut sink)?);
    let (c4, noisy_rows) = check_noisy_bracket(&mut sink)?;
    results.push(c4);
    results.push(check_rate_transfer(&mut sink, &noisy_rows)?);
    results.push(check_variational(&mut sink, seed)?);
    results.push(check_witness(&mut sink)?);
    results.push(check_distance(&mut sink, seed)?);
    Ok((results, sink.written))
}

/// Runs the full acceptance suite: checks 1 through 8 into `dir`, then the
/// determinism check (9), which repeats the whole run into a scratch
/// directory and compares every artifact byte for byte. Writes an
/// `acceptance.json` summary last so it never participates in the
/// comparison.
pub fn run_all(dir: &Path, seed: u64) -> Result<Vec<CheckResult>> {
    let (mut results, files) = run_checks(dir, seed)?;

    let t = Instant::now();
    let scratch =
        std::env::temp_dir().join(format!("specreg-determinism-{}-{seed}", std::process::id()));
    if scratch.exists() {
        fs::remove_dir_all(&scratch)?;
    }
    let (_, files_b) = run_checks(&scratch, seed)?;
    let mut pass = files == files_b;
    let mut detail = format!("{} artifacts reproduced byte-identically", files.len());
    if !pass {
        detail = "artifact lists differ between runs".into();
    } else {
        for name in &files {
            let a = fs::read(dir.join(name))?;
            let b = fs::read(scratch.join(name))?;
            if a != b {
                pass = false;
                detail = format!("artifact {name} differs between identical runs");
                break;
            }
        }
    }
    fs::remove_dir_all(&scratch).ok();
    results.push(CheckResult {
        id: 9,
        name: "determinism",
        pass,
        detail,
        seconds: t.elapsed().as_secs_f64(),
    });

    let summary = serde_json::json!({
        "version": crate::output::VERSION,
        "seed": seed,
        "checks": serde_json::to_value(&results)?,
        "all_passed": results.iter().all(|r| r.pass),
    });
    write_json(&dir.join("acceptance.json"), &summary)?;
    Ok(results)
}
