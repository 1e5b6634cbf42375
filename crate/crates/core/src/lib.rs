//! Numerical toolkit for spectral regularization of diagonal linear
//! inverse problems.
//!
//! The crate models a compact operator through its singular values,
//! builds regularization methods from spectral filter families, and
//! measures how fast reconstruction errors decay:
//!
//! - [`filters`]: filter families (Tikhonov, iterated Tikhonov,
//!   Landweber, spectral cutoff, custom closures) and a validator for
//!   the admissibility conditions a family must satisfy.
//! - [`operators`]: diagonal operators, coefficient vectors, and
//!   solutions synthesized so their spectral tail follows a prescribed
//!   index function.
//! - [`rates_exact`]: exact-data error curves over a parameter grid and
//!   power/logarithmic rate fits.
//! - [`rates_noisy`]: the balanced parameter choice for a noise level,
//!   adversarial worst-case noise, two-sided error brackets, and the
//!   rate transfer `psi` from parameter scale to noise scale.
//! - [`spectral_analysis`]: index functions and diagnostic scans
//!   (qualification, subhomogeneity, ratio conditions).
//! - [`source_conditions`]: variational inequality constants, witnesses
//!   against classical source conditions, and distance functions to
//!   smoothness balls.
//! - [`solve`], [`grid`]: bisection on log scales, log-log fitting, and
//!   logarithmic grids shared by everything above.
//!
//! Everything is deterministic: randomized diagnostics take explicit
//! seeds and the library never reads clocks or global RNG state.

// Input checks are written `!(x > 0.0)` so that NaN takes the rejection
// branch; the suggested `x <= 0.0` would wave it through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod filters;
pub mod grid;
pub mod operators;
pub mod rates_exact;
pub mod rates_noisy;
pub mod solve;
pub mod source_conditions;
pub mod spectral_analysis;
mod sums;

pub use error::{Error, Result};
pub use filters::{regularize, validate_generator, ConditionReport, FilterFamily, GeneratorReport};
pub use grid::{log_grid, GridSpec};
pub use operators::{
    apply_forward, make_operator, make_solution_from_profile, spectral_function,
    spectral_function_rows, OperatorKind, SourceProfile, SpectralOperator, SpectralVector,
    MAX_MODES,
};
pub use rates_exact::{
    error_curve, error_exact, fit_log_rate, fit_power_rate, CurveProvenance, CurveRow, ErrorCurve,
    FitWindow, RateFit, MIN_FIT_POINTS,
};
pub use rates_noisy::{
    build_adversarial, phi_tilde, phi_tilde_inv, psi_of_delta, solve_alpha_delta, solve_log_psi,
    worst_case_bracket, AdversarialInstance, BracketOutcome, ImplicitRate, NoisyRateReport,
};
pub use solve::{bisect_log_decreasing, bisect_log_increasing, fit_loglog};
pub use source_conditions::{
    distance_error_bound_check, distance_function, distance_profile, ssc_witness, vi_constant,
    DistanceBoundReport, DistancePoint, DistanceProfile, SscWitness, VariationalReport,
};
pub use spectral_analysis::{
    check_qualification, check_ratio_conditions, check_subhomogeneity, default_log_cap,
    IndexFunction, QualificationReport, RatioBound, RatioConditionReport, SamplePoint,
    SubhomogeneityReport,
};
