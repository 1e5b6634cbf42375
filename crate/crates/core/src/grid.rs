//! Logarithmic grids for sweeps over regularization parameters, noise
//! levels, and spectra.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A log-spaced grid described by its endpoints and density.
///
/// `build` produces ascending points from `min` to `max` with roughly
/// `per_decade` points per factor of ten; both endpoints are always
/// included.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub min: f64,
    pub max: f64,
    pub per_decade: u32,
}

impl GridSpec {
    pub fn new(min: f64, max: f64, per_decade: u32) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min <= 0.0 || max < min {
            return Err(Error::InvalidArgument(format!(
                "grid endpoints must satisfy 0 < min <= max, got [{min:e}, {max:e}]"
            )));
        }
        if per_decade == 0 {
            return Err(Error::InvalidArgument(
                "grid density must be at least one point per decade".into(),
            ));
        }
        Ok(Self {
            min,
            max,
            per_decade,
        })
    }

    /// Validates the fields of a deserialized spec.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.min, self.max, self.per_decade).map(|_| ())
    }

    pub fn build(&self) -> Vec<f64> {
        log_grid(self.min, self.max, self.per_decade)
    }
}

/// Ascending log-spaced points covering `[min, max]`.
///
/// The caller is expected to pass validated endpoints; see [`GridSpec`].
pub fn log_grid(min: f64, max: f64, per_decade: u32) -> Vec<f64> {
    let lg_min = min.log10();
    let lg_max = max.log10();
    let decades = lg_max - lg_min;
    let n = (decades * f64::from(per_decade)).round() as usize + 1;
    if n <= 1 || decades <= 0.0 {
        return vec![min];
    }
    let step = decades / (n - 1) as f64;
    let mut points: Vec<f64> = (0..n)
        .map(|k| 10f64.powf(lg_min + k as f64 * step))
        .collect();
    // Pin the endpoints so window filters see them exactly.
    points[0] = min;
    points[n - 1] = max;
    points
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_includes_endpoints() {
        let g = log_grid(1e-7, 1e-2, 50);
        assert_eq!(g.len(), 251);
        assert_eq!(g[0], 1e-7);
        assert_eq!(g[250], 1e-2);
    }

    #[test]
    fn grid_is_strictly_increasing() {
        let g = log_grid(1e-9, 10.0, 50);
        for w in g.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn degenerate_grid_is_a_single_point() {
        assert_eq!(log_grid(0.5, 0.5, 10), vec![0.5]);
    }

    #[test]
    fn spec_rejects_bad_endpoints() {
        assert!(GridSpec::new(0.0, 1.0, 10).is_err());
        assert!(GridSpec::new(2.0, 1.0, 10).is_err());
        assert!(GridSpec::new(1.0, 2.0, 0).is_err());
        assert!(GridSpec::new(f64::NAN, 2.0, 10).is_err());
    }

    #[test]
    fn density_matches_request() {
        let g = log_grid(1e-4, 1e0, 10);
        assert_eq!(g.len(), 41);
        let ratio = g[1] / g[0];
        assert!((ratio.log10() - 0.1).abs() < 1e-12);
    }
}
