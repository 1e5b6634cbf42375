//! Experiment configuration: a strict JSON schema with one optional block
//! per ingredient. Each subcommand demands the blocks it needs and
//! rejects files with unknown keys, so a typo fails loudly instead of
//! silently skewing a rate experiment.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;

use specreg::{
    make_solution_from_profile, FilterFamily, FitWindow, GridSpec, IndexFunction, SourceProfile,
    SpectralOperator, SpectralVector,
};

use crate::output;

/// Diagonal operator description.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    /// `polynomial` (needs `p`) or `exponential` (needs `gamma`).
    pub kind: String,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub gamma: Option<f64>,
    pub n: usize,
}

impl OperatorSpec {
    pub fn build(&self) -> Result<SpectralOperator> {
        match self.kind.as_str() {
            "polynomial" => {
                let p = self
                    .p
                    .ok_or_else(|| anyhow!("operator kind 'polynomial' needs a 'p' value"))?;
                if self.gamma.is_some() {
                    bail!("operator kind 'polynomial' does not take 'gamma'");
                }
                Ok(SpectralOperator::polynomial(p, self.n)?)
            }
            "exponential" => {
                let gamma = self
                    .gamma
                    .ok_or_else(|| anyhow!("operator kind 'exponential' needs a 'gamma' value"))?;
                if self.p.is_some() {
                    bail!("operator kind 'exponential' does not take 'p'");
                }
                Ok(SpectralOperator::exponential(gamma, self.n)?)
            }
            other => bail!("unknown operator kind '{other}'; expected polynomial or exponential"),
        }
    }
}

fn default_scale() -> f64 {
    1.0
}

/// Solution profile: the spectral tail target and its scale.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    /// Index function spec, e.g. `holder:1`, `log:0.5`, `log:0.5:0.1`.
    pub target: String,
    #[serde(default = "default_scale")]
    pub scale: f64,
}

impl ProfileSpec {
    pub fn build(&self) -> Result<SourceProfile> {
        let target = IndexFunction::parse(&self.target)?;
        Ok(SourceProfile::new(target, self.scale)?)
    }
}

/// Top-level experiment configuration. All blocks are optional at parse
/// time; each subcommand requires its own subset.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub operator: Option<OperatorSpec>,
    #[serde(default)]
    pub profile: Option<ProfileSpec>,
    /// Filter family spec, e.g. `tikhonov`, `itik:3`, `landweber`, `cutoff:2`.
    #[serde(default)]
    pub filter: Option<String>,
    #[serde(default)]
    pub alpha_grid: Option<GridSpec>,
    #[serde(default)]
    pub lambda_grid: Option<GridSpec>,
    /// Parameter scan for noisy experiments.
    #[serde(default)]
    pub scan_grid: Option<GridSpec>,
    #[serde(default)]
    pub window: Option<FitWindow>,
    /// `power` or `log` (the latter reads `nu`).
    #[serde(default)]
    pub rate_model: Option<String>,
    /// Benchmark index function spec for source-condition diagnostics.
    #[serde(default)]
    pub phi: Option<String>,
    #[serde(default)]
    pub nu: Option<f64>,
    #[serde(default)]
    pub deltas: Option<Vec<f64>>,
    #[serde(default)]
    pub delta_grid: Option<GridSpec>,
    #[serde(default)]
    pub radius_grid: Option<GridSpec>,
    /// Truncation dimensions for source-condition witnesses.
    #[serde(default)]
    pub dims: Option<Vec<usize>>,
    #[serde(default)]
    pub random_samples: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// A parsed configuration together with its raw text and hash.
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub hash: String,
}

pub fn load(path: &Path) -> Result<LoadedConfig> {
    let raw = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    let config: ExperimentConfig =
        serde_json::from_str(&raw).with_context(|| format!("invalid config {}", path.display()))?;
    let hash = output::config_hash(&raw);
    Ok(LoadedConfig { config, hash })
}

impl ExperimentConfig {
    pub fn operator(&self) -> Result<SpectralOperator> {
        self.operator
            .as_ref()
            .ok_or_else(|| anyhow!("config needs an 'operator' block"))?
            .build()
    }

    pub fn solution(&self, op: &SpectralOperator) -> Result<SpectralVector> {
        let profile = self
            .profile
            .as_ref()
            .ok_or_else(|| anyhow!("config needs a 'profile' block"))?
            .build()?;
        Ok(make_solution_from_profile(op, &profile)?)
    }

    pub fn filter(&self) -> Result<FilterFamily> {
        let spec = self
            .filter
            .as_ref()
            .ok_or_else(|| anyhow!("config needs a 'filter' entry"))?;
        Ok(FilterFamily::parse(spec)?)
    }

    pub fn phi(&self) -> Result<IndexFunction> {
        let spec = self
            .phi
            .as_ref()
            .ok_or_else(|| anyhow!("config needs a 'phi' entry"))?;
        Ok(IndexFunction::parse(spec)?)
    }

    pub fn nu(&self) -> Result<f64> {
        self.nu.ok_or_else(|| anyhow!("config needs a 'nu' entry"))
    }

    pub fn grid(&self, which: &str) -> Result<Vec<f64>> {
        let spec = match which {
            "alpha_grid" => &self.alpha_grid,
            "lambda_grid" => &self.lambda_grid,
            "scan_grid" => &self.scan_grid,
            "radius_grid" => &self.radius_grid,
            other => bail!("unknown grid '{other}'"),
        };
        let spec = spec
            .as_ref()
            .ok_or_else(|| anyhow!("config needs a '{which}' block"))?;
        spec.validate()?;
        Ok(spec.build())
    }

    pub fn window(&self) -> Result<FitWindow> {
        let w = self
            .window
            .as_ref()
            .ok_or_else(|| anyhow!("config needs a 'window' block"))?;
        w.validate()?;
        Ok(*w)
    }

    /// Noise levels: an explicit list or a log grid.
    pub fn deltas(&self) -> Result<Vec<f64>> {
        match (&self.deltas, &self.delta_grid) {
            (Some(list), None) => {
                if list.is_empty() || list.iter().any(|&d| !(d > 0.0) || !d.is_finite()) {
                    bail!("'deltas' must be a non-empty list of positive values");
                }
                Ok(list.clone())
            }
            (None, Some(grid)) => {
                grid.validate()?;
                Ok(grid.build())
            }
            (Some(_), Some(_)) => bail!("give either 'deltas' or 'delta_grid', not both"),
            (None, None) => bail!("config needs 'deltas' or 'delta_grid'"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_rate_config_parses() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{
                "operator": {"kind": "polynomial", "p": 1.0, "n": 100},
                "profile": {"target": "holder:1"},
                "filter": "tikhonov",
                "alpha_grid": {"min": 1e-6, "max": 1e-1, "per_decade": 10},
                "window": {"min": 1e-5, "max": 1e-2}
            }"#,
        )
        .unwrap();
        let op = cfg.operator().unwrap();
        assert_eq!(op.len(), 100);
        let x = cfg.solution(&op).unwrap();
        assert!(x.norm() > 0.0);
        cfg.filter().unwrap();
        assert_eq!(cfg.grid("alpha_grid").unwrap().len(), 51);
        cfg.window().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected_by_name() {
        let err = serde_json::from_str::<ExperimentConfig>(r#"{"operater": {}}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("operater"), "{err}");
        let err = serde_json::from_str::<ExperimentConfig>(
            r#"{"operator": {"kind": "polynomial", "p": 1.0, "n": 5, "pp": 2}}"#,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("pp"), "{err}");
    }

    #[test]
    fn operator_kinds_demand_their_parameter() {
        let poly: OperatorSpec = serde_json::from_str(r#"{"kind": "polynomial", "n": 5}"#).unwrap();
        assert!(poly.build().unwrap_err().to_string().contains("'p'"));
        let exp: OperatorSpec =
            serde_json::from_str(r#"{"kind": "exponential", "gamma": 0.1, "n": 5}"#).unwrap();
        assert_eq!(exp.build().unwrap().len(), 5);
        let bad: OperatorSpec = serde_json::from_str(r#"{"kind": "dense", "n": 5}"#).unwrap();
        assert!(bad.build().is_err());
    }

    #[test]
    fn deltas_and_grid_are_mutually_exclusive() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"deltas": [0.1], "delta_grid": {"min": 1e-4, "max": 1e-2, "per_decade": 5}}"#,
        )
        .unwrap();
        assert!(cfg.deltas().is_err());
        let cfg: ExperimentConfig = serde_json::from_str(r#"{"deltas": [0.1, 0.01]}"#).unwrap();
        assert_eq!(cfg.deltas().unwrap().len(), 2);
        let cfg: ExperimentConfig = serde_json::from_str(r#"{}"#).unwrap();
        assert!(cfg.deltas().is_err());
    }

    #[test]
    fn missing_blocks_name_themselves() {
        let cfg = ExperimentConfig::default();
        assert!(cfg.operator().unwrap_err().to_string().contains("operator"));
        assert!(cfg.filter().unwrap_err().to_string().contains("filter"));
        assert!(cfg.phi().unwrap_err().to_string().contains("phi"));
        assert!(cfg.window().unwrap_err().to_string().contains("window"));
        assert!(cfg
            .grid("scan_grid")
            .unwrap_err()
            .to_string()
            .contains("scan_grid"));
    }
}
