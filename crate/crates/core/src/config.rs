//! Run configuration read from `--config FILE` (JSON). Unknown keys are
//! rejected; every tolerance and cap must be positive.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cone::{ConeTolerances, DualCaps};
use crate::error::{Error, Result};
use crate::order::{BRIDGE_CAP, SUBSET_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Cone membership residual.
    pub feasibility: f64,
    /// Ray-set equality (self-duality).
    pub ray_equality: f64,
    /// Ray deduplication.
    pub angular: f64,
    /// Light-cone boundary band (absolute).
    pub boundary: f64,
    /// Relative `A^T eta A = c eta` deviation for Zeeman factorization.
    pub zeeman: f64,
    /// Orbit reconstruction residual.
    pub orbit: f64,
    /// `A^T eta A = eta` check.
    pub pseudo_orthogonal: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        let c = ConeTolerances::default();
        Tolerances {
            feasibility: c.feasibility,
            ray_equality: c.ray_equality,
            angular: c.angular,
            boundary: 1e-12,
            zeeman: 1e-9,
            orbit: 1e-9,
            pseudo_orthogonal: 1e-9,
        }
    }
}

impl Tolerances {
    pub fn cone(&self) -> ConeTolerances {
        ConeTolerances {
            feasibility: self.feasibility,
            ray_equality: self.ray_equality,
            angular: self.angular,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Caps {
    pub subset: usize,
    pub bridge: usize,
    pub dual_dim: usize,
    pub dual_rays: usize,
    /// Default Monte Carlo pair count for causality checks.
    pub samples: usize,
}

impl Default for Caps {
    fn default() -> Self {
        let d = DualCaps::default();
        Caps {
            subset: SUBSET_CAP,
            bridge: BRIDGE_CAP,
            dual_dim: d.max_dim,
            dual_rays: d.max_rays,
            samples: 10_000,
        }
    }
}

impl Caps {
    pub fn dual(&self) -> DualCaps {
        DualCaps {
            max_dim: self.dual_dim,
            max_rays: self.dual_rays,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub tolerances: Tolerances,
    pub caps: Caps,
    pub seed: Option<u64>,
    pub output_format: OutputFormat,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let c: Config = serde_json::from_str(text).map_err(|e| Error::Input(format!("config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        let named = [
            ("feasibility", t.feasibility),
            ("ray_equality", t.ray_equality),
            ("angular", t.angular),
            ("boundary", t.boundary),
            ("zeeman", t.zeeman),
            ("orbit", t.orbit),
            ("pseudo_orthogonal", t.pseudo_orthogonal),
        ];
        for (name, v) in named {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Input(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        let c = &self.caps;
        for (name, v) in [
            ("subset", c.subset),
            ("bridge", c.bridge),
            ("dual_dim", c.dual_dim),
            ("dual_rays", c.dual_rays),
            ("samples", c.samples),
        ] {
            if v == 0 {
                return Err(Error::Input(format!("cap {name} must be positive")));
            }
        }
        Ok(())
    }
}
