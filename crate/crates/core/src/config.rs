//! Run configuration shared by the verification routines and the CLI.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Report-level tolerances. Each value is relative to `‖T‖` (spectral norm)
/// unless its name says otherwise. Kernel tolerances (Hermitian test,
/// orthonormality, Jacobi stopping) are fixed constants in their modules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Riemannian gradient norm at which support ascent stops.
    pub gradient: f64,
    /// `‖Te_j − λ_j e_j‖` allowed at a certified corner.
    pub eigen_residual: f64,
    /// Largest probe derivative counted as "vanishing".
    pub probe: f64,
    /// Permutation-symmetry agreement of support values.
    pub e1_symmetry: f64,
    /// Slack in support domination under compression.
    pub e2_domination: f64,
    /// Agreement between projected and directly computed supports.
    pub e3_projection: f64,
    /// Absolute `σ_min` threshold that the last member of a family must reach.
    pub sigma_threshold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            gradient: 1e-8,
            eigen_residual: 1e-6,
            probe: 1e-6,
            e1_symmetry: 1e-2,
            e2_domination: 1e-6,
            e3_projection: 2e-2,
            sigma_threshold: 1e-2,
        }
    }
}

impl Tolerances {
    /// Applies `name → value` overrides; unknown names and non-positive
    /// values are rejected.
    pub fn with_overrides(mut self, overrides: &BTreeMap<String, f64>) -> Result<Self> {
        for (name, &value) in overrides {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::invalid(format!("tolerance {name} must be positive, got {value}")));
            }
            let slot = match name.as_str() {
                "gradient" => &mut self.gradient,
                "eigen_residual" => &mut self.eigen_residual,
                "probe" => &mut self.probe,
                "e1_symmetry" => &mut self.e1_symmetry,
                "e2_domination" => &mut self.e2_domination,
                "e3_projection" => &mut self.e3_projection,
                "sigma_threshold" => &mut self.sigma_threshold,
                other => return Err(Error::invalid(format!("unknown tolerance name: {other}"))),
            };
            *slot = value;
        }
        Ok(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: usize,
    pub seed: u64,
    pub samples: usize,
    pub restarts: usize,
    /// Cone-test radius; `None` picks 5× the median nearest-neighbour distance.
    pub epsilon: Option<f64>,
    pub delta_min: f64,
    /// Support directions used to add boundary points to a sampled cloud.
    pub boundary_directions: usize,
    /// Random exterior vectors per column in probe reports.
    pub exterior_count: usize,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: 1,
            seed: 0,
            samples: 10_000,
            restarts: 8,
            epsilon: None,
            delta_min: 0.1,
            boundary_directions: 64,
            exterior_count: 4,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.samples == 0 || self.restarts == 0 {
            return Err(Error::invalid("n, samples and restarts must be positive"));
        }
        if !(self.delta_min > 0.0 && self.delta_min <= 1.0) {
            return Err(Error::invalid(format!("delta_min must lie in (0, 1], got {}", self.delta_min)));
        }
        if let Some(eps) = self.epsilon {
            if !(eps.is_finite() && eps > 0.0) {
                return Err(Error::invalid(format!("epsilon must be positive, got {eps}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_apply_and_reject_unknown() {
        let mut map = BTreeMap::new();
        map.insert("probe".to_string(), 1e-4);
        let t = Tolerances::default().with_overrides(&map).unwrap();
        assert_eq!(t.probe, 1e-4);
        map.insert("bogus".to_string(), 1.0);
        assert!(Tolerances::default().with_overrides(&map).is_err());
        let mut neg = BTreeMap::new();
        neg.insert("probe".to_string(), -1.0);
        assert!(Tolerances::default().with_overrides(&neg).is_err());
    }

    #[test]
    fn run_config_validation() {
        assert!(RunConfig::default().validate().is_ok());
        let bad = RunConfig { delta_min: 0.0, ..RunConfig::default() };
        assert!(bad.validate().is_err());
        let bad = RunConfig { epsilon: Some(-1.0), ..RunConfig::default() };
        assert!(bad.validate().is_err());
    }
}
