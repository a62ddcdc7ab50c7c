//! Run configuration: tolerances, orders and depths shared by all subcommands.

use std::path::{Path, PathBuf};

use holorigid_core::rigidity::VerdictConfig;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::failure::Failure;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Root polishing residual for periodic orbits.
    pub orbit: f64,
    pub livshitz: f64,
    pub multiplier: f64,
    /// Bisection width for Bowen's equation.
    pub dimension: f64,
    /// Absent: chosen from the interval widths of the model.
    pub affine: Option<f64>,
    pub compare: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { orbit: 1e-9, livshitz: 1e-9, multiplier: 1e-8, dimension: 1e-10, affine: None, compare: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub tolerances: Tolerances,
    pub pressure_order: usize,
    /// Longest period for spectra and periodic-word tests.
    pub max_period: usize,
    pub cell_size: f64,
    pub critical_radius: f64,
    pub julia_depth: usize,
    pub max_cycle_len: usize,
    pub anchor_count: usize,
    pub anchor_max_period: usize,
    pub radius_fraction: f64,
    pub guard_fraction: f64,
    pub bridge_depth: usize,
    pub word_max_period: Option<usize>,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let v = VerdictConfig::default();
        RunConfig {
            tolerances: Tolerances::default(),
            pressure_order: 12,
            max_period: 6,
            cell_size: 0.05,
            critical_radius: 0.3,
            julia_depth: 30,
            max_cycle_len: v.max_cycle_len,
            anchor_count: v.anchor_count,
            anchor_max_period: v.anchor_max_period,
            radius_fraction: v.radius_fraction,
            guard_fraction: v.guard_fraction,
            bridge_depth: v.bridge_depth,
            word_max_period: v.word_max_period,
            out_dir: PathBuf::from("out"),
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
        let cfg: RunConfig = crate::output::parse_json(path, &text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), Failure> {
        let t = &self.tolerances;
        let positive = [
            ("tolerances.orbit", Some(t.orbit)),
            ("tolerances.livshitz", Some(t.livshitz)),
            ("tolerances.multiplier", Some(t.multiplier)),
            ("tolerances.dimension", Some(t.dimension)),
            ("tolerances.affine", t.affine),
            ("tolerances.compare", t.compare),
            ("cell_size", Some(self.cell_size)),
            ("critical_radius", Some(self.critical_radius)),
            ("radius_fraction", Some(self.radius_fraction)),
            ("guard_fraction", Some(self.guard_fraction)),
        ];
        for (field, v) in positive {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Failure::input(format!("{field}: must be positive, got {v}")));
                }
            }
        }
        let depths = [
            ("pressure_order", Some(self.pressure_order)),
            ("max_period", Some(self.max_period)),
            ("julia_depth", Some(self.julia_depth)),
            ("max_cycle_len", Some(self.max_cycle_len)),
            ("anchor_count", Some(self.anchor_count)),
            ("anchor_max_period", Some(self.anchor_max_period)),
            ("bridge_depth", Some(self.bridge_depth)),
            ("word_max_period", self.word_max_period),
        ];
        for (field, v) in depths {
            if v == Some(0) {
                return Err(Failure::input(format!("{field}: must be at least 1")));
            }
        }
        Ok(())
    }

    /// Hash of every setting that can change results; the output directory
    /// is excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out_dir = PathBuf::new();
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn verdict(&self) -> VerdictConfig {
        VerdictConfig {
            anchor_count: self.anchor_count,
            anchor_max_period: self.anchor_max_period,
            radius_fraction: self.radius_fraction,
            guard_fraction: self.guard_fraction,
            bridge_depth: self.bridge_depth,
            word_max_period: self.word_max_period,
            max_cycle_len: self.max_cycle_len,
            tol: self.tolerances.compare,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let mut c = RunConfig::default();
        c.tolerances.affine = Some(1e-7);
        c.word_max_period = Some(9);
        c.seed = 42;
        let s = serde_json::to_string(&c).unwrap();
        let back: RunConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(serde_json::to_string(&back).unwrap(), s);
    }

    #[test]
    fn hash_ignores_out_dir() {
        let a = RunConfig::default();
        let b = RunConfig { out_dir: "elsewhere".into(), ..RunConfig::default() };
        assert_eq!(a.hash(), b.hash());
        let c = RunConfig { seed: 1, ..RunConfig::default() };
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn validation_names_the_field() {
        let mut c = RunConfig::default();
        c.tolerances.livshitz = 0.0;
        assert!(c.validate().unwrap_err().message.starts_with("tolerances.livshitz"));
        let c = RunConfig { bridge_depth: 0, ..RunConfig::default() };
        assert!(c.validate().unwrap_err().message.starts_with("bridge_depth"));
    }
}
