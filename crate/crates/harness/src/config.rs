//! Experiment configuration, read from JSON.

use std::path::{Path, PathBuf};

use medial_core::carleson::{DEFAULT_LEVELS, DEFAULT_PER_OCTAVE, DEFAULT_SLICE_SAMPLES};
use medial_core::coarse_diff::{SamplePlan, SampleStrategy, DEFAULT_BOUNDARY_FRACTION};
use medial_core::detector::DEFAULT_MARGIN;
use medial_core::{BallSpec, GParams, Point};
use serde::{Deserialize, Serialize};

use crate::error::{io_err, HarnessError, Result};
use crate::scene::{BBox, SceneSpec};

/// Upper limit on lattice size, to fail fast on typos.
pub const MAX_LATTICE_BALLS: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scene: SceneSpec,
    pub params: GParams,
    pub balls: BallFamily,
    #[serde(default)]
    pub sampling: SamplingConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub carleson: CarlesonConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub outputs: Outputs,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BallFamily {
    Explicit {
        balls: Vec<BallSpec>,
    },
    /// For octave `o` in `0..octaves`, radius `L = top_radius / 2^o` and
    /// centers on the grid `lo + i L/4` inside `bbox`.
    Lattice {
        bbox: BBox,
        top_radius: f64,
        octaves: usize,
    },
}

impl BallFamily {
    pub fn dim(&self) -> Option<usize> {
        match self {
            BallFamily::Explicit { balls } => balls.first().map(BallSpec::dim),
            BallFamily::Lattice { bbox, .. } => Some(bbox.dim()),
        }
    }

    pub fn balls(&self) -> Result<Vec<BallSpec>> {
        let out = match self {
            BallFamily::Explicit { balls } => balls.clone(),
            BallFamily::Lattice {
                bbox,
                top_radius,
                octaves,
            } => lattice(bbox, *top_radius, *octaves)?,
        };
        if out.is_empty() {
            return Err(HarnessError::Config("ball family is empty".into()));
        }
        Ok(out)
    }
}

fn lattice(bbox: &BBox, top: f64, octaves: usize) -> Result<Vec<BallSpec>> {
    bbox.validate()?;
    if !(top > 0.0) || !top.is_finite() || octaves == 0 {
        return Err(HarnessError::Config(
            "lattice needs top_radius > 0 and octaves >= 1".into(),
        ));
    }
    let k = bbox.dim();
    let mut out = Vec::new();
    for o in 0..octaves {
        let radius = top / 2f64.powi(o as i32);
        let step = radius / 4.0;
        let counts: Vec<usize> = bbox
            .lo
            .iter()
            .zip(&bbox.hi)
            .map(|(l, h)| ((h - l) / step * (1.0 + 1e-12)).floor() as usize + 1)
            .collect();
        let total = counts
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c))
            .filter(|&t| out.len() + t <= MAX_LATTICE_BALLS)
            .ok_or_else(|| {
                HarnessError::Config(format!("lattice exceeds {MAX_LATTICE_BALLS} balls"))
            })?;
        for mut flat in 0..total {
            let center = (0..k)
                .map(|i| {
                    let idx = flat % counts[i];
                    flat /= counts[i];
                    bbox.lo[i] + idx as f64 * step
                })
                .collect();
            out.push(BallSpec::new(Point::new(center)?, radius)?);
        }
    }
    Ok(out)
}

/// Fit sample plan; its seed is derived from the experiment seed per ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingConfig {
    pub strategy: SampleStrategy,
    /// `None` uses `max(500, 50 k)`.
    pub n: Option<usize>,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            strategy: SampleStrategy::BoundaryMix {
                boundary_fraction: DEFAULT_BOUNDARY_FRACTION,
            },
            n: None,
        }
    }
}

impl SamplingConfig {
    pub fn plan(&self, dim: usize, seed: u64) -> SamplePlan {
        let n = self.n.unwrap_or(SamplePlan::default_for_dim(dim, seed).n);
        SamplePlan::new(self.strategy, n, seed)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub enabled: bool,
    /// Fraction of balls outside G that are also fitted, chosen by a seeded
    /// draw per ball. Every ball in G is always fitted.
    pub unflagged_fraction: f64,
    pub margin: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            enabled: true,
            unflagged_fraction: 0.1,
            margin: DEFAULT_MARGIN,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CarlesonConfig {
    pub enabled: bool,
    pub levels: usize,
    pub per_octave: usize,
    /// Monte Carlo points per scale slice.
    pub samples: usize,
    /// Estimate on every `stride`-th ball of the family.
    pub stride: usize,
}

impl Default for CarlesonConfig {
    fn default() -> Self {
        CarlesonConfig {
            enabled: true,
            levels: DEFAULT_LEVELS,
            per_octave: DEFAULT_PER_OCTAVE,
            samples: DEFAULT_SLICE_SAMPLES,
            stride: 1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    pub report: Option<PathBuf>,
    pub summary_csv: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    /// Two sites at (±1, 0), ε = 0, δ = 0.1, two octaves of balls over
    /// `[-2, 2]²` starting at radius 1; Carleson estimates on every 16th
    /// ball with 1024 points per slice.
    fn default() -> Self {
        ExperimentConfig {
            scene: SceneSpec::TwoPoints {
                separation: 2.0,
                dim: 2,
            },
            params: GParams::new(0.0, 0.1).expect("valid defaults"),
            balls: BallFamily::Lattice {
                bbox: BBox {
                    lo: vec![-2.0, -2.0],
                    hi: vec![2.0, 2.0],
                },
                top_radius: 1.0,
                octaves: 2,
            },
            sampling: SamplingConfig::default(),
            verify: VerifyConfig::default(),
            carleson: CarlesonConfig {
                samples: 1024,
                stride: 16,
                ..CarlesonConfig::default()
            },
            seed: 0,
            outputs: Outputs::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_json(&text)
    }

    /// Checks what serde cannot: nonempty ball family, sane sampling and
    /// Carleson settings, writable output locations. GParams are validated on
    /// construction.
    pub fn validate(&self) -> Result<()> {
        let cfg_err = |m: String| Err(HarnessError::Config(m));
        if let BallFamily::Explicit { balls } = &self.balls {
            if balls.is_empty() {
                return cfg_err("ball family is empty".into());
            }
            if balls.iter().any(|b| b.dim() != balls[0].dim()) {
                return cfg_err("balls of mixed dimension".into());
            }
        }
        if let Some(k) = self.balls.dim() {
            self.sampling.plan(k, 0).validate(k)?;
        }
        if !(0.0..=1.0).contains(&self.verify.unflagged_fraction) {
            return cfg_err("verify.unflagged_fraction must lie in [0, 1]".into());
        }
        if !(0.0..1.0).contains(&self.verify.margin) {
            return cfg_err("verify.margin must lie in [0, 1)".into());
        }
        let c = &self.carleson;
        if c.enabled && (c.levels == 0 || c.per_octave == 0 || c.samples == 0 || c.stride == 0) {
            return cfg_err(
                "carleson levels, per_octave, samples and stride must be positive".into(),
            );
        }
        for path in [
            &self.outputs.report,
            &self.outputs.summary_csv,
            &self.outputs.svg,
        ]
        .into_iter()
        .flatten()
        {
            let parent = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            if !parent.is_dir() {
                return cfg_err(format!(
                    "output directory {} does not exist",
                    parent.display()
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "scene": {"kind": "two_points", "separation": 2},
        "params": {"epsilon": 0.0, "delta": 0.1},
        "balls": {"kind": "lattice", "bbox": {"lo": [-1, -1], "hi": [1, 1]}, "top_radius": 1, "octaves": 2}
    }"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
        assert_eq!(cfg.seed, 0);
        assert!(cfg.verify.enabled && cfg.carleson.enabled);
        // Octave 0: spacing 1/4 over [-1, 1] gives 9 per axis; octave 1: 17.
        assert_eq!(cfg.balls.balls().unwrap().len(), 81 + 289);
    }

    #[test]
    fn rejects_invalid_params_and_unknown_fields() {
        let bad = MINIMAL.replace("\"delta\": 0.1", "\"delta\": 0.6");
        assert!(ExperimentConfig::from_json(&bad).is_err());
        let extra = MINIMAL
            .replace("\"seed\"", "x")
            .replacen('{', "{\"bogus\": 1,", 1);
        assert!(ExperimentConfig::from_json(&extra).is_err());
    }

    #[test]
    fn rejects_missing_output_dir() {
        let mut cfg = ExperimentConfig::from_json(MINIMAL).unwrap();
        cfg.outputs.report = Some("/definitely/not/here/report.json".into());
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn explicit_family_must_be_nonempty() {
        let cfg = MINIMAL.replace(
            r#"{"kind": "lattice", "bbox": {"lo": [-1, -1], "hi": [1, 1]}, "top_radius": 1, "octaves": 2}"#,
            r#"{"kind": "explicit", "balls": []}"#,
        );
        assert!(ExperimentConfig::from_json(&cfg).is_err());
    }
}
