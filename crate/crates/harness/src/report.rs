//! Experiment reports: JSON with a schema version, plus a per-ball CSV table.

use std::io::Write;
use std::path::Path;

use medial_core::{Certificate, ConstantEstimate, GMembership, SiteSet};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{io_err, Result};

/// Bumped on any incompatible change to the report layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub scene: SceneRecord,
    pub balls: Vec<BallRecord>,
    pub carleson: Option<CarlesonRecord>,
    pub summary: Summary,
    /// The only field that varies between identical runs.
    pub timing: Option<Timing>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SceneRecord {
    pub dim: usize,
    pub sites: SiteSet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallRecord {
    pub index: usize,
    pub membership: GMembership,
    pub check: Option<FitCheck>,
}

/// Sampled fit on a ball, compared against the membership verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitCheck {
    pub fit: Certificate,
    pub residual_floor: f64,
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarlesonRecord {
    /// Family indices of the balls estimated, in the order of `estimate.per_ball`.
    pub ball_indices: Vec<usize>,
    pub estimate: ConstantEstimate,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub balls: usize,
    pub in_g: usize,
    pub not_in_g: usize,
    pub verified: usize,
    /// Flagged balls whose sampled residual fell to or below the floor.
    pub violations: usize,
    pub max_constant: Option<f64>,
    pub argmax_ball: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_clock_seconds: f64,
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(io_err(path))
    }

    /// Copy with the timing field cleared, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        Report {
            timing: None,
            ..self.clone()
        }
    }

    pub fn flagged(&self) -> impl Iterator<Item = &BallRecord> {
        self.balls.iter().filter(|b| b.membership.in_g)
    }

    /// One row per ball: center, radius, membership fields, fit residual and
    /// Carleson constant when available.
    pub fn write_summary_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut constants = vec![None; self.balls.len()];
        if let Some(c) = &self.carleson {
            for (&i, e) in c.ball_indices.iter().zip(&c.estimate.per_ball) {
                constants[i] = Some(e.constant);
            }
        }
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = vec!["index".into()];
        header.extend((0..self.scene.dim).map(|i| format!("x{i}")));
        header.extend(
            [
                "radius",
                "d_xk",
                "near_set_size",
                "theta_max",
                "theta_star",
                "in_g",
                "decision",
                "sampled_residual",
                "residual_floor",
                "consistent",
                "carleson_constant",
            ]
            .map(String::from),
        );
        w.write_record(&header)?;
        let opt = |v: Option<String>| v.unwrap_or_default();
        for (b, c) in self.balls.iter().zip(&constants) {
            let m = &b.membership;
            let mut row = vec![b.index.to_string()];
            row.extend(m.ball.center().coords().iter().map(f64::to_string));
            row.extend([
                m.ball.radius().to_string(),
                m.d_xk.to_string(),
                m.near_set_size.to_string(),
                m.theta_max.to_string(),
                m.theta_star.to_string(),
                m.in_g.to_string(),
                serde_json::to_value(m.decision)?
                    .as_str()
                    .unwrap_or_default()
                    .to_string(),
                opt(b.check.as_ref().map(|f| f.fit.sampled_residual.to_string())),
                opt(b.check.as_ref().map(|f| f.residual_floor.to_string())),
                opt(b.check.as_ref().map(|f| f.consistent.to_string())),
                opt(c.map(|v| v.to_string())),
            ]);
            w.write_record(&row)?;
        }
        w.flush().map_err(io_err("<summary csv>"))?;
        Ok(())
    }

    pub fn save_summary_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(io_err(path))?;
        self.write_summary_csv(std::io::BufWriter::new(file))
    }
}
