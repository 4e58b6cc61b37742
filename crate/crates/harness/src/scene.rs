//! Deterministic site-set generators.

use std::f64::consts::TAU;
use std::path::PathBuf;

use medial_core::rng::stream;
use medial_core::{Point, SiteSet};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::points::parse_points;

/// Axis-aligned box `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BBox {
    pub fn unit(dim: usize) -> Self {
        BBox {
            lo: vec![0.0; dim],
            hi: vec![1.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn validate(&self) -> Result<()> {
        let ok = !self.lo.is_empty()
            && self.lo.len() == self.hi.len()
            && self
                .lo
                .iter()
                .zip(&self.hi)
                .all(|(l, h)| l.is_finite() && h.is_finite() && l <= h);
        if ok {
            Ok(())
        } else {
            Err(HarnessError::Config(format!("bad bounding box {self:?}")))
        }
    }
}

fn default_dim() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SceneSpec {
    /// `(±separation/2, 0, …)`.
    TwoPoints {
        separation: f64,
        #[serde(default = "default_dim")]
        dim: usize,
    },
    /// `n` points equally spaced by arclength on a circle about the origin
    /// of the plane, the first at angle 0.
    CircleSamples {
        n: usize,
        radius: f64,
    },
    /// `n` points equally spaced on a segment, endpoints included.
    SegmentSamples {
        n: usize,
        start: Vec<f64>,
        end: Vec<f64>,
    },
    /// `n` uniform points of a box.
    RandomCloud {
        n: usize,
        bbox: BBox,
    },
    /// `per_side` points per axis, spanning the box.
    Grid {
        per_side: usize,
        bbox: BBox,
    },
    Csv {
        path: PathBuf,
    },
    /// Sites listed inline.
    Sites {
        points: Vec<Vec<f64>>,
    },
}

fn bad(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn points(coords: Vec<Vec<f64>>) -> Result<SiteSet> {
    let pts = coords
        .into_iter()
        .map(Point::new)
        .collect::<medial_core::Result<Vec<_>>>()?;
    Ok(SiteSet::new(pts)?)
}

/// Builds the site set for `spec`. Only `random_cloud` consumes `seed`.
pub fn generate_scene(spec: &SceneSpec, seed: u64) -> Result<SiteSet> {
    match spec {
        SceneSpec::TwoPoints { separation, dim } => {
            if !(*separation > 0.0) || !separation.is_finite() || *dim == 0 {
                return Err(bad("two_points needs separation > 0 and dim >= 1"));
            }
            let mut a = vec![0.0; *dim];
            let mut b = vec![0.0; *dim];
            a[0] = -separation / 2.0;
            b[0] = separation / 2.0;
            points(vec![a, b])
        }
        SceneSpec::CircleSamples { n, radius } => {
            if *n == 0 || !(*radius > 0.0) || !radius.is_finite() {
                return Err(bad("circle_samples needs n >= 1 and radius > 0"));
            }
            points(
                (0..*n)
                    .map(|i| {
                        let a = TAU * i as f64 / *n as f64;
                        vec![radius * a.cos(), radius * a.sin()]
                    })
                    .collect(),
            )
        }
        SceneSpec::SegmentSamples { n, start, end } => {
            if *n == 0 || start.len() != end.len() {
                return Err(bad(
                    "segment_samples needs n >= 1 and endpoints of equal dimension",
                ));
            }
            let (a, b) = (Point::new(start.clone())?, Point::new(end.clone())?);
            let pts = (0..*n)
                .map(|i| {
                    let t = if *n == 1 {
                        0.0
                    } else {
                        i as f64 / (*n - 1) as f64
                    };
                    a.lerp(&b, t)
                })
                .collect();
            Ok(SiteSet::new(pts)?)
        }
        SceneSpec::RandomCloud { n, bbox } => {
            bbox.validate()?;
            if *n == 0 {
                return Err(bad("random_cloud needs n >= 1"));
            }
            let mut rng = stream(seed, &[]);
            points(
                (0..*n)
                    .map(|_| {
                        bbox.lo
                            .iter()
                            .zip(&bbox.hi)
                            .map(|(l, h)| l + (h - l) * rng.gen::<f64>())
                            .collect()
                    })
                    .collect(),
            )
        }
        SceneSpec::Grid { per_side, bbox } => {
            bbox.validate()?;
            if *per_side == 0 {
                return Err(bad("grid needs per_side >= 1"));
            }
            let k = bbox.dim();
            let total = per_side
                .checked_pow(k as u32)
                .filter(|&t| t <= 10_000_000)
                .ok_or_else(|| bad("grid too large"))?;
            let axis = |i: usize, idx: usize| {
                let t = if *per_side == 1 {
                    0.5
                } else {
                    idx as f64 / (*per_side - 1) as f64
                };
                bbox.lo[i] + (bbox.hi[i] - bbox.lo[i]) * t
            };
            points(
                (0..total)
                    .map(|mut flat| {
                        (0..k)
                            .map(|i| {
                                let idx = flat % per_side;
                                flat /= per_side;
                                axis(i, idx)
                            })
                            .collect()
                    })
                    .collect(),
            )
        }
        SceneSpec::Csv { path } => parse_points(path),
        SceneSpec::Sites { points: p } => points(p.clone()),
    }
}

impl SceneSpec {
    pub fn is_two_point(&self) -> bool {
        matches!(self, SceneSpec::TwoPoints { .. })
    }
}
