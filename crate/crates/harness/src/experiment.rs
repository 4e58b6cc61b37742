//! The full pipeline: scene, membership over the ball family, consistency
//! fits, Carleson estimation.

use std::time::Instant;

use medial_core::carleson::estimate_constant;
use medial_core::detector::{membership, verify_consistency_with_margin};
use medial_core::rng::{derive_seed, stream};
use medial_core::{BallSpec, GMembership, Point, SiteSet};
use rand::Rng;
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::report::{BallRecord, CarlesonRecord, FitCheck, Report, SceneRecord, Summary, Timing};
use crate::scene::generate_scene;

/// Stream labels under the experiment seed.
pub mod streams {
    pub const SCENE: u64 = 1;
    pub const FIT: u64 = 2;
    pub const SELECT: u64 = 3;
    pub const CARLESON: u64 = 4;
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    let started = Instant::now();
    config.validate()?;
    let seed = config.seed;
    let sites = generate_scene(&config.scene, derive_seed(seed, &[streams::SCENE]))?;
    let balls = config.balls.balls()?;
    if let Some(b) = balls.iter().find(|b| b.dim() != sites.dim()) {
        return Err(HarnessError::Config(format!(
            "scene has dimension {} but a ball has dimension {}",
            sites.dim(),
            b.dim()
        )));
    }
    let params = config.params;

    let memberships: Vec<GMembership> = balls
        .par_iter()
        .map(|b| membership(b, &sites, &params))
        .collect::<medial_core::Result<_>>()?;

    let verify = &config.verify;
    let records: Vec<BallRecord> = memberships
        .into_par_iter()
        .enumerate()
        .map(|(index, m)| {
            let check = if verify.enabled
                && selected(m.in_g, verify.unflagged_fraction, seed, index)
            {
                let plan = config.sampling.plan(
                    sites.dim(),
                    derive_seed(seed, &[streams::FIT, index as u64]),
                );
                let c =
                    verify_consistency_with_margin(&sites, &m.ball, &params, &plan, verify.margin)?;
                Some(FitCheck {
                    fit: c.fit,
                    residual_floor: c.residual_floor,
                    consistent: c.consistent,
                })
            } else {
                None
            };
            Ok(BallRecord {
                index,
                membership: m,
                check,
            })
        })
        .collect::<Result<_>>()?;

    let carleson = if config.carleson.enabled {
        Some(carleson(config, &sites, &balls)?)
    } else {
        None
    };

    let summary = summarize(&records, carleson.as_ref());
    Ok(Report {
        schema_version: crate::report::SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        scene: SceneRecord {
            dim: sites.dim(),
            sites,
        },
        balls: records,
        carleson,
        summary,
        timing: Some(Timing {
            wall_clock_seconds: started.elapsed().as_secs_f64(),
        }),
    })
}

fn selected(in_g: bool, fraction: f64, seed: u64, index: usize) -> bool {
    in_g || (fraction > 0.0
        && stream(seed, &[streams::SELECT, index as u64]).gen::<f64>() < fraction)
}

fn carleson(
    config: &ExperimentConfig,
    sites: &SiteSet,
    balls: &[BallSpec],
) -> Result<CarlesonRecord> {
    let c = &config.carleson;
    let ball_indices: Vec<usize> = (0..balls.len()).step_by(c.stride).collect();
    let chosen: Vec<BallSpec> = ball_indices.iter().map(|&i| balls[i].clone()).collect();
    let params = config.params;
    let oracle = |x: &Point, r: f64| {
        BallSpec::new(x.clone(), r)
            .and_then(|b| membership(&b, sites, &params))
            .expect("grid radii are positive and dimensions match")
            .in_g
    };
    let estimate = estimate_constant(
        oracle,
        &chosen,
        c.levels,
        c.per_octave,
        c.samples,
        derive_seed(config.seed, &[streams::CARLESON]),
    )?;
    Ok(CarlesonRecord {
        ball_indices,
        estimate,
    })
}

fn summarize(records: &[BallRecord], carleson: Option<&CarlesonRecord>) -> Summary {
    let in_g = records.iter().filter(|b| b.membership.in_g).count();
    let checks = records.iter().filter_map(|b| b.check.as_ref());
    Summary {
        balls: records.len(),
        in_g,
        not_in_g: records.len() - in_g,
        verified: checks.clone().count(),
        violations: checks.filter(|c| !c.consistent).count(),
        max_constant: carleson.map(|c| c.estimate.sup),
        argmax_ball: carleson.map(|c| c.ball_indices[c.estimate.argsup]),
    }
}
