//! Scenes, configuration, experiment pipeline, reports and figures around
//! `medial-core`.

pub mod config;
pub mod error;
pub mod experiment;
pub mod points;
pub mod report;
pub mod scene;
pub mod svg;

pub use config::ExperimentConfig;
pub use error::{HarnessError, Result};
pub use experiment::run_experiment;
pub use report::Report;
pub use scene::{generate_scene, SceneSpec};
