//! Coarse medial-axis detection for finite site sets.
//!
//! The crate answers, for a location `x` and scale `r`, whether `x` looks
//! like a medial-axis point of a site set `K` at resolution `r` (two
//! near-closest sites subtending a wide angle), certifies coarse
//! differentiability of `d(·, K)` by minimax affine fitting, and estimates
//! Carleson packing constants of location/scale sets by Monte Carlo.
//!
//! All numerics are generic over [`Real`]; the aliases at the crate root fix
//! the scalar to `f64`, which is what the command-line harness uses.

pub mod carleson;
pub mod coarse_diff;
pub mod detector;
pub mod error;
pub mod geometry;
pub mod lp;
pub mod rng;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Point = geometry::Point<f64>;
pub type SiteSet = geometry::SiteSet<f64>;
pub type BallSpec = geometry::BallSpec<f64>;
pub type AffineMap = coarse_diff::AffineMap<f64>;
pub type FitResult = coarse_diff::FitResult<f64>;
pub type Certificate = coarse_diff::Certificate<f64>;
pub type GParams = detector::GParams<f64>;
pub type GMembership = detector::GMembership<f64>;
pub type ConsistencyCheck = detector::ConsistencyCheck<f64>;
pub type ScaleGrid = carleson::ScaleGrid<f64>;
pub type CarlesonEstimate = carleson::CarlesonEstimate<f64>;
pub type ConstantEstimate = carleson::ConstantEstimate<f64>;

pub type Point32 = geometry::Point<f32>;
pub type SiteSet32 = geometry::SiteSet<f32>;
pub type BallSpec32 = geometry::BallSpec<f32>;
