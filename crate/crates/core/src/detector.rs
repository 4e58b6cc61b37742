//! Balls that look like medial-axis points at a given resolution.
//!
//! A pair (x, r) belongs to the bad set G when `0 < r < d(x, K)` and two
//! sites within `d(x, K) + εr` of x subtend an angle at x larger than
//! θ*(δ, ε) = arccos(2((1 − (2δ + ε)) / (1 + 2δ))² − 1). Any such ball
//! cannot carry a δ-accurate affine approximation of `d(·, K)`;
//! [`verify_consistency`] checks that implication on sampled fits.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coarse_diff::{coarse_diff_test, Certificate, SamplePlan};
use crate::error::{Error, Result};
use crate::geometry::{max_pairwise_angle, norm, tie_tolerance, BallSpec, Point, SiteSet};
use crate::rng::derive_seed;
use crate::scalar::Real;

/// Default relative margin applied to the residual threshold in
/// [`verify_consistency`].
pub const DEFAULT_MARGIN: f64 = 0.05;

/// Membership parameters, constrained to `ε ≥ 0`, `δ > 0`, `2δ + ε < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams<T>", into = "RawParams<T>")]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct GParams<T> {
    epsilon: T,
    delta: T,
}

#[derive(Clone, Copy, Serialize, Deserialize)]
struct RawParams<T> {
    epsilon: T,
    delta: T,
}

impl<T: Real> GParams<T> {
    pub fn new(epsilon: T, delta: T) -> Result<Self> {
        let ok = epsilon >= T::zero()
            && delta > T::zero()
            && epsilon.is_finite()
            && delta.is_finite()
            && delta + delta + epsilon < T::one();
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "need eps >= 0, delta > 0 and 2 delta + eps < 1; got eps = {epsilon}, delta = {delta}"
            )));
        }
        Ok(GParams { epsilon, delta })
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    pub fn with_delta(&self, delta: T) -> Result<Self> {
        GParams::new(self.epsilon, delta)
    }
}

impl<T: Real> TryFrom<RawParams<T>> for GParams<T> {
    type Error = Error;

    fn try_from(raw: RawParams<T>) -> Result<Self> {
        GParams::new(raw.epsilon, raw.delta)
    }
}

impl<T> From<GParams<T>> for RawParams<T> {
    fn from(p: GParams<T>) -> Self {
        RawParams {
            epsilon: p.epsilon,
            delta: p.delta,
        }
    }
}

/// The angle threshold θ*(δ, ε), in radians.
pub fn theta_star<T: Real>(params: &GParams<T>) -> T {
    let (e, d) = (params.epsilon, params.delta);
    let two = T::lit(2.0);
    let ratio = (T::one() - (two * d + e)) / (T::one() + two * d);
    let c = two * ratio * ratio - T::one();
    c.max(-T::one()).min(T::one()).acos()
}

/// Checked variant for raw parameter values.
pub fn theta_star_checked<T: Real>(epsilon: T, delta: T) -> Result<T> {
    GParams::new(epsilon, delta).map(|p| theta_star(&p))
}

/// Why a ball was or was not placed in G.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    /// `r >= d(x, K)`: the ball reaches K.
    ScaleConstraint,
    /// Only one near-minimizing site.
    SingleMinimizer,
    /// Every pair of near-minimizers subtends at most θ*.
    AngleWithinThreshold,
    InG,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct GMembership<T> {
    pub ball: BallSpec<T>,
    pub params: GParams<T>,
    pub d_xk: T,
    pub near_set_size: usize,
    /// Largest pairwise angle among near-minimizers (0 when fewer than two).
    pub theta_max: T,
    pub theta_star: T,
    pub in_g: bool,
    pub decision: Decision,
    /// Site indices of the widest pair, present iff `in_g`.
    pub witness: Option<(usize, usize)>,
}

impl<T: Real> GMembership<T> {
    /// Distance of `theta_max` from the threshold, for tie diagnostics.
    pub fn angle_margin(&self) -> T {
        self.theta_max - self.theta_star
    }
}

/// Decides whether `(x, r)` lies in G for the site set `sites`.
pub fn in_g<T: Real>(
    x: &Point<T>,
    r: T,
    sites: &SiteSet<T>,
    params: &GParams<T>,
) -> Result<GMembership<T>> {
    let ball = BallSpec::new(x.clone(), r)?;
    membership(&ball, sites, params)
}

/// [`in_g`] for a prebuilt ball.
pub fn membership<T: Real>(
    ball: &BallSpec<T>,
    sites: &SiteSet<T>,
    params: &GParams<T>,
) -> Result<GMembership<T>> {
    let x = ball.center();
    let r = ball.radius();
    let d_xk = sites.distance(x)?;
    let threshold = theta_star(params);
    let mut out = GMembership {
        ball: ball.clone(),
        params: *params,
        d_xk,
        near_set_size: 0,
        theta_max: T::zero(),
        theta_star: threshold,
        in_g: false,
        decision: Decision::ScaleConstraint,
        witness: None,
    };
    if !(r < d_xk) {
        return Ok(out);
    }
    let near = sites.near_minimizers(x, params.epsilon * r)?;
    out.near_set_size = near.len();
    if near.len() < 2 {
        out.decision = Decision::SingleMinimizer;
        return Ok(out);
    }
    let zs: Vec<Point<T>> = near.iter().map(|s| sites.site(s.index).clone()).collect();
    let widest = max_pairwise_angle(x, &zs)?;
    out.theta_max = widest.angle;
    if widest.angle > threshold {
        out.in_g = true;
        out.decision = Decision::InG;
        let (i, j) = widest.indices;
        out.witness = Some((near[i].index, near[j].index));
    } else {
        out.decision = Decision::AngleWithinThreshold;
    }
    Ok(out)
}

/// Distance from `x` to the perpendicular bisector of a two-site set,
/// signed positive on the side of the second site.
pub fn bisector_signed_distance<T: Real>(x: &Point<T>, sites: &SiteSet<T>) -> Result<T> {
    if sites.len() != 2 {
        return Err(Error::InvalidParameter(format!(
            "bisector needs exactly two sites, got {}",
            sites.len()
        )));
    }
    if x.dim() != sites.dim() {
        return Err(Error::DimensionMismatch {
            expected: sites.dim(),
            found: x.dim(),
        });
    }
    let (a, b) = (sites.site(0), sites.site(1));
    let axis = b.sub(a);
    let len = norm(&axis);
    if len == T::zero() {
        return Err(Error::InvalidParameter("bisector sites coincide".into()));
    }
    let mid = a.lerp(b, T::lit(0.5));
    let rel = x.sub(&mid);
    Ok(rel
        .iter()
        .zip(&axis)
        .fold(T::zero(), |acc, (&r, &u)| acc + r * u)
        / len)
}

/// Unsigned distance from `x` to the bisector hyperplane of two sites.
pub fn bisector_distance<T: Real>(x: &Point<T>, sites: &SiteSet<T>) -> Result<T> {
    bisector_signed_distance(x, sites).map(|d| d.abs())
}

/// Membership together with a sampled fit of `d(·, K)` on the same ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct ConsistencyCheck<T> {
    pub membership: GMembership<T>,
    pub fit: Certificate<T>,
    /// δ·r·(1 − margin): a flagged ball whose sampled residual is at or
    /// below this level contradicts the angle bound.
    pub residual_floor: T,
    pub consistent: bool,
}

/// Checks "(x, r) ∈ G ⇒ d(·, K) is not δ-coarsely differentiable on B(x, r)"
/// with the default margin.
pub fn verify_consistency<T: Real>(
    sites: &SiteSet<T>,
    ball: &BallSpec<T>,
    params: &GParams<T>,
    plan: &SamplePlan,
) -> Result<ConsistencyCheck<T>> {
    verify_consistency_with_margin(sites, ball, params, plan, T::lit(DEFAULT_MARGIN))
}

pub fn verify_consistency_with_margin<T: Real>(
    sites: &SiteSet<T>,
    ball: &BallSpec<T>,
    params: &GParams<T>,
    plan: &SamplePlan,
    margin: T,
) -> Result<ConsistencyCheck<T>> {
    if !(T::zero()..T::one()).contains(&margin) {
        return Err(Error::InvalidParameter(format!(
            "margin must lie in [0, 1), got {margin}"
        )));
    }
    let membership = membership(ball, sites, params)?;
    let fit = coarse_diff_test(
        |p: &Point<T>| sites.distance(p).expect("dimension checked"),
        ball,
        params.delta,
        plan,
    )?;
    let residual_floor = params.delta * ball.radius() * (T::one() - margin);
    let consistent = !(membership.in_g && fit.sampled_residual <= residual_floor);
    Ok(ConsistencyCheck {
        membership,
        fit,
        residual_floor,
        consistent,
    })
}

/// Runs [`verify_consistency`] over many balls in parallel. Ball `i` uses
/// the plan's seed re-derived from `(plan.seed, i)`, so the output does not
/// depend on scheduling.
pub fn verify_batch<T: Real>(
    sites: &SiteSet<T>,
    balls: &[BallSpec<T>],
    params: &GParams<T>,
    plan: &SamplePlan,
) -> Result<Vec<ConsistencyCheck<T>>> {
    balls
        .par_iter()
        .enumerate()
        .map(|(i, ball)| {
            let plan = plan.with_seed(derive_seed(plan.seed, &[i as u64]));
            verify_consistency(sites, ball, params, &plan)
        })
        .collect()
}

/// Tie tolerance used by membership decisions at `x`.
pub fn membership_tie_tolerance<T: Real>(sites: &SiteSet<T>, x: &Point<T>) -> Result<T> {
    sites.distance(x).map(tie_tolerance)
}
