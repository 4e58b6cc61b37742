//! Coarse differentiability of a scalar function on a ball, decided by a
//! sampled minimax (Chebyshev) affine fit.
//!
//! A function f is ε-coarsely differentiable on B(x, r) when some affine λ
//! satisfies |f − λ| ≤ εr on the whole ball. Here the quantifier over the
//! ball is replaced by a finite sample and the quantifier over λ is solved
//! exactly by linear programming, so:
//!
//! * a FAIL verdict is a sound witness: no affine map achieves εr even on
//!   the sampled points;
//! * a PASS verdict is relative to the sample.

mod fit;
mod sampling;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BallSpec, Point};
use crate::scalar::Real;

pub use fit::{chebyshev_affine_fit, AffineMap, FitResult};
pub use sampling::{sample_ball, SamplePlan, SampleStrategy, DEFAULT_BOUNDARY_FRACTION};

/// Default slack added to the gradient bound for sampled residuals.
pub const DEFAULT_GRADIENT_SLACK: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Sampled residual within εr. Relative to the sample only.
    Pass,
    /// No affine map fits the sampled values within εr.
    Fail,
}

/// Outcome of [`coarse_diff_test`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct Certificate<T> {
    pub ball: BallSpec<T>,
    pub epsilon: T,
    /// εr.
    pub threshold: T,
    /// Floating-point allowance added to `threshold` before comparing, a few
    /// ulps of the largest sampled value.
    pub rounding_allowance: T,
    /// Max |f − λ| over the samples for the optimal λ.
    pub sampled_residual: T,
    /// Dual bound: no affine map does better than this on the samples.
    pub lower_bound: T,
    pub map: AffineMap<T>,
    pub verdict: Verdict,
    pub plan: SamplePlan,
    pub n_samples: usize,
}

impl<T: Real> Certificate<T> {
    /// Whether the verdict holds only with respect to the sample.
    pub fn sample_relative(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Samples `f` on `ball` according to `plan`, fits the best affine map and
/// compares the sampled residual against `epsilon * r`.
pub fn coarse_diff_test<T, F>(
    f: F,
    ball: &BallSpec<T>,
    epsilon: T,
    plan: &SamplePlan,
) -> Result<Certificate<T>>
where
    T: Real,
    F: Fn(&Point<T>) -> T,
{
    if !(epsilon >= T::zero()) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be non-negative and finite, got {epsilon}"
        )));
    }
    let samples = sample_ball(ball, plan)?;
    let values: Vec<T> = samples.iter().map(&f).collect();
    let mut fit = chebyshev_affine_fit(&samples, &values)?;
    fit.plan = Some(*plan);
    let threshold = epsilon * ball.radius();
    let value_scale = values.iter().fold(T::zero(), |acc, v| acc.max(v.abs()));
    let rounding_allowance = value_scale * T::epsilon() * T::lit(64.0);
    let verdict = if fit.residual <= threshold + rounding_allowance {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    Ok(Certificate {
        ball: ball.clone(),
        epsilon,
        threshold,
        rounding_allowance,
        sampled_residual: fit.residual,
        lower_bound: fit.lower_bound,
        map: fit.map,
        verdict,
        plan: *plan,
        n_samples: fit.n_samples,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientCheck<T> {
    pub norm: T,
    pub bound: T,
    pub ok: bool,
}

/// Checks ‖a‖ ≤ 1 + 2·residual/r + slack for a fit of a 1-Lipschitz function.
pub fn gradient_norm_check<T: Real>(fit: &FitResult<T>, ball: &BallSpec<T>) -> GradientCheck<T> {
    gradient_norm_check_with_slack(fit, ball, T::lit(DEFAULT_GRADIENT_SLACK))
}

pub fn gradient_norm_check_with_slack<T: Real>(
    fit: &FitResult<T>,
    ball: &BallSpec<T>,
    slack: T,
) -> GradientCheck<T> {
    let norm = fit.map.gradient_norm();
    let bound = T::one() + T::lit(2.0) * fit.residual / ball.radius() + slack;
    GradientCheck {
        norm,
        bound,
        ok: norm <= bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::SiteSet;

    fn p(c: &[f64]) -> Point<f64> {
        Point::new(c.to_vec()).unwrap()
    }

    fn dense(seed: u64) -> SamplePlan {
        SamplePlan::new(
            SampleStrategy::BoundaryMix {
                boundary_fraction: 0.2,
            },
            2000,
            seed,
        )
    }

    #[test]
    fn far_singleton_passes() {
        let k = SiteSet::new(vec![p(&[10.0, 0.0])]).unwrap();
        let ball = BallSpec::new(p(&[0.0, 0.0]), 1.0).unwrap();
        let cert = coarse_diff_test(|x| k.distance(x).unwrap(), &ball, 0.1, &dense(1)).unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
        assert!(
            cert.sampled_residual <= 0.05 + 1e-3,
            "{}",
            cert.sampled_residual
        );
        assert!(cert.sampled_residual > 0.01);
        assert!(cert.sample_relative());
    }

    #[test]
    fn two_point_midpoint_fails() {
        let k = SiteSet::new(vec![p(&[-1.0, 0.0]), p(&[1.0, 0.0])]).unwrap();
        let ball = BallSpec::new(p(&[0.0, 0.0]), 0.5).unwrap();
        let cert = coarse_diff_test(|x| k.distance(x).unwrap(), &ball, 0.1, &dense(2)).unwrap();
        assert_eq!(cert.verdict, Verdict::Fail);
        assert!(cert.sampled_residual > 0.05);
        assert!(!cert.sample_relative());
    }

    #[test]
    fn affine_function_passes_at_zero_epsilon() {
        let ball = BallSpec::new(p(&[0.3, -0.2, 4.0]), 2.5).unwrap();
        let cert = coarse_diff_test(
            |x| 0.5 * x[0] - 2.0 * x[1] + x[2] + 7.0,
            &ball,
            0.0,
            &SamplePlan::default_for_dim(3, 4),
        )
        .unwrap();
        assert_eq!(cert.verdict, Verdict::Pass);
        assert!(cert.sampled_residual < 1e-12);
    }

    #[test]
    fn negative_epsilon_rejected() {
        let ball = BallSpec::new(p(&[0.0]), 1.0).unwrap();
        assert!(coarse_diff_test(|x| x[0], &ball, -0.1, &dense(0)).is_err());
    }

    #[test]
    fn gradient_check_examples() {
        let ball = BallSpec::new(p(&[0.0, 0.0]), 1.0).unwrap();
        let pts = sample_ball(&ball, &dense(3)).unwrap();

        let vals: Vec<f64> = pts.iter().map(|x| x[0]).collect();
        let fit = chebyshev_affine_fit(&pts, &vals).unwrap();
        let g = gradient_norm_check(&fit, &ball);
        assert!((g.norm - 1.0).abs() < 1e-9);
        assert!((g.bound - 1.05).abs() < 1e-9);
        assert!(g.ok);

        let fit = chebyshev_affine_fit(&pts, &vec![3.0; pts.len()]).unwrap();
        let g = gradient_norm_check(&fit, &ball);
        assert_eq!(g.norm, 0.0);
        assert!(g.ok);
    }
}
