use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{BallSpec, Point};
use crate::rng::{place_in_ball, stream, unit_ball_point, unit_vector};
use crate::scalar::Real;
use rand::Rng;

/// Fraction of boundary points in the default plan.
pub const DEFAULT_BOUNDARY_FRACTION: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SampleStrategy {
    /// Polar sampling: uniform direction, radius `r U^(1/k)`.
    UniformRandom,
    /// Halton sequence with a seeded Cranley-Patterson shift, restricted to
    /// the ball by rejection.
    LowDiscrepancy,
    /// The center, a fraction of points on the bounding sphere, the rest
    /// uniform in the interior.
    BoundaryMix { boundary_fraction: f64 },
}

/// How to discretize "for all p in B(x, r)".
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub strategy: SampleStrategy,
    pub n: usize,
    pub seed: u64,
}

impl SamplePlan {
    pub fn new(strategy: SampleStrategy, n: usize, seed: u64) -> Self {
        SamplePlan { strategy, n, seed }
    }

    /// Default plan for dimension `k`: `max(500, 50k)` points, 20% on the
    /// boundary.
    pub fn default_for_dim(k: usize, seed: u64) -> Self {
        SamplePlan {
            strategy: SampleStrategy::BoundaryMix {
                boundary_fraction: DEFAULT_BOUNDARY_FRACTION,
            },
            n: (50 * k).max(500),
            seed,
        }
    }

    /// Same plan with another seed.
    pub fn with_seed(self, seed: u64) -> Self {
        SamplePlan { seed, ..self }
    }

    pub fn min_samples(k: usize) -> usize {
        k + 2
    }

    pub fn validate(&self, k: usize) -> Result<()> {
        if self.n < Self::min_samples(k) {
            return Err(Error::InsufficientSamples {
                needed: Self::min_samples(k),
                got: self.n,
            });
        }
        if let SampleStrategy::BoundaryMix { boundary_fraction } = self.strategy {
            if !(0.0..=1.0).contains(&boundary_fraction) {
                return Err(Error::InvalidParameter(format!(
                    "boundary fraction must lie in [0, 1], got {boundary_fraction}"
                )));
            }
        }
        Ok(())
    }
}

/// Draws `plan.n` points of the closed ball; deterministic in `plan.seed`.
pub fn sample_ball<T: Real>(ball: &BallSpec<T>, plan: &SamplePlan) -> Result<Vec<Point<T>>> {
    let k = ball.dim();
    plan.validate(k)?;
    let center = ball.center().coords();
    let r = ball.radius();
    let mut rng = stream(plan.seed, &[]);
    let place = |u: &[f64]| Point::from_vec_unchecked(place_in_ball(center, r, u));

    let pts = match plan.strategy {
        SampleStrategy::UniformRandom => (0..plan.n)
            .map(|_| place(&unit_ball_point(&mut rng, k)))
            .collect(),
        SampleStrategy::LowDiscrepancy => {
            let shift: Vec<f64> = (0..k).map(|_| rng.gen()).collect();
            let bases = first_primes(k);
            let mut out = Vec::with_capacity(plan.n);
            let mut i = 1u64;
            while out.len() < plan.n {
                let u: Vec<f64> = bases
                    .iter()
                    .zip(&shift)
                    .map(|(&b, &s)| 2.0 * ((radical_inverse(i, b) + s) % 1.0) - 1.0)
                    .collect();
                if u.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                    out.push(place(&u));
                }
                i += 1;
            }
            out
        }
        SampleStrategy::BoundaryMix { boundary_fraction } => {
            let n_boundary = ((plan.n as f64) * boundary_fraction).round() as usize;
            let n_boundary = n_boundary.min(plan.n);
            let mut out = Vec::with_capacity(plan.n);
            for _ in 0..n_boundary {
                out.push(place(&unit_vector(&mut rng, k)));
            }
            if out.len() < plan.n {
                out.push(ball.center().clone());
            }
            while out.len() < plan.n {
                out.push(place(&unit_ball_point(&mut rng, k)));
            }
            out
        }
    };
    Ok(pts)
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut acc = 0.0;
    while i > 0 {
        acc += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    acc
}

fn first_primes(k: usize) -> Vec<u64> {
    let mut primes = Vec::with_capacity(k);
    let mut c = 2u64;
    while primes.len() < k {
        if primes
            .iter()
            .take_while(|&&p| p * p <= c)
            .all(|&p| c % p != 0)
        {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_disk() -> BallSpec<f64> {
        BallSpec::new(Point::origin(2), 1.0).unwrap()
    }

    #[test]
    fn small_plan_is_contained_and_deterministic() {
        let plan = SamplePlan::new(SampleStrategy::UniformRandom, 4, 1);
        let a = sample_ball(&unit_disk(), &plan).unwrap();
        assert_eq!(a.len(), 4);
        assert!(a.iter().all(|p| p.norm() <= 1.0));
        assert_eq!(a, sample_ball(&unit_disk(), &plan).unwrap());
    }

    #[test]
    fn rejects_too_few_samples() {
        let plan = SamplePlan::new(SampleStrategy::UniformRandom, 3, 1);
        assert_eq!(
            sample_ball(&unit_disk(), &plan).unwrap_err(),
            Error::InsufficientSamples { needed: 4, got: 3 }
        );
        let bad = SamplePlan::new(
            SampleStrategy::BoundaryMix {
                boundary_fraction: 1.5,
            },
            10,
            1,
        );
        assert!(sample_ball(&unit_disk(), &bad).is_err());
    }

    #[test]
    fn uniform_mean_norm_is_two_thirds() {
        // E|U| = k / (k + 1) for U uniform in the unit k-ball.
        let plan = SamplePlan::new(SampleStrategy::UniformRandom, 10_000, 5);
        let pts = sample_ball(&unit_disk(), &plan).unwrap();
        let mean = pts.iter().map(|p| p.norm()).sum::<f64>() / pts.len() as f64;
        assert!((mean - 2.0 / 3.0).abs() < 0.01, "mean norm {mean}");
    }

    #[test]
    fn low_discrepancy_covers_the_ball() {
        let plan = SamplePlan::new(SampleStrategy::LowDiscrepancy, 4_000, 2);
        let pts = sample_ball(&unit_disk(), &plan).unwrap();
        assert!(pts.iter().all(|p| p.norm() <= 1.0));
        let mean = pts.iter().map(|p| p.norm()).sum::<f64>() / pts.len() as f64;
        assert!((mean - 2.0 / 3.0).abs() < 0.01, "mean norm {mean}");
        // Quadrant balance.
        let q = pts.iter().filter(|p| p[0] > 0.0 && p[1] > 0.0).count() as f64;
        assert!((q / 4_000.0 - 0.25).abs() < 0.01);
    }

    #[test]
    fn boundary_mix_layout() {
        let ball = BallSpec::new(Point::new(vec![1.0, -2.0, 0.5]).unwrap(), 0.25).unwrap();
        let plan = SamplePlan::default_for_dim(3, 11);
        assert_eq!(plan.n, 500);
        let pts = sample_ball(&ball, &plan).unwrap();
        assert_eq!(pts.len(), 500);
        let on_sphere = pts
            .iter()
            .filter(|p: &&Point<f64>| (p.dist(ball.center()) - 0.25).abs() < 1e-12)
            .count();
        assert!(on_sphere >= 100);
        assert_eq!(&pts[100], ball.center());
        assert!(pts.iter().all(|p| ball.contains(p)));
        assert_eq!(SamplePlan::default_for_dim(20, 0).n, 1000);
    }

    #[test]
    fn halton_radical_inverse() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
        assert_eq!(first_primes(5), vec![2, 3, 5, 7, 11]);
    }
}
