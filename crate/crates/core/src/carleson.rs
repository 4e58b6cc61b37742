//! Monte Carlo estimates of Carleson integrals
//! `∫₀ᴸ |D_r ∩ B| dr/r / |B|` for location/scale sets D given as
//! membership oracles `(x, r) -> bool`.
//!
//! Scales are discretized log-uniformly: `m` nodes per octave over `J`
//! octaves below the top scale L, each node carrying weight `ln 2 / m`.
//! The node for cell `[L 2^(-j/m), L 2^(-(j-1)/m)]` sits at its geometric
//! midpoint. Scales below `L 2^(-J)` are truncated and reported as such.
//!
//! Slice points for ball `b`, slice `j` come from the stream
//! `(seed, b, j)` and are placed as `center + L u` with `u` uniform in the
//! unit ball, so estimates for different oracles share random numbers and
//! scale exactly with the ball.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ball_volume, BallSpec, Point};
use crate::rng::{derive_seed, place_in_ball, unit_ball_point};
use crate::scalar::Real;

pub const DEFAULT_LEVELS: usize = 12;
pub const DEFAULT_PER_OCTAVE: usize = 4;
pub const DEFAULT_SLICE_SAMPLES: usize = 4096;

/// Log-uniform grid of scales below a top scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleGrid<T> {
    pub top: T,
    pub levels: usize,
    pub per_octave: usize,
}

impl<T: Real> ScaleGrid<T> {
    pub fn new(top: T, levels: usize, per_octave: usize) -> Result<Self> {
        if !(top > T::zero()) || !top.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "top scale must be positive and finite, got {top}"
            )));
        }
        if levels == 0 || per_octave == 0 {
            return Err(Error::InvalidParameter(
                "scale grid needs at least one octave and one node per octave".into(),
            ));
        }
        Ok(ScaleGrid {
            top,
            levels,
            per_octave,
        })
    }

    pub fn with_top(&self, top: T) -> Result<Self> {
        ScaleGrid::new(top, self.levels, self.per_octave)
    }

    pub fn len(&self) -> usize {
        self.levels * self.per_octave
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Node radii `L 2^(-(j - 1/2)/m)`, `j = 1..=J m`, strictly decreasing.
    pub fn radii(&self) -> Vec<T> {
        let m = T::from_count(self.per_octave);
        (1..=self.len())
            .map(|j| {
                let e = (T::from_count(j) - T::lit(0.5)) / m;
                self.top * T::lit(2.0).powf(-e)
            })
            .collect()
    }

    /// Weight of each node in the dr/r measure: `ln 2 / m`.
    pub fn log_step(&self) -> T {
        T::LN_2() / T::from_count(self.per_octave)
    }

    /// Smallest scale covered, `L 2^(-J)`.
    pub fn truncation_radius(&self) -> T {
        self.top * T::lit(2.0).powi(-(self.levels as i32))
    }
}

/// Monte Carlo estimate of `|D_r ∩ B| / |B|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceMeasure<T> {
    pub fraction: T,
    /// `sqrt(p (1 - p) / n)`.
    pub std_error: T,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct CarlesonEstimate<T> {
    pub ball: BallSpec<T>,
    pub grid: ScaleGrid<T>,
    pub radii: Vec<T>,
    pub slice_fractions: Vec<T>,
    pub slice_std_errors: Vec<T>,
    /// Contribution of each octave to the integral, top octave first; the
    /// last entries show the trend of the truncated tail.
    pub octave_contributions: Vec<T>,
    /// `Σ_j fraction_j · ln 2 / m`, already normalized by |B|.
    pub integral: T,
    /// Equal to `integral`: the normalized ratio compared against C.
    pub constant: T,
    /// |B|, to recover the unnormalized integral.
    pub ball_volume: T,
    pub truncation_radius: T,
    pub mc_samples: usize,
    pub seed: u64,
}

/// Estimate of the Carleson constant over a finite family of balls.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct ConstantEstimate<T> {
    pub per_ball: Vec<CarlesonEstimate<T>>,
    /// Largest per-ball constant; a lower bound on the true constant since
    /// only finitely many balls and scales are tested.
    pub sup: T,
    pub argsup: usize,
    pub lower_bound_only: bool,
}

fn slice_with_rng<T, F>(
    oracle: &F,
    r: T,
    ball: &BallSpec<T>,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> SliceMeasure<T>
where
    T: Real,
    F: Fn(&Point<T>, T) -> bool + ?Sized,
{
    let k = ball.dim();
    let center = ball.center().coords();
    let hits = (0..n)
        .filter(|_| {
            let u = unit_ball_point(rng, k);
            let x = Point::from_vec_unchecked(place_in_ball(center, ball.radius(), &u));
            oracle(&x, r)
        })
        .count();
    let p = T::from_count(hits) / T::from_count(n);
    SliceMeasure {
        fraction: p,
        std_error: (p * (T::one() - p) / T::from_count(n)).sqrt(),
        n,
    }
}

/// Fraction of `n` uniform points x of `ball` with `oracle(x, r)`.
pub fn slice_measure<T, F>(
    oracle: F,
    r: T,
    ball: &BallSpec<T>,
    n: usize,
    seed: u64,
) -> Result<SliceMeasure<T>>
where
    T: Real,
    F: Fn(&Point<T>, T) -> bool,
{
    if n == 0 {
        return Err(Error::InvalidParameter(
            "slice needs at least one sample".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[]));
    Ok(slice_with_rng(&oracle, r, ball, n, &mut rng))
}

/// Discretized `∫₀ᴸ |D_r ∩ B| dr/r / |B|` for the ball `ball` of radius L.
pub fn carleson_integral<T, F>(
    oracle: F,
    ball: &BallSpec<T>,
    grid: &ScaleGrid<T>,
    n: usize,
    seed: u64,
) -> Result<CarlesonEstimate<T>>
where
    T: Real,
    F: Fn(&Point<T>, T) -> bool + Sync,
{
    integral_impl(&oracle, ball, grid, n, seed)
}

fn integral_impl<T, F>(
    oracle: &F,
    ball: &BallSpec<T>,
    grid: &ScaleGrid<T>,
    n: usize,
    seed: u64,
) -> Result<CarlesonEstimate<T>>
where
    T: Real,
    F: Fn(&Point<T>, T) -> bool + Sync + ?Sized,
{
    if n == 0 {
        return Err(Error::InvalidParameter(
            "slice needs at least one sample".into(),
        ));
    }
    if grid.top != ball.radius() {
        return Err(Error::InvalidParameter(format!(
            "grid top scale {} must equal the ball radius {}",
            grid.top,
            ball.radius()
        )));
    }
    let radii = grid.radii();
    let slices: Vec<SliceMeasure<T>> = radii
        .par_iter()
        .enumerate()
        .map(|(j, &r)| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, &[j as u64]));
            slice_with_rng(oracle, r, ball, n, &mut rng)
        })
        .collect();
    let step = grid.log_step();
    let mut integral = T::zero();
    let mut octave_contributions = vec![T::zero(); grid.levels];
    for (j, s) in slices.iter().enumerate() {
        integral += s.fraction * step;
        octave_contributions[j / grid.per_octave] += s.fraction * step;
    }
    Ok(CarlesonEstimate {
        ball: ball.clone(),
        grid: *grid,
        radii,
        slice_fractions: slices.iter().map(|s| s.fraction).collect(),
        slice_std_errors: slices.iter().map(|s| s.std_error).collect(),
        octave_contributions,
        integral,
        constant: integral,
        ball_volume: ball_volume(ball.dim(), ball.radius())?,
        truncation_radius: grid.truncation_radius(),
        mc_samples: n,
        seed,
    })
}

/// Runs [`carleson_integral`] on every ball (grid top set to the ball's
/// radius) and takes the supremum. Ball `i` uses seed `(seed, i)`.
pub fn estimate_constant<T, F>(
    oracle: F,
    balls: &[BallSpec<T>],
    levels: usize,
    per_octave: usize,
    n: usize,
    seed: u64,
) -> Result<ConstantEstimate<T>>
where
    T: Real,
    F: Fn(&Point<T>, T) -> bool + Sync,
{
    if balls.is_empty() {
        return Err(Error::Empty("ball family"));
    }
    let per_ball: Vec<CarlesonEstimate<T>> = balls
        .par_iter()
        .enumerate()
        .map(|(i, ball)| {
            let grid = ScaleGrid::new(ball.radius(), levels, per_octave)?;
            integral_impl(&oracle, ball, &grid, n, derive_seed(seed, &[i as u64]))
        })
        .collect::<Result<_>>()?;
    let (argsup, sup) = per_ball
        .iter()
        .enumerate()
        .fold((0, T::zero()), |acc, (i, e)| {
            if e.constant > acc.1 {
                (i, e.constant)
            } else {
                acc
            }
        });
    Ok(ConstantEstimate {
        per_ball,
        sup,
        argsup,
        lower_bound_only: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn unit_ball() -> BallSpec<f64> {
        BallSpec::new(Point::origin(2), 1.0).unwrap()
    }

    #[test]
    fn grid_shape() {
        let g = ScaleGrid::new(2.0, 3, 4).unwrap();
        let r = g.radii();
        assert_eq!(r.len(), 12);
        assert!(r.windows(2).all(|w| w[0] > w[1]));
        assert!(r[0] < 2.0);
        assert!(r[11] > g.truncation_radius());
        assert_eq!(g.truncation_radius(), 0.25);
        assert!((g.log_step() - LN_2 / 4.0).abs() < 1e-16);
        assert!(ScaleGrid::new(1.0, 0, 4).is_err());
        assert!(ScaleGrid::new(0.0, 1, 4).is_err());
    }

    #[test]
    fn constant_oracles() {
        let b = unit_ball();
        assert_eq!(
            slice_measure(|_, _| false, 0.5, &b, 100, 1)
                .unwrap()
                .fraction,
            0.0
        );
        let s = slice_measure(|_, _| true, 0.5, &b, 100, 1).unwrap();
        assert_eq!((s.fraction, s.std_error), (1.0, 0.0));
        assert!(slice_measure(|_, _| true, 0.5, &b, 0, 1).is_err());
    }

    #[test]
    fn half_plane_is_half() {
        let s =
            slice_measure(|x: &Point<f64>, _| x[0] > 0.0, 0.5, &unit_ball(), 10_000, 8).unwrap();
        assert!((s.fraction - 0.5).abs() <= 3.0 * s.std_error.max(0.005));
    }

    #[test]
    fn one_octave_slab_integrates_to_ln2() {
        let b = BallSpec::new(Point::new(vec![3.0, -1.0]).unwrap(), 4.0).unwrap();
        let g = ScaleGrid::new(4.0, 12, 4).unwrap();
        let e = carleson_integral(|_, r| r > 2.0 && r < 4.0, &b, &g, 64, 5).unwrap();
        assert!((e.constant - LN_2).abs() < 0.01);
        assert_eq!(e.octave_contributions[0], e.constant);
        let empty = carleson_integral(|_, _| false, &b, &g, 64, 5).unwrap();
        assert_eq!(empty.constant, 0.0);
    }

    #[test]
    fn grid_must_match_ball() {
        let g = ScaleGrid::new(2.0, 2, 2).unwrap();
        assert!(carleson_integral(|_, _| true, &unit_ball(), &g, 10, 0).is_err());
        assert!(estimate_constant(|_: &Point<f64>, _| true, &[], 2, 2, 10, 0).is_err());
    }

    #[test]
    fn sup_over_balls() {
        let balls: Vec<_> = [0.5, 1.0, 8.0]
            .iter()
            .map(|&l| BallSpec::new(Point::origin(3), l).unwrap())
            .collect();
        let slab = |_: &Point<f64>, r: f64| r > 0.75 && r < 1.5;
        let est = estimate_constant(slab, &balls, 6, 4, 32, 1).unwrap();
        // Ball of radius 1 sees one half octave (0.75..1), radius 8 sees one
        // octave, radius 0.5 sees none.
        assert_eq!(est.per_ball[0].constant, 0.0);
        assert!((est.sup - LN_2).abs() < 1e-12);
        assert_eq!(est.argsup, 2);
        assert!(est.lower_bound_only);
    }
}
