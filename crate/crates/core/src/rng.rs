//! Seeded random streams and ball sampling primitives.
//!
//! Every random quantity in the crate comes from a [`ChaCha8Rng`] whose seed
//! is derived from a root seed and a path of indices (ball index, slice
//! index, ...), so results never depend on evaluation order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::Real;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `root` and an index path.
pub fn derive_seed(root: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(root), |acc, &i| splitmix64(acc ^ splitmix64(i)))
}

pub fn stream(root: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, path))
}

/// Uniformly distributed unit vector in ℝᵏ.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-300 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Uniform point of the closed unit ball of ℝᵏ (polar method: uniform
/// direction, radius `U^(1/k)`).
pub fn unit_ball_point<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<f64> {
    let dir = unit_vector(rng, k);
    let u: f64 = rng.gen();
    let rho = u.powf(1.0 / k as f64);
    dir.into_iter().map(|x| x * rho).collect()
}

/// `center + radius * u`, clamped back into the closed ball if rounding
/// pushed it out.
pub fn place_in_ball<T: Real>(center: &[T], radius: T, u: &[f64]) -> Vec<T> {
    let mut p: Vec<T> = center
        .iter()
        .zip(u)
        .map(|(&c, &x)| c + radius * T::lit(x))
        .collect();
    let d2 = p
        .iter()
        .zip(center)
        .fold(T::zero(), |acc, (&a, &c)| acc + (a - c) * (a - c));
    if d2.sqrt() > radius {
        let s = radius / d2.sqrt() * (T::one() - T::epsilon() * T::lit(4.0));
        for (a, &c) in p.iter_mut().zip(center) {
            *a = c + (*a - c) * s;
        }
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_differ_by_path() {
        let a = derive_seed(1, &[0, 1]);
        let b = derive_seed(1, &[1, 0]);
        let c = derive_seed(2, &[0, 1]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(1, &[0, 1]));
    }

    #[test]
    fn ball_points_are_inside() {
        let mut rng = stream(3, &[]);
        for k in 1..6 {
            for _ in 0..200 {
                let u = unit_ball_point(&mut rng, k);
                assert!(u.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-15);
                let p = place_in_ball(&[0.3f64; 5][..k], 1e-3, &u);
                let d = p.iter().map(|x| (x - 0.3) * (x - 0.3)).sum::<f64>().sqrt();
                assert!(d <= 1e-3);
            }
        }
    }
}
