use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, norm, Point};
use crate::lp::ColumnLp;
use crate::scalar::Real;

use super::SamplePlan;

/// λ(p) = a·p + b.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineMap<T> {
    pub linear: Vec<T>,
    pub offset: T,
}

impl<T: Real> AffineMap<T> {
    pub fn new(linear: Vec<T>, offset: T) -> Self {
        AffineMap { linear, offset }
    }

    pub fn constant(dim: usize, offset: T) -> Self {
        AffineMap {
            linear: vec![T::zero(); dim],
            offset,
        }
    }

    #[inline]
    pub fn eval(&self, p: &Point<T>) -> T {
        dot(&self.linear, p.coords()) + self.offset
    }

    pub fn gradient_norm(&self) -> T {
        norm(&self.linear)
    }

    /// max |value_i − λ(p_i)|.
    pub fn max_deviation(&self, samples: &[Point<T>], values: &[T]) -> T {
        samples
            .iter()
            .zip(values)
            .fold(T::zero(), |acc, (p, &v)| acc.max((v - self.eval(p)).abs()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult<T> {
    pub map: AffineMap<T>,
    /// Max deviation of `map` over the samples, recomputed from the data.
    pub residual: T,
    /// LP dual objective: every affine map deviates by at least this much
    /// somewhere on the samples.
    pub lower_bound: T,
    pub n_samples: usize,
    /// Sampling plan that produced the samples, when known.
    pub plan: Option<SamplePlan>,
    pub iterations: usize,
}

/// Best uniform affine approximation of `values` at `samples`.
///
/// Solves `min t` s.t. `|v_i − (a·p_i + b)| ≤ t` through its dual, a
/// standard-form LP with `d + 2` rows, where `d` is the dimension of the
/// affine hull of the samples. Directions orthogonal to that hull get a
/// zero coefficient, which makes the linear part minimum-norm among the
/// optimal fits when the samples are affinely dependent.
pub fn chebyshev_affine_fit<T: Real>(samples: &[Point<T>], values: &[T]) -> Result<FitResult<T>> {
    let first = samples.first().ok_or(Error::Empty("fit samples"))?;
    let k = first.dim();
    if samples.len() != values.len() {
        return Err(Error::InvalidParameter(format!(
            "{} samples but {} values",
            samples.len(),
            values.len()
        )));
    }
    if samples.len() < k + 2 {
        return Err(Error::InsufficientSamples {
            needed: k + 2,
            got: samples.len(),
        });
    }
    if let Some(bad) = samples.iter().find(|p| p.dim() != k) {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: bad.dim(),
        });
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "non-finite value at sample {i}"
        )));
    }
    let n = samples.len();

    // Normalize: points to the unit ball around their centroid, values to [-1, 1].
    let mut centroid = vec![T::zero(); k];
    for p in samples {
        for (c, &x) in centroid.iter_mut().zip(p.coords()) {
            *c += x;
        }
    }
    let inv_n = T::one() / T::from_count(n);
    centroid.iter_mut().for_each(|c| *c *= inv_n);
    let centered: Vec<Vec<T>> = samples
        .iter()
        .map(|p| {
            p.coords()
                .iter()
                .zip(&centroid)
                .map(|(&x, &c)| x - c)
                .collect()
        })
        .collect();
    let spread = centered.iter().fold(T::zero(), |acc, v| acc.max(norm(v)));

    let (vmin, vmax) = values
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let mid = (vmin + vmax) / T::lit(2.0);
    let half_range = (vmax - vmin) / T::lit(2.0);

    let basis = if spread > T::zero() {
        hull_basis(&centered, spread)
    } else {
        Vec::new()
    };

    if half_range == T::zero() || basis.is_empty() {
        // Constant data, or a single repeated point: the midrange constant
        // is optimal and attains half the range.
        let map = AffineMap::constant(k, mid);
        return Ok(FitResult {
            residual: map.max_deviation(samples, values),
            lower_bound: half_range,
            map,
            n_samples: n,
            plan: None,
            iterations: 0,
        });
    }

    let d = basis.len();
    let rows = d + 2;
    let mut rhs = vec![T::zero(); rows];
    rhs[d + 1] = T::one();
    let mut lp = ColumnLp::new(rows, rhs);
    let mut col = vec![T::zero(); rows];
    for (v, &f) in centered.iter().zip(values) {
        for (c, u) in col.iter_mut().zip(&basis) {
            *c = dot(u, v) / spread;
        }
        col[d] = T::one();
        col[d + 1] = T::one();
        let g = (f - mid) / half_range;
        lp.push_column(&col, g);
        for c in col.iter_mut().take(d + 1) {
            *c = -*c;
        }
        lp.push_column(&col, -g);
    }
    let sol = lp.solve()?;

    // Multipliers are (α, β, t) in normalized coordinates.
    let alpha = &sol.multipliers[..d];
    let beta = sol.multipliers[d];
    let mut linear = vec![T::zero(); k];
    for (u, &a) in basis.iter().zip(alpha) {
        for (l, &ui) in linear.iter_mut().zip(u) {
            *l += a * ui;
        }
    }
    let scale = half_range / spread;
    linear.iter_mut().for_each(|l| *l *= scale);
    let offset = half_range * beta + mid - dot(&linear, &centroid);
    let map = AffineMap { linear, offset };

    Ok(FitResult {
        residual: map.max_deviation(samples, values),
        lower_bound: (sol.objective * half_range).max(T::zero()),
        map,
        n_samples: n,
        plan: None,
        iterations: sol.iterations,
    })
}

/// Orthonormal basis of the span of `vectors` by pivoted Gram-Schmidt;
/// directions carrying less than a relative `1e-9` of `scale` are dropped.
fn hull_basis<T: Real>(vectors: &[Vec<T>], scale: T) -> Vec<Vec<T>> {
    let k = vectors[0].len();
    let tol = scale * T::lit(1e-9).max(T::epsilon().sqrt() * T::lit(4.0));
    let mut residuals: Vec<Vec<T>> = vectors.to_vec();
    let mut basis: Vec<Vec<T>> = Vec::with_capacity(k);
    while basis.len() < k {
        let (best, best_norm) = residuals
            .iter()
            .enumerate()
            .map(|(i, r)| (i, norm(r)))
            .fold(
                (0, T::zero()),
                |acc, (i, n)| if n > acc.1 { (i, n) } else { acc },
            );
        if best_norm <= tol {
            break;
        }
        let mut u: Vec<T> = residuals[best].iter().map(|&x| x / best_norm).collect();
        // Re-orthogonalize once against the accepted basis.
        for b in &basis {
            let c = dot(&u, b);
            for (x, &y) in u.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
        let nu = norm(&u);
        u.iter_mut().for_each(|x| *x /= nu);
        for r in residuals.iter_mut() {
            let c = dot(r, &u);
            for (x, &y) in r.iter_mut().zip(&u) {
                *x -= c * y;
            }
        }
        basis.push(u);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(rows: &[&[f64]]) -> Vec<Point<f64>> {
        rows.iter()
            .map(|r| Point::new(r.to_vec()).unwrap())
            .collect()
    }

    #[test]
    fn affine_data_is_fit_exactly() {
        let s = pts(&[
            &[0.0, 0.0],
            &[1.0, 0.0],
            &[0.0, 1.0],
            &[0.7, 0.2],
            &[-0.3, 0.5],
        ]);
        let v: Vec<f64> = s.iter().map(|p| 2.0 * p[0] - 3.0).collect();
        let fit = chebyshev_affine_fit(&s, &v).unwrap();
        assert!(fit.residual < 1e-12);
        assert!((fit.map.linear[0] - 2.0).abs() < 1e-12);
        assert!(fit.map.linear[1].abs() < 1e-12);
        assert!((fit.map.offset + 3.0).abs() < 1e-12);
    }

    #[test]
    fn three_point_equioscillation() {
        // |t| at {-1, 0, 1}: best line is 1/2 with residual 1/2.
        let s = pts(&[&[-1.0], &[0.0], &[1.0]]);
        let fit = chebyshev_affine_fit(&s, &[1.0, 0.0, 1.0]).unwrap();
        assert!((fit.residual - 0.5).abs() < 1e-12);
        assert!((fit.lower_bound - 0.5).abs() < 1e-12);
        assert!(fit.map.linear[0].abs() < 1e-12);
        assert!((fit.map.offset - 0.5).abs() < 1e-12);
    }

    #[test]
    fn collinear_samples_get_zero_normal_coefficient() {
        // All samples on the line y = 1 in the plane.
        let s: Vec<Point<f64>> = (0..10)
            .map(|i| Point::new(vec![i as f64 * 0.1, 1.0]).unwrap())
            .collect();
        let v: Vec<f64> = s.iter().map(|p| 4.0 * p[0] + 1.0).collect();
        let fit = chebyshev_affine_fit(&s, &v).unwrap();
        assert!(fit.residual < 1e-12);
        assert!((fit.map.linear[0] - 4.0).abs() < 1e-12);
        assert!(fit.map.linear[1].abs() < 1e-12);
    }

    #[test]
    fn repeated_point_and_constant_values() {
        let s = pts(&[&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]]);
        let fit = chebyshev_affine_fit(&s, &[0.0, 2.0, 1.0, 1.0]).unwrap();
        assert_eq!(fit.residual, 1.0);
        assert_eq!(fit.map.linear, vec![0.0, 0.0]);

        let s = pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0]]);
        let fit = chebyshev_affine_fit(&s, &[5.0; 4]).unwrap();
        assert_eq!(fit.residual, 0.0);
        assert_eq!(fit.map.offset, 5.0);
    }

    #[test]
    fn input_errors() {
        let s = pts(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(
            chebyshev_affine_fit(&s, &[0.0; 3]).unwrap_err(),
            Error::InsufficientSamples { needed: 4, got: 3 }
        );
        let s = pts(&[&[0.0], &[1.0], &[2.0]]);
        assert!(chebyshev_affine_fit(&s, &[0.0; 2]).is_err());
        assert!(chebyshev_affine_fit(&s, &[0.0, f64::NAN, 1.0]).is_err());
        assert!(chebyshev_affine_fit::<f64>(&[], &[]).is_err());
    }

    #[test]
    fn works_in_single_precision() {
        let s: Vec<Point<f32>> = (0..=50)
            .map(|i| Point::new(vec![-1.0 + i as f32 / 25.0]).unwrap())
            .collect();
        let v: Vec<f32> = s.iter().map(|p| p[0].abs()).collect();
        let fit = chebyshev_affine_fit(&s, &v).unwrap();
        assert!((fit.residual - 0.5).abs() < 1e-3, "{fit:?}");
    }
}
