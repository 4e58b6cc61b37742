use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// A point of ℝᵏ with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<T>", into = "Vec<T>")]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct Point<T>(Vec<T>);

impl<T: Real> Point<T> {
    pub fn new(coords: Vec<T>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Empty("point coordinates"));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Point(coords))
    }

    /// Builds a point from coordinates already known to be finite.
    pub(crate) fn from_vec_unchecked(coords: Vec<T>) -> Self {
        debug_assert!(!coords.is_empty() && coords.iter().all(|c| c.is_finite()));
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![T::zero(); dim.max(1)])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn coords(&self) -> &[T] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<T> {
        self.0
    }

    /// Squared Euclidean distance, accumulated coordinate by coordinate.
    #[inline]
    pub fn dist_sq(&self, other: &Point<T>) -> T {
        dist_sq(&self.0, &other.0)
    }

    #[inline]
    pub fn dist(&self, other: &Point<T>) -> T {
        self.dist_sq(other).sqrt()
    }

    pub fn norm(&self) -> T {
        norm(&self.0)
    }

    /// `self - other` as a raw vector.
    pub fn sub(&self, other: &Point<T>) -> Vec<T> {
        self.0.iter().zip(&other.0).map(|(&a, &b)| a - b).collect()
    }

    /// `self + s * dir`.
    pub fn offset(&self, dir: &[T], s: T) -> Point<T> {
        Point(self.0.iter().zip(dir).map(|(&a, &d)| a + s * d).collect())
    }

    /// Affine interpolation `(1 - t) * self + t * other`.
    pub fn lerp(&self, other: &Point<T>, t: T) -> Point<T> {
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(&a, &b)| a + t * (b - a))
                .collect(),
        )
    }

    pub fn scaled(&self, s: T) -> Point<T> {
        Point(self.0.iter().map(|&a| a * s).collect())
    }
}

impl<T: Real> TryFrom<Vec<T>> for Point<T> {
    type Error = Error;

    fn try_from(v: Vec<T>) -> Result<Self> {
        Point::new(v)
    }
}

impl<T> From<Point<T>> for Vec<T> {
    fn from(p: Point<T>) -> Vec<T> {
        p.0
    }
}

impl<T> Index<usize> for Point<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

#[inline]
pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub(crate) fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

#[inline]
pub(crate) fn dist_sq<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_empty() {
        assert_eq!(
            Point::<f64>::new(vec![]),
            Err(Error::Empty("point coordinates"))
        );
        assert_eq!(Point::new(vec![0.0, f64::NAN]), Err(Error::NonFinite(1)));
        assert_eq!(Point::new(vec![f64::INFINITY]), Err(Error::NonFinite(0)));
    }

    #[test]
    fn distance_3_4_5() {
        let a = Point::new(vec![3.0, 4.0]).unwrap();
        let o = Point::origin(2);
        assert_eq!(a.dist(&o), 5.0);
        assert_eq!(a.norm(), 5.0);
    }

    #[test]
    fn serde_validates() {
        let p: Point<f64> = serde_json::from_str("[1.0, 2.5]").unwrap();
        assert_eq!(p.coords(), &[1.0, 2.5]);
        assert!(serde_json::from_str::<Point<f64>>("[]").is_err());
        assert_eq!(serde_json::to_string(&p).unwrap(), "[1.0,2.5]");
    }
}
