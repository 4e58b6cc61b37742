//! Points, finite site sets with exact nearest queries, angles and ball volumes.

mod kdtree;
mod point;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

use kdtree::KdTree;
pub use point::Point;
pub(crate) use point::{dot, norm};

/// Tolerance added to the near-minimizer threshold so that exact geometric
/// ties survive rounding: `max(1e-12, 16 eps) * (1 + d(x, K))`.
pub fn tie_tolerance<T: Real>(dist: T) -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(16.0)) * (T::one() + dist)
}

/// Closed ball `B(center, radius)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBall<T>", into = "RawBall<T>")]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct BallSpec<T> {
    center: Point<T>,
    radius: T,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
struct RawBall<T> {
    center: Point<T>,
    radius: T,
}

impl<T: Real> BallSpec<T> {
    pub fn new(center: Point<T>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "ball radius must be positive and finite, got {radius}"
            )));
        }
        Ok(BallSpec { center, radius })
    }

    #[inline]
    pub fn center(&self) -> &Point<T> {
        &self.center
    }

    #[inline]
    pub fn radius(&self) -> T {
        self.radius
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains(&self, p: &Point<T>) -> bool {
        self.center.dist(p) <= self.radius
    }
}

impl<T: Real> TryFrom<RawBall<T>> for BallSpec<T> {
    type Error = Error;

    fn try_from(raw: RawBall<T>) -> Result<Self> {
        BallSpec::new(raw.center, raw.radius)
    }
}

impl<T> From<BallSpec<T>> for RawBall<T> {
    fn from(b: BallSpec<T>) -> Self {
        RawBall {
            center: b.center,
            radius: b.radius,
        }
    }
}

/// Finite stand-in for the compact set K, indexed for exact nearest queries.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<Point<T>>", into = "Vec<Point<T>>")]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct SiteSet<T> {
    dim: usize,
    sites: Vec<Point<T>>,
    index: KdTree<T>,
}

/// Result of a distance query.
#[derive(Clone, Debug, PartialEq)]
pub struct Nearest<'a, T> {
    pub distance: T,
    pub index: usize,
    pub site: &'a Point<T>,
}

/// A site returned by [`SiteSet::near_minimizers`].
#[derive(Clone, Debug, PartialEq)]
pub struct NearSite<T> {
    pub index: usize,
    pub distance: T,
}

impl<T: Real> SiteSet<T> {
    pub fn new(sites: Vec<Point<T>>) -> Result<Self> {
        let first = sites.first().ok_or(Error::Empty("site set"))?;
        let dim = first.dim();
        if let Some(bad) = sites.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        let index = KdTree::build(&sites);
        Ok(SiteSet { dim, sites, index })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn sites(&self) -> &[Point<T>] {
        &self.sites
    }

    pub fn site(&self, i: usize) -> &Point<T> {
        &self.sites[i]
    }

    fn check_dim(&self, x: &Point<T>) -> Result<()> {
        if x.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.dim(),
            });
        }
        Ok(())
    }

    /// `d(x, K)` together with the nearest site (lowest index on ties).
    pub fn dist_to_set(&self, x: &Point<T>) -> Result<Nearest<'_, T>> {
        self.check_dim(x)?;
        let (d2, index) = self.index.nearest(&self.sites, x.coords());
        Ok(Nearest {
            distance: d2.sqrt(),
            index,
            site: &self.sites[index],
        })
    }

    /// Convenience for `dist_to_set(x).distance`, the distance function f.
    pub fn distance(&self, x: &Point<T>) -> Result<T> {
        self.dist_to_set(x).map(|n| n.distance)
    }

    /// Sites z with `d(x, z) <= d(x, K) + slack + tie_tolerance(d(x, K))`,
    /// sorted by distance then index.
    pub fn near_minimizers(&self, x: &Point<T>, slack: T) -> Result<Vec<NearSite<T>>> {
        if !(slack >= T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "slack must be non-negative, got {slack}"
            )));
        }
        let d = self.dist_to_set(x)?.distance;
        let threshold = d + slack + tie_tolerance(d);
        let mut hits = Vec::new();
        self.index
            .within(&self.sites, x.coords(), threshold, &mut hits);
        let mut out: Vec<NearSite<T>> = hits
            .into_iter()
            .map(|index| NearSite {
                index,
                distance: self.sites[index].dist(x),
            })
            .collect();
        out.sort_by(|a, b| {
            a.distance
                .partial_cmp(&b.distance)
                .expect("finite distances")
                .then(a.index.cmp(&b.index))
        });
        Ok(out)
    }

    /// Applies `f` to every site, producing a new indexed set.
    pub fn map_sites(&self, mut f: impl FnMut(&Point<T>) -> Point<T>) -> Result<Self> {
        SiteSet::new(self.sites.iter().map(&mut f).collect())
    }
}

impl<T: Real> TryFrom<Vec<Point<T>>> for SiteSet<T> {
    type Error = Error;

    fn try_from(v: Vec<Point<T>>) -> Result<Self> {
        SiteSet::new(v)
    }
}

impl<T> From<SiteSet<T>> for Vec<Point<T>> {
    fn from(s: SiteSet<T>) -> Self {
        s.sites
    }
}

impl<T: PartialEq> PartialEq for SiteSet<T> {
    fn eq(&self, other: &Self) -> bool {
        self.sites == other.sites
    }
}

#[inline]
fn arm_angle<T: Real>(u: &[T], nu: T, v: &[T], nv: T) -> T {
    let c = dot(u, v) / (nu * nv);
    c.max(-T::one()).min(T::one()).acos()
}

/// Unsigned angle at `x` between the segments `[x, z1]` and `[x, z2]`.
pub fn angle_between<T: Real>(x: &Point<T>, z1: &Point<T>, z2: &Point<T>) -> Result<T> {
    for z in [z1, z2] {
        if z.dim() != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                found: z.dim(),
            });
        }
    }
    let u = z1.sub(x);
    let v = z2.sub(x);
    let (nu, nv) = (norm(&u), norm(&v));
    if nu == T::zero() || nv == T::zero() {
        return Err(Error::ZeroLengthArm);
    }
    Ok(arm_angle(&u, nu, &v, nv))
}

/// Largest pairwise angle seen from an apex, with its witnessing pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PairAngle<T> {
    pub angle: T,
    /// Positions in the input list; `(i, i)` for a singleton.
    pub indices: (usize, usize),
    pub witness: (Point<T>, Point<T>),
}

/// Maximum of [`angle_between`] over unordered pairs of `zs`. The witness is
/// the lexicographically first pair `(i, j)`, `i < j`, attaining the maximum.
pub fn max_pairwise_angle<T: Real>(x: &Point<T>, zs: &[Point<T>]) -> Result<PairAngle<T>> {
    if zs.is_empty() {
        return Err(Error::Empty("angle candidates"));
    }
    let mut arms = Vec::with_capacity(zs.len());
    for z in zs {
        if z.dim() != x.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                found: z.dim(),
            });
        }
        let u = z.sub(x);
        let n = norm(&u);
        if n == T::zero() {
            return Err(Error::ZeroLengthArm);
        }
        arms.push((u, n));
    }
    let mut best: Option<(T, usize, usize)> = None;
    for i in 0..arms.len() {
        for j in (i + 1)..arms.len() {
            let a = arm_angle(&arms[i].0, arms[i].1, &arms[j].0, arms[j].1);
            if best.map_or(true, |(b, _, _)| a > b) {
                best = Some((a, i, j));
            }
        }
    }
    let (angle, i, j) = best.unwrap_or((T::zero(), 0, 0));
    Ok(PairAngle {
        angle,
        indices: (i, j),
        witness: (zs[i].clone(), zs[j].clone()),
    })
}

/// Volume of the unit ball in ℝᵏ, by the recursion ω_k = 2π/k · ω_{k-2}.
pub fn unit_ball_volume<T: Real>(k: usize) -> T {
    let two_pi = T::PI() + T::PI();
    let mut w = if k % 2 == 0 { T::one() } else { T::lit(2.0) };
    let mut j = if k % 2 == 0 { 2 } else { 3 };
    while j <= k {
        w = w * two_pi / T::from_count(j);
        j += 2;
    }
    w
}

/// Lebesgue measure of a ball of radius `radius` in ℝᵏ.
pub fn ball_volume<T: Real>(k: usize, radius: T) -> Result<T> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "dimension must be at least 1".into(),
        ));
    }
    if !(radius > T::zero()) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "radius must be positive and finite, got {radius}"
        )));
    }
    Ok(unit_ball_volume::<T>(k) * radius.powi(k as i32))
}
