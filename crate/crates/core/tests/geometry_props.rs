use std::f64::consts::PI;

use medial_core::geometry::{angle_between, max_pairwise_angle, Point, SiteSet};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pt(c: Vec<f64>) -> Point<f64> {
    Point::new(c).unwrap()
}

/// Linear-scan oracle: `(distance, lowest index attaining it)`.
fn scan_nearest(sites: &[Point<f64>], x: &Point<f64>) -> (f64, usize) {
    let mut best = (f64::INFINITY, usize::MAX);
    for (i, s) in sites.iter().enumerate() {
        let d = s.dist_sq(x);
        if d < best.0 {
            best = (d, i);
        }
    }
    (best.0.sqrt(), best.1)
}

fn scan_near(sites: &[Point<f64>], x: &Point<f64>, slack: f64) -> Vec<usize> {
    let (d, _) = scan_nearest(sites, x);
    let thr = d + slack + 1e-12 * (1.0 + d);
    let mut v: Vec<(f64, usize)> = sites
        .iter()
        .enumerate()
        .map(|(i, s)| (s.dist(x), i))
        .filter(|(di, _)| *di <= thr)
        .collect();
    v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    v.into_iter().map(|(_, i)| i).collect()
}

fn random_cloud(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<Point<f64>> {
    (0..n)
        .map(|_| pt((0..k).map(|_| rng.gen::<f64>()).collect()))
        .collect()
}

#[test]
fn seeded_cloud_matches_linear_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let sites = random_cloud(&mut rng, 100, 2);
    let set = SiteSet::new(sites.clone()).unwrap();
    let x = pt(vec![0.3, 0.7]);
    let n = set.dist_to_set(&x).unwrap();
    let (d, i) = scan_nearest(&sites, &x);
    assert_eq!(n.distance, d);
    assert_eq!(n.index, i);
}

#[test]
fn grid_sites_with_massive_ties_match_scan() {
    // Integer grids produce exact ties at half-integer query points.
    let mut sites = Vec::new();
    for i in 0..12 {
        for j in 0..12 {
            sites.push(pt(vec![i as f64, j as f64]));
        }
    }
    let set = SiteSet::new(sites.clone()).unwrap();
    for qi in 0..23 {
        for qj in 0..23 {
            let x = pt(vec![qi as f64 * 0.5, qj as f64 * 0.5]);
            let n = set.dist_to_set(&x).unwrap();
            assert_eq!((n.distance, n.index), scan_nearest(&sites, &x));
            let near: Vec<usize> = set
                .near_minimizers(&x, 0.0)
                .unwrap()
                .into_iter()
                .map(|s| s.index)
                .collect();
            assert_eq!(near, scan_near(&sites, &x, 0.0));
        }
    }
}

fn cloud_strategy() -> impl Strategy<Value = (usize, Vec<Vec<f64>>, Vec<f64>, f64)> {
    (1usize..=4).prop_flat_map(|k| {
        (
            Just(k),
            prop::collection::vec(prop::collection::vec(-10.0f64..10.0, k), 1..150),
            prop::collection::vec(-12.0f64..12.0, k),
            0.0f64..3.0,
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn index_agrees_with_scan((_k, raw, q, slack) in cloud_strategy()) {
        let sites: Vec<Point<f64>> = raw.into_iter().map(pt).collect();
        let set = SiteSet::new(sites.clone()).unwrap();
        let x = pt(q);
        let n = set.dist_to_set(&x).unwrap();
        prop_assert_eq!((n.distance, n.index), scan_nearest(&sites, &x));
        let near: Vec<usize> = set.near_minimizers(&x, slack).unwrap().into_iter().map(|s| s.index).collect();
        prop_assert_eq!(near, scan_near(&sites, &x, slack));
    }

    #[test]
    fn distance_is_one_lipschitz(
        (k, raw, q, _s) in cloud_strategy(),
        dir in prop::collection::vec(-5.0f64..5.0, 4),
    ) {
        let set = SiteSet::new(raw.into_iter().map(pt).collect()).unwrap();
        let x = pt(q.clone());
        let y = pt(q.iter().zip(&dir[..k]).map(|(a, b)| a + b).collect());
        let fx = set.distance(&x).unwrap();
        let fy = set.distance(&y).unwrap();
        prop_assert!((fx - fy).abs() <= x.dist(&y) * (1.0 + 1e-12));
    }

    #[test]
    fn angle_symmetric_and_rigid_invariant(
        x in prop::collection::vec(-5.0f64..5.0, 3),
        a in prop::collection::vec(-5.0f64..5.0, 3),
        b in prop::collection::vec(-5.0f64..5.0, 3),
        t in prop::collection::vec(-100.0f64..100.0, 3),
        axis in prop::collection::vec(-1.0f64..1.0, 3),
        phi in 0.0f64..(2.0 * PI),
    ) {
        let (px, pa, pb) = (pt(x), pt(a), pt(b));
        prop_assume!(px.dist(&pa) > 1e-3 && px.dist(&pb) > 1e-3);
        let ang = angle_between(&px, &pa, &pb).unwrap();
        prop_assert_eq!(ang, angle_between(&px, &pb, &pa).unwrap());
        prop_assert!((0.0..=PI).contains(&ang));

        let n = (axis.iter().map(|v| v * v).sum::<f64>()).sqrt();
        prop_assume!(n > 1e-3);
        let u: Vec<f64> = axis.iter().map(|v| v / n).collect();
        let motion = |p: &Point<f64>| pt(add(&rotate(p.coords(), &u, phi), &t));
        let moved = angle_between(&motion(&px), &motion(&pa), &motion(&pb)).unwrap();
        prop_assert!((ang - moved).abs() < 1e-9, "{} vs {}", ang, moved);
    }
}

/// Rodrigues rotation of `v` about unit axis `u` by `phi`.
fn rotate(v: &[f64], u: &[f64], phi: f64) -> Vec<f64> {
    let (c, s) = (phi.cos(), phi.sin());
    let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
    let cross = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        u[0] * v[1] - u[1] * v[0],
    ];
    (0..3)
        .map(|i| v[i] * c + cross[i] * s + u[i] * dot * (1.0 - c))
        .collect()
}

fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

#[test]
fn max_angle_matches_exhaustive_scan_on_fifty_directions() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let x = pt(vec![0.0, 0.0]);
    let zs: Vec<Point<f64>> = (0..50)
        .map(|_| {
            let a = rng.gen::<f64>() * 2.0 * PI;
            let r = 0.5 + rng.gen::<f64>();
            pt(vec![r * a.cos(), r * a.sin()])
        })
        .collect();
    let got = max_pairwise_angle(&x, &zs).unwrap();

    // Independent route: planar angles from atan2, wrapped to [0, π].
    let theta: Vec<f64> = zs.iter().map(|z| z[1].atan2(z[0])).collect();
    let mut best = (0.0f64, 0, 0);
    for i in 0..zs.len() {
        for j in (i + 1)..zs.len() {
            let mut d = (theta[i] - theta[j]).abs();
            if d > PI {
                d = 2.0 * PI - d;
            }
            if d > best.0 + 1e-12 {
                best = (d, i, j);
            }
        }
    }
    assert!((got.angle - best.0).abs() < 1e-12);
    assert_eq!(got.indices, (best.1, best.2));
}

#[test]
fn max_angle_equals_pair_maximum_up_to_one_hundred_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for m in [1usize, 2, 3, 10, 57, 100] {
        let k = 2 + m % 3;
        let x = pt((0..k).map(|_| rng.gen::<f64>()).collect());
        let zs: Vec<Point<f64>> = (0..m)
            .map(|_| pt((0..k).map(|_| 2.0 + rng.gen::<f64>() * 3.0).collect()))
            .collect();
        let got = max_pairwise_angle(&x, &zs).unwrap();
        let mut best = (0.0, 0, 0);
        for i in 0..m {
            for j in (i + 1)..m {
                let a = angle_between(&x, &zs[i], &zs[j]).unwrap();
                if a > best.0 {
                    best = (a, i, j);
                }
            }
        }
        assert_eq!(got.angle, best.0);
        if m > 1 {
            assert_eq!(got.indices, (best.1, best.2));
        }
    }
}

#[test]
fn single_precision_index_agrees_with_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sites: Vec<Point<f32>> = (0..300)
        .map(|_| Point::new(vec![rng.gen::<f32>(), rng.gen::<f32>(), rng.gen::<f32>()]).unwrap())
        .collect();
    let set = SiteSet::new(sites.clone()).unwrap();
    for _ in 0..200 {
        let x = Point::new(vec![rng.gen::<f32>(), rng.gen::<f32>(), rng.gen::<f32>()]).unwrap();
        let n = set.dist_to_set(&x).unwrap();
        let mut best = (f32::INFINITY, 0);
        for (i, s) in sites.iter().enumerate() {
            if s.dist_sq(&x) < best.0 {
                best = (s.dist_sq(&x), i);
            }
        }
        assert_eq!(n.index, best.1);
    }
}
