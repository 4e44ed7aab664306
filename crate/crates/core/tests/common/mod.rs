//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use inflate3d::geom::{sum_of_distances, Cuboid, Point2, Point3, PointCloud};

/// Coarse-to-fine grid search for the point minimizing the sum of distances.
pub fn median_by_grid(cloud: &PointCloud) -> Point3 {
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in cloud.iter() {
        for (k, v) in [p.x, p.y, p.z].into_iter().enumerate() {
            lo[k] = lo[k].min(v);
            hi[k] = hi[k].max(v);
        }
    }
    let mut center = Point3::new((lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0, (lo[2] + hi[2]) / 2.0);
    let mut half = (0..3).map(|k| (hi[k] - lo[k]) / 2.0).fold(0.0, f64::max).max(1e-3);
    const N: i32 = 10;
    while half > 1e-6 {
        let mut best = (f64::INFINITY, center);
        let step = half / N as f64;
        for i in -N..=N {
            for j in -N..=N {
                for k in -N..=N {
                    let q = Point3::new(
                        center.x + i as f64 * step,
                        center.y + j as f64 * step,
                        center.z + k as f64 * step,
                    );
                    let f = sum_of_distances(cloud, q);
                    if f < best.0 {
                        best = (f, q);
                    }
                }
            }
        }
        center = best.1;
        half = 2.0 * step;
    }
    center
}

/// Minimum bounding-rectangle area over 3600 equally spaced orientations.
pub fn rect_area_by_sweep(points: &[Point2]) -> f64 {
    (0..3600)
        .map(|i| {
            let a = i as f64 * FRAC_PI_2 / 3600.0;
            let (mut a0, mut a1, mut b0, mut b1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
            for p in points {
                let q = p.rotate(-a);
                a0 = a0.min(q.x);
                a1 = a1.max(q.x);
                b0 = b0.min(q.y);
                b1 = b1.max(q.y);
            }
            (a1 - a0) * (b1 - b0)
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn inside_bev(c: &Cuboid, p: Point2) -> bool {
    let d = (p - c.bev_center()).rotate(-c.theta);
    d.x.abs() <= c.l / 2.0 && d.y.abs() <= c.w / 2.0
}

/// IoU estimated from uniform samples over the joint bounding box.
pub fn iou_by_sampling(a: &Cuboid, b: &Cuboid, n: usize, rng: &mut ChaCha8Rng) -> f64 {
    let pts: Vec<Point2> = a.footprint().into_iter().chain(b.footprint()).collect();
    let (x0, x1) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p.x), h.max(p.x)));
    let (y0, y1) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p.y), h.max(p.y)));
    let (mut inter, mut union) = (0usize, 0usize);
    for _ in 0..n {
        let p = Point2::new(rng.random_range(x0..x1), rng.random_range(y0..y1));
        let (ia, ib) = (inside_bev(a, p), inside_bev(b, p));
        inter += (ia && ib) as usize;
        union += (ia || ib) as usize;
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}
