use super::params::{ClassParams, UNDER_GROUND_TOL};
use crate::error::{Error, Result};
use crate::geom::{Cuboid, Point2, Point3, PointCloud, DEGENERATE_EXTENT};

fn heading_axes(theta: f64) -> (Point2, Point2) {
    let (s, c) = theta.sin_cos();
    (Point2::new(c, s), Point2::new(-s, c))
}

/// Keep the points inside the class clip box around the seed.
///
/// The box is aligned with `theta` in the ground plane and spans
/// `[ground_z − 0.2, ground_z + d³]` vertically.
pub fn clip_instance(cloud: &PointCloud, seed: Point3, theta: f64, params: &ClassParams, ground_z: f64) -> PointCloud {
    let (u, v) = heading_axes(theta);
    let [d1, d2, d3] = params.clip;
    let s = seed.bev();
    cloud
        .iter()
        .copied()
        .filter(|p| {
            let d = p.bev() - s;
            let dz = p.z - ground_z;
            d.dot(u).abs() <= d1 && d.dot(v).abs() <= d2 && dz <= d3 && dz >= -UNDER_GROUND_TOL
        })
        .collect()
}

/// Tight `theta`-aligned box around `points`, extended down to the ground.
///
/// Degenerate sides are widened to 1 cm.
pub fn initial_cuboid(points: &PointCloud, theta: f64, ground_z: f64) -> Result<Cuboid> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let (u, v) = heading_axes(theta);
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    let mut top = f64::NEG_INFINITY;
    for p in points.iter() {
        let b = p.bev();
        for (k, a) in [u, v].into_iter().enumerate() {
            let t = b.dot(a);
            lo[k] = lo[k].min(t);
            hi[k] = hi[k].max(t);
        }
        top = top.max(p.z);
    }
    let l = (hi[0] - lo[0]).max(DEGENERATE_EXTENT);
    let w = (hi[1] - lo[1]).max(DEGENERATE_EXTENT);
    let h = (top - ground_z).max(DEGENERATE_EXTENT);
    let c = u * ((lo[0] + hi[0]) / 2.0) + v * ((lo[1] + hi[1]) / 2.0);
    Cuboid::new(Point3::new(c.x, c.y, ground_z + h / 2.0), w, l, h, theta)
}

/// Grow `[lo, hi]` to at least `target`, holding the endpoint nearer zero.
fn extend_from_near(lo: f64, hi: f64, target: f64) -> (f64, f64) {
    let size = (hi - lo).max(target);
    if lo.abs() <= hi.abs() {
        (lo, lo + size)
    } else {
        (hi - size, hi)
    }
}

/// Amodal completion toward the class prior.
///
/// Each axis is expressed relative to the ego (heading and cross axes) or to
/// `ground_z` (vertical). The endpoint nearer the origin stays where it is
/// and the far one moves outward until the extent reaches the prior. Extents
/// already larger than the prior are kept. `theta` is unchanged.
pub fn amodal_complete(c: &Cuboid, ego_bev: Point2, params: &ClassParams, ground_z: f64) -> Cuboid {
    let (u, v) = c.axes();
    let r = c.bev_center() - ego_bev;
    let (d1, d2) = (r.dot(u), r.dot(v));
    let (lo1, hi1) = extend_from_near(d1 - c.l / 2.0, d1 + c.l / 2.0, params.prior[0]);
    let (lo2, hi2) = extend_from_near(d2 - c.w / 2.0, d2 + c.w / 2.0, params.prior[1]);
    let (lo3, hi3) = extend_from_near(c.bottom() - ground_z, c.top() - ground_z, params.prior[2]);
    let center = ego_bev + u * ((lo1 + hi1) / 2.0) + v * ((lo2 + hi2) / 2.0);
    Cuboid {
        x: center.x,
        y: center.y,
        z: ground_z + (lo3 + hi3) / 2.0,
        w: hi2 - lo2,
        l: hi1 - lo1,
        h: hi3 - lo3,
        theta: c.theta,
    }
}
