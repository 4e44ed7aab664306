//! Minimum-area enclosing rectangle of a planar point set.
//!
//! Andrew's monotone chain builds the convex hull, then rotating calipers walk
//! the hull edges. The optimal rectangle has one side flush with a hull edge,
//! so visiting every edge with the three antipodal pointers advanced
//! monotonically finds it in linear time after the sort.

use std::cmp::Ordering;
use std::f64::consts::{FRAC_PI_2, PI};

use super::Point2;
use crate::error::{Error, Result};

/// Extent assigned to the thin side of degenerate (collinear or single-point)
/// inputs, in meters.
pub const DEGENERATE_EXTENT: f64 = 0.01;

/// Oriented rectangle in the ground plane.
///
/// `extent1` and `extent2` are full side lengths. Axis 1 is the longer side;
/// its direction `angle` lies in `[0, π)`. For squares the axis with the
/// smaller angle is reported as axis 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BevRect {
    pub center: Point2,
    pub extent1: f64,
    pub extent2: f64,
    pub angle: f64,
}

impl BevRect {
    pub fn area(&self) -> f64 {
        self.extent1 * self.extent2
    }

    /// Corners in counter-clockwise order.
    pub fn corners(&self) -> [Point2; 4] {
        let u = Point2::new(1.0, 0.0).rotate(self.angle) * (self.extent1 / 2.0);
        let v = Point2::new(0.0, 1.0).rotate(self.angle) * (self.extent2 / 2.0);
        let c = self.center;
        [c + u + v, c - u + v, c - u - v, c + u - v]
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        let d = (p - self.center).rotate(-self.angle);
        d.x.abs() <= self.extent1 / 2.0 + tol && d.y.abs() <= self.extent2 / 2.0 + tol
    }
}

/// Convex hull in counter-clockwise order, without collinear or duplicate
/// vertices. Starts at the lexicographically smallest point.
pub fn convex_hull(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }

    let turn = |o: Point2, a: Point2, b: Point2| (a - o).cross(b - o);
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

pub fn min_area_rect(points: &[Point2]) -> Result<BevRect> {
    min_area_rect_with_eps(points, DEGENERATE_EXTENT)
}

/// Minimum-area rectangle containing `points`; sides thinner than `eps` are
/// widened to `eps`.
pub fn min_area_rect_with_eps(points: &[Point2], eps: f64) -> Result<BevRect> {
    if points.is_empty() {
        return Err(Error::EmptyInput);
    }
    let hull = convex_hull(points);
    match hull.len() {
        1 => {
            return Ok(BevRect {
                center: hull[0],
                extent1: eps,
                extent2: eps,
                angle: 0.0,
            })
        }
        2 => {
            let d = hull[1] - hull[0];
            return Ok(BevRect {
                center: (hull[0] + hull[1]) * 0.5,
                extent1: d.norm().max(eps),
                extent2: eps,
                angle: axis_angle(d.y.atan2(d.x)),
            });
        }
        _ => {}
    }

    let n = hull.len();
    let at = |i: usize| hull[i % n];
    let edge_dir = |i: usize| {
        let d = at(i + 1) - at(i);
        d * (1.0 / d.norm())
    };

    // Antipodal pointers for edge 0 by linear scan, then advanced CCW.
    let u0 = edge_dir(0);
    let v0 = Point2::new(-u0.y, u0.x);
    let argmax = |f: &dyn Fn(Point2) -> f64| {
        (0..n)
            .max_by(|&a, &b| f(hull[a]).partial_cmp(&f(hull[b])).unwrap_or(Ordering::Equal))
            .unwrap()
    };
    let mut far_u = argmax(&|p| p.dot(u0));
    let mut far_v = argmax(&|p| p.dot(v0));
    let mut near_u = argmax(&|p| -p.dot(u0));

    let mut best: Option<(f64, Point2, f64, f64, Point2)> = None;
    for i in 0..n {
        let u = edge_dir(i);
        let v = Point2::new(-u.y, u.x);
        for _ in 0..n {
            if at(far_u + 1).dot(u) > at(far_u).dot(u) {
                far_u += 1;
            } else {
                break;
            }
        }
        for _ in 0..n {
            if at(far_v + 1).dot(v) > at(far_v).dot(v) {
                far_v += 1;
            } else {
                break;
            }
        }
        for _ in 0..n {
            if at(near_u + 1).dot(u) < at(near_u).dot(u) {
                near_u += 1;
            } else {
                break;
            }
        }
        let (umin, umax) = (at(near_u).dot(u), at(far_u).dot(u));
        let (vmin, vmax) = (at(i).dot(v), at(far_v).dot(v));
        let (eu, ev) = (umax - umin, vmax - vmin);
        let area = eu * ev;
        if best.as_ref().is_none_or(|b| area < b.0) {
            let center = u * ((umin + umax) / 2.0) + v * ((vmin + vmax) / 2.0);
            best = Some((area, u, eu, ev, center));
        }
    }

    let (_, u, eu, ev, center) = best.expect("hull has at least three edges");
    let base = u.y.atan2(u.x);
    let tie = 1e-9 * eu.max(ev).max(1.0);
    let (extent1, extent2, angle) = if (eu - ev).abs() <= tie {
        let a = axis_angle(base);
        let b = axis_angle(base + FRAC_PI_2);
        (eu, ev, a.min(b))
    } else if eu > ev {
        (eu, ev, axis_angle(base))
    } else {
        (ev, eu, axis_angle(base + FRAC_PI_2))
    };
    Ok(BevRect {
        center,
        extent1: extent1.max(eps),
        extent2: extent2.max(eps),
        angle,
    })
}

/// Map a direction to its undirected axis angle in `[0, π)`.
fn axis_angle(a: f64) -> f64 {
    let mut r = a.rem_euclid(PI);
    if r >= PI {
        r -= PI;
    }
    r
}
