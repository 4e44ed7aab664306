use serde::{Deserialize, Serialize};

use super::{wrap_angle, Point2, Point3};
use crate::error::{Error, Result};

/// Amodal 3D box `[x, y, z, w, l, h, θ]`.
///
/// `(x, y, z)` is the box center. `l` is measured along the heading `theta`,
/// `w` across it and `h` vertically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cuboid {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub w: f64,
    pub l: f64,
    pub h: f64,
    pub theta: f64,
}

impl Cuboid {
    /// Build a cuboid, wrapping `theta` and rejecting non-positive sizes.
    pub fn new(center: Point3, w: f64, l: f64, h: f64, theta: f64) -> Result<Self> {
        let c = Cuboid {
            x: center.x,
            y: center.y,
            z: center.z,
            w,
            l,
            h,
            theta: wrap_angle(theta),
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.x, self.y, self.z, self.w, self.l, self.h, self.theta];
        if !vals.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("cuboid", "non-finite parameter"));
        }
        if !(self.w > 0.0 && self.l > 0.0 && self.h > 0.0) {
            return Err(Error::invalid(
                "cuboid",
                format!("sizes must be positive, got w={} l={} h={}", self.w, self.l, self.h),
            ));
        }
        Ok(())
    }

    pub fn center(&self) -> Point3 {
        Point3::new(self.x, self.y, self.z)
    }

    pub fn bev_center(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    pub fn bottom(&self) -> f64 {
        self.z - self.h / 2.0
    }

    pub fn top(&self) -> f64 {
        self.z + self.h / 2.0
    }

    /// Unit heading vector and its left-hand normal in the ground plane.
    pub fn axes(&self) -> (Point2, Point2) {
        let (s, c) = self.theta.sin_cos();
        (Point2::new(c, s), Point2::new(-s, c))
    }

    /// BEV footprint corners in counter-clockwise order: front-left,
    /// rear-left, rear-right, front-right.
    pub fn footprint(&self) -> [Point2; 4] {
        let (u, v) = self.axes();
        let c = self.bev_center();
        let a = u * (self.l / 2.0);
        let b = v * (self.w / 2.0);
        [c + a + b, c - a + b, c - a - b, c + a - b]
    }

    /// Express a point in the box frame: (along heading, across, up).
    pub fn to_local(&self, p: Point3) -> Point3 {
        let (u, v) = self.axes();
        let d = p.bev() - self.bev_center();
        Point3::new(d.dot(u), d.dot(v), p.z - self.z)
    }

    pub fn contains(&self, p: Point3, tol: f64) -> bool {
        let q = self.to_local(p);
        q.x.abs() <= self.l / 2.0 + tol && q.y.abs() <= self.w / 2.0 + tol && q.z.abs() <= self.h / 2.0 + tol
    }

    pub fn volume(&self) -> f64 {
        self.w * self.l * self.h
    }
}

/// The eight corners of `c`: the four footprint corners at the bottom face
/// (front-left, rear-left, rear-right, front-right), then the same four at
/// the top face.
pub fn cuboid_corners(c: &Cuboid) -> [Point3; 8] {
    let fp = c.footprint();
    let (lo, hi) = (c.bottom(), c.top());
    let mut out = [Point3::default(); 8];
    for (i, p) in fp.iter().enumerate() {
        out[i] = Point3::new(p.x, p.y, lo);
        out[i + 4] = Point3::new(p.x, p.y, hi);
    }
    out
}
