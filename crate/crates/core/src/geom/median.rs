//! Geometric median by Weiszfeld iteration.
//!
//! Iterates that land on a data point use the Vardi–Zhang modification: the
//! coincident points are dropped from the weighted mean and the step is
//! shortened by the ratio of their multiplicity to the norm of the remaining
//! pull. If that pull cannot overcome the multiplicity the data point is
//! itself the minimizer.

use super::{Point3, PointCloud};
use crate::error::{Error, Result};

const COINCIDENT: f64 = 1e-12;

/// Sum of Euclidean distances from `y` to every point of `cloud`.
pub fn sum_of_distances(cloud: &PointCloud, y: Point3) -> f64 {
    cloud.iter().map(|p| p.distance(y)).sum()
}

/// Point minimizing the sum of distances to `cloud`.
///
/// Stops once an iteration moves the estimate by less than `tol` meters or
/// after `max_iter` iterations. Starts from the centroid, so the result is
/// deterministic for a given point order.
pub fn geometric_median(cloud: &PointCloud, tol: f64, max_iter: usize) -> Result<Point3> {
    if cloud.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance", format!("{tol} must be > 0")));
    }
    if cloud.len() == 1 {
        return Ok(cloud.points[0]);
    }

    let n = cloud.len() as f64;
    let mut y = cloud.iter().fold(Point3::default(), |acc, &p| acc + p) * (1.0 / n);

    for _ in 0..max_iter {
        let mut num = Point3::default();
        let mut denom = 0.0;
        let mut pull = Point3::default();
        let mut coincident = 0usize;
        for &p in cloud.iter() {
            let d = p.distance(y);
            if d < COINCIDENT {
                coincident += 1;
                continue;
            }
            let w = 1.0 / d;
            num = num + p * w;
            denom += w;
            pull = pull + (p - y) * w;
        }
        if denom == 0.0 {
            // every point coincides with y
            return Ok(y);
        }
        let weiszfeld = num * (1.0 / denom);
        let next = if coincident == 0 {
            weiszfeld
        } else {
            let r = pull.norm();
            let eta = coincident as f64;
            if r <= eta {
                return Ok(y);
            }
            let k = eta / r;
            weiszfeld * (1.0 - k) + y * k
        };
        let step = next.distance(y);
        y = next;
        if step < tol {
            break;
        }
    }
    Ok(y)
}
