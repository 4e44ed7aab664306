use std::f64::consts::{FRAC_PI_2, PI};

use super::params::{SEED_MAX_ITER, SEED_TOL};
use crate::error::Result;
use crate::geom::{geometric_median, min_area_rect, Point2, Point3, PointCloud};
use crate::hdmap::LaneIndex;

/// Geometric median of a proposal.
pub fn seed_point(points: &PointCloud) -> Result<Point3> {
    geometric_median(points, SEED_TOL, SEED_MAX_ITER)
}

/// Heading of the closest lane at the seed, or `None` when that lane is
/// farther than `max_lane_dist`.
pub fn orient_by_map(seed: Point3, lanes: &LaneIndex, max_lane_dist: f64) -> Result<Option<f64>> {
    let t = lanes.nearest_lane_tangent(seed.bev())?;
    Ok((t.distance <= max_lane_dist).then(|| t.heading()))
}

/// Long-axis direction of the minimum-area rectangle, in `(−π/2, π/2]`.
///
/// The sign of the heading is not observable from the footprint alone, so
/// half of all objects come out reversed.
pub fn orient_by_calipers(points: &[Point2]) -> Result<f64> {
    let a = min_area_rect(points)?.angle;
    Ok(if a > FRAC_PI_2 { a - PI } else { a })
}
