use crate::geom::{Point2, Point3};
use crate::hdmap::{LaneGraph, LaneIndex, Raster};

use super::LaneLayout;

/// Lane polyline spacing along the road.
pub(crate) const LANE_STEP: f64 = 1.0;
pub(crate) const MAP_RESOLUTION: f64 = 0.5;
const MAP_MARGIN: f64 = 20.0;

/// A parabolic multi-lane road, `y = κx²/2` in road coordinates, turned by
/// `yaw` into the map frame. Even lanes run toward +x, odd lanes back.
#[derive(Debug, Clone)]
pub(crate) struct Road {
    pub layout: LaneLayout,
    pub yaw: f64,
    pub slope: f64,
    /// Forward-ordered polyline of every lane.
    pub polylines: Vec<Vec<Point2>>,
}

impl Road {
    pub fn new(layout: LaneLayout, yaw: f64, slope: f64) -> Self {
        let mut road = Road {
            layout,
            yaw,
            slope,
            polylines: Vec::new(),
        };
        let n = (layout.length / LANE_STEP).round() as usize;
        road.polylines = (0..layout.count)
            .map(|j| {
                (0..=n)
                    .map(|i| road.point(-layout.length / 2.0 + i as f64 * LANE_STEP, road.lane_offset(j)))
                    .collect()
            })
            .collect();
        road
    }

    pub fn lane_offset(&self, j: usize) -> f64 {
        (j as f64 - (self.layout.count as f64 - 1.0) / 2.0) * self.layout.spacing
    }

    pub fn half_width(&self) -> f64 {
        self.layout.count as f64 * self.layout.spacing / 2.0
    }

    /// Map point at road abscissa `x`, displaced `offset` along the left normal.
    pub fn point(&self, x: f64, offset: f64) -> Point2 {
        let k = self.layout.curvature;
        let phi = (k * x).atan();
        let c = Point2::new(x, k * x * x / 2.0);
        let n = Point2::new(-phi.sin(), phi.cos());
        (c + n * offset).rotate(self.yaw)
    }

    pub fn ground(&self, p: Point2) -> f64 {
        self.slope * p.rotate(-self.yaw).x
    }

    /// Position and heading on lane `j` at road abscissa `x`, following the
    /// lane's driving direction. `None` beyond the lane ends.
    pub fn on_lane(&self, j: usize, x: f64) -> Option<(Point2, f64)> {
        let poly = &self.polylines[j];
        let s = (x + self.layout.length / 2.0) / LANE_STEP;
        if !(s >= 0.0 && s < (poly.len() - 1) as f64) {
            return None;
        }
        let i = s.floor() as usize;
        let (a, b) = (poly[i], poly[i + 1]);
        let p = a + (b - a) * (s - i as f64);
        let d = if j.is_multiple_of(2) { b - a } else { a - b };
        Some((p, d.y.atan2(d.x)))
    }

    pub fn lane_graph(&self) -> LaneGraph {
        let lanes = self
            .polylines
            .iter()
            .enumerate()
            .map(|(j, poly)| {
                let mut pts: Vec<Point3> = poly.iter().map(|&p| Point3::new(p.x, p.y, self.ground(p))).collect();
                if j % 2 == 1 {
                    pts.reverse();
                }
                pts
            })
            .collect();
        LaneGraph::new(lanes).expect("synthetic lanes are well formed")
    }

    /// Ground-height and driveable rasters on a shared grid around the road.
    pub fn rasters(&self, lanes: &LaneGraph) -> (Raster, Raster) {
        let (mut lo, mut hi) = (
            Point2::new(f64::INFINITY, f64::INFINITY),
            Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for p in self.polylines.iter().flatten() {
            lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let margin = MAP_MARGIN + self.half_width();
        let origin = Point2::new(
            ((lo.x - margin) / MAP_RESOLUTION).floor() * MAP_RESOLUTION,
            ((lo.y - margin) / MAP_RESOLUTION).floor() * MAP_RESOLUTION,
        );
        let cols = ((hi.x + margin - origin.x) / MAP_RESOLUTION).ceil() as usize;
        let rows = ((hi.y + margin - origin.y) / MAP_RESOLUTION).ceil() as usize;
        let ground = Raster::from_fn(origin, MAP_RESOLUTION, rows, cols, |p| self.ground(p) as f32)
            .expect("ground raster is well formed");
        let index = LaneIndex::new(lanes);
        let corridor = self.layout.spacing / 2.0;
        let drive = Raster::from_fn(origin, MAP_RESOLUTION, rows, cols, |p| {
            let d = index.nearest_lane_tangent(p).map_or(f64::INFINITY, |t| t.distance);
            if d <= corridor {
                1.0
            } else {
                0.0
            }
        })
        .expect("drive raster is well formed");
        (ground, drive)
    }
}
