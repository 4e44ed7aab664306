//! Lane centerlines and the nearest-lane tangent query.

use crate::error::{Error, Result};
use crate::geom::{Point2, Point3};

const MIN_SPACING: f64 = 1e-6;

/// Directed lane centerlines in the map frame. Point order is the direction
/// of travel.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaneGraph {
    pub lanes: Vec<Vec<Point3>>,
}

impl LaneGraph {
    pub fn new(lanes: Vec<Vec<Point3>>) -> Result<Self> {
        let g = LaneGraph { lanes };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, lane) in self.lanes.iter().enumerate() {
            if lane.len() < 2 {
                return Err(Error::invalid(
                    "lane graph",
                    format!("lane {i} has fewer than 2 points"),
                ));
            }
            if let Some(p) = lane.iter().find(|p| !p.is_finite()) {
                return Err(Error::invalid(
                    "lane graph",
                    format!("lane {i} has non-finite point {p:?}"),
                ));
            }
            for (j, w) in lane.windows(2).enumerate() {
                if w[0].distance(w[1]) <= MIN_SPACING {
                    return Err(Error::invalid(
                        "lane graph",
                        format!("lane {i}: points {j} and {} coincide", j + 1),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Unit direction `(l1, l2)` of the closest lane segment and the BEV distance
/// to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaneTangent {
    pub direction: Point2,
    pub distance: f64,
    pub lane: usize,
    pub segment: usize,
}

impl LaneTangent {
    /// Heading `atan2(l2, l1)`.
    pub fn heading(&self) -> f64 {
        self.direction.y.atan2(self.direction.x)
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lane: usize,
    index: usize,
    a: Point2,
    b: Point2,
}

impl Segment {
    fn distance(&self, p: Point2) -> f64 {
        let d = self.b - self.a;
        let t = ((p - self.a).dot(d) / d.dot(d)).clamp(0.0, 1.0);
        p.distance(self.a + d * t)
    }
}

/// Uniform grid over segment bounding boxes. Queries walk Chebyshev rings of
/// cells outward until no unvisited cell can hold a closer segment, so the
/// answer equals a linear scan over all segments.
#[derive(Debug, Clone)]
pub struct LaneIndex {
    segments: Vec<Segment>,
    origin: Point2,
    cell: f64,
    nx: i64,
    ny: i64,
    cells: Vec<Vec<u32>>,
}

pub const DEFAULT_LANE_CELL: f64 = 8.0;

impl LaneIndex {
    pub fn new(graph: &LaneGraph) -> Self {
        Self::with_cell_size(graph, DEFAULT_LANE_CELL)
    }

    pub fn with_cell_size(graph: &LaneGraph, cell: f64) -> Self {
        let mut segments = Vec::new();
        for (li, lane) in graph.lanes.iter().enumerate() {
            for (si, w) in lane.windows(2).enumerate() {
                let (a, b) = (w[0].bev(), w[1].bev());
                // vertical segments have no BEV direction
                if a.distance(b) > MIN_SPACING {
                    segments.push(Segment {
                        lane: li,
                        index: si,
                        a,
                        b,
                    });
                }
            }
        }
        let (mut lo, mut hi) = (
            Point2::new(f64::INFINITY, f64::INFINITY),
            Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY),
        );
        for s in &segments {
            for p in [s.a, s.b] {
                lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
            }
        }
        if segments.is_empty() {
            lo = Point2::default();
            hi = Point2::default();
        }
        let nx = (((hi.x - lo.x) / cell).floor() as i64 + 1).max(1);
        let ny = (((hi.y - lo.y) / cell).floor() as i64 + 1).max(1);
        let mut cells = vec![Vec::new(); (nx * ny) as usize];
        for (k, s) in segments.iter().enumerate() {
            let cx0 = ((s.a.x.min(s.b.x) - lo.x) / cell).floor() as i64;
            let cx1 = ((s.a.x.max(s.b.x) - lo.x) / cell).floor() as i64;
            let cy0 = ((s.a.y.min(s.b.y) - lo.y) / cell).floor() as i64;
            let cy1 = ((s.a.y.max(s.b.y) - lo.y) / cell).floor() as i64;
            for cy in cy0.max(0)..=cy1.min(ny - 1) {
                for cx in cx0.max(0)..=cx1.min(nx - 1) {
                    cells[(cy * nx + cx) as usize].push(k as u32);
                }
            }
        }
        LaneIndex {
            segments,
            origin: lo,
            cell,
            nx,
            ny,
            cells,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Visit segment ids in the in-grid cells of Chebyshev ring `ring`
    /// around cell `(cx, cy)`.
    fn for_ring(&self, cx: i64, cy: i64, ring: i64, mut f: impl FnMut(usize)) {
        let mut visit = |x: i64, y: i64| {
            for &k in &self.cells[(y * self.nx + x) as usize] {
                f(k as usize);
            }
        };
        let (x0, x1) = ((cx - ring).max(0), (cx + ring).min(self.nx - 1));
        let (y0, y1) = ((cy - ring).max(0), (cy + ring).min(self.ny - 1));
        if x0 > x1 || y0 > y1 {
            return;
        }
        if ring == 0 {
            visit(cx, cy);
            return;
        }
        for y in [cy - ring, cy + ring] {
            if (0..self.ny).contains(&y) {
                for x in x0..=x1 {
                    visit(x, y);
                }
            }
        }
        for x in [cx - ring, cx + ring] {
            if (0..self.nx).contains(&x) {
                for y in (cy - ring + 1).max(0)..=(cy + ring - 1).min(self.ny - 1) {
                    visit(x, y);
                }
            }
        }
    }

    /// Closest segment to `p` in BEV; ties go to the lowest
    /// `(lane, segment)` pair.
    pub fn nearest_lane_tangent(&self, p: Point2) -> Result<LaneTangent> {
        if self.segments.is_empty() {
            return Err(Error::EmptyMap);
        }
        let pcx = ((p.x - self.origin.x) / self.cell).floor() as i64;
        let pcy = ((p.y - self.origin.y) / self.cell).floor() as i64;
        // first ring that touches the grid
        let gap_x = (-pcx).max(pcx - (self.nx - 1)).max(0);
        let gap_y = (-pcy).max(pcy - (self.ny - 1)).max(0);
        let first = gap_x.max(gap_y);
        let last = first + self.nx.max(self.ny);

        let mut best: Option<(f64, usize, usize, usize)> = None;
        for ring in first..=last {
            self.for_ring(pcx, pcy, ring, |k| {
                let s = &self.segments[k];
                let cand = (s.distance(p), s.lane, s.index, k);
                if best.is_none_or(|b| (cand.0, cand.1, cand.2) < (b.0, b.1, b.2)) {
                    best = Some(cand);
                }
            });
            if let Some(b) = best {
                // Cells on ring ≥ ring+1 lie at least ring·cell from p.
                if b.0 < ring as f64 * self.cell {
                    break;
                }
            }
        }

        let (distance, lane, segment, k) = best.ok_or(Error::EmptyMap)?;
        let s = &self.segments[k];
        let d = s.b - s.a;
        Ok(LaneTangent {
            direction: d * (1.0 / d.norm()),
            distance,
            lane,
            segment,
        })
    }
}

/// Linear-scan reference for [`LaneIndex::nearest_lane_tangent`].
pub fn nearest_lane_tangent(g: &LaneGraph, p: Point2) -> Result<LaneTangent> {
    let mut best: Option<LaneTangent> = None;
    for (li, lane) in g.lanes.iter().enumerate() {
        for (si, w) in lane.windows(2).enumerate() {
            let s = Segment {
                lane: li,
                index: si,
                a: w[0].bev(),
                b: w[1].bev(),
            };
            if s.a.distance(s.b) <= MIN_SPACING {
                continue;
            }
            let d = s.distance(p);
            if best.is_none_or(|b| d < b.distance) {
                let dir = s.b - s.a;
                best = Some(LaneTangent {
                    direction: dir * (1.0 / dir.norm()),
                    distance: d,
                    lane: li,
                    segment: si,
                });
            }
        }
    }
    best.ok_or(Error::EmptyMap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lane(pts: &[(f64, f64)]) -> Vec<Point3> {
        pts.iter().map(|&(x, y)| Point3::new(x, y, 0.0)).collect()
    }

    #[test]
    fn axis_aligned_lane() {
        let g = LaneGraph::new(vec![lane(&[(-10.0, 0.0), (10.0, 0.0)])]).unwrap();
        let t = LaneIndex::new(&g).nearest_lane_tangent(Point2::new(3.0, 0.5)).unwrap();
        assert_eq!(t.direction, Point2::new(1.0, 0.0));
        assert!((t.distance - 0.5).abs() < 1e-12);
    }

    #[test]
    fn on_lane_along_y() {
        let g = LaneGraph::new(vec![lane(&[(0.0, -5.0), (0.0, 5.0)])]).unwrap();
        let t = LaneIndex::new(&g).nearest_lane_tangent(Point2::new(0.0, 1.0)).unwrap();
        assert_eq!(t.direction, Point2::new(0.0, 1.0));
        assert_eq!(t.distance, 0.0);
    }

    #[test]
    fn two_segment_polyline() {
        let g = LaneGraph::new(vec![lane(&[(0.0, 0.0), (10.0, 0.0), (10.0, 10.0)])]).unwrap();
        let t = LaneIndex::with_cell_size(&g, 2.0)
            .nearest_lane_tangent(Point2::new(11.0, 4.0))
            .unwrap();
        assert_eq!(t.direction, Point2::new(0.0, 1.0));
        assert!((t.distance - 1.0).abs() < 1e-12);
        assert_eq!((t.lane, t.segment), (0, 1));
    }

    #[test]
    fn ties_prefer_lowest_lane() {
        let g = LaneGraph::new(vec![
            lane(&[(0.0, 1.0), (10.0, 1.0)]),
            lane(&[(10.0, -1.0), (0.0, -1.0)]),
        ])
        .unwrap();
        let t = LaneIndex::with_cell_size(&g, 1.0)
            .nearest_lane_tangent(Point2::new(5.0, 0.0))
            .unwrap();
        assert_eq!(t.lane, 0);
        let g = LaneGraph::new(vec![
            lane(&[(10.0, -1.0), (0.0, -1.0)]),
            lane(&[(0.0, 1.0), (10.0, 1.0)]),
        ])
        .unwrap();
        let t = LaneIndex::with_cell_size(&g, 1.0)
            .nearest_lane_tangent(Point2::new(5.0, 0.0))
            .unwrap();
        assert_eq!(t.lane, 0);
        assert_eq!(t.direction, Point2::new(-1.0, 0.0));
    }

    #[test]
    fn far_query_outside_grid() {
        let g = LaneGraph::new(vec![
            lane(&[(0.0, 0.0), (10.0, 0.0)]),
            lane(&[(0.0, 50.0), (10.0, 50.0)]),
        ])
        .unwrap();
        let idx = LaneIndex::with_cell_size(&g, 3.0);
        for p in [
            Point2::new(-500.0, 30.0),
            Point2::new(1e4, -1e4),
            Point2::new(5.0, 26.0),
        ] {
            let a = idx.nearest_lane_tangent(p).unwrap();
            let b = nearest_lane_tangent(&g, p).unwrap();
            assert!((a.distance - b.distance).abs() < 1e-9, "{p:?}");
            assert_eq!((a.lane, a.segment), (b.lane, b.segment));
        }
    }

    #[test]
    fn empty_graph() {
        let g = LaneGraph::default();
        assert!(matches!(
            LaneIndex::new(&g).nearest_lane_tangent(Point2::default()),
            Err(Error::EmptyMap)
        ));
        assert!(matches!(
            nearest_lane_tangent(&g, Point2::default()),
            Err(Error::EmptyMap)
        ));
    }

    #[test]
    fn validation() {
        assert!(LaneGraph::new(vec![lane(&[(0.0, 0.0)])]).is_err());
        assert!(LaneGraph::new(vec![lane(&[(0.0, 0.0), (0.0, 0.0)])]).is_err());
    }
}
