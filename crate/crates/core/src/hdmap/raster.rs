//! Map rasters: ground height with bilinear lookup, and the driveable-area
//! mask with a precomputed Euclidean distance transform.

use crate::error::{Error, Result};
use crate::geom::Point2;

/// Row-major grid anchored at `origin` (lower-left corner of cell (0, 0)).
/// Row `r` covers `y ∈ [origin.y + r·res, origin.y + (r+1)·res)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    pub origin: Point2,
    pub resolution: f64,
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<f32>,
}

impl Raster {
    pub fn new(origin: Point2, resolution: f64, rows: usize, cols: usize, values: Vec<f32>) -> Result<Self> {
        let r = Raster {
            origin,
            resolution,
            rows,
            cols,
            values,
        };
        r.validate()?;
        Ok(r)
    }

    /// Fill a grid by evaluating `f` at every cell center.
    pub fn from_fn(
        origin: Point2,
        resolution: f64,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(Point2) -> f32,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                values.push(f(cell_center(origin, resolution, r, c)));
            }
        }
        Raster::new(origin, resolution, rows, cols, values)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.resolution > 0.0) || !self.resolution.is_finite() {
            return Err(Error::invalid(
                "raster",
                format!("resolution {} must be > 0", self.resolution),
            ));
        }
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::invalid("raster", "rows and cols must be positive"));
        }
        if self.rows * self.cols != self.values.len() {
            return Err(Error::invalid(
                "raster",
                format!("{}x{} grid but {} values", self.rows, self.cols, self.values.len()),
            ));
        }
        if !self.origin.x.is_finite() || !self.origin.y.is_finite() {
            return Err(Error::invalid("raster", "non-finite origin"));
        }
        Ok(())
    }

    pub fn get(&self, row: usize, col: usize) -> f32 {
        self.values[row * self.cols + col]
    }

    pub fn cell_center(&self, row: usize, col: usize) -> Point2 {
        cell_center(self.origin, self.resolution, row, col)
    }

    pub fn contains(&self, p: Point2) -> bool {
        let x1 = self.origin.x + self.cols as f64 * self.resolution;
        let y1 = self.origin.y + self.rows as f64 * self.resolution;
        p.x >= self.origin.x && p.x <= x1 && p.y >= self.origin.y && p.y <= y1
    }

    /// Cell containing `p`, clamped onto the grid.
    pub fn cell_of(&self, p: Point2) -> (usize, usize) {
        let c = ((p.x - self.origin.x) / self.resolution).floor();
        let r = ((p.y - self.origin.y) / self.resolution).floor();
        (
            r.clamp(0.0, (self.rows - 1) as f64) as usize,
            c.clamp(0.0, (self.cols - 1) as f64) as usize,
        )
    }

    /// Bilinear interpolation between the four surrounding cell centers.
    /// Beyond the outermost centers the edge value is held.
    pub fn ground_height_at(&self, p: Point2) -> Result<f64> {
        if !self.contains(p) {
            return Err(Error::OutOfMap { x: p.x, y: p.y });
        }
        let fx = ((p.x - self.origin.x) / self.resolution - 0.5).clamp(0.0, (self.cols - 1) as f64);
        let fy = ((p.y - self.origin.y) / self.resolution - 0.5).clamp(0.0, (self.rows - 1) as f64);
        let c0 = (fx.floor() as usize).min(self.cols.saturating_sub(2));
        let r0 = (fy.floor() as usize).min(self.rows.saturating_sub(2));
        let c1 = (c0 + 1).min(self.cols - 1);
        let r1 = (r0 + 1).min(self.rows - 1);
        let tx = fx - c0 as f64;
        let ty = fy - r0 as f64;
        let v = |r, c| self.get(r, c) as f64;
        let bottom = v(r0, c0) * (1.0 - tx) + v(r0, c1) * tx;
        let top = v(r1, c0) * (1.0 - tx) + v(r1, c1) * tx;
        Ok(bottom * (1.0 - ty) + top * ty)
    }
}

fn cell_center(origin: Point2, res: f64, row: usize, col: usize) -> Point2 {
    Point2::new(origin.x + (col as f64 + 0.5) * res, origin.y + (row as f64 + 0.5) * res)
}

/// Driveable-area mask plus the distance from every cell center to the
/// nearest driveable cell center.
#[derive(Debug, Clone)]
pub struct DriveableArea {
    raster: Raster,
    /// Meters; `f64::INFINITY` when the mask is empty.
    distance: Vec<f64>,
}

impl DriveableArea {
    /// Precompute the distance transform. Cells with value > 0.5 are
    /// driveable.
    pub fn new(raster: Raster) -> Self {
        let mask: Vec<bool> = raster.values.iter().map(|&v| v > 0.5).collect();
        let sq = squared_edt(&mask, raster.rows, raster.cols);
        let distance = sq.into_iter().map(|d| d.sqrt() * raster.resolution).collect();
        DriveableArea { raster, distance }
    }

    pub fn raster(&self) -> &Raster {
        &self.raster
    }

    fn is_driveable(&self, row: usize, col: usize) -> bool {
        self.raster.get(row, col) > 0.5
    }

    /// Distance from the center of cell `(row, col)` to the nearest
    /// driveable cell center.
    pub fn cell_distance(&self, row: usize, col: usize) -> f64 {
        self.distance[row * self.raster.cols + col]
    }

    /// True iff `p` is within `margin` meters of some driveable cell center.
    /// Points outside the raster are never in the region of interest.
    pub fn in_roi(&self, p: Point2, margin: f64) -> bool {
        if !self.raster.contains(p) {
            return false;
        }
        let (r, c) = self.raster.cell_of(p);
        let d_cell = self.cell_distance(r, c);
        if !d_cell.is_finite() {
            return false;
        }
        // |d(p) − d(center)| ≤ |p − center| by the triangle inequality.
        let slack = p.distance(self.raster.cell_center(r, c));
        if d_cell + slack <= margin {
            return true;
        }
        if d_cell - slack > margin {
            return false;
        }
        self.nearest_driveable_within(p, margin)
    }

    /// Exact scan of driveable cells in the window around `p`.
    fn nearest_driveable_within(&self, p: Point2, margin: f64) -> bool {
        let res = self.raster.resolution;
        let reach = (margin / res).ceil() as i64 + 1;
        let (r, c) = self.raster.cell_of(p);
        let (r, c) = (r as i64, c as i64);
        let m2 = margin * margin;
        for rr in (r - reach).max(0)..=(r + reach).min(self.raster.rows as i64 - 1) {
            for cc in (c - reach).max(0)..=(c + reach).min(self.raster.cols as i64 - 1) {
                let (ru, cu) = (rr as usize, cc as usize);
                if self.is_driveable(ru, cu) {
                    let q = self.raster.cell_center(ru, cu);
                    let d = p - q;
                    if d.dot(d) <= m2 {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// Exact squared Euclidean distance transform in cell units
/// (Felzenszwalb–Huttenlocher lower-envelope pass, rows then columns).
fn squared_edt(mask: &[bool], rows: usize, cols: usize) -> Vec<f64> {
    let mut grid: Vec<f64> = mask.iter().map(|&m| if m { 0.0 } else { f64::INFINITY }).collect();
    let mut f = Vec::new();
    let mut d = Vec::new();
    for r in 0..rows {
        f.clear();
        f.extend_from_slice(&grid[r * cols..(r + 1) * cols]);
        edt_1d(&f, &mut d);
        grid[r * cols..(r + 1) * cols].copy_from_slice(&d);
    }
    for c in 0..cols {
        f.clear();
        f.extend((0..rows).map(|r| grid[r * cols + c]));
        edt_1d(&f, &mut d);
        for r in 0..rows {
            grid[r * cols + c] = d[r];
        }
    }
    grid
}

fn edt_1d(f: &[f64], out: &mut Vec<f64>) {
    let n = f.len();
    out.clear();
    out.resize(n, f64::INFINITY);
    let sites: Vec<usize> = (0..n).filter(|&q| f[q].is_finite()).collect();
    if sites.is_empty() {
        return;
    }
    // Lower envelope of parabolas rooted at finite samples.
    let mut v: Vec<usize> = Vec::with_capacity(sites.len());
    let mut z: Vec<f64> = Vec::with_capacity(sites.len() + 1);
    let inter = |q: usize, p: usize| -> f64 {
        let (qf, pf) = (q as f64, p as f64);
        ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * qf - 2.0 * pf)
    };
    for &q in &sites {
        while let Some(&p) = v.last() {
            let s = inter(q, p);
            if s <= z[v.len() - 1] {
                v.pop();
                z.pop();
            } else {
                break;
            }
        }
        if v.is_empty() {
            v.push(q);
            z.push(f64::NEG_INFINITY);
        } else {
            let s = inter(q, *v.last().unwrap());
            v.push(q);
            z.push(s);
        }
    }
    z.push(f64::INFINITY);
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let dq = q as f64 - v[k] as f64;
        *o = dq * dq + f[v[k]];
    }
}
