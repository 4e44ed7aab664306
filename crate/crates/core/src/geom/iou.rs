//! Bird's-eye-view overlap of yawed boxes by convex polygon clipping.

use super::{Cuboid, Point2};

const AREA_FLOOR: f64 = 1e-12;

/// Signed shoelace area; positive for counter-clockwise polygons.
pub fn polygon_area(poly: &[Point2]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..poly.len() {
        let j = (i + 1) % poly.len();
        s += poly[i].cross(poly[j]);
    }
    s / 2.0
}

/// Sutherland–Hodgman clip of `subject` by the convex, counter-clockwise
/// polygon `clip`.
pub fn clip_convex(subject: &[Point2], clip: &[Point2]) -> Vec<Point2> {
    let mut out: Vec<Point2> = subject.to_vec();
    for i in 0..clip.len() {
        if out.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % clip.len()];
        let edge = b - a;
        let side = |p: Point2| edge.cross(p - a);
        let input = std::mem::take(&mut out);
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            let (sc, sp) = (side(cur), side(prev));
            if sc >= 0.0 {
                if sp < 0.0 {
                    out.push(intersect(prev, cur, sp, sc));
                }
                out.push(cur);
            } else if sp >= 0.0 {
                out.push(intersect(prev, cur, sp, sc));
            }
        }
    }
    out
}

fn intersect(p: Point2, q: Point2, sp: f64, sq: f64) -> Point2 {
    let t = sp / (sp - sq);
    p + (q - p) * t
}

/// Intersection-over-union of the two BEV footprints, in `[0, 1]`.
pub fn bev_iou(a: &Cuboid, b: &Cuboid) -> f64 {
    let pa = a.footprint();
    let pb = b.footprint();
    let area_a = a.w * a.l;
    let area_b = b.w * b.l;
    if pa == pb {
        return 1.0;
    }
    // Cheap reject on circumscribed circles.
    let ra = a.w.hypot(a.l) / 2.0;
    let rb = b.w.hypot(b.l) / 2.0;
    if a.bev_center().distance(b.bev_center()) > ra + rb {
        return 0.0;
    }
    let inter = polygon_area(&clip_convex(&pa, &pb));
    if inter < AREA_FLOOR {
        return 0.0;
    }
    let union = area_a + area_b - inter;
    (inter / union).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point3;
    use std::f64::consts::FRAC_PI_4;

    fn cub(x: f64, y: f64, w: f64, l: f64, theta: f64) -> Cuboid {
        Cuboid::new(Point3::new(x, y, 0.0), w, l, 1.0, theta).unwrap()
    }

    #[test]
    fn identical_is_one() {
        let a = cub(1.0, 2.0, 2.0, 4.0, 0.3);
        assert_eq!(bev_iou(&a, &a), 1.0);
    }

    #[test]
    fn disjoint_is_zero() {
        assert_eq!(
            bev_iou(&cub(0.0, 0.0, 1.0, 1.0, 0.0), &cub(5.0, 0.0, 1.0, 1.0, 0.3)),
            0.0
        );
        // Touching edges share no area.
        assert_eq!(
            bev_iou(&cub(0.0, 0.0, 1.0, 1.0, 0.0), &cub(1.0, 0.0, 1.0, 1.0, 0.0)),
            0.0
        );
    }

    #[test]
    fn half_overlap_axis_aligned() {
        let v = bev_iou(&cub(0.0, 0.0, 1.0, 2.0, 0.0), &cub(1.0, 0.0, 1.0, 2.0, 0.0));
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rotated_square_matches_octagon_area() {
        // Unit square ∩ itself rotated 45° is a regular octagon of area 2(√2−1).
        let v = bev_iou(&cub(0.0, 0.0, 1.0, 1.0, 0.0), &cub(0.0, 0.0, 1.0, 1.0, FRAC_PI_4));
        let inter = 2.0 * (2f64.sqrt() - 1.0);
        assert!((v - inter / (2.0 - inter)).abs() < 1e-12);
    }

    #[test]
    fn shoelace_orientation() {
        let sq = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        assert!((polygon_area(&sq) - 1.0).abs() < 1e-15);
        let mut rev = sq;
        rev.reverse();
        assert!((polygon_area(&rev) + 1.0).abs() < 1e-15);
    }
}
