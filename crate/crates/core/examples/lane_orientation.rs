//! Heading from the nearest lane: a grid-indexed query against a curved
//! two-lane road, checked against the brute-force scan.

use std::time::Instant;

use inflate3d::geom::{Point2, Point3};
use inflate3d::hdmap::{nearest_lane_tangent, LaneGraph, LaneIndex};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let arc = |r: f64, reverse: bool| {
        let mut pts: Vec<Point3> = (0..=90)
            .map(|i| {
                let a = (i as f64).to_radians();
                Point3::new(r * a.cos(), r * a.sin(), 0.0)
            })
            .collect();
        if reverse {
            pts.reverse();
        }
        pts
    };
    let graph = LaneGraph::new(vec![arc(50.0, false), arc(53.5, true)])?;
    let index = LaneIndex::new(&graph);

    for q in [
        Point2::new(50.0, 1.0),
        Point2::new(37.0, 37.0),
        Point2::new(1.0, 53.0),
        Point2::new(20.0, 20.0),
    ] {
        let t = index.nearest_lane_tangent(q)?;
        println!(
            "({:5.1}, {:5.1}) -> heading {:6.3} rad, {:5.2} m from lane",
            q.x,
            q.y,
            t.heading(),
            t.distance
        );
    }

    let queries: Vec<Point2> = (0..20_000)
        .map(|i| Point2::new((i % 200) as f64 * 0.3, (i / 200) as f64 * 0.6))
        .collect();
    let t = Instant::now();
    let fast: Vec<f64> = queries
        .iter()
        .map(|&q| index.nearest_lane_tangent(q).map(|t| t.distance))
        .collect::<Result<_, _>>()?;
    let grid = t.elapsed();
    let t = Instant::now();
    let slow: Vec<f64> = queries
        .iter()
        .map(|&q| nearest_lane_tangent(&graph, q).map(|t| t.distance))
        .collect::<Result<_, _>>()?;
    let brute = t.elapsed();
    let worst = fast.iter().zip(&slow).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!(
        "{} queries: grid {grid:.2?}, brute force {brute:.2?}, max difference {worst:.1e} m",
        queries.len()
    );
    Ok(())
}
