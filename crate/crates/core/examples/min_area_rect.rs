//! Minimum-area BEV rectangle of a partial car outline, and the heading
//! ambiguity it leaves behind.

use std::f64::consts::PI;

use inflate3d::geom::{min_area_rect, Point2};
use inflate3d::inflate::orient_by_calipers;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let yaw = 2.5f64;
    // Rear bumper and left side of a 4.6 × 1.9 m car seen from behind.
    let mut local = Vec::new();
    for i in 0..=19 {
        local.push(Point2::new(-2.3, -0.95 + 0.1 * i as f64));
    }
    for i in 0..=30 {
        local.push(Point2::new(-2.3 + 0.15 * i as f64, 0.95));
    }
    let pts: Vec<Point2> = local.iter().map(|p| p.rotate(yaw) + Point2::new(12.0, 4.0)).collect();

    let r = min_area_rect(&pts)?;
    println!("extents {:.2} × {:.2}, area {:.2}", r.extent1, r.extent2, r.area());
    println!("long axis at {:.3} rad (true heading {yaw:.3})", r.angle);
    let h = orient_by_calipers(&pts)?;
    println!(
        "calipers heading {h:.3}; off by {:.3} rad, the π ambiguity",
        (h - yaw).abs()
    );
    assert!(((h - yaw).abs() - PI).abs() < 1e-6 || (h - yaw).abs() < 1e-6);
    Ok(())
}
