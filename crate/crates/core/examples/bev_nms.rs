//! Greedy BEV non-maximum suppression over overlapping candidates.

use inflate3d::geom::{bev_iou, Cuboid, Point3};
use inflate3d::inflate::{nms_bev, MinedCuboid};

fn car(x: f64, y: f64, theta: f64, confidence: f64) -> MinedCuboid {
    MinedCuboid {
        cuboid: Cuboid::new(Point3::new(x, y, 0.8), 1.9, 4.6, 1.6, theta).unwrap(),
        class: "vehicle".into(),
        confidence,
        dont_care: false,
    }
}

fn main() {
    let cands = vec![
        car(10.0, 0.0, 0.0, 0.92),
        car(10.4, 0.1, 0.05, 0.85),
        car(12.5, 0.0, 0.0, 0.80),
        car(20.0, 3.5, 0.0, 0.60),
        car(10.0, 0.0, 1.57, 0.55),
    ];
    for (i, a) in cands.iter().enumerate() {
        let row: Vec<String> = cands
            .iter()
            .map(|b| format!("{:.2}", bev_iou(&a.cuboid, &b.cuboid)))
            .collect();
        println!("{i}: conf {:.2}  iou [{}]", a.confidence, row.join(" "));
    }
    for thresh in [0.1, 0.3, 0.5] {
        let kept = nms_bev(&cands, thresh);
        let conf: Vec<String> = kept.iter().map(|k| format!("{:.2}", k.confidence)).collect();
        println!("iou < {thresh}: keeps {}", conf.join(", "));
    }
}
