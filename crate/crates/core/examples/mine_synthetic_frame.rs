//! Mine one synthetic frame and line each cuboid up with the ground truth.

use inflate3d::geom::wrap_angle;
use inflate3d::inflate::{mine_frame, MinerConfig};
use inflate3d::synth::{generate_scene, ground_truth, SceneSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3);
    let g = generate_scene(&SceneSpec {
        rng_seed: seed,
        ..SceneSpec::default()
    })?;
    let mined = mine_frame(&g.scene.frame, &g.map, &MinerConfig::default())?;
    let truth = ground_truth(&g.scene);
    println!(
        "seed {seed}: {} mined, {} ground-truth objects",
        mined.len(),
        truth.len()
    );

    for m in &mined {
        let c = m.cuboid;
        let nearest = truth.iter().filter(|t| t.class == m.class).min_by(|a, b| {
            let d = |t: &&inflate3d::inflate::MinedCuboid| t.cuboid.bev_center().distance(c.bev_center());
            d(a).total_cmp(&d(b))
        });
        let note = match nearest {
            Some(t) => format!(
                "off by {:.2} m, {:.3} rad",
                t.cuboid.bev_center().distance(c.bev_center()),
                wrap_angle(c.theta - t.cuboid.theta).abs()
            ),
            None => "no ground truth of this class".into(),
        };
        println!(
            "{:<10} conf {:.2}{} at ({:6.1}, {:6.1}) {:.1}×{:.1}×{:.1}  {note}",
            m.class,
            m.confidence,
            if m.dont_care { " (don't care)" } else { "" },
            c.x,
            c.y,
            c.l,
            c.w,
            c.h
        );
    }
    Ok(())
}
