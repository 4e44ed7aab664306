//! Mine a synthetic benchmark twice, with lane orientation and with
//! rotating calipers, and compare both against the generated ground truth.
//!
//! cargo run --release --example evaluate_miner -- [frames]

use std::time::Instant;

use inflate3d::inflate::{mine_frame, MinerConfig, OrientationMode};
use inflate3d::metrics::{csv_table, evaluate, EvalBox, EvalConfig};
use inflate3d::synth::{generate_dataset, ground_truth, SceneSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let frames = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(50);
    let spec = SceneSpec {
        frames,
        heading_noise: 0.05,
        occlusion_fraction: 0.3,
        ..SceneSpec::default()
    };
    let t = Instant::now();
    let ds = generate_dataset(&spec)?;
    println!("generated {frames} frames in {:.2?}", t.elapsed());

    let gts: Vec<EvalBox> = ds
        .frames
        .iter()
        .flat_map(|f| {
            ground_truth(f)
                .into_iter()
                .map(|m| EvalBox::from_mined(&f.frame.id, &m))
                .collect::<Vec<_>>()
        })
        .collect();

    let mut reports = Vec::new();
    for (name, mode) in [("map", None), ("calipers", Some(OrientationMode::Calipers))] {
        let mut cfg = MinerConfig::default();
        if let Some(m) = mode {
            cfg.set_orientation(m);
        }
        let t = Instant::now();
        let mut preds = Vec::new();
        for f in &ds.frames {
            for m in mine_frame(&f.frame, &ds.map, &cfg)? {
                preds.push(EvalBox::from_mined(&f.frame.id, &m));
            }
        }
        let report = evaluate(&preds, &gts, &EvalConfig::default());
        println!("{name:>9}: {} ({:.2?})", report.summary_line(), t.elapsed());
        for (class, m) in &report.classes {
            println!(
                "           {class:<10} AP {:.3} ATE {:.3} ASE {:.3} AOE {:.3} tp {} fp {} fn {}",
                m.mean_ap, m.ate, m.ase, m.aoe, m.tp, m.fp, m.fn_
            );
        }
        reports.push((name, report));
    }
    let rows: Vec<(&str, &_)> = reports.iter().map(|(n, r)| (*n, r)).collect();
    print!("{}", csv_table(&rows));
    Ok(())
}
