//! synth → mine → eval through the same entry points the binary uses,
//! in a temporary directory.

use inflate3d::cli::{apply_overrides, cmd_eval, cmd_mine, cmd_synth, EvalOptions, RunConfig};
use inflate3d::inflate::OrientationMode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let tmp = tempfile::tempdir()?;
    let data = tmp.path().join("data");
    let spec = cmd_synth(None, &data, Some(5), None)?;
    println!("synthesized {} frames", spec.frames);

    for mode in [OrientationMode::Map, OrientationMode::Calipers] {
        let mut cfg = RunConfig::default();
        apply_overrides(&mut cfg, Some(mode), Some(2))?;
        let out = tmp.path().join(format!("{mode:?}").to_lowercase());
        let manifest = cmd_mine(&data, &cfg, &out)?;
        let report = cmd_eval(
            &EvalOptions {
                pred: &out,
                gt: &data.join("gt"),
                dataset: Some(&data),
                out: None,
            },
            &cfg,
        )?;
        let n: usize = manifest.counts.values().map(|c| c.total).sum();
        println!(
            "{mode:?}: {n} cuboids, config {}…  {}",
            &manifest.config_sha256[..12],
            report.summary_line()
        );
    }
    Ok(())
}
