//! Write a small synthetic dataset to disk and list what landed there.
//!
//! cargo run --release --example synth_dataset -- <out_dir>

use std::path::PathBuf;

use inflate3d::synth::{generate_dataset, write_dataset, SceneSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out: PathBuf = std::env::args().nth(1).unwrap_or_else(|| "synth_out".into()).into();
    let spec = SceneSpec {
        frames: 3,
        occlusion_fraction: 0.2,
        ..SceneSpec::default()
    };
    let ds = generate_dataset(&spec)?;
    write_dataset(&ds, &out)?;

    let mut files = Vec::new();
    let mut stack = vec![out.clone()];
    while let Some(dir) = stack.pop() {
        for e in std::fs::read_dir(&dir)? {
            let e = e?;
            if e.file_type()?.is_dir() {
                stack.push(e.path());
            } else {
                files.push((e.path(), e.metadata()?.len()));
            }
        }
    }
    files.sort();
    for (p, len) in files {
        println!("{:>9}  {}", len, p.strip_prefix(&out)?.display());
    }
    Ok(())
}
