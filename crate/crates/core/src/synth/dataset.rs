use std::path::Path;

use super::{ground_truth, SynthDataset};
use crate::dataset::{ensure_dir, DatasetLayout};
use crate::error::Result;
use crate::io_util::write_atomic;
use crate::labels::{write_labels, LABEL_EXT};

/// Write map, frames, ground truth and the resolved spec under `root`.
pub fn write_dataset(ds: &SynthDataset, root: &Path) -> Result<()> {
    let layout = DatasetLayout::new(root);
    layout.write_map(&ds.map)?;
    ensure_dir(&layout.frames_dir())?;
    ensure_dir(&layout.gt_dir())?;
    for f in &ds.frames {
        layout.write_frame(&f.frame)?;
        let gt = layout.gt_dir().join(format!("{}.{LABEL_EXT}", f.frame.id));
        write_labels(&gt, &f.frame.id, &ground_truth(f))?;
    }
    let spec = serde_json::to_vec_pretty(&ds.spec).expect("spec serializes");
    write_atomic(&root.join("scene_spec.json"), &spec)
}
