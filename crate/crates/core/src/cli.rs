//! Run orchestration behind the `mine`, `eval` and `synth` subcommands.
//!
//! The config file is JSON; every field is optional:
//!
//! ```json
//! {
//!   "miner": { "nms_iou": 0.3, "classes": { "vehicle": { "clip": [3, 1.5, 2.5], ... } } },
//!   "eval": { "distance_thresholds": [0.5, 1, 2, 4] },
//!   "jobs": 4
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::{ensure_dir, DatasetLayout};
use crate::error::{Error, Result};
use crate::frustum::io::read_json;
use crate::inflate::{mine_frame, MinedCuboid, MinerConfig, OrientationMode};
use crate::io_util::write_atomic;
use crate::labels::{read_label_dir, write_labels, LABEL_EXT};
use crate::metrics::{csv_table, evaluate, filter_by_range, EvalBox, EvalConfig, EvalReport};
use crate::synth::{generate_dataset, write_dataset, SceneSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSettings {
    pub distance_thresholds: Vec<f64>,
    pub min_recall: f64,
    pub min_precision: f64,
    pub tp_threshold: f64,
}

impl Default for EvalSettings {
    fn default() -> Self {
        let d = EvalConfig::default();
        EvalSettings {
            distance_thresholds: d.distance_thresholds,
            min_recall: d.min_recall,
            min_precision: d.min_precision,
            tp_threshold: d.tp_threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub miner: MinerConfig,
    pub eval: EvalSettings,
    /// Worker threads; `None` uses every core. Not recorded in manifests,
    /// since it does not change the output.
    #[serde(skip_serializing)]
    pub jobs: Option<usize>,
}

impl RunConfig {
    /// Defaults when `path` is `None`.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let cfg: RunConfig = match path {
            Some(p) => read_json(p)?,
            None => RunConfig::default(),
        };
        cfg.validate().map_err(|e| match (path, e) {
            (Some(p), Error::Invalid { reason, what }) => Error::format(p, format!("invalid {what}: {reason}")),
            (_, e) => e,
        })?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.miner.validate()?;
        self.eval_config().validate()?;
        if self.jobs == Some(0) {
            return Err(Error::invalid("config", "jobs must be at least 1"));
        }
        Ok(())
    }

    /// Evaluation settings with per-class ranges taken from the class table.
    pub fn eval_config(&self) -> EvalConfig {
        EvalConfig {
            distance_thresholds: self.eval.distance_thresholds.clone(),
            class_ranges: self
                .miner
                .classes
                .iter()
                .map(|(k, p)| (k.clone(), p.eval_range))
                .collect(),
            min_recall: self.eval.min_recall,
            min_precision: self.eval.min_precision,
            tp_threshold: self.eval.tp_threshold,
        }
    }

    pub fn to_json(&self) -> Vec<u8> {
        serde_json::to_vec_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the resolved config's JSON.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json()))
    }
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        b = b.num_threads(n);
    }
    let pool = b.build().map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassCount {
    pub total: usize,
    pub dont_care: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config_sha256: String,
    pub config: RunConfig,
    pub frames: usize,
    pub counts: BTreeMap<String, ClassCount>,
}

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn count_by_class(cfg: &MinerConfig, labels: &[Vec<MinedCuboid>]) -> BTreeMap<String, ClassCount> {
    let mut counts: BTreeMap<String, ClassCount> = cfg
        .classes
        .keys()
        .map(|k| (k.clone(), ClassCount { total: 0, dont_care: 0 }))
        .collect();
    for m in labels.iter().flatten() {
        let c = counts
            .entry(m.class.clone())
            .or_insert(ClassCount { total: 0, dont_care: 0 });
        c.total += 1;
        c.dont_care += m.dont_care as usize;
    }
    counts
}

/// Mine every frame of `dataset` into `<out>/<frame_id>.jsonl` and write
/// `<out>/manifest.json`. Existing files of the same names are replaced.
pub fn cmd_mine(dataset: &Path, cfg: &RunConfig, out: &Path) -> Result<Manifest> {
    let layout = DatasetLayout::new(dataset);
    let ids = layout.frame_ids()?;
    let map = layout.load_map()?;
    ensure_dir(out)?;
    let labels = with_pool(cfg.jobs, || {
        ids.par_iter()
            .map(|id| {
                let frame = layout.load_frame(id)?;
                let mined = mine_frame(&frame, &map, &cfg.miner)?;
                write_labels(&out.join(format!("{id}.{LABEL_EXT}")), id, &mined)?;
                Ok(mined)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let manifest = Manifest {
        config_sha256: cfg.hash(),
        config: cfg.clone(),
        frames: ids.len(),
        counts: count_by_class(&cfg.miner, &labels),
    };
    let mut bytes = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    bytes.push(b'\n');
    write_atomic(&out.join(MANIFEST_FILE), &bytes)?;
    Ok(manifest)
}

pub struct EvalOptions<'a> {
    pub pred: &'a Path,
    pub gt: &'a Path,
    /// Dataset whose ego poses drive range filtering.
    pub dataset: Option<&'a Path>,
    /// Report directory; defaults to the prediction directory.
    pub out: Option<&'a Path>,
}

pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";

/// Evaluate predictions against ground truth and write `report.json` and
/// `report.csv`. Predictions flagged don't-care are ignored. An empty
/// prediction directory counts as no detections on every frame.
pub fn cmd_eval(opts: &EvalOptions, cfg: &RunConfig) -> Result<EvalReport> {
    let preds = read_label_dir(opts.pred)?;
    let gts = read_label_dir(opts.gt)?;
    if !preds.is_empty() {
        let p: BTreeSet<&String> = preds.keys().collect();
        let g: BTreeSet<&String> = gts.keys().collect();
        let only_p: Vec<&str> = p.difference(&g).map(|s| s.as_str()).collect();
        let only_g: Vec<&str> = g.difference(&p).map(|s| s.as_str()).collect();
        if !only_p.is_empty() || !only_g.is_empty() {
            return Err(Error::FrameMismatch(format!(
                "only in predictions: [{}]; only in ground truth: [{}]",
                only_p.join(", "),
                only_g.join(", ")
            )));
        }
    }
    let ecfg = cfg.eval_config();
    let layout = opts.dataset.map(DatasetLayout::new);
    let mut pred_boxes = Vec::new();
    let mut gt_boxes = Vec::new();
    let empty = Vec::new();
    for (id, g) in &gts {
        let p: Vec<MinedCuboid> = preds
            .get(id)
            .unwrap_or(&empty)
            .iter()
            .filter(|m| !m.dont_care)
            .cloned()
            .collect();
        let (p, g) = match &layout {
            Some(l) => {
                let ego = l.load_pose(id)?;
                (
                    filter_by_range(&p, &ecfg.class_ranges, &ego)?,
                    filter_by_range(g, &ecfg.class_ranges, &ego)?,
                )
            }
            None => (p, g.clone()),
        };
        pred_boxes.extend(p.iter().map(|m| EvalBox::from_mined(id, m)));
        gt_boxes.extend(g.iter().map(|m| EvalBox::from_mined(id, m)));
    }
    let report = evaluate(&pred_boxes, &gt_boxes, &ecfg);
    let out: PathBuf = opts.out.unwrap_or(opts.pred).to_path_buf();
    ensure_dir(&out)?;
    write_atomic(&out.join(REPORT_JSON), &report.to_json())?;
    let method = opts
        .pred
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "predictions".into());
    write_atomic(&out.join(REPORT_CSV), csv_table(&[(&method, &report)]).as_bytes())?;
    Ok(report)
}

/// Load a scene spec (defaults when `path` is `None`), apply a seed
/// override, generate and write the dataset.
pub fn cmd_synth(spec_path: Option<&Path>, out: &Path, seed: Option<u64>, jobs: Option<usize>) -> Result<SceneSpec> {
    let mut spec: SceneSpec = match spec_path {
        Some(p) => read_json(p)?,
        None => SceneSpec::default(),
    };
    if let Some(s) = seed {
        spec.rng_seed = s;
    }
    let ds = with_pool(jobs, || generate_dataset(&spec))??;
    write_dataset(&ds, out)?;
    Ok(spec)
}

/// Apply command-line overrides on top of a loaded config.
pub fn apply_overrides(cfg: &mut RunConfig, orientation: Option<OrientationMode>, jobs: Option<usize>) -> Result<()> {
    if let Some(m) = orientation {
        cfg.miner.set_orientation(m);
    }
    if jobs.is_some() {
        cfg.jobs = jobs;
    }
    cfg.validate()
}
