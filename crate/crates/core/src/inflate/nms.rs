use std::collections::BTreeMap;

use super::params::ClassParams;
use super::MinedCuboid;
use crate::error::{Error, Result};
use crate::geom::bev_iou;

/// Mined confidence is the mask confidence.
pub fn score(mask_confidence: f64) -> f64 {
    mask_confidence
}

/// Greedy class-wise non-maximum suppression on oriented BEV footprints.
///
/// Candidates are visited by descending confidence, ties in input order. A
/// candidate survives if its IoU with every survivor of the same class is
/// below `iou_thresh`. The result is in visiting order.
pub fn nms_bev(cands: &[MinedCuboid], iou_thresh: f64) -> Vec<MinedCuboid> {
    let mut order: Vec<usize> = (0..cands.len()).collect();
    order.sort_by(|&a, &b| cands[b].confidence.total_cmp(&cands[a].confidence));
    let mut kept: Vec<&MinedCuboid> = Vec::new();
    for i in order {
        let c = &cands[i];
        let clear = kept
            .iter()
            .filter(|k| k.class == c.class)
            .all(|k| bev_iou(&k.cuboid, &c.cuboid) < iou_thresh);
        if clear {
            kept.push(c);
        }
    }
    kept.into_iter().cloned().collect()
}

/// Flag candidates below their class threshold as don't-care.
pub fn apply_confidence_policy(cands: &mut [MinedCuboid], classes: &BTreeMap<String, ClassParams>) -> Result<()> {
    for c in cands.iter_mut() {
        let p = classes
            .get(&c.class)
            .ok_or_else(|| Error::UnknownClass(c.class.clone()))?;
        c.dont_care = c.confidence < p.conf_threshold;
    }
    Ok(())
}
