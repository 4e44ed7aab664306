//! Detection metrics in the nuScenes style: AP by BEV center distance on a
//! 101-point recall grid, and translation, scale and orientation errors of
//! true positives.

mod report;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{wrap_angle, Cuboid, Pose};
use crate::inflate::MinedCuboid;

pub use report::{csv_table, EvalReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub distance_thresholds: Vec<f64>,
    pub class_ranges: BTreeMap<String, f64>,
    pub min_recall: f64,
    pub min_precision: f64,
    /// Matching distance for TP errors and the TP/FP/FN counts.
    pub tp_threshold: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            distance_thresholds: vec![0.5, 1.0, 2.0, 4.0],
            class_ranges: BTreeMap::from([
                ("vehicle".into(), 50.0),
                ("bus".into(), 50.0),
                ("bicycle".into(), 40.0),
                ("pedestrian".into(), 40.0),
            ]),
            min_recall: 0.1,
            min_precision: 0.1,
            tp_threshold: 2.0,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        let t = &self.distance_thresholds;
        if t.is_empty() || t.iter().any(|&d| !(d.is_finite() && d > 0.0)) || t.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(
                "eval config",
                "distance thresholds must be positive and ascending",
            ));
        }
        if let Some((c, r)) = self.class_ranges.iter().find(|(_, r)| !(r.is_finite() && **r > 0.0)) {
            return Err(Error::invalid(
                "eval config",
                format!("range for {c} must be positive, got {r}"),
            ));
        }
        for (what, v) in [("min_recall", self.min_recall), ("min_precision", self.min_precision)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::invalid("eval config", format!("{what} {v} outside [0, 1)")));
            }
        }
        if !(self.tp_threshold.is_finite() && self.tp_threshold > 0.0) {
            return Err(Error::invalid("eval config", "tp_threshold must be positive"));
        }
        Ok(())
    }
}

/// A scored box tagged with its frame.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalBox {
    pub frame_id: String,
    pub class: String,
    pub cuboid: Cuboid,
    pub confidence: f64,
}

impl EvalBox {
    pub fn from_mined(frame_id: &str, m: &MinedCuboid) -> Self {
        EvalBox {
            frame_id: frame_id.to_string(),
            class: m.class.clone(),
            cuboid: m.cuboid,
            confidence: m.confidence,
        }
    }

    fn bev_distance(&self, o: &EvalBox) -> f64 {
        self.cuboid.bev_center().distance(o.cuboid.bev_center())
    }
}

/// Keep boxes whose BEV distance from the ego is within their class range.
pub fn filter_by_range(annos: &[MinedCuboid], ranges: &BTreeMap<String, f64>, ego: &Pose) -> Result<Vec<MinedCuboid>> {
    let origin = ego.translation.bev();
    let mut out = Vec::with_capacity(annos.len());
    for a in annos {
        let r = ranges
            .get(&a.class)
            .ok_or_else(|| Error::UnknownClass(a.class.clone()))?;
        if a.cuboid.bev_center().distance(origin) <= *r {
            out.push(a.clone());
        }
    }
    Ok(out)
}

/// Greedy matching result, listed in the order predictions were visited.
#[derive(Debug, Clone, PartialEq)]
pub struct Matching {
    /// Prediction indices by descending confidence, ties in input order.
    pub order: Vec<usize>,
    /// Matched ground-truth index for each entry of `order`.
    pub matched: Vec<Option<usize>>,
    pub n_gt: usize,
}

impl Matching {
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.order
            .iter()
            .zip(&self.matched)
            .filter_map(|(&p, g)| g.map(|g| (p, g)))
    }

    pub fn tp(&self) -> usize {
        self.matched.iter().filter(|m| m.is_some()).count()
    }

    pub fn fp(&self) -> usize {
        self.matched.len() - self.tp()
    }

    pub fn fn_(&self) -> usize {
        self.n_gt - self.tp()
    }

    pub fn unmatched_gts(&self) -> Vec<usize> {
        let hit: BTreeSet<usize> = self.matched.iter().flatten().copied().collect();
        (0..self.n_gt).filter(|g| !hit.contains(g)).collect()
    }
}

/// Visit predictions by descending confidence; each takes the nearest
/// unmatched ground truth of its frame within `dist_thresh` (ties go to the
/// lower index). Callers pass one class at a time.
pub fn match_predictions(preds: &[EvalBox], gts: &[EvalBox], dist_thresh: f64) -> Matching {
    let mut by_frame: HashMap<&str, Vec<usize>> = HashMap::new();
    for (i, g) in gts.iter().enumerate() {
        by_frame.entry(g.frame_id.as_str()).or_default().push(i);
    }
    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_by(|&a, &b| preds[b].confidence.total_cmp(&preds[a].confidence));

    let mut taken = vec![false; gts.len()];
    let mut matched = Vec::with_capacity(preds.len());
    for &pi in &order {
        let p = &preds[pi];
        let mut best: Option<(f64, usize)> = None;
        for &gi in by_frame.get(p.frame_id.as_str()).map(Vec::as_slice).unwrap_or(&[]) {
            if taken[gi] {
                continue;
            }
            let d = p.bev_distance(&gts[gi]);
            if d <= dist_thresh && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, gi));
            }
        }
        if let Some((_, gi)) = best {
            taken[gi] = true;
        }
        matched.push(best.map(|(_, gi)| gi));
    }
    Matching {
        order,
        matched,
        n_gt: gts.len(),
    }
}

/// Precision-recall operating points, one per visited prediction.
pub fn pr_curve(m: &Matching) -> Vec<(f64, f64)> {
    let mut tp = 0usize;
    m.matched
        .iter()
        .enumerate()
        .map(|(i, hit)| {
            tp += hit.is_some() as usize;
            (tp as f64 / m.n_gt as f64, tp as f64 / (i + 1) as f64)
        })
        .collect()
}

/// Clipped area under the precision-recall curve.
///
/// Precision at grid recall `r = k/100` is taken from the first operating
/// point reaching recall `r` (zero if none does). Values above
/// `min_precision` are integrated with the trapezoid rule over the grid
/// points above `min_recall`, then normalised so a perfect detector scores 1.
pub fn ap_from_matching(m: &Matching, min_recall: f64, min_precision: f64) -> f64 {
    if m.n_gt == 0 {
        return 0.0;
    }
    let curve = pr_curve(m);
    let first_k = (100.0 * min_recall).round() as usize + 1;
    if first_k >= 100 {
        return 0.0;
    }
    let mut j = 0;
    let mut vals = Vec::with_capacity(101 - first_k);
    for k in first_k..=100 {
        let r = k as f64 / 100.0;
        while j < curve.len() && curve[j].0 < r - 1e-12 {
            j += 1;
        }
        let p = curve.get(j).map_or(0.0, |c| c.1);
        vals.push((p - min_precision).max(0.0));
    }
    let area: f64 = vals.windows(2).map(|w| (w[0] + w[1]) / 2.0 * 0.01).sum();
    let full = (1.0 - min_precision) * (100 - first_k) as f64 / 100.0;
    (area / full).clamp(0.0, 1.0)
}

pub fn average_precision(preds: &[EvalBox], gts: &[EvalBox], dist_thresh: f64, cfg: &EvalConfig) -> f64 {
    ap_from_matching(
        &match_predictions(preds, gts, dist_thresh),
        cfg.min_recall,
        cfg.min_precision,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TpErrors {
    pub ate: f64,
    pub ase: f64,
    pub aoe: f64,
}

impl TpErrors {
    /// Substituted when a class has no true positive.
    pub const WORST: TpErrors = TpErrors {
        ate: 1.0,
        ase: 1.0,
        aoe: PI,
    };
}

/// `1 − IoU` of two boxes after aligning centers and yaw.
pub fn scale_error(a: &Cuboid, b: &Cuboid) -> f64 {
    let inter = a.w.min(b.w) * a.l.min(b.l) * a.h.min(b.h);
    let union = a.volume() + b.volume() - inter;
    1.0 - inter / union
}

/// Mean translation, scale and orientation error over matched pairs.
pub fn tp_errors(pairs: &[(&Cuboid, &Cuboid)]) -> Result<TpErrors> {
    if pairs.is_empty() {
        return Err(Error::NoTruePositives);
    }
    let n = pairs.len() as f64;
    let mut e = TpErrors {
        ate: 0.0,
        ase: 0.0,
        aoe: 0.0,
    };
    for (p, g) in pairs {
        e.ate += p.bev_center().distance(g.bev_center());
        e.ase += scale_error(p, g);
        e.aoe += wrap_angle(p.theta - g.theta).abs();
    }
    e.ate /= n;
    e.ase /= n;
    e.aoe /= n;
    Ok(e)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    /// One value per distance threshold.
    pub ap: Vec<f64>,
    pub mean_ap: f64,
    pub ate: f64,
    pub ase: f64,
    pub aoe: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub n_gt: usize,
    pub n_pred: usize,
}

/// Per-class metrics and their class means. Classes with neither ground
/// truth nor predictions are left out.
pub fn evaluate(preds: &[EvalBox], gts: &[EvalBox], cfg: &EvalConfig) -> EvalReport {
    let classes: BTreeSet<&str> = preds.iter().chain(gts).map(|b| b.class.as_str()).collect();
    let mut per_class = BTreeMap::new();
    for class in classes {
        let p: Vec<EvalBox> = preds.iter().filter(|b| b.class == class).cloned().collect();
        let g: Vec<EvalBox> = gts.iter().filter(|b| b.class == class).cloned().collect();
        let ap: Vec<f64> = cfg
            .distance_thresholds
            .iter()
            .map(|&d| average_precision(&p, &g, d, cfg))
            .collect();
        let m = match_predictions(&p, &g, cfg.tp_threshold);
        let pairs: Vec<(&Cuboid, &Cuboid)> = m.pairs().map(|(pi, gi)| (&p[pi].cuboid, &g[gi].cuboid)).collect();
        let err = tp_errors(&pairs).unwrap_or(TpErrors::WORST);
        per_class.insert(
            class.to_string(),
            ClassMetrics {
                mean_ap: ap.iter().sum::<f64>() / ap.len() as f64,
                ap,
                ate: err.ate,
                ase: err.ase,
                aoe: err.aoe,
                tp: m.tp(),
                fp: m.fp(),
                fn_: m.fn_(),
                n_gt: g.len(),
                n_pred: p.len(),
            },
        );
    }
    EvalReport::new(cfg.distance_thresholds.clone(), per_class)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point3;

    fn bx(frame: &str, x: f64, y: f64, conf: f64) -> EvalBox {
        EvalBox {
            frame_id: frame.into(),
            class: "vehicle".into(),
            cuboid: Cuboid::new(Point3::new(x, y, 0.8), 1.9, 4.7, 1.6, 0.0).unwrap(),
            confidence: conf,
        }
    }

    fn mined(class: &str, x: f64) -> MinedCuboid {
        MinedCuboid {
            cuboid: Cuboid::new(Point3::new(x, 0.0, 1.0), 1.0, 1.0, 1.0, 0.0).unwrap(),
            class: class.into(),
            confidence: 1.0,
            dont_care: false,
        }
    }

    #[test]
    fn range_filter() {
        let r = EvalConfig::default().class_ranges;
        let ego = Pose::IDENTITY;
        let kept = filter_by_range(&[mined("vehicle", 49.0), mined("vehicle", 51.0)], &r, &ego).unwrap();
        assert_eq!(kept.len(), 1);
        assert!(filter_by_range(&[mined("pedestrian", 41.0)], &r, &ego)
            .unwrap()
            .is_empty());
        assert_eq!(filter_by_range(&[mined("bicycle", 40.0)], &r, &ego).unwrap().len(), 1);
        let moved = Pose::from_yaw(1.0, Point3::new(100.0, 0.0, 5.0));
        assert_eq!(filter_by_range(&[mined("vehicle", 60.0)], &r, &moved).unwrap().len(), 1);
        assert!(matches!(
            filter_by_range(&[mined("tram", 1.0)], &r, &ego),
            Err(Error::UnknownClass(_))
        ));
    }

    #[test]
    fn identical_sets_match_fully() {
        let g = vec![bx("a", 0.0, 0.0, 1.0), bx("a", 10.0, 0.0, 1.0), bx("b", 0.0, 0.0, 1.0)];
        let m = match_predictions(&g, &g, 2.0);
        assert_eq!((m.tp(), m.fp(), m.fn_()), (3, 0, 0));
    }

    #[test]
    fn out_of_threshold_is_fp_and_fn() {
        let m = match_predictions(&[bx("a", 3.0, 0.0, 0.9)], &[bx("a", 0.0, 0.0, 1.0)], 2.0);
        assert_eq!((m.tp(), m.fp(), m.fn_()), (0, 1, 1));
        assert_eq!(m.unmatched_gts(), vec![0]);
    }

    #[test]
    fn greedy_follows_confidence() {
        let preds = [bx("a", 0.5, 0.0, 0.5), bx("a", 1.0, 0.0, 0.9)];
        let m = match_predictions(&preds, &[bx("a", 0.0, 0.0, 1.0)], 2.0);
        assert_eq!(m.order, vec![1, 0]);
        assert_eq!(m.matched, vec![Some(0), None]);
    }

    #[test]
    fn frames_do_not_cross_match() {
        let m = match_predictions(&[bx("b", 0.0, 0.0, 0.9)], &[bx("a", 0.0, 0.0, 1.0)], 2.0);
        assert_eq!(m.tp(), 0);
    }

    #[test]
    fn ap_extremes() {
        let cfg = EvalConfig::default();
        let g = vec![bx("a", 0.0, 0.0, 1.0), bx("a", 10.0, 0.0, 1.0)];
        assert!((average_precision(&g, &g, 2.0, &cfg) - 1.0).abs() < 1e-12);
        assert_eq!(average_precision(&[], &g, 2.0, &cfg), 0.0);
        assert_eq!(average_precision(&g, &[], 2.0, &cfg), 0.0);
    }

    #[test]
    fn scale_error_examples() {
        let a = Cuboid::new(Point3::default(), 2.0, 4.0, 2.0, 0.0).unwrap();
        let b = Cuboid::new(Point3::new(5.0, 5.0, 0.0), 2.0, 4.0, 1.0, 2.0).unwrap();
        assert!((scale_error(&a, &b) - 0.5).abs() < 1e-12);
        assert_eq!(scale_error(&a, &a), 0.0);
    }

    #[test]
    fn tp_errors_flip_and_empty() {
        let g = Cuboid::new(Point3::default(), 2.0, 4.0, 2.0, 0.0).unwrap();
        let mut p = g;
        p.theta = PI;
        let e = tp_errors(&[(&p, &g)]).unwrap();
        assert_eq!((e.ate, e.ase), (0.0, 0.0));
        assert!((e.aoe - PI).abs() < 1e-12);
        assert!(matches!(tp_errors(&[]), Err(Error::NoTruePositives)));
    }

    #[test]
    fn evaluate_identity_and_missing_preds() {
        let cfg = EvalConfig::default();
        let mut g = vec![bx("a", 0.0, 0.0, 1.0), bx("a", 20.0, 3.0, 1.0)];
        g[1].class = "bus".into();
        let r = evaluate(&g, &g, &cfg);
        assert_eq!(r.classes.len(), 2);
        assert!((r.m_ap - 1.0).abs() < 1e-12);
        assert_eq!((r.m_ate, r.m_ase, r.m_aoe), (0.0, 0.0, 0.0));

        let r = evaluate(&[], &g, &cfg);
        assert_eq!(r.m_ap, 0.0);
        assert_eq!(r.m_aoe, PI);
        assert_eq!(r.classes["bus"].fn_, 1);
    }

    #[test]
    fn config_validation() {
        EvalConfig::default().validate().unwrap();
        let c = EvalConfig {
            distance_thresholds: vec![2.0, 1.0],
            ..EvalConfig::default()
        };
        assert!(c.validate().is_err());
        let mut c = EvalConfig::default();
        c.class_ranges.insert("bus".into(), 0.0);
        assert!(c.validate().is_err());
    }
}
