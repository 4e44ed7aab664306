use std::collections::BTreeMap;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};

/// How a class gets its yaw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum OrientationMode {
    /// Tangent of the nearest lane, falling back to calipers off-lane.
    #[default]
    Map,
    /// Long axis of the minimum-area BEV rectangle.
    Calipers,
}

impl std::str::FromStr for OrientationMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "map" => Ok(OrientationMode::Map),
            "calipers" => Ok(OrientationMode::Calipers),
            other => Err(format!("unknown orientation mode {other:?} (expected map or calipers)")),
        }
    }
}

/// Per-class mining parameters.
///
/// `clip` holds half-extents along the heading axis and the cross axis, and
/// the height cap above ground. `prior` holds the amodal target extents in the
/// same axis order: length, width, height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassParams {
    pub clip: [f64; 3],
    pub prior: [f64; 3],
    pub conf_threshold: f64,
    pub eval_range: f64,
    #[serde(default)]
    pub orientation: OrientationMode,
}

impl ClassParams {
    pub fn new(clip: [f64; 3], prior: [f64; 3], orientation: OrientationMode, eval_range: f64) -> Self {
        ClassParams {
            clip,
            prior,
            conf_threshold: 0.7,
            eval_range,
            orientation,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = self.clip.iter().chain(&self.prior).chain([&self.eval_range]);
        for v in positive {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::invalid(
                    "class params",
                    format!("distances must be positive, got {v}"),
                ));
            }
        }
        if !(0.0..=1.0).contains(&self.conf_threshold) {
            return Err(Error::invalid(
                "class params",
                format!("conf_threshold {} outside [0, 1]", self.conf_threshold),
            ));
        }
        Ok(())
    }
}

pub fn default_classes() -> BTreeMap<String, ClassParams> {
    use OrientationMode::*;
    BTreeMap::from([
        (
            "vehicle".into(),
            ClassParams::new([3.0, 1.5, 2.5], [4.7, 1.9, 1.7], Map, 50.0),
        ),
        (
            "bus".into(),
            ClassParams::new([7.0, 2.0, 4.0], [12.0, 2.9, 3.4], Map, 50.0),
        ),
        (
            "bicycle".into(),
            ClassParams::new([1.2, 0.8, 1.8], [1.8, 0.7, 1.4], Map, 40.0),
        ),
        (
            "pedestrian".into(),
            ClassParams::new([0.6, 0.6, 2.2], [0.7, 0.7, 1.8], Calipers, 40.0),
        ),
    ])
}

/// Segmentation category id to target class: car, truck → vehicle; bus;
/// bicycle; person → pedestrian. Ids follow the COCO category numbering.
pub fn default_class_map() -> BTreeMap<u8, String> {
    BTreeMap::from([
        (1, "pedestrian".into()),
        (2, "bicycle".into()),
        (3, "vehicle".into()),
        (6, "bus".into()),
        (8, "vehicle".into()),
    ])
}

pub const SEED_TOL: f64 = 1e-6;
pub const SEED_MAX_ITER: usize = 200;
/// Points this far below local ground still count as object points.
pub const UNDER_GROUND_TOL: f64 = 0.2;

/// Deserialized `classes` and `class_map` entries are merged over the
/// defaults; a class entry may name only the fields it changes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinerConfig {
    #[serde(deserialize_with = "merge_classes")]
    pub classes: BTreeMap<String, ClassParams>,
    #[serde(deserialize_with = "merge_class_map")]
    pub class_map: BTreeMap<u8, String>,
    pub nms_iou: f64,
    pub roi_margin: f64,
    pub ground_eps: f64,
    pub max_lane_dist: f64,
    pub min_points: usize,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig {
            classes: default_classes(),
            class_map: default_class_map(),
            nms_iou: 0.3,
            roi_margin: crate::frustum::DEFAULT_ROI_MARGIN,
            ground_eps: crate::frustum::DEFAULT_GROUND_EPS,
            max_lane_dist: 10.0,
            min_points: crate::frustum::DEFAULT_MIN_POINTS,
        }
    }
}

impl MinerConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, p) in &self.classes {
            p.validate()
                .map_err(|e| Error::invalid("class params", format!("{name}: {e}")))?;
        }
        for (id, class) in &self.class_map {
            if !self.classes.contains_key(class) {
                return Err(Error::UnknownClass(format!(
                    "category {id} maps to undefined class {class:?}"
                )));
            }
        }
        if !(self.nms_iou > 0.0 && self.nms_iou < 1.0) {
            return Err(Error::invalid(
                "miner config",
                format!("nms_iou {} outside (0, 1)", self.nms_iou),
            ));
        }
        for (what, v) in [
            ("roi_margin", self.roi_margin),
            ("ground_eps", self.ground_eps),
            ("max_lane_dist", self.max_lane_dist),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(
                    "miner config",
                    format!("{what} must be non-negative, got {v}"),
                ));
            }
        }
        Ok(())
    }

    pub fn class_params(&self, class: &str) -> Result<&ClassParams> {
        self.classes
            .get(class)
            .ok_or_else(|| Error::UnknownClass(class.to_string()))
    }

    /// Force one orientation mode on every class.
    pub fn set_orientation(&mut self, mode: OrientationMode) {
        for p in self.classes.values_mut() {
            p.orientation = mode;
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassPatch {
    clip: Option<[f64; 3]>,
    prior: Option<[f64; 3]>,
    conf_threshold: Option<f64>,
    eval_range: Option<f64>,
    orientation: Option<OrientationMode>,
}

fn merge_classes<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<String, ClassParams>, D::Error> {
    let mut out = default_classes();
    for (name, p) in BTreeMap::<String, ClassPatch>::deserialize(d)? {
        let base = match out.remove(&name) {
            Some(b) => b,
            None => match (p.clip, p.prior, p.eval_range) {
                (Some(clip), Some(prior), Some(range)) => ClassParams::new(clip, prior, OrientationMode::Map, range),
                _ => {
                    return Err(D::Error::custom(format!(
                        "new class {name:?} needs clip, prior and eval_range"
                    )))
                }
            },
        };
        let merged = ClassParams {
            clip: p.clip.unwrap_or(base.clip),
            prior: p.prior.unwrap_or(base.prior),
            conf_threshold: p.conf_threshold.unwrap_or(base.conf_threshold),
            eval_range: p.eval_range.unwrap_or(base.eval_range),
            orientation: p.orientation.unwrap_or(base.orientation),
        };
        out.insert(name, merged);
    }
    Ok(out)
}

fn merge_class_map<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<u8, String>, D::Error> {
    let mut out = default_class_map();
    out.extend(BTreeMap::<u8, String>::deserialize(d)?);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = MinerConfig::default();
        c.validate().unwrap();
        assert_eq!(c.class_map[&8], "vehicle");
        assert_eq!(c.classes["pedestrian"].orientation, OrientationMode::Calipers);
        assert_eq!(c.classes["bus"].eval_range, 50.0);
    }

    #[test]
    fn partial_class_entries_merge_over_defaults() {
        let c: MinerConfig =
            serde_json::from_str(r#"{"classes": {"bus": {"conf_threshold": 0.5}}, "class_map": {"4": "bicycle"}}"#)
                .unwrap();
        let d = MinerConfig::default();
        assert_eq!(
            c.classes["bus"],
            ClassParams {
                conf_threshold: 0.5,
                ..d.classes["bus"].clone()
            }
        );
        assert_eq!(c.classes["vehicle"], d.classes["vehicle"]);
        assert_eq!(c.class_map[&4], "bicycle");
        assert_eq!(c.class_map[&3], "vehicle");
        c.validate().unwrap();

        let round: MinerConfig = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(round, d);

        let e = serde_json::from_str::<MinerConfig>(r#"{"classes": {"tram": {"clip": [1, 1, 1]}}}"#).unwrap_err();
        assert!(e.to_string().contains("tram"));
        let tram: MinerConfig = serde_json::from_str(
            r#"{"classes": {"tram": {"clip": [9, 1.5, 4], "prior": [20, 2.6, 3.5], "eval_range": 50}}}"#,
        )
        .unwrap();
        assert_eq!(tram.classes.len(), d.classes.len() + 1);
    }

    #[test]
    fn json_defaults_fill_in() {
        let c: MinerConfig = serde_json::from_str(r#"{"nms_iou": 0.5}"#).unwrap();
        assert_eq!(c.nms_iou, 0.5);
        assert_eq!(c.classes, default_classes());
        assert!(serde_json::from_str::<MinerConfig>(r#"{"nms": 0.5}"#).is_err());
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = MinerConfig::default();
        c.classes.get_mut("bus").unwrap().clip[0] = 0.0;
        assert!(c.validate().is_err());
        let mut c = MinerConfig::default();
        c.class_map.insert(4, "motorcycle".into());
        assert!(matches!(c.validate(), Err(Error::UnknownClass(_))));
        let c = MinerConfig {
            nms_iou: 1.0,
            ..MinerConfig::default()
        };
        assert!(c.validate().is_err());
    }
}
