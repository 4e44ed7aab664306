//! Synthetic scenes with exact ground truth: a curved multi-lane road, boxes
//! placed on its lanes, a ray-cast LiDAR sweep and rendered instance masks.
//!
//! Every random draw comes from a generator keyed by `(seed, entity)`, so
//! one object's size or one frame's sensor noise does not depend on what
//! else was generated.

mod dataset;
mod lidar;
mod render;
mod rng;
mod road;

use std::collections::BTreeMap;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frustum::InstanceMask;
use crate::geom::{bev_iou, Cuboid, Point3, PointCloud, Pose};
use crate::hdmap::HdMap;
use crate::inflate::Frame;

pub use dataset::write_dataset;
use rng::{keyed_rng, TAG_CORRUPT, TAG_EGO, TAG_LAYOUT, TAG_OBJECT};
use road::Road;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LaneLayout {
    pub count: usize,
    /// Road centerline curvature at the map center, 1/m.
    pub curvature: f64,
    pub spacing: f64,
    pub length: f64,
}

impl Default for LaneLayout {
    fn default() -> Self {
        LaneLayout {
            count: 4,
            curvature: 0.002,
            spacing: 3.7,
            length: 240.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorSpec {
    pub cameras: usize,
    pub hfov_deg: f64,
    pub image_width: u32,
    pub image_height: u32,
    pub camera_height: f64,
    pub lidar_beams: usize,
    pub lidar_min_elev_deg: f64,
    pub lidar_max_elev_deg: f64,
    pub lidar_azimuth_step_deg: f64,
    pub lidar_height: f64,
    pub max_range: f64,
    /// Range noise σ in meters, clamped at 3σ.
    pub noise_sigma: f64,
}

impl Default for SensorSpec {
    fn default() -> Self {
        SensorSpec {
            cameras: 6,
            hfov_deg: 70.0,
            image_width: 640,
            image_height: 400,
            camera_height: 1.6,
            lidar_beams: 64,
            lidar_min_elev_deg: -20.0,
            lidar_max_elev_deg: 5.0,
            lidar_azimuth_step_deg: 0.25,
            lidar_height: 1.8,
            max_range: 70.0,
            noise_sigma: 0.02,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneSpec {
    pub rng_seed: u64,
    pub frames: usize,
    pub n_objects: BTreeMap<String, usize>,
    pub lanes: LaneLayout,
    pub sensor: SensorSpec,
    pub occlusion_fraction: f64,
    /// σ of object yaw around the lane tangent, radians.
    pub heading_noise: f64,
    /// Ground rise per meter along the road; 0 is flat.
    pub ground_slope: f64,
    /// BEV distance band from the ego where objects are placed.
    pub object_range: [f64; 2],
}

impl Default for SceneSpec {
    fn default() -> Self {
        SceneSpec {
            rng_seed: 42,
            frames: 10,
            n_objects: BTreeMap::from([
                ("vehicle".into(), 4),
                ("bus".into(), 1),
                ("bicycle".into(), 1),
                ("pedestrian".into(), 1),
            ]),
            lanes: LaneLayout::default(),
            sensor: SensorSpec::default(),
            occlusion_fraction: 0.0,
            heading_noise: 0.0,
            ground_slope: 0.0,
            object_range: [5.0, 45.0],
        }
    }
}

pub const MAX_PLACEMENT_ATTEMPTS: usize = 100;
/// Free space kept around every placed object, meters.
const CLEARANCE: f64 = 0.5;

struct ClassShape {
    size: [f64; 3],
    jitter: [f64; 3],
    on_lane: bool,
}

fn class_shape(class: &str) -> Option<ClassShape> {
    let (size, jitter, on_lane) = match class {
        "vehicle" => ([4.6, 1.9, 1.6], [0.3, 0.1, 0.1], true),
        "bus" => ([12.0, 2.6, 3.2], [0.8, 0.1, 0.15], true),
        "bicycle" => ([1.8, 0.6, 1.4], [0.1, 0.05, 0.1], true),
        "pedestrian" => ([0.6, 0.6, 1.75], [0.1, 0.1, 0.1], false),
        _ => return None,
    };
    Some(ClassShape { size, jitter, on_lane })
}

impl SceneSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |reason: String| Err(Error::invalid("scene spec", reason));
        for class in self.n_objects.keys() {
            if class_shape(class).is_none() {
                return Err(Error::UnknownClass(class.clone()));
            }
        }
        let l = &self.lanes;
        if l.count == 0 || !(l.spacing > 0.0) || !(l.curvature.abs() * l.length < 1.5) {
            return bad(format!("unusable lane layout {l:?}"));
        }
        let [near, far] = self.object_range;
        if !(near > 0.0 && far > near) {
            return bad(format!("object_range {near}..{far} is empty"));
        }
        if !(l.length >= 2.0 * (far + 10.0)) {
            return bad(format!("lanes must be at least {} m long", 2.0 * (far + 10.0)));
        }
        let s = &self.sensor;
        if s.cameras == 0 || s.cameras > 255 || s.image_width == 0 || s.image_height == 0 {
            return bad("need 1-255 cameras with a positive image size".into());
        }
        if !(s.hfov_deg > 0.0 && s.hfov_deg < 180.0) {
            return bad(format!("hfov {} outside (0, 180)", s.hfov_deg));
        }
        if s.lidar_beams == 0 || !(s.lidar_azimuth_step_deg > 0.0) || !(s.max_range > 0.0) {
            return bad("LiDAR density and range must be positive".into());
        }
        if !(s.noise_sigma >= 0.0 && self.heading_noise >= 0.0) {
            return bad("noise σ must be non-negative".into());
        }
        if !(0.0..=1.0).contains(&self.occlusion_fraction) {
            return bad(format!("occlusion_fraction {} outside [0, 1]", self.occlusion_fraction));
        }
        if !self.ground_slope.is_finite() {
            return bad("ground_slope must be finite".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthObject {
    pub class: String,
    /// Segmentation category the masks carry.
    pub category: u8,
    pub cuboid: Cuboid,
}

/// One generated frame and its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthFrame {
    pub frame: Frame,
    pub objects: Vec<SynthObject>,
    /// Object index per point, −1 for ground.
    pub point_object: Vec<i32>,
    /// Object index per mask.
    pub mask_object: Vec<usize>,
}

/// A shared map and its frames.
#[derive(Debug, Clone)]
pub struct SynthDataset {
    pub spec: SceneSpec,
    pub map: HdMap,
    pub frames: Vec<SynthFrame>,
}

/// A single frame with its map.
#[derive(Debug, Clone)]
pub struct GroundTruthScene {
    pub map: HdMap,
    pub scene: SynthFrame,
}

pub fn frame_id(index: usize) -> String {
    format!("{index:06}")
}

fn build_road(spec: &SceneSpec) -> Road {
    let mut rng = keyed_rng(spec.rng_seed, &[TAG_LAYOUT]);
    let yaw = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    Road::new(spec.lanes, yaw, spec.ground_slope)
}

/// Generate `spec.frames` frames on one road.
pub fn generate_dataset(spec: &SceneSpec) -> Result<SynthDataset> {
    spec.validate()?;
    let road = build_road(spec);
    let lanes = road.lane_graph();
    let (ground, drive) = road.rasters(&lanes);
    let map = HdMap::new(lanes, ground, drive);
    let frames = (0..spec.frames)
        .into_par_iter()
        .map(|i| generate_frame(spec, &road, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(SynthDataset {
        spec: spec.clone(),
        map,
        frames,
    })
}

/// Generate frame 0 of `spec` together with its map.
pub fn generate_scene(spec: &SceneSpec) -> Result<GroundTruthScene> {
    let mut one = spec.clone();
    one.frames = 1;
    let mut ds = generate_dataset(&one)?;
    Ok(GroundTruthScene {
        map: ds.map,
        scene: ds.frames.remove(0),
    })
}

fn generate_frame(spec: &SceneSpec, road: &Road, index: usize) -> Result<SynthFrame> {
    let seed = spec.rng_seed;
    let frame = index as u64;
    let [near, far] = spec.object_range;

    let mut rng = keyed_rng(seed, &[TAG_EGO, frame]);
    let lane = rng.random_range(0..spec.lanes.count);
    let half = spec.lanes.length / 2.0 - far - 10.0;
    let x_ego = rng.random_range(-half..=half);
    let (p, heading) = road.on_lane(lane, x_ego).expect("ego station lies on the lane");
    let ego = Pose::from_yaw(heading, Point3::new(p.x, p.y, road.ground(p)));

    let mut objects: Vec<SynthObject> = Vec::new();
    let heading_noise = Normal::new(0.0, spec.heading_noise.max(f64::MIN_POSITIVE)).expect("finite σ");
    let mut ordinal = 0;
    for (ci, (class, &count)) in spec.n_objects.iter().enumerate() {
        let shape = class_shape(class).ok_or_else(|| Error::UnknownClass(class.clone()))?;
        for k in 0..count {
            let mut rng = keyed_rng(seed, &[TAG_OBJECT, frame, ci as u64, k as u64]);
            let size: Vec<f64> = (0..3)
                .map(|a| shape.size[a] + rng.random_range(-1.0..=1.0) * shape.jitter[a])
                .collect();
            let category = match class.as_str() {
                "vehicle" if rng.random_bool(0.2) => 8,
                "vehicle" => 3,
                "bus" => 6,
                "bicycle" => 2,
                _ => 1,
            };
            let mut placed = None;
            for _ in 0..MAX_PLACEMENT_ATTEMPTS {
                let along = rng.random_range(near..far) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                let (pos, yaw) = if shape.on_lane {
                    let j = rng.random_range(0..spec.lanes.count);
                    let Some((pos, tangent)) = road.on_lane(j, x_ego + along) else {
                        continue;
                    };
                    let noise = if spec.heading_noise > 0.0 {
                        heading_noise.sample(&mut rng)
                    } else {
                        0.0
                    };
                    (pos, tangent + noise)
                } else {
                    let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    let offset = side * (road.half_width() + rng.random_range(1.0..2.5));
                    let yaw = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                    (road.point(x_ego + along, offset), yaw)
                };
                let dist = pos.distance(ego.translation.bev());
                if dist < near || dist > far {
                    continue;
                }
                let center = Point3::new(pos.x, pos.y, road.ground(pos) + size[2] / 2.0);
                let c = Cuboid::new(center, size[1], size[0], size[2], yaw)?;
                if objects.iter().any(|o| overlaps(&o.cuboid, &c)) {
                    continue;
                }
                placed = Some(c);
                break;
            }
            let cuboid = placed.ok_or(Error::PlacementFailed {
                seed,
                frame,
                object: ordinal,
                attempts: MAX_PLACEMENT_ATTEMPTS,
            })?;
            objects.push(SynthObject {
                class: class.clone(),
                category,
                cuboid,
            });
            ordinal += 1;
        }
    }

    let (mut points, mut ids) = lidar::cast_sweep(road, &ego, &objects, &spec.sensor, seed, frame);
    lidar::occlude(
        &mut points,
        &mut ids,
        objects.len(),
        spec.occlusion_fraction,
        seed,
        frame,
    );
    let cameras = render::ring_cameras(&spec.sensor);
    let (masks, mask_object) = render::render_masks(&objects, &ego, &cameras, seed, frame);
    Ok(SynthFrame {
        frame: Frame {
            id: frame_id(index),
            points: PointCloud::new(points),
            masks,
            cameras,
            ego,
        },
        objects,
        point_object: ids,
        mask_object,
    })
}

fn overlaps(a: &Cuboid, b: &Cuboid) -> bool {
    let grow = |c: &Cuboid| Cuboid {
        w: c.w + 2.0 * CLEARANCE,
        l: c.l + 2.0 * CLEARANCE,
        ..*c
    };
    bev_iou(&grow(a), &grow(b)) > 0.0
}

/// Drop masks with probability `drop_rate` and grow the rest by `dilate_px`
/// pixels (square neighbourhood). Deterministic per seed, mask and camera.
pub fn corrupt_masks(scene: &SynthFrame, drop_rate: f64, dilate_px: u32, seed: u64) -> SynthFrame {
    let mut out = scene.clone();
    out.frame.masks.clear();
    out.mask_object.clear();
    for (i, (m, &obj)) in scene.frame.masks.iter().zip(&scene.mask_object).enumerate() {
        let mut rng = keyed_rng(seed, &[TAG_CORRUPT, i as u64]);
        if rng.random::<f64>() < drop_rate {
            continue;
        }
        let mut m = m.clone();
        if dilate_px > 0 {
            m.bitmap = dilate(&m, dilate_px as usize);
        }
        out.frame.masks.push(m);
        out.mask_object.push(obj);
    }
    out
}

fn dilate(m: &InstanceMask, r: usize) -> Vec<bool> {
    let (w, h) = (m.width as usize, m.height as usize);
    let mut rows = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            if m.bitmap[y * w + x] {
                for xx in x.saturating_sub(r)..=(x + r).min(w - 1) {
                    rows[y * w + xx] = true;
                }
            }
        }
    }
    let mut out = vec![false; w * h];
    for y in 0..h {
        for x in 0..w {
            if rows[y * w + x] {
                for yy in y.saturating_sub(r)..=(y + r).min(h - 1) {
                    out[yy * w + x] = true;
                }
            }
        }
    }
    out
}

/// Ground-truth labels of a frame in the mined-label schema. Objects with no
/// LiDAR return are left out, as no sensor saw them.
pub fn ground_truth(scene: &SynthFrame) -> Vec<crate::inflate::MinedCuboid> {
    let mut seen = vec![false; scene.objects.len()];
    for &id in &scene.point_object {
        if id >= 0 {
            seen[id as usize] = true;
        }
    }
    scene
        .objects
        .iter()
        .zip(seen)
        .filter(|(_, s)| *s)
        .map(|(o, _)| crate::inflate::MinedCuboid {
            cuboid: o.cuboid,
            class: o.class.clone(),
            confidence: 1.0,
            dont_care: false,
        })
        .collect()
}
