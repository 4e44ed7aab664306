use super::fit::{amodal_complete, clip_instance, initial_cuboid};
use super::nms::{apply_confidence_policy, nms_bev, score};
use super::orient::{orient_by_calipers, orient_by_map, seed_point};
use super::params::{ClassParams, MinerConfig, OrientationMode, UNDER_GROUND_TOL};
use super::MinedCuboid;
use crate::error::Result;
use crate::frustum::{extract_frustums, filter_roi, remove_ground, CameraRig, InstanceMask};
use crate::geom::{Point2, PointCloud, Pose};
use crate::hdmap::HdMap;

/// Everything recorded for one timestamp.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub id: String,
    /// LiDAR sweep in the ego frame.
    pub points: PointCloud,
    pub masks: Vec<InstanceMask>,
    pub cameras: CameraRig,
    /// Map from ego.
    pub ego: Pose,
}

/// Turn one proposal's map-frame points into a cuboid, or `None` when
/// nothing survives the class clip.
pub fn inflate_proposal(
    points: &PointCloud,
    params: &ClassParams,
    map: &HdMap,
    ego_bev: Point2,
    max_lane_dist: f64,
) -> Result<Option<crate::geom::Cuboid>> {
    let seed = seed_point(points)?;
    let ground_z = map
        .ground_height_at(seed.bev())
        .unwrap_or_else(|_| points.iter().map(|p| p.z).fold(f64::INFINITY, f64::min));

    let by_map = match params.orientation {
        OrientationMode::Map => orient_by_map(seed, &map.lane_index, max_lane_dist)?,
        OrientationMode::Calipers => None,
    };
    let theta = match by_map {
        Some(t) => t,
        None => orient_by_calipers(&calipers_support(points, seed, params, ground_z))?,
    };

    let s = clip_instance(points, seed, theta, params, ground_z);
    if s.is_empty() {
        return Ok(None);
    }
    let c0 = initial_cuboid(&s, theta, ground_z)?;
    let mut c = amodal_complete(&c0, ego_bev, params, ground_z);
    // Completion moves the center; sit the box on the ground under it.
    let g = map.ground_height_at(c.bev_center()).unwrap_or(ground_z);
    c.z = g + c.h / 2.0;
    Ok(Some(c))
}

/// Points the calipers see: the proposal within the clip box's
/// circumscribed circle around the seed, or the whole proposal if that
/// leaves nothing.
fn calipers_support(
    points: &PointCloud,
    seed: crate::geom::Point3,
    params: &ClassParams,
    ground_z: f64,
) -> Vec<Point2> {
    let [d1, d2, d3] = params.clip;
    let r = d1.hypot(d2);
    let s = seed.bev();
    let near: Vec<Point2> = points
        .iter()
        .filter(|p| {
            let dz = p.z - ground_z;
            p.bev().distance(s) <= r && dz <= d3 && dz >= -UNDER_GROUND_TOL
        })
        .map(|p| p.bev())
        .collect();
    if near.is_empty() {
        points.bev()
    } else {
        near
    }
}

/// Mine every cuboid in one frame.
///
/// Ground removal and ROI filtering run once on the whole sweep; masks whose
/// category is not in the class map are ignored. Output is sorted by
/// descending confidence.
pub fn mine_frame(frame: &Frame, map: &HdMap, cfg: &MinerConfig) -> Result<Vec<MinedCuboid>> {
    let world = frame.points.transformed(&frame.ego);
    let above = remove_ground(&world, &map.ground, cfg.ground_eps);
    let cloud = filter_roi(&above, &map.drive, cfg.roi_margin);
    let proposals = extract_frustums(&cloud, &frame.masks, &frame.cameras, &frame.ego, cfg.min_points)?;

    let ego_bev = frame.ego.translation.bev();
    let mut cands = Vec::with_capacity(proposals.len());
    for prop in &proposals {
        let Some(class) = cfg.class_map.get(&prop.class_id) else {
            continue;
        };
        let params = cfg.class_params(class)?;
        let points = cloud.select(&prop.point_indices);
        if let Some(cuboid) = inflate_proposal(&points, params, map, ego_bev, cfg.max_lane_dist)? {
            cands.push(MinedCuboid {
                cuboid,
                class: class.clone(),
                confidence: score(prop.confidence as f64),
                dont_care: false,
            });
        }
    }

    let mut kept = nms_bev(&cands, cfg.nms_iou);
    apply_confidence_policy(&mut kept, &cfg.classes)?;
    Ok(kept)
}
