use rand::Rng;

use super::rng::{keyed_rng, TAG_MASK};
use super::{SensorSpec, SynthObject};
use crate::frustum::{CameraRig, InstanceMask};
use crate::geom::{convex_hull, cuboid_corners, CameraModel, Point2, Point3, Pose};

/// Pixel centers this close outside a silhouette edge still count as
/// inside, so that every surface point's nearest pixel is covered.
const EDGE_SLACK: f64 = 0.71;
const MIN_DEPTH: f64 = 0.1;

/// Evenly spaced ring of identical cameras, camera 0 looking along ego +x.
pub(crate) fn ring_cameras(sensor: &SensorSpec) -> CameraRig {
    let w = sensor.image_width;
    let h = sensor.image_height;
    let f = (w as f64 / 2.0) / (sensor.hfov_deg.to_radians() / 2.0).tan();
    (0..sensor.cameras)
        .map(|k| {
            let yaw = k as f64 * std::f64::consts::TAU / sensor.cameras as f64;
            let (s, c) = yaw.sin_cos();
            // rows: image right, image down, optical axis (ego coordinates)
            let r = [[s, -c, 0.0], [0.0, 0.0, -1.0], [c, s, 0.0]];
            let pos = Point3::new(0.0, 0.0, sensor.camera_height);
            let rot = Pose::new(r, Point3::default()).expect("ring camera rotation is proper");
            let t = rot.rotate(pos);
            let cam = CameraModel {
                fx: f,
                fy: f,
                cx: (w as f64 - 1.0) / 2.0,
                cy: (h as f64 - 1.0) / 2.0,
                width: w,
                height: h,
                extrinsic: Pose::new(r, Point3::new(-t.x, -t.y, -t.z)).expect("ring camera pose is proper"),
            };
            (k as u8, cam)
        })
        .collect()
}

/// Silhouette of `c` in the image, or `None` if any corner is too close to
/// or behind the camera.
fn silhouette(cam: &CameraModel, ego_from_map: &Pose, c: &crate::geom::Cuboid) -> Option<Vec<Point2>> {
    let mut uv = Vec::with_capacity(8);
    for p in cuboid_corners(c) {
        let q = cam.extrinsic.apply(ego_from_map.apply(p));
        if q.z <= MIN_DEPTH {
            return None;
        }
        uv.push(Point2::new(cam.fx * q.x / q.z + cam.cx, cam.fy * q.y / q.z + cam.cy));
    }
    let hull = convex_hull(&uv);
    (hull.len() >= 3).then_some(hull)
}

/// Instance masks for every object in every camera. Where silhouettes
/// overlap, the pixel goes to the object whose center is nearer the camera.
/// Returns the masks and the object index behind each.
pub(crate) fn render_masks(
    objects: &[SynthObject],
    ego: &Pose,
    cameras: &CameraRig,
    seed: u64,
    frame: u64,
) -> (Vec<InstanceMask>, Vec<usize>) {
    let ego_from_map = ego.inverse();
    let mut masks = Vec::new();
    let mut owners = Vec::new();
    for (&cam_id, cam) in cameras {
        let (w, h) = (cam.width as usize, cam.height as usize);
        let cam_pos = ego.apply(cam.extrinsic.inverse().translation);
        let mut order: Vec<usize> = (0..objects.len()).collect();
        order.sort_by(|&a, &b| {
            let da = objects[a].cuboid.center().distance(cam_pos);
            let db = objects[b].cuboid.center().distance(cam_pos);
            da.total_cmp(&db).then(a.cmp(&b))
        });
        let mut owner = vec![u32::MAX; w * h];
        for &oi in &order {
            let Some(hull) = silhouette(cam, &ego_from_map, &objects[oi].cuboid) else {
                continue;
            };
            let (mut lo, mut hi) = (hull[0], hull[0]);
            for p in &hull {
                lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
            }
            let c0 = (lo.x - 1.0).floor().max(0.0) as usize;
            let r0 = (lo.y - 1.0).floor().max(0.0) as usize;
            let c1 = ((hi.x + 1.0).ceil().min(w as f64 - 1.0)).max(-1.0);
            let r1 = ((hi.y + 1.0).ceil().min(h as f64 - 1.0)).max(-1.0);
            if c1 < 0.0 || r1 < 0.0 {
                continue;
            }
            let edges: Vec<(Point2, Point2, f64)> = (0..hull.len())
                .map(|i| {
                    let a = hull[i];
                    let b = hull[(i + 1) % hull.len()];
                    (a, b - a, (b - a).norm())
                })
                .collect();
            for r in r0..=r1 as usize {
                for c in c0..=c1 as usize {
                    let p = Point2::new(c as f64, r as f64);
                    let inside = edges.iter().all(|&(a, e, n)| e.cross(p - a) / n >= -EDGE_SLACK);
                    let px = &mut owner[r * w + c];
                    if inside && *px == u32::MAX {
                        *px = oi as u32;
                    }
                }
            }
        }
        for (oi, obj) in objects.iter().enumerate() {
            let bitmap: Vec<bool> = owner.iter().map(|&o| o == oi as u32).collect();
            if !bitmap.iter().any(|&b| b) {
                continue;
            }
            let mut rng = keyed_rng(seed, &[TAG_MASK, frame, oi as u64, cam_id as u64]);
            let confidence = rng.random_range(0.75f32..0.99);
            let m = InstanceMask::new(cam_id, obj.category, confidence, cam.width, cam.height, bitmap)
                .expect("rendered mask matches its camera");
            masks.push(m);
            owners.push(oi);
        }
    }
    (masks, owners)
}
