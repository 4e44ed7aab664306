use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::rng::{keyed_rng, TAG_LIDAR, TAG_OCCLUSION};
use super::road::Road;
use super::{SensorSpec, SynthObject};
use crate::geom::{wrap_angle, Cuboid, Point3, Pose};

/// Entry distance of the ray `o + t·d` into the box, if it hits in front.
pub(crate) fn ray_box(o: Point3, d: Point3, c: &Cuboid) -> Option<f64> {
    let (s, co) = c.theta.sin_cos();
    let rel = o - c.center();
    let lo = Point3::new(co * rel.x + s * rel.y, -s * rel.x + co * rel.y, rel.z);
    let ld = Point3::new(co * d.x + s * d.y, -s * d.x + co * d.y, d.z);
    let half = [c.l / 2.0, c.w / 2.0, c.h / 2.0];
    let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
    for ((p, v), h) in [lo.x, lo.y, lo.z].into_iter().zip([ld.x, ld.y, ld.z]).zip(half) {
        if v.abs() < 1e-15 {
            if p.abs() > h {
                return None;
            }
            continue;
        }
        let (a, b) = ((-h - p) / v, (h - p) / v);
        t0 = t0.max(a.min(b));
        t1 = t1.min(a.max(b));
    }
    (t0 <= t1 && t0 > 1e-9).then_some(t0)
}

/// Returns per object the azimuth window it can occupy, seen from `origin`.
fn azimuth_windows(origin: Point3, objects: &[SynthObject], ego_yaw: f64) -> Vec<Option<(f64, f64)>> {
    objects
        .iter()
        .map(|o| {
            let c = o.cuboid;
            let r = c.w.hypot(c.l) / 2.0 + 0.05;
            let rel = c.bev_center() - origin.bev();
            let dist = rel.norm();
            if dist <= r {
                return None;
            }
            let center = wrap_angle(rel.y.atan2(rel.x) - ego_yaw);
            Some((center, (r / dist).asin()))
        })
        .collect()
}

/// Ray-cast one 360° sweep. Returns ego-frame points (rounded to f32
/// precision) and, per point, the index of the object hit or −1 for ground.
pub(crate) fn cast_sweep(
    road: &Road,
    ego: &Pose,
    objects: &[SynthObject],
    sensor: &SensorSpec,
    seed: u64,
    frame: u64,
) -> (Vec<Point3>, Vec<i32>) {
    let origin = ego.apply(Point3::new(0.0, 0.0, sensor.lidar_height));
    let ego_yaw = ego.yaw();
    let to_ego = ego.inverse();
    let windows = azimuth_windows(origin, objects, ego_yaw);
    let (gs, gc) = road.yaw.sin_cos();
    let (ga, gb) = (road.slope * gc, road.slope * gs);

    let mut rng = keyed_rng(seed, &[TAG_LIDAR, frame]);
    let sigma = sensor.noise_sigma;
    let noise = Normal::new(0.0, sigma.max(f64::MIN_POSITIVE)).expect("finite sigma");

    let n_az = (360.0 / sensor.lidar_azimuth_step_deg).round() as usize;
    let beams = sensor.lidar_beams;
    let elev: Vec<f64> = (0..beams)
        .map(|b| {
            let f = if beams > 1 { b as f64 / (beams - 1) as f64 } else { 0.0 };
            (sensor.lidar_min_elev_deg + f * (sensor.lidar_max_elev_deg - sensor.lidar_min_elev_deg)).to_radians()
        })
        .collect();

    let mut points = Vec::new();
    let mut ids = Vec::new();
    let mut cands = Vec::new();
    for k in 0..n_az {
        let az = wrap_angle((k as f64 * sensor.lidar_azimuth_step_deg).to_radians());
        cands.clear();
        cands.extend(
            windows
                .iter()
                .enumerate()
                .filter(|(_, w)| w.is_some_and(|(c, hw)| wrap_angle(az - c).abs() <= hw))
                .map(|(i, _)| i),
        );
        for &e in &elev {
            let d_ego = Point3::new(e.cos() * az.cos(), e.cos() * az.sin(), e.sin());
            let d = ego.rotate(d_ego);
            let mut best = (sensor.max_range, None::<i32>);
            let denom = d.z - ga * d.x - gb * d.y;
            if denom.abs() > 1e-12 {
                let t = (ga * origin.x + gb * origin.y - origin.z) / denom;
                if t > 0.0 && t < best.0 {
                    best = (t, Some(-1));
                }
            }
            for &i in &cands {
                if let Some(t) = ray_box(origin, d, &objects[i].cuboid) {
                    if t < best.0 {
                        best = (t, Some(i as i32));
                    }
                }
            }
            let (t, Some(id)) = best else { continue };
            let t = if sigma > 0.0 {
                t + noise.sample(&mut rng).clamp(-3.0 * sigma, 3.0 * sigma)
            } else {
                t
            };
            let p = to_ego.apply(origin + d * t);
            points.push(Point3::new(p.x as f32 as f64, p.y as f32 as f64, p.z as f32 as f64));
            ids.push(id);
        }
    }
    (points, ids)
}

/// Remove a contiguous azimuth slice covering `fraction` of each object's
/// angular extent.
pub(crate) fn occlude(
    points: &mut Vec<Point3>,
    ids: &mut Vec<i32>,
    n_objects: usize,
    fraction: f64,
    seed: u64,
    frame: u64,
) {
    if fraction <= 0.0 {
        return;
    }
    let mut drop = vec![false; points.len()];
    for obj in 0..n_objects {
        let idx: Vec<usize> = (0..points.len()).filter(|&i| ids[i] == obj as i32).collect();
        if idx.is_empty() {
            continue;
        }
        let az = |i: usize| points[i].y.atan2(points[i].x);
        let center = az(idx[0]);
        let rel: Vec<f64> = idx.iter().map(|&i| wrap_angle(az(i) - center)).collect();
        let lo = rel.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = rel.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let span = hi - lo;
        let mut rng = keyed_rng(seed, &[TAG_OCCLUSION, frame, obj as u64]);
        let start = lo + rng.random::<f64>() * (1.0 - fraction) * span;
        let end = start + fraction * span;
        for (&i, &r) in idx.iter().zip(&rel) {
            if r >= start && r <= end {
                drop[i] = true;
            }
        }
    }
    let mut k = 0;
    points.retain(|_| {
        k += 1;
        !drop[k - 1]
    });
    let mut k = 0;
    ids.retain(|_| {
        k += 1;
        !drop[k - 1]
    });
}
