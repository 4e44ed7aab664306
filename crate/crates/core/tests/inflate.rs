mod common;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::median_by_grid;
use inflate3d::frustum::extract_frustums;
use inflate3d::geom::{bev_iou, cuboid_corners, wrap_angle, Cuboid, Point2, Point3, PointCloud};
use inflate3d::hdmap::{nearest_lane_tangent, LaneGraph, LaneIndex};
use inflate3d::inflate::{
    clip_instance, initial_cuboid, mine_frame, nms_bev, orient_by_calipers, orient_by_map, seed_point, ClassParams,
    MinedCuboid, MinerConfig, OrientationMode,
};
use inflate3d::metrics::{evaluate, EvalBox, EvalConfig};
use inflate3d::synth::{generate_scene, ground_truth, GroundTruthScene, SceneSpec};

fn params(clip: [f64; 3]) -> ClassParams {
    ClassParams::new(clip, [4.7, 1.9, 1.7], OrientationMode::Map, 50.0)
}

fn quiet_spec(seed: u64, objects: &[(&str, usize)]) -> SceneSpec {
    let mut spec = SceneSpec {
        rng_seed: seed,
        n_objects: objects.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        object_range: [8.0, 35.0],
        ..SceneSpec::default()
    };
    spec.sensor.noise_sigma = 0.0;
    spec
}

#[test]
fn seed_of_random_cloud_matches_grid_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let cloud: PointCloud = (0..30)
        .map(|_| {
            Point3::new(
                rng.random_range(-4.0..4.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(0.0..2.0),
            )
        })
        .collect();
    let s = seed_point(&cloud).unwrap();
    let g = median_by_grid(&cloud);
    assert!((s.x - g.x).abs() <= 5e-3 && (s.y - g.y).abs() <= 5e-3 && (s.z - g.z).abs() <= 5e-3);
}

#[test]
fn diagonal_lane_gives_quarter_pi() {
    let g = LaneGraph::new(vec![vec![Point3::new(-10.0, -10.0, 0.0), Point3::new(10.0, 10.0, 0.0)]]).unwrap();
    let idx = LaneIndex::new(&g);
    let t = orient_by_map(Point3::new(1.0, 0.5, 0.7), &idx, 10.0).unwrap().unwrap();
    assert!((t - PI / 4.0).abs() < 1e-9);
}

#[test]
fn calipers_on_rectangle_rotated_sixty_degrees() {
    let a = 60f64.to_radians();
    let pts: Vec<Point2> = [(2.0, 1.0), (-2.0, 1.0), (-2.0, -1.0), (2.0, -1.0)]
        .iter()
        .map(|&(x, y)| Point2::new(x, y).rotate(a))
        .collect();
    let t = orient_by_calipers(&pts).unwrap();
    assert!(t > -PI / 2.0 && t <= PI / 2.0);
    assert!((t - a).abs() < 1e-9, "{t}");
    // −120° is the same axis and reports the same angle.
    let pts: Vec<Point2> = pts.iter().map(|p| p.rotate(PI)).collect();
    assert!((orient_by_calipers(&pts).unwrap() - a).abs() < 1e-9);
}

#[test]
fn clip_at_quarter_turn() {
    let c = PointCloud::new(vec![Point3::new(0.5, 1.5, 1.0), Point3::new(1.5, 0.5, 1.0)]);
    let out = clip_instance(&c, Point3::default(), PI / 2.0, &params([2.0, 1.0, 3.0]), 0.0);
    assert_eq!(out.points, vec![Point3::new(0.5, 1.5, 1.0)]);
}

#[test]
fn initial_box_rotated_by_sixty_degrees() {
    let t = PI / 3.0;
    let centre = Point2::new(3.0, -1.0);
    let pts: PointCloud =
        cuboid_corners(&Cuboid::new(Point3::new(centre.x, centre.y, 0.75), 2.0, 4.0, 1.5, t).unwrap())
            .into_iter()
            .collect();
    let c = initial_cuboid(&pts, t, 0.0).unwrap();
    assert!((c.w - 2.0).abs() < 1e-9 && (c.l - 4.0).abs() < 1e-9 && (c.h - 1.5).abs() < 1e-9);
    assert!(c.bev_center().distance(centre) < 1e-9 && (c.z - 0.75).abs() < 1e-9);
}

#[test]
fn lone_vehicle_is_recovered() {
    for seed in 0..5 {
        let g = generate_scene(&quiet_spec(seed, &[("vehicle", 1)])).unwrap();
        let mined = mine_frame(&g.scene.frame, &g.map, &MinerConfig::default()).unwrap();
        let truth = g.scene.objects[0].cuboid;
        assert_eq!(mined.len(), 1, "seed {seed}: {mined:?}");
        let c = mined[0].cuboid;
        assert!(
            c.bev_center().distance(truth.bev_center()) < 0.5,
            "seed {seed}: {c:?} vs {truth:?}"
        );
        assert!(wrap_angle(c.theta - truth.theta).abs() < 0.05);
    }
}

/// Each object yields exactly one proposal, and that proposal is mostly its
/// own points. Objects split across two cameras or hidden from every camera
/// break this.
fn one_clean_proposal_per_object(g: &GroundTruthScene, cfg: &MinerConfig) -> bool {
    let f = &g.scene.frame;
    let world = f.points.transformed(&f.ego);
    let keep: Vec<usize> = (0..world.len())
        .filter(|&i| {
            let p = world.points[i];
            let above = g
                .map
                .ground_height_at(p.bev())
                .map_or(true, |z| p.z > z + cfg.ground_eps);
            above && g.map.in_roi(p.bev(), cfg.roi_margin)
        })
        .collect();
    let cloud = world.select(&keep);
    let props = extract_frustums(&cloud, &f.masks, &f.cameras, &f.ego, cfg.min_points).unwrap();
    let mut per_object = vec![0usize; g.scene.objects.len()];
    for p in &props {
        let obj = g.scene.mask_object[p.mask_index];
        let own = p
            .point_indices
            .iter()
            .filter(|&&i| g.scene.point_object[keep[i]] == obj as i32)
            .count();
        if 2 * own <= p.point_indices.len() {
            return false;
        }
        per_object[obj] += 1;
    }
    per_object.iter().all(|&n| n == 1)
}

#[test]
fn five_object_scene_scores_full_ap() {
    let mut cfg = MinerConfig::default();
    for p in cfg.classes.values_mut() {
        p.conf_threshold = 0.5;
    }
    let eval = EvalConfig {
        distance_thresholds: vec![2.0],
        ..EvalConfig::default()
    };
    let mut clean = 0;
    for seed in 0..50 {
        let g = generate_scene(&quiet_spec(seed, &[("vehicle", 3), ("bus", 1), ("bicycle", 1)])).unwrap();
        if !one_clean_proposal_per_object(&g, &cfg) {
            continue;
        }
        clean += 1;
        let id = &g.scene.frame.id;
        let mined = mine_frame(&g.scene.frame, &g.map, &cfg).unwrap();
        assert!(mined.iter().all(|m| !m.dont_care));
        let preds: Vec<EvalBox> = mined.iter().map(|m| EvalBox::from_mined(id, m)).collect();
        let gts: Vec<EvalBox> = ground_truth(&g.scene)
            .iter()
            .map(|m| EvalBox::from_mined(id, m))
            .collect();
        assert_eq!(gts.len(), 5);
        let r = evaluate(&preds, &gts, &eval);
        assert!((r.m_ap - 1.0).abs() < 1e-9, "seed {seed}: {}", r.summary_line());
    }
    assert!(clean >= 5, "only {clean} scenes without split or hidden objects");
}

#[test]
fn ramp_scene_boxes_touch_the_ground() {
    let mut spec = quiet_spec(9, &[("vehicle", 4), ("bus", 1), ("bicycle", 1), ("pedestrian", 1)]);
    spec.ground_slope = -0.08;
    let g = generate_scene(&spec).unwrap();
    let mined = mine_frame(&g.scene.frame, &g.map, &MinerConfig::default()).unwrap();
    assert!(!mined.is_empty());
    for m in &mined {
        let z = g.map.ground_height_at(m.cuboid.bev_center()).unwrap();
        assert!((m.cuboid.bottom() - z).abs() < 1e-6);
    }
    let again = mine_frame(&g.scene.frame, &g.map, &MinerConfig::default()).unwrap();
    assert_eq!(mined, again);
}

fn lane() -> impl Strategy<Value = Vec<Point3>> {
    prop::collection::vec((-30.0f64..30.0, -30.0f64..30.0), 2..6)
        .prop_map(|v| v.into_iter().map(|(x, y)| Point3::new(x, y, 0.0)).collect::<Vec<_>>())
        .prop_filter("distinct points", |v| v.windows(2).all(|w| w[0].distance(w[1]) > 1e-3))
}

fn points() -> impl Strategy<Value = Vec<Point3>> {
    prop::collection::vec((-6.0f64..6.0, -6.0f64..6.0, -1.0f64..4.0), 0..60)
        .prop_map(|v| v.into_iter().map(|(x, y, z)| Point3::new(x, y, z)).collect())
}

fn candidates() -> impl Strategy<Value = Vec<MinedCuboid>> {
    let one = (
        -6.0f64..6.0,
        -6.0f64..6.0,
        0.5f64..3.0,
        0.5f64..6.0,
        -PI..PI,
        0usize..3,
        0u8..10,
    )
        .prop_map(|(x, y, w, l, t, k, c)| MinedCuboid {
            cuboid: Cuboid::new(Point3::new(x, y, 1.0), w, l, 1.5, t).unwrap(),
            class: ["vehicle", "bus", "pedestrian"][k].to_string(),
            confidence: c as f64 / 10.0,
            dont_care: false,
        });
    prop::collection::vec(one, 0..25)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn map_heading_is_atan2_of_nearest_tangent(lanes in prop::collection::vec(lane(), 1..3), x in -30.0f64..30.0, y in -30.0f64..30.0) {
        let g = LaneGraph::new(lanes).unwrap();
        let t = nearest_lane_tangent(&g, Point2::new(x, y)).unwrap();
        let got = orient_by_map(Point3::new(x, y, 2.0), &LaneIndex::new(&g), 1e9).unwrap().unwrap();
        prop_assert!((got - t.direction.y.atan2(t.direction.x)).abs() < 1e-12);
    }

    #[test]
    fn calipers_agrees_with_lane_up_to_sign(heading in -PI..PI, x in -20.0f64..20.0, y in -20.0f64..20.0, l in 3.0f64..12.0, w in 0.5f64..2.9, n in 8usize..40, s in any::<u64>()) {
        let dir = Point2::new(1.0, 0.0).rotate(heading);
        let g = LaneGraph::new(vec![vec![
            Point3::new(x - 50.0 * dir.x, y - 50.0 * dir.y, 0.0),
            Point3::new(x + 50.0 * dir.x, y + 50.0 * dir.y, 0.0),
        ]]).unwrap();
        let by_map = orient_by_map(Point3::new(x, y, 0.0), &LaneIndex::new(&g), 10.0).unwrap().unwrap();
        // Points on the perimeter of an l×w box aligned with the lane.
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let mut pts: Vec<Point2> = [(0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)]
            .iter()
            .map(|&(a, b)| Point2::new(a * l, b * w))
            .collect();
        for _ in 0..n {
            let u: f64 = rng.random_range(-0.5..0.5);
            let side = rng.random_range(0..4);
            pts.push(match side {
                0 => Point2::new(u * l, w / 2.0),
                1 => Point2::new(u * l, -w / 2.0),
                2 => Point2::new(l / 2.0, u * w),
                _ => Point2::new(-l / 2.0, u * w),
            });
        }
        let pts: Vec<Point2> = pts.into_iter().map(|p| p.rotate(heading) + Point2::new(x, y)).collect();
        let by_calipers = orient_by_calipers(&pts).unwrap();
        let d = wrap_angle(2.0 * (by_calipers - by_map)) / 2.0;
        prop_assert!(d.abs() < 0.1);
    }

    #[test]
    fn clip_is_subset_and_translation_invariant(
        pts in points(),
        theta in -PI..PI,
        dx in -100.0f64..100.0,
        dy in -100.0f64..100.0,
        dz in -10.0f64..10.0,
    ) {
        let c = PointCloud::new(pts);
        let p = params([2.0, 1.0, 2.5]);
        let seed = Point3::new(0.3, -0.2, 1.0);
        let out = clip_instance(&c, seed, theta, &p, 0.0);
        prop_assert!(out.iter().all(|q| c.points.contains(q)));
        let d = Point3::new(dx, dy, dz);
        let moved: PointCloud = c.iter().map(|&q| q + d).collect();
        let out2 = clip_instance(&moved, seed + d, theta, &p, dz);
        prop_assert_eq!(out.len(), out2.len());
    }

    #[test]
    fn nms_is_idempotent_and_separates_kept_boxes(cands in candidates(), thresh in 0.05f64..0.95) {
        let once = nms_bev(&cands, thresh);
        prop_assert_eq!(&nms_bev(&once, thresh), &once);
        for (i, a) in once.iter().enumerate() {
            for b in &once[i + 1..] {
                if a.class == b.class {
                    prop_assert!(bev_iou(&a.cuboid, &b.cuboid) < thresh);
                }
            }
        }
    }
}

#[test]
fn default_class_table() {
    let cfg = MinerConfig::default();
    let want: BTreeMap<u8, &str> = BTreeMap::from([
        (1, "pedestrian"),
        (2, "bicycle"),
        (3, "vehicle"),
        (6, "bus"),
        (8, "vehicle"),
    ]);
    for (k, v) in want {
        assert_eq!(cfg.class_map[&k], v);
    }
    assert_eq!(cfg.classes["pedestrian"].orientation, OrientationMode::Calipers);
    assert_eq!(cfg.classes["vehicle"].orientation, OrientationMode::Map);
}
