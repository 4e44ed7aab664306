//! Lift a synthetic frame's instance masks into LiDAR frustums and score
//! each proposal against the per-point object ids.

use inflate3d::frustum::{extract_frustums, filter_roi, remove_ground};
use inflate3d::inflate::MinerConfig;
use inflate3d::synth::{generate_scene, SceneSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = generate_scene(&SceneSpec::default())?;
    let f = &g.scene.frame;
    let cfg = MinerConfig::default();

    let world = f.points.transformed(&f.ego);
    let above = remove_ground(&world, &g.map.ground, cfg.ground_eps);
    let cloud = filter_roi(&above, &g.map.drive, cfg.roi_margin);
    println!(
        "{} points, {} above ground, {} in the ROI",
        world.len(),
        above.len(),
        cloud.len()
    );

    // Filtering drops points, so recover ids by position.
    let ids: std::collections::HashMap<_, i32> = world
        .iter()
        .zip(&g.scene.point_object)
        .map(|(p, &id)| ((p.x.to_bits(), p.y.to_bits(), p.z.to_bits()), id))
        .collect();

    for p in extract_frustums(&cloud, &f.masks, &f.cameras, &f.ego, cfg.min_points)? {
        let obj = g.scene.mask_object[p.mask_index];
        let own = p
            .point_indices
            .iter()
            .filter(|&&i| {
                let q = cloud.points[i];
                ids[&(q.x.to_bits(), q.y.to_bits(), q.z.to_bits())] == obj as i32
            })
            .count();
        println!(
            "camera {} mask {:2} ({:<10}) {:4} points, {:5.1}% from object {obj}",
            p.camera_id,
            p.mask_index,
            g.scene.objects[obj].class,
            p.point_indices.len(),
            100.0 * own as f64 / p.point_indices.len() as f64
        );
    }
    Ok(())
}
