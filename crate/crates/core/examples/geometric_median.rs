//! Seed point of a cluttered frustum: the geometric median shrugs off a
//! handful of far-away background returns that drag the mean.

use inflate3d::geom::{geometric_median, sum_of_distances, Point3, PointCloud};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut pts: Vec<Point3> = (0..200)
        .map(|_| {
            Point3::new(
                10.0 + rng.random_range(-2.3..2.3),
                rng.random_range(-0.9..0.9),
                rng.random_range(0.0..1.6),
            )
        })
        .collect();
    // Background wall behind the car.
    pts.extend((0..40).map(|i| Point3::new(35.0, -3.0 + 0.15 * i as f64, 1.0)));
    let cloud = PointCloud::new(pts);

    let n = cloud.len() as f64;
    let mean = cloud.iter().fold(Point3::default(), |a, &p| a + p);
    let mean = Point3::new(mean.x / n, mean.y / n, mean.z / n);
    let median = geometric_median(&cloud, 1e-6, 1000)?;

    println!(
        "mean   ({:6.2}, {:5.2}, {:4.2})  cost {:.1}",
        mean.x,
        mean.y,
        mean.z,
        sum_of_distances(&cloud, mean)
    );
    println!(
        "median ({:6.2}, {:5.2}, {:4.2})  cost {:.1}",
        median.x,
        median.y,
        median.z,
        sum_of_distances(&cloud, median)
    );
    Ok(())
}
