//! The equivariance checker and shared random-instance helpers.

use crate::report::CheckEntry;
use ndarray::Array4;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use steerconv::field::{FeatureField, PointCloud};
use steerconv::rotation::random_rotation;
use steerconv::{Result, Vec3};
use std::time::Instant;

pub fn rand_cloud(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> PointCloud {
    PointCloud::new(
        (0..n)
            .map(|_| {
                Vec3::new(
                    rng.gen_range(-scale..scale),
                    rng.gen_range(-scale..scale),
                    rng.gen_range(-scale..scale),
                )
            })
            .collect(),
    )
    .expect("nonempty cloud")
}

pub fn rand_field(rng: &mut ChaCha8Rng, n: usize, lmax: usize, c: usize) -> FeatureField {
    let blocks = (0..=lmax)
        .map(|l| Array4::from_shape_fn((n, 2 * l + 1, 2 * l + 1, c), |_| rng.gen_range(-1.0..1.0)))
        .collect();
    FeatureField::from_blocks(blocks).expect("consistent shapes")
}

/// Checks a layer closure for SE(3) equivariance: over `trials` random
/// roto-translations, compares the layer on the transformed cloud and field
/// against the Wigner-transformed output at the original points, and reports
/// the worst entrywise defect.
pub fn equivariance_check(
    name: impl Into<String>,
    layer: &dyn Fn(&PointCloud, &FeatureField) -> Result<FeatureField>,
    cloud: &PointCloud,
    field: &FeatureField,
    trials: usize,
    tolerance: f64,
    seed: u64,
) -> CheckEntry {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_err: f64 = 0.0;
    match layer(cloud, field) {
        Ok(base) => {
            for _ in 0..trials {
                let r = random_rotation(&mut rng);
                let t = Vec3::new(
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                );
                let moved = cloud.transformed(&r, t);
                let err = field
                    .rotated(&r)
                    .and_then(|rf| layer(&moved, &rf))
                    .and_then(|out| Ok(out.max_abs_diff(&base.rotated(&r)?)));
                match err {
                    Ok(e) => max_err = max_err.max(e),
                    Err(_) => max_err = f64::INFINITY,
                }
            }
        }
        Err(_) => max_err = f64::INFINITY,
    }
    CheckEntry::new(name, max_err, tolerance, start.elapsed().as_millis())
}
