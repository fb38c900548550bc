//! Rotation sample sets: exact band-limited Euler product grids, the
//! 60-element icosahedral rotation group, and farthest-point-sampled sets.

use crate::error::{Error, Result};
use crate::rotation::{EulerZYZ, Rotation, Vec3};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub enum SampleKind {
    ExactGrid { band: usize },
    FiniteGroup,
    Fps { seed: u64 },
}

/// An immutable set of rotations with quadrature weights summing to one.
#[derive(Debug, Clone)]
pub struct RotationSampleSet {
    pub rotations: Vec<Rotation>,
    pub weights: Vec<f64>,
    pub kind: SampleKind,
}

impl RotationSampleSet {
    pub fn len(&self) -> usize {
        self.rotations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rotations.is_empty()
    }

    pub fn from_parts(rotations: Vec<Rotation>, weights: Vec<f64>, kind: SampleKind) -> Result<Self> {
        if rotations.len() != weights.len() {
            return Err(Error::SizeMismatch(format!(
                "{} rotations vs {} weights",
                rotations.len(),
                weights.len()
            )));
        }
        Ok(RotationSampleSet { rotations, weights, kind })
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    for i in 0..n {
        // Chebyshev initial guess
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        xs[n - 1 - i] = x;
        ws[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (xs, ws)
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Product quadrature over ZYZ Euler angles: 2B uniform nodes in alpha, B
/// Gauss-Legendre nodes in cos beta, 2B uniform nodes in gamma; 4B^3 nodes
/// with total weight one. Integrates `D^l_{mn} D^{l'}_{m'n'}` exactly for
/// `l + l' < 2B` against the normalized Haar measure.
pub fn exact_euler_grid(band: usize) -> RotationSampleSet {
    assert!(band >= 1, "band limit must be at least 1");
    let (xs, ws) = gauss_legendre(band);
    let n_ang = 2 * band;
    let mut rotations = Vec::with_capacity(4 * band * band * band);
    let mut weights = Vec::with_capacity(4 * band * band * band);
    let w_ang = 1.0 / n_ang as f64;
    for j in 0..n_ang {
        let alpha = 2.0 * PI * j as f64 / n_ang as f64;
        for (x, w) in xs.iter().zip(&ws) {
            let beta = x.clamp(-1.0, 1.0).acos();
            for i in 0..n_ang {
                let gamma = 2.0 * PI * i as f64 / n_ang as f64;
                rotations.push(Rotation::from_euler(EulerZYZ { alpha, beta, gamma }));
                weights.push(w_ang * w_ang * w / 2.0);
            }
        }
    }
    RotationSampleSet { rotations, weights, kind: SampleKind::ExactGrid { band } }
}

/// The 60 rotations of the icosahedron, generated by closure from an
/// order-5 axis through the vertex (0, 1, phi) and the order-2 z axis of the
/// canonically oriented icosahedron (vertices at cyclic permutations of
/// (0, +-1, +-phi)). Element order follows the breadth-first closure with the
/// identity first, so repeated calls give the identical list.
pub fn icosahedral_group() -> RotationSampleSet {
    let phi = (1.0 + 5.0_f64.sqrt()) / 2.0;
    let g5 = Rotation::from_axis_angle(Vec3::new(0.0, 1.0, phi), 2.0 * PI / 5.0);
    let g2 = Rotation::from_axis_angle(Vec3::new(0.0, 0.0, 1.0), PI);
    let mut elements = vec![Rotation::IDENTITY];
    let mut frontier = vec![Rotation::IDENTITY];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for e in &frontier {
            for g in [&g5, &g2] {
                let p = g.compose(e);
                if !elements.iter().any(|q| q.max_abs_diff(&p) < 1e-6) {
                    elements.push(p);
                    next.push(p);
                }
            }
        }
        frontier = next;
        assert!(elements.len() <= 60, "icosahedral closure exceeded 60 elements");
    }
    let n = elements.len();
    debug_assert_eq!(n, 60);
    let weights = vec![1.0 / n as f64; n];
    RotationSampleSet { rotations: elements, weights, kind: SampleKind::FiniteGroup }
}

const FPS_POOL_BAND: usize = 16;

/// Greedy farthest-point sampling of `n` rotations under the geodesic metric
/// `d(R1, R2) = angle(R1^T R2)`. The first point is the identity; candidates
/// come from the fixed `exact_euler_grid(16)` super-grid, visited in a
/// seed-shuffled order so the seed only permutes tie-breaking. Weights are
/// uniform.
pub fn fps_rotations(n: usize, seed: u64) -> RotationSampleSet {
    assert!(n >= 1, "need at least one sample");
    let pool_set = exact_euler_grid(FPS_POOL_BAND);
    let mut order: Vec<usize> = (0..pool_set.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    let pool: Vec<Rotation> = order.iter().map(|&i| pool_set.rotations[i]).collect();

    let mut selected = vec![Rotation::IDENTITY];
    let mut dist: Vec<f64> = pool.iter().map(|r| Rotation::IDENTITY.angle_to(r)).collect();
    while selected.len() < n {
        let mut best = 0;
        let mut best_d = f64::NEG_INFINITY;
        for (i, d) in dist.iter().enumerate() {
            if *d > best_d {
                best_d = *d;
                best = i;
            }
        }
        let chosen = pool[best];
        selected.push(chosen);
        for (i, d) in dist.iter_mut().enumerate() {
            *d = d.min(chosen.angle_to(&pool[i]));
        }
    }
    let weights = vec![1.0 / n as f64; n];
    RotationSampleSet { rotations: selected, weights, kind: SampleKind::Fps { seed } }
}
