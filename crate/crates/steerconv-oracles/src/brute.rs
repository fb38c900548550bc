//! Brute-force reference implementations: discretized SE(3) and SO(3)
//! convolutions as direct double sums, and an independent Wigner analysis.
//! These share none of the contraction code they are used to check.

use ndarray::{Array1, Array2, Array3};
use steerconv::field::PointCloud;
use steerconv::sampling::RotationSampleSet;
use steerconv::wigner::wigner_d_real;
use steerconv::{Result, Rotation, Vec3};

/// Discretized SE(3) convolution over a point cloud and a rotation sample
/// set: `out[i, k, c] = sum_j sum_h w_h f[j, h, c]
/// kernel(H_h^{-1}(X_i - X_j), H_h^{-1} R_k)`. Intended for desk-scale
/// inputs (N^2 |grid|^2 kernel evaluations).
pub fn brute_force_se3_conv(
    cloud: &PointCloud,
    grid: &RotationSampleSet,
    f: &Array3<f64>,
    kernel: &dyn Fn(Vec3, &Rotation) -> f64,
) -> Result<Array3<f64>> {
    let (n, k) = (cloud.len(), grid.len());
    if f.shape()[0] != n || f.shape()[1] != k {
        return Err(steerconv::Error::SizeMismatch(format!(
            "samples have shape {:?}, expected ({n}, {k}, _)",
            f.shape()
        )));
    }
    let c = f.shape()[2];
    let mut out = Array3::zeros((n, k, c));
    for i in 0..n {
        for j in 0..n {
            let d = cloud.point(i) - cloud.point(j);
            for (h, wh) in grid.weights.iter().enumerate() {
                let hinv = grid.rotations[h].inverse();
                let u = hinv.apply(d);
                for ki in 0..k {
                    let g = kernel(u, &hinv.compose(&grid.rotations[ki]));
                    if g == 0.0 {
                        continue;
                    }
                    for ch in 0..c {
                        out[[i, ki, ch]] += wh * f[[j, h, ch]] * g;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Synthesizes a band-limited function on SO(3) from its expansion blocks:
/// `f(R) = sum_l <blocks[l], D^l(R)>`.
pub fn synthesize(blocks: &[Array2<f64>], r: &Rotation) -> f64 {
    let mut acc = 0.0;
    for (l, b) in blocks.iter().enumerate() {
        let d = wigner_d_real(l, r).expect("degree within ceiling");
        for i in 0..2 * l + 1 {
            for j in 0..2 * l + 1 {
                acc += b[[i, j]] * d[[i, j]];
            }
        }
    }
    acc
}

/// Independent Wigner analysis of sampled values: per entry, a plain
/// weighted sum over the samples (loop order: degree, row, column, sample;
/// the fast path loops samples outermost). Returns analysis blocks
/// `int f D^l dmu` without any degree-dependent scaling.
pub fn numeric_wigner_decompose(
    grid: &RotationSampleSet,
    values: &Array1<f64>,
    lmax: usize,
) -> Result<Vec<Array2<f64>>> {
    if values.len() != grid.len() {
        return Err(steerconv::Error::SizeMismatch(format!(
            "{} values on {} samples",
            values.len(),
            grid.len()
        )));
    }
    let ds: Vec<Vec<Array2<f64>>> = (0..=lmax)
        .map(|l| grid.rotations.iter().map(|r| wigner_d_real(l, r)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(lmax + 1);
    for (l, dl) in ds.iter().enumerate() {
        let nl = 2 * l + 1;
        let mut b = Array2::zeros((nl, nl));
        for i in 0..nl {
            for j in 0..nl {
                let mut acc = 0.0;
                for (k, d) in dl.iter().enumerate() {
                    acc += grid.weights[k] * values[k] * d[[i, j]];
                }
                b[[i, j]] = acc;
            }
        }
        out.push(b);
    }
    Ok(out)
}

/// Discretized SO(3) convolution of two band-limited functions given by
/// their sampled values on an exact grid:
/// `(f * g)(R_k) = sum_h w_h f(H_h) g(H_h^{-1} R_k)`, where `g` is
/// synthesized off-grid from its quadrature analysis at band `g_band`.
pub fn brute_force_so3_conv(
    grid: &RotationSampleSet,
    f: &Array1<f64>,
    g: &Array1<f64>,
    g_band: usize,
) -> Result<Array1<f64>> {
    if f.len() != grid.len() || g.len() != grid.len() {
        return Err(steerconv::Error::SizeMismatch("sample counts differ from grid".into()));
    }
    let analysis = numeric_wigner_decompose(grid, g, g_band)?;
    // synthesis blocks carry the (2l+1) Peter-Weyl factor
    let g_blocks: Vec<Array2<f64>> = analysis
        .iter()
        .enumerate()
        .map(|(l, b)| b.mapv(|x| (2 * l + 1) as f64 * x))
        .collect();
    let k = grid.len();
    let mut out = Array1::zeros(k);
    for ki in 0..k {
        let mut acc = 0.0;
        for h in 0..k {
            let arg = grid.rotations[h].inverse().compose(&grid.rotations[ki]);
            acc += grid.weights[h] * f[h] * synthesize(&g_blocks, &arg);
        }
        out[ki] = acc;
    }
    Ok(out)
}
