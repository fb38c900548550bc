//! Point clouds and band-limited feature fields: per cloud point, a stack of
//! Wigner coefficient matrices `f^l` of shape `(2l+1, 2l+1)` per channel.
//!
//! Block `l` is stored as an `(N, 2l+1, 2l+1, C_l)` array: point, matrix row,
//! matrix column, channel. The function on SE(3) represented at a point is
//! `f(x, R) = sum_l <f^l(x), D^l(R)>`.

use crate::error::{Error, Result};
use crate::rotation::{Rotation, Vec3};
use crate::wigner::wigner_d_real;
use ndarray::{Array3, Array4};

#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec3>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec3>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::SizeMismatch("point cloud must be nonempty".into()));
        }
        if let Some(p) = points.iter().find(|p| !p.is_finite()) {
            return Err(Error::Parse(format!("non-finite point {p:?}")));
        }
        Ok(PointCloud { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Vec3 {
        self.points[i]
    }

    /// The cloud with every point mapped to `R x + t`.
    pub fn transformed(&self, r: &Rotation, t: Vec3) -> PointCloud {
        PointCloud { points: self.points.iter().map(|p| r.apply(*p) + t).collect() }
    }

    /// Uniformly rescales so the farthest point from the origin is at `radius`.
    pub fn rescaled(&self, radius: f64) -> PointCloud {
        let max = self.points.iter().map(|p| p.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return self.clone();
        }
        let s = radius / max;
        PointCloud { points: self.points.iter().map(|p| *p * s).collect() }
    }
}

/// Wigner-coefficient field over a cloud, band-limited to `lmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureField {
    n_points: usize,
    blocks: Vec<Array4<f64>>,
}

impl FeatureField {
    /// Zero field with the given per-degree channel counts
    /// (`channels[l]` = C_l).
    pub fn zero(n_points: usize, channels: &[usize]) -> Self {
        let blocks = channels
            .iter()
            .enumerate()
            .map(|(l, &c)| Array4::zeros((n_points, 2 * l + 1, 2 * l + 1, c)))
            .collect();
        FeatureField { n_points, blocks }
    }

    pub fn from_blocks(blocks: Vec<Array4<f64>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::SizeMismatch("field needs at least the l = 0 block".into()));
        }
        let n_points = blocks[0].shape()[0];
        for (l, b) in blocks.iter().enumerate() {
            let s = b.shape();
            if s[0] != n_points || s[1] != 2 * l + 1 || s[2] != 2 * l + 1 {
                return Err(Error::ShapeMismatch(format!(
                    "block {l} has shape {s:?}, expected ({n_points}, {}, {}, _)",
                    2 * l + 1,
                    2 * l + 1
                )));
            }
        }
        Ok(FeatureField { n_points, blocks })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn lmax(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn channels(&self, l: usize) -> usize {
        self.blocks.get(l).map_or(0, |b| b.shape()[3])
    }

    /// Channel count shared by all blocks, or an error when they differ.
    pub fn uniform_channels(&self) -> Result<usize> {
        let c = self.channels(0);
        for l in 0..=self.lmax() {
            if self.channels(l) != c {
                return Err(Error::ShapeMismatch(format!(
                    "per-degree channel counts differ: l=0 has {c}, l={l} has {}",
                    self.channels(l)
                )));
            }
        }
        Ok(c)
    }

    pub fn block(&self, l: usize) -> &Array4<f64> {
        &self.blocks[l]
    }

    pub fn block_mut(&mut self, l: usize) -> &mut Array4<f64> {
        &mut self.blocks[l]
    }

    pub fn blocks(&self) -> &[Array4<f64>] {
        &self.blocks
    }

    /// Drops blocks above `lmax` (band-limiting truncation).
    pub fn truncated(mut self, lmax: usize) -> Self {
        self.blocks.truncate(lmax + 1);
        self
    }

    /// Extends the band with zero blocks up to `lmax` (no-op when already
    /// that wide). New blocks reuse the l = 0 channel count.
    pub fn padded(mut self, lmax: usize) -> Self {
        let c = self.channels(0);
        for l in self.blocks.len()..=lmax {
            self.blocks.push(Array4::zeros((self.n_points, 2 * l + 1, 2 * l + 1, c)));
        }
        self
    }

    /// Left-multiplies every block by `D^l(R)`: the field of the rotated
    /// function evaluated at the rotated points.
    pub fn rotated(&self, r: &Rotation) -> Result<FeatureField> {
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for (l, b) in self.blocks.iter().enumerate() {
            let d = wigner_d_real(l, r)?;
            let n = 2 * l + 1;
            let mut out = Array4::zeros(b.raw_dim());
            for p in 0..self.n_points {
                for j in 0..n {
                    for c in 0..b.shape()[3] {
                        for i in 0..n {
                            let mut acc = 0.0;
                            for k in 0..n {
                                acc += d[[i, k]] * b[[p, k, j, c]];
                            }
                            out[[p, i, j, c]] = acc;
                        }
                    }
                }
            }
            blocks.push(out);
        }
        Ok(FeatureField { n_points: self.n_points, blocks })
    }

    pub fn max_abs_diff(&self, other: &FeatureField) -> f64 {
        let mut d: f64 = 0.0;
        for (a, b) in self.blocks.iter().zip(&other.blocks) {
            for (x, y) in a.iter().zip(b.iter()) {
                d = d.max((x - y).abs());
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    pub fn scaled(&self, s: f64) -> FeatureField {
        FeatureField {
            n_points: self.n_points,
            blocks: self.blocks.iter().map(|b| b.mapv(|x| x * s)).collect(),
        }
    }

    pub fn added(&self, other: &FeatureField) -> Result<FeatureField> {
        if self.blocks.len() != other.blocks.len() || self.n_points != other.n_points {
            return Err(Error::ShapeMismatch("field shapes differ".into()));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a + b)
            .collect();
        Ok(FeatureField { n_points: self.n_points, blocks })
    }
}

/// Embeds single-column (vector) equivariant features into matrix form:
/// `vectors[l]` has shape `(N, 2l+1, C_l)` and lands in the center column
/// (m = 0) of block `l`, all other columns zero.
pub fn embed_tfn_input(vectors: &[Array3<f64>]) -> Result<FeatureField> {
    if vectors.is_empty() {
        return Err(Error::SizeMismatch("no vector features given".into()));
    }
    let n_points = vectors[0].shape()[0];
    let mut blocks = Vec::with_capacity(vectors.len());
    for (l, v) in vectors.iter().enumerate() {
        let s = v.shape();
        if s[0] != n_points || s[1] != 2 * l + 1 {
            return Err(Error::ShapeMismatch(format!(
                "vector block {l} has shape {s:?}"
            )));
        }
        let mut b = Array4::zeros((n_points, 2 * l + 1, 2 * l + 1, s[2]));
        for p in 0..n_points {
            for i in 0..2 * l + 1 {
                for c in 0..s[2] {
                    b[[p, i, l, c]] = v[[p, i, c]];
                }
            }
        }
        blocks.push(b);
    }
    FeatureField::from_blocks(blocks)
}

/// Reads the center column (j = 0) back out of every block; inverse of
/// `embed_tfn_input` on embedded fields, and the extraction matching
/// vector-form layer outputs.
pub fn extract_tfn_output(field: &FeatureField) -> Vec<Array3<f64>> {
    let n = field.n_points();
    (0..=field.lmax())
        .map(|l| {
            let b = field.block(l);
            let c = b.shape()[3];
            let mut out = Array3::zeros((n, 2 * l + 1, c));
            for p in 0..n {
                for i in 0..2 * l + 1 {
                    for ch in 0..c {
                        out[[p, i, ch]] = b[[p, i, l, ch]];
                    }
                }
            }
            out
        })
        .collect()
}
