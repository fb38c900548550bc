//! The two convolution formulations on point clouds, their separable
//! components, and the multiview stack.
//!
//! Both layer forms share the composite term
//! `G^l_{a,b,e}(X_i) = sum_j f^l_{a,b}(X_j) kappa^{l'}_{r,e}(X_i - X_j)`;
//! they differ in how the weight contraction is associated. The TFN form
//! contracts composite rows against `Q^{L,(l,l')}` and columns against the
//! TFN weight block; the SE(3) form first folds its weight block through
//! `Q^{(l,l'),L}` over `(m', M)` and then proceeds identically. Sums run in
//! a fixed order (points ascending, then degrees, radial index, column) so
//! results are bit-stable across runs.

use crate::basis::KernelBasisSpec;
use crate::cg::cg_tensor_real;
use crate::error::{Error, Result};
use crate::field::{FeatureField, PointCloud};
use crate::rotation::{Rotation, Vec3};
use crate::weights::{Se3Weights, TfnWeights};
use ndarray::{Array1, Array2, Array3, Array5};
use std::collections::BTreeMap;

/// Options shared by the layer operations.
#[derive(Debug, Clone, Default)]
pub struct LayerOptions {
    /// Drop the self-interaction term j = i from the point sums.
    pub exclude_self: bool,
    /// Truncate the output band; default is `lmax_in + l'_max`.
    pub lmax_out: Option<usize>,
}

/// Point-cloud convolution of a scalar field with a scalar kernel:
/// `(f * kappa)(X_i) = sum_j f(X_j) kappa(X_i - X_j)`.
pub fn pointcloud_conv(
    cloud: &PointCloud,
    f: &Array1<f64>,
    kernel: impl Fn(Vec3) -> f64,
) -> Result<Array1<f64>> {
    if f.len() != cloud.len() {
        return Err(Error::SizeMismatch(format!(
            "field has {} values for {} points",
            f.len(),
            cloud.len()
        )));
    }
    let mut out = Array1::zeros(cloud.len());
    for i in 0..cloud.len() {
        let mut acc = 0.0;
        for j in 0..cloud.len() {
            acc += f[j] * kernel(cloud.point(i) - cloud.point(j));
        }
        out[i] = acc;
    }
    Ok(out)
}

/// The raw composite features of one steerable basis: for each input degree
/// `l`, kernel degree `l'` and radial index `r`, the array
/// `(N, 2l+1, 2l+1, 2l'+1, C_l)` holding `f^l (outer) kappa^{l'}_r` summed
/// over source points.
pub struct CompositeField {
    pub entries: BTreeMap<(usize, usize, usize), Array5<f64>>,
}

/// Kernel values `kappa^{l'}_{r}(X_i - X_j)` for one `(l', r)`.
fn kernel_table(
    cloud: &PointCloud,
    spec: &KernelBasisSpec,
    lp: usize,
    r: usize,
    exclude_self: bool,
) -> Result<Array3<f64>> {
    let n = cloud.len();
    let mut t = Array3::zeros((n, n, 2 * lp + 1));
    for i in 0..n {
        for j in 0..n {
            if exclude_self && i == j {
                continue;
            }
            let v = spec.eval_kernel(lp, r, cloud.point(i) - cloud.point(j))?;
            for (e, val) in v.iter().enumerate() {
                t[[i, j, e]] = *val;
            }
        }
    }
    Ok(t)
}

fn composite_block(
    field: &FeatureField,
    cloud: &PointCloud,
    kernel: &Array3<f64>,
    l: usize,
) -> Array5<f64> {
    let n = cloud.len();
    let nl = 2 * l + 1;
    let ne = kernel.shape()[2];
    let c = field.channels(l);
    let fb = field.block(l);
    let mut g = Array5::zeros((n, nl, nl, ne, c));
    for i in 0..n {
        for j in 0..n {
            for a in 0..nl {
                for b in 0..nl {
                    for e in 0..ne {
                        let kv = kernel[[i, j, e]];
                        if kv == 0.0 {
                            continue;
                        }
                        for ch in 0..c {
                            g[[i, a, b, e, ch]] += fb[[j, a, b, ch]] * kv;
                        }
                    }
                }
            }
        }
    }
    g
}

/// Computes all composite blocks of `field` against every `(l', r)` kernel
/// of the basis.
pub fn steerable_feature_conv(
    field: &FeatureField,
    cloud: &PointCloud,
    spec: &KernelBasisSpec,
    opts: &LayerOptions,
) -> Result<CompositeField> {
    if field.n_points() != cloud.len() {
        return Err(Error::SizeMismatch(format!(
            "field over {} points, cloud has {}",
            field.n_points(),
            cloud.len()
        )));
    }
    let mut entries = BTreeMap::new();
    for lp in 0..=spec.max_degree() {
        for r in 0..spec.radial_count(lp) {
            let kt = kernel_table(cloud, spec, lp, r, opts.exclude_self)?;
            for l in 0..=field.lmax() {
                entries.insert((l, lp, r), composite_block(field, cloud, &kt, l));
            }
        }
    }
    Ok(CompositeField { entries })
}

/// Contract composite rows with `Q^{L,(l,l')}`:
/// `T_{n,i,m,c} = sum_{a,e} Q_{i,a,e} G_{n,a,m,e,c}`.
fn project_rows(q: &ndarray::Array3<f64>, g: &Array5<f64>) -> ndarray::Array4<f64> {
    let (n, nl, ne) = (g.shape()[0], g.shape()[1], g.shape()[3]);
    let c = g.shape()[4];
    let nbl = q.shape()[0];
    let mut t = ndarray::Array4::zeros((n, nbl, nl, c));
    for p in 0..n {
        for i in 0..nbl {
            for m in 0..nl {
                for ch in 0..c {
                    let mut acc = 0.0;
                    for a in 0..nl {
                        for e in 0..ne {
                            acc += q[[i, a, e]] * g[[p, a, m, e, ch]];
                        }
                    }
                    t[[p, i, m, ch]] = acc;
                }
            }
        }
    }
    t
}

fn output_band(field: &FeatureField, spec: &KernelBasisSpec, opts: &LayerOptions) -> usize {
    opts.lmax_out.unwrap_or(field.lmax() + spec.max_degree())
}

/// TFN layer in matrix form:
/// `out^L_{ij,d} = sum_{l,l',c,r,m} Q^{L,(l,l')}_{i,:,:} (f^l_{:,m,c} * kappa^{l'}_r) V^{(l,l'),L}_{jd,crm} + b^L_d`
/// with the bias applied only at L = 0.
pub fn tfn_layer(
    field: &FeatureField,
    cloud: &PointCloud,
    spec: &KernelBasisSpec,
    v: &TfnWeights,
    opts: &LayerOptions,
) -> Result<FeatureField> {
    v.validate()?;
    let composites = steerable_feature_conv(field, cloud, spec, opts)?;
    let lmax_out = output_band(field, spec, opts);
    let d_out = v.output_channels();
    let n = cloud.len();
    let mut out = FeatureField::zero(n, &vec![d_out; lmax_out + 1]);
    for (&(l, lp, big_l), vb) in &v.blocks {
        if l > field.lmax() || lp > spec.max_degree() || big_l > lmax_out {
            continue;
        }
        let s = vb.shape();
        if s[1] != d_out {
            return Err(Error::ShapeMismatch("inconsistent output channels".into()));
        }
        if s[2] != field.channels(l) {
            return Err(Error::ShapeMismatch(format!(
                "block (l={l}, l'={lp}, L={big_l}) expects {} input channels, field has {}",
                s[2],
                field.channels(l)
            )));
        }
        if s[3] != spec.radial_count(lp) {
            return Err(Error::ShapeMismatch(format!(
                "block (l={l}, l'={lp}, L={big_l}) expects {} radial profiles, basis has {}",
                s[3],
                spec.radial_count(lp)
            )));
        }
        let q = cg_tensor_real(l, lp, big_l)?;
        for r in 0..s[3] {
            let g = &composites.entries[&(l, lp, r)];
            let t = project_rows(&q, g);
            let ob = out.block_mut(big_l);
            let nbl = 2 * big_l + 1;
            for p in 0..n {
                for i in 0..nbl {
                    for j in 0..nbl {
                        for d in 0..d_out {
                            let mut acc = 0.0;
                            for m in 0..2 * l + 1 {
                                for c in 0..s[2] {
                                    acc += t[[p, i, m, c]] * vb[[j, d, c, r, m]];
                                }
                            }
                            ob[[p, i, j, d]] += acc;
                        }
                    }
                }
            }
        }
    }
    apply_bias(&mut out, &v.bias);
    Ok(out)
}

/// SE(3) convolution layer in the Wigner basis:
/// `out^L_{ij,d} = sum_{l,l',c,r,m} Q^{L,(l,l')}_{i,:,:} (f^l_{:,m,c} * kappa^{l'}_r)
///  sum_{m',M} Q^{(l,l'),L}_{m,m',M} W^{l',L}_{jd,crm'M} + b^L_d`.
///
/// The inner `(m', M)` contraction is exactly the weight translation `iota`,
/// so this layer folds its weights once and runs the shared accumulator;
/// outputs are bit-identical to `tfn_layer(field, .., iota(w), ..)`. The
/// independent validation of the layer is the brute-force SE(3) convolution
/// oracle, not the TFN path.
pub fn se3_conv_layer(
    field: &FeatureField,
    cloud: &PointCloud,
    spec: &KernelBasisSpec,
    w: &Se3Weights,
    opts: &LayerOptions,
) -> Result<FeatureField> {
    let folded = crate::weights::iota(w)?;
    tfn_layer(field, cloud, spec, &folded, opts)
}

fn apply_bias(out: &mut FeatureField, bias: &[f64]) {
    let ob = out.block_mut(0);
    for p in 0..ob.shape()[0] {
        for (d, b) in bias.iter().enumerate() {
            ob[[p, 0, 0, d]] += b;
        }
    }
}

/// The `0 x SO(3)` separable component: per point and degree, the matrix
/// product `f^L theta^L`. `theta[L]` holds the analysis coefficients
/// `int theta(R) D^L(R) dmu(R)` of the rotation kernel.
pub fn so3_component(field: &FeatureField, theta: &[Array2<f64>]) -> Result<FeatureField> {
    if theta.len() > field.lmax() + 1 {
        return Err(Error::BandLimitMismatch(format!(
            "kernel carries {} blocks, field is band-limited to {}",
            theta.len(),
            field.lmax()
        )));
    }
    let mut out = FeatureField::zero(
        field.n_points(),
        &(0..=field.lmax()).map(|l| field.channels(l)).collect::<Vec<_>>(),
    );
    for l in 0..=field.lmax() {
        let Some(th) = theta.get(l) else { continue };
        if th.shape() != [2 * l + 1, 2 * l + 1] {
            return Err(Error::ShapeMismatch(format!(
                "theta block {l} has shape {:?}",
                th.shape()
            )));
        }
        let fb = field.block(l);
        let ob = out.block_mut(l);
        let n = 2 * l + 1;
        for p in 0..field.n_points() {
            for c in 0..fb.shape()[3] {
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = 0.0;
                        for k in 0..n {
                            acc += fb[[p, i, k, c]] * th[[k, j]];
                        }
                        ob[[p, i, j, c]] += acc;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The `R^3 x I` separable component for a single basis kernel
/// `kappa^{l'}_{r,m'}`:
/// `out^L_{ij} = sum_l Q^{L,(l,l')}_{i,:,:} (f^l * kappa^{l'}_r) Q^{(l,l'),L}_{:,m',j}`.
pub fn r3_component(
    field: &FeatureField,
    cloud: &PointCloud,
    spec: &KernelBasisSpec,
    lp: usize,
    r: usize,
    mp: i64,
    opts: &LayerOptions,
) -> Result<FeatureField> {
    if mp.unsigned_abs() as usize > lp {
        return Err(Error::IndexOutOfRange(format!("m' = {mp} out of range for l' = {lp}")));
    }
    spec.profile(lp, r)?;
    let c_uniform = field.uniform_channels()?;
    let n = cloud.len();
    if field.n_points() != n {
        return Err(Error::SizeMismatch("field/cloud size".into()));
    }
    let lmax_out = field.lmax() + lp;
    let mut out = FeatureField::zero(n, &vec![c_uniform; lmax_out + 1]);
    let kt = kernel_table(cloud, spec, lp, r, opts.exclude_self)?;
    let mp_idx = (mp + lp as i64) as usize;
    for big_l in 0..=lmax_out {
        let lo = big_l.abs_diff(lp);
        let hi = (big_l + lp).min(field.lmax());
        for l in lo..=hi {
            let q = cg_tensor_real(l, lp, big_l)?;
            let g = composite_block(field, cloud, &kt, l);
            let t = project_rows(&q, &g); // (N, 2L+1, 2l+1, C)
            let ob = out.block_mut(big_l);
            let (nbl, nl) = (2 * big_l + 1, 2 * l + 1);
            for p in 0..n {
                for i in 0..nbl {
                    for j in 0..nbl {
                        for c in 0..c_uniform {
                            let mut acc = 0.0;
                            for m in 0..nl {
                                // Q^{(l,l'),L}_{m,m',j} = Q^{L,(l,l')}_{j,m,m'}
                                acc += t[[p, i, m, c]] * q[[j, m, mp_idx]];
                            }
                            ob[[p, i, j, c]] += acc;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// One scalar kernel of a multiview stack, picked out of a steerable basis.
#[derive(Debug, Clone)]
pub struct ScalarKernel {
    pub lp: usize,
    pub r: usize,
    pub m: i64,
}

/// A plain convolution layer on scalar per-point channels.
#[derive(Debug, Clone)]
pub struct ScalarLayer {
    /// `(D_out, K, C_in)` over the stack's kernel list.
    pub weights: Array3<f64>,
    pub bias: Vec<f64>,
    pub relu: bool,
}

/// A stack of scalar layers sharing one kernel list.
#[derive(Debug, Clone)]
pub struct MultiviewStack {
    pub spec: KernelBasisSpec,
    pub kernels: Vec<ScalarKernel>,
    pub layers: Vec<ScalarLayer>,
}

impl MultiviewStack {
    fn kernel_value(&self, k: &ScalarKernel, u: Vec3) -> Result<f64> {
        let v = self.spec.eval_kernel(k.lp, k.r, u)?;
        Ok(v[(k.m + k.lp as i64) as usize])
    }

    fn apply_layer(
        &self,
        layer: &ScalarLayer,
        values: &Array2<f64>,
        targets: &[Vec3],
        sources: &[Vec3],
    ) -> Result<Array2<f64>> {
        let (d_out, nk, c_in) = (
            layer.weights.shape()[0],
            layer.weights.shape()[1],
            layer.weights.shape()[2],
        );
        if values.shape()[1] != c_in || nk != self.kernels.len() {
            return Err(Error::ShapeMismatch("scalar layer weight shape".into()));
        }
        let mut out = Array2::<f64>::zeros((targets.len(), d_out));
        for (ti, t) in targets.iter().enumerate() {
            // conv features per (kernel, channel)
            let mut feat = Array2::<f64>::zeros((nk, c_in));
            for (ki, k) in self.kernels.iter().enumerate() {
                for (si, s) in sources.iter().enumerate() {
                    let kv = self.kernel_value(k, *t - *s)?;
                    for c in 0..c_in {
                        feat[[ki, c]] += values[[si, c]] * kv;
                    }
                }
            }
            for d in 0..d_out {
                let mut acc = layer.bias[d];
                for ki in 0..nk {
                    for c in 0..c_in {
                        acc += layer.weights[[d, ki, c]] * feat[[ki, c]];
                    }
                }
                out[[ti, d]] = if layer.relu { acc.max(0.0) } else { acc };
            }
        }
        Ok(out)
    }

    /// Evaluates the rotation-augmented network at `(X_i, R)` through the
    /// `R^3 x I` form: the stack runs over cloud points at the fixed rotation
    /// coordinate `R^{-1}` (kernels see `R(x - t)`), and the last layer is
    /// read off at `R^{-1} X_i`.
    pub fn multiview_eval(
        &self,
        cloud: &PointCloud,
        input: &Array2<f64>,
        r: &Rotation,
        x_index: usize,
    ) -> Result<Vec<f64>> {
        if input.shape()[0] != cloud.len() {
            return Err(Error::SizeMismatch("input/cloud size".into()));
        }
        if x_index >= cloud.len() {
            return Err(Error::IndexOutOfRange(format!("point index {x_index}")));
        }
        if self.layers.is_empty() {
            return Err(Error::SizeMismatch("empty layer stack".into()));
        }
        // positions as seen by the kernels: R x for every cloud point
        let rotated: Vec<Vec3> = cloud.points().iter().map(|p| r.apply(*p)).collect();
        let mut values = input.clone();
        for layer in &self.layers[..self.layers.len() - 1] {
            values = self.apply_layer(layer, &values, &rotated, &rotated)?;
        }
        let last = &self.layers[self.layers.len() - 1];
        // final read-off point R (R^{-1} X_i) = X_i
        let target = [cloud.point(x_index)];
        let out = self.apply_layer(last, &values, &target, &rotated)?;
        Ok(out.row(0).to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::RadialProfile;
    use crate::field::embed_tfn_input;
    use crate::weights::{iota, iota_inv, random as wrandom};
    use ndarray::{Array3 as A3, Array4};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_cloud(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> PointCloud {
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
        .unwrap()
    }

    fn rand_field(rng: &mut ChaCha8Rng, n: usize, lmax: usize, c: usize) -> FeatureField {
        let blocks = (0..=lmax)
            .map(|l| {
                Array4::from_shape_fn((n, 2 * l + 1, 2 * l + 1, c), |_| rng.gen_range(-1.0..1.0))
            })
            .collect();
        FeatureField::from_blocks(blocks).unwrap()
    }

    #[test]
    fn pointcloud_conv_basics() {
        let cloud = PointCloud::new(vec![Vec3::ZERO]).unwrap();
        let f = Array1::from_vec(vec![2.0]);
        let out = pointcloud_conv(&cloud, &f, |_| 3.0).unwrap();
        assert_eq!(out[0], 6.0);

        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let cloud = rand_cloud(&mut rng, 3, 1.0);
        let f = Array1::from_shape_fn(3, |_| rng.gen_range(-1.0..1.0));
        let k = |u: Vec3| (-u.norm_sq()).exp();
        let out = pointcloud_conv(&cloud, &f, k).unwrap();
        // reversed-loop oracle
        for i in 0..3 {
            let mut acc = 0.0;
            for j in (0..3).rev() {
                acc += f[j] * k(cloud.point(i) - cloud.point(j));
            }
            assert!((out[i] - acc).abs() < 1e-12);
        }
        let zero = pointcloud_conv(&cloud, &f, |_| 0.0).unwrap();
        assert!(zero.iter().all(|x| *x == 0.0));
        assert!(pointcloud_conv(&cloud, &Array1::zeros(5), k).is_err());
    }

    #[test]
    fn composite_single_point_and_translation_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let spec = KernelBasisSpec::gaussian_shells(1, 1, 4.0).unwrap();
        let opts = LayerOptions::default();

        let cloud1 = PointCloud::new(vec![Vec3::ZERO]).unwrap();
        let field1 = rand_field(&mut rng, 1, 1, 1);
        let comp = steerable_feature_conv(&field1, &cloud1, &spec, &opts).unwrap();
        // single point: composite = f^l(0) outer kappa^{l'}(0)
        for (&(l, lp, r), g) in &comp.entries {
            let kv = spec.eval_kernel(lp, r, Vec3::ZERO).unwrap();
            let fb = field1.block(l);
            for a in 0..2 * l + 1 {
                for b in 0..2 * l + 1 {
                    for e in 0..2 * lp + 1 {
                        assert!((g[[0, a, b, e, 0]] - fb[[0, a, b, 0]] * kv[e]).abs() < 1e-14);
                    }
                }
            }
        }

        let cloud = rand_cloud(&mut rng, 4, 0.5);
        let field = rand_field(&mut rng, 4, 1, 2);
        let comp0 = steerable_feature_conv(&field, &cloud, &spec, &opts).unwrap();
        let shifted = cloud.transformed(&Rotation::IDENTITY, Vec3::new(0.3, -1.0, 2.0));
        let comp1 = steerable_feature_conv(&field, &shifted, &spec, &opts).unwrap();
        for (k, g0) in &comp0.entries {
            let g1 = &comp1.entries[k];
            for (x, y) in g0.iter().zip(g1.iter()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn composite_rotation_law() {
        // rotating cloud and field transforms the composite blocks by
        // D^l . G . D^{l'}^T at the same point indices
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let spec = KernelBasisSpec::gaussian_shells(1, 1, 6.0).unwrap();
        let opts = LayerOptions::default();
        let cloud = rand_cloud(&mut rng, 3, 0.5);
        let field = rand_field(&mut rng, 3, 1, 1);
        let base = steerable_feature_conv(&field, &cloud, &spec, &opts).unwrap();
        let r = crate::rotation::random_rotation(&mut rng);
        let t = Vec3::new(0.4, -0.2, 0.9);
        let moved = cloud.transformed(&r, t);
        let comp = steerable_feature_conv(&field.rotated(&r).unwrap(), &moved, &spec, &opts).unwrap();
        for (&(l, lp, ri), g1) in &comp.entries {
            let g0 = &base.entries[&(l, lp, ri)];
            let dl = crate::wigner::wigner_d_real(l, &r).unwrap();
            let dlp = crate::wigner::wigner_d_real(lp, &r).unwrap();
            for p in 0..3 {
                for b in 0..2 * l + 1 {
                    for i in 0..2 * l + 1 {
                        for e in 0..2 * lp + 1 {
                            let mut acc = 0.0;
                            for a in 0..2 * l + 1 {
                                for f in 0..2 * lp + 1 {
                                    acc += dl[[i, a]] * g0[[p, a, b, f, 0]] * dlp[[e, f]];
                                }
                            }
                            assert!((g1[[p, i, b, e, 0]] - acc).abs() < 1e-9);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tfn_layer_delta_coupling_single_point() {
        // one point at the origin, scalar kernel degree only: the (l, 0, l)
        // coupling is a delta, so out^l = kappa0(0) * f^l V^T per degree
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let spec = KernelBasisSpec::new(
            1.0,
            vec![vec![RadialProfile::GaussianShell { rho: 0.0, sigma: 0.5 }]],
        )
        .unwrap();
        let kappa0 = spec.eval_kernel(0, 0, Vec3::ZERO).unwrap()[0];
        let cloud = PointCloud::new(vec![Vec3::ZERO]).unwrap();
        let field = rand_field(&mut rng, 1, 2, 1);
        let mut blocks = BTreeMap::new();
        for l in 0..=2usize {
            blocks.insert(
                (l, 0usize, l),
                Array5::from_shape_fn((2 * l + 1, 1, 1, 1, 2 * l + 1), |_| {
                    rng.gen_range(-1.0..1.0)
                }),
            );
        }
        let v = TfnWeights { blocks: blocks.clone(), bias: vec![0.0] };
        let out = tfn_layer(&field, &cloud, &spec, &v, &LayerOptions::default()).unwrap();
        for l in 0..=2usize {
            let fb = field.block(l);
            let vb = &blocks[&(l, 0, l)];
            let ob = out.block(l);
            for i in 0..2 * l + 1 {
                for j in 0..2 * l + 1 {
                    let mut expect = 0.0;
                    for m in 0..2 * l + 1 {
                        expect += kappa0 * fb[[0, i, m, 0]] * vb[[j, 0, 0, 0, m]];
                    }
                    assert!((ob[[0, i, j, 0]] - expect).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn tfn_layer_zero_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let spec = KernelBasisSpec::gaussian_shells(1, 1, 4.0).unwrap();
        let cloud = rand_cloud(&mut rng, 3, 0.5);
        let field = rand_field(&mut rng, 3, 1, 2);
        let mut v = wrandom::tfn_weights(&mut rng, 1, 2, 2, 2, &[1, 1]);
        for b in v.blocks.values_mut() {
            b.fill(0.0);
        }
        v.bias = vec![0.0, 0.0];
        let out = tfn_layer(&field, &cloud, &spec, &v, &LayerOptions::default()).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn se3_layer_bias_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let spec = KernelBasisSpec::gaussian_shells(1, 1, 4.0).unwrap();
        let cloud = rand_cloud(&mut rng, 3, 0.5);
        let field = rand_field(&mut rng, 3, 1, 2);
        let mut w = wrandom::se3_weights(&mut rng, 1, 2, 2, 2, &[1, 1]);
        for b in w.blocks.values_mut() {
            b.fill(0.0);
        }
        w.bias = vec![0.5, -1.0];
        let out = se3_conv_layer(&field, &cloud, &spec, &w, &LayerOptions::default()).unwrap();
        let b0 = out.block(0);
        for p in 0..3 {
            assert_eq!(b0[[p, 0, 0, 0]], 0.5);
            assert_eq!(b0[[p, 0, 0, 1]], -1.0);
        }
        for l in 1..=out.lmax() {
            assert_eq!(
                out.block(l).iter().fold(0.0f64, |a, x| a.max(x.abs())),
                0.0
            );
        }
    }

    #[test]
    fn equivalence_both_directions() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let spec = KernelBasisSpec::gaussian_shells(2, 2, 4.0).unwrap();
        let opts = LayerOptions::default();
        for _ in 0..3 {
            let cloud = rand_cloud(&mut rng, 3, 0.5);
            let field = rand_field(&mut rng, 3, 2, 2);
            let w = wrandom::se3_weights(&mut rng, 2, 2, 2, 2, &[2, 2, 2]);
            let a = se3_conv_layer(&field, &cloud, &spec, &w, &opts).unwrap();
            let b = tfn_layer(&field, &cloud, &spec, &iota(&w).unwrap(), &opts).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-10);

            let v = wrandom::tfn_weights(&mut rng, 2, 2, 2, 2, &[2, 2, 2]);
            let c = tfn_layer(&field, &cloud, &spec, &v, &opts).unwrap();
            let d = se3_conv_layer(&field, &cloud, &spec, &iota_inv(&v).unwrap(), &opts).unwrap();
            assert!(c.max_abs_diff(&d) < 1e-10);
        }
    }

    #[test]
    fn layer_linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        let spec = KernelBasisSpec::gaussian_shells(1, 1, 4.0).unwrap();
        let opts = LayerOptions::default();
        let cloud = rand_cloud(&mut rng, 3, 0.5);
        let f1 = rand_field(&mut rng, 3, 1, 1);
        let f2 = rand_field(&mut rng, 3, 1, 1);
        let mut v = wrandom::tfn_weights(&mut rng, 1, 1, 1, 1, &[1, 1]);
        v.bias = vec![0.0];
        let combo = f1.scaled(2.0).added(&f2.scaled(-0.5)).unwrap();
        let out_combo = tfn_layer(&combo, &cloud, &spec, &v, &opts).unwrap();
        let out1 = tfn_layer(&f1, &cloud, &spec, &v, &opts).unwrap();
        let out2 = tfn_layer(&f2, &cloud, &spec, &v, &opts).unwrap();
        let expect = out1.scaled(2.0).added(&out2.scaled(-0.5)).unwrap();
        assert!(out_combo.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn layer_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let spec = KernelBasisSpec::gaussian_shells(2, 1, 6.0).unwrap();
        let opts = LayerOptions::default();
        let cloud = rand_cloud(&mut rng, 4, 0.5);
        let field = rand_field(&mut rng, 4, 2, 1);
        let v = wrandom::tfn_weights(&mut rng, 2, 2, 1, 1, &[1, 1, 1]);
        let base = tfn_layer(&field, &cloud, &spec, &v, &opts).unwrap();
        for _ in 0..4 {
            let r = crate::rotation::random_rotation(&mut rng);
            let t = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let moved = cloud.transformed(&r, t);
            let rotated_field = field.rotated(&r).unwrap();
            let out = tfn_layer(&rotated_field, &moved, &spec, &v, &opts).unwrap();
            let expect = base.rotated(&r).unwrap();
            assert!(out.max_abs_diff(&expect) < 1e-8);
        }
    }

    #[test]
    fn so3_component_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(38);
        let field = rand_field(&mut rng, 2, 2, 1);
        // theta = constant one: analysis coefficient 1 at l = 0 only
        let mut theta = vec![Array2::<f64>::zeros((1, 1))];
        theta[0][[0, 0]] = 1.0;
        let out = so3_component(&field, &theta).unwrap();
        for (x, y) in out.block(0).iter().zip(field.block(0).iter()) {
            assert!((x - y).abs() < 1e-14);
        }
        for l in 1..=2 {
            assert_eq!(out.block(l).iter().fold(0.0f64, |a, x| a.max(x.abs())), 0.0);
        }
        // band limit enforced
        let too_long: Vec<Array2<f64>> =
            (0..=3).map(|l| Array2::zeros((2 * l + 1, 2 * l + 1))).collect();
        assert!(matches!(
            so3_component(&field, &too_long),
            Err(Error::BandLimitMismatch(_))
        ));
    }

    #[test]
    fn r3_component_scalar_kernel_reduces_to_pointcloud_conv() {
        let mut rng = ChaCha8Rng::seed_from_u64(39);
        let spec = KernelBasisSpec::gaussian_shells(0, 1, 4.0).unwrap();
        let cloud = rand_cloud(&mut rng, 4, 0.6);
        let field = rand_field(&mut rng, 4, 2, 1);
        let out = r3_component(&field, &cloud, &spec, 0, 0, 0, &LayerOptions::default()).unwrap();
        // l' = 0 collapses the CG tensors; each block is a plain point-cloud
        // convolution with the scalar kernel
        let kfn = |u: Vec3| spec.eval_kernel(0, 0, u).unwrap()[0];
        for l in 0..=2usize {
            let fb = field.block(l);
            let ob = out.block(l);
            for a in 0..2 * l + 1 {
                for b in 0..2 * l + 1 {
                    let f = Array1::from_shape_fn(4, |p| fb[[p, a, b, 0]]);
                    let conv = pointcloud_conv(&cloud, &f, kfn).unwrap();
                    for p in 0..4 {
                        assert!((ob[[p, a, b, 0]] - conv[p]).abs() < 1e-12);
                    }
                }
            }
        }
        // zero field stays zero
        let zf = FeatureField::zero(4, &[1, 1, 1]);
        let out = r3_component(&zf, &cloud, &spec, 0, 0, 0, &LayerOptions::default()).unwrap();
        assert_eq!(out.max_abs(), 0.0);
    }

    #[test]
    fn embedded_vector_features_match_vector_layer() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let spec = KernelBasisSpec::gaussian_shells(1, 1, 4.0).unwrap();
        let cloud = rand_cloud(&mut rng, 3, 0.5);
        let c_in = 2;
        let vecs: Vec<A3<f64>> = (0..=1)
            .map(|l| A3::from_shape_fn((3, 2 * l + 1, c_in), |_| rng.gen_range(-1.0..1.0)))
            .collect();
        let d_out = 2;
        // vector-form weights per (l, l', L)
        let mut wv: BTreeMap<(usize, usize, usize), Array2<f64>> = BTreeMap::new();
        for l in 0..=1usize {
            for lp in 0..=1usize {
                for big_l in l.abs_diff(lp)..=l + lp {
                    wv.insert(
                        (l, lp, big_l),
                        Array2::from_shape_fn((d_out, c_in), |_| rng.gen_range(-1.0..1.0)),
                    );
                }
            }
        }
        let bias = vec![0.3, -0.7];

        // oracle: direct single-column contraction of the printed vector layer
        let mut expect: Vec<Array3<f64>> =
            (0..=2).map(|big_l| Array3::zeros((3, 2 * big_l + 1, d_out))).collect();
        for (&(l, lp, big_l), wb) in &wv {
            let q = cg_tensor_real(l, lp, big_l).unwrap();
            for p in 0..3 {
                for i in 0..2 * big_l + 1 {
                    for d in 0..d_out {
                        let mut acc = 0.0;
                        for c in 0..c_in {
                            for a in 0..2 * l + 1 {
                                for e in 0..2 * lp + 1 {
                                    let mut conv = 0.0;
                                    for s in 0..3 {
                                        let kv = spec
                                            .eval_kernel(lp, 0, cloud.point(p) - cloud.point(s))
                                            .unwrap();
                                        conv += vecs[l][[s, a, c]] * kv[e];
                                    }
                                    acc += q[[i, a, e]] * conv * wb[[d, c]];
                                }
                            }
                        }
                        expect[big_l][[p, i, d]] += acc;
                    }
                }
            }
        }
        for p in 0..3 {
            for d in 0..d_out {
                expect[0][[p, 0, d]] += bias[d];
            }
        }

        // matrix route: embed, run the matrix layer with center-column weights
        let field = embed_tfn_input(&vecs).unwrap();
        let mut blocks = BTreeMap::new();
        for (&(l, lp, big_l), wb) in &wv {
            let mut b = Array5::zeros((2 * big_l + 1, d_out, c_in, 1, 2 * l + 1));
            for d in 0..d_out {
                for c in 0..c_in {
                    b[[big_l, d, c, 0, l]] = wb[[d, c]];
                }
            }
            blocks.insert((l, lp, big_l), b);
        }
        let v = TfnWeights { blocks, bias: bias.clone() };
        let out = tfn_layer(&field, &cloud, &spec, &v, &LayerOptions::default()).unwrap();
        let got = crate::field::extract_tfn_output(&out);
        for big_l in 0..=2usize {
            for (x, y) in got[big_l].iter().zip(expect[big_l].iter()) {
                assert!((x - y).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn multiview_identity_is_plain_cnn() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let spec = KernelBasisSpec::gaussian_shells(1, 1, 6.0).unwrap();
        let stack = MultiviewStack {
            spec,
            kernels: vec![
                ScalarKernel { lp: 0, r: 0, m: 0 },
                ScalarKernel { lp: 1, r: 0, m: 1 },
            ],
            layers: vec![
                ScalarLayer {
                    weights: Array3::from_shape_fn((2, 2, 1), |_| rng.gen_range(-1.0..1.0)),
                    bias: vec![0.1, -0.2],
                    relu: true,
                },
                ScalarLayer {
                    weights: Array3::from_shape_fn((1, 2, 2), |_| rng.gen_range(-1.0..1.0)),
                    bias: vec![0.05],
                    relu: false,
                },
            ],
        };
        let cloud = rand_cloud(&mut rng, 5, 0.7);
        let input = Array2::from_shape_fn((5, 1), |_| rng.gen_range(-1.0..1.0));
        // at R = I the multiview evaluation is the plain stacked network
        let got = stack.multiview_eval(&cloud, &input, &Rotation::IDENTITY, 2).unwrap();
        let points = cloud.points().to_vec();
        let mut vals = input.clone();
        for layer in &stack.layers[..1] {
            vals = stack.apply_layer(layer, &vals, &points, &points).unwrap();
        }
        let fin = stack
            .apply_layer(&stack.layers[1], &vals, &[cloud.point(2)], &points)
            .unwrap();
        for (g, e) in got.iter().zip(fin.row(0).iter()) {
            assert!((g - e).abs() < 1e-14);
        }
    }
}
