//! Layer weight tensors in both parametrizations and the linear isomorphism
//! between them.
//!
//! SE(3)-form weights `W^{l',L}` are indexed `(j, d, c, r, m', M)`: output
//! column and channel, then input channel, radial index, kernel ordinate m'
//! and rotational ordinate M. TFN-form weights `V^{(l,l'),L}` are indexed
//! `(j, d, c, r, m)` with `m` the input-block column. The map `iota`
//! contracts the Clebsch-Gordan tensor over `(m', M)` and its inverse
//! contracts back with the `(2l+1)/(2L+1)` weight; for each `(l', L)` pair
//! the TFN blocks run over the full triangle range `|L-l'| <= l <= L+l'`.

use crate::cg::{cg_tensor_real, check_triangle};
use crate::error::{Error, Result};
use ndarray::{Array5, Array6};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct Se3Weights {
    /// Key `(l', L)`; block shape `(2L+1, D, C, R_l', 2l'+1, 2L+1)`.
    pub blocks: BTreeMap<(usize, usize), Array6<f64>>,
    /// Bias per output channel, applied only to the L = 0 output block.
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TfnWeights {
    /// Key `(l, l', L)`; block shape `(2L+1, D, C, R_l', 2l+1)`.
    pub blocks: BTreeMap<(usize, usize, usize), Array5<f64>>,
    /// Bias per output channel, applied only to the L = 0 output block.
    pub bias: Vec<f64>,
}

impl Se3Weights {
    pub fn validate(&self) -> Result<()> {
        for (&(lp, big_l), b) in &self.blocks {
            let s = b.shape();
            if s[0] != 2 * big_l + 1 || s[4] != 2 * lp + 1 || s[5] != 2 * big_l + 1 {
                return Err(Error::ShapeMismatch(format!(
                    "SE(3) block (l'={lp}, L={big_l}) has shape {s:?}"
                )));
            }
            if !b.iter().all(|x| x.is_finite()) {
                return Err(Error::Parse("non-finite weight".into()));
            }
        }
        Ok(())
    }

    pub fn output_channels(&self) -> usize {
        self.bias.len()
    }
}

impl TfnWeights {
    pub fn validate(&self) -> Result<()> {
        for (&(l, lp, big_l), b) in &self.blocks {
            check_triangle(l, lp, big_l)?;
            let s = b.shape();
            if s[0] != 2 * big_l + 1 || s[4] != 2 * l + 1 {
                return Err(Error::ShapeMismatch(format!(
                    "TFN block (l={l}, l'={lp}, L={big_l}) has shape {s:?}"
                )));
            }
            if !b.iter().all(|x| x.is_finite()) {
                return Err(Error::Parse("non-finite weight".into()));
            }
        }
        Ok(())
    }

    pub fn output_channels(&self) -> usize {
        self.bias.len()
    }
}

/// Translates SE(3)-conv weights into TFN weights:
/// `iota(W)^{(l,l'),L}_{jd,crm} = sum_{m',M} Q^{(l,l'),L}_{m,m',M} W^{l',L}_{jd,crm'M}`.
pub fn iota(w: &Se3Weights) -> Result<TfnWeights> {
    w.validate()?;
    let mut blocks = BTreeMap::new();
    for (&(lp, big_l), wb) in &w.blocks {
        let s = wb.shape();
        let (nj, nd, nc, nr) = (s[0], s[1], s[2], s[3]);
        for l in big_l.abs_diff(lp)..=big_l + lp {
            let q = cg_tensor_real(l, lp, big_l)?; // (M, m, m')
            let mut v = Array5::zeros((nj, nd, nc, nr, 2 * l + 1));
            for j in 0..nj {
                for d in 0..nd {
                    for c in 0..nc {
                        for r in 0..nr {
                            for m in 0..2 * l + 1 {
                                let mut acc = 0.0;
                                for mp in 0..2 * lp + 1 {
                                    for big_m in 0..2 * big_l + 1 {
                                        acc += q[[big_m, m, mp]] * wb[[j, d, c, r, mp, big_m]];
                                    }
                                }
                                v[[j, d, c, r, m]] = acc;
                            }
                        }
                    }
                }
            }
            blocks.insert((l, lp, big_l), v);
        }
    }
    Ok(TfnWeights { blocks, bias: w.bias.clone() })
}

/// Inverse translation:
/// `iota_inv(V)^{l',L}_{jd,crm'M} = sum_{l,m} (2l+1)/(2L+1) Q^{L,(l,l')}_{M,m,m'} V^{(l,l'),L}_{jd,crm}`.
pub fn iota_inv(v: &TfnWeights) -> Result<Se3Weights> {
    v.validate()?;
    let mut blocks: BTreeMap<(usize, usize), Array6<f64>> = BTreeMap::new();
    for (&(l, lp, big_l), vb) in &v.blocks {
        let s = vb.shape();
        let (nj, nd, nc, nr) = (s[0], s[1], s[2], s[3]);
        let q = cg_tensor_real(l, lp, big_l)?;
        let scale = (2 * l + 1) as f64 / (2 * big_l + 1) as f64;
        let entry = blocks
            .entry((lp, big_l))
            .or_insert_with(|| Array6::zeros((nj, nd, nc, nr, 2 * lp + 1, 2 * big_l + 1)));
        if entry.shape() != [nj, nd, nc, nr, 2 * lp + 1, 2 * big_l + 1] {
            return Err(Error::ShapeMismatch(format!(
                "TFN blocks for (l'={lp}, L={big_l}) disagree on channel shape"
            )));
        }
        for j in 0..nj {
            for d in 0..nd {
                for c in 0..nc {
                    for r in 0..nr {
                        for mp in 0..2 * lp + 1 {
                            for big_m in 0..2 * big_l + 1 {
                                let mut acc = 0.0;
                                for m in 0..2 * l + 1 {
                                    acc += q[[big_m, m, mp]] * vb[[j, d, c, r, m]];
                                }
                                entry[[j, d, c, r, mp, big_m]] += scale * acc;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Se3Weights { blocks, bias: v.bias.clone() })
}

/// Random weight generators used by the verification suites.
pub mod random {
    use super::*;
    use rand::Rng;

    pub fn se3_weights<R: Rng>(
        rng: &mut R,
        lp_max: usize,
        big_l_max: usize,
        d_out: usize,
        c_in: usize,
        radial_counts: &[usize],
    ) -> Se3Weights {
        let mut blocks = BTreeMap::new();
        for lp in 0..=lp_max {
            for big_l in 0..=big_l_max {
                let nr = radial_counts[lp];
                let b = Array6::from_shape_fn(
                    (2 * big_l + 1, d_out, c_in, nr, 2 * lp + 1, 2 * big_l + 1),
                    |_| rng.gen_range(-1.0..1.0),
                );
                blocks.insert((lp, big_l), b);
            }
        }
        let bias = (0..d_out).map(|_| rng.gen_range(-1.0..1.0)).collect();
        Se3Weights { blocks, bias }
    }

    pub fn tfn_weights<R: Rng>(
        rng: &mut R,
        lp_max: usize,
        big_l_max: usize,
        d_out: usize,
        c_in: usize,
        radial_counts: &[usize],
    ) -> TfnWeights {
        let mut blocks = BTreeMap::new();
        for lp in 0..=lp_max {
            for big_l in 0..=big_l_max {
                for l in big_l.abs_diff(lp)..=big_l + lp {
                    let nr = radial_counts[lp];
                    let b = Array5::from_shape_fn(
                        (2 * big_l + 1, d_out, c_in, nr, 2 * l + 1),
                        |_| rng.gen_range(-1.0..1.0),
                    );
                    blocks.insert((l, lp, big_l), b);
                }
            }
        }
        let bias = (0..d_out).map(|_| rng.gen_range(-1.0..1.0)).collect();
        TfnWeights { blocks, bias }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn max_diff_se3(a: &Se3Weights, b: &Se3Weights) -> f64 {
        let mut d: f64 = 0.0;
        for (k, ab) in &a.blocks {
            let bb = &b.blocks[k];
            for (x, y) in ab.iter().zip(bb.iter()) {
                d = d.max((x - y).abs());
            }
        }
        d
    }

    fn max_diff_tfn(a: &TfnWeights, b: &TfnWeights) -> f64 {
        let mut d: f64 = 0.0;
        for (k, ab) in &a.blocks {
            let bb = &b.blocks[k];
            for (x, y) in ab.iter().zip(bb.iter()) {
                d = d.max((x - y).abs());
            }
        }
        d
    }

    #[test]
    fn zero_maps_to_zero() {
        let mut blocks = BTreeMap::new();
        blocks.insert((1usize, 1usize), Array6::zeros((3, 1, 1, 1, 3, 3)));
        let w = Se3Weights { blocks, bias: vec![0.0] };
        let v = iota(&w).unwrap();
        assert!(v.blocks.values().all(|b| b.iter().all(|x| *x == 0.0)));
        assert_eq!(v.blocks.len(), 3); // l in {0, 1, 2}
    }

    #[test]
    fn linearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let w1 = random::se3_weights(&mut rng, 1, 1, 2, 2, &[1, 2]);
        let w2 = random::se3_weights(&mut rng, 1, 1, 2, 2, &[1, 2]);
        let (a, b) = (0.7, -1.3);
        let mut combo = w1.clone();
        for (k, blk) in combo.blocks.iter_mut() {
            *blk = blk.mapv(|x| a * x) + w2.blocks[k].mapv(|x| b * x);
        }
        let v_combo = iota(&combo).unwrap();
        let v1 = iota(&w1).unwrap();
        let v2 = iota(&w2).unwrap();
        let mut expect = v1.clone();
        for (k, blk) in expect.blocks.iter_mut() {
            *blk = blk.mapv(|x| a * x) + v2.blocks[k].mapv(|x| b * x);
        }
        assert!(max_diff_tfn(&v_combo, &expect) < 1e-12);
    }

    #[test]
    fn round_trip_both_ways() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..5 {
            let w = random::se3_weights(&mut rng, 2, 2, 2, 2, &[1, 2, 1]);
            let back = iota_inv(&iota(&w).unwrap()).unwrap();
            assert!(max_diff_se3(&w, &back) < 1e-10);

            let v = random::tfn_weights(&mut rng, 2, 2, 2, 2, &[1, 2, 1]);
            let back = iota(&iota_inv(&v).unwrap()).unwrap();
            assert!(max_diff_tfn(&v, &back) < 1e-10);
        }
    }
}
