//! Clebsch-Gordan scalar coefficients and coupling tensors, in the complex
//! and real bases, with the contraction primitive used by the convolution
//! layers.
//!
//! Tensor orientation: `cg_tensor_*(l, lp, big_l)` returns `Q^{L,(l,l')}` of
//! shape `(2L+1, 2l+1, 2l'+1)` indexed `(M, m, m')`; the transposed
//! orientation `Q^{(l,l'),L}` is the axis permutation `(m, m', M)`.
//!
//! The real tensor is `(C^L)^T Qhat (conj(C^l) x conj(C^l'))`; this product
//! is purely imaginary when `l + l' + L` is odd, so that case carries an
//! extra factor `-i` to land in the real basis (docs/CONVENTIONS.md). The
//! residue left after the projection is checked against a tolerance.

use crate::error::{Error, Result};
use crate::factorial::ln_factorial;
use crate::sh::{check_degree, transition_matrix};
use crate::tolerances::TAU_IMAG;
use ndarray::{Array1, Array2, Array3};
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

/// Index bundle for a single scalar coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CgKey {
    pub l: usize,
    pub lp: usize,
    pub big_l: usize,
    pub m: i64,
    pub mp: i64,
    pub big_m: i64,
}

pub(crate) fn check_triangle(l: usize, lp: usize, big_l: usize) -> Result<()> {
    check_degree(l)?;
    check_degree(lp)?;
    let lo = l.abs_diff(lp);
    let hi = l + lp;
    if big_l < lo || big_l > hi {
        return Err(Error::TriangleViolation { l, lp, big_l });
    }
    Ok(())
}

/// Racah factorial sum; valid on its stated domain (`M >= 0`, `l >= l'`).
/// The sum index k runs over exactly the integers keeping all six factorial
/// arguments nonnegative.
fn cg_base(l: i64, lp: i64, m: i64, mp: i64, big_l: i64, big_m: i64) -> f64 {
    debug_assert_eq!(big_m, m + mp);
    let pref = (0.5
        * (((2 * big_l + 1) as f64).ln() + ln_factorial(big_l + l - lp)
            + ln_factorial(big_l - l + lp)
            + ln_factorial(l + lp - big_l)
            - ln_factorial(l + lp + big_l + 1)))
    .exp();
    let pref2 = (0.5
        * (ln_factorial(big_l + big_m)
            + ln_factorial(big_l - big_m)
            + ln_factorial(l - m)
            + ln_factorial(l + m)
            + ln_factorial(lp - mp)
            + ln_factorial(lp + mp)))
    .exp();
    let kmin = 0.max(-(big_l - lp + m)).max(-(big_l - l - mp));
    let kmax = (l + lp - big_l).min(l - m).min(lp + mp);
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let ln_den = ln_factorial(k)
            + ln_factorial(l + lp - big_l - k)
            + ln_factorial(l - m - k)
            + ln_factorial(lp + mp - k)
            + ln_factorial(big_l - lp + m + k)
            + ln_factorial(big_l - l - mp + k);
        sum += sign * (-ln_den).exp();
    }
    pref * pref2 * sum
}

fn cg_extended(l: i64, lp: i64, m: i64, mp: i64, big_l: i64, big_m: i64) -> f64 {
    if big_m != m + mp || big_m.abs() > big_l {
        return 0.0;
    }
    let sign = if (l + lp - big_l) % 2 == 0 { 1.0 } else { -1.0 };
    if big_m < 0 {
        return sign * cg_extended(l, lp, -m, -mp, big_l, -big_m);
    }
    if l < lp {
        return sign * cg_extended(lp, l, mp, m, big_l, big_m);
    }
    cg_base(l, lp, m, mp, big_l, big_m)
}

/// `<l,l'; m,m' | L, M>`. Zero whenever `M != m + m'`.
pub fn cg_scalar(k: &CgKey) -> Result<f64> {
    check_triangle(k.l, k.lp, k.big_l)?;
    if k.m.abs() > k.l as i64 || k.mp.abs() > k.lp as i64 || k.big_m.abs() > k.big_l as i64 {
        return Err(Error::IndexOutOfRange(format!("{k:?}")));
    }
    Ok(cg_extended(k.l as i64, k.lp as i64, k.m, k.mp, k.big_l as i64, k.big_m))
}

/// Complex tensor `Qhat^{L,(l,l')}`, shape `(2L+1, 2l+1, 2l'+1)`; sparse in
/// the sense that entry `(M, m, m')` vanishes unless `M = m + m'`.
pub fn cg_tensor_complex(l: usize, lp: usize, big_l: usize) -> Result<Array3<f64>> {
    check_triangle(l, lp, big_l)?;
    let (li, lpi, bli) = (l as i64, lp as i64, big_l as i64);
    let mut q = Array3::zeros((2 * big_l + 1, 2 * l + 1, 2 * lp + 1));
    for m in -li..=li {
        for mp in -lpi..=lpi {
            let big_m = m + mp;
            if big_m.abs() <= bli {
                q[[(bli + big_m) as usize, (li + m) as usize, (lpi + mp) as usize]] =
                    cg_extended(li, lpi, m, mp, bli, big_m);
            }
        }
    }
    Ok(q)
}

fn real_tensor_uncached(l: usize, lp: usize, big_l: usize, tau: f64) -> Result<Array3<f64>> {
    let qh = cg_tensor_complex(l, lp, big_l)?;
    let (nl, nlp, nbl) = (2 * l + 1, 2 * lp + 1, 2 * big_l + 1);
    let cl = transition_matrix(l);
    let clp = transition_matrix(lp);
    let cbl = transition_matrix(big_l);
    // left: (C^L)^T Qhat over the M axis
    let mut left: Array3<Complex64> = Array3::zeros((nbl, nl, nlp));
    for i in 0..nbl {
        for a in 0..nl {
            for b in 0..nlp {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..nbl {
                    acc += cbl[[k, i]] * qh[[k, a, b]];
                }
                left[[i, a, b]] = acc;
            }
        }
    }
    // right: contract (conj(C^l) x conj(C^l')) over the (m, m') axes
    let odd = (l + lp + big_l) % 2 == 1;
    let mut out = Array3::zeros((nbl, nl, nlp));
    let mut residue: f64 = 0.0;
    for i in 0..nbl {
        for a in 0..nl {
            for b in 0..nlp {
                let mut acc = Complex64::new(0.0, 0.0);
                for p in 0..nl {
                    for q in 0..nlp {
                        acc += left[[i, p, q]] * cl[[p, a]].conj() * clp[[q, b]].conj();
                    }
                }
                if odd {
                    acc *= Complex64::new(0.0, -1.0);
                }
                residue = residue.max(acc.im.abs());
                out[[i, a, b]] = acc.re;
            }
        }
    }
    if residue > tau {
        return Err(Error::ImaginaryResidue { residue, tolerance: tau });
    }
    Ok(out)
}

type CacheMap = HashMap<(usize, usize, usize), Array3<f64>>;

fn cache() -> &'static RwLock<CacheMap> {
    static CACHE: OnceLock<RwLock<CacheMap>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Real tensor `Q^{L,(l,l')}`, shape `(2L+1, 2l+1, 2l'+1)`. Values are
/// memoized per `(l, l', L)`; after first construction all lookups are
/// read-only.
pub fn cg_tensor_real(l: usize, lp: usize, big_l: usize) -> Result<Array3<f64>> {
    check_triangle(l, lp, big_l)?;
    if let Some(t) = cache().read().unwrap().get(&(l, lp, big_l)) {
        return Ok(t.clone());
    }
    let t = real_tensor_uncached(l, lp, big_l, TAU_IMAG)?;
    cache().write().unwrap().insert((l, lp, big_l), t.clone());
    Ok(t)
}

/// Contracts `Q^{L,(l,l')}` against a `(2l+1) x (2l'+1)` matrix:
/// `out_i = sum_{m,m'} Q_{i,m,m'} A_{m,m'}`.
pub fn project_composite(big_l: usize, l: usize, lp: usize, a: &Array2<f64>) -> Result<Array1<f64>> {
    if a.shape() != [2 * l + 1, 2 * lp + 1] {
        return Err(Error::ShapeMismatch(format!(
            "expected ({}, {}), got {:?}",
            2 * l + 1,
            2 * lp + 1,
            a.shape()
        )));
    }
    let q = cg_tensor_real(l, lp, big_l)?;
    let mut out = Array1::zeros(2 * big_l + 1);
    for i in 0..2 * big_l + 1 {
        let mut acc = 0.0;
        for m in 0..2 * l + 1 {
            for mp in 0..2 * lp + 1 {
                acc += q[[i, m, mp]] * a[[m, mp]];
            }
        }
        out[i] = acc;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wigner::wigner_d_real;
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn delta_constraint() {
        let k = CgKey { l: 1, lp: 1, big_l: 2, m: 0, mp: 1, big_m: 0 };
        assert_eq!(cg_scalar(&k).unwrap(), 0.0);
    }

    #[test]
    fn coupling_with_trivial() {
        for l in 0..=3 {
            for m in -(l as i64)..=(l as i64) {
                let k = CgKey { l, lp: 0, big_l: l, m, mp: 0, big_m: m };
                assert!((cg_scalar(&k).unwrap() - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn known_value() {
        let k = CgKey { l: 1, lp: 1, big_l: 0, m: 1, mp: -1, big_m: 0 };
        assert!((cg_scalar(&k).unwrap() - 1.0 / 3.0_f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn row_normalization() {
        // sum over (m, m') of <..|L M>^2 = 1 at fixed (L, M)
        for (l, lp, big_l) in [(1, 1, 2), (2, 1, 2), (3, 2, 1)] {
            for big_m in -(big_l as i64)..=(big_l as i64) {
                let mut s = 0.0;
                for m in -(l as i64)..=(l as i64) {
                    for mp in -(lp as i64)..=(lp as i64) {
                        if m + mp == big_m {
                            let k = CgKey { l, lp, big_l, m, mp, big_m };
                            s += cg_scalar(&k).unwrap().powi(2);
                        }
                    }
                }
                assert!((s - 1.0).abs() < 1e-12, "({l},{lp},{big_l},{big_m}): {s}");
            }
        }
    }

    #[test]
    fn triangle_rejected() {
        assert!(matches!(
            cg_tensor_real(1, 1, 3),
            Err(Error::TriangleViolation { .. })
        ));
    }

    #[test]
    fn complex_tensor_trivial_and_antisymmetry() {
        let q = cg_tensor_complex(0, 0, 0).unwrap();
        assert_eq!(q[[0, 0, 0]], 1.0);
        // L=2 rows are unit vectors
        let q2 = cg_tensor_complex(1, 1, 2).unwrap();
        for big_m in 0..5 {
            let s: f64 = q2.index_axis(ndarray::Axis(0), big_m).iter().map(|x| x * x).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        // (1,1,1) is antisymmetric in (m, m')
        let q1 = cg_tensor_complex(1, 1, 1).unwrap();
        for big_m in 0..3 {
            for m in 0..3 {
                for mp in 0..3 {
                    assert!((q1[[big_m, m, mp]] + q1[[big_m, mp, m]]).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn real_tensor_trivial_coupling() {
        let q = cg_tensor_real(0, 0, 0).unwrap();
        assert!((q[[0, 0, 0]] - 1.0).abs() < 1e-14);
        for l in 0..=3 {
            let q = cg_tensor_real(l, 0, l).unwrap();
            for i in 0..2 * l + 1 {
                for m in 0..2 * l + 1 {
                    let t = if i == m { 1.0 } else { 0.0 };
                    assert!((q[[i, m, 0]] - t).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn orthogonality_and_completeness() {
        for l in 0..=3usize {
            for lp in 0..=3usize {
                let (nl, nlp) = (2 * l + 1, 2 * lp + 1);
                let mut acc = Array2::<f64>::zeros((nl * nlp, nl * nlp));
                for big_l in l.abs_diff(lp)..=l + lp {
                    let q = cg_tensor_real(l, lp, big_l).unwrap();
                    let qm = q.view().into_shape_with_order((2 * big_l + 1, nl * nlp)).unwrap();
                    for big_l2 in l.abs_diff(lp)..=l + lp {
                        let q2 = cg_tensor_real(l, lp, big_l2).unwrap();
                        let q2m =
                            q2.view().into_shape_with_order((2 * big_l2 + 1, nl * nlp)).unwrap();
                        let p = qm.dot(&q2m.t());
                        for i in 0..2 * big_l + 1 {
                            for j in 0..2 * big_l2 + 1 {
                                let t = if big_l == big_l2 && i == j { 1.0 } else { 0.0 };
                                assert!(
                                    (p[[i, j]] - t).abs() < 1e-10,
                                    "({l},{lp}) L={big_l},{big_l2}"
                                );
                            }
                        }
                    }
                    acc = acc + qm.t().dot(&qm);
                }
                for i in 0..nl * nlp {
                    for j in 0..nl * nlp {
                        let t = if i == j { 1.0 } else { 0.0 };
                        assert!((acc[[i, j]] - t).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn wigner_decomposition() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let r = crate::rotation::random_rotation(&mut rng);
            for l in 0..=2usize {
                for lp in 0..=2usize {
                    let dl = wigner_d_real(l, &r).unwrap();
                    let dlp = wigner_d_real(lp, &r).unwrap();
                    // kron(dl, dlp)
                    let (nl, nlp) = (2 * l + 1, 2 * lp + 1);
                    let mut kron = Array2::<f64>::zeros((nl * nlp, nl * nlp));
                    for a in 0..nl {
                        for b in 0..nl {
                            for c in 0..nlp {
                                for d in 0..nlp {
                                    kron[[a * nlp + c, b * nlp + d]] = dl[[a, b]] * dlp[[c, d]];
                                }
                            }
                        }
                    }
                    for big_l in l.abs_diff(lp)..=l + lp {
                        let q = cg_tensor_real(l, lp, big_l).unwrap();
                        let qm =
                            q.view().into_shape_with_order((2 * big_l + 1, nl * nlp)).unwrap();
                        let lhs = wigner_d_real(big_l, &r).unwrap().dot(&qm);
                        let rhs = qm.dot(&kron);
                        for (x, y) in lhs.iter().zip(rhs.iter()) {
                            assert!((x - y).abs() < 1e-9);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn six_symmetries() {
        let root = |a: usize, b: usize| ((2 * a + 1) as f64 / (2 * b + 1) as f64).sqrt();
        for l in 0..=3usize {
            for lp in 0..=3usize {
                for big_l in l.abs_diff(lp)..=l + lp {
                    for m in -(l as i64)..=l as i64 {
                        for mp in -(lp as i64)..=lp as i64 {
                            let big_m = m + mp;
                            if big_m.abs() > big_l as i64 {
                                continue;
                            }
                            let q = cg_extended(l as i64, lp as i64, m, mp, big_l as i64, big_m);
                            let s1 = if (l + lp - big_l) % 2 == 0 { 1.0 } else { -1.0 };
                            let s2 = if ((l as i64 - m) % 2).abs() == 0 { 1.0 } else { -1.0 };
                            let s3 = if ((lp as i64 + mp) % 2).abs() == 0 { 1.0 } else { -1.0 };
                            let rels = [
                                s1 * cg_extended(l as i64, lp as i64, -m, -mp, big_l as i64, -big_m),
                                s1 * cg_extended(lp as i64, l as i64, mp, m, big_l as i64, big_m),
                                s2 * root(big_l, lp)
                                    * cg_extended(l as i64, big_l as i64, m, -big_m, lp as i64, -mp),
                                s3 * root(big_l, l)
                                    * cg_extended(big_l as i64, lp as i64, -big_m, mp, l as i64, -m),
                                s2 * root(big_l, lp)
                                    * cg_extended(big_l as i64, l as i64, big_m, -m, lp as i64, mp),
                                s3 * root(big_l, l)
                                    * cg_extended(lp as i64, big_l as i64, -mp, big_m, l as i64, m),
                            ];
                            for (i, rel) in rels.iter().enumerate() {
                                assert!(
                                    (q - rel).abs() < 1e-12,
                                    "symmetry {i} at ({l},{lp},{big_l};{m},{mp})"
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn project_composite_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for (l, lp, big_l) in [(1usize, 1usize, 2usize), (2, 1, 1), (2, 2, 3)] {
            let a = Array2::from_shape_fn((2 * l + 1, 2 * lp + 1), |_| rng.gen_range(-1.0..1.0));
            let out = project_composite(big_l, l, lp, &a).unwrap();
            // naive triple loop over the dense tensor
            let q = cg_tensor_real(l, lp, big_l).unwrap();
            for i in 0..2 * big_l + 1 {
                let mut acc = 0.0;
                for m in 0..2 * l + 1 {
                    for mp in 0..2 * lp + 1 {
                        acc += q[[i, m, mp]] * a[[m, mp]];
                    }
                }
                assert!((out[i] - acc).abs() < 1e-12);
            }
        }
        // zero in, zero out
        let z = Array2::<f64>::zeros((3, 3));
        assert!(project_composite(2, 1, 1, &z).unwrap().iter().all(|x| *x == 0.0));
        // l' = 0 returns the first column
        let a = Array2::from_shape_fn((5, 1), |(i, _)| i as f64);
        let out = project_composite(2, 2, 0, &a).unwrap();
        for i in 0..5 {
            assert!((out[i] - a[[i, 0]]).abs() < 1e-12);
        }
        // shape mismatch
        assert!(project_composite(2, 1, 1, &Array2::zeros((3, 4))).is_err());
    }
}
