//! Wigner d, complex D, and real D matrices.
//!
//! The real block is obtained by conjugating the complex block with the
//! transition matrix, `D^l(R) = (C^l)^T Dhat^l(R) conj(C^l)`. The adjoint
//! placement is pinned by the steerability identity against the real
//! harmonics of this crate (docs/CONVENTIONS.md); the result is real up to a
//! residue that is checked against a tolerance before the imaginary part is
//! dropped.

use crate::error::{Error, Result};
use crate::factorial::ln_factorial;
use crate::rotation::{EulerZYZ, Rotation};
use crate::sh::{check_degree, transition_matrix};
use crate::tolerances::TAU_IMAG;
use ndarray::Array2;
use num_complex::Complex64;

/// The Wigner small-d matrix `d^l_{m'm}(beta)`, rows m' = -l..l, columns
/// m = -l..l, from the factorial sum; the sum index runs over exactly the
/// values keeping all factorial arguments nonnegative.
pub fn wigner_small_d(l: usize, beta: f64) -> Array2<f64> {
    let li = l as i64;
    let n = 2 * l + 1;
    let (cb, sb) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let mut d = Array2::zeros((n, n));
    for mp in -li..=li {
        for m in -li..=li {
            let pref = (0.5
                * (ln_factorial(li + mp)
                    + ln_factorial(li - mp)
                    + ln_factorial(li + m)
                    + ln_factorial(li - m)))
            .exp();
            let smin = 0.max(m - mp);
            let smax = (li + m).min(li - mp);
            let mut total = 0.0;
            for s in smin..=smax {
                let sign = if (mp - m + s) % 2 == 0 { 1.0 } else { -1.0 };
                let ln_den = ln_factorial(li + m - s)
                    + ln_factorial(s)
                    + ln_factorial(mp - m + s)
                    + ln_factorial(li - mp - s);
                total += sign
                    * (-ln_den).exp()
                    * cb.powi((2 * li + m - mp - 2 * s) as i32)
                    * sb.powi((mp - m + 2 * s) as i32);
            }
            d[[(li + mp) as usize, (li + m) as usize]] = pref * total;
        }
    }
    d
}

/// The complex Wigner matrix `Dhat^l_{m'm} = e^{-i m' alpha} d^l_{m'm}(beta)
/// e^{-i m gamma}`.
pub fn wigner_d_complex(l: usize, e: EulerZYZ) -> Array2<Complex64> {
    let li = l as i64;
    let n = 2 * l + 1;
    let d = wigner_small_d(l, e.beta);
    let mut out = Array2::zeros((n, n));
    for mp in -li..=li {
        for m in -li..=li {
            let phase = Complex64::from_polar(1.0, -(mp as f64) * e.alpha)
                * Complex64::from_polar(1.0, -(m as f64) * e.gamma);
            out[[(li + mp) as usize, (li + m) as usize]] =
                phase * d[[(li + mp) as usize, (li + m) as usize]];
        }
    }
    out
}

/// The real Wigner block `D^l(R)`, orthogonal, with `D^l(I) = I` and the
/// representation property `D^l(R R') = D^l(R) D^l(R')`.
pub fn wigner_d_real(l: usize, r: &Rotation) -> Result<Array2<f64>> {
    wigner_d_real_with_tol(l, r, TAU_IMAG)
}

pub fn wigner_d_real_with_tol(l: usize, r: &Rotation, tau_imag: f64) -> Result<Array2<f64>> {
    check_degree(l)?;
    let dh = wigner_d_complex(l, r.to_euler());
    let c = transition_matrix(l);
    let n = 2 * l + 1;
    // (C^T Dhat conj(C))
    let mut left: Array2<Complex64> = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += c[[k, i]] * dh[[k, j]];
            }
            left[[i, j]] = acc;
        }
    }
    let mut out = Array2::zeros((n, n));
    let mut residue: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += left[[i, k]] * c[[k, j]].conj();
            }
            residue = residue.max(acc.im.abs());
            out[[i, j]] = acc.re;
        }
    }
    if residue > tau_imag {
        return Err(Error::ImaginaryResidue { residue, tolerance: tau_imag });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotation::{random_rotation, Vec3};
    use ndarray::Array2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn max_abs(a: &Array2<f64>) -> f64 {
        a.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
    }

    #[test]
    fn small_d_identity_at_zero() {
        for l in 0..=5 {
            let d = wigner_small_d(l, 0.0);
            let eye = Array2::<f64>::eye(2 * l + 1);
            assert!(max_abs(&(&d - &eye)) < 1e-14);
        }
    }

    #[test]
    fn small_d_center_is_cos() {
        for beta in [0.2, 0.7, 1.9, 3.0] {
            let d = wigner_small_d(1, beta);
            assert!((d[[1, 1]] - beta.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn small_d_orthogonal() {
        let d = wigner_small_d(2, 0.7);
        let g = d.t().dot(&d);
        assert!(max_abs(&(&g - &Array2::<f64>::eye(5))) < 1e-12);
    }

    #[test]
    fn complex_d_identity_and_unitarity() {
        let e0 = EulerZYZ { alpha: 0.0, beta: 0.0, gamma: 0.0 };
        for l in 0..=4 {
            let d = wigner_d_complex(l, e0);
            for i in 0..2 * l + 1 {
                for j in 0..2 * l + 1 {
                    let t = if i == j { 1.0 } else { 0.0 };
                    assert!((d[[i, j]] - t).norm() < 1e-14);
                }
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let r = random_rotation(&mut rng);
            for l in 0..=4 {
                let d = wigner_d_complex(l, r.to_euler());
                let n = 2 * l + 1;
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..n {
                            acc += d[[k, i]].conj() * d[[k, j]];
                        }
                        let t = if i == j { 1.0 } else { 0.0 };
                        assert!((acc - t).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn complex_d_z_rotation_diagonal() {
        let a = 0.9;
        let d = wigner_d_complex(1, EulerZYZ { alpha: a, beta: 0.0, gamma: 0.0 });
        // rows/cols indexed m = -1, 0, 1: diagonal e^{-i m alpha}
        assert!((d[[0, 0]] - Complex64::from_polar(1.0, a)).norm() < 1e-14);
        assert!((d[[1, 1]] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((d[[2, 2]] - Complex64::from_polar(1.0, -a)).norm() < 1e-14);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(d[[i, j]].norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn real_d_trivial_and_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let r = random_rotation(&mut rng);
        let d0 = wigner_d_real(0, &r).unwrap();
        assert!((d0[[0, 0]] - 1.0).abs() < 1e-14);
        for l in 0..=4 {
            let d = wigner_d_real(l, &Rotation::IDENTITY).unwrap();
            assert!(max_abs(&(&d - &Array2::<f64>::eye(2 * l + 1))) < 1e-12);
        }
    }

    #[test]
    fn real_d_degree_one_conjugate_to_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let r = random_rotation(&mut rng);
            let d = wigner_d_real(1, &r).unwrap();
            let tr_d = d[[0, 0]] + d[[1, 1]] + d[[2, 2]];
            let tr_r = r.entry(0, 0) + r.entry(1, 1) + r.entry(2, 2);
            assert!((tr_d - tr_r).abs() < 1e-10);
        }
    }

    #[test]
    fn representation_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..10 {
            let r1 = random_rotation(&mut rng);
            let r2 = random_rotation(&mut rng);
            for l in 0..=4 {
                let lhs = wigner_d_real(l, &r1.compose(&r2)).unwrap();
                let rhs = wigner_d_real(l, &r1).unwrap().dot(&wigner_d_real(l, &r2).unwrap());
                assert!(max_abs(&(&lhs - &rhs)) < 1e-10);
            }
        }
    }

    #[test]
    fn steerability_up_to_degree_four() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let r = random_rotation(&mut rng);
            let v = Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            for l in 0..=4 {
                let y = crate::sh::eval_real_spherical_harmonics(l, v);
                let yr = crate::sh::eval_real_spherical_harmonics(l, r.apply(v));
                let d = wigner_d_real(l, &r).unwrap();
                for i in 0..2 * l + 1 {
                    let s: f64 = (0..2 * l + 1).map(|j| d[[i, j]] * y[j]).sum();
                    assert!((yr[i] - s).abs() < 1e-10);
                }
            }
        }
    }
}
