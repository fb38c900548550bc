//! Real spherical harmonics as homogeneous polynomials, and the transition
//! matrix between the real and complex bases.
//!
//! The harmonics are evaluated from the Cartesian expansion
//! `Y_{l,m} = N * Pibar^l_m(x,y,z) * {A_m | B_m}(x,y)` with
//! `A_m = Re (x+iy)^m` and `B_m = Im (x+iy)^m`. Two exponent conventions in
//! circulation for this expansion disagree; the one implemented here
//! (binomial-weighted `x^p y^{m-p}`, and `2^{-l}` inside `Pibar`) is pinned by
//! the steerability identity `Y_l(Rx) = D^l(R) Y_l(x)` and by orthonormality
//! on the unit sphere, both enforced in the test suite. See
//! docs/CONVENTIONS.md.

use crate::error::{Error, Result};
use crate::factorial::{binomial, ln_factorial};
use crate::rotation::Vec3;
use crate::tolerances::MAX_DEGREE;
use ndarray::Array2;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

pub(crate) fn check_degree(l: usize) -> Result<()> {
    if l > MAX_DEGREE {
        return Err(Error::IndexOutOfRange(format!(
            "degree {l} exceeds the supported ceiling {MAX_DEGREE}"
        )));
    }
    Ok(())
}

/// `Pibar^l_m`: the z/r part of the Cartesian harmonic expansion.
fn pibar(l: i64, m: i64, x: Vec3) -> f64 {
    let r2 = x.norm_sq();
    let mut sum = 0.0;
    let kmax = (l - m) / 2;
    for k in 0..=kmax {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign
            * (-(l as f64) * std::f64::consts::LN_2
                + ln_factorial(l - 2 * k)
                - ln_factorial(l - 2 * k - m))
            .exp()
            * binomial(l, k)
            * binomial(2 * l - 2 * k, l)
            * r2.powi(k as i32)
            * x.z.powi((l - 2 * k - m) as i32);
        sum += term;
    }
    (0.5 * (ln_factorial(l - m) - ln_factorial(l + m))).exp() * sum
}

/// `(A_m, B_m) = (Re, Im) of (x + iy)^m`, expanded binomially.
fn sectoral(m: i64, x: f64, y: f64) -> (f64, f64) {
    let mut a = 0.0;
    let mut b = 0.0;
    for p in 0..=m {
        let c = binomial(m, p) * x.powi(p as i32) * y.powi((m - p) as i32);
        let phase = (m - p) as f64 * FRAC_PI_2;
        a += c * phase.cos();
        b += c * phase.sin();
    }
    (a, b)
}

/// Evaluates the 2l+1 real spherical harmonics of degree `l` at `x`, indexed
/// m = -l..l. Homogeneous of degree l in `x`.
pub fn eval_real_spherical_harmonics(l: usize, x: Vec3) -> Vec<f64> {
    let li = l as i64;
    let mut out = vec![0.0; 2 * l + 1];
    out[l] = ((2 * li + 1) as f64 / (4.0 * PI)).sqrt() * pibar(li, 0, x);
    let n = ((2 * li + 1) as f64 / (2.0 * PI)).sqrt();
    for m in 1..=li {
        let (a, b) = sectoral(m, x.x, x.y);
        let p = pibar(li, m, x);
        out[(li + m) as usize] = n * p * a;
        out[(li - m) as usize] = n * p * b;
    }
    out
}

/// The real/complex transition matrix `C^l`: unitary, nonzero only at
/// (m, m) and (m, -m) plus the (0, 0) center (case table in
/// docs/CONVENTIONS.md). Indexed m = -l..l.
pub fn transition_matrix(l: usize) -> Array2<Complex64> {
    let n = 2 * l + 1;
    let mut c = Array2::zeros((n, n));
    let s = 1.0 / 2.0_f64.sqrt();
    c[[l, l]] = Complex64::new(1.0, 0.0);
    for m in 1..=l {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        c[[l - m, l - m]] = Complex64::new(0.0, -s); // (m, m), m < 0
        c[[l + m, l + m]] = Complex64::new(sign * s, 0.0); // (m, m), m > 0
        c[[l - m, l + m]] = Complex64::new(s, 0.0); // (m, -m), m < 0
        c[[l + m, l - m]] = Complex64::new(0.0, sign * s); // (m, -m), m > 0
    }
    c
}
