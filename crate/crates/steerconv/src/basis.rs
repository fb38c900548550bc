//! Radial profiles and assembled steerable kernel bases
//! `kappa^l_{rm}(x) = phi_r(|x|^2) Y_{lm}(x)`.

use crate::error::{Error, Result};
use crate::rotation::Vec3;
use crate::sh::{check_degree, eval_real_spherical_harmonics};

/// Radial component of a steerable kernel.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialProfile {
    /// Radial Zernike polynomial `R^l_n`, evaluated at `|x|^2` and paired
    /// with the homogeneous harmonic. Requires `n >= l` and `2 | (n - l)`.
    Zernike { n: usize },
    /// Gaussian shell centered at radius `rho` with width `sigma`, paired
    /// with the unit-normalized harmonic.
    GaussianShell { rho: f64, sigma: f64 },
}

/// A steerable kernel basis: per degree `l' <= max_degree`, a list of radial
/// profiles sharing one support radius.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelBasisSpec {
    pub support_radius: f64,
    profiles: Vec<Vec<RadialProfile>>,
}

/// Coefficients of the radial Zernike polynomial `R^l_n` as a polynomial in
/// `x = r^2`, lowest power first; length `k + 1` with `k = (n - l) / 2`.
pub fn zernike_radial_coeffs(n: usize, l: usize) -> Result<Vec<f64>> {
    if n < l || (n - l) % 2 != 0 {
        return Err(Error::BadZernikeIndex { n, l });
    }
    let k = (n - l) / 2;
    let (ki, li) = (k as i64, l as i64);
    let pref = (if k % 2 == 0 { 1.0 } else { -1.0 }) / 4.0f64.powi(k as i32)
        * ((2 * li + 4 * ki + 3) as f64 / 3.0).sqrt()
        * crate::factorial::binomial(2 * ki, ki);
    let mut out = Vec::with_capacity(k + 1);
    for v in 0..=ki {
        let sign = if v % 2 == 0 { 1.0 } else { -1.0 };
        let c = sign * crate::factorial::binomial(ki, v)
            * crate::factorial::binomial(2 * (ki + li + v) + 1, 2 * ki)
            / crate::factorial::binomial(ki + li + v, ki);
        out.push(pref * c);
    }
    Ok(out)
}

fn eval_poly(coeffs: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for c in coeffs.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

impl KernelBasisSpec {
    pub fn new(support_radius: f64, profiles: Vec<Vec<RadialProfile>>) -> Result<Self> {
        if support_radius <= 0.0 {
            return Err(Error::IndexOutOfRange("support radius must be positive".into()));
        }
        if profiles.is_empty() || profiles.iter().all(|p| p.is_empty()) {
            return Err(Error::SizeMismatch("kernel basis has no profiles".into()));
        }
        for (l, profs) in profiles.iter().enumerate() {
            check_degree(l)?;
            for p in profs {
                match p {
                    RadialProfile::Zernike { n } => {
                        if *n < l || (*n - l) % 2 != 0 {
                            return Err(Error::BadZernikeIndex { n: *n, l });
                        }
                    }
                    RadialProfile::GaussianShell { rho, sigma } => {
                        if *sigma <= 0.0 || *rho < 0.0 {
                            return Err(Error::IndexOutOfRange(format!(
                                "bad gaussian shell rho={rho} sigma={sigma}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(KernelBasisSpec { support_radius, profiles })
    }

    /// Gaussian-shell basis with `count` shells per degree up to `max_degree`,
    /// shells evenly placed in [0, support_radius] with width one spacing.
    pub fn gaussian_shells(max_degree: usize, count: usize, support_radius: f64) -> Result<Self> {
        let spacing = if count > 1 {
            support_radius / (count - 1) as f64
        } else {
            support_radius
        };
        let profiles = (0..=max_degree)
            .map(|_| {
                (0..count)
                    .map(|r| RadialProfile::GaussianShell {
                        rho: r as f64 * spacing,
                        sigma: spacing.max(1e-6),
                    })
                    .collect()
            })
            .collect();
        Self::new(support_radius, profiles)
    }

    pub fn max_degree(&self) -> usize {
        self.profiles.len() - 1
    }

    pub fn radial_count(&self, l: usize) -> usize {
        self.profiles.get(l).map_or(0, |p| p.len())
    }

    pub fn profile(&self, l: usize, r: usize) -> Result<&RadialProfile> {
        self.profiles
            .get(l)
            .and_then(|p| p.get(r))
            .ok_or_else(|| Error::IndexOutOfRange(format!("no profile at degree {l}, index {r}")))
    }

    /// Evaluates the degree-`l` kernel vector for radial index `r` at `x`:
    /// length 2l+1, zero outside the support radius. Gaussian shells are
    /// evaluated against the unit-normalized harmonic (the `1/t^{l/2}`
    /// normalization), so their value at the origin is zero for l > 0.
    pub fn eval_kernel(&self, l: usize, r: usize, x: Vec3) -> Result<Vec<f64>> {
        let profile = self.profile(l, r)?;
        let dist = x.norm();
        if dist > self.support_radius {
            return Ok(vec![0.0; 2 * l + 1]);
        }
        match profile {
            RadialProfile::Zernike { n } => {
                let coeffs = zernike_radial_coeffs(*n, l)?;
                let radial = eval_poly(&coeffs, x.norm_sq());
                Ok(eval_real_spherical_harmonics(l, x).iter().map(|y| radial * y).collect())
            }
            RadialProfile::GaussianShell { rho, sigma } => {
                if dist < 1e-300 {
                    // no defined direction at the origin
                    let mut out = vec![0.0; 2 * l + 1];
                    if l == 0 {
                        let g = (-(0.0 - rho).powi(2) / (2.0 * sigma * sigma)).exp();
                        out[0] = g / (4.0 * std::f64::consts::PI).sqrt();
                    }
                    return Ok(out);
                }
                let g = (-(dist - rho).powi(2) / (2.0 * sigma * sigma)).exp();
                let unit = x * (1.0 / dist);
                Ok(eval_real_spherical_harmonics(l, unit).iter().map(|y| g * y).collect())
            }
        }
    }
}
