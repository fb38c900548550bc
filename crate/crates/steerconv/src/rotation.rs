//! Rotations, ZYZ Euler angles, and the conversions between them.

use crate::error::{Error, Result};
use crate::tolerances::{TAU_GIMBAL, TAU_ORTH};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

/// A point or direction in R^3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        self * -1.0
    }
}

/// ZYZ Euler angles in radians: alpha in [0, 2pi), beta in [0, pi],
/// gamma in [0, 2pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerZYZ {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl EulerZYZ {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        if !(0.0..2.0 * PI).contains(&alpha)
            || !(0.0..=PI).contains(&beta)
            || !(0.0..2.0 * PI).contains(&gamma)
        {
            return Err(Error::IndexOutOfRange(format!(
                "Euler angles out of range: ({alpha}, {beta}, {gamma})"
            )));
        }
        Ok(EulerZYZ { alpha, beta, gamma })
    }
}

/// A proper orthogonal 3x3 matrix. Construction validates `R^T R = I` and
/// `det R = +1` up to a tolerance, so a held value is always a rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation {
    m: [[f64; 3]; 3],
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
    };

    /// Validates and wraps a matrix; rows of `m` are matrix rows.
    pub fn from_matrix(m: [[f64; 3]; 3]) -> Result<Self> {
        Self::from_matrix_with_tol(m, TAU_ORTH)
    }

    pub fn from_matrix_with_tol(m: [[f64; 3]; 3], tol: f64) -> Result<Self> {
        let mut defect: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let mut dot = 0.0;
                for k in 0..3 {
                    dot += m[k][i] * m[k][j];
                }
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((dot - target).abs());
            }
        }
        if defect > tol {
            return Err(Error::NotARotation(format!("orthogonality defect {defect:e}")));
        }
        let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        if (det - 1.0).abs() > tol {
            return Err(Error::NotARotation(format!("det = {det}")));
        }
        Ok(Rotation { m })
    }

    /// R_Z(alpha) R_Y(beta) R_Z(gamma).
    pub fn from_euler(e: EulerZYZ) -> Self {
        let (ca, sa) = (e.alpha.cos(), e.alpha.sin());
        let (cb, sb) = (e.beta.cos(), e.beta.sin());
        let (cg, sg) = (e.gamma.cos(), e.gamma.sin());
        Rotation {
            m: [
                [ca * cb * cg - sa * sg, -ca * cb * sg - sa * cg, ca * sb],
                [sa * cb * cg + ca * sg, -sa * cb * sg + ca * cg, sa * sb],
                [-sb * cg, sb * sg, cb],
            ],
        }
    }

    /// Rotation by `angle` about `axis` (need not be unit length).
    pub fn from_axis_angle(axis: Vec3, angle: f64) -> Self {
        let n = axis.norm();
        let (x, y, z) = (axis.x / n, axis.y / n, axis.z / n);
        let (c, s) = (angle.cos(), angle.sin());
        let t = 1.0 - c;
        Rotation {
            m: [
                [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
                [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
                [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
            ],
        }
    }

    /// Extracts ZYZ Euler angles. In the gimbal-locked regime
    /// (|sin beta| < `TAU_GIMBAL`) the representative with gamma = 0 is
    /// returned. |sin beta| is estimated from the third-column entries, which
    /// stay well conditioned where beta approaches 0 or pi.
    pub fn to_euler(&self) -> EulerZYZ {
        let m = &self.m;
        let sb = m[0][2].hypot(m[1][2]);
        let (alpha, beta, gamma);
        if sb < TAU_GIMBAL {
            gamma = 0.0;
            if m[2][2] > 0.0 {
                beta = 0.0;
                alpha = m[1][0].atan2(m[0][0]);
            } else {
                beta = PI;
                alpha = (-m[1][0]).atan2(-m[0][0]);
            }
        } else {
            beta = sb.atan2(m[2][2]);
            alpha = m[1][2].atan2(m[0][2]);
            gamma = m[2][1].atan2(-m[2][0]);
        }
        let wrap = |t: f64| if t < 0.0 { t + 2.0 * PI } else { t };
        EulerZYZ { alpha: wrap(alpha), beta, gamma: wrap(gamma) }
    }

    pub fn compose(&self, other: &Rotation) -> Rotation {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    m[i][j] += self.m[i][k] * other.m[k][j];
                }
            }
        }
        Rotation { m }
    }

    pub fn inverse(&self) -> Rotation {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.m[j][i];
            }
        }
        Rotation { m }
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        Vec3::new(
            self.m[0][0] * v.x + self.m[0][1] * v.y + self.m[0][2] * v.z,
            self.m[1][0] * v.x + self.m[1][1] * v.y + self.m[1][2] * v.z,
            self.m[2][0] * v.x + self.m[2][1] * v.y + self.m[2][2] * v.z,
        )
    }

    /// Geodesic distance: the rotation angle of `self^T other`, in [0, pi].
    pub fn angle_to(&self, other: &Rotation) -> f64 {
        let p = self.inverse().compose(other);
        let tr = p.m[0][0] + p.m[1][1] + p.m[2][2];
        ((tr - 1.0) / 2.0).clamp(-1.0, 1.0).acos()
    }

    pub fn matrix(&self) -> &[[f64; 3]; 3] {
        &self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[i][j]
    }

    pub fn max_abs_diff(&self, other: &Rotation) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                d = d.max((self.m[i][j] - other.m[i][j]).abs());
            }
        }
        d
    }
}

/// Uniform random rotation from a seeded source, via a random unit
/// quaternion. Orthogonal to machine precision by construction.
pub fn random_rotation<R: rand::Rng>(rng: &mut R) -> Rotation {
    loop {
        let q: [f64; 4] = [
            normal_sample(rng),
            normal_sample(rng),
            normal_sample(rng),
            normal_sample(rng),
        ];
        let n = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
        if n < 1e-3 {
            continue;
        }
        let (w, x, y, z) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
        let m = [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ];
        return Rotation { m };
    }
}

fn normal_sample<R: rand::Rng>(rng: &mut R) -> f64 {
    // Box-Muller on uniform draws; avoids a rand_distr dependency.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}
