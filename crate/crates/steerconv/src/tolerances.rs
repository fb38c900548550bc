//! Default numerical tolerances. Operations that validate invariants take an
//! explicit tolerance; these constants are the defaults used throughout.

/// Orthogonality defect allowed when validating a rotation matrix or a
/// Wigner block (`R^T R = I`, `det R = 1`).
pub const TAU_ORTH: f64 = 1e-9;

/// Largest imaginary residue tolerated when a complex intermediate is
/// projected to a real matrix (real Wigner blocks, real Clebsch-Gordan
/// tensors).
pub const TAU_IMAG: f64 = 1e-9;

/// Representation-property defect `D(RR') = D(R)D(R')`.
pub const TAU_REP: f64 = 1e-9;

/// Entrywise defect allowed in the Euler-angle round trip.
pub const TAU_EULER: f64 = 1e-10;

/// Below this value of |sin beta| the ZYZ extraction is gimbal locked and the
/// canonical representative with gamma = 0 is returned.
pub const TAU_GIMBAL: f64 = 1e-9;

/// Largest degree supported by the factorial tables. Double precision
/// log-factorials stay accurate comfortably past the arguments reached at
/// this ceiling (l + l' + L + 1 <= 65).
pub const MAX_DEGREE: usize = 16;
