//! Steerable (TFN) convolution and SE(3) group convolution on point clouds,
//! formulated in the Wigner basis, together with the weight-translation
//! isomorphism between the two layer forms and harmonic-domain
//! nonlinearities.
//!
//! The crate is organized around the pipeline:
//! harmonics ([`sh`], [`wigner`]) -> coupling ([`cg`]) -> kernels ([`basis`])
//! and rotation sampling ([`sampling`]) -> fields and layers ([`field`],
//! [`conv`], [`weights`]) -> harmonic nonlinearities ([`activation`]).
//! Numerical conventions (phase choices, normalizations) are pinned in
//! docs/CONVENTIONS.md and enforced by the test suites.

pub mod activation;
pub mod basis;
pub mod cg;
pub mod conv;
mod error;
mod factorial;
pub mod field;
pub mod format;
pub mod rotation;
pub mod sampling;
pub mod sh;
pub mod tolerances;
pub mod weights;
pub mod wigner;

pub use error::{Error, Result};
pub use rotation::{EulerZYZ, Rotation, Vec3};
