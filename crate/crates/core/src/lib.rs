//! Fermi-Walker transport of relativistic EPR spin pairs in the conical
//! spacetime of a straight cosmic string.
//!
//! The pipeline runs bottom-up:
//!
//! * [`geometry`]: metric, rest-frame tetrad, Christoffel symbols and the
//!   connection one-forms (spin connection, Fermi-Walker term, their sum).
//! * [`kinematics`]: circular worldlines around the string axis.
//! * [`transport`]: Lorentz generators, the closed-form and path-ordered
//!   transport operators, and the Wigner angle.
//! * [`epr`]: Bell basis, pair evolution and CHSH evaluation.
//! * [`verify`]: the self-check suite behind `eprfw verify`.
//!
//! [`oracle`] holds the independent numerical cross-checks (finite
//! differences, Taylor matrix exponential, RK4 holonomy) the suite and the
//! tests compare against.
//!
//! Coordinates are ordered `(x0, rho, z, phi)` with `x0 = c t`, and the frame
//! indices `0..4` follow the same directions. The Minkowski metric has
//! signature `(-, +, +, +)`.

// Tensor code indexes several arrays with the same loop variable.
#![allow(clippy::needless_range_loop)]

pub mod epr;
pub mod error;
pub mod geometry;
pub mod kinematics;
pub mod oracle;
pub mod transport;
pub mod verify;

pub use error::{Error, Result};

/// Complex scalar used for every spinor quantity.
pub type C64 = num_complex::Complex64;
