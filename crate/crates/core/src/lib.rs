//! Acceleration-dependent radiative shifts and dispersion interactions of
//! atoms in the electromagnetic vacuum.
//!
//! The crate evaluates, in Gaussian/CGS units throughout:
//!
//! * the Unruh temperature of a proper acceleration ([`constants`]);
//! * the vacuum-fluctuation and radiation-reaction contributions to the level
//!   shift of a uniformly accelerated atom in free space, split into inertial,
//!   thermal and non-thermal pieces ([`lamb`]);
//! * the atom-wall shift integrals for an arbitrary boundary kernel ([`wall`]);
//! * the van der Waals/Casimir-Polder energy of two co-accelerating atoms,
//!   including the two time-dependent acceleration corrections ([`pair`]).
//!
//! All of it rests on an adaptive Gauss-Kronrod engine ([`quad`]) that handles
//! exponentially damped semi-infinite integrals and Cauchy principal values.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, configuration
//! and the command line live in the `accel-qed` companion crate.
//!
//! ```
//! use accel_qed_core::constants::{unruh_acceleration, unruh_temperature};
//!
//! let a = unruh_acceleration(1.0).unwrap();
//! assert!(a.cm_per_s2() > 2.4e22 && a.cm_per_s2() < 2.5e22);
//! assert!((unruh_temperature(a) - 1.0).abs() < 1e-12);
//! ```

#![no_std]
#![deny(missing_debug_implementations)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod atom;
pub mod constants;
mod error;
pub mod lamb;
pub mod pair;
pub mod quad;
pub mod wall;

pub use error::{Error, Result};
