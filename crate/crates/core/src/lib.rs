//! Automorphisms of the finite-dimensional effect interval `[0, I]`.
//!
//! The crate synthesizes the canonical automorphisms (unitary or antiunitary
//! conjugations, optionally composed with `A ↦ I − A` or a global sign),
//! recovers the underlying operator from a black-box map, and exposes the
//! probes used along the way so they can be run as property suites.
//!
//! ```
//! use effsym::linalg::haar_unitary;
//! use effsym::recover::{recover_affine, RecoveryOptions};
//! use effsym::symmetry::{Kind, Sign, SymmetryDescriptor};
//!
//! let u = haar_unitary(3, 7).unwrap();
//! let target = SymmetryDescriptor::new(Kind::Antiunitary, u, true, Sign::Plus).unwrap();
//! let report = recover_affine(&target, &RecoveryOptions::default()).unwrap();
//! let found = report.descriptor.unwrap();
//! assert!(found.complement());
//! assert!(found.u().distance(target.u()) < 1e-7);
//! ```

// `!(x <= tol)` is used on purpose: a NaN deviation must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod batch;
pub mod effects;
pub mod error;
pub mod extension;
pub mod linalg;
pub mod oracle;
pub mod recover;
pub mod suites;
pub mod symmetry;

pub use error::{Error, Result};

/// Default validation tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
