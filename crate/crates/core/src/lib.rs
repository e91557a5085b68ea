//! BMW-type algebras for dihedral groups and small finite Coxeter groups.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`coxeter`] and [`lk`] build the dihedral reflection arrangement, the
//!    infinitesimal Lawrence–Krammer representation and the flat KZ-type
//!    connection it defines.
//! 2. [`kz`] integrates parallel transport along the Brieskorn generator loops
//!    to obtain the monodromy operators `T(σ_0)`, `T(σ_1)` and the rank-one
//!    projectors cut out of them.
//! 3. [`phi`] turns the projectors into the sandwich scalars `Φ^i` used by the
//!    algebra presentations.
//! 4. [`dihedral`], [`enumeration`] and [`presentations`] build structure
//!    constants, regular representations and the semisimplicity diagnostics.

pub mod algebra;
pub mod coxeter;
pub mod dihedral;
pub mod enumeration;
pub mod error;
pub mod json;
pub mod kz;
pub mod linalg;
pub mod lk;
pub mod params;
pub mod phi;
pub mod presentations;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use linalg::{CMat, C64};
