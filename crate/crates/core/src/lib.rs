//! Exact arithmetic on the algebraic Mukai lattice of a K3 surface.
//!
//! Everything here is `no_std` + `alloc` and works over arbitrary-precision
//! integers and rationals; no decision is ever taken on a floating-point
//! value.
//!
//! - [`lattice`]: Néron–Severi lattices and classes.
//! - [`mukai`]: Mukai vectors, the Mukai pairing and the fine-moduli test.
//! - [`isometry`]: spherical and line-bundle twists, coprime reduction,
//!   normalization of λ·exp(B+iω).
//! - [`stability`]: central charges, the tilted torsion pair and heart.
//! - [`construct`]: the Diophantine data behind stable extensions.
//! - [`partners`]: Picard-rank-one partner candidates.
#![no_std]

extern crate alloc;

pub mod construct;
pub mod isometry;
pub mod lattice;
pub mod mukai;
pub mod partners;
pub mod stability;

pub type Int = num_bigint::BigInt;
pub type Rat = num_rational::BigRational;

pub use isometry::{ComplexMukai, ExponentialForm, MukaiIsometry, RatMukai, Reduction};
pub use lattice::{IntersectionLattice, LatticeError, NsClass, RatClass};
pub use mukai::{ChernData, CrucformReport, MukaiVector};
