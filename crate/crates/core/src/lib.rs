//! Exact-arithmetic workbench for distinct-product problems on finite
//! abelian groups.
//!
//! The library provides:
//!
//! * finite abelian groups presented as direct products of cyclic factors,
//!   with Sylow decompositions and the k-large order condition,
//! * exact coefficient rings: cyclotomic integers reduced modulo the
//!   cyclotomic polynomial, and finite fields carrying an element of a
//!   prescribed multiplicative order,
//! * characters, character matrices, and division-free determinants and
//!   permanents over either backend,
//! * the exterior algebra of the group algebra with skew derivations,
//!   whose compositions collapse wedge products to determinants,
//! * verifiers that confirm distinct-product statements two independent
//!   ways on every instance: brute-force witness search and a character
//!   certificate replay.
//!
//! All verification arithmetic is exact; floating point appears only in
//! test oracles.

pub mod caps;
pub mod chars;
pub mod error;
pub mod exterior;
pub mod group;
pub mod perm;
pub mod rings;
pub mod suites;
pub mod verify;

pub use caps::Caps;
pub use error::{Error, Result};
