//! Exact-arithmetic kernel for the monster Lie algebra at finite truncation.
//!
//! The crate is organised bottom-up:
//!
//! * [`jfun`] computes the coefficients `c(n)` of `J(q) = j(q) - 744`.
//! * [`index`] holds the index sets, roots, the integer grading and the
//!   support caps used to materialise finite bases.
//! * [`freelie`] implements free Lie algebras in the Lyndon basis.
//! * [`monster`] realises the algebra itself (bracket, mirror involution,
//!   defining-relation checks).
//! * [`completion`] works in the positive completion modulo high degree:
//!   pro-summable exponentials, the pro-unipotent group and its filtration.
//! * [`presentation`] holds the group presentation and its validators.
//! * [`permaut`] covers index-permutation automorphisms and the related
//!   numerology.

pub mod completion;
pub mod error;
pub mod freelie;
pub mod index;
pub mod jfun;
pub mod monster;
pub mod permaut;
pub mod presentation;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Q;
