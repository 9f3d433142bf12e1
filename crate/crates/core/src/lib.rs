//! Numerical periods of normalized second-kind differentials on the two
//! families of hyperelliptic quotient curves `C_+`, `C_-`, the invariants
//! built from them, and a Newton search for moduli points whose period
//! vectors are rational — candidate spectral data for conformal harmonic
//! tori in the 3-sphere.
//!
//! The pipeline is: a validated moduli point ([`geometry::ModuliPoint`])
//! yields the pair of quotient curves and the spectral model upstairs;
//! [`homology`] lays down concrete contours for the canonical cycles;
//! [`analytic`] integrates along their lifts with branch tracking;
//! [`periods`] normalizes the differentials and assembles period vectors
//! and invariants; [`variation`] differentiates period data over moduli
//! and fits asymptotics; [`search`] projects to rational targets, runs
//! Newton continuation and verifies candidates.

pub mod analytic;
pub mod error;
pub mod geometry;
pub mod homology;
pub mod periods;
pub mod sampling;
pub mod search;
pub mod tol;
pub mod variation;

pub use error::Error;

/// Crate-wide complex scalar.
pub type C64 = num_complex::Complex64;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
