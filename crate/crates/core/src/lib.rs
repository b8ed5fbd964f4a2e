//! Multidimensional numerical ranges of complex square matrices.
//!
//! For a d×d complex matrix `T` and an orthonormal system `e = (e_1, …, e_n)`
//! in C^d, the point `τ(T, e) = (⟨Te_1,e_1⟩, …, ⟨Te_n,e_n⟩)` lies in the
//! n-dimensional numerical range `W_n(T) ⊆ C^n`. This crate evaluates τ,
//! samples `W_n(T)`, computes support functions by gradient ascent on the
//! complex Stiefel manifold, detects corner points of sampled ranges and
//! checks that every certified corner is realised by an eigen-frame.
//!
//! Module map:
//!
//! * [`numerics`]: dense complex kernels (Hermitian Jacobi eigensolver,
//!   Gram–Schmidt, smallest singular value).
//! * [`frames`]: orthonormal frames, Haar sampling and the two perturbation
//!   paths used to probe first-order corner conditions.
//! * [`range`]: τ, point clouds, support functions, compressions and
//!   coordinate projections.
//! * [`corners`]: cone tests, corner scans, path-derivative probes and
//!   corner certificates.
//! * [`verify`]: executable eigenvalue checks for certified corners and the
//!   property suite for the elementary range properties.

pub mod config;
pub mod corners;
pub mod error;
pub mod frames;
pub mod numerics;
pub mod range;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
