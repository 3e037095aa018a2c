//! Gabor analysis on the flat torus `T_N` through theta functions on the
//! complex torus `C^d / Λ`.
//!
//! The crate is organized bottom-up:
//!
//! - [`lattice`]: parameters `(d, N, Ω)` and coordinates.
//! - [`transforms`]: DGT, periodization, Zak transform and STFT.
//! - [`theta`]: order-`N` theta functions with certified truncation.
//! - [`bargmann`]: sections of `L^{⊗N}`, Gram matrices, Bergman density.
//! - [`frames`]: frame bounds and the algebraic frame predicates.
//! - [`localization`]: restriction operators and their spectra.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bargmann;
pub mod error;
pub mod frames;
pub mod index;
pub mod io;
pub mod lattice;
pub mod localization;
pub mod quadrature;
pub mod scaled;
pub mod series;
pub mod theta;
pub mod transforms;

pub use error::{Error, Result};
pub use index::IndexSpace;
pub use lattice::{
    dual_lattice_member, from_complex, to_complex, ComplexPoint, GaborParams, Membership, TFPoint, C64,
    DEFAULT_LATTICE_TOL,
};
pub use scaled::ScaledComplex;
pub use transforms::{
    dgt, dgt_direct, dgt_inverse, periodize_sample, stft, stft_basis, zak, DGTCoefficients, Signal, WindowSpec,
};
