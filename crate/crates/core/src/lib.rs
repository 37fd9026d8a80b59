//! Exact N-soliton solutions of the focusing vector nonlinear Schrödinger
//! equation `i R_t + R_xx + 2 R R^† R = 0` built by dressing transformations,
//! on the line and on the half-line with integrable boundary conditions,
//! together with the Yang-Baxter and reflection maps that describe soliton
//! collisions and soliton-boundary interactions.
//!
//! Module map:
//!
//! - [`data`]: spectral points, norming vectors, polarizations, boundary specs.
//! - [`dressing`]: reduced and full dressing chains, field reconstruction.
//! - [`asymptotics`]: in/out norming vectors, intermediate polarizations,
//!   pairwise-collision relations.
//! - [`maps`]: Yang-Baxter map, reflection maps, transfer maps and the
//!   residual checkers for their defining equations.
//! - [`mirror`]: half-line data via the mirror-image construction.
//! - [`verification`]: finite-difference certification on sampled grids.
//! - [`sampling`]: seeded, pole-safe random generation of test data.

// `!(x > 0.0)` guards are written that way so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod data;
pub mod dressing;
pub mod error;
pub mod linalg;
pub mod maps;
pub mod mirror;
pub mod sampling;
pub mod verification;

pub use data::{
    polarization_of, projective_distance, BoundarySpec, NormingVector, Polarization, SolitonData, SpectralPoint,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
