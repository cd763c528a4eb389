//! Spectral theory and dispersive dynamics of periodic Jacobi operators on
//! the half-line `ℓ²(ℕ)`.
//!
//! Start from a [`JacobiOperator`], build a [`SpectralModel`] (monodromy,
//! bands, eigenvalues and spectral measure), then evolve states with
//! [`propagator`] and measure decay rates with [`decay`].

// `!(x > 0.0)` and friends are used on purpose: they also reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod chebyshev;
pub mod cli;
pub mod decay;
pub mod error;
pub mod measure;
mod model;
pub mod operator;
pub mod polynomials;
pub mod propagator;
pub mod quadrature;
pub mod spectrum;
pub mod transfer;
pub mod validate;

pub use error::{Error, Result};
pub use measure::SpectralMeasure;
pub use model::SpectralModel;
pub use operator::{FiniteState, JacobiOperator, OperatorConfig};
pub use spectrum::{BandStructure, EigenvalueInfo, PhaseFunction};
pub use transfer::MonodromyData;
