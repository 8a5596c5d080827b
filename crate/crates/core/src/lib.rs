//! Numerical construction and classification of complete sets of mutually
//! unbiased bases (MUBs).
//!
//! A complete set of `d + 1` MUBs in `C^d` is encoded by its `N × N` Gram
//! matrix (`N = d(d+1)`), which is fixed up to `d³(d+1)/2` relative phases.
//! The crate searches phase space for Gram matrices that are rank-`d`
//! projectors, and classifies the solutions through their triple-product
//! tensors, automorphism groups and local rigidity.
//!
//! Module map:
//!
//! - [`dim`], [`phases`], [`gram`]: data model and direct MUB checks.
//! - [`traces`]: `Tr G³`, `Tr G⁴`, the constraint function and gradients.
//! - [`optimize`]: multi-start conjugate-gradient / BFGS search and polish.
//! - [`wh`]: Weyl–Heisenberg constructions used as analytic references.
//! - [`invariants`]: triple products and generating sets.
//! - [`perm`], [`symmetry`]: permutation groups, automorphisms, isomorphism.
//! - [`landscape`]: restricted defect and Hessian rigidity tests.
//! - [`record`]: JSON/CSV persistence.
//!
//! The data-model and trace layers are generic over [`Real`] (`f32`, `f64`);
//! the aliases below fix them to `f64`, which every other layer uses.

pub mod dim;
pub mod error;
pub mod gram;
pub mod invariants;
pub mod landscape;
pub mod optimize;
pub mod perm;
pub mod phases;
pub mod record;
pub mod scalar;
pub mod symmetry;
pub mod traces;
pub mod wh;

pub use dim::{Dimension, PhaseLayout};
pub use error::*;
pub use gram::{build_gram, gram_from_bases, verify_gram_projection, verify_mub_definition, GramMatrix, MubSet};
pub use phases::PhaseVector;
pub use scalar::Real;
pub use traces::{objective, ConstraintValue};

/// Complex scalar used throughout the `f64` layers.
pub type C64 = nalgebra::Complex<f64>;

pub type Phases64 = PhaseVector<f64>;
pub type Phases32 = PhaseVector<f32>;
pub type Gram64 = GramMatrix<f64>;
pub type Gram32 = GramMatrix<f32>;
pub type Mubs64 = MubSet<f64>;
pub type Mubs32 = MubSet<f32>;
pub type Constraint64 = ConstraintValue<f64>;
