//! Lowest-order virtual elements for the three-field quad-div problem on
//! polyhedral meshes.
//!
//! The crate is organised bottom-up: [`mesh`] and [`calculus`] provide
//! geometry and exact integration, [`element`] caches per-cell moments,
//! [`scalar`], [`edge`] and [`graddiv`] hold the local virtual element spaces,
//! [`complex`] the discrete de Rham maps, and [`assembly`] the global saddle
//! system with its solver and error norms.

pub mod assembly;
pub mod calculus;
pub mod complex;
pub mod error;
pub mod edge;
pub mod element;
pub mod graddiv;
pub mod manufactured;
pub mod mesh;
pub mod scalar;
pub mod sparse;

pub use error::{Error, Result};
