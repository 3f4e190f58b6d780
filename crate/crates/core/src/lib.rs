//! Whitney covers, reflection maps and Sobolev-type extension operators on
//! finite weighted graphs, with a discrete Dirichlet-form engine used to check
//! Poincaré, cutoff Sobolev, extension and heat kernel estimates numerically.
//!
//! The pipeline mirrors the continuum construction:
//!
//! | stage | module |
//! |-------|--------|
//! | metric measure space | [`mmspace`] |
//! | domain `U`, `∂U`, `V`, `δ_U`, uniform curves | [`domains`] |
//! | ε-Whitney covers of `U` and `V` | [`whitney`] |
//! | reflection map `Q` | [`reflection`] |
//! | energy, heat kernel, capacities, partition of unity | [`dirichlet`] |
//! | extension operator `E_Q` | [`extension`] |
//! | heat kernel profiles on ambient and reflected spaces | [`hke`] |
//! | config-driven runs and reports | [`cli`] |
//!
//! ```
//! use mmd_extension::mmspace::{CatalogSpec, Space};
//!
//! let path = Space::from_catalog(&CatalogSpec::path(4)).unwrap();
//! assert_eq!(path.len(), 5);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dirichlet;
pub mod domains;
pub mod error;
pub mod extension;
pub mod family;
pub mod hke;
pub mod io;
pub mod linalg;
pub mod mmspace;
pub mod reflection;
pub mod report;
pub mod whitney;

pub use error::{Error, Result};
