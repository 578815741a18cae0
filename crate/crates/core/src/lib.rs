//! Bi-time optimal control for quasi-linear plane PDE systems.
//!
//! The crate splits a system `Σ_i A_i grad xⁱ = B` with canonical controls,
//! evaluates complete-integrability and maximum-principle residuals on a masked
//! disc grid, and carries the closed-form solution of the perfect-plastic plane
//! medium as a verification target.

pub mod cli;
pub mod config;
pub mod convergence;
pub mod error;
pub mod expr;
pub mod field;
pub mod grid;
pub mod integrability;
pub mod maximum_principle;
pub mod pde;
pub mod plastic;
pub mod suite;
pub mod system_config;

pub use error::{Error, Result};
pub use field::{AngleField, ScalarField, StateField};
pub use grid::{build_disc_grid, Axis, DiscGrid, ExclusionZone};
pub use pde::{QuasiLinearSystem, SplitSystem};
