//! Symmetry-preserving difference schemes for second and third order ODEs.
//!
//! The crate bundles the invariant steppers, their standard finite-difference
//! counterparts, a Dormand–Prince reference integrator and an experiment
//! harness that measures discretization errors.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod error;
pub mod experiments;
pub mod grid;
pub mod invariants;
pub mod problems;
pub mod reference;
pub mod roots;
pub mod schemes;
pub mod standard;

pub use error::{Error, Result};
pub use grid::{GridPoint, NodeFlag, Stencil, Stencil3, Stencil4, Stop, Trajectory};
pub use problems::{Ex3Variant, Forcing, Model, OdeProblem};
pub use roots::RootConfig;
