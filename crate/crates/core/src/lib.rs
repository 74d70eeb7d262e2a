//! Finite difference schemes that preserve the point symmetries of two
//! evolution equations, together with standard baselines and a harness that
//! measures their errors and audits their invariance.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! harness works in `f64`.

// negated comparisons deliberately treat NaN as failing the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod grid;
pub mod group_action;
pub mod harness;
pub mod scalar;
pub mod schemes;
pub mod solutions;
pub mod taylor_fd;

pub use error::{Error, Result};
pub use grid::{MeshHistory, MultiIndex, Node, Stencil, TimeLevel};
pub use scalar::Scalar;
pub use schemes::{BoundaryPolicy, Model, SchemeKind};
pub use solutions::Exact;

pub type Node64 = grid::Node<f64>;
pub type TimeLevel64 = grid::TimeLevel<f64>;
pub type Stencil64 = grid::Stencil<f64>;
pub type MeshHistory64 = grid::MeshHistory<f64>;
pub type Exact64 = solutions::Exact<f64>;
pub type Node32 = grid::Node<f32>;
pub type TimeLevel32 = grid::TimeLevel<f32>;
pub type Stencil32 = grid::Stencil<f32>;
