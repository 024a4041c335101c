//! Constrained convex generator (CCG) sets.
//!
//! A CCG is the image `{G ξ + c : A ξ = b, ξ ∈ C}` of a generator domain `C`
//! described by [`ConstraintBlock`]s. The crate provides the set
//! representation, the affine map / Minkowski sum / generalized intersection
//! operations, the exact closed-form convex hull of two sets, and the pure
//! algebra of a set-valued estimator for uncertain linear parameter-varying
//! models. Everything here is `no_std` (with `alloc`); solver-backed queries
//! live in the companion `ccg` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod block;
pub mod error;
pub mod hull;
pub mod ops;
pub mod set;
pub mod slab;
pub mod uncertain;
pub mod unicycle;

pub use block::{BlockKind, ConstraintBlock, NormOrder};
pub use error::CcgError;
pub use hull::{convex_hull_many, convex_hull_pair, lift_block, LiftSide};
pub use ops::{intersection_under_map, linear_map, minkowski_sum, relax_to_box_blocks, translate};
pub use set::{ConvexSetCCG, SetClassTag, Violation};

pub use nalgebra::{DMatrix, DVector, Vector2};
