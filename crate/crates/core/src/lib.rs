//! p-adic epsilon factors of rank-one Kummer and Dwork isocrystals on ℙ¹ over a finite field.
//!
//! The crate computes both sides of the product formula, the local determinant formula and
//! the classical Gauss-sum identities inside K = ℚ_q(π), π^(p−1) = −p, at a fixed precision.

pub mod characters;
pub mod epsilon;
pub mod error;
pub mod finite_geometry;
pub mod global;
pub mod local_field;
pub mod local_modules;

pub use error::{Error, Result};
pub use finite_geometry::{ClosedPoint, FiniteField, FqCtx, FqElem, PointKind, Subfield, Tower};
pub use local_field::{arith, make_context, ArithOp, Ctx, FieldCtx, PadicNumber};
