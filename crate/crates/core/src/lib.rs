//! Curvature-operator algebra on metric Lie algebras.
//!
//! The crate implements, at desk scale:
//! - the metric Lie algebras so(n), u(n), iso(n), u(n)⋉ℝ²ⁿ ([`liealg`]);
//! - the operator calculus: squares, the # operator in adjoint, coadjoint
//!   and general-metric form, Ricci contractions, Bianchi projections and
//!   model operators ([`curvop`]);
//! - Ad-invariant cone families S ⊂ g⊗ℂ with samplers and a multistart
//!   membership oracle minimizing the Hermitian form R(v,v̄) ([`cones`]);
//! - ODE integration for the Ricci-flow and Harnack vector fields together
//!   with boundary certificates and invariance experiments ([`flows`]);
//! - the Kähler ⋆-calculus: S²_K(u(n)), A⋆B, E, the l_s deformation, the
//!   Bochner operator and the associated checks ([`kahler`]).
//!
//! The `curvcone` binary exposes the same functionality as a CLI.

pub mod cones;
pub mod curvop;
pub mod error;
pub mod flows;
pub mod json;
pub mod kahler;
pub mod liealg;

pub use error::{CurvError, Result};
