//! Finite-level computations around the modular j-function.
//!
//! The crate covers the exact group `PGL2+(Q)` acting on the upper half-plane
//! ([`gl2q`], [`halfplane`]), certified evaluation of `j` ([`jfun`]), the
//! modular polynomials `Φ_N` and Hecke orbits ([`modpoly`], [`hecke`]),
//! complex-multiplication points ([`cm`]), the finite groups `PSL2(Z/N)` and
//! their torsors ([`fingal`]), and finite-level types with a back-and-forth
//! extension step ([`modelcheck`]), with the invariant suite in [`verify`].

pub mod ball;
pub mod cache;
pub mod cm;
pub mod error;
pub mod fingal;
pub mod gl2q;
pub mod halfplane;
pub mod hecke;
pub mod jfun;
pub mod modelcheck;
pub mod modpoly;
pub mod poly;
pub mod value;
pub mod verify;

pub use ball::Ball;
pub use error::{Error, Result};
pub use gl2q::GroupElement;
pub use halfplane::HalfPlanePoint;
pub use value::{JValue, Truth};
