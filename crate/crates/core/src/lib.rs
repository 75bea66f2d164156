//! Numerical laboratory for the Schrödinger-Poisson-Slater energy
//!
//! ```text
//! I(u) = ½∫|∇u|² + (ω/2)∫u² + (λ/4)∫∫ u²(x)u²(y)/|x−y| − (1/p)∫|u|^p
//! ```
//!
//! Fields live either on a uniform radial grid ([`grid::RadialField`]) or on
//! a uniform Cartesian box with an optional ball mask ([`grid::Field3D`]).
//! The Coulomb potential is always `φ_u = u² ⋆ 1/|x|` (no `1/4π`), so the
//! Coulomb energy is the bare double integral `D(u², u²) = ∫ u² φ_u`.

pub mod constructions;
pub mod coulomb;
pub mod energy;
pub mod error;
mod fft3;
pub mod grid;
pub mod inequalities;
pub mod minimize;
pub mod quad;

pub use error::{Error, Result};
