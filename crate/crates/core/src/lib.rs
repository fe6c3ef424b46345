//! Nehari-manifold method for double-phase problems with variable exponents
//! on discretized compact Riemannian manifolds.
//!
//! The crate is organized bottom-up:
//!
//! - [`manifold`]: periodic chart grids (tori) carrying a metric tensor, with
//!   quadrature, central-difference gradients and Riemannian norms.
//! - [`orlicz`]: modulars, Luxemburg norms, weighted spaces and executable
//!   forms of the variable-exponent inequalities (Hölder, modular/norm
//!   relations, Poincaré-type embedding estimates).
//! - [`doublephase`]: the problem instance, the power-type source term, the
//!   energy functional and its Gateaux derivative.
//! - [`nehari`]: the Nehari constraint, fibering maps, projection onto the
//!   Nehari set and the `N+ / N- / N0` classification, plus the λ thresholds.
//! - [`solver`]: constrained descent on the `N+` and `N-` branches, the
//!   truncated functional and the two-solution experiment.
//! - [`cli`]: configuration files and the `verify`, `solve`, `sweep` and
//!   `project` commands behind the `nehari` binary.
//!
//! See the `examples/` directory of this crate for one runnable program per
//! capability.

pub mod cli;
pub mod doublephase;
pub mod error;
pub mod manifold;
pub mod nehari;
pub mod orlicz;
pub mod rng;
pub mod solver;
pub mod spectral;
pub mod sum;

pub use error::{Error, Result};
