//! Structure-preserving solver for the linearized shallow water equations.
//!
//! Space is discretized with a hybridizable discontinuous Galerkin (HDG)
//! method for the velocity / flux-potential `(u, w)` formulation, where the
//! geopotential is recovered from the steady constraint `phi = -div w`.
//! Time is advanced with symplectic Runge-Kutta schemes, selected by name
//! through [`integrators::IntegratorRegistry`].
//!
//! The crate is organised bottom-up:
//!
//! * [`mesh`] - triangulations, facet skeleton, periodic pairing, text IO
//! * [`fespace`] - quadrature, orthonormal bases, trace spaces, projections
//! * [`assembly`] - the global HDG operators and load vectors
//! * [`elliptic`] - condensed geopotential recovery and the vector-Laplacian
//!   initialization
//! * [`integrators`] - Butcher tableaus, sDIRK / sEPRK steppers, registry
//! * [`swe`] - problem definitions and the two semidiscrete systems
//! * [`diagnostics`] - conserved quantities, error norms, convergence orders

pub mod assembly;
pub mod diagnostics;
pub mod elliptic;
pub mod error;
pub mod fespace;
pub mod integrators;
pub mod mesh;
pub mod sparse;
pub mod swe;

pub use error::{Error, Result};
