//! Radial Schrödinger problems near a bound-state pole.
//!
//! Units are chosen so that `hbar^2 / 2m = 1`; the reduced potential `U`
//! equals `V`, bound energies are `-alpha^2` and scattering energies `k^2`.

pub mod analytic;
pub mod coulomb;
pub mod error;
pub mod extrapolation;
pub mod grid;
pub mod perturbation;
pub mod potentials;
pub mod solver;
pub mod validation;

pub use error::{Error, Result};
pub use grid::RadialGrid;
pub use potentials::{Interaction, PotentialKind, PotentialModel, SeparableModel};
pub use solver::{BoundState, PhaseShift, ScatteringState};
