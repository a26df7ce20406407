//! Quantum emitters coupled to closed, dissipative and mirage
//! Su–Schrieffer–Heeger photonic baths.
//!
//! The crate is `no_std` with `alloc`. It provides closed-form self-energies
//! on both Riemann sheets, bound states, exact emitter dynamics from a line
//! contour Fourier transform, two-excitation correlators, and a finite-lattice
//! brute-force oracle used to validate all of them.
//!
//! Energies are in units of the inter-cell hop `j2` unless stated otherwise.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub use num_complex::Complex64;

pub mod bath;
pub mod bound_states;
pub mod contour;
pub mod dynamics;
pub mod error;
pub mod lattice;
pub mod multi_excitation;
pub mod self_energy;
pub mod series;

pub use bath::{BathParams, BathVariant, Band, MirageParams, PhaseLabel, Region, Sheet};
pub use error::{Error, Result};
pub use bound_states::{BoundState, EmitterSpec};
pub use lattice::{BasisLabel, Boundary, LatticeOperator, StateVector};
pub use multi_excitation::NonlinearEmitterSpec;
pub use self_energy::{Site, Sublattice, SublatticePair};
pub use series::TimeSeries;
pub use dynamics::{ContourSpec, GreenMatrix};
