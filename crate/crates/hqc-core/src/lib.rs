//! Hamiltonian quantum computing on string lattices.
//!
//! This crate simulates a model of computation in which N particles, one per
//! lattice track, carry spin-1/2 internal states and hop across plaquettes
//! that apply single-qubit gates. Attractive edges make connected particle
//! strings the low-energy sector, so weak hopping (J ≪ Δ) drags the whole
//! string, and with it the computation, forward coherently.
//!
//! Modules:
//! - [`lattice`]: rotated and snake lattice geometries, CNOT/Toffoli/fast-CNOT
//!   gadget regions, JSON serialization.
//! - [`hamiltonian`]: one-particle-per-track basis enumeration, sparse
//!   H_valid / V_hop assembly, effective projections, disorder draws.
//! - [`dynamics`]: Krylov time evolution, observables, ensemble averaging.
//! - [`gadgets`]: CNOT and Toffoli first-passage experiments, error-exponent
//!   fits, backward-hop necessity check.
//! - [`walk`]: quantum walks on a line, Peres perfect transfer, snake-lattice
//!   equivalence, the fast CNOT, Lindblad excitation loss.
//! - [`coupler`]: cross-Kerr transmon coupler design calculations.
//! - [`gatesynth`]: dense gate algebra verifying the universality identities.

pub mod coupler;
pub mod dynamics;
pub mod error;
pub mod gadgets;
pub mod gatesynth;
pub mod hamiltonian;
pub mod io;
pub mod lattice;
pub mod walk;

pub use error::{Error, Result};
