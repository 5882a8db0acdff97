//! Statevector simulation and information diagnostics for small
//! variational quantum classifiers.
//!
//! The crate trains brick-wall ansatz classifiers on classical datasets
//! and, per training epoch, measures how mutual information flows between
//! input/output subsystems of the ansatz unitary via its Choi state:
//! `I(Di:Mo)` between the discarded input qubits and the measured output
//! qubit, and `I(Mi:Mo)` between the input and output legs of the
//! measured qubit.
//!
//! Core math is generic over the scalar type ([`scalar::Real`], `f32` or
//! `f64`); the concrete aliases below pin the common instantiations.
//! Basis convention throughout: qubit 0 is the least significant bit of
//! the basis index.

pub mod circuit;
pub mod datasets;
pub mod eigen;
pub mod encoding;
pub mod error;
pub mod gate;
pub mod infodyn;
pub mod runner;
pub mod scalar;
pub mod state;
pub mod training;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` state vector.
pub type StateVector64 = state::StateVector<f64>;
/// `f32` state vector.
pub type StateVector32 = state::StateVector<f32>;
/// `f64` density matrix.
pub type DensityMatrix64 = state::DensityMatrix<f64>;
/// `f32` density matrix.
pub type DensityMatrix32 = state::DensityMatrix<f32>;
/// `f64` unitary.
pub type UnitaryMatrix64 = state::UnitaryMatrix<f64>;
/// `f32` unitary.
pub type UnitaryMatrix32 = state::UnitaryMatrix<f32>;
/// `f64` circuit.
pub type Circuit64 = circuit::Circuit<f64>;
/// `f32` circuit.
pub type Circuit32 = circuit::Circuit<f32>;
/// `f64` Choi state.
pub type ChoiState64 = infodyn::ChoiState<f64>;
