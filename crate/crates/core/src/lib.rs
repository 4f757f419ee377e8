//! Open quantum system dynamics with a generalized Ehrenfest decomposition.
//!
//! The crate evolves small dense density matrices under GKLS generators,
//! tracks the spectral decomposition of the state along the trajectory,
//! reconstructs the Hermitian generator of the eigenbasis motion and splits
//! the rate of change of any expectation value into an eigenvalue (thermal)
//! part, an explicit-time (drive) part and a coherence part. For the
//! Hamiltonian this yields heat and work rates.

pub mod bloch;
pub mod dynamics;
pub mod error;
pub mod operator;
pub mod random;
pub mod scenario;
pub mod spectrum;
pub mod state;
pub mod suite;
pub mod thermo;

pub use error::{Error, Result};
pub use operator::{commutator, ComplexMatrix, HermitianOperator, Matrix, C64};
pub use spectrum::{hermitian_eigendecompose, Spectrum};
pub use state::{expectation, variance, DensityMatrix};
