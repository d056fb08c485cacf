//! Determinant-based CASCI with spin-orbit quasi-degenerate perturbation theory.
//!
//! The crate is organised along the calculation pipeline:
//!
//! * [`ingest`]: FCIDUMP and property-integral parsing, the ligand-field d-shell
//!   model builder, run configuration and seeded model integral sets.
//! * [`detspace`]: CAS determinant enumeration, string addressing and excitation
//!   connectivity.
//! * [`casci`]: Slater–Condon matrix elements, the direct sigma vector, Davidson
//!   and dense solvers, spin operators, multiplets, density matrices and
//!   wave-function decomposition.
//! * [`soc`]: spin-orbit matrices over multiplet components, QDPT, Kramers
//!   pairing and g-tensors (effective Hamiltonian and sum-over-states).
//! * [`spectra`]: transition dipoles, oscillator strengths and Gaussian
//!   broadening.
//!
//! All energies are carried in Hartree internally; [`units`] converts for output.
//! The `parallel` feature (on by default) distributes the sigma vector and a few
//! other embarrassingly parallel loops over rayon; without it every path runs
//! sequentially and produces bit-identical results.

pub mod casci;
pub mod detspace;
pub mod error;
pub mod ingest;
pub mod linalg;
pub(crate) mod par;
pub mod soc;
pub mod spectra;
pub mod units;

pub use error::{CasqError, Result};
