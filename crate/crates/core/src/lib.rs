//! Property testing of unitary operators, simulated classically.
//!
//! Testers for the orthogonal group, `k`-juntas, the Pauli and Clifford groups
//! and arbitrary finite sets (including qubit permutations), together with
//! brute-force distance oracles that certify their verdicts at small sizes.

pub mod choi;
pub mod error;
pub mod generators;
pub mod io;
pub mod linalg;
pub mod oracles;
pub mod pauli;
pub mod rng;
pub mod testers;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DistanceReport, SvdResult};
pub use pauli::{PauliSpectrum, PauliString};
pub use rng::RngStream;
pub use testers::{FiniteSubset, TestVerdict};
