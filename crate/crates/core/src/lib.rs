//! Non-stabilizerness ("magic") of pure qubit states, measured through the
//! flatness of the entanglement spectrum.
//!
//! The crate is organized bottom-up:
//!
//! - [`statevec`]: dense state vectors, gate kernels, reduced density
//!   matrices and the anti-flatness `F_A = Tr(ρ_A³) − Tr(ρ_A²)²`.
//! - [`pauli`]: Pauli strings as bit masks, the distribution `Ξ_ψ`, the
//!   stabilizer Rényi entropies and the stabilizer linear entropy.
//! - [`clifford`]: the two-qubit Clifford group, random brickwork circuits and
//!   coherent gate noise.
//! - [`stabilizer`]: exact small-instance oracles (stabilizer-state
//!   enumeration, stabilizer fidelity, exhaustive Clifford averages, toric
//!   code ground states) and the flatness constant `c(d, d_A)`.
//! - [`experiments`]: seeded Monte Carlo drivers producing [`RunRecord`]s,
//!   plus the config grammar and CSV writer.
//!
//! Parallelism over realizations and Pauli sweeps is provided by rayon behind
//! the default `parallel` feature; see [`Exec`].

pub mod clifford;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod gate;
pub mod pauli;
pub mod seed;
pub mod stabilizer;
pub mod statevec;

pub use error::{Error, Result};
pub use exec::Exec;
pub use experiments::{ExperimentConfig, ExperimentKind, RunRecord};
pub use gate::GateOp;
pub use pauli::{MagicMeasures, PauliString, XiDistribution};
pub use seed::SeedTree;
pub use statevec::{Bipartition, PureState, ReducedDensityMatrix, SpectrumMoments};

pub use num_complex::Complex64 as C64;
