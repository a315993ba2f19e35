//! Graded cochain complexes on constrained fermionic Fock spaces.
//!
//! The library builds supersymmetric lattice models (hard-core fermions on a
//! graph, dual-rail lifts of qubit Hamiltonians), exposes their cochain
//! structure (coboundary `d`, Laplacians, Dirac operator), and computes exact
//! and estimated Betti numbers, Witten indices, and spectra. A classical
//! emulation of the phase-estimation based estimators (QBNE, LLSD, the
//! two-stage DQC1 estimator) and a statevector VQE loop round out the toolkit.

pub mod complex;
pub mod error;
pub mod estimate;
pub mod fock;
pub mod graph;
pub mod linalg;
pub mod operators;
pub mod reduction;
pub mod scalar;
pub mod vqe;

pub use error::{Error, Result};

/// Default cap on the number of fermionic modes for dense enumeration paths.
pub const DEFAULT_MODE_CAP: usize = 24;

/// Default cap on matrix dimension for the dense eigensolver path.
pub const DENSE_EIG_CAP: usize = 4096;

/// Default cap on qubit count for statevector simulation.
pub const STATEVECTOR_CAP: usize = 20;

/// Mode cap honouring the `SUSYHOM_MAX_MODES` override.
pub fn mode_cap() -> usize {
    std::env::var("SUSYHOM_MAX_MODES")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_MODE_CAP)
}
