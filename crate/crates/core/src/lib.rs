//! Probabilistic representation of finite-dimensional quantum theory.
//!
//! Quantum states and measurements are mapped into the probability simplex
//! through an informationally complete reference measurement (usually a SIC).
//! In that picture the Born rule becomes the urgleichung, a deformed Law of
//! Total Probability, and quantum state space becomes a self-polar subset of
//! the simplex (a qplex). The crate provides:
//!
//! * [`operator`]: validated Hermitian operators, densities, effects and POVMs
//! * [`reference`]: reference measurements, the qubit tetrahedron and
//!   Weyl–Heisenberg SICs with cached Gramian and B-matrix
//! * [`search`]: SIC fiducial search by frame-potential minimization
//! * [`rep`]: state ↔ probability maps, conditional matrices and the urgleichung
//! * [`qplex`]: inner-product bounds, polar sets, MMD sets, sphere radii
//! * [`overlap`]: orthogonal states have overlapping probability vectors
//! * [`gleason`]: frame functions, regular fits and the qubit hemisphere
//! * [`acceptance`]: the end-to-end numerical checks, shared by the CLI and tests

pub mod acceptance;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod gleason;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod overlap;
pub mod qplex;
pub mod reference;
pub mod rep;
pub mod search;
pub mod tol;

pub use error::{QplexError, Result};
pub use exec::Exec;
pub use operator::{DensityMatrix, Effect, HermitianOperator, Povm, PureState};
pub use reference::{ReferenceMeasurement, SicPovm};
pub use rep::{CondProbMatrix, ProbVector, UrgleichungParams};

pub use nalgebra;
pub use num_complex::Complex64;
