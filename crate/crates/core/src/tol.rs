//! Numerical tolerances shared across modules.

/// Elementwise Hermiticity check.
pub const HERM: f64 = 1e-10;
/// Lower bound on eigenvalues of positive operators.
pub const PSD: f64 = 1e-9;
pub const TRACE: f64 = 1e-10;
pub const NORM: f64 = 1e-10;
/// Max-abs deviation of a POVM sum from the identity.
pub const POVM: f64 = 1e-10;
/// Slack allowed when a Born probability leaves [0, 1].
pub const PROB: f64 = 1e-9;
/// Acceptance threshold for equiangularity of a SIC orbit.
pub const SIC: f64 = 1e-8;

/// Probability vectors must sum to one within this.
pub const PROB_SUM: f64 = 1e-9;
/// Entries of a probability vector may dip this far below zero.
pub const PROB_ENTRY: f64 = 1e-12;
/// Negative urgleichung outputs beyond this are inconsistent.
pub const URG_NEGATIVE: f64 = 1e-9;
/// alpha − N·beta = 1 within this.
pub const URG_NORMALIZATION: f64 = 1e-12;

/// Relative singular-value cutoff used when counting rank.
pub const RANK_REL: f64 = 1e-8;
/// B·G = I on the row space.
pub const B_GRAM: f64 = 1e-9;
/// Second eigenvalue of a SIC effect.
pub const RANK_ONE: f64 = 1e-9;

/// Pairwise qplex bound checks.
pub const QPLEX_BOUND: f64 = 1e-9;
/// Polar membership inequality.
pub const POLAR: f64 = 1e-12;
/// Default saturation tolerance for MMD sets.
pub const MMD_SATURATION: f64 = 1e-7;
/// Default exact clique-search budget.
pub const MMD_BUDGET: usize = 64;

pub const SUBSPACE_DEGENERATE: f64 = 1e-12;
pub const MIXTURE_WEIGHTS: f64 = 1e-10;
/// Eigen-weights at or below this are dropped from an eigen-mixture.
pub const MIXTURE_DROP: f64 = 1e-13;

pub const BASIS_ORTHO: f64 = 1e-10;
pub const FRAME_SUM: f64 = 1e-9;
/// Hemisphere function treats |b·n| up to this as equatorial.
pub const EQUATOR: f64 = 1e-12;
pub const FEASIBLE_RESIDUAL: f64 = 1e-8;
pub const FEASIBLE_EIGEN: f64 = 1e-8;
