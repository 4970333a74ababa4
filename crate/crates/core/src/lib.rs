//! Certification of high-dimensional bipartite entanglement from few
//! measurements.
//!
//! For a `d x d` bipartite system whose state is maximally correlated (every
//! computational-basis coincidence off the correlated diagonal vanishes), the
//! relative entropy of entanglement can be lower-bounded from `2d + 1`
//! numbers: the `d` correlated coincidence probabilities, the total (or
//! per-outcome) uncorrelated coincidence probability, and a single purity
//! measurement. The same machinery handles such states mixed with diagonal
//! noise, the expected experimental case.
//!
//! Modules:
//!
//! - [`densmat`] — dense complex density-matrix machinery: construction,
//!   validation, spectra, purity, entropy, partial trace, correlation
//!   structure, majorization;
//! - [`certify`] — the closed-form constrained-entropy bound, the
//!   entanglement bounds built on it (noise-free and noisy), purity
//!   conversion, and parameter estimation from raw counts;
//! - [`oracle`] — independent brute-force verification of the constrained
//!   entropy minimum: candidate enumeration, grid and sampled sweeps of the
//!   feasible manifold, and the exact two-dimensional solution;
//! - [`photonics`] — the beamsplitter parity measurement of purity: closed
//!   form, brute-force Fock expansion, and shot-level simulators;
//! - [`sample`] — seeded random-state generators for tests and simulation.
//!
//! Core math is generic over the scalar type through [`Real`] (`f32` or
//! `f64`); `f64` aliases for the main types are exported at the crate root.

pub mod certify;
pub mod counts;
pub mod densmat;
pub mod linalg;
pub mod oracle;
pub mod photonics;
mod real;
pub mod sample;

use num_traits::ToPrimitive;
use thiserror::Error;

pub use real::{shannon_entropy, xlog2, Real};

/// Errors for state validation, numerics, and estimation.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix size {len} is not {dim}x{dim}")]
    BadShape { dim: usize, len: usize },

    #[error("dimension mismatch: {expected} vs {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not Hermitian: max |a - conj(a^T)| = {deviation:.3e} exceeds {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("trace is not 1 (got {trace:.12}, tolerance {tol:.3e})")]
    TraceNotOne { trace: f64, tol: f64 },

    #[error("not positive semidefinite (min eigenvalue {min_eigenvalue:.3e}, tolerance -{tol:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64, tol: f64 },

    #[error("probabilities sum to {sum:.12} instead of 1 (tolerance {tol:.3e})")]
    NotNormalized { sum: f64, tol: f64 },

    #[error("negative entry {value:.3e} at index {index}")]
    NegativeEntry { index: usize, value: f64 },

    #[error("eigensolver did not converge: off-diagonal norm {off_norm:.3e} after {sweeps} sweeps")]
    EigenSolverFailed { off_norm: f64, sweeps: usize },

    #[error("state is not maximally correlated: uncorrelated diagonal mass {mass:.3e} exceeds {tol:.3e}")]
    NotMaximallyCorrelated { mass: f64, tol: f64 },

    #[error("support outside the correlated subspace: mass {mass:.3e} exceeds {tol:.3e}")]
    SupportOutsideCorrelatedSubspace { mass: f64, tol: f64 },

    #[error("mixing weight gamma = {gamma} outside [0, 1]")]
    GammaOutOfRange { gamma: f64 },

    #[error("gamma = 0: no maximally correlated component to certify")]
    GammaZero,

    #[error("purity {purity:.6} outside [{lo:.6}, {hi:.6}] beyond the clamp tolerance")]
    PurityOutOfRange { purity: f64, lo: f64, hi: f64 },

    #[error("no feasible spectrum for purity {purity} at dimension {dim}")]
    NoFeasiblePoint { purity: f64, dim: usize },

    #[error("shots must be positive")]
    ZeroShots,

    #[error("counts record contains no events")]
    ZeroCounts,

    #[error("no correlated coincidence counts: estimated gamma is 0")]
    NoCorrelatedCounts,

    #[error("no parity counts: purity cannot be estimated")]
    NoParityCounts,

    #[error("mode dimension {d} exceeds the Fock expansion limit {max}")]
    FockDimensionTooLarge { d: usize, max: usize },

    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn diag_f64<T: ToPrimitive>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Every numeric tolerance and threshold the crate consults, in one place.
///
/// The defaults separate floating-point dust from genuinely invalid input;
/// `purity_clamp_tol` and `mc_threshold` are measurement-policy knobs rather
/// than numerical ones.
#[derive(Debug, Clone, PartialEq)]
pub struct NumericPolicy<T> {
    /// Max |a_ij - conj(a_ji)| for a matrix to count as Hermitian.
    pub hermiticity_tol: T,
    /// Max |tr - 1| for a density operator.
    pub trace_tol: T,
    /// Eigenvalues above `-psd_tol` count as nonnegative.
    pub psd_tol: T,
    /// Max |sum - 1| for probability vectors.
    pub prob_tol: T,
    /// Per-entry bound on uncorrelated diagonal entries in maximal-correlation
    /// checks used by constructors.
    pub mc_tol: T,
    /// Max probability mass outside the correlated subspace for parity
    /// expectation values of mixed states.
    pub support_mass_tol: T,
    /// Measured purities outside their physical interval by at most this much
    /// are clamped with a warning; anything worse is an error.
    pub purity_clamp_tol: T,
    /// Uncorrelated count fraction below which a record is treated as
    /// noise-free.
    pub mc_threshold: T,
}

impl<T: Real> Default for NumericPolicy<T> {
    fn default() -> Self {
        Self {
            hermiticity_tol: T::of(1e-10),
            trace_tol: T::of(1e-10),
            psd_tol: T::of(1e-10),
            prob_tol: T::of(1e-9),
            mc_tol: T::of(1e-10),
            support_mass_tol: T::of(1e-9),
            purity_clamp_tol: T::of(0.05),
            mc_threshold: T::of(1e-3),
        }
    }
}

pub use certify::{
    certify, entanglement_dim_lower_bound, estimate_params_from_counts, mutual_info_lower_bound_mc,
    neg_entropy_lower_bound, purity_mc_from_total, rank_upper_bound_from_diag, ree_exact_mc,
    ree_lower_bound_mc, ree_lower_bound_noisy, CertWarning, CertificationInput,
    CertificationReport, NoiseChoice, NoiseModel,
};
pub use counts::{CountsRecord, ParityTally};
pub use densmat::{majorizes, CorrelationProfile, DensityMatrix, Spectrum, Subsystem};
pub use linalg::{ComplexMatrix, HermitianEigen};
pub use oracle::{
    best_candidate, candidate, candidates, exact_d2, grid_oracle_min, sampled_oracle_min,
    Candidate,
};
pub use photonics::{
    beamsplitter_output, fock_brute_force_parity, parity_expectation_mixed,
    parity_expectation_pure, simulate_coincidence_counts, simulate_parity_counts, FockVector,
    ModeOccupation, Port, TwoPhotonState,
};

/// `f64` concrete aliases for the main generic types.
pub type ComplexMatrix64 = ComplexMatrix<f64>;
pub type DensityMatrix64 = DensityMatrix<f64>;
pub type Spectrum64 = Spectrum<f64>;
pub type CorrelationProfile64 = CorrelationProfile<f64>;
pub type CertificationInput64 = CertificationInput<f64>;
pub type CertificationReport64 = CertificationReport<f64>;
pub type Candidate64 = Candidate<f64>;
pub type TwoPhotonState64 = TwoPhotonState<f64>;
pub type NumericPolicy64 = NumericPolicy<f64>;

/// `f32` aliases for the state types; useful where storage outweighs the
/// reduced precision (the certification tolerances assume `f64`).
pub type ComplexMatrix32 = ComplexMatrix<f32>;
pub type DensityMatrix32 = DensityMatrix<f32>;
pub type Spectrum32 = Spectrum<f32>;
