//! Simulation and estimation for L-shaped co-pulsing FDA radar.
//!
//! A co-pulsing frequency-diverse array keeps three sparse co-prime patterns
//! running at once: sensor positions along each arm of an L-shaped array,
//! per-sensor carrier frequency offsets, and pulse repetition intervals.
//! The pairwise differences of each pattern fill a virtual space-frequency-time
//! coarray that is much larger than the physical hardware, which is what lets
//! a handful of sensors and pulses resolve elevation, azimuth, range and
//! radial velocity for more targets than sensors.
//!
//! The crate is organised as a pipeline:
//!
//! ```text
//! geometry ──> scene ──> signal ──> ccing ──> estimates
//!                 │          │
//!                 │          └──> crb (error bounds)
//!                 └──> altdesigns (design-space comparisons)
//! ```
//!
//! * [`geometry`] builds index sets and their difference/lag structure.
//! * [`scene`] holds radar configuration and target scenes, and checks the
//!   feasibility conditions that make recovery possible.
//! * [`signal`] synthesizes snapshots, forms covariances, and extracts the
//!   contiguous coarray vectors.
//! * [`ccing`] runs the auto-pairing subspace estimator on those vectors.
//! * [`crb`] computes Fisher information and Cramér-Rao bounds.
//! * [`altdesigns`] quantifies mutual coupling, spectrum occupancy and
//!   dwell-time occupancy across alternative designs.
//! * [`metrics`] and [`montecarlo`] provide RMSE/hit-rate scoring and the
//!   seeded trial harness used by the CLI.

pub mod altdesigns;
pub mod ccing;
pub mod config;
pub mod crb;
pub mod geometry;
pub mod linalg;
pub mod metrics;
pub mod montecarlo;
pub mod scene;
pub mod signal;

/// Propagation speed used throughout, in m/s.
///
/// The round 3e8 radar convention keeps derived quantities (unambiguous range,
/// wavelength, resolution bins) at their textbook values; swap in the exact
/// constant only if sub-permille absolute range accuracy ever matters.
pub const C0: f64 = 3.0e8;

/// Crate-wide error type. Stage labels identify where multi-stage pipelines
/// (extraction, estimation, CRB assembly) gave up.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A constructor or operation received parameters violating its domain.
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// A configuration/scene pair fails the operating assumptions.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// A matrix that must have full (or known) rank does not.
    #[error("rank deficiency in {stage}: {detail}")]
    RankDeficient { stage: &'static str, detail: String },
    /// An eigenbasis or similar object is too ill-conditioned to use.
    #[error("degenerate scene in {stage}: {detail}")]
    Degenerate { stage: &'static str, detail: String },
    /// Inputs that must agree (shapes, lengths, orderings) do not.
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
