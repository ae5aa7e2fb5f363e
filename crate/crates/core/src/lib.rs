//! Symbolic-numeric toolkit for planar centers: given an analytic vector
//! field with a non-degenerate center at the origin, construct an even
//! potential `V` whose Hamiltonian system `xdot = y, ydot = -V'(x)` has the
//! same period function, and verify the construction numerically.
//!
//! The pipeline: certify the center candidate ([`field`]), reduce to the
//! orbital normal form ([`normal_form`]), extract the period series
//! ([`period`]), build the potential through the gamma transform
//! ([`potential`]), and cross-check predicted against measured periods
//! ([`verify`]). [`pipeline`] chains the stages.
//!
//! Every type is an immutable value and every operation a pure function,
//! so the whole crate is safe to drive from multiple threads.

pub mod field;
pub mod normal_form;
pub mod period;
pub mod pipeline;
pub mod potential;
pub mod quadrature;
pub mod series;
pub mod verify;

pub use field::{BivariatePoly, CertVerdict, CertificationRecord, LinearPartInfo, PlanarField};
pub use normal_form::{NormalFormResult, NormalFormVerdict};
pub use period::PeriodSeries;
pub use pipeline::{PipelineConfig, PipelineOutput};
pub use potential::{GammaRatioTable, PotentialResult};
pub use series::{Parity, ParitySeries, TruncatedSeries};
pub use verify::{GridSpec, Orbit, VerificationReport};
