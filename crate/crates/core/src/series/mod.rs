//! Truncated univariate power series over `f64`, with composition and
//! reversion.
//!
//! A [`TruncatedSeries`] stores exactly `order + 1` coefficients. Missing
//! high-order terms are an error at construction time, never an implicit
//! zero. Two pieces of metadata ride along with every value:
//!
//! * `trusted_order` — the largest index whose coefficient is still a
//!   faithful Taylor coefficient of the underlying function. Operations
//!   that synthesize data (e.g. [`TruncatedSeries::derivative`], which keeps
//!   the array length but has no input for the top slot) lower it.
//! * `truncation_loss` — set when an operation discarded a nonzero
//!   coefficient beyond the stored order.
//!
//! All operations are pure functions on immutable values and are safe to
//! call concurrently.

pub(crate) mod kernel;
mod parity;

pub mod exact;

pub use parity::{Parity, ParitySeries};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SeriesError {
    #[error("series order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("coefficient {0} is not finite")]
    NonFinite(usize),
    #[error("series must have at least one coefficient")]
    Empty,
    #[error("inner series must vanish at 0")]
    InnerConstantNonzero,
    #[error("not revertible: {0}")]
    NotRevertible(&'static str),
    #[error("reciprocal requires a nonzero constant term")]
    ZeroConstant,
    #[error("sqrt1p requires a zero constant term")]
    SqrtConstantNonzero,
}

/// Univariate real power series truncated at a fixed order.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    coeffs: Vec<f64>,
    trusted: usize,
    lossy: bool,
    var: String,
}

impl TruncatedSeries {
    /// Builds a series from `[c0, ..., cN]`; the order is `N`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self, SeriesError> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(SeriesError::NonFinite(k));
        }
        let trusted = coeffs.len() - 1;
        Ok(Self { coeffs, trusted, lossy: false, var: "z".into() })
    }

    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![0.0; order + 1], trusted: order, lossy: false, var: "z".into() }
    }

    pub fn constant(c: f64, order: usize) -> Result<Self, SeriesError> {
        let mut s = Self::zero(order);
        if !c.is_finite() {
            return Err(SeriesError::NonFinite(0));
        }
        s.coeffs[0] = c;
        Ok(s)
    }

    /// The identity series `z`. Requires `order >= 1`.
    pub fn identity(order: usize) -> Self {
        assert!(order >= 1, "identity series needs order >= 1");
        let mut s = Self::zero(order);
        s.coeffs[1] = 1.0;
        s
    }

    pub fn with_var(mut self, var: &str) -> Self {
        self.var = var.into();
        self
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn trusted_order(&self) -> usize {
        self.trusted
    }

    pub fn truncation_loss(&self) -> bool {
        self.lossy
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs[k]
    }

    fn meta_binary(&self, other: &Self, coeffs: Vec<f64>, extra_loss: bool) -> Self {
        Self {
            coeffs,
            trusted: self.trusted.min(other.trusted),
            lossy: self.lossy || other.lossy || extra_loss,
            var: self.var.clone(),
        }
    }

    fn check_order(&self, other: &Self) -> Result<(), SeriesError> {
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch(self.order(), other.order()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        Ok(self.meta_binary(other, kernel::add(&self.coeffs, &other.coeffs), false))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        Ok(self.meta_binary(other, kernel::sub(&self.coeffs, &other.coeffs), false))
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { coeffs: kernel::scale(&self.coeffs, &c), ..self.clone() }
    }

    /// Cauchy product truncated back to the common order.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_order(other)?;
        let (coeffs, lost) = kernel::mul_trunc(&self.coeffs, &other.coeffs, self.coeffs.len());
        Ok(self.meta_binary(other, coeffs, lost))
    }

    /// Termwise derivative. Keeps the array length: the top coefficient has
    /// no input data, is set to zero, and the trusted order drops by one.
    pub fn derivative(&self) -> Self {
        let mut coeffs = kernel::derivative(&self.coeffs);
        coeffs.push(0.0);
        let lossy = self.lossy || self.order() >= 1;
        Self { coeffs, trusted: self.trusted.saturating_sub(1), lossy, var: self.var.clone() }
    }

    /// Termwise antiderivative with integration constant; order grows by one.
    pub fn antiderivative(&self, constant: f64) -> Self {
        Self {
            coeffs: kernel::antiderivative(&self.coeffs, constant),
            trusted: self.trusted + 1,
            lossy: self.lossy,
            var: self.var.clone(),
        }
    }

    /// Taylor coefficients of `self(inner)` to the common order.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        self.check_order(inner)?;
        if inner.coeffs[0] != 0.0 {
            return Err(SeriesError::InnerConstantNonzero);
        }
        let (coeffs, lost) = kernel::compose(&self.coeffs, &inner.coeffs);
        Ok(self.meta_binary(inner, coeffs, lost))
    }

    /// Compositional inverse; requires `c0 = 0` and `c1 != 0`.
    pub fn revert(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0] != 0.0 {
            return Err(SeriesError::NotRevertible("constant term must vanish"));
        }
        if self.order() < 1 || self.coeffs[1] == 0.0 {
            return Err(SeriesError::NotRevertible("linear term must be nonzero"));
        }
        Ok(Self {
            coeffs: kernel::revert(&self.coeffs),
            trusted: self.trusted,
            lossy: self.lossy,
            var: self.var.clone(),
        })
    }

    /// Series of `sqrt(1 + self)`; requires a zero constant term.
    pub fn sqrt1p(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0] != 0.0 {
            return Err(SeriesError::SqrtConstantNonzero);
        }
        Ok(Self { coeffs: kernel::sqrt1p(&self.coeffs), ..self.clone() })
    }

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        if self.coeffs[0] == 0.0 {
            return Err(SeriesError::ZeroConstant);
        }
        Ok(Self { coeffs: kernel::reciprocal(&self.coeffs), ..self.clone() })
    }

    /// Horner evaluation at a point.
    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Appends zero coefficients up to `order` and marks them trusted.
    /// Only valid when the caller knows the series is an exact polynomial.
    pub fn extend_exact(&self, order: usize) -> Self {
        assert!(order >= self.order(), "extend_exact cannot shrink a series");
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, 0.0);
        Self { coeffs, trusted: order, lossy: self.lossy, var: self.var.clone() }
    }

    /// Drops coefficients above `order`, flagging loss if any were nonzero.
    pub fn truncated(&self, order: usize) -> Self {
        assert!(order <= self.order());
        let lost = self.coeffs[order + 1..].iter().any(|c| *c != 0.0);
        Self {
            coeffs: self.coeffs[..=order].to_vec(),
            trusted: self.trusted.min(order),
            lossy: self.lossy || lost,
            var: self.var.clone(),
        }
    }

    /// Maximum coefficient difference scaled by `max(1, |c|)`, the
    /// crate-wide comparison policy for series equality.
    pub fn max_scaled_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.order(), other.order(), "max_scaled_diff needs equal orders");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs() / 1.0_f64.max(a.abs()).max(b.abs()))
            .fold(0.0, f64::max)
    }

    /// Heuristic convergence radius `0.5 (|c_a| / |c_b|)^{1/(b-a)}` from the
    /// first and last nonzero coefficients. `None` when fewer than two
    /// nonzero coefficients exist (no growth to extrapolate).
    pub fn trust_radius(&self) -> Option<f64> {
        let first = self.coeffs.iter().position(|c| *c != 0.0)?;
        let last = self.coeffs.iter().rposition(|c| *c != 0.0)?;
        if last <= first {
            return None;
        }
        let ratio = self.coeffs[first].abs() / self.coeffs[last].abs();
        Some(0.5 * ratio.powf(1.0 / (last - first) as f64))
    }
}
