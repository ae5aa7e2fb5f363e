//! Period-function series of the radial normal form.
//!
//! From the angular profile `f` (rotation rate as a function of
//! `rho = xi^2 + eta^2`) this module builds the energy profile
//! `F(z) = (1/2) \int_0^z f`, inverts it, and assembles the period series
//! `T(E) = pi * sum n a_n E^{n-1}` where `F^{-1}(E) = sum a_n E^n`.
//! A second, independent route computes `T = 2 pi / f(F^{-1}(E))`; the two
//! agree coefficientwise.

use serde::Serialize;
use thiserror::Error;

use crate::series::{SeriesError, TruncatedSeries};

#[derive(Debug, Error)]
pub enum PeriodError {
    #[error("rotation rate at the origin must be positive (f(0) = {0})")]
    NonPositiveFrequency(f64),
    #[error("period must be positive at the center (a1 = {0})")]
    NonPositiveLeadingCoefficient(f64),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// `F(z) = (1/2) \int_0^z f(s) ds`; the Hamiltonian of the normal form is
/// `F(xi^2 + eta^2)`. Output order is one above the input order.
pub fn energy_profile(f: &TruncatedSeries) -> Result<TruncatedSeries, PeriodError> {
    if f.coeff(0) <= 0.0 {
        return Err(PeriodError::NonPositiveFrequency(f.coeff(0)));
    }
    Ok(f.antiderivative(0.0).scale(0.5))
}

/// Coefficients `a_1..a_N` of the inverse energy profile `F^{-1}`.
pub fn invert_profile(big_f: &TruncatedSeries) -> Result<Vec<f64>, PeriodError> {
    let inv = big_f.revert()?;
    Ok(inv.coeffs()[1..].to_vec())
}

/// `T(E) = pi sum n a_n E^{n-1}` from the inverse-profile coefficients.
pub fn period_series(a: &[f64]) -> Result<TruncatedSeries, PeriodError> {
    if a.is_empty() || a[0] <= 0.0 {
        return Err(PeriodError::NonPositiveLeadingCoefficient(a.first().copied().unwrap_or(0.0)));
    }
    let coeffs: Vec<f64> =
        a.iter().enumerate().map(|(k, an)| std::f64::consts::PI * (k + 1) as f64 * an).collect();
    Ok(TruncatedSeries::new(coeffs)?.with_var("E"))
}

/// The same period series through the other algebraic route,
/// `T = 2 pi / f(F^{-1}(E))`, used as a cross-check of the first.
pub fn period_series_via_f(f: &TruncatedSeries) -> Result<TruncatedSeries, PeriodError> {
    let big_f = energy_profile(f)?;
    let inv = big_f.revert()?.truncated(f.order());
    let f_on_orbit = f.compose(&inv)?;
    Ok(f_on_orbit.reciprocal()?.scale(2.0 * std::f64::consts::PI).with_var("E"))
}

/// Period data of a center: inverse-profile coefficients, the period
/// series, the rotation frequency, and a heuristic trust region.
#[derive(Debug, Clone)]
pub struct PeriodSeries {
    /// Coefficients `a_1..a_N` of `F^{-1}(E) = sum a_n E^n`.
    pub a: Vec<f64>,
    /// `T(E)` as a series in the energy.
    pub t: TruncatedSeries,
    /// `f(0)`, the rotation frequency at the center.
    pub omega: f64,
    /// Heuristic validity radius `0.5 (|a_1|/|a_N|)^{1/(N-1)}` from the last
    /// nonzero coefficient; `None` when the series gives no growth to read.
    pub e_max: Option<f64>,
}

impl PeriodSeries {
    pub fn from_f(f: &TruncatedSeries) -> Result<Self, PeriodError> {
        let omega = f.coeff(0);
        let big_f = energy_profile(f)?;
        let a = invert_profile(&big_f)?;
        let t = period_series(&a)?;
        let e_max = e_max_heuristic(&a);
        Ok(Self { a, t, omega, e_max })
    }

    /// Builds the record directly from inverse-profile coefficients (the
    /// inverse-problem entry point that skips the normal form).
    pub fn from_a(a: &[f64]) -> Result<Self, PeriodError> {
        let t = period_series(a)?;
        Ok(Self { a: a.to_vec(), t, omega: 2.0 / a[0], e_max: e_max_heuristic(a) })
    }

    /// Recovers `a_n = t_{n-1} / (pi n)` from a period series.
    pub fn from_t(t: &[f64]) -> Result<Self, PeriodError> {
        let a: Vec<f64> = t
            .iter()
            .enumerate()
            .map(|(k, tn)| tn / (std::f64::consts::PI * (k + 1) as f64))
            .collect();
        Self::from_a(&a)
    }
}

fn e_max_heuristic(a: &[f64]) -> Option<f64> {
    let last = a.iter().rposition(|c| *c != 0.0)?;
    if last == 0 {
        return None;
    }
    Some(0.5 * (a[0].abs() / a[last].abs()).powf(1.0 / last as f64))
}

/// Serialization form of [`PeriodSeries`] for the CLI.
#[derive(Debug, Serialize)]
pub struct PeriodJson {
    pub omega: f64,
    pub a: Vec<f64>,
    #[serde(rename = "T")]
    pub t: Vec<f64>,
    #[serde(rename = "E_max")]
    pub e_max: Option<f64>,
}

impl From<&PeriodSeries> for PeriodJson {
    fn from(p: &PeriodSeries) -> Self {
        Self { omega: p.omega, a: p.a.clone(), t: p.t.coeffs().to_vec(), e_max: p.e_max }
    }
}
