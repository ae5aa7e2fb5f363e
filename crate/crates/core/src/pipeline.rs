//! End-to-end pipeline: certification, normal form, period series,
//! potential construction, verification.

use serde::Serialize;
use thiserror::Error;

use crate::field::{CertVerdict, CertificationRecord, PlanarField};
use crate::normal_form::{
    extract_f, orbital_normal_form, NormalFormError, NormalFormResult, NormalFormVerdict,
};
use crate::period::PeriodSeries;
use crate::potential::{
    ab_transform, abel_forward_numeric, abel_forward_series, build_potential, phi_from_b,
    AbelQuadrature, PotentialError, PotentialResult,
};
use crate::verify::{
    compare_period_functions, CompareConfig, ComparisonInputs, GridSpec, MeasureConfig,
    VerificationReport,
};

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    /// Series order `N` for the period and potential expansions; the normal
    /// form is pushed through polynomial degree `2N + 1`.
    pub order: usize,
    /// Absolute tolerance on the linear-part trace.
    pub tau_lin: f64,
    /// Threshold on radial residuals for the center verdict.
    pub tau_center: f64,
    /// ODE tolerances for period measurement.
    pub ode_rtol: f64,
    pub ode_atol: f64,
    /// Relative tolerance of the verification pass verdict.
    pub verify_tol: f64,
    pub grid: GridSpec,
    /// Fractions of the validity radius probed by the numeric Abel check.
    pub abel_check_fractions: Vec<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            order: 12,
            tau_lin: 1e-12,
            tau_center: 1e-9,
            ode_rtol: 1e-10,
            ode_atol: 1e-12,
            verify_tol: 1e-5,
            grid: GridSpec { e_min: 0.01, e_max: 0.05, count: 5 },
            abel_check_fractions: vec![0.25, 0.5],
        }
    }
}

impl PipelineConfig {
    pub fn measure_config(&self) -> MeasureConfig {
        MeasureConfig { rtol: self.ode_rtol, atol: self.ode_atol, ..MeasureConfig::default() }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("input rejected: {reason}")]
    Rejected { record: CertificationRecord, reason: String },
    #[error("not a center to order {order} (residual {residual:.3e})")]
    NotACenter { order: usize, residual: f64, record: Box<CertificationRecord> },
    #[error("stage {stage} failed: {message}")]
    Stage { stage: &'static str, message: String },
}

impl PipelineError {
    fn stage(stage: &'static str, err: impl std::fmt::Display) -> Self {
        Self::Stage { stage, message: err.to_string() }
    }
}

/// Everything the pipeline produced.
#[derive(Debug)]
pub struct PipelineOutput {
    pub certification: CertificationRecord,
    pub normal_form: NormalFormResult,
    pub period: PeriodSeries,
    pub potential: PotentialResult,
    pub report: VerificationReport,
}

/// Numeric Abel spot checks: |quadrature - series| at chosen energies.
#[derive(Debug, Clone, Serialize)]
pub struct AbelCheck {
    pub e: f64,
    pub series: f64,
    pub numeric: f64,
    pub abs_err: f64,
}

/// Runs certify -> normal form -> period -> potential -> verify.
pub fn run_pipeline(
    field: &PlanarField,
    config: &PipelineConfig,
) -> Result<PipelineOutput, PipelineError> {
    let certification = field.certify(config.tau_lin);
    if certification.verdict == CertVerdict::Rejected {
        let reason = certification.reason.clone().unwrap_or_else(|| "rejected".into());
        return Err(PipelineError::Rejected { record: certification, reason });
    }

    let nf = orbital_normal_form(field, 2 * config.order, config.tau_lin, config.tau_center)
        .map_err(|e| match e {
            NormalFormError::Linear(err) => PipelineError::Rejected {
                record: certification.clone(),
                reason: err.to_string(),
            },
            other => PipelineError::stage("normal_form", other),
        })?;
    if let NormalFormVerdict::NotCenterToOrder(order) = nf.verdict {
        let k = (order - 3) / 2;
        return Err(PipelineError::NotACenter {
            order,
            residual: nf.radial_residuals[k],
            record: Box::new(certification),
        });
    }

    let f = extract_f(&nf).map_err(|e| PipelineError::stage("normal_form", e))?;
    let period = PeriodSeries::from_f(&f).map_err(|e| PipelineError::stage("period", e))?;
    let (potential, _) = potential_stage(&period).map_err(|e| match e {
        PotentialError::NonPositiveA1(_) | PotentialError::NonPositiveB1(_) => {
            PipelineError::Rejected { record: certification.clone(), reason: e.to_string() }
        }
        other => PipelineError::stage("potential", other),
    })?;

    let profile = crate::period::energy_profile(&f)
        .map_err(|e| PipelineError::stage("period", e))?;
    let inputs = ComparisonInputs {
        x_field: field,
        nf: &nf,
        energy_profile: &profile,
        period: &period,
        potential: &potential,
    };
    let compare = CompareConfig {
        measure: config.measure_config(),
        tolerance: config.verify_tol,
        energy_tol: 1e-10,
    };
    let report = compare_period_functions(&inputs, &config.grid, &compare);

    Ok(PipelineOutput { certification, normal_form: nf, period, potential, report })
}

/// The inverse-problem entry point: build the potential directly from an
/// `a`-sequence (or a period series, converted by the caller), skipping
/// certification and the normal form. Returns the potential (with the
/// central-identity residual filled in) and the numeric Abel spot checks.
pub fn run_potential_from_period(
    period: &PeriodSeries,
    config: &PipelineConfig,
) -> Result<(PotentialResult, Vec<AbelCheck>), PipelineError> {
    let (potential, _) =
        potential_stage(period).map_err(|e| PipelineError::stage("potential", e))?;
    let checks = abel_spot_checks(&potential, &config.abel_check_fractions);
    Ok((potential, checks))
}

fn potential_stage(
    period: &PeriodSeries,
) -> Result<(PotentialResult, Vec<f64>), PotentialError> {
    let b = ab_transform(&period.a)?;
    let phi = phi_from_b(&b)?;
    let mut potential = build_potential(&phi)?;
    let that = abel_forward_series(&b);
    let residual = that.max_scaled_diff(&period.t);
    potential.central_residual = Some(residual);
    Ok((potential, b))
}

fn abel_spot_checks(potential: &PotentialResult, fractions: &[f64]) -> Vec<AbelCheck> {
    let Some(radius) = potential.radius_e else { return Vec::new() };
    let series = abel_forward_series(&potential.b);
    fractions
        .iter()
        .filter_map(|frac| {
            let e = frac * radius;
            let numeric = abel_forward_numeric(potential, e, AbelQuadrature::default()).ok()?;
            let s = series.eval(e);
            Some(AbelCheck { e, series: s, numeric, abs_err: (numeric - s).abs() })
        })
        .collect()
}
