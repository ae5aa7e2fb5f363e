//! Independent numerical oracles: orbit integration with period
//! measurement on a Poincaré section, energy bookkeeping, and the
//! end-to-end comparison of predicted against measured period functions.

mod ode;

use serde::Serialize;
use thiserror::Error;

use crate::field::PlanarField;
use crate::normal_form::NormalFormResult;
use crate::period::PeriodSeries;
use crate::potential::{abel_forward_numeric, AbelQuadrature, PotentialError, PotentialResult};
use crate::series::TruncatedSeries;
use ode::{dp5_step, DenseSegment};

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("initial point must be a nonzero point of the period annulus")]
    NotInAnnulus,
    #[error("orbit not closed within t_max = {t_max} (not a center or q0 too large)")]
    NotClosed { t_max: f64 },
    #[error("integration step underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("point {0:?} outside the transform trust region (radius {1})")]
    OutsideTransformRegion([f64; 2], f64),
    #[error("no bracket for energy {e} on the section ray")]
    NoEnergyBracket { e: f64 },
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

/// Integration and section-detection settings.
#[derive(Debug, Clone, Copy)]
pub struct MeasureConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Budget for one closure, in units of the linear period `2 pi / omega`
    /// when known; used as an absolute time otherwise.
    pub t_max: f64,
    pub max_steps: usize,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, t_max: 10.0 * 2.0 * std::f64::consts::PI, max_steps: 2_000_000 }
    }
}

/// A measured closed orbit.
#[derive(Debug, Clone)]
pub struct Orbit {
    /// Accepted integration states `(t, x, y)`.
    pub samples: Vec<(f64, f64, f64)>,
    pub period: f64,
    /// `|endpoint - startpoint|` after one full revolution.
    pub closure_defect: f64,
}

/// Measures the first-return time to the ray through `q0`, using sign
/// changes of the section function `s(q) = q0 x q` (two crossings of the
/// full line make one revolution), refined by bisection on the dense
/// output plus one Newton step.
pub fn measure_period(
    field: &PlanarField,
    q0: [f64; 2],
    cfg: &MeasureConfig,
) -> Result<Orbit, VerifyError> {
    let r0 = (q0[0] * q0[0] + q0[1] * q0[1]).sqrt();
    if r0 < 1e-12 {
        return Err(VerifyError::NotInAnnulus);
    }
    let rhs = |_t: f64, y: [f64; 2]| field.evaluate(y);
    let section = |q: [f64; 2]| q0[0] * q[1] - q0[1] * q[0];

    let speed0 = {
        let v = field.evaluate(q0);
        (v[0] * v[0] + v[1] * v[1]).sqrt()
    };
    if speed0 == 0.0 {
        return Err(VerifyError::NotInAnnulus);
    }

    let mut t = 0.0;
    let mut y = q0;
    let mut k1 = rhs(t, y);
    let mut h = (0.01 * r0 / speed0).min(cfg.t_max / 10.0);
    let h_floor = 1e-14 * cfg.t_max;

    let mut samples = vec![(t, y[0], y[1])];
    let mut prev_s: Option<f64> = None;
    let mut crossings = 0u32;

    for _ in 0..cfg.max_steps {
        if t > cfg.t_max {
            return Err(VerifyError::NotClosed { t_max: cfg.t_max });
        }
        if h.abs() < h_floor {
            return Err(VerifyError::StepUnderflow { t });
        }
        let step = dp5_step(&rhs, t, y, k1, h, cfg.rtol, cfg.atol);
        if step.err_norm > 1.0 {
            h *= (0.9 * step.err_norm.powf(-0.2)).max(0.2);
            continue;
        }
        let t_new = t + h;
        let s_new = section(step.y);
        if let Some(s_prev) = prev_s {
            if s_prev * s_new < 0.0 || (s_new == 0.0 && s_prev != 0.0) {
                crossings += 1;
                if crossings == 2 {
                    let t_star = refine_crossing(&step.dense, &section, field, q0);
                    let q_star = {
                        let theta = (t_star - step.dense.t0) / step.dense.h;
                        step.dense.eval(theta)
                    };
                    // first return must land on the q0 side of the line
                    if q_star[0] * q0[0] + q_star[1] * q0[1] > 0.0 {
                        let closure = ((q_star[0] - q0[0]).powi(2) + (q_star[1] - q0[1]).powi(2))
                            .sqrt();
                        samples.push((t_star, q_star[0], q_star[1]));
                        return Ok(Orbit { samples, period: t_star, closure_defect: closure });
                    }
                    // tangency artifact: keep counting
                    crossings -= 1;
                }
            }
        }
        prev_s = Some(s_new);
        t = t_new;
        y = step.y;
        k1 = step.k_end;
        samples.push((t, y[0], y[1]));
        let grow = if step.err_norm > 0.0 { (0.9 * step.err_norm.powf(-0.2)).min(5.0) } else { 5.0 };
        h *= grow.max(0.2);
        h = h.min(cfg.t_max - t + 1e-9).max(h_floor);
    }
    Err(VerifyError::NotClosed { t_max: cfg.t_max })
}

/// Bisection on the dense output, then one Newton step using the exact
/// field derivative of the section function.
fn refine_crossing<S: Fn([f64; 2]) -> f64>(
    seg: &DenseSegment,
    section: &S,
    field: &PlanarField,
    q0: [f64; 2],
) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let s_lo = section(seg.eval(lo));
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        let s_mid = section(seg.eval(mid));
        if (s_mid > 0.0) == (s_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut theta = 0.5 * (lo + hi);
    // Newton: ds/dt = q0 x X(q(t))
    let q = seg.eval(theta);
    let v = field.evaluate(q);
    let ds = (q0[0] * v[1] - q0[1] * v[0]) * seg.h;
    if ds != 0.0 {
        let corr = section(q) / ds;
        if corr.is_finite() && corr.abs() < 0.5 {
            theta -= corr;
        }
    }
    seg.t_at(theta.clamp(0.0, 1.0))
}

/// Hamiltonian energy `y^2/2 + V(x)` through the even series, with the
/// validity gate on `|x|`.
pub fn energy_of(potential: &PotentialResult, q: [f64; 2]) -> Result<f64, VerifyError> {
    Ok(q[1] * q[1] / 2.0 + potential.eval_checked(q[0])?)
}

/// Energy label of an orbit of the original field: `F(xi^2 + eta^2)` at
/// the transformed point.
pub fn energy_of_x(
    nf: &NormalFormResult,
    energy_profile: &TruncatedSeries,
    q: [f64; 2],
) -> Result<f64, VerifyError> {
    let radius = nf.transform_trust_radius();
    if (q[0] * q[0] + q[1] * q[1]).sqrt() > radius {
        return Err(VerifyError::OutsideTransformRegion(q, radius));
    }
    let [xi, eta] = nf.apply_transform(q);
    Ok(energy_profile.eval(xi * xi + eta * eta))
}

/// Positive turning point `x_E = phi(sqrt(E))` with `V(x_E) = E`.
pub fn inverse_amplitude(potential: &PotentialResult, e: f64) -> Result<f64, VerifyError> {
    let radius = potential.radius_e.unwrap_or(f64::INFINITY);
    if e < 0.0 || e >= radius {
        return Err(VerifyError::Potential(PotentialError::OutsideTrustRegion { e, radius }));
    }
    Ok(potential.phi.eval(e.sqrt()))
}

/// Energy grid specification.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridSpec {
    pub e_min: f64,
    pub e_max: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn energies(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.e_min];
        }
        let step = (self.e_max - self.e_min) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.e_min + step * i as f64).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RowStatus {
    #[serde(rename = "ok")]
    Ok,
    #[serde(rename = "out-of-region")]
    OutOfRegion,
    #[serde(rename = "error")]
    Error,
}

/// One grid row of the verification table.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "T_series")]
    pub t_series: f64,
    #[serde(rename = "T_measured_Y")]
    pub t_measured_y: Option<f64>,
    #[serde(rename = "T_measured_X")]
    pub t_measured_x: Option<f64>,
    pub rel_err_y: Option<f64>,
    pub rel_err_x: Option<f64>,
    pub status: RowStatus,
    pub note: Option<String>,
}

/// Grid of energies with predicted and measured periods.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub rows: Vec<ReportRow>,
    pub max_rel_err_y: f64,
    pub max_rel_err_x: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerificationReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("E,T_series,T_measured_Y,T_measured_X,rel_err_Y,rel_err_X\n");
        let fmt = |v: Option<f64>| v.map_or(String::from(""), |x| format!("{x:.16e}"));
        for row in &self.rows {
            out.push_str(&format!(
                "{:.16e},{:.16e},{},{},{},{}\n",
                row.e,
                row.t_series,
                fmt(row.t_measured_y),
                fmt(row.t_measured_x),
                fmt(row.rel_err_y),
                fmt(row.rel_err_x),
            ));
        }
        out
    }
}

/// Inputs for assembling a verification report.
pub struct ComparisonInputs<'a> {
    pub x_field: &'a PlanarField,
    pub nf: &'a NormalFormResult,
    pub energy_profile: &'a TruncatedSeries,
    pub period: &'a PeriodSeries,
    pub potential: &'a PotentialResult,
}

/// Settings for the comparison harness.
#[derive(Debug, Clone, Copy)]
pub struct CompareConfig {
    pub measure: MeasureConfig,
    /// Relative-error threshold for the pass verdict.
    pub tolerance: f64,
    /// Bisection tolerance (in energy) when seeding X-orbits.
    pub energy_tol: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { measure: MeasureConfig::default(), tolerance: 1e-5, energy_tol: 1e-10 }
    }
}

/// For each grid energy: the series prediction, the measured period of the
/// constructed potential system seeded at the turning point, and the
/// measured period of the original field seeded at a section point with
/// matching normal-form energy. Rows record their own failures; the
/// report is always produced.
pub fn compare_period_functions(
    inputs: &ComparisonInputs,
    grid: &GridSpec,
    cfg: &CompareConfig,
) -> VerificationReport {
    let y_field = inputs.potential.hamiltonian_field();
    let omega = inputs.nf.omega;
    let mut measure = cfg.measure;
    measure.t_max = measure.t_max.max(10.0 * 2.0 * std::f64::consts::PI / omega);
    let in_region = |e: f64| {
        inputs.potential.radius_e.is_none_or(|r| e < r)
            && inputs.period.e_max.is_none_or(|r| e < r)
    };

    let mut rows = Vec::new();
    for e in grid.energies() {
        let t_series = inputs.period.t.eval(e);
        let mut row = ReportRow {
            e,
            t_series,
            t_measured_y: None,
            t_measured_x: None,
            rel_err_y: None,
            rel_err_x: None,
            status: if in_region(e) { RowStatus::Ok } else { RowStatus::OutOfRegion },
            note: None,
        };

        let note = |row: &mut ReportRow, what: &str, err: &dyn std::fmt::Display| {
            row.status = if row.status == RowStatus::OutOfRegion {
                RowStatus::OutOfRegion
            } else {
                RowStatus::Error
            };
            let msg = format!("{what}: {err}");
            row.note = Some(match row.note.take() {
                Some(prev) => format!("{prev}; {msg}"),
                None => msg,
            });
        };

        match y_field.as_ref() {
            Ok(yf) => {
                match inverse_amplitude(inputs.potential, e)
                    .and_then(|x_e| measure_period(yf, [x_e, 0.0], &measure))
                {
                    Ok(orbit) => {
                        row.t_measured_y = Some(orbit.period);
                        row.rel_err_y = Some((orbit.period - t_series).abs() / t_series.abs());
                    }
                    Err(err) => note(&mut row, "measured_Y", &err),
                }
            }
            Err(err) => note(&mut row, "potential field", err),
        }

        match seed_on_ray(inputs, e, cfg.energy_tol)
            .and_then(|q0| measure_period(inputs.x_field, q0, &measure))
        {
            Ok(orbit) => {
                row.t_measured_x = Some(orbit.period);
                row.rel_err_x = Some((orbit.period - t_series).abs() / t_series.abs());
            }
            Err(err) => note(&mut row, "measured_X", &err),
        }

        rows.push(row);
    }

    let fold_max = |sel: fn(&ReportRow) -> Option<f64>| {
        rows.iter()
            .filter(|r| r.status == RowStatus::Ok)
            .filter_map(sel)
            .fold(0.0f64, f64::max)
    };
    let max_rel_err_y = fold_max(|r| r.rel_err_y);
    let max_rel_err_x = fold_max(|r| r.rel_err_x);
    // out-of-region rows are informational; the verdict needs at least one
    // verified row and no in-region failures
    let any_ok = rows.iter().any(|r| r.status == RowStatus::Ok);
    let pass = any_ok
        && rows
            .iter()
            .filter(|r| r.status != RowStatus::OutOfRegion)
            .all(|r| {
                r.status == RowStatus::Ok
                    && r.rel_err_y.is_some_and(|v| v <= cfg.tolerance)
                    && r.rel_err_x.is_some_and(|v| v <= cfg.tolerance)
            });
    VerificationReport { rows, max_rel_err_y, max_rel_err_x, tolerance: cfg.tolerance, pass }
}

/// Finds `r > 0` with `energy_of_x((r, 0)) = e` by bracketing + bisection.
fn seed_on_ray(inputs: &ComparisonInputs, e: f64, energy_tol: f64) -> Result<[f64; 2], VerifyError> {
    let trust = inputs.nf.transform_trust_radius();
    let label = |r: f64| energy_of_x(inputs.nf, inputs.energy_profile, [r, 0.0]);
    let mut hi = 1e-3_f64.min(trust);
    let mut e_hi = label(hi)?;
    let mut guard = 0;
    while e_hi < e {
        if hi >= trust || guard > 200 {
            return Err(VerifyError::NoEnergyBracket { e });
        }
        hi = (hi * 2.0).min(trust);
        e_hi = label(hi)?;
        guard += 1;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let e_mid = label(mid)?;
        if (e_mid - e).abs() <= energy_tol {
            return Ok([mid, 0.0]);
        }
        if e_mid < e {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok([0.5 * (lo + hi), 0.0])
}

/// Cross-check of the two independent period oracles on one energy:
/// the ODE measurement against the Abel quadrature.
pub fn quadrature_ode_cross_check(
    potential: &PotentialResult,
    e: f64,
    measure: &MeasureConfig,
) -> Result<(f64, f64), VerifyError> {
    let field = potential.hamiltonian_field()?;
    let x_e = inverse_amplitude(potential, e)?;
    let orbit = measure_period(&field, [x_e, 0.0], measure)?;
    let abel = abel_forward_numeric(potential, e, AbelQuadrature::default())?;
    Ok((orbit.period, abel))
}
