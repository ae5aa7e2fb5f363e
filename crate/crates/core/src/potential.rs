//! From the inverse energy profile to an even potential.
//!
//! The chain: rescale `a_n -> b_n` through the gamma-ratio factor
//! `b_n = n sqrt(2 pi) Gamma(n) / (4 Gamma(n + 1/2)) a_n`, assemble the odd
//! series `phi(z) = sum b_n z^{2n-1}`, revert it within the odd class and
//! square: `V = [phi^{-1}]^2` is even with `V(0) = V'(0) = 0` and
//! `V''(0) = 2/b_1^2 > 0`. The forward Abel map sends the potential back to
//! the period function, both as an exact coefficient identity and as a
//! quadrature on the half-circle substitution.

use serde::Serialize;
use thiserror::Error;

use crate::field::{BivariatePoly, FieldError, PlanarField};
use crate::quadrature;
use crate::series::{Parity, ParitySeries, SeriesError, TruncatedSeries};

const SQRT_PI: f64 = 1.772453850905516;
const SQRT_2PI: f64 = 2.506628274631001;

#[derive(Debug, Error)]
pub enum PotentialError {
    #[error("leading inverse-profile coefficient must be positive (a1 = {0})")]
    NonPositiveA1(f64),
    #[error("phi not invertible: phi'(0) = {0} must be positive")]
    NonPositiveB1(f64),
    #[error("energy {e} outside trust region (radius {radius})")]
    OutsideTrustRegion { e: f64, radius: f64 },
    #[error("point {x} outside potential validity radius {radius}")]
    OutsideRadius { x: f64, radius: f64 },
    #[error("potential must have positive curvature at 0 (v1 = {0})")]
    NonPositiveCurvature(f64),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Table of `r_n = Gamma(n + 1/2) / Gamma(n)`, built by the stable
/// recurrence `r_{n+1} = r_n (n + 1/2) / n` from `r_1 = sqrt(pi)/2`.
#[derive(Debug, Clone)]
pub struct GammaRatioTable {
    ratios: Vec<f64>,
}

impl GammaRatioTable {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut ratios = Vec::with_capacity(n);
        ratios.push(SQRT_PI / 2.0);
        for k in 1..n {
            let kf = k as f64;
            ratios.push(ratios[k - 1] * (kf + 0.5) / kf);
        }
        Self { ratios }
    }

    /// `r_n` for `n >= 1`.
    pub fn ratio(&self, n: usize) -> f64 {
        self.ratios[n - 1]
    }

    pub fn ratios(&self) -> &[f64] {
        &self.ratios
    }
}

/// `b_n = n sqrt(2 pi) / (4 r_n) a_n`.
pub fn ab_transform(a: &[f64]) -> Result<Vec<f64>, PotentialError> {
    if a.is_empty() || a[0] <= 0.0 {
        return Err(PotentialError::NonPositiveA1(a.first().copied().unwrap_or(0.0)));
    }
    let table = GammaRatioTable::new(a.len());
    Ok(a.iter()
        .enumerate()
        .map(|(k, an)| (k + 1) as f64 * SQRT_2PI / (4.0 * table.ratio(k + 1)) * an)
        .collect())
}

/// The odd series `phi(z) = sum b_n z^{2n-1}` with `phi'(0) = b_1 > 0`.
pub fn phi_from_b(b: &[f64]) -> Result<ParitySeries, PotentialError> {
    if b.is_empty() || b[0] <= 0.0 {
        return Err(PotentialError::NonPositiveB1(b.first().copied().unwrap_or(0.0)));
    }
    Ok(ParitySeries::odd(b)?)
}

/// Even potential with its intermediates and diagnostics.
#[derive(Debug, Clone)]
pub struct PotentialResult {
    /// Gamma-transformed coefficients `b_1..b_N`.
    pub b: Vec<f64>,
    /// `phi(z) = sum b_n z^{2n-1}`; the inverse branch of `V` is
    /// `V^{-1}(E) = phi(sqrt(E))`.
    pub phi: ParitySeries,
    /// `phi^{-1}`, the odd square root of `V`.
    pub phi_inv: ParitySeries,
    /// The even potential `V(x) = sum v_k x^{2k}`.
    pub v: ParitySeries,
    /// `V''(0) = 2/b_1^2`.
    pub vpp0: f64,
    /// Heuristic validity radius in energy (`None` = no growth to bound).
    pub radius_e: Option<f64>,
    /// Heuristic validity radius in `x` for evaluating `V`.
    pub radius_x: Option<f64>,
    /// Largest wrong-parity coefficient seen while reverting `phi`.
    pub parity_defect: f64,
    /// Residual of the closing identity `abel_forward_series(b) == T`,
    /// filled in by the pipeline when the period series is at hand.
    pub central_residual: Option<f64>,
}

/// Reverts `phi` in the odd class and squares, packaging `V = [phi^{-1}]^2`.
pub fn build_potential(phi: &ParitySeries) -> Result<PotentialResult, PotentialError> {
    let b = phi.compact().to_vec();
    if b[0] <= 0.0 {
        return Err(PotentialError::NonPositiveB1(b[0]));
    }
    let (phi_inv, parity_defect) = phi.revert_odd()?;
    let v = phi_inv.square();
    finish_potential(b, phi.clone(), phi_inv, v, parity_defect)
}

/// Builds the record from a given even potential (positive curvature at 0),
/// deriving `phi` by inverting its odd square root.
pub fn from_even_potential(v: &ParitySeries) -> Result<PotentialResult, PotentialError> {
    assert_eq!(v.parity(), Parity::Even, "potential must be an even series");
    let g = v.compact();
    if g[0] <= 0.0 {
        return Err(PotentialError::NonPositiveCurvature(g[0]));
    }
    // V = x^2 g(x^2) with g(0) > 0: the odd square root is x sqrt(g(x^2)).
    let scaled = TruncatedSeries::new(g.iter().map(|c| c / g[0] ).collect())?;
    let mut h = scaled.coeffs().to_vec();
    h[0] = 0.0;
    let root = TruncatedSeries::new(h)?.sqrt1p()?.scale(g[0].sqrt());
    let phi_inv = ParitySeries::odd(root.coeffs())?;
    let (phi, parity_defect) = phi_inv.revert_odd()?;
    let b = phi.compact().to_vec();
    if b[0] <= 0.0 {
        return Err(PotentialError::NonPositiveB1(b[0]));
    }
    finish_potential(b, phi, phi_inv, v.clone(), parity_defect)
}

fn finish_potential(
    b: Vec<f64>,
    phi: ParitySeries,
    phi_inv: ParitySeries,
    v: ParitySeries,
    parity_defect: f64,
) -> Result<PotentialResult, PotentialError> {
    let vpp0 = 2.0 / (b[0] * b[0]);
    let radius_x = phi_inv.to_series().trust_radius();
    // Energy conversions: phi converges for sqrt(E) < R_z, and the x-radius
    // maps to energy through the quadratic part E ~ v1 x^2.
    let v1 = v.compact()[0];
    let from_phi = phi.to_series().trust_radius().map(|r| r * r);
    let from_x = radius_x.map(|r| v1 * r * r);
    let radius_e = match (from_phi, from_x) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (r, None) | (None, r) => r,
    };
    Ok(PotentialResult {
        b,
        phi,
        phi_inv,
        v,
        vpp0,
        radius_e,
        radius_x,
        parity_defect,
        central_residual: None,
    })
}

impl PotentialResult {
    /// The potential system `xdot = y, ydot = -V'(x)` as a planar field.
    pub fn hamiltonian_field(&self) -> Result<PlanarField, PotentialError> {
        let p = BivariatePoly::monomial(0, 1, 1.0);
        let mut q = BivariatePoly::zero();
        for (k, vk) in self.v.compact().iter().enumerate() {
            let deg = 2 * (k as u32 + 1);
            q.add_term(deg - 1, 0, -(deg as f64) * vk);
        }
        let degree = q.total_degree().max(1);
        Ok(PlanarField::new(p, q, degree)?)
    }

    /// `V(x)` with the validity gate applied.
    pub fn eval_checked(&self, x: f64) -> Result<f64, PotentialError> {
        if let Some(r) = self.radius_x {
            if x.abs() > r {
                return Err(PotentialError::OutsideRadius { x, radius: r });
            }
        }
        Ok(self.v.eval(x))
    }
}

/// Coefficients of the forward Abel map in closed form:
/// `That_{n-1} = 2 sqrt(2) b_n sqrt(pi) r_n`, which telescopes to
/// `pi n a_n` when `b` came from [`ab_transform`].
pub fn abel_forward_series(b: &[f64]) -> TruncatedSeries {
    if b.is_empty() {
        return TruncatedSeries::zero(0).with_var("E");
    }
    let table = GammaRatioTable::new(b.len());
    let coeffs: Vec<f64> = b
        .iter()
        .enumerate()
        .map(|(k, bn)| 2.0 * std::f64::consts::SQRT_2 * bn * SQRT_PI * table.ratio(k + 1))
        .collect();
    TruncatedSeries::new(coeffs).expect("finite Abel coefficients").with_var("E")
}

/// Settings for the Abel quadrature: Gauss-Legendre after the half-circle
/// substitution, node-doubling until the value settles.
#[derive(Debug, Clone, Copy)]
pub struct AbelQuadrature {
    pub nodes: usize,
    pub tol: f64,
}

impl Default for AbelQuadrature {
    fn default() -> Self {
        Self { nodes: 64, tol: 1e-9 }
    }
}

/// Evaluates the Abel integral `That(E) = 2 sqrt(2) \int_0^E (V^{-1})'(s) /
/// sqrt(E - s) ds` numerically. The substitution `s = E sin^2(theta)`
/// removes both endpoint singularities at once: with `(V^{-1})'(s) =
/// phi'(sqrt(s)) / (2 sqrt(s))` the integrand collapses to the analytic
/// `2 sqrt(2) phi'(sqrt(E) sin(theta))` on `[0, pi/2]`.
pub fn abel_forward_numeric(
    potential: &PotentialResult,
    e: f64,
    quad: AbelQuadrature,
) -> Result<f64, PotentialError> {
    let radius = potential.radius_e.unwrap_or(f64::INFINITY);
    if e <= 0.0 || e >= radius {
        return Err(PotentialError::OutsideTrustRegion { e, radius });
    }
    let sqrt_e = e.sqrt();
    let phi = &potential.phi;
    let integrand = |theta: f64| phi.deriv_eval(sqrt_e * theta.sin());
    let integral = quadrature::integrate_adaptive(
        &integrand,
        0.0,
        std::f64::consts::FRAC_PI_2,
        quad.nodes,
        quad.tol,
    );
    Ok(2.0 * std::f64::consts::SQRT_2 * integral)
}

/// Serialization form of [`PotentialResult`] for the CLI.
#[derive(Debug, Serialize)]
pub struct PotentialJson {
    pub b: Vec<f64>,
    pub phi: Vec<f64>,
    #[serde(rename = "V_even_coeffs")]
    pub v_even_coeffs: Vec<f64>,
    #[serde(rename = "Vpp0")]
    pub vpp0: f64,
    pub radius: Option<f64>,
    pub parity_defect: f64,
    pub central_residual: Option<f64>,
}

impl From<&PotentialResult> for PotentialJson {
    fn from(p: &PotentialResult) -> Self {
        Self {
            b: p.b.clone(),
            phi: p.phi.to_series().coeffs().to_vec(),
            v_even_coeffs: p.v.compact().to_vec(),
            vpp0: p.vpp0,
            radius: p.radius_e,
            parity_defect: p.parity_defect,
            central_residual: p.central_residual,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn gamma_ratio_values_and_recurrence() {
        let t = GammaRatioTable::new(8);
        assert_abs_diff_eq!(t.ratio(1), 0.886_226_925_452_758, epsilon = 1e-15);
        assert_abs_diff_eq!(t.ratio(2), 1.329_340_388_179_137, epsilon = 1e-14);
        assert_abs_diff_eq!(t.ratio(3), 1.6616754852239212, epsilon = 1e-14);
        for n in 1..7 {
            let nf = n as f64;
            assert_abs_diff_eq!(t.ratio(n + 1), t.ratio(n) * (nf + 0.5) / nf, epsilon = 1e-14);
            assert!(t.ratio(n + 1) > t.ratio(n));
        }
    }

    #[test]
    fn ab_transform_examples() {
        // b1 = sqrt(2)/2 * a1
        let b = ab_transform(&[2.0]).unwrap();
        assert_abs_diff_eq!(b[0], 2.0_f64.sqrt(), epsilon = 1e-14);

        let b = ab_transform(&[2.0, -2.0]).unwrap();
        assert_abs_diff_eq!(b[1], -4.0 * 2.0_f64.sqrt() / 3.0, epsilon = 1e-14);

        let b = ab_transform(&[3.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(b[0], 3.0 * 2.0_f64.sqrt() / 2.0, epsilon = 1e-14);
        assert_eq!(&b[1..], &[0.0, 0.0]);

        assert!(matches!(ab_transform(&[-1.0]), Err(PotentialError::NonPositiveA1(_))));
    }

    #[test]
    fn phi_from_b_examples() {
        let phi = phi_from_b(&[2.0_f64.sqrt(), -4.0 * 2.0_f64.sqrt() / 3.0]).unwrap();
        let full = phi.to_series();
        assert_abs_diff_eq!(full.coeff(1), 2.0_f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(full.coeff(3), -4.0 * 2.0_f64.sqrt() / 3.0, epsilon = 1e-15);

        let phi = phi_from_b(&[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(phi.to_series().coeffs(), &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);

        assert!(matches!(phi_from_b(&[-1.0]), Err(PotentialError::NonPositiveB1(_))));
    }

    #[test]
    fn harmonic_potential_closes_the_linear_center_loop() {
        // phi = sqrt(2) z  =>  phi^{-1} = x/sqrt(2), V = x^2/2
        let phi = phi_from_b(&[2.0_f64.sqrt()]).unwrap();
        let result = build_potential(&phi).unwrap();
        assert_abs_diff_eq!(result.v.compact()[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(result.vpp0, 1.0, epsilon = 1e-14);

        // phi = z  =>  V = x^2
        let result = build_potential(&phi_from_b(&[1.0]).unwrap()).unwrap();
        assert_abs_diff_eq!(result.v.compact()[0], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn abel_series_examples() {
        let t = abel_forward_series(&[2.0_f64.sqrt()]);
        assert_abs_diff_eq!(t.coeff(0), 2.0 * PI, epsilon = 1e-13);

        let b = ab_transform(&[2.0, -2.0]).unwrap();
        let t = abel_forward_series(&b);
        assert_abs_diff_eq!(t.coeff(0), 2.0 * PI, epsilon = 1e-13);
        assert_abs_diff_eq!(t.coeff(1), -4.0 * PI, epsilon = 1e-13);

        assert_eq!(abel_forward_series(&[0.0, 0.0]).coeffs(), &[0.0, 0.0]);
    }

    #[test]
    fn central_identity_on_catalan_sequence() {
        let a = [2.0, -2.0, 4.0, -10.0, 28.0];
        let b = ab_transform(&a).unwrap();
        let lhs = abel_forward_series(&b);
        let rhs = crate::period::period_series(&a).unwrap();
        assert!(lhs.max_scaled_diff(&rhs) < 1e-12);
    }

    #[test]
    fn abel_numeric_on_harmonic_is_two_pi() {
        let result = build_potential(&phi_from_b(&[2.0_f64.sqrt(), 0.0, 0.0]).unwrap()).unwrap();
        let t = abel_forward_numeric(&result, 0.1, AbelQuadrature::default()).unwrap();
        assert_abs_diff_eq!(t, 2.0 * PI, epsilon = 1e-8);
    }

    #[test]
    fn abel_numeric_matches_closed_form_for_f_one_plus_z() {
        // a_n = 2 (-1)^{n+1} Catalan(n-1); T(E) = 2 pi (1+4E)^{-1/2}
        let mut a = vec![0.0; 12];
        let mut cat: f64 = 1.0;
        for n in 1..=12 {
            a[n - 1] = 2.0 * if n % 2 == 1 { cat } else { -cat };
            cat = cat * 2.0 * (2.0 * n as f64 - 1.0) / (n as f64 + 1.0);
        }
        let b = ab_transform(&a).unwrap();
        let result = build_potential(&phi_from_b(&b).unwrap()).unwrap();
        let e = 0.05;
        let t = abel_forward_numeric(&result, e, AbelQuadrature::default()).unwrap();
        assert_abs_diff_eq!(t, 2.0 * PI / (1.0 + 4.0 * e).sqrt(), epsilon = 2e-6);

        // E -> 0+ limit recovers T(0) = 2 pi / f(0) = 2 pi
        let t0 = abel_forward_numeric(&result, 1e-10, AbelQuadrature::default()).unwrap();
        assert_abs_diff_eq!(t0, 2.0 * PI, epsilon = 1e-7);

        // outside the trust region the gate trips
        let radius = result.radius_e.unwrap();
        assert!(abel_forward_numeric(&result, radius * 2.0, AbelQuadrature::default()).is_err());
    }

    #[test]
    fn curvature_and_growth_invariants() {
        let a = [2.5, -1.0, 0.7, 0.3];
        let b = ab_transform(&a).unwrap();
        let result = build_potential(&phi_from_b(&b).unwrap()).unwrap();
        assert_abs_diff_eq!(result.vpp0 * b[0] * b[0], 2.0, epsilon = 1e-12);

        // |b_n| <= n M |a_n| with M = max_n sqrt(2 pi)/(4 r_n) = sqrt(2)/2
        let m = 2.0_f64.sqrt() / 2.0;
        for (k, bn) in b.iter().enumerate() {
            assert!(bn.abs() <= (k + 1) as f64 * m * a[k].abs() + 1e-15);
        }
    }

    #[test]
    fn from_even_potential_round_trips_duffing() {
        let mut coeffs = vec![0.0; 12];
        coeffs[0] = 0.5;
        coeffs[1] = 0.25;
        let v = ParitySeries::even(&coeffs).unwrap();
        let result = from_even_potential(&v).unwrap();
        assert_abs_diff_eq!(result.vpp0, 1.0, epsilon = 1e-12);
        // phi(sqrt(E)) is the positive turning point: V(phi(sqrt(E))) = E
        let e = 0.05_f64;
        let x = result.phi.eval(e.sqrt());
        assert_abs_diff_eq!(x * x / 2.0 + x.powi(4) / 4.0, e, epsilon = 1e-10);
        // hamiltonian field expands to P = y, Q = -x - x^3
        let f = result.hamiltonian_field().unwrap();
        assert_eq!(f.q().to_triples(), vec![(1, 0, -1.0), (3, 0, -1.0)]);
    }
}
