//! Orbital normal form of a non-degenerate center.
//!
//! A field with center-type linear part is conjugated, degree by degree, to
//! `f(xi^2 + eta^2) (eta d/dxi - xi d/deta)`. In the complex coordinate
//! `z = xi + i eta` the equation reads `zdot = -i omega z + h.o.t.`; the
//! homological equation at degree `m` removes every monomial `z^j zbar^k`
//! except the resonant `z^{k+1} zbar^k`. The real parts of the resonant
//! coefficients are the radial residuals (Lyapunov-type quantities, zero
//! exactly when the origin is a center); the imaginary parts assemble the
//! angular profile `f`. Generators carry no resonant component (minimal
//! normalization), which makes the transform unique and idempotent.

mod cpoly;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::field::{BivariatePoly, FieldError, LinearPartInfo, PlanarField};
use crate::series::TruncatedSeries;
use cpoly::CPoly;

/// Coefficient magnitudes beyond this abort the normalization.
const OVERFLOW_GUARD: f64 = 1e12;

#[derive(Debug, Error)]
pub enum NormalFormError {
    #[error(transparent)]
    Linear(#[from] FieldError),
    #[error("field is not in rotation-linear-part form")]
    NotRotationForm,
    #[error("normal form diverged at order {degree} (coefficient magnitude {magnitude:.3e})")]
    Diverged { degree: usize, magnitude: f64 },
    #[error("field not certified as center (first nonzero radial residual at order {order})")]
    NotCertifiedCenter { order: usize },
    #[error("linear normalization failed: {0}")]
    Degenerate(&'static str),
}

/// Verdict of the radial-residual scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NormalFormVerdict {
    #[serde(rename = "center")]
    Center,
    /// First residual above tolerance sits at this polynomial degree.
    #[serde(rename = "not-a-center-to-order")]
    NotCenterToOrder(usize),
}

/// Linear change `(xi, eta) = map (x, y)` bringing the linear part to
/// `omega (eta, -xi)`, unimodular up to the optional orientation flip.
#[derive(Debug, Clone, Copy)]
pub struct LinearNormalization {
    pub map: [[f64; 2]; 2],
    pub omega: f64,
    pub reflected: bool,
}

impl LinearNormalization {
    pub fn identity(omega: f64) -> Self {
        Self { map: [[1.0, 0.0], [0.0, 1.0]], omega, reflected: false }
    }
}

#[derive(Debug, Clone)]
pub struct NormalFormResult {
    /// `f(0) = omega > 0`, the rotation frequency.
    pub omega: f64,
    /// Angular profile `f` as a series in `rho = xi^2 + eta^2`.
    pub f_coeffs: TruncatedSeries,
    /// Normal-form coordinates as polynomials in the original ones:
    /// `(xi(x,y), eta(x,y))`, linear normalization included.
    pub transform: (BivariatePoly, BivariatePoly),
    /// Radial residuals `g_3, g_5, ...` (one per odd degree).
    pub radial_residuals: Vec<f64>,
    /// Order of `f_coeffs` as a series in `rho`.
    pub order: usize,
    /// Polynomial degree through which the field was normalized.
    pub degree: usize,
    /// Largest non-resonant coefficient left after normalization.
    pub normalization_dust: f64,
    pub verdict: NormalFormVerdict,
    pub linear: LinearNormalization,
    /// True when the radial coordinate was reparameterized so the energy
    /// label `F(xi^2 + eta^2)` equals the Hamiltonian of the input field.
    pub label_corrected: bool,
}

impl NormalFormResult {
    /// Applies the truncated transform at a point.
    pub fn apply_transform(&self, q: [f64; 2]) -> [f64; 2] {
        [self.transform.0.eval(q[0], q[1]), self.transform.1.eval(q[0], q[1])]
    }

    /// Heuristic radius inside which the nonlinear part of the transform
    /// stays below half the linear part. Infinite for a linear transform.
    pub fn transform_trust_radius(&self) -> f64 {
        let lin = self.linear.map;
        let lin_scale = (lin[0][0].hypot(lin[0][1])).min(lin[1][0].hypot(lin[1][1])).max(1e-300);
        let mut radius = f64::INFINITY;
        for poly in [&self.transform.0, &self.transform.1] {
            let mut by_degree = std::collections::BTreeMap::new();
            for (i, j, c) in poly.terms() {
                let d = (i + j) as usize;
                if d >= 2 {
                    *by_degree.entry(d).or_insert(0.0f64) += c.abs();
                }
            }
            for (d, sum) in by_degree {
                radius = radius.min((0.5 * lin_scale / sum).powf(1.0 / (d as f64 - 1.0)));
            }
        }
        radius
    }
}

/// `extract_f`: the angular factor of the normal form, available only when
/// every computed radial residual is below tolerance.
pub fn extract_f(result: &NormalFormResult) -> Result<TruncatedSeries, NormalFormError> {
    match result.verdict {
        NormalFormVerdict::Center => Ok(result.f_coeffs.clone()),
        NormalFormVerdict::NotCenterToOrder(order) => {
            Err(NormalFormError::NotCertifiedCenter { order })
        }
    }
}

/// Brings a center-type linear part to exactly `omega (eta, -xi)` by a
/// unimodular linear change (plus an orientation flip `(x, y) -> (x, -y)`
/// for fields rotating counterclockwise). Trace dust within the linear
/// tolerance is projected out.
pub fn linearize_to_rotation(
    field: &PlanarField,
    info: &LinearPartInfo,
) -> Result<(PlanarField, LinearNormalization), NormalFormError> {
    let jac = info.jacobian;
    let mu = info.trace / 2.0;
    let alpha = (jac[0][0] - jac[1][1]) / 2.0;
    let b = jac[0][1];
    let c = jac[1][0];

    let (work_field, b, c, reflected) = if b < 0.0 {
        (reflect_y(field)?, -b, -c, true)
    } else if b > 0.0 {
        (field.clone(), b, c, false)
    } else {
        // det > 0 forces bc < -alpha^2 <= 0, so b = 0 cannot happen
        return Err(NormalFormError::Degenerate("vanishing off-diagonal entry"));
    };

    let det = -alpha * alpha - b * c;
    if det <= 0.0 {
        return Err(NormalFormError::Degenerate("trace-free part has no rotation"));
    }
    let omega = det.sqrt();
    let s = (b * omega).sqrt();
    // (x, y) = S (xi, eta) with S = [[b, 0], [-alpha, omega]] / s, det S = 1
    let fwd = [[b / s, 0.0], [-alpha / s, omega / s]];
    let inv = [[omega / s, 0.0], [alpha / s, b / s]];

    let p_sub = work_field.p().substitute_linear(&fwd);
    let q_sub = work_field.q().substitute_linear(&fwd);
    let mut p_rot = p_sub.scale(inv[0][0]).add(&q_sub.scale(inv[0][1]));
    let mut q_rot = p_sub.scale(inv[1][0]).add(&q_sub.scale(inv[1][1]));

    // The trace projection and rounding leave O(tau_lin) dust on the
    // linear terms; pin them to the exact rotation.
    let dust = (p_rot.coeff(1, 0))
        .abs()
        .max((p_rot.coeff(0, 1) - omega).abs())
        .max((q_rot.coeff(1, 0) + omega).abs())
        .max((q_rot.coeff(0, 1)).abs());
    if dust > 1e-6 * omega.max(1.0) + mu.abs() * 2.0 {
        return Err(NormalFormError::Degenerate("linear normalization dust too large"));
    }
    for (poly, target) in [(&mut p_rot, [(1u32, 0u32, 0.0), (0, 1, omega)]),
                           (&mut q_rot, [(1, 0, -omega), (0, 1, 0.0)])]
    {
        for (i, j, value) in target {
            let old = poly.coeff(i, j);
            poly.add_term(i, j, value - old);
        }
    }

    let rotated = PlanarField::new(p_rot, q_rot, work_field.degree())?;
    let map = if reflected {
        // compose with (x, y) -> (x, -y)
        [[inv[0][0], -inv[0][1]], [inv[1][0], -inv[1][1]]]
    } else {
        inv
    };
    Ok((rotated, LinearNormalization { map, omega, reflected }))
}

/// Conjugation of the field by `(x, y) -> (x, -y)`.
fn reflect_y(field: &PlanarField) -> Result<PlanarField, NormalFormError> {
    let flip = |poly: &BivariatePoly, negate: bool| {
        let mut out = BivariatePoly::zero();
        for (i, j, c) in poly.terms() {
            let sign = if (j % 2 == 1) != negate { -1.0 } else { 1.0 };
            out.add_term(i, j, sign * c);
        }
        out
    };
    Ok(PlanarField::new(flip(field.p(), false), flip(field.q(), true), field.degree())?)
}

/// Degree-by-degree normal form of a field already in rotation form:
/// normalizes polynomial degrees `2..=order+1` and returns the profile,
/// residuals and near-identity transform (composed with the recorded
/// linear normalization).
pub fn poincare_normal_form(
    field: &PlanarField,
    order: usize,
    tau_center: f64,
) -> Result<NormalFormResult, NormalFormError> {
    let omega = rotation_frequency(field)?;
    let mut nf = nf_core(field, LinearNormalization::identity(omega), order, tau_center)?;
    align_label_with_hamiltonian(field, &mut nf);
    Ok(nf)
}

/// Full chain: linear-part classification, linear normalization, then the
/// degree-by-degree procedure. For exactly divergence-free inputs the
/// radial coordinate is reparameterized afterwards so the energy label
/// agrees with the field's Hamiltonian (see
/// [`align_label_with_hamiltonian`]).
pub fn orbital_normal_form(
    field: &PlanarField,
    order: usize,
    tau_lin: f64,
    tau_center: f64,
) -> Result<NormalFormResult, NormalFormError> {
    let info = field.linear_part(tau_lin)?;
    let (rotated, lin) = linearize_to_rotation(field, &info)?;
    let mut nf = nf_core(&rotated, lin, order, tau_center)?;
    align_label_with_hamiltonian(field, &mut nf);
    Ok(nf)
}

fn rotation_frequency(field: &PlanarField) -> Result<f64, NormalFormError> {
    let omega = field.p().coeff(0, 1);
    let ok = omega > 0.0
        && field.p().coeff(1, 0).abs() <= 1e-9 * omega
        && (field.q().coeff(1, 0) + omega).abs() <= 1e-9 * omega
        && field.q().coeff(0, 1).abs() <= 1e-9 * omega;
    if ok {
        Ok(omega)
    } else {
        Err(NormalFormError::NotRotationForm)
    }
}

fn nf_core(
    rotated: &PlanarField,
    lin: LinearNormalization,
    order: usize,
    tau_center: f64,
) -> Result<NormalFormResult, NormalFormError> {
    assert!(order >= 1);
    let m_max = order + 1;
    let omega = lin.omega;

    let mut a = complexify(rotated, m_max);
    // Exact rotation linear part in z: zdot = -i omega z.
    a.set(1, 0, Complex64::new(0.0, -omega));
    a.set(0, 1, Complex64::ZERO);

    // Old complex coordinate as a function of the current one.
    let mut old_in_new = CPoly::identity(m_max);

    let mut residuals = Vec::new();
    let mut f_tail = Vec::new();

    for m in 2..=m_max {
        let g = a.homogeneous(m);
        if m % 2 == 1 {
            let k = (m - 1) / 2;
            let alpha = g.get(k + 1, k);
            residuals.push(alpha.re);
            // normalize -0.0 so serialized profiles stay tidy
            f_tail.push(if alpha.im == 0.0 { 0.0 } else { -alpha.im });
        }

        // Generator: kill every non-resonant degree-m monomial.
        let mut h = CPoly::zero(m_max);
        let mut h_nonzero = false;
        for (j, k, gc) in g.entries() {
            if j == k + 1 {
                continue;
            }
            let denom = Complex64::new(0.0, omega * (1.0 - j as f64 + k as f64));
            h.set(j, k, gc / denom);
            h_nonzero = true;
        }
        if !h_nonzero {
            continue;
        }

        // z = w + h(w, wbar): substitute and solve
        //   B = A(w + h, wbar + hbar) - h_w B - h_wbar conj(B)
        // by iteration; each pass gains m - 1 degrees, so the count below
        // reaches the truncation exactly.
        let p_in = CPoly::identity(m_max).add(&h);
        let q_in = p_in.conj_fn();
        let a_sub = a.substitute(&p_in, &q_in);
        let h_w = h.d_first();
        let h_wbar = h.d_second();
        let iters = (m_max - m).div_ceil(m - 1) + 1;
        let mut b = a_sub.clone();
        for _ in 0..iters {
            b = a_sub.sub(&h_w.mul(&b)).sub(&h_wbar.mul(&b.conj_fn()));
        }
        a = b;
        old_in_new = old_in_new.substitute(&p_in, &q_in);

        let magnitude = a.max_norm();
        if magnitude > OVERFLOW_GUARD {
            return Err(NormalFormError::Diverged { degree: m, magnitude });
        }
    }

    // Anything non-resonant left is rounding dust from the eliminations.
    let mut dust = 0.0f64;
    for (j, k, c) in a.entries() {
        if j + k >= 2 && j != k + 1 {
            dust = dust.max(c.norm());
        }
    }

    let verdict = match residuals.iter().position(|g| g.abs() > tau_center) {
        Some(k) => NormalFormVerdict::NotCenterToOrder(2 * k + 3),
        None => NormalFormVerdict::Center,
    };

    let mut f_coeffs = vec![omega];
    f_coeffs.extend_from_slice(&f_tail);
    let f_series = TruncatedSeries::new(f_coeffs)
        .expect("normal form coefficients are finite")
        .with_var("z");

    // Invert old_in_new = w + eta(w, wbar) to express the normal-form
    // coordinate in terms of the original ones, then substitute the linear
    // normalization written in (x, y).
    let eta = old_in_new.sub(&CPoly::identity(m_max));
    let mut w = CPoly::identity(m_max);
    if !eta.is_zero() {
        let id = CPoly::identity(m_max);
        for _ in 0..m_max.max(2) - 1 {
            w = id.sub(&eta.substitute(&w, &w.conj_fn()));
        }
    }
    let z0 = CPoly::linear(
        Complex64::new(lin.map[0][0], lin.map[1][0]),
        Complex64::new(lin.map[0][1], lin.map[1][1]),
        m_max,
    );
    let w_xy = w.substitute(&z0, &z0.conj_coeffs());
    let mut xi = BivariatePoly::zero();
    let mut eta_poly = BivariatePoly::zero();
    for (i, j, c) in w_xy.entries() {
        xi.add_term(i as u32, j as u32, c.re);
        eta_poly.add_term(i as u32, j as u32, c.im);
    }

    Ok(NormalFormResult {
        omega,
        f_coeffs: f_series,
        transform: (xi, eta_poly),
        radial_residuals: residuals,
        order: f_tail.len(),
        degree: m_max,
        normalization_dust: dust,
        verdict,
        linear: lin,
        label_corrected: false,
    })
}

/// The normal form is unique only up to a radial reparametrization
/// `rho -> lambda(s)` (resonant generator freedom), and the period data
/// depend on the induced energy label `F(xi^2 + eta^2)`. For a Hamiltonian
/// input the label and the Hamiltonian are both conserved, so the label is
/// a function `psi` of the Hamiltonian; this routine solves for `psi` along
/// the positive x-axis and folds the compensating reparametrization into
/// `f` and the transform, after which the label *is* the Hamiltonian.
/// That convention is what makes the potential construction reproduce the
/// potential of a mechanical input exactly.
///
/// Fields that are not exactly divergence-free (no Hamiltonian), or whose
/// Hamiltonian is not positive along the positive x-axis, are left in the
/// plain minimal normalization.
fn align_label_with_hamiltonian(field: &PlanarField, nf: &mut NormalFormResult) {
    use crate::series::kernel;

    if nf.verdict != NormalFormVerdict::Center || nf.order == 0 {
        return;
    }
    // Exact coefficient test: div X = P_x + Q_y = 0.
    if !field.p().partial_x().add(&field.q().partial_y()).is_zero() {
        return;
    }

    let k_ord = nf.order;
    let len = 2 * k_ord + 1; // univariate series in x through x^{2 k_ord}

    // H(x, 0) = -\int_0^x Q(s, 0) ds (H_y = P, H_x = -Q, H(0,0) = 0).
    let mut h_axis = vec![0.0; len];
    for (i, j, c) in field.q().terms() {
        if j == 0 && (i as usize) + 1 < len {
            h_axis[i as usize + 1] = -c / (i as f64 + 1.0);
        }
    }
    let q2 = h_axis.get(2).copied().unwrap_or(0.0);
    if q2 <= 0.0 {
        return;
    }

    // Label along the axis: K(x) = F(xi(x,0)^2 + eta(x,0)^2).
    let axis_poly = |poly: &BivariatePoly| {
        let mut out = vec![0.0; len];
        for (i, j, c) in poly.terms() {
            if j == 0 && (i as usize) < len {
                out[i as usize] = c;
            }
        }
        out
    };
    let xi_axis = axis_poly(&nf.transform.0);
    let eta_axis = axis_poly(&nf.transform.1);
    let rho_axis = kernel::add(
        &kernel::mul_trunc(&xi_axis, &xi_axis, len).0,
        &kernel::mul_trunc(&eta_axis, &eta_axis, len).0,
    );
    let mut f_pad = kernel::antiderivative(nf.f_coeffs.coeffs(), 0.0);
    for c in f_pad.iter_mut() {
        *c *= 0.5;
    }
    f_pad.resize(len, 0.0);
    let k_axis = kernel::compose(&f_pad, &rho_axis).0;

    // Triangular solve of sum_k psi_k H(x)^k = K(x) at the even powers.
    let mut psi = vec![0.0; k_ord + 1];
    let mut h_pow = vec![0.0; len];
    h_pow[0] = 1.0;
    let mut remainder = k_axis;
    for (k, slot) in psi.iter_mut().enumerate().skip(1) {
        h_pow = kernel::mul_trunc(&h_pow, &h_axis, len).0;
        let denom = h_pow[2 * k];
        if denom == 0.0 {
            return;
        }
        *slot = remainder[2 * k] / denom;
        for (r, hp) in remainder.iter_mut().zip(&h_pow) {
            *r -= *slot * hp;
        }
    }
    if (psi[1] - 1.0).abs() > 0.1 {
        return;
    }
    if psi[2..].iter().all(|c| c.abs() < 1e-14) {
        // label already matches the Hamiltonian
        nf.label_corrected = true;
        return;
    }

    // Reparametrization: mu = lambda^{-1}, mu'(rho) = (psi^{-1})'(F(rho)),
    // then f_new = f(lambda(s)) and the radial factor tau = sqrt(mu/rho)
    // composed into the transform keeps everything consistent.
    let psi_inv = kernel::revert(&psi);
    let dpsi_inv = kernel::derivative(&psi_inv); // length k_ord
    let f_short: Vec<f64> = f_pad[..k_ord].to_vec();
    let integrand = kernel::compose(&dpsi_inv, &f_short).0;
    let mu = kernel::antiderivative(&integrand, 0.0); // length k_ord + 1
    let lambda = kernel::revert(&mu);
    let f_new = kernel::compose(nf.f_coeffs.coeffs(), &lambda).0;

    // tau(rho) = sqrt(mu(rho)/rho) = sqrt(mu1) sqrt(1 + mu2/mu1 rho + ...)
    let mu1 = mu[1];
    let mut shifted: Vec<f64> = mu[1..].iter().map(|c| c / mu1).collect();
    shifted[0] = 0.0;
    let tau: Vec<f64> = kernel::sqrt1p(&shifted).iter().map(|c| c * mu1.sqrt()).collect();

    let cap = nf.degree as u32;
    let (xi, eta) = &nf.transform;
    let rho_poly = xi.mul(xi, Some(cap)).add(&eta.mul(eta, Some(cap)));
    let tau_poly = BivariatePoly::apply_univariate(&tau, &rho_poly, cap);
    let xi_new = xi.mul(&tau_poly, Some(cap));
    let eta_new = eta.mul(&tau_poly, Some(cap));

    nf.f_coeffs = TruncatedSeries::new(f_new)
        .expect("label correction produced finite coefficients")
        .with_var("z");
    nf.transform = (xi_new, eta_new);
    nf.label_corrected = true;
}

/// Builds `zdot = P + iQ` in the complexified coordinates
/// `xi = (z + zbar)/2`, `eta = (z - zbar)/(2i)`.
fn complexify(field: &PlanarField, m_max: usize) -> CPoly {
    let mut in_xieta = CPoly::zero(m_max);
    for (i, j, c) in field.p().terms() {
        if (i + j) as usize <= m_max {
            in_xieta.add_at(i as usize, j as usize, Complex64::new(c, 0.0));
        }
    }
    for (i, j, c) in field.q().terms() {
        if (i + j) as usize <= m_max {
            in_xieta.add_at(i as usize, j as usize, Complex64::new(0.0, c));
        }
    }
    let l_xi = CPoly::linear(Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0), m_max);
    let l_eta = CPoly::linear(Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.5), m_max);
    in_xieta.substitute(&l_xi, &l_eta)
}

/// Serialization form of [`NormalFormResult`] for the CLI.
#[derive(Debug, Serialize)]
pub struct NormalFormJson {
    pub omega: f64,
    pub f: Vec<f64>,
    pub residuals: Vec<f64>,
    pub verdict: NormalFormVerdict,
    pub transform: TransformJson,
    pub normalization_dust: f64,
}

#[derive(Debug, Serialize)]
pub struct TransformJson {
    pub xi: Vec<(u32, u32, f64)>,
    pub eta: Vec<(u32, u32, f64)>,
}

impl From<&NormalFormResult> for NormalFormJson {
    fn from(r: &NormalFormResult) -> Self {
        Self {
            omega: r.omega,
            f: r.f_coeffs.coeffs().to_vec(),
            residuals: r.radial_residuals.clone(),
            verdict: r.verdict,
            transform: TransformJson {
                xi: r.transform.0.to_triples(),
                eta: r.transform.1.to_triples(),
            },
            normalization_dust: r.normalization_dust,
        }
    }
}
