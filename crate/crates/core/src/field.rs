//! Planar analytic vector fields as truncated bivariate polynomials, with
//! linear-part classification and the reversibility-based center test.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("coefficient of x^{0} y^{1} is not finite")]
    NonFinite(u32, u32),
    #[error("monomial x^{i} y^{j} exceeds the degree bound {bound}")]
    DegreeExceeded { i: u32, j: u32, bound: u32 },
    #[error("origin must be a singular point (constant term {0} in {1})")]
    NotSingularAtOrigin(f64, &'static str),
    #[error("hyperbolic or degenerate linear part (det = {det})")]
    HyperbolicOrDegenerate { det: f64 },
    #[error("not center-type (nonzero trace {trace})")]
    NonzeroTrace { trace: f64 },
    #[error("hamiltonian potential must satisfy V'(0) = 0 (got {0})")]
    PotentialLinearTerm(f64),
}

/// Sparse bivariate polynomial; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BivariatePoly {
    terms: BTreeMap<(u32, u32), f64>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_triples(triples: &[(u32, u32, f64)]) -> Result<Self, FieldError> {
        let mut p = Self::zero();
        for &(i, j, c) in triples {
            if !c.is_finite() {
                return Err(FieldError::NonFinite(i, j));
            }
            p.add_term(i, j, c);
        }
        Ok(p)
    }

    pub fn monomial(i: u32, j: u32, c: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(i, j, c);
        p
    }

    /// Adds `c` to the coefficient of `x^i y^j`, dropping exact zeros.
    pub fn add_term(&mut self, i: u32, j: u32, c: f64) {
        let entry = self.terms.entry((i, j)).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&(i, j));
        }
    }

    pub fn coeff(&self, i: u32, j: u32) -> f64 {
        self.terms.get(&(i, j)).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
        self.terms.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    pub fn to_triples(&self) -> Vec<(u32, u32, f64)> {
        self.terms().collect()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, j, c) in other.terms() {
            out.add_term(i, j, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Self {
        if c == 0.0 {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(&k, &v)| (k, v * c)).collect() }
    }

    /// Product, truncated to total degree `cap` when one is given.
    pub fn mul(&self, other: &Self, cap: Option<u32>) -> Self {
        let mut out = Self::zero();
        for (i1, j1, c1) in self.terms() {
            for (i2, j2, c2) in other.terms() {
                let (i, j) = (i1 + i2, j1 + j2);
                if cap.is_none_or(|d| i + j <= d) {
                    out.add_term(i, j, c1 * c2);
                }
            }
        }
        out
    }

    pub fn partial_x(&self) -> Self {
        let mut out = Self::zero();
        for (i, j, c) in self.terms() {
            if i > 0 {
                out.add_term(i - 1, j, c * i as f64);
            }
        }
        out
    }

    pub fn partial_y(&self) -> Self {
        let mut out = Self::zero();
        for (i, j, c) in self.terms() {
            if j > 0 {
                out.add_term(i, j - 1, c * j as f64);
            }
        }
        out
    }

    /// Evaluation via tables of powers (exact Horner-style accumulation on
    /// polynomials; exact for polynomial inputs up to rounding).
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let d = self.total_degree() as usize;
        let mut xp = vec![1.0; d + 1];
        let mut yp = vec![1.0; d + 1];
        for k in 1..=d {
            xp[k] = xp[k - 1] * x;
            yp[k] = yp[k - 1] * y;
        }
        self.terms().map(|(i, j, c)| c * xp[i as usize] * yp[j as usize]).sum()
    }

    /// Substitutes `x = m[0][0] u + m[0][1] v`, `y = m[1][0] u + m[1][1] v`.
    pub fn substitute_linear(&self, m: &[[f64; 2]; 2]) -> Self {
        let d = self.total_degree() as usize;
        let lx = Self::from_triples(&[(1, 0, m[0][0]), (0, 1, m[0][1])]).expect("finite");
        let ly = Self::from_triples(&[(1, 0, m[1][0]), (0, 1, m[1][1])]).expect("finite");
        let pow = |base: &Self| -> Vec<Self> {
            let mut v = Vec::with_capacity(d + 1);
            v.push(Self::monomial(0, 0, 1.0));
            for k in 1..=d {
                let next = v[k - 1].mul(base, None);
                v.push(next);
            }
            v
        };
        let (px, py) = (pow(&lx), pow(&ly));
        let mut out = Self::zero();
        for (i, j, c) in self.terms() {
            let t = px[i as usize].mul(&py[j as usize], None).scale(c);
            out = out.add(&t);
        }
        out
    }

    /// `series(self)`: univariate Horner with bivariate coefficients,
    /// truncated to total degree `cap`.
    pub fn apply_univariate(series: &[f64], inner: &Self, cap: u32) -> Self {
        let mut acc = Self::zero();
        for &c in series.iter().rev() {
            acc = acc.mul(inner, Some(cap));
            acc.add_term(0, 0, c);
        }
        acc
    }

    /// Drops coefficients with magnitude at or below `eps`.
    pub fn chop(&self, eps: f64) -> Self {
        Self { terms: self.terms.iter().filter(|(_, c)| c.abs() > eps).map(|(&k, &v)| (k, v)).collect() }
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }
}

/// Pair of truncated bivariate polynomials `(P, Q)` with a singular point
/// at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanarField {
    p: BivariatePoly,
    q: BivariatePoly,
    degree: u32,
}

impl PlanarField {
    pub fn new(p: BivariatePoly, q: BivariatePoly, degree: u32) -> Result<Self, FieldError> {
        if p.coeff(0, 0) != 0.0 {
            return Err(FieldError::NotSingularAtOrigin(p.coeff(0, 0), "P"));
        }
        if q.coeff(0, 0) != 0.0 {
            return Err(FieldError::NotSingularAtOrigin(q.coeff(0, 0), "Q"));
        }
        for (poly, _name) in [(&p, "P"), (&q, "Q")] {
            for (i, j, _) in poly.terms() {
                if i + j > degree {
                    return Err(FieldError::DegreeExceeded { i, j, bound: degree });
                }
            }
        }
        Ok(Self { p, q, degree })
    }

    /// Expands `{"hamiltonian_V": [v0, ..., vD]}` into `P = y, Q = -V'(x)`.
    pub fn from_hamiltonian_v(v: &[f64]) -> Result<Self, FieldError> {
        if v.len() > 1 && v[1] != 0.0 {
            return Err(FieldError::PotentialLinearTerm(v[1]));
        }
        if let Some(k) = v.iter().position(|c| !c.is_finite()) {
            return Err(FieldError::NonFinite(k as u32, 0));
        }
        let p = BivariatePoly::monomial(0, 1, 1.0);
        let mut q = BivariatePoly::zero();
        for (k, &c) in v.iter().enumerate().skip(2) {
            q.add_term(k as u32 - 1, 0, -(k as f64) * c);
        }
        let degree = q.total_degree().max(1);
        Self::new(p, q, degree)
    }

    pub fn p(&self) -> &BivariatePoly {
        &self.p
    }

    pub fn q(&self) -> &BivariatePoly {
        &self.q
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn evaluate(&self, point: [f64; 2]) -> [f64; 2] {
        [self.p.eval(point[0], point[1]), self.q.eval(point[0], point[1])]
    }

    pub fn jacobian_at(&self, point: [f64; 2]) -> [[f64; 2]; 2] {
        let [x, y] = point;
        [
            [self.p.partial_x().eval(x, y), self.p.partial_y().eval(x, y)],
            [self.q.partial_x().eval(x, y), self.q.partial_y().eval(x, y)],
        ]
    }

    /// Reads the Jacobian at the origin off the degree-1 monomials and
    /// classifies it as center-type. `tau_lin` is the trace tolerance.
    pub fn linear_part(&self, tau_lin: f64) -> Result<LinearPartInfo, FieldError> {
        let jacobian = [
            [self.p.coeff(1, 0), self.p.coeff(0, 1)],
            [self.q.coeff(1, 0), self.q.coeff(0, 1)],
        ];
        let trace = jacobian[0][0] + jacobian[1][1];
        let det = jacobian[0][0] * jacobian[1][1] - jacobian[0][1] * jacobian[1][0];
        if det <= 0.0 {
            return Err(FieldError::HyperbolicOrDegenerate { det });
        }
        if trace.abs() > tau_lin {
            return Err(FieldError::NonzeroTrace { trace });
        }
        Ok(LinearPartInfo { jacobian, trace, det, omega: det.sqrt() })
    }

    /// True iff `P(u,-v) = -P(u,v)` and `Q(u,-v) = Q(u,v)` as polynomial
    /// identities: P carries only odd powers of y, Q only even powers.
    pub fn is_reversible_uv(&self) -> bool {
        self.p.terms().all(|(_, j, _)| j % 2 == 1) && self.q.terms().all(|(_, j, _)| j % 2 == 0)
    }

    pub fn certify(&self, tau_lin: f64) -> CertificationRecord {
        let reversible = self.is_reversible_uv();
        match self.linear_part(tau_lin) {
            Ok(info) => {
                let verdict = if reversible {
                    CertVerdict::CertifiedByReversibility
                } else {
                    CertVerdict::NeedsNormalFormCheck
                };
                CertificationRecord { linear: Some(info), reversible, verdict, reason: None }
            }
            Err(e) => CertificationRecord {
                linear: None,
                reversible,
                verdict: CertVerdict::Rejected,
                reason: Some(e.to_string()),
            },
        }
    }
}

/// Linear data of the field at the origin, present only for center-type
/// linear parts (`|trace| <= tau_lin`, `det > 0`, `omega = sqrt(det)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearPartInfo {
    pub jacobian: [[f64; 2]; 2],
    pub trace: f64,
    pub det: f64,
    pub omega: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CertVerdict {
    #[serde(rename = "certified-by-reversibility")]
    CertifiedByReversibility,
    #[serde(rename = "needs-normal-form-check")]
    NeedsNormalFormCheck,
    #[serde(rename = "rejected")]
    Rejected,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificationRecord {
    pub linear: Option<LinearPartInfo>,
    pub reversible: bool,
    pub verdict: CertVerdict,
    pub reason: Option<String>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    pub(crate) fn field(p: &[(u32, u32, f64)], q: &[(u32, u32, f64)], degree: u32) -> PlanarField {
        PlanarField::new(
            BivariatePoly::from_triples(p).unwrap(),
            BivariatePoly::from_triples(q).unwrap(),
            degree,
        )
        .unwrap()
    }

    #[test]
    fn linear_rotation_classifies_as_center() {
        let f = field(&[(0, 1, 1.0)], &[(1, 0, -1.0)], 1);
        let info = f.linear_part(1e-12).unwrap();
        assert_eq!(info.trace, 0.0);
        assert_eq!(info.det, 1.0);
        assert_eq!(info.omega, 1.0);
    }

    #[test]
    fn saddle_is_rejected_by_sign() {
        let f = field(&[(0, 1, 1.0)], &[(1, 0, 1.0)], 1);
        assert!(matches!(
            f.linear_part(1e-12),
            Err(FieldError::HyperbolicOrDegenerate { det }) if det == -1.0
        ));
    }

    #[test]
    fn omega_two_read_off_jacobian() {
        // P = 2y, Q = -2x - x^2
        let f = field(&[(0, 1, 2.0)], &[(1, 0, -2.0), (2, 0, -1.0)], 2);
        let info = f.linear_part(1e-12).unwrap();
        assert_eq!(info.det, 4.0);
        assert_eq!(info.omega, 2.0);
    }

    #[test]
    fn reversibility_parity_checks() {
        let f = field(&[(0, 1, 1.0)], &[(1, 0, -1.0), (2, 0, -1.0)], 2);
        assert!(f.is_reversible_uv());
        let g = field(&[(0, 1, 1.0), (2, 0, 1.0)], &[(1, 0, -1.0)], 2);
        assert!(!g.is_reversible_uv());
        let zero = PlanarField::new(BivariatePoly::zero(), BivariatePoly::zero(), 0).unwrap();
        assert!(zero.is_reversible_uv());
    }

    #[test]
    fn certification_verdicts() {
        let duffing_cubic = field(&[(0, 1, 1.0)], &[(1, 0, -1.0), (3, 0, -1.0)], 3);
        assert_eq!(duffing_cubic.certify(1e-12).verdict, CertVerdict::CertifiedByReversibility);

        // P = -y + x^2, Q = x + xy: passes the linear test, fails parity
        let f = field(&[(0, 1, -1.0), (2, 0, 1.0)], &[(1, 0, 1.0), (1, 1, 1.0)], 2);
        assert_eq!(f.certify(1e-12).verdict, CertVerdict::NeedsNormalFormCheck);

        let saddle = field(&[(1, 0, 1.0)], &[(0, 1, -1.0)], 1);
        let rec = saddle.certify(1e-12);
        assert_eq!(rec.verdict, CertVerdict::Rejected);
        assert!(rec.reason.unwrap().contains("det"));
    }

    #[test]
    fn evaluation_examples() {
        let rot = field(&[(0, 1, 1.0)], &[(1, 0, -1.0)], 1);
        assert_eq!(rot.evaluate([0.0, 1.0]), [1.0, 0.0]);

        let cubic = field(&[(0, 1, 1.0)], &[(1, 0, -1.0), (3, 0, -1.0)], 3);
        assert_eq!(cubic.evaluate([1.0, 0.0]), [0.0, -2.0]);
        assert_eq!(cubic.evaluate([0.0, 0.0]), [0.0, 0.0]);
    }

    #[test]
    fn hamiltonian_expansion_builds_potential_field() {
        // V = x^2/2 + x^4/4  =>  Q = -x - x^3
        let f = PlanarField::from_hamiltonian_v(&[0.0, 0.0, 0.5, 0.0, 0.25]).unwrap();
        assert_eq!(f.p().to_triples(), vec![(0, 1, 1.0)]);
        assert_eq!(f.q().to_triples(), vec![(1, 0, -1.0), (3, 0, -1.0)]);
        assert!(f.is_reversible_uv());
        assert!(PlanarField::from_hamiltonian_v(&[0.0, 1.0, 0.5]).is_err());
    }

    #[test]
    fn substitute_linear_rotates_polynomials() {
        // x^2 under x = u + v, y arbitrary
        let p = BivariatePoly::monomial(2, 0, 1.0);
        let s = p.substitute_linear(&[[1.0, 1.0], [0.0, 1.0]]);
        assert_eq!(s.to_triples(), vec![(0, 2, 1.0), (1, 1, 2.0), (2, 0, 1.0)]);
    }

    #[test]
    fn jacobian_at_general_point() {
        let cubic = field(&[(0, 1, 1.0)], &[(1, 0, -1.0), (3, 0, -1.0)], 3);
        let j = cubic.jacobian_at([1.0, 0.0]);
        assert_abs_diff_eq!(j[1][0], -4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(j[0][1], 1.0, epsilon = 1e-14);
    }
}
