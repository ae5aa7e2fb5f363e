//! Shared test oracles, independent of the implementation paths they
//! check.

use centerpot::quadrature;

/// Evaluates a dense univariate polynomial.
pub fn poly_eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

/// Root of `V(x) = e` on the side of `sign`, by bracket expansion and
/// bisection. `V` must be increasing away from the origin on that side.
pub fn turning_point(v: &[f64], e: f64, sign: f64) -> f64 {
    let mut hi = sign * 1e-6;
    let mut guard = 0;
    while poly_eval(v, hi) < e {
        hi *= 1.5;
        guard += 1;
        assert!(guard < 200, "no turning point on this side");
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if poly_eval(v, mid) < e {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Period of the potential system `xdot = y, ydot = -V'(x)` at energy `e`,
/// by direct quadrature of `sqrt(2) \int dx / sqrt(E - V(x))` over both
/// half-wells. The substitution `x = x_t sin(theta)` absorbs the simple
/// turning-point zero (the integrand extends analytically to theta = pi/2,
/// and Gauss nodes never sample the endpoint).
pub fn oracle_period(v: &[f64], e: f64) -> f64 {
    let halves: f64 = [1.0f64, -1.0]
        .iter()
        .map(|&sign| {
            let x_t = turning_point(v, e, sign);
            let integrand = |theta: f64| {
                let x = x_t * theta.sin();
                let denom = (e - poly_eval(v, x)).max(f64::MIN_POSITIVE);
                x_t.abs() * theta.cos() / denom.sqrt()
            };
            quadrature::integrate_adaptive(&integrand, 0.0, std::f64::consts::FRAC_PI_2, 128, 1e-12)
        })
        .sum();
    2.0f64.sqrt() * halves
}
