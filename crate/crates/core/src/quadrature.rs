//! Gauss-Legendre quadrature with node doubling.

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = -p / d;
            x += dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed-order integral of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    nodes.iter().zip(&weights).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Integrates starting from `n0` nodes, doubling until successive values
/// change by less than `tol` (or four doublings pass).
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, n0: usize, tol: f64) -> f64 {
    let mut n = n0;
    let mut prev = integrate(f, a, b, n);
    for _ in 0..4 {
        n *= 2;
        let next = integrate(f, a, b, n);
        if (next - prev).abs() < tol {
            return next;
        }
        prev = next;
    }
    prev
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn low_order_rules_are_exact_on_polynomials() {
        // 3-point rule integrates degree-5 polynomials exactly
        let v = integrate(|x| x * x * x * x, -1.0, 1.0, 3);
        assert_abs_diff_eq!(v, 2.0 / 5.0, epsilon = 1e-14);
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, 3);
        assert_abs_diff_eq!(v, 8.0, epsilon = 1e-13);
    }

    #[test]
    fn smooth_integrand_converges_spectrally() {
        let v = integrate(f64::exp, 0.0, 1.0, 16);
        assert_abs_diff_eq!(v, std::f64::consts::E - 1.0, epsilon = 1e-14);
        let v = integrate_adaptive(&f64::sin, 0.0, std::f64::consts::PI, 8, 1e-12);
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-12);
    }
}
