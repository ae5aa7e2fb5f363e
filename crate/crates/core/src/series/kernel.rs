//! Field-generic kernels for truncated power series arithmetic.
//!
//! Every routine works on plain coefficient slices `[c0, ..., cN]` and is
//! shared between the `f64` front end ([`super::TruncatedSeries`]) and the
//! exact-rational backend ([`super::exact`]). Preconditions (zero constant
//! term, nonzero linear term, ...) are checked by the callers.

use num_traits::{One, Zero};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Coefficient field for series arithmetic.
pub trait Coeff:
    Clone
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Coeff for T where
    T: Clone
        + PartialEq
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Div<Output = T>
        + Neg<Output = T>
{
}

/// The natural number `n` as a field element.
pub fn nat<T: Coeff>(n: usize) -> T {
    let mut acc = T::zero();
    for _ in 0..n {
        acc = acc + T::one();
    }
    acc
}

pub fn add<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn sub<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn scale<T: Coeff>(a: &[T], c: &T) -> Vec<T> {
    a.iter().map(|x| x.clone() * c.clone()).collect()
}

/// Full Cauchy product, length `a.len() + b.len() - 1`.
pub fn mul_full<T: Coeff>(a: &[T], b: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + ai.clone() * bj.clone();
        }
    }
    out
}

/// Cauchy product truncated to `len` coefficients. The boolean reports
/// whether a nonzero coefficient was discarded by the truncation.
pub fn mul_trunc<T: Coeff>(a: &[T], b: &[T], len: usize) -> (Vec<T>, bool) {
    let mut full = mul_full(a, b);
    let lost = full[len.min(full.len())..].iter().any(|c| !c.is_zero());
    full.truncate(len);
    full.resize(len, T::zero());
    (full, lost)
}

/// Termwise derivative; output is one coefficient shorter.
pub fn derivative<T: Coeff>(a: &[T]) -> Vec<T> {
    (1..a.len()).map(|k| a[k].clone() * nat::<T>(k)).collect()
}

/// Termwise antiderivative with the given constant; one coefficient longer.
pub fn antiderivative<T: Coeff>(a: &[T], constant: T) -> Vec<T> {
    let mut out = Vec::with_capacity(a.len() + 1);
    out.push(constant);
    for (k, c) in a.iter().enumerate() {
        out.push(c.clone() / nat::<T>(k + 1));
    }
    out
}

/// Horner composition `f(g(z))` truncated to `f.len()` coefficients.
/// Requires `g[0] == 0` (checked by callers). The boolean reports truncation
/// loss in the intermediate products.
pub fn compose<T: Coeff>(f: &[T], g: &[T]) -> (Vec<T>, bool) {
    let n = f.len();
    let mut acc = vec![T::zero(); n];
    let mut lost = false;
    acc[0] = f[n - 1].clone();
    for k in (0..n - 1).rev() {
        let (next, l) = mul_trunc(&acc, g, n);
        acc = next;
        lost |= l;
        acc[0] = acc[0].clone() + f[k].clone();
    }
    (acc, lost)
}

/// Multiplicative inverse of a series with nonzero constant term.
pub fn reciprocal<T: Coeff>(f: &[T]) -> Vec<T> {
    let n = f.len();
    let inv0 = T::one() / f[0].clone();
    let mut out = vec![T::zero(); n];
    out[0] = inv0.clone();
    for m in 1..n {
        let mut s = T::zero();
        for k in 1..=m {
            s = s + f[k].clone() * out[m - k].clone();
        }
        out[m] = -(s * inv0.clone());
    }
    out
}

/// Series of `sqrt(1 + f)` for `f` with zero constant term, solved by the
/// coefficient recursion `2 s0 s_m = f_m - sum_{k=1}^{m-1} s_k s_{m-k}`.
pub fn sqrt1p<T: Coeff>(f: &[T]) -> Vec<T> {
    let n = f.len();
    let two = nat::<T>(2);
    let mut s = vec![T::zero(); n];
    s[0] = T::one();
    for m in 1..n {
        let mut acc = f[m].clone();
        for k in 1..m {
            acc = acc - s[k].clone() * s[m - k].clone();
        }
        s[m] = acc / two.clone();
    }
    s
}

/// Compositional inverse of `f` with `f[0] == 0`, `f[1] != 0` (checked by
/// callers), by Newton iteration in the truncated series ring. The result
/// `g` satisfies `compose(f, g) == identity` to the full length.
pub fn revert<T: Coeff>(f: &[T]) -> Vec<T> {
    let n = f.len();
    let mut g = vec![T::zero(); n];
    if n < 2 {
        return g;
    }
    g[1] = T::one() / f[1].clone();
    // f' as an exact polynomial, padded back to length n.
    let mut fp = derivative(f);
    fp.push(T::zero());
    // Newton doubles the number of correct coefficients per step.
    let iters = usize::BITS as usize - (n - 1).leading_zeros() as usize + 2;
    for _ in 0..iters {
        let (fg, _) = compose(f, &g);
        let mut delta = fg;
        delta[1] = delta[1].clone() - T::one();
        if delta.iter().all(Zero::is_zero) {
            break;
        }
        let (fpg, _) = compose(&fp, &g);
        let inv = reciprocal(&fpg);
        let (corr, _) = mul_trunc(&delta, &inv, n);
        for k in 0..n {
            g[k] = g[k].clone() - corr[k].clone();
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reversion_recovers_catalan_coefficients() {
        // F = z/2 + z^2/4 has inverse -1 + sqrt(1+4E) = 2E - 2E^2 + 4E^3 - ...
        let f = vec![0.0, 0.5, 0.25, 0.0, 0.0, 0.0];
        let g = revert(&f);
        let expect = [0.0_f64, 2.0, -2.0, 4.0, -10.0, 28.0];
        for (got, want) in g.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn reciprocal_of_geometric() {
        let f = vec![1.0, 1.0, 0.0, 0.0];
        let r = reciprocal(&f);
        assert_eq!(r, vec![1.0, -1.0, 1.0, -1.0]);
    }
}
