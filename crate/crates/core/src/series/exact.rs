//! Exact-rational series backend for golden tests.
//!
//! Mirrors the pre-gamma pipeline stages (energy profile, reversion,
//! period coefficients) over `BigRational`, sharing the generic kernels
//! with the `f64` front end. The gamma-ratio stage is irrational, so the
//! exact backend deliberately stops before it.

use num_bigint::BigInt;
use num_rational::BigRational;

use super::kernel;

pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Exact truncated series `[c0, ..., cN]` over the rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSeries(pub Vec<Rat>);

impl ExactSeries {
    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self(coeffs.iter().map(|&c| rat(c, 1)).collect())
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn extend(&self, order: usize) -> Self {
        let mut c = self.0.clone();
        c.resize(order + 1, Rat::from_integer(BigInt::from(0)));
        Self(c)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(kernel::add(&self.0, &other.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self(kernel::mul_trunc(&self.0, &other.0, self.0.len()).0)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        Self(kernel::scale(&self.0, c))
    }

    pub fn antiderivative(&self) -> Self {
        Self(kernel::antiderivative(&self.0, Rat::from_integer(BigInt::from(0))))
    }

    pub fn compose(&self, inner: &Self) -> Self {
        assert!(inner.0[0].numer().bits() == 0, "inner series must vanish at 0");
        Self(kernel::compose(&self.0, &inner.0).0)
    }

    pub fn reciprocal(&self) -> Self {
        Self(kernel::reciprocal(&self.0))
    }

    pub fn revert(&self) -> Self {
        Self(kernel::revert(&self.0))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        use num_traits::ToPrimitive;
        self.0.iter().map(|r| r.to_f64().expect("rational fits in f64")).collect()
    }
}

/// Exact energy profile `F(z) = (1/2) \int_0^z f`, as in the float pipeline.
pub fn energy_profile(f: &ExactSeries) -> ExactSeries {
    f.antiderivative().scale(&rat(1, 2))
}

/// Exact inverse-profile coefficients `a_1..a_{N}` (constant dropped).
pub fn invert_profile(big_f: &ExactSeries) -> Vec<Rat> {
    big_f.revert().0[1..].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_reversion_gives_signed_catalan_numbers() {
        // f = 1 + z: a_n = 2 (-1)^{n+1} Catalan(n-1)
        let f = ExactSeries::from_i64(&[1, 1]).extend(9);
        let a = invert_profile(&energy_profile(&f));
        let catalan = [1i64, 1, 2, 5, 14, 42, 132, 429, 1430];
        for (n, c) in catalan.iter().enumerate() {
            let sign = if n % 2 == 0 { 2 } else { -2 };
            assert_eq!(a[n], rat(sign * c, 1), "a_{}", n + 1);
        }
    }
}
