//! Dense complex bivariate polynomials truncated by total degree.
//!
//! A `CPoly` stores coefficients of `u^j v^k` for `j + k <= m` in a dense
//! `(m+1) x (m+1)` grid. The two variables are either the complexified
//! pair `(z, zbar)` or a pair of real coordinates, depending on context;
//! the reality-structure conjugation [`CPoly::conj_fn`] (swap + conjugate)
//! applies to the former, the plain coefficient conjugation
//! [`CPoly::conj_coeffs`] to the latter.

use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct CPoly {
    m: usize,
    c: Vec<Complex64>,
}

impl CPoly {
    pub fn zero(m: usize) -> Self {
        Self { m, c: vec![Complex64::ZERO; (m + 1) * (m + 1)] }
    }

    /// The monomial `u` (first variable).
    pub fn identity(m: usize) -> Self {
        let mut p = Self::zero(m);
        p.set(1, 0, Complex64::ONE);
        p
    }

    /// `a u + b v`.
    pub fn linear(a: Complex64, b: Complex64, m: usize) -> Self {
        let mut p = Self::zero(m);
        p.set(1, 0, a);
        p.set(0, 1, b);
        p
    }

    #[inline]
    fn idx(&self, j: usize, k: usize) -> usize {
        j * (self.m + 1) + k
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> Complex64 {
        self.c[self.idx(j, k)]
    }

    #[inline]
    pub fn set(&mut self, j: usize, k: usize, v: Complex64) {
        let i = self.idx(j, k);
        self.c[i] = v;
    }

    #[inline]
    pub fn add_at(&mut self, j: usize, k: usize, v: Complex64) {
        let i = self.idx(j, k);
        self.c[i] += v;
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.re == 0.0 && x.im == 0.0)
    }

    pub fn max_norm(&self) -> f64 {
        self.c.iter().fold(0.0, |acc, x| acc.max(x.re.abs()).max(x.im.abs()))
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.m, other.m);
        Self { m: self.m, c: self.c.iter().zip(&other.c).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.m, other.m);
        Self { m: self.m, c: self.c.iter().zip(&other.c).map(|(a, b)| a - b).collect() }
    }

    /// Product truncated to total degree `m`.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.m, other.m);
        let m = self.m;
        let mut out = Self::zero(m);
        for j1 in 0..=m {
            for k1 in 0..=(m - j1) {
                let ca = self.get(j1, k1);
                if ca.re == 0.0 && ca.im == 0.0 {
                    continue;
                }
                let rem = m - j1 - k1;
                for j2 in 0..=rem {
                    for k2 in 0..=(rem - j2) {
                        let cb = other.get(j2, k2);
                        if cb.re == 0.0 && cb.im == 0.0 {
                            continue;
                        }
                        out.add_at(j1 + j2, k1 + k2, ca * cb);
                    }
                }
            }
        }
        out
    }

    /// Conjugate *function* under the reality structure of `(z, zbar)`:
    /// coefficients conjugated and indices swapped.
    pub fn conj_fn(&self) -> Self {
        let mut out = Self::zero(self.m);
        for j in 0..=self.m {
            for k in 0..=(self.m - j) {
                out.set(k, j, self.get(j, k).conj());
            }
        }
        out
    }

    /// Coefficientwise conjugation (for polynomials in real variables).
    pub fn conj_coeffs(&self) -> Self {
        Self { m: self.m, c: self.c.iter().map(|a| a.conj()).collect() }
    }

    /// Partial derivative in the first variable.
    pub fn d_first(&self) -> Self {
        let mut out = Self::zero(self.m);
        for j in 1..=self.m {
            for k in 0..=(self.m - j) {
                out.set(j - 1, k, self.get(j, k) * j as f64);
            }
        }
        out
    }

    /// Partial derivative in the second variable.
    pub fn d_second(&self) -> Self {
        let mut out = Self::zero(self.m);
        for j in 0..=self.m {
            for k in 1..=(self.m - j) {
                out.set(j, k - 1, self.get(j, k) * k as f64);
            }
        }
        out
    }

    /// The homogeneous part of total degree `deg`.
    pub fn homogeneous(&self, deg: usize) -> Self {
        let mut out = Self::zero(self.m);
        for j in 0..=deg.min(self.m) {
            let k = deg - j;
            if k <= self.m - j {
                out.set(j, k, self.get(j, k));
            }
        }
        out
    }

    /// Substitutes `first <- p`, `second <- q` (Horner over rows, powers of
    /// `q` cached), truncation at total degree `m` throughout.
    pub fn substitute(&self, p: &Self, q: &Self) -> Self {
        let m = self.m;
        let mut qpow: Vec<CPoly> = Vec::with_capacity(m + 1);
        let mut one = Self::zero(m);
        one.set(0, 0, Complex64::ONE);
        qpow.push(one);
        for k in 1..=m {
            let next = qpow[k - 1].mul(q);
            qpow.push(next);
        }
        // row_j(q) = sum_k c_{jk} q^k, then Horner in p
        let mut acc = Self::zero(m);
        for j in (0..=m).rev() {
            if j < m {
                acc = acc.mul(p);
            }
            for (k, row) in qpow.iter().enumerate().take(m - j + 1) {
                let c = self.get(j, k);
                if c.re == 0.0 && c.im == 0.0 {
                    continue;
                }
                for i in 0..acc.c.len() {
                    acc.c[i] += c * row.c[i];
                }
            }
        }
        acc
    }

    /// Entries as `(j, k, coefficient)` for nonzero coefficients.
    pub fn entries(&self) -> Vec<(usize, usize, Complex64)> {
        let mut out = Vec::new();
        for j in 0..=self.m {
            for k in 0..=(self.m - j) {
                let c = self.get(j, k);
                if c.re != 0.0 || c.im != 0.0 {
                    out.push((j, k, c));
                }
            }
        }
        out
    }
}
