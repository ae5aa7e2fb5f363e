//! Pure-parity series stored by their nonzero coefficients.
//!
//! An odd series `sum b_n z^{2n-1}` keeps `[b_1, ..., b_M]`; an even series
//! `sum v_n z^{2n}` keeps `[v_1, ..., v_M]` (no constant term: the even
//! series produced here always vanish at zero). The compact list lives in a
//! [`TruncatedSeries`] over an auxiliary variable `w = z^2`:
//! odd `f(z) = z * base(z^2)`, even `f(z) = z^2 * base(z^2)`.

use super::{kernel, SeriesError, TruncatedSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParitySeries {
    base: TruncatedSeries,
    parity: Parity,
}

impl ParitySeries {
    /// Odd series from `[b_1, ..., b_M]` (coefficient of `z^{2n-1}`).
    pub fn odd(coeffs: &[f64]) -> Result<Self, SeriesError> {
        Ok(Self { base: TruncatedSeries::new(coeffs.to_vec())?.with_var("w"), parity: Parity::Odd })
    }

    /// Even series from `[v_1, ..., v_M]` (coefficient of `z^{2n}`).
    pub fn even(coeffs: &[f64]) -> Result<Self, SeriesError> {
        Ok(Self {
            base: TruncatedSeries::new(coeffs.to_vec())?.with_var("w"),
            parity: Parity::Even,
        })
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// The compact coefficient list `[c_1, ..., c_M]`.
    pub fn compact(&self) -> &[f64] {
        self.base.coeffs()
    }

    pub fn count(&self) -> usize {
        self.base.order() + 1
    }

    /// Order of the reconstructed plain series: `2M-1` odd, `2M` even.
    pub fn full_order(&self) -> usize {
        match self.parity {
            Parity::Odd => 2 * self.count() - 1,
            Parity::Even => 2 * self.count(),
        }
    }

    /// Reconstruction with exact zeros at all wrong-parity positions.
    pub fn to_series(&self) -> TruncatedSeries {
        let mut coeffs = vec![0.0; self.full_order() + 1];
        let offset = match self.parity {
            Parity::Odd => 1,
            Parity::Even => 2,
        };
        for (n, c) in self.compact().iter().enumerate() {
            coeffs[offset + 2 * n] = *c;
        }
        TruncatedSeries::new(coeffs).expect("parity coefficients are finite")
    }

    /// Extracts the coefficients of the requested parity from a plain
    /// series, returning the largest wrong-parity magnitude as a defect.
    /// The constant term counts as wrong parity in both classes.
    pub fn from_series(s: &TruncatedSeries, parity: Parity) -> Result<(Self, f64), SeriesError> {
        let offset = match parity {
            Parity::Odd => 1usize,
            Parity::Even => 2usize,
        };
        if s.order() < offset {
            return Err(SeriesError::Empty);
        }
        let count = (s.order() - offset) / 2 + 1;
        let mut compact = Vec::with_capacity(count);
        let mut defect = 0.0f64;
        for (k, c) in s.coeffs().iter().enumerate() {
            if k >= offset && (k - offset) % 2 == 0 {
                compact.push(*c);
            } else {
                defect = defect.max(c.abs());
            }
        }
        let series = match parity {
            Parity::Odd => Self::odd(&compact)?,
            Parity::Even => Self::even(&compact)?,
        };
        Ok((series, defect))
    }

    /// Square of an odd series, computed on compact coefficients:
    /// `v_k = sum_{i+j=k+1} b_i b_j`. Exactly even by construction.
    pub fn square(&self) -> Self {
        assert_eq!(self.parity, Parity::Odd, "square is implemented for odd series");
        let b = self.compact();
        let m = b.len();
        let mut v = vec![0.0; m];
        for (k, vk) in v.iter_mut().enumerate() {
            // coefficient of z^{2(k+1)}: pairs n + m = k + 2 in 1-based indexing
            for i in 0..=k {
                let j = k - i;
                if i < m && j < m {
                    *vk += b[i] * b[j];
                }
            }
        }
        Self::even(&v).expect("squares of finite coefficients are finite")
    }

    /// Reversion within the odd class. Returns the odd inverse and the
    /// largest even-position magnitude seen in the raw reversion (a parity
    /// defect that is exactly zero in IEEE arithmetic, reported anyway).
    pub fn revert_odd(&self) -> Result<(Self, f64), SeriesError> {
        if self.parity != Parity::Odd {
            return Err(SeriesError::NotRevertible("only odd series are revertible in-class"));
        }
        if self.compact()[0] == 0.0 {
            return Err(SeriesError::NotRevertible("leading odd coefficient must be nonzero"));
        }
        let full = self.to_series().revert()?;
        Self::from_series(&full, Parity::Odd)
    }

    /// Value at a point, via the auxiliary-variable factorization.
    pub fn eval(&self, z: f64) -> f64 {
        let w = z * z;
        match self.parity {
            Parity::Odd => z * self.base.eval(w),
            Parity::Even => w * self.base.eval(w),
        }
    }

    /// Value of the first derivative at a point.
    /// Odd: `f'(z) = g(z^2) + 2 z^2 g'(z^2)` for `f = z g(z^2)`;
    /// even: `f'(z) = 2 z (g(z^2) + z^2 g'(z^2))` for `f = z^2 g(z^2)`.
    pub fn deriv_eval(&self, z: f64) -> f64 {
        let w = z * z;
        let g = self.base.eval(w);
        let gp = kernel::derivative(self.base.coeffs())
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * w + c);
        match self.parity {
            Parity::Odd => g + 2.0 * w * gp,
            Parity::Even => 2.0 * z * (g + w * gp),
        }
    }
}
