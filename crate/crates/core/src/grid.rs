//! Periodic grids.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{Error, Result};

/// Uniform periodic grid on [0, ℓ)^d with n points per axis.
///
/// Wavenumbers are ξ_k = 2πk/ℓ for signed mode index k ∈ [−n/2, n/2),
/// stored in FFT order (0, 1, …, n/2−1, −n/2, …, −1) along each axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusGrid {
    pub d: usize,
    pub n: usize,
    pub period: f64,
}

impl TorusGrid {
    /// n must be a power of two ≥ 16 (exact dyadic rescaling and fast
    /// transforms); d ∈ {1, 2}.
    pub fn new(d: usize, n: usize, period: f64) -> Result<Self> {
        if d != 1 && d != 2 {
            return Err(Error::InvalidParams(format!("grid dimension {d} must be 1 or 2")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidParams(format!(
                "grid size {n} must be a power of two ≥ 16"
            )));
        }
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::InvalidParams(format!("period {period} must be positive")));
        }
        Ok(TorusGrid { d, n, period })
    }

    /// Total number of modes (= grid points), n^d.
    pub fn modes(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    /// Signed mode index of storage position i along one axis.
    pub fn signed_index(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Wavenumber table along one axis, in storage order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        let scale = 2.0 * PI / self.period;
        (0..self.n).map(|i| self.signed_index(i) as f64 * scale).collect()
    }

    /// Physical coordinates along one axis: x_j = jℓ/n.
    pub fn coordinates(&self) -> Vec<f64> {
        let dx = self.period / self.n as f64;
        (0..self.n).map(|j| j as f64 * dx).collect()
    }

    /// Largest axis wavenumber magnitude, nπ/ℓ.
    pub fn max_wavenumber(&self) -> f64 {
        self.n as f64 * PI / self.period
    }

    /// Mode volume element for Parseval sums, ℓ^d.
    pub fn measure(&self) -> f64 {
        self.period.powi(self.d as i32)
    }

    /// Splits a linear mode index into per-axis storage indices.
    #[inline]
    pub fn unravel(&self, idx: usize) -> [usize; 2] {
        match self.d {
            1 => [idx, 0],
            _ => [idx / self.n, idx % self.n],
        }
    }

    /// |ξ|² of the mode at linear index, given the axis table.
    #[inline]
    pub fn xi_sq(&self, axis: &[f64], idx: usize) -> f64 {
        match self.d {
            1 => {
                let x = axis[idx];
                x * x
            }
            _ => {
                let a = axis[idx / self.n];
                let b = axis[idx % self.n];
                a * a + b * b
            }
        }
    }

    /// ξ vector of the mode at linear index (second entry 0 when d = 1).
    #[inline]
    pub fn xi(&self, axis: &[f64], idx: usize) -> [f64; 2] {
        match self.d {
            1 => [axis[idx], 0.0],
            _ => [axis[idx / self.n], axis[idx % self.n]],
        }
    }

    /// Grid with the same resolution and period scaled by `lam`.
    pub fn rescaled(&self, lam: f64) -> Result<Self> {
        TorusGrid::new(self.d, self.n, self.period * lam)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(TorusGrid::new(1, 100, 1.0).is_err());
        assert!(TorusGrid::new(1, 8, 1.0).is_err());
        assert!(TorusGrid::new(3, 32, 1.0).is_err());
        assert!(TorusGrid::new(1, 32, -1.0).is_err());
        assert!(TorusGrid::new(2, 64, 10.0).is_ok());
    }

    #[test]
    fn wavenumber_layout() {
        let g = TorusGrid::new(1, 16, 2.0 * PI).unwrap();
        let w = g.wavenumbers();
        assert_eq!(w[0], 0.0);
        assert_eq!(w[1], 1.0);
        assert_eq!(w[7], 7.0);
        assert_eq!(w[8], -8.0);
        assert_eq!(w[15], -1.0);
        assert_eq!(g.max_wavenumber(), 8.0);
    }

    #[test]
    fn mode_count_and_measure() {
        let g = TorusGrid::new(2, 32, 4.0).unwrap();
        assert_eq!(g.modes(), 1024);
        assert_eq!(g.measure(), 16.0);
    }
}
