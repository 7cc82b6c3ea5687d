use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dispersion coefficients (α, β, γ) of the three components plus the spatial
/// dimension. All regime logic is algebra in these numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub d: usize,
}

impl SystemParams {
    /// Requires α, β, γ ∈ R\{0} and d ∈ {1, 2}.
    pub fn new(alpha: f64, beta: f64, gamma: f64, d: usize) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma)] {
            if v == 0.0 || !v.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "{name} = {v}: dispersion coefficients must satisfy α, β, γ ∈ R\\{{0}}"
                )));
            }
        }
        if d != 1 && d != 2 {
            return Err(Error::InvalidParams(format!("d = {d}: dimension must be 1 or 2")));
        }
        Ok(Self { alpha, beta, gamma, d })
    }

    /// Coefficients with θ = 0, solving βγ = αγ + αβ for β. Needs γ ≠ α.
    pub fn with_theta_zero(alpha: f64, gamma: f64, d: usize) -> Result<Self> {
        if gamma == alpha {
            return Err(Error::InvalidParams(
                "theta-zero construction solves β = αγ/(γ−α); needs γ ≠ α".into(),
            ));
        }
        let beta = alpha * gamma / (gamma - alpha);
        Self::new(alpha, beta, gamma, d)
    }

    /// Scaling-critical Sobolev exponent s_c = d/2 − 1.
    pub fn s_critical(&self) -> f64 {
        self.d as f64 / 2.0 - 1.0
    }

    /// The dispersion coefficient paired with each unknown, in (u, v, w) order.
    pub fn sigmas(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.gamma]
    }

    pub fn same_sign(&self) -> bool {
        let s = self.alpha.signum();
        self.beta.signum() == s && self.gamma.signum() == s
    }

    pub fn rho_min(&self) -> f64 {
        self.alpha.abs().min(self.beta.abs()).min(self.gamma.abs())
    }

    pub fn rho_max(&self) -> f64 {
        self.alpha.abs().max(self.beta.abs()).max(self.gamma.abs())
    }
}

/// Generic coefficient triple (σ₁, σ₂, σ₃) for symbol-level statements that do
/// not care which of α, β, γ sits in which slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaTriple {
    pub sigma1: f64,
    pub sigma2: f64,
    pub sigma3: f64,
}

impl SigmaTriple {
    pub fn new(sigma1: f64, sigma2: f64, sigma3: f64) -> Result<Self> {
        for (name, v) in [("sigma1", sigma1), ("sigma2", sigma2), ("sigma3", sigma3)] {
            if v == 0.0 || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} = {v}: must be nonzero")));
            }
        }
        Ok(Self { sigma1, sigma2, sigma3 })
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.sigma1, self.sigma2, self.sigma3]
    }

    /// Division-free form of σ₁σ₂σ₃(1/σ₁ + 1/σ₂ + 1/σ₃).
    pub fn theta_sum(&self) -> f64 {
        self.sigma2 * self.sigma3 + self.sigma1 * self.sigma3 + self.sigma1 * self.sigma2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_coefficients() {
        assert!(SystemParams::new(0.0, 1.0, 1.0, 1).is_err());
        assert!(SystemParams::new(1.0, 0.0, 1.0, 1).is_err());
        assert!(SystemParams::new(1.0, 1.0, 0.0, 2).is_err());
        assert!(SystemParams::new(1.0, f64::NAN, 1.0, 1).is_err());
    }

    #[test]
    fn rejects_bad_dimension() {
        assert!(SystemParams::new(1.0, 1.0, 1.0, 0).is_err());
        assert!(SystemParams::new(1.0, 1.0, 1.0, 3).is_err());
    }

    #[test]
    fn critical_regularity() {
        let p = SystemParams::new(-1.0, 1.0, 1.0, 1).unwrap();
        assert_eq!(p.s_critical(), -0.5);
        let p = SystemParams::new(-1.0, 1.0, 1.0, 2).unwrap();
        assert_eq!(p.s_critical(), 0.0);
    }

    #[test]
    fn theta_zero_construction_is_exact() {
        // (α, γ) = (1, 2) gives β = 2 exactly, hence βγ − αγ − αβ = 0 exactly.
        let p = SystemParams::with_theta_zero(1.0, 2.0, 1).unwrap();
        assert_eq!(p.beta, 2.0);
        assert_eq!(crate::resonance::compute_theta(&p), 0.0);
    }

    #[test]
    fn rho_extremes() {
        let p = SystemParams::new(-3.0, 0.5, 2.0, 1).unwrap();
        assert_eq!(p.rho_min(), 0.5);
        assert_eq!(p.rho_max(), 3.0);
        assert!(!p.same_sign());
        assert!(SystemParams::new(1.0, 2.0, 3.0, 1).unwrap().same_sign());
        assert!(SystemParams::new(-1.0, -2.0, -3.0, 1).unwrap().same_sign());
    }
}
