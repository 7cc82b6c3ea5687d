//! Quantitative experiments: norm-inflation growth exponents, bilinear
//! product-norm probes, and scaling equivariance.

pub mod bilinear;
pub mod illposed;
pub mod scaling;

pub use bilinear::{bilinear_ratio, BilinearConfig};
pub use illposed::{growth_exponent, illposed_data, BoxIndicator, IllposedCase, IllposedVariant};
pub use scaling::{scaling_equivariance, EquivarianceReport};

use num_complex::Complex64;

/// ∫₀ᵗ e^{−it′φ} dt′ = (1 − e^{−itφ})/(iφ), with the series
/// t·(1 − iz/2 − z²/6 + iz³/24 + …), z = tφ, below |z| = 1e−6.
pub(crate) fn time_phase_integral(t: f64, phi: f64) -> Complex64 {
    let z = t * phi;
    if z.abs() < 1e-6 {
        let z2 = z * z;
        t * Complex64::new(1.0 - z2 / 6.0, -z / 2.0 + z2 * z / 24.0)
    } else {
        let w = Complex64::new(1.0 - z.cos(), z.sin());
        w * Complex64::new(0.0, -1.0 / phi)
    }
}
