//! d-component complex fields with dual physical/spectral representation,
//! Sobolev norms, dyadic frequency projections, free propagators, the
//! amplitude/space rescaling, and band-limited random data.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::grid::TorusGrid;
use crate::params::SystemParams;
use crate::{fft, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Repr {
    Physical,
    Spectral,
}

/// Even C² cutoff: 1 on [−1, 1], 0 outside (−2, 2), quintic smoothstep in
/// between. Realizes the dyadic partition bump concretely.
pub fn chi(t: f64) -> f64 {
    let a = t.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        let x = 2.0 - a;
        x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
    }
}

/// ψ(t) = χ(t) − χ(2t); supported on 1/2 < |t| < 2, telescopes to 1.
pub fn psi(t: f64) -> f64 {
    chi(t) - chi(2.0 * t)
}

/// ψ_N(t) = ψ(t/N) for dyadic band N.
pub fn psi_band(band: f64, t: f64) -> f64 {
    psi(t / band)
}

/// A d-component complex field on a periodic grid, in either representation.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: TorusGrid,
    repr: Repr,
    comps: Vec<Vec<Complex64>>,
}

impl SpectralField {
    pub fn zeros(grid: TorusGrid, repr: Repr) -> Self {
        let comps = vec![vec![Complex64::default(); grid.modes()]; grid.d];
        SpectralField { grid, repr, comps }
    }

    /// Builds a field from per-component values at grid points x_j = jℓ/n.
    pub fn from_physical_fn(grid: TorusGrid, mut f: impl FnMut(usize, [f64; 2]) -> Complex64) -> Self {
        let xs = grid.coordinates();
        let mut out = Self::zeros(grid, Repr::Physical);
        for c in 0..grid.d {
            for idx in 0..grid.modes() {
                let [i0, i1] = grid.unravel(idx);
                let x = match grid.d {
                    1 => [xs[i0], 0.0],
                    _ => [xs[i0], xs[i1]],
                };
                out.comps[c][idx] = f(c, x);
            }
        }
        out
    }

    /// Builds a field from per-component spectral coefficients at ξ modes.
    pub fn from_spectral_fn(grid: TorusGrid, mut f: impl FnMut(usize, [f64; 2]) -> Complex64) -> Self {
        let axis = grid.wavenumbers();
        let mut out = Self::zeros(grid, Repr::Spectral);
        for c in 0..grid.d {
            for idx in 0..grid.modes() {
                out.comps[c][idx] = f(c, grid.xi(&axis, idx));
            }
        }
        out
    }

    /// Packs raw component data. Lengths must match the grid.
    pub fn from_components(grid: TorusGrid, repr: Repr, comps: Vec<Vec<Complex64>>) -> Result<Self> {
        if comps.len() != grid.d || comps.iter().any(|c| c.len() != grid.modes()) {
            return Err(Error::DimensionMismatch(format!(
                "expected {} components of {} modes",
                grid.d,
                grid.modes()
            )));
        }
        Ok(SpectralField { grid, repr, comps })
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn repr(&self) -> Repr {
        self.repr
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn to_spectral(&self) -> Self {
        match self.repr {
            Repr::Spectral => self.clone(),
            Repr::Physical => {
                let mut out = self.clone();
                for comp in &mut out.comps {
                    fft::forward(&self.grid, comp);
                }
                out.repr = Repr::Spectral;
                out
            }
        }
    }

    pub fn to_physical(&self) -> Self {
        match self.repr {
            Repr::Physical => self.clone(),
            Repr::Spectral => {
                let mut out = self.clone();
                for comp in &mut out.comps {
                    fft::inverse(&self.grid, comp);
                }
                out.repr = Repr::Physical;
                out
            }
        }
    }

    fn ensure_spectral(&self) -> std::borrow::Cow<'_, Self> {
        match self.repr {
            Repr::Spectral => std::borrow::Cow::Borrowed(self),
            Repr::Physical => std::borrow::Cow::Owned(self.to_spectral()),
        }
    }

    /// L² norm over all components; Parseval in either representation.
    pub fn l2_norm(&self) -> f64 {
        let sum_sq: f64 = self
            .comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm_sqr())
            .sum();
        match self.repr {
            // ∫|f|² dx = (ℓ^d/n^d) Σ_x |f(x)|²
            Repr::Physical => (sum_sq * self.grid.measure() / self.grid.modes() as f64).sqrt(),
            // = ℓ^d Σ_k |f̂_k|²
            Repr::Spectral => (sum_sq * self.grid.measure()).sqrt(),
        }
    }

    /// Sobolev norm (Σ_k w(ξ)^{2s} |f̂(ξ)|² ℓ^d)^{1/2} over all components,
    /// with w = |ξ| (homogeneous) or ⟨ξ⟩.
    ///
    /// On the torus the homogeneous weight at mode 0 is taken as a
    /// 0-contribution, so this is a seminorm, finite for every s. Use
    /// [`Self::sobolev_norm_checked`] where a nonzero mean at s < 0 must be
    /// flagged instead.
    pub fn sobolev_norm(&self, s: f64, homogeneous: bool) -> f64 {
        let f = self.ensure_spectral();
        let axis = self.grid.wavenumbers();
        let mut sum = 0.0;
        for comp in &f.comps {
            for (idx, v) in comp.iter().enumerate() {
                let nsq = v.norm_sqr();
                let xi_sq = self.grid.xi_sq(&axis, idx);
                if homogeneous {
                    if xi_sq == 0.0 {
                        continue;
                    }
                    sum += xi_sq.powf(s) * nsq;
                } else {
                    sum += (1.0 + xi_sq).powf(s) * nsq;
                }
            }
        }
        (sum * self.grid.measure()).sqrt()
    }

    /// Like [`Self::sobolev_norm`], but a homogeneous norm at s < 0 on a field
    /// whose mean is nonzero beyond rounding reports infinity (the continuum
    /// norm diverges there).
    pub fn sobolev_norm_checked(&self, s: f64, homogeneous: bool) -> f64 {
        if homogeneous && s < 0.0 {
            let f = self.ensure_spectral();
            let mean_sq: f64 = f.comps.iter().map(|c| c[0].norm_sqr()).fold(0.0, f64::max);
            let max_sq = f
                .comps
                .iter()
                .flat_map(|c| c.iter())
                .map(|v| v.norm_sqr())
                .fold(0.0f64, f64::max);
            if mean_sq > 1e-24 * max_sq.max(1e-300) {
                return f64::INFINITY;
            }
        }
        self.sobolev_norm(s, homogeneous)
    }

    /// Dyadic frequency projection: multiplies coefficients by ψ_N(|ξ|).
    pub fn lp_project(&self, band: f64) -> Self {
        self.mode_multiplied(|xi_sq| Complex64::new(psi_band(band, xi_sq.sqrt()), 0.0))
    }

    /// Complement below the dyadic ladder starting at `band`:
    /// multiplier χ(2|ξ|/band) = 1 − Σ_{N ≥ band} ψ_N(|ξ|).
    pub fn lp_project_low(&self, band: f64) -> Self {
        self.mode_multiplied(|xi_sq| Complex64::new(chi(2.0 * xi_sq.sqrt() / band), 0.0))
    }

    /// Free Schrödinger flow: f̂(ξ) ↦ e^{−itσ|ξ|²} f̂(ξ).
    pub fn free_evolve(&self, sigma: f64, t: f64) -> Self {
        self.mode_multiplied(|xi_sq| Complex64::from_polar(1.0, -t * sigma * xi_sq))
    }

    /// Applies a radial spectral multiplier (same factor on every component).
    pub fn mode_multiplied(&self, mult: impl Fn(f64) -> Complex64) -> Self {
        let f = self.ensure_spectral();
        let axis = self.grid.wavenumbers();
        let mut out = f.into_owned();
        for comp in &mut out.comps {
            for (idx, v) in comp.iter_mut().enumerate() {
                *v *= mult(self.grid.xi_sq(&axis, idx));
            }
        }
        out
    }

    /// Zeroes every mode with an axis index above n/3 (2/3-rule), making
    /// quadratic products alias-free.
    pub fn dealias_23(&mut self) {
        debug_assert_eq!(self.repr, Repr::Spectral);
        let keep = (self.grid.n / 3) as i64;
        let n = self.grid.n;
        for comp in &mut self.comps {
            for (idx, v) in comp.iter_mut().enumerate() {
                let [i0, i1] = self.grid.unravel(idx);
                let k0 = if i0 < n / 2 { i0 as i64 } else { i0 as i64 - n as i64 };
                let k1 = if i1 < n / 2 { i1 as i64 } else { i1 as i64 - n as i64 };
                let out_of_band = match self.grid.d {
                    1 => k0.abs() > keep,
                    _ => k0.abs() > keep || k1.abs() > keep,
                };
                if out_of_band {
                    *v = Complex64::default();
                }
            }
        }
    }

    /// Largest coefficient / point magnitude.
    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// self + c·other (same grid and representation).
    pub fn axpy(&mut self, c: Complex64, other: &Self) {
        debug_assert_eq!(self.grid, other.grid);
        debug_assert_eq!(self.repr, other.repr);
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += c * y;
            }
        }
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for comp in &mut out.comps {
            for v in comp.iter_mut() {
                *v *= c;
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(self.grid, other.grid));
        }
        let mut out = self.to_spectral();
        out.axpy(Complex64::new(-1.0, 0.0), &other.to_spectral());
        Ok(out)
    }

    /// Amplitude/space rescaling at fixed resolution: values scaled by 1/λ on
    /// a grid of period λℓ (mode k keeps its index, so the relabeling is
    /// exact). λ must be a power of two, 2^m with m ∈ Z.
    pub fn rescaled(&self, lam: f64) -> Result<Self> {
        if !is_power_of_two_f64(lam) {
            return Err(Error::NotPowerOfTwo(lam));
        }
        let mut out = self.scaled(Complex64::new(1.0 / lam, 0.0));
        out.grid = self.grid.rescaled(lam)?;
        Ok(out)
    }
}

pub fn is_power_of_two_f64(x: f64) -> bool {
    x.is_finite() && x > 0.0 && (x.to_bits() & ((1u64 << 52) - 1)) == 0
}

/// The unknowns (u, v, w) on one shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTriple {
    pub u: SpectralField,
    pub v: SpectralField,
    pub w: SpectralField,
}

impl StateTriple {
    pub fn new(u: SpectralField, v: SpectralField, w: SpectralField) -> Result<Self> {
        if u.grid() != v.grid() {
            return Err(Error::GridMismatch(*u.grid(), *v.grid()));
        }
        if u.grid() != w.grid() {
            return Err(Error::GridMismatch(*u.grid(), *w.grid()));
        }
        Ok(StateTriple { u, v, w })
    }

    pub fn zeros(grid: TorusGrid, repr: Repr) -> Self {
        StateTriple {
            u: SpectralField::zeros(grid, repr),
            v: SpectralField::zeros(grid, repr),
            w: SpectralField::zeros(grid, repr),
        }
    }

    pub fn grid(&self) -> &TorusGrid {
        self.u.grid()
    }

    pub fn fields(&self) -> [&SpectralField; 3] {
        [&self.u, &self.v, &self.w]
    }

    pub fn to_spectral(&self) -> Self {
        StateTriple {
            u: self.u.to_spectral(),
            v: self.v.to_spectral(),
            w: self.w.to_spectral(),
        }
    }

    /// Component-wise free flow, each field with its own dispersion
    /// coefficient from `p`.
    pub fn free_evolve(&self, p: &SystemParams, t: f64) -> Self {
        StateTriple {
            u: self.u.free_evolve(p.alpha, t),
            v: self.v.free_evolve(p.beta, t),
            w: self.w.free_evolve(p.gamma, t),
        }
    }

    pub fn axpy(&mut self, c: Complex64, other: &Self) {
        self.u.axpy(c, &other.u);
        self.v.axpy(c, &other.v);
        self.w.axpy(c, &other.w);
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        StateTriple {
            u: self.u.scaled(c),
            v: self.v.scaled(c),
            w: self.w.scaled(c),
        }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(StateTriple {
            u: self.u.sub(&other.u)?,
            v: self.v.sub(&other.v)?,
            w: self.w.sub(&other.w)?,
        })
    }

    pub fn sobolev_each(&self, s: f64, homogeneous: bool) -> [f64; 3] {
        [
            self.u.sobolev_norm(s, homogeneous),
            self.v.sobolev_norm(s, homogeneous),
            self.w.sobolev_norm(s, homogeneous),
        ]
    }

    /// Euclidean combination of the three field norms.
    pub fn sobolev_combined(&self, s: f64, homogeneous: bool) -> f64 {
        self.sobolev_each(s, homogeneous)
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.u.max_abs().max(self.v.max_abs()).max(self.w.max_abs())
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.v.is_finite() && self.w.is_finite()
    }

    /// Rescaled triple on the dilated grid (see [`SpectralField::rescaled`]).
    pub fn rescaled(&self, lam: f64) -> Result<Self> {
        Ok(StateTriple {
            u: self.u.rescaled(lam)?,
            v: self.v.rescaled(lam)?,
            w: self.w.rescaled(lam)?,
        })
    }
}

/// Band-limited random data: i.i.d. complex Gaussian coefficients on the
/// modes where ψ_N(|ξ|) > 0, zero elsewhere, normalized to L² norm 1.
/// Deterministic in the seed.
pub fn random_band_limited(grid: TorusGrid, band: f64, seed: u64) -> Result<SpectralField> {
    if !(band > 0.0) || band >= grid.max_wavenumber() {
        return Err(Error::BandNotResolvable { band, max_xi: grid.max_wavenumber() });
    }
    let axis = grid.wavenumbers();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut field = SpectralField::zeros(grid, Repr::Spectral);
    let mut populated = 0usize;
    for c in 0..grid.d {
        for idx in 0..grid.modes() {
            let xi = grid.xi_sq(&axis, idx).sqrt();
            if psi_band(band, xi) > 0.0 {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                field.component_mut(c)[idx] = Complex64::new(re, im);
                populated += 1;
            }
        }
    }
    if populated == 0 {
        return Err(Error::BandNotResolvable { band, max_xi: grid.max_wavenumber() });
    }
    let norm = field.l2_norm();
    Ok(field.scaled(Complex64::new(1.0 / norm, 0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng as _RngExt;
    use std::f64::consts::PI;

    fn grid1(n: usize, period: f64) -> TorusGrid {
        TorusGrid::new(1, n, period).unwrap()
    }

    fn random_field(grid: TorusGrid, seed: u64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SpectralField::from_physical_fn(grid, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        })
    }

    #[test]
    fn round_trip_and_parseval() {
        for (d, n) in [(1usize, 64usize), (2, 32)] {
            let grid = TorusGrid::new(d, n, 7.5).unwrap();
            let f = random_field(grid, 3 + d as u64);
            let back = f.to_spectral().to_physical();
            let max = f.max_abs();
            for c in 0..d {
                for (a, b) in back.component(c).iter().zip(f.component(c)) {
                    assert!((a - b).norm() <= 1e-13 * max);
                }
            }
            let phys = f.l2_norm();
            let spec = f.to_spectral().l2_norm();
            assert!((phys - spec).abs() <= 1e-12 * phys);
        }
    }

    #[test]
    fn sobolev_single_mode_closed_form() {
        // c·e^{iξx}: H^s norm = |c|·⟨ξ⟩^s·ℓ^{d/2}
        let grid = grid1(64, 2.0 * PI * 3.0);
        let xi_target = 4.0 / 3.0; // mode k = 4 on this grid
        let c = Complex64::new(0.7, -0.2);
        let f = SpectralField::from_spectral_fn(grid, |_, xi| {
            if (xi[0] - xi_target).abs() < 1e-12 {
                c
            } else {
                Complex64::default()
            }
        });
        for s in [-0.5, 0.0, 0.5, 1.3] {
            let expect = c.norm() * (1.0 + xi_target * xi_target).powf(s / 2.0) * grid.period.sqrt();
            let got = f.sobolev_norm(s, false);
            assert!((got - expect).abs() <= 1e-12 * expect, "s={s}: {got} vs {expect}");
            let expect_h = c.norm() * xi_target.abs().powf(s) * grid.period.sqrt();
            let got_h = f.sobolev_norm(s, true);
            assert!((got_h - expect_h).abs() <= 1e-12 * expect_h);
        }
        assert_eq!(f.sobolev_norm(0.0, false), f.l2_norm());
    }

    #[test]
    fn homogeneous_negative_s_with_mean_is_infinite() {
        let grid = grid1(32, 10.0);
        let f = SpectralField::from_physical_fn(grid, |_, _| Complex64::new(1.0, 0.0));
        assert!(f.sobolev_norm_checked(-0.5, true).is_infinite());
        assert!(f.sobolev_norm_checked(0.5, true).is_finite());
        // the seminorm drops mode 0 and stays finite
        assert!(f.sobolev_norm(-0.5, true).is_finite());
    }

    #[test]
    fn lp_partition_of_unity() {
        let grid = grid1(128, 20.0 * PI);
        let f = random_field(grid, 9).to_spectral();
        let max_xi = grid.max_wavenumber();
        let mut sum = f.lp_project_low(1.0);
        let mut band = 1.0;
        while band <= 2.0 * max_xi {
            sum.axpy(Complex64::new(1.0, 0.0), &f.lp_project(band));
            band *= 2.0;
        }
        let resid = sum.sub(&f).unwrap().l2_norm();
        assert!(resid <= 1e-12 * f.l2_norm(), "partition residual {resid}");
    }

    #[test]
    fn lp_mode_between_bands() {
        let grid = grid1(64, 2.0 * PI);
        // |ξ| = 6 = 1.5·4: only bands 4 and 8 see it.
        let f = SpectralField::from_spectral_fn(grid, |_, xi| {
            if (xi[0] - 6.0).abs() < 1e-12 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::default()
            }
        });
        assert!(f.lp_project(4.0).l2_norm() > 0.0);
        assert!(f.lp_project(8.0).l2_norm() > 0.0);
        assert_eq!(f.lp_project(2.0).l2_norm(), 0.0);
        assert_eq!(f.lp_project(16.0).l2_norm(), 0.0);
        // ψ_4(6) + ψ_8(6) = 1 on the shared support
        let total = psi_band(4.0, 6.0) + psi_band(8.0, 6.0);
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lp_disjoint_bands_annihilate() {
        let grid = grid1(128, 2.0 * PI);
        let f = random_field(grid, 11);
        let p4 = f.lp_project(4.0);
        assert!(p4.lp_project(16.0).l2_norm() <= 1e-14 * f.l2_norm());
        assert!(p4.lp_project(1.0).l2_norm() <= 1e-14 * f.l2_norm());
    }

    #[test]
    fn free_evolve_identity_and_single_mode() {
        let grid = grid1(64, 2.0 * PI);
        let f = random_field(grid, 17).to_spectral();
        let same = f.free_evolve(1.5, 0.0);
        assert_eq!(f, same);

        let g = SpectralField::from_spectral_fn(grid, |_, xi| {
            if (xi[0] - 3.0).abs() < 1e-12 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::default()
            }
        });
        let evolved = g.free_evolve(2.0, 0.3);
        let expect = Complex64::from_polar(1.0, -0.3 * 2.0 * 9.0);
        let k = 3usize;
        assert!((evolved.component(0)[k] - expect).norm() < 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        // Free flow group law and norm preservation.
        #[test]
        fn free_evolve_group_law(sigma in -3.0..3.0f64, t in -2.0..2.0f64, s in -2.0..2.0f64, seed in 0u64..50) {
            let grid = grid1(64, 11.0);
            let f = random_field(grid, seed).to_spectral();
            let a = f.free_evolve(sigma, t).free_evolve(sigma, s);
            let b = f.free_evolve(sigma, t + s);
            let resid = a.sub(&b).unwrap().l2_norm();
            prop_assert!(resid <= 1e-11 * f.l2_norm());
            for hs in [0.0, 0.5, 1.0] {
                let n0 = f.sobolev_norm(hs, false);
                let n1 = b.sobolev_norm(hs, false);
                prop_assert!((n0 - n1).abs() <= 1e-12 * n0);
            }
        }

        // A_λ ∘ A_μ = A_{λμ} exactly at the data level.
        #[test]
        fn rescaling_composes(i in -2i32..3, j in -2i32..3, seed in 0u64..20) {
            let grid = grid1(32, 4.0);
            let f = random_field(grid, seed);
            let lam = 2f64.powi(i);
            let mu = 2f64.powi(j);
            let a = f.rescaled(lam).unwrap().rescaled(mu).unwrap();
            let b = f.rescaled(lam * mu).unwrap();
            prop_assert_eq!(a.grid(), b.grid());
            let resid = a.sub(&b).unwrap().l2_norm();
            prop_assert!(resid <= 1e-12 * b.l2_norm().max(1e-12));
        }
    }

    #[test]
    fn rescaling_norm_exponents() {
        for d in [1usize, 2] {
            let grid = TorusGrid::new(d, 64, 9.0).unwrap();
            let f = random_field(grid, 23);
            let sc = d as f64 / 2.0 - 1.0;
            let lam = 2.0;
            let g = f.rescaled(lam).unwrap();
            // Ḣ^{s_c} invariant
            let r = g.sobolev_norm(sc, true) / f.sobolev_norm(sc, true);
            assert!((r - 1.0).abs() <= 1e-10, "d={d}: critical ratio {r}");
            // Ḣ^s multiplied by λ^{s_c − s}
            for s in [0.0, 0.7] {
                let r = g.sobolev_norm(s, true) / f.sobolev_norm(s, true);
                let expect = lam.powf(sc - s);
                assert!((r - expect).abs() <= 1e-10 * expect, "d={d} s={s}: {r} vs {expect}");
            }
        }
    }

    #[test]
    fn rescaling_rejects_non_powers() {
        let grid = grid1(32, 4.0);
        let f = random_field(grid, 1);
        assert!(f.rescaled(3.0).is_err());
        assert!(f.rescaled(0.75).is_err());
        assert!(f.rescaled(0.5).is_ok());
        assert!(f.rescaled(1.0).is_ok());
    }

    #[test]
    fn band_limited_data_contract() {
        let grid = grid1(256, 2.0 * PI);
        let f = random_band_limited(grid, 16.0, 42).unwrap();
        assert!((f.l2_norm() - 1.0).abs() <= 1e-12);
        // support only touches adjacent bands
        for m in [1.0, 2.0, 4.0, 64.0, 128.0] {
            assert!(f.lp_project(m).l2_norm() <= 1e-14, "band {m} leaked");
        }
        let g = random_band_limited(grid, 16.0, 42).unwrap();
        assert_eq!(f, g, "equal seeds must be bit-identical");
        let h = random_band_limited(grid, 16.0, 43).unwrap();
        assert_ne!(f, h);
        assert!(random_band_limited(grid, 1024.0, 1).is_err());
    }

    #[test]
    fn triple_requires_shared_grid() {
        let g1 = grid1(32, 4.0);
        let g2 = grid1(64, 4.0);
        let a = SpectralField::zeros(g1, Repr::Spectral);
        let b = SpectralField::zeros(g2, Repr::Spectral);
        assert!(StateTriple::new(a.clone(), a.clone(), b).is_err());
        assert!(StateTriple::new(a.clone(), a.clone(), a).is_ok());
    }
}
