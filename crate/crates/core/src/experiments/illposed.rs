//! Norm-inflation growth exponents from semi-analytic second Picard iterates.
//!
//! The indicator data lives on frequency boxes of width down to 1/N; a torus
//! grid resolving them would need ~N² modes, so the experiment instead keeps
//! the boxes as quadrature-backed densities and evaluates the second-iterate
//! time integral in closed form per frequency pair — grid-free and exact in
//! t. A coarse-N torus cross-check guards the implementation (see tests).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::time_phase_integral;
use crate::fit::{loglog_fit, FitResult};
use crate::params::SystemParams;
use crate::quadrature::GaussLegendre;
use crate::resonance::{compute_m_factors, compute_theta};
use crate::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IllposedVariant {
    AlphaEqGamma,
    ThetaZero,
    ThetaNegative,
}

impl IllposedVariant {
    pub fn letter(&self) -> char {
        match self {
            IllposedVariant::AlphaEqGamma => 'a',
            IllposedVariant::ThetaZero => 'b',
            IllposedVariant::ThetaNegative => 'c',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'a' => Some(IllposedVariant::AlphaEqGamma),
            'b' => Some(IllposedVariant::ThetaZero),
            'c' => Some(IllposedVariant::ThetaNegative),
            _ => None,
        }
    }

    /// Expected growth exponent of R(N) at Sobolev regularity s.
    pub fn expected_slope(&self, s: f64) -> f64 {
        match self {
            IllposedVariant::AlphaEqGamma => 0.5,
            IllposedVariant::ThetaZero => 1.0 - s,
            IllposedVariant::ThetaNegative => 0.5 - s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo < hi);
        Interval { lo, hi }
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0.0 && self.hi >= 0.0
    }

    fn overlaps(&self, other: &Interval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }
}

/// Frequency boxes D₁, D₂ (data supports) and D (the resonant output window)
/// of one case at one N.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boxes {
    pub d1: Interval,
    pub d2: Interval,
    pub d_out: Interval,
}

/// One ill-posedness case: the variant, the coefficients satisfying its
/// defining constraint, and the factor M (or M₊) its boxes depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IllposedCase {
    pub variant: IllposedVariant,
    pub params: SystemParams,
    /// M for the theta_zero boxes, M₊ (the root ≠ −1) for theta_negative;
    /// unused by alpha_eq_gamma.
    pub m: Option<f64>,
}

impl IllposedCase {
    pub fn new(variant: IllposedVariant, params: SystemParams) -> Result<Self> {
        let theta = compute_theta(&params);
        let m = match variant {
            IllposedVariant::AlphaEqGamma => {
                if params.alpha != params.gamma {
                    return Err(Error::CaseCondition(format!(
                        "case a needs α = γ, got α = {}, γ = {}",
                        params.alpha, params.gamma
                    )));
                }
                None
            }
            IllposedVariant::ThetaZero => {
                if theta != 0.0 {
                    return Err(Error::CaseCondition(format!(
                        "case b needs θ = 0 exactly (solve one coefficient), got θ = {theta}"
                    )));
                }
                let m = params.gamma / (params.alpha - params.gamma);
                debug_assert!(m != -1.0);
                Some(m)
            }
            IllposedVariant::ThetaNegative => {
                if !(theta < 0.0) {
                    return Err(Error::CaseCondition(format!("case c needs θ < 0, got θ = {theta}")));
                }
                let r = compute_m_factors(&params);
                let (mp, mm) = match (r.m_plus, r.m_minus) {
                    (Some(a), Some(b)) => (a, b),
                    _ => {
                        return Err(Error::CaseCondition(
                            "case c needs α ≠ γ so that M± exist".into(),
                        ))
                    }
                };
                // at least one root differs from −1; boxes need m ≠ −1
                Some(if mp != -1.0 { mp } else { mm })
            }
        };
        Ok(IllposedCase { variant, params, m })
    }

    /// The case's boxes at frequency scale N.
    pub fn boxes(&self, n: f64) -> Boxes {
        match self.variant {
            IllposedVariant::AlphaEqGamma => Boxes {
                d1: Interval::new(n, n + 1.0 / n),
                d2: Interval::new(1.0 / n, 2.0 / n),
                d_out: Interval::new(n + 1.5 / n, n + 2.0 / n),
            },
            IllposedVariant::ThetaZero => {
                let m = self.m.unwrap();
                Boxes {
                    d1: Interval::new(n, n + 1.0),
                    d2: Interval::new(n / m, n / m + 1.0 / m.abs()),
                    d_out: Interval::new((1.0 + 1.0 / m) * n + 0.5, (1.0 + 1.0 / m) * n + 1.0),
                }
            }
            IllposedVariant::ThetaNegative => {
                let m = self.m.unwrap();
                Boxes {
                    d1: Interval::new(n, n + 1.0 / n),
                    d2: Interval::new(n / m, n / m + 1.0 / (m.abs() * n)),
                    d_out: Interval::new(
                        (1.0 + 1.0 / m) * n + 0.5 / n,
                        (1.0 + 1.0 / m) * n + 1.0 / n,
                    ),
                }
            }
        }
    }
}

/// Indicator Fourier data 𝟙 on `base × [0,1]^{d−1}`, represented by its
/// interval (quadrature-backed, not a grid field). Norms use the convention
/// ‖f‖²_{H^s} = ∫ ⟨ξ⟩^{2s}|f̂|² dξ, under which ‖𝟙_{[N,N+N^{-1}]}‖_{H^s} has
/// the plain N^{s−1/2} asymptotics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxIndicator {
    pub base: Interval,
    pub d: usize,
}

impl BoxIndicator {
    /// ‖f‖²_{L²} = |D| exactly (indicator).
    pub fn l2_norm_sq(&self) -> f64 {
        self.base.len()
    }

    /// H^s norm by Gauss–Legendre over the box (exact to rounding for these
    /// analytic integrands).
    pub fn hs_norm(&self, s: f64, gl: &GaussLegendre) -> f64 {
        let sq = match self.d {
            1 => gl.integrate(self.base.lo, self.base.hi, |x| (1.0 + x * x).powf(s)),
            _ => gl.integrate(self.base.lo, self.base.hi, |x| {
                gl.integrate(0.0, 1.0, |y| (1.0 + x * x + y * y).powf(s))
            }),
        };
        sq.sqrt()
    }
}

/// Builds the indicator pair (f, g) on D₁, D₂ at scale `n`.
///
/// Requires n ≥ 16 (keeps boxes clear of the origin) and ≥ 64 quadrature
/// points per box; rejects overlapping boxes.
pub fn illposed_data(case: &IllposedCase, n: f64, quad_points: usize) -> Result<(BoxIndicator, BoxIndicator)> {
    if !(n >= 16.0) {
        return Err(Error::InvalidParams(format!("need N ≥ 16, got {n}")));
    }
    if quad_points < 64 {
        return Err(Error::InvalidParams(format!(
            "need at least 64 quadrature points per box, got {quad_points}"
        )));
    }
    let boxes = case.boxes(n);
    if boxes.d1.contains_zero() || boxes.d2.contains_zero() {
        return Err(Error::BoxOverlap(format!(
            "a data box touches the origin: D1 = {:?}, D2 = {:?}",
            boxes.d1, boxes.d2
        )));
    }
    if boxes.d1.overlaps(&boxes.d2) {
        return Err(Error::BoxOverlap(format!(
            "D1 = {:?} overlaps D2 = {:?} (bad N/case combination)",
            boxes.d1, boxes.d2
        )));
    }
    let d = case.params.d;
    Ok((BoxIndicator { base: boxes.d1, d }, BoxIndicator { base: boxes.d2, d }))
}

/// The second Picard iterate of data (f, g, 0): in Fourier variables
///
///   Â₂(t, ξ) = iξ e^{−itγ|ξ|²} (2π)^{−d} ∫ f̂(ξ₁) ĝ(ξ−ξ₁) (1−e^{−itΦ})/(iΦ) dξ₁,
///   Φ = α|ξ₁|² − β|ξ−ξ₁|² − γ|ξ|²,
///
/// with box orientation fixed so the phase is near-resonant on D₁ × D₂
/// ((2π)^{−d} is the convolution constant of a product's Fourier transform).
pub struct SecondIterate {
    f: BoxIndicator,
    g: BoxIndicator,
    params: SystemParams,
    gl: GaussLegendre,
    conv_scale: f64,
}

impl SecondIterate {
    pub fn new(f: BoxIndicator, g: BoxIndicator, params: SystemParams, quad_points: usize) -> Result<Self> {
        if f.d != g.d || f.d != params.d {
            return Err(Error::DimensionMismatch(
                "data boxes and parameters disagree on the dimension".into(),
            ));
        }
        if !(f.base.lo + g.base.lo < f.base.hi + g.base.hi) {
            return Err(Error::EmptyIntersection);
        }
        let conv_scale = (2.0 * std::f64::consts::PI).powi(-(params.d as i32));
        Ok(SecondIterate {
            f,
            g,
            params,
            gl: GaussLegendre::new(quad_points.clamp(8, 256)),
            conv_scale,
        })
    }

    fn phase(&self, xi1_sq: f64, eta_sq: f64, xi_sq: f64) -> f64 {
        let p = &self.params;
        p.alpha * xi1_sq - p.beta * eta_sq - p.gamma * xi_sq
    }

    /// The convolution-with-phase kernel K(ξ, t); |Â₂| = |ξ|·|K|.
    pub fn kernel(&self, xi: [f64; 2], t: f64) -> Complex64 {
        let lo = self.f.base.lo.max(xi[0] - self.g.base.hi);
        let hi = self.f.base.hi.min(xi[0] - self.g.base.lo);
        if lo >= hi {
            return Complex64::default();
        }
        let raw: Complex64 = match self.params.d {
            1 => {
                let xi_sq = xi[0] * xi[0];
                self.gl
                    .mapped(lo, hi)
                    .map(|(x1, w)| {
                        let eta = xi[0] - x1;
                        w * time_phase_integral(t, self.phase(x1 * x1, eta * eta, xi_sq))
                    })
                    .sum()
            }
            _ => {
                let ylo = 0.0f64.max(xi[1] - 1.0);
                let yhi = 1.0f64.min(xi[1]);
                if ylo >= yhi {
                    return Complex64::default();
                }
                let xi_sq = xi[0] * xi[0] + xi[1] * xi[1];
                let mut acc = Complex64::default();
                for (x1, wx) in self.gl.mapped(lo, hi) {
                    for (y1, wy) in self.gl.mapped(ylo, yhi) {
                        let e0 = xi[0] - x1;
                        let e1 = xi[1] - y1;
                        let phi =
                            self.phase(x1 * x1 + y1 * y1, e0 * e0 + e1 * e1, xi_sq);
                        acc += wx * wy * time_phase_integral(t, phi);
                    }
                }
                acc
            }
        };
        raw * self.conv_scale
    }

    /// ‖A₂(t)‖_{H^s} by quadrature over the full output support
    /// (D₁ + D₂ in the first axis, crossed with [0, 2] when d = 2).
    pub fn hs_norm(&self, s: f64, t: f64) -> f64 {
        let mut cuts = [
            self.f.base.lo + self.g.base.lo,
            self.f.base.lo + self.g.base.hi,
            self.f.base.hi + self.g.base.lo,
            self.f.base.hi + self.g.base.hi,
        ];
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut sq = 0.0;
        match self.params.d {
            1 => {
                for w in cuts.windows(2) {
                    if w[1] - w[0] <= 0.0 {
                        continue;
                    }
                    sq += self.gl.integrate(w[0], w[1], |x| {
                        let xi_sq = x * x;
                        (1.0 + xi_sq).powf(s) * xi_sq * self.kernel([x, 0.0], t).norm_sqr()
                    });
                }
            }
            _ => {
                for w in cuts.windows(2) {
                    if w[1] - w[0] <= 0.0 {
                        continue;
                    }
                    for yw in [[0.0, 1.0], [1.0, 2.0]] {
                        sq += self.gl.integrate(w[0], w[1], |x| {
                            self.gl.integrate(yw[0], yw[1], |y| {
                                let xi_sq = x * x + y * y;
                                (1.0 + xi_sq).powf(s)
                                    * xi_sq
                                    * self.kernel([x, y], t).norm_sqr()
                            })
                        });
                    }
                }
            }
        }
        sq.sqrt()
    }
}

/// Sup over the time grid of ‖A₂(t)‖_{H^s} / (‖f‖_{H^s}‖g‖_{H^s}).
pub fn growth_ratio(
    case: &IllposedCase,
    n: f64,
    s: f64,
    t_grid: &[f64],
    quad_points: usize,
) -> Result<f64> {
    let (f, g) = illposed_data(case, n, quad_points)?;
    let gl = GaussLegendre::new(quad_points.clamp(8, 256));
    let denom = f.hs_norm(s, &gl) * g.hs_norm(s, &gl);
    let iterate = SecondIterate::new(f, g, case.params, quad_points)?;
    let sup = t_grid
        .iter()
        .map(|&t| iterate.hs_norm(s, t))
        .fold(0.0f64, f64::max);
    Ok(sup / denom)
}

/// Least-squares fit of log R(N) against log N over `n_list`.
///
/// A fit with r² below [`FitResult::R2_GATE`] is returned as-is; callers
/// treat it as inconclusive.
pub fn growth_exponent(
    case: &IllposedCase,
    s: f64,
    n_list: &[f64],
    t_grid: &[f64],
    quad_points: usize,
) -> Result<FitResult> {
    if n_list.len() < 5 {
        return Err(Error::TooFewSamples(n_list.len()));
    }
    if t_grid.is_empty() || t_grid.iter().any(|&t| t <= 0.0) {
        return Err(Error::InvalidParams("time grid must contain positive times".into()));
    }
    let pairs: Vec<(f64, f64)> = n_list
        .par_iter()
        .map(|&n| growth_ratio(case, n, s, t_grid, quad_points).map(|r| (n, r)))
        .collect::<Result<_>>()?;
    loglog_fit(&pairs)
}

/// Default time grid {T/8, T/4, T/2, T}.
pub fn default_t_grid(t_window: f64) -> [f64; 4] {
    [t_window / 8.0, t_window / 4.0, t_window / 2.0, t_window]
}
