//! Duhamel maps and the Picard fixed-point iteration.
//!
//! Each component satisfies A(t) = e^{itσΔ}A₀ + ∫₀ᵗ e^{i(t−t′)σΔ} N_A(t′) dt′
//! with N the integrator's right-hand side; the u-map consumes (w, v), the
//! v-map (w̄, u), and the w-map ∇(u·v̄). The time integral is evaluated by
//! cumulative Simpson on the iterate's uniform mesh.

use num_complex::Complex64;

use crate::field::StateTriple;
use crate::integrator::nonlinearity;
use crate::params::SystemParams;
use crate::quadrature::{cumulative_simpson, LinearCombine};
use crate::{Error, Result};

impl LinearCombine for StateTriple {
    fn zero_like(&self) -> Self {
        StateTriple::zeros(*self.grid(), crate::field::Repr::Spectral)
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        StateTriple::axpy(self, Complex64::new(a, 0.0), x);
    }
}

/// A candidate solution sampled on a uniform time mesh over [0, T].
#[derive(Debug, Clone)]
pub struct SampledEvolution {
    pub times: Vec<f64>,
    pub states: Vec<StateTriple>,
}

impl SampledEvolution {
    /// The free solution of the data, sampled on `intervals + 1` points.
    pub fn free(data: &StateTriple, p: &SystemParams, t_horizon: f64, intervals: usize) -> Result<Self> {
        if intervals < 8 {
            return Err(Error::MeshTooCoarse(intervals));
        }
        if !(t_horizon > 0.0) {
            return Err(Error::InvalidParams(format!("horizon {t_horizon} must be positive")));
        }
        let data = data.to_spectral();
        let dx = t_horizon / intervals as f64;
        let times: Vec<f64> = (0..=intervals).map(|j| j as f64 * dx).collect();
        let states = times.iter().map(|&t| data.free_evolve(p, t)).collect();
        Ok(SampledEvolution { times, states })
    }

    pub fn mesh_step(&self) -> Result<f64> {
        let m = self.times.len().saturating_sub(1);
        if m < 8 {
            return Err(Error::MeshTooCoarse(m));
        }
        let dx = self.times[1] - self.times[0];
        for w in self.times.windows(2) {
            if ((w[1] - w[0]) - dx).abs() > 1e-9 * dx {
                return Err(Error::InvalidParams("time mesh must be uniform".into()));
            }
        }
        Ok(dx)
    }

    /// Largest per-component sup-in-time H^{s} distance to another iterate.
    pub fn distance(&self, other: &Self, s: f64) -> Result<f64> {
        if self.times.len() != other.times.len() {
            return Err(Error::DimensionMismatch("iterates sampled on different meshes".into()));
        }
        let mut worst = 0.0f64;
        for (a, b) in self.states.iter().zip(&other.states) {
            let diff = a.sub(b)?;
            for f in diff.fields() {
                worst = worst.max(f.sobolev_norm(s, false));
            }
        }
        Ok(worst)
    }

    pub fn state_at(&self, t: f64) -> Option<&StateTriple> {
        let dx = self.times[1] - self.times[0];
        self.times
            .iter()
            .position(|&tj| (tj - t).abs() <= dx * 1e-6)
            .map(|j| &self.states[j])
    }
}

/// One application of the Duhamel maps to a sampled iterate.
///
/// For every mesh time t_j the three components of the output are
/// e^{it_jσΔ}(data + ∫₀^{t_j} e^{−it′σΔ} N(t′) dt′), the integral by
/// cumulative Simpson. A zero iterate returns the pure free evolution.
pub fn duhamel_apply(
    iterate: &SampledEvolution,
    p: &SystemParams,
    data: &StateTriple,
    dealias: bool,
) -> Result<SampledEvolution> {
    let dx = iterate.mesh_step()?;
    let data = data.to_spectral();
    if data.grid() != iterate.states[0].grid() {
        return Err(Error::GridMismatch(*data.grid(), *iterate.states[0].grid()));
    }

    // Pulled-back integrand B(t) = e^{−itσΔ} N(X(t)), component-wise σ.
    let pulled: Vec<StateTriple> = iterate
        .times
        .iter()
        .zip(&iterate.states)
        .map(|(&t, state)| nonlinearity(state, dealias).free_evolve(p, -t))
        .collect();

    let cumulative = cumulative_simpson(&pulled, dx);

    let states: Vec<StateTriple> = iterate
        .times
        .iter()
        .zip(cumulative)
        .map(|(&t, mut c)| {
            StateTriple::axpy(&mut c, Complex64::new(1.0, 0.0), &data);
            c.free_evolve(p, t)
        })
        .collect();

    Ok(SampledEvolution { times: iterate.times.clone(), states })
}

/// Convergence record of the fixed-point iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardReport {
    /// Successive sup-in-time H^{s_c} differences, one per iteration.
    pub diffs: Vec<f64>,
    pub converged: bool,
    /// Set when the differences grow without bound (expected for large data).
    pub diverged: bool,
}

impl PicardReport {
    /// Ratios of consecutive difference norms (contraction factors).
    pub fn ratios(&self) -> Vec<f64> {
        self.diffs.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

/// Iterates the Duhamel maps from the free solution until successive
/// differences fall below `tol` in sup-in-time H^{s_c}. Exceeding `max_iter`
/// or runaway growth yields a divergence report, not an error.
pub fn picard_fixed_point(
    data: &StateTriple,
    p: &SystemParams,
    t_horizon: f64,
    intervals: usize,
    tol: f64,
    max_iter: usize,
    dealias: bool,
) -> Result<(SampledEvolution, PicardReport)> {
    let sc = p.s_critical();
    let mut current = SampledEvolution::free(data, p, t_horizon, intervals)?;
    let mut diffs = Vec::new();
    for _ in 0..max_iter {
        let next = duhamel_apply(&current, p, data, dealias)?;
        let diff = next.distance(&current, sc)?;
        diffs.push(diff);
        current = next;
        if diff < tol {
            return Ok((current, PicardReport { diffs, converged: true, diverged: false }));
        }
        if !diff.is_finite() || diff > 1e8 {
            return Ok((current, PicardReport { diffs, converged: false, diverged: true }));
        }
    }
    // Growing tail counts as divergence; a plateau is merely unconverged.
    let diverged = diffs
        .last()
        .zip(diffs.first())
        .map(|(l, f)| l > &(10.0 * f))
        .unwrap_or(false);
    Ok((current, PicardReport { diffs, converged: false, diverged }))
}
