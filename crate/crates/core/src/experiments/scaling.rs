//! Scaling equivariance of the flow: evolving rescaled data for the rescaled
//! time must reproduce the rescaled solution.

use crate::field::{is_power_of_two_f64, StateTriple};
use crate::integrator::{evolve, SolverConfig};
use crate::params::SystemParams;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivarianceReport {
    /// Critical-seminorm distance between scale-then-evolve and
    /// evolve-then-scale.
    pub deviation: f64,
    /// Step-halving (Richardson) error estimate of the base run, in the same
    /// norm; the deviation is expected below 1e−6 + 10× this.
    pub richardson: f64,
}

/// Evolves `data` to `t_base` and compares the rescaled result against the
/// rescaled data evolved to λ²·t_base with step λ²·dt (same step count, same
/// nondimensional problem).
pub fn scaling_equivariance(
    p: &SystemParams,
    data: &StateTriple,
    lam: f64,
    t_base: f64,
    dt: f64,
    dealias: bool,
) -> Result<EquivarianceReport> {
    if !is_power_of_two_f64(lam) {
        return Err(Error::NotPowerOfTwo(lam));
    }
    let sc = p.s_critical();

    let mut cfg = SolverConfig::new(dt, t_base)?;
    cfg.dealias = dealias;
    cfg.monitor_every = usize::MAX / 2;
    let base = evolve(data, p, &cfg)?;
    let (_, base_final) = base.final_state();
    let evolve_then_scale = base_final.rescaled(lam)?;

    let mut cfg_shadow = cfg.clone();
    cfg_shadow.dt = dt / 2.0;
    let shadow = evolve(data, p, &cfg_shadow)?;
    let richardson = base_final
        .sub(&shadow.final_state().1)?
        .sobolev_combined(sc, true)
        * (16.0 / 15.0);

    let mut cfg_scaled = SolverConfig::new(dt * lam * lam, t_base * lam * lam)?;
    cfg_scaled.dealias = dealias;
    cfg_scaled.monitor_every = usize::MAX / 2;
    let scaled_run = evolve(&data.rescaled(lam)?, p, &cfg_scaled)?;
    let scale_then_evolve = &scaled_run.final_state().1;

    let deviation = scale_then_evolve
        .sub(&evolve_then_scale)?
        .sobolev_combined(sc, true);

    Ok(EquivarianceReport { deviation, richardson })
}
