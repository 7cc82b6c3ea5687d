//! Time evolution by integrating-factor RK4 with exact linear propagators.
//!
//! The nonlinearity contains derivatives, so a split-step pure-nonlinear
//! substep would itself be a PDE; the integrating factor needs only pointwise
//! products plus spectral derivatives, and the linear flow is applied as an
//! exact unimodular multiplier.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::DiagnosticsRow;
use crate::field::{Repr, SpectralField, StateTriple};
use crate::grid::TorusGrid;
use crate::params::SystemParams;
use crate::{fft, Error, Result};

/// Any spectral coefficient beyond this magnitude (or non-finite) flags the
/// run as blown up.
pub const BLOWUP_THRESHOLD: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    /// 2/3-rule dealiasing of products; exact alias removal for the quadratic
    /// nonlinearity.
    pub dealias: bool,
    /// Steps between diagnostics rows.
    pub monitor_every: usize,
    /// Times at which full states are kept in the trajectory. The final state
    /// is always kept.
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

impl SolverConfig {
    pub fn new(dt: f64, t_end: f64) -> Result<Self> {
        let cfg = SolverConfig {
            dt,
            t_end,
            dealias: true,
            monitor_every: 100,
            snapshot_times: Vec::new(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !(self.t_end > 0.0) || self.dt > self.t_end {
            return Err(Error::InvalidParams(format!(
                "need 0 < dt ≤ t_end, got dt = {}, t_end = {}",
                self.dt, self.t_end
            )));
        }
        if self.monitor_every == 0 {
            return Err(Error::InvalidParams("monitor_every must be ≥ 1".into()));
        }
        Ok(())
    }
}

/// Time-ordered snapshots plus the monitored diagnostics series.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: SystemParams,
    pub grid: TorusGrid,
    pub snapshots: Vec<(f64, StateTriple)>,
    pub rows: Vec<DiagnosticsRow>,
    /// Set when the run aborted on non-finite or runaway values; the rows
    /// retain the last finite diagnostics. A signal, not a crash.
    pub blowup_at: Option<f64>,
}

impl Trajectory {
    pub fn final_state(&self) -> &(f64, StateTriple) {
        self.snapshots.last().expect("trajectory keeps at least the final state")
    }
}

/// Right-hand sides of ∂t(u, v, w) minus the linear flow:
/// (i(∇·w)v, i(∇·w̄)u, −i∇(u·v̄)).
///
/// Derivatives are spectral; the quadratic products are formed pointwise in
/// physical space, with both inputs and the output masked by the 2/3 rule
/// when `dealias` is set.
pub fn nonlinearity(state: &StateTriple, dealias: bool) -> StateTriple {
    let grid = *state.grid();
    let axis = grid.wavenumbers();
    let d = grid.d;
    let m = grid.modes();

    let mut s = state.to_spectral();
    if dealias {
        s.u.dealias_23();
        s.v.dealias_23();
        s.w.dealias_23();
    }

    // ∇·w, then to physical once; ∇·w̄ = conj(∇·w).
    let mut div_w = vec![Complex64::default(); m];
    for j in 0..d {
        let wj = s.w.component(j);
        for idx in 0..m {
            let xi_j = grid.xi(&axis, idx)[j];
            div_w[idx] += Complex64::i() * xi_j * wj[idx];
        }
    }
    fft::inverse(&grid, &mut div_w);

    let u_phys = s.u.to_physical();
    let v_phys = s.v.to_physical();

    let mut slot_u = Vec::with_capacity(d);
    let mut slot_v = Vec::with_capacity(d);
    let mut prod = vec![Complex64::default(); m];
    for c in 0..d {
        let mut su = vec![Complex64::default(); m];
        let mut sv = vec![Complex64::default(); m];
        let uc = u_phys.component(c);
        let vc = v_phys.component(c);
        for idx in 0..m {
            su[idx] = Complex64::i() * div_w[idx] * vc[idx];
            sv[idx] = Complex64::i() * div_w[idx].conj() * uc[idx];
            prod[idx] += uc[idx] * vc[idx].conj();
        }
        fft::forward(&grid, &mut su);
        fft::forward(&grid, &mut sv);
        slot_u.push(su);
        slot_v.push(sv);
    }
    fft::forward(&grid, &mut prod);

    // −i ∂_j (u·v̄) has coefficients −i·(iξ_j)·p̂ = ξ_j p̂.
    let mut slot_w = Vec::with_capacity(d);
    for j in 0..d {
        let mut sw = vec![Complex64::default(); m];
        for idx in 0..m {
            sw[idx] = grid.xi(&axis, idx)[j] * prod[idx];
        }
        slot_w.push(sw);
    }

    let mut out = StateTriple::new(
        SpectralField::from_components(grid, Repr::Spectral, slot_u).unwrap(),
        SpectralField::from_components(grid, Repr::Spectral, slot_v).unwrap(),
        SpectralField::from_components(grid, Repr::Spectral, slot_w).unwrap(),
    )
    .unwrap();
    if dealias {
        out.u.dealias_23();
        out.v.dealias_23();
        out.w.dealias_23();
    }
    out
}

/// One integrating-factor RK4 step of size `dt`. Each component rides its own
/// exact linear flow, so a vanishing nonlinearity reproduces free evolution
/// to rounding.
pub fn step_ifrk4(state: &StateTriple, p: &SystemParams, dt: f64, dealias: bool) -> StateTriple {
    let h = dt;
    let one = Complex64::new(1.0, 0.0);

    let k1 = nonlinearity(state, dealias);

    let mut u2 = state.clone();
    u2.axpy(Complex64::new(h / 2.0, 0.0), &k1);
    let u2 = u2.free_evolve(p, h / 2.0);
    let k2 = nonlinearity(&u2, dealias);

    let mut u3 = state.free_evolve(p, h / 2.0);
    u3.axpy(Complex64::new(h / 2.0, 0.0), &k2);
    let k3 = nonlinearity(&u3, dealias);

    let mut u4 = state.free_evolve(p, h);
    u4.axpy(Complex64::new(h, 0.0), &k3.free_evolve(p, h / 2.0));
    let k4 = nonlinearity(&u4, dealias);

    // u₁ = E u₀ + (h/6)[E k₁ + 2 E_half (k₂ + k₃) + k₄]
    let mut acc = state.clone();
    acc.axpy(Complex64::new(h / 6.0, 0.0), &k1);
    let mut acc = acc.free_evolve(p, h);
    let mut mid = k2;
    mid.axpy(one, &k3);
    acc.axpy(Complex64::new(h / 3.0, 0.0), &mid.free_evolve(p, h / 2.0));
    acc.axpy(Complex64::new(h / 6.0, 0.0), &k4);
    acc
}

/// Repeated stepping with diagnostics every `monitor_every` steps; the final
/// partial step is shortened to land exactly on `t_end`. A non-finite or
/// runaway state aborts with the blow-up marker set and the last finite
/// diagnostics retained.
pub fn evolve(state0: &StateTriple, p: &SystemParams, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let grid = *state0.grid();
    let mut state = state0.to_spectral();

    let mut rows = vec![DiagnosticsRow::compute(0.0, &state, p)];
    let mut snapshots: Vec<(f64, StateTriple)> = Vec::new();
    let mut wanted: Vec<f64> = cfg.snapshot_times.clone();
    wanted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut next_snap = 0usize;
    if wanted.first().is_some_and(|&t| t <= 0.0) {
        snapshots.push((0.0, state.clone()));
        while next_snap < wanted.len() && wanted[next_snap] <= 0.0 {
            next_snap += 1;
        }
    }

    let tiny = cfg.dt * 1e-9;
    let mut t = 0.0;
    let mut step_index = 0usize;
    let mut blowup_at = None;

    while t < cfg.t_end - tiny {
        let h = cfg.dt.min(cfg.t_end - t);
        state = step_ifrk4(&state, p, h, cfg.dealias);
        t += h;
        step_index += 1;

        if !state.is_finite() || state.max_abs() > BLOWUP_THRESHOLD {
            blowup_at = Some(t);
            break;
        }

        let at_end = t >= cfg.t_end - tiny;
        if step_index % cfg.monitor_every == 0 || at_end {
            rows.push(DiagnosticsRow::compute(t, &state, p));
        }
        while next_snap < wanted.len() && t >= wanted[next_snap] - h / 2.0 {
            snapshots.push((t, state.clone()));
            next_snap += 1;
        }
    }

    if blowup_at.is_none()
        && snapshots.last().map(|(ts, _)| (*ts - t).abs() > tiny).unwrap_or(true)
    {
        snapshots.push((t, state.clone()));
    }

    Ok(Trajectory { params: *p, grid, snapshots, rows, blowup_at })
}
