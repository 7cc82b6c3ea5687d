//! Orchestration: turns a validated [`RunConfig`] into artifacts on disk.
//!
//! Every run writes, atomically into `out_dir`: `config.echo` (canonical
//! serialization), `report.txt` (regime classification banner plus the
//! command summary), and the command's CSVs and snapshots. CSVs carry the
//! config fingerprint in their footer.

use std::fmt::Write as _;
use std::path::Path;

use crate::config::{Experiment, InitialData, RunConfig};
use crate::diagnostics::{scattering_profile, DiagnosticsRow};
use crate::duhamel;
use crate::experiments::{bilinear_ratio, illposed, BilinearConfig};
use crate::field::{random_band_limited, Repr, SpectralField, StateTriple};
use crate::grid::TorusGrid;
use crate::integrator::{evolve, Trajectory};
use crate::io;
use crate::params::SystemParams;
use crate::resonance::{classify_regime, compute_m_factors, modulation_scan};
use crate::verify;
use crate::{Error, Result};

/// Final status of a run, mapped to process exit codes by the CLI
/// (0 ok, 2 config error, 3 blow-up, 4 inconclusive fit).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    BlowUp,
    InconclusiveFit,
    VerifyFailed,
}

/// The standard coupled Gaussian data: every component of each field carries
/// a centered bump a·e^{−|x−ℓ/2|²/width²}, modulated along the first axis by
/// e^{iqx} with per-field q ≈ (0, 1, −1) snapped to grid frequencies.
pub fn gaussian_state(grid: TorusGrid, amplitude: f64, width: f64) -> StateTriple {
    gaussian_state_with_momenta(grid, amplitude, width, [0.0, 1.0, -1.0])
}

/// The reference small-data configuration used by the conservation, order,
/// contraction and scaling measurements: amplitude 0.1, width 2 Gaussians
/// with momenta (0, 4, −4). The v/w modulation keeps the interaction phases
/// fast enough that the stepper's fourth-order truncation error sits well
/// above the rounding floor while conservation drift stays far below its
/// gates.
pub fn reference_gaussian_data(grid: TorusGrid) -> StateTriple {
    gaussian_state_with_momenta(grid, 0.1, 2.0, [0.0, 4.0, -4.0])
}

pub fn gaussian_state_with_momenta(
    grid: TorusGrid,
    amplitude: f64,
    width: f64,
    momenta: [f64; 3],
) -> StateTriple {
    let center = grid.period / 2.0;
    let fundamental = 2.0 * std::f64::consts::PI / grid.period;
    let snap = |q: f64| (q / fundamental).round() * fundamental;
    let bump = move |x: [f64; 2], q: f64| {
        let mut r2 = (x[0] - center) * (x[0] - center);
        if grid.d == 2 {
            r2 += (x[1] - center) * (x[1] - center);
        }
        let envelope = amplitude * (-r2 / (width * width)).exp();
        num_complex::Complex64::from_polar(envelope, snap(q) * x[0])
    };
    let field = |q: f64| SpectralField::from_physical_fn(grid, move |_, x| bump(x, q)).to_spectral();
    StateTriple::new(field(momenta[0]), field(momenta[1]), field(momenta[2])).unwrap()
}

/// Materializes configured initial data on the grid.
pub fn build_initial(grid: TorusGrid, init: &InitialData, seed: Option<u64>) -> Result<StateTriple> {
    match init {
        InitialData::Zero => Ok(StateTriple::zeros(grid, Repr::Spectral)),
        InitialData::Gaussian { amplitude, width, momenta } => {
            Ok(gaussian_state_with_momenta(grid, *amplitude, *width, *momenta))
        }
        InitialData::RandomBand { band, amplitude } => {
            let seed = seed.ok_or_else(|| Error::config("seed", "mandatory for randomized operations"))?;
            let amp: num_complex::Complex64 = (*amplitude).into();
            let u = random_band_limited(grid, *band, seed.wrapping_mul(3).wrapping_add(1))?;
            let v = random_band_limited(grid, *band, seed.wrapping_mul(3).wrapping_add(2))?;
            let w = random_band_limited(grid, *band, seed.wrapping_mul(3).wrapping_add(3))?;
            StateTriple::new(u.scaled(amp), v.scaled(amp), w.scaled(amp))
        }
    }
}

fn regime_banner(p: &SystemParams, grid: &TorusGrid) -> String {
    let r = compute_m_factors(p);
    let regime = classify_regime(p);
    let mut s = String::new();
    let _ = writeln!(
        s,
        "coefficients: alpha = {}, beta = {}, gamma = {}, d = {}, s_c = {}",
        p.alpha,
        p.beta,
        p.gamma,
        p.d,
        p.s_critical()
    );
    let _ = writeln!(
        s,
        "theta = {}  kappa = {}  (alpha-gamma)(beta+gamma) = {}  same sign: {}",
        io::fmt_f64(r.theta),
        io::fmt_f64(r.kappa),
        io::fmt_f64(r.acg_bc),
        r.same_sign
    );
    match (r.m_factor, r.m_plus, r.m_minus) {
        (Some(m), _, _) => {
            let _ = writeln!(s, "degenerate factor M = {}", io::fmt_f64(m));
        }
        (None, Some(mp), Some(mm)) => {
            let _ = writeln!(s, "factor roots M+ = {}, M- = {}", io::fmt_f64(mp), io::fmt_f64(mm));
        }
        _ => {
            let _ = writeln!(s, "no degenerate factors apply");
        }
    }
    let _ = writeln!(s, "applicable statements:");
    if regime.labels.is_empty() {
        let _ = writeln!(s, "  (none of the catalogued statements applies)");
    }
    for (label, bound) in &regime.labels {
        let _ = writeln!(s, "  {label}: {bound}");
    }
    let _ = writeln!(
        s,
        "domain: periodic box, period = {} per axis ({} modes/axis); the continuum problem is posed on all of space — keep data concentrated away from the boundary",
        io::fmt_f64(grid.period),
        grid.n
    );
    s
}

fn write_report(out_dir: &Path, cfg: &RunConfig, body: &str) -> Result<()> {
    let mut text = String::new();
    let _ = writeln!(text, "qdnls run report — command: {}", cfg.command.name());
    text.push_str(&regime_banner(&cfg.params, &cfg.grid));
    text.push('\n');
    text.push_str(body);
    io::atomic_write(&out_dir.join("report.txt"), text.as_bytes())
}

fn diagnostics_rows_csv(rows: &[DiagnosticsRow]) -> Vec<Vec<String>> {
    rows.iter()
        .map(|r| {
            let mut row = vec![
                io::fmt_f64(r.t),
                io::fmt_f64(r.mass),
                io::fmt_f64(r.energy),
                io::fmt_f64(r.grad_sq_u),
                io::fmt_f64(r.grad_sq_v),
                io::fmt_f64(r.grad_sq_w),
                io::fmt_f64(r.f_total),
            ];
            row.extend(r.hs_norms.iter().map(|v| io::fmt_f64(*v)));
            row.push(io::fmt_f64(r.gn_ratio));
            row
        })
        .collect()
}

pub const DIAGNOSTICS_HEADER: [&str; 12] = [
    "t", "mass", "energy", "grad_u", "grad_v", "grad_w", "F", "hs_0", "hs_sc", "hs_half", "hs_1",
    "gn_ratio",
];

fn write_diagnostics(out_dir: &Path, traj: &Trajectory, fp: &str) -> Result<()> {
    io::write_csv(
        &out_dir.join("diagnostics.csv"),
        &DIAGNOSTICS_HEADER,
        &diagnostics_rows_csv(&traj.rows),
        fp,
    )
}

fn write_snapshots(out_dir: &Path, traj: &Trajectory) -> Result<()> {
    for (idx, (t, state)) in traj.snapshots.iter().enumerate() {
        let name = format!("state_{idx:03}_t{t:.6}.qdnls");
        io::write_state_snapshot(&out_dir.join(name), state)?;
    }
    Ok(())
}

/// Executes a validated configuration, writing artifacts into its `out_dir`.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let out_dir = cfg.out_dir.clone();
    std::fs::create_dir_all(&out_dir)?;
    let canonical = cfg.canonical_json();
    io::atomic_write(&out_dir.join("config.echo"), canonical.as_bytes())?;
    let fp = io::fingerprint(&canonical);

    match &cfg.experiment {
        Experiment::Simulate(spec) => {
            let data = build_initial(cfg.grid, &spec.initial, cfg.seed)?;
            let traj = evolve(&data, &cfg.params, &cfg.solver)?;
            write_diagnostics(&out_dir, &traj, &fp)?;
            write_snapshots(&out_dir, &traj)?;
            let mut body = format!(
                "simulate: dt = {}, t_end = {}, dealias = {}\n",
                io::fmt_f64(cfg.solver.dt),
                io::fmt_f64(cfg.solver.t_end),
                cfg.solver.dealias
            );
            if let Some(t) = traj.blowup_at {
                let _ = writeln!(body, "BLOW-UP signal at t = {} (partial diagnostics kept)", io::fmt_f64(t));
                write_report(&out_dir, cfg, &body)?;
                return Ok(Outcome::BlowUp);
            }
            let first = &traj.rows[0];
            let last = traj.rows.last().unwrap();
            let _ = writeln!(
                body,
                "mass drift |ΔM|/M0 = {}",
                io::fmt_f64((last.mass - first.mass).abs() / first.mass.max(1e-300))
            );
            let _ = writeln!(
                body,
                "energy drift |ΔH|/(|H0|+1) = {}",
                io::fmt_f64((last.energy - first.energy).abs() / (first.energy.abs() + 1.0))
            );
            if cfg.params.same_sign() {
                let c_gn = crate::diagnostics::measure_gn_constant(cfg.grid, 200, 7);
                let inputs = crate::diagnostics::AprioriInputs::new(
                    &cfg.params,
                    first.mass,
                    first.energy,
                    c_gn,
                    0.1,
                )?;
                let sup_f = traj.rows.iter().map(|r| r.f_total).fold(0.0f64, f64::max);
                match crate::diagnostics::apriori_bound(&inputs, cfg.params.d) {
                    crate::diagnostics::AprioriOutcome::Bound(b) => {
                        let _ = writeln!(
                            body,
                            "a priori gradient bound: sup F(t) = {} vs bound {} (C_gn = {}, corpus of 200 states)",
                            io::fmt_f64(sup_f),
                            io::fmt_f64(b),
                            io::fmt_f64(c_gn)
                        );
                    }
                    crate::diagnostics::AprioriOutcome::Inapplicable => {
                        let _ = writeln!(
                            body,
                            "a priori gradient bound: smallness gate not met (C_gn = {})",
                            io::fmt_f64(c_gn)
                        );
                    }
                }
            }
            write_report(&out_dir, cfg, &body)?;
            Ok(Outcome::Ok)
        }

        Experiment::Resonance { scan, .. } => {
            let resonance = compute_m_factors(&cfg.params);
            let regime = classify_regime(&cfg.params);
            let mut body = String::from("resonance: see banner above\n");
            let mut machine = serde_json::json!({
                "resonance": resonance,
                "regime": regime,
            });
            if let Some((sigma, condition, extent, step)) = scan {
                let coarse = modulation_scan(sigma, *condition, cfg.params.d, *extent, *step)?;
                let fine = modulation_scan(sigma, *condition, cfg.params.d, *extent, *step / 2.0)?;
                let _ = writeln!(
                    body,
                    "modulation scan: min |symbol|/max|xi|^2 = {} (step {}), {} (step {})",
                    io::fmt_f64(coarse),
                    io::fmt_f64(*step),
                    io::fmt_f64(fine),
                    io::fmt_f64(step / 2.0)
                );
                machine["scan"] = serde_json::json!({
                    "sigma": sigma,
                    "extent": extent,
                    "step": step,
                    "min_ratio": coarse,
                    "min_ratio_half_step": fine,
                });
            }
            io::atomic_write(
                &out_dir.join("resonance.json"),
                serde_json::to_string_pretty(&machine)?.as_bytes(),
            )?;
            write_report(&out_dir, cfg, &body)?;
            Ok(Outcome::Ok)
        }

        Experiment::Illposed { case, s, n_list, t_window, quad_points } => {
            let t_grid = illposed::default_t_grid(*t_window);
            let mut rows = Vec::new();
            let mut pairs = Vec::new();
            for &n in n_list {
                let r = illposed::growth_ratio(case, n, *s, &t_grid, *quad_points)?;
                rows.push(vec![io::fmt_f64(n), io::fmt_f64(r)]);
                pairs.push((n, r));
            }
            io::write_csv(&out_dir.join("illposed.csv"), &["N", "R"], &rows, &fp)?;
            let fit = crate::fit::loglog_fit(&pairs)?;
            let expected = case.variant.expected_slope(*s);
            io::atomic_write(
                &out_dir.join("fit.json"),
                serde_json::to_string_pretty(&serde_json::json!({
                    "case": case.variant.letter().to_string(),
                    "s": s,
                    "slope": fit.slope,
                    "intercept": fit.intercept,
                    "r_squared": fit.r_squared,
                    "expected_slope": expected,
                }))?
                .as_bytes(),
            )?;
            let body = format!(
                "illposed case {}: s = {}, slope = {} (expected {}), r^2 = {}\nphase convention: output frequencies on D1 + D2, phase alpha|xi1|^2 - beta|xi - xi1|^2 - gamma|xi|^2 near-resonant on D1 x D2\n",
                case.variant.letter(),
                io::fmt_f64(*s),
                io::fmt_f64(fit.slope),
                io::fmt_f64(expected),
                io::fmt_f64(fit.r_squared)
            );
            write_report(&out_dir, cfg, &body)?;
            if !fit.conclusive() {
                return Ok(Outcome::InconclusiveFit);
            }
            Ok(Outcome::Ok)
        }

        Experiment::Bilinear { base, h_list } => {
            let mut rows = Vec::new();
            let mut sups = Vec::new();
            for &h in h_list {
                let trial_cfg = BilinearConfig { h_band: h, ..*base };
                let sup = bilinear_ratio(&trial_cfg, &cfg.grid)?;
                rows.push(vec![io::fmt_f64(h), io::fmt_f64(sup)]);
                sups.push(sup);
            }
            io::write_csv(&out_dir.join("bilinear.csv"), &["H", "sup_ratio"], &rows, &fp)?;
            let max = sups.iter().cloned().fold(f64::MIN, f64::max);
            let min = sups.iter().cloned().fold(f64::MAX, f64::min);
            let body = format!(
                "bilinear probe: L = {}, trials = {}, T = {}\nsup_ratio spread max/min = {}\n",
                io::fmt_f64(base.l_band),
                base.trials,
                io::fmt_f64(base.t_window),
                io::fmt_f64(max / min)
            );
            write_report(&out_dir, cfg, &body)?;
            Ok(Outcome::Ok)
        }

        Experiment::Scatter(spec) => {
            let data = build_initial(cfg.grid, &spec.initial, cfg.seed)?;
            let traj = evolve(&data, &cfg.params, &cfg.solver)?;
            write_diagnostics(&out_dir, &traj, &fp)?;
            if let Some(t) = traj.blowup_at {
                let body = format!("BLOW-UP signal at t = {} during the scatter run\n", io::fmt_f64(t));
                write_report(&out_dir, cfg, &body)?;
                return Ok(Outcome::BlowUp);
            }
            let (profile, table) = scattering_profile(&traj, &cfg.params)?;
            let rows: Vec<Vec<String>> = table
                .iter()
                .map(|r| {
                    vec![io::fmt_f64(r.t_from), io::fmt_f64(r.t_to), io::fmt_f64(r.distance)]
                })
                .collect();
            io::write_csv(&out_dir.join("cauchy.csv"), &["t_from", "t_to", "distance"], &rows, &fp)?;
            io::write_state_snapshot(&out_dir.join("profile.qdnls"), &profile)?;
            let decreasing = table.windows(2).all(|w| w[1].distance < w[0].distance);
            let mut body = String::from("scatter: pullback Cauchy table\n");
            for r in &table {
                let _ = writeln!(
                    body,
                    "  [{} -> {}] distance = {}",
                    io::fmt_f64(r.t_from),
                    io::fmt_f64(r.t_to),
                    io::fmt_f64(r.distance)
                );
            }
            let _ = writeln!(body, "strictly decreasing: {decreasing}");
            write_report(&out_dir, cfg, &body)?;
            Ok(Outcome::Ok)
        }

        Experiment::Verify => {
            let results = verify::run_battery();
            let mut body = String::new();
            let mut all_ok = true;
            for r in &results {
                all_ok &= r.passed;
                let _ = writeln!(
                    body,
                    "{} {} — {}",
                    if r.passed { "PASS" } else { "FAIL" },
                    r.name,
                    r.detail
                );
            }
            print!("{body}");
            io::atomic_write(&out_dir.join("verify.txt"), body.as_bytes())?;
            write_report(&out_dir, cfg, "verify: see verify.txt\n")?;
            Ok(if all_ok { Outcome::Ok } else { Outcome::VerifyFailed })
        }
    }
}

/// Picard contraction summary used by the CLI report and the acceptance
/// suite: iterates at the configured horizon and compares against the
/// stepper.
pub struct ContractionProbe {
    pub ratios: Vec<f64>,
    pub converged: bool,
    pub distance_to_evolve: f64,
}

pub fn contraction_probe(
    data: &StateTriple,
    p: &SystemParams,
    t_horizon: f64,
    intervals: usize,
    dt: f64,
) -> Result<ContractionProbe> {
    let (fixed, report) = duhamel::picard_fixed_point(data, p, t_horizon, intervals, 1e-10, 40, true)?;
    let mut cfg = crate::integrator::SolverConfig::new(dt, t_horizon)?;
    cfg.monitor_every = usize::MAX / 2;
    let traj = evolve(data, p, &cfg)?;
    let (tf, final_state) = traj.final_state();
    let distance = match fixed.state_at(*tf) {
        Some(s) => s.sub(final_state)?.sobolev_combined(p.s_critical(), false),
        None => f64::NAN,
    };
    Ok(ContractionProbe {
        ratios: report.ratios(),
        converged: report.converged,
        distance_to_evolve: distance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_state_is_coupled_and_smooth() {
        let grid = TorusGrid::new(1, 256, 20.0 * std::f64::consts::PI).unwrap();
        let s = gaussian_state(grid, 0.1, 2.0);
        assert!(s.u.l2_norm() > 0.0);
        assert!(s.v.l2_norm() > 0.0);
        assert!(s.w.l2_norm() > 0.0);
        // modulated fields have distinct spectra
        assert!(s.u.sub(&s.v).unwrap().l2_norm() > 1e-3);
        // spectrally concentrated: dealiasing removes nothing measurable
        let mut cut = s.u.to_spectral();
        cut.dealias_23();
        let resid = cut.sub(&s.u).unwrap().l2_norm();
        assert!(resid <= 1e-13 * s.u.l2_norm());
    }

    #[test]
    fn zero_initial_data_builds() {
        let grid = TorusGrid::new(1, 32, 5.0).unwrap();
        let s = build_initial(grid, &InitialData::Zero, None).unwrap();
        assert_eq!(s.max_abs(), 0.0);
    }

    #[test]
    fn random_band_initial_needs_seed() {
        let grid = TorusGrid::new(1, 64, 5.0).unwrap();
        let init = InitialData::RandomBand { band: 4.0, amplitude: 0.1 };
        assert!(build_initial(grid, &init, None).is_err());
        let s = build_initial(grid, &init, Some(5)).unwrap();
        assert!((s.u.l2_norm() - 0.1).abs() < 1e-12);
    }
}
