//! Run configuration: strict JSON with path-qualified validation.
//!
//! Unknown keys are rejected everywhere — a silently ignored typo in an
//! experiment name would invalidate scientific output. Every invariant of
//! every referenced type is checked here, before any compute.

use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::experiments::illposed::{IllposedCase, IllposedVariant};
use crate::experiments::BilinearConfig;
use crate::grid::TorusGrid;
use crate::integrator::SolverConfig;
use crate::params::{SigmaTriple, SystemParams};
use crate::resonance::ScanCondition;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Resonance,
    Illposed,
    Bilinear,
    Scatter,
    Verify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Resonance => "resonance",
            Command::Illposed => "illposed",
            Command::Bilinear => "bilinear",
            Command::Scatter => "scatter",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub d: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub n: usize,
    pub period: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSolver {
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "default_true")]
    pub dealias: bool,
    #[serde(default = "default_monitor")]
    pub monitor_every: usize,
}

fn default_true() -> bool {
    true
}
fn default_monitor() -> usize {
    100
}

/// Initial data recipes for the simulation commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Zero,
    /// Centered Gaussian bump of the given amplitude and width on every
    /// component, with per-field plane-wave modulation along the first axis
    /// (wavenumbers snapped to the grid).
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default = "default_momenta")]
        momenta: [f64; 3],
    },
    /// Band-limited complex Gaussian data of unit L² norm times `amplitude`,
    /// independent per field (seeds derived from the run seed).
    RandomBand { band: f64, amplitude: f64 },
}

fn default_momenta() -> [f64; 3] {
    [0.0, 1.0, -1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateSpec {
    pub initial: InitialData,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanConditionSpec {
    Unconstrained,
    ThetaPositive,
    Separated { ratio: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub condition: ScanConditionSpec,
    pub extent: u32,
    pub step: f64,
    /// Defaults to (α, β, γ).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IllposedSpec {
    /// Case letter: a (α = γ), b (θ = 0), c (θ < 0).
    pub case: String,
    pub s: f64,
    pub n_min: f64,
    pub n_max: f64,
    #[serde(default = "default_t_window")]
    pub t_window: f64,
    #[serde(default = "default_quad_points")]
    pub quad_points: usize,
}

fn default_t_window() -> f64 {
    0.1
}
fn default_quad_points() -> usize {
    96
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BilinearSpec {
    pub l: f64,
    pub h_list: Vec<f64>,
    pub trials: u32,
    #[serde(default = "default_bilinear_t")]
    pub t_window: f64,
    /// Default α.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma1: Option<f64>,
    /// Default β.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
}

fn default_bilinear_t() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterSpec {
    pub initial: InitialData,
    #[serde(default = "default_ladder")]
    pub ladder: Vec<f64>,
}

fn default_ladder() -> Vec<f64> {
    vec![5.0, 10.0, 20.0, 40.0]
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySpec {}

/// Exactly one section may be populated, matching `command`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulate: Option<SimulateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resonance: Option<ResonanceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub illposed: Option<IllposedSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bilinear: Option<BilinearSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scatter: Option<ScatterSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifySpec>,
}

impl ExperimentSection {
    fn populated(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.simulate.is_some() {
            v.push("simulate");
        }
        if self.resonance.is_some() {
            v.push("resonance");
        }
        if self.illposed.is_some() {
            v.push("illposed");
        }
        if self.bilinear.is_some() {
            v.push("bilinear");
        }
        if self.scatter.is_some() {
            v.push("scatter");
        }
        if self.verify.is_some() {
            v.push("verify");
        }
        v
    }
}

/// The raw, serializable form. Canonical serialization is the pretty-printed
/// JSON of this struct (fixed field order, shortest round-trip floats).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub command: Command,
    pub params: RawParams,
    pub grid: RawGrid,
    pub solver: RawSolver,
    pub experiment: ExperimentSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub out_dir: String,
}

/// Validated experiment payloads.
#[derive(Debug, Clone)]
pub enum Experiment {
    Simulate(SimulateSpec),
    Resonance {
        spec: ResonanceSpec,
        scan: Option<(SigmaTriple, ScanCondition, u32, f64)>,
    },
    Illposed {
        case: IllposedCase,
        s: f64,
        n_list: Vec<f64>,
        t_window: f64,
        quad_points: usize,
    },
    Bilinear {
        base: BilinearConfig,
        h_list: Vec<f64>,
    },
    Scatter(ScatterSpec),
    Verify,
}

/// A fully validated run description.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub params: SystemParams,
    pub grid: TorusGrid,
    pub solver: SolverConfig,
    pub experiment: Experiment,
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    raw: RawConfig,
}

impl RunConfig {
    /// Canonical serialization; byte-stable for equal configs.
    pub fn canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.raw).expect("config serializes");
        s.push('\n');
        s
    }

    pub fn raw(&self) -> &RawConfig {
        &self.raw
    }
}

fn cfg_err<T>(path: &str, message: impl Into<String>) -> Result<T> {
    Err(Error::config(path, message))
}

/// Parses and fully validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = serde_json::from_str(text)
        .map_err(|e| Error::config("config", e.to_string()))?;
    validate(raw)
}

pub fn validate(raw: RawConfig) -> Result<RunConfig> {
    // params
    for (name, v) in [
        ("params.alpha", raw.params.alpha),
        ("params.beta", raw.params.beta),
        ("params.gamma", raw.params.gamma),
    ] {
        if v == 0.0 || !v.is_finite() {
            return cfg_err(name, "dispersion coefficients must satisfy α, β, γ ∈ R\\{0}");
        }
    }
    if raw.params.d != 1 && raw.params.d != 2 {
        return cfg_err("params.d", format!("dimension must be 1 or 2, got {}", raw.params.d));
    }
    let params = SystemParams::new(raw.params.alpha, raw.params.beta, raw.params.gamma, raw.params.d)
        .map_err(|e| Error::config("params", e.to_string()))?;

    // grid
    if raw.grid.n < 16 || !raw.grid.n.is_power_of_two() {
        return cfg_err("grid.n", format!("must be a power of two ≥ 16, got {}", raw.grid.n));
    }
    if !(raw.grid.period > 0.0) || !raw.grid.period.is_finite() {
        return cfg_err("grid.period", format!("must be positive, got {}", raw.grid.period));
    }
    let grid = TorusGrid::new(params.d, raw.grid.n, raw.grid.period)
        .map_err(|e| Error::config("grid", e.to_string()))?;

    // solver
    if !(raw.solver.dt > 0.0) {
        return cfg_err("solver.dt", format!("must be positive, got {}", raw.solver.dt));
    }
    if !(raw.solver.t_end > 0.0) || raw.solver.dt > raw.solver.t_end {
        return cfg_err(
            "solver.t_end",
            format!("need 0 < dt ≤ t_end, got dt = {}, t_end = {}", raw.solver.dt, raw.solver.t_end),
        );
    }
    if raw.solver.monitor_every == 0 {
        return cfg_err("solver.monitor_every", "must be ≥ 1");
    }
    let mut solver = SolverConfig {
        dt: raw.solver.dt,
        t_end: raw.solver.t_end,
        dealias: raw.solver.dealias,
        monitor_every: raw.solver.monitor_every,
        snapshot_times: Vec::new(),
    };

    // exactly one experiment section, matching the command
    let populated = raw.experiment.populated();
    if populated.len() != 1 {
        return cfg_err(
            "experiment",
            format!("exactly one command section must be populated, found [{}]", populated.join(", ")),
        );
    }
    if populated[0] != raw.command.name() {
        return cfg_err(
            "experiment",
            format!("section `{}` does not match command `{}`", populated[0], raw.command.name()),
        );
    }

    // seed is mandatory for any randomized operation
    let needs_seed = match raw.command {
        Command::Bilinear => true,
        Command::Simulate => matches!(
            raw.experiment.simulate.as_ref().map(|s| &s.initial),
            Some(InitialData::RandomBand { .. })
        ),
        Command::Scatter => matches!(
            raw.experiment.scatter.as_ref().map(|s| &s.initial),
            Some(InitialData::RandomBand { .. })
        ),
        _ => false,
    };
    if needs_seed && raw.seed.is_none() {
        return cfg_err("seed", "mandatory for randomized operations");
    }

    if raw.out_dir.is_empty() {
        return cfg_err("out_dir", "must not be empty");
    }

    let experiment = match raw.command {
        Command::Simulate => {
            let spec = raw.experiment.simulate.clone().unwrap();
            validate_initial("experiment.simulate.initial", &spec.initial, &grid)?;
            solver.snapshot_times = spec.snapshot_times.clone();
            Experiment::Simulate(spec)
        }
        Command::Resonance => {
            let spec = raw.experiment.resonance.clone().unwrap();
            let scan = match &spec.scan {
                None => None,
                Some(s) => {
                    if !(s.step > 0.0) {
                        return cfg_err("experiment.resonance.scan.step", "must be positive");
                    }
                    if s.extent == 0 {
                        return cfg_err("experiment.resonance.scan.extent", "must be ≥ 1");
                    }
                    let sig = s.sigma.unwrap_or([params.alpha, params.beta, params.gamma]);
                    let sigma = SigmaTriple::new(sig[0], sig[1], sig[2]).map_err(|e| {
                        Error::config("experiment.resonance.scan.sigma", e.to_string())
                    })?;
                    let cond = match s.condition {
                        ScanConditionSpec::Unconstrained => ScanCondition::Unconstrained,
                        ScanConditionSpec::ThetaPositive => {
                            if !(sigma.theta_sum() > 0.0) {
                                return cfg_err(
                                    "experiment.resonance.scan.condition",
                                    "theta_positive requires σ₂σ₃ + σ₁σ₃ + σ₁σ₂ > 0",
                                );
                            }
                            ScanCondition::ThetaPositive
                        }
                        ScanConditionSpec::Separated { ratio } => {
                            if !(ratio >= 4.0) {
                                return cfg_err(
                                    "experiment.resonance.scan.condition",
                                    format!("separation ratio must be ≥ 4, got {ratio}"),
                                );
                            }
                            ScanCondition::Separated { ratio }
                        }
                    };
                    Some((sigma, cond, s.extent, s.step))
                }
            };
            Experiment::Resonance { spec, scan }
        }
        Command::Illposed => {
            let spec = raw.experiment.illposed.clone().unwrap();
            let variant = spec
                .case
                .chars()
                .next()
                .and_then(IllposedVariant::from_letter)
                .filter(|_| spec.case.len() == 1);
            let variant = match variant {
                Some(v) => v,
                None => {
                    return cfg_err(
                        "experiment.illposed.case",
                        format!("must be one of a, b, c; got `{}`", spec.case),
                    )
                }
            };
            // regime precondition verified before any compute
            let case = IllposedCase::new(variant, params)
                .map_err(|e| Error::config("experiment.illposed.case", e.to_string()))?;
            if !(spec.n_min >= 16.0) || spec.n_max < spec.n_min {
                return cfg_err(
                    "experiment.illposed.n_min",
                    format!("need 16 ≤ n_min ≤ n_max, got {} .. {}", spec.n_min, spec.n_max),
                );
            }
            if !(spec.t_window > 0.0) {
                return cfg_err("experiment.illposed.t_window", "must be positive");
            }
            if spec.quad_points < 64 {
                return cfg_err("experiment.illposed.quad_points", "need at least 64");
            }
            let mut n_list = Vec::new();
            let mut n = spec.n_min;
            while n <= spec.n_max * (1.0 + 1e-12) {
                n_list.push(n);
                n *= 2.0;
            }
            if n_list.len() < 5 {
                return cfg_err(
                    "experiment.illposed.n_max",
                    format!("dyadic ladder from {} to {} has {} points; need ≥ 5", spec.n_min, spec.n_max, n_list.len()),
                );
            }
            Experiment::Illposed {
                case,
                s: spec.s,
                n_list,
                t_window: spec.t_window,
                quad_points: spec.quad_points,
            }
        }
        Command::Bilinear => {
            let spec = raw.experiment.bilinear.clone().unwrap();
            if spec.h_list.is_empty() {
                return cfg_err("experiment.bilinear.h_list", "must not be empty");
            }
            let base = BilinearConfig {
                sigma1: spec.sigma1.unwrap_or(params.alpha),
                sigma2: spec.sigma2.unwrap_or(params.beta),
                h_band: spec.h_list[0],
                l_band: spec.l,
                trials: spec.trials,
                t_window: spec.t_window,
                seed: raw.seed.unwrap_or(0),
            };
            for &h in &spec.h_list {
                let probe = BilinearConfig { h_band: h, ..base };
                probe
                    .validate()
                    .map_err(|e| Error::config("experiment.bilinear", e.to_string()))?;
                if h >= grid.max_wavenumber() {
                    return cfg_err(
                        "experiment.bilinear.h_list",
                        format!("band {h} is not resolvable on the grid (max |ξ| = {})", grid.max_wavenumber()),
                    );
                }
            }
            Experiment::Bilinear { base, h_list: spec.h_list }
        }
        Command::Scatter => {
            let spec = raw.experiment.scatter.clone().unwrap();
            validate_initial("experiment.scatter.initial", &spec.initial, &grid)?;
            if spec.ladder.len() < 3 {
                return cfg_err("experiment.scatter.ladder", "need at least 3 ladder times");
            }
            let mut sorted = spec.ladder.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            if sorted != spec.ladder || sorted.iter().any(|&t| t <= 0.0) {
                return cfg_err("experiment.scatter.ladder", "times must be positive and increasing");
            }
            if *sorted.last().unwrap() > raw.solver.t_end * (1.0 + 1e-12) {
                return cfg_err(
                    "experiment.scatter.ladder",
                    "ladder exceeds solver.t_end",
                );
            }
            solver.snapshot_times = sorted;
            Experiment::Scatter(spec)
        }
        Command::Verify => Experiment::Verify,
    };

    Ok(RunConfig {
        command: raw.command,
        params,
        grid,
        solver,
        experiment,
        seed: raw.seed,
        out_dir: PathBuf::from(&raw.out_dir),
        raw,
    })
}

fn validate_initial(path: &str, init: &InitialData, grid: &TorusGrid) -> Result<()> {
    match init {
        InitialData::Zero => Ok(()),
        InitialData::Gaussian { amplitude, width, .. } => {
            if !(*amplitude >= 0.0) || !amplitude.is_finite() {
                return cfg_err(path, format!("amplitude must be ≥ 0, got {amplitude}"));
            }
            if !(*width > 0.0) || *width > grid.period / 4.0 {
                return cfg_err(
                    path,
                    format!("width must lie in (0, period/4], got {width} on period {}", grid.period),
                );
            }
            Ok(())
        }
        InitialData::RandomBand { band, amplitude } => {
            if !(*amplitude >= 0.0) {
                return cfg_err(path, "amplitude must be ≥ 0");
            }
            if !(*band > 0.0) || *band >= grid.max_wavenumber() {
                return cfg_err(
                    path,
                    format!("band {band} is not resolvable (max |ξ| = {})", grid.max_wavenumber()),
                );
            }
            Ok(())
        }
    }
}
