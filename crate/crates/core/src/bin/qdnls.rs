//! `qdnls` — the laboratory's command-line surface.
//!
//! Every subcommand accepts `--config FILE`; flags override file values. When
//! no file is given, a per-command default configuration is synthesized and
//! the flags fill it in. Exit codes: 0 ok, 2 config error, 3 numerical
//! blow-up signal, 4 inconclusive fit, 1 other failure.

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

use qdnls_core::config::{self, RunConfig};
use qdnls_core::run::{self, Outcome};
use qdnls_core::Error;

#[derive(Parser)]
#[command(name = "qdnls", version, about = "Spectral laboratory for a coupled quadratic-derivative Schrödinger system")]
struct Cli {
    /// Configuration file (strict JSON); flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory override.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Seed override (mandatory for randomized operations).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Default)]
struct ParamArgs {
    /// Dispersion coefficient of u.
    #[arg(long)]
    alpha: Option<f64>,
    /// Dispersion coefficient of v.
    #[arg(long)]
    beta: Option<f64>,
    /// Dispersion coefficient of w.
    #[arg(long)]
    gamma: Option<f64>,
    /// Spatial dimension (1 or 2).
    #[arg(long)]
    dim: Option<usize>,
    /// Shorthand: three comma-separated coefficients "a,b,g".
    #[arg(long)]
    params: Option<String>,
}

#[derive(Args, Default)]
struct GridArgs {
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    period: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evolve configured initial data and record diagnostics and snapshots.
    Simulate {
        #[command(flatten)]
        p: ParamArgs,
        #[command(flatten)]
        g: GridArgs,
    },
    /// Report the coefficient algebra and applicable statements; optionally
    /// scan the resonance-symbol lower bound.
    Resonance {
        #[command(flatten)]
        p: ParamArgs,
        /// Enable a scan: one of unconstrained, theta_positive, separated.
        #[arg(long)]
        scan: Option<String>,
        #[arg(long, default_value_t = 8.0)]
        scan_ratio: f64,
        #[arg(long, default_value_t = 32)]
        scan_extent: u32,
        #[arg(long, default_value_t = 0.25)]
        scan_step: f64,
    },
    /// Fit the norm-inflation growth exponent of the second Picard iterate.
    Illposed {
        #[command(flatten)]
        p: ParamArgs,
        /// Case: a (alpha = gamma), b (theta = 0), c (theta < 0).
        #[arg(long)]
        case: Option<char>,
        /// Sobolev regularity of the fit.
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        n_min: Option<f64>,
        #[arg(long)]
        n_max: Option<f64>,
        #[arg(long)]
        t_window: Option<f64>,
    },
    /// Probe the bilinear product-norm constant over dyadic band pairs.
    Bilinear {
        #[command(flatten)]
        p: ParamArgs,
        #[arg(long)]
        l: Option<f64>,
        /// Comma-separated dyadic high bands, e.g. "8,16,32,64".
        #[arg(long)]
        h_list: Option<String>,
        #[arg(long)]
        trials: Option<u32>,
        #[arg(long)]
        t_window: Option<f64>,
    },
    /// Long-time run with free-flow pullbacks at a geometric time ladder.
    Scatter {
        #[command(flatten)]
        p: ParamArgs,
        #[command(flatten)]
        g: GridArgs,
    },
    /// Run the invariant battery and exit 0 on pass.
    Verify,
}

fn default_config(cmd: &Cmd) -> Value {
    let two_pi = 2.0 * std::f64::consts::PI;
    match cmd {
        Cmd::Simulate { .. } => json!({
            "command": "simulate",
            "params": {"alpha": -1.0, "beta": 1.0, "gamma": 1.0, "d": 1},
            "grid": {"n": 256, "period": 10.0 * two_pi},
            "solver": {"dt": 1e-3, "t_end": 1.0, "dealias": true, "monitor_every": 100},
            "experiment": {"simulate": {"initial": {"kind": "gaussian", "amplitude": 0.1, "width": 2.0}}},
            "out_dir": "qdnls-out/simulate"
        }),
        Cmd::Resonance { .. } => json!({
            "command": "resonance",
            "params": {"alpha": -1.0, "beta": 1.0, "gamma": 1.0, "d": 1},
            "grid": {"n": 256, "period": 10.0 * two_pi},
            "solver": {"dt": 1e-3, "t_end": 1.0},
            "experiment": {"resonance": {}},
            "out_dir": "qdnls-out/resonance"
        }),
        Cmd::Illposed { .. } => json!({
            "command": "illposed",
            "params": {"alpha": 1.0, "beta": 1.0, "gamma": 1.0, "d": 1},
            "grid": {"n": 256, "period": 10.0 * two_pi},
            "solver": {"dt": 1e-3, "t_end": 1.0},
            "experiment": {"illposed": {"case": "a", "s": 0.5, "n_min": 16.0, "n_max": 512.0}},
            "out_dir": "qdnls-out/illposed"
        }),
        Cmd::Bilinear { .. } => json!({
            "command": "bilinear",
            "params": {"alpha": 1.0, "beta": 1.0, "gamma": 1.0, "d": 1},
            "grid": {"n": 1024, "period": two_pi},
            "solver": {"dt": 1e-3, "t_end": 1.0},
            "experiment": {"bilinear": {"l": 2.0, "h_list": [8.0, 16.0, 32.0, 64.0, 128.0, 256.0], "trials": 32, "t_window": 1.0}},
            "out_dir": "qdnls-out/bilinear"
        }),
        Cmd::Scatter { .. } => json!({
            "command": "scatter",
            "params": {"alpha": -1.0, "beta": 1.0, "gamma": 1.0, "d": 2},
            "grid": {"n": 128, "period": 20.0 * two_pi},
            "solver": {"dt": 0.02, "t_end": 40.0, "monitor_every": 250},
            "experiment": {"scatter": {"initial": {"kind": "gaussian", "amplitude": 0.05, "width": 6.0, "momenta": [0.0, 0.5, -0.5]}, "ladder": [5.0, 10.0, 20.0, 40.0]}},
            "out_dir": "qdnls-out/scatter"
        }),
        Cmd::Verify => json!({
            "command": "verify",
            "params": {"alpha": -1.0, "beta": 1.0, "gamma": 1.0, "d": 1},
            "grid": {"n": 256, "period": 10.0 * two_pi},
            "solver": {"dt": 1e-3, "t_end": 1.0},
            "experiment": {"verify": {}},
            "out_dir": "qdnls-out/verify"
        }),
    }
}

fn set(value: &mut Value, path: &[&str], v: Value) {
    let mut cur = value;
    for key in &path[..path.len() - 1] {
        cur = cur
            .as_object_mut()
            .expect("config paths are objects")
            .entry(key.to_string())
            .or_insert_with(|| json!({}));
    }
    cur.as_object_mut().unwrap().insert(path.last().unwrap().to_string(), v);
}

fn apply_params(cfg: &mut Value, p: &ParamArgs) -> Result<(), String> {
    if let Some(triple) = &p.params {
        let parts: Vec<&str> = triple.split(',').collect();
        if parts.len() != 3 {
            return Err(format!("--params expects \"a,b,g\", got `{triple}`"));
        }
        let mut vals = [0.0f64; 3];
        for (i, s) in parts.iter().enumerate() {
            vals[i] = s.trim().parse().map_err(|e| format!("--params: {e}"))?;
        }
        set(cfg, &["params", "alpha"], json!(vals[0]));
        set(cfg, &["params", "beta"], json!(vals[1]));
        set(cfg, &["params", "gamma"], json!(vals[2]));
    }
    if let Some(a) = p.alpha {
        set(cfg, &["params", "alpha"], json!(a));
    }
    if let Some(b) = p.beta {
        set(cfg, &["params", "beta"], json!(b));
    }
    if let Some(g) = p.gamma {
        set(cfg, &["params", "gamma"], json!(g));
    }
    if let Some(d) = p.dim {
        set(cfg, &["params", "d"], json!(d));
    }
    Ok(())
}

fn apply_grid(cfg: &mut Value, g: &GridArgs) {
    if let Some(n) = g.n {
        set(cfg, &["grid", "n"], json!(n));
    }
    if let Some(p) = g.period {
        set(cfg, &["grid", "period"], json!(p));
    }
    if let Some(dt) = g.dt {
        set(cfg, &["solver", "dt"], json!(dt));
    }
    if let Some(t) = g.t_end {
        set(cfg, &["solver", "t_end"], json!(t));
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str::<Value>(&text)
                .map_err(|e| Error::config("config", e.to_string()))?
        }
        None => default_config(&cli.command),
    };

    let param_err = |e: String| Error::config("cli", e);
    match &cli.command {
        Cmd::Simulate { p, g } | Cmd::Scatter { p, g } => {
            apply_params(&mut cfg, p).map_err(param_err)?;
            apply_grid(&mut cfg, g);
        }
        Cmd::Resonance { p, scan, scan_ratio, scan_extent, scan_step } => {
            apply_params(&mut cfg, p).map_err(param_err)?;
            if let Some(kind) = scan {
                let condition = match kind.as_str() {
                    "unconstrained" => json!("unconstrained"),
                    "theta_positive" => json!("theta_positive"),
                    "separated" => json!({"separated": {"ratio": scan_ratio}}),
                    other => {
                        return Err(Error::config(
                            "cli",
                            format!("--scan must be unconstrained|theta_positive|separated, got `{other}`"),
                        ))
                    }
                };
                set(
                    &mut cfg,
                    &["experiment", "resonance", "scan"],
                    json!({"condition": condition, "extent": scan_extent, "step": scan_step}),
                );
            }
        }
        Cmd::Illposed { p, case, s, n_min, n_max, t_window } => {
            // pick matching default coefficients when the case is given bare
            if cli.config.is_none() && p.params.is_none() && p.alpha.is_none() {
                match case {
                    Some('b') => {
                        set(&mut cfg, &["params", "alpha"], json!(1.0));
                        set(&mut cfg, &["params", "beta"], json!(2.0));
                        set(&mut cfg, &["params", "gamma"], json!(2.0));
                    }
                    Some('c') => {
                        set(&mut cfg, &["params", "alpha"], json!(2.0));
                        set(&mut cfg, &["params", "beta"], json!(1.0));
                        set(&mut cfg, &["params", "gamma"], json!(1.0));
                    }
                    _ => {}
                }
            }
            apply_params(&mut cfg, p).map_err(param_err)?;
            if let Some(c) = case {
                set(&mut cfg, &["experiment", "illposed", "case"], json!(c.to_string()));
            }
            if let Some(s) = s {
                set(&mut cfg, &["experiment", "illposed", "s"], json!(s));
            }
            if let Some(v) = n_min {
                set(&mut cfg, &["experiment", "illposed", "n_min"], json!(v));
            }
            if let Some(v) = n_max {
                set(&mut cfg, &["experiment", "illposed", "n_max"], json!(v));
            }
            if let Some(v) = t_window {
                set(&mut cfg, &["experiment", "illposed", "t_window"], json!(v));
            }
        }
        Cmd::Bilinear { p, l, h_list, trials, t_window } => {
            apply_params(&mut cfg, p).map_err(param_err)?;
            if let Some(l) = l {
                set(&mut cfg, &["experiment", "bilinear", "l"], json!(l));
            }
            if let Some(hs) = h_list {
                let parsed: Result<Vec<f64>, _> =
                    hs.split(',').map(|x| x.trim().parse::<f64>()).collect();
                let parsed = parsed.map_err(|e| Error::config("cli", format!("--h-list: {e}")))?;
                set(&mut cfg, &["experiment", "bilinear", "h_list"], json!(parsed));
            }
            if let Some(k) = trials {
                set(&mut cfg, &["experiment", "bilinear", "trials"], json!(k));
            }
            if let Some(t) = t_window {
                set(&mut cfg, &["experiment", "bilinear", "t_window"], json!(t));
            }
        }
        Cmd::Verify => {}
    }

    if let Some(out) = &cli.out {
        set(&mut cfg, &["out_dir"], json!(out));
    }
    if let Some(seed) = cli.seed {
        set(&mut cfg, &["seed"], json!(seed));
    }

    config::parse_config(&serde_json::to_string(&cfg).expect("value serializes"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Ok(threads) = std::env::var("QDNLS_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }

    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };

    match run::run(&cfg) {
        Ok(Outcome::Ok) => {
            println!("ok — artifacts in {}", cfg.out_dir.display());
            ExitCode::SUCCESS
        }
        Ok(Outcome::BlowUp) => {
            eprintln!("numerical blow-up signal — partial diagnostics in {}", cfg.out_dir.display());
            ExitCode::from(3)
        }
        Ok(Outcome::InconclusiveFit) => {
            eprintln!("inconclusive fit (r² below gate) — see {}", cfg.out_dir.display());
            ExitCode::from(4)
        }
        Ok(Outcome::VerifyFailed) => {
            eprintln!("verification failed — see {}", cfg.out_dir.display());
            ExitCode::from(1)
        }
        Err(e @ Error::Config { .. }) => {
            eprintln!("config error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
