//! The invariant battery behind `qdnls verify`: algebra identities at scale,
//! transform contracts, and serialization round trips. Everything here is
//! deterministic and runs in seconds.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::{random_band_limited, SpectralField, StateTriple};
use crate::grid::TorusGrid;
use crate::params::{SigmaTriple, SystemParams};
use crate::resonance::{
    self, compute_kappa, compute_m_factors, compute_theta, FactorizationCase, ScanCondition,
};
use crate::{diagnostics, io};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &str, passed: bool, detail: String) -> CheckResult {
    CheckResult { name: name.to_string(), passed, detail }
}

fn random_params(rng: &mut ChaCha8Rng) -> SystemParams {
    loop {
        let a = rng.gen_range(-6.0..6.0);
        let b = rng.gen_range(-6.0..6.0);
        let g = rng.gen_range(-6.0..6.0);
        if let Ok(p) = SystemParams::new(a, b, g, 1) {
            return p;
        }
    }
}

fn theta_division_free() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut worst = 0.0f64;
    for _ in 0..100_000 {
        let p = random_params(&mut rng);
        let t1 = compute_theta(&p);
        let t2 = p.alpha * p.beta * p.gamma * (1.0 / p.alpha - 1.0 / p.beta - 1.0 / p.gamma);
        let scale = (p.beta * p.gamma).abs() + (p.alpha * p.gamma).abs() + (p.alpha * p.beta).abs();
        worst = worst.max((t1 - t2).abs() / (f64::EPSILON * scale));
    }
    check(
        "theta division-free identity",
        worst <= 4.0,
        format!("worst deviation {worst:.2} ulps over 1e5 samples (gate 4)"),
    )
}

fn theta_nonneg_kappa() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut min_kappa = f64::INFINITY;
    let mut counterexamples = 0usize;
    let mut hits = 0usize;
    for _ in 0..100_000 {
        let p = random_params(&mut rng);
        if compute_theta(&p) >= 0.0 {
            hits += 1;
            let k = compute_kappa(&p).abs();
            min_kappa = min_kappa.min(k);
            if k == 0.0 {
                counterexamples += 1;
            }
        }
    }
    check(
        "theta >= 0 implies kappa != 0",
        counterexamples == 0 && hits > 0,
        format!("{hits} qualifying samples, min |kappa| = {min_kappa:.3e}, counterexamples {counterexamples}"),
    )
}

fn vieta() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    while checked < 10_000 {
        let p = random_params(&mut rng);
        let r = compute_m_factors(&p);
        if let (Some(mp), Some(mm)) = (r.m_plus, r.m_minus) {
            let ag = p.alpha - p.gamma;
            // Residuals are relative to the magnitude scale of the terms:
            // the roots carry rounding of size ε·(|M₊|+|M₋|), which the sum
            // and product inherit even where the target itself is tiny.
            let scale_sum = (ag * (mp.abs() + mm.abs())).abs() + (2.0 * p.gamma).abs();
            let e1 = (ag * (mp + mm) - 2.0 * p.gamma).abs() / scale_sum;
            let scale_prod = ag.abs() * (mp.abs() + mm.abs()).powi(2) + (p.beta + p.gamma).abs();
            let e2 = (ag * mp * mm + (p.beta + p.gamma)).abs() / scale_prod;
            worst = worst.max(e1).max(e2);
            checked += 1;
        }
    }
    check(
        "Vieta relations for M±",
        worst <= 1e-12,
        format!("worst relative residual {worst:.3e} over 1e4 samples (gate 1e-12)"),
    )
}

fn factorizations() -> CheckResult {
    let cases = [
        (
            "alpha_eq_gamma",
            FactorizationCase::AlphaEqGamma(SystemParams::new(1.5, -0.7, 1.5, 2).unwrap()),
        ),
        (
            "theta_zero",
            FactorizationCase::ThetaZero(SystemParams::with_theta_zero(1.0, 2.0, 1).unwrap()),
        ),
        (
            "theta_negative",
            FactorizationCase::ThetaNegative(SystemParams::new(2.0, 1.0, 1.0, 1).unwrap()),
        ),
        (
            "one_d_sum_zero",
            FactorizationCase::OneDSumZero(SigmaTriple::new(1.25, -1.25, 2.0).unwrap()),
        ),
    ];
    let mut worst = 0.0f64;
    let mut detail = String::new();
    let mut ok = true;
    for (i, (name, case)) in cases.into_iter().enumerate() {
        match resonance::factorization_check(case, 10_000, 404 + i as u64) {
            Ok(r) => {
                worst = worst.max(r);
                detail.push_str(&format!("{name} {r:.2e}; "));
            }
            Err(e) => {
                ok = false;
                detail.push_str(&format!("{name} ERROR {e}; "));
            }
        }
    }
    check(
        "symbol factorizations (incl. (alpha-gamma) leading factor)",
        ok && worst <= 1e-12,
        format!("{detail}gate 1e-12"),
    )
}

fn modulation() -> CheckResult {
    let s_unit = SigmaTriple::new(1.0, 1.0, 1.0).unwrap();
    let unit = resonance::modulation_scan(&s_unit, ScanCondition::ThetaPositive, 1, 16, 0.5);
    let s_mixed = SigmaTriple::new(1.0, -2.0, 1.0).unwrap();
    let cond = ScanCondition::Separated { ratio: 8.0 };
    let coarse = resonance::modulation_scan(&s_mixed, cond, 1, 32, 0.25);
    let fine = resonance::modulation_scan(&s_mixed, cond, 1, 32, 0.125);
    match (unit, coarse, fine) {
        (Ok(u), Ok(c), Ok(f)) => {
            let stable = (f - c).abs() <= 0.1 * c;
            check(
                "modulation lower bound scan",
                u >= 1.0 && c > 0.0 && f > 0.0 && stable,
                format!("unit-sigma min {u:.3}, separated min {c:.4} -> {f:.4} under step halving"),
            )
        }
        (u, c, f) => check(
            "modulation lower bound scan",
            false,
            format!("errors: {:?} {:?} {:?}", u.err(), c.err(), f.err()),
        ),
    }
}

fn transforms() -> CheckResult {
    let mut ok = true;
    let mut detail = String::new();
    for (d, n) in [(1usize, 128usize), (2, 32)] {
        let grid = TorusGrid::new(d, n, 9.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7 + d as u64);
        let f = SpectralField::from_physical_fn(grid, |_, _| {
            num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let round = f.to_spectral().to_physical().sub(&f).unwrap().l2_norm() / f.l2_norm();
        let parseval = (f.l2_norm() - f.to_spectral().l2_norm()).abs() / f.l2_norm();
        ok &= round <= 1e-13 && parseval <= 1e-12;
        detail.push_str(&format!("d={d}: roundtrip {round:.1e}, parseval {parseval:.1e}; "));
    }
    check("transform round trip + Parseval", ok, detail)
}

fn partition_and_propagator() -> CheckResult {
    let grid = TorusGrid::new(1, 256, 20.0 * std::f64::consts::PI).unwrap();
    let f = random_band_limited(grid, 4.0, 11).unwrap();
    // partition of unity across the dyadic ladder
    let mut sum = f.lp_project_low(1.0);
    let mut band = 1.0;
    while band <= 2.0 * grid.max_wavenumber() {
        sum.axpy(1.0.into(), &f.lp_project(band));
        band *= 2.0;
    }
    let partition = sum.sub(&f).unwrap().l2_norm() / f.l2_norm();

    // free flow group law and Sobolev preservation
    let a = f.free_evolve(1.7, 0.4).free_evolve(1.7, 0.35);
    let b = f.free_evolve(1.7, 0.75);
    let group = a.sub(&b).unwrap().l2_norm() / f.l2_norm();
    let hs = (f.sobolev_norm(1.0, false) - b.sobolev_norm(1.0, false)).abs() / f.sobolev_norm(1.0, false);

    check(
        "dyadic partition + free propagator",
        partition <= 1e-12 && group <= 1e-12 && hs <= 1e-12,
        format!("partition {partition:.1e}, group law {group:.1e}, H^1 preservation {hs:.1e}"),
    )
}

fn scaling() -> CheckResult {
    let grid = TorusGrid::new(2, 32, 6.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let f = SpectralField::from_physical_fn(grid, |_, _| {
        num_complex::Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let a = f.rescaled(2.0).unwrap().rescaled(4.0).unwrap();
    let b = f.rescaled(8.0).unwrap();
    let comp = a.sub(&b).unwrap().l2_norm() / b.l2_norm();
    let sc = 0.0; // d = 2
    let crit = (f.rescaled(2.0).unwrap().sobolev_norm(sc, true) / f.sobolev_norm(sc, true) - 1.0).abs();
    check(
        "rescaling composition + critical invariance",
        comp <= 1e-12 && crit <= 1e-10,
        format!("composition {comp:.1e}, critical ratio deviation {crit:.1e}"),
    )
}

fn conserved_functionals() -> CheckResult {
    let grid = TorusGrid::new(1, 128, 11.0).unwrap();
    let u = random_band_limited(grid, 2.0, 21).unwrap();
    let v = random_band_limited(grid, 4.0, 22).unwrap();
    let w = random_band_limited(grid, 2.0, 23).unwrap();
    let state = StateTriple::new(u, v, w).unwrap();
    let m0 = diagnostics::mass(&state);
    let moved = StateTriple::new(
        state.u.free_evolve(0.9, 1.3),
        state.v.free_evolve(-2.1, 1.3),
        state.w.free_evolve(1.4, 1.3),
    )
    .unwrap();
    let dm = (diagnostics::mass(&moved) - m0).abs() / m0;
    let g0 = diagnostics::grad_norm_sq(&state.w);
    let dg = (diagnostics::grad_norm_sq(&moved.w) - g0).abs() / g0;
    check(
        "mass/gradient invariance under decoupled free flow",
        dm <= 1e-12 && dg <= 1e-12,
        format!("mass {dm:.1e}, gradient {dg:.1e}"),
    )
}

fn serialization() -> CheckResult {
    let grid = TorusGrid::new(1, 32, 4.0).unwrap();
    let f = random_band_limited(grid, 4.0, 31).unwrap();
    let state = StateTriple::new(f.clone(), f.clone(), f).unwrap();
    let bytes = io::encode_state(&state);
    let round = matches!(io::decode_snapshot(&bytes), Ok(io::Snapshot::State(s)) if s == state);
    let det = random_band_limited(grid, 4.0, 31).unwrap() == state.u;
    check(
        "snapshot round trip + seeded determinism",
        round && det,
        format!("snapshot round trip {round}, band-data determinism {det}"),
    )
}

fn symbol_permutation() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let s = [
            rng.gen_range(0.2..3.0),
            rng.gen_range(-3.0..-0.2),
            rng.gen_range(0.2..3.0),
        ];
        let x = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
        let x3 = -(x[0] + x[1]);
        let t0 = SigmaTriple::new(s[0], s[1], s[2]).unwrap();
        let t1 = SigmaTriple::new(s[1], s[2], s[0]).unwrap();
        let v0 = resonance::resonance_symbol(&t0, &[x[0]], &[x[1]]).unwrap();
        let v1 = resonance::resonance_symbol(&t1, &[x[1]], &[x3]).unwrap();
        worst = worst.max((v0 - v1).abs() / v0.abs().max(1.0));
    }
    check(
        "resonance symbol permutation invariance",
        worst <= 1e-12,
        format!("worst relative deviation {worst:.2e}"),
    )
}

/// Runs every check; each returns one pass/fail line.
pub fn run_battery() -> Vec<CheckResult> {
    vec![
        theta_division_free(),
        theta_nonneg_kappa(),
        vieta(),
        factorizations(),
        symbol_permutation(),
        modulation(),
        transforms(),
        partition_and_propagator(),
        scaling(),
        conserved_functionals(),
        serialization(),
    ]
}

#[cfg(test)]
mod tests {
    #[test]
    fn battery_is_green() {
        for r in super::run_battery() {
            assert!(r.passed, "{}: {}", r.name, r.detail);
        }
    }
}
