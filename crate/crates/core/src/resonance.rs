//! Exact algebra in the dispersion coefficients.
//!
//! Everything here is a closed-form function of (α, β, γ): the discriminants
//! θ = αβγ(1/α − 1/β − 1/γ) and κ = (α − β)(α − γ)(β + γ), the factors M and
//! M± of the degenerate frequency-box constructions, which well-posedness /
//! ill-posedness statements apply, and brute-force residual checks of the
//! quadratic-symbol factorizations those constructions rely on.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::params::{SigmaTriple, SystemParams};
use crate::{Error, Result};

/// θ = αβγ(1/α − 1/β − 1/γ), evaluated division-free as βγ − αγ − αβ.
///
/// The two forms agree to a few ulps; the division-free one avoids
/// cancellation blow-up for tiny coefficients.
pub fn compute_theta(p: &SystemParams) -> f64 {
    p.beta * p.gamma - p.alpha * p.gamma - p.alpha * p.beta
}

/// κ = (α − β)(α − γ)(β + γ).
pub fn compute_kappa(p: &SystemParams) -> f64 {
    (p.alpha - p.beta) * (p.alpha - p.gamma) * (p.beta + p.gamma)
}

/// Derived algebra of a coefficient triple: θ, κ, (α−γ)(β+γ), and the
/// degenerate-case factors when they exist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResonanceReport {
    pub params: SystemParams,
    pub theta: f64,
    pub kappa: f64,
    /// (α − γ)(β + γ); its vanishing selects the first ill-posedness case.
    pub acg_bc: f64,
    pub same_sign: bool,
    /// M = −(β+γ)/2γ when α = γ, or M = γ/(α−γ) when θ = 0.
    pub m_factor: Option<f64>,
    /// Roots M± = γ/(α−γ) ± √(−θ)/(α−γ) of the symbol factorization,
    /// present iff θ < 0 and α ≠ γ. Then M₊ ≠ M₋.
    pub m_plus: Option<f64>,
    pub m_minus: Option<f64>,
}

/// Fills the degenerate-case factors that apply to `p`. A factor is absent
/// exactly when its defining denominator vanishes (absence encodes
/// inapplicability, not an error).
pub fn compute_m_factors(p: &SystemParams) -> ResonanceReport {
    let theta = compute_theta(p);
    let kappa = compute_kappa(p);
    let acg_bc = (p.alpha - p.gamma) * (p.beta + p.gamma);

    let m_factor = if p.alpha == p.gamma {
        Some(-(p.beta + p.gamma) / (2.0 * p.gamma))
    } else if theta == 0.0 {
        Some(p.gamma / (p.alpha - p.gamma))
    } else {
        None
    };

    let (m_plus, m_minus) = if theta < 0.0 && p.alpha != p.gamma {
        let root = (-theta).sqrt() / (p.alpha - p.gamma);
        let base = p.gamma / (p.alpha - p.gamma);
        (Some(base + root), Some(base - root))
    } else {
        (None, None)
    };

    ResonanceReport {
        params: *p,
        theta,
        kappa,
        acg_bc,
        same_sign: p.same_sign(),
        m_factor,
        m_plus,
        m_minus,
    }
}

/// Identifiers of the applicable well-posedness / ill-posedness statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremLabel {
    /// Small-data global well-posedness at critical regularity (homogeneous).
    T11i,
    /// Same, in the inhomogeneous space for s ≥ s_c.
    T11ii,
    /// Local well-posedness, d ≥ 4 branch (never fires for d ≤ 2).
    T14i,
    /// Local well-posedness, d = 2, 3 branch.
    T14ii,
    /// Local well-posedness, d = 1 branch.
    T14iii,
    /// Global extension of L² solutions (d = 1, θ > 0).
    T15i,
    /// Small-data global H¹ solutions (same-sign coefficients).
    T15ii,
    /// Flow map not C² below the stated regularity.
    T16,
}

impl fmt::Display for TheoremLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TheoremLabel::T11i => "T1.1(i)",
            TheoremLabel::T11ii => "T1.1(ii)",
            TheoremLabel::T14i => "T1.4(i)",
            TheoremLabel::T14ii => "T1.4(ii)",
            TheoremLabel::T14iii => "T1.4(iii)",
            TheoremLabel::T15i => "T1.5(i)",
            TheoremLabel::T15ii => "T1.5(ii)",
            TheoremLabel::T16 => "T1.6",
        };
        f.write_str(s)
    }
}

/// Range of Sobolev exponents a statement covers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SobolevBound {
    /// Applies for every s ∈ R.
    AllReals,
    /// Applies for s ≥ value (or s > value when `strict`).
    AtLeast { s: f64, strict: bool },
    /// Applies for s ≤ value (or s < value when `strict`); used by the
    /// ill-posedness statement, which degrades as regularity drops.
    Below { s: f64, strict: bool },
}

impl fmt::Display for SobolevBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SobolevBound::AllReals => write!(f, "s ∈ R"),
            SobolevBound::AtLeast { s, strict: true } => write!(f, "s > {s}"),
            SobolevBound::AtLeast { s, strict: false } => write!(f, "s ≥ {s}"),
            SobolevBound::Below { s, strict: true } => write!(f, "s < {s}"),
            SobolevBound::Below { s, strict: false } => write!(f, "s ≤ {s}"),
        }
    }
}

/// Every theorem whose hypotheses hold for the housed parameters, with the
/// Sobolev range each one promises. Ties are all reported; no "best" pick.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub resonance: ResonanceReport,
    pub labels: Vec<(TheoremLabel, SobolevBound)>,
}

impl RegimeReport {
    pub fn contains(&self, label: TheoremLabel) -> bool {
        self.labels.iter().any(|(l, _)| *l == label)
    }

    pub fn bound(&self, label: TheoremLabel) -> Option<SobolevBound> {
        self.labels.iter().find(|(l, _)| *l == label).map(|(_, b)| *b)
    }
}

/// Checks each statement's hypotheses against (α, β, γ, d).
///
/// Degenerate branches (θ = 0, α = β, α = γ) use exact float equality: the
/// constructors that produce degenerate parameter sets solve the constraint
/// exactly, so equality is the honest test.
pub fn classify_regime(p: &SystemParams) -> RegimeReport {
    let r = compute_m_factors(p);
    let sc = p.s_critical();
    let mut labels = Vec::new();

    // Small-data critical well-posedness: θ > 0 for d = 2, 3 (κ ≠ 0 for d ≥ 4
    // is out of reach on this lab's grids).
    if p.d == 2 && r.theta > 0.0 {
        labels.push((TheoremLabel::T11i, SobolevBound::AtLeast { s: sc, strict: false }));
        labels.push((TheoremLabel::T11ii, SobolevBound::AtLeast { s: sc, strict: false }));
    }

    // Local well-posedness, d = 2 branch.
    if p.d == 2 {
        if r.theta > 0.0 {
            labels.push((TheoremLabel::T14ii, SobolevBound::AtLeast { s: sc, strict: true }));
        } else if p.alpha == p.beta {
            labels.push((TheoremLabel::T14ii, SobolevBound::AtLeast { s: 1.0, strict: true }));
        } else if r.kappa != 0.0 {
            labels.push((TheoremLabel::T14ii, SobolevBound::AtLeast { s: 1.0, strict: false }));
        }
    }

    // Local well-posedness, d = 1 branch.
    if p.d == 1 {
        if r.theta > 0.0 {
            labels.push((TheoremLabel::T14iii, SobolevBound::AtLeast { s: 0.0, strict: false }));
        } else if r.theta == 0.0 {
            labels.push((TheoremLabel::T14iii, SobolevBound::AtLeast { s: 1.0, strict: false }));
        } else if r.acg_bc != 0.0 {
            labels.push((TheoremLabel::T14iii, SobolevBound::AtLeast { s: 0.5, strict: false }));
        }
    }

    // Global L² extension for d = 1, θ > 0.
    if p.d == 1 && r.theta > 0.0 {
        labels.push((TheoremLabel::T15i, SobolevBound::AtLeast { s: 0.0, strict: false }));
    }

    // Small-data global H¹: same-sign coefficients plus a nondegeneracy
    // condition that depends on the dimension.
    if r.same_sign {
        let nondegenerate = match p.d {
            1 => r.acg_bc != 0.0,
            _ => r.kappa != 0.0,
        };
        if nondegenerate {
            labels.push((TheoremLabel::T15ii, SobolevBound::AtLeast { s: 1.0, strict: false }));
        }
    }

    // Failure of C² regularity of the flow map; the strongest applicable
    // branch is reported.
    if r.acg_bc == 0.0 {
        labels.push((TheoremLabel::T16, SobolevBound::AllReals));
    } else if r.theta == 0.0 {
        labels.push((TheoremLabel::T16, SobolevBound::Below { s: 1.0, strict: true }));
    } else if r.theta < 0.0 {
        labels.push((TheoremLabel::T16, SobolevBound::Below { s: 0.5, strict: true }));
    }

    RegimeReport { resonance: r, labels }
}

/// σ₁|ξ₁|² + σ₂|ξ₂|² + σ₃|ξ₃|² on the hyperplane ξ₁ + ξ₂ + ξ₃ = 0.
///
/// Its magnitude lower-bounds 3·max_j |τ_j + σ_j|ξ_j|²| over every choice of
/// modulations τ summing to zero, which is how the scan below eliminates the
/// τ variables analytically.
pub fn resonance_symbol(s: &SigmaTriple, xi1: &[f64], xi2: &[f64]) -> Result<f64> {
    if xi1.len() != xi2.len() {
        return Err(Error::DimensionMismatch(format!(
            "ξ₁ has dimension {}, ξ₂ has dimension {}",
            xi1.len(),
            xi2.len()
        )));
    }
    let mut n1 = 0.0;
    let mut n2 = 0.0;
    let mut n3 = 0.0;
    for (a, b) in xi1.iter().zip(xi2) {
        let c = -(a + b);
        n1 += a * a;
        n2 += b * b;
        n3 += c * c;
    }
    Ok(s.sigma1 * n1 + s.sigma2 * n2 + s.sigma3 * n3)
}

/// Admissibility filter for [`modulation_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ScanCondition {
    /// No filter; exact resonances are reachable and the scan can return 0.
    Unconstrained,
    /// Keep triples where some |ξ_i| ≤ |ξ_j|/ratio (frequency separation).
    Separated { ratio: f64 },
    /// No frequency filter, but requires σ₁σ₂σ₃(1/σ₁ + 1/σ₂ + 1/σ₃) > 0.
    ThetaPositive,
}

/// Minimum of |symbol| / max_j |ξ_j|² over lattice triples ξ₁ + ξ₂ + ξ₃ = 0
/// with ξ₁, ξ₂ ∈ [−E, E]^d \ {0} on the given step, restricted by `condition`.
///
/// A strictly positive, refinement-stable result certifies the modulation
/// lower bound max_j |τ_j + σ_j|ξ_j|²| ≳ max_j |ξ_j|² at symbol level.
pub fn modulation_scan(
    s: &SigmaTriple,
    condition: ScanCondition,
    dim: usize,
    extent: u32,
    step: f64,
) -> Result<f64> {
    if dim != 1 && dim != 2 {
        return Err(Error::InvalidParams(format!("scan dimension {dim} must be 1 or 2")));
    }
    if extent == 0 || !(step > 0.0) {
        return Err(Error::InvalidParams("scan needs extent ≥ 1 and step > 0".into()));
    }
    match condition {
        ScanCondition::Separated { ratio } if !(ratio >= 4.0) => {
            return Err(Error::InvalidParams(format!(
                "separation ratio {ratio} must be ≥ 4"
            )));
        }
        ScanCondition::ThetaPositive if !(s.theta_sum() > 0.0) => {
            return Err(Error::CaseCondition(format!(
                "theta_positive scan needs σ₂σ₃ + σ₁σ₃ + σ₁σ₂ > 0, got {}",
                s.theta_sum()
            )));
        }
        _ => {}
    }

    let k_max = (extent as f64 / step).floor() as i64;
    if k_max == 0 {
        return Err(Error::EmptyAdmissibleSet(
            "step larger than extent leaves no nonzero lattice points".into(),
        ));
    }
    let axis: Vec<f64> = (-k_max..=k_max).map(|k| k as f64 * step).collect();

    // Enumerate ξ₁ in parallel; min-reduction is order-independent.
    let points: Vec<Vec<f64>> = if dim == 1 {
        axis.iter().map(|&x| vec![x]).collect()
    } else {
        axis.iter()
            .flat_map(|&x| axis.iter().map(move |&y| vec![x, y]))
            .collect()
    };

    let min = points
        .par_iter()
        .filter(|xi1| xi1.iter().any(|&c| c != 0.0))
        .map(|xi1| {
            let mut local = f64::INFINITY;
            for xi2 in &points {
                if !xi2.iter().any(|&c| c != 0.0) {
                    continue;
                }
                let (m1, m2, m3) = {
                    let mut n1 = 0.0;
                    let mut n2 = 0.0;
                    let mut n3 = 0.0;
                    for (a, b) in xi1.iter().zip(xi2) {
                        let c = -(a + b);
                        n1 += a * a;
                        n2 += b * b;
                        n3 += c * c;
                    }
                    (n1, n2, n3)
                };
                let max_sq = m1.max(m2).max(m3);
                if let ScanCondition::Separated { ratio } = condition {
                    // some |ξ_i| ≤ |ξ_j|/ratio  ⇔  min² ≤ max²/ratio².
                    let min_sq = m1.min(m2).min(m3);
                    if min_sq * ratio * ratio > max_sq {
                        continue;
                    }
                }
                let symbol = s.sigma1 * m1 + s.sigma2 * m2 + s.sigma3 * m3;
                local = local.min(symbol.abs() / max_sq);
            }
            local
        })
        .reduce(|| f64::INFINITY, f64::min);

    if min.is_infinite() {
        return Err(Error::EmptyAdmissibleSet(
            "no frequency triple satisfies the admissibility condition".into(),
        ));
    }
    Ok(min)
}

/// Which factorization identity of the quadratic symbol
/// α|ξ₁|² − β|ξ − ξ₁|² − γ|ξ|² (or its σ-triple analogue) to verify.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FactorizationCase {
    /// α = γ:  symbol = −2γ{ξ₁ − M(ξ−ξ₁)}·(ξ−ξ₁) with M = −(β+γ)/2γ.
    /// (The leading sign comes from expanding the square; see the residual
    /// test.)
    AlphaEqGamma(SystemParams),
    /// θ = 0:  symbol = (α−γ)|ξ₁ − M(ξ−ξ₁)|² with M = γ/(α−γ).
    ThetaZero(SystemParams),
    /// θ < 0:  symbol = (α−γ){ξ₁ − M₊(ξ−ξ₁)}·{ξ₁ − M₋(ξ−ξ₁)}.
    /// The leading factor is (α−γ): (α−γ)M₊M₋ = −(β+γ) by Vieta.
    ThetaNegative(SystemParams),
    /// σ₁ + σ₂ = 0, d = 1:  σ₁ξ₁² + σ₂ξ₂² + σ₃ξ₃² = ξ₃{(σ₁+σ₃)ξ₃ + 2σ₁ξ₂}
    /// on ξ₁ + ξ₂ + ξ₃ = 0.
    OneDSumZero(SigmaTriple),
}

/// Evaluates both sides of the case's identity on `trials` random frequency
/// pairs and returns the worst residual, normalized by the magnitude scale
/// |α||ξ₁|² + |β||ξ−ξ₁|² + |γ||ξ|² of the symbol (so exact cancellations at
/// resonant points do not masquerade as errors).
pub fn factorization_check(case: FactorizationCase, trials: u32, seed: u64) -> Result<f64> {
    match &case {
        FactorizationCase::AlphaEqGamma(p) => {
            if p.alpha != p.gamma {
                return Err(Error::CaseCondition(format!(
                    "alpha_eq_gamma needs α = γ, got α = {}, γ = {}",
                    p.alpha, p.gamma
                )));
            }
        }
        FactorizationCase::ThetaZero(p) => {
            if compute_theta(p) != 0.0 {
                return Err(Error::CaseCondition(format!(
                    "theta_zero needs θ = 0 exactly, got θ = {}",
                    compute_theta(p)
                )));
            }
            if p.alpha == p.gamma {
                return Err(Error::CaseCondition("theta_zero needs α ≠ γ".into()));
            }
        }
        FactorizationCase::ThetaNegative(p) => {
            if !(compute_theta(p) < 0.0) || p.alpha == p.gamma {
                return Err(Error::CaseCondition(format!(
                    "theta_negative needs θ < 0 and α ≠ γ, got θ = {}",
                    compute_theta(p)
                )));
            }
        }
        FactorizationCase::OneDSumZero(s) => {
            if s.sigma1 + s.sigma2 != 0.0 {
                return Err(Error::CaseCondition(format!(
                    "one_d_sum_zero needs σ₁ + σ₂ = 0, got {}",
                    s.sigma1 + s.sigma2
                )));
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let (lhs, rhs, scale) = match &case {
            FactorizationCase::AlphaEqGamma(p)
            | FactorizationCase::ThetaZero(p)
            | FactorizationCase::ThetaNegative(p) => {
                let d = p.d;
                let xi: Vec<f64> = (0..d).map(|_| rng.gen_range(-8.0..8.0)).collect();
                let xi1: Vec<f64> = (0..d).map(|_| rng.gen_range(-8.0..8.0)).collect();
                let eta: Vec<f64> = xi.iter().zip(&xi1).map(|(a, b)| a - b).collect();
                let n_xi1: f64 = xi1.iter().map(|c| c * c).sum();
                let n_eta: f64 = eta.iter().map(|c| c * c).sum();
                let n_xi: f64 = xi.iter().map(|c| c * c).sum();
                let lhs = p.alpha * n_xi1 - p.beta * n_eta - p.gamma * n_xi;
                let scale =
                    p.alpha.abs() * n_xi1 + p.beta.abs() * n_eta + p.gamma.abs() * n_xi;
                let rhs = match &case {
                    FactorizationCase::AlphaEqGamma(_) => {
                        let m = -(p.beta + p.gamma) / (2.0 * p.gamma);
                        let dot: f64 = xi1
                            .iter()
                            .zip(&eta)
                            .map(|(x1, e)| (x1 - m * e) * e)
                            .sum();
                        -2.0 * p.gamma * dot
                    }
                    FactorizationCase::ThetaZero(_) => {
                        let m = p.gamma / (p.alpha - p.gamma);
                        let sq: f64 = xi1
                            .iter()
                            .zip(&eta)
                            .map(|(x1, e)| {
                                let t = x1 - m * e;
                                t * t
                            })
                            .sum();
                        (p.alpha - p.gamma) * sq
                    }
                    FactorizationCase::ThetaNegative(_) => {
                        let r = compute_m_factors(p);
                        let (mp, mm) = (r.m_plus.unwrap(), r.m_minus.unwrap());
                        let dot: f64 = xi1
                            .iter()
                            .zip(&eta)
                            .map(|(x1, e)| (x1 - mp * e) * (x1 - mm * e))
                            .sum();
                        (p.alpha - p.gamma) * dot
                    }
                    FactorizationCase::OneDSumZero(_) => unreachable!(),
                };
                (lhs, rhs, scale)
            }
            FactorizationCase::OneDSumZero(s) => {
                let xi1: f64 = rng.gen_range(-8.0..8.0);
                let xi2: f64 = rng.gen_range(-8.0..8.0);
                let xi3 = -(xi1 + xi2);
                let lhs = s.sigma1 * xi1 * xi1 + s.sigma2 * xi2 * xi2 + s.sigma3 * xi3 * xi3;
                let rhs = xi3 * ((s.sigma1 + s.sigma3) * xi3 + 2.0 * s.sigma1 * xi2);
                let scale = s.sigma1.abs() * xi1 * xi1
                    + s.sigma2.abs() * xi2 * xi2
                    + s.sigma3.abs() * xi3 * xi3;
                (lhs, rhs, scale)
            }
        };
        let res = (lhs - rhs).abs() / scale.max(1e-300);
        worst = worst.max(res);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng as _RngExt;

    fn params(a: f64, b: f64, g: f64) -> SystemParams {
        SystemParams::new(a, b, g, 1).unwrap()
    }

    // Oracle for θ: the defining quotient form, evaluated literally.
    fn theta_quotient(p: &SystemParams) -> f64 {
        p.alpha * p.beta * p.gamma * (1.0 / p.alpha - 1.0 / p.beta - 1.0 / p.gamma)
    }

    #[test]
    fn theta_examples() {
        assert_eq!(compute_theta(&params(1.0, 1.0, 1.0)), -1.0);
        assert_eq!(compute_theta(&params(-1.0, 1.0, 1.0)), 3.0);
        assert_eq!(compute_theta(&params(2.0, 1.0, 1.0)), -3.0);
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(compute_kappa(&params(1.0, 1.0, 1.0)), 0.0);
        assert_eq!(compute_kappa(&params(-1.0, 1.0, 1.0)), 8.0);
        assert_eq!(compute_kappa(&params(1.0, 2.0, 3.0)), 10.0);
    }

    #[test]
    fn m_factor_examples() {
        // α = γ: M = −(β+γ)/2γ.
        let r = compute_m_factors(&params(1.0, 1.0, 1.0));
        assert_eq!(r.m_factor, Some(-1.0));
        assert_eq!(r.m_plus, None);

        // θ < 0 and α ≠ γ: M± = 1 ± √3.
        let r = compute_m_factors(&params(2.0, 1.0, 1.0));
        assert_eq!(r.m_factor, None);
        let (mp, mm) = (r.m_plus.unwrap(), r.m_minus.unwrap());
        assert!((mp - (1.0 + 3.0f64.sqrt())).abs() < 1e-15);
        assert!((mm - (1.0 - 3.0f64.sqrt())).abs() < 1e-15);
        assert!(mp != mm);
    }

    #[test]
    fn vieta_relations() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut checked = 0;
        while checked < 10_000 {
            let p = params(
                rng.gen_range(-4.0..4.0f64),
                rng.gen_range(-4.0..4.0f64),
                rng.gen_range(-4.0..4.0f64),
            );
            if p.alpha == 0.0 || p.beta == 0.0 || p.gamma == 0.0 {
                continue;
            }
            let r = compute_m_factors(&p);
            if let (Some(mp), Some(mm)) = (r.m_plus, r.m_minus) {
                let ag = p.alpha - p.gamma;
                // residuals relative to the term-magnitude scale (the roots
                // carry ε·(|M₊|+|M₋|) of rounding even when the target is tiny)
                let scale_sum = (ag * (mp.abs() + mm.abs())).abs() + (2.0 * p.gamma).abs();
                let sum_res = (ag * (mp + mm) - 2.0 * p.gamma).abs() / scale_sum;
                let scale_prod =
                    ag.abs() * (mp.abs() + mm.abs()).powi(2) + (p.beta + p.gamma).abs();
                let prod_res = (ag * mp * mm + (p.beta + p.gamma)).abs() / scale_prod;
                assert!(sum_res <= 1e-12, "Vieta sum residual {sum_res}");
                assert!(prod_res <= 1e-12, "Vieta product residual {prod_res}");
                checked += 1;
            }
        }
    }

    #[test]
    fn regime_examples() {
        // θ = 3 > 0 at d = 2 gives the critical small-data statements.
        let r = classify_regime(&SystemParams::new(-1.0, 1.0, 1.0, 2).unwrap());
        assert!(r.contains(TheoremLabel::T11i));
        assert_eq!(
            r.bound(TheoremLabel::T11i),
            Some(SobolevBound::AtLeast { s: 0.0, strict: false })
        );

        // α = β at d = 2: local well-posedness only above s = 1 (strict).
        let r = classify_regime(&SystemParams::new(1.0, 1.0, 1.0, 2).unwrap());
        assert_eq!(
            r.bound(TheoremLabel::T14ii),
            Some(SobolevBound::AtLeast { s: 1.0, strict: true })
        );

        // θ = −3 < 0, (α−γ)(β+γ) = 2 ≠ 0 at d = 1: s ≥ 1/2.
        let r = classify_regime(&SystemParams::new(2.0, 1.0, 1.0, 1).unwrap());
        assert_eq!(
            r.bound(TheoremLabel::T14iii),
            Some(SobolevBound::AtLeast { s: 0.5, strict: false })
        );
        // ... and the flow map is not C² below s = 1/2.
        assert_eq!(
            r.bound(TheoremLabel::T16),
            Some(SobolevBound::Below { s: 0.5, strict: true })
        );

        // (α−γ)(β+γ) = 0 at (1,1,1): ill-posedness for every s.
        let r = classify_regime(&SystemParams::new(1.0, 1.0, 1.0, 1).unwrap());
        assert_eq!(r.bound(TheoremLabel::T16), Some(SobolevBound::AllReals));
    }

    #[test]
    fn regime_labels_consistent_with_flags() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let p = SystemParams::new(
                rng.gen_range(-4.0..4.0f64),
                rng.gen_range(-4.0..4.0f64),
                rng.gen_range(-4.0..4.0f64),
                if rng.gen::<bool>() { 1 } else { 2 },
            );
            let p = match p {
                Ok(p) => p,
                Err(_) => continue,
            };
            let rep = classify_regime(&p);
            let r = &rep.resonance;
            if rep.contains(TheoremLabel::T11i) {
                assert!(p.d == 2 && r.theta > 0.0);
            }
            if rep.contains(TheoremLabel::T15i) {
                assert!(p.d == 1 && r.theta > 0.0);
            }
            if rep.contains(TheoremLabel::T15ii) {
                assert!(r.same_sign);
            }
            if let Some(SobolevBound::AllReals) = rep.bound(TheoremLabel::T16) {
                assert_eq!(r.acg_bc, 0.0);
            }
        }
    }

    #[test]
    fn symbol_examples() {
        let s = SigmaTriple::new(1.0, 1.0, 1.0).unwrap();
        assert_eq!(resonance_symbol(&s, &[1.0], &[0.0]).unwrap(), 2.0);
        let s = SigmaTriple::new(1.0, -1.0, 1.0).unwrap();
        assert_eq!(resonance_symbol(&s, &[1.0], &[-1.0]).unwrap(), 0.0);
        assert!(resonance_symbol(&s, &[1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn scan_theta_positive_unit_sigmas() {
        let s = SigmaTriple::new(1.0, 1.0, 1.0).unwrap();
        let m = modulation_scan(&s, ScanCondition::ThetaPositive, 1, 8, 0.5).unwrap();
        assert!(m >= 1.0, "min_ratio {m} < 1 for all-positive σ");
    }

    #[test]
    fn scan_exact_resonance_reachable_without_condition() {
        // σ₁ + σ₂ = 0 admits the exact resonance ξ₂ = −ξ₁, ξ₃ = 0.
        let s = SigmaTriple::new(1.0, -1.0, 1.0).unwrap();
        let m = modulation_scan(&s, ScanCondition::Unconstrained, 1, 4, 1.0).unwrap();
        assert_eq!(m, 0.0);
    }

    #[test]
    fn scan_separated_is_positive_and_stable() {
        let s = SigmaTriple::new(1.0, -2.0, 1.0).unwrap();
        let cond = ScanCondition::Separated { ratio: 8.0 };
        let coarse = modulation_scan(&s, cond, 1, 16, 0.5).unwrap();
        let fine = modulation_scan(&s, cond, 1, 16, 0.25).unwrap();
        assert!(coarse > 0.0);
        assert!(fine > 0.0);
        assert!(fine <= coarse + 1e-15, "refinement must not increase the min");
        assert!((fine - coarse).abs() <= 0.1 * coarse, "min unstable under step halving");
    }

    #[test]
    fn scan_monotone_in_extent() {
        let s = SigmaTriple::new(1.0, -2.0, 1.0).unwrap();
        let cond = ScanCondition::Separated { ratio: 8.0 };
        let small = modulation_scan(&s, cond, 1, 8, 0.5).unwrap();
        let large = modulation_scan(&s, cond, 1, 16, 0.5).unwrap();
        assert!(large <= small + 1e-15);
    }

    #[test]
    fn scan_rejects_bad_inputs() {
        let s = SigmaTriple::new(1.0, -1.0, -1.0).unwrap();
        assert!(matches!(
            modulation_scan(&s, ScanCondition::ThetaPositive, 1, 8, 0.5),
            Err(Error::CaseCondition(_))
        ));
        let s = SigmaTriple::new(1.0, 1.0, 1.0).unwrap();
        assert!(modulation_scan(&s, ScanCondition::Separated { ratio: 2.0 }, 1, 8, 0.5).is_err());
        assert!(matches!(
            modulation_scan(&s, ScanCondition::Unconstrained, 1, 1, 4.0),
            Err(Error::EmptyAdmissibleSet(_))
        ));
    }

    #[test]
    fn factorization_residuals() {
        let r = factorization_check(
            FactorizationCase::AlphaEqGamma(params(1.0, 1.0, 1.0)),
            10_000,
            1,
        )
        .unwrap();
        assert!(r <= 1e-12, "alpha_eq_gamma residual {r}");

        let p0 = SystemParams::with_theta_zero(1.0, 2.0, 1).unwrap();
        let r = factorization_check(FactorizationCase::ThetaZero(p0), 10_000, 2).unwrap();
        assert!(r <= 1e-12, "theta_zero residual {r}");

        let r = factorization_check(
            FactorizationCase::ThetaNegative(params(2.0, 1.0, 1.0)),
            10_000,
            3,
        )
        .unwrap();
        assert!(r <= 1e-12, "theta_negative residual {r}");

        let s = SigmaTriple::new(1.5, -1.5, 2.0).unwrap();
        let r = factorization_check(FactorizationCase::OneDSumZero(s), 10_000, 4).unwrap();
        assert!(r <= 1e-12, "one_d_sum_zero residual {r}");
    }

    #[test]
    fn factorization_case_gates() {
        assert!(factorization_check(
            FactorizationCase::AlphaEqGamma(params(2.0, 1.0, 1.0)),
            10,
            0
        )
        .is_err());
        assert!(factorization_check(
            FactorizationCase::ThetaZero(params(1.0, 1.0, 1.0)),
            10,
            0
        )
        .is_err());
        assert!(factorization_check(
            FactorizationCase::ThetaNegative(params(-1.0, 1.0, 1.0)),
            10,
            0
        )
        .is_err());
        let s = SigmaTriple::new(1.0, 1.0, 1.0).unwrap();
        assert!(factorization_check(FactorizationCase::OneDSumZero(s), 10, 0).is_err());
    }

    #[test]
    fn one_d_sum_zero_vanishes_with_xi3() {
        // ξ₃ = 0 makes both sides vanish.
        let s = SigmaTriple::new(2.0, -2.0, 1.0).unwrap();
        let xi1 = 3.0f64;
        let xi2 = -3.0f64;
        let xi3 = -(xi1 + xi2);
        let lhs = s.sigma1 * xi1 * xi1 + s.sigma2 * xi2 * xi2 + s.sigma3 * xi3 * xi3;
        let rhs = xi3 * ((s.sigma1 + s.sigma3) * xi3 + 2.0 * s.sigma1 * xi2);
        assert_eq!(lhs, 0.0);
        assert_eq!(rhs, 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        // Division-free θ agrees with the quotient form to a few ulps.
        #[test]
        fn theta_division_free_matches_quotient(
            a in -100.0..100.0f64, b in -100.0..100.0f64, g in -100.0..100.0f64
        ) {
            prop_assume!(a != 0.0 && b != 0.0 && g != 0.0);
            let p = params(a, b, g);
            let t1 = compute_theta(&p);
            let t2 = theta_quotient(&p);
            let scale = (b * g).abs() + (a * g).abs() + (a * b).abs();
            prop_assert!((t1 - t2).abs() <= 4.0 * f64::EPSILON * scale);
        }

        // Symbol invariant under simultaneous permutation of (σ_j, ξ_j).
        #[test]
        fn symbol_permutation_invariance(
            s1 in 0.1..4.0f64, s2 in 0.1..4.0f64, s3 in 0.1..4.0f64,
            x1 in -8.0..8.0f64, x2 in -8.0..8.0f64
        ) {
            let x3 = -(x1 + x2);
            let perms: [([f64; 3], [f64; 3]); 3] = [
                ([s1, s2, s3], [x1, x2, x3]),
                ([s2, s3, s1], [x2, x3, x1]),
                ([s3, s1, s2], [x3, x1, x2]),
            ];
            let mut vals = Vec::new();
            for (ss, xs) in perms {
                let st = SigmaTriple::new(ss[0], ss[1], ss[2]).unwrap();
                // feed (ξ_a, ξ_b) so that the implicit third is ξ_c
                vals.push(resonance_symbol(&st, &[xs[0]], &[xs[1]]).unwrap());
            }
            let scale = vals[0].abs().max(1.0);
            prop_assert!((vals[0] - vals[1]).abs() <= 1e-12 * scale);
            prop_assert!((vals[0] - vals[2]).abs() <= 1e-12 * scale);
        }

        // θ ≥ 0 forces κ ≠ 0.
        #[test]
        fn theta_nonnegative_implies_kappa_nonzero(
            a in -10.0..10.0f64, b in -10.0..10.0f64, g in -10.0..10.0f64
        ) {
            prop_assume!(a != 0.0 && b != 0.0 && g != 0.0);
            let p = params(a, b, g);
            if compute_theta(&p) >= 0.0 {
                prop_assert!(compute_kappa(&p) != 0.0);
            }
        }
    }
}
