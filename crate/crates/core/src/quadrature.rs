//! Gauss–Legendre rules and cumulative Simpson integration.

/// Values that can be linearly combined; lets the cumulative Simpson scheme
/// run on scalars and on whole spectral states alike.
pub trait LinearCombine: Clone {
    fn zero_like(&self) -> Self;
    /// self += a · x
    fn axpy(&mut self, a: f64, x: &Self);
}

impl LinearCombine for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }
    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }
}

/// Gauss–Legendre rule of given degree on [−1, 1], mapped to arbitrary
/// intervals at call time. Nodes by Newton iteration on the Legendre
/// recurrence; converges to machine precision in a handful of steps.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(degree: usize) -> Self {
        assert!(degree >= 1);
        let n = degree;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n {
            // Tricomi-style initial guess, then Newton.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_and_derivative(n, x);
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        GaussLegendre { nodes, weights }
    }

    pub fn degree(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes and weights mapped to [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Running integral of uniformly sampled data by composite Simpson.
///
/// Output[j] ≈ ∫ over the first j subintervals. Even prefixes use plain
/// composite Simpson; odd prefixes attach one subinterval integrated from the
/// quadratic through its three nearest samples. Globally fourth order.
pub fn cumulative_simpson<T: LinearCombine>(samples: &[T], dx: f64) -> Vec<T> {
    let m = samples.len().saturating_sub(1);
    assert!(m >= 2, "cumulative Simpson needs at least 2 intervals");
    let mut out = Vec::with_capacity(m + 1);
    out.push(samples[0].zero_like());

    // j = 1: quadratic through (B0, B1, B2) integrated over the first cell.
    let mut c1 = samples[0].zero_like();
    c1.axpy(5.0 * dx / 12.0, &samples[0]);
    c1.axpy(8.0 * dx / 12.0, &samples[1]);
    c1.axpy(-dx / 12.0, &samples[2]);
    out.push(c1);

    for j in 2..=m {
        let mut c = out[j - 2].clone();
        c.axpy(dx / 3.0, &samples[j - 2]);
        c.axpy(4.0 * dx / 3.0, &samples[j - 1]);
        c.axpy(dx / 3.0, &samples[j]);
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_on_polynomials() {
        let q = GaussLegendre::new(8);
        // degree ≤ 2·8 − 1 = 15 integrated exactly
        for k in 0..=15u32 {
            let exact = (2.0f64.powi(k as i32 + 1) - 1.0) / (k as f64 + 1.0);
            let got = q.integrate(1.0, 2.0, |x| x.powi(k as i32));
            assert!(
                (got - exact).abs() <= 1e-12 * exact.abs().max(1.0),
                "k={k}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn gauss_legendre_oscillatory() {
        let q = GaussLegendre::new(48);
        let got = q.integrate(0.0, 3.0, |x| (7.0 * x).cos());
        let exact = (21.0f64).sin() / 7.0;
        assert!((got - exact).abs() < 1e-13);
    }

    #[test]
    fn cumulative_simpson_fourth_order() {
        let f = |t: f64| (1.3 * t).sin() + 0.5 * t * t;
        let exact = |t: f64| (1.0 - (1.3 * t).cos()) / 1.3 + t * t * t / 6.0;
        let mut errs = Vec::new();
        for &m in &[16usize, 32] {
            let dx = 1.0 / m as f64;
            let samples: Vec<f64> = (0..=m).map(|j| f(j as f64 * dx)).collect();
            let cum = cumulative_simpson(&samples, dx);
            let err = cum
                .iter()
                .enumerate()
                .map(|(j, c)| (c - exact(j as f64 * dx)).abs())
                .fold(0.0f64, f64::max);
            errs.push(err);
        }
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 3.5, "observed order {order}");
    }
}
