//! FFT plumbing: cached plans, normalized d = 1 and d = 2 transforms.
//!
//! Forward transforms carry the 1/n^d factor so spectral coefficients
//! approximate Fourier coefficients of the periodic extension; the inverse is
//! the plain synthesis sum. Row-major layout, second axis contiguous.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::grid::TorusGrid;

type Plan = Arc<dyn Fft<f64>>;

fn plan(n: usize, forward: bool) -> Plan {
    static CACHE: OnceLock<Mutex<HashMap<(usize, bool), Plan>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((n, forward))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            if forward {
                planner.plan_fft_forward(n)
            } else {
                planner.plan_fft_inverse(n)
            }
        })
        .clone()
}

fn transform_rows(data: &mut [Complex64], n: usize, forward: bool) {
    let p = plan(n, forward);
    let mut scratch = vec![Complex64::default(); p.get_inplace_scratch_len()];
    for row in data.chunks_exact_mut(n) {
        p.process_with_scratch(row, &mut scratch);
    }
}

fn transpose_square(data: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

/// Physical → spectral, in place, with the 1/n^d normalization.
pub fn forward(grid: &TorusGrid, data: &mut [Complex64]) {
    debug_assert_eq!(data.len(), grid.modes());
    let n = grid.n;
    match grid.d {
        1 => transform_rows(data, n, true),
        _ => {
            transform_rows(data, n, true);
            transpose_square(data, n);
            transform_rows(data, n, true);
            transpose_square(data, n);
        }
    }
    let scale = 1.0 / grid.modes() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
}

/// Spectral → physical, in place.
pub fn inverse(grid: &TorusGrid, data: &mut [Complex64]) {
    debug_assert_eq!(data.len(), grid.modes());
    let n = grid.n;
    match grid.d {
        1 => transform_rows(data, n, false),
        _ => {
            transform_rows(data, n, false);
            transpose_square(data, n);
            transform_rows(data, n, false);
            transpose_square(data, n);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_field_concentrates_at_mode_zero() {
        let g = TorusGrid::new(1, 32, 5.0).unwrap();
        let c = Complex64::new(1.25, -0.5);
        let mut data = vec![c; 32];
        forward(&g, &mut data);
        assert!((data[0] - c).norm() < 1e-14);
        for v in &data[1..] {
            assert!(v.norm() < 1e-14);
        }
    }

    #[test]
    fn single_mode_lands_at_index_one() {
        let g = TorusGrid::new(1, 32, 2.0 * std::f64::consts::PI).unwrap();
        let xs = g.coordinates();
        let mut data: Vec<Complex64> =
            xs.iter().map(|&x| Complex64::new(x.cos(), x.sin())).collect();
        forward(&g, &mut data);
        assert!((data[1] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let leak: f64 = data
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != 1)
            .map(|(_, v)| v.norm())
            .sum();
        assert!(leak < 1e-12);
    }

    #[test]
    fn round_trip_2d() {
        let g = TorusGrid::new(2, 16, 3.0).unwrap();
        let mut data: Vec<Complex64> = (0..g.modes())
            .map(|i| Complex64::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
            .collect();
        let orig = data.clone();
        forward(&g, &mut data);
        inverse(&g, &mut data);
        let max_abs = orig.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() <= 1e-13 * max_abs);
        }
    }
}
