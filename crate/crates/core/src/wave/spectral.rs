//! FFT plumbing for row-major 1D/2D complex arrays.
//!
//! Forward transforms are unnormalized; inverse transforms divide by the
//! number of points so that `inverse(forward(v)) == v`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

type Plan = Arc<dyn Fft<f64>>;

fn plan(n: usize, inverse: bool) -> Plan {
    static CACHE: OnceLock<Mutex<(FftPlanner<f64>, HashMap<(usize, bool), Plan>)>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cache.lock().expect("fft plan cache poisoned");
    let (planner, plans) = &mut *guard;
    plans
        .entry((n, inverse))
        .or_insert_with(|| {
            if inverse {
                planner.plan_fft_inverse(n)
            } else {
                planner.plan_fft_forward(n)
            }
        })
        .clone()
}

fn transform_contiguous(data: &mut [C64], n: usize, inverse: bool) {
    plan(n, inverse).process(data);
    if inverse {
        let s = 1.0 / n as f64;
        data.iter_mut().for_each(|v| *v *= s);
    }
}

fn transpose(src: &[C64], rows: usize, cols: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); src.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = src[r * cols + c];
        }
    }
    out
}

/// Transforms along every axis of an array with the given `shape`.
pub fn fft_nd(data: &mut [C64], shape: &[usize], inverse: bool) {
    match *shape {
        [n] => transform_contiguous(data, n, inverse),
        [nx, ny] => {
            transform_contiguous(data, ny, inverse);
            let mut t = transpose(data, nx, ny);
            transform_contiguous(&mut t, nx, inverse);
            data.copy_from_slice(&transpose(&t, ny, nx));
        }
        _ => unreachable!("1D or 2D arrays only"),
    }
}

pub fn forward(data: &mut [C64], shape: &[usize]) {
    fft_nd(data, shape, false)
}

pub fn inverse(data: &mut [C64], shape: &[usize]) {
    fft_nd(data, shape, true)
}

pub fn forward_1d(data: &mut [C64]) {
    let n = data.len();
    transform_contiguous(data, n, false)
}

pub fn inverse_1d(data: &mut [C64]) {
    let n = data.len();
    transform_contiguous(data, n, true)
}

/// Wavenumber of flat index `idx` along `axis`, given per-axis wavenumber tables.
pub fn wavenumber_at(idx: usize, shape: &[usize], ks: &[Vec<f64>], axis: usize) -> f64 {
    match (shape.len(), axis) {
        (1, 0) => ks[0][idx],
        (2, 0) => ks[0][idx / shape[1]],
        (2, 1) => ks[1][idx % shape[1]],
        _ => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_2d() {
        let shape = [8usize, 16];
        let v: Vec<C64> = (0..128).map(|i| C64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let mut w = v.clone();
        forward(&mut w, &shape);
        inverse(&mut w, &shape);
        for (a, b) in v.iter().zip(&w) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_lands_in_one_bin() {
        let shape = [8usize, 16];
        let mut v: Vec<C64> = (0..128)
            .map(|i| {
                let (ix, iy) = (i / 16, i % 16);
                C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (ix as f64 / 8.0 + 3.0 * iy as f64 / 16.0))
            })
            .collect();
        forward(&mut v, &shape);
        let peak = v.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap().0;
        assert_eq!(peak, 16 + 3);
    }
}
