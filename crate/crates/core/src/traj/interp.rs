//! Eight-point Lagrange interpolation on periodic axes.

use num_complex::Complex64 as C64;

use crate::wave::Axis;

pub const POINTS: usize = 8;

pub type Stencil = ([usize; POINTS], [f64; POINTS]);

/// Node indices and weights for evaluating samples of `axis` at `x`.
pub fn stencil(axis: &Axis, x: f64) -> Stencil {
    let n = axis.points as isize;
    let u = (x - axis.start()) / axis.dx();
    let base = u.floor() as isize - (POINTS as isize / 2 - 1);
    let mut idx = [0usize; POINTS];
    let mut w = [1.0f64; POINTS];
    for j in 0..POINTS {
        idx[j] = (base + j as isize).rem_euclid(n) as usize;
        let tj = (base + j as isize) as f64;
        for m in 0..POINTS {
            if m != j {
                let tm = (base + m as isize) as f64;
                w[j] *= (u - tm) / (tj - tm);
            }
        }
    }
    (idx, w)
}

pub fn apply(values: &[C64], st: &Stencil) -> C64 {
    st.0.iter().zip(&st.1).map(|(i, w)| values[*i] * *w).sum()
}

pub fn interpolate(axis: &Axis, values: &[C64], x: f64) -> C64 {
    apply(values, &stencil(axis, x))
}
