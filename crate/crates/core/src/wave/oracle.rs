//! Crank-Nicolson propagation on a 1D grid with Dirichlet walls, used as an
//! independent check on the spectral stepper.

use num_complex::Complex64 as C64;

use super::field::WaveField;
use crate::error::{Error, Result};

/// Central second-derivative stencil `[c0, c1, ..]` of the given even order.
pub fn laplacian_stencil(order: usize) -> Result<Vec<f64>> {
    Ok(match order {
        2 => vec![-2.0, 1.0],
        4 => vec![-5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0],
        6 => vec![-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0],
        8 => vec![-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0],
        _ => return Err(Error::InvalidGrid(format!("no stencil of order {order}"))),
    })
}

/// LU factors of a banded matrix with `b` sub- and super-diagonals, no pivoting.
#[derive(Debug, Clone)]
struct BandedLu {
    n: usize,
    b: usize,
    // row i, column j stored at rows[i][j + b - i]
    rows: Vec<Vec<C64>>,
}

impl BandedLu {
    fn factor(mut rows: Vec<Vec<C64>>, b: usize) -> Result<Self> {
        let n = rows.len();
        for k in 0..n {
            let pivot = rows[k][b];
            if pivot.norm() < 1e-300 {
                return Err(Error::Physics("singular Crank-Nicolson matrix".into()));
            }
            for i in k + 1..(k + b + 1).min(n) {
                let l = rows[i][k + b - i] / pivot;
                rows[i][k + b - i] = l;
                for j in k + 1..(k + b + 1).min(n) {
                    let u = rows[k][j + b - k];
                    rows[i][j + b - i] -= l * u;
                }
            }
        }
        Ok(Self { n, b, rows })
    }

    fn solve(&self, rhs: &mut [C64]) {
        let (n, b) = (self.n, self.b);
        for i in 0..n {
            let lo = i.saturating_sub(b);
            let mut s = rhs[i];
            for j in lo..i {
                s -= self.rows[i][j + b - i] * rhs[j];
            }
            rhs[i] = s;
        }
        for i in (0..n).rev() {
            let hi = (i + b + 1).min(n);
            let mut s = rhs[i];
            for j in i + 1..hi {
                s -= self.rows[i][j + b - i] * rhs[j];
            }
            rhs[i] = s / self.rows[i][b];
        }
    }
}

/// Crank-Nicolson stepper for `i hbar d/dt psi = -(hbar^2/2m) psi'' + V psi`.
#[derive(Debug, Clone)]
pub struct CrankNicolson {
    lu: BandedLu,
    // explicit half: (1 - i dt H / 2 hbar) applied via the stencil
    stencil: Vec<f64>,
    alpha: C64,
    diag_extra: Vec<C64>,
    pub dt: f64,
}

impl CrankNicolson {
    pub fn new(field: &WaveField, dt: f64, order: usize, potential: Option<&[f64]>) -> Result<Self> {
        if field.dims() != 1 {
            return Err(Error::WrongDimension { expected: 1, got: field.dims() });
        }
        let axis = field.grid.axes[0];
        let hbar = field.grid.hbar;
        let n = axis.points;
        let stencil = laplacian_stencil(order)?;
        let b = stencil.len() - 1;
        let dx = axis.dx();
        // H = -kin * D2 + V with kin = hbar^2 / (2 m dx^2)
        let kin = hbar * hbar / (2.0 * axis.mass * dx * dx);
        let alpha = C64::new(0.0, dt / (2.0 * hbar));
        let v: Vec<f64> = potential.map(|p| p.to_vec()).unwrap_or_else(|| vec![0.0; n]);
        let mut rows = vec![vec![C64::new(0.0, 0.0); 2 * b + 1]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for (off, c) in stencil.iter().enumerate() {
                let h = -kin * c;
                if off == 0 {
                    row[b] = 1.0 + alpha * (h + v[i]);
                    continue;
                }
                if i + off < n {
                    row[b + off] = alpha * h;
                }
                if i >= off {
                    row[b - off] = alpha * h;
                }
            }
        }
        let lu = BandedLu::factor(rows, b)?;
        let stencil = stencil.iter().map(|c| -kin * c).collect();
        Ok(Self { lu, stencil, alpha, diag_extra: v.into_iter().map(|x| C64::new(x, 0.0)).collect(), dt })
    }

    pub fn step(&self, psi: &mut [C64]) {
        let n = psi.len();
        let b = self.stencil.len() - 1;
        let mut rhs = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut h = (self.stencil[0] + self.diag_extra[i]) * psi[i];
            for off in 1..=b {
                if i + off < n {
                    h += self.stencil[off] * psi[i + off];
                }
                if i >= off {
                    h += self.stencil[off] * psi[i - off];
                }
            }
            rhs[i] = psi[i] - self.alpha * h;
        }
        self.lu.solve(&mut rhs);
        psi.copy_from_slice(&rhs);
    }

    pub fn evolve(&self, field: &WaveField, n_steps: usize) -> WaveField {
        let mut f = field.clone();
        for _ in 0..n_steps {
            self.step(&mut f.amps);
        }
        f.time += n_steps as f64 * self.dt;
        f
    }
}

/// `sqrt(sum |a - b|^2 dV)`.
pub fn l2_distance(a: &WaveField, b: &WaveField) -> Result<f64> {
    if !a.grid.same_shape(&b.grid) {
        return Err(Error::GridMismatch);
    }
    let s: f64 = a.amps.iter().zip(&b.amps).map(|(u, v)| (u - v).norm_sqr()).sum();
    Ok((s * a.grid.cell()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wave::field::{init_gaussian, PacketSpec};
    use crate::wave::grid::Grid;

    #[test]
    fn stencils_annihilate_constants_and_match_quadratics() {
        for order in [2, 4, 6, 8] {
            let s = laplacian_stencil(order).unwrap();
            let sum: f64 = s[0] + 2.0 * s[1..].iter().sum::<f64>();
            assert!(sum.abs() < 1e-12);
            // second derivative of x^2 is 2
            let d2: f64 = s[1..].iter().enumerate().map(|(m, c)| 2.0 * c * ((m + 1) as f64).powi(2)).sum();
            assert!((d2 - 2.0).abs() < 1e-12, "order {order}");
        }
        assert!(laplacian_stencil(3).is_err());
    }

    #[test]
    fn banded_solve_matches_dense_product() {
        let b = 2;
        let n = 9;
        let mut rows = vec![vec![C64::new(0.0, 0.0); 2 * b + 1]; n];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                let col = i as isize + j as isize - b as isize;
                if col >= 0 && (col as usize) < n {
                    *v = if j == b { C64::new(4.0, 1.0) } else { C64::new(0.3 * j as f64, -0.2) };
                }
            }
        }
        let x: Vec<C64> = (0..n).map(|i| C64::new(i as f64, 1.0 - i as f64)).collect();
        let mut rhs = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..2 * b + 1 {
                let col = i as isize + j as isize - b as isize;
                if col >= 0 && (col as usize) < n {
                    rhs[i] += rows[i][j] * x[col as usize];
                }
            }
        }
        let lu = BandedLu::factor(rows, b).unwrap();
        lu.solve(&mut rhs);
        for (u, v) in rhs.iter().zip(&x) {
            assert!((u - v).norm() < 1e-12);
        }
    }

    #[test]
    fn crank_nicolson_is_unitary() {
        let g = Grid::new_1d(512, 40.0).unwrap();
        let f = init_gaussian(&g, &[PacketSpec::new(0.0, 1.0, 1.0)]).unwrap();
        let cn = CrankNicolson::new(&f, 1e-2, 4, None).unwrap();
        let out = cn.evolve(&f, 200);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-10);
    }
}
