//! Small statistics toolkit used by the checks.

use serde::{Deserialize, Serialize};

/// KS critical value at the 99% level, as a multiple of `1/sqrt(n)`.
pub const KS_99: f64 = 1.63;

pub fn ks_threshold(n: usize) -> f64 {
    KS_99 / (n as f64).sqrt()
}

/// One-sample Kolmogorov-Smirnov statistic of `samples` against `cdf`.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs: Vec<f64> = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Tabulated CDF on a uniform grid with cell-centred densities.
#[derive(Debug, Clone)]
pub struct GridCdf {
    start: f64,
    step: f64,
    cum: Vec<f64>,
}

impl GridCdf {
    /// `density[i]` is the density at `start + i*step`; it is treated as
    /// constant over the cell `[x_i - step/2, x_i + step/2]`.
    pub fn from_density(start: f64, step: f64, density: &[f64]) -> Self {
        let mut cum = Vec::with_capacity(density.len() + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        for d in density {
            acc += d.max(0.0) * step;
            cum.push(acc);
        }
        let total = acc.max(f64::MIN_POSITIVE);
        for c in &mut cum {
            *c /= total;
        }
        Self { start: start - 0.5 * step, step, cum }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = (x - self.start) / self.step;
        if u <= 0.0 {
            return 0.0;
        }
        let i = u.floor() as usize;
        if i + 1 >= self.cum.len() {
            return 1.0;
        }
        let f = u - i as f64;
        self.cum[i] + f * (self.cum[i + 1] - self.cum[i])
    }

    /// Inverse of [`eval`](Self::eval) by bisection on the cumulative table
    /// followed by linear interpolation inside the cell.
    pub fn quantile(&self, p: f64) -> f64 {
        let p = p.clamp(0.0, 1.0);
        let i = self.cum.partition_point(|&c| c < p).clamp(1, self.cum.len() - 1);
        let (lo, hi) = (self.cum[i - 1], self.cum[i]);
        let f = if hi > lo { (p - lo) / (hi - lo) } else { 0.5 };
        self.start + (i as f64 - 1.0 + f) * self.step
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Proportion {
    pub successes: usize,
    pub trials: usize,
    pub estimate: f64,
    /// 95% Wilson score interval.
    pub ci: (f64, f64),
}

pub fn wilson(successes: usize, trials: usize) -> Proportion {
    const Z: f64 = 1.959963984540054;
    if trials == 0 {
        return Proportion { successes, trials, estimate: f64::NAN, ci: (0.0, 1.0) };
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Proportion { successes, trials, estimate: p, ci: ((centre - half).max(0.0), (centre + half).min(1.0)) }
}

/// Pearson correlation; `None` when either input is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    let n = a.len().min(b.len());
    if n < 2 {
        return None;
    }
    let ma = a[..n].iter().sum::<f64>() / n as f64;
    let mb = b[..n].iter().sum::<f64>() / n as f64;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let (da, db) = (a[i] - ma, b[i] - mb);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    if saa == 0.0 || sbb == 0.0 {
        return None;
    }
    Some(sab / (saa * sbb).sqrt())
}

/// Number of pairs `i < j` with `v[i] > v[j]`, by merge sort.
pub fn inversions(v: &[f64]) -> u64 {
    fn sort(v: &mut [f64], buf: &mut Vec<f64>) -> u64 {
        let n = v.len();
        if n < 2 {
            return 0;
        }
        let mid = n / 2;
        let mut count = sort(&mut v[..mid], buf) + sort(&mut v[mid..], buf);
        buf.clear();
        let (mut i, mut j) = (0, mid);
        while i < mid && j < n {
            if v[j] < v[i] {
                count += (mid - i) as u64;
                buf.push(v[j]);
                j += 1;
            } else {
                buf.push(v[i]);
                i += 1;
            }
        }
        buf.extend_from_slice(&v[i..mid]);
        buf.extend_from_slice(&v[j..n]);
        v.copy_from_slice(buf);
        count
    }
    let mut w = v.to_vec();
    sort(&mut w, &mut Vec::with_capacity(v.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn wilson_at_the_edge() {
        let p = wilson(5000, 5000);
        assert_eq!(p.estimate, 1.0);
        assert!(1.0 - p.ci.0 < 0.002);
        let q = wilson(2500, 5000);
        assert!(q.ci.0 < 0.5 && q.ci.1 > 0.5);
    }

    #[test]
    fn pearson_signs() {
        let a = [1.0, -1.0, 1.0, -1.0];
        assert!((pearson(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        let b: Vec<f64> = a.iter().map(|v| -v).collect();
        assert!((pearson(&a, &b).unwrap() + 1.0).abs() < 1e-15);
        assert!(pearson(&a, &[1.0; 4]).is_none());
    }

    #[test]
    fn grid_cdf_roundtrip() {
        let xs: Vec<f64> = (0..400).map(|i| -10.0 + 0.05 * i as f64).collect();
        let d: Vec<f64> = xs.iter().map(|x| (-x * x / 2.0).exp()).collect();
        let cdf = GridCdf::from_density(xs[0], 0.05, &d);
        assert!((cdf.eval(0.0) - 0.5).abs() < 1e-3);
        for p in [0.01, 0.3, 0.5, 0.77, 0.99] {
            assert!((cdf.eval(cdf.quantile(p)) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn ks_against_uniform() {
        let s: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let d = ks_statistic(&s, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.0005).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn inversions_match_brute_force(v in proptest::collection::vec(-100.0f64..100.0, 0..60)) {
            let mut brute = 0u64;
            for i in 0..v.len() {
                for j in i + 1..v.len() {
                    if v[i] > v[j] { brute += 1; }
                }
            }
            prop_assert_eq!(inversions(&v), brute);
        }
    }
}
