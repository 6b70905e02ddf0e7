//! Two-mode coherent states and their superpositions.
//!
//! Coherent states are not orthogonal, so a superposition is kept as a list of
//! weighted product branches `|alpha1, alpha2>` and every norm or overlap is
//! evaluated with `<a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b)`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_BRANCHES: usize = 1 << 16;

/// Amplitudes closer than this are treated as the same coherent label.
const SAME_LABEL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherentBranch {
    pub weight: C64,
    pub alpha1: C64,
    pub alpha2: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentTwoMode {
    pub branches: Vec<CoherentBranch>,
}

/// `<a|b>` for single-mode coherent states.
pub fn coherent_overlap(a: C64, b: C64) -> C64 {
    (-0.5 * a.norm_sqr() - 0.5 * b.norm_sqr() + a.conj() * b).exp()
}

impl CoherentTwoMode {
    pub fn product(alpha1: C64, alpha2: C64) -> Self {
        Self { branches: vec![CoherentBranch { weight: C64::new(1.0, 0.0), alpha1, alpha2 }] }
    }

    pub fn vacuum() -> Self {
        Self::product(C64::new(0.0, 0.0), C64::new(0.0, 0.0))
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for p in &self.branches {
            for q in &other.branches {
                acc += p.weight.conj()
                    * q.weight
                    * coherent_overlap(p.alpha1, q.alpha1)
                    * coherent_overlap(p.alpha2, q.alpha2);
            }
        }
        acc
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).re
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm_sqr().sqrt();
        for b in &mut self.branches {
            b.weight /= n;
        }
        self
    }

    /// `|<a|b>|^2 / (<a|a><b|b>)`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr() / (self.norm_sqr() * other.norm_sqr())
    }

    /// Mean photon number summed over both modes (single-branch states only
    /// have a closed form; superpositions weight each branch by its overlap).
    pub fn mean_photons(&self) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for p in &self.branches {
            for q in &self.branches {
                let ov = coherent_overlap(p.alpha1, q.alpha1) * coherent_overlap(p.alpha2, q.alpha2);
                let n = p.alpha1.conj() * q.alpha1 + p.alpha2.conj() * q.alpha2;
                acc += p.weight.conj() * q.weight * ov * n;
            }
        }
        acc.re / self.norm_sqr()
    }

    /// Sums branches that carry the same coherent labels.
    fn merged(self) -> Self {
        let mut out: Vec<CoherentBranch> = Vec::with_capacity(self.branches.len());
        for b in self.branches {
            match out.iter_mut().find(|o| {
                (o.alpha1 - b.alpha1).norm() < SAME_LABEL && (o.alpha2 - b.alpha2).norm() < SAME_LABEL
            }) {
                Some(o) => o.weight += b.weight,
                None => out.push(b),
            }
        }
        out.retain(|b| b.weight.norm() > 1e-300);
        Self { branches: out }
    }
}

/// Beam splitter that splits the whole coherent pulse into transmitted and
/// reflected branches:
/// `|a,0> -> (|a,0> + i|0,a>)/sqrt 2`, `|0,a> -> (i|a,0> + |0,a>)/sqrt 2`.
pub fn ebs_transform(c: &CoherentTwoMode) -> Result<CoherentTwoMode> {
    let out_len = 2 * c.branches.len();
    if out_len > MAX_BRANCHES {
        return Err(Error::BranchExplosion(out_len));
    }
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let ih = C64::new(0.0, FRAC_1_SQRT_2);
    let zero = C64::new(0.0, 0.0);
    let mut out = Vec::with_capacity(out_len);
    for b in &c.branches {
        let (w, tw, rw) = if b.alpha2.norm() < SAME_LABEL {
            (b.alpha1, h, ih)
        } else if b.alpha1.norm() < SAME_LABEL {
            (b.alpha2, ih, h)
        } else {
            return Err(Error::NotSingleModeBranch(b.alpha1, b.alpha2));
        };
        out.push(CoherentBranch { weight: b.weight * tw, alpha1: w, alpha2: zero });
        out.push(CoherentBranch { weight: b.weight * rw, alpha1: zero, alpha2: w });
    }
    Ok(CoherentTwoMode { branches: out }.merged().normalized())
}

/// Ordinary linear-optics beam splitter acting on the coherent amplitudes:
/// `(a1, a2) -> ((a1 + i a2)/sqrt 2, (i a1 + a2)/sqrt 2)`, branch by branch.
pub fn classical_bs_transform(c: &CoherentTwoMode) -> CoherentTwoMode {
    let i = C64::new(0.0, 1.0);
    let branches = c
        .branches
        .iter()
        .map(|b| CoherentBranch {
            weight: b.weight,
            alpha1: (b.alpha1 + i * b.alpha2) * FRAC_1_SQRT_2,
            alpha2: (i * b.alpha1 + b.alpha2) * FRAC_1_SQRT_2,
        })
        .collect();
    CoherentTwoMode { branches }
}
