//! The almost-orthogonality lemma as a standalone engine.
//!
//! If `h = Σ_n u_n` and `‖S_k u_n‖ ≤ κ(n − k)‖v_n‖` for all `k, n`, then
//! `Σ_k ‖S_k h‖² ≤ (Σ_j κ(j))² Σ_n ‖v_n‖²`.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::CMatrix;
use crate::rng;
use crate::verifier::report::{CheckReport, ReportContext};

/// Relative slack of both the hypothesis test and the conclusion.
pub const AO_TOL: f64 = 1e-9;

/// Two-sided decay profile `κ(j)` on `j ∈ [−offset, len − offset)`;
/// zero outside.
#[derive(Debug, Clone, PartialEq)]
pub struct Kappa {
    pub values: Vec<f64>,
    pub offset: usize,
}

impl Kappa {
    /// `κ(j) = c · 2^{−|j|δ}` on `|j| ≤ reach`.
    pub fn geometric(c: f64, delta: f64, reach: usize) -> Self {
        let values = (0..=2 * reach)
            .map(|i| c * 2f64.powf(-(i as f64 - reach as f64).abs() * delta))
            .collect();
        Self { values, offset: reach }
    }

    pub fn at(&self, j: i64) -> f64 {
        let i = j + self.offset as i64;
        if i < 0 {
            return 0.0;
        }
        self.values.get(i as usize).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AOInstance {
    pub s: Vec<CMatrix>,
    pub u: Vec<Vec<Complex64>>,
    pub v: Vec<Vec<Complex64>>,
    pub kappa: Kappa,
}

fn norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn apply(a: &CMatrix, x: &[Complex64]) -> Vec<Complex64> {
    let n = a.dim();
    (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j) * x[j]).sum())
        .collect()
}

/// Norm data the lemma consumes: `table[k][n] = ‖S_k u_n‖`,
/// `v_norms[n] = ‖v_n‖`, `image[k] = ‖S_k h‖²`.
#[derive(Debug, Clone, PartialEq)]
pub struct AONorms {
    pub table: Vec<Vec<f64>>,
    pub v_norms: Vec<f64>,
    pub image: Vec<f64>,
}

impl AONorms {
    /// Whether `table[k][n] ≤ κ(n − k)·v_norms[n]` everywhere.
    pub fn hypothesis_holds(&self, kappa: &Kappa) -> bool {
        self.table.iter().enumerate().all(|(k, row)| {
            row.iter().enumerate().all(|(n, &t)| {
                let bound = kappa.at(n as i64 - k as i64) * self.v_norms[n];
                t <= bound * (1.0 + AO_TOL) + f64::MIN_POSITIVE
            })
        })
    }

    /// Smallest `C` with `table[k][n] ≤ C·profile(n − k)·v_norms[n]`.
    pub fn fitted_constant(&self, profile: impl Fn(i64) -> f64) -> f64 {
        let mut c = 0.0f64;
        for (k, row) in self.table.iter().enumerate() {
            for (n, &t) in row.iter().enumerate() {
                if t == 0.0 {
                    continue;
                }
                let b = profile(n as i64 - k as i64) * self.v_norms[n];
                c = c.max(if b > 0.0 { t / b } else { f64::INFINITY });
            }
        }
        c
    }
}

impl AOInstance {
    pub fn validate(&self) -> Result<()> {
        let dim = self
            .s
            .first()
            .map(CMatrix::dim)
            .ok_or_else(|| Error::ShapeMismatch("no operators".into()))?;
        if self.s.iter().any(|a| a.dim() != dim)
            || self.u.len() != self.v.len()
            || self.u.iter().chain(&self.v).any(|x| x.len() != dim)
        {
            return Err(Error::ShapeMismatch("almost-orthogonality dimensions".into()));
        }
        Ok(())
    }

    pub fn norms(&self) -> Result<AONorms> {
        self.validate()?;
        let dim = self.s[0].dim();
        let mut h = vec![Complex64::new(0.0, 0.0); dim];
        for u in &self.u {
            for (a, b) in h.iter_mut().zip(u) {
                *a += b;
            }
        }
        Ok(AONorms {
            table: self
                .s
                .iter()
                .map(|s| self.u.iter().map(|u| norm(&apply(s, u))).collect())
                .collect(),
            v_norms: self.v.iter().map(|v| norm(v)).collect(),
            image: self.s.iter().map(|s| norm(&apply(s, &h)).powi(2)).collect(),
        })
    }
}

/// Conclusion report from precomputed norms; vacuous when the hypothesis
/// fails.
pub fn ao_report(id: &str, ctx: &ReportContext, norms: &AONorms, kappa: &Kappa) -> CheckReport {
    let lhs: f64 = norms.image.iter().sum();
    let rhs = kappa.total().powi(2) * norms.v_norms.iter().map(|v| v * v).sum::<f64>();
    if norms.hypothesis_holds(kappa) {
        CheckReport::inequality(id, ctx, lhs, rhs, 1.0, AO_TOL)
    } else {
        CheckReport::vacuous(id, ctx, lhs, rhs)
    }
}

pub fn check_almost_orthogonality(inst: &AOInstance, ctx: &ReportContext) -> Result<CheckReport> {
    Ok(ao_report("ao.lemma", ctx, &inst.norms()?, &inst.kappa))
}

/// Random instance; with `satisfy` the operators are rescaled so the
/// hypothesis holds, otherwise so that it fails.
pub fn random_instance<R: Rng + ?Sized>(r: &mut R, satisfy: bool) -> AOInstance {
    let dim = r.random_range(2..=6);
    let ks = r.random_range(1..=6);
    let ns = r.random_range(1..=6);
    let delta = r.random_range(0.1..2.0);
    let reach = ks.max(ns);
    let kappa = Kappa::geometric(1.0, delta, reach);
    let vec = |r: &mut R| -> Vec<Complex64> { (0..dim).map(|_| rng::complex_normal(r)).collect() };
    let u: Vec<_> = (0..ns).map(|_| vec(r)).collect();
    let v: Vec<_> = (0..ns).map(|_| vec(r)).collect();
    let s: Vec<CMatrix> = (0..ks).map(|_| rng::ginibre(r, dim)).collect();
    let mut inst = AOInstance { s, u, v, kappa };
    let fit = inst.norms().expect("consistent").fitted_constant(|j| inst.kappa.at(j));
    let factor = if satisfy {
        r.random_range(0.2..1.0) / fit
    } else {
        r.random_range(1.5..10.0) / fit
    };
    for a in &mut inst.s {
        *a = a.scale(factor);
    }
    inst
}
