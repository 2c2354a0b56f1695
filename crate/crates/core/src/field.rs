//! Matrix-valued functions on the grid, optionally carrying a Rademacher
//! sample axis, together with the weighted trace and the norms built on it.
//!
//! A field with `R` samples models an element of `L^∞(Ω) ⊗ N` with the
//! uniform probability `1/R` on `Ω`; every trace and norm below averages over
//! that axis, so `φ̃_w` is just `trace` on a sampled field.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::GridSpec;
use crate::matrix::{self, CMatrix, HermitianMatrix};
use crate::weights::Weight;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixField {
    grid: GridSpec,
    samples: usize,
    data: Vec<CMatrix>,
}

impl MatrixField {
    pub fn from_cells(grid: GridSpec, data: Vec<CMatrix>) -> Result<Self> {
        Self::with_samples(grid, 1, data)
    }

    /// Sample-major storage: entry `s * cells + c`.
    pub fn with_samples(grid: GridSpec, samples: usize, data: Vec<CMatrix>) -> Result<Self> {
        if samples == 0 || data.len() != samples * grid.cells() {
            return Err(Error::ShapeMismatch(format!(
                "{} matrices for {} samples x {} cells",
                data.len(),
                samples,
                grid.cells()
            )));
        }
        if let Some(bad) = data.iter().find(|a| a.dim() != grid.m) {
            return Err(Error::ShapeMismatch(format!(
                "matrix of size {} on a grid with m = {}",
                bad.dim(),
                grid.m
            )));
        }
        if !data.iter().all(CMatrix::is_finite) {
            return Err(Error::NonFinite);
        }
        Ok(Self {
            grid,
            samples,
            data,
        })
    }

    pub fn from_fn(grid: GridSpec, f: impl FnMut(usize) -> CMatrix) -> Self {
        let data: Vec<CMatrix> = (0..grid.cells()).map(f).collect();
        Self {
            grid,
            samples: 1,
            data,
        }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, &CMatrix::zeros(grid.m))
    }

    pub fn identity(grid: GridSpec) -> Self {
        Self::constant(grid, &CMatrix::identity(grid.m))
    }

    pub fn constant(grid: GridSpec, a: &CMatrix) -> Self {
        Self::from_fn(grid, |_| a.clone())
    }

    /// `χ_S ⊗ a`.
    pub fn indicator(grid: GridSpec, set: &crate::geometry::CellSet, a: &CMatrix) -> Self {
        Self::from_fn(grid, |c| {
            if set.contains(c) {
                a.clone()
            } else {
                CMatrix::zeros(grid.m)
            }
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn cells(&self) -> usize {
        self.grid.cells()
    }

    pub fn m(&self) -> usize {
        self.grid.m
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.data
    }

    pub fn at(&self, sample: usize, cell: usize) -> &CMatrix {
        &self.data[sample * self.grid.cells() + cell]
    }

    /// Value at `cell` of a field without sample axis (or of sample 0).
    pub fn cell(&self, cell: usize) -> &CMatrix {
        &self.data[cell]
    }

    pub fn set_cell(&mut self, cell: usize, a: CMatrix) {
        self.data[cell] = a;
    }

    pub fn sample(&self, s: usize) -> Self {
        let n = self.cells();
        Self {
            grid: self.grid,
            samples: 1,
            data: self.data[s * n..(s + 1) * n].to_vec(),
        }
    }

    /// Stacks sample-free fields along a new Rademacher axis.
    pub fn stack(rows: &[Self]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::ShapeMismatch("no samples to stack".into()))?;
        let mut data = Vec::with_capacity(rows.len() * first.cells());
        for r in rows {
            if r.grid != first.grid || r.samples != 1 {
                return Err(Error::ShapeMismatch("inconsistent sample rows".into()));
            }
            data.extend(r.data.iter().cloned());
        }
        Ok(Self {
            grid: first.grid,
            samples: rows.len(),
            data,
        })
    }

    pub fn map(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Self {
        Self {
            grid: self.grid,
            samples: self.samples,
            data: self.data.iter().map(f).collect(),
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&CMatrix, &CMatrix) -> CMatrix) -> Self {
        assert_eq!(self.grid, other.grid, "fields on different grids");
        let n = self.cells();
        let samples = self.samples.max(other.samples);
        assert!(
            self.samples == other.samples || self.samples == 1 || other.samples == 1,
            "incompatible sample axes"
        );
        let data = (0..samples * n)
            .map(|i| {
                let a = &self.data[if self.samples == 1 { i % n } else { i }];
                let b = &other.data[if other.samples == 1 { i % n } else { i }];
                f(a, b)
            })
            .collect();
        Self {
            grid: self.grid,
            samples,
            data,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, CMatrix::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, CMatrix::sub)
    }

    /// Cellwise product `F(x) G(x)`.
    pub fn mul(&self, other: &Self) -> Self {
        self.zip(other, CMatrix::mul)
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|a| a.scale(s))
    }

    pub fn adjoint(&self) -> Self {
        self.map(CMatrix::adjoint)
    }

    /// Cellwise `a(x) F(x) b(x)`.
    pub fn sandwich(&self, a: &Self, b: &Self) -> Self {
        a.mul(self).mul(b)
    }

    /// `max_x ‖F(x)‖_op`.
    pub fn sup_norm(&self) -> f64 {
        self.data.iter().map(CMatrix::op_norm).fold(0.0, f64::max)
    }

    /// `max_x ‖F(x)‖_F`, a cheap proxy used for residual checks.
    pub fn max_frobenius(&self) -> f64 {
        self.data.iter().map(CMatrix::frobenius).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue over cells of the Hermitian part.
    pub fn min_eig(&self) -> (usize, f64) {
        self.data
            .iter()
            .enumerate()
            .map(|(i, a)| (i, matrix::min_eig(a)))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc })
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.data
            .iter()
            .all(|a| a.hermitian_defect() <= tol * a.frobenius().max(1.0))
    }

    /// Cellwise PSD within `tol · max(1, ‖F(x)‖)`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(1e-10)
            && self
                .data
                .iter()
                .all(|a| matrix::min_eig(a) >= -tol * a.frobenius().max(1.0))
    }

    /// Piecewise-constant refinement onto a grid one level deeper.
    pub fn refine(&self) -> Self {
        let fine = self.grid.with_depth(self.grid.depth + 1);
        let n = fine.cells();
        let mut data = Vec::with_capacity(self.samples * n);
        for s in 0..self.samples {
            for c in 0..n {
                let coarse: Vec<usize> = fine.coords(c).iter().map(|x| x >> 1).collect();
                data.push(self.at(s, self.grid.index(&coarse)).clone());
            }
        }
        Self {
            grid: fine,
            samples: self.samples,
            data,
        }
    }
}

/// Per-cell measure `2^{-dJ} w(x)` (or `2^{-dJ}` without weight).
pub fn cell_measure(grid: &GridSpec, w: Option<&Weight>) -> Result<Vec<f64>> {
    let vol = grid.cell_volume();
    match w {
        None => Ok(vec![vol; grid.cells()]),
        Some(w) => {
            if w.values().len() != grid.cells() {
                return Err(Error::ShapeMismatch(format!(
                    "weight has {} cells, field has {}",
                    w.values().len(),
                    grid.cells()
                )));
            }
            Ok(w.values().iter().map(|v| v * vol).collect())
        }
    }
}

/// Sum over samples and cells of `μ_w(x) · g(F(s, x)) / R` in fixed order.
fn integrate(f: &MatrixField, w: Option<&Weight>, g: impl Fn(&CMatrix) -> f64) -> Result<f64> {
    let mu = cell_measure(f.grid(), w)?;
    let n = f.cells();
    let mut total = 0.0;
    for s in 0..f.samples() {
        let mut row = 0.0;
        for (c, &m) in mu.iter().enumerate() {
            row += m * g(&f.data[s * n + c]);
        }
        total += row;
    }
    Ok(total / f.samples() as f64)
}

/// `φ_w(F) = Σ_x 2^{-dJ} w(x) tr F(x)`, averaged over samples.
pub fn trace(f: &MatrixField, w: Option<&Weight>) -> Result<Complex64> {
    let re = integrate(f, w, |a| a.trace().re)?;
    let im = integrate(f, w, |a| a.trace().im)?;
    Ok(Complex64::new(re, im))
}

/// `‖F‖_{p,w} = φ_w(|F|^p)^{1/p}`; `p = ∞` is the weight-free sup norm.
pub fn lp_norm(f: &MatrixField, p: f64, w: Option<&Weight>) -> Result<f64> {
    matrix::check_exponent(p)?;
    if p.is_infinite() {
        cell_measure(f.grid(), w)?;
        return Ok(f.sup_norm());
    }
    Ok(integrate(f, w, |a| {
        matrix::singular_values(a).iter().map(|s| s.powf(p)).sum()
    })?
    .powf(1.0 / p))
}

/// `φ_w(χ_{(λ,∞)}(|F|))`.
pub fn distribution(f: &MatrixField, lambda: f64, w: Option<&Weight>) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveThreshold(lambda));
    }
    integrate(f, w, |a| {
        matrix::singular_values(a)
            .iter()
            .filter(|&&s| s > lambda)
            .count() as f64
    })
}

/// Singular values of every cell paired with their measure.
pub fn singular_masses(f: &MatrixField, w: Option<&Weight>) -> Result<Vec<(f64, f64)>> {
    let mu = cell_measure(f.grid(), w)?;
    let n = f.cells();
    let r = f.samples() as f64;
    let mut out = Vec::new();
    for s in 0..f.samples() {
        for (c, &m) in mu.iter().enumerate() {
            for sv in matrix::singular_values(&f.data[s * n + c]) {
                out.push((sv, m / r));
            }
        }
    }
    Ok(out)
}

/// `sup_λ λ·φ_w(χ_{(λ,∞)}(|F|))`.
///
/// Between consecutive singular values the product is linear increasing in
/// `λ`, so the supremum is the left limit at a breakpoint `s`:
/// `s · φ_w(χ_{[s,∞)}(|F|))`.
pub fn weak_l1_quasinorm(f: &MatrixField, w: Option<&Weight>) -> Result<f64> {
    Ok(weak_l1_from_masses(singular_masses(f, w)?))
}

pub fn weak_l1_from_masses(mut masses: Vec<(f64, f64)>) -> f64 {
    masses.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = 0.0f64;
    let mut cum = 0.0;
    let mut i = 0;
    while i < masses.len() {
        let s = masses[i].0;
        while i < masses.len() && masses[i].0 == s {
            cum += masses[i].1;
            i += 1;
        }
        if s > 0.0 {
            best = best.max(s * cum);
        }
    }
    best
}

/// Cellwise `|F|`.
pub fn abs_field(f: &MatrixField) -> MatrixField {
    f.map(|a| matrix::abs(a).into_matrix())
}

/// Cellwise Hermitian view; panics on non-Hermitian input.
pub fn hermitian_at(f: &MatrixField, cell: usize) -> HermitianMatrix {
    HermitianMatrix::symmetrize(f.cell(cell).clone())
}

/// On-disk instance: grid, weight and one matrix per cell as `[re, im]`
/// pairs in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub grid: GridSpec,
    pub weight: Vec<f64>,
    pub field: Vec<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl InstanceFile {
    pub fn new(f: &MatrixField, w: &Weight, lambda: Option<f64>, seed: Option<u64>) -> Self {
        let field = f
            .matrices()
            .iter()
            .map(|a| a.entries().iter().map(|z| [z.re, z.im]).collect())
            .collect();
        Self {
            grid: *f.grid(),
            weight: w.values().to_vec(),
            field,
            lambda,
            seed,
        }
    }

    /// Decodes the field and weight, validating shapes.
    pub fn decode(&self) -> Result<(MatrixField, Weight)> {
        self.grid.validate()?;
        let mats = self
            .field
            .iter()
            .map(|cell| {
                if cell.len() != self.grid.m * self.grid.m {
                    return Err(Error::ShapeMismatch(format!(
                        "cell with {} entries, expected {}",
                        cell.len(),
                        self.grid.m * self.grid.m
                    )));
                }
                CMatrix::from_row_major(cell.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        let f = MatrixField::from_cells(self.grid, mats)?;
        let w = Weight::new(self.grid, self.weight.clone())?;
        Ok((f, w))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}
