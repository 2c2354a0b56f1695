//! Dense complex matrices, Hermitian eigendecomposition by cyclic Jacobi, and
//! the functional calculus built on it.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerances;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix({}x{})", self.n, self.n)?;
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { ONE } else { ZERO })
    }

    pub fn diag(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Row-major entries; `data.len()` must be a perfect square.
    pub fn from_row_major(data: Vec<Complex64>) -> Result<Self> {
        let n = (data.len() as f64).sqrt().round() as usize;
        if n * n != data.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} entries do not form a square matrix",
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn real(n: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), n * n);
        Self {
            n,
            data: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.n + j] = z;
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i).conj())
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Self) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn add_scaled(&mut self, other: &Self, s: f64) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Self { n, data: out }
    }

    /// `a · self · b`.
    pub fn sandwich(&self, a: &Self, b: &Self) -> Self {
        a.mul(self).mul(b)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `‖A − A*‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                s += (self.get(i, j) - self.get(j, i).conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    /// Real `Re tr(A* B)`.
    pub fn inner(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.conj() * b).re)
            .sum()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    /// Orthogonal projector `Σ v v*` onto the span of orthonormal `vectors`.
    pub fn outer_sum(n: usize, vectors: &[Vec<Complex64>]) -> Self {
        let mut out = Self::zeros(n);
        for v in vectors {
            for i in 0..n {
                for j in 0..n {
                    out.data[i * n + j] += v[i] * v[j].conj();
                }
            }
        }
        out
    }

    /// Operator norm (largest singular value).
    pub fn op_norm(&self) -> f64 {
        singular_values(self).first().copied().unwrap_or(0.0)
    }
}

/// Hermitian matrix, symmetrized exactly on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Accepts `a` if it is Hermitian within `1e-10 · max(1, ‖a‖)`.
    pub fn new(a: CMatrix) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = a.hermitian_defect();
        if defect > tolerances::HERMITIAN * a.frobenius().max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self::symmetrize(a))
    }

    /// `(a + a*)/2` without a Hermiticity check.
    pub fn symmetrize(a: CMatrix) -> Self {
        let n = a.dim();
        let mut out = a.clone();
        for i in 0..n {
            out.set(i, i, Complex64::new(a.get(i, i).re, 0.0));
            for j in (i + 1)..n {
                let z = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
                out.set(i, j, z);
                out.set(j, i, z.conj());
            }
        }
        Self(out)
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }
}

/// Eigenvalues in ascending order and eigenvectors as matrix columns.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Eigen {
    /// `V diag(f(λ)) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        CMatrix::from_fn(n, |i, j| {
            let mut z = ZERO;
            for (k, &w) in weights.iter().enumerate() {
                if w != 0.0 {
                    z += self.vectors.get(i, k) * self.vectors.get(j, k).conj() * w;
                }
            }
            z
        })
    }

    pub fn spectral_radius(&self) -> f64 {
        self.values.iter().map(|l| l.abs()).fold(0.0, f64::max)
    }

    /// Zero-classification threshold `ε_eig = 1e-12 · max(1, ‖A‖)`.
    pub fn zero_threshold(&self) -> f64 {
        tolerances::EIG_ZERO * self.spectral_radius().max(1.0)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
pub fn eig(a: &HermitianMatrix) -> Result<Eigen> {
    let a = a.as_matrix();
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.dim();
    let mut m = a.data.clone();
    let mut v = CMatrix::identity(n).data;
    let norm = a.frobenius();
    if norm > 0.0 {
        for _ in 0..tolerances::JACOBI_MAX_SWEEPS {
            let mut off = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        off += m[i * n + j].norm_sqr();
                    }
                }
            }
            if off.sqrt() <= tolerances::JACOBI_OFFDIAG * norm {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut m, &mut v, n, p, q);
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[i * n + i].re).collect();
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = CMatrix::from_fn(n, |i, j| v[i * n + order[j]]);
    Ok(Eigen { values, vectors })
}

/// One Jacobi rotation annihilating entry `(p, q)`.
///
/// With `a_pq = |a_pq| e^{iφ}` the unitary `G = diag(1, e^{-iφ}) R(θ)` acting on
/// coordinates `p, q` reduces the block to a real symmetric one and rotates it
/// diagonal; `A ← G* A G`, `V ← V G`.
fn rotate(m: &mut [Complex64], v: &mut [Complex64], n: usize, p: usize, q: usize) {
    let apq = m[p * n + q];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = m[p * n + p].re;
    let aqq = m[q * n + q].re;
    let phase = apq / mag;
    let theta = (aqq - app) / (2.0 * mag);
    let t = theta.signum() / (theta.abs() + theta.hypot(1.0));
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / t.hypot(1.0);
    let s = t * c;
    let g11 = Complex64::new(c, 0.0);
    let g12 = Complex64::new(s, 0.0);
    let g21 = -phase.conj() * s;
    let g22 = phase.conj() * c;
    for k in 0..n {
        let akp = m[k * n + p];
        let akq = m[k * n + q];
        m[k * n + p] = akp * g11 + akq * g21;
        m[k * n + q] = akp * g12 + akq * g22;
    }
    for k in 0..n {
        let apk = m[p * n + k];
        let aqk = m[q * n + k];
        m[p * n + k] = g11.conj() * apk + g21.conj() * aqk;
        m[q * n + k] = g12.conj() * apk + g22.conj() * aqk;
    }
    m[p * n + q] = ZERO;
    m[q * n + p] = ZERO;
    m[p * n + p] = Complex64::new(m[p * n + p].re, 0.0);
    m[q * n + q] = Complex64::new(m[q * n + q].re, 0.0);
    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = vkp * g11 + vkq * g21;
        v[k * n + q] = vkp * g12 + vkq * g22;
    }
}

/// Spectral windows used by the functional calculus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralInterval {
    /// `(0, λ]`, zero-classified eigenvalues excluded.
    OpenClosed(f64),
    /// `(λ, ∞)`.
    Above(f64),
    /// `[0, λ]`, zero-classified eigenvalues included.
    ClosedClosed(f64),
    /// The eigenvalues classified as zero.
    Kernel,
}

impl SpectralInterval {
    fn lambda(&self) -> Option<f64> {
        match *self {
            Self::OpenClosed(l) | Self::Above(l) | Self::ClosedClosed(l) => Some(l),
            Self::Kernel => None,
        }
    }

    fn contains(&self, mu: f64, eps: f64) -> bool {
        match *self {
            Self::OpenClosed(l) => mu > eps && mu <= l,
            Self::Above(l) => mu > l && mu > eps,
            Self::ClosedClosed(l) => mu >= -eps && mu <= l,
            Self::Kernel => mu.abs() <= eps,
        }
    }
}

/// Orthogonal projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection(CMatrix);

impl Projection {
    /// Validates `P = P*`, `P² = P` within `1e-10`.
    pub fn new(p: CMatrix) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::NonFinite);
        }
        let defect = p.hermitian_defect().max(p.mul(&p).sub(&p).frobenius());
        if defect > tolerances::PROJECTION * (p.dim() as f64).max(1.0) {
            return Err(Error::NotProjection(defect));
        }
        Ok(Self(p))
    }

    pub(crate) fn trusted(p: CMatrix) -> Self {
        Self(p)
    }

    pub fn zero(n: usize) -> Self {
        Self(CMatrix::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n))
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn complement(&self) -> Self {
        Self(CMatrix::identity(self.0.dim()).sub(&self.0))
    }

    pub fn rank(&self) -> usize {
        self.0.trace().re.round().max(0.0) as usize
    }

    /// Orthonormal basis of the range.
    pub fn range_basis(&self) -> Vec<Vec<Complex64>> {
        range_basis(&self.0)
    }
}

/// Orthonormal eigenvectors with eigenvalue above 1/2 of a (near-)projection.
pub fn range_basis(p: &CMatrix) -> Vec<Vec<Complex64>> {
    let e = eig(&HermitianMatrix::symmetrize(p.clone())).expect("finite projection");
    e.values
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > 0.5)
        .map(|(j, _)| e.vectors.column(j))
        .collect()
}

pub fn spectral_projection(a: &HermitianMatrix, interval: SpectralInterval) -> Result<Projection> {
    if let Some(l) = interval.lambda() {
        if !(l >= 0.0) || !l.is_finite() {
            return Err(Error::InvalidInterval(format!("{interval:?}")));
        }
    }
    let e = eig(a)?;
    Ok(spectral_projection_of(&e, interval))
}

pub fn spectral_projection_of(e: &Eigen, interval: SpectralInterval) -> Projection {
    let eps = e.zero_threshold();
    Projection(e.apply(|mu| if interval.contains(mu, eps) { 1.0 } else { 0.0 }))
}

/// Number of eigenvalues in the window.
pub fn spectral_count(e: &Eigen, interval: SpectralInterval) -> usize {
    let eps = e.zero_threshold();
    e.values.iter().filter(|&&mu| interval.contains(mu, eps)).count()
}

/// `|x| = (x* x)^{1/2}`.
pub fn abs(x: &CMatrix) -> HermitianMatrix {
    let n = x.dim();
    let e = dilation_eig(x);
    let mut out = CMatrix::zeros(n);
    for (j, &s) in e.values.iter().enumerate() {
        if s <= 0.0 {
            continue;
        }
        let v: Vec<Complex64> = (0..n).map(|i| e.vectors.get(n + i, j)).collect();
        for a in 0..n {
            for b in 0..n {
                let z = out.get(a, b) + v[a] * v[b].conj() * (2.0 * s);
                out.set(a, b, z);
            }
        }
    }
    HermitianMatrix::symmetrize(out)
}

/// Eigen-decomposition of `[[0, X], [X*, 0]]`, whose spectrum is `±s_i(X)`.
/// Working on the dilation keeps small singular values accurate to
/// `ε‖X‖` instead of `√ε‖X‖`.
fn dilation_eig(x: &CMatrix) -> Eigen {
    let n = x.dim();
    let xa = x.adjoint();
    let big = CMatrix::from_fn(2 * n, |i, j| match (i < n, j < n) {
        (true, false) => x.get(i, j - n),
        (false, true) => xa.get(i - n, j),
        _ => Complex64::new(0.0, 0.0),
    });
    eig(&HermitianMatrix::symmetrize(big)).expect("finite input")
}

/// Triangular factor `R` of a Householder QR of the `Km × m` matrix stacked
/// from `blocks`, so that `Σ_k B_k* B_k = R* R`.
fn stacked_r(blocks: &[&CMatrix]) -> CMatrix {
    let m = blocks.first().map_or(0, |b| b.dim());
    let rows = blocks.len() * m;
    let mut a: Vec<Complex64> = (0..rows)
        .flat_map(|i| (0..m).map(move |j| blocks[i / m].get(i % m, j)))
        .collect();
    for j in 0..m {
        let norm = (j..rows).map(|i| a[i * m + j].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[j * m + j];
        let phase = if x0.norm() == 0.0 { Complex64::new(1.0, 0.0) } else { x0 / x0.norm() };
        let mut v: Vec<Complex64> = (j..rows).map(|i| a[i * m + j]).collect();
        v[0] += phase * norm;
        let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        for c in j..m {
            let dot: Complex64 = v.iter().enumerate().map(|(t, vi)| vi.conj() * a[(j + t) * m + c]).sum();
            let f = dot * (2.0 / vv);
            for (t, vi) in v.iter().enumerate() {
                a[(j + t) * m + c] -= f * vi;
            }
        }
    }
    CMatrix::from_fn(m, |i, j| if i <= j { a[i * m + j] } else { ZERO })
}

/// The `m` singular values (descending) of the `Km × m` matrix obtained by
/// stacking `blocks` vertically, i.e. the eigenvalues of `(Σ_k B_k* B_k)^{1/2}`.
pub fn stacked_singular_values(blocks: &[&CMatrix]) -> Vec<f64> {
    if blocks.len() == 1 {
        return singular_values(blocks[0]);
    }
    singular_values(&stacked_r(blocks))
}

/// Singular values in descending order.
pub fn singular_values(x: &CMatrix) -> Vec<f64> {
    let n = x.dim();
    if x.hermitian_defect() == 0.0 {
        let e = eig(&HermitianMatrix::symmetrize(x.clone())).expect("finite input");
        let mut s: Vec<f64> = e.values.iter().map(|v| v.abs()).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        return s;
    }
    let e = dilation_eig(x);
    e.values.iter().rev().take(n).map(|s| s.max(0.0)).collect()
}

/// Schatten `p`-norm, `p ∈ [1, ∞]`.
pub fn schatten_norm(x: &CMatrix, p: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    check_exponent(p)?;
    Ok(schatten_from_singular(&singular_values(x), p))
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::ExponentOutOfRange(p));
    }
    Ok(())
}

pub(crate) fn schatten_from_singular(s: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return s.iter().copied().fold(0.0, f64::max);
    }
    s.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p)
}

/// `A ≤ B` in the operator order: `λ_min(B − A) ≥ −tol`.
pub fn psd_leq(a: &HermitianMatrix, b: &HermitianMatrix, tol: f64) -> bool {
    min_eig(&b.as_matrix().sub(a.as_matrix())) >= -tol
}

pub fn min_eig(a: &CMatrix) -> f64 {
    eig(&HermitianMatrix::symmetrize(a.clone()))
        .expect("finite input")
        .min()
}

pub fn max_eig(a: &CMatrix) -> f64 {
    eig(&HermitianMatrix::symmetrize(a.clone()))
        .expect("finite input")
        .max()
}

/// Projection onto the span of the union of ranges.
///
/// Range vectors are orthogonalized by two-pass Gram–Schmidt; a vector whose
/// residual norm falls below `1e-10` is treated as dependent.
pub fn proj_join<'a>(n: usize, projections: impl IntoIterator<Item = &'a Projection>) -> Projection {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for p in projections {
        for mut v in p.range_basis() {
            if basis.len() == n {
                break;
            }
            for _ in 0..2 {
                for u in &basis {
                    let c: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (vi, ui) in v.iter_mut().zip(u) {
                        *vi -= c * ui;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > tolerances::JOIN_CUTOFF {
                v.iter_mut().for_each(|z| *z /= norm);
                basis.push(v);
            }
        }
    }
    Projection(CMatrix::outer_sum(n, &basis))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn herm(a: CMatrix) -> HermitianMatrix {
        HermitianMatrix::new(a).unwrap()
    }

    fn reconstruction_residual(a: &CMatrix, e: &Eigen) -> f64 {
        e.apply(|l| l).sub(a).frobenius()
    }

    #[test]
    fn identity_eigenvalues() {
        let e = eig(&herm(CMatrix::identity(4))).unwrap();
        assert!(e.values.iter().all(|&l| (l - 1.0).abs() < 1e-15));
    }

    #[test]
    fn diagonal_eigenpairs() {
        let e = eig(&herm(CMatrix::diag(&[3.0, 1.0]))).unwrap();
        assert_eq!(e.values, vec![1.0, 3.0]);
        assert!((e.vectors.get(1, 0).norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors.get(0, 1).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut r = rng::stream(7, 0);
        for m in [2, 3, 5, 8, 16] {
            let a = rng::hermitian(&mut r, m);
            let e = eig(&herm(a.clone())).unwrap();
            let scale = a.frobenius().max(1.0);
            assert!(reconstruction_residual(&a, &e) <= 1e-10 * scale);
            let vv = e.vectors.adjoint().mul(&e.vectors);
            assert!(vv.sub(&CMatrix::identity(m)).frobenius() <= 1e-10);
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn degenerate_and_tiny_entries() {
        let mut a = CMatrix::identity(3);
        a.set(0, 1, Complex64::new(1e-200, 1e-200));
        a.set(1, 0, Complex64::new(1e-200, -1e-200));
        let e = eig(&herm(a.clone())).unwrap();
        assert!(reconstruction_residual(&a, &e) < 1e-14);
        let z = eig(&herm(CMatrix::zeros(3))).unwrap();
        assert_eq!(z.values, vec![0.0; 3]);
    }

    #[test]
    fn non_finite_rejected() {
        let mut a = CMatrix::identity(2);
        a.set(0, 0, Complex64::new(f64::NAN, 0.0));
        assert!(matches!(HermitianMatrix::new(a), Err(Error::NonFinite)));
    }

    #[test]
    fn non_hermitian_rejected() {
        let a = CMatrix::real(2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(HermitianMatrix::new(a), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn spectral_projection_examples() {
        let p = spectral_projection(&herm(CMatrix::diag(&[0.5, 2.0])), SpectralInterval::OpenClosed(1.0)).unwrap();
        assert!(p.as_matrix().sub(&CMatrix::diag(&[1.0, 0.0])).frobenius() < 1e-15);
        let z = spectral_projection(&herm(CMatrix::zeros(3)), SpectralInterval::Above(0.0)).unwrap();
        assert_eq!(z.rank(), 0);
        assert!(spectral_projection(&herm(CMatrix::zeros(2)), SpectralInterval::Above(-1.0)).is_err());
        assert!(spectral_projection(&herm(CMatrix::zeros(2)), SpectralInterval::ClosedClosed(f64::NAN)).is_err());
    }

    #[test]
    fn spectral_projection_rank_matches_count() {
        let mut r = rng::stream(3, 0);
        let g = rng::ginibre(&mut r, 6);
        let a = herm(g.mul(&g.adjoint()));
        let e = eig(&a).unwrap();
        let median = (e.values[2] + e.values[3]) / 2.0;
        let p = spectral_projection(&a, SpectralInterval::OpenClosed(median)).unwrap();
        let expected = e.values.iter().filter(|&&l| l > 0.0 && l <= median).count();
        assert_eq!(p.rank(), expected);
        assert_eq!(expected, 3);
    }

    #[test]
    fn spectral_windows_partition_identity() {
        let mut r = rng::stream(5, 1);
        for rank in 0..=4 {
            let g = rng::ginibre(&mut r, 4);
            let k = rng::projection(&mut r, 4, rank);
            let a = herm(k.mul(&g.mul(&g.adjoint())).mul(&k));
            let lam = 0.7;
            let sum = [
                SpectralInterval::OpenClosed(lam),
                SpectralInterval::Above(lam),
                SpectralInterval::Kernel,
            ]
            .iter()
            .map(|&i| spectral_projection(&a, i).unwrap().into_matrix())
            .fold(CMatrix::zeros(4), |acc, p| acc.add(&p));
            assert!(sum.sub(&CMatrix::identity(4)).frobenius() < 1e-9);
            let p = spectral_projection(&a, SpectralInterval::OpenClosed(lam)).unwrap();
            let comm = p.as_matrix().commutator(a.as_matrix()).frobenius();
            assert!(comm <= 1e-9 * a.as_matrix().frobenius().max(1.0));
        }
    }

    #[test]
    fn abs_examples() {
        let nil = CMatrix::real(2, &[0.0, 1.0, 0.0, 0.0]);
        let a = abs(&nil);
        assert!(a.as_matrix().sub(&CMatrix::diag(&[0.0, 1.0])).frobenius() < 1e-15);
        let mut r = rng::stream(9, 0);
        let u = rng::unitary(&mut r, 3);
        assert!(abs(&u).as_matrix().sub(&CMatrix::identity(3)).frobenius() < 1e-12);
        let g = rng::ginibre(&mut r, 3);
        let psd = g.mul(&g.adjoint());
        assert!(abs(&psd).as_matrix().sub(&psd).frobenius() < 1e-12 * psd.frobenius());
    }

    #[test]
    fn abs_preserves_schatten_norms_and_unitary_invariance() {
        let mut r = rng::stream(10, 0);
        let x = rng::ginibre(&mut r, 4);
        let ax = abs(&x);
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let a = schatten_norm(&x, p).unwrap();
            let b = schatten_norm(ax.as_matrix(), p).unwrap();
            assert!((a - b).abs() < 1e-12 * a);
        }
        let u = rng::unitary(&mut r, 4);
        let v = rng::unitary(&mut r, 4);
        let e1 = eig(&abs(&u.mul(&x).mul(&v))).unwrap();
        let e2 = eig(&ax).unwrap();
        for (a, b) in e1.values.iter().zip(&e2.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn schatten_examples() {
        assert!((schatten_norm(&CMatrix::identity(3), 1.0).unwrap() - 3.0).abs() < 1e-14);
        let mut r = rng::stream(1, 2);
        let p = rng::projection(&mut r, 4, 1);
        for q in [1.0, 2.0, 4.5, f64::INFINITY] {
            assert!((schatten_norm(&p, q).unwrap() - 1.0).abs() < 1e-12);
        }
        let x = rng::ginibre(&mut r, 5);
        let frob = x.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((schatten_norm(&x, 2.0).unwrap() - frob).abs() < 1e-12 * frob);
        assert!(matches!(schatten_norm(&x, 0.5), Err(Error::ExponentOutOfRange(_))));
    }

    #[test]
    fn psd_order_examples() {
        let a = herm(CMatrix::diag(&[1.0, 1.0]));
        assert!(psd_leq(&a, &a, 0.0));
        assert!(psd_leq(&a, &herm(CMatrix::diag(&[2.0, 2.0])), 0.0));
        let mut r = rng::stream(4, 4);
        let g = rng::ginibre(&mut r, 3);
        let base = herm(g.mul(&g.adjoint()));
        let v = rng::unitary(&mut r, 3).column(0);
        let pert = CMatrix::outer_sum(3, &[v]).scale(-0.3);
        let b = herm(base.as_matrix().add(&pert));
        assert!(!psd_leq(&base, &b, 1e-12));
        assert!((min_eig(&b.as_matrix().sub(base.as_matrix())) + 0.3).abs() < 1e-12);
    }

    #[test]
    fn join_examples() {
        let mut r = rng::stream(11, 0);
        let p = Projection::new(rng::projection(&mut r, 4, 2)).unwrap();
        let pp = proj_join(4, [&p, &p]);
        assert!(pp.as_matrix().sub(p.as_matrix()).frobenius() < 1e-10);

        let e0 = Projection::new(CMatrix::diag(&[1.0, 0.0, 0.0])).unwrap();
        let e1 = Projection::new(CMatrix::diag(&[0.0, 1.0, 0.0])).unwrap();
        let j = proj_join(3, [&e0, &e1]);
        assert!(j.as_matrix().sub(&CMatrix::diag(&[1.0, 1.0, 0.0])).frobenius() < 1e-14);
        assert_eq!(proj_join(3, std::iter::empty()).rank(), 0);
    }

    #[test]
    fn join_matches_column_space_rank() {
        let mut r = rng::stream(11, 1);
        for _ in 0..20 {
            let a = Projection::new(rng::projection(&mut r, 5, 1)).unwrap();
            let b = Projection::new(rng::projection(&mut r, 5, 2)).unwrap();
            let j = proj_join(5, [&a, &b]);
            Projection::new(j.as_matrix().clone()).unwrap();
            assert_eq!(j.rank(), 3);
            // both ranges lie inside the join
            for p in [&a, &b] {
                let leak = j.complement().as_matrix().mul(p.as_matrix()).frobenius();
                assert!(leak < 1e-10);
            }
            // commutative
            let j2 = proj_join(5, [&b, &a]);
            assert!(j.as_matrix().sub(j2.as_matrix()).frobenius() < 1e-10);
        }
    }
}
