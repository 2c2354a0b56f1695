//! Cuculescu projections, the noncommutative Calderón–Zygmund decomposition
//! and the projection `ζ`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{self, MatrixField};
use crate::geometry::{cubes, GridSpec};
use crate::matrix::{self, CMatrix, HermitianMatrix, Projection};
use crate::operators::cond_exp;
use crate::tolerances;
use crate::verifier::report::{CheckReport, ReportContext};
use crate::weights::Weight;

/// Field whose cell values are orthogonal projections.
pub type ProjectionField = MatrixField;

/// How the spectral cut treats the kernel of `q_{n−1} E_n(f) q_{n−1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelMode {
    /// `χ_{[0,λ]}` of the compression to the range of `q_{n−1}`,
    /// i.e. `χ_{[0,λ]}(A_n) ∧ q_{n−1}`.
    #[default]
    Compressed,
    /// Literal `χ_{(0,λ]}(A_n)` applied to `f + ε·1`, `ε = 1e-10·λ`.
    Regularized,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CuculescuOptions {
    pub mode: KernelMode,
}

pub const REGULARIZATION: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct CuculescuResult {
    pub lambda: f64,
    /// The field the projections were built from (`f`, or `f + ε` when
    /// regularized).
    pub input: MatrixField,
    /// `q_0, …, q_J`.
    pub q: Vec<ProjectionField>,
    /// `p_0 = 0, p_1, …, p_J` with `p_n = q_{n−1} − q_n`.
    pub p: Vec<ProjectionField>,
    /// `p_rank[n][cube]`: rank of `p_n` on each generation-`n` cube.
    pub p_rank: Vec<Vec<usize>>,
}

impl CuculescuResult {
    pub fn grid(&self) -> &GridSpec {
        self.input.grid()
    }

    /// `q = ∧_n q_n = q_J`.
    pub fn q_final(&self) -> &ProjectionField {
        self.q.last().expect("q_0 always present")
    }

    pub fn stopped(&self) -> bool {
        self.p_rank.iter().flatten().any(|&r| r > 0)
    }
}

/// Cellwise Hermitian and PSD check of the input.
pub fn check_psd(f: &MatrixField) -> Result<()> {
    for (cell, a) in f.matrices().iter().enumerate() {
        let scale = a.frobenius().max(1.0);
        let defect = a.hermitian_defect();
        if defect > tolerances::HERMITIAN * scale {
            return Err(Error::NotHermitian(defect));
        }
        let min = matrix::min_eig(a);
        if min < -tolerances::HERMITIAN * scale {
            return Err(Error::NotPsd { cell, min_eig: min });
        }
    }
    Ok(())
}

/// `λ_max(E_0 f) ≤ λ`, the normalization that makes `q_0 = 1`.
pub fn check_normalization(f: &MatrixField, lambda: f64) -> Result<()> {
    let e0 = cond_exp(f, 0)?;
    let top = matrix::max_eig(e0.cell(0));
    if top > lambda * (1.0 + 1e-12) {
        return Err(Error::Normalization {
            cell: 0,
            eig: top,
            lambda,
        });
    }
    Ok(())
}

pub fn cuculescu(f: &MatrixField, lambda: f64) -> Result<CuculescuResult> {
    cuculescu_with(f, lambda, CuculescuOptions::default())
}

type Basis = Vec<Vec<Complex64>>;

pub fn cuculescu_with(f: &MatrixField, lambda: f64, opts: CuculescuOptions) -> Result<CuculescuResult> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::NonPositiveThreshold(lambda));
    }
    if f.samples() != 1 {
        return Err(Error::ShapeMismatch("cuculescu expects a field without sample axis".into()));
    }
    check_psd(f)?;
    let eps = REGULARIZATION * lambda;
    let input = match opts.mode {
        KernelMode::Compressed => f.clone(),
        KernelMode::Regularized => f.add(&MatrixField::identity(*f.grid()).scale(eps)),
    };
    check_normalization(&input, lambda)?;
    let grid = *input.grid();
    let m = grid.m;
    let identity: Basis = (0..m)
        .map(|i| (0..m).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
        .collect();
    let mut q = vec![MatrixField::identity(grid)];
    let mut p = vec![MatrixField::zeros(grid)];
    let mut p_rank = vec![vec![0; 1]];
    let mut kept_prev: Vec<Basis> = vec![identity];
    for n in 1..=grid.depth {
        let fn_ = cond_exp(&input, n)?;
        let qs = cubes(&grid, n)?;
        let cube_results: Vec<(Basis, Basis)> = qs
            .par_iter()
            .map(|cube| {
                let rep = grid.index(
                    &cube
                        .corner
                        .iter()
                        .map(|c| c << (grid.depth - n))
                        .collect::<Vec<_>>(),
                );
                let parent = &kept_prev[grid.cube_index(rep, n - 1)];
                split_cube(fn_.cell(rep), parent, lambda, eps, opts.mode)
            })
            .collect();
        let qn = MatrixField::from_fn(grid, |c| CMatrix::outer_sum(m, &cube_results[grid.cube_index(c, n)].0));
        let pn = MatrixField::from_fn(grid, |c| CMatrix::outer_sum(m, &cube_results[grid.cube_index(c, n)].1));
        p_rank.push(cube_results.iter().map(|(_, s)| s.len()).collect());
        kept_prev = cube_results.into_iter().map(|(k, _)| k).collect();
        q.push(qn);
        p.push(pn);
    }
    Ok(CuculescuResult {
        lambda,
        input,
        q,
        p,
        p_rank,
    })
}

/// Splits the range of the parent projection into the part kept (`μ ≤ λ`)
/// and the part stopped (`μ > λ`) at this generation.
fn split_cube(a: &CMatrix, parent: &Basis, lambda: f64, eps: f64, mode: KernelMode) -> (Basis, Basis) {
    let r = parent.len();
    if r == 0 {
        return (Vec::new(), Vec::new());
    }
    let m = a.dim();
    match mode {
        KernelMode::Compressed => {
            // B = U* a U on the range of the parent projection
            let au: Vec<Vec<Complex64>> = parent
                .iter()
                .map(|u| (0..m).map(|i| (0..m).map(|j| a.get(i, j) * u[j]).sum()).collect())
                .collect();
            let b = CMatrix::from_fn(r, |i, j| {
                parent[i].iter().zip(&au[j]).map(|(x, y)| x.conj() * y).sum()
            });
            let e = matrix::eig(&HermitianMatrix::symmetrize(b)).expect("finite compression");
            let lift = |j: usize| -> Vec<Complex64> {
                (0..m)
                    .map(|i| (0..r).map(|t| parent[t][i] * e.vectors.get(t, j)).sum())
                    .collect()
            };
            let mut kept = Vec::new();
            let mut stopped = Vec::new();
            for (j, &mu) in e.values.iter().enumerate() {
                if mu <= lambda {
                    kept.push(lift(j));
                } else {
                    stopped.push(lift(j));
                }
            }
            (kept, stopped)
        }
        KernelMode::Regularized => {
            let qp = CMatrix::outer_sum(m, parent);
            let am = HermitianMatrix::symmetrize(a.sandwich(&qp, &qp));
            let e = matrix::eig(&am).expect("finite compression");
            let mut kept = Vec::new();
            let mut stopped = Vec::new();
            for (j, &mu) in e.values.iter().enumerate() {
                if mu > 0.5 * eps && mu <= lambda {
                    kept.push(e.vectors.column(j));
                } else if mu > lambda {
                    stopped.push(e.vectors.column(j));
                }
            }
            (kept, stopped)
        }
    }
}

#[derive(Debug, Clone)]
pub struct CzParts {
    pub cuculescu: CuculescuResult,
    /// `f_n = E_n f` for `n = 0..J`.
    pub f_n: Vec<MatrixField>,
    pub g: MatrixField,
    pub b_d: MatrixField,
    pub b_off: MatrixField,
    /// `b_n^d = p_n (f − f_n) p_n`, index 0 unused (zero).
    pub bd_n: Vec<MatrixField>,
    /// `b_n^off = p_n (f − f_n) q_n + q_n (f − f_n) p_n`, index 0 unused.
    pub boff_n: Vec<MatrixField>,
}

impl CzParts {
    pub fn f(&self) -> &MatrixField {
        &self.cuculescu.input
    }

    pub fn lambda(&self) -> f64 {
        self.cuculescu.lambda
    }
}

pub fn cz_decompose(f: &MatrixField, lambda: f64) -> Result<CzParts> {
    cz_from(cuculescu(f, lambda)?)
}

/// Cellwise `(A + A*)/2`, exactly Hermitian in floating point.
fn hermitian_part(f: &MatrixField) -> MatrixField {
    f.map(|a| HermitianMatrix::symmetrize(a.clone()).into_matrix())
}

/// Decomposition of the field the Cuculescu result was built from.
pub fn cz_from(cuc: CuculescuResult) -> Result<CzParts> {
    let f = &cuc.input;
    let grid = *f.grid();
    let f_n = (0..=grid.depth).map(|n| cond_exp(f, n)).collect::<Result<Vec<_>>>()?;
    let q = cuc.q_final();
    let mut g = hermitian_part(&f.sandwich(q, q));
    let mut b_d = MatrixField::zeros(grid);
    let mut b_off = MatrixField::zeros(grid);
    let mut bd_n = vec![MatrixField::zeros(grid)];
    let mut boff_n = vec![MatrixField::zeros(grid)];
    for n in 1..=grid.depth {
        let (pn, qn) = (&cuc.p[n], &cuc.q[n]);
        g = g.add(&hermitian_part(&f_n[n].sandwich(pn, pn)));
        let diff = f.sub(&f_n[n]);
        let bd = hermitian_part(&diff.sandwich(pn, pn));
        let bo = hermitian_part(&diff.sandwich(pn, qn).add(&diff.sandwich(qn, pn)));
        b_d = b_d.add(&bd);
        b_off = b_off.add(&bo);
        bd_n.push(bd);
        boff_n.push(bo);
    }
    Ok(CzParts {
        cuculescu: cuc,
        f_n,
        g,
        b_d,
        b_off,
        bd_n,
        boff_n,
    })
}

/// `(k, cube)` pairs of stopped cubes whose dilation `5Q` contains each cell.
pub fn stopped_dilations(cuc: &CuculescuResult) -> Vec<Vec<(usize, usize)>> {
    let grid = *cuc.grid();
    let mut hits = vec![Vec::new(); grid.cells()];
    for k in 1..=grid.depth {
        for (idx, cube) in cubes(&grid, k).expect("k in range").iter().enumerate() {
            if cuc.p_rank[k][idx] == 0 {
                continue;
            }
            for x in cube.dilate5(&grid).iter() {
                hits[x].push((k, idx));
            }
        }
    }
    hits
}

/// Value of `p_k` on the `idx`-th generation-`k` cube.
pub fn p_on_cube(cuc: &CuculescuResult, k: usize, idx: usize) -> &CMatrix {
    let grid = cuc.grid();
    let cube = &cubes(grid, k).expect("k in range")[idx];
    let rep: Vec<usize> = cube.corner.iter().map(|c| c << (grid.depth - k)).collect();
    cuc.p[k].cell(grid.index(&rep))
}

/// `ζ(x) = 1 − ⋁ {p_Q : x ∈ 5Q}` over every stopped dyadic cube.
pub fn zeta(cuc: &CuculescuResult) -> ProjectionField {
    let grid = *cuc.grid();
    let hits = stopped_dilations(cuc);
    let cells: Vec<CMatrix> = (0..grid.cells())
        .into_par_iter()
        .map(|x| {
            let ps: Vec<Projection> = hits[x]
                .iter()
                .map(|&(k, idx)| Projection::trusted(p_on_cube(cuc, k, idx).clone()))
                .collect();
            matrix::proj_join(grid.m, ps.iter()).complement().into_matrix()
        })
        .collect();
    MatrixField::from_cells(grid, cells).expect("shape preserved")
}

/// `λ φ_w(1 − q) ≤ [w]_{A₁} ‖f‖_{1,w}`.
pub fn weighted_cuculescu_bound(cuc: &CuculescuResult, f: &MatrixField, w: &Weight, ctx: &ReportContext) -> Result<CheckReport> {
    let one_minus_q = MatrixField::identity(*f.grid()).sub(cuc.q_final());
    let lhs = cuc.lambda * field::trace(&one_minus_q, Some(w))?.re;
    let rhs = w.a1() * field::lp_norm(f, 1.0, Some(w))?;
    Ok(CheckReport::inequality(
        "cuculescu.weighted",
        ctx,
        lhs,
        rhs,
        1.0,
        tolerances::INEQUALITY,
    ))
}
