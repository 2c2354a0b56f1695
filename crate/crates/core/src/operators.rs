//! Conditional expectations `E_k`, ball averages `M_k`, truncated averages
//! `M_{k,n}`, the differences `T_k = M_k − E_k` and the Rademacher
//! linearization `Tf = Σ_k ε_k T_k f`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::MatrixField;
use crate::geometry::{self, GridSpec};
use crate::matrix::CMatrix;
use crate::rng;

/// `R × (J+1)` table of Rademacher signs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignSample {
    depth: usize,
    rows: Vec<Vec<i8>>,
    seed: Option<u64>,
}

pub const MAX_EXHAUSTIVE_DEPTH: usize = 4;

impl SignSample {
    pub fn random(depth: usize, rows: usize, seed: u64) -> Result<Self> {
        if rows == 0 {
            return Err(Error::ShapeMismatch("sign sample needs at least one row".into()));
        }
        let mut r = rng::stream(seed, 0x5167);
        let rows = (0..rows)
            .map(|_| (0..=depth).map(|_| if r.random_bool(0.5) { 1 } else { -1 }).collect())
            .collect();
        Ok(Self {
            depth,
            rows,
            seed: Some(seed),
        })
    }

    /// All `2^{J+1}` patterns; row `s` has bit `k` of `s` set ⇔ `ε_k = −1`.
    pub fn exhaustive(depth: usize) -> Result<Self> {
        if depth > MAX_EXHAUSTIVE_DEPTH {
            return Err(Error::Invalid(format!(
                "exhaustive signs need J <= {MAX_EXHAUSTIVE_DEPTH}, got {depth}"
            )));
        }
        let rows = (0..1usize << (depth + 1))
            .map(|s| (0..=depth).map(|k| if s >> k & 1 == 1 { -1 } else { 1 }).collect())
            .collect();
        Ok(Self {
            depth,
            rows,
            seed: None,
        })
    }

    pub fn from_rows(depth: usize, rows: Vec<Vec<i8>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::ShapeMismatch("sign sample needs at least one row".into()));
        }
        for row in &rows {
            if row.len() != depth + 1 {
                return Err(Error::ShapeMismatch(format!(
                    "sign row of length {} for J = {depth}",
                    row.len()
                )));
            }
            if row.iter().any(|&e| e != 1 && e != -1) {
                return Err(Error::Invalid("signs must be +1 or -1".into()));
            }
        }
        Ok(Self {
            depth,
            rows,
            seed: None,
        })
    }

    /// Same rows with one fresh column per extra generation, for refinement.
    pub fn extend(&self, depth: usize, seed: u64) -> Result<Self> {
        if depth < self.depth {
            return Err(Error::Invalid("cannot shrink a sign sample".into()));
        }
        let mut r = rng::stream(seed, 0x5168 + depth as u64);
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut row = row.clone();
                row.extend((self.depth..depth).map(|_| if r.random_bool(0.5) { 1i8 } else { -1 }));
                row
            })
            .collect();
        Ok(Self {
            depth,
            rows,
            seed: self.seed,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Whether the rows are exactly the `2^{J+1}` distinct patterns.
    pub fn is_exhaustive(&self) -> bool {
        let distinct: std::collections::BTreeSet<&Vec<i8>> = self.rows.iter().collect();
        self.depth < 63 && distinct.len() == self.rows.len() && self.rows.len() == 1usize << (self.depth + 1)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[Vec<i8>] {
        &self.rows
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}

type OffsetKey = (usize, usize, usize);
type AnnulusKey = (usize, usize, usize, usize);

fn ball_cache() -> &'static Mutex<HashMap<OffsetKey, Arc<Vec<usize>>>> {
    static CACHE: OnceLock<Mutex<HashMap<OffsetKey, Arc<Vec<usize>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn annulus_cache() -> &'static Mutex<HashMap<AnnulusKey, Arc<Vec<Vec<usize>>>>> {
    static CACHE: OnceLock<Mutex<HashMap<AnnulusKey, Arc<Vec<Vec<usize>>>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Cells of the radius-`2^{-k}` ball around cell 0, memoized per grid.
pub fn ball_offsets(grid: &GridSpec, k: usize) -> Result<Arc<Vec<usize>>> {
    grid.check_generation(k)?;
    let key = (grid.d, grid.depth, k);
    if let Some(hit) = ball_cache().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let offs = Arc::new(geometry::ball_at_origin(grid, k)?.iter().collect::<Vec<_>>());
    ball_cache().lock().unwrap().insert(key, offs.clone());
    Ok(offs)
}

/// `annuli[x]` lists the cells of `I(B_k + x, n)`, memoized per grid.
pub fn annulus_cells(grid: &GridSpec, k: usize, n: usize) -> Result<Arc<Vec<Vec<usize>>>> {
    if k >= n {
        return Err(Error::ScaleOrder { k, n });
    }
    grid.check_generation(n)?;
    let key = (grid.d, grid.depth, k, n);
    if let Some(hit) = annulus_cache().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let table = geometry::annulus_table(grid, k, n)?;
    let cells = Arc::new(table.iter().map(|s| s.iter().collect()).collect::<Vec<Vec<usize>>>());
    annulus_cache().lock().unwrap().insert(key, cells.clone());
    Ok(cells)
}

/// Applies a per-sample-block map and reassembles the field.
fn per_sample(f: &MatrixField, op: impl Fn(&[CMatrix]) -> Vec<CMatrix> + Sync) -> MatrixField {
    let n = f.cells();
    let data: Vec<CMatrix> = (0..f.samples())
        .flat_map(|s| op(&f.matrices()[s * n..(s + 1) * n]))
        .collect();
    MatrixField::with_samples(*f.grid(), f.samples(), data).expect("shape preserved")
}

/// `E_k F`: every generation-`k` cube replaced by its average.
pub fn cond_exp(f: &MatrixField, k: usize) -> Result<MatrixField> {
    let grid = *f.grid();
    grid.check_generation(k)?;
    if k == grid.depth {
        return Ok(f.clone());
    }
    let count = grid.cubes_in_generation(k);
    let per_cube = (grid.cells() / count) as f64;
    let owner: Vec<usize> = (0..grid.cells()).map(|c| grid.cube_index(c, k)).collect();
    Ok(per_sample(f, |block| {
        let mut sums = vec![CMatrix::zeros(grid.m); count];
        for (c, a) in block.iter().enumerate() {
            sums[owner[c]].add_assign(a);
        }
        let avgs: Vec<CMatrix> = sums.iter().map(|s| s.scale(per_cube.recip())).collect();
        owner.iter().map(|&q| avgs[q].clone()).collect()
    }))
}

/// `Σ_{o ∈ offsets} block[x + o] / count` for every cell `x`.
fn translate_average(grid: &GridSpec, block: &[CMatrix], offsets: &[usize], count: usize) -> Vec<CMatrix> {
    let inv = (count as f64).recip();
    (0..grid.cells())
        .into_par_iter()
        .map(|x| {
            let mut acc = CMatrix::zeros(grid.m);
            for &o in offsets {
                acc.add_assign(&block[grid.translate(x, o)]);
            }
            acc.scale(inv)
        })
        .collect()
}

/// `M_k F`: average over the closed discrete ball of radius `2^{-k}`.
pub fn ball_avg(f: &MatrixField, k: usize) -> Result<MatrixField> {
    let grid = *f.grid();
    let offs = ball_offsets(&grid, k)?;
    if offs.len() == grid.cells() {
        return cond_exp(f, 0);
    }
    Ok(per_sample(f, |block| translate_average(&grid, block, &offs, offs.len())))
}

/// `M_{k,n} F`: the ball-normalized sum over `I(B_k + x, n)`.
pub fn truncated_avg(f: &MatrixField, k: usize, n: usize) -> Result<MatrixField> {
    let grid = *f.grid();
    let annuli = annulus_cells(&grid, k, n)?;
    let inv = (ball_offsets(&grid, k)?.len() as f64).recip();
    Ok(per_sample(f, |block| {
        (0..grid.cells())
            .into_par_iter()
            .map(|x| {
                let mut acc = CMatrix::zeros(grid.m);
                for &y in &annuli[x] {
                    acc.add_assign(&block[y]);
                }
                acc.scale(inv)
            })
            .collect()
    }))
}

/// `T_k F = M_k F − E_k F`.
pub fn t_op(f: &MatrixField, k: usize) -> Result<MatrixField> {
    Ok(ball_avg(f, k)?.sub(&cond_exp(f, k)?))
}

/// `(T_0 F, …, T_J F)`.
pub fn t_sequence(f: &MatrixField) -> Result<Vec<MatrixField>> {
    (0..=f.grid().depth).map(|k| t_op(f, k)).collect()
}

/// `(TF)(s, ·) = Σ_k ε_k(s) T_k F` for every sign row `s`.
pub fn linearize(f: &MatrixField, signs: &SignSample) -> Result<MatrixField> {
    linearize_sequence(&t_sequence_checked(f, signs)?, signs)
}

fn t_sequence_checked(f: &MatrixField, signs: &SignSample) -> Result<Vec<MatrixField>> {
    if signs.depth() != f.grid().depth {
        return Err(Error::ShapeMismatch(format!(
            "signs for J = {} applied on a grid with J = {}",
            signs.depth(),
            f.grid().depth
        )));
    }
    if f.samples() != 1 {
        return Err(Error::ShapeMismatch("linearize expects a field without sample axis".into()));
    }
    t_sequence(f)
}

/// Signed sums of a precomputed sequence `(T_k F)`.
pub fn linearize_sequence(seq: &[MatrixField], signs: &SignSample) -> Result<MatrixField> {
    let first = seq
        .first()
        .ok_or_else(|| Error::ShapeMismatch("empty sequence".into()))?;
    if seq.len() != signs.depth() + 1 {
        return Err(Error::ShapeMismatch(format!(
            "{} terms for {} sign columns",
            seq.len(),
            signs.depth() + 1
        )));
    }
    let grid = *first.grid();
    let rows: Vec<MatrixField> = signs
        .rows()
        .par_iter()
        .map(|row| {
            MatrixField::from_fn(grid, |c| {
                let mut acc = CMatrix::zeros(grid.m);
                for (term, &e) in seq.iter().zip(row) {
                    acc.add_scaled(term.cell(c), e as f64);
                }
                acc
            })
        })
        .collect();
    MatrixField::stack(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{lp_norm, trace};
    use crate::geometry::{annulus, ball, cubes};
    use crate::matrix::{self, HermitianMatrix};
    use crate::weights::Weight;
    use num_complex::Complex64;
    use proptest::{prop_assert, proptest};

    fn grid(d: usize, j: usize, m: usize) -> GridSpec {
        GridSpec::new(d, j, m).unwrap()
    }

    fn random_field(g: GridSpec, seed: u64) -> MatrixField {
        let mut r = rng::stream(seed, 20);
        MatrixField::from_fn(g, |_| rng::ginibre(&mut r, g.m))
    }

    fn random_psd(g: GridSpec, seed: u64) -> MatrixField {
        random_field(g, seed).map(|a| a.mul(&a.adjoint()))
    }

    fn close(a: &MatrixField, b: &MatrixField, tol: f64) -> bool {
        a.sub(b).max_frobenius() <= tol * a.max_frobenius().max(1.0)
    }

    #[test]
    fn cond_exp_examples() {
        let g = grid(1, 3, 2);
        let f = random_field(g, 1);
        assert_eq!(cond_exp(&f, 3).unwrap(), f);
        let e0 = cond_exp(&f, 0).unwrap();
        let mut avg = CMatrix::zeros(2);
        for c in 0..8 {
            avg.add_scaled(f.cell(c), 0.125);
        }
        for c in 0..8 {
            assert!(e0.cell(c).sub(&avg).max_abs() < 1e-14);
        }
        assert!(matches!(cond_exp(&f, 4), Err(Error::GenerationOutOfRange { .. })));
    }

    #[test]
    fn conditional_expectation_properties() {
        for g in [grid(1, 4, 3), grid(2, 3, 2)] {
            let f = random_field(g, 2);
            let pos = random_psd(g, 3);
            for k in 0..=g.depth {
                let ek = cond_exp(&f, k).unwrap();
                assert!(close(&cond_exp(&ek, k).unwrap(), &ek, 1e-13));
                assert!((trace(&ek, None).unwrap() - trace(&f, None).unwrap()).norm() < 1e-12);
                assert!(cond_exp(&pos, k).unwrap().is_psd(1e-12));
                for j in 0..=k {
                    assert!(close(
                        &cond_exp(&ek, j).unwrap(),
                        &cond_exp(&f, j).unwrap(),
                        1e-12
                    ));
                }
                // bimodularity over a k-measurable scalar projection field
                let mut r = rng::stream(9, k as u64);
                let on: Vec<bool> = (0..g.cubes_in_generation(k)).map(|_| r.random_bool(0.5)).collect();
                let a = MatrixField::from_fn(g, |c| {
                    if on[g.cube_index(c, k)] {
                        CMatrix::identity(g.m)
                    } else {
                        CMatrix::zeros(g.m)
                    }
                });
                let lhs = cond_exp(&a.mul(&f).mul(&a), k).unwrap();
                let rhs = a.mul(&ek).mul(&a);
                assert!(close(&lhs, &rhs, 1e-13));
                if k >= 1 {
                    let parent = cond_exp(&pos, k - 1).unwrap();
                    let bound = parent.scale((1u32 << g.d) as f64);
                    let child = cond_exp(&pos, k).unwrap();
                    for c in 0..g.cells() {
                        let diff = HermitianMatrix::symmetrize(bound.cell(c).sub(child.cell(c)));
                        assert!(matrix::min_eig(diff.as_matrix()) >= -1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn ball_avg_examples() {
        let g = grid(1, 4, 2);
        let c = MatrixField::constant(g, &CMatrix::real(2, &[1.0, 2.0, 2.0, 5.0]));
        for k in 0..=4 {
            assert!(close(&ball_avg(&c, k).unwrap(), &c, 1e-14));
        }
        let f = random_field(g, 4);
        assert!(close(&ball_avg(&f, 0).unwrap(), &cond_exp(&f, 0).unwrap(), 1e-14));
        for g in [grid(1, 4, 2), grid(2, 3, 2)] {
            let f = random_field(g, 5);
            for k in 0..=g.depth {
                let mk = ball_avg(&f, k).unwrap();
                assert!((trace(&mk, None).unwrap() - trace(&f, None).unwrap()).norm() < 1e-10);
                // direct sum over the ball
                let x = 3 % g.cells();
                let b = ball(&g, x, k).unwrap();
                let mut acc = CMatrix::zeros(g.m);
                for y in b.iter() {
                    acc.add_assign(f.cell(y));
                }
                assert!(mk.cell(x).sub(&acc.scale(1.0 / b.len() as f64)).max_abs() < 1e-13);
            }
        }
    }

    #[test]
    fn truncated_avg_examples() {
        let g = grid(1, 4, 2);
        let f = random_field(g, 6);
        for k in 0..4 {
            for n in k + 1..=4 {
                let t = truncated_avg(&f, k, n).unwrap();
                let bsize = ball(&g, 0, k).unwrap().len() as f64;
                for x in 0..g.cells() {
                    let a = annulus(&g, x, k, n).unwrap();
                    let mut acc = CMatrix::zeros(2);
                    for y in a.iter() {
                        acc.add_assign(f.cell(y));
                    }
                    assert!(t.cell(x).sub(&acc.scale(1.0 / bsize)).max_abs() < 1e-13);
                }
            }
        }
        // support off every annulus
        let k = 2;
        let n = 4;
        let mut hit = vec![false; g.cells()];
        for x in 0..g.cells() {
            for y in annulus(&g, x, k, n).unwrap().iter() {
                hit[y] = true;
            }
        }
        let off = MatrixField::from_fn(g, |c| if hit[c] { CMatrix::zeros(2) } else { CMatrix::identity(2) });
        assert_eq!(truncated_avg(&off, k, n).unwrap().max_frobenius(), 0.0);
        assert!(matches!(truncated_avg(&f, 2, 2), Err(Error::ScaleOrder { .. })));
    }

    #[test]
    fn truncation_identity_on_cube_mean_zero() {
        // h with zero average on every generation-n cube: M_k h = M_{k,n} h
        let g = grid(1, 5, 2);
        let f = random_field(g, 7);
        for n in 1..=4 {
            let h = f.sub(&cond_exp(&f, n).unwrap());
            for k in 0..n {
                let lhs = ball_avg(&h, k).unwrap();
                let rhs = truncated_avg(&h, k, n).unwrap();
                assert!(close(&lhs, &rhs, 1e-12), "k={k} n={n}");
            }
        }
    }

    #[test]
    fn t_op_examples() {
        let g = grid(1, 4, 3);
        let c = MatrixField::identity(g);
        let f = random_field(g, 8);
        for k in 0..=4 {
            assert!(t_op(&c, k).unwrap().max_frobenius() < 1e-14);
            assert!(trace(&t_op(&f, k).unwrap(), None).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn linearize_examples() {
        let g = grid(1, 3, 2);
        let c = MatrixField::identity(g);
        let plus = SignSample::from_rows(3, vec![vec![1; 4]]).unwrap();
        assert!(linearize(&c, &plus).unwrap().max_frobenius() < 1e-14);
        let f = random_field(g, 9);
        let row = vec![1i8, -1, -1, 1];
        let s = SignSample::from_rows(3, vec![row.clone()]).unwrap();
        let tf = linearize(&f, &s).unwrap();
        let mut manual = MatrixField::zeros(g);
        for (k, &e) in row.iter().enumerate() {
            manual = manual.add(&t_op(&f, k).unwrap().scale(e as f64));
        }
        assert!(close(&tf, &manual, 1e-14));
        assert!(SignSample::from_rows(3, vec![vec![1; 3]]).is_err());
        assert!(linearize(&f, &SignSample::exhaustive(2).unwrap()).is_err());
    }

    #[test]
    fn exhaustive_rademacher_orthogonality() {
        for g in [grid(1, 3, 2), grid(2, 2, 2)] {
            let f = random_field(g, 10);
            let w = Weight::new(g, (0..g.cells()).map(|c| 1.0 + c as f64 * 0.1).collect()).unwrap();
            let signs = SignSample::exhaustive(g.depth).unwrap();
            let tf = linearize(&f, &signs).unwrap();
            let lhs = lp_norm(&tf, 2.0, Some(&w)).unwrap().powi(2);
            let rhs: f64 = t_sequence(&f)
                .unwrap()
                .iter()
                .map(|t| lp_norm(t, 2.0, Some(&w)).unwrap().powi(2))
                .sum();
            assert!((lhs - rhs).abs() <= 1e-10 * rhs);
        }
    }

    #[test]
    fn sign_sample_shapes() {
        let s = SignSample::random(4, 64, 1).unwrap();
        assert_eq!(s.len(), 64);
        assert!(s.rows().iter().all(|r| r.len() == 5 && r.iter().all(|e| e.abs() == 1)));
        assert_eq!(s, SignSample::random(4, 64, 1).unwrap());
        assert_eq!(SignSample::exhaustive(3).unwrap().len(), 16);
        assert!(SignSample::exhaustive(5).is_err());
        let ext = s.extend(5, 2).unwrap();
        assert_eq!(ext.depth(), 5);
        assert!(ext.rows().iter().zip(s.rows()).all(|(a, b)| a[..5] == b[..]));
    }

    #[test]
    fn scalar_t_matches_direct_formula() {
        let g = grid(1, 4, 1);
        let mut r = rng::stream(11, 0);
        let vals: Vec<f64> = (0..16).map(|_| r.random_range(-1.0..1.0)).collect();
        let f = MatrixField::from_fn(g, |c| CMatrix::real(1, &[vals[c]]));
        for k in 0..=4 {
            let t = t_op(&f, k).unwrap();
            let radius = 1i64 << (4 - k);
            let side = 1usize << (4 - k);
            for x in 0..16i64 {
                let ball: Vec<f64> = (-16..16)
                    .filter(|dx: &i64| dx.abs() <= radius)
                    .map(|dx| (x + dx).rem_euclid(16))
                    .collect::<std::collections::BTreeSet<_>>()
                    .into_iter()
                    .map(|y| vals[y as usize])
                    .collect();
                let m = ball.iter().sum::<f64>() / ball.len() as f64;
                let start = (x as usize / side) * side;
                let e = vals[start..start + side].iter().sum::<f64>() / side as f64;
                assert!((t.cell(x as usize).get(0, 0) - Complex64::new(m - e, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn cubes_average_example() {
        let g = grid(2, 2, 1);
        let f = MatrixField::from_fn(g, |c| CMatrix::real(1, &[c as f64]));
        let e1 = cond_exp(&f, 1).unwrap();
        for q in cubes(&g, 1).unwrap() {
            let cells: Vec<usize> = q.cells(&g).iter().collect();
            let avg = cells.iter().sum::<usize>() as f64 / 4.0;
            for c in cells {
                assert!((e1.cell(c).get(0, 0).re - avg).abs() < 1e-14);
            }
        }
    }

    proptest! {
        #[test]
        fn linearize_is_linear(seed in 0u64..200, a in -3.0f64..3.0) {
            let g = grid(1, 3, 2);
            let f = random_field(g, seed);
            let h = random_field(g, seed + 1000);
            let s = SignSample::random(3, 4, seed).unwrap();
            let lhs = linearize(&f.scale(a).add(&h), &s).unwrap();
            let rhs = linearize(&f, &s).unwrap().scale(a).add(&linearize(&h, &s).unwrap());
            prop_assert!(close(&lhs, &rhs, 1e-12));
        }

        #[test]
        fn t_op_annihilates_constants(seed in 0u64..200, k in 0usize..=3) {
            let g = grid(1, 3, 2);
            let mut r = rng::stream(seed, 1);
            let c = MatrixField::constant(g, &rng::ginibre(&mut r, 2));
            prop_assert!(t_op(&c, k).unwrap().max_frobenius() < 1e-13);
        }
    }
}
