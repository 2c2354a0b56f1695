//! Row, column and row-column norms of finite sequences of matrix fields,
//! and their weak-L¹ analogues.
//!
//! For `p < 2` the row-column norm is an infimum over splittings
//! `F_k = G_k + H_k`; it is reported as a bracket whose upper end is the best
//! splitting found and whose lower end is the best dual certificate.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::{cell_measure, weak_l1_from_masses, MatrixField};
use crate::matrix::{self, CMatrix, HermitianMatrix};
use crate::rng;
use crate::weights::Weight;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldSequence {
    items: Vec<MatrixField>,
}

impl FieldSequence {
    pub fn new(items: Vec<MatrixField>) -> Result<Self> {
        let first = items
            .first()
            .ok_or_else(|| Error::ShapeMismatch("empty field sequence".into()))?;
        if items
            .iter()
            .any(|f| f.grid() != first.grid() || f.samples() != first.samples())
        {
            return Err(Error::ShapeMismatch("sequence terms on different grids".into()));
        }
        Ok(Self { items })
    }

    pub fn items(&self) -> &[MatrixField] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            items: self.items.iter().map(MatrixField::adjoint).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            items: self.items.iter().map(|f| f.scale(c)).collect(),
        }
    }

    pub fn with_zero(&self) -> Self {
        let mut items = self.items.clone();
        items.push(self.items[0].scale(0.0));
        Self { items }
    }

    fn entries(&self) -> usize {
        self.items[0].matrices().len()
    }

    fn column_at(&self, i: usize) -> Vec<&CMatrix> {
        self.items.iter().map(|f| &f.matrices()[i]).collect()
    }

    /// Measure of entry `i` (sample-major), including the `1/R` factor.
    fn measure(&self, w: Option<&Weight>) -> Result<Vec<f64>> {
        let f = &self.items[0];
        let mu = cell_measure(f.grid(), w)?;
        let r = f.samples() as f64;
        Ok((0..self.entries()).map(|i| mu[i % f.cells()] / r).collect())
    }
}

/// Singular values of `(Σ_k |F_k|²)^{1/2}` per entry.
fn column_singular(seq: &FieldSequence) -> Vec<Vec<f64>> {
    (0..seq.entries())
        .map(|i| matrix::stacked_singular_values(&seq.column_at(i)))
        .collect()
}

fn norm_from_singular(s: &[Vec<f64>], mu: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return s.iter().flatten().copied().fold(0.0, f64::max);
    }
    let total: f64 = s
        .iter()
        .zip(mu)
        .map(|(sv, m)| m * sv.iter().map(|x| x.powf(p)).sum::<f64>())
        .sum();
    total.powf(1.0 / p)
}

/// `‖(Σ_k F_k* F_k)^{1/2}‖_{p,w}`.
pub fn column_norm(seq: &FieldSequence, p: f64, w: Option<&Weight>) -> Result<f64> {
    matrix::check_exponent(p)?;
    Ok(norm_from_singular(&column_singular(seq), &seq.measure(w)?, p))
}

/// `‖(Σ_k F_k F_k*)^{1/2}‖_{p,w}`.
pub fn row_norm(seq: &FieldSequence, p: f64, w: Option<&Weight>) -> Result<f64> {
    column_norm(&seq.adjoint(), p, w)
}

fn column_weak(seq: &FieldSequence, w: Option<&Weight>) -> Result<f64> {
    let mu = seq.measure(w)?;
    let masses = column_singular(seq)
        .into_iter()
        .zip(&mu)
        .flat_map(|(sv, &m)| sv.into_iter().map(move |s| (s, m)))
        .collect();
    Ok(weak_l1_from_masses(masses))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerOptions {
    pub iterations: usize,
    /// Step `c/√t` with `c = step_scale · max_i ‖F_i‖_F`.
    pub step_scale: f64,
    /// Smoothing `μ` in `(S + μ²)^{(p−2)/2}`.
    pub smoothing: f64,
    pub random_certificates: usize,
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            iterations: 500,
            step_scale: 0.25,
            smoothing: 1e-6,
            random_certificates: 4,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RcBracket {
    pub lower: f64,
    pub upper: f64,
    /// `p ≥ 2`: the value is `max(row, column)` and the bracket is degenerate.
    pub exact: bool,
    /// Optimizer steps that decreased the objective.
    pub accepted_steps: usize,
    pub iterations: usize,
    /// Column part `G` of the best splitting (`H = F − G`).
    pub split: Option<FieldSequence>,
}

impl RcBracket {
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }
}

/// Sequence stored as `[k][entry]` for the optimizer loop.
type Raw = Vec<Vec<CMatrix>>;

fn to_raw(seq: &FieldSequence) -> Raw {
    seq.items.iter().map(|f| f.matrices().to_vec()).collect()
}

fn from_raw(template: &FieldSequence, raw: Raw) -> FieldSequence {
    let f = &template.items[0];
    FieldSequence {
        items: raw
            .into_iter()
            .map(|data| MatrixField::with_samples(*f.grid(), f.samples(), data).expect("shape preserved"))
            .collect(),
    }
}

fn gram(raw: &Raw, i: usize, rows: bool) -> HermitianMatrix {
    let m = raw[0][i].dim();
    let mut s = CMatrix::zeros(m);
    for term in raw {
        let a = &term[i];
        s.add_assign(&if rows { a.mul(&a.adjoint()) } else { a.adjoint().mul(a) });
    }
    HermitianMatrix::symmetrize(s)
}

/// `‖·‖_{p,c}` (or row) through the `m × m` Gram matrices, with the
/// per-entry eigendecompositions kept for the gradient.
struct Side {
    value: f64,
    eigs: Vec<matrix::Eigen>,
}

fn side(raw: &Raw, mu: &[f64], p: f64, rows: bool) -> Side {
    let eigs: Vec<matrix::Eigen> = (0..mu.len())
        .map(|i| matrix::eig(&gram(raw, i, rows)).expect("finite"))
        .collect();
    let total: f64 = mu
        .iter()
        .zip(&eigs)
        .map(|(m, e)| m * e.values.iter().map(|l| l.max(0.0).powf(p / 2.0)).sum::<f64>())
        .sum();
    Side {
        value: total.powf(1.0 / p),
        eigs,
    }
}

fn sub_raw(a: &Raw, b: &Raw) -> Raw {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u.sub(v)).collect())
        .collect()
}

/// Gradient of `‖G‖_{p,c}` (`rows = false`) or `‖G‖_{p,r}` in the real
/// Frobenius pairing, with the smoothed power `(S + μ²)^{(p−2)/2}`.
fn norm_gradient(raw: &Raw, at: &Side, mu: &[f64], p: f64, rows: bool, smoothing: f64) -> Raw {
    let mut out: Raw = raw.iter().map(|t| t.iter().map(|a| CMatrix::zeros(a.dim())).collect()).collect();
    if at.value == 0.0 {
        return out;
    }
    let lead = at.value.powf(1.0 - p);
    for (i, (m, e)) in mu.iter().zip(&at.eigs).enumerate() {
        let power = e.apply(|l| (l.max(0.0) + smoothing * smoothing).powf((p - 2.0) / 2.0));
        for (k, term) in raw.iter().enumerate() {
            let g = if rows { power.mul(&term[i]) } else { term[i].mul(&power) };
            out[k][i] = g.scale(lead * m);
        }
    }
    out
}

fn raw_frobenius(raw: &Raw) -> f64 {
    raw.iter()
        .flatten()
        .map(|a| a.frobenius().powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Subgradient descent on `G ↦ ‖G‖_{p,c} + ‖F − G‖_{p,r}` from `start`,
/// keeping only steps that decrease the objective.
fn optimize_split(f: &Raw, start: Raw, mu: &[f64], p: f64, opts: &OptimizerOptions) -> (Raw, usize) {
    let scale = f.iter().flatten().map(CMatrix::frobenius).fold(0.0, f64::max);
    let c = opts.step_scale * scale;
    let mut g = start;
    let mut h = sub_raw(f, &g);
    let mut col = side(&g, mu, p, false);
    let mut row = side(&h, mu, p, true);
    let mut accepted = 0;
    if c == 0.0 {
        return (g, 0);
    }
    for t in 1..=opts.iterations {
        let gc = norm_gradient(&g, &col, mu, p, false, opts.smoothing);
        let gr = norm_gradient(&h, &row, mu, p, true, opts.smoothing);
        let dir = sub_raw(&gc, &gr);
        let n = raw_frobenius(&dir);
        if n == 0.0 {
            break;
        }
        let step = c / (t as f64).sqrt() / n;
        let cand: Raw = g
            .iter()
            .zip(&dir)
            .map(|(x, d)| x.iter().zip(d).map(|(a, b)| a.sub(&b.scale(step))).collect())
            .collect();
        let cand_h = sub_raw(f, &cand);
        let cand_col = side(&cand, mu, p, false);
        let cand_row = side(&cand_h, mu, p, true);
        if cand_col.value + cand_row.value < col.value + row.value {
            g = cand;
            h = cand_h;
            col = cand_col;
            row = cand_row;
            accepted += 1;
        }
    }
    (g, accepted)
}

fn split_value(f: &FieldSequence, g: &FieldSequence, p: f64, w: Option<&Weight>) -> Result<f64> {
    let h = FieldSequence {
        items: f.items.iter().zip(&g.items).map(|(a, b)| a.sub(b)).collect(),
    };
    Ok(column_norm(g, p, w)? + row_norm(&h, p, w)?)
}

/// `Re Σ_k φ_w(Y_k* F_k) / max(‖Y‖_{p',c}, ‖Y‖_{p',r})`.
fn certificate_value(f: &FieldSequence, y: &FieldSequence, p: f64, w: Option<&Weight>) -> Result<f64> {
    let q = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
    let denom = column_norm(y, q, w)?.max(row_norm(y, q, w)?);
    if !(denom > 0.0) || !denom.is_finite() {
        return Ok(0.0);
    }
    let mu = f.measure(w)?;
    let mut pairing = 0.0;
    for (fk, yk) in f.items.iter().zip(&y.items) {
        for (i, m) in mu.iter().enumerate() {
            pairing += m * yk.matrices()[i].adjoint().mul(&fk.matrices()[i]).trace().re;
        }
    }
    Ok(pairing / denom)
}

/// `Y_k = G_k S^{(p−2)/2}` (column) or `R^{(p−2)/2} G_k` (row), with
/// eigenvalues below `1e-13 · max` treated as zero.
fn dual_of(seq: &FieldSequence, p: f64, rows: bool) -> FieldSequence {
    let raw = to_raw(seq);
    let mut out: Raw = raw.clone();
    for i in 0..seq.entries() {
        let e = matrix::eig(&gram(&raw, i, rows)).expect("finite");
        let cut = 1e-13 * e.max().max(0.0);
        let power = e.apply(|l| if l > cut && l > 0.0 { l.powf((p - 2.0) / 2.0) } else { 0.0 });
        for (k, term) in raw.iter().enumerate() {
            out[k][i] = if rows { power.mul(&term[i]) } else { term[i].mul(&power) };
        }
    }
    from_raw(seq, out)
}

fn normalized(y: FieldSequence, p: f64, w: Option<&Weight>) -> Result<FieldSequence> {
    let q = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
    let d = column_norm(&y, q, w)?.max(row_norm(&y, q, w)?);
    Ok(if d > 0.0 { y.scale(1.0 / d) } else { y })
}

pub fn rc_norm(seq: &FieldSequence, p: f64, w: Option<&Weight>) -> Result<RcBracket> {
    rc_norm_with(seq, p, w, &OptimizerOptions::default())
}

/// Relative crossing of the two bounds attributed to rounding.
const ROUNDING: f64 = 1e-12;

pub fn rc_norm_with(seq: &FieldSequence, p: f64, w: Option<&Weight>, opts: &OptimizerOptions) -> Result<RcBracket> {
    matrix::check_exponent(p)?;
    let col = column_norm(seq, p, w)?;
    let row = row_norm(seq, p, w)?;
    if p >= 2.0 {
        let v = col.max(row);
        return Ok(RcBracket {
            lower: v,
            upper: v,
            exact: true,
            accepted_steps: 0,
            iterations: 0,
            split: None,
        });
    }
    let zero = seq.scale(0.0);
    let herm = FieldSequence {
        items: seq.items.iter().map(|f| f.add(&f.adjoint()).scale(0.5)).collect(),
    };
    let anti = FieldSequence {
        items: seq.items.iter().map(|f| f.sub(&f.adjoint()).scale(0.5)).collect(),
    };
    let mut candidates = vec![(col, seq.clone()), (row, zero)];
    for g in [herm, anti] {
        candidates.push((split_value(seq, &g, p, w)?, g));
    }
    let start = candidates
        .iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("nonempty")
        .1
        .clone();
    let mu = seq.measure(w)?;
    // A single term is its own best splitting.
    let (opt, accepted) = if seq.len() == 1 {
        (to_raw(&start), 0)
    } else {
        optimize_split(&to_raw(seq), to_raw(&start), &mu, p, opts)
    };
    let opt = from_raw(seq, opt);
    candidates.push((split_value(seq, &opt, p, w)?, opt.clone()));
    let (upper, best) = candidates
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .expect("nonempty");

    let h = FieldSequence {
        items: seq.items.iter().zip(&best.items).map(|(a, b)| a.sub(b)).collect(),
    };
    let yg = normalized(dual_of(&best, p, false), p, w)?;
    let yh = normalized(dual_of(&h, p, true), p, w)?;
    let avg = FieldSequence {
        items: yg.items.iter().zip(&yh.items).map(|(a, b)| a.add(b).scale(0.5)).collect(),
    };
    let mut certs = vec![dual_of(seq, p, false), dual_of(seq, p, true), yg, yh, avg];
    let mut r = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.random_certificates {
        certs.push(FieldSequence {
            items: seq
                .items
                .iter()
                .map(|f| {
                    let data = f.matrices().iter().map(|a| rng::ginibre(&mut r, a.dim())).collect();
                    MatrixField::with_samples(*f.grid(), f.samples(), data).expect("shape preserved")
                })
                .collect(),
        });
    }
    let mut lower = 0.0f64;
    for y in &certs {
        lower = lower.max(certificate_value(seq, y, p, w)?);
    }
    // Both bounds evaluate the same norm when the bracket closes; a crossing
    // at rounding level is reconciled, anything larger is left visible.
    if lower > upper && lower - upper <= ROUNDING * upper {
        lower = upper;
    }
    Ok(RcBracket {
        lower,
        upper,
        exact: false,
        accepted_steps: accepted,
        iterations: opts.iterations,
        split: Some(best),
    })
}

/// Certified bracket `(lower, upper)` for the weak row-column quasi-norm
/// with the sum convention over splittings.
pub fn weak_rc_quasinorm(seq: &FieldSequence, w: Option<&Weight>) -> Result<(f64, f64)> {
    weak_rc_with(seq, w, &OptimizerOptions::default())
}

pub fn weak_rc_with(seq: &FieldSequence, w: Option<&Weight>, opts: &OptimizerOptions) -> Result<(f64, f64)> {
    weak_rc_from(seq, w, &rc_norm_with(seq, 1.0, w, opts)?)
}

/// Weak rc bracket reusing the best `p = 1` splitting of `rc1`.
pub fn weak_rc_from(seq: &FieldSequence, w: Option<&Weight>, rc1: &RcBracket) -> Result<(f64, f64)> {
    let mut lower = 0.0f64;
    for f in &seq.items {
        lower = lower.max(crate::field::weak_l1_quasinorm(f, w)? / 2.0);
    }
    let herm = FieldSequence {
        items: seq.items.iter().map(|f| f.add(&f.adjoint()).scale(0.5)).collect(),
    };
    let anti = FieldSequence {
        items: seq.items.iter().map(|f| f.sub(&f.adjoint()).scale(0.5)).collect(),
    };
    let mut splits = vec![seq.clone(), seq.scale(0.0), herm, anti];
    splits.extend(rc1.split.clone());
    let mut upper = f64::INFINITY;
    for g in &splits {
        let h = FieldSequence {
            items: seq.items.iter().zip(&g.items).map(|(a, b)| a.sub(b)).collect(),
        };
        upper = upper.min(column_weak(g, w)? + column_weak(&h.adjoint(), w)?);
    }
    Ok((lower, upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{lp_norm, weak_l1_quasinorm};
    use crate::geometry::GridSpec;
    use crate::operators::{linearize_sequence, SignSample};
    use proptest::{prop_assert, proptest};
    use rand::Rng;

    fn grid(j: usize, m: usize) -> GridSpec {
        GridSpec::new(1, j, m).unwrap()
    }

    fn random_seq(g: GridSpec, len: usize, seed: u64) -> FieldSequence {
        let mut r = rng::stream(seed, 40);
        FieldSequence::new(
            (0..len)
                .map(|_| MatrixField::from_fn(g, |_| rng::ginibre(&mut r, g.m)))
                .collect(),
        )
        .unwrap()
    }

    fn random_weight(g: GridSpec, seed: u64) -> Weight {
        let mut r = rng::stream(seed, 41);
        Weight::new(g, (0..g.cells()).map(|_| r.random_range(0.3..3.0)).collect()).unwrap()
    }

    #[test]
    fn single_element_matches_lp() {
        let g = grid(3, 3);
        let s = random_seq(g, 1, 1);
        let w = random_weight(g, 1);
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let lp = lp_norm(&s.items()[0], p, Some(&w)).unwrap();
            assert!((column_norm(&s, p, Some(&w)).unwrap() - lp).abs() < 1e-10 * lp);
            assert!((row_norm(&s, p, Some(&w)).unwrap() - lp).abs() < 1e-10 * lp);
        }
    }

    #[test]
    fn scalar_disjoint_supports() {
        let g = grid(3, 1);
        let a = MatrixField::from_fn(g, |c| CMatrix::real(1, &[if c < 4 { 2.0 } else { 0.0 }]));
        let b = MatrixField::from_fn(g, |c| CMatrix::real(1, &[if c >= 4 { -3.0 } else { 0.0 }]));
        let s = FieldSequence::new(vec![a, b]).unwrap();
        // pointwise sqrt(Σ|f_k|²) is 2 on half the torus and 3 on the other
        for p in [1.0, 2.0, 3.0] {
            let expect = (0.5 * 2f64.powf(p) + 0.5 * 3f64.powf(p)).powf(1.0 / p);
            assert!((column_norm(&s, p, None).unwrap() - expect).abs() < 1e-12);
        }
        assert!((column_norm(&s.scale(-2.0), 1.0, None).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn row_is_column_of_adjoint_and_hermitian_agree() {
        let g = grid(3, 3);
        let s = random_seq(g, 4, 2);
        let w = random_weight(g, 2);
        for p in [1.0, 1.5, 4.0] {
            assert_eq!(row_norm(&s, p, Some(&w)).unwrap(), column_norm(&s.adjoint(), p, Some(&w)).unwrap());
        }
        let herm = FieldSequence::new(s.items().iter().map(|f| f.add(&f.adjoint())).collect()).unwrap();
        let (a, b) = (column_norm(&herm, 1.0, None).unwrap(), row_norm(&herm, 1.0, None).unwrap());
        assert!((a - b).abs() < 1e-10 * a);
        let (a, b) = (column_norm(&s, 1.0, None).unwrap(), row_norm(&s, 1.0, None).unwrap());
        assert!(a.is_finite() && b.is_finite() && (a - b).abs() > 1e-6);
    }

    #[test]
    fn rc_at_two_is_degenerate() {
        let g = grid(3, 3);
        let s = random_seq(g, 4, 3);
        let w = random_weight(g, 3);
        let b = rc_norm(&s, 2.0, Some(&w)).unwrap();
        assert!(b.exact && b.gap() == 0.0);
        let direct: f64 = s.items().iter().map(|f| lp_norm(f, 2.0, Some(&w)).unwrap().powi(2)).sum::<f64>().sqrt();
        assert!((b.upper - direct).abs() < 1e-10 * direct);
        let b3 = rc_norm(&s, 3.0, None).unwrap();
        let expect = column_norm(&s, 3.0, None).unwrap().max(row_norm(&s, 3.0, None).unwrap());
        assert_eq!(b3.upper, expect);
    }

    #[test]
    fn single_element_bracket_is_tight() {
        let g = grid(3, 3);
        let s = random_seq(g, 1, 4);
        let w = random_weight(g, 4);
        for p in [1.0, 1.25, 1.5, 1.75, 2.0, 3.0] {
            let b = rc_norm(&s, p, Some(&w)).unwrap();
            let lp = lp_norm(&s.items()[0], p, Some(&w)).unwrap();
            assert!(b.gap() <= 1e-8 * lp.max(1.0), "p={p} {b:?}");
            assert!((b.upper - lp).abs() <= 1e-8 * lp);
        }
    }

    #[test]
    fn scalar_p1_bracket_closes() {
        let g = grid(3, 1);
        let s = random_seq(g, 4, 5);
        let b = rc_norm(&s, 1.0, None).unwrap();
        let col = column_norm(&s, 1.0, None).unwrap();
        assert!((b.upper - col).abs() < 1e-10 * col);
        assert!(b.gap() <= 1e-8 * col);
    }

    #[test]
    fn brackets_are_ordered_and_optimizer_helps() {
        let g = grid(3, 3);
        for seed in 0..5 {
            let s = random_seq(g, 4, 10 + seed);
            let w = random_weight(g, seed);
            for p in [1.0, 1.5] {
                let b = rc_norm(&s, p, Some(&w)).unwrap();
                assert!(b.lower <= b.upper + 1e-6, "{b:?}");
                let col = column_norm(&s, p, Some(&w)).unwrap();
                let row = row_norm(&s, p, Some(&w)).unwrap();
                assert!(b.upper <= col.min(row) + 1e-12);
            }
        }
    }

    #[test]
    fn zero_element_does_not_change_upper() {
        let g = grid(2, 2);
        let s = random_seq(g, 3, 6);
        let a = rc_norm(&s, 1.0, None).unwrap().upper;
        let b = rc_norm(&s.with_zero(), 1.0, None).unwrap().upper;
        assert!((a - b).abs() <= 1e-9 * a);
    }

    #[test]
    fn weak_rc_examples() {
        let g = grid(3, 3);
        let z = random_seq(g, 3, 7).scale(0.0);
        assert_eq!(weak_rc_quasinorm(&z, None).unwrap(), (0.0, 0.0));
        let one = random_seq(g, 1, 8);
        let herm = FieldSequence::new(vec![one.items()[0].add(&one.items()[0].adjoint())]).unwrap();
        let (lo, up) = weak_rc_quasinorm(&herm, None).unwrap();
        let weak = weak_l1_quasinorm(&herm.items()[0], None).unwrap();
        assert!((up - weak).abs() <= 1e-10 * weak);
        assert!(lo >= up / 2.0 * (1.0 - 1e-12));
        for seed in 0..5 {
            let s = random_seq(g, 4, 20 + seed);
            let w = random_weight(g, seed);
            let (lo, up) = weak_rc_quasinorm(&s, Some(&w)).unwrap();
            assert!(lo <= up);
            assert!(up <= rc_norm(&s, 1.0, Some(&w)).unwrap().upper * (1.0 + 1e-12));
        }
    }

    #[test]
    fn khintchine_at_two() {
        let g = grid(3, 2);
        let s = random_seq(g, 4, 9);
        let w = random_weight(g, 9);
        let signs = SignSample::exhaustive(3).unwrap();
        let tf = linearize_sequence(s.items(), &signs).unwrap();
        let rand2 = lp_norm(&tf, 2.0, Some(&w)).unwrap();
        let col = column_norm(&s, 2.0, Some(&w)).unwrap();
        let row = row_norm(&s, 2.0, Some(&w)).unwrap();
        assert!((rand2 - col).abs() <= 1e-10 * col);
        assert!((rand2 - row).abs() <= 1e-10 * col);
    }

    #[test]
    fn exponent_checked() {
        let s = random_seq(grid(2, 2), 2, 1);
        assert!(column_norm(&s, 0.5, None).is_err());
        assert!(rc_norm(&s, f64::NAN, None).is_err());
        assert!(FieldSequence::new(vec![]).is_err());
    }

    proptest! {
        #[test]
        fn column_norm_is_homogeneous(seed in 0u64..100, c in -5.0f64..5.0) {
            let s = random_seq(grid(2, 2), 3, seed);
            let a = column_norm(&s.scale(c), 1.0, None).unwrap();
            let b = c.abs() * column_norm(&s, 1.0, None).unwrap();
            prop_assert!((a - b).abs() <= 1e-10 * b.max(1e-300));
        }
    }
}
