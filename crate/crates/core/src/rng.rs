//! Seeded random generation of matrices and sub-streams.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{CMatrix, HermitianMatrix};

/// Independent stream `stream` derived from `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Complex Ginibre matrix with unit-variance entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, m: usize) -> CMatrix {
    CMatrix::from_fn(m, |_, _| complex_normal(rng))
}

pub fn hermitian<R: Rng + ?Sized>(rng: &mut R, m: usize) -> CMatrix {
    let g = ginibre(rng, m);
    g.add(&g.adjoint()).scale(0.5)
}

/// Haar-ish unitary from Gram–Schmidt on a Ginibre matrix.
pub fn unitary<R: Rng + ?Sized>(rng: &mut R, m: usize) -> CMatrix {
    loop {
        let g = ginibre(rng, m);
        let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(m);
        let mut ok = true;
        for j in 0..m {
            let mut v: Vec<Complex64> = (0..m).map(|i| g.get(i, j)).collect();
            for _ in 0..2 {
                for u in &cols {
                    let c: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                    for (vi, ui) in v.iter_mut().zip(u) {
                        *vi -= c * ui;
                    }
                }
            }
            let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n < 1e-8 {
                ok = false;
                break;
            }
            v.iter_mut().for_each(|z| *z /= n);
            cols.push(v);
        }
        if ok {
            return CMatrix::from_fn(m, |i, j| cols[j][i]);
        }
    }
}

/// `U diag(eigs) U*` with a random unitary `U`.
pub fn psd_with_spectrum<R: Rng + ?Sized>(rng: &mut R, eigs: &[f64]) -> CMatrix {
    let u = unitary(rng, eigs.len());
    let d = CMatrix::diag(eigs);
    HermitianMatrix::symmetrize(u.mul(&d).mul(&u.adjoint())).into_matrix()
}

/// Random orthogonal projection of the given rank.
pub fn projection<R: Rng + ?Sized>(rng: &mut R, m: usize, rank: usize) -> CMatrix {
    let eigs: Vec<f64> = (0..m).map(|i| if i < rank { 1.0 } else { 0.0 }).collect();
    psd_with_spectrum(rng, &eigs)
}
