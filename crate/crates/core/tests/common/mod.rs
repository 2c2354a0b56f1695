//! Independent reference implementations used by the integration tests:
//! a scalar (`m = 1`) pipeline on plain `f64` vectors and brute-force
//! torus geometry from coordinates.

#![allow(dead_code)]

use std::collections::BTreeSet;

use ncsq_core::geometry::GridSpec;

pub fn side(g: &GridSpec) -> usize {
    1 << g.depth
}

/// Squared periodic distance between cell centers, in cell units.
pub fn dist_sq(g: &GridSpec, a: usize, b: usize) -> usize {
    let n = side(g);
    g.coords(a)
        .iter()
        .zip(g.coords(b))
        .map(|(&x, y)| {
            let d = x.abs_diff(y);
            let d = d.min(n - d);
            d * d
        })
        .sum()
}

pub fn ball(g: &GridSpec, x: usize, k: usize) -> BTreeSet<usize> {
    let r = 1usize << (g.depth - k);
    (0..g.cells()).filter(|&y| dist_sq(g, x, y) <= r * r).collect()
}

pub fn cube_key(g: &GridSpec, x: usize, n: usize) -> Vec<usize> {
    g.coords(x).iter().map(|c| c >> (g.depth - n)).collect()
}

/// Generation-`n` cubes as cell sets.
pub fn cubes(g: &GridSpec, n: usize) -> Vec<BTreeSet<usize>> {
    let mut by_key: std::collections::BTreeMap<Vec<usize>, BTreeSet<usize>> = Default::default();
    for x in 0..g.cells() {
        by_key.entry(cube_key(g, x, n)).or_default().insert(x);
    }
    by_key.into_values().collect()
}

fn face_neighbors(g: &GridSpec, x: usize) -> Vec<usize> {
    let n = side(g);
    let c = g.coords(x);
    let mut out = Vec::new();
    for i in 0..g.d {
        for step in [1, n - 1] {
            let mut y = c.clone();
            y[i] = (y[i] + step) % n;
            out.push(g.index(&y));
        }
    }
    out
}

/// Union of translates `B_n + y` meeting both `e` and its complement.
pub fn ball_boundary(g: &GridSpec, e: &BTreeSet<usize>, n: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for y in 0..g.cells() {
        let b = ball(g, y, n);
        if b.iter().any(|c| e.contains(c)) && b.iter().any(|c| !e.contains(c)) {
            out.extend(b);
        }
    }
    out
}

pub fn cube_boundary(g: &GridSpec, e: &BTreeSet<usize>, n: usize) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for q in cubes(g, n) {
        if q.iter().any(|c| e.contains(c)) && !q.is_subset(e) {
            out.extend(q);
        }
    }
    out
}

/// `I(B_k + x, n)`: cells of the ball lying in generation-`n` cubes that
/// touch the ball's discrete boundary.
pub fn annulus(g: &GridSpec, x: usize, k: usize, n: usize) -> BTreeSet<usize> {
    let b = ball(g, x, k);
    let edge: BTreeSet<usize> = b
        .iter()
        .copied()
        .filter(|&c| face_neighbors(g, c).iter().any(|y| !b.contains(y)))
        .collect();
    let mut out = BTreeSet::new();
    for q in cubes(g, n) {
        if q.iter().any(|c| edge.contains(c)) {
            out.extend(q.intersection(&b).copied());
        }
    }
    out
}

pub fn j_set(g: &GridSpec, y: usize, k: usize, n: usize) -> BTreeSet<usize> {
    (0..g.cells()).filter(|&x| annulus(g, x, k, n).contains(&y)).collect()
}

/// Whether `x` lies in the five-fold dilation of the generation-`n` cube
/// containing `corner_cell`, capped at the torus.
pub fn in_dilation(g: &GridSpec, corner_cell: usize, n: usize, x: usize) -> bool {
    let s = 1usize << (g.depth - n);
    let size = side(g);
    if 5 * s >= size {
        return true;
    }
    let corner: Vec<usize> = cube_key(g, corner_cell, n).iter().map(|c| c * s).collect();
    g.coords(x)
        .iter()
        .zip(corner)
        .all(|(&c, q)| (c + size + 2 * s - q) % size < 5 * s)
}

/// Scalar field on the grid.
#[derive(Debug, Clone)]
pub struct Scalar {
    pub grid: GridSpec,
    pub v: Vec<f64>,
}

impl Scalar {
    pub fn cond_exp(&self, n: usize) -> Vec<f64> {
        let g = &self.grid;
        let mut sums: std::collections::BTreeMap<Vec<usize>, (f64, usize)> = Default::default();
        for (x, &val) in self.v.iter().enumerate() {
            let e = sums.entry(cube_key(g, x, n)).or_insert((0.0, 0));
            e.0 += val;
            e.1 += 1;
        }
        (0..g.cells())
            .map(|x| {
                let (s, c) = sums[&cube_key(g, x, n)];
                s / c as f64
            })
            .collect()
    }

    pub fn ball_avg(&self, k: usize) -> Vec<f64> {
        (0..self.grid.cells())
            .map(|x| {
                let b = ball(&self.grid, x, k);
                b.iter().map(|&y| self.v[y]).sum::<f64>() / b.len() as f64
            })
            .collect()
    }
}

/// Scalar stopping time and Calderón–Zygmund parts.
#[derive(Debug, Clone)]
pub struct ScalarCz {
    /// `q[n][x] ∈ {0, 1}` for `n = 0..J`.
    pub q: Vec<Vec<f64>>,
    pub p: Vec<Vec<f64>>,
    pub g: Vec<f64>,
    pub b_d: Vec<f64>,
    pub zeta: Vec<f64>,
}

pub fn scalar_cz(f: &Scalar, lambda: f64) -> ScalarCz {
    let grid = f.grid;
    let cells = grid.cells();
    let mut q = vec![vec![1.0; cells]];
    let mut p = vec![vec![0.0; cells]];
    for n in 1..=grid.depth {
        let fn_ = f.cond_exp(n);
        let prev = q[n - 1].clone();
        let qn: Vec<f64> = (0..cells)
            .map(|x| if prev[x] == 1.0 && fn_[x] <= lambda { 1.0 } else { 0.0 })
            .collect();
        p.push((0..cells).map(|x| prev[x] - qn[x]).collect());
        q.push(qn);
    }
    let mut g: Vec<f64> = (0..cells).map(|x| f.v[x] * q[grid.depth][x]).collect();
    let mut b_d = vec![0.0; cells];
    for n in 1..=grid.depth {
        let fn_ = f.cond_exp(n);
        for x in 0..cells {
            g[x] += p[n][x] * fn_[x];
            b_d[x] += p[n][x] * (f.v[x] - fn_[x]);
        }
    }
    let zeta = (0..cells)
        .map(|x| {
            let covered = (1..=grid.depth).any(|n| (0..cells).any(|c| p[n][c] == 1.0 && in_dilation(&grid, c, n, x)));
            if covered {
                0.0
            } else {
                1.0
            }
        })
        .collect();
    ScalarCz { q, p, g, b_d, zeta }
}

/// `max_λ λ · φ̃_w(|Tf| > λ) / ‖f‖_{1,w}` with `Tf = Σ_k ε_k (M_k − E_k) f`.
pub fn scalar_weak11(f: &Scalar, w: &[f64], lambdas: &[f64], signs: &[Vec<i8>]) -> f64 {
    let grid = f.grid;
    let vol = 1.0 / grid.cells() as f64;
    let t: Vec<Vec<f64>> = (0..=grid.depth)
        .map(|k| {
            let m = f.ball_avg(k);
            let e = f.cond_exp(k);
            m.iter().zip(e).map(|(a, b)| a - b).collect()
        })
        .collect();
    let norm: f64 = f.v.iter().zip(w).map(|(v, w)| v.abs() * w * vol).sum();
    let mut best = 0.0f64;
    for &lambda in lambdas {
        let mut mass = 0.0;
        for row in signs {
            for x in 0..grid.cells() {
                let tf: f64 = (0..=grid.depth).map(|k| row[k] as f64 * t[k][x]).sum();
                if tf.abs() > lambda {
                    mass += w[x] * vol;
                }
            }
        }
        best = best.max(lambda * mass / signs.len() as f64 / norm);
    }
    best
}
