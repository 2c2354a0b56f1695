//! Finite dyadic model of the periodic torus `[0,1)^d` at resolution `2^{-J}`.
//!
//! Cells are indexed row-major by their integer coordinates in `[0, 2^J)^d`.
//! All distances are measured in cell units between cell centers with the
//! periodic convention, so ball membership is decided in exact integer
//! arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    pub d: usize,
    #[serde(rename = "J")]
    pub depth: usize,
    pub m: usize,
}

impl GridSpec {
    pub fn new(d: usize, depth: usize, m: usize) -> Result<Self> {
        let g = Self { d, depth, m };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.depth == 0 || self.m == 0 {
            return Err(Error::InvalidGrid(format!(
                "need d, J, m >= 1 (got d={}, J={}, m={})",
                self.d, self.depth, self.m
            )));
        }
        if self.d * self.depth > 24 {
            return Err(Error::InvalidGrid(format!(
                "2^(dJ) = 2^{} cells is beyond desk scale",
                self.d * self.depth
            )));
        }
        Ok(())
    }

    /// Cells per axis, `2^J`.
    pub fn side(&self) -> usize {
        1 << self.depth
    }

    pub fn cells(&self) -> usize {
        1 << (self.d * self.depth)
    }

    /// Lebesgue measure of one cell, `2^{-dJ}`.
    pub fn cell_volume(&self) -> f64 {
        (self.cells() as f64).recip()
    }

    pub fn with_depth(&self, depth: usize) -> Self {
        Self { depth, ..*self }
    }

    pub fn with_m(&self, m: usize) -> Self {
        Self { m, ..*self }
    }

    pub fn check_generation(&self, k: usize) -> Result<()> {
        if k > self.depth {
            return Err(Error::GenerationOutOfRange { k, depth: self.depth });
        }
        Ok(())
    }

    pub fn check_cell(&self, cell: usize) -> Result<()> {
        if cell >= self.cells() {
            return Err(Error::CellOutOfRange(cell));
        }
        Ok(())
    }

    pub fn coords(&self, cell: usize) -> Vec<usize> {
        let n = self.side();
        let mut out = vec![0; self.d];
        let mut rest = cell;
        for i in (0..self.d).rev() {
            out[i] = rest % n;
            rest /= n;
        }
        out
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        let n = self.side();
        coords.iter().fold(0, |acc, &c| acc * n + (c % n))
    }

    /// Periodic sum `a + b` of two cells viewed as translation vectors.
    pub fn translate(&self, a: usize, b: usize) -> usize {
        let ca = self.coords(a);
        let cb = self.coords(b);
        let sum: Vec<usize> = ca.iter().zip(&cb).map(|(x, y)| x + y).collect();
        self.index(&sum)
    }

    /// Periodic difference `a − b`.
    pub fn difference(&self, a: usize, b: usize) -> usize {
        let n = self.side();
        let ca = self.coords(a);
        let cb = self.coords(b);
        let diff: Vec<usize> = ca.iter().zip(&cb).map(|(x, y)| (x + n - y) % n).collect();
        self.index(&diff)
    }

    /// Squared periodic Euclidean distance between centers, in cell units.
    pub fn dist_sq(&self, a: usize, b: usize) -> usize {
        let n = self.side();
        self.coords(a)
            .iter()
            .zip(self.coords(b))
            .map(|(&x, y)| {
                let delta = x.abs_diff(y);
                let delta = delta.min(n - delta);
                delta * delta
            })
            .sum()
    }

    /// Face neighbors (`±1` along each axis, periodic).
    pub fn neighbors(&self, cell: usize) -> Vec<usize> {
        let n = self.side();
        let c = self.coords(cell);
        let mut out = Vec::with_capacity(2 * self.d);
        for axis in 0..self.d {
            for step in [1, n - 1] {
                let mut nb = c.clone();
                nb[axis] = (nb[axis] + step) % n;
                out.push(self.index(&nb));
            }
        }
        out
    }

    /// Number of cubes in generation `k`.
    pub fn cubes_in_generation(&self, k: usize) -> usize {
        1 << (self.d * k)
    }

    /// Flat index (within generation `k`) of the cube containing `cell`.
    pub fn cube_index(&self, cell: usize, k: usize) -> usize {
        let shift = self.depth - k;
        let per_axis = 1usize << k;
        self.coords(cell)
            .iter()
            .fold(0, |acc, &c| acc * per_axis + (c >> shift))
    }
}

/// Exact set of cells.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CellSet {
    members: Vec<bool>,
}

impl std::fmt::Debug for CellSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl CellSet {
    pub fn empty(cells: usize) -> Self {
        Self {
            members: vec![false; cells],
        }
    }

    pub fn full(cells: usize) -> Self {
        Self {
            members: vec![true; cells],
        }
    }

    pub fn from_indices(cells: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(cells);
        for i in indices {
            s.insert(i);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, cell: usize) -> bool {
        self.members.get(cell).copied().unwrap_or(false)
    }

    pub fn insert(&mut self, cell: usize) {
        self.members[cell] = true;
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.members.iter().any(|&b| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(bool, bool) -> bool) -> Self {
        debug_assert_eq!(self.universe(), other.universe());
        Self {
            members: self
                .members
                .iter()
                .zip(&other.members)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a && !b)
    }

    pub fn complement(&self) -> Self {
        Self {
            members: self.members.iter().map(|&b| !b).collect(),
        }
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.members
            .iter()
            .zip(&other.members)
            .all(|(&a, &b)| !a || b)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.members
            .iter()
            .zip(&other.members)
            .any(|(&a, &b)| a && b)
    }

    /// Periodic translate `self + t`.
    pub fn translate(&self, grid: &GridSpec, t: usize) -> Self {
        Self::from_indices(self.universe(), self.iter().map(|c| grid.translate(c, t)))
    }
}

/// Dyadic cube of side `2^{-k}` with integer corner in units of its side.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicCube {
    pub generation: usize,
    pub corner: Vec<usize>,
}

impl DyadicCube {
    /// Cube of generation `k` containing `cell`.
    pub fn containing(grid: &GridSpec, cell: usize, k: usize) -> Self {
        let shift = grid.depth - k;
        Self {
            generation: k,
            corner: grid.coords(cell).iter().map(|c| c >> shift).collect(),
        }
    }

    /// Cells per axis.
    pub fn side_cells(&self, grid: &GridSpec) -> usize {
        1 << (grid.depth - self.generation)
    }

    pub fn contains(&self, grid: &GridSpec, cell: usize) -> bool {
        let shift = grid.depth - self.generation;
        grid.coords(cell)
            .iter()
            .zip(&self.corner)
            .all(|(&c, &q)| c >> shift == q)
    }

    pub fn cells(&self, grid: &GridSpec) -> CellSet {
        let s = self.side_cells(grid);
        let origin: Vec<usize> = self.corner.iter().map(|q| q * s).collect();
        box_cells(grid, &origin, s)
    }

    /// Concentric cube with five times the side, wrapped periodically and
    /// capped at the whole torus.
    pub fn dilate5(&self, grid: &GridSpec) -> CellSet {
        let s = self.side_cells(grid);
        let n = grid.side();
        if 5 * s >= n {
            return CellSet::full(grid.cells());
        }
        let origin: Vec<usize> = self.corner.iter().map(|q| (q * s + n - 2 * s) % n).collect();
        box_cells(grid, &origin, 5 * s)
    }
}

/// Axis-aligned box of `len` cells per axis starting at `origin`, periodic.
fn box_cells(grid: &GridSpec, origin: &[usize], len: usize) -> CellSet {
    let mut out = CellSet::empty(grid.cells());
    let total = len.pow(grid.d as u32);
    let mut offs = vec![0usize; grid.d];
    for flat in 0..total {
        let mut rest = flat;
        for i in (0..grid.d).rev() {
            offs[i] = rest % len;
            rest /= len;
        }
        let c: Vec<usize> = origin.iter().zip(&offs).map(|(o, x)| o + x).collect();
        out.insert(grid.index(&c));
    }
    out
}

/// The `2^{dk}` cubes of generation `k`.
pub fn cubes(grid: &GridSpec, k: usize) -> Result<Vec<DyadicCube>> {
    grid.check_generation(k)?;
    let per_axis = 1usize << k;
    let count = grid.cubes_in_generation(k);
    Ok((0..count)
        .map(|flat| {
            let mut corner = vec![0; grid.d];
            let mut rest = flat;
            for i in (0..grid.d).rev() {
                corner[i] = rest % per_axis;
                rest /= per_axis;
            }
            DyadicCube {
                generation: k,
                corner,
            }
        })
        .collect())
}

/// Cells whose centers lie within periodic distance `2^{-k}` of cell 0.
pub fn ball_at_origin(grid: &GridSpec, k: usize) -> Result<CellSet> {
    grid.check_generation(k)?;
    let r = 1usize << (grid.depth - k);
    Ok(CellSet::from_indices(
        grid.cells(),
        (0..grid.cells()).filter(|&c| grid.dist_sq(c, 0) <= r * r),
    ))
}

/// Closed discrete ball of radius `2^{-k}` around `center`.
pub fn ball(grid: &GridSpec, center: usize, k: usize) -> Result<CellSet> {
    grid.check_cell(center)?;
    Ok(ball_at_origin(grid, k)?.translate(grid, center))
}

/// Union of generation-`n` cubes meeting `e` without being contained in it.
pub fn q_boundary(grid: &GridSpec, e: &CellSet, n: usize) -> Result<CellSet> {
    let mut out = CellSet::empty(grid.cells());
    for q in cubes(grid, n)? {
        let cells = q.cells(grid);
        if cells.intersects(e) && !cells.is_subset(e) {
            out = out.union(&cells);
        }
    }
    Ok(out)
}

/// Union of the periodic translates `K + y` meeting both `e` and its complement.
pub fn k_boundary(grid: &GridSpec, e: &CellSet, kernel: &CellSet) -> Result<CellSet> {
    if kernel.is_empty() {
        return Err(Error::EmptyKernel);
    }
    let ec = e.complement();
    let mut out = CellSet::empty(grid.cells());
    for y in 0..grid.cells() {
        let shifted = kernel.translate(grid, y);
        if shifted.intersects(e) && shifted.intersects(&ec) {
            out = out.union(&shifted);
        }
    }
    Ok(out)
}

/// Cells of `e` with a face neighbor outside `e`.
pub fn discrete_boundary(grid: &GridSpec, e: &CellSet) -> CellSet {
    CellSet::from_indices(
        grid.cells(),
        e.iter()
            .filter(|&c| grid.neighbors(c).iter().any(|&nb| !e.contains(nb))),
    )
}

/// `⋃ {Q ∩ E : Q ∈ Q_n, Q meets the discrete boundary of E}`.
pub fn annulus_of(grid: &GridSpec, e: &CellSet, n: usize) -> Result<CellSet> {
    grid.check_generation(n)?;
    let boundary = discrete_boundary(grid, e);
    let mut out = CellSet::empty(grid.cells());
    for q in cubes(grid, n)? {
        let cells = q.cells(grid);
        if cells.intersects(&boundary) {
            out = out.union(&cells.intersection(e));
        }
    }
    Ok(out)
}

/// `I(B_k + center, n)`.
pub fn annulus(grid: &GridSpec, center: usize, k: usize, n: usize) -> Result<CellSet> {
    if k >= n {
        return Err(Error::ScaleOrder { k, n });
    }
    grid.check_generation(n)?;
    annulus_of(grid, &ball(grid, center, k)?, n)
}

/// All ball centers table: `annuli[x]` is `I(B_k + x, n)`.
pub fn annulus_table(grid: &GridSpec, k: usize, n: usize) -> Result<Vec<CellSet>> {
    if k >= n {
        return Err(Error::ScaleOrder { k, n });
    }
    grid.check_generation(n)?;
    let origin = ball_at_origin(grid, k)?;
    (0..grid.cells())
        .map(|x| annulus_of(grid, &origin.translate(grid, x), n))
        .collect()
}

/// `{x : y ∈ I(B_k + x, n)}`.
pub fn j_set(grid: &GridSpec, y: usize, k: usize, n: usize) -> Result<CellSet> {
    grid.check_cell(y)?;
    let table = annulus_table(grid, k, n)?;
    Ok(CellSet::from_indices(
        grid.cells(),
        (0..grid.cells()).filter(|&x| table[x].contains(y)),
    ))
}

/// Translate `center` by a uniformly drawn offset; helper for equivariance tests.
pub fn random_cell<R: rand::Rng + ?Sized>(grid: &GridSpec, rng: &mut R) -> usize {
    rng.random_range(0..grid.cells())
}
