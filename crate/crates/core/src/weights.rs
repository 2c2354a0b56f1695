//! Dyadic A₁/A_p weights: constants, generators, the sampled δ-decay
//! certificate and weighted cell measures.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{CellSet, DyadicCube, GridSpec};
use crate::rng;

/// Strictly positive scalar density on the grid, with its dyadic A₁ constant
/// cached at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    grid: GridSpec,
    values: Vec<f64>,
    a1: f64,
}

impl Weight {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        let grid = grid.with_m(1);
        if values.len() != grid.cells() {
            return Err(Error::ShapeMismatch(format!(
                "weight with {} values on {} cells",
                values.len(),
                grid.cells()
            )));
        }
        if let Some((cell, &value)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::NonPositiveWeight { cell, value });
        }
        let a1 = a1_of(&grid, &values);
        Ok(Self { grid, values, a1 })
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self::new(grid, vec![c; grid.cells()]).expect("constant weight must be positive")
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn a1(&self) -> f64 {
        self.a1
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// Piecewise-constant copy one level deeper.
    pub fn refine(&self) -> Self {
        let fine = self.grid.with_depth(self.grid.depth + 1);
        let values = (0..fine.cells())
            .map(|c| {
                let coarse: Vec<usize> = fine.coords(c).iter().map(|x| x >> 1).collect();
                self.values[self.grid.index(&coarse)]
            })
            .collect();
        Self::new(fine, values).expect("refinement keeps positivity")
    }
}

/// Per-generation cube sums and minima, indexed by `cube_index`.
fn cube_stats(grid: &GridSpec, values: &[f64], k: usize) -> (Vec<f64>, Vec<f64>) {
    let count = grid.cubes_in_generation(k);
    let mut sum = vec![0.0; count];
    let mut min = vec![f64::INFINITY; count];
    for (c, &v) in values.iter().enumerate() {
        let q = grid.cube_index(c, k);
        sum[q] += v;
        min[q] = min[q].min(v);
    }
    (sum, min)
}

fn a1_of(grid: &GridSpec, values: &[f64]) -> f64 {
    let mut best = 1.0f64;
    for k in 0..=grid.depth {
        let per_cube = (grid.cells() >> (grid.d * k)) as f64;
        let (sum, min) = cube_stats(grid, values, k);
        for (s, m) in sum.iter().zip(&min) {
            best = best.max(s / per_cube / m);
        }
    }
    best
}

/// `max_Q avg_Q w / min_Q w` over every dyadic cube.
pub fn a1_constant(w: &Weight) -> f64 {
    w.a1
}

/// `max_Q (avg_Q w)(avg_Q w^{1/(1−p)})^{p−1}` over every dyadic cube.
pub fn ap_constant(w: &Weight, p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::ExponentOutOfRange(p));
    }
    let grid = w.grid;
    let dual: Vec<f64> = w.values.iter().map(|v| v.powf(1.0 / (1.0 - p))).collect();
    let mut best = 1.0f64;
    for k in 0..=grid.depth {
        let per_cube = (grid.cells() >> (grid.d * k)) as f64;
        let (s1, _) = cube_stats(&grid, &w.values, k);
        let (s2, _) = cube_stats(&grid, &dual, k);
        for (a, b) in s1.iter().zip(&s2) {
            best = best.max(a / per_cube * (b / per_cube).powf(p - 1.0));
        }
    }
    Ok(best)
}

/// `w(S) = Σ_{x ∈ S} 2^{-dJ} w(x)`.
pub fn weighted_measure(s: &CellSet, w: &Weight) -> f64 {
    let vol = w.grid.cell_volume();
    s.iter().map(|c| w.values[c] * vol).sum()
}

pub const DELTA_GRID_STEPS: usize = 19;
pub const DEFAULT_DELTA_CAP: f64 = 2.0;
pub const MIN_DELTA_SAMPLES: usize = 100;

/// Empirical `(δ, C)` certificate for `w(S)/w(Q) ≤ C (|S|/|Q|)^δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub delta: f64,
    pub constant: f64,
    pub cap: f64,
    pub samples: usize,
    pub seed: u64,
}

/// One sampled `(S, Q)` pair reduced to `(w(S)/w(Q), |S|/|Q|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassPair {
    pub weight_ratio: f64,
    pub volume_ratio: f64,
}

impl MassPair {
    pub fn holds(&self, delta: f64, constant: f64) -> bool {
        self.weight_ratio <= constant * self.volume_ratio.powf(delta) * (1.0 + 1e-12)
    }
}

/// Draws `samples` pairs: a random cube `Q` of generation `0..J−1` and `S`
/// either a nonempty random union of its cells or one of its dyadic subcubes.
pub fn sample_pairs(w: &Weight, samples: usize, seed: u64) -> Vec<MassPair> {
    let grid = w.grid;
    let mut r = rng::stream(seed, 0xde17a);
    let mut out = vec![MassPair {
        weight_ratio: 1.0,
        volume_ratio: 1.0,
    }];
    while out.len() < samples {
        let g = r.random_range(0..grid.depth);
        let cell = r.random_range(0..grid.cells());
        let q = DyadicCube::containing(&grid, cell, g);
        let qc = q.cells(&grid);
        let s = if r.random_bool(0.5) {
            let mut s = CellSet::empty(grid.cells());
            let p = r.random_range(0.05..0.95);
            for c in qc.iter() {
                if r.random_bool(p) {
                    s.insert(c);
                }
            }
            if s.is_empty() {
                continue;
            }
            s
        } else {
            let sg = r.random_range(g..=grid.depth);
            let members: Vec<usize> = qc.iter().collect();
            let pick = members[r.random_range(0..members.len())];
            DyadicCube::containing(&grid, pick, sg).cells(&grid)
        };
        out.push(MassPair {
            weight_ratio: weighted_measure(&s, w) / weighted_measure(&qc, w),
            volume_ratio: s.len() as f64 / qc.len() as f64,
        });
    }
    out
}

fn constant_for(pairs: &[MassPair], delta: f64) -> f64 {
    pairs
        .iter()
        .map(|p| p.weight_ratio / p.volume_ratio.powf(delta))
        .fold(0.0, f64::max)
}

/// Largest `δ ∈ {0.05, …, 0.95}` whose sampled constant stays within `cap`;
/// falls back to `δ = 0.05` with its measured constant when none does.
pub fn estimate_delta_with_cap(w: &Weight, samples: usize, seed: u64, cap: f64) -> Result<DeltaEstimate> {
    if samples < MIN_DELTA_SAMPLES {
        return Err(Error::SampleBudget(samples));
    }
    let pairs = sample_pairs(w, samples, seed);
    let mut chosen = None;
    for i in (1..=DELTA_GRID_STEPS).rev() {
        let delta = 0.05 * i as f64;
        let c = constant_for(&pairs, delta);
        if c <= cap {
            chosen = Some((delta, c));
            break;
        }
    }
    let (delta, constant) = chosen.unwrap_or_else(|| (0.05, constant_for(&pairs, 0.05)));
    Ok(DeltaEstimate {
        delta,
        constant,
        cap,
        samples,
        seed,
    })
}

pub fn estimate_delta(w: &Weight, samples: usize, seed: u64) -> Result<DeltaEstimate> {
    estimate_delta_with_cap(w, samples, seed, DEFAULT_DELTA_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WeightSpec {
    Constant(f64),
    /// `a` on the half `x_1 < 1/2`, `b` elsewhere.
    TwoLevel(f64, f64),
    /// `max(|x − x₀|, 2^{-J})^{-α}` with `x₀ = (x0, …, x0)`, periodic distance.
    Power { x0: f64, alpha: f64 },
    /// Dyadic multiplicative cascade rejection-sampled until `[w]_{A₁} ≤ cap`.
    RandomA1 { cap: f64 },
}

impl std::fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Constant(c) => write!(f, "constant:{c}"),
            Self::TwoLevel(a, b) => write!(f, "two-level:{a},{b}"),
            Self::Power { x0, alpha } => write!(f, "power:{x0},{alpha}"),
            Self::RandomA1 { cap } => write!(f, "random-a1:{cap}"),
        }
    }
}

impl std::str::FromStr for WeightSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let nums = args
            .split(',')
            .filter(|a| !a.trim().is_empty())
            .map(|a| {
                a.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidWeight(format!("bad number {a:?} in {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let spec = match (kind.trim(), nums.as_slice()) {
            ("constant", [c]) => Self::Constant(*c),
            ("two-level", [a, b]) => Self::TwoLevel(*a, *b),
            ("power", [x0, alpha]) => Self::Power {
                x0: *x0,
                alpha: *alpha,
            },
            ("random-a1", [cap]) => Self::RandomA1 { cap: *cap },
            _ => return Err(Error::InvalidWeight(format!("unrecognized weight spec {s:?}"))),
        };
        Ok(spec)
    }
}

pub const MAX_WEIGHT_ATTEMPTS: usize = 1000;

pub fn make_weight(spec: WeightSpec, grid: GridSpec, seed: u64) -> Result<Weight> {
    match spec {
        WeightSpec::Constant(c) => {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidWeight(format!("constant {c}")));
            }
            Ok(Weight::constant(grid, c))
        }
        WeightSpec::TwoLevel(a, b) => {
            if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
                return Err(Error::InvalidWeight(format!("two-level ({a}, {b})")));
            }
            let half = grid.side() / 2;
            let values = (0..grid.cells())
                .map(|c| if grid.coords(c)[0] < half { a } else { b })
                .collect();
            Weight::new(grid, values)
        }
        WeightSpec::Power { x0, alpha } => {
            if !(0.0..=1.0).contains(&x0) || !alpha.is_finite() || alpha < 0.0 {
                return Err(Error::InvalidWeight(format!("power ({x0}, {alpha})")));
            }
            let n = grid.side() as f64;
            let floor = 1.0 / n;
            let values = (0..grid.cells())
                .map(|c| {
                    let r2: f64 = grid
                        .coords(c)
                        .iter()
                        .map(|&i| {
                            let t = ((i as f64 + 0.5) / n - x0).abs();
                            let t = t.min(1.0 - t);
                            t * t
                        })
                        .sum();
                    r2.sqrt().max(floor).powf(-alpha)
                })
                .collect();
            Weight::new(grid, values)
        }
        WeightSpec::RandomA1 { cap } => {
            if !(cap > 0.0) {
                return Err(Error::InvalidWeight(format!("cap {cap}")));
            }
            let mut r = rng::stream(seed, 0xa1);
            for attempt in 0..MAX_WEIGHT_ATTEMPTS {
                let amplitude = 0.9 * (1.0 - attempt as f64 / (MAX_WEIGHT_ATTEMPTS - 1) as f64);
                let w = cascade(grid, amplitude, &mut r)?;
                if w.a1 <= cap * (1.0 + 1e-12) {
                    return Ok(w);
                }
            }
            Err(Error::UnreachableCap {
                cap,
                attempts: MAX_WEIGHT_ATTEMPTS,
            })
        }
    }
}

/// `Π_k (1 + a ξ_Q)` over the cubes containing each cell, `ξ_Q ~ U[−1, 1]`.
fn cascade<R: Rng + ?Sized>(grid: GridSpec, amplitude: f64, r: &mut R) -> Result<Weight> {
    let mut values = vec![1.0; grid.cells()];
    for k in 1..=grid.depth {
        let factors: Vec<f64> = (0..grid.cubes_in_generation(k))
            .map(|_| 1.0 + amplitude * r.random_range(-1.0..=1.0))
            .collect();
        for (c, v) in values.iter_mut().enumerate() {
            *v *= factors[grid.cube_index(c, k)];
        }
    }
    Weight::new(grid, values)
}
