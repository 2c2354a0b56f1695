//! One executable check per inequality of the theory, each producing a
//! [`report::CheckReport`] with the measured constant and its bound.

pub mod ao;
pub mod checks;
pub mod report;

use crate::field::MatrixField;
use crate::geometry::GridSpec;
use crate::tolerances::Tolerances;
use crate::weights::Weight;

pub use checks::run_instance;
pub use report::{CheckReport, Outcome, ReportContext};

/// A PSD field, its weight and the threshold `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub seed: u64,
    pub f: MatrixField,
    pub w: Weight,
    pub lambda: f64,
}

impl Instance {
    pub fn grid(&self) -> &GridSpec {
        self.f.grid()
    }
}

/// Multiplicative budgets for the bounds whose constants are implicit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budgets {
    /// Off-diagonal sum budget; `None` means `5^d · 2^{d+2}`.
    pub offdiag: Option<f64>,
    /// Randomized `L²` bound for the good part, in units of `[w]²`.
    pub good_l2: f64,
    /// Weak bound for the good part, in units of `max{[w]², [w]³}`.
    pub good_weak: f64,
    /// End-to-end weak-(1,1) budget, in units of `max{[w]², [w]³}`.
    pub weak11: f64,
    /// Admissible ratio between measurements at `J` and `J + 1`.
    pub refinement: f64,
}

impl Default for Budgets {
    fn default() -> Self {
        Self {
            offdiag: None,
            good_l2: 16.0,
            good_weak: 16.0,
            weak11: 64.0,
            refinement: 2.0,
        }
    }
}

impl Budgets {
    pub fn offdiag_for(&self, d: usize) -> f64 {
        self.offdiag
            .unwrap_or_else(|| 5f64.powi(d as i32) * 2f64.powi(d as i32 + 2))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    pub tolerances: Tolerances,
    pub budgets: Budgets,
    /// Rademacher rows `R`.
    pub samples: usize,
    /// Enumerate all sign patterns instead of sampling `R` rows.
    pub exhaustive_signs: bool,
    /// Thresholds of the weak-(1,1) sweep, as multiples of the instance `λ`.
    pub lambda_sweep: Vec<f64>,
    pub delta_samples: usize,
    /// Slack factor applied to the certified `δ` in decay checks.
    pub delta_slack: f64,
    /// Run the `J + 1` refinement comparisons.
    pub refinement: bool,
    pub rc_iterations: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            budgets: Budgets::default(),
            samples: 64,
            exhaustive_signs: false,
            lambda_sweep: vec![0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0],
            delta_samples: 400,
            delta_slack: 0.5,
            refinement: true,
            rc_iterations: 500,
        }
    }
}
