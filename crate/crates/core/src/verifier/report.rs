//! Check reports and their CSV serialization.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    /// A hypothesis-gated check whose hypothesis did not hold.
    Vacuous,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Pass => "true",
            Self::Fail => "false",
            Self::Vacuous => "vacuous",
        }
    }
}

/// Instance coordinates stamped on every report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportContext {
    pub seed: u64,
    pub grid: GridSpec,
    pub samples: usize,
    pub lambda: f64,
}

/// One measured inequality: passes when `lhs ≤ budget · rhs · (1 + tol)`.
///
/// Identities are encoded with `lhs` the defect, `rhs` its scale and
/// `budget` the admissible relative defect.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub check_id: String,
    pub seed: u64,
    pub grid: GridSpec,
    pub samples: usize,
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub budget: f64,
    pub tol: f64,
    pub outcome: Outcome,
    pub witness: Option<String>,
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs == 0.0 {
        if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        lhs / rhs
    }
}

impl CheckReport {
    pub fn inequality(id: &str, ctx: &ReportContext, lhs: f64, rhs: f64, budget: f64, tol: f64) -> Self {
        let pass = lhs.is_finite() && (budget.is_infinite() || lhs <= budget * rhs * (1.0 + tol));
        Self {
            check_id: id.to_string(),
            seed: ctx.seed,
            grid: ctx.grid,
            samples: ctx.samples,
            lambda: ctx.lambda,
            lhs,
            rhs,
            ratio: ratio(lhs, rhs),
            budget,
            tol,
            outcome: if pass { Outcome::Pass } else { Outcome::Fail },
            witness: None,
        }
    }

    /// `defect ≤ tol · scale`.
    pub fn identity(id: &str, ctx: &ReportContext, defect: f64, scale: f64, tol: f64) -> Self {
        Self::inequality(id, ctx, defect, scale.max(f64::MIN_POSITIVE), tol, 0.0)
    }

    /// Tracking report with no hard bound: passes while `lhs` stays finite.
    pub fn tracked(id: &str, ctx: &ReportContext, lhs: f64, rhs: f64) -> Self {
        Self::inequality(id, ctx, lhs, rhs, f64::INFINITY, 0.0)
    }

    pub fn vacuous(id: &str, ctx: &ReportContext, lhs: f64, rhs: f64) -> Self {
        let mut r = Self::inequality(id, ctx, lhs, rhs, 1.0, 0.0);
        r.outcome = Outcome::Vacuous;
        r
    }

    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }

    pub fn failed(&self) -> bool {
        self.outcome == Outcome::Fail
    }
}

pub const CSV_HEADER: [&str; 12] = [
    "check_id", "seed", "d", "J", "m", "R", "lambda", "lhs", "rhs", "ratio", "budget", "pass",
];

/// Writes the header and one row per report, optionally prefixed by extra
/// leading columns shared by all rows.
pub fn write_csv<W: Write>(
    out: W,
    reports: &[CheckReport],
    prefix: Option<(&[&str], &[String])>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = Vec::new();
    if let Some((names, _)) = prefix {
        header.extend_from_slice(names);
    }
    header.extend_from_slice(&CSV_HEADER);
    w.write_record(&header)?;
    for r in reports {
        let mut row: Vec<String> = Vec::new();
        if let Some((_, values)) = prefix {
            row.extend(values.iter().cloned());
        }
        row.extend(csv_fields(r));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn csv_fields(r: &CheckReport) -> Vec<String> {
    vec![
        r.check_id.clone(),
        r.seed.to_string(),
        r.grid.d.to_string(),
        r.grid.depth.to_string(),
        r.grid.m.to_string(),
        r.samples.to_string(),
        fmt(r.lambda),
        fmt(r.lhs),
        fmt(r.rhs),
        fmt(r.ratio),
        fmt(r.budget),
        r.outcome.as_str().to_string(),
    ]
}

/// Shortest round-trip representation.
pub fn fmt(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> ReportContext {
        ReportContext {
            seed: 3,
            grid: GridSpec::new(1, 4, 3).unwrap(),
            samples: 64,
            lambda: 0.5,
        }
    }

    #[test]
    fn pass_rule() {
        assert!(CheckReport::inequality("a", &ctx(), 1.0, 1.0, 1.0, 1e-9).passed());
        assert!(CheckReport::inequality("a", &ctx(), 1.0 + 1e-12, 1.0, 1.0, 1e-9).passed());
        assert!(CheckReport::inequality("a", &ctx(), 1.1, 1.0, 1.0, 1e-9).failed());
        assert!(CheckReport::inequality("a", &ctx(), 3.0, 1.0, 4.0, 0.0).passed());
        assert!(CheckReport::inequality("a", &ctx(), f64::NAN, 1.0, 4.0, 0.0).failed());
        assert!(CheckReport::identity("a", &ctx(), 1e-12, 2.0, 1e-9).passed());
        assert!(CheckReport::identity("a", &ctx(), 1e-8, 2.0, 1e-9).failed());
        assert!(CheckReport::identity("a", &ctx(), 0.0, 0.0, 1e-9).passed());
        assert!(CheckReport::tracked("a", &ctx(), 1e30, 1.0).passed());
        assert!(CheckReport::tracked("a", &ctx(), f64::INFINITY, 1.0).failed());
        assert_eq!(CheckReport::vacuous("a", &ctx(), 2.0, 1.0).outcome, Outcome::Vacuous);
        assert_eq!(CheckReport::inequality("a", &ctx(), 0.0, 0.0, 1.0, 0.0).ratio, 0.0);
    }

    #[test]
    fn csv_layout() {
        let reports = vec![
            CheckReport::inequality("x.y", &ctx(), 0.25, 1.0, 1.0, 1e-9),
            CheckReport::vacuous("ao", &ctx(), 2.0, 1.0),
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &reports, None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "check_id,seed,d,J,m,R,lambda,lhs,rhs,ratio,budget,pass");
        assert_eq!(lines[1], "x.y,3,1,4,3,64,5e-1,2.5e-1,1e0,2.5e-1,1e0,true");
        assert!(lines[2].ends_with(",vacuous"));
        let mut buf = Vec::new();
        write_csv(&mut buf, &reports[..1], Some((&["axis", "value"], &["J".into(), "5".into()]))).unwrap();
        assert!(String::from_utf8(buf).unwrap().lines().nth(1).unwrap().starts_with("J,5,x.y"));
    }
}
