//! Suite configuration, instance generation and batch execution.
//!
//! Config files are flat `key = value` lines; `#` starts a comment.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cz;
use crate::error::{Error, Result};
use crate::field::{self, InstanceFile, MatrixField};
use crate::geometry::GridSpec;
use crate::operators::{self, SignSample};
use crate::rng;
use crate::seqnorm::{self, FieldSequence};
use crate::verifier::checks::weak11_max_ratio;
use crate::verifier::report::{write_csv, CheckReport, Outcome};
use crate::verifier::{run_instance, CheckConfig, Instance};
use crate::weights::{estimate_delta, make_weight, Weight, WeightSpec};

/// Attempts before instance generation gives up on the normalization.
pub const MAX_INSTANCE_ATTEMPTS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    Random,
    /// `f ≤ λ`, `w ≡ 1`: nothing stops.
    Trivial,
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub grid: GridSpec,
    pub weight: WeightSpec,
    pub instances: usize,
    pub seed: u64,
    /// Multiplier applied to the default threshold of each instance.
    pub lambda: f64,
    pub source: InstanceSource,
    pub checks: CheckConfig,
    pub out: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub witness_dir: Option<PathBuf>,
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {v:?}")))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got {v:?}"))),
    }
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|x| parse_num(key, x.trim())).collect()
}

const REQUIRED: [&str; 7] = ["d", "J", "m", "R", "N", "seed", "weight"];

impl SuiteConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut kv: BTreeMap<String, String> = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
            let k = k.trim().to_string();
            if kv.insert(k.clone(), v.trim().to_string()).is_some() {
                return Err(Error::Config(format!("line {}: duplicate key {k}", no + 1)));
            }
        }
        for key in REQUIRED {
            if !kv.contains_key(key) {
                return Err(Error::Config(format!("missing required key {key}")));
            }
        }
        let grid = GridSpec::new(
            parse_num("d", &kv["d"])?,
            parse_num("J", &kv["J"])?,
            parse_num("m", &kv["m"])?,
        )
        .map_err(|e| Error::Config(e.to_string()))?;
        let mut cfg = Self {
            grid,
            weight: kv["weight"].parse().map_err(|e: Error| Error::Config(e.to_string()))?,
            instances: parse_num("N", &kv["N"])?,
            seed: parse_num("seed", &kv["seed"])?,
            lambda: 1.0,
            source: InstanceSource::Random,
            checks: CheckConfig {
                samples: parse_num("R", &kv["R"])?,
                ..CheckConfig::default()
            },
            out: None,
            summary: None,
            witness_dir: None,
        };
        for (k, v) in &kv {
            let v = v.as_str();
            let c = &mut cfg.checks;
            match k.as_str() {
                "d" | "J" | "m" | "R" | "N" | "seed" | "weight" => {}
                "lambda" => cfg.lambda = parse_num(k, v)?,
                "lambda_sweep" => c.lambda_sweep = parse_list(k, v)?,
                "instances" => {
                    cfg.source = match v {
                        "random" => InstanceSource::Random,
                        "trivial" => InstanceSource::Trivial,
                        _ => match v.strip_prefix("file:") {
                            Some(p) => InstanceSource::File(PathBuf::from(p)),
                            None => return Err(Error::Config(format!("instances: unknown source {v:?}"))),
                        },
                    }
                }
                "signs" => {
                    c.exhaustive_signs = match v {
                        "random" => false,
                        "exhaustive" => true,
                        _ => return Err(Error::Config(format!("signs: expected random or exhaustive, got {v:?}"))),
                    }
                }
                "refinement" => c.refinement = parse_bool(k, v)?,
                "delta_samples" => c.delta_samples = parse_num(k, v)?,
                "delta_slack" => c.delta_slack = parse_num(k, v)?,
                "rc_iterations" => c.rc_iterations = parse_num(k, v)?,
                "budget.offdiag" => c.budgets.offdiag = Some(parse_num(k, v)?),
                "budget.good_l2" => c.budgets.good_l2 = parse_num(k, v)?,
                "budget.good_weak" => c.budgets.good_weak = parse_num(k, v)?,
                "budget.weak11" => c.budgets.weak11 = parse_num(k, v)?,
                "budget.refinement" => c.budgets.refinement = parse_num(k, v)?,
                "tol.identity" => c.tolerances.identity = parse_num(k, v)?,
                "tol.reconstruction" => c.tolerances.reconstruction = parse_num(k, v)?,
                "tol.psd_order" => c.tolerances.psd_order = parse_num(k, v)?,
                "tol.inequality" => c.tolerances.inequality = parse_num(k, v)?,
                "out" => cfg.out = Some(PathBuf::from(v)),
                "summary" => cfg.summary = Some(PathBuf::from(v)),
                "witness_dir" => cfg.witness_dir = Some(PathBuf::from(v)),
                _ => return Err(Error::Config(format!("unknown key {k}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let c = &self.checks;
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if self.instances == 0 {
            return bad("N must be positive");
        }
        if c.samples == 0 {
            return bad("R must be positive");
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return bad("lambda must be a positive multiplier");
        }
        if c.lambda_sweep.is_empty() || c.lambda_sweep.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return bad("lambda_sweep must list positive multipliers");
        }
        if c.exhaustive_signs && self.grid.depth > operators::MAX_EXHAUSTIVE_DEPTH {
            return bad("exhaustive signs need J <= 4");
        }
        if c.delta_samples < crate::weights::MIN_DELTA_SAMPLES {
            return bad("delta_samples must be at least 100");
        }
        let b = &c.budgets;
        let budgets = [b.good_l2, b.good_weak, b.weak11, b.refinement, b.offdiag.unwrap_or(1.0)];
        if budgets.iter().any(|x| !(*x > 0.0)) {
            return bad("budgets must be positive");
        }
        let t = &c.tolerances;
        if [t.identity, t.reconstruction, t.psd_order, t.inequality].iter().any(|x| !(*x >= 0.0)) {
            return bad("tolerances must be non-negative");
        }
        Ok(())
    }

    /// Seed of the `i`-th instance.
    pub fn instance_seed(&self, i: usize) -> u64 {
        self.seed.wrapping_add(i as u64)
    }
}

/// `median_x tr f(x) / m`.
pub fn default_lambda(f: &MatrixField) -> f64 {
    let m = f.m() as f64;
    let mut tr: Vec<f64> = f.matrices().iter().map(|a| a.trace().re / m).collect();
    tr.sort_by(f64::total_cmp);
    tr[tr.len() / 2]
}

/// Cells flagged "high" by a dyadic cascade: every cube of every generation
/// adds a uniform score and the top 70% of cells are high.
fn clustered_mask<R: Rng + ?Sized>(grid: &GridSpec, r: &mut R) -> Vec<bool> {
    let mut score = vec![0.0; grid.cells()];
    for k in 1..=grid.depth {
        let bumps: Vec<f64> = (0..grid.cubes_in_generation(k)).map(|_| r.random_range(-1.0..1.0)).collect();
        for (c, s) in score.iter_mut().enumerate() {
            *s += bumps[grid.cube_index(c, k)];
        }
    }
    let mut sorted = score.clone();
    sorted.sort_by(f64::total_cmp);
    let cut = sorted[(0.3 * grid.cells() as f64) as usize];
    score.iter().map(|&s| s >= cut).collect()
}

/// Random PSD field with clustered large cells; `λ` is `multiplier` times
/// the median trace rule, redrawn until `E_0 f ≤ λ`.
pub fn random_instance(grid: GridSpec, weight: WeightSpec, seed: u64, multiplier: f64) -> Result<Instance> {
    let w = make_weight(weight, grid.with_m(1), seed)?;
    let mut r = rng::stream(seed, 1);
    for _ in 0..MAX_INSTANCE_ATTEMPTS {
        let mask = clustered_mask(&grid, &mut r);
        let f = MatrixField::from_fn(grid, |c| {
            let mut eigs: Vec<f64> = (0..grid.m)
                .map(|_| if mask[c] { r.random_range(0.5..1.5) } else { r.random_range(0.0..0.1) })
                .collect();
            if !mask[c] && r.random_bool(0.3) {
                eigs[0] = 0.0;
            }
            rng::psd_with_spectrum(&mut r, &eigs)
        });
        let lambda = multiplier * default_lambda(&f);
        if lambda > 0.0 && cz::check_normalization(&f, lambda).is_ok() {
            return Ok(Instance { seed, f, w, lambda });
        }
    }
    Err(Error::Invalid(format!(
        "no instance met the normalization after {MAX_INSTANCE_ATTEMPTS} draws"
    )))
}

/// `f` with spectrum in `[0, 0.5]`, `λ = 1`, `w ≡ 1`.
pub fn trivial_instance(grid: GridSpec, seed: u64) -> Instance {
    let mut r = rng::stream(seed, 2);
    let f = MatrixField::from_fn(grid, |_| {
        let eigs: Vec<f64> = (0..grid.m).map(|_| r.random_range(0.0..0.5)).collect();
        rng::psd_with_spectrum(&mut r, &eigs)
    });
    Instance {
        seed,
        f,
        w: Weight::constant(grid.with_m(1), 1.0),
        lambda: 1.0,
    }
}

pub fn load_instance(path: &Path) -> Result<InstanceFile> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    InstanceFile::from_json(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Decodes a file instance; validates PSD and the normalization.
pub fn instance_from_file(file: &InstanceFile, fallback_seed: u64, multiplier: f64) -> Result<Instance> {
    let (f, w) = file.decode()?;
    cz::check_psd(&f)?;
    let lambda = match file.lambda {
        Some(l) => l,
        None => multiplier * default_lambda(&f),
    };
    cz::check_normalization(&f, lambda)?;
    Ok(Instance {
        seed: file.seed.unwrap_or(fallback_seed),
        f,
        w,
        lambda,
    })
}

pub fn instances(cfg: &SuiteConfig) -> Result<Vec<Instance>> {
    match &cfg.source {
        InstanceSource::Random => (0..cfg.instances)
            .into_par_iter()
            .map(|i| random_instance(cfg.grid, cfg.weight, cfg.instance_seed(i), cfg.lambda))
            .collect(),
        InstanceSource::Trivial => Ok((0..cfg.instances)
            .map(|i| trivial_instance(cfg.grid, cfg.instance_seed(i)))
            .collect()),
        InstanceSource::File(p) => Ok(vec![instance_from_file(&load_instance(p)?, cfg.seed, cfg.lambda)?]),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CheckSummary {
    pub count: usize,
    pub pass: usize,
    pub fail: usize,
    pub vacuous: usize,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub instances: usize,
    pub reports: usize,
    pub failures: usize,
    pub checks: BTreeMap<String, CheckSummary>,
}

impl Summary {
    pub fn from_reports(instances: usize, reports: &[CheckReport]) -> Self {
        let mut checks: BTreeMap<String, CheckSummary> = BTreeMap::new();
        for r in reports {
            let s = checks.entry(r.check_id.clone()).or_default();
            s.count += 1;
            match r.outcome {
                Outcome::Pass => s.pass += 1,
                Outcome::Fail => s.fail += 1,
                Outcome::Vacuous => s.vacuous += 1,
            }
            if r.outcome != Outcome::Vacuous && r.ratio.is_finite() {
                s.max_ratio = s.max_ratio.max(r.ratio);
            }
        }
        Self {
            instances,
            reports: reports.len(),
            failures: reports.iter().filter(|r| r.failed()).count(),
            checks,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub instances: Vec<Instance>,
    pub reports: Vec<CheckReport>,
}

impl SuiteResult {
    pub fn failed(&self) -> bool {
        self.reports.iter().any(CheckReport::failed)
    }

    pub fn summary(&self) -> Summary {
        Summary::from_reports(self.instances.len(), &self.reports)
    }
}

/// Runs every check on every instance; reports come back in instance order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<SuiteResult> {
    cfg.validate()?;
    let insts = instances(cfg)?;
    let per: Vec<Vec<CheckReport>> = insts
        .par_iter()
        .map(|inst| run_instance(inst, &cfg.checks))
        .collect::<Result<_>>()?;
    Ok(SuiteResult {
        instances: insts,
        reports: per.into_iter().flatten().collect(),
    })
}

/// Writes `bytes` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Serializes each instance with a failed report into `dir` and records the
/// path on its failing reports.
pub fn write_witnesses(result: &mut SuiteResult, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for inst in &result.instances {
        if !result.reports.iter().any(|r| r.failed() && r.seed == inst.seed) {
            continue;
        }
        let path = dir.join(format!("witness-{}.json", inst.seed));
        let file = InstanceFile::new(&inst.f, &inst.w, Some(inst.lambda), Some(inst.seed));
        write_atomic(&path, file.to_json()?.as_bytes())?;
        for r in result.reports.iter_mut().filter(|r| r.failed() && r.seed == inst.seed) {
            r.witness = Some(path.display().to_string());
        }
        written.push(path);
    }
    Ok(written)
}

pub fn csv_bytes(reports: &[CheckReport], prefix: Option<(&[&str], &[String])>) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv(&mut buf, reports, prefix)?;
    Ok(buf)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Lambda,
    Depth,
    A1Cap,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda" => Ok(Self::Lambda),
            "J" => Ok(Self::Depth),
            "a1-cap" => Ok(Self::A1Cap),
            _ => Err(Error::Config(format!("unknown sweep axis {s:?}"))),
        }
    }
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            Self::Lambda => "lambda",
            Self::Depth => "J",
            Self::A1Cap => "a1-cap",
        }
    }

    /// The config for one axis value.
    pub fn apply(self, cfg: &SuiteConfig, value: f64) -> Result<SuiteConfig> {
        let mut c = cfg.clone();
        match self {
            Self::Lambda => c.lambda = value,
            Self::Depth => {
                if value.fract() != 0.0 || value < 1.0 {
                    return Err(Error::Config(format!("J must be a positive integer, got {value}")));
                }
                c.grid = GridSpec::new(cfg.grid.d, value as usize, cfg.grid.m)
                    .map_err(|e| Error::Config(e.to_string()))?;
            }
            Self::A1Cap => c.weight = WeightSpec::RandomA1 { cap: value },
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub points: Vec<(f64, SuiteResult)>,
}

impl SweepResult {
    pub fn failed(&self) -> bool {
        self.points.iter().any(|(_, r)| r.failed())
    }

    /// One CSV with leading `axis,value` columns.
    pub fn csv_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["axis", "value"];
        header.extend_from_slice(&crate::verifier::report::CSV_HEADER);
        w.write_record(&header)?;
        for (v, res) in &self.points {
            for r in &res.reports {
                let mut row = vec![self.axis.name().to_string(), crate::verifier::report::fmt(*v)];
                row.extend(crate::verifier::report::csv_fields(r));
                w.write_record(&row)?;
            }
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }
}

pub fn sweep(cfg: &SuiteConfig, axis: SweepAxis, values: &[f64]) -> Result<SweepResult> {
    if values.len() < 2 {
        return Err(Error::Config("a sweep needs at least two axis values".into()));
    }
    let mut points = Vec::new();
    for &v in values {
        points.push((v, run_suite(&axis.apply(cfg, v)?)?));
    }
    Ok(SweepResult { axis, points })
}

/// One-off norms of an instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceNorms {
    pub d: usize,
    #[serde(rename = "J")]
    pub depth: usize,
    pub m: usize,
    pub lambda: f64,
    pub a1: f64,
    pub delta: f64,
    pub l1_w: f64,
    pub l2_w: f64,
    pub linf: f64,
    pub weak_l1_w: f64,
    pub column_p1: f64,
    pub row_p1: f64,
    pub rc_p1: [f64; 2],
    pub rc_p1_5: [f64; 2],
    pub rc_p2: [f64; 2],
    pub weak_rc: [f64; 2],
    pub weak11_ratio: f64,
    pub stopped_mass: f64,
}

pub fn instance_norms(inst: &Instance, samples: usize) -> Result<InstanceNorms> {
    let (f, w) = (&inst.f, &inst.w);
    let g = *f.grid();
    let seq = FieldSequence::new(operators::t_sequence(f)?)?;
    let bracket = |p: f64| -> Result<[f64; 2]> {
        let b = seqnorm::rc_norm(&seq, p, Some(w))?;
        Ok([b.lower, b.upper])
    };
    let (lo, up) = seqnorm::weak_rc_quasinorm(&seq, Some(w))?;
    let signs = SignSample::random(g.depth, samples, inst.seed)?;
    let cuc = cz::cuculescu(f, inst.lambda)?;
    let one_minus_q = MatrixField::identity(g).sub(cuc.q_final());
    Ok(InstanceNorms {
        d: g.d,
        depth: g.depth,
        m: g.m,
        lambda: inst.lambda,
        a1: w.a1(),
        delta: estimate_delta(w, 400, inst.seed)?.delta,
        l1_w: field::lp_norm(f, 1.0, Some(w))?,
        l2_w: field::lp_norm(f, 2.0, Some(w))?,
        linf: f.sup_norm(),
        weak_l1_w: field::weak_l1_quasinorm(f, Some(w))?,
        column_p1: seqnorm::column_norm(&seq, 1.0, Some(w))?,
        row_p1: seqnorm::row_norm(&seq, 1.0, Some(w))?,
        rc_p1: bracket(1.0)?,
        rc_p1_5: bracket(1.5)?,
        rc_p2: bracket(2.0)?,
        weak_rc: [lo, up],
        weak11_ratio: weak11_max_ratio(f, w, &[inst.lambda], &signs)?,
        stopped_mass: field::trace(&one_minus_q, Some(w))?.re,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "d = 1\nJ = 3\nm = 2\nR = 8\nN = 2\nseed = 7\nweight = constant:1\n";

    #[test]
    fn parses_and_validates() {
        let cfg = SuiteConfig::parse(&format!("{BASE}lambda_sweep = 1, 2\nsigns = exhaustive # all\n")).unwrap();
        assert_eq!(cfg.grid, GridSpec::new(1, 3, 2).unwrap());
        assert_eq!(cfg.checks.lambda_sweep, vec![1.0, 2.0]);
        assert!(cfg.checks.exhaustive_signs);
        assert!(matches!(SuiteConfig::parse("d = 1\n"), Err(Error::Config(_))));
        assert!(matches!(SuiteConfig::parse(&format!("{BASE}bogus = 1\n")), Err(Error::Config(_))));
        assert!(matches!(SuiteConfig::parse(&format!("{BASE}d = 2\n")), Err(Error::Config(_))));
        assert!(matches!(SuiteConfig::parse(&BASE.replace("N = 2", "N = 0")), Err(Error::Config(_))));
        assert!(matches!(SuiteConfig::parse(&format!("{BASE}lambda = -1\n")), Err(Error::Config(_))));
        assert!(matches!(SuiteConfig::parse(&BASE.replace("constant:1", "wobbly")), Err(Error::Config(_))));
    }

    #[test]
    fn generated_instances_are_valid_and_deterministic() {
        let g = GridSpec::new(1, 4, 3).unwrap();
        for seed in 0..10 {
            let a = random_instance(g, WeightSpec::RandomA1 { cap: 4.0 }, seed, 1.0).unwrap();
            let b = random_instance(g, WeightSpec::RandomA1 { cap: 4.0 }, seed, 1.0).unwrap();
            assert_eq!(a, b);
            assert!(a.f.is_psd(1e-12));
            assert!(a.w.a1() <= 4.0 * (1.0 + 1e-12));
            let cuc = cz::cuculescu(&a.f, a.lambda).unwrap();
            assert!(cuc.stopped());
        }
    }

    #[test]
    fn trivial_suite_passes() {
        let cfg = SuiteConfig::parse(&format!("{BASE}instances = trivial\n")).unwrap();
        let res = run_suite(&cfg).unwrap();
        let bad: Vec<_> = res.reports.iter().filter(|r| r.failed()).collect();
        assert!(bad.is_empty(), "{bad:#?}");
        assert_eq!(res.summary().instances, 2);
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.csv");
        write_atomic(&p, b"a").unwrap();
        write_atomic(&p, b"b").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"b");
        assert!(!dir.path().join("sub/out.csv.tmp").exists());
    }

    #[test]
    fn sweep_axes() {
        let cfg = SuiteConfig::parse(BASE).unwrap();
        assert_eq!(SweepAxis::Depth.apply(&cfg, 4.0).unwrap().grid.depth, 4);
        assert!(SweepAxis::Depth.apply(&cfg, 2.5).is_err());
        assert_eq!(
            SweepAxis::A1Cap.apply(&cfg, 3.0).unwrap().weight,
            WeightSpec::RandomA1 { cap: 3.0 }
        );
        assert!("x".parse::<SweepAxis>().is_err());
        assert!(sweep(&cfg, SweepAxis::Lambda, &[1.0]).is_err());
    }
}
