use ncsq_core::operators::{self, SignSample};
use ncsq_core::suite::{self, SuiteConfig, SweepAxis};
use ncsq_core::verifier::checks;

fn config(extra: &str) -> SuiteConfig {
    SuiteConfig::parse(&format!(
        "d=1\nJ=4\nm=3\nR=32\nN=8\nseed=300\nweight=random-a1:4\nrefinement=false\n{extra}"
    ))
    .unwrap()
}

fn max_ratio(res: &suite::SuiteResult, id: &str) -> f64 {
    res.summary().checks[id].max_ratio
}

#[test]
fn offdiag_ratio_stable_across_depth() {
    let res = suite::sweep(&config(""), SweepAxis::Depth, &[3.0, 4.0, 5.0]).unwrap();
    assert!(!res.failed());
    let by_depth: Vec<f64> = res.points.iter().map(|(_, r)| max_ratio(r, "offdiag.sum")).collect();
    // d = 1, J = 3: the two coarse balls cover the torus and b_J^off = 0
    assert!(by_depth[0] <= 1e-12, "{by_depth:?}");
    let (a, b) = (by_depth[1], by_depth[2]);
    assert!(a > 0.0 && b > 0.0);
    assert!(a.max(b) / a.min(b) <= 2.0, "{by_depth:?}");
}

#[test]
fn weak11_ratio_stable_across_depth() {
    let res = suite::sweep(&config(""), SweepAxis::Depth, &[4.0, 5.0]).unwrap();
    let a = max_ratio(&res.points[0].1, "weak11.max_ratio");
    let b = max_ratio(&res.points[1].1, "weak11.max_ratio");
    assert!(a.max(b) / a.min(b) <= 2.0, "{a} {b}");
}

#[test]
fn lambda_sweep_distribution_is_monotone() {
    let cfg = config("");
    let inst = &suite::instances(&cfg).unwrap()[0];
    let lambdas: Vec<f64> = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0].iter().map(|m| m * inst.lambda).collect();
    let signs = SignSample::random(4, 32, 0).unwrap();
    let tf = operators::linearize(&inst.f, &signs).unwrap();
    let dist = checks::distributions(&tf, &inst.w, &lambdas).unwrap();
    assert!(dist.windows(2).all(|p| p[1] <= p[0]), "{dist:?}");
    assert!(dist[0] > 0.0);

    let res = suite::sweep(&cfg, SweepAxis::Lambda, &[1.0, 2.0, 4.0]).unwrap();
    assert!(!res.failed());
    let csv = String::from_utf8(res.csv_bytes().unwrap()).unwrap();
    // one row per axis value and instance
    assert_eq!(csv.lines().filter(|l| l.contains(",weak11.sweep,")).count(), 3 * cfg.instances);
}

#[test]
fn a1_cap_sweep_runs() {
    let mut cfg = config("");
    cfg.instances = 4;
    let res = suite::sweep(&cfg, SweepAxis::A1Cap, &[1.0, 2.0, 4.0, 8.0]).unwrap();
    assert!(!res.failed());
    for (cap, r) in &res.points {
        for inst in &r.instances {
            assert!(inst.w.a1() <= cap + 1e-12);
        }
    }
}
