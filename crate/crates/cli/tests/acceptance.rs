//! Acceptance suite: one test per release criterion, each printing a
//! single PASS/FAIL line (visible with `--nocapture`). Tolerances are
//! pinned here and nowhere else.
//!
//! Run with: `cargo test -p qig-cli --test acceptance -- --nocapture`

use std::process::Command;

use qig::bipartite::BipartiteDims;
use qig::checker::{
    default_catalog, g_p_value, loewner_min_eig, log_nodes, midpoint_operator_convexity,
    run_selected, TrialConfig,
};
use qig::linalg::{pauli_x, DensityMatrix, HermitianMatrix};
use qig::metric::{MetricId, MetricKernel, MonotoneFunction};
use qig::search::{violation_search, Constraint, SearchOptions};
use qig::skew::skew_information;

fn criterion(n: u32, name: &str, ok: bool, detail: &str) {
    println!("[acceptance] criterion {n:02} ({name}): {}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {n} ({name}): {detail}");
}

fn qubit_diag(a: f64) -> DensityMatrix {
    DensityMatrix::new(HermitianMatrix::from_real_diagonal(&[a, 1.0 - a])).unwrap()
}

fn suite_failures(config: &TrialConfig, checks: &[&str]) -> String {
    let reports = run_selected(config, Some(checks)).unwrap();
    let mut bad = String::new();
    for r in &reports {
        if r.failures > 0 {
            bad.push_str(&format!(
                "{} [{}]: {}/{} failed, worst {:.3e}, seed {}\n",
                r.check_id, r.metric_id, r.failures, r.trials, r.worst_residual, r.worst_case_seed
            ));
        }
    }
    bad
}

#[test]
fn criterion_01_closed_form_qubit_oracle() {
    let mut worst = 0.0f64;
    for a in [0.6, 0.75, 0.9] {
        let b = 1.0 - a;
        for k in 1..=9 {
            let p = k as f64 / 10.0;
            let f = MonotoneFunction::new(MetricId::Wyd(p)).unwrap();
            let got = skew_information(&qubit_diag(a), &pauli_x(), &f).unwrap().value;
            let want = (a.powf(p) - b.powf(p)) * (a.powf(1.0 - p) - b.powf(1.0 - p));
            worst = worst.max((got - want).abs() / want.abs());
        }
    }
    let half = MonotoneFunction::new(MetricId::Wyd(0.5)).unwrap();
    let exact = skew_information(&qubit_diag(0.9), &pauli_x(), &half).unwrap().value;
    let ok = worst <= 1e-10 && (exact - 0.4).abs() <= 1e-12;
    criterion(1, "closed-form qubit oracle", ok, &format!("worst rel {worst:.3e}, p=1/2 value {exact}"));
}

#[test]
fn criterion_02_trace_oracle_equivalence() {
    let mut p_grid: Vec<f64> = (1..=9).map(|k| k as f64 / 10.0).collect();
    p_grid.extend((11..=20).map(|k| k as f64 / 10.0));
    let config = TrialConfig {
        seed: 20_240_801,
        single_dims: vec![2, 3, 4, 6],
        bipartite_dims: vec![],
        trials_per_check: 500,
        metric_ids: p_grid.into_iter().map(MetricId::Wyd).collect(),
        ..TrialConfig::default()
    };
    let bad = suite_failures(&config, &["oracle-equivalence"]);
    criterion(2, "spectral sum vs trace oracle", bad.is_empty(), &bad);
}

#[test]
fn criterion_03_state_function_theorems() {
    let config = TrialConfig { seed: 30_303, ..TrialConfig::default() };
    let bad = suite_failures(
        &config,
        &["state-convexity", "additivity", "time-invariance", "pure-state-variance", "variance-bounds"],
    );
    criterion(3, "convexity/additivity/time-invariance/variance", bad.is_empty(), &bad);
}

#[test]
fn criterion_04_weak_superadditivity_forms() {
    let config = TrialConfig { seed: 40_404, ..TrialConfig::default() };
    let bad = suite_failures(
        &config,
        &["lieb-monotonicity", "weak-superadditivity-half", "weak-superadditivity-pair", "parallelogram"],
    );
    criterion(4, "embedded monotonicity and weak superadditivity", bad.is_empty(), &bad);
}

#[test]
fn criterion_05_semiquantum_states() {
    let config = TrialConfig { seed: 50_505, trials_per_check: 200, ..TrialConfig::default() };
    let bad = suite_failures(&config, &["semiquantum-superadditivity", "cross-term-vanishing"]);
    criterion(5, "semi-quantum superadditivity and cross terms", bad.is_empty(), &bad);
}

#[test]
fn criterion_06_monotonicity_battery() {
    let nodes = log_nodes(1e-3, 1e3, 12);
    let mut detail = String::new();
    let mut p_grid: Vec<f64> = vec![-0.9, -0.7, -0.5, -0.3, -0.1];
    p_grid.extend((1..=9).map(|k| k as f64 / 10.0));
    p_grid.extend((11..=20).map(|k| k as f64 / 10.0));
    for p in p_grid {
        let f = MonotoneFunction::new(MetricId::Wyd(p)).unwrap();
        let min = loewner_min_eig(|t| f.eval(t).unwrap(), &nodes).unwrap();
        if min < -1e-10 {
            detail.push_str(&format!("f_p p={p}: {min:.3e}\n"));
        }
    }
    for id in [MetricId::Kubo, MetricId::Harmonic] {
        let f = MonotoneFunction::new(id).unwrap();
        let min = loewner_min_eig(|t| f.eval(t).unwrap(), &nodes).unwrap();
        if min < -1e-10 {
            detail.push_str(&format!("{id}: {min:.3e}\n"));
        }
    }
    for k in 11..=20 {
        let p = k as f64 / 10.0;
        let min = loewner_min_eig(|t| g_p_value(p, t).unwrap(), &nodes).unwrap();
        if min < -1e-10 {
            detail.push_str(&format!("g_p p={p}: {min:.3e}\n"));
        }
    }
    // The non-monotone fixture must be caught decisively.
    let square = loewner_min_eig(|t| t * t, &[1.0, 2.0]).unwrap();
    if square > -0.1 {
        detail.push_str(&format!("x^2 fixture not rejected: {square:.3e}\n"));
    }
    criterion(6, "Loewner operator-monotonicity battery", detail.is_empty(), &detail);
}

#[test]
fn criterion_07_convexity_battery() {
    let mut detail = String::new();
    for id in default_catalog() {
        let f = MonotoneFunction::new(id).unwrap();
        let kernel = MetricKernel::new(f);
        let min = midpoint_operator_convexity(|t| kernel.h(t).unwrap(), 4, 200, 70_707).unwrap();
        if min < -1e-9 {
            detail.push_str(&format!("h midpoint {id}: {min:.3e}\n"));
        }
    }
    let config = TrialConfig { seed: 70_708, ..TrialConfig::default() };
    detail.push_str(&suite_failures(&config, &["chat-joint-convexity"]));
    criterion(7, "operator convexity of h and joint convexity of c-hat", detail.is_empty(), &detail);
}

#[test]
fn criterion_08_family_limits() {
    let kubo = MonotoneFunction::new(MetricId::Kubo).unwrap();
    let near0 = MonotoneFunction::new(MetricId::Wyd(0.001)).unwrap();
    let near1 = MonotoneFunction::new(MetricId::Wyd(0.999)).unwrap();
    let minimal = MonotoneFunction::new(MetricId::Wyd(2.0)).unwrap();
    let mut worst_kubo = 0.0f64;
    for t in log_nodes(0.04, 25.0, 41) {
        let k = kubo.eval(t).unwrap();
        worst_kubo = worst_kubo.max((near0.eval(t).unwrap() - k).abs());
        worst_kubo = worst_kubo.max((near1.eval(t).unwrap() - k).abs());
    }
    let mut worst_minimal = 0.0f64;
    for t in log_nodes(1e-4, 1e4, 41) {
        let closed = 2.0 * t / (t + 1.0);
        worst_minimal = worst_minimal.max((minimal.eval(t).unwrap() - closed).abs() / closed);
    }
    let ok = worst_kubo <= 1e-2 && worst_minimal <= 1e-10;
    criterion(8, "p->0,1 and p=2 family limits", ok, &format!("kubo dev {worst_kubo:.3e}, minimal dev {worst_minimal:.3e}"));
}

#[test]
fn criterion_09_search_sanity() {
    let base = SearchOptions {
        metric_id: MetricId::Wyd(0.5),
        dims: BipartiteDims::new(2, 2),
        budget: 20_000,
        seed: 90_909,
        restarts: 8,
        constraint: Constraint::Product,
    };
    let product = violation_search(&base).unwrap();
    let semiquantum = violation_search(&SearchOptions {
        constraint: Constraint::SemiQuantum,
        budget: 50_000,
        ..base
    })
    .unwrap();
    let unconstrained =
        violation_search(&SearchOptions { constraint: Constraint::None, ..base }).unwrap();
    let ok = product.best_gap.abs() <= 1e-8
        && product.reverified
        && semiquantum.best_gap >= -1e-9
        && semiquantum.reverified
        && unconstrained.reverified;
    criterion(
        9,
        "search sanity on constrained families",
        ok,
        &format!(
            "product {:.3e} (reverified {}), semiquantum {:.3e} (reverified {}), unconstrained gap {:.3e} (reverified {})",
            product.best_gap,
            product.reverified,
            semiquantum.best_gap,
            semiquantum.reverified,
            unconstrained.best_gap,
            unconstrained.reverified
        ),
    );
}

#[test]
fn criterion_10_report_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let (r1, r2) = (dir.path().join("r1.json"), dir.path().join("r2.json"));
    let flags = [
        "check", "--seed", "123", "--trials", "40", "--dims", "2,3,2x2", "--metrics",
        "wyd:0.5,wyd:1.5,kubo,bures",
    ];
    for out in [&r1, &r2] {
        let status = Command::new(env!("CARGO_BIN_EXE_qig"))
            .args(flags)
            .args(["--out", out.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let ok = std::fs::read(&r1).unwrap() == std::fs::read(&r2).unwrap();
    criterion(10, "byte-identical reports for identical flags", ok, "reports differ");
}
