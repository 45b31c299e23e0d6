//! Seeded random generators and the randomized property suite.
//!
//! Every theorem, inequality, and identity implemented by the crate has a
//! check here. A check runs `trials_per_check` independent trials; each
//! trial derives its seed as `hash(config.seed, check_id, trial_index)`,
//! so results are identical no matter how trials are scheduled, and any
//! failure can be replayed from the recorded seed alone.
//!
//! Operator monotonicity and operator convexity are certified at finite
//! order only: Löwner divided-difference matrices on a fixed node grid and
//! midpoint tests on random matrix pairs. That is a falsifiable battery of
//! necessary conditions, not a proof.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bipartite::{
    aggregate, cross_term, embed_first, embed_second, lieb_gap, semi_quantum_state,
    superadditivity_gap, BipartiteDims, SemiQuantumSpec, Sign,
};
use crate::linalg::{
    matrix_function, partial_trace, partial_trace_matrix, variance, ComplexMatrix, DensityMatrix,
    HermitianMatrix, Party,
};
use crate::metric::{pow_m1, MetricId, MetricKernel, MonotoneFunction};
use crate::skew::{metric_inner, skew_information, wyd_trace_oracle};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Deterministic seeding
// ---------------------------------------------------------------------------

/// FNV-1a over byte chunks; stable across platforms and releases.
pub(crate) fn stable_hash(parts: &[&[u8]]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for &b in *part {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn trial_seed(config_seed: u64, check_instance: &str, trial: u64) -> u64 {
    stable_hash(&[&config_seed.to_le_bytes(), check_instance.as_bytes(), &trial.to_le_bytes()])
}

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard normal via Box-Muller.
pub(crate) fn normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1 = 1.0 - rng.gen::<f64>();
    let u2 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn complex_normal(rng: &mut ChaCha8Rng) -> num_complex::Complex64 {
    num_complex::Complex64::new(normal(rng), normal(rng))
}

fn ginibre(n: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| complex_normal(rng))
}

// ---------------------------------------------------------------------------
// Random generators
// ---------------------------------------------------------------------------

/// `G·G†/Tr(G·G†)` for a complex Gaussian `G`, mixed with `δ·I/n`
/// (`δ = n·min_eig_floor`) so the smallest eigenvalue stays above the
/// requested floor. Deterministic in the seed.
pub fn random_density(n: usize, min_eig_floor: f64, seed: u64) -> DensityMatrix {
    let mut rng = rng_from_seed(seed);
    let g = ginibre(n, &mut rng);
    let s = &g * &g.adjoint();
    let tr = s.trace().re;
    let mut rho = if tr > 0.0 {
        s.scale_re(1.0 / tr)
    } else {
        ComplexMatrix::identity(n).scale_re(1.0 / n as f64)
    };
    if min_eig_floor > 0.0 {
        let delta = (n as f64 * min_eig_floor).min(1.0);
        rho = &rho.scale_re(1.0 - delta) + &ComplexMatrix::identity(n).scale_re(delta / n as f64);
    }
    DensityMatrix::from_trusted(HermitianMatrix::symmetrize(rho))
}

/// `(G + G†)/2` for a complex Gaussian `G`; entries O(1).
pub fn random_observable(n: usize, seed: u64) -> HermitianMatrix {
    let mut rng = rng_from_seed(seed);
    HermitianMatrix::symmetrize(ginibre(n, &mut rng))
}

/// Rank-one projection onto a Haar-like random unit vector.
pub fn random_pure_state(n: usize, seed: u64) -> DensityMatrix {
    let mut rng = rng_from_seed(seed);
    let mut v: Vec<num_complex::Complex64> = (0..n).map(|_| complex_normal(&mut rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for z in &mut v {
            *z = z.unscale(norm);
        }
    } else {
        v[0] = num_complex::Complex64::new(1.0, 0.0);
    }
    DensityMatrix::from_trusted(HermitianMatrix::symmetrize(ComplexMatrix::outer(&v, &v)))
}

/// Random unitary as the eigenvector matrix of a random Hermitian matrix.
pub fn random_unitary(n: usize, seed: u64) -> ComplexMatrix {
    random_observable(n, seed).eigen().unitary
}

/// Random semi-quantum state built exactly from its defining data:
/// probabilities from a flat simplex (optionally mixed toward uniform by
/// `prob_mix`), projections from a random-unitary-rotated computational
/// basis, second-party states from [`random_density`] with `state_floor`.
pub fn random_semi_quantum(
    dims: BipartiteDims,
    prob_mix: f64,
    state_floor: f64,
    seed: u64,
) -> (SemiQuantumSpec, DensityMatrix) {
    let mut rng = rng_from_seed(seed);
    let n1 = dims.n1;
    let raw: Vec<f64> = (0..n1).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    let mut probs: Vec<f64> = raw
        .iter()
        .map(|e| {
            let p = if total > 0.0 { e / total } else { 1.0 / n1 as f64 };
            (1.0 - prob_mix) * p + prob_mix / n1 as f64
        })
        .collect();
    let s: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= s;
    }
    let u = random_unitary(n1, rng.gen());
    let projections: Vec<HermitianMatrix> = (0..n1)
        .map(|i| {
            let col = u.column(i);
            HermitianMatrix::symmetrize(ComplexMatrix::outer(&col, &col))
        })
        .collect();
    let states: Vec<DensityMatrix> =
        (0..n1).map(|_| random_density(dims.n2, state_floor, rng.gen())).collect();
    let spec = SemiQuantumSpec::new(probs, projections, states)
        .expect("constructed semi-quantum data is valid");
    let rho = semi_quantum_state(&spec);
    (spec, rho)
}

// ---------------------------------------------------------------------------
// Scalar batteries
// ---------------------------------------------------------------------------

/// Logarithmically spaced nodes in `[lo, hi]`.
pub fn log_nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Minimum eigenvalue of the Löwner divided-difference matrix
/// `L_{jk} = (φ(x_j)−φ(x_k))/(x_j−x_k)` with central-difference diagonal.
/// Nonnegative values are consistent with operator monotonicity of φ at
/// this order.
pub fn loewner_min_eig(phi: impl Fn(f64) -> f64, nodes: &[f64]) -> Result<f64> {
    let n = nodes.len();
    if n < 2 {
        return Err(Error::InvalidArgument("need at least two nodes".into()));
    }
    for (i, &x) in nodes.iter().enumerate() {
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::Domain(format!("nodes must be positive, got {x}")));
        }
        if nodes[..i].contains(&x) {
            return Err(Error::InvalidArgument(format!("duplicate node {x}")));
        }
    }
    let mut m = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let x = nodes[j];
        // Step size balances cancellation noise ulp(φ)/(2ε) against the
        // O(ε²φ''') truncation term. The truncation is nonnegative for
        // operator monotone φ (φ''' ≥ 0), so it cannot push the minimum
        // eigenvalue down; 1e-5 keeps the noise near 1e-12.
        let eps = (1e-5 * x.max(1.0)).min(0.5 * x);
        let d = (phi(x + eps) - phi(x - eps)) / (2.0 * eps);
        m[(j, j)] = num_complex::Complex64::new(d, 0.0);
        for k in (j + 1)..n {
            let v = (phi(x) - phi(nodes[k])) / (x - nodes[k]);
            m[(j, k)] = num_complex::Complex64::new(v, 0.0);
            m[(k, j)] = num_complex::Complex64::new(v, 0.0);
        }
    }
    Ok(HermitianMatrix::symmetrize(m).eigen().eigenvalues[0])
}

/// `g_p(t) = (t^p−1)/(t−1) + (t^{1−p}−1)/(t−1)` for `1 < p ≤ 2`, the
/// operator monotone helper behind the non-regular `wyd` branch, with
/// `g_p(1) = 1`.
pub fn g_p_value(p: f64, t: f64) -> Result<f64> {
    if !(p > 1.0 && p <= 2.0) {
        return Err(Error::UnsupportedParameter(format!("g_p needs 1 < p <= 2, got {p}")));
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::Domain(format!("g_p is defined for t > 0, got {t}")));
    }
    if t == 1.0 {
        return Ok(1.0);
    }
    Ok((pow_m1(t, p) + pow_m1(t, 1.0 - p)) / (t - 1.0))
}

fn random_bounded_spectrum(n: usize, lo: f64, hi: f64, rng: &mut ChaCha8Rng) -> HermitianMatrix {
    let u = random_observable(n, rng.gen()).eigen().unitary;
    let vals: Vec<f64> = (0..n).map(|_| lo + (hi - lo) * rng.gen::<f64>()).collect();
    conjugated_diagonal(&u, &vals)
}

fn conjugated_diagonal(u: &ComplexMatrix, vals: &[f64]) -> HermitianMatrix {
    let n = vals.len();
    let mut ud = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            ud[(i, j)] = u[(i, j)] * vals[j];
        }
    }
    HermitianMatrix::symmetrize(&ud * &u.adjoint())
}

fn midpoint_trial(phi: &impl Fn(f64) -> f64, n: usize, seed: u64) -> Result<f64> {
    let mut rng = rng_from_seed(seed);
    let x = random_bounded_spectrum(n, 0.05, 5.0, &mut rng);
    let y = random_bounded_spectrum(n, 0.05, 5.0, &mut rng);
    let mid = HermitianMatrix::symmetrize((x.matrix() + y.matrix()).scale_re(0.5));
    let fx = matrix_function(&x, phi)?;
    let fy = matrix_function(&y, phi)?;
    let fmid = matrix_function(&mid, phi)?;
    let gap = &(fx.matrix() + fy.matrix()).scale_re(0.5) - fmid.matrix();
    Ok(HermitianMatrix::symmetrize(gap).eigen().eigenvalues[0])
}

/// Minimum over trials of the smallest eigenvalue of
/// `(φ(X)+φ(Y))/2 − φ((X+Y)/2)` on random positive pairs with spectra in
/// `[0.05, 5]`. Values above `−tol` support operator convexity of φ.
pub fn midpoint_operator_convexity(
    phi: impl Fn(f64) -> f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if n < 2 || trials == 0 {
        return Err(Error::InvalidArgument("need n >= 2 and trials >= 1".into()));
    }
    let mut worst = f64::INFINITY;
    for i in 0..trials as u64 {
        let s = stable_hash(&[&seed.to_le_bytes(), b"midpoint", &i.to_le_bytes()]);
        worst = worst.min(midpoint_trial(&phi, n, s)?);
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// Suite configuration and reports
// ---------------------------------------------------------------------------

/// Configuration of one suite run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialConfig {
    pub seed: u64,
    pub single_dims: Vec<usize>,
    pub bipartite_dims: Vec<BipartiteDims>,
    pub trials_per_check: usize,
    pub tol_eq: f64,
    pub tol_psd: f64,
    pub metric_ids: Vec<MetricId>,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            single_dims: vec![2, 3, 4, 6],
            bipartite_dims: vec![
                BipartiteDims::new(2, 2),
                BipartiteDims::new(2, 3),
                BipartiteDims::new(3, 3),
            ],
            trials_per_check: 500,
            tol_eq: 1e-9,
            tol_psd: 1e-10,
            metric_ids: default_catalog(),
        }
    }
}

/// The catalog entries exercised by default.
pub fn default_catalog() -> Vec<MetricId> {
    vec![
        MetricId::Wyd(0.1),
        MetricId::Wyd(0.25),
        MetricId::Wyd(0.5),
        MetricId::Wyd(0.75),
        MetricId::Wyd(0.9),
        MetricId::Wyd(1.5),
        MetricId::Wyd(2.0),
        MetricId::Kubo,
        MetricId::Harmonic,
        MetricId::Bures,
    ]
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials_per_check == 0 {
            return Err(Error::InvalidArgument("trials_per_check must be at least 1".into()));
        }
        if !self.tol_eq.is_finite()
            || self.tol_eq <= 0.0
            || !self.tol_psd.is_finite()
            || self.tol_psd <= 0.0
        {
            return Err(Error::InvalidArgument("tolerances must be positive".into()));
        }
        if self.metric_ids.is_empty() {
            return Err(Error::InvalidArgument("need at least one metric id".into()));
        }
        for &n in &self.single_dims {
            if n == 0 || n > 64 {
                return Err(Error::InvalidArgument(format!("single dim {n} out of range 1..=64")));
            }
        }
        for d in &self.bipartite_dims {
            if d.n1 == 0 || d.n2 == 0 || d.total() > 64 {
                return Err(Error::InvalidArgument(format!("bipartite dims {d} out of range")));
            }
        }
        Ok(())
    }
}

/// Outcome of one check for one metric at one dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub metric_id: String,
    pub trials: usize,
    pub failures: usize,
    pub worst_residual: f64,
    pub worst_case_seed: u64,
}

// ---------------------------------------------------------------------------
// Check registry
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
pub(crate) enum DimArg {
    None,
    Single(usize),
    Pair(BipartiteDims),
}

#[derive(Clone, Copy)]
enum Scope {
    Single,
    Bipartite,
    ScalarRandom,
    ScalarDeterministic,
}

/// Pass convention: `Slack` residuals must stay above `−tol` (worst = min),
/// `Abs` residuals must stay below `tol` (worst = max).
#[derive(Clone, Copy)]
enum Flavor {
    Slack,
    Abs,
}

#[derive(Clone, Copy)]
enum TolKind {
    Eq,
    Psd,
}

struct CheckDef {
    id: &'static str,
    scope: Scope,
    flavor: Flavor,
    tol: TolKind,
    applies: fn(&MonotoneFunction) -> bool,
    trial: fn(&MonotoneFunction, DimArg, u64) -> Result<f64>,
}

fn applies_all(_: &MonotoneFunction) -> bool {
    true
}

fn applies_regular(f: &MonotoneFunction) -> bool {
    f.is_regular()
}

fn applies_wyd_oracle(f: &MonotoneFunction) -> bool {
    matches!(f.id(), MetricId::Wyd(p) if (p > 0.0 && p < 1.0) || (p > 1.0 && p <= 2.0))
}

fn applies_wyd_extension(f: &MonotoneFunction) -> bool {
    matches!(f.id(), MetricId::Wyd(p) if p > 1.0 && p <= 2.0)
}

const REGISTRY: &[CheckDef] = &[
    CheckDef { id: "state-convexity", scope: Scope::Single, flavor: Flavor::Slack, tol: TolKind::Eq, applies: applies_all, trial: trial_state_convexity },
    CheckDef { id: "additivity", scope: Scope::Bipartite, flavor: Flavor::Abs, tol: TolKind::Eq, applies: applies_all, trial: trial_additivity },
    CheckDef { id: "time-invariance", scope: Scope::Single, flavor: Flavor::Abs, tol: TolKind::Eq, applies: applies_all, trial: trial_time_invariance },
    CheckDef { id: "pure-state-variance", scope: Scope::Single, flavor: Flavor::Abs, tol: TolKind::Eq, applies: applies_regular, trial: trial_pure_state_variance },
    CheckDef { id: "variance-bounds", scope: Scope::Single, flavor: Flavor::Slack, tol: TolKind::Psd, applies: applies_regular, trial: trial_variance_bounds },
    CheckDef { id: "lieb-monotonicity", scope: Scope::Bipartite, flavor: Flavor::Slack, tol: TolKind::Eq, applies: applies_all, trial: trial_lieb },
    CheckDef { id: "metric-contraction", scope: Scope::Bipartite, flavor: Flavor::Slack, tol: TolKind::Eq, applies: applies_all, trial: trial_metric_contraction },
    CheckDef { id: "weak-superadditivity-half", scope: Scope::Bipartite, flavor: Flavor::Slack, tol: TolKind::Eq, applies: applies_all, trial: trial_weaksup_half },
    CheckDef { id: "weak-superadditivity-pair", scope: Scope::Bipartite, flavor: Flavor::Slack, tol: TolKind::Eq, applies: applies_all, trial: trial_weaksup_pair },
    CheckDef { id: "parallelogram", scope: Scope::Bipartite, flavor: Flavor::Abs, tol: TolKind::Eq, applies: applies_all, trial: trial_parallelogram },
    CheckDef { id: "semiquantum-superadditivity", scope: Scope::Bipartite, flavor: Flavor::Slack, tol: TolKind::Eq, applies: applies_all, trial: trial_semiquantum_superadditivity },
    CheckDef { id: "cross-term-vanishing", scope: Scope::Bipartite, flavor: Flavor::Abs, tol: TolKind::Psd, applies: applies_all, trial: trial_cross_term },
    CheckDef { id: "oracle-equivalence", scope: Scope::Single, flavor: Flavor::Abs, tol: TolKind::Eq, applies: applies_wyd_oracle, trial: trial_oracle_equivalence },
    CheckDef { id: "loewner-monotone", scope: Scope::ScalarDeterministic, flavor: Flavor::Slack, tol: TolKind::Psd, applies: applies_all, trial: trial_loewner_f },
    CheckDef { id: "loewner-gp", scope: Scope::ScalarDeterministic, flavor: Flavor::Slack, tol: TolKind::Psd, applies: applies_wyd_extension, trial: trial_loewner_gp },
    CheckDef { id: "midpoint-convexity-h", scope: Scope::ScalarRandom, flavor: Flavor::Slack, tol: TolKind::Eq, applies: applies_all, trial: trial_midpoint_h },
    CheckDef { id: "chat-joint-convexity", scope: Scope::ScalarRandom, flavor: Flavor::Slack, tol: TolKind::Psd, applies: applies_all, trial: trial_chat_joint_convexity },
];

fn expect_single(d: DimArg) -> usize {
    match d {
        DimArg::Single(n) => n,
        _ => unreachable!("check registered with wrong scope"),
    }
}

fn expect_pair(d: DimArg) -> BipartiteDims {
    match d {
        DimArg::Pair(p) => p,
        _ => unreachable!("check registered with wrong scope"),
    }
}

/// Non-regular metrics need spectra bounded away from zero; regular ones
/// are exercised on raw Ginibre states, including near-singular ones.
fn state_floor(f: &MonotoneFunction) -> f64 {
    if f.is_regular() {
        0.0
    } else {
        1e-4
    }
}

fn prob_mix(f: &MonotoneFunction) -> f64 {
    if f.is_regular() {
        0.0
    } else {
        1e-2
    }
}

fn skew_value(rho: &DensityMatrix, a: &HermitianMatrix, f: &MonotoneFunction) -> Result<f64> {
    Ok(skew_information(rho, a, f)?.value)
}

fn trial_state_convexity(f: &MonotoneFunction, d: DimArg, seed: u64) -> Result<f64> {
    let n = expect_single(d);
    let mut rng = rng_from_seed(seed);
    let fl = state_floor(f);
    let r1 = random_density(n, fl, rng.gen());
    let r2 = random_density(n, fl, rng.gen());
    let a = random_observable(n, rng.gen());
    let i1 = skew_value(&r1, &a, f)?;
    let i2 = skew_value(&r2, &a, f)?;
    let mut worst = f64::INFINITY;
    for k in 1..=9 {
        let lam = k as f64 / 10.0;
        let mix = DensityMatrix::mixture(&[(lam, &r1), (1.0 - lam, &r2)])?;
        worst = worst.min(lam * i1 + (1.0 - lam) * i2 - skew_value(&mix, &a, f)?);
    }
    Ok(worst)
}

fn trial_additivity(f: &MonotoneFunction, d: DimArg, seed: u64) -> Result<f64> {
    let dims = expect_pair(d);
    let mut rng = rng_from_seed(seed);
    let fl = state_floor(f);
    let r1 = random_density(dims.n1, fl, rng.gen());
    let r2 = random_density(dims.n2, fl, rng.gen());
    let a = random_observable(dims.n1, rng.gen());
    let b = random_observable(dims.n2, rng.gen());
    let product = DensityMatrix::from_trusted(HermitianMatrix::symmetrize(
        r1.matrix().kron(r2.matrix()),
    ));
    let whole = skew_value(&product, &aggregate(&a, &b, Sign::Plus), f)?;
    let parts = skew_value(&r1, &a, f)? + skew_value(&r2, &b, f)?;
    Ok((whole - parts).abs() / (1.0 + parts.abs()))
}

fn trial_time_invariance(f: &MonotoneFunction, d: DimArg, seed: u64) -> Result<f64> {
    let n = expect_single(d);
    let mut rng = rng_from_seed(seed);
    let rho = random_density(n, state_floor(f), rng.gen());
    let u = random_unitary(n, rng.gen());
    let avals: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
    let hvals: Vec<f64> = (0..n).map(|_| normal(&mut rng)).collect();
    let a = conjugated_diagonal(&u, &avals);
    let h = conjugated_diagonal(&u, &hvals);
    let base = skew_value(&rho, &a, f)?;
    let mut worst = 0.0f64;
    for t in [0.3, 1.7] {
        let evolved = crate::linalg::time_evolve(&rho, &h, t)?;
        worst = worst.max((skew_value(&evolved, &a, f)? - base).abs() / (1.0 + base.abs()));
    }
    Ok(worst)
}

fn trial_pure_state_variance(f: &MonotoneFunction, d: DimArg, seed: u64) -> Result<f64> {
    let n = expect_single(d);
    let mut rng = rng_from_seed(seed);
    let psi = random_pure_state(n, rng.gen());
    let a = random_observable(n, rng.gen());
    let var = variance(&psi, &a)?;
    Ok((skew_value(&psi, &a, f)? - var).abs() / (1.0 + var))
}

fn trial_variance_bounds(f: &MonotoneFunction, d: DimArg, seed: u64) -> Result<f64> {
    let n = expect_single(d);
    let mut rng = rng_from_seed(seed);
    let rho = random_density(n, 0.0, rng.gen());
    let a = random_observable(n, rng.gen());
    let i = skew_value(&rho, &a, f)?;
    let var = variance(&rho, &a)?;
    Ok(i.min(var - i))
}

fn trial_lieb(f: &MonotoneFunction, d: DimArg, seed: u64) -> Result<f64> {
    let dims = expect_pair(d);
    let mut rng = rng_from_seed(seed);
    let rho = random_density(dims.total(), state_floor(f), rng.gen());
    let a = random_observable(dims.n1, rng.gen());
    lieb_gap(&rho, &a, dims, f)
}

fn trial_metric_contraction(f: &MonotoneFunction, d: DimArg, seed: u64) -> Result<f64> {
    let dims = expect_pair(d);
    let mut rng = rng_from_seed(seed);
    let rho = random_density(dims.total(), 1e-4, rng.gen());
    let x = random_observable(dims.total(), rng.gen());
    let k = MetricKernel::new(*f);
    let big = metric_inner(&rho, x.matrix(), x.matrix(), &k)?.re;
    let rho1 = partial_trace(&rho, dims.n1, dims.n2, Party::One)?;
    let x1 = partial_trace_matrix(x.matrix(), dims.n1, dims.n2, Party::One)?;
    let small = metric_inner(&rho1, &x1, &x1, &k)?.re;
    Ok(big - small)
}

fn weaksup_parts(
    f: &MonotoneFunction,
    dims: BipartiteDims,
    seed: u64,
) -> Result<(f64, f64, f64, f64)> {
    let mut rng = rng_from_seed(seed);
    let rho = random_density(dims.total(), state_floor(f), rng.gen());
    let a = random_observable(dims.n1, rng.gen());
    let b = random_observable(dims.n2, rng.gen());
    let iplus = skew_value(&rho, &aggregate(&a, &b, Sign::Plus), f)?;
    let iminus = skew_value(&rho, &aggregate(&a, &b, Sign::Minus), f)?;
    let rho1 = partial_trace(&rho, dims.n1, dims.n2, Party::One)?;
    let rho2 = partial_trace(&rho, dims.n1, dims.n2, Party::Two)?;
    let i1 = skew_value(&rho1, &a, f)?;
    let i2 = skew_value(&rho2, &b, f)?;
    Ok((iplus, iminus, i1, i2))
}

fn trial_weaksup_half(f: &MonotoneFunction, d: DimArg, seed: u64) -> Result<f64> {
    let (iplus, _, i1, i2) = weaksup_parts(f, expect_pair(d), seed)?;
    Ok(iplus - 0.5 * (i1 + i2))
}

fn trial_weaksup_pair(f: &MonotoneFunction, d: DimArg, seed: u64) -> Result<f64> {
    let (iplus, iminus, i1, i2) = weaksup_parts(f, expect_pair(d), seed)?;
    Ok(iplus + iminus - 2.0 * (i1 + i2))
}

fn trial_parallelogram(f: &MonotoneFunction, d: DimArg, seed: u64) -> Result<f64> {
    let dims = expect_pair(d);
    let mut rng = rng_from_seed(seed);
    let rho = random_density(dims.total(), state_floor(f).max(1e-6), rng.gen());
    let a = random_observable(dims.n1, rng.gen());
    let b = random_observable(dims.n2, rng.gen());
    let lhs = skew_value(&rho, &aggregate(&a, &b, Sign::Plus), f)?
        + skew_value(&rho, &aggregate(&a, &b, Sign::Minus), f)?;
    let rhs = 2.0
        * (skew_value(&rho, &embed_first(&a, dims.n2), f)?
            + skew_value(&rho, &embed_second(&b, dims.n1), f)?);
    Ok((lhs - rhs).abs() / (1.0 + rhs.abs()))
}

fn trial_semiquantum_superadditivity(f: &MonotoneFunction, d: DimArg, seed: u64) -> Result<f64> {
    let dims = expect_pair(d);
    let mut rng = rng_from_seed(seed);
    let (_, rho) = random_semi_quantum(dims, prob_mix(f), state_floor(f), rng.gen());
    let a = random_observable(dims.n1, rng.gen());
    let b = random_observable(dims.n2, rng.gen());
    superadditivity_gap(&rho, &a, &b, dims, f)
}

fn trial_cross_term(f: &MonotoneFunction, d: DimArg, seed: u64) -> Result<f64> {
    let dims = expect_pair(d);
    let mut rng = rng_from_seed(seed);
    // The vanishing is exact, but non-regular kernels scale like 1/λ_min
    // and amplify eigenbasis rounding into the absolute 1e-10 budget, so
    // those trials keep their spectra well inside the manifold.
    let (mix, floor) = if f.is_regular() { (0.0, 0.0) } else { (0.2, 1e-2) };
    let (_, rho) = random_semi_quantum(dims, mix, floor, rng.gen());
    let a = random_observable(dims.n1, rng.gen());
    let b = random_observable(dims.n2, rng.gen());
    Ok(cross_term(&rho, &a, &b, dims, f)?.abs())
}

fn trial_oracle_equivalence(f: &MonotoneFunction, d: DimArg, seed: u64) -> Result<f64> {
    let n = expect_single(d);
    let p = match f.id() {
        MetricId::Wyd(p) => p,
        _ => unreachable!("oracle equivalence applies to wyd only"),
    };
    let mut rng = rng_from_seed(seed);
    let rho = random_density(n, 1e-4, rng.gen());
    let a = random_observable(n, rng.gen());
    let spectral = skew_value(&rho, &a, f)?;
    let oracle = wyd_trace_oracle(&rho, &a, p)?;
    Ok((spectral - oracle).abs() / (1.0 + oracle.abs()))
}

fn trial_loewner_f(f: &MonotoneFunction, _d: DimArg, _seed: u64) -> Result<f64> {
    let nodes = log_nodes(1e-3, 1e3, 12);
    loewner_min_eig(|t| f.eval(t).expect("positive node"), &nodes)
}

fn trial_loewner_gp(f: &MonotoneFunction, _d: DimArg, _seed: u64) -> Result<f64> {
    let p = match f.id() {
        MetricId::Wyd(p) => p,
        _ => unreachable!("g_p applies to wyd only"),
    };
    let nodes = log_nodes(1e-3, 1e3, 12);
    loewner_min_eig(|t| g_p_value(p, t).expect("positive node"), &nodes)
}

fn trial_midpoint_h(f: &MonotoneFunction, _d: DimArg, seed: u64) -> Result<f64> {
    let k = MetricKernel::new(*f);
    midpoint_trial(&|t| k.h(t).expect("positive spectrum"), 4, seed)
}

fn trial_chat_joint_convexity(f: &MonotoneFunction, _d: DimArg, seed: u64) -> Result<f64> {
    let k = MetricKernel::new(*f);
    let mut rng = rng_from_seed(seed);
    let mut draw = || 0.05 + 4.95 * rng.gen::<f64>();
    let (x1, y1, x2, y2) = (draw(), draw(), draw(), draw());
    let avg = 0.5 * (k.c_hat(x1, y1)? + k.c_hat(x2, y2)?);
    let mid = k.c_hat(0.5 * (x1 + x2), 0.5 * (y1 + y2))?;
    Ok(avg - mid)
}

// ---------------------------------------------------------------------------
// Suite runner
// ---------------------------------------------------------------------------

fn instance_id(base: &str, dim: DimArg) -> String {
    match dim {
        DimArg::None => base.to_string(),
        DimArg::Single(n) => format!("{base}/d{n}"),
        DimArg::Pair(d) => format!("{base}/{d}"),
    }
}

fn parse_instance(check_id: &str) -> Result<(&str, DimArg)> {
    match check_id.split_once('/') {
        None => Ok((check_id, DimArg::None)),
        Some((base, dim)) => {
            if let Some(n) = dim.strip_prefix('d') {
                let n = n
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad check id {check_id:?}")))?;
                Ok((base, DimArg::Single(n)))
            } else {
                Ok((base, DimArg::Pair(dim.parse()?)))
            }
        }
    }
}

/// Run every applicable check for the configured metrics and dimensions.
/// Failures are data in the reports, not errors.
pub fn run_suite(config: &TrialConfig) -> Result<Vec<CheckReport>> {
    run_selected(config, None)
}

/// Run a subset of checks by base id (`None` runs everything).
pub fn run_selected(config: &TrialConfig, only: Option<&[&str]>) -> Result<Vec<CheckReport>> {
    config.validate()?;
    let metrics: Vec<MonotoneFunction> = config
        .metric_ids
        .iter()
        .map(|&id| MonotoneFunction::new(id))
        .collect::<Result<_>>()?;
    let mut reports = Vec::new();
    for def in REGISTRY {
        if let Some(ids) = only {
            if !ids.contains(&def.id) {
                continue;
            }
        }
        let dims: Vec<DimArg> = match def.scope {
            Scope::Single => config.single_dims.iter().map(|&n| DimArg::Single(n)).collect(),
            Scope::Bipartite => config.bipartite_dims.iter().map(|&d| DimArg::Pair(d)).collect(),
            Scope::ScalarRandom | Scope::ScalarDeterministic => vec![DimArg::None],
        };
        let trials = match def.scope {
            Scope::ScalarDeterministic => 1,
            _ => config.trials_per_check,
        };
        let tol = match def.tol {
            TolKind::Eq => config.tol_eq,
            TolKind::Psd => config.tol_psd,
        };
        for metric in &metrics {
            if !(def.applies)(metric) {
                continue;
            }
            for &dim in &dims {
                let instance = instance_id(def.id, dim);
                let rows: Vec<(u64, f64)> = (0..trials as u64)
                    .into_par_iter()
                    .map(|i| {
                        let s = trial_seed(config.seed, &instance, i);
                        let r = (def.trial)(metric, dim, s).unwrap_or(match def.flavor {
                            Flavor::Slack => f64::NEG_INFINITY,
                            Flavor::Abs => f64::INFINITY,
                        });
                        (s, r)
                    })
                    .collect();
                let mut failures = 0usize;
                let mut worst = match def.flavor {
                    Flavor::Slack => f64::INFINITY,
                    Flavor::Abs => f64::NEG_INFINITY,
                };
                let mut worst_seed = rows[0].0;
                for &(s, r) in &rows {
                    let (fail, is_worse) = match def.flavor {
                        Flavor::Slack => (r < -tol, r < worst),
                        Flavor::Abs => (r > tol, r > worst),
                    };
                    if fail {
                        failures += 1;
                    }
                    if is_worse {
                        worst = r;
                        worst_seed = s;
                    }
                }
                reports.push(CheckReport {
                    check_id: instance,
                    metric_id: metric.id().to_string(),
                    trials,
                    failures,
                    worst_residual: worst,
                    worst_case_seed: worst_seed,
                });
            }
        }
    }
    Ok(reports)
}

/// Re-run a single trial of a check from a report's `worst_case_seed`.
pub fn replay(check_id: &str, metric_id: MetricId, seed: u64) -> Result<f64> {
    let (base, dim) = parse_instance(check_id)?;
    let def = REGISTRY
        .iter()
        .find(|d| d.id == base)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown check {base:?}")))?;
    let metric = MonotoneFunction::new(metric_id)?;
    (def.trial)(&metric, dim, seed)
}
