//! Metric inner products and metric adjusted skew information.
//!
//! In the eigenbasis `ρ = U·diag(λ)·U†` the metric inner product is the
//! spectral sum `K_ρ(A,B) = Σ_{jk} conj(Â_{jk})·c(λ_j,λ_k)·B̂_{jk}` with
//! `Â = U†AU`, and the skew information reduces to
//!
//! ```text
//! I_ρ(A) = (m/2)·Σ_{jk} ĉ(λ_j,λ_k)·|Â_{jk}|²        (regular, m = f(0))
//! I_ρ(A) =       Σ_{jk} ĉ(λ_j,λ_k)·|Â_{jk}|²        (non-regular, unbounded)
//! ```
//!
//! Everything here works from a single eigendecomposition per `(ρ, metric)`
//! pair; the `n²×n²` superoperator is never assembled.

use num_complex::Complex64;

use crate::linalg::{matrix_function, ComplexMatrix, DensityMatrix, HermitianMatrix};
use crate::metric::{MetricId, MetricKernel, MonotoneFunction};
use crate::{Error, Result};

/// Relative rank cutoff: eigenvalues below `1e-12·λ_max` count as zero in
/// the regular branch, where the boundary rules of `ĉ` apply.
const RANK_EPS: f64 = 1e-12;

/// Eigenvalue pairs closer than this route through the exact diagonal rule
/// `ĉ(x,x) = 0`; the omitted contribution is quadratic in the gap.
const DEGENERACY_GAP: f64 = 1e-10;

/// Skew information value together with the branch that produced it.
#[derive(Clone, Debug)]
pub struct SkewResult {
    pub value: f64,
    pub metric_id: MetricId,
    pub regular_branch: bool,
    pub rank_used: usize,
}

/// Eigenbasis of a state with the eigenvalue preprocessing required by the
/// kernel: clamped-to-zero tail for regular metrics, full-rank enforcement
/// for non-regular ones.
pub(crate) struct ChatBasis {
    pub unitary: ComplexMatrix,
    pub eigs: Vec<f64>,
    pub rank: usize,
}

pub(crate) fn chat_basis(rho: &DensityMatrix, k: &MetricKernel) -> Result<ChatBasis> {
    let spec = rho.eigen();
    let n = spec.eigenvalues.len();
    if k.function().is_regular() {
        let lam_max = spec.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
        let cut = RANK_EPS * lam_max;
        let eigs: Vec<f64> = spec
            .eigenvalues
            .iter()
            .map(|&l| if l <= cut { 0.0 } else { l })
            .collect();
        let rank = eigs.iter().filter(|&&l| l > 0.0).count();
        Ok(ChatBasis { unitary: spec.unitary, eigs, rank })
    } else {
        let min = spec.eigenvalues.first().copied().unwrap_or(0.0);
        if min < k.floor() {
            return Err(Error::SingularMetric(format!(
                "non-regular metric {} requires a full-rank state (min eigenvalue {min:.3e} below {:.1e})",
                k.function().id(),
                k.floor()
            )));
        }
        Ok(ChatBasis { unitary: spec.unitary, eigs: spec.eigenvalues, rank: n })
    }
}

/// `ĉ` on an eigenvalue pair, with the near-degenerate diagonal rule.
pub(crate) fn chat_pair(k: &MetricKernel, x: f64, y: f64) -> Result<f64> {
    if (x - y).abs() < DEGENERACY_GAP {
        Ok(0.0)
    } else {
        k.c_hat(x, y)
    }
}

#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    carry: f64,
}

impl Kahan {
    #[inline]
    fn add(&mut self, v: f64) {
        let y = v - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }
}

/// `Σ_{jk} ĉ(λ_j,λ_k)·conj(X̂_{jk})·Ŷ_{jk}` over prepared eigenbasis data.
pub(crate) fn chat_form_prepared(
    k: &MetricKernel,
    eigs: &[f64],
    xh: &ComplexMatrix,
    yh: &ComplexMatrix,
    compensated: bool,
) -> Result<Complex64> {
    let n = eigs.len();
    let (mut re, mut im) = (Kahan::default(), Kahan::default());
    let (mut re_p, mut im_p) = (0.0f64, 0.0f64);
    for j in 0..n {
        for l in 0..n {
            if j == l {
                continue;
            }
            let w = chat_pair(k, eigs[j], eigs[l])?;
            if w == 0.0 {
                continue;
            }
            let term = xh[(j, l)].conj() * yh[(j, l)] * w;
            if compensated {
                re.add(term.re);
                im.add(term.im);
            } else {
                re_p += term.re;
                im_p += term.im;
            }
        }
    }
    if compensated {
        Ok(Complex64::new(re.sum, im.sum))
    } else {
        Ok(Complex64::new(re_p, im_p))
    }
}

fn check_dims(rho: &DensityMatrix, d: usize) -> Result<()> {
    if rho.dim() != d {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: d });
    }
    Ok(())
}

/// The monotone metric `K_ρ(A,B) = Tr A† c(L_ρ,R_ρ) B` for arbitrary
/// linear operators `A`, `B`.
///
/// Non-regular kernels require the full spectrum of `ρ` above the kernel
/// floor. Regular kernels accept rank-deficient states as long as `A`, `B`
/// carry no weight on the kernel-kernel block, where `c` diverges.
pub fn metric_inner(
    rho: &DensityMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    k: &MetricKernel,
) -> Result<Complex64> {
    let n = rho.dim();
    if a.rows() != n || a.cols() != n || b.rows() != n || b.cols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: a.rows() });
    }
    let basis = chat_basis(rho, k)?;
    let ah = basis_transform(&basis.unitary, a);
    let bh = basis_transform(&basis.unitary, b);
    let f0 = k.function().f_at_zero();
    let weight_floor = 1e-14 * (1.0 + a.frobenius_norm()) * (1.0 + b.frobenius_norm());
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..n {
        for l in 0..n {
            let (x, y) = (basis.eigs[j], basis.eigs[l]);
            let w = ah[(j, l)].conj() * bh[(j, l)];
            let c = if x > 0.0 && y > 0.0 {
                k.c(x, y)?
            } else if x > 0.0 {
                1.0 / (x * f0)
            } else if y > 0.0 {
                1.0 / (y * f0)
            } else {
                // c diverges on the kernel-kernel block.
                if w.norm() <= weight_floor {
                    continue;
                }
                return Err(Error::SingularMetric(
                    "operator has weight on the kernel of the state, where the metric diverges"
                        .into(),
                ));
            };
            acc += w * c;
        }
    }
    Ok(acc)
}

fn basis_transform(u: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    &(&u.adjoint() * m) * u
}

/// Metric adjusted skew information of `(ρ, A)` for one catalog entry.
///
/// The regular branch is `(m(c)/2)·Σ ĉ(λ_j,λ_k)|Â_{jk}|²` and extends to
/// rank-deficient states. The non-regular branch drops the prefactor (the
/// unbounded definition carries neither `m(c)` nor `1/2`) and requires a
/// full-rank state.
pub fn skew_information(
    rho: &DensityMatrix,
    a: &HermitianMatrix,
    f: &MonotoneFunction,
) -> Result<SkewResult> {
    skew_information_with(rho, a, f, crate::metric::EIGENVALUE_FLOOR, false)
}

/// Same as [`skew_information`] with an explicit kernel floor and optional
/// compensated summation; used when re-verifying search results.
pub fn skew_information_with(
    rho: &DensityMatrix,
    a: &HermitianMatrix,
    f: &MonotoneFunction,
    floor: f64,
    compensated: bool,
) -> Result<SkewResult> {
    check_dims(rho, a.dim())?;
    let k = MetricKernel::with_floor(*f, floor);
    let basis = chat_basis(rho, &k)?;
    let ah = basis_transform(&basis.unitary, a.matrix());
    let form = chat_form_prepared(&k, &basis.eigs, &ah, &ah, compensated)?;
    let value = match f.metric_constant() {
        Some(m) => 0.5 * m * form.re,
        None => form.re,
    };
    Ok(SkewResult {
        value,
        metric_id: f.id(),
        regular_branch: f.is_regular(),
        rank_used: basis.rank,
    })
}

/// Direct-trace evaluation of the Wigner-Yanase-Dyson information:
/// `−(1/2)·Tr [ρ^p,A]·[ρ^{1−p},A]` for `0<p<1`, and the extension
/// `(−1/(p(1−p)))·Tr [ρ^p,A]·[ρ^{1−p},A]` for `1<p≤2`.
///
/// This goes through matrix powers rather than the spectral `ĉ` sum and is
/// the independent cross-check for [`skew_information`] on `wyd:<p>`.
pub fn wyd_trace_oracle(rho: &DensityMatrix, a: &HermitianMatrix, p: f64) -> Result<f64> {
    check_dims(rho, a.dim())?;
    let dyson = p > 0.0 && p < 1.0;
    let extension = p > 1.0 && p <= 2.0;
    if !dyson && !extension {
        return Err(Error::UnsupportedParameter(format!(
            "trace oracle is defined for p in (0,1) or (1,2], got {p}"
        )));
    }
    let clamp = |t: f64| if t < 0.0 { 0.0 } else { t };
    let rp = matrix_function(rho.hermitian(), |t| clamp(t).powf(p))?;
    let rq = matrix_function(rho.hermitian(), |t| clamp(t).powf(1.0 - p))?;
    let ca = &(rp.matrix() * a.matrix()) - &(a.matrix() * rp.matrix());
    let cb = &(rq.matrix() * a.matrix()) - &(a.matrix() * rq.matrix());
    let tr = (&ca * &cb).trace();
    debug_assert!(tr.im.abs() <= 1e-8 * (1.0 + tr.re.abs()));
    let coefficient = if dyson { -0.5 } else { -1.0 / (p * (1.0 - p)) };
    Ok(coefficient * tr.re)
}
