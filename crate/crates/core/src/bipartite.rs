//! Bipartite constructions: aggregate observables, semi-quantum states,
//! local von Neumann measurements, and the superadditivity quantities.
//!
//! For a state ρ on `H₁⊗H₂` with marginals `ρ₁`, `ρ₂` and local
//! observables `A`, `B`, the central quantity is the gap
//!
//! ```text
//! I_ρ(A⊗1 + 1⊗B) − I_{ρ₁}(A) − I_{ρ₂}(B)
//! ```
//!
//! which is nonnegative for semi-quantum ρ (states invariant under some
//! local von Neumann measurement) and unconstrained in general.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::linalg::{partial_trace, ComplexMatrix, DensityMatrix, HermitianMatrix, Party};
use crate::metric::{MetricKernel, MonotoneFunction};
use crate::skew::{chat_basis, chat_form_prepared, chat_pair, skew_information_with, SkewResult};
use crate::{Error, Result};

/// Dimensions of the two tensor factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BipartiteDims {
    pub n1: usize,
    pub n2: usize,
}

impl BipartiteDims {
    pub fn new(n1: usize, n2: usize) -> Self {
        Self { n1, n2 }
    }

    pub fn total(&self) -> usize {
        self.n1 * self.n2
    }
}

impl fmt::Display for BipartiteDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n1, self.n2)
    }
}

impl FromStr for BipartiteDims {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('x')
            .ok_or_else(|| Error::InvalidArgument(format!("bad bipartite dims {s:?}")))?;
        let n1 = a.parse().map_err(|_| Error::InvalidArgument(format!("bad dims {s:?}")))?;
        let n2 = b.parse().map_err(|_| Error::InvalidArgument(format!("bad dims {s:?}")))?;
        if n1 == 0 || n2 == 0 {
            return Err(Error::InvalidArgument("dims must be positive".into()));
        }
        Ok(Self { n1, n2 })
    }
}

/// Sign of the second term in an aggregate observable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// `A⊗1 ± 1⊗B` on the product space.
pub fn aggregate(a: &HermitianMatrix, b: &HermitianMatrix, sign: Sign) -> HermitianMatrix {
    let left = a.matrix().kron(&ComplexMatrix::identity(b.dim()));
    let right = ComplexMatrix::identity(a.dim()).kron(b.matrix());
    let m = match sign {
        Sign::Plus => &left + &right,
        Sign::Minus => &left - &right,
    };
    HermitianMatrix::symmetrize(m)
}

/// Embed a first-party observable: `A⊗1`.
pub fn embed_first(a: &HermitianMatrix, n2: usize) -> HermitianMatrix {
    HermitianMatrix::symmetrize(a.matrix().kron(&ComplexMatrix::identity(n2)))
}

/// Embed a second-party observable: `1⊗B`.
pub fn embed_second(b: &HermitianMatrix, n1: usize) -> HermitianMatrix {
    HermitianMatrix::symmetrize(ComplexMatrix::identity(n1).kron(b.matrix()))
}

const PROJECTION_TOL: f64 = 1e-11;

/// Check that the given matrices are rank-one orthogonal projections
/// resolving the identity on their space.
fn validate_resolution(projections: &[HermitianMatrix]) -> Result<usize> {
    let m = projections.first().map(|p| p.dim()).unwrap_or(0);
    if m == 0 || projections.len() != m {
        return Err(Error::InvalidArgument(format!(
            "a rank-one resolution of identity on dimension {m} needs exactly {m} projections, got {}",
            projections.len()
        )));
    }
    let mut sum = ComplexMatrix::zeros(m, m);
    for (i, p) in projections.iter().enumerate() {
        if p.dim() != m {
            return Err(Error::DimensionMismatch { expected: m, found: p.dim() });
        }
        if (p.trace() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "projection {i} is not rank-one (trace {})",
                p.trace()
            )));
        }
        for (j, q) in projections.iter().enumerate() {
            let prod = p.matrix() * q.matrix();
            let expect = if i == j { p.matrix().clone() } else { ComplexMatrix::zeros(m, m) };
            if prod.max_abs_diff(&expect) > PROJECTION_TOL {
                return Err(Error::InvalidArgument(format!(
                    "projections {i} and {j} are not orthogonal idempotents"
                )));
            }
        }
        sum = &sum + p.matrix();
    }
    if sum.max_abs_diff(&ComplexMatrix::identity(m)) > PROJECTION_TOL {
        return Err(Error::InvalidArgument("projections do not resolve the identity".into()));
    }
    Ok(m)
}

/// Data of a semi-quantum state `ρ = Σ p_i P_i⊗ρ_i`: a probability vector,
/// a rank-one resolution of identity on the first party, and one
/// second-party state per outcome.
#[derive(Clone, Debug)]
pub struct SemiQuantumSpec {
    probabilities: Vec<f64>,
    projections: Vec<HermitianMatrix>,
    party2_states: Vec<DensityMatrix>,
}

impl SemiQuantumSpec {
    pub fn new(
        probabilities: Vec<f64>,
        projections: Vec<HermitianMatrix>,
        party2_states: Vec<DensityMatrix>,
    ) -> Result<Self> {
        let n1 = validate_resolution(&projections)?;
        if probabilities.len() != n1 || party2_states.len() != n1 {
            return Err(Error::InvalidArgument(format!(
                "need {n1} probabilities and {n1} second-party states"
            )));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 || probabilities.iter().any(|&p| p < -1e-14) {
            return Err(Error::InvalidArgument(
                "probabilities must be nonnegative and sum to 1".into(),
            ));
        }
        let n2 = party2_states[0].dim();
        for s in &party2_states {
            if s.dim() != n2 {
                return Err(Error::DimensionMismatch { expected: n2, found: s.dim() });
            }
        }
        Ok(Self { probabilities, projections, party2_states })
    }

    pub fn dims(&self) -> BipartiteDims {
        BipartiteDims::new(self.projections.len(), self.party2_states[0].dim())
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn projections(&self) -> &[HermitianMatrix] {
        &self.projections
    }

    pub fn party2_states(&self) -> &[DensityMatrix] {
        &self.party2_states
    }
}

/// Assemble the state `ρ = Σ p_i P_i⊗ρ_i`.
pub fn semi_quantum_state(spec: &SemiQuantumSpec) -> DensityMatrix {
    let d = spec.dims();
    let mut acc = ComplexMatrix::zeros(d.total(), d.total());
    for ((p, proj), state) in spec
        .probabilities
        .iter()
        .zip(&spec.projections)
        .zip(&spec.party2_states)
    {
        acc = &acc + &proj.matrix().kron(state.matrix()).scale_re(*p);
    }
    DensityMatrix::from_trusted(HermitianMatrix::symmetrize(acc))
}

/// Local von Neumann measurement `P(ρ) = Σ (P_i⊗1)ρ(P_i⊗1)` of the chosen
/// party (the projections act on that party's space).
pub fn local_measurement(
    rho: &DensityMatrix,
    projections: &[HermitianMatrix],
    party: Party,
) -> Result<DensityMatrix> {
    let m = validate_resolution(projections)?;
    let n = rho.dim();
    if !n.is_multiple_of(m) {
        return Err(Error::DimensionMismatch { expected: m, found: n });
    }
    let other = n / m;
    let mut acc = ComplexMatrix::zeros(n, n);
    for p in projections {
        let full = match party {
            Party::One => p.matrix().kron(&ComplexMatrix::identity(other)),
            Party::Two => ComplexMatrix::identity(other).kron(p.matrix()),
        };
        acc = &acc + &(&(&full * rho.matrix()) * &full);
    }
    Ok(DensityMatrix::from_trusted(HermitianMatrix::symmetrize(acc)))
}

/// Whether `ρ` is invariant under the given local measurement:
/// `‖P(ρ) − ρ‖_F ≤ tol`.
pub fn is_semi_quantum(
    rho: &DensityMatrix,
    projections: &[HermitianMatrix],
    party: Party,
    tol: f64,
) -> Result<bool> {
    let measured = local_measurement(rho, projections, party)?;
    Ok((measured.matrix() - rho.matrix()).frobenius_norm() <= tol)
}

fn check_bipartite(rho: &DensityMatrix, a: &HermitianMatrix, b: &HermitianMatrix, dims: BipartiteDims) -> Result<()> {
    if rho.dim() != dims.total() {
        return Err(Error::DimensionMismatch { expected: dims.total(), found: rho.dim() });
    }
    if a.dim() != dims.n1 {
        return Err(Error::DimensionMismatch { expected: dims.n1, found: a.dim() });
    }
    if b.dim() != dims.n2 {
        return Err(Error::DimensionMismatch { expected: dims.n2, found: b.dim() });
    }
    Ok(())
}

/// `I_ρ(A⊗1+1⊗B) − I_{ρ₁}(A) − I_{ρ₂}(B)`.
pub fn superadditivity_gap(
    rho: &DensityMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    dims: BipartiteDims,
    f: &MonotoneFunction,
) -> Result<f64> {
    superadditivity_gap_with(rho, a, b, dims, f, crate::metric::EIGENVALUE_FLOOR, false)
}

/// Gap evaluation with explicit kernel floor and optional compensated
/// summation (the re-verification path of the searcher).
pub fn superadditivity_gap_with(
    rho: &DensityMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    dims: BipartiteDims,
    f: &MonotoneFunction,
    floor: f64,
    compensated: bool,
) -> Result<f64> {
    check_bipartite(rho, a, b, dims)?;
    let whole = skew_information_with(rho, &aggregate(a, b, Sign::Plus), f, floor, compensated)?;
    let rho1 = partial_trace(rho, dims.n1, dims.n2, Party::One)?;
    let rho2 = partial_trace(rho, dims.n1, dims.n2, Party::Two)?;
    let part1 = skew_information_with(&rho1, a, f, floor, compensated)?;
    let part2 = skew_information_with(&rho2, b, f, floor, compensated)?;
    Ok(whole.value - part1.value - part2.value)
}

/// The cross term `K_ρ(i[ρ,A⊗1], i[ρ,1⊗B]) = Tr (A⊗1)·ĉ(L_ρ,R_ρ)·(1⊗B)`,
/// evaluated as a spectral `ĉ` sum in the eigenbasis of ρ. Vanishes on
/// semi-quantum states.
pub fn cross_term(
    rho: &DensityMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    dims: BipartiteDims,
    f: &MonotoneFunction,
) -> Result<f64> {
    check_bipartite(rho, a, b, dims)?;
    let k = MetricKernel::new(*f);
    let basis = chat_basis(rho, &k)?;
    let xh = basis_transform(&basis.unitary, embed_first(a, dims.n2).matrix());
    let yh = basis_transform(&basis.unitary, embed_second(b, dims.n1).matrix());
    let v = chat_form_prepared(&k, &basis.eigs, &xh, &yh, false)?;
    debug_assert!(v.im.abs() <= 1e-11 * (1.0 + v.re.abs()));
    Ok(v.re)
}

fn basis_transform(u: &ComplexMatrix, m: &ComplexMatrix) -> ComplexMatrix {
    &(&u.adjoint() * m) * u
}

/// The cross term computed from the semi-quantum data itself, mirroring
/// the spectral-resolution reduction: with `ρ_i = Σ_j λ_ij Q_ij`,
///
/// ```text
/// Σ_{i;j,j'} ĉ(p_i·λ_ij, p_i·λ_ij')·Tr(A P_i)·Tr(Q_ij B Q_ij')
/// ```
///
/// The projector sandwich `Tr(Q_ij B Q_ij')` is evaluated literally, so
/// this is an independent code path from the eigenbasis formula above.
pub fn cross_term_semi_quantum(
    spec: &SemiQuantumSpec,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    f: &MonotoneFunction,
) -> Result<f64> {
    let dims = spec.dims();
    if a.dim() != dims.n1 || b.dim() != dims.n2 {
        return Err(Error::DimensionMismatch { expected: dims.n1, found: a.dim() });
    }
    let k = MetricKernel::new(*f);
    let mut acc = Complex64::new(0.0, 0.0);
    for ((p, proj), state) in spec
        .probabilities
        .iter()
        .zip(&spec.projections)
        .zip(&spec.party2_states)
    {
        let a_weight = (a.matrix() * proj.matrix()).trace().re;
        let sp = state.eigen();
        let n2 = dims.n2;
        let projectors: Vec<ComplexMatrix> = (0..n2)
            .map(|j| {
                let col = sp.unitary.column(j);
                ComplexMatrix::outer(&col, &col)
            })
            .collect();
        for j in 0..n2 {
            for j2 in 0..n2 {
                let x = clamp_zero(p * sp.eigenvalues[j]);
                let y = clamp_zero(p * sp.eigenvalues[j2]);
                let w = chat_pair(&k, x, y)?;
                if w == 0.0 {
                    continue;
                }
                let sandwich = (&(&projectors[j] * b.matrix()) * &projectors[j2]).trace();
                acc += sandwich * (w * a_weight);
            }
        }
    }
    debug_assert!(acc.im.abs() <= 1e-11 * (1.0 + acc.re.abs()));
    Ok(acc.re)
}

fn clamp_zero(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else {
        x
    }
}

/// Residual of the parallelogram identity
/// `I(X⁺) + I(X⁻) = 2(I(A⊗1) + I(1⊗B))`, as `|LHS − RHS|`.
pub fn parallelogram_residual(
    rho: &DensityMatrix,
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    dims: BipartiteDims,
    f: &MonotoneFunction,
) -> Result<f64> {
    check_bipartite(rho, a, b, dims)?;
    let value = |obs: &HermitianMatrix| -> Result<f64> {
        Ok(crate::skew::skew_information(rho, obs, f)?.value)
    };
    let lhs = value(&aggregate(a, b, Sign::Plus))? + value(&aggregate(a, b, Sign::Minus))?;
    let rhs = 2.0 * (value(&embed_first(a, dims.n2))? + value(&embed_second(b, dims.n1))?);
    Ok((lhs - rhs).abs())
}

/// Skew information of an embedded first-party observable, `I_ρ(A⊗1)`.
pub fn lieb_gap(
    rho: &DensityMatrix,
    a: &HermitianMatrix,
    dims: BipartiteDims,
    f: &MonotoneFunction,
) -> Result<f64> {
    if rho.dim() != dims.total() || a.dim() != dims.n1 {
        return Err(Error::DimensionMismatch { expected: dims.total(), found: rho.dim() });
    }
    let whole: SkewResult = crate::skew::skew_information(rho, &embed_first(a, dims.n2), f)?;
    let rho1 = partial_trace(rho, dims.n1, dims.n2, Party::One)?;
    let part = crate::skew::skew_information(&rho1, a, f)?;
    Ok(whole.value - part.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checker::{random_density, random_observable, random_semi_quantum};
    use crate::linalg::{partial_trace_matrix, pauli_x, pauli_z};
    use approx::assert_abs_diff_eq;

    fn func(id: &str) -> MonotoneFunction {
        MonotoneFunction::parse(id).unwrap()
    }

    fn bell_state() -> DensityMatrix {
        let mut m = ComplexMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[(i, j)] = Complex64::new(0.5, 0.0);
        }
        DensityMatrix::new(HermitianMatrix::new(m).unwrap()).unwrap()
    }

    fn computational_projections(n: usize) -> Vec<HermitianMatrix> {
        (0..n)
            .map(|i| {
                let mut d = vec![0.0; n];
                d[i] = 1.0;
                HermitianMatrix::from_real_diagonal(&d)
            })
            .collect()
    }

    fn plus_state() -> DensityMatrix {
        let mut m = ComplexMatrix::zeros(2, 2);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = Complex64::new(0.5, 0.0);
            }
        }
        DensityMatrix::new(HermitianMatrix::new(m).unwrap()).unwrap()
    }

    #[test]
    fn aggregate_values() {
        let z = pauli_z();
        let agg = aggregate(&z, &z, Sign::Plus);
        let expected = ComplexMatrix::real_diagonal(&[2.0, 0.0, 0.0, -2.0]);
        assert!(agg.matrix().max_abs_diff(&expected) <= 1e-15);

        let zero = HermitianMatrix::zeros(2);
        let only_b = aggregate(&zero, &pauli_x(), Sign::Plus);
        assert!(only_b
            .matrix()
            .max_abs_diff(embed_second(&pauli_x(), 2).matrix())
            <= 1e-15);

        let a = random_observable(2, 1);
        let b = random_observable(3, 2);
        let plus = aggregate(&a, &b, Sign::Plus);
        let minus = aggregate(&a, &b, Sign::Minus);
        let sum = plus.matrix() + minus.matrix();
        assert!(sum.max_abs_diff(&embed_first(&a, 3).matrix().scale_re(2.0)) <= 1e-14);
    }

    #[test]
    fn semi_quantum_spec_validation() {
        // A single projection is not a resolution of identity on dim 2.
        let p0 = computational_projections(2).remove(0);
        let err = SemiQuantumSpec::new(vec![1.0], vec![p0], vec![plus_state()]);
        assert!(err.is_err());

        // Degenerate distribution gives a product state.
        let spec = SemiQuantumSpec::new(
            vec![1.0, 0.0],
            computational_projections(2),
            vec![plus_state(), plus_state()],
        )
        .unwrap();
        let rho = semi_quantum_state(&spec);
        let expected = computational_projections(2)[0].matrix().kron(plus_state().matrix());
        assert!(rho.matrix().max_abs_diff(&expected) <= 1e-14);
    }

    #[test]
    fn semi_quantum_state_is_measurement_invariant() {
        let zero = DensityMatrix::new(HermitianMatrix::from_real_diagonal(&[1.0, 0.0])).unwrap();
        let spec = SemiQuantumSpec::new(
            vec![0.5, 0.5],
            computational_projections(2),
            vec![zero, plus_state()],
        )
        .unwrap();
        let rho = semi_quantum_state(&spec);
        let measured = local_measurement(&rho, spec.projections(), Party::One).unwrap();
        assert!(measured.matrix().max_abs_diff(rho.matrix()) <= 1e-12);
        assert!(is_semi_quantum(&rho, spec.projections(), Party::One, 1e-10).unwrap());
    }

    #[test]
    fn local_measurement_cases() {
        // Diagonal states are invariant under computational measurement.
        let rho = DensityMatrix::new(HermitianMatrix::from_real_diagonal(&[0.4, 0.1, 0.3, 0.2]))
            .unwrap();
        let measured = local_measurement(&rho, &computational_projections(2), Party::One).unwrap();
        assert!(measured.matrix().max_abs_diff(rho.matrix()) <= 1e-14);

        // The Bell state collapses to an even classical mixture.
        let collapsed = local_measurement(&bell_state(), &computational_projections(2), Party::One).unwrap();
        let expected = ComplexMatrix::real_diagonal(&[0.5, 0.0, 0.0, 0.5]);
        assert!(collapsed.matrix().max_abs_diff(&expected) <= 1e-14);

        // Idempotent, trace preserving.
        let rho = random_density(6, 0.0, 9);
        let once = local_measurement(&rho, &computational_projections(3), Party::Two).unwrap();
        let twice = local_measurement(&once, &computational_projections(3), Party::Two).unwrap();
        assert!(once.matrix().max_abs_diff(twice.matrix()) <= 1e-11);
        assert_abs_diff_eq!(once.matrix().trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn is_semi_quantum_judgements() {
        assert!(!is_semi_quantum(&bell_state(), &computational_projections(2), Party::One, 1e-10).unwrap());
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!(is_semi_quantum(&mixed, &computational_projections(2), Party::One, 1e-12).unwrap());
    }

    #[test]
    fn partial_trace_commutator_identities() {
        let dims = BipartiteDims::new(2, 3);
        let rho = random_density(6, 0.0, 31);
        let a = random_observable(2, 32);
        let b = random_observable(3, 33);

        // Tr₂ i[ρ, A⊗1] = i[ρ₁, A]
        let big = crate::linalg::commutator_i(&rho, &embed_first(&a, 3)).unwrap();
        let reduced = partial_trace_matrix(big.matrix(), dims.n1, dims.n2, Party::One).unwrap();
        let rho1 = partial_trace(&rho, dims.n1, dims.n2, Party::One).unwrap();
        let small = crate::linalg::commutator_i(&rho1, &a).unwrap();
        assert!(reduced.max_abs_diff(small.matrix()) <= 1e-11);

        // Tr₂ [ρ, 1⊗B] = 0
        let e2 = embed_second(&b, 2);
        let comm = &(rho.matrix() * e2.matrix()) - &(e2.matrix() * rho.matrix());
        let reduced = partial_trace_matrix(&comm, dims.n1, dims.n2, Party::One).unwrap();
        assert!(reduced.max_abs_entry() <= 1e-12);
    }

    #[test]
    fn gap_vanishes_on_product_states() {
        let dims = BipartiteDims::new(2, 3);
        let r1 = random_density(2, 0.0, 41);
        let r2 = random_density(3, 0.0, 42);
        let rho = DensityMatrix::from_trusted(HermitianMatrix::symmetrize(
            r1.matrix().kron(r2.matrix()),
        ));
        let a = random_observable(2, 43);
        let b = random_observable(3, 44);
        for id in ["wyd:0.5", "bures"] {
            let gap = superadditivity_gap(&rho, &a, &b, dims, &func(id)).unwrap();
            assert_abs_diff_eq!(gap, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn gap_nonnegative_on_semi_quantum_states() {
        for seed in 0..10u64 {
            let (spec, rho) = random_semi_quantum(BipartiteDims::new(2, 3), 0.0, 0.0, seed);
            let a = random_observable(2, 1000 + seed);
            let b = random_observable(3, 2000 + seed);
            let gap = superadditivity_gap(&rho, &a, &b, spec.dims(), &func("wyd:0.5")).unwrap();
            assert!(gap >= -1e-9, "seed {seed}: {gap}");
        }
    }

    #[test]
    fn cross_term_vanishes_for_semi_quantum() {
        for id in ["wyd:0.5", "wyd:0.25", "bures"] {
            for seed in 0..5u64 {
                let (spec, rho) = random_semi_quantum(BipartiteDims::new(2, 2), 0.0, 0.0, 7 + seed);
                let a = random_observable(2, 300 + seed);
                let b = random_observable(2, 400 + seed);
                let ct = cross_term(&rho, &a, &b, spec.dims(), &func(id)).unwrap();
                assert!(ct.abs() <= 1e-10, "{id} seed {seed}: {ct}");
                let ct2 = cross_term_semi_quantum(&spec, &a, &b, &func(id)).unwrap();
                assert!(ct2.abs() <= 1e-10, "{id} seed {seed} (reduction): {ct2}");
                assert!((ct - ct2).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn cross_term_vanishes_on_product_states() {
        let dims = BipartiteDims::new(2, 3);
        let r1 = random_density(2, 1e-3, 45);
        let r2 = random_density(3, 1e-3, 46);
        let rho = DensityMatrix::from_trusted(HermitianMatrix::symmetrize(
            r1.matrix().kron(r2.matrix()),
        ));
        let a = random_observable(2, 47);
        let b = random_observable(3, 48);
        for id in ["wyd:0.5", "kubo", "bures"] {
            let ct = cross_term(&rho, &a, &b, dims, &func(id)).unwrap();
            assert!(ct.abs() <= 1e-10, "{id}: {ct}");
        }
    }

    #[test]
    fn cross_term_two_paths_agree_on_generic_state() {
        // 0.9·Bell + 0.1·I/4 is entangled and full rank; the spectral-sum
        // value must match the raw metric inner product of commutators.
        let rho = DensityMatrix::mixture(&[(0.9, &bell_state()), (0.1, &DensityMatrix::maximally_mixed(4))])
            .unwrap();
        let dims = BipartiteDims::new(2, 2);
        let f = func("wyd:0.5");
        let ct = cross_term(&rho, &pauli_z(), &pauli_z(), dims, &f).unwrap();
        let k = MetricKernel::new(f);
        let x = crate::linalg::commutator_i(&rho, &embed_first(&pauli_z(), 2)).unwrap();
        let y = crate::linalg::commutator_i(&rho, &embed_second(&pauli_z(), 2)).unwrap();
        let raw = crate::skew::metric_inner(&rho, x.matrix(), y.matrix(), &k).unwrap();
        assert!((ct - raw.re).abs() <= 1e-10, "{ct} vs {}", raw.re);
        assert!(ct.abs() > 1e-6, "cross term should be visible here: {ct}");
    }

    #[test]
    fn parallelogram_identity_holds() {
        let dims = BipartiteDims::new(2, 3);
        let rho = random_density(6, 1e-4, 51);
        let a = random_observable(2, 52);
        let b = random_observable(3, 53);
        for id in ["wyd:0.5", "kubo", "bures"] {
            let f = func(id);
            let res = parallelogram_residual(&rho, &a, &b, dims, &f).unwrap();
            let rhs = 2.0
                * (crate::skew::skew_information(&rho, &embed_first(&a, 3), &f).unwrap().value
                    + crate::skew::skew_information(&rho, &embed_second(&b, 2), &f).unwrap().value);
            assert!(res <= 1e-9 * (1.0 + rhs), "{id}: {res}");
        }
        // B = 0 makes X⁺ = X⁻; the residual collapses entirely.
        let res = parallelogram_residual(&rho, &a, &HermitianMatrix::zeros(3), dims, &func("wyd:0.5")).unwrap();
        assert!(res <= 1e-12);
    }

    #[test]
    fn lieb_gap_nonnegative() {
        let dims = BipartiteDims::new(2, 2);
        for seed in 0..10u64 {
            let rho = random_density(4, 0.0, 60 + seed);
            let a = random_observable(2, 80 + seed);
            let gap = lieb_gap(&rho, &a, dims, &func("wyd:0.5")).unwrap();
            assert!(gap >= -1e-9, "seed {seed}: {gap}");
        }
    }

    #[test]
    fn dims_parse_round_trip() {
        let d: BipartiteDims = "2x3".parse().unwrap();
        assert_eq!(d, BipartiteDims::new(2, 3));
        assert_eq!(d.to_string(), "2x3");
        assert!("2y3".parse::<BipartiteDims>().is_err());
        assert!("0x3".parse::<BipartiteDims>().is_err());
    }
}
