//! Separability tests: the support/trace lemma, the analytic rank-2
//! characterization, the anti-parallel eigenvalue test for two qubits, a PPT
//! oracle, and the convex feasibility solver.

mod feasibility;

pub use feasibility::{
    feasibility_solve, FeasibilityOutcome, FeasibilityProblem, FeasiblePoint, SolveDiagnostics,
};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, partial_transpose_parties, psd_check, vector, ComplexMatrix, PsdStatus, C64};
use crate::states::{coeff_matrix, concurrence, det2, PureState, StateSpace};
use crate::tensor_rank::{factorize, products_in_span, ProductVector, SpanProducts};
use crate::tol::tolerances;

/// Mixing weights at or below this count as zero in the rank-2 analysis.
pub const LAMBDA_ZERO: f64 = 1e-12;

/// Relative size of the off-diagonal term tolerated in the rank-2 case iii test.
pub const CROSS_TERM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SepStatus {
    Separable,
    Entangled,
    Undecided,
}

/// `weight · |v⟩⟨v|` with `v = vector.tensor()` of unit norm.
#[derive(Debug, Clone)]
pub struct ProductTerm {
    pub weight: f64,
    pub vector: ProductVector,
}

#[derive(Debug, Clone, Default)]
pub struct ProductDecomposition {
    pub terms: Vec<ProductTerm>,
}

impl ProductDecomposition {
    /// Adds `w·|v⟩⟨v|` for an arbitrary nonzero product vector `v`.
    pub fn push(&mut self, w: f64, v: &ProductVector) {
        let c = v.canonical();
        let n2 = c.weight.re * c.weight.re;
        self.terms.push(ProductTerm { weight: w * n2, vector: ProductVector { weight: C64::new(1.0, 0.0), ..c } });
    }

    pub fn reassemble(&self, dim: usize) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(dim, dim);
        for t in &self.terms {
            out += &ComplexMatrix::projector(&t.vector.tensor()).scale_real(t.weight);
        }
        out
    }

    /// Frobenius distance to `rho` relative to `max(1, ‖rho‖)`.
    pub fn relative_error(&self, rho: &ComplexMatrix) -> f64 {
        self.reassemble(rho.rows()).frobenius_distance(rho) / rho.frobenius_norm().max(1.0)
    }
}

#[derive(Debug, Clone)]
pub enum Evidence {
    Decomposition(ProductDecomposition),
    /// Positive partial transpose in a space where PPT implies separability.
    PptExact,
    PartialTransposeWitness { parties: Vec<usize>, eigenvalue: f64, eigenvector: Vec<C64> },
    /// Support-based argument (no product decomposition of the support exists).
    SupportWitness(String),
    Inconclusive(String),
}

#[derive(Debug, Clone)]
pub struct SeparabilityVerdict {
    pub status: SepStatus,
    pub evidence: Evidence,
}

impl SeparabilityVerdict {
    fn separable(d: ProductDecomposition) -> Self {
        Self { status: SepStatus::Separable, evidence: Evidence::Decomposition(d) }
    }

    fn entangled(why: impl Into<String>) -> Self {
        Self { status: SepStatus::Entangled, evidence: Evidence::SupportWitness(why.into()) }
    }

    fn undecided(why: impl Into<String>) -> Self {
        Self { status: SepStatus::Undecided, evidence: Evidence::Inconclusive(why.into()) }
    }

    pub fn is_separable(&self) -> bool {
        self.status == SepStatus::Separable
    }

    pub fn decomposition(&self) -> Option<&ProductDecomposition> {
        match &self.evidence {
            Evidence::Decomposition(d) => Some(d),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Lemma1Outcome {
    /// `tr(Eρ) = 1` and `E − P ⪰ 0`.
    HoldsBothWays { trace: f64 },
    /// Both sides fail together.
    Violation { trace: f64, min_eigenvalue: f64 },
    /// Exactly one side holds; the lemma says this cannot happen.
    Inconsistent { trace: f64, min_eigenvalue: f64 },
}

/// Checks `tr(Eρ) = 1 ⟺ E − P ⪰ 0` for the support projector `P` of `rho`.
pub fn lemma1_check(e: &ComplexMatrix, rho: &ComplexMatrix) -> Result<Lemma1Outcome> {
    let tol = tolerances();
    if e.rows() != rho.rows() || !e.is_square() || !rho.is_square() {
        return Err(Error::DimensionMismatch("E and rho must be square of equal size".into()));
    }
    let n = e.rows();
    if let PsdStatus::NotPsd { min_eigenvalue } = psd_check(e, tol.psd)? {
        return Err(Error::PreconditionViolated(format!("E not PSD (min eigenvalue {min_eigenvalue:e})")));
    }
    if let PsdStatus::NotPsd { min_eigenvalue } = psd_check(&(&ComplexMatrix::identity(n) - e), tol.psd)? {
        return Err(Error::PreconditionViolated(format!("E exceeds I (I−E min eigenvalue {min_eigenvalue:e})")));
    }
    let eig = hermitian_eig(rho)?;
    if eig.min() < -tol.psd || (rho.trace().re - 1.0).abs() > 1e-9 {
        return Err(Error::PreconditionViolated("rho is not a density matrix".into()));
    }
    let cutoff = tol.rank * eig.max();
    let support = eig.reconstruct_with(|x| if x > cutoff { 1.0 } else { 0.0 });
    let trace = e.trace_product(rho).re;
    let min_eigenvalue = hermitian_eig(&(e - &support))?.min();
    let trace_side = (trace - 1.0).abs() <= 1e-9;
    let op_side = min_eigenvalue >= -tol.psd;
    Ok(match (trace_side, op_side) {
        (true, true) => Lemma1Outcome::HoldsBothWays { trace },
        (false, false) => Lemma1Outcome::Violation { trace, min_eigenvalue },
        _ => Lemma1Outcome::Inconsistent { trace, min_eigenvalue },
    })
}

/// Which branch of the rank-2 characterization decided the question.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lemma4Case {
    /// Both states are products.
    I,
    /// `ψ` product and `λ = 0`.
    II,
    /// Both entangled, `ρ` a mixture of the two product vectors of the span.
    III,
    Entangled,
    /// Numerical inconsistency in the span analysis.
    Undecided,
}

#[derive(Debug, Clone)]
pub struct Rank2Verdict {
    pub verdict: SeparabilityVerdict,
    pub case: Lemma4Case,
}

/// Coordinates `(α, β)` with `v = α·a + β·b`.
fn span_coords(a: &[C64], b: &[C64], v: &[C64]) -> (C64, C64) {
    let g11 = vector::inner(a, a);
    let g12 = vector::inner(a, b);
    let g22 = vector::inner(b, b);
    let r1 = vector::inner(a, v);
    let r2 = vector::inner(b, v);
    let det = g11 * g22 - g12 * g12.conj();
    ((g22 * r1 - g12 * r2) / det, (g11 * r2 - g12.conj() * r1) / det)
}

/// The product pair `(a, b)` of `span{ψ, φ}` with `ψ = αa + βb`, `φ = γa + δb`.
struct SpanPair {
    a: ProductVector,
    b: ProductVector,
    alpha: C64,
    beta: C64,
    gamma: C64,
    delta: C64,
}

fn span_pair(psi: &PureState, phi: &PureState) -> std::result::Result<SpanPair, String> {
    match products_in_span(psi.amplitudes(), phi.amplitudes(), psi.dims()) {
        Ok(SpanProducts::Finite(found)) if found.len() == 2 => {
            let (ta, tb) = (found[0].tensor(), found[1].tensor());
            let (alpha, beta) = span_coords(&ta, &tb, psi.amplitudes());
            let (gamma, delta) = span_coords(&ta, &tb, phi.amplitudes());
            let [a, b]: [ProductVector; 2] = found.try_into().expect("two vectors");
            Ok(SpanPair { a, b, alpha, beta, gamma, delta })
        }
        Ok(SpanProducts::Finite(found)) => Err(format!("span contains {} product vector(s)", found.len())),
        Ok(SpanProducts::InfinitelyMany) => Err("span is entirely product".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Exact separability of `ρ(λ) = |ψ⟩⟨ψ| + λ|φ⟩⟨φ|` for orthogonal unit `ψ, φ`.
pub fn rank2_separability(psi: &PureState, phi: &PureState, lambda: f64) -> Rank2Verdict {
    let tol = tolerances().rank;
    let fa = factorize(psi.amplitudes(), psi.dims(), tol);
    let fb = factorize(phi.amplitudes(), phi.dims(), tol);
    let lambda = lambda.max(0.0);
    let done = |verdict, case| Rank2Verdict { verdict, case };
    match (&fa, &fb) {
        (Some(a), Some(b)) => {
            let mut d = ProductDecomposition::default();
            d.push(1.0, a);
            if lambda > 0.0 {
                d.push(lambda, b);
            }
            return done(SeparabilityVerdict::separable(d), Lemma4Case::I);
        }
        (Some(a), None) if lambda <= LAMBDA_ZERO => {
            let mut d = ProductDecomposition::default();
            d.push(1.0, a);
            return done(SeparabilityVerdict::separable(d), Lemma4Case::II);
        }
        (None, _) if lambda <= LAMBDA_ZERO => {
            return done(SeparabilityVerdict::entangled("pure entangled state"), Lemma4Case::Entangled);
        }
        (Some(_), None) | (None, Some(_)) => {
            return done(
                SeparabilityVerdict::entangled("mixture of a product and an entangled state with positive weight"),
                Lemma4Case::Entangled,
            );
        }
        (None, None) => {}
    }
    if psi.inner(phi).norm() >= 1.0 - 1e-9 {
        return done(SeparabilityVerdict::entangled("parallel entangled states"), Lemma4Case::Entangled);
    }
    let p = match span_pair(psi, phi) {
        Ok(p) => p,
        Err(why) if why.contains("entirely product") => {
            return done(SeparabilityVerdict::undecided(why), Lemma4Case::Undecided);
        }
        Err(why) => return done(SeparabilityVerdict::entangled(why), Lemma4Case::Entangled),
    };
    let cross = p.alpha * p.beta.conj() + p.gamma * p.delta.conj() * lambda;
    let scale = (p.alpha * p.beta).norm() + lambda * (p.gamma * p.delta).norm();
    if cross.norm() > CROSS_TERM_TOL * scale {
        return done(
            SeparabilityVerdict::entangled(format!("off-diagonal term {:.3e} between the span's product vectors", cross.norm())),
            Lemma4Case::Entangled,
        );
    }
    let mut d = ProductDecomposition::default();
    d.push(p.alpha.norm_sqr() + lambda * p.gamma.norm_sqr(), &p.a);
    d.push(p.beta.norm_sqr() + lambda * p.delta.norm_sqr(), &p.b);
    done(SeparabilityVerdict::separable(d), Lemma4Case::III)
}

/// The unique `λ > 0` making `ρ(λ)` separable when both states are entangled,
/// read off from the vanishing of the off-diagonal term.
pub fn required_lambda(psi: &PureState, phi: &PureState) -> Option<f64> {
    let p = span_pair(psi, phi).ok()?;
    let num = -(p.alpha * p.beta.conj());
    let den = p.gamma * p.delta.conj();
    if den.norm() == 0.0 {
        return None;
    }
    let l = num / den;
    (l.re > 0.0 && l.im.abs() <= 1e-8 * l.norm()).then_some(l.re)
}

#[derive(Debug, Clone, PartialEq)]
pub enum AntiparallelOutcome {
    Pass { lambda_star: f64, eigenvalues: [C64; 2] },
    Fail { reason: String, eigenvalues: [C64; 2] },
}

impl AntiparallelOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, Self::Pass { .. })
    }
}

/// Eigenvalues of a 2×2 complex matrix, larger modulus first.
pub fn eig2(m: &ComplexMatrix) -> [C64; 2] {
    let t = m[(0, 0)] + m[(1, 1)];
    let d = det2(m);
    let s = (t * t - d * 4.0).sqrt();
    let s = if (t.conj() * s).re >= 0.0 { s } else { -s };
    let mu1 = (t + s) * 0.5;
    if mu1.norm() == 0.0 {
        return [mu1, mu1];
    }
    [mu1, d / mu1]
}

/// Two-qubit test: `Ψ Φ⁻¹` (coefficient matrices) must have anti-parallel
/// eigenvalues; on success `λ* = C(ψ)/C(φ)`.
pub fn antiparallel_test(psi: &PureState, phi: &PureState) -> Result<AntiparallelOutcome> {
    let mp = coeff_matrix(psi)?;
    let mf = coeff_matrix(phi)?;
    let det = det2(&mf);
    if det.norm() <= 1e-12 {
        return Err(Error::PhiProduct);
    }
    let inv = ComplexMatrix::from_rows(&[vec![mf[(1, 1)], -mf[(0, 1)]], vec![-mf[(1, 0)], mf[(0, 0)]]])
        .scale(C64::new(1.0, 0.0) / det);
    let mu = eig2(&mp.matmul(&inv));
    if mu[1].norm() <= 1e-12 * mu[0].norm().max(1e-300) {
        return Ok(AntiparallelOutcome::Fail { reason: "ψ is a product state (zero eigenvalue)".into(), eigenvalues: mu });
    }
    let angle = (-mu[0] / mu[1]).arg().abs();
    if angle < tolerances().antiparallel_angle {
        let lambda_star = concurrence(psi)? / concurrence(phi)?;
        Ok(AntiparallelOutcome::Pass { lambda_star, eigenvalues: mu })
    } else {
        Ok(AntiparallelOutcome::Fail {
            reason: format!("eigenvalue ratio off the negative axis by {angle:.3e} rad"),
            eigenvalues: mu,
        })
    }
}

/// Which partial transposes the PPT oracle inspects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cut {
    Parties(Vec<usize>),
    AllBipartitions,
}

impl Cut {
    fn resolve(&self, space: &StateSpace) -> Vec<Vec<usize>> {
        match self {
            Cut::Parties(p) => vec![p.clone()],
            Cut::AllBipartitions => space.bipartitions(),
        }
    }
}

/// PPT-based separability oracle. Rank ≤ 2 operators are decided exactly by
/// the analytic rank-2 test; otherwise PPT is conclusive only in 2⊗2 and 2⊗3.
pub fn ppt_oracle(rho: &ComplexMatrix, space: &StateSpace, cut: &Cut) -> Result<SeparabilityVerdict> {
    if !rho.is_square() || rho.rows() != space.dim() {
        return Err(Error::DimensionMismatch(format!("{}x{} operator on dims {:?}", rho.rows(), rho.cols(), space.dims())));
    }
    let tol = tolerances();
    let eig = hermitian_eig(rho)?;
    let scale = eig.max().abs().max(1.0);
    if eig.min() < -tol.psd * scale {
        return Err(Error::NotPsd(eig.min()));
    }
    for parties in cut.resolve(space) {
        let pt = hermitian_eig(&partial_transpose_parties(rho, space.dims(), &parties)?)?;
        if pt.min() < -tol.psd * scale {
            return Ok(SeparabilityVerdict {
                status: SepStatus::Entangled,
                evidence: Evidence::PartialTransposeWitness { parties, eigenvalue: pt.min(), eigenvector: pt.vector(0) },
            });
        }
    }
    let cutoff = tol.rank * eig.max();
    let support: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&i| eig.eigenvalues[i] > cutoff).collect();
    if support.len() <= 2 {
        return Ok(low_rank_verdict(&eig, &support, space));
    }
    if space.ppt_is_exact() && cut.resolve(space).len() == 1 {
        return Ok(SeparabilityVerdict { status: SepStatus::Separable, evidence: Evidence::PptExact });
    }
    Ok(SeparabilityVerdict::undecided(format!(
        "PPT, rank {} on dims {:?}: no exact criterion",
        support.len(),
        space.dims()
    )))
}

fn low_rank_verdict(eig: &crate::linalg::EigenResult, support: &[usize], space: &StateSpace) -> SeparabilityVerdict {
    let state = |i: usize| PureState::normalized(space.clone(), eig.vector(i)).expect("eigenvector");
    match support {
        [] => SeparabilityVerdict::separable(ProductDecomposition::default()),
        [i] => {
            let s = state(*i);
            match factorize(s.amplitudes(), space.dims(), tolerances().rank) {
                Some(p) => {
                    let mut d = ProductDecomposition::default();
                    d.push(eig.eigenvalues[*i], &p);
                    SeparabilityVerdict::separable(d)
                }
                None => SeparabilityVerdict::entangled("rank-1 entangled operator"),
            }
        }
        [i, j] => {
            // eigenvalues ascending: j carries the larger weight.
            let (hi, lo) = (eig.eigenvalues[*j], eig.eigenvalues[*i]);
            let mut r = rank2_separability(&state(*j), &state(*i), lo / hi).verdict;
            if let Evidence::Decomposition(d) = &mut r.evidence {
                for t in &mut d.terms {
                    t.weight *= hi;
                }
            }
            r
        }
        _ => unreachable!("support of size ≤ 2"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};
    use crate::random::{random_product_state, random_state, random_unitary};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn two(amps: [f64; 4]) -> PureState {
        PureState::normalized(StateSpace::two_qubits(), amps.iter().map(|&x| C64::new(x, 0.0)).collect()).unwrap()
    }

    fn rho_of(psi: &PureState, phi: &PureState, lambda: f64) -> ComplexMatrix {
        &psi.density() + &phi.density().scale_real(lambda)
    }

    #[test]
    fn lemma1_examples() {
        let rho = two([1.0, 0.0, 0.0, 1.0]).density();
        let id = ComplexMatrix::identity(4);
        assert!(matches!(lemma1_check(&id, &rho).unwrap(), Lemma1Outcome::HoldsBothWays { .. }));
        assert!(matches!(lemma1_check(&rho, &rho).unwrap(), Lemma1Outcome::HoldsBothWays { .. }));
        match lemma1_check(&rho.scale_real(0.9), &rho).unwrap() {
            Lemma1Outcome::Violation { trace, min_eigenvalue } => {
                assert!((trace - 0.9).abs() < 1e-12);
                assert!((min_eigenvalue + 0.1).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(lemma1_check(&id.scale_real(2.0), &rho), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn rank2_examples() {
        let sp = StateSpace::two_qubits();
        let r = rank2_separability(&PureState::basis(&sp, &[0, 0]), &PureState::basis(&sp, &[1, 1]), 0.7);
        assert_eq!((r.verdict.status, r.case), (SepStatus::Separable, Lemma4Case::I));

        let bell = two([1.0, 0.0, 0.0, 1.0]);
        for lambda in [1e-3, 0.5, 3.0] {
            let r = rank2_separability(&bell, &PureState::basis(&sp, &[0, 1]), lambda);
            assert_eq!(r.case, Lemma4Case::Entangled);
        }

        let minus = two([1.0, 0.0, 0.0, -1.0]);
        let r = rank2_separability(&minus, &bell, 1.0);
        assert_eq!((r.verdict.status, r.case), (SepStatus::Separable, Lemma4Case::III));
        let d = r.verdict.decomposition().unwrap();
        assert!(d.relative_error(&rho_of(&minus, &bell, 1.0)) < 1e-12);
        for t in &d.terms {
            assert!((t.weight - 1.0).abs() < 1e-12);
            let v = t.vector.tensor();
            let on_basis = [0usize, 3].iter().any(|&i| (v[i].norm() - 1.0).abs() < 1e-12);
            assert!(on_basis);
        }
        assert!((required_lambda(&minus, &bell).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(rank2_separability(&minus, &bell, 1.001).case, Lemma4Case::Entangled);

        let r = rank2_separability(&PureState::basis(&sp, &[0, 1]), &bell, 0.0);
        assert_eq!(r.case, Lemma4Case::II);
    }

    #[test]
    fn antiparallel_examples() {
        let phi = two([1.0, 0.0, 0.0, 1.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let v = crate::random::random_state(&StateSpace::two_qubits(), &mut rng);
            let perp = vector::residual(v.amplitudes(), &[phi.amplitudes().to_vec()]);
            let psi = PureState::normalized(StateSpace::two_qubits(), perp).unwrap();
            assert!(antiparallel_test(&psi, &phi).unwrap().passed());
        }
        // Ψ Φ⁻¹ = diag(1, 2) with Φ = Φ+ (M = I) means M_Ψ = diag(1, 2).
        let m = ComplexMatrix::real_diag(&[1.0, 2.0]);
        let psi = crate::states::from_coeff_matrix(&m.scale_real(1.0 / 2.5f64.sqrt())).unwrap();
        assert!(!antiparallel_test(&psi, &phi).unwrap().passed());
        assert_eq!(antiparallel_test(&phi, &PureState::basis(phi.space(), &[0, 0])), Err(Error::PhiProduct));
    }

    #[test]
    fn ppt_examples() {
        let sp = StateSpace::two_qubits();
        let bell = two([1.0, 0.0, 0.0, 1.0]);
        let v = ppt_oracle(&bell.density(), &sp, &Cut::Parties(vec![1])).unwrap();
        match v.evidence {
            Evidence::PartialTransposeWitness { eigenvalue, .. } => assert!((eigenvalue + 0.5).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
        let mixed = ComplexMatrix::identity(4).scale_real(0.25);
        assert_eq!(ppt_oracle(&mixed, &sp, &Cut::AllBipartitions).unwrap().status, SepStatus::Separable);

        let sp33 = StateSpace::new(&[3, 3]).unwrap();
        let diag: Vec<f64> = (0..9).map(|i| 0.05 + 0.01 * i as f64).collect();
        let v = ppt_oracle(&ComplexMatrix::real_diag(&diag), &sp33, &Cut::AllBipartitions).unwrap();
        assert_eq!(v.status, SepStatus::Undecided);
        // Rank 2 in 3⊗3 goes through the analytic path.
        let a = PureState::basis(&sp33, &[0, 0]);
        let b = PureState::basis(&sp33, &[2, 1]);
        let v = ppt_oracle(&rho_of(&a, &b, 0.5), &sp33, &Cut::AllBipartitions).unwrap();
        assert_eq!(v.status, SepStatus::Separable);
        assert!(matches!(
            ppt_oracle(&ComplexMatrix::real_diag(&[1.0, -1.0, 0.0, 0.0]), &sp, &Cut::AllBipartitions),
            Err(Error::NotPsd(_))
        ));
    }

    #[test]
    fn multipartite_case_iii() {
        // GHZ± pair: ρ(1) = |000><000| + |111><111|.
        let sp = StateSpace::qubits(3);
        let mut p = vec![ZERO; 8];
        let mut m = vec![ZERO; 8];
        p[0] = ONE * FRAC_1_SQRT_2;
        p[7] = ONE * FRAC_1_SQRT_2;
        m[0] = ONE * FRAC_1_SQRT_2;
        m[7] = -ONE * FRAC_1_SQRT_2;
        let (p, m) = (PureState::new(sp.clone(), p).unwrap(), PureState::new(sp, m).unwrap());
        let r = rank2_separability(&p, &m, 1.0);
        assert_eq!(r.case, Lemma4Case::III);
        assert!(r.verdict.decomposition().unwrap().relative_error(&rho_of(&p, &m, 1.0)) < 1e-12);
        assert_eq!(rank2_separability(&p, &m, 0.9).case, Lemma4Case::Entangled);
    }

    /// Orthogonal entangled pair sharing a span with two product vectors and
    /// making `ρ(λ)` separable at a known `λ`.
    fn case3_pair(rng: &mut ChaCha8Rng) -> (PureState, PureState, f64) {
        let sp = StateSpace::two_qubits();
        let a = random_product_state(&sp, rng);
        let b = random_product_state(&sp, rng);
        let (wa, wb) = (rng.random_range(0.2..1.0), rng.random_range(0.2..1.0));
        // ρ = wa|a><a| + wb|b><b|; its eigenvectors are the orthogonal pair.
        let rho = &a.density().scale_real(wa) + &b.density().scale_real(wb);
        let eig = hermitian_eig(&rho).unwrap();
        let hi = PureState::normalized(sp.clone(), eig.vector(3)).unwrap();
        let lo = PureState::normalized(sp, eig.vector(2)).unwrap();
        (hi, lo, eig.eigenvalues[2] / eig.eigenvalues[3])
    }

    #[test]
    fn lambda_grid_brackets_single_value() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let (psi, phi, lambda) = case3_pair(&mut rng);
            assert_eq!(rank2_separability(&psi, &phi, lambda).case, Lemma4Case::III);
            let hits = (1..400)
                .map(|i| i as f64 * 0.005)
                .filter(|&l| rank2_separability(&psi, &phi, l).verdict.is_separable())
                .count();
            assert!(hits <= 1);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn ppt_agrees_with_rank2(seed in any::<u64>(), kind in 0u8..4) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sp = StateSpace::two_qubits();
            let (psi, phi, lambda) = match kind {
                0 => case3_pair(&mut rng),
                1 => {
                    let u = random_unitary(4, &mut rng);
                    let a = PureState::new(sp.clone(), u.column(0)).unwrap();
                    let b = PureState::new(sp.clone(), u.column(1)).unwrap();
                    (a, b, rng.random_range(0.0..2.0))
                }
                _ => {
                    let a = random_product_state(&sp, &mut rng);
                    let b0 = if kind == 2 { random_product_state(&sp, &mut rng) } else { random_state(&sp, &mut rng) };
                    let b = vector::normalized(&vector::residual(b0.amplitudes(), &[a.amplitudes().to_vec()])).unwrap();
                    (a, PureState::new(sp.clone(), b).unwrap(), rng.random_range(0.0..2.0))
                }
            };
            let rho = rho_of(&psi, &phi, lambda);
            let r2 = rank2_separability(&psi, &phi, lambda);
            let pt = hermitian_eig(&crate::linalg::partial_transpose(&rho, &[2, 2], 1).unwrap()).unwrap().min();
            let ppt = pt >= -1e-9;
            prop_assert_eq!(ppt, r2.verdict.is_separable(), "case {:?} pt_min {:e}", r2.case, pt);
            if let Some(d) = r2.verdict.decomposition() {
                prop_assert!(d.relative_error(&rho) < 1e-8);
            }
        }

        #[test]
        fn antiparallel_matches_rank2(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (psi, phi, lambda) = case3_pair(&mut rng);
            let out = antiparallel_test(&psi, &phi).unwrap();
            match out {
                AntiparallelOutcome::Pass { lambda_star, .. } => {
                    prop_assert!((lambda_star - lambda).abs() < 1e-8 * lambda.max(1.0));
                    prop_assert!(rank2_separability(&psi, &phi, lambda_star).verdict.is_separable());
                }
                AntiparallelOutcome::Fail { reason, .. } => prop_assert!(false, "{}", reason),
            }
            // A generic entangled pair fails both.
            let u = random_unitary(4, &mut rng);
            let a = PureState::new(StateSpace::two_qubits(), u.column(0)).unwrap();
            let b = PureState::new(StateSpace::two_qubits(), u.column(1)).unwrap();
            let passes = antiparallel_test(&a, &b).unwrap().passed();
            prop_assert_eq!(passes, required_lambda(&a, &b).is_some());
        }
    }
}
