//! Deciding perfect discrimination of orthogonal states by separable
//! measurements, with checkable POVM certificates.

mod certificate;
mod operation;

pub use certificate::{verify_certificate, CertificateCheck, PovmCertificate};
pub use operation::{build_separable_operation, SeparableOperation};

use crate::constructions::locc_basis_sch2;
use crate::error::{Error, Result};
use crate::linalg::{vector, ComplexMatrix, C64};
use crate::separability::{
    antiparallel_test, feasibility_solve, ppt_oracle, rank2_separability, AntiparallelOutcome, Cut, Evidence,
    FeasibilityOutcome, FeasibilityProblem, ProductDecomposition, SepStatus,
};
use crate::states::{concurrence, digits, gram_defect, orthocomplement_states, PureState, StateSpace};
use crate::tensor_rank::{factorize, is_product, schmidt2_classify, ProductVector, Schmidt2Class, Schmidt2Decomposition};
use crate::tol::tolerances;

#[derive(Debug, Clone)]
pub enum Members {
    Pure(Vec<PureState>),
    /// Mutually orthogonal projectors standing for the supports of mixed states.
    Projectors(Vec<ComplexMatrix>),
}

#[derive(Debug, Clone)]
pub struct DiscriminationInstance {
    space: StateSpace,
    members: Members,
    phi: Option<PureState>,
}

impl DiscriminationInstance {
    /// Orthonormal pure states; `phi`, when given, must complete them to a
    /// basis of the whole space.
    pub fn pure(states: Vec<PureState>, phi: Option<PureState>) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::InvalidInstance("no states".into()))?;
        let space = first.space().clone();
        if let Some(s) = states.iter().chain(phi.as_ref()).find(|s| s.space() != &space) {
            return Err(Error::InvalidInstance(format!("state on dims {:?} in a {:?} instance", s.dims(), space.dims())));
        }
        let tol = tolerances().state_orthogonality;
        let amps: Vec<Vec<C64>> = states.iter().map(|s| s.amplitudes().to_vec()).collect();
        let defect = gram_defect(&amps);
        if defect > tol {
            return Err(Error::InvalidInstance(format!("states are not orthonormal (Gram defect {defect:.3e})")));
        }
        if let Some(phi) = &phi {
            if states.len() + 1 != space.dim() {
                return Err(Error::InvalidInstance(format!(
                    "declared phi needs {} states, got {}",
                    space.dim() - 1,
                    states.len()
                )));
            }
            if let Some(k) = states.iter().position(|s| s.inner(phi).norm() > tol) {
                return Err(Error::InvalidInstance(format!("state {k} is not orthogonal to phi")));
            }
        }
        Ok(Self { space, members: Members::Pure(states), phi })
    }

    pub fn projectors(space: &StateSpace, projectors: Vec<ComplexMatrix>) -> Result<Self> {
        FeasibilityProblem::new(space, projectors.clone())?;
        Ok(Self { space: space.clone(), members: Members::Projectors(projectors), phi: None })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn members(&self) -> &Members {
        &self.members
    }

    pub fn phi(&self) -> Option<&PureState> {
        self.phi.as_ref()
    }

    pub fn len(&self) -> usize {
        match &self.members {
            Members::Pure(s) => s.len(),
            Members::Projectors(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Support projectors `P_k`.
    pub fn supports(&self) -> Vec<ComplexMatrix> {
        match &self.members {
            Members::Pure(s) => s.iter().map(PureState::density).collect(),
            Members::Projectors(p) => p.clone(),
        }
    }

    /// Unit-trace states `P_k / tr P_k`.
    pub fn densities(&self) -> Vec<ComplexMatrix> {
        self.supports().into_iter().map(|p| p.scale_real(1.0 / p.trace().re)).collect()
    }

    fn span_dim(&self) -> usize {
        self.supports().iter().map(|p| p.trace().re.round() as usize).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Distinguishable,
    Indistinguishable,
    Undecided,
}

/// Which route produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremTag {
    /// General criterion: full bases, product complements, feasibility.
    T1,
    /// 2⊗2 basis of the complement of an entangled state.
    T2,
    /// Product states completed to a product basis, plus at most one other state.
    C1,
    /// 2⊗2 with a maximally entangled complement.
    C2,
    /// Multipartite complement with entanglement on exactly two parties.
    T4,
    /// Complement with an orthogonal two-term decomposition at entry distance ≥ 3.
    T5,
    /// Complement needing three or more product terms.
    T6,
}

impl TheoremTag {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::T1 => "T1",
            Self::T2 => "T2",
            Self::C1 => "C1",
            Self::C2 => "C2",
            Self::T4 => "T4",
            Self::T5 => "T5",
            Self::T6 => "T6",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoccFlag {
    /// Two or more entangled members of a 2⊗2 basis of size three.
    LoccIndistinguishable,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub residual: f64,
    pub iterations: usize,
    pub stalled: bool,
    /// Relaxation coincides with separability for this space.
    pub exact: bool,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub status: Status,
    pub tag: TheoremTag,
    pub certificate: Option<PovmCertificate>,
    pub reason: String,
    pub locc_flag: LoccFlag,
    pub feasibility: Option<FeasibilityReport>,
}

impl Verdict {
    fn new(status: Status, tag: TheoremTag, reason: impl Into<String>) -> Self {
        Self { status, tag, certificate: None, reason: reason.into(), locc_flag: LoccFlag::Unknown, feasibility: None }
    }

    fn no(tag: TheoremTag, reason: impl Into<String>) -> Self {
        Self::new(Status::Indistinguishable, tag, reason)
    }

    fn undecided(tag: TheoremTag, reason: impl Into<String>) -> Self {
        Self::new(Status::Undecided, tag, reason)
    }

    /// Distinguishable only if the certificate survives independent verification.
    fn certified(tag: TheoremTag, cert: PovmCertificate, rhos: &[ComplexMatrix], reason: impl Into<String>) -> Self {
        let check = verify_certificate(&cert, rhos);
        if check.passes() {
            let mut v = Self::new(Status::Distinguishable, tag, reason);
            v.certificate = Some(cert);
            v
        } else {
            Self::undecided(tag, format!("certificate failed verification: {check:?}"))
        }
    }

    pub fn is_distinguishable(&self) -> bool {
        self.status == Status::Distinguishable
    }
}

/// Certificate `Π_k = P_k + λ_k|Φ⟩⟨Φ|` with rank-2 separability evidence.
fn lambda_certificate(members: &[PureState], phi: &PureState, lambdas: Vec<f64>) -> std::result::Result<PovmCertificate, String> {
    let proj = phi.density();
    let mut elements = Vec::with_capacity(members.len());
    let mut evidence = Vec::with_capacity(members.len());
    for (k, (psi, &l)) in members.iter().zip(&lambdas).enumerate() {
        let r = rank2_separability(psi, phi, l);
        if !r.verdict.is_separable() {
            return Err(format!("element {k} with λ = {l:.6} is not separable ({:?})", r.case));
        }
        elements.push(&psi.density() + &proj.scale_real(l));
        evidence.push(r.verdict.evidence);
    }
    Ok(PovmCertificate { elements, evidence, lambdas: Some(lambdas) })
}

fn densities(states: &[PureState]) -> Vec<ComplexMatrix> {
    states.iter().map(PureState::density).collect()
}

fn check_complement_basis(phi: &PureState, basis: &[PureState]) -> Result<()> {
    DiscriminationInstance::pure(basis.to_vec(), Some(phi.clone())).map(|_| ())
}

/// Outcome of the two-qubit conditions on embedded states.
enum TwoQubit {
    /// `λ` for each listed entangled member, summing to one.
    Holds(Vec<f64>),
    Fails(String),
}

/// Anti-parallel test for every entangled member and `ΣC = C(Φ)`.
fn two_qubit_conditions(phi: &PureState, entangled: &[(usize, PureState)]) -> Result<TwoQubit> {
    let cphi = concurrence(phi)?;
    let mut cs = Vec::with_capacity(entangled.len());
    for (k, psi) in entangled {
        match antiparallel_test(psi, phi)? {
            AntiparallelOutcome::Pass { .. } => {}
            AntiparallelOutcome::Fail { reason, .. } => {
                return Ok(TwoQubit::Fails(format!("member {k} fails the anti-parallel test: {reason}")));
            }
        }
        cs.push(concurrence(psi)?);
    }
    let sum: f64 = cs.iter().sum();
    if (sum - cphi).abs() > tolerances().concurrence_sum {
        return Ok(TwoQubit::Fails(format!("concurrence sum {sum:.9} ≠ C(Φ) = {cphi:.9}")));
    }
    Ok(TwoQubit::Holds(cs.iter().map(|c| c / sum).collect()))
}

fn spread(n: usize, entangled: &[(usize, PureState)], lambdas: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for ((k, _), l) in entangled.iter().zip(lambdas) {
        out[*k] = *l;
    }
    out
}

fn entangled_members(basis: &[PureState]) -> Vec<(usize, PureState)> {
    basis.iter().enumerate().filter(|(_, s)| !is_product(s)).map(|(k, s)| (k, s.clone())).collect()
}

/// Two-qubit basis of `{Φ}^⊥` for entangled `Φ`.
pub fn decide_2x2_basis(phi: &PureState, basis: &[PureState]) -> Result<Verdict> {
    if !phi.space().is_two_qubit() {
        return Err(Error::WrongSpace(phi.dims().to_vec()));
    }
    check_complement_basis(phi, basis)?;
    if is_product(phi) {
        return Err(Error::PhiProduct);
    }
    let tag = if concurrence(phi)? > 1.0 - tolerances().concurrence_sum { TheoremTag::C2 } else { TheoremTag::T2 };
    let entangled = entangled_members(basis);
    let mut v = match two_qubit_conditions(phi, &entangled)? {
        TwoQubit::Fails(why) => Verdict::no(tag, why),
        TwoQubit::Holds(ls) => match lambda_certificate(basis, phi, spread(basis.len(), &entangled, &ls)) {
            Ok(cert) => Verdict::certified(tag, cert, &densities(basis), "anti-parallel and concurrence-sum conditions hold"),
            Err(why) => Verdict::undecided(tag, format!("analytic conditions hold but {why}")),
        },
    };
    if entangled.len() >= 2 {
        v.locc_flag = LoccFlag::LoccIndistinguishable;
    }
    Ok(v)
}

/// Two-qubit orthonormal triple whose complement is maximally entangled.
pub fn decide_max_ent_basis(basis: &[PureState]) -> Result<Verdict> {
    let space = basis.first().map(PureState::space).ok_or_else(|| Error::InvalidInstance("empty basis".into()))?;
    if !space.is_two_qubit() {
        return Err(Error::WrongSpace(space.dims().to_vec()));
    }
    if basis.len() != 3 {
        return Err(Error::InvalidInstance(format!("need 3 states, got {}", basis.len())));
    }
    DiscriminationInstance::pure(basis.to_vec(), None)?;
    let phi = orthocomplement_states(basis).pop().expect("one-dimensional complement");
    let cphi = concurrence(&phi)?;
    let tol = tolerances().concurrence_sum;
    if cphi <= 1.0 - tol {
        return Err(Error::NotMaxEnt(cphi));
    }
    let entangled = entangled_members(basis);
    let cs: Vec<f64> = entangled.iter().map(|(_, s)| concurrence(s)).collect::<Result<_>>()?;
    let sum: f64 = cs.iter().sum();
    let mut v = if (sum - 1.0).abs() > tol {
        Verdict::no(TheoremTag::C2, format!("concurrence sum {sum:.9} ≠ 1"))
    } else {
        let ls: Vec<f64> = cs.iter().map(|c| c / sum).collect();
        match lambda_certificate(basis, &phi, spread(3, &entangled, &ls)) {
            Ok(cert) => Verdict::certified(TheoremTag::C2, cert, &densities(basis), "concurrence sum equals 1"),
            Err(why) => Verdict::undecided(TheoremTag::C2, format!("sum condition holds but {why}")),
        }
    };
    if entangled.len() >= 2 {
        v.locc_flag = LoccFlag::LoccIndistinguishable;
    }
    Ok(v)
}

/// Entangled parties `(p, q)` of a decomposition at entry distance two.
fn differing_parties(d: &Schmidt2Decomposition) -> Vec<usize> {
    (0..d.a.factors.len())
        .filter(|&r| vector::parallel_defect(&d.a.factors[r], &d.b.factors[r]) > tolerances().rank)
        .collect()
}

fn lifted(prefix: &[Option<Vec<C64>>], p: usize, x: &[C64], y: &[C64]) -> Vec<C64> {
    let factors: Vec<Vec<C64>> = prefix
        .iter()
        .enumerate()
        .map(|(r, f)| match f {
            Some(f) => f.clone(),
            None if r == p => x.to_vec(),
            None => y.to_vec(),
        })
        .collect();
    vector::tensor(&factors)
}

/// Coordinates of `psi` in `prefix ⊗ span{u} ⊗ span{v}` (prefix on every
/// party other than `p < q`) and the norm of what lies outside.
fn embed(psi: &PureState, prefix: &[Option<Vec<C64>>], p: usize, u: &[Vec<C64>; 2], v: &[Vec<C64>; 2]) -> ([C64; 4], f64) {
    let mut coords = [C64::new(0.0, 0.0); 4];
    let mut rest = psi.amplitudes().to_vec();
    for i in 0..2 {
        for j in 0..2 {
            let t = lifted(prefix, p, &u[i], &v[j]);
            let c = vector::inner(&t, psi.amplitudes());
            rest = vector::add_scaled(&rest, -c, &t);
            coords[2 * i + j] = c;
        }
    }
    (coords, vector::norm(&rest))
}

/// Norm of `psi` minus its projection onto `prefix ⊗ (parties p, q)`.
fn off_prefix(psi: &PureState, prefix: &[Option<Vec<C64>>], p: usize, q: usize) -> f64 {
    let dims = psi.dims();
    let mut rest = psi.amplitudes().to_vec();
    for x in 0..dims[p] {
        for y in 0..dims[q] {
            let t = lifted(prefix, p, &vector::basis_vector(dims[p], x), &vector::basis_vector(dims[q], y));
            let c = vector::inner(&t, psi.amplitudes());
            rest = vector::add_scaled(&rest, -c, &t);
        }
    }
    vector::norm(&rest)
}

/// Complement of `Φ = prefix ⊗ Φ'` with `Φ'` entangled on two parties.
pub fn decide_multipartite_sch2(phi: &PureState, basis: &[PureState]) -> Result<Verdict> {
    check_complement_basis(phi, basis)?;
    let d = match schmidt2_classify(phi) {
        Schmidt2Class::Schmidt2(d) if d.entry_distance() == 2 => d,
        other => return Err(Error::WrongForm(format!("phi is not a product prefix times a two-party state: {other:?}"))),
    };
    let parties = differing_parties(&d);
    let [p, q] = parties[..] else {
        return Err(Error::WrongForm(format!("entangled parties {parties:?}")));
    };
    let unit = |f: &Vec<C64>| vector::normalized(f).expect("nonzero factor");
    let prefix: Vec<Option<Vec<C64>>> =
        d.a.factors.iter().enumerate().map(|(r, f)| (r != p && r != q).then(|| unit(f))).collect();
    let u = [unit(&d.a.factors[p]), unit(&d.b.factors[p])];
    let v = [unit(&d.a.factors[q]), unit(&d.b.factors[q])];
    let tol = 1e-8;
    let two = StateSpace::two_qubits();
    let (phi_coords, _) = embed(phi, &prefix, p, &u, &v);
    let phi2 = PureState::normalized(two.clone(), phi_coords.to_vec())?;

    let mut entangled = Vec::new();
    for (k, psi) in basis.iter().enumerate() {
        if is_product(psi) {
            continue;
        }
        let (coords, outside) = embed(psi, &prefix, p, &u, &v);
        if outside > tol {
            let reason = if off_prefix(psi, &prefix, p, q) > tol {
                format!("entangled member {k} does not share the product prefix of phi")
            } else {
                format!("entangled member {k} lies outside the 2⊗2 block spanned by phi's Schmidt factors")
            };
            return Ok(Verdict::no(TheoremTag::T4, reason));
        }
        entangled.push((k, PureState::normalized(two.clone(), coords.to_vec())?));
    }
    Ok(match two_qubit_conditions(&phi2, &entangled)? {
        TwoQubit::Fails(why) => Verdict::no(TheoremTag::T4, format!("embedded 2⊗2 block: {why}")),
        TwoQubit::Holds(ls) => match lambda_certificate(basis, phi, spread(basis.len(), &entangled, &ls)) {
            Ok(cert) => Verdict::certified(TheoremTag::T4, cert, &densities(basis), "embedded 2⊗2 conditions hold"),
            Err(why) => Verdict::undecided(TheoremTag::T4, format!("embedded conditions hold but {why}")),
        },
    })
}

/// Complement of `Φ = cosθ|a⟩ + sinθ|b⟩` with `a ⊥ b` differing in ≥ 3 parties.
pub fn decide_h3(phi: &PureState, basis: &[PureState]) -> Result<Verdict> {
    check_complement_basis(phi, basis)?;
    let d = match schmidt2_classify(phi) {
        Schmidt2Class::Schmidt2(d) if d.orthogonal && d.entry_distance() >= 3 => d,
        other => return Err(Error::WrongForm(format!("phi has no orthogonal decomposition at entry distance ≥ 3: {other:?}"))),
    };
    let (theta, a, b) = d.angle_form();
    let cand = vector::add_scaled(&vector::scaled(&a.tensor(), C64::new(theta.sin(), 0.0)), C64::new(-theta.cos(), 0.0), &b.tensor());
    let entangled = entangled_members(basis);
    if entangled.len() != 1 {
        return Ok(Verdict::no(
            TheoremTag::T5,
            format!("{} entangled members; exactly one (sinθ|a⟩ − cosθ|b⟩) is required", entangled.len()),
        ));
    }
    let (k, psi) = &entangled[0];
    let overlap = vector::inner(&cand, psi.amplitudes()).norm();
    if overlap <= 1.0 - tolerances().phase_match {
        return Ok(Verdict::no(
            TheoremTag::T5,
            format!("entangled member {k} does not match sinθ|a⟩ − cosθ|b⟩ (overlap {overlap:.9})"),
        ));
    }
    let mut ls = vec![0.0; basis.len()];
    ls[*k] = 1.0;
    Ok(match lambda_certificate(basis, phi, ls) {
        Ok(cert) => Verdict::certified(TheoremTag::T5, cert, &densities(basis), "unique entangled member matches"),
        Err(why) => Verdict::undecided(TheoremTag::T5, why),
    })
}

#[derive(Debug, Clone)]
pub enum SubspaceVerdict {
    NoDistinguishableBasis,
    HasLoccBasis(Vec<PureState>),
    Undecided(String),
}

/// Whether `{phi}^⊥` has any basis distinguishable by separable operations.
pub fn subspace_verdict(phi: &PureState) -> Result<SubspaceVerdict> {
    Ok(match schmidt2_classify(phi) {
        Schmidt2Class::Product => return Err(Error::PhiProduct),
        Schmidt2Class::AtLeast3 => SubspaceVerdict::NoDistinguishableBasis,
        Schmidt2Class::Schmidt2(_) => SubspaceVerdict::HasLoccBasis(locc_basis_sch2(phi)?),
        Schmidt2Class::Undecided(why) => SubspaceVerdict::Undecided(why),
    })
}

fn product_decomposition(p: &ProductVector) -> Evidence {
    let mut d = ProductDecomposition::default();
    d.push(1.0, p);
    Evidence::Decomposition(d)
}

fn decide_full_basis(inst: &DiscriminationInstance) -> Result<Verdict> {
    let rhos = inst.densities();
    let mut evidence = Vec::new();
    match &inst.members {
        Members::Pure(states) => {
            for (k, s) in states.iter().enumerate() {
                match factorize(s.amplitudes(), s.dims(), tolerances().rank) {
                    Some(p) => evidence.push(product_decomposition(&p)),
                    None => {
                        return Ok(Verdict::no(TheoremTag::T1, format!("member {k} is entangled; a full basis needs every member to be a product")));
                    }
                }
            }
        }
        Members::Projectors(ps) => {
            let mut undecided = None;
            for (k, p) in ps.iter().enumerate() {
                let v = ppt_oracle(p, &inst.space, &Cut::AllBipartitions)?;
                match v.status {
                    SepStatus::Separable => evidence.push(v.evidence),
                    SepStatus::Entangled => {
                        return Ok(Verdict::no(TheoremTag::T1, format!("projector {k} is entangled: {:?}", v.evidence)));
                    }
                    SepStatus::Undecided => {
                        undecided.get_or_insert(k);
                    }
                }
            }
            if let Some(k) = undecided {
                return Ok(Verdict::undecided(TheoremTag::T1, format!("separability of projector {k} is not decidable here")));
            }
        }
    }
    let cert = PovmCertificate { elements: inst.supports(), evidence, lambdas: None };
    Ok(Verdict::certified(TheoremTag::T1, cert, &rhos, "every member is separable"))
}

/// Per party, the distinct factor directions if they are pairwise orthogonal
/// or parallel, extended to an orthonormal basis.
fn local_bases(products: &[ProductVector], dims: &[usize]) -> Option<Vec<Vec<Vec<C64>>>> {
    let tol = tolerances().orthonormal.max(1e-9);
    let mut out = Vec::with_capacity(dims.len());
    for (r, &d) in dims.iter().enumerate() {
        let mut dirs: Vec<Vec<C64>> = Vec::new();
        for p in products {
            let f = vector::normalized(&p.factors[r])?;
            if dirs.iter().any(|g| vector::parallel_defect(g, &f) <= tol) {
                continue;
            }
            if dirs.iter().any(|g| vector::inner(g, &f).norm() > tol) {
                return None;
            }
            dirs.push(f);
        }
        let ext = vector::orthocomplement(&dirs, d);
        dirs.extend(ext);
        out.push(dirs);
    }
    Some(out)
}

/// Product members that sit inside a common product basis, plus at most one
/// other state: the rest of that basis goes to the entangled member.
fn decide_by_completion(states: &[PureState]) -> Option<Verdict> {
    let dims = states[0].dims();
    let tol = tolerances().rank;
    let mut products = Vec::new();
    let mut others = Vec::new();
    for (k, s) in states.iter().enumerate() {
        match factorize(s.amplitudes(), dims, tol) {
            Some(p) => products.push((k, p)),
            None => others.push(k),
        }
    }
    if others.len() > 1 {
        return None;
    }
    let pv: Vec<ProductVector> = products.iter().map(|(_, p)| p.clone()).collect();
    let bases = local_bases(&pv, dims)?;
    // Basis elements not already carried by a product member.
    let mut completion = ProductDecomposition::default();
    for index in 0..states[0].space().dim() {
        let factors: Vec<Vec<C64>> =
            digits(index, dims).iter().enumerate().map(|(r, &i)| bases[r][i].clone()).collect();
        let t = vector::tensor(&factors);
        if !products.iter().any(|(k, _)| vector::inner(states[*k].amplitudes(), &t).norm() > 0.5) {
            completion.push(1.0, &ProductVector { factors, weight: C64::new(1.0, 0.0) });
        }
    }
    let target = others.first().copied().unwrap_or(0);
    let mut elements = Vec::with_capacity(states.len());
    let mut evidence = Vec::with_capacity(states.len());
    let full = states[0].space().dim();
    for (k, s) in states.iter().enumerate() {
        if k == target {
            let mut dec = completion.clone();
            if others.is_empty() {
                let p = &products.iter().find(|(j, _)| *j == k).expect("product member").1;
                dec.push(1.0, p);
            }
            elements.push(dec.reassemble(full));
            evidence.push(Evidence::Decomposition(dec));
        } else {
            let p = &products.iter().find(|(j, _)| *j == k).expect("product member").1;
            elements.push(s.density());
            evidence.push(product_decomposition(p));
        }
    }
    let cert = PovmCertificate { elements, evidence, lambdas: None };
    let v = Verdict::certified(
        TheoremTag::C1,
        cert,
        &densities(states),
        "product members complete to a product basis; the remainder measures the last member",
    );
    (v.status == Status::Distinguishable).then_some(v)
}

fn decide_by_feasibility(inst: &DiscriminationInstance) -> Result<Verdict> {
    let problem = FeasibilityProblem::new(&inst.space, inst.supports())?;
    let outcome = feasibility_solve(&problem)?;
    let rhos = inst.densities();
    match outcome {
        FeasibilityOutcome::Feasible(pt) => {
            let report = FeasibilityReport { residual: pt.residual, iterations: pt.iterations, stalled: false, exact: pt.exact };
            let mut elements = Vec::with_capacity(pt.e.len());
            let mut evidence = Vec::with_capacity(pt.e.len());
            let mut open = None;
            for (k, (p, e)) in problem.projectors.iter().zip(&pt.e).enumerate() {
                let pi = p + e;
                match ppt_oracle(&pi, &inst.space, &Cut::AllBipartitions) {
                    Ok(v) if v.is_separable() => evidence.push(v.evidence),
                    Ok(_) | Err(_) => {
                        open.get_or_insert(k);
                        evidence.push(Evidence::Inconclusive("PPT only".into()));
                    }
                }
                elements.push(pi);
            }
            let mut v = if let Some(k) = open {
                Verdict::undecided(
                    TheoremTag::T1,
                    format!("PPT-feasible (residual {:.2e}) but element {k} has no separability certificate", pt.residual),
                )
            } else {
                let cert = PovmCertificate { elements, evidence, lambdas: None };
                Verdict::certified(TheoremTag::T1, cert, &rhos, format!("feasible point with residual {:.2e}", pt.residual))
            };
            v.feasibility = Some(report);
            Ok(v)
        }
        FeasibilityOutcome::NoConvergence(diag) => {
            let report = FeasibilityReport {
                residual: diag.residual,
                iterations: diag.iterations,
                stalled: diag.stalled,
                exact: problem.relaxation_is_exact(),
            };
            let why = if diag.empirically_infeasible() {
                format!("feasibility solver stalled at residual {:.3e} (empirical evidence only)", diag.residual)
            } else {
                format!("feasibility solver did not converge (residual {:.3e})", diag.residual)
            };
            let mut v = Verdict::undecided(TheoremTag::T1, why);
            v.feasibility = Some(report);
            Ok(v)
        }
    }
}

/// Routes an instance to the analytic decider that applies, falling back to
/// the convex relaxation.
pub fn decide(inst: &DiscriminationInstance) -> Result<Verdict> {
    let d = inst.space.dim();
    if inst.span_dim() == d {
        return decide_full_basis(inst);
    }
    let Members::Pure(states) = &inst.members else {
        return decide_by_feasibility(inst);
    };
    if states.len() + 1 == d {
        let phi = match &inst.phi {
            Some(phi) => phi.clone(),
            None => orthocomplement_states(states).pop().ok_or_else(|| Error::InvalidInstance("no complement".into()))?,
        };
        return decide_complement_basis(&phi, states);
    }
    if let Some(v) = decide_by_completion(states) {
        return Ok(v);
    }
    decide_by_feasibility(inst)
}

fn decide_complement_basis(phi: &PureState, basis: &[PureState]) -> Result<Verdict> {
    if is_product(phi) {
        if let Some((k, _)) = entangled_members(basis).first() {
            return Ok(Verdict::no(TheoremTag::T1, format!("phi is a product, so only a product basis qualifies; member {k} is entangled")));
        }
        let mut ls = vec![0.0; basis.len()];
        ls[0] = 1.0;
        return Ok(match lambda_certificate(basis, phi, ls) {
            Ok(cert) => Verdict::certified(TheoremTag::T1, cert, &densities(basis), "product basis together with product phi"),
            Err(why) => Verdict::undecided(TheoremTag::T1, why),
        });
    }
    if phi.space().is_two_qubit() {
        return decide_2x2_basis(phi, basis);
    }
    match schmidt2_classify(phi) {
        Schmidt2Class::AtLeast3 => Ok(Verdict::no(
            TheoremTag::T6,
            "phi needs at least three orthogonal product terms; no basis of its complement is distinguishable",
        )),
        Schmidt2Class::Schmidt2(dec) if dec.entry_distance() >= 3 => decide_h3(phi, basis),
        Schmidt2Class::Schmidt2(_) => decide_multipartite_sch2(phi, basis),
        Schmidt2Class::Product => unreachable!("product phi handled above"),
        Schmidt2Class::Undecided(why) => {
            let inst = DiscriminationInstance::pure(basis.to_vec(), Some(phi.clone()))?;
            let mut v = decide_by_feasibility(&inst)?;
            if v.status == Status::Undecided {
                v.reason = format!("{why}; {}", v.reason);
            }
            Ok(v)
        }
    }
}
