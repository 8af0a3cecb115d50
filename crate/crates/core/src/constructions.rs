//! Explicit families: two-qubit bases distinguishable by separable but not
//! LOCC measurements, bases with prescribed concurrences, the tetrahedron of
//! concurrence triples, small indistinguishable subspaces, and LOCC bases for
//! complements of Schmidt-rank-two states.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use crate::error::{Error, Result};
use crate::linalg::{vector, ComplexMatrix, C64, ONE, ZERO};
use crate::states::{magic_basis, orthocomplement_states, PureState, StateSpace};
use crate::tensor_rank::{cut_rank, products_in_span, schmidt2_classify, ProductVector, Schmidt2Class, SpanProducts};

/// Slack allowed on the parameter inequalities.
const RANGE_SLACK: f64 = 1e-12;

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn two_qubit(amps: [f64; 4]) -> PureState {
    PureState::normalized(StateSpace::two_qubits(), amps.iter().map(|&x| real(x)).collect()).expect("nonzero")
}

/// `cosθ|01⟩ + sinθ|10⟩`.
pub fn psi_theta(theta: f64) -> PureState {
    two_qubit([0.0, theta.cos(), theta.sin(), 0.0])
}

/// `cosθ|00⟩ + sinθ|11⟩`.
pub fn phi_theta(theta: f64) -> PureState {
    two_qubit([theta.cos(), 0.0, 0.0, theta.sin()])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// `[atan √(sin2α/sin2β), atan √(sin2β/sin2α)]`.
pub fn gamma_range(alpha: f64, beta: f64) -> (f64, f64) {
    let r = (2.0 * alpha).sin() / (2.0 * beta).sin();
    (r.sqrt().atan(), (1.0 / r).sqrt().atan())
}

impl FamilyParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let p = Self { alpha, beta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let Self { alpha, beta, gamma } = *self;
        if ![alpha, beta, gamma].iter().all(|x| x.is_finite()) {
            return Err(Error::ParamsOutOfRange("non-finite angle".into()));
        }
        if alpha <= 0.0 || alpha > beta + RANGE_SLACK || beta > FRAC_PI_4 + RANGE_SLACK {
            return Err(Error::ParamsOutOfRange(format!(
                "need 0 < alpha <= beta <= pi/4, got alpha = {alpha}, beta = {beta}"
            )));
        }
        let (lo, hi) = gamma_range(alpha, beta.max(alpha));
        if gamma < lo - RANGE_SLACK || gamma > hi + RANGE_SLACK {
            return Err(Error::ParamsOutOfRange(format!(
                "need atan sqrt(sin2a/sin2b) <= gamma <= atan sqrt(sin2b/sin2a), i.e. {lo:.12} <= gamma <= {hi:.12}, got {gamma}"
            )));
        }
        Ok(())
    }
}

/// `Φ(β)` and the basis `{Ψ(α), cosγΨ(α−π/2) + sinγΦ(β−π/2), sinγΨ(α−π/2) − cosγΦ(β−π/2)}`
/// of its complement.
pub fn family_sep_not_locc(p: &FamilyParams) -> Result<(PureState, Vec<PureState>)> {
    p.validate()?;
    let FamilyParams { alpha, beta, gamma } = *p;
    let (sa, ca) = (alpha.sin(), alpha.cos());
    let (sb, cb) = (beta.sin(), beta.cos());
    let (sg, cg) = (gamma.sin(), gamma.cos());
    // Ψ(α − π/2) = sinα|01⟩ − cosα|10⟩, Φ(β − π/2) = sinβ|00⟩ − cosβ|11⟩.
    let psi2 = two_qubit([sg * sb, cg * sa, -cg * ca, -sg * cb]);
    let psi3 = two_qubit([-cg * sb, sg * sa, -sg * ca, cg * cb]);
    Ok((phi_theta(beta), vec![psi_theta(alpha), psi2, psi3]))
}

/// Closed-form concurrences `(C(Ψ1), C(Ψ2), C(Ψ3))` of the family.
pub fn family_concurrences(p: &FamilyParams) -> [f64; 3] {
    let s2a = (2.0 * p.alpha).sin();
    let s2b = (2.0 * p.beta).sin();
    let (c2, s2) = (p.gamma.cos().powi(2), p.gamma.sin().powi(2));
    [s2a, (c2 * s2a - s2 * s2b).abs(), (s2 * s2a - c2 * s2b).abs()]
}

/// A basis of `{Φ}^⊥` whose members have concurrences `c`, in the given order,
/// distinguishable by separable operations. All-zero targets give the
/// product basis `{01, 10, 11}` of `|00⟩^⊥`.
pub fn basis_for_targets(c: [f64; 3]) -> Result<(PureState, Vec<PureState>)> {
    if c.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::TargetsOutOfRange(format!("targets must be finite and >= 0, got {c:?}")));
    }
    let s: f64 = c.iter().sum();
    if s > 1.0 + RANGE_SLACK {
        return Err(Error::TargetsOutOfRange(format!("need c1 + c2 + c3 <= 1, got {s}")));
    }
    let sp = StateSpace::two_qubits();
    if s == 0.0 {
        let basis = [[0, 1], [1, 0], [1, 1]].iter().map(|d| PureState::basis(&sp, d)).collect();
        return Ok((PureState::basis(&sp, &[0, 0]), basis));
    }
    let s = s.min(1.0);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| c[j].total_cmp(&c[i]));
    let [c1, c2, _] = order.map(|i| c[i]);
    let beta = 0.5 * s.asin();
    let alpha = (0.5 * c1.min(s).asin()).min(beta);
    let gamma = ((c1 + c2) / (s + c1)).min(1.0).sqrt().asin();
    let (lo, hi) = gamma_range(alpha, beta);
    let (phi, sorted) = family_sep_not_locc(&FamilyParams::new(alpha, beta, gamma.clamp(lo, hi))?)?;
    let mut basis = vec![sorted[0].clone(); 3];
    for (rank, &i) in order.iter().enumerate() {
        basis[i] = sorted[rank].clone();
    }
    Ok((phi, basis))
}

/// Target concurrences of a basis of `{Φ+}^⊥`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetraPoint {
    pub x: [f64; 3],
}

impl TetraPoint {
    pub fn new(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        let p = Self { x: [x1, x2, x3] };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let x = self.x;
        let out = |why: String| Err(Error::PointOutsideTetrahedron(why));
        if x.iter().any(|v| !v.is_finite() || *v < -RANGE_SLACK || *v > 1.0 + RANGE_SLACK) {
            return out(format!("coordinates must lie in [0, 1], got {x:?}"));
        }
        let s: f64 = x.iter().sum();
        if s < 1.0 - RANGE_SLACK {
            return out(format!("x1 + x2 + x3 >= 1 violated (sum {s})"));
        }
        for k in 0..3 {
            let excess = s - 2.0 * x[k];
            if excess > 1.0 + RANGE_SLACK {
                let (i, j) = ((k + 1) % 3, (k + 2) % 3);
                return out(format!("x{} + x{} - x{} <= 1 violated ({excess})", i + 1, j + 1, k + 1));
            }
        }
        Ok(())
    }
}

/// Root of `f·g` for sorted targets and the squared first-column entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TetraSolution {
    pub theta: f64,
    /// `u_k1²` in sorted (descending) target order.
    pub column_sq: [f64; 3],
    /// True when `g` (sign pattern − − +) vanishes, false for `f` (− − −).
    pub g_branch: bool,
}

/// Solves the column equations for targets sorted in descending order.
/// Works in `w = √(x3² − cos²θ) ∈ [0, x3]` so every root stays smooth.
pub fn tetra_solve(x: [f64; 3]) -> TetraSolution {
    let [x1, x2, x3] = x;
    if x3 >= 1.0 - RANGE_SLACK {
        return TetraSolution { theta: 0.0, column_sq: [1.0, 0.0, 0.0], g_branch: false };
    }
    let parts = |w: f64| {
        let w2 = w * w;
        let cos2 = (x3 * x3 - w2).max(0.0);
        let sin = (1.0 - cos2).sqrt();
        let s1 = (x1 * x1 - cos2).max(0.0).sqrt();
        let s2 = (x2 * x2 - cos2).max(0.0).sqrt();
        (sin, s1, s2, w, cos2.sqrt())
    };
    let fg = |w: f64| {
        let (sin, s1, s2, s3, _) = parts(w);
        (sin - s1 - s2 - s3, sin - s1 - s2 + s3)
    };
    let h = |w: f64| {
        let (f, g) = fg(w);
        f * g
    };
    let (mut lo, mut hi) = (0.0f64, x3);
    let root = if h(lo) <= 0.0 {
        lo
    } else if h(hi) >= 0.0 {
        hi
    } else {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if h(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let (f, g) = fg(root);
    let g_branch = g.abs() < f.abs();
    let (sin, s1, s2, s3, cos) = parts(root);
    let sign3 = if g_branch { 1.0 } else { -1.0 };
    let mut column_sq = [(sin - s1) / (2.0 * sin), (sin - s2) / (2.0 * sin), (sin + sign3 * s3) / (2.0 * sin)];
    for a in &mut column_sq {
        *a = a.clamp(0.0, 1.0);
    }
    let total: f64 = column_sq.iter().sum();
    for a in &mut column_sq {
        *a /= total;
    }
    TetraSolution { theta: sin.atan2(cos), column_sq, g_branch }
}

/// Real orthogonal matrix whose first column is the unit vector `c`.
fn householder_completion(c: [f64; 3]) -> [[f64; 3]; 3] {
    // Reflect e1 onto ±c, picking the sign that avoids cancellation in e1 ∓ c.
    let flip = c[0] > 0.0;
    let v = if flip { [1.0 + c[0], c[1], c[2]] } else { [1.0 - c[0], -c[1], -c[2]] };
    let vv: f64 = v.iter().map(|x| x * x).sum();
    let mut h = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let id = if i == j { 1.0 } else { 0.0 };
            h[i][j] = if vv == 0.0 { id } else { id - 2.0 * v[i] * v[j] / vv };
        }
    }
    if flip {
        for row in &mut h {
            row[0] = -row[0];
        }
    }
    h
}

/// `U = O·diag(1, e^{iθ}, e^{iθ})` with `|Σ_j U[k][j]²| = x_k`.
pub fn tetra_unitary(p: &TetraPoint) -> Result<ComplexMatrix> {
    p.validate()?;
    let x = p.x.map(|v| v.clamp(0.0, 1.0));
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| x[j].total_cmp(&x[i]));
    let sol = tetra_solve(order.map(|i| x[i]));
    let o = householder_completion(sol.column_sq.map(f64::sqrt));
    let phase = C64::from_polar(1.0, sol.theta);
    let mut u = ComplexMatrix::zeros(3, 3);
    for (rank, &k) in order.iter().enumerate() {
        for j in 0..3 {
            u[(k, j)] = real(o[rank][j]) * if j == 0 { ONE } else { phase };
        }
    }
    Ok(u)
}

/// `ψ_k = Σ_l U[k][l]·m_l` over the magic states spanning `{Φ+}^⊥`, so that
/// `C(ψ_k) = |Σ_l U[k][l]²|`.
pub fn basis_from_unitary(u: &ComplexMatrix) -> Result<Vec<PureState>> {
    if u.rows() != 3 || u.cols() != 3 {
        return Err(Error::DimensionMismatch(format!("need a 3x3 unitary, got {}x{}", u.rows(), u.cols())));
    }
    let defect = u.unitarity_defect();
    if defect > 1e-9 {
        return Err(Error::NotUnitary(defect));
    }
    let m = magic_basis();
    (0..3)
        .map(|k| {
            let mut amps = vec![ZERO; 4];
            for l in 0..3 {
                amps = vector::add_scaled(&amps, u[(k, l)], &m[l + 1]);
            }
            PureState::normalized(StateSpace::two_qubits(), amps)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceKind {
    Bipartite3x3Dim7,
    Tripartite222Dim6,
}

#[derive(Debug, Clone)]
pub struct SubspaceSpec {
    pub kind: Option<SubspaceKind>,
    pub phi1: PureState,
    pub phi2: PureState,
    /// Orthonormal basis of `span{Φ1, Φ2}^⊥`.
    pub complement: Vec<PureState>,
}

impl SubspaceSpec {
    /// Any orthonormal pair; the complement is computed.
    pub fn from_pair(phi1: PureState, phi2: PureState) -> Result<Self> {
        if phi1.space() != phi2.space() {
            return Err(Error::DimensionMismatch("phi1 and phi2 live in different spaces".into()));
        }
        if phi1.inner(&phi2).norm() > 1e-9 {
            return Err(Error::PreconditionViolated("phi1 and phi2 must be orthogonal".into()));
        }
        let complement = orthocomplement_states(&[phi1.clone(), phi2.clone()]);
        Ok(Self { kind: None, phi1, phi2, complement })
    }

    pub fn space(&self) -> &StateSpace {
        self.phi1.space()
    }
}

pub fn indistinguishable_subspace(kind: SubspaceKind) -> SubspaceSpec {
    let (phi1, phi2) = match kind {
        SubspaceKind::Bipartite3x3Dim7 => {
            let sp = StateSpace::new(&[3, 3]).expect("valid dims");
            let mut a = vec![ZERO; 9];
            for i in 0..3 {
                a[4 * i] = ONE;
            }
            (PureState::normalized(sp.clone(), a).expect("nonzero"), PureState::basis(&sp, &[0, 1]))
        }
        SubspaceKind::Tripartite222Dim6 => {
            let sp = StateSpace::qubits(3);
            let mut a = vec![ZERO; 8];
            for i in [1, 2, 4] {
                a[i] = ONE;
            }
            (PureState::normalized(sp.clone(), a).expect("nonzero"), PureState::basis(&sp, &[0, 0, 0]))
        }
    };
    let mut spec = SubspaceSpec::from_pair(phi1, phi2).expect("orthogonal pair");
    spec.kind = Some(kind);
    spec
}

#[derive(Debug, Clone)]
pub struct PropertyCheck {
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct SubspaceReport {
    /// A single product vector (up to scale) in the span.
    pub p0: PropertyCheck,
    /// Every entangled state of the span needs three product terms.
    pub p1: PropertyCheck,
    /// No rank-3 decomposition of a full-support operator on the span.
    pub p2: PropertyCheck,
    pub product: Option<PureState>,
}

impl SubspaceReport {
    pub fn all_pass(&self) -> bool {
        self.p0.passed && self.p1.passed && self.p2.passed
    }
}

/// Whether `v` needs three product terms: Schmidt rank 3 on two parties,
/// every cut of rank two and no two-term decomposition on three or more.
fn needs_three_terms(v: &PureState) -> bool {
    let dims = v.dims();
    if dims.len() == 2 {
        cut_rank(v.amplitudes(), dims, &[0]) == 3
    } else {
        (0..dims.len()).all(|p| cut_rank(v.amplitudes(), dims, &[p]) == 2)
            && matches!(schmidt2_classify(v), Schmidt2Class::AtLeast3)
    }
}

fn combination(a: C64, x: &PureState, b: C64, y: &PureState) -> PureState {
    let amps = vector::add_scaled(&vector::scaled(x.amplitudes(), a), b, y.amplitudes());
    PureState::normalized(x.space().clone(), amps).expect("independent pair")
}

/// Checks P0 on the span, P1 on a 10×10 grid of `αΦ1 + βΦ2` with `α ≠ 0`,
/// and P2 through its reduction: `Φ1 − α⁻¹Φ2` needs three terms for 100
/// sampled nonzero `α`.
pub fn verify_p0_p1_p2(spec: &SubspaceSpec) -> SubspaceReport {
    let (p0, product) = match products_in_span(spec.phi1.amplitudes(), spec.phi2.amplitudes(), spec.phi1.dims()) {
        Ok(SpanProducts::Finite(v)) if v.len() == 1 => {
            let s = PureState::normalized(spec.space().clone(), v[0].tensor()).ok();
            let detail = format!("unique product vector, overlap with phi2 {:.12}", s.as_ref().map_or(0.0, |s| s.inner(&spec.phi2).norm()));
            (PropertyCheck { passed: true, detail }, s)
        }
        Ok(SpanProducts::Finite(v)) => {
            (PropertyCheck { passed: false, detail: format!("{} product vectors in the span", v.len()) }, None)
        }
        Ok(SpanProducts::InfinitelyMany) => {
            (PropertyCheck { passed: false, detail: "span consists of product vectors".into() }, None)
        }
        Err(e) => (PropertyCheck { passed: false, detail: e.to_string() }, None),
    };

    let mut failures = 0;
    for i in 0..10 {
        let t = i as f64 * FRAC_PI_2 / 10.0;
        for j in 0..10 {
            let phase = C64::from_polar(1.0, j as f64 * std::f64::consts::TAU / 10.0);
            let v = combination(real(t.cos()), &spec.phi1, phase * t.sin(), &spec.phi2);
            if !needs_three_terms(&v) {
                failures += 1;
            }
        }
    }
    let p1 = PropertyCheck { passed: failures == 0, detail: format!("{failures} of 100 grid points fail") };

    let mut failures = 0;
    for i in 0..10 {
        let r = 0.1 * 2f64.powi(i - 2);
        for j in 0..10 {
            let alpha = C64::from_polar(r, (j as f64 + 0.5) * std::f64::consts::TAU / 10.0);
            let v = combination(ONE, &spec.phi1, -ONE / alpha, &spec.phi2);
            if !needs_three_terms(&v) {
                failures += 1;
            }
        }
    }
    let p2 = PropertyCheck {
        passed: p0.passed && failures == 0,
        detail: format!("{failures} of 100 sampled alpha give a two-term difference"),
    };
    SubspaceReport { p0, p1, p2, product }
}

/// Orthonormal basis of the complement of the orthonormal product pair
/// `{a, b}` made of product states.
fn product_completion(a: &ProductVector, b: &ProductVector) -> Vec<Vec<C64>> {
    let unit = |f: &Vec<C64>| vector::normalized(f).expect("nonzero factor");
    let af: Vec<Vec<C64>> = a.factors.iter().map(unit).collect();
    let bf: Vec<Vec<C64>> = b.factors.iter().map(unit).collect();
    let k = af.len();
    // A party where the factors are orthogonal splits the pair.
    let s = (0..k)
        .min_by(|&i, &j| vector::inner(&af[i], &bf[i]).norm().total_cmp(&vector::inner(&af[j], &bf[j]).norm()))
        .expect("at least one party");
    let ds = af[s].len();
    let bs = vector::normalized(&vector::residual(&bf[s], std::slice::from_ref(&af[s]))).expect("orthogonal factors");
    let rest_s = vector::orthocomplement(&[af[s].clone(), bs.clone()], ds);
    let extend = |f: &Vec<C64>| {
        let mut basis = vec![f.clone()];
        basis.extend(vector::orthocomplement(std::slice::from_ref(f), f.len()));
        basis
    };
    let others: Vec<usize> = (0..k).filter(|&r| r != s).collect();
    let a_bases: Vec<Vec<Vec<C64>>> = others.iter().map(|&r| extend(&af[r])).collect();
    let b_bases: Vec<Vec<Vec<C64>>> = others.iter().map(|&r| extend(&bf[r])).collect();
    let std_bases: Vec<Vec<Vec<C64>>> =
        others.iter().map(|&r| (0..af[r].len()).map(|i| vector::basis_vector(af[r].len(), i)).collect()).collect();
    let rest_dims: Vec<usize> = others.iter().map(|&r| af[r].len()).collect();
    let rest_total: usize = rest_dims.iter().product();

    let mut out = Vec::new();
    let mut emit = |head: &Vec<C64>, bases: &[Vec<Vec<C64>>], skip_first: bool| {
        for idx in 0..rest_total {
            if skip_first && idx == 0 {
                continue;
            }
            let dg = crate::states::digits(idx, &rest_dims);
            let mut factors = Vec::with_capacity(k);
            let mut it = 0;
            for r in 0..k {
                if r == s {
                    factors.push(head.clone());
                } else {
                    factors.push(bases[it][dg[it]].clone());
                    it += 1;
                }
            }
            out.push(vector::tensor(&factors));
        }
    };
    emit(&af[s], &a_bases, true);
    emit(&bs, &b_bases, true);
    for e in &rest_s {
        emit(e, &std_bases, false);
    }
    out
}

/// `{sinθ|a⟩ − cosθ|b⟩}` plus a product basis of `{a, b}^⊥`, for
/// `phi = cosθ|a⟩ + sinθ|b⟩` with orthogonal product `a, b`.
pub fn locc_basis_sch2(phi: &PureState) -> Result<Vec<PureState>> {
    let d = match schmidt2_classify(phi) {
        Schmidt2Class::Schmidt2(d) if d.orthogonal => d,
        Schmidt2Class::Product => return Err(Error::WrongForm("phi is a product state".into())),
        Schmidt2Class::AtLeast3 => return Err(Error::WrongForm("phi has orthogonal Schmidt number >= 3".into())),
        Schmidt2Class::Undecided(why) => return Err(Error::WrongForm(format!("classification undecided: {why}"))),
        Schmidt2Class::Schmidt2(_) => return Err(Error::WrongForm("decomposition is not orthogonal".into())),
    };
    let (theta, a, b) = d.angle_form();
    let space = phi.space().clone();
    let ent = vector::add_scaled(&vector::scaled(&a.tensor(), real(theta.sin())), real(-theta.cos()), &b.tensor());
    let mut out = vec![PureState::normalized(space.clone(), ent)?];
    for v in product_completion(&a, &b) {
        out.push(PureState::normalized(space.clone(), v)?);
    }
    Ok(out)
}
