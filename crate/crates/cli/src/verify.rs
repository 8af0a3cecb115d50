//! Seeded property suites behind `sepdisc verify`.

use std::f64::consts::FRAC_PI_4;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sepdisc::constructions::{
    basis_from_unitary, family_sep_not_locc, gamma_range, indistinguishable_subspace, tetra_unitary, verify_p0_p1_p2,
    FamilyParams, SubspaceKind, TetraPoint,
};
use sepdisc::discrimination::{
    decide, decide_2x2_basis, decide_max_ent_basis, verify_certificate, DiscriminationInstance, LoccFlag, Status,
};
use sepdisc::linalg::{hermitian_eig, partial_transpose, ComplexMatrix, C64};
use sepdisc::random::{
    random_local_unitary, random_mixing, random_product_state, random_state, random_unit_vector, random_unitary,
};
use sepdisc::separability::{
    antiparallel_test, feasibility_solve, lemma1_check, rank2_separability, AntiparallelOutcome, FeasibilityOutcome,
    FeasibilityProblem, Lemma1Outcome, Lemma4Case,
};
use sepdisc::states::{concurrence, orthocomplement_states, PureState, StateSpace};
use sepdisc::tensor_rank::{schmidt2_classify, Schmidt2Class};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Lemmas,
    Theorem2,
    Tetra,
    Subspaces,
    All,
}

/// One property: how many cases passed and the worst measured quantity.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: &'static str,
    pub passed: usize,
    pub total: usize,
    pub worst: f64,
    pub worst_label: &'static str,
}

impl Check {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }

    pub fn line(&self) -> String {
        format!(
            "{} {:<28} {}/{}  {} {:.3e}",
            if self.ok() { "PASS" } else { "FAIL" },
            self.name,
            self.passed,
            self.total,
            self.worst_label,
            self.worst
        )
    }
}

pub struct Options {
    pub seed: u64,
    /// Random bases per sampled property.
    pub samples: usize,
}

pub fn run(suite: Suite, opts: &Options) -> Vec<Check> {
    match suite {
        Suite::Lemmas => lemmas(opts),
        Suite::Theorem2 => theorem2(opts),
        Suite::Tetra => tetra(),
        Suite::Subspaces => subspaces(opts),
        Suite::All => [lemmas(opts), theorem2(opts), tetra(), subspaces(opts)].concat(),
    }
}

fn apply(u: &ComplexMatrix, s: &PureState) -> PureState {
    PureState::normalized(s.space().clone(), u.mat_vec(s.amplitudes())).expect("unitary image")
}

fn other_in_complement(a: &PureState, rng: &mut ChaCha8Rng) -> PureState {
    random_mixing(&orthocomplement_states(std::slice::from_ref(a)), rng).swap_remove(0)
}

/// Orthonormal pair spanning the support of a random mixture of two product
/// states, with the ratio of its eigenvalues.
fn product_mixture_pair(rng: &mut ChaCha8Rng) -> (PureState, PureState, f64) {
    let sp = StateSpace::two_qubits();
    let a = random_product_state(&sp, rng);
    let b = random_product_state(&sp, rng);
    let (wa, wb) = (rng.random_range(0.2..1.0), rng.random_range(0.2..1.0));
    let eig = hermitian_eig(&(&a.density().scale_real(wa) + &b.density().scale_real(wb))).expect("hermitian");
    let hi = PureState::normalized(sp.clone(), eig.vector(3)).expect("eigenvector");
    let lo = PureState::normalized(sp, eig.vector(2)).expect("eigenvector");
    (hi, lo, eig.eigenvalues[2] / eig.eigenvalues[3])
}

fn lemmas(opts: &Options) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();

    // Support lemma on constructed (E, ρ): E = P + (PSD on the kernel) holds,
    // E = P − ε|v⟩⟨v| with v in the support fails.
    let mut c = Check { name: "support lemma", passed: 0, total: 0, worst: 0.0, worst_label: "worst |tr(Eρ)-1| on holds" };
    for n in 0..200 {
        let d = rng.random_range(3..7);
        let r = rng.random_range(1..d);
        let u = random_unitary(d, &mut rng);
        let w: Vec<f64> = (0..r).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = w.iter().sum();
        let mut rho = ComplexMatrix::zeros(d, d);
        let mut e = ComplexMatrix::zeros(d, d);
        for (i, wi) in w.iter().enumerate() {
            rho += &ComplexMatrix::projector(&u.column(i)).scale_real(wi / total);
            e += &ComplexMatrix::projector(&u.column(i));
        }
        let holds = n % 2 == 0;
        if holds {
            for i in r..d {
                e += &ComplexMatrix::projector(&u.column(i)).scale_real(rng.random_range(0.0..1.0));
            }
        } else {
            let k = rng.random_range(0..r);
            e = &e - &ComplexMatrix::projector(&u.column(k)).scale_real(rng.random_range(0.05..1.0));
        }
        c.total += 1;
        match lemma1_check(&e, &rho) {
            Ok(Lemma1Outcome::HoldsBothWays { trace }) if holds => {
                c.passed += 1;
                c.worst = c.worst.max((trace - 1.0).abs());
            }
            Ok(Lemma1Outcome::Violation { .. }) if !holds => c.passed += 1,
            _ => {}
        }
    }
    out.push(c);

    // Orthogonal two-term decompositions at entry distance 3 are recovered
    // exactly (orthogonal through the first party, generic elsewhere).
    let mut c = Check { name: "unique schmidt-2", passed: 0, total: 100, worst: 0.0, worst_label: "worst reconstruction" };
    let sp = StateSpace::qubits(3);
    for _ in 0..100 {
        let u = random_unitary(2, &mut rng);
        let fa: Vec<Vec<C64>> = vec![u.column(0), random_unit_vector(2, &mut rng), random_unit_vector(2, &mut rng)];
        let fb: Vec<Vec<C64>> = vec![u.column(1), random_unit_vector(2, &mut rng), random_unit_vector(2, &mut rng)];
        let a = PureState::product(&sp, &fa).expect("unit factors");
        let b = PureState::product(&sp, &fb).expect("unit factors");
        let (s, t) = (rng.random_range(0.2..1.0), rng.random_range(0.2..1.0));
        let amps: Vec<C64> = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x * s + y * t).collect();
        let psi = PureState::normalized(sp.clone(), amps).expect("independent");
        if let Schmidt2Class::Schmidt2(d) = schmidt2_classify(&psi) {
            let found = [d.a.tensor(), d.b.tensor()];
            let ray = |v: &[C64], w: &PureState| {
                let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                1.0 - (v.iter().zip(w.amplitudes()).map(|(x, y)| x.conj() * y).sum::<C64>().norm() / n)
            };
            let err = (ray(&found[0], &a) + ray(&found[1], &b)).min(ray(&found[0], &b) + ray(&found[1], &a));
            let sum: Vec<C64> = found[0].iter().zip(&found[1]).map(|(x, y)| x + y).collect();
            let recon = sum.iter().zip(psi.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            c.worst = c.worst.max(recon);
            if d.unique && d.orthogonal && d.entry_distance() == 3 && err < 1e-8 && recon < 1e-8 {
                c.passed += 1;
            }
        }
    }
    out.push(c);

    // Rank-2 cases, each cross-checked against the partial transpose.
    let sp = StateSpace::two_qubits();
    let mut hits = [0usize; 4];
    let mut c = Check { name: "rank-2 cases vs PPT", passed: 0, total: 400, worst: 0.0, worst_label: "-" };
    for n in 0..400 {
        let (psi, phi, lambda) = match n % 4 {
            0 => {
                let u = random_local_unitary(&sp, &mut rng);
                let a = apply(&u, &PureState::basis(&sp, &[0, 0]));
                let b = apply(&u, &PureState::basis(&sp, &[rng.random_range(0..2), 1]));
                (a, b, rng.random_range(0.0..2.0))
            }
            1 => {
                let a = random_product_state(&sp, &mut rng);
                let b = other_in_complement(&a, &mut rng);
                (a, b, 0.0)
            }
            2 => product_mixture_pair(&mut rng),
            _ => {
                let a = random_state(&sp, &mut rng);
                let b = other_in_complement(&a, &mut rng);
                (a, b, rng.random_range(0.0..2.0))
            }
        };
        let r = rank2_separability(&psi, &phi, lambda);
        let slot = match r.case {
            Lemma4Case::I => 0,
            Lemma4Case::II => 1,
            Lemma4Case::III => 2,
            Lemma4Case::Entangled => 3,
            Lemma4Case::Undecided => continue,
        };
        let rho = &psi.density() + &phi.density().scale_real(lambda);
        let pt = hermitian_eig(&partial_transpose(&rho, &[2, 2], 1).expect("2x2")).expect("hermitian").min();
        if (pt >= -1e-10) == r.verdict.is_separable() {
            hits[slot] += 1;
            c.passed += 1;
        }
    }
    out.push(c);
    out.push(Check {
        name: "rank-2 case coverage",
        passed: hits.iter().filter(|&&h| h >= 50).count(),
        total: 4,
        worst: *hits.iter().min().expect("four cases") as f64,
        worst_label: "min hits per case",
    });

    let mut c = Check { name: "lambda* uniqueness", passed: 0, total: 100, worst: 0.0, worst_label: "largest lambda*" };
    for _ in 0..100 {
        let (psi, phi, _) = product_mixture_pair(&mut rng);
        if let Ok(AntiparallelOutcome::Pass { lambda_star, .. }) = antiparallel_test(&psi, &phi) {
            c.worst = c.worst.max(lambda_star);
            let sep = |l: f64| rank2_separability(&psi, &phi, l).verdict.is_separable();
            if sep(lambda_star) && !sep(lambda_star + 1e-3) && (lambda_star < 1e-3 || !sep(lambda_star - 1e-3)) {
                c.passed += 1;
            }
        }
    }
    out.push(c);
    out
}

fn theorem2(opts: &Options) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();

    let mut c = Check { name: "family concurrence sum", passed: 0, total: 0, worst: 0.0, worst_label: "max |sum C - C(phi)|" };
    for j in 0..10 {
        let beta = FRAC_PI_4 * (j + 1) as f64 / 10.0;
        for i in 0..10 {
            let alpha = beta * (i + 1) as f64 / 10.0;
            let (lo, hi) = gamma_range(alpha, beta);
            for k in 0..10 {
                let gamma = lo + (hi - lo) * k as f64 / 9.0;
                c.total += 1;
                let Ok(p) = FamilyParams::new(alpha, beta, gamma) else { continue };
                let Ok((phi, basis)) = family_sep_not_locc(&p) else { continue };
                let sum: f64 = basis.iter().filter_map(|b| concurrence(b).ok()).sum();
                let err = (sum - concurrence(&phi).unwrap_or(f64::NAN)).abs();
                c.worst = c.worst.max(err);
                c.passed += (err <= 1e-9) as usize;
            }
        }
    }
    out.push(c);

    let mut c = Check { name: "separable, not LOCC", passed: 0, total: 100, worst: 0.0, worst_label: "worst certificate error" };
    for _ in 0..100 {
        let beta = rng.random_range(0.05..FRAC_PI_4);
        let alpha = beta * rng.random_range(0.05..0.95);
        let (lo, hi) = gamma_range(alpha, beta);
        let gamma = lo + (hi - lo) * rng.random_range(0.05..0.95);
        let Ok((phi, basis)) = FamilyParams::new(alpha, beta, gamma).and_then(|p| family_sep_not_locc(&p)) else { continue };
        let Ok(inst) = DiscriminationInstance::pure(basis, Some(phi)) else { continue };
        let Ok(v) = decide(&inst) else { continue };
        if let Some(cert) = &v.certificate {
            let k = verify_certificate(cert, &inst.densities());
            c.worst = c.worst.max(k.completeness.max(k.discrimination).max(k.evidence));
            if k.passes() && v.status == Status::Distinguishable && v.locc_flag == LoccFlag::LoccIndistinguishable {
                c.passed += 1;
            }
        }
    }
    out.push(c);

    let sp = StateSpace::two_qubits();
    let mut c = Check { name: "decider vs relaxation", passed: 0, total: opts.samples, worst: 0.0, worst_label: "worst feasible residual" };
    for _ in 0..opts.samples {
        let phi = random_state(&sp, &mut rng);
        let basis = random_mixing(&orthocomplement_states(std::slice::from_ref(&phi)), &mut rng);
        let (Ok(v), Ok(f)) = (
            decide_2x2_basis(&phi, &basis),
            FeasibilityProblem::from_states(&basis).and_then(|p| feasibility_solve(&p)),
        ) else {
            continue;
        };
        let agree = match (&v.status, &f) {
            (Status::Distinguishable, FeasibilityOutcome::Feasible(p)) => {
                c.worst = c.worst.max(p.residual);
                p.residual < 1e-7
            }
            (Status::Indistinguishable, FeasibilityOutcome::NoConvergence(d)) => d.residual > 1e-4,
            _ => false,
        };
        c.passed += agree as usize;
    }
    out.push(c);
    out
}

fn tetra() -> Vec<Check> {
    let mut round = Check { name: "tetrahedron round trip", passed: 0, total: 0, worst: 0.0, worst_label: "max concurrence error" };
    let mut verdicts = Check { name: "face vs interior verdicts", passed: 0, total: 0, worst: 0.0, worst_label: "max unitarity defect" };
    for a in 0..=20usize {
        for b in 0..=20usize {
            for c in 0..=20usize {
                let x = [a, b, c].map(|n| n as f64 * 0.05);
                let Ok(p) = TetraPoint::new(x[0], x[1], x[2]) else { continue };
                round.total += 1;
                verdicts.total += 1;
                let Ok(u) = tetra_unitary(&p) else { continue };
                let defect = u.unitarity_defect();
                verdicts.worst = verdicts.worst.max(defect);
                let Ok(basis) = basis_from_unitary(&u) else { continue };
                let err = basis.iter().zip(x).map(|(s, t)| (concurrence(s).unwrap_or(f64::NAN) - t).abs()).fold(0.0, f64::max);
                round.worst = round.worst.max(err);
                round.passed += (err < 1e-8 && defect < 1e-10) as usize;
                let want = if a + b + c == 20 { Status::Distinguishable } else { Status::Indistinguishable };
                verdicts.passed += decide_max_ent_basis(&basis).is_ok_and(|v| v.status == want) as usize;
            }
        }
    }
    vec![round, verdicts]
}

fn subspaces(opts: &Options) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    for (kind, name, stall_name) in [
        (SubspaceKind::Bipartite3x3Dim7, "dim-7 P0/P1/P2", "dim-7 relaxation stalls"),
        (SubspaceKind::Tripartite222Dim6, "dim-6 P0/P1/P2", "dim-6 relaxation stalls"),
    ] {
        let spec = indistinguishable_subspace(kind);
        let report = verify_p0_p1_p2(&spec);
        for p in [&report.p0, &report.p1, &report.p2] {
            log::info!("{name}: {}", p.detail);
        }
        let product_ok = report.product.as_ref().is_some_and(|p| p.same_ray(&spec.phi2, 1e-9));
        out.push(Check {
            name,
            passed: [report.p0.passed && product_ok, report.p1.passed, report.p2.passed].iter().filter(|&&b| b).count(),
            total: 3,
            worst: 0.0,
            worst_label: "-",
        });
        let mut c = Check { name: stall_name, passed: 0, total: opts.samples, worst: f64::INFINITY, worst_label: "min stalled residual" };
        for _ in 0..opts.samples {
            let basis = random_mixing(&spec.complement, &mut rng);
            let Ok(v) = DiscriminationInstance::pure(basis, None).and_then(|i| decide(&i)) else { continue };
            if let Some(f) = &v.feasibility {
                c.worst = c.worst.min(f.residual);
                c.passed += (v.status == Status::Undecided && f.stalled && f.residual > 1e-4) as usize;
            }
        }
        out.push(c);
    }
    out
}
