//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on any failure.

use std::f64::consts::{FRAC_PI_4, PI};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sepdisc::constructions::{
    basis_for_targets, basis_from_unitary, family_sep_not_locc, gamma_range, indistinguishable_subspace,
    tetra_unitary, verify_p0_p1_p2, FamilyParams, SubspaceKind, TetraPoint,
};
use sepdisc::discrimination::{
    decide, decide_2x2_basis, decide_h3, decide_max_ent_basis, subspace_verdict, verify_certificate,
    DiscriminationInstance, LoccFlag, Status, SubspaceVerdict,
};
use sepdisc::linalg::{hermitian_eig, partial_transpose, ComplexMatrix, C64};
use sepdisc::random::{
    random_local_unitary, random_mixing, random_product_state, random_state, random_unit_vector, random_unitary,
};
use sepdisc::separability::{
    antiparallel_test, feasibility_solve, lemma1_check, rank2_separability, AntiparallelOutcome, FeasibilityOutcome,
    FeasibilityProblem, Lemma1Outcome, Lemma4Case,
};
use sepdisc::states::{concurrence, digits, orthocomplement_states, PureState, StateSpace};
use sepdisc::tensor_rank::is_product;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn apply(u: &ComplexMatrix, s: &PureState) -> PureState {
    PureState::normalized(s.space().clone(), u.mat_vec(s.amplitudes())).unwrap()
}

fn real_state(dims: &[usize], amps: &[f64]) -> PureState {
    PureState::normalized(StateSpace::new(dims).unwrap(), amps.iter().map(|&x| C64::new(x, 0.0)).collect()).unwrap()
}

/// Analytic decider against the PPT relaxation on random and constructed bases.
fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sp = StateSpace::two_qubits();
    let mut instances = Vec::new();
    for _ in 0..1000 {
        let phi = random_state(&sp, &mut rng);
        let basis = random_mixing(&orthocomplement_states(std::slice::from_ref(&phi)), &mut rng);
        instances.push((phi, basis));
    }
    // Distinguishable instances: prescribed concurrences under local unitaries.
    for _ in 0..100 {
        let w: [f64; 3] = std::array::from_fn(|_| rng.random_range(0.0..1.0));
        let s = rng.random_range(0.05..1.0) / w.iter().sum::<f64>();
        let (phi, basis) = basis_for_targets(w.map(|x| x * s)).unwrap();
        let u = random_local_unitary(&sp, &mut rng);
        instances.push((apply(&u, &phi), basis.iter().map(|b| apply(&u, b)).collect()));
    }
    let (mut agree, mut yes, mut worst_yes, mut best_no) = (0, 0, 0.0f64, f64::INFINITY);
    for (phi, basis) in &instances {
        let analytic = decide_2x2_basis(phi, basis).unwrap();
        let outcome = feasibility_solve(&FeasibilityProblem::from_states(basis).unwrap()).unwrap();
        let ok = match (&analytic.status, &outcome) {
            (Status::Distinguishable, FeasibilityOutcome::Feasible(p)) => {
                yes += 1;
                worst_yes = worst_yes.max(p.residual);
                p.residual < 1e-7
            }
            (Status::Indistinguishable, FeasibilityOutcome::NoConvergence(d)) => {
                best_no = best_no.min(d.residual);
                d.residual > 1e-4
            }
            _ => false,
        };
        agree += ok as usize;
    }
    (
        agree == instances.len(),
        format!(
            "{agree}/{} agree ({yes} distinguishable, worst feasible residual {worst_yes:.1e}, smallest stalled residual {best_no:.3e})",
            instances.len()
        ),
    )
}

/// Concurrence-sum identity on a 20³ grid and the product endpoints.
fn criterion_2() -> Outcome {
    let mut worst = 0.0f64;
    let mut endpoint_failures = 0;
    let mut endpoints = 0;
    for j in 0..20 {
        let beta = FRAC_PI_4 * (j + 1) as f64 / 20.0;
        for i in 0..20 {
            let alpha = beta * (i + 1) as f64 / 20.0;
            let (lo, hi) = gamma_range(alpha, beta);
            for k in 0..20 {
                let gamma = lo + (hi - lo) * k as f64 / 19.0;
                let (phi, basis) = family_sep_not_locc(&FamilyParams::new(alpha, beta, gamma).unwrap()).unwrap();
                let sum: f64 = basis.iter().map(|b| concurrence(b).unwrap()).sum();
                worst = worst.max((sum - concurrence(&phi).unwrap()).abs());
                // The range collapses when alpha = beta; endpoints are distinct only below.
                if (k == 0 || k == 19) && i < 19 {
                    endpoints += 1;
                    let products = basis[1..].iter().filter(|b| concurrence(b).unwrap() < 1e-9).count();
                    if products != 1 {
                        endpoint_failures += 1;
                    }
                }
            }
        }
    }
    (
        worst <= 1e-9 && endpoint_failures == 0,
        format!("max |ΣC − C(Φ)| = {worst:.2e}; {endpoint_failures}/{endpoints} endpoints without exactly one product state"),
    )
}

/// Strictly interior family members: certified and flagged LOCC-indistinguishable.
fn criterion_3() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut good = 0;
    for _ in 0..100 {
        let beta = rng.random_range(0.05..FRAC_PI_4);
        let alpha = beta * rng.random_range(0.05..0.95);
        let (lo, hi) = gamma_range(alpha, beta);
        let gamma = lo + (hi - lo) * rng.random_range(0.05..0.95);
        let (phi, basis) = family_sep_not_locc(&FamilyParams::new(alpha, beta, gamma).unwrap()).unwrap();
        let inst = DiscriminationInstance::pure(basis.clone(), Some(phi)).unwrap();
        let v = decide(&inst).unwrap();
        let entangled = basis.iter().filter(|b| !is_product(b)).count();
        let cert_ok = v.certificate.as_ref().is_some_and(|c| verify_certificate(c, &inst.densities()).passes());
        if v.status == Status::Distinguishable && cert_ok && entangled >= 2 && v.locc_flag == LoccFlag::LoccIndistinguishable {
            good += 1;
        }
    }
    (good == 100, format!("{good}/100 distinguishable with verified certificate and LOCC flag"))
}

/// Tetrahedron grid round trip and the face/interior split.
fn criterion_4() -> Outcome {
    let (mut worst, mut defect, mut points, mut face, mut wrong) = (0.0f64, 0.0f64, 0, 0, 0);
    for a in 0..=20 {
        for b in 0..=20 {
            for c in 0..=20 {
                let x = [a, b, c].map(|n| n as f64 * 0.05);
                let Ok(p) = TetraPoint::new(x[0], x[1], x[2]) else { continue };
                points += 1;
                let u = tetra_unitary(&p).unwrap();
                defect = defect.max(u.unitarity_defect());
                let basis = basis_from_unitary(&u).unwrap();
                for (s, t) in basis.iter().zip(x) {
                    worst = worst.max((concurrence(s).unwrap() - t).abs());
                }
                let v = decide_max_ent_basis(&basis).unwrap();
                let on_face = a + b + c == 20;
                face += on_face as usize;
                let want = if on_face { Status::Distinguishable } else { Status::Indistinguishable };
                wrong += (v.status != want) as usize;
            }
        }
    }
    (
        worst < 1e-8 && defect < 1e-10 && wrong == 0,
        format!("{points} points ({face} on the face): max concurrence error {worst:.2e}, unitarity defect {defect:.2e}, {wrong} wrong verdicts"),
    )
}

/// W, GHZ-type and α|000⟩+β|+++⟩ complements.
fn criterion_5() -> Outcome {
    let mut failures = Vec::new();
    let w = real_state(&[2, 2, 2], &[0.0, 1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
    if !matches!(subspace_verdict(&w).unwrap(), SubspaceVerdict::NoDistinguishableBasis) {
        failures.push("W".to_string());
    }
    for k in 1..=5 {
        let theta = k as f64 * PI / 12.0 - 0.1;
        let mut a = vec![0.0; 8];
        a[0] = theta.cos();
        a[7] = theta.sin();
        let phi = real_state(&[2, 2, 2], &a);
        match subspace_verdict(&phi).unwrap() {
            SubspaceVerdict::HasLoccBasis(basis) if decide_h3(&phi, &basis).unwrap().is_distinguishable() => {}
            other => failures.push(format!("GHZ θ={theta:.3}: {other:?}")),
        }
    }
    for k in 1..=5 {
        let r = k as f64 / 3.0;
        let mut a = vec![1.0 / 8f64.sqrt(); 8];
        a[0] += r;
        let phi = real_state(&[2, 2, 2], &a);
        if !matches!(subspace_verdict(&phi).unwrap(), SubspaceVerdict::NoDistinguishableBasis) {
            failures.push(format!("α/β = {r:.3}"));
        }
    }
    (failures.is_empty(), format!("11 states, {} misclassified {failures:?}", failures.len()))
}

/// Shipped subspaces: P0/P1/P2 and stalled feasibility on random bases.
fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut notes = Vec::new();
    let mut ok = true;
    for kind in [SubspaceKind::Bipartite3x3Dim7, SubspaceKind::Tripartite222Dim6] {
        let spec = indistinguishable_subspace(kind);
        let report = verify_p0_p1_p2(&spec);
        let product_ok = report.product.as_ref().is_some_and(|p| p.same_ray(&spec.phi2, 1e-9));
        ok &= report.all_pass() && product_ok;
        let mut min_residual = f64::INFINITY;
        let mut stalls = 0;
        for _ in 0..20 {
            let basis = random_mixing(&spec.complement, &mut rng);
            let v = decide(&DiscriminationInstance::pure(basis, None).unwrap()).unwrap();
            if let Some(f) = &v.feasibility {
                min_residual = min_residual.min(f.residual);
                if v.status == Status::Undecided && f.stalled && f.residual > 1e-4 {
                    stalls += 1;
                }
            }
        }
        ok &= stalls == 20;
        notes.push(format!("{kind:?}: P0/P1/P2 {}, {stalls}/20 stalled (min residual {min_residual:.3e})", report.all_pass() && product_ok));
    }
    (ok, notes.join("; "))
}

fn pt_min(rho: &ComplexMatrix) -> f64 {
    hermitian_eig(&partial_transpose(rho, &[2, 2], 1).unwrap()).unwrap().min()
}

/// Orthogonal pair spanning the support of `wa|a⟩⟨a| + wb|b⟩⟨b|`, plus the weight ratio.
fn pair_from_products(rng: &mut ChaCha8Rng) -> (PureState, PureState, f64) {
    let sp = StateSpace::two_qubits();
    let a = random_product_state(&sp, rng);
    let b = random_product_state(&sp, rng);
    let (wa, wb) = (rng.random_range(0.2..1.0), rng.random_range(0.2..1.0));
    let eig = hermitian_eig(&(&a.density().scale_real(wa) + &b.density().scale_real(wb))).unwrap();
    let hi = PureState::normalized(sp.clone(), eig.vector(3)).unwrap();
    let lo = PureState::normalized(sp, eig.vector(2)).unwrap();
    (hi, lo, eig.eigenvalues[2] / eig.eigenvalues[3])
}

/// Support lemma, rank-2 case coverage with PPT cross-check, λ* uniqueness.
fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    // Support lemma: E = P + Q G Q holds both ways; E = P − ε|v⟩⟨v| fails both ways.
    let (mut l1_ok, mut l1_total) = (0, 0);
    for n in 0..200 {
        let d = rng.random_range(3..7);
        let r = rng.random_range(1..d);
        let u = random_unitary(d, &mut rng);
        let weights: Vec<f64> = (0..r).map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let mut rho = ComplexMatrix::zeros(d, d);
        let mut p = ComplexMatrix::zeros(d, d);
        for (i, w) in weights.iter().enumerate() {
            let col = u.column(i);
            rho += &ComplexMatrix::projector(&col).scale_real(w / total);
            p += &ComplexMatrix::projector(&col);
        }
        let e = if n % 2 == 0 {
            let mut e = p.clone();
            for i in r..d {
                e += &ComplexMatrix::projector(&u.column(i)).scale_real(rng.random_range(0.0..1.0));
            }
            e
        } else {
            let mut v = vec![C64::new(0.0, 0.0); d];
            for i in 0..r {
                let z = random_unit_vector(1, &mut rng)[0] * rng.random_range(0.2..1.0);
                v = v.iter().zip(u.column(i)).map(|(a, b)| a + z * b).collect();
            }
            let n2: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let v: Vec<C64> = v.iter().map(|z| z / n2).collect();
            &p - &ComplexMatrix::projector(&v).scale_real(rng.random_range(0.05..1.0))
        };
        l1_total += 1;
        let outcome = lemma1_check(&e, &rho).unwrap();
        let want_hold = n % 2 == 0;
        l1_ok += match outcome {
            Lemma1Outcome::HoldsBothWays { .. } => want_hold,
            Lemma1Outcome::Violation { .. } => !want_hold,
            Lemma1Outcome::Inconsistent { .. } => false,
        } as usize;
    }

    // Rank-2 cases, each cross-checked against the partial transpose.
    let sp = StateSpace::two_qubits();
    let mut hits = [0usize; 4];
    let mut pt_disagree = 0;
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
                let mut rest = random_mixing(&orthocomplement_states(std::slice::from_ref(&a)), &mut rng);
                (a, rest.swap_remove(0), 0.0)
            }
            2 => pair_from_products(&mut rng),
            _ => {
                let a = random_state(&sp, &mut rng);
                let mut rest = random_mixing(&orthocomplement_states(std::slice::from_ref(&a)), &mut rng);
                (a, rest.swap_remove(0), rng.random_range(0.0..2.0))
            }
        };
        let r = rank2_separability(&psi, &phi, lambda);
        let slot = match r.case {
            Lemma4Case::I => 0,
            Lemma4Case::II => 1,
            Lemma4Case::III => 2,
            Lemma4Case::Entangled => 3,
            Lemma4Case::Undecided => {
                pt_disagree += 1;
                continue;
            }
        };
        hits[slot] += 1;
        let rho = &psi.density() + &phi.density().scale_real(lambda);
        let ppt = pt_min(&rho) >= -1e-10;
        if ppt != r.verdict.is_separable() {
            pt_disagree += 1;
        }
    }

    // λ* from the anti-parallel test is the only separable weight.
    let mut unique_ok = 0;
    for _ in 0..100 {
        let (psi, phi, _) = pair_from_products(&mut rng);
        let ok = match antiparallel_test(&psi, &phi) {
            Ok(AntiparallelOutcome::Pass { lambda_star, .. }) => {
                rank2_separability(&psi, &phi, lambda_star).verdict.is_separable()
                    && !rank2_separability(&psi, &phi, lambda_star + 1e-3).verdict.is_separable()
                    && (lambda_star < 1e-3 || !rank2_separability(&psi, &phi, lambda_star - 1e-3).verdict.is_separable())
            }
            _ => false,
        };
        unique_ok += ok as usize;
    }

    let ok = l1_ok == l1_total && hits.iter().all(|&h| h >= 50) && pt_disagree == 0 && unique_ok == 100;
    (
        ok,
        format!(
            "support lemma {l1_ok}/{l1_total}; rank-2 cases i/ii/iii/entangled = {hits:?}, {pt_disagree} PPT disagreements; λ* unique {unique_ok}/100"
        ),
    )
}

fn standard_basis(sp: &StateSpace) -> Vec<PureState> {
    (0..sp.dim()).map(|i| PureState::basis(sp, &digits(i, sp.dims()))).collect()
}

/// Product basis whose second-party basis depends on the first party's outcome.
fn branching_basis(sp: &StateSpace, rng: &mut ChaCha8Rng) -> Vec<PureState> {
    let dims = sp.dims();
    let first = random_unitary(dims[0], rng);
    let mut out = Vec::new();
    for i in 0..dims[0] {
        let locals: Vec<ComplexMatrix> = dims[1..].iter().map(|&d| random_unitary(d, rng)).collect();
        let rest: usize = dims[1..].iter().product();
        for j in 0..rest {
            let mut factors = vec![first.column(i)];
            factors.extend(digits(j, &dims[1..]).iter().zip(&locals).map(|(&k, u)| u.column(k)));
            out.push(PureState::product(sp, &factors).unwrap());
        }
    }
    out
}

/// Full bases: product ⟺ distinguishable.
fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let spaces: Vec<StateSpace> = [vec![2, 2], vec![2, 3], vec![3, 3], vec![2, 2, 2]]
        .iter()
        .map(|d| StateSpace::new(d).unwrap())
        .collect();
    let mut prod_ok = 0;
    for n in 0..50 {
        let sp = &spaces[n % spaces.len()];
        let basis = if n % 2 == 0 {
            let u = random_local_unitary(sp, &mut rng);
            standard_basis(sp).iter().map(|s| apply(&u, s)).collect()
        } else {
            branching_basis(sp, &mut rng)
        };
        let v = decide(&DiscriminationInstance::pure(basis, None).unwrap()).unwrap();
        prod_ok += v.is_distinguishable() as usize;
    }
    let mut ent_ok = 0;
    for n in 0..50 {
        let sp = &spaces[n % spaces.len()];
        let basis: Vec<PureState> = match n % 3 {
            0 if n == 0 => vec![
                real_state(&[2, 2], &[1.0, 0.0, 0.0, 1.0]),
                real_state(&[2, 2], &[1.0, 0.0, 0.0, -1.0]),
                real_state(&[2, 2], &[0.0, 1.0, 1.0, 0.0]),
                real_state(&[2, 2], &[0.0, 1.0, -1.0, 0.0]),
            ],
            0 | 1 => {
                let u = random_unitary(sp.dim(), &mut rng);
                standard_basis(sp).iter().map(|s| apply(&u, s)).collect()
            }
            _ => {
                // Product basis with its first and last members rotated into each other.
                let u = random_local_unitary(sp, &mut rng);
                let mut b: Vec<PureState> = standard_basis(sp).iter().map(|s| apply(&u, s)).collect();
                let last = b.len() - 1;
                let mixed = random_mixing(&[b[0].clone(), b[last].clone()], &mut rng);
                b[0] = mixed[0].clone();
                b[last] = mixed[1].clone();
                b
            }
        };
        let has_entangled = basis.iter().any(|s| !is_product(s));
        let v = decide(&DiscriminationInstance::pure(basis, None).unwrap()).unwrap();
        ent_ok += (has_entangled && v.status == Status::Indistinguishable) as usize;
    }
    (
        prod_ok == 50 && ent_ok == 50,
        format!("product bases {prod_ok}/50 distinguishable; entangled bases {ent_ok}/50 indistinguishable"),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("1 analytic vs relaxation on 2⊗2 complement bases", criterion_1),
        ("2 concurrence-sum identity on the family", criterion_2),
        ("3 separable but not LOCC witness", criterion_3),
        ("4 tetrahedron round trip", criterion_4),
        ("5 complement trichotomy", criterion_5),
        ("6 small indistinguishable subspaces", criterion_6),
        ("7 lemma property suites", criterion_7),
        ("8 full-basis criterion", criterion_8),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let (ok, detail) = run();
        let secs = start.elapsed().as_secs_f64();
        println!("{} criterion {name}: {detail} [{secs:.1}s]", if ok { "PASS" } else { "FAIL" });
        failed += (!ok) as usize;
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
