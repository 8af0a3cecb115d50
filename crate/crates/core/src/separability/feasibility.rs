//! Cyclic Dykstra projections for the PSD∩PPT relaxation of the
//! distinguishability feasibility problem: find `E_1..E_n ⪰ 0` with
//! `Σ E_k = P_0` and every `P_k + E_k` PPT across the declared cuts.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, partial_transpose_parties, psd_part, ComplexMatrix};
use crate::states::{PureState, StateSpace};
use crate::tol::tolerances;

/// Residuals are only evaluated every this many cycles.
const CHECK_EVERY: usize = 10;

#[derive(Debug, Clone)]
pub struct FeasibilityProblem {
    pub space: StateSpace,
    pub projectors: Vec<ComplexMatrix>,
    /// `I − Σ P_k`.
    pub p0: ComplexMatrix,
    /// Party subsets whose partial transposes must stay PSD.
    pub cuts: Vec<Vec<usize>>,
    pub max_iterations: usize,
    /// Stall when the residual improves by less than
    /// `stall_improvement + stall_relative · residual` over `stall_window`
    /// iterations. The relative part catches the slow creep of inconsistent
    /// problems, where absolute improvements stay around 1e-9 per window.
    pub stall_window: usize,
    pub stall_improvement: f64,
    pub stall_relative: f64,
    /// Stop early once the residual is below this.
    pub target_residual: f64,
}

impl FeasibilityProblem {
    /// Validates that the `P_k` are mutually orthogonal projectors and builds
    /// `P_0`; cuts default to every bipartition of the space.
    pub fn new(space: &StateSpace, projectors: Vec<ComplexMatrix>) -> Result<Self> {
        let d = space.dim();
        if projectors.is_empty() {
            return Err(Error::InvalidInstance("no projectors".into()));
        }
        let mut sum = ComplexMatrix::zeros(d, d);
        for (k, p) in projectors.iter().enumerate() {
            if p.rows() != d || !p.is_square() {
                return Err(Error::DimensionMismatch(format!("projector {k} is {}x{}, space has dim {d}", p.rows(), p.cols())));
            }
            if p.matmul(p).max_abs_diff(p) > 1e-9 || !p.is_hermitian(1e-10) {
                return Err(Error::InvalidInstance(format!("operator {k} is not an orthogonal projector")));
            }
            sum += p;
        }
        let p0 = &ComplexMatrix::identity(d) - &sum;
        if p0.matmul(&p0).max_abs_diff(&p0) > 1e-9 {
            return Err(Error::InvalidInstance("projectors are not mutually orthogonal".into()));
        }
        let tol = tolerances();
        Ok(Self {
            space: space.clone(),
            projectors,
            p0,
            cuts: space.bipartitions(),
            max_iterations: 20_000,
            stall_window: 500,
            stall_improvement: 1e-12,
            stall_relative: 1e-4,
            target_residual: tol.feasible_residual * 1e-2,
        })
    }

    /// Rank-one projectors of orthonormal pure states.
    pub fn from_states(states: &[PureState]) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::InvalidInstance("no states".into()))?;
        Self::new(first.space(), states.iter().map(PureState::density).collect())
    }

    /// Whether PSD∩PPT coincides with separability for every block.
    pub fn relaxation_is_exact(&self) -> bool {
        self.space.ppt_is_exact()
    }
}

#[derive(Debug, Clone)]
pub struct FeasiblePoint {
    pub e: Vec<ComplexMatrix>,
    pub residual: f64,
    pub iterations: usize,
    /// False outside 2⊗2 / 2⊗3: the point is only PPT-feasible.
    pub exact: bool,
}

#[derive(Debug, Clone)]
pub struct SolveDiagnostics {
    pub residual: f64,
    pub iterations: usize,
    /// The residual could not be lowered further: the stall rule fired, or the
    /// rank-one reduction reached its exact minimum violation.
    pub stalled: bool,
    /// Last point of the affine iterate.
    pub e: Vec<ComplexMatrix>,
}

impl SolveDiagnostics {
    /// Residual above the empirical infeasibility margin.
    pub fn empirically_infeasible(&self) -> bool {
        self.residual > tolerances().infeasible_residual
    }
}

#[derive(Debug, Clone)]
pub enum FeasibilityOutcome {
    Feasible(FeasiblePoint),
    NoConvergence(SolveDiagnostics),
}

impl FeasibilityOutcome {
    pub fn residual(&self) -> f64 {
        match self {
            Self::Feasible(p) => p.residual,
            Self::NoConvergence(d) => d.residual,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, Self::Feasible(_))
    }
}

/// Projection onto `{E_k = P0 E_k P0, Σ E_k = P0}`.
fn project_affine(e: &mut [ComplexMatrix], p0: &ComplexMatrix) {
    let n = e.len() as f64;
    let mut sum = ComplexMatrix::zeros(p0.rows(), p0.cols());
    for ek in e.iter_mut() {
        *ek = p0.matmul(&ek.hermitian_part()).matmul(p0);
        sum += ek;
    }
    let shift = (&sum - p0).scale_real(1.0 / n);
    for ek in e.iter_mut() {
        *ek -= &shift;
    }
}

/// Nearest `E` with `Γ(P + E) ⪰ 0` (Γ = identity for the PSD set on `E` itself).
fn project_block(e: &ComplexMatrix, p: Option<&ComplexMatrix>, dims: &[usize], cut: Option<&[usize]>) -> Result<ComplexMatrix> {
    let shifted = match p {
        Some(p) => e + p,
        None => e.clone(),
    };
    let moved = match cut {
        Some(c) => partial_transpose_parties(&shifted, dims, c)?,
        None => shifted,
    };
    let (clamped, _) = psd_part(&moved)?;
    let back = match cut {
        Some(c) => partial_transpose_parties(&clamped, dims, c)?,
        None => clamped,
    };
    Ok(match p {
        Some(p) => &back - p,
        None => back,
    })
}

fn negative_norm(a: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eig(a)?.eigenvalues.iter().filter(|&&x| x < 0.0).map(|x| x * x).sum::<f64>().sqrt())
}

/// Largest Frobenius norm of a negative part over all constraints, at a point
/// already satisfying the affine constraints.
fn residual(problem: &FeasibilityProblem, e: &[ComplexMatrix]) -> Result<f64> {
    let dims = problem.space.dims();
    let mut worst = 0.0f64;
    for (ek, pk) in e.iter().zip(&problem.projectors) {
        worst = worst.max(negative_norm(ek)?);
        let block = ek + pk;
        for cut in &problem.cuts {
            worst = worst.max(negative_norm(&partial_transpose_parties(&block, dims, cut)?)?);
        }
    }
    Ok(worst)
}

/// Smallest eigenvalue over the PPT constraints of `P + μ·P0`, and `μ` itself
/// (for `E = μ·P0 ⪰ 0`); negated and clamped at zero.
fn violation(problem: &FeasibilityProblem, p: &ComplexMatrix, mu: f64) -> Result<f64> {
    let block = p + &problem.p0.scale_real(mu);
    let mut worst = (-mu).max(0.0);
    for cut in &problem.cuts {
        let m = hermitian_eig(&partial_transpose_parties(&block, problem.space.dims(), cut)?)?.min();
        worst = worst.max(-m);
    }
    Ok(worst)
}

/// Interval `{μ ∈ [lo, hi] : violation ≤ t}` around a minimizer `m`.
fn level_interval(f: &dyn Fn(f64) -> Result<f64>, m: f64, t: f64, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let edge = |inside: f64, outside: f64| -> Result<f64> {
        if f(outside)? <= t {
            return Ok(outside);
        }
        let (mut a, mut b) = (inside, outside);
        for _ in 0..80 {
            let mid = 0.5 * (a + b);
            if f(mid)? <= t {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(a)
    };
    Ok((edge(m, lo)?, edge(m, hi)?))
}

/// Golden-section minimum of a convex function on `[lo, hi]`.
fn convex_min(f: &dyn Fn(f64) -> Result<f64>, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let (mut c, mut d) = (b - r * (b - a), a + r * (b - a));
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..100 {
        if fc <= fd {
            b = d;
            (d, fd) = (c, fc);
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            (c, fc) = (d, fd);
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    let m = 0.5 * (a + b);
    Ok((m, f(m)?))
}

/// With `rank P0 = 1` every `E_k = μ_k·P0`, each constraint involves a single
/// `μ_k`, and its violation is convex in `μ_k`. The least achievable worst
/// violation is found by bisecting on the level `t`: at level `t` each `μ_k`
/// ranges over an interval `[a_k, b_k]`, and `Σμ_k = 1` is reachable iff
/// `Σa_k ≤ 1 ≤ Σb_k`.
fn solve_rank_one(problem: &FeasibilityProblem) -> Result<FeasibilityOutcome> {
    let (lo, hi) = (-1.0, 2.0);
    let fs: Vec<Box<dyn Fn(f64) -> Result<f64> + '_>> =
        problem.projectors.iter().map(|p| Box::new(move |mu| violation(problem, p, mu)) as Box<dyn Fn(f64) -> Result<f64>>).collect();
    let mins = fs.iter().map(|f| convex_min(f.as_ref(), lo, hi)).collect::<Result<Vec<_>>>()?;
    let intervals = |t: f64| -> Result<Option<Vec<(f64, f64)>>> {
        let mut out = Vec::with_capacity(fs.len());
        for (f, &(m, fm)) in fs.iter().zip(&mins) {
            if fm > t {
                return Ok(None);
            }
            out.push(level_interval(f.as_ref(), m, t, lo, hi)?);
        }
        let (sa, sb): (f64, f64) = out.iter().fold((0.0, 0.0), |(x, y), &(a, b)| (x + a, y + b));
        Ok((sa <= 1.0 && 1.0 <= sb).then_some(out))
    };
    let mut t_lo = mins.iter().map(|&(_, fm)| fm).fold(0.0, f64::max);
    let uniform = 1.0 / fs.len() as f64;
    let mut t_hi = fs.iter().map(|f| f(uniform)).collect::<Result<Vec<_>>>()?.into_iter().fold(t_lo, f64::max);
    let mut iterations = 0;
    let mut best = intervals(t_hi)?.expect("uniform weights are feasible at their own violation");
    if let Some(found) = intervals(t_lo)? {
        best = found;
        t_hi = t_lo;
    }
    // Relative precision on t is enough: only the residual scale is reported.
    while t_hi - t_lo > (1e-3 * t_hi).max(1e-15) && iterations < 200 {
        iterations += 1;
        let mid = 0.5 * (t_lo + t_hi);
        match intervals(mid)? {
            Some(found) => {
                best = found;
                t_hi = mid;
            }
            None => t_lo = mid,
        }
    }
    let (sa, width): (f64, f64) = best.iter().fold((0.0, 0.0), |(x, w), &(a, b)| (x + a, w + b - a));
    let theta = if width > 0.0 { ((1.0 - sa) / width).clamp(0.0, 1.0) } else { 0.0 };
    let e: Vec<ComplexMatrix> = best.iter().map(|&(a, b)| problem.p0.scale_real(a + theta * (b - a))).collect();
    let r = residual(problem, &e)?;
    if r < tolerances().feasible_residual {
        Ok(FeasibilityOutcome::Feasible(FeasiblePoint { e, residual: r, iterations, exact: problem.relaxation_is_exact() }))
    } else {
        Ok(FeasibilityOutcome::NoConvergence(SolveDiagnostics { residual: r, iterations, stalled: true, e }))
    }
}

/// Solves the relaxation: exactly through a one-dimensional reduction when
/// `P0` has rank one, by cyclic Dykstra projections otherwise.
pub fn feasibility_solve(problem: &FeasibilityProblem) -> Result<FeasibilityOutcome> {
    if (problem.p0.trace().re - 1.0).abs() < 1e-9 {
        return solve_rank_one(problem);
    }
    let n = problem.projectors.len();
    let dims = problem.space.dims();
    let feasible_tol = tolerances().feasible_residual;
    let exact = problem.relaxation_is_exact();

    let mut x: Vec<ComplexMatrix> = vec![problem.p0.scale_real(1.0 / n as f64); n];
    // Dykstra increments, one per (block, set); set 0 is PSD, then the cuts.
    let sets = 1 + problem.cuts.len();
    let mut inc: Vec<Vec<ComplexMatrix>> = vec![vec![ComplexMatrix::zeros(problem.p0.rows(), problem.p0.rows()); sets]; n];

    let mut history: Vec<(usize, f64)> = Vec::new();
    let mut best = f64::INFINITY;
    let mut last_point = x.clone();
    let mut iterations = 0;
    let mut stalled = false;
    while iterations < problem.max_iterations {
        iterations += 1;
        project_affine(&mut x, &problem.p0);
        for k in 0..n {
            for s in 0..sets {
                let y = &x[k] + &inc[k][s];
                let proj = if s == 0 {
                    project_block(&y, None, dims, None)?
                } else {
                    project_block(&y, Some(&problem.projectors[k]), dims, Some(&problem.cuts[s - 1]))?
                };
                inc[k][s] = &y - &proj;
                x[k] = proj;
            }
        }
        if iterations % CHECK_EVERY == 0 || iterations == problem.max_iterations {
            let mut point = x.clone();
            project_affine(&mut point, &problem.p0);
            let r = residual(problem, &point)?;
            if r < best {
                best = r;
                last_point = point;
            }
            history.push((iterations, best));
            if best < problem.target_residual {
                break;
            }
            let window_start = iterations.saturating_sub(problem.stall_window);
            if iterations >= problem.stall_window {
                if let Some(&(_, old)) = history.iter().find(|(it, _)| *it >= window_start) {
                    if old - best < problem.stall_improvement + problem.stall_relative * best {
                        stalled = true;
                        break;
                    }
                }
            }
        }
    }
    if best < feasible_tol {
        Ok(FeasibilityOutcome::Feasible(FeasiblePoint { e: last_point, residual: best, iterations, exact }))
    } else {
        Ok(FeasibilityOutcome::NoConvergence(SolveDiagnostics { residual: best, iterations, stalled, e: last_point }))
    }
}
