//! Schmidt decompositions, product vectors inside two-dimensional spans, and
//! classification of states with (orthogonal) Schmidt number two.

use crate::error::{Error, Result};
use crate::linalg::{svd, vector, ComplexMatrix, C64, ONE, ZERO};
use crate::states::{reshape, PureState};
use crate::tol::tolerances;

/// Singular-value ratio accepted when certifying a root of the minor
/// polynomials as a product vector. Looser than the rank tolerance because a
/// double root is only determined to about `sqrt(eps)`.
pub const ROOT_PRODUCT_TOL: f64 = 1e-7;

/// Minor polynomials whose coefficients all stay below this (relative to the
/// input scale) are treated as identically zero.
const VANISHING_POLY: f64 = 1e-10;

/// `weight · ⊗ factors`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductVector {
    pub factors: Vec<Vec<C64>>,
    pub weight: C64,
}

impl ProductVector {
    pub fn new(factors: Vec<Vec<C64>>, weight: C64) -> Result<Self> {
        if factors.iter().any(|f| vector::norm(f) == 0.0) {
            return Err(Error::PreconditionViolated("zero factor in product vector".into()));
        }
        Ok(Self { factors, weight })
    }

    pub fn tensor(&self) -> Vec<C64> {
        vector::scaled(&vector::tensor(&self.factors), self.weight)
    }

    pub fn norm(&self) -> f64 {
        self.weight.norm() * self.factors.iter().map(|f| vector::norm(f)).product::<f64>()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(Vec::len).collect()
    }

    /// Same vector with unit factors and a non-negative real weight (the
    /// phase moves into the first factor).
    pub fn canonical(&self) -> Self {
        let mut factors: Vec<Vec<C64>> =
            self.factors.iter().map(|f| vector::normalized(f).expect("nonzero factor")).collect();
        let w = self.weight * self.factors.iter().map(|f| vector::norm(f)).product::<f64>();
        let r = w.norm();
        if r > 0.0 {
            factors[0] = vector::scaled(&factors[0], w / r);
        }
        Self { factors, weight: C64::new(r, 0.0) }
    }
}

#[derive(Debug, Clone)]
pub struct SchmidtInfo {
    pub rank: usize,
    /// Descending, only those above the rank tolerance.
    pub coefficients: Vec<f64>,
    /// Orthonormal vectors on the parties of the cut (in the order given).
    pub left: Vec<Vec<C64>>,
    /// Orthonormal vectors on the remaining parties (in party order).
    pub right: Vec<Vec<C64>>,
}

fn check_cut(parties: usize, rows: &[usize]) -> Result<()> {
    let mut seen = vec![false; parties];
    for &p in rows {
        if p >= parties || seen[p] {
            return Err(Error::BadBipartition(format!("{rows:?} over {parties} parties")));
        }
        seen[p] = true;
    }
    if rows.is_empty() || rows.len() == parties {
        return Err(Error::BadBipartition(format!("{rows:?} is not a proper nonempty subset")));
    }
    Ok(())
}

/// Schmidt decomposition across `rows | rest`:
/// `ψ = Σ c_i |left_i⟩|right_i⟩` in the reshaped layout.
pub fn schmidt_decompose(psi: &PureState, rows: &[usize]) -> Result<SchmidtInfo> {
    check_cut(psi.space().parties(), rows)?;
    Ok(schmidt_of_matrix(&psi.reshape(rows)))
}

fn schmidt_of_matrix(m: &ComplexMatrix) -> SchmidtInfo {
    let s = svd(m);
    let rank = s.rank(tolerances().rank);
    SchmidtInfo {
        rank,
        coefficients: s.singular_values[..rank].to_vec(),
        left: s.u[..rank].to_vec(),
        right: s.v[..rank].iter().map(|v| v.iter().map(C64::conj).collect()).collect(),
    }
}

/// Schmidt rank of a raw amplitude vector across `rows | rest`.
pub fn cut_rank(amps: &[C64], dims: &[usize], rows: &[usize]) -> usize {
    svd(&reshape(amps, dims, rows)).rank(tolerances().rank)
}

/// Factorization of a vector whose single-party cuts all have
/// `σ₂/σ₁ ≤ tol`, or `None`.
pub fn factorize(amps: &[C64], dims: &[usize], tol: f64) -> Option<ProductVector> {
    let mut factors = Vec::with_capacity(dims.len());
    for k in 0..dims.len() {
        let s = svd(&reshape(amps, dims, &[k]));
        let top = s.singular_values[0];
        if top == 0.0 || s.singular_values.get(1).is_some_and(|&x| x > tol * top) {
            return None;
        }
        factors.push(s.u[0].clone());
    }
    let weight = vector::inner(&vector::tensor(&factors), amps);
    Some(ProductVector { factors, weight })
}

/// Product test at the rank tolerance (every single-party cut has rank 1).
pub fn is_product(psi: &PureState) -> bool {
    factorize(psi.amplitudes(), psi.dims(), tolerances().rank).is_some()
}

/// Number of parties where the factors of `a` and `b` are not parallel.
pub fn entry_distance(a: &ProductVector, b: &ProductVector) -> Result<usize> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch(format!("{:?} vs {:?}", a.dims(), b.dims())));
    }
    Ok(a.factors
        .iter()
        .zip(&b.factors)
        .filter(|(x, y)| vector::parallel_defect(x, y) > tolerances().rank)
        .count())
}

#[derive(Debug, Clone)]
pub enum SpanProducts {
    /// At most two product vectors up to scale, each with unit norm.
    Finite(Vec<ProductVector>),
    /// Every vector of the span is a product vector.
    InfinitelyMany,
}

pub fn product_vectors_in_span(psi: &PureState, phi: &PureState) -> Result<SpanProducts> {
    if psi.space() != phi.space() {
        return Err(Error::DimensionMismatch("states live in different spaces".into()));
    }
    products_in_span(psi.amplitudes(), phi.amplitudes(), psi.dims())
}

/// Product vectors in `span{x, y}`. Every 2×2 minor of every single-party
/// reshaping of `s·x + t·y` is a binary quadratic form in `(s, t)`; product
/// vectors are the common zeros. The roots of the largest form are the only
/// candidates, and each is verified directly.
pub fn products_in_span(x: &[C64], y: &[C64], dims: &[usize]) -> Result<SpanProducts> {
    let (nx, ny) = (vector::norm(x), vector::norm(y));
    let overlap = vector::inner(x, y).norm();
    if nx == 0.0 || ny == 0.0 || nx * nx * ny * ny - overlap * overlap <= 1e-12 * nx * nx * ny * ny {
        return Err(Error::NotIndependent);
    }
    let x = vector::scaled(x, C64::new(1.0 / nx, 0.0));
    let y = vector::scaled(y, C64::new(1.0 / ny, 0.0));

    let mut best = [ZERO; 3];
    let mut best_norm = 0.0;
    for k in 0..dims.len() {
        let a = reshape(&x, dims, &[k]);
        let b = reshape(&y, dims, &[k]);
        for_each_minor_form(&a, &b, |form| {
            let n = form.iter().map(C64::norm_sqr).sum::<f64>().sqrt();
            if n > best_norm {
                best_norm = n;
                best = form;
            }
        });
    }
    if best_norm <= VANISHING_POLY {
        return Ok(SpanProducts::InfinitelyMany);
    }

    let mut found: Vec<ProductVector> = Vec::new();
    for (s, t) in binary_quadratic_roots(best) {
        let v = vector::add_scaled(&vector::scaled(&x, s), t, &y);
        let Some(v) = vector::normalized(&v) else { continue };
        let Some(p) = factorize(&v, dims, ROOT_PRODUCT_TOL) else { continue };
        let pv = p.tensor();
        if found.iter().all(|q| vector::parallel_defect(&q.tensor(), &pv) > 1e-9) {
            found.push(p);
        }
    }
    Ok(SpanProducts::Finite(found))
}

/// Calls `f` with `[coef s², coef st, coef t²]` of each 2×2 minor of `s·a + t·b`.
fn for_each_minor_form(a: &ComplexMatrix, b: &ComplexMatrix, mut f: impl FnMut([C64; 3])) {
    let (r, c) = (a.rows(), a.cols());
    for i in 0..r {
        for i2 in i + 1..r {
            for j in 0..c {
                for j2 in j + 1..c {
                    let (a11, a12, a21, a22) = (a[(i, j)], a[(i, j2)], a[(i2, j)], a[(i2, j2)]);
                    let (b11, b12, b21, b22) = (b[(i, j)], b[(i, j2)], b[(i2, j)], b[(i2, j2)]);
                    f([
                        a11 * a22 - a12 * a21,
                        a11 * b22 + b11 * a22 - a12 * b21 - b12 * a21,
                        b11 * b22 - b12 * b21,
                    ]);
                }
            }
        }
    }
}

/// Zeros `(s, t)` on the projective line of `c0 s² + c1 st + c2 t²` (not all
/// coefficients zero). A double root is returned once.
pub fn binary_quadratic_roots([c0, c1, c2]: [C64; 3]) -> Vec<(C64, C64)> {
    let big = c0.norm().max(c2.norm());
    if big <= 1e-12 * c1.norm() {
        // Only the mixed term survives: s·t = 0.
        return vec![(ONE, ZERO), (ZERO, ONE)];
    }
    // Dehomogenize on the larger end coefficient so the leading term is safe.
    let flip = c2.norm() > c0.norm();
    let (a, b, c) = if flip { (c2, c1, c0) } else { (c0, c1, c2) };
    let roots = quadratic_roots(a, b, c);
    roots.into_iter().map(|z| if flip { (ONE, z) } else { (z, ONE) }).collect()
}

/// Roots of `a z² + b z + c` with `a ≠ 0`, cancellation-free.
pub fn quadratic_roots(a: C64, b: C64, c: C64) -> Vec<C64> {
    let disc = b * b - a * c * 4.0;
    if disc.norm() <= 1e-14 * (b.norm_sqr()).max((a * c * 4.0).norm()) {
        return vec![-b / (a * 2.0)];
    }
    let sq = disc.sqrt();
    // Pick the sign that avoids cancellation in b ± sq.
    let q = if (b.conj() * sq).re >= 0.0 { -(b + sq) * 0.5 } else { -(b - sq) * 0.5 };
    if q.norm() == 0.0 {
        return vec![ZERO];
    }
    vec![q / a, c / q]
}

/// A decomposition `ψ = a + b` into two product vectors.
#[derive(Debug, Clone)]
pub struct Schmidt2Decomposition {
    pub a: ProductVector,
    pub b: ProductVector,
    pub orthogonal: bool,
    pub unique: bool,
}

impl Schmidt2Decomposition {
    pub fn entry_distance(&self) -> usize {
        entry_distance(&self.a, &self.b).expect("same space")
    }

    /// `(θ, â, b̂)` with `ψ = cosθ·â + sinθ·b̂`, unit `â, b̂` and
    /// `θ ∈ (0, π/2)`; meaningful when `orthogonal`.
    pub fn angle_form(&self) -> (f64, ProductVector, ProductVector) {
        let a = self.a.canonical();
        let b = self.b.canonical();
        let theta = b.weight.re.atan2(a.weight.re);
        let unit = |p: ProductVector| ProductVector { weight: ONE, ..p };
        (theta, unit(a), unit(b))
    }
}

#[derive(Debug, Clone)]
pub enum Schmidt2Class {
    Product,
    Schmidt2(Schmidt2Decomposition),
    AtLeast3,
    Undecided(String),
}

/// Decides whether `phi` is a product, has a Schmidt-2 decomposition (with
/// orthogonality and uniqueness flags), or needs at least three terms.
pub fn schmidt2_classify(phi: &PureState) -> Schmidt2Class {
    let amps = phi.amplitudes();
    let dims = phi.dims();
    let k = dims.len();
    let single: Vec<usize> = (0..k).map(|p| cut_rank(amps, dims, &[p])).collect();
    if single.iter().all(|&r| r == 1) {
        return Schmidt2Class::Product;
    }
    if single.iter().any(|&r| r >= 3)
        || phi.space().bipartitions().iter().any(|cut| cut_rank(amps, dims, cut) >= 3)
    {
        return Schmidt2Class::AtLeast3;
    }
    let entangled: Vec<usize> = (0..k).filter(|&p| single[p] == 2).collect();
    if entangled.len() == 2 {
        return two_party_core(amps, dims, entangled[0], entangled[1]);
    }

    // Three or more parties carry rank 2. Any decomposition a + b restricts
    // on the cut j | rest to a pair of product vectors spanning the rest-span.
    let j = entangled[0];
    let info = schmidt_of_matrix(&reshape(amps, dims, &[j]));
    let rest_dims: Vec<usize> = (0..k).filter(|&p| p != j).map(|p| dims[p]).collect();
    let found = match products_in_span(&info.right[0], &info.right[1], &rest_dims) {
        Ok(SpanProducts::Finite(v)) => v,
        Ok(SpanProducts::InfinitelyMany) => {
            return Schmidt2Class::Undecided(format!(
                "rest-span of party {j} is all product, inconsistent with cut ranks {single:?}"
            ));
        }
        Err(e) => return Schmidt2Class::Undecided(format!("span analysis failed: {e}")),
    };
    if found.len() < 2 {
        return Schmidt2Class::AtLeast3;
    }

    let (pa, pb) = (found[0].tensor(), found[1].tensor());
    let m = reshape(amps, dims, &[j]);
    let Some((xs, ys)) = split_rows(&m, &pa, &pb) else {
        return Schmidt2Class::Undecided("rest-span product vectors are dependent".into());
    };
    let attach = |p: &ProductVector, x: Vec<C64>| {
        let mut factors = p.factors.clone();
        factors.insert(j, x);
        ProductVector { factors, weight: p.weight }
    };
    if vector::norm(&xs) == 0.0 || vector::norm(&ys) == 0.0 {
        return Schmidt2Class::Undecided("degenerate factor on the split party".into());
    }
    let a = attach(&found[0], xs);
    let b = attach(&found[1], ys);
    let rebuilt = vector::add_scaled(&a.tensor(), ONE, &b.tensor());
    if vector::norm(&vector::sub(&rebuilt, amps)) > 1e-8 {
        return Schmidt2Class::Undecided("product pair does not reassemble the state".into());
    }
    let overlap = vector::inner(&a.tensor(), &b.tensor()).norm();
    let unique = entry_distance(&a, &b).expect("same dims") >= 3;
    if overlap > tolerances().state_orthogonality {
        // The only Schmidt-2 decomposition is non-orthogonal.
        return Schmidt2Class::AtLeast3;
    }
    Schmidt2Class::Schmidt2(Schmidt2Decomposition { a, b, orthogonal: true, unique })
}

/// Rows of `m` written as `x_i·pa + y_i·pb`; returns the columns `(x, y)`.
fn split_rows(m: &ComplexMatrix, pa: &[C64], pb: &[C64]) -> Option<(Vec<C64>, Vec<C64>)> {
    let g11 = vector::inner(pa, pa);
    let g12 = vector::inner(pa, pb);
    let g22 = vector::inner(pb, pb);
    let det = g11 * g22 - g12 * g12.conj();
    if det.norm() <= 1e-12 * g11.norm() * g22.norm() {
        return None;
    }
    let mut xs = Vec::with_capacity(m.rows());
    let mut ys = Vec::with_capacity(m.rows());
    for i in 0..m.rows() {
        let row = m.row(i);
        let r1 = vector::inner(pa, row);
        let r2 = vector::inner(pb, row);
        xs.push((g22 * r1 - g12 * r2) / det);
        ys.push((g11 * r2 - g12.conj() * r1) / det);
    }
    Some((xs, ys))
}

/// `phi = (⊗ fixed factors) ⊗ Φ'` where only parties `p < q` are entangled:
/// the two-term Schmidt decomposition of `Φ'` lifted to all parties.
fn two_party_core(amps: &[C64], dims: &[usize], p: usize, q: usize) -> Schmidt2Class {
    let k = dims.len();
    let fixed: Vec<Option<Vec<C64>>> = (0..k)
        .map(|r| (r != p && r != q).then(|| svd(&reshape(amps, dims, &[r])).u[0].clone()))
        .collect();
    // Contract the fixed parties away.
    let mut core = ComplexMatrix::zeros(dims[p], dims[q]);
    for (idx, &z) in amps.iter().enumerate() {
        let d = crate::states::digits(idx, dims);
        let mut w = z;
        for (r, f) in fixed.iter().enumerate() {
            if let Some(f) = f {
                w *= f[d[r]].conj();
            }
        }
        core[(d[p], d[q])] += w;
    }
    let info = schmidt_of_matrix(&core);
    if info.rank != 2 {
        return Schmidt2Class::Undecided(format!("core of parties {p},{q} has rank {}", info.rank));
    }
    let lift = |i: usize| {
        let factors = (0..k)
            .map(|r| match &fixed[r] {
                Some(f) => f.clone(),
                None if r == p => info.left[i].clone(),
                None => info.right[i].clone(),
            })
            .collect();
        ProductVector { factors, weight: C64::new(info.coefficients[i], 0.0) }
    };
    let (a, b) = (lift(0), lift(1));
    let rebuilt = vector::add_scaled(&a.tensor(), ONE, &b.tensor());
    if vector::norm(&vector::sub(&rebuilt, amps)) > 1e-8 {
        return Schmidt2Class::Undecided("two-party core does not reassemble the state".into());
    }
    Schmidt2Class::Schmidt2(Schmidt2Decomposition { a, b, orthogonal: true, unique: false })
}
