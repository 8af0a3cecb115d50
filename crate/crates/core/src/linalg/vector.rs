//! Plain `&[C64]` vector helpers.

use super::{C64, ZERO};

/// `<a|b>`, antilinear in the first argument.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    assert_eq!(a.len(), b.len(), "inner product length mismatch");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(C64::norm_sqr).sum::<f64>().sqrt()
}

pub fn scaled(a: &[C64], z: C64) -> Vec<C64> {
    a.iter().map(|x| x * z).collect()
}

/// `a + z·b`.
pub fn add_scaled(a: &[C64], z: C64, b: &[C64]) -> Vec<C64> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + z * y).collect()
}

pub fn sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    add_scaled(a, C64::new(-1.0, 0.0), b)
}

/// Unit vector along `a`, or `None` when `‖a‖` is not positive.
pub fn normalized(a: &[C64]) -> Option<Vec<C64>> {
    let n = norm(a);
    (n > 0.0 && n.is_finite()).then(|| a.iter().map(|x| x / n).collect())
}

/// Tensor product of vectors, first factor most significant.
pub fn tensor(factors: &[Vec<C64>]) -> Vec<C64> {
    let mut out = vec![C64::new(1.0, 0.0)];
    for f in factors {
        let mut next = Vec::with_capacity(out.len() * f.len());
        for a in &out {
            for b in f {
                next.push(a * b);
            }
        }
        out = next;
    }
    out
}

pub fn basis_vector(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[index] = C64::new(1.0, 0.0);
    v
}

/// `1 − |<â|b̂>|`, the smallest eigenvalue of the Gram matrix of the
/// normalized pair; zero exactly when the two vectors are parallel.
pub fn parallel_defect(a: &[C64], b: &[C64]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (1.0 - inner(a, b).norm() / (na * nb)).max(0.0)
}

/// Orthonormal basis for the orthogonal complement of `span(vectors)` in
/// `C^dim`, built by Gram–Schmidt over the standard basis. At each step the
/// standard basis vector with the largest remaining component is taken (ties
/// go to the lowest index), so output is deterministic.
///
/// `vectors` must be orthonormal; the routine reorthogonalizes twice against
/// the accumulated set.
pub fn orthocomplement(vectors: &[Vec<C64>], dim: usize) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = vectors.to_vec();
    let target = dim.saturating_sub(vectors.len());
    let mut out = Vec::with_capacity(target);
    let mut used = vec![false; dim];
    while out.len() < target {
        let mut best: Option<(usize, Vec<C64>, f64)> = None;
        for i in 0..dim {
            if used[i] {
                continue;
            }
            let r = residual(&basis_vector(dim, i), &basis);
            let n = norm(&r);
            if best.as_ref().is_none_or(|(_, _, bn)| n > *bn) {
                best = Some((i, r, n));
            }
        }
        let Some((i, r, n)) = best else { break };
        used[i] = true;
        if n < 1e-8 {
            // Everything left is already spanned; input was not orthonormal.
            break;
        }
        let r = residual(&r, &basis);
        let q = normalized(&r).expect("residual has positive norm");
        basis.push(q.clone());
        out.push(q);
    }
    out
}

/// Component of `v` orthogonal to the orthonormal set `basis`.
pub fn residual(v: &[C64], basis: &[Vec<C64>]) -> Vec<C64> {
    let mut r = v.to_vec();
    for q in basis {
        let c = inner(q, &r);
        for (x, y) in r.iter_mut().zip(q) {
            *x -= c * y;
        }
    }
    r
}
