//! Cyclic Jacobi eigensolver for small Hermitian matrices.

use super::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Asymmetry above which input is rejected instead of symmetrized.
const HERMITIAN_REJECT: f64 = 1e-8;
const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenResult {
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the eigenvector for `eigenvalues[i]`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenResult {
    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.eigenvectors.column(i)
    }

    /// `V f(Λ) V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|x| x)
    }
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
///
/// The input is symmetrized as `(A + A†)/2` first; asymmetry beyond `1e-8`
/// (relative to `max(1, max|a_ij|)`) is rejected with `NotHermitian`.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<EigenResult> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("eig of a {}x{} matrix", a.rows(), a.cols())));
    }
    let asymmetry = a.hermitian_defect();
    if asymmetry > HERMITIAN_REJECT * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian { asymmetry });
    }
    let n = a.rows();
    let mut h: Vec<C64> = a.hermitian_part().as_slice().to_vec();
    for i in 0..n {
        h[i * n + i].im = 0.0;
    }
    let mut v = ComplexMatrix::identity(n);
    jacobi(&mut h, n, v.as_mut_slice());

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| h[i * n + i].re.total_cmp(&h[j * n + j].re));
    let eigenvalues = order.iter().map(|&i| h[i * n + i].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(EigenResult { eigenvalues, eigenvectors })
}

/// In-place cyclic Jacobi on the row-major Hermitian `h`, accumulating the
/// rotations into the columns of `v`.
fn jacobi(h: &mut [C64], n: usize, v: &mut [C64]) {
    let frob2: f64 = h.iter().map(C64::norm_sqr).sum();
    if frob2 == 0.0 {
        return;
    }
    let eps2 = (4.0 * f64::EPSILON).powi(2) * frob2;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += h[p * n + q].norm_sqr();
            }
        }
        if off <= eps2 {
            return;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = h[p * n + q];
                let b = apq.norm();
                if b * b <= eps2 * 1e-6 / (n * n) as f64 {
                    continue;
                }
                let (g_pp, g_pq, g_qp, g_qq) = rotation(h[p * n + p].re, h[q * n + q].re, apq);
                // columns: H ← H G
                for k in 0..n {
                    let hkp = h[k * n + p];
                    let hkq = h[k * n + q];
                    h[k * n + p] = hkp * g_pp + hkq * g_qp;
                    h[k * n + q] = hkp * g_pq + hkq * g_qq;
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = vkp * g_pp + vkq * g_qp;
                    v[k * n + q] = vkp * g_pq + vkq * g_qq;
                }
                // rows: H ← G† H
                for k in 0..n {
                    let hpk = h[p * n + k];
                    let hqk = h[q * n + k];
                    h[p * n + k] = g_pp.conj() * hpk + g_qp.conj() * hqk;
                    h[q * n + k] = g_pq.conj() * hpk + g_qq.conj() * hqk;
                }
                h[p * n + q] = C64::new(0.0, 0.0);
                h[q * n + p] = C64::new(0.0, 0.0);
                h[p * n + p].im = 0.0;
                h[q * n + q].im = 0.0;
            }
        }
    }
}

/// 2x2 unitary `G` with `G† [[app, apq], [conj(apq), aqq]] G` diagonal.
/// Returns `(g_pp, g_pq, g_qp, g_qq)`.
pub(super) fn rotation(app: f64, aqq: f64, apq: C64) -> (C64, C64, C64, C64) {
    let b = apq.norm();
    let phase = apq / b;
    let theta = (aqq - app) / (2.0 * b);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let pc = phase.conj();
    (C64::new(c, 0.0), C64::new(s, 0.0), pc * (-s), pc * c)
}

/// Result of a positive-semidefiniteness check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PsdStatus {
    Psd,
    NotPsd { min_eigenvalue: f64 },
}

/// PSD iff the smallest eigenvalue is at least `-tol`.
pub fn psd_check(a: &ComplexMatrix, tol: f64) -> Result<PsdStatus> {
    let eig = hermitian_eig(a)?;
    let min = eig.min();
    Ok(if min >= -tol { PsdStatus::Psd } else { PsdStatus::NotPsd { min_eigenvalue: min } })
}

/// Nearest PSD matrix in Frobenius norm (negative eigenvalues clamped to 0)
/// together with the Frobenius norm of the removed negative part.
pub fn psd_part(a: &ComplexMatrix) -> Result<(ComplexMatrix, f64)> {
    let eig = hermitian_eig(a)?;
    let neg: f64 = eig.eigenvalues.iter().filter(|&&x| x < 0.0).map(|x| x * x).sum::<f64>().sqrt();
    if neg == 0.0 {
        return Ok((a.hermitian_part(), 0.0));
    }
    Ok((eig.reconstruct_with(|x| x.max(0.0)), neg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_input_sorted_ascending() {
        let eig = hermitian_eig(&ComplexMatrix::real_diag(&[2.0, 1.0])).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 2.0]);
    }

    #[test]
    fn rank_one_projector() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = vec![c(s, 0.0), c(s, 0.0)];
        let eig = hermitian_eig(&ComplexMatrix::projector(&plus)).unwrap();
        assert!(eig.eigenvalues[0].abs() < 1e-15);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_rows(&[vec![ZERO, c(1.0, 0.0)], vec![ZERO, ZERO]]);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
        assert!(matches!(psd_check(&m, 1e-9), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn small_asymmetry_is_symmetrized() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(1e-12, 0.0)], vec![ZERO, c(2.0, 0.0)]]);
        assert!(hermitian_eig(&m).is_ok());
    }

    #[test]
    fn psd_examples() {
        assert_eq!(psd_check(&ComplexMatrix::identity(3), 1e-9).unwrap(), PsdStatus::Psd);
        assert_eq!(
            psd_check(&ComplexMatrix::real_diag(&[1.0, -1.0]), 1e-9).unwrap(),
            PsdStatus::NotPsd { min_eigenvalue: -1.0 }
        );
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rho = ComplexMatrix::projector(&[c(s, 0.0), ZERO, ZERO, c(0.0, s)]);
        let shifted = &rho - &ComplexMatrix::identity(4).scale_real(1e-12);
        assert_eq!(psd_check(&shifted, 1e-9).unwrap(), PsdStatus::Psd);
    }

    fn arb_hermitian(max_n: usize) -> impl Strategy<Value = ComplexMatrix> {
        (1..=max_n).prop_flat_map(|n| {
            proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), n * n).prop_map(move |v| {
                ComplexMatrix::from_vec(n, n, v.into_iter().map(|(a, b)| c(a, b)).collect())
                    .unwrap()
                    .hermitian_part()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reconstruction_and_orthonormality(a in arb_hermitian(32)) {
            let eig = hermitian_eig(&a).unwrap();
            let scale = a.max_abs().max(1.0);
            prop_assert!(eig.reconstruct().max_abs_diff(&a) < 1e-9 * scale);
            prop_assert!(eig.eigenvectors.unitarity_defect() < 1e-10);
            let tr: f64 = eig.eigenvalues.iter().sum();
            prop_assert!((tr - a.trace().re).abs() < 1e-10 * scale * a.rows() as f64);
            for w in eig.eigenvalues.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            for i in 0..a.rows() {
                let v = eig.vector(i);
                let av = a.mat_vec(&v);
                let err = av.iter().zip(&v).map(|(x, y)| (x - y * eig.eigenvalues[i]).norm()).fold(0.0, f64::max);
                prop_assert!(err < 1e-10 * a.frobenius_norm().max(1.0));
            }
        }
    }
}
