//! One-sided (Hestenes) Jacobi SVD.

use super::eig::rotation;
use super::{vector, ComplexMatrix, C64};

const MAX_SWEEPS: usize = 80;

/// `A = U Σ V†` with singular values in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    /// Left singular vectors; entries for zero singular values are zero vectors.
    pub u: Vec<Vec<C64>>,
    /// Right singular vectors (columns of `V`).
    pub v: Vec<Vec<C64>>,
}

impl Svd {
    /// Number of singular values above `rel_tol · σ_max`.
    pub fn rank(&self, rel_tol: f64) -> usize {
        let top = self.singular_values.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0;
        }
        self.singular_values.iter().filter(|&&s| s > rel_tol * top).count()
    }
}

pub fn svd(a: &ComplexMatrix) -> Svd {
    let (m, n) = (a.rows(), a.cols());
    let mut cols: Vec<Vec<C64>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Vec<Vec<C64>> = (0..n).map(|j| vector::basis_vector(n, j)).collect();
    let eps = f64::EPSILON;
    // Columns below this squared norm are numerically zero; rotating against
    // them only accumulates rounding in `v`.
    let negligible = (eps * a.frobenius_norm()).powi(2);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha: f64 = cols[i].iter().map(C64::norm_sqr).sum();
                let beta: f64 = cols[j].iter().map(C64::norm_sqr).sum();
                let gamma = vector::inner(&cols[i], &cols[j]);
                if alpha <= negligible || beta <= negligible || gamma.norm() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let (g_ii, g_ij, g_ji, g_jj) = rotation(alpha, beta, gamma);
                rotate_pair(&mut cols, i, j, (g_ii, g_ij, g_ji, g_jj), m);
                rotate_pair(&mut v, i, j, (g_ii, g_ij, g_ji, g_jj), n);
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = cols.iter().map(|c| vector::norm(c)).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let singular_values = order.iter().map(|&k| norms[k]).collect();
    let u = order
        .iter()
        .map(|&k| {
            if norms[k] > 0.0 {
                cols[k].iter().map(|z| z / norms[k]).collect()
            } else {
                vec![C64::new(0.0, 0.0); m]
            }
        })
        .collect();
    let v = order.iter().map(|&k| v[k].clone()).collect();
    Svd { singular_values, u, v }
}

fn rotate_pair(
    vecs: &mut [Vec<C64>],
    i: usize,
    j: usize,
    (g_ii, g_ij, g_ji, g_jj): (C64, C64, C64, C64),
    len: usize,
) {
    for k in 0..len {
        let x = vecs[i][k];
        let y = vecs[j][k];
        vecs[i][k] = x * g_ii + y * g_ji;
        vecs[j][k] = x * g_ij + y * g_jj;
    }
}
