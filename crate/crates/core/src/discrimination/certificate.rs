//! POVM certificates and their independent verification.

use crate::linalg::{hermitian_eig, ComplexMatrix};
use crate::separability::Evidence;

/// Measurement `Π_1..Π_n` with per-element separability evidence.
#[derive(Debug, Clone)]
pub struct PovmCertificate {
    pub elements: Vec<ComplexMatrix>,
    pub evidence: Vec<Evidence>,
    /// `λ_k` when every element has the form `P_k + λ_k|Φ⟩⟨Φ|`.
    pub lambdas: Option<Vec<f64>>,
}

/// Measured defects of a certificate against the states it claims to separate.
#[derive(Debug, Clone, PartialEq)]
pub struct CertificateCheck {
    /// `max |ΣΠ_k − I|`.
    pub completeness: f64,
    /// Smallest eigenvalue over all elements.
    pub min_eigenvalue: f64,
    /// `max |tr(Π_k ρ_j) − δ_kj|`.
    pub discrimination: f64,
    /// Largest relative reassembly error of a product decomposition.
    pub evidence: f64,
    /// Every element carries positive separability evidence.
    pub evidence_complete: bool,
    /// `λ_k ≥ 0` and `Σλ_k = 1`, or no lambdas present.
    pub lambdas_ok: bool,
}

impl CertificateCheck {
    pub fn passes(&self) -> bool {
        self.completeness <= 1e-8
            && self.min_eigenvalue >= -1e-9
            && self.discrimination <= 1e-7
            && self.evidence <= 1e-8
            && self.evidence_complete
            && self.lambdas_ok
    }
}

/// Re-checks a certificate from scratch against unit-trace states `rhos`.
pub fn verify_certificate(cert: &PovmCertificate, rhos: &[ComplexMatrix]) -> CertificateCheck {
    let d = rhos.first().map_or(0, ComplexMatrix::rows);
    let mut sum = ComplexMatrix::zeros(d, d);
    let mut min_eigenvalue = f64::INFINITY;
    let mut evidence = 0.0f64;
    let mut evidence_complete = cert.elements.len() == cert.evidence.len();
    for (pi, ev) in cert.elements.iter().zip(&cert.evidence) {
        sum += pi;
        min_eigenvalue = min_eigenvalue.min(hermitian_eig(pi).map_or(f64::NEG_INFINITY, |e| e.min()));
        match ev {
            Evidence::Decomposition(dec) => evidence = evidence.max(dec.relative_error(pi)),
            Evidence::PptExact => {}
            _ => evidence_complete = false,
        }
    }
    let completeness = sum.max_abs_diff(&ComplexMatrix::identity(d));
    let mut discrimination = if cert.elements.len() == rhos.len() { 0.0f64 } else { f64::INFINITY };
    for (k, pi) in cert.elements.iter().enumerate() {
        for (j, rho) in rhos.iter().enumerate() {
            let want = if j == k { 1.0 } else { 0.0 };
            discrimination = discrimination.max((pi.trace_product(rho).re - want).abs());
        }
    }
    let lambdas_ok = cert.lambdas.as_ref().is_none_or(|l| {
        l.iter().all(|&x| x >= 0.0) && (l.iter().sum::<f64>() - 1.0).abs() <= 1e-8
    });
    CertificateCheck { completeness, min_eigenvalue, discrimination, evidence, evidence_complete, lambdas_ok }
}
