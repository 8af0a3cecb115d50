//! The separable operation `ρ ↦ Σ tr(Π_k ρ) σ_k` induced by a certificate.

use super::PovmCertificate;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::separability::ProductDecomposition;

#[derive(Debug, Clone)]
pub struct SeparableOperation {
    elements: Vec<ComplexMatrix>,
    outputs: Vec<ComplexMatrix>,
    decompositions: Vec<ProductDecomposition>,
}

impl SeparableOperation {
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let d = self.outputs[0].rows();
        let mut out = ComplexMatrix::zeros(d, d);
        for (pi, sigma) in self.elements.iter().zip(&self.outputs) {
            out += &sigma.scale(pi.trace_product(rho));
        }
        out
    }

    pub fn outputs(&self) -> &[ComplexMatrix] {
        &self.outputs
    }

    pub fn output_decompositions(&self) -> &[ProductDecomposition] {
        &self.decompositions
    }
}

/// One separable output state per POVM element, each given by its product
/// decomposition (which must have unit trace).
pub fn build_separable_operation(povm: &PovmCertificate, outputs: &[ProductDecomposition]) -> Result<SeparableOperation> {
    if povm.elements.len() != outputs.len() {
        return Err(Error::CountMismatch(format!("{} elements, {} outputs", povm.elements.len(), outputs.len())));
    }
    let dim = outputs
        .iter()
        .find_map(|d| d.terms.first().map(|t| t.vector.tensor().len()))
        .ok_or_else(|| Error::PreconditionViolated("outputs have no terms".into()))?;
    let mut mats = Vec::with_capacity(outputs.len());
    for (k, d) in outputs.iter().enumerate() {
        let m = d.reassemble(dim);
        if (m.trace().re - 1.0).abs() > 1e-9 {
            return Err(Error::PreconditionViolated(format!("output {k} has trace {}", m.trace().re)));
        }
        mats.push(m);
    }
    Ok(SeparableOperation { elements: povm.elements.clone(), outputs: mats, decompositions: outputs.to_vec() })
}
