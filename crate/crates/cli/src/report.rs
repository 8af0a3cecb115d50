//! Machine-readable verdicts.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sepdisc::discrimination::{verify_certificate, FeasibilityReport, LoccFlag, Status, Verdict};
use sepdisc::linalg::{ComplexMatrix, C64};
use sepdisc::separability::Evidence;

pub const REPORT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermReport {
    pub weight: f64,
    /// One unit vector per party.
    pub factors: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EvidenceReport {
    Decomposition { element: String, terms: Vec<TermReport>, relative_error: f64 },
    PptExact { element: String },
    PartialTransposeWitness { element: String, parties: Vec<usize>, eigenvalue: f64 },
    SupportWitness { element: String, detail: String },
    Inconclusive { element: String, detail: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub completeness: f64,
    pub min_eigenvalue: f64,
    pub discrimination: f64,
    pub evidence: f64,
    pub passes: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub residual: f64,
    pub iterations: usize,
    pub stalled: bool,
    /// The relaxation is exact for this space.
    pub exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub version: String,
    pub tool_version: String,
    /// `sha256:` followed by the hex digest of the input bytes.
    pub input_digest: String,
    pub status: String,
    pub tag: String,
    pub reason: String,
    pub lambdas: Option<Vec<f64>>,
    pub locc_flag: String,
    pub evidence: Vec<EvidenceReport>,
    pub certificate_check: Option<CheckReport>,
    pub residuals: Option<ResidualReport>,
}

pub fn status_str(s: Status) -> &'static str {
    match s {
        Status::Distinguishable => "distinguishable",
        Status::Indistinguishable => "indistinguishable",
        Status::Undecided => "undecided",
    }
}

pub fn exit_code(s: Status) -> u8 {
    match s {
        Status::Distinguishable => 0,
        Status::Indistinguishable => 1,
        Status::Undecided => 2,
    }
}

pub fn digest(bytes: &[u8]) -> String {
    format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
}

fn pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn evidence_report(element: &str, e: &Evidence, pi: &ComplexMatrix) -> EvidenceReport {
    let element = element.to_string();
    match e {
        Evidence::Decomposition(d) => EvidenceReport::Decomposition {
            element,
            terms: d.terms.iter().map(|t| TermReport { weight: t.weight, factors: t.vector.factors.iter().map(|f| pairs(f)).collect() }).collect(),
            relative_error: d.relative_error(pi),
        },
        Evidence::PptExact => EvidenceReport::PptExact { element },
        Evidence::PartialTransposeWitness { parties, eigenvalue, .. } => {
            EvidenceReport::PartialTransposeWitness { element, parties: parties.clone(), eigenvalue: *eigenvalue }
        }
        Evidence::SupportWitness(s) => EvidenceReport::SupportWitness { element, detail: s.clone() },
        Evidence::Inconclusive(s) => EvidenceReport::Inconclusive { element, detail: s.clone() },
    }
}

impl VerdictReport {
    /// `names` label the POVM elements in member order; `rhos` are the member
    /// densities the certificate is re-checked against.
    pub fn new(v: &Verdict, names: &[String], rhos: &[ComplexMatrix], input: &[u8]) -> Self {
        let (evidence, check, lambdas) = match &v.certificate {
            Some(c) => {
                let ev = c.elements.iter().zip(&c.evidence).zip(names).map(|((pi, e), n)| evidence_report(n, e, pi)).collect();
                let k = verify_certificate(c, rhos);
                let check = CheckReport {
                    completeness: k.completeness,
                    min_eigenvalue: k.min_eigenvalue,
                    discrimination: k.discrimination,
                    evidence: k.evidence,
                    passes: k.passes(),
                };
                (ev, Some(check), c.lambdas.clone())
            }
            None => (Vec::new(), None, None),
        };
        Self {
            version: REPORT_VERSION.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            input_digest: digest(input),
            status: status_str(v.status).to_string(),
            tag: v.tag.as_str().to_string(),
            reason: v.reason.clone(),
            lambdas,
            locc_flag: match v.locc_flag {
                LoccFlag::LoccIndistinguishable => "locc_indistinguishable",
                LoccFlag::Unknown => "unknown",
            }
            .to_string(),
            evidence,
            certificate_check: check,
            residuals: v.feasibility.as_ref().map(|f: &FeasibilityReport| ResidualReport {
                residual: f.residual,
                iterations: f.iterations,
                stalled: f.stalled,
                exact: f.exact,
            }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}
