//! Numerical tolerances shared by every decider.
//!
//! One record holds every epsilon the library compares against. Library code
//! reads it through [`tolerances`]; a binary may install an override once at
//! startup (the CLI does this when `SEPDISC_TOL` is set).

use std::sync::OnceLock;

/// Environment variable that overrides the rank/PSD tolerance.
pub const TOL_ENV_VAR: &str = "SEPDISC_TOL";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative cutoff for singular values and Gram eigenvalues.
    pub rank: f64,
    /// Minimum eigenvalue accepted as "non-negative".
    pub psd: f64,
    /// Orthonormality of bases produced by the library.
    pub orthonormal: f64,
    /// Orthonormality demanded of user-supplied state lists.
    pub state_orthogonality: f64,
    /// Angular tolerance (radians) for the anti-parallel eigenvalue test.
    pub antiparallel_angle: f64,
    /// Tolerance on concurrence identities such as sum C(psi_k) = C(phi).
    pub concurrence_sum: f64,
    /// Phase matching `|<a|b>| > 1 - phase_match`.
    pub phase_match: f64,
    /// Residual under which the feasibility solver reports a feasible point.
    pub feasible_residual: f64,
    /// Residual above which a stalled solve counts as empirically infeasible.
    pub infeasible_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rank: 1e-9,
            psd: 1e-9,
            orthonormal: 1e-10,
            state_orthogonality: 1e-9,
            antiparallel_angle: 1e-8,
            concurrence_sum: 1e-8,
            phase_match: 1e-8,
            feasible_residual: 1e-7,
            infeasible_residual: 1e-4,
        }
    }
}

impl Tolerances {
    /// Defaults, with `rank` and `psd` replaced by `SEPDISC_TOL` when it is set
    /// to a positive finite number. Returns `Err` with the raw value otherwise.
    pub fn from_env() -> Result<Self, String> {
        let mut tol = Self::default();
        if let Ok(raw) = std::env::var(TOL_ENV_VAR) {
            let v: f64 = raw.trim().parse().map_err(|_| raw.clone())?;
            if !(v.is_finite() && v > 0.0) {
                return Err(raw);
            }
            tol.rank = v;
            tol.psd = v;
        }
        Ok(tol)
    }
}

static GLOBAL: OnceLock<Tolerances> = OnceLock::new();

/// The active tolerance record.
pub fn tolerances() -> &'static Tolerances {
    GLOBAL.get_or_init(Tolerances::default)
}

/// Install a process-wide override. Fails if tolerances were already read or set.
pub fn install(tol: Tolerances) -> Result<(), Tolerances> {
    GLOBAL.set(tol)
}
