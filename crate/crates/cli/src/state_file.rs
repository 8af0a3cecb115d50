//! JSON state files: `{"version": "1", "dims": [...], "states": [...], "phi": {...}}`
//! with complex amplitudes as `[re, im]` pairs.

use serde::{Deserialize, Serialize};
use sepdisc::linalg::C64;
use sepdisc::states::{PureState, StateSpace};

pub const VERSION: &str = "1";

/// Norm deviation tolerated in an input vector.
const NORM_LIMIT: f64 = 1e-8;
/// Norm deviation above which normalization is reported.
const NORM_WARN: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedState {
    pub name: String,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub version: String,
    pub dims: Vec<usize>,
    pub states: Vec<NamedState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<NamedState>,
}

/// A validated file: normalized states in a checked space.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub names: Vec<String>,
    pub states: Vec<PureState>,
    pub phi: Option<PureState>,
}

fn line_of(text: &str, needle: &str) -> usize {
    text.find(needle).map_or(1, |at| text[..at].matches('\n').count() + 1)
}

fn named(name: &str, s: &PureState) -> NamedState {
    NamedState { name: name.to_string(), amplitudes: s.amplitudes().iter().map(|z| [z.re, z.im]).collect() }
}

impl StateFile {
    pub fn from_states(space: &StateSpace, names: &[String], states: &[PureState], phi: Option<&PureState>) -> Self {
        Self {
            version: VERSION.to_string(),
            dims: space.dims().to_vec(),
            states: names.iter().zip(states).map(|(n, s)| named(n, s)).collect(),
            phi: phi.map(|p| named("phi", p)),
        }
    }

    /// States named `prefix1, prefix2, ...`.
    pub fn numbered(prefix: &str, states: &[PureState], phi: Option<&PureState>) -> Self {
        let space = states.first().or(phi).expect("at least one state").space().clone();
        let names: Vec<String> = (1..=states.len()).map(|k| format!("{prefix}{k}")).collect();
        Self::from_states(&space, &names, states, phi)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Parses and validates; every error message starts with the line it refers to.
pub fn parse(text: &str) -> Result<Loaded, String> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| format!("line {}, column {}: {e}", e.line(), e.column()))?;
    if file.version != VERSION {
        return Err(format!("line {}: unsupported version {:?} (expected \"{VERSION}\")", line_of(text, "\"version\""), file.version));
    }
    let space = StateSpace::new(&file.dims).map_err(|e| format!("line {}: invalid dims {:?}: {e}", line_of(text, "\"dims\""), file.dims))?;
    let mut seen = std::collections::HashSet::new();
    let mut names = Vec::new();
    let mut states = Vec::new();
    for s in &file.states {
        if !seen.insert(s.name.as_str()) {
            return Err(format!("line {}: duplicate state name {:?}", line_of(text, &format!("\"{}\"", s.name)), s.name));
        }
        states.push(load_vector(text, &space, s)?);
        names.push(s.name.clone());
    }
    let phi = file.phi.as_ref().map(|p| load_vector(text, &space, p)).transpose()?;
    if states.is_empty() && phi.is_none() {
        return Err(format!("line {}: no states given", line_of(text, "\"states\"")));
    }
    Ok(Loaded { names, states, phi })
}

fn load_vector(text: &str, space: &StateSpace, s: &NamedState) -> Result<PureState, String> {
    let line = line_of(text, &format!("\"{}\"", s.name));
    if s.amplitudes.len() != space.dim() {
        return Err(format!(
            "line {line}: state {:?} has {} amplitudes, dims {:?} need {}",
            s.name,
            s.amplitudes.len(),
            space.dims(),
            space.dim()
        ));
    }
    let amps: Vec<C64> = s.amplitudes.iter().map(|&[re, im]| C64::new(re, im)).collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let deviation = (norm - 1.0).abs();
    if !deviation.is_finite() || deviation > NORM_LIMIT {
        return Err(format!("line {line}: state {:?} has norm {norm} (must be 1 within {NORM_LIMIT:e})", s.name));
    }
    if deviation > NORM_WARN {
        log::warn!("state {:?} has norm {norm}; normalizing", s.name);
    }
    PureState::normalized(space.clone(), amps).map_err(|e| format!("line {line}: state {:?}: {e}", s.name))
}
