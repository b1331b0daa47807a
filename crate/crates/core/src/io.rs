//! JSON interchange for states and certificates.

use std::collections::HashSet;
use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{config_from_str, config_to_string, sector_basis};
use crate::error::{Error, Result};
use crate::homogenizer::MaximalityCertificate;
use crate::state::{PureState, ZERO_AMPLITUDE};

/// Norm deviation accepted when a file claims to be normalized.
pub const NORM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeJson {
    pub bits: String,
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateJson {
    pub n: usize,
    pub sector: String,
    pub normalized: bool,
    pub amplitudes: Vec<AmplitudeJson>,
}

impl StateJson {
    /// Nonzero amplitudes only, in basis order.
    pub fn from_state(state: &PureState) -> Self {
        let n = state.n();
        let amplitudes = state
            .basis()
            .states()
            .iter()
            .zip(state.amplitudes())
            .filter(|(_, a)| a.norm() > ZERO_AMPLITUDE)
            .map(|(&cfg, a)| AmplitudeJson {
                bits: config_to_string(cfg, n),
                re: a.re,
                im: a.im,
            })
            .collect();
        Self {
            n,
            sector: "sz0".into(),
            normalized: state.is_normalized(),
            amplitudes,
        }
    }

    /// Validates and builds the state. An unnormalized file is normalized.
    pub fn to_state(&self) -> Result<PureState> {
        if self.sector != "sz0" {
            return Err(Error::Parse(format!("unsupported sector '{}' (only \"sz0\")", self.sector)));
        }
        let basis = sector_basis(self.n)?;
        let mut seen = HashSet::new();
        let mut entries = Vec::with_capacity(self.amplitudes.len());
        for (k, a) in self.amplitudes.iter().enumerate() {
            if a.bits.chars().count() != self.n {
                return Err(Error::Parse(format!(
                    "amplitude {k}: '{}' has {} sites, expected {}",
                    a.bits,
                    a.bits.chars().count(),
                    self.n
                )));
            }
            let cfg = config_from_str(&a.bits).map_err(|e| Error::Parse(format!("amplitude {k}: {e}")))?;
            if !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::Parse(format!("amplitude {k}: non-finite value")));
            }
            if !seen.insert(cfg) {
                return Err(Error::Parse(format!("amplitude {k}: duplicate configuration '{}'", a.bits)));
            }
            entries.push((cfg, Complex64::new(a.re, a.im)));
        }
        let state = PureState::from_entries(basis, &entries, false)?;
        let norm = state.norm();
        if norm == 0.0 {
            return Err(Error::ZeroState);
        }
        if self.normalized && (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Parse(format!("state marked normalized has norm {norm}")));
        }
        Ok(state.normalized())
    }
}

pub fn read_state<R: Read>(reader: R) -> Result<PureState> {
    let json: StateJson =
        serde_json::from_reader(reader).map_err(|e| Error::Parse(format!("state JSON: {e}")))?;
    json.to_state()
}

pub fn state_to_string(state: &PureState) -> String {
    serde_json::to_string_pretty(&StateJson::from_state(state)).expect("state serializes")
}

pub fn write_state<W: Write>(mut writer: W, state: &PureState) -> std::io::Result<()> {
    writeln!(writer, "{}", state_to_string(state))
}

pub fn certificate_to_string(cert: &MaximalityCertificate) -> String {
    serde_json::to_string_pretty(cert).expect("certificate serializes")
}

pub fn read_certificate<R: Read>(reader: R) -> Result<MaximalityCertificate> {
    serde_json::from_reader(reader).map_err(|e| Error::Parse(format!("certificate JSON: {e}")))
}
