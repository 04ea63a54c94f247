//! JSON documents for spectral densities, norm reports and decompositions.
//!
//! Floats are written in shortest round-trip form and parsed with
//! `float_roundtrip`, so coefficient lists survive a write/read cycle bit for bit.

use std::fs;
use std::path::Path;

use pwenv_core::envelope::{DecompositionResult, Dictionary};
use pwenv_core::norms::NormReport;
use pwenv_core::spectrum::{Piece, SpectralDensity};
use pwenv_core::C64;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

pub const DENSITY_FORMAT_VERSION: u32 = 1;

/// A spectral density as `{version, support, smoothness, pieces}`.
///
/// Each piece stores the real and imaginary parts of its coefficients in the
/// local variable `x = (t - c)/h ∈ [-1, 1]` of its interval. The zero density
/// has no pieces, a null support and a null smoothness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityDoc {
    pub version: u32,
    pub support: Option<[f64; 2]>,
    pub smoothness: Option<u32>,
    pub pieces: Vec<PieceDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceDoc {
    pub interval: [f64; 2],
    pub re_coeffs: Vec<f64>,
    pub im_coeffs: Vec<f64>,
}

impl DensityDoc {
    pub fn from_density(s: &SpectralDensity) -> Self {
        if s.is_zero() {
            return DensityDoc {
                version: DENSITY_FORMAT_VERSION,
                support: None,
                smoothness: None,
                pieces: Vec::new(),
            };
        }
        let pieces = s
            .pieces()
            .iter()
            .map(|p| {
                // Trailing exact zeros are dropped on load, so drop them here too.
                let mut coeffs = p.coeffs.clone();
                while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.re == 0.0 && c.im == 0.0) {
                    coeffs.pop();
                }
                PieceDoc {
                    interval: [p.lo, p.hi],
                    re_coeffs: coeffs.iter().map(|c| c.re).collect(),
                    im_coeffs: coeffs.iter().map(|c| c.im).collect(),
                }
            })
            .collect();
        DensityDoc {
            version: DENSITY_FORMAT_VERSION,
            support: s.support().map(|(a, b)| [a, b]),
            smoothness: Some(s.smoothness()),
            pieces,
        }
    }

    pub fn to_density(&self) -> Result<SpectralDensity, HarnessError> {
        if self.version != DENSITY_FORMAT_VERSION {
            return Err(HarnessError::Format(format!(
                "unsupported density format version {}",
                self.version
            )));
        }
        if self.pieces.is_empty() {
            if self.support.is_some() {
                return Err(HarnessError::Format("zero density must have a null support".into()));
            }
            return Ok(SpectralDensity::zero());
        }
        let smoothness = self
            .smoothness
            .ok_or_else(|| HarnessError::Format("nonzero density needs a smoothness order".into()))?;
        let mut pieces = Vec::with_capacity(self.pieces.len());
        for (i, p) in self.pieces.iter().enumerate() {
            if p.re_coeffs.len() != p.im_coeffs.len() {
                return Err(HarnessError::Format(format!(
                    "piece {i}: re_coeffs and im_coeffs differ in length"
                )));
            }
            let coeffs = p
                .re_coeffs
                .iter()
                .zip(&p.im_coeffs)
                .map(|(&re, &im)| C64::new(re, im))
                .collect();
            pieces.push(Piece::new(p.interval[0], p.interval[1], coeffs));
        }
        let density = SpectralDensity::from_pieces(pieces, smoothness)?;
        let support = density.support().map(|(a, b)| [a, b]);
        if support != self.support {
            return Err(HarnessError::Format(format!(
                "declared support {:?} does not match the pieces {:?}",
                self.support, support
            )));
        }
        Ok(density)
    }
}

pub fn density_to_json(s: &SpectralDensity) -> String {
    serde_json::to_string_pretty(&DensityDoc::from_density(s)).expect("density documents serialize")
}

pub fn density_from_json(text: &str) -> Result<SpectralDensity, HarnessError> {
    let doc: DensityDoc = serde_json::from_str(text)?;
    doc.to_density()
}

pub fn read_density(path: &Path) -> Result<SpectralDensity, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    density_from_json(&text)
}

/// `{value, err, tail, flags}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReportDoc {
    pub value: f64,
    pub err: f64,
    pub tail: f64,
    pub flags: Vec<String>,
}

impl From<&NormReport> for NormReportDoc {
    fn from(r: &NormReport) -> Self {
        NormReportDoc {
            value: r.value,
            err: r.quadrature_error_estimate,
            tail: r.tail_contribution,
            flags: r.flags.iter().map(|f| f.as_str().to_string()).collect(),
        }
    }
}

/// One coefficient `λ` of a decomposition; the atom enters as `λ i^phase g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaDoc {
    pub atom: usize,
    pub label: String,
    pub phase: u8,
    pub value: f64,
}

/// `{objective, lambdas, residual}`; the residual is relative to the target's
/// grid sup norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionDoc {
    pub objective: f64,
    pub lambdas: Vec<LambdaDoc>,
    pub residual: f64,
    pub iterations: usize,
}

impl DecompositionDoc {
    pub fn new(result: &DecompositionResult, dict: &Dictionary) -> Self {
        DecompositionDoc {
            objective: result.objective,
            lambdas: result
                .terms
                .iter()
                .map(|t| LambdaDoc {
                    atom: t.atom,
                    label: dict.atoms()[t.atom].label.clone(),
                    phase: t.phase,
                    value: t.weight,
                })
                .collect(),
            residual: if result.target_sup > 0.0 {
                result.residual / result.target_sup
            } else {
                0.0
            },
            iterations: result.iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use pwenv_core::spectrum::{make_bump, make_fejer};
    use std::f64::consts::PI;

    #[test]
    fn zero_density_round_trips() {
        let text = density_to_json(&SpectralDensity::zero());
        assert!(density_from_json(&text).unwrap().is_zero());
    }

    #[test]
    fn bump_round_trips_bitwise() {
        let s = make_bump(-PI, -PI + 0.3, 5).unwrap();
        let back = density_from_json(&density_to_json(&s)).unwrap();
        assert_eq!(DensityDoc::from_density(&s), DensityDoc::from_density(&back));
        assert_eq!(back.smoothness(), 5);
    }

    #[test]
    fn rejects_bad_documents() {
        let mut doc = DensityDoc::from_density(&make_fejer(PI / 2.0).unwrap());
        doc.support = Some([-1.0, 1.0]);
        assert!(doc.to_density().is_err());
        let mut doc = DensityDoc::from_density(&make_fejer(PI / 2.0).unwrap());
        doc.version = 2;
        assert!(doc.to_density().is_err());
        let mut doc = DensityDoc::from_density(&make_fejer(PI / 2.0).unwrap());
        doc.smoothness = Some(3);
        assert!(doc.to_density().is_err(), "a triangle is not C^3");
        assert!(density_from_json(r#"{"version":1,"support":null,"smoothness":null,"pieces":[],"x":1}"#).is_err());
    }
}
