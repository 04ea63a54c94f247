//! Experiment configuration, read from TOML or JSON.
//!
//! Every field is optional; omitted fields take the defaults below. Valid
//! ranges:
//!
//! | field | default | range |
//! |---|---|---|
//! | `suite` | `"default"` | nonempty |
//! | `p_grid` | `[0.6, 0.75, 0.9]` | each in `(0.5, 4]` |
//! | `q_grid` | `[1.0]` | each in `(0, 1]` |
//! | `y_grid` | `[±0.25, ±0.5, ±1, ±2]` | each finite with `\|y\| ≤ 8` |
//! | `eps_grid` | `[1, 1/2, 1/4, 1/8]` | each in `(0, π]` |
//! | `smoothness_grid` | `[3, 5]` | each in `[2, 12]` |
//! | `partition_smoothness` | `3` | `[1, 12]` |
//! | `q_envelope.p`, `q_envelope.q` | `0.5`, `0.75` | `0 < p < q ≤ 1` |
//! | `q_envelope.pairs` | `20` | `≥ 1` |
//! | `q_envelope.rel_tolerance` | `1e-5` | `(0, 1e-2]`, or absent to inherit |
//! | `envelope_p` | `0.75` | `(0.5, 1)` |
//! | `equivalence_min_family` | `10` | `≥ 1` |
//! | `quadrature.*` | see [`QuadratureOverrides`] | as in `QuadratureSpec` |
//! | `densities` | `[]` | paths to nonzero density documents |
//! | `output` | absent | directory for reports |
//! | `seed` | `0` | any `u64` |

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use pwenv_core::norms::QuadratureSpec;
use serde::{Deserialize, Serialize};

use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub suite: String,
    pub p_grid: Vec<f64>,
    pub q_grid: Vec<f64>,
    pub y_grid: Vec<f64>,
    pub eps_grid: Vec<f64>,
    /// Smoothness orders `k` of the end bumps and the counterexample sweep.
    pub smoothness_grid: Vec<u32>,
    /// Order of the smoothstep ramps in the partition of unity behind `Q`.
    pub partition_smoothness: u32,
    /// `p` of the `q = 1` envelope used by the counterexample sweep, the
    /// equivalence study and the decomposition-consistency check.
    pub envelope_p: f64,
    pub equivalence_min_family: usize,
    pub q_envelope: QEnvelopeConfig,
    pub quadrature: QuadratureOverrides,
    /// Extra density documents appended to the catalog.
    pub densities: Vec<PathBuf>,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            suite: String::from("default"),
            p_grid: vec![0.6, 0.75, 0.9],
            q_grid: vec![1.0],
            y_grid: vec![-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0],
            eps_grid: vec![1.0, 0.5, 0.25, 0.125],
            smoothness_grid: vec![3, 5],
            partition_smoothness: 3,
            envelope_p: 0.75,
            equivalence_min_family: 10,
            q_envelope: QEnvelopeConfig::default(),
            quadrature: QuadratureOverrides::default(),
            densities: Vec::new(),
            output: None,
            seed: 0,
        }
    }
}

/// Random pairs for the `q`-triangle inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QEnvelopeConfig {
    pub p: f64,
    pub q: f64,
    pub pairs: usize,
    /// Overrides `quadrature.rel_tolerance` for this suite. The triangle
    /// margins are a few percent, far above `1e-5`, and the `q < 1` integrals
    /// are costly.
    pub rel_tolerance: Option<f64>,
}

impl Default for QEnvelopeConfig {
    fn default() -> Self {
        QEnvelopeConfig {
            p: 0.5,
            q: 0.75,
            pairs: 20,
            rel_tolerance: Some(1e-5),
        }
    }
}

/// Partial `QuadratureSpec`; absent fields keep the library defaults, except
/// `rel_tolerance`, which defaults to `1e-7` here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureOverrides {
    pub x_truncation: Option<f64>,
    pub x_panel_count: Option<usize>,
    pub y_truncation: Option<f64>,
    pub jacobi_node_count: Option<usize>,
    pub rel_tolerance: Option<f64>,
    pub tail_model: Option<bool>,
}

impl Default for QuadratureOverrides {
    fn default() -> Self {
        QuadratureOverrides {
            x_truncation: None,
            x_panel_count: None,
            y_truncation: None,
            jacobi_node_count: None,
            rel_tolerance: Some(1e-7),
            tail_model: None,
        }
    }
}

impl QuadratureOverrides {
    pub fn apply(&self, base: QuadratureSpec) -> QuadratureSpec {
        QuadratureSpec {
            x_truncation: self.x_truncation.unwrap_or(base.x_truncation),
            x_panel_count: self.x_panel_count.unwrap_or(base.x_panel_count),
            y_truncation: self.y_truncation.unwrap_or(base.y_truncation),
            jacobi_node_count: self.jacobi_node_count.unwrap_or(base.jacobi_node_count),
            rel_tolerance: self.rel_tolerance.unwrap_or(base.rel_tolerance),
            tail_model: self.tail_model.unwrap_or(base.tail_model),
        }
    }
}

impl ExperimentConfig {
    /// Reads a `.toml` or `.json` file and validates it.
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let config: ExperimentConfig = match path.extension().and_then(|e| e.to_str()) {
            Some("toml") => toml::from_str(&text)?,
            Some("json") => serde_json::from_str(&text)?,
            _ => {
                return Err(HarnessError::Config(format!(
                    "{}: expected a .toml or .json file",
                    path.display()
                )))
            }
        };
        config.validate()?;
        Ok(config)
    }

    pub fn quadrature_spec(&self) -> QuadratureSpec {
        self.quadrature.apply(QuadratureSpec::default())
    }

    /// Quadrature for the `q`-triangle suite.
    pub fn q_envelope_spec(&self) -> QuadratureSpec {
        let mut spec = self.quadrature_spec();
        if let Some(tol) = self.q_envelope.rel_tolerance {
            spec.rel_tolerance = tol;
        }
        spec
    }

    /// Applies `--tol`, which then governs every suite.
    pub fn set_tolerance(&mut self, tol: f64) {
        self.quadrature.rel_tolerance = Some(tol);
        self.q_envelope.rel_tolerance = None;
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |msg: String| Err(HarnessError::Config(msg));
        if self.suite.trim().is_empty() {
            return fail("suite name is empty".into());
        }
        grid("p_grid", &self.p_grid, |p| p > 0.5 && p <= 4.0, "(0.5, 4]")?;
        grid("q_grid", &self.q_grid, |q| q > 0.0 && q <= 1.0, "(0, 1]")?;
        grid("y_grid", &self.y_grid, |y| y.abs() <= 8.0, "[-8, 8]")?;
        grid("eps_grid", &self.eps_grid, |e| e > 0.0 && e <= PI, "(0, π]")?;
        if self.smoothness_grid.is_empty() || self.smoothness_grid.iter().any(|k| !(2..=12).contains(k)) {
            return fail("smoothness_grid entries must lie in [2, 12]".into());
        }
        if !(1..=12).contains(&self.partition_smoothness) {
            return fail("partition_smoothness must lie in [1, 12]".into());
        }
        let qe = &self.q_envelope;
        if !(qe.p > 0.0 && qe.p < qe.q && qe.q <= 1.0) {
            return fail(format!(
                "q_envelope needs 0 < p < q ≤ 1, got p = {}, q = {}",
                qe.p, qe.q
            ));
        }
        if qe.pairs == 0 {
            return fail("q_envelope.pairs must be positive".into());
        }
        if let Some(tol) = qe.rel_tolerance {
            if !(tol > 0.0 && tol <= 1e-2) {
                return fail("q_envelope.rel_tolerance must lie in (0, 1e-2]".into());
            }
        }
        if !(self.envelope_p > 0.5 && self.envelope_p < 1.0) {
            return fail(format!("envelope_p = {} must lie in (0.5, 1)", self.envelope_p));
        }
        if self.equivalence_min_family == 0 {
            return fail("equivalence_min_family must be positive".into());
        }
        self.quadrature_spec()
            .validate()
            .map_err(|e| HarnessError::Config(format!("quadrature: {e}")))?;
        self.q_envelope_spec()
            .validate()
            .map_err(|e| HarnessError::Config(format!("q_envelope quadrature: {e}")))?;
        Ok(())
    }
}

fn grid(name: &str, values: &[f64], ok: impl Fn(f64) -> bool, range: &str) -> Result<(), HarnessError> {
    if values.is_empty() {
        return Err(HarnessError::Config(format!("{name} is empty")));
    }
    if let Some(v) = values.iter().find(|v| !(v.is_finite() && ok(**v))) {
        return Err(HarnessError::Config(format!("{name} entry {v} outside {range}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ExperimentConfig::default().validate().unwrap();
        assert_eq!(ExperimentConfig::default().quadrature_spec().rel_tolerance, 1e-7);
        assert_eq!(ExperimentConfig::default().q_envelope_spec().rel_tolerance, 1e-5);
    }

    #[test]
    fn partial_toml_keeps_defaults() {
        let c: ExperimentConfig =
            toml::from_str("suite = \"small\"\np_grid = [0.75]\n[quadrature]\nx_truncation = 40.0\n").unwrap();
        c.validate().unwrap();
        assert_eq!(c.p_grid, vec![0.75]);
        assert_eq!(c.eps_grid, ExperimentConfig::default().eps_grid);
        assert_eq!(c.quadrature_spec().x_truncation, 40.0);
        assert_eq!(c.quadrature_spec().rel_tolerance, 1e-7);
    }

    #[test]
    fn json_and_toml_agree() {
        let c = ExperimentConfig {
            seed: 7,
            ..ExperimentConfig::default()
        };
        let json: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        let toml_text = toml::to_string(&c).unwrap();
        let from_toml: ExperimentConfig = toml::from_str(&toml_text).unwrap();
        assert_eq!(json, c);
        assert_eq!(from_toml, c);
    }

    #[test]
    fn rejects_out_of_range() {
        let bad = [
            ExperimentConfig {
                p_grid: vec![0.4],
                ..Default::default()
            },
            ExperimentConfig {
                eps_grid: vec![4.0],
                ..Default::default()
            },
            ExperimentConfig {
                y_grid: vec![f64::NAN],
                ..Default::default()
            },
            ExperimentConfig {
                q_envelope: QEnvelopeConfig {
                    p: 0.8,
                    q: 0.75,
                    ..Default::default()
                },
                ..Default::default()
            },
            ExperimentConfig {
                quadrature: QuadratureOverrides {
                    rel_tolerance: Some(0.5),
                    ..Default::default()
                },
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
        assert!(toml::from_str::<ExperimentConfig>("unknown = 1").is_err());
    }

    #[test]
    fn tol_flag_overrides_every_suite() {
        let mut c = ExperimentConfig::default();
        c.set_tolerance(1e-8);
        assert_eq!(c.quadrature_spec().rel_tolerance, 1e-8);
        assert_eq!(c.q_envelope_spec().rel_tolerance, 1e-8);
    }
}
