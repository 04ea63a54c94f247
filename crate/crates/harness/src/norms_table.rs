//! The `norms` table: `E^p` norms over the `p` grid and envelope norms over
//! every admissible `(p, q)` pair, for each catalog function.

use std::path::{Path, PathBuf};

use pwenv_core::norms::{envelope_integral_norm, ep_norm, EnvelopeParams, NormReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checks::Context;
use crate::formats::NormReportDoc;
use crate::report::write_atomic;
use crate::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub function: String,
    /// `"ep"` or `"envelope"`.
    pub norm: String,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<NormReportDoc>,
    /// Why the norm could not be computed (for example a divergent integral).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormsTable {
    pub rows: Vec<NormRow>,
}

fn row(function: &str, norm: &str, p: f64, q: Option<f64>, r: Result<NormReport, pwenv_core::Error>) -> NormRow {
    let (report, error) = match r {
        Ok(r) => (Some(NormReportDoc::from(&r)), None),
        Err(e) => (None, Some(e.to_string())),
    };
    NormRow {
        function: function.to_string(),
        norm: norm.to_string(),
        p,
        q,
        report,
        error,
    }
}

/// Envelope pairs: `q_grid × p_grid` where admissible, then the `q`-envelope pair.
fn envelope_pairs(ctx: &Context) -> Vec<(f64, f64, bool)> {
    let cfg = &ctx.config;
    let mut pairs: Vec<(f64, f64, bool)> = Vec::new();
    for &q in &cfg.q_grid {
        for &p in &cfg.p_grid {
            if EnvelopeParams::new(p, q).is_ok() {
                pairs.push((p, q, false));
            }
        }
    }
    let qe = &cfg.q_envelope;
    if !pairs.iter().any(|&(p, q, _)| p == qe.p && q == qe.q) {
        pairs.push((qe.p, qe.q, true));
    }
    pairs
}

pub fn compute(ctx: &Context) -> NormsTable {
    let pairs = envelope_pairs(ctx);
    let q_quad = ctx.config.q_envelope_spec();
    let rows: Vec<Vec<NormRow>> = ctx
        .catalog
        .par_iter()
        .map(|entry| {
            let f = &entry.function;
            let mut out: Vec<NormRow> = ctx
                .config
                .p_grid
                .iter()
                .map(|&p| row(&entry.name, "ep", p, None, ep_norm(f, p, &ctx.quad)))
                .collect();
            for &(p, q, q_suite) in &pairs {
                let quad = if q_suite { &q_quad } else { &ctx.quad };
                let r = EnvelopeParams::new(p, q).and_then(|params| envelope_integral_norm(f, params, quad));
                out.push(row(&entry.name, "envelope", p, Some(q), r));
            }
            out
        })
        .collect();
    NormsTable {
        rows: rows.into_iter().flatten().collect(),
    }
}

impl NormsTable {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("tables serialize");
        text.push('\n');
        text
    }

    pub fn to_csv(&self) -> Result<String, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["function", "norm", "p", "q", "value", "err", "tail", "flags", "error"])?;
        for r in &self.rows {
            let (value, err, tail, flags) = match &r.report {
                Some(d) => (
                    d.value.to_string(),
                    d.err.to_string(),
                    d.tail.to_string(),
                    d.flags.join(";"),
                ),
                None => Default::default(),
            };
            w.write_record([
                r.function.clone(),
                r.norm.clone(),
                r.p.to_string(),
                r.q.map(|q| q.to_string()).unwrap_or_default(),
                value,
                err,
                tail,
                flags,
                r.error.clone().unwrap_or_default(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Format(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Writes `<dir>/norms.json` and `<dir>/norms.csv`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
        let json = dir.join("norms.json");
        let csv = dir.join("norms.csv");
        write_atomic(&json, self.to_json().as_bytes())?;
        write_atomic(&csv, self.to_csv()?.as_bytes())?;
        Ok(vec![json, csv])
    }
}
