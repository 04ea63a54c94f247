//! The function catalogs the checks run over.
//!
//! The band-limited catalog spans spectra that touch `±π` (Fejér and the end
//! bumps), spectra with a gap on both sides (the centered bump and its
//! modulations), symmetric and asymmetric ones, and sums of these.

use std::f64::consts::PI;

use pwenv_core::conformal::{Binomial, DiskFunction, PowerSeries, Transferred};
use pwenv_core::evaluate::BandLimitedFunction;
use pwenv_core::spectrum::{make_bump, make_fejer, modulate};
use pwenv_core::C64;

use crate::config::ExperimentConfig;
use crate::formats::read_density;
use crate::HarnessError;

#[derive(Debug, Clone)]
pub struct Entry {
    pub name: String,
    pub function: BandLimitedFunction,
}

impl Entry {
    fn new(name: impl Into<String>, function: BandLimitedFunction) -> Self {
        Entry {
            name: name.into(),
            function,
        }
    }

    /// Distance from the spectrum to `{-π, π}`; zero when it touches either.
    pub fn spectral_gap(&self) -> f64 {
        match self.function.density().support() {
            Some((a, b)) => (a + PI).min(PI - b).max(0.0),
            None => PI,
        }
    }
}

fn centered_bump() -> BandLimitedFunction {
    BandLimitedFunction::new(make_bump(-PI / 2.0, PI / 2.0, 5).expect("valid bump"))
}

fn shifted_center(shift: f64) -> BandLimitedFunction {
    BandLimitedFunction::new(modulate(centered_bump().density(), shift).expect("stays in [-2π, 2π]"))
}

/// `fejer(π/2)`, the end bumps `[-π, -π+ε]` for every `ε` and `k` in the
/// grids, the centered bump on `[-π/2, π/2]` (`k = 5`), its modulations by
/// `±π/4`, two sums, then any density files named in the configuration.
pub fn catalog(config: &ExperimentConfig) -> Result<Vec<Entry>, HarnessError> {
    let fejer = BandLimitedFunction::new(make_fejer(PI / 2.0)?);
    let mut out = vec![Entry::new("fejer(pi/2)", fejer.clone())];
    for &k in &config.smoothness_grid {
        for &eps in &config.eps_grid {
            let f = BandLimitedFunction::new(make_bump(-PI, -PI + eps, k)?);
            out.push(Entry::new(format!("bump[-pi,-pi+{eps}]k{k}"), f));
        }
    }
    let center = centered_bump();
    out.push(Entry::new("bump[-pi/2,pi/2]k5", center.clone()));
    out.push(Entry::new("mod(bump[-pi/2,pi/2]k5,+pi/4)", shifted_center(PI / 4.0)));
    out.push(Entry::new("mod(bump[-pi/2,pi/2]k5,-pi/4)", shifted_center(-PI / 4.0)));
    out.push(Entry::new(
        "fejer(pi/2)+0.5i*bump[-pi/2,pi/2]k5",
        fejer.add(&center.scale(C64::new(0.0, 0.5))),
    ));
    out.push(Entry::new(
        "bump[-pi/2,pi/2]k5+i*mod(bump[-pi/2,pi/2]k5,+pi/4)",
        center.add(&shifted_center(PI / 4.0).scale(C64::new(0.0, 1.0))),
    ));
    for path in &config.densities {
        let density = read_density(path)?;
        if density.is_zero() {
            return Err(HarnessError::Config(format!(
                "{}: the zero function cannot join the catalog (every ratio would be 0/0)",
                path.display()
            )));
        }
        out.push(Entry::new(
            format!("file:{}", path.display()),
            BandLimitedFunction::new(density),
        ));
    }
    Ok(out)
}

pub struct DiskEntry {
    pub name: String,
    pub function: Box<dyn DiskFunction + Send>,
}

/// `0, 1, w, w², (1-w)^{1/2}` and the transferred section `e^{iπz} fejer(π/2)`.
pub fn disk_catalog() -> Result<Vec<DiskEntry>, HarnessError> {
    let section = BandLimitedFunction::new(modulate(&make_fejer(PI / 2.0)?, PI)?);
    let functions: Vec<Box<dyn DiskFunction + Send>> = vec![
        Box::new(PowerSeries::constant(0.0)),
        Box::new(PowerSeries::constant(1.0)),
        Box::new(PowerSeries::monomial(1)),
        Box::new(PowerSeries::monomial(2)),
        Box::new(Binomial { beta: 0.5 }),
        Box::new(Transferred::new(section)?),
    ];
    Ok(functions
        .into_iter()
        .map(|g| DiskEntry {
            name: if g.is_zero() { String::from("0") } else { g.name() },
            function: g,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_catalog_shape() {
        let c = catalog(&ExperimentConfig::default()).unwrap();
        assert_eq!(c.len(), 1 + 8 + 5);
        assert!(c.iter().all(|e| e.function.type_bound() <= PI + 1e-12));
        let gapped: Vec<_> = c
            .iter()
            .filter(|e| e.spectral_gap() > 0.1)
            .map(|e| e.name.as_str())
            .collect();
        assert_eq!(gapped.len(), 4, "{gapped:?}");
        let mut names: Vec<_> = c.iter().map(|e| e.name.clone()).collect();
        names.dedup();
        assert_eq!(names.len(), c.len());
    }

    #[test]
    fn disk_catalog_has_zero_first() {
        let d = disk_catalog().unwrap();
        assert_eq!(d.len(), 6);
        assert!(d[0].function.is_zero());
        assert_eq!(d[1].name, "1");
    }
}
