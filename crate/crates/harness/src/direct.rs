//! Direct 2D quadrature of the envelope integral, used as an oracle for the
//! half-plane decomposition in `pwenv_core::norms`.
//!
//! It integrates `e^{-qπ|y|} |y|^α |f(x+iy)|^q` literally: `f` is evaluated
//! pointwise, both half-planes are swept in `y` with the substitution
//! `y = u^{1/(1+α)}` on `(0, 1]` (which turns `y^α dy` into `du/(1+α)`), and
//! each line is integrated over a window grown in doubling shells until the
//! shells decay geometrically below tolerance. That restricts it to functions
//! whose spectrum keeps a gap from `±π` (so the integrand decays
//! exponentially in `|y|`) and whose decay in `x` is fast enough for the
//! shells to shrink quickly.

use std::f64::consts::PI;

use pwenv_core::evaluate::{eval_point, BandLimitedFunction};
use pwenv_core::norms::EnvelopeParams;
use pwenv_core::quadrature::{adaptive, uniform_cuts, AdaptiveOptions};
use pwenv_core::C64;

use crate::HarnessError;

/// `q·decay_order` needed before the window truncation is ignored.
pub const MIN_DECAY: f64 = 5.0;
/// `e^{-DECAY_NEPERS}` bounds the weighted integrand where the `y` sweep stops.
const DECAY_NEPERS: f64 = 40.0;
const MAX_LINE_PANELS: usize = 200_000;
const MAX_SHELLS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectIntegral {
    pub value: f64,
    pub err: f64,
}

/// `∫_ℂ e^{-qπ|y|} |y|^{q/p-2} |f(x+iy)|^q dx dy`.
pub fn direct_envelope_integral(
    f: &BandLimitedFunction,
    params: EnvelopeParams,
    rel_tol: f64,
) -> Result<DirectIntegral, HarnessError> {
    let Some((a, b)) = f.density().support() else {
        return Ok(DirectIntegral { value: 0.0, err: 0.0 });
    };
    let q = params.q();
    let alpha = params.alpha();
    // |f(x+iy)| ≤ ∫|s| e^{-yt} dt, so the weighted integrand decays like
    // e^{-q(π+a)y} above the axis and e^{-q(π-b)|y|} below it.
    let rates = [PI + a, PI - b];
    if rates.iter().any(|r| *r < 1e-2) {
        return Err(HarnessError::Config(format!(
            "direct quadrature needs a spectral gap from ±π; support is [{a}, {b}]"
        )));
    }
    let decay = q * f.decay_order() as f64;
    if decay < MIN_DECAY {
        return Err(HarnessError::Config(format!(
            "direct quadrature needs q·decay ≥ {MIN_DECAY}, got {decay}"
        )));
    }
    let width = (b - a).max(1e-3);

    let mut value = 0.0;
    let mut err = 0.0;
    let mut worst_line = 0.0f64;
    for (side, rate) in [(1.0, rates[0]), (-1.0, rates[1])] {
        let mut line = |y: f64| -> f64 {
            let y = side * y;
            let reach = 32.0 + 8.0 * y.abs() + 8.0 * PI / width;
            let step = 1.0f64.max(y.abs() / 8.0).min(PI / width);
            let n = (2.0 * reach / step).ceil() as usize;
            let damp = (-q * PI * y.abs()).exp();
            let opts = AdaptiveOptions {
                rel_tol: 0.1 * rel_tol,
                abs_tol: 0.0,
                max_panels: MAX_LINE_PANELS,
            };
            let g = |x: f64| damp * eval_point(f, C64::new(x, y)).norm().powf(q);
            let core = adaptive(&uniform_cuts(-reach, reach, n), opts, g);
            let (mut value, mut err) = (core.value, core.err);
            // Doubling shells [R, 2R] on both sides. Once the shells shrink
            // geometrically, the rest is bounded by shell·r/(1-r).
            let (mut lo, mut previous) = (reach, f64::INFINITY);
            for _ in 0..MAX_SHELLS {
                let hi = 2.0 * lo;
                let shell = adaptive(&uniform_cuts(lo, hi, 16), opts, g).value
                    + adaptive(&uniform_cuts(-hi, -lo, 16), opts, g).value;
                value += shell;
                let ratio = shell / previous;
                previous = shell;
                lo = hi;
                if ratio < 0.5 {
                    let rest = shell * ratio / (1.0 - ratio);
                    if rest <= 0.01 * rel_tol * value {
                        err += rest;
                        break;
                    }
                }
            }
            if value > 0.0 {
                worst_line = worst_line.max(err / value);
            }
            value
        };
        // (0, 1] in u = y^{1+α}, geometrically graded towards u = 0.
        let mut cuts: Vec<f64> = (0..24).rev().map(|j| 0.5f64.powi(j)).collect();
        cuts.insert(0, 0.0);
        let inner = adaptive(
            &cuts,
            AdaptiveOptions {
                rel_tol: 0.1 * rel_tol,
                abs_tol: 0.0,
                max_panels: 4000,
            },
            |u| line(u.powf(1.0 / (1.0 + alpha))) / (1.0 + alpha),
        );
        let reach_y = 1.0f64.max(DECAY_NEPERS / (q * rate));
        let n = (reach_y - 1.0).ceil().max(1.0) as usize;
        let inner_value = inner.value;
        let outer = adaptive(
            &uniform_cuts(1.0, reach_y, n),
            AdaptiveOptions {
                rel_tol: 0.1 * rel_tol,
                abs_tol: 0.01 * rel_tol * inner_value,
                max_panels: 4000,
            },
            |y| y.powf(alpha) * line(y),
        );
        if !(inner.converged && outer.converged) {
            return Err(HarnessError::Format(String::from(
                "direct quadrature hit its panel budget",
            )));
        }
        value += inner.value + outer.value;
        err += inner.err + outer.err;
    }
    err += worst_line * value;
    Ok(DirectIntegral { value, err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use pwenv_core::spectrum::{make_bump, make_fejer};

    #[test]
    fn refuses_spectra_touching_the_edge() {
        let params = EnvelopeParams::new(0.75, 1.0).unwrap();
        let fejer = BandLimitedFunction::new(make_fejer(PI / 2.0).unwrap());
        assert!(direct_envelope_integral(&fejer, params, 1e-6).is_err());
        let narrow = BandLimitedFunction::new(make_bump(-1.0, 1.0, 1).unwrap());
        assert!(direct_envelope_integral(&narrow, params, 1e-6).is_err());
    }
}
