//! Line, Hardy, Bergman and envelope norms of band-limited functions.
//!
//! Every integral over a horizontal line is split into an adaptive core
//! `[-X, X]` and doubling chunks `[X 2^m, X 2^{m+1}]` on each side. When the
//! leading phase pattern of `f` at infinity is periodic, chunk ends are placed
//! on multiples of the period so each chunk averages it exactly. What lies
//! beyond the last chunk is extrapolated from the model
//! `R(X) = Σ_{k<3} a_k X^{1-e-k}` fitted to the last chunks, where `e` is the
//! exact decay exponent of the integrand. Integrals over a half-plane are
//! iterated: Gauss–Jacobi for the `y^α` endpoint, adaptive Gauss–Kronrod on
//! geometric panels up to 1, then doubling panels with a geometric remainder
//! whose successive estimates must agree.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by std float methods when std is linked
use num_traits::Float;

use crate::conformal::DiskFunction;
use crate::error::{invalid, Error, Result};
use crate::evaluate::{leading_period, BandLimitedFunction, LineEvaluator, AMPLIFICATION_LIMIT};
use crate::quadrature::{adaptive, jacobi_left_endpoint, uniform_cuts, AdaptiveOptions};
use crate::spectrum::modulate;
use crate::C64;

/// Slack for support containment checks.
const SUPPORT_SLACK: f64 = 1e-12;

/// Discretization parameters shared by all norm computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Half-width of the adaptive core on each line.
    pub x_truncation: f64,
    /// Minimum number of initial panels on the core.
    pub x_panel_count: usize,
    /// Top of the geometric y-grid for Hardy means; the first height at
    /// which half-plane remainders are extrapolated.
    pub y_truncation: f64,
    /// Gauss–Jacobi nodes for the `|y|^α` endpoint.
    pub jacobi_node_count: usize,
    pub rel_tolerance: f64,
    /// Extrapolate line tails instead of truncating them.
    pub tail_model: bool,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            x_truncation: 32.0,
            x_panel_count: 64,
            y_truncation: 8.0,
            jacobi_node_count: 16,
            rel_tolerance: 1e-9,
            tail_model: true,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_truncation > 0.0 && self.x_truncation.is_finite()) {
            return Err(invalid("x_truncation must be positive"));
        }
        if !(self.y_truncation > 0.0 && self.y_truncation.is_finite()) {
            return Err(invalid("y_truncation must be positive"));
        }
        if self.x_panel_count < 4 || self.jacobi_node_count < 4 {
            return Err(invalid("panel and node counts must be at least 4"));
        }
        if !(self.rel_tolerance > 0.0 && self.rel_tolerance <= 1e-2) {
            return Err(invalid("rel_tolerance must lie in (0, 1e-2]"));
        }
        Ok(())
    }
}

/// Exponents of the q-envelope: `0 < p < q ≤ 1`, `α = q/p - 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeParams {
    p: f64,
    q: f64,
    alpha: f64,
}

impl EnvelopeParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(invalid(format!("p = {p} must lie in (0, 1)")));
        }
        if !(q > p && q <= 1.0) {
            return Err(invalid(format!("q = {q} must lie in (p, 1]")));
        }
        Ok(EnvelopeParams {
            p,
            q,
            alpha: q / p - 2.0,
        })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Confidence warnings attached to a norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NormFlag {
    /// Some adaptive integration hit its panel budget.
    QuadratureNotConverged,
    /// Successive tail extrapolations did not settle.
    TailNotConverged,
    /// The line height amplifies rounding by more than `1e12`.
    LowConfidence,
    /// The extrapolated tail carries more than 1% of the value.
    TailDominant,
    /// Sampled Hardy means were not non-increasing in `|y|`.
    NonMonotoneMeans,
}

impl NormFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            NormFlag::QuadratureNotConverged => "quadrature-not-converged",
            NormFlag::TailNotConverged => "tail-not-converged",
            NormFlag::LowConfidence => "low-confidence",
            NormFlag::TailDominant => "tail-dominant",
            NormFlag::NonMonotoneMeans => "non-monotone-means",
        }
    }
}

/// A norm (or integral) with its error budget.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    pub value: f64,
    pub quadrature_error_estimate: f64,
    /// Part of `value` contributed by extrapolated tails, in the units of `value`.
    pub tail_contribution: f64,
    pub flags: Vec<NormFlag>,
}

impl NormReport {
    pub fn zero() -> Self {
        NormReport {
            value: 0.0,
            quadrature_error_estimate: 0.0,
            tail_contribution: 0.0,
            flags: Vec::new(),
        }
    }

    fn from_parts(value: f64, err: f64, tail: f64, mut flags: Vec<NormFlag>) -> Self {
        let value = value.max(0.0);
        let tail = tail.clamp(0.0, value);
        if tail > 0.01 * value {
            flags.push(NormFlag::TailDominant);
        }
        flags.sort();
        flags.dedup();
        NormReport {
            value,
            quadrature_error_estimate: err,
            tail_contribution: tail,
            flags,
        }
    }

    /// Takes the `1/p`-th power of an integral report.
    pub fn root(&self, p: f64) -> NormReport {
        let i = self.value;
        if i == 0.0 {
            return NormReport {
                flags: self.flags.clone(),
                ..NormReport::zero()
            };
        }
        let value = i.powf(1.0 / p);
        let err = value * self.quadrature_error_estimate / (p * i);
        let tail = value - (i - self.tail_contribution).max(0.0).powf(1.0 / p);
        NormReport {
            value,
            quadrature_error_estimate: err,
            tail_contribution: tail.clamp(0.0, value),
            flags: self.flags.clone(),
        }
    }

    pub fn has_flag(&self, flag: NormFlag) -> bool {
        self.flags.contains(&flag)
    }
}

/// Which half-plane a norm lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfPlane {
    Upper,
    Lower,
}

impl HalfPlane {
    pub fn sign(self) -> f64 {
        match self {
            HalfPlane::Upper => 1.0,
            HalfPlane::Lower => -1.0,
        }
    }
}

// ---------------------------------------------------------------------------
// Line integrals

/// Shape data for [`integrate_line`].
#[derive(Debug, Clone, Copy)]
pub(crate) struct LineShape {
    /// The integrand decays like `|x|^{-decay}`; must exceed 1.
    pub decay: f64,
    /// Period of the leading oscillation at infinity, if known.
    pub period: Option<f64>,
    /// Initial panel width.
    pub spacing: f64,
    /// Minimum core half-width.
    pub core: f64,
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct LineIntegral {
    pub value: f64,
    pub err: f64,
    pub tail: f64,
    pub converged: bool,
    pub tail_converged: bool,
}

const MAX_CHUNKS: usize = 40;
/// Largest number of initial panels spent on a single chunk.
const MAX_CHUNK_PANELS: usize = 1 << 15;
const CHUNK_START_PANELS: usize = 16;
const MAX_ADAPTIVE_PANELS: usize = 1 << 18;

#[derive(Default)]
struct SideState {
    /// `(start, integral)` of each chunk `[start, 2 start]`.
    chunks: Vec<(f64, f64)>,
    sum: f64,
    err: f64,
    tail: f64,
    estimate: Option<f64>,
    last_change: f64,
}

impl SideState {
    fn refit(&mut self, decay: f64, model: bool) {
        let n = self.chunks.len();
        if !model || n == 0 {
            self.tail = 0.0;
        } else {
            let k = n.min(3);
            let recent = &self.chunks[n - k..];
            let x_ref = 2.0 * recent[k - 1].0;
            // Rows: chunk integrals = R(start) - R(2 start), R(X) = Σ a_j (X/x_ref)^{1-e-j}
            let mut m = [[0.0f64; 4]; 3];
            for (row, &(start, value)) in recent.iter().enumerate() {
                let u = start / x_ref;
                for (j, cell) in m[row][..k].iter_mut().enumerate() {
                    let ex = 1.0 - decay - j as f64;
                    *cell = u.powf(ex) - (2.0 * u).powf(ex);
                }
                m[row][3] = value;
            }
            self.tail = match solve_small(&mut m, k) {
                Some(a) => a[..k].iter().sum(),
                None => 0.0,
            };
        }
        let estimate = self.sum + self.tail;
        self.last_change = match self.estimate {
            Some(prev) => (estimate - prev).abs(),
            None => f64::INFINITY,
        };
        self.estimate = Some(estimate);
    }
}

/// Gaussian elimination with partial pivoting on a `k×k` system whose
/// right-hand side is stored in column 3.
fn solve_small(m: &mut [[f64; 4]; 3], k: usize) -> Option<[f64; 3]> {
    for col in 0..k {
        let piv = (col..k).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col] == 0.0 || !m[piv][col].is_finite() {
            return None;
        }
        m.swap(col, piv);
        for row in col + 1..k {
            let pivot = m[col];
            let factor = m[row][col] / pivot[col];
            for (v, p) in m[row][col..].iter_mut().zip(&pivot[col..]) {
                *v -= factor * p;
            }
        }
    }
    let mut x = [0.0; 3];
    for row in (0..k).rev() {
        let mut acc = m[row][3];
        for c in row + 1..k {
            acc -= m[row][c] * x[c];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// `∫_ℝ g(x) dx` for a nonnegative integrand with algebraic decay.
pub(crate) fn integrate_line(mut g: impl FnMut(f64) -> f64, shape: &LineShape, quad: &QuadratureSpec) -> LineIntegral {
    let tol = quad.rel_tolerance;
    let spacing = shape.spacing;
    let period = shape.period.filter(|p| p.is_finite() && *p > 0.0);
    let mut x0 = shape.core.max(quad.x_truncation).max(4.0 * spacing);
    if let Some(p) = period {
        x0 = (x0 / p).ceil() * p;
    }
    let n_core = quad.x_panel_count.max((2.0 * x0 / spacing).ceil() as usize);
    let core = adaptive(
        &uniform_cuts(-x0, x0, n_core),
        AdaptiveOptions {
            rel_tol: 0.1 * tol,
            abs_tol: 0.0,
            max_panels: MAX_ADAPTIVE_PANELS,
        },
        &mut g,
    );
    let mut converged = core.converged;
    let mut sides = [SideState::default(), SideState::default()];
    let mut tail_converged = false;
    let mut start = x0;
    for m in 0..MAX_CHUNKS {
        let n = ((start / spacing).ceil() as usize).max(4);
        if n > MAX_CHUNK_PANELS {
            break;
        }
        // Far out the integrand is a slowly varying envelope with small
        // oscillations; adaptive refinement finds whatever still needs resolving.
        let n = n.min(CHUNK_START_PANELS);
        let total = core.value + sides[0].sum + sides[1].sum;
        for (side, sign) in sides.iter_mut().zip([1.0, -1.0]) {
            let (a, b) = if sign > 0.0 {
                (start, 2.0 * start)
            } else {
                (-2.0 * start, -start)
            };
            let chunk = adaptive(
                &uniform_cuts(a, b, n),
                AdaptiveOptions {
                    rel_tol: 0.1 * tol,
                    abs_tol: 0.01 * tol * total.abs(),
                    max_panels: MAX_ADAPTIVE_PANELS,
                },
                &mut g,
            );
            converged &= chunk.converged;
            side.chunks.push((start, chunk.value));
            side.sum += chunk.value;
            side.err += chunk.err;
            side.refit(shape.decay, quad.tail_model);
        }
        start *= 2.0;
        let total = core.value + sides.iter().map(|s| s.sum + s.tail).sum::<f64>();
        let change: f64 = sides.iter().map(|s| s.last_change).sum();
        let last_chunks: f64 = sides.iter().map(|s| s.chunks.last().map_or(0.0, |c| c.1)).sum();
        let settled = if quad.tail_model {
            m >= 2 && change <= tol * total.abs()
        } else {
            last_chunks <= 0.1 * tol * total.abs()
        };
        if settled || total == 0.0 {
            tail_converged = true;
            break;
        }
    }
    let tail: f64 = sides.iter().map(|s| s.tail).sum();
    let value = core.value + sides.iter().map(|s| s.sum).sum::<f64>() + tail;
    let mut err = core.err + sides.iter().map(|s| s.err).sum::<f64>();
    err += sides
        .iter()
        .map(|s| {
            if s.last_change.is_finite() {
                s.last_change
            } else {
                s.tail.abs()
            }
        })
        .sum::<f64>();
    LineIntegral {
        value,
        err,
        tail,
        converged,
        tail_converged,
    }
}

/// Shape of `|f(x+iy)|^p` on a line.
fn power_shape(f: &BandLimitedFunction, p: f64, y: f64) -> LineShape {
    let lead = f.leading_order().unwrap_or(0) as f64;
    let width = f.density().support().map(|(a, b)| b - a).unwrap_or(1.0).max(1e-3);
    LineShape {
        decay: p * (lead + 1.0),
        period: leading_period(f),
        spacing: (PI / width).max(0.25 * y.abs()),
        core: 8.0 * y.abs(),
    }
}

/// `∫ |f(x+iy)|^p dx` with no precondition checks.
fn line_power_integral(f: &BandLimitedFunction, p: f64, y: f64, quad: &QuadratureSpec) -> LineIntegral {
    if f.is_zero() {
        return LineIntegral {
            converged: true,
            tail_converged: true,
            ..LineIntegral::default()
        };
    }
    let line = LineEvaluator::new(f, y);
    let shape = power_shape(f, p, y);
    integrate_line(|x| line.eval(x).norm().powf(p), &shape, quad)
}

fn line_flags(li: &LineIntegral) -> Vec<NormFlag> {
    let mut flags = Vec::new();
    if !li.converged {
        flags.push(NormFlag::QuadratureNotConverged);
    }
    if !li.tail_converged {
        flags.push(NormFlag::TailNotConverged);
    }
    flags
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("exponent p = {p} must be positive")))
    }
}

fn check_decay(f: &BandLimitedFunction, p: f64) -> Result<()> {
    let d = f.decay_order() as f64;
    if p * d > 1.0 {
        return Ok(());
    }
    // decay order = smoothness + 2
    let needed = (1.0 / p - 2.0).floor().max(-1.0) + 1.0;
    Err(Error::Diverges(format!(
        "p·decay = {} ≤ 1; requires spectral smoothness of at least C^{}",
        p * d,
        needed
    )))
}

/// `∫ |f(x+iy)|^p dx`.
pub fn lp_line_norm(f: &BandLimitedFunction, p: f64, y: f64, quad: &QuadratureSpec) -> Result<NormReport> {
    quad.validate()?;
    check_p(p)?;
    if !y.is_finite() {
        return Err(invalid("line height must be finite"));
    }
    if f.is_zero() {
        return Ok(NormReport::zero());
    }
    check_decay(f, p)?;
    let li = line_power_integral(f, p, y, quad);
    let mut flags = line_flags(&li);
    if f.amplification(y) > AMPLIFICATION_LIMIT {
        flags.push(NormFlag::LowConfidence);
    }
    Ok(NormReport::from_parts(li.value, li.err, li.tail, flags))
}

fn check_type(f: &BandLimitedFunction) -> Result<()> {
    let tau = f.type_bound();
    if tau > PI * (1.0 + SUPPORT_SLACK) {
        Err(Error::NotInEp { type_bound: tau })
    } else {
        Ok(())
    }
}

/// `‖f‖_{E^p} = (∫ |f(x)|^p dx)^{1/p}`.
pub fn ep_norm(f: &BandLimitedFunction, p: f64, quad: &QuadratureSpec) -> Result<NormReport> {
    check_type(f)?;
    Ok(lp_line_norm(f, p, 0.0, quad)?.root(p))
}

fn check_section(f: &BandLimitedFunction, side: HalfPlane) -> Result<()> {
    let Some((a, b)) = f.density().support() else {
        return Ok(());
    };
    let ok = match side {
        HalfPlane::Upper => a >= -SUPPORT_SLACK,
        HalfPlane::Lower => b <= SUPPORT_SLACK,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::NotHardy { support: (a, b) })
    }
}

/// Hardy norm with the means sampled on a geometric grid.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyReport {
    pub norm: NormReport,
    /// Height attaining the largest sampled mean.
    pub attained_y: f64,
    /// `(y, ∫ |f(x+iy)|^p dx)` for every sampled height, in increasing `|y|`.
    pub means: Vec<(f64, f64)>,
}

/// Number of geometric heights below `y_truncation` sampled for Hardy means.
const HARDY_LEVELS: usize = 12;

/// `sup_{±y>0} (∫ |f(x+iy)|^p dx)^{1/p}`, sampled on `{0} ∪ {Y 2^{-j}}`.
pub fn hardy_halfplane_norm(
    f: &BandLimitedFunction,
    p: f64,
    side: HalfPlane,
    quad: &QuadratureSpec,
) -> Result<HardyReport> {
    quad.validate()?;
    check_p(p)?;
    check_section(f, side)?;
    let mut heights = alloc::vec![0.0];
    for j in (0..=HARDY_LEVELS).rev() {
        heights.push(side.sign() * quad.y_truncation * 0.5f64.powi(j as i32));
    }
    if f.is_zero() {
        return Ok(HardyReport {
            norm: NormReport::zero(),
            attained_y: 0.0,
            means: heights.iter().map(|&y| (y, 0.0)).collect(),
        });
    }
    check_decay(f, p)?;
    let mut means = Vec::with_capacity(heights.len());
    let mut flags = Vec::new();
    let mut best: Option<(f64, LineIntegral)> = None;
    for &y in &heights {
        let li = line_power_integral(f, p, y, quad);
        flags.extend(line_flags(&li));
        means.push((y, li.value));
        if best.is_none_or(|(_, b)| li.value > b.value) {
            best = Some((y, li));
        }
    }
    for w in means.windows(2) {
        let budget = 10.0 * quad.rel_tolerance * w[0].1.abs().max(w[1].1.abs());
        if w[1].1 > w[0].1 + budget {
            flags.push(NormFlag::NonMonotoneMeans);
        }
    }
    let (attained_y, li) = best.expect("at least one height");
    let integral = NormReport::from_parts(li.value, li.err, li.tail, flags);
    Ok(HardyReport {
        norm: integral.root(p),
        attained_y,
        means,
    })
}

// ---------------------------------------------------------------------------
// Half-plane area integrals

/// Large-`y` behaviour of a line integral times the weight `y^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum YDecay {
    /// Decays at least like `e^{-rate y}`.
    Exponential { rate: f64 },
    /// Behaves like `y^{exponent}`.
    Algebraic { exponent: f64 },
}

#[derive(Debug, Clone, Default)]
pub(crate) struct AreaIntegral {
    pub value: f64,
    pub err: f64,
    pub tail: f64,
    pub flags: Vec<NormFlag>,
}

/// Lower end of the geometric y-panels; below it Gauss–Jacobi takes over.
const JACOBI_SPLIT: f64 = 1.0 / 1024.0;
const MAX_Y_PANELS: usize = 60;
const Y_PANEL_BUDGET: usize = 48;

/// `∫_0^∞ L(y) y^α dy` where `line(y)` returns the line integral `L(y)`.
pub(crate) fn integrate_area(
    mut line: impl FnMut(f64) -> LineIntegral,
    alpha: f64,
    decay: YDecay,
    quad: &QuadratureSpec,
) -> Result<AreaIntegral> {
    if !(alpha > -1.0 && alpha.is_finite()) {
        return Err(Error::InvalidWeight { alpha });
    }
    if let YDecay::Algebraic { exponent } = decay {
        if exponent >= -1.0 {
            return Err(Error::Diverges(format!(
                "weighted line integrals decay like y^{exponent:.4}, not integrable at infinity"
            )));
        }
    }
    let tol = quad.rel_tolerance;
    let mut flags = Vec::new();
    // Worst relative error of any line integral; charged against the total.
    let mut line_rel = 0.0f64;
    let mut eval = |y: f64, flags: &mut Vec<NormFlag>, line_rel: &mut f64| -> f64 {
        let li = line(y);
        flags.extend(line_flags(&li));
        if li.value != 0.0 {
            *line_rel = line_rel.max(li.err / li.value.abs());
        }
        li.value
    };

    // Endpoint panel [0, y0]: Gauss–Jacobi at two orders for an error estimate.
    let n = quad.jacobi_node_count;
    let fine = jacobi_left_endpoint(n, alpha, JACOBI_SPLIT)?;
    let coarse = jacobi_left_endpoint(n / 2 + 1, alpha, JACOBI_SPLIT)?;
    let mut jacobi = [0.0, 0.0];
    for (i, rule) in [&fine, &coarse].into_iter().enumerate() {
        for (y, w) in rule.nodes.iter().zip(&rule.weights) {
            jacobi[i] += w * eval(*y, &mut flags, &mut line_rel);
        }
    }
    let mut value = jacobi[0];
    let mut err = (jacobi[0] - jacobi[1]).abs();

    // Geometric panels on [y0, 1]; adaptive bisection refines any that the
    // y^α factor or the lines themselves make hard.
    let mut cuts = Vec::new();
    let mut c = JACOBI_SPLIT;
    while c < 1.0 {
        cuts.push(c);
        c *= 4.0;
    }
    cuts.push(1.0);
    // Each line carries relative noise up to `tol`, charged separately below
    // through `line_rel`; asking the y-rule for less only refines on that noise.
    let mut weighted = |y: f64| eval(y, &mut flags, &mut line_rel) * y.powf(alpha);
    let middle = adaptive(
        &cuts,
        AdaptiveOptions {
            rel_tol: tol,
            abs_tol: 0.0,
            max_panels: cuts.len() + Y_PANEL_BUDGET,
        },
        &mut weighted,
    );
    value += middle.value;
    err += middle.err;
    let mut converged = middle.converged;

    // Doubling panels with a geometric remainder.
    let mut start = 1.0;
    let mut previous_panel: Option<f64> = None;
    let mut previous_remainder: Option<f64> = None;
    let mut remainder = 0.0;
    let mut remainder_change = f64::INFINITY;
    let mut settled = false;
    for l in 0..MAX_Y_PANELS {
        let panel = adaptive(
            &[start, 2.0 * start],
            AdaptiveOptions {
                rel_tol: tol,
                abs_tol: 0.01 * tol * value.abs(),
                max_panels: 1 + Y_PANEL_BUDGET,
            },
            &mut weighted,
        );
        converged &= panel.converged;
        value += panel.value;
        err += panel.err;
        start *= 2.0;
        if let Some(prev) = previous_panel {
            let ratio = if prev > 0.0 { panel.value / prev } else { 0.0 };
            if ratio >= 1.0 && l >= 8 {
                return Err(Error::Diverges(format!(
                    "y-panel sums are not Cauchy: panel ratio {ratio:.4} at y = {start}"
                )));
            }
            let new_remainder = if ratio < 1.0 && ratio > 0.0 {
                panel.value * ratio / (1.0 - ratio)
            } else {
                0.0
            };
            if let Some(prev_rem) = previous_remainder {
                // The previous remainder predicted this panel plus the new one.
                remainder_change = (prev_rem - panel.value - new_remainder).abs();
            }
            previous_remainder = Some(new_remainder);
            remainder = new_remainder;
        }
        previous_panel = Some(panel.value);
        let small = panel.value.abs() <= 0.1 * tol * value.abs();
        let cauchy = remainder_change <= tol * value.abs();
        let done = match decay {
            YDecay::Exponential { .. } => small && start >= quad.y_truncation,
            YDecay::Algebraic { .. } => (cauchy || small) && start >= quad.y_truncation,
        };
        if done || value == 0.0 {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(Error::Diverges(format!(
            "y-panel sums not Cauchy up to y = {start} (remainder change {remainder_change:e})"
        )));
    }
    if !converged {
        flags.push(NormFlag::QuadratureNotConverged);
    }
    let tail = remainder.max(0.0);
    value += tail;
    if remainder_change.is_finite() {
        err += remainder_change;
    }
    err += line_rel * value.abs();
    Ok(AreaIntegral {
        value,
        err,
        tail,
        flags,
    })
}

/// Large-`y` certificate for `|f|^p` on a half-plane where `f` is a section.
fn section_decay(f: &BandLimitedFunction, p: f64, alpha: f64, side: HalfPlane) -> Result<YDecay> {
    let (a, b) = f.density().support().expect("nonzero section");
    let (gap, edge) = match side {
        HalfPlane::Upper => (a, a),
        HalfPlane::Lower => (-b, b),
    };
    if gap > SUPPORT_SLACK {
        return Ok(YDecay::Exponential { rate: p * gap });
    }
    let m = f.vanishing_order_at(edge).unwrap_or(0) as f64;
    // |f(x+iy)| ~ |z|^{-(m+1)} near the edge frequency, so L(y) ~ y^{1-p(m+1)}.
    Ok(YDecay::Algebraic {
        exponent: alpha + 1.0 - p * (m + 1.0),
    })
}

/// `∫_{±y>0} |f(x+iy)|^p |y|^α dx dy` for a section on that half-plane.
pub fn bergman_halfplane_integral(
    f: &BandLimitedFunction,
    p: f64,
    alpha: f64,
    side: HalfPlane,
    quad: &QuadratureSpec,
) -> Result<NormReport> {
    quad.validate()?;
    check_p(p)?;
    if !(alpha > -1.0 && alpha.is_finite()) {
        return Err(Error::InvalidWeight { alpha });
    }
    check_section(f, side)?;
    if f.is_zero() {
        return Ok(NormReport::zero());
    }
    check_decay(f, p)?;
    let decay = section_decay(f, p, alpha, side)?;
    let s = side.sign();
    let area = integrate_area(|y| line_power_integral(f, p, s * y, quad), alpha, decay, quad)?;
    Ok(NormReport::from_parts(area.value, area.err, area.tail, area.flags))
}

/// `(∫_{±y>0} |f(x+iy)|^p |y|^α dx dy)^{1/p}`.
pub fn bergman_halfplane_norm(
    f: &BandLimitedFunction,
    p: f64,
    alpha: f64,
    side: HalfPlane,
    quad: &QuadratureSpec,
) -> Result<NormReport> {
    Ok(bergman_halfplane_integral(f, p, alpha, side, quad)?.root(p))
}

/// `∫_ℂ e^{-qπ|y|} |y|^{q/p-2} |f(x+iy)|^q dx dy`, as the sum of the Bergman
/// integrals of `e^{iπz} f` on the upper and `e^{-iπz} f` on the lower
/// half-plane.
pub fn envelope_integral(f: &BandLimitedFunction, params: EnvelopeParams, quad: &QuadratureSpec) -> Result<NormReport> {
    quad.validate()?;
    check_type(f)?;
    if f.is_zero() {
        return Ok(NormReport::zero());
    }
    let q = params.q();
    check_decay(f, q)?;
    let plus = BandLimitedFunction::new(modulate(f.density(), PI)?);
    let minus = BandLimitedFunction::new(modulate(f.density(), -PI)?);
    let upper = bergman_halfplane_integral(&plus, q, params.alpha(), HalfPlane::Upper, quad)?;
    let lower = bergman_halfplane_integral(&minus, q, params.alpha(), HalfPlane::Lower, quad)?;
    let mut flags = upper.flags.clone();
    flags.extend(lower.flags.iter().copied());
    Ok(NormReport::from_parts(
        upper.value + lower.value,
        upper.quadrature_error_estimate + lower.quadrature_error_estimate,
        upper.tail_contribution + lower.tail_contribution,
        flags,
    ))
}

/// `(∫_ℂ e^{-qπ|y|} |y|^{q/p-2} |f(x+iy)|^q dx dy)^{1/q}`.
pub fn envelope_integral_norm(
    f: &BandLimitedFunction,
    params: EnvelopeParams,
    quad: &QuadratureSpec,
) -> Result<NormReport> {
    Ok(envelope_integral(f, params, quad)?.root(params.q()))
}

// ---------------------------------------------------------------------------
// Disk

/// Dyadic levels used to grade the radial variable toward both ends.
const DISK_LEVELS: i32 = 40;
const DISK_PANEL_NODES: usize = 10;

/// `∫_𝔻 |g(w)|^p (1-|w|²)^α dA(w)`.
pub fn bergman_disk_integral(g: &dyn DiskFunction, p: f64, alpha: f64, quad: &QuadratureSpec) -> Result<NormReport> {
    quad.validate()?;
    check_p(p)?;
    if !(alpha > -1.0 && alpha.is_finite()) {
        return Err(Error::InvalidWeight { alpha });
    }
    let tol = quad.rel_tolerance;
    let mut converged = true;
    // Θ(u) = ∫_0^{2π} |g(√u e^{iθ})|^p dθ, with its error estimate.
    let mut theta = |u: f64| -> (f64, f64) {
        let r = u.sqrt();
        let res = adaptive(
            &uniform_cuts(0.0, 2.0 * PI, 16),
            AdaptiveOptions {
                rel_tol: 0.1 * tol,
                abs_tol: 1e-300,
                max_panels: 1 << 14,
            },
            |t| {
                let (s, c) = t.sin_cos();
                g.eval(C64::new(r * c, r * s)).norm().powf(p)
            },
        );
        converged &= res.converged;
        (res.value, res.err)
    };
    // In u = r² the area element r dr dθ becomes du dθ / 2.
    let gl = crate::quadrature::gauss_legendre(DISK_PANEL_NODES);
    let (mut value, mut err) = (0.0, 0.0);
    let mut add = |nodes: &mut dyn Iterator<Item = (f64, f64)>, theta: &mut dyn FnMut(f64) -> (f64, f64)| {
        for (u, w) in nodes {
            let (v, e) = theta(u);
            value += w * v;
            err += w * e;
        }
    };
    let panel = |lo: f64, hi: f64| {
        let (c, h) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        gl.nodes
            .iter()
            .zip(&gl.weights)
            .map(|(x, w)| {
                let u = c + h * x;
                (u, w * h * (1.0 - u).powf(alpha))
            })
            .collect::<Vec<_>>()
    };
    let edge = 0.5f64.powi(DISK_LEVELS);
    let mut nodes = panel(0.0, edge);
    for l in (1..DISK_LEVELS).rev() {
        nodes.extend(panel(0.5f64.powi(l + 1), 0.5f64.powi(l)));
    }
    for l in 1..DISK_LEVELS {
        nodes.extend(panel(1.0 - 0.5f64.powi(l), 1.0 - 0.5f64.powi(l + 1)));
    }
    // The last panel carries the (1-u)^α endpoint exactly.
    let jac = jacobi_left_endpoint(quad.jacobi_node_count, alpha, edge)?;
    nodes.extend(jac.nodes.iter().zip(&jac.weights).map(|(v, w)| (1.0 - v, *w)));
    add(&mut nodes.into_iter(), &mut theta);
    let value = 0.5 * value;
    let err = 0.5 * err;
    let mut flags = Vec::new();
    if !converged {
        flags.push(NormFlag::QuadratureNotConverged);
    }
    Ok(NormReport::from_parts(value, err, 0.0, flags))
}

/// `(∫_𝔻 |g(w)|^p (1-|w|²)^α dA(w))^{1/p}`.
pub fn bergman_disk_norm(g: &dyn DiskFunction, p: f64, alpha: f64, quad: &QuadratureSpec) -> Result<NormReport> {
    Ok(bergman_disk_integral(g, p, alpha, quad)?.root(p))
}
