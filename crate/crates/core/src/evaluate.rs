//! Evaluation of band-limited functions `f(z) = ∫ s(t) e^{izt} dt`.
//!
//! Two exact representations are combined. For small `|z|` the integral is
//! done by Gauss–Legendre panels resolving `e^{izt}`. For large `|z|`,
//! repeated integration by parts on each polynomial piece gives the finite
//! expansion
//!
//! ```text
//! f(z) = -Σ_b e^{izt_b} Σ_j (-1)^j J_{b,j} / (iz)^{j+1},
//! ```
//!
//! where `J_{b,j}` is the jump of `s^{(j)}` at breakpoint `t_b`. Jumps of order
//! at most the declared smoothness are zero by invariant and are dropped, so
//! the expansion reproduces the algebraic decay of `f` without cancellation.
//! The method is picked per point by comparing rounding-error bounds.

use alloc::borrow::Cow;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by std float methods when std is linked
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::quadrature::{gauss_legendre, Rule};
use crate::spectrum::{SpectralDensity, SLACK, ZERO_SMOOTHNESS};
use crate::C64;

const GL_NODES: usize = 20;
/// Largest `|w| h` (phase across a panel half-width) per Gauss–Legendre panel.
const PANEL_PHASE: f64 = 5.0;
/// Line evaluations amplified by more than this are flagged low-confidence.
pub const AMPLIFICATION_LIMIT: f64 = 1e12;

/// A spectral density plus the cached data needed to evaluate its function.
#[derive(Debug, Clone)]
pub struct BandLimitedFunction {
    density: SpectralDensity,
    type_bound: f64,
    decay_order: u32,
    breaks: Vec<f64>,
    jumps: Vec<Vec<C64>>,
    jump_norms: Vec<Vec<f64>>,
    rule: Rule,
}

impl PartialEq for BandLimitedFunction {
    fn eq(&self, other: &Self) -> bool {
        self.density == other.density
    }
}

impl BandLimitedFunction {
    pub fn new(density: SpectralDensity) -> Self {
        let type_bound = density.support().map(|(a, b)| a.abs().max(b.abs())).unwrap_or(0.0);
        let smoothness = density.smoothness();
        // A C^k piecewise polynomial has a jump in its (k+1)-th derivative,
        // which integrates to decay of order k + 2.
        let decay_order = if smoothness == ZERO_SMOOTHNESS {
            u32::MAX
        } else {
            smoothness.saturating_add(2)
        };
        let max_degree = density.max_degree();
        let mut breaks = Vec::new();
        let mut jumps = Vec::new();
        let mut jump_norms = Vec::new();
        for b in density.breakpoints() {
            let row: Vec<C64> = (0..=max_degree)
                .map(|j| {
                    if (j as u64) <= smoothness as u64 {
                        C64::new(0.0, 0.0)
                    } else {
                        density.jump_at(&b, j)
                    }
                })
                .collect();
            if row.iter().all(|c| c.norm() == 0.0) {
                continue;
            }
            breaks.push(b.t);
            jump_norms.push(row.iter().map(|c| c.norm()).collect());
            jumps.push(row);
        }
        BandLimitedFunction {
            density,
            type_bound,
            decay_order,
            breaks,
            jumps,
            jump_norms,
            rule: gauss_legendre(GL_NODES),
        }
    }

    pub fn zero() -> Self {
        Self::new(SpectralDensity::zero())
    }

    /// Smallest derivative order with a nonzero jump; `f(x+iy)` decays exactly
    /// like `|x|^{-(order+1)}`. `None` for the zero function.
    pub fn leading_order(&self) -> Option<usize> {
        self.jumps
            .iter()
            .filter_map(|row| row.iter().position(|c| c.norm() != 0.0))
            .min()
    }

    pub fn density(&self) -> &SpectralDensity {
        &self.density
    }

    pub fn is_zero(&self) -> bool {
        self.density.is_zero()
    }

    /// `max(|a|, |b|)` over the support `[a, b]`.
    pub fn type_bound(&self) -> f64 {
        self.type_bound
    }

    /// Guaranteed algebraic decay exponent on horizontal lines.
    pub fn decay_order(&self) -> u32 {
        self.decay_order
    }

    /// Breakpoints carrying a nonzero jump, with their jump rows.
    pub fn jump_table(&self) -> impl Iterator<Item = (f64, &[C64])> {
        self.breaks.iter().copied().zip(self.jumps.iter().map(Vec::as_slice))
    }

    /// Order of vanishing of `s` at `t`: the first `j` with a nonzero jump of
    /// `s^{(j)}` there, or `None` if `t` is not a breakpoint.
    pub fn vanishing_order_at(&self, t: f64) -> Option<usize> {
        let i = self
            .breaks
            .iter()
            .position(|&b| (b - t).abs() <= 1e-12 * (1.0 + t.abs()))?;
        self.jumps[i].iter().position(|c| c.norm() != 0.0)
    }

    /// `max_t e^{-yt}` over the support: the factor by which the damped
    /// density can exceed the undamped one on the line `Im z = y`. For a
    /// symmetric support this is `e^{τ|y|}`; it is at most 1 for a section
    /// whose spectrum sits on the decaying side.
    pub fn amplification(&self, y: f64) -> f64 {
        match self.density.support() {
            Some((a, b)) => (-y * a).exp().max((-y * b).exp()),
            None => 1.0,
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::new(self.density.scale(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.density.add(&other.density))
    }

    /// Upper bound for `∫ |s(t)| e^{-yt} dt`, the rounding scale of quadrature.
    fn mass_bound(&self, y: f64) -> f64 {
        self.density
            .pieces()
            .iter()
            .map(|p| {
                let coeff_sum: f64 = p.coeffs.iter().map(|c| c.norm()).sum();
                let damp = (-y * p.lo).exp().max((-y * p.hi).exp());
                coeff_sum * (p.hi - p.lo) * damp
            })
            .sum()
    }

    /// Rounding-scale bound for the jump expansion at `|w| = r`, line `y`.
    fn jump_bound(&self, r: f64, damp: &[f64]) -> f64 {
        let inv = 1.0 / r;
        self.jump_norms
            .iter()
            .zip(damp)
            .map(|(row, d)| {
                let s = row.iter().rev().fold(0.0, |acc, j| acc * inv + j);
                d * s * inv
            })
            .sum()
    }

    /// Smallest `|w|` from which the jump expansion is used on line `y`.
    fn switch_radius(&self, y: f64) -> f64 {
        if self.breaks.is_empty() {
            return f64::INFINITY;
        }
        let damp: Vec<f64> = self.breaks.iter().map(|t| (-y * t).exp()).collect();
        let target = self.mass_bound(y);
        let (mut lo, mut hi) = (1e-6_f64, 1e12_f64);
        if self.jump_bound(hi, &damp) > target {
            return hi;
        }
        for _ in 0..80 {
            let mid = (lo * hi).sqrt();
            if self.jump_bound(mid, &damp) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }

    fn eval_jumps(&self, w: C64) -> C64 {
        // v = 1/(iw); term = Σ_j (-1)^j J_j v^{j+1} = v Σ_j J_j (-v)^j
        let v = C64::new(0.0, -1.0) / w;
        let mv = -v;
        let mut acc = C64::new(0.0, 0.0);
        for (t, row) in self.breaks.iter().zip(&self.jumps) {
            let poly = row.iter().rev().fold(C64::new(0.0, 0.0), |a, j| a * mv + j);
            acc += (C64::new(0.0, 1.0) * w * t).exp() * poly;
        }
        -acc * v
    }

    fn eval_quadrature(&self, w: C64) -> C64 {
        let r = w.norm();
        let mut acc = C64::new(0.0, 0.0);
        for p in self.density.pieces() {
            let len = p.hi - p.lo;
            let panels = ((r * len / (2.0 * PANEL_PHASE)).ceil() as usize).max(1);
            let h = 0.5 * len / panels as f64;
            for k in 0..panels {
                let c = p.lo + (2 * k + 1) as f64 * h;
                for (x, wt) in self.rule.nodes.iter().zip(&self.rule.weights) {
                    let t = c + h * x;
                    acc += p.eval(t) * (C64::new(0.0, 1.0) * w * t).exp() * (wt * h);
                }
            }
        }
        acc
    }
}

/// `f(z)`, for any complex `z`.
pub fn eval_point(f: &BandLimitedFunction, z: C64) -> C64 {
    if f.is_zero() {
        return C64::new(0.0, 0.0);
    }
    let r = z.norm();
    if r > 0.0 && !f.breaks.is_empty() {
        let damp: Vec<f64> = f.breaks.iter().map(|t| (-z.im * t).exp()).collect();
        if f.jump_bound(r, &damp) <= f.mass_bound(z.im) {
            return f.eval_jumps(z);
        }
    }
    f.eval_quadrature(z)
}

/// Exponential type: `max(|a|, |b|)` of the support.
pub fn exp_type(f: &BandLimitedFunction) -> f64 {
    f.type_bound()
}

/// Fast repeated evaluation along the horizontal line `Im z = y`.
///
/// The support is split into clusters of touching pieces, and `f` is the sum
/// of the cluster functions. Each cluster gets its own switch radius, so a
/// narrow cluster (whose jump expansion needs a large `|w|`) does not force
/// quadrature on a wide one. Within a cluster the damping `e^{-yt}` is folded
/// into precomputed quadrature weights once, and points beyond the switch
/// radius use the jump expansion.
#[derive(Debug, Clone)]
pub struct LineEvaluator<'a> {
    y: f64,
    parts: Vec<LinePart<'a>>,
}

#[derive(Debug, Clone)]
struct LinePart<'a> {
    f: Cow<'a, BandLimitedFunction>,
    switch_radius: f64,
    nodes: Vec<f64>,
    weights: Vec<C64>,
}

impl<'a> LinePart<'a> {
    fn new(f: Cow<'a, BandLimitedFunction>, y: f64) -> Self {
        let switch_radius = f.switch_radius(y);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        // Quadrature must resolve every |w| below the switch radius.
        if switch_radius.is_finite() {
            for p in f.density.pieces() {
                let len = p.hi - p.lo;
                let panels = ((switch_radius * len / (2.0 * PANEL_PHASE)).ceil() as usize).max(1);
                let h = 0.5 * len / panels as f64;
                for k in 0..panels {
                    let c = p.lo + (2 * k + 1) as f64 * h;
                    for (x, wt) in f.rule.nodes.iter().zip(&f.rule.weights) {
                        let t = c + h * x;
                        nodes.push(t);
                        weights.push(p.eval(t) * ((-y * t).exp() * wt * h));
                    }
                }
            }
        }
        LinePart {
            f,
            switch_radius,
            nodes,
            weights,
        }
    }

    fn eval(&self, x: f64, y: f64) -> C64 {
        let w = C64::new(x, y);
        if w.norm() >= self.switch_radius {
            return self.f.eval_jumps(w);
        }
        if self.nodes.is_empty() {
            return self.f.eval_quadrature(w);
        }
        let mut acc = C64::new(0.0, 0.0);
        for (t, wt) in self.nodes.iter().zip(&self.weights) {
            let (s, c) = (x * t).sin_cos();
            acc += wt * C64::new(c, s);
        }
        acc
    }
}

/// Maximal runs of pieces with no gap between neighbours. The density
/// vanishes to its smoothness order at both ends of a gap, so every run keeps
/// the smoothness invariant.
fn clusters(f: &BandLimitedFunction) -> Vec<BandLimitedFunction> {
    let pieces = f.density.pieces();
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=pieces.len() {
        // Same merge rule as the breakpoint table.
        if i == pieces.len() || pieces[i].lo - pieces[i - 1].hi > SLACK * (1.0 + pieces[i].lo.abs()) {
            let run = pieces[start..i].to_vec();
            let density = SpectralDensity::from_pieces_unchecked(run, f.density.smoothness());
            out.push(BandLimitedFunction::new(density));
            start = i;
        }
    }
    out
}

impl<'a> LineEvaluator<'a> {
    pub fn new(f: &'a BandLimitedFunction, y: f64) -> Self {
        let parts = if f.is_zero() {
            Vec::new()
        } else {
            let runs = clusters(f);
            if runs.len() == 1 {
                alloc::vec![LinePart::new(Cow::Borrowed(f), y)]
            } else {
                runs.into_iter().map(|g| LinePart::new(Cow::Owned(g), y)).collect()
            }
        };
        LineEvaluator { y, parts }
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// `|w|` beyond which every cluster uses the jump expansion.
    pub fn switch_radius(&self) -> f64 {
        self.parts.iter().map(|p| p.switch_radius).fold(0.0, f64::max)
    }

    /// `f(x + iy)`.
    pub fn eval(&self, x: f64) -> C64 {
        self.parts.iter().map(|p| p.eval(x, self.y)).sum()
    }
}

/// Uniform grid on a horizontal line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalGrid {
    pub center: f64,
    pub spacing: f64,
    pub count: usize,
    pub y: f64,
}

impl EvalGrid {
    pub fn new(center: f64, spacing: f64, count: usize, y: f64) -> Result<Self> {
        let grid = EvalGrid {
            center,
            spacing,
            count,
            y,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(invalid("grid needs at least two nodes"));
        }
        if !(self.spacing > 0.0 && self.spacing.is_finite()) {
            return Err(invalid("grid spacing must be positive"));
        }
        if !(self.center.is_finite() && self.y.is_finite()) {
            return Err(invalid("grid center and height must be finite"));
        }
        Ok(())
    }

    /// Node `j`; nodes are symmetric about the center.
    pub fn node(&self, j: usize) -> f64 {
        self.center + (j as f64 - 0.5 * (self.count - 1) as f64) * self.spacing
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|j| self.node(j))
    }
}

/// How many grid steps a phase recurrence may run before it is reseeded.
const RESEED: usize = 128;

/// `{f(x_j + iy)}` on a uniform grid. Phases `e^{i x_j t}` advance by
/// multiplication with `e^{i h t}` along the grid.
pub fn eval_line(f: &BandLimitedFunction, grid: &EvalGrid) -> Result<Vec<C64>> {
    grid.validate()?;
    if f.is_zero() {
        return Ok(alloc::vec![C64::new(0.0, 0.0); grid.count]);
    }
    let line = LineEvaluator::new(f, grid.y);
    let mut out = alloc::vec![C64::new(0.0, 0.0); grid.count];
    for part in &line.parts {
        accumulate_line(part, grid, &mut out);
    }
    Ok(out)
}

fn accumulate_line(part: &LinePart<'_>, grid: &EvalGrid, out: &mut [C64]) {
    let f: &BandLimitedFunction = &part.f;
    let h = grid.spacing;
    let y = grid.y;
    let jump_step: Vec<C64> = f.breaks.iter().map(|t| cis(h * t)).collect();
    let jump_damp: Vec<f64> = f.breaks.iter().map(|t| (-y * t).exp()).collect();
    let node_step: Vec<C64> = part.nodes.iter().map(|t| cis(h * t)).collect();
    let mut jump_phase: Vec<C64> = Vec::new();
    let mut node_phase: Vec<C64> = Vec::new();
    for (j, slot) in out.iter_mut().enumerate() {
        let x = grid.node(j);
        if j % RESEED == 0 {
            jump_phase = f.breaks.iter().map(|t| cis(x * t)).collect();
            node_phase = part.nodes.iter().map(|t| cis(x * t)).collect();
        } else {
            for (p, s) in jump_phase.iter_mut().zip(&jump_step) {
                *p *= s;
            }
            for (p, s) in node_phase.iter_mut().zip(&node_step) {
                *p *= s;
            }
        }
        let w = C64::new(x, y);
        *slot += if w.norm() >= part.switch_radius {
            let v = C64::new(0.0, -1.0) / w;
            let mv = -v;
            let mut acc = C64::new(0.0, 0.0);
            for ((row, ph), d) in f.jumps.iter().zip(&jump_phase).zip(&jump_damp) {
                let poly = row.iter().rev().fold(C64::new(0.0, 0.0), |a, jv| a * mv + jv);
                acc += ph * d * poly;
            }
            -acc * v
        } else if part.nodes.is_empty() {
            f.eval_quadrature(w)
        } else {
            part.weights.iter().zip(&node_phase).map(|(wt, ph)| wt * ph).sum()
        };
    }
}

#[inline]
fn cis(theta: f64) -> C64 {
    let (s, c) = theta.sin_cos();
    C64::new(c, s)
}

/// Samples `|f(x)| |x|^{decay_order}` at the given abscissae (decay certificate).
pub fn decay_constants(f: &BandLimitedFunction, xs: &[f64]) -> Vec<f64> {
    let d = f.decay_order().min(64) as i32;
    xs.iter()
        .map(|&x| eval_point(f, C64::new(x, 0.0)).norm() * x.abs().powi(d))
        .collect()
}

/// Period in `x` of the phase pattern `Σ_b c_b e^{ixt_b}` over all
/// breakpoints, if they sit on a lattice `t_0 + Δℤ` with small integer
/// offsets. The period is then `2π/Δ`.
pub fn breakpoint_period(f: &BandLimitedFunction) -> Option<f64> {
    lattice_period(&f.breaks)
}

/// Period of the leading large-`|x|` term of `f(x+iy)`, which involves only
/// the breakpoints whose jump has the leading order. `None` when those
/// breakpoints are incommensurate; a single breakpoint gives no oscillation
/// and reports `Some(∞)`.
pub fn leading_period(f: &BandLimitedFunction) -> Option<f64> {
    let j = f.leading_order()?;
    let ts: Vec<f64> = f
        .jump_table()
        .filter(|(_, row)| row[j].norm() != 0.0)
        .map(|(t, _)| t)
        .collect();
    if ts.len() == 1 {
        return Some(f64::INFINITY);
    }
    lattice_period(&ts)
}

fn lattice_period(ts: &[f64]) -> Option<f64> {
    let t0 = *ts.first()?;
    let diffs: Vec<f64> = ts.iter().skip(1).map(|t| t - t0).collect();
    let smallest = diffs
        .iter()
        .copied()
        .filter(|d| *d > 1e-12)
        .fold(f64::INFINITY, f64::min);
    if !smallest.is_finite() {
        return None;
    }
    for n in 1..=12 {
        let delta = smallest / n as f64;
        let ok = diffs.iter().all(|d| {
            let q = d / delta;
            q <= 4096.0 && (q - q.round()).abs() <= 1e-9 * q.max(1.0)
        });
        if ok {
            return Some(2.0 * PI / delta);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{make_bump, make_fejer, modulate};
    use approx::assert_relative_eq;

    fn fejer() -> BandLimitedFunction {
        BandLimitedFunction::new(make_fejer(PI / 2.0).unwrap())
    }

    fn fejer_closed(z: C64) -> C64 {
        let a = PI / 2.0;
        if z.norm() == 0.0 {
            return C64::new(1.0, 0.0);
        }
        let q = (z * a).sin() / (z * a);
        q * q
    }

    #[test]
    fn fejer_matches_closed_form_everywhere() {
        let f = fejer();
        for &(x, y) in &[
            (0.0, 0.0),
            (0.3, 0.0),
            (2.0, 0.0),
            (7.5, -1.0),
            (40.0, 2.0),
            (1e4, 0.5),
            (0.01, 3.0),
        ] {
            let z = C64::new(x, y);
            let got = eval_point(&f, z);
            let want = fejer_closed(z);
            assert!(
                (got - want).norm() <= 1e-13 * (1.0 + want.norm()),
                "z = {z}: {got} vs {want}"
            );
        }
        assert!(eval_point(&f, C64::new(2.0, 0.0)).norm() < 1e-12);
        assert_relative_eq!(eval_point(&f, C64::new(0.0, 0.0)).re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn real_even_density_is_real_on_axis() {
        let f = BandLimitedFunction::new(make_bump(-2.0, 2.0, 3).unwrap());
        for &x in &[0.1, 1.7, 25.0, 400.0] {
            assert!(eval_point(&f, C64::new(x, 0.0)).im.abs() < 1e-14);
        }
    }

    #[test]
    fn exp_type_is_support_bound() {
        assert_eq!(exp_type(&fejer()), PI);
        let b = BandLimitedFunction::new(make_bump(-PI, -PI + 0.25, 3).unwrap());
        assert_eq!(exp_type(&b), PI);
        let m = BandLimitedFunction::new(modulate(&make_fejer(PI / 2.0).unwrap(), PI).unwrap());
        assert_eq!(exp_type(&m), 2.0 * PI);
    }

    #[test]
    fn decay_order_gains_one_over_smoothness() {
        assert_eq!(fejer().decay_order(), 2);
        let b = BandLimitedFunction::new(make_bump(-1.0, 1.0, 5).unwrap());
        assert_eq!(b.decay_order(), 7);
        assert_eq!(b.vanishing_order_at(-1.0), Some(6));
    }

    #[test]
    fn line_matches_pointwise() {
        let f = BandLimitedFunction::new(make_bump(-PI, -PI + 0.125, 5).unwrap());
        let grid = EvalGrid::new(0.0, 0.37, 4001, 0.75).unwrap();
        let line = eval_line(&f, &grid).unwrap();
        let scale = f.density().weighted_l1_mass(0.75);
        for (j, v) in line.iter().enumerate() {
            let p = eval_point(&f, C64::new(grid.node(j), 0.75));
            assert!((v - p).norm() <= 1e-10 * scale, "node {j}");
        }
    }

    #[test]
    fn grid_validation() {
        assert!(EvalGrid::new(0.0, 0.1, 1, 0.0).is_err());
        assert!(EvalGrid::new(0.0, 0.0, 4, 0.0).is_err());
    }

    #[test]
    fn fejer_period_is_two() {
        assert_relative_eq!(breakpoint_period(&fejer()).unwrap(), 2.0, epsilon = 1e-12);
        let b = BandLimitedFunction::new(make_bump(-PI, -PI + 0.5, 3).unwrap());
        assert_relative_eq!(breakpoint_period(&b).unwrap(), 12.0 * PI, max_relative = 1e-9);
    }
}
