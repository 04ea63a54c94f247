//! Compactly supported spectral densities and the spectral partition of unity.
//!
//! A [`SpectralDensity`] is a list of polynomial pieces on disjoint intervals
//! inside `[-2π, 2π]`. The represented entire function is
//! `f(z) = ∫ s(t) e^{izt} dt`; see [`crate::evaluate`].

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by std float methods when std is linked
use num_traits::Float;

use crate::error::{invalid, Result};
use crate::poly;
use crate::quadrature::gauss_legendre;
use crate::C64;

/// Densities must live inside `[-SPECTRUM_LIMIT, SPECTRUM_LIMIT]`.
pub const SPECTRUM_LIMIT: f64 = 2.0 * PI;

/// Smoothness recorded for the zero density.
pub const ZERO_SMOOTHNESS: u32 = u32::MAX;

pub(crate) const SLACK: f64 = 1e-12;

/// A polynomial piece on `[lo, hi]`, in the local variable
/// `x = (t - c) / h` with `c` the midpoint and `h` the half-width.
#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub coeffs: Vec<C64>,
}

impl Piece {
    pub fn new(lo: f64, hi: f64, coeffs: Vec<C64>) -> Self {
        Piece { lo, hi, coeffs }
    }

    pub fn from_real(lo: f64, hi: f64, coeffs: &[f64]) -> Self {
        Piece {
            lo,
            hi,
            coeffs: coeffs.iter().map(|&c| C64::new(c, 0.0)).collect(),
        }
    }

    #[inline]
    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    #[inline]
    pub fn half_width(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    #[inline]
    pub fn local(&self, t: f64) -> f64 {
        (t - self.center()) / self.half_width()
    }

    #[inline]
    pub fn eval(&self, t: f64) -> C64 {
        poly::horner(&self.coeffs, self.local(t))
    }

    /// `j`-th derivative in `t` at the left (`side = -1`) or right (`+1`) end.
    pub fn derivative_at_end(&self, j: usize, side: f64) -> C64 {
        poly::derivative_at(&self.coeffs, j, side) / self.half_width().powi(j as i32)
    }

    /// Coefficients of this piece re-expanded on `[lo, hi] ⊆ [self.lo, self.hi]`.
    fn reexpand(&self, lo: f64, hi: f64) -> Vec<C64> {
        if lo == self.lo && hi == self.hi {
            return self.coeffs.clone();
        }
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        poly::substitute(
            &self.coeffs,
            (c - self.center()) / self.half_width(),
            h / self.half_width(),
        )
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }
}

/// A breakpoint of a density: a point where the piecewise description changes,
/// with the pieces on either side (if any).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakpoint {
    pub t: f64,
    pub left: Option<usize>,
    pub right: Option<usize>,
}

/// Compactly supported piecewise-polynomial spectral density.
///
/// Invariants: pieces are sorted, disjoint and inside `[-2π, 2π]`; the density
/// is `C^smoothness` on ℝ (so its first `smoothness` derivatives vanish at the
/// support ends); it is exactly zero off its pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity {
    pieces: Vec<Piece>,
    smoothness: u32,
}

impl SpectralDensity {
    pub fn zero() -> Self {
        SpectralDensity {
            pieces: Vec::new(),
            smoothness: ZERO_SMOOTHNESS,
        }
    }

    /// Builds a density from explicit pieces, checking every invariant.
    pub fn from_pieces(pieces: Vec<Piece>, smoothness: u32) -> Result<Self> {
        let pieces: Vec<Piece> = pieces
            .into_iter()
            .map(|p| Piece {
                coeffs: poly::trim(p.coeffs),
                ..p
            })
            .collect();
        for p in &pieces {
            if !(p.lo.is_finite() && p.hi.is_finite() && p.lo < p.hi) {
                return Err(invalid("piece interval must satisfy lo < hi"));
            }
            if p.coeffs.is_empty() {
                return Err(invalid("piece has no coefficients"));
            }
            if p.coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                return Err(invalid("piece coefficients must be finite"));
            }
            if p.lo < -SPECTRUM_LIMIT - SLACK || p.hi > SPECTRUM_LIMIT + SLACK {
                return Err(invalid("support must lie inside [-2π, 2π]"));
            }
        }
        for w in pieces.windows(2) {
            if w[0].hi > w[1].lo + SLACK * (1.0 + w[1].lo.abs()) {
                return Err(invalid("pieces must be sorted and non-overlapping"));
            }
        }
        if pieces.is_empty() {
            return Ok(Self::zero());
        }
        let density = SpectralDensity { pieces, smoothness };
        density.check_smoothness()?;
        Ok(density)
    }

    pub(crate) fn from_pieces_unchecked(pieces: Vec<Piece>, smoothness: u32) -> Self {
        let mut pieces = pieces;
        while pieces.first().is_some_and(Piece::is_zero) {
            pieces.remove(0);
        }
        while pieces.last().is_some_and(Piece::is_zero) {
            pieces.pop();
        }
        if pieces.is_empty() {
            return Self::zero();
        }
        SpectralDensity { pieces, smoothness }
    }

    fn check_smoothness(&self) -> Result<()> {
        if self.smoothness == ZERO_SMOOTHNESS {
            return Err(invalid("a nonzero density needs a finite smoothness order"));
        }
        let max_degree = self.pieces.iter().map(Piece::degree).max().unwrap_or(0);
        let k = (self.smoothness as usize).min(max_degree + 1);
        for j in 0..=k {
            // Sum of the magnitudes of the terms that make up s^{(j)} at a piece
            // end: the scale of the rounding in a computed jump.
            let scale = self
                .pieces
                .iter()
                .map(|p| {
                    let terms: f64 = p
                        .coeffs
                        .iter()
                        .enumerate()
                        .skip(j)
                        .map(|(i, c)| c.norm() * ((i - j + 1)..=i).map(|m| m as f64).product::<f64>())
                        .sum();
                    terms / p.half_width().powi(j as i32)
                })
                .fold(0.0, f64::max);
            let tol = 1e-8 * scale.max(f64::MIN_POSITIVE);
            for b in self.breakpoints() {
                let jump = self.jump_at(&b, j);
                if jump.norm() > tol {
                    return Err(invalid(alloc::format!(
                        "derivative of order {j} jumps by {:e} at t = {}, contradicting smoothness {}",
                        jump.norm(),
                        b.t,
                        self.smoothness
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn smoothness(&self) -> u32 {
        self.smoothness
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Closed support interval `[a, b]`, or `None` for the zero density.
    pub fn support(&self) -> Option<(f64, f64)> {
        Some((self.pieces.first()?.lo, self.pieces.last()?.hi))
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.iter().map(Piece::degree).max().unwrap_or(0)
    }

    pub fn is_real(&self) -> bool {
        self.pieces.iter().all(|p| p.coeffs.iter().all(|c| c.im == 0.0))
    }

    /// Evaluates the profile; exactly zero off the pieces.
    pub fn eval(&self, t: f64) -> C64 {
        match self.piece_index(t) {
            Some(i) => self.pieces[i].eval(t),
            None => C64::new(0.0, 0.0),
        }
    }

    fn piece_index(&self, t: f64) -> Option<usize> {
        let i = self.pieces.partition_point(|p| p.hi < t);
        let p = self.pieces.get(i)?;
        (p.lo <= t && t <= p.hi).then_some(i)
    }

    /// Distinct breakpoints in increasing order. Adjacent piece ends closer
    /// than a rounding slack are merged.
    pub fn breakpoints(&self) -> Vec<Breakpoint> {
        let mut out: Vec<Breakpoint> = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            match out.last_mut() {
                Some(last) if (last.t - p.lo).abs() <= SLACK * (1.0 + p.lo.abs()) => {
                    last.right = Some(i);
                }
                _ => out.push(Breakpoint {
                    t: p.lo,
                    left: None,
                    right: Some(i),
                }),
            }
            out.push(Breakpoint {
                t: p.hi,
                left: Some(i),
                right: None,
            });
        }
        out
    }

    /// Jump `s^{(j)}(t+) - s^{(j)}(t-)` at a breakpoint.
    pub fn jump_at(&self, b: &Breakpoint, j: usize) -> C64 {
        let right = b
            .right
            .map(|i| self.pieces[i].derivative_at_end(j, -1.0))
            .unwrap_or_default();
        let left = b
            .left
            .map(|i| self.pieces[i].derivative_at_end(j, 1.0))
            .unwrap_or_default();
        right - left
    }

    /// `∫ s(t) dt`, exact.
    pub fn integral(&self) -> C64 {
        self.pieces
            .iter()
            .map(|p| {
                let s: C64 = p
                    .coeffs
                    .iter()
                    .enumerate()
                    .filter(|(n, _)| n % 2 == 0)
                    .map(|(n, a)| a * (2.0 / (n as f64 + 1.0)))
                    .sum();
                s * p.half_width()
            })
            .sum()
    }

    /// `∫ |s(t)| dt` by composite Gauss–Legendre.
    pub fn l1_mass(&self) -> f64 {
        self.weighted_l1_mass(0.0)
    }

    /// `∫ |s(t)| e^{-y t} dt`; the integrand of `f(x + iy)` is `s(t) e^{-yt} e^{ixt}`.
    pub fn weighted_l1_mass(&self, y: f64) -> f64 {
        let rule = gauss_legendre(24);
        let mut acc = 0.0;
        for p in &self.pieces {
            let panels = 4 + ((p.hi - p.lo) * y.abs() / 4.0).ceil() as usize;
            for k in 0..panels {
                let a = p.lo + (p.hi - p.lo) * k as f64 / panels as f64;
                let b = p.lo + (p.hi - p.lo) * (k + 1) as f64 / panels as f64;
                acc += rule.integrate(a, b, |t| p.eval(t).norm() * (-y * t).exp());
            }
        }
        acc
    }

    /// Multiplies the profile by a complex constant.
    pub fn scale(&self, c: C64) -> Self {
        if c == C64::new(0.0, 0.0) {
            return Self::zero();
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| Piece {
                lo: p.lo,
                hi: p.hi,
                coeffs: p.coeffs.iter().map(|a| a * c).collect(),
            })
            .collect();
        SpectralDensity {
            pieces,
            smoothness: self.smoothness,
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// Pointwise sum.
    pub fn add(&self, other: &Self) -> Self {
        combine(self, other, Combine::Add)
    }

    /// Restricts to `[lo, hi]`, assuming the density already vanishes off it;
    /// pieces poking past the bounds by rounding are clamped.
    pub(crate) fn clamp_support(&self, lo: f64, hi: f64) -> Self {
        let pieces = self
            .pieces
            .iter()
            .filter(|p| p.hi > lo && p.lo < hi)
            .map(|p| {
                let (a, b) = (p.lo.max(lo), p.hi.min(hi));
                Piece {
                    lo: a,
                    hi: b,
                    coeffs: p.reexpand(a, b),
                }
            })
            .collect();
        Self::from_pieces_unchecked(pieces, self.smoothness)
    }

    /// Largest `|s(t)|`, sampled like [`Self::max_outside`].
    pub(crate) fn max_abs_sampled(&self) -> f64 {
        // Everything lies to the right of an empty interval at -∞.
        self.max_outside(f64::NEG_INFINITY, f64::NEG_INFINITY)
    }

    /// Largest `|s(t)|` over pieces lying (partly) outside `[lo, hi]`,
    /// sampled on a fine grid.
    pub(crate) fn max_outside(&self, lo: f64, hi: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for p in &self.pieces {
            for (a, b) in [(p.lo, p.hi.min(lo)), (p.lo.max(hi), p.hi)] {
                if b > a {
                    for k in 0..=32 {
                        let t = a + (b - a) * k as f64 / 32.0;
                        worst = worst.max(p.eval(t).norm());
                    }
                }
            }
        }
        worst
    }
}

enum Combine {
    Add,
    Mul,
}

fn combine(a: &SpectralDensity, b: &SpectralDensity, op: Combine) -> SpectralDensity {
    match op {
        Combine::Add if a.is_zero() => return b.clone(),
        Combine::Add if b.is_zero() => return a.clone(),
        Combine::Mul if a.is_zero() || b.is_zero() => return SpectralDensity::zero(),
        _ => {}
    }
    let mut cuts: Vec<f64> = a.pieces.iter().chain(&b.pieces).flat_map(|p| [p.lo, p.hi]).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|x, y| (*x - *y).abs() <= SLACK * (1.0 + y.abs()));
    let mut pieces = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let pa = a.piece_index(mid).map(|i| &a.pieces[i]);
        let pb = b.piece_index(mid).map(|i| &b.pieces[i]);
        let local = |p: &Piece| p.reexpand(lo.max(p.lo), hi.min(p.hi));
        let coeffs = match (&op, pa, pb) {
            (Combine::Mul, Some(pa), Some(pb)) => poly::mul(&local(pa), &local(pb)),
            (Combine::Add, Some(pa), Some(pb)) => poly::add(&local(pa), &local(pb)),
            (Combine::Add, Some(p), None) | (Combine::Add, None, Some(p)) => local(p),
            _ => continue,
        };
        pieces.push(Piece::new(lo, hi, poly::trim(coeffs)));
    }
    SpectralDensity::from_pieces_unchecked(pieces, a.smoothness.min(b.smoothness))
}

/// The smoothstep transition `S_k` of degree `2k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothstepProfile {
    order: u32,
    coeffs: Vec<f64>,
}

impl SmoothstepProfile {
    pub fn new(order: u32) -> Self {
        SmoothstepProfile {
            order,
            coeffs: poly::smoothstep_coeffs(order),
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Monomial coefficients in `u ∈ [0, 1]`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, u: f64) -> f64 {
        if u <= 0.0 {
            0.0
        } else if u >= 1.0 {
            1.0
        } else {
            poly::horner_real(&self.coeffs, u)
        }
    }

    /// Local-variable coefficients of `S_k((t - lo)/(hi - lo))` on a piece.
    fn rising_local(&self) -> Vec<f64> {
        poly::substitute_real(&self.coeffs, 0.5, 0.5)
    }

    /// Local-variable coefficients of `S_k((hi - t)/(hi - lo))` on a piece.
    fn falling_local(&self) -> Vec<f64> {
        poly::substitute_real(&self.coeffs, 0.5, -0.5)
    }
}

/// `S_k(t)`, clamped to 0 for `t ≤ 0` and 1 for `t ≥ 1`.
pub fn smoothstep(k: u32, t: f64) -> f64 {
    SmoothstepProfile::new(k).eval(t)
}

fn check_interval(a: f64, b: f64) -> Result<()> {
    if !(a.is_finite() && b.is_finite() && a < b) {
        return Err(invalid("interval must satisfy a < b"));
    }
    if a < -SPECTRUM_LIMIT - SLACK || b > SPECTRUM_LIMIT + SLACK {
        return Err(invalid("interval must lie inside [-2π, 2π]"));
    }
    Ok(())
}

/// Nonnegative `C^k` bump on `[a, b]`: smoothstep ramps over the outer thirds,
/// equal to 1 on the middle third.
pub fn make_bump(a: f64, b: f64, k: u32) -> Result<SpectralDensity> {
    check_interval(a, b)?;
    let s = SmoothstepProfile::new(k);
    let w = (b - a) / 3.0;
    let (m1, m2) = (a + w, b - w);
    let pieces = vec![
        Piece::from_real(a, m1, &s.rising_local()),
        Piece::from_real(m1, m2, &[1.0]),
        Piece::from_real(m2, b, &s.falling_local()),
    ];
    Ok(SpectralDensity::from_pieces_unchecked(pieces, k))
}

/// Triangle density on `[-2a, 2a]` of height `1/(2a)`, whose function is
/// `f(x) = (sin(ax)/(ax))²`.
pub fn make_fejer(a: f64) -> Result<SpectralDensity> {
    if !(a > 0.0 && a <= PI / 2.0) {
        return Err(invalid("Fejér parameter must satisfy 0 < a ≤ π/2"));
    }
    let height = 1.0 / (2.0 * a);
    let pieces = vec![
        Piece::from_real(-2.0 * a, 0.0, &[0.5 * height, 0.5 * height]),
        Piece::from_real(0.0, 2.0 * a, &[0.5 * height, -0.5 * height]),
    ];
    Ok(SpectralDensity::from_pieces_unchecked(pieces, 0))
}

/// Spectral partition of unity: `φ̂ + ψ̂ = 1` on `[-π, π]`,
/// `supp φ̂ ⊆ [-2π, π]`, `supp ψ̂ ⊆ [-π, 2π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionOfUnity {
    pub phi_hat: SpectralDensity,
    pub psi_hat: SpectralDensity,
    pub overlap_smoothness: u32,
}

/// Margin between `-2π` and the left end of the `φ̂` plateau.
pub const PARTITION_MARGIN: f64 = PI / 2.0;

/// Builds the partition: `φ̂ ≡ 1` on `[-2π + δ, 0]` and falls to 0 across
/// `[0, π]`; `ψ̂ = 1 - φ̂` on `[0, π]`, `≡ 1` on `[π, 2π - δ]`, then falls to 0.
pub fn make_partition(k: u32) -> Result<PartitionOfUnity> {
    if k < 1 {
        return Err(invalid("partition smoothness must be at least 1"));
    }
    let s = SmoothstepProfile::new(k);
    let delta = PARTITION_MARGIN;
    let falling = s.falling_local();
    // 1 - falling, coefficient by coefficient
    let mut rising: Vec<f64> = falling.iter().map(|c| -c).collect();
    rising[0] += 1.0;
    let phi = vec![
        Piece::from_real(-2.0 * PI, -2.0 * PI + delta, &s.rising_local()),
        Piece::from_real(-2.0 * PI + delta, 0.0, &[1.0]),
        Piece::from_real(0.0, PI, &falling),
    ];
    let psi = vec![
        Piece::from_real(0.0, PI, &rising),
        Piece::from_real(PI, 2.0 * PI - delta, &[1.0]),
        Piece::from_real(2.0 * PI - delta, 2.0 * PI, &falling),
    ];
    Ok(PartitionOfUnity {
        phi_hat: SpectralDensity::from_pieces_unchecked(phi, k),
        psi_hat: SpectralDensity::from_pieces_unchecked(psi, k),
        overlap_smoothness: k,
    })
}

/// Translates the spectrum by `a`, so the function becomes `e^{iaz} f(z)`.
pub fn modulate(s: &SpectralDensity, a: f64) -> Result<SpectralDensity> {
    if !a.is_finite() {
        return Err(invalid("modulation must be finite"));
    }
    if let Some((lo, hi)) = s.support() {
        if lo + a < -SPECTRUM_LIMIT - SLACK || hi + a > SPECTRUM_LIMIT + SLACK {
            return Err(invalid("modulated support leaves [-2π, 2π]"));
        }
    }
    let pieces = s
        .pieces
        .iter()
        .map(|p| Piece {
            lo: p.lo + a,
            hi: p.hi + a,
            coeffs: p.coeffs.clone(),
        })
        .collect();
    Ok(SpectralDensity {
        pieces,
        smoothness: s.smoothness,
    })
}

/// Pointwise product; supported on the intersection of the supports.
pub fn multiply_pointwise(s: &SpectralDensity, m: &SpectralDensity) -> SpectralDensity {
    combine(s, m, Combine::Mul)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn smoothstep_values() {
        assert_eq!(smoothstep(1, 0.5), 0.5);
        assert_eq!(smoothstep(3, 0.0), 0.0);
        assert_eq!(smoothstep(3, -1.0), 0.0);
        assert_eq!(smoothstep(3, 2.0), 1.0);
        assert_relative_eq!(smoothstep(2, 0.25), 1.0 - smoothstep(2, 0.75), epsilon = 1e-15);
    }

    #[test]
    fn bump_values_and_support() {
        let s = make_bump(-PI, -PI + 1.0, 3).unwrap();
        assert_relative_eq!(s.eval(-PI + 0.5).re, 1.0, epsilon = 1e-14);
        assert_eq!(s.eval(-PI - 0.1), C64::new(0.0, 0.0));
        let m = s.integral().re;
        assert!(m > 1.0 / 3.0 && m < 1.0);
        assert_relative_eq!(m, 2.0 / 3.0, epsilon = 1e-14);
        assert_eq!(s.smoothness(), 3);
    }

    #[test]
    fn bump_rejects_bad_interval() {
        assert!(make_bump(1.0, 1.0, 2).is_err());
        assert!(make_bump(-7.0, 0.0, 2).is_err());
        assert!(make_bump(f64::NAN, 0.0, 2).is_err());
    }

    #[test]
    fn fejer_shape() {
        let s = make_fejer(PI / 2.0).unwrap();
        assert_eq!(s.support(), Some((-PI, PI)));
        assert_relative_eq!(s.integral().re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(s.eval(0.0).re, 1.0 / PI, epsilon = 1e-15);
        assert!(make_fejer(2.0).is_err());
        assert!(make_fejer(0.0).is_err());
    }

    #[test]
    fn partition_sums_to_one() {
        let pu = make_partition(3).unwrap();
        for i in 0..=10_000 {
            let t = -PI + 2.0 * PI * i as f64 / 10_000.0;
            let sum = pu.phi_hat.eval(t) + pu.psi_hat.eval(t);
            assert!((sum.re - 1.0).abs() < 1e-14 && sum.im == 0.0, "t = {t}");
        }
        assert_relative_eq!(pu.phi_hat.eval(0.0).re + pu.psi_hat.eval(0.0).re, 1.0);
        assert_eq!(pu.phi_hat.eval(1.5 * PI).re, 0.0);
        assert_eq!(pu.psi_hat.eval(-1.5 * PI).re, 0.0);
        assert!(make_partition(0).is_err());
        // both halves satisfy the smoothness invariant
        SpectralDensity::from_pieces(pu.phi_hat.pieces().to_vec(), 3).unwrap();
        SpectralDensity::from_pieces(pu.psi_hat.pieces().to_vec(), 3).unwrap();
    }

    #[test]
    fn modulation_translates_support() {
        let s = make_fejer(PI / 2.0).unwrap();
        let m = modulate(&s, PI).unwrap();
        assert_eq!(m.support(), Some((0.0, 2.0 * PI)));
        assert!(modulate(&m, PI).is_err());
        let back = modulate(&m, -PI).unwrap();
        for i in 0..=100 {
            let t = -PI + 2.0 * PI * i as f64 / 100.0;
            assert!((back.eval(t) - s.eval(t)).norm() < 1e-14);
        }
    }

    #[test]
    fn products() {
        let tri = make_fejer(PI / 2.0).unwrap();
        let pu = make_partition(2).unwrap();
        // φ̂ ≡ 1 on [-3π/2, 0] but ramps on [0, π]: multiply by a plateau-covered density
        let left = make_bump(-PI, -0.5, 2).unwrap();
        let prod = multiply_pointwise(&left, &pu.phi_hat);
        for i in 0..=200 {
            let t = -PI + (PI - 0.5) * i as f64 / 200.0;
            assert!((prod.eval(t) - left.eval(t)).norm() < 1e-14);
        }
        let far = make_bump(4.0, 5.0, 2).unwrap();
        assert!(multiply_pointwise(&tri, &far).is_zero());
        let one = SpectralDensity::from_pieces_unchecked(vec![Piece::from_real(-4.0, 4.0, &[1.0])], 8);
        let same = multiply_pointwise(&tri, &one);
        for i in 0..=200 {
            let t = -4.0 + 8.0 * i as f64 / 200.0;
            assert!((same.eval(t) - tri.eval(t)).norm() < 1e-15);
        }
        assert_eq!(same.smoothness(), 0);
    }

    #[test]
    fn from_pieces_detects_false_smoothness() {
        let tri = make_fejer(PI / 2.0).unwrap();
        assert!(SpectralDensity::from_pieces(tri.pieces().to_vec(), 0).is_ok());
        assert!(SpectralDensity::from_pieces(tri.pieces().to_vec(), 1).is_err());
        let bump = make_bump(-1.0, 1.0, 4).unwrap();
        assert!(SpectralDensity::from_pieces(bump.pieces().to_vec(), 4).is_ok());
        assert!(SpectralDensity::from_pieces(bump.pieces().to_vec(), 5).is_err());
    }
}
