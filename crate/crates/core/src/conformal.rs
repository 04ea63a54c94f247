//! The Cayley transform `c(z) = (i - z)/(i + z)` from the upper half-plane
//! onto the unit disk, and the weighted-area transfer identity
//!
//! ```text
//! ∫_𝔻 |g|^p (1-|w|²)^α dA = 4^{α+1} ∫_{ℂ₊} |F(z)|^p |z+i|^{-(2α+4)} y^α dA,  F = g∘c,
//! ```
//!
//! which follows from `1 - |c(z)|² = 4y/|z+i|²` and `|c'(z)|² = 4/|z+i|⁴`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by std float methods when std is linked
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::evaluate::{eval_point, BandLimitedFunction};
use crate::norms::{
    bergman_disk_integral, integrate_area, integrate_line, LineShape, NormFlag, QuadratureSpec, YDecay,
};
use crate::C64;

const I: C64 = C64::new(0.0, 1.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// `c(z) = (i - z)/(i + z)`.
pub fn cayley(z: C64) -> Result<C64> {
    let den = I + z;
    if den.norm() == 0.0 {
        return Err(Error::Pole);
    }
    Ok((I - z) / den)
}

/// `c⁻¹(w) = i (1 - w)/(1 + w)`.
pub fn cayley_inverse(w: C64) -> Result<C64> {
    let den = ONE + w;
    if den.norm() == 0.0 {
        return Err(Error::Pole);
    }
    Ok(I * (ONE - w) / den)
}

/// `c'(z) = -2i/(i + z)²`.
pub fn cayley_derivative(z: C64) -> Result<C64> {
    let den = I + z;
    if den.norm() == 0.0 {
        return Err(Error::Pole);
    }
    Ok(C64::new(0.0, -2.0) / (den * den))
}

/// Relative agreement required between direct and closed-form values.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

/// `(1 - |c(z)|², |c'(z)|²)` computed from `c` directly, after checking
/// them against `4y/|z+i|²` and `4/|z+i|⁴`.
pub fn cayley_identities(z: C64) -> Result<(f64, f64)> {
    if !(z.im > 0.0) {
        return Err(Error::Domain(format!("Im z = {} must be positive", z.im)));
    }
    let c = cayley(z)?;
    let direct_gap = 1.0 - c.norm_sqr();
    let direct_jac = cayley_derivative(z)?.norm_sqr();
    let d2 = (z + I).norm_sqr();
    let closed_gap = 4.0 * z.im / d2;
    let closed_jac = 4.0 / (d2 * d2);
    // 1 - |c|² cancels when |c| is near 1; measure it against the terms.
    let gap_scale = closed_gap.abs().max(f64::EPSILON * (1.0 + c.norm_sqr()));
    let gap_ok = (direct_gap - closed_gap).abs() <= IDENTITY_TOLERANCE * gap_scale.max(closed_gap.abs())
        || (direct_gap - closed_gap).abs() <= 4.0 * f64::EPSILON;
    let jac_ok = (direct_jac - closed_jac).abs() <= IDENTITY_TOLERANCE * closed_jac;
    if !(gap_ok && jac_ok) {
        return Err(Error::Domain(format!(
            "Cayley identities disagree at {z}: ({direct_gap}, {direct_jac}) vs ({closed_gap}, {closed_jac})"
        )));
    }
    Ok((direct_gap, direct_jac))
}

/// A function holomorphic on the open unit disk.
pub trait DiskFunction: Sync {
    fn eval(&self, w: C64) -> C64;

    /// `F(z) = g(c(z))` on the upper half-plane.
    fn on_halfplane(&self, z: C64) -> C64 {
        match cayley(z) {
            Ok(w) => self.eval(w),
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// Characteristic x-scale of `|F(x+iy)|` on the half-plane (panel hint).
    fn halfplane_scale(&self) -> f64 {
        f64::INFINITY
    }

    /// Additional algebraic decay of `|F(x+iy)|` beyond boundedness.
    fn halfplane_decay(&self) -> f64 {
        0.0
    }

    fn is_zero(&self) -> bool {
        false
    }

    fn name(&self) -> String;
}

/// `Σ a_n w^n`, a polynomial in `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    pub coeffs: Vec<C64>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<C64>) -> Self {
        PowerSeries { coeffs }
    }

    pub fn monomial(n: usize) -> Self {
        let mut coeffs = alloc::vec![C64::new(0.0, 0.0); n + 1];
        coeffs[n] = ONE;
        PowerSeries { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        PowerSeries {
            coeffs: alloc::vec![C64::new(c, 0.0)],
        }
    }
}

impl DiskFunction for PowerSeries {
    fn eval(&self, w: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, a| acc * w + a)
    }

    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    fn name(&self) -> String {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() != 0.0)
            .map(|(n, c)| match n {
                0 if *c == ONE => String::from("1"),
                0 => fmt_coeff(*c),
                1 => format!("{}w", fmt_coeff(*c)),
                _ => format!("{}w^{n}", fmt_coeff(*c)),
            })
            .collect();
        if terms.is_empty() {
            String::from("0")
        } else {
            terms.join("+")
        }
    }
}

fn fmt_coeff(c: C64) -> String {
    if c.im == 0.0 {
        if c.re == 1.0 {
            String::new()
        } else {
            format!("{}", c.re)
        }
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

/// `(1 - w)^β` on the principal branch. On the disk `Re(1 - w) > 0`, so the
/// cut along the negative reals is never reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Binomial {
    pub beta: f64,
}

impl DiskFunction for Binomial {
    fn eval(&self, w: C64) -> C64 {
        let base = ONE - w;
        if base.norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        base.powf(self.beta)
    }

    fn name(&self) -> String {
        format!("(1-w)^{}", self.beta)
    }
}

/// `g = F∘c⁻¹` for a band-limited `F` whose spectrum lies in `[0, ∞)`, so
/// that `F` is bounded on the upper half-plane.
#[derive(Debug, Clone)]
pub struct Transferred {
    f: BandLimitedFunction,
}

impl Transferred {
    pub fn new(f: BandLimitedFunction) -> Result<Self> {
        if let Some((a, _)) = f.density().support() {
            if a < -1e-12 {
                return Err(Error::NotHardy {
                    support: f.density().support().unwrap_or_default(),
                });
            }
        }
        Ok(Transferred { f })
    }

    pub fn function(&self) -> &BandLimitedFunction {
        &self.f
    }
}

impl DiskFunction for Transferred {
    fn eval(&self, w: C64) -> C64 {
        match cayley_inverse(w) {
            Ok(z) => eval_point(&self.f, z),
            // w = -1 is the image of ∞, where F vanishes.
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    fn on_halfplane(&self, z: C64) -> C64 {
        eval_point(&self.f, z)
    }

    fn halfplane_scale(&self) -> f64 {
        match self.f.density().support() {
            Some((a, b)) => PI / (b - a).max(1e-3),
            None => f64::INFINITY,
        }
    }

    fn halfplane_decay(&self) -> f64 {
        self.f.leading_order().map_or(0.0, |j| (j + 1) as f64)
    }

    fn is_zero(&self) -> bool {
        self.f.is_zero()
    }

    fn name(&self) -> String {
        String::from("transferred-section")
    }
}

impl<T: DiskFunction + ?Sized + Send> DiskFunction for Box<T> {
    fn eval(&self, w: C64) -> C64 {
        (**self).eval(w)
    }
    fn on_halfplane(&self, z: C64) -> C64 {
        (**self).on_halfplane(z)
    }
    fn halfplane_scale(&self) -> f64 {
        (**self).halfplane_scale()
    }
    fn halfplane_decay(&self) -> f64 {
        (**self).halfplane_decay()
    }
    fn is_zero(&self) -> bool {
        (**self).is_zero()
    }
    fn name(&self) -> String {
        (**self).name()
    }
}

/// Both sides of the transfer identity with their error budgets.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferReport {
    pub lhs: f64,
    pub rhs: f64,
    pub lhs_err: f64,
    pub rhs_err: f64,
    pub relative_gap: f64,
    pub flags: Vec<NormFlag>,
}

impl TransferReport {
    /// Combined absolute error budget of both sides.
    pub fn budget(&self) -> f64 {
        self.lhs_err + self.rhs_err
    }
}

/// Computes `∫_𝔻 |g|^p (1-|w|²)^α dA` and
/// `4^{α+1} ∫_{ℂ₊} |g(c(z))|^p |z+i|^{-(2α+4)} y^α dA` independently.
pub fn verify_transfer_identity(
    g: &dyn DiskFunction,
    p: f64,
    alpha: f64,
    quad: &QuadratureSpec,
) -> Result<TransferReport> {
    quad.validate()?;
    if !(p > 0.0 && p.is_finite()) {
        return Err(invalid(format!("exponent p = {p} must be positive")));
    }
    if !(alpha > -1.0 && alpha.is_finite()) {
        return Err(Error::InvalidWeight { alpha });
    }
    if g.is_zero() {
        return Ok(TransferReport {
            lhs: 0.0,
            rhs: 0.0,
            lhs_err: 0.0,
            rhs_err: 0.0,
            relative_gap: 0.0,
            flags: Vec::new(),
        });
    }
    let lhs = bergman_disk_integral(g, p, alpha, quad)?;

    // |z+i|^{-(2α+4)} = |(z+i)^{-(2α+4)/p}|^p; |z+i| ≥ 1 on the closed half-plane.
    let kernel = 2.0 * alpha + 4.0;
    let extra = p * g.halfplane_decay();
    let hint = g.halfplane_scale();
    let line = |y: f64| {
        let shape = LineShape {
            decay: kernel + extra,
            period: None,
            spacing: (0.25 * (1.0 + y)).min(hint.max(0.25 * y)),
            core: 16.0 * (1.0 + y),
        };
        integrate_line(
            |x| {
                let z = C64::new(x, y);
                g.on_halfplane(z).norm().powf(p) * (z + I).norm().powf(-kernel)
            },
            &shape,
            quad,
        )
    };
    // F is bounded, so the line integrals decay like y^{-(2α+3)}.
    let decay = YDecay::Algebraic { exponent: -alpha - 3.0 };
    let area = integrate_area(line, alpha, decay, quad)?;
    let scale = 4f64.powf(alpha + 1.0);
    let rhs = scale * area.value;
    let rhs_err = scale * area.err;
    let mut flags = lhs.flags.clone();
    flags.extend(area.flags.iter().copied());
    flags.sort();
    flags.dedup();
    let relative_gap = (lhs.value - rhs).abs() / lhs.value.abs().max(rhs.abs());
    Ok(TransferReport {
        lhs: lhs.value,
        rhs,
        lhs_err: lhs.quadrature_error_estimate,
        rhs_err,
        relative_gap,
        flags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cayley_fixed_values() {
        assert!(cayley(I).unwrap().norm() < 1e-16);
        assert_eq!(cayley(C64::new(0.0, 0.0)).unwrap(), ONE);
        let v = cayley(ONE).unwrap();
        assert!((v - I).norm() < 1e-15);
        assert_eq!(cayley(-I), Err(Error::Pole));
    }

    #[test]
    fn inverse_round_trip() {
        for &w in &[C64::new(0.3, -0.2), C64::new(-0.9, 0.1), C64::new(0.0, 0.99)] {
            let back = cayley(cayley_inverse(w).unwrap()).unwrap();
            assert!((back - w).norm() < 1e-14);
        }
    }

    #[test]
    fn identities_at_i() {
        let (gap, jac) = cayley_identities(I).unwrap();
        assert_relative_eq!(gap, 1.0, epsilon = 1e-15);
        assert_relative_eq!(jac, 0.25, epsilon = 1e-15);
        assert!(cayley_identities(C64::new(1.0, 1.0)).is_ok());
        assert!(matches!(cayley_identities(ONE), Err(Error::Domain(_))));
        let (near_gap, _) = cayley_identities(C64::new(0.4, 1e-9)).unwrap();
        assert!(near_gap < 1e-8);
    }

    #[test]
    fn binomial_principal_branch() {
        let g = Binomial { beta: 0.5 };
        let v = g.eval(C64::new(-0.5, 0.0));
        assert_relative_eq!(v.re, 1.5f64.sqrt(), epsilon = 1e-15);
        assert!(g.eval(C64::new(0.2, 0.7)).re > 0.0);
    }
}
