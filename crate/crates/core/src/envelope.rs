//! Structural operators between `E^p` and pairs of half-plane Hardy
//! functions, the family showing that the Banach envelope of `E^p` is not
//! `E^1`, and dictionary upper bounds for envelope quasi-norms.
//!
//! `j(f) = (e^{iπz} f, e^{-iπz} f)` sends `E^p` into `H^p(ℂ₊) ⊕ H^p(ℂ₋)`.
//! The projection `Q` undoes the modulations and glues the two halves with
//! the spectral partition of unity, `Q(u, v) = (û φ̂ + v̂ ψ̂)` restricted to
//! `[-π, π]`. All inputs are given by spectral densities, so `T` acts by
//! pointwise multiplication of spectra and no boundary distributions appear.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by std float methods when std is linked
use num_traits::Float;

use crate::error::{invalid, Error, Result};
use crate::evaluate::{eval_line, BandLimitedFunction, EvalGrid};
use crate::lp::{self, LpOptions, LpStatus, Matrix};
use crate::norms::{envelope_integral_norm, ep_norm, EnvelopeParams, NormReport, QuadratureSpec};
use crate::spectrum::{
    make_bump, make_fejer, modulate, multiply_pointwise, PartitionOfUnity, SpectralDensity, SPECTRUM_LIMIT,
};
use crate::C64;

/// `(f_π, f_{-π})` with spectra in `[0, 2π]` and `[-2π, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlanePair {
    plus: BandLimitedFunction,
    minus: BandLimitedFunction,
}

const SLACK: f64 = 1e-12;

impl HalfPlanePair {
    pub fn new(plus: BandLimitedFunction, minus: BandLimitedFunction) -> Result<Self> {
        if let Some((a, b)) = plus.density().support() {
            if a < -SLACK || b > SPECTRUM_LIMIT + SLACK {
                return Err(Error::NotHardy { support: (a, b) });
            }
        }
        if let Some((a, b)) = minus.density().support() {
            if b > SLACK || a < -SPECTRUM_LIMIT - SLACK {
                return Err(Error::NotHardy { support: (a, b) });
            }
        }
        Ok(HalfPlanePair { plus, minus })
    }

    pub fn zero() -> Self {
        HalfPlanePair {
            plus: BandLimitedFunction::zero(),
            minus: BandLimitedFunction::zero(),
        }
    }

    pub fn plus(&self) -> &BandLimitedFunction {
        &self.plus
    }

    pub fn minus(&self) -> &BandLimitedFunction {
        &self.minus
    }
}

fn check_type(f: &BandLimitedFunction) -> Result<()> {
    if f.type_bound() > PI * (1.0 + SLACK) {
        Err(Error::NotInEp {
            type_bound: f.type_bound(),
        })
    } else {
        Ok(())
    }
}

/// `j(f) = (e^{iπz} f, e^{-iπz} f)`.
pub fn embed_j(f: &BandLimitedFunction) -> Result<HalfPlanePair> {
    check_type(f)?;
    let plus = BandLimitedFunction::new(modulate(f.density(), PI)?);
    let minus = BandLimitedFunction::new(modulate(f.density(), -PI)?);
    HalfPlanePair::new(plus, minus)
}

/// `T(u, v) = û φ̂ + v̂ ψ̂`, on spectra.
pub fn apply_t(u: &BandLimitedFunction, v: &BandLimitedFunction, pu: &PartitionOfUnity) -> Result<SpectralDensity> {
    for f in [u, v] {
        if let Some((a, b)) = f.density().support() {
            if a < -SPECTRUM_LIMIT - SLACK || b > SPECTRUM_LIMIT + SLACK {
                return Err(invalid("T needs spectra inside [-2π, 2π]"));
            }
        }
    }
    let out = multiply_pointwise(u.density(), &pu.phi_hat).add(&multiply_pointwise(v.density(), &pu.psi_hat));
    if let Some((a, b)) = out.support() {
        if a < -SPECTRUM_LIMIT - SLACK || b > SPECTRUM_LIMIT + SLACK {
            return Err(invalid("T output leaves [-2π, 2π]"));
        }
    }
    Ok(out)
}

/// Largest spectral value tolerated outside `[-π, π]` before truncation,
/// relative to the largest value inside.
pub const TRUNCATION_TOLERANCE: f64 = 1e-14;

/// `Q(u, v)`: demodulate, apply `T`, restrict the spectrum to `[-π, π]`.
pub fn project_q(pair: &HalfPlanePair, pu: &PartitionOfUnity) -> Result<BandLimitedFunction> {
    let u = BandLimitedFunction::new(modulate(pair.plus.density(), -PI)?);
    let v = BandLimitedFunction::new(modulate(pair.minus.density(), PI)?);
    let t = apply_t(&u, &v, pu)?;
    if t.is_zero() {
        return Ok(BandLimitedFunction::zero());
    }
    let outside = t.max_outside(-PI, PI);
    let scale = t.max_abs_sampled().max(f64::MIN_POSITIVE);
    // The partition supports force T's output into [-π, π].
    assert!(
        outside <= TRUNCATION_TOLERANCE * scale,
        "T output does not vanish outside [-π, π]: {outside:e} vs scale {scale:e}"
    );
    Ok(BandLimitedFunction::new(t.clamp_support(-PI, PI)))
}

// ---------------------------------------------------------------------------
// Counterexample family

/// Default smoothness of the counterexample bumps.
pub const COUNTEREXAMPLE_SMOOTHNESS: u32 = 3;

/// `f^ε(z) = ∫ s_ε(t) e^{izt} dt` with `s_ε` a `C^k` bump on `[-π, -π + ε]`,
/// scaled so `∫ |s_ε| = 1`.
pub fn counterexample_family(eps: f64, k: u32) -> Result<BandLimitedFunction> {
    if !(eps > 0.0 && eps <= PI) {
        return Err(invalid(format!("eps = {eps} must lie in (0, π]")));
    }
    if k < 2 {
        return Err(invalid("counterexample smoothness must be at least 2"));
    }
    let s = make_bump(-PI, -PI + eps, k)?;
    let mass = s.l1_mass();
    Ok(BandLimitedFunction::new(s.scale_real(1.0 / mass)))
}

/// One row of the counterexample sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleRow {
    pub eps: f64,
    pub k: u32,
    pub p: f64,
    /// `(∫ e^{-π|y|}|y|^{1/p-2}|f^ε|)` over ℂ, the Banach-envelope integral norm.
    pub envelope: NormReport,
    /// `‖f^ε‖_{E^1}`.
    pub e1: NormReport,
    pub ratio: f64,
    /// Absolute error budget of `ratio`.
    pub ratio_err: f64,
}

/// `‖f^ε‖_{env} / ‖f^ε‖_{E^1}` with the default smoothness.
pub fn counterexample_ratio(eps: f64, p: f64, quad: &QuadratureSpec) -> Result<CounterexampleRow> {
    counterexample_ratio_with(eps, COUNTEREXAMPLE_SMOOTHNESS, p, quad)
}

pub fn counterexample_ratio_with(eps: f64, k: u32, p: f64, quad: &QuadratureSpec) -> Result<CounterexampleRow> {
    let f = counterexample_family(eps, k)?;
    let params = EnvelopeParams::new(p, 1.0)?;
    let envelope = envelope_integral_norm(&f, params, quad)?;
    let e1 = ep_norm(&f, 1.0, quad)?;
    let ratio = envelope.value / e1.value;
    let ratio_err =
        ratio * (envelope.quadrature_error_estimate / envelope.value + e1.quadrature_error_estimate / e1.value);
    Ok(CounterexampleRow {
        eps,
        k,
        p,
        envelope,
        e1,
        ratio,
        ratio_err,
    })
}

// ---------------------------------------------------------------------------
// Dictionary decompositions

/// A dictionary element: a band-limited function with `‖g‖_{E^p} = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub label: String,
    pub function: BandLimitedFunction,
    /// `‖·‖_{E^p}` of the function before normalization.
    pub original_norm: f64,
}

/// Sampling grid on which decompositions must match.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionGrid {
    pub half_width: f64,
    pub spacing: f64,
    /// Required sup-norm residual, relative to `‖f‖_∞` on the grid.
    pub tolerance: f64,
}

impl Default for DecompositionGrid {
    fn default() -> Self {
        DecompositionGrid {
            half_width: 64.0,
            spacing: 0.25,
            tolerance: 1e-6,
        }
    }
}

/// Finite set of `E^p`-normalized atoms for Minkowski-functional upper bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    atoms: Vec<Atom>,
    p: f64,
    q: f64,
    grid: DecompositionGrid,
}

/// Atoms must have unit `E^p` quasi-norm to this relative accuracy.
pub const ATOM_NORM_TOLERANCE: f64 = 1e-8;

impl Dictionary {
    /// Normalizes each function to unit `E^p` quasi-norm.
    pub fn new(
        functions: Vec<(String, BandLimitedFunction)>,
        p: f64,
        q: f64,
        grid: DecompositionGrid,
        quad: &QuadratureSpec,
    ) -> Result<Self> {
        if !(p > 0.0 && q >= p && q <= 1.0) {
            return Err(invalid(format!("need 0 < p ≤ q ≤ 1, got p = {p}, q = {q}")));
        }
        if functions.is_empty() {
            return Err(invalid("dictionary must not be empty"));
        }
        if !(grid.half_width > 0.0 && grid.spacing > 0.0 && grid.tolerance > 0.0) {
            return Err(invalid("decomposition grid parameters must be positive"));
        }
        let mut atoms = Vec::with_capacity(functions.len());
        for (label, f) in functions {
            check_type(&f)?;
            if f.is_zero() {
                return Err(invalid(format!("atom {label} is zero")));
            }
            let norm = ep_norm(&f, p, quad)?;
            let g = f.scale(C64::new(1.0 / norm.value, 0.0));
            let check = ep_norm(&g, p, quad)?;
            if (check.value - 1.0).abs() > ATOM_NORM_TOLERANCE {
                return Err(invalid(format!(
                    "atom {label} normalizes to {} instead of 1",
                    check.value
                )));
            }
            atoms.push(Atom {
                label,
                function: g,
                original_norm: norm.value,
            });
        }
        Ok(Dictionary { atoms, p, q, grid })
    }

    /// Bumps of several widths placed across `[-π, π]`, bumps touching `±π`,
    /// and Fejér kernels of several types, modulated across the band. Atoms
    /// not in `E^p` (too little decay for `p`) are left out.
    pub fn standard(p: f64, q: f64, quad: &QuadratureSpec) -> Result<Self> {
        Self::new(standard_atoms(p)?, p, q, DecompositionGrid::default(), quad)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn grid(&self) -> DecompositionGrid {
        self.grid
    }
}

/// The functions behind [`Dictionary::standard`], unnormalized.
pub fn standard_atoms(p: f64) -> Result<Vec<(String, BandLimitedFunction)>> {
    let mut out: Vec<(String, BandLimitedFunction)> = Vec::new();
    let mut push = |label: String, s: SpectralDensity| {
        let f = BandLimitedFunction::new(s);
        if p * f.decay_order() as f64 > 1.0 {
            out.push((label, f));
        }
    };
    // Half-overlapping bumps of widths 2π, π, π/2, π/4.
    for level in 0..4 {
        let w = 2.0 * PI / (1 << level) as f64;
        let count = (1 << (level + 1)) - 1;
        for i in 0..count {
            let a = -PI + 0.5 * w * i as f64;
            push(format!("bump[{a:.4},{:.4}]k3", a + w), make_bump(a, a + w, 3)?);
        }
    }
    // Narrow bumps touching either end of the band.
    for k in [3u32, 5] {
        for eps in [1.0, 0.5, 0.25, 0.125] {
            push(format!("bump[-pi,-pi+{eps}]k{k}"), make_bump(-PI, -PI + eps, k)?);
            push(format!("bump[pi-{eps},pi]k{k}"), make_bump(PI - eps, PI, k)?);
        }
    }
    push(String::from("bump[-pi/2,pi/2]k5"), make_bump(-PI / 2.0, PI / 2.0, 5)?);
    // Fejér kernels of type 2a, modulated across the band.
    for (a, centers) in [
        (PI / 2.0, &[0.0][..]),
        (PI / 4.0, &[-PI / 2.0, 0.0, PI / 2.0][..]),
        (PI / 8.0, &[-0.75 * PI, -0.25 * PI, 0.0, 0.25 * PI, 0.75 * PI][..]),
    ] {
        for &c in centers {
            push(format!("fejer(a={a:.4})@{c:.4}"), modulate(&make_fejer(a)?, c)?);
        }
    }
    Ok(out)
}

/// One term `λ · i^phase · g_atom` of a decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub atom: usize,
    /// Rotation `i^phase`, `phase ∈ {0, 1, 2, 3}`.
    pub phase: u8,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    /// `(Σ λ^q)^{1/q}`, an upper bound for the `q`-envelope quasi-norm.
    pub objective: f64,
    pub terms: Vec<Term>,
    /// Sup-norm reconstruction error on the dense check grid.
    pub residual: f64,
    /// `‖f‖_∞` on the same grid.
    pub target_sup: f64,
    /// Reweighting rounds used (q < 1); the result is a local optimum.
    pub iterations: usize,
}

const PHASES: [C64; 4] = [
    C64::new(1.0, 0.0),
    C64::new(0.0, 1.0),
    C64::new(-1.0, 0.0),
    C64::new(0.0, -1.0),
];
const REWEIGHT_ROUNDS: usize = 10;
const REWEIGHT_STALL: f64 = 1e-6;
/// Share of the residual tolerance given to the LP box constraints; the rest
/// absorbs the gap between the LP grid and the denser check grid.
const LP_TOLERANCE_SHARE: f64 = 0.25;

fn samples(f: &BandLimitedFunction, grid: &EvalGrid) -> Result<Vec<C64>> {
    eval_line(f, grid)
}

fn lp_grid(g: &DecompositionGrid, refine: usize) -> Result<EvalGrid> {
    let h = g.spacing / refine as f64;
    let n = (2.0 * g.half_width / h).round() as usize + 1;
    EvalGrid::new(0.0, h, n, 0.0)
}

/// Upper bound for the `q`-envelope quasi-norm of `f` from decompositions
/// `f = Σ λ_i i^{k_i} g_i` over the dictionary, `λ_i ≥ 0`, minimizing
/// `(Σ λ_i^q)^{1/q}`. For `q = 1` this is a linear program; for `q < 1` it
/// is approached by reweighted linear programs started from the `q = 1`
/// solution.
pub fn minkowski_norm(f: &BandLimitedFunction, dict: &Dictionary) -> Result<DecompositionResult> {
    check_type(f)?;
    let g = dict.grid;
    let coarse = lp_grid(&g, 1)?;
    let fine = lp_grid(&g, 2)?;
    let target = samples(f, &coarse)?;
    let target_fine = samples(f, &fine)?;
    let sup = target_fine.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    if sup == 0.0 {
        return Ok(DecompositionResult {
            objective: 0.0,
            terms: Vec::new(),
            residual: 0.0,
            target_sup: 0.0,
            iterations: 0,
        });
    }
    let atom_samples: Vec<Vec<C64>> = dict
        .atoms
        .iter()
        .map(|a| samples(&a.function, &coarse))
        .collect::<Result<_>>()?;
    let atom_fine: Vec<Vec<C64>> = dict
        .atoms
        .iter()
        .map(|a| samples(&a.function, &fine))
        .collect::<Result<_>>()?;

    // Columns: atom × phase. Rows: Re and Im of the reconstruction at each node.
    let cols = 4 * dict.atoms.len();
    let m = coarse.count;
    let mut amat = Matrix::zeros(2 * m, cols);
    let mut lo = Vec::with_capacity(2 * m);
    let mut hi = Vec::with_capacity(2 * m);
    let tau = LP_TOLERANCE_SHARE * g.tolerance * sup;
    for j in 0..m {
        for (col, (a, ph)) in (0..dict.atoms.len())
            .flat_map(|a| (0..4).map(move |ph| (a, ph)))
            .enumerate()
        {
            let v = atom_samples[a][j] * PHASES[ph];
            amat.row_mut(2 * j)[col] = v.re;
            amat.row_mut(2 * j + 1)[col] = v.im;
        }
        let t = target[j];
        lo.extend_from_slice(&[t.re - tau, t.im - tau]);
        hi.extend_from_slice(&[t.re + tau, t.im + tau]);
    }

    let residual_of = |x: &[f64]| -> f64 {
        let mut worst = 0.0f64;
        for (j, t) in target_fine.iter().enumerate() {
            let mut acc = -*t;
            for (col, xv) in x.iter().enumerate() {
                if *xv != 0.0 {
                    acc += atom_fine[col / 4][j] * PHASES[col % 4] * *xv;
                }
            }
            worst = worst.max(acc.norm());
        }
        worst
    };
    let objective_of = |x: &[f64]| -> f64 {
        if dict.q == 1.0 {
            x.iter().sum()
        } else {
            x.iter().map(|v| v.powf(dict.q)).sum::<f64>().powf(1.0 / dict.q)
        }
    };
    let prune = |x: &[f64]| -> Vec<f64> {
        let top = x.iter().fold(0.0f64, |a, v| a.max(*v));
        x.iter().map(|v| if *v > 1e-10 * top { *v } else { 0.0 }).collect()
    };

    let limit = g.tolerance * sup;
    let mut weights = alloc::vec![1.0; cols];
    let mut best: Option<(f64, Vec<f64>, f64)> = None;
    let mut best_residual = f64::INFINITY;
    let rounds = if dict.q < 1.0 { REWEIGHT_ROUNDS } else { 1 };
    let mut iterations = 0;
    let mut previous = f64::INFINITY;
    for round in 0..rounds {
        iterations = round + 1;
        let sol = lp::solve(&weights, &amat, &lo, &hi, LpOptions::default());
        if sol.status == LpStatus::NumericalFailure {
            break;
        }
        let x: Vec<f64> = sol.x.iter().map(|v| v.max(0.0)).collect();
        let pruned = prune(&x);
        let (x, residual) = {
            let r = residual_of(&pruned);
            if r <= limit {
                (pruned, r)
            } else {
                let r_full = residual_of(&x);
                (x, r_full)
            }
        };
        best_residual = best_residual.min(residual);
        if residual <= limit {
            let obj = objective_of(&x);
            if best.as_ref().is_none_or(|(b, _, _)| obj < *b) {
                best = Some((obj, x.clone(), residual));
            }
        }
        let current = objective_of(&x);
        // A stalled objective means the weights have reached a fixed point.
        if (previous - current).abs() <= REWEIGHT_STALL * current {
            break;
        }
        previous = current;
        if dict.q < 1.0 {
            let top = x.iter().fold(0.0f64, |a, v| a.max(*v));
            let delta = 1e-3 * top.max(f64::MIN_POSITIVE);
            weights = x.iter().map(|v| (v + delta).powf(dict.q - 1.0)).collect();
            let wmax = weights.iter().fold(0.0f64, |a, v| a.max(*v));
            weights.iter_mut().for_each(|w| *w /= wmax);
        }
    }
    let Some((objective, x, residual)) = best else {
        return Err(Error::NoDecomposition {
            best_residual: best_residual / sup,
        });
    };
    let terms = x
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0)
        .map(|(col, v)| Term {
            atom: col / 4,
            phase: (col % 4) as u8,
            weight: *v,
        })
        .collect();
    Ok(DecompositionResult {
        objective,
        terms,
        residual,
        target_sup: sup,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evaluate::eval_point;
    use crate::spectrum::make_partition;

    #[test]
    fn q_inverts_j_on_fejer() {
        let f = BandLimitedFunction::new(make_fejer(PI / 2.0).unwrap());
        let pu = make_partition(3).unwrap();
        let back = project_q(&embed_j(&f).unwrap(), &pu).unwrap();
        for k in -40..=40 {
            let z = C64::new(0.37 * k as f64, 0.0);
            assert!((eval_point(&back, z) - eval_point(&f, z)).norm() < 1e-13);
        }
    }

    #[test]
    fn embedding_rejects_wide_type() {
        let f = BandLimitedFunction::new(make_bump(-4.0, 1.0, 3).unwrap());
        assert!(matches!(embed_j(&f), Err(Error::NotInEp { .. })));
    }

    #[test]
    fn counterexample_is_normalized() {
        let f = counterexample_family(0.25, 3).unwrap();
        assert!((f.density().l1_mass() - 1.0).abs() < 1e-13);
        assert!((eval_point(&f, C64::new(0.0, 0.0)) - C64::new(1.0, 0.0)).norm() < 1e-13);
        assert!(counterexample_family(0.0, 3).is_err());
        assert!(counterexample_family(4.0, 3).is_err());
        assert!(counterexample_family(0.5, 1).is_err());
    }
}
