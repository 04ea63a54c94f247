//! Quadrature rules: Gauss–Legendre, Gauss–Jacobi (Golub–Welsch) and an
//! adaptive Gauss–Kronrod (7, 15) integrator.

// Tabulated nodes keep every digit they were published with.
#![allow(clippy::excessive_precision)]

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use num_traits::Float;

use crate::error::{invalid, Result};

/// An `n`-point rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Integrates `g` over `[a, b]` with the rule mapped affinely.
    pub fn integrate(&self, a: f64, b: f64, mut g: impl FnMut(f64) -> f64) -> f64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * g(c + h * x);
        }
        acc * h
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss–Legendre nodes and weights by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1e-3) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Jacobi rule for the weight `(1-x)^a (1+x)^b` on `[-1, 1]`.
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<Rule> {
    if n == 0 {
        return Err(invalid("Gauss-Jacobi rule needs at least one node"));
    }
    if !(a > -1.0 && b > -1.0) {
        return Err(invalid("Jacobi exponents must exceed -1"));
    }
    // Three-term recurrence of the monic Jacobi polynomials.
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n];
    for k in 0..n {
        let kf = k as f64;
        let s = 2.0 * kf + a + b;
        diag[k] = if k == 0 {
            (b - a) / (a + b + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
        if k + 1 < n {
            let k1 = kf + 1.0;
            let s1 = 2.0 * k1 + a + b;
            let beta = if k == 0 {
                // (k1 + a + b) cancels against (s1 - 1) at k1 = 1
                4.0 * (1.0 + a) * (1.0 + b) / (s1 * s1 * (s1 + 1.0))
            } else {
                4.0 * k1 * (k1 + a) * (k1 + b) * (k1 + a + b) / (s1 * s1 * (s1 + 1.0) * (s1 - 1.0))
            };
            off[k + 1] = beta.sqrt();
        }
    }
    let mu0 = (2.0).powf(a + b + 1.0) * libm::tgamma(a + 1.0) * libm::tgamma(b + 1.0) / libm::tgamma(a + b + 2.0);
    let (vals, first) = symmetric_tridiagonal_eigen(diag, off)?;
    let mut pairs: Vec<(f64, f64)> = vals.into_iter().zip(first).map(|(x, v)| (x, mu0 * v * v)).collect();
    pairs.sort_by(|l, r| l.0.total_cmp(&r.0));
    Ok(Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    })
}

/// Rule for `∫_0^L y^alpha g(y) dy`, returned as absolute nodes and weights
/// (the weight `y^alpha` is folded into the weights).
pub fn jacobi_left_endpoint(n: usize, alpha: f64, len: f64) -> Result<Rule> {
    let r = gauss_jacobi(n, 0.0, alpha)?;
    // y = L (1 + x) / 2, dy = L/2 dx, y^alpha = (L/2)^alpha (1+x)^alpha
    let scale = (0.5 * len).powf(alpha + 1.0);
    Ok(Rule {
        nodes: r.nodes.iter().map(|x| 0.5 * len * (1.0 + x)).collect(),
        weights: r.weights.iter().map(|w| w * scale).collect(),
    })
}

/// Eigenvalues and first eigenvector components of a symmetric tridiagonal
/// matrix (implicit QL with Wilkinson shifts). `off[k]` couples rows `k-1`, `k`.
fn symmetric_tridiagonal_eigen(mut d: Vec<f64>, off: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = d.len();
    let mut e = vec![0.0; n];
    e[..(n - 1)].copy_from_slice(&off[1..n]);
    // Only the first row of the eigenvector matrix is needed.
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(invalid("tridiagonal eigensolver did not converge"));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok((d, z))
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// One Gauss–Kronrod (7, 15) panel: `(integral, error estimate)`.
pub fn gk15(a: f64, b: f64, g: &mut impl FnMut(f64) -> f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = g(c);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = g(c - dx);
        let f2 = g(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let hh = h.abs();
    let result = resk * h;
    resabs *= hh;
    resasc *= hh;
    let mut err = ((resk - resg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(floor);
    }
    (result, err)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub err: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Limits for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_panels: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        AdaptiveOptions {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_panels: 200_000,
        }
    }
}

/// Globally adaptive Gauss–Kronrod integration over the panels given by
/// consecutive entries of `cuts`.
pub fn adaptive(cuts: &[f64], opts: AdaptiveOptions, mut g: impl FnMut(f64) -> f64) -> Integral {
    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    let mut evals = 0;
    for w in cuts.windows(2) {
        let (value, err) = gk15(w[0], w[1], &mut g);
        evals += 15;
        total += value;
        total_err += err;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value,
            err,
        });
    }
    let mut converged = true;
    while total_err > opts.abs_tol.max(opts.rel_tol * total.abs()) {
        if heap.len() >= opts.max_panels {
            converged = false;
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in floating point.
            heap.push(worst);
            converged = false;
            break;
        }
        let (v1, e1) = gk15(worst.a, mid, &mut g);
        let (v2, e2) = gk15(mid, worst.b, &mut g);
        evals += 30;
        total += v1 + v2 - worst.value;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            err: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            err: e2,
        });
    }
    // Resum to shed accumulated cancellation from the running updates.
    let (mut value, mut err) = (0.0, 0.0);
    let mut panels: Vec<Panel> = heap.into_vec();
    panels.sort_by(|l, r| l.a.total_cmp(&r.a));
    for p in &panels {
        value += p.value;
        err += p.err;
    }
    Integral {
        value,
        err,
        evaluations: evals,
        converged,
    }
}

/// Uniform cut points `a, a + (b-a)/n, …, b`.
pub fn uniform_cuts(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(1);
    let mut cuts: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    cuts.push(b);
    cuts
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        let r = gauss_legendre(10);
        // ∫_{-1}^{1} x^18 = 2/19
        let v = r.integrate(-1.0, 1.0, |x| x.powi(18));
        assert_relative_eq!(v, 2.0 / 19.0, max_relative = 1e-14);
        let s: f64 = r.weights.iter().sum();
        assert_relative_eq!(s, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn odd_legendre_has_zero_node() {
        let r = gauss_legendre(7);
        assert_eq!(r.nodes[3], 0.0);
        assert_relative_eq!(r.weights[3], 0.417_959_183_673_469_4, max_relative = 1e-14);
    }

    #[test]
    fn jacobi_with_zero_exponents_is_legendre() {
        let j = gauss_jacobi(12, 0.0, 0.0).unwrap();
        let l = gauss_legendre(12);
        for (a, b) in j.nodes.iter().zip(&l.nodes) {
            assert!((a - b).abs() < 1e-13);
        }
        for (a, b) in j.weights.iter().zip(&l.weights) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn jacobi_left_endpoint_moments() {
        // ∫_0^2 y^{-2/3} y^3 dy = 2^{10/3} / (10/3)
        let alpha = -2.0 / 3.0;
        let r = jacobi_left_endpoint(8, alpha, 2.0).unwrap();
        let v: f64 = r.nodes.iter().zip(&r.weights).map(|(y, w)| w * y.powi(3)).sum();
        assert_relative_eq!(v, 2f64.powf(10.0 / 3.0) / (10.0 / 3.0), max_relative = 1e-13);
    }

    #[test]
    fn kronrod_panel_is_exact_for_degree_21() {
        let (v, _) = gk15(0.0, 1.0, &mut |x: f64| 22.0 * x.powi(21));
        assert_relative_eq!(v, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn adaptive_handles_endpoint_cusp() {
        let opts = AdaptiveOptions {
            rel_tol: 1e-10,
            ..Default::default()
        };
        let r = adaptive(&[0.0, 1.0], opts, |x: f64| x.sqrt());
        assert!(r.converged);
        assert_relative_eq!(r.value, 2.0 / 3.0, max_relative = 1e-10);
    }

    #[test]
    fn jacobi_rejects_bad_exponent() {
        assert!(gauss_jacobi(4, 0.0, -1.0).is_err());
    }
}
