//! Dense polynomials in a local variable `x ∈ [-1, 1]`.
//!
//! A piece on `[lo, hi]` stores coefficients `a_n` of `P(x) = Σ a_n x^n`,
//! where `t = c + h x`, `c = (lo + hi) / 2`, `h = (hi - lo) / 2`. Keeping the
//! variable local keeps high-degree smoothstep products well conditioned.

use alloc::vec;
use alloc::vec::Vec;

use crate::C64;

/// Evaluates `Σ a_n x^n` by Horner's rule.
#[inline]
pub fn horner(coeffs: &[C64], x: f64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for a in coeffs.iter().rev() {
        acc = acc * x + a;
    }
    acc
}

/// Evaluates `Σ a_n x^n` for real coefficients.
#[inline]
pub fn horner_real(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, a| acc * x + a)
}

pub fn mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

pub fn mul_real(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

pub fn add(a: &[C64], b: &[C64]) -> Vec<C64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or_default() + b.get(i).copied().unwrap_or_default())
        .collect()
}

/// Coefficients of `P(shift + scale·x)`.
pub fn substitute(coeffs: &[C64], shift: f64, scale: f64) -> Vec<C64> {
    let mut out: Vec<C64> = Vec::with_capacity(coeffs.len());
    for a in coeffs.iter().rev() {
        // out <- out * (shift + scale x) + a
        let mut next = vec![C64::new(0.0, 0.0); out.len() + 1];
        for (i, o) in out.iter().enumerate() {
            next[i] += o * shift;
            next[i + 1] += o * scale;
        }
        next[0] += a;
        out = next;
    }
    out
}

/// Real version of [`substitute`].
pub fn substitute_real(coeffs: &[f64], shift: f64, scale: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(coeffs.len());
    for a in coeffs.iter().rev() {
        let mut next = vec![0.0; out.len() + 1];
        for (i, o) in out.iter().enumerate() {
            next[i] += o * shift;
            next[i + 1] += o * scale;
        }
        next[0] += a;
        out = next;
    }
    out
}

/// `j`-th derivative in `x` evaluated at `x = side` (`side` is `±1`).
pub fn derivative_at(coeffs: &[C64], j: usize, side: f64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for n in (j..coeffs.len()).rev() {
        let mut falling = 1.0;
        for m in 0..j {
            falling *= (n - m) as f64;
        }
        acc = acc * side + coeffs[n] * falling;
    }
    acc
}

/// Drops trailing coefficients that are exactly zero.
pub fn trim(mut coeffs: Vec<C64>) -> Vec<C64> {
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.re == 0.0 && c.im == 0.0) {
        coeffs.pop();
    }
    coeffs
}

/// Coefficients of the smoothstep `S_k(u) = u^{k+1} Σ_{j≤k} C(k+j, j)(1-u)^j`
/// in the monomial basis of `u`.
pub fn smoothstep_coeffs(k: u32) -> Vec<f64> {
    let k = k as usize;
    let mut total = vec![0.0; 2 * k + 2];
    // (1-u)^j expanded incrementally
    let mut one_minus_pow = vec![1.0];
    let mut binom = 1.0; // C(k+j, j)
    for j in 0..=k {
        if j > 0 {
            binom = binom * (k + j) as f64 / j as f64;
            one_minus_pow = mul_real(&one_minus_pow, &[1.0, -1.0]);
        }
        for (i, c) in one_minus_pow.iter().enumerate() {
            total[i + k + 1] += binom * c;
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn substitute_matches_direct_evaluation() {
        let p = [c(1.0), c(-2.0), c(0.5), c(3.0)];
        let q = substitute(&p, 0.3, -0.4);
        for &x in &[-1.0, -0.2, 0.0, 0.7, 1.0] {
            let direct = horner(&p, 0.3 - 0.4 * x);
            let via = horner(&q, x);
            assert!((direct - via).norm() < 1e-14);
        }
    }

    #[test]
    fn derivative_at_endpoints() {
        // P(x) = x^3: P'(1) = 3, P''(-1) = -6
        let p = [c(0.0), c(0.0), c(0.0), c(1.0)];
        assert_eq!(derivative_at(&p, 1, 1.0).re, 3.0);
        assert_eq!(derivative_at(&p, 2, -1.0).re, -6.0);
        assert_eq!(derivative_at(&p, 4, 1.0).re, 0.0);
    }

    #[test]
    fn smoothstep_k1_is_cubic() {
        assert_eq!(smoothstep_coeffs(1), vec![0.0, 0.0, 3.0, -2.0]);
        assert_eq!(smoothstep_coeffs(0), vec![0.0, 1.0]);
    }
}
