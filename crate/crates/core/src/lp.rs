//! Dense primal-dual interior-point solver (Mehrotra predictor-corrector) for
//! linear programs in inequality form
//!
//! ```text
//! minimize cᵀx  subject to  lo ≤ A x ≤ hi,  x ≥ 0.
//! ```
//!
//! Sizes here are a few hundred variables and a few thousand rows, so the
//! normal equations are formed densely and factored by Cholesky.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Float;

/// A dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `selfᵀ y`.
    pub fn tmul_vec(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (i, yi) in y.iter().enumerate() {
            if *yi != 0.0 {
                axpy(*yi, self.row(i), &mut out);
            }
        }
        out
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    /// Iteration limit reached; the returned point is the last iterate.
    IterationLimit,
    /// The normal equations lost positive definiteness.
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub status: LpStatus,
    /// Largest violation of the box rows and of `x ≥ 0`.
    pub max_violation: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct LpOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions {
            max_iterations: 100,
            tolerance: 1e-11,
        }
    }
}

/// Solves `min cᵀx` s.t. `lo ≤ A x ≤ hi`, `x ≥ 0`.
///
/// The two-sided rows are the inequality system `G = [A; -A]`,
/// `h = [hi; -lo]`; the normal matrix is then `Aᵀ diag(w₁ + w₂) A + W_x`,
/// half the work of forming it from `G`.
pub fn solve(c: &[f64], a: &Matrix, lo: &[f64], hi: &[f64], opts: LpOptions) -> LpSolution {
    let n = a.cols;
    let m = a.rows;
    assert_eq!(c.len(), n);
    assert_eq!(lo.len(), m);
    assert_eq!(hi.len(), m);
    assert!(lo.iter().zip(hi).all(|(l, h)| l <= h), "empty box row");
    let h: Vec<f64> = hi.iter().copied().chain(lo.iter().map(|v| -v)).collect();
    let g_mul = |x: &[f64]| -> Vec<f64> {
        let ax = a.mul_vec(x);
        ax.iter().copied().chain(ax.iter().map(|v| -v)).collect()
    };
    let g_tmul = |z: &[f64]| -> Vec<f64> {
        let diff: Vec<f64> = (0..m).map(|i| z[i] - z[m + i]).collect();
        a.tmul_vec(&diff)
    };
    let rows = 2 * m;
    // Slacks and duals: s, z for the G rows; zx for x ≥ 0, whose slack is x.
    let mut x = vec![1.0; n];
    let gx = g_mul(&x);
    let mut s: Vec<f64> = h.iter().zip(&gx).map(|(hi, gi)| (hi - gi).max(1.0)).collect();
    let mut z = vec![1.0; rows];
    let mut zx = vec![1.0; n];
    let scale_h = 1.0 + h.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let scale_c = 1.0 + c.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let total = (rows + n) as f64;
    let mut status = LpStatus::IterationLimit;
    let mut iterations = 0;
    let mut normal = vec![0.0; n * n];
    for it in 0..opts.max_iterations {
        iterations = it + 1;
        // rd = Gᵀz - zx + c, rp = G x + s - h
        let gx = g_mul(&x);
        let rp: Vec<f64> = (0..rows).map(|i| gx[i] + s[i] - h[i]).collect();
        let gtz = g_tmul(&z);
        let rd: Vec<f64> = (0..n).map(|j| gtz[j] - zx[j] + c[j]).collect();
        let mu = (dot(&s, &z) + dot(&x, &zx)) / total;
        let pobj = dot(c, &x);
        let dobj = -dot(&h, &z);
        let rp_norm = rp.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let rd_norm = rd.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs());
        if rp_norm <= opts.tolerance * scale_h && rd_norm <= opts.tolerance * scale_c && gap <= opts.tolerance {
            status = LpStatus::Optimal;
            break;
        }
        let w: Vec<f64> = (0..rows).map(|i| z[i] / s[i]).collect();
        let wx: Vec<f64> = (0..n).map(|j| zx[j] / x[j]).collect();
        normal.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..m {
            let row = a.row(i);
            let wi = w[i] + w[m + i];
            for p in 0..n {
                let rp_ = wi * row[p];
                if rp_ == 0.0 {
                    continue;
                }
                let line = &mut normal[p * n..p * n + n];
                for q in p..n {
                    line[q] += rp_ * row[q];
                }
            }
        }
        for p in 0..n {
            normal[p * n + p] += wx[p];
            for q in 0..p {
                normal[p * n + q] = normal[q * n + p];
            }
        }
        let diag_max = (0..n).fold(0.0f64, |acc, p| acc.max(normal[p * n + p]));
        for p in 0..n {
            normal[p * n + p] += 1e-14 * diag_max;
        }
        let Some(chol) = cholesky(&normal, n) else {
            status = LpStatus::NumericalFailure;
            break;
        };

        // Newton direction for complementarity residuals rc (rows), rcx (x ≥ 0):
        // dz = W (G dx + rp) - rc/s, dzx = -(zx/x) dx - rcx/x, Gᵀdz - dzx = -rd.
        let direction = |rc: &[f64], rcx: &[f64]| -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
            let t: Vec<f64> = (0..rows).map(|i| w[i] * rp[i] - rc[i] / s[i]).collect();
            let mut rhs = g_tmul(&t);
            for j in 0..n {
                rhs[j] = -rd[j] - rhs[j] - rcx[j] / x[j];
            }
            let dx = chol_solve(&chol, n, &rhs);
            let gdx = g_mul(&dx);
            let dz: Vec<f64> = (0..rows).map(|i| w[i] * (gdx[i] + rp[i]) - rc[i] / s[i]).collect();
            let ds: Vec<f64> = (0..rows).map(|i| -rp[i] - gdx[i]).collect();
            let dzx: Vec<f64> = (0..n).map(|j| -wx[j] * dx[j] - rcx[j] / x[j]).collect();
            (dx, ds, dz, dzx)
        };
        // Affine (predictor) step.
        let rc_aff: Vec<f64> = (0..rows).map(|i| s[i] * z[i]).collect();
        let rcx_aff: Vec<f64> = (0..n).map(|j| x[j] * zx[j]).collect();
        let (dx_a, ds_a, dz_a, dzx_a) = direction(&rc_aff, &rcx_aff);
        let ap = step_length(&s, &ds_a).min(step_length(&x, &dx_a)).min(1.0);
        let ad = step_length(&z, &dz_a).min(step_length(&zx, &dzx_a)).min(1.0);
        let mu_aff = ((0..rows)
            .map(|i| (s[i] + ap * ds_a[i]) * (z[i] + ad * dz_a[i]))
            .sum::<f64>()
            + (0..n)
                .map(|j| (x[j] + ap * dx_a[j]) * (zx[j] + ad * dzx_a[j]))
                .sum::<f64>())
            / total;
        let sigma = (mu_aff / mu).powi(3).clamp(0.0, 1.0);

        // Corrector.
        let rc: Vec<f64> = (0..rows)
            .map(|i| s[i] * z[i] + ds_a[i] * dz_a[i] - sigma * mu)
            .collect();
        let rcx: Vec<f64> = (0..n).map(|j| x[j] * zx[j] + dx_a[j] * dzx_a[j] - sigma * mu).collect();
        let (dx, ds, dz, dzx) = direction(&rc, &rcx);
        let ap = (0.99 * step_length(&s, &ds).min(step_length(&x, &dx))).min(1.0);
        let ad = (0.99 * step_length(&z, &dz).min(step_length(&zx, &dzx))).min(1.0);
        for j in 0..n {
            x[j] += ap * dx[j];
            zx[j] += ad * dzx[j];
        }
        for i in 0..rows {
            s[i] += ap * ds[i];
            z[i] += ad * dz[i];
        }
    }
    let ax = a.mul_vec(&x);
    let mut max_violation = 0.0f64;
    for i in 0..m {
        max_violation = max_violation.max(ax[i] - hi[i]).max(lo[i] - ax[i]);
    }
    for xj in &x {
        max_violation = max_violation.max(-xj);
    }
    LpSolution {
        objective: dot(c, &x),
        x,
        status,
        max_violation,
        iterations,
    }
}

/// Largest `a ∈ (0, 1/0.99]` keeping `v + a dv > 0`.
fn step_length(v: &[f64], dv: &[f64]) -> f64 {
    let mut a = 1.0 / 0.99;
    for (vi, di) in v.iter().zip(dv) {
        if *di < 0.0 {
            a = a.min(-vi / di);
        }
    }
    a
}

fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        l[j * n + j] = d;
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = v / d;
        }
    }
    Some(l)
}

fn chol_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut y = b.to_vec();
    for i in 0..n {
        let mut v = y[i];
        for k in 0..i {
            v -= l[i * n + k] * y[k];
        }
        y[i] = v / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut v = y[i];
        for k in i + 1..n {
            v -= l[k * n + i] * y[k];
        }
        y[i] = v / l[i * n + i];
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[&[f64]]) -> Matrix {
        let cols = rows[0].len();
        Matrix {
            rows: rows.len(),
            cols,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    #[test]
    fn small_lp() {
        // max x + y s.t. x + 2y ≤ 4, 3x + y ≤ 6  →  x = 8/5, y = 6/5
        let a = matrix(&[&[1.0, 2.0], &[3.0, 1.0]]);
        let sol = solve(&[-1.0, -1.0], &a, &[-100.0, -100.0], &[4.0, 6.0], LpOptions::default());
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(
            (sol.x[0] - 1.6).abs() < 1e-8 && (sol.x[1] - 1.2).abs() < 1e-8,
            "{sol:?}"
        );
    }

    #[test]
    fn l1_fit_with_box() {
        // min x1 + x2 s.t. |x1 - x2 - 1| ≤ 0.1, x ≥ 0  →  x = (0.9, 0)
        let a = matrix(&[&[1.0, -1.0]]);
        let sol = solve(&[1.0, 1.0], &a, &[0.9], &[1.1], LpOptions::default());
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective - 0.9).abs() < 1e-8, "{sol:?}");
    }
}
