//! Small linear-algebra layer: sparse SPD systems and graph Dirichlet problems.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mmspace::{Space, VertexSet};

/// Systems up to this size are factored densely.
const DENSE_LIMIT: usize = 700;

/// Symmetric matrix stored as diagonal plus off-diagonal rows.
#[derive(Clone, Debug)]
pub struct SparseSym {
    pub diag: Vec<f64>,
    pub off: Vec<Vec<(usize, f64)>>,
}

impl SparseSym {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for i in 0..self.len() {
            let mut acc = self.diag[i] * x[i];
            for &(j, a) in &self.off[i] {
                acc += a * x[j];
            }
            y[i] = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            for &(j, a) in &self.off[i] {
                m[(i, j)] += a;
            }
        }
        m
    }
}

/// Solves `A x = b` for symmetric positive definite `A`.
pub fn solve_spd(a: &SparseSym, b: &[f64]) -> Result<Vec<f64>> {
    if a.is_empty() {
        return Ok(Vec::new());
    }
    if a.len() <= DENSE_LIMIT {
        let chol = a
            .to_dense()
            .cholesky()
            .ok_or_else(|| Error::Numerical("matrix is not positive definite".into()))?;
        Ok(chol.solve(&DVector::from_column_slice(b)).as_slice().to_vec())
    } else {
        conjugate_gradient(a, b, 1e-14)
    }
}

/// Jacobi-preconditioned conjugate gradients.
pub fn conjugate_gradient(a: &SparseSym, b: &[f64], rel_tol: f64) -> Result<Vec<f64>> {
    let n = a.len();
    let norm_b = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = vec![0.0; n];
    if norm_b == 0.0 {
        return Ok(x);
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&a.diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let max_iter = 20 * n + 100;
    let mut best = f64::INFINITY;
    for _ in 0..max_iter {
        a.apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        if pap <= 0.0 {
            return Err(Error::Numerical("matrix is not positive definite".into()));
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let res = r.iter().map(|v| v * v).sum::<f64>().sqrt() / norm_b;
        best = best.min(res);
        if res <= rel_tol {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] / a.diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    // Rounding can stall the residual a little above the target.
    if best <= 1e-10 {
        Ok(x)
    } else {
        Err(Error::Numerical(format!("conjugate gradients stalled at relative residual {best:e}")))
    }
}

/// Solves `sum_y w_xy (u(x) - u(y)) = rhs(x)` for `x ∈ unknown`, with
/// `u = fixed` off `unknown`. Returns `u` on all vertices.
pub fn dirichlet_solve(space: &Space, unknown: &VertexSet, fixed: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = space.len();
    let mut index = vec![usize::MAX; n];
    for (i, v) in unknown.iter().enumerate() {
        index[v] = i;
    }
    let mut diag = Vec::with_capacity(unknown.len());
    let mut off = Vec::with_capacity(unknown.len());
    let mut b = Vec::with_capacity(unknown.len());
    let mut grounded = false;
    for x in unknown.iter() {
        let mut d = 0.0;
        let mut row = Vec::new();
        let mut bx = rhs[x];
        for &(y, k) in space.neighbors(x) {
            let w = space.edges()[k].conductance;
            d += w;
            if unknown.contains(y) {
                row.push((index[y], -w));
            } else {
                bx += w * fixed[y];
                grounded = true;
            }
        }
        diag.push(d);
        off.push(row);
        b.push(bx);
    }
    if !unknown.is_empty() && !grounded {
        return Err(Error::Numerical("Dirichlet problem has no boundary".into()));
    }
    let sol = solve_spd(&SparseSym { diag, off }, &b)?;
    let mut u = fixed.to_vec();
    for (i, v) in unknown.iter().enumerate() {
        u[v] = sol[i];
    }
    Ok(u)
}

/// Largest eigenvalue of a symmetric dense matrix.
pub fn max_eigenvalue(m: DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.symmetric_eigenvalues().iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// Ordinary least squares slope, intercept and `R^2` of `y` against `x`.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> SparseSym {
        let diag = vec![2.0; n];
        let off = (0..n)
            .map(|i| {
                let mut r = Vec::new();
                if i > 0 {
                    r.push((i - 1, -1.0));
                }
                if i + 1 < n {
                    r.push((i + 1, -1.0));
                }
                r
            })
            .collect();
        SparseSym { diag, off }
    }

    #[test]
    fn dense_and_cg_agree() {
        let a = laplacian_1d(50);
        let b: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let x1 = solve_spd(&a, &b).unwrap();
        let x2 = conjugate_gradient(&a, &b, 1e-14).unwrap();
        for (p, q) in x1.iter().zip(&x2) {
            assert!((p - q).abs() < 1e-9);
        }
    }

    #[test]
    fn least_squares_exact_line() {
        let (s, c, r2) = least_squares(&[1.0, 2.0, 3.0], &[3.0, 5.0, 7.0]);
        assert!((s - 2.0).abs() < 1e-14 && (c - 1.0).abs() < 1e-14 && (r2 - 1.0).abs() < 1e-14);
    }
}
