use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::max_eigenvalue;
use crate::mmspace::{Ball, ScaleFunction, Space, VertexSet};

/// `sup_f sum_{variance} m (f - f̄)^2 / E_{energy}(f, f)` over nonconstant `f`
/// on `energy`, where `E_{energy}` uses only edges inside `energy`.
///
/// Components of `energy` that miss `variance` cannot change the quotient
/// (take `f` constant there) and are dropped; if `variance` meets two
/// components the supremum is infinite.
///
/// Adding `α 11ᵀ` to the induced Laplacian `L` changes neither quotient on
/// mean-zero `f` and only increases the denominator otherwise, so the supremum
/// is the top eigenvalue of `Rᵀ G R` with `R Rᵀ = S (L + α 11ᵀ)^{-1} Sᵀ`,
/// `S` the restriction to `variance` and `G` the centered covariance form.
pub fn poincare_sup(space: &Space, variance: &VertexSet, energy: &VertexSet) -> Result<f64> {
    if variance.is_empty() {
        return Err(Error::InvalidInput("variance set is empty".into()));
    }
    if !variance.is_subset(energy) {
        return Err(Error::InvalidInput("variance set must lie inside the energy set".into()));
    }
    let energy = &relevant_component(space, variance, energy)?;
    if variance.len() == 1 {
        return Ok(0.0);
    }
    let ne = energy.len();
    let mut local = vec![usize::MAX; space.len()];
    for (i, v) in energy.iter().enumerate() {
        local[v] = i;
    }
    let mut lap = DMatrix::zeros(ne, ne);
    for e in space.edges() {
        if energy.contains(e.u) && energy.contains(e.v) {
            let (i, j, w) = (local[e.u], local[e.v], e.conductance);
            lap[(i, i)] += w;
            lap[(j, j)] += w;
            lap[(i, j)] -= w;
            lap[(j, i)] -= w;
        }
    }
    let alpha = lap.trace() / (ne * ne) as f64;
    lap.add_scalar_mut(alpha);
    let chol = lap.cholesky().ok_or_else(|| Error::Numerical("energy form is singular".into()))?;
    let nb = variance.len();
    let mut sel = DMatrix::zeros(ne, nb);
    for (c, v) in variance.iter().enumerate() {
        sel[(local[v], c)] = 1.0;
    }
    let solved = chol.solve(&sel);
    let p = sel.transpose() * solved;
    let p = (&p + p.transpose()) * 0.5;
    let r = p
        .cholesky()
        .ok_or_else(|| Error::Numerical("restricted Green matrix is not positive definite".into()))?
        .l();
    let mb: Vec<f64> = variance.iter().map(|v| space.measure()[v]).collect();
    let mass: f64 = mb.iter().sum();
    let g = DMatrix::from_fn(nb, nb, |i, j| if i == j { mb[i] } else { 0.0 } - mb[i] * mb[j] / mass);
    let top = r.transpose() * g * &r;
    Ok(max_eigenvalue((&top + top.transpose()) * 0.5))
}

/// The component of `energy` containing `variance`.
fn relevant_component(space: &Space, variance: &VertexSet, energy: &VertexSet) -> Result<VertexSet> {
    let start = variance.as_slice()[0];
    let mut seen = vec![false; space.len()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(x) = stack.pop() {
        for &(y, _) in space.neighbors(x) {
            if energy.contains(y) && !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    if variance.iter().any(|v| !seen[v]) {
        return Err(Error::DisconnectedEnergyBall);
    }
    Ok(VertexSet::from_mask(seen))
}

/// Poincaré constant `sup Var_{B}(f) / (Ψ(r) E_{B'}(f, f))`, `r` the variance radius.
pub fn poincare_constant(space: &Space, variance: &Ball, energy: &Ball, psi: &ScaleFunction) -> Result<f64> {
    let n = space.len();
    let sup = poincare_sup(space, &variance.to_set(n), &energy.to_set(n))?;
    Ok(sup / psi.psi(variance.radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::heat::spectrum;
    use crate::mmspace::{CatalogSpec, Edge};

    #[test]
    fn two_point() {
        let s = Space::new(2, vec![Edge::unit(0, 1)], vec![1.0; 2]).unwrap();
        let all = VertexSet::all(2);
        assert!((poincare_sup(&s, &all, &all).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn path_inverse_gap() {
        let s = Space::from_catalog(&CatalogSpec::path(12)).unwrap();
        let all = VertexSet::all(s.len());
        let gap = spectrum(&s).unwrap().spectral_gap();
        assert!((poincare_sup(&s, &all, &all).unwrap() * gap - 1.0).abs() < 1e-10);
    }

    #[test]
    fn disconnected_energy_set() {
        let s = Space::from_catalog(&CatalogSpec::path(4)).unwrap();
        let e = VertexSet::new(5, [0, 1, 3, 4]);
        let v = VertexSet::new(5, [0, 1, 3]);
        assert!(matches!(poincare_sup(&s, &v, &e), Err(Error::DisconnectedEnergyBall)));
        // A component missing the variance set is irrelevant.
        let v = VertexSet::new(5, [0, 1]);
        assert!((poincare_sup(&s, &v, &e).unwrap() - 0.5).abs() < 1e-14);
    }
}
