//! Heat semigroup `P_t = exp(-tL)` and heat kernel `p_t(x, y) = (P_t)_{xy} / m(y)`.
//!
//! Two backends: a dense spectral decomposition (cached per space) and
//! uniformization, `exp(-tL) = sum_k Poisson(Λt; k) (I - L/Λ)^k`, which only
//! needs sparse products and is used for large spaces.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::mmspace::{Space, Vertex};

use super::generator_apply;

/// Largest space handed to the dense eigensolver.
pub const DENSE_BUDGET: usize = 3000;

/// Eigenpairs of the generator; `vectors` columns are m-orthonormal.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Spectrum {
    fn compute(space: &Space) -> Spectrum {
        let n = space.len();
        let m = space.measure();
        let mut s = DMatrix::<f64>::zeros(n, n);
        for e in space.edges() {
            let w = e.conductance;
            s[(e.u, e.u)] += w;
            s[(e.v, e.v)] += w;
            s[(e.u, e.v)] -= w;
            s[(e.v, e.u)] -= w;
        }
        let scale: Vec<f64> = m.iter().map(|v| v.sqrt().recip()).collect();
        for j in 0..n {
            for i in 0..n {
                s[(i, j)] *= scale[i] * scale[j];
            }
        }
        let eig = nalgebra::SymmetricEigen::new(s);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&k| eig.eigenvalues[k].max(0.0)).collect();
        let vectors = DMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])] * scale[i]);
        Spectrum { values, vectors }
    }

    /// `<f, φ_k>_m` for every k.
    pub fn coefficients(&self, space: &Space, f: &[f64]) -> Vec<f64> {
        let m = space.measure();
        let weighted = DVector::from_iterator(f.len(), f.iter().zip(m).map(|(a, b)| a * b));
        (self.vectors.transpose() * weighted).as_slice().to_vec()
    }

    pub fn spectral_gap(&self) -> f64 {
        self.values.get(1).copied().unwrap_or(0.0)
    }
}

/// Cached spectral decomposition of the generator of `space`.
pub fn spectrum(space: &Space) -> Result<&Spectrum> {
    if space.len() > DENSE_BUDGET {
        return Err(Error::Numerical(format!(
            "{} vertices exceed the dense eigensolver budget of {DENSE_BUDGET}",
            space.len()
        )));
    }
    Ok(space.spectrum_cell().get_or_init(|| Spectrum::compute(space)))
}

/// Dense heat kernel at time `t`.
#[derive(Clone, Debug)]
pub struct HeatKernel {
    pub t: f64,
    pub values: DMatrix<f64>,
}

impl HeatKernel {
    pub fn get(&self, x: Vertex, y: Vertex) -> f64 {
        self.values[(x, y)]
    }

    /// `sum_y p_t(x, y) m(y)`, which is 1 for a conservative semigroup.
    pub fn row_mass(&self, space: &Space, x: Vertex) -> f64 {
        space.measure().iter().enumerate().map(|(y, m)| self.values[(x, y)] * m).sum()
    }
}

pub fn heat_kernel(space: &Space, t: f64) -> Result<HeatKernel> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidTime(t));
    }
    let spec = spectrum(space)?;
    let weights = DVector::from_iterator(spec.values.len(), spec.values.iter().map(|l| (-l * t).exp()));
    let scaled = DMatrix::from_fn(space.len(), space.len(), |i, k| spec.vectors[(i, k)] * weights[k]);
    let values = &scaled * spec.vectors.transpose();
    Ok(HeatKernel { t, values })
}

/// `P_t f` by uniformization.
pub fn heat_semigroup(space: &Space, f: &[f64], t: f64) -> Result<Vec<f64>> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidTime(t));
    }
    let m = space.measure();
    let rate = (0..space.len())
        .map(|x| space.total_conductance(x) / m[x])
        .fold(0.0, f64::max);
    let lt = rate * t;
    // Poisson(lt) weights in log space so that large lt does not underflow.
    let last = (lt + 12.0 * lt.sqrt() + 40.0).ceil() as usize;
    let mut log_w = -lt;
    let mut term = f.to_vec();
    let mut out = vec![0.0; f.len()];
    let mut covered = 0.0;
    for k in 0..=last {
        if k > 0 {
            log_w += lt.ln() - (k as f64).ln();
            let lf = generator_apply(space, &term);
            for (a, b) in term.iter_mut().zip(&lf) {
                *a -= b / rate;
            }
        }
        let w = log_w.exp();
        covered += w;
        if w > 0.0 {
            for (o, a) in out.iter_mut().zip(&term) {
                *o += w * a;
            }
        }
    }
    if (1.0 - covered).abs() > 1e-12 {
        return Err(Error::Numerical(format!("Poisson series truncated with mass {covered}")));
    }
    Ok(out)
}

/// `y ↦ p_t(x, y)` by uniformization.
pub fn heat_column(space: &Space, x: Vertex, t: f64) -> Result<Vec<f64>> {
    let mut delta = vec![0.0; space.len()];
    delta[x] = 1.0;
    let mx = space.measure()[x];
    Ok(heat_semigroup(space, &delta, t)?.into_iter().map(|v| v / mx).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mmspace::{CatalogSpec, Edge};

    fn two_point() -> Space {
        Space::new(2, vec![Edge::unit(0, 1)], vec![1.0, 1.0]).unwrap()
    }

    #[test]
    fn two_point_closed_form() {
        let s = two_point();
        for t in [0.01, 0.5, 3.0] {
            let k = heat_kernel(&s, t).unwrap();
            let e = (-2.0 * t).exp();
            assert!((k.get(0, 0) - (1.0 + e) / 2.0).abs() < 1e-12);
            assert!((k.get(0, 1) - (1.0 - e) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn limits() {
        let s = Space::from_catalog(&CatalogSpec::path(5)).unwrap();
        let k = heat_kernel(&s, 1e-9).unwrap();
        assert!((k.get(2, 2) - 1.0).abs() < 1e-7 && k.get(2, 3).abs() < 1e-7);
        let k = heat_kernel(&s, 1e3).unwrap();
        assert!((k.get(0, 5) - 1.0 / 6.0).abs() < 1e-9);
    }

    #[test]
    fn invalid_time() {
        let s = two_point();
        assert!(matches!(heat_kernel(&s, 0.0), Err(Error::InvalidTime(_))));
        assert!(matches!(heat_semigroup(&s, &[1.0, 0.0], -1.0), Err(Error::InvalidTime(_))));
    }

    #[test]
    fn backends_agree_with_weighted_measure() {
        let spec = CatalogSpec::gasket(2);
        let base = Space::from_catalog(&spec).unwrap();
        let measure: Vec<f64> = (0..base.len()).map(|i| 1.0 + (i % 3) as f64).collect();
        let s = Space::new(base.len(), base.edges().to_vec(), measure).unwrap();
        let k = heat_kernel(&s, 2.5).unwrap();
        let col = heat_column(&s, 4, 2.5).unwrap();
        for y in 0..s.len() {
            assert!((k.get(4, y) - col[y]).abs() < 1e-12);
        }
        assert!((k.row_mass(&s, 4) - 1.0).abs() < 1e-12);
    }
}
