use crate::error::{Error, Result};
use crate::mmspace::{Space, Vertex, VertexSet};

/// Energy measure of `f` as vertex masses `gamma(x) = 1/2 sum_y w_xy (f(x) - f(y))^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyMeasure {
    pub gamma: Vec<f64>,
    pub total: f64,
}

impl EnergyMeasure {
    /// `Γ(f, f)(A)`.
    pub fn of_set(&self, set: impl IntoIterator<Item = Vertex>) -> f64 {
        set.into_iter().map(|v| self.gamma[v]).sum()
    }
}

/// Energy and energy measure. With `restrict`, only edges with both ends in
/// the set count, which gives the reflected form on that set.
pub fn energy_and_measure(space: &Space, f: &[f64], restrict: Option<&VertexSet>) -> Result<EnergyMeasure> {
    if f.len() != space.len() {
        return Err(Error::InvalidFunction(format!("{} values for {} vertices", f.len(), space.len())));
    }
    let mut gamma = vec![0.0; space.len()];
    let mut total = 0.0;
    for e in space.edges() {
        if restrict.is_some_and(|s| !s.contains(e.u) || !s.contains(e.v)) {
            continue;
        }
        let d = f[e.u] - f[e.v];
        if !d.is_finite() {
            return Err(Error::InvalidFunction(format!("undefined on edge ({}, {})", e.u, e.v)));
        }
        let c = e.conductance * d * d;
        gamma[e.u] += 0.5 * c;
        gamma[e.v] += 0.5 * c;
        total += c;
    }
    Ok(EnergyMeasure { gamma, total })
}

/// `E(f, f)` over all edges.
pub fn energy(space: &Space, f: &[f64]) -> f64 {
    space.edges().iter().map(|e| e.conductance * (f[e.u] - f[e.v]).powi(2)).sum()
}

/// Energy over edges with both endpoints in `set`.
pub fn energy_within(space: &Space, f: &[f64], set: &VertexSet) -> f64 {
    space
        .edges()
        .iter()
        .filter(|e| set.contains(e.u) && set.contains(e.v))
        .map(|e| e.conductance * (f[e.u] - f[e.v]).powi(2))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mmspace::CatalogSpec;

    #[test]
    fn path_linear() {
        let s = Space::from_catalog(&CatalogSpec::path(3)).unwrap();
        let em = energy_and_measure(&s, &[0.0, 1.0, 2.0, 3.0], None).unwrap();
        assert_eq!(em.total, 3.0);
        assert_eq!(em.gamma, vec![0.5, 1.0, 1.0, 0.5]);
    }

    #[test]
    fn constant_has_no_energy() {
        let s = Space::from_catalog(&CatalogSpec::gasket(2)).unwrap();
        let em = energy_and_measure(&s, &vec![3.0; s.len()], None).unwrap();
        assert_eq!(em.total, 0.0);
        assert!(em.gamma.iter().all(|g| *g == 0.0));
    }

    #[test]
    fn undefined_endpoint_rejected() {
        let s = Space::from_catalog(&CatalogSpec::path(2)).unwrap();
        let f = [0.0, f64::NAN, 1.0];
        assert!(matches!(energy_and_measure(&s, &f, None), Err(Error::InvalidFunction(_))));
        let set = VertexSet::new(3, [0]);
        assert_eq!(energy_and_measure(&s, &f, Some(&set)).unwrap().total, 0.0);
    }
}
