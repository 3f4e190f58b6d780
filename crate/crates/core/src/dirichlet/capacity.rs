use crate::error::{Error, Result};
use crate::linalg::dirichlet_solve;
use crate::mmspace::{Space, VertexSet};

use super::energy::energy;
use super::FieldFunction;

/// Equilibrium potential of the condenser `(B1, X ∖ shell)`.
#[derive(Clone, Debug)]
pub struct Capacitor {
    pub capacity: f64,
    pub potential: FieldFunction,
}

/// Solves for `u = 1` on `b1`, `u = 0` off `shell`, harmonic in between;
/// the capacity is `E(u, u)`.
pub fn capacity_and_potential(space: &Space, b1: &VertexSet, shell: &VertexSet) -> Result<Capacitor> {
    if b1.is_empty() {
        return Err(Error::InvalidInput("capacitor plate is empty".into()));
    }
    if !b1.is_subset(shell) {
        return Err(Error::InvalidInput("capacitor plate must lie inside the shell".into()));
    }
    let fixed: Vec<f64> = (0..space.len()).map(|v| if b1.contains(v) { 1.0 } else { 0.0 }).collect();
    let unknown = shell.difference(b1);
    let rhs = vec![0.0; space.len()];
    let mut u = dirichlet_solve(space, &unknown, &fixed, &rhs)?;
    // The maximum principle holds exactly; clamp rounding.
    for v in unknown.iter() {
        u[v] = u[v].clamp(0.0, 1.0);
    }
    let capacity = energy(space, &u);
    Ok(Capacitor { capacity, potential: FieldFunction::new(u)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mmspace::CatalogSpec;

    #[test]
    fn series_circuit() {
        let n = 8;
        let s = Space::from_catalog(&CatalogSpec::path(n)).unwrap();
        let c = capacity_and_potential(&s, &VertexSet::new(9, [0]), &VertexSet::new(9, 0..8)).unwrap();
        assert!((c.capacity - 1.0 / n as f64).abs() < 1e-12);
        for i in 0..=8 {
            assert!((c.potential[i] - (1.0 - i as f64 / 8.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn plate_equals_shell() {
        let s = Space::from_catalog(&CatalogSpec::path(4)).unwrap();
        let set = VertexSet::new(5, [1, 2]);
        let c = capacity_and_potential(&s, &set, &set).unwrap();
        assert_eq!(c.capacity, 2.0);
    }

    #[test]
    fn empty_plate_rejected() {
        let s = Space::from_catalog(&CatalogSpec::path(4)).unwrap();
        let r = capacity_and_potential(&s, &VertexSet::empty(5), &VertexSet::all(5));
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }
}
