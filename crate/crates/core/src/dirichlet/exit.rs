use crate::error::{Error, Result};
use crate::linalg::dirichlet_solve;
use crate::mmspace::{Space, VertexSet};

use super::FieldFunction;

/// Expected exit time from `b` of the continuous-time walk generated by `L`:
/// `Lu = 1` on `b`, `u = 0` off `b`.
pub fn mean_exit_time(space: &Space, b: &VertexSet) -> Result<FieldFunction> {
    if b.is_empty() {
        return Err(Error::InvalidInput("exit region is empty".into()));
    }
    if b.len() == space.len() {
        return Err(Error::NoExit);
    }
    let fixed = vec![0.0; space.len()];
    let u = dirichlet_solve(space, b, &fixed, space.measure())?;
    FieldFunction::new(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mmspace::{CatalogSpec, Weights};

    #[test]
    fn single_vertex_holding_time() {
        let s = Space::from_catalog(&CatalogSpec::grid(3, 3)).unwrap();
        let u = mean_exit_time(&s, &VertexSet::new(9, [4])).unwrap();
        assert_eq!(u[4], 0.25);
    }

    #[test]
    fn path_center_unit_rate() {
        // With m = 2 the walk jumps at unit total rate, the discrete analogue of
        // Brownian motion with generator f''/2 on unit steps.
        let w = Weights { measure: 2.0, ..Weights::default() };
        let s = Space::from_catalog(&CatalogSpec::path(40).with_weights(w)).unwrap();
        for r in [3usize, 7, 12] {
            let ball = s.ball(20, r as f64).unwrap().to_set(s.len());
            let u = mean_exit_time(&s, &ball).unwrap();
            assert!((u[20] - (r * r) as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn whole_space_has_no_exit() {
        let s = Space::from_catalog(&CatalogSpec::path(3)).unwrap();
        assert!(matches!(mean_exit_time(&s, &VertexSet::all(4)), Err(Error::NoExit)));
    }
}
