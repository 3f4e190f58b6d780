use crate::mmspace::{ScaleFunction, Space, VertexSet};

/// `W(f, r) = Ψ(r)^{-1} sum_x m(x) m(B(x,r))^{-1} sum_{y ∈ B(x,r)} m(y) (f(x) - f(y))^2`.
///
/// The outer sum runs over `outer` when given.
pub fn besov_functional(space: &Space, f: &[f64], r: f64, psi: &ScaleFunction, outer: Option<&VertexSet>) -> f64 {
    let m = space.measure();
    let mut total = 0.0;
    for x in 0..space.len() {
        if outer.is_some_and(|o| !o.contains(x)) {
            continue;
        }
        let row = space.distance_row(x);
        let (mut mass, mut acc) = (0.0, 0.0);
        for y in 0..space.len() {
            if row[y] < r {
                mass += m[y];
                acc += m[y] * (f[x] - f[y]).powi(2);
            }
        }
        total += m[x] * acc / mass;
    }
    total / psi.psi(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mmspace::Edge;

    #[test]
    fn two_point_value() {
        let s = Space::new(2, vec![Edge::unit(0, 1)], vec![1.0; 2]).unwrap();
        let w = besov_functional(&s, &[0.0, 1.0], 2.0, &ScaleFunction::diffusive(), None);
        assert!((w - 0.25).abs() < 1e-15);
        assert_eq!(besov_functional(&s, &[2.0, 2.0], 2.0, &ScaleFunction::diffusive(), None), 0.0);
    }
}
