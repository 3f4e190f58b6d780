//! Test-function families: constants, coordinates, capacitor potentials and
//! seeded random smooth fields.
//!
//! Fields are evaluated in normalized coordinates (the bounding box scaled to
//! unit extent) so the same seed gives the same continuum function at every
//! refinement level.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dirichlet::{capacity_and_potential, FieldFunction};
use crate::domains::DomainDecomposition;
use crate::error::{Error, Result};
use crate::mmspace::{Space, Vertex};

/// Named family member.
pub type Member = (String, FieldFunction);

/// Coordinates scaled so the longer side of the bounding box is 1, with the
/// lower-left corner at the origin. Also returns the scale (graph length of
/// one normalized unit).
pub fn normalized_coords(space: &Space) -> Result<(Vec<[f64; 2]>, f64)> {
    let coords = space.coords().ok_or_else(|| Error::InvalidInput("space has no coordinates".into()))?;
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in coords {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let extent = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    if !(extent > 0.0) {
        return Err(Error::InvalidInput("coordinates are degenerate".into()));
    }
    Ok((coords.iter().map(|p| [(p[0] - lo[0]) / extent, (p[1] - lo[1]) / extent]).collect(), extent))
}

/// A random trigonometric polynomial with three low-frequency modes.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothField {
    pub offset: f64,
    /// `(wave vector, amplitude, phase)`.
    pub modes: Vec<([f64; 2], f64, f64)>,
}

impl SmoothField {
    pub fn sample(rng: &mut ChaCha8Rng) -> Self {
        let offset = rng.random_range(-0.5..0.5);
        let modes = (0..3)
            .map(|_| {
                let w = loop {
                    let w = [rng.random_range(-2i32..=2) as f64, rng.random_range(-2i32..=2) as f64];
                    if w != [0.0, 0.0] {
                        break w;
                    }
                };
                (w, rng.random_range(-1.0..1.0), rng.random_range(0.0..TAU))
            })
            .collect();
        SmoothField { offset, modes }
    }

    pub fn eval(&self, p: [f64; 2]) -> f64 {
        self.offset
            + self
                .modes
                .iter()
                .map(|&(w, a, phase)| a * (TAU * (w[0] * p[0] + w[1] * p[1]) / 2.0 + phase).sin())
                .sum::<f64>()
    }

    /// Lipschitz constant in normalized coordinates.
    pub fn lipschitz(&self) -> f64 {
        self.modes.iter().map(|&(w, a, _)| a.abs() * TAU / 2.0 * w[0].hypot(w[1])).sum()
    }
}

/// `count` seeded random smooth fields, named `smooth_<k>`.
pub fn smooth_fields(space: &Space, count: usize, seed: u64) -> Result<Vec<Member>> {
    let (p, _) = normalized_coords(space)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count)
        .map(|k| {
            let field = SmoothField::sample(&mut rng);
            (format!("smooth_{k}"), FieldFunction::from_fn(space.len(), |v| field.eval(p[v])))
        })
        .collect())
}

pub fn coordinate_functions(space: &Space) -> Result<Vec<Member>> {
    let (p, _) = normalized_coords(space)?;
    Ok(vec![
        ("coord_x".into(), FieldFunction::from_fn(space.len(), |v| p[v][0])),
        ("coord_y".into(), FieldFunction::from_fn(space.len(), |v| p[v][1])),
    ])
}

/// Potential of `(B(x, r), B(x, 2r)^c)`.
pub fn capacitor_function(space: &Space, x: Vertex, r: f64) -> Result<FieldFunction> {
    let n = space.len();
    let inner = space.ball(x, r)?.to_set(n);
    let outer = space.ball(x, 2.0 * r)?.to_set(n);
    if outer.len() == n {
        return Ok(FieldFunction::constant(n, 1.0));
    }
    Ok(capacity_and_potential(space, &inner, &outer)?.potential)
}

/// Evenly spaced boundary vertices (by index), `count` of them.
pub fn boundary_sample(dom: &DomainDecomposition, count: usize) -> Vec<Vertex> {
    let b = dom.boundary.as_slice();
    if b.is_empty() || count == 0 {
        return Vec::new();
    }
    let mut out: Vec<Vertex> = (0..count).map(|k| b[(2 * k + 1) * b.len() / (2 * count)]).collect();
    out.dedup();
    out
}

/// Mixed family of `size` members: two constants, the coordinates, two
/// capacitor potentials centred on `∂U` (normalized radius 0.15), and random
/// smooth fields for the rest.
pub fn standard_family(space: &Space, dom: &DomainDecomposition, size: usize, seed: u64) -> Result<Vec<Member>> {
    let n = space.len();
    let (_, extent) = normalized_coords(space)?;
    let mut out = vec![
        ("const_1".to_string(), FieldFunction::constant(n, 1.0)),
        ("const_-2".to_string(), FieldFunction::constant(n, -2.0)),
    ];
    out.extend(coordinate_functions(space)?);
    for (k, x) in boundary_sample(dom, 2).into_iter().enumerate() {
        out.push((format!("capacitor_{k}"), capacitor_function(space, x, 0.15 * extent)?));
    }
    let rest = size.saturating_sub(out.len());
    out.extend(smooth_fields(space, rest, seed)?);
    out.truncate(size);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::DomainSpec;
    use crate::mmspace::CatalogSpec;

    #[test]
    fn fields_agree_across_refinement() {
        let coarse = Space::from_catalog(&CatalogSpec::grid(9, 9)).unwrap();
        let fine = Space::from_catalog(&CatalogSpec::grid(17, 17)).unwrap();
        let a = smooth_fields(&coarse, 4, 7).unwrap();
        let b = smooth_fields(&fine, 4, 7).unwrap();
        // Coarse (i, j) sits at fine (2i, 2j).
        for k in 0..4 {
            for (i, j) in [(0, 0), (3, 5), (8, 8)] {
                assert!((a[k].1[j * 9 + i] - b[k].1[2 * j * 17 + 2 * i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn family_composition() {
        let spec = CatalogSpec::grid(17, 17);
        let s = Space::from_catalog(&spec).unwrap();
        let d = DomainSpec::HalfGrid.build(&spec, &s).unwrap();
        let fam = standard_family(&s, &d, 25, 1).unwrap();
        assert_eq!(fam.len(), 25);
        assert_eq!(fam[0].0, "const_1");
        assert!(fam[4].1.iter().all(|v| (0.0..=1.0).contains(v)));
        assert!(fam.iter().all(|(_, f)| f.iter().all(|v| v.is_finite())));
    }

    #[test]
    fn boundary_sample_is_spread() {
        let spec = CatalogSpec::grid(17, 17);
        let s = Space::from_catalog(&spec).unwrap();
        let d = DomainSpec::HalfGrid.build(&spec, &s).unwrap();
        assert_eq!(boundary_sample(&d, 2), vec![8 * 17 + 4, 8 * 17 + 12]);
    }
}
