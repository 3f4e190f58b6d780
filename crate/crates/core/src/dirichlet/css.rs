//! Simplified cutoff Sobolev inequality with the capacitor potential of
//! `(B(x, R), B(x, A₁R)^c)` as the cutoff.
//!
//! Pass the reflected space (see `hke::reflected_space`) to test the
//! reflected form; its intrinsic metric defines the balls.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mmspace::{ScaleFunction, Space, Vertex, VertexSet};
use crate::report::{CheckRecord, CheckReport};

use super::capacity::capacity_and_potential;
use super::energy::energy_and_measure;
use super::FieldFunction;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CssResult {
    pub center: Vertex,
    pub radius: f64,
    pub a1: f64,
    /// Smallest `C₁` for which the inequality holds for every family member.
    pub c1: f64,
    pub capacity: f64,
    /// `B(x, A₁R)` is the whole space, so the cutoff is constant.
    pub degenerate: bool,
    /// Per-function `LHS / (E_B(f) + ∫_B f² dm / Ψ(R))`.
    pub ratios: Vec<f64>,
}

impl CssResult {
    pub fn record(&self) -> CheckRecord {
        CheckRecord::new("css.c1", self.c1, self.c1.is_finite())
            .param("x", self.center)
            .param_f("R", self.radius)
            .param_f("A1", self.a1)
            .param("family", self.ratios.len())
            .note(if self.degenerate { "degenerate: cutoff is constant" } else { "" })
    }
}

/// `0/0 = 0`, `c/0 = ∞`.
pub(crate) fn ratio(num: f64, den: f64) -> f64 {
    if num == 0.0 {
        0.0
    } else if den == 0.0 {
        f64::INFINITY
    } else {
        num / den
    }
}

pub fn css_check(
    space: &Space,
    x: Vertex,
    r: f64,
    a1: f64,
    psi: &ScaleFunction,
    family: &[FieldFunction],
) -> Result<CssResult> {
    if !(a1 > 1.0) {
        return Err(Error::InvalidInput(format!("A1 = {a1} must exceed 1")));
    }
    let n = space.len();
    let inner = space.ball(x, r)?.to_set(n);
    let outer_ball = space.ball(x, a1 * r)?;
    let outer = outer_ball.to_set(n);
    let degenerate = outer.len() == n;
    let (phi, capacity) = if degenerate {
        (vec![1.0; n], 0.0)
    } else {
        let c = capacity_and_potential(space, &inner, &outer)?;
        (c.potential.into_values(), c.capacity)
    };
    let gamma_phi = energy_and_measure(space, &phi, None)?.gamma;
    let scale = psi.psi(r);
    let m = space.measure();
    let mut ratios = Vec::with_capacity(family.len());
    for f in family {
        if f.len() != n || !f.defined_on(&VertexSet::all(n)) {
            return Err(Error::InvalidFunction("cutoff Sobolev test functions must be defined everywhere".into()));
        }
        let gamma_f = energy_and_measure(space, f, None)?.gamma;
        let (mut lhs, mut ef, mut mf) = (0.0, 0.0, 0.0);
        for &y in &outer_ball.members {
            lhs += f[y] * f[y] * gamma_phi[y];
            ef += gamma_f[y];
            mf += f[y] * f[y] * m[y];
        }
        ratios.push(ratio(lhs, ef + mf / scale));
    }
    let c1 = ratios.iter().copied().fold(0.0, f64::max);
    Ok(CssResult { center: x, radius: r, a1, c1, capacity, degenerate, ratios })
}

pub fn css_report(results: &[CssResult]) -> CheckReport {
    results.iter().map(CssResult::record).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mmspace::CatalogSpec;

    #[test]
    fn constant_function_needs_capacity_ratio() {
        let s = Space::from_catalog(&CatalogSpec::grid(21, 21)).unwrap();
        let x = 10 * 21 + 10;
        let psi = ScaleFunction::diffusive();
        let res = css_check(&s, x, 4.0, 2.0, &psi, &[FieldFunction::constant(s.len(), 3.0)]).unwrap();
        let outer = s.ball(x, 8.0).unwrap();
        // Γ(φ)(B(x, 8)) lies between cap/2 (only the rim edges leak, by half) and cap.
        let full = 9.0 * res.capacity / (9.0 * s.mass(outer.members) / 16.0);
        assert!(res.c1 <= full * (1.0 + 1e-12) && res.c1 >= 0.5 * full);
        assert!(!res.degenerate);
    }

    #[test]
    fn whole_space_ball_is_degenerate() {
        let s = Space::from_catalog(&CatalogSpec::path(4)).unwrap();
        let f = FieldFunction::from_fn(5, |i| i as f64);
        let res = css_check(&s, 2, 2.0, 3.0, &ScaleFunction::diffusive(), &[f]).unwrap();
        assert!(res.degenerate && res.c1 == 0.0 && res.record().pass);
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(ratio(0.0, 0.0), 0.0);
        assert_eq!(ratio(1.0, 0.0), f64::INFINITY);
        assert_eq!(ratio(1.0, 4.0), 0.25);
    }
}
