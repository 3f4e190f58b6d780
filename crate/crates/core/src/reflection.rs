//! The reflection map `Q` sending small exterior Whitney balls to interior
//! Whitney balls of comparable size at comparable distance.

use serde::{Deserialize, Serialize};

use crate::domains::{find_uniform_curve, DomainDecomposition};
use crate::error::{Error, Result};
use crate::mmspace::{Space, Vertex};
use crate::report::{CheckRecord, CheckReport};
use crate::whitney::{whitney_graph, Side, WhitneyCover, WhitneyGraph};

const REL_TOL: f64 = 1e-12;

/// Radius window `((1+ε)/(1+4ε) s, (1+ε)/(1-2ε) s)` for `Q(B)`.
pub fn prefa_window(eps: f64, s: f64) -> (f64, f64) {
    ((1.0 + eps) / (1.0 + 4.0 * eps) * s, (1.0 + eps) / (1.0 - 2.0 * eps) * s)
}

/// Distance bound `d(x, y) <= (2 + 3A/2)(1+ε)/ε s`.
pub fn prefa_distance(eps: f64, a: f64, s: f64) -> f64 {
    (2.0 + 1.5 * a) * (1.0 + eps) / eps * s
}

/// Window for `r_1 / r_2` when the exterior 6-dilates meet.
pub fn rcomp_window(eps: f64) -> (f64, f64) {
    let q = (1.0 - 2.0 * eps) * (1.0 - 5.0 * eps) / ((1.0 + 4.0 * eps) * (1.0 + 7.0 * eps));
    (q, 1.0 / q)
}

/// Exterior balls meeting a boundary ball of radius `r` have `s < ε/(1-5ε) r`.
pub fn srbnd_factor(eps: f64) -> f64 {
    eps / (1.0 - 5.0 * eps)
}

/// `K_0 = (2 + 3A/2)(1+ε)/(1-5ε) + 6ε/(1-5ε) + 1`.
pub fn k0(eps: f64, a: f64) -> f64 {
    (2.0 + 1.5 * a) * (1.0 + eps) / (1.0 - 5.0 * eps) + 6.0 * eps / (1.0 - 5.0 * eps) + 1.0
}

/// Truncation radius: exterior balls with `s` below this are reflected.
pub fn truncation_radius(eps: f64, a: f64, diam_u: f64) -> f64 {
    eps / (6.0 * a * (1.0 + eps)) * diam_u
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub s_index: usize,
    pub z: Vertex,
    pub z1: Vertex,
    pub z2: Vertex,
    pub z3: Vertex,
    pub curve_a: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReflectionMap {
    pub epsilon: f64,
    pub a: f64,
    /// `(exterior index, interior index)` sorted by exterior index.
    pub pairs: Vec<(usize, usize)>,
    pub witnesses: Vec<Witness>,
    /// Balls of the truncated family that could not be reflected at this mesh.
    pub excluded: Vec<(usize, String)>,
    pub truncation: f64,
}

impl ReflectionMap {
    pub fn image(&self, s_index: usize) -> Option<usize> {
        self.pairs.binary_search_by_key(&s_index, |p| p.0).ok().map(|k| self.pairs[k].1)
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `max_B #Q^{-1}(B)`.
    pub fn k_to_1(&self, interior_len: usize) -> usize {
        let mut count = vec![0usize; interior_len];
        for &(_, r) in &self.pairs {
            count[r] += 1;
        }
        count.into_iter().max().unwrap_or(0)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Reflects every exterior ball below the truncation radius.
///
/// For `B_V(y, s)`: `z ∈ ∂V` nearest to `y`; `z_1` the nearest vertex of `U`
/// to `z`; `z_2 ∈ U` with `d(z, z_2) >= 5A/2 δ_V(y)` and deepest in `U` (or the
/// farthest vertex of `U` when none is that far); `z_3` the first vertex on a
/// uniform curve `z_1 → z_2` with `δ_U(z_3) >= δ_V(y)`; `Q(B)` a Whitney ball
/// whose 3-dilate contains `z_3`.
pub fn build_reflection(
    space: &Space,
    dom: &DomainDecomposition,
    cover_r: &WhitneyCover,
    cover_s: &WhitneyCover,
    a: f64,
) -> Result<ReflectionMap> {
    let eps = cover_r.epsilon;
    if cover_r.side != Side::Interior || cover_s.side != Side::Exterior {
        return Err(Error::InvalidInput("reflection needs an interior and an exterior cover".into()));
    }
    if (cover_s.epsilon - eps).abs() > 0.0 {
        return Err(Error::InvalidInput("interior and exterior covers must share epsilon".into()));
    }
    if !(eps > 0.0 && eps < 0.2) {
        return Err(Error::InvalidEpsilon { value: eps, range: "(0, 1/5)" });
    }
    let diam_u = dom.diameter_u(space);
    let truncation = truncation_radius(eps, a, diam_u);
    let mut refl = ReflectionMap { epsilon: eps, a, pairs: Vec::new(), witnesses: Vec::new(), excluded: Vec::new(), truncation };
    if dom.v.is_empty() {
        return Ok(refl);
    }
    let dv = dom.exterior_boundary(space);
    let u_list: Vec<Vertex> = dom.u.iter().collect();
    for (si, b) in cover_s.balls.iter().enumerate() {
        if b.radius >= truncation {
            continue;
        }
        let y = b.center;
        let t = dom.delta_v[y];
        let row_y = space.distance_row(y);
        let z = dv
            .iter()
            .min_by(|&p, &q| row_y[p].total_cmp(&row_y[q]).then(p.cmp(&q)))
            .ok_or_else(|| Error::Internal("V has no boundary".into()))?;
        let row_z = space.distance_row(z);
        let nearest = |it: &mut dyn Iterator<Item = Vertex>| {
            it.min_by(|&p, &q| row_z[p].total_cmp(&row_z[q]).then(p.cmp(&q)))
        };
        let z1 = nearest(&mut u_list.iter().copied()).unwrap();
        let far = 2.5 * a * t;
        let z2 = u_list
            .iter()
            .copied()
            .filter(|&p| row_z[p] >= far)
            .max_by(|&p, &q| dom.delta_u[p].total_cmp(&dom.delta_u[q]).then(q.cmp(&p)))
            .unwrap_or_else(|| {
                u_list
                    .iter()
                    .copied()
                    .max_by(|&p, &q| row_z[p].total_cmp(&row_z[q]).then(q.cmp(&p)))
                    .unwrap()
            });
        let curve = find_uniform_curve(space, dom, z1, z2, a)?;
        let Some(z3) = curve.path.iter().copied().find(|&p| dom.delta_u[p] >= t * (1.0 - REL_TOL)) else {
            refl.excluded.push((si, format!("no curve vertex reaches δ_U >= {t}")));
            continue;
        };
        let (lo, hi) = prefa_window(eps, b.radius);
        let holders: Vec<usize> = (0..cover_r.len())
            .filter(|&i| cover_r.balls[i].dilate3.binary_search(&z3).is_ok())
            .collect();
        let Some(&first) = holders.first() else {
            return Err(Error::CoverDefect(z3));
        };
        let ri = |i: usize| cover_r.balls[i].radius;
        let target = holders.iter().copied().find(|&i| ri(i) > lo && ri(i) < hi).unwrap_or(first);
        refl.pairs.push((si, target));
        refl.witnesses.push(Witness { s_index: si, z, z1, z2, z3, curve_a: curve.measured_a });
    }
    Ok(refl)
}

/// Checks of the reflection map; boundary samples `(ξ, r)` drive the
/// localization checks.
pub fn validate_reflection(
    space: &Space,
    dom: &DomainDecomposition,
    refl: &ReflectionMap,
    cover_s: &WhitneyCover,
    cover_r: &WhitneyCover,
    samples: &[(Vertex, f64)],
) -> CheckReport {
    let (eps, a) = (refl.epsilon, refl.a);
    let mut report = CheckReport::new();
    let tag = |r: CheckRecord| r.param_f("epsilon", eps).param_f("A", a);

    let (mut bad_r, mut bad_d) = (0usize, 0usize);
    let (mut min_q, mut max_q, mut max_dq) = (f64::INFINITY, 0.0f64, 0.0f64);
    for &(si, ri) in &refl.pairs {
        let (sb, rb) = (&cover_s.balls[si], &cover_r.balls[ri]);
        let (lo, hi) = prefa_window(eps, sb.radius);
        let q = rb.radius / sb.radius;
        min_q = min_q.min(q);
        max_q = max_q.max(q);
        if !(rb.radius > lo && rb.radius < hi) {
            bad_r += 1;
        }
        let d = space.distance(sb.center, rb.center);
        max_dq = max_dq.max(d / sb.radius);
        if d > prefa_distance(eps, a, sb.radius) * (1.0 + REL_TOL) {
            bad_d += 1;
        }
    }
    let mapped = refl.pairs.len();
    report.push(tag(CheckRecord::upper("reflection.prefa_radius", bad_r as f64, 0.0)
        .param("mapped", mapped)
        .param_f("min_ratio", min_q)
        .param_f("max_ratio", max_q)));
    report.push(tag(CheckRecord::upper("reflection.prefa_distance", bad_d as f64, 0.0)
        .param_f("max_distance_over_s", max_dq)
        .param_f("bound_over_s", prefa_distance(eps, a, 1.0))));
    report.push(tag(CheckRecord::new("reflection.excluded", refl.excluded.len() as f64, true)));
    report.push(tag(CheckRecord::new("reflection.k_to_1", refl.k_to_1(cover_r.len()) as f64, true)));

    let gr = whitney_graph(space, cover_r);
    let (chain_max, bad_rc, pairs) = adjacent_image_chains(space, refl, cover_s, cover_r, &gr);
    report.push(tag(CheckRecord::upper("reflection.rcomp", bad_rc as f64, 0.0).param("pairs", pairs)));
    report.push(tag(CheckRecord::new("reflection.chain_max", chain_max as f64, chain_max < usize::MAX)));

    let gs = whitney_graph(space, cover_s);
    let lip = lipschitz_constant(refl, &gs, &gr);
    report.push(tag(CheckRecord::new("reflection.lipschitz", lip, lip.is_finite())));

    let k0v = k0(eps, a);
    let dilates6 = cover_s.dilates(space, 6.0);
    let (mut bad_a, mut bad_k, mut checked) = (0usize, 0usize, 0usize);
    for &(xi, r) in samples {
        let row = space.distance_row(xi);
        let target: Vec<Vertex> = dom.u.iter().filter(|&p| row[p] < k0v * r).collect();
        for (si, d6) in dilates6.iter().enumerate() {
            if !d6.iter().any(|&p| row[p] < r) {
                continue;
            }
            checked += 1;
            if !(cover_s.balls[si].radius < srbnd_factor(eps) * r) {
                bad_a += 1;
            }
            if let Some(ri) = refl.image(si) {
                let d3 = &cover_r.balls[ri].dilate3;
                if !d3.iter().any(|p| target.binary_search(p).is_ok()) {
                    bad_k += 1;
                }
            }
        }
    }
    report.push(tag(CheckRecord::upper("reflection.srbnd", bad_a as f64, 0.0).param("balls", checked)));
    report.push(tag(CheckRecord::upper("reflection.localization", bad_k as f64, 0.0)
        .param("samples", samples.len())
        .param_f("K0", k0v)));
    report
}

/// For exterior balls whose 6-dilates meet: number of radius-comparison
/// failures and the longest chain (in balls) joining the images in `G_R`.
pub fn adjacent_image_chains(
    space: &Space,
    refl: &ReflectionMap,
    cover_s: &WhitneyCover,
    cover_r: &WhitneyCover,
    gr: &WhitneyGraph,
) -> (usize, usize, usize) {
    let (lo, hi) = rcomp_window(refl.epsilon);
    let dilates = cover_s.dilates(space, 6.0);
    let (mut chain_max, mut bad, mut pairs) = (0usize, 0usize, 0usize);
    for (i, j) in cover_s.meeting_pairs(space, 6.0, &dilates) {
        let (Some(qi), Some(qj)) = (refl.image(i), refl.image(j)) else {
            continue;
        };
        pairs += 1;
        let q = cover_r.balls[qi].radius / cover_r.balls[qj].radius;
        if q < lo * (1.0 - REL_TOL) || q > hi * (1.0 + REL_TOL) {
            bad += 1;
        }
        let hops = gr.distance(qi, qj);
        chain_max = chain_max.max(if hops == usize::MAX { usize::MAX } else { hops + 1 });
    }
    (chain_max, bad, pairs)
}

/// `max D_R(Q B_1, Q B_2) / D_S(B_1, B_2)` over distinct mapped pairs.
pub fn lipschitz_constant(refl: &ReflectionMap, gs: &WhitneyGraph, gr: &WhitneyGraph) -> f64 {
    let mut worst: f64 = 0.0;
    for (k, &(s1, r1)) in refl.pairs.iter().enumerate() {
        for &(s2, r2) in &refl.pairs[k + 1..] {
            let ds = gs.distance(s1, s2);
            if ds == usize::MAX {
                continue;
            }
            let dr = gr.distance(r1, r2);
            if dr == usize::MAX {
                return f64::INFINITY;
            }
            worst = worst.max(dr as f64 / ds as f64);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::DomainSpec;
    use crate::mmspace::{CatalogSpec, VertexSet};
    use crate::whitney::build_whitney;

    #[test]
    fn constants() {
        let (lo, hi) = prefa_window(0.1, 1.0);
        assert!((lo - 0.785714).abs() < 1e-6 && (hi - 1.375).abs() < 1e-12);
        assert!((prefa_distance(0.1, 4.0, 1.0) - 88.0).abs() < 1e-12);
        let (lo, hi) = rcomp_window(0.1);
        assert!((lo - 0.168067).abs() < 1e-6 && (hi - 5.95).abs() < 1e-12);
        assert!((srbnd_factor(0.1) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn empty_exterior() {
        let s = Space::from_catalog(&CatalogSpec::path(10)).unwrap();
        let d = DomainDecomposition::new(&s, VertexSet::new(11, 1..10)).unwrap();
        let cr = build_whitney(&s, &d, Side::Interior, 0.1).unwrap();
        let cs = WhitneyCover { side: Side::Exterior, balls: Vec::new(), ..cr.clone() };
        assert!(build_reflection(&s, &d, &cr, &cs, 2.0).unwrap().is_empty());
    }

    #[test]
    fn half_grid_reflection() {
        let spec = CatalogSpec::grid(33, 33);
        let s = Space::from_catalog(&spec).unwrap();
        let d = DomainSpec::HalfGrid.build(&spec, &s).unwrap();
        let cr = build_whitney(&s, &d, Side::Interior, 0.1).unwrap();
        let cs = build_whitney(&s, &d, Side::Exterior, 0.1).unwrap();
        let q = build_reflection(&s, &d, &cr, &cs, 2.0).unwrap();
        assert!(!q.is_empty());
        let samples: Vec<(Vertex, f64)> = d.boundary.iter().step_by(4).flat_map(|x| [(x, 2.0), (x, 4.0)]).collect();
        let rep = validate_reflection(&s, &d, &q, &cs, &cr, &samples);
        assert!(rep.all_pass(), "{:#?}", rep.failures().collect::<Vec<_>>());
        let back = ReflectionMap::from_json(&q.to_json().unwrap()).unwrap();
        assert_eq!(back.pairs, q.pairs);
    }
}
