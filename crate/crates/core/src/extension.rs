//! The extension operator `E_Q`: identity on `Ū`; on `V` a partition of
//! unity weighted sum of averages of `f` over the 3-dilates of reflected balls.
//!
//! Every sum runs in ascending order (terms by exterior ball index, averages
//! by vertex) so `E_Q` is linear up to rounding and fully deterministic.

use serde::{Deserialize, Serialize};

use crate::dirichlet::css::ratio;
use crate::dirichlet::energy::energy_and_measure;
use crate::dirichlet::{FieldFunction, Partition};
use crate::domains::DomainDecomposition;
use crate::error::{Error, Result};
use crate::mmspace::{ScaleFunction, Space, Vertex, VertexSet};
use crate::reflection::{k0, ReflectionMap};
use crate::report::{CheckRecord, CheckReport};
use crate::whitney::WhitneyCover;

/// One summand `ψ_B · ⨍_{3Q(B)} f dm`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionTerm {
    pub s_index: usize,
    pub r_index: usize,
    /// `3Q(B)` within `U`, ascending.
    pub average_over: Vec<Vertex>,
    /// Sparse `ψ_B`.
    pub weights: Vec<(Vertex, f64)>,
}

#[derive(Clone, Debug)]
pub struct ExtensionOperator {
    pub dom: DomainDecomposition,
    pub epsilon: f64,
    pub a: f64,
    pub terms: Vec<ExtensionTerm>,
}

impl ExtensionOperator {
    pub fn new(
        dom: &DomainDecomposition,
        cover_r: &WhitneyCover,
        refl: &ReflectionMap,
        partition: &Partition,
    ) -> Result<Self> {
        if !dom.v.is_empty() && refl.is_empty() {
            return Err(Error::UncoveredExterior);
        }
        let terms = refl
            .pairs
            .iter()
            .map(|&(si, ri)| {
                if si >= partition.len() || ri >= cover_r.len() {
                    return Err(Error::InvalidInput(format!("pair ({si}, {ri}) is out of range")));
                }
                Ok(ExtensionTerm {
                    s_index: si,
                    r_index: ri,
                    average_over: cover_r.balls[ri].dilate3.clone(),
                    weights: partition.functions[si].clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ExtensionOperator { dom: dom.clone(), epsilon: refl.epsilon, a: refl.a, terms })
    }

    /// `sum_{B ∈ 𝔖̃} ψ_B`: equal to 1 where the reflected balls cover `V`.
    pub fn coverage(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dom.u.universe()];
        for t in &self.terms {
            for &(x, w) in &t.weights {
                c[x] += w;
            }
        }
        c
    }

    /// Serializes `ε`, `A` and the terms; the domain is rebuilt by the caller.
    pub fn to_json(&self) -> Result<String> {
        let doc = OperatorDocument { epsilon: self.epsilon, a: self.a, terms: self.terms.clone() };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(dom: &DomainDecomposition, s: &str) -> Result<Self> {
        let doc: OperatorDocument = serde_json::from_str(s)?;
        let n = dom.u.universe();
        if doc.terms.iter().any(|t| t.average_over.iter().chain(t.weights.iter().map(|p| &p.0)).any(|&v| v >= n)) {
            return Err(Error::InvalidInput("operator refers to vertices outside the space".into()));
        }
        Ok(ExtensionOperator { dom: dom.clone(), epsilon: doc.epsilon, a: doc.a, terms: doc.terms })
    }
}

#[derive(Serialize, Deserialize)]
struct OperatorDocument {
    epsilon: f64,
    a: f64,
    terms: Vec<ExtensionTerm>,
}

/// `E_Q f` on all vertices; `f` must be defined on `Ū`. Vertices of `Ū` keep
/// the values of `f`; vertices of `V` outside every reflected `ψ_B` get 0.
pub fn extend(space: &Space, op: &ExtensionOperator, f: &[f64]) -> Result<FieldFunction> {
    let n = space.len();
    if f.len() != n {
        return Err(Error::InvalidFunction(format!("{} values for {n} vertices", f.len())));
    }
    if let Some(x) = op.dom.closure.iter().find(|&x| !f[x].is_finite()) {
        return Err(Error::InvalidFunction(format!("f is undefined at {x} in the closure of U")));
    }
    let m = space.measure();
    let mut g = vec![0.0; n];
    for x in op.dom.closure.iter() {
        g[x] = f[x];
    }
    for t in &op.terms {
        let (mut num, mut mass) = (0.0, 0.0);
        for &v in &t.average_over {
            num += m[v] * f[v];
            mass += m[v];
        }
        let avg = num / mass;
        for &(x, w) in &t.weights {
            g[x] += w * avg;
        }
    }
    FieldFunction::new(g)
}

/// `Γ(g, g)(∂U)` and its share of `E(g, g)` (0 when the energy vanishes).
pub fn boundary_energy(space: &Space, dom: &DomainDecomposition, g: &[f64]) -> Result<(f64, f64)> {
    let em = energy_and_measure(space, g, None)?;
    let boundary = em.of_set(dom.boundary.iter());
    Ok((boundary, ratio(boundary, em.total)))
}

/// One `(f, x, r)` evaluation of a ratio.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub check: String,
    pub f_id: String,
    pub x: Vertex,
    pub r: f64,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

/// Maxima of the four extension ratios over a family and a location set.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExtensionMaxima {
    /// `Γ(Ef)(B(x, r)) / Γ_U(f)(B_U(x, Kr))`.
    pub local_energy: f64,
    /// `∫_{B(x, r)} (Ef)² / ∫_{B_U(x, Kr)} f²`.
    pub local_l2: f64,
    /// `E(Ef) / (E_U(f) + ∫_U f² / Ψ(diam U))`.
    pub global: f64,
    /// `Var_{B(ξ, r)}(Ef) / (Ψ(r) Γ_U(f)(B_U(ξ, K₀ r)))`, `ξ ∈ ∂U`.
    pub variance: f64,
}

impl ExtensionMaxima {
    pub fn as_array(&self) -> [f64; 4] {
        [self.local_energy, self.local_l2, self.global, self.variance]
    }
}

pub const RATIO_NAMES: [&str; 4] = ["extension.local_energy", "extension.local_l2", "extension.global", "extension.variance"];

#[derive(Clone, Debug)]
pub struct ExtensionCheck {
    pub report: CheckReport,
    pub maxima: ExtensionMaxima,
    pub rows: Vec<RatioRow>,
}

fn weighted_variance(m: &[f64], g: &[f64], set: &[Vertex]) -> f64 {
    let mass: f64 = set.iter().map(|&v| m[v]).sum();
    let mean = set.iter().map(|&v| m[v] * g[v]).sum::<f64>() / mass;
    set.iter().map(|&v| m[v] * (g[v] - mean).powi(2)).sum()
}

/// Evaluates the four scale-invariant ratios for every family member and
/// location, plus the restriction identity and linearity of `E_Q`.
pub fn extension_checks(
    space: &Space,
    op: &ExtensionOperator,
    family: &[(String, FieldFunction)],
    psi: &ScaleFunction,
    locations: &[(Vertex, f64)],
    k: f64,
) -> Result<ExtensionCheck> {
    let dom = &op.dom;
    let m = space.measure();
    let k0v = k0(op.epsilon, op.a);
    let diam_u = dom.diameter_u(space);
    let mut rows = Vec::new();
    let mut mx = [0.0f64; 4];
    let mut restriction = 0.0f64;
    let mut exts = Vec::with_capacity(family.len());

    let mut balls = Vec::with_capacity(locations.len());
    for &(x, r) in locations {
        if !dom.closure.contains(x) {
            return Err(Error::InvalidInput(format!("location {x} is not in the closure of U")));
        }
        let b = space.ball(x, r)?.members;
        let bu = space.ball_within(x, k * r, &dom.closure)?.members;
        let b0 = space.ball_within(x, k0v * r, &dom.closure)?.members;
        balls.push((b, bu, b0));
    }

    for (id, f) in family {
        let g = extend(space, op, f)?;
        for x in dom.closure.iter() {
            restriction = restriction.max((g[x] - f[x]).abs());
        }
        let fu: Vec<f64> = (0..space.len()).map(|x| if dom.closure.contains(x) { f[x] } else { 0.0 }).collect();
        let gamma_g = energy_and_measure(space, &g, None)?;
        let gamma_f = energy_and_measure(space, &fu, Some(&dom.closure))?;
        let mut push = |which: usize, x: Vertex, r: f64, num: f64, den: f64| {
            let q = ratio(num, den);
            mx[which] = mx[which].max(q);
            rows.push(RatioRow { check: RATIO_NAMES[which].into(), f_id: id.clone(), x, r, numerator: num, denominator: den, ratio: q });
        };
        for (&(x, r), (b, bu, b0)) in locations.iter().zip(&balls) {
            push(0, x, r, gamma_g.of_set(b.iter().copied()), gamma_f.of_set(bu.iter().copied()));
            let l2 = |vals: &[f64], set: &[Vertex]| set.iter().map(|&v| m[v] * vals[v] * vals[v]).sum::<f64>();
            push(1, x, r, l2(&g, b), l2(&fu, bu));
            if dom.boundary.contains(x) {
                push(3, x, r, weighted_variance(m, &g, b), psi.psi(r) * gamma_f.of_set(b0.iter().copied()));
            }
        }
        let mass_u: f64 = dom.closure.iter().map(|v| m[v] * fu[v] * fu[v]).sum();
        push(2, usize::MAX, diam_u, gamma_g.total, gamma_f.total + mass_u / psi.psi(diam_u));
        exts.push(g);
    }

    // Linearity: E(a f + b g) against a E f + b E g on consecutive members.
    let mut linearity = 0.0f64;
    for w in 0..family.len().saturating_sub(1) {
        let (a, b) = (0.75, -1.25);
        let (f1, f2) = (&family[w].1, &family[w + 1].1);
        let comb: Vec<f64> = f1.iter().zip(f2.iter()).map(|(p, q)| a * p + b * q).collect();
        let lhs = extend(space, op, &comb)?;
        for x in 0..space.len() {
            let rhs = a * exts[w][x] + b * exts[w + 1][x];
            linearity = linearity.max((lhs[x] - rhs).abs() / (1.0 + rhs.abs()));
        }
    }

    let maxima = ExtensionMaxima { local_energy: mx[0], local_l2: mx[1], global: mx[2], variance: mx[3] };
    let mut report = CheckReport::new();
    for (which, name) in RATIO_NAMES.iter().enumerate() {
        let v = mx[which];
        report.push(
            CheckRecord::new(format!("{name}.max"), v, v.is_finite())
                .param("family", family.len())
                .param("locations", locations.len())
                .param_f("K", if which == 3 { k0v } else { k })
                .note(if v.is_finite() { "" } else { "unbounded ratio: zero denominator with nonzero numerator" }),
        );
    }
    report.push(CheckRecord::upper("extension.restriction", restriction, 0.0));
    report.push(CheckRecord::upper("extension.linearity", linearity, 1e-12));
    Ok(ExtensionCheck { report, maxima, rows })
}

/// `max |E f(v) - f(z_v)| / Λ` over exterior vertices adjacent to `∂U`,
/// `z_v` the nearest boundary vertex and `Λ` the Lipschitz constant of `f`
/// on `Ū`.
pub fn continuity_gap(space: &Space, op: &ExtensionOperator, f: &[f64]) -> Result<f64> {
    let dom = &op.dom;
    let g = extend(space, op, f)?;
    let mut lip = 0.0f64;
    for e in space.edges() {
        if dom.closure.contains(e.u) && dom.closure.contains(e.v) {
            lip = lip.max((f[e.u] - f[e.v]).abs() / e.length);
        }
    }
    let collar: VertexSet = VertexSet::new(
        space.len(),
        dom.v.iter().filter(|&v| space.neighbors(v).iter().any(|&(y, _)| dom.boundary.contains(y))),
    );
    let mut worst = 0.0f64;
    for v in collar.iter() {
        let row = space.distance_row(v);
        let z = dom
            .boundary
            .iter()
            .min_by(|&p, &q| row[p].total_cmp(&row[q]).then(p.cmp(&q)))
            .ok_or_else(|| Error::Internal("empty boundary".into()))?;
        worst = worst.max((g[v] - f[z]).abs());
    }
    Ok(ratio(worst, lip))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dirichlet::partition_of_unity;
    use crate::domains::DomainSpec;
    use crate::mmspace::CatalogSpec;
    use crate::reflection::build_reflection;
    use crate::whitney::{build_whitney, Side};

    struct Setup {
        space: Space,
        op: ExtensionOperator,
        cover_r: WhitneyCover,
    }

    fn half_grid(n: i64, eps: f64) -> Setup {
        let spec = CatalogSpec::grid(n, n);
        let space = Space::from_catalog(&spec).unwrap();
        let dom = DomainSpec::HalfGrid.build(&spec, &space).unwrap();
        let cover_r = build_whitney(&space, &dom, Side::Interior, eps).unwrap();
        let cover_s = build_whitney(&space, &dom, Side::Exterior, eps).unwrap();
        let refl = build_reflection(&space, &dom, &cover_r, &cover_s, 2.0).unwrap();
        let part = partition_of_unity(&space, &dom, &cover_s).unwrap();
        let op = ExtensionOperator::new(&dom, &cover_r, &refl, &part).unwrap();
        Setup { space, op, cover_r }
    }

    #[test]
    fn constants_extend_where_covered() {
        let s = half_grid(17, 0.1);
        let g = extend(&s.space, &s.op, &vec![1.0; s.space.len()]).unwrap();
        let cov = s.op.coverage();
        for x in s.op.dom.v.iter() {
            assert!((g[x] - cov[x]).abs() < 1e-12 && cov[x] <= 1.0 + 1e-12);
        }
        // Singleton exterior balls: the reflected band is covered exactly.
        let s = half_grid(33, 1.0 / 30.0);
        let cov = s.op.coverage();
        assert!((0..33).all(|c| cov[15 * 33 + c] == 1.0 && cov[13 * 33 + c] == 1.0));
    }

    #[test]
    fn hand_evaluated_vertex() {
        let s = half_grid(33, 0.1);
        let m = s.space.measure();
        let f: Vec<f64> = (0..s.space.len()).map(|v| (v / 33) as f64).collect();
        let g = extend(&s.space, &s.op, &f).unwrap();
        // A vertex of V touched by exactly two reflected ψ_B.
        let x = s
            .op
            .dom
            .v
            .iter()
            .find(|&x| s.op.terms.iter().filter(|t| t.weights.iter().any(|p| p.0 == x)).count() == 2)
            .unwrap();
        let mut expected = 0.0;
        for t in s.op.terms.iter().filter(|t| t.weights.iter().any(|p| p.0 == x)) {
            let w = t.weights.iter().find(|p| p.0 == x).unwrap().1;
            let ball = &s.cover_r.balls[t.r_index];
            let d3: Vec<Vertex> = (0..s.space.len()).filter(|&v| s.op.dom.u.contains(v) && s.space.distance(ball.center, v) < 3.0 * ball.radius).collect();
            let avg = d3.iter().map(|&v| m[v] * f[v]).sum::<f64>() / d3.iter().map(|&v| m[v]).sum::<f64>();
            expected += w * avg;
        }
        assert!((g[x] - expected).abs() < 1e-12);
    }

    #[test]
    fn empty_exterior_is_identity() {
        let spec = CatalogSpec::path(6);
        let space = Space::from_catalog(&spec).unwrap();
        let dom = DomainDecomposition::new(&space, VertexSet::new(7, 1..7)).unwrap();
        assert!(dom.v.is_empty());
        let op = ExtensionOperator { dom, epsilon: 0.1, a: 2.0, terms: Vec::new() };
        let f: Vec<f64> = (0..7).map(|i| i as f64 * 0.5).collect();
        assert_eq!(extend(&space, &op, &f).unwrap().values(), &f[..]);
    }

    #[test]
    fn checks_on_small_half_grid() {
        let s = half_grid(33, 1.0 / 30.0);
        let n = s.space.len();
        let family: Vec<(String, FieldFunction)> = vec![
            ("one".into(), FieldFunction::constant(n, 1.0)),
            ("y".into(), FieldFunction::from_fn(n, |v| (v / 33) as f64 / 32.0)),
            ("x".into(), FieldFunction::from_fn(n, |v| (v % 33) as f64 / 32.0)),
        ];
        let locs = vec![(16 * 33 + 16, 3.0), (16 * 33 + 8, 2.0), (24 * 33 + 16, 3.0)];
        let chk = extension_checks(&s.space, &s.op, &family, &ScaleFunction::diffusive(), &locs, 3.0).unwrap();
        assert!(chk.report.all_pass(), "{:?}", chk.report.failures().collect::<Vec<_>>());
        // Constants inside the reflected band: local energy and variance are 0/0.
        let local = [RATIO_NAMES[0], RATIO_NAMES[3]];
        assert!(chk.rows.iter().filter(|r| r.f_id == "one" && local.contains(&r.check.as_str())).all(|r| r.ratio == 0.0));
        let (gb, share) = boundary_energy(&s.space, &s.op.dom, &vec![2.0; n]).unwrap();
        assert_eq!((gb, share), (0.0, 0.0));
    }

    #[test]
    fn serialization_round_trip() {
        let s = half_grid(17, 0.1);
        let back = ExtensionOperator::from_json(&s.op.dom, &s.op.to_json().unwrap()).unwrap();
        assert_eq!(back.terms, s.op.terms);
    }
}
