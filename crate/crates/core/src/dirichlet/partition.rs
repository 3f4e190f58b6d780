//! Partition of unity on the exterior subordinate to a Whitney cover, built
//! from capacitor potentials of `(3B ∩ V, (6B ∩ V)^c)`.

use serde::{Deserialize, Serialize};

use crate::domains::DomainDecomposition;
use crate::error::{Error, Result};
use crate::linalg::dirichlet_solve;
use crate::mmspace::{ScaleFunction, Space, Vertex, VertexSet};
use crate::report::{CheckRecord, CheckReport};
use crate::whitney::{Side, WhitneyCover};

use super::FieldFunction;

/// Sparse `ψ_B`, one per exterior Whitney ball, in cover order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub universe: usize,
    /// `(vertex, ψ_B(vertex))` sorted by vertex; vertices with `ψ_B = 0` omitted.
    pub functions: Vec<Vec<(Vertex, f64)>>,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn value(&self, b: usize, x: Vertex) -> f64 {
        let f = &self.functions[b];
        f.binary_search_by_key(&x, |p| p.0).map(|k| f[k].1).unwrap_or(0.0)
    }

    pub fn dense(&self, b: usize) -> FieldFunction {
        let mut v = vec![0.0; self.universe];
        for &(x, val) in &self.functions[b] {
            v[x] = val;
        }
        FieldFunction::from_fn(self.universe, |x| v[x])
    }

    /// `sum_B ψ_B(x)` for every vertex.
    pub fn sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.universe];
        for f in &self.functions {
            for &(x, v) in f {
                s[x] += v;
            }
        }
        s
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Energy of a sparsely stored function (zero off its support).
pub fn sparse_energy(space: &Space, f: &[(Vertex, f64)]) -> f64 {
    let at = |v: Vertex| f.binary_search_by_key(&v, |p| p.0).map(|k| f[k].1).ok();
    let mut total = 0.0;
    for &(x, fx) in f {
        for &(y, k) in space.neighbors(x) {
            let w = space.edges()[k].conductance;
            match at(y) {
                Some(fy) if y > x => total += w * (fx - fy).powi(2),
                Some(_) => {}
                None => total += w * fx * fx,
            }
        }
    }
    total
}

fn exterior_dilate(space: &Space, cover: &WhitneyCover, b: usize, lambda: f64) -> VertexSet {
    let ball = &cover.balls[b];
    let row = space.distance_row(ball.center);
    VertexSet::new(space.len(), cover.covered.iter().filter(|&y| row[y] < lambda * ball.radius))
}

pub fn partition_of_unity(
    space: &Space,
    dom: &DomainDecomposition,
    cover_s: &WhitneyCover,
) -> Result<Partition> {
    if cover_s.side != Side::Exterior {
        return Err(Error::InvalidInput("partition of unity needs an exterior cover".into()));
    }
    if dom.v.is_empty() {
        return Err(Error::InvalidDomain("exterior is empty".into()));
    }
    if !(cover_s.epsilon < 1.0 / 6.0) {
        return Err(Error::InvalidEpsilon { value: cover_s.epsilon, range: "(0, 1/6)" });
    }
    let n = space.len();
    let zero = vec![0.0; n];
    let mut raw = Vec::with_capacity(cover_s.len());
    for b in 0..cover_s.len() {
        let plate = VertexSet::new(n, cover_s.balls[b].dilate3.iter().copied());
        let shell = exterior_dilate(space, cover_s, b, 6.0);
        let mut fixed = vec![0.0; n];
        for v in plate.iter() {
            fixed[v] = 1.0;
        }
        let unknown = shell.difference(&plate);
        let u = dirichlet_solve(space, &unknown, &fixed, &zero)?;
        let sparse: Vec<(Vertex, f64)> = shell
            .iter()
            .map(|v| (v, u[v].clamp(0.0, 1.0)))
            .filter(|&(_, val)| val > 0.0)
            .collect();
        raw.push(sparse);
    }
    let mut total = vec![0.0; n];
    for f in &raw {
        for &(x, v) in f {
            total[x] += v;
        }
    }
    if let Some(x) = dom.v.iter().find(|&x| !(total[x] > 0.0)) {
        return Err(Error::CoverDefect(x));
    }
    let functions = raw
        .into_iter()
        .map(|f| f.into_iter().map(|(x, v)| (x, v / total[x])).collect())
        .collect();
    Ok(Partition { universe: n, functions })
}

/// Measured constants of the partition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartitionConstants {
    /// `min_B min_{3B} ψ_B`.
    pub c1: f64,
    /// `max_B E(ψ_B, ψ_B) Ψ(s) / m(B(y, s))`.
    pub energy: f64,
    /// `max_{x ∈ V} |sum_B ψ_B(x) - 1|`.
    pub sum_error: f64,
}

pub fn partition_constants(space: &Space, cover_s: &WhitneyCover, part: &Partition, psi: &ScaleFunction) -> PartitionConstants {
    let sums = part.sums();
    let sum_error = cover_s.covered.iter().map(|x| (sums[x] - 1.0).abs()).fold(0.0, f64::max);
    let mut c1 = f64::INFINITY;
    let mut energy = 0.0f64;
    for (b, ball) in cover_s.balls.iter().enumerate() {
        for &y in &ball.dilate3 {
            c1 = c1.min(part.value(b, y));
        }
        let mass = space.mass(space.ball(ball.center, ball.radius).map(|bb| bb.members).unwrap_or_default());
        energy = energy.max(sparse_energy(space, &part.functions[b]) * psi.psi(ball.radius) / mass);
    }
    PartitionConstants { c1, energy, sum_error }
}

pub fn partition_checks(space: &Space, cover_s: &WhitneyCover, part: &Partition, psi: &ScaleFunction) -> CheckReport {
    let k = partition_constants(space, cover_s, part, psi);
    let mut report = CheckReport::new();
    report.push(CheckRecord::upper("partition.sum", k.sum_error, 1e-12));
    let mut in_range = true;
    let mut support = true;
    for (b, f) in part.functions.iter().enumerate() {
        let six = exterior_dilate(space, cover_s, b, 6.0);
        in_range &= f.iter().all(|&(_, v)| (0.0..=1.0).contains(&v));
        support &= f.iter().all(|&(x, _)| six.contains(x));
    }
    report.push(CheckRecord::new("partition.range", in_range as u8 as f64, in_range));
    report.push(CheckRecord::new("partition.support", support as u8 as f64, support));
    report.push(CheckRecord::lower("partition.c1", k.c1, f64::MIN_POSITIVE).note("min of ψ_B over 3B"));
    report.push(
        CheckRecord::new("partition.energy", k.energy, k.energy.is_finite())
            .param("balls", part.len())
            .note("max E(ψ_B) Ψ(s) / m(B)"),
    );
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::DomainSpec;
    use crate::dirichlet::energy::energy;
    use crate::mmspace::CatalogSpec;
    use crate::whitney::build_whitney;

    #[test]
    fn single_ball_is_constant_one() {
        // Exterior {0}: one ball, ψ ≡ 1 on V.
        let s = Space::from_catalog(&CatalogSpec::path(6)).unwrap();
        let d = DomainDecomposition::new(&s, VertexSet::new(7, 2..7)).unwrap();
        let c = build_whitney(&s, &d, Side::Exterior, 0.1).unwrap();
        assert_eq!(c.len(), 1);
        let p = partition_of_unity(&s, &d, &c).unwrap();
        assert_eq!(p.functions[0], vec![(0, 1.0)]);
    }

    #[test]
    fn half_grid_partition() {
        let spec = CatalogSpec::grid(17, 17);
        let s = Space::from_catalog(&spec).unwrap();
        let d = DomainSpec::HalfGrid.build(&spec, &s).unwrap();
        let c = build_whitney(&s, &d, Side::Exterior, 0.1).unwrap();
        let psi = ScaleFunction::diffusive();
        let p = partition_of_unity(&s, &d, &c).unwrap();
        let rep = partition_checks(&s, &c, &p, &psi);
        assert!(rep.all_pass(), "{:?}", rep.failures().collect::<Vec<_>>());
        for b in [0, p.len() / 2, p.len() - 1] {
            let dense = p.dense(b);
            assert!((energy(&s, &dense) - sparse_energy(&s, &p.functions[b])).abs() < 1e-12);
        }
        assert_eq!(Partition::from_json(&p.to_json().unwrap()).unwrap(), p);
    }

    #[test]
    fn needs_small_epsilon() {
        let spec = CatalogSpec::grid(9, 9);
        let s = Space::from_catalog(&spec).unwrap();
        let d = DomainSpec::HalfGrid.build(&spec, &s).unwrap();
        let c = build_whitney(&s, &d, Side::Exterior, 0.2).unwrap();
        let r = partition_of_unity(&s, &d, &c);
        assert!(matches!(r, Err(Error::InvalidEpsilon { .. })));
    }
}
