//! Domains `U ⊂ X`: boundary decomposition, distance to the boundary,
//! uniform curves and the corkscrew condition.

use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mmspace::{CatalogSpec, Space, Vertex, VertexSet};
use crate::report::{CheckRecord, CheckReport};

/// `U`, its discrete boundary `∂U` (outside vertices adjacent to `U`), and the
/// exterior `V = X ∖ (U ∪ ∂U)`.
#[derive(Clone, Debug)]
pub struct DomainDecomposition {
    pub u: VertexSet,
    pub boundary: VertexSet,
    pub closure: VertexSet,
    pub v: VertexSet,
    /// `dist(x, X ∖ U)`; zero off `U`.
    pub delta_u: Vec<f64>,
    /// `dist(x, X ∖ V)`; zero off `V`.
    pub delta_v: Vec<f64>,
}

impl DomainDecomposition {
    pub fn new(space: &Space, u: VertexSet) -> Result<Self> {
        let n = space.len();
        if u.universe() != n {
            return Err(Error::InvalidDomain("vertex set belongs to another space".into()));
        }
        if u.is_empty() {
            return Err(Error::InvalidDomain("U is empty".into()));
        }
        if u.len() == n {
            return Err(Error::InvalidDomain("U is the whole space".into()));
        }
        if !space.is_connected_within(&u) {
            return Err(Error::InvalidDomain("U is not connected".into()));
        }
        let boundary = VertexSet::from_mask(
            (0..n)
                .map(|x| !u.contains(x) && space.neighbors(x).iter().any(|&(y, _)| u.contains(y)))
                .collect(),
        );
        let closure = u.union(&boundary);
        let v = closure.complement();
        let outside_u: Vec<Vertex> = u.complement().iter().collect();
        let delta_u = space.shortest_paths(&outside_u, None);
        let delta_v = if v.is_empty() {
            vec![0.0; n]
        } else {
            let outside_v: Vec<Vertex> = closure.iter().collect();
            space.shortest_paths(&outside_v, None)
        };
        Ok(DomainDecomposition { u, boundary, closure, v, delta_u, delta_v })
    }

    /// `∂V`: vertices outside `V` adjacent to `V`.
    pub fn exterior_boundary(&self, space: &Space) -> VertexSet {
        VertexSet::from_mask(
            (0..space.len())
                .map(|x| !self.v.contains(x) && space.neighbors(x).iter().any(|&(y, _)| self.v.contains(y)))
                .collect(),
        )
    }

    pub fn diameter_u(&self, space: &Space) -> f64 {
        space.diameter_of(&self.u)
    }
}

pub fn boundary_decomposition(space: &Space, u: &VertexSet) -> Result<DomainDecomposition> {
    DomainDecomposition::new(space, u.clone())
}

/// Domain recipes understood by configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DomainSpec {
    /// Upper half of a grid: rows `y >= ny/2 + 1`.
    HalfGrid,
    /// Everything except the vertices on the bottom line `y = 0`.
    RemoveBottomLine,
    /// A grid minus the vertical segment `x = nx/2`, `0 <= y < length`.
    Slit { length: i64 },
    Explicit { vertices: Vec<Vertex> },
}

impl DomainSpec {
    pub fn vertices(&self, catalog: &CatalogSpec, space: &Space) -> Result<VertexSet> {
        let n = space.len();
        let lattice = |v: Vertex| -> Result<(i64, i64)> {
            let coords = space.coords().ok_or_else(|| Error::InvalidDomain("space has no coordinates".into()))?;
            let h = catalog.weights().edge_length;
            Ok(((coords[v][0] / h).round() as i64, (coords[v][1] / h).round() as i64))
        };
        match self {
            DomainSpec::HalfGrid => {
                let CatalogSpec::Grid { ny, .. } = *catalog else {
                    return Err(Error::InvalidDomain("half_grid needs a grid space".into()));
                };
                let cut = ny / 2 + 1;
                let mut set = Vec::new();
                for v in 0..n {
                    if lattice(v)?.1 >= cut {
                        set.push(v);
                    }
                }
                Ok(VertexSet::new(n, set))
            }
            DomainSpec::RemoveBottomLine => {
                let coords = space.coords().ok_or_else(|| Error::InvalidDomain("space has no coordinates".into()))?;
                let tol = 1e-9 * catalog.weights().edge_length;
                Ok(VertexSet::new(n, (0..n).filter(|&v| coords[v][1] > tol)))
            }
            DomainSpec::Slit { length } => {
                let CatalogSpec::Grid { nx, ny, .. } = *catalog else {
                    return Err(Error::InvalidDomain("slit needs a grid space".into()));
                };
                if *length <= 0 || *length >= ny {
                    return Err(Error::InvalidDomain(format!("slit length {length} must lie in 1..{ny}")));
                }
                let cx = nx / 2;
                let mut set = Vec::new();
                for v in 0..n {
                    let (x, y) = lattice(v)?;
                    if !(x == cx && y < *length) {
                        set.push(v);
                    }
                }
                Ok(VertexSet::new(n, set))
            }
            DomainSpec::Explicit { vertices } => {
                if let Some(&v) = vertices.iter().find(|&&v| v >= n) {
                    return Err(Error::InvalidDomain(format!("vertex {v} out of range")));
                }
                Ok(VertexSet::new(n, vertices.iter().copied()))
            }
        }
    }

    pub fn build(&self, catalog: &CatalogSpec, space: &Space) -> Result<DomainDecomposition> {
        DomainDecomposition::new(space, self.vertices(catalog, space)?)
    }
}

/// A path in `U` with its uniformity data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub path: Vec<Vertex>,
    pub length: f64,
    pub diam: f64,
    /// Smallest `A` for which both the diameter and the cigar conditions hold.
    pub measured_a: f64,
    /// Whether `measured_a` met the requested target.
    pub meets_target: bool,
}

/// `(diam, A)` of a path in `U`; `A = 1` for a single vertex.
pub fn measure_curve(space: &Space, dom: &DomainDecomposition, path: &[Vertex]) -> (f64, f64) {
    let (x, y) = (path[0], *path.last().unwrap());
    let mut diam: f64 = 0.0;
    for &a in path {
        let row = space.distance_row(a);
        for &b in path {
            diam = diam.max(row[b]);
        }
    }
    if x == y {
        return (diam, 1.0);
    }
    let mut a = diam / space.distance(x, y);
    for &z in path {
        let near = space.distance(x, z).min(space.distance(z, y));
        a = a.max(near / dom.delta_u[z]);
    }
    (diam, a)
}

fn path_length(space: &Space, path: &[Vertex]) -> f64 {
    path.windows(2)
        .map(|w| {
            space
                .neighbors(w[0])
                .iter()
                .filter(|&&(z, _)| z == w[1])
                .map(|&(_, k)| space.edges()[k].length)
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

#[derive(Clone, Copy, PartialEq)]
struct Item(f64, Vertex);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, o: &Self) -> std::cmp::Ordering {
        o.0.total_cmp(&self.0).then_with(|| o.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, o: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(o))
    }
}

/// Cheapest path from `s` to `t` inside `allowed` under `cost(edge index)`.
fn cheapest_path(
    space: &Space,
    allowed: &VertexSet,
    s: Vertex,
    t: Vertex,
    cost: impl Fn(usize) -> f64,
) -> Option<Vec<Vertex>> {
    let n = space.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut heap = BinaryHeap::from([Item(0.0, s)]);
    dist[s] = 0.0;
    while let Some(Item(d, x)) = heap.pop() {
        if x == t {
            break;
        }
        if d > dist[x] {
            continue;
        }
        for &(y, k) in space.neighbors(x) {
            if !allowed.contains(y) {
                continue;
            }
            let nd = d + cost(k);
            if nd < dist[y] || (nd == dist[y] && x < prev[y]) {
                if nd < dist[y] {
                    heap.push(Item(nd, y));
                }
                dist[y] = nd;
                prev[y] = x;
            }
        }
    }
    if dist[t].is_infinite() {
        return None;
    }
    let mut path = vec![t];
    while *path.last().unwrap() != s {
        path.push(prev[*path.last().unwrap()]);
    }
    path.reverse();
    Some(path)
}

pub const PENALTY_GRID: [f64; 5] = [0.5, 1.0, 2.0, 4.0, 8.0];

/// Searches for a uniform curve from `x` to `y` in `U`: the geodesic in `U`
/// first, then clearance-penalized shortest paths with edge cost
/// `ℓ_e (1 + λ / min δ_U)`, then a bisection over `A` restricting paths to
/// vertices that satisfy the cigar condition. Returns the best curve found.
pub fn find_uniform_curve(
    space: &Space,
    dom: &DomainDecomposition,
    x: Vertex,
    y: Vertex,
    a_target: f64,
) -> Result<Curve> {
    if !dom.u.contains(x) || !dom.u.contains(y) {
        return Err(Error::InvalidInput(format!("curve endpoints {x}, {y} must lie in U")));
    }
    let finish = |path: Vec<Vertex>| {
        let (diam, a) = measure_curve(space, dom, &path);
        Curve { length: path_length(space, &path), path, diam, measured_a: a, meets_target: a <= a_target }
    };
    if x == y {
        return Ok(finish(vec![x]));
    }
    let geodesic = cheapest_path(space, &dom.u, x, y, |k| space.edges()[k].length)
        .ok_or_else(|| Error::Internal("U is connected but no path was found".into()))?;
    let mut best = finish(geodesic);
    if best.meets_target {
        return Ok(best);
    }
    for lambda in PENALTY_GRID {
        let cost = |k: usize| {
            let e = space.edges()[k];
            e.length * (1.0 + lambda / dom.delta_u[e.u].min(dom.delta_u[e.v]))
        };
        if let Some(path) = cheapest_path(space, &dom.u, x, y, cost) {
            let c = finish(path);
            if c.measured_a < best.measured_a {
                best = c;
            }
        }
    }
    if best.meets_target {
        return Ok(best);
    }
    // Bisection on the cigar constraint: shortest path through the vertices
    // with min(d(x, z), d(z, y)) <= A δ_U(z).
    let (rx, ry) = (space.distance_row(x), space.distance_row(y));
    let (mut lo, mut hi) = (1.0f64, best.measured_a);
    for _ in 0..CIGAR_STEPS {
        if hi <= lo * (1.0 + 1e-3) {
            break;
        }
        let a = 0.5 * (lo + hi);
        let allowed = VertexSet::new(
            space.len(),
            dom.u.iter().filter(|&z| rx[z].min(ry[z]) <= a * dom.delta_u[z]),
        );
        match cheapest_path(space, &allowed, x, y, |k| space.edges()[k].length) {
            Some(path) => {
                let c = finish(path);
                if c.measured_a < best.measured_a {
                    best = c;
                }
                hi = a.min(best.measured_a);
            }
            None => lo = a,
        }
        if best.meets_target {
            break;
        }
    }
    Ok(best)
}

const CIGAR_STEPS: usize = 24;

/// Largest `ρ` such that some `y` has `B(y, ρ) ⊆ U ∩ B(center, r)`, and a maximizer.
pub fn best_corkscrew(space: &Space, dom: &DomainDecomposition, center: Vertex, r: f64) -> Result<(f64, Option<Vertex>)> {
    let target = space.ball_within(center, r, &dom.u)?.to_set(space.len());
    if target.is_empty() {
        return Ok((0.0, None));
    }
    let outside: Vec<Vertex> = target.complement().iter().collect();
    let clearance = space.shortest_paths(&outside, None);
    let mut best = (0.0, None);
    for y in target.iter() {
        if clearance[y] > best.0 {
            best = (clearance[y], Some(y));
        }
    }
    Ok(best)
}

/// Required corkscrew radius `r / (3A)`.
pub fn corkscrew_radius(r: f64, a: f64) -> f64 {
    r / (3.0 * a)
}

pub fn corkscrew_check(space: &Space, dom: &DomainDecomposition, a: f64, samples: &[(Vertex, f64)]) -> Result<CheckReport> {
    let diam = dom.diameter_u(space);
    let mut report = CheckReport::new();
    for &(c, r) in samples {
        if !dom.closure.contains(c) {
            return Err(Error::InvalidInput(format!("corkscrew center {c} is not in the closure of U")));
        }
        let need = corkscrew_radius(r, a);
        let (best, y) = best_corkscrew(space, dom, c, r)?;
        let mut rec = CheckRecord::lower("corkscrew", best, need)
            .param("center", c)
            .param_f("r", r)
            .param_f("A", a);
        if let Some(y) = y {
            rec = rec.param("witness", y);
        }
        if r >= diam / 2.0 {
            rec = rec.note("radius is not below diam(U)/2");
        }
        report.push(rec);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_grid(n: i64) -> (CatalogSpec, Space, DomainDecomposition) {
        let spec = CatalogSpec::grid(n, n);
        let space = Space::from_catalog(&spec).unwrap();
        let dom = DomainSpec::HalfGrid.build(&spec, &space).unwrap();
        (spec, space, dom)
    }

    #[test]
    fn half_grid_parts() {
        let (_, s, d) = half_grid(11);
        assert_eq!(d.u.len(), 55);
        assert!(d.boundary.iter().all(|v| v / 11 == 5));
        assert_eq!(d.boundary.len(), 11);
        assert!(d.v.iter().all(|v| v / 11 <= 4));
        assert_eq!(d.delta_u[6 * 11 + 3], 1.0);
        assert!(d.exterior_boundary(&s).is_subset(&d.boundary));
    }

    #[test]
    fn path_interval() {
        let s = Space::from_catalog(&CatalogSpec::path(10)).unwrap();
        let d = DomainDecomposition::new(&s, VertexSet::new(11, 1..10)).unwrap();
        assert_eq!(d.boundary.as_slice(), &[0, 10]);
        assert!(d.v.is_empty());
        assert_eq!(d.delta_u[5], 5.0);
    }

    #[test]
    fn invalid_domains() {
        let s = Space::from_catalog(&CatalogSpec::path(4)).unwrap();
        for u in [VertexSet::empty(5), VertexSet::all(5), VertexSet::new(5, [0, 2])] {
            assert!(matches!(DomainDecomposition::new(&s, u), Err(Error::InvalidDomain(_))));
        }
    }

    #[test]
    fn half_plane_curves() {
        let (_, s, d) = half_grid(21);
        let (x, y) = (11 * 21, 11 * 21 + 10);
        let geo = cheapest_path(&s, &d.u, x, y, |k| s.edges()[k].length).unwrap();
        assert_eq!(measure_curve(&s, &d, &geo).1, 5.0);
        let c = find_uniform_curve(&s, &d, x, y, 3.0).unwrap();
        assert!(c.measured_a <= 3.0, "{}", c.measured_a);
        assert!(c.meets_target);
    }

    #[test]
    fn degenerate_and_adjacent_curves() {
        let (_, s, d) = half_grid(21);
        let x = 15 * 21 + 5;
        assert_eq!(find_uniform_curve(&s, &d, x, x, 1.0).unwrap().measured_a, 1.0);
        let c = find_uniform_curve(&s, &d, x, x + 1, 1.0).unwrap();
        assert_eq!((c.path.len(), c.measured_a), (2, 1.0));
        assert!(matches!(find_uniform_curve(&s, &d, 0, x, 1.0), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn corkscrew_example() {
        let (_, s, d) = half_grid(21);
        let center = 10 * 21 + 5;
        assert!(d.boundary.contains(center));
        assert!((corkscrew_radius(6.0, 4.0) - 0.5).abs() < 1e-15);
        let rep = corkscrew_check(&s, &d, 3.0, &[(center, 6.0)]).unwrap();
        assert!(rep.all_pass());
    }
}
