//! Finite metric measure spaces realized as weighted graphs.
//!
//! A [`Space`] carries edge lengths (which induce the shortest-path metric),
//! edge conductances (which define the Dirichlet form, see [`crate::dirichlet`])
//! and a vertex measure. Balls are open: `B(x, r) = { y : d(x, y) < r }`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::dirichlet::heat::Spectrum;
use crate::error::{Error, Result};

pub type Vertex = usize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: Vertex,
    pub v: Vertex,
    pub length: f64,
    pub conductance: f64,
}

impl Edge {
    pub fn new(u: Vertex, v: Vertex, length: f64, conductance: f64) -> Self {
        Edge { u, v, length, conductance }
    }

    pub fn unit(u: Vertex, v: Vertex) -> Self {
        Edge::new(u, v, 1.0, 1.0)
    }

    pub fn other(&self, x: Vertex) -> Vertex {
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }
}

/// Uniform overrides applied to every edge / vertex of a catalog space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Weights {
    pub edge_length: f64,
    pub conductance: f64,
    pub measure: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights { edge_length: 1.0, conductance: 1.0, measure: 1.0 }
    }
}

/// The catalog of spaces the library knows how to build.
///
/// Sizes are signed so that nonsensical values coming from configs can be
/// reported instead of wrapping around.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CatalogSpec {
    /// Vertices `0..=n` joined consecutively.
    Path {
        n: i64,
        #[serde(flatten)]
        weights: Weights,
    },
    /// `nx * ny` lattice, vertex `(x, y)` has index `y * nx + x`.
    Grid {
        nx: i64,
        ny: i64,
        #[serde(flatten)]
        weights: Weights,
    },
    SierpinskiGasket {
        level: i64,
        #[serde(flatten)]
        weights: Weights,
    },
    SierpinskiCarpet {
        level: i64,
        #[serde(flatten)]
        weights: Weights,
    },
}

impl CatalogSpec {
    pub fn path(n: i64) -> Self {
        CatalogSpec::Path { n, weights: Weights::default() }
    }

    pub fn grid(nx: i64, ny: i64) -> Self {
        CatalogSpec::Grid { nx, ny, weights: Weights::default() }
    }

    pub fn gasket(level: i64) -> Self {
        CatalogSpec::SierpinskiGasket { level, weights: Weights::default() }
    }

    pub fn carpet(level: i64) -> Self {
        CatalogSpec::SierpinskiCarpet { level, weights: Weights::default() }
    }

    pub fn with_weights(mut self, w: Weights) -> Self {
        match &mut self {
            CatalogSpec::Path { weights, .. }
            | CatalogSpec::Grid { weights, .. }
            | CatalogSpec::SierpinskiGasket { weights, .. }
            | CatalogSpec::SierpinskiCarpet { weights, .. } => *weights = w,
        }
        self
    }

    pub fn weights(&self) -> Weights {
        match self {
            CatalogSpec::Path { weights, .. }
            | CatalogSpec::Grid { weights, .. }
            | CatalogSpec::SierpinskiGasket { weights, .. }
            | CatalogSpec::SierpinskiCarpet { weights, .. } => *weights,
        }
    }
}

/// Sorted vertex subset with O(1) membership.
#[derive(Clone, PartialEq, Eq)]
pub struct VertexSet {
    members: Vec<Vertex>,
    mask: Vec<bool>,
}

impl VertexSet {
    pub fn new(universe: usize, vertices: impl IntoIterator<Item = Vertex>) -> Self {
        let mut mask = vec![false; universe];
        for v in vertices {
            mask[v] = true;
        }
        let members = mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
        VertexSet { members, mask }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        let members = mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect();
        VertexSet { members, mask }
    }

    pub fn all(universe: usize) -> Self {
        VertexSet { members: (0..universe).collect(), mask: vec![true; universe] }
    }

    pub fn empty(universe: usize) -> Self {
        VertexSet { members: Vec::new(), mask: vec![false; universe] }
    }

    #[inline]
    pub fn contains(&self, v: Vertex) -> bool {
        self.mask.get(v).copied().unwrap_or(false)
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.members.iter().copied()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn universe(&self) -> usize {
        self.mask.len()
    }

    pub fn complement(&self) -> VertexSet {
        VertexSet::from_mask(self.mask.iter().map(|b| !b).collect())
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        VertexSet::from_mask(self.mask.iter().zip(&other.mask).map(|(a, b)| *a || *b).collect())
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet::from_mask(self.mask.iter().zip(&other.mask).map(|(a, b)| *a && *b).collect())
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet::from_mask(self.mask.iter().zip(&other.mask).map(|(a, b)| *a && !*b).collect())
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.members.iter().all(|&v| other.contains(v))
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.members.iter()).finish()
    }
}

/// Open ball `{ y : d(center, y) < radius }`, possibly intersected with a subset.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    pub center: Vertex,
    pub radius: f64,
    pub members: Vec<Vertex>,
}

impl Ball {
    pub fn contains(&self, v: Vertex) -> bool {
        self.members.binary_search(&v).is_ok()
    }

    pub fn to_set(&self, universe: usize) -> VertexSet {
        VertexSet::new(universe, self.members.iter().copied())
    }
}

/// Power scale function `Psi(r) = c * r^beta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleFunction {
    pub c: f64,
    pub beta: f64,
}

impl ScaleFunction {
    pub fn new(c: f64, beta: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) || !(beta > 1.0 && beta.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "scale function needs c > 0 and beta > 1, got c = {c}, beta = {beta}"
            )));
        }
        Ok(ScaleFunction { c, beta })
    }

    pub fn diffusive() -> Self {
        ScaleFunction { c: 1.0, beta: 2.0 }
    }

    pub fn psi(&self, r: f64) -> f64 {
        if r.is_infinite() {
            return f64::INFINITY;
        }
        self.c * r.powf(self.beta)
    }

    pub fn inverse(&self, t: f64) -> f64 {
        (t / self.c).powf(1.0 / self.beta)
    }

    /// `sup_{r > 0} (s / r - 1 / Psi(r))` in closed form.
    ///
    /// For `Psi = c r^beta` the maximizer is `1/r = (c s / beta)^{1/(beta-1)}`,
    /// which gives `(beta-1) beta^{-beta/(beta-1)} c^{1/(beta-1)} s^{beta/(beta-1)}`.
    pub fn phi(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let b = self.beta;
        let q = b / (b - 1.0);
        (b - 1.0) * b.powf(-q) * self.c.powf(1.0 / (b - 1.0)) * s.powf(q)
    }
}

/// Doubling constant `D0` and the associated volume exponent `alpha = log2 D0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Doubling {
    pub constant: f64,
    pub alpha: f64,
}

impl Doubling {
    fn from_constant(constant: f64) -> Self {
        Doubling { constant, alpha: constant.log2() }
    }
}

#[derive(Serialize, Deserialize)]
struct SpaceDocument {
    vertices: usize,
    edges: Vec<(usize, usize, f64, f64)>,
    measure: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<[f64; 2]>>,
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem(f64, Vertex);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A finite connected weighted graph with a vertex measure.
#[derive(Clone)]
pub struct Space {
    edges: Vec<Edge>,
    measure: Vec<f64>,
    adjacency: Vec<Vec<(Vertex, usize)>>,
    coords: Option<Vec<[f64; 2]>>,
    distances: OnceLock<Vec<f64>>,
    spectrum: OnceLock<Spectrum>,
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Space")
            .field("vertices", &self.len())
            .field("edges", &self.edges.len())
            .field("total_measure", &self.total_measure())
            .finish()
    }
}

impl Space {
    pub fn new(vertices: usize, edges: Vec<Edge>, measure: Vec<f64>) -> Result<Self> {
        if vertices == 0 {
            return Err(Error::InvalidSpace("no vertices".into()));
        }
        if measure.len() != vertices {
            return Err(Error::InvalidSpace(format!(
                "measure has {} entries for {} vertices",
                measure.len(),
                vertices
            )));
        }
        if let Some((x, m)) = measure.iter().enumerate().find(|(_, m)| !(**m > 0.0 && m.is_finite())) {
            return Err(Error::InvalidSpace(format!("measure of vertex {x} is {m}, must be positive")));
        }
        let mut adjacency = vec![Vec::new(); vertices];
        for (k, e) in edges.iter().enumerate() {
            if e.u >= vertices || e.v >= vertices || e.u == e.v {
                return Err(Error::InvalidSpace(format!("edge {k} ({}, {}) is invalid", e.u, e.v)));
            }
            if !(e.length > 0.0 && e.length.is_finite()) || !(e.conductance > 0.0 && e.conductance.is_finite()) {
                return Err(Error::InvalidSpace(format!(
                    "edge {k} has length {} and conductance {}, both must be positive",
                    e.length, e.conductance
                )));
            }
            adjacency[e.u].push((e.v, k));
            adjacency[e.v].push((e.u, k));
        }
        let space = Space {
            edges,
            measure,
            adjacency,
            coords: None,
            distances: OnceLock::new(),
            spectrum: OnceLock::new(),
        };
        if !space.is_connected_within(&VertexSet::all(vertices)) {
            return Err(Error::InvalidSpace("graph is not connected".into()));
        }
        Ok(space)
    }

    pub fn with_coords(mut self, coords: Vec<[f64; 2]>) -> Result<Self> {
        if coords.len() != self.len() {
            return Err(Error::InvalidSpace("coordinate count does not match vertex count".into()));
        }
        self.coords = Some(coords);
        Ok(self)
    }

    /// Builds a catalog space with deterministic vertex ordering.
    pub fn from_catalog(spec: &CatalogSpec) -> Result<Self> {
        let w = spec.weights();
        if !(w.edge_length > 0.0) || !(w.conductance > 0.0) || !(w.measure > 0.0) {
            return Err(Error::InvalidSpec("weight overrides must be positive".into()));
        }
        let (n, pairs, coords) = match *spec {
            CatalogSpec::Path { n, .. } => {
                if n <= 0 {
                    return Err(Error::InvalidSpec(format!("path length {n} must be positive")));
                }
                let n = n as usize;
                let pairs: Vec<(usize, usize)> = (0..n).map(|i| (i, i + 1)).collect();
                let coords = (0..=n).map(|i| [i as f64, 0.0]).collect();
                (n + 1, pairs, coords)
            }
            CatalogSpec::Grid { nx, ny, .. } => {
                if nx <= 0 || ny <= 0 || nx * ny < 2 {
                    return Err(Error::InvalidSpec(format!("grid {nx}x{ny} needs positive sides and two vertices")));
                }
                let (nx, ny) = (nx as usize, ny as usize);
                let mut pairs = Vec::new();
                for y in 0..ny {
                    for x in 0..nx {
                        let i = y * nx + x;
                        if x + 1 < nx {
                            pairs.push((i, i + 1));
                        }
                        if y + 1 < ny {
                            pairs.push((i, i + nx));
                        }
                    }
                }
                let coords = (0..nx * ny).map(|i| [(i % nx) as f64, (i / nx) as f64]).collect();
                (nx * ny, pairs, coords)
            }
            CatalogSpec::SierpinskiGasket { level, .. } => {
                if !(0..=10).contains(&level) {
                    return Err(Error::InvalidSpec(format!("gasket level {level} must lie in 0..=10")));
                }
                let (lattice, pairs) = gasket_graph(level as u32);
                let h = 3f64.sqrt() / 2.0;
                let coords = lattice.iter().map(|&(a, b)| [a as f64 + b as f64 / 2.0, b as f64 * h]).collect();
                (lattice.len(), pairs, coords)
            }
            CatalogSpec::SierpinskiCarpet { level, .. } => {
                if !(0..=6).contains(&level) {
                    return Err(Error::InvalidSpec(format!("carpet level {level} must lie in 0..=6")));
                }
                let (lattice, pairs) = carpet_graph(level as u32);
                let coords = lattice.iter().map(|&(a, b)| [a as f64, b as f64]).collect();
                (lattice.len(), pairs, coords)
            }
        };
        let edges = pairs.into_iter().map(|(u, v)| Edge::new(u, v, w.edge_length, w.conductance)).collect();
        let coords: Vec<[f64; 2]> = coords;
        let coords = coords.into_iter().map(|[x, y]| [x * w.edge_length, y * w.edge_length]).collect();
        Space::new(n, edges, vec![w.measure; n])?.with_coords(coords)
    }

    pub fn len(&self) -> usize {
        self.measure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    pub fn coords(&self) -> Option<&[[f64; 2]]> {
        self.coords.as_deref()
    }

    /// `(neighbor, edge index)` pairs of `x`.
    pub fn neighbors(&self, x: Vertex) -> &[(Vertex, usize)] {
        &self.adjacency[x]
    }

    pub fn are_adjacent(&self, x: Vertex, y: Vertex) -> bool {
        self.adjacency[x].iter().any(|&(z, _)| z == y)
    }

    /// Total conductance `sum_y w_xy` at `x`.
    pub fn total_conductance(&self, x: Vertex) -> f64 {
        self.adjacency[x].iter().map(|&(_, k)| self.edges[k].conductance).sum()
    }

    pub fn total_measure(&self) -> f64 {
        self.measure.iter().sum()
    }

    pub fn mass<I: IntoIterator<Item = Vertex>>(&self, vertices: I) -> f64 {
        vertices.into_iter().map(|v| self.measure[v]).sum()
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn spectrum_cell(&self) -> &OnceLock<Spectrum> {
        &self.spectrum
    }

    /// Multi-source shortest-path distances, optionally confined to `allowed`.
    pub fn shortest_paths(&self, sources: &[Vertex], allowed: Option<&VertexSet>) -> Vec<f64> {
        let n = self.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            if allowed.is_none_or(|a| a.contains(s)) {
                dist[s] = 0.0;
                heap.push(HeapItem(0.0, s));
            }
        }
        while let Some(HeapItem(d, x)) = heap.pop() {
            if d > dist[x] {
                continue;
            }
            for &(y, k) in &self.adjacency[x] {
                if allowed.is_some_and(|a| !a.contains(y)) {
                    continue;
                }
                let nd = d + self.edges[k].length;
                if nd < dist[y] {
                    dist[y] = nd;
                    heap.push(HeapItem(nd, y));
                }
            }
        }
        dist
    }

    /// Dense all-pairs distance matrix, computed on first use.
    pub fn distances(&self) -> &[f64] {
        self.distances.get_or_init(|| {
            let n = self.len();
            let mut all = Vec::with_capacity(n * n);
            for x in 0..n {
                all.extend(self.shortest_paths(&[x], None));
            }
            all
        })
    }

    #[inline]
    pub fn distance(&self, x: Vertex, y: Vertex) -> f64 {
        self.distances()[x * self.len() + y]
    }

    pub fn distance_row(&self, x: Vertex) -> &[f64] {
        let n = self.len();
        &self.distances()[x * n..(x + 1) * n]
    }

    /// `min_{y in set} d(x, y)`.
    pub fn distance_to_set(&self, x: Vertex, set: &VertexSet) -> f64 {
        let row = self.distance_row(x);
        set.iter().map(|y| row[y]).fold(f64::INFINITY, f64::min)
    }

    pub fn diameter(&self) -> f64 {
        self.distances().iter().copied().fold(0.0, f64::max)
    }

    pub fn diameter_of(&self, set: &VertexSet) -> f64 {
        let mut diam: f64 = 0.0;
        for x in set.iter() {
            let row = self.distance_row(x);
            for y in set.iter() {
                diam = diam.max(row[y]);
            }
        }
        diam
    }

    pub fn ball(&self, x: Vertex, r: f64) -> Result<Ball> {
        self.ball_inner(x, r, None)
    }

    /// `subset ∩ B(x, r)`.
    pub fn ball_within(&self, x: Vertex, r: f64, subset: &VertexSet) -> Result<Ball> {
        self.ball_inner(x, r, Some(subset))
    }

    /// Ball together with its measure.
    pub fn ball_and_measure(&self, x: Vertex, r: f64, subset: Option<&VertexSet>) -> Result<(Ball, f64)> {
        let ball = self.ball_inner(x, r, subset)?;
        let m = self.mass(ball.members.iter().copied());
        Ok((ball, m))
    }

    fn ball_inner(&self, x: Vertex, r: f64, subset: Option<&VertexSet>) -> Result<Ball> {
        if r.is_nan() || r <= 0.0 {
            return Err(Error::InvalidRadius(r));
        }
        if x >= self.len() {
            return Err(Error::InvalidInput(format!("vertex {x} out of range")));
        }
        let row = self.distance_row(x);
        let members = (0..self.len())
            .filter(|&y| row[y] < r && subset.is_none_or(|s| s.contains(y)))
            .collect();
        Ok(Ball { center: x, radius: r, members })
    }

    pub fn is_connected_within(&self, set: &VertexSet) -> bool {
        let Some(start) = set.iter().next() else {
            return false;
        };
        let mut seen = vec![false; self.len()];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        let mut count = 1;
        while let Some(x) = queue.pop_front() {
            for &(y, _) in &self.adjacency[x] {
                if set.contains(y) && !seen[y] {
                    seen[y] = true;
                    count += 1;
                    queue.push_back(y);
                }
            }
        }
        count == set.len()
    }

    /// The subgraph induced on `set`, with restricted measure and coordinates.
    ///
    /// Returns the new space and the map from new to old vertex indices.
    pub fn induced_subspace(&self, set: &VertexSet) -> Result<(Space, Vec<Vertex>)> {
        if !self.is_connected_within(set) {
            return Err(Error::InvalidDomain("induced subgraph is disconnected".into()));
        }
        let to_old: Vec<Vertex> = set.iter().collect();
        let mut to_new = vec![usize::MAX; self.len()];
        for (i, &v) in to_old.iter().enumerate() {
            to_new[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| set.contains(e.u) && set.contains(e.v))
            .map(|e| Edge::new(to_new[e.u], to_new[e.v], e.length, e.conductance))
            .collect();
        let measure = to_old.iter().map(|&v| self.measure[v]).collect();
        let mut space = Space::new(to_old.len(), edges, measure)?;
        if let Some(c) = &self.coords {
            space.coords = Some(to_old.iter().map(|&v| c[v]).collect());
        }
        Ok((space, to_old))
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = SpaceDocument {
            vertices: self.len(),
            edges: self.edges.iter().map(|e| (e.u, e.v, e.length, e.conductance)).collect(),
            measure: self.measure.clone(),
            coords: self.coords.clone(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: SpaceDocument = serde_json::from_str(s)?;
        let edges = doc.edges.into_iter().map(|(u, v, l, c)| Edge::new(u, v, l, c)).collect();
        let space = Space::new(doc.vertices, edges, doc.measure)?;
        match doc.coords {
            Some(c) => space.with_coords(c),
            None => Ok(space),
        }
    }

    /// `sup m(B(x,2r) ∩ S) / m(B(x,r) ∩ S)` over `x ∈ S` and the given radii.
    pub fn doubling_constant(&self, subset: &VertexSet, radii: &[f64]) -> Result<Doubling> {
        if subset.is_empty() {
            return Err(Error::InvalidInput("doubling constant of an empty set".into()));
        }
        if let Some(&r) = radii.iter().find(|r| !(**r > 0.0)) {
            return Err(Error::InvalidRadius(r));
        }
        let mut worst: f64 = 1.0;
        for x in subset.iter() {
            let row = self.distance_row(x);
            for &r in radii {
                let (mut inner, mut outer) = (0.0, 0.0);
                for y in subset.iter() {
                    let d = row[y];
                    if d < 2.0 * r {
                        outer += self.measure[y];
                        if d < r {
                            inner += self.measure[y];
                        }
                    }
                }
                worst = worst.max(outer / inner);
            }
        }
        Ok(Doubling::from_constant(worst))
    }

    /// Doubling constant over every radius at which some ratio can jump.
    ///
    /// With open balls, `m(B(x, 2r))` increases just above `r = d/2` for each
    /// distance value `d`, so probing `r = d/2 + eta` realizes the supremum.
    pub fn doubling_constant_exhaustive(&self, subset: &VertexSet) -> Result<Doubling> {
        let mut values: Vec<f64> = Vec::new();
        for x in subset.iter() {
            let row = self.distance_row(x);
            values.extend(subset.iter().map(|y| row[y]).filter(|d| *d > 0.0));
        }
        values.sort_by(f64::total_cmp);
        values.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
        let eta = 1e-9 * self.min_edge_length();
        let radii: Vec<f64> = values.iter().map(|d| d / 2.0 + eta).collect();
        if radii.is_empty() {
            return Ok(Doubling::from_constant(1.0));
        }
        self.doubling_constant(subset, &radii)
    }

    /// Both sides of the volume comparison
    /// `m(S ∩ B(x,s)) <= D0^2 ((d(x,y)+s)/r)^alpha m(S ∩ B(y,r))` for `0 < r < s`.
    pub fn volume_comparison(
        &self,
        subset: &VertexSet,
        doubling: Doubling,
        x: Vertex,
        y: Vertex,
        r: f64,
        s: f64,
    ) -> Result<(f64, f64)> {
        if !(0.0 < r && r < s) {
            return Err(Error::InvalidInput(format!("need 0 < r < s, got r = {r}, s = {s}")));
        }
        let (_, lhs) = self.ball_and_measure(x, s, Some(subset))?;
        let (_, small) = self.ball_and_measure(y, r, Some(subset))?;
        let ratio = (self.distance(x, y) + s) / r;
        Ok((lhs, doubling.constant.powi(2) * ratio.powf(doubling.alpha) * small))
    }

    /// Greedy maximal `r`-separated subset of `subset`, scanning `order`.
    ///
    /// Vertices of `order` outside `subset` are ignored; subset vertices missing
    /// from `order` are scanned afterwards in ascending index.
    pub fn rnet(&self, subset: &VertexSet, r: f64, order: &[Vertex]) -> Result<Vec<Vertex>> {
        if subset.is_empty() {
            return Err(Error::InvalidInput("r-net of an empty set".into()));
        }
        if r.is_nan() || r <= 0.0 {
            return Err(Error::InvalidRadius(r));
        }
        let mut scanned = vec![false; self.len()];
        let sequence = order
            .iter()
            .copied()
            .filter(|&v| subset.contains(v))
            .chain(subset.iter())
            .filter(|&v| !std::mem::replace(&mut scanned[v], true))
            .collect::<Vec<_>>();
        let mut net: Vec<Vertex> = Vec::new();
        for v in sequence {
            let row = self.distance_row(v);
            if net.iter().all(|&p| row[p] >= r) {
                net.push(v);
            }
        }
        Ok(net)
    }
}

/// Level-`k` gasket on skew lattice coordinates; vertices are numbered by first
/// appearance in a depth-first traversal of the cells.
fn gasket_graph(level: u32) -> (Vec<(i64, i64)>, Vec<(usize, usize)>) {
    struct Builder {
        index: HashMap<(i64, i64), usize>,
        points: Vec<(i64, i64)>,
        edges: Vec<(usize, usize)>,
    }
    impl Builder {
        fn vertex(&mut self, p: (i64, i64)) -> usize {
            let next = self.points.len();
            *self.index.entry(p).or_insert_with(|| {
                self.points.push(p);
                next
            })
        }
        fn cell(&mut self, a: i64, b: i64, size: i64) {
            if size == 1 {
                let p0 = self.vertex((a, b));
                let p1 = self.vertex((a + 1, b));
                let p2 = self.vertex((a, b + 1));
                self.edges.extend([(p0, p1), (p0, p2), (p1, p2)]);
            } else {
                let h = size / 2;
                self.cell(a, b, h);
                self.cell(a + h, b, h);
                self.cell(a, b + h, h);
            }
        }
    }
    let mut b = Builder { index: HashMap::new(), points: Vec::new(), edges: Vec::new() };
    b.cell(0, 0, 1 << level);
    (b.points, b.edges)
}

/// Level-`k` carpet as the graph of corners and sides of the retained cells.
fn carpet_graph(level: u32) -> (Vec<(i64, i64)>, Vec<(usize, usize)>) {
    struct Builder {
        index: HashMap<(i64, i64), usize>,
        points: Vec<(i64, i64)>,
        edges: Vec<(usize, usize)>,
        seen: std::collections::HashSet<(usize, usize)>,
    }
    impl Builder {
        fn vertex(&mut self, p: (i64, i64)) -> usize {
            let next = self.points.len();
            *self.index.entry(p).or_insert_with(|| {
                self.points.push(p);
                next
            })
        }
        fn side(&mut self, p: (i64, i64), q: (i64, i64)) {
            let (u, v) = (self.vertex(p), self.vertex(q));
            let key = (u.min(v), u.max(v));
            if self.seen.insert(key) {
                self.edges.push((u, v));
            }
        }
        fn cell(&mut self, a: i64, b: i64, size: i64) {
            if size == 1 {
                let c = [(a, b), (a + 1, b), (a + 1, b + 1), (a, b + 1)];
                for i in 0..4 {
                    self.side(c[i], c[(i + 1) % 4]);
                }
                return;
            }
            let t = size / 3;
            for j in 0..3 {
                for i in 0..3 {
                    if i == 1 && j == 1 {
                        continue;
                    }
                    self.cell(a + i * t, b + j * t, t);
                }
            }
        }
    }
    let mut b = Builder {
        index: HashMap::new(),
        points: Vec::new(),
        edges: Vec::new(),
        seen: Default::default(),
    };
    b.cell(0, 0, 3i64.pow(level));
    (b.points, b.edges)
}
