//! ε-Whitney covers of `U` (interior) and `V` (exterior), near-ball sets,
//! central balls, chains and Whitney graphs.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::domains::{best_corkscrew, find_uniform_curve, Curve, DomainDecomposition};
use crate::error::{Error, Result};
use crate::mmspace::{Space, Vertex, VertexSet};
use crate::report::{CheckRecord, CheckReport};

/// Relative slack for closed inequalities evaluated in floating point.
const REL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Interior,
    Exterior,
}

impl Side {
    /// Dilation used for graph adjacency: 3 inside, 6 outside.
    pub fn graph_dilation(self) -> f64 {
        match self {
            Side::Interior => 3.0,
            Side::Exterior => 6.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WhitneyBall {
    pub center: Vertex,
    pub radius: f64,
    pub members: Vec<Vertex>,
    /// `B(center, 3 radius)` within the covered set.
    pub dilate3: Vec<Vertex>,
}

#[derive(Clone, Debug)]
pub struct WhitneyCover {
    pub epsilon: f64,
    pub side: Side,
    pub balls: Vec<WhitneyBall>,
    /// Distance to the boundary of the covered set, per vertex.
    pub delta: Vec<f64>,
    pub covered: VertexSet,
}

#[derive(Serialize, Deserialize)]
struct CoverDocument {
    epsilon: f64,
    side: Side,
    balls: Vec<(Vertex, f64)>,
}

/// `K_ε = 2(1 + ε)`.
pub fn k_epsilon(eps: f64) -> f64 {
    2.0 * (1.0 + eps)
}

/// Window `((1-2ε)/(1+ε), (1+4ε)/(1+ε))` for `δ(y)/δ(x_i)`, `y ∈ 3B_i`.
pub fn whitb_window(eps: f64) -> (f64, f64) {
    ((1.0 - 2.0 * eps) / (1.0 + eps), (1.0 + 4.0 * eps) / (1.0 + eps))
}

/// Window for `r_i / r_j` when the `λ`-dilates meet.
pub fn whitc_window(eps: f64, lambda: f64) -> (f64, f64) {
    let q = (1.0 - (lambda - 1.0) * eps) / (1.0 + (lambda + 1.0) * eps);
    (q, 1.0 / q)
}

/// Upper factor in `d(x_i, x_j) <= λ (1 + ρ) min(r_i, r_j)`.
pub fn distnei_factor(eps: f64, lambda: f64) -> f64 {
    lambda * (1.0 + whitc_window(eps, lambda).1)
}

/// Central-ball radius window `[ε/(3A(4+ε)) r, 2ε/(1-2ε) r]`.
pub fn central_window(eps: f64, a: f64, r: f64) -> (f64, f64) {
    (eps / (3.0 * a * (4.0 + eps)) * r, 2.0 * eps / (1.0 - 2.0 * eps) * r)
}

/// Radius factor for chain balls: `r_j <= W r`.
pub fn chain_radius_factor(eps: f64, a: f64) -> f64 {
    (a * (4.0 * eps + 1.0) + 1.0 - 2.0 * eps) * eps / (1.0 - 2.0 * eps).powi(2)
}

/// Containment factor `C_0` with chain balls inside `B_U(x, C_0 r)`.
pub fn chain_containment_factor(eps: f64, a: f64) -> f64 {
    a * (1.0 + 4.0 * eps) / (1.0 - 2.0 * eps) + 4.0 * chain_radius_factor(eps, a)
}

/// Constant `C_1` in `d(x_j, x_l) <= C_1 r_j`, taking the worst of the three
/// cases that bound `r_j` from below.
pub fn chain_distance_factor(eps: f64, a: f64) -> f64 {
    let w = chain_radius_factor(eps, a);
    let reach = 2.0 + 3.0 * w + a * (4.0 * eps + 1.0) / (1.0 - 2.0 * eps);
    let c6 = (1.0 - 2.0 * eps) * eps / (3.0 * a * (4.0 + eps) * (1.0 + 4.0 * eps));
    let c8 = eps * eps / (a * a * (4.0 + eps) * (1.0 + 4.0 * eps));
    let c9 = a * (1.0 + 4.0 * eps) / eps + 3.0;
    (reach / c6).max(reach / c8).max(c9)
}

fn intersects(a: &[Vertex], b: &[Vertex]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

/// Sets meet, or touch across a graph edge (the mesh analogue of meeting).
fn linked(space: &Space, a: &[Vertex], b: &[Vertex]) -> bool {
    intersects(a, b)
        || a.iter().any(|&x| space.neighbors(x).iter().any(|&(y, _)| b.binary_search(&y).is_ok()))
}

impl WhitneyCover {
    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// `covered ∩ B(x_i, λ r_i)`.
    pub fn dilate(&self, space: &Space, i: usize, lambda: f64) -> Vec<Vertex> {
        let b = &self.balls[i];
        if lambda == 3.0 {
            return b.dilate3.clone();
        }
        let row = space.distance_row(b.center);
        self.covered.iter().filter(|&y| row[y] < lambda * b.radius).collect()
    }

    pub fn dilates(&self, space: &Space, lambda: f64) -> Vec<Vec<Vertex>> {
        (0..self.len()).map(|i| self.dilate(space, i, lambda)).collect()
    }

    /// Index pairs `i < j` whose `λ`-dilates meet.
    pub fn meeting_pairs(&self, space: &Space, lambda: f64, dilates: &[Vec<Vertex>]) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for i in 0..self.len() {
            let row = space.distance_row(self.balls[i].center);
            for j in i + 1..self.len() {
                let reach = lambda * (self.balls[i].radius + self.balls[j].radius);
                if row[self.balls[j].center] < reach && intersects(&dilates[i], &dilates[j]) {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    /// Lowest-index ball whose 3-dilate contains `v`.
    pub fn covering_ball(&self, v: Vertex) -> Option<usize> {
        self.balls.iter().position(|b| b.dilate3.binary_search(&v).is_ok())
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = CoverDocument {
            epsilon: self.epsilon,
            side: self.side,
            balls: self.balls.iter().map(|b| (b.center, b.radius)).collect(),
        };
        Ok(serde_json::to_string(&doc)?)
    }

    /// Reloads a serialized cover, recomputing ball members.
    pub fn from_json(space: &Space, dom: &DomainDecomposition, s: &str) -> Result<Self> {
        let doc: CoverDocument = serde_json::from_str(s)?;
        let (covered, delta) = side_data(dom, doc.side);
        let balls = doc
            .balls
            .into_iter()
            .map(|(c, r)| make_ball(space, &covered, c, r))
            .collect::<Result<Vec<_>>>()?;
        Ok(WhitneyCover { epsilon: doc.epsilon, side: doc.side, balls, delta, covered })
    }
}

fn side_data(dom: &DomainDecomposition, side: Side) -> (VertexSet, Vec<f64>) {
    match side {
        Side::Interior => (dom.u.clone(), dom.delta_u.clone()),
        Side::Exterior => (dom.v.clone(), dom.delta_v.clone()),
    }
}

fn make_ball(space: &Space, covered: &VertexSet, center: Vertex, radius: f64) -> Result<WhitneyBall> {
    if center >= space.len() || !covered.contains(center) {
        return Err(Error::InvalidInput(format!("ball center {center} is not in the covered set")));
    }
    let row = space.distance_row(center);
    let members = covered.iter().filter(|&y| row[y] < radius).collect();
    let dilate3 = covered.iter().filter(|&y| row[y] < 3.0 * radius).collect();
    Ok(WhitneyBall { center, radius, members, dilate3 })
}

/// Greedy maximal packing: centers in decreasing `δ` (ties by index), each
/// ball accepted iff disjoint from those already accepted.
///
/// A rejected `y` meets an earlier ball `B(x_i, r_i)` with `r_i >= r_y`, so
/// `d(y, x_i) < 2 r_i` and the 3-dilates cover.
pub fn build_whitney(space: &Space, dom: &DomainDecomposition, side: Side, eps: f64) -> Result<WhitneyCover> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidEpsilon { value: eps, range: "(0, 1/2)" });
    }
    let (covered, delta) = side_data(dom, side);
    if covered.is_empty() {
        return Err(Error::InvalidDomain(format!("{side:?} set is empty")));
    }
    let mut order: Vec<Vertex> = covered.iter().collect();
    order.sort_by(|&a, &b| delta[b].total_cmp(&delta[a]).then(a.cmp(&b)));
    let factor = eps / (1.0 + eps);
    let mut taken = vec![false; space.len()];
    let mut balls = Vec::new();
    for x in order {
        let r = factor * delta[x];
        let row = space.distance_row(x);
        let members: Vec<Vertex> = covered.iter().filter(|&y| row[y] < r).collect();
        if members.iter().any(|&y| taken[y]) {
            continue;
        }
        for &y in &members {
            taken[y] = true;
        }
        let dilate3 = covered.iter().filter(|&y| row[y] < 3.0 * r).collect();
        balls.push(WhitneyBall { center: x, radius: r, members, dilate3 });
    }
    let cover = WhitneyCover { epsilon: eps, side, balls, delta, covered };
    let mut hit = vec![false; space.len()];
    for b in &cover.balls {
        for &y in &b.dilate3 {
            hit[y] = true;
        }
    }
    if let Some(y) = cover.covered.iter().find(|&y| !hit[y]) {
        return Err(Error::Internal(format!("greedy cover misses vertex {y}")));
    }
    Ok(cover)
}

/// Exhaustive validation: disjointness, radius law, covering, distance to the
/// boundary, radius comparison and neighbor distances, bounded overlap, degree.
pub fn validate_whitney(space: &Space, cover: &WhitneyCover) -> CheckReport {
    let eps = cover.epsilon;
    let side = format!("{:?}", cover.side).to_lowercase();
    let mut report = CheckReport::new();
    let tag = |r: CheckRecord| r.param("side", side.clone()).param_f("epsilon", eps);

    let mut owner = vec![usize::MAX; space.len()];
    let mut overlaps = 0usize;
    for (i, b) in cover.balls.iter().enumerate() {
        for &y in &b.members {
            if owner[y] != usize::MAX {
                overlaps += 1;
            }
            owner[y] = i;
        }
    }
    report.push(tag(CheckRecord::upper("whitney.disjoint", overlaps as f64, 0.0)));

    let law = cover
        .balls
        .iter()
        .map(|b| (b.radius - eps / (1.0 + eps) * cover.delta[b.center]).abs() / b.radius)
        .fold(0.0, f64::max);
    report.push(tag(CheckRecord::upper("whitney.radius_law", law, 1e-12)));

    let mut hit = vec![false; space.len()];
    for b in &cover.balls {
        for &y in &b.dilate3 {
            hit[y] = true;
        }
    }
    let missed = cover.covered.iter().filter(|&y| !hit[y]).count();
    report.push(tag(CheckRecord::upper("whitney.covering", missed as f64, 0.0)));

    let (lo, hi) = whitb_window(eps);
    let (mut min_ratio, mut max_ratio) = (f64::INFINITY, 0.0f64);
    for b in &cover.balls {
        for &y in &b.dilate3 {
            let q = cover.delta[y] / cover.delta[b.center];
            min_ratio = min_ratio.min(q);
            max_ratio = max_ratio.max(q);
        }
    }
    report.push(tag(CheckRecord::new("whitney.whitb", min_ratio, min_ratio > lo && max_ratio < hi)
        .param_f("min", min_ratio)
        .param_f("max", max_ratio)
        .param_f("lower", lo)
        .param_f("upper", hi)));

    for lambda in [3.0, 6.0] {
        if (lambda - 1.0) * eps >= 1.0 {
            continue;
        }
        let dilates = cover.dilates(space, lambda);
        let pairs = cover.meeting_pairs(space, lambda, &dilates);
        let (qlo, qhi) = whitc_window(eps, lambda);
        let factor = distnei_factor(eps, lambda);
        let mut bad_c = 0;
        let mut bad_d = 0;
        let mut worst = 1.0f64;
        for &(i, j) in &pairs {
            let (ri, rj) = (cover.balls[i].radius, cover.balls[j].radius);
            let q = ri / rj;
            worst = worst.max(q.max(1.0 / q));
            if q < qlo * (1.0 - REL_TOL) || q > qhi * (1.0 + REL_TOL) {
                bad_c += 1;
            }
            let d = space.distance(cover.balls[i].center, cover.balls[j].center);
            if d < ri.max(rj) * (1.0 - REL_TOL) || d > factor * ri.min(rj) * (1.0 + REL_TOL) {
                bad_d += 1;
            }
        }
        report.push(tag(CheckRecord::upper("whitney.whitc", bad_c as f64, 0.0)
            .param_f("lambda", lambda)
            .param("pairs", pairs.len())
            .param_f("worst_ratio", worst)
            .param_f("window_upper", qhi)));
        report.push(tag(CheckRecord::upper("whitney.distnei", bad_d as f64, 0.0)
            .param_f("lambda", lambda)
            .param("pairs", pairs.len())));
    }

    report.push(tag(CheckRecord::new("whitney.overlap", overlap_count(space, cover) as f64, true)));
    report.push(tag(CheckRecord::new("whitney.degree", six_dilate_degree(space, cover) as f64, true)));
    report
}

/// `max_y sum_i 1_{B(x_i, r_i/ε)}(y)` over the covered set.
pub fn overlap_count(space: &Space, cover: &WhitneyCover) -> usize {
    let mut count = vec![0usize; space.len()];
    for b in &cover.balls {
        let row = space.distance_row(b.center);
        let r = b.radius / cover.epsilon;
        for y in cover.covered.iter() {
            if row[y] < r {
                count[y] += 1;
            }
        }
    }
    cover.covered.iter().map(|y| count[y]).max().unwrap_or(0)
}

/// `max_B #{B' : 6B' ∩ 6B ≠ ∅}`, counting `B` itself.
pub fn six_dilate_degree(space: &Space, cover: &WhitneyCover) -> usize {
    let dilates = cover.dilates(space, 6.0);
    let mut deg = vec![1usize; cover.len()];
    for (i, j) in cover.meeting_pairs(space, 6.0, &dilates) {
        deg[i] += 1;
        deg[j] += 1;
    }
    deg.into_iter().max().unwrap_or(0)
}

/// Near balls `R(B)` of `B = B_U(x, r)` and a central ball.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NearCentral {
    pub center: Vertex,
    pub radius: f64,
    pub near: Vec<usize>,
    pub central: usize,
    pub corkscrew_point: Vertex,
    /// `B_U(x, r) ⊆ ∪ 3B_i`.
    pub covers_ball: bool,
    /// `∪ 3B_i ⊆ B_U(x, 2r)`.
    pub inside_double: bool,
}

pub fn near_and_central(
    space: &Space,
    dom: &DomainDecomposition,
    cover: &WhitneyCover,
    x: Vertex,
    r: f64,
    a: f64,
) -> Result<NearCentral> {
    if cover.side != Side::Interior {
        return Err(Error::InvalidInput("central balls need an interior cover".into()));
    }
    if !(cover.epsilon < 1.0 / 14.0) {
        return Err(Error::InvalidEpsilon { value: cover.epsilon, range: "(0, 1/14)" });
    }
    if !dom.closure.contains(x) {
        return Err(Error::InvalidInput(format!("center {x} is not in the closure of U")));
    }
    if r < dom.delta_u[x] {
        return Err(Error::InvalidInput(format!("radius {r} is below the boundary distance {}", dom.delta_u[x])));
    }
    let ball = space.ball_within(x, r, &dom.u)?;
    let near: Vec<usize> = (0..cover.len())
        .filter(|&i| intersects(&cover.balls[i].dilate3, &ball.members))
        .collect();
    let mut union = vec![false; space.len()];
    for &i in &near {
        for &y in &cover.balls[i].dilate3 {
            union[y] = true;
        }
    }
    let covers_ball = ball.members.iter().all(|&y| union[y]);
    let row = space.distance_row(x);
    let inside_double = (0..space.len()).filter(|&y| union[y]).all(|y| row[y] < 2.0 * r);

    let (lo, hi) = central_window(cover.epsilon, a, r);
    let in_window = |i: usize| {
        let ri = cover.balls[i].radius;
        ri >= lo * (1.0 - REL_TOL) && ri <= hi * (1.0 + REL_TOL)
    };
    let (_, point) = best_corkscrew(space, dom, x, r)?;
    let point = point.ok_or_else(|| Error::Internal("ball misses U".into()))?;
    let from_corkscrew = near
        .iter()
        .copied()
        .find(|&i| cover.balls[i].dilate3.binary_search(&point).is_ok() && in_window(i));
    let central = from_corkscrew
        .or_else(|| near.iter().copied().find(|&i| in_window(i)))
        .ok_or(Error::NoCentralBall { center: x, radius: r, lower: lo, upper: hi })?;
    Ok(NearCentral { center: x, radius: r, near, central, corkscrew_point: point, covers_ball, inside_double })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChainRecord {
    pub target: usize,
    pub balls: Vec<usize>,
    pub curve: Curve,
    /// Consecutive 3-dilates are linked (meet or touch) and every 3-dilate meets the curve.
    pub wu1: bool,
}

impl ChainRecord {
    pub fn length(&self) -> usize {
        self.balls.len() - 1
    }
}

/// Chain from ball `b0` to ball `d` along a uniform curve between the centers.
pub fn chain(
    space: &Space,
    dom: &DomainDecomposition,
    cover: &WhitneyCover,
    b0: usize,
    d: usize,
    a: f64,
) -> Result<ChainRecord> {
    let (x0, xd) = (cover.balls[b0].center, cover.balls[d].center);
    let curve = find_uniform_curve(space, dom, x0, xd, a)
        .map_err(|e| Error::ChainUnavailable(e.to_string()))?;
    let path = &curve.path;
    let in3 = |i: usize, v: Vertex| cover.balls[i].dilate3.binary_search(&v).is_ok();
    let last_on = |i: usize| path.iter().rposition(|&v| in3(i, v));
    let mut balls = vec![b0];
    while *balls.last().unwrap() != d {
        let cur = *balls.last().unwrap();
        if linked(space, &cover.balls[cur].dilate3, &cover.balls[d].dilate3) {
            balls.push(d);
            break;
        }
        let s = last_on(cur).ok_or_else(|| Error::Internal("chain ball left the curve".into()))?;
        if s + 1 >= path.len() {
            return Err(Error::Internal("curve ends outside the target dilate".into()));
        }
        // Among balls whose 3-dilate contains γ(s), take the one reaching
        // furthest along γ; otherwise fall back to a ball covering γ(s+1).
        let mut best: Option<(usize, usize)> = None;
        for i in 0..cover.len() {
            if in3(i, path[s]) {
                if let Some(t) = last_on(i) {
                    if t > s && best.is_none_or(|(bt, _)| t > bt) {
                        best = Some((t, i));
                    }
                }
            }
        }
        let next = match best {
            Some((_, i)) => i,
            None => cover
                .covering_ball(path[s + 1])
                .ok_or(Error::CoverDefect(path[s + 1]))?,
        };
        balls.push(next);
    }
    let wu1 = balls.windows(2).all(|w| linked(space, &cover.balls[w[0]].dilate3, &cover.balls[w[1]].dilate3))
        && balls.iter().all(|&i| path.iter().any(|&v| in3(i, v)));
    Ok(ChainRecord { target: d, balls, curve, wu1 })
}

/// Builds chains from the central ball to every near ball and checks the
/// chain radius, containment and distance bounds.
pub fn chain_checks(
    space: &Space,
    dom: &DomainDecomposition,
    cover: &WhitneyCover,
    nc: &NearCentral,
    a: f64,
) -> Result<(Vec<ChainRecord>, CheckReport)> {
    let eps = cover.epsilon;
    let (w, c0, c1) = (chain_radius_factor(eps, a), chain_containment_factor(eps, a), chain_distance_factor(eps, a));
    let r = nc.radius;
    let mut chains = Vec::new();
    let (mut wu1, mut wu2_r, mut wu2_c, mut wu3_d, mut wu3_c) = (true, 0.0f64, 0.0f64, 0.0f64, true);
    let mut curves_ok = true;
    for &d in &nc.near {
        let ch = chain(space, dom, cover, nc.central, d, a)?;
        wu1 &= ch.wu1;
        curves_ok &= ch.curve.meets_target;
        let xl = cover.balls[d].center;
        let row = space.distance_row(nc.center);
        for &j in &ch.balls {
            let b = &cover.balls[j];
            wu2_r = wu2_r.max(b.radius / r);
            wu2_c = wu2_c.max((row[b.center] + b.radius) / r);
            let dj = space.distance(b.center, xl);
            wu3_d = wu3_d.max(dj / b.radius);
            let reach = (2.0 * c1 + 1.0) * b.radius;
            let rowj = space.distance_row(b.center);
            wu3_c &= cover.balls[d].members.iter().all(|&y| rowj[y] < reach);
        }
        chains.push(ch);
    }
    let tag = |rec: CheckRecord| rec.param("center", nc.center).param_f("r", r).param_f("A", a);
    let mut report = CheckReport::new();
    report.push(tag(CheckRecord::new("chain.wu1", wu1 as u8 as f64, wu1).param("chains", chains.len())));
    report.push(tag(CheckRecord::upper("chain.wu2_radius", wu2_r, w * (1.0 + REL_TOL))));
    report.push(tag(CheckRecord::upper("chain.wu2_containment", wu2_c, c0)));
    report.push(tag(CheckRecord::upper("chain.wu3_distance", wu3_d, c1)));
    report.push(tag(CheckRecord::new("chain.wu3_containment", wu3_c as u8 as f64, wu3_c)));
    let max_len = chains.iter().map(|c| c.length()).max().unwrap_or(0);
    report.push(tag(CheckRecord::new("chain.max_length", max_len as f64, true)
        .note(if curves_ok { "" } else { "some curves exceeded the target A" })));
    Ok((chains, report))
}

/// Whitney graph with hop distances.
#[derive(Clone, Debug)]
pub struct WhitneyGraph {
    pub adjacency: Vec<Vec<usize>>,
    /// Row-major hop counts; `usize::MAX` when unreachable.
    pub hops: Vec<usize>,
}

impl WhitneyGraph {
    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> usize {
        self.hops[i * self.len() + j]
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for (i, nb) in self.adjacency.iter().enumerate() {
            e.extend(nb.iter().filter(|&&j| j > i).map(|&j| (i, j)));
        }
        e
    }
}

/// Adjacent iff the 3-dilates (6-dilates outside) meet, or the balls contain
/// graph-adjacent vertices.
pub fn whitney_graph(space: &Space, cover: &WhitneyCover) -> WhitneyGraph {
    let k = cover.len();
    let dilates = cover.dilates(space, cover.side.graph_dilation());
    let mut adjacency = vec![Vec::new(); k];
    for (i, j) in cover.meeting_pairs(space, cover.side.graph_dilation(), &dilates) {
        adjacency[i].push(j);
        adjacency[j].push(i);
    }
    let mut owner = vec![usize::MAX; space.len()];
    for (i, b) in cover.balls.iter().enumerate() {
        for &y in &b.members {
            owner[y] = i;
        }
    }
    for e in space.edges() {
        let (a, b) = (owner[e.u], owner[e.v]);
        if a != usize::MAX && b != usize::MAX && a != b && !adjacency[a].contains(&b) {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
    }
    for nb in &mut adjacency {
        nb.sort_unstable();
    }
    let mut hops = vec![usize::MAX; k * k];
    for s in 0..k {
        let row = &mut hops[s * k..(s + 1) * k];
        row[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &y in &adjacency[x] {
                if row[y] == usize::MAX {
                    row[y] = row[x] + 1;
                    queue.push_back(y);
                }
            }
        }
    }
    WhitneyGraph { adjacency, hops }
}

/// Both sides of the bounded-degree lemma: the `L`-neighborhood sum and
/// `L C^L M^{2(L+1)}` times the 1-neighborhood sum.
pub fn fuzz_sides(graph: &WhitneyGraph, m: &[f64], f: &[f64], l: usize) -> (f64, f64) {
    let k = graph.len();
    let big_m = graph.max_degree().max(2) as f64;
    let mut c: f64 = 1.0;
    for (i, nb) in graph.adjacency.iter().enumerate() {
        for &j in nb {
            c = c.max(m[i] / m[j]);
        }
    }
    let (mut lhs, mut base) = (0.0, 0.0);
    for x in 0..k {
        for y in 0..k {
            let d = graph.distance(x, y);
            let term = (f[x] - f[y]).powi(2) * m[x];
            if d <= l {
                lhs += term;
            }
            if d <= 1 {
                base += term;
            }
        }
    }
    let factor = l as f64 * c.powi(l as i32) * big_m.powi(2 * (l as i32 + 1));
    (lhs, factor * base)
}
