//! Config-driven pipeline: builds every artifact an enabled experiment needs,
//! runs the experiments in dependency order and collects check records,
//! plot tables and serialized intermediates.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dirichlet::{css_check, partition_checks, partition_of_unity, poincare_constant, CssResult, FieldFunction, Partition};
use crate::domains::{corkscrew_check, find_uniform_curve, DomainDecomposition, DomainSpec};
use crate::error::{Error, Result};
use crate::extension::{boundary_energy, continuity_gap, extend, extension_checks, ExtensionOperator};
use crate::family::{boundary_sample, coordinate_functions, normalized_coords, smooth_fields, standard_family};
use crate::hke::{beta_fit, deep_interior_ratios, default_window, hke_profile, reflected_space, time_grid, BetaFit};
use crate::io::{write_json, Table};
use crate::mmspace::{CatalogSpec, ScaleFunction, Space, Vertex, VertexSet};
use crate::reflection::{build_reflection, validate_reflection, ReflectionMap};
use crate::report::{CheckRecord, CheckReport, Summary};
use crate::row;
use crate::whitney::{
    build_whitney, chain_checks, near_and_central, overlap_count, six_dilate_degree, validate_whitney, whitney_graph, Side,
    WhitneyCover,
};

use super::config::{Experiment, ExperimentConfig, SCHEMA_VERSION};

/// Output of one experiment.
#[derive(Clone, Debug)]
pub struct Section {
    pub experiment: Experiment,
    pub report: CheckReport,
    /// `(file name, table)`.
    pub tables: Vec<(String, Table)>,
    /// `(file name, JSON text)`.
    pub documents: Vec<(String, String)>,
}

impl Section {
    fn new(experiment: Experiment) -> Self {
        Section { experiment, report: CheckReport::new(), tables: Vec::new(), documents: Vec::new() }
    }
}

/// Contents of `report.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub schema_version: u32,
    pub space: CatalogSpec,
    #[serde(default)]
    pub domain: Option<DomainSpec>,
    pub experiments: Vec<Experiment>,
    pub summary: Summary,
    pub records: Vec<crate::report::CheckRecord>,
}

impl RunReport {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }
}

#[derive(Clone, Debug)]
pub struct Run {
    pub report: RunReport,
    pub sections: Vec<Section>,
}

impl Run {
    /// Writes `report.json`, the tables and the serialized artifacts into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("report.json"), &self.report)?;
        for s in &self.sections {
            for (name, t) in &s.tables {
                t.write(&dir.join(name))?;
            }
            for (name, doc) in &s.documents {
                fs::write(dir.join(name), doc)?;
            }
        }
        Ok(())
    }
}

/// Built artifacts shared between experiments.
pub struct Pipeline<'c> {
    pub config: &'c ExperimentConfig,
    pub space: Space,
    pub domain: Option<DomainDecomposition>,
    pub cover_r: Option<WhitneyCover>,
    pub cover_s: Option<WhitneyCover>,
    pub reflection: Option<ReflectionMap>,
    pub partition: Option<Partition>,
    pub operator: Option<ExtensionOperator>,
    pub beta: Option<BetaFit>,
}

/// Validates, builds and runs everything in memory.
pub fn execute(config: &ExperimentConfig) -> Result<Run> {
    config.validate()?;
    let mut p = Pipeline::new(config)?;
    let mut sections = Vec::new();
    for e in config.ordered() {
        let s = p.run(e)?;
        if s.report.records.is_empty() {
            return Err(Error::Internal(format!("experiment {} produced no records", e.name())));
        }
        sections.push(s);
    }
    let mut all = CheckReport::new();
    for s in &sections {
        all.extend(s.report.clone());
    }
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        space: config.space.clone(),
        domain: config.domain.clone(),
        experiments: config.ordered(),
        summary: all.summary(),
        records: all.records,
    };
    Ok(Run { report, sections })
}

/// [`execute`] and write the outputs into `output_dir`.
pub fn run_experiment(config: &ExperimentConfig, output_dir: &Path) -> Result<RunReport> {
    let run = execute(config)?;
    run.write(output_dir)?;
    Ok(run.report)
}

/// Process exit status: 0 all checks pass, 1 a check (or the computation)
/// failed, 2 the config is unusable.
pub fn exit_code(result: &Result<RunReport>) -> i32 {
    match result {
        Ok(r) if r.all_pass() => 0,
        Ok(_) => 1,
        Err(e) if is_config_error(e) => 2,
        Err(_) => 1,
    }
}

pub fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::Config(_) | Error::Dependency(_) | Error::InvalidSpec(_) | Error::InvalidDomain(_) | Error::InvalidEpsilon { .. } | Error::Json(_)
    )
}

/// Vertex of least eccentricity (lowest index among ties).
pub fn central_vertex(space: &Space) -> Vertex {
    let ecc = |x: Vertex| space.distance_row(x).iter().copied().fold(0.0, f64::max);
    (0..space.len()).min_by(|&a, &b| ecc(a).total_cmp(&ecc(b)).then(a.cmp(&b))).unwrap_or(0)
}

/// The `k` vertices of `U` farthest from its complement (ties by index).
pub fn deepest(dom: &DomainDecomposition, k: usize) -> Vec<Vertex> {
    let mut u: Vec<Vertex> = dom.u.iter().collect();
    u.sort_by(|&a, &b| dom.delta_u[b].total_cmp(&dom.delta_u[a]).then(a.cmp(&b)));
    u.truncate(k);
    u.sort_unstable();
    u
}

fn spread(n: usize, k: usize) -> Vec<Vertex> {
    let mut v: Vec<Vertex> = (0..k.min(n)).map(|i| (2 * i + 1) * n / (2 * k.min(n))).collect();
    v.dedup();
    v
}

/// `max / min` of positive finite values; `∞` if any value is infinite or zero.
pub fn spread_ratio(values: &[f64]) -> f64 {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(0.0, f64::max);
    if values.is_empty() {
        1.0
    } else if !(lo > 0.0) || !hi.is_finite() {
        f64::INFINITY
    } else {
        hi / lo
    }
}

impl<'c> Pipeline<'c> {
    pub fn new(config: &'c ExperimentConfig) -> Result<Self> {
        let space = Space::from_catalog(&config.space)?;
        let domain = match &config.domain {
            Some(d) => Some(d.build(&config.space, &space)?),
            None => None,
        };
        Ok(Pipeline {
            config,
            space,
            domain,
            cover_r: None,
            cover_s: None,
            reflection: None,
            partition: None,
            operator: None,
            beta: None,
        })
    }

    fn h(&self) -> f64 {
        self.space.min_edge_length()
    }

    fn dom(&self) -> Result<&DomainDecomposition> {
        self.domain.as_ref().ok_or_else(|| Error::Dependency("experiment needs a domain".into()))
    }

    pub fn psi(&self) -> Result<ScaleFunction> {
        self.config.psi.resolve(self.beta.as_ref().map(|b| b.beta))
    }

    fn boundary_points(&self) -> Result<Vec<Vertex>> {
        Ok(boundary_sample(self.dom()?, self.config.samples.boundary_points))
    }

    /// `(ξ, r)` for sampled boundary points and `radii · h`.
    fn boundary_balls(&self, radii: &[f64]) -> Result<Vec<(Vertex, f64)>> {
        let h = self.h();
        let xs = self.boundary_points()?;
        Ok(radii.iter().flat_map(|&r| xs.iter().map(move |&x| (x, r * h))).collect())
    }

    pub fn run(&mut self, e: Experiment) -> Result<Section> {
        match e {
            Experiment::Geometry => self.geometry(),
            Experiment::Whitney => self.whitney(),
            Experiment::Reflection => self.reflection(),
            Experiment::Poincare => self.poincare(),
            Experiment::Extension => self.extension(),
            Experiment::BoundaryEnergy => self.boundary_energy(),
            Experiment::Css => self.css(),
            Experiment::Hke => self.hke(),
            Experiment::BetaFit => self.beta_fit(),
        }
    }

    fn geometry(&mut self) -> Result<Section> {
        let mut sec = Section::new(Experiment::Geometry);
        let s = &self.space;
        let n = s.len();
        let h = self.h();
        let mut radii = Vec::new();
        let mut r = h;
        while r <= s.diameter() {
            radii.push(r);
            r *= 2.0;
        }
        let dbl = s.doubling_constant(&VertexSet::all(n), &radii)?;
        sec.report.push(
            CheckRecord::new("geometry.doubling", dbl.constant, dbl.constant.is_finite() && dbl.constant >= 1.0)
                .param_f("alpha", dbl.alpha)
                .param("radii", radii.len()),
        );
        let Some(dom) = &self.domain else {
            return Ok(sec);
        };
        let outside = dom.u.complement();
        let mut worst = 0.0f64;
        for x in 0..n {
            let direct = if dom.u.contains(x) { s.distance_to_set(x, &outside) } else { 0.0 };
            worst = worst.max((direct - dom.delta_u[x]).abs());
        }
        let max_delta = dom.delta_u.iter().copied().fold(0.0, f64::max);
        sec.report.push(
            CheckRecord::upper("geometry.delta_u", worst, 1e-12)
                .param_f("max_delta_u", max_delta)
                .param("boundary", dom.boundary.len())
                .param("exterior", dom.v.len())
                .note("largest deviation of δ_U from a direct distance scan"),
        );
        let diam_u = dom.diameter_u(s);
        let samples: Vec<(Vertex, f64)> = self
            .boundary_balls(&self.config.samples.radii)?
            .into_iter()
            .filter(|&(_, r)| r < diam_u / 2.0)
            .collect();
        if !samples.is_empty() {
            sec.report.extend(corkscrew_check(s, dom, self.config.a, &samples)?);
        }
        // Uniform curves between spread-out vertices of U.
        let u: Vec<Vertex> = dom.u.iter().collect();
        let picks: Vec<Vertex> = spread(u.len(), 6).into_iter().map(|i| u[i]).collect();
        let mut worst_a = 1.0f64;
        let mut curves = Table::new(["x", "y", "length", "diam", "measured_a"]);
        for (i, &x) in picks.iter().enumerate() {
            for &y in &picks[i + 1..] {
                let c = find_uniform_curve(s, dom, x, y, self.config.a)?;
                worst_a = worst_a.max(c.measured_a);
                curves.push(row![x, y, c.length, c.diam, c.measured_a]);
            }
        }
        sec.report.push(
            CheckRecord::new("geometry.uniform_a", worst_a, worst_a.is_finite())
                .param_f("target", self.config.a)
                .param("pairs", curves.rows.len())
                .note("best measured A over sampled pairs (heuristic search)"),
        );
        let mut t = Table::new(["vertex", "x", "y", "delta_u"]);
        let coords = s.coords();
        for v in 0..n {
            let p = coords.map(|c| c[v]).unwrap_or([v as f64, 0.0]);
            t.push(row![v, p[0], p[1], dom.delta_u[v]]);
        }
        sec.tables.push(("geometry_delta.dat".into(), t));
        sec.tables.push(("geometry_curves.dat".into(), curves));
        Ok(sec)
    }

    fn ensure_covers(&mut self) -> Result<()> {
        if self.cover_r.is_some() {
            return Ok(());
        }
        let eps = self.config.epsilon;
        let dom = self.dom()?;
        let cover_r = build_whitney(&self.space, dom, Side::Interior, eps)?;
        let cover_s = if dom.v.is_empty() { None } else { Some(build_whitney(&self.space, dom, Side::Exterior, eps)?) };
        self.cover_r = Some(cover_r);
        self.cover_s = cover_s;
        Ok(())
    }

    fn whitney(&mut self) -> Result<Section> {
        self.ensure_covers()?;
        let mut sec = Section::new(Experiment::Whitney);
        let s = &self.space;
        let mut balls = Table::new(["side", "index", "center", "radius", "members"]);
        for cover in [self.cover_r.as_ref(), self.cover_s.as_ref()].into_iter().flatten() {
            let side = format!("{:?}", cover.side).to_lowercase();
            sec.report.extend(validate_whitney(s, cover));
            let g = whitney_graph(s, cover);
            sec.report.push(
                CheckRecord::new("whitney.summary", cover.len() as f64, !cover.is_empty())
                    .param("side", side.clone())
                    .param("overlap", overlap_count(s, cover))
                    .param("six_dilate_degree", six_dilate_degree(s, cover))
                    .param("graph_degree", g.max_degree()),
            );
            for (i, b) in cover.balls.iter().enumerate() {
                balls.push(row![side.as_str(), i, b.center, b.radius, b.members.len()]);
            }
            sec.documents.push((format!("cover_{side}.json"), cover.to_json()?));
        }
        if self.config.samples.central {
            let dom = self.dom()?;
            let cover = self.cover_r.as_ref().expect("covers built");
            let diam_u = dom.diameter_u(s);
            for (x, r) in self.boundary_balls(&self.config.samples.radii)? {
                if r >= diam_u / 2.0 {
                    continue;
                }
                match near_and_central(s, dom, cover, x, r, self.config.a) {
                    Ok(nc) => {
                        sec.report.push(
                            CheckRecord::new("whitney.near", (nc.covers_ball && nc.inside_double) as u8 as f64, nc.covers_ball && nc.inside_double)
                                .param("center", x)
                                .param_f("r", r)
                                .param("near", nc.near.len())
                                .param("central", nc.central),
                        );
                        let (_, rep) = chain_checks(s, dom, cover, &nc, self.config.a)?;
                        sec.report.extend(rep);
                    }
                    Err(e @ Error::NoCentralBall { .. }) => {
                        sec.report.push(CheckRecord::new("whitney.near", 0.0, false).param("center", x).param_f("r", r).note(e.to_string()));
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        sec.tables.push(("whitney_balls.dat".into(), balls));
        Ok(sec)
    }

    fn ensure_reflection(&mut self) -> Result<()> {
        if self.reflection.is_some() {
            return Ok(());
        }
        self.ensure_covers()?;
        if let (Some(cr), Some(cs)) = (&self.cover_r, &self.cover_s) {
            self.reflection = Some(build_reflection(&self.space, self.dom()?, cr, cs, self.config.a)?);
        }
        Ok(())
    }

    fn reflection(&mut self) -> Result<Section> {
        self.ensure_reflection()?;
        let mut sec = Section::new(Experiment::Reflection);
        let (Some(refl), Some(cr), Some(cs)) = (&self.reflection, &self.cover_r, &self.cover_s) else {
            sec.report.push(CheckRecord::new("reflection.mapped", 0.0, true).note("exterior is empty; nothing to reflect"));
            return Ok(sec);
        };
        let s = &self.space;
        let samples = self.boundary_balls(&self.config.samples.radii)?;
        sec.report.extend(validate_reflection(s, self.dom()?, refl, cs, cr, &samples));
        let mut t = Table::new(["s_index", "r_index", "s_radius", "r_radius", "distance"]);
        for &(si, ri) in &refl.pairs {
            let (a, b) = (&cs.balls[si], &cr.balls[ri]);
            t.push(row![si, ri, a.radius, b.radius, s.distance(a.center, b.center)]);
        }
        sec.tables.push(("reflection_pairs.dat".into(), t));
        sec.documents.push(("reflection.json".into(), refl.to_json()?));
        Ok(sec)
    }

    fn poincare(&mut self) -> Result<Section> {
        let mut sec = Section::new(Experiment::Poincare);
        let psi = self.psi()?;
        let s = &self.space;
        let dom = self.dom()?;
        let h = self.h();
        let a_u = self.config.a_u;
        let xs = self.boundary_points()?;
        let mut t = Table::new(["xi", "r", "ratio"]);
        let mut maxima = Vec::new();
        for &rr in &self.config.samples.radii {
            let r = rr * h;
            let mut worst = 0.0f64;
            for &x in &xs {
                let vb = s.ball_within(x, r, &dom.u)?;
                if vb.members.is_empty() {
                    continue;
                }
                let eb = s.ball_within(x, a_u * r, &dom.u)?;
                let c = match poincare_constant(s, &vb, &eb, &psi) {
                    Ok(c) => c,
                    Err(Error::DisconnectedEnergyBall) => f64::INFINITY,
                    Err(e) => return Err(e),
                };
                worst = worst.max(c);
                t.push(row![x, r, c]);
                sec.report.push(
                    CheckRecord::new("poincare.ratio", c, c.is_finite())
                        .param("xi", x)
                        .param_f("r", r)
                        .param_f("A_U", a_u)
                        .note(if c.is_finite() { "" } else { "variance ball meets two components of the energy ball" }),
                );
            }
            maxima.push(worst);
            sec.report.push(CheckRecord::new("poincare.max", worst, worst.is_finite()).param_f("r", r));
        }
        let ratio = spread_ratio(&maxima);
        sec.report.push(CheckRecord::upper("poincare.scale_stability", ratio, 4.0).note("max/min over radii of the per-radius maximum"));
        sec.tables.push(("poincare.dat".into(), t));
        Ok(sec)
    }

    fn ensure_operator(&mut self) -> Result<()> {
        if self.operator.is_some() {
            return Ok(());
        }
        self.ensure_reflection()?;
        let dom = self.dom()?;
        let op = match (&self.cover_r, &self.cover_s, &self.reflection) {
            (Some(cr), Some(cs), Some(refl)) => {
                let part = partition_of_unity(&self.space, dom, cs)?;
                let op = ExtensionOperator::new(dom, cr, refl, &part)?;
                self.partition = Some(part);
                op
            }
            _ => ExtensionOperator { dom: dom.clone(), epsilon: self.config.epsilon, a: self.config.a, terms: Vec::new() },
        };
        self.operator = Some(op);
        Ok(())
    }

    fn extension(&mut self) -> Result<Section> {
        self.ensure_operator()?;
        let mut sec = Section::new(Experiment::Extension);
        let psi = self.psi()?;
        let s = &self.space;
        let dom = self.dom()?;
        let op = self.operator.as_ref().expect("operator built");
        if let (Some(cs), Some(part)) = (&self.cover_s, &self.partition) {
            sec.report.extend(partition_checks(s, cs, part, &psi));
            sec.documents.push(("partition.json".into(), part.to_json()?));
        }
        let family = standard_family(s, dom, self.config.samples.family_size, self.config.seed)?;
        let locations = self.boundary_balls(&self.config.samples.extension_radii)?;
        let chk = extension_checks(s, op, &family, &psi, &locations, self.config.k)?;
        sec.report.extend(chk.report);

        // Markov property on members with values in [0, 1].
        let mut markov = 0.0f64;
        for (_, f) in family.iter().filter(|(_, f)| dom.closure.iter().all(|x| (0.0..=1.0).contains(&f[x]))) {
            let g = extend(s, op, f)?;
            for v in g.iter() {
                markov = markov.max(-v).max(v - 1.0);
            }
        }
        sec.report.push(CheckRecord::upper("extension.markov", markov.max(0.0), 1e-12).note("overshoot of E f outside [0, 1] for 0 <= f <= 1"));
        for (id, f) in coordinate_functions(s)? {
            let gap = continuity_gap(s, op, &f)?;
            sec.report.push(
                CheckRecord::new("extension.continuity", gap, gap.is_finite())
                    .param("f", id)
                    .param_f("h", self.h())
                    .note("max |E f - f(nearest boundary vertex)| / Lip(f) next to the boundary"),
            );
        }

        let mut t = Table::new(["check", "f", "x", "r", "numerator", "denominator", "ratio"]);
        for r in &chk.rows {
            t.push(row![r.check.as_str(), r.f_id.as_str(), r.x, r.r, r.numerator, r.denominator, r.ratio]);
        }
        sec.tables.push(("extension_ratios.dat".into(), t));
        if let Some((id, f)) = family.iter().find(|(id, _)| id.starts_with("smooth")) {
            let g = extend(s, op, f)?;
            let (p, _) = normalized_coords(s)?;
            let mut t = Table::new(["vertex", "x", "y", id.as_str(), "extended"]);
            for v in 0..s.len() {
                let fv = if dom.closure.contains(v) { f[v] } else { f64::NAN };
                t.push(row![v, p[v][0], p[v][1], fv, g[v]]);
            }
            sec.tables.push(("extension_field.dat".into(), t));
        }
        sec.documents.push(("operator.json".into(), op.to_json()?));
        Ok(sec)
    }

    fn boundary_energy(&mut self) -> Result<Section> {
        self.ensure_operator()?;
        let mut sec = Section::new(Experiment::BoundaryEnergy);
        let s = &self.space;
        let dom = self.dom()?;
        let op = self.operator.as_ref().expect("operator built");
        let mut t = Table::new(["f", "gamma_boundary", "energy", "ratio"]);
        let mut members = smooth_fields(s, self.config.samples.family_size, self.config.seed)?;
        members.push(("indicator_u".into(), FieldFunction::from_fn(s.len(), |v| dom.u.contains(v) as u8 as f64)));
        for (id, f) in &members {
            let g = extend(s, op, f)?;
            let (gb, ratio) = boundary_energy(s, dom, &g)?;
            t.push(row![id.as_str(), gb, crate::dirichlet::energy(s, &g), ratio]);
            sec.report.push(CheckRecord::new("boundary_energy.ratio", ratio, ratio.is_finite() && (0.0..=1.0).contains(&ratio)).param("f", id.as_str()).param_f("gamma_boundary", gb));
        }
        sec.tables.push(("boundary_energy.dat".into(), t));
        Ok(sec)
    }

    fn css(&mut self) -> Result<Section> {
        let mut sec = Section::new(Experiment::Css);
        let psi = self.psi()?;
        let dom = self.dom()?;
        let (rs, map) = reflected_space(&self.space, dom)?;
        let cfg = &self.config.samples;
        let mut family: Vec<FieldFunction> = smooth_fields(&rs, cfg.family_size.saturating_sub(1), self.config.seed)?.into_iter().map(|m| m.1).collect();
        family.push(FieldFunction::constant(rs.len(), 1.0));
        let mut to_local = vec![usize::MAX; self.space.len()];
        for (i, &v) in map.iter().enumerate() {
            to_local[v] = i;
        }
        let mut centers: Vec<Vertex> = self.boundary_points()?.into_iter().map(|x| to_local[x]).collect();
        centers.push(central_vertex(&rs));
        let h = rs.min_edge_length();
        let diam = rs.diameter();
        let mut t = Table::new(["x", "R", "c1", "capacity", "degenerate"]);
        let mut per_r = Vec::new();
        for &rr in &cfg.radii {
            let r = rr * h;
            if r >= diam / cfg.css_a2 {
                continue;
            }
            let results: Vec<CssResult> = centers.iter().map(|&x| css_check(&rs, x, r, cfg.css_a1, &psi, &family)).collect::<Result<_>>()?;
            let live: Vec<f64> = results.iter().filter(|c| !c.degenerate).map(|c| c.c1).collect();
            for c in &results {
                t.push(row![map[c.center], c.radius, c.c1, c.capacity, c.degenerate as u8 as usize]);
                sec.report.push(c.record().param("ambient_x", map[c.center]));
            }
            if !live.is_empty() {
                per_r.push(live.iter().copied().fold(0.0, f64::max));
            }
        }
        if per_r.is_empty() {
            sec.report.push(CheckRecord::new("css.scale_stability", f64::NAN, false).note("no radius below diam / A2"));
        } else {
            sec.report.push(CheckRecord::upper("css.scale_stability", spread_ratio(&per_r), 3.0).note("max/min over radii of the per-radius maximum C1"));
        }
        sec.tables.push(("css.dat".into(), t));
        Ok(sec)
    }

    fn beta_fit(&mut self) -> Result<Section> {
        let mut sec = Section::new(Experiment::BetaFit);
        let h = self.h();
        let radii: Vec<f64> = self.config.samples.beta_radii.iter().map(|r| r * h).collect();
        let x = central_vertex(&self.space);
        let fit = beta_fit(&self.space, &radii, &[x])?;
        sec.report.push(
            CheckRecord::new("beta_fit.beta", fit.beta, fit.beta.is_finite() && fit.beta > 1.0)
                .param_f("r_squared", fit.r_squared)
                .param("center", x)
                .param("radii", fit.points.len()),
        );
        let mut t = Table::new(["r", "exit_time"]);
        for &(r, e) in &fit.points {
            t.push(row![r, e]);
        }
        sec.tables.push(("beta_fit.dat".into(), t));
        self.beta = Some(fit);
        Ok(sec)
    }

    fn hke(&mut self) -> Result<Section> {
        let mut sec = Section::new(Experiment::Hke);
        let psi = self.psi()?;
        let cfg = &self.config.samples;
        let mut on = Table::new(["space", "t", "x", "value"]);
        let ambient = &self.space;
        let w = default_window(ambient, &psi);
        let mut xs = vec![central_vertex(ambient)];
        xs.extend(spread(ambient.len(), cfg.hke_centers.saturating_sub(1)));
        xs.sort_unstable();
        xs.dedup();
        let prof = hke_profile(ambient, &psi, &time_grid(w, cfg.hke_times), &xs, w, cfg.hke_delta)?;
        sec.report.extend(prof.checks("ambient", cfg.envelope_max));
        for o in &prof.on_diag {
            on.push(row!["ambient", o.t, o.x, o.value]);
        }
        if let Some(dom) = &self.domain {
            let (rs, map) = reflected_space(ambient, dom)?;
            let wr = default_window(&rs, &psi);
            let mut local = vec![central_vertex(&rs)];
            local.extend(spread(rs.len(), cfg.hke_centers.saturating_sub(1)));
            local.sort_unstable();
            local.dedup();
            let times = time_grid(wr, cfg.hke_times);
            let prof = hke_profile(&rs, &psi, &times, &local, wr, cfg.hke_delta)?;
            sec.report.extend(prof.checks("reflected", cfg.envelope_max));
            for o in &prof.on_diag {
                on.push(row!["reflected", o.t, map[o.x], o.value]);
            }
            let deep = deepest(dom, cfg.hke_centers);
            let ratios = deep_interior_ratios(ambient, &rs, &map, dom, &psi, &times, &deep)?;
            let mut t = Table::new(["t", "x", "ratio"]);
            for &(tt, x, q) in &ratios {
                t.push(row![tt, x, q]);
            }
            if ratios.is_empty() {
                sec.report.push(CheckRecord::new("hke.deep_interior", f64::NAN, true).note("no vertex has δ_U > 4 Ψ⁻¹(t) inside the window"));
            } else {
                let lo = ratios.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
                let hi = ratios.iter().map(|r| r.2).fold(0.0, f64::max);
                let pass = lo >= 1.0 / 3.0 && hi <= 3.0;
                sec.report.push(
                    CheckRecord::new("hke.deep_interior", hi, pass)
                        .param_f("min", lo)
                        .param("pairs", ratios.len())
                        .note("reflected / ambient p_t(x, x), must lie in [1/3, 3]"),
                );
            }
            sec.tables.push(("hke_deep.dat".into(), t));
        }
        sec.tables.push(("hke_ondiag.dat".into(), on));
        Ok(sec)
    }
}
