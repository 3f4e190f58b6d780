//! Heat kernel estimates on ambient and reflected spaces: on-diagonal
//! envelopes, near-diagonal lower bounds, off-diagonal decay, and the walk
//! dimension from exit times.

use serde::{Deserialize, Serialize};

use crate::dirichlet::heat::{heat_column, heat_kernel, DENSE_BUDGET};
use crate::dirichlet::mean_exit_time;
use crate::domains::DomainDecomposition;
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::mmspace::{ScaleFunction, Space, Vertex};
use crate::report::{CheckRecord, CheckReport};

/// Space on `Ū` carrying the reflected (Neumann) form: edges inside `Ū`,
/// restricted measure, intrinsic shortest-path metric. Also returns the map
/// from reflected to ambient vertex indices.
pub fn reflected_space(space: &Space, dom: &DomainDecomposition) -> Result<(Space, Vec<Vertex>)> {
    space.induced_subspace(&dom.closure)
}

/// Default scale window `[Ψ(4 h_min), Ψ(diam / 4)]`.
pub fn default_window(space: &Space, psi: &ScaleFunction) -> (f64, f64) {
    (psi.psi(4.0 * space.min_edge_length()), psi.psi(space.diameter() / 4.0))
}

/// Geometric grid of `count` times spanning `window`.
pub fn time_grid(window: (f64, f64), count: usize) -> Vec<f64> {
    let (lo, hi) = window;
    if count <= 1 || hi <= lo {
        return vec![lo];
    }
    (0..count).map(|k| lo * (hi / lo).powf(k as f64 / (count - 1) as f64)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OnDiagSample {
    pub t: f64,
    pub x: Vertex,
    /// `p_t(x, x) m(B(x, Ψ⁻¹(t)))`.
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OffDiagSample {
    pub t: f64,
    pub x: Vertex,
    pub y: Vertex,
    pub p: f64,
    pub d: f64,
    /// `p_t(x, y) m(B(x, Ψ⁻¹(t)))`.
    pub scaled: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HkeProfile {
    pub window: (f64, f64),
    pub on_diag: Vec<OnDiagSample>,
    pub off_diag: Vec<OffDiagSample>,
    pub c_low: f64,
    pub c_high: f64,
    /// Near-diagonal pairs (`d <= δ Ψ⁻¹(t)`) and how many satisfy the lower bound `c_low / 2`.
    pub near_pairs: usize,
    pub near_ok: usize,
    /// Slope of `log(p_t m(B))` against `t Φ(d / t)`.
    pub decay_slope: f64,
    pub decay_r2: f64,
}

impl HkeProfile {
    pub fn envelope_ratio(&self) -> f64 {
        self.c_high / self.c_low
    }

    pub fn near_fraction(&self) -> f64 {
        if self.near_pairs == 0 {
            1.0
        } else {
            self.near_ok as f64 / self.near_pairs as f64
        }
    }

    pub fn checks(&self, label: &str, max_envelope: f64) -> CheckReport {
        let mut times: Vec<f64> = self.on_diag.iter().map(|s| s.t).collect();
        times.dedup();
        let tag = |r: CheckRecord| r.param("space", label).param("times", times.len());
        let mut rep = CheckReport::new();
        rep.push(tag(CheckRecord::upper("hke.envelope_ratio", self.envelope_ratio(), max_envelope)
            .param_f("c_low", self.c_low)
            .param_f("c_high", self.c_high)));
        rep.push(tag(CheckRecord::lower("hke.near_diagonal", self.near_fraction(), 1.0).param("pairs", self.near_pairs)));
        let s = self.decay_slope;
        rep.push(tag(CheckRecord::new("hke.decay_slope", s, s < 0.0 && (0.1..=10.0).contains(&-s)).param_f("r2", self.decay_r2)));
        rep
    }
}

/// Kernel rows `y ↦ p_t(x, y)` for the sampled `x`, dense when affordable.
fn kernel_rows(space: &Space, t: f64, xs: &[Vertex]) -> Result<Vec<Vec<f64>>> {
    if space.len() <= DENSE_BUDGET {
        let k = heat_kernel(space, t)?;
        Ok(xs.iter().map(|&x| (0..space.len()).map(|y| k.get(x, y)).collect()).collect())
    } else {
        xs.iter().map(|&x| heat_column(space, x, t)).collect()
    }
}

/// Profile over the times of `t_grid` inside `window` and the sampled
/// centers. Off-diagonal pairs are restricted to `d <= diam / 3`.
pub fn hke_profile(
    space: &Space,
    psi: &ScaleFunction,
    t_grid: &[f64],
    x_sample: &[Vertex],
    window: (f64, f64),
    delta: f64,
) -> Result<HkeProfile> {
    if x_sample.is_empty() {
        return Err(Error::InvalidInput("no sample centers".into()));
    }
    let times: Vec<f64> = t_grid
        .iter()
        .copied()
        .filter(|&t| t >= window.0 * (1.0 - 1e-12) && t <= window.1 * (1.0 + 1e-12))
        .collect();
    if times.is_empty() || window.1 < window.0 {
        return Err(Error::Window(format!("no sample time inside [{}, {}]", window.0, window.1)));
    }
    let dmax = space.diameter() / 3.0;
    let mut on_diag = Vec::new();
    let mut off_diag = Vec::new();
    for &t in &times {
        let rows = kernel_rows(space, t, x_sample)?;
        let rho = psi.inverse(t);
        for (&x, row) in x_sample.iter().zip(&rows) {
            let vol = space.mass(space.ball(x, rho)?.members);
            on_diag.push(OnDiagSample { t, x, value: row[x] * vol });
            let dist = space.distance_row(x);
            for y in 0..space.len() {
                if y != x && dist[y] <= dmax {
                    off_diag.push(OffDiagSample { t, x, y, p: row[y], d: dist[y], scaled: row[y] * vol });
                }
            }
        }
    }
    let c_low = on_diag.iter().map(|s| s.value).fold(f64::INFINITY, f64::min);
    let c_high = on_diag.iter().map(|s| s.value).fold(0.0, f64::max);

    let mut near_pairs = 0;
    let mut near_ok = 0;
    for s in on_diag.iter() {
        near_pairs += 1;
        near_ok += (s.value >= 0.5 * c_low) as usize;
    }
    for s in &off_diag {
        if s.d <= delta * psi.inverse(s.t) {
            near_pairs += 1;
            near_ok += (s.scaled >= 0.5 * c_low) as usize;
        }
    }

    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for s in &off_diag {
        if s.scaled > 1e-300 {
            xs.push(s.t * psi.phi(s.d / s.t));
            ys.push(s.scaled.ln());
        }
    }
    let (decay_slope, _, decay_r2) = if xs.len() >= 2 { least_squares(&xs, &ys) } else { (f64::NAN, f64::NAN, f64::NAN) };
    Ok(HkeProfile { window, on_diag, off_diag, c_low, c_high, near_pairs, near_ok, decay_slope, decay_r2 })
}

/// Ratio of reflected to ambient `p_t(x, x)` at vertices with
/// `δ_U(x) > 4 Ψ⁻¹(t)`; one `(t, x, ratio)` per admissible pair.
pub fn deep_interior_ratios(
    ambient: &Space,
    reflected: &Space,
    to_ambient: &[Vertex],
    dom: &DomainDecomposition,
    psi: &ScaleFunction,
    times: &[f64],
    x_sample: &[Vertex],
) -> Result<Vec<(f64, Vertex, f64)>> {
    let mut to_reflected = vec![usize::MAX; ambient.len()];
    for (i, &v) in to_ambient.iter().enumerate() {
        to_reflected[v] = i;
    }
    let mut out = Vec::new();
    for &t in times {
        let deep: Vec<Vertex> = x_sample
            .iter()
            .copied()
            .filter(|&x| dom.u.contains(x) && dom.delta_u[x] > 4.0 * psi.inverse(t))
            .collect();
        if deep.is_empty() {
            continue;
        }
        let amb = kernel_rows(ambient, t, &deep)?;
        let local: Vec<Vertex> = deep.iter().map(|&x| to_reflected[x]).collect();
        let refl = kernel_rows(reflected, t, &local)?;
        for (k, &x) in deep.iter().enumerate() {
            out.push((t, x, refl[k][local[k]] / amb[k][x]));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaFit {
    pub beta: f64,
    pub r_squared: f64,
    /// `(r, mean exit time at the center)` per usable radius.
    pub points: Vec<(f64, f64)>,
}

/// Least-squares slope of `log E[τ_{B(x, r)}]` against `log r`, the exit time
/// averaged over `x_sample`. Radii outside `[4 h_min, diam / 4]` are dropped;
/// at least three dyadic scales must remain.
pub fn beta_fit(space: &Space, radii: &[f64], x_sample: &[Vertex]) -> Result<BetaFit> {
    if x_sample.is_empty() {
        return Err(Error::InvalidInput("no sample centers".into()));
    }
    let lo = 4.0 * space.min_edge_length();
    let hi = space.diameter() / 4.0;
    let usable: Vec<f64> = radii.iter().copied().filter(|&r| r >= lo * (1.0 - 1e-12) && r <= hi * (1.0 + 1e-12)).collect();
    let mut scales: Vec<i64> = usable.iter().map(|r| r.log2().floor() as i64).collect();
    scales.dedup();
    if scales.len() < 3 {
        return Err(Error::InsufficientScales { found: scales.len(), needed: 3 });
    }
    let n = space.len();
    let mut points = Vec::with_capacity(usable.len());
    for &r in &usable {
        let mut total = 0.0;
        for &x in x_sample {
            let ball = space.ball(x, r)?.to_set(n);
            total += mean_exit_time(space, &ball)?[x];
        }
        points.push((r, total / x_sample.len() as f64));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (beta, _, r_squared) = least_squares(&lx, &ly);
    Ok(BetaFit { beta, r_squared, points })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::DomainSpec;
    use crate::mmspace::{CatalogSpec, Edge};

    #[test]
    fn reflected_half_grid_size() {
        let spec = CatalogSpec::grid(33, 33);
        let s = Space::from_catalog(&spec).unwrap();
        let d = DomainSpec::HalfGrid.build(&spec, &s).unwrap();
        let (r, map) = reflected_space(&s, &d).unwrap();
        assert_eq!(r.len(), 33 * 17);
        assert!(map.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn two_point_on_diagonal() {
        let s = Space::new(2, vec![Edge::unit(0, 1)], vec![1.0; 2]).unwrap();
        let psi = ScaleFunction::diffusive();
        // Ψ⁻¹(t) = √t; the ball B(0, √t) holds both vertices once √t > 1.
        let p = hke_profile(&s, &psi, &[0.25, 4.0], &[0], (0.1, 10.0), 0.25).unwrap();
        let small = (1.0 + (-0.5f64).exp()) / 2.0;
        let large = (1.0 + (-8.0f64).exp()) / 2.0 * 2.0;
        assert!((p.on_diag[0].value - small).abs() < 1e-12);
        assert!((p.on_diag[1].value - large).abs() < 1e-12);
    }

    #[test]
    fn empty_window_rejected() {
        let s = Space::from_catalog(&CatalogSpec::path(8)).unwrap();
        let r = hke_profile(&s, &ScaleFunction::diffusive(), &[100.0], &[4], (1.0, 10.0), 0.25);
        assert!(matches!(r, Err(Error::Window(_))));
    }

    #[test]
    fn path_beta_is_two() {
        let s = Space::from_catalog(&CatalogSpec::path(256)).unwrap();
        let fit = beta_fit(&s, &[4.0, 8.0, 16.0, 32.0, 64.0], &[128]).unwrap();
        assert!((fit.beta - 2.0).abs() < 0.1, "{fit:?}");
    }

    #[test]
    fn single_scale_rejected() {
        let s = Space::from_catalog(&CatalogSpec::grid(9, 9)).unwrap();
        let r = beta_fit(&s, &[4.0], &[40]);
        assert!(matches!(r, Err(Error::InsufficientScales { found: 1, needed: 3 })));
    }
}
