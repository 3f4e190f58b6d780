//! Experiment configuration: one versioned JSON document.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::domains::DomainSpec;
use crate::error::{Error, Result};
use crate::mmspace::{CatalogSpec, ScaleFunction};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Geometry,
    Whitney,
    Reflection,
    Poincare,
    Extension,
    BoundaryEnergy,
    Css,
    Hke,
    BetaFit,
}

impl Experiment {
    /// Execution order: space → domain → covers → reflection → partition →
    /// extension → checks. `BetaFit` runs before `Hke` so that a fitted β is
    /// available to it.
    pub const ORDER: [Experiment; 9] = [
        Experiment::Geometry,
        Experiment::Whitney,
        Experiment::Reflection,
        Experiment::Poincare,
        Experiment::Extension,
        Experiment::BoundaryEnergy,
        Experiment::Css,
        Experiment::BetaFit,
        Experiment::Hke,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Geometry => "geometry",
            Experiment::Whitney => "whitney",
            Experiment::Reflection => "reflection",
            Experiment::Poincare => "poincare",
            Experiment::Extension => "extension",
            Experiment::BoundaryEnergy => "boundary_energy",
            Experiment::Css => "css",
            Experiment::Hke => "hke",
            Experiment::BetaFit => "beta_fit",
        }
    }

    fn needs_domain(self) -> bool {
        !matches!(self, Experiment::BetaFit | Experiment::Hke)
    }

    fn requires(self) -> &'static [Experiment] {
        match self {
            Experiment::Reflection => &[Experiment::Whitney],
            Experiment::Extension => &[Experiment::Reflection],
            Experiment::BoundaryEnergy => &[Experiment::Extension],
            _ => &[],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaSpec {
    Value(f64),
    Fit(FitTag),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitTag {
    Fit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiSpec {
    #[serde(default = "one")]
    pub c: f64,
    pub beta: BetaSpec,
}

impl Default for PsiSpec {
    fn default() -> Self {
        PsiSpec { c: 1.0, beta: BetaSpec::Value(2.0) }
    }
}

impl PsiSpec {
    /// The scale function, with `fitted` standing in for `"fit"`.
    pub fn resolve(&self, fitted: Option<f64>) -> Result<ScaleFunction> {
        let beta = match self.beta {
            BetaSpec::Value(b) => b,
            BetaSpec::Fit(_) => fitted.ok_or_else(|| Error::Dependency("psi.beta = \"fit\" needs the beta_fit experiment".into()))?,
        };
        ScaleFunction::new(self.c, beta)
    }
}

/// Sample grids. Radii are in units of the mesh size `h` (smallest edge length).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, rename_all = "camelCase", deny_unknown_fields)]
pub struct Samples {
    pub boundary_points: usize,
    pub radii: Vec<f64>,
    pub extension_radii: Vec<f64>,
    pub family_size: usize,
    pub hke_times: usize,
    pub hke_delta: f64,
    pub hke_centers: usize,
    pub envelope_max: f64,
    #[serde(rename = "cssA1")]
    pub css_a1: f64,
    #[serde(rename = "cssA2")]
    pub css_a2: f64,
    /// Run near/central-ball and chain checks (needs ε < 1/14).
    pub central: bool,
    pub beta_radii: Vec<f64>,
}

impl Default for Samples {
    fn default() -> Self {
        Samples {
            boundary_points: 5,
            radii: vec![4.0, 8.0, 16.0],
            extension_radii: vec![2.0, 3.0],
            family_size: 25,
            hke_times: 8,
            hke_delta: 0.25,
            hke_centers: 4,
            envelope_max: 50.0,
            css_a1: 2.0,
            css_a2: 2.0,
            central: false,
            beta_radii: vec![4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub space: CatalogSpec,
    #[serde(default)]
    pub domain: Option<DomainSpec>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(rename = "A", default = "two")]
    pub a: f64,
    #[serde(rename = "A_P", default = "one")]
    pub a_p: f64,
    #[serde(rename = "A_U", default = "two")]
    pub a_u: f64,
    #[serde(rename = "K", default = "three")]
    pub k: f64,
    #[serde(default)]
    pub psi: PsiSpec,
    pub experiments: Vec<Experiment>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub samples: Samples,
}

fn default_epsilon() -> f64 {
    0.1
}

fn one() -> f64 {
    1.0
}

fn two() -> f64 {
    2.0
}

fn three() -> f64 {
    3.0
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&s)
    }

    pub fn enabled(&self, e: Experiment) -> bool {
        self.experiments.contains(&e)
    }

    /// Enabled experiments in execution order.
    pub fn ordered(&self) -> Vec<Experiment> {
        Experiment::ORDER.iter().copied().filter(|&e| self.enabled(e)).collect()
    }

    /// Checks the parameter regime each enabled experiment relies on.
    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(Error::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return cfg(format!("schemaVersion {} is not supported (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if self.experiments.is_empty() {
            return cfg("no experiments enabled".into());
        }
        let eps = self.epsilon;
        if !(eps > 0.0 && eps < 0.5) {
            return cfg(format!("epsilon = {eps} must lie in (0, 1/2)"));
        }
        for (name, v) in [("A", self.a), ("A_P", self.a_p), ("A_U", self.a_u), ("K", self.k)] {
            if !(v >= 1.0 && v.is_finite()) {
                return cfg(format!("{name} = {v} must be a finite number >= 1"));
            }
        }
        if let BetaSpec::Value(b) = self.psi.beta {
            ScaleFunction::new(self.psi.c, b).map_err(|e| Error::Config(e.to_string()))?;
        } else if !(self.psi.c > 0.0) {
            return cfg(format!("psi.c = {} must be positive", self.psi.c));
        }
        if (self.enabled(Experiment::Extension) || self.enabled(Experiment::Poincare)) && !(27.0 * self.a_p * eps < 1.0) {
            return cfg(format!(
                "extension/poincare need 27 A_P epsilon < 1 (the main standing assumption); got 27 * {} * {eps} = {}",
                self.a_p,
                27.0 * self.a_p * eps
            ));
        }
        if self.enabled(Experiment::Reflection) && !(eps < 0.2) {
            return cfg(format!("reflection needs epsilon < 1/5; got {eps}"));
        }
        if self.samples.central && !(eps < 1.0 / 14.0) {
            return cfg(format!("central-ball logic needs epsilon < 1/14; got {eps}"));
        }
        let s = &self.samples;
        if s.radii.is_empty() || s.radii.iter().any(|r| !(*r > 0.0)) {
            return cfg("samples.radii must be a nonempty list of positive numbers".into());
        }
        if s.extension_radii.is_empty() || s.extension_radii.iter().any(|r| !(*r > 0.0)) {
            return cfg("samples.extensionRadii must be a nonempty list of positive numbers".into());
        }
        if s.boundary_points == 0 || s.family_size == 0 || s.hke_times == 0 || s.hke_centers == 0 {
            return cfg("sample counts must be positive".into());
        }
        if !(s.css_a1 > 1.0) || !(s.css_a2 >= 1.0) {
            return cfg("samples.cssA1 must exceed 1 and samples.cssA2 must be >= 1".into());
        }
        if !(s.hke_delta > 0.0) || !(s.envelope_max >= 1.0) {
            return cfg("samples.hkeDelta must be positive and samples.envelopeMax >= 1".into());
        }

        for e in self.ordered() {
            if e.needs_domain() && self.domain.is_none() && e != Experiment::Geometry {
                return Err(Error::Dependency(format!("{} needs a domain", e.name())));
            }
            for &dep in e.requires() {
                if !self.enabled(dep) {
                    return Err(Error::Dependency(format!("{} needs the {} experiment", e.name(), dep.name())));
                }
            }
        }
        if matches!(self.psi.beta, BetaSpec::Fit(_)) && !self.enabled(Experiment::BetaFit) {
            let uses_psi = [Experiment::Poincare, Experiment::Extension, Experiment::Css, Experiment::Hke];
            if uses_psi.iter().any(|&e| self.enabled(e)) {
                return Err(Error::Dependency("psi.beta = \"fit\" needs the beta_fit experiment".into()));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base(extra: &str) -> String {
        format!(r#"{{"schemaVersion": 1, "space": {{"kind": "path", "n": 10}}, {extra}}}"#)
    }

    #[test]
    fn geometry_only_defaults() {
        let c = ExperimentConfig::from_json(&base(r#""experiments": ["geometry"]"#)).unwrap();
        c.validate().unwrap();
        assert_eq!(c.epsilon, 0.1);
        assert_eq!(c.psi, PsiSpec::default());
        assert_eq!(c.samples, Samples::default());
    }

    #[test]
    fn main_assumption_guard() {
        let c = ExperimentConfig::from_json(&base(
            r#""domain": {"type": "explicit", "vertices": [0, 1, 2]}, "A_P": 3,
               "experiments": ["whitney", "reflection", "extension"]"#,
        ))
        .unwrap();
        let err = c.validate().unwrap_err().to_string();
        assert!(err.contains("27 A_P epsilon < 1"), "{err}");
    }

    #[test]
    fn dependency_errors() {
        let c = ExperimentConfig::from_json(&base(
            r#""domain": {"type": "explicit", "vertices": [0, 1, 2]}, "epsilon": 0.03,
               "experiments": ["extension"]"#,
        ))
        .unwrap();
        assert!(matches!(c.validate(), Err(Error::Dependency(_))));
        let c = ExperimentConfig::from_json(&base(r#""experiments": ["whitney"]"#)).unwrap();
        assert!(matches!(c.validate(), Err(Error::Dependency(_))));
        let c = ExperimentConfig::from_json(&base(r#""psi": {"beta": "fit"}, "experiments": ["hke"]"#)).unwrap();
        assert!(matches!(c.validate(), Err(Error::Dependency(_))));
    }

    #[test]
    fn beta_spec_forms() {
        let p: PsiSpec = serde_json::from_str(r#"{"c": 2, "beta": "fit"}"#).unwrap();
        assert_eq!(p.beta, BetaSpec::Fit(FitTag::Fit));
        assert!(p.resolve(Some(2.3)).is_ok() && p.resolve(None).is_err());
        let p: PsiSpec = serde_json::from_str(r#"{"beta": 2.5}"#).unwrap();
        assert_eq!(p.resolve(None).unwrap(), ScaleFunction { c: 1.0, beta: 2.5 });
        assert!(serde_json::from_str::<PsiSpec>(r#"{"beta": "guess"}"#).is_err());
    }

    #[test]
    fn regime_guards() {
        let reflection = base(r#""domain": {"type": "explicit", "vertices": [0, 1]}, "epsilon": 0.25, "experiments": ["whitney", "reflection"]"#);
        assert!(matches!(ExperimentConfig::from_json(&reflection).unwrap().validate(), Err(Error::Config(_))));
        let central = base(r#""domain": {"type": "explicit", "vertices": [0, 1]}, "samples": {"central": true}, "experiments": ["whitney"]"#);
        let central = ExperimentConfig::from_json(&central).unwrap();
        assert!(central.samples.central && central.samples.family_size == 25);
        assert!(matches!(central.validate(), Err(Error::Config(_))));
        assert!(ExperimentConfig::from_json(&base(r#""experiments": ["nope"]"#)).is_err());
        let v2 = r#"{"schemaVersion": 2, "space": {"kind": "path", "n": 3}, "experiments": ["geometry"]}"#;
        assert!(matches!(ExperimentConfig::from_json(v2).unwrap().validate(), Err(Error::Config(_))));
    }
}
