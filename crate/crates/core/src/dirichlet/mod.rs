//! Discrete Dirichlet forms `E(f, f) = sum_e w_e (f(u) - f(v))^2` and the
//! analysis built on them.

pub mod besov;
pub mod capacity;
pub mod css;
pub mod energy;
pub mod exit;
pub mod heat;
pub mod partition;
pub mod poincare;

use std::ops::Deref;

use crate::error::{Error, Result};
use crate::mmspace::{Space, VertexSet};

pub use besov::besov_functional;
pub use capacity::{capacity_and_potential, Capacitor};
pub use css::{css_check, css_report, CssResult};
pub use energy::{energy, energy_and_measure, EnergyMeasure};
pub use exit::mean_exit_time;
pub use heat::{heat_column, heat_kernel, heat_semigroup, spectrum, HeatKernel, Spectrum};
pub use partition::{partition_checks, partition_constants, partition_of_unity, Partition, PartitionConstants};
pub use poincare::{poincare_constant, poincare_sup};

/// A function on the vertices; `NaN` marks vertices where it is undefined.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldFunction {
    values: Vec<f64>,
}

impl FieldFunction {
    /// Everywhere-defined function. Rejects non-finite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction(format!("value at vertex {i} is {}", values[i])));
        }
        Ok(FieldFunction { values })
    }

    /// Function defined on `set` only.
    pub fn on_set(set: &VertexSet, f: impl Fn(usize) -> f64) -> Self {
        let mut values = vec![f64::NAN; set.universe()];
        for v in set.iter() {
            values[v] = f(v);
        }
        FieldFunction { values }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> f64) -> Self {
        FieldFunction { values: (0..n).map(f).collect() }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        FieldFunction { values: vec![c; n] }
    }

    pub fn is_defined(&self, v: usize) -> bool {
        !self.values[v].is_nan()
    }

    pub fn defined_on(&self, set: &VertexSet) -> bool {
        set.iter().all(|v| self.is_defined(v))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl Deref for FieldFunction {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

/// `(Lf)(x) = (1/m(x)) sum_y w_xy (f(x) - f(y))`.
pub fn generator_apply(space: &Space, f: &[f64]) -> Vec<f64> {
    let m = space.measure();
    (0..space.len())
        .map(|x| {
            let s: f64 = space
                .neighbors(x)
                .iter()
                .map(|&(y, k)| space.edges()[k].conductance * (f[x] - f[y]))
                .sum();
            s / m[x]
        })
        .collect()
}

/// m-weighted mean of `f` over `set`.
pub fn mean_over(space: &Space, f: &[f64], set: impl IntoIterator<Item = usize> + Clone) -> f64 {
    let m = space.measure();
    let mass: f64 = set.clone().into_iter().map(|v| m[v]).sum();
    let total: f64 = set.into_iter().map(|v| m[v] * f[v]).sum();
    total / mass
}
