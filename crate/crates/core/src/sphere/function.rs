//! Functions tabulated on a sphere grid.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::grid::SphereGrid;
use crate::error::{invalid, Error, Result};
use crate::stats::Estimate;

/// Values of a continuous function on the nodes of a shared grid.
#[derive(Debug, Clone)]
pub struct SphericalFunction {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct FunctionFile {
    grid_id: String,
    values: Vec<f64>,
}

impl SphericalFunction {
    pub fn new(grid: Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return invalid("spherical function values must be finite");
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<SphereGrid>, f: impl Fn(&[f64]) -> f64 + Sync) -> Self {
        use rayon::prelude::*;
        let values: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|k| f(grid.node(k)))
            .collect();
        Self { grid, values }
    }

    pub fn constant(grid: Arc<SphereGrid>, c: f64) -> Self {
        let values = vec![c; grid.len()];
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at an arbitrary unit vector, interpolated from the nodes.
    pub fn eval(&self, u: &[f64]) -> f64 {
        self.grid.interpolator().eval(&self.grid, &self.values, u)
    }

    pub fn integrate(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    pub fn estimate_integral(&self) -> Estimate {
        self.grid.estimate(&self.values)
    }

    /// `(ϑ f)(u) = f(ϑ^{-1} u)` on the same nodes, using interpolation.
    pub fn rotated(&self, rotation: &DMatrix<f64>) -> Self {
        let inv = rotation.transpose();
        Self::from_fn(self.grid.clone(), |u| {
            let w = &inv * DVector::from_column_slice(u);
            self.eval(w.as_slice())
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    fn check_grid(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.grid, &other.grid) || *self.grid == *other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "`{}` vs `{}`",
                self.grid.id(),
                other.grid.id()
            )))
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        self.check_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn max_abs_difference(&self, other: &Self) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(FunctionFile {
            grid_id: self.grid.id().to_string(),
            values: self.values.clone(),
        })
        .expect("function serializes")
    }

    /// Reads values written by [`Self::to_json`] onto `grid`, whose id must
    /// match.
    pub fn from_json(value: &serde_json::Value, grid: Arc<SphereGrid>) -> Result<Self> {
        let file: FunctionFile = serde_json::from_value(value.clone())?;
        if file.grid_id != grid.id() {
            return Err(Error::GridMismatch(format!(
                "file refers to `{}`, got `{}`",
                file.grid_id,
                grid.id()
            )));
        }
        Self::new(grid, file.values)
    }
}

/// A tabulated function with a standard error per node.
#[derive(Debug, Clone)]
pub struct EstimatedFunction {
    pub function: SphericalFunction,
    pub se: Vec<f64>,
}

impl EstimatedFunction {
    pub fn exact(function: SphericalFunction) -> Self {
        let se = vec![0.0; function.values().len()];
        Self { function, se }
    }

    pub fn from_estimates(grid: Arc<SphereGrid>, estimates: &[Estimate]) -> Self {
        let values = estimates.iter().map(|e| e.value).collect();
        Self {
            function: SphericalFunction { grid, values },
            se: estimates.iter().map(|e| e.se).collect(),
        }
    }

    pub fn values(&self) -> &[f64] {
        self.function.values()
    }
}

/// The canonical pairing `⟨f, g⟩ = ∫ f g du`.
pub fn pair(f: &SphericalFunction, g: &SphericalFunction) -> Result<f64> {
    f.check_grid(g)?;
    let prod: Vec<f64> = f.values.iter().zip(&g.values).map(|(a, b)| a * b).collect();
    Ok(f.grid.integrate(&prod))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere::grid::{build_sphere_grid, GridKind};

    fn grid(seed: u64) -> Arc<SphereGrid> {
        Arc::new(build_sphere_grid(3, 400, GridKind::Fibonacci, seed).unwrap())
    }

    #[test]
    fn pairing_basics() {
        let g = grid(1);
        let one = SphericalFunction::constant(g.clone(), 1.0);
        assert_eq!(pair(&one, &one).unwrap(), 1.0);
        let f = SphericalFunction::from_fn(g.clone(), |u| u[0] + u[1] * u[2]);
        let h = SphericalFunction::from_fn(g.clone(), |u| u[2].exp());
        assert_eq!(pair(&f, &h).unwrap(), pair(&h, &f).unwrap());
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = SphericalFunction::constant(grid(1), 1.0);
        let b = SphericalFunction::constant(grid(2), 1.0);
        assert!(matches!(pair(&a, &b), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let g = grid(3);
        let f = SphericalFunction::from_fn(g.clone(), |u| u[0].sin() / 3.0);
        let back = SphericalFunction::from_json(&f.to_json(), g).unwrap();
        assert_eq!(back.values(), f.values());
    }
}
