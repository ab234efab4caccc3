//! Finite measures on the sphere given by weighted atoms.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{dot, norm, Mat};
use crate::stats::pairwise_sum;

/// Allowed deviation of an atom direction from unit length.
pub const ATOM_UNIT_TOL: f64 = 1e-12;

/// Weighted atoms `Σ w_k δ_{u_k}` on `S^{n-1}`; weights may be signed.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    dim: usize,
    dirs: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct AtomEntry {
    dir: Vec<f64>,
    w: f64,
}

#[derive(Serialize, Deserialize)]
struct MeasureFile {
    dim: usize,
    atoms: Vec<AtomEntry>,
}

impl AtomicMeasure {
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            dirs: Vec::new(),
            weights: Vec::new(),
        }
    }

    pub fn new(dim: usize, atoms: Vec<(Vec<f64>, f64)>) -> Result<Self> {
        let mut m = Self::empty(dim);
        for (d, w) in atoms {
            m.push(&d, w)?;
        }
        Ok(m)
    }

    /// Appends an atom; the direction must be a unit vector.
    pub fn push(&mut self, dir: &[f64], weight: f64) -> Result<()> {
        if dir.len() != self.dim {
            return invalid(format!(
                "atom of dimension {} in a measure on S^{}",
                dir.len(),
                self.dim - 1
            ));
        }
        if (norm(dir) - 1.0).abs() > ATOM_UNIT_TOL {
            return invalid("atom directions must be unit vectors");
        }
        if !weight.is_finite() {
            return invalid("atom weights must be finite");
        }
        self.dirs.extend_from_slice(dir);
        self.weights.push(weight);
        Ok(())
    }

    pub(crate) fn push_unchecked(&mut self, dir: &[f64], weight: f64) {
        debug_assert!((norm(dir) - 1.0).abs() < 1e-9);
        self.dirs.extend_from_slice(dir);
        self.weights.push(weight);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dir(&self, k: usize) -> &[f64] {
        &self.dirs[k * self.dim..(k + 1) * self.dim]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl ExactSizeIterator<Item = (&[f64], f64)> {
        self.dirs
            .chunks_exact(self.dim)
            .zip(self.weights.iter().copied())
    }

    pub fn total_mass(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    pub fn total_variation(&self) -> f64 {
        let a: Vec<f64> = self.weights.iter().map(|w| w.abs()).collect();
        pairwise_sum(&a)
    }

    /// `∫ f dμ`.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        let terms: Vec<f64> = self.atoms().map(|(u, w)| w * f(u)).collect();
        pairwise_sum(&terms)
    }

    /// `∫ k(u·v) dμ(v)`: the measure convolved with a zonal kernel, at `u`.
    pub fn convolve_kernel(&self, u: &[f64], kernel: impl Fn(f64) -> f64) -> f64 {
        self.integrate(|v| kernel(dot(u, v)))
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            dirs: self.dirs.clone(),
            weights: self.weights.iter().map(|w| c * w).collect(),
        }
    }

    /// Pushforward under `u ↦ -u`.
    pub fn reflected(&self) -> Self {
        Self {
            dim: self.dim,
            dirs: self.dirs.iter().map(|x| -x).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Pushforward under the orthogonal map `rotation`.
    pub fn rotated(&self, rotation: &Mat) -> Self {
        let mut dirs = Vec::with_capacity(self.dirs.len());
        for u in self.dirs.chunks_exact(self.dim) {
            let v = rotation * nalgebra::DVector::from_column_slice(u);
            dirs.extend(v.iter());
        }
        Self {
            dim: self.dim,
            dirs,
            weights: self.weights.clone(),
        }
    }

    /// Sum of measures, concatenating atoms.
    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.dirs.extend_from_slice(&other.dirs);
        out.weights.extend_from_slice(&other.weights);
        out
    }

    /// `½ μ + ½ μ(-·)`.
    pub fn even_part(&self) -> Self {
        self.scaled(0.5).plus(&self.reflected().scaled(0.5))
    }

    /// Merges atoms whose directions agree within `tol`, summing weights.
    /// Atoms are returned in lexicographic direction order.
    pub fn merged(&self, tol: f64) -> Self {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| {
            self.dir(a)
                .iter()
                .zip(self.dir(b))
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let mut out = Self::empty(self.dim);
        let mut used = vec![false; self.len()];
        for (p, &a) in idx.iter().enumerate() {
            if used[a] {
                continue;
            }
            let mut w = self.weights[a];
            for &b in &idx[p + 1..] {
                if !used[b]
                    && self
                        .dir(a)
                        .iter()
                        .zip(self.dir(b))
                        .all(|(x, y)| (x - y).abs() <= tol)
                {
                    used[b] = true;
                    w += self.weights[b];
                }
            }
            out.push_unchecked(self.dir(a), w);
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let atoms = self
            .atoms()
            .map(|(u, w)| AtomEntry { dir: u.to_vec(), w })
            .collect();
        serde_json::to_value(MeasureFile {
            dim: self.dim,
            atoms,
        })
        .expect("measure serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let file: MeasureFile = serde_json::from_value(value.clone())?;
        Self::new(
            file.dim,
            file.atoms.into_iter().map(|a| (a.dir, a.w)).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_unit_atoms() {
        assert!(AtomicMeasure::new(3, vec![(vec![1.0, 1.0, 0.0], 1.0)]).is_err());
    }

    #[test]
    fn merging_and_even_part() {
        let m = AtomicMeasure::new(
            2,
            vec![
                (vec![1.0, 0.0], 1.0),
                (vec![0.0, 1.0], 2.0),
                (vec![1.0, 0.0], 0.5),
            ],
        )
        .unwrap();
        let merged = m.merged(1e-12);
        assert_eq!(merged.len(), 2);
        assert_eq!(merged.total_mass(), 3.5);
        let e = m.even_part();
        assert_eq!(e.total_mass(), m.total_mass());
        assert_eq!(e.integrate(|u| u[0]), 0.0);
    }

    #[test]
    fn json_round_trip() {
        let m = AtomicMeasure::new(
            3,
            vec![(vec![0.6, 0.8, 0.0], 1.25), (vec![0.0, 0.0, -1.0], -0.5)],
        )
        .unwrap();
        assert_eq!(AtomicMeasure::from_json(&m.to_json()).unwrap(), m);
    }
}
