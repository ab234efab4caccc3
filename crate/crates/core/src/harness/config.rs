//! Suite configuration.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{invalid, Result};

/// Everything that determines a suite run. Reports are a pure function of
/// this value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub n: usize,
    /// Valuation degrees to exercise; empty means `1..n`.
    pub degrees: Vec<usize>,
    /// Random bodies per single-body check.
    pub bodies: usize,
    /// Random pairs per inequality check.
    pub pairs: usize,
    /// Vertices per random polytope.
    pub vertices: usize,
    /// Sphere grid nodes.
    pub nodes: usize,
    /// Grassmann samples per Monte Carlo average.
    pub gr_samples: usize,
    /// Inner samples per Radon evaluation.
    pub inner: usize,
    /// Multiplier applied to standard errors.
    pub tol_mult: f64,
    /// Absolute tolerance floor.
    pub tol_floor: f64,
    /// Relative tolerance for cross-route comparisons.
    pub rel_tol: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n: 3,
            degrees: Vec::new(),
            bodies: 20,
            pairs: 50,
            vertices: 12,
            nodes: 20_000,
            gr_samples: 20_000,
            inner: 512,
            tol_mult: 3.0,
            tol_floor: 1e-8,
            rel_tol: 0.01,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n != 3 && self.n != 4 {
            return Err(crate::Error::UnsupportedDimension(self.n));
        }
        if self.bodies == 0
            || self.pairs == 0
            || self.nodes == 0
            || self.gr_samples == 0
            || self.inner == 0
        {
            return invalid("all counts must be positive");
        }
        if self.vertices < self.n + 1 {
            return invalid(format!(
                "random polytopes need at least {} vertices",
                self.n + 1
            ));
        }
        if !(self.tol_mult >= 1.0) {
            return invalid("the standard-error multiplier must be at least 1");
        }
        if !(self.tol_floor >= 0.0) || !(self.rel_tol >= 0.0) {
            return invalid("tolerances must be nonnegative");
        }
        if self.degrees.iter().any(|&i| i == 0 || i >= self.n) {
            return invalid(format!("degrees must lie in 1..{}", self.n));
        }
        Ok(())
    }

    pub fn degrees(&self) -> Vec<usize> {
        if self.degrees.is_empty() {
            (1..self.n).collect()
        } else {
            self.degrees.clone()
        }
    }

    /// `max(floor, multiplier · se)`.
    pub fn se_tolerance(&self, se: f64) -> f64 {
        crate::stats::tolerance(se, self.tol_mult, self.tol_floor)
    }

    /// `max(rel_tol · |reference|, multiplier · se, floor)`.
    pub fn mixed_tolerance(&self, reference: f64, se: f64) -> f64 {
        self.se_tolerance(se).max(self.rel_tol * reference.abs())
    }

    /// Short hexadecimal digest of the canonical JSON form.
    pub fn run_id(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(text.as_bytes());
        hex::encode(&digest[..20])
    }
}

/// Stable 64-bit key for a check id.
pub(crate) fn id_key(id: &str) -> u64 {
    let digest = Sha256::digest(id.as_bytes());
    u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
}
