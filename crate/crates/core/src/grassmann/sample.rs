//! Weighted subspace samples representing measures on `Gr_{i,n}`, and
//! functions on the Grassmannian.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::subspace::{cosine_unchecked, Subspace};
use crate::error::{invalid, Result};
use crate::linalg::{haar_orthogonal, reflection_between, Mat, Vector};
use crate::rng::{derive_seed, stream, tags};
use crate::stats::pairwise_sum;

/// A finite signed measure on `Gr_{i,n}` given by weighted subspaces.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannSample {
    n: usize,
    i: usize,
    subspaces: Vec<Subspace>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SampleFile {
    n: usize,
    i: usize,
    /// Each frame as a list of its `i` column vectors.
    frames: Vec<Vec<Vec<f64>>>,
    weights: Vec<f64>,
}

impl GrassmannSample {
    pub fn new(subspaces: Vec<Subspace>, weights: Vec<f64>) -> Result<Self> {
        if subspaces.is_empty() || subspaces.len() != weights.len() {
            return invalid("a Grassmann sample needs one weight per subspace");
        }
        let (n, i) = (subspaces[0].n(), subspaces[0].dim());
        if subspaces.iter().any(|s| s.n() != n || s.dim() != i) {
            return invalid("all subspaces in a sample must share (n, i)");
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return invalid("sample weights must be finite");
        }
        Ok(Self {
            n,
            i,
            subspaces,
            weights,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn len(&self) -> usize {
        self.subspaces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subspaces.is_empty()
    }

    pub fn subspaces(&self) -> &[Subspace] {
        &self.subspaces
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        pairwise_sum(&self.weights)
    }

    pub fn total_variation(&self) -> f64 {
        let abs: Vec<f64> = self.weights.iter().map(|w| w.abs()).collect();
        pairwise_sum(&abs)
    }

    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        Self::new(self.subspaces.clone(), weights)
    }

    /// Pushforward under `E ↦ ϑE`.
    pub fn rotated(&self, rotation: &Mat) -> Self {
        Self {
            n: self.n,
            i: self.i,
            subspaces: self.subspaces.iter().map(|s| s.rotated(rotation)).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Pushforward under `E ↦ E^⊥`.
    pub fn perp(&self) -> Result<Self> {
        let subspaces = self
            .subspaces
            .iter()
            .map(super::subspace::perp)
            .collect::<Result<Vec<_>>>()?;
        Self::new(subspaces, self.weights.clone())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let frames = self
            .subspaces
            .iter()
            .map(|s| {
                let c = s.canonical();
                (0..self.i)
                    .map(|k| c.frame().column(k).iter().copied().collect())
                    .collect()
            })
            .collect();
        serde_json::to_value(SampleFile {
            n: self.n,
            i: self.i,
            frames,
            weights: self.weights.clone(),
        })
        .expect("sample serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let file: SampleFile = serde_json::from_value(value.clone())?;
        let mut subspaces = Vec::with_capacity(file.frames.len());
        for frame in &file.frames {
            if frame.len() != file.i || frame.iter().any(|c| c.len() != file.n) {
                return invalid("frame shape does not match (n, i)");
            }
            let cols: Vec<f64> = frame.iter().flatten().copied().collect();
            subspaces.push(Subspace::new(Mat::from_column_slice(
                file.n, file.i, &cols,
            ))?);
        }
        Self::new(subspaces, file.weights)
    }
}

/// `count` subspaces from orthonormalized Gaussian frames, each drawn from
/// its own seeded stream, with weights `1/count`.
pub fn sample_grassmann(n: usize, i: usize, count: usize, seed: u64) -> Result<GrassmannSample> {
    if i == 0 || i >= n {
        return invalid(format!("need 1 ≤ i ≤ n-1, got i = {i}, n = {n}"));
    }
    if count == 0 {
        return invalid("sample count must be positive");
    }
    let subspaces = (0..count)
        .map(|k| Subspace::random(n, i, &mut stream(seed, tags::GRASSMANN, k as u64)))
        .collect();
    GrassmannSample::new(subspaces, vec![1.0 / count as f64; count])
}

/// An orthogonal `η` with `η e_1 = u`: the reflection exchanging `e_1` and
/// `u`, composed with a seeded Haar rotation fixing `e_1`.
pub fn rotation_mapping_pole(u: &[f64], stabilizer_seed: u64) -> Mat {
    let n = u.len();
    let mut rng = stream(stabilizer_seed, tags::STABILIZER, 0);
    let q = haar_orthogonal(n - 1, &mut rng);
    let mut h = Mat::identity(n, n);
    h.view_mut((1, 1), (n - 1, n - 1)).copy_from(&q);
    let mut pole = Vector::zeros(n);
    pole[0] = 1.0;
    reflection_between(&pole, &Vector::from_column_slice(u)) * h
}

/// Equal-weight, evenly spread `k`-dimensional subspaces of `R^m` for
/// `m ≤ 3`: lines at equispaced angles in the plane, and lines (or their
/// orthogonal planes) through a Fibonacci spiral in space.
pub fn stratified_subspaces(m: usize, k: usize, count: usize) -> Vec<Mat> {
    if k == 0 {
        return vec![Mat::zeros(m, 0)];
    }
    if k == m {
        return vec![Mat::identity(m, m)];
    }
    let count = count.max(1);
    match m {
        2 => (0..count)
            .map(|j| {
                let a = std::f64::consts::PI * (j as f64 + 0.5) / count as f64;
                Mat::from_column_slice(2, 1, &[a.cos(), a.sin()])
            })
            .collect(),
        3 => {
            let golden = (1.0 + 5f64.sqrt()) / 2.0;
            (0..count)
                .map(|j| {
                    let z = 1.0 - (2 * j + 1) as f64 / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = 2.0 * std::f64::consts::PI * (j as f64 / golden).fract();
                    let v = [r * phi.cos(), r * phi.sin(), z];
                    let line = Mat::from_column_slice(3, 1, &v);
                    if k == 1 {
                        line
                    } else {
                        crate::linalg::orthogonal_complement(&line)
                    }
                })
                .collect()
        }
        _ => panic!("stratified subspaces are only provided for m ≤ 3"),
    }
}

/// Stratified sample of the `i`-subspaces containing `u`, rotated about
/// `u` by a seeded random stabilizer.
pub fn subspaces_containing(
    u: &[f64],
    i: usize,
    count: usize,
    stabilizer_seed: u64,
) -> Vec<Subspace> {
    let n = u.len();
    let eta = rotation_mapping_pole(u, stabilizer_seed);
    stratified_subspaces(n - 1, i - 1, count)
        .into_iter()
        .map(|g| {
            let mut local = Mat::zeros(n, i);
            local[(0, 0)] = 1.0;
            local.view_mut((1, 1), (n - 1, i - 1)).copy_from(&g);
            Subspace::new(&eta * local).expect("rotated frame is orthonormal")
        })
        .collect()
}

/// Stratified sample of the `i`-subspaces orthogonal to `u`.
pub fn subspaces_orthogonal_to(
    u: &[f64],
    i: usize,
    count: usize,
    stabilizer_seed: u64,
) -> Vec<Subspace> {
    let n = u.len();
    let eta = rotation_mapping_pole(u, stabilizer_seed);
    stratified_subspaces(n - 1, i, count)
        .into_iter()
        .map(|g| {
            let mut local = Mat::zeros(n, i);
            local.view_mut((1, 0), (n - 1, i)).copy_from(&g);
            Subspace::new(&eta * local).expect("rotated frame is orthonormal")
        })
        .collect()
}

pub(crate) fn node_seed(seed: u64, tag: u64, node: usize) -> u64 {
    derive_seed(seed, tag, node as u64)
}

type Rule = Arc<dyn Fn(&Subspace) -> f64 + Send + Sync>;

/// A real function on `Gr_{i,n}`: a closed-form rule, or values tabulated
/// on a sample.
#[derive(Clone)]
pub struct GrassmannFunction {
    i: usize,
    kind: FunctionKind,
}

#[derive(Clone)]
enum FunctionKind {
    Rule(Rule),
    Tabulated {
        sample: Arc<GrassmannSample>,
        values: Vec<f64>,
    },
}

impl fmt::Debug for GrassmannFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FunctionKind::Rule(_) => write!(f, "GrassmannFunction(i = {}, rule)", self.i),
            FunctionKind::Tabulated { values, .. } => {
                write!(
                    f,
                    "GrassmannFunction(i = {}, {} values)",
                    self.i,
                    values.len()
                )
            }
        }
    }
}

impl GrassmannFunction {
    pub fn from_fn(i: usize, f: impl Fn(&Subspace) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            i,
            kind: FunctionKind::Rule(Arc::new(f)),
        }
    }

    pub fn constant(i: usize, c: f64) -> Self {
        Self::from_fn(i, move |_| c)
    }

    pub fn tabulated(sample: Arc<GrassmannSample>, values: Vec<f64>) -> Result<Self> {
        if values.len() != sample.len() {
            return invalid("one value per sample subspace is required");
        }
        Ok(Self {
            i: sample.i(),
            kind: FunctionKind::Tabulated { sample, values },
        })
    }

    pub fn degree(&self) -> usize {
        self.i
    }

    /// Value at `e`; tabulated functions are only defined on their sample.
    pub fn eval(&self, e: &Subspace) -> Result<f64> {
        if e.dim() != self.i {
            return invalid(format!(
                "function on Gr_{} evaluated at a {}-subspace",
                self.i,
                e.dim()
            ));
        }
        match &self.kind {
            FunctionKind::Rule(f) => Ok(f(e)),
            FunctionKind::Tabulated { sample, values } => sample
                .subspaces()
                .iter()
                .position(|s| (cosine_unchecked(s, e) - 1.0).abs() < 1e-12)
                .map(|k| values[k])
                .ok_or_else(|| {
                    crate::Error::InvalidInput("subspace is not in the tabulation sample".into())
                }),
        }
    }

    /// Values on the subspaces of `sample`, using the table directly when
    /// `sample` is the tabulation sample.
    pub fn values_on(&self, sample: &GrassmannSample) -> Result<Vec<f64>> {
        if let FunctionKind::Tabulated {
            sample: own,
            values,
        } = &self.kind
        {
            if own.as_ref() == sample {
                return Ok(values.clone());
            }
        }
        sample.subspaces().iter().map(|s| self.eval(s)).collect()
    }

    /// `f^⊥(E) = f(E^⊥)`, a function on `Gr_{n-i,n}`.
    pub fn perp_transform(&self, n: usize) -> Self {
        let inner = self.clone();
        Self::from_fn(n - self.i, move |e| {
            let p = super::subspace::perp(e).expect("proper subspace");
            inner.eval(&p).unwrap_or(f64::NAN)
        })
    }
}
