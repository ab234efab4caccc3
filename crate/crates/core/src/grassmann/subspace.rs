//! Linear subspaces as orthonormal frames.

use nalgebra::DMatrix;
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::linalg::{gram_schmidt, orthogonal_complement, Mat};
use crate::rng::Rng;

/// Orthonormality tolerance for frames.
pub const FRAME_TOL: f64 = 1e-10;

/// An `i`-dimensional linear subspace of `R^n`, stored as an `n × i` matrix
/// with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    frame: Mat,
}

impl Subspace {
    /// Wraps a frame whose columns must be orthonormal within
    /// [`FRAME_TOL`].
    pub fn new(frame: Mat) -> Result<Self> {
        let (n, i) = frame.shape();
        if i == 0 || i > n {
            return invalid(format!("subspace dimension {i} out of range for n = {n}"));
        }
        let err = (frame.transpose() * &frame - Mat::identity(i, i))
            .abs()
            .max();
        if !(err <= FRAME_TOL) {
            return invalid(format!("frame is not orthonormal (error {err:.2e})"));
        }
        Ok(Self { frame })
    }

    /// The span of the columns of `m`, which must be independent.
    pub fn from_spanning(m: &Mat) -> Result<Self> {
        match gram_schmidt(m, 1e-12) {
            Some(q) => Self::new(q),
            None => invalid("spanning vectors are linearly dependent"),
        }
    }

    /// `span{e_1, …, e_i}`.
    pub fn pole(n: usize, i: usize) -> Self {
        Self {
            frame: Mat::identity(n, i),
        }
    }

    /// `span{u}` for a nonzero `u`.
    pub fn line(u: &[f64]) -> Result<Self> {
        Self::from_spanning(&Mat::from_column_slice(u.len(), 1, u))
    }

    /// Uniformly distributed subspace: span of a Gaussian matrix.
    pub fn random(n: usize, i: usize, rng: &mut Rng) -> Self {
        loop {
            let g = Mat::from_fn(n, i, |_, _| rng.sample(StandardNormal));
            if let Some(q) = gram_schmidt(&g, 1e-10) {
                return Self { frame: q };
            }
        }
    }

    pub fn n(&self) -> usize {
        self.frame.nrows()
    }

    pub fn dim(&self) -> usize {
        self.frame.ncols()
    }

    pub fn frame(&self) -> &Mat {
        &self.frame
    }

    /// `ϑ E` for an orthogonal `ϑ`.
    pub fn rotated(&self, rotation: &Mat) -> Self {
        Self {
            frame: rotation * &self.frame,
        }
    }

    /// Coordinates of the orthogonal projection of `x` in the frame basis.
    pub fn coordinates(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|c| self.frame.column(c).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Embeds frame coordinates back into `R^n`.
    pub fn embed(&self, y: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        for (c, yc) in y.iter().enumerate() {
            for (r, o) in out.iter_mut().enumerate() {
                *o += self.frame[(r, c)] * yc;
            }
        }
        out
    }

    /// Distance from `x` to the subspace.
    pub fn distance(&self, x: &[f64]) -> f64 {
        let p = self.embed(&self.coordinates(x));
        p.iter()
            .zip(x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn projector(&self) -> Mat {
        &self.frame * self.frame.transpose()
    }

    /// A frame depending only on the subspace: reduced row echelon form of
    /// the transposed frame followed by Gram–Schmidt, so pivots are positive.
    pub fn canonical(&self) -> Self {
        let mut rows = self.frame.transpose();
        let (i, n) = rows.shape();
        let mut r = 0;
        for c in 0..n {
            if r == i {
                break;
            }
            let piv = (r..i)
                .max_by(|&a, &b| rows[(a, c)].abs().total_cmp(&rows[(b, c)].abs()))
                .unwrap();
            if rows[(piv, c)].abs() < 1e-8 {
                continue;
            }
            rows.swap_rows(r, piv);
            let p = rows[(r, c)];
            for k in 0..n {
                rows[(r, k)] /= p;
            }
            for a in 0..i {
                if a != r {
                    let f = rows[(a, c)];
                    if f != 0.0 {
                        for k in 0..n {
                            rows[(a, k)] -= f * rows[(r, k)];
                        }
                    }
                }
            }
            r += 1;
        }
        let q = gram_schmidt(&rows.transpose(), 1e-12).expect("echelon rows are independent");
        Self { frame: q }
    }
}

/// `|cos(E, F)| = |det(A_Eᵀ A_F)|`.
pub fn cosine(e: &Subspace, f: &Subspace) -> Result<f64> {
    if e.n() != f.n() || e.dim() != f.dim() {
        return invalid(format!(
            "cosine needs subspaces of equal type, got ({}, {}) and ({}, {})",
            e.n(),
            e.dim(),
            f.n(),
            f.dim()
        ));
    }
    Ok(cosine_unchecked(e, f))
}

pub(crate) fn cosine_unchecked(e: &Subspace, f: &Subspace) -> f64 {
    let m = e.frame.transpose() * &f.frame;
    m.determinant().abs().min(1.0)
}

/// Cosines of the principal angles between `E` and `F`, descending.
pub fn principal_cosines(e: &Subspace, f: &Subspace) -> Vec<f64> {
    let m = e.frame.transpose() * &f.frame;
    let mut s: Vec<f64> = m.singular_values().iter().map(|x| x.min(1.0)).collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Orthogonal complement `E^⊥`; for `E = R^n` this is an error.
pub fn perp(e: &Subspace) -> Result<Subspace> {
    if e.dim() == e.n() {
        return invalid("the whole space has no nonzero orthogonal complement");
    }
    Ok(Subspace {
        frame: orthogonal_complement(&e.frame),
    })
}

impl From<Subspace> for DMatrix<f64> {
    fn from(s: Subspace) -> Self {
        s.frame
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_orthogonal;
    use crate::rng::stream;

    #[test]
    fn cosine_examples() {
        let e = Subspace::line(&[1.0, 0.0, 0.0]).unwrap();
        assert!((cosine(&e, &e).unwrap() - 1.0).abs() < 1e-15);
        let f = Subspace::line(&[0.0, 1.0, 0.0]).unwrap();
        assert!(cosine(&e, &f).unwrap().abs() < 1e-15);
        let g = Subspace::line(&[0.5, 3f64.sqrt() / 2.0, 0.0]).unwrap();
        assert!((cosine(&e, &g).unwrap() - 0.5).abs() < 1e-15);
        assert!(cosine(&e, &Subspace::pole(3, 2)).is_err());
    }

    #[test]
    fn cosine_is_symmetric_and_perp_invariant() {
        let mut rng = stream(4, 0, 0);
        for _ in 0..50 {
            let e = Subspace::random(4, 2, &mut rng);
            let f = Subspace::random(4, 2, &mut rng);
            let c = cosine(&e, &f).unwrap();
            assert!((c - cosine(&f, &e).unwrap()).abs() < 1e-12);
            let cp = cosine(&perp(&e).unwrap(), &perp(&f).unwrap()).unwrap();
            assert!((c - cp).abs() < 1e-10);
            let e3 = Subspace::random(3, 1, &mut rng);
            let f3 = Subspace::random(3, 1, &mut rng);
            let c3 = cosine(&e3, &f3).unwrap();
            assert!((c3 - cosine(&perp(&e3).unwrap(), &perp(&f3).unwrap()).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn canonical_frame_ignores_basis_choice() {
        let mut rng = stream(5, 0, 0);
        let e = Subspace::random(4, 2, &mut rng);
        let q = haar_orthogonal(2, &mut rng);
        let other = Subspace::new(e.frame() * q).unwrap();
        let (a, b) = (e.canonical(), other.canonical());
        assert!((a.frame() - b.frame()).abs().max() < 1e-12);
    }

    #[test]
    fn rejects_non_orthonormal_frames() {
        assert!(Subspace::new(Mat::from_column_slice(3, 1, &[1.0, 1.0, 0.0])).is_err());
    }
}
