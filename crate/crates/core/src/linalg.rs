//! Small dense linear algebra on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::rng::Rng;

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn gaussian_vector(n: usize, rng: &mut Rng) -> Vector {
    Vector::from_fn(n, |_, _| rng.sample(StandardNormal))
}

/// Uniform point on `S^{n-1}`.
pub fn random_unit(n: usize, rng: &mut Rng) -> Vector {
    loop {
        let g = gaussian_vector(n, rng);
        let r = g.norm();
        if r > 1e-12 {
            return g / r;
        }
    }
}

/// Orthonormalizes the columns in order; `None` if they are dependent.
pub fn gram_schmidt(m: &Mat, tol: f64) -> Option<Mat> {
    let mut q = m.clone();
    for j in 0..q.ncols() {
        // twice is enough
        for _ in 0..2 {
            for k in 0..j {
                let proj = q.column(k).dot(&q.column(j));
                let qk = q.column(k).clone_owned();
                q.column_mut(j).axpy(-proj, &qk, 1.0);
            }
        }
        let r = q.column(j).norm();
        if r <= tol {
            return None;
        }
        q.column_mut(j).unscale_mut(r);
    }
    Some(q)
}

/// Haar-distributed element of `O(n)`: QR of a Gaussian matrix with the
/// sign of `diag(R)` fixed.
pub fn haar_orthogonal(n: usize, rng: &mut Rng) -> Mat {
    loop {
        let g = Mat::from_fn(n, n, |_, _| rng.sample(StandardNormal));
        if let Some(q) = gram_schmidt(&g, 1e-10) {
            return q;
        }
    }
}

/// Orthonormal basis of the orthogonal complement of the column span of
/// `frame` (assumed orthonormal).
pub fn orthogonal_complement(frame: &Mat) -> Mat {
    let n = frame.nrows();
    let k = frame.ncols();
    let mut cols: Vec<Vector> = (0..k).map(|j| frame.column(j).clone_owned()).collect();
    let mut out = Vec::with_capacity(n - k);
    // Adding coordinate axes in order of largest residual keeps this stable.
    while out.len() < n - k {
        let mut best: Option<(f64, Vector)> = None;
        for a in 0..n {
            let mut v = Vector::zeros(n);
            v[a] = 1.0;
            for _ in 0..2 {
                for c in &cols {
                    let p = c.dot(&v);
                    v.axpy(-p, c, 1.0);
                }
            }
            let r = v.norm();
            if best.as_ref().is_none_or(|(b, _)| r > *b) {
                best = Some((r, v));
            }
        }
        let (r, v) = best.expect("n > 0");
        let v = v / r;
        cols.push(v.clone());
        out.push(v);
    }
    Mat::from_columns(&out)
}

/// Householder reflection mapping the unit vector `from` onto the unit
/// vector `to`.
pub fn reflection_between(from: &Vector, to: &Vector) -> Mat {
    let n = from.len();
    let w = from - to;
    let ww = w.dot(&w);
    if ww < 1e-30 {
        return Mat::identity(n, n);
    }
    Mat::identity(n, n) - (&w * w.transpose()) * (2.0 / ww)
}

/// Determinant of a small row-major square matrix by partial pivoting.
pub fn det_small(a: &mut [f64], d: usize) -> f64 {
    let mut det = 1.0;
    for c in 0..d {
        let mut piv = c;
        for r in c + 1..d {
            if a[r * d + c].abs() > a[piv * d + c].abs() {
                piv = r;
            }
        }
        if a[piv * d + c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            for k in 0..d {
                a.swap(c * d + k, piv * d + k);
            }
            det = -det;
        }
        let p = a[c * d + c];
        det *= p;
        for r in c + 1..d {
            let f = a[r * d + c] / p;
            if f != 0.0 {
                for k in c..d {
                    a[r * d + k] -= f * a[c * d + k];
                }
            }
        }
    }
    det
}

/// Double-double arithmetic, used to settle orientation signs that are too
/// close to zero for plain `f64`.
#[derive(Debug, Clone, Copy)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }
}

impl std::ops::Add for DoubleDouble {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, o.hi);
        let e = e + self.lo + o.lo;
        let (hi, lo) = Self::two_sum(s, e);
        Self { hi, lo }
    }
}

impl std::ops::Neg for DoubleDouble {
    type Output = Self;

    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl std::ops::Mul for DoubleDouble {
    type Output = Self;

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let e = e + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = Self::two_sum(p, e);
        Self { hi, lo }
    }
}

/// Determinant of a small row-major matrix (d ≤ 4) by cofactor expansion
/// in double-double arithmetic.
pub fn det_extended(a: &[f64], d: usize) -> f64 {
    fn rec(a: &[f64], d: usize, rows: &[usize], cols: &[usize]) -> DoubleDouble {
        if rows.len() == 1 {
            return DoubleDouble::from_f64(a[rows[0] * d + cols[0]]);
        }
        let r = rows[0];
        let rest = &rows[1..];
        let mut acc = DoubleDouble::from_f64(0.0);
        for (k, &c) in cols.iter().enumerate() {
            let x = a[r * d + c];
            if x == 0.0 {
                continue;
            }
            let sub: Vec<usize> = cols.iter().copied().filter(|&cc| cc != c).collect();
            let term = DoubleDouble::from_f64(x) * rec(a, d, rest, &sub);
            acc = if k.is_multiple_of(2) {
                acc + term
            } else {
                acc + -term
            };
        }
        acc
    }
    let idx: Vec<usize> = (0..d).collect();
    rec(a, d, &idx, &idx).value()
}

/// Orthonormal basis (as columns) of the affine hull of `points` (columns)
/// together with its base point; the basis has as many columns as the
/// affine dimension detected at relative tolerance `tol`.
pub fn affine_frame(points: &Mat, tol: f64) -> (Vector, Mat) {
    let n = points.nrows();
    let m = points.ncols();
    let base = points.column(0).clone_owned();
    let scale = (0..m)
        .map(|j| (points.column(j) - &base).norm())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut basis: Vec<Vector> = Vec::new();
    loop {
        if basis.len() == n {
            break;
        }
        let mut best: Option<(f64, Vector)> = None;
        for j in 0..m {
            let mut v = points.column(j) - &base;
            for _ in 0..2 {
                for b in &basis {
                    let p = b.dot(&v);
                    v.axpy(-p, b, 1.0);
                }
            }
            let r = v.norm();
            if best.as_ref().is_none_or(|(bv, _)| r > *bv) {
                best = Some((r, v));
            }
        }
        match best {
            Some((r, v)) if r > tol * scale => basis.push(v / r),
            _ => break,
        }
    }
    let frame = if basis.is_empty() {
        Mat::zeros(n, 0)
    } else {
        Mat::from_columns(&basis)
    };
    (base, frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn haar_is_orthogonal() {
        let mut rng = stream(1, 0, 0);
        let q = haar_orthogonal(4, &mut rng);
        let e = (q.transpose() * &q - Mat::identity(4, 4)).abs().max();
        assert!(e < 1e-12);
    }

    #[test]
    fn complement_is_orthogonal() {
        let mut rng = stream(2, 0, 0);
        let q = haar_orthogonal(4, &mut rng);
        let f = q.columns(0, 2).clone_owned();
        let c = orthogonal_complement(&f);
        assert_eq!(c.ncols(), 2);
        assert!((f.transpose() * &c).abs().max() < 1e-12);
        assert!((c.transpose() * &c - Mat::identity(2, 2)).abs().max() < 1e-12);
    }

    #[test]
    fn reflection_maps_from_to() {
        let mut rng = stream(3, 0, 0);
        let a = random_unit(3, &mut rng);
        let b = random_unit(3, &mut rng);
        let h = reflection_between(&a, &b);
        assert!((&h * &a - &b).norm() < 1e-12);
    }

    #[test]
    fn extended_determinant_agrees() {
        let a = [2.0, 1.0, 0.5, 1.0, 3.0, 0.25, 0.0, 1.0, 4.0];
        let mut b = a;
        let d1 = det_small(&mut b, 3);
        let d2 = det_extended(&a, 3);
        assert!((d1 - d2).abs() < 1e-12);
    }

    #[test]
    fn extended_determinant_resolves_tiny_volumes() {
        // Rows (1, 1+2^-40) and (1, 1): plain products cancel exactly.
        let t = 2f64.powi(-40);
        let a = [1.0, 1.0 + t, 1.0, 1.0];
        assert_eq!(det_extended(&a, 2), -t);
    }
}
