//! Small dense matrices over any [`Ring`]: `f64`, jets, or expressions.
//!
//! Dimensions here never exceed about eight, so everything is naive row-major
//! storage with Gauss-Jordan elimination. Pivot choice looks at the real value
//! of each entry, which keeps jet inverses differentiable through the
//! elimination.

use std::ops::{Index, IndexMut};

use crate::jets::{Ring, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Mat<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    /// Top-left block copy of `other` placed at `(r0, c0)`.
    pub fn set_block(&mut self, r0: usize, c0: usize, other: &Mat<T>) {
        for i in 0..other.rows {
            for j in 0..other.cols {
                self[(r0 + i, c0 + j)] = other[(i, j)].clone();
            }
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Mat::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Ring>(a: &[T], b: &[T]) -> T {
    assert_eq!(a.len(), b.len());
    let mut acc = a[0].clone() * b[0].clone();
    for (x, y) in a.iter().zip(b).skip(1) {
        acc = acc + x.clone() * y.clone();
    }
    acc
}

pub fn vadd<T: Ring>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() + y.clone())
        .collect()
}

pub fn vsub<T: Ring>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() - y.clone())
        .collect()
}

pub fn vscale<T: Ring>(k: &T, a: &[T]) -> Vec<T> {
    a.iter().map(|x| k.clone() * x.clone()).collect()
}

pub fn vneg<T: Ring>(a: &[T]) -> Vec<T> {
    a.iter().map(|x| -x.clone()).collect()
}

impl<T: Ring> Mat<T> {
    pub fn zeros(rows: usize, cols: usize, proto: &T) -> Self {
        Mat::from_fn(rows, cols, |_, _| proto.zero_like())
    }

    pub fn identity(n: usize, proto: &T) -> Self {
        Mat::from_fn(n, n, |i, j| {
            proto.constant_like(if i == j { 1.0 } else { 0.0 })
        })
    }

    pub fn matmul(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, rhs.rows, "matmul shape mismatch");
        Mat::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = self[(i, 0)].clone() * rhs[(0, j)].clone();
            for k in 1..self.cols {
                acc = acc + self[(i, k)].clone() * rhs[(k, j)].clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = self[(i, 0)].clone() * v[0].clone();
                for k in 1..self.cols {
                    acc = acc + self[(i, k)].clone() * v[k].clone();
                }
                acc
            })
            .collect()
    }

    /// `selfᵀ v` without materializing the transpose.
    pub fn tr_mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.rows, v.len());
        (0..self.cols)
            .map(|j| {
                let mut acc = self[(0, j)].clone() * v[0].clone();
                for k in 1..self.rows {
                    acc = acc + self[(k, j)].clone() * v[k].clone();
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + rhs[(i, j)].clone()
        })
    }

    pub fn sub(&self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - rhs[(i, j)].clone()
        })
    }

    pub fn neg(&self) -> Mat<T> {
        self.map(|x| -x.clone())
    }

    pub fn scale_by(&self, k: &T) -> Mat<T> {
        self.map(|x| k.clone() * x.clone())
    }

    pub fn scale(&self, c: f64) -> Mat<T> {
        self.map(|x| x.scale(c))
    }

    /// Determinant by cofactor expansion. Only meant for symbolic entries
    /// where pivoting is unavailable; cost is factorial in the dimension.
    pub fn det_cofactor(&self) -> T {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        match n {
            1 => self[(0, 0)].clone(),
            2 => {
                self[(0, 0)].clone() * self[(1, 1)].clone()
                    - self[(0, 1)].clone() * self[(1, 0)].clone()
            }
            _ => {
                let mut acc: Option<T> = None;
                for j in 0..n {
                    let term = self[(0, j)].clone() * self.minor(0, j).det_cofactor();
                    acc = Some(match acc {
                        None => term,
                        Some(a) if j % 2 == 0 => a + term,
                        Some(a) => a - term,
                    });
                }
                acc.expect("n >= 3")
            }
        }
    }

    /// Matrix with row `r` and column `c` removed.
    pub fn minor(&self, r: usize, c: usize) -> Mat<T> {
        Mat::from_fn(self.rows - 1, self.cols - 1, |i, j| {
            let ii = if i < r { i } else { i + 1 };
            let jj = if j < c { j } else { j + 1 };
            self[(ii, jj)].clone()
        })
    }

    /// Classical adjugate, `adj(M) M = det(M) I`.
    pub fn adjugate(&self) -> Mat<T> {
        let n = self.rows;
        if n == 1 {
            return Mat::identity(1, &self[(0, 0)]);
        }
        Mat::from_fn(n, n, |i, j| {
            let c = self.minor(j, i).det_cofactor();
            if (i + j) % 2 == 0 {
                c
            } else {
                -c
            }
        })
    }
}

impl<T: Scalar> Mat<T> {
    /// Real parts, dropping any derivative information.
    pub fn re(&self) -> Mat<f64> {
        self.map(Scalar::re)
    }

    /// Gauss-Jordan inverse with partial pivoting on real values. `None` when
    /// a pivot falls below `1e-300` relative scale (numerically singular).
    pub fn inverse(&self) -> Option<Mat<T>> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let proto = self[(0, 0)].clone();
        let mut a = self.clone();
        let mut inv = Mat::identity(n, &proto);
        let scale = self.data.iter().map(|x| x.re().abs()).fold(0.0, f64::max);
        if scale == 0.0 || !scale.is_finite() {
            return None;
        }
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| {
                    a[(x, col)]
                        .re()
                        .abs()
                        .partial_cmp(&a[(y, col)].re().abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("non-empty range");
            if a[(piv, col)].re().abs() <= 1e-14 * scale {
                return None;
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = a[(col, j)].clone() / p.clone();
                inv[(col, j)] = inv[(col, j)].clone() / p.clone();
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)].clone();
                for j in 0..n {
                    a[(r, j)] = a[(r, j)].clone() - f.clone() * a[(col, j)].clone();
                    inv[(r, j)] = inv[(r, j)].clone() - f.clone() * inv[(col, j)].clone();
                }
            }
        }
        Some(inv)
    }

    pub fn solve(&self, b: &[T]) -> Option<Vec<T>> {
        self.inverse().map(|inv| inv.mul_vec(b))
    }

    /// Determinant by partial-pivot elimination.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = self[(0, 0)].one_like();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&x, &y| {
                    a[(x, col)]
                        .re()
                        .abs()
                        .partial_cmp(&a[(y, col)].re().abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .expect("non-empty range");
            if a[(piv, col)].re() == 0.0 {
                // Exactly singular in value; the jet of the determinant is
                // still well defined but we only need it off this locus.
                return det.zero_like();
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                }
                det = -det;
            }
            let p = a[(col, col)].clone();
            det = det * p.clone();
            for r in col + 1..n {
                let f = a[(r, col)].clone() / p.clone();
                for j in col..n {
                    a[(r, j)] = a[(r, j)].clone() - f.clone() * a[(col, j)].clone();
                }
            }
        }
        det
    }
}

impl Mat<f64> {
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jets::Jet;

    #[test]
    fn inverse_roundtrip() {
        let m = Mat::from_rows(vec![
            vec![2.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.0, 1.0, 4.0],
        ]);
        let inv = m.inverse().unwrap();
        let id = m.matmul(&inv);
        assert!(id.sub(&Mat::identity(3, &0.0)).max_abs() < 1e-15);
        assert!((m.det() - m.det_cofactor()).abs() < 1e-12);
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = Mat::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(m.inverse().is_none());
    }

    #[test]
    fn adjugate_identity() {
        let m = Mat::from_rows(vec![
            vec![1.0, 2.0, 0.5, 0.0],
            vec![0.0, 1.0, 3.0, 1.0],
            vec![2.0, 0.0, 1.0, 1.0],
            vec![1.0, 1.0, 0.0, 2.0],
        ]);
        let d = m.det_cofactor();
        let lhs = m.adjugate().matmul(&m);
        assert!(lhs.sub(&Mat::identity(4, &0.0).scale(d)).max_abs() < 1e-12);
    }

    #[test]
    fn jet_inverse_derivative() {
        // d(M^-1) = -M^-1 dM M^-1 for M(x) = [[1 + x, 0], [x, 2]] at x = 1
        let x = Jet::seed(&[1.0])[0].clone();
        let one = x.one_like();
        let m = Mat::from_rows(vec![
            vec![one.clone() + x.clone(), x.zero_like()],
            vec![x.clone(), one.scale(2.0)],
        ]);
        let inv = m.inverse().unwrap();
        let mv = m.re();
        let dm = m.map(|e| e.grad[0]);
        let iv = mv.inverse().unwrap();
        let expect = iv.matmul(&dm).matmul(&iv).neg();
        let got = inv.map(|e| e.grad[0]);
        assert!(got.sub(&expect).max_abs() < 1e-15);
    }
}
