//! Dense matrices over Q with Gaussian elimination.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        Ok(QMatrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| rational::int(x)).collect())
                .collect(),
        )
        .expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    /// Row echelon form in place; returns pivot columns.
    fn echelon(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                for k in 0..self.cols {
                    self.data.swap(p * self.cols + k, r * self.cols + k);
                }
            }
            let inv = self[(r, c)].recip();
            for k in c..self.cols {
                self[(r, k)] = &self[(r, k)] * &inv;
            }
            for i in 0..self.rows {
                if i == r || self[(i, c)].is_zero() {
                    continue;
                }
                let f = self[(i, c)].clone();
                for k in c..self.cols {
                    let v = &self[(r, k)] * &f;
                    self[(i, k)] -= v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().echelon().len()
    }

    pub fn det(&self) -> Result<Rational> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("determinant of non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
                return Ok(Rational::zero());
            };
            if p != c {
                for k in 0..n {
                    a.data.swap(p * n + k, c * n + k);
                }
                det = -det;
            }
            let piv = a[(c, c)].clone();
            det *= &piv;
            for i in c + 1..n {
                if a[(i, c)].is_zero() {
                    continue;
                }
                let f = &a[(i, c)] / &piv;
                for k in c..n {
                    let v = &a[(c, k)] * &f;
                    a[(i, k)] -= v;
                }
            }
        }
        Ok(det)
    }

    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::one();
        }
        let pivots = aug.echelon();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::SingularMatrix);
        }
        let mut inv = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = aug[(i, n + j)].clone();
            }
        }
        Ok(inv)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }
}

/// Rank of the span of `vectors` (all of equal length).
pub fn span_rank(vectors: &[Vec<Rational>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    QMatrix::from_rows(vectors.to_vec())
        .expect("equal-length vectors")
        .rank()
}

/// Whether `target` is a linear combination of `vectors`.
pub fn in_span(vectors: &[Vec<Rational>], target: &[Rational]) -> bool {
    if target.iter().all(Zero::is_zero) {
        return true;
    }
    let base = span_rank(vectors);
    let mut ext = vectors.to_vec();
    ext.push(target.to_vec());
    span_rank(&ext) == base
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &QMatrix {
    type Output = QMatrix;
    fn mul(self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix shapes do not compose");
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = a * &rhs[(k, j)];
                    out[(i, j)] += v;
                }
            }
        }
        out
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<String>> = self
            .to_rows()
            .iter()
            .map(|r| r.iter().map(|x| x.to_string()).collect())
            .collect();
        write!(f, "QMatrix{rows:?}")
    }
}

/// Row-major nested arrays of `"p/q"` strings.
impl Serialize for QMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        rational::serde_rows::serialize(&self.to_rows(), s)
    }
}

impl<'de> Deserialize<'de> for QMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = rational::serde_rows::deserialize(d)?;
        QMatrix::from_rows(rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn inverse_and_det() {
        let a = QMatrix::from_i64(&[&[2, 1], &[7, 4]]);
        assert_eq!(a.det().unwrap(), int(1));
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, QMatrix::identity(2));
        let s = QMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.inverse().unwrap_err(), Error::SingularMatrix);
        assert_eq!(s.det().unwrap(), int(0));
    }

    #[test]
    fn det_with_pivoting() {
        let a = QMatrix::from_i64(&[&[0, 1, 2], &[3, 0, 1], &[1, 1, 0]]);
        // 0(0-1) - 1(0-1) + 2(3-0) = 7
        assert_eq!(a.det().unwrap(), int(7));
    }

    #[test]
    fn rank_and_span() {
        let v = vec![vec![int(1), int(0), int(1)], vec![int(0), int(1), int(1)]];
        assert_eq!(span_rank(&v), 2);
        assert!(in_span(&v, &[int(2), int(3), int(5)]));
        assert!(!in_span(&v, &[int(0), int(0), int(1)]));
        assert!(in_span(&[], &[int(0), int(0)]));
        assert_eq!(QMatrix::from_i64(&[&[1, 0], &[1, 0]]).rank(), 1);
    }

    #[test]
    fn serde_rows() {
        let a = QMatrix::from_rows(vec![vec![frac(1, 2), int(0)], vec![int(-3), int(1)]]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"[["1/2","0/1"],["-3/1","1/1"]]"#);
        let back: QMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
    }
}
