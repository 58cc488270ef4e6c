//! Jets of m×m matrices: truncated series entries sharing one `(d, r)`.

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::rational::{self, Rational};
use crate::series::{basis, TruncatedSeries};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixJet {
    d: usize,
    r: usize,
    m: usize,
    /// Row-major entries.
    entries: Vec<TruncatedSeries>,
}

impl MatrixJet {
    pub fn new(d: usize, r: usize, m: usize, entries: Vec<TruncatedSeries>) -> Result<Self> {
        if entries.len() != m * m {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {m}×{m} matrix jet",
                entries.len()
            )));
        }
        if entries.iter().any(|s| s.d() != d || s.r() != r) {
            return Err(Error::DimensionMismatch(format!(
                "entries must all be ({d}, {r}) series"
            )));
        }
        Ok(MatrixJet { d, r, m, entries })
    }

    pub fn constant(d: usize, r: usize, a: &QMatrix) -> Self {
        assert!(a.is_square(), "matrix jets are square");
        let m = a.rows();
        let entries = (0..m * m)
            .map(|k| TruncatedSeries::constant(d, r, a[(k / m, k % m)].clone()))
            .collect();
        MatrixJet { d, r, m, entries }
    }

    pub fn identity(d: usize, r: usize, m: usize) -> Self {
        Self::constant(d, r, &QMatrix::identity(m))
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> &TruncatedSeries {
        &self.entries[i * self.m + j]
    }

    pub fn entries(&self) -> &[TruncatedSeries] {
        &self.entries
    }

    /// The matrix of coefficients of `t^p`.
    pub fn coefficient(&self, p: &[u32]) -> QMatrix {
        let mut a = QMatrix::zeros(self.m, self.m);
        for i in 0..self.m {
            for j in 0..self.m {
                a[(i, j)] = self.entry(i, j).coeff(p);
            }
        }
        a
    }

    pub fn constant_term(&self) -> QMatrix {
        self.coefficient(&vec![0; self.d])
    }

    fn check_shape(&self, other: &MatrixJet) -> Result<()> {
        if (self.d, self.r, self.m) != (other.d, other.r, other.m) {
            return Err(Error::DimensionMismatch(format!(
                "matrix jets of shape ({}, {}, {}) and ({}, {}, {})",
                self.d, self.r, self.m, other.d, other.r, other.m
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &MatrixJet) -> Result<MatrixJet> {
        self.check_shape(other)?;
        let m = self.m;
        let mut entries = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                let mut acc = TruncatedSeries::zero(self.d, self.r);
                for k in 0..m {
                    acc = &acc + &(self.entry(i, k) * other.entry(k, j));
                }
                entries.push(acc);
            }
        }
        Ok(MatrixJet { entries, ..*self })
    }

    pub fn add(&self, other: &MatrixJet) -> Result<MatrixJet> {
        self.check_shape(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(MatrixJet { entries, ..*self })
    }

    /// `self · g` for a constant matrix g.
    pub fn mul_const_right(&self, g: &QMatrix) -> Result<MatrixJet> {
        self.mul(&Self::constant(self.d, self.r, self.check_const(g)?))
    }

    /// `g · self` for a constant matrix g.
    pub fn mul_const_left(&self, g: &QMatrix) -> Result<MatrixJet> {
        Self::constant(self.d, self.r, self.check_const(g)?).mul(self)
    }

    fn check_const<'a>(&self, g: &'a QMatrix) -> Result<&'a QMatrix> {
        if g.rows() != self.m || g.cols() != self.m {
            return Err(Error::DimensionMismatch(format!(
                "{}×{} matrix against a {}×{} matrix jet",
                g.rows(),
                g.cols(),
                self.m,
                self.m
            )));
        }
        Ok(g)
    }

    /// Keeps terms of degree `<= r2`.
    pub fn truncate(&self, r2: usize) -> Result<MatrixJet> {
        let entries = self
            .entries
            .iter()
            .map(|s| s.truncate(r2))
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixJet {
            r: r2,
            entries,
            ..*self
        })
    }

    pub fn to_doc(&self) -> MatrixJetDoc {
        let b = basis(self.d, self.r);
        MatrixJetDoc {
            d: self.d,
            r: self.r,
            m: self.m,
            coeffs: b
                .exponents()
                .iter()
                .map(|p| MatrixCoeffDoc {
                    p: p.clone(),
                    values: self.coefficient(p).to_rows(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &MatrixJetDoc) -> Result<MatrixJet> {
        let b = basis(doc.d, doc.r);
        let m = doc.m;
        let mut table = vec![vec![Rational::zero(); b.len()]; m * m];
        let mut seen = vec![false; b.len()];
        for c in &doc.coeffs {
            let k = b.index_of(&c.p).ok_or_else(|| {
                Error::Parse(format!("multi-index {:?} outside a ({}, {}) jet", c.p, doc.d, doc.r))
            })?;
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::Parse(format!("multi-index {:?} listed twice", c.p)));
            }
            if c.values.len() != m || c.values.iter().any(|row| row.len() != m) {
                return Err(Error::Parse(format!("coefficient of {:?} is not {m}×{m}", c.p)));
            }
            for i in 0..m {
                for j in 0..m {
                    table[i * m + j][k] = c.values[i][j].clone();
                }
            }
        }
        let entries = table
            .into_iter()
            .map(|c| TruncatedSeries::from_coeffs(doc.d, doc.r, c))
            .collect::<Result<Vec<_>>>()?;
        MatrixJet::new(doc.d, doc.r, m, entries)
    }
}

/// Inverse in the truncated ring: with `J = J0 (I + N)`, `N` nilpotent,
/// `J^{-1} = (Σ_k (−N)^k) J0^{-1}`.
pub fn matrix_jet_inverse(j: &MatrixJet) -> Result<MatrixJet> {
    let j0_inv = j.constant_term().inverse()?;
    let (d, r, m) = (j.d, j.r, j.m);
    let n = MatrixJet::constant(d, r, &j0_inv).mul(j)?;
    let mut neg_nil = n;
    for i in 0..m {
        let e = &mut neg_nil.entries[i * m + i];
        let c = e.constant_term().clone();
        e.set_coeff(&vec![0; d], c - Rational::one());
    }
    neg_nil.entries.iter_mut().for_each(|e| *e = -&*e);
    let mut acc = MatrixJet::identity(d, r, m);
    let mut power = acc.clone();
    for _ in 0..r {
        power = power.mul(&neg_nil)?;
        acc = acc.add(&power)?;
    }
    acc.mul_const_right(&j0_inv)
}

/// `{ "d", "r", "m", "coeffs": [ { "p": [...], "values": [[...]] } ] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJetDoc {
    pub d: usize,
    pub r: usize,
    pub m: usize,
    pub coeffs: Vec<MatrixCoeffDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixCoeffDoc {
    pub p: Vec<u32>,
    #[serde(with = "rational::serde_rows")]
    pub values: Vec<Vec<Rational>>,
}
