//! Germ transport: the truncated ring map from germs at a matrix `M` to
//! germs at a base point `s`, induced by the flat frame with `f(s) = M`.

use std::collections::HashMap;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::connection::AlgebraicData;
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::poly::{vars, Exponent, ExactPoly, Vars};
use crate::rational::Rational;
use crate::series::{basis, compose_poly_series, TruncatedSeries};

use super::XiTable;

/// Matrix coordinates `a_1_1, a_1_2, …, a_m_m`, row-major.
pub fn matrix_vars(m: usize) -> Vars {
    vars((1..=m).flat_map(|j| (1..=m).map(move |k| format!("a_{j}_{k}"))))
}

/// Columns are indexed by monomials in `a − M` (m² variables), rows by
/// monomials in `z − s`; both bases graded-lex up to degree r.
#[derive(Clone, Debug, PartialEq)]
pub struct GermMatrix {
    m: usize,
    n: usize,
    r: usize,
    matrix: QMatrix,
}

impl GermMatrix {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn matrix(&self) -> &QMatrix {
        &self.matrix
    }

    pub fn source_basis(&self) -> Vec<Exponent> {
        basis(self.m * self.m, self.r).exponents().to_vec()
    }

    pub fn target_basis(&self) -> Vec<Exponent> {
        basis(self.n, self.r).exponents().to_vec()
    }

    /// The image of the source monomial with exponent `e`.
    pub fn column(&self, e: &[u32]) -> Option<TruncatedSeries> {
        let k = basis(self.m * self.m, self.r).index_of(e)?;
        let coeffs = (0..self.matrix.rows()).map(|i| self.matrix[(i, k)].clone()).collect();
        TruncatedSeries::from_coeffs(self.n, self.r, coeffs).ok()
    }

    /// Image of a germ given by its source-basis coefficients.
    pub fn apply(&self, germ: &TruncatedSeries) -> Result<TruncatedSeries> {
        if germ.d() != self.m * self.m || germ.r() != self.r {
            return Err(Error::DimensionMismatch(format!(
                "germ is ({}, {}), transport expects ({}, {})",
                germ.d(),
                germ.r(),
                self.m * self.m,
                self.r
            )));
        }
        TruncatedSeries::from_coeffs(self.n, self.r, self.matrix.mul_vec(germ.coeffs()))
    }

    pub fn to_doc(&self) -> GermMatrixDoc {
        GermMatrixDoc {
            source_basis: self.source_basis(),
            target_basis: self.target_basis(),
            matrix: self.matrix.to_rows(),
        }
    }

    pub fn from_doc(doc: &GermMatrixDoc) -> Result<GermMatrix> {
        let bad = |what: &str| Error::Parse(format!("germ matrix: {what}"));
        let mm = doc.source_basis.first().map(Vec::len).ok_or_else(|| bad("empty source basis"))?;
        let n = doc.target_basis.first().map(Vec::len).ok_or_else(|| bad("empty target basis"))?;
        let m = (1..=mm).find(|m| m * m == mm).ok_or_else(|| bad("source arity is not a square"))?;
        let r = doc.target_basis.iter().map(|e| e.iter().sum::<u32>()).max().unwrap_or(0) as usize;
        if basis(mm, r).exponents() != doc.source_basis.as_slice() || basis(n, r).exponents() != doc.target_basis.as_slice() {
            return Err(bad("bases are not graded-lex up to a common degree"));
        }
        let matrix = QMatrix::from_rows(doc.matrix.clone())?;
        if matrix.rows() != doc.target_basis.len() || matrix.cols() != doc.source_basis.len() {
            return Err(bad("matrix shape does not match the bases"));
        }
        Ok(GermMatrix { m, n, r, matrix })
    }
}

/// `{ "source_basis": [...], "target_basis": [...], "matrix": [[...]] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GermMatrixDoc {
    pub source_basis: Vec<Exponent>,
    pub target_basis: Vec<Exponent>,
    #[serde(with = "crate::rational::serde_rows")]
    pub matrix: Vec<Vec<Rational>>,
}

/// The transport matrix of order r at `(s, M)`.
pub fn tau_germ(data: &AlgebraicData, s: &[Rational], m0: &QMatrix, r: usize) -> Result<GermMatrix> {
    let m = data.rank();
    let n = data.dim();
    data.chart().check_point(s)?;
    let shifted: Vec<TruncatedSeries> = XiTable::sorted(data, r)
        .taylor(data, s, m0, r)?
        .iter()
        .map(TruncatedSeries::without_constant)
        .collect();
    let source = basis(m * m, r);
    let target = basis(n, r);
    let mut images: HashMap<&[u32], TruncatedSeries> = HashMap::new();
    let mut matrix = QMatrix::zeros(target.len(), source.len());
    for (k, e) in source.exponents().iter().enumerate() {
        let image = match e.iter().rposition(|&x| x > 0) {
            None => TruncatedSeries::constant(n, r, Rational::one()),
            Some(v) => {
                let mut parent = e.clone();
                parent[v] -= 1;
                &images[parent.as_slice()] * &shifted[v]
            }
        };
        for (i, c) in image.coeffs().iter().enumerate() {
            if !c.is_zero() {
                matrix[(i, k)] = c.clone();
            }
        }
        images.insert(e, image);
    }
    Ok(GermMatrix { m, n, r, matrix })
}

/// Expansion of `h` at `M` in powers of `a − M`, truncated at degree r.
pub fn expand_at_matrix(h: &ExactPoly, m0: &QMatrix, r: usize) -> Result<TruncatedSeries> {
    let m = m0.rows();
    let h = h.embed(&matrix_vars(m))?;
    let values: Vec<TruncatedSeries> = (0..m * m)
        .map(|v| &TruncatedSeries::constant(m * m, r, m0[(v / m, v % m)].clone()) + &TruncatedSeries::variable(m * m, r, v))
        .collect();
    Ok(compose_poly_series(&h, &values, m * m, r))
}

/// Coordinates of the transported germ of `h`, in the graded-lex basis at s.
pub fn pullback_function_germ(
    h: &ExactPoly,
    data: &AlgebraicData,
    s: &[Rational],
    m0: &QMatrix,
    r: usize,
) -> Result<Vec<Rational>> {
    let tau = tau_germ(data, s, m0, r)?;
    let germ = expand_at_matrix(h, m0, r)?;
    Ok(tau.apply(&germ)?.coeffs().to_vec())
}
