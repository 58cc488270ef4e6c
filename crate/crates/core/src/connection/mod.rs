//! Filtered flat-connection data `(H, F, ∇)` on an affine chart.
//!
//! The connection is stored as coefficients `c[i][j][l]` with
//! `∇v^i = Σ_j (Σ_l c[i][j][l] dz_l) ⊗ v^j`. Writing `C_l` for the matrix
//! `(c[i][j][l])_{ij}`, curvature is `dC + C∧C`, i.e. for `l < l'`
//!
//! ```text
//! Ω_{l l'} = ∂_l C_{l'} − ∂_{l'} C_l + C_l C_{l'} − C_{l'} C_l.
//! ```

mod hyperelliptic;

use std::fmt;
use std::sync::OnceLock;

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gcd::gcd;
use crate::ideal::{normal_form, GroebnerBasis, Ideal};
use crate::poly::{ExactPoly, MonomialOrder, Vars};
use crate::ratfunc::ExactRatFunc;
use crate::rational::Rational;

pub use hyperelliptic::{hyperelliptic_data, hyperelliptic_data_with, GammaCorrection};

/// An affine chart: `Q[z]/relations` localized at the inverted elements.
#[derive(Clone)]
pub struct Chart {
    coords: Vars,
    relations: Ideal,
    inverted: Vec<ExactPoly>,
    relations_gb: OnceLock<GroebnerBasis>,
}

impl Chart {
    pub fn new(coords: &Vars, relations: Ideal, inverted: Vec<ExactPoly>) -> Result<Self> {
        if relations.vars() != coords {
            return Err(Error::mismatch(coords, relations.vars()));
        }
        if let Some(u) = inverted.iter().find(|u| u.vars() != coords) {
            return Err(Error::mismatch(coords, u.vars()));
        }
        let chart = Chart {
            coords: coords.clone(),
            relations,
            inverted,
            relations_gb: OnceLock::new(),
        };
        Ok(chart)
    }

    /// Affine space with nothing inverted.
    pub fn affine(coords: &Vars) -> Self {
        Chart::new(coords, Ideal::zero(coords), Vec::new()).expect("consistent variables")
    }

    pub fn coords(&self) -> &Vars {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn relations(&self) -> &Ideal {
        &self.relations
    }

    pub fn inverted(&self) -> &[ExactPoly] {
        &self.inverted
    }

    fn relations_gb(&self) -> &GroebnerBasis {
        self.relations_gb
            .get_or_init(|| self.relations.groebner(&MonomialOrder::grevlex()))
    }

    /// Normal form of a polynomial modulo the relations.
    pub fn reduce(&self, f: &ExactPoly) -> ExactPoly {
        if self.relations.is_zero_ideal() {
            return f.clone();
        }
        normal_form(f, self.relations_gb()).expect("chart variables")
    }

    /// Whether a chart function vanishes in the chart ring. Denominators are
    /// units there, so only the numerator matters.
    pub fn is_zero_function(&self, f: &ExactRatFunc) -> bool {
        self.reduce(f.num()).is_zero()
    }

    /// Whether `den` divides a power of the product of the inverted elements.
    pub fn is_unit_denominator(&self, den: &ExactPoly) -> bool {
        let mut rest = den.clone();
        loop {
            if rest.is_constant() {
                return true;
            }
            let before = rest.num_terms();
            let mut progressed = false;
            for u in &self.inverted {
                let g = gcd(&rest, u);
                if !g.is_constant() {
                    rest = rest.divide_exact(&g).expect("gcd divides");
                    progressed = true;
                }
            }
            if !progressed && rest.num_terms() == before {
                return false;
            }
        }
    }

    /// Checks that `point` lies on the chart: relations vanish, inverted
    /// elements do not.
    pub fn check_point(&self, point: &[Rational]) -> Result<()> {
        if point.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, chart has {}",
                point.len(),
                self.dim()
            )));
        }
        if let Some(r) = self
            .relations
            .generators()
            .iter()
            .find(|r| !r.eval(point).is_zero())
        {
            return Err(Error::PointNotOnChart(format!("relation {r} does not vanish")));
        }
        if let Some(u) = self.inverted.iter().find(|u| u.eval(point).is_zero()) {
            return Err(Error::PointNotOnChart(format!("inverted element {u} vanishes")));
        }
        Ok(())
    }
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
            && self.relations.generators() == other.relations.generators()
            && self.inverted == other.inverted
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("coords", &self.coords)
            .field("relations", &self.relations.generators())
            .field("inverted", &self.inverted)
            .finish()
    }
}

/// Rank-m bundle with filtration and connection over a chart.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicData {
    chart: Chart,
    rank: usize,
    filtration: Vec<usize>,
    connection: Vec<Vec<Vec<ExactRatFunc>>>,
}

impl AlgebraicData {
    /// Checks shapes and variables only; semantic invariants are reported by
    /// [`validate`].
    pub fn new(
        chart: Chart,
        rank: usize,
        filtration: Vec<usize>,
        connection: Vec<Vec<Vec<ExactRatFunc>>>,
    ) -> Result<Self> {
        let n = chart.dim();
        let shape_ok = connection.len() == rank
            && connection
                .iter()
                .all(|row| row.len() == rank && row.iter().all(|c| c.len() == n));
        if !shape_ok {
            return Err(Error::DimensionMismatch(format!(
                "connection must be {rank}×{rank}×{n}"
            )));
        }
        for c in connection.iter().flatten().flatten() {
            if c.vars() != chart.coords() {
                return Err(Error::mismatch(chart.coords(), c.vars()));
            }
        }
        Ok(AlgebraicData {
            chart,
            rank,
            filtration,
            connection,
        })
    }

    /// Data on affine n-space given by constant or polynomial coefficients
    /// with nothing inverted.
    pub fn on_affine(coords: &Vars, connection: Vec<Vec<Vec<ExactRatFunc>>>) -> Result<Self> {
        let rank = connection.len();
        let chart = Chart::affine(coords);
        AlgebraicData::new(chart, rank, vec![rank], connection)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn coords(&self) -> &Vars {
        self.chart.coords()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn filtration(&self) -> &[usize] {
        &self.filtration
    }

    pub fn connection(&self) -> &[Vec<Vec<ExactRatFunc>>] {
        &self.connection
    }

    pub fn coeff(&self, i: usize, j: usize, l: usize) -> &ExactRatFunc {
        &self.connection[i][j][l]
    }

    /// Checks that `point` is on the chart and every coefficient is defined
    /// there.
    pub fn check_base_point(&self, point: &[Rational]) -> Result<()> {
        self.chart.check_point(point)?;
        for c in self.connection.iter().flatten().flatten() {
            if c.den().eval(point).is_zero() {
                return Err(Error::DenominatorVanishes);
            }
        }
        Ok(())
    }

    /// The coefficients evaluated at a point: `out[l]` is the matrix `C_l`.
    pub fn eval_matrices(&self, point: &[Rational]) -> Result<Vec<crate::linalg::QMatrix>> {
        self.check_base_point(point)?;
        let m = self.rank;
        (0..self.dim())
            .map(|l| {
                let mut a = crate::linalg::QMatrix::zeros(m, m);
                for i in 0..m {
                    for j in 0..m {
                        a[(i, j)] = self.connection[i][j][l].eval(point)?;
                    }
                }
                Ok(a)
            })
            .collect()
    }
}

/// One stored coefficient of the curvature: `Ω[i][j]` on `dz_l ∧ dz_l2`, `l < l2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureEntry {
    pub i: usize,
    pub j: usize,
    pub l: usize,
    pub l2: usize,
    pub value: ExactRatFunc,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureMatrix {
    m: usize,
    n: usize,
    /// entries[i][j][pair_index(l, l2)]
    entries: Vec<Vec<Vec<ExactRatFunc>>>,
}

impl CurvatureMatrix {
    fn pair_index(n: usize, l: usize, l2: usize) -> usize {
        assert!(l < l2 && l2 < n);
        l * (2 * n - l - 1) / 2 + (l2 - l - 1)
    }

    pub fn rank(&self) -> usize {
        self.m
    }

    pub fn get(&self, i: usize, j: usize, l: usize, l2: usize) -> &ExactRatFunc {
        &self.entries[i][j][Self::pair_index(self.n, l, l2)]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().flatten().all(ExactRatFunc::is_zero)
    }

    pub fn nonzero_entries(&self) -> Vec<CurvatureEntry> {
        let mut out = Vec::new();
        for i in 0..self.m {
            for j in 0..self.m {
                for l in 0..self.n {
                    for l2 in l + 1..self.n {
                        let v = self.get(i, j, l, l2);
                        if !v.is_zero() {
                            out.push(CurvatureEntry {
                                i,
                                j,
                                l,
                                l2,
                                value: v.clone(),
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

pub fn curvature(data: &AlgebraicData) -> CurvatureMatrix {
    let m = data.rank();
    let n = data.dim();
    let c = data.connection();
    let zero = ExactRatFunc::zero(data.coords());
    let mut entries = vec![vec![Vec::with_capacity(n * n.saturating_sub(1) / 2); m]; m];
    for l in 0..n {
        for l2 in l + 1..n {
            for i in 0..m {
                for j in 0..m {
                    let mut acc = &c[i][j][l2].diff_at(l) - &c[i][j][l].diff_at(l2);
                    for k in 0..m {
                        let a = &c[i][k][l] * &c[k][j][l2];
                        let b = &c[i][k][l2] * &c[k][j][l];
                        if a != b {
                            acc = &acc + &(&a - &b);
                        }
                    }
                    let reduced = if data.chart().is_zero_function(&acc) {
                        zero.clone()
                    } else {
                        acc
                    };
                    entries[i][j].push(reduced);
                }
            }
        }
    }
    CurvatureMatrix { m, n, entries }
}

pub fn is_flat(data: &AlgebraicData) -> bool {
    curvature(data).is_zero()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DenominatorNotUnit { i: usize, j: usize, l: usize, den: String },
    FiltrationNotIncreasing(Vec<usize>),
    FiltrationEnd { last: Option<usize>, rank: usize },
    InvertedIsZero(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DenominatorNotUnit { i, j, l, den } => write!(
                f,
                "denominator not a unit: c[{i}][{j}][{l}] has denominator {den}"
            ),
            Violation::FiltrationNotIncreasing(r) => {
                write!(f, "filtration ranks {r:?} not weakly increasing")
            }
            Violation::FiltrationEnd { last, rank } => match last {
                Some(k) => write!(f, "filtration ends at {k}, not at rank {rank}"),
                None => write!(f, "filtration is empty, must end at rank {rank}"),
            },
            Violation::InvertedIsZero(u) => {
                write!(f, "inverted element {u} is zero modulo the relations")
            }
        }
    }
}

/// Reports every violated invariant of `data`; empty means valid.
pub fn validate(data: &AlgebraicData) -> Vec<Violation> {
    let mut out = Vec::new();
    let chart = data.chart();
    for u in chart.inverted() {
        if chart.reduce(u).is_zero() {
            out.push(Violation::InvertedIsZero(u.to_string()));
        }
    }
    let ranks = data.filtration();
    if ranks.windows(2).any(|w| w[0] > w[1]) {
        out.push(Violation::FiltrationNotIncreasing(ranks.to_vec()));
    }
    if ranks.last() != Some(&data.rank()) {
        out.push(Violation::FiltrationEnd {
            last: ranks.last().copied(),
            rank: data.rank(),
        });
    }
    let mut checked: Vec<&ExactPoly> = Vec::new();
    for (i, row) in data.connection().iter().enumerate() {
        for (j, cs) in row.iter().enumerate() {
            for (l, c) in cs.iter().enumerate() {
                let den = c.den();
                if checked.contains(&den) {
                    continue;
                }
                if chart.is_unit_denominator(den) {
                    checked.push(den);
                } else {
                    out.push(Violation::DenominatorNotUnit {
                        i,
                        j,
                        l,
                        den: den.to_string(),
                    });
                }
            }
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct ChartDoc {
    coords: Vec<String>,
    relations: Ideal,
    inverted: Vec<ExactPoly>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraicDataDoc {
    chart: ChartDoc,
    rank: usize,
    filtration: Vec<usize>,
    connection: Vec<Vec<Vec<ExactRatFunc>>>,
}

fn onto(vars: &Vars, p: ExactPoly) -> Result<ExactPoly> {
    if p.vars() == vars {
        Ok(p)
    } else {
        p.embed(vars)
    }
}

impl Serialize for Chart {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ChartDoc {
            coords: self.coords.to_vec(),
            relations: self.relations.clone(),
            inverted: self.inverted.clone(),
        }
        .serialize(s)
    }
}

impl ChartDoc {
    fn into_chart(self) -> Result<Chart> {
        let coords: Vars = self.coords.into();
        let relations = self.relations.embed(&coords)?;
        let inverted = self
            .inverted
            .into_iter()
            .map(|u| onto(&coords, u))
            .collect::<Result<Vec<_>>>()?;
        Chart::new(&coords, relations, inverted)
    }
}

impl<'de> Deserialize<'de> for Chart {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        ChartDoc::deserialize(d)?
            .into_chart()
            .map_err(serde::de::Error::custom)
    }
}

impl Serialize for AlgebraicData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        AlgebraicDataDoc {
            chart: ChartDoc {
                coords: self.chart.coords.to_vec(),
                relations: self.chart.relations.clone(),
                inverted: self.chart.inverted.clone(),
            },
            rank: self.rank,
            filtration: self.filtration.clone(),
            connection: self.connection.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlgebraicData {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = AlgebraicDataDoc::deserialize(d)?;
        let build = || -> Result<AlgebraicData> {
            let chart = doc.chart.into_chart()?;
            let coords = chart.coords().clone();
            let connection = doc
                .connection
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|cs| {
                            cs.into_iter()
                                .map(|c| {
                                    if c.vars() == &coords {
                                        Ok(c)
                                    } else {
                                        c.embed(&coords)
                                    }
                                })
                                .collect::<Result<Vec<_>>>()
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            AlgebraicData::new(chart, doc.rank, doc.filtration, connection)
        };
        build().map_err(serde::de::Error::custom)
    }
}
