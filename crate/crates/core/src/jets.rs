//! Jets: order-r, d-parameter truncated maps into a chart.
//!
//! A jet into an n-dimensional chart is a list of n truncated series in
//! `t1..td`. The coefficient of `t^p` in component i is `a_{p,i}`; the
//! constant terms form the base point.

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::connection::Chart;
use crate::error::{Error, Result};
use crate::linalg::QMatrix;
use crate::poly::ExactPoly;
use crate::ratfunc::ExactRatFunc;
use crate::rational::{self, Rational};
use crate::series::{basis, compose_poly_series, TruncatedSeries};

#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    d: usize,
    r: usize,
    chart: Chart,
    components: Vec<TruncatedSeries>,
}

impl Jet {
    /// Builds a jet and checks that it lies on the chart: every relation
    /// composes to zero and every inverted element has nonzero constant term.
    pub fn new(chart: &Chart, d: usize, r: usize, components: Vec<TruncatedSeries>) -> Result<Self> {
        if components.len() != chart.dim() {
            return Err(Error::DimensionMismatch(format!(
                "jet has {} components, chart has dimension {}",
                components.len(),
                chart.dim()
            )));
        }
        if let Some(s) = components.iter().find(|s| s.d() != d || s.r() != r) {
            return Err(Error::DimensionMismatch(format!(
                "component of shape ({}, {}) in a ({d}, {r}) jet",
                s.d(),
                s.r()
            )));
        }
        for rel in chart.relations().generators() {
            if !compose_poly_series(rel, &components, d, r).is_zero() {
                return Err(Error::PointNotOnVariety(format!(
                    "relation {rel} does not vanish on the jet"
                )));
            }
        }
        for u in chart.inverted() {
            if compose_poly_series(u, &components, d, r).constant_term().is_zero() {
                return Err(Error::PointNotOnChart(format!(
                    "inverted element {u} vanishes at the base point"
                )));
            }
        }
        Ok(Jet {
            d,
            r,
            chart: chart.clone(),
            components,
        })
    }

    /// The constant jet at `point`.
    pub fn constant(chart: &Chart, point: &[Rational], d: usize, r: usize) -> Result<Self> {
        chart.check_point(point)?;
        let components = point
            .iter()
            .map(|c| TruncatedSeries::constant(d, r, c.clone()))
            .collect();
        Jet::new(chart, d, r, components)
    }

    /// The affine line jet `t ↦ s + t·direction` (d = 1).
    pub fn line(chart: &Chart, base: &[Rational], direction: &[Rational], r: usize) -> Result<Self> {
        if base.len() != direction.len() {
            return Err(Error::DimensionMismatch("base and direction differ in length".into()));
        }
        let t = TruncatedSeries::variable(1, r, 0);
        let components = base
            .iter()
            .zip(direction)
            .map(|(s, v)| &TruncatedSeries::constant(1, r, s.clone()) + &t.scale(v))
            .collect();
        Jet::new(chart, 1, r, components)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn components(&self) -> &[TruncatedSeries] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &TruncatedSeries {
        &self.components[i]
    }

    pub fn base_point(&self) -> Vec<Rational> {
        self.components
            .iter()
            .map(|s| s.constant_term().clone())
            .collect()
    }

    /// Coefficient `a_{p,i}`.
    pub fn coeff(&self, p: &[u32], i: usize) -> Rational {
        self.components[i].coeff(p)
    }

    /// Keeps the coefficients of degree `<= r2`.
    pub fn project(&self, r2: usize) -> Result<Jet> {
        if r2 > self.r {
            return Err(Error::OrderTooLarge {
                requested: r2,
                available: self.r,
            });
        }
        let components = self
            .components
            .iter()
            .map(|s| s.truncate(r2))
            .collect::<Result<Vec<_>>>()?;
        Ok(Jet {
            d: self.d,
            r: r2,
            chart: self.chart.clone(),
            components,
        })
    }

    /// Whether the first-order part, a d×n matrix, has rank d.
    pub fn is_nondegenerate(&self) -> bool {
        if self.r == 0 {
            return self.d == 0;
        }
        let mut lin = QMatrix::zeros(self.d, self.components.len());
        for l in 0..self.d {
            for (i, s) in self.components.iter().enumerate() {
                lin[(l, i)] = s.coeffs()[1 + l].clone();
            }
        }
        lin.rank() == self.d
    }

    pub fn to_doc(&self) -> JetDoc {
        let b = basis(self.d, self.r);
        JetDoc {
            d: self.d,
            r: self.r,
            coords: self.components.len(),
            coeffs: b
                .exponents()
                .iter()
                .enumerate()
                .map(|(k, p)| JetCoeffDoc {
                    p: p.clone(),
                    values: self.components.iter().map(|s| s.coeffs()[k].clone()).collect(),
                })
                .collect(),
        }
    }

    pub fn from_doc(doc: &JetDoc, chart: &Chart) -> Result<Jet> {
        if doc.coords != chart.dim() {
            return Err(Error::DimensionMismatch(format!(
                "jet has {} coordinates, chart has {}",
                doc.coords,
                chart.dim()
            )));
        }
        let b = basis(doc.d, doc.r);
        let mut table = vec![vec![Rational::zero(); b.len()]; doc.coords];
        let mut seen = vec![false; b.len()];
        for entry in &doc.coeffs {
            let k = b.index_of(&entry.p).ok_or_else(|| {
                Error::Parse(format!("multi-index {:?} outside a ({}, {}) jet", entry.p, doc.d, doc.r))
            })?;
            if std::mem::replace(&mut seen[k], true) {
                return Err(Error::Parse(format!("multi-index {:?} listed twice", entry.p)));
            }
            if entry.values.len() != doc.coords {
                return Err(Error::Parse(format!(
                    "multi-index {:?} has {} values, expected {}",
                    entry.p,
                    entry.values.len(),
                    doc.coords
                )));
            }
            for (i, v) in entry.values.iter().enumerate() {
                table[i][k] = v.clone();
            }
        }
        let components = table
            .into_iter()
            .map(|c| TruncatedSeries::from_coeffs(doc.d, doc.r, c))
            .collect::<Result<Vec<_>>>()?;
        Jet::new(chart, doc.d, doc.r, components)
    }
}

/// `{ "d", "r", "coords", "coeffs": [ { "p": [...], "values": [...] } ] }`,
/// coefficients in graded-lex order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetDoc {
    pub d: usize,
    pub r: usize,
    pub coords: usize,
    pub coeffs: Vec<JetCoeffDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetCoeffDoc {
    pub p: Vec<u32>,
    #[serde(with = "rational::serde_vec")]
    pub values: Vec<Rational>,
}

fn check_vars(f: &ExactPoly, sigma: &Jet) -> Result<()> {
    if f.vars() != sigma.chart.coords() {
        return Err(Error::mismatch(sigma.chart.coords(), f.vars()));
    }
    Ok(())
}

/// The truncated series of `f ∘ σ`.
pub fn compose_poly(f: &ExactPoly, sigma: &Jet) -> Result<TruncatedSeries> {
    check_vars(f, sigma)?;
    Ok(compose_poly_series(f, &sigma.components, sigma.d, sigma.r))
}

/// The truncated series of `f ∘ σ`; the denominator must not vanish at the
/// base point.
pub fn compose_ratfunc(f: &ExactRatFunc, sigma: &Jet) -> Result<TruncatedSeries> {
    let num = compose_poly(f.num(), sigma)?;
    if f.den().is_one() {
        return Ok(num);
    }
    let den = compose_poly(f.den(), sigma)?;
    Ok(&num * &den.inverse()?)
}

/// A morphism between charts given by rational component functions.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalMap {
    source: Chart,
    target: Chart,
    components: Vec<ExactRatFunc>,
}

impl RationalMap {
    pub fn new(source: &Chart, target: &Chart, components: Vec<ExactRatFunc>) -> Result<Self> {
        if components.len() != target.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} components for a target of dimension {}",
                components.len(),
                target.dim()
            )));
        }
        if let Some(c) = components.iter().find(|c| c.vars() != source.coords()) {
            return Err(Error::mismatch(source.coords(), c.vars()));
        }
        Ok(RationalMap {
            source: source.clone(),
            target: target.clone(),
            components,
        })
    }

    pub fn identity(chart: &Chart) -> Self {
        let components = (0..chart.dim())
            .map(|i| ExactRatFunc::from_poly(ExactPoly::var_at(chart.coords(), i)))
            .collect();
        RationalMap::new(chart, chart, components).expect("identity is well-formed")
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn components(&self) -> &[ExactRatFunc] {
        &self.components
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &RationalMap) -> Result<RationalMap> {
        if inner.target.coords() != self.source.coords() {
            return Err(Error::mismatch(self.source.coords(), inner.target.coords()));
        }
        let components = self
            .components
            .iter()
            .map(|c| c.substitute(&inner.components))
            .collect::<Result<Vec<_>>>()?;
        RationalMap::new(&inner.source, &self.target, components)
    }

    /// The induced map on jets, `σ ↦ g ∘ σ`.
    pub fn prolong(&self, sigma: &Jet) -> Result<Jet> {
        if sigma.chart.coords() != self.source.coords() {
            return Err(Error::mismatch(self.source.coords(), sigma.chart.coords()));
        }
        let components = self
            .components
            .iter()
            .map(|c| compose_ratfunc(c, sigma))
            .collect::<Result<Vec<_>>>()?;
        Jet::new(&self.target, sigma.d, sigma.r, components)
    }
}

/// `J^d_r g` as a function on jets with fixed `(d, r)`.
pub struct Prolongation<'a> {
    map: &'a RationalMap,
    d: usize,
    r: usize,
}

pub fn prolong(map: &RationalMap, d: usize, r: usize) -> Prolongation<'_> {
    Prolongation { map, d, r }
}

impl Prolongation<'_> {
    pub fn apply(&self, sigma: &Jet) -> Result<Jet> {
        if sigma.d != self.d || sigma.r != self.r {
            return Err(Error::DimensionMismatch(format!(
                "expected a ({}, {}) jet, got ({}, {})",
                self.d, self.r, sigma.d, sigma.r
            )));
        }
        self.map.prolong(sigma)
    }
}
