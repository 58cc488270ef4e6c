//! Sparse multivariate polynomials over Q.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors, so the key order is
//! lexicographic and two polynomials are equal exactly when their term maps
//! are. Monomial orders only matter for leading terms and are passed in
//! explicitly where needed.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::Arc;

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Ordered list of variable names shared by a family of polynomials.
pub type Vars = Arc<[String]>;

pub fn vars<I, S>(names: I) -> Vars
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    names.into_iter().map(Into::into).collect::<Vec<_>>().into()
}

pub type Exponent = Vec<u32>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaseOrder {
    Lex,
    Grevlex,
}

/// A monomial order: `base` applied block by block. With no blocks the
/// base order runs over all variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    pub base: BaseOrder,
    pub blocks: Vec<Vec<usize>>,
}

impl MonomialOrder {
    pub fn lex() -> Self {
        MonomialOrder {
            base: BaseOrder::Lex,
            blocks: Vec::new(),
        }
    }

    pub fn grevlex() -> Self {
        MonomialOrder {
            base: BaseOrder::Grevlex,
            blocks: Vec::new(),
        }
    }

    /// Elimination order: every variable in an earlier block dominates every
    /// variable in a later block.
    pub fn block(base: BaseOrder, blocks: Vec<Vec<usize>>) -> Self {
        MonomialOrder { base, blocks }
    }

    pub fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        if self.blocks.is_empty() {
            let all: Vec<usize> = (0..a.len()).collect();
            return cmp_on(self.base, a, b, &all);
        }
        for block in &self.blocks {
            let o = cmp_on(self.base, a, b, block);
            if o != Ordering::Equal {
                return o;
            }
        }
        Ordering::Equal
    }
}

impl Default for MonomialOrder {
    fn default() -> Self {
        MonomialOrder::grevlex()
    }
}

fn cmp_on(base: BaseOrder, a: &[u32], b: &[u32], idx: &[usize]) -> Ordering {
    match base {
        BaseOrder::Lex => {
            for &i in idx {
                match a[i].cmp(&b[i]) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        }
        BaseOrder::Grevlex => {
            let da: u32 = idx.iter().map(|&i| a[i]).sum();
            let db: u32 = idx.iter().map(|&i| b[i]).sum();
            if da != db {
                return da.cmp(&db);
            }
            for &i in idx.iter().rev() {
                match a[i].cmp(&b[i]) {
                    Ordering::Equal => continue,
                    o => return o.reverse(),
                }
            }
            Ordering::Equal
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactPoly {
    vars: Vars,
    terms: BTreeMap<Exponent, Rational>,
}

impl ExactPoly {
    pub fn zero(vars: &Vars) -> Self {
        ExactPoly {
            vars: vars.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, Rational::one())
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        Self::monomial(vars, vec![0; vars.len()], c)
    }

    pub fn monomial(vars: &Vars, exp: Exponent, c: Rational) -> Self {
        debug_assert_eq!(exp.len(), vars.len());
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        ExactPoly {
            vars: vars.clone(),
            terms,
        }
    }

    /// The i-th variable as a polynomial.
    pub fn var_at(vars: &Vars, i: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[i] = 1;
        Self::monomial(vars, e, Rational::one())
    }

    pub fn var(vars: &Vars, name: &str) -> Result<Self> {
        let i = index_of(vars, name)?;
        Ok(Self::var_at(vars, i))
    }

    /// Builds a polynomial from possibly repeated terms; like terms are summed
    /// and zeros dropped.
    pub fn from_terms<I>(vars: &Vars, terms: I) -> Self
    where
        I: IntoIterator<Item = (Exponent, Rational)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent length mismatch");
            p.add_term(e, c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Exponent, Rational)> {
        self.terms.into_iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn is_one(&self) -> bool {
        self.is_constant() && self.constant_term().is_one()
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&vec![0; self.nvars()])
    }

    pub fn coeff(&self, exp: &[u32]) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    /// Indices of variables that actually occur.
    pub fn support(&self) -> Vec<usize> {
        (0..self.nvars())
            .filter(|&i| self.terms.keys().any(|e| e[i] > 0))
            .collect()
    }

    pub(crate) fn add_term(&mut self, exp: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars {
            Ok(())
        } else {
            Err(Error::mismatch(&self.vars, &other.vars))
        }
    }

    /// Checked ring operation; fails when the variable lists differ.
    pub fn arith(a: &Self, b: &Self, op: ArithOp) -> Result<Self> {
        a.check_vars(b)?;
        Ok(match op {
            ArithOp::Add => a + b,
            ArithOp::Sub => a - b,
            ArithOp::Mul => a * b,
        })
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        ExactPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, a)| (e.clone(), a * c)).collect(),
        }
    }

    pub fn mul_term(&self, exp: &[u32], c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.vars);
        }
        ExactPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, a)| (add_exp(e, exp), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.vars);
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative with respect to the i-th variable.
    pub fn diff_at(&self, i: usize) -> Self {
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.terms.insert(e2, c * Rational::from_integer(e[i].into()));
        }
        out
    }

    pub fn diff(&self, var: &str) -> Result<Self> {
        Ok(self.diff_at(index_of(&self.vars, var)?))
    }

    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Exponent, &Rational)> {
        self.terms.iter().max_by(|a, b| order.cmp(a.0, b.0))
    }

    /// Scales so the leading coefficient under `order` is 1.
    pub fn monic(&self, order: &MonomialOrder) -> Self {
        match self.leading_term(order) {
            Some((_, c)) if !c.is_one() => self.scale(&c.recip()),
            _ => self.clone(),
        }
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars(), "point has wrong dimension");
        self.evaluate(point, |c| c.clone())
    }

    /// Evaluates at values in any commutative ring `T`; `lift` embeds the
    /// rational coefficients into `T`.
    pub fn evaluate<T, F>(&self, values: &[T], lift: F) -> T
    where
        T: Clone,
        for<'a> &'a T: Add<&'a T, Output = T> + Mul<&'a T, Output = T>,
        F: Fn(&Rational) -> T,
    {
        assert_eq!(values.len(), self.nvars(), "wrong number of values");
        let mut powers: Vec<Vec<T>> = values.iter().map(|v| vec![v.clone()]).collect();
        let mut acc = lift(&Rational::zero());
        for (e, c) in &self.terms {
            let mut t = lift(c);
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let k = k as usize;
                while powers[i].len() < k {
                    let next = &powers[i][powers[i].len() - 1] * &values[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][k - 1];
            }
            acc = &acc + &t;
        }
        acc
    }

    /// Substitutes polynomials (over a common variable list) for the variables.
    pub fn substitute(&self, values: &[ExactPoly]) -> Result<ExactPoly> {
        let target = match values.first() {
            Some(v) => v.vars.clone(),
            None => return Ok(self.clone()),
        };
        for v in values {
            if v.vars != target {
                return Err(Error::mismatch(&target, &v.vars));
            }
        }
        if values.len() != self.nvars() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} variables",
                values.len(),
                self.nvars()
            )));
        }
        Ok(self.evaluate(values, |c| ExactPoly::constant(&target, c.clone())))
    }

    /// Coefficients with respect to the i-th variable, lowest degree first.
    /// Each coefficient keeps the full variable list with exponent 0 in slot i.
    pub fn coefficients_in(&self, i: usize) -> Vec<ExactPoly> {
        let deg = self.degree_in(i) as usize;
        let mut out = vec![Self::zero(&self.vars); deg + 1];
        for (e, c) in &self.terms {
            let k = e[i] as usize;
            let mut e2 = e.clone();
            e2[i] = 0;
            out[k].terms.insert(e2, c.clone());
        }
        if self.is_zero() {
            out.clear();
        }
        out
    }

    pub fn from_coefficients_in(vars: &Vars, i: usize, coeffs: &[ExactPoly]) -> Self {
        let mut out = Self::zero(vars);
        for (k, c) in coeffs.iter().enumerate() {
            for (e, a) in &c.terms {
                let mut e2 = e.clone();
                e2[i] += k as u32;
                out.add_term(e2, a.clone());
            }
        }
        out
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a
    /// remainder.
    pub fn divide_exact(&self, divisor: &ExactPoly) -> Option<ExactPoly> {
        assert!(!divisor.is_zero(), "division by zero polynomial");
        if divisor.is_constant() {
            return Some(self.scale(&divisor.constant_term().recip()));
        }
        // The lexicographically largest term is the last map entry, and lex
        // leading terms are multiplicative, so this is ordinary division.
        let (lt_e, lt_c) = divisor.terms.iter().next_back().unwrap();
        let lt_e = lt_e.clone();
        let lt_c_inv = lt_c.recip();
        let mut rem = self.clone();
        let mut quot = Self::zero(&self.vars);
        while let Some((e, c)) = rem.terms.iter().next_back() {
            if !divides_exp(&lt_e, e) {
                return None;
            }
            let qe = sub_exp(e, &lt_e);
            let qc = c * &lt_c_inv;
            for (de, dc) in &divisor.terms {
                rem.add_term(add_exp(de, &qe), -(dc * &qc));
            }
            quot.terms.insert(qe, qc);
        }
        Some(quot)
    }

    /// Re-expresses the polynomial over `target`, matching variables by name.
    pub fn embed(&self, target: &Vars) -> Result<ExactPoly> {
        let map = self
            .vars
            .iter()
            .map(|v| index_of(target, v))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.len()];
            for (i, &k) in e.iter().enumerate() {
                e2[map[i]] += k;
            }
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Drops variables that are absent from `target`; fails if one of them
    /// actually occurs.
    pub fn restrict(&self, target: &Vars) -> Result<ExactPoly> {
        let mut map = Vec::with_capacity(self.nvars());
        for (i, v) in self.vars.iter().enumerate() {
            match target.iter().position(|t| t == v) {
                Some(j) => map.push(Some(j)),
                None => {
                    if self.degree_in(i) > 0 {
                        return Err(Error::UnknownVariable(v.clone()));
                    }
                    map.push(None);
                }
            }
        }
        let mut out = Self::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.len()];
            for (i, &k) in e.iter().enumerate() {
                if let Some(j) = map[i] {
                    e2[j] += k;
                }
            }
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    pub fn parse(vars: &Vars, text: &str) -> Result<ExactPoly> {
        crate::parse::parse_poly(vars, text)
    }
}

pub fn index_of(vars: &[String], name: &str) -> Result<usize> {
    vars.iter()
        .position(|v| v == name)
        .ok_or_else(|| Error::UnknownVariable(name.to_string()))
}

pub(crate) fn add_exp(a: &[u32], b: &[u32]) -> Exponent {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub(crate) fn sub_exp(a: &[u32], b: &[u32]) -> Exponent {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub(crate) fn divides_exp(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

pub(crate) fn lcm_exp(a: &[u32], b: &[u32]) -> Exponent {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

impl<'a> Add<&'a ExactPoly> for &'a ExactPoly {
    type Output = ExactPoly;
    fn add(self, rhs: &'a ExactPoly) -> ExactPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a ExactPoly> for &'a ExactPoly {
    type Output = ExactPoly;
    fn sub(self, rhs: &'a ExactPoly) -> ExactPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&ExactPoly> for ExactPoly {
    fn add_assign(&mut self, rhs: &ExactPoly) {
        self.check_vars(rhs).expect("polynomial variable mismatch");
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), c.clone());
        }
    }
}

impl SubAssign<&ExactPoly> for ExactPoly {
    fn sub_assign(&mut self, rhs: &ExactPoly) {
        self.check_vars(rhs).expect("polynomial variable mismatch");
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), -c.clone());
        }
    }
}

impl<'a> Mul<&'a ExactPoly> for &'a ExactPoly {
    type Output = ExactPoly;
    fn mul(self, rhs: &'a ExactPoly) -> ExactPoly {
        self.check_vars(rhs).expect("polynomial variable mismatch");
        let mut out = ExactPoly::zero(&self.vars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(add_exp(ea, eb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &ExactPoly {
    type Output = ExactPoly;
    fn neg(self) -> ExactPoly {
        ExactPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Neg for ExactPoly {
    type Output = ExactPoly;
    fn neg(self) -> ExactPoly {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<ExactPoly> for ExactPoly {
            type Output = ExactPoly;
            fn $m(self, rhs: ExactPoly) -> ExactPoly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&ExactPoly> for ExactPoly {
            type Output = ExactPoly;
            fn $m(self, rhs: &ExactPoly) -> ExactPoly {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let order = MonomialOrder::grevlex();
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|a, b| order.cmp(b.0, a.0));
        for (k, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x > 0)
                .map(|(i, &x)| {
                    if x == 1 {
                        self.vars[i].clone()
                    } else {
                        format!("{}^{}", self.vars[i], x)
                    }
                })
                .collect();
            let coeff = if abs.is_integer() {
                abs.numer().to_string()
            } else {
                format!("{}/{}", abs.numer(), abs.denom())
            };
            if factors.is_empty() {
                write!(f, "{coeff}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", coeff, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for ExactPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactPoly({self} in {:?})", &*self.vars)
    }
}

/// Serialized form: `{ "vars": [...], "terms": [ { "exp": [...], "coeff": "p/q" } ] }`.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct PolyDoc {
    pub vars: Vec<String>,
    pub terms: Vec<TermDoc>,
}

#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct TermDoc {
    pub exp: Vec<u32>,
    #[serde(with = "rational::serde_str")]
    pub coeff: Rational,
}

impl From<&ExactPoly> for PolyDoc {
    fn from(p: &ExactPoly) -> Self {
        PolyDoc {
            vars: p.vars.to_vec(),
            terms: p
                .terms
                .iter()
                .map(|(e, c)| TermDoc {
                    exp: e.clone(),
                    coeff: c.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<PolyDoc> for ExactPoly {
    type Error = Error;
    fn try_from(doc: PolyDoc) -> Result<Self> {
        let vars: Vars = doc.vars.into();
        let mut p = ExactPoly::zero(&vars);
        for t in doc.terms {
            if t.exp.len() != vars.len() {
                return Err(Error::Parse(format!(
                    "exponent {:?} does not match {} variables",
                    t.exp,
                    vars.len()
                )));
            }
            p.add_term(t.exp, t.coeff);
        }
        Ok(p)
    }
}

impl serde::Serialize for ExactPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolyDoc::from(self).serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for ExactPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = PolyDoc::deserialize(d)?;
        ExactPoly::try_from(doc).map_err(serde::de::Error::custom)
    }
}
