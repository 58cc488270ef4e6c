//! Truncated multivariate power series, i.e. elements of
//! `Q[t1..td] / (t1..td)^(r+1)`, stored densely.
//!
//! Multi-indices are enumerated in graded-lex order: by total degree, and
//! within a degree by decreasing lexicographic exponent vector. For `d = 2,
//! r = 2` that is `1, t1, t2, t1^2, t1 t2, t2^2`. Every serialized table in
//! the crate uses this order.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{ExactPoly, Exponent};
use crate::rational::Rational;

pub struct MonomialBasis {
    nvars: usize,
    order: usize,
    exps: Vec<Exponent>,
    index: HashMap<Exponent, usize>,
    /// For each basis element i, the pairs (j, k) with e_i + e_j = e_k and
    /// |e_k| <= order.
    products: Vec<Vec<(usize, usize)>>,
}

impl MonomialBasis {
    fn build(nvars: usize, order: usize) -> Self {
        let mut exps = Vec::new();
        for deg in 0..=order {
            let mut cur = vec![0u32; nvars];
            push_degree(&mut exps, &mut cur, 0, deg as u32);
        }
        let index: HashMap<Exponent, usize> =
            exps.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let degs: Vec<usize> = exps.iter().map(|e| e.iter().sum::<u32>() as usize).collect();
        let products = (0..exps.len())
            .map(|i| {
                (0..exps.len())
                    .filter(|&j| degs[i] + degs[j] <= order)
                    .map(|j| {
                        let s: Exponent = exps[i].iter().zip(&exps[j]).map(|(a, b)| a + b).collect();
                        (j, index[&s])
                    })
                    .collect()
            })
            .collect();
        MonomialBasis {
            nvars,
            order,
            exps,
            index,
            products,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[Exponent] {
        &self.exps
    }

    pub fn index_of(&self, e: &[u32]) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.exps[i].iter().sum::<u32>() as usize
    }

    /// Number of basis elements of degree <= r.
    pub fn prefix_len(&self, r: usize) -> usize {
        self.exps
            .iter()
            .take_while(|e| e.iter().sum::<u32>() as usize <= r)
            .count()
    }
}

fn push_degree(out: &mut Vec<Exponent>, cur: &mut Exponent, pos: usize, left: u32) {
    if pos + 1 == cur.len() {
        cur[pos] = left;
        out.push(cur.clone());
        cur[pos] = 0;
        return;
    }
    if cur.is_empty() {
        if left == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for k in (0..=left).rev() {
        cur[pos] = k;
        push_degree(out, cur, pos + 1, left - k);
    }
    cur[pos] = 0;
}

/// Shared graded-lex basis for `nvars` variables up to degree `order`.
pub fn basis(nvars: usize, order: usize) -> Arc<MonomialBasis> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<MonomialBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let mut guard = cache.lock().unwrap();
    guard
        .entry((nvars, order))
        .or_insert_with(|| Arc::new(MonomialBasis::build(nvars, order)))
        .clone()
}

#[derive(Clone)]
pub struct TruncatedSeries {
    basis: Arc<MonomialBasis>,
    coeffs: Vec<Rational>,
}

impl TruncatedSeries {
    pub fn zero(d: usize, r: usize) -> Self {
        let basis = basis(d, r);
        let coeffs = vec![Rational::zero(); basis.len()];
        TruncatedSeries { basis, coeffs }
    }

    pub fn constant(d: usize, r: usize, c: Rational) -> Self {
        let mut s = Self::zero(d, r);
        s.coeffs[0] = c;
        s
    }

    /// The coordinate function t_i (zero when r = 0).
    pub fn variable(d: usize, r: usize, i: usize) -> Self {
        let mut s = Self::zero(d, r);
        if r >= 1 {
            s.coeffs[1 + i] = Rational::one();
        }
        s
    }

    pub fn from_coeffs(d: usize, r: usize, coeffs: Vec<Rational>) -> Result<Self> {
        let basis = basis(d, r);
        if coeffs.len() != basis.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for a basis of size {}",
                coeffs.len(),
                basis.len()
            )));
        }
        Ok(TruncatedSeries { basis, coeffs })
    }

    pub fn like(&self, c: Rational) -> Self {
        Self::constant(self.d(), self.r(), c)
    }

    pub fn d(&self) -> usize {
        self.basis.nvars
    }

    pub fn r(&self) -> usize {
        self.basis.order
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.basis
            .index_of(e)
            .map(|i| self.coeffs[i].clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn set_coeff(&mut self, e: &[u32], c: Rational) {
        let i = self.basis.index_of(e).expect("multi-index within order");
        self.coeffs[i] = c;
    }

    pub fn constant_term(&self) -> &Rational {
        &self.coeffs[0]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TruncatedSeries {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    /// The same series with its constant term removed.
    pub fn without_constant(&self) -> Self {
        let mut s = self.clone();
        s.coeffs[0] = Rational::zero();
        s
    }

    /// Keeps the terms of degree <= r2.
    pub fn truncate(&self, r2: usize) -> Result<Self> {
        if r2 > self.r() {
            return Err(Error::OrderTooLarge {
                requested: r2,
                available: self.r(),
            });
        }
        let n = self.basis.prefix_len(r2);
        TruncatedSeries::from_coeffs(self.d(), r2, self.coeffs[..n].to_vec())
    }

    fn check_shape(&self, other: &Self) {
        assert!(
            self.d() == other.d() && self.r() == other.r(),
            "series shape mismatch: ({}, {}) vs ({}, {})",
            self.d(),
            self.r(),
            other.d(),
            other.r()
        );
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.like(Rational::one());
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

    /// Multiplicative inverse; requires a nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let c = self.constant_term();
        if c.is_zero() {
            return Err(Error::DenominatorVanishes);
        }
        let c_inv = c.recip();
        // 1/(c(1+u)) = c^-1 * sum (-u)^k, u nilpotent of order r+1.
        let neg_u = self.without_constant().scale(&-c_inv.clone());
        let mut acc = self.like(Rational::one());
        let mut power = acc.clone();
        for _ in 0..self.r() {
            power = &power * &neg_u;
            acc = &acc + &power;
        }
        Ok(acc.scale(&c_inv))
    }
}

/// Substitutes series for the variables of `f`. The variable count of `f`
/// must equal `values.len()` and all values share one shape.
pub fn compose_poly_series(f: &ExactPoly, values: &[TruncatedSeries], d: usize, r: usize) -> TruncatedSeries {
    assert_eq!(values.len(), f.nvars(), "wrong number of values");
    let mut powers: Vec<Vec<TruncatedSeries>> = values
        .iter()
        .map(|v| vec![TruncatedSeries::constant(d, r, Rational::one()), v.clone()])
        .collect();
    let mut acc = TruncatedSeries::zero(d, r);
    for (e, c) in f.terms() {
        let mut t: Option<TruncatedSeries> = None;
        for (i, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let k = k as usize;
            while powers[i].len() <= k {
                let next = &powers[i][powers[i].len() - 1] * &values[i];
                powers[i].push(next);
            }
            t = Some(match t {
                None => powers[i][k].clone(),
                Some(t) => &t * &powers[i][k],
            });
        }
        match t {
            None => acc.coeffs[0] += c,
            Some(t) => {
                for (a, b) in acc.coeffs.iter_mut().zip(&t.coeffs) {
                    if !b.is_zero() {
                        *a += c * b;
                    }
                }
            }
        }
    }
    acc
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        self.d() == other.d() && self.r() == other.r() && self.coeffs == other.coeffs
    }
}

impl Eq for TruncatedSeries {}

impl<'a> Add<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn add(self, rhs: &'a TruncatedSeries) -> TruncatedSeries {
        self.check_shape(rhs);
        TruncatedSeries {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn sub(self, rhs: &'a TruncatedSeries) -> TruncatedSeries {
        self.check_shape(rhs);
        TruncatedSeries {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl<'a> Mul<&'a TruncatedSeries> for &'a TruncatedSeries {
    type Output = TruncatedSeries;
    fn mul(self, rhs: &'a TruncatedSeries) -> TruncatedSeries {
        self.check_shape(rhs);
        let mut coeffs = vec![Rational::zero(); self.coeffs.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for &(j, k) in &self.basis.products[i] {
                let b = &rhs.coeffs[j];
                if !b.is_zero() {
                    coeffs[k] += a * b;
                }
            }
        }
        TruncatedSeries {
            basis: self.basis.clone(),
            coeffs,
        }
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;
    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .basis
            .exps
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| format!("{c}*t{e:?}"))
            .collect();
        write!(f, "Series(d={}, r={}: {})", self.d(), self.r(), terms.join(" + "))
    }
}
