//! Fixtures and an independent power-series solver shared by the
//! integration tests.
//!
//! The solver never touches the crate's series, ξ or composition code: it
//! expands the connection coefficients at the base point by the binomial
//! theorem and long division, runs the coefficient recursion of the linear
//! system, and substitutes the jet with its own truncated products.

#![allow(dead_code)]

use std::collections::BTreeMap;

use hodgejet::connection::AlgebraicData;
use hodgejet::correspondence::MatrixJet;
use hodgejet::jets::Jet;
use hodgejet::linalg::QMatrix;
use hodgejet::poly::{vars, ExactPoly, Vars};
use hodgejet::ratfunc::ExactRatFunc;
use hodgejet::rational::{int, Rational};
use hodgejet::series::TruncatedSeries;
use hodgejet::Chart;
use num::{One, Zero};
use rand::rngs::StdRng;
use rand::Rng;

/// Exponents of total degree `<= r` in `d` variables, any order.
pub fn exponents(d: usize, r: usize) -> Vec<Vec<u32>> {
    fn go(d: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == d {
            out.push(prefix.clone());
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            go(d, left - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(d, r as u32, &mut Vec::new(), &mut out);
    out.sort_by_key(|e| e.iter().sum::<u32>());
    out
}

/// Dense truncated series keyed by exponent.
#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub d: usize,
    pub r: usize,
    pub c: BTreeMap<Vec<u32>, Rational>,
}

impl Series {
    pub fn zero(d: usize, r: usize) -> Self {
        Series { d, r, c: BTreeMap::new() }
    }

    pub fn constant(d: usize, r: usize, a: Rational) -> Self {
        let mut s = Self::zero(d, r);
        s.add_term(vec![0; d], a);
        s
    }

    pub fn add_term(&mut self, e: Vec<u32>, a: Rational) {
        if e.iter().sum::<u32>() as usize > self.r || a.is_zero() {
            return;
        }
        let slot = self.c.entry(e).or_insert_with(Rational::zero);
        *slot += a;
    }

    pub fn get(&self, e: &[u32]) -> Rational {
        self.c.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, o: &Series) -> Series {
        let mut out = self.clone();
        for (e, a) in &o.c {
            out.add_term(e.clone(), a.clone());
        }
        out
    }

    pub fn mul(&self, o: &Series) -> Series {
        let mut out = Series::zero(self.d, self.r);
        for (e, a) in &self.c {
            for (f, b) in &o.c {
                let g: Vec<u32> = e.iter().zip(f).map(|(x, y)| x + y).collect();
                out.add_term(g, a * b);
            }
        }
        out
    }

    pub fn scale(&self, a: &Rational) -> Series {
        let mut out = Series::zero(self.d, self.r);
        for (e, b) in &self.c {
            out.add_term(e.clone(), a * b);
        }
        out
    }

    /// `self / den`, by solving `den · q = self` degree by degree.
    pub fn div(&self, den: &Series) -> Series {
        let d0 = den.get(&vec![0; self.d]);
        assert!(!d0.is_zero(), "denominator vanishes at the base point");
        let mut q = Series::zero(self.d, self.r);
        for e in exponents(self.d, self.r) {
            let mut acc = self.get(&e);
            for (f, b) in &den.c {
                if f.iter().all(|&x| x == 0) || f.iter().zip(&e).any(|(x, y)| x > y) {
                    continue;
                }
                let rest: Vec<u32> = e.iter().zip(f).map(|(x, y)| x - y).collect();
                acc -= b * q.get(&rest);
            }
            q.add_term(e, acc / &d0);
        }
        q
    }
}

fn binomial(n: u32, k: u32) -> Rational {
    let mut out = Rational::one();
    for i in 0..k {
        out = out * int((n - i) as i64) / int((i + 1) as i64);
    }
    out
}

/// `p(s + w)` by the binomial theorem, truncated at degree r.
pub fn expand_poly(p: &ExactPoly, s: &[Rational], r: usize) -> Series {
    let n = s.len();
    let mut out = Series::zero(n, r);
    for (e, a) in p.terms() {
        let mut term = Series::constant(n, r, a.clone());
        for (i, &k) in e.iter().enumerate() {
            let mut factor = Series::zero(n, r);
            for j in 0..=k {
                let mut w = vec![0; n];
                w[i] = j;
                let pow = num::pow::pow(s[i].clone(), (k - j) as usize);
                factor.add_term(w, binomial(k, j) * pow);
            }
            term = term.mul(&factor);
        }
        out = out.add(&term);
    }
    out
}

pub fn expand_ratfunc(f: &ExactRatFunc, s: &[Rational], r: usize) -> Series {
    expand_poly(f.num(), s, r).div(&expand_poly(f.den(), s, r))
}

/// Taylor coefficients `F_p` (in `w = z − s`) of the solution of
/// `∂_l f = C_lᵗ f`, `f(s) = M`, through degree r.
pub fn oracle_taylor(data: &AlgebraicData, s: &[Rational], m0: &QMatrix, r: usize) -> BTreeMap<Vec<u32>, QMatrix> {
    let (m, n) = (data.rank(), data.dim());
    // cexp[l][i][j] = expansion of c[i][j][l]
    let cexp: Vec<Vec<Vec<Series>>> = (0..n)
        .map(|l| {
            (0..m)
                .map(|i| (0..m).map(|j| expand_ratfunc(data.coeff(i, j, l), s, r)).collect())
                .collect()
        })
        .collect();
    let mut f: BTreeMap<Vec<u32>, QMatrix> = BTreeMap::new();
    for p in exponents(n, r) {
        let Some(l) = p.iter().position(|&x| x > 0) else {
            f.insert(p, m0.clone());
            continue;
        };
        let mut below = p.clone();
        below[l] -= 1;
        let mut acc = QMatrix::zeros(m, m);
        for q in exponents(n, below.iter().sum::<u32>() as usize) {
            if q.iter().zip(&below).any(|(a, b)| a > b) {
                continue;
            }
            let rest: Vec<u32> = below.iter().zip(&q).map(|(a, b)| a - b).collect();
            let fr = &f[&rest];
            for j in 0..m {
                for k in 0..m {
                    let mut v = Rational::zero();
                    for i in 0..m {
                        v += cexp[l][i][j].get(&q) * &fr[(i, k)];
                    }
                    acc[(j, k)] += v;
                }
            }
        }
        f.insert(p.clone(), acc.scale(&(Rational::one() / int(p[l] as i64))));
    }
    f
}

/// The oracle's `f ∘ σ`, as a map from t-exponent to coefficient matrix.
pub fn oracle_beta(data: &AlgebraicData, sigma: &Jet, m0: &QMatrix) -> BTreeMap<Vec<u32>, QMatrix> {
    let (d, r, m, n) = (sigma.d(), sigma.r(), data.rank(), data.dim());
    let s = sigma.base_point();
    let taylor = oracle_taylor(data, &s, m0, r);
    let offsets: Vec<Series> = (0..n)
        .map(|i| {
            let mut out = Series::zero(d, r);
            for e in exponents(d, r) {
                if e.iter().any(|&x| x > 0) {
                    out.add_term(e.clone(), sigma.coeff(&e, i));
                }
            }
            out
        })
        .collect();
    let mut entries = vec![Series::zero(d, r); m * m];
    for (p, fp) in &taylor {
        let mut mono = Series::constant(d, r, Rational::one());
        for (i, &k) in p.iter().enumerate() {
            for _ in 0..k {
                mono = mono.mul(&offsets[i]);
            }
        }
        for v in 0..m * m {
            entries[v] = entries[v].add(&mono.scale(&fp[(v / m, v % m)]));
        }
    }
    exponents(d, r)
        .into_iter()
        .map(|e| {
            let mut a = QMatrix::zeros(m, m);
            for v in 0..m * m {
                a[(v / m, v % m)] = entries[v].get(&e);
            }
            (e, a)
        })
        .collect()
}

pub fn matches_oracle(jet: &MatrixJet, oracle: &BTreeMap<Vec<u32>, QMatrix>) -> bool {
    oracle.iter().all(|(e, a)| &jet.coefficient(e) == a)
}

// ---- random fixtures ----

pub fn small_rational(rng: &mut StdRng) -> Rational {
    Rational::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=3).into())
}

pub fn small_nonzero(rng: &mut StdRng) -> Rational {
    loop {
        let q = small_rational(rng);
        if !q.is_zero() {
            return q;
        }
    }
}

/// Sparse random polynomial of total degree `<= deg`.
pub fn random_poly(rng: &mut StdRng, v: &Vars, deg: u32, terms: usize) -> ExactPoly {
    let mut out = ExactPoly::zero(v);
    for _ in 0..terms {
        let mut e = vec![0u32; v.len()];
        let mut left = rng.gen_range(0..=deg);
        while left > 0 {
            e[rng.gen_range(0..v.len())] += 1;
            left -= 1;
        }
        out = &out + &ExactPoly::monomial(v, e, small_rational(rng));
    }
    out
}

pub fn random_invertible(rng: &mut StdRng, m: usize) -> QMatrix {
    loop {
        let rows = (0..m).map(|_| (0..m).map(|_| small_rational(rng)).collect()).collect();
        let a = QMatrix::from_rows(rows).unwrap();
        if !a.det().unwrap().is_zero() {
            return a;
        }
    }
}

pub fn random_point(rng: &mut StdRng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| small_rational(rng)).collect()
}

/// Arbitrary rational connection on the line: flat by dimension.
pub fn random_line_data(rng: &mut StdRng, m: usize) -> AlgebraicData {
    let v = vars(["z"]);
    let one = ExactPoly::one(&v);
    let conn = (0..m)
        .map(|_| {
            (0..m)
                .map(|_| {
                    let num = random_poly(rng, &v, 2, 2);
                    let den = &one + &random_poly(rng, &v, 1, 1).mul_term(&[1], &Rational::one());
                    vec![ExactRatFunc::new(num, den).unwrap()]
                })
                .collect()
        })
        .collect();
    AlgebraicData::on_affine(&v, conn).unwrap()
}

/// Flat connection `C_l = (∂_l H · H⁻¹)ᵗ` for a random polynomial matrix H,
/// so that `f = H · const` solves the system.
pub fn random_gauge_data(rng: &mut StdRng, m: usize, n: usize) -> AlgebraicData {
    let v = vars((1..=n).map(|i| format!("z{i}")));
    loop {
        let h: Vec<Vec<ExactPoly>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        let base = if i == j { ExactPoly::one(&v) } else { ExactPoly::zero(&v) };
                        &base + &random_poly(rng, &v, 2, 2)
                    })
                    .collect()
            })
            .collect();
        let hr: Vec<Vec<ExactRatFunc>> = h
            .iter()
            .map(|row| row.iter().map(|p| ExactRatFunc::from_poly(p.clone())).collect())
            .collect();
        let Some(inv) = ratfunc_inverse(&hr) else { continue };
        let mut conn = vec![vec![vec![ExactRatFunc::zero(&v); n]; m]; m];
        for l in 0..n {
            for i in 0..m {
                for j in 0..m {
                    // (∂_l H · H⁻¹)_{ji}
                    let mut acc = ExactRatFunc::zero(&v);
                    for k in 0..m {
                        acc = &acc + &(&hr[j][k].diff_at(l) * &inv[k][i]);
                    }
                    conn[i][j][l] = acc;
                }
            }
        }
        return AlgebraicData::on_affine(&v, conn).unwrap();
    }
}

fn ratfunc_inverse(a: &[Vec<ExactRatFunc>]) -> Option<Vec<Vec<ExactRatFunc>>> {
    match a.len() {
        1 => Some(vec![vec![a[0][0].inv().ok()?]]),
        2 => {
            let det = &(&a[0][0] * &a[1][1]) - &(&a[0][1] * &a[1][0]);
            let di = det.inv().ok()?;
            Some(vec![
                vec![&a[1][1] * &di, -&(&a[0][1] * &di)],
                vec![-&(&a[1][0] * &di), &a[0][0] * &di],
            ])
        }
        _ => unimplemented!("fixtures use m <= 2"),
    }
}

/// Whether every denominator of the data is nonzero at `s`.
pub fn regular_at(data: &AlgebraicData, s: &[Rational]) -> bool {
    data.check_base_point(s).is_ok()
}

/// Random jet based at `s`.
pub fn random_jet(rng: &mut StdRng, chart: &Chart, s: &[Rational], d: usize, r: usize) -> Jet {
    let comps = s
        .iter()
        .map(|si| {
            let coeffs = exponents_graded_lex(d, r)
                .iter()
                .map(|e| if e.iter().all(|&x| x == 0) { si.clone() } else { small_rational(rng) })
                .collect();
            TruncatedSeries::from_coeffs(d, r, coeffs).unwrap()
        })
        .collect();
    Jet::new(chart, d, r, comps).unwrap()
}

fn exponents_graded_lex(d: usize, r: usize) -> Vec<Vec<u32>> {
    hodgejet::series::basis(d, r).exponents().to_vec()
}

/// Random jet of a matrix with invertible constant term.
pub fn random_matrix_jet(rng: &mut StdRng, d: usize, r: usize, m: usize) -> MatrixJet {
    let c0 = random_invertible(rng, m);
    let b = hodgejet::series::basis(d, r);
    let entries = (0..m * m)
        .map(|v| {
            let coeffs = (0..b.len())
                .map(|k| if k == 0 { c0[(v / m, v % m)].clone() } else { small_rational(rng) })
                .collect();
            TruncatedSeries::from_coeffs(d, r, coeffs).unwrap()
        })
        .collect();
    MatrixJet::new(d, r, m, entries).unwrap()
}
