//! Flat frames of a connection and the maps they induce on jets.
//!
//! A flat frame is a matrix `f = (f_jk)` of functions with
//! `∂_l f_jk = Σ_i f_ik c[i][j][l]`, i.e. `∂_l f = C_lᵗ f`. Every iterated
//! derivative is again linear in `f`:
//!
//! ```text
//! ∂_{i_q} ⋯ ∂_{i_1} f_jk = ξ_{(i_1..i_q), jk} = Σ_t f_tk K^{(i_1..i_q)}_tj
//! ```
//!
//! with kernels `K^(l) = C_l` and `K^(seq, b) = C_b K^seq + ∂_b K^seq`. The
//! kernels evaluated at a point give the Taylor expansion of the frame with
//! prescribed value there, which is what [`beta`] composes with a jet.

mod germ;
mod matrix_jet;

use std::collections::HashMap;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::connection::AlgebraicData;
use crate::error::{Error, Result};
use crate::jets::{compose_ratfunc, Jet};
use crate::linalg::QMatrix;
use crate::poly::{vars, ExactPoly};
use crate::ratfunc::ExactRatFunc;
use crate::rational::{factorial, Rational};
use crate::series::{basis, compose_poly_series, TruncatedSeries};

pub use germ::{matrix_vars, pullback_function_germ, tau_germ, GermMatrix, GermMatrixDoc};
pub use matrix_jet::{matrix_jet_inverse, MatrixCoeffDoc, MatrixJet, MatrixJetDoc};

type Kernel = Vec<Vec<ExactRatFunc>>;

/// One ξ polynomial: a linear form `Σ coeff · f_{t,u}` in the frame entries.
#[derive(Clone, Debug, PartialEq)]
pub struct XiForm {
    pub terms: Vec<((usize, usize), ExactRatFunc)>,
}

/// Kernels of the ξ polynomials for index sequences of length `1..=order`.
#[derive(Clone, Debug)]
pub struct XiTable {
    order: usize,
    m: usize,
    n: usize,
    sequences: Vec<Vec<usize>>,
    kernels: HashMap<Vec<usize>, Kernel>,
}

/// Which index sequences a table holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sequences {
    All,
    /// Weakly increasing sequences only, one per multi-index.
    Sorted,
}

fn extend_kernel(data: &AlgebraicData, k: &Kernel, b: usize) -> Kernel {
    let m = data.rank();
    let c = data.connection();
    (0..m)
        .map(|u| {
            (0..m)
                .map(|j| {
                    let mut acc = k[u][j].diff_at(b);
                    for t in 0..m {
                        let cb = &c[u][t][b];
                        if cb.is_zero() || k[t][j].is_zero() {
                            continue;
                        }
                        acc = &acc + &(cb * &k[t][j]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn build(data: &AlgebraicData, order: usize, which: Sequences) -> XiTable {
    let m = data.rank();
    let n = data.dim();
    let mut sequences: Vec<Vec<usize>> = Vec::new();
    let mut kernels: HashMap<Vec<usize>, Kernel> = HashMap::new();
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    let identity: Kernel = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        ExactRatFunc::one(data.coords())
                    } else {
                        ExactRatFunc::zero(data.coords())
                    }
                })
                .collect()
        })
        .collect();
    for _ in 0..order {
        let mut next = Vec::new();
        for seq in &frontier {
            let start = match which {
                Sequences::All => 0,
                Sequences::Sorted => seq.last().copied().unwrap_or(0),
            };
            for b in start..n {
                let parent = kernels.get(seq).unwrap_or(&identity);
                let k = extend_kernel(data, parent, b);
                let mut s = seq.clone();
                s.push(b);
                kernels.insert(s.clone(), k);
                next.push(s);
            }
        }
        sequences.extend(next.iter().cloned());
        frontier = next;
    }
    XiTable {
        order,
        m,
        n,
        sequences,
        kernels,
    }
}

/// All ξ polynomials up to `order`, for every index sequence.
pub fn compute_xi(data: &AlgebraicData, order: usize) -> XiTable {
    build(data, order, Sequences::All)
}

impl XiTable {
    /// Only the weakly increasing sequences; enough for Taylor expansions.
    pub fn sorted(data: &AlgebraicData, order: usize) -> XiTable {
        build(data, order, Sequences::Sorted)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.m
    }

    /// Index sequences held, by length then lexicographically.
    pub fn sequences(&self) -> &[Vec<usize>] {
        &self.sequences
    }

    /// The kernel `K^seq`; `entry(seq, j, k) = Σ_t f_tk K[t][j]`.
    pub fn kernel(&self, seq: &[usize]) -> Option<&[Vec<ExactRatFunc>]> {
        self.kernels.get(seq).map(Vec::as_slice)
    }

    pub fn entry(&self, seq: &[usize], j: usize, k: usize) -> Option<XiForm> {
        let kern = self.kernels.get(seq)?;
        let terms = (0..self.m)
            .filter(|&t| !kern[t][j].is_zero())
            .map(|t| ((t, k), kern[t][j].clone()))
            .collect();
        Some(XiForm { terms })
    }

    /// Whether `ξ_(a,b) = ξ_(b,a)` for all a, b, up to the chart relations.
    pub fn is_symmetric(&self, data: &AlgebraicData) -> bool {
        self.asymmetric_pairs(data).is_empty()
    }

    /// Pairs `a < b` with `ξ_(a,b) ≠ ξ_(b,a)`.
    pub fn asymmetric_pairs(&self, data: &AlgebraicData) -> Vec<(usize, usize)> {
        assert!(self.order >= 2, "symmetry needs sequences of length 2");
        let mut out = Vec::new();
        for a in 0..self.n {
            for b in a + 1..self.n {
                let (Some(x), Some(y)) = (self.kernels.get(&vec![a, b]), self.kernels.get(&vec![b, a]))
                else {
                    continue;
                };
                let differs = x.iter().flatten().zip(y.iter().flatten()).any(|(p, q)| {
                    p != q && !data.chart().is_zero_function(&(p - q))
                });
                if differs {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Derivative sequence for a multi-index: `p = (2, 1)` gives `(0, 0, 1)`.
    fn sequence_of(p: &[u32]) -> Vec<usize> {
        p.iter()
            .enumerate()
            .flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize))
            .collect()
    }

    /// Taylor coefficients (in `w = z − s`, graded-lex) of the frame with
    /// value `m0` at `s`: entry `[j][k]` is a series in n variables.
    pub fn taylor(&self, data: &AlgebraicData, s: &[Rational], m0: &QMatrix, r: usize) -> Result<Vec<TruncatedSeries>> {
        if r > self.order {
            return Err(Error::OrderTooLarge {
                requested: r,
                available: self.order,
            });
        }
        check_frame(m0, self.m)?;
        data.check_base_point(s)?;
        let m = self.m;
        let b = basis(self.n, r);
        let mut table = vec![vec![Rational::zero(); b.len()]; m * m];
        for (idx, p) in b.exponents().iter().enumerate() {
            let seq = Self::sequence_of(p);
            let dp = if seq.is_empty() {
                m0.clone()
            } else {
                let kern = self.kernels.get(&seq).expect("sorted sequence present");
                let mut kt = QMatrix::zeros(m, m);
                for t in 0..m {
                    for j in 0..m {
                        kt[(j, t)] = kern[t][j].eval(s)?;
                    }
                }
                &kt * m0
            };
            let denom = p.iter().fold(Rational::one(), |acc, &k| acc * factorial(k));
            for j in 0..m {
                for k in 0..m {
                    table[j * m + k][idx] = &dp[(j, k)] / &denom;
                }
            }
        }
        table
            .into_iter()
            .map(|c| TruncatedSeries::from_coeffs(self.n, r, c))
            .collect()
    }

    /// [`beta`] with a precomputed table.
    pub fn beta(&self, data: &AlgebraicData, sigma: &Jet, m0: &QMatrix) -> Result<MatrixJet> {
        if sigma.chart().coords() != data.coords() {
            return Err(Error::mismatch(data.coords(), sigma.chart().coords()));
        }
        let (d, r) = (sigma.d(), sigma.r());
        let s = sigma.base_point();
        let taylor = self.taylor(data, &s, m0, r)?;
        let offsets: Vec<TruncatedSeries> = sigma
            .components()
            .iter()
            .map(TruncatedSeries::without_constant)
            .collect();
        let wvars = vars((1..=self.n).map(|i| format!("w{i}")));
        let entries = taylor
            .iter()
            .map(|series| {
                let poly = ExactPoly::from_terms(
                    &wvars,
                    series
                        .basis()
                        .exponents()
                        .iter()
                        .zip(series.coeffs())
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(e, c)| (e.clone(), c.clone())),
                );
                compose_poly_series(&poly, &offsets, d, r)
            })
            .collect();
        MatrixJet::new(d, r, self.m, entries)
    }

    pub fn to_doc(&self) -> XiTableDoc {
        let mut entries = Vec::new();
        for seq in &self.sequences {
            for j in 0..self.m {
                for k in 0..self.m {
                    let form = self.entry(seq, j, k).expect("listed sequence");
                    entries.push(XiEntryDoc {
                        seq: seq.clone(),
                        j,
                        k,
                        terms: form
                            .terms
                            .into_iter()
                            .map(|((t, u), coeff)| XiTermDoc { f: [t, u], coeff })
                            .collect(),
                    });
                }
            }
        }
        XiTableDoc {
            order: self.order,
            m: self.m,
            entries,
        }
    }
}

/// Serialized ξ table; all indices 0-based.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiTableDoc {
    pub order: usize,
    pub m: usize,
    pub entries: Vec<XiEntryDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiEntryDoc {
    pub seq: Vec<usize>,
    pub j: usize,
    pub k: usize,
    pub terms: Vec<XiTermDoc>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct XiTermDoc {
    pub f: [usize; 2],
    pub coeff: ExactRatFunc,
}

fn check_frame(m0: &QMatrix, m: usize) -> Result<()> {
    if m0.rows() != m || m0.cols() != m {
        return Err(Error::DimensionMismatch(format!(
            "initial matrix is {}×{}, rank is {m}",
            m0.rows(),
            m0.cols()
        )));
    }
    if m0.det()?.is_zero() {
        return Err(Error::SingularMatrix);
    }
    Ok(())
}

/// The jet `f ∘ σ` of the flat frame with `f(σ(0)) = m0`.
pub fn beta(data: &AlgebraicData, sigma: &Jet, m0: &QMatrix) -> Result<MatrixJet> {
    check_frame(m0, data.rank())?;
    XiTable::sorted(data, sigma.r()).beta(data, sigma, m0)
}

/// The inverse of [`beta`]; its columns represent the flag jet.
pub fn alpha(data: &AlgebraicData, sigma: &Jet, m0: &QMatrix) -> Result<MatrixJet> {
    matrix_jet_inverse(&beta(data, sigma, m0)?)
}

fn check_transition(c: &[Vec<ExactRatFunc>], m: usize) -> Result<()> {
    if c.len() != m || c.iter().any(|row| row.len() != m) {
        return Err(Error::DimensionMismatch(format!("transition must be {m}×{m}")));
    }
    Ok(())
}

/// `a · C(at)`.
pub fn apply_transition(a: &QMatrix, c: &[Vec<ExactRatFunc>], at: &[Rational]) -> Result<QMatrix> {
    check_transition(c, a.rows())?;
    let m = a.rows();
    let mut cm = QMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            cm[(i, j)] = c[i][j].eval(at)?;
        }
    }
    Ok(a * &cm)
}

/// `J · (C ∘ σ)`.
pub fn apply_transition_jet(j: &MatrixJet, c: &[Vec<ExactRatFunc>], sigma: &Jet) -> Result<MatrixJet> {
    check_transition(c, j.m())?;
    if (sigma.d(), sigma.r()) != (j.d(), j.r()) {
        return Err(Error::DimensionMismatch("jet and matrix jet differ in shape".into()));
    }
    let entries = c
        .iter()
        .flatten()
        .map(|f| compose_ratfunc(f, sigma))
        .collect::<Result<Vec<_>>>()?;
    j.mul(&MatrixJet::new(j.d(), j.r(), j.m(), entries)?)
}
