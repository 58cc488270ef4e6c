//! Constraint varieties on matrix representatives, orbit membership of
//! matrix jets, and the linear algebra of truncated germ ideals.
//!
//! A [`ConstraintVariety`] is given by equations in the matrix coordinates
//! `a_1_1 … a_m_m` and is read as a subset of GL_m whose points are flag
//! representatives (columns spanning the flag). The frame ambiguity acts on
//! the left, so orbit tests ask for some invertible `g` with `g·J` in the
//! jets of the variety.

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::connection::AlgebraicData;
use crate::correspondence::{alpha, matrix_vars, pullback_function_germ, MatrixJet};
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::jets::Jet;
use crate::linalg::{in_span, span_rank, QMatrix};
use crate::poly::{vars, ExactPoly, Vars};
use crate::rational::{int, Rational};
use crate::series::{basis, compose_poly_series, TruncatedSeries};

/// Largest matrix size and jet order accepted by [`in_gl_orbit`].
pub const ORBIT_MAX_RANK: usize = 2;
pub const ORBIT_MAX_ORDER: usize = 2;

/// `H(r, d) = binomial(r + d, d)`: monomials of degree `<= r` in d variables.
pub fn hilbert_count(r: usize, d: usize) -> u64 {
    num::integer::binomial((r + d) as u64, d as u64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintVariety {
    m: usize,
    equations: Vec<ExactPoly>,
}

impl ConstraintVariety {
    /// Equations may use any subset of the matrix coordinates.
    pub fn new(m: usize, equations: Vec<ExactPoly>) -> Result<Self> {
        let target = matrix_vars(m);
        let equations = equations
            .iter()
            .map(|e| e.embed(&target))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConstraintVariety { m, equations })
    }

    pub fn parse(m: usize, equations: &[&str]) -> Result<Self> {
        let v = matrix_vars(m);
        let polys = equations
            .iter()
            .map(|e| ExactPoly::parse(&v, e))
            .collect::<Result<Vec<_>>>()?;
        Self::new(m, polys)
    }

    /// All of GL_m.
    pub fn general_linear(m: usize) -> Self {
        ConstraintVariety {
            m,
            equations: Vec::new(),
        }
    }

    /// Representatives of the flag fixed by the block-upper-triangular group
    /// with the given filtration ranks: entries below the diagonal blocks vanish.
    pub fn point_flag_stabilizer(filtration: &[usize]) -> Result<Self> {
        let m = *filtration.last().ok_or_else(|| Error::DimensionMismatch("empty filtration".into()))?;
        let block = block_index(filtration);
        let v = matrix_vars(m);
        let equations = (0..m)
            .flat_map(|j| (0..m).map(move |k| (j, k)))
            .filter(|&(j, k)| block[j] > block[k])
            .map(|(j, k)| ExactPoly::var_at(&v, j * m + k))
            .collect();
        Ok(ConstraintVariety { m, equations })
    }

    /// `{a_2_1 = 0}` at m = 2.
    pub fn lower_left_zero() -> Self {
        Self::parse(2, &["a_2_1"]).expect("fixed equation")
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn equations(&self) -> &[ExactPoly] {
        &self.equations
    }

    /// Whether substituting `a ↦ a·u`, `u` block upper triangular with
    /// indeterminate entries, keeps every equation in the ideal they generate.
    pub fn is_right_invariant(&self, filtration: &[usize]) -> Result<bool> {
        if filtration.last() != Some(&self.m) {
            return Err(Error::DimensionMismatch(format!(
                "filtration {filtration:?} does not end at {}",
                self.m
            )));
        }
        let m = self.m;
        let block = block_index(filtration);
        let names: Vec<String> = matrix_vars(m)
            .iter()
            .cloned()
            .chain((1..=m).flat_map(|j| (1..=m).map(move |k| format!("u_{j}_{k}"))))
            .collect();
        let ring = vars(names);
        let a = |j: usize, k: usize| ExactPoly::var_at(&ring, j * m + k);
        let u = |j: usize, k: usize| {
            if block[j] <= block[k] {
                ExactPoly::var_at(&ring, m * m + j * m + k)
            } else {
                ExactPoly::zero(&ring)
            }
        };
        let moved: Vec<ExactPoly> = (0..m * m)
            .map(|v| {
                let (j, k) = (v / m, v % m);
                (0..m).fold(ExactPoly::zero(&ring), |acc, t| &acc + &(&a(j, t) * &u(t, k)))
            })
            .collect();
        let gens = self
            .equations
            .iter()
            .map(|e| e.embed(&ring))
            .collect::<Result<Vec<_>>>()?;
        let ideal = Ideal::new(&ring, gens)?;
        for e in &self.equations {
            if !ideal.contains(&e.substitute(&moved)?)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn to_doc(&self) -> ConstraintVarietyDoc {
        ConstraintVarietyDoc {
            m: self.m,
            equations: self.equations.clone(),
        }
    }

    pub fn from_doc(doc: &ConstraintVarietyDoc) -> Result<Self> {
        Self::new(doc.m, doc.equations.clone())
    }
}

fn block_index(filtration: &[usize]) -> Vec<usize> {
    let m = filtration.last().copied().unwrap_or(0);
    (0..m)
        .map(|i| filtration.iter().position(|&f| i < f).expect("index below last rank"))
        .collect()
}

/// `{ "m": 2, "equations": [poly, ...] }` with polynomials in `a_j_k`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstraintVarietyDoc {
    pub m: usize,
    pub equations: Vec<ExactPoly>,
}

fn check_size(j: &MatrixJet, w: &ConstraintVariety) -> Result<()> {
    if j.m() != w.m {
        return Err(Error::DimensionMismatch(format!(
            "{}×{} matrix jet against a variety in GL_{}",
            j.m(),
            j.m(),
            w.m
        )));
    }
    Ok(())
}

/// Whether every equation composed with `J` vanishes to order r.
pub fn jet_in_variety(j: &MatrixJet, w: &ConstraintVariety) -> Result<bool> {
    check_size(j, w)?;
    Ok(w
        .equations
        .iter()
        .all(|e| compose_poly_series(e, j.entries(), j.d(), j.r()).is_zero()))
}

/// Outcome of an orbit test, with an invertible `g` when one was found.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitResult {
    pub result: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<QMatrix>,
}

/// Whether some invertible `g` puts `g·J` into the jets of `W`.
///
/// The truncated-series coefficients of the equations on `g·J` generate an
/// ideal in the entries of `g`; the answer is whether its saturation by
/// `det g` is proper.
pub fn in_gl_orbit(j: &MatrixJet, w: &ConstraintVariety) -> Result<OrbitResult> {
    check_size(j, w)?;
    let (m, r) = (j.m(), j.r());
    if m > ORBIT_MAX_RANK || r > ORBIT_MAX_ORDER {
        return Err(Error::ScaleGuard(format!(
            "orbit test supports m <= {ORBIT_MAX_RANK} and r <= {ORBIT_MAX_ORDER}, got m = {m}, r = {r}"
        )));
    }
    let j0_inv = j.constant_term().inverse()?;
    let gvars = vars((1..=m).flat_map(|u| (1..=m).map(move |v| format!("g_{u}_{v}"))));
    let ideal = orbit_ideal(j, w, &gvars)?;
    let det = det_poly(&gvars, m);
    if ideal.saturate(&det)?.is_empty() {
        return Ok(OrbitResult {
            result: false,
            witness: None,
        });
    }
    let witness = candidates(m, &j0_inv).find(|g| {
        !g.det().expect("square").is_zero()
            && ideal.generators().iter().all(|p| p.eval(&flatten(g)).is_zero())
    });
    Ok(OrbitResult {
        result: true,
        witness,
    })
}

fn flatten(g: &QMatrix) -> Vec<Rational> {
    g.to_rows().into_iter().flatten().collect()
}

fn det_poly(gvars: &Vars, m: usize) -> ExactPoly {
    let g = |u: usize, v: usize| ExactPoly::var_at(gvars, u * m + v);
    match m {
        1 => g(0, 0),
        2 => &(&g(0, 0) * &g(1, 1)) - &(&g(0, 1) * &g(1, 0)),
        _ => unreachable!("guarded by ORBIT_MAX_RANK"),
    }
}

/// `J0⁻¹`, the identity, then small integer matrices.
fn candidates(m: usize, j0_inv: &QMatrix) -> impl Iterator<Item = QMatrix> {
    let small = (0..5usize.pow((m * m) as u32)).map(move |mut code| {
        let mut a = QMatrix::zeros(m, m);
        for v in 0..m * m {
            a[(v / m, v % m)] = int((code % 5) as i64 - 2);
            code /= 5;
        }
        a
    });
    [j0_inv.clone(), QMatrix::identity(m)].into_iter().chain(small)
}

/// Coefficients of `t^p`, `|p| <= r`, of every equation evaluated on `g·J`.
fn orbit_ideal(j: &MatrixJet, w: &ConstraintVariety, gvars: &Vars) -> Result<Ideal> {
    let (m, d, r) = (j.m(), j.d(), j.r());
    let names: Vec<String> = gvars
        .iter()
        .cloned()
        .chain((1..=d).map(|i| format!("t_{i}")))
        .collect();
    let ring = vars(names);
    let nt = m * m;
    let series_poly = |s: &TruncatedSeries| {
        ExactPoly::from_terms(
            &ring,
            s.basis().exponents().iter().zip(s.coeffs()).filter(|(_, c)| !c.is_zero()).map(|(e, c)| {
                let mut full = vec![0; nt];
                full.extend_from_slice(e);
                (full, c.clone())
            }),
        )
    };
    let gj: Vec<ExactPoly> = (0..nt)
        .map(|v| {
            let (a, b) = (v / m, v % m);
            (0..m).fold(ExactPoly::zero(&ring), |acc, k| {
                &acc + &(&ExactPoly::var_at(&ring, a * m + k) * &series_poly(j.entry(k, b)))
            })
        })
        .collect();
    let tb = basis(d, r);
    let mut gens = Vec::new();
    for e in &w.equations {
        let composed = e.substitute(&gj)?;
        let mut by_t = vec![Vec::new(); tb.len()];
        for (exp, c) in composed.terms() {
            if let Some(k) = tb.index_of(&exp[nt..]) {
                by_t[k].push((exp[..nt].to_vec(), c.clone()));
            }
        }
        gens.extend(by_t.into_iter().map(|terms| ExactPoly::from_terms(gvars, terms)));
    }
    Ideal::new(gvars, gens)
}

/// The orbit test applied to `alpha(σ, M)`.
pub fn constraint_test_with(
    sigma: &Jet,
    data: &AlgebraicData,
    w: &ConstraintVariety,
    m0: &QMatrix,
) -> Result<OrbitResult> {
    if data.rank() > ORBIT_MAX_RANK || sigma.r() > ORBIT_MAX_ORDER {
        return Err(Error::ScaleGuard(format!(
            "orbit test supports m <= {ORBIT_MAX_RANK} and r <= {ORBIT_MAX_ORDER}, got m = {}, r = {}",
            data.rank(),
            sigma.r()
        )));
    }
    in_gl_orbit(&alpha(data, sigma, m0)?, w)
}

/// The orbit test applied to `alpha(σ, I)`.
pub fn constraint_test(sigma: &Jet, data: &AlgebraicData, w: &ConstraintVariety) -> Result<OrbitResult> {
    constraint_test_with(sigma, data, w, &QMatrix::identity(data.rank()))
}

/// The image of an ideal in the germs at `s` modulo degree r+1, as
/// coefficient vectors in the graded-lex monomial basis of `z − s`.
#[derive(Clone, Debug)]
pub struct GermIdeal {
    s: Vec<Rational>,
    r: usize,
    generators: Vec<Vec<Rational>>,
}

impl GermIdeal {
    /// Expands each generator at `s` and multiplies by every monomial of
    /// degree `<= r`. Fails unless `s` is a zero of the ideal.
    pub fn new(z: &Ideal, s: &[Rational], r: usize) -> Result<Self> {
        let n = z.vars().len();
        if s.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "point has {} coordinates, ideal has {n} variables",
                s.len()
            )));
        }
        if let Some(g) = z.generators().iter().find(|g| !g.eval(s).is_zero()) {
            return Err(Error::PointNotOnVariety(format!("{g} does not vanish")));
        }
        let shift: Vec<TruncatedSeries> = (0..n)
            .map(|i| &TruncatedSeries::constant(n, r, s[i].clone()) + &TruncatedSeries::variable(n, r, i))
            .collect();
        let b = basis(n, r);
        let monomials: Vec<TruncatedSeries> = b
            .exponents()
            .iter()
            .map(|e| {
                let mut t = TruncatedSeries::zero(n, r);
                t.set_coeff(e, Rational::one());
                t
            })
            .collect();
        let mut generators = Vec::new();
        for g in z.generators() {
            let local = compose_poly_series(g, &shift, n, r);
            for mono in &monomials {
                let v = &local * mono;
                if !v.is_zero() {
                    generators.push(v.coeffs().to_vec());
                }
            }
        }
        Ok(GermIdeal {
            s: s.to_vec(),
            r,
            generators,
        })
    }

    pub fn base_point(&self) -> &[Rational] {
        &self.s
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn generators(&self) -> &[Vec<Rational>] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        span_rank(&self.generators)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        in_span(&self.generators, v)
    }

    /// `H(r, n)` minus the rank of the span.
    pub fn quotient_dimension(&self) -> usize {
        hilbert_count(self.r, self.s.len()) as usize - self.rank()
    }
}

/// Whether the transported germ of `h` lies in the germ of `Z` (together
/// with the chart relations) at `s`, to order r.
pub fn germ_contained(
    z: &Ideal,
    s: &[Rational],
    data: &AlgebraicData,
    m0: &QMatrix,
    h: &ExactPoly,
    r: usize,
) -> Result<bool> {
    let z = z.embed(data.coords())?;
    let gens = z
        .generators()
        .iter()
        .chain(data.chart().relations().generators())
        .cloned();
    let germ = GermIdeal::new(&Ideal::new(data.coords(), gens)?, s, r)?;
    let v = pullback_function_germ(h, data, s, m0, r)?;
    Ok(germ.contains(&v))
}

/// Dimension of the order-r germ ring of `Z` at `s`.
pub fn germ_quotient_dimension(z: &Ideal, s: &[Rational], r: usize) -> Result<usize> {
    Ok(GermIdeal::new(z, s, r)?.quotient_dimension())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfunc::ExactRatFunc;
    use crate::rational::frac;

    fn jet(d: usize, r: usize, rows: &[&[&[i64]]]) -> MatrixJet {
        // rows[i][j] = coefficients of entry (i, j) in the graded-lex basis
        let m = rows.len();
        let entries = rows
            .iter()
            .flat_map(|row| row.iter())
            .map(|cs| {
                let mut c: Vec<Rational> = cs.iter().map(|&x| int(x)).collect();
                c.resize(basis(d, r).len(), Rational::zero());
                TruncatedSeries::from_coeffs(d, r, c).unwrap()
            })
            .collect();
        MatrixJet::new(d, r, m, entries).unwrap()
    }

    #[test]
    fn hilbert_small() {
        assert_eq!(hilbert_count(5, 0), 1);
        assert_eq!(hilbert_count(1, 4), 5);
        assert_eq!(hilbert_count(2, 2), 6);
    }

    #[test]
    fn variety_membership() {
        let w = ConstraintVariety::parse(1, &["a_1_1 - 1"]).unwrap();
        assert!(jet_in_variety(&MatrixJet::identity(1, 2, 1), &w).unwrap());
        assert!(!jet_in_variety(&jet(1, 2, &[&[&[1, 1]]]), &w).unwrap());
        let full = ConstraintVariety::general_linear(1);
        assert!(jet_in_variety(&jet(1, 2, &[&[&[3, 1, 7]]]), &full).unwrap());
    }

    #[test]
    fn fixtures() {
        assert_eq!(ConstraintVariety::point_flag_stabilizer(&[1, 2]).unwrap(), ConstraintVariety::lower_left_zero());
        let p = ConstraintVariety::point_flag_stabilizer(&[1, 3]).unwrap();
        assert_eq!(p.equations().len(), 2);
        assert!(p.is_right_invariant(&[1, 3]).unwrap());
        assert!(ConstraintVariety::lower_left_zero().is_right_invariant(&[1, 2]).unwrap());
        assert!(ConstraintVariety::general_linear(2).is_right_invariant(&[1, 2]).unwrap());
        let not = ConstraintVariety::parse(2, &["a_1_2"]).unwrap();
        assert!(!not.is_right_invariant(&[1, 2]).unwrap());
    }

    #[test]
    fn orbit_examples() {
        let w = ConstraintVariety::lower_left_zero();
        let unipotent = jet(1, 1, &[&[&[1], &[0]], &[&[0, 1], &[1]]]);
        assert!(!in_gl_orbit(&unipotent, &w).unwrap().result);
        let constant = MatrixJet::constant(1, 1, &QMatrix::from_i64(&[&[1, 2], &[3, 4]]));
        let out = in_gl_orbit(&constant, &w).unwrap();
        assert!(out.result);
        let g = out.witness.unwrap();
        assert!(jet_in_variety(&constant.mul_const_left(&g).unwrap(), &w).unwrap());
        let any = jet(1, 2, &[&[&[2, 1, 1]]]);
        assert!(in_gl_orbit(&any, &ConstraintVariety::general_linear(1)).unwrap().result);
    }

    #[test]
    fn scale_guard() {
        let big = MatrixJet::identity(1, 3, 2);
        assert!(matches!(
            in_gl_orbit(&big, &ConstraintVariety::general_linear(2)),
            Err(Error::ScaleGuard(_))
        ));
    }

    #[test]
    fn constraint_test_examples() {
        let v = vars(["z"]);
        let zero = AlgebraicData::on_affine(&v, vec![vec![vec![ExactRatFunc::zero(&v)]]]).unwrap();
        let sigma = Jet::line(zero.chart(), &[int(1)], &[int(2)], 2).unwrap();
        let w = ConstraintVariety::parse(1, &["a_1_1 - 1"]).unwrap();
        assert!(constraint_test(&sigma, &zero, &w).unwrap().result);
        assert!(constraint_test_with(&sigma, &zero, &w, &QMatrix::from_i64(&[&[5]])).unwrap().result);

        // f' = Cᵗ f with C = E_12: alpha's lower-left entry moves with t.
        let mut conn = vec![vec![vec![ExactRatFunc::zero(&v)]; 2]; 2];
        conn[0][1][0] = ExactRatFunc::one(&v);
        let data = AlgebraicData::on_affine(&v, conn).unwrap();
        let sigma = Jet::line(data.chart(), &[int(0)], &[int(1)], 1).unwrap();
        assert!(!constraint_test(&sigma, &data, &ConstraintVariety::lower_left_zero()).unwrap().result);
        let m0 = QMatrix::from_i64(&[&[2, 1], &[1, 1]]);
        let out = constraint_test_with(&sigma, &data, &ConstraintVariety::lower_left_zero(), &m0).unwrap();
        assert!(!out.result);
    }

    #[test]
    fn germ_examples() {
        let v = vars(["z1", "z2"]);
        let z = Ideal::parse(&v, &["z2"]).unwrap();
        let origin = [int(0), int(0)];
        let germ = GermIdeal::new(&z, &origin, 2).unwrap();
        let vec_of = |e: &[u32]| {
            let b = basis(2, 2);
            let mut out = vec![Rational::zero(); b.len()];
            out[b.index_of(e).unwrap()] = Rational::one();
            out
        };
        assert!(germ.contains(&vec_of(&[0, 1])));
        assert!(!germ.contains(&vec_of(&[1, 0])));
        assert!(germ.contains(&vec_of(&[1, 1])));
        assert_eq!(germ.quotient_dimension(), 3);
        let curve = Ideal::parse(&v, &["z2 - z1^2"]).unwrap();
        assert_eq!(germ_quotient_dimension(&curve, &origin, 2).unwrap(), 3);
        assert_eq!(germ_quotient_dimension(&Ideal::zero(&v), &origin, 3).unwrap(), 10);
        assert!(matches!(
            GermIdeal::new(&z, &[int(0), frac(1, 2)], 2),
            Err(Error::PointNotOnVariety(_))
        ));
    }

    #[test]
    fn doc_round_trip() {
        let w = ConstraintVariety::parse(2, &["a_1_1*a_2_2 - a_2_1"]).unwrap();
        let text = serde_json::to_string(&w.to_doc()).unwrap();
        assert!(text.starts_with(r#"{"m":2,"equations":["#));
        let back: ConstraintVarietyDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(ConstraintVariety::from_doc(&back).unwrap(), w);
    }
}
