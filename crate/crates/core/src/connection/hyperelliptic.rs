//! Gauss–Manin connection of the universal odd-degree hyperelliptic curve
//! `y^2 = R(x) = 4 ∏ (x − e_i)`, `i = 1..2g+1`, in the frame
//!
//! ```text
//! u_i     = x^(i−1) dx / y,       1 ≤ i ≤ g
//! u_(g+i) = R_i(x) dx / (4y),     R_i(x) = Σ_{k=i}^{2g+1−i} (k+1−i) λ_(k+1+i) x^k
//! ```
//!
//! where `R(x) = Σ λ_k x^k` and `λ_(2g+2) = 0`. In direction `∂/∂e_l` the
//! connection matrix is `[[α_lᵗ, γ_l], [β_l, −α_l]]` with
//!
//! ```text
//! α_l = −1/2 (U Rᵗ / R'(e_l) − M_l)
//! β_l = −2 U Uᵗ / R'(e_l)
//! γ_l = 1/8 (R Rᵗ / R'(e_l) − N_l)
//! ```
//!
//! evaluated at `x = e_l`, with `M_l` strictly lower triangular,
//! `(M_l)_ab = e_l^(a−b−1)`, and `Q_l` diagonal with `(Q_l)_kk = R_k(e_l) / e_l^k`.

use num::{One, Zero};

use crate::poly::{vars, ExactPoly, Vars};
use crate::ratfunc::ExactRatFunc;
use crate::rational::{frac, int, Rational};

use super::{AlgebraicData, Chart};
use crate::ideal::Ideal;

/// How the `N_l` term of the γ block is assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GammaCorrection {
    /// `N_l = e_l (Q_l M_l + M_lᵗ Q_l) + Q_l`. This is the ordering for
    /// which the connection is flat in every genus (checked for g ≤ 3).
    #[default]
    Flat,
    /// `N_l = e_l (M_l Q_l + Q_l M_lᵗ) + Q_l`, the ordering in the classical
    /// statement of the formula. Agrees with `Flat` for g = 1 and is not
    /// flat for g ≥ 2.
    Classical,
}

type PolyMatrix = Vec<Vec<ExactPoly>>;

fn zeros(v: &Vars, r: usize, c: usize) -> PolyMatrix {
    vec![vec![ExactPoly::zero(v); c]; r]
}

fn matmul(a: &PolyMatrix, b: &PolyMatrix) -> PolyMatrix {
    let v = a[0][0].vars().clone();
    let mut out = zeros(&v, a.len(), b[0].len());
    for (i, row) in a.iter().enumerate() {
        for (k, x) in row.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b[k].iter().enumerate() {
                out[i][j] += &(x * y);
            }
        }
    }
    out
}

fn transpose(a: &PolyMatrix) -> PolyMatrix {
    (0..a[0].len())
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

fn outer(u: &[ExactPoly], w: &[ExactPoly]) -> PolyMatrix {
    u.iter().map(|a| w.iter().map(|b| a * b).collect()).collect()
}

fn combine(a: &PolyMatrix, sa: &Rational, b: &PolyMatrix, sb: &Rational) -> PolyMatrix {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| {
            ra.iter()
                .zip(rb)
                .map(|(x, y)| &x.scale(sa) + &y.scale(sb))
                .collect()
        })
        .collect()
}

/// Polynomials in the e-variables describing the curve.
struct Curve {
    g: usize,
    vars: Vars,
    /// λ_0..λ_(2g+2), the last one zero.
    lambda: Vec<ExactPoly>,
}

impl Curve {
    fn new(g: usize) -> Self {
        let n = 2 * g + 1;
        let names: Vec<String> = (1..=n).map(|i| format!("e{i}")).collect();
        let ev = vars(names.iter().map(String::as_str));
        let mut with_x: Vec<String> = names.clone();
        with_x.push("x".into());
        let xv = vars(with_x.iter().map(String::as_str));
        let x = ExactPoly::var_at(&xv, n);
        let mut r = ExactPoly::constant(&xv, int(4));
        for i in 0..n {
            r = &r * &(&x - &ExactPoly::var_at(&xv, i));
        }
        let mut lambda: Vec<ExactPoly> = r
            .coefficients_in(n)
            .into_iter()
            .map(|c| c.restrict(&ev).expect("free of x"))
            .collect();
        lambda.resize(2 * g + 3, ExactPoly::zero(&ev));
        Curve { g, vars: ev, lambda }
    }

    fn e(&self, l: usize) -> ExactPoly {
        ExactPoly::var_at(&self.vars, l)
    }

    /// R_i(e_l) for 1 ≤ i ≤ g.
    fn r_i_at(&self, i: usize, l: usize) -> ExactPoly {
        let e = self.e(l);
        let mut acc = ExactPoly::zero(&self.vars);
        for k in i..=(2 * self.g + 1 - i) {
            let coeff = &self.lambda[k + 1 + i];
            if coeff.is_zero() {
                continue;
            }
            acc += &(&coeff.scale(&int((k + 1 - i) as i64)) * &e.pow(k as u32));
        }
        acc
    }

    /// R'(e_l) = 4 ∏_{i≠l} (e_l − e_i).
    fn r_prime_at(&self, l: usize) -> ExactPoly {
        let e = self.e(l);
        let mut acc = ExactPoly::constant(&self.vars, int(4));
        for i in 0..(2 * self.g + 1) {
            if i != l {
                acc = &acc * &(&e - &self.e(i));
            }
        }
        acc
    }

    /// The 2g×2g connection matrix in direction e_l.
    fn direction(&self, l: usize, variant: GammaCorrection) -> Vec<Vec<ExactRatFunc>> {
        let g = self.g;
        let v = &self.vars;
        let e = self.e(l);
        let rp = self.r_prime_at(l);
        let u: Vec<ExactPoly> = (0..g).map(|i| e.pow(i as u32)).collect();
        let rv: Vec<ExactPoly> = (1..=g).map(|i| self.r_i_at(i, l)).collect();

        let mut m = zeros(v, g, g);
        for a in 0..g {
            for b in 0..a {
                m[a][b] = e.pow((a - b - 1) as u32);
            }
        }
        let mut q = zeros(v, g, g);
        for k in 0..g {
            q[k][k] = rv[k]
                .divide_exact(&e.pow(k as u32 + 1))
                .expect("R_k(x) is divisible by x^k");
        }
        let mt = transpose(&m);
        let sym = match variant {
            GammaCorrection::Flat => combine(&matmul(&q, &m), &Rational::one(), &matmul(&mt, &q), &Rational::one()),
            GammaCorrection::Classical => combine(&matmul(&m, &q), &Rational::one(), &matmul(&q, &mt), &Rational::one()),
        };
        let nmat: PolyMatrix = sym
            .iter()
            .zip(&q)
            .map(|(rs, rq)| rs.iter().zip(rq).map(|(s, qq)| &(&e * s) + qq).collect())
            .collect();

        // Numerators over R'(e_l): α = (−1/2 U Rᵗ + 1/2 R' M) / R', etc.
        let rp_times = |a: &PolyMatrix| -> PolyMatrix {
            a.iter().map(|row| row.iter().map(|x| x * &rp).collect()).collect()
        };
        let alpha = combine(&outer(&u, &rv), &frac(-1, 2), &rp_times(&m), &frac(1, 2));
        let beta = combine(&outer(&u, &u), &int(-2), &zeros(v, g, g), &Rational::zero());
        let gamma = combine(&outer(&rv, &rv), &frac(1, 8), &rp_times(&nmat), &frac(-1, 8));
        let alpha_t = transpose(&alpha);

        let mut factors = vec![ExactPoly::constant(v, int(4))];
        factors.extend((0..2 * g + 1).filter(|&i| i != l).map(|i| &e - &self.e(i)));
        let entry =
            |p: &ExactPoly| ExactRatFunc::from_factors(p.clone(), &factors).expect("R' is nonzero");
        let mut out = vec![Vec::with_capacity(2 * g); 2 * g];
        for i in 0..g {
            for j in 0..g {
                out[i].push(entry(&alpha_t[i][j]));
            }
            for j in 0..g {
                out[i].push(entry(&gamma[i][j]));
            }
            for j in 0..g {
                out[g + i].push(entry(&beta[i][j]));
            }
            for j in 0..g {
                out[g + i].push(entry(&-&alpha[i][j]));
            }
        }
        out
    }

    fn chart(&self) -> Chart {
        let n = 2 * self.g + 1;
        let mut inverted: Vec<ExactPoly> = (0..n).map(|l| self.r_prime_at(l)).collect();
        for i in 0..n {
            for j in i + 1..n {
                inverted.push(&self.e(i) - &self.e(j));
            }
        }
        inverted.extend((0..n).map(|l| self.e(l)));
        Chart::new(&self.vars, Ideal::zero(&self.vars), inverted).expect("consistent variables")
    }
}

/// Connection data of the genus-g family, with the flat γ block.
pub fn hyperelliptic_data(g: usize) -> AlgebraicData {
    hyperelliptic_data_with(g, GammaCorrection::Flat)
}

pub fn hyperelliptic_data_with(g: usize, variant: GammaCorrection) -> AlgebraicData {
    assert!(g >= 1, "genus must be positive");
    let curve = Curve::new(g);
    let m = 2 * g;
    let n = 2 * g + 1;
    let per_direction: Vec<_> = (0..n).map(|l| curve.direction(l, variant)).collect();
    let connection = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| (0..n).map(|l| per_direction[l][i][j].clone()).collect())
                .collect()
        })
        .collect();
    AlgebraicData::new(curve.chart(), m, vec![g, m], connection).expect("well-formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{curvature, validate};

    fn rf(v: &Vars, s: &str) -> ExactRatFunc {
        ExactRatFunc::parse(v, s).unwrap()
    }

    #[test]
    fn genus_one_blocks() {
        let data = hyperelliptic_data(1);
        let v = data.coords().clone();
        let rp = "(4*(e1 - e2)*(e1 - e3))";
        // β = −2/R'(e1), α = −2 e1/R'(e1) and the lower-right entry is −α.
        assert_eq!(data.coeff(1, 0, 0), &rf(&v, &format!("-2/{rp}")));
        assert_eq!(data.coeff(0, 0, 0), &rf(&v, &format!("-2*e1/{rp}")));
        assert_eq!(data.coeff(1, 1, 0), &rf(&v, &format!("2*e1/{rp}")));
        // γ = (R_1(e1)^2/R' − N)/8 with R_1 = 4x and N = Q = 4.
        assert_eq!(data.coeff(0, 1, 0), &rf(&v, &format!("(16*e1^2/{rp} - 4)/8")));
    }

    #[test]
    fn genus_one_r1_is_4x() {
        let c = Curve::new(1);
        assert_eq!(c.r_i_at(1, 0), ExactPoly::parse(&c.vars, "4*e1").unwrap());
        assert!(c.lambda[4].is_zero());
        assert_eq!(c.lambda[3], ExactPoly::parse(&c.vars, "4").unwrap());
    }

    #[test]
    fn genus_one_is_flat_and_valid() {
        let data = hyperelliptic_data(1);
        assert!(curvature(&data).is_zero());
        assert!(validate(&data).is_empty());
        assert_eq!(
            hyperelliptic_data_with(1, GammaCorrection::Classical),
            data
        );
    }

    #[test]
    fn shapes_up_to_genus_three() {
        for g in 1..=3 {
            let data = hyperelliptic_data(g);
            assert_eq!(data.rank(), 2 * g);
            assert_eq!(data.filtration(), &[g, 2 * g]);
            assert_eq!(data.dim(), 2 * g + 1);
            let n = 2 * g + 1;
            assert_eq!(data.chart().inverted().len(), n + n * (n - 1) / 2 + n);
        }
    }
}
