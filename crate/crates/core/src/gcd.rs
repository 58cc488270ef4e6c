//! Multivariate polynomial gcd over Q.
//!
//! The main path is the heuristic gcd: clear denominators, evaluate one
//! variable at a large integer, recurse, and rebuild the candidate from its
//! balanced base-ξ digits. A candidate is accepted only if it divides both
//! inputs. When the heuristic gives up the recursive primitive remainder
//! sequence is used instead.

use num::{BigInt, Integer, One, Signed, Zero};

use crate::poly::{ExactPoly, MonomialOrder};
use crate::rational::Rational;

/// The gcd of `a` and `b`, scaled so its grevlex leading coefficient is 1.
/// `gcd(0, 0) = 0`.
pub fn gcd(a: &ExactPoly, b: &ExactPoly) -> ExactPoly {
    let g = gcd_raw(a, b);
    g.monic(&MonomialOrder::grevlex())
}

fn one_like(p: &ExactPoly) -> ExactPoly {
    ExactPoly::one(p.vars())
}

fn gcd_raw(a: &ExactPoly, b: &ExactPoly) -> ExactPoly {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return one_like(a);
    }
    if a.num_terms() == 1 {
        return monomial_gcd(a, b);
    }
    if b.num_terms() == 1 {
        return monomial_gcd(b, a);
    }
    let sa = a.support();
    let sb = b.support();
    // A variable present in only one argument cannot occur in the gcd.
    if let Some(&v) = sa.iter().find(|v| !sb.contains(v)) {
        return gcd_with_coefficients(b, a, v);
    }
    if let Some(&v) = sb.iter().find(|v| !sa.contains(v)) {
        return gcd_with_coefficients(a, b, v);
    }
    let (small, large) = if a.num_terms() <= b.num_terms() {
        (a, b)
    } else {
        (b, a)
    };
    if large.divide_exact(small).is_some() {
        return small.clone();
    }

    if let Some(h) = heuristic_gcd(a, b) {
        return h;
    }

    let x = *sa
        .iter()
        .min_by_key(|&&v| (a.degree_in(v).max(b.degree_in(v)), v))
        .unwrap();
    let (ca, pa) = content_and_primitive(a, x);
    let (cb, pb) = content_and_primitive(b, x);
    let c = gcd_raw(&ca, &cb);

    let (mut f, mut g) = if pa.degree_in(x) >= pb.degree_in(x) {
        (pa, pb)
    } else {
        (pb, pa)
    };
    loop {
        let r = pseudo_remainder(&f, &g, x);
        if r.is_zero() {
            break;
        }
        if r.degree_in(x) == 0 {
            g = one_like(&g);
            break;
        }
        f = g;
        g = content_and_primitive(&r, x).1;
    }
    let g = content_and_primitive(&g, x).1;
    &c * &g
}

/// Scales `p` to an integer polynomial with coprime coefficients and a
/// positive lex-leading coefficient.
fn integer_primitive(p: &ExactPoly) -> ExactPoly {
    let mut den = BigInt::one();
    let mut num = BigInt::zero();
    for (_, c) in p.terms() {
        den = den.lcm(c.denom());
        num = num.gcd(c.numer());
    }
    if num.is_zero() {
        return p.clone();
    }
    let mut scale = Rational::new(den, num);
    if p.terms().next_back().unwrap().1.is_negative() {
        scale = -scale;
    }
    p.scale(&scale)
}

fn integer_content(p: &ExactPoly) -> BigInt {
    p.terms().fold(BigInt::zero(), |acc, (_, c)| acc.gcd(c.numer()))
}

fn max_norm(p: &ExactPoly) -> BigInt {
    p.terms()
        .map(|(_, c)| c.numer().abs())
        .max()
        .unwrap_or_else(BigInt::zero)
}

fn eval_var(p: &ExactPoly, x: usize, xi: &BigInt) -> ExactPoly {
    let vars = p.vars().clone();
    let mut powers: Vec<Rational> = vec![Rational::one()];
    let terms = p.terms().map(|(e, c)| {
        let k = e[x] as usize;
        while powers.len() <= k {
            let next = powers.last().unwrap() * Rational::from_integer(xi.clone());
            powers.push(next);
        }
        let mut e = e.clone();
        e[x] = 0;
        (e, c * &powers[k])
    });
    let terms: Vec<_> = terms.collect();
    ExactPoly::from_terms(&vars, terms)
}

/// Rebuilds a polynomial in `x` from its value at `x = xi`, reading the
/// integer coefficients as balanced base-xi expansions.
fn interpolate(h: &ExactPoly, x: usize, xi: &BigInt) -> ExactPoly {
    let vars = h.vars().clone();
    let half = xi / 2;
    let mut rest = h.clone();
    let mut out = Vec::new();
    let mut k = 0u32;
    while !rest.is_zero() {
        let digit: Vec<_> = rest
            .terms()
            .filter_map(|(e, c)| {
                let mut r = c.numer().mod_floor(xi);
                if r > half {
                    r -= xi;
                }
                (!r.is_zero()).then(|| (e.clone(), Rational::from_integer(r)))
            })
            .collect();
        let digit = ExactPoly::from_terms(&vars, digit);
        let inv = Rational::new(BigInt::one(), xi.clone());
        rest = (&rest - &digit).scale(&inv);
        for (e, c) in digit.into_terms() {
            let mut e = e;
            e[x] = k;
            out.push((e, c));
        }
        k += 1;
    }
    ExactPoly::from_terms(&vars, out)
}

fn heuristic_gcd(a: &ExactPoly, b: &ExactPoly) -> Option<ExactPoly> {
    let a = integer_primitive(a);
    let b = integer_primitive(b);
    let mut vars = a.support();
    for v in b.support() {
        if !vars.contains(&v) {
            vars.push(v);
        }
    }
    vars.sort_unstable();
    heuristic_rec(&a, &b, &vars).map(|h| integer_primitive(&h))
}

/// Integer gcd (with content) of integer polynomials in `vars`.
fn heuristic_rec(f: &ExactPoly, g: &ExactPoly, vars: &[usize]) -> Option<ExactPoly> {
    if f.is_zero() {
        return Some(g.clone());
    }
    if g.is_zero() {
        return Some(f.clone());
    }
    let Some((&x, rest)) = vars.split_last() else {
        let c = f.constant_term().numer().gcd(g.constant_term().numer());
        return Some(ExactPoly::constant(f.vars(), Rational::from_integer(c)));
    };
    let content = integer_content(f).gcd(&integer_content(g));
    let inv = Rational::new(BigInt::one(), content.clone());
    let (f, g) = (f.scale(&inv), g.scale(&inv));
    let bound = BigInt::from(2) * max_norm(&f).min(max_norm(&g)) + 29;
    let mut xi = bound;
    for _ in 0..6 {
        let ff = eval_var(&f, x, &xi);
        let gg = eval_var(&g, x, &xi);
        if !ff.is_zero() && !gg.is_zero() {
            if let Some(h) = heuristic_rec(&ff, &gg, rest) {
                let cand = integer_primitive(&interpolate(&h, x, &xi));
                if !cand.is_zero()
                    && f.divide_exact(&cand).is_some()
                    && g.divide_exact(&cand).is_some()
                {
                    return Some(cand.scale(&Rational::from_integer(content)));
                }
            }
        }
        xi = &xi * 73794u32 * xi.sqrt().sqrt() / 27011u32;
    }
    None
}

/// gcd(p, coefficients of q with respect to variable v).
fn gcd_with_coefficients(p: &ExactPoly, q: &ExactPoly, v: usize) -> ExactPoly {
    let mut g = p.clone();
    let mut coeffs = q.coefficients_in(v);
    coeffs.retain(|c| !c.is_zero());
    coeffs.sort_by_key(|c| c.num_terms());
    for c in coeffs {
        g = gcd_raw(&g, &c);
        if g.is_constant() {
            return one_like(p);
        }
    }
    g
}

fn monomial_gcd(mono: &ExactPoly, other: &ExactPoly) -> ExactPoly {
    let (e, _) = mono.terms().next().unwrap();
    let mut m = e.clone();
    for (f, _) in other.terms() {
        for (x, y) in m.iter_mut().zip(f) {
            *x = (*x).min(*y);
        }
    }
    ExactPoly::monomial(mono.vars(), m, num::One::one())
}

/// Content with respect to `x` (a polynomial free of `x`) and the primitive part.
fn content_and_primitive(p: &ExactPoly, x: usize) -> (ExactPoly, ExactPoly) {
    let mut coeffs = p.coefficients_in(x);
    coeffs.retain(|c| !c.is_zero());
    coeffs.sort_by_key(|c| c.num_terms());
    let mut content = ExactPoly::zero(p.vars());
    for c in &coeffs {
        content = gcd_raw(&content, c);
        if content.is_constant() {
            break;
        }
    }
    if content.is_constant() {
        // Normalize the leading coefficient in x to keep numbers tame.
        let lc = p.coefficients_in(x).pop().unwrap();
        let scale = lc.leading_term(&MonomialOrder::grevlex()).unwrap().1.clone();
        return (one_like(p), p.scale(&scale.recip()));
    }
    let content = content.monic(&MonomialOrder::grevlex());
    let prim = p
        .divide_exact(&content)
        .expect("content divides its polynomial");
    (content, prim)
}

/// Pseudo-remainder of `f` by `g` viewed as univariate polynomials in `x`.
pub(crate) fn pseudo_remainder(f: &ExactPoly, g: &ExactPoly, x: usize) -> ExactPoly {
    let gc = g.coefficients_in(x);
    let dg = gc.len() - 1;
    let lc = &gc[dg];
    let mut r = f.coefficients_in(x);
    while r.len() > dg {
        let dr = r.len() - 1;
        let lead = r[dr].clone();
        for c in r.iter_mut() {
            *c = &*c * lc;
        }
        for (k, gk) in gc.iter().enumerate() {
            r[k + dr - dg] -= &(&lead * gk);
        }
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    ExactPoly::from_coefficients_in(f.vars(), x, &r)
}
