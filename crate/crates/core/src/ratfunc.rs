//! Reduced rational functions over Q.
//!
//! Canonical form: numerator and denominator coprime, denominator with
//! grevlex leading coefficient 1, zero stored as `0/1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::gcd::gcd;
use crate::poly::{index_of, ExactPoly, MonomialOrder, Vars};
use crate::rational::Rational;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactRatFunc {
    num: ExactPoly,
    den: ExactPoly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl ExactRatFunc {
    pub fn new(num: ExactPoly, den: ExactPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if num.vars() != den.vars() {
            return Err(Error::mismatch(num.vars(), den.vars()));
        }
        Ok(Self::reduce(num, den))
    }

    /// `num / ∏ factors` for irreducible `factors` (repeats allowed), cancelling
    /// by trial division instead of a gcd.
    pub fn from_factors(num: ExactPoly, factors: &[ExactPoly]) -> Result<Self> {
        if let Some(f) = factors.iter().find(|f| f.vars() != num.vars()) {
            return Err(Error::mismatch(num.vars(), f.vars()));
        }
        if factors.iter().any(ExactPoly::is_zero) {
            return Err(Error::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero(num.vars()));
        }
        let mut num = num;
        let mut den = ExactPoly::one(num.vars());
        for f in factors {
            match num.divide_exact(f) {
                Some(q) if !f.is_constant() => num = q,
                _ => den = &den * f,
            }
        }
        if den.is_constant() {
            return Ok(Self::from_poly(num.scale(&den.constant_term().recip())));
        }
        Ok(Self::normalize_unit(num, den))
    }

    pub fn from_poly(p: ExactPoly) -> Self {
        let den = ExactPoly::one(p.vars());
        ExactRatFunc { num: p, den }
    }

    pub fn constant(vars: &Vars, c: Rational) -> Self {
        Self::from_poly(ExactPoly::constant(vars, c))
    }

    pub fn zero(vars: &Vars) -> Self {
        Self::from_poly(ExactPoly::zero(vars))
    }

    pub fn one(vars: &Vars) -> Self {
        Self::from_poly(ExactPoly::one(vars))
    }

    pub fn parse(vars: &Vars, text: &str) -> Result<Self> {
        crate::parse::parse_ratfunc(vars, text)
    }

    pub fn num(&self) -> &ExactPoly {
        &self.num
    }

    pub fn den(&self) -> &ExactPoly {
        &self.den
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    fn reduce(num: ExactPoly, den: ExactPoly) -> Self {
        if num.is_zero() {
            let vars = num.vars().clone();
            return Self::zero(&vars);
        }
        if den.is_constant() {
            let c = den.constant_term().recip();
            return ExactRatFunc {
                num: num.scale(&c),
                den: ExactPoly::one(den.vars()),
            };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (
                num.divide_exact(&g).expect("gcd divides numerator"),
                den.divide_exact(&g).expect("gcd divides denominator"),
            )
        };
        Self::normalize_unit(num, den)
    }

    fn normalize_unit(num: ExactPoly, den: ExactPoly) -> Self {
        let lc = den
            .leading_term(&MonomialOrder::grevlex())
            .map(|(_, c)| c.clone())
            .unwrap();
        if lc.is_one() {
            ExactRatFunc { num, den }
        } else {
            let s = lc.recip();
            ExactRatFunc {
                num: num.scale(&s),
                den: den.scale(&s),
            }
        }
    }

    /// Checked field operation; fails on variable mismatch or division by 0.
    pub fn arith(a: &Self, b: &Self, op: RatOp) -> Result<Self> {
        if a.vars() != b.vars() {
            return Err(Error::mismatch(a.vars(), b.vars()));
        }
        Ok(match op {
            RatOp::Add => a + b,
            RatOp::Sub => a - b,
            RatOp::Mul => a * b,
            RatOp::Div => a.checked_div(b)?,
        })
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalize_unit(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars());
        }
        ExactRatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        // Powers of coprime polynomials stay coprime.
        ExactRatFunc {
            num: self.num.pow(n),
            den: self.den.pow(n),
        }
    }

    pub fn diff_at(&self, i: usize) -> Self {
        if self.den.is_one() {
            return Self::from_poly(self.num.diff_at(i));
        }
        let dn = self.num.diff_at(i);
        let dd = self.den.diff_at(i);
        if dd.is_zero() {
            return Self::reduce(dn, self.den.clone());
        }
        // (n/d)' = (n'd - nd')/d^2; any common factor with d^2 divides d.
        let top = &(&dn * &self.den) - &(&self.num * &dd);
        let g = gcd(&top, &self.den);
        let (top, d1) = if g.is_constant() {
            (top, self.den.clone())
        } else {
            (
                top.divide_exact(&g).unwrap(),
                self.den.divide_exact(&g).unwrap(),
            )
        };
        Self::reduce(top, &d1 * &self.den)
    }

    pub fn diff(&self, var: &str) -> Result<Self> {
        Ok(self.diff_at(index_of(self.vars(), var)?))
    }

    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        let d = self.den.eval(point);
        if d.is_zero() {
            return Err(Error::DenominatorVanishes);
        }
        Ok(self.num.eval(point) / d)
    }

    /// Composition: substitutes rational functions for the variables.
    pub fn substitute(&self, values: &[ExactRatFunc]) -> Result<ExactRatFunc> {
        let target = match values.first() {
            Some(v) => v.vars().clone(),
            None => return Ok(self.clone()),
        };
        if values.len() != self.num.nvars() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} variables",
                values.len(),
                self.num.nvars()
            )));
        }
        if let Some(v) = values.iter().find(|v| *v.vars() != target) {
            return Err(Error::mismatch(&target, v.vars()));
        }
        let lift = |c: &Rational| ExactRatFunc::constant(&target, c.clone());
        let n = self.num.evaluate(values, lift);
        let d = self.den.evaluate(values, lift);
        n.checked_div(&d)
    }

    pub fn embed(&self, target: &Vars) -> Result<ExactRatFunc> {
        Ok(ExactRatFunc {
            num: self.num.embed(target)?,
            den: self.den.embed(target)?,
        })
    }
}

impl<'a> Add<&'a ExactRatFunc> for &'a ExactRatFunc {
    type Output = ExactRatFunc;
    fn add(self, rhs: &'a ExactRatFunc) -> ExactRatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return ExactRatFunc::reduce(&self.num + &rhs.num, self.den.clone());
        }
        if self.den.is_one() {
            return ExactRatFunc {
                num: &(&self.num * &rhs.den) + &rhs.num,
                den: rhs.den.clone(),
            };
        }
        if rhs.den.is_one() {
            return ExactRatFunc {
                num: &self.num + &(&rhs.num * &self.den),
                den: self.den.clone(),
            };
        }
        let g = gcd(&self.den, &rhs.den);
        if g.is_constant() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            return ExactRatFunc::normalize_unit(num, &self.den * &rhs.den);
        }
        let ad = self.den.divide_exact(&g).unwrap();
        let bd = rhs.den.divide_exact(&g).unwrap();
        let num = &(&self.num * &bd) + &(&rhs.num * &ad);
        if num.is_zero() {
            return ExactRatFunc::zero(self.vars());
        }
        // Only factors of g can be shared with the new numerator.
        let h = gcd(&num, &g);
        if h.is_constant() {
            ExactRatFunc::normalize_unit(num, &self.den * &bd)
        } else {
            let num = num.divide_exact(&h).unwrap();
            let den = (&self.den * &bd).divide_exact(&h).unwrap();
            ExactRatFunc::normalize_unit(num, den)
        }
    }
}

impl<'a> Sub<&'a ExactRatFunc> for &'a ExactRatFunc {
    type Output = ExactRatFunc;
    fn sub(self, rhs: &'a ExactRatFunc) -> ExactRatFunc {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a ExactRatFunc> for &'a ExactRatFunc {
    type Output = ExactRatFunc;
    fn mul(self, rhs: &'a ExactRatFunc) -> ExactRatFunc {
        if self.is_zero() || rhs.is_zero() {
            return ExactRatFunc::zero(self.vars());
        }
        if self.den.is_one() && rhs.den.is_one() {
            return ExactRatFunc::from_poly(&self.num * &rhs.num);
        }
        let cancel = |n: &ExactPoly, d: &ExactPoly| -> (ExactPoly, ExactPoly) {
            if n.is_constant() || d.is_constant() {
                return (n.clone(), d.clone());
            }
            let g = gcd(n, d);
            if g.is_constant() {
                (n.clone(), d.clone())
            } else {
                (n.divide_exact(&g).unwrap(), d.divide_exact(&g).unwrap())
            }
        };
        let (n1, d2) = cancel(&self.num, &rhs.den);
        let (n2, d1) = cancel(&rhs.num, &self.den);
        ExactRatFunc::normalize_unit(&n1 * &n2, &d1 * &d2)
    }
}

impl Neg for &ExactRatFunc {
    type Output = ExactRatFunc;
    fn neg(self) -> ExactRatFunc {
        ExactRatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for ExactRatFunc {
    type Output = ExactRatFunc;
    fn neg(self) -> ExactRatFunc {
        -&self
    }
}

impl fmt::Display for ExactRatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for ExactRatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactRatFunc({self} in {:?})", &**self.vars())
    }
}

impl From<ExactPoly> for ExactRatFunc {
    fn from(p: ExactPoly) -> Self {
        Self::from_poly(p)
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct RatFuncDoc {
    num: ExactPoly,
    den: ExactPoly,
}

impl serde::Serialize for ExactRatFunc {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RatFuncDoc {
            num: self.num.clone(),
            den: self.den.clone(),
        }
        .serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for ExactRatFunc {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = RatFuncDoc::deserialize(d)?;
        ExactRatFunc::new(doc.num, doc.den).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars;
    use crate::rational::int;

    fn r(s: &str) -> ExactRatFunc {
        ExactRatFunc::parse(&vars(["x", "y"]), s).unwrap()
    }

    #[test]
    fn sum_of_reciprocals() {
        assert_eq!(&r("1/x") + &r("1/x"), r("2/x"));
    }

    #[test]
    fn cancels_common_factor() {
        let v = vars(["x", "y"]);
        let f = ExactRatFunc::new(
            ExactPoly::parse(&v, "x^2 - 1").unwrap(),
            ExactPoly::parse(&v, "x - 1").unwrap(),
        )
        .unwrap();
        assert_eq!(f, r("x + 1"));
        assert!(f.is_polynomial());
    }

    #[test]
    fn self_quotient_is_one() {
        let f = r("(x^2 + y)/(x - 3*y)");
        assert!(f.checked_div(&f).unwrap().is_one());
    }

    #[test]
    fn division_by_zero() {
        let z = ExactRatFunc::zero(&vars(["x", "y"]));
        assert_eq!(
            ExactRatFunc::arith(&r("x"), &z, RatOp::Div).unwrap_err(),
            Error::DivisionByZero
        );
    }

    #[test]
    fn denominator_is_monic() {
        let f = r("1/(2*x + 4)");
        assert!(f.den().leading_term(&MonomialOrder::grevlex()).unwrap().1.is_one());
        assert_eq!(f.num().constant_term(), crate::rational::frac(1, 2));
    }

    #[test]
    fn quotient_rule() {
        let f = r("x/(x + y)");
        assert_eq!(f.diff("x").unwrap(), r("y/(x + y)^2"));
        assert_eq!(r("1/(x+y)^2").diff("y").unwrap(), r("-2/(x+y)^3"));
    }

    #[test]
    fn evaluation() {
        let f = r("(x + 1)/(y - 2)");
        assert_eq!(f.eval(&[int(3), int(4)]).unwrap(), int(2));
        assert_eq!(
            f.eval(&[int(3), int(2)]).unwrap_err(),
            Error::DenominatorVanishes
        );
    }

    #[test]
    fn composition() {
        let f = r("1/x");
        let g = f.substitute(&[r("x + y"), r("y")]).unwrap();
        assert_eq!(g, r("1/(x + y)"));
    }
}
