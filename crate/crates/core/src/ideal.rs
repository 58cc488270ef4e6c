//! Ideals in Q[x1..xn] and reduced Gröbner bases.
//!
//! Buchberger's algorithm with the normal selection strategy, the coprime
//! and chain criteria, and full inter-reduction at the end. The reduced basis
//! is unique for a given ideal and order, so every derived operation here
//! (membership, elimination, saturation, emptiness) is deterministic.

use std::cmp::Ordering;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{
    add_exp, divides_exp, index_of, lcm_exp, sub_exp, BaseOrder, ExactPoly, Exponent,
    MonomialOrder, Vars,
};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ideal {
    vars: Vars,
    gens: Vec<ExactPoly>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    vars: Vars,
    order: MonomialOrder,
    basis: Vec<ExactPoly>,
}

impl Ideal {
    pub fn new(vars: &Vars, gens: impl IntoIterator<Item = ExactPoly>) -> Result<Self> {
        let mut out = Vec::new();
        for g in gens {
            if g.vars() != vars {
                return Err(Error::mismatch(vars, g.vars()));
            }
            if !g.is_zero() {
                out.push(g);
            }
        }
        Ok(Ideal {
            vars: vars.clone(),
            gens: out,
        })
    }

    pub fn zero(vars: &Vars) -> Self {
        Ideal {
            vars: vars.clone(),
            gens: Vec::new(),
        }
    }

    /// Convenience constructor from infix literals.
    pub fn parse(vars: &Vars, gens: &[&str]) -> Result<Self> {
        let polys = gens
            .iter()
            .map(|g| ExactPoly::parse(vars, g))
            .collect::<Result<Vec<_>>>()?;
        Self::new(vars, polys)
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn generators(&self) -> &[ExactPoly] {
        &self.gens
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn groebner(&self, order: &MonomialOrder) -> GroebnerBasis {
        buchberger(self, order)
    }

    pub fn contains(&self, f: &ExactPoly) -> Result<bool> {
        let gb = self.groebner(&MonomialOrder::grevlex());
        Ok(normal_form(f, &gb)?.is_zero())
    }

    /// True iff the ideal contains 1, i.e. the variety over the algebraic
    /// closure is empty.
    pub fn is_empty(&self) -> bool {
        is_empty(self)
    }

    /// Same ideal, compared through reduced grevlex bases.
    pub fn same_ideal(&self, other: &Ideal) -> bool {
        self.vars == other.vars
            && self.groebner(&MonomialOrder::grevlex()).basis
                == other.groebner(&MonomialOrder::grevlex()).basis
    }

    pub fn eliminate(&self, drop: &[&str]) -> Result<Ideal> {
        eliminate(self, drop)
    }

    pub fn saturate(&self, f: &ExactPoly) -> Result<Ideal> {
        saturate(self, f)
    }

    pub fn embed(&self, target: &Vars) -> Result<Ideal> {
        let gens = self
            .gens
            .iter()
            .map(|g| g.embed(target))
            .collect::<Result<Vec<_>>>()?;
        Ideal::new(target, gens)
    }
}

impl GroebnerBasis {
    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn basis(&self) -> &[ExactPoly] {
        &self.basis
    }

    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0].is_one()
    }

    pub fn to_ideal(&self) -> Ideal {
        Ideal {
            vars: self.vars.clone(),
            gens: self.basis.clone(),
        }
    }
}

/// A polynomial as a term list sorted by decreasing monomial order.
#[derive(Clone, Debug)]
struct Sorted {
    terms: Vec<(Exponent, Rational)>,
}

impl Sorted {
    fn from_poly(p: &ExactPoly, order: &MonomialOrder) -> Self {
        let mut terms: Vec<_> = p.terms().map(|(e, c)| (e.clone(), c.clone())).collect();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        Sorted { terms }
    }

    fn to_poly(&self, vars: &Vars) -> ExactPoly {
        ExactPoly::from_terms(vars, self.terms.iter().cloned())
    }

    fn lead(&self) -> &Exponent {
        &self.terms[0].0
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn make_monic(&mut self) {
        let inv = self.terms[0].1.recip();
        if !inv.is_one() {
            for t in &mut self.terms {
                t.1 *= &inv;
            }
        }
    }

    /// self - c * x^m * g, merging sorted term lists.
    fn sub_scaled(&self, c: &Rational, m: &[u32], g: &Sorted, order: &MonomialOrder) -> Sorted {
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let mut a = self.terms.iter().peekable();
        let mut b = g
            .terms
            .iter()
            .map(|(e, k)| (add_exp(e, m), -(k * c)))
            .peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => break,
                (Some(_), None) => out.push(a.next().unwrap().clone()),
                (None, Some(_)) => out.push(b.next().unwrap()),
                (Some(x), Some(y)) => match order.cmp(&x.0, &y.0) {
                    Ordering::Greater => out.push(a.next().unwrap().clone()),
                    Ordering::Less => out.push(b.next().unwrap()),
                    Ordering::Equal => {
                        let (e, k1) = a.next().unwrap();
                        let (_, k2) = b.next().unwrap();
                        let s = k1 + k2;
                        if !s.is_zero() {
                            out.push((e.clone(), s));
                        }
                    }
                },
            }
        }
        Sorted { terms: out }
    }
}

/// Fully reduces `f` modulo `basis`; the result has no term divisible by a
/// leading term of the basis.
fn reduce_full(f: &Sorted, basis: &[Sorted], order: &MonomialOrder) -> Sorted {
    let mut p = f.clone();
    let mut rem: Vec<(Exponent, Rational)> = Vec::new();
    while !p.is_zero() {
        let (le, lc) = p.terms[0].clone();
        match basis.iter().find(|g| divides_exp(g.lead(), &le)) {
            Some(g) => {
                let m = sub_exp(&le, g.lead());
                let c = &lc / &g.terms[0].1;
                p = p.sub_scaled(&c, &m, g, order);
            }
            None => {
                rem.push((le, lc));
                p.terms.remove(0);
            }
        }
    }
    Sorted { terms: rem }
}

fn s_polynomial(f: &Sorted, g: &Sorted, order: &MonomialOrder) -> Sorted {
    let l = lcm_exp(f.lead(), g.lead());
    let mf = sub_exp(&l, f.lead());
    let mg = sub_exp(&l, g.lead());
    let cf = f.terms[0].1.recip();
    let cg = g.terms[0].1.recip();
    let zero = Sorted { terms: Vec::new() };
    let a = zero.sub_scaled(&-cf, &mf, f, order);
    a.sub_scaled(&cg, &mg, g, order)
}

fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

/// The unique reduced Gröbner basis of `ideal` for `order`.
pub fn buchberger(ideal: &Ideal, order: &MonomialOrder) -> GroebnerBasis {
    let vars = ideal.vars.clone();
    let unit = |vars: &Vars| GroebnerBasis {
        vars: vars.clone(),
        order: order.clone(),
        basis: vec![ExactPoly::one(vars)],
    };
    let mut g: Vec<Sorted> = Vec::new();
    for p in &ideal.gens {
        let mut s = Sorted::from_poly(p, order);
        s.make_monic();
        if s.lead().iter().all(|&e| e == 0) {
            return unit(&vars);
        }
        g.push(s);
    }

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..g.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    while !pairs.is_empty() {
        // Normal strategy: smallest lcm first; ties broken by indices.
        let best = (0..pairs.len())
            .min_by(|&a, &b| {
                let (i, j) = pairs[a];
                let (k, l) = pairs[b];
                let la = lcm_exp(g[i].lead(), g[j].lead());
                let lb = lcm_exp(g[k].lead(), g[l].lead());
                order.cmp(&la, &lb).then((i, j).cmp(&(k, l)))
            })
            .unwrap();
        let (i, j) = pairs.remove(best);
        if coprime(g[i].lead(), g[j].lead()) {
            continue;
        }
        let l = lcm_exp(g[i].lead(), g[j].lead());
        let chain = (0..g.len()).any(|k| {
            k != i
                && k != j
                && divides_exp(g[k].lead(), &l)
                && !pairs.contains(&(i.min(k), i.max(k)))
                && !pairs.contains(&(j.min(k), j.max(k)))
        });
        if chain {
            continue;
        }
        let s = s_polynomial(&g[i], &g[j], order);
        let mut h = reduce_full(&s, &g, order);
        if h.is_zero() {
            continue;
        }
        h.make_monic();
        if h.lead().iter().all(|&e| e == 0) {
            return unit(&vars);
        }
        let n = g.len();
        g.push(h);
        for k in 0..n {
            pairs.push((k, n));
        }
    }

    // Minimalize, then inter-reduce.
    let mut minimal: Vec<Sorted> = Vec::new();
    for (idx, p) in g.iter().enumerate() {
        let redundant = g.iter().enumerate().any(|(k, q)| {
            k != idx
                && divides_exp(q.lead(), p.lead())
                && (q.lead() != p.lead() || k < idx)
        });
        if !redundant {
            minimal.push(p.clone());
        }
    }
    let mut reduced = Vec::with_capacity(minimal.len());
    for idx in 0..minimal.len() {
        let others: Vec<Sorted> = minimal
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != idx)
            .map(|(_, q)| q.clone())
            .collect();
        let head = Sorted {
            terms: vec![minimal[idx].terms[0].clone()],
        };
        let tail = Sorted {
            terms: minimal[idx].terms[1..].to_vec(),
        };
        let mut r = reduce_full(&tail, &others, order);
        r.terms.insert(0, head.terms[0].clone());
        r.make_monic();
        reduced.push(r);
    }
    reduced.sort_by(|a, b| order.cmp(b.lead(), a.lead()));
    GroebnerBasis {
        vars: vars.clone(),
        order: order.clone(),
        basis: reduced.iter().map(|s| s.to_poly(&vars)).collect(),
    }
}

/// Unique remainder of `f` modulo the reduced basis `gb`.
pub fn normal_form(f: &ExactPoly, gb: &GroebnerBasis) -> Result<ExactPoly> {
    if f.vars() != &gb.vars {
        return Err(Error::mismatch(f.vars(), &gb.vars));
    }
    let basis: Vec<Sorted> = gb
        .basis
        .iter()
        .map(|p| Sorted::from_poly(p, &gb.order))
        .collect();
    let r = reduce_full(&Sorted::from_poly(f, &gb.order), &basis, &gb.order);
    Ok(r.to_poly(&gb.vars))
}

/// Generators of `ideal ∩ Q[remaining variables]`, expressed over the
/// remaining variables.
pub fn eliminate(ideal: &Ideal, drop: &[&str]) -> Result<Ideal> {
    let drop_idx = drop
        .iter()
        .map(|d| index_of(&ideal.vars, d))
        .collect::<Result<Vec<_>>>()?;
    let keep_idx: Vec<usize> = (0..ideal.vars.len())
        .filter(|i| !drop_idx.contains(i))
        .collect();
    let keep_vars: Vars = keep_idx
        .iter()
        .map(|&i| ideal.vars[i].clone())
        .collect::<Vec<_>>()
        .into();
    let order = if drop_idx.is_empty() {
        MonomialOrder::grevlex()
    } else {
        MonomialOrder::block(BaseOrder::Grevlex, vec![drop_idx.clone(), keep_idx.clone()])
    };
    let gb = buchberger(ideal, &order);
    let gens = gb
        .basis
        .iter()
        .filter(|p| drop_idx.iter().all(|&i| p.degree_in(i) == 0))
        .map(|p| p.restrict(&keep_vars))
        .collect::<Result<Vec<_>>>()?;
    Ideal::new(&keep_vars, gens)
}

/// `ideal : f^∞`, via `ideal + <t f - 1>` with `t` eliminated.
pub fn saturate(ideal: &Ideal, f: &ExactPoly) -> Result<Ideal> {
    if f.is_zero() {
        return Err(Error::DivisionByZero);
    }
    if f.vars() != &ideal.vars {
        return Err(Error::mismatch(f.vars(), &ideal.vars));
    }
    if f.is_constant() {
        return Ok(ideal.clone());
    }
    let mut t = String::from("_t");
    while ideal.vars.contains(&t) {
        t.push('_');
    }
    let mut names = ideal.vars.to_vec();
    names.push(t.clone());
    let ext: Vars = names.into();
    let mut gens = ideal
        .gens
        .iter()
        .map(|g| g.embed(&ext))
        .collect::<Result<Vec<_>>>()?;
    let tf = &ExactPoly::var(&ext, &t)? * &f.embed(&ext)?;
    gens.push(&tf - &ExactPoly::one(&ext));
    eliminate(&Ideal::new(&ext, gens)?, &[t.as_str()])
}

pub fn is_empty(ideal: &Ideal) -> bool {
    buchberger(ideal, &MonomialOrder::grevlex()).is_unit()
}

/// `{ "vars": [...], "gens": [poly...] }`
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdealDoc {
    pub vars: Vec<String>,
    pub gens: Vec<ExactPoly>,
}

impl Serialize for Ideal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IdealDoc {
            vars: self.vars.to_vec(),
            gens: self.gens.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Ideal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = IdealDoc::deserialize(d)?;
        let vars: Vars = doc.vars.into();
        let gens = doc
            .gens
            .into_iter()
            .map(|g| if g.vars() == &vars { Ok(g) } else { g.embed(&vars) })
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ideal::new(&vars, gens).map_err(serde::de::Error::custom)
    }
}

/// Monomial order on the wire: `"grevlex"` or `"lex"`, optionally with
/// `{ "blocks": [[names...], ...] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderDoc {
    pub order: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<Vec<String>>>,
}

impl OrderDoc {
    pub fn from_order(order: &MonomialOrder, vars: &Vars) -> Self {
        OrderDoc {
            order: match order.base {
                BaseOrder::Lex => "lex".into(),
                BaseOrder::Grevlex => "grevlex".into(),
            },
            blocks: if order.blocks.is_empty() {
                None
            } else {
                Some(
                    order
                        .blocks
                        .iter()
                        .map(|b| b.iter().map(|&i| vars[i].clone()).collect())
                        .collect(),
                )
            },
        }
    }

    pub fn to_order(&self, vars: &Vars) -> Result<MonomialOrder> {
        let base = match self.order.as_str() {
            "lex" => BaseOrder::Lex,
            "grevlex" => BaseOrder::Grevlex,
            other => return Err(Error::Parse(format!("unknown monomial order {other:?}"))),
        };
        let blocks = match &self.blocks {
            None => Vec::new(),
            Some(bs) => {
                let blocks = bs
                    .iter()
                    .map(|b| b.iter().map(|n| index_of(vars, n)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let mut seen: Vec<usize> = blocks.iter().flatten().copied().collect();
                seen.sort_unstable();
                if seen != (0..vars.len()).collect::<Vec<_>>() {
                    return Err(Error::Parse(
                        "blocks must partition the variables".to_string(),
                    ));
                }
                blocks
            }
        };
        Ok(MonomialOrder { base, blocks })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroebnerDoc {
    pub vars: Vec<String>,
    #[serde(flatten)]
    pub order: OrderDoc,
    pub basis: Vec<ExactPoly>,
}

impl From<&GroebnerBasis> for GroebnerDoc {
    fn from(gb: &GroebnerBasis) -> Self {
        GroebnerDoc {
            vars: gb.vars.to_vec(),
            order: OrderDoc::from_order(&gb.order, &gb.vars),
            basis: gb.basis.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::vars;

    fn xy() -> Vars {
        vars(["x", "y"])
    }

    fn p(v: &Vars, s: &str) -> ExactPoly {
        ExactPoly::parse(v, s).unwrap()
    }

    #[test]
    fn single_pair_reduces_to_zero() {
        let v = xy();
        let i = Ideal::parse(&v, &["x^2 - y", "y^2"]).unwrap();
        let gb = i.groebner(&MonomialOrder::lex());
        assert_eq!(gb.basis(), &[p(&v, "x^2 - y"), p(&v, "y^2")]);
    }

    #[test]
    fn zero_ideal_has_empty_basis() {
        let gb = Ideal::zero(&xy()).groebner(&MonomialOrder::grevlex());
        assert!(gb.basis().is_empty());
    }

    #[test]
    fn inconsistent_system() {
        let i = Ideal::parse(&xy(), &["x", "x - 1"]).unwrap();
        assert!(i.groebner(&MonomialOrder::lex()).is_unit());
        assert!(i.is_empty());
    }

    #[test]
    fn normal_forms() {
        let v = xy();
        let gb = Ideal::parse(&v, &["x^2 - y", "y^2"])
            .unwrap()
            .groebner(&MonomialOrder::lex());
        assert!(normal_form(&p(&v, "x^4"), &gb).unwrap().is_zero());
        assert_eq!(normal_form(&p(&v, "y"), &gb).unwrap(), p(&v, "y"));
        let empty = Ideal::zero(&v).groebner(&MonomialOrder::lex());
        let f = p(&v, "3*x*y - 1");
        assert_eq!(normal_form(&f, &empty).unwrap(), f);
    }

    #[test]
    fn twisted_cubic() {
        let v = vars(["x", "y", "z"]);
        let i = Ideal::parse(&v, &["y - x^2", "z - x^3"]).unwrap();
        let e = i.eliminate(&["x"]).unwrap();
        let yz = vars(["y", "z"]);
        assert_eq!(e.vars(), &yz);
        assert!(e.same_ideal(&Ideal::parse(&yz, &["z^2 - y^3"]).unwrap()));
    }

    #[test]
    fn eliminate_nothing_and_everything() {
        let v = xy();
        let i = Ideal::parse(&v, &["x^2 + y", "x*y - 1"]).unwrap();
        assert!(i.eliminate(&[]).unwrap().same_ideal(&i));
        let line = Ideal::parse(&v, &["x - 1"]).unwrap();
        let proj = line.eliminate(&["x"]).unwrap();
        assert!(proj.is_zero_ideal());
    }

    #[test]
    fn saturation() {
        let v = xy();
        let i = Ideal::parse(&v, &["x*y"]).unwrap();
        let s = i.saturate(&p(&v, "x")).unwrap();
        assert!(s.same_ideal(&Ideal::parse(&v, &["y"]).unwrap()));
        assert!(i.saturate(&p(&v, "1")).unwrap().same_ideal(&i));
        let sq = Ideal::parse(&v, &["x^2"]).unwrap();
        assert!(sq.saturate(&p(&v, "x")).unwrap().is_empty());
    }

    #[test]
    fn emptiness_over_closure() {
        let x = vars(["x"]);
        assert!(!Ideal::parse(&x, &["x"]).unwrap().is_empty());
        assert!(!Ideal::parse(&x, &["x^2 + 1"]).unwrap().is_empty());
    }

    #[test]
    fn order_doc_round_trip() {
        let v = vars(["a", "b", "c"]);
        let doc: OrderDoc =
            serde_json::from_str(r#"{"order":"lex","blocks":[["c"],["a","b"]]}"#).unwrap();
        let o = doc.to_order(&v).unwrap();
        assert_eq!(o.blocks, vec![vec![2], vec![0, 1]]);
        let bad: OrderDoc = serde_json::from_str(r#"{"order":"lex","blocks":[["c"]]}"#).unwrap();
        assert!(bad.to_order(&v).is_err());
    }
}
