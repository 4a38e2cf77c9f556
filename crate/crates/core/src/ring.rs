//! Truncated arithmetic in the node, relative node and cusp rings.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::coeff::CoeffAlgebra;
use crate::error::{Error, Result};
use crate::poly::{Poly, Q};

/// Canonical monomial `x^x y^y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveMono {
    pub x: u32,
    pub y: u32,
}

impl CurveMono {
    pub const ONE: CurveMono = CurveMono { x: 0, y: 0 };

    pub fn new(x: u32, y: u32) -> Self {
        CurveMono { x, y }
    }

    pub fn degree(&self) -> u32 {
        self.x + self.y
    }
}

impl fmt::Display for CurveMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part = |v: &str, e: u32| match e {
            0 => String::new(),
            1 => v.to_string(),
            _ => format!("{v}^{e}"),
        };
        match (self.x, self.y) {
            (0, 0) => write!(f, "1"),
            (a, 0) => write!(f, "{}", part("x", a)),
            (0, b) => write!(f, "{}", part("y", b)),
            (a, b) => write!(f, "{}*{}", part("x", a), part("y", b)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveKind {
    /// `xy = 0`
    NodeAbsolute,
    /// `xy = base` with `base` in the coefficient algebra.
    NodeRelative { base: Poly },
    /// `x^2 = y^3`
    Cusp,
}

/// Curve ring with coefficients and an x,y-degree truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveRing {
    kind: CurveKind,
    coeff: Arc<CoeffAlgebra>,
    trunc: u32,
}

impl CurveRing {
    fn build(kind: CurveKind, coeff: Arc<CoeffAlgebra>, trunc: u32) -> Result<Arc<Self>> {
        if trunc < 2 {
            return Err(Error::InvalidInput("truncation must be at least 2".into()));
        }
        Ok(Arc::new(CurveRing { kind, coeff, trunc }))
    }

    pub fn node(coeff: Arc<CoeffAlgebra>, trunc: u32) -> Result<Arc<Self>> {
        Self::build(CurveKind::NodeAbsolute, coeff, trunc)
    }

    pub fn cusp(coeff: Arc<CoeffAlgebra>, trunc: u32) -> Result<Arc<Self>> {
        Self::build(CurveKind::Cusp, coeff, trunc)
    }

    /// Relative node with `xy` equal to the named coefficient parameter.
    pub fn node_relative(coeff: Arc<CoeffAlgebra>, base_param: &str, trunc: u32) -> Result<Arc<Self>> {
        let base = coeff.param(base_param)?;
        Self::build(CurveKind::NodeRelative { base }, coeff, trunc)
    }

    /// Relative node with `xy` equal to an arbitrary coefficient.
    pub fn node_relative_at(coeff: Arc<CoeffAlgebra>, base: Poly, trunc: u32) -> Result<Arc<Self>> {
        let base = coeff.normalize(base.map_used_into(coeff.ring())?);
        Self::build(CurveKind::NodeRelative { base }, coeff, trunc)
    }

    pub fn kind(&self) -> &CurveKind {
        &self.kind
    }

    pub fn coeff(&self) -> &Arc<CoeffAlgebra> {
        &self.coeff
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn is_node(&self) -> bool {
        !matches!(self.kind, CurveKind::Cusp)
    }

    /// Same ring with another truncation.
    pub fn with_trunc(&self, trunc: u32) -> Result<Arc<Self>> {
        Self::build(self.kind.clone(), self.coeff.clone(), trunc)
    }

    /// Same curve over another coefficient algebra (relative base mapped by name).
    pub fn with_coeff(&self, coeff: Arc<CoeffAlgebra>, base: Option<Poly>) -> Result<Arc<Self>> {
        let kind = match (&self.kind, base) {
            (CurveKind::NodeRelative { .. }, Some(b)) => {
                CurveKind::NodeRelative { base: coeff.normalize(b.map_used_into(coeff.ring())?) }
            }
            (CurveKind::NodeRelative { base }, None) => {
                CurveKind::NodeRelative { base: coeff.normalize(base.map_used_into(coeff.ring())?) }
            }
            (k, _) => k.clone(),
        };
        Self::build(kind, coeff, self.trunc)
    }

    /// Canonical monomials of degree below `trunc`, in increasing degree then decreasing x.
    pub fn monomials_below(&self, trunc: u32) -> Vec<CurveMono> {
        let mut out = Vec::new();
        for d in 0..trunc {
            match self.kind {
                CurveKind::Cusp => {
                    if d >= 1 {
                        out.push(CurveMono::new(1, d - 1));
                    }
                    out.push(CurveMono::new(0, d));
                }
                _ => {
                    if d == 0 {
                        out.push(CurveMono::ONE);
                    } else {
                        out.push(CurveMono::new(d, 0));
                        out.push(CurveMono::new(0, d));
                    }
                }
            }
        }
        out
    }

    /// Rewrite `x^a y^b` to a canonical monomial times a power of the relative base.
    pub(crate) fn rewrite(&self, a: u32, b: u32) -> Option<(CurveMono, u32)> {
        match self.kind {
            CurveKind::NodeAbsolute => {
                if a > 0 && b > 0 {
                    None
                } else {
                    Some((CurveMono::new(a, b), 0))
                }
            }
            CurveKind::NodeRelative { .. } => {
                let k = a.min(b);
                Some((CurveMono::new(a - k, b - k), k))
            }
            CurveKind::Cusp => Some((CurveMono::new(a % 2, b + 3 * (a / 2)), 0)),
        }
    }

    /// Canonical terms of a formal polynomial, keeping degrees below `trunc`.
    pub(crate) fn canonical_terms<I>(&self, raw: I, trunc: u32) -> Vec<(CurveMono, Poly)>
    where
        I: IntoIterator<Item = ((u32, u32), Poly)>,
    {
        self.canonical_terms_cached(raw, trunc, &mut vec![self.coeff.one()])
    }

    /// As [`CurveRing::canonical_terms`], reusing powers of the base parameter across calls.
    pub(crate) fn canonical_terms_cached<I>(&self, raw: I, trunc: u32, base_powers: &mut Vec<Poly>) -> Vec<(CurveMono, Poly)>
    where
        I: IntoIterator<Item = ((u32, u32), Poly)>,
    {
        let mut acc: BTreeMap<CurveMono, Poly> = BTreeMap::new();
        if base_powers.is_empty() {
            base_powers.push(self.coeff.one());
        }
        for ((a, b), c) in raw {
            let Some((m, k)) = self.rewrite(a, b) else { continue };
            if m.degree() >= trunc {
                continue;
            }
            let mut c = self.coeff.normalize(c);
            if k > 0 {
                let CurveKind::NodeRelative { base } = &self.kind else { unreachable!() };
                while base_powers.len() <= k as usize {
                    let next = self.coeff.mul(base_powers.last().unwrap(), base);
                    base_powers.push(next);
                }
                c = self.coeff.mul(&c, &base_powers[k as usize]);
            }
            if c.is_zero() {
                continue;
            }
            let e = acc.entry(m).or_insert_with(|| self.coeff.zero());
            *e = &*e + &c;
        }
        let mut terms: Vec<(CurveMono, Poly)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| b.0.x.cmp(&a.0.x).then(b.0.y.cmp(&a.0.y)));
        terms
    }
}

/// Canonical truncated element of a curve ring.
#[derive(Clone, Debug)]
pub struct RingElement {
    ring: Arc<CurveRing>,
    terms: Vec<(CurveMono, Poly)>,
}

impl PartialEq for RingElement {
    fn eq(&self, other: &Self) -> bool {
        same_curve(&self.ring, &other.ring) && self.terms == other.terms
    }
}

impl Eq for RingElement {}

pub(crate) fn same_curve(a: &Arc<CurveRing>, b: &Arc<CurveRing>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

/// Canonical form of a formal bivariate polynomial.
pub fn reduce_normal_form<I>(raw: I, ring: &Arc<CurveRing>) -> RingElement
where
    I: IntoIterator<Item = ((u32, u32), Poly)>,
{
    let terms = ring.canonical_terms(raw, ring.trunc);
    RingElement { ring: ring.clone(), terms }
}

impl RingElement {
    pub fn zero(ring: &Arc<CurveRing>) -> Self {
        RingElement { ring: ring.clone(), terms: Vec::new() }
    }

    pub fn constant(ring: &Arc<CurveRing>, c: Poly) -> Self {
        reduce_normal_form([((0, 0), c)], ring)
    }

    pub fn one(ring: &Arc<CurveRing>) -> Self {
        Self::constant(ring, ring.coeff.one())
    }

    /// `c * x^a * y^b` with a rational coefficient.
    pub fn monomial(ring: &Arc<CurveRing>, a: u32, b: u32, c: Q) -> Self {
        reduce_normal_form([((a, b), ring.coeff.scalar(c))], ring)
    }

    pub fn x(ring: &Arc<CurveRing>) -> Self {
        Self::monomial(ring, 1, 0, Q::one())
    }

    pub fn y(ring: &Arc<CurveRing>) -> Self {
        Self::monomial(ring, 0, 1, Q::one())
    }

    pub fn ring(&self) -> &Arc<CurveRing> {
        &self.ring
    }

    pub fn terms(&self) -> &[(CurveMono, Poly)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: CurveMono) -> Poly {
        self.terms
            .iter()
            .find(|(k, _)| *k == m)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| self.ring.coeff.zero())
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    /// Smallest degree of a term.
    pub fn order(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).min()
    }

    pub(crate) fn raw(&self) -> impl Iterator<Item = ((u32, u32), Poly)> + '_ {
        self.terms.iter().map(|(m, c)| ((m.x, m.y), c.clone()))
    }

    fn check(&self, other: &RingElement) -> Result<()> {
        if same_curve(&self.ring, &other.ring) {
            Ok(())
        } else {
            Err(Error::RingMismatch)
        }
    }

    pub fn add(&self, other: &RingElement) -> Result<RingElement> {
        self.check(other)?;
        Ok(reduce_normal_form(self.raw().chain(other.raw()), &self.ring))
    }

    pub fn sub(&self, other: &RingElement) -> Result<RingElement> {
        self.check(other)?;
        Ok(reduce_normal_form(self.raw().chain(other.raw().map(|(m, c)| (m, -&c))), &self.ring))
    }

    pub fn neg(&self) -> RingElement {
        RingElement {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn mul(&self, other: &RingElement) -> Result<RingElement> {
        self.check(other)?;
        let coeff = &self.ring.coeff;
        let mut raw = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                raw.push(((ma.x + mb.x, ma.y + mb.y), coeff.mul(ca, cb)));
            }
        }
        Ok(reduce_normal_form(raw, &self.ring))
    }

    pub fn pow(&self, e: u32) -> Result<RingElement> {
        let mut out = RingElement::one(&self.ring);
        for _ in 0..e {
            out = out.mul(self)?;
        }
        Ok(out)
    }

    /// Multiply by a coefficient.
    pub fn scale(&self, c: &Poly) -> Result<RingElement> {
        let c = c.map_used_into(self.ring.coeff.ring())?;
        let coeff = &self.ring.coeff;
        Ok(reduce_normal_form(self.raw().map(|(m, a)| (m, coeff.mul(&a, &c))), &self.ring))
    }

    pub fn scale_q(&self, c: &Q) -> RingElement {
        if c.is_zero() {
            return RingElement::zero(&self.ring);
        }
        RingElement {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (*m, a.scale(c))).collect(),
        }
    }

    /// Evaluate coefficient variables and re-canonicalize in `target`.
    pub fn substitute(
        &self,
        target: &Arc<CurveRing>,
        assignment: &BTreeMap<String, Poly>,
    ) -> Result<RingElement> {
        let coeff = target.coeff();
        let mut raw = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            raw.push(((m.x, m.y), coeff.evaluate(c, assignment)?));
        }
        Ok(reduce_normal_form(raw, target))
    }

    /// Rational coefficients, if every coefficient is a constant.
    pub fn rational_terms(&self) -> Option<Vec<(CurveMono, Q)>> {
        self.terms
            .iter()
            .map(|(m, c)| c.constant_value().map(|q| (*m, q)))
            .collect()
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered = self.terms.clone();
        ordered.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then(b.0.x.cmp(&a.0.x)));
        for (k, (m, c)) in ordered.iter().enumerate() {
            let cs = c.to_string();
            let simple = c.len() == 1;
            let (neg, body) = if simple && cs.starts_with('-') {
                (true, cs[1..].to_string())
            } else {
                (false, if simple { cs } else { format!("({cs})") })
            };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            match (body.as_str(), *m == CurveMono::ONE) {
                (b, true) => write!(f, "{b}")?,
                ("1", false) => write!(f, "{m}")?,
                (b, false) => write!(f, "{b}*{m}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q, qr};

    fn node() -> Arc<CurveRing> {
        CurveRing::node(CoeffAlgebra::rationals(), 10).unwrap()
    }

    fn cusp() -> Arc<CurveRing> {
        CurveRing::cusp(CoeffAlgebra::rationals(), 10).unwrap()
    }

    #[test]
    fn defining_relations() {
        let n = node();
        assert!(RingElement::x(&n).mul(&RingElement::y(&n)).unwrap().is_zero());
        let c = cusp();
        let x = RingElement::x(&c);
        assert_eq!(x.mul(&x).unwrap(), RingElement::monomial(&c, 0, 3, q(1)));
        assert_eq!(x.pow(3).unwrap(), RingElement::monomial(&c, 1, 3, q(1)));
        assert!(x.add(&x.neg()).unwrap().is_zero());
    }

    #[test]
    fn relative_rewriting() {
        let s = CoeffAlgebra::free_poly(&["s"]).unwrap();
        let r = CurveRing::node_relative(s.clone(), "s", 10).unwrap();
        let e = RingElement::monomial(&r, 2, 2, q(1));
        assert_eq!(e.to_string(), "s^2");
        let f = RingElement::monomial(&r, 3, 1, q(1));
        assert_eq!(f.to_string(), "s*x^2");
    }

    #[test]
    fn substitution_into_artin() {
        let free = CoeffAlgebra::free_poly(&["b", "c"]).unwrap();
        let src = CurveRing::node(free.clone(), 8).unwrap();
        let bc = RingElement::constant(&src, &free.param("b").unwrap() * &free.param("c").unwrap());
        let s = CoeffAlgebra::uv_cubed();
        let dst = CurveRing::node(s.clone(), 8).unwrap();
        let mut asg = BTreeMap::new();
        asg.insert("b".to_string(), s.param("u").unwrap());
        asg.insert("c".to_string(), s.param("v").unwrap());
        assert_eq!(bc.substitute(&dst, &asg).unwrap().to_string(), "u*v");
        asg.remove("c");
        assert_eq!(bc.substitute(&dst, &asg), Err(Error::UnassignedVariable("c".into())));
    }

    #[test]
    fn rational_substitution() {
        let free = CoeffAlgebra::free_poly(&["d"]).unwrap();
        let src = CurveRing::node(free.clone(), 8).unwrap();
        let e = RingElement::y(&src).add(&RingElement::x(&src).scale(&free.param("d").unwrap()).unwrap()).unwrap();
        let dst = node().with_trunc(8).unwrap();
        let mut asg = BTreeMap::new();
        asg.insert("d".to_string(), CoeffAlgebra::rationals().scalar(qr(2, 3)));
        assert_eq!(e.substitute(&dst, &asg).unwrap().to_string(), "2/3*x + y");
    }

    #[test]
    fn mismatch_is_an_error() {
        let a = RingElement::x(&node());
        let b = RingElement::x(&cusp());
        assert_eq!(a.mul(&b), Err(Error::RingMismatch));
    }
}
