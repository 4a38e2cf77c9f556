//! Sparse multivariate polynomials over the rationals on named variables.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar.
pub type Q = BigRational;

/// Integer as a rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `n / d` as a rational.
pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Term order on exponent vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    GradedRevLex,
    Lex,
    /// The first `split` variables are compared first (grevlex inside each block).
    Block { split: usize },
}

/// Exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<u16>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exps(exps: Vec<u16>) -> Self {
        Monomial(exps)
    }

    pub fn exps(&self) -> &[u16] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self` when `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Option<Monomial> {
        if !self.divides(other) {
            return None;
        }
        Some(Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect()))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Bit set of variables with positive exponent.
    pub fn support(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .fold(0u64, |acc, (i, _)| acc | (1u64 << i))
    }
}

fn grevlex(a: &[u16], b: &[u16]) -> Ordering {
    let da: u32 = a.iter().map(|&e| e as u32).sum();
    let db: u32 = b.iter().map(|&e| e as u32).sum();
    da.cmp(&db).then_with(|| {
        for (x, y) in a.iter().zip(b).rev() {
            if x != y {
                return y.cmp(x);
            }
        }
        Ordering::Equal
    })
}

/// Variable names together with a term order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyRing {
    names: Vec<String>,
    order: MonomialOrder,
}

impl PolyRing {
    pub fn new<S: AsRef<str>>(names: &[S], order: MonomialOrder) -> Result<Arc<Self>> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        let mut seen = BTreeSet::new();
        for n in &names {
            if n.is_empty() || !seen.insert(n.as_str()) {
                return Err(Error::InvalidInput(format!("bad or repeated variable name {n:?}")));
            }
        }
        if let MonomialOrder::Block { split } = order {
            if split > names.len() {
                return Err(Error::InvalidInput("block split exceeds variable count".into()));
            }
        }
        Ok(Arc::new(PolyRing { names, order }))
    }

    pub fn grevlex<S: AsRef<str>>(names: &[S]) -> Result<Arc<Self>> {
        Self::new(names, MonomialOrder::GradedRevLex)
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match self.order {
            MonomialOrder::GradedRevLex => grevlex(&a.0, &b.0),
            MonomialOrder::Lex => a.0.cmp(&b.0),
            MonomialOrder::Block { split } => grevlex(&a.0[..split], &b.0[..split])
                .then_with(|| grevlex(&a.0[split..], &b.0[split..])),
        }
    }

    pub fn zero(self: &Arc<Self>) -> Poly {
        Poly { ring: self.clone(), terms: Vec::new() }
    }

    pub fn constant(self: &Arc<Self>, c: Q) -> Poly {
        Poly::from_terms(self, vec![(Monomial::one(self.nvars()), c)])
    }

    pub fn one(self: &Arc<Self>) -> Poly {
        self.constant(Q::one())
    }

    pub fn var(self: &Arc<Self>, i: usize) -> Poly {
        Poly::from_terms(self, vec![(Monomial::var(self.nvars(), i), Q::one())])
    }

    pub fn var_named(self: &Arc<Self>, name: &str) -> Result<Poly> {
        let i = self
            .index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(self.var(i))
    }
}

/// Polynomial with terms sorted by decreasing term order.
#[derive(Clone, Debug)]
pub struct Poly {
    ring: Arc<PolyRing>,
    terms: Vec<(Monomial, Q)>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && same_ring(&self.ring, &other.ring)
    }
}

impl Eq for Poly {}

pub(crate) fn same_ring(a: &Arc<PolyRing>, b: &Arc<PolyRing>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl Poly {
    pub fn from_terms(ring: &Arc<PolyRing>, terms: Vec<(Monomial, Q)>) -> Poly {
        let mut acc: BTreeMap<Monomial, Q> = BTreeMap::new();
        for (m, c) in terms {
            debug_assert_eq!(m.0.len(), ring.nvars());
            if c.is_zero() {
                continue;
            }
            let e = acc.entry(m).or_insert_with(Q::zero);
            *e += c;
        }
        let mut terms: Vec<(Monomial, Q)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| ring.cmp(&b.0, &a.0));
        Poly { ring: ring.clone(), terms }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn terms(&self) -> &[(Monomial, Q)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn leading(&self) -> Option<&(Monomial, Q)> {
        self.terms.first()
    }

    pub fn lm(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.0)
    }

    pub fn lc(&self) -> Option<&Q> {
        self.terms.first().map(|t| &t.1)
    }

    pub fn constant_value(&self) -> Option<Q> {
        match self.terms.as_slice() {
            [] => Some(Q::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn constant_term(&self) -> Q {
        self.terms
            .iter()
            .find(|(m, _)| m.is_one())
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Q::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree()).min().unwrap_or(0)
    }

    pub fn degree_in(&self, var: usize) -> u16 {
        self.terms.iter().map(|(m, _)| m.0[var]).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return self.ring.zero();
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_term(&self, mono: &Monomial, c: &Q) -> Poly {
        if c.is_zero() {
            return self.ring.zero();
        }
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.mul(mono), a * c)).collect(),
        }
    }

    /// `self -= c * mono * g`, moving the existing terms instead of cloning them.
    pub(crate) fn sub_mul_term_assign(&mut self, mono: &Monomial, c: &Q, g: &Poly) {
        assert!(same_ring(&self.ring, &g.ring), "polynomial ring mismatch");
        if c.is_zero() || g.terms.is_empty() {
            return;
        }
        let old = std::mem::take(&mut self.terms);
        let mut out = Vec::with_capacity(old.len() + g.terms.len());
        let mut a = old.into_iter().peekable();
        let mut b = g.terms.iter().map(|(m, x)| (m.mul(mono), x * c)).peekable();
        loop {
            let ord = match (a.peek(), b.peek()) {
                (Some((ma, _)), Some((mb, _))) => self.ring.cmp(ma, mb),
                (Some(_), None) => Ordering::Greater,
                (None, Some(_)) => Ordering::Less,
                (None, None) => break,
            };
            match ord {
                Ordering::Greater => out.extend(a.next()),
                Ordering::Less => out.extend(b.next().map(|(m, x)| (m, -x))),
                Ordering::Equal => {
                    let (m, x) = a.next().unwrap();
                    let (_, y) = b.next().unwrap();
                    let d = x - y;
                    if !d.is_zero() {
                        out.push((m, d));
                    }
                }
            }
        }
        self.terms = out;
    }

    /// Remove and return the leading term.
    pub(crate) fn pop_leading(&mut self) -> Option<(Monomial, Q)> {
        (!self.terms.is_empty()).then(|| self.terms.remove(0))
    }

    /// Leading coefficient one.
    pub fn monic(&self) -> Poly {
        match self.lc() {
            None => self.clone(),
            Some(c) => self.scale(&c.recip()),
        }
    }

    /// Integer coefficients with unit content and positive leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let mut den = BigInt::one();
        for (_, c) in &self.terms {
            den = den.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            let n = c.numer() * (&den / c.denom());
            g = g.gcd(&n);
        }
        let mut factor = Q::new(den, g);
        if self.terms[0].1.is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    pub fn vars_used(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for (m, _) in &self.terms {
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    out.insert(i);
                }
            }
        }
        out
    }

    /// `Some((λ, rest))` when `self = λ·v + rest` with λ a nonzero constant and `rest` free of `v`.
    pub fn linear_in(&self, v: usize) -> Option<(Q, Poly)> {
        let mut lambda = None;
        let mut rest = Vec::new();
        for (m, c) in &self.terms {
            match m.0[v] {
                0 => rest.push((m.clone(), c.clone())),
                1 if m.degree() == 1 => lambda = Some(c.clone()),
                _ => return None,
            }
        }
        lambda.map(|l| (l, Poly { ring: self.ring.clone(), terms: rest }))
    }

    /// Replace variable `v` by `value`.
    pub fn substitute(&self, v: usize, value: &Poly) -> Poly {
        if self.degree_in(v) == 0 {
            return self.clone();
        }
        let mut powers: Vec<Poly> = vec![self.ring.one()];
        let mut out = self.ring.zero();
        for (m, c) in &self.terms {
            let e = m.0[v] as usize;
            while powers.len() <= e {
                let next = &powers[powers.len() - 1] * value;
                powers.push(next);
            }
            let mut rest = m.clone();
            rest.0[v] = 0;
            out = &out + &powers[e].mul_term(&rest, c);
        }
        out
    }

    /// Drop terms of total degree at least `n`.
    pub fn truncate_degree(&self, n: u32) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|(m, _)| m.degree() < n).cloned().collect(),
        }
    }

    /// Evaluate every variable at a rational point.
    pub fn eval(&self, point: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Rename into another ring by variable name.
    pub fn map_into(&self, target: &Arc<PolyRing>) -> Result<Poly> {
        let map: Vec<usize> = self
            .ring
            .names
            .iter()
            .map(|n| target.index_of(n).ok_or_else(|| Error::UnknownVariable(n.clone())))
            .collect::<Result<_>>()?;
        let n = target.nvars();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = vec![0u16; n];
                for (i, &x) in m.0.iter().enumerate() {
                    if x > 0 {
                        e[map[i]] += x;
                    }
                }
                (Monomial(e), c.clone())
            })
            .collect();
        Ok(Poly::from_terms(target, terms))
    }

    /// Like [`Poly::map_into`] but only for variables actually used.
    pub fn map_used_into(&self, target: &Arc<PolyRing>) -> Result<Poly> {
        let n = target.nvars();
        let mut map = vec![usize::MAX; self.ring.nvars()];
        for v in self.vars_used() {
            let name = &self.ring.names[v];
            map[v] = target.index_of(name).ok_or_else(|| Error::UnknownVariable(name.clone()))?;
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = vec![0u16; n];
                for (i, &x) in m.0.iter().enumerate() {
                    if x > 0 {
                        e[map[i]] += x;
                    }
                }
                (Monomial(e), c.clone())
            })
            .collect();
        Ok(Poly::from_terms(target, terms))
    }

    /// Exact division; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?.clone();
        let mut rem = self.clone();
        let mut quo = Vec::new();
        while let Some((m, c)) = rem.leading().cloned() {
            let t = dm.quotient_of(&m)?;
            let k = &c / &dc;
            rem = &rem - &d.mul_term(&t, &k);
            quo.push((t, k));
        }
        Some(Poly::from_terms(&self.ring, quo))
    }

    fn merge(&self, other: &Poly, negate: bool) -> Poly {
        assert!(same_ring(&self.ring, &other.ring), "polynomial ring mismatch");
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (ma, ca) = &self.terms[i];
            let (mb, cb) = &other.terms[j];
            match self.ring.cmp(ma, mb) {
                Ordering::Greater => {
                    out.push((ma.clone(), ca.clone()));
                    i += 1;
                }
                Ordering::Less => {
                    out.push((mb.clone(), if negate { -cb } else { cb.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate { ca - cb } else { ca + cb };
                    if !c.is_zero() {
                        out.push((ma.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(
            other.terms[j..]
                .iter()
                .map(|(m, c)| (m.clone(), if negate { -c } else { c.clone() })),
        );
        Poly { ring: self.ring.clone(), terms: out }
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.merge(rhs, false)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.merge(rhs, true)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert!(same_ring(&self.ring, &rhs.ring), "polynomial ring mismatch");
        let mut acc: BTreeMap<Monomial, Q> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let e = acc.entry(ma.mul(mb)).or_insert_with(Q::zero);
                *e += ca * cb;
            }
        }
        let mut terms: Vec<(Monomial, Q)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| self.ring.cmp(&b.0, &a.0));
        Poly { ring: self.ring.clone(), terms }
    }
}

pub(crate) fn fmt_q(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub(crate) fn fmt_monomial(names: &[String], m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mono = fmt_monomial(&self.ring.names, m);
            if mono.is_empty() {
                write!(f, "{}", fmt_q(&a))?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{}", fmt_q(&a), mono)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring() -> Arc<PolyRing> {
        PolyRing::grevlex(&["x", "y", "z"]).unwrap()
    }

    #[test]
    fn arithmetic_and_display() {
        let r = ring();
        let x = r.var(0);
        let y = r.var(1);
        let p = &(&x * &x) - (&y.scale(&qr(3, 2)));
        assert_eq!(p.to_string(), "x^2 - 3/2*y");
        let sq = &p * &p;
        assert_eq!(sq.total_degree(), 4);
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn grevlex_breaks_ties_on_last_variable() {
        let r = ring();
        let a = Monomial::from_exps(vec![1, 0, 1]);
        let b = Monomial::from_exps(vec![0, 2, 0]);
        // xz < y^2 in grevlex
        assert_eq!(r.cmp(&a, &b), Ordering::Less);
    }

    #[test]
    fn linear_decomposition() {
        let r = ring();
        let p = &(&r.var(0).scale(&q(2)) - &(&r.var(1) * &r.var(2))) + &r.one();
        let (l, rest) = p.linear_in(0).unwrap();
        assert_eq!(l, q(2));
        assert_eq!(rest.to_string(), "-y*z + 1");
        assert!(p.linear_in(1).is_none());
    }

    #[test]
    fn substitution_and_exact_division() {
        let r = ring();
        let (x, y) = (r.var(0), r.var(1));
        let p = &(&x * &x) + &y;
        let s = p.substitute(0, &(&y + &r.one()));
        assert_eq!(s.to_string(), "y^2 + 3*y + 1");
        let prod = &(&x + &y) * &(&x - &y);
        assert_eq!(prod.div_exact(&(&x - &y)).unwrap(), &x + &y);
        assert!(prod.div_exact(&r.var(2)).is_none());
    }

    #[test]
    fn primitive_normalizes_content() {
        let r = ring();
        let p = &r.var(0).scale(&qr(-2, 3)) + &r.var(1).scale(&qr(4, 9));
        assert_eq!(p.primitive().to_string(), "3*x - 2*y");
    }
}
