//! Linear-algebra oracle: colength, membership, ideal equality and S-freeness by flattening.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::coeff::CoeffKind;
use crate::error::{Error, Result};
use crate::linalg::{to_integer, Echelon};
use crate::poly::{Monomial, Q};
use crate::ring::{same_curve, CurveKind, CurveMono, CurveRing, RingElement};

/// Default cap on the working truncation.
pub const DEFAULT_TRUNC_CAP: u32 = 256;

/// Finite generating set of an ideal in a curve ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdealGens {
    ring: Arc<CurveRing>,
    gens: Vec<RingElement>,
}

impl IdealGens {
    /// Zero generators are dropped; an empty list is the zero ideal.
    pub fn new(ring: &Arc<CurveRing>, gens: Vec<RingElement>) -> Result<Self> {
        if gens.iter().any(|g| !same_curve(g.ring(), ring)) {
            return Err(Error::RingMismatch);
        }
        let gens = gens.into_iter().filter(|g| !g.is_zero()).collect();
        Ok(IdealGens { ring: ring.clone(), gens })
    }

    pub fn ring(&self) -> &Arc<CurveRing> {
        &self.ring
    }

    pub fn gens(&self) -> &[RingElement] {
        &self.gens
    }

    fn max_degree(&self) -> u32 {
        self.gens.iter().map(|g| g.degree()).max().unwrap_or(0)
    }

    fn max_y_degree(&self) -> u32 {
        self.gens
            .iter()
            .flat_map(|g| g.terms().iter().map(|(m, _)| m.y))
            .max()
            .unwrap_or(0)
    }

    /// A priori colength bound used to seed the working truncation.
    pub fn colength_bound(&self, hint: Option<u32>) -> u32 {
        match self.ring.kind() {
            CurveKind::Cusp => 2 * self.max_y_degree() + 4,
            _ => self.max_degree() + hint.unwrap_or_else(|| self.max_degree().max(1)),
        }
    }
}

/// Quotient basis at a working truncation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientBasis {
    /// Basis entries `σ · mono`, `σ` running over the coefficient-algebra basis.
    pub entries: Vec<(CurveMono, Monomial)>,
    /// `None` when the size did not stabilize over three consecutive truncations.
    pub colength: Option<usize>,
}

impl QuotientBasis {
    /// Curve monomials of the basis entries with trivial coefficient monomial.
    pub fn monomials(&self) -> Vec<CurveMono> {
        self.entries.iter().filter(|(_, s)| s.is_one()).map(|(m, _)| *m).collect()
    }
}

/// Row space of an ideal at a fixed truncation, flattened over ℚ.
#[derive(Clone, Debug)]
pub struct Quotient {
    ring: Arc<CurveRing>,
    trunc: u32,
    monos: Vec<CurveMono>,
    mono_index: HashMap<CurveMono, usize>,
    sigma: Vec<Monomial>,
    sigma_index: HashMap<Monomial, usize>,
    echelon: Echelon,
    basis_pos: HashMap<usize, usize>,
    basis_cols: Vec<usize>,
}

fn slack(ring: &CurveRing) -> Result<u32> {
    match ring.kind() {
        CurveKind::NodeRelative { base } => match ring.coeff().kind() {
            CoeffKind::TruncatedArtin { nil_order } => {
                if !base.constant_term().is_zero() {
                    return Err(Error::InvalidInput("relative base must be nilpotent".into()));
                }
                Ok(2 * nil_order)
            }
            CoeffKind::Rationals if base.is_zero() => Ok(0),
            CoeffKind::Rationals => Err(Error::InvalidInput("relative base must be nilpotent".into())),
            CoeffKind::FreePoly => Err(Error::NotArtin),
        },
        _ => {
            if matches!(ring.coeff().kind(), CoeffKind::FreePoly) {
                Err(Error::NotArtin)
            } else {
                Ok(0)
            }
        }
    }
}

impl Quotient {
    pub fn build(ideal: &IdealGens, trunc: u32) -> Result<Self> {
        let ring = ideal.ring.clone();
        let extra = slack(&ring)?;
        let monos = ring.monomials_below(trunc);
        let mono_index: HashMap<CurveMono, usize> = monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let sigma = ring.coeff().basis()?;
        let sigma_index: HashMap<Monomial, usize> = sigma.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mut q = Quotient {
            ring: ring.clone(),
            trunc,
            monos,
            mono_index,
            sigma,
            sigma_index,
            echelon: Echelon::new(),
            basis_pos: HashMap::new(),
            basis_cols: Vec::new(),
        };
        let coeff = ring.coeff().clone();
        let multipliers = ring.monomials_below(trunc + extra);
        let sigma_polys: Vec<_> = q
            .sigma
            .iter()
            .map(|s| crate::poly::Poly::from_terms(coeff.ring(), vec![(s.clone(), num_traits::One::one())]))
            .collect();
        let mut base_powers = Vec::new();
        for g in &ideal.gens {
            let scaled: Vec<Vec<(CurveMono, crate::poly::Poly)>> = sigma_polys
                .iter()
                .map(|sp| g.terms().iter().map(|(m, c)| (*m, coeff.mul(c, sp))).filter(|(_, c)| !c.is_zero()).collect())
                .collect();
            for mu in &multipliers {
                for gs in &scaled {
                    if gs.is_empty() {
                        continue;
                    }
                    let raw = gs.iter().map(|(m, c)| ((m.x + mu.x, m.y + mu.y), c.clone()));
                    let terms = ring.canonical_terms_cached(raw, trunc, &mut base_powers);
                    if terms.is_empty() {
                        continue;
                    }
                    let v = q.flatten_terms(&terms)?;
                    q.echelon.insert(to_integer(&v));
                }
            }
        }
        let ncols = q.ncols();
        let mut pref: Vec<usize> = (0..ncols).filter(|c| !q.echelon.is_pivot(*c)).collect();
        pref.sort_by(|a, b| b.cmp(a));
        q.basis_pos = pref.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        q.basis_cols = pref;
        Ok(q)
    }

    fn ncols(&self) -> usize {
        self.monos.len() * self.sigma.len()
    }

    /// Least preferred column first.
    fn col(&self, mono: usize, sigma: usize) -> usize {
        self.ncols() - 1 - (mono * self.sigma.len() + sigma)
    }

    fn uncol(&self, col: usize) -> (CurveMono, Monomial) {
        let p = self.ncols() - 1 - col;
        (self.monos[p / self.sigma.len()], self.sigma[p % self.sigma.len()].clone())
    }

    fn flatten_terms(&self, terms: &[(CurveMono, crate::poly::Poly)]) -> Result<Vec<(usize, Q)>> {
        let mut v = Vec::new();
        for (m, c) in terms {
            if m.degree() >= self.trunc {
                continue;
            }
            let mi = self.mono_index[m];
            for (sm, q) in c.terms() {
                let si = *self
                    .sigma_index
                    .get(sm)
                    .ok_or_else(|| Error::InvalidInput("coefficient outside the algebra basis".into()))?;
                v.push((self.col(mi, si), q.clone()));
            }
        }
        Ok(v)
    }

    pub fn flatten(&self, e: &RingElement) -> Result<Vec<(usize, Q)>> {
        if !same_curve(e.ring(), &self.ring) {
            return Err(Error::RingMismatch);
        }
        let terms = self.ring.canonical_terms(e.raw(), self.trunc);
        self.flatten_terms(&terms)
    }

    pub fn trunc(&self) -> u32 {
        self.trunc
    }

    pub fn ring(&self) -> &Arc<CurveRing> {
        &self.ring
    }

    /// ℚ-dimension of the truncated quotient.
    pub fn dim(&self) -> usize {
        self.ncols() - self.echelon.rank()
    }

    /// Greedy complement in preference order.
    pub fn basis(&self) -> Vec<(CurveMono, Monomial)> {
        self.basis_cols.iter().map(|&c| self.uncol(c)).collect()
    }

    pub fn contains(&self, e: &RingElement) -> Result<bool> {
        let v = self.flatten(e)?;
        Ok(self.echelon.contains(to_integer(&v)))
    }

    /// Coordinates of `e` modulo the ideal in the order of [`Quotient::basis`].
    pub fn coordinates(&self, e: &RingElement) -> Result<Vec<Q>> {
        let v = self.flatten(e)?;
        let mut out = vec![Q::zero(); self.basis_cols.len()];
        for (c, q) in self.echelon.reduce_full(&v) {
            out[self.basis_pos[&c]] = q;
        }
        Ok(out)
    }

    /// Whether `σ·b` for all algebra basis σ and all `b` is independent modulo the ideal.
    fn independent_with(&self, claimed: &[CurveMono]) -> Result<bool> {
        let mut ech = self.echelon.clone();
        for b in claimed {
            let Some(&mi) = self.mono_index.get(b) else { return Ok(false) };
            for si in 0..self.sigma.len() {
                let col = self.col(mi, si);
                if !ech.insert(vec![(col, num_bigint::BigInt::from(1))]) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Working-truncation policy for stabilized computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Oracle {
    pub cap: u32,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle { cap: DEFAULT_TRUNC_CAP }
    }
}

impl Oracle {
    pub fn with_cap(cap: u32) -> Self {
        Oracle { cap }
    }

    /// Quotient at the first truncation whose dimension agrees over three consecutive values.
    pub fn stable_quotient(&self, ideal: &IdealGens, hint: Option<u32>) -> Result<Quotient> {
        let mut d = 2 * ideal.colength_bound(hint) + 4;
        loop {
            if d > self.cap {
                return Err(Error::InfiniteColength { cap: self.cap });
            }
            let q0 = Quotient::build(ideal, d)?;
            let q1 = Quotient::build(ideal, d + 1)?;
            if q0.dim() == q1.dim() {
                let q2 = Quotient::build(ideal, d + 2)?;
                if q2.dim() == q0.dim() {
                    return Ok(q0);
                }
            }
            d *= 2;
        }
    }

    pub fn colength(&self, ideal: &IdealGens) -> Result<usize> {
        self.colength_hinted(ideal, None)
    }

    pub fn colength_hinted(&self, ideal: &IdealGens, hint: Option<u32>) -> Result<usize> {
        Ok(self.stable_quotient(ideal, hint)?.dim())
    }

    pub fn member(&self, e: &RingElement, ideal: &IdealGens) -> Result<bool> {
        if !same_curve(e.ring(), &ideal.ring) {
            return Err(Error::RingMismatch);
        }
        match self.stable_quotient(ideal, None) {
            Ok(q) => q.contains(e),
            Err(Error::InfiniteColength { .. }) => {
                let d = 2 * (e.degree() + ideal.colength_bound(None)) + 8;
                Quotient::build(ideal, d)?.contains(e)
            }
            Err(err) => Err(err),
        }
    }

    pub fn ideal_equal(&self, a: &IdealGens, b: &IdealGens) -> Result<bool> {
        if !same_curve(&a.ring, &b.ring) {
            return Err(Error::RingMismatch);
        }
        let qa = self.stable_quotient(a, None)?;
        let qb = self.stable_quotient(b, None)?;
        if qa.dim() != qb.dim() {
            return Ok(false);
        }
        for g in b.gens() {
            if !qa.contains(g)? {
                return Ok(false);
            }
        }
        for g in a.gens() {
            if !qb.contains(g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether the claimed monomials form a free basis of the quotient over the Artin algebra.
    pub fn s_free_rank(&self, ideal: &IdealGens, claimed: &[CurveMono], hint: Option<u32>) -> Result<bool> {
        if !matches!(ideal.ring.coeff().kind(), CoeffKind::TruncatedArtin { .. }) {
            return Err(Error::NotArtin);
        }
        let q = match self.stable_quotient(ideal, hint) {
            Ok(q) => q,
            Err(Error::InfiniteColength { .. }) => return Ok(false),
            Err(e) => return Err(e),
        };
        let ds = ideal.ring.coeff().dim()?;
        if q.dim() != claimed.len() * ds {
            return Ok(false);
        }
        q.independent_with(claimed)
    }
}

/// Basis and stabilization report at a fixed starting truncation.
pub fn quotient_basis(ideal: &IdealGens, trunc: u32) -> Result<QuotientBasis> {
    if trunc < 2 {
        return Err(Error::TruncationTooSmall(trunc));
    }
    let q0 = Quotient::build(ideal, trunc)?;
    let d1 = Quotient::build(ideal, trunc + 1)?.dim();
    let d2 = Quotient::build(ideal, trunc + 2)?.dim();
    let colength = (q0.dim() == d1 && d1 == d2).then_some(q0.dim());
    Ok(QuotientBasis { entries: q0.basis(), colength })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::CoeffAlgebra;
    use crate::poly::{q, qr};

    fn cusp() -> Arc<CurveRing> {
        CurveRing::cusp(CoeffAlgebra::rationals(), 64).unwrap()
    }

    fn node() -> Arc<CurveRing> {
        CurveRing::node(CoeffAlgebra::rationals(), 64).unwrap()
    }

    fn mono(r: &Arc<CurveRing>, a: u32, b: u32) -> RingElement {
        RingElement::monomial(r, a, b, q(1))
    }

    fn ideal(r: &Arc<CurveRing>, gens: Vec<RingElement>) -> IdealGens {
        IdealGens::new(r, gens).unwrap()
    }

    #[test]
    fn unit_and_maximal_ideals() {
        let c = cusp();
        let o = Oracle::default();
        assert_eq!(o.colength(&ideal(&c, vec![RingElement::one(&c)])).unwrap(), 0);
        let qb = quotient_basis(&ideal(&c, vec![mono(&c, 1, 0), mono(&c, 0, 1)]), 5).unwrap();
        assert_eq!(qb.colength, Some(1));
        assert_eq!(qb.monomials(), vec![CurveMono::ONE]);
    }

    #[test]
    fn monomial_node_ideal_basis() {
        let n = node();
        let qb = quotient_basis(&ideal(&n, vec![mono(&n, 3, 0), mono(&n, 0, 2)]), 12).unwrap();
        assert_eq!(qb.colength, Some(4));
        let mut got = qb.monomials();
        got.sort();
        assert_eq!(got, vec![CurveMono::ONE, CurveMono::new(0, 1), CurveMono::new(1, 0), CurveMono::new(2, 0)]);
    }

    #[test]
    fn cusp_colengths_and_membership() {
        let c = cusp();
        let o = Oracle::default();
        assert_eq!(o.colength(&ideal(&c, vec![mono(&c, 1, 1), mono(&c, 0, 2)])).unwrap(), 3);
        assert_eq!(o.colength(&ideal(&c, vec![mono(&c, 0, 1)])).unwrap(), 2);
        let binom = mono(&c, 1, 1).add(&mono(&c, 0, 2)).unwrap();
        assert!(o.member(&mono(&c, 0, 3), &ideal(&c, vec![binom])).unwrap());
        assert!(!o.member(&mono(&c, 1, 0), &ideal(&c, vec![mono(&c, 0, 1)])).unwrap());
        assert!(o.member(&mono(&c, 0, 3), &ideal(&c, vec![mono(&c, 1, 0)])).unwrap());
    }

    #[test]
    fn zero_ideal_is_infinite() {
        let c = CurveRing::cusp(CoeffAlgebra::rationals(), 8).unwrap();
        let o = Oracle::with_cap(40);
        assert_eq!(o.colength(&ideal(&c, vec![])), Err(Error::InfiniteColength { cap: 40 }));
    }

    #[test]
    fn node_binomial_colength() {
        let n = node();
        let g = mono(&n, 0, 2).add(&RingElement::monomial(&n, 2, 0, qr(2, 3))).unwrap();
        assert_eq!(Oracle::default().colength(&ideal(&n, vec![g])).unwrap(), 4);
    }

    #[test]
    fn equality_of_ideals() {
        let c = cusp();
        let o = Oracle::default();
        let x = mono(&c, 1, 0);
        let xy = mono(&c, 1, 1);
        assert!(o.ideal_equal(&ideal(&c, vec![x.clone(), xy.clone()]), &ideal(&c, vec![x])).unwrap());
        let y2 = mono(&c, 0, 2);
        let a = xy.add(&y2).unwrap();
        let b = xy.add(&y2.scale_q(&q(2))).unwrap();
        assert!(o.ideal_equal(&ideal(&c, vec![a.clone(), b.clone()]), &ideal(&c, vec![xy, y2])).unwrap());
        assert!(!o.ideal_equal(&ideal(&c, vec![a]), &ideal(&c, vec![b])).unwrap());
    }

    #[test]
    fn s_freeness_over_dual_numbers() {
        let s = CoeffAlgebra::truncated_artin(&["e"], 2).unwrap();
        let r = CurveRing::node(s.clone(), 32).unwrap();
        let e = s.param("e").unwrap();
        let f = mono(&r, 2, 0).add(&mono(&r, 1, 0).scale(&e).unwrap()).unwrap();
        let g = mono(&r, 0, 1);
        let i = ideal(&r, vec![f, g]);
        let o = Oracle::default();
        assert!(o.s_free_rank(&i, &[CurveMono::ONE, CurveMono::new(1, 0)], None).unwrap());
        assert!(!o.s_free_rank(&i, &[CurveMono::ONE], None).unwrap());
    }
}
