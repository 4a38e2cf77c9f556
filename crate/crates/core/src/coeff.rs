//! Coefficient algebras: the rationals, truncated Artin algebras and free polynomial rings.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::poly::{Monomial, MonomialOrder, Poly, PolyRing, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CoeffKind {
    Rationals,
    /// Parameters modulo every monomial of total degree at least `nil_order`.
    TruncatedArtin { nil_order: u32 },
    FreePoly,
}

/// A coefficient algebra; elements are polynomials in its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoeffAlgebra {
    kind: CoeffKind,
    ring: Arc<PolyRing>,
}

impl CoeffAlgebra {
    pub fn rationals() -> Arc<Self> {
        let ring = PolyRing::grevlex::<&str>(&[]).expect("empty ring");
        Arc::new(CoeffAlgebra { kind: CoeffKind::Rationals, ring })
    }

    pub fn truncated_artin<S: AsRef<str>>(params: &[S], nil_order: u32) -> Result<Arc<Self>> {
        if params.is_empty() {
            return Err(Error::InvalidInput("Artin algebra needs parameters".into()));
        }
        if nil_order < 1 {
            return Err(Error::InvalidInput("nil order must be positive".into()));
        }
        let ring = PolyRing::new(params, MonomialOrder::GradedRevLex)?;
        Ok(Arc::new(CoeffAlgebra { kind: CoeffKind::TruncatedArtin { nil_order }, ring }))
    }

    /// `ℚ[u,v]/(u,v)^3`, the default test algebra.
    pub fn uv_cubed() -> Arc<Self> {
        Self::truncated_artin(&["u", "v"], 3).expect("valid algebra")
    }

    pub fn free_poly<S: AsRef<str>>(vars: &[S]) -> Result<Arc<Self>> {
        let ring = PolyRing::new(vars, MonomialOrder::GradedRevLex)?;
        Ok(Arc::new(CoeffAlgebra { kind: CoeffKind::FreePoly, ring }))
    }

    /// Free polynomial coefficients over an existing polynomial ring.
    pub fn over_ring(ring: &Arc<PolyRing>) -> Arc<Self> {
        Arc::new(CoeffAlgebra { kind: CoeffKind::FreePoly, ring: ring.clone() })
    }

    pub fn kind(&self) -> &CoeffKind {
        &self.kind
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn nil_order(&self) -> Option<u32> {
        match self.kind {
            CoeffKind::TruncatedArtin { nil_order } => Some(nil_order),
            _ => None,
        }
    }

    pub fn is_artin(&self) -> bool {
        !matches!(self.kind, CoeffKind::FreePoly)
    }

    /// Apply the algebra's truncation.
    pub fn normalize(&self, p: Poly) -> Poly {
        match self.kind {
            CoeffKind::TruncatedArtin { nil_order } => p.truncate_degree(nil_order),
            _ => p,
        }
    }

    pub fn zero(&self) -> Poly {
        self.ring.zero()
    }

    pub fn one(&self) -> Poly {
        self.ring.one()
    }

    pub fn scalar(&self, c: Q) -> Poly {
        self.ring.constant(c)
    }

    pub fn param(&self, name: &str) -> Result<Poly> {
        Ok(self.normalize(self.ring.var_named(name)?))
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.normalize(a * b)
    }

    pub fn pow(&self, a: &Poly, e: u32) -> Poly {
        let mut out = self.one();
        for _ in 0..e {
            out = self.mul(&out, a);
        }
        out
    }

    /// Fixed enumeration of a ℚ-basis: degree ascending, then descending exponent vector.
    pub fn basis(&self) -> Result<Vec<Monomial>> {
        let n = self.ring.nvars();
        let top = match self.kind {
            CoeffKind::Rationals => return Ok(vec![Monomial::one(n)]),
            CoeffKind::TruncatedArtin { nil_order } => nil_order,
            CoeffKind::FreePoly => return Err(Error::NotArtin),
        };
        let mut out = Vec::new();
        for d in 0..top {
            let mut level = Vec::new();
            exps_of_degree(n, d as u16, &mut vec![0; n], 0, &mut level);
            level.sort_by(|a, b| b.cmp(a));
            out.extend(level.into_iter().map(Monomial::from_exps));
        }
        Ok(out)
    }

    pub fn dim(&self) -> Result<usize> {
        Ok(self.basis()?.len())
    }

    /// Evaluate a polynomial over `source` at values in this algebra.
    pub fn evaluate(&self, p: &Poly, assignment: &BTreeMap<String, Poly>) -> Result<Poly> {
        let names = p.ring().names();
        let mut out = self.zero();
        let mut cache: BTreeMap<(usize, u16), Poly> = BTreeMap::new();
        for (m, c) in p.terms() {
            let mut t = self.scalar(c.clone());
            for (i, &e) in m.exps().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = assignment
                    .get(&names[i])
                    .ok_or_else(|| Error::UnassignedVariable(names[i].clone()))?;
                let pw = match cache.get(&(i, e)) {
                    Some(x) => x.clone(),
                    None => {
                        let x = self.pow(&v.map_into(&self.ring)?, e as u32);
                        cache.insert((i, e), x.clone());
                        x
                    }
                };
                t = self.mul(&t, &pw);
            }
            out = &out + &t;
        }
        Ok(out)
    }
}

fn exps_of_degree(n: usize, d: u16, cur: &mut Vec<u16>, i: usize, out: &mut Vec<Vec<u16>>) {
    if n == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return;
    }
    if i == n - 1 {
        cur[i] = d;
        out.push(cur.clone());
        cur[i] = 0;
        return;
    }
    for e in 0..=d {
        cur[i] = e;
        exps_of_degree(n, d - e, cur, i + 1, out);
    }
    cur[i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q;

    #[test]
    fn artin_basis_enumeration() {
        let s = CoeffAlgebra::uv_cubed();
        let names: Vec<String> = s
            .basis()
            .unwrap()
            .iter()
            .map(|m| Poly::from_terms(s.ring(), vec![(m.clone(), q(1))]).to_string())
            .collect();
        assert_eq!(names, vec!["1", "u", "v", "u^2", "u*v", "v^2"]);
    }

    #[test]
    fn truncation_kills_high_products() {
        let s = CoeffAlgebra::uv_cubed();
        let u = s.param("u").unwrap();
        let v = s.param("v").unwrap();
        assert!(s.mul(&s.mul(&u, &v), &u).is_zero());
        assert_eq!(s.mul(&u, &v).to_string(), "u*v");
    }
}
