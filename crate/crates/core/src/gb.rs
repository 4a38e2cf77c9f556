//! Buchberger's algorithm, ideal operations and syzygies over the rationals.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_traits::One;

use crate::error::{Error, Result};
use crate::poly::{same_ring, Monomial, MonomialOrder, Poly, PolyRing, Q};

/// Default cap on the number of ring variables.
pub const DEFAULT_MAX_VARS: usize = 16;

/// Reduced Gröbner basis, sorted by decreasing leading monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroebnerBasis {
    ring: Arc<PolyRing>,
    polys: Vec<Poly>,
}

struct Tracked {
    poly: Poly,
    cofactors: Vec<Poly>,
}

struct Engine<'a> {
    ring: &'a Arc<PolyRing>,
    track: bool,
    basis: Vec<Tracked>,
}

impl<'a> Engine<'a> {
    /// Full reduction of `p` by the current basis, updating its cofactors.
    fn reduce(&self, mut p: Tracked) -> Tracked {
        let mut rem: Vec<(Monomial, Q)> = Vec::new();
        while let Some((m, c)) = p.poly.leading() {
            let step = self.basis.iter().find(|g| g.poly.lm().is_some_and(|lm| lm.divides(m))).map(|g| {
                let (gm, gc) = g.poly.leading().unwrap();
                (g, gm.quotient_of(m).unwrap(), c / gc)
            });
            match step {
                Some((g, t, k)) => {
                    p.poly.sub_mul_term_assign(&t, &k, &g.poly);
                    if self.track {
                        for (a, b) in p.cofactors.iter_mut().zip(&g.cofactors) {
                            a.sub_mul_term_assign(&t, &k, b);
                        }
                    }
                }
                None => rem.extend(p.poly.pop_leading()),
            }
        }
        let poly = Poly::from_terms(self.ring, rem);
        normalize(Tracked { poly, cofactors: p.cofactors }, self.track)
    }

    fn spoly(&self, i: usize, j: usize) -> Tracked {
        let (fi, fj) = (&self.basis[i], &self.basis[j]);
        let (mi, ci) = fi.poly.leading().unwrap();
        let (mj, cj) = fj.poly.leading().unwrap();
        let l = mi.lcm(mj);
        let ti = mi.quotient_of(&l).unwrap();
        let tj = mj.quotient_of(&l).unwrap();
        let ki = ci.recip();
        let kj = cj.recip();
        let poly = &fi.poly.mul_term(&ti, &ki) - &fj.poly.mul_term(&tj, &kj);
        let cofactors = if self.track {
            fi.cofactors
                .iter()
                .zip(&fj.cofactors)
                .map(|(a, b)| &a.mul_term(&ti, &ki) - &b.mul_term(&tj, &kj))
                .collect()
        } else {
            Vec::new()
        };
        Tracked { poly, cofactors }
    }

    fn lcm_of(&self, i: usize, j: usize) -> Monomial {
        self.basis[i].poly.lm().unwrap().lcm(self.basis[j].poly.lm().unwrap())
    }

    fn run(&mut self) {
        let mut pending: Vec<(usize, usize)> = Vec::new();
        let mut done: BTreeSet<(usize, usize)> = BTreeSet::new();
        for j in 0..self.basis.len() {
            for i in 0..j {
                pending.push((i, j));
            }
        }
        while !pending.is_empty() {
            let best = (0..pending.len())
                .min_by(|&a, &b| {
                    let la = self.lcm_of(pending[a].0, pending[a].1);
                    let lb = self.lcm_of(pending[b].0, pending[b].1);
                    self.ring
                        .cmp(&la, &lb)
                        .then_with(|| pending[a].cmp(&pending[b]))
                })
                .unwrap();
            let (i, j) = pending.remove(best);
            done.insert((i, j));
            let mi = self.basis[i].poly.lm().unwrap().clone();
            let mj = self.basis[j].poly.lm().unwrap().clone();
            if mi.coprime(&mj) {
                continue;
            }
            let l = mi.lcm(&mj);
            let key = |a: usize, b: usize| (a.min(b), a.max(b));
            let chain = (0..self.basis.len()).any(|k| {
                k != i
                    && k != j
                    && self.basis[k].poly.lm().unwrap().divides(&l)
                    && done.contains(&key(i, k))
                    && done.contains(&key(j, k))
            });
            if chain {
                continue;
            }
            let h = self.reduce(self.spoly(i, j));
            if h.poly.is_zero() {
                continue;
            }
            let n = self.basis.len();
            self.basis.push(h);
            for k in 0..n {
                pending.push((k, n));
            }
        }
    }

    /// Drop redundant leading terms, interreduce, make monic and sort.
    fn finish(mut self) -> Vec<Tracked> {
        let mut keep: Vec<Tracked> = Vec::new();
        let mut all: Vec<Tracked> = std::mem::take(&mut self.basis);
        all.sort_by(|a, b| self.ring.cmp(a.poly.lm().unwrap(), b.poly.lm().unwrap()));
        for t in all {
            let lm = t.poly.lm().unwrap();
            if !keep.iter().any(|k| k.poly.lm().unwrap().divides(lm)) {
                keep.push(t);
            }
        }
        let mut out = Vec::with_capacity(keep.len());
        for idx in 0..keep.len() {
            let current = Tracked {
                poly: keep[idx].poly.clone(),
                cofactors: keep[idx].cofactors.clone(),
            };
            let others: Vec<Tracked> = keep
                .iter()
                .enumerate()
                .filter(|(k, _)| *k != idx)
                .map(|(_, t)| Tracked { poly: t.poly.clone(), cofactors: t.cofactors.clone() })
                .collect();
            let eng = Engine { ring: self.ring, track: self.track, basis: others };
            // the leading term is irreducible by the others, so reduction keeps it
            let r = eng.reduce(current);
            out.push(make_monic(r, self.track));
        }
        out.sort_by(|a, b| self.ring.cmp(b.poly.lm().unwrap(), a.poly.lm().unwrap()));
        out
    }
}

fn normalize(t: Tracked, track: bool) -> Tracked {
    if t.poly.is_zero() {
        return t;
    }
    let p = t.poly.primitive();
    if !track {
        return Tracked { poly: p, cofactors: t.cofactors };
    }
    let factor = p.lc().unwrap() / t.poly.lc().unwrap();
    let cofactors = t.cofactors.iter().map(|c| c.scale(&factor)).collect();
    Tracked { poly: p, cofactors }
}

fn make_monic(t: Tracked, track: bool) -> Tracked {
    let inv = t.poly.lc().unwrap().recip();
    let cofactors = if track {
        t.cofactors.iter().map(|c| c.scale(&inv)).collect()
    } else {
        t.cofactors
    };
    Tracked { poly: t.poly.scale(&inv), cofactors }
}

fn check_ring(ring: &Arc<PolyRing>, gens: &[Poly]) -> Result<()> {
    if gens.iter().all(|g| same_ring(g.ring(), ring)) {
        Ok(())
    } else {
        Err(Error::RingMismatch)
    }
}

fn compute(ring: &Arc<PolyRing>, gens: &[Poly], track: bool) -> Vec<Tracked> {
    let n = gens.len();
    let mut basis = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        let cofactors = if track {
            (0..n).map(|k| if k == i { ring.one() } else { ring.zero() }).collect()
        } else {
            Vec::new()
        };
        basis.push(normalize(Tracked { poly: g.clone(), cofactors }, track));
    }
    let mut eng = Engine { ring, track, basis };
    eng.run();
    eng.finish()
}

impl GroebnerBasis {
    /// Reduced basis of the ideal generated by `gens`, subject to the default variable cap.
    pub fn new(ring: &Arc<PolyRing>, gens: &[Poly]) -> Result<Self> {
        Self::with_cap(ring, gens, DEFAULT_MAX_VARS)
    }

    pub fn with_cap(ring: &Arc<PolyRing>, gens: &[Poly], cap: usize) -> Result<Self> {
        if ring.nvars() > cap {
            return Err(Error::VariableCap { needed: ring.nvars(), cap });
        }
        Self::uncapped(ring, gens)
    }

    pub(crate) fn uncapped(ring: &Arc<PolyRing>, gens: &[Poly]) -> Result<Self> {
        check_ring(ring, gens)?;
        let polys = compute(ring, gens, false).into_iter().map(|t| t.poly).collect();
        Ok(GroebnerBasis { ring: ring.clone(), polys })
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn polys(&self) -> &[Poly] {
        &self.polys
    }

    pub fn is_unit(&self) -> bool {
        self.polys.iter().any(|p| p.lm().is_some_and(|m| m.is_one()))
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.polys.is_empty()
    }

    /// Fully reduced remainder of `p`.
    pub fn normal_form(&self, p: &Poly) -> Result<Poly> {
        if !same_ring(p.ring(), &self.ring) {
            return Err(Error::RingMismatch);
        }
        let mut rem: Vec<(Monomial, Q)> = Vec::new();
        let mut cur = p.clone();
        while let Some((m, c)) = cur.leading().cloned() {
            match self.polys.iter().find(|g| g.lm().unwrap().divides(&m)) {
                Some(g) => {
                    let t = g.lm().unwrap().quotient_of(&m).unwrap();
                    cur = &cur - &g.mul_term(&t, &c);
                }
                None => {
                    cur = &cur - &Poly::from_terms(&self.ring, vec![(m.clone(), c.clone())]);
                    rem.push((m, c));
                }
            }
        }
        Ok(Poly::from_terms(&self.ring, rem))
    }

    pub fn contains(&self, p: &Poly) -> Result<bool> {
        Ok(self.normal_form(p)?.is_zero())
    }

    pub fn contains_all(&self, ps: &[Poly]) -> Result<bool> {
        for p in ps {
            if !self.contains(p)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Equality of ideals; reduced bases are unique.
    pub fn same_ideal(&self, other: &GroebnerBasis) -> bool {
        same_ring(&self.ring, &other.ring) && self.polys == other.polys
    }

    /// Krull dimension of the quotient ring.
    pub fn ideal_dim(&self) -> Result<usize> {
        if self.is_unit() {
            return Err(Error::EmptyVariety);
        }
        let n = self.ring.nvars();
        if n > 30 {
            return Err(Error::VariableCap { needed: n, cap: 30 });
        }
        let supports: Vec<u64> = self.polys.iter().map(|p| p.lm().unwrap().support()).collect();
        let mut best = 0;
        for set in 0u64..(1u64 << n) {
            let size = set.count_ones() as usize;
            if size > best && supports.iter().all(|&s| s & !set != 0) {
                best = size;
            }
        }
        Ok(best)
    }

    /// Basis of the colon ideal `(self : p)`.
    pub fn quotient(&self, p: &Poly) -> Result<GroebnerBasis> {
        if p.is_zero() {
            return Err(Error::Zero);
        }
        if !same_ring(p.ring(), &self.ring) {
            return Err(Error::RingMismatch);
        }
        if self.is_zero_ideal() {
            return Ok(self.clone());
        }
        let mut t = String::from("_t");
        while self.ring.index_of(&t).is_some() {
            t.push('_');
        }
        let mut names = vec![t];
        names.extend(self.ring.names().iter().cloned());
        let big = PolyRing::new(&names, MonomialOrder::Block { split: 1 })?;
        let tv = big.var(0);
        let one_minus_t = &big.one() - &tv;
        let pb = p.map_into(&big)?;
        let mut gens: Vec<Poly> = Vec::new();
        for g in &self.polys {
            gens.push(&tv * &g.map_into(&big)?);
        }
        gens.push(&one_minus_t * &pb);
        let gb = GroebnerBasis::uncapped(&big, &gens)?;
        let mut out = Vec::new();
        for g in gb.polys() {
            if g.degree_in(0) == 0 {
                let back = g.map_used_into(&self.ring)?;
                let q = back.div_exact(p).ok_or_else(|| {
                    Error::InvalidInput("intersection element not divisible".into())
                })?;
                out.push(q);
            }
        }
        GroebnerBasis::uncapped(&self.ring, &out)
    }
}

/// Ideal equality of two generator lists.
pub fn ideals_equal(ring: &Arc<PolyRing>, a: &[Poly], b: &[Poly]) -> Result<bool> {
    let ga = GroebnerBasis::new(ring, a)?;
    let gb = GroebnerBasis::new(ring, b)?;
    Ok(ga.same_ideal(&gb))
}

/// Whether `polys` is a regular sequence generating a proper ideal at each stage.
pub fn is_regular_sequence(ring: &Arc<PolyRing>, polys: &[Poly]) -> Result<bool> {
    is_regular_sequence_with_cap(ring, polys, DEFAULT_MAX_VARS)
}

pub fn is_regular_sequence_with_cap(ring: &Arc<PolyRing>, polys: &[Poly], cap: usize) -> Result<bool> {
    let mut prefix: Vec<Poly> = Vec::new();
    let mut current = GroebnerBasis::with_cap(ring, &[], cap)?;
    for p in polys {
        if p.is_zero() {
            return Ok(false);
        }
        let colon = current.quotient(p)?;
        if !colon.same_ideal(&current) {
            return Ok(false);
        }
        prefix.push(p.clone());
        current = GroebnerBasis::with_cap(ring, &prefix, cap)?;
        if current.is_unit() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Division of `p` by a reduced basis, returning quotients (remainder must vanish).
fn divide(ring: &Arc<PolyRing>, p: &Poly, g: &[Poly]) -> (Vec<Poly>, Poly) {
    let mut quot = vec![ring.zero(); g.len()];
    let mut rem = Vec::new();
    let mut cur = p.clone();
    while let Some((m, c)) = cur.leading().cloned() {
        match g.iter().position(|h| h.lm().unwrap().divides(&m)) {
            Some(k) => {
                let (hm, hc) = g[k].leading().unwrap();
                let t = hm.quotient_of(&m).unwrap();
                let coef = &c / hc;
                quot[k] = &quot[k] + &Poly::from_terms(ring, vec![(t.clone(), coef.clone())]);
                cur = &cur - &g[k].mul_term(&t, &coef);
            }
            None => {
                cur = &cur - &Poly::from_terms(ring, vec![(m.clone(), c.clone())]);
                rem.push((m, c));
            }
        }
    }
    (quot, Poly::from_terms(ring, rem))
}

/// Generators of the module of relations `Σ q_j g_j = 0`.
pub fn syzygies(ring: &Arc<PolyRing>, gens: &[Poly]) -> Result<Vec<Vec<Poly>>> {
    check_ring(ring, gens)?;
    if ring.nvars() > DEFAULT_MAX_VARS {
        return Err(Error::VariableCap { needed: ring.nvars(), cap: DEFAULT_MAX_VARS });
    }
    let n = gens.len();
    let mut out: Vec<Vec<Poly>> = Vec::new();
    // zero generators contribute unit vectors
    for (i, g) in gens.iter().enumerate() {
        if g.is_zero() {
            out.push((0..n).map(|k| if k == i { ring.one() } else { ring.zero() }).collect());
        }
    }
    let tracked = compute(ring, gens, true);
    let g: Vec<Poly> = tracked.iter().map(|t| t.poly.clone()).collect();
    let a: Vec<&Vec<Poly>> = tracked.iter().map(|t| &t.cofactors).collect();
    let r = g.len();
    let lift = |sigma: &[Poly]| -> Vec<Poly> {
        (0..n)
            .map(|i| {
                let mut acc = ring.zero();
                for k in 0..r {
                    acc = &acc + &(&a[k][i] * &sigma[k]);
                }
                acc
            })
            .collect()
    };
    for l in 0..r {
        for k in 0..l {
            let (mk, _) = g[k].leading().unwrap();
            let (ml, _) = g[l].leading().unwrap();
            let lcm = mk.lcm(ml);
            let tk = mk.quotient_of(&lcm).unwrap();
            let tl = ml.quotient_of(&lcm).unwrap();
            let s = &g[k].mul_term(&tk, &Q::one()) - &g[l].mul_term(&tl, &Q::one());
            let (h, rem) = divide(ring, &s, &g);
            debug_assert!(rem.is_zero());
            let mut sigma: Vec<Poly> = h.iter().map(|x| -x).collect();
            sigma[k] = &sigma[k] + &Poly::from_terms(ring, vec![(tk, Q::one())]);
            sigma[l] = &sigma[l] - &Poly::from_terms(ring, vec![(tl, Q::one())]);
            out.push(lift(&sigma));
        }
    }
    for (i, f) in gens.iter().enumerate() {
        if f.is_zero() {
            continue;
        }
        let (b, rem) = divide(ring, f, &g);
        debug_assert!(rem.is_zero());
        let mut col: Vec<Poly> = lift(&b).iter().map(|x| -x).collect();
        col[i] = &col[i] + &ring.one();
        out.push(col);
    }
    let mut kept = Vec::new();
    for v in out {
        if all_zero(&v) {
            continue;
        }
        let mut total = ring.zero();
        for (q, f) in v.iter().zip(gens) {
            total = &total + &(q * f);
        }
        if !total.is_zero() {
            return Err(Error::TheoremViolation("syzygy failed substitution check".into()));
        }
        if !kept.contains(&v) {
            kept.push(v);
        }
    }
    Ok(kept)
}

/// True when every entry is zero.
fn all_zero(v: &[Poly]) -> bool {
    v.iter().all(|p| p.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q;

    fn r(names: &[&str]) -> Arc<PolyRing> {
        PolyRing::grevlex(names).unwrap()
    }

    #[test]
    fn linear_triangularization_in_lex() {
        let ring = PolyRing::new(&["x", "y"], MonomialOrder::Lex).unwrap();
        let (x, y) = (ring.var(0), ring.var(1));
        let gb = GroebnerBasis::new(&ring, &[&x - &y, &y - &ring.one()]).unwrap();
        let shown: Vec<String> = gb.polys().iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, vec!["x - 1", "y - 1"]);
    }

    #[test]
    fn hand_s_polynomial() {
        let ring = r(&["u", "v", "w"]);
        let (u, v, w) = (ring.var(0), ring.var(1), ring.var(2));
        let gb = GroebnerBasis::new(&ring, &[&(&u * &v) - &w, v.clone()]).unwrap();
        let shown: Vec<String> = gb.polys().iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, vec!["v", "w"]);
    }

    #[test]
    fn normal_forms() {
        let ring = r(&["u", "v", "s"]);
        let (u, v, s) = (ring.var(0), ring.var(1), ring.var(2));
        let gb = GroebnerBasis::new(&ring, &[&(&u * &v) - &s]).unwrap();
        assert_eq!(gb.normal_form(&(&u * &v)).unwrap(), s);
        let gbv = GroebnerBasis::new(&ring, std::slice::from_ref(&v)).unwrap();
        assert_eq!(gbv.normal_form(&u).unwrap(), u);
    }

    #[test]
    fn dimensions() {
        let ring = r(&["x", "y"]);
        let (x, y) = (ring.var(0), ring.var(1));
        assert_eq!(GroebnerBasis::new(&ring, std::slice::from_ref(&x)).unwrap().ideal_dim().unwrap(), 1);
        let hyp = &(&x * &y) - &ring.one();
        assert_eq!(GroebnerBasis::new(&ring, &[hyp]).unwrap().ideal_dim().unwrap(), 1);
        let unit = GroebnerBasis::new(&ring, &[ring.one()]).unwrap();
        assert_eq!(unit.ideal_dim(), Err(Error::EmptyVariety));
    }

    #[test]
    fn colon_ideals() {
        let ring = r(&["u", "v", "w"]);
        let (u, v, w) = (ring.var(0), ring.var(1), ring.var(2));
        let i = GroebnerBasis::new(&ring, &[&u * &w, &v * &w]).unwrap();
        let expect = GroebnerBasis::new(&ring, &[u.clone(), v.clone()]).unwrap();
        assert!(i.quotient(&w).unwrap().same_ideal(&expect));
        let sq = GroebnerBasis::new(&ring, &[&u * &u]).unwrap();
        assert!(sq.quotient(&u).unwrap().same_ideal(&GroebnerBasis::new(&ring, std::slice::from_ref(&u)).unwrap()));
        let uv = GroebnerBasis::new(&ring, &[&u * &v]).unwrap();
        assert!(uv.quotient(&u).unwrap().same_ideal(&GroebnerBasis::new(&ring, std::slice::from_ref(&v)).unwrap()));
    }

    #[test]
    fn regular_sequences() {
        let ring = r(&["x", "y", "z"]);
        let (x, y, z) = (ring.var(0), ring.var(1), ring.var(2));
        assert!(is_regular_sequence(&ring, &[x.clone(), y.clone()]).unwrap());
        assert!(!is_regular_sequence(&ring, &[x.clone(), x.clone()]).unwrap());
        assert!(!is_regular_sequence(&ring, &[&x * &y, &x * &z]).unwrap());
        assert!(is_regular_sequence(&ring, &[&(&x * &y) - &z.scale(&q(3))]).unwrap());
    }

    #[test]
    fn koszul_and_cusp_syzygies() {
        let ring = r(&["x", "y"]);
        let (x, y) = (ring.var(0), ring.var(1));
        let syz = syzygies(&ring, &[x.clone(), y.clone()]).unwrap();
        assert!(!syz.is_empty());
        let single = syzygies(&ring, &[&x * &y]).unwrap();
        assert!(single.iter().all(|v| all_zero(v)));
        // (x y, y^3, x^2 - y^3)
        let y3 = &(&y * &y) * &y;
        let gens = vec![&x * &y, y3.clone(), &(&x * &x) - &y3];
        let syz = syzygies(&ring, &gens).unwrap();
        for v in &syz {
            let mut t = ring.zero();
            for (a, b) in v.iter().zip(&gens) {
                t = &t + &(a * b);
            }
            assert!(t.is_zero());
        }
    }
}
