//! Flat deformations of the monomial ideals `Q_i^m = (x^{m-i+1}, y^i)` of the node.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coeff::{CoeffAlgebra, CoeffKind};
use crate::error::{Error, Result};
use crate::gb::GroebnerBasis;
use crate::oracle::{IdealGens, Oracle};
use crate::poly::{q, Poly, PolyRing, Q};
use crate::ring::{CurveMono, CurveRing, RingElement};

/// Index data of a generic deformation of `Q_i^m` at flag level `level`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct DeformShape {
    pub m: u32,
    pub i: u32,
    pub relative: bool,
    pub level: u32,
}

/// Name of a deformation coefficient, e.g. `a2_0` for `a_2` at level 0.
pub fn coeff_name(letter: char, j: u32, level: u32) -> String {
    format!("{letter}{j}_{level}")
}

pub const S_NAME: &str = "s";

impl DeformShape {
    pub fn new(m: u32, i: u32, relative: bool, level: u32) -> Result<Self> {
        if m == 0 || i == 0 || i > m {
            return Err(Error::InvalidInput(format!("need 1 <= i <= m, got m={m}, i={i}")));
        }
        Ok(DeformShape { m, i, relative, level })
    }

    /// Top x-exponent `m - i` of the coefficient ranges.
    pub fn top(&self) -> u32 {
        self.m - self.i
    }

    pub(crate) fn name(&self, letter: char, j: u32) -> String {
        coeff_name(letter, j, self.level)
    }

    /// Coefficient names in canonical order.
    pub fn coeff_names(&self) -> Vec<String> {
        let mut out = Vec::new();
        for j in 0..=self.top() {
            out.push(self.name('a', j));
        }
        for j in 1..self.i {
            out.push(self.name('b', j));
        }
        for j in 0..=self.top() {
            out.push(self.name('c', j));
        }
        for j in 1..self.i {
            out.push(self.name('d', j));
        }
        out
    }

    /// Name of `a_{m-i}`.
    pub fn a_top(&self) -> String {
        self.name('a', self.top())
    }

    /// Name of `c_{m-i}`.
    pub fn c_top(&self) -> String {
        self.name('c', self.top())
    }

    /// Coefficient of `y^{i-1}` in `f`: `b_{i-1}`, or `a_0` when `i = 1`.
    pub fn b_top(&self) -> String {
        if self.i == 1 {
            self.name('a', 0)
        } else {
            self.name('b', self.i - 1)
        }
    }

    /// Coefficient of `y^{i-1}` in `g`: `d_{i-1}`, or `c_0` when `i = 1`.
    pub fn d_top(&self) -> String {
        if self.i == 1 {
            self.name('c', 0)
        } else {
            self.name('d', self.i - 1)
        }
    }

    /// Monomial basis `1, x, .., x^{m-i}, y, .., y^{i-1}` of the quotient.
    pub fn basis(&self) -> Vec<CurveMono> {
        monomial_basis(self.m, self.i)
    }
}

pub fn monomial_basis(m: u32, i: u32) -> Vec<CurveMono> {
    let mut out = vec![CurveMono::ONE];
    out.extend((1..=m - i).map(|j| CurveMono::new(j, 0)));
    out.extend((1..i).map(|j| CurveMono::new(0, j)));
    out
}

/// Free coefficient ring on the given names, with `s` appended when relative.
pub fn coefficient_ring(names: &[String], relative: bool) -> Result<Arc<PolyRing>> {
    let mut all = names.to_vec();
    if relative {
        all.push(S_NAME.to_string());
    }
    PolyRing::grevlex(&all)
}

/// Curve ring over free coefficients, relative over `s` when requested.
pub fn generic_curve_ring(coeffs: &Arc<PolyRing>, relative: bool, trunc: u32) -> Result<Arc<CurveRing>> {
    let alg = CoeffAlgebra::over_ring(coeffs);
    if relative {
        CurveRing::node_relative(alg, S_NAME, trunc)
    } else {
        CurveRing::node(alg, trunc)
    }
}

/// The generic pair `(f, g)` inside a curve ring whose coefficients contain the shape's names.
pub fn generic_pair(shape: &DeformShape, ring: &Arc<CurveRing>) -> Result<(RingElement, RingElement)> {
    let alg = ring.coeff();
    let var = |n: String| alg.param(&n);
    let mut f = vec![((shape.top() + 1, 0), alg.one())];
    let mut g = vec![((0, shape.i), alg.one())];
    for j in 0..=shape.top() {
        f.push(((j, 0), var(shape.name('a', j))?));
        g.push(((j, 0), var(shape.name('c', j))?));
    }
    for j in 1..shape.i {
        f.push(((0, j), var(shape.name('b', j))?));
        g.push(((0, j), var(shape.name('d', j))?));
    }
    Ok((
        crate::ring::reduce_normal_form(f, ring),
        crate::ring::reduce_normal_form(g, ring),
    ))
}

/// Generic deformation `(f, g)` of `Q_i^m` over its own free coefficient ring.
pub fn generic_ideal(shape: &DeformShape) -> Result<IdealGens> {
    let coeffs = coefficient_ring(&shape.coeff_names(), shape.relative)?;
    let ring = generic_curve_ring(&coeffs, shape.relative, shape.m + 4)?;
    let (f, g) = generic_pair(shape, &ring)?;
    IdealGens::new(&ring, vec![f, g])
}

/// Polynomial equations among named coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationSet {
    ring: Arc<PolyRing>,
    equations: Vec<Poly>,
}

impl RelationSet {
    /// Monic, sorted and deduplicated; zero equations are dropped.
    pub fn new(ring: &Arc<PolyRing>, equations: Vec<Poly>) -> Self {
        let mut eqs: Vec<Poly> = equations.into_iter().filter(|p| !p.is_zero()).map(|p| p.monic()).collect();
        eqs.sort_by(|a, b| {
            ring.cmp(b.lm().unwrap(), a.lm().unwrap())
                .then_with(|| a.to_string().cmp(&b.to_string()))
        });
        eqs.dedup();
        RelationSet { ring: ring.clone(), equations: eqs }
    }

    pub fn ring(&self) -> &Arc<PolyRing> {
        &self.ring
    }

    pub fn equations(&self) -> &[Poly] {
        &self.equations
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn groebner(&self) -> Result<GroebnerBasis> {
        GroebnerBasis::new(&self.ring, &self.equations)
    }
}

fn coefficients(e: &RingElement) -> Vec<Poly> {
    e.terms().iter().map(|(_, c)| c.clone()).collect()
}

/// Coefficients of `y f - b_{i-1} g` and `x g - c_{m-i} f` in the free ring.
pub fn derive_flat_relations(shape: &DeformShape) -> Result<RelationSet> {
    let coeffs = coefficient_ring(&shape.coeff_names(), shape.relative)?;
    let ring = generic_curve_ring(&coeffs, shape.relative, shape.m + 4)?;
    flat_relations_in(shape, &ring)
}

/// As [`derive_flat_relations`] inside a shared coefficient ring.
pub fn flat_relations_in(shape: &DeformShape, ring: &Arc<CurveRing>) -> Result<RelationSet> {
    let (f, g) = generic_pair(shape, ring)?;
    let alg = ring.coeff();
    let big_b = alg.param(&shape.b_top())?;
    let big_c = alg.param(&shape.c_top())?;
    let x = RingElement::x(ring);
    let y = RingElement::y(ring);
    let e1 = y.mul(&f)?.sub(&g.scale(&big_b)?)?;
    let e2 = x.mul(&g)?.sub(&f.scale(&big_c)?)?;
    let mut eqs = coefficients(&e1);
    eqs.extend(coefficients(&e2));
    Ok(RelationSet::new(alg.ring(), eqs))
}

/// The closed-form relation families, with `a_{m-i+1} = d_i = 1` and `b_0 = a_0` when `i = 1`.
///
/// Absolute: `b_j = b_{i-1} d_{j+1}`, `b_{i-1} d_1 = a_0`, `b_{i-1} c_j = 0`, `c_j = c_{m-i} a_{j+1}`,
/// `c_{m-i} a_0 = 0`, `c_{m-i} b_j = 0`. Relative: the three vanishing families become
/// `b_{i-1} c_j = s a_{j+1}`, `c_{m-i} a_0 = s d_1`, `c_{m-i} b_j = s d_{j+1}`, plus `b_{i-1} c_{m-i} = s`.
pub fn closed_form_relations(shape: &DeformShape) -> Result<RelationSet> {
    let r = coefficient_ring(&shape.coeff_names(), shape.relative)?;
    let (top, i) = (shape.top(), shape.i);
    let v = |letter: char, j: u32| -> Result<Poly> {
        match letter {
            'a' if j == top + 1 => Ok(r.one()),
            'd' if j == i => Ok(r.one()),
            'b' if j == 0 => r.var_named(&shape.b_top()),
            _ => r.var_named(&shape.name(letter, j)),
        }
    };
    let big_b = r.var_named(&shape.b_top())?;
    let big_c = r.var_named(&shape.c_top())?;
    let mut eqs = Vec::new();
    for j in 1..i.saturating_sub(1) {
        eqs.push(&v('b', j)? - &(&big_b * &v('d', j + 1)?));
    }
    eqs.push(&(&big_b * &v('d', 1)?) - &v('a', 0)?);
    for j in 0..top {
        eqs.push(&v('c', j)? - &(&big_c * &v('a', j + 1)?));
    }
    if shape.relative {
        let s = r.var_named(S_NAME)?;
        for j in 0..top {
            eqs.push(&(&big_b * &v('c', j)?) - &(&s * &v('a', j + 1)?));
        }
        eqs.push(&(&big_c * &v('a', 0)?) - &(&s * &v('d', 1)?));
        for j in 1..i.saturating_sub(1) {
            eqs.push(&(&big_c * &v('b', j)?) - &(&s * &v('d', j + 1)?));
        }
        eqs.push(&(&big_b * &big_c) - &s);
    } else {
        for j in 0..=top {
            eqs.push(&big_b * &v('c', j)?);
        }
        eqs.push(&big_c * &v('a', 0)?);
        for j in 1..i {
            eqs.push(&big_c * &v('b', j)?);
        }
    }
    Ok(RelationSet::new(&r, eqs))
}

/// Report of a flatness-versus-relations experiment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlatReport {
    pub seed: u64,
    pub sufficiency_trials: usize,
    pub necessity_trials: usize,
    /// Random points that turned out flat.
    pub flat_random_points: usize,
    pub counterexamples: Vec<String>,
}

impl FlatReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// The sampling pool `{0, ±u, ±v, u+v, u², uv, v²}` for the first two parameters of `S`.
pub fn sample_pool(s: &CoeffAlgebra) -> Result<Vec<Poly>> {
    let names = s.ring().names();
    if names.is_empty() {
        return Err(Error::NotArtin);
    }
    let u = s.param(&names[0])?;
    let v = if names.len() > 1 { s.param(&names[1])? } else { u.clone() };
    let mut pool = vec![
        s.zero(),
        u.clone(),
        -&u,
        v.clone(),
        -&v,
        &u + &v,
        s.mul(&u, &u),
        s.mul(&u, &v),
        s.mul(&v, &v),
    ];
    pool.dedup();
    Ok(pool)
}

/// Value of `s` used in relative experiments: `uv`.
pub fn default_s_value(s: &CoeffAlgebra) -> Result<Poly> {
    let names = s.ring().names();
    let u = s.param(&names[0])?;
    let v = if names.len() > 1 { s.param(&names[1])? } else { u.clone() };
    Ok(s.mul(&u, &v))
}

/// Specialize generic generators at a point of `S` and test S-freeness on the monomial basis.
pub fn is_flat_at(
    oracle: &Oracle,
    generic: &[RingElement],
    basis: &[CurveMono],
    target: &Arc<CurveRing>,
    point: &BTreeMap<String, Poly>,
    hint: u32,
) -> Result<bool> {
    let gens = generic
        .iter()
        .map(|g| g.substitute(target, point))
        .collect::<Result<Vec<_>>>()?;
    let ideal = IdealGens::new(target, gens)?;
    oracle.s_free_rank(&ideal, basis, Some(hint))
}

/// Whether every relation vanishes at the point.
pub fn relations_hold(rel: &RelationSet, s: &CoeffAlgebra, point: &BTreeMap<String, Poly>) -> Result<bool> {
    for e in rel.equations() {
        if !s.evaluate(e, point)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Target curve ring over `S` for a shape, with `s ↦ s_value` when relative.
pub fn target_ring(s: &Arc<CoeffAlgebra>, relative: bool, s_value: &Poly, trunc: u32) -> Result<Arc<CurveRing>> {
    if relative {
        CurveRing::node_relative_at(s.clone(), s_value.clone(), trunc)
    } else {
        CurveRing::node(s.clone(), trunc)
    }
}

fn show_point(point: &BTreeMap<String, Poly>) -> String {
    point
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Point on the flat locus from free values `a_1.., d_1.., B, C`.
pub fn parametrized_point(
    shape: &DeformShape,
    s: &CoeffAlgebra,
    free_a: &[Poly],
    free_d: &[Poly],
    big_b: &Poly,
    big_c: &Poly,
) -> BTreeMap<String, Poly> {
    let (m, i) = (shape.m, shape.i);
    let top = m - i;
    let a = |j: u32| if j == top + 1 { s.one() } else { free_a[(j - 1) as usize].clone() };
    let d = |j: u32| if j == i { s.one() } else { free_d[(j - 1) as usize].clone() };
    let mut p = BTreeMap::new();
    for j in 1..=top {
        p.insert(shape.name('a', j), a(j));
    }
    for j in 1..i {
        p.insert(shape.name('d', j), d(j));
    }
    p.insert(shape.name('a', 0), s.mul(big_b, &d(1)));
    for j in 1..i {
        p.insert(shape.name('b', j), s.mul(big_b, &d(j + 1)));
    }
    for j in 0..=top {
        p.insert(shape.name('c', j), s.mul(big_c, &a(j + 1)));
    }
    if shape.relative {
        p.insert(S_NAME.to_string(), s.mul(big_b, big_c));
    }
    p
}

fn draw(rng: &mut ChaCha8Rng, pool: &[Poly]) -> Poly {
    pool.choose(rng).expect("nonempty pool").clone()
}

/// Random `(B, C)` with `B C = s_value` (relative) or `B C = 0` (absolute).
fn draw_bc(rng: &mut ChaCha8Rng, s: &CoeffAlgebra, pool: &[Poly], relative: bool) -> Result<(Poly, Poly)> {
    let names = s.ring().names();
    let u = s.param(&names[0])?;
    let v = if names.len() > 1 { s.param(&names[1])? } else { u.clone() };
    let quad: Vec<Poly> = pool.iter().filter(|p| p.min_degree() >= 2).cloned().collect();
    let nil = s.nil_order().unwrap_or(3);
    let tail = |rng: &mut ChaCha8Rng| -> Poly {
        if nil >= 3 && !quad.is_empty() && rng.gen_bool(0.5) {
            quad.choose(rng).unwrap().clone()
        } else {
            s.zero()
        }
    };
    if relative {
        let sign = if rng.gen_bool(0.5) { q(1) } else { q(-1) };
        let (p1, p2) = if rng.gen_bool(0.5) { (u, v) } else { (v, u) };
        let b = &p1.scale(&sign) + &tail(rng);
        let c = &p2.scale(&sign) + &tail(rng);
        Ok((b, c))
    } else {
        let mut killers: Vec<Poly> = vec![s.zero()];
        killers.extend(quad.iter().cloned());
        let k = killers.choose(rng).unwrap().clone();
        let other = draw(rng, pool);
        Ok(if rng.gen_bool(0.5) { (k, other) } else { (other, k) })
    }
}

/// Randomized check that flatness over `S` is equivalent to the derived relations.
pub fn verify_flat_iff(
    shape: &DeformShape,
    s: &Arc<CoeffAlgebra>,
    trials: usize,
    seed: u64,
    oracle: &Oracle,
) -> Result<FlatReport> {
    if !matches!(s.kind(), CoeffKind::TruncatedArtin { .. }) {
        return Err(Error::NotArtin);
    }
    let rel = derive_flat_relations(shape)?;
    let generic = generic_ideal(shape)?;
    let s_value = if shape.relative { default_s_value(s)? } else { s.zero() };
    let target = target_ring(s, shape.relative, &s_value, shape.m + 8)?;
    let basis = shape.basis();
    let pool = sample_pool(s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = FlatReport {
        seed,
        sufficiency_trials: 0,
        necessity_trials: 0,
        flat_random_points: 0,
        counterexamples: Vec::new(),
    };
    let top = shape.top() as usize;
    let nd = (shape.i - 1) as usize;
    for t in 0..trials {
        let free_a: Vec<Poly> = (0..top).map(|_| draw(&mut rng, &pool)).collect();
        let free_d: Vec<Poly> = (0..nd).map(|_| draw(&mut rng, &pool)).collect();
        let (b, c) = draw_bc(&mut rng, s, &pool, shape.relative)?;
        let point = parametrized_point(shape, s, &free_a, &free_d, &b, &c);
        report.sufficiency_trials += 1;
        let holds = relations_hold(&rel, s, &point)?;
        let flat = is_flat_at(oracle, generic.gens(), &basis, &target, &point, shape.m)?;
        if !holds || !flat {
            report
                .counterexamples
                .push(format!("sufficiency trial {t}: relations={holds} flat={flat} at {}", show_point(&point)));
        }
        // a perturbed or fully random point: flatness must match the relations
        let mut raw = point.clone();
        if t % 2 == 0 {
            let names = shape.coeff_names();
            let k = names.choose(&mut rng).unwrap().clone();
            let bump = draw(&mut rng, &pool);
            let cur = raw.get(&k).cloned().unwrap_or_else(|| s.zero());
            raw.insert(k, &cur + &bump);
        } else {
            for n in shape.coeff_names() {
                raw.insert(n, draw(&mut rng, &pool));
            }
        }
        if shape.relative {
            raw.insert(S_NAME.to_string(), s_value.clone());
        }
        report.necessity_trials += 1;
        let holds = relations_hold(&rel, s, &raw)?;
        let flat = is_flat_at(oracle, generic.gens(), &basis, &target, &raw, shape.m)?;
        if flat {
            report.flat_random_points += 1;
        }
        if holds != flat {
            report
                .counterexamples
                .push(format!("necessity trial {t}: relations={holds} flat={flat} at {}", show_point(&raw)));
        }
    }
    Ok(report)
}

/// Classification of an ideal of the node ring over ℚ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type")]
pub enum NodeClass {
    /// `(y^i + a x^{m-i})`
    TypeC { i: u32, m: u32, a: String },
    /// `(x^{m-i+1}, y^i)`
    TypeQ { i: u32, m: u32 },
    NotPunctual,
}

/// `Q_i^m` over ℚ.
pub fn q_ideal(ring: &Arc<CurveRing>, i: u32, m: u32) -> Result<IdealGens> {
    if i == 0 || i > m {
        return Err(Error::InvalidInput(format!("Q_{i}^{m} is defined for 1 <= i <= m")));
    }
    IdealGens::new(
        ring,
        vec![
            RingElement::monomial(ring, m - i + 1, 0, q(1)),
            RingElement::monomial(ring, 0, i, q(1)),
        ],
    )
}

/// `(y^i + a x^{m-i})` over ℚ.
pub fn c_ideal(ring: &Arc<CurveRing>, i: u32, m: u32, a: &Q) -> Result<IdealGens> {
    if i == 0 || i >= m {
        return Err(Error::InvalidInput(format!("C_{i}^{m} needs 1 <= i <= m-1")));
    }
    let g = RingElement::monomial(ring, 0, i, q(1)).add(&RingElement::monomial(ring, m - i, 0, a.clone()))?;
    IdealGens::new(ring, vec![g])
}

/// Classify an ideal of the absolute node ring over ℚ.
pub fn classify_node_ideal(ideal: &IdealGens, oracle: &Oracle) -> Result<NodeClass> {
    let ring = ideal.ring();
    if !matches!(ring.kind(), crate::ring::CurveKind::NodeAbsolute)
        || !matches!(ring.coeff().kind(), CoeffKind::Rationals)
    {
        return Err(Error::InvalidInput("expected the absolute node over the rationals".into()));
    }
    if ideal.gens().iter().any(|g| !g.coefficient(CurveMono::ONE).is_zero()) {
        return Ok(NodeClass::NotPunctual);
    }
    let quotient = oracle.stable_quotient(ideal, None)?;
    let m = quotient.dim() as u32;
    if m == 0 {
        return Ok(NodeClass::NotPunctual);
    }
    for i in 1..=m {
        if oracle.ideal_equal(ideal, &q_ideal(ring, i, m)?)? {
            return Ok(NodeClass::TypeQ { i, m });
        }
    }
    for i in 1..m {
        let yi = quotient.coordinates(&RingElement::monomial(ring, 0, i, q(1)))?;
        let xk = quotient.coordinates(&RingElement::monomial(ring, m - i, 0, q(1)))?;
        let Some(p) = xk.iter().position(|c| !num_traits::Zero::is_zero(c)) else { continue };
        let a = -(&yi[p] / &xk[p]);
        if num_traits::Zero::is_zero(&a) {
            continue;
        }
        let proportional = yi.iter().zip(&xk).all(|(u, v)| num_traits::Zero::is_zero(&(u + &a * v)));
        if proportional && oracle.ideal_equal(ideal, &c_ideal(ring, i, m, &a)?)? {
            return Ok(NodeClass::TypeC { i, m, a: crate::poly::fmt_q(&a) });
        }
    }
    Err(Error::TheoremViolation(format!("colength {m} ideal matches no node family")))
}

/// Components `C_i^m` and gluing points `Q_i^m` of the punctual Hilbert scheme.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PunctualChain {
    pub m: u32,
    /// Lower indices `i` of the components `C_i^m`, each the family `(y^i + a x^{m-i})`.
    pub components: Vec<u32>,
    /// Lower indices of the gluing points `Q_i^m` between consecutive components.
    pub gluing_points: Vec<u32>,
}

impl PunctualChain {
    /// Member of component `i` at parameter `a`.
    pub fn component_at(&self, ring: &Arc<CurveRing>, i: u32, a: &Q) -> Result<IdealGens> {
        c_ideal(ring, i, self.m, a)
    }

    pub fn gluing_ideal(&self, ring: &Arc<CurveRing>, i: u32) -> Result<IdealGens> {
        q_ideal(ring, i, self.m)
    }
}

pub fn punctual_chain(m: u32) -> Result<PunctualChain> {
    if m < 2 {
        return Err(Error::InvalidInput("the punctual chain needs m >= 2".into()));
    }
    Ok(PunctualChain { m, components: (1..m).collect(), gluing_points: (2..m).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::qr;

    fn shown(rel: &RelationSet) -> Vec<String> {
        rel.equations().iter().map(|p| p.to_string()).collect()
    }

    #[test]
    fn generic_ideals_match_index_ranges() {
        let g = generic_ideal(&DeformShape::new(2, 1, false, 0).unwrap()).unwrap();
        assert_eq!(g.gens()[0].to_string(), "a0_0 + a1_0*x + x^2");
        assert_eq!(g.gens()[1].to_string(), "c0_0 + c1_0*x + y");
        let g = generic_ideal(&DeformShape::new(3, 2, false, 0).unwrap()).unwrap();
        assert_eq!(g.gens()[0].to_string(), "a0_0 + a1_0*x + b1_0*y + x^2");
        assert_eq!(g.gens()[1].to_string(), "c0_0 + c1_0*x + d1_0*y + y^2");
        let g = generic_ideal(&DeformShape::new(1, 1, false, 0).unwrap()).unwrap();
        assert_eq!(g.gens()[0].to_string(), "a0_0 + x");
    }

    #[test]
    fn derived_relations_match_the_closed_form() {
        for m in 1..=5 {
            for i in 1..=m {
                for relative in [false, true] {
                    let shape = DeformShape::new(m, i, relative, 0).unwrap();
                    let derived = derive_flat_relations(&shape).unwrap();
                    let closed = closed_form_relations(&shape).unwrap();
                    assert!(
                        crate::gb::ideals_equal(derived.ring(), derived.equations(), closed.equations()).unwrap(),
                        "m={m} i={i} relative={relative}"
                    );
                }
            }
        }
    }

    #[test]
    fn degenerate_shape_relations() {
        let rel = derive_flat_relations(&DeformShape::new(1, 1, false, 0).unwrap()).unwrap();
        assert_eq!(shown(&rel), vec!["a0_0*c0_0"]);
    }

    #[test]
    fn absolute_and_relative_products() {
        let rel = derive_flat_relations(&DeformShape::new(4, 2, false, 0).unwrap()).unwrap();
        let gb = rel.groebner().unwrap();
        let r = rel.ring();
        let b1 = r.var_named("b1_0").unwrap();
        for j in 0..=2 {
            let c = r.var_named(&format!("c{j}_0")).unwrap();
            assert!(gb.contains(&(&b1 * &c)).unwrap());
        }
        let rel = derive_flat_relations(&DeformShape::new(4, 2, true, 0).unwrap()).unwrap();
        let gb = rel.groebner().unwrap();
        let r = rel.ring();
        let b1 = r.var_named("b1_0").unwrap();
        let s = r.var_named("s").unwrap();
        let c2 = r.var_named("c2_0").unwrap();
        assert!(gb.contains(&(&(&b1 * &c2) - &s)).unwrap());
        for j in 0..2 {
            let c = r.var_named(&format!("c{j}_0")).unwrap();
            let a = r.var_named(&format!("a{}_0", j + 1)).unwrap();
            assert!(gb.contains(&(&(&b1 * &c) - &(&s * &a))).unwrap());
        }
    }

    #[test]
    fn relative_flatness_detects_the_product_relation() {
        let shape = DeformShape::new(3, 2, true, 0).unwrap();
        let s = CoeffAlgebra::uv_cubed();
        let generic = generic_ideal(&shape).unwrap();
        let oracle = Oracle::default();
        let mut p: BTreeMap<String, Poly> = shape.coeff_names().into_iter().map(|n| (n, s.zero())).collect();
        p.insert("b1_0".into(), s.param("u").unwrap());
        p.insert("c1_0".into(), s.param("v").unwrap());
        let uv = default_s_value(&s).unwrap();
        let good = target_ring(&s, true, &uv, 12).unwrap();
        assert!(is_flat_at(&oracle, generic.gens(), &shape.basis(), &good, &p, 3).unwrap());
        let bad = target_ring(&s, true, &s.zero(), 12).unwrap();
        assert!(!is_flat_at(&oracle, generic.gens(), &shape.basis(), &bad, &p, 3).unwrap());
        let zero: BTreeMap<String, Poly> = shape.coeff_names().into_iter().map(|n| (n, s.zero())).collect();
        assert!(!is_flat_at(&oracle, generic.gens(), &shape.basis(), &good, &zero, 3).unwrap());
    }

    #[test]
    fn small_iff_run() {
        let shape = DeformShape::new(3, 2, true, 0).unwrap();
        let rep = verify_flat_iff(&shape, &CoeffAlgebra::uv_cubed(), 6, 7, &Oracle::default()).unwrap();
        assert!(rep.passed(), "{:?}", rep.counterexamples);
    }

    #[test]
    fn classification_examples() {
        let n = CurveRing::node(CoeffAlgebra::rationals(), 32).unwrap();
        let o = Oracle::default();
        let g = RingElement::monomial(&n, 0, 2, q(1)).add(&RingElement::monomial(&n, 2, 0, q(5))).unwrap();
        assert_eq!(
            classify_node_ideal(&IdealGens::new(&n, vec![g]).unwrap(), &o).unwrap(),
            NodeClass::TypeC { i: 2, m: 4, a: "5".into() }
        );
        assert_eq!(classify_node_ideal(&q_ideal(&n, 2, 4).unwrap(), &o).unwrap(), NodeClass::TypeQ { i: 2, m: 4 });
        let unit = RingElement::x(&n).add(&RingElement::one(&n)).unwrap();
        assert_eq!(classify_node_ideal(&IdealGens::new(&n, vec![unit]).unwrap(), &o).unwrap(), NodeClass::NotPunctual);
        let c = c_ideal(&n, 1, 3, &qr(-2, 7)).unwrap();
        assert_eq!(classify_node_ideal(&c, &o).unwrap(), NodeClass::TypeC { i: 1, m: 3, a: "-2/7".into() });
    }

    #[test]
    fn chains() {
        let c = punctual_chain(3).unwrap();
        assert_eq!(c.components, vec![1, 2]);
        assert_eq!(c.gluing_points, vec![2]);
        assert_eq!(punctual_chain(2).unwrap().gluing_points, Vec::<u32>::new());
        assert_eq!(punctual_chain(5).unwrap().components.len(), 4);
        assert!(punctual_chain(1).is_err());
    }
}
