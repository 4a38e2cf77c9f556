//! Tangent spaces `Hom_R(I, R/I)` of the cusp Hilbert scheme.

use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::cusp::{classify_cusp_ideal, CuspCanonicalIdeal};
use crate::error::{Error, Result};
use crate::gb::syzygies;
use crate::linalg::kernel;
use crate::oracle::{IdealGens, Oracle, Quotient};
use crate::poly::{q, Monomial, Poly, PolyRing, Q};
use crate::ring::{reduce_normal_form, CurveKind, CurveMono, CurveRing, RingElement};

/// How the relations between the generators were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HomMethod {
    MatrixFactorization,
    Syzygy,
}

/// A basis of `Hom_R(I, R/I)` as images of the generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomSpace {
    pub generators: Vec<RingElement>,
    pub dimension: usize,
    /// Each entry lists the images `h_1..h_n` of the generators.
    pub basis: Vec<Vec<RingElement>>,
    pub relations: Vec<Vec<RingElement>>,
    pub method: HomMethod,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomView {
    pub generators: Vec<String>,
    pub dim: usize,
    pub method: HomMethod,
    pub basis: Vec<Vec<String>>,
}

impl HomSpace {
    pub fn view(&self) -> HomView {
        HomView {
            generators: self.generators.iter().map(|g| g.to_string()).collect(),
            dim: self.dimension,
            method: self.method,
            basis: self.basis.iter().map(|v| v.iter().map(|h| h.to_string()).collect()).collect(),
        }
    }
}

/// The two-generator ideals with a periodic 2x2 resolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MfFamily {
    /// `(x y^m, y^(m+2))`
    Even,
    /// `(x y^(m+1), y^(m+2))`
    Odd,
}

/// Resolution data `d0 = [g1, g2]`, `d1` with `d0 * d1 = 0` and `d1 * psi = (x^2 - y^3) * 1`.
#[derive(Clone, Debug)]
pub struct MatrixFactorization {
    pub d0: [Poly; 2],
    pub d1: [[Poly; 2]; 2],
    pub psi: [[Poly; 2]; 2],
}

fn xy_ring() -> Arc<PolyRing> {
    PolyRing::grevlex(&["x", "y"]).expect("two variables")
}

fn mono_poly(r: &Arc<PolyRing>, a: u32, b: u32, c: Q) -> Poly {
    Poly::from_terms(r, vec![(Monomial::from_exps(vec![a as u16, b as u16]), c)])
}

fn mat_mul(a: &[[Poly; 2]; 2], b: &[[Poly; 2]; 2]) -> [[Poly; 2]; 2] {
    let e = |i: usize, j: usize| &(&a[i][0] * &b[0][j]) + &(&a[i][1] * &b[1][j]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

impl MatrixFactorization {
    pub fn new(family: MfFamily, m: u32) -> Result<Self> {
        let r = xy_ring();
        let p = |a: u32, b: u32, c: i64| mono_poly(&r, a, b, q(c));
        let (d0, d1, psi) = match family {
            MfFamily::Even => (
                [p(1, m, 1), p(0, m + 2, -1)],
                [[p(0, 2, 1), p(1, 0, 1)], [p(1, 0, 1), p(0, 1, 1)]],
                [[p(0, 1, 1), p(1, 0, -1)], [p(1, 0, -1), p(0, 2, 1)]],
            ),
            MfFamily::Odd => (
                [p(1, m + 1, 1), p(0, m + 2, -1)],
                [[p(1, 0, 1), p(0, 1, 1)], [p(0, 2, 1), p(1, 0, 1)]],
                [[p(1, 0, -1), p(0, 1, 1)], [p(0, 2, 1), p(1, 0, -1)]],
            ),
        };
        let mf = MatrixFactorization { d0, d1, psi };
        mf.check(&r)?;
        Ok(mf)
    }

    fn check(&self, r: &Arc<PolyRing>) -> Result<()> {
        let f = &mono_poly(r, 2, 0, q(1)) - &mono_poly(r, 0, 3, q(1));
        let prod = mat_mul(&self.d1, &self.psi);
        let f_neg = -&f;
        // d1 * psi = -(x^2 - y^3) or +(x^2 - y^3) times the identity
        let scalar_ok = |s: &Poly| {
            prod[0][1].is_zero() && prod[1][0].is_zero() && &prod[0][0] == s && &prod[1][1] == s
        };
        if !(scalar_ok(&f) || scalar_ok(&f_neg)) {
            return Err(Error::TheoremViolation("not a matrix factorization".into()));
        }
        for j in 0..2 {
            let s = &(&self.d0[0] * &self.d1[0][j]) + &(&self.d0[1] * &self.d1[1][j]);
            let s = reduce_poly_mod_cusp(&s);
            if !s.is_zero() {
                return Err(Error::TheoremViolation("resolution columns are not relations".into()));
            }
        }
        Ok(())
    }

    /// Columns of `d1` as relations between the entries of `d0`.
    pub fn relations(&self, ring: &Arc<CurveRing>) -> Vec<Vec<RingElement>> {
        (0..2).map(|j| vec![to_element(ring, &self.d1[0][j]), to_element(ring, &self.d1[1][j])]).collect()
    }

    pub fn generators(&self, ring: &Arc<CurveRing>) -> Vec<RingElement> {
        self.d0.iter().map(|g| to_element(ring, g)).collect()
    }
}

fn reduce_poly_mod_cusp(p: &Poly) -> Poly {
    let r = p.ring();
    let terms = p
        .terms()
        .iter()
        .map(|(mo, c)| {
            let (a, b) = (mo.exps()[0] as u32, mo.exps()[1] as u32);
            (Monomial::from_exps(vec![(a % 2) as u16, (b + 3 * (a / 2)) as u16]), c.clone())
        })
        .collect();
    Poly::from_terms(r, terms)
}

fn to_element(ring: &Arc<CurveRing>, p: &Poly) -> RingElement {
    let raw: Vec<((u32, u32), Poly)> = p
        .terms()
        .iter()
        .map(|(mo, c)| ((mo.exps()[0] as u32, mo.exps()[1] as u32), ring.coeff().scalar(c.clone())))
        .collect();
    reduce_normal_form(raw, ring)
}

fn to_poly(r: &Arc<PolyRing>, e: &RingElement) -> Result<Poly> {
    let rat = e.rational_terms().ok_or_else(|| Error::InvalidInput("coefficients must be rational".into()))?;
    Ok(Poly::from_terms(r, rat.into_iter().map(|(m, c)| (Monomial::from_exps(vec![m.x as u16, m.y as u16]), c)).collect()))
}

fn check_cusp(ring: &CurveRing) -> Result<()> {
    if matches!(ring.kind(), CurveKind::Cusp) {
        Ok(())
    } else {
        Err(Error::InvalidInput("tangent spaces are computed for the cusp ring".into()))
    }
}

/// Relations among the generators: syzygies of `(g_1..g_n, x^2 - y^3)` with the last entry dropped.
pub fn generator_relations(ideal: &IdealGens) -> Result<Vec<Vec<RingElement>>> {
    let ring = ideal.ring();
    check_cusp(ring)?;
    let r = xy_ring();
    let mut gens: Vec<Poly> = ideal.gens().iter().map(|g| to_poly(&r, g)).collect::<Result<_>>()?;
    gens.push(&mono_poly(&r, 2, 0, q(1)) - &mono_poly(&r, 0, 3, q(1)));
    let n = ideal.gens().len();
    let mut out = Vec::new();
    for syz in syzygies(&r, &gens)? {
        let rel: Vec<RingElement> = syz[..n].iter().map(|p| to_element(ring, p)).collect();
        if rel.iter().all(|e| e.is_zero()) {
            continue;
        }
        let mut total = RingElement::zero(ring);
        for (c, g) in rel.iter().zip(ideal.gens()) {
            total = total.add(&c.mul(g)?)?;
        }
        if !total.is_zero() {
            return Err(Error::TheoremViolation("relation fails in the cusp ring".into()));
        }
        out.push(rel);
    }
    Ok(out)
}

fn max_degree(rels: &[Vec<RingElement>]) -> u32 {
    rels.iter().flatten().map(|e| e.degree()).max().unwrap_or(0)
}

/// Kernel of the relations acting on `(R/I)^n`.
fn solve_hom(
    ideal: &IdealGens,
    rels: &[Vec<RingElement>],
    method: HomMethod,
    oracle: &Oracle,
) -> Result<HomSpace> {
    let stable = oracle.stable_quotient(ideal, None)?;
    let d = stable.trunc() + max_degree(rels);
    let first = hom_at(ideal, rels, d, method)?;
    let second = hom_at(ideal, rels, d + 1, method)?;
    if first.dimension != second.dimension {
        return Err(Error::InfiniteColength { cap: d + 1 });
    }
    Ok(first)
}

fn hom_at(ideal: &IdealGens, rels: &[Vec<RingElement>], d: u32, method: HomMethod) -> Result<HomSpace> {
    let ring = ideal.ring();
    let n = ideal.gens().len();
    let quot = Quotient::build(ideal, d)?;
    let basis: Vec<CurveMono> = quot.basis().into_iter().map(|(m, _)| m).collect();
    let c = basis.len();
    let elems: Vec<RingElement> = basis.iter().map(|m| RingElement::monomial(ring, m.x, m.y, q(1))).collect();
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for rel in rels {
        let mut block = vec![vec![Q::zero(); n * c]; c];
        for (j, qj) in rel.iter().enumerate() {
            if qj.is_zero() {
                continue;
            }
            for (i, b) in elems.iter().enumerate() {
                let coords = quot.coordinates(&qj.mul(b)?)?;
                for (r, v) in coords.into_iter().enumerate() {
                    block[r][j * c + i] = v;
                }
            }
        }
        rows.extend(block.into_iter().filter(|row| row.iter().any(|v| !v.is_zero())));
    }
    let ker = kernel(&rows, n * c);
    let basis_out: Vec<Vec<RingElement>> = ker
        .iter()
        .map(|v| {
            (0..n)
                .map(|j| {
                    let raw = (0..c)
                        .filter(|&i| !v[j * c + i].is_zero())
                        .map(|i| ((basis[i].x, basis[i].y), ring.coeff().scalar(v[j * c + i].clone())));
                    reduce_normal_form(raw.collect::<Vec<_>>(), ring)
                })
                .collect()
        })
        .collect();
    Ok(HomSpace {
        generators: ideal.gens().to_vec(),
        dimension: ker.len(),
        basis: basis_out,
        relations: rels.to_vec(),
        method,
    })
}

/// `Hom_R(I, R/I)` from the syzygies of the given generators.
pub fn hom_space_generic(ideal: &IdealGens, oracle: &Oracle) -> Result<HomSpace> {
    let rels = generator_relations(ideal)?;
    solve_hom(ideal, &rels, HomMethod::Syzygy, oracle)
}

/// `Hom_R(I, R/I)` for a matrix-factorization family, in terms of the generators `d0`.
pub fn hom_space_family(ring: &Arc<CurveRing>, family: MfFamily, m: u32, oracle: &Oracle) -> Result<HomSpace> {
    check_cusp(ring)?;
    let mf = MatrixFactorization::new(family, m)?;
    let ideal = IdealGens::new(ring, mf.generators(ring))?;
    solve_hom(&ideal, &mf.relations(ring), HomMethod::MatrixFactorization, oracle)
}

/// `Hom_R(I, R/I)`; ideals equal to a matrix-factorization family use its resolution.
pub fn hom_space(ideal: &IdealGens, oracle: &Oracle) -> Result<HomSpace> {
    check_cusp(ideal.ring())?;
    let family = match classify_cusp_ideal(ideal, oracle) {
        Ok(CuspCanonicalIdeal::TwoGen(m, 2)) => Some((MfFamily::Even, m)),
        Ok(CuspCanonicalIdeal::TwoGen(m, 1)) if m >= 1 => Some((MfFamily::Odd, m - 1)),
        _ => None,
    };
    match family {
        Some((f, m)) => hom_space_family(ideal.ring(), f, m, oracle),
        None => hom_space_generic(ideal, oracle),
    }
}

pub fn hom_dim(ideal: &IdealGens, oracle: &Oracle) -> Result<usize> {
    Ok(hom_space(ideal, oracle)?.dimension)
}

/// Every basis tuple is killed by every relation modulo the ideal.
pub fn verify_hom_space(ideal: &IdealGens, space: &HomSpace, oracle: &Oracle) -> Result<bool> {
    let quot = oracle.stable_quotient(ideal, None)?;
    for h in &space.basis {
        for rel in &space.relations {
            let mut total = RingElement::zero(ideal.ring());
            for (qj, hj) in rel.iter().zip(h) {
                total = total.add(&qj.mul(hj)?)?;
            }
            if !quot.contains(&total)? {
                return Ok(false);
            }
        }
    }
    Ok(space.dimension == space.basis.len())
}

/// Explicit Hom basis for the even family `(x y^m, y^{m+2})`, `m >= 2`, as tuples of images.
pub fn explicit_even_basis(ring: &Arc<CurveRing>, m: u32) -> Result<Vec<Vec<RingElement>>> {
    check_cusp(ring)?;
    if m < 2 {
        return Err(Error::InvalidInput(format!("the explicit basis needs m >= 2, got {m}")));
    }
    let mono = |a: u32, b: u32, c: i64| RingElement::monomial(ring, a, b, q(c));
    let zero = RingElement::zero(ring);
    let mut out = vec![
        vec![zero.clone(), mono(0, m + 1, 1)],
        vec![zero.clone(), mono(1, m - 1, 1)],
        vec![mono(0, m + 1, 1), zero.clone()],
        vec![mono(0, m, 1), zero.clone()],
        vec![mono(1, m - 1, 1), zero],
    ];
    for j in 0..=m - 2 {
        out.push(vec![mono(1, j, 1), mono(0, j + 2, -1)]);
    }
    for j in 1..=m - 1 {
        out.push(vec![mono(0, j, 1), mono(1, j - 1, -1)]);
    }
    Ok(out)
}

/// Whether the given tuples of images are independent homomorphisms lying in the space.
pub fn tuples_in_kernel(
    ideal: &IdealGens,
    relations: &[Vec<RingElement>],
    tuples: &[Vec<RingElement>],
    oracle: &Oracle,
) -> Result<(bool, usize)> {
    let quot = oracle.stable_quotient(ideal, None)?;
    let mut all_in = true;
    for h in tuples {
        for rel in relations {
            let mut total = RingElement::zero(ideal.ring());
            for (qj, hj) in rel.iter().zip(h) {
                total = total.add(&qj.mul(hj)?)?;
            }
            all_in &= quot.contains(&total)?;
        }
    }
    let mut rows = Vec::new();
    for h in tuples {
        let mut row = Vec::new();
        for hj in h {
            row.extend(quot.coordinates(hj)?);
        }
        rows.push(row);
    }
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let rank = crate::linalg::rank(&rows, ncols);
    Ok((all_in, rank))
}

/// `dim Hom_R((g), R/(g))`, the colength, cross-checked against the syzygy computation.
pub fn principal_hom_dim(g: &RingElement, oracle: &Oracle) -> Result<usize> {
    check_cusp(g.ring())?;
    if g.is_zero() {
        return Err(Error::Zero);
    }
    let ideal = IdealGens::new(g.ring(), vec![g.clone()])?;
    let c = oracle.colength(&ideal)?;
    let generic = hom_space_generic(&ideal, oracle)?.dimension;
    if generic != c {
        return Err(Error::TheoremViolation(format!("Hom of ({g}) has dimension {generic}, colength {c}")));
    }
    Ok(c)
}

/// Chart of the one-parameter family of `(x y^m + a y^(m+k))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyChart {
    /// `x y^m + a y^(m+k)`
    Finite,
    /// `b x y^m + y^(m+k)`, `b = 1/a`
    Infinity,
}

/// The tangent vector of a principal family: the generator is sent to its derivative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyTangent {
    pub generator: RingElement,
    pub derivative: RingElement,
    /// The derivative reduced to the quotient basis.
    pub image: RingElement,
    pub nonzero: bool,
}

/// Tangent vector of a principal family `g(t)` at a point, given `g` and `dg/dt` there.
pub fn principal_family_tangent(g: &RingElement, dg: &RingElement, oracle: &Oracle) -> Result<FamilyTangent> {
    let ideal = IdealGens::new(g.ring(), vec![g.clone()])?;
    let quot = oracle.stable_quotient(&ideal, None)?;
    let coords = quot.coordinates(dg)?;
    let basis = quot.basis();
    let raw: Vec<((u32, u32), Poly)> = coords
        .iter()
        .zip(&basis)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, (m, _))| ((m.x, m.y), g.ring().coeff().scalar(c.clone())))
        .collect();
    let image = reduce_normal_form(raw, g.ring());
    Ok(FamilyTangent { generator: g.clone(), derivative: dg.clone(), nonzero: !image.is_zero(), image })
}

/// Tangent vector along `a` (or `b = 1/a`) of the family `(x y^m + a y^(m+k))`.
pub fn family_tangent(
    ring: &Arc<CurveRing>,
    m: u32,
    k: u32,
    chart: FamilyChart,
    at: &Q,
    oracle: &Oracle,
) -> Result<FamilyTangent> {
    check_cusp(ring)?;
    if k != 1 && k != 2 {
        return Err(Error::InvalidInput(format!("k must be 1 or 2, got {k}")));
    }
    let s = ring.coeff().scalar(at.clone());
    let one = ring.coeff().scalar(q(1));
    let (g, dg) = match chart {
        FamilyChart::Finite => {
            if at.is_zero() {
                return Err(Error::InvalidInput("a = 0 lies outside the finite chart family".into()));
            }
            let g = reduce_normal_form([((1, m), one.clone()), ((0, m + k), s)], ring);
            (g, RingElement::monomial(ring, 0, m + k, q(1)))
        }
        FamilyChart::Infinity => {
            let g = reduce_normal_form([((1, m), s), ((0, m + k), one)], ring);
            (g, RingElement::monomial(ring, 1, m, q(1)))
        }
    };
    principal_family_tangent(&g, &dg, oracle)
}

/// One row of a scan along the punctual family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanPoint {
    /// `a` as a string, or `0`/`inf` for the boundary points.
    pub param: String,
    pub ideal: String,
    pub dim: usize,
    pub singular: bool,
}

/// Tangent dimensions along `(x + a y)` (colength 2) or `(x + a y^2)` (colength 3), with the
/// limits at `a = 0` and `a = ∞`.
pub fn p1_scan(ring: &Arc<CurveRing>, colength: u32, samples: &[Q], oracle: &Oracle) -> Result<Vec<ScanPoint>> {
    check_cusp(ring)?;
    let k = match colength {
        2 => 1,
        3 => 2,
        _ => return Err(Error::InvalidInput("the scan covers colength 2 and 3".into())),
    };
    if samples.is_empty() {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let (zero, inf) = match k {
        1 => (CuspCanonicalIdeal::TwoGen(0, 2), CuspCanonicalIdeal::PowY(1)),
        _ => (CuspCanonicalIdeal::X, CuspCanonicalIdeal::TwoGen(1, 1)),
    };
    let mut sorted: Vec<Q> = samples.iter().filter(|a| !a.is_zero()).cloned().collect();
    sorted.sort();
    sorted.dedup();
    let mut out = Vec::new();
    let expected = colength as usize;
    let mut push = |param: String, c: &CuspCanonicalIdeal, dim: usize| {
        out.push(ScanPoint { param, ideal: c.to_string(), dim, singular: dim > expected });
    };
    push("0".into(), &zero, hom_dim(&zero.ideal(ring)?, oracle)?);
    for a in &sorted {
        let c = CuspCanonicalIdeal::binom(0, k, a.clone())?;
        let g = c.generators(ring).remove(0);
        push(a.to_string(), &c, principal_hom_dim(&g, oracle)?);
    }
    push("inf".into(), &inf, hom_dim(&inf.ideal(ring)?, oracle)?);
    Ok(out)
}
