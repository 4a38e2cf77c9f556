//! Nested flat deformations along flags `Q_{i_0}^m ⊃ .. ⊂ Q_{i_K}^{m-K}` and their local models.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coeff::{CoeffAlgebra, CoeffKind};
use crate::error::{Error, Result};
use crate::gb::{ideals_equal, is_regular_sequence_with_cap, GroebnerBasis, DEFAULT_MAX_VARS};
use crate::node::{
    coefficient_ring, flat_relations_in, generic_curve_ring, generic_ideal, generic_pair, is_flat_at,
    parametrized_point, q_ideal, sample_pool, target_ring, DeformShape, RelationSet, S_NAME,
};
use crate::oracle::{IdealGens, Oracle};
use crate::poly::{Poly, PolyRing, Q};
use crate::ring::{CurveRing, RingElement};

/// How consecutive levels are related: `A` keeps the lower index, `B` lowers it by one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Step {
    A,
    B,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum BlockKind {
    A,
    B,
}

/// A block of consecutive ideals in a flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Block {
    pub kind: BlockKind,
    pub len: usize,
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            BlockKind::A => 'A',
            BlockKind::B => 'B',
        };
        write!(f, "{k}{}", self.len)
    }
}

/// Flag of monomial ideals `Q_{i_j}^{m-j}`, `j = 0..K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FlagPattern {
    m: u32,
    indices: Vec<u32>,
}

impl FlagPattern {
    pub fn new(m: u32, indices: Vec<u32>) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::InvalidInput("a flag needs at least one level".into()));
        }
        if indices.len() as u32 > m {
            return Err(Error::InvalidInput(format!("{} levels exceed m = {m}", indices.len())));
        }
        for (j, &i) in indices.iter().enumerate() {
            let mj = m - j as u32;
            if i == 0 || i > mj {
                return Err(Error::InvalidInput(format!("index {i} at level {j} outside 1..={mj}")));
            }
        }
        for w in indices.windows(2) {
            if w[1] > w[0] || w[0] - w[1] > 1 {
                return Err(Error::InvalidInput(format!("index step {} -> {} is not 0 or -1", w[0], w[1])));
            }
        }
        Ok(FlagPattern { m, indices })
    }

    /// Pattern from a step word such as `"AAB"`.
    pub fn from_steps(m: u32, i0: u32, word: &str) -> Result<Self> {
        let mut idx = vec![i0];
        for c in word.chars() {
            let last = *idx.last().unwrap();
            match c {
                'A' | 'a' => idx.push(last),
                'B' | 'b' => idx.push(last.saturating_sub(1)),
                _ => return Err(Error::InvalidInput(format!("step `{c}` is not A or B"))),
            }
        }
        Self::new(m, idx)
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn levels(&self) -> usize {
        self.indices.len()
    }

    pub fn shape(&self, level: usize, relative: bool) -> DeformShape {
        DeformShape { m: self.m - level as u32, i: self.indices[level], relative, level: level as u32 }
    }

    pub fn shapes(&self, relative: bool) -> Vec<DeformShape> {
        (0..self.levels()).map(|k| self.shape(k, relative)).collect()
    }

    pub fn steps(&self) -> Vec<Step> {
        self.indices.windows(2).map(|w| if w[0] == w[1] { Step::A } else { Step::B }).collect()
    }

    pub fn step_word(&self) -> String {
        self.steps().iter().map(|s| if *s == Step::A { 'A' } else { 'B' }).collect()
    }

    /// Maximal constant runs of length at least two are `A` blocks; the rest group into `B` blocks.
    pub fn block_word(&self) -> Vec<Block> {
        let mut runs: Vec<usize> = Vec::new();
        let mut prev = None;
        for &i in &self.indices {
            if prev == Some(i) {
                *runs.last_mut().unwrap() += 1;
            } else {
                runs.push(1);
            }
            prev = Some(i);
        }
        let mut out: Vec<Block> = Vec::new();
        for r in runs {
            if r >= 2 {
                out.push(Block { kind: BlockKind::A, len: r });
            } else if let Some(b) = out.last_mut().filter(|b| b.kind == BlockKind::B) {
                b.len += 1;
            } else {
                out.push(Block { kind: BlockKind::B, len: 1 });
            }
        }
        out
    }

    pub fn block_label(&self) -> String {
        self.block_word().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" ")
    }
}

impl fmt::Display for FlagPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        write!(f, "m={} ({})", self.m, idx.join(","))
    }
}

fn steps_of(shapes: &[DeformShape]) -> Vec<Step> {
    shapes.windows(2).map(|w| if w[0].i == w[1].i { Step::A } else { Step::B }).collect()
}

fn check_chain(shapes: &[DeformShape]) -> Result<()> {
    if shapes.is_empty() {
        return Err(Error::InvalidInput("empty chain".into()));
    }
    for w in shapes.windows(2) {
        check_step(&w[0], &w[1])?;
    }
    Ok(())
}

fn check_step(outer: &DeformShape, inner: &DeformShape) -> Result<()> {
    if outer.relative != inner.relative || outer.level == inner.level {
        return Err(Error::InvalidInput("levels must differ and share relativity".into()));
    }
    if inner.m + 1 != outer.m || !(inner.i == outer.i || inner.i + 1 == outer.i) {
        return Err(Error::InvalidInput(format!(
            "invalid index step ({}, {}) -> ({}, {})",
            outer.m, outer.i, inner.m, inner.i
        )));
    }
    Ok(())
}

/// Reduce `e` modulo an inner generic pair using the leading terms `x^{m-i+1}` and `y^i` as pivots.
fn reduce_by_inner(e: &RingElement, fi: &RingElement, gi: &RingElement, inner: &DeformShape) -> Result<RingElement> {
    let ring = e.ring().clone();
    let ex = inner.top() + 1;
    let ey = inner.i;
    let mut r = e.clone();
    for _ in 0..10_000 {
        let pick = r
            .terms()
            .iter()
            .filter(|(m, _)| (m.y == 0 && m.x >= ex) || (m.x == 0 && m.y >= ey))
            .max_by_key(|(m, _)| (m.degree(), m.x))
            .cloned();
        let Some((m, c)) = pick else { return Ok(r) };
        let shifted = if m.y == 0 {
            RingElement::monomial(&ring, m.x - ex, 0, Q::from_integer(1.into())).mul(fi)?
        } else {
            RingElement::monomial(&ring, 0, m.y - ey, Q::from_integer(1.into())).mul(gi)?
        };
        r = r.sub(&shifted.scale(&c)?)?;
    }
    Err(Error::TheoremViolation("reduction modulo the inner ideal did not terminate".into()))
}

fn nesting_in(outer: &DeformShape, inner: &DeformShape, ring: &Arc<CurveRing>) -> Result<Vec<Poly>> {
    let (f, g) = generic_pair(outer, ring)?;
    let (fi, gi) = generic_pair(inner, ring)?;
    let mut eqs = Vec::new();
    for e in [f, g] {
        let r = reduce_by_inner(&e, &fi, &gi, inner)?;
        eqs.extend(r.terms().iter().map(|(_, c)| c.clone()));
    }
    Ok(eqs)
}

/// Containment `(f, g) ⊂ (f', g')` as equations: coefficients of the remainders on the inner basis.
pub fn derive_nesting_relations(outer: &DeformShape, inner: &DeformShape) -> Result<RelationSet> {
    check_step(outer, inner)?;
    let mut names = outer.coeff_names();
    names.extend(inner.coeff_names());
    let coeffs = coefficient_ring(&names, outer.relative)?;
    let ring = generic_curve_ring(&coeffs, outer.relative, outer.m + 4)?;
    Ok(RelationSet::new(&coeffs, nesting_in(outer, inner, &ring)?))
}

fn chain_names(shapes: &[DeformShape]) -> Vec<String> {
    let mut names: Vec<String> = Vec::new();
    for s in shapes {
        for n in s.coeff_names() {
            if !names.contains(&n) {
                names.push(n);
            }
        }
    }
    names
}

/// Flatness relations of every level and nesting relations of every consecutive pair.
fn chain_relations(shapes: &[DeformShape], ring: &Arc<CurveRing>) -> Result<Vec<Poly>> {
    let mut eqs = Vec::new();
    for s in shapes {
        eqs.extend(flat_relations_in(s, ring)?.equations().iter().cloned());
    }
    for w in shapes.windows(2) {
        eqs.extend(nesting_in(&w[0], &w[1], ring)?);
    }
    Ok(eqs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Qty {
    A,
    B,
    C,
    D,
}

fn qty_name(shape: &DeformShape, q: Qty) -> String {
    match q {
        Qty::A => shape.a_top(),
        Qty::B => shape.b_top(),
        Qty::C => shape.c_top(),
        Qty::D => shape.d_top(),
    }
}

/// Parameters kept by the block recipe, in level order.
fn retained_names(shapes: &[DeformShape]) -> Vec<String> {
    let steps = steps_of(shapes);
    let last = shapes.len() - 1;
    let mut out: Vec<String> = Vec::new();
    let push = |n: String, out: &mut Vec<String>| {
        if !out.contains(&n) {
            out.push(n);
        }
    };
    for (k, step) in steps.iter().enumerate() {
        let sh = &shapes[k];
        let prev = k.checked_sub(1).map(|p| steps[p]);
        match step {
            Step::A => {
                push(qty_name(sh, Qty::A), &mut out);
                if prev != Some(Step::A) {
                    push(qty_name(sh, Qty::C), &mut out);
                }
            }
            Step::B => {
                push(qty_name(sh, Qty::D), &mut out);
                if prev != Some(Step::B) {
                    push(qty_name(sh, Qty::B), &mut out);
                }
            }
        }
    }
    let inner = &shapes[last];
    for j in 1..=inner.top() {
        push(crate::node::coeff_name('a', j, inner.level), &mut out);
    }
    for j in 1..inner.i {
        push(crate::node::coeff_name('d', j, inner.level), &mut out);
    }
    let prev = last.checked_sub(1).map(|p| steps[p]);
    if prev != Some(Step::B) {
        push(qty_name(inner, Qty::B), &mut out);
    }
    if prev != Some(Step::A) {
        push(qty_name(inner, Qty::C), &mut out);
    }
    out
}

/// Retained parameters of a pattern.
pub fn retained_params(pattern: &FlagPattern) -> Vec<String> {
    retained_names(&pattern.shapes(true))
}

/// A local model: residual equations in the retained parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalModel {
    pub params: Vec<String>,
    pub equations: Vec<Poly>,
    pub ambient_dim: usize,
    /// Eliminated variable and its value in the parameters, in elimination order.
    pub elimination_trace: Vec<(String, Poly)>,
    /// Value of the base parameter `s`; present for relative models.
    pub s_expression: Option<Poly>,
    pub relative: bool,
}

/// Plain-string rendering of a [`LocalModel`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalModelView {
    pub params: Vec<String>,
    pub equations: Vec<String>,
    pub ambient_dim: usize,
    pub elimination_trace: Vec<(String, String)>,
    pub s_expression: Option<String>,
    pub relative: bool,
}

impl LocalModel {
    pub fn ring(&self) -> Result<Arc<PolyRing>> {
        PolyRing::grevlex(&self.params)
    }

    pub fn is_smooth(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn view(&self) -> LocalModelView {
        LocalModelView {
            params: self.params.clone(),
            equations: self.equations.iter().map(|e| e.to_string()).collect(),
            ambient_dim: self.ambient_dim,
            elimination_trace: self.elimination_trace.iter().map(|(v, e)| (v.clone(), e.to_string())).collect(),
            s_expression: self.s_expression.as_ref().map(|e| e.to_string()),
            relative: self.relative,
        }
    }
}

struct Elimination {
    trace: Vec<(usize, Poly)>,
    residual: Vec<Poly>,
}

/// Substitute away every non-retained variable through relations linear in it with constant coefficient.
fn eliminate(ring: &Arc<PolyRing>, eqs: Vec<Poly>, retained: &BTreeSet<String>) -> Result<Elimination> {
    let names = ring.names();
    let s_idx = ring.index_of(S_NAME);
    let mut order: Vec<usize> =
        (0..ring.nvars()).filter(|&v| !retained.contains(&names[v]) && Some(v) != s_idx).collect();
    order.sort_by(|&a, &b| names[a].cmp(&names[b]));
    if let Some(s) = s_idx {
        order.push(s);
    }
    let mut eqs: Vec<Poly> = eqs.into_iter().filter(|e| !e.is_zero()).collect();
    let mut trace: Vec<(usize, Poly)> = Vec::new();
    let mut done: BTreeSet<usize> = BTreeSet::new();
    loop {
        let mut progressed = false;
        for &v in &order {
            if done.contains(&v) {
                continue;
            }
            if Some(v) == s_idx && order.iter().any(|w| *w != v && !done.contains(w)) {
                continue;
            }
            let pick = eqs
                .iter()
                .enumerate()
                .filter_map(|(k, e)| e.linear_in(v).map(|(l, r)| (k, l, r)))
                .min_by_key(|(k, _, r)| (r.len(), r.total_degree(), *k));
            let Some((_, lambda, rest)) = pick else { continue };
            let value = rest.scale(&(-lambda.recip()));
            for e in eqs.iter_mut() {
                *e = e.substitute(v, &value);
            }
            eqs.retain(|e| !e.is_zero());
            for (_, t) in trace.iter_mut() {
                *t = t.substitute(v, &value);
            }
            trace.push((v, value));
            done.insert(v);
            progressed = true;
            break;
        }
        if !progressed {
            break;
        }
    }
    let stuck: Vec<String> = order.iter().filter(|v| !done.contains(v)).map(|&v| names[v].clone()).collect();
    if !stuck.is_empty() {
        return Err(Error::EliminationStall(stuck));
    }
    Ok(Elimination { trace, residual: eqs })
}

fn sort_key(p: &Poly) -> (u32, usize, String) {
    (p.total_degree(), p.len(), p.to_string())
}

/// Drop generators that lie in the ideal of the others.
fn minimize(ring: &Arc<PolyRing>, eqs: Vec<Poly>) -> Result<Vec<Poly>> {
    let mut eqs: Vec<Poly> = eqs.into_iter().filter(|e| !e.is_zero()).map(|e| e.primitive()).collect();
    eqs.sort_by_key(sort_key);
    eqs.dedup();
    let cap = ring.nvars().max(DEFAULT_MAX_VARS);
    let mut kept: Vec<Poly> = Vec::new();
    let mut gb: Option<GroebnerBasis> = None;
    for e in eqs {
        let known = match &gb {
            Some(g) => g.contains(&e)?,
            None => false,
        };
        if !known {
            kept.push(e);
            gb = Some(GroebnerBasis::with_cap(ring, &kept, cap)?);
        }
    }
    let mut k = kept.len();
    while k > 0 {
        k -= 1;
        if kept.len() < 2 {
            break;
        }
        let others: Vec<Poly> = kept.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, p)| p.clone()).collect();
        if GroebnerBasis::with_cap(ring, &others, cap)?.contains(&kept[k])? {
            kept.remove(k);
        }
    }
    Ok(kept)
}

fn model_from_chain(shapes: &[DeformShape], relative: bool) -> Result<LocalModel> {
    check_chain(shapes)?;
    let rel_shapes: Vec<DeformShape> = shapes.iter().map(|s| DeformShape { relative: true, ..*s }).collect();
    let names = chain_names(&rel_shapes);
    let coeffs = coefficient_ring(&names, true)?;
    let trunc = rel_shapes[0].m + 4;
    let ring = generic_curve_ring(&coeffs, true, trunc)?;
    let eqs = chain_relations(&rel_shapes, &ring)?;
    let params = retained_names(&rel_shapes);
    let retained: BTreeSet<String> = params.iter().cloned().collect();
    let elim = eliminate(&coeffs, eqs, &retained)?;
    let pring = PolyRing::grevlex(&params)?;
    let mut trace = Vec::new();
    let mut s_expression = None;
    for (v, e) in &elim.trace {
        let e = e.map_used_into(&pring)?;
        let name = coeffs.names()[*v].clone();
        if name == S_NAME {
            s_expression = Some(e.clone());
        }
        trace.push((name, e));
    }
    let s_expr = s_expression.clone().ok_or_else(|| Error::TheoremViolation("s was not eliminated".into()))?;
    let mut residual: Vec<Poly> = elim.residual.iter().map(|e| e.map_used_into(&pring)).collect::<Result<_>>()?;
    if !relative {
        residual.push(s_expr);
    }
    let equations = minimize(&pring, residual)?;
    Ok(LocalModel {
        ambient_dim: params.len(),
        params,
        equations,
        elimination_trace: trace,
        s_expression: if relative { s_expression } else { None },
        relative,
    })
}

/// Local model of the (relative or absolute) flag Hilbert scheme at a monomial flag, by elimination.
pub fn local_model(pattern: &FlagPattern, relative: bool) -> Result<LocalModel> {
    model_from_chain(&pattern.shapes(true), relative)
}

fn parse_coeff_name(name: &str) -> Option<(char, u32, u32)> {
    let mut chars = name.chars();
    let letter = chars.next()?;
    let rest = chars.as_str();
    let (j, level) = rest.split_once('_')?;
    Some((letter, j.parse().ok()?, level.parse().ok()?))
}

/// Closes nesting relations under the flatness relations of the levels involved and eliminates
/// down to the retained parameters; the result holds the residual equations and `v - value` for
/// every eliminated variable.
pub fn derived_consequences(relations: &RelationSet) -> Result<RelationSet> {
    if relations.is_empty() {
        return Ok(relations.clone());
    }
    let ring = relations.ring();
    let relative = ring.index_of(S_NAME).is_some();
    let mut levels: BTreeMap<u32, (u32, u32)> = BTreeMap::new();
    for n in ring.names() {
        if let Some((letter, j, level)) = parse_coeff_name(n) {
            let e = levels.entry(level).or_insert((0, 1));
            match letter {
                'a' | 'c' => e.0 = e.0.max(j),
                'b' | 'd' => e.1 = e.1.max(j + 1),
                _ => {}
            }
        }
    }
    let shapes: Vec<DeformShape> = levels
        .iter()
        .map(|(&level, &(top, i))| DeformShape { m: top + i, i, relative, level })
        .collect();
    let curve = generic_curve_ring(ring, relative, shapes.iter().map(|s| s.m).max().unwrap_or(1) + 4)?;
    let mut eqs: Vec<Poly> = relations.equations().to_vec();
    for s in &shapes {
        eqs.extend(flat_relations_in(s, &curve)?.equations().iter().cloned());
    }
    if !relative || check_chain(&shapes).is_err() {
        return Ok(RelationSet::new(ring, eqs));
    }
    let retained: BTreeSet<String> = retained_names(&shapes).into_iter().collect();
    let elim = eliminate(ring, eqs, &retained)?;
    let mut out = elim.residual;
    for (v, e) in elim.trace {
        out.push(&ring.var(v) - &e);
    }
    Ok(RelationSet::new(ring, out))
}

/// Closed-form values of the per-level quantities in the retained parameters.
struct ClosedForm<'a> {
    shapes: &'a [DeformShape],
    steps: Vec<Step>,
    ring: Arc<PolyRing>,
    retained: BTreeSet<String>,
}

impl<'a> ClosedForm<'a> {
    fn new(shapes: &'a [DeformShape]) -> Result<Self> {
        let params = retained_names(shapes);
        Ok(ClosedForm {
            shapes,
            steps: steps_of(shapes),
            ring: PolyRing::grevlex(&params)?,
            retained: params.into_iter().collect(),
        })
    }

    fn last(&self) -> usize {
        self.shapes.len() - 1
    }

    fn var(&self, name: &str) -> Result<Poly> {
        self.ring.var_named(name)
    }

    fn alpha(&self, j: usize, depth: u32) -> Result<Poly> {
        Ok(&self.get(Qty::A, j, depth + 1)? - &self.get(Qty::A, j + 1, depth + 1)?)
    }

    fn delta(&self, j: usize, depth: u32) -> Result<Poly> {
        Ok(&self.get(Qty::D, j, depth + 1)? - &self.get(Qty::D, j + 1, depth + 1)?)
    }

    fn get(&self, q: Qty, j: usize, depth: u32) -> Result<Poly> {
        if depth > 256 {
            return Err(Error::TheoremViolation("cyclic closed form".into()));
        }
        let sh = &self.shapes[j];
        let name = qty_name(sh, q);
        if self.retained.contains(&name) {
            return self.var(&name);
        }
        let k = self.last();
        let step = |t: usize| self.steps.get(t).copied();
        let prev = j.checked_sub(1).map(|p| self.steps[p]);
        let d = depth + 1;
        match q {
            Qty::A if j == k => {
                let d1 = if sh.i >= 2 { self.var(&crate::node::coeff_name('d', 1, sh.level))? } else { self.ring.one() };
                Ok(&self.get(Qty::B, j, d)? * &d1)
            }
            Qty::D if j == k => {
                let a1 = if sh.top() >= 1 {
                    self.var(&crate::node::coeff_name('a', 1, sh.level))?
                } else {
                    self.ring.one()
                };
                Ok(&self.get(Qty::C, j, d)? * &a1)
            }
            Qty::A => Ok(&self.get(Qty::A, j + 1, d)? + &(&self.get(Qty::B, j, d)? * &self.get(Qty::C, j + 1, d)?)),
            Qty::D => Ok(&self.get(Qty::D, j + 1, d)? + &(&self.get(Qty::C, j, d)? * &self.get(Qty::B, j + 1, d)?)),
            Qty::C if prev == Some(Step::A) => Ok(&self.alpha(j - 1, d)? * &self.get(Qty::C, j - 1, d)?),
            Qty::C if step(j) == Some(Step::B) => Ok(&self.delta(j, d)? * &self.get(Qty::C, j + 1, d)?),
            Qty::B if step(j) == Some(Step::A) => Ok(&self.alpha(j, d)? * &self.get(Qty::B, j + 1, d)?),
            Qty::B if prev == Some(Step::B) => Ok(&self.delta(j - 1, d)? * &self.get(Qty::B, j - 1, d)?),
            _ => Err(Error::TheoremViolation(format!("no closed form for {name}"))),
        }
    }

    /// One equation per change of step direction.
    fn junction_equations(&self) -> Result<Vec<Poly>> {
        let mut out = Vec::new();
        for q in 1..self.steps.len() {
            match (self.steps[q - 1], self.steps[q]) {
                (Step::A, Step::B) => {
                    let outer = &self.alpha(q - 1, 0)? * &self.get(Qty::C, q - 1, 0)?;
                    let inner = &self.delta(q, 0)? * &self.get(Qty::C, q + 1, 0)?;
                    out.push(&outer - &inner);
                }
                (Step::B, Step::A) => {
                    let outer = &self.delta(q - 1, 0)? * &self.get(Qty::B, q - 1, 0)?;
                    let inner = &self.alpha(q, 0)? * &self.get(Qty::B, q + 1, 0)?;
                    out.push(&outer - &inner);
                }
                _ => {}
            }
        }
        Ok(out)
    }

    fn s_expression(&self) -> Result<Poly> {
        Ok(&self.get(Qty::B, 0, 0)? * &self.get(Qty::C, 0, 0)?)
    }

    /// Values of the auxiliary quantities that are not parameters.
    fn auxiliary(&self) -> Result<Vec<(String, Poly)>> {
        let mut out = Vec::new();
        for (j, sh) in self.shapes.iter().enumerate() {
            for q in [Qty::A, Qty::B, Qty::C, Qty::D] {
                let name = qty_name(sh, q);
                if self.retained.contains(&name) || out.iter().any(|(n, _)| *n == name) {
                    continue;
                }
                out.push((name, self.get(q, j, 0)?));
            }
        }
        Ok(out)
    }
}

/// The model in closed form: one equation at each change of step direction.
pub fn expected_model(pattern: &FlagPattern, relative: bool) -> Result<LocalModel> {
    let shapes = pattern.shapes(true);
    let cf = ClosedForm::new(&shapes)?;
    let s_expr = cf.s_expression()?;
    let mut equations: Vec<Poly> = cf.junction_equations()?.into_iter().map(|e| e.primitive()).collect();
    if !relative {
        equations.push(s_expr.clone());
    }
    let mut trace = cf.auxiliary()?;
    trace.push((S_NAME.to_string(), s_expr.clone()));
    let params = retained_names(&shapes);
    Ok(LocalModel {
        ambient_dim: params.len(),
        params,
        equations,
        elimination_trace: trace,
        s_expression: relative.then_some(s_expr),
        relative,
    })
}

/// Same parameters, same ideal, and the same value of `s` modulo that ideal.
pub fn models_equivalent(a: &LocalModel, b: &LocalModel) -> Result<bool> {
    let sa: BTreeSet<&String> = a.params.iter().collect();
    let sb: BTreeSet<&String> = b.params.iter().collect();
    if sa != sb || a.relative != b.relative {
        return Err(Error::InvalidInput("models live in different parameter spaces".into()));
    }
    let ring = a.ring()?;
    let ea: Vec<Poly> = a.equations.iter().map(|e| e.map_used_into(&ring)).collect::<Result<_>>()?;
    let eb: Vec<Poly> = b.equations.iter().map(|e| e.map_used_into(&ring)).collect::<Result<_>>()?;
    if !ideals_equal(&ring, &ea, &eb)? {
        return Ok(false);
    }
    match (&a.s_expression, &b.s_expression) {
        (Some(x), Some(y)) => {
            let diff = &x.map_used_into(&ring)? - &y.map_used_into(&ring)?;
            if ea.is_empty() {
                return Ok(diff.is_zero());
            }
            GroebnerBasis::with_cap(&ring, &ea, ring.nvars().max(DEFAULT_MAX_VARS))?.contains(&diff)
        }
        (None, None) => Ok(true),
        _ => Ok(false),
    }
}

/// Regular sequence of the expected codimension.
pub fn check_lci(model: &LocalModel) -> Result<bool> {
    check_lci_with_cap(model, DEFAULT_MAX_VARS)
}

pub fn check_lci_with_cap(model: &LocalModel, cap: usize) -> Result<bool> {
    if model.equations.is_empty() {
        return Ok(true);
    }
    let ring = model.ring()?;
    if ring.nvars() > cap {
        return Err(Error::VariableCap { needed: ring.nvars(), cap });
    }
    let eqs: Vec<Poly> = model.equations.iter().map(|e| e.map_used_into(&ring)).collect::<Result<_>>()?;
    if !is_regular_sequence_with_cap(&ring, &eqs, cap)? {
        return Ok(false);
    }
    let dim = GroebnerBasis::with_cap(&ring, &eqs, cap)?.ideal_dim()?;
    Ok(dim + eqs.len() == ring.nvars())
}

/// Result of validating a model against the oracle on points over an Artin algebra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelReport {
    pub seed: u64,
    pub forward_trials: usize,
    pub backward_trials: usize,
    pub perturbed_rejected: usize,
    pub sampling_failures: usize,
    pub counterexamples: Vec<String>,
}

impl ModelReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty() && self.sampling_failures == 0
    }
}

struct Sampler<'a> {
    s: &'a Arc<CoeffAlgebra>,
    pool: Vec<Poly>,
}

impl Sampler<'_> {
    fn value(&self, rng: &mut ChaCha8Rng) -> Poly {
        if rng.gen_bool(0.4) {
            self.s.zero()
        } else {
            self.pool.choose(rng).expect("nonempty pool").clone()
        }
    }

    /// Rejection sampling of a point on the model.
    fn model_point(
        &self,
        rng: &mut ChaCha8Rng,
        model: &LocalModel,
        attempts: usize,
    ) -> Result<Option<BTreeMap<String, Poly>>> {
        for _ in 0..attempts {
            let point: BTreeMap<String, Poly> = model.params.iter().map(|p| (p.clone(), self.value(rng))).collect();
            let mut ok = true;
            for e in &model.equations {
                if !self.s.evaluate(e, &point)?.is_zero() {
                    ok = false;
                    break;
                }
            }
            if ok {
                return Ok(Some(point));
            }
        }
        Ok(None)
    }
}

fn show(point: &BTreeMap<String, Poly>) -> String {
    point
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Whether every level is flat and each level contains the next.
fn chain_valid(
    oracle: &Oracle,
    shapes: &[DeformShape],
    generic: &[IdealGens],
    target: &Arc<CurveRing>,
    point: &BTreeMap<String, Poly>,
) -> Result<std::result::Result<(), String>> {
    let mut ideals = Vec::new();
    for (sh, g) in shapes.iter().zip(generic) {
        if !is_flat_at(oracle, g.gens(), &sh.basis(), target, point, sh.m)? {
            return Ok(Err(format!("level {} not flat", sh.level)));
        }
        let gens = g.gens().iter().map(|e| e.substitute(target, point)).collect::<Result<Vec<_>>>()?;
        ideals.push(IdealGens::new(target, gens)?);
    }
    for k in 0..ideals.len().saturating_sub(1) {
        let inner = oracle.stable_quotient(&ideals[k + 1], Some(shapes[k + 1].m))?;
        for e in ideals[k].gens() {
            if !inner.contains(e)? {
                return Ok(Err(format!("level {} not contained in level {}", k, k + 1)));
            }
        }
    }
    Ok(Ok(()))
}

/// Coefficients of a pair `(f, g)` read off in the layout of `shape`.
fn extract(shape: &DeformShape, f: &RingElement, g: &RingElement) -> std::result::Result<BTreeMap<String, Poly>, String> {
    let mut out = BTreeMap::new();
    let top = shape.top();
    let name = |c: char, j: u32| crate::node::coeff_name(c, j, shape.level);
    for (e, (lx, ly), (xs, ys)) in [(f, (top + 1, 0), ('a', 'b')), (g, (0, shape.i), ('c', 'd'))] {
        for (m, c) in e.terms() {
            if (m.x, m.y) == (lx, ly) {
                if c != &c.ring().one() {
                    return Err(format!("leading coefficient {c} at level {}", shape.level));
                }
            } else if m.y == 0 && m.x <= top {
                out.insert(name(xs, m.x), c.clone());
            } else if m.x == 0 && m.y >= 1 && m.y < shape.i {
                out.insert(name(ys, m.y), c.clone());
            } else {
                return Err(format!("stray monomial {m} at level {}", shape.level));
            }
        }
    }
    Ok(out)
}

/// Oracle validation of a relative model on random points over `s`.
pub fn validate_model_points(
    pattern: &FlagPattern,
    model: &LocalModel,
    s: &Arc<CoeffAlgebra>,
    trials: usize,
    seed: u64,
    oracle: &Oracle,
) -> Result<ModelReport> {
    if !matches!(s.kind(), CoeffKind::TruncatedArtin { .. }) {
        return Err(Error::NotArtin);
    }
    let s_expr = match (&model.s_expression, model.relative) {
        (Some(e), true) => e.clone(),
        _ => return Err(Error::InvalidInput("validation needs a relative model".into())),
    };
    let shapes = pattern.shapes(true);
    let derived = if model.elimination_trace.is_empty() { local_model(pattern, true)? } else { model.clone() };
    let cf = ClosedForm::new(&shapes)?;
    let generic: Vec<IdealGens> = shapes.iter().map(generic_ideal).collect::<Result<_>>()?;
    let sampler = Sampler { s, pool: sample_pool(s)? };
    let bump = s.param(&s.ring().names()[0])?;
    let trunc = pattern.m() + 8;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = ModelReport {
        seed,
        forward_trials: 0,
        backward_trials: 0,
        perturbed_rejected: 0,
        sampling_failures: 0,
        counterexamples: Vec::new(),
    };
    for t in 0..trials {
        // forward: a model point lifts to a valid chain
        let Some(retained) = sampler.model_point(&mut rng, model, 400)? else {
            report.sampling_failures += 1;
            continue;
        };
        let mut point = retained.clone();
        for (v, e) in &derived.elimination_trace {
            if v != S_NAME {
                point.insert(v.clone(), s.evaluate(e, &retained)?);
            }
        }
        let s_value = s.evaluate(&s_expr, &retained)?;
        let target = target_ring(s, true, &s_value, trunc)?;
        report.forward_trials += 1;
        if let Err(why) = chain_valid(oracle, &shapes, &generic, &target, &point)? {
            report.counterexamples.push(format!("forward trial {t}: {why} at {}", show(&point)));
        }
        // the same point with one eliminated coordinate moved must be rejected
        let movable: Vec<&String> =
            derived.elimination_trace.iter().map(|(v, _)| v).filter(|v| v.as_str() != S_NAME).collect();
        if let Some(v) = movable.choose(&mut rng) {
            let mut bad = point.clone();
            let cur = bad[*v].clone();
            bad.insert((*v).clone(), &cur + &bump);
            if chain_valid(oracle, &shapes, &generic, &target, &bad)?.is_ok() {
                report.counterexamples.push(format!("trial {t}: moving {v} by {bump} was accepted"));
            } else {
                report.perturbed_rejected += 1;
            }
        }
        // backward: build a chain level by level and read the model back
        let Some(retained) = sampler.model_point(&mut rng, model, 400)? else {
            report.sampling_failures += 1;
            continue;
        };
        report.backward_trials += 1;
        if let Err(why) = backward_check(&cf, &shapes, model, &derived, s, &retained, trunc)? {
            report.counterexamples.push(format!("backward trial {t}: {why} at {}", show(&retained)));
        }
    }
    Ok(report)
}

fn backward_check(
    cf: &ClosedForm<'_>,
    shapes: &[DeformShape],
    model: &LocalModel,
    derived: &LocalModel,
    s: &Arc<CoeffAlgebra>,
    retained: &BTreeMap<String, Poly>,
    trunc: u32,
) -> Result<std::result::Result<(), String>> {
    let val = |q: Qty, j: usize| -> Result<Poly> { s.evaluate(&cf.get(q, j, 0)?, retained) };
    let k = cf.last();
    let inner = &shapes[k];
    let free_a: Vec<Poly> = (1..=inner.top())
        .map(|j| retained[&crate::node::coeff_name('a', j, inner.level)].clone())
        .collect();
    let free_d: Vec<Poly> = (1..inner.i)
        .map(|j| retained[&crate::node::coeff_name('d', j, inner.level)].clone())
        .collect();
    let big_b = val(Qty::B, k)?;
    let big_c = val(Qty::C, k)?;
    let s_value = s.mul(&big_b, &big_c);
    let target = target_ring(s, true, &s_value, trunc)?;
    let inner_point = parametrized_point(inner, s, &free_a, &free_d, &big_b, &big_c);
    let gi = generic_ideal(inner)?;
    let mut f = gi.gens()[0].substitute(&target, &inner_point)?;
    let mut g = gi.gens()[1].substitute(&target, &inner_point)?;
    let mut values = extract(inner, &f, &g).map(|mut v| {
        v.insert(S_NAME.to_string(), s_value.clone());
        v
    });
    let x = RingElement::x(&target);
    let y = RingElement::y(&target);
    for j in (0..k).rev() {
        match cf.steps[j] {
            Step::A => {
                let alpha = RingElement::constant(&target, &val(Qty::A, j)? - &val(Qty::A, j + 1)?);
                let c = val(Qty::C, j)?;
                let nf = x.add(&alpha)?.mul(&f)?;
                g = g.add(&f.scale(&c)?)?;
                f = nf;
            }
            Step::B => {
                let delta = RingElement::constant(&target, &val(Qty::D, j)? - &val(Qty::D, j + 1)?);
                let b = val(Qty::B, j)?;
                f = f.add(&g.scale(&b)?)?;
                g = y.add(&delta)?.mul(&g)?;
            }
        }
        values = values.and_then(|mut acc| {
            acc.extend(extract(&shapes[j], &f, &g)?);
            Ok(acc)
        });
    }
    let values = match values {
        Ok(v) => v,
        Err(why) => return Ok(Err(why)),
    };
    let coords: BTreeMap<String, Poly> = model
        .params
        .iter()
        .map(|p| (p.clone(), values.get(p).cloned().unwrap_or_else(|| s.zero())))
        .collect();
    for e in &model.equations {
        if !s.evaluate(e, &coords)?.is_zero() {
            return Ok(Err(format!("equation {e} fails")));
        }
    }
    if let Some(se) = &model.s_expression {
        if s.evaluate(se, &coords)? != s_value {
            return Ok(Err("value of s differs".into()));
        }
    }
    for (v, e) in &derived.elimination_trace {
        let have = values.get(v).cloned().unwrap_or_else(|| s.zero());
        if s.evaluate(e, &coords)? != have {
            return Ok(Err(format!("coefficient {v} disagrees with the elimination trace")));
        }
    }
    Ok(Ok(()))
}

/// Index chains `(i_0, .., i_{depth-1})` with steps 0 or -1, `1 <= i_0 <= m-1` and `1 <= i_j <= m-j`.
pub fn enumerate_strata(m: u32, depth: u32) -> Result<Vec<FlagPattern>> {
    if depth == 0 || depth > m {
        return Err(Error::InvalidInput(format!("depth {depth} must lie in 1..={m}")));
    }
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(m: u32, depth: u32, cur: &mut Vec<u32>, out: &mut Vec<FlagPattern>) {
        let j = cur.len() as u32;
        if j == depth {
            out.push(FlagPattern { m, indices: cur.clone() });
            return;
        }
        let hi = if j == 0 { (m - 1).max(1) } else { m - j };
        let range: Vec<u32> = match cur.last() {
            None => (1..=hi).collect(),
            Some(&p) => [p.saturating_sub(1), p].into_iter().filter(|&i| i >= 1 && i <= hi).collect(),
        };
        for i in range {
            cur.push(i);
            go(m, depth, cur, out);
            cur.pop();
        }
    }
    go(m, depth, &mut cur, &mut out);
    Ok(out)
}

/// Independent enumeration: all index tuples whose monomial ideals are nested, tested by the oracle.
pub fn strata_by_containment(m: u32, depth: u32, oracle: &Oracle) -> Result<Vec<Vec<u32>>> {
    if depth == 0 || depth > m {
        return Err(Error::InvalidInput(format!("depth {depth} must lie in 1..={m}")));
    }
    let ring = CurveRing::node(CoeffAlgebra::rationals(), 2 * m + 8)?;
    let mut ideals: BTreeMap<(u32, u32), (IdealGens, crate::oracle::Quotient)> = BTreeMap::new();
    for j in 0..depth {
        let mj = m - j;
        for i in 1..=mj {
            let id = q_ideal(&ring, i, mj)?;
            let qt = oracle.stable_quotient(&id, None)?;
            ideals.insert((mj, i), (id, qt));
        }
    }
    let mut tuples: Vec<Vec<u32>> = ((1..=(m - 1).max(1)).map(|i| vec![i])).collect();
    for j in 1..depth {
        let mut next = Vec::new();
        for t in &tuples {
            let (outer, _) = &ideals[&(m - j + 1, *t.last().unwrap())];
            for i in 1..=(m - j) {
                let (_, inner) = &ideals[&(m - j, i)];
                let mut nested = true;
                for e in outer.gens() {
                    nested &= inner.contains(e)?;
                }
                if nested {
                    let mut u = t.clone();
                    u.push(i);
                    next.push(u);
                }
            }
        }
        tuples = next;
    }
    Ok(tuples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn p(model: &LocalModel, src: &str) -> Poly {
        parse_poly(&model.ring().unwrap(), src).unwrap()
    }

    #[test]
    fn block_words() {
        let w = |m, idx: Vec<u32>| FlagPattern::new(m, idx).unwrap().block_label();
        assert_eq!(w(5, vec![2, 2, 1, 1]), "A2 A2");
        assert_eq!(w(5, vec![2, 2, 1]), "A2 B1");
        assert_eq!(w(5, vec![3, 2, 2]), "B1 A2");
        assert_eq!(w(5, vec![3, 2, 1]), "B3");
        assert_eq!(w(6, vec![3, 3, 3, 2, 1]), "A3 B2");
        assert!(FlagPattern::new(4, vec![2, 3]).is_err());
        assert!(FlagPattern::new(4, vec![3, 1]).is_err());
        assert!(FlagPattern::new(3, vec![2, 2, 2]).is_err());
    }

    #[test]
    fn nesting_relations_same_index() {
        let outer = DeformShape::new(4, 2, true, 0).unwrap();
        let inner = DeformShape::new(3, 2, true, 1).unwrap();
        let rel = derive_nesting_relations(&outer, &inner).unwrap();
        let r = rel.ring();
        let expect = parse_poly(r, "b1_0 - (a2_0 - a1_1)*b1_1").unwrap().monic();
        assert!(rel.equations().contains(&expect), "{:?}", rel.equations().iter().map(|e| e.to_string()).collect::<Vec<_>>());
        let a0 = parse_poly(r, "a0_0 - (a2_0 - a1_1)*a0_1 - s*b1_1").unwrap().monic();
        assert!(rel.equations().contains(&a0));
    }

    #[test]
    fn nesting_relations_dropped_index() {
        let outer = DeformShape::new(5, 3, true, 0).unwrap();
        let inner = DeformShape::new(4, 2, true, 1).unwrap();
        let rel = derive_nesting_relations(&outer, &inner).unwrap();
        let r = rel.ring();
        let top = parse_poly(r, "c2_0 - (d2_0 - d1_1)*c2_1").unwrap().monic();
        assert!(rel.equations().contains(&top));
        let low = parse_poly(r, "c0_0 - c1_1*s - (d2_0 - d1_1)*c0_1").unwrap().monic();
        assert!(rel.equations().contains(&low));
    }

    #[test]
    fn undeformed_flag_satisfies_nesting() {
        let outer = DeformShape::new(4, 2, false, 0).unwrap();
        let inner = DeformShape::new(3, 2, false, 1).unwrap();
        let rel = derive_nesting_relations(&outer, &inner).unwrap();
        let zero = vec![crate::poly::q(0); rel.ring().nvars()];
        assert!(rel.equations().iter().all(|e| e.eval(&zero) == crate::poly::q(0)));
        assert!(derive_nesting_relations(&outer, &DeformShape::new(3, 3, false, 1).unwrap()).is_err());
    }

    #[test]
    fn consequences_produce_the_product_relation() {
        let outer = DeformShape::new(4, 2, true, 0).unwrap();
        let inner = DeformShape::new(3, 2, true, 1).unwrap();
        let rel = derive_nesting_relations(&outer, &inner).unwrap();
        let closed = derived_consequences(&rel).unwrap();
        let e = parse_poly(closed.ring(), "(a2_0 - a1_1)*b1_1*c2_0 - s").unwrap().monic();
        assert!(closed.equations().contains(&e));
        let c = parse_poly(closed.ring(), "c1_1 - c2_0*(a2_0 - a1_1)").unwrap().monic();
        assert!(closed.equations().contains(&c));

        let outer = DeformShape::new(5, 3, true, 0).unwrap();
        let inner = DeformShape::new(4, 2, true, 1).unwrap();
        let closed = derived_consequences(&derive_nesting_relations(&outer, &inner).unwrap()).unwrap();
        let e = parse_poly(closed.ring(), "s - (d2_0 - d1_1)*b2_0*c2_1").unwrap().monic();
        assert!(closed.equations().contains(&e));

        let empty = RelationSet::new(closed.ring(), vec![]);
        assert!(derived_consequences(&empty).unwrap().is_empty());
    }

    #[test]
    fn two_level_model_is_smooth() {
        for (m, i) in [(4, 2), (5, 3), (3, 1), (4, 3)] {
            let pat = FlagPattern::new(m, vec![i, i]).unwrap();
            let model = local_model(&pat, true).unwrap();
            assert!(model.is_smooth());
            assert_eq!(model.ambient_dim, m as usize + 1);
        }
        let pat = FlagPattern::new(4, vec![2, 2]).unwrap();
        let model = local_model(&pat, true).unwrap();
        assert_eq!(model.s_expression.clone().unwrap(), p(&model, "(a2_0 - a1_1)*b1_1*c2_0"));
        let abs = local_model(&pat, false).unwrap();
        assert_eq!(abs.equations, vec![p(&abs, "(a2_0 - a1_1)*b1_1*c2_0").primitive()]);
    }

    #[test]
    fn two_level_dropped_index() {
        let pat = FlagPattern::new(5, vec![3, 2]).unwrap();
        let model = local_model(&pat, true).unwrap();
        assert!(model.is_smooth());
        assert_eq!(model.ambient_dim, 6);
        assert_eq!(model.s_expression.clone().unwrap(), p(&model, "(d2_0 - d1_1)*b2_0*c2_1"));
    }

    #[test]
    fn three_level_quadric() {
        // (a_{m-i} - a'_{m-i-1}) c_{m-i} = (d'_{i-1} - d''_{i-2}) c''_{m-i-1}, with a' = a'' + b' c''
        let pat = FlagPattern::new(5, vec![3, 3, 2]).unwrap();
        let model = local_model(&pat, true).unwrap();
        assert_eq!(model.equations.len(), 1);
        let lit = p(&model, "(a2_0 - (a1_2 + b2_1*c1_2))*c2_0 - (d2_1 - d1_2)*c1_2");
        let expected = LocalModel { equations: vec![lit], ..model.clone() };
        assert!(models_equivalent(&model, &expected).unwrap());
        assert!(models_equivalent(&model, &expected_model(&pat, true).unwrap()).unwrap());
    }

    fn case(m: u32, idx: Vec<u32>) -> (FlagPattern, LocalModel) {
        let pat = FlagPattern::new(m, idx).unwrap();
        let model = local_model(&pat, true).unwrap();
        (pat, model)
    }

    #[test]
    fn four_level_cases() {
        // case 1: smooth with m+1 parameters
        let (_, m1) = case(6, vec![2, 2, 2, 2]);
        assert!(m1.is_smooth());
        assert_eq!(m1.ambient_dim, 7);
        assert_eq!(
            m1.s_expression.clone().unwrap(),
            p(&m1, "(a4_0 - a3_1)*(a3_1 - a2_2)*(a2_2 - a1_3)*b1_3*c4_0")
        );
        // case 2
        let (pat, m2) = case(6, vec![3, 3, 3, 2]);
        assert_eq!(m2.params, ["a3_0", "c3_0", "a2_1", "d2_2", "b2_2", "a1_3", "d1_3", "c1_3"]);
        let lit = p(&m2, "c3_0*(a3_0 - a2_1)*(a2_1 - (a1_3 + b2_2*c1_3)) - (d2_2 - d1_3)*c1_3");
        let e = LocalModel { equations: vec![lit], ..m2.clone() };
        assert!(models_equivalent(&m2, &e).unwrap());
        assert!(models_equivalent(&m2, &expected_model(&pat, true).unwrap()).unwrap());
        // case 3
        let (pat, m3) = case(6, vec![3, 3, 2, 2]);
        assert_eq!(m3.params, ["a3_0", "c3_0", "d2_1", "b2_1", "a2_2", "c2_2", "a1_3", "d1_3", "b1_3"]);
        assert_eq!(m3.equations.len(), 2);
        let lits = vec![
            p(&m3, "(d2_1 - (d1_3 + c2_2*b1_3))*b2_1 - (a2_2 - a1_3)*b1_3"),
            p(&m3, "(d2_1 - (d1_3 + c2_2*b1_3))*c2_2 - (a3_0 - (a2_2 + b2_1*c2_2))*c3_0"),
        ];
        let e = LocalModel { equations: lits, ..m3.clone() };
        assert!(models_equivalent(&m3, &e).unwrap());
        assert!(models_equivalent(&m3, &expected_model(&pat, true).unwrap()).unwrap());
        assert!(check_lci(&m3).unwrap());
        // case 4
        let (pat, m4) = case(6, vec![3, 2, 2, 2]);
        assert_eq!(m4.params, ["d2_0", "b2_0", "a3_1", "c3_1", "a2_2", "a1_3", "d1_3", "b1_3"]);
        let lit = p(&m4, "(a3_1 - a2_2)*(a2_2 - a1_3)*b1_3 - (d2_0 - d1_3 - (a3_1 - a1_3)*c3_1*b1_3)*b2_0");
        let e = LocalModel { equations: vec![lit], ..m4.clone() };
        assert!(models_equivalent(&m4, &e).unwrap());
        assert!(models_equivalent(&m4, &expected_model(&pat, true).unwrap()).unwrap());
    }

    #[test]
    fn block_families_match_the_closed_form() {
        for (m, word, eqs) in [(4, "ABA", 2), (5, "AAB", 1), (4, "BAA", 1), (6, "ABABA", 4)] {
            let i0 = match word {
                "ABABA" => 3,
                "BAA" => 2,
                _ => 2,
            };
            let pat = FlagPattern::from_steps(m, i0, word).unwrap();
            let derived = local_model(&pat, true).unwrap();
            let expected = expected_model(&pat, true).unwrap();
            assert_eq!(derived.equations.len(), eqs, "{word}");
            assert_eq!(derived.ambient_dim, m as usize + 1 + eqs, "{word}");
            assert!(models_equivalent(&derived, &expected).unwrap(), "{word}");
        }
    }

    #[test]
    fn sign_flip_is_detected() {
        let pat = FlagPattern::new(5, vec![3, 3, 2, 2]).unwrap();
        let e = expected_model(&pat, true).unwrap();
        let mut flipped = e.clone();
        let t = &flipped.equations[0];
        let terms: Vec<_> = t.terms().iter().enumerate().map(|(k, (m, c))| (m.clone(), if k == 0 { -c.clone() } else { c.clone() })).collect();
        flipped.equations[0] = Poly::from_terms(t.ring(), terms);
        assert!(!models_equivalent(&e, &flipped).unwrap());
    }

    #[test]
    fn lci_examples() {
        let (_, smooth) = case(4, vec![2, 2, 2]);
        assert!(check_lci(&smooth).unwrap());
        let ring = PolyRing::grevlex(&["x", "y", "z"]).unwrap();
        let bad = LocalModel {
            params: vec!["x".into(), "y".into(), "z".into()],
            equations: vec![parse_poly(&ring, "x*y").unwrap(), parse_poly(&ring, "x*z").unwrap()],
            ambient_dim: 3,
            elimination_trace: vec![],
            s_expression: None,
            relative: false,
        };
        assert!(!check_lci(&bad).unwrap());
    }

    #[test]
    fn strata_counts() {
        let idx = |v: Vec<FlagPattern>| v.iter().map(|p| p.indices().to_vec()).collect::<Vec<_>>();
        assert_eq!(idx(enumerate_strata(3, 3).unwrap()), vec![vec![1, 1, 1], vec![2, 1, 1], vec![2, 2, 1]]);
        assert_eq!(enumerate_strata(2, 2).unwrap().len(), 1);
        assert_eq!(enumerate_strata(4, 2).unwrap().len(), 5);
        let o = Oracle::default();
        for m in 2..=4 {
            let a = idx(enumerate_strata(m, m).unwrap());
            let b = strata_by_containment(m, m, &o).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn oracle_validation_small() {
        let pat = FlagPattern::new(4, vec![2, 2]).unwrap();
        let model = local_model(&pat, true).unwrap();
        let rep = validate_model_points(&pat, &model, &CoeffAlgebra::uv_cubed(), 4, 3, &Oracle::default()).unwrap();
        assert!(rep.passed(), "{:?}", rep);
        assert_eq!(rep.perturbed_rejected, 4);
    }
}
