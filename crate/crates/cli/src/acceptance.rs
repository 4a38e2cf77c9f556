//! The acceptance suite: eleven checks over the node, flag and cusp computations.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use hilbloc::cusp::{
    classify_cusp_ideal, colength_formula, distinctness, flat_limit, flat_limit_certify, random_generator,
    LimitDirection,
};
use hilbloc::flag::{
    check_lci_with_cap, enumerate_strata, expected_model, local_model, models_equivalent, strata_by_containment,
    validate_model_points, FlagPattern,
};
use hilbloc::gb::{ideals_equal, is_regular_sequence_with_cap, DEFAULT_MAX_VARS};
use hilbloc::node::{
    c_ideal, classify_node_ideal, closed_form_relations, derive_flat_relations, q_ideal, verify_flat_iff,
    DeformShape, NodeClass,
};
use hilbloc::tangent::{
    explicit_even_basis, hom_space_family, hom_space_generic, p1_scan, tuples_in_kernel, MatrixFactorization,
    MfFamily,
};
use hilbloc::{parse_rational, CoeffAlgebra, CurveRing, CuspCanonicalIdeal, Error, IdealGens, Oracle, Result, Q};

pub const NODE_MAX_M: u32 = 8;
pub const NODE_SAMPLES_PER_COMPONENT: usize = 5;
pub const NODE_BUDGET: Duration = Duration::from_secs(30);
pub const FLAT_MAX_M: u32 = 6;
pub const FLAT_TRIALS: usize = 50;
pub const MODEL_TRIALS: usize = 50;
pub const LCI_BUDGET: Duration = Duration::from_secs(60);
pub const STRATA_MAX_M: u32 = 7;
pub const CUSP_MAX_M: u32 = 6;
pub const DISTINCT_PAIRS: usize = 20;
pub const RANDOM_IDEALS: usize = 200;
pub const RANDOM_MAX_M: u32 = 4;
pub const LIMIT_MAX_M: u32 = 5;
pub const TANGENT_MAX_M: u32 = 5;
pub const EXPLICIT_BASIS_MAX_M: u32 = 4;
pub const SCAN_SAMPLES: [i64; 4] = [-2, 1, 3, 7];

/// Outcome of one criterion.
#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: Value,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} {} ({:.1}s)",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.elapsed.as_secs_f64()
        )
    }
}

pub const NAMES: [&str; 11] = [
    "node classification",
    "flat relations",
    "flag local models",
    "lci certification",
    "model-point validation",
    "strata enumeration",
    "cusp colength table",
    "classification totality",
    "flat limits",
    "tangent dimensions",
    "determinism",
];

/// Settings shared by the checks.
#[derive(Clone, Debug)]
pub struct Suite {
    pub seed: u64,
    pub oracle: Oracle,
    pub max_vars: usize,
}

impl Suite {
    pub fn new(seed: u64) -> Self {
        Suite { seed, oracle: Oracle::default(), max_vars: DEFAULT_MAX_VARS }
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
    }

    /// Run criterion `id` in 1..=10; criterion 11 needs [`Suite::run_all`].
    pub fn run(&self, id: u32) -> Outcome {
        let start = Instant::now();
        let res = match id {
            1 => self.node_classification(),
            2 => self.flat_relations(),
            3 => self.flag_models(),
            4 => self.lci(),
            5 => self.model_points(),
            6 => self.strata(),
            7 => self.cusp_colengths(),
            8 => self.totality(),
            9 => self.limits(),
            10 => self.tangents(),
            _ => Err(Error::InvalidInput(format!("no criterion {id}"))),
        };
        let (passed, detail) = res.unwrap_or_else(|e| (false, json!({ "error": e.to_string() })));
        Outcome { id, name: NAMES[(id as usize).saturating_sub(1).min(10)], passed, detail, elapsed: start.elapsed() }
    }

    /// Criteria 1 to 10, then 11 by rerunning 1 to 10 and comparing serialized detail.
    pub fn run_all(&self, mut progress: impl FnMut(&Outcome)) -> Vec<Outcome> {
        let mut out = Vec::new();
        for id in 1..=10 {
            let o = self.run(id);
            progress(&o);
            out.push(o);
        }
        let start = Instant::now();
        let first = render(&out);
        let second = render(&(1..=10).map(|id| self.run(id)).collect::<Vec<_>>());
        let same = first == second;
        let o = Outcome {
            id: 11,
            name: NAMES[10],
            passed: same,
            detail: json!({ "runs": 2, "bytes": first.len(), "identical": same }),
            elapsed: start.elapsed(),
        };
        progress(&o);
        out.push(o);
        out
    }

    fn node_classification(&self) -> Result<(bool, Value)> {
        let start = Instant::now();
        let ring = CurveRing::node(CoeffAlgebra::rationals(), 64)?;
        let mut rng = self.rng(1);
        let (mut q_checked, mut c_checked) = (0, 0);
        let mut failures = Vec::new();
        for m in 2..=NODE_MAX_M {
            for i in 1..=m {
                let c = self.oracle.colength(&q_ideal(&ring, i, m)?)?;
                q_checked += 1;
                if c != m as usize {
                    failures.push(format!("Q_{i}^{m} has colength {c}"));
                }
            }
            for i in 1..m {
                for _ in 0..NODE_SAMPLES_PER_COMPONENT {
                    let a = nonzero_rational(&mut rng);
                    let id = c_ideal(&ring, i, m, &a)?;
                    c_checked += 1;
                    let c = self.oracle.colength(&id)?;
                    if c != m as usize {
                        failures.push(format!("C_{i}^{m}({a}) has colength {c}"));
                    }
                    match classify_node_ideal(&id, &self.oracle)? {
                        NodeClass::TypeC { i: ci, m: cm, a: ca } if ci == i && cm == m && parse_rational(&ca)? == a => {}
                        other => failures.push(format!("C_{i}^{m}({a}) classified as {other:?}")),
                    }
                }
            }
        }
        let in_budget = start.elapsed() < NODE_BUDGET;
        let ok = failures.is_empty() && in_budget;
        Ok((ok, json!({ "q_ideals": q_checked, "c_ideals": c_checked, "failures": failures, "within_budget": in_budget })))
    }

    fn flat_relations(&self) -> Result<(bool, Value)> {
        let s = CoeffAlgebra::uv_cubed();
        let mut failures = Vec::new();
        let (mut shapes, mut trials, mut random_flat) = (0, 0, 0);
        for m in 1..=FLAT_MAX_M {
            for i in 1..=m {
                for relative in [false, true] {
                    let shape = DeformShape::new(m, i, relative, 0)?;
                    shapes += 1;
                    let derived = derive_flat_relations(&shape)?;
                    let closed = closed_form_relations(&shape)?;
                    if !ideals_equal(derived.ring(), derived.equations(), closed.equations())? {
                        failures.push(format!("m={m} i={i} relative={relative}: relations differ from the closed form"));
                    }
                    let seed = self.seed ^ ((m as u64) << 16 | (i as u64) << 8 | relative as u64);
                    let rep = verify_flat_iff(&shape, &s, FLAT_TRIALS, seed, &self.oracle)?;
                    trials += rep.sufficiency_trials + rep.necessity_trials;
                    random_flat += rep.flat_random_points;
                    for c in rep.counterexamples {
                        failures.push(format!("m={m} i={i} relative={relative}: {c}"));
                    }
                }
            }
        }
        let ok = failures.is_empty();
        Ok((ok, json!({ "shapes": shapes, "trials": trials, "flat_random_points": random_flat, "failures": failures })))
    }

    fn flag_models(&self) -> Result<(bool, Value)> {
        let mut rows = Vec::new();
        let mut ok = true;
        for case in flag_cases()? {
            let derived = local_model(&case.pattern, true)?;
            let expected = expected_model(&case.pattern, true)?;
            let equivalent = models_equivalent(&derived, &expected)?;
            let count_ok = case.equations.is_none_or(|n| n == derived.equations.len())
                && derived.equations.len() == expected.equations.len();
            let params_ok = case.params.is_none_or(|n| n == derived.params.len());
            let dims_ok = derived.ambient_dim == derived.params.len();
            let pass = equivalent && count_ok && params_ok && dims_ok;
            ok &= pass;
            rows.push(json!({
                "label": case.label,
                "pattern": case.pattern.to_string(),
                "equations": derived.equations.len(),
                "params": derived.params.len(),
                "equivalent": equivalent,
                "passed": pass,
            }));
        }
        Ok((ok, json!({ "cases": rows })))
    }

    fn lci(&self) -> Result<(bool, Value)> {
        let mut rows = Vec::new();
        let mut ok = true;
        for case in flag_cases()? {
            let model = local_model(&case.pattern, true)?;
            let (status, pass) = match check_lci_with_cap(&model, self.max_vars) {
                Ok(true) => ("lci", true),
                Ok(false) => ("not-lci", false),
                Err(Error::VariableCap { .. }) => ("over-cap", true),
                Err(e) => return Err(e),
            };
            ok &= pass;
            rows.push(json!({ "label": case.label, "pattern": case.pattern.to_string(), "status": status }));
        }
        let mut timed = Vec::new();
        for m in [5, 6] {
            let i = mid(m);
            let model = local_model(&FlagPattern::new(m, vec![i, i, i - 1, i - 1])?, true)?;
            let ring = model.ring()?;
            let eqs: Vec<_> = model.equations.iter().map(|e| e.map_used_into(&ring)).collect::<Result<_>>()?;
            let start = Instant::now();
            let regular = is_regular_sequence_with_cap(&ring, &eqs, self.max_vars)?;
            let in_budget = start.elapsed() < LCI_BUDGET;
            ok &= regular && in_budget && eqs.len() == 2;
            timed.push(json!({ "m": m, "equations": eqs.len(), "regular": regular, "within_budget": in_budget }));
        }
        Ok((ok, json!({ "models": rows, "case_three": timed })))
    }

    fn model_points(&self) -> Result<(bool, Value)> {
        let s = CoeffAlgebra::uv_cubed();
        let mut rows = Vec::new();
        let mut ok = true;
        for (k, case) in flag_cases()?.into_iter().enumerate() {
            let model = local_model(&case.pattern, true)?;
            let rep = validate_model_points(&case.pattern, &model, &s, MODEL_TRIALS, self.seed ^ (k as u64 + 1), &self.oracle)?;
            let pass = rep.passed() && rep.forward_trials >= MODEL_TRIALS && rep.perturbed_rejected > 0;
            ok &= pass;
            rows.push(json!({
                "label": case.label,
                "pattern": case.pattern.to_string(),
                "forward": rep.forward_trials,
                "backward": rep.backward_trials,
                "perturbed_rejected": rep.perturbed_rejected,
                "counterexamples": rep.counterexamples,
                "passed": pass,
            }));
        }
        Ok((ok, json!({ "patterns": rows })))
    }

    fn strata(&self) -> Result<(bool, Value)> {
        let mut rows = Vec::new();
        let mut ok = true;
        for m in 2..=STRATA_MAX_M {
            let listed: Vec<Vec<u32>> = enumerate_strata(m, m)?.iter().map(|p| p.indices().to_vec()).collect();
            let brute = strata_by_containment(m, m, &self.oracle)?;
            let same = listed == brute;
            ok &= same;
            rows.push(json!({ "m": m, "count": listed.len(), "brute_force": brute.len(), "identical": same }));
        }
        Ok((ok, json!({ "rows": rows })))
    }

    fn cusp_colengths(&self) -> Result<(bool, Value)> {
        let ring = cusp_ring()?;
        let mut rng = self.rng(7);
        let mut failures = Vec::new();
        let (mut checked, mut pairs) = (0, 0);
        let mut family = vec![CuspCanonicalIdeal::X];
        for m in 0..=CUSP_MAX_M {
            family.push(CuspCanonicalIdeal::pow_y(m + 1)?);
            if m > 0 {
                family.push(CuspCanonicalIdeal::x_pow_y(m));
            }
            for k in [1, 2] {
                family.push(CuspCanonicalIdeal::two_gen(m, k)?);
                family.push(CuspCanonicalIdeal::binom(m, k, nonzero_rational(&mut rng))?);
            }
        }
        for c in &family {
            checked += 1;
            let got = self.oracle.colength(&c.ideal(&ring)?)?;
            if got != colength_formula(c) {
                failures.push(format!("{c}: formula {} oracle {got}", colength_formula(c)));
            }
        }
        for m in 0..=CUSP_MAX_M {
            for k in [1, 2] {
                for _ in 0..DISTINCT_PAIRS {
                    let a = nonzero_rational(&mut rng);
                    let mut b = nonzero_rational(&mut rng);
                    while b == a {
                        b = nonzero_rational(&mut rng);
                    }
                    pairs += 1;
                    if !distinctness(&ring, m, k, &a, &b, &self.oracle)? {
                        failures.push(format!("m={m} k={k}: a={a} and b={b} give equal ideals"));
                    }
                }
            }
        }
        let ok = failures.is_empty();
        Ok((ok, json!({ "ideals": checked, "distinct_pairs": pairs, "failures": failures })))
    }

    fn totality(&self) -> Result<(bool, Value)> {
        let ring = cusp_ring()?;
        let mut rng = self.rng(8);
        let (mut violations, mut unfaithful, mut other) = (0, 0, Vec::new());
        let mut kinds = std::collections::BTreeMap::<&str, usize>::new();
        for _ in 0..RANDOM_IDEALS {
            let n = rng.gen_range(1..=2);
            let gens = (0..n).map(|_| random_generator(&mut rng, &ring, RANDOM_MAX_M)).collect::<Result<Vec<_>>>()?;
            let ideal = IdealGens::new(&ring, gens)?;
            match classify_cusp_ideal(&ideal, &self.oracle) {
                Ok(c) => {
                    *kinds.entry(c.kind()).or_default() += 1;
                    if !self.oracle.ideal_equal(&c.ideal(&ring)?, &ideal)? {
                        unfaithful += 1;
                    }
                }
                Err(Error::TheoremViolation(_)) => violations += 1,
                Err(e) => other.push(e.to_string()),
            }
        }
        let ok = violations == 0 && unfaithful == 0 && other.is_empty();
        Ok((ok, json!({ "ideals": RANDOM_IDEALS, "violations": violations, "unfaithful": unfaithful, "errors": other, "kinds": kinds })))
    }

    fn limits(&self) -> Result<(bool, Value)> {
        let ring = cusp_ring()?;
        let samples: Vec<Q> = SCAN_SAMPLES.iter().map(|&n| Q::from_integer(n.into())).collect();
        let mut rows = Vec::new();
        let mut ok = true;
        for m in 0..=LIMIT_MAX_M {
            for k in [1, 2] {
                for dir in [LimitDirection::Zero, LimitDirection::Infinity] {
                    let claimed = flat_limit(m, k, dir)?;
                    let cert = flat_limit_certify(&ring, m, k, dir, &claimed, &samples, &self.oracle)?;
                    ok &= cert.certified;
                    rows.push(json!({ "m": m, "k": k, "dir": format!("{dir:?}"), "limit": claimed.to_string(), "certified": cert.certified }));
                }
            }
        }
        Ok((ok, json!({ "limits": rows })))
    }

    fn tangents(&self) -> Result<(bool, Value)> {
        let ring = cusp_ring()?;
        let mut ok = true;
        let mut dims = Vec::new();
        for m in 0..=TANGENT_MAX_M {
            for (family, want) in [(MfFamily::Even, 2 * m + 3), (MfFamily::Odd, 2 * m + 4)] {
                let mf = hom_space_family(&ring, family, m, &self.oracle)?.dimension;
                let ideal = IdealGens::new(&ring, MatrixFactorization::new(family, m)?.generators(&ring))?;
                let generic = hom_space_generic(&ideal, &self.oracle)?.dimension;
                let pass = mf == want as usize && generic == want as usize;
                ok &= pass;
                dims.push(json!({ "m": m, "family": format!("{family:?}"), "expected": want, "matrix_factorization": mf, "syzygy": generic }));
            }
        }
        let mut basis = Vec::new();
        for m in 2..=EXPLICIT_BASIS_MAX_M {
            let mf = MatrixFactorization::new(MfFamily::Even, m)?;
            let ideal = IdealGens::new(&ring, mf.generators(&ring))?;
            let tuples = explicit_even_basis(&ring, m)?;
            let (inside, rank) = tuples_in_kernel(&ideal, &mf.relations(&ring), &tuples, &self.oracle)?;
            let pass = inside && rank == (2 * m + 3) as usize;
            ok &= pass;
            basis.push(json!({ "m": m, "in_kernel": inside, "rank": rank }));
        }
        let samples: Vec<Q> = SCAN_SAMPLES.iter().map(|&n| Q::from_integer(n.into())).collect();
        let mut scans = Vec::new();
        for (colength, zero_dim, inf_dim) in [(2u32, 3usize, 2usize), (3, 3, 4)] {
            let pts = p1_scan(&ring, colength, &samples, &self.oracle)?;
            let generic_ok = pts[1..pts.len() - 1].iter().all(|p| p.dim == colength as usize);
            let ends_ok = pts[0].dim == zero_dim && pts[pts.len() - 1].dim == inf_dim;
            let jumps = pts.iter().filter(|p| p.singular).count();
            let pass = generic_ok && ends_ok && jumps == 1;
            ok &= pass;
            scans.push(json!({
                "colength": colength,
                "dims": pts.iter().map(|p| p.dim).collect::<Vec<_>>(),
                "jumps": jumps,
                "passed": pass,
            }));
        }
        Ok((ok, json!({ "families": dims, "explicit_basis": basis, "scans": scans })))
    }
}

/// JSON rendering of a list of outcomes, without timings.
pub fn render(outcomes: &[Outcome]) -> String {
    serde_json::to_string_pretty(&serde_json::to_value(outcomes).expect("outcomes serialize")).expect("serialize")
}

fn cusp_ring() -> Result<Arc<CurveRing>> {
    CurveRing::cusp(CoeffAlgebra::rationals(), 64)
}

/// Mid-range index for four-level chains, which need `2 <= i <= m - 3`.
fn mid(m: u32) -> u32 {
    (m / 2).clamp(2, m.saturating_sub(3).max(2))
}

/// A nonzero rational with numerator in `-9..=9` and denominator in `1..=5`.
pub fn nonzero_rational(rng: &mut impl Rng) -> Q {
    loop {
        let n: i64 = rng.gen_range(-9..=9);
        if n != 0 {
            return Q::new(n.into(), rng.gen_range(1i64..=5).into());
        }
    }
}

/// A flag pattern checked by the model criteria.
#[derive(Clone, Debug)]
pub struct FlagCase {
    pub label: String,
    pub pattern: FlagPattern,
    pub equations: Option<usize>,
    pub params: Option<usize>,
}

/// Smallest `(m, i0)` for which the step word is a valid pattern.
fn smallest(word: &str) -> Result<FlagPattern> {
    for m in 2..=12 {
        for i0 in 1..m {
            if let Ok(p) = FlagPattern::from_steps(m, i0, word) {
                return Ok(p);
            }
        }
    }
    Err(Error::InvalidInput(format!("no admissible pattern for `{word}`")))
}

/// The patterns of the model criteria, in a fixed order.
pub fn flag_cases() -> Result<Vec<FlagCase>> {
    let mut out = Vec::new();
    let mut push = |label: String, pattern: FlagPattern, equations: Option<usize>, params: Option<usize>| {
        out.push(FlagCase { label, pattern, equations, params });
    };
    for m in 2..=6 {
        for p in enumerate_strata(m, 2)? {
            push(format!("two-level m={m}"), p, Some(0), Some(m as usize + 1));
        }
    }
    for m in 3..=6 {
        for p in enumerate_strata(m, 3)? {
            let i = p.indices();
            let eqs = if i[0] == i[1] && i[1] - 1 == i[2] { Some(1) } else { None };
            push(format!("three-level m={m}"), p, eqs, None);
        }
    }
    for m in [5, 6, 7] {
        let i = mid(m);
        for (n, idx, eqs) in [
            (1, vec![i, i, i, i], 0),
            (2, vec![i, i, i, i - 1], 1),
            (3, vec![i, i, i - 1, i - 1], 2),
            (4, vec![i, i - 1, i - 1, i - 1], 1),
        ] {
            push(format!("four-level case {n} m={m}"), FlagPattern::new(m, idx)?, Some(eqs), None);
        }
    }
    for (label, word, eqs) in [("A1", "AA", 0), ("A1A2", "ABA", 2), ("A1B2", "AAB", 1), ("B1A2", "BAA", 1), ("A1A2A3", "ABABA", 4)] {
        let p = smallest(word)?;
        let params = (label.starts_with('A') && !label.contains('B')).then(|| p.m() as usize + 1 + eqs);
        push(format!("block word {label}"), p, Some(eqs), params);
    }
    Ok(out)
}
