//! Argument parsing and subcommand dispatch.

use std::sync::Arc;

use clap::{error::ErrorKind, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use hilbloc::cusp::{
    associate_normal_form, classify_cusp_ideal, distinctness, flat_limit, flat_limit_certify, LimitDirection,
};
use hilbloc::flag::{
    check_lci_with_cap, enumerate_strata, expected_model, local_model, models_equivalent, strata_by_containment,
    validate_model_points, FlagPattern,
};
use hilbloc::gb::{ideals_equal, DEFAULT_MAX_VARS};
use hilbloc::node::{classify_node_ideal, closed_form_relations, derive_flat_relations, DeformShape};
use hilbloc::oracle::DEFAULT_TRUNC_CAP;
use hilbloc::tangent::{hom_space, p1_scan};
use hilbloc::{parse_element, parse_rational, CoeffAlgebra, CurveRing, Error, Oracle, Q};

use crate::acceptance::Suite;
use crate::expr::parse_ideal_expr;
use crate::report::{Config, Format, Report};

pub const DEFAULT_SEED: u64 = 1;
pub const SEED_ENV: &str = "HILBLOC_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RingArg {
    Node,
    NodeRel,
    Cusp,
}

impl RingArg {
    fn name(self) -> &'static str {
        match self {
            RingArg::Node => "node",
            RingArg::NodeRel => "node-rel",
            RingArg::Cusp => "cusp",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "hilbloc", version, about = "Punctual, relative and flag Hilbert schemes of the node and the cusp")]
pub struct Cli {
    /// Truncation cap for stabilized quotient computations.
    #[arg(long, global = true, default_value_t = DEFAULT_TRUNC_CAP)]
    pub trunc: u32,
    /// Random seed; defaults to $HILBLOC_SEED, then 1.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "node")]
    pub ring: RingArg,
    /// Variable cap for Groebner computations on local models.
    #[arg(long = "max-vars", global = true, default_value_t = DEFAULT_MAX_VARS)]
    pub max_vars: usize,
    /// Emit JSON (the default).
    #[arg(long, global = true, conflicts_with = "tsv")]
    pub json: bool,
    /// Emit tab-separated key/value rows.
    #[arg(long, global = true)]
    pub tsv: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long)]
    pub m: u32,
    /// Lower indices of the chain, e.g. `2,2,1,1`.
    #[arg(long, value_delimiter = ',', required = true)]
    pub chain: Vec<u32>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Colength of an ideal.
    Colength { ideal: String },
    /// Membership of an element in an ideal.
    Member { element: String, ideal: String },
    /// Classify an ideal of the node or the cusp.
    Classify { ideal: String },
    /// Flatness relations of the generic deformation of `Q_i^m`.
    Relations {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        i: u32,
        #[arg(long)]
        relative: bool,
    },
    /// Local model of a flag chain, derived by elimination.
    FlagModel {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long)]
        relative: bool,
    },
    /// Closed-form local model of a flag chain, compared with the derived one.
    FlagExpected {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long)]
        relative: bool,
    },
    /// Check a relative local model against the oracle on random points.
    FlagValidate {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// Check that a local model is a complete intersection.
    LciCheck {
        #[command(flatten)]
        chain: ChainArgs,
        #[arg(long)]
        relative: bool,
    },
    /// Enumerate flag strata and compare with a containment search.
    Strata {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Associate normal form of a cusp element.
    AssocForm {
        element: String,
        /// Power-series truncation for the unit.
        #[arg(long = "series-trunc")]
        series_trunc: Option<u32>,
    },
    /// Certify the flat limit of `(x y^m + a y^{m+k})`.
    Limit {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        k: u32,
        /// `0` or `inf`.
        #[arg(long)]
        dir: LimitDirection,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-2,1,3,7")]
        samples: Vec<String>,
    },
    /// Whether two parameter values give different ideals.
    Distinct {
        /// Family in the parameter `a`; without it, `(x y^m + a y^{m+k})` is used.
        ideal: Option<String>,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
    },
    /// Dimension of Hom(I, R/I) for a cusp ideal.
    Tangent { ideal: String },
    /// Tangent dimensions along the punctual family of colength 2 or 3.
    ScanP1 {
        #[arg(long)]
        colength: u32,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "-2,1,3,7")]
        samples: Vec<String>,
    },
    /// Run the acceptance suite.
    Acceptance {
        /// Run only these criteria (1 to 10).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Colength { .. } => "colength",
            Command::Member { .. } => "member",
            Command::Classify { .. } => "classify",
            Command::Relations { .. } => "relations",
            Command::FlagModel { .. } => "flag-model",
            Command::FlagExpected { .. } => "flag-expected",
            Command::FlagValidate { .. } => "flag-validate",
            Command::LciCheck { .. } => "lci-check",
            Command::Strata { .. } => "strata",
            Command::AssocForm { .. } => "assoc-form",
            Command::Limit { .. } => "limit",
            Command::Distinct { .. } => "distinct",
            Command::Tangent { .. } => "tangent",
            Command::ScanP1 { .. } => "scan-p1",
            Command::Acceptance { .. } => "acceptance",
        }
    }
}

/// Text and status produced by one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Output {
    fn fail(code: i32, msg: impl Into<String>) -> Self {
        let mut stderr = msg.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Output { stdout: String::new(), stderr, code }
    }
}

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::TheoremViolation(_) | Error::EliminationStall(_) => EXIT_VIOLATION,
        Error::VariableCap { .. } | Error::InfiniteColength { .. } => EXIT_RESOURCE,
        _ => EXIT_USAGE,
    }
}

/// Parse `argv` (including the program name) and run the command.
pub fn dispatch(argv: &[String], env_seed: Option<&str>) -> Output {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Output { stdout: text, stderr: String::new(), code: EXIT_OK }
                }
                _ => Output::fail(EXIT_USAGE, text),
            };
        }
    };
    let (seed, seed_source) = match (cli.seed, env_seed) {
        (Some(s), _) => (s, "flag"),
        (None, Some(v)) => match v.trim().parse() {
            Ok(s) => (s, "env"),
            Err(_) => return Output::fail(EXIT_USAGE, format!("error: {SEED_ENV}={v} is not an unsigned integer")),
        },
        (None, None) => (DEFAULT_SEED, "default"),
    };
    if cli.trunc < 2 {
        return Output::fail(EXIT_USAGE, format!("error: truncation {} is too small", cli.trunc));
    }
    let format = if cli.tsv { Format::Tsv } else { Format::Json };
    let config = Config { trunc: cli.trunc, seed, seed_source, ring: cli.ring.name().into(), max_vars: cli.max_vars };
    let ctx = Ctx { ring: cli.ring, oracle: Oracle::with_cap(cli.trunc), config: config.clone() };
    let name = cli.command.name();
    match ctx.run(&cli.command) {
        Ok((result, violations)) => {
            let mut report = Report::new(name, argv[1..].to_vec(), config, result);
            report.violations = violations;
            let code = if report.ok() { EXIT_OK } else { EXIT_VIOLATION };
            Output { stdout: report.render(format), stderr: String::new(), code }
        }
        Err(e) => Output::fail(exit_code(&e), format!("error: {e}")),
    }
}

type Run = hilbloc::Result<(Value, Vec<String>)>;

struct Ctx {
    ring: RingArg,
    oracle: Oracle,
    config: Config,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

fn rationals(list: &[String]) -> hilbloc::Result<Vec<Q>> {
    list.iter().map(|s| parse_rational(s)).collect()
}

fn flag(ok: bool, msg: impl Into<String>) -> Vec<String> {
    if ok {
        Vec::new()
    } else {
        vec![msg.into()]
    }
}

impl Ctx {
    fn curve(&self) -> hilbloc::Result<Arc<CurveRing>> {
        let q = CoeffAlgebra::rationals();
        match self.ring {
            RingArg::Node => CurveRing::node(q, self.config.trunc),
            RingArg::Cusp => CurveRing::cusp(q, self.config.trunc),
            RingArg::NodeRel => Err(usage(
                "the relative node has no rational points; use it with relations or the flag commands",
            )),
        }
    }

    fn cusp(&self) -> hilbloc::Result<Arc<CurveRing>> {
        if self.ring != RingArg::Cusp {
            return Err(usage("this command needs --ring cusp"));
        }
        self.curve()
    }

    fn pattern(&self, c: &ChainArgs) -> hilbloc::Result<FlagPattern> {
        FlagPattern::new(c.m, c.chain.clone())
    }

    fn relative(&self, flag: bool) -> bool {
        flag || self.ring == RingArg::NodeRel
    }

    fn run(&self, cmd: &Command) -> Run {
        match cmd {
            Command::Colength { ideal } => {
                let id = parse_ideal_expr(ideal)?.to_ideal(&self.curve()?)?;
                Ok((json!({ "colength": self.oracle.colength(&id)? }), vec![]))
            }
            Command::Member { element, ideal } => {
                let r = self.curve()?;
                let id = parse_ideal_expr(ideal)?.to_ideal(&r)?;
                let e = parse_ideal_expr(element)?;
                if e.len() != 1 {
                    return Err(usage("member takes a single element"));
                }
                let e = e.to_elements(&r)?.remove(0);
                Ok((json!({ "member": self.oracle.member(&e, &id)? }), vec![]))
            }
            Command::Classify { ideal } => {
                let r = self.curve()?;
                let id = parse_ideal_expr(ideal)?.to_ideal(&r)?;
                let v = match self.ring {
                    RingArg::Cusp => {
                        let c = classify_cusp_ideal(&id, &self.oracle)?;
                        json!({ "class": c.view(), "canonical": c.to_string(), "colength": c.colength() })
                    }
                    _ => json!({ "class": classify_node_ideal(&id, &self.oracle)? }),
                };
                Ok((v, vec![]))
            }
            Command::Relations { m, i, relative } => {
                let shape = DeformShape::new(*m, *i, self.relative(*relative), 0)?;
                let derived = derive_flat_relations(&shape)?;
                let closed = closed_form_relations(&shape)?;
                let same = ideals_equal(derived.ring(), derived.equations(), closed.equations())?;
                let show = |v: &[hilbloc::Poly]| v.iter().map(|p| p.to_string()).collect::<Vec<_>>();
                let v = json!({
                    "m": m,
                    "i": i,
                    "relative": shape.relative,
                    "coefficients": shape.coeff_names(),
                    "equations": show(derived.equations()),
                    "closed_form": show(closed.equations()),
                    "matches_closed_form": same,
                });
                Ok((v, flag(same, "derived relations differ from the closed form")))
            }
            Command::FlagModel { chain, relative } => {
                let p = self.pattern(chain)?;
                let model = local_model(&p, self.relative(*relative))?;
                let v = json!({
                    "pattern": p.to_string(),
                    "blocks": p.block_label(),
                    "equation_count": model.equations.len(),
                    "model": model.view(),
                });
                Ok((v, vec![]))
            }
            Command::FlagExpected { chain, relative } => {
                let p = self.pattern(chain)?;
                let rel = self.relative(*relative);
                let expected = expected_model(&p, rel)?;
                let same = models_equivalent(&local_model(&p, rel)?, &expected)?;
                let v = json!({
                    "pattern": p.to_string(),
                    "equation_count": expected.equations.len(),
                    "model": expected.view(),
                    "matches_derived": same,
                });
                Ok((v, flag(same, "closed-form model differs from the derived model")))
            }
            Command::FlagValidate { chain, trials } => {
                let p = self.pattern(chain)?;
                let model = local_model(&p, true)?;
                let rep =
                    validate_model_points(&p, &model, &CoeffAlgebra::uv_cubed(), *trials, self.config.seed, &self.oracle)?;
                let ok = rep.passed();
                Ok((json!({ "pattern": p.to_string(), "report": rep, "passed": ok }), flag(ok, "model points failed")))
            }
            Command::LciCheck { chain, relative } => {
                let p = self.pattern(chain)?;
                let model = local_model(&p, self.relative(*relative))?;
                let lci = check_lci_with_cap(&model, self.config.max_vars)?;
                let v = json!({
                    "pattern": p.to_string(),
                    "lci": lci,
                    "equations": model.equations.len(),
                    "params": model.params.len(),
                });
                Ok((v, flag(lci, "model is not a complete intersection")))
            }
            Command::Strata { m, depth } => {
                let depth = depth.unwrap_or(*m);
                let listed = enumerate_strata(*m, depth)?;
                let brute = strata_by_containment(*m, depth, &self.oracle)?;
                let idx: Vec<Vec<u32>> = listed.iter().map(|p| p.indices().to_vec()).collect();
                let same = idx == brute;
                let chains: Vec<Value> =
                    listed.iter().map(|p| json!({ "indices": p.indices(), "blocks": p.block_label() })).collect();
                let v = json!({
                    "m": m,
                    "depth": depth,
                    "count": listed.len(),
                    "chains": chains,
                    "brute_force_count": brute.len(),
                    "agree": same,
                });
                Ok((v, flag(same, "strata differ from the containment search")))
            }
            Command::AssocForm { element, series_trunc } => {
                let r = self.cusp()?;
                let e = parse_element(&r, element)?;
                let f = associate_normal_form(&e, *series_trunc)?;
                let v = json!({
                    "input": e.to_string(),
                    "canonical": f.canonical.view(),
                    "canonical_element": f.canonical_element().to_string(),
                    "unit": f.unit_witness.to_string(),
                    "trunc": f.trunc,
                });
                Ok((v, vec![]))
            }
            Command::Limit { m, k, dir, samples } => {
                let r = self.cusp()?;
                let claimed = flat_limit(*m, *k, *dir)?;
                let cert = flat_limit_certify(&r, *m, *k, *dir, &claimed, &rationals(samples)?, &self.oracle)?;
                let ok = cert.certified;
                Ok((json!({ "limit": claimed.to_string(), "certificate": cert }), flag(ok, "flat limit not certified")))
            }
            Command::Distinct { ideal, m, k, a, b } => {
                let r = self.cusp()?;
                let (a, b) = (parse_rational(a)?, parse_rational(b)?);
                match (ideal, m, k) {
                    (Some(src), None, None) => {
                        let e = parse_ideal_expr(src)?;
                        if !e.is_symbolic() {
                            return Err(usage("the family must mention the parameter `a`"));
                        }
                        let (ia, ib) = (e.ideal_at(&r, &a)?, e.ideal_at(&r, &b)?);
                        let (ca, cb) = (self.oracle.colength(&ia)?, self.oracle.colength(&ib)?);
                        let distinct = !self.oracle.ideal_equal(&ia, &ib)?;
                        Ok((json!({ "distinct": distinct, "colength_a": ca, "colength_b": cb }), vec![]))
                    }
                    (None, Some(m), Some(k)) => {
                        let d = distinctness(&r, *m, *k, &a, &b, &self.oracle)?;
                        Ok((json!({ "distinct": d }), flag(d || a == b, "distinct parameters gave equal ideals")))
                    }
                    _ => Err(usage("give either a family expression or both --m and --k")),
                }
            }
            Command::Tangent { ideal } => {
                let r = self.cusp()?;
                let id = parse_ideal_expr(ideal)?.to_ideal(&r)?;
                let h = hom_space(&id, &self.oracle)?;
                let v = h.view();
                Ok((json!({ "dim": v.dim, "method": v.method, "generators": v.generators, "basis": v.basis }), vec![]))
            }
            Command::ScanP1 { colength, samples } => {
                let r = self.cusp()?;
                let pts = p1_scan(&r, *colength, &rationals(samples)?, &self.oracle)?;
                let jumps = pts.iter().filter(|p| p.singular).count();
                Ok((json!({ "points": pts, "jumps": jumps }), flag(jumps == 1, format!("expected one jump, found {jumps}"))))
            }
            Command::Acceptance { only } => {
                let mut suite = Suite::new(self.config.seed);
                suite.oracle = self.oracle;
                suite.max_vars = self.config.max_vars;
                let outcomes = if only.is_empty() {
                    suite.run_all(|o| eprintln!("{}", o.line()))
                } else {
                    only.iter()
                        .map(|&id| {
                            let o = suite.run(id);
                            eprintln!("{}", o.line());
                            o
                        })
                        .collect()
                };
                let violations =
                    outcomes.iter().filter(|o| !o.passed).map(|o| format!("criterion {} failed", o.id)).collect();
                Ok((json!({ "criteria": serde_json::to_value(&outcomes).expect("serialize") }), violations))
            }
        }
    }
}
