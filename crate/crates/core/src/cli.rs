//! Command-line front end.
//!
//! Every verb prints one JSON document (or CSV for `table` and `verify`) on
//! standard output. Exit status: 2 for usage and input errors, 1 for failed
//! `verify` checks or computation failures, 0 otherwise.

use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::classify::{
    classify_pq_pair, classify_standard_t, classify_vs_max, classify_vs_min, delta_exponent, phi_exponent,
    EquivalenceVerdict, TrianglePoint, Verdict,
};
use crate::error::{Error, Result};
use crate::multinorms::{
    hilbert_norm, max_norm, min_norm, norm, phi_estimate, pq_norm, standard_t_norm, MultiNormKind,
};
use crate::optkernel::{random_vector, restart_rng, Certification, OptimizerConfig};
use crate::spaces::{inner, khintchine_pair, parse_real, parse_scalar, Exponent, ScalarField, SequenceSpace, VectorTuple, C64};
use crate::torus_geometry::{
    classify_triple, cn_lower_bound, complex_witness_4, complex_witness_4_scaled, extreme_point_test, gram_matrix,
    is_orthogonal, max_hilbert_ratio, mu1_maximize, real_witness_3, structured_tuples, ExtremeVerdict,
};
use crate::weak_summing::{mu, mu_orthogonal_closed_form, op_norm, summing_constant_estimate, OperatorMatrix};

#[derive(Parser, Debug)]
#[command(name = "multinorm", version, about = "Multi-norms on finite-dimensional sequence spaces")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// JSON input file (`-` for standard input).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true)]
    restarts: Option<usize>,
    #[arg(long = "max-iter", global = true)]
    max_iter: Option<usize>,
    /// Relative value tolerance of the ascent kernels.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Grid points per free angle on the torus.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long = "brute-budget", global = true)]
    brute_budget: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum WitnessName {
    Real3,
    Complex4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Axioms,
    Closedforms,
    Orderings,
    Witnesses,
    Constants,
    Classifier,
    Khintchine,
    All,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// A multi-norm of the input tuple.
    Norm {
        /// min | max | pq:P,Q | std:T | hilbert
        #[arg(long)]
        kind: String,
    },
    /// The weak p-summing norm of the input tuple.
    Mu {
        #[arg(long)]
        p: String,
    },
    /// Operator norm of the input matrix between ℓ^u and ℓ^s.
    Opnorm,
    /// Growth sequence φ_n of a multi-norm kind.
    Phi {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        r: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "complex")]
        field: String,
    },
    /// Equivalence of two (p,q)-multi-norms, or of one against min, max or std:T.
    Classify {
        #[arg(long)]
        r: String,
        #[arg(long)]
        p1: String,
        #[arg(long)]
        q1: String,
        #[arg(long)]
        p2: Option<String>,
        #[arg(long)]
        q2: Option<String>,
        /// min | max | std:T
        #[arg(long)]
        vs: Option<String>,
    },
    /// μ_{1,n} of the input tuple in ℓ² with its maximizer classes.
    Mu1,
    /// Torus class of a complex triple.
    ClassifyTriple,
    /// Extreme-point test for the unit ball of μ_{1,n}.
    ExtremeTest,
    /// One of the built-in witness tuples.
    Witness {
        #[arg(long, value_enum)]
        name: WitnessName,
    },
    /// Lower bound for the constant c_n in max ≤ c_n·(2,2).
    Cn {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value = "complex")]
        field: String,
    },
    /// Computed against analytic values over a parameter grid.
    #[command(group(ArgGroup::new("which").required(true).args(["delta", "phi", "ratio"])))]
    Table {
        #[arg(long)]
        delta: bool,
        #[arg(long)]
        phi: bool,
        #[arg(long)]
        ratio: bool,
        #[arg(long, default_value = "2")]
        r: String,
        #[arg(long, default_value_t = 4)]
        nmax: usize,
        /// `default` or a list such as `1,1;1,2;2,3`.
        #[arg(long = "grid-pq", default_value = "default")]
        grid_pq: String,
    },
    /// Reproduces the library's checks; exits 1 if any fails.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
    },
}

/// Failure of a verb, with the exit status it maps to.
enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) | Error::BudgetExceeded(_) => Failure::Compute(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = std::result::Result<(String, bool), Failure>;

/// Runs the command line `argv` (including the program name).
pub fn run<O: Write, E: Write>(argv: &[String], out: &mut O, err: &mut E) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.opts.threads).build() {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "error: cannot start {} threads: {e}", cli.opts.threads);
            return 2;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok((text, ok)) => {
            let _ = write!(out, "{text}");
            if ok {
                0
            } else {
                1
            }
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Compute(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn config(o: &GlobalOpts) -> std::result::Result<OptimizerConfig, Failure> {
    let mut cfg = OptimizerConfig { seed: o.seed, ..Default::default() };
    if let Some(r) = o.restarts {
        cfg.restarts = r.max(1);
    }
    if let Some(m) = o.max_iter {
        cfg.max_iter = m.max(1);
    }
    if let Some(t) = o.tol {
        if !(t > 0.0) {
            return Err(Failure::Usage("--tol must be positive".into()));
        }
        cfg.value_tol = t;
    }
    if let Some(g) = o.grid {
        cfg.grid_density = g.max(1);
    }
    if let Some(b) = o.brute_budget {
        cfg.brute_budget = b;
    }
    Ok(cfg)
}

fn read_input(o: &GlobalOpts) -> std::result::Result<Value, Failure> {
    let path = o.input.as_ref().ok_or_else(|| Failure::Usage("this verb needs --input FILE".into()))?;
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin()).map_err(|e| Failure::Usage(format!("cannot read standard input: {e}")))?
    } else {
        std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid JSON in {}: {e}", path.display())))
}

fn read_tuple(o: &GlobalOpts) -> std::result::Result<VectorTuple, Failure> {
    Ok(VectorTuple::from_json(&read_input(o)?)?)
}

fn exponent(s: &str) -> std::result::Result<Exponent, Failure> {
    Ok(Exponent::new(parse_real(s)?)?)
}

fn field(s: &str) -> std::result::Result<ScalarField, Failure> {
    Ok(s.parse::<ScalarField>()?)
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable output");
    s.push('\n');
    s
}

fn json_only(o: &GlobalOpts, verb: &str) -> std::result::Result<(), Failure> {
    if o.format == Some(Format::Csv) {
        return Err(Failure::Usage(format!("--format csv is available for table and verify, not {verb}")));
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Outcome {
    let o = &cli.opts;
    let cfg = config(o)?;
    match &cli.command {
        Command::Norm { kind } => {
            json_only(o, "norm")?;
            let kind: MultiNormKind = kind.parse()?;
            let x = read_tuple(o)?;
            Ok((to_json(&norm(kind, &x, &cfg)?), true))
        }
        Command::Mu { p } => {
            json_only(o, "mu")?;
            let p = exponent(p)?;
            let x = read_tuple(o)?;
            Ok((to_json(&mu(&x, p, &cfg)?), true))
        }
        Command::Opnorm => {
            json_only(o, "opnorm")?;
            let a = read_matrix(&read_input(o)?)?;
            Ok((to_json(&op_norm(&a, &cfg)?), true))
        }
        Command::Phi { kind, r, m, n, field: f } => {
            json_only(o, "phi")?;
            let kind: MultiNormKind = kind.parse()?;
            let space = SequenceSpace::new(*m, exponent(r)?, field(f)?)?;
            Ok((to_json(&phi_estimate(kind, space, *n, &cfg)?), true))
        }
        Command::Classify { r, p1, q1, p2, q2, vs } => {
            json_only(o, "classify")?;
            Ok((to_json(&classify_cmd(r, p1, q1, p2.as_deref(), q2.as_deref(), vs.as_deref())?), true))
        }
        Command::Mu1 => {
            json_only(o, "mu1")?;
            Ok((to_json(&mu1_maximize(&read_tuple(o)?, &cfg)?), true))
        }
        Command::ClassifyTriple => {
            json_only(o, "classify-triple")?;
            let y = read_tuple(o)?;
            if y.n() != 3 {
                return Err(Failure::Usage(format!("classify-triple needs exactly 3 vectors, got {}", y.n())));
            }
            let v = y.vectors();
            Ok((to_json(&classify_triple(&v[0], &v[1], &v[2])?), true))
        }
        Command::ExtremeTest => {
            json_only(o, "extreme-test")?;
            Ok((to_json(&extreme_point_test(&read_tuple(o)?, &cfg)?), true))
        }
        Command::Witness { name } => {
            json_only(o, "witness")?;
            Ok((to_json(&witness_report(*name, &cfg)?), true))
        }
        Command::Cn { n, d, field: f } => {
            json_only(o, "cn")?;
            Ok((to_json(&cn_lower_bound(*n, *d, field(f)?, &cfg)?), true))
        }
        Command::Table { delta, phi, ratio, r, nmax, grid_pq } => {
            let kind = if *delta {
                TableKind::Delta
            } else if *phi {
                TableKind::Phi
            } else {
                debug_assert!(*ratio);
                TableKind::Ratio
            };
            let rows = emit_table(kind, exponent(r)?, *nmax, &parse_grid(grid_pq)?, &cfg)?;
            let text = match o.format.unwrap_or(Format::Csv) {
                Format::Csv => table_csv(&rows),
                Format::Json => to_json(&rows),
            };
            Ok((text, true))
        }
        Command::Verify { suite } => {
            let report = verify(*suite, &cfg);
            let ok = report.passed;
            let text = match o.format.unwrap_or(Format::Json) {
                Format::Json => to_json(&report),
                Format::Csv => verify_csv(&report),
            };
            Ok((text, ok))
        }
    }
}

/// Matrix schema: `{"field", "from": u, "to": s, "entries": [[…], …]}` with
/// `m` rows of length `n`, read as a map `ℓ^u_n → ℓ^s_m`.
fn read_matrix(v: &Value) -> Result<OperatorMatrix> {
    let f: ScalarField = match v.get("field") {
        Some(f) => serde_json::from_value(f.clone()).map_err(|e| Error::Parse(e.to_string()))?,
        None => ScalarField::Complex,
    };
    let exp = |key: &str| -> Result<Exponent> {
        let raw = v.get(key).cloned().ok_or_else(|| Error::Parse(format!("missing '{key}'")))?;
        serde_json::from_value(raw).map_err(|e| Error::Parse(format!("'{key}': {e}")))
    };
    let rows = v.get("entries").and_then(Value::as_array).ok_or_else(|| Error::Parse("missing 'entries' array".into()))?;
    let entries = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse("each matrix row must be an array".into()))?
                .iter()
                .map(parse_scalar)
                .collect::<Result<Vec<C64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    OperatorMatrix::new(entries, exp("from")?, exp("to")?, f)
}

fn classify_cmd(
    r: &str,
    p1: &str,
    q1: &str,
    p2: Option<&str>,
    q2: Option<&str>,
    vs: Option<&str>,
) -> std::result::Result<EquivalenceVerdict, Failure> {
    let r = exponent(r)?;
    let a = TrianglePoint::new(exponent(p1)?, exponent(q1)?)?;
    match (vs, p2, q2) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            Err(Failure::Usage("--vs compares one point; drop --p2/--q2".into()))
        }
        (Some("min"), ..) => Ok(classify_vs_min(a, r)),
        (Some("max"), ..) => Ok(classify_vs_max(a, r)),
        (Some(other), ..) => match other.strip_prefix("std:") {
            Some(t) => Ok(classify_standard_t(a, exponent(t)?, r)?),
            None => Err(Failure::Usage(format!("--vs must be min, max or std:T, got '{other}'"))),
        },
        (None, Some(p2), Some(q2)) => Ok(classify_pq_pair(a, TrianglePoint::new(exponent(p2)?, exponent(q2)?)?, r)),
        (None, ..) => Err(Failure::Usage("give --p2 and --q2, or --vs".into())),
    }
}

fn witness_report(name: WitnessName, cfg: &OptimizerConfig) -> Result<Value> {
    let (label, y) = match name {
        WitnessName::Real3 => ("real3", real_witness_3()),
        WitnessName::Complex4 => ("complex4", complex_witness_4()),
    };
    let unit = match name {
        WitnessName::Real3 => y.clone(),
        WitnessName::Complex4 => complex_witness_4_scaled(),
    };
    let mu1 = mu1_maximize(&unit, cfg)?;
    Ok(json!({
        "name": label,
        "tuple": y.to_json(),
        "gram": gram_matrix(&y),
        "unit_ball_tuple": unit.to_json(),
        "mu1": mu1.estimate,
        "maximizer_classes": mu1.classes,
    }))
}

// ---------------------------------------------------------------------------
// Tables.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TableKind {
    Delta,
    Phi,
    Ratio,
}

#[derive(Clone, Debug, Serialize)]
struct TableRow {
    p: f64,
    q: f64,
    r: f64,
    n: usize,
    computed: Option<f64>,
    analytic: f64,
    rel_gap: Option<f64>,
    certification: String,
}

const DEFAULT_GRID: [(f64, f64); 6] = [(1.0, 1.0), (1.0, 2.0), (1.5, 2.0), (2.0, 2.0), (2.0, 3.0), (3.0, 3.0)];

fn parse_grid(s: &str) -> std::result::Result<Vec<(Exponent, Exponent)>, Failure> {
    if s == "default" {
        return DEFAULT_GRID.iter().map(|&(p, q)| Ok((Exponent::new(p)?, Exponent::new(q)?))).collect();
    }
    s.split(';')
        .map(|pair| {
            let (p, q) = pair.split_once(',').ok_or_else(|| Failure::Usage(format!("grid entry '{pair}' is not P,Q")))?;
            let pt = TrianglePoint::new(exponent(p)?, exponent(q)?)?;
            Ok((pt.p, pt.q))
        })
        .collect()
}

fn emit_table(
    kind: TableKind,
    r: Exponent,
    nmax: usize,
    grid: &[(Exponent, Exponent)],
    cfg: &OptimizerConfig,
) -> std::result::Result<Vec<TableRow>, Failure> {
    if r.is_infinite() {
        return Err(Failure::Usage("--r must be finite".into()));
    }
    if kind == TableKind::Ratio && r != Exponent::TWO {
        return Err(Failure::Usage("the ratio table lives on ℓ²; use --r 2".into()));
    }
    let cells: Vec<(Exponent, Exponent, usize)> = match kind {
        TableKind::Ratio => (2..=nmax).map(|n| (Exponent::TWO, Exponent::TWO, n)).collect(),
        _ => grid.iter().flat_map(|&(p, q)| (2..=nmax).map(move |n| (p, q, n))).collect(),
    };
    Ok(cells.par_iter().map(|&(p, q, n)| table_row(kind, p, q, r, n, cfg)).collect())
}

fn table_row(kind: TableKind, p: Exponent, q: Exponent, r: Exponent, n: usize, cfg: &OptimizerConfig) -> TableRow {
    let nf = n as f64;
    let (analytic, result): (f64, Result<(f64, Certification)>) = match kind {
        TableKind::Delta => {
            let want = nf.powf(delta_exponent(p.value(), q.value(), r.value()));
            let got = VectorTuple::delta_basis(n, r, ScalarField::Real)
                .and_then(|x| pq_norm(&x, p, q, cfg))
                .map(|e| (e.value, e.certification));
            (want, got)
        }
        TableKind::Phi => {
            let want = nf.powf(phi_exponent(p, q, r));
            let got = SequenceSpace::new(n, r, ScalarField::Complex)
                .and_then(|sp| phi_estimate(MultiNormKind::PQ { p, q }, sp, n, cfg))
                .map(|e| (e.value.value, e.value.certification));
            (want, got)
        }
        TableKind::Ratio => {
            // c_n = 1 for n ≤ 3 over ℂ; beyond that only the ceiling is known.
            let want = if n <= 3 { 1.0 } else { 2.0 / std::f64::consts::PI.sqrt() };
            let got = best_structured_ratio(n, cfg);
            (want, got)
        }
    };
    match result {
        Ok((v, c)) => TableRow {
            p: p.value(),
            q: q.value(),
            r: r.value(),
            n,
            computed: Some(v),
            analytic,
            rel_gap: Some((v - analytic).abs() / analytic.abs().max(f64::MIN_POSITIVE)),
            certification: cert_name(c).into(),
        },
        Err(e) => TableRow {
            p: p.value(),
            q: q.value(),
            r: r.value(),
            n,
            computed: None,
            analytic,
            rel_gap: None,
            certification: format!("error: {e}"),
        },
    }
}

fn best_structured_ratio(n: usize, cfg: &OptimizerConfig) -> Result<(f64, Certification)> {
    let mut best = (0.0, Certification::Exact);
    for (_, rows) in structured_tuples(n, n, ScalarField::Complex) {
        let x = VectorTuple::new(SequenceSpace::new(n, Exponent::TWO, ScalarField::Complex)?, rows)?;
        let (ratio, mx, h) = max_hilbert_ratio(&x, cfg)?;
        if ratio > best.0 {
            best = (ratio, mx.certification.weakest(h.certification).weakest(Certification::CertifiedLowerBound));
        }
    }
    Ok(best)
}

fn cert_name(c: Certification) -> &'static str {
    match c {
        Certification::Exact => "Exact",
        Certification::CertifiedLowerBound => "CertifiedLowerBound",
        Certification::Heuristic => "Heuristic",
    }
}

/// `x` with 12 significant digits, in the shortest of fixed or exponent form.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let fixed = format!("{x:.*}", (11 - exp).max(0) as usize);
        trim_zeros(&fixed)
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn table_csv(rows: &[TableRow]) -> String {
    let mut s = String::from("p,q,r,n,computed,analytic,rel_gap,certification\n");
    let opt = |v: Option<f64>| v.map(format_sig).unwrap_or_default();
    for row in rows {
        s.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            format_sig(row.p),
            format_sig(row.q),
            format_sig(row.r),
            row.n,
            opt(row.computed),
            format_sig(row.analytic),
            opt(row.rel_gap),
            csv_field(&row.certification)
        ));
    }
    s
}

// ---------------------------------------------------------------------------
// Verification suites.

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: String,
    pub expected: Value,
    pub computed: Value,
    pub pass: bool,
    pub citation: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

fn check(id: impl Into<String>, expected: impl Serialize, computed: impl Serialize, pass: bool, citation: &str) -> Check {
    Check {
        id: id.into(),
        expected: serde_json::to_value(expected).unwrap_or(Value::Null),
        computed: serde_json::to_value(computed).unwrap_or(Value::Null),
        pass,
        citation: citation.into(),
    }
}

fn failed(id: impl Into<String>, e: Error, citation: &str) -> Check {
    check(id, "no error", e.to_string(), false, citation)
}

/// Runs one suite, or all of them in a fixed order.
pub fn verify(suite: Suite, cfg: &OptimizerConfig) -> VerifyReport {
    let suites: Vec<Suite> = match suite {
        Suite::All => vec![
            Suite::Axioms,
            Suite::Closedforms,
            Suite::Orderings,
            Suite::Witnesses,
            Suite::Constants,
            Suite::Classifier,
            Suite::Khintchine,
        ],
        s => vec![s],
    };
    let checks: Vec<Check> = suites
        .into_iter()
        .flat_map(|s| match s {
            Suite::Axioms => verify_axioms(cfg),
            Suite::Closedforms => verify_closed_forms(cfg),
            Suite::Orderings => verify_orderings(cfg),
            Suite::Witnesses => verify_witnesses(cfg),
            Suite::Constants => verify_constants(cfg),
            Suite::Classifier => verify_classifier(),
            Suite::Khintchine => verify_khintchine(cfg),
            Suite::All => unreachable!(),
        })
        .collect();
    VerifyReport { suite, passed: checks.iter().all(|c| c.pass), checks }
}

fn verify_csv(report: &VerifyReport) -> String {
    let mut s = String::from("id,expected,computed,pass,citation\n");
    let cell = |v: &Value| match v {
        Value::Number(n) => n.as_f64().map(format_sig).unwrap_or_else(|| n.to_string()),
        Value::String(t) => t.clone(),
        other => other.to_string(),
    };
    for c in &report.checks {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            csv_field(&c.id),
            csv_field(&cell(&c.expected)),
            csv_field(&cell(&c.computed)),
            c.pass,
            csv_field(&c.citation)
        ));
    }
    s
}

fn space(m: usize, r: f64, field: ScalarField) -> SequenceSpace {
    SequenceSpace::new(m, Exponent::new(r).expect("valid exponent"), field).expect("valid space")
}

fn random_tuple(rng: &mut impl Rng, n: usize, sp: SequenceSpace) -> VectorTuple {
    let rows = (0..n).map(|_| random_vector(rng, sp.dim, sp.field)).collect();
    VectorTuple::new(sp, rows).expect("rows match the space")
}

fn exp(x: f64) -> Exponent {
    Exponent::new(x).expect("valid exponent")
}

const CITE_A1: &str = "axiom (A1): the norm is invariant under permutations of the tuple";
const CITE_A2: &str = "axiom (A2): multiplying entries by scalars of modulus at most 1 cannot increase the norm";
const CITE_A3: &str = "axiom (A3): appending a zero vector leaves the norm unchanged";
const CITE_A4: &str = "axiom (A4): repeating the last vector leaves the norm unchanged";

fn verify_axioms(cfg: &OptimizerConfig) -> Vec<Check> {
    let mut rng = restart_rng(cfg.seed, 101);
    let kinds: Vec<(MultiNormKind, f64)> = vec![
        (MultiNormKind::Min, 1.5),
        (MultiNormKind::Max, 1.0),
        (MultiNormKind::StandardT { t: exp(3.0) }, 1.5),
        (MultiNormKind::Hilbert, 2.0),
        (MultiNormKind::PQ { p: exp(1.5), q: exp(2.0) }, 2.0),
    ];
    let mut out = Vec::new();
    for (kind, r) in kinds {
        let mut worst = [0.0f64; 4];
        let mut error = None;
        for _ in 0..8 {
            let field = if rng.random::<bool>() { ScalarField::Real } else { ScalarField::Complex };
            let m = rng.random_range(1..=3);
            let sp = space(m, r, field);
            // Exact routes: Hilbert pairs, and one repeated vector for (p,q).
            let x = match kind {
                MultiNormKind::Hilbert => random_tuple(&mut rng, 2, sp),
                MultiNormKind::PQ { .. } => {
                    let v = random_vector(&mut rng, m, field);
                    VectorTuple::new(sp, vec![v.clone(), vec![C64::new(0.0, 0.0); m], v]).expect("valid rows")
                }
                _ => {
                    let n = rng.random_range(1..=3);
                    random_tuple(&mut rng, n, sp)
                }
            };
            let unimodular = |t: f64| match field {
                ScalarField::Real => C64::new(t.cos().signum(), 0.0),
                ScalarField::Complex => C64::from_polar(1.0, t),
            };
            let alpha: Vec<C64> = match kind {
                MultiNormKind::PQ { .. } => vec![unimodular(2.1) * 0.7; x.n()],
                _ => (0..x.n()).map(|i| unimodular(0.9 + 1.3 * i as f64) * (0.3 + 0.2 * i as f64)).collect(),
            };
            match axiom_violations(kind, &x, &alpha, cfg) {
                Ok(v) => (0..4).for_each(|k| worst[k] = worst[k].max(v[k])),
                Err(e) => error = Some(e),
            }
        }
        for (k, cite) in [CITE_A1, CITE_A2, CITE_A3, CITE_A4].iter().enumerate() {
            let id = format!("axioms.A{}.{kind}", k + 1);
            out.push(match &error {
                Some(e) => failed(id, e.clone(), cite),
                None => {
                    let tol = if k == 0 || k == 2 { 0.0 } else { 1e-9 };
                    check(id, format!("violation <= {tol:e}"), worst[k], worst[k] <= tol, cite)
                }
            });
        }
    }
    out
}

/// Largest violation of each axiom on one tuple.
fn axiom_violations(kind: MultiNormKind, x: &VectorTuple, alpha: &[C64], cfg: &OptimizerConfig) -> Result<[f64; 4]> {
    let value = |rows: Vec<Vec<C64>>| -> Result<f64> {
        let est = norm(kind, &VectorTuple::new(x.space, rows)?, cfg)?;
        if est.certification != Certification::Exact {
            return Err(Error::Precondition(format!("{kind} left its exact route")));
        }
        Ok(est.value)
    };
    let rows = x.vectors().to_vec();
    let base = value(rows.clone())?;
    let scale = base.max(1.0);
    let rev: Vec<Vec<C64>> = rows.iter().rev().cloned().collect();
    let a1 = (value(rev)? - base).abs();
    let amax = alpha.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let scaled = rows.iter().zip(alpha).map(|(v, a)| v.iter().map(|z| z * a).collect()).collect();
    let a2 = ((value(scaled)? - amax * base) / scale).max(0.0);
    let mut padded = rows.clone();
    padded.push(vec![C64::new(0.0, 0.0); x.m()]);
    let a3 = (value(padded)? - base).abs();
    let mut dup = rows.clone();
    dup.push(rows[rows.len() - 1].clone());
    let a4 = (value(dup)? - base).abs() / scale;
    Ok([a1, a2, a3, a4])
}

fn rel_check(id: String, want: f64, got: Result<f64>, tol: f64, cite: &str) -> Check {
    match got {
        Ok(v) => {
            let gap = (v - want).abs() / want.abs().max(1.0);
            check(id, want, v, gap <= tol, cite)
        }
        Err(e) => failed(id, e, cite),
    }
}

fn verify_closed_forms(cfg: &OptimizerConfig) -> Vec<Check> {
    let mut out = Vec::new();
    const DELTA: &str = "delta-basis norm n^alpha with alpha = (1/q - (1/p - 1/r)+)+";
    for r in [1.0, 2.0] {
        for &(p, q) in &DEFAULT_GRID {
            for n in [2usize, 3] {
                let want = (n as f64).powf(delta_exponent(p, q, r));
                let got = VectorTuple::delta_basis(n, exp(r), ScalarField::Real)
                    .and_then(|x| pq_norm(&x, exp(p), exp(q), cfg))
                    .map(|e| e.value);
                out.push(rel_check(format!("closedforms.delta.r{r}.p{p}.q{q}.n{n}"), want, got, 1e-3, DELTA));
            }
        }
    }
    const STD: &str = "standard t-multi-norm of the delta basis equals n^(1/t)";
    for (r, t) in [(1.0, 1.0), (1.0, 2.0), (2.0, 3.0)] {
        for n in [2usize, 4] {
            let got = VectorTuple::delta_basis(n, exp(r), ScalarField::Real)
                .and_then(|x| standard_t_norm(&x, exp(t), cfg))
                .map(|e| e.value);
            out.push(rel_check(format!("closedforms.std.r{r}.t{t}.n{n}"), (n as f64).powf(1.0 / t), got, 1e-12, STD));
        }
    }
    const ORTH: &str = "weak p-summing norm of an orthogonal tuple: l2 of the norms (p=1), l^t with 1/t = 1/p - 1/2, max (p>=2)";
    let orth = VectorTuple::from_real(space(2, 2.0, ScalarField::Real), &[vec![5.0, 0.0], vec![0.0, 1.0]]).expect("valid");
    for p in [1.0, 4.0 / 3.0, 2.0, 3.0] {
        let id = format!("closedforms.mu_orthogonal.p{p:.4}");
        out.push(match mu_orthogonal_closed_form(&orth.row_norms(), exp(p)) {
            Ok(want) => rel_check(id, want, mu(&orth, exp(p), cfg).map(|e| e.value), 1e-9, ORTH),
            Err(e) => failed(id, e, ORTH),
        });
    }
    const DIAG: &str = "diagonal operator from l^u to l^s has norm ||alpha||_t with 1/s = 1/u + 1/t when u > s";
    let diag = OperatorMatrix::new(
        vec![vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)], vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]],
        exp(4.0),
        exp(2.0),
        ScalarField::Real,
    )
    .expect("valid");
    out.push(rel_check("closedforms.diag_opnorm".into(), 2f64.powf(0.25), op_norm(&diag, cfg).map(|e| e.value), 1e-12, DIAG));
    const HILB_ORTH: &str = "Hilbert multi-norm of an orthogonal tuple is the l2 norm of the lengths";
    let x = VectorTuple::from_real(
        space(3, 2.0, ScalarField::Real),
        &[vec![3.0, 0.0, 0.0], vec![0.0, 1.0, 1.0], vec![0.0, 2.0, -2.0]],
    )
    .expect("valid");
    let want = x.row_norms().iter().map(|v| v * v).sum::<f64>().sqrt();
    out.push(rel_check("closedforms.hilbert_orthogonal".into(), want, hilbert_norm(&x, cfg).map(|e| e.value), 1e-9, HILB_ORTH));
    out
}

fn verify_orderings(cfg: &OptimizerConfig) -> Vec<Check> {
    const CHAIN: &str = "every multi-norm lies between the minimum and maximum multi-norms";
    const STD_T: &str = "the standard t-multi-norm decreases as t increases";
    const DOMINATION: &str = "the standard t-multi-norm is dominated by the (r,t)-multi-norm";
    const MU_P: &str = "the weak p-summing norm decreases as p increases";
    let mut rng = restart_rng(cfg.seed, 102);
    let cfg = &cfg.light();
    let mut out = Vec::new();
    for k in 0..4 {
        let field = if k % 2 == 0 { ScalarField::Real } else { ScalarField::Complex };
        let r = [1.5, 2.0][k / 2];
        let x = random_tuple(&mut rng, 3, space(3, r, field));
        let lo = min_norm(&x).value;
        let hi = max_norm(&x, cfg);
        for (p, q) in [(1.0, 2.0), (2.0, 2.0), (1.5, 3.0)] {
            let id = format!("orderings.chain.{k}.pq{p},{q}");
            out.push(match (pq_norm(&x, exp(p), exp(q), cfg), &hi) {
                (Ok(v), Ok(h)) => {
                    let ok = v.value >= lo * (1.0 - 1e-6) && v.value <= h.value * (1.0 + 1e-6);
                    check(id, json!([lo, h.value]), v.value, ok, CHAIN)
                }
                (Err(e), _) => failed(id, e, CHAIN),
                (_, Err(e)) => failed(id, e.clone(), CHAIN),
            });
        }
        let std = |t: f64| standard_t_norm(&x, exp(t), cfg).map(|e| e.value);
        let id = format!("orderings.std_t.{k}");
        out.push(match (std(r), std(2.0 * r)) {
            (Ok(a), Ok(b)) => check(id, format!("[{}] >= [{}]", r, 2.0 * r), json!([a, b]), a >= b * (1.0 - 1e-12), STD_T),
            (Err(e), _) | (_, Err(e)) => failed(id, e, STD_T),
        });
        let t = 2.0 * r;
        let id = format!("orderings.domination.{k}");
        out.push(match (std(t), pq_norm(&x, exp(r), exp(t), cfg)) {
            (Ok(a), Ok(b)) => check(id, "[t] <= (r,t)", json!([a, b.value]), a <= b.value * (1.0 + 1e-3), DOMINATION),
            (Err(e), _) | (_, Err(e)) => failed(id, e, DOMINATION),
        });
        let id = format!("orderings.mu_p.{k}");
        let m = |p: f64| mu(&x, exp(p), cfg).map(|e| e.value);
        out.push(match (m(1.0), m(2.0)) {
            (Ok(a), Ok(b)) => check(id, "mu_1 >= mu_2", json!([a, b]), a >= b * (1.0 - 1e-6), MU_P),
            (Err(e), _) | (_, Err(e)) => failed(id, e, MU_P),
        });
    }
    out
}

fn verify_witnesses(cfg: &OptimizerConfig) -> Vec<Check> {
    const R3: &str = "real level-3 witness: mu_{1,3} = 1, Gram entries +-1/11, extreme, not orthogonal";
    const C4: &str = "complex 4-tuple witness: [x_i,x_j] = -1 for every i != j";
    const C4_EXT: &str = "complex 4-tuple witness: every torus maximizer has vanishing phase sum and the extremality system is trivial";
    let mut out = Vec::new();
    let y = real_witness_3();
    match mu1_maximize(&y, cfg) {
        Ok(m) => out.push(check("witnesses.real3.mu1", 1.0, m.estimate.value, (m.estimate.value - 1.0).abs() <= 1e-12, R3)),
        Err(e) => out.push(failed("witnesses.real3.mu1", e, R3)),
    }
    let g = gram_matrix(&y);
    let gram_ok = [(0, 1, 1.0), (1, 2, 1.0), (0, 2, -1.0)]
        .iter()
        .all(|&(i, j, s)| (g[i][j] - C64::new(s / 11.0, 0.0)).norm() <= 1e-15);
    out.push(check("witnesses.real3.gram", "off-diagonal entries 1/11, 1/11, -1/11", &g, gram_ok, R3));
    out.push(check("witnesses.real3.non_orthogonal", true, !is_orthogonal(&y, 1e-12), !is_orthogonal(&y, 1e-12), R3));
    match extreme_point_test(&y, cfg) {
        Ok(rep) => {
            let ok = rep.verdict == ExtremeVerdict::Extreme;
            out.push(check("witnesses.real3.extreme", "Extreme", &rep.verdict, ok, R3));
        }
        Err(e) => out.push(failed("witnesses.real3.extreme", e, R3)),
    }
    let g = gram_matrix(&complex_witness_4());
    let gram_ok = (0..4).all(|i| (0..4).all(|j| i == j || g[i][j] == C64::new(-1.0, 0.0)));
    out.push(check("witnesses.complex4.gram", "-1 off the diagonal", &g, gram_ok, C4));
    let ys = complex_witness_4_scaled();
    match (mu1_maximize(&ys, cfg), extreme_point_test(&ys, cfg)) {
        (Ok(m), Ok(rep)) => {
            out.push(check(
                "witnesses.complex4.mu1",
                1.0,
                m.estimate.value,
                (m.estimate.value - 1.0).abs() <= 1e-9,
                C4_EXT,
            ));
            let worst = m.classes.iter().chain(&rep.maximizers).map(|xi| xi.iter().sum::<C64>().norm()).fold(0.0, f64::max);
            out.push(check("witnesses.complex4.phase_sum", "<= 1e-6", worst, worst <= 1e-6, C4_EXT));
            out.push(check(
                "witnesses.complex4.nullspace",
                json!({"nullspace_dim": 0, "first_stage_blocks_equal": true}),
                json!({"nullspace_dim": rep.nullspace_dim, "first_stage_blocks_equal": rep.first_stage_blocks_equal}),
                rep.nullspace_dim == 0 && rep.first_stage_blocks_equal,
                C4_EXT,
            ));
        }
        (Err(e), _) | (_, Err(e)) => out.push(failed("witnesses.complex4", e, C4_EXT)),
    }
    out
}

fn verify_constants(cfg: &OptimizerConfig) -> Vec<Check> {
    const SUMMING: &str = "(q,p)-summing constants of any operator are at most k^(1/q) times its norm";
    const LEVEL2: &str = "on pairs in a Hilbert space the maximum and Hilbert multi-norms agree";
    const CEILING: &str = "max <= (2/sqrt(pi))·(2,2) on complex Hilbert spaces";
    const PHI: &str = "growth exponent at r = 2 is attained";
    const HILB22: &str = "the Hilbert multi-norm equals the (2,2)-multi-norm";
    let mut out = Vec::new();
    let id = OperatorMatrix::identity(3, Exponent::TWO, Exponent::TWO, ScalarField::Real).expect("valid");
    let bound = 3f64.sqrt();
    out.push(match summing_constant_estimate(&id, Exponent::TWO, Exponent::TWO, 3, cfg) {
        Ok(e) => check(
            "constants.summing_identity",
            format!("[{}, {}]", bound * (1.0 - 1e-3), bound),
            e.value,
            e.value <= bound * (1.0 + 1e-6) && e.value >= bound * (1.0 - 1e-3),
            SUMMING,
        ),
        Err(e) => failed("constants.summing_identity", e, SUMMING),
    });
    let mut rng = restart_rng(cfg.seed, 103);
    for k in 0..3 {
        let x = random_tuple(&mut rng, 2, space(2 + k, 2.0, ScalarField::Complex));
        let id = format!("constants.level2.{k}");
        out.push(match (max_norm(&x, cfg), hilbert_norm(&x, cfg)) {
            (Ok(a), Ok(b)) => rel_check(id, b.value, Ok(a.value), 1e-3, LEVEL2),
            (Err(e), _) | (_, Err(e)) => failed(id, e, LEVEL2),
        });
        let x = random_tuple(&mut rng, 3, space(3, 2.0, ScalarField::Complex));
        let id = format!("constants.hilbert22.{k}");
        out.push(match (hilbert_norm(&x, cfg), pq_norm(&x, Exponent::TWO, Exponent::TWO, cfg)) {
            (Ok(a), Ok(b)) => rel_check(id, a.value, Ok(b.value), 1e-3, HILB22),
            (Err(e), _) | (_, Err(e)) => failed(id, e, HILB22),
        });
    }
    let ceiling = 2.0 / std::f64::consts::PI.sqrt();
    out.push(match best_structured_ratio(4, cfg) {
        Ok((v, _)) => check("constants.ceiling.n4", format!("<= {}", ceiling + 1e-3), v, v <= ceiling + 1e-3, CEILING),
        Err(e) => failed("constants.ceiling.n4", e, CEILING),
    });
    for (p, q) in [(2.0, 2.0), (2.0, 3.0)] {
        let n = 3usize;
        let want = (n as f64).powf(phi_exponent(exp(p), exp(q), Exponent::TWO));
        let got = phi_estimate(MultiNormKind::PQ { p: exp(p), q: exp(q) }, space(n, 2.0, ScalarField::Complex), n, cfg);
        let id = format!("constants.phi.p{p}.q{q}.n{n}");
        out.push(match got {
            Ok(e) => {
                let v = e.value.value;
                check(id, format!("[{}, {}]", 0.95 * want, want), v, v >= 0.95 * want && v <= want * (1.0 + 1e-6), PHI)
            }
            Err(e) => failed(id, e, PHI),
        });
    }
    out
}

fn verify_classifier() -> Vec<Check> {
    let pt = |p: f64, q: f64| TrianglePoint::from_f64(p, q).expect("valid point");
    let mut out = Vec::new();
    let mut push = |id: &str, want: Verdict, got: Result<EquivalenceVerdict>| {
        out.push(match got {
            Ok(v) => {
                let ok = v.verdict == want && !v.citation.is_empty();
                let citation = v.citation.clone();
                check(format!("classifier.{id}"), want, &v, ok, &citation)
            }
            Err(e) => failed(format!("classifier.{id}"), e, "classifier"),
        })
    };
    use Verdict::*;
    push("l1_same_q", Equivalent, Ok(classify_pq_pair(pt(1.0, 2.0), pt(1.5, 2.0), exp(1.0))));
    push("l1_diagonal", NotEquivalent, Ok(classify_pq_pair(pt(2.0, 2.0), pt(1.0, 2.0), exp(1.0))));
    push("rge2_same_curve_open", Open, Ok(classify_pq_pair(pt(1.0, 4.0 / 3.0), pt(4.0 / 3.0, 2.0), exp(3.0))));
    push("min_equal_l2", EquivalentToMin, Ok(classify_vs_min(pt(1.0, 2.0), exp(2.0))));
    push("min_not_l2", NotEquivalent, Ok(classify_vs_min(pt(2.0, 3.0), exp(2.0))));
    push("min_not_l1", NotEquivalent, Ok(classify_vs_min(pt(1.0, 9.0), exp(1.0))));
    push("max_below_rbar", EquivalentToMax, Ok(classify_vs_max(pt(1.5, 1.5), exp(3.0))));
    push("max_diag_above_rbar", NotEquivalent, Ok(classify_vs_max(pt(2.0, 2.0), exp(1.5))));
    push("max_22_rge2", EquivalentToMax, Ok(classify_vs_max(pt(2.0, 2.0), exp(4.0))));
    push("std_l1_equal", Equivalent, classify_standard_t(pt(1.0, 3.0), exp(3.0), exp(1.0)));
    push("std_rge2", NotEquivalent, classify_standard_t(pt(2.0, 3.0), exp(3.0), exp(3.0)));
    push("std_open", Open, classify_standard_t(pt(1.5, 6.0), exp(6.0), exp(1.5)));
    out
}

fn verify_khintchine(cfg: &OptimizerConfig) -> Vec<Check> {
    const CITE: &str = "Khintchine embedding pair: <R_n x, S_n y> = <x, y>";
    let mut rng = restart_rng(cfg.seed, 104);
    let mut out = Vec::new();
    for n in 1..=6 {
        for r in [1.0, 1.5, 3.0] {
            let id = format!("khintchine.n{n}.r{r}");
            let pair = match khintchine_pair(n, exp(r)) {
                Ok(p) => p,
                Err(e) => {
                    out.push(failed(id, e, CITE));
                    continue;
                }
            };
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let x = random_vector(&mut rng, n, ScalarField::Complex);
                let y = random_vector(&mut rng, n, ScalarField::Complex);
                let rhs = inner(&x, &y);
                worst = worst.max((inner(&pair.apply_r(&x), &pair.apply_s(&y)) - rhs).norm() / (1.0 + rhs.norm()));
            }
            out.push(check(id, "<= 1e-12", worst, worst <= 1e-12, CITE));
        }
    }
    out
}
