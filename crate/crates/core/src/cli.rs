//! The `fermat-pp3` command line.
//!
//! Exit codes: 0 success, 1 data error, 2 surviving primes after elimination,
//! 64 usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{ArgAction, Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bounds::{
    assemble_bk_with, compute_ck, ray_class_group, set_aq_for_norm, BoundsReport, CkCase, CkTable,
    RayClassGroup,
};
use crate::eliminate::cache::{sha256_hex, CacheKey, VerdictCache};
use crate::eliminate::expect::{self, Outcome, SectionCheck};
use crate::eliminate::{elimination_primes, parse_forms, verdicts, EliminationReport, Verdict};
use crate::frey::{
    classify_away_from_lambda, cubic_test, frey_invariants, j_valuation_at_lambda,
    j_valuation_from_model, lambda_exponent, CubicReading, FreyInvariants, JValuation,
    LocalClassification,
};
use crate::ring::{primes_up_to_norm, valuation_at, QuadraticField, Valuation};
use crate::screen::{
    parse_field_records, screen_pp2, screen_pp3, tower_poly, ScreeningVerdict, Tri, DEFAULT_BUDGET,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_SURVIVORS: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Parser, Debug, Serialize)]
#[command(name = "fermat-pp3", version, about = "Modular-method computations for x^p + y^p = z^3")]
pub struct Cli {
    /// Write a reproducibility manifest to this path.
    #[arg(long, global = true, value_name = "PATH")]
    #[serde(skip)]
    pub manifest: Option<PathBuf>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// List the supported fields.
    Fields,
    /// Frey curve invariants and local classification.
    Frey(FreyArgs),
    /// Irreducibility constants, ray class groups, Hasse sets and B_K.
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Eliminate newforms from an eigenvalue table.
    Eliminate(EliminateArgs),
    /// Screen number fields against the asymptotic hypotheses.
    Screen(ScreenArgs),
    /// Run ck, rcg, bk and (optionally) eliminate for one field.
    Pipeline(PipelineArgs),
}

fn parse_field(s: &str) -> Result<u32, String> {
    let d: u32 = s.parse().map_err(|_| format!("invalid field {s:?}"))?;
    QuadraticField::new(d).map(|_| d).map_err(|e| e.to_string())
}

fn field(d: u32) -> QuadraticField {
    QuadraticField::new(d).expect("validated by the parser")
}

#[derive(Args, Debug, Serialize)]
pub struct FreyArgs {
    #[arg(long, value_parser = parse_field)]
    pub field: u32,
    #[arg(long, allow_hyphen_values = true)]
    pub a: String,
    #[arg(long, allow_hyphen_values = true)]
    pub b: String,
    #[arg(long, allow_hyphen_values = true)]
    pub c: String,
    #[arg(long, value_parser = clap::value_parser!(u64).range(3..=200_000))]
    pub p: u64,
    /// Classify primes dividing the discriminant up to this norm.
    #[arg(long, default_value_t = 1000)]
    pub norm_bound: u64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsCmd {
    /// Resultant table and C_K.
    Ck {
        #[arg(long, value_enum)]
        case: CkCase,
    },
    /// Ray class group of modulus lambda^m.
    Rcg {
        #[arg(long, value_parser = parse_field)]
        field: u32,
        #[arg(long, value_parser = clap::value_parser!(u32).range(0..=3))]
        m: u32,
    },
    /// The Hasse set A(q) for a prime of the given norm.
    Aq {
        #[arg(long, value_parser = parse_field)]
        field: u32,
        #[arg(long)]
        norm: u64,
    },
    /// The assembled bound B_K.
    Bk {
        #[arg(long, value_parser = parse_field)]
        field: u32,
        #[arg(long)]
        mk: Option<u64>,
        #[arg(long, action = ArgAction::Set)]
        cubic_solvable: bool,
        #[arg(long, value_enum, default_value_t)]
        cubic_reading: CubicReading,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct EliminateArgs {
    #[arg(long, value_parser = parse_field)]
    pub field: u32,
    #[arg(long)]
    pub forms: PathBuf,
    /// Use primes of norm strictly below this bound.
    #[arg(long, default_value_t = 50)]
    pub norm_bound: u64,
    #[arg(long, conflicts_with = "auto_bk", required_unless_present = "auto_bk")]
    pub bk: Option<u64>,
    /// Derive B_K from the bounds module.
    #[arg(long, requires = "cubic_solvable")]
    pub auto_bk: bool,
    #[arg(long, action = ArgAction::Set, requires = "auto_bk")]
    pub cubic_solvable: Option<bool>,
    #[arg(long, requires = "auto_bk")]
    pub mk: Option<u64>,
    #[arg(long, value_enum, default_value_t)]
    pub cubic_reading: CubicReading,
    #[arg(long)]
    pub no_cache: bool,
    /// Check the bundled per-field expectations for sections present in the file.
    #[arg(long)]
    pub check_expectations: bool,
    /// Check against this expectations file instead of the bundled one.
    #[arg(long, value_name = "FILE")]
    pub expectations: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    Pp3,
    Pp2,
}

#[derive(Args, Debug, Serialize)]
#[command(args_conflicts_with_subcommands = true)]
pub struct ScreenArgs {
    #[command(subcommand)]
    pub sub: Option<ScreenSub>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Signature::Pp3)]
    pub signature: Signature,
    /// Number of test primes for the zeta_3 check.
    #[arg(long = "budget", default_value_t = DEFAULT_BUDGET as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    #[arg(long, conflicts_with = "json")]
    pub csv: bool,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScreenSub {
    /// The tower polynomial f_n.
    Tower {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=10))]
        n: u32,
    },
}

#[derive(Args, Debug, Serialize)]
pub struct PipelineArgs {
    #[arg(long, value_parser = parse_field)]
    pub field: u32,
    #[arg(long)]
    pub forms: Option<PathBuf>,
    #[arg(long)]
    pub mk: Option<u64>,
    #[arg(long, action = ArgAction::Set)]
    pub cubic_solvable: bool,
    #[arg(long, value_enum, default_value_t)]
    pub cubic_reading: CubicReading,
    #[arg(long, default_value_t = 50)]
    pub norm_bound: u64,
    #[arg(long)]
    pub no_cache: bool,
}

/// Record of one invocation, sufficient to reproduce its output.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub version: &'static str,
    pub parameters: serde_json::Value,
    /// sha256 of every input file, keyed by path as given.
    pub inputs: BTreeMap<String, String>,
    pub exit_code: i32,
    pub timestamp_unix: u64,
}

struct Ctx<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    json: bool,
    inputs: BTreeMap<String, String>,
}

impl Ctx<'_> {
    fn read(&mut self, path: &Path) -> Result<Vec<u8>, String> {
        let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
        self.inputs.insert(path.display().to_string(), sha256_hex(&bytes));
        Ok(bytes)
    }

    fn read_text(&mut self, path: &Path) -> Result<String, String> {
        String::from_utf8(self.read(path)?).map_err(|_| format!("{}: not UTF-8", path.display()))
    }

    fn emit_json<T: Serialize>(&mut self, v: &T) -> Result<(), String> {
        let s = serde_json::to_string_pretty(v).map_err(|e| e.to_string())?;
        writeln!(self.out, "{s}").map_err(|e| e.to_string())
    }
}

macro_rules! out {
    ($ctx:expr, $($arg:tt)*) => {
        writeln!($ctx.out, $($arg)*).map_err(|e| e.to_string())?
    };
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_USAGE,
            };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    let mut ctx = Ctx { out, err, json: cli.json, inputs: BTreeMap::new() };
    let code = match dispatch(&cli, &mut ctx) {
        Ok(code) => code,
        Err(Failure::Data(msg)) => {
            let _ = writeln!(ctx.err, "error: {msg}");
            EXIT_DATA
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(ctx.err, "error: {msg}\n\n{}", Cli::command().render_usage());
            EXIT_USAGE
        }
    };
    if let Some(path) = &cli.manifest {
        let manifest = RunManifest {
            command_line: args.iter().map(|a| a.to_string_lossy().into_owned()).collect(),
            version: env!("CARGO_PKG_VERSION"),
            parameters: serde_json::to_value(&cli).unwrap_or(serde_json::Value::Null),
            inputs: std::mem::take(&mut ctx.inputs),
            exit_code: code,
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        };
        let written = serde_json::to_string_pretty(&manifest)
            .map_err(|e| e.to_string())
            .and_then(|s| std::fs::write(path, s + "\n").map_err(|e| e.to_string()));
        if let Err(e) = written {
            let _ = writeln!(ctx.err, "error: cannot write manifest {}: {e}", path.display());
            return EXIT_DATA;
        }
    }
    code
}

enum Failure {
    Data(String),
    Usage(String),
}

impl From<String> for Failure {
    fn from(s: String) -> Self {
        Failure::Data(s)
    }
}

fn dispatch(cli: &Cli, ctx: &mut Ctx) -> Result<i32, Failure> {
    match &cli.command {
        Command::Fields => cmd_fields(ctx).map_err(Into::into),
        Command::Frey(a) => cmd_frey(a, ctx).map_err(Into::into),
        Command::Bounds(b) => cmd_bounds(b, ctx).map_err(Into::into),
        Command::Eliminate(a) => cmd_eliminate(a, ctx).map_err(Into::into),
        Command::Screen(a) => cmd_screen(a, ctx),
        Command::Pipeline(a) => cmd_pipeline(a, ctx).map_err(Into::into),
    }
}

#[derive(Serialize)]
struct FieldRow {
    d: u32,
    disc: i64,
    omega: &'static str,
    unit_count: usize,
    three_is_inert: bool,
}

fn cmd_fields(ctx: &mut Ctx) -> Result<i32, String> {
    let rows: Vec<FieldRow> = QuadraticField::all()
        .into_iter()
        .map(|k| FieldRow {
            d: k.d(),
            disc: k.disc(),
            omega: match k.convention() {
                crate::ring::OmegaConvention::Gaussian => "i",
                crate::ring::OmegaConvention::HalfTrace => "(1+sqrt(-d))/2",
            },
            unit_count: k.unit_count(),
            three_is_inert: k.lambda().split_type == crate::ring::SplitType::Inert,
        })
        .collect();
    if ctx.json {
        ctx.emit_json(&rows)?;
    } else {
        out!(ctx, "{:>4} {:>6} {:<16} {:>6} {}", "d", "disc", "omega", "units", "3 inert");
        for r in &rows {
            out!(ctx, "{:>4} {:>6} {:<16} {:>6} {}", r.d, r.disc, r.omega, r.unit_count, r.three_is_inert);
        }
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
#[serde(untagged)]
enum Attempt<T> {
    Ok(T),
    Err { error: String },
}

impl<T, E: ToString> From<Result<T, E>> for Attempt<T> {
    fn from(r: Result<T, E>) -> Self {
        match r {
            Ok(v) => Attempt::Ok(v),
            Err(e) => Attempt::Err { error: e.to_string() },
        }
    }
}

#[derive(Serialize)]
struct FreyReport {
    field: u32,
    p: u64,
    invariants: FreyInvariants,
    lambda: Attempt<LocalClassification>,
    j_valuation_at_lambda: Attempt<JValuation>,
    j_valuation_from_model: Option<i64>,
    cubic_solvable: Attempt<bool>,
    norm_bound: u64,
    primes_dividing_delta: Vec<Attempt<LocalClassification>>,
}

fn cmd_frey(a: &FreyArgs, ctx: &mut Ctx) -> Result<i32, String> {
    let k = field(a.field);
    let parse = |s: &str| k.parse_element(s).map_err(|e| format!("{s:?}: {e}"));
    let (ea, eb, ec) = (parse(&a.a)?, parse(&a.b)?, parse(&a.c)?);
    let inv = frey_invariants(&ea, &eb, &ec, a.p).map_err(|e| e.to_string())?;
    if inv.degenerate {
        return Err("the curve is singular (discriminant 0)".into());
    }
    let local = primes_up_to_norm(k, a.norm_bound)
        .into_iter()
        .filter(|q| q.residue_char != 3)
        .filter(|q| valuation_at(&inv.delta, q) != Valuation::Finite(0))
        .map(|q| classify_away_from_lambda(&inv, &q).into())
        .collect();
    let report = FreyReport {
        field: a.field,
        p: a.p,
        lambda: lambda_exponent(&ea, &eb, &ec, a.p).into(),
        j_valuation_at_lambda: j_valuation_at_lambda(&eb, a.p).into(),
        j_valuation_from_model: j_valuation_from_model(&inv),
        cubic_solvable: cubic_test(&eb, &ec, a.p).into(),
        norm_bound: a.norm_bound,
        primes_dividing_delta: local,
        invariants: inv,
    };
    if ctx.json {
        ctx.emit_json(&report)?;
        return Ok(EXIT_OK);
    }
    let inv = &report.invariants;
    out!(ctx, "field Q(sqrt(-{})), p = {}", a.field, a.p);
    out!(ctx, "relation a^p + b^p = c^3 holds: {}", inv.relation_holds);
    for (name, v) in [("a1", &inv.a1), ("a3", &inv.a3), ("c4", &inv.c4), ("c6", &inv.c6), ("Delta", &inv.delta)] {
        out!(ctx, "{name:>6} = {}", v.coords());
    }
    match &report.lambda {
        Attempt::Ok(l) => out!(
            ctx,
            "lambda: {:?} reduction, conductor exponent {}",
            l.reduction,
            serde_json::to_string(&l.conductor_exponent).unwrap_or_default()
        ),
        Attempt::Err { error } => out!(ctx, "lambda: {error}"),
    }
    if let Attempt::Ok(j) = &report.j_valuation_at_lambda {
        out!(ctx, "v_lambda(j) = {} (pot. mult.: {})", j.v, j.pot_mult);
    }
    if let Some(v) = report.j_valuation_from_model {
        out!(ctx, "v_lambda(j) from the model = {v}");
    }
    for row in &report.primes_dividing_delta {
        match row {
            Attempt::Ok(l) => out!(
                ctx,
                "q = {} (norm {}): {:?}, v(Delta) = {}",
                l.prime.generator.coords(),
                l.prime.norm,
                l.reduction,
                l.disc_valuation.unwrap_or(0)
            ),
            Attempt::Err { error } => out!(ctx, "{error}"),
        }
    }
    Ok(EXIT_OK)
}

fn cmd_bounds(cmd: &BoundsCmd, ctx: &mut Ctx) -> Result<i32, String> {
    match cmd {
        BoundsCmd::Ck { case } => {
            let table = compute_ck(*case).map_err(|e| e.to_string())?;
            if ctx.json {
                ctx.emit_json(&table)?;
            } else {
                print_ck(ctx, &table)?;
            }
        }
        BoundsCmd::Rcg { field: d, m } => {
            let g = ray_class_group(field(*d), *m).map_err(|e| e.to_string())?;
            if ctx.json {
                ctx.emit_json(&g)?;
            } else {
                print_rcg(ctx, &g)?;
            }
        }
        BoundsCmd::Aq { field: d, norm } => {
            let k = field(*d);
            let found = primes_up_to_norm(k, *norm).into_iter().find(|q| q.norm == *norm);
            let q = found.ok_or_else(|| format!("no prime of Q(sqrt(-{d})) has norm {norm}"))?;
            if q.is_lambda() {
                return Err("A(q) is not defined at lambda".into());
            }
            let set = set_aq_for_norm(*norm);
            if ctx.json {
                #[derive(Serialize)]
                struct Aq {
                    field: u32,
                    norm: u64,
                    a_q: Vec<i64>,
                }
                ctx.emit_json(&Aq { field: *d, norm: *norm, a_q: set })?;
            } else {
                let s: Vec<String> = set.iter().map(i64::to_string).collect();
                out!(ctx, "A(q) for Norm(q) = {norm}: {{{}}}", s.join(", "));
            }
        }
        BoundsCmd::Bk { field: d, mk, cubic_solvable, cubic_reading } => {
            let r = assemble_bk_with(field(*d), *mk, *cubic_solvable, *cubic_reading);
            if ctx.json {
                ctx.emit_json(&r)?;
            } else {
                print_bk(ctx, &r)?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn print_ck(ctx: &mut Ctx, t: &CkTable) -> Result<(), String> {
    out!(ctx, "{:>6}  {:<22} {:>16}  factorization", "trace", "P(x)", "resultant");
    for row in &t.rows {
        let f: Vec<String> = row
            .factorization
            .iter()
            .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        out!(ctx, "{:>6}  {:<22} {:>16}  {}", row.trace, row.poly.to_string(), row.resultant, f.join(" * "));
    }
    out!(ctx, "C_K = {}", t.c_k);
    Ok(())
}

fn print_rcg(ctx: &mut Ctx, g: &RayClassGroup) -> Result<(), String> {
    let inv: Vec<String> = g.abelian_invariants.iter().map(u64::to_string).collect();
    out!(
        ctx,
        "Cl_(lambda^{})(Q(sqrt(-{}))): order {}, invariants [{}]",
        g.modulus_exponent,
        g.field.d(),
        g.order,
        inv.join(", ")
    );
    Ok(())
}

fn print_bk(ctx: &mut Ctx, r: &BoundsReport) -> Result<(), String> {
    out!(ctx, "ell_K = {}", r.ell_k);
    out!(ctx, "C_K = {}", r.c_k);
    if let Some(m) = r.m_k {
        out!(ctx, "M_K = {m}");
    }
    out!(ctx, "B_K (case i) = {}", r.b_k_case_i);
    match r.b_k_case_ii {
        Some(b) => out!(ctx, "B_K (case ii) = {b}"),
        None => out!(ctx, "B_K (case ii) = max(B_K (case i), M_K); supply --mk"),
    }
    Ok(())
}

#[derive(Serialize)]
struct EliminateOutput {
    field: u32,
    b_k: u64,
    norm_bound: u64,
    primes: Vec<String>,
    reports: Vec<EliminationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expectations: Option<Vec<SectionCheck>>,
    warnings: Vec<String>,
}

struct EliminateRequest<'a> {
    field: u32,
    forms: &'a Path,
    norm_bound: u64,
    b_k: u64,
    no_cache: bool,
    expectations: Option<Option<&'a Path>>,
}

fn run_elimination(req: &EliminateRequest, ctx: &mut Ctx) -> Result<EliminateOutput, String> {
    let bytes = ctx.read(req.forms)?;
    let text = String::from_utf8(bytes).map_err(|_| format!("{}: not UTF-8", req.forms.display()))?;
    let parsed = parse_forms(&text).map_err(|e| format!("{}: {e}", req.forms.display()))?;
    let k = field(req.field);
    let mut warnings = parsed.warnings.clone();
    let other: Vec<u32> = parsed.sections.iter().map(|s| s.0).filter(|d| *d != req.field).collect();
    if !other.is_empty() {
        warnings.push(format!("ignoring sections for other fields: {other:?}"));
    }
    let records: Vec<_> = parsed.records.into_iter().filter(|r| r.field == k).collect();
    let primes = elimination_primes(k, req.norm_bound);
    if primes.is_empty() {
        return Err(format!("no primes of norm below {}", req.norm_bound));
    }
    let key = CacheKey::new(text.as_bytes(), req.field, req.b_k, req.norm_bound);
    let cache = VerdictCache::for_forms_file(req.forms);
    let cached = if req.no_cache { None } else { cache.get(&key) };
    let reports = match cached {
        Some(r) => {
            let _ = writeln!(ctx.err, "cache hit: {}", cache.dir().display());
            r
        }
        None => {
            let r = verdicts(&records, req.b_k, &primes).map_err(|e| e.to_string())?;
            if !req.no_cache {
                if let Err(e) = cache.put(&key, &r) {
                    let _ = writeln!(ctx.err, "warning: cache not written: {e}");
                }
            }
            r
        }
    };
    let expectations = match req.expectations {
        None => None,
        Some(path) => {
            let table_text = match path {
                Some(p) => ctx.read_text(p)?,
                None => expect::BUNDLED.to_string(),
            };
            let table = expect::parse_expectations(&table_text).map_err(|e| e.to_string())?;
            let sections = parsed.sections.iter().copied().filter(|s| s.0 == req.field);
            Some(expect::check(&table, sections, &reports))
        }
    };
    Ok(EliminateOutput {
        field: req.field,
        b_k: req.b_k,
        norm_bound: req.norm_bound,
        primes: primes.iter().map(|q| q.generator.coords()).collect(),
        reports,
        expectations,
        warnings,
    })
}

fn elimination_exit(o: &EliminateOutput) -> i32 {
    let unmet = o
        .expectations
        .iter()
        .flatten()
        .any(|c| matches!(c.outcome, Outcome::Unmet { .. }));
    if unmet {
        EXIT_DATA
    } else if o.reports.iter().any(|r| r.verdict.has_survivors()) {
        EXIT_SURVIVORS
    } else {
        EXIT_OK
    }
}

fn print_elimination(ctx: &mut Ctx, o: &EliminateOutput) -> Result<(), String> {
    out!(ctx, "field Q(sqrt(-{})), B_K = {}, primes of norm < {}: {}", o.field, o.b_k, o.norm_bound, o.primes.len());
    for w in &o.warnings {
        out!(ctx, "warning: {w}");
    }
    for r in &o.reports {
        let divs: Vec<String> = r.prime_divisors.iter().map(ToString::to_string).collect();
        let verdict = match &r.verdict {
            Verdict::EliminatedBelow { bound } => format!("eliminated (all prime divisors <= {bound})"),
            Verdict::CmCandidate { rationale } => format!("CM candidate; {rationale}"),
            Verdict::Survivors { primes } => {
                let s: Vec<String> = primes.iter().map(ToString::to_string).collect();
                format!("SURVIVORS {}", s.join(", "))
            }
        };
        out!(
            ctx,
            "{} (level lambda^{}): C_f = {} [{}] -> {}",
            r.form_id,
            r.level_exponent,
            r.c_f,
            divs.join(", "),
            verdict
        );
    }
    for c in o.expectations.iter().flatten() {
        let status = match &c.outcome {
            Outcome::Met => "met".to_string(),
            Outcome::Unmet { detail } => format!("UNMET: {detail}"),
            Outcome::Unlisted => "no expectation listed".to_string(),
        };
        out!(ctx, "expectation d={} level lambda^{}: {status}", c.d, c.level_exponent);
    }
    Ok(())
}

fn resolve_bk(a: &EliminateArgs) -> u64 {
    match a.bk {
        Some(b) => b,
        None => {
            let r = assemble_bk_with(field(a.field), a.mk, a.cubic_solvable.unwrap_or(false), a.cubic_reading);
            r.b_k_case_ii.unwrap_or(r.b_k_case_i)
        }
    }
}

fn cmd_eliminate(a: &EliminateArgs, ctx: &mut Ctx) -> Result<i32, String> {
    let expectations = if a.check_expectations || a.expectations.is_some() {
        Some(a.expectations.as_deref())
    } else {
        None
    };
    let req = EliminateRequest {
        field: a.field,
        forms: &a.forms,
        norm_bound: a.norm_bound,
        b_k: resolve_bk(a),
        no_cache: a.no_cache,
        expectations,
    };
    let o = run_elimination(&req, ctx)?;
    if ctx.json {
        ctx.emit_json(&o)?;
    } else {
        print_elimination(ctx, &o)?;
    }
    Ok(elimination_exit(&o))
}

fn tri(t: Tri) -> &'static str {
    match t {
        Tri::Yes => "yes",
        Tri::No => "no",
        Tri::Unknown => "unknown",
    }
}

fn cmd_screen(a: &ScreenArgs, ctx: &mut Ctx) -> Result<i32, Failure> {
    if let Some(ScreenSub::Tower { n }) = &a.sub {
        let f = tower_poly(*n).map_err(|e| e.to_string())?;
        if ctx.json {
            #[derive(Serialize)]
            struct Tower {
                n: u32,
                degree: usize,
                poly: String,
                eisenstein_at_2: bool,
            }
            let t = Tower { n: *n, degree: f.degree().unwrap_or(0), poly: f.to_string(), eisenstein_at_2: f.is_eisenstein(2) };
            ctx.emit_json(&t)?;
        } else {
            out!(ctx, "f_{n} = {f}");
        }
        return Ok(EXIT_OK);
    }
    let Some(input) = &a.input else {
        return Err(Failure::Usage("screen needs --input FILE or the `tower` subcommand".into()));
    };
    let text = ctx.read_text(input)?;
    let parsed = parse_field_records(&text).map_err(|e| format!("{}: {e}", input.display()))?;
    for w in &parsed.warnings {
        let _ = writeln!(ctx.err, "warning: skipped {w}");
    }
    let budget = a.budget as usize;
    match a.signature {
        Signature::Pp3 => {
            let s = screen_pp3(&parsed, budget).map_err(|e| e.to_string())?;
            if ctx.json {
                ctx.emit_json(&s)?;
            } else if a.csv {
                print_csv(ctx, &s.verdicts)?;
            } else {
                print_verdicts(ctx, &s.verdicts, Signature::Pp3)?;
                out!(ctx, "\n{:>6} {:>8} {:>8} {:>8} {:>10}", "n", "records", "F_n", "K_n", "undecided");
                for (n, r) in &s.summary {
                    out!(ctx, "{n:>6} {:>8} {:>8} {:>8} {:>10}", r.total, r.f_n, r.k_n, r.undecided);
                }
                out!(ctx, "skipped records: {}", s.skipped);
            }
        }
        Signature::Pp2 => {
            let s = screen_pp2(&parsed, budget).map_err(|e| e.to_string())?;
            if ctx.json {
                ctx.emit_json(&s)?;
            } else if a.csv {
                print_csv(ctx, &s.verdicts)?;
            } else {
                print_verdicts(ctx, &s.verdicts, Signature::Pp2)?;
                out!(ctx, "\n{:>6} {:>8} {:>8} {:>8} {:>8} {:>10}", "n", "records", "F_n", "G_n", "K_n", "undecided");
                for (n, r) in &s.summary {
                    out!(ctx, "{n:>6} {:>8} {:>8} {:>8} {:>8} {:>10}", r.total, r.f_n, r.g_n, r.k_n, r.undecided);
                }
                out!(ctx, "skipped records: {}", s.skipped);
            }
        }
    }
    Ok(EXIT_OK)
}

fn zeta3_text(v: &ScreeningVerdict) -> String {
    use crate::screen::{NoWitness, Zeta3};
    match &v.zeta3 {
        Zeta3::YesProbable { primes_tested } => format!("yes?({})", primes_tested.len()),
        Zeta3::NoCertified { witness: NoWitness::OddDegree } => "no(odd degree)".into(),
        Zeta3::NoCertified { witness: NoWitness::Prime(p) } => format!("no(p={p})"),
        Zeta3::Unknown => "unknown".into(),
    }
}

fn above3_text(v: &ScreeningVerdict) -> String {
    match v.primes_above_3 {
        crate::screen::PrimeCount::Known(n) => n.to_string(),
        crate::screen::PrimeCount::Unknown { at_least } => format!(">={at_least}?"),
    }
}

fn print_verdicts(ctx: &mut Ctx, vs: &[ScreeningVerdict], sig: Signature) -> Result<(), String> {
    match sig {
        Signature::Pp3 => {
            out!(ctx, "{:<16} {:>3} {:<16} {:>8} {:>6} {:>8}", "label", "n", "zeta3", "above 3", "h+=1", "passes");
            for v in vs {
                out!(
                    ctx,
                    "{:<16} {:>3} {:<16} {:>8} {:>6} {:>8}",
                    v.label,
                    v.degree,
                    zeta3_text(v),
                    above3_text(v),
                    tri(v.h_plus_one),
                    tri(v.passes_pp3)
                );
            }
        }
        Signature::Pp2 => {
            out!(ctx, "{:<16} {:>3} {:>10} {:>6} {:>8}", "label", "n", "2 tot.ram", "h+=1", "passes");
            for v in vs {
                out!(
                    ctx,
                    "{:<16} {:>3} {:>10} {:>6} {:>8}",
                    v.label,
                    v.degree,
                    tri(v.ramified2),
                    tri(v.h_plus_one),
                    tri(v.passes_pp2)
                );
            }
        }
    }
    Ok(())
}

fn print_csv(ctx: &mut Ctx, vs: &[ScreeningVerdict]) -> Result<(), String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let row_err = |e: csv::Error| e.to_string();
    w.write_record(["label", "degree", "zeta3", "primes_above_3", "h_plus_one", "passes_pp3", "ramified2", "passes_pp2"])
        .map_err(row_err)?;
    for v in vs {
        w.write_record([
            v.label.clone(),
            v.degree.to_string(),
            zeta3_text(v),
            above3_text(v),
            tri(v.h_plus_one).into(),
            tri(v.passes_pp3).into(),
            tri(v.ramified2).into(),
            tri(v.passes_pp2).into(),
        ])
        .map_err(row_err)?;
    }
    let bytes = w.into_inner().map_err(|e| e.to_string())?;
    ctx.out.write_all(&bytes).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct PipelineReport {
    field: u32,
    cubic_solvable: bool,
    cubic_reading: CubicReading,
    ck: CkTable,
    ray_class_groups: Vec<RayClassGroup>,
    bk: BoundsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    elimination: Option<EliminateOutput>,
}

fn cmd_pipeline(a: &PipelineArgs, ctx: &mut Ctx) -> Result<i32, String> {
    let k = field(a.field);
    let case = CkCase::from_cubic(a.cubic_solvable, a.cubic_reading);
    let ck = compute_ck(case).map_err(|e| e.to_string())?;
    let groups = (0..=1)
        .map(|m| ray_class_group(k, m).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let bk = assemble_bk_with(k, a.mk, a.cubic_solvable, a.cubic_reading);
    let b_k = bk.b_k_case_ii.unwrap_or(bk.b_k_case_i);
    let elimination = match &a.forms {
        Some(forms) => Some(run_elimination(
            &EliminateRequest {
                field: a.field,
                forms,
                norm_bound: a.norm_bound,
                b_k,
                no_cache: a.no_cache,
                expectations: None,
            },
            ctx,
        )?),
        None => None,
    };
    let code = elimination.as_ref().map_or(EXIT_OK, elimination_exit);
    let report = PipelineReport {
        field: a.field,
        cubic_solvable: a.cubic_solvable,
        cubic_reading: a.cubic_reading,
        ck,
        ray_class_groups: groups,
        bk,
        elimination,
    };
    if ctx.json {
        ctx.emit_json(&report)?;
    } else {
        out!(ctx, "== irreducibility constant ({:?})", case);
        print_ck(ctx, &report.ck)?;
        out!(ctx, "== ray class groups");
        for g in &report.ray_class_groups {
            print_rcg(ctx, g)?;
        }
        out!(ctx, "== bound");
        print_bk(ctx, &report.bk)?;
        if let Some(o) = &report.elimination {
            out!(ctx, "== elimination");
            print_elimination(ctx, o)?;
        }
    }
    Ok(code)
}
