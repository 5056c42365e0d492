//! `demazure`: classify Cartan matrices, check lattices, and verify the
//! relations of formal affine Demazure algebras from the command line.
//!
//! Exit status: 0 when every check holds, 1 when a check fails, 2 on invalid
//! input.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use demazure::roots::LatticeJson;
use demazure::series::SeriesJson;
use demazure::{
    custom_fgl, law_from_logarithm, make_fgl, Bindings, CartanType, CoxeterOrder, FglKind, FormalGroupLaw, Gcm,
    HeckeMaps, Lattice, Monomial, PowerSeries, Q, Scalar, TwistedContext,
};

#[derive(Parser, Debug)]
#[command(name = "demazure", version, about = "Formal affine Demazure algebras over root data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Type of each indecomposable block of a generalized Cartan matrix.
    Classify {
        /// JSON file holding the matrix
        #[arg(long)]
        gcm: PathBuf,
    },
    /// Lattice axioms and comparisons.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Identity checks.
    Verify {
        #[arg(value_enum)]
        target: Target,
        #[command(flatten)]
        opts: VerifyOpts,
    },
}

#[derive(Subcommand, Debug)]
enum LatticeCmd {
    /// Checks that every simple root is primitive and every coroot pairs
    /// integrally.
    Check {
        /// JSON lattice file
        #[arg(long)]
        lattice: PathBuf,
        /// Cartan matrix, if the lattice file does not carry one
        #[arg(long)]
        gcm: Option<PathBuf>,
    },
    /// Containment of lattice `a` in lattice `b`, and their quotients by the
    /// root lattice.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Cartan matrix, if the lattice files do not carry one
        #[arg(long)]
        gcm: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    Fgl,
    Relations,
    HeckeIso,
    AffineHecke,
}

#[derive(Args, Debug)]
struct VerifyOpts {
    /// Cartan matrix; the root lattice is used unless --lattice is given
    #[arg(long)]
    gcm: Option<PathBuf>,
    /// JSON lattice file
    #[arg(long)]
    lattice: Option<PathBuf>,
    /// additive, multiplicative, hyperbolic or custom:FILE
    #[arg(long, default_value = "hyperbolic")]
    fgl: String,
    /// Truncation degree of the power series
    #[arg(long, env = "DEMAZURE_ORDER", default_value_t = 8)]
    order: u32,
    /// Longest Weyl word used by the independence and hecke-iso checks
    #[arg(long, default_value_t = 6)]
    length: usize,
    /// PARAM=EXPR, e.g. mu2=0 or mu1=t+t^-1
    #[arg(long = "bind")]
    bind: Vec<String>,
}

/// Bad input; reported with exit status 2.
#[derive(Debug)]
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> InputError {
        InputError(e.to_string())
    }
}

type Res<T> = Result<T, InputError>;

fn input<T>(msg: impl Into<String>) -> Res<T> {
    Err(InputError(msg.into()))
}

/// A report in the shape shared by every command.
struct Report {
    check: String,
    holds: bool,
    certified_order: Option<i64>,
    details: Value,
}

impl Report {
    fn to_json(&self) -> Value {
        json!({
            "check": self.check,
            "holds": self.holds,
            "certified_order": self.certified_order,
            "details": self.details,
        })
    }
}

fn min_opt(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Sub-reports folded into one.
fn aggregate(check: &str, parts: Vec<Report>) -> Report {
    let holds = parts.iter().all(|r| r.holds);
    let certified_order = parts.iter().fold(None, |acc, r| min_opt(acc, r.certified_order));
    let checks: Vec<Value> = parts.iter().map(Report::to_json).collect();
    Report { check: check.into(), holds, certified_order, details: json!({ "checks": checks }) }
}

// --- input files -----------------------------------------------------------

#[derive(Deserialize)]
#[serde(untagged)]
enum GcmFile {
    Wrapped { matrix: Vec<Vec<i64>> },
    Bare(Vec<Vec<i64>>),
}

#[derive(Deserialize)]
struct LatticeFile {
    #[serde(default)]
    gcm: Option<Vec<Vec<i64>>>,
    #[serde(flatten)]
    lattice: LatticeJson,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CustomLawFile {
    /// Coefficients of `x, x^2, ...` in the logarithm, as rationals.
    Logarithm { logarithm: Vec<String>, order: u32 },
    Series { series: SeriesJson },
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Res<T> {
    serde_json::from_str(&read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_gcm(path: &Path) -> Res<Gcm> {
    let m = match read_json::<GcmFile>(path)? {
        GcmFile::Wrapped { matrix } | GcmFile::Bare(matrix) => matrix,
    };
    Ok(Gcm::new(m)?)
}

fn load_lattice(path: &Path, gcm: Option<&Gcm>) -> Res<Lattice> {
    let file: LatticeFile = read_json(path)?;
    let gcm = match (file.gcm, gcm) {
        (Some(m), _) => Gcm::new(m)?,
        (None, Some(g)) => g.clone(),
        (None, None) => return input(format!("{}: no Cartan matrix (add \"gcm\" or pass --gcm)", path.display())),
    };
    Ok(Lattice::from_json(&gcm, &file.lattice)?)
}

fn bindings(raw: &[String]) -> Res<Bindings> {
    let mut b = Bindings::new();
    for s in raw {
        let (p, v) = Bindings::parse_assignment(s)?;
        b.insert(p, v);
    }
    b.check()?;
    Ok(b)
}

fn load_law(spec: &str, binds: &Bindings, order: u32) -> Res<FormalGroupLaw> {
    if let Some(path) = spec.strip_prefix("custom:") {
        let law = match read_json::<CustomLawFile>(Path::new(path))? {
            CustomLawFile::Logarithm { logarithm, order } => {
                let mut terms = Vec::new();
                for (k, c) in logarithm.iter().enumerate() {
                    terms.push((Monomial::new(&[k as u32 + 1]), Scalar::from_q(c.parse::<Q>()?)));
                }
                law_from_logarithm(&PowerSeries::from_terms(1, order, terms))?
            }
            CustomLawFile::Series { series } => custom_fgl(PowerSeries::from_json(&series)?)?,
        };
        return Ok(if binds.is_empty() { law } else { law.specialize(binds)? });
    }
    let kind: FglKind = spec.parse()?;
    Ok(make_fgl(kind, binds, order)?)
}

// --- commands --------------------------------------------------------------

fn classify(path: &Path) -> Res<Report> {
    let gcm = load_gcm(path)?;
    let mut blocks = Vec::new();
    for comp in gcm.components() {
        let sub: Vec<Vec<i64>> = comp.iter().map(|&i| comp.iter().map(|&j| gcm.entry(i, j)).collect()).collect();
        let ty = Gcm::new(sub)?.classify()?;
        let mut block = json!({ "indices": comp, "type": ty.tag() });
        if let CartanType::Affine { labels } = &ty {
            let mut delta = vec![0; gcm.rank()];
            for (k, &i) in comp.iter().enumerate() {
                delta[i] = labels[k];
            }
            block["labels"] = json!(labels);
            block["delta"] = json!(delta);
        }
        blocks.push(block);
    }
    let mut details = json!({ "blocks": blocks });
    if blocks.len() == 1 {
        let b = &blocks[0];
        details["type"] = b["type"].clone();
        if let Some(d) = b.get("delta") {
            details["delta"] = d.clone();
            details["labels"] = b["labels"].clone();
        }
    }
    Ok(Report { check: "classify".into(), holds: true, certified_order: None, details })
}

fn lattice_check(path: &Path, gcm: Option<&Path>) -> Res<Report> {
    let gcm = gcm.map(load_gcm).transpose()?;
    let lat = load_lattice(path, gcm.as_ref())?;
    let fdl = lat.check_fdl();
    let details = json!({
        "fdl1": if fdl.fdl1.iter().all(|&b| b) { "pass" } else { "fail" },
        "fdl2": if fdl.fdl2.iter().flatten().all(|&b| b) { "pass" } else { "fail" },
        "fdl1_per_root": fdl.fdl1,
        "fdl2_per_pair": fdl.fdl2,
        "simple_roots": (0..lat.gcm().rank()).map(|j| lat.simple_root(j)).collect::<Vec<_>>(),
        "quotient_by_root_lattice": lat.quotient_by_root_lattice(),
    });
    Ok(Report { check: "lattice-check".into(), holds: fdl.passed(), certified_order: None, details })
}

fn lattice_compare(a: &Path, b: &Path, gcm: Option<&Path>) -> Res<Report> {
    let gcm = gcm.map(load_gcm).transpose()?;
    let la = load_lattice(a, gcm.as_ref())?;
    let lb = load_lattice(b, gcm.as_ref())?;
    let c = la.compare(&lb)?;
    let details = json!({
        "contains": c.first_in_second,
        "contained_in_reverse": c.second_in_first,
        "equal": c.first_in_second && c.second_in_first,
        "quotient_a": c.quotient_first,
        "quotient_b": c.quotient_second,
    });
    Ok(Report { check: "lattice-compare".into(), holds: c.first_in_second, certified_order: None, details })
}

/// Rank-2 systems of each finite Coxeter order, used when no matrix is given.
fn default_systems() -> Vec<Gcm> {
    [vec![vec![2, -1], vec![-1, 2]], vec![vec![2, -2], vec![-1, 2]], vec![vec![2, -1], vec![-3, 2]]]
        .into_iter()
        .map(|m| Gcm::new(m).expect("valid"))
        .collect()
}

fn max_finite_order(gcm: &Gcm) -> u32 {
    let n = gcm.rank();
    let mut m = 2;
    for i in 0..n {
        for j in i + 1..n {
            if let CoxeterOrder::Finite(k) = gcm.coxeter_order(i, j) {
                m = m.max(k);
            }
        }
    }
    m
}

fn lattices(opts: &VerifyOpts) -> Res<Vec<Lattice>> {
    let gcm = opts.gcm.as_deref().map(load_gcm).transpose()?;
    if let Some(path) = &opts.lattice {
        return Ok(vec![load_lattice(path, gcm.as_ref())?]);
    }
    Ok(match gcm {
        Some(g) => vec![Lattice::root_lattice(&g)],
        None => default_systems().iter().map(Lattice::root_lattice).collect(),
    })
}

fn twisted_context(law: &FormalGroupLaw, lat: &Lattice, order: u32) -> Res<TwistedContext> {
    let extra = TwistedContext::margin_for(max_finite_order(lat.gcm()));
    Ok(TwistedContext::new(law, lat, order, extra)?)
}

fn relation_report(r: demazure::RelationReport) -> Report {
    Report {
        check: format!("{} {},{}", r.relation, r.i, r.j),
        holds: r.holds,
        certified_order: r.certified_order,
        details: serde_json::to_value(&r).expect("serializable"),
    }
}

fn hecke_report(r: demazure::HeckeReport) -> Report {
    Report {
        check: r.check.clone(),
        holds: r.holds,
        certified_order: r.certified_order,
        details: serde_json::to_value(&r).expect("serializable"),
    }
}

fn system_name(lat: &Lattice) -> String {
    format!("{:?}", lat.gcm().matrix())
}

fn verify_fgl(opts: &VerifyOpts) -> Res<Report> {
    let binds = bindings(&opts.bind)?;
    let law = load_law(&opts.fgl, &binds, opts.order)?;
    let axioms = law.check_axioms();
    let mut parts = vec![Report {
        check: "axioms".into(),
        holds: axioms.passed(),
        certified_order: Some(axioms.checked_to as i64),
        details: json!({
            "law": law.kind().name(),
            "series": law.series().to_string(),
            "formal_inverse": law.formal_inverse().to_string(),
            "identity": axioms.identity,
            "commutative": axioms.commutative,
            "associative": axioms.associative,
        }),
    }];
    let residual = law.inverse_residual();
    parts.push(Report {
        check: "formal inverse".into(),
        holds: residual.is_zero_to_reliable(),
        certified_order: Some(residual.reliable() as i64),
        details: json!({ "residual": residual.to_string() }),
    });
    for lat in lattices(opts)? {
        let ctx = twisted_context(&law, &lat, opts.order)?;
        let mut r = relation_report(ctx.verify_kappas()?);
        r.check = format!("kappa {}", system_name(&lat));
        parts.push(r);
    }
    Ok(aggregate("fgl", parts))
}

fn verify_relations(opts: &VerifyOpts) -> Res<Report> {
    if opts.order < 4 {
        return input("relation checks need --order >= 4");
    }
    let binds = bindings(&opts.bind)?;
    let law = load_law(&opts.fgl, &binds, opts.order)?;
    let mut parts = Vec::new();
    for lat in lattices(opts)? {
        let ctx = twisted_context(&law, &lat, opts.order)?;
        let n = lat.gcm().rank();
        let infinite = (0..n).any(|i| (i + 1..n).any(|j| lat.gcm().coxeter_order(i, j) == CoxeterOrder::Infinite));
        // Long words pile up denominators; give the independence check its
        // own, deeper context.
        let deep = if infinite {
            Some(TwistedContext::new(&law, &lat, opts.order, 2 * opts.length as u32 + 4)?)
        } else {
            None
        };
        let mut jobs: Vec<Box<dyn Fn() -> Result<Report, InputError> + Send + Sync + '_>> = Vec::new();
        let ctx = &ctx;
        for i in 0..n {
            jobs.push(Box::new(move || Ok(relation_report(ctx.verify_quadratic(i)?))));
            jobs.push(Box::new(move || {
                Ok(relation_report(ctx.verify_relation(demazure::RelationKind::Commutation, i, i)?))
            }));
        }
        for i in 0..n {
            for j in i + 1..n {
                if let CoxeterOrder::Finite(_) = lat.gcm().coxeter_order(i, j) {
                    jobs.push(Box::new(move || Ok(relation_report(ctx.verify_braid(i, j)?))));
                }
            }
        }
        if let Some(deep) = &deep {
            let len = opts.length;
            jobs.push(Box::new(move || Ok(relation_report(deep.verify_independence(len)?))));
        }
        // Independent checks run concurrently; results keep job order.
        let results: Vec<Res<Report>> = std::thread::scope(|s| {
            let handles: Vec<_> = jobs.iter().map(|job| s.spawn(move || job())).collect();
            handles.into_iter().map(|h| h.join().expect("check panicked")).collect()
        });
        for r in results {
            let mut r = r?;
            r.check = format!("{} {}", r.check, system_name(&lat));
            parts.push(r);
        }
    }
    Ok(aggregate("relations", parts))
}

fn hecke_lattices(opts: &VerifyOpts) -> Res<Vec<Lattice>> {
    if opts.gcm.is_none() && opts.lattice.is_none() {
        return input("--gcm or --lattice is required");
    }
    lattices(opts)
}

fn specialized_law(opts: &VerifyOpts, base: Bindings) -> Res<FormalGroupLaw> {
    let kind: FglKind = opts.fgl.parse()?;
    if kind != FglKind::Hyperbolic {
        return input("the Hecke checks use the hyperbolic law");
    }
    let mut b = base;
    for (p, v) in bindings(&opts.bind)?.iter() {
        b.insert(*p, v.clone());
    }
    Ok(make_fgl(kind, &b, opts.order)?)
}

fn verify_hecke_iso(opts: &VerifyOpts) -> Res<Report> {
    let law = specialized_law(opts, Bindings::hecke())?;
    let mut parts = Vec::new();
    for lat in hecke_lattices(opts)? {
        // Words of length L carry up to L root factors in their denominators.
        let extra = TwistedContext::margin_for(max_finite_order(lat.gcm())).max(opts.length as u32 + 4);
        let ctx = TwistedContext::new(&law, &lat, opts.order, extra)?;
        let maps = HeckeMaps::new(&ctx);
        for mut r in [hecke_report(maps.verify_relation_images()?), hecke_report(maps.verify_iso(opts.length)?)] {
            r.check = format!("{} {}", r.check, system_name(&lat));
            parts.push(r);
        }
    }
    Ok(aggregate("hecke-iso", parts))
}

fn verify_affine_hecke(opts: &VerifyOpts) -> Res<Report> {
    let law = specialized_law(opts, Bindings::affine_hecke())?;
    let mut parts = Vec::new();
    for lat in hecke_lattices(opts)? {
        let ctx = twisted_context(&law, &lat, opts.order)?;
        let mut r = hecke_report(HeckeMaps::new(&ctx).verify_affine(3)?);
        r.check = format!("{} {}", r.check, system_name(&lat));
        parts.push(r);
    }
    Ok(aggregate("affine-hecke", parts))
}

fn run(cli: &Cli) -> Res<Report> {
    match &cli.command {
        Command::Classify { gcm } => classify(gcm),
        Command::Lattice(LatticeCmd::Check { lattice, gcm }) => lattice_check(lattice, gcm.as_deref()),
        Command::Lattice(LatticeCmd::Compare { a, b, gcm }) => lattice_compare(a, b, gcm.as_deref()),
        Command::Verify { target, opts } => {
            if opts.length < 1 {
                return input("--length must be at least 1");
            }
            match target {
                Target::Fgl => verify_fgl(opts),
                Target::Relations => verify_relations(opts),
                Target::HeckeIso => verify_hecke_iso(opts),
                Target::AffineHecke => verify_affine_hecke(opts),
            }
        }
    }
}

fn print_text(out: &mut impl Write, r: &Report) -> io::Result<()> {
    let verdict = if r.holds { "PASS" } else { "FAIL" };
    let cert = r.certified_order.map_or(String::new(), |c| format!(" (certified to degree {c})"));
    writeln!(out, "{}: {verdict}{cert}", r.check)?;
    match r.details.get("checks").and_then(Value::as_array) {
        Some(checks) => {
            for c in checks {
                let ok = c["holds"].as_bool().unwrap_or(false);
                let cert = c["certified_order"].as_i64().map_or(String::new(), |x| format!(" [{x}]"));
                writeln!(out, "  {} {}{cert}", if ok { "ok  " } else { "FAIL" }, c["check"].as_str().unwrap_or(""))?;
                if !ok {
                    if let Some(d) = c["details"].get("details").and_then(Value::as_object) {
                        for (k, v) in d.iter().filter(|(_, v)| v.as_bool() == Some(false)) {
                            writeln!(out, "       {k}: {v}")?;
                        }
                    }
                    if let Some(f) = c["details"].get("failures").and_then(Value::as_array) {
                        for x in f.iter().take(10) {
                            writeln!(out, "       {}", x.as_str().unwrap_or(""))?;
                        }
                    }
                }
            }
        }
        None => {
            if let Some(obj) = r.details.as_object() {
                for (k, v) in obj {
                    writeln!(out, "  {k}: {v}")?;
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let mut out = io::stdout().lock();
            // a closed pipe (e.g. `| head`) is not an error worth reporting
            let _ = match cli.format {
                Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report.to_json()).expect("json")),
                Format::Text => print_text(&mut out, &report),
            };
            ExitCode::from(if report.holds { 0 } else { 1 })
        }
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
