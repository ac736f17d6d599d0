//! `plumbtop` command-line front end.
//!
//! Every command prints its primary result on stdout. With `--out DIR` the
//! JSON and CSV forms and a `manifest.json` are also written to DIR.
//! Errors go to stderr as `{"error": {"kind", "message"}}`; exit code 2 marks
//! invalid input, 3 a numerical or verification failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use plumbtop::asymptotics::{
    borel_laplace_resum, borel_transform, contour_integral, perturbative_coeffs, ContourSpec, RANK_CAP,
};
use plumbtop::cgp::{cgp_invariant, Level};
use plumbtop::context::{delta_exponent, Context};
use plumbtop::model::{canon_spinc, lattice_model, load_graph, parse_rational, spinc_enumerate};
use plumbtop::precision::{root_of_unity, ComplexAP, MIN_PREC};
use plumbtop::qseries::zhat_qseries;
use plumbtop::radial::RadialSeries;
use plumbtop::reciprocity::{hand_examples, random_family, reciprocity_check};
use plumbtop::Rat;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

/// Sphere quadrature nodes for the Borel routes.
const BOREL_NODES: usize = 64;

#[derive(Parser, Debug)]
#[command(name = "plumbtop", version, about = "CGP invariants, GPPV q-series and radial limits of plumbed 3-manifolds")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Plumbing graph JSON file.
    #[arg(long, global = true)]
    graph: Option<PathBuf>,
    /// Level r (r >= 2, r mod 4 != 0).
    #[arg(long, global = true)]
    r: Option<i64>,
    #[arg(long = "precision-bits", env = "PLUMBTOP_PREC", global = true, default_value_t = 192)]
    precision_bits: u32,
    /// q-series truncation order E (rational, exponents <= E are kept).
    #[arg(long, global = true)]
    order: Option<String>,
    /// Tail tolerance for certified truncation.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    /// Contour shift for the steepest-descent integral (default: automatic).
    #[arg(long, global = true)]
    epsilon: Option<f64>,
    /// Directory for JSON/CSV results and the manifest.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Zhat(s; q) coefficients up to the order E.
    Zhat {
        /// Spin^c representative l in delta + 2Z^V, comma separated (default:
        /// the first class listed by `constants`).
        #[arg(long, allow_hyphen_values = true)]
        spinc: Option<String>,
    },
    /// CGP invariant Z_r(M, omega).
    Cgp,
    /// z_r(omega, s) for every Spin^c structure.
    Constants,
    /// Zhat_r(t e(ray)) on a grid against the limit Z_r.
    VerifyLimit {
        #[arg(long = "tau-grid", default_value = "0.2,0.1,0.05,0.025")]
        tau_grid: String,
        /// Ray direction as a fraction p/q, tau = t exp(2 pi i p/q).
        #[arg(long, default_value = "1/4")]
        ray: String,
    },
    /// Perturbative coefficients Zhat_l, l = 0..=L, in powers of 2 pi i tau.
    Expand {
        #[arg(short = 'L', long = "L", default_value_t = 4)]
        l: u32,
    },
    /// Borel transform B_r(z) on a grid of z > 0.
    Borel {
        #[arg(long = "z-grid")]
        z_grid: String,
    },
    /// Borel-Laplace resummation along arg z = theta.
    Resum {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        theta: f64,
        /// tau as "0.05i", "0.01+0.05i" or "t@p/q" (t exp(2 pi i p/q)).
        #[arg(long, allow_hyphen_values = true)]
        tau: String,
    },
    /// Built-in self-tests.
    Selftest {
        #[command(subcommand)]
        which: Selftest,
    },
}

#[derive(Subcommand, Debug)]
enum Selftest {
    /// Gaussian reciprocity on the hand cases and a seeded random family.
    Reciprocity {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
}

#[derive(Debug)]
enum CliError {
    Core(plumbtop::Error),
    Usage(String),
    Io(String),
    /// The computation ran but a checked property failed.
    Check(String),
}

impl From<plumbtop::Error> for CliError {
    fn from(e: plumbtop::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_validation() => 2,
            CliError::Core(_) | CliError::Check(_) => 3,
            CliError::Usage(_) | CliError::Io(_) => 2,
        }
    }

    fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Core(e) => (e.kind().to_string(), e.to_string()),
            CliError::Usage(m) => ("usage".into(), m.clone()),
            CliError::Io(m) => ("io".into(), m.clone()),
            CliError::Check(m) => ("check_failed".into(), m.clone()),
        };
        json!({ "error": { "kind": kind, "message": message } })
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Everything a command produces.
struct Report {
    name: &'static str,
    stdout: String,
    json: Value,
    csv: Option<String>,
    /// Command-specific manifest entries (truncation, quadrature sizes).
    details: Map<String, Value>,
    /// Set when the output is complete but a checked property failed.
    check: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{}", CliError::Usage(e.render().to_string().trim_end().to_string()).to_json());
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let g = &cli.global;
    if g.precision_bits < MIN_PREC {
        return Err(CliError::Usage(format!("--precision-bits must be at least {MIN_PREC}")));
    }
    if !(g.tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    if let Some(j) = g.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let report = match &cli.command {
        Command::Zhat { spinc } => cmd_zhat(g, spinc.as_deref())?,
        Command::Cgp => cmd_cgp(g)?,
        Command::Constants => cmd_constants(g)?,
        Command::VerifyLimit { tau_grid, ray } => cmd_verify_limit(g, tau_grid, ray)?,
        Command::Expand { l } => cmd_expand(g, *l)?,
        Command::Borel { z_grid } => cmd_borel(g, z_grid)?,
        Command::Resum { theta, tau } => cmd_resum(g, *theta, tau)?,
        Command::Selftest { which: Selftest::Reciprocity { seed, count } } => cmd_reciprocity(g, *seed, *count)?,
    };
    print!("{}", report.stdout);
    if let Some(dir) = &g.out {
        write_outputs(dir, g, &report)?;
    }
    match report.check {
        Some(m) => Err(CliError::Check(m)),
        None => Ok(()),
    }
}

fn graph_path(g: &Global) -> CliResult<&Path> {
    g.graph.as_deref().ok_or_else(|| CliError::Usage("--graph is required".into()))
}

fn level(g: &Global) -> CliResult<i64> {
    g.r.ok_or_else(|| CliError::Usage("--r is required".into()))
}

fn context(g: &Global) -> CliResult<Context> {
    Ok(Context::from_file(graph_path(g)?, level(g)?, g.precision_bits)?)
}

fn digits(prec: u32) -> usize {
    (prec as f64 * std::f64::consts::LOG10_2).floor() as usize
}

fn decimal(z: &ComplexAP, prec: u32) -> (String, String) {
    z.to_decimal(digits(prec))
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialise");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn parse_list(s: &str, flag: &str) -> CliResult<Vec<String>> {
    let items: Vec<String> = s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect();
    if items.is_empty() {
        return Err(CliError::Usage(format!("{flag} is empty")));
    }
    Ok(items)
}

fn parse_f64(s: &str, flag: &str) -> CliResult<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| CliError::Usage(format!("{flag}: not a number: {s:?}")))
}

/// e(p/q) for a fraction string.
fn direction(frac: &str, prec: u32) -> CliResult<ComplexAP> {
    let q = parse_rational(frac)?;
    Ok(root_of_unity(*q.numer(), *q.denom(), prec))
}

/// Accepts "0.05i", "0.01+0.05i" and "t@p/q"; tau must lie in the upper half-plane.
fn parse_tau(s: &str, prec: u32) -> CliResult<ComplexAP> {
    let s = s.trim();
    let tau = if let Some((t, ray)) = s.split_once('@') {
        &ComplexAP::parse(t, "0", prec)? * &direction(ray, prec)?
    } else if let Some(body) = s.strip_suffix('i') {
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(i, c)| (c == '+' || c == '-') && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
            .map(|(i, _)| i)
            .last();
        let (re, im) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            x => x.trim_start_matches('+'),
        };
        ComplexAP::parse(re, im, prec)?
    } else {
        ComplexAP::parse(s, "0", prec)?
    };
    if !(tau.im.is_sign_positive() && !tau.im.is_zero()) {
        return Err(plumbtop::Error::Precondition(format!("tau = {s} is not in the upper half-plane")).into());
    }
    Ok(tau)
}

fn cmd_zhat(g: &Global, spinc: Option<&str>) -> CliResult<Report> {
    let (graph, _) = load_graph(graph_path(g)?)?;
    let lat = lattice_model(&graph)?;
    let delta_v = graph.degrees();
    let spinc = match spinc {
        None => spinc_enumerate(&lat, &delta_v).swap_remove(0),
        Some(text) => {
            let ell = text
                .split(',')
                .map(|x| x.trim().parse::<i64>().map_err(|_| CliError::Usage(format!("--spinc: bad entry {x:?}"))))
                .collect::<CliResult<Vec<_>>>()?;
            if ell.len() != graph.len() {
                return Err(CliError::Usage(format!("--spinc needs {} entries", graph.len())));
            }
            canon_spinc(&lat, &delta_v, &ell)?
        }
    };
    let spinc = &spinc;
    let delta = delta_exponent(&lat);
    let order = match &g.order {
        Some(e) => parse_rational(e)?,
        None => delta + Rat::from_integer(10),
    };
    let z = zhat_qseries(&graph, &lat, spinc, &order)?;
    let mut map = Map::new();
    let mut rows = Vec::new();
    for (e, c) in &z.terms {
        map.insert(e.to_string(), Value::String(c.to_string()));
        rows.push(vec![e.to_string(), c.to_string()]);
    }
    let json = Value::Object(map);
    let mut details = Map::new();
    details.insert("spinc".into(), json!(spinc.rep));
    details.insert("delta".into(), json!(delta.to_string()));
    details.insert("order".into(), json!(order.to_string()));
    details.insert("radius".into(), json!((Rat::from_integer(4) * (order - delta)).to_string()));
    Ok(Report {
        name: "zhat",
        stdout: pretty(&json),
        csv: Some(csv_text(&["exponent", "coefficient"], &rows)?),
        json,
        details,
        check: None,
    })
}

fn cmd_cgp(g: &Global) -> CliResult<Report> {
    let (graph, omega) = load_graph(graph_path(g)?)?;
    let lvl = Level::new(level(g)?, g.precision_bits)?;
    let z = cgp_invariant(&graph, &omega, &lvl)?;
    let (re, im) = decimal(&z, g.precision_bits);
    let json = json!({ "re": re, "im": im, "precision_bits": g.precision_bits });
    Ok(Report {
        name: "cgp",
        stdout: pretty(&json),
        csv: Some(csv_text(&["re", "im", "precision_bits"], &[vec![re, im, g.precision_bits.to_string()]])?),
        json,
        details: Map::new(),
        check: None,
    })
}

fn spinc_label(rep: &[i64]) -> String {
    rep.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn cmd_constants(g: &Global) -> CliResult<Report> {
    let ctx = context(g)?;
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for (i, (s, z)) in ctx.zr.entries.iter().enumerate() {
        let (re, im) = decimal(z, g.precision_bits);
        items.push(json!({ "index": i, "spinc": s.rep, "re": re, "im": im }));
        rows.push(vec![i.to_string(), spinc_label(&s.rep), re, im]);
    }
    let csv = csv_text(&["index", "spinc", "re", "im"], &rows)?;
    Ok(Report {
        name: "constants",
        stdout: csv.clone(),
        json: Value::Array(items),
        csv: Some(csv),
        details: Map::new(),
        check: None,
    })
}

fn cmd_verify_limit(g: &Global, grid: &str, ray: &str) -> CliResult<Report> {
    let ctx = context(g)?;
    let wp = ctx.prec + 16;
    let dir = direction(ray, wp)?;
    let ts = parse_list(grid, "--tau-grid")?;
    let taus = ts
        .iter()
        .map(|t| {
            let tt = ComplexAP::parse(t, "0", wp)?;
            if !(tt.re.is_sign_positive() && !tt.re.is_zero()) {
                return Err(plumbtop::Error::Precondition(format!("grid value {t} must be positive")));
            }
            let tau = &tt * &dir;
            if !(tau.im.is_sign_positive() && !tau.im.is_zero()) {
                return Err(plumbtop::Error::Precondition(format!("ray {ray} leaves the upper half-plane")));
            }
            Ok(tau)
        })
        .collect::<plumbtop::Result<Vec<_>>>()?;
    let order = match &g.order {
        Some(e) => parse_rational(e)?,
        None => taus
            .iter()
            .map(|tau| RadialSeries::order_for(&ctx, tau.im.to_f64(), g.tol))
            .max()
            .expect("grid is non-empty"),
    };
    let series = RadialSeries::new(&ctx, &order)?;
    let limit = cgp_invariant(&ctx.graph, &ctx.omega, &ctx.level)?;
    let evals = taus
        .par_iter()
        .map(|tau| series.eval(tau, g.tol, &ctx))
        .collect::<plumbtop::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut items = Vec::new();
    let mut errs = Vec::new();
    for (t, ev) in ts.iter().zip(&evals) {
        let (re, im) = decimal(&ev.value, ctx.prec);
        let err = (&ev.value - &limit).abs_f64();
        errs.push(err);
        items.push(json!({ "t": t, "re": re, "im": im, "abs_err": err, "tail_bound": ev.tail_bound }));
        rows.push(vec![t.clone(), re, im, format!("{err:e}"), format!("{:e}", ev.tail_bound)]);
    }
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let (lre, lim) = decimal(&limit, ctx.prec);
    let json = json!({ "limit": { "re": lre, "im": lim }, "monotone": monotone, "rows": items });
    let mut details = Map::new();
    details.insert("tau_grid".into(), json!(ts));
    details.insert("ray".into(), json!(ray));
    details.insert("order".into(), json!(order.to_string()));
    details.insert("radius".into(), json!((Rat::from_integer(4) * (order - ctx.delta_exponent())).to_string()));
    let csv = csv_text(&["t", "re", "im", "abs_err", "tail_bound"], &rows)?;
    Ok(Report {
        name: "verify-limit",
        stdout: csv.clone(),
        json,
        csv: Some(csv),
        details,
        check: (!monotone).then(|| format!("|Zhat - Z_r| is not strictly decreasing along the grid: {errs:?}")),
    })
}

fn cmd_expand(g: &Global, l: u32) -> CliResult<Report> {
    let ctx = context(g)?;
    let p = perturbative_coeffs(&ctx, l)?;
    let mut items = Vec::new();
    let mut rows = Vec::new();
    for (i, c) in p.coeffs.iter().enumerate() {
        let (re, im) = decimal(c, ctx.prec);
        items.push(json!({ "l": i, "re": re, "im": im }));
        rows.push(vec![i.to_string(), re, im]);
    }
    let json = Value::Array(items);
    let mut details = Map::new();
    details.insert("L".into(), json!(l));
    details.insert("variable".into(), json!("2 pi i tau"));
    Ok(Report {
        name: "expand",
        stdout: pretty(&json),
        csv: Some(csv_text(&["l", "re", "im"], &rows)?),
        json,
        details,
        check: None,
    })
}

fn cmd_borel(g: &Global, grid: &str) -> CliResult<Report> {
    let ctx = context(g)?;
    let zs = parse_list(grid, "--z-grid")?
        .iter()
        .map(|z| parse_f64(z, "--z-grid"))
        .collect::<CliResult<Vec<_>>>()?;
    let evals = zs
        .par_iter()
        .map(|&z| borel_transform(z, &ctx, BOREL_NODES))
        .collect::<plumbtop::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut items = Vec::new();
    for b in &evals {
        rows.push(vec![b.z.to_string(), b.value.re.to_string(), b.value.im.to_string()]);
        items.push(json!({ "z": b.z, "re": b.value.re, "im": b.value.im, "error_estimate": b.error_estimate }));
    }
    let csv = csv_text(&["z", "re", "im"], &rows)?;
    let mut details = Map::new();
    details.insert("sphere_nodes".into(), json!(BOREL_NODES));
    Ok(Report {
        name: "borel",
        stdout: csv.clone(),
        json: Value::Array(items),
        csv: Some(csv),
        details,
        check: None,
    })
}

fn cmd_resum(g: &Global, theta: f64, tau: &str) -> CliResult<Report> {
    let ctx = context(g)?;
    let tau_ap = parse_tau(tau, ctx.prec)?;
    let t64 = tau_ap.to_c64();
    let v = borel_laplace_resum(theta, t64, &ctx, BOREL_NODES)?;
    let contour = if ctx.rank() <= RANK_CAP {
        let spec = ContourSpec { eps: g.epsilon, ..ContourSpec::default() };
        let c = contour_integral(t64, &spec, &ctx)?;
        json!({
            "re": c.value.re, "im": c.value.im, "eps": c.eps,
            "half_width": c.half_width, "nodes_per_axis": c.nodes_per_axis,
        })
    } else {
        Value::Null
    };
    let json = json!({
        "theta": theta,
        "tau": { "re": t64.re, "im": t64.im },
        "re": v.re,
        "im": v.im,
        "contour": contour,
    });
    let row = vec![theta.to_string(), t64.re.to_string(), t64.im.to_string(), v.re.to_string(), v.im.to_string()];
    let mut details = Map::new();
    details.insert("sphere_nodes".into(), json!(BOREL_NODES));
    details.insert("tau".into(), json!(tau));
    Ok(Report {
        name: "resum",
        stdout: pretty(&json),
        csv: Some(csv_text(&["theta", "tau_re", "tau_im", "re", "im"], &[row])?),
        json,
        details,
        check: None,
    })
}

fn cmd_reciprocity(g: &Global, seed: u64, count: usize) -> CliResult<Report> {
    let prec = g.precision_bits;
    let mut failures = Vec::new();
    for (i, (inst, expected)) in hand_examples().into_iter().enumerate() {
        match (reciprocity_check(&inst, prec), expected) {
            (Ok(rep), Some(_)) if rep.pass => {}
            (Err(plumbtop::Error::Hypothesis(_)), None) => {}
            (other, _) => failures.push(json!({ "case": format!("hand {i}"), "result": format!("{other:?}") })),
        }
    }
    let family = random_family(seed, count);
    let reports = family
        .par_iter()
        .map(|inst| reciprocity_check(inst, prec))
        .collect::<plumbtop::Result<Vec<_>>>()?;
    let mut max_diff = 0f64;
    for (i, (inst, rep)) in family.iter().zip(&reports).enumerate() {
        max_diff = max_diff.max(rep.diff);
        if !rep.pass {
            failures.push(json!({ "case": format!("random {i}"), "instance": format!("{inst:?}"), "diff": rep.diff }));
        }
    }
    let n_fail = failures.len();
    let pass = n_fail == 0;
    let json = json!({
        "test": "reciprocity",
        "seed": seed,
        "count": count,
        "hand_cases": hand_examples().len(),
        "max_diff": max_diff,
        "pass": pass,
        "failures": failures,
    });
    let mut details = Map::new();
    details.insert("seed".into(), json!(seed));
    details.insert("count".into(), json!(count));
    Ok(Report {
        name: "selftest-reciprocity",
        stdout: pretty(&json),
        json,
        csv: None,
        details,
        check: (!pass).then(|| format!("{n_fail} reciprocity case(s) failed")),
    })
}

fn io_err(p: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", p.display()))
}

fn write_outputs(dir: &Path, g: &Global, rep: &Report) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let mut files = Vec::new();
    let json_path = dir.join(format!("{}.json", rep.name));
    fs::write(&json_path, pretty(&rep.json)).map_err(|e| io_err(&json_path, e))?;
    files.push(format!("{}.json", rep.name));
    if let Some(csv) = &rep.csv {
        let p = dir.join(format!("{}.csv", rep.name));
        fs::write(&p, csv).map_err(|e| io_err(&p, e))?;
        files.push(format!("{}.csv", rep.name));
    }
    let graph = match &g.graph {
        Some(p) => {
            let bytes = fs::read(p).map_err(|e| io_err(p, e))?;
            let hash: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
            json!({ "path": p.display().to_string(), "sha256": hash })
        }
        None => Value::Null,
    };
    let manifest = json!({
        "tool": "plumbtop",
        "version": env!("CARGO_PKG_VERSION"),
        "command": rep.name,
        "args": std::env::args().skip(1).collect::<Vec<_>>(),
        "graph": graph,
        "r": g.r,
        "precision_bits": g.precision_bits,
        "tol": g.tol,
        "epsilon": g.epsilon,
        "truncation": Value::Object(rep.details.clone()),
        "outputs": files,
    });
    let p = dir.join("manifest.json");
    fs::write(&p, pretty(&manifest)).map_err(|e| io_err(&p, e))
}
