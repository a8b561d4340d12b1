//! Command-line front end. `run` returns the process exit code: 0 on
//! success, 1 when a check fails, 2 on malformed input or flags.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read, Write};

use cayleywalk_core::catalog::{
    as_lattice_walk, catalog_description, catalog_walk, dirac_scalar_parent, extension_label, weyl_preimage,
    CatalogParams, CATALOG, DEFAULT_MASS,
};
use cayleywalk_core::cayley::quadrangularity_check;
use cayleywalk_core::coarse::coarse_grain;
use cayleywalk_core::group::enumerate_index2_extensions;
use cayleywalk_core::momentum::{dispersion, dispersion_with_derivatives, Branch, DEFAULT_FD_STEP};
use cayleywalk_core::sim::{compare_representations, evolve, init_state, InitSpec, TorusPatch};
use cayleywalk_core::walk::{scalar_solution_search, unitarity_residual, QuantumWalk, SearchOptions, Side};
use cayleywalk_core::Error;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::json::{self, ExtensionField};
use crate::table;

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(m: impl Into<String>) -> Self {
        CliError { code: 2, message: m.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::input(format!("io error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::input(format!("malformed JSON: {e}"))
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::input(format!("csv error: {e}"))
    }
}

type CmdResult = Result<Outcome, CliError>;

/// Successful command output; `passed = false` maps to exit code 1.
struct Outcome {
    text: String,
    passed: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, passed: true }
    }
}

#[derive(Parser, Debug)]
#[command(name = "cayleywalk", version, about = "Quantum walks on Cayley graphs of virtually Abelian groups")]
struct Cli {
    #[command(subcommand)]
    cmd: Top,
}

#[derive(Subcommand, Debug)]
enum Top {
    /// Index-2 extensions of Z^d.
    #[command(subcommand)]
    Extensions(ExtCmd),
    /// Cayley-graph predicates.
    #[command(subcommand)]
    Graph(GraphCmd),
    /// Operations on walk files.
    #[command(subcommand)]
    Walk(WalkCmd),
    /// Built-in walks.
    #[command(subcommand)]
    Catalog(CatalogCmd),
}

#[derive(Subcommand, Debug)]
enum ExtCmd {
    /// List the classes for dimension 1, 2 or 3.
    Enumerate {
        #[arg(long)]
        dim: usize,
        /// Print the classes as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Check the defining relations of extension data.
    Validate { file: String },
}

#[derive(Subcommand, Debug)]
enum GraphCmd {
    /// Strict quadrangularity of the generating set of a walk file.
    Quadrangularity { file: String },
}

#[derive(Args, Debug)]
struct OutArg {
    /// Output path, `-` for stdout.
    #[arg(short, long, default_value = "-")]
    output: String,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InitKind {
    Delta,
    Gauss,
    Random,
}

#[derive(Subcommand, Debug)]
enum WalkCmd {
    /// Unitarity residual with a per-constraint breakdown on failure.
    Verify {
        file: String,
        /// Print every constraint, not only the failing ones.
        #[arg(long)]
        verbose: bool,
    },
    /// Regroups a scalar walk into a coin walk on Z^d.
    CoarseGrain {
        file: String,
        #[command(flatten)]
        out: OutArg,
        /// Provenance sidecar path (default: next to the output file).
        #[arg(long)]
        provenance: Option<String>,
    },
    /// Eigenphases of A_k on a grid clipped to the Brillouin zone (CSV).
    Dispersion {
        file: String,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        #[command(flatten)]
        out: OutArg,
        /// Also write drift and diffusion of this branch: upper, lower or an index.
        #[arg(long)]
        branch: Option<String>,
        #[arg(long, default_value_t = DEFAULT_FD_STEP)]
        h: f64,
    },
    /// Evolves a state on a periodic patch and writes probabilities (CSV).
    Evolve {
        file: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        size: usize,
        #[arg(long, value_enum, default_value_t = InitKind::Delta)]
        init: InitKind,
        /// Start site (delta) or packet center (gauss), comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        site: Option<Vec<i64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        k0: Option<Vec<f64>>,
        #[arg(long, default_value_t = 5.0)]
        width: f64,
        #[arg(long, default_value_t = 0)]
        q: usize,
        #[arg(long, default_value_t = 0)]
        coin: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: OutArg,
    },
    /// Evolves a scalar walk and its coarse-graining side by side.
    Compare {
        file: String,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Searches for unitary scalar walks on the generating set of a file.
    Search {
        file: String,
        #[arg(long, default_value_t = 20)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-7)]
        accept: f64,
        #[arg(long, default_value_t = 20000)]
        max_iters: usize,
        /// Generator index -> free parameter index, comma separated.
        #[arg(long, value_delimiter = ',')]
        tie: Option<Vec<usize>>,
        /// Writes the first solution found as a walk file.
        #[arg(short, long)]
        output: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogCmd {
    List,
    /// Writes a catalog walk as JSON.
    Emit {
        name: String,
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<f64>>,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long)]
        m: Option<f64>,
        #[command(flatten)]
        out: OutArg,
    },
}

fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {path}: {e}")))
    }
}

/// Writes to a file, or appends to the command's stdout text for `-`.
fn write_output(path: &str, bytes: &[u8], text: &mut String) -> Result<(), CliError> {
    if path == "-" {
        text.push_str(std::str::from_utf8(bytes).map_err(|_| CliError::input("non-UTF-8 output"))?);
        Ok(())
    } else {
        fs::write(path, bytes).map_err(|e| CliError::input(format!("cannot write {path}: {e}")))
    }
}

fn load_walk(path: &str) -> Result<QuantumWalk, CliError> {
    Ok(json::walk_from_json(&json::parse_walk(&read_input(path)?)?)?)
}

fn pretty<T: serde::Serialize>(v: &T) -> Result<Vec<u8>, CliError> {
    let mut s = serde_json::to_vec_pretty(v)?;
    s.push(b'\n');
    Ok(s)
}

/// Human-readable text for the written artifact, empty when it went to stdout.
fn wrote(path: &str, what: &str) -> String {
    if path == "-" {
        String::new()
    } else {
        format!("wrote {what} to {path}\n")
    }
}

fn enumerate(dim: usize, as_json: bool) -> CmdResult {
    let classes = enumerate_index2_extensions(dim)?;
    if as_json {
        let list: Vec<_> = classes
            .iter()
            .map(|c| {
                serde_json::json!({
                    "name": c.name,
                    "automorphism": c.automorphism,
                    "semidirect": c.semidirect,
                    "presentation": c.ext.presentation(),
                    "extension": json::extension_to_json(&c.ext),
                })
            })
            .collect();
        return Ok(Outcome::ok(String::from_utf8(pretty(&list)?).expect("utf8")));
    }
    let mut out = String::new();
    for c in &classes {
        let c2 = c.ext.cocycle(1, 1);
        let kind = if c.semidirect { "semidirect" } else { "non-semidirect" };
        writeln!(out, "{:<6} {:<8} {:<15} c^2={:?}  {}", c.name, c.automorphism, kind, c2, c.ext.presentation()).ok();
    }
    let semi = classes.iter().filter(|c| c.semidirect).count();
    writeln!(out, "{} classes ({} semidirect, {} non-semidirect)", classes.len(), semi, classes.len() - semi).ok();
    Ok(Outcome::ok(out))
}

fn validate_extension(file: &str) -> CmdResult {
    let field = json::parse_extension(&read_input(file)?)?;
    let ext = match field {
        ExtensionField::Data(d) => json::extension_from_json(&d)?,
        ExtensionField::Name(n) => cayleywalk_core::group::named_extension(&n)?,
    };
    let bad = ext.validate();
    if bad.is_empty() {
        return Ok(Outcome::ok(format!("VALID {}\n", ext.presentation())));
    }
    let mut out = format!("INVALID ({} violations)\n", bad.len());
    for v in &bad {
        writeln!(out, "  {:?}: {v}", v.kind()).ok();
    }
    Ok(Outcome { text: out, passed: false })
}

fn quadrangularity(file: &str) -> CmdResult {
    let gs = json::generating_set_from_json(&json::parse_walk(&read_input(file)?)?)?;
    let report = quadrangularity_check(&gs);
    if report.passes {
        return Ok(Outcome::ok("PASS\n".into()));
    }
    let s = gs.elements();
    let mut out = format!("FAIL ({} violating pairs)\n", report.violators.len());
    for &(i, j) in &report.violators {
        writeln!(out, "  h={} h'={}", s[i], s[j]).ok();
    }
    Ok(Outcome { text: out, passed: false })
}

fn verify(file: &str, verbose: bool) -> CmdResult {
    let w = load_walk(file)?;
    let report = unitarity_residual(&w);
    let pass = report.residual <= w.tolerance();
    let mut out = format!("residual {:.1e} {}\n", report.residual, if pass { "PASS" } else { "FAIL" });
    let list: Vec<_> =
        if verbose { report.constraints.iter().collect() } else { report.failing(w.tolerance()) };
    for r in list {
        let side = match r.side {
            Side::Left => "left",
            Side::Right => "right",
        };
        writeln!(out, "  {side} g={} norm {:.3e}", r.g, r.norm).ok();
    }
    Ok(Outcome { text: out, passed: pass })
}

fn coarse_grain_cmd(file: &str, out: &str, provenance: Option<&str>) -> CmdResult {
    let w = load_walk(file)?;
    let cg = coarse_grain(&w)?;
    let mut text = String::new();
    write_output(out, &pretty(&json::walk_to_json(&cg.base, None))?, &mut text)?;
    let side = provenance.map(str::to_string).or_else(|| {
        (out != "-").then(|| format!("{}.provenance.json", out.strip_suffix(".json").unwrap_or(out)))
    });
    text += &wrote(out, "coarse-grained walk");
    if let Some(p) = side {
        let labels = json::default_labels(w.gens());
        write_output(&p, &pretty(&json::provenance_to_json(&w, &cg, &labels))?, &mut text)?;
        text += &wrote(&p, "provenance");
    }
    Ok(Outcome::ok(text))
}

fn parse_branch(s: &str) -> Result<Branch, CliError> {
    match s {
        "upper" => Ok(Branch::Upper),
        "lower" => Ok(Branch::Lower),
        _ => s.parse().map(Branch::Index).map_err(|_| CliError::input(format!("branch {s}: use upper, lower or an index"))),
    }
}

fn dispersion_cmd(file: &str, grid: usize, out: &str, branch: Option<&str>, h: f64) -> CmdResult {
    let w = as_lattice_walk(&load_walk(file)?)?;
    let g = match branch {
        None => dispersion(&w, grid)?,
        Some(b) => dispersion_with_derivatives(&w, grid, parse_branch(b)?, h)?,
    };
    let mut text = String::new();
    write_output(out, &table::dispersion_csv(&g, branch.is_some())?, &mut text)?;
    text += &wrote(out, &format!("{} k-points", g.points.len()));
    Ok(Outcome::ok(text))
}

#[allow(clippy::too_many_arguments)]
fn evolve_cmd(
    file: &str,
    steps: usize,
    size: usize,
    init: InitKind,
    site: Option<Vec<i64>>,
    k0: Option<Vec<f64>>,
    width: f64,
    q: usize,
    coin: usize,
    seed: u64,
    out: &str,
) -> CmdResult {
    let w = load_walk(file)?;
    let patch = TorusPatch::for_walk(&w, size)?;
    let d = patch.dim;
    let site = site.unwrap_or_else(|| vec![0; d]);
    let spec = match init {
        InitKind::Delta => InitSpec::Delta { site, q, coin },
        InitKind::Gauss => InitSpec::Gaussian { center: site, k0: k0.unwrap_or_else(|| vec![0.0; d]), width, q, coin },
        InitKind::Random => InitSpec::Random { seed },
    };
    let st = init_state(patch, w.coin_dim(), &spec)?;
    let ev = evolve(&w, &st, steps, None)?;
    let mut text = String::new();
    write_output(out, &table::probabilities_csv(&ev.state)?, &mut text)?;
    text += &wrote(out, "probabilities");
    if out != "-" {
        writeln!(text, "steps {steps} norm {:.15}", ev.state.norm()).ok();
    }
    Ok(Outcome::ok(text))
}

fn compare_cmd(file: &str, steps: usize, size: usize, seed: u64) -> CmdResult {
    let w = load_walk(file)?;
    let dev = compare_representations(&w, steps, size, seed)?;
    let pass = dev <= w.tolerance();
    Ok(Outcome { text: format!("deviation {dev:.1e} {}\n", if pass { "PASS" } else { "FAIL" }), passed: pass })
}

#[allow(clippy::too_many_arguments)]
fn search_cmd(
    file: &str,
    restarts: usize,
    seed: u64,
    accept: f64,
    max_iters: usize,
    tie: Option<Vec<usize>>,
    output: Option<&str>,
) -> CmdResult {
    let gs = json::generating_set_from_json(&json::parse_walk(&read_input(file)?)?)?;
    let opts = SearchOptions { restarts, seed, accept, max_iters, tie, ..SearchOptions::default() };
    let res = scalar_solution_search(&gs, &opts)?;
    let mut text = String::new();
    if !res.quadrangular {
        text += "graph is not quadrangular: no unitary scalar walk exists\n";
    }
    writeln!(text, "best residual {:.3e} over {} restarts, {} solutions", res.best_residual, opts.restarts, res.solutions.len())
        .ok();
    if let (Some(path), Some(z)) = (output, res.solutions.first()) {
        let w = QuantumWalk::scalar(gs, z)?;
        write_output(path, &pretty(&json::walk_to_json(&w, None))?, &mut text)?;
        text += &wrote(path, "first solution");
    }
    Ok(Outcome { text, passed: res.feasible() })
}

fn catalog_list() -> CmdResult {
    let mut out = String::new();
    for name in CATALOG {
        writeln!(out, "{:<16} {}", name, catalog_description(name).unwrap_or("")).ok();
    }
    Ok(Outcome::ok(out))
}

fn catalog_emit(name: &str, params: CatalogParams, out: &str) -> CmdResult {
    let mass = params.m.unwrap_or(DEFAULT_MASS);
    let (w, mut meta) = match name {
        "weyl-j1" | "weyl-j2" | "weyl-k2" => {
            let p = weyl_preimage(&name[5..].to_ascii_uppercase())?;
            let meta = serde_json::json!({
                "gauge_left": json::cmat_to_json(&p.fit.left),
                "gauge_right": json::cmat_to_json(&p.fit.right),
                "fit_residual": p.fit.residual,
                "spread": p.spread,
            });
            (p.walk, meta)
        }
        "dirac-parent-2d" | "dirac-parent-3d" => {
            let d = if name.ends_with("2d") { 2 } else { 3 };
            let p = dirac_scalar_parent(d, mass, None)?;
            let meta = serde_json::json!({
                "mass": mass,
                "phi1": p.phi1.to_rows(),
                "phi2": p.phi2.to_rows(),
                "block_unitary": json::cmat_to_json(&p.block_unitary),
                "fit_residual": p.fit_residual,
                "pairing_defect": p.pairing_defect,
            });
            (p.walk, meta)
        }
        _ => (catalog_walk(name, &params)?, serde_json::json!({})),
    };
    meta["extension"] = serde_json::Value::String(extension_label(w.ext()));
    let tol = json::env_tolerance()?;
    let w = match tol {
        Some(t) => w.with_tolerance(t),
        None => w,
    };
    let mut text = String::new();
    let mut j = json::walk_to_json(&w, Some(name));
    j.metadata = Some(meta);
    write_output(out, &pretty(&j)?, &mut text)?;
    text += &wrote(out, name);
    Ok(Outcome::ok(text))
}

fn dispatch(cli: Cli) -> CmdResult {
    match cli.cmd {
        Top::Extensions(ExtCmd::Enumerate { dim, json }) => enumerate(dim, json),
        Top::Extensions(ExtCmd::Validate { file }) => validate_extension(&file),
        Top::Graph(GraphCmd::Quadrangularity { file }) => quadrangularity(&file),
        Top::Walk(cmd) => match cmd {
            WalkCmd::Verify { file, verbose } => verify(&file, verbose),
            WalkCmd::CoarseGrain { file, out, provenance } => coarse_grain_cmd(&file, &out.output, provenance.as_deref()),
            WalkCmd::Dispersion { file, grid, out, branch, h } => {
                dispersion_cmd(&file, grid, &out.output, branch.as_deref(), h)
            }
            WalkCmd::Evolve { file, steps, size, init, site, k0, width, q, coin, seed, out } => {
                evolve_cmd(&file, steps, size, init, site, k0, width, q, coin, seed, &out.output)
            }
            WalkCmd::Compare { file, steps, size, seed } => compare_cmd(&file, steps, size, seed),
            WalkCmd::Search { file, restarts, seed, accept, max_iters, tie, output } => {
                search_cmd(&file, restarts, seed, accept, max_iters, tie, output.as_deref())
            }
        },
        Top::Catalog(CatalogCmd::List) => catalog_list(),
        Top::Catalog(CatalogCmd::Emit { name, alpha, theta, m, out }) => {
            catalog_emit(&name, CatalogParams { alpha, theta, m }, &out.output)
        }
    }
}

/// Runs one command, writing to the given streams, and returns the exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli) {
        Ok(o) => {
            let _ = stdout.write_all(o.text.as_bytes());
            if o.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

/// Runs one command against the process streams.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    run_with(argv, &mut out, &mut err)
}
