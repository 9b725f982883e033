//! Command-line front end: list and inspect catalog systems, print analytic
//! spectra, export sampled V/psi data, run the numerical verification suite,
//! and cross-check Schwartzian derivatives.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid input or
//! constraint violation, 3 I/O failure.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};

use solvagen::catalog::{self, QuantumSystem, Status};
use solvagen::expr;
use solvagen::solver::{self, RadialGrid};
use solvagen::transform;

#[derive(Parser)]
#[command(
    name = "solvagen",
    version,
    about = "Exactly solvable quantum potentials in D dimensions, with independent numerical verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the catalog systems
    List {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Show one system in full: parameters, potential, domain, notes
    Info {
        /// Catalog system id
        id: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Print the analytic spectrum E_n of a system
    Energies {
        /// Catalog system id
        id: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Export sampled V(r) and normalized wavefunction columns
    Sample {
        /// Catalog system id
        id: String,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Numerically verify analytic spectra against the Numerov solver
    Verify {
        /// Catalog system id (omit with --all)
        id: Option<String>,
        /// Verify every catalog system
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare the symbolic Schwartzian derivative of g(r) with finite differences
    SchwartzianCheck {
        /// Expression for g(r), e.g. "exp(-2*r)"
        g: String,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Clone, Default)]
struct RunArgs {
    /// Spatial dimension D
    #[arg(long)]
    dimension: Option<u32>,
    /// Angular momentum quantum number
    #[arg(long)]
    ell: Option<u32>,
    /// Highest quantum-number label to include
    #[arg(long)]
    n_max: Option<u32>,
    /// Parameter override, repeatable: --param omega=2
    #[arg(long = "param")]
    params: Vec<String>,
    /// Radial grid as rmin,rmax,N
    #[arg(long)]
    grid: Option<String>,
    /// Relative tolerance for verification
    #[arg(long)]
    tol: Option<f64>,
    /// Output format
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write output to a file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Fail (instead of skip) on PaperAmbiguous systems
    #[arg(long)]
    strict: bool,
}

#[derive(Clone, Copy, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Csv,
    Json,
}

/// Fully resolved run configuration: config-file values overridden by flags.
struct RunConfig {
    dimension: Option<u32>,
    ell: Option<u32>,
    n_max: u32,
    params: BTreeMap<String, f64>,
    grid: Option<(f64, f64, usize)>,
    tol: f64,
    format: Format,
    output: Option<PathBuf>,
    strict: bool,
}

enum CliError {
    /// exit 2: bad flags, unknown systems, constraint violations
    Usage(String),
    /// exit 1: a verification failure
    Verification,
    /// exit 3: filesystem trouble
    Io(String),
}

impl From<catalog::CatalogError> for CliError {
    fn from(e: catalog::CatalogError) -> CliError {
        CliError::Usage(e.to_string())
    }
}

impl From<solver::SolverError> for CliError {
    fn from(e: solver::SolverError) -> CliError {
        CliError::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List { run } => with_config(run, cmd_list),
        Command::Info { id, run } => with_config(run, |c| cmd_info(&id, c)),
        Command::Energies { id, run } => with_config(run, |c| cmd_energies(&id, c)),
        Command::Sample { id, run } => with_config(run, |c| cmd_sample(&id, c)),
        Command::Verify { id, all, run } => {
            with_config(run, |c| cmd_verify(id.as_deref(), all, c))
        }
        Command::SchwartzianCheck { g, run } => {
            with_config(run, |c| cmd_schwartzian_check(&g, c))
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Verification) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn with_config(
    args: RunArgs,
    f: impl FnOnce(&RunConfig) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let config = resolve_config(args)?;
    f(&config)
}

/// Merges SOLVAGEN_CONFIG (key=value lines) under the command-line flags;
/// flags win.
fn resolve_config(args: RunArgs) -> Result<RunConfig, CliError> {
    let mut file = RunArgs::default();
    if let Ok(path) = std::env::var("SOLVAGEN_CONFIG") {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CliError::Io(format!("config file {path}: {e}")))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected key=value", lineno + 1))
            })?;
            let bad = |what: &str| {
                CliError::Usage(format!("config line {}: {what}", lineno + 1))
            };
            match key.trim() {
                "dimension" => {
                    file.dimension = Some(value.trim().parse().map_err(|_| bad("bad dimension"))?)
                }
                "ell" => file.ell = Some(value.trim().parse().map_err(|_| bad("bad ell"))?),
                "n_max" => {
                    file.n_max = Some(value.trim().parse().map_err(|_| bad("bad n_max"))?)
                }
                "tol" => file.tol = Some(value.trim().parse().map_err(|_| bad("bad tol"))?),
                "grid" => file.grid = Some(value.trim().to_string()),
                "format" => {
                    file.format = Some(match value.trim() {
                        "csv" => Format::Csv,
                        "json" => Format::Json,
                        _ => return Err(bad("format must be csv or json")),
                    })
                }
                "output" => file.output = Some(PathBuf::from(value.trim())),
                "strict" => {
                    file.strict = value.trim().parse().map_err(|_| bad("bad strict"))?
                }
                "param" => file.params.push(value.trim().to_string()),
                other => {
                    return Err(CliError::Usage(format!(
                        "config line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
    }
    let mut params = BTreeMap::new();
    for spec in file.params.iter().chain(args.params.iter()) {
        let (k, v) = spec
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--param `{spec}`: expected key=value")))?;
        let v: f64 = v
            .parse()
            .map_err(|_| CliError::Usage(format!("--param `{spec}`: bad number")))?;
        params.insert(k.to_string(), v);
    }
    let grid = match args.grid.or(file.grid) {
        None => None,
        Some(spec) => {
            let parts: Vec<&str> = spec.split(',').collect();
            let bad = || CliError::Usage(format!("--grid `{spec}`: expected rmin,rmax,N"));
            if parts.len() != 3 {
                return Err(bad());
            }
            let rmin: f64 = parts[0].trim().parse().map_err(|_| bad())?;
            let rmax: f64 = parts[1].trim().parse().map_err(|_| bad())?;
            let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
            if !(rmax > rmin) || n < 100 {
                return Err(CliError::Usage(format!(
                    "--grid `{spec}`: need rmin < rmax and N >= 100"
                )));
            }
            Some((rmin, rmax, n))
        }
    };
    Ok(RunConfig {
        dimension: args.dimension.or(file.dimension),
        ell: args.ell.or(file.ell),
        n_max: args.n_max.or(file.n_max).unwrap_or(4),
        params,
        grid,
        tol: args.tol.or(file.tol).unwrap_or(1e-6),
        format: args.format.or(file.format).unwrap_or_default(),
        output: args.output.or(file.output),
        strict: args.strict || file.strict,
    })
}

// === output plumbing =====================================================

/// C-style %.12g: 12 significant digits, trailing zeros stripped, exponent
/// notation outside [1e-4, 1e12).
fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= 12 {
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{}e{}{:02}", mant, if exp < 0 { "-" } else { "+" }, exp.abs())
    } else {
        let decimals = (11 - exp).max(0) as usize;
        let fixed = format!("{:.*}", decimals, x);
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    }
}

/// Order-preserving JSON value with pre-formatted numbers, so that identical
/// configs serialize byte-identically.
enum J {
    Raw(String),
    Str(String),
    Arr(Vec<J>),
    Obj(Vec<(&'static str, J)>),
}

fn jnum(x: f64) -> J {
    if x.is_finite() {
        J::Raw(fmt_g(x))
    } else {
        J::Raw("null".to_string())
    }
}

fn jint(x: impl Into<i64>) -> J {
    J::Raw(x.into().to_string())
}

fn jstr(s: impl Into<String>) -> J {
    J::Str(s.into())
}

impl J {
    fn render(&self, out: &mut String, indent: usize) {
        let pad = "  ".repeat(indent);
        match self {
            J::Raw(s) => out.push_str(s),
            J::Str(s) => {
                out.push('"');
                for ch in s.chars() {
                    match ch {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        c if (c as u32) < 0x20 => {
                            out.push_str(&format!("\\u{:04x}", c as u32))
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            J::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push_str("[\n");
                for (i, item) in items.iter().enumerate() {
                    out.push_str(&pad);
                    out.push_str("  ");
                    item.render(out, indent + 1);
                    if i + 1 < items.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&pad);
                out.push(']');
            }
            J::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push_str("{\n");
                for (i, (key, value)) in fields.iter().enumerate() {
                    out.push_str(&pad);
                    out.push_str("  \"");
                    out.push_str(key);
                    out.push_str("\": ");
                    value.render(out, indent + 1);
                    if i + 1 < fields.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&pad);
                out.push('}');
            }
        }
    }

    fn to_string(&self) -> String {
        let mut s = String::new();
        self.render(&mut s, 0);
        s.push('\n');
        s
    }
}

fn csv_quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn emit(config: &RunConfig, text: &str) -> Result<(), CliError> {
    match &config.output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
    }
}

// === shared helpers ======================================================

fn build_system(id: &str, config: &RunConfig) -> Result<QuantumSystem, CliError> {
    Ok(catalog::build(
        id,
        config.dimension,
        config.ell,
        &config.params,
    )?)
}

/// State ordinals to include: bounded by the system's own state count and,
/// for systems whose printed label grows with the ordinal, by label <= n_max.
fn states_for(sys: &QuantumSystem, n_max: u32) -> Vec<u32> {
    let increasing = sys.label(1) >= sys.label(0);
    let mut ks = Vec::new();
    let mut k = 0u32;
    loop {
        if let Some(mx) = sys.max_state() {
            if k > mx {
                break;
            }
        }
        if increasing && sys.label(k) > n_max {
            break;
        }
        ks.push(k);
        k += 1;
        if ks.len() > 64 {
            break;
        }
    }
    ks
}

fn params_json(sys: &QuantumSystem) -> J {
    // BTreeMap iteration is ordered, so the schema is deterministic
    J::Obj(
        sys.params
            .iter()
            .map(|(k, v)| (leak(k), jnum(*v)))
            .collect(),
    )
}

/// Keys of J::Obj are &'static str; catalog parameter names are a small
/// fixed set, so leaking them is bounded.
fn leak(s: &str) -> &'static str {
    Box::leak(s.to_string().into_boxed_str())
}

fn status_str(s: Status) -> &'static str {
    match s {
        Status::Verified => "verified",
        Status::PaperAmbiguous => "paper-ambiguous",
    }
}

// === subcommands =========================================================

fn cmd_list(config: &RunConfig) -> Result<(), CliError> {
    let systems = catalog::all_systems();
    let text = match config.format {
        Format::Csv => {
            let mut out = String::from("id,family,status,dimension,ell,constraints\n");
            for sys in &systems {
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    sys.id,
                    csv_quote(sys.family_name),
                    status_str(sys.status),
                    sys.d,
                    sys.ell,
                    csv_quote(&sys.constraints.join("; ")),
                ));
            }
            out
        }
        Format::Json => J::Arr(systems.iter().map(system_json).collect()).to_string(),
    };
    emit(config, &text)
}

fn system_json(sys: &QuantumSystem) -> J {
    J::Obj(vec![
        ("id", jstr(sys.id)),
        ("family", jstr(sys.family_name)),
        ("status", jstr(status_str(sys.status))),
        ("dimension", jint(sys.d)),
        ("ell", jint(sys.ell)),
        ("params", params_json(sys)),
        (
            "constraints",
            J::Arr(sys.constraints.iter().map(jstr).collect()),
        ),
        ("notes", J::Arr(sys.notes.iter().map(jstr).collect())),
    ])
}

fn cmd_info(id: &str, config: &RunConfig) -> Result<(), CliError> {
    let sys = build_system(id, config)?;
    let hint = sys.domain_hint(0);
    let potential = sys.potential().to_string();
    let text = match config.format {
        Format::Csv => {
            let mut out = String::new();
            out.push_str(&format!("id={}\n", sys.id));
            out.push_str(&format!("family={}\n", sys.family_name));
            out.push_str(&format!("status={}\n", status_str(sys.status)));
            out.push_str(&format!("dimension={}\n", sys.d));
            out.push_str(&format!("ell={}\n", sys.ell));
            for (k, v) in &sys.params {
                out.push_str(&format!("param.{k}={}\n", fmt_g(*v)));
            }
            out.push_str(&format!("potential={potential}\n"));
            out.push_str(&format!(
                "domain={},{},{}\n",
                fmt_g(hint.r_lo),
                fmt_g(hint.r_hi),
                hint.n_points
            ));
            if let Some(mx) = sys.max_state() {
                out.push_str(&format!("bound_states={}\n", mx + 1));
            }
            for c in &sys.constraints {
                out.push_str(&format!("constraint={c}\n"));
            }
            for n in &sys.notes {
                out.push_str(&format!("note={n}\n"));
            }
            out
        }
        Format::Json => {
            let mut fields = match system_json(&sys) {
                J::Obj(f) => f,
                _ => unreachable!(),
            };
            fields.push(("potential", jstr(potential)));
            fields.push((
                "domain",
                J::Obj(vec![
                    ("r_lo", jnum(hint.r_lo)),
                    ("r_hi", jnum(hint.r_hi)),
                    ("n_points", jint(hint.n_points as i64)),
                ]),
            ));
            fields.push((
                "bound_states",
                match sys.max_state() {
                    Some(mx) => jint(mx + 1),
                    None => J::Raw("null".to_string()),
                },
            ));
            J::Obj(fields).to_string()
        }
    };
    emit(config, &text)
}

fn cmd_energies(id: &str, config: &RunConfig) -> Result<(), CliError> {
    let sys = build_system(id, config)?;
    let states = states_for(&sys, config.n_max);
    let mut rows = Vec::new();
    for &k in &states {
        rows.push((sys.label(k), sys.energy(k)?));
    }
    let text = match config.format {
        Format::Csv => {
            let mut out = String::from("n,e_analytic\n");
            for (n, e) in &rows {
                out.push_str(&format!("{},{}\n", n, fmt_g(*e)));
            }
            out
        }
        Format::Json => J::Obj(vec![
            ("system", jstr(sys.id)),
            ("dimension", jint(sys.d)),
            ("ell", jint(sys.ell)),
            ("params", params_json(&sys)),
            (
                "energies",
                J::Arr(
                    rows.iter()
                        .map(|(n, e)| {
                            J::Obj(vec![("n", jint(*n)), ("e_analytic", jnum(*e))])
                        })
                        .collect(),
                ),
            ),
        ])
        .to_string(),
    };
    emit(config, &text)
}

fn cmd_sample(id: &str, config: &RunConfig) -> Result<(), CliError> {
    let sys = build_system(id, config)?;
    let states = states_for(&sys, config.n_max);
    let last = *states.last().unwrap_or(&0);
    let grid = match config.grid {
        Some((lo, hi, n)) => RadialGrid::over(lo, hi, n)?,
        None => RadialGrid::for_system(&sys, last)?,
    };
    let v = sys.potential();
    let mut psis = Vec::new();
    for &k in &states {
        psis.push(sys.psi(k)?);
    }
    let rs: Vec<f64> = (0..grid.n).map(|i| grid.point(i)).collect();
    let vvals: Vec<f64> = rs
        .iter()
        .map(|&r| v.eval1("r", r).unwrap_or(f64::NAN))
        .collect();
    // normalize each psi by trapezoid quadrature with weight |r|^{D-1}
    let mut cols: Vec<Vec<f64>> = Vec::new();
    for psi in &psis {
        let mut col: Vec<f64> = rs
            .iter()
            .map(|&r| psi.eval1("r", r).unwrap_or(f64::NAN))
            .collect();
        let h = grid.h();
        let mut norm2 = 0.0;
        for i in 0..col.len() {
            let w = if i == 0 || i + 1 == col.len() { 0.5 } else { 1.0 };
            let p = col[i];
            if p.is_finite() {
                norm2 += w * p * p * rs[i].abs().powi(sys.d as i32 - 1) * h;
            }
        }
        let s = 1.0 / norm2.sqrt();
        for p in &mut col {
            *p *= s;
        }
        cols.push(col);
    }
    let labels: Vec<String> = states.iter().map(|&k| format!("psi_{k}")).collect();
    let text = match config.format {
        Format::Csv => {
            let mut out = format!("r,v,{}\n", labels.join(","));
            for i in 0..grid.n {
                out.push_str(&fmt_g(rs[i]));
                out.push(',');
                out.push_str(&fmt_g(vvals[i]));
                for col in &cols {
                    out.push(',');
                    out.push_str(&fmt_g(col[i]));
                }
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let mut columns = vec![jstr("r"), jstr("v")];
            columns.extend(labels.iter().map(jstr));
            let rows: Vec<J> = (0..grid.n)
                .map(|i| {
                    let mut row = vec![jnum(rs[i]), jnum(vvals[i])];
                    row.extend(cols.iter().map(|c| jnum(c[i])));
                    J::Arr(row)
                })
                .collect();
            J::Obj(vec![
                ("system", jstr(sys.id)),
                ("dimension", jint(sys.d)),
                ("ell", jint(sys.ell)),
                ("columns", J::Arr(columns)),
                ("rows", J::Arr(rows)),
            ])
            .to_string()
        }
    };
    emit(config, &text)
}

// === verify ==============================================================

struct StateReport {
    label: u32,
    result: solver::EigenResult,
    orthogonality: f64,
    outcome: &'static str,
}

struct SystemReport {
    id: &'static str,
    status: Status,
    skipped: bool,
    error: Option<String>,
    states: Vec<StateReport>,
}

fn verify_system(sys: &QuantumSystem, config: &RunConfig) -> SystemReport {
    let mut report = SystemReport {
        id: sys.id,
        status: sys.status,
        skipped: false,
        error: None,
        states: Vec::new(),
    };
    for &k in &states_for(sys, config.n_max) {
        let grid = match config.grid {
            Some((lo, hi, n)) => RadialGrid::over(lo, hi, n),
            None => RadialGrid::for_system(sys, k),
        };
        let grid = match grid {
            Ok(g) => g,
            Err(e) => {
                report.error = Some(e.to_string());
                return report;
            }
        };
        let solved = match config.grid {
            None => solver::solve_state(sys, k),
            Some(_) => {
                let v_eff = solver::reduce_to_u(sys);
                let seed = sys.domain_hint(k).origin_seed;
                solver::find_eigenvalue(&v_eff, &grid, k as usize, (0.0, 0.0), seed)
                    .map(|res| res.against(sys.energy(k).unwrap_or(f64::NAN)))
            }
        };
        let mut result = match solved {
            Ok(r) => r,
            Err(e) => {
                report.error = Some(format!("state {k}: {e}"));
                return report;
            }
        };
        result.residual_max = solver::residual(sys, k, &grid).unwrap_or(f64::NAN);
        let orthogonality = if k == 0 {
            0.0
        } else {
            solver::orthogonality(sys, k - 1, k, &grid).unwrap_or(f64::NAN)
        };
        let pass = result.rel_error < config.tol
            && result.residual_max < 10.0 * config.tol
            && result.nodes == k as usize;
        report.states.push(StateReport {
            label: sys.label(k),
            result,
            orthogonality,
            outcome: if pass { "pass" } else { "fail" },
        });
    }
    report
}

fn cmd_verify(id: Option<&str>, all: bool, config: &RunConfig) -> Result<(), CliError> {
    let targets: Vec<QuantumSystem> = if all {
        catalog::all_systems()
    } else {
        let id = id.ok_or_else(|| {
            CliError::Usage("verify needs a system id or --all".to_string())
        })?;
        vec![build_system(id, config)?]
    };
    let start = std::time::Instant::now();
    let mut reports: Vec<Option<SystemReport>> = Vec::new();
    reports.resize_with(targets.len(), || None);
    {
        // bounded fan-out over systems; slot-indexed results keep the
        // report order independent of completion order
        let queue = Mutex::new((0..targets.len()).collect::<Vec<usize>>());
        let slots = Mutex::new(&mut reports);
        let workers = targets.len().min(4).max(1);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let idx = match queue.lock().unwrap().pop() {
                        Some(i) => i,
                        None => break,
                    };
                    let sys = &targets[idx];
                    let report = if sys.status == Status::PaperAmbiguous && !config.strict
                    {
                        SystemReport {
                            id: sys.id,
                            status: sys.status,
                            skipped: true,
                            error: None,
                            states: Vec::new(),
                        }
                    } else {
                        verify_system(sys, config)
                    };
                    slots.lock().unwrap()[idx] = Some(report);
                });
            }
        });
    }
    let reports: Vec<SystemReport> = reports.into_iter().map(|r| r.unwrap()).collect();
    let wall = start.elapsed().as_secs_f64();
    let mut pass = 0usize;
    let mut fail = 0usize;
    let mut skipped = 0usize;
    for rep in &reports {
        if rep.skipped {
            skipped += 1;
            continue;
        }
        if rep.error.is_some() {
            fail += 1;
        }
        for st in &rep.states {
            if st.outcome == "pass" {
                pass += 1;
            } else {
                fail += 1;
            }
        }
    }
    let text = match config.format {
        Format::Csv => {
            let mut out = String::from(
                "system,status,n,e_numeric,e_analytic,rel_error,nodes,residual_max,orthogonality,outcome\n",
            );
            for rep in &reports {
                if rep.skipped {
                    out.push_str(&format!(
                        "{},{},,,,,,,,skipped\n",
                        rep.id,
                        status_str(rep.status)
                    ));
                    continue;
                }
                for st in &rep.states {
                    out.push_str(&format!(
                        "{},{},{},{},{},{},{},{},{},{}\n",
                        rep.id,
                        status_str(rep.status),
                        st.label,
                        fmt_g(st.result.e_numeric),
                        fmt_g(st.result.e_analytic),
                        fmt_g(st.result.rel_error),
                        st.result.nodes,
                        fmt_g(st.result.residual_max),
                        fmt_g(st.orthogonality),
                        st.outcome,
                    ));
                }
                if let Some(err) = &rep.error {
                    out.push_str(&format!(
                        "{},{},,,,,,,,{}\n",
                        rep.id,
                        status_str(rep.status),
                        csv_quote(&format!("error: {err}"))
                    ));
                }
            }
            out.push_str(&format!(
                "# pass={pass} fail={fail} skipped={skipped} wall_time_s={}\n",
                fmt_g(wall)
            ));
            out
        }
        Format::Json => {
            let systems: Vec<J> = reports
                .iter()
                .map(|rep| {
                    let states: Vec<J> = rep
                        .states
                        .iter()
                        .map(|st| {
                            J::Obj(vec![
                                ("n", jint(st.label)),
                                ("e_numeric", jnum(st.result.e_numeric)),
                                ("e_analytic", jnum(st.result.e_analytic)),
                                ("rel_error", jnum(st.result.rel_error)),
                                ("nodes", jint(st.result.nodes as i64)),
                                ("norm", jnum(st.result.norm)),
                                ("residual_max", jnum(st.result.residual_max)),
                                ("orthogonality", jnum(st.orthogonality)),
                                ("outcome", jstr(st.outcome)),
                            ])
                        })
                        .collect();
                    let mut fields = vec![
                        ("system", jstr(rep.id)),
                        ("status", jstr(status_str(rep.status))),
                        (
                            "outcome",
                            jstr(if rep.skipped {
                                "skipped"
                            } else if rep.error.is_some()
                                || rep.states.iter().any(|s| s.outcome == "fail")
                            {
                                "fail"
                            } else {
                                "pass"
                            }),
                        ),
                        ("states", J::Arr(states)),
                    ];
                    if let Some(err) = &rep.error {
                        fields.push(("error", jstr(err)));
                    }
                    J::Obj(fields)
                })
                .collect();
            J::Obj(vec![
                ("systems", J::Arr(systems)),
                (
                    "summary",
                    J::Obj(vec![
                        ("pass", jint(pass as i64)),
                        ("fail", jint(fail as i64)),
                        ("skipped", jint(skipped as i64)),
                    ]),
                ),
                ("wall_time_s", jnum(wall)),
            ])
            .to_string()
        }
    };
    emit(config, &text)?;
    if fail > 0 {
        return Err(CliError::Verification);
    }
    Ok(())
}

fn cmd_schwartzian_check(g: &str, config: &RunConfig) -> Result<(), CliError> {
    let g = expr::parse(g).map_err(|e| CliError::Usage(format!("cannot parse g: {e}")))?;
    let sym = transform::schwartzian(&g)
        .map_err(|e| CliError::Usage(format!("schwartzian: {e}")))?;
    let mut max_dev = 0.0f64;
    let mut used = 0usize;
    let mut sample_rows = Vec::new();
    for i in 0..50 {
        let r = 0.05 + 1.15 * i as f64 / 49.0;
        let (Ok(s), Ok(fd)) = (
            sym.eval1("r", r),
            transform::schwartzian_numeric(&g, r, 1e-2),
        ) else {
            continue;
        };
        if !s.is_finite() || !fd.is_finite() || fd.abs() > 1e6 {
            continue; // singularity of g or its derivatives at this r
        }
        max_dev = max_dev.max((s - fd).abs());
        used += 1;
        if sample_rows.len() < 5 {
            sample_rows.push((r, s, fd));
        }
    }
    if used == 0 {
        return Err(CliError::Usage(
            "no valid sample points for this g(r)".to_string(),
        ));
    }
    let text = match config.format {
        Format::Csv => {
            let mut out = String::new();
            out.push_str(&format!("schwartzian={sym}\n"));
            for (r, s, fd) in &sample_rows {
                out.push_str(&format!(
                    "r={} symbolic={} fd={}\n",
                    fmt_g(*r),
                    fmt_g(*s),
                    fmt_g(*fd)
                ));
            }
            out.push_str(&format!("points={used}\n"));
            out.push_str(&format!("max_deviation={}\n", fmt_g(max_dev)));
            out
        }
        Format::Json => J::Obj(vec![
            ("schwartzian", jstr(sym.to_string())),
            (
                "samples",
                J::Arr(
                    sample_rows
                        .iter()
                        .map(|(r, s, fd)| {
                            J::Obj(vec![
                                ("r", jnum(*r)),
                                ("symbolic", jnum(*s)),
                                ("finite_difference", jnum(*fd)),
                            ])
                        })
                        .collect(),
                ),
            ),
            ("points", jint(used as i64)),
            ("max_deviation", jnum(max_dev)),
        ])
        .to_string(),
    };
    emit(config, &text)?;
    let _ = std::io::stdout().flush();
    Ok(())
}
