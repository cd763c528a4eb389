//! The `specband` command line.
//!
//! Exit codes: 0 success, 1 failed validation, 2 usage or I/O error,
//! 3 numerical error.

mod svg;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::decay::{
    checked_state_norm, default_n_max, fit_exponent, geometric_grid, DecayFit, NormKind, DEFAULT_T_MIN,
};
use crate::error::Error;
use crate::measure::density_grid;
use crate::model::SpectralModel;
use crate::operator::{FiniteState, JacobiOperator, OperatorConfig};
use crate::propagator::{Method, Propagator, DEFAULT_NODE_BUDGET, DEFAULT_TRUNCATION_CAP};
use crate::spectrum::{AuditReport, Band, EigenvalueInfo};
use crate::validate::{max_difference, validate, AGREEMENT_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable that sets the worker thread count.
pub const THREADS_ENV: &str = "SPECBAND_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Numerical(#[from] Error),
    #[error("validation failed")]
    Validation,
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => EXIT_USAGE,
            CliError::Numerical(_) => EXIT_NUMERICAL,
            CliError::Validation => EXIT_VALIDATION,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Parser)]
#[command(name = "specband", version, about = "Spectra and dispersive decay of periodic Jacobi operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Band edges, gaps and eigenvalues as JSON.
    Spectrum(OperatorArgs),
    /// Spectral density on a grid (CSV) and point masses (JSON).
    Measure(MeasureArgs),
    /// Evolve δ_site and write amplitudes as CSV.
    Evolve(EvolveArgs),
    /// Fit decay exponents to an evolution CSV.
    DecayFit(DecayFitArgs),
    /// Stationary-phase audit and predicted decay exponents as JSON.
    Audit(OperatorArgs),
    /// Run the invariant suite and print a pass/fail table.
    Validate(OperatorArgs),
}

#[derive(Debug, Args)]
struct OperatorArgs {
    /// Operator config, `{"a": [...], "b": [...]}`.
    #[arg(long)]
    config: PathBuf,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[arg(long)]
    config: PathBuf,
    /// Density CSV; point masses go to the same path with extension `masses.json`.
    #[arg(long)]
    out: PathBuf,
    /// Grid points per band.
    #[arg(long, default_value_t = 200)]
    grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Spectral,
    Oracle,
    /// Both methods; the oracle rows go to `<out stem>.oracle.csv`.
    Both,
}

#[derive(Debug, Clone)]
struct TimeGrid(Vec<f64>);

fn parse_times(s: &str) -> std::result::Result<TimeGrid, String> {
    let (kind, rest) = s.split_once(':').ok_or("expected geometric:START,STOP,COUNT or list:T1,T2,...")?;
    let fields: Vec<&str> = rest.split(',').map(str::trim).collect();
    match kind {
        "geometric" => {
            let [start, stop, count] = fields[..] else {
                return Err("geometric grid takes START,STOP,COUNT".into());
            };
            let start = start.parse::<f64>().map_err(|e| format!("START: {e}"))?;
            let stop = stop.parse::<f64>().map_err(|e| format!("STOP: {e}"))?;
            let count = count.parse::<usize>().map_err(|e| format!("COUNT: {e}"))?;
            geometric_grid(start, stop, count).map(TimeGrid).map_err(|e| e.to_string())
        }
        "list" => {
            let times = fields
                .iter()
                .map(|f| f.parse::<f64>().map_err(|e| format!("'{f}': {e}")))
                .collect::<std::result::Result<Vec<_>, _>>()?;
            if times.iter().any(|t| !(*t >= 0.0)) {
                return Err("times must be nonnegative".into());
            }
            Ok(TimeGrid(times))
        }
        other => Err(format!("unknown grid kind '{other}'")),
    }
}

fn parse_norm(s: &str) -> std::result::Result<NormKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
struct EvolveArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// `geometric:START,STOP,COUNT` or `list:T1,T2,...`.
    #[arg(long, value_parser = parse_times)]
    times: TimeGrid,
    #[arg(long, value_enum, default_value = "spectral")]
    method: MethodArg,
    /// Initial state δ_site.
    #[arg(long, default_value_t = 1)]
    site: usize,
    /// Sites written per time; defaults to the light cone of the last time plus 64.
    #[arg(long)]
    n_max: Option<usize>,
    /// Also write an SVG log-log chart of the norms next to the CSV.
    #[arg(long)]
    emit_plot: bool,
    /// Norms drawn in the chart (repeatable).
    #[arg(long = "norm", value_parser = parse_norm)]
    norms: Vec<NormKind>,
    /// Start of the fit window in the chart.
    #[arg(long, default_value_t = DEFAULT_T_MIN)]
    t_min: f64,
    #[arg(long, default_value_t = DEFAULT_NODE_BUDGET)]
    node_budget: usize,
    #[arg(long, default_value_t = DEFAULT_TRUNCATION_CAP)]
    truncation_cap: usize,
}

#[derive(Debug, Args)]
struct DecayFitArgs {
    /// Evolution CSV written by `evolve`.
    #[arg(long)]
    input: PathBuf,
    /// Operator config, used for the predicted exponents.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Norms to fit (repeatable); all three if omitted.
    #[arg(long = "norm", value_parser = parse_norm)]
    norms: Vec<NormKind>,
    #[arg(long, default_value_t = DEFAULT_T_MIN)]
    t_min: f64,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(CliError::Validation) => EXIT_VALIDATION,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let threads: usize = value
        .parse()
        .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got '{value}'")))?;
    // the global pool can be built once per process; later calls keep it
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn dispatch(command: Command) -> CliResult<()> {
    match command {
        Command::Spectrum(args) => spectrum(&args),
        Command::Measure(args) => measure(&args),
        Command::Evolve(args) => evolve(&args),
        Command::DecayFit(args) => decay_fit(&args),
        Command::Audit(args) => audit(&args),
        Command::Validate(args) => validate_cmd(&args),
    }
}

/// A loaded operator config with its model and hash.
struct Loaded {
    hash: String,
    model: SpectralModel,
}

/// SHA-256 of the compact JSON of the config.
pub fn config_hash(config: &OperatorConfig) -> String {
    let json = serde_json::to_string(config).expect("config serializes");
    hex::encode(Sha256::digest(json.as_bytes()))
}

fn load(path: &Path) -> CliResult<Loaded> {
    let text = std::fs::read_to_string(path).map_err(io_err(path))?;
    let config: OperatorConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: invalid operator config: {e}", path.display())))?;
    let op = JacobiOperator::from_config(&config)?;
    if let Some(notice) = op.reduction_notice() {
        eprintln!("note: {notice}");
    }
    Ok(Loaded { hash: config_hash(&config), model: SpectralModel::new(&op)? })
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(io_err(path)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>")))
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("output serializes");
    text.push('\n');
    emit(out, &text)
}

#[derive(Serialize)]
struct SpectrumOutput<'a> {
    config_hash: &'a str,
    period: usize,
    edges: &'a [f64],
    bands: &'a [Band],
    critical_points: &'a [f64],
    eigenvalues: &'a [EigenvalueInfo],
}

fn spectrum(args: &OperatorArgs) -> CliResult<()> {
    let Loaded { hash, model } = load(&args.config)?;
    let b = &model.bands;
    emit_json(
        args.out.as_deref(),
        &SpectrumOutput {
            config_hash: &hash,
            period: model.period(),
            edges: &b.edges,
            bands: &b.bands,
            critical_points: &b.critical_points,
            eigenvalues: &model.eigenvalues,
        },
    )
}

#[derive(Serialize)]
struct MassesOutput<'a> {
    config_hash: &'a str,
    masses: &'a [EigenvalueInfo],
    continuous_mass: f64,
    total_mass: f64,
}

fn measure(args: &MeasureArgs) -> CliResult<()> {
    if args.grid < 2 {
        return Err(CliError::Usage("--grid must be at least 2".into()));
    }
    let Loaded { hash, model } = load(&args.config)?;
    let mut w = create(&args.out)?;
    writeln!(w, "# config_hash={hash}").map_err(io_err(&args.out))?;
    let mut csv = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| CliError::Usage(format!("{}: {e}", args.out.display()));
    csv.write_record(["x", "band_index", "w"]).map_err(csv_err)?;
    for (x, band, weight) in density_grid(&model.monodromy, &model.bands, args.grid) {
        csv.write_record([x.to_string(), band.to_string(), weight.to_string()]).map_err(csv_err)?;
    }
    csv.flush().map_err(io_err(&args.out))?;

    let masses_path = args.out.with_extension("masses.json");
    emit_json(
        Some(&masses_path),
        &MassesOutput {
            config_hash: &hash,
            masses: &model.eigenvalues,
            continuous_mass: model.measure.continuous_mass(),
            total_mass: model.measure.total_mass(),
        },
    )
}

/// Header line of an evolution CSV: `# key=value key=value ...`.
fn evolution_header(hash: &str, method: Method, site: usize, n_max: usize) -> String {
    format!("# config_hash={hash} method={method} support={site} n_max={n_max}")
}

fn write_evolution(path: &Path, header: &str, times: &[f64], rows: &[Vec<Complex64>]) -> CliResult<()> {
    let mut w = create(path)?;
    writeln!(w, "{header}").map_err(io_err(path))?;
    let mut csv = csv::Writer::from_writer(w);
    let csv_err = |e: csv::Error| CliError::Usage(format!("{}: {e}", path.display()));
    csv.write_record(["t", "n", "re_psi", "im_psi", "abs_psi"]).map_err(csv_err)?;
    for (t, row) in times.iter().zip(rows) {
        for (i, z) in row.iter().enumerate() {
            csv.write_record([
                t.to_string(),
                (i + 1).to_string(),
                z.re.to_string(),
                z.im.to_string(),
                z.norm().to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    csv.flush().map_err(io_err(path))
}

fn evolve(args: &EvolveArgs) -> CliResult<()> {
    if args.site == 0 {
        return Err(CliError::Usage("--site counts from 1".into()));
    }
    let Loaded { hash, model } = load(&args.config)?;
    let times = &args.times.0;
    let u = FiniteState::delta(args.site);
    let t_last = times.iter().copied().fold(0.0, f64::max);
    let n_max = args.n_max.unwrap_or_else(|| default_n_max(&model, &u, t_last));
    let p = Propagator::new(&model).with_node_budget(args.node_budget).with_truncation_cap(args.truncation_cap);

    let primary = match args.method {
        MethodArg::Oracle => Method::Oracle,
        _ => Method::Spectral,
    };
    let result = p.evolve(primary, &u, times, n_max)?;
    write_evolution(&args.out, &evolution_header(&hash, primary, args.site, n_max), times, &result.amplitudes)?;

    let mut agreement_failed = false;
    if args.method == MethodArg::Both {
        let oracle = p.evolve(Method::Oracle, &u, times, n_max)?;
        let path = args.out.with_extension("oracle.csv");
        write_evolution(&path, &evolution_header(&hash, Method::Oracle, args.site, n_max), times, &oracle.amplitudes)?;
        let diff =
            result.amplitudes.iter().zip(&oracle.amplitudes).map(|(s, o)| max_difference(s, o)).fold(0.0, f64::max);
        eprintln!("max |spectral − oracle| = {diff:.3e} (tolerance {AGREEMENT_TOL:.0e})");
        agreement_failed = !(diff <= AGREEMENT_TOL);
    }

    if args.emit_plot {
        let kinds = if args.norms.is_empty() { NormKind::ALL.to_vec() } else { args.norms.clone() };
        let audit = model.audit();
        let series = kinds
            .iter()
            .map(|&kind| {
                let norms: Vec<f64> = result.amplitudes.iter().map(|r| crate::decay::state_norm(r, kind)).collect();
                let fit = match fit_exponent(times, &norms, args.t_min) {
                    Ok(f) => Some((f.slope, f.intercept)),
                    Err(e) => {
                        eprintln!("note: no fitted line for {kind}: {e}");
                        None
                    }
                };
                svg::Series {
                    label: kind.to_string(),
                    times: times.clone(),
                    norms,
                    fit,
                    predicted: kind.predicted(&audit),
                }
            })
            .collect::<Vec<_>>();
        let title = format!("{} norms, u = δ_{}, period {}", primary, args.site, model.period());
        let path = args.out.with_extension("svg");
        emit(Some(&path), &svg::loglog_chart(&title, &series))?;
    }
    if agreement_failed {
        Err(CliError::Validation)
    } else {
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
struct EvolutionRow {
    t: f64,
    n: usize,
    re_psi: f64,
    im_psi: f64,
}

/// Parsed evolution CSV: header fields and one amplitude row per time.
struct EvolutionFile {
    header: BTreeMap<String, String>,
    times: Vec<f64>,
    rows: Vec<Vec<Complex64>>,
}

fn read_evolution(path: &Path) -> CliResult<EvolutionFile> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    reader.read_line(&mut first).map_err(io_err(path))?;
    let bad = |msg: String| CliError::Usage(format!("{}: {msg}", path.display()));
    let header: BTreeMap<String, String> = first
        .strip_prefix('#')
        .ok_or_else(|| bad("missing '# config_hash=...' header line".into()))?
        .split_whitespace()
        .filter_map(|kv| kv.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect();

    let mut times: Vec<f64> = Vec::new();
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (line, rec) in csv::Reader::from_reader(reader).deserialize::<EvolutionRow>().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if times.last() != Some(&rec.t) {
            times.push(rec.t);
            rows.push(Vec::new());
        }
        let row = rows.last_mut().expect("row pushed above");
        if rec.n != row.len() + 1 {
            return Err(bad(format!("record {}: expected n = {}, found {}", line + 1, row.len() + 1, rec.n)));
        }
        row.push(Complex64::new(rec.re_psi, rec.im_psi));
    }
    if rows.is_empty() {
        return Err(bad("no data rows".into()));
    }
    Ok(EvolutionFile { header, times, rows })
}

#[derive(Serialize)]
struct FitOutput {
    kind: NormKind,
    slope: f64,
    /// 95% confidence half-width of the slope.
    ci: f64,
    predicted: Option<f64>,
    pass: bool,
    intercept: f64,
    residual: f64,
    points: usize,
}

impl From<&DecayFit> for FitOutput {
    fn from(f: &DecayFit) -> Self {
        Self {
            kind: f.kind,
            slope: f.fit.slope,
            ci: f.fit.half_width,
            predicted: f.predicted,
            pass: f.pass,
            intercept: f.fit.intercept,
            residual: f.fit.residual,
            points: f.fit.points,
        }
    }
}

fn decay_fit(args: &DecayFitArgs) -> CliResult<()> {
    let data = read_evolution(&args.input)?;
    let Loaded { hash, model } = load(&args.config)?;
    if let Some(h) = data.header.get("config_hash") {
        if *h != hash {
            return Err(CliError::Usage(format!(
                "{} was generated from a different operator (config hash {h})",
                args.input.display()
            )));
        }
    }
    let support = match data.header.get("support") {
        Some(s) => s.parse().map_err(|_| CliError::Usage(format!("bad support '{s}' in header")))?,
        None => 1,
    };
    let audit: AuditReport = model.audit();
    let kinds = if args.norms.is_empty() { NormKind::ALL.to_vec() } else { args.norms.clone() };
    let mut fits = Vec::new();
    for kind in kinds {
        let norms = data
            .times
            .iter()
            .zip(&data.rows)
            .map(|(&t, row)| checked_state_norm(&model, row, support, t, kind))
            .collect::<crate::Result<Vec<_>>>()?;
        let fit = DecayFit::new(kind, data.times.clone(), norms, args.t_min, kind.predicted(&audit))?;
        fits.push(FitOutput::from(&fit));
    }
    emit_json(args.out.as_deref(), &fits)
}

#[derive(Serialize)]
struct AuditOutput<'a> {
    config_hash: &'a str,
    #[serde(flatten)]
    report: &'a AuditReport,
}

fn audit(args: &OperatorArgs) -> CliResult<()> {
    let Loaded { hash, model } = load(&args.config)?;
    emit_json(args.out.as_deref(), &AuditOutput { config_hash: &hash, report: &model.audit() })
}

fn validate_cmd(args: &OperatorArgs) -> CliResult<()> {
    let Loaded { hash, model } = load(&args.config)?;
    let report = validate(&model)?;
    let text = format!("config_hash {hash}\n{report}\n");
    emit(args.out.as_deref(), &text)?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::Validation)
    }
}
