//! Command-line driver for `nilgeom`: argument parsing, input loading and reports.
//!
//! Exit codes: 0 success, 2 validation failure, 3 numerical tolerance breach,
//! 4 input error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use nilgeom::curvature::{is_flat, pair_table, TableRow};
use nilgeom::decomposition::{witt_decompose, WittFrame, DEFAULT_RANK_TOL};
use nilgeom::geodesic::{chebyshev_times, compare, ClosedForm, Comparison, GeodesicIvp};
use nilgeom::io;
use nilgeom::lattice::{flat_torus_spectrum, standard_generators, torus_data, LatticeSpec};
use nilgeom::ode::OdeOptions;
use nilgeom::spectrum::{
    flat_group_spectrum, flat_record_ivp, spectrum_partition, translated_geodesic, translated_spectrum, translation_check_with, FlatSpectrum,
    PeriodRecord,
};
use nilgeom::{bundled, sampling, MetricAlgebra, Rational, Scalar};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_TOLERANCE: u8 = 3;
pub const EXIT_INPUT: u8 = 4;

/// Default seed for every sampled check.
pub const DEFAULT_SEED: u64 = 20_240_611;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Tolerance(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Tolerance(_) => EXIT_TOLERANCE,
        }
    }
}

impl From<nilgeom::Error> for CliError {
    fn from(e: nilgeom::Error) -> Self {
        use nilgeom::Error as E;
        match e {
            E::Parse(_) | E::DimensionMismatch { .. } => CliError::Input(e.to_string()),
            E::StepSizeUnderflow { .. } | E::IntegratorFailure(_) => CliError::Tolerance(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisChoice {
    Ambient,
    Adapted,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub null: f64,
    pub rank: f64,
    pub fix: f64,
    pub ode: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { null: nilgeom::algebra::DEFAULT_NULL_TOL, rank: DEFAULT_RANK_TOL, fix: nilgeom::spectrum::TAU_FIX, ode: 1e-13 }
    }
}

#[derive(Debug, Parser)]
#[command(name = "nilgeom", version, about = "Geometry of pseudoriemannian 2-step nilpotent Lie groups")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Report format.
    #[arg(long, value_enum, default_value = "json", global = true)]
    pub format: Format,
    /// Arithmetic for validation, decomposition and curvature.
    #[arg(long, value_enum, default_value = "exact", global = true)]
    pub mode: Mode,
    /// Write the report here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    pub seed: u64,
    /// Null classification tolerance (float mode).
    #[arg(long, default_value_t = nilgeom::algebra::DEFAULT_NULL_TOL, global = true)]
    pub tau_null: f64,
    /// Relative singular value cutoff for ker J.
    #[arg(long, default_value_t = DEFAULT_RANK_TOL, global = true)]
    pub tau_rank: f64,
    /// Tolerance of the translation criterion.
    #[arg(long, default_value_t = nilgeom::spectrum::TAU_FIX, global = true)]
    pub tau_fix: f64,
    /// Relative and absolute tolerance of the numerical oracle.
    #[arg(long, default_value_t = 1e-13, global = true)]
    pub ode_tol: f64,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check antisymmetry, Jacobi, 2-step, the inner product and rationality.
    Validate { algebra: String },
    /// Witt-adapted basis U, Z, V, E with signs and the involution.
    Decompose { algebra: String },
    /// Curvature numerators and sectional curvatures of all basis planes.
    Curvature {
        algebra: String,
        #[arg(long, value_enum, default_value = "ambient")]
        basis: BasisChoice,
    },
    /// Closed-form geodesic samples.
    Geodesic {
        algebra: String,
        ivp: PathBuf,
        /// Comma-separated sample times; overrides times in the IVP file.
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
        /// Also integrate numerically and report the largest deviation.
        #[arg(long)]
        compare_oracle: bool,
        /// Largest accepted deviation with --compare-oracle.
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Periods of lattice elements up to an exponent bound.
    Spectrum {
        algebra: String,
        /// Lattice JSON, or `standard` for the bundled algebra's basis lattice.
        lattice: String,
        #[arg(long, default_value_t = 1)]
        bound: u32,
        /// Complete spectrum for [n,n] ⊆ U and E = 0; fails otherwise.
        #[arg(long)]
        flat_case: bool,
        /// Flat spectra of the fiber and base tori.
        #[arg(long)]
        torus: bool,
        /// Split periods into central and noncentral classes.
        #[arg(long)]
        partition: bool,
        /// Also write the CSV histogram of periods here.
        #[arg(long)]
        histogram: Option<PathBuf>,
    },
    /// Closed form against the numerical oracle on random IVPs (base and velocity in [-1,1]^n).
    Compare {
        algebra: String,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 10.0)]
        t_max: f64,
        /// Chebyshev sample points per IVP.
        #[arg(long, default_value_t = 33)]
        points: usize,
        /// Largest accepted componentwise deviation.
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
        /// Compare |Δ|/(1 + |value|) instead of |Δ|.
        #[arg(long)]
        scaled: bool,
    },
    /// List bundled algebras, or print one as JSON.
    Bundled {
        name: Option<String>,
        /// Print the standard lattice instead of the algebra.
        #[arg(long)]
        lattice: bool,
    },
}

/// Everything a run needs, independent of how it was parsed.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub format: Format,
    pub mode: Mode,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub tol: Tolerances,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig { command, format: Format::Json, mode: Mode::Exact, output: None, seed: DEFAULT_SEED, tol: Tolerances::default() }
    }

    pub fn from_cli(cli: Cli) -> CliResult<Self> {
        let g = cli.global;
        let tol = Tolerances { null: g.tau_null, rank: g.tau_rank, fix: g.tau_fix, ode: g.ode_tol };
        let cfg = RunConfig { command: cli.command, format: g.format, mode: g.mode, output: g.output, seed: g.seed, tol };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> CliResult<()> {
        let t = &self.tol;
        if [t.null, t.rank, t.fix, t.ode].iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(CliError::Input("tolerances must be positive".into()));
        }
        if let Command::Spectrum { bound: 0, .. } = self.command {
            return Err(CliError::Input("bound must be at least 1".into()));
        }
        Ok(())
    }
}

/// Report text and the exit code it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: u8,
    pub report: String,
    /// Short diagnostics for standard error.
    pub notes: Vec<String>,
}

impl Outcome {
    fn new(code: u8, report: String) -> Self {
        Outcome { code, report, notes: Vec::new() }
    }

    fn ok(report: String) -> Self {
        Self::new(EXIT_OK, report)
    }
}

/// Runs one command. The report goes to `config.output` when set and is also
/// returned; extra files (the spectrum histogram) are written directly.
pub fn run(config: &RunConfig) -> CliResult<Outcome> {
    config.check()?;
    let outcome = match &config.command {
        Command::Validate { algebra } => validate(config, algebra)?,
        Command::Decompose { algebra } => decompose(config, algebra)?,
        Command::Curvature { algebra, basis } => curvature(config, algebra, *basis)?,
        Command::Geodesic { algebra, ivp, times, compare_oracle, tolerance } => {
            geodesic(config, algebra, ivp, times.as_deref(), *compare_oracle, *tolerance)?
        }
        Command::Spectrum { algebra, lattice, bound, flat_case, torus, partition, histogram } => {
            spectrum(config, algebra, lattice, *bound, *flat_case, *torus, *partition, histogram.as_deref())?
        }
        Command::Compare { algebra, samples, t_max, points, tolerance, scaled } => {
            compare_cmd(config, algebra, *samples, *t_max, *points, *tolerance, *scaled)?
        }
        Command::Bundled { name, lattice } => bundled_cmd(name.as_deref(), *lattice)?,
    };
    if let Some(path) = &config.output {
        write_file(path, &outcome.report)?;
    }
    Ok(outcome)
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

/// Loads `bundled:NAME` or a JSON file.
pub fn load_algebra(source: &str) -> CliResult<MetricAlgebra<Rational>> {
    if let Some(name) = source.strip_prefix("bundled:") {
        return bundled::lookup(name).ok_or_else(|| CliError::Input(format!("unknown bundled algebra {name:?}")));
    }
    let text = read_file(Path::new(source))?;
    io::parse_algebra(&text).map_err(|e| CliError::Input(format!("{source}: {e}")))
}

/// Loads and rejects structurally invalid algebras.
fn load_valid(source: &str) -> CliResult<MetricAlgebra<Rational>> {
    let alg = load_algebra(source)?;
    let report = alg.validate();
    if !report.is_valid() {
        return Err(CliError::Validation(format!("invalid algebra: {}", report.failures.join("; "))));
    }
    Ok(alg)
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

fn csv_text<R: Serialize>(rows: &[R]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Input(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn csv_records(header: &[String], rows: &[Vec<String>]) -> CliResult<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::Input(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| CliError::Input(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Input(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

fn validate(config: &RunConfig, source: &str) -> CliResult<Outcome> {
    let alg = load_algebra(source)?;
    let report = match config.mode {
        Mode::Exact => alg.validate(),
        Mode::Float => alg.to_float().validate(),
    };
    let code = if report.is_valid() { EXIT_OK } else { EXIT_VALIDATION };
    let text = match config.format {
        Format::Json => pretty(&json!({ "algebra": source, "valid": report.is_valid(), "report": report })),
        Format::Csv => {
            let checks = [
                ("antisymmetric", report.antisymmetric),
                ("jacobi", report.jacobi),
                ("two_step", report.two_step),
                ("gram_symmetric", report.gram_symmetric),
                ("gram_nondegenerate", report.gram_nondegenerate),
                ("rational", report.rational),
                ("nonabelian", report.nonabelian),
            ];
            let rows: Vec<Vec<String>> = checks.iter().map(|(k, v)| vec![k.to_string(), v.to_string()]).collect();
            csv_records(&["check".into(), "passed".into()], &rows)?
        }
    };
    Ok(Outcome::new(code, text))
}

fn frame_labels<S: Scalar>(frame: &WittFrame<S>) -> Vec<String> {
    let mut out = Vec::new();
    for (name, len) in [("u", frame.dim_u()), ("z", frame.dim_z()), ("v", frame.dim_u()), ("e", frame.dim_e())] {
        out.extend((1..=len).map(|i| format!("{name}{i}")));
    }
    out
}

fn frame_report<S: Scalar>(config: &RunConfig, frame: &WittFrame<S>) -> CliResult<String> {
    match config.format {
        Format::Json => {
            let inv = frame.involution_matrix();
            let involution: Vec<Vec<String>> = inv.row_iter().map(|r| r.iter().map(io::scalar_string).collect()).collect();
            Ok(pretty(&json!({
                "dims": { "u": frame.dim_u(), "z": frame.dim_z(), "v": frame.dim_u(), "e": frame.dim_e() },
                "frame": io::frame_to_value(frame),
                "involution": involution,
            })))
        }
        Format::Csv => {
            let n = frame.dim();
            let mut header = vec!["block".to_string(), "index".into(), "square".into()];
            header.extend((0..n).map(|i| format!("c{i}")));
            let mut rows = Vec::new();
            let mut push = |block: &str, vs: &[DVector<S>], squares: Vec<String>| {
                for (i, (v, sq)) in vs.iter().zip(squares).enumerate() {
                    let mut row = vec![block.to_string(), i.to_string(), sq];
                    row.extend(v.iter().map(io::scalar_string));
                    rows.push(row);
                }
            };
            push("U", &frame.u, vec!["0".into(); frame.dim_u()]);
            push("Z", &frame.z, frame.z_norms.iter().map(io::scalar_string).collect());
            push("V", &frame.v, vec!["0".into(); frame.dim_u()]);
            push("E", &frame.e, frame.e_norms.iter().map(io::scalar_string).collect());
            csv_records(&header, &rows)
        }
    }
}

fn decompose(config: &RunConfig, source: &str) -> CliResult<Outcome> {
    let alg = load_valid(source)?;
    let frame = witt_decompose(&alg)?;
    let text = match config.mode {
        Mode::Exact => frame_report(config, &frame)?,
        Mode::Float => frame_report(config, &frame.to_float())?,
    };
    Ok(Outcome::ok(text))
}

fn curvature(config: &RunConfig, source: &str, basis: BasisChoice) -> CliResult<Outcome> {
    let alg = load_valid(source)?;
    let (vectors, labels) = match basis {
        BasisChoice::Ambient => (alg.basis(), alg.labels()),
        BasisChoice::Adapted => {
            let frame = witt_decompose(&alg)?;
            let vs: Vec<DVector<Rational>> = frame.u.iter().chain(&frame.z).chain(&frame.v).chain(&frame.e).cloned().collect();
            (vs, frame_labels(&frame))
        }
    };
    let (rows, flat): (Vec<TableRow>, bool) = match config.mode {
        Mode::Exact => (pair_table(&alg, &vectors, &labels, 0.0), is_flat(&alg, 0.0)),
        Mode::Float => {
            let af = alg.to_float();
            let vf: Vec<DVector<f64>> = vectors.iter().map(|v| v.map(|c| c.to_f64())).collect();
            (pair_table(&af, &vf, &labels, config.tol.null), is_flat(&af, config.tol.null))
        }
    };
    let text = match config.format {
        Format::Json => pretty(&json!({ "basis": labels, "flat": flat, "rows": rows })),
        Format::Csv => csv_text(&rows)?,
    };
    Ok(Outcome::ok(text))
}

fn float_setup(alg: &MetricAlgebra<Rational>) -> CliResult<(MetricAlgebra<f64>, WittFrame<f64>)> {
    Ok((alg.to_float(), witt_decompose(alg)?.to_float()))
}

fn geodesic(config: &RunConfig, source: &str, ivp_path: &Path, times: Option<&[f64]>, with_oracle: bool, tolerance: f64) -> CliResult<Outcome> {
    let alg = load_valid(source)?;
    let (af, ff) = float_setup(&alg)?;
    let file = io::parse_ivp(&read_file(ivp_path)?, &ff).map_err(|e| CliError::Input(format!("{}: {e}", ivp_path.display())))?;
    let times: Vec<f64> = times.map(<[f64]>::to_vec).or(file.times.clone()).unwrap_or_else(|| chebyshev_times(0.0, 10.0, 33));
    if times.iter().any(|t| !t.is_finite()) {
        return Err(CliError::Input("times must be finite".into()));
    }
    let cf = ClosedForm::new(&af, &ff, &file.ivp, config.tol.rank)?;
    let states = cf.sample(&times);
    let comparison = if with_oracle { Some(compare(&af, &ff, &file.ivp, &times, config.tol.rank, &OdeOptions::with_tol(config.tol.ode))?) } else { None };
    let breach = comparison.as_ref().is_some_and(|c| !(c.worst() <= tolerance));
    let text = match config.format {
        Format::Json => pretty(&json!({
            "ivp": io::ivp_to_value(&file.ivp, None),
            "states": states,
            "comparison": comparison,
            "tolerance": with_oracle.then_some(tolerance),
        })),
        Format::Csv => {
            let n = af.dim();
            let mut header = vec!["t".to_string()];
            header.extend((0..n).map(|i| format!("log{i}")));
            header.extend((0..n).map(|i| format!("vel{i}")));
            let rows: Vec<Vec<String>> = states
                .iter()
                .map(|s| std::iter::once(s.t).chain(s.log.iter().copied()).chain(s.velocity.iter().copied()).map(|x| x.to_string()).collect())
                .collect();
            csv_records(&header, &rows)?
        }
    };
    let mut out = Outcome::new(if breach { EXIT_TOLERANCE } else { EXIT_OK }, text);
    if let Some(c) = &comparison {
        out.notes.push(format!("max deviation from the oracle: {:e} (tolerance {tolerance:e})", c.worst()));
    }
    Ok(out)
}

fn load_lattice(source: &str, algebra_source: &str, alg: &MetricAlgebra<Rational>) -> CliResult<(MetricAlgebra<Rational>, LatticeSpec)> {
    if source == "standard" {
        return Ok(nilgeom::lattice::build_lattice(alg, &standard_generators(alg))?);
    }
    let text = read_file(Path::new(source))?;
    io::parse_lattice(&text, alg).map_err(|e| match e {
        nilgeom::Error::Parse(_) | nilgeom::Error::DimensionMismatch { .. } => CliError::Input(format!("{source}: {e}")),
        other => CliError::Validation(format!("lattice {source} over {algebra_source}: {other}")),
    })
}

/// Direct sampled check `φγ(t) = γ(t + ω)` on every record's geodesic.
fn certify(config: &RunConfig, alg: &MetricAlgebra<Rational>, frame: &WittFrame<Rational>, records: &[PeriodRecord], flat: bool) -> CliResult<(usize, f64)> {
    let (af, ff) = (alg.to_float(), frame.to_float());
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for r in records {
        let ivp = if flat { flat_record_ivp(&ff, r) } else { translated_geodesic(alg, frame, &r.phi, 0.0)?.ivp(&ff) };
        let cf = ClosedForm::new(&af, &ff, &ivp, config.tol.rank)?;
        let check = translation_check_with(&af, &ff, &cf, &r.phi.to_float(), r.omega, config.tol.fix, nilgeom::spectrum::DIRECT_TOL);
        worst = worst.max(check.direct_residual);
        if !check.direct {
            failures += 1;
        }
    }
    Ok((failures, worst))
}

#[derive(Serialize)]
struct HistogramRow {
    omega_squared: String,
    omega: f64,
    count: usize,
    central: usize,
}

fn histogram(records: &[PeriodRecord]) -> Vec<HistogramRow> {
    let mut rows: Vec<HistogramRow> = Vec::new();
    for r in records {
        match rows.last_mut() {
            Some(last) if last.omega_squared == io::scalar_string(&r.omega_squared) => {
                last.count += 1;
                last.central += usize::from(r.central);
            }
            _ => rows.push(HistogramRow {
                omega_squared: io::scalar_string(&r.omega_squared),
                omega: r.omega,
                count: 1,
                central: usize::from(r.central),
            }),
        }
    }
    rows
}

#[allow(clippy::too_many_arguments)]
fn spectrum(
    config: &RunConfig,
    source: &str,
    lattice_source: &str,
    bound: u32,
    flat_case: bool,
    torus: bool,
    partition: bool,
    histogram_path: Option<&Path>,
) -> CliResult<Outcome> {
    let alg = load_valid(source)?;
    let (exact, lattice) = load_lattice(lattice_source, source, &alg)?;
    let frame = witt_decompose(&exact)?;
    let spec: FlatSpectrum = if flat_case { flat_group_spectrum(&exact, &frame, &lattice, bound)? } else { translated_spectrum(&exact, &frame, &lattice, bound)? };
    let (failures, worst) = certify(config, &exact, &frame, &spec.records, flat_case)?;
    let hist = histogram(&spec.records);
    if let Some(p) = histogram_path {
        write_file(p, &csv_text(&hist)?)?;
    }
    let text = match config.format {
        Format::Csv => csv_text(&hist)?,
        Format::Json => {
            let mut out = json!({
                "method": if flat_case { "flat-case" } else { "translated-geodesics" },
                "complete_up_to_bound": flat_case,
                "bound": bound,
                "records": spec.records.iter().map(io::record_to_value).collect::<Vec<_>>(),
                "null_translations": spec.null_translations,
                "non_translating": spec.non_translating,
                "certification": { "failures": failures, "worst_direct_residual": worst },
                "lattice": io::lattice_to_value(&lattice),
            });
            if torus {
                out["torus"] = torus_report(&exact, &frame, &lattice, bound)?;
            }
            if partition {
                out["partition"] = io::partition_to_value(&spectrum_partition(&exact, &lattice, &spec.records));
            }
            pretty(&out)
        }
    };
    let code = if failures > 0 { EXIT_TOLERANCE } else { EXIT_OK };
    let mut out = Outcome::new(code, text);
    if failures > 0 {
        out.notes.push(format!("{failures} records failed the direct translation check (worst residual {worst:e})"));
    }
    Ok(out)
}

fn torus_report(alg: &MetricAlgebra<Rational>, frame: &WittFrame<Rational>, lattice: &LatticeSpec, bound: u32) -> CliResult<Value> {
    let t = torus_data(alg, frame, lattice)?;
    let unit = |d: usize| (0..d).map(|i| DVector::<Rational>::from_fn(d, |j, _| Rational::from_i64(i64::from(i == j)))).collect::<Vec<_>>();
    let side = |degenerate: bool, d: usize, gram: &nalgebra::DMatrix<Rational>| -> CliResult<Value> {
        if degenerate || d == 0 {
            return Ok(Value::Null);
        }
        Ok(io::torus_spectrum_to_value(&flat_torus_spectrum(&unit(d), gram, bound)?))
    };
    Ok(json!({
        "data": io::torus_to_value(&t),
        "fiber_spectrum": side(t.fiber_degenerate, t.dim_fiber, &t.fiber_gram)?,
        "base_spectrum": side(t.base_degenerate || !t.base_flat, t.dim_base, &t.base_gram)?,
    }))
}

#[derive(Serialize)]
struct CompareRow {
    sample: usize,
    max_position_deviation: f64,
    max_velocity_deviation: f64,
    max_scaled_deviation: f64,
    max_magnitude: f64,
    speed_drift: f64,
    scaled_speed_drift: f64,
    closed_form_speed_drift: f64,
    center_integral_drift: f64,
    v_rate_drift: f64,
    samples: usize,
}

impl CompareRow {
    fn new(sample: usize, c: &Comparison) -> Self {
        CompareRow {
            sample,
            max_position_deviation: c.max_position_deviation,
            max_velocity_deviation: c.max_velocity_deviation,
            max_scaled_deviation: c.max_scaled_deviation,
            max_magnitude: c.max_magnitude,
            speed_drift: c.speed_drift,
            scaled_speed_drift: c.scaled_speed_drift,
            closed_form_speed_drift: c.closed_form_speed_drift,
            center_integral_drift: c.center_integral_drift,
            v_rate_drift: c.v_rate_drift,
            samples: c.samples,
        }
    }
}

fn compare_cmd(config: &RunConfig, source: &str, samples: usize, t_max: f64, points: usize, tolerance: f64, scaled: bool) -> CliResult<Outcome> {
    if !(t_max.is_finite() && t_max > 0.0) || points < 2 {
        return Err(CliError::Input("t-max must be positive and points at least 2".into()));
    }
    let alg = load_valid(source)?;
    let (af, ff) = float_setup(&alg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let times = chebyshev_times(0.0, t_max, points);
    let opts = OdeOptions::with_tol(config.tol.ode);
    let mut rows = Vec::with_capacity(samples);
    for sample in 0..samples {
        let ivp: GeodesicIvp = sampling::box_ivp(&mut rng, &ff);
        let c = compare(&af, &ff, &ivp, &times, config.tol.rank, &opts)?;
        rows.push((CompareRow::new(sample, &c), c));
    }
    let metric = |c: &Comparison| if scaled { c.max_scaled_deviation } else { c.worst() };
    let worst = rows.iter().map(|(_, c)| metric(c)).fold(0.0, f64::max);
    let speed = rows.iter().map(|(_, c)| c.speed_drift).fold(0.0, f64::max);
    let code = if worst <= tolerance { EXIT_OK } else { EXIT_TOLERANCE };
    let text = match config.format {
        Format::Json => pretty(&json!({
            "algebra": source,
            "samples": samples,
            "seed": config.seed,
            "scaled": scaled,
            "max_deviation": worst,
            "max_speed_drift": speed,
            "tolerance": tolerance,
            "passed": code == EXIT_OK,
        })),
        Format::Csv => csv_text(&rows.iter().map(|(r, _)| r).collect::<Vec<_>>())?,
    };
    let mut out = Outcome::new(code, text);
    if code != EXIT_OK {
        out.notes.push(format!("max deviation {worst:e} exceeds {tolerance:e}"));
    }
    Ok(out)
}

fn bundled_cmd(name: Option<&str>, lattice: bool) -> CliResult<Outcome> {
    let Some(name) = name else {
        let mut names: Vec<String> = bundled::catalogue().into_iter().map(|(n, _)| n).collect();
        names.push("abelian-N".into());
        names.push("strictly-upper4".into());
        return Ok(Outcome::ok(names.join("\n") + "\n"));
    };
    let alg = bundled::lookup(name).ok_or_else(|| CliError::Input(format!("unknown bundled algebra {name:?}")))?;
    if lattice {
        let (_, lat) = nilgeom::lattice::build_lattice(&alg, &standard_generators(&alg))?;
        return Ok(Outcome::ok(io::lattice_to_json(&lat) + "\n"));
    }
    Ok(Outcome::ok(io::algebra_to_json(&alg) + "\n"))
}
