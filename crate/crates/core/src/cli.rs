//! Command-line front end: `tau`, `fit`, `simulate`, `slice` and `report`.
//!
//! Every failure maps to a stable exit code (see [`CliError::code`]).

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bicop::{default_candidates, Criterion, Family, Rotation};
use crate::dependence::tau_matrix;
use crate::error::Error;
use crate::fmt_f64;
use crate::marginals::{
    anderson_darling, gld_fit_starship, johnson_fit_auto, pit, pseudo_observations, MarginalModel,
};
use crate::vine::{
    classify_structure, density_slice, deserialize, fit_vine, report, report_csv, serialize, simulate,
    tree_summary, FitOptions, FixPolicy, Margins, VineModel, MIN_VINE_OBS,
};

pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_ARITY: i32 = 3;
pub const EXIT_MARGIN: i32 = 4;
pub const EXIT_VARIABLE: i32 = 5;
pub const EXIT_UNSUPPORTED: i32 = 6;

/// A failed command: exit code plus message.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }

    fn malformed(message: impl Into<String>) -> Self {
        Self::new(EXIT_MALFORMED, message)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "vinecop", version, about = "Vine copula fitting, simulation and density slices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pairwise sample Kendall's tau matrix.
    Tau(TauArgs),
    /// Fit margins and a vine copula; writes the model, edge report and margin diagnostics.
    Fit(FitArgs),
    /// Draw a sample from a model file.
    Simulate(SimulateArgs),
    /// Joint density of two variables on a grid, the others held at their medians.
    Slice(SliceArgs),
    /// Edge report and per-tree summary of a model file.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct TauArgs {
    /// CSV with a header row.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MarginMode {
    Gld,
    Johnson,
    Pseudo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Aic,
    Bic,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with a header row.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = MarginMode::Gld)]
    pub margins: MarginMode,
    #[arg(long, value_enum, default_value_t = CriterionArg::Aic)]
    pub criterion: CriterionArg,
    /// Trees deeper than this get the independence copula.
    #[arg(long)]
    pub trunc_level: Option<usize>,
    /// Comma-separated candidates: family names (all rotations) or labels like `Clayton_90`.
    #[arg(long, value_delimiter = ',')]
    pub families: Option<Vec<String>>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Model file written by `fit`.
    #[arg(long, alias = "model")]
    pub input: PathBuf,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
    #[arg(long, short = 'n', default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    /// Model file written by `fit`.
    #[arg(long, alias = "model")]
    pub input: PathBuf,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
    #[arg(long)]
    pub var_i: String,
    #[arg(long)]
    pub var_j: String,
    /// Grid points per axis.
    #[arg(long, default_value_t = 50)]
    pub grid: usize,
    /// `lo,hi` for the first variable; defaults to its 1%..99% quantiles.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub x_range: Option<Vec<f64>>,
    /// `lo,hi` for the second variable.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub y_range: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Model file written by `fit`.
    #[arg(long, alias = "model")]
    pub input: PathBuf,
    #[arg(long, default_value = ".")]
    pub output_dir: PathBuf,
}

/// Parse `args` (program name first) and run; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_MALFORMED } else { 0 };
        }
    };
    match run(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            log::error!("{e}");
            e.code
        }
    }
}

pub fn run(command: &Command) -> CliResult<()> {
    match command {
        Command::Tau(a) => cmd_tau(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Slice(a) => cmd_slice(a),
        Command::Report(a) => cmd_report(a),
    }
}

/// Column data read from a CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub labels: Vec<String>,
    /// Column-major, finite values only.
    pub columns: Vec<Vec<f64>>,
    pub dropped_rows: usize,
}

impl Dataset {
    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }
}

/// Read a headered CSV; rows with a missing or non-numeric cell are dropped.
pub fn parse_dataset(text: &str) -> CliResult<Dataset> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| CliError::malformed(format!("unreadable header: {e}")))?;
    let labels: Vec<String> = header.iter().map(str::to_string).collect();
    if labels.is_empty() || labels.iter().all(String::is_empty) {
        return Err(CliError::malformed("missing header row"));
    }
    if labels.iter().any(String::is_empty) {
        return Err(CliError::malformed("empty column name in header"));
    }
    for (k, l) in labels.iter().enumerate() {
        if labels[..k].contains(l) {
            return Err(CliError::malformed(format!("duplicate column name {l:?}")));
        }
    }
    let d = labels.len();
    let mut columns = vec![Vec::new(); d];
    let mut dropped = 0;
    for record in reader.records() {
        let record = record.map_err(|e| CliError::malformed(format!("unreadable row: {e}")))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let row: Option<Vec<f64>> = (record.len() == d)
            .then(|| record.iter().map(|c| c.parse::<f64>().ok().filter(|v| v.is_finite())).collect())
            .flatten();
        match row {
            Some(row) => columns.iter_mut().zip(row).for_each(|(c, v)| c.push(v)),
            None => dropped += 1,
        }
    }
    if dropped > 0 {
        log::warn!("dropped {dropped} row(s) with missing or non-numeric cells");
    }
    Ok(Dataset { labels, columns, dropped_rows: dropped })
}

fn read_dataset(path: &Path) -> CliResult<Dataset> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::malformed(format!("cannot read {}: {e}", path.display())))?;
    let data = parse_dataset(&text)?;
    log::info!("read {} rows x {} columns from {}", data.n_rows(), data.labels.len(), path.display());
    if data.labels.len() < 2 {
        return Err(CliError::new(EXIT_ARITY, format!("need at least 2 columns, found {}", data.labels.len())));
    }
    Ok(data)
}

fn read_model(path: &Path) -> CliResult<VineModel> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::malformed(format!("cannot read {}: {e}", path.display())))?;
    deserialize(&text).map_err(|e| CliError::malformed(format!("{}: {e}", path.display())))
}

fn write_output(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| CliError::new(1, format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| CliError::new(1, format!("cannot write {}: {e}", path.display())))?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

fn csv_line(cells: &[String]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(cells).expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

fn cmd_tau(args: &TauArgs) -> CliResult<()> {
    let data = read_dataset(&args.input)?;
    if data.n_rows() < 2 {
        return Err(CliError::malformed("need at least 2 complete rows"));
    }
    let m = tau_matrix(&data.columns, &data.labels).map_err(|e| CliError::malformed(e.to_string()))?;
    write_output(&args.output_dir, "tau.csv", &m.to_csv())?;
    Ok(())
}

/// Parse a `--families` list into (family, rotation) candidates.
pub fn parse_families(items: &[String]) -> std::result::Result<Vec<(Family, Rotation)>, String> {
    let mut out: Vec<(Family, Rotation)> = Vec::new();
    for item in items.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        let (name, rot) = match item.rsplit_once('_') {
            Some((n, r)) => {
                let deg: u32 = r.parse().map_err(|_| format!("bad rotation in {item:?}"))?;
                (n, Some(Rotation::from_degrees(deg).ok_or_else(|| format!("bad rotation in {item:?}"))?))
            }
            None => (item, None),
        };
        let family = Family::parse(name).ok_or_else(|| format!("unknown family {name:?}"))?;
        let rotations: Vec<Rotation> = match rot {
            Some(r) if r != Rotation::R0 && !family.is_tail_asymmetric() => {
                return Err(format!("{} is not rotated", family.name()))
            }
            Some(r) => vec![r],
            None if family.is_tail_asymmetric() => Rotation::ALL.to_vec(),
            None => vec![Rotation::R0],
        };
        for r in rotations {
            if !out.contains(&(family, r)) {
                out.push((family, r));
            }
        }
    }
    if out.is_empty() {
        return Err("empty family list".into());
    }
    Ok(out)
}

fn fit_margin(mode: MarginMode, column: &[f64]) -> crate::Result<MarginalModel> {
    match mode {
        MarginMode::Gld => gld_fit_starship(column).map(MarginalModel::Gld),
        MarginMode::Johnson => johnson_fit_auto(column).map(MarginalModel::Johnson),
        MarginMode::Pseudo => unreachable!("pseudo mode has no margin models"),
    }
}

fn margin_diagnostics(labels: &[String], models: Option<&[MarginalModel]>, uniforms: &[Vec<f64>]) -> String {
    let mut out = csv_line(
        &["column", "kind", "variant", "p1", "p2", "p3", "p4", "ad"].map(String::from),
    );
    for (k, label) in labels.iter().enumerate() {
        let (kind, variant, params): (&str, &str, Vec<f64>) = match models.map(|m| &m[k]) {
            None => ("pseudo-observations", "", Vec::new()),
            Some(MarginalModel::Gld(p)) => ("gld", "", p.to_array().to_vec()),
            Some(MarginalModel::Johnson(p)) => {
                ("johnson", p.variant.as_str(), vec![p.gamma, p.eta, p.epsilon, p.lambda])
            }
            Some(MarginalModel::Empirical(_)) => ("empirical", "", Vec::new()),
        };
        let mut cells = vec![label.clone(), kind.to_string(), variant.to_string()];
        cells.extend((0..4).map(|i| params.get(i).map(|&v| fmt_f64(v)).unwrap_or_default()));
        cells.push(fmt_f64(anderson_darling(&uniforms[k])));
        out.push_str(&csv_line(&cells));
    }
    out
}

fn cmd_fit(args: &FitArgs) -> CliResult<()> {
    let data = read_dataset(&args.input)?;
    if data.n_rows() < MIN_VINE_OBS {
        return Err(CliError::malformed(format!(
            "fitting needs at least {MIN_VINE_OBS} complete rows, found {}",
            data.n_rows()
        )));
    }
    let candidates = match &args.families {
        Some(f) => parse_families(f).map_err(CliError::malformed)?,
        None => default_candidates(),
    };
    let criterion = match args.criterion {
        CriterionArg::Aic => Criterion::Aic,
        CriterionArg::Bic => Criterion::Bic,
    };

    let (uniforms, models) = if args.margins == MarginMode::Pseudo {
        (pseudo_observations(&data.columns), None)
    } else {
        let models = data
            .columns
            .iter()
            .zip(&data.labels)
            .map(|(col, label)| {
                let m = fit_margin(args.margins, col)
                    .map_err(|e| CliError::new(EXIT_MARGIN, format!("margin fit failed for column {label:?}: {e}")))?;
                log::info!("column {label}: {} margin fitted", m.kind());
                Ok(m)
            })
            .collect::<CliResult<Vec<_>>>()?;
        let u = pit(&data.columns, &models).map_err(|e| CliError::new(EXIT_MARGIN, e.to_string()))?;
        (u, Some(models))
    };

    let options = FitOptions { candidates, criterion, trunc_level: args.trunc_level };
    let mut model = fit_vine(&uniforms, &data.labels, &options).map_err(|e| match e {
        Error::InvalidParameter(_) | Error::LengthMismatch { .. } => CliError::malformed(e.to_string()),
        other => CliError::new(1, other.to_string()),
    })?;
    for w in &model.warnings {
        log::warn!("{w}");
    }
    if let Some(m) = &models {
        model.margins = Margins::Fitted(m.clone());
    }
    log::info!("selected structure: {}", classify_structure(&model.structure));

    write_output(&args.output_dir, "model.json", &serialize(&model))?;
    write_output(&args.output_dir, "report.csv", &report_csv(&report(&model)))?;
    write_output(
        &args.output_dir,
        "margins.csv",
        &margin_diagnostics(&data.labels, models.as_deref(), &uniforms),
    )?;
    Ok(())
}

fn cmd_simulate(args: &SimulateArgs) -> CliResult<()> {
    let model = read_model(&args.input)?;
    let sample = simulate(&model, args.n, args.seed).map_err(|e| CliError::new(1, e.to_string()))?;
    let mut out = csv_line(model.labels());
    for r in 0..args.n {
        let row: Vec<String> = sample.iter().map(|c| fmt_f64(c[r])).collect();
        out.push_str(&csv_line(&row));
    }
    write_output(&args.output_dir, "simulated.csv", &out)?;
    Ok(())
}

fn axis(range: Option<&[f64]>, model: &MarginalModel, n: usize) -> CliResult<Vec<f64>> {
    let (lo, hi) = match range {
        Some([lo, hi]) => (*lo, *hi),
        Some(_) => return Err(CliError::malformed("a range needs exactly two values")),
        None => (model.quantile(0.01), model.quantile(0.99)),
    };
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(CliError::malformed(format!("invalid grid range {lo}..{hi}")));
    }
    Ok(match n {
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    })
}

fn cmd_slice(args: &SliceArgs) -> CliResult<()> {
    let model = read_model(&args.input)?;
    let i = model.variable_index(&args.var_i).map_err(|e| CliError::new(EXIT_VARIABLE, e.to_string()))?;
    let j = model.variable_index(&args.var_j).map_err(|e| CliError::new(EXIT_VARIABLE, e.to_string()))?;
    if i == j {
        return Err(CliError::new(EXIT_VARIABLE, format!("slice variables must differ (both {:?})", args.var_i)));
    }
    let margins = match &model.margins {
        Margins::Fitted(m) => m,
        Margins::PseudoObservations => {
            return Err(CliError::new(
                EXIT_UNSUPPORTED,
                "model was fitted to pseudo-observations and has no data-space density",
            ))
        }
    };
    if args.grid == 0 {
        return Err(CliError::malformed("grid must have at least one point per axis"));
    }
    let xs = axis(args.x_range.as_deref(), &margins[i], args.grid)?;
    let ys = axis(args.y_range.as_deref(), &margins[j], args.grid)?;
    let grid = density_slice(&model, &args.var_i, &args.var_j, &xs, &ys, &FixPolicy::Median)
        .map_err(|e| CliError::new(1, e.to_string()))?;
    let mut out = String::new();
    out.push_str(&csv_line(&["x", "y", "density"].map(String::from)));
    for (a, row) in grid.iter().enumerate() {
        for (b, v) in row.iter().enumerate() {
            out.push_str(&csv_line(&[fmt_f64(xs[a]), fmt_f64(ys[b]), fmt_f64(*v)]));
        }
    }
    write_output(&args.output_dir, "slice.csv", &out)?;
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> CliResult<()> {
    let model = read_model(&args.input)?;
    write_output(&args.output_dir, "report.csv", &report_csv(&report(&model)))?;
    let mut summary = String::new();
    let _ = writeln!(summary, "{} ({} variables)", classify_structure(&model.structure), model.dim());
    summary.push_str(&tree_summary(&model));
    write_output(&args.output_dir, "tree_summary.txt", &summary)?;
    print!("{summary}");
    Ok(())
}
