//! Command-line front end.
//!
//! Exit codes: 0 success, 1 input or validation error, 2 defective state
//! matrix, 3 numerical failure.

pub mod output;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::DVector;
use serde_json::{json, Map, Value};

use crate::energy::{energy_report, normality, EnergyKind, EnergyWeight, MethodKind};
use crate::error::ModalError;
use crate::model::{build_swing_system, Disturbance, StateSpaceModel, SwingParams};
use crate::properties::check_properties;
use crate::simulate::{energy_rows, energy_timeseries, TimeGrid};
use crate::spectral::{decompose, EigenBasis, ModeGroup, DEFAULT_TOL};

use output::{complex, complex_matrix, csv_rows, json_rows, real, to_json_text};

#[derive(Debug, Parser)]
#[command(name = "modal-energy", version, about = "Modal energy analysis of linear state-space models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Eigenvalues, right and left eigenvectors, participation factors.
    Decompose(RunArgs),
    /// Normality index and commutator norm of the state matrix.
    Normality(RunArgs),
    /// Modal energies and powers of every method at the state `--x0`.
    Energy(RunArgs),
    /// Modal energy traces along the response to a step to `--x0`.
    Simulate(RunArgs),
    /// Which modal-energy requirements each method meets at `--x0`.
    Check(RunArgs),
    /// Convert a swing-equation parameter file to a model file.
    Swing(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Model file: {"n", "A", "P", "labels"}.
    #[arg(long, conflicts_with = "swing")]
    pub model: Option<PathBuf>,
    /// Swing parameter file: {"M", "D", "K"}.
    #[arg(long)]
    pub swing: Option<PathBuf>,
    /// State or disturbance as comma-separated floats.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<String>,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub t_dist: f64,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub t_end: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value = "all", value_parser = ["all", "moving", "eigvec", "hermitian", "transpose"])]
    pub method: String,
    #[arg(long, default_value = "normalized", value_parser = ["normalized", "physical"])]
    pub kind: String,
    #[arg(long, env = "MODAL_TOL", default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Decompose,
    Normality,
    Energy,
    Simulate,
    Check,
    Swing,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Decompose => "decompose",
            CommandKind::Normality => "normality",
            CommandKind::Energy => "energy",
            CommandKind::Simulate => "simulate",
            CommandKind::Check => "check",
            CommandKind::Swing => "swing",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSource {
    Model(PathBuf),
    Swing(PathBuf),
}

/// Fully resolved invocation; every default is explicit.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub source: ModelSource,
    pub x0: Option<Vec<f64>>,
    pub t0: f64,
    pub t_dist: f64,
    pub t_end: f64,
    pub dt: f64,
    pub methods: Vec<MethodKind>,
    pub kind: EnergyKind,
    pub tol: f64,
    pub out: Option<PathBuf>,
    /// `None` selects the plain-text report of `normality` and `check`.
    pub format: Option<Format>,
}

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Modal(ModalError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Modal(ModalError::DefectiveMatrix { .. }) => 2,
            CliError::Modal(ModalError::Numerical(_) | ModalError::Overflow { .. }) => 3,
            CliError::Modal(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(msg) => f.write_str(msg),
            CliError::Modal(e) => write!(f, "{e}"),
        }
    }
}

impl From<ModalError> for CliError {
    fn from(e: ModalError) -> Self {
        CliError::Modal(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn parse_x0(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| CliError::Input(format!("--x0: '{s}' is not a finite number")))
        })
        .collect()
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> CliResult<Self> {
        let (command, args) = match cli.command {
            Command::Decompose(a) => (CommandKind::Decompose, a),
            Command::Normality(a) => (CommandKind::Normality, a),
            Command::Energy(a) => (CommandKind::Energy, a),
            Command::Simulate(a) => (CommandKind::Simulate, a),
            Command::Check(a) => (CommandKind::Check, a),
            Command::Swing(a) => (CommandKind::Swing, a),
        };
        let source = match (args.model, args.swing) {
            (Some(p), None) => ModelSource::Model(p),
            (None, Some(p)) => ModelSource::Swing(p),
            _ => return Err(CliError::Input("one of --model or --swing is required".into())),
        };
        if command == CommandKind::Swing && !matches!(source, ModelSource::Swing(_)) {
            return Err(CliError::Input("swing needs --swing".into()));
        }
        let x0 = args.x0.as_deref().map(parse_x0).transpose()?;
        if x0.is_none() && matches!(command, CommandKind::Energy | CommandKind::Simulate | CommandKind::Check) {
            return Err(CliError::Input(format!("{} needs --x0", command.name())));
        }
        let methods = match args.method.as_str() {
            "all" => MethodKind::ALL.to_vec(),
            m => vec![m.parse()?],
        };
        if !(args.tol > 0.0 && args.tol.is_finite()) {
            return Err(CliError::Input(format!("--tol must be positive, got {}", args.tol)));
        }
        let format = match (command, args.format) {
            (CommandKind::Decompose | CommandKind::Swing, None | Some(Format::Json)) => Some(Format::Json),
            (CommandKind::Energy | CommandKind::Simulate, None) => Some(Format::Csv),
            (CommandKind::Energy | CommandKind::Simulate, f) => f,
            (CommandKind::Normality | CommandKind::Check, f @ (None | Some(Format::Json))) => f,
            (c, Some(f)) => return Err(CliError::Input(format!("{} does not write {}", c.name(), f.name()))),
        };
        Ok(RunConfig {
            command,
            source,
            x0,
            t0: 0.0,
            t_dist: args.t_dist,
            t_end: args.t_end,
            dt: args.dt,
            methods,
            kind: args.kind.parse()?,
            tol: args.tol,
            out: args.out,
            format,
        })
    }

    /// Echo of the configuration for report headers.
    pub fn metadata(&self) -> Value {
        let (key, path) = match &self.source {
            ModelSource::Model(p) => ("model", p),
            ModelSource::Swing(p) => ("swing", p),
        };
        let mut m = Map::new();
        m.insert("command".into(), json!(self.command.name()));
        m.insert(key.into(), json!(path.display().to_string()));
        m.insert("x0".into(), self.x0.as_ref().map_or(Value::Null, |x| Value::Array(x.iter().map(|&v| real(v)).collect())));
        m.insert("t0".into(), real(self.t0));
        m.insert("t_dist".into(), real(self.t_dist));
        m.insert("t_end".into(), real(self.t_end));
        m.insert("dt".into(), real(self.dt));
        m.insert("methods".into(), json!(self.methods.iter().map(|m| m.name()).collect::<Vec<_>>()));
        m.insert("kind".into(), json!(self.kind.name()));
        m.insert("tol".into(), json!(self.tol));
        m.insert("format".into(), json!(self.format.map_or("text", Format::name)));
        m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        Value::Object(m)
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_model(source: &ModelSource) -> CliResult<StateSpaceModel> {
    Ok(match source {
        ModelSource::Model(p) => StateSpaceModel::from_json(&read_text(p)?)?,
        ModelSource::Swing(p) => build_swing_system(&SwingParams::from_json(&read_text(p)?)?),
    })
}

fn disturbance(config: &RunConfig, n: usize) -> CliResult<Disturbance> {
    let x0 = config.x0.as_ref().expect("checked when the config was built");
    if x0.len() != n {
        return Err(ModalError::DimensionMismatch(format!("--x0 has {} entries, the model has {n} states", x0.len())).into());
    }
    Ok(Disturbance::new(DVector::from_column_slice(x0))?)
}

fn weight(model: &StateSpaceModel, kind: EnergyKind, stderr: &mut dyn Write) -> CliResult<EnergyWeight> {
    if kind == EnergyKind::Physical && model.p().is_none() {
        let _ = writeln!(stderr, "warning: model has no P; using normalized energy");
    }
    Ok(EnergyWeight::for_model(model, kind)?)
}

fn basis(model: &StateSpaceModel, tol: f64, stderr: &mut dyn Write) -> CliResult<EigenBasis> {
    let basis = decompose(model.a(), tol)?;
    for cluster in basis.degenerate_clusters() {
        let _ = writeln!(stderr, "warning: repeated eigenvalue on modes {cluster:?}; their modal energies depend on the chosen basis");
    }
    Ok(basis)
}

fn with_meta(config: &RunConfig, mut body: Map<String, Value>) -> String {
    body.insert("meta".into(), config.metadata());
    to_json_text(&Value::Object(body))
}

fn cmd_decompose(config: &RunConfig, model: &StateSpaceModel, stderr: &mut dyn Write) -> CliResult<String> {
    let b = basis(model, config.tol, stderr)?;
    let groups: Vec<Value> = b
        .groups()
        .iter()
        .map(|g| match *g {
            ModeGroup::Real(i) => json!({ "real": i }),
            ModeGroup::Pair(i, j) => json!({ "pair": [i, j] }),
        })
        .collect();
    let r = b.residuals();
    let mut body = Map::new();
    body.insert("n".into(), json!(b.len()));
    body.insert("labels".into(), json!(model.labels()));
    body.insert("eigenvalues".into(), Value::Array(b.lambdas().iter().map(|&l| complex(l)).collect()));
    body.insert("V".into(), complex_matrix(b.right()));
    body.insert("U".into(), complex_matrix(b.left()));
    body.insert("participation".into(), complex_matrix(&b.participation_matrix()));
    body.insert("groups".into(), Value::Array(groups));
    body.insert("overlaps".into(), Value::Array(b.overlaps().iter().map(|&o| real(o)).collect()));
    body.insert("degenerate_clusters".into(), json!(b.degenerate_clusters()));
    body.insert(
        "residuals".into(),
        json!({ "right": real(r.right), "left": real(r.left), "biorthogonality": real(r.biorthogonality) }),
    );
    Ok(with_meta(config, body))
}

fn physical_p(model: &StateSpaceModel, kind: EnergyKind, stderr: &mut dyn Write) -> CliResult<Option<nalgebra::DMatrix<f64>>> {
    let w = weight(model, kind, stderr)?;
    Ok((w.kind() == EnergyKind::Physical).then(|| w.matrix().clone()))
}

fn cmd_normality(config: &RunConfig, model: &StateSpaceModel, stderr: &mut dyn Write) -> CliResult<String> {
    let p = physical_p(model, config.kind, stderr)?;
    let nrm = normality(model.a(), p.as_ref())?;
    Ok(match config.format {
        Some(_) => {
            let mut body = Map::new();
            body.insert("normality_index".into(), real(nrm.index));
            body.insert("commutator_norm".into(), real(nrm.commutator_norm));
            with_meta(config, body)
        }
        None => format!("normality_index {:.6}\ncommutator_norm {}\n", nrm.index, output::fmt_real(nrm.commutator_norm)),
    })
}

fn cmd_energy(config: &RunConfig, model: &StateSpaceModel, stderr: &mut dyn Write) -> CliResult<String> {
    let w = weight(model, config.kind, stderr)?;
    let b = basis(model, config.tol, stderr)?;
    let x = disturbance(config, model.dim())?;
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for &method in &config.methods {
        let report = energy_report(method, &b, x.state(), model.a(), &w)?;
        rows.extend(energy_rows(0.0, &report));
        reports.push(json!({
            "method": method.name(),
            "missing_energy": complex(report.missing_energy),
            "sum_error_pct": report.sum_error_pct.map_or(Value::Null, real),
            "max_mapping_residual": real(report.mapping_residuals.iter().copied().fold(0.0, f64::max)),
        }));
    }
    Ok(match config.format {
        Some(Format::Json) => {
            let mut body = Map::new();
            body.insert("eigenvalues".into(), Value::Array(b.lambdas().iter().map(|&l| complex(l)).collect()));
            body.insert("rows".into(), json_rows(&rows));
            body.insert("diagnostics".into(), Value::Array(reports));
            with_meta(config, body)
        }
        _ => {
            let _ = writeln!(stderr, "# {}", config.metadata());
            csv_rows(&rows)
        }
    })
}

fn cmd_simulate(config: &RunConfig, model: &StateSpaceModel, stderr: &mut dyn Write) -> CliResult<String> {
    let w = weight(model, config.kind, stderr)?;
    let b = basis(model, config.tol, stderr)?;
    let x = disturbance(config, model.dim())?;
    let grid = TimeGrid::new(config.t0, config.t_dist, config.t_end, config.dt)?;
    let table = energy_timeseries(model, &b, &x, &grid, &config.methods, &w)?;
    Ok(match config.format {
        Some(Format::Json) => {
            let mut body = Map::new();
            body.insert("rows".into(), json_rows(&table.rows));
            with_meta(config, body)
        }
        _ => {
            let _ = writeln!(stderr, "# {}", config.metadata());
            csv_rows(&table.rows)
        }
    })
}

fn cmd_check(config: &RunConfig, model: &StateSpaceModel, stderr: &mut dyn Write) -> CliResult<String> {
    let w = weight(model, config.kind, stderr)?;
    let b = basis(model, config.tol, stderr)?;
    let x = disturbance(config, model.dim())?;
    let grid = check_properties(&b, x.state(), model.a(), &w, config.tol)?;
    let rows: Vec<_> = grid.rows.iter().filter(|r| config.methods.contains(&r.method)).collect();
    Ok(match config.format {
        Some(_) => {
            let mut body = Map::new();
            body.insert("normality_index".into(), real(grid.normality.index));
            body.insert("commutator_norm".into(), real(grid.normality.commutator_norm));
            body.insert("total_energy".into(), real(grid.total_energy));
            body.insert("total_power".into(), real(grid.total_power));
            body.insert(
                "rows".into(),
                Value::Array(
                    rows.iter()
                        .map(|r| {
                            json!({
                                "method": r.method.name(),
                                "eigenvalue_mapping": r.eigenvalue_mapping.name(),
                                "energy_real": r.energy_real.name(),
                                "energy_sum": r.energy_sum.name(),
                                "mapping_residual": real(r.mapping_residual),
                                "imag_energy": real(r.imag_energy),
                                "sum_residual": real(r.sum_residual),
                            })
                        })
                        .collect(),
                ),
            );
            with_meta(config, body)
        }
        None => {
            let mut s = format!(
                "normality_index {:.6}\ntotal_energy {}\ntotal_power {}\n{:<10} {:<19} {:<12} {}\n",
                grid.normality.index,
                output::fmt_real(grid.total_energy),
                output::fmt_real(grid.total_power),
                "method",
                "eigenvalue_mapping",
                "energy_real",
                "energy_sum"
            );
            for r in rows {
                s.push_str(&format!(
                    "{:<10} {:<19} {:<12} {}\n",
                    r.method.name(),
                    r.eigenvalue_mapping.name(),
                    r.energy_real.name(),
                    r.energy_sum.name()
                ));
            }
            s
        }
    })
}

fn cmd_swing(model: &StateSpaceModel) -> String {
    // Full precision so the written model decomposes exactly like the in-memory one.
    let mut file = model.to_file();
    for row in file.a.iter_mut().chain(file.p.iter_mut().flatten()) {
        row.iter_mut().for_each(|v| *v += 0.0);
    }
    let mut s = serde_json::to_string_pretty(&file).expect("model file serializes");
    s.push('\n');
    s
}

/// Runs one resolved command and returns the report text.
pub fn execute(config: &RunConfig, stderr: &mut dyn Write) -> CliResult<String> {
    let model = load_model(&config.source)?;
    if model.p_flagged() {
        let _ = writeln!(stderr, "warning: P is not symmetric positive definite; physical energy is unavailable");
    }
    match config.command {
        CommandKind::Decompose => cmd_decompose(config, &model, stderr),
        CommandKind::Normality => cmd_normality(config, &model, stderr),
        CommandKind::Energy => cmd_energy(config, &model, stderr),
        CommandKind::Simulate => cmd_simulate(config, &model, stderr),
        CommandKind::Check => cmd_check(config, &model, stderr),
        CommandKind::Swing => Ok(cmd_swing(&model)),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{rendered}");
                    0
                }
                _ => {
                    let _ = write!(stderr, "{rendered}");
                    1
                }
            };
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|config| {
        let text = execute(&config, stderr)?;
        match &config.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display()))),
            None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Input(format!("cannot write output: {e}"))),
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
