//! Command-line front end. One thin binary dispatches to the library:
//!
//! - `eval` — load a model file (behavior, LHV ensemble, or quantum
//!   strategy), print its CHSH report.
//! - `certify` — run the bound certificates (classical enumeration, Tsirelson
//!   spectral norm, operator identity, PR saturation) and print the table.
//! - `optimize` — maximize CHSH over measurement settings for a state.
//! - `surface` — emit the two-knob surface CSV.
//! - `vandam` — emit the protocol success curve CSV.
//!
//! Defaults are explicit (seed 0, trials 10000, format csv) and a JSON config
//! file may supply any flag value; explicit flags win. Unknown config keys
//! are rejected. Exit codes: 0 success, 1 validation error, 2 I/O error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::behavior::{classify, Behavior, ChshReport, TSIRELSON_BOUND};
use crate::commcomplexity::{success_curve, write_success_csv};
use crate::error::{Error, Result};
use crate::lhv::{classical_max, LhvModel};
use crate::linalg::spectral_norm;
use crate::optimize::optimize_settings;
use crate::quantum::{
    chat, chat_squared_identity, quantum_behavior, random_settings, singlet, QuantumStrategy,
    StateVector,
};
use crate::rng::rng_from_seed;
use crate::superquantum::pr_box;
use crate::surface::{surface, write_surface_csv, BaseModel, SurfaceSpec};

const DEFAULT_SEED: u64 = 0;
const DEFAULT_TRIALS: u64 = 10_000;

#[derive(Parser, Debug)]
#[command(
    name = "chshlab",
    version,
    about = "Correlation laboratory for the CHSH scenario",
    after_help = "Defaults: --seed 0, --trials 10000, --format csv."
)]
struct Cli {
    /// JSON config file supplying flag values (explicit flags win).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum ModelKind {
    Auto,
    Behavior,
    Lhv,
    Quantum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum BaseModelArg {
    QuantumSinglet,
    ClassicalDeterministic,
}

impl From<BaseModelArg> for BaseModel {
    fn from(b: BaseModelArg) -> BaseModel {
        match b {
            BaseModelArg::QuantumSinglet => BaseModel::QuantumSinglet,
            BaseModelArg::ClassicalDeterministic => BaseModel::ClassicalDeterministic,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a model file and print its CHSH report.
    Eval(EvalArgs),
    /// Certify the classical, Tsirelson, and maximal bounds.
    Certify(CertifyArgs),
    /// Optimize measurement settings for a state JSON.
    Optimize(OptimizeArgs),
    /// Emit the two-knob CHSH surface as CSV.
    Surface(SurfaceArgs),
    /// Emit the one-bit protocol success curve as CSV.
    Vandam(VandamArgs),
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Model JSON: behavior, LHV model, or quantum strategy.
    #[arg(long)]
    model: PathBuf,
    /// How to read the model file [default: auto].
    #[arg(long, value_enum)]
    kind: Option<ModelKind>,
    /// Output format [default: csv].
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// No-signaling / validation tolerance [default: 1e-9].
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    /// Random-settings seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Number of random settings for the spectral checks [default: 10000].
    #[arg(long)]
    trials: Option<u64>,
    /// Output format [default: csv].
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Args, Debug)]
struct OptimizeArgs {
    /// State JSON: {"state": [[re, im], ...]} (a strategy file also works).
    #[arg(long)]
    state: PathBuf,
    /// Optimizer restart seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Output format [default: csv].
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SurfaceArgs {
    /// Grid points along θ ∈ [0, π] [default: 181].
    #[arg(long)]
    theta_steps: Option<usize>,
    /// Grid points along q ∈ [0, 1] [default: 41].
    #[arg(long)]
    q_steps: Option<usize>,
    /// Base model under the θ knob [default: quantum-singlet].
    #[arg(long, value_enum)]
    base: Option<BaseModelArg>,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VandamArgs {
    /// Boxes (and input bits) per protocol run [default: 8].
    #[arg(long)]
    n: Option<usize>,
    /// Grid points along X ∈ [0, 4] [default: 21].
    #[arg(long)]
    x_steps: Option<usize>,
    /// Protocol trials per grid point [default: 10000].
    #[arg(long)]
    trials: Option<u64>,
    /// Trial seed [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Config-file mirror of the flags; strict about unknown keys.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    seed: Option<u64>,
    trials: Option<u64>,
    format: Option<OutputFormat>,
    kind: Option<ModelKind>,
    tolerance: Option<f64>,
    theta_steps: Option<usize>,
    q_steps: Option<usize>,
    base: Option<BaseModelArg>,
    n: Option<usize>,
    x_steps: Option<usize>,
    output: Option<PathBuf>,
    model: Option<PathBuf>,
    state: Option<PathBuf>,
}

fn load_config(path: Option<&Path>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)?;
            serde_json::from_str(&text)
                .map_err(|e| Error::InvalidConfig(format!("{}: {e}", p.display())))
        }
    }
}

/// Entry point used by `main` and by tests: parses `argv`, runs, and returns
/// the process exit code, writing human output to `out` and errors to `err`.
pub fn dispatch<'a, I, S>(argv: I, out: &'a mut dyn Write, err: &'a mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // --help/--version land here too; they are not failures.
            let code = if e.use_stderr() { 1 } else { 0 };
            let target = if code == 0 { out } else { err };
            let _ = write!(target, "{e}");
            return code;
        }
    };
    match run(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::Io(_) => 2,
                _ => 1,
            }
        }
    }
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    let config = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Eval(args) => eval_command(args, &config, out),
        Command::Certify(args) => certify_command(args, &config, out),
        Command::Optimize(args) => optimize_command(args, &config, out),
        Command::Surface(args) => surface_command(args, &config, out),
        Command::Vandam(args) => vandam_command(args, &config, out),
    }
}

/// Writes to `path` when given, otherwise to the dispatch `out` stream.
fn with_sink(
    path: Option<&Path>,
    out: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p)?;
            let mut writer = std::io::BufWriter::new(file);
            body(&mut writer)?;
            writer.flush()?;
            Ok(())
        }
        None => body(out),
    }
}

fn detect_kind(json: &serde_json::Value) -> Result<ModelKind> {
    let obj = json
        .as_object()
        .ok_or_else(|| Error::MalformedModel("model file is not a JSON object".into()))?;
    if obj.contains_key("probs") {
        Ok(ModelKind::Behavior)
    } else if obj.contains_key("weights") {
        Ok(ModelKind::Lhv)
    } else if obj.contains_key("state") && obj.contains_key("settings") {
        Ok(ModelKind::Quantum)
    } else {
        Err(Error::MalformedModel(
            "cannot tell the model kind from its keys; pass --kind".into(),
        ))
    }
}

fn load_behavior(path: &Path, kind: ModelKind) -> Result<Behavior> {
    let text = std::fs::read_to_string(path)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let kind = match kind {
        ModelKind::Auto => detect_kind(&value)?,
        k => k,
    };
    match kind {
        ModelKind::Behavior => Ok(serde_json::from_value::<Behavior>(value)?),
        ModelKind::Lhv => Ok(serde_json::from_value::<LhvModel>(value)?.to_behavior()),
        ModelKind::Quantum => Ok(quantum_behavior(&serde_json::from_value::<QuantumStrategy>(
            value,
        )?)),
        ModelKind::Auto => unreachable!("auto resolved above"),
    }
}

fn eval_command(args: EvalArgs, config: &FileConfig, out: &mut dyn Write) -> Result<()> {
    let kind = args.kind.or(config.kind).unwrap_or(ModelKind::Auto);
    let format = args.format.or(config.format).unwrap_or(OutputFormat::Csv);
    let tolerance = args.tolerance.or(config.tolerance).unwrap_or(1e-9);
    let behavior = load_behavior(&args.model, kind)?;
    let report = classify(behavior.correlations().chsh_value())?;
    let ns = behavior.no_signaling_check_with(tolerance);

    match format {
        OutputFormat::Json => {
            #[derive(serde::Serialize)]
            struct EvalOutput {
                report: ChshReport,
                no_signaling: bool,
                max_marginal_discrepancy: f64,
            }
            let payload = EvalOutput {
                report,
                no_signaling: ns.passed,
                max_marginal_discrepancy: ns.max_discrepancy,
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&payload)?)?;
        }
        OutputFormat::Csv => {
            writeln!(
                out,
                "value,regime,margin_classical,margin_tsirelson,margin_maximal,no_signaling"
            )?;
            writeln!(
                out,
                "{:.16e},{},{:.16e},{:.16e},{:.16e},{}",
                report.value,
                report.regime,
                report.margins.classical,
                report.margins.tsirelson,
                report.margins.maximal,
                ns.passed
            )?;
        }
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct CertifyRow {
    check: &'static str,
    bound: f64,
    value: f64,
    pass: bool,
}

fn certify_rows(seed: u64, trials: u64) -> Result<Vec<CertifyRow>> {
    let enumeration = classical_max();
    let mut rows = vec![CertifyRow {
        check: "classical-enumeration",
        bound: 2.0,
        value: enumeration.value as f64,
        pass: enumeration.value == 2
            && enumeration.attaining_positive.len() == 8
            && enumeration.attaining_negative.len() == 8,
    }];

    let mut rng = rng_from_seed(seed);
    let mut max_norm: f64 = 0.0;
    let mut max_residual: f64 = 0.0;
    for _ in 0..trials {
        let settings = random_settings(&mut rng);
        max_norm = max_norm.max(spectral_norm(&chat(&settings))?);
        max_residual = max_residual.max(chat_squared_identity(&settings));
    }
    rows.push(CertifyRow {
        check: "tsirelson-spectral-norm",
        bound: TSIRELSON_BOUND,
        value: max_norm,
        pass: max_norm <= TSIRELSON_BOUND + 1e-9,
    });

    let optimum = optimize_settings(&singlet(), seed)?;
    rows.push(CertifyRow {
        check: "tsirelson-saturation",
        bound: TSIRELSON_BOUND,
        value: optimum.value,
        pass: (optimum.value - TSIRELSON_BOUND).abs() <= 1e-6,
    });

    rows.push(CertifyRow {
        check: "chat-squared-identity",
        bound: 1e-12,
        value: max_residual,
        pass: max_residual < 1e-12,
    });

    let pr = pr_box();
    let pr_chsh = pr.correlations().chsh_value();
    rows.push(CertifyRow {
        check: "pr-saturation",
        bound: 4.0,
        value: pr_chsh,
        pass: pr_chsh == 4.0,
    });
    let ns = pr.no_signaling_check();
    rows.push(CertifyRow {
        check: "pr-no-signaling",
        bound: 1e-9,
        value: ns.max_discrepancy,
        pass: ns.passed,
    });
    Ok(rows)
}

fn certify_command(args: CertifyArgs, config: &FileConfig, out: &mut dyn Write) -> Result<()> {
    let seed = args.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    let trials = args.trials.or(config.trials).unwrap_or(DEFAULT_TRIALS);
    let format = args.format.or(config.format).unwrap_or(OutputFormat::Csv);
    let rows = certify_rows(seed, trials)?;
    let all_pass = rows.iter().all(|r| r.pass);
    match format {
        OutputFormat::Json => {
            writeln!(out, "{}", serde_json::to_string_pretty(&rows)?)?;
        }
        OutputFormat::Csv => {
            writeln!(out, "check,bound,value,pass")?;
            for r in &rows {
                writeln!(out, "{},{:.16e},{:.16e},{}", r.check, r.bound, r.value, r.pass)?;
            }
        }
    }
    if !all_pass {
        return Err(Error::InvalidConfig(
            "certification failed; see the table".into(),
        ));
    }
    Ok(())
}

#[derive(Deserialize)]
struct StateFile {
    state: StateVector,
}

fn optimize_command(args: OptimizeArgs, config: &FileConfig, out: &mut dyn Write) -> Result<()> {
    let seed = args.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    let format = args.format.or(config.format).unwrap_or(OutputFormat::Csv);
    let output = args.output.or_else(|| config.output.clone());
    let text = std::fs::read_to_string(&args.state)?;
    // Accept either {"state": ...} alone or a full strategy file.
    let state = match serde_json::from_str::<StateFile>(&text) {
        Ok(f) => f.state,
        Err(_) => serde_json::from_str::<QuantumStrategy>(&text)?.state,
    };
    let optimum = optimize_settings(&state, seed)?;
    with_sink(output.as_deref(), out, |sink| {
        match format {
            OutputFormat::Json => {
                writeln!(sink, "{}", serde_json::to_string_pretty(&optimum)?)?;
            }
            OutputFormat::Csv => {
                writeln!(
                    sink,
                    "value,a_x,a_y,a_z,a_prime_x,a_prime_y,a_prime_z,b_x,b_y,b_z,b_prime_x,b_prime_y,b_prime_z"
                )?;
                let s = &optimum.settings;
                let v = |w: &crate::quantum::BlochVector| (w.x(), w.y(), w.z());
                let (ax, ay, az) = v(&s.a);
                let (px, py, pz) = v(&s.a_prime);
                let (bx, by, bz) = v(&s.b);
                let (qx, qy, qz) = v(&s.b_prime);
                writeln!(
                    sink,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    optimum.value, ax, ay, az, px, py, pz, bx, by, bz, qx, qy, qz
                )?;
            }
        }
        Ok(())
    })
}

fn surface_command(args: SurfaceArgs, config: &FileConfig, out: &mut dyn Write) -> Result<()> {
    let theta_steps = args.theta_steps.or(config.theta_steps).unwrap_or(181);
    let q_steps = args.q_steps.or(config.q_steps).unwrap_or(41);
    let base = args.base.or(config.base).unwrap_or(BaseModelArg::QuantumSinglet);
    let output = args.output.or_else(|| config.output.clone());
    let spec = SurfaceSpec {
        theta_steps,
        q_steps,
        base_model: base.into(),
        output_path: output.clone(),
    };
    let grid = surface(&spec)?;
    with_sink(output.as_deref(), out, |sink| {
        write_surface_csv(&grid, sink)?;
        Ok(())
    })
}

fn vandam_command(args: VandamArgs, config: &FileConfig, out: &mut dyn Write) -> Result<()> {
    let n = args.n.or(config.n).unwrap_or(8);
    let x_steps = args.x_steps.or(config.x_steps).unwrap_or(21);
    let trials = args.trials.or(config.trials).unwrap_or(DEFAULT_TRIALS);
    let seed = args.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    let output = args.output.or_else(|| config.output.clone());
    if x_steps < 2 {
        return Err(Error::OutOfRange {
            name: "x_steps",
            value: x_steps as f64,
            min: 2.0,
            max: f64::INFINITY,
        });
    }
    let grid: Vec<f64> = (0..x_steps)
        .map(|i| 4.0 * i as f64 / (x_steps - 1) as f64)
        .collect();
    let curve = success_curve(n, &grid, trials, seed)?;
    with_sink(output.as_deref(), out, |sink| {
        write_success_csv(&curve, sink)?;
        Ok(())
    })
}

