use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use simplexwalk_cli::{
    amplitudes_csv, bmatrix_json, check_guard_env, classify_core, config_error, detect, events_json, run,
    run_error, verify, write_artifact, ExperimentConfig, Failure, GridConfig, ScenarioKind, SchemeConfig,
    SchemeKind, Suite, WeightSource,
};
use simplexwalk_core::krawtchouk::{krawtchouk_genfun, krawtchouk_series};
use simplexwalk_core::walk::{projected_matrix, sweep, AmplitudeProfile};
use simplexwalk_core::MultiIndex;

#[derive(Parser)]
#[command(name = "simplexwalk", version, about = "Quantum walks on symmetric extensions of association schemes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a base scheme.
    Scheme {
        #[command(subcommand)]
        command: SchemeCommand,
    },
    /// Evaluate multivariate Krawtchouk polynomials.
    Krawtchouk {
        #[command(subcommand)]
        command: KrawtchoukCommand,
    },
    /// Closed-form walk computations.
    Walk {
        #[command(subcommand)]
        command: WalkCommand,
    },
    /// Run self-check suites; exits 1 if any check fails.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an experiment described by a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: RunOverrides,
    },
}

#[derive(Subcommand)]
enum SchemeCommand {
    /// Spectral data and axiom checks as JSON.
    Info {
        #[command(flatten)]
        scheme: SchemeArgs,
    },
}

#[derive(Subcommand)]
enum KrawtchoukCommand {
    /// `K(index, index_tilde, N, C)` for the cosine matrix `C` of a base scheme.
    Eval {
        #[command(flatten)]
        scheme: SchemeArgs,
        #[arg(long = "N")]
        copies: usize,
        /// Multi-index `n`, e.g. `2-1-1`.
        #[arg(long)]
        index: MultiIndex,
        /// Multi-index `n~`.
        #[arg(long = "index-tilde")]
        index_tilde: MultiIndex,
        #[arg(long, value_enum, default_value = "series")]
        method: Method,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Series,
    Genfun,
}

#[derive(Subcommand)]
enum WalkCommand {
    /// Site amplitudes over a time grid as CSV.
    Amplitudes {
        #[command(flatten)]
        walk: WalkArgs,
        #[command(flatten)]
        grid: GridArgs,
        /// Comma-separated evaluation times; replaces the grid.
        #[arg(long, value_delimiter = ',')]
        times: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The projected matrix over the sites as JSON.
    Bmatrix {
        #[command(flatten)]
        walk: WalkArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan a ready-made scenario for transfer events.
    Detect {
        #[arg(long, value_enum)]
        scenario: ScenarioKind,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long = "N")]
        copies: usize,
        /// Subsimplex index for the ordered-word scenario.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        tol: Option<f64>,
        /// Also report sites never reached on the grid.
        #[arg(long)]
        zt: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SchemeArgs {
    #[arg(long = "kind", alias = "scheme", value_enum)]
    kind: SchemeKind,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
}

impl SchemeArgs {
    fn config(&self) -> SchemeConfig {
        SchemeConfig {
            kind: self.kind,
            n: self.n,
            d: self.d,
        }
    }
}

#[derive(Args)]
struct WalkArgs {
    /// Base config; the flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "scheme", value_enum)]
    kind: Option<SchemeKind>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long = "N")]
    copies: Option<usize>,
    /// `canonical`, `solve`, or a comma-separated complex list such as `0.5,1-2i`.
    #[arg(long)]
    weights: Option<String>,
    /// Time at which `solve` weights hit their phases.
    #[arg(long = "solve-t")]
    solve_t: Option<f64>,
    /// Target phase arguments for `solve`.
    #[arg(long = "solve-args", value_delimiter = ',', allow_hyphen_values = true)]
    solve_args: Option<Vec<f64>>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long = "t-min", allow_hyphen_values = true)]
    t_min: Option<f64>,
    #[arg(long = "t-max", allow_hyphen_values = true)]
    t_max: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
}

impl GridArgs {
    fn apply(&self, grid: &mut GridConfig) {
        if let Some(v) = self.t_min {
            grid.t_min = v;
        }
        if let Some(v) = self.t_max {
            grid.t_max = v;
        }
        if let Some(v) = self.steps {
            grid.steps = v;
        }
    }
}

#[derive(Args)]
struct RunOverrides {
    #[arg(long = "N")]
    copies: Option<usize>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long = "amplitudes-out")]
    amplitudes_out: Option<PathBuf>,
    #[arg(long = "bmatrix-out")]
    bmatrix_out: Option<PathBuf>,
    #[arg(long = "events-out")]
    events_out: Option<PathBuf>,
}

impl WalkArgs {
    fn config(&self) -> Result<ExperimentConfig, Failure> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => {
                let kind = self
                    .kind
                    .ok_or_else(|| config_error(anyhow!("--scheme is required without --config")))?;
                let copies = self
                    .copies
                    .ok_or_else(|| config_error(anyhow!("--N is required without --config")))?;
                ExperimentConfig {
                    scheme: SchemeConfig { kind, n: None, d: None },
                    copies,
                    weights: WeightSource::Canonical,
                    grid: GridConfig {
                        t_min: 0.0,
                        t_max: 2.0 * std::f64::consts::PI,
                        steps: 200,
                    },
                    times: None,
                    tolerances: Default::default(),
                    outputs: Default::default(),
                    zero_transfer: false,
                }
            }
        };
        if let Some(kind) = self.kind {
            config.scheme.kind = kind;
        }
        if self.n.is_some() {
            config.scheme.n = self.n;
        }
        if self.d.is_some() {
            config.scheme.d = self.d;
        }
        if let Some(copies) = self.copies {
            config.copies = copies;
        }
        match self.weights.as_deref() {
            Some("solve") => {
                let t = self.solve_t.ok_or_else(|| config_error(anyhow!("--weights solve needs --solve-t")))?;
                let args = self
                    .solve_args
                    .clone()
                    .ok_or_else(|| config_error(anyhow!("--weights solve needs --solve-args")))?;
                config.weights = WeightSource::Solve { t, args };
            }
            Some(flag) => config.weights = WeightSource::parse_flag(flag)?,
            None => {}
        }
        Ok(config)
    }
}

fn emit(out: Option<&PathBuf>, contents: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            write_artifact(path, contents)?;
            eprintln!("wrote {}", path.display());
            Ok(())
        }
        None => std::io::stdout()
            .write_all(contents.as_bytes())
            .map_err(run_error),
    }
}

fn to_json(value: &impl Serialize) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(run_error)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct ComplexEntry {
    re: f64,
    im: f64,
}

impl From<Complex64> for ComplexEntry {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct SchemeInfo {
    name: String,
    size: usize,
    classes: usize,
    valencies: Vec<u64>,
    multiplicities: Vec<u64>,
    transpose_map: Vec<usize>,
    first_eigenmatrix: Vec<Vec<ComplexEntry>>,
    intersection_numbers: Vec<Vec<Vec<i64>>>,
    validation: simplexwalk_core::ValidationReport,
}

fn scheme_info(args: &SchemeArgs) -> Result<(), Failure> {
    let s = args.config().build()?;
    let p = s.first_eigenmatrix();
    let info = SchemeInfo {
        name: s.name().to_string(),
        size: s.size(),
        classes: s.classes(),
        valencies: s.valencies().to_vec(),
        multiplicities: s.multiplicities().to_vec(),
        transpose_map: s.transpose_map().to_vec(),
        first_eigenmatrix: (0..p.nrows())
            .map(|i| (0..p.ncols()).map(|j| p[(i, j)].into()).collect())
            .collect(),
        intersection_numbers: s.intersection().to_nested(),
        validation: s.validate(),
    };
    emit(None, &to_json(&info)?)
}

#[derive(Serialize)]
struct KrawtchoukOutput {
    index: MultiIndex,
    index_tilde: MultiIndex,
    copies: usize,
    value_re: f64,
    value_im: f64,
    method: &'static str,
    /// Gap between the series and generating-function evaluations.
    residual: f64,
}

fn krawtchouk_eval(
    scheme: &SchemeArgs,
    copies: usize,
    index: &MultiIndex,
    index_tilde: &MultiIndex,
    method: Method,
) -> Result<(), Failure> {
    let s = scheme.config().build()?;
    if index.len() != s.classes() || index_tilde.len() != s.classes() {
        return Err(config_error(anyhow!(
            "multi-indices need {} entries for {}",
            s.classes(),
            s.name()
        )));
    }
    let series = krawtchouk_series(index, index_tilde, copies, s.cosine()).map_err(classify_core)?;
    let row = krawtchouk_genfun(index_tilde, copies, s.cosine()).map_err(classify_core)?;
    let genfun = row[index];
    let (value, name) = match method {
        Method::Series => (series, "series"),
        Method::Genfun => (genfun, "genfun"),
    };
    emit(
        None,
        &to_json(&KrawtchoukOutput {
            index: index.clone(),
            index_tilde: index_tilde.clone(),
            copies,
            value_re: value.re,
            value_im: value.im,
            method: name,
            residual: (series - genfun).norm(),
        })?,
    )
}

fn walk_amplitudes(
    walk: &WalkArgs,
    grid: &GridArgs,
    times: &Option<Vec<f64>>,
    out: Option<&PathBuf>,
) -> Result<(), Failure> {
    let mut config = walk.config()?;
    grid.apply(&mut config.grid);
    if times.is_some() {
        config.times = times.clone();
    }
    let spec = config.spec()?;
    let profiles = sweep(&spec, &config.evaluation_times()?);
    let worst = profiles
        .iter()
        .map(AmplitudeProfile::normalization_residual)
        .fold(0.0, f64::max);
    eprintln!("{} profiles, max normalization residual {worst:.3e}", profiles.len());
    emit(out, &amplitudes_csv(&profiles).map_err(run_error)?)
}

fn walk_bmatrix(walk: &WalkArgs, out: Option<&PathBuf>) -> Result<(), Failure> {
    let spec = walk.config()?.spec()?;
    let pm = projected_matrix(&spec);
    eprintln!(
        "{}x{} projected matrix, Hermitian residual {:.3e}",
        pm.dimension(),
        pm.dimension(),
        pm.hermitian_residual()
    );
    emit(out, &bmatrix_json(&pm).map_err(run_error)?)
}

#[allow(clippy::too_many_arguments)]
fn walk_detect(
    scenario: ScenarioKind,
    n: Option<usize>,
    d: Option<usize>,
    copies: usize,
    k: usize,
    grid: &GridArgs,
    tol: Option<f64>,
    zt: bool,
    out: Option<&PathBuf>,
) -> Result<(), Failure> {
    let mut config = ExperimentConfig::scenario(scenario, n, d, copies, k)?;
    grid.apply(&mut config.grid);
    if let Some(tol) = tol {
        config.tolerances.pst = tol;
    }
    config.zero_transfer = zt;
    let spec = config.spec()?;
    let events = detect(&spec, &config)?;
    for e in &events {
        let support: Vec<String> = e.support.iter().map(MultiIndex::label).collect();
        eprintln!("t={:.12} {} [{}] fidelity {:.12}", e.time, e.kind.as_str(), support.join(" "), e.fidelity);
    }
    emit(out, &events_json(&events).map_err(run_error)?)
}

fn verify_command(suite: Suite, out: Option<&PathBuf>) -> Result<(), Failure> {
    let report = verify(suite);
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    eprintln!("{} checks, {} failed", report.checks.len(), failed.len());
    for name in &failed {
        eprintln!("  FAILED {name}");
    }
    emit(out, &to_json(&report)?)?;
    if report.passed {
        Ok(())
    } else {
        Err(run_error(anyhow!("{} verification checks failed", failed.len())))
    }
}

fn run_command(path: &Path, overrides: &RunOverrides) -> Result<(), Failure> {
    let mut config = ExperimentConfig::load(path)?;
    if let Some(copies) = overrides.copies {
        config.copies = copies;
    }
    overrides.grid.apply(&mut config.grid);
    if overrides.amplitudes_out.is_some() {
        config.outputs.amplitudes = overrides.amplitudes_out.clone();
    }
    if overrides.bmatrix_out.is_some() {
        config.outputs.bmatrix = overrides.bmatrix_out.clone();
    }
    if overrides.events_out.is_some() {
        config.outputs.events = overrides.events_out.clone();
    }
    let summary = run(&config)?;
    print!("{}", summary.render());
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    check_guard_env()?;
    match cli.command {
        Command::Scheme {
            command: SchemeCommand::Info { scheme },
        } => scheme_info(&scheme),
        Command::Krawtchouk {
            command:
                KrawtchoukCommand::Eval {
                    scheme,
                    copies,
                    index,
                    index_tilde,
                    method,
                },
        } => krawtchouk_eval(&scheme, copies, &index, &index_tilde, method),
        Command::Walk { command } => match command {
            WalkCommand::Amplitudes { walk, grid, times, out } => walk_amplitudes(&walk, &grid, &times, out.as_ref()),
            WalkCommand::Bmatrix { walk, out } => walk_bmatrix(&walk, out.as_ref()),
            WalkCommand::Detect {
                scenario,
                n,
                d,
                copies,
                k,
                grid,
                tol,
                zt,
                out,
            } => walk_detect(scenario, n, d, copies, k, &grid, tol, zt, out.as_ref()),
        },
        Command::Verify { suite, out } => verify_command(suite, out.as_ref()),
        Command::Run { config, overrides } => run_command(&config, &overrides),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
