//! Experiment configuration, artifact writers and verification suites behind the
//! `simplexwalk` binary.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use simplexwalk_core::detectors::{
    hypercube_pst_scenario, ngon_mpst_scenario, ow_fr_scenario, ow_target_args, scan, zero_transfer_candidates,
    TransferEvent, FR_TOL, OW_EVENT_TIME, PST_TOL,
};
use simplexwalk_core::scheme::{directed_ngon, ordered_word_scheme, trivial_scheme_2, AssociationScheme};
use simplexwalk_core::walk::{
    canonical_ngon_weights, projected_matrix, solve_weights, sweep, time_grid, AmplitudeProfile, ProjectedMatrix,
    WalkSpec,
};
use simplexwalk_core::Error as CoreError;

mod verify;

pub use verify::{verify, CheckResult, Suite, VerifyReport};

/// Environment variable overriding the dense-oracle size guard.
pub const GUARD_ENV: &str = "SIMPLEXWALK_GUARD";

/// Failure classes with distinct exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Malformed or inconsistent configuration (exit 2).
    Config(anyhow::Error),
    /// A verification check or runtime step failed (exit 1).
    Run(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Run(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "invalid configuration: {e:#}"),
            Failure::Run(e) => write!(f, "{e:#}"),
        }
    }
}

pub fn config_error(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Config(e.into())
}

pub fn run_error(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Run(e.into())
}

/// Core errors caused by bad input are configuration errors; the rest are run errors.
pub fn classify_core(e: CoreError) -> Failure {
    match e {
        CoreError::InvalidParameter(_)
        | CoreError::DimensionMismatch(_)
        | CoreError::WeightMismatch { .. }
        | CoreError::NotHermitian(_)
        | CoreError::OutOfRange(_)
        | CoreError::Singular
        | CoreError::RoundTrip(_)
        | CoreError::SizeGuard { .. } => Failure::Config(e.into()),
        _ => Failure::Run(e.into()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Ngon,
    Trivial2,
    Ow,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    /// Polygon size for `ngon`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Word length for `ow`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
}

impl SchemeConfig {
    pub fn build(&self) -> Result<AssociationScheme, Failure> {
        match self.kind {
            SchemeKind::Ngon => {
                let n = self.n.ok_or_else(|| config_error(anyhow!("scheme ngon needs n")))?;
                directed_ngon(n).map_err(classify_core)
            }
            SchemeKind::Trivial2 => Ok(trivial_scheme_2()),
            SchemeKind::Ow => {
                let d = self.d.ok_or_else(|| config_error(anyhow!("scheme ow needs d")))?;
                ordered_word_scheme(d).map_err(classify_core)
            }
        }
    }
}

/// Where the walk weights come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightSource {
    /// `w_j = 1/(zeta^{-j} - 1)`; polygons only.
    Canonical,
    /// One `[re, im]` pair per non-identity class.
    Explicit(Vec<[f64; 2]>),
    /// Weights with `z_l(t) = exp(i args_l)`.
    Solve { t: f64, args: Vec<f64> },
}

impl WeightSource {
    pub fn resolve(&self, scheme: &AssociationScheme, kind: SchemeKind) -> Result<Vec<Complex64>, Failure> {
        match self {
            WeightSource::Canonical => {
                if kind != SchemeKind::Ngon {
                    return Err(config_error(anyhow!("canonical weights are defined for ngon only")));
                }
                Ok(canonical_ngon_weights(scheme.size()))
            }
            WeightSource::Explicit(pairs) => Ok(pairs.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()),
            WeightSource::Solve { t, args } => solve_weights(scheme, *t, args)
                .map(|s| s.weights)
                .map_err(classify_core),
        }
    }

    /// Parses the command-line form: `canonical`, or a comma-separated list of complex
    /// numbers such as `0.5,1-2i`.
    pub fn parse_flag(s: &str) -> Result<Self, Failure> {
        if s.trim() == "canonical" {
            return Ok(WeightSource::Canonical);
        }
        s.split(',')
            .map(|part| {
                part.trim()
                    .parse::<Complex64>()
                    .map(|z| [z.re, z.im])
                    .map_err(|_| config_error(anyhow!("cannot parse weight '{part}'")))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(WeightSource::Explicit)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_min: f64,
    pub t_max: f64,
    /// Number of intervals; the grid has `steps + 1` points.
    pub steps: usize,
}

impl GridConfig {
    pub fn points(&self) -> Result<Vec<f64>, Failure> {
        if !(self.t_min.is_finite() && self.t_max.is_finite()) || self.t_max < self.t_min {
            return Err(config_error(anyhow!(
                "time grid needs finite t_min <= t_max, got [{}, {}]",
                self.t_min,
                self.t_max
            )));
        }
        Ok(time_grid(self.t_min, self.t_max, self.steps))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_pst")]
    pub pst: f64,
    #[serde(default = "default_fr")]
    pub fr: f64,
}

fn default_pst() -> f64 {
    PST_TOL
}

fn default_fr() -> f64 {
    FR_TOL
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            pst: PST_TOL,
            fr: FR_TOL,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// CSV of site amplitudes over the grid.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<PathBuf>,
    /// JSON of the projected matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bmatrix: Option<PathBuf>,
    /// JSON array of detected events.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub events: Option<PathBuf>,
}

/// A complete, shareable experiment description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub scheme: SchemeConfig,
    pub copies: usize,
    #[serde(default = "default_weights")]
    pub weights: WeightSource,
    pub grid: GridConfig,
    /// Explicit evaluation times; when present they replace the grid for amplitudes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub outputs: Outputs,
    /// Also report sites that stay empty over the whole grid.
    #[serde(default)]
    pub zero_transfer: bool,
}

fn default_weights() -> WeightSource {
    WeightSource::Canonical
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, Failure> {
        serde_json::from_str(text).map_err(|e| config_error(anyhow!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))
            .map_err(Failure::Config)?;
        Self::from_json(&text)
    }

    /// Builds the walk and rejects non-Hermitian weights.
    pub fn spec(&self) -> Result<WalkSpec, Failure> {
        let scheme = self.scheme.build()?;
        let weights = self.weights.resolve(&scheme, self.scheme.kind)?;
        WalkSpec::hermitian(scheme, self.copies, weights).map_err(classify_core)
    }

    pub fn evaluation_times(&self) -> Result<Vec<f64>, Failure> {
        match &self.times {
            Some(t) if t.iter().all(|v| v.is_finite()) => Ok(t.clone()),
            Some(_) => Err(config_error(anyhow!("times must be finite"))),
            None => self.grid.points(),
        }
    }

    pub fn scenario(kind: ScenarioKind, n: Option<usize>, d: Option<usize>, copies: usize, k: usize) -> Result<Self, Failure> {
        let (scheme, weights, horizon) = match kind {
            ScenarioKind::Ngon => {
                let n = n.ok_or_else(|| config_error(anyhow!("ngon scenario needs --n")))?;
                let s = ngon_mpst_scenario(n, copies).map_err(classify_core)?;
                (
                    SchemeConfig {
                        kind: SchemeKind::Ngon,
                        n: Some(n),
                        d: None,
                    },
                    WeightSource::Canonical,
                    s.horizon,
                )
            }
            ScenarioKind::Hypercube => {
                let s = hypercube_pst_scenario(copies).map_err(classify_core)?;
                (
                    SchemeConfig {
                        kind: SchemeKind::Trivial2,
                        n: None,
                        d: None,
                    },
                    WeightSource::Explicit(vec![[1.0, 0.0]]),
                    s.horizon,
                )
            }
            ScenarioKind::Ow => {
                let d = d.ok_or_else(|| config_error(anyhow!("ow scenario needs --d")))?;
                let s = ow_fr_scenario(d, copies, k).map_err(classify_core)?;
                (
                    SchemeConfig {
                        kind: SchemeKind::Ow,
                        n: None,
                        d: Some(d),
                    },
                    WeightSource::Solve {
                        t: OW_EVENT_TIME,
                        args: ow_target_args(d, k).map_err(classify_core)?,
                    },
                    s.horizon,
                )
            }
        };
        Ok(Self {
            scheme,
            copies,
            weights,
            grid: GridConfig {
                t_min: 0.0,
                t_max: horizon,
                steps: 2000,
            },
            times: None,
            tolerances: Tolerances::default(),
            outputs: Outputs::default(),
            zero_transfer: false,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum ScenarioKind {
    Ngon,
    Hypercube,
    Ow,
}

fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV with header `t,beta,re,im,prob`; `re`/`im` are the site amplitude
/// `f_beta sqrt(k_beta)` and `prob` is `k_beta |f_beta|^2`.
pub fn amplitudes_csv(profiles: &[AmplitudeProfile]) -> anyhow::Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["t", "beta", "re", "im", "prob"])?;
    for p in profiles {
        let t = fmt_float(p.time);
        for s in &p.sites {
            w.write_record([
                t.as_str(),
                &s.beta.label(),
                &fmt_float(s.site_amplitude.re),
                &fmt_float(s.site_amplitude.im),
                &fmt_float(s.probability),
            ])?;
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[derive(Serialize)]
struct ComplexEntry {
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct BMatrixDocument<'a> {
    order: &'a [simplexwalk_core::MultiIndex],
    entries: Vec<Vec<ComplexEntry>>,
}

/// `{"order": [...], "entries": [[{"re", "im"}, ..], ..]}`.
pub fn bmatrix_json(pm: &ProjectedMatrix) -> anyhow::Result<String> {
    let entries = (0..pm.dimension())
        .map(|r| {
            (0..pm.dimension())
                .map(|c| ComplexEntry {
                    re: pm.entries[(r, c)].re,
                    im: pm.entries[(r, c)].im,
                })
                .collect()
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&BMatrixDocument {
        order: &pm.order,
        entries,
    })?;
    s.push('\n');
    Ok(s)
}

pub fn events_json(events: &[TransferEvent]) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(events)?;
    s.push('\n');
    Ok(s)
}

pub fn write_artifact(path: &Path, contents: &str) -> Result<(), Failure> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)
            .with_context(|| format!("creating {}", parent.display()))
            .map_err(Failure::Run)?;
    }
    fs::write(path, contents)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Run)
}

/// What [`run`] produced.
#[derive(Clone, Debug, Default, Serialize)]
pub struct RunSummary {
    pub profiles: usize,
    pub events: Vec<TransferEvent>,
    pub max_normalization_residual: f64,
    pub bmatrix_hermitian_residual: Option<f64>,
    pub written: Vec<PathBuf>,
}

impl RunSummary {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} profiles, max normalization residual {:.3e}",
            self.profiles, self.max_normalization_residual
        );
        if let Some(r) = self.bmatrix_hermitian_residual {
            let _ = writeln!(s, "projected matrix Hermitian residual {r:.3e}");
        }
        let _ = writeln!(s, "{} events", self.events.len());
        for e in &self.events {
            let support: Vec<String> = e.support.iter().map(|b| b.label()).collect();
            let _ = writeln!(
                s,
                "  t={:.12} {} [{}] fidelity {:.12}",
                e.time,
                e.kind.as_str(),
                support.join(" "),
                e.fidelity
            );
        }
        for p in &self.written {
            let _ = writeln!(s, "wrote {}", p.display());
        }
        s
    }
}

/// Runs an experiment and writes every requested artifact.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary, Failure> {
    let spec = config.spec()?;
    let mut summary = RunSummary::default();

    if let Some(path) = &config.outputs.amplitudes {
        let profiles = sweep(&spec, &config.evaluation_times()?);
        summary.profiles = profiles.len();
        summary.max_normalization_residual = profiles
            .iter()
            .map(AmplitudeProfile::normalization_residual)
            .fold(0.0, f64::max);
        write_artifact(path, &amplitudes_csv(&profiles).map_err(run_error)?)?;
        summary.written.push(path.clone());
    }
    if let Some(path) = &config.outputs.bmatrix {
        let pm = projected_matrix(&spec);
        summary.bmatrix_hermitian_residual = Some(pm.hermitian_residual());
        write_artifact(path, &bmatrix_json(&pm).map_err(run_error)?)?;
        summary.written.push(path.clone());
    }
    if let Some(path) = &config.outputs.events {
        summary.events = detect(&spec, config)?;
        write_artifact(path, &events_json(&summary.events).map_err(run_error)?)?;
        summary.written.push(path.clone());
    }
    Ok(summary)
}

/// Events over the configured grid, with zero-transfer candidates when requested.
pub fn detect(spec: &WalkSpec, config: &ExperimentConfig) -> Result<Vec<TransferEvent>, Failure> {
    let grid = config.grid.points()?;
    let mut events = scan(spec, &grid, config.tolerances.pst).map_err(classify_core)?;
    if config.zero_transfer {
        events.extend(zero_transfer_candidates(spec, &grid, config.tolerances.fr));
    }
    Ok(events)
}

/// Oracle size guard, taken from [`GUARD_ENV`] when set.
pub fn guard_from_env(default: usize) -> usize {
    std::env::var(GUARD_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(default)
}

/// Rejects a [`GUARD_ENV`] value that is not a positive integer.
pub fn check_guard_env() -> Result<(), Failure> {
    match std::env::var(GUARD_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(g) if g > 0 => Ok(()),
            _ => Err(config_error(anyhow!("{GUARD_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(()),
    }
}
