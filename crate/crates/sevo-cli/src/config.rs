//! Experiment configuration.
//!
//! One TOML file describes a run. Parsing is two-stage: the `Raw*` structs
//! mirror the file with everything optional that has a default, and
//! [`Resolved`] carries the fully materialized values. The manifest written
//! into each run directory echoes `Resolved`, so a run can always be
//! reproduced from its own artifacts. Rational-valued fields accept either a
//! TOML number or a string like `"3/2"`; strings keep exact orders exact.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use sevo::analysis::AnalysisError;
use sevo::model::{
    derive_constants, parse_rational, rat, Corollary, ModelError, ModelParams, Rational, Theorem,
};
use sevo::propagator::PropagatorError;
use sevo::semilinear::{CouplingKind, SemilinearError};
use sevo::spectral::{SpectralError, MAX_POINTS_PER_AXIS};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: `{field}`: {msg}")]
    Config { field: String, msg: String },
    #[error("cannot access `{path}`: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config parse error in `{path}`: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Propagator(#[from] PropagatorError),
    #[error(transparent)]
    Semilinear(#[from] SemilinearError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("{0}")]
    Other(String),
}

pub fn cfg_err(field: &str, msg: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        msg: msg.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Rates,
    Regions,
    Simulate,
    SweepLifespan,
    VerifyLinear,
    VerifyLemmas,
    Report,
}

impl CommandKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CommandKind::Rates => "rates",
            CommandKind::Regions => "regions",
            CommandKind::Simulate => "simulate",
            CommandKind::SweepLifespan => "sweep-lifespan",
            CommandKind::VerifyLinear => "verify-linear",
            CommandKind::VerifyLemmas => "verify-lemmas",
            CommandKind::Report => "report",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "rates" => CommandKind::Rates,
            "regions" => CommandKind::Regions,
            "simulate" => CommandKind::Simulate,
            "sweep-lifespan" => CommandKind::SweepLifespan,
            "verify-linear" => CommandKind::VerifyLinear,
            "verify-lemmas" => CommandKind::VerifyLemmas,
            "report" => CommandKind::Report,
            _ => return None,
        })
    }
}

/// Rational-valued config entry: TOML integer, float, or exact string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum RatIn {
    Int(i64),
    Float(f64),
    Str(String),
}

impl RatIn {
    fn to_rational(&self, field: &str) -> Result<Rational, CliError> {
        let parsed = match self {
            RatIn::Int(i) => Ok(Rational::from_integer(*i)),
            RatIn::Float(f) => parse_rational(&format!("{f}")),
            RatIn::Str(s) => parse_rational(s),
        };
        parsed.map_err(|e| cfg_err(field, e.to_string()))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub command: Option<String>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub params: RawParams,
    #[serde(default)]
    pub grid: RawGrid,
    #[serde(default)]
    pub data: RawData,
    #[serde(default)]
    pub rates: RawRates,
    #[serde(default)]
    pub regions: RawRegions,
    #[serde(default)]
    pub simulate: RawSimulate,
    #[serde(default)]
    pub sweep: RawSweep,
    #[serde(default)]
    pub verify_linear: RawVerifyLinear,
    #[serde(default)]
    pub verify_lemmas: RawVerifyLemmas,
    #[serde(default)]
    pub report: RawReport,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    pub sigma: RatIn,
    pub delta: RatIn,
    pub n: u32,
    pub p: Option<RatIn>,
    pub q: Option<RatIn>,
    pub m: Option<RatIn>,
    pub s1: Option<RatIn>,
    pub s2: Option<RatIn>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGrid {
    pub points: Option<usize>,
    pub half_length: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawData {
    pub u0: Option<RawProfile>,
    pub u1: Option<RawProfile>,
    pub v0: Option<RawProfile>,
    pub v1: Option<RawProfile>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawProfile {
    pub profile: String,
    pub amplitude: Option<f64>,
    pub width: Option<f64>,
    pub mode: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRates {
    pub j_values: Option<Vec<u8>>,
    pub a_values: Option<Vec<RatIn>>,
    pub corollary: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRegions {
    pub p_min: Option<RatIn>,
    pub p_max: Option<RatIn>,
    pub p_steps: Option<usize>,
    pub q_min: Option<RatIn>,
    pub q_max: Option<RatIn>,
    pub q_steps: Option<usize>,
    pub theorems: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSimulate {
    pub coupling: Option<String>,
    pub horizon: Option<f64>,
    pub dt: Option<f64>,
    pub nonlinear: Option<bool>,
    pub blowup_threshold: Option<f64>,
    pub samples_per_decade: Option<usize>,
    pub norms: Option<Vec<RawNorm>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNorm {
    pub j: u8,
    pub a: Option<RatIn>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    pub coupling: Option<String>,
    pub eps_min: Option<f64>,
    pub eps_max: Option<f64>,
    pub eps_count: Option<usize>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub half_length: Option<f64>,
    pub points: Option<usize>,
    pub bump_width: Option<f64>,
    pub threshold_factor: Option<f64>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawVerifyLinear {
    pub window: Option<[f64; 2]>,
    pub tolerance: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawVerifyLemmas {
    pub gn_samples: Option<usize>,
    pub gn_s: Option<f64>,
    pub gn_sigma: Option<f64>,
    pub gn_n: Option<u32>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawReport {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy)]
pub struct GridCfg {
    pub points: usize,
    pub half_length: f64,
}

#[derive(Debug, Clone)]
pub enum ProfileCfg {
    Gaussian { amplitude: f64, width: f64 },
    Bump { amplitude: f64, width: f64 },
    SingleMode { amplitude: f64, mode: u32 },
}

#[derive(Debug, Clone, Default)]
pub struct DataCfg {
    pub u0: Option<ProfileCfg>,
    pub u1: Option<ProfileCfg>,
    pub v0: Option<ProfileCfg>,
    pub v1: Option<ProfileCfg>,
}

#[derive(Debug, Clone)]
pub struct RatesCfg {
    pub j_values: Vec<u8>,
    pub a_values: Vec<Rational>,
    /// `None` picks the branch per `choose_corollary`.
    pub corollary: Option<Corollary>,
}

#[derive(Debug, Clone)]
pub struct RegionsCfg {
    pub p_values: Vec<Rational>,
    pub q_values: Vec<Rational>,
    pub theorems: Vec<Theorem>,
}

#[derive(Debug, Clone)]
pub struct SimCfg {
    pub coupling: CouplingKind,
    pub horizon: f64,
    pub dt: f64,
    pub nonlinear: bool,
    /// `None` derives the threshold from the initial data.
    pub blowup_threshold: Option<f64>,
    pub samples_per_decade: usize,
    pub norms: Vec<(u8, Rational)>,
}

#[derive(Debug, Clone)]
pub struct SweepCfg {
    pub coupling: CouplingKind,
    pub eps_min: f64,
    pub eps_max: f64,
    pub eps_count: usize,
    pub dt: f64,
    pub horizon: f64,
    pub half_length: f64,
    pub points: usize,
    pub bump_width: f64,
    pub threshold_factor: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyLinearCfg {
    pub window: (f64, f64),
    pub tolerance: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyLemmasCfg {
    pub gn_samples: usize,
    pub gn_s: f64,
    pub gn_sigma: f64,
    pub gn_n: u32,
}

#[derive(Debug)]
pub struct Resolved {
    pub command: CommandKind,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub params: ModelParams,
    pub grid: GridCfg,
    pub data: DataCfg,
    pub rates: RatesCfg,
    pub regions: RegionsCfg,
    pub simulate: SimCfg,
    pub sweep: SweepCfg,
    pub verify_linear: VerifyLinearCfg,
    pub verify_lemmas: VerifyLemmasCfg,
    pub report_dir: Option<PathBuf>,
}

pub fn load(path: &Path) -> Result<RawConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    toml::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

fn pos_finite(field: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(cfg_err(field, format!("must be positive and finite, got {v}")))
    }
}

fn resolve_params(raw: &RawParams) -> Result<ModelParams, CliError> {
    let sigma = raw.sigma.to_rational("params.sigma")?;
    let delta = raw.delta.to_rational("params.delta")?;
    let two = rat(2, 1);
    let p = raw.p.as_ref().map_or(Ok(two), |r| r.to_rational("params.p"))?;
    let q = raw.q.as_ref().map_or(Ok(two), |r| r.to_rational("params.q"))?;
    let m = raw
        .m
        .as_ref()
        .map_or(Ok(Rational::from_integer(1)), |r| r.to_rational("params.m"))?;
    let mut params = ModelParams::new(sigma, delta, raw.n, p, q, m).map_err(|e| match e {
        ModelError::Invalid { field, msg } => cfg_err(&format!("params.{field}"), msg),
        other => other.into(),
    })?;
    params.s1 = raw
        .s1
        .as_ref()
        .map(|r| r.to_rational("params.s1"))
        .transpose()?;
    params.s2 = raw
        .s2
        .as_ref()
        .map(|r| r.to_rational("params.s2"))
        .transpose()?;
    Ok(params)
}

fn resolve_profile(prefix: &str, raw: &RawProfile) -> Result<ProfileCfg, CliError> {
    let amplitude = raw.amplitude.unwrap_or(0.01);
    if !amplitude.is_finite() {
        return Err(cfg_err(
            &format!("{prefix}.amplitude"),
            format!("must be finite, got {amplitude}"),
        ));
    }
    let deny = |name: &str, set: bool| -> Result<(), CliError> {
        if set {
            Err(cfg_err(
                &format!("{prefix}.{name}"),
                format!("not a parameter of the `{}` profile", raw.profile),
            ))
        } else {
            Ok(())
        }
    };
    match raw.profile.as_str() {
        "gaussian" | "bump" => {
            deny("mode", raw.mode.is_some())?;
            let width = pos_finite(&format!("{prefix}.width"), raw.width.unwrap_or(1.0))?;
            if raw.profile == "gaussian" {
                Ok(ProfileCfg::Gaussian { amplitude, width })
            } else {
                Ok(ProfileCfg::Bump { amplitude, width })
            }
        }
        "single-mode" => {
            deny("width", raw.width.is_some())?;
            Ok(ProfileCfg::SingleMode {
                amplitude,
                mode: raw.mode.unwrap_or(1),
            })
        }
        other => Err(cfg_err(
            &format!("{prefix}.profile"),
            format!("unknown profile `{other}` (expected gaussian, bump, or single-mode)"),
        )),
    }
}

fn resolve_rates(raw: &RawRates, params: &ModelParams) -> Result<RatesCfg, CliError> {
    let j_values = raw.j_values.clone().unwrap_or_else(|| vec![0, 1]);
    for &j in &j_values {
        if j > 1 {
            return Err(cfg_err(
                "rates.j_values",
                format!("time-derivative orders must be 0 or 1, got {j}"),
            ));
        }
    }
    let consts = derive_constants(params);
    let a_values = match &raw.a_values {
        None => vec![Rational::from_integer(0), consts.k_plus],
        Some(list) => list
            .iter()
            .map(|r| {
                // `"k+"` and `"k-"` pick up the derived scales.
                if let RatIn::Str(s) = r {
                    match s.trim() {
                        "k+" => return Ok(consts.k_plus),
                        "k-" => return Ok(consts.k_minus),
                        _ => {}
                    }
                }
                r.to_rational("rates.a_values")
            })
            .collect::<Result<_, _>>()?,
    };
    for &a in &a_values {
        if a < Rational::from_integer(0) {
            return Err(cfg_err(
                "rates.a_values",
                format!("derivative orders must be >= 0, got {a}"),
            ));
        }
    }
    let corollary = match raw.corollary.as_deref() {
        None => None,
        Some(s) => match s.to_ascii_lowercase().as_str() {
            "auto" => None,
            "c21" | "c2.1" => Some(Corollary::C21),
            "c22" | "c2.2" => Some(Corollary::C22),
            other => {
                return Err(cfg_err(
                    "rates.corollary",
                    format!("unknown branch `{other}` (expected auto, c21, or c22)"),
                ))
            }
        },
    };
    Ok(RatesCfg {
        j_values,
        a_values,
        corollary,
    })
}

fn rational_grid(
    field: &str,
    lo: Rational,
    hi: Rational,
    steps: usize,
) -> Result<Vec<Rational>, CliError> {
    if lo > hi {
        return Err(cfg_err(field, format!("range is empty: {lo} > {hi}")));
    }
    if steps == 0 {
        return Err(cfg_err(field, "needs at least one step"));
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let d = (hi - lo) / Rational::from_integer(steps as i64 - 1);
    Ok((0..steps)
        .map(|i| lo + d * Rational::from_integer(i as i64))
        .collect())
}

fn resolve_regions(raw: &RawRegions) -> Result<RegionsCfg, CliError> {
    let one = Rational::from_integer(1);
    let p_min = raw
        .p_min
        .as_ref()
        .map_or(Ok(rat(11, 10)), |r| r.to_rational("regions.p_min"))?;
    let p_max = raw
        .p_max
        .as_ref()
        .map_or(Ok(Rational::from_integer(6)), |r| r.to_rational("regions.p_max"))?;
    let q_min = raw
        .q_min
        .as_ref()
        .map_or(Ok(rat(11, 10)), |r| r.to_rational("regions.q_min"))?;
    let q_max = raw
        .q_max
        .as_ref()
        .map_or(Ok(Rational::from_integer(6)), |r| r.to_rational("regions.q_max"))?;
    if p_min <= one {
        return Err(cfg_err("regions.p_min", "exponents must be > 1"));
    }
    if q_min <= one {
        return Err(cfg_err("regions.q_min", "exponents must be > 1"));
    }
    let p_values = rational_grid("regions.p_steps", p_min, p_max, raw.p_steps.unwrap_or(25))?;
    let q_values = rational_grid("regions.q_steps", q_min, q_max, raw.q_steps.unwrap_or(25))?;
    let theorems = match &raw.theorems {
        None => Theorem::ALL.to_vec(),
        Some(names) => names
            .iter()
            .map(|s| {
                Theorem::from_str(s).map_err(|e| cfg_err("regions.theorems", e.to_string()))
            })
            .collect::<Result<_, _>>()?,
    };
    if theorems.is_empty() {
        return Err(cfg_err("regions.theorems", "needs at least one theorem"));
    }
    Ok(RegionsCfg {
        p_values,
        q_values,
        theorems,
    })
}

fn resolve_coupling(field: &str, s: Option<&str>) -> Result<CouplingKind, CliError> {
    match s {
        None => Ok(CouplingKind::UU),
        Some(s) => CouplingKind::from_str(s).map_err(|e| cfg_err(field, e)),
    }
}

fn resolve_simulate(raw: &RawSimulate) -> Result<SimCfg, CliError> {
    let horizon = pos_finite("simulate.horizon", raw.horizon.unwrap_or(100.0))?;
    let dt = pos_finite("simulate.dt", raw.dt.unwrap_or(0.05))?;
    if dt > horizon {
        return Err(cfg_err(
            "simulate.dt",
            format!("must not exceed the horizon ({dt} > {horizon})"),
        ));
    }
    let blowup_threshold = raw
        .blowup_threshold
        .map(|v| pos_finite("simulate.blowup_threshold", v))
        .transpose()?;
    let samples_per_decade = raw.samples_per_decade.unwrap_or(40);
    if samples_per_decade == 0 {
        return Err(cfg_err("simulate.samples_per_decade", "must be at least 1"));
    }
    let norms = match &raw.norms {
        None => vec![(0u8, Rational::from_integer(0))],
        Some(list) => {
            if list.is_empty() {
                return Err(cfg_err("simulate.norms", "needs at least one entry"));
            }
            list.iter()
                .map(|n| {
                    if n.j > 1 {
                        return Err(cfg_err(
                            "simulate.norms",
                            format!("time-derivative orders must be 0 or 1, got {}", n.j),
                        ));
                    }
                    let a = n
                        .a
                        .as_ref()
                        .map_or(Ok(Rational::from_integer(0)), |r| {
                            r.to_rational("simulate.norms")
                        })?;
                    if a < Rational::from_integer(0) {
                        return Err(cfg_err(
                            "simulate.norms",
                            format!("derivative orders must be >= 0, got {a}"),
                        ));
                    }
                    Ok((n.j, a))
                })
                .collect::<Result<_, _>>()?
        }
    };
    Ok(SimCfg {
        coupling: resolve_coupling("simulate.coupling", raw.coupling.as_deref())?,
        horizon,
        dt,
        nonlinear: raw.nonlinear.unwrap_or(true),
        blowup_threshold,
        samples_per_decade,
        norms,
    })
}

fn resolve_sweep(raw: &RawSweep) -> Result<SweepCfg, CliError> {
    let eps_min = pos_finite("sweep.eps_min", raw.eps_min.unwrap_or(1e-3))?;
    let eps_max = pos_finite("sweep.eps_max", raw.eps_max.unwrap_or(1e-2))?;
    if eps_max < 10.0 * eps_min {
        return Err(cfg_err(
            "sweep.eps_max",
            format!("the sweep must span at least one decade ({eps_min} .. {eps_max})"),
        ));
    }
    let eps_count = raw.eps_count.unwrap_or(5);
    if eps_count < 5 {
        return Err(cfg_err("sweep.eps_count", "needs at least 5 points"));
    }
    let points = raw.points.unwrap_or(256);
    if points < 2 || !points.is_multiple_of(2) || points > MAX_POINTS_PER_AXIS[0] {
        return Err(cfg_err(
            "sweep.points",
            format!("must be even and within 2..={}", MAX_POINTS_PER_AXIS[0]),
        ));
    }
    Ok(SweepCfg {
        coupling: resolve_coupling("sweep.coupling", raw.coupling.as_deref())?,
        eps_min,
        eps_max,
        eps_count,
        dt: pos_finite("sweep.dt", raw.dt.unwrap_or(0.01))?,
        horizon: pos_finite("sweep.horizon", raw.horizon.unwrap_or(1e5))?,
        half_length: pos_finite("sweep.half_length", raw.half_length.unwrap_or(10.0))?,
        points,
        bump_width: pos_finite("sweep.bump_width", raw.bump_width.unwrap_or(8.0))?,
        threshold_factor: pos_finite(
            "sweep.threshold_factor",
            raw.threshold_factor.unwrap_or(1e6),
        )?,
        tolerance: pos_finite("sweep.tolerance", raw.tolerance.unwrap_or(0.25))?,
    })
}

fn resolve_verify_linear(raw: &RawVerifyLinear) -> Result<VerifyLinearCfg, CliError> {
    let [lo, hi] = raw.window.unwrap_or([1e2, 1e4]);
    pos_finite("verify_linear.window", lo)?;
    pos_finite("verify_linear.window", hi)?;
    if lo >= hi {
        return Err(cfg_err(
            "verify_linear.window",
            format!("needs lo < hi, got [{lo}, {hi}]"),
        ));
    }
    Ok(VerifyLinearCfg {
        window: (lo, hi),
        tolerance: pos_finite("verify_linear.tolerance", raw.tolerance.unwrap_or(0.05))?,
    })
}

fn resolve_verify_lemmas(raw: &RawVerifyLemmas) -> Result<VerifyLemmasCfg, CliError> {
    let gn_samples = raw.gn_samples.unwrap_or(1000);
    if gn_samples == 0 {
        return Err(cfg_err("verify_lemmas.gn_samples", "must be at least 1"));
    }
    let gn_sigma = pos_finite("verify_lemmas.gn_sigma", raw.gn_sigma.unwrap_or(1.5))?;
    let gn_s = raw.gn_s.unwrap_or(0.75);
    if !(0.0..=gn_sigma).contains(&gn_s) {
        return Err(cfg_err(
            "verify_lemmas.gn_s",
            format!("must lie in [0, gn_sigma] = [0, {gn_sigma}], got {gn_s}"),
        ));
    }
    let gn_n = raw.gn_n.unwrap_or(1);
    if !(1..=3).contains(&gn_n) {
        return Err(cfg_err("verify_lemmas.gn_n", "must be 1, 2, or 3"));
    }
    Ok(VerifyLemmasCfg {
        gn_samples,
        gn_s,
        gn_sigma,
        gn_n,
    })
}

/// Checks only what `simulate` will actually instantiate; other commands
/// ignore the grid and data sections entirely.
fn validate_simulation_geometry(
    params: &ModelParams,
    grid: &GridCfg,
    data: &DataCfg,
) -> Result<(), CliError> {
    let n = params.n as usize;
    if !(1..=3).contains(&n) {
        return Err(cfg_err(
            "params.n",
            format!("simulation grids support n in 1..=3, got {n}"),
        ));
    }
    let cap = MAX_POINTS_PER_AXIS[n - 1];
    if grid.points > cap {
        return Err(cfg_err(
            "grid.points",
            format!("at most {cap} points per axis in {n} dimensions"),
        ));
    }
    for (name, prof) in [
        ("u0", &data.u0),
        ("u1", &data.u1),
        ("v0", &data.v0),
        ("v1", &data.v1),
    ] {
        if let Some(ProfileCfg::SingleMode { mode, .. }) = prof {
            if *mode as usize >= grid.points / 2 {
                return Err(cfg_err(
                    &format!("data.{name}.mode"),
                    format!(
                        "mode {mode} is not representable on {} points (needs mode < {})",
                        grid.points,
                        grid.points / 2
                    ),
                ));
            }
        }
    }
    Ok(())
}

pub fn resolve(
    raw: RawConfig,
    cli_command: Option<CommandKind>,
    cli_out: Option<PathBuf>,
    cli_seed: Option<u64>,
) -> Result<Resolved, CliError> {
    let from_cfg = raw
        .command
        .as_deref()
        .map(|s| {
            CommandKind::parse(s).ok_or_else(|| cfg_err("command", format!("unknown command `{s}`")))
        })
        .transpose()?;
    let command = match (cli_command, from_cfg) {
        (Some(c), Some(f)) if c != f => {
            return Err(cfg_err(
                "command",
                format!(
                    "config names `{}` but the command line asks for `{}`",
                    f.as_str(),
                    c.as_str()
                ),
            ))
        }
        (Some(c), _) => c,
        (None, Some(f)) => f,
        (None, None) => {
            return Err(cfg_err(
                "command",
                "give a subcommand on the command line or a `command` field in the config",
            ))
        }
    };

    let params = resolve_params(&raw.params)?;
    let grid = GridCfg {
        points: {
            let p = raw.grid.points.unwrap_or(256);
            if p < 2 || !p.is_multiple_of(2) {
                return Err(cfg_err("grid.points", format!("must be even and >= 2, got {p}")));
            }
            p
        },
        half_length: pos_finite("grid.half_length", raw.grid.half_length.unwrap_or(10.0))?,
    };
    let data = DataCfg {
        u0: raw.data.u0.as_ref().map(|r| resolve_profile("data.u0", r)).transpose()?,
        u1: raw.data.u1.as_ref().map(|r| resolve_profile("data.u1", r)).transpose()?,
        v0: raw.data.v0.as_ref().map(|r| resolve_profile("data.v0", r)).transpose()?,
        v1: raw.data.v1.as_ref().map(|r| resolve_profile("data.v1", r)).transpose()?,
    };
    if command == CommandKind::Simulate {
        validate_simulation_geometry(&params, &grid, &data)?;
    }

    Ok(Resolved {
        command,
        seed: cli_seed.or(raw.seed).unwrap_or(0),
        out_dir: cli_out
            .or(raw.out_dir)
            .unwrap_or_else(|| PathBuf::from("runs")),
        rates: resolve_rates(&raw.rates, &params)?,
        regions: resolve_regions(&raw.regions)?,
        simulate: resolve_simulate(&raw.simulate)?,
        sweep: resolve_sweep(&raw.sweep)?,
        verify_linear: resolve_verify_linear(&raw.verify_linear)?,
        verify_lemmas: resolve_verify_lemmas(&raw.verify_lemmas)?,
        report_dir: raw.report.dir,
        params,
        grid,
        data,
    })
}

pub fn branch_name(c: Corollary) -> &'static str {
    match c {
        Corollary::C21 => "c21",
        Corollary::C22 => "c22",
    }
}

fn profile_json(p: &Option<ProfileCfg>) -> Value {
    match p {
        None => Value::Null,
        Some(ProfileCfg::Gaussian { amplitude, width }) => {
            json!({"profile": "gaussian", "amplitude": amplitude, "width": width})
        }
        Some(ProfileCfg::Bump { amplitude, width }) => {
            json!({"profile": "bump", "amplitude": amplitude, "width": width})
        }
        Some(ProfileCfg::SingleMode { amplitude, mode }) => {
            json!({"profile": "single-mode", "amplitude": amplitude, "mode": mode})
        }
    }
}

/// The manifest covers everything that can influence results. Delivery knobs
/// (output root, worker count) stay out so that the run id identifies the
/// experiment, not where it landed.
pub fn manifest(r: &Resolved) -> Value {
    let rs = |x: Rational| x.to_string();
    json!({
        "command": r.command.as_str(),
        "seed": r.seed,
        "params": {
            "sigma": rs(r.params.sigma),
            "delta": rs(r.params.delta),
            "n": r.params.n,
            "p": rs(r.params.p),
            "q": rs(r.params.q),
            "m": rs(r.params.m),
            "s1": r.params.s1.map(rs),
            "s2": r.params.s2.map(rs),
        },
        "grid": {
            "points": r.grid.points,
            "half_length": r.grid.half_length,
        },
        "data": {
            "u0": profile_json(&r.data.u0),
            "u1": profile_json(&r.data.u1),
            "v0": profile_json(&r.data.v0),
            "v1": profile_json(&r.data.v1),
        },
        "rates": {
            "j_values": r.rates.j_values,
            "a_values": r.rates.a_values.iter().map(|&a| rs(a)).collect::<Vec<_>>(),
            "corollary": r.rates.corollary.map_or("auto", branch_name),
        },
        "regions": {
            "p_values": r.regions.p_values.iter().map(|&x| rs(x)).collect::<Vec<_>>(),
            "q_values": r.regions.q_values.iter().map(|&x| rs(x)).collect::<Vec<_>>(),
            "theorems": r.regions.theorems.iter().map(|t| t.name()).collect::<Vec<_>>(),
        },
        "simulate": {
            "coupling": r.simulate.coupling.name(),
            "horizon": r.simulate.horizon,
            "dt": r.simulate.dt,
            "nonlinear": r.simulate.nonlinear,
            "blowup_threshold": r.simulate.blowup_threshold,
            "samples_per_decade": r.simulate.samples_per_decade,
            "norms": r.simulate.norms.iter()
                .map(|&(j, a)| json!({"j": j, "a": rs(a)}))
                .collect::<Vec<_>>(),
        },
        "sweep": {
            "coupling": r.sweep.coupling.name(),
            "eps_min": r.sweep.eps_min,
            "eps_max": r.sweep.eps_max,
            "eps_count": r.sweep.eps_count,
            "dt": r.sweep.dt,
            "horizon": r.sweep.horizon,
            "half_length": r.sweep.half_length,
            "points": r.sweep.points,
            "bump_width": r.sweep.bump_width,
            "threshold_factor": r.sweep.threshold_factor,
            "tolerance": r.sweep.tolerance,
        },
        "verify_linear": {
            "window": [r.verify_linear.window.0, r.verify_linear.window.1],
            "tolerance": r.verify_linear.tolerance,
        },
        "verify_lemmas": {
            "gn_samples": r.verify_lemmas.gn_samples,
            "gn_s": r.verify_lemmas.gn_s,
            "gn_sigma": r.verify_lemmas.gn_sigma,
            "gn_n": r.verify_lemmas.gn_n,
        },
        "report": {
            "dir": r.report_dir.as_ref().map(|p| p.display().to_string()),
        },
    })
}

/// First 16 hex digits of the manifest hash; long enough to never collide
/// within one output root, short enough for directory names.
pub fn run_id(manifest: &Value) -> String {
    let bytes = serde_json::to_vec(manifest).expect("manifest is always serializable");
    let digest = Sha256::digest(&bytes);
    let mut id = String::with_capacity(16);
    for b in &digest[..8] {
        let _ = write!(id, "{b:02x}");
    }
    id
}
