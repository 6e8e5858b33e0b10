//! Flat `key = value` experiment configuration.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Unknown and repeated keys are rejected so that a typo in a sweep file
//! cannot silently fall back to a default. List-valued keys take
//! comma-separated entries.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nlac_core::{Model, Scheme};

use crate::error::{HarnessError, Result};

/// One `key = value` line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Splits configuration text into entries without interpreting values.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>> {
    let mut entries: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) =
            body.split_once('=').ok_or_else(|| config_err(line, format!("expected `key = value`, found {body:?}")))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
            return Err(config_err(line, format!("invalid key {key:?}")));
        }
        if value.is_empty() {
            return Err(config_err(line, format!("missing value for {key}")));
        }
        if let Some(prev) = entries.iter().find(|e| e.key == key) {
            return Err(config_err(line, format!("{key} already set on line {}", prev.line)));
        }
        entries.push(Entry { line, key: key.to_string(), value: value.to_string() });
    }
    Ok(entries)
}

fn config_err(line: usize, message: impl Into<String>) -> HarnessError {
    HarnessError::Config { line, message: message.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    Run,
    ConvergenceTime,
    ConvergenceSpace,
    ConvergenceDelta,
    Stability,
    Bubble,
    Coeffs,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Run,
        ExperimentKind::ConvergenceTime,
        ExperimentKind::ConvergenceSpace,
        ExperimentKind::ConvergenceDelta,
        ExperimentKind::Stability,
        ExperimentKind::Bubble,
        ExperimentKind::Coeffs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::Run => "run",
            ExperimentKind::ConvergenceTime => "convergence-time",
            ExperimentKind::ConvergenceSpace => "convergence-space",
            ExperimentKind::ConvergenceDelta => "convergence-delta",
            ExperimentKind::Stability => "stability",
            ExperimentKind::Bubble => "bubble",
            ExperimentKind::Coeffs => "coeffs",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| HarnessError::Usage(format!("unknown experiment {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    Sine,
    Random,
    Bubble,
}

impl fmt::Display for InitialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InitialKind::Sine => "sine",
            InitialKind::Random => "random",
            InitialKind::Bubble => "bubble",
        })
    }
}

impl FromStr for InitialKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sine" => Ok(InitialKind::Sine),
            "random" => Ok(InitialKind::Random),
            "bubble" => Ok(InitialKind::Bubble),
            _ => Err(format!("unknown initial condition {s:?} (expected sine, random or bubble)")),
        }
    }
}

/// Every knob of every experiment. Keys that an experiment does not use are
/// still accepted, so one file can drive related experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub alpha: f64,
    pub alphas: Vec<f64>,
    pub delta: f64,
    pub deltas: Vec<f64>,
    pub eps: f64,
    pub kappa: f64,
    /// Permit `kappa < 2`; maximum-principle checks are then disabled.
    pub unstable_kappa: bool,
    pub n: usize,
    pub sizes: Vec<usize>,
    pub extent: f64,
    pub tau: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    pub model: Model,
    pub initial: InitialKind,
    /// Sine amplitude or half-width of the uniform random range.
    pub amplitude: f64,
    /// Bubble radius; defaults to a quarter of the domain.
    pub bubble_radius: Option<f64>,
    /// Bubble interface width; defaults to `eps`.
    pub bubble_width: Option<f64>,
    pub seed: u64,
    /// Number of halvings in the temporal and horizon sweeps.
    pub levels: usize,
    /// Temporal benchmark step is the finest step divided by this.
    pub benchmark_divisor: usize,
    pub benchmark_n: usize,
    pub steady_tolerance: Option<f64>,
    pub dump_times: Vec<f64>,
    /// Also run the local model alongside the nonlocal ones.
    pub include_local: bool,
    pub log_stride: Option<usize>,
    pub quadrature_order: usize,
    pub allow_wrap: bool,
}

impl ExperimentConfig {
    /// Defaults reproduce the desk-scale version of each experiment.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let mut c = ExperimentConfig {
            kind,
            alpha: 1.0,
            alphas: vec![1.0, 3.0],
            delta: 2.0,
            deltas: vec![0.2, 2.0],
            eps: 0.1,
            kappa: 2.0,
            unstable_kappa: false,
            n: 128,
            sizes: vec![16, 32, 64, 128, 256],
            extent: 2.0 * PI,
            tau: 0.01,
            t_end: 0.5,
            scheme: Scheme::Etdrk2,
            model: Model::Nonlocal,
            initial: InitialKind::Sine,
            amplitude: 0.5,
            bubble_radius: None,
            bubble_width: None,
            seed: 0,
            levels: 6,
            benchmark_divisor: 64,
            benchmark_n: 512,
            steady_tolerance: None,
            dump_times: Vec::new(),
            include_local: false,
            log_stride: None,
            quadrature_order: nlac_core::operator::DEFAULT_QUADRATURE_ORDER,
            allow_wrap: false,
        };
        match kind {
            ExperimentKind::Run => {}
            ExperimentKind::Coeffs => {
                c.delta = 0.2;
                c.n = 10;
                c.extent = 1.0;
            }
            ExperimentKind::ConvergenceTime => c.tau = 0.05,
            ExperimentKind::ConvergenceSpace => c.tau = 0.5,
            ExperimentKind::ConvergenceDelta => {
                c.alphas = vec![1.0];
                c.delta = 0.2;
                c.levels = 4;
                c.n = 512;
                c.tau = 0.5;
            }
            ExperimentKind::Stability => {
                c.deltas = vec![0.3, 0.4];
                c.n = 512;
                c.t_end = 200.0;
                c.initial = InitialKind::Random;
                c.amplitude = 0.9;
                c.steady_tolerance = Some(nlac_core::etd::STEADY_STATE_TOLERANCE);
                c.dump_times = vec![6.0, 14.0, 50.0, 180.0];
                c.include_local = true;
            }
            ExperimentKind::Bubble => {
                c.deltas = vec![0.2, 0.8, 1.6, 3.2];
                c.n = 512;
                c.t_end = 300.0;
                c.initial = InitialKind::Bubble;
                c.steady_tolerance = Some(nlac_core::etd::STEADY_STATE_TOLERANCE);
                c.allow_wrap = true;
            }
        }
        c
    }

    /// Defaults for `kind` overridden by the entries of `text`.
    pub fn from_text(kind: ExperimentKind, text: &str) -> Result<Self> {
        let mut c = Self::defaults(kind);
        for e in parse_entries(text)? {
            c.set(&e.key, &e.value).map_err(|m| config_err(e.line, m))?;
        }
        Ok(c)
    }

    /// Applies a single `key=value` override.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "alpha" => self.alpha = real(value)?,
            "alphas" => self.alphas = list(value, real)?,
            "delta" => self.delta = real(value)?,
            "deltas" => self.deltas = list(value, real)?,
            "eps" => self.eps = real(value)?,
            "kappa" => self.kappa = real(value)?,
            "unstable_kappa" => self.unstable_kappa = boolean(value)?,
            "n" => self.n = count(value)?,
            "sizes" => self.sizes = list(value, count)?,
            "extent" => self.extent = real(value)?,
            "tau" => self.tau = real(value)?,
            "t_end" => self.t_end = real(value)?,
            "scheme" => self.scheme = value.parse().map_err(|e: nlac_core::Error| e.to_string())?,
            "model" => self.model = value.parse().map_err(|e: nlac_core::Error| e.to_string())?,
            "initial" => self.initial = value.parse()?,
            "amplitude" => self.amplitude = real(value)?,
            "bubble_radius" => self.bubble_radius = optional(value, real)?,
            "bubble_width" => self.bubble_width = optional(value, real)?,
            "seed" => self.seed = value.parse().map_err(|_| format!("invalid seed {value:?}"))?,
            "levels" => self.levels = count(value)?,
            "benchmark_divisor" => self.benchmark_divisor = count(value)?,
            "benchmark_n" => self.benchmark_n = count(value)?,
            "steady_tolerance" => self.steady_tolerance = optional(value, real)?,
            "dump_times" => self.dump_times = if value == "none" { Vec::new() } else { list(value, real)? },
            "include_local" => self.include_local = boolean(value)?,
            "log_stride" => self.log_stride = optional(value, count)?,
            "quadrature_order" => self.quadrature_order = count(value)?,
            "allow_wrap" => self.allow_wrap = boolean(value)?,
            _ => return Err(format!("unknown key {key:?}")),
        }
        Ok(())
    }

    /// Serializes every key so that the output can be fed back through
    /// [`ExperimentConfig::from_text`].
    pub fn to_text(&self) -> String {
        fn reals(v: &[f64]) -> String {
            v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",")
        }
        fn opt<T: fmt::Debug>(v: &Option<T>) -> String {
            v.as_ref().map_or_else(|| "none".to_string(), |x| format!("{x:?}"))
        }
        let model = match self.model {
            Model::Nonlocal => "nac",
            Model::Local => "lac",
        };
        let sizes = self.sizes.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(",");
        let dumps = if self.dump_times.is_empty() { "none".to_string() } else { reals(&self.dump_times) };
        let pairs: Vec<(&str, String)> = vec![
            ("alpha", format!("{:?}", self.alpha)),
            ("alphas", reals(&self.alphas)),
            ("delta", format!("{:?}", self.delta)),
            ("deltas", reals(&self.deltas)),
            ("eps", format!("{:?}", self.eps)),
            ("kappa", format!("{:?}", self.kappa)),
            ("unstable_kappa", self.unstable_kappa.to_string()),
            ("n", self.n.to_string()),
            ("sizes", sizes),
            ("extent", format!("{:?}", self.extent)),
            ("tau", format!("{:?}", self.tau)),
            ("t_end", format!("{:?}", self.t_end)),
            ("scheme", self.scheme.to_string()),
            ("model", model.to_string()),
            ("initial", self.initial.to_string()),
            ("amplitude", format!("{:?}", self.amplitude)),
            ("bubble_radius", opt(&self.bubble_radius)),
            ("bubble_width", opt(&self.bubble_width)),
            ("seed", self.seed.to_string()),
            ("levels", self.levels.to_string()),
            ("benchmark_divisor", self.benchmark_divisor.to_string()),
            ("benchmark_n", self.benchmark_n.to_string()),
            ("steady_tolerance", opt(&self.steady_tolerance)),
            ("dump_times", dumps),
            ("include_local", self.include_local.to_string()),
            ("log_stride", opt(&self.log_stride)),
            ("quadrature_order", self.quadrature_order.to_string()),
            ("allow_wrap", self.allow_wrap.to_string()),
        ];
        pairs.into_iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

fn real(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("expected a finite number, found {s:?}")),
    }
}

fn count(s: &str) -> std::result::Result<usize, String> {
    s.parse().map_err(|_| format!("expected a non-negative integer, found {s:?}"))
}

fn boolean(s: &str) -> std::result::Result<bool, String> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true or false, found {s:?}")),
    }
}

fn optional<T>(
    s: &str,
    parse: impl Fn(&str) -> std::result::Result<T, String>,
) -> std::result::Result<Option<T>, String> {
    if s == "none" {
        Ok(None)
    } else {
        parse(s).map(Some)
    }
}

fn list<T>(s: &str, parse: impl Fn(&str) -> std::result::Result<T, String>) -> std::result::Result<Vec<T>, String> {
    s.split(',').map(|item| parse(item.trim())).collect()
}
