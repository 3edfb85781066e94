//! Flat `key = value` run configurations. Unknown keys are rejected
//! so a typo can't silently fall back to a default; every default is
//! filled in at parse time and echoed in the manifest.

use sqg_core::{Engine, InitRecipe, SolverConfig};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}`: cannot parse `{value}`")]
    TypeMismatch { key: String, value: String },
    #[error("missing required key `{0}`")]
    MissingRequired(&'static str),
    #[error("key `{key}`: {reason}")]
    RangeError { key: &'static str, reason: &'static str },
    #[error("malformed line `{0}` (expected key = value)")]
    MalformedLine(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentName {
    E1Apriori,
    E2Frak,
    E3Gevrey,
    E4Split,
    E5Decay,
    E6Lemmas,
}

impl ExperimentName {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "E1_apriori" => ExperimentName::E1Apriori,
            "E2_frak" => ExperimentName::E2Frak,
            "E3_gevrey" => ExperimentName::E3Gevrey,
            "E4_split" => ExperimentName::E4Split,
            "E5_decay" => ExperimentName::E5Decay,
            "E6_lemmas" => ExperimentName::E6Lemmas,
            _ => return None,
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentName::E1Apriori => "E1_apriori",
            ExperimentName::E2Frak => "E2_frak",
            ExperimentName::E3Gevrey => "E3_gevrey",
            ExperimentName::E4Split => "E4_split",
            ExperimentName::E5Decay => "E5_decay",
            ExperimentName::E6Lemmas => "E6_lemmas",
        }
    }
}

/// A fully-validated experiment: solver configuration plus the check
/// parameters of the analysis pass.
#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub name: ExperimentName,
    pub config: SolverConfig,
    /// Splitting exponent δ (E4).
    pub delta: f64,
    /// Decay-fit window; defaults to the right half of the horizon.
    pub fit_start: f64,
    pub fit_end: f64,
    /// Seed count for the lemma suite (E6).
    pub seeds: u32,
}

fn engine_name(e: Engine) -> &'static str {
    match e {
        Engine::Picard => "picard",
        Engine::ExpEuler => "expeuler",
        Engine::Etdrk2 => "etdrk2",
    }
}

impl ExperimentSpec {
    /// Every effective field, defaults included, for the manifest echo.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let c = &self.config;
        vec![
            ("name", self.name.as_str().to_string()),
            ("N", c.n.to_string()),
            ("T", fmt_f64(c.horizon)),
            ("dt", fmt_f64(c.dt)),
            ("kappa", fmt_f64(c.kappa)),
            ("engine", engine_name(c.engine).to_string()),
            ("rho0", fmt_f64(c.init.rho0)),
            ("slope", fmt_f64(c.init.slope)),
            ("seed", c.init.seed.to_string()),
            ("picard_max_iters", c.picard_max_iters.to_string()),
            ("picard_tol", fmt_f64(c.picard_tol)),
            (
                "r1",
                c.r1.map(fmt_f64).unwrap_or_else(|| "auto".to_string()),
            ),
            ("delta", fmt_f64(self.delta)),
            ("fit_start", fmt_f64(self.fit_start)),
            ("fit_end", fmt_f64(self.fit_end)),
            ("seeds", self.seeds.to_string()),
        ]
    }
}

/// 17 significant digits: enough for exact binary64 round-trips.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_config(text: &str) -> Result<ExperimentSpec, ConfigError> {
    let mut name = None;
    let mut n: Option<u32> = None;
    let mut horizon: Option<f64> = None;
    let mut rho0 = 0.1f64;
    let mut dt: Option<f64> = None;
    let mut kappa = 1.0f64;
    let mut engine = Engine::ExpEuler;
    let mut seed = 1u64;
    let mut slope = 3.0f64;
    let mut picard_max_iters = 200usize;
    let mut picard_tol = 1e-12f64;
    let mut r1: Option<f64> = None;
    let mut delta = 0.5f64;
    let mut fit_start: Option<f64> = None;
    let mut fit_end: Option<f64> = None;
    let mut seeds = 50u32;

    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| ConfigError::MalformedLine(line.to_string()))?;
        let key = key.trim();
        let value = value.trim();
        let bad = || ConfigError::TypeMismatch {
            key: key.to_string(),
            value: value.to_string(),
        };
        match key {
            "name" => {
                name = Some(ExperimentName::parse(value).ok_or_else(bad)?);
            }
            "N" => n = Some(value.parse().map_err(|_| bad())?),
            "T" => horizon = Some(value.parse().map_err(|_| bad())?),
            "rho0" => rho0 = value.parse().map_err(|_| bad())?,
            "dt" => dt = Some(value.parse().map_err(|_| bad())?),
            "kappa" => kappa = value.parse().map_err(|_| bad())?,
            "engine" => {
                engine = match value {
                    "picard" => Engine::Picard,
                    "expeuler" => Engine::ExpEuler,
                    "etdrk2" => Engine::Etdrk2,
                    _ => return Err(bad()),
                }
            }
            "seed" => seed = value.parse().map_err(|_| bad())?,
            "slope" => slope = value.parse().map_err(|_| bad())?,
            "picard_max_iters" => picard_max_iters = value.parse().map_err(|_| bad())?,
            "picard_tol" => picard_tol = value.parse().map_err(|_| bad())?,
            "r1" => r1 = Some(value.parse().map_err(|_| bad())?),
            "delta" => delta = value.parse().map_err(|_| bad())?,
            "fit_start" => fit_start = Some(value.parse().map_err(|_| bad())?),
            "fit_end" => fit_end = Some(value.parse().map_err(|_| bad())?),
            "seeds" => seeds = value.parse().map_err(|_| bad())?,
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        }
    }

    let name = name.ok_or(ConfigError::MissingRequired("name"))?;
    let n = n.ok_or(ConfigError::MissingRequired("N"))?;
    let horizon = horizon.ok_or(ConfigError::MissingRequired("T"))?;
    if n < 1 {
        return Err(ConfigError::RangeError { key: "N", reason: "must be >= 1" });
    }
    if horizon <= 0.0 {
        return Err(ConfigError::RangeError { key: "T", reason: "must be positive" });
    }
    if rho0 <= 0.0 {
        return Err(ConfigError::RangeError { key: "rho0", reason: "must be positive" });
    }
    if kappa <= 0.0 {
        return Err(ConfigError::RangeError { key: "kappa", reason: "must be positive" });
    }
    let dt = dt.unwrap_or_else(|| SolverConfig::default_dt(n, rho0));
    if dt <= 0.0 {
        return Err(ConfigError::RangeError { key: "dt", reason: "must be positive" });
    }
    if picard_tol <= 0.0 {
        return Err(ConfigError::RangeError { key: "picard_tol", reason: "must be positive" });
    }
    if !(delta >= 0.0 && delta < 1.0) {
        return Err(ConfigError::RangeError { key: "delta", reason: "must lie in [0,1)" });
    }

    let config = SolverConfig {
        n,
        dt,
        horizon,
        kappa,
        engine,
        picard_max_iters,
        picard_tol,
        r1,
        init: InitRecipe { rho0, slope, seed },
    };
    Ok(ExperimentSpec {
        name,
        config,
        delta,
        fit_start: fit_start.unwrap_or(horizon / 2.0),
        fit_end: fit_end.unwrap_or(horizon),
        seeds,
    })
}
