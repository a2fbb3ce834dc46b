//! Scenario configuration: flat `key=value` text or a flat JSON object, both
//! accepted, with `_db` suffixed keys converted to linear scale.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use fblsec::{LeakageModel, SystemParams};

/// Which design pipeline a command drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[allow(clippy::enum_variant_names)]
pub enum Scheme {
    SingleAdaptive,
    SingleNonAdaptive,
    MultiAdaptive,
    MultiNonAdaptive,
}

impl Scheme {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "single-adaptive" => Some(Scheme::SingleAdaptive),
            "single-nonadaptive" => Some(Scheme::SingleNonAdaptive),
            "multi-adaptive" => Some(Scheme::MultiAdaptive),
            "multi-nonadaptive" => Some(Scheme::MultiNonAdaptive),
            _ => None,
        }
    }

}

/// One sweep axis: an equispaced, strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub axis: String,
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / self.steps as f64)
            .collect()
    }
}

/// Fully resolved scenario: system parameters plus command-specific knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub params: SystemParams,
    pub scheme: Scheme,
    pub leakage_model: LeakageModel,
    /// Realized main-channel gain, if the command needs one.
    pub eta: Option<f64>,
    /// Blocklength for fixed-design evaluation; defaults to `n_max`.
    pub n: usize,
    pub r_s: Option<f64>,
    pub r_e: Option<f64>,
    pub phi: Option<f64>,
    pub alpha: Option<f64>,
    pub sweep: Option<SweepAxis>,
    pub sweep2: Option<SweepAxis>,
    pub seed: u64,
}

#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: &str, message: impl Into<String>) -> Self {
        ConfigError { field: field.to_string(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid config field '{}': {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Raw key-value view of either config syntax.
fn parse_raw(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let value: serde_json::Value = serde_json::from_str(trimmed)
            .map_err(|e| ConfigError::new("<json>", format!("parse error: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| ConfigError::new("<json>", "top level must be an object"))?;
        let mut map = BTreeMap::new();
        for (k, v) in obj {
            let s = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Bool(b) => b.to_string(),
                serde_json::Value::Number(n) => n.to_string(),
                other => {
                    return Err(ConfigError::new(k, format!("unsupported value {other}")));
                }
            };
            map.insert(k.clone(), s);
        }
        return Ok(map);
    }
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::new(
                "<line>",
                format!("line {}: expected key=value, got '{line}'", lineno + 1),
            ));
        };
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

struct Fields {
    map: BTreeMap<String, String>,
}

impl Fields {
    fn take_f64(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| ConfigError::new(key, format!("expected a number, got '{s}'"))),
        }
    }

    /// A linear value with an optional `_db` spelled sibling.
    fn take_linear_or_db(&mut self, key: &str) -> Result<Option<f64>, ConfigError> {
        let linear = self.take_f64(key)?;
        let db_key = format!("{key}_db");
        let in_db = self.take_f64(&db_key)?;
        match (linear, in_db) {
            (Some(_), Some(_)) => {
                Err(ConfigError::new(&db_key, format!("conflicts with '{key}'")))
            }
            (Some(v), None) => Ok(Some(v)),
            (None, Some(d)) => Ok(Some(db_to_linear(d))),
            (None, None) => Ok(None),
        }
    }

    fn take_usize(&mut self, key: &str) -> Result<Option<usize>, ConfigError> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<usize>()
                .map(Some)
                .map_err(|_| ConfigError::new(key, format!("expected a nonnegative integer, got '{s}'"))),
        }
    }

    fn take_bool(&mut self, key: &str) -> Result<Option<bool>, ConfigError> {
        match self.map.remove(key) {
            None => Ok(None),
            Some(s) => match s.as_str() {
                "true" | "1" | "yes" => Ok(Some(true)),
                "false" | "0" | "no" => Ok(Some(false)),
                _ => Err(ConfigError::new(key, format!("expected a boolean, got '{s}'"))),
            },
        }
    }

    fn take_string(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn take_axis(&mut self, prefix: &str) -> Result<Option<SweepAxis>, ConfigError> {
        let axis = self.take_string(&format!("{prefix}_axis"));
        let start = self.take_f64(&format!("{prefix}_start"))?;
        let stop = self.take_f64(&format!("{prefix}_stop"))?;
        let steps = self.take_usize(&format!("{prefix}_steps"))?;
        match (axis, start, stop, steps) {
            (None, None, None, None) => Ok(None),
            (Some(axis), Some(start), Some(stop), Some(steps)) => {
                if stop.is_nan() || start.is_nan() || stop <= start {
                    return Err(ConfigError::new(
                        &format!("{prefix}_stop"),
                        "grid must be strictly increasing (stop > start)",
                    ));
                }
                if steps < 1 {
                    return Err(ConfigError::new(&format!("{prefix}_steps"), "must be >= 1"));
                }
                Ok(Some(SweepAxis { axis, start, stop, steps }))
            }
            _ => Err(ConfigError::new(
                prefix,
                "a sweep needs all of _axis, _start, _stop, _steps",
            )),
        }
    }
}

/// Parse and validate a scenario from config text.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut fields = Fields { map: parse_raw(text)? };

    let m = fields.take_usize("m")?.unwrap_or(1);
    let m_e = fields.take_usize("m_e")?.unwrap_or(1);
    let p_b = fields.take_linear_or_db("p_b")?.unwrap_or(1.0);
    let p_e = fields.take_linear_or_db("p_e")?.unwrap_or(1.0);
    let mut sigma_b2 = fields.take_linear_or_db("sigma_b2")?;
    let mut sigma_e2 = fields.take_linear_or_db("sigma_e2")?;
    // Mean-gain sugar: Gamma = P * sigma^2.
    if let Some(gamma_b) = fields.take_linear_or_db("gamma_b")? {
        if sigma_b2.is_some() {
            return Err(ConfigError::new("gamma_b", "conflicts with 'sigma_b2'"));
        }
        sigma_b2 = Some(gamma_b / p_b);
    }
    if let Some(gamma_e) = fields.take_linear_or_db("gamma_e")? {
        if sigma_e2.is_some() {
            return Err(ConfigError::new("gamma_e", "conflicts with 'sigma_e2'"));
        }
        sigma_e2 = Some(gamma_e / p_e);
    }
    let delta = fields.take_f64("delta")?.unwrap_or(0.2);
    let n_max = fields.take_usize("n_max")?.unwrap_or(500);
    let worst_case = fields.take_bool("worst_case_eve")?.unwrap_or(false);

    let params = SystemParams {
        m,
        m_e,
        p_b,
        p_e,
        sigma_b2: sigma_b2.unwrap_or(1.0),
        sigma_e2: sigma_e2.unwrap_or(1.0),
        delta,
        n_max,
        worst_case_eve: worst_case,
    };
    params
        .validate()
        .map_err(|e| ConfigError::new(e.field, e.constraint.to_string()))?;

    let scheme_name = fields
        .take_string("scheme")
        .unwrap_or_else(|| if m >= 2 { "multi-adaptive".into() } else { "single-adaptive".into() });
    let scheme = Scheme::parse(&scheme_name).ok_or_else(|| {
        ConfigError::new(
            "scheme",
            format!(
                "unknown scheme '{scheme_name}' (expected single-adaptive, single-nonadaptive, multi-adaptive, multi-nonadaptive)"
            ),
        )
    })?;
    match scheme {
        Scheme::MultiAdaptive | Scheme::MultiNonAdaptive if m < 2 => {
            return Err(ConfigError::new("scheme", "multi-* schemes require m >= 2"));
        }
        Scheme::SingleAdaptive | Scheme::SingleNonAdaptive if m != 1 => {
            return Err(ConfigError::new("scheme", "single-* schemes require m = 1"));
        }
        _ => {}
    }

    let leakage_model = match fields.take_string("leakage_model") {
        None => LeakageModel::default_for_antennas(m),
        Some(s) => match s.as_str() {
            "exact" => LeakageModel::ExactQuadrature,
            "piecewise" => LeakageModel::PiecewiseLinear,
            "asymptotic" => LeakageModel::Asymptotic,
            _ => {
                return Err(ConfigError::new(
                    "leakage_model",
                    format!("unknown model '{s}' (expected exact, piecewise, asymptotic)"),
                ))
            }
        },
    };
    if leakage_model == LeakageModel::Asymptotic && m < 2 {
        return Err(ConfigError::new("leakage_model", "asymptotic model requires m >= 2"));
    }

    let eta = fields.take_linear_or_db("eta")?;
    if let Some(e) = eta {
        if e.is_nan() || e < 0.0 {
            return Err(ConfigError::new("eta", "must be >= 0"));
        }
    }
    let n = fields.take_usize("n")?.unwrap_or(n_max);
    if n < 1 || n > n_max {
        return Err(ConfigError::new("n", "must satisfy 1 <= n <= n_max"));
    }
    let r_s = fields.take_f64("r_s")?;
    let r_e = fields.take_f64("r_e")?;
    let phi = fields.take_f64("phi")?;
    let alpha = fields.take_f64("alpha")?;
    for (key, value) in [("r_s", r_s), ("r_e", r_e)] {
        if let Some(v) = value {
            if v.is_nan() || v < 0.0 {
                return Err(ConfigError::new(key, "must be >= 0"));
            }
        }
    }
    for (key, value) in [("phi", phi), ("alpha", alpha)] {
        if let Some(v) = value {
            if !(0.0..=1.0).contains(&v) {
                return Err(ConfigError::new(key, "must lie in [0, 1]"));
            }
        }
    }

    let sweep = fields.take_axis("sweep")?;
    let sweep2 = fields.take_axis("sweep2")?;
    if sweep.is_none() && sweep2.is_some() {
        return Err(ConfigError::new("sweep2", "requires a primary sweep axis"));
    }
    let seed = match fields.take_string("seed") {
        None => 1,
        Some(s) => s
            .parse::<u64>()
            .map_err(|_| ConfigError::new("seed", format!("expected an integer, got '{s}'")))?,
    };
    // `out` may be set from the config as well as the command line.
    let _ = fields.take_string("out");

    if let Some(unknown) = fields.map.keys().next() {
        return Err(ConfigError::new(unknown, "unknown key"));
    }

    Ok(ScenarioConfig {
        params,
        scheme,
        leakage_model,
        eta,
        n,
        r_s,
        r_e,
        phi,
        alpha,
        sweep,
        sweep2,
        seed,
    })
}

/// Output path if the config names one.
pub fn parse_out_path(text: &str) -> Option<String> {
    parse_raw(text).ok()?.get("out").cloned()
}

pub fn load_config(path: &Path) -> Result<(ScenarioConfig, Option<String>), ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("<file>", format!("{}: {e}", path.display())))?;
    let cfg = parse_config(&text)?;
    Ok((cfg, parse_out_path(&text)))
}
