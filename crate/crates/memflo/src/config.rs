//! Sweep configuration: a flat TOML document (JSON accepted as well).
//!
//! ```toml
//! model = "particle"
//! mode = "sweep"
//! n_harmonics = 30
//! output_path = "fig3.csv"
//!
//! [parameters]
//! alpha = [0.0, 2.0, 21]
//! ratio = [0.8, 1.2, 9]
//! k = 1.0
//! ```
//!
//! A parameter is a number, the string `"inf"`, or a linear range
//! `[start, stop, count]`. Ranged parameters become the `param1`/`param2`
//! output columns in declaration order.

use std::fmt;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize, Serializer};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Memory1d,
    Particle,
    Tl,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Memory1d => "memory1d",
            ModelKind::Particle => "particle",
            ModelKind::Tl => "tl",
        }
    }

    /// Accepted parameter names with their defaults (`None` = required).
    pub fn parameters(self) -> &'static [(&'static str, Option<f64>)] {
        match self {
            ModelKind::Memory1d => &[("a", None), ("k", Some(3.0)), ("s", Some(f64::INFINITY))],
            ModelKind::Particle => &[
                ("alpha", None),
                ("beta", Some(1.0)),
                ("g", Some(0.5)),
                ("k", Some(1.0)),
                ("omega1", Some(2.0)),
                ("ratio", Some(1.0)),
                ("mass", Some(1.0)),
            ],
            ModelKind::Tl => &[
                ("r", Some(1.0)),
                ("ra", None),
                ("z0", Some(1.0)),
                ("tau_f", Some(1.0)),
            ],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Spectrum,
    Sweep,
    BoundaryBisect,
    Convergence,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Spectrum => "spectrum",
            Mode::Sweep => "sweep",
            Mode::BoundaryBisect => "boundary_bisect",
            Mode::Convergence => "convergence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// A fixed value or a linear range with `count` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamSpec {
    Fixed(f64),
    Range { start: f64, stop: f64, count: usize },
}

impl ParamSpec {
    pub fn is_range(&self) -> bool {
        matches!(self, ParamSpec::Range { .. })
    }

    pub fn values(&self) -> Vec<f64> {
        match *self {
            ParamSpec::Fixed(v) => vec![v],
            ParamSpec::Range {
                start, count: 1, ..
            } => vec![start],
            ParamSpec::Range { start, stop, count } => (0..count)
                .map(|i| start + (stop - start) * i as f64 / (count - 1) as f64)
                .collect(),
        }
    }
}

fn number_or_inf<S: Serializer>(v: f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(v)
    } else if v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

impl Serialize for ParamSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeTuple;
        match *self {
            ParamSpec::Fixed(v) => number_or_inf(v, s),
            ParamSpec::Range { start, stop, count } => {
                let mut t = s.serialize_tuple(3)?;
                t.serialize_element(&start)?;
                t.serialize_element(&stop)?;
                t.serialize_element(&count)?;
                t.end()
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawParam {
    Number(f64),
    Text(String),
    List(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    model: ModelKind,
    #[serde(default)]
    mode: Mode,
    n_harmonics: Option<usize>,
    output_path: Option<PathBuf>,
    output_format: Option<Format>,
    n_roots: Option<usize>,
    bisect_tol: Option<f64>,
    warm_start: Option<bool>,
    #[serde(default)]
    parameters: IndexMap<String, RawParam>,
}

/// Validated sweep configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepConfig {
    pub model: ModelKind,
    pub mode: Mode,
    pub n_harmonics: usize,
    pub output_path: Option<PathBuf>,
    pub output_format: Format,
    /// Number of TL roots reported per point.
    pub n_roots: usize,
    /// Bracket width at which boundary bisection stops.
    pub bisect_tol: f64,
    /// Reuse the previous particle cycle as the Newton seed along the swept axis.
    pub warm_start: bool,
    /// Every model parameter, defaults filled in, in declaration order
    /// (defaulted ones last).
    pub parameters: IndexMap<String, ParamSpec>,
}

/// Input encoding of a config document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    Toml,
    Json,
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::Toml => "toml",
            Encoding::Json => "json",
        })
    }
}

impl SweepConfig {
    /// Reads a config file; `.json` files, or documents starting with `{`, are JSON.
    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        let json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
            || text.trim_start().starts_with('{');
        Self::parse(&text, if json { Encoding::Json } else { Encoding::Toml })
    }

    pub fn parse(text: &str, encoding: Encoding) -> Result<Self, ConfigError> {
        let raw: RawConfig = match encoding {
            Encoding::Toml => {
                toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?
            }
            Encoding::Json => {
                serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?
            }
        };
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        let known = raw.model.parameters();

        let mut parameters = IndexMap::new();
        for (name, value) in raw.parameters {
            if !known.iter().any(|(n, _)| *n == name) {
                let names: Vec<&str> = known.iter().map(|(n, _)| *n).collect();
                return invalid(format!(
                    "unknown parameter '{name}' for model {} (expected one of {})",
                    raw.model.as_str(),
                    names.join(", ")
                ));
            }
            parameters.insert(name.clone(), parse_param(&name, value)?);
        }
        for (name, default) in known {
            if parameters.contains_key(*name) {
                continue;
            }
            match default {
                Some(v) => {
                    parameters.insert((*name).to_owned(), ParamSpec::Fixed(*v));
                }
                None => return invalid(format!("missing required parameter '{name}'")),
            }
        }

        let cfg = SweepConfig {
            model: raw.model,
            mode: raw.mode,
            n_harmonics: raw.n_harmonics.unwrap_or(30),
            output_path: raw.output_path,
            output_format: raw.output_format.unwrap_or_default(),
            n_roots: raw.n_roots.unwrap_or(5),
            bisect_tol: raw.bisect_tol.unwrap_or(1e-4),
            warm_start: raw.warm_start.unwrap_or(true),
            parameters,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Names of the ranged parameters, in output-column order.
    pub fn ranged(&self) -> Vec<&str> {
        self.parameters
            .iter()
            .filter(|(_, p)| p.is_range())
            .map(|(n, _)| n.as_str())
            .collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: String| Err(ConfigError::Invalid(m));
        if self.n_harmonics < 1 {
            return invalid("n_harmonics must be at least 1".into());
        }
        if self.n_roots < 1 {
            return invalid("n_roots must be at least 1".into());
        }
        if !(self.bisect_tol > 0.0) {
            return invalid("bisect_tol must be positive".into());
        }
        for (name, p) in &self.parameters {
            let unbounded_ok = matches!(
                (self.model, name.as_str()),
                (ModelKind::Memory1d, "s") | (ModelKind::Particle, "k")
            );
            let ok = |v: f64| v.is_finite() || (unbounded_ok && v == f64::INFINITY);
            let fine = match *p {
                ParamSpec::Fixed(v) => ok(v),
                ParamSpec::Range { start, stop, .. } => start.is_finite() && stop.is_finite(),
            };
            if !fine {
                return invalid(format!("parameter '{name}' must be finite"));
            }
        }
        let ranged = self.ranged();
        match self.mode {
            Mode::Spectrum if !ranged.is_empty() => {
                invalid("spectrum mode takes no ranged parameters".into())
            }
            Mode::Sweep if ranged.len() > 2 => {
                invalid("sweep mode takes at most 2 ranged parameters".into())
            }
            Mode::BoundaryBisect if ranged.len() != 1 => {
                invalid("boundary_bisect mode needs exactly 1 ranged parameter".into())
            }
            Mode::Convergence => {
                if self.model != ModelKind::Memory1d || ranged != ["s"] {
                    return invalid(
                        "convergence mode needs model memory1d with only 's' ranged".into(),
                    );
                }
                match self.parameters["s"] {
                    ParamSpec::Range { start, stop, count }
                        if start >= 0.0 && (stop > start || count == 1) =>
                    {
                        Ok(())
                    }
                    _ => invalid(
                        "convergence mode needs an ascending, non-negative 's' range".into(),
                    ),
                }
            }
            _ => Ok(()),
        }
    }
}

fn parse_param(name: &str, raw: RawParam) -> Result<ParamSpec, ConfigError> {
    match raw {
        RawParam::Number(v) => Ok(ParamSpec::Fixed(v)),
        RawParam::Text(t) => match t.trim().to_ascii_lowercase().as_str() {
            "inf" | "+inf" | "infinity" => Ok(ParamSpec::Fixed(f64::INFINITY)),
            _ => Err(ConfigError::Invalid(format!(
                "parameter '{name}': expected a number, \"inf\" or [start, stop, count]"
            ))),
        },
        RawParam::List(l) => {
            let [start, stop, count] = l[..] else {
                return Err(ConfigError::Invalid(format!(
                    "parameter '{name}': a range is [start, stop, count]"
                )));
            };
            if !(count >= 1.0) || count.fract() != 0.0 {
                return Err(ConfigError::Invalid(format!(
                    "parameter '{name}': range count must be a positive integer"
                )));
            }
            Ok(ParamSpec::Range {
                start,
                stop,
                count: count as usize,
            })
        }
    }
}
