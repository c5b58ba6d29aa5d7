//! Run configuration: a TOML document with `spec`, `p`, `tolerances` and
//! `scan` sections.
//!
//! ```toml
//! p = 2.0
//!
//! [spec]
//! mode = "asymptotic"
//! a_classes = [
//!     { limit = 1.0, perturbation = { kind = "coeff-over-k-squared", coeff = -1.0 } },
//!     { limit = 0.5, perturbation = { kind = "coeff-over-k-squared", coeff = -1.0 } },
//! ]
//! b_classes = [
//!     { limit = 2.0, perturbation = { kind = "coeff-over-k", coeff = -1.0 } },
//!     { limit = 3.0, perturbation = { kind = "coeff-over-k", coeff = -1.0 } },
//! ]
//! overrides = [{ which = "a", k = 1, value = 5.0 }]
//!
//! [tolerances]
//! boundary_tol = 1e-9
//! match_tol = 1e-12
//! divergence_threshold = 1e12
//!
//! [scan]
//! k_max = 100000
//! series_t = 5000
//! parallelism = 4
//! seed = 42
//! ```

use std::path::Path;

use finespec::{
    ExponentPair, Options, Override, PerturbationForm, ResidueClass, SequenceSpec, SpecError, Which,
};
use serde::Deserialize;
use thiserror::Error;

/// Environment variable overriding `scan.parallelism`.
pub const THREADS_ENV: &str = "FINESPEC_THREADS";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error(transparent)]
    Spec(#[from] SpecError),
}

impl ConfigError {
    fn invalid(field: &str, message: impl Into<String>) -> Self {
        ConfigError::Validation {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    spec: RawSpec,
    p: f64,
    #[serde(default)]
    tolerances: RawTolerances,
    #[serde(default)]
    scan: RawScan,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    mode: String,
    a_classes: Vec<RawClass>,
    b_classes: Vec<RawClass>,
    #[serde(default)]
    overrides: Vec<RawOverride>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClass {
    limit: f64,
    perturbation: Option<RawPerturbation>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPerturbation {
    kind: String,
    #[serde(default)]
    coeff: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOverride {
    which: String,
    k: i64,
    value: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    boundary_tol: Option<f64>,
    match_tol: Option<f64>,
    divergence_threshold: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScan {
    k_max: Option<i64>,
    series_t: Option<i64>,
    parallelism: Option<i64>,
    seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spec: SequenceSpec,
    pub exponent: ExponentPair,
    pub options: Options,
    pub parallelism: usize,
    pub seed: u64,
}

impl RunConfig {
    pub fn p(&self) -> f64 {
        self.exponent.p()
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text.as_bytes()[..offset];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let column = offset
        - before
            .iter()
            .rposition(|&b| b == b'\n')
            .map_or(0, |p| p + 1)
        + 1;
    (line, column)
}

fn backticked(message: &str) -> Option<&str> {
    let start = message.find('`')? + 1;
    let len = message[start..].find('`')?;
    Some(&message[start..start + len])
}

/// Parses and validates configuration text. Defaults fill absent knobs.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        ConfigError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    let raw: RawConfig = table.try_into().map_err(|e: toml::de::Error| {
        let message = e.message().to_string();
        if message.starts_with("unknown field") {
            let field = backticked(&message).unwrap_or("?");
            ConfigError::invalid(field, "unknown key")
        } else if let Some(field) = message.strip_prefix("missing field ") {
            ConfigError::invalid(field.trim_matches('`'), "missing key")
        } else {
            ConfigError::invalid("config", message)
        }
    })?;
    build(raw)
}

fn perturbation(
    raw: &Option<RawPerturbation>,
    field: &str,
) -> Result<PerturbationForm, ConfigError> {
    let Some(raw) = raw else {
        return Ok(PerturbationForm::ConstantZero);
    };
    if !raw.coeff.is_finite() {
        return Err(ConfigError::invalid(field, "coeff must be finite"));
    }
    match raw.kind.as_str() {
        "constant-zero" => Ok(PerturbationForm::ConstantZero),
        "coeff-over-k" => Ok(PerturbationForm::CoeffOverK(raw.coeff)),
        "coeff-over-k-squared" => Ok(PerturbationForm::CoeffOverKSquared(raw.coeff)),
        other => Err(ConfigError::invalid(
            field,
            format!("unknown perturbation kind `{other}`"),
        )),
    }
}

fn classes(raw: &[RawClass], name: &str) -> Result<Vec<ResidueClass>, ConfigError> {
    raw.iter()
        .enumerate()
        .map(|(i, c)| {
            let field = format!("spec.{name}[{i}]");
            if !c.limit.is_finite() {
                return Err(ConfigError::invalid(&field, "limit must be finite"));
            }
            Ok(ResidueClass::new(
                c.limit,
                perturbation(&c.perturbation, &field)?,
            ))
        })
        .collect()
}

fn positive(value: Option<f64>, default: f64, field: &str) -> Result<f64, ConfigError> {
    let v = value.unwrap_or(default);
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::invalid(field, "must be a positive number"))
    }
}

fn positive_int(value: Option<i64>, default: usize, field: &str) -> Result<usize, ConfigError> {
    match value {
        None => Ok(default),
        Some(v) if v > 0 => {
            usize::try_from(v).map_err(|_| ConfigError::invalid(field, "too large"))
        }
        Some(_) => Err(ConfigError::invalid(field, "must be a positive integer")),
    }
}

fn default_parallelism() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn build(raw: RawConfig) -> Result<RunConfig, ConfigError> {
    if !(raw.p.is_finite() && raw.p > 1.0) {
        return Err(ConfigError::invalid("p", "p must be in (1, inf)"));
    }
    let exponent =
        ExponentPair::new(raw.p).map_err(|_| ConfigError::invalid("p", "p must be in (1, inf)"))?;

    let a = classes(&raw.spec.a_classes, "a_classes")?;
    let b = classes(&raw.spec.b_classes, "b_classes")?;
    let overrides = raw
        .spec
        .overrides
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let field = format!("spec.overrides[{i}]");
            let which = match o.which.as_str() {
                "a" | "A" => Which::A,
                "b" | "B" => Which::B,
                _ => return Err(ConfigError::invalid(&field, "which must be `a` or `b`")),
            };
            if o.k < 1 {
                return Err(ConfigError::invalid(&field, "k must be >= 1"));
            }
            if !o.value.is_finite() {
                return Err(ConfigError::invalid(&field, "value must be finite"));
            }
            Ok(Override {
                which,
                k: o.k as usize,
                value: o.value,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let spec = match raw.spec.mode.as_str() {
        "periodic" => {
            SequenceSpec::periodic_from_classes(a, b, &overrides).map_err(|e| match e {
                SpecError::NotPeriodic => ConfigError::invalid(
                    "spec.mode",
                    "periodic specs take no perturbations or overrides",
                ),
                other => other.into(),
            })?
        }
        "asymptotic" => SequenceSpec::asymptotic(a, b, &overrides)?,
        other => {
            return Err(ConfigError::invalid(
                "spec.mode",
                format!("expected `periodic` or `asymptotic`, got `{other}`"),
            ))
        }
    };

    let d = Options::default();
    let t = &raw.tolerances;
    let boundary_tol = positive(t.boundary_tol, d.boundary_tol, "tolerances.boundary_tol")?;
    if boundary_tol >= 0.5 {
        return Err(ConfigError::invalid(
            "tolerances.boundary_tol",
            "must be in (0, 0.5)",
        ));
    }
    let options = Options {
        boundary_tol,
        match_tol: positive(t.match_tol, d.match_tol, "tolerances.match_tol")?,
        divergence_threshold: positive(
            t.divergence_threshold,
            d.divergence_threshold,
            "tolerances.divergence_threshold",
        )?,
        k_max: positive_int(raw.scan.k_max, d.k_max, "scan.k_max")?,
        series_terms: positive_int(raw.scan.series_t, d.series_terms, "scan.series_t")?,
        tail_window: d.tail_window,
    };
    if options.k_max < spec.period() {
        return Err(ConfigError::invalid(
            "scan.k_max",
            "must be at least the period",
        ));
    }
    let mut parallelism = positive_int(
        raw.scan.parallelism,
        default_parallelism(),
        "scan.parallelism",
    )?;
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        if n > 0 {
            parallelism = n;
        }
    }
    Ok(RunConfig {
        spec,
        exponent,
        options,
        parallelism,
        seed: raw.scan.seed.unwrap_or(42),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const EXAMPLE: &str = include_str!("../configs/paper-example.cfg");

    #[test]
    fn loads_the_worked_example() {
        let c = parse_config(EXAMPLE).unwrap();
        assert_eq!(c.spec.period(), 2);
        assert_eq!(c.spec.p_limits(), vec![1.0, 0.5]);
        assert_eq!(c.spec.q_limits(), vec![2.0, 3.0]);
        assert_eq!(c.spec.a(4), 0.4375);
        assert_eq!(c.p(), 2.0);
        assert_eq!(c.options, Options::default());
        assert_eq!(c.seed, 42);
    }

    #[test]
    fn rejects_bad_exponent() {
        let text = EXAMPLE.replace("p = 2.0", "p = 1.0");
        let e = parse_config(&text).unwrap_err();
        assert!(matches!(&e, ConfigError::Validation { field, message }
            if field == "p" && message == "p must be in (1, inf)"));
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = format!("gamma = 3\n{EXAMPLE}");
        let e = parse_config(&text).unwrap_err();
        assert!(
            matches!(&e, ConfigError::Validation { field, message }
            if field == "gamma" && message == "unknown key"),
            "{e}"
        );

        let text = EXAMPLE.replace("[scan]", "[scan]\ndepth = 3");
        let e = parse_config(&text).unwrap_err();
        assert!(
            matches!(&e, ConfigError::Validation { field, .. } if field == "depth"),
            "{e}"
        );
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = parse_config("p = 2.0\n[spec\nmode = 1").unwrap_err();
        match e {
            ConfigError::Parse { line, column, .. } => {
                assert_eq!(line, 2);
                assert!(column >= 1);
            }
            other => panic!("{other}"),
        }
    }

    #[test]
    fn spec_errors_surface() {
        let text = r#"
p = 2.0
[spec]
mode = "periodic"
a_classes = [{ limit = 0.0 }]
b_classes = [{ limit = 0.0 }]
"#;
        assert!(matches!(
            parse_config(text),
            Err(ConfigError::Spec(SpecError::ZeroQ { index: 1 }))
        ));
        let text = r#"
p = 2.0
[spec]
mode = "periodic"
a_classes = [{ limit = 0.0, perturbation = { kind = "coeff-over-k", coeff = 1.0 } }]
b_classes = [{ limit = 1.0 }]
"#;
        assert!(matches!(
            parse_config(text),
            Err(ConfigError::Validation { field, .. }) if field == "spec.mode"
        ));
    }

    #[test]
    fn knobs_must_be_positive() {
        let text = EXAMPLE.replace("k_max = 100000", "k_max = 0");
        assert!(matches!(
            parse_config(&text),
            Err(ConfigError::Validation { field, .. }) if field == "scan.k_max"
        ));
        let text = EXAMPLE.replace("boundary_tol = 1e-9", "boundary_tol = 0.7");
        assert!(matches!(
            parse_config(&text),
            Err(ConfigError::Validation { field, .. }) if field == "tolerances.boundary_tol"
        ));
    }

    #[test]
    fn line_col_counts_from_one() {
        assert_eq!(line_col("ab\ncd", 0), (1, 1));
        assert_eq!(line_col("ab\ncd", 4), (2, 2));
    }
}
