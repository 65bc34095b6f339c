//! TOML run configuration.
//!
//! ```toml
//! [field]
//! B = 1.0
//!
//! [potential]
//! kind = "lorentzian"   # zero | lorentzian | flat_well | sine | linear | parabola | tabulated
//! lambda = 1.0
//! a = 0.5
//!
//! [sweep]
//! p_min = -6.0
//! p_max = 6.0
//! p_steps = 121
//! bands = 5
//! tol = 1e-6
//! lambdas = [0.5, 1.0, 2.0]
//! checks = ["landau", "gaps"]
//!
//! [output]
//! dir = "out"
//! svg = true
//! ```
//!
//! Tabulated profiles take `x = [...]`, `v = [...]` and
//! `outside = "zero" | "clamp"`.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dispersion::{SweepConfig, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::fiber::FieldConfig;
use crate::potentials::{Outside, PotentialSpec};

pub const DEFAULT_BANDS: usize = 5;
pub const DEFAULT_P_STEPS: usize = 121;

/// Named property checks a run can execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CheckName {
    Landau,
    Fh,
    Minimax,
    Gaps,
    Monotone,
    Asymptotes,
    DeltaLimit,
    Symmetry,
}

impl CheckName {
    pub const ALL: [CheckName; 8] = [
        CheckName::Landau,
        CheckName::Fh,
        CheckName::Minimax,
        CheckName::Gaps,
        CheckName::Monotone,
        CheckName::Asymptotes,
        CheckName::DeltaLimit,
        CheckName::Symmetry,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CheckName::Landau => "landau",
            CheckName::Fh => "fh",
            CheckName::Minimax => "minimax",
            CheckName::Gaps => "gaps",
            CheckName::Monotone => "monotone",
            CheckName::Asymptotes => "asymptotes",
            CheckName::DeltaLimit => "delta-limit",
            CheckName::Symmetry => "symmetry",
        }
    }
}

impl fmt::Display for CheckName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CheckName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckName::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<_> = CheckName::ALL.iter().map(|c| c.as_str()).collect();
                Error::Validation(format!("unknown check `{s}` (expected one of {})", names.join(", ")))
            })
    }
}

/// Parse a comma-separated check list such as `landau,gaps`.
pub fn parse_check_list(s: &str) -> Result<Vec<CheckName>> {
    let mut out = Vec::new();
    for name in s.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let check = name.parse()?;
        if !out.contains(&check) {
            out.push(check);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub svg: bool,
}

/// Validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub field: FieldConfig,
    pub potential: PotentialSpec,
    pub sweep: SweepConfig,
    /// Coupling multipliers for the `minimax` and `monotone` checks.
    pub lambdas: Option<Vec<f64>>,
    pub checks: Vec<CheckName>,
    pub output: OutputConfig,
}

impl RunConfig {
    /// Multipliers used when none are configured.
    pub fn lambdas_or_default(&self) -> Vec<f64> {
        self.lambdas.clone().unwrap_or_else(|| vec![0.5, 1.0, 2.0])
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    field: RawField,
    potential: RawPotential,
    #[serde(default)]
    sweep: RawSweep,
    #[serde(default)]
    output: RawOutput,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    #[serde(rename = "B")]
    b: f64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPotential {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    x: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    v: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    outside: Option<String>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(skip_serializing_if = "Option::is_none")]
    p_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bands: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lambdas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    checks: Option<Vec<String>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    #[serde(skip_serializing_if = "Option::is_none")]
    dir: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    svg: Option<bool>,
}

/// 1-based line of byte offset `pos` in `text`.
fn line_of(text: &str, pos: usize) -> usize {
    text.as_bytes()[..pos.min(text.len())]
        .iter()
        .filter(|&&c| c == b'\n')
        .count()
        + 1
}

/// Parse and validate a configuration file.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse {
        line: e.span().map_or(1, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    raw.into_config()
}

impl RawConfig {
    fn into_config(self) -> Result<RunConfig> {
        let field = FieldConfig::new(self.field.b)
            .map_err(|_| Error::Validation(format!("field requires B > 0, got {}", self.field.b)))?;
        let potential = self.potential.into_spec()?;
        let default_p = 6.0 * field.strength().sqrt();
        let sweep = SweepConfig {
            p_min: self.sweep.p_min.unwrap_or(-default_p),
            p_max: self.sweep.p_max.unwrap_or(default_p),
            p_steps: self.sweep.p_steps.unwrap_or(DEFAULT_P_STEPS),
            bands: self.sweep.bands.unwrap_or(DEFAULT_BANDS),
            tol: self.sweep.tol.unwrap_or(DEFAULT_TOL),
        };
        sweep.validate()?;
        if let Some(lambdas) = &self.sweep.lambdas {
            if lambdas.is_empty() || lambdas.iter().any(|l| !l.is_finite()) {
                return Err(Error::Validation(
                    "lambdas must be a non-empty list of finite numbers".into(),
                ));
            }
        }
        let mut checks = Vec::new();
        for name in self.sweep.checks.unwrap_or_default() {
            let check = name.parse()?;
            if !checks.contains(&check) {
                checks.push(check);
            }
        }
        Ok(RunConfig {
            field,
            potential,
            sweep,
            lambdas: self.sweep.lambdas,
            checks,
            output: OutputConfig {
                dir: PathBuf::from(self.output.dir.unwrap_or_else(|| "out".into())),
                svg: self.output.svg.unwrap_or(true),
            },
        })
    }
}

impl RawPotential {
    fn into_spec(self) -> Result<PotentialSpec> {
        let kind = self.kind.as_str();
        let allowed: &[&str] = match kind {
            "zero" => &[],
            "lorentzian" | "sine" => &["lambda", "a"],
            "flat_well" => &["lambda", "a", "b"],
            "linear" => &["alpha"],
            "parabola" => &["beta"],
            "tabulated" => &["x", "v", "outside"],
            other => {
                return Err(Error::Validation(format!(
                    "unknown potential kind `{other}` (expected zero, lorentzian, flat_well, \
                     sine, linear, parabola or tabulated)"
                )))
            }
        };
        let present = [
            ("lambda", self.lambda.is_some()),
            ("a", self.a.is_some()),
            ("b", self.b.is_some()),
            ("alpha", self.alpha.is_some()),
            ("beta", self.beta.is_some()),
            ("x", self.x.is_some()),
            ("v", self.v.is_some()),
            ("outside", self.outside.is_some()),
        ];
        if let Some((key, _)) = present.iter().find(|(k, p)| *p && !allowed.contains(k)) {
            return Err(Error::Validation(format!(
                "key `{key}` does not apply to potential kind `{kind}`"
            )));
        }
        let need = |value: Option<f64>, key: &str| {
            value.ok_or_else(|| Error::Validation(format!("potential kind `{kind}` requires key `{key}`")))
        };
        let spec = match kind {
            "zero" => Ok(PotentialSpec::zero()),
            "lorentzian" => PotentialSpec::lorentzian(need(self.lambda, "lambda")?, need(self.a, "a")?),
            "sine" => PotentialSpec::sine_obstacle(need(self.lambda, "lambda")?, need(self.a, "a")?),
            "flat_well" => PotentialSpec::flat_well(
                need(self.lambda, "lambda")?,
                need(self.a, "a")?,
                need(self.b, "b")?,
            ),
            "linear" => PotentialSpec::linear(need(self.alpha, "alpha")?),
            "parabola" => PotentialSpec::parabola(need(self.beta, "beta")?),
            _ => {
                let outside = match self.outside.as_deref() {
                    None | Some("zero") => Outside::Zero,
                    Some("clamp") => Outside::Clamp,
                    Some(other) => {
                        return Err(Error::Validation(format!(
                            "outside must be `zero` or `clamp`, got `{other}`"
                        )))
                    }
                };
                let xs = self.x.ok_or_else(|| Error::Validation("potential kind `tabulated` requires key `x`".into()))?;
                let vs = self.v.ok_or_else(|| Error::Validation("potential kind `tabulated` requires key `v`".into()))?;
                PotentialSpec::tabulated(xs, vs, outside)
            }
        };
        spec.map_err(|e| match e {
            Error::InvalidPotential(msg) => Error::Validation(msg),
            other => other,
        })
    }

    fn from_spec(spec: &PotentialSpec) -> Result<Self> {
        let raw = |kind: &str| RawPotential {
            kind: kind.into(),
            ..RawPotential::default()
        };
        Ok(match spec {
            PotentialSpec::Sum(children) if children.is_empty() => raw("zero"),
            PotentialSpec::Lorentzian { lambda, a } => RawPotential {
                lambda: Some(*lambda),
                a: Some(*a),
                ..raw("lorentzian")
            },
            PotentialSpec::SineObstacle { lambda, a } => RawPotential {
                lambda: Some(*lambda),
                a: Some(*a),
                ..raw("sine")
            },
            PotentialSpec::FlatWell { lambda, a, b } => RawPotential {
                lambda: Some(*lambda),
                a: Some(*a),
                b: Some(*b),
                ..raw("flat_well")
            },
            PotentialSpec::Linear { alpha } => RawPotential {
                alpha: Some(*alpha),
                ..raw("linear")
            },
            PotentialSpec::Parabola { beta } => RawPotential {
                beta: Some(*beta),
                ..raw("parabola")
            },
            PotentialSpec::Tabulated(table) => RawPotential {
                x: Some(table.xs().to_vec()),
                v: Some(table.values().to_vec()),
                outside: Some(
                    match table.outside() {
                        Outside::Zero => "zero",
                        Outside::Clamp => "clamp",
                    }
                    .into(),
                ),
                ..raw("tabulated")
            },
            other => {
                return Err(Error::InvalidArgument(format!(
                    "potential kind `{}` has no configuration form",
                    other.kind_name()
                )))
            }
        })
    }
}

/// Render a configuration that [`parse_config`] reads back unchanged.
///
/// Scaled and summed profiles have no configuration form.
pub fn render(cfg: &RunConfig) -> Result<String> {
    let raw = RawConfig {
        field: RawField {
            b: cfg.field.strength(),
        },
        potential: RawPotential::from_spec(&cfg.potential)?,
        sweep: RawSweep {
            p_min: Some(cfg.sweep.p_min),
            p_max: Some(cfg.sweep.p_max),
            p_steps: Some(cfg.sweep.p_steps),
            bands: Some(cfg.sweep.bands),
            tol: Some(cfg.sweep.tol),
            lambdas: cfg.lambdas.clone(),
            checks: Some(cfg.checks.iter().map(|c| c.as_str().to_string()).collect()),
        },
        output: RawOutput {
            dir: Some(
                cfg.output
                    .dir
                    .to_str()
                    .ok_or_else(|| Error::InvalidArgument("output directory is not UTF-8".into()))?
                    .to_string(),
            ),
            svg: Some(cfg.output.svg),
        },
    };
    toml::to_string(&raw).map_err(|e| Error::InvalidArgument(e.to_string()))
}
