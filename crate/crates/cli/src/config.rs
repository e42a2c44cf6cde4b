//! Flat key=value configuration files.
//!
//! Keys: `mass`, `charge`, `p0`, `x0`, `psi0` (multivector text form),
//! `field.kind` (`free` | `constant_F`), `field.F`, `steps_per_period`,
//! `periods`, `outputs` (comma list of `trajectory`, `report`).
//! `#` starts a comment; unknown keys are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use zbw_core::algebra::{EvenElement, FourVector, Multivector};
use zbw_core::dynamics::{FieldKind, Integrator, SimConfig};

#[derive(Debug)]
pub enum ConfigError {
    Io(String),
    Parse(String),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Io(m) => write!(f, "cannot read config: {m}"),
            ConfigError::Parse(m) => write!(f, "bad config: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Which output files a run writes.
#[derive(Clone, Copy, Debug)]
pub struct Outputs {
    pub trajectory: bool,
    pub report: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            trajectory: true,
            report: true,
        }
    }
}

/// Parsed configuration plus a canonical echo of every effective key.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub sim: SimConfig,
    pub outputs: Outputs,
    pub echo: BTreeMap<String, String>,
}

pub fn load_config(path: &Path) -> Result<LoadedConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

fn parse_vector(value: &str, key: &str) -> Result<FourVector, ConfigError> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(ConfigError::Parse(format!(
            "{key} must have 4 comma-separated components, got `{value}`"
        )));
    }
    let mut v = [0.0; 4];
    for (slot, part) in v.iter_mut().zip(parts.iter()) {
        *slot = part
            .parse()
            .map_err(|_| ConfigError::Parse(format!("{key}: bad number `{part}`")))?;
    }
    Ok(FourVector(v))
}

pub fn parse_config(text: &str) -> Result<LoadedConfig, ConfigError> {
    let mut raw: BTreeMap<String, String> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            ConfigError::Parse(format!("line {}: expected key = value", lineno + 1))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if raw.insert(key.clone(), value).is_some() {
            return Err(ConfigError::Parse(format!("duplicate key `{key}`")));
        }
    }

    const KNOWN: [&str; 10] = [
        "mass",
        "charge",
        "p0",
        "x0",
        "psi0",
        "field.kind",
        "field.F",
        "steps_per_period",
        "periods",
        "outputs",
    ];
    for key in raw.keys() {
        if !KNOWN.contains(&key.as_str()) {
            return Err(ConfigError::Parse(format!("unknown key `{key}`")));
        }
    }

    let mass: f64 = raw
        .get("mass")
        .ok_or_else(|| ConfigError::Parse("missing required key `mass`".into()))?
        .parse()
        .map_err(|_| ConfigError::Parse("mass: bad number".into()))?;

    let charge: f64 = match raw.get("charge") {
        Some(v) => v
            .parse()
            .map_err(|_| ConfigError::Parse("charge: bad number".into()))?,
        None => 0.0,
    };

    let p0 = match raw.get("p0") {
        Some(v) => parse_vector(v, "p0")?,
        None => FourVector::new(mass, 0.0, 0.0, 0.0),
    };
    let x0 = match raw.get("x0") {
        Some(v) => parse_vector(v, "x0")?,
        None => FourVector::zero(),
    };

    let psi0 = match raw.get("psi0") {
        Some(v) => {
            let mv: Multivector = v
                .parse()
                .map_err(|e| ConfigError::Parse(format!("psi0: {e}")))?;
            if mv.odd_norm() != 0.0 {
                return Err(ConfigError::Parse(
                    "psi0 must be an even element (grades 0, 2, 4)".into(),
                ));
            }
            EvenElement::even_part_of(&mv)
        }
        None => EvenElement::one(),
    };

    let kind_name = raw.get("field.kind").map(String::as_str).unwrap_or("free");
    let field = match kind_name {
        "free" => {
            if raw.contains_key("field.F") {
                return Err(ConfigError::Parse(
                    "field.F given but field.kind is free".into(),
                ));
            }
            FieldKind::Free
        }
        "constant_F" => {
            let text = raw.get("field.F").ok_or_else(|| {
                ConfigError::Parse("field.kind = constant_F requires field.F".into())
            })?;
            let f: Multivector = text
                .parse()
                .map_err(|e| ConfigError::Parse(format!("field.F: {e}")))?;
            if (f - f.grade(2)).coeff_norm() != 0.0 {
                return Err(ConfigError::Parse("field.F must be a bivector".into()));
            }
            FieldKind::ConstantBivector(f)
        }
        other => {
            return Err(ConfigError::Parse(format!(
                "field.kind must be `free` or `constant_F`, got `{other}`"
            )))
        }
    };

    let steps_per_period: usize = match raw.get("steps_per_period") {
        Some(v) => v
            .parse()
            .map_err(|_| ConfigError::Parse("steps_per_period: bad integer".into()))?,
        None => 1000,
    };
    let periods: f64 = match raw.get("periods") {
        Some(v) => v
            .parse()
            .map_err(|_| ConfigError::Parse("periods: bad number".into()))?,
        None => 10.0,
    };

    let outputs = match raw.get("outputs") {
        Some(v) => {
            let mut out = Outputs {
                trajectory: false,
                report: false,
            };
            for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                match item {
                    "trajectory" => out.trajectory = true,
                    "report" => out.report = true,
                    other => {
                        return Err(ConfigError::Parse(format!(
                            "outputs: unknown item `{other}`"
                        )))
                    }
                }
            }
            out
        }
        None => Outputs::default(),
    };

    let sim = SimConfig {
        mass,
        charge,
        psi0,
        x0,
        p0,
        field,
        steps_per_period,
        periods,
        integrator: Integrator::Rk4,
        enforce_mass_shell: true,
    };
    sim.validate()
        .map_err(|e| ConfigError::Parse(e.to_string()))?;

    let mut echo = BTreeMap::new();
    echo.insert("mass".into(), format!("{mass:?}"));
    echo.insert("charge".into(), format!("{charge:?}"));
    echo.insert("p0".into(), p0.to_string());
    echo.insert("x0".into(), x0.to_string());
    echo.insert("psi0".into(), psi0.to_string());
    echo.insert("field.kind".into(), kind_name.to_string());
    if let FieldKind::ConstantBivector(f) = &sim.field {
        echo.insert("field.F".into(), f.to_string());
    }
    echo.insert("steps_per_period".into(), steps_per_period.to_string());
    echo.insert("periods".into(), format!("{periods:?}"));
    echo.insert(
        "outputs".into(),
        match (outputs.trajectory, outputs.report) {
            (true, true) => "trajectory,report".into(),
            (true, false) => "trajectory".into(),
            (false, true) => "report".into(),
            (false, false) => "".into(),
        },
    );

    Ok(LoadedConfig { sim, outputs, echo })
}
