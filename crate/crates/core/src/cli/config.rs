//! Flat `key = value` run configuration.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

use crate::analytic::{forbidden_region, onaxis_initial_state, state_from_constants, RadialBranch, RadialMotion, ZRegime};
use crate::field::FieldParams;
use crate::geometry::{Curvature, SpaceChart, State};
use crate::invariants::{cyclotron_omega, squared_speed, MotionConstants, ParticleParams};

/// A configuration problem tied to one key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self { key: key.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config key '{}': {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Every accepted key with its default; `None` means unset unless given.
pub const KEYS: &[(&str, Option<&str>)] = &[
    ("chart.kappa", Some("-1")),
    ("chart.rho", Some("1")),
    ("chart.c", Some("1")),
    ("particle.mass", Some("1")),
    ("particle.charge", Some("1")),
    ("field.B", Some("1")),
    ("initial.t", Some("0")),
    ("initial.r", None),
    ("initial.phi", Some("0")),
    ("initial.z", None),
    ("initial.vr", Some("0.1")),
    ("initial.vphi", Some("0.3")),
    ("initial.vz", Some("0.2")),
    ("initial.onaxis_r0", None),
    ("initial.vr_sign", Some("1")),
    ("initial.vz_sign", Some("1")),
    ("constants.epsilon", None),
    ("constants.A", None),
    ("constants.I", None),
    ("integration.h", Some("0.001")),
    ("integration.T", Some("20")),
    ("output.stride", Some("10")),
    ("compare.tol_z", Some("1e-6")),
    ("compare.tol_vz", Some("1e-6")),
    ("compare.tol_phi", Some("1e-6")),
    ("compare.tol_vphi", Some("1e-6")),
    ("compare.tol_r", Some("1e-8")),
    ("compare.tol_orbit", Some("1e-7")),
    ("compare.phi", Some("false")),
    ("sweep.x", None),
    ("sweep.y", None),
    ("maxwell.r_min", Some("0.05")),
    ("maxwell.r_max", Some("3")),
    ("maxwell.points", Some("301")),
    ("maxwell.z", Some("0")),
    ("maxwell.perturb", Some("0")),
    ("maxwell.tol", Some("1e-10")),
];

const DEFAULT_R: f64 = 0.5;
const DEFAULT_Z: f64 = 0.0;

fn is_known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

/// Parse `key = value` lines; `#` starts a comment.
pub fn parse_entries(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse_assignment(line).map_err(|e| ConfigError::new(e.key, format!("line {}: {}", n + 1, e.message)))?);
    }
    Ok(out)
}

/// Parse one `key=value` override.
pub fn parse_assignment(text: &str) -> Result<(String, String), ConfigError> {
    let Some((key, value)) = text.split_once('=') else {
        return Err(ConfigError::new(text.trim(), "expected key=value"));
    };
    let (key, value) = (key.trim(), value.trim());
    if !is_known(key) {
        return Err(ConfigError::new(key, "unknown key"));
    }
    Ok((key.to_string(), value.to_string()))
}

/// One swept parameter: `key:lo:hi:n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub key: String,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl SweepAxis {
    fn parse(spec_key: &str, text: &str) -> Result<Self, ConfigError> {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let bad = |m: &str| ConfigError::new(spec_key, format!("{m} (expected key:lo:hi:n, got '{text}')"));
        if parts.len() != 4 {
            return Err(bad("malformed sweep"));
        }
        let key = parts[0];
        if !is_known(key) || key.starts_with("sweep.") {
            return Err(ConfigError::new(key, "cannot be swept"));
        }
        let lo: f64 = parts[1].parse().map_err(|_| bad("bad lower bound"))?;
        let hi: f64 = parts[2].parse().map_err(|_| bad("bad upper bound"))?;
        let count: usize = parts[3].parse().map_err(|_| bad("bad count"))?;
        if count == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(bad("empty or non-finite range"));
        }
        Ok(Self { key: key.to_string(), lo, hi, count })
    }

    pub fn value(&self, index: usize) -> f64 {
        if self.count == 1 {
            self.lo
        } else if index + 1 == self.count {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * index as f64 / (self.count - 1) as f64
        }
    }
}

/// How the initial state is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialSpec {
    State(State),
    /// On the axis-centred circle of radius `r0`.
    OnAxis { r0: f64, t: f64, phi: f64, z: f64, vz: f64 },
    /// From (ε, A, I); unset coordinates are placed automatically.
    Constants {
        epsilon: f64,
        transverse: f64,
        angular_momentum: f64,
        t: f64,
        r: Option<f64>,
        phi: f64,
        z: Option<f64>,
        vr_sign: f64,
        vz_sign: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub tol_z: f64,
    pub tol_vz: f64,
    pub tol_phi: f64,
    pub tol_vphi: f64,
    pub tol_r: f64,
    pub tol_orbit: f64,
    pub phi: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxwellConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
    pub z: f64,
    pub perturb: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub chart: SpaceChart,
    pub particle: ParticleParams,
    pub field: FieldParams,
    pub initial: InitialSpec,
    pub step: f64,
    pub duration: f64,
    pub stride: usize,
    pub compare: CompareConfig,
    pub sweep: Vec<SweepAxis>,
    pub maxwell: MaxwellConfig,
    /// Explicitly set keys, as given.
    pub entries: BTreeMap<String, String>,
}

struct Lookup<'a>(&'a BTreeMap<String, String>);

impl Lookup<'_> {
    fn raw(&self, key: &str) -> Option<String> {
        if let Some(v) = self.0.get(key) {
            return Some(v.clone());
        }
        KEYS.iter().find(|(k, _)| *k == key).and_then(|(_, d)| d.map(str::to_string))
    }

    fn given(&self, key: &str) -> bool {
        self.0.contains_key(key)
    }

    fn opt(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => {
                let x: f64 = v.parse().map_err(|_| ConfigError::new(key, format!("'{v}' is not a number")))?;
                if !x.is_finite() {
                    return Err(ConfigError::new(key, format!("'{v}' is not finite")));
                }
                Ok(Some(x))
            }
        }
    }

    fn num(&self, key: &str) -> Result<f64, ConfigError> {
        self.opt(key)?.ok_or_else(|| ConfigError::new(key, "missing value"))
    }

    fn positive(&self, key: &str) -> Result<f64, ConfigError> {
        let x = self.num(key)?;
        if x > 0.0 {
            Ok(x)
        } else {
            Err(ConfigError::new(key, format!("must be > 0, got {x}")))
        }
    }

    fn count(&self, key: &str) -> Result<usize, ConfigError> {
        let v = self.raw(key).unwrap_or_default();
        v.parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| ConfigError::new(key, format!("'{v}' is not a positive integer")))
    }

    fn flag(&self, key: &str) -> Result<bool, ConfigError> {
        match self.raw(key).as_deref() {
            Some("1" | "true" | "yes") => Ok(true),
            Some("0" | "false" | "no") | None => Ok(false),
            Some(v) => Err(ConfigError::new(key, format!("'{v}' is not a boolean"))),
        }
    }
}

impl RunConfig {
    /// Validate explicit entries; unset keys take their defaults.
    /// A swept key without a value of its own starts at the sweep's lower bound.
    pub fn from_entries(mut entries: BTreeMap<String, String>) -> Result<Self, ConfigError> {
        if let Some(key) = entries.keys().find(|k| !is_known(k)) {
            return Err(ConfigError::new(key.clone(), "unknown key"));
        }
        let mut sweep = Vec::new();
        for key in ["sweep.x", "sweep.y"] {
            if let Some(text) = entries.get(key) {
                sweep.push(SweepAxis::parse(key, text)?);
            }
        }
        for axis in &sweep {
            entries.entry(axis.key.clone()).or_insert_with(|| super::output::format_float(axis.lo));
        }
        let get = Lookup(&entries);

        let kappa_text = get.raw("chart.kappa").unwrap_or_default();
        let curvature = kappa_text
            .parse::<i64>()
            .ok()
            .and_then(|k| Curvature::from_kappa(k).ok())
            .ok_or_else(|| ConfigError::new("chart.kappa", format!("'{kappa_text}' must be -1 or 1")))?;
        let chart = SpaceChart::new(curvature, get.positive("chart.rho")?, get.positive("chart.c")?)
            .map_err(|e| ConfigError::new("chart", e.to_string()))?;
        let particle = ParticleParams::new(get.positive("particle.mass")?, get.num("particle.charge")?)
            .map_err(|e| ConfigError::new("particle", e.to_string()))?;
        let field = FieldParams::new(get.num("field.B")?);

        let constants_keys = ["constants.epsilon", "constants.A", "constants.I"];
        let initial = if get.given("initial.onaxis_r0") {
            InitialSpec::OnAxis {
                r0: get.positive("initial.onaxis_r0")?,
                t: get.num("initial.t")?,
                phi: get.num("initial.phi")?,
                z: get.opt("initial.z")?.unwrap_or(DEFAULT_Z),
                vz: get.num("initial.vz")?,
            }
        } else if constants_keys.iter().any(|k| get.given(k)) {
            InitialSpec::Constants {
                epsilon: get.positive("constants.epsilon")?,
                transverse: get.num("constants.A")?,
                angular_momentum: get.num("constants.I")?,
                t: get.num("initial.t")?,
                r: get.opt("initial.r")?,
                phi: get.num("initial.phi")?,
                z: get.opt("initial.z")?,
                vr_sign: get.num("initial.vr_sign")?,
                vz_sign: get.num("initial.vz_sign")?,
            }
        } else {
            InitialSpec::State(State::new(
                get.num("initial.t")?,
                get.opt("initial.r")?.unwrap_or(DEFAULT_R),
                get.num("initial.phi")?,
                get.opt("initial.z")?.unwrap_or(DEFAULT_Z),
                get.num("initial.vr")?,
                get.num("initial.vphi")?,
                get.num("initial.vz")?,
            ))
        };

        let compare = CompareConfig {
            tol_z: get.positive("compare.tol_z")?,
            tol_vz: get.positive("compare.tol_vz")?,
            tol_phi: get.positive("compare.tol_phi")?,
            tol_vphi: get.positive("compare.tol_vphi")?,
            tol_r: get.positive("compare.tol_r")?,
            tol_orbit: get.positive("compare.tol_orbit")?,
            phi: get.flag("compare.phi")?,
        };
        let maxwell = MaxwellConfig {
            r_min: get.positive("maxwell.r_min")?,
            r_max: get.positive("maxwell.r_max")?,
            points: get.count("maxwell.points")?,
            z: get.num("maxwell.z")?,
            perturb: get.num("maxwell.perturb")?,
            tol: get.positive("maxwell.tol")?,
        };

        let config = Self {
            chart,
            particle,
            field,
            initial,
            step: get.positive("integration.h")?,
            duration: get.positive("integration.T")?,
            stride: get.count("output.stride")?,
            compare,
            sweep,
            maxwell,
            entries,
        };
        // fail at load, not mid-run
        config.initial_state()?;
        Ok(config)
    }

    /// Parse file text, then apply `key=value` overrides in order.
    pub fn load(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut entries: BTreeMap<String, String> = parse_entries(text)?.into_iter().collect();
        for o in overrides {
            let (k, v) = parse_assignment(o)?;
            entries.insert(k, v);
        }
        Self::from_entries(entries)
    }

    /// Copy with one key replaced.
    pub fn with_entry(&self, key: &str, value: String) -> Result<Self, ConfigError> {
        let mut entries = self.entries.clone();
        entries.insert(key.to_string(), value);
        Self::from_entries(entries)
    }

    /// Every key with its effective value (explicit or default).
    pub fn resolved(&self) -> BTreeMap<String, String> {
        let get = Lookup(&self.entries);
        KEYS.iter().filter_map(|(k, _)| get.raw(k).map(|v| (k.to_string(), v))).collect()
    }

    /// Initial state and the cyclotron frequency it implies.
    pub fn initial_state(&self) -> Result<(State, f64), ConfigError> {
        let chart = &self.chart;
        let state = match &self.initial {
            InitialSpec::State(s) => *s,
            InitialSpec::OnAxis { r0, t, phi, z, vz } => {
                onaxis_initial_state(chart, &self.particle, &self.field, *r0, *t, *phi, *z, *vz)
                    .map_err(|e| ConfigError::new("initial.onaxis_r0", e.to_string()))?
                    .0
            }
            InitialSpec::Constants { epsilon, transverse, angular_momentum, t, r, phi, z, vr_sign, vz_sign } => {
                let omega = cyclotron_omega(&self.particle, &self.field, chart, *epsilon)
                    .map_err(|e| ConfigError::new("constants.epsilon", e.to_string()))?;
                let k = MotionConstants::from_integrals(chart, *epsilon, omega, *angular_momentum, *transverse);
                let r = match r {
                    Some(r) => *r,
                    None => auto_radius(&k, chart).map_err(|m| ConfigError::new("initial.r", m))?,
                };
                let z = match z {
                    Some(z) => *z,
                    None => match forbidden_region(&k, chart) {
                        Ok(ZRegime::Reflected { z_plus, .. }) => z_plus,
                        _ => 0.0,
                    },
                };
                state_from_constants(&k, chart, *t, r, *phi, z, *vr_sign, *vz_sign)
                    .map_err(|e| ConfigError::new("constants", e.to_string()))?
            }
        };
        chart.check(&state).map_err(|e| ConfigError::new("initial", e.to_string()))?;
        let eps = squared_speed(chart, &state);
        let omega = cyclotron_omega(&self.particle, &self.field, chart, eps)
            .map_err(|e| ConfigError::new("initial", e.to_string()))?;
        Ok((state, omega))
    }
}

/// A radius inside the allowed band, away from turning points and the axis.
fn auto_radius(constants: &MotionConstants, chart: &SpaceChart) -> Result<f64, String> {
    let motion = RadialMotion::new(constants, chart).map_err(|e| format!("cannot place the particle: {e}"))?;
    Ok(match motion.branch() {
        RadialBranch::Bounded { .. } => motion.radius_at(FRAC_PI_2),
        RadialBranch::Fixed { r } => r,
        _ => motion.radius_at(1.0),
    })
}
