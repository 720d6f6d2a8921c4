//! Scenario files: `{kind, payload, tolerances}`. The payload may also be
//! written inline, e.g. `{"kind": "composite", "m_a": 1, "m_b": 2, "d": 1, "N": 8}`.

use std::collections::BTreeMap;

use galilei_core::dynamics::{Method, PotentialSpec, StateSpec, TimeGrid};
use galilei_core::lie::AlgebraDescriptor;
use galilei_core::{RepConfig, Spin};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::report::sha256_hex;
use crate::ConfigError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Algebra,
    Uea,
    #[serde(alias = "rep")]
    #[value(name = "rep", alias = "single_rep")]
    SingleRep,
    Composite,
    Spectrum,
    Dynamics,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Algebra => "algebra",
            Kind::Uea => "uea",
            Kind::SingleRep => "single_rep",
            Kind::Composite => "composite",
            Kind::Spectrum => "spectrum",
            Kind::Dynamics => "dynamics",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub kind: Kind,
    pub payload: Payload,
    pub tolerances: BTreeMap<String, f64>,
    /// SHA-256 of the canonical JSON text.
    pub digest: String,
}

#[derive(Clone, Debug)]
pub enum Payload {
    Algebra(AlgebraPayload),
    Uea(UeaPayload),
    SingleRep(RepPayload),
    Composite(CompositePayload),
    Spectrum(SpectrumPayload),
    Dynamics(DynamicsPayload),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraPayload {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub descriptor: Option<AlgebraDescriptor>,
    /// Generator subsets that must close under the bracket.
    #[serde(default)]
    pub subalgebras: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UeaPayload {
    #[serde(default)]
    pub algebra: Option<String>,
    #[serde(default)]
    pub descriptor: Option<AlgebraDescriptor>,
    /// Catalog candidates to certify; all of them when absent.
    #[serde(default)]
    pub candidates: Option<Vec<String>>,
    #[serde(default)]
    pub polynomials: Vec<PolynomialSpec>,
    /// Generators expected to fail centrality.
    #[serde(default)]
    pub noncentral: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialSpec {
    pub name: String,
    pub terms: Vec<WordTerm>,
}

/// `(num/den) · word`, optionally times `i`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WordTerm {
    pub word: Vec<String>,
    #[serde(default = "one_i64")]
    pub num: i64,
    #[serde(default = "one_i64")]
    pub den: i64,
    #[serde(default)]
    pub imaginary: bool,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepPayload {
    pub rep: RepConfig,
    #[serde(default = "two")]
    pub margin: usize,
    #[serde(default = "default_algebra")]
    pub algebra: String,
    #[serde(default)]
    pub boost: Option<Vec<f64>>,
    #[serde(default)]
    pub rotation_angle: Option<f64>,
    #[serde(default)]
    pub zeta: Vec<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompositePayload {
    #[serde(default, rename = "particleA", alias = "a")]
    pub particle_a: Option<RepConfig>,
    #[serde(default, rename = "particleB", alias = "b")]
    pub particle_b: Option<RepConfig>,
    #[serde(default)]
    pub m_a: Option<f64>,
    #[serde(default)]
    pub m_b: Option<f64>,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default, rename = "N")]
    pub n: Option<usize>,
    #[serde(default)]
    pub hbar: Option<f64>,
    #[serde(default = "one_usize")]
    pub margin: usize,
    #[serde(default = "two")]
    pub homomorphism_margin: usize,
}

impl CompositePayload {
    /// The two particle configurations, from either the full or the
    /// shorthand form.
    pub fn configs(&self, at: &str) -> Result<(RepConfig, RepConfig), ConfigError> {
        let shorthand = [self.m_a.is_some(), self.m_b.is_some(), self.d.is_some(), self.n.is_some()];
        match (&self.particle_a, &self.particle_b) {
            (Some(a), Some(b)) => {
                if shorthand.iter().any(|&s| s) || self.hbar.is_some() {
                    return Err(ConfigError::at(at, "use either particleA/particleB or m_a/m_b/d/N, not both"));
                }
                Ok((a.clone(), b.clone()))
            }
            (None, None) => {
                if !shorthand.iter().all(|&s| s) {
                    return Err(ConfigError::at(at, "shorthand form needs all of m_a, m_b, d, N"));
                }
                let mut out = Vec::new();
                for (label, m) in [("m_a", self.m_a.unwrap()), ("m_b", self.m_b.unwrap())] {
                    let mut cfg = RepConfig::new(m, self.d.unwrap(), self.n.unwrap());
                    if let Some(h) = self.hbar {
                        cfg.units.hbar = h;
                    }
                    cfg.validate().map_err(|e| ConfigError::at(format!("{at}.{label}"), e.to_string()))?;
                    out.push(cfg);
                }
                let b = out.pop().unwrap();
                Ok((out.pop().unwrap(), b))
            }
            _ => Err(ConfigError::at(at, "particleA and particleB must be given together")),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumPayload {
    pub n_max: usize,
    #[serde(default)]
    pub s_a: Spin,
    #[serde(default)]
    pub s_b: Spin,
    #[serde(default = "one_f64")]
    pub hbar: f64,
    /// Per shell, `[ℓ, multiplicity]` pairs in increasing `ℓ`.
    #[serde(default)]
    pub expected_shells: Option<Vec<Vec<(f64, usize)>>>,
    #[serde(default)]
    pub product_spins: Vec<(Spin, Spin)>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SystemSpec {
    Single(RepConfig),
    Composite {
        #[serde(rename = "particleA", alias = "a")]
        particle_a: RepConfig,
        #[serde(rename = "particleB", alias = "b")]
        particle_b: RepConfig,
    },
    /// Relative coordinate of a spinning pair on the total-quanta triangle.
    Relative(RelativeSystem),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelativeSystem {
    pub m_a: f64,
    pub m_b: f64,
    #[serde(default)]
    pub s_a: Spin,
    #[serde(default)]
    pub s_b: Spin,
    pub n_max: usize,
    #[serde(default = "one_f64")]
    pub hbar: f64,
    #[serde(default = "one_f64")]
    pub omega_ref: f64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsPayload {
    pub system: SystemSpec,
    #[serde(default = "PotentialSpec::none")]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub psi0: Option<StateSpec>,
    pub t_grid: TimeGrid,
    #[serde(default)]
    pub method: Method,
    /// Single particle: also run the Galilei flow `P²/2m + 𝒱`.
    #[serde(default)]
    pub compare_galilei: bool,
    /// Require the two flows to separate below the `departure` fidelity.
    #[serde(default)]
    pub expect_departure: bool,
    #[serde(default)]
    pub ehrenfest: bool,
    #[serde(default = "one_usize")]
    pub margin: usize,
}

fn one_i64() -> i64 {
    1
}

fn one_usize() -> usize {
    1
}

fn two() -> usize {
    2
}

fn one_f64() -> f64 {
    1.0
}

fn default_algebra() -> String {
    "hr3".into()
}

fn join_path(prefix: &str, inner: &str) -> String {
    match (prefix.is_empty(), inner == "." || inner.is_empty()) {
        (true, true) => "$".into(),
        (true, false) => inner.into(),
        (false, true) => prefix.into(),
        (false, false) => format!("{prefix}.{inner}"),
    }
}

/// Deserializes `v`, reporting failures at `prefix.<path inside v>`.
pub fn deserialize_at<T: DeserializeOwned>(prefix: &str, v: Value) -> Result<T, ConfigError> {
    serde_path_to_error::deserialize(v).map_err(|e| {
        let path = join_path(prefix, &e.path().to_string());
        ConfigError::at(path, e.into_inner().to_string())
    })
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let value: Value = serde_json::from_str(text)
            .map_err(|e| ConfigError::at(format!("line {} column {}", e.line(), e.column()), format!("malformed JSON: {e}")))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self, ConfigError> {
        let digest = sha256_hex(serde_json::to_string(&value).expect("JSON value serializes").as_bytes());
        let Value::Object(mut obj) = value else {
            return Err(ConfigError::at("$", "scenario must be a JSON object"));
        };
        let kind: Kind = deserialize_at("kind", obj.remove("kind").ok_or_else(|| ConfigError::at("kind", "missing field"))?)?;
        let tolerances: BTreeMap<String, f64> = match obj.remove("tolerances") {
            Some(v) => deserialize_at("tolerances", v)?,
            None => BTreeMap::new(),
        };
        let (prefix, body) = match obj.remove("payload") {
            Some(p) => {
                if let Some(extra) = obj.keys().next() {
                    return Err(ConfigError::at(extra.as_str(), "unknown field next to `payload`"));
                }
                ("payload", p)
            }
            None => ("", Value::Object(std::mem::take(&mut obj))),
        };
        let body = if body.is_null() { Value::Object(Map::new()) } else { body };
        let payload = match kind {
            Kind::Algebra => Payload::Algebra(deserialize_at(prefix, body)?),
            Kind::Uea => Payload::Uea(deserialize_at(prefix, body)?),
            Kind::SingleRep => Payload::SingleRep(deserialize_at(prefix, body)?),
            Kind::Composite => Payload::Composite(deserialize_at(prefix, body)?),
            Kind::Spectrum => Payload::Spectrum(deserialize_at(prefix, body)?),
            Kind::Dynamics => Payload::Dynamics(deserialize_at(prefix, body)?),
        };
        Ok(Self { kind, payload, tolerances, digest })
    }

}
