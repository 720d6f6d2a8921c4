//! Named tolerances. Later layers override earlier ones:
//! module default, then suite default, then scenario, then `--tol`.

use std::collections::BTreeMap;

use crate::ConfigError;

pub const MODULE_DEFAULTS: &[(&str, f64)] = &[
    ("homomorphism", 1e-10),
    ("raw_ccr", 1e-12),
    ("ccr", 1e-12),
    ("zeta", 1e-12),
    ("boost", 1e-6),
    ("rotation", 1e-6),
    ("spin_casimir", 1e-13),
    ("t_tensor", 1e-12),
    ("t_spinless", 1e-10),
    ("label", 1e-8),
    ("unitarity", 1e-10),
    ("energy", 1e-9),
    ("picture", 1e-9),
    ("fidelity", 1e-8),
    ("phase", 1e-6),
    ("departure", 0.99),
    ("extra_casimir", 1e-10),
    ("nonscalar_floor", 0.1),
    ("ehrenfest", 1e-6),
    ("casimir_drift", 1e-8),
    ("commutator", 1e-8),
    ("com_momentum", 1e-9),
    ("com_ehrenfest", 1e-5),
    ("rotation_invariance", 1e-8),
    ("leakage", 1e-6),
];

#[derive(Clone, Debug, PartialEq)]
pub struct Tolerances(BTreeMap<&'static str, f64>);

impl Default for Tolerances {
    fn default() -> Self {
        Self(MODULE_DEFAULTS.iter().copied().collect())
    }
}

impl Tolerances {
    /// Layers `overrides` in order; unknown keys and non-positive values are
    /// config errors naming `origin.key`.
    pub fn resolve<'a>(
        overrides: impl IntoIterator<Item = (&'a str, &'a BTreeMap<String, f64>)>,
    ) -> Result<Self, ConfigError> {
        let mut t = Self::default();
        for (origin, layer) in overrides {
            for (k, &v) in layer {
                let Some((key, _)) = MODULE_DEFAULTS.iter().find(|(name, _)| name == k) else {
                    return Err(ConfigError::at(format!("{origin}.{k}"), "unknown tolerance key"));
                };
                if !(v.is_finite() && v > 0.0) {
                    return Err(ConfigError::at(format!("{origin}.{k}"), format!("tolerance must be positive, got {v}")));
                }
                t.0.insert(key, v);
            }
        }
        Ok(t)
    }

    pub fn get(&self, key: &str) -> f64 {
        *self.0.get(key).unwrap_or_else(|| panic!("tolerance `{key}` is not registered"))
    }
}

/// Parses `K=V` pairs from the command line.
pub fn parse_cli_pairs(pairs: &[String]) -> Result<BTreeMap<String, f64>, ConfigError> {
    let mut out = BTreeMap::new();
    for p in pairs {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| ConfigError::at(format!("--tol {p}"), "expected KEY=VALUE"))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| ConfigError::at(format!("--tol {p}"), "value is not a number"))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}
