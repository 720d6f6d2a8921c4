//! Built-in scenario suites.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::ConfigError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    /// Exact symbolic checks and one-dimensional numerics.
    PaperCore,
    /// Adds three-dimensional spectra, spin and composite dynamics.
    PaperFull,
}

impl Suite {
    pub fn as_str(self) -> &'static str {
        match self {
            Suite::PaperCore => "paper-core",
            Suite::PaperFull => "paper-full",
        }
    }

    /// Suite-level tolerance defaults, layered over the module defaults.
    pub fn tolerances(self) -> BTreeMap<String, f64> {
        BTreeMap::new()
    }

    pub fn entries(self) -> Vec<(&'static str, Value)> {
        let mut out = core_entries();
        if self == Suite::PaperFull {
            out.extend(full_entries());
        }
        out
    }
}

impl FromStr for Suite {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        match s {
            "paper-core" => Ok(Suite::PaperCore),
            "paper-full" => Ok(Suite::PaperFull),
            _ => Err(ConfigError::at("suite", format!("unknown suite `{s}` (expected paper-core or paper-full)"))),
        }
    }
}

/// `d = 1`, `N = 32` packet that stays off the top Fock level up to `t = 2`.
fn packet() -> Value {
    json!({"mass": 1.0, "dims": 1, "levels": 32, "omega_ref": 0.7})
}

fn all_spin_pairs() -> Value {
    let halves = [0.0, 0.5, 1.0, 1.5];
    Value::Array(halves.iter().flat_map(|a| halves.iter().map(move |b| json!([a, b]))).collect())
}

fn core_entries() -> Vec<(&'static str, Value)> {
    vec![
        ("jacobi_h3", json!({"kind": "algebra", "payload": {"name": "h3"}})),
        ("jacobi_so3", json!({"kind": "algebra", "payload": {"name": "so3"}})),
        (
            "jacobi_hr3",
            json!({"kind": "algebra", "payload": {
                "name": "hr3",
                "subalgebras": [["J12", "J13", "J23"], ["K1", "K2", "K3", "P1", "P2", "P3", "M"]],
            }}),
        ),
        ("jacobi_g3tilde", json!({"kind": "algebra", "payload": {"name": "g3tilde"}})),
        ("casimirs_hr3", json!({"kind": "uea", "payload": {"algebra": "hr3"}})),
        ("casimirs_g3tilde", json!({"kind": "uea", "payload": {"algebra": "g3tilde", "noncentral": ["H"]}})),
        (
            "rep_d1",
            json!({"kind": "single_rep", "payload": {
                "rep": {"mass": 1.5, "dims": 1, "levels": 8},
                "margin": 3,
                "boost": [0.05],
                "zeta": [4.0, -0.5],
            }}),
        ),
        ("composite_d1", json!({"kind": "composite", "m_a": 1.0, "m_b": 2.0, "d": 1, "N": 8})),
        ("spin_addition", json!({"kind": "spectrum", "payload": {"n_max": 1, "product_spins": all_spin_pairs()}})),
        (
            "galilei_vs_free",
            json!({"kind": "dynamics", "payload": {
                "system": {"single": packet()},
                "potential": {"kind": "none", "calV": 5.0},
                "psi0": {"preset": "coherent", "alpha": [0.3]},
                "t_grid": {"t_max": 2.0, "steps": 40},
                "compare_galilei": true,
            }}),
        ),
        (
            "galilei_vs_harmonic",
            json!({"kind": "dynamics", "payload": {
                "system": {"single": packet()},
                "potential": {"kind": "polynomial_x", "coefficients": [0.0, 0.0, 0.5], "calV": 5.0},
                "psi0": {"preset": "coherent", "alpha": [0.3]},
                "t_grid": {"t_max": 2.0, "steps": 20},
                "compare_galilei": true,
                "expect_departure": true,
            }}),
        ),
    ]
}

fn full_entries() -> Vec<(&'static str, Value)> {
    let mut out = vec![
        (
            "rep_d3",
            json!({"kind": "single_rep", "payload": {
                "rep": {"mass": 1.7, "dims": 3, "levels": 6},
                "margin": 2,
            }}),
        ),
        (
            "rep_d3_covariance",
            json!({"kind": "single_rep", "payload": {
                "rep": {"mass": 2.0, "dims": 3, "levels": 6},
                "margin": 3,
                "rotation_angle": std::f64::consts::FRAC_PI_2,
                "boost": [0.05, -0.02, 0.0],
            }}),
        ),
    ];
    for (label, s) in [("rep_d3_spin_half", 0.5), ("rep_d3_spin_one", 1.0), ("rep_d3_spin_three_halves", 1.5)] {
        out.push((
            label,
            json!({"kind": "single_rep", "payload": {
                "rep": {"mass": 1.3, "dims": 3, "levels": 4, "spin": s},
                "margin": 2,
            }}),
        ));
    }
    out.extend([
        ("relative_spectrum_n3", json!({"kind": "spectrum", "payload": {"n_max": 3}})),
        ("relative_spectrum_n2", json!({"kind": "spectrum", "payload": {"n_max": 2}})),
        ("relative_spectrum_n2_spins", json!({"kind": "spectrum", "payload": {"n_max": 2, "s_a": 0.5, "s_b": 1.0}})),
        (
            "harmonic_d3",
            json!({"kind": "dynamics", "payload": {
                "system": {"single": {"mass": 1.0, "dims": 3, "levels": 6}},
                "potential": {"kind": "polynomial_x", "coefficients": [0.0, 0.0, 0.5]},
                "psi0": {"preset": "fock", "occupations": [1, 0, 2]},
                "t_grid": {"t_max": 3.0, "steps": 30},
            }}),
        ),
        (
            "com_decoupling",
            json!({"kind": "dynamics", "payload": {
                "system": {"composite": {
                    "particleA": {"mass": 1.0, "dims": 1, "levels": 24},
                    "particleB": {"mass": 2.0, "dims": 1, "levels": 24},
                }},
                "potential": {"kind": "polynomial_r2", "coefficients": [0.0, 0.5]},
                "psi0": {"preset": "product",
                    "a": {"preset": "coherent", "alpha": [0.3]},
                    "b": {"preset": "coherent", "alpha": [-0.2]}},
                "t_grid": {"t_max": 1.0, "steps": 100},
                "ehrenfest": true,
            }}),
        ),
        (
            "composite_rotation_invariance",
            json!({"kind": "dynamics", "payload": {
                "system": {"composite": {
                    "particleA": {"mass": 1.0, "dims": 3, "levels": 3},
                    "particleB": {"mass": 1.5, "dims": 3, "levels": 3},
                }},
                "potential": {"kind": "polynomial_r2", "coefficients": [0.0, 0.5]},
                "psi0": {"preset": "product",
                    "a": {"preset": "fock", "occupations": [0, 0, 0]},
                    "b": {"preset": "fock", "occupations": [1, 0, 0]}},
                "t_grid": {"t_max": 1.0, "steps": 5},
                "margin": 2,
            }}),
        ),
        (
            "relative_spin_flow",
            json!({"kind": "dynamics", "payload": {
                "system": {"relative": {"m_a": 1.0, "m_b": 2.0, "s_a": 0.5, "s_b": 1.0, "n_max": 4}},
                "potential": {"kind": "polynomial_r2", "coefficients": [0.0, 0.4, 0.05]},
                "t_grid": {"t_max": 3.0, "steps": 30},
            }}),
        ),
        (
            "relative_spinless_flow",
            json!({"kind": "dynamics", "payload": {
                "system": {"relative": {"m_a": 1.0, "m_b": 1.0, "n_max": 4}},
                "potential": {"kind": "polynomial_r2", "coefficients": [0.0, 0.4, 0.05]},
                "t_grid": {"t_max": 3.0, "steps": 30},
            }}),
        ),
    ]);
    out
}
