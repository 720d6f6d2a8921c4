//! Lie algebras given by exact structure constants.
//!
//! Every table stores brackets in the reduced form
//! `[G_a, G_b] = iħ Σ_c f^c_ab G_c` with real rational `f`, so the factor
//! `iħ` never enters this layer. [`bracket`] returns the reduced result:
//! an element `C` meaning `[A, B] = iħ C`.
//!
//! # Catalog
//!
//! | id        | generators                              |
//! |-----------|-----------------------------------------|
//! | `h3_naive`| `X1 X2 X3 P1 P2 P3 I`                   |
//! | `h3`      | `K1 K2 K3 P1 P2 P3 M`                   |
//! | `so3`     | `J12 J13 J23`                           |
//! | `hr3`     | `J12 J13 J23 K1 K2 K3 P1 P2 P3 M`       |
//! | `g3tilde` | `hr3` plus `H`                          |
//!
//! Rotation brackets are the literal expansion of
//! `[J_ij, J_hk] = iħ (δ_jk J_ih + δ_ih J_jk − δ_ik J_jh − δ_jh J_ik)` with
//! only `J_ij`, `i < j`, stored and `J_ji = −J_ij`. With this convention
//! `[J12, J23] = −iħ J13`, `[J12, J13] = iħ J23` and `[J13, J23] = iħ J12`;
//! vectors transform as `[J_ij, V_k] = iħ (δ_ik V_j − δ_jk V_i)`, so for
//! example `[J12, K1] = iħ K2`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{int, ComplexRational, Rational};
use crate::report::VerificationReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LieError {
    #[error("unknown algebra `{0}` (expected h3_naive, h3, so3, hr3 or g3tilde)")]
    UnknownAlgebra(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator index {index} out of range for algebra of dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("duplicate generator `{0}`")]
    DuplicateGenerator(String),
    #[error("structure constants violate antisymmetry for [{a}, {b}]")]
    Antisymmetry { a: String, b: String },
    #[error("bracket [{a}, {b}] listed more than once")]
    DuplicateBracket { a: String, b: String },
    #[error("zero denominator in bracket [{a}, {b}]")]
    ZeroDenominator { a: String, b: String },
    #[error("malformed algebra descriptor: {0}")]
    Descriptor(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GeneratorId {
    pub name: String,
    pub index: usize,
}

/// Sparse table `(a, b) -> [(c, f^c_ab)]`. Both orientations are stored,
/// which lets tests build deliberately one-sided (corrupted) tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureConstants {
    dim: usize,
    table: BTreeMap<(usize, usize), Vec<(usize, Rational)>>,
}

fn merge_terms(terms: impl IntoIterator<Item = (usize, Rational)>) -> Vec<(usize, Rational)> {
    let mut acc: BTreeMap<usize, Rational> = BTreeMap::new();
    for (c, f) in terms {
        *acc.entry(c).or_insert_with(Rational::zero) += f;
    }
    acc.into_iter().filter(|(_, f)| !f.is_zero()).collect()
}

impl StructureConstants {
    pub fn new(dim: usize) -> Self {
        Self { dim, table: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Set `[G_a, G_b]` and the mirrored `[G_b, G_a]`.
    pub fn set(&mut self, a: usize, b: usize, terms: Vec<(usize, Rational)>) {
        let terms = merge_terms(terms);
        let negated = terms.iter().map(|(c, f)| (*c, -f.clone())).collect();
        self.set_one_sided(a, b, terms);
        self.set_one_sided(b, a, negated);
    }

    /// Set only `[G_a, G_b]`, leaving `[G_b, G_a]` untouched.
    pub fn set_one_sided(&mut self, a: usize, b: usize, terms: Vec<(usize, Rational)>) {
        assert!(a < self.dim && b < self.dim, "generator index out of range");
        let terms = merge_terms(terms);
        if terms.is_empty() {
            self.table.remove(&(a, b));
        } else {
            self.table.insert((a, b), terms);
        }
    }

    pub fn get(&self, a: usize, b: usize) -> &[(usize, Rational)] {
        self.table.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Ordered pairs whose entries are not the negation of their mirror
    /// (including nonzero diagonal entries).
    pub fn antisymmetry_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for &(a, b) in self.table.keys() {
            if a > b {
                continue;
            }
            let mirrored: Vec<(usize, Rational)> =
                self.get(b, a).iter().map(|(c, f)| (*c, -f.clone())).collect();
            if a == b || self.get(a, b) != mirrored.as_slice() {
                out.push((a, b));
            }
        }
        for &(a, b) in self.table.keys() {
            if a > b && !self.table.contains_key(&(b, a)) {
                out.push((b, a));
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Vec<(usize, Rational)>)> {
        self.table.iter()
    }
}

/// Finitely supported element `Σ c_k G_k` with Gaussian-rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AlgebraElement {
    coeffs: BTreeMap<usize, ComplexRational>,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(index: usize) -> Self {
        Self::from_terms([(index, ComplexRational::one())])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, ComplexRational)>) -> Self {
        let mut out = Self::zero();
        for (k, c) in terms {
            out.add_term(k, &c);
        }
        out
    }

    pub fn add_term(&mut self, index: usize, coeff: &ComplexRational) {
        let slot = self.coeffs.entry(index).or_insert_with(ComplexRational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.coeffs.remove(&index);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, index: usize) -> ComplexRational {
        self.coeffs.get(&index).cloned().unwrap_or_else(ComplexRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &ComplexRational)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn scale(&self, factor: &ComplexRational) -> Self {
        Self::from_terms(self.coeffs.iter().map(|(k, c)| (*k, c * factor)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_term(k, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&ComplexRational::from_int(-1)))
    }

    /// Render with generator names, e.g. `2 K1 + 1/2i P3`.
    pub fn display<'a>(&'a self, alg: &'a LieAlgebra) -> impl fmt::Display + 'a {
        ElementDisplay { elem: self, alg }
    }
}

struct ElementDisplay<'a> {
    elem: &'a AlgebraElement,
    alg: &'a LieAlgebra,
}

impl fmt::Display for ElementDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.elem.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .elem
            .terms()
            .map(|(k, c)| {
                let name = self.alg.generators.get(k).map(|g| g.name.as_str()).unwrap_or("?");
                if *c == ComplexRational::one() {
                    name.to_string()
                } else {
                    format!("{c} {name}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CatalogId {
    H3Naive,
    H3,
    So3,
    Hr3,
    G3tilde,
}

impl CatalogId {
    pub const ALL: [CatalogId; 5] =
        [CatalogId::H3Naive, CatalogId::H3, CatalogId::So3, CatalogId::Hr3, CatalogId::G3tilde];

    pub fn as_str(self) -> &'static str {
        match self {
            CatalogId::H3Naive => "h3_naive",
            CatalogId::H3 => "h3",
            CatalogId::So3 => "so3",
            CatalogId::Hr3 => "hr3",
            CatalogId::G3tilde => "g3tilde",
        }
    }
}

impl FromStr for CatalogId {
    type Err = LieError;
    fn from_str(s: &str) -> Result<Self, LieError> {
        CatalogId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| LieError::UnknownAlgebra(s.to_string()))
    }
}

impl fmt::Display for CatalogId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// JSON form of a custom algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDescriptor {
    pub name: String,
    pub generators: Vec<String>,
    pub brackets: Vec<BracketEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketEntry {
    pub a: String,
    pub b: String,
    pub terms: Vec<BracketTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BracketTerm {
    pub c: String,
    pub num: i64,
    #[serde(default = "one_i64")]
    pub den: i64,
}

fn one_i64() -> i64 {
    1
}

impl AlgebraDescriptor {
    pub fn from_json(text: &str) -> Result<Self, LieError> {
        serde_json::from_str(text).map_err(|e| LieError::Descriptor(e.to_string()))
    }
}

pub enum AlgebraSpec {
    Catalog(CatalogId),
    Custom(AlgebraDescriptor),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    pub name: String,
    pub generators: Vec<GeneratorId>,
    pub constants: StructureConstants,
}

pub fn build_algebra(spec: AlgebraSpec) -> Result<LieAlgebra, LieError> {
    match spec {
        AlgebraSpec::Catalog(id) => Ok(LieAlgebra::catalog(id)),
        AlgebraSpec::Custom(desc) => LieAlgebra::from_descriptor(&desc),
    }
}

const ROT_PAIRS: [(usize, usize); 3] = [(1, 2), (1, 3), (2, 3)];

fn j_name(i: usize, j: usize) -> String {
    format!("J{i}{j}")
}

/// `[J_ij, J_hk]` (1-based, `i<j`, `h<k`) as signed `J_pq` terms with `p<q`.
fn rotation_terms(i: usize, j: usize, h: usize, k: usize) -> Vec<((usize, usize), i64)> {
    let d = |a: usize, b: usize| i64::from(a == b);
    let raw = [
        ((i, h), d(j, k)),
        ((j, k), d(i, h)),
        ((j, h), -d(i, k)),
        ((i, k), -d(j, h)),
    ];
    raw.into_iter()
        .filter(|&((p, q), s)| s != 0 && p != q)
        .map(|((p, q), s)| if p < q { ((p, q), s) } else { ((q, p), -s) })
        .collect()
}

struct Builder {
    names: Vec<String>,
    constants: StructureConstants,
}

impl Builder {
    fn new(names: Vec<String>) -> Self {
        let dim = names.len();
        Self { names, constants: StructureConstants::new(dim) }
    }

    fn idx(&self, name: &str) -> usize {
        self.names.iter().position(|n| n == name).expect("catalog generator")
    }

    fn set(&mut self, a: &str, b: &str, terms: &[(&str, i64)]) {
        let (a, b) = (self.idx(a), self.idx(b));
        let terms = terms.iter().map(|(c, f)| (self.idx(c), int(*f))).collect();
        self.constants.set(a, b, terms);
    }

    fn rotations(&mut self) {
        for &(i, j) in &ROT_PAIRS {
            for &(h, k) in &ROT_PAIRS {
                if (i, j) >= (h, k) {
                    continue;
                }
                let terms: Vec<(String, i64)> = rotation_terms(i, j, h, k)
                    .into_iter()
                    .map(|((p, q), s)| (j_name(p, q), s))
                    .collect();
                let terms: Vec<(&str, i64)> = terms.iter().map(|(n, s)| (n.as_str(), *s)).collect();
                self.set(&j_name(i, j), &j_name(h, k), &terms);
            }
        }
    }

    fn vector(&mut self, prefix: &str) {
        for &(i, j) in &ROT_PAIRS {
            for k in 1..=3 {
                let mut terms = Vec::new();
                if i == k {
                    terms.push((format!("{prefix}{j}"), 1));
                }
                if j == k {
                    terms.push((format!("{prefix}{i}"), -1));
                }
                let terms: Vec<(&str, i64)> = terms.iter().map(|(n, s)| (n.as_str(), *s)).collect();
                self.set(&j_name(i, j), &format!("{prefix}{k}"), &terms);
            }
        }
    }

    fn heisenberg(&mut self, position: &str, momentum: &str, central: &str) {
        for i in 1..=3 {
            self.set(&format!("{position}{i}"), &format!("{momentum}{i}"), &[(central, 1)]);
        }
    }

    fn finish(self, name: &str) -> LieAlgebra {
        LieAlgebra {
            name: name.to_string(),
            generators: self
                .names
                .into_iter()
                .enumerate()
                .map(|(index, name)| GeneratorId { name, index })
                .collect(),
            constants: self.constants,
        }
    }
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

const HR3_NAMES: [&str; 10] = ["J12", "J13", "J23", "K1", "K2", "K3", "P1", "P2", "P3", "M"];

impl LieAlgebra {
    pub fn catalog(id: CatalogId) -> Self {
        match id {
            CatalogId::H3Naive => {
                let mut b = Builder::new(names(&["X1", "X2", "X3", "P1", "P2", "P3", "I"]));
                b.heisenberg("X", "P", "I");
                b.finish(id.as_str())
            }
            CatalogId::H3 => {
                let mut b = Builder::new(names(&["K1", "K2", "K3", "P1", "P2", "P3", "M"]));
                b.heisenberg("K", "P", "M");
                b.finish(id.as_str())
            }
            CatalogId::So3 => {
                let mut b = Builder::new(names(&["J12", "J13", "J23"]));
                b.rotations();
                b.finish(id.as_str())
            }
            CatalogId::Hr3 | CatalogId::G3tilde => {
                let mut list = names(&HR3_NAMES);
                if id == CatalogId::G3tilde {
                    list.push("H".to_string());
                }
                let mut b = Builder::new(list);
                b.rotations();
                b.vector("K");
                b.vector("P");
                b.heisenberg("K", "P", "M");
                if id == CatalogId::G3tilde {
                    for i in 1..=3 {
                        b.set(&format!("K{i}"), "H", &[(&format!("P{i}"), 1)]);
                    }
                }
                b.finish(id.as_str())
            }
        }
    }

    pub fn from_descriptor(desc: &AlgebraDescriptor) -> Result<Self, LieError> {
        let mut index: BTreeMap<&str, usize> = BTreeMap::new();
        for (k, g) in desc.generators.iter().enumerate() {
            if index.insert(g.as_str(), k).is_some() {
                return Err(LieError::DuplicateGenerator(g.clone()));
            }
        }
        let lookup = |n: &str| {
            index.get(n).copied().ok_or_else(|| LieError::UnknownGenerator(n.to_string()))
        };
        let mut raw: BTreeMap<(usize, usize), Vec<(usize, Rational)>> = BTreeMap::new();
        for entry in &desc.brackets {
            let (a, b) = (lookup(&entry.a)?, lookup(&entry.b)?);
            let mut terms = Vec::with_capacity(entry.terms.len());
            for t in &entry.terms {
                if t.den == 0 {
                    return Err(LieError::ZeroDenominator { a: entry.a.clone(), b: entry.b.clone() });
                }
                terms.push((lookup(&t.c)?, Rational::new(BigInt::from(t.num), BigInt::from(t.den))));
            }
            let terms = merge_terms(terms);
            if a == b && !terms.is_empty() {
                return Err(LieError::Antisymmetry { a: entry.a.clone(), b: entry.b.clone() });
            }
            if raw.insert((a, b), terms).is_some() {
                return Err(LieError::DuplicateBracket { a: entry.a.clone(), b: entry.b.clone() });
            }
        }
        let mut constants = StructureConstants::new(desc.generators.len());
        for (&(a, b), terms) in &raw {
            if let Some(mirror) = raw.get(&(b, a)) {
                let negated: Vec<(usize, Rational)> =
                    mirror.iter().map(|(c, f)| (*c, -f.clone())).collect();
                if &negated != terms {
                    return Err(LieError::Antisymmetry {
                        a: desc.generators[a].clone(),
                        b: desc.generators[b].clone(),
                    });
                }
            }
            constants.set(a, b, terms.clone());
        }
        Ok(LieAlgebra {
            name: desc.name.clone(),
            generators: desc
                .generators
                .iter()
                .enumerate()
                .map(|(index, name)| GeneratorId { name: name.clone(), index })
                .collect(),
            constants,
        })
    }

    /// Export as a descriptor, listing each unordered pair once (`a < b`).
    pub fn to_descriptor(&self) -> AlgebraDescriptor {
        let brackets = self
            .constants
            .entries()
            .filter(|((a, b), _)| a < b)
            .map(|((a, b), terms)| BracketEntry {
                a: self.generators[*a].name.clone(),
                b: self.generators[*b].name.clone(),
                terms: terms
                    .iter()
                    .map(|(c, f)| BracketTerm {
                        c: self.generators[*c].name.clone(),
                        num: f.numer().to_i64().expect("structure constant fits i64"),
                        den: f.denom().to_i64().expect("structure constant fits i64"),
                    })
                    .collect(),
            })
            .collect();
        AlgebraDescriptor {
            name: self.name.clone(),
            generators: self.generators.iter().map(|g| g.name.clone()).collect(),
            brackets,
        }
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, LieError> {
        self.generators
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| LieError::UnknownGenerator(name.to_string()))
    }

    pub fn name_of(&self, index: usize) -> &str {
        &self.generators[index].name
    }

    /// Basis element for a generator name.
    pub fn element(&self, name: &str) -> Result<AlgebraElement, LieError> {
        Ok(AlgebraElement::basis(self.index_of(name)?))
    }

    /// Reduced bracket of two basis generators.
    pub fn bracket_basis(&self, a: usize, b: usize) -> AlgebraElement {
        AlgebraElement::from_terms(
            self.constants.get(a, b).iter().map(|(c, f)| (*c, ComplexRational::real(f.clone()))),
        )
    }

    fn check_support(&self, e: &AlgebraElement) -> Result<(), LieError> {
        match e.support().find(|&k| k >= self.dim()) {
            Some(index) => Err(LieError::IndexOutOfRange { index, dim: self.dim() }),
            None => Ok(()),
        }
    }

    /// True when every bracket with this generator vanishes.
    pub fn is_central(&self, index: usize) -> bool {
        (0..self.dim()).all(|b| self.constants.get(index, b).is_empty())
    }
}

/// Reduced bracket `C` with `[a, b] = iħ C`, bilinear in both arguments.
pub fn bracket(
    alg: &LieAlgebra,
    a: &AlgebraElement,
    b: &AlgebraElement,
) -> Result<AlgebraElement, LieError> {
    alg.check_support(a)?;
    alg.check_support(b)?;
    let mut out = AlgebraElement::zero();
    for (i, ci) in a.terms() {
        for (j, cj) in b.terms() {
            let cij = ci * cj;
            for (k, f) in alg.constants.get(i, j) {
                out.add_term(*k, &cij.scale(f));
            }
        }
    }
    Ok(out)
}

/// Exhaustive Jacobi identity over all ordered generator triples, plus a
/// table antisymmetry audit.
pub fn check_jacobi(alg: &LieAlgebra) -> VerificationReport {
    let mut report = VerificationReport::new(format!("jacobi[{}]", alg.name));
    for (a, b) in alg.constants.antisymmetry_violations() {
        report.violation(format!(
            "antisymmetry broken for [{}, {}]",
            alg.name_of(a),
            alg.name_of(b)
        ));
    }
    let n = alg.dim();
    let basis: Vec<AlgebraElement> = (0..n).map(AlgebraElement::basis).collect();
    let br = |x: &AlgebraElement, y: &AlgebraElement| {
        bracket(alg, x, y).expect("basis elements are in range")
    };
    let mut nonzero = 0usize;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let residual = br(&br(&basis[a], &basis[b]), &basis[c])
                    .add(&br(&br(&basis[b], &basis[c]), &basis[a]))
                    .add(&br(&br(&basis[c], &basis[a]), &basis[b]));
                if !residual.is_zero() {
                    nonzero += 1;
                    report.violation(format!(
                        "triple ({}, {}, {}): residual (iħ)^2 [{}]",
                        alg.name_of(a),
                        alg.name_of(b),
                        alg.name_of(c),
                        residual.display(alg)
                    ));
                }
            }
        }
    }
    report.metric("triples_checked", (n * n * n) as f64);
    report.metric("nonzero_residuals", nonzero as f64);
    report
}

/// Passes iff the span of `subset` is closed under the bracket.
pub fn subalgebra_check(
    alg: &LieAlgebra,
    subset: &[&str],
) -> Result<VerificationReport, LieError> {
    let idx: Vec<usize> = subset.iter().map(|n| alg.index_of(n)).collect::<Result<_, _>>()?;
    let mut report =
        VerificationReport::new(format!("subalgebra[{}]{{{}}}", alg.name, subset.join(",")));
    let mut pairs = 0usize;
    for (p, &a) in idx.iter().enumerate() {
        for &b in &idx[p + 1..] {
            pairs += 1;
            let c = alg.bracket_basis(a, b);
            let outside: Vec<&str> =
                c.support().filter(|k| !idx.contains(k)).map(|k| alg.name_of(k)).collect();
            if !outside.is_empty() {
                report.violation(format!(
                    "[{}, {}] = iħ ({}) leaves the span via {}",
                    alg.name_of(a),
                    alg.name_of(b),
                    c.display(alg),
                    outside.join(", ")
                ));
            }
        }
    }
    report.metric("pairs_checked", pairs as f64);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(alg: &LieAlgebra, n: &str) -> AlgebraElement {
        alg.element(n).unwrap()
    }

    #[test]
    fn hr3_heisenberg_brackets() {
        let hr3 = LieAlgebra::catalog(CatalogId::Hr3);
        assert_eq!(hr3.dim(), 10);
        let c = bracket(&hr3, &el(&hr3, "K1"), &el(&hr3, "P1")).unwrap();
        assert_eq!(c, el(&hr3, "M"));
        assert!(bracket(&hr3, &el(&hr3, "K1"), &el(&hr3, "P2")).unwrap().is_zero());
        assert!(bracket(&hr3, &el(&hr3, "M"), &el(&hr3, "P1")).unwrap().is_zero());
    }

    #[test]
    fn rotation_acts_on_vectors() {
        let hr3 = LieAlgebra::catalog(CatalogId::Hr3);
        assert_eq!(bracket(&hr3, &el(&hr3, "J12"), &el(&hr3, "K1")).unwrap(), el(&hr3, "K2"));
        let minus_k1 = el(&hr3, "K1").scale(&ComplexRational::from_int(-1));
        assert_eq!(bracket(&hr3, &el(&hr3, "J12"), &el(&hr3, "K2")).unwrap(), minus_k1);
        assert!(bracket(&hr3, &el(&hr3, "J12"), &el(&hr3, "P3")).unwrap().is_zero());
    }

    #[test]
    fn so3_sign_convention() {
        // hand expansion of the tensor bracket at (i,j,h,k) = (1,2,2,3): only
        // the -δ_jh J_ik term survives.
        let so3 = LieAlgebra::catalog(CatalogId::So3);
        let neg = |n: &str| el(&so3, n).scale(&ComplexRational::from_int(-1));
        assert_eq!(bracket(&so3, &el(&so3, "J12"), &el(&so3, "J23")).unwrap(), neg("J13"));
        assert_eq!(bracket(&so3, &el(&so3, "J12"), &el(&so3, "J13")).unwrap(), el(&so3, "J23"));
        assert_eq!(bracket(&so3, &el(&so3, "J13"), &el(&so3, "J23")).unwrap(), el(&so3, "J12"));
    }

    #[test]
    fn g3tilde_time_translation() {
        let g = LieAlgebra::catalog(CatalogId::G3tilde);
        assert_eq!(g.dim(), 11);
        assert_eq!(bracket(&g, &el(&g, "K1"), &el(&g, "H")).unwrap(), el(&g, "P1"));
        assert!(bracket(&g, &el(&g, "P1"), &el(&g, "H")).unwrap().is_zero());
        assert!(bracket(&g, &el(&g, "J12"), &el(&g, "H")).unwrap().is_zero());
    }

    #[test]
    fn catalog_jacobi_passes() {
        for id in CatalogId::ALL {
            let r = check_jacobi(&LieAlgebra::catalog(id));
            assert!(r.passed, "{id}: {:?}", r.violations);
        }
    }

    #[test]
    fn one_sided_corruption_is_caught() {
        let mut hr3 = LieAlgebra::catalog(CatalogId::Hr3);
        let (k1, p1, m) = (
            hr3.index_of("K1").unwrap(),
            hr3.index_of("P1").unwrap(),
            hr3.index_of("M").unwrap(),
        );
        hr3.constants.set_one_sided(k1, p1, vec![(m, int(2))]);
        let r = check_jacobi(&hr3);
        assert!(!r.passed);
        assert!(r.violations.iter().any(|v| v.contains("antisymmetry broken for [K1, P1]")));
        assert!(r.violations.iter().any(|v| v.starts_with("triple (")));
    }

    #[test]
    fn subalgebras_of_g3tilde() {
        let g = LieAlgebra::catalog(CatalogId::G3tilde);
        let h3 = ["K1", "K2", "K3", "P1", "P2", "P3", "M"];
        assert!(subalgebra_check(&g, &h3).unwrap().passed);
        let hr3 = ["J12", "J13", "J23", "K1", "K2", "K3", "P1", "P2", "P3", "M"];
        assert!(subalgebra_check(&g, &hr3).unwrap().passed);
        let r = subalgebra_check(&g, &["K1", "K2", "K3", "H"]).unwrap();
        assert!(!r.passed);
        assert!(r.violations[0].contains("P1"));
    }

    #[test]
    fn hr3_is_g3tilde_without_h() {
        let hr3 = LieAlgebra::catalog(CatalogId::Hr3);
        let g = LieAlgebra::catalog(CatalogId::G3tilde);
        for a in 0..hr3.dim() {
            for b in 0..hr3.dim() {
                assert_eq!(hr3.constants.get(a, b), g.constants.get(a, b));
            }
        }
    }

    #[test]
    fn mass_is_central() {
        for id in [CatalogId::Hr3, CatalogId::G3tilde, CatalogId::H3] {
            let alg = LieAlgebra::catalog(id);
            assert!(alg.is_central(alg.index_of("M").unwrap()));
        }
    }

    #[test]
    fn descriptor_roundtrip_and_errors() {
        let hr3 = LieAlgebra::catalog(CatalogId::Hr3);
        let back = LieAlgebra::from_descriptor(&hr3.to_descriptor()).unwrap();
        assert_eq!(back, hr3);

        let bad = r#"{"name":"x","generators":["A","B","C"],
            "brackets":[{"a":"A","b":"B","terms":[{"c":"C","num":1}]},
                        {"a":"B","b":"A","terms":[{"c":"C","num":1}]}]}"#;
        let desc = AlgebraDescriptor::from_json(bad).unwrap();
        assert!(matches!(
            LieAlgebra::from_descriptor(&desc),
            Err(LieError::Antisymmetry { .. })
        ));

        let unknown = r#"{"name":"x","generators":["A"],
            "brackets":[{"a":"A","b":"Z","terms":[]}]}"#;
        let desc = AlgebraDescriptor::from_json(unknown).unwrap();
        assert_eq!(
            LieAlgebra::from_descriptor(&desc),
            Err(LieError::UnknownGenerator("Z".into()))
        );
        assert!("e8".parse::<CatalogId>().is_err());
    }

    #[test]
    fn element_out_of_range() {
        let so3 = LieAlgebra::catalog(CatalogId::So3);
        let e = AlgebraElement::basis(7);
        assert!(matches!(
            bracket(&so3, &e, &AlgebraElement::basis(0)),
            Err(LieError::IndexOutOfRange { index: 7, dim: 3 })
        ));
    }
}
