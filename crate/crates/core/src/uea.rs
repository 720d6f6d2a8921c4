//! Universal enveloping algebra: PBW normal ordering and exact centrality
//! certificates for Casimir candidates.
//!
//! A term is `c · ħ^k · G_{a1} G_{a2} ... G_{an}` with `c ∈ Q[i]`. The PBW
//! order is the algebra's generator order; for the catalog this is
//! `J12 < J13 < J23 < K1 < K2 < K3 < P1 < P2 < P3 < M < H`.
//!
//! Rewriting swaps one adjacent inversion at a time using
//! `G_b G_a = G_a G_b − iħ Σ_c f^c_ab G_c` for `a < b`. Each step either
//! removes an inversion at equal degree or lowers the degree, so it terminates.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{rational, ComplexRational};
use crate::lie::{CatalogId, LieAlgebra, LieError};
use crate::report::VerificationReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum UeaError {
    #[error("no Casimir catalog for algebra `{0}` (expected hr3 or g3tilde)")]
    NoCasimirs(String),
    #[error(transparent)]
    Lie(#[from] LieError),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub factors: Vec<usize>,
    pub hbar_power: u32,
}

impl Monomial {
    pub fn is_normal(&self) -> bool {
        self.factors.windows(2).all(|w| w[0] <= w[1])
    }

    fn first_inversion(&self) -> Option<usize> {
        self.factors.windows(2).position(|w| w[0] > w[1])
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PbwPolynomial {
    terms: BTreeMap<Monomial, ComplexRational>,
}

impl PbwPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: ComplexRational) -> Self {
        Self::from_word(&[], c)
    }

    pub fn generator(index: usize) -> Self {
        Self::from_word(&[index], ComplexRational::one())
    }

    pub fn from_word(word: &[usize], coeff: ComplexRational) -> Self {
        let mut p = Self::zero();
        p.add_term(Monomial { factors: word.to_vec(), hbar_power: 0 }, &coeff);
        p
    }

    /// Word built from generator names, e.g. `["K1", "P1"]`.
    pub fn from_names(alg: &LieAlgebra, word: &[&str], coeff: ComplexRational) -> Result<Self, LieError> {
        let idx: Vec<usize> = word.iter().map(|n| alg.index_of(n)).collect::<Result<_, _>>()?;
        Ok(Self::from_word(&idx, coeff))
    }

    pub fn add_term(&mut self, mono: Monomial, coeff: &ComplexRational) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(mono.clone()).or_insert_with(ComplexRational::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &ComplexRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_normal(&self) -> bool {
        self.terms.keys().all(Monomial::is_normal)
    }

    /// Largest word length among the stored terms.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.factors.len()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&ComplexRational::from_int(-1)))
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        let mut out = Self::zero();
        for (m, d) in self.terms() {
            out.add_term(m.clone(), &(d * c));
        }
        out
    }

    /// Concatenation product; the result is generally not normal-ordered.
    pub fn concat(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                let mut factors = m1.factors.clone();
                factors.extend_from_slice(&m2.factors);
                out.add_term(
                    Monomial { factors, hbar_power: m1.hbar_power + m2.hbar_power },
                    &(c1 * c2),
                );
            }
        }
        out
    }

    pub fn display<'a>(&'a self, alg: &'a LieAlgebra) -> impl fmt::Display + 'a {
        PolyDisplay { poly: self, alg }
    }

    /// Serializable term list with generator names.
    pub fn term_records(&self, alg: &LieAlgebra) -> Vec<TermRecord> {
        self.terms()
            .map(|(m, c)| TermRecord {
                word: m.factors.iter().map(|&k| alg.name_of(k).to_string()).collect(),
                hbar_power: m.hbar_power,
                coefficient: c.to_string(),
            })
            .collect()
    }
}

struct PolyDisplay<'a> {
    poly: &'a PbwPolynomial,
    alg: &'a LieAlgebra,
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .poly
            .terms()
            .map(|(m, c)| {
                let mut s = c.to_string();
                match m.hbar_power {
                    0 => {}
                    1 => s.push_str(" ħ"),
                    k => s.push_str(&format!(" ħ^{k}")),
                }
                for &g in &m.factors {
                    s.push(' ');
                    s.push_str(self.alg.name_of(g));
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermRecord {
    pub word: Vec<String>,
    pub hbar_power: u32,
    pub coefficient: String,
}

/// Rewrite `p` into PBW normal form.
pub fn normal_order(alg: &LieAlgebra, p: &PbwPolynomial) -> PbwPolynomial {
    let minus_i = ComplexRational::i().scale(&rational(-1, 1));
    let mut pending = p.terms.clone();
    let mut done = PbwPolynomial::zero();
    while let Some((mono, coeff)) = pending.pop_last() {
        let Some(k) = mono.first_inversion() else {
            done.add_term(mono, &coeff);
            continue;
        };
        let (b, a) = (mono.factors[k], mono.factors[k + 1]);
        let mut push = |m: Monomial, c: ComplexRational| {
            let slot = pending.entry(m.clone()).or_insert_with(ComplexRational::zero);
            *slot += &c;
            if slot.is_zero() {
                pending.remove(&m);
            }
        };
        let mut swapped = mono.factors.clone();
        swapped.swap(k, k + 1);
        push(Monomial { factors: swapped, hbar_power: mono.hbar_power }, coeff.clone());
        for (c, f) in alg.constants.get(a, b) {
            let mut factors = Vec::with_capacity(mono.factors.len() - 1);
            factors.extend_from_slice(&mono.factors[..k]);
            factors.push(*c);
            factors.extend_from_slice(&mono.factors[k + 2..]);
            push(
                Monomial { factors, hbar_power: mono.hbar_power + 1 },
                (&coeff * &minus_i).scale(f),
            );
        }
    }
    done
}

/// Normal-ordered product.
pub fn multiply(alg: &LieAlgebra, p: &PbwPolynomial, q: &PbwPolynomial) -> PbwPolynomial {
    normal_order(alg, &p.concat(q))
}

/// `normal_order(pq − qp)`.
pub fn commutator_uea(alg: &LieAlgebra, p: &PbwPolynomial, q: &PbwPolynomial) -> PbwPolynomial {
    normal_order(alg, &p.concat(q).sub(&q.concat(p)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CasimirCandidate {
    pub name: String,
    pub polynomial: PbwPolynomial,
    pub algebra: String,
}

fn gen(alg: &LieAlgebra, name: &str) -> PbwPolynomial {
    PbwPolynomial::generator(alg.index_of(name).expect("catalog generator"))
}

/// `T_ij = M J_ij − (K_i P_j − P_i K_j)` in normal form, for `i < j`.
pub fn t_component(alg: &LieAlgebra, i: usize, j: usize) -> Result<PbwPolynomial, LieError> {
    let g = |n: String| alg.index_of(&n).map(PbwPolynomial::generator);
    let m = g("M".into())?;
    let jij = g(format!("J{i}{j}"))?;
    let (ki, kj) = (g(format!("K{i}"))?, g(format!("K{j}"))?);
    let (pi, pj) = (g(format!("P{i}"))?, g(format!("P{j}"))?);
    let raw = m.concat(&jij).sub(&ki.concat(&pj)).add(&pi.concat(&kj));
    Ok(normal_order(alg, &raw))
}

/// `(1/2) T_ij T^ij = Σ_{i<j} T_ij T_ij` (Euclidean indices).
pub fn half_t_squared(alg: &LieAlgebra) -> Result<PbwPolynomial, LieError> {
    let mut out = PbwPolynomial::zero();
    for (i, j) in [(1, 2), (1, 3), (2, 3)] {
        let t = t_component(alg, i, j)?;
        out = out.add(&multiply(alg, &t, &t));
    }
    Ok(out)
}

/// `2 M H − Σ_i P_i P_i`.
pub fn galilei_casimir(alg: &LieAlgebra) -> Result<PbwPolynomial, LieError> {
    let two = ComplexRational::from_int(2);
    let mut out = PbwPolynomial::from_names(alg, &["M", "H"], two)?;
    for i in 1..=3 {
        let p = format!("P{i}");
        out = out.sub(&PbwPolynomial::from_names(alg, &[&p, &p], ComplexRational::one())?);
    }
    Ok(normal_order(alg, &out))
}

pub fn casimir_candidates(id: CatalogId) -> Result<Vec<CasimirCandidate>, UeaError> {
    if !matches!(id, CatalogId::Hr3 | CatalogId::G3tilde) {
        return Err(UeaError::NoCasimirs(id.as_str().to_string()));
    }
    let alg = LieAlgebra::catalog(id);
    let mk = |name: &str, polynomial| CasimirCandidate {
        name: name.to_string(),
        polynomial,
        algebra: id.as_str().to_string(),
    };
    let mut out = vec![mk("M", gen(&alg, "M")), mk("half_T_squared", half_t_squared(&alg)?)];
    if id == CatalogId::G3tilde {
        out.push(mk("galilei_casimir", galilei_casimir(&alg)?));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CentralityCertificate {
    pub algebra: String,
    pub candidate: String,
    pub generator: String,
    pub remainder_terms: Vec<TermRecord>,
}

/// One certificate per generator: the normal-ordered `[c, G]`.
pub fn centrality_certificates(alg: &LieAlgebra, c: &CasimirCandidate) -> Vec<CentralityCertificate> {
    (0..alg.dim())
        .into_par_iter()
        .map(|g| {
            let rem = commutator_uea(alg, &c.polynomial, &PbwPolynomial::generator(g));
            CentralityCertificate {
                algebra: alg.name.clone(),
                candidate: c.name.clone(),
                generator: alg.name_of(g).to_string(),
                remainder_terms: rem.term_records(alg),
            }
        })
        .collect()
}

/// Passes iff `[c, G]` normal-orders to exactly zero for every generator.
pub fn check_central(alg: &LieAlgebra, c: &CasimirCandidate) -> VerificationReport {
    let mut report = VerificationReport::new(format!("central[{}]({})", alg.name, c.name));
    let mut nonzero = 0usize;
    for (g, cert) in centrality_certificates(alg, c).into_iter().enumerate() {
        if !cert.remainder_terms.is_empty() {
            nonzero += 1;
            let rem = commutator_uea(alg, &c.polynomial, &PbwPolynomial::generator(g));
            report.violation(format!("[{}, {}] = {}", c.name, cert.generator, rem.display(alg)));
        }
    }
    report.metric("generators_checked", alg.dim() as f64);
    report.metric("nonzero_remainders", nonzero as f64);
    report.metric("degree", c.polynomial.degree() as f64);
    report.metric("terms", c.polynomial.len() as f64);
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hr3() -> LieAlgebra {
        LieAlgebra::catalog(CatalogId::Hr3)
    }

    fn word(alg: &LieAlgebra, w: &[&str]) -> PbwPolynomial {
        PbwPolynomial::from_names(alg, w, ComplexRational::one()).unwrap()
    }

    fn ihbar(alg: &LieAlgebra, w: &[&str], sign: i64) -> PbwPolynomial {
        let idx: Vec<usize> = w.iter().map(|n| alg.index_of(n).unwrap()).collect();
        let mut p = PbwPolynomial::zero();
        p.add_term(
            Monomial { factors: idx, hbar_power: 1 },
            &ComplexRational::i().scale(&rational(sign, 1)),
        );
        p
    }

    #[test]
    fn single_swap() {
        let alg = hr3();
        let out = normal_order(&alg, &word(&alg, &["P1", "K1"]));
        let expected = word(&alg, &["K1", "P1"]).add(&ihbar(&alg, &["M"], -1));
        assert_eq!(out, expected);
        let already = word(&alg, &["K1", "P1"]);
        assert_eq!(normal_order(&alg, &already), already);
    }

    #[test]
    fn so3_swap_follows_catalog_sign() {
        let so3 = LieAlgebra::catalog(CatalogId::So3);
        // [J12, J23] = -iħ J13, so J23 J12 = J12 J23 + iħ J13
        let out = normal_order(&so3, &word(&so3, &["J23", "J12"]));
        assert_eq!(out, word(&so3, &["J12", "J23"]).add(&ihbar(&so3, &["J13"], 1)));
    }

    #[test]
    fn commutators() {
        let alg = hr3();
        let k1 = word(&alg, &["K1"]);
        let p1 = word(&alg, &["P1"]);
        assert_eq!(commutator_uea(&alg, &k1, &p1), ihbar(&alg, &["M"], 1));
        let m = word(&alg, &["M"]);
        assert!(commutator_uea(&alg, &m, &word(&alg, &["K1", "P2"])).is_zero());
    }

    #[test]
    fn t_is_quadratic_and_t_squared_quartic() {
        let alg = hr3();
        for (i, j) in [(1, 2), (1, 3), (2, 3)] {
            let t = t_component(&alg, i, j).unwrap();
            assert_eq!(t.degree(), 2);
            assert!(t.is_normal());
        }
        let t2 = half_t_squared(&alg).unwrap();
        assert_eq!(t2.degree(), 4);
        assert!(t2.is_normal());
    }

    #[test]
    fn casimirs_are_central() {
        for id in [CatalogId::Hr3, CatalogId::G3tilde] {
            let alg = LieAlgebra::catalog(id);
            for c in casimir_candidates(id).unwrap() {
                let r = check_central(&alg, &c);
                assert!(r.passed, "{id} {}: {:?}", c.name, r.violations);
            }
        }
        assert!(casimir_candidates(CatalogId::So3).is_err());
    }

    #[test]
    fn galilei_casimir_expansion() {
        let g = LieAlgebra::catalog(CatalogId::G3tilde);
        let c = galilei_casimir(&g).unwrap();
        let mut expected = PbwPolynomial::from_names(&g, &["M", "H"], ComplexRational::from_int(2)).unwrap();
        for p in ["P1", "P2", "P3"] {
            expected = expected.sub(&word(&g, &[p, p]));
        }
        assert_eq!(c, expected);
    }

    #[test]
    fn h_and_k1k1_are_not_central() {
        let g = LieAlgebra::catalog(CatalogId::G3tilde);
        let h = word(&g, &["H"]);
        let rem = commutator_uea(&g, &h, &word(&g, &["K1"]));
        assert_eq!(rem, ihbar(&g, &["P1"], -1));

        let alg = hr3();
        let c = CasimirCandidate {
            name: "K1K1".into(),
            polynomial: word(&alg, &["K1", "K1"]),
            algebra: "hr3".into(),
        };
        let r = check_central(&alg, &c);
        assert!(!r.passed);
        assert!(r.violations.iter().any(|v| v.starts_with("[K1K1, P1]")));
        // [K1 K1, P1] = 2iħ K1 M
        let rem = commutator_uea(&alg, &c.polynomial, &word(&alg, &["P1"]));
        let mut expected = PbwPolynomial::zero();
        expected.add_term(
            Monomial {
                factors: vec![alg.index_of("K1").unwrap(), alg.index_of("M").unwrap()],
                hbar_power: 1,
            },
            &ComplexRational::i().scale(&rational(2, 1)),
        );
        assert_eq!(rem, expected);
    }

    #[test]
    fn certificates_serialize() {
        let g = LieAlgebra::catalog(CatalogId::G3tilde);
        let c = CasimirCandidate { name: "H".into(), polynomial: word(&g, &["H"]), algebra: "g3tilde".into() };
        let certs = centrality_certificates(&g, &c);
        let k1 = certs.iter().find(|c| c.generator == "K1").unwrap();
        let json = serde_json::to_value(k1).unwrap();
        assert_eq!(json["remainder_terms"][0]["word"][0], "P1");
        assert_eq!(json["remainder_terms"][0]["coefficient"], "-1i");
        assert_eq!(json["remainder_terms"][0]["hbar_power"], 1);
    }
}
