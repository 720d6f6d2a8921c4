//! Two-particle tensor-product representations.
//!
//! Every generator lifts as `Ĝ = Ĝ_a ⊗ I + I ⊗ Ĝ_b`. Positions do not: the
//! position observable of the composite is the center of mass `K̂/m`, and the
//! naive sum `X̂_a ⊗ I + I ⊗ X̂_b` is kept only as a negative control.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::linalg::{commutator, identity, kron, mul, re, spectral_norm, CMatrix, I};
use crate::rep::{rotation_pairs, InteriorProjector, ParticleRep, Realization, RepError};

#[derive(Clone, Debug)]
pub struct CompositeRep {
    pub a: ParticleRep,
    pub b: ParticleRep,
    pub total_mass: f64,
    pub reduced_mass: f64,
    k: Vec<CMatrix>,
    p: Vec<CMatrix>,
    j: Vec<CMatrix>,
    m: CMatrix,
}

pub fn tensor_rep(a: ParticleRep, b: ParticleRep) -> Result<CompositeRep, RepError> {
    CompositeRep::new(a, b)
}

impl CompositeRep {
    pub fn new(a: ParticleRep, b: ParticleRep) -> Result<Self, RepError> {
        let (ca, cb) = (&a.config, &b.config);
        if ca.dims != cb.dims {
            return Err(RepError::Incompatible(format!("dims {} vs {}", ca.dims, cb.dims)));
        }
        if ca.units != cb.units {
            return Err(RepError::Incompatible("hbar or omega_ref differ".into()));
        }
        let (ia, ib) = (identity(a.dim()), identity(b.dim()));
        let lift = |ga: &CMatrix, gb: &CMatrix| kron(ga, &ib) + kron(&ia, gb);
        let k = a.ks().iter().zip(b.ks()).map(|(x, y)| lift(x, y)).collect();
        let p = a.ps().iter().zip(b.ps()).map(|(x, y)| lift(x, y)).collect();
        let j = a.js().iter().zip(b.js()).map(|(x, y)| lift(x, y)).collect();
        let m = lift(a.mass_matrix(), b.mass_matrix());
        let (ma, mb) = (ca.mass, cb.mass);
        Ok(Self {
            total_mass: ma + mb,
            reduced_mass: ma * mb / (ma + mb),
            a,
            b,
            k,
            p,
            j,
            m,
        })
    }

    pub fn lift_a(&self, ga: &CMatrix) -> CMatrix {
        kron(ga, &identity(self.b.dim()))
    }

    pub fn lift_b(&self, gb: &CMatrix) -> CMatrix {
        kron(&identity(self.a.dim()), gb)
    }

    pub fn lift(&self, ga: &CMatrix, gb: &CMatrix) -> CMatrix {
        self.lift_a(ga) + self.lift_b(gb)
    }

    pub fn dims(&self) -> usize {
        self.a.config.dims
    }

    /// `K̂_i / m`.
    pub fn x(&self, axis: usize) -> CMatrix {
        &self.k[axis] / re(self.total_mass)
    }

    /// `(m_a X̂_a ⊗ I + I ⊗ m_b X̂_b) / m`, built from the particle positions.
    pub fn com_position(&self) -> Vec<CMatrix> {
        let (ma, mb) = (self.a.config.mass, self.b.config.mass);
        (0..self.dims())
            .map(|i| {
                (self.lift_a(self.a.x(i)) * re(ma) + self.lift_b(self.b.x(i)) * re(mb))
                    / re(self.total_mass)
            })
            .collect()
    }

    /// `X̂_a ⊗ I + I ⊗ X̂_b`. Not a position observable of the composite.
    pub fn naive_position_sum(&self) -> Vec<CMatrix> {
        (0..self.dims()).map(|i| self.lift(self.a.x(i), self.b.x(i))).collect()
    }

    /// `R̂_i = X̂_a − X̂_b` and `Q̂_i = (m_b P̂_a − m_a P̂_b)/m`.
    pub fn relative_ops(&self) -> (Vec<CMatrix>, Vec<CMatrix>) {
        let (ma, mb) = (self.a.config.mass, self.b.config.mass);
        let r = (0..self.dims()).map(|i| self.lift_a(self.a.x(i)) - self.lift_b(self.b.x(i))).collect();
        let q = (0..self.dims())
            .map(|i| {
                (self.lift_a(self.a.p(i)) * re(mb) - self.lift_b(self.b.p(i)) * re(ma))
                    / re(self.total_mass)
            })
            .collect();
        (r, q)
    }

    /// Center-of-mass orbital part `X_i P_j − P_i X_j` in rotation-pair order.
    pub fn com_orbital(&self) -> Vec<CMatrix> {
        rotation_pairs(self.dims())
            .iter()
            .map(|&(i, j)| {
                let (xi, xj) = (self.x(i), self.x(j));
                mul(&xi, &self.p[j]) - mul(&self.p[i], &xj)
            })
            .collect()
    }

    /// Intrinsic angular momentum `Ŝ_ij = Ĵ_ij − (X_i P_j − P_i X_j)`.
    pub fn intrinsic_spin(&self) -> Vec<CMatrix> {
        self.j.iter().zip(self.com_orbital()).map(|(j, l)| j - l).collect()
    }

    /// Permutation exchanging the two tensor factors; needs equal factor
    /// dimensions.
    pub fn swap_operator(&self) -> Result<CMatrix, RepError> {
        let (da, db) = (self.a.dim(), self.b.dim());
        if da != db {
            return Err(RepError::Incompatible("swap needs equal factor dimensions".into()));
        }
        let mut s = CMatrix::zeros(da * db, da * db);
        for i in 0..da {
            for j in 0..db {
                s[(j * da + i, i * db + j)] = re(1.0);
            }
        }
        Ok(s)
    }

    /// States where either particle sits on its top level in some direction.
    pub fn boundary_indices(&self) -> Vec<usize> {
        let (ba, bb) = (self.a.boundary_indices(), self.b.boundary_indices());
        let db = self.b.dim();
        (0..self.dim())
            .filter(|&idx| ba.binary_search(&(idx / db)).is_ok() || bb.binary_search(&(idx % db)).is_ok())
            .collect()
    }
}

impl Realization for CompositeRep {
    fn dim(&self) -> usize {
        self.a.dim() * self.b.dim()
    }
    fn spatial_dims(&self) -> usize {
        self.dims()
    }
    fn hbar(&self) -> f64 {
        self.a.hbar()
    }
    fn mass(&self) -> f64 {
        self.total_mass
    }
    fn k(&self, axis: usize) -> &CMatrix {
        &self.k[axis]
    }
    fn p(&self, axis: usize) -> &CMatrix {
        &self.p[axis]
    }
    fn j(&self, i: usize, j: usize) -> Option<&CMatrix> {
        let pos = rotation_pairs(self.dims()).iter().position(|&q| q == (i, j))?;
        self.j.get(pos)
    }
    fn mass_matrix(&self) -> &CMatrix {
        &self.m
    }
    fn interior_projector(&self, margin: usize) -> Result<InteriorProjector, RepError> {
        Ok(InteriorProjector::tensor(
            &self.a.interior_projector(margin)?,
            &self.b.interior_projector(margin)?,
        ))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CcrCoefficientReport {
    pub pair: String,
    /// Fitted `c` in `Π[A_i, B_j]Π ≈ i c δ_ij Π`.
    pub coefficient: f64,
    pub expected: f64,
    /// Largest `‖Π(−i[A_i, B_i])Π − c‖`.
    pub diagonal_residual: f64,
    /// Largest `‖Π[A_i, B_j]Π‖` for `i ≠ j`.
    pub off_diagonal_residual: f64,
    pub passed: bool,
    pub non_physical: bool,
}

fn fit_ccr(
    label: &str,
    a: &[CMatrix],
    b: &[CMatrix],
    proj: &InteriorProjector,
    expected: f64,
    tol: f64,
) -> CcrCoefficientReport {
    let rank = proj.rank().max(1) as f64;
    let mut coeffs = Vec::new();
    let mut diag_blocks = Vec::new();
    let mut off: f64 = 0.0;
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            let block = proj.project(&commutator(ai, bj));
            if i == j {
                let herm = block * (-I);
                coeffs.push(herm.trace().re / rank);
                diag_blocks.push(herm);
            } else {
                off = off.max(spectral_norm(&block));
            }
        }
    }
    let c = coeffs.iter().sum::<f64>() / coeffs.len().max(1) as f64;
    let diag = diag_blocks
        .iter()
        .map(|h| spectral_norm(&(h - identity(h.nrows()) * re(c))))
        .fold(0.0, f64::max);
    CcrCoefficientReport {
        pair: label.to_string(),
        coefficient: c,
        expected,
        diagonal_residual: diag,
        off_diagonal_residual: off,
        passed: (c - expected).abs() <= tol && diag <= tol && off <= tol,
        non_physical: label.contains("X_naive"),
    }
}

/// Fits the projected commutator coefficient for the center-of-mass,
/// naive-sum, relative and cross pairs.
pub fn verify_ccr_composite(
    comp: &CompositeRep,
    margin: usize,
    tol: f64,
) -> Result<Vec<CcrCoefficientReport>, RepError> {
    if margin == 0 {
        return Err(RepError::MarginOutOfRange { margin, levels: comp.a.config.levels });
    }
    let proj = comp.interior_projector(margin)?;
    let hbar = comp.hbar();
    let x_com: Vec<CMatrix> = (0..comp.dims()).map(|i| comp.x(i)).collect();
    let p: Vec<CMatrix> = (0..comp.dims()).map(|i| comp.p(i).clone()).collect();
    let naive = comp.naive_position_sum();
    let (r, q) = comp.relative_ops();
    let pairs: [(&str, &[CMatrix], &[CMatrix], f64); 7] = [
        ("(X_com, P)", &x_com, &p, hbar),
        ("(X_naive, P)", &naive, &p, 2.0 * hbar),
        ("(R, Q)", &r, &q, hbar),
        ("(R, P)", &r, &p, 0.0),
        ("(Q, X_com)", &q, &x_com, 0.0),
        ("(R, X_com)", &r, &x_com, 0.0),
        ("(Q, P)", &q, &p, 0.0),
    ];
    Ok(pairs.iter().map(|(l, a, b, e)| fit_ccr(l, a, b, &proj, *e, tol)).collect())
}

/// Exact check that `(X_a, X_b, P_a, P_b) → (X, R, P, Q)` preserves the
/// canonical form: `T Ω Tᵀ = Ω` over the rationals.
pub fn canonical_transform_is_symplectic(m_a: f64, m_b: f64) -> bool {
    let (Some(ma), Some(mb)) = (BigRational::from_float(m_a), BigRational::from_float(m_b)) else {
        return false;
    };
    let m = &ma + &mb;
    if m.is_zero() {
        return false;
    }
    let z = BigRational::zero;
    let o = BigRational::one;
    // rows: X, R, P, Q ; columns: X_a, X_b, P_a, P_b
    let t = [
        [&ma / &m, &mb / &m, z(), z()],
        [o(), -o(), z(), z()],
        [z(), z(), o(), o()],
        [z(), z(), &mb / &m, -(&ma / &m)],
    ];
    let omega = [
        [z(), z(), o(), z()],
        [z(), z(), z(), o()],
        [-o(), z(), z(), z()],
        [z(), -o(), z(), z()],
    ];
    for r in 0..4 {
        for c in 0..4 {
            let mut acc = z();
            for k in 0..4 {
                for l in 0..4 {
                    acc += &t[r][k] * &omega[k][l] * &t[c][l];
                }
            }
            if acc != omega[r][c] {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use crate::rep::RepConfig;

    fn pair(ma: f64, mb: f64, dims: usize, n: usize) -> CompositeRep {
        CompositeRep::new(
            ParticleRep::new(RepConfig::new(ma, dims, n)).unwrap(),
            ParticleRep::new(RepConfig::new(mb, dims, n)).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn mass_is_additive() {
        let c = pair(1.0, 2.0, 1, 4);
        assert_eq!(c.mass_matrix(), &(identity(16) * re(3.0)));
        assert!((c.reduced_mass - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn momentum_lifts_entrywise() {
        let c = pair(1.0, 2.0, 1, 3);
        let expected = kron(c.a.p(0), &identity(3)) + kron(&identity(3), c.b.p(0));
        assert_eq!(c.p(0), &expected);
    }

    #[test]
    fn com_matches_k_over_m() {
        let c = pair(1.0, 2.0, 2, 3);
        for (i, x) in c.com_position().iter().enumerate() {
            assert!(max_abs(&(x - c.x(i))) <= 1e-15);
        }
        let eq = pair(1.5, 1.5, 1, 3);
        let mean = eq.naive_position_sum()[0].clone() * re(0.5);
        assert!(max_abs(&(mean - eq.x(0))) < 1e-15);
    }

    #[test]
    fn ccr_coefficients() {
        let c = pair(1.0, 2.0, 1, 4);
        let reports = verify_ccr_composite(&c, 1, 1e-12).unwrap();
        let get = |l: &str| reports.iter().find(|r| r.pair == l).unwrap();
        assert!((get("(X_com, P)").coefficient - 1.0).abs() < 1e-12);
        assert!((get("(X_naive, P)").coefficient - 2.0).abs() < 1e-12);
        assert!(get("(X_naive, P)").non_physical);
        assert!(reports.iter().all(|r| r.passed), "{reports:#?}");
        assert!(verify_ccr_composite(&c, 0, 1e-12).is_err());
    }

    #[test]
    fn heavy_particle_dominates_com() {
        // X_com − X_a = −(m_b/m) R
        let c = pair(1000.0, 1.0, 1, 4);
        let proj = c.interior_projector(1).unwrap();
        let diff = proj.projected_norm(&(c.x(0) - c.lift_a(c.a.x(0))));
        let r = proj.projected_norm(&c.relative_ops().0[0]);
        assert!((diff / r - 1.0 / 1001.0).abs() < 1e-12, "{diff} / {r}");
    }

    #[test]
    fn incompatible_factors() {
        let a = ParticleRep::new(RepConfig::new(1.0, 1, 3)).unwrap();
        let b = ParticleRep::new(RepConfig::new(1.0, 2, 3)).unwrap();
        assert!(matches!(CompositeRep::new(a, b), Err(RepError::Incompatible(_))));
    }

    #[test]
    fn symplectic_change_of_variables() {
        assert!(canonical_transform_is_symplectic(1.0, 2.0));
        assert!(canonical_transform_is_symplectic(0.3, 7.25));
    }
}
